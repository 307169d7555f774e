use crate::error::{Error, Result};

/// Discrete distribution of counts over equally sized bins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    /// Bins `values` into `bin_count` equal-width bins over `[lo, hi]`.
    ///
    /// Value `v` lands in bin `floor((v - lo) / (hi - lo) * bin_count)`, clamped to
    /// `[0, bin_count - 1]`: `hi` itself belongs to the top bin and values outside the
    /// range fall into the edge bins.
    pub fn from_values(values: &[f64], bin_count: usize, lo: f64, hi: f64) -> Result<Self> {
        if bin_count == 0 {
            return Err(Error::InvalidParameter("bin_count must be at least 1".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(format!("invalid histogram range [{lo}, {hi}]")));
        }
        let mut counts = vec![0u64; bin_count];
        let width = hi - lo;
        for &v in values {
            if v.is_nan() {
                return Err(Error::NonFinite("histogram input"));
            }
            let pos = ((v - lo) / width * bin_count as f64).floor();
            let bin = if pos <= 0.0 {
                0
            } else if pos >= (bin_count - 1) as f64 {
                bin_count - 1
            } else {
                pos as usize
            };
            counts[bin] += 1;
        }
        Ok(Self {
            counts,
            total: values.len() as u64,
        })
    }

    /// One bin per integer in `lo..=hi`; values are rounded to the nearest integer
    /// and clamped into the range.
    pub fn integer(values: &[f64], lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidParameter(format!("invalid integer range {lo}..={hi}")));
        }
        let bins = (hi - lo + 1) as usize;
        Self::from_values(values, bins, lo as f64 - 0.5, hi as f64 + 0.5)
    }

    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidParameter("bin_count must be at least 1".into()));
        }
        let total = counts.iter().sum();
        Ok(Self { counts, total })
    }

    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Relative frequencies; all zeros when the histogram is empty.
    pub fn probabilities(&self) -> Vec<f64> {
        if self.total == 0 {
            return vec![0.0; self.counts.len()];
        }
        let total = self.total as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn top_edge_is_inclusive() {
        let h = Histogram::from_values(&[0.0, 0.5, 1.0], 2, 0.0, 1.0).unwrap();
        assert_eq!(h.counts(), &[1, 2]);
    }

    #[test]
    fn direct_binning() {
        let h = Histogram::from_values(&[0.25; 4], 4, 0.0, 1.0).unwrap();
        assert_eq!(h.counts(), &[0, 4, 0, 0]);
    }

    #[test]
    fn out_of_range_values_clamp() {
        let h = Histogram::from_values(&[-5.0, 5.0], 2, 0.0, 1.0).unwrap();
        assert_eq!(h.counts(), &[1, 1]);
    }

    #[test]
    fn empty_input_has_zero_total() {
        let h = Histogram::from_values(&[], 3, 0.0, 1.0).unwrap();
        assert_eq!(h.total(), 0);
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(Histogram::from_values(&[1.0], 2, 1.0, 1.0).is_err());
        assert!(Histogram::from_values(&[1.0], 0, 0.0, 1.0).is_err());
        assert!(Histogram::from_values(&[f64::NAN], 2, 0.0, 1.0).is_err());
    }

    #[test]
    fn integer_bins() {
        let h = Histogram::integer(&[0.0, 0.0, 1.0, 3.0, 9.0], 0, 3).unwrap();
        assert_eq!(h.counts(), &[2, 1, 0, 2]);
    }

    proptest! {
        #[test]
        fn totals_and_probabilities(values in proptest::collection::vec(-10.0f64..10.0, 1..200), bins in 1usize..50) {
            let h = Histogram::from_values(&values, bins, -3.0, 4.0).unwrap();
            prop_assert_eq!(h.total() as usize, values.len());
            prop_assert_eq!(h.counts().iter().sum::<u64>(), h.total());
            let sum: f64 = h.probabilities().iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }
    }
}
