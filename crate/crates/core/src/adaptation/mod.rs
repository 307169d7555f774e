//! Measures of adaptation behaviour computed from configuration time series.

pub mod coherence;
pub mod kde;
pub mod kmeans;
pub mod stability;
pub mod usage;
pub mod variability;

pub use coherence::{configuration_coherence, configuration_variance};
pub use kde::{kl_divergence, BandwidthRule, ParzenDensity};
pub use kmeans::{kmeans, Clustering, KMeansConfig};
pub use stability::{
    active_count, activity_divergence, activity_factor, configuration_stability, is_active, stability_from_activity,
    ActivityRecord, StabilityParams, StabilityTracker,
};
pub use usage::{average_parameter_usage, global_parameter_usage, Usage, UsageBounds};
pub use variability::{average_centroid_distance, configuration_variability, max_cluster_count};
