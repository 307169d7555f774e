//! Conway's Game of Life on a torus; every cell is an agent whose configuration
//! is its state (0 dead, 1 alive).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{lag_warm_up, Disturbance, Scenario};
use crate::adaptation::UsageBounds;
use crate::error::Result;
use crate::series::ConfigurationVector;
use crate::transfer::Binning;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifeParams {
    pub width: usize,
    pub height: usize,
    /// Probability that a cell starts alive.
    pub initial_density: f64,
}

impl Default for LifeParams {
    fn default() -> Self {
        Self {
            width: 50,
            height: 50,
            initial_density: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LifeWorld {
    params: LifeParams,
    tick: u64,
    cells: Vec<u8>,
    previous: Vec<u8>,
}

impl LifeWorld {
    pub fn new(params: LifeParams, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cells = (0..params.width * params.height)
            .map(|_| u8::from(rng.gen::<f64>() < params.initial_density))
            .collect();
        Self::from_cells(params.width, params.height, cells)
    }

    /// World with an explicit row-major initial grid.
    pub fn from_cells(width: usize, height: usize, cells: Vec<u8>) -> Self {
        assert_eq!(cells.len(), width * height, "grid size mismatch");
        assert!(cells.iter().all(|&c| c <= 1), "cell states must be 0 or 1");
        Self {
            params: LifeParams {
                width,
                height,
                initial_density: 0.0,
            },
            tick: 0,
            previous: cells.clone(),
            cells,
        }
    }

    pub fn width(&self) -> usize {
        self.params.width
    }

    pub fn height(&self) -> usize {
        self.params.height
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn alive(&self) -> usize {
        self.cells.iter().map(|&c| c as usize).sum()
    }

    fn live_neighbours(&self, x: usize, y: usize) -> u8 {
        let (w, h) = (self.params.width, self.params.height);
        let mut n = 0;
        for dy in [h - 1, 0, 1] {
            for dx in [w - 1, 0, 1] {
                if dx == 0 && dy == 0 {
                    continue;
                }
                n += self.cells[((y + dy) % h) * w + (x + dx) % w];
            }
        }
        n
    }
}

/// Synchronous update of a toroidal grid under the B3/S23 rule.
pub fn life_step(world: &mut LifeWorld) {
    let (w, h) = (world.params.width, world.params.height);
    let next: Vec<u8> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| {
            let n = world.live_neighbours(x, y);
            let alive = world.cells[y * w + x] == 1;
            u8::from(matches!((alive, n), (true, 2) | (true, 3) | (false, 3)))
        })
        .collect();
    world.previous = std::mem::replace(&mut world.cells, next);
    world.tick += 1;
}

impl Scenario for LifeWorld {
    fn name(&self) -> &'static str {
        "life"
    }

    fn tick(&self) -> u64 {
        self.tick
    }

    fn agent_count(&self) -> usize {
        self.cells.len()
    }

    fn dimension(&self) -> usize {
        1
    }

    fn usage_bounds(&self) -> UsageBounds {
        UsageBounds::uniform(1, 0.0, 1.0).expect("static bounds")
    }

    fn step(&mut self) {
        life_step(self);
    }

    fn configurations(&self) -> Vec<ConfigurationVector> {
        self.cells
            .iter()
            .map(|&c| ConfigurationVector::new(vec![c as f64]).expect("finite"))
            .collect()
    }

    /// The previous tick's grid: the automaton is its own environment.
    fn environment_observation(&self) -> Result<Vec<f64>> {
        if self.tick == 0 {
            return Err(lag_warm_up(self.tick));
        }
        Ok(self.previous.iter().map(|&c| c as f64).collect())
    }

    fn system_observation(&self) -> Result<Vec<f64>> {
        if self.tick == 0 {
            return Err(lag_warm_up(self.tick));
        }
        Ok(self.cells.iter().map(|&c| c as f64).collect())
    }

    fn environment_binning(&self) -> Binning {
        Binning::Discrete { lo: 0, hi: 1 }
    }

    fn system_binning(&self) -> Binning {
        Binning::Discrete { lo: 0, hi: 1 }
    }

    fn first_observation_tick(&self) -> u64 {
        1
    }

    fn disturbances(&self) -> Vec<Disturbance> {
        Vec::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::oracle::life_step_oracle;
    use crate::transfer::{complexity, emergence};

    fn grid(w: usize, h: usize, alive: &[(usize, usize)]) -> LifeWorld {
        let mut cells = vec![0; w * h];
        for &(x, y) in alive {
            cells[y * w + x] = 1;
        }
        LifeWorld::from_cells(w, h, cells)
    }

    #[test]
    fn block_is_still() {
        let mut w = grid(6, 6, &[(2, 2), (3, 2), (2, 3), (3, 3)]);
        let start = w.cells().to_vec();
        for _ in 0..5 {
            life_step(&mut w);
            assert_eq!(w.cells(), &start[..]);
        }
    }

    #[test]
    fn blinker_oscillates() {
        let mut w = grid(5, 5, &[(1, 2), (2, 2), (3, 2)]);
        let horizontal = w.cells().to_vec();
        life_step(&mut w);
        assert_eq!(w.cells(), grid(5, 5, &[(2, 1), (2, 2), (2, 3)]).cells());
        life_step(&mut w);
        assert_eq!(w.cells(), &horizontal[..]);
    }

    #[test]
    fn empty_grid_stays_empty() {
        let mut w = grid(4, 4, &[]);
        life_step(&mut w);
        assert_eq!(w.alive(), 0);
    }

    #[test]
    fn wraps_around_edges() {
        // a blinker straddling the left/right seam
        let mut w = grid(5, 5, &[(4, 2), (0, 2), (1, 2)]);
        life_step(&mut w);
        assert_eq!(w.cells(), grid(5, 5, &[(0, 1), (0, 2), (0, 3)]).cells());
    }

    #[test]
    fn matches_neighbour_count_oracle() {
        for seed in 0..100 {
            let mut w = LifeWorld::new(
                LifeParams {
                    width: 10,
                    height: 10,
                    initial_density: 0.4,
                },
                seed,
            );
            let expected = life_step_oracle(w.cells(), 10, 10);
            life_step(&mut w);
            assert_eq!(w.cells(), &expected[..], "seed {seed}");
        }
    }

    #[test]
    fn observables_lag_by_one_tick() {
        let mut w = LifeWorld::new(LifeParams::default(), 1);
        assert!(w.environment_observation().is_err());
        assert!(w.system_observation().is_err());
        let before: Vec<f64> = w.cells().iter().map(|&c| c as f64).collect();
        w.step();
        assert_eq!(w.environment_observation().unwrap(), before);
        assert_eq!(w.configurations().len(), 2500);
    }

    fn complexity_of(cells: &[u8]) -> f64 {
        let v: Vec<f64> = cells.iter().map(|&c| c as f64).collect();
        complexity(emergence(&Binning::Discrete { lo: 0, hi: 1 }.histogram(&v).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn observation_complexity_extremes() {
        assert_eq!(complexity_of(&[0; 100]), 0.0);
        let half: Vec<u8> = (0..100).map(|i| (i % 2) as u8).collect();
        assert!(complexity_of(&half).abs() < 1e-12);
        // 11% alive gives emergence close to 1/2
        let sparse: Vec<u8> = (0..10_000).map(|i| u8::from(i % 100 < 11)).collect();
        assert!(complexity_of(&sparse) > 0.9999);
    }

    #[test]
    fn seeded_runs_are_identical() {
        let mut a = LifeWorld::new(LifeParams::default(), 9);
        let mut b = LifeWorld::new(LifeParams::default(), 9);
        for _ in 0..50 {
            a.step();
            b.step();
        }
        assert_eq!(a.cells(), b.cells());
    }
}
