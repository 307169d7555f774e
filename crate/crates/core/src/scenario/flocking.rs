//! Boids on a torus. Each bird is an agent whose configuration is its heading
//! angle; at a scheduled tick a shot scatters the birds around one of them.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{lag_warm_up, Disturbance, Scenario};
use crate::adaptation::UsageBounds;
use crate::error::Result;
use crate::series::ConfigurationVector;
use crate::transfer::Binning;

type Vec2 = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlockParams {
    pub birds: usize,
    pub width: f64,
    pub height: f64,
    pub neighbour_radius: f64,
    pub avoidance_radius: f64,
    pub alignment_weight: f64,
    pub cohesion_weight: f64,
    pub avoidance_weight: f64,
    pub speed: f64,
    /// Tick at which bird 0 is shot at; `None` disables the disturbance.
    pub shot_tick: Option<u64>,
    pub shot_radius: f64,
    pub shot_duration: u64,
    pub angle_bins: usize,
}

impl Default for FlockParams {
    fn default() -> Self {
        Self {
            birds: 50,
            width: 150.0,
            height: 150.0,
            neighbour_radius: 20.0,
            avoidance_radius: 5.0,
            alignment_weight: 1.0,
            cohesion_weight: 1.0,
            avoidance_weight: 1.5,
            speed: 1.0,
            shot_tick: Some(500),
            shot_radius: 50.0,
            shot_duration: 2,
            angle_bins: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bird {
    pub position: Vec2,
    /// Unit vector.
    pub heading: Vec2,
}

#[derive(Debug, Clone)]
struct Shot {
    origin: Vec2,
    scattered: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct FlockWorld {
    params: FlockParams,
    tick: u64,
    birds: Vec<Bird>,
    previous_headings: Vec<Vec2>,
    shot: Option<Shot>,
}

fn norm(v: Vec2) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

fn unit(v: Vec2) -> Option<Vec2> {
    let n = norm(v);
    (n > 0.0 && n.is_finite()).then(|| [v[0] / n, v[1] / n])
}

/// Heading angle in `[0, 2pi)`.
pub fn heading_angle(h: Vec2) -> f64 {
    let a = h[1].atan2(h[0]);
    let a = if a < 0.0 { a + TAU } else { a };
    if a >= TAU {
        0.0
    } else {
        a
    }
}

impl FlockWorld {
    pub fn new(params: FlockParams, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let birds = (0..params.birds)
            .map(|_| {
                let position = [rng.gen::<f64>() * params.width, rng.gen::<f64>() * params.height];
                let a = rng.gen::<f64>() * TAU;
                Bird {
                    position,
                    heading: [a.cos(), a.sin()],
                }
            })
            .collect();
        Self::from_birds(params, birds)
    }

    pub fn from_birds(params: FlockParams, birds: Vec<Bird>) -> Self {
        let previous_headings = birds.iter().map(|b| b.heading).collect();
        Self {
            params,
            tick: 0,
            birds,
            previous_headings,
            shot: None,
        }
    }

    pub fn birds(&self) -> &[Bird] {
        &self.birds
    }

    pub fn params(&self) -> &FlockParams {
        &self.params
    }

    /// Shortest displacement from `a` to `b` on the torus.
    fn displacement(&self, a: Vec2, b: Vec2) -> Vec2 {
        let wrap = |d: f64, size: f64| d - size * (d / size).round();
        [
            wrap(b[0] - a[0], self.params.width),
            wrap(b[1] - a[1], self.params.height),
        ]
    }

    fn steered_heading(&self, i: usize) -> Vec2 {
        let p = &self.params;
        let me = self.birds[i];
        let (mut align, mut toward, mut close) = ([0.0; 2], [0.0; 2], [0.0; 2]);
        let (mut neighbours, mut too_close) = (0usize, 0usize);
        for (j, other) in self.birds.iter().enumerate() {
            if j == i {
                continue;
            }
            let d = self.displacement(me.position, other.position);
            let dist = norm(d);
            if dist >= p.neighbour_radius {
                continue;
            }
            neighbours += 1;
            align[0] += other.heading[0];
            align[1] += other.heading[1];
            toward[0] += d[0];
            toward[1] += d[1];
            if dist < p.avoidance_radius {
                too_close += 1;
                close[0] += d[0];
                close[1] += d[1];
            }
        }
        if neighbours == 0 {
            return me.heading;
        }
        let n = neighbours as f64;
        let alignment = [align[0] / n, align[1] / n];
        let cohesion = unit([toward[0] / n, toward[1] / n]).unwrap_or([0.0; 2]);
        let avoidance = if too_close > 0 {
            let m = too_close as f64;
            unit([-close[0] / m, -close[1] / m]).unwrap_or([0.0; 2])
        } else {
            [0.0; 2]
        };
        let combined = [
            p.alignment_weight * alignment[0] + p.cohesion_weight * cohesion[0] + p.avoidance_weight * avoidance[0],
            p.alignment_weight * alignment[1] + p.cohesion_weight * cohesion[1] + p.avoidance_weight * avoidance[1],
        ];
        let Some(steer) = unit(combined) else {
            return me.heading;
        };
        unit([me.heading[0] + steer[0], me.heading[1] + steer[1]]).unwrap_or(me.heading)
    }
}

/// Advances the flock one tick: steer every bird from the current state, apply
/// the shot override while it lasts, then move and wrap.
pub fn flocking_step(world: &mut FlockWorld) {
    let tick = world.tick + 1;
    let mut headings: Vec<Vec2> = (0..world.birds.len()).map(|i| world.steered_heading(i)).collect();

    if let Some(shot_tick) = world.params.shot_tick {
        if tick == shot_tick && !world.birds.is_empty() {
            let origin = world.birds[0].position;
            let scattered = (1..world.birds.len())
                .filter(|&i| norm(world.displacement(origin, world.birds[i].position)) < world.params.shot_radius)
                .collect();
            world.shot = Some(Shot { origin, scattered });
        }
        if tick >= shot_tick && tick < shot_tick + world.params.shot_duration {
            if let Some(shot) = &world.shot {
                for &i in &shot.scattered {
                    if let Some(away) = unit(world.displacement(shot.origin, world.birds[i].position)) {
                        headings[i] = away;
                    }
                }
            }
        }
    }

    let (w, h, speed) = (world.params.width, world.params.height, world.params.speed);
    for (bird, heading) in world.birds.iter_mut().zip(headings) {
        bird.heading = heading;
        bird.position = [
            (bird.position[0] + speed * heading[0]).rem_euclid(w),
            (bird.position[1] + speed * heading[1]).rem_euclid(h),
        ];
        // rem_euclid can round up to the modulus itself
        if bird.position[0] >= w {
            bird.position[0] = 0.0;
        }
        if bird.position[1] >= h {
            bird.position[1] = 0.0;
        }
    }
    world.tick = tick;
}

impl Scenario for FlockWorld {
    fn name(&self) -> &'static str {
        "flocking"
    }

    fn tick(&self) -> u64 {
        self.tick
    }

    fn agent_count(&self) -> usize {
        self.birds.len()
    }

    fn dimension(&self) -> usize {
        1
    }

    fn usage_bounds(&self) -> UsageBounds {
        UsageBounds::uniform(1, 0.0, TAU).expect("static bounds")
    }

    fn step(&mut self) {
        self.previous_headings = self.birds.iter().map(|b| b.heading).collect();
        flocking_step(self);
    }

    fn configurations(&self) -> Vec<ConfigurationVector> {
        self.birds
            .iter()
            .map(|b| ConfigurationVector::new(vec![heading_angle(b.heading)]).expect("finite"))
            .collect()
    }

    /// The flock's headings one tick earlier.
    fn environment_observation(&self) -> Result<Vec<f64>> {
        if self.tick == 0 {
            return Err(lag_warm_up(self.tick));
        }
        Ok(self.previous_headings.iter().map(|&h| heading_angle(h)).collect())
    }

    fn system_observation(&self) -> Result<Vec<f64>> {
        if self.tick == 0 {
            return Err(lag_warm_up(self.tick));
        }
        Ok(self.birds.iter().map(|b| heading_angle(b.heading)).collect())
    }

    fn environment_binning(&self) -> Binning {
        Binning::Continuous {
            bins: self.params.angle_bins,
            lo: 0.0,
            hi: TAU,
        }
    }

    fn system_binning(&self) -> Binning {
        self.environment_binning()
    }

    fn first_observation_tick(&self) -> u64 {
        1
    }

    fn disturbances(&self) -> Vec<Disturbance> {
        self.params
            .shot_tick
            .map(|tick| Disturbance { tick, label: "shot" })
            .into_iter()
            .collect()
    }
}
