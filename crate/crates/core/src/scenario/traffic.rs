//! Rush-hour traffic over two Manhattan-grid islands joined by bridges.
//!
//! Every intersection is an agent. It runs a fixed-budget signal cycle over its
//! incoming lanes (one lane green at a time) and periodically re-splits the
//! cycle in proportion to the mean queue length each lane saw. Its configuration
//! vector holds the red duration of the lanes arriving from north, east, south
//! and west; directions without a lane are permanently red.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Disturbance, Scenario};
use crate::adaptation::UsageBounds;
use crate::error::Result;
use crate::series::ConfigurationVector;
use crate::transfer::Binning;

pub const DIRECTIONS: usize = 4;

/// Compass direction an incoming lane arrives from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    North = 0,
    East = 1,
    South = 2,
    West = 3,
}

impl Direction {
    fn opposite(self) -> Direction {
        match self {
            Direction::North => Direction::South,
            Direction::East => Direction::West,
            Direction::South => Direction::North,
            Direction::West => Direction::East,
        }
    }
}

/// Street network: intersections joined by pairs of opposing one-car-wide lanes.
#[derive(Debug, Clone)]
pub struct Network {
    nodes: usize,
    /// `incoming[v][d]`: lane arriving at `v` from direction `d`.
    incoming: Vec<[Option<usize>; DIRECTIONS]>,
    /// `(from, to)` of every lane.
    lanes: Vec<(usize, usize)>,
    /// `next_hop[from][to]`, `usize::MAX` on the diagonal.
    next_hop: Vec<Vec<usize>>,
    distance: Vec<Vec<u32>>,
}

impl Network {
    /// Builds a network from undirected streets `(a, b, dir)` where `b` lies in
    /// direction `dir` of `a`.
    pub fn from_streets(nodes: usize, streets: &[(usize, usize, Direction)]) -> Self {
        let mut incoming = vec![[None; DIRECTIONS]; nodes];
        let mut lanes = Vec::new();
        for &(a, b, dir) in streets {
            // lane a -> b arrives at b from the opposite side
            assert!(
                incoming[b][dir.opposite() as usize].is_none(),
                "duplicate lane into {b}"
            );
            incoming[b][dir.opposite() as usize] = Some(lanes.len());
            lanes.push((a, b));
            assert!(incoming[a][dir as usize].is_none(), "duplicate lane into {a}");
            incoming[a][dir as usize] = Some(lanes.len());
            lanes.push((b, a));
        }
        let mut adjacency = vec![Vec::new(); nodes];
        for &(a, b) in &lanes {
            adjacency[a].push(b);
        }
        for adj in adjacency.iter_mut() {
            adj.sort_unstable();
        }
        let distance: Vec<Vec<u32>> = (0..nodes).map(|to| bfs(&adjacency, to)).collect();
        // distance[to][from]; next hop is the lowest-id neighbour one step closer
        let next_hop = (0..nodes)
            .map(|from| {
                (0..nodes)
                    .map(|to| {
                        if from == to || distance[to][from] == u32::MAX {
                            return usize::MAX;
                        }
                        *adjacency[from]
                            .iter()
                            .find(|&&n| distance[to][n] + 1 == distance[to][from])
                            .expect("connected")
                    })
                    .collect()
            })
            .collect();
        let distance = (0..nodes)
            .map(|from| (0..nodes).map(|to| distance[to][from]).collect())
            .collect();
        Self {
            nodes,
            incoming,
            lanes,
            next_hop,
            distance,
        }
    }

    /// Two `rows x cols` grids; island A's east column is bridged to island B's
    /// west column row by row for the first `bridges` rows.
    pub fn two_islands(rows: usize, cols: usize, bridges: usize) -> Self {
        let per = rows * cols;
        let id = |island: usize, r: usize, c: usize| island * per + r * cols + c;
        let mut streets = Vec::new();
        for island in 0..2 {
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        streets.push((id(island, r, c), id(island, r, c + 1), Direction::East));
                    }
                    if r + 1 < rows {
                        streets.push((id(island, r, c), id(island, r + 1, c), Direction::South));
                    }
                }
            }
        }
        for r in 0..bridges.min(rows) {
            streets.push((id(0, r, cols - 1), id(1, r, 0), Direction::East));
        }
        Self::from_streets(2 * per, &streets)
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn lane_count(&self) -> usize {
        self.lanes.len()
    }

    pub fn lane(&self, from: usize, to: usize) -> Option<usize> {
        self.lanes.iter().position(|&l| l == (from, to))
    }

    pub fn incoming(&self, node: usize) -> &[Option<usize>; DIRECTIONS] {
        &self.incoming[node]
    }

    pub fn next_hop(&self, from: usize, to: usize) -> usize {
        self.next_hop[from][to]
    }

    /// Hop count between two intersections.
    pub fn distance(&self, from: usize, to: usize) -> u32 {
        self.distance[from][to]
    }
}

fn bfs(adjacency: &[Vec<usize>], source: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adjacency.len()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &n in &adjacency[v] {
            if dist[n] == u32::MAX {
                dist[n] = dist[v] + 1;
                queue.push_back(n);
            }
        }
    }
    dist
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficParams {
    pub rows: usize,
    pub cols: usize,
    pub bridges: usize,
    pub background_cars: usize,
    pub rush_cars: usize,
    /// Island A column holding the homesteads (one per row, first three rows).
    pub homestead_column: usize,
    /// Island B column holding the workplaces.
    pub workplace_column: usize,
    /// Commuters leave the homesteads for the workplaces at this tick.
    pub rush_out_tick: Option<u64>,
    /// ...and travel back at this one.
    pub rush_back_tick: Option<u64>,
    /// Green ticks shared by an intersection's lanes per cycle.
    pub cycle_budget: u32,
    pub adaptation_period: u64,
    /// Each controller adapts at its own seeded offset within the period
    /// instead of all on the same tick.
    pub staggered: bool,
    pub min_green: u32,
    /// Ticks a car needs to drive along a lane before it joins the queue at its end.
    /// Crossing takes at least one tick per lane, so 0 and 1 behave the same.
    pub travel_time: u64,
    /// Largest queue length with its own histogram bin; longer queues share the top bin.
    pub max_queue_bin: i64,
    /// Every lane is green every tick (signals disabled).
    pub all_green: bool,
}

impl Default for TrafficParams {
    fn default() -> Self {
        Self {
            rows: 3,
            cols: 5,
            bridges: 3,
            background_cars: 250,
            homestead_column: 3,
            workplace_column: 1,
            rush_cars: 500,
            rush_out_tick: Some(250),
            rush_back_tick: Some(750),
            cycle_budget: 20,
            adaptation_period: 10,
            staggered: true,
            min_green: 1,
            travel_time: 0,
            max_queue_bin: 40,
            all_green: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Car {
    destination: usize,
    commuter: bool,
    last_moved: u64,
    /// Tick at which the car reaches the stop line of its current lane.
    arrives: u64,
}

#[derive(Debug, Clone)]
struct Controller {
    /// Green ticks per direction; zero where there is no lane.
    green: [u32; DIRECTIONS],
    queue_sums: [u64; DIRECTIONS],
    /// Adapts on ticks congruent to this modulo the adaptation period.
    phase: u64,
}

#[derive(Debug, Clone)]
pub struct TrafficWorld {
    params: TrafficParams,
    network: Network,
    tick: u64,
    rng: ChaCha8Rng,
    queues: Vec<VecDeque<Car>>,
    controllers: Vec<Controller>,
    homesteads: Vec<usize>,
    workplaces: Vec<usize>,
    background: usize,
    commuters: usize,
}

/// Splits `budget` green ticks over the present lanes: `min_green` each, the rest
/// in proportion to `load` by largest remainder (ties to the lower direction).
/// Without any load the split is even.
pub fn split_cycle(
    budget: u32,
    min_green: u32,
    present: [bool; DIRECTIONS],
    load: [f64; DIRECTIONS],
) -> [u32; DIRECTIONS] {
    let lanes: Vec<usize> = (0..DIRECTIONS).filter(|&d| present[d]).collect();
    let mut green = [0u32; DIRECTIONS];
    if lanes.is_empty() {
        return green;
    }
    let spare = budget.saturating_sub(min_green * lanes.len() as u32);
    let total_load: f64 = lanes.iter().map(|&d| load[d]).sum();
    let weights: Vec<f64> = if total_load > 0.0 {
        lanes.iter().map(|&d| load[d] / total_load).collect()
    } else {
        vec![1.0 / lanes.len() as f64; lanes.len()]
    };
    let exact: Vec<f64> = weights.iter().map(|w| w * spare as f64).collect();
    let mut given = 0;
    for (&d, &x) in lanes.iter().zip(&exact) {
        let whole = x.floor() as u32;
        green[d] = min_green + whole;
        given += whole;
    }
    let mut order: Vec<usize> = (0..lanes.len()).collect();
    // stable sort keeps lower directions first among equal remainders
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.partial_cmp(&ra).expect("finite")
    });
    for &i in order.iter().take((spare - given) as usize) {
        green[lanes[i]] += 1;
    }
    green
}

impl TrafficWorld {
    pub fn new(params: TrafficParams, seed: u64) -> Self {
        let network = Network::two_islands(params.rows, params.cols, params.bridges);
        let per = params.rows * params.cols;
        let homesteads = (0..params.rows.min(3))
            .map(|r| r * params.cols + params.homestead_column)
            .collect();
        let workplaces = (0..params.rows.min(3))
            .map(|r| per + r * params.cols + params.workplace_column)
            .collect();
        let mut world = Self::with_network(params, network, homesteads, workplaces, seed);
        for _ in 0..world.params.background_cars {
            let origin = world.rng.gen_range(0..world.network.node_count());
            let destination = world.random_destination(origin);
            world.spawn_car(origin, destination, false);
        }
        world
    }

    /// An empty world (no background cars) on an arbitrary network.
    pub fn with_network(
        params: TrafficParams,
        network: Network,
        homesteads: Vec<usize>,
        workplaces: Vec<usize>,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let controllers = (0..network.node_count())
            .map(|v| {
                let present = network.incoming(v).map(|l| l.is_some());
                Controller {
                    green: split_cycle(params.cycle_budget, params.min_green, present, [0.0; DIRECTIONS]),
                    queue_sums: [0; DIRECTIONS],
                    phase: if params.staggered {
                        rng.gen_range(0..params.adaptation_period)
                    } else {
                        0
                    },
                }
            })
            .collect();
        Self {
            queues: vec![VecDeque::new(); network.lane_count()],
            controllers,
            network,
            params,
            tick: 0,
            rng,
            homesteads,
            workplaces,
            background: 0,
            commuters: 0,
        }
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn params(&self) -> &TrafficParams {
        &self.params
    }

    pub fn car_count(&self) -> usize {
        self.background + self.commuters
    }

    pub fn background_cars(&self) -> usize {
        self.background
    }

    pub fn commuters(&self) -> usize {
        self.commuters
    }

    /// Cars on `lane`, driving or queued.
    pub fn lane_occupancy(&self, lane: usize) -> usize {
        self.queues[lane].len()
    }

    /// Cars waiting at the stop line of `lane`.
    pub fn queue_length(&self, lane: usize) -> usize {
        // cars join a lane in arrival order, so the waiting ones form a prefix
        self.queues[lane].partition_point(|c| c.arrives <= self.tick)
    }

    pub fn green_split(&self, node: usize) -> [u32; DIRECTIONS] {
        self.controllers[node].green
    }

    /// Red ticks per direction for one intersection.
    pub fn red_times(&self, node: usize) -> [u32; DIRECTIONS] {
        let budget = self.params.cycle_budget;
        let present = self.network.incoming(node).map(|l| l.is_some());
        let green = self.controllers[node].green;
        std::array::from_fn(|d| if present[d] { budget - green[d] } else { budget })
    }

    fn random_destination(&mut self, origin: usize) -> usize {
        let n = self.network.node_count();
        let pick = self.rng.gen_range(0..n - 1);
        if pick >= origin {
            pick + 1
        } else {
            pick
        }
    }

    /// Places a car at `origin` heading for `destination`: it joins the lane
    /// toward the next intersection on its route.
    pub fn spawn_car(&mut self, origin: usize, destination: usize, commuter: bool) {
        assert_ne!(origin, destination, "car spawned at its destination");
        if commuter {
            self.commuters += 1;
        } else {
            self.background += 1;
        }
        let car = Car {
            destination,
            commuter,
            last_moved: self.tick,
            arrives: 0,
        };
        self.enqueue(origin, car);
    }

    fn enqueue(&mut self, at: usize, mut car: Car) {
        car.arrives = self.tick + self.params.travel_time;
        let next = self.network.next_hop(at, car.destination);
        let lane = self.network.incoming(next)[self.direction_into(next, at)].expect("adjacent");
        self.queues[lane].push_back(car);
    }

    fn direction_into(&self, node: usize, from: usize) -> usize {
        self.network
            .incoming(node)
            .iter()
            .position(|l| l.is_some_and(|l| self.network.lanes[l].0 == from))
            .expect("lane between adjacent nodes")
    }

    fn spawn_rush(&mut self, from_homes: bool) {
        let (origins, targets) = if from_homes {
            (self.homesteads.clone(), self.workplaces.clone())
        } else {
            (self.workplaces.clone(), self.homesteads.clone())
        };
        for _ in 0..self.params.rush_cars {
            let origin = origins[self.rng.gen_range(0..origins.len())];
            let destination = targets[self.rng.gen_range(0..targets.len())];
            self.spawn_car(origin, destination, true);
        }
    }

    /// Direction whose lane is green at `tick`.
    fn green_direction(&self, node: usize, tick: u64) -> Option<usize> {
        let green = &self.controllers[node].green;
        let cycle: u32 = green.iter().sum();
        if cycle == 0 {
            return None;
        }
        let mut pos = (tick % cycle as u64) as u32;
        for (d, &g) in green.iter().enumerate() {
            if pos < g {
                return Some(d);
            }
            pos -= g;
        }
        None
    }

    fn cross(&mut self, node: usize, lane: usize, tick: u64) {
        let Some(head) = self.queues[lane].front() else {
            return;
        };
        if head.last_moved == tick || head.arrives > tick {
            return;
        }
        let mut car = self.queues[lane].pop_front().expect("non-empty");
        car.last_moved = tick;
        if car.destination == node {
            if car.commuter {
                self.commuters -= 1;
                return;
            }
            car.destination = self.random_destination(node);
        }
        self.enqueue(node, car);
    }

    fn adapt(&mut self, tick: u64) {
        let period = self.params.adaptation_period;
        for v in 0..self.network.node_count() {
            if tick % period != self.controllers[v].phase {
                continue;
            }
            let period = period as f64;
            let present = self.network.incoming(v).map(|l| l.is_some());
            let ctrl = &mut self.controllers[v];
            let load = ctrl.queue_sums.map(|s| s as f64 / period);
            ctrl.green = split_cycle(self.params.cycle_budget, self.params.min_green, present, load);
            ctrl.queue_sums = [0; DIRECTIONS];
        }
    }

    fn incoming_lanes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.network.node_count()).flat_map(move |v| self.network.incoming(v).iter().flatten().copied())
    }
}

/// One tick: scheduled spawns, signal crossings (one car per green lane),
/// queue accounting and, every adaptation period, new cycle splits.
pub fn traffic_step(world: &mut TrafficWorld) {
    let tick = world.tick + 1;
    world.tick = tick;
    if world.params.rush_out_tick == Some(tick) {
        world.spawn_rush(true);
    }
    if world.params.rush_back_tick == Some(tick) {
        world.spawn_rush(false);
    }
    for v in 0..world.network.node_count() {
        if world.params.all_green {
            for lane in world.network.incoming(v).iter().flatten().copied().collect::<Vec<_>>() {
                world.cross(v, lane, tick);
            }
        } else if let Some(d) = world.green_direction(v, tick) {
            let lane = world.network.incoming(v)[d].expect("green lane exists");
            world.cross(v, lane, tick);
        }
    }
    for v in 0..world.network.node_count() {
        for d in 0..DIRECTIONS {
            if let Some(lane) = world.network.incoming(v)[d] {
                world.controllers[v].queue_sums[d] += world.queue_length(lane) as u64;
            }
        }
    }
    world.adapt(tick);
}

impl Scenario for TrafficWorld {
    fn name(&self) -> &'static str {
        "traffic"
    }

    fn tick(&self) -> u64 {
        self.tick
    }

    fn agent_count(&self) -> usize {
        self.network.node_count()
    }

    fn dimension(&self) -> usize {
        DIRECTIONS
    }

    fn usage_bounds(&self) -> UsageBounds {
        UsageBounds::uniform(DIRECTIONS, 0.0, self.params.cycle_budget as f64).expect("positive budget")
    }

    fn step(&mut self) {
        traffic_step(self);
    }

    fn configurations(&self) -> Vec<ConfigurationVector> {
        (0..self.network.node_count())
            .map(|v| ConfigurationVector::new(self.red_times(v).map(f64::from).to_vec()).expect("finite"))
            .collect()
    }

    /// Queue length of every incoming lane.
    fn environment_observation(&self) -> Result<Vec<f64>> {
        Ok(self.incoming_lanes().map(|l| self.queue_length(l) as f64).collect())
    }

    /// Red duration of every incoming lane.
    fn system_observation(&self) -> Result<Vec<f64>> {
        Ok((0..self.network.node_count())
            .flat_map(|v| {
                let red = self.red_times(v);
                let present = self.network.incoming(v).map(|l| l.is_some());
                (0..DIRECTIONS).filter(move |&d| present[d]).map(move |d| red[d] as f64)
            })
            .collect())
    }

    fn environment_binning(&self) -> Binning {
        Binning::Discrete {
            lo: 0,
            hi: self.params.max_queue_bin,
        }
    }

    fn system_binning(&self) -> Binning {
        Binning::Discrete {
            lo: 0,
            hi: self.params.cycle_budget as i64,
        }
    }

    fn disturbances(&self) -> Vec<Disturbance> {
        let mut out = Vec::new();
        if let Some(tick) = self.params.rush_out_tick {
            out.push(Disturbance {
                tick,
                label: "morning rush",
            });
        }
        if let Some(tick) = self.params.rush_back_tick {
            out.push(Disturbance {
                tick,
                label: "evening rush",
            });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adaptation::configuration_coherence;
    use crate::transfer::{complexity, emergence};

    #[test]
    fn network_shape() {
        let n = Network::two_islands(3, 5, 3);
        assert_eq!(n.node_count(), 30);
        // 22 streets per island plus 3 bridges, two lanes each
        assert_eq!(n.lane_count(), 2 * (2 * 22 + 3));
        // corner of island A has only south and east lanes
        assert_eq!(n.incoming(0).map(|l| l.is_some()), [false, true, true, false]);
        // bridge head on island A: north, east (bridge), south, west
        assert_eq!(n.incoming(9).map(|l| l.is_some()), [true, true, true, true]);
        for a in 0..30 {
            for b in 0..30 {
                assert_ne!(n.distance(a, b), u32::MAX);
            }
        }
    }

    #[test]
    fn next_hop_prefers_lowest_id() {
        let n = Network::two_islands(3, 5, 3);
        // from node 6 to node 0 both 5 and 1 are one hop closer
        assert_eq!(n.next_hop(6, 0), 1);
    }

    #[test]
    fn even_split_without_load() {
        let g = split_cycle(20, 1, [false, true, true, true], [0.0; 4]);
        assert_eq!(g, [0, 7, 7, 6]);
        let g = split_cycle(20, 1, [true; 4], [0.0; 4]);
        assert_eq!(g, [5, 5, 5, 5]);
    }

    #[test]
    fn proportional_split_conserves_budget() {
        let g = split_cycle(20, 1, [true; 4], [9.0, 0.0, 3.0, 1.0]);
        assert_eq!(g.iter().sum::<u32>(), 20);
        assert!(g.iter().all(|&x| x >= 1));
        assert!(g[0] > g[2] && g[2] > g[3]);
        assert_eq!(g, [12, 1, 5, 2]);
    }

    #[test]
    fn empty_network_converges_to_even_split() {
        let params = TrafficParams {
            background_cars: 0,
            rush_out_tick: None,
            rush_back_tick: None,
            ..TrafficParams::default()
        };
        let mut w = TrafficWorld::new(params, 1);
        let start = w.configurations();
        for _ in 0..50 {
            w.step();
            assert_eq!(w.configurations(), start);
        }
        for v in 0..w.agent_count() {
            assert_eq!(w.green_split(v).iter().sum::<u32>(), 20);
        }
        let env = w.environment_observation().unwrap();
        assert!(env.iter().all(|&q| q == 0.0));
        let e = emergence(&w.environment_binning().histogram(&env).unwrap()).unwrap();
        assert_eq!(complexity(e).unwrap(), 0.0);
        // interior intersections share a four-way layout and so the same split
        let interior: Vec<_> = [6usize, 7, 8, 21, 22, 23]
            .iter()
            .map(|&v| w.configurations()[v].clone())
            .collect();
        assert_eq!(configuration_coherence(&interior).unwrap(), 1.0);
    }

    #[test]
    fn single_car_arrives_after_path_length_ticks() {
        let net = Network::two_islands(3, 5, 3);
        for (origin, destination) in [(0, 29), (7, 3), (14, 15), (22, 2)] {
            let hops = net.distance(origin, destination) as u64;
            let params = TrafficParams {
                background_cars: 0,
                rush_out_tick: None,
                rush_back_tick: None,
                all_green: true,
                ..TrafficParams::default()
            };
            let mut w = TrafficWorld::with_network(params, net.clone(), vec![], vec![], 0);
            w.spawn_car(origin, destination, true);
            let mut ticks = 0;
            while w.commuters() > 0 {
                w.step();
                ticks += 1;
                assert!(ticks <= 100);
            }
            assert_eq!(ticks, hops, "{origin} -> {destination}");
        }
    }

    #[test]
    fn two_node_line() {
        let net = Network::from_streets(2, &[(0, 1, Direction::East)]);
        let params = TrafficParams {
            all_green: true,
            ..TrafficParams::default()
        };
        let mut w = TrafficWorld::with_network(params, net, vec![], vec![], 0);
        w.spawn_car(0, 1, true);
        w.step();
        assert_eq!(w.car_count(), 0);
    }

    #[test]
    fn rush_hour_population() {
        let mut w = TrafficWorld::new(TrafficParams::default(), 3);
        assert_eq!(w.car_count(), 250);
        for _ in 0..249 {
            w.step();
        }
        assert_eq!(w.commuters(), 0);
        w.step();
        assert_eq!(w.tick(), 250);
        assert_eq!(w.commuters(), 500);
        let mut last = w.commuters();
        for _ in 250..740 {
            w.step();
            assert_eq!(w.background_cars(), 250);
            assert!(w.commuters() <= last);
            last = w.commuters();
            let queued: usize = (0..w.network().lane_count()).map(|l| w.lane_occupancy(l)).sum();
            assert_eq!(queued, w.car_count());
        }
    }

    #[test]
    fn cycle_budget_is_conserved_and_red_times_bounded() {
        let mut w = TrafficWorld::new(TrafficParams::default(), 5);
        for _ in 0..400 {
            w.step();
            for v in 0..w.agent_count() {
                assert_eq!(w.green_split(v).iter().sum::<u32>(), 20);
            }
            for c in w.configurations() {
                assert!(c.values().iter().all(|&r| (0.0..=20.0).contains(&r)));
            }
        }
    }

    #[test]
    fn mixed_queue_complexity() {
        // queues {0, 0, 1, 3} over bins 0..=3: p = (1/2, 1/4, 0, 1/4)
        let h = Binning::Discrete { lo: 0, hi: 3 }
            .histogram(&[0.0, 0.0, 1.0, 3.0])
            .unwrap();
        let e = emergence(&h).unwrap();
        // H = 1.5 bits, normalised by log2(4) = 2
        assert!((e - 0.75).abs() < 1e-12);
        assert!((complexity(e).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn equal_queues_have_zero_complexity() {
        let h = Binning::Discrete { lo: 0, hi: 40 }.histogram(&[4.0; 10]).unwrap();
        assert_eq!(complexity(emergence(&h).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn seeded_runs_are_identical() {
        let mut a = TrafficWorld::new(TrafficParams::default(), 8);
        let mut b = TrafficWorld::new(TrafficParams::default(), 8);
        for _ in 0..300 {
            a.step();
            b.step();
            assert_eq!(a.configurations(), b.configurations());
        }
    }

    #[test]
    fn travel_time_delays_every_hop() {
        let net = Network::two_islands(3, 5, 3);
        let hops = net.distance(0, 29) as u64;
        for travel_time in [0, 1, 2, 4] {
            let params = TrafficParams {
                background_cars: 0,
                rush_out_tick: None,
                rush_back_tick: None,
                all_green: true,
                travel_time,
                ..TrafficParams::default()
            };
            let mut w = TrafficWorld::with_network(params, net.clone(), vec![], vec![], 0);
            w.spawn_car(0, 29, true);
            let mut ticks = 0;
            while w.commuters() > 0 {
                w.step();
                ticks += 1;
                assert!(ticks <= 500);
            }
            assert_eq!(ticks, hops * travel_time.max(1), "travel_time {travel_time}");
        }
    }

    #[test]
    fn driving_cars_are_not_queued() {
        let net = Network::from_streets(2, &[(0, 1, Direction::East)]);
        let params = TrafficParams {
            all_green: true,
            travel_time: 5,
            ..TrafficParams::default()
        };
        let mut w = TrafficWorld::with_network(params, net, vec![], vec![], 0);
        w.spawn_car(0, 1, false);
        let lane = w.network().lane(0, 1).unwrap();
        assert_eq!((w.queue_length(lane), w.lane_occupancy(lane)), (0, 1));
        for _ in 0..4 {
            w.step();
            assert_eq!((w.queue_length(lane), w.lane_occupancy(lane)), (0, 1));
        }
        w.step();
        assert_eq!(w.lane_occupancy(lane), 0);
    }

    #[test]
    fn staggered_controllers_get_seeded_phases() {
        let period = TrafficParams::default().adaptation_period;
        let w = TrafficWorld::new(TrafficParams::default(), 4);
        let phases: Vec<u64> = w.controllers.iter().map(|c| c.phase).collect();
        assert!(phases.iter().all(|&p| p < period));
        assert!(phases.iter().any(|&p| p != phases[0]));
        assert_eq!(
            phases,
            TrafficWorld::new(TrafficParams::default(), 4)
                .controllers
                .iter()
                .map(|c| c.phase)
                .collect::<Vec<_>>()
        );

        let lockstep = TrafficParams {
            staggered: false,
            ..TrafficParams::default()
        };
        assert!(TrafficWorld::new(lockstep, 4).controllers.iter().all(|c| c.phase == 0));
    }
}
