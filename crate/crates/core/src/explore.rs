//! Edge-map exploration by single-pixel agents.
//!
//! A mother ant is seeded on an unvisited edge pixel and walks until it
//! closes a loop, runs off the end of a curve, or stands on a junction.
//! Junctions spawn one child ant per outgoing arm; each child walks its
//! branch one pixel per step until it reaches another junction, dead-ends,
//! or meets the ant coming the other way, at which point the two partial
//! traces are joined back to back into one branch. Every edge pixel is
//! visited exactly once: an ant only ever moves onto unvisited pixels, and
//! meeting/junction handling covers the frontiers where walks collide.
//!
//! Differences from the idealized single-pixel-junction picture, forced by
//! rasterized curves:
//!
//! * Junction pixels arrive in clumps. A pixel that qualifies as a node and
//!   is 8-adjacent to an existing node cluster joins that cluster instead of
//!   founding a new one.
//! * The mother ant usually spawns mid-branch. When her walk terminates at a
//!   junction or dead end, a continuation ant inherits her reversed trace
//!   and keeps walking across the spawn pixel, so the branch spanning the
//!   spawn point is recorded whole.
//! * An ant whose only continuation is occupied by an ant that still has
//!   other options simply waits one round; the occupant's own step then
//!   resolves the situation as a junction. Only mutually-cornered ants meet.
//! * The seeding loop re-runs on every remaining unvisited edge pixel, so
//!   disconnected shapes are all explored.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::edgemap::{EdgeMap, PixelCoord};
use crate::graph::{
    cluster_representative, Branch, BranchKind, Endpoint, ExplorationStats, Node, PixelGraph,
};

/// How mother-ant start pixels are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartMode {
    /// First unvisited edge pixel in raster order. The default; fully
    /// deterministic with no seed.
    RasterScan,
    /// Seeded random choice among the remaining unvisited edge pixels.
    Random { seed: u64 },
}

#[derive(Clone, Debug)]
pub struct ExploreOptions {
    pub start: StartMode,
    /// Record one line per step outcome for test forensics.
    pub record_trace: bool,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        Self {
            start: StartMode::RasterScan,
            record_trace: false,
        }
    }
}

/// Result of stepping one ant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Moved,
    ReachedNode(usize),
    MetAnt(usize),
    DeadEnd,
    /// Sole continuation is occupied by an ant that still has other options;
    /// stand still and let that ant's own step resolve the junction.
    Waited,
}

/// Result of a mother-ant run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MotherOutcome {
    /// The walk returned to its start without finding any junction; the full
    /// ordered loop is recorded as a standalone loop.
    ClosedLoop,
    /// A junction was found (created, joined, or attached to); exploration
    /// continues with the spawned ants.
    NodeFound(usize),
    /// Isolated pixel or open curve with no junction contact.
    DeadEnd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AntOrigin {
    Node(usize),
    /// Continuation of a mother ant that dead-ended: the far end of the
    /// branch being walked is an open curve end, not a node.
    OpenEnd,
}

impl AntOrigin {
    fn endpoint(self) -> Endpoint {
        match self {
            AntOrigin::Node(i) => Endpoint::Node(i),
            AntOrigin::OpenEnd => Endpoint::Open,
        }
    }
}

struct AntRec {
    pos: PixelCoord,
    origin: AntOrigin,
    /// Pixels already traversed and left behind; `pos` is not in `path`.
    path: Vec<PixelCoord>,
    active: bool,
}

pub(crate) struct Explorer<'a> {
    map: &'a EdgeMap,
    visited: Vec<bool>,
    occupant: Vec<Option<usize>>,
    node_grid: Vec<Option<usize>>,
    ants: Vec<AntRec>,
    clusters: Vec<Vec<PixelCoord>>,
    branches: Vec<Branch>,
    self_loops: std::collections::BTreeMap<usize, usize>,
    standalone_loops: Vec<Vec<PixelCoord>>,
    visit_events: usize,
    rounds: usize,
    trace: Option<Vec<String>>,
}

impl<'a> Explorer<'a> {
    pub(crate) fn new(map: &'a EdgeMap, record_trace: bool) -> Self {
        let cells = map.width() as usize * map.height() as usize;
        Self {
            map,
            visited: vec![false; cells],
            occupant: vec![None; cells],
            node_grid: vec![None; cells],
            ants: Vec::new(),
            clusters: Vec::new(),
            branches: Vec::new(),
            self_loops: std::collections::BTreeMap::new(),
            standalone_loops: Vec::new(),
            visit_events: 0,
            rounds: 0,
            trace: if record_trace { Some(Vec::new()) } else { None },
        }
    }

    fn log(&mut self, line: impl FnOnce() -> String) {
        if let Some(t) = self.trace.as_mut() {
            t.push(line());
        }
    }

    fn is_visited(&self, p: PixelCoord) -> bool {
        self.visited[self.map.index(p)]
    }

    fn mark_visited(&mut self, p: PixelCoord) {
        let i = self.map.index(p);
        debug_assert!(!self.visited[i], "pixel visited twice: {p:?}");
        self.visited[i] = true;
        self.visit_events += 1;
    }

    fn occupant_at(&self, p: PixelCoord) -> Option<usize> {
        self.occupant[self.map.index(p)]
    }

    /// Directions available from `p`: unvisited edge neighbors plus pixels
    /// held by active ants (a held pixel signals a possible meet). Visited
    /// pixels are otherwise excluded, which subsumes "don't go back where
    /// you came from".
    pub(crate) fn available(&self, p: PixelCoord) -> Vec<PixelCoord> {
        self.map
            .neighbors8(p)
            .filter(|&q| !self.is_visited(q) || self.occupant_at(q).is_some())
            .collect()
    }

    /// Lowest-indexed node cluster with a pixel 8-adjacent to `p`.
    fn cluster_adjacent_to(&self, p: PixelCoord) -> Option<usize> {
        self.map
            .neighbors8(p)
            .filter_map(|q| self.node_grid[self.map.index(q)])
            .min()
    }

    /// Register `p` as a junction pixel: join the adjacent cluster if one
    /// exists, otherwise found a new one.
    fn join_or_create_cluster(&mut self, p: PixelCoord) -> usize {
        let q = match self.cluster_adjacent_to(p) {
            Some(q) => q,
            None => {
                self.clusters.push(Vec::new());
                self.clusters.len() - 1
            }
        };
        self.clusters[q].push(p);
        self.node_grid[self.map.index(p)] = Some(q);
        q
    }

    fn spawn_ant(&mut self, pos: PixelCoord, origin: AntOrigin, path: Vec<PixelCoord>) -> usize {
        let id = self.ants.len();
        self.occupant[self.map.index(pos)] = Some(id);
        self.ants.push(AntRec {
            pos,
            origin,
            path,
            active: true,
        });
        id
    }

    fn deactivate(&mut self, id: usize) {
        let pos = self.ants[id].pos;
        self.occupant[self.map.index(pos)] = None;
        self.ants[id].active = false;
    }

    /// Record a completed branch. Empty traces are kept only when they
    /// bridge two distinct nodes (adjacent junction clusters).
    fn commit_branch(&mut self, from: Endpoint, to: Endpoint, trace: Vec<PixelCoord>) {
        let kind = match (from, to) {
            (Endpoint::Node(p), Endpoint::Node(q)) if p == q => BranchKind::SelfLoop,
            (Endpoint::Node(_), Endpoint::Node(_)) => BranchKind::Normal,
            _ => BranchKind::Open,
        };
        if trace.is_empty() && kind != BranchKind::Normal {
            return;
        }
        let index = self.branches.len();
        if kind == BranchKind::SelfLoop {
            if let Endpoint::Node(p) = from {
                self.self_loops.insert(index, p);
            }
        }
        self.branches.push(Branch {
            index,
            trace,
            endpoints: (from, to),
            kind,
        });
    }

    /// The stepped ant stands on a junction pixel: absorb the pixel into a
    /// cluster, commit the ant's trace as a branch ending there, and place
    /// one child on every unvisited outgoing arm.
    fn handle_node(&mut self, id: usize, avail: &[PixelCoord]) -> usize {
        let pos = self.ants[id].pos;
        let q = self.join_or_create_cluster(pos);
        let path = std::mem::take(&mut self.ants[id].path);
        let origin = self.ants[id].origin;
        self.commit_branch(origin.endpoint(), Endpoint::Node(q), path);
        self.deactivate(id);
        for &n in avail {
            if !self.is_visited(n) {
                self.mark_visited(n);
                self.spawn_ant(n, AntOrigin::Node(q), Vec::new());
            }
        }
        q
    }

    /// Two mutually-cornered ants: join their traces back to back into one
    /// branch running from `a`'s origin to `b`'s origin.
    fn handle_meet(&mut self, a: usize, b: usize) {
        debug_assert!(self.ants[a].pos.is_adjacent8(self.ants[b].pos));
        let mut trace = std::mem::take(&mut self.ants[a].path);
        trace.push(self.ants[a].pos);
        trace.push(self.ants[b].pos);
        let b_path = std::mem::take(&mut self.ants[b].path);
        trace.extend(b_path.into_iter().rev());
        let (from, to) = (self.ants[a].origin, self.ants[b].origin);
        self.commit_branch(from.endpoint(), to.endpoint(), trace);
        self.deactivate(a);
        self.deactivate(b);
    }

    /// Terminal step with no available direction: the branch ends here,
    /// either against an adjacent node cluster or as an open curve end.
    fn finish_terminal(&mut self, id: usize) -> StepOutcome {
        let pos = self.ants[id].pos;
        let origin = self.ants[id].origin;
        let far = match self.cluster_adjacent_to(pos) {
            // A fresh spawn that immediately dead-ends against its own
            // origin cluster is a one-pixel stub, not a self-loop.
            Some(q) if self.ants[id].path.is_empty() && origin == AntOrigin::Node(q) => {
                Endpoint::Open
            }
            Some(q) => Endpoint::Node(q),
            None => Endpoint::Open,
        };
        let mut trace = std::mem::take(&mut self.ants[id].path);
        trace.push(pos);
        self.commit_branch(origin.endpoint(), far, trace);
        self.deactivate(id);
        match far {
            Endpoint::Node(q) => StepOutcome::ReachedNode(q),
            Endpoint::Open => StepOutcome::DeadEnd,
        }
    }

    pub(crate) fn step_ant(&mut self, id: usize) -> StepOutcome {
        debug_assert!(self.ants[id].active, "stepping an inactive ant");
        let pos = self.ants[id].pos;
        let avail = self.available(pos);
        let outcome = match avail.len() {
            0 => self.finish_terminal(id),
            1 => {
                let target = avail[0];
                match self.occupant_at(target) {
                    Some(other) => {
                        let other_avail = self.available(self.ants[other].pos);
                        if other_avail == [pos] {
                            self.handle_meet(id, other);
                            StepOutcome::MetAnt(other)
                        } else {
                            StepOutcome::Waited
                        }
                    }
                    None => {
                        self.occupant[self.map.index(pos)] = None;
                        self.ants[id].path.push(pos);
                        self.ants[id].pos = target;
                        self.mark_visited(target);
                        self.occupant[self.map.index(target)] = Some(id);
                        StepOutcome::Moved
                    }
                }
            }
            _ => StepOutcome::ReachedNode(self.handle_node(id, &avail)),
        };
        self.log(|| format!("ant {id} at ({},{}) -> {outcome:?}", pos.x, pos.y));
        outcome
    }

    /// Step every active ant in ascending id order until none remain.
    pub(crate) fn run_rounds(&mut self) {
        loop {
            let ids: Vec<usize> = (0..self.ants.len()).filter(|&i| self.ants[i].active).collect();
            if ids.is_empty() {
                break;
            }
            self.rounds += 1;
            let before = (self.visit_events, self.ants.len(), ids.len());
            for id in ids {
                if self.ants[id].active {
                    self.step_ant(id);
                }
            }
            let active_now = self.ants.iter().filter(|a| a.active).count();
            let after = (self.visit_events, self.ants.len(), active_now);
            assert!(
                before != after,
                "exploration stalled: a full round changed nothing"
            );
        }
    }

    /// Seed and run a mother ant at `start`, which must be unvisited.
    ///
    /// With no junction contact the walk either closes into a standalone
    /// loop or dead-ends. On junction contact the walked prefix is handed to
    /// a continuation ant that resumes across the spawn pixel in the other
    /// direction, so the branch containing `start` is eventually committed
    /// in one piece.
    pub(crate) fn run_mother(&mut self, start: PixelCoord) -> MotherOutcome {
        self.mark_visited(start);
        let avail0 = self.available(start);
        let adjacent = self.cluster_adjacent_to(start);
        self.log(|| {
            format!(
                "mother at ({},{}) arms={} cluster={adjacent:?}",
                start.x,
                start.y,
                avail0.len()
            )
        });

        match (adjacent, avail0.len()) {
            (None, 0) => {
                self.commit_branch(Endpoint::Open, Endpoint::Open, vec![start]);
                return MotherOutcome::DeadEnd;
            }
            (Some(q), 0) => {
                // One-pixel stub against an existing cluster.
                self.commit_branch(Endpoint::Node(q), Endpoint::Open, vec![start]);
                return MotherOutcome::DeadEnd;
            }
            (Some(q), 1) => {
                // Continuation of an arm of an existing cluster; walk it as
                // an ordinary child of that node.
                self.spawn_ant(start, AntOrigin::Node(q), Vec::new());
                return MotherOutcome::NodeFound(q);
            }
            (Some(_), _) => {
                // Junction-adjacent with several arms: the spawn pixel
                // itself is junction material.
                let q = self.join_or_create_cluster(start);
                for &n in &avail0 {
                    if !self.is_visited(n) {
                        self.mark_visited(n);
                        self.spawn_ant(n, AntOrigin::Node(q), Vec::new());
                    }
                }
                return MotherOutcome::NodeFound(q);
            }
            (None, n) if n >= 3 => {
                let q = self.join_or_create_cluster(start);
                for &n in &avail0 {
                    self.mark_visited(n);
                    self.spawn_ant(n, AntOrigin::Node(q), Vec::new());
                }
                return MotherOutcome::NodeFound(q);
            }
            (None, _) => {}
        }

        // One or two arms from a plain curve pixel: walk the first arm.
        let mut path = vec![start];
        let mut pos = avail0[0];
        self.mark_visited(pos);
        loop {
            let avail = self.available(pos);
            match avail.len() {
                0 => {
                    if path.len() + 1 >= 3 && pos.is_adjacent8(start) {
                        path.push(pos);
                        self.standalone_loops.push(path);
                        self.log(|| "mother closed a loop".to_string());
                        return MotherOutcome::ClosedLoop;
                    }
                    // Hand the walk to a continuation ant working back
                    // across the spawn pixel along the second arm (if any).
                    let mut inherited: Vec<PixelCoord> = path[1..].to_vec();
                    inherited.push(pos);
                    inherited.reverse();
                    return match self.cluster_adjacent_to(pos) {
                        Some(q) => {
                            self.spawn_ant(start, AntOrigin::Node(q), inherited);
                            MotherOutcome::NodeFound(q)
                        }
                        None => {
                            self.spawn_ant(start, AntOrigin::OpenEnd, inherited);
                            MotherOutcome::DeadEnd
                        }
                    };
                }
                1 => {
                    path.push(pos);
                    pos = avail[0];
                    self.mark_visited(pos);
                }
                _ => {
                    // Junction found; pos becomes cluster material and the
                    // walked prefix transfers to the continuation ant.
                    let q = self.join_or_create_cluster(pos);
                    for &n in &avail {
                        if !self.is_visited(n) {
                            self.mark_visited(n);
                            self.spawn_ant(n, AntOrigin::Node(q), Vec::new());
                        }
                    }
                    let mut inherited: Vec<PixelCoord> = path[1..].to_vec();
                    inherited.reverse();
                    self.spawn_ant(start, AntOrigin::Node(q), inherited);
                    return MotherOutcome::NodeFound(q);
                }
            }
        }
    }

    pub(crate) fn finish(self, edge_pixel_count: usize) -> (PixelGraph, Vec<String>) {
        let nodes = self
            .clusters
            .iter()
            .enumerate()
            .map(|(index, pixels)| Node {
                index,
                pixels: pixels.clone(),
                representative: cluster_representative(pixels),
            })
            .collect();
        let graph = PixelGraph {
            nodes,
            branches: self.branches,
            self_loops: self.self_loops,
            standalone_loops: self.standalone_loops,
            stats: ExplorationStats {
                edge_pixel_count,
                visit_events: self.visit_events,
                rounds: self.rounds,
            },
        };
        (graph, self.trace.unwrap_or_default())
    }
}

/// Explore `map` with default options (raster-scan seeding, no trace).
pub fn explore(map: &EdgeMap) -> PixelGraph {
    explore_with(map, &ExploreOptions::default())
}

pub fn explore_with(map: &EdgeMap, opts: &ExploreOptions) -> PixelGraph {
    explore_traced(map, opts).0
}

/// Explore and return the step trace alongside the graph (empty unless
/// `record_trace` is set).
pub fn explore_traced(map: &EdgeMap, opts: &ExploreOptions) -> (PixelGraph, Vec<String>) {
    let edge_pixel_count = map.edge_pixel_count();
    let mut ex = Explorer::new(map, opts.record_trace);

    match opts.start {
        StartMode::RasterScan => {
            // The cursor only moves forward: pixels behind it are visited.
            let mut cursor = 0usize;
            let cells = map.width() as usize * map.height() as usize;
            loop {
                while cursor < cells {
                    let p = PixelCoord::new(
                        (cursor % map.width() as usize) as u32,
                        (cursor / map.width() as usize) as u32,
                    );
                    if map.get(p) && !ex.is_visited(p) {
                        break;
                    }
                    cursor += 1;
                }
                if cursor >= cells {
                    break;
                }
                let p = PixelCoord::new(
                    (cursor % map.width() as usize) as u32,
                    (cursor / map.width() as usize) as u32,
                );
                ex.run_mother(p);
                ex.run_rounds();
            }
        }
        StartMode::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            loop {
                let unvisited: Vec<PixelCoord> =
                    map.edge_pixels().filter(|&p| !ex.is_visited(p)).collect();
                if unvisited.is_empty() {
                    break;
                }
                let p = unvisited[rng.gen_range(0..unvisited.len())];
                ex.run_mother(p);
                ex.run_rounds();
            }
        }
    }

    ex.finish(edge_pixel_count)
}
