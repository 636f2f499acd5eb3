//! Simple-cycle enumeration over the branch multigraph and assembly of each
//! cycle into an ordered pixel loop.
//!
//! The multigraph has one vertex per node and one edge per normal branch;
//! parallel branches between the same node pair are distinct edges (two
//! crossing circles produce exactly that shape: two nodes joined by four
//! arcs). Self-loop branches count as one-branch cycles. Open branches take
//! no part.
//!
//! Enumeration is depth-first with a canonical root: a cycle is emitted only
//! from its smallest branch index, traversed in that branch's stored
//! direction, so every simple cycle is produced exactly once without a
//! dedup pass.

use thiserror::Error;

use crate::edgemap::PixelCoord;
use crate::graph::{BranchKind, Endpoint, PixelGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CycleLimits {
    /// Stop after this many cycles and set the truncation flag.
    pub max_cycles: usize,
    /// Abandon depth-first paths longer than this many branches.
    pub max_cycle_branches: usize,
}

impl Default for CycleLimits {
    fn default() -> Self {
        Self {
            max_cycles: 10_000,
            max_cycle_branches: 32,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Traverse the branch trace as stored (origin to destination).
    Forward,
    Reverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CycleStep {
    pub branch: usize,
    pub dir: Direction,
}

/// A simple cycle: consecutive steps share a node, the last step closes back
/// to the first, and no branch or intermediate node repeats.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub steps: Vec<CycleStep>,
}

impl Cycle {
    pub fn branch_indices(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.branch).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleEnumeration {
    pub cycles: Vec<Cycle>,
    /// True when a limit cut enumeration short.
    pub truncated: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AssembleError {
    #[error("cycle references open branch {0}")]
    OpenBranch(usize),
    #[error("cycle step {0} does not share a node with its predecessor")]
    BrokenChain(usize),
}

struct Edge {
    branch: usize,
    from: usize,
    to: usize,
}

/// Enumerate all simple cycles of the graph, capped by `limits`.
pub fn enumerate_cycles(graph: &PixelGraph, limits: &CycleLimits) -> CycleEnumeration {
    let mut cycles: Vec<Cycle> = Vec::new();
    let mut truncated = false;

    // Self-loops are one-branch cycles.
    for (&branch, _node) in &graph.self_loops {
        if cycles.len() >= limits.max_cycles {
            truncated = true;
            break;
        }
        if limits.max_cycle_branches >= 1 {
            cycles.push(Cycle {
                steps: vec![CycleStep {
                    branch,
                    dir: Direction::Forward,
                }],
            });
        }
    }

    let edges: Vec<Edge> = graph
        .branches
        .iter()
        .filter(|b| b.kind == BranchKind::Normal)
        .map(|b| match b.endpoints {
            (Endpoint::Node(from), Endpoint::Node(to)) => Edge {
                branch: b.index,
                from,
                to,
            },
            _ => unreachable!("normal branch with open endpoint"),
        })
        .collect();

    // adjacency[node] -> (position in `edges`, neighbor, direction)
    let mut adjacency: Vec<Vec<(usize, usize, Direction)>> = vec![Vec::new(); graph.nodes.len()];
    for (i, e) in edges.iter().enumerate() {
        adjacency[e.from].push((i, e.to, Direction::Forward));
        adjacency[e.to].push((i, e.from, Direction::Reverse));
    }
    for list in &mut adjacency {
        list.sort_by_key(|&(i, _, _)| edges[i].branch);
    }

    // Depth-first search rooted at each edge in ascending branch order. A
    // path may only use edges with a strictly larger branch index, so the
    // root is the cycle's minimum and every cycle appears exactly once.
    let mut dfs = Dfs {
        edges: &edges,
        adjacency: &adjacency,
        limits,
        root: 0,
        start: 0,
        used: vec![false; edges.len()],
        on_path: vec![false; graph.nodes.len()],
        steps: Vec::new(),
        cycles,
        truncated,
    };
    for root in 0..edges.len() {
        if dfs.cap_hit() {
            break;
        }
        let (start, first_hop) = (edges[root].from, edges[root].to);
        if start == first_hop {
            continue;
        }
        dfs.root = root;
        dfs.start = start;
        dfs.steps.clear();
        dfs.steps.push(CycleStep {
            branch: edges[root].branch,
            dir: Direction::Forward,
        });
        dfs.used[root] = true;
        dfs.on_path[start] = true;
        dfs.on_path[first_hop] = true;
        dfs.recurse(first_hop);
        dfs.used[root] = false;
        dfs.on_path[start] = false;
        dfs.on_path[first_hop] = false;
    }

    CycleEnumeration {
        cycles: dfs.cycles,
        truncated: dfs.truncated,
    }
}

struct Dfs<'g> {
    edges: &'g [Edge],
    adjacency: &'g [Vec<(usize, usize, Direction)>],
    limits: &'g CycleLimits,
    root: usize,
    start: usize,
    used: Vec<bool>,
    on_path: Vec<bool>,
    steps: Vec<CycleStep>,
    cycles: Vec<Cycle>,
    truncated: bool,
}

impl Dfs<'_> {
    fn cap_hit(&self) -> bool {
        self.cycles.len() >= self.limits.max_cycles
    }

    fn recurse(&mut self, node: usize) {
        for k in 0..self.adjacency[node].len() {
            let (ei, neighbor, dir) = self.adjacency[node][k];
            if self.used[ei] || self.edges[ei].branch <= self.edges[self.root].branch {
                continue;
            }
            if neighbor == self.start {
                let mut cycle_steps = self.steps.clone();
                cycle_steps.push(CycleStep {
                    branch: self.edges[ei].branch,
                    dir,
                });
                self.cycles.push(canonicalize(cycle_steps));
                if self.cap_hit() {
                    self.truncated = true;
                    return;
                }
                continue;
            }
            if self.on_path[neighbor] {
                continue;
            }
            if self.steps.len() + 1 >= self.limits.max_cycle_branches {
                self.truncated = true;
                continue;
            }
            self.steps.push(CycleStep {
                branch: self.edges[ei].branch,
                dir,
            });
            self.used[ei] = true;
            self.on_path[neighbor] = true;
            self.recurse(neighbor);
            self.on_path[neighbor] = false;
            self.used[ei] = false;
            self.steps.pop();
            if self.cap_hit() {
                return;
            }
        }
    }
}

/// Rotate is already canonical (the root is the minimum branch); pick the
/// lexicographically smaller of the two travel directions.
fn canonicalize(steps: Vec<CycleStep>) -> Cycle {
    if steps.len() <= 2 {
        return Cycle { steps };
    }
    let forward: Vec<usize> = steps.iter().map(|s| s.branch).collect();
    let mut reversed_order: Vec<usize> = vec![forward[0]];
    reversed_order.extend(forward[1..].iter().rev());
    if reversed_order < forward {
        let mut rev_steps = vec![flip(steps[0])];
        rev_steps.extend(steps[1..].iter().rev().map(|&s| flip(s)));
        Cycle { steps: rev_steps }
    } else {
        Cycle { steps }
    }
}

fn flip(s: CycleStep) -> CycleStep {
    CycleStep {
        branch: s.branch,
        dir: match s.dir {
            Direction::Forward => Direction::Reverse,
            Direction::Reverse => Direction::Forward,
        },
    }
}

/// Concatenate the cycle's branch traces in travel order into one closed
/// pixel loop, inserting each junction's pixels once between branches.
///
/// The junction contribution is normally just the node's representative
/// pixel. When a cluster spreads over several pixels and the representative
/// is not adjacent to both neighboring trace ends, a shortest chain of
/// cluster pixels bridges the gap instead, keeping the assembled loop
/// 8-connected.
pub fn assemble_loop(graph: &PixelGraph, cycle: &Cycle) -> Result<Vec<PixelCoord>, AssembleError> {
    // Oriented traces and the node entered after each step.
    let mut traces: Vec<Vec<PixelCoord>> = Vec::with_capacity(cycle.steps.len());
    let mut entered_nodes: Vec<usize> = Vec::with_capacity(cycle.steps.len());
    let mut current: Option<usize> = None;
    for (i, step) in cycle.steps.iter().enumerate() {
        let branch = &graph.branches[step.branch];
        if branch.kind == BranchKind::Open {
            return Err(AssembleError::OpenBranch(step.branch));
        }
        let (from, to) = match (branch.endpoints.0, branch.endpoints.1) {
            (Endpoint::Node(a), Endpoint::Node(b)) => match step.dir {
                Direction::Forward => (a, b),
                Direction::Reverse => (b, a),
            },
            _ => return Err(AssembleError::OpenBranch(step.branch)),
        };
        if let Some(cur) = current {
            if cur != from {
                return Err(AssembleError::BrokenChain(i));
            }
        }
        let mut trace = branch.trace.clone();
        if step.dir == Direction::Reverse {
            trace.reverse();
        }
        traces.push(trace);
        entered_nodes.push(to);
        current = Some(to);
    }

    // Junction i sits between trace i and trace i+1 (cyclically) and belongs
    // to entered_nodes[i].
    let k = cycle.steps.len();
    let mut out = Vec::new();
    for i in 0..k {
        out.extend_from_slice(&traces[i]);
        let node = &graph.nodes[entered_nodes[i]];
        let prev_pixel = last_pixel_before(&traces, i);
        let next_pixel = first_pixel_after(&traces, i);
        out.extend(junction_pixels(node, prev_pixel, next_pixel));
    }
    Ok(out)
}

fn last_pixel_before(traces: &[Vec<PixelCoord>], i: usize) -> Option<PixelCoord> {
    let k = traces.len();
    for back in 0..k {
        let idx = (i + k - back) % k;
        if let Some(&p) = traces[idx].last() {
            return Some(p);
        }
    }
    None
}

fn first_pixel_after(traces: &[Vec<PixelCoord>], i: usize) -> Option<PixelCoord> {
    let k = traces.len();
    for fwd in 1..=k {
        let idx = (i + fwd) % k;
        if let Some(&p) = traces[idx].first() {
            return Some(p);
        }
    }
    None
}

fn junction_pixels(
    node: &crate::graph::Node,
    prev: Option<PixelCoord>,
    next: Option<PixelCoord>,
) -> Vec<PixelCoord> {
    let rep = node.representative;
    let ok = |p: PixelCoord, against: Option<PixelCoord>| against.is_none_or(|a| a.is_adjacent8(p));
    if ok(rep, prev) && ok(rep, next) {
        return vec![rep];
    }
    // Shortest chain through the cluster's own adjacency from a pixel
    // touching `prev` to a pixel touching `next`.
    let starts: Vec<usize> = node
        .pixels
        .iter()
        .enumerate()
        .filter(|(_, &p)| ok(p, prev))
        .map(|(i, _)| i)
        .collect();
    let goal = |p: PixelCoord| ok(p, next);
    if starts.is_empty() {
        return vec![rep];
    }
    let n = node.pixels.len();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue: std::collections::VecDeque<usize> = starts.into_iter().collect();
    for &s in &queue {
        seen[s] = true;
    }
    while let Some(i) = queue.pop_front() {
        if goal(node.pixels[i]) {
            let mut chain = vec![node.pixels[i]];
            let mut cur = i;
            while let Some(p) = parent[cur] {
                chain.push(node.pixels[p]);
                cur = p;
            }
            chain.reverse();
            return chain;
        }
        for j in 0..n {
            if !seen[j] && node.pixels[i].is_adjacent8(node.pixels[j]) {
                seen[j] = true;
                parent[j] = Some(i);
                queue.push_back(j);
            }
        }
    }
    vec![rep]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Branch, Node, PixelGraph};
    use std::collections::BTreeMap;

    fn node_at(index: usize, x: u32, y: u32) -> Node {
        Node {
            index,
            pixels: vec![PixelCoord::new(x, y)],
            representative: PixelCoord::new(x, y),
        }
    }

    /// Graph with explicit branch endpoints and empty traces; enumeration
    /// only looks at the connectivity.
    fn graph_with(nodes: usize, branches: &[(Option<usize>, Option<usize>)]) -> PixelGraph {
        let mut graph = PixelGraph::empty();
        for i in 0..nodes {
            graph.nodes.push(node_at(i, i as u32 * 10, 0));
        }
        for (i, &(a, b)) in branches.iter().enumerate() {
            let from = a.map_or(Endpoint::Open, Endpoint::Node);
            let to = b.map_or(Endpoint::Open, Endpoint::Node);
            let kind = match (a, b) {
                (Some(x), Some(y)) if x == y => BranchKind::SelfLoop,
                (Some(_), Some(_)) => BranchKind::Normal,
                _ => BranchKind::Open,
            };
            if kind == BranchKind::SelfLoop {
                graph.self_loops.insert(i, a.unwrap());
            }
            graph.branches.push(Branch {
                index: i,
                trace: Vec::new(),
                endpoints: (from, to),
                kind,
            });
        }
        graph
    }

    #[test]
    fn self_loop_is_a_single_cycle() {
        let graph = graph_with(1, &[(Some(0), Some(0))]);
        let result = enumerate_cycles(&graph, &CycleLimits::default());
        assert_eq!(result.cycles.len(), 1);
        assert_eq!(result.cycles[0].steps.len(), 1);
        assert!(!result.truncated);
    }

    #[test]
    fn four_parallel_branches_give_six_cycles() {
        let pairs = [(Some(0), Some(1)); 4];
        let graph = graph_with(2, &pairs);
        let result = enumerate_cycles(&graph, &CycleLimits::default());
        assert_eq!(result.cycles.len(), 6);
        let mut sets: Vec<Vec<usize>> = result
            .cycles
            .iter()
            .map(|c| {
                let mut v = c.branch_indices();
                v.sort_unstable();
                v
            })
            .collect();
        sets.sort();
        assert_eq!(
            sets,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }

    #[test]
    fn tree_has_no_cycles() {
        let graph = graph_with(
            4,
            &[(Some(0), Some(1)), (Some(1), Some(2)), (Some(1), Some(3))],
        );
        let result = enumerate_cycles(&graph, &CycleLimits::default());
        assert!(result.cycles.is_empty());
        assert!(!result.truncated);
    }

    #[test]
    fn triangle_found_once() {
        let graph = graph_with(
            3,
            &[(Some(0), Some(1)), (Some(1), Some(2)), (Some(2), Some(0))],
        );
        let result = enumerate_cycles(&graph, &CycleLimits::default());
        assert_eq!(result.cycles.len(), 1);
        assert_eq!(result.cycles[0].branch_indices(), vec![0, 1, 2]);
    }

    #[test]
    fn open_branches_are_ignored() {
        let graph = graph_with(
            2,
            &[
                (Some(0), Some(1)),
                (Some(1), Some(0)),
                (Some(0), None),
                (None, None),
            ],
        );
        let result = enumerate_cycles(&graph, &CycleLimits::default());
        assert_eq!(result.cycles.len(), 1);
        assert_eq!(result.cycles[0].branch_indices(), vec![0, 1]);
    }

    #[test]
    fn max_cycles_cap_sets_truncation() {
        let pairs = [(Some(0), Some(1)); 4];
        let graph = graph_with(2, &pairs);
        let limits = CycleLimits {
            max_cycles: 1,
            max_cycle_branches: 32,
        };
        let result = enumerate_cycles(&graph, &limits);
        assert_eq!(result.cycles.len(), 1);
        assert!(result.truncated);
    }

    #[test]
    fn depth_cap_sets_truncation() {
        // A 4-cycle cannot be found with a 3-branch cap.
        let graph = graph_with(
            4,
            &[
                (Some(0), Some(1)),
                (Some(1), Some(2)),
                (Some(2), Some(3)),
                (Some(3), Some(0)),
            ],
        );
        let limits = CycleLimits {
            max_cycles: 10,
            max_cycle_branches: 3,
        };
        let result = enumerate_cycles(&graph, &limits);
        assert!(result.cycles.is_empty());
        assert!(result.truncated);
    }

    #[test]
    fn assemble_two_branch_cycle_inserts_each_node_once() {
        let mut graph = graph_with(2, &[(Some(0), Some(1)), (Some(0), Some(1))]);
        graph.nodes[0] = node_at(0, 0, 0);
        graph.nodes[1] = node_at(1, 3, 0);
        // Upper arc 0 -> 1 and lower arc 0 -> 1, both stored left to right.
        graph.branches[0].trace = vec![
            PixelCoord::new(1, 1),
            PixelCoord::new(2, 1),
        ];
        graph.branches[1].trace = vec![
            PixelCoord::new(1, 2),
            PixelCoord::new(2, 2),
        ];
        // Make traces adjacent to the node pixels.
        graph.nodes[0].pixels = vec![PixelCoord::new(0, 1)];
        graph.nodes[0].representative = PixelCoord::new(0, 1);
        graph.nodes[1].pixels = vec![PixelCoord::new(3, 1)];
        graph.nodes[1].representative = PixelCoord::new(3, 1);

        let result = enumerate_cycles(&graph, &CycleLimits::default());
        assert_eq!(result.cycles.len(), 1);
        let looped = assemble_loop(&graph, &result.cycles[0]).unwrap();
        // m + n + 2 pixels: two traces of 2 plus one pixel per node.
        assert_eq!(looped.len(), 6);
        for w in looped.windows(2) {
            assert!(w[0].is_adjacent8(w[1]), "gap between {:?} and {:?}", w[0], w[1]);
        }
        assert!(looped[0].is_adjacent8(*looped.last().unwrap()));
    }

    #[test]
    fn assemble_rejects_open_branch() {
        let graph = graph_with(2, &[(Some(0), None)]);
        let cycle = Cycle {
            steps: vec![CycleStep {
                branch: 0,
                dir: Direction::Forward,
            }],
        };
        assert_eq!(
            assemble_loop(&graph, &cycle),
            Err(AssembleError::OpenBranch(0))
        );
    }
}
