//! The pixel graph extracted from an edge map: node clusters, branch traces,
//! the incidence matrix, and standalone loops.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::edgemap::PixelCoord;

/// One endpoint of a branch: either a node index or an open curve end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Node(usize),
    Open,
}

impl Endpoint {
    pub fn node(self) -> Option<usize> {
        match self {
            Endpoint::Node(i) => Some(i),
            Endpoint::Open => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchKind {
    /// Connects two distinct nodes; contributes a +1/-1 incidence column.
    Normal,
    /// Both endpoints on the same node; tracked in the self-loop registry.
    SelfLoop,
    /// At least one open end; excluded from incidence and cycle search.
    Open,
}

/// A junction. Rasterized crossings usually smear over a few mutually
/// adjacent pixels, so a node is a cluster rather than a single coordinate.
#[derive(Clone, Debug)]
pub struct Node {
    pub index: usize,
    pub pixels: Vec<PixelCoord>,
    /// Cluster pixel nearest the cluster centroid.
    pub representative: PixelCoord,
}

/// An ordered pixel trace between two endpoints. The trace excludes the
/// node-cluster pixels it attaches to; its first/last pixels are 8-adjacent
/// to their endpoint clusters.
#[derive(Clone, Debug)]
pub struct Branch {
    pub index: usize,
    pub trace: Vec<PixelCoord>,
    pub endpoints: (Endpoint, Endpoint),
    pub kind: BranchKind,
}

/// Counters kept by the exploration run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExplorationStats {
    pub edge_pixel_count: usize,
    /// Number of first-visit events; equals `edge_pixel_count` after a
    /// complete run, since no pixel is ever visited twice.
    pub visit_events: usize,
    pub rounds: usize,
}

#[derive(Clone, Debug)]
pub struct PixelGraph {
    pub nodes: Vec<Node>,
    pub branches: Vec<Branch>,
    /// Branch index -> node index, for branches leaving and re-entering the
    /// same node. These cannot be expressed as a +-1 pair in one incidence
    /// column, so they live here and count as one-branch cycles.
    pub self_loops: BTreeMap<usize, usize>,
    /// Closed pixel sequences discovered whole by a mother ant; they bypass
    /// cycle enumeration.
    pub standalone_loops: Vec<Vec<PixelCoord>>,
    pub stats: ExplorationStats,
}

impl PixelGraph {
    pub fn empty() -> Self {
        Self {
            nodes: Vec::new(),
            branches: Vec::new(),
            self_loops: BTreeMap::new(),
            standalone_loops: Vec::new(),
            stats: ExplorationStats::default(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// The N x B incidence matrix: +1 at the origin node row and -1 at the
    /// destination node row of every normal branch column. Self-loop and
    /// open branch positions are all-zero columns.
    pub fn incidence(&self) -> Vec<Vec<i8>> {
        let mut m = vec![vec![0i8; self.branches.len()]; self.nodes.len()];
        for branch in &self.branches {
            if branch.kind != BranchKind::Normal {
                continue;
            }
            if let (Endpoint::Node(from), Endpoint::Node(to)) = branch.endpoints {
                m[from][branch.index] = 1;
                m[to][branch.index] = -1;
            }
        }
        m
    }

    /// Debug/diagnostic JSON form: node representatives, branch endpoints
    /// and trace lengths, the incidence matrix as row lists, the self-loop
    /// registry, and standalone loop lengths.
    pub fn to_json(&self) -> Value {
        let endpoint = |e: Endpoint| -> Value {
            match e {
                Endpoint::Node(i) => json!(i),
                Endpoint::Open => Value::Null,
            }
        };
        json!({
            "nodes": self.nodes.iter().map(|n| json!({
                "index": n.index,
                "x": n.representative.x,
                "y": n.representative.y,
                "pixels": n.pixels.len(),
            })).collect::<Vec<_>>(),
            "branches": self.branches.iter().map(|b| json!({
                "index": b.index,
                "kind": match b.kind {
                    BranchKind::Normal => "normal",
                    BranchKind::SelfLoop => "self_loop",
                    BranchKind::Open => "open",
                },
                "from": endpoint(b.endpoints.0),
                "to": endpoint(b.endpoints.1),
                "trace_len": b.trace.len(),
            })).collect::<Vec<_>>(),
            "incidence": self.incidence(),
            "self_loops": self.self_loops.iter()
                .map(|(k, v)| (k.to_string(), json!(v)))
                .collect::<serde_json::Map<_, _>>(),
            "standalone_loops": self.standalone_loops.iter()
                .map(|l| l.len()).collect::<Vec<_>>(),
            "stats": {
                "edge_pixels": self.stats.edge_pixel_count,
                "visit_events": self.stats.visit_events,
                "rounds": self.stats.rounds,
            },
        })
    }
}

/// Pick the cluster pixel closest to the centroid, breaking ties by raster
/// order. Always one of the cluster's own pixels so junction insertion in
/// loop assembly stays on the curve.
pub(crate) fn cluster_representative(pixels: &[PixelCoord]) -> PixelCoord {
    debug_assert!(!pixels.is_empty());
    let n = pixels.len() as f64;
    let cx = pixels.iter().map(|p| p.fx()).sum::<f64>() / n;
    let cy = pixels.iter().map(|p| p.fy()).sum::<f64>() / n;
    let mut best = pixels[0];
    let mut best_key = (f64::INFINITY, u32::MAX, u32::MAX);
    for &p in pixels {
        let d2 = (p.fx() - cx).powi(2) + (p.fy() - cy).powi(2);
        let key = (d2, p.y, p.x);
        if key < best_key {
            best_key = key;
            best = p;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn branch(index: usize, from: Endpoint, to: Endpoint, kind: BranchKind) -> Branch {
        Branch {
            index,
            trace: Vec::new(),
            endpoints: (from, to),
            kind,
        }
    }

    #[test]
    fn incidence_columns_carry_origin_and_destination() {
        let graph = PixelGraph {
            nodes: vec![
                Node {
                    index: 0,
                    pixels: vec![PixelCoord::new(0, 0)],
                    representative: PixelCoord::new(0, 0),
                },
                Node {
                    index: 1,
                    pixels: vec![PixelCoord::new(5, 0)],
                    representative: PixelCoord::new(5, 0),
                },
            ],
            branches: vec![
                branch(0, Endpoint::Node(0), Endpoint::Node(1), BranchKind::Normal),
                branch(1, Endpoint::Node(1), Endpoint::Node(0), BranchKind::Normal),
                branch(2, Endpoint::Node(0), Endpoint::Node(0), BranchKind::SelfLoop),
                branch(3, Endpoint::Node(1), Endpoint::Open, BranchKind::Open),
            ],
            self_loops: BTreeMap::from([(2, 0)]),
            standalone_loops: Vec::new(),
            stats: ExplorationStats::default(),
        };
        let m = graph.incidence();
        assert_eq!(m[0][0], 1);
        assert_eq!(m[1][0], -1);
        assert_eq!(m[0][1], -1);
        assert_eq!(m[1][1], 1);
        // Self-loop and open columns stay zero.
        assert_eq!((m[0][2], m[1][2]), (0, 0));
        assert_eq!((m[0][3], m[1][3]), (0, 0));
    }

    #[test]
    fn representative_is_a_cluster_pixel_near_centroid() {
        let pixels = vec![
            PixelCoord::new(4, 4),
            PixelCoord::new(5, 4),
            PixelCoord::new(5, 5),
            PixelCoord::new(4, 5),
        ];
        let rep = cluster_representative(&pixels);
        // Centroid (4.5, 4.5) is equidistant from all four; raster order
        // breaks the tie.
        assert_eq!(rep, PixelCoord::new(4, 4));

        let pixels = vec![
            PixelCoord::new(10, 8),
            PixelCoord::new(11, 9),
            PixelCoord::new(12, 10),
        ];
        assert_eq!(cluster_representative(&pixels), PixelCoord::new(11, 9));
    }
}
