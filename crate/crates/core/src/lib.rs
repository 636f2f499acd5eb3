//! Circle detection in binary edge images.
//!
//! The detector walks the edge-pixel lattice with cooperating single-pixel
//! agents ("ants"). Each ant follows a branch of the pixel graph one step at
//! a time; junction pixels become nodes, converging ants merge their partial
//! traces into whole branches, and the resulting node/branch incidence
//! structure is searched for simple cycles. Every closed pixel loop — whether
//! found directly by an ant circling an isolated curve or assembled from a
//! cycle of branches — is then tested against the circumcircle of three
//! equidistant sample points, accepting the loop when every pixel stays
//! within a radius-dependent tolerance band.
//!
//! Pipeline: [`io::load_edge_map`] → [`explore`] → [`enumerate_cycles`] →
//! [`assemble_loop`] → [`fit::test_loop`] → [`fit::dedup_hits`], wrapped
//! end-to-end by [`detect::detect_map`].

pub mod cycles;
pub mod detect;
pub mod edgemap;
pub mod explore;
pub mod fit;
pub mod graph;
pub mod io;
pub mod synth;

pub use cycles::{assemble_loop, enumerate_cycles, Cycle, CycleEnumeration, CycleLimits};
pub use detect::{build_report, detect_map, DetectConfig, DetectReport, Detection};
pub use edgemap::{EdgeMap, PixelCoord};
pub use explore::{explore, explore_with, ExploreOptions, StartMode};
pub use fit::{circumcircle, CircleHit, Circumcircle, FitConfig, Rejection};
pub use graph::{Branch, BranchKind, Endpoint, ExplorationStats, Node, PixelGraph};
