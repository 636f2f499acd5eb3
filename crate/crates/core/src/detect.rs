//! End-to-end detection pipeline and the machine-readable report.

use std::time::Instant;

use serde::Serialize;

use crate::cycles::{assemble_loop, enumerate_cycles, CycleLimits};
use crate::edgemap::EdgeMap;
use crate::explore::{explore_with, ExploreOptions, StartMode};
use crate::fit::{dedup_hits, test_loop, CircleHit, FitConfig, HitSource};
use crate::graph::PixelGraph;

#[derive(Clone, Debug)]
pub struct DetectConfig {
    pub threshold: u8,
    pub invert: bool,
    /// Seed mother ants at random unvisited pixels instead of raster order.
    pub random_start: bool,
    pub fit: FitConfig,
    pub limits: CycleLimits,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self {
            threshold: 128,
            invert: false,
            random_start: false,
            fit: FitConfig::default(),
            limits: CycleLimits::default(),
        }
    }
}

impl DetectConfig {
    pub fn with_seed(seed: u64) -> Self {
        let mut cfg = Self::default();
        cfg.fit.seed = seed;
        cfg
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct StageTimings {
    pub explore_ms: f64,
    pub cycles_ms: f64,
    pub fit_ms: f64,
}

/// Full result of a detection run, including the intermediate graph.
#[derive(Debug)]
pub struct Detection {
    pub hits: Vec<CircleHit>,
    pub graph: PixelGraph,
    pub cycles_enumerated: usize,
    pub truncated: bool,
    pub timing: StageTimings,
}

/// Run the whole pipeline on an already-binarized edge map.
pub fn detect_map(map: &EdgeMap, cfg: &DetectConfig) -> Detection {
    let t = Instant::now();
    let opts = ExploreOptions {
        start: if cfg.random_start {
            StartMode::Random { seed: cfg.fit.seed }
        } else {
            StartMode::RasterScan
        },
        record_trace: false,
    };
    let graph = explore_with(map, &opts);
    let explore_ms = t.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let enumeration = enumerate_cycles(&graph, &cfg.limits);
    let mut candidates = Vec::new();
    for (i, looped) in graph.standalone_loops.iter().enumerate() {
        candidates.push((HitSource::Standalone(i), looped.clone()));
    }
    for (i, cycle) in enumeration.cycles.iter().enumerate() {
        match assemble_loop(&graph, cycle) {
            Ok(looped) => candidates.push((HitSource::Cycle(i), looped)),
            Err(e) => debug_assert!(false, "enumerated cycle failed to assemble: {e}"),
        }
    }
    let cycles_ms = t.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let mut hits = Vec::new();
    for (source, looped) in &candidates {
        if let Ok(hit) = test_loop(looped, *source, &cfg.fit) {
            hits.push(hit);
        }
    }
    let hits = dedup_hits(hits);
    let fit_ms = t.elapsed().as_secs_f64() * 1e3;

    Detection {
        hits,
        graph,
        cycles_enumerated: enumeration.cycles.len(),
        truncated: enumeration.truncated,
        timing: StageTimings {
            explore_ms,
            cycles_ms,
            fit_ms,
        },
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct HitRecord {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
    pub loop_length: usize,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct GraphSummary {
    pub nodes: usize,
    pub branches: usize,
    pub standalone_loops: usize,
    pub edge_pixels: usize,
    pub cycles: usize,
    pub truncated: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ConfigEcho {
    pub threshold: u8,
    pub invert: bool,
    pub seed: u64,
    pub random_start: bool,
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub min_radius: f64,
    pub min_loop_length: usize,
    pub trials: u32,
    pub max_cycles: usize,
    pub max_cycle_branches: usize,
}

/// The stable report emitted by the `detect` command.
#[derive(Clone, Debug, Serialize)]
pub struct DetectReport {
    pub hits: Vec<HitRecord>,
    pub graph: GraphSummary,
    pub timing: StageTimings,
    pub config: ConfigEcho,
}

pub fn build_report(detection: &Detection, cfg: &DetectConfig) -> DetectReport {
    DetectReport {
        hits: detection
            .hits
            .iter()
            .map(|h| HitRecord {
                cx: h.cx,
                cy: h.cy,
                r: h.r,
                loop_length: h.loop_length,
                max_deviation: h.max_deviation,
            })
            .collect(),
        graph: GraphSummary {
            nodes: detection.graph.node_count(),
            branches: detection.graph.branch_count(),
            standalone_loops: detection.graph.standalone_loops.len(),
            edge_pixels: detection.graph.stats.edge_pixel_count,
            cycles: detection.cycles_enumerated,
            truncated: detection.truncated,
        },
        timing: detection.timing,
        config: ConfigEcho {
            threshold: cfg.threshold,
            invert: cfg.invert,
            seed: cfg.fit.seed,
            random_start: cfg.random_start,
            tol_abs: cfg.fit.tol_abs,
            tol_rel: cfg.fit.tol_rel,
            min_radius: cfg.fit.min_radius,
            min_loop_length: cfg.fit.min_loop_length,
            trials: cfg.fit.trials,
            max_cycles: cfg.limits.max_cycles,
            max_cycle_branches: cfg.limits.max_cycle_branches,
        },
    }
}

impl DetectReport {
    /// Wall-clock timings are the only nondeterministic part of a report;
    /// zeroing them makes repeated runs byte-identical.
    pub fn zero_timing(&mut self) {
        self.timing = StageTimings::default();
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per hit: `cx,cy,r,loop_length,max_deviation`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cx,cy,r,loop_length,max_deviation\n");
        for h in &self.hits {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                h.cx, h.cy, h.r, h.loop_length, h.max_deviation
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{rasterize_circle, rasterize_segment};

    #[test]
    fn empty_map_reports_cleanly() {
        let map = EdgeMap::new(64, 64).unwrap();
        let cfg = DetectConfig::default();
        let detection = detect_map(&map, &cfg);
        assert!(detection.hits.is_empty());
        let report = build_report(&detection, &cfg);
        assert_eq!(report.graph.edge_pixels, 0);
        assert_eq!(report.graph.nodes, 0);
        assert!(!report.graph.truncated);
    }

    #[test]
    fn single_circle_is_detected_as_standalone_loop() {
        let mut map = EdgeMap::new(101, 101).unwrap();
        rasterize_circle(&mut map, 50.0, 50.0, 30.0).unwrap();
        let cfg = DetectConfig::default();
        let detection = detect_map(&map, &cfg);
        assert_eq!(detection.graph.standalone_loops.len(), 1);
        assert_eq!(detection.hits.len(), 1);
        let hit = &detection.hits[0];
        assert!((hit.cx - 50.0).abs() <= 1.0, "cx {}", hit.cx);
        assert!((hit.cy - 50.0).abs() <= 1.0, "cy {}", hit.cy);
        assert!((hit.r - 30.0).abs() <= 1.0, "r {}", hit.r);
    }

    #[test]
    fn circle_crossed_by_line_is_still_detected() {
        let mut map = EdgeMap::new(128, 128).unwrap();
        rasterize_circle(&mut map, 64.0, 64.0, 30.0).unwrap();
        rasterize_segment(&mut map, 5, 64, 122, 64);
        let cfg = DetectConfig::default();
        let detection = detect_map(&map, &cfg);
        assert_eq!(detection.hits.len(), 1, "graph: {}", detection.graph.to_json());
        let hit = &detection.hits[0];
        assert!((hit.cx - 64.0).abs() <= 2.0);
        assert!((hit.cy - 64.0).abs() <= 2.0);
        assert!((hit.r - 30.0).abs() <= 2.0);
    }

    #[test]
    fn report_is_deterministic_with_timing_zeroed() {
        let mut map = EdgeMap::new(128, 128).unwrap();
        rasterize_circle(&mut map, 60.0, 60.0, 25.0).unwrap();
        rasterize_circle(&mut map, 85.0, 60.0, 20.0).unwrap();
        let cfg = DetectConfig::with_seed(7);
        let mut a = build_report(&detect_map(&map, &cfg), &cfg);
        let mut b = build_report(&detect_map(&map, &cfg), &cfg);
        a.zero_timing();
        b.zero_timing();
        assert_eq!(a.to_json_string(), b.to_json_string());
    }

    #[test]
    fn csv_has_one_line_per_hit() {
        let mut map = EdgeMap::new(101, 101).unwrap();
        rasterize_circle(&mut map, 50.0, 50.0, 22.0).unwrap();
        let cfg = DetectConfig::default();
        let report = build_report(&detect_map(&map, &cfg), &cfg);
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 1 + report.hits.len());
        assert_eq!(lines[0], "cx,cy,r,loop_length,max_deviation");
    }
}
