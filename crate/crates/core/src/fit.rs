//! Circularity testing for assembled pixel loops.
//!
//! Three equidistant points are sampled from the loop and the circle through
//! them is solved exactly. The candidate survives only if every pixel of the
//! loop lies within `radius ± tolerance` of the candidate center, where the
//! tolerance floor absorbs quantization error and the relative term covers
//! junction perturbations on large circles. A handful of seeded trials guard
//! against samples landing on junction-distorted pixels; each trial re-runs
//! the same full-loop check, so extra trials never weaken acceptance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::edgemap::PixelCoord;

#[derive(Clone, Debug, PartialEq)]
pub struct FitConfig {
    /// Absolute tolerance floor in pixels.
    pub tol_abs: f64,
    /// Relative tolerance as a fraction of the candidate radius.
    pub tol_rel: f64,
    /// Candidates below this radius are rejected outright.
    pub min_radius: f64,
    /// Loops shorter than this many pixels are not worth testing.
    pub min_loop_length: usize,
    /// Number of seeded sampling trials per loop.
    pub trials: u32,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            tol_abs: 1.5,
            tol_rel: 0.04,
            min_radius: 5.0,
            min_loop_length: 20,
            trials: 3,
            seed: 0,
        }
    }
}

/// Where an accepted loop came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HitSource {
    /// Index into the enumerated cycle list.
    Cycle(usize),
    /// Index into the standalone loop list.
    Standalone(usize),
}

impl HitSource {
    /// Stable per-loop salt for the trial RNG.
    pub fn loop_id(self) -> u64 {
        match self {
            HitSource::Standalone(i) => i as u64,
            HitSource::Cycle(i) => (1u64 << 32) + i as u64,
        }
    }
}

/// A validated circle.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleHit {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
    pub loop_length: usize,
    /// Largest |distance - r| over the whole loop; always within tolerance.
    pub max_deviation: f64,
    pub source: HitSource,
    /// The supporting loop, kept for overlays.
    pub pixels: Vec<PixelCoord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rejection {
    TooShort,
    AllTrialsFailed,
    CollinearExhausted,
    RadiusTooSmall,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Circumcircle {
    Circle { cx: f64, cy: f64, r: f64 },
    Collinear,
}

/// Twice-signed-area magnitude below which a triple counts as collinear.
pub const COLLINEAR_EPS: f64 = 1e-9;

/// The unique circle through three points, or `Collinear` when the triangle
/// they span is degenerate.
pub fn circumcircle(p1: (f64, f64), p2: (f64, f64), p3: (f64, f64)) -> Circumcircle {
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    let (x3, y3) = p3;
    // Twice the signed triangle area.
    let d = x1 * (y2 - y3) + x2 * (y3 - y1) + x3 * (y1 - y2);
    if d.abs() < COLLINEAR_EPS {
        return Circumcircle::Collinear;
    }
    let s1 = x1 * x1 + y1 * y1;
    let s2 = x2 * x2 + y2 * y2;
    let s3 = x3 * x3 + y3 * y3;
    let cx = (s1 * (y2 - y3) + s2 * (y3 - y1) + s3 * (y1 - y2)) / (2.0 * d);
    let cy = (s1 * (x3 - x2) + s2 * (x1 - x3) + s3 * (x2 - x1)) / (2.0 * d);
    let r = ((x1 - cx).powi(2) + (y1 - cy).powi(2)).sqrt();
    Circumcircle::Circle { cx, cy, r }
}

/// Three points one third of the loop apart, starting at `offset`.
pub fn sample_equidistant(
    loop_pixels: &[PixelCoord],
    offset: usize,
) -> (PixelCoord, PixelCoord, PixelCoord) {
    let len = loop_pixels.len();
    debug_assert!(len >= 3);
    let third = len / 3;
    (
        loop_pixels[offset % len],
        loop_pixels[(offset + third) % len],
        loop_pixels[(offset + 2 * third) % len],
    )
}

/// Acceptance band half-width for a circle of radius `r`.
pub fn tolerance(r: f64, cfg: &FitConfig) -> f64 {
    cfg.tol_abs.max(cfg.tol_rel * r)
}

fn point(p: PixelCoord) -> (f64, f64) {
    (p.fx(), p.fy())
}

/// Test a loop against explicitly chosen sample offsets. Each offset is one
/// trial; the first candidate whose full-loop check passes wins.
pub fn test_loop_with_offsets(
    loop_pixels: &[PixelCoord],
    offsets: &[usize],
    source: HitSource,
    cfg: &FitConfig,
) -> Result<CircleHit, Rejection> {
    if loop_pixels.len() < cfg.min_loop_length || loop_pixels.len() < 3 {
        return Err(Rejection::TooShort);
    }
    let mut solved_any = false;
    let mut radius_ok_any = false;
    for &offset in offsets {
        let (p1, p2, p3) = sample_equidistant(loop_pixels, offset);
        let (cx, cy, r) = match circumcircle(point(p1), point(p2), point(p3)) {
            Circumcircle::Collinear => continue,
            Circumcircle::Circle { cx, cy, r } => (cx, cy, r),
        };
        solved_any = true;
        if r < cfg.min_radius {
            continue;
        }
        radius_ok_any = true;
        let tol = tolerance(r, cfg);
        let mut max_dev: f64 = 0.0;
        let mut ok = true;
        for &p in loop_pixels {
            let dev = ((p.fx() - cx).hypot(p.fy() - cy) - r).abs();
            if dev > tol {
                ok = false;
                break;
            }
            max_dev = max_dev.max(dev);
        }
        if ok {
            return Ok(CircleHit {
                cx,
                cy,
                r,
                loop_length: loop_pixels.len(),
                max_deviation: max_dev,
                source,
                pixels: loop_pixels.to_vec(),
            });
        }
    }
    if !solved_any {
        Err(Rejection::CollinearExhausted)
    } else if !radius_ok_any {
        Err(Rejection::RadiusTooSmall)
    } else {
        Err(Rejection::AllTrialsFailed)
    }
}

/// Test a loop with `cfg.trials` seeded random offsets. The trial sequence
/// is derived from `(cfg.seed, loop id)` so runs are reproducible and loops
/// may be tested in parallel without losing determinism. A collinear sample
/// is redrawn a few times before its trial counts as spent.
pub fn test_loop(
    loop_pixels: &[PixelCoord],
    source: HitSource,
    cfg: &FitConfig,
) -> Result<CircleHit, Rejection> {
    if loop_pixels.len() < cfg.min_loop_length || loop_pixels.len() < 3 {
        return Err(Rejection::TooShort);
    }
    let mut rng = trial_rng(cfg.seed, source.loop_id());
    let len = loop_pixels.len();
    let mut offsets = Vec::with_capacity(cfg.trials as usize);
    for _ in 0..cfg.trials.max(1) {
        let mut offset = rng.gen_range(0..len);
        for _ in 0..8 {
            let (p1, p2, p3) = sample_equidistant(loop_pixels, offset);
            if circumcircle(point(p1), point(p2), point(p3)) != Circumcircle::Collinear {
                break;
            }
            offset = rng.gen_range(0..len);
        }
        offsets.push(offset);
    }
    test_loop_with_offsets(loop_pixels, &offsets, source, cfg)
}

fn trial_rng(seed: u64, loop_id: u64) -> ChaCha8Rng {
    // splitmix-style mix keeps distinct loops on distinct streams.
    let mut z = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(loop_id)
        .wrapping_add(0x2545_F491_4F6C_DD1D);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// Merge hits that describe the same physical circle: centers within 2 px
/// and radii within 2 px collapse to the hit with the smaller deviation.
/// Two enumerated cycles can trace one circle through different crossings.
pub fn dedup_hits(mut hits: Vec<CircleHit>) -> Vec<CircleHit> {
    hits.sort_by(|a, b| {
        a.max_deviation
            .partial_cmp(&b.max_deviation)
            .unwrap()
            .then(a.source.loop_id().cmp(&b.source.loop_id()))
    });
    let mut kept: Vec<CircleHit> = Vec::new();
    for hit in hits {
        let dup = kept.iter().any(|k| {
            (k.cx - hit.cx).hypot(k.cy - hit.cy) <= 2.0 && (k.r - hit.r).abs() <= 2.0
        });
        if !dup {
            kept.push(hit);
        }
    }
    kept.sort_by(|a, b| {
        (a.cy, a.cx, a.r)
            .partial_cmp(&(b.cy, b.cx, b.r))
            .unwrap()
    });
    kept
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, eps: f64) {
        assert!((a - b).abs() <= eps, "{a} != {b} (eps {eps})");
    }

    #[test]
    fn circumcircle_right_angle() {
        match circumcircle((0.0, 0.0), (2.0, 0.0), (0.0, 2.0)) {
            Circumcircle::Circle { cx, cy, r } => {
                assert_close(cx, 1.0, 1e-12);
                assert_close(cy, 1.0, 1e-12);
                assert_close(r, 2.0f64.sqrt(), 1e-12);
            }
            Circumcircle::Collinear => panic!("unexpected collinear"),
        }
    }

    #[test]
    fn circumcircle_isoceles() {
        match circumcircle((0.0, 0.0), (4.0, 0.0), (2.0, 2.0)) {
            Circumcircle::Circle { cx, cy, r } => {
                assert_close(cx, 2.0, 1e-12);
                assert_close(cy, 0.0, 1e-12);
                assert_close(r, 2.0, 1e-12);
            }
            Circumcircle::Collinear => panic!("unexpected collinear"),
        }
    }

    #[test]
    fn circumcircle_collinear() {
        assert_eq!(
            circumcircle((0.0, 0.0), (1.0, 1.0), (2.0, 2.0)),
            Circumcircle::Collinear
        );
    }

    #[test]
    fn equidistant_sampling_with_floor_division_and_wrap() {
        let loop_pixels: Vec<PixelCoord> = (0..9).map(|i| PixelCoord::new(i, 0)).collect();
        let (a, b, c) = sample_equidistant(&loop_pixels, 0);
        assert_eq!((a.x, b.x, c.x), (0, 3, 6));

        let loop_pixels: Vec<PixelCoord> = (0..10).map(|i| PixelCoord::new(i, 0)).collect();
        let (a, b, c) = sample_equidistant(&loop_pixels, 0);
        assert_eq!((a.x, b.x, c.x), (0, 3, 6));

        let loop_pixels: Vec<PixelCoord> = (0..9).map(|i| PixelCoord::new(i, 0)).collect();
        let (a, b, c) = sample_equidistant(&loop_pixels, 7);
        assert_eq!((a.x, b.x, c.x), (7, 1, 4));
    }

    #[test]
    fn tolerance_floor_and_relative_term() {
        let cfg = FitConfig::default();
        assert_close(tolerance(10.0, &cfg), 1.5, 1e-12);
        assert_close(tolerance(100.0, &cfg), 4.0, 1e-12);
        // Crossover radius: 1.5 / 0.04 = 37.5.
        assert_close(tolerance(37.5, &cfg), 1.5, 1e-12);
        assert_close(tolerance(37.6, &cfg), 1.504, 1e-12);
    }

    #[test]
    fn short_loop_rejected() {
        let cfg = FitConfig::default();
        let loop_pixels: Vec<PixelCoord> = (0..8).map(|i| PixelCoord::new(i, 0)).collect();
        assert_eq!(
            test_loop(&loop_pixels, HitSource::Standalone(0), &cfg),
            Err(Rejection::TooShort)
        );
    }

    #[test]
    fn radius_too_small_reported() {
        // A tight diamond ring of 24 synthetic pixels around a radius-2
        // circle: long enough to test, radius below the default minimum.
        let mut loop_pixels = Vec::new();
        for i in 0..24 {
            let a = std::f64::consts::TAU * i as f64 / 24.0;
            loop_pixels.push(PixelCoord::new(
                (10.0 + 2.0 * a.cos()).round() as u32,
                (10.0 + 2.0 * a.sin()).round() as u32,
            ));
        }
        let cfg = FitConfig::default();
        assert_eq!(
            test_loop(&loop_pixels, HitSource::Standalone(0), &cfg),
            Err(Rejection::RadiusTooSmall)
        );
    }

    #[test]
    fn dedup_merges_near_identical_hits() {
        let mk = |cx: f64, r: f64, dev: f64, id: usize| CircleHit {
            cx,
            cy: 50.0,
            r,
            loop_length: 100,
            max_deviation: dev,
            source: HitSource::Cycle(id),
            pixels: Vec::new(),
        };
        let merged = dedup_hits(vec![
            mk(50.0, 20.0, 0.9, 0),
            mk(51.0, 20.5, 0.4, 1),
            mk(80.0, 20.0, 0.7, 2),
        ]);
        assert_eq!(merged.len(), 2);
        // The better-fitting duplicate survived.
        assert!(merged.iter().any(|h| h.max_deviation == 0.4));
        assert!(merged.iter().any(|h| h.cx == 80.0));
    }
}
