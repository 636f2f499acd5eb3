//! Synthetic test images: shape rasterizers and seeded scene generators
//! with exact ground truth.
//!
//! Curves are drawn with integer midpoint/Bresenham rasterization, which
//! gives one-pixel-thick 8-connected strokes whose pixels stay within one
//! pixel of the ideal shape. Generators round every placement to integer
//! coordinates so that bound holds for the recorded ground truth too.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edgemap::EdgeMap;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("shape lies entirely outside the canvas")]
    OffCanvas,
    #[error("bad shape parameter: {0}")]
    BadParam(String),
}

/// Draw the midpoint rasterization of a circle. Fractional inputs are
/// rounded to the pixel lattice; pixels falling outside the canvas are
/// clipped. Drawing the same circle twice is a no-op.
pub fn rasterize_circle(map: &mut EdgeMap, cx: f64, cy: f64, r: f64) -> Result<(), SynthError> {
    if !(r >= 1.0) || !cx.is_finite() || !cy.is_finite() {
        return Err(SynthError::BadParam(format!("circle cx={cx} cy={cy} r={r}")));
    }
    let (icx, icy, ir) = (cx.round() as i64, cy.round() as i64, r.round() as i64);

    // Reject circles whose curve cannot touch the canvas: the nearest point
    // of the canvas rectangle must be within r, and the farthest corner at
    // least r away (with a one-pixel slop for rasterization).
    let (w, h) = (i64::from(map.width()) - 1, i64::from(map.height()) - 1);
    let nearest_dx = (0 - icx).max(icx - w).max(0) as f64;
    let nearest_dy = (0 - icy).max(icy - h).max(0) as f64;
    let nearest = nearest_dx.hypot(nearest_dy);
    let far_dx = (icx.abs()).max((w - icx).abs()) as f64;
    let far_dy = (icy.abs()).max((h - icy).abs()) as f64;
    let farthest = far_dx.hypot(far_dy);
    if nearest > ir as f64 + 1.0 || farthest < ir as f64 - 1.0 {
        return Err(SynthError::OffCanvas);
    }

    let mut x = ir;
    let mut y = 0i64;
    let mut err = 1 - ir;
    while x >= y {
        for &(px, py) in &[
            (x, y),
            (y, x),
            (-x, y),
            (-y, x),
            (x, -y),
            (y, -x),
            (-x, -y),
            (-y, -x),
        ] {
            map.set_clipped(icx + px, icy + py);
        }
        y += 1;
        if err < 0 {
            err += 2 * y + 1;
        } else {
            x -= 1;
            err += 2 * (y - x) + 1;
        }
    }
    Ok(())
}

/// Axis-aligned midpoint ellipse with integer semi-axes, after the
/// quadrant-walking formulation: march from (-a, 0) to (0, b) and mirror
/// into the other three quadrants.
pub fn rasterize_ellipse(
    map: &mut EdgeMap,
    cx: i64,
    cy: i64,
    a: i64,
    b: i64,
) -> Result<(), SynthError> {
    if a < 1 || b < 1 {
        return Err(SynthError::BadParam(format!("ellipse a={a} b={b}")));
    }
    if cx + a < 0 || cx - a > i64::from(map.width()) - 1 || cy + b < 0
        || cy - b > i64::from(map.height()) - 1
    {
        return Err(SynthError::OffCanvas);
    }
    let mut x = -a;
    let mut y = 0i64;
    let mut err = b * b + x * (2 * b * b + x);
    loop {
        map.set_clipped(cx - x, cy + y);
        map.set_clipped(cx + x, cy + y);
        map.set_clipped(cx + x, cy - y);
        map.set_clipped(cx - x, cy - y);
        let e2 = 2 * err;
        if e2 >= (x * 2 + 1) * b * b {
            x += 1;
            err += (x * 2 + 1) * b * b;
        }
        if e2 <= (y * 2 + 1) * a * a {
            y += 1;
            err += (y * 2 + 1) * a * a;
        }
        if x > 0 {
            break;
        }
    }
    // Narrow ellipses stop early; finish the vertical tips.
    while y < b {
        y += 1;
        map.set_clipped(cx, cy + y);
        map.set_clipped(cx, cy - y);
    }
    Ok(())
}

/// Bresenham line segment between integer endpoints, clipped to the canvas.
pub fn rasterize_segment(map: &mut EdgeMap, x0: i64, y0: i64, x1: i64, y1: i64) {
    let dx = (x1 - x0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let dy = -(y1 - y0).abs();
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    let (mut x, mut y) = (x0, y0);
    loop {
        map.set_clipped(x, y);
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Closed polygon through integer vertices.
pub fn rasterize_polygon(map: &mut EdgeMap, vertices: &[(i64, i64)]) {
    if vertices.len() < 2 {
        if let Some(&(x, y)) = vertices.first() {
            map.set_clipped(x, y);
        }
        return;
    }
    for i in 0..vertices.len() {
        let (x0, y0) = vertices[i];
        let (x1, y1) = vertices[(i + 1) % vertices.len()];
        rasterize_segment(map, x0, y0, x1, y1);
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TruthCircle {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistractorSpec {
    Line { x0: i64, y0: i64, x1: i64, y1: i64 },
    Square { cx: i64, cy: i64, side: i64 },
    Ellipse { cx: i64, cy: i64, a: i64, b: i64 },
    Triangle { cx: f64, cy: f64, side: f64, rotation: f64 },
}

/// Everything needed to render a synthetic scene and to score detections
/// against it.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GroundTruth {
    pub width: u32,
    pub height: u32,
    pub circles: Vec<TruthCircle>,
    pub distractors: Vec<DistractorSpec>,
}

impl GroundTruth {
    pub fn empty(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            circles: Vec::new(),
            distractors: Vec::new(),
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("ground truth serializes");
        s.push('\n');
        s
    }
}

/// Rasterize every shape of a ground-truth description onto a fresh canvas.
pub fn render_truth(truth: &GroundTruth) -> Result<EdgeMap, SynthError> {
    let mut map = EdgeMap::new(truth.width, truth.height)
        .map_err(|_| SynthError::BadParam("zero-sized canvas".into()))?;
    for c in &truth.circles {
        rasterize_circle(&mut map, c.cx, c.cy, c.r)?;
    }
    for d in &truth.distractors {
        render_distractor(&mut map, d)?;
    }
    Ok(map)
}

pub fn render_distractor(map: &mut EdgeMap, spec: &DistractorSpec) -> Result<(), SynthError> {
    match *spec {
        DistractorSpec::Line { x0, y0, x1, y1 } => {
            rasterize_segment(map, x0, y0, x1, y1);
            Ok(())
        }
        DistractorSpec::Square { cx, cy, side } => {
            if side < 2 {
                return Err(SynthError::BadParam(format!("square side {side}")));
            }
            let left = cx - side / 2;
            let top = cy - side / 2;
            let right = left + side - 1;
            let bottom = top + side - 1;
            rasterize_polygon(
                map,
                &[(left, top), (right, top), (right, bottom), (left, bottom)],
            );
            Ok(())
        }
        DistractorSpec::Ellipse { cx, cy, a, b } => rasterize_ellipse(map, cx, cy, a, b),
        DistractorSpec::Triangle {
            cx,
            cy,
            side,
            rotation,
        } => {
            if !(side >= 3.0) {
                return Err(SynthError::BadParam(format!("triangle side {side}")));
            }
            let circumradius = side / 3f64.sqrt();
            let vertices: Vec<(i64, i64)> = (0..3)
                .map(|k| {
                    let angle = rotation + std::f64::consts::TAU * f64::from(k) / 3.0
                        - std::f64::consts::FRAC_PI_2;
                    (
                        (cx + circumradius * angle.cos()).round() as i64,
                        (cy + circumradius * angle.sin()).round() as i64,
                    )
                })
                .collect();
            rasterize_polygon(map, &vertices);
            Ok(())
        }
    }
}

/// Seeded composition of 1..=4 fully visible circles plus optional line
/// distractors; intersections are allowed. Radii are drawn from
/// `radius_range`, centers keep the whole curve at least two pixels inside
/// the canvas and at least 20 px of center-to-border margin. Circle pairs
/// that would be near-indistinguishable (centers and radii both within a
/// few pixels) are re-drawn, since no detector output can separate them.
pub fn random_circles_scene(
    width: u32,
    height: u32,
    seed: u64,
    circle_count: (u32, u32),
    radius_range: (i64, i64),
    line_count: (u32, u32),
) -> (EdgeMap, GroundTruth) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut truth = GroundTruth::empty(width, height);
    let n_circles = rng.gen_range(circle_count.0..=circle_count.1);
    let n_lines = rng.gen_range(line_count.0..=line_count.1);

    let mut placed: Vec<(i64, i64, i64)> = Vec::new();
    for _ in 0..n_circles {
        for _attempt in 0..64 {
            let r = rng.gen_range(radius_range.0..=radius_range.1);
            let margin = (r + 2).max(20);
            if 2 * margin + 4 >= i64::from(width) || 2 * margin + 4 >= i64::from(height) {
                continue;
            }
            let cx = rng.gen_range(margin..=(i64::from(width) - 1 - margin));
            let cy = rng.gen_range(margin..=(i64::from(height) - 1 - margin));
            let near_dup = placed.iter().any(|&(px, py, pr)| {
                let d2 = (px - cx).pow(2) + (py - cy).pow(2);
                d2 <= 36 && (pr - r).abs() <= 6
            });
            if near_dup {
                continue;
            }
            placed.push((cx, cy, r));
            truth.circles.push(TruthCircle {
                cx: cx as f64,
                cy: cy as f64,
                r: r as f64,
            });
            break;
        }
    }
    for _ in 0..n_lines {
        for _attempt in 0..64 {
            let x0 = rng.gen_range(0..i64::from(width));
            let y0 = rng.gen_range(0..i64::from(height));
            let x1 = rng.gen_range(0..i64::from(width));
            let y1 = rng.gen_range(0..i64::from(height));
            let len2 = (x1 - x0).pow(2) + (y1 - y0).pow(2);
            if len2 < 30 * 30 {
                continue;
            }
            truth
                .distractors
                .push(DistractorSpec::Line { x0, y0, x1, y1 });
            break;
        }
    }

    let map = render_truth(&truth).expect("generated scene renders");
    (map, truth)
}

/// Seeded single non-circle shape, fully inside the canvas: an axis-aligned
/// square, an axis-aligned ellipse with semi-axis ratio >= 1.3, or an
/// equilateral triangle at a random rotation.
pub fn random_noncircle_scene(width: u32, height: u32, seed: u64) -> (EdgeMap, GroundTruth) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut truth = GroundTruth::empty(width, height);
    let kind = rng.gen_range(0..3u32);
    let spec = match kind {
        0 => {
            let side = rng.gen_range(30..=80i64);
            let margin = side / 2 + 4;
            let cx = rng.gen_range(margin..=(i64::from(width) - 1 - margin));
            let cy = rng.gen_range(margin..=(i64::from(height) - 1 - margin));
            DistractorSpec::Square { cx, cy, side }
        }
        1 => {
            let b = rng.gen_range(15..=40i64);
            let ratio = rng.gen_range(1.3..=2.2f64);
            let a = ((b as f64) * ratio).ceil() as i64;
            let margin = a + 4;
            let cx = rng.gen_range(margin..=(i64::from(width) - 1 - margin));
            let cy = rng.gen_range(margin..=(i64::from(height) - 1 - margin));
            DistractorSpec::Ellipse { cx, cy, a, b }
        }
        _ => {
            let side = rng.gen_range(30..=80i64) as f64;
            let circumradius = side / 3f64.sqrt();
            let margin = circumradius.ceil() as i64 + 4;
            let cx = rng.gen_range(margin..=(i64::from(width) - 1 - margin)) as f64;
            let cy = rng.gen_range(margin..=(i64::from(height) - 1 - margin)) as f64;
            let rotation = rng.gen_range(0.0..std::f64::consts::TAU);
            DistractorSpec::Triangle {
                cx,
                cy,
                side,
                rotation,
            }
        }
    };
    truth.distractors.push(spec);
    let map = render_truth(&truth).expect("generated scene renders");
    (map, truth)
}
