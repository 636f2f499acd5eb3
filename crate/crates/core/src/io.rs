//! Image ingestion and output: PGM (P2/P5) and 8-bit grayscale PNG.
//!
//! PGM parsing and writing are implemented here directly so the byte layout
//! of generated fixtures is fully pinned; PNG goes through the `image`
//! codec. An input becomes an [`EdgeMap`] via a plain intensity threshold —
//! edge detection proper is out of scope, the detector consumes images that
//! are already edge maps.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::edgemap::{EdgeMap, PixelCoord};
use crate::fit::CircleHit;

#[derive(Debug, Error)]
pub enum ImageIoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("malformed image: {0}")]
    Malformed(String),
    #[error("zero-sized image")]
    ZeroSized,
}

/// A decoded 8-bit grayscale image.
pub struct GrayImage {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

/// Load a grayscale image, sniffing the format from its leading bytes:
/// `P2`/`P5` for PGM, the PNG signature otherwise.
pub fn load_gray(path: &Path) -> Result<GrayImage, ImageIoError> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        parse_pgm(&bytes)
    } else if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        load_png(path)
    } else {
        Err(ImageIoError::UnsupportedFormat(
            "expected PGM (P2/P5) or PNG".into(),
        ))
    }
}

fn load_png(path: &Path) -> Result<GrayImage, ImageIoError> {
    let img = image::open(path)
        .map_err(|e| ImageIoError::UnsupportedFormat(format!("png decode: {e}")))?
        .into_luma8();
    let (width, height) = img.dimensions();
    if width == 0 || height == 0 {
        return Err(ImageIoError::ZeroSized);
    }
    Ok(GrayImage {
        width,
        height,
        data: img.into_raw(),
    })
}

/// Load an image and binarize it. A pixel is an edge pixel iff its intensity
/// is `>= threshold`, or `< threshold` when `invert` is set.
pub fn load_edge_map(path: &Path, threshold: u8, invert: bool) -> Result<EdgeMap, ImageIoError> {
    let gray = load_gray(path)?;
    binarize(&gray, threshold, invert)
}

pub fn binarize(gray: &GrayImage, threshold: u8, invert: bool) -> Result<EdgeMap, ImageIoError> {
    let mut map = EdgeMap::new(gray.width, gray.height).map_err(|_| ImageIoError::ZeroSized)?;
    for y in 0..gray.height {
        for x in 0..gray.width {
            let v = gray.data[(y * gray.width + x) as usize];
            let on = if invert { v < threshold } else { v >= threshold };
            if on {
                map.set(PixelCoord::new(x, y), true);
            }
        }
    }
    Ok(map)
}

fn parse_pgm(bytes: &[u8]) -> Result<GrayImage, ImageIoError> {
    let ascii = bytes.starts_with(b"P2");
    let mut pos = 2usize;

    // Header tokens may be separated by whitespace and '#' comments.
    let next_token = |pos: &mut usize| -> Result<u32, ImageIoError> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if start == *pos {
            return Err(ImageIoError::Malformed("expected integer in header".into()));
        }
        std::str::from_utf8(&bytes[start..*pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImageIoError::Malformed("bad integer in header".into()))
    };

    let width = next_token(&mut pos)?;
    let height = next_token(&mut pos)?;
    let maxval = next_token(&mut pos)?;
    if width == 0 || height == 0 {
        return Err(ImageIoError::ZeroSized);
    }
    if maxval == 0 || maxval > 255 {
        return Err(ImageIoError::UnsupportedFormat(format!(
            "PGM maxval {maxval} not supported (expected 1..=255)"
        )));
    }

    let count = width as usize * height as usize;
    let mut data = Vec::with_capacity(count);
    if ascii {
        for _ in 0..count {
            let v = next_token(&mut pos)?;
            if v > maxval {
                return Err(ImageIoError::Malformed("sample exceeds maxval".into()));
            }
            data.push(v as u8);
        }
    } else {
        // Exactly one whitespace byte separates the header from the raster.
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err(ImageIoError::Malformed("missing raster separator".into()));
        }
        pos += 1;
        if bytes.len() < pos + count {
            return Err(ImageIoError::Malformed("truncated raster data".into()));
        }
        data.extend_from_slice(&bytes[pos..pos + count]);
    }
    Ok(GrayImage {
        width,
        height,
        data,
    })
}

/// Serialize a grayscale buffer as binary PGM (P5, maxval 255). The header
/// layout is fixed so identical inputs produce byte-identical files.
pub fn pgm_bytes(width: u32, height: u32, data: &[u8]) -> Vec<u8> {
    assert_eq!(data.len(), width as usize * height as usize);
    let mut out = Vec::with_capacity(data.len() + 32);
    write!(out, "P5\n{width} {height}\n255\n").unwrap();
    out.extend_from_slice(data);
    out
}

/// Write a grayscale image, choosing the container by file extension:
/// `.png` encodes PNG, anything else binary PGM.
pub fn save_gray(path: &Path, width: u32, height: u32, data: &[u8]) -> Result<(), ImageIoError> {
    let is_png = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    if is_png {
        image::save_buffer(path, data, width, height, image::ColorType::L8)
            .map_err(|e| ImageIoError::Malformed(format!("png encode: {e}")))?;
    } else {
        fs::write(path, pgm_bytes(width, height, data))?;
    }
    Ok(())
}

/// Expand an edge map to a grayscale buffer: `on` for edge pixels, `off`
/// elsewhere.
pub fn edge_map_to_gray(map: &EdgeMap, on: u8, off: u8) -> Vec<u8> {
    let mut data = vec![off; map.width() as usize * map.height() as usize];
    for p in map.edge_pixels() {
        data[map.index(p)] = on;
    }
    data
}

/// Render the base edge pixels at 255 and each hit's supporting loop at
/// `hit_intensity`. Loop pixels outside the canvas are clipped; the base map
/// itself is not modified.
pub fn render_overlay(base: &EdgeMap, hits: &[CircleHit], hit_intensity: u8) -> Vec<u8> {
    let mut data = edge_map_to_gray(base, 255, 0);
    for hit in hits {
        for &p in &hit.pixels {
            if base.contains(i64::from(p.x), i64::from(p.y)) {
                data[base.index(p)] = hit_intensity;
            }
        }
    }
    data
}

/// Render an overlay and write it next to the detection run.
pub fn write_overlay(
    path: &Path,
    base: &EdgeMap,
    hits: &[CircleHit],
    hit_intensity: u8,
) -> Result<(), ImageIoError> {
    let data = render_overlay(base, hits, hit_intensity);
    save_gray(path, base.width(), base.height(), &data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::HitSource;

    fn write_temp(content: &[u8], ext: &str) -> tempfile::TempPath {
        let file = tempfile::Builder::new()
            .suffix(&format!(".{ext}"))
            .tempfile()
            .unwrap();
        fs::write(file.path(), content).unwrap();
        file.into_temp_path()
    }

    #[test]
    fn p2_all_black_yields_no_edges() {
        let path = write_temp(b"P2\n3 3\n255\n0 0 0 0 0 0 0 0 0\n", "pgm");
        let map = load_edge_map(&path, 128, false).unwrap();
        assert_eq!(map.edge_pixel_count(), 0);
        assert_eq!((map.width(), map.height()), (3, 3));
    }

    #[test]
    fn p2_center_pixel_thresholded() {
        let path = write_temp(b"P2\n3 3\n255\n0 0 0 0 255 0 0 0 0\n", "pgm");
        let map = load_edge_map(&path, 128, false).unwrap();
        assert_eq!(map.edge_pixel_count(), 1);
        assert!(map.get(PixelCoord::new(1, 1)));
    }

    #[test]
    fn invert_complements_the_threshold() {
        let path = write_temp(b"P2\n3 3\n255\n0 0 0 0 255 0 0 0 0\n", "pgm");
        let map = load_edge_map(&path, 128, true).unwrap();
        assert_eq!(map.edge_pixel_count(), 8);
        assert!(!map.get(PixelCoord::new(1, 1)));
    }

    #[test]
    fn p2_with_comments_parses() {
        let path = write_temp(b"P2\n# made by hand\n2 1\n# another\n255\n7 200\n", "pgm");
        let map = load_edge_map(&path, 128, false).unwrap();
        assert_eq!(map.edge_pixel_count(), 1);
        assert!(map.get(PixelCoord::new(1, 0)));
    }

    #[test]
    fn p5_round_trip_preserves_edge_set() {
        let data: Vec<u8> = (0..25u32).map(|i| if i % 3 == 0 { 255 } else { 0 }).collect();
        let bytes = pgm_bytes(5, 5, &data);
        let path = write_temp(&bytes, "pgm");
        let map = load_edge_map(&path, 128, false).unwrap();

        let gray = edge_map_to_gray(&map, 255, 0);
        let out = write_temp(&pgm_bytes(5, 5, &gray), "pgm");
        let map2 = load_edge_map(&out, 128, false).unwrap();
        assert_eq!(map, map2);
    }

    #[test]
    fn png_round_trip_preserves_edge_set() {
        let mut map = EdgeMap::new(8, 6).unwrap();
        map.set(PixelCoord::new(2, 3), true);
        map.set(PixelCoord::new(7, 5), true);
        let gray = edge_map_to_gray(&map, 255, 0);
        let file = tempfile::Builder::new().suffix(".png").tempfile().unwrap();
        save_gray(file.path(), 8, 6, &gray).unwrap();
        let back = load_edge_map(file.path(), 128, false).unwrap();
        assert_eq!(map, back);
    }

    #[test]
    fn garbage_is_unsupported() {
        let path = write_temp(b"GIF89a nope", "pgm");
        match load_edge_map(&path, 128, false) {
            Err(ImageIoError::UnsupportedFormat(_)) => {}
            other => panic!("expected UnsupportedFormat, got {other:?}"),
        }
    }

    #[test]
    fn truncated_p5_is_malformed() {
        let path = write_temp(b"P5\n4 4\n255\nabc", "pgm");
        match load_edge_map(&path, 128, false) {
            Err(ImageIoError::Malformed(_)) => {}
            other => panic!("expected Malformed, got {other:?}"),
        }
    }

    #[test]
    fn maxval_over_255_is_unsupported() {
        let path = write_temp(b"P2\n1 1\n65535\n1024\n", "pgm");
        assert!(matches!(
            load_edge_map(&path, 128, false),
            Err(ImageIoError::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn overlay_recolors_hit_loops_only() {
        let mut map = EdgeMap::new(4, 4).unwrap();
        map.set(PixelCoord::new(0, 0), true);
        map.set(PixelCoord::new(1, 1), true);

        // Empty hit list: output is just the base raster.
        let plain = render_overlay(&map, &[], 200);
        assert_eq!(plain, edge_map_to_gray(&map, 255, 0));

        let hit = CircleHit {
            cx: 1.0,
            cy: 1.0,
            r: 1.0,
            loop_length: 1,
            max_deviation: 0.0,
            source: HitSource::Standalone(0),
            pixels: vec![PixelCoord::new(1, 1)],
        };
        let data = render_overlay(&map, &[hit], 200);
        assert_eq!(data[0], 255);
        assert_eq!(data[5], 200);
        // Base untouched in memory.
        assert!(map.get(PixelCoord::new(1, 1)));
    }
}
