//! Binary edge raster and pixel coordinates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A pixel position inside an [`EdgeMap`]. `x` is the column, `y` the row,
/// with `y` growing downward.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct PixelCoord {
    pub x: u32,
    pub y: u32,
}

impl PixelCoord {
    pub fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    pub fn fx(self) -> f64 {
        f64::from(self.x)
    }

    pub fn fy(self) -> f64 {
        f64::from(self.y)
    }

    /// Chebyshev adjacency: true when the two pixels differ by at most one
    /// in each coordinate (and are not the same pixel).
    pub fn is_adjacent8(self, other: PixelCoord) -> bool {
        let dx = (i64::from(self.x) - i64::from(other.x)).abs();
        let dy = (i64::from(self.y) - i64::from(other.y)).abs();
        dx <= 1 && dy <= 1 && (dx | dy) != 0
    }

    pub fn dist(self, other: PixelCoord) -> f64 {
        let dx = self.fx() - other.fx();
        let dy = self.fy() - other.fy();
        dx.hypot(dy)
    }
}

/// The eight neighbor offsets in clockwise order starting from north.
/// Every traversal in the crate scans neighbors in this order, which is what
/// makes exploration deterministic.
pub const NEIGHBOR_OFFSETS: [(i32, i32); 8] = [
    (0, -1),  // N
    (1, -1),  // NE
    (1, 0),   // E
    (1, 1),   // SE
    (0, 1),   // S
    (-1, 1),  // SW
    (-1, 0),  // W
    (-1, -1), // NW
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EdgeMapError {
    #[error("edge map dimensions must be at least 1x1")]
    ZeroSized,
}

/// A binary raster of edge pixels, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeMap {
    width: u32,
    height: u32,
    pixels: Vec<bool>,
}

impl EdgeMap {
    pub fn new(width: u32, height: u32) -> Result<Self, EdgeMapError> {
        if width == 0 || height == 0 {
            return Err(EdgeMapError::ZeroSized);
        }
        Ok(Self {
            width,
            height,
            pixels: vec![false; width as usize * height as usize],
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn index(&self, p: PixelCoord) -> usize {
        debug_assert!(p.x < self.width && p.y < self.height);
        p.y as usize * self.width as usize + p.x as usize
    }

    #[inline]
    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && x < i64::from(self.width) && y < i64::from(self.height)
    }

    #[inline]
    pub fn get(&self, p: PixelCoord) -> bool {
        self.pixels[self.index(p)]
    }

    #[inline]
    pub fn set(&mut self, p: PixelCoord, value: bool) {
        let i = self.index(p);
        self.pixels[i] = value;
    }

    /// Set a pixel addressed by signed coordinates, ignoring positions
    /// outside the canvas. Rasterizers use this to clip silently.
    pub fn set_clipped(&mut self, x: i64, y: i64) {
        if self.contains(x, y) {
            self.set(PixelCoord::new(x as u32, y as u32), true);
        }
    }

    /// Edge-pixel 8-neighbors of `p`, clockwise from north. Border pixels
    /// simply yield fewer neighbors.
    pub fn neighbors8(&self, p: PixelCoord) -> impl Iterator<Item = PixelCoord> + '_ {
        NEIGHBOR_OFFSETS.iter().filter_map(move |&(dx, dy)| {
            let x = i64::from(p.x) + i64::from(dx);
            let y = i64::from(p.y) + i64::from(dy);
            if self.contains(x, y) {
                let q = PixelCoord::new(x as u32, y as u32);
                if self.get(q) {
                    return Some(q);
                }
            }
            None
        })
    }

    /// All edge pixels in raster order (top-to-bottom, left-to-right).
    pub fn edge_pixels(&self) -> impl Iterator<Item = PixelCoord> + '_ {
        (0..self.height).flat_map(move |y| {
            (0..self.width).filter_map(move |x| {
                let p = PixelCoord::new(x, y);
                if self.get(p) {
                    Some(p)
                } else {
                    None
                }
            })
        })
    }

    pub fn edge_pixel_count(&self) -> usize {
        self.pixels.iter().filter(|&&b| b).count()
    }

    pub(crate) fn raw(&self) -> &[bool] {
        &self.pixels
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sized_rejected() {
        assert_eq!(EdgeMap::new(0, 4), Err(EdgeMapError::ZeroSized));
        assert_eq!(EdgeMap::new(4, 0), Err(EdgeMapError::ZeroSized));
    }

    #[test]
    fn neighbor_order_is_clockwise_from_north() {
        let mut map = EdgeMap::new(3, 3).unwrap();
        for y in 0..3 {
            for x in 0..3 {
                map.set(PixelCoord::new(x, y), true);
            }
        }
        let center = PixelCoord::new(1, 1);
        let got: Vec<(u32, u32)> = map.neighbors8(center).map(|p| (p.x, p.y)).collect();
        assert_eq!(
            got,
            vec![(1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1), (0, 0)]
        );
    }

    #[test]
    fn border_pixels_have_fewer_neighbors() {
        let mut map = EdgeMap::new(3, 3).unwrap();
        for y in 0..3 {
            for x in 0..3 {
                map.set(PixelCoord::new(x, y), true);
            }
        }
        assert_eq!(map.neighbors8(PixelCoord::new(0, 0)).count(), 3);
        assert_eq!(map.neighbors8(PixelCoord::new(1, 0)).count(), 5);
    }

    #[test]
    fn adjacency_is_symmetric_and_irreflexive() {
        let a = PixelCoord::new(4, 7);
        assert!(!a.is_adjacent8(a));
        let b = PixelCoord::new(5, 8);
        assert!(a.is_adjacent8(b));
        assert!(b.is_adjacent8(a));
        assert!(!a.is_adjacent8(PixelCoord::new(6, 7)));
    }
}
