//! Uniform square grid over the offset variable `s ∈ C`.

use crate::{Error, Result, C64};

/// Square grid `center + (j − mid)·h + i(k − mid)·h` with `count` nodes per axis.
///
/// Values indexed `(row, col)` have the imaginary part varying with `row` and the real
/// part with `col`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SGrid {
    center: C64,
    extent: f64,
    count: usize,
}

impl SGrid {
    pub const MIN_COUNT: usize = 9;

    pub fn new(center: C64, extent: f64, count: usize) -> Result<Self> {
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::invalid(format!("s-grid extent must be positive and finite, got {extent}")));
        }
        if count < Self::MIN_COUNT || count.is_multiple_of(2) {
            return Err(Error::invalid(format!("s-grid count must be odd and ≥ 9, got {count}")));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::invalid("s-grid center must be finite"));
        }
        Ok(SGrid { center, extent, count })
    }

    /// Smallest grid with the given spacing whose half-width is at least `min_extent`.
    pub fn with_spacing(center: C64, min_extent: f64, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::invalid(format!("s-grid spacing must be positive, got {spacing}")));
        }
        let half = ((min_extent / spacing).ceil() as usize).max((Self::MIN_COUNT - 1) / 2);
        SGrid::new(center, half as f64 * spacing, 2 * half + 1)
    }

    pub fn center(&self) -> C64 {
        self.center
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn len(&self) -> usize {
        self.count * self.count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / (self.count - 1) as f64
    }

    fn mid(&self) -> usize {
        (self.count - 1) / 2
    }

    /// Offset of index `k` from the center along one axis; exactly zero at the middle.
    #[inline]
    pub fn axis(&self, k: usize) -> f64 {
        (k as f64 - self.mid() as f64) * self.spacing()
    }

    #[inline]
    pub fn point(&self, row: usize, col: usize) -> C64 {
        self.center + C64::new(self.axis(col), self.axis(row))
    }

    #[inline]
    pub fn flat(&self, row: usize, col: usize) -> usize {
        row * self.count + col
    }

    /// Fractional `(row, col)` coordinates of `s`.
    #[inline]
    pub fn fractional(&self, s: C64) -> (f64, f64) {
        let d = s - self.center;
        let h = self.spacing();
        let mid = self.mid() as f64;
        (d.im / h + mid, d.re / h + mid)
    }

    /// Every grid point in row-major order.
    pub fn points(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.len());
        for r in 0..self.count {
            for c in 0..self.count {
                out.push(self.point(r, c));
            }
        }
        out
    }

    /// Indices of `s·(−i)` for the node `(row, col)` of a grid centred at zero.
    #[inline]
    pub fn rotate_quarter(&self, row: usize, col: usize) -> (usize, usize) {
        (2 * self.mid() - col, row)
    }

    /// The grid with the spacing halved over the same extent.
    pub fn refined(&self) -> SGrid {
        SGrid { center: self.center, extent: self.extent, count: 2 * self.count - 1 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn includes_center_exactly() {
        let g = SGrid::new(C64::new(0.25, -1.0), 6.0, 129).unwrap();
        assert_eq!(g.point(64, 64), C64::new(0.25, -1.0));
        assert!((g.spacing() - 0.09375).abs() < 1e-15);
        assert!((g.point(0, 0) - C64::new(-5.75, -7.0)).norm() < 1e-12);
        let (r, c) = g.fractional(g.point(10, 100));
        assert!((r - 10.0).abs() < 1e-12 && (c - 100.0).abs() < 1e-12);
    }

    #[test]
    fn quarter_rotation_indices() {
        let g = SGrid::new(C64::new(0.0, 0.0), 2.0, 9).unwrap();
        for (r, c) in [(0, 0), (1, 7), (4, 4), (8, 3)] {
            let (r2, c2) = g.rotate_quarter(r, c);
            assert!((g.point(r2, c2) - g.point(r, c) * C64::new(0.0, -1.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SGrid::new(C64::new(0.0, 0.0), -1.0, 9).is_err());
        assert!(SGrid::new(C64::new(0.0, 0.0), 1.0, 7).is_err());
        assert!(SGrid::new(C64::new(0.0, 0.0), 1.0, 10).is_err());
    }

    #[test]
    fn with_spacing_covers_extent() {
        let g = SGrid::with_spacing(C64::new(0.0, 0.0), 1.03, 0.025).unwrap();
        assert!(g.extent() >= 1.03);
        assert!((g.spacing() - 0.025).abs() < 1e-15);
        assert_eq!(g.refined().count(), 2 * g.count() - 1);
    }
}
