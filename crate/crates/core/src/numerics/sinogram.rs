//! Sampled functions on S³ × C.

use std::sync::Arc;

use serde_json::{Map, Value};

use crate::numerics::{SGrid, SphereGrid};
use crate::{Error, Result, C64};

/// Complex samples indexed by (sphere node, s-row, s-col).
///
/// `margin` counts the cells at each edge of the s-grid whose values are not valid
/// (finite-difference rings, convolution shrinkage). Invalid cells hold zero.
#[derive(Clone, Debug)]
pub struct Sinogram {
    pub sphere: Arc<SphereGrid>,
    pub sgrid: SGrid,
    pub values: Vec<C64>,
    pub margin: usize,
    pub provenance: Map<String, Value>,
}

impl Sinogram {
    pub fn zeros(sphere: Arc<SphereGrid>, sgrid: SGrid) -> Self {
        let len = sphere.len() * sgrid.len();
        Sinogram { sphere, sgrid, values: vec![C64::new(0.0, 0.0); len], margin: 0, provenance: Map::new() }
    }

    /// Builds a sinogram by evaluating `f(w, s)` at every node.
    pub fn from_fn<F>(sphere: Arc<SphereGrid>, sgrid: SGrid, f: F) -> Result<Self>
    where
        F: Fn(&crate::Point, C64) -> C64,
    {
        let pts = sgrid.points();
        let mut values = Vec::with_capacity(sphere.len() * pts.len());
        for w in sphere.nodes() {
            values.extend(pts.iter().map(|&s| f(w, s)));
        }
        let out = Sinogram { sphere, sgrid, values, margin: 0, provenance: Map::new() };
        out.check_finite("from_fn")?;
        Ok(out)
    }

    pub fn node_count(&self) -> usize {
        self.sphere.len()
    }

    pub fn row(&self, node: usize) -> &[C64] {
        let n = self.sgrid.len();
        &self.values[node * n..(node + 1) * n]
    }

    #[inline]
    pub fn get(&self, node: usize, row: usize, col: usize) -> C64 {
        self.values[node * self.sgrid.len() + self.sgrid.flat(row, col)]
    }

    pub fn is_valid_cell(&self, row: usize, col: usize) -> bool {
        let hi = self.sgrid.count() - 1 - self.margin;
        row >= self.margin && col >= self.margin && row <= hi && col <= hi
    }

    /// Half-width of the valid square around the grid center.
    pub fn valid_extent(&self) -> f64 {
        self.sgrid.extent() - self.margin as f64 * self.sgrid.spacing()
    }

    /// Bilinear interpolation at `s` for one node. All four corners must be valid.
    pub fn interpolate(&self, node: usize, s: C64) -> Option<C64> {
        let (fr, fc) = self.sgrid.fractional(s);
        let lo = self.margin as f64;
        let hi = (self.sgrid.count() - 1 - self.margin) as f64;
        if !(fr >= lo && fc >= lo && fr <= hi && fc <= hi) {
            return None;
        }
        let r0 = (fr.floor() as usize).min(self.sgrid.count() - 2 - self.margin);
        let c0 = (fc.floor() as usize).min(self.sgrid.count() - 2 - self.margin);
        let tr = fr - r0 as f64;
        let tc = fc - c0 as f64;
        let v00 = self.get(node, r0, c0);
        let v01 = self.get(node, r0, c0 + 1);
        let v10 = self.get(node, r0 + 1, c0);
        let v11 = self.get(node, r0 + 1, c0 + 1);
        Some((v00 * (1.0 - tc) + v01 * tc) * (1.0 - tr) + (v10 * (1.0 - tc) + v11 * tc) * tr)
    }

    /// Largest modulus over valid cells.
    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for node in 0..self.node_count() {
            for r in 0..self.sgrid.count() {
                for c in 0..self.sgrid.count() {
                    if self.is_valid_cell(r, c) {
                        m = m.max(self.get(node, r, c).norm());
                    }
                }
            }
        }
        m
    }

    pub fn check_finite(&self, op: &'static str) -> Result<()> {
        if let Some(i) = self.values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            let n = self.sgrid.len();
            return Err(Error::NonFinite { op, location: format!("node {}, s-index {}", i / n, i % n) });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bilinear_reproduces_affine_functions() {
        let sphere = Arc::new(SphereGrid::new(4, 4).unwrap());
        let sgrid = SGrid::new(C64::new(0.0, 0.0), 1.0, 9).unwrap();
        let f = |_: &crate::Point, s: C64| C64::new(2.0, 1.0) * s + C64::new(0.5, 0.0) + s.conj();
        let sino = Sinogram::from_fn(sphere, sgrid, f).unwrap();
        let s = C64::new(0.33, -0.71);
        let v = sino.interpolate(3, s).unwrap();
        assert!((v - f(&[C64::new(0.0, 0.0); 2], s)).norm() < 1e-13);
        assert!(sino.interpolate(0, C64::new(1.2, 0.0)).is_none());
        assert!(sino.interpolate(0, C64::new(1.0, 1.0)).is_some());
    }
}
