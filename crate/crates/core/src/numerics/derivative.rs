//! Fourth-order Wirtinger finite differences in `s`.

use rayon::prelude::*;

use crate::numerics::Sinogram;
use crate::{Error, Result, C64};

/// Cells lost at each edge per differentiation pass.
pub const STENCIL_RING: usize = 2;

const D1: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0]; // / 12h
const D2: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0]; // / 12h²

/// `∂^{p+q} S / ∂s^p ∂s̄^q` with `∂_s = ½(∂_a − i∂_b)`, `∂_s̄ = ½(∂_a + i∂_b)`, built from
/// fourth-order central differences along `a = Re s` (columns) and `b = Im s` (rows).
///
/// Supports `p + q ≤ 2`. The result's valid region shrinks by two cells per edge.
pub fn s_derivative(sino: &Sinogram, p: u32, q: u32) -> Result<Sinogram> {
    if p + q > 2 {
        return Err(Error::invalid(format!("s-derivative of order {} not supported (max 2)", p + q)));
    }
    if p + q == 0 {
        return Ok(sino.clone());
    }
    let count = sino.sgrid.count();
    let margin = sino.margin + STENCIL_RING;
    if count < 2 * margin + 1 {
        return Err(Error::invalid(format!(
            "s-grid with {count} nodes per axis has no valid cells after differentiation"
        )));
    }
    let h = sino.sgrid.spacing();
    let n = sino.sgrid.len();
    let i = C64::i();
    let mut out = vec![C64::new(0.0, 0.0); sino.values.len()];
    out.par_chunks_mut(n).enumerate().for_each(|(node, dst)| {
        let src = sino.row(node);
        let at = |r: usize, c: usize| src[r * count + c];
        for r in margin..count - margin {
            for c in margin..count - margin {
                let da = || (0..5).fold(C64::new(0.0, 0.0), |acc, k| acc + at(r, c + k - 2) * D1[k]) / (12.0 * h);
                let db = || (0..5).fold(C64::new(0.0, 0.0), |acc, k| acc + at(r + k - 2, c) * D1[k]) / (12.0 * h);
                let daa =
                    || (0..5).fold(C64::new(0.0, 0.0), |acc, k| acc + at(r, c + k - 2) * D2[k]) / (12.0 * h * h);
                let dbb =
                    || (0..5).fold(C64::new(0.0, 0.0), |acc, k| acc + at(r + k - 2, c) * D2[k]) / (12.0 * h * h);
                let dab = || {
                    let mut acc = C64::new(0.0, 0.0);
                    for kr in 0..5 {
                        if D1[kr] == 0.0 {
                            continue;
                        }
                        for kc in 0..5 {
                            if D1[kc] == 0.0 {
                                continue;
                            }
                            acc += at(r + kr - 2, c + kc - 2) * (D1[kr] * D1[kc]);
                        }
                    }
                    acc / (144.0 * h * h)
                };
                dst[r * count + c] = match (p, q) {
                    (1, 0) => 0.5 * (da() - i * db()),
                    (0, 1) => 0.5 * (da() + i * db()),
                    (2, 0) => 0.25 * (daa() - dbb() - 2.0 * i * dab()),
                    (0, 2) => 0.25 * (daa() - dbb() + 2.0 * i * dab()),
                    (1, 1) => 0.25 * (daa() + dbb()),
                    _ => unreachable!(),
                };
            }
        }
    });
    let mut result = Sinogram {
        sphere: sino.sphere.clone(),
        sgrid: sino.sgrid,
        values: out,
        margin,
        provenance: sino.provenance.clone(),
    };
    result
        .provenance
        .insert("s_derivative".into(), serde_json::json!({ "p": p, "q": q, "scheme": "central-4th-order" }));
    result.check_finite("s_derivative")?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{SGrid, SphereGrid};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn sino<F: Fn(C64) -> C64>(extent: f64, count: usize, f: F) -> Sinogram {
        let sphere = Arc::new(SphereGrid::new(4, 4).unwrap());
        let sgrid = SGrid::new(C64::new(0.0, 0.0), extent, count).unwrap();
        Sinogram::from_fn(sphere, sgrid, |_, s| f(s)).unwrap()
    }

    fn max_valid_err(s: &Sinogram, exact: impl Fn(C64) -> C64) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..s.sgrid.count() {
            for c in 0..s.sgrid.count() {
                if s.is_valid_cell(r, c) {
                    m = m.max((s.get(0, r, c) - exact(s.sgrid.point(r, c))).norm());
                }
            }
        }
        m
    }

    #[test]
    fn constant_has_zero_derivatives() {
        let s = sino(1.0, 9, |_| C64::new(3.0, -1.0));
        for (p, q) in [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2)] {
            let d = s_derivative(&s, p, q).unwrap();
            assert_eq!(d.margin, 2);
            assert!(max_valid_err(&d, |_| C64::new(0.0, 0.0)) < 1e-12);
        }
    }

    #[test]
    fn quadratics_are_reproduced_exactly() {
        let s = sino(1.0, 11, |s| s * s.conj());
        let d = s_derivative(&s, 1, 1).unwrap();
        assert!(max_valid_err(&d, |_| C64::new(1.0, 0.0)) < 1e-10);
        let s2 = sino(1.0, 11, |s| s * s);
        let d2 = s_derivative(&s2, 2, 0).unwrap();
        assert!(max_valid_err(&d2, |_| C64::new(2.0, 0.0)) < 1e-10);
        let d2b = s_derivative(&s2, 0, 1).unwrap();
        assert!(max_valid_err(&d2b, |_| C64::new(0.0, 0.0)) < 1e-10);
        let d1 = s_derivative(&s2, 1, 0).unwrap();
        assert!(max_valid_err(&d1, |s| 2.0 * s) < 1e-10);
        let sb = sino(1.0, 11, |s| s.conj() * s.conj());
        let dsb = s_derivative(&sb, 0, 2).unwrap();
        assert!(max_valid_err(&dsb, |_| C64::new(2.0, 0.0)) < 1e-10);
    }

    #[test]
    fn gaussian_laplacian_converges_at_fourth_order() {
        let exact = |s: C64| C64::new(PI * (s.norm_sqr() - 1.0) * (-s.norm_sqr()).exp(), 0.0);
        let mut errs = Vec::new();
        let mut hs = Vec::new();
        for count in [33, 65, 129] {
            let s = sino(4.0, count, |s| C64::new(PI * (-s.norm_sqr()).exp(), 0.0));
            let d = s_derivative(&s, 1, 1).unwrap();
            errs.push(max_valid_err(&d, exact));
            hs.push(s.sgrid.spacing());
        }
        let slope = (errs[0].ln() - errs[2].ln()) / (hs[0].ln() - hs[2].ln());
        assert!((3.5..=4.5).contains(&slope), "slope {slope}, errors {errs:?}");
    }

    #[test]
    fn rejects_high_order_and_small_grids() {
        let s = sino(1.0, 9, |s| s);
        assert!(s_derivative(&s, 2, 1).is_err());
        let once = s_derivative(&s, 1, 0).unwrap();
        let twice = s_derivative(&once, 0, 1).unwrap();
        assert_eq!(twice.margin, 4);
        assert!(s_derivative(&twice, 1, 0).is_err());
    }
}
