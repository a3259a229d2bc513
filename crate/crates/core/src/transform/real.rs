//! The real Radon transform over `{z : Re⟨z, w̄⟩ = t}` ⊂ R⁴, obtained from the complex
//! sinogram by integrating along `s = t + ix`, and directly by 3D quadrature.

use serde::{Deserialize, Serialize};
use crate::numerics::{gauss_legendre, pairwise_sum, PolarRule, Sinogram};
use crate::numerics::profile::monomial_radial_value;
use crate::point::{hermitian, Point};
use crate::transform::TestFunction;
use crate::{Error, Result, C64};

/// `R_ℝT(w, t) = ∫ T̂(w̄, t + ix) dx` for the sphere node `node` (`w = nodes[node]`),
/// truncated to `|x| ≤ truncation`.
///
/// Trapezoid rule over the s-grid rows; cubic Lagrange interpolation across columns
/// when `t` is not a grid abscissa.
pub fn real_radon_from_complex(sino: &Sinogram, node: usize, t: f64, truncation: f64) -> Result<C64> {
    if node >= sino.node_count() {
        return Err(Error::invalid(format!("sphere node {node} out of range")));
    }
    let g = &sino.sgrid;
    let h = g.spacing();
    let count = g.count();
    let lo = sino.margin;
    let hi = count - 1 - sino.margin;
    let x_lo = g.center().im + g.axis(lo);
    let x_hi = g.center().im + g.axis(hi);
    if !(truncation > 0.0) || -truncation < x_lo - 1e-12 || truncation > x_hi + 1e-12 {
        return Err(Error::invalid(format!(
            "truncation bound {truncation} exceeds the valid s-region [{x_lo}, {x_hi}] along Im s"
        )));
    }
    let conj = sino.sphere.conjugate(node);
    let (_, fc) = g.fractional(C64::new(t, g.center().im));
    // Column stencil: exact column, or four columns around `fc`.
    let stencil: Vec<(usize, f64)> = if (fc - fc.round()).abs() < 1e-9 {
        let c = fc.round();
        if c < lo as f64 || c > hi as f64 {
            return Err(Error::invalid(format!("Re s = {t} lies outside the valid s-region")));
        }
        vec![(c as usize, 1.0)]
    } else {
        let c0 = fc.floor() as isize - 1;
        if c0 < lo as isize || c0 + 3 > hi as isize {
            return Err(Error::invalid(format!("Re s = {t} is too close to the edge of the valid s-region")));
        }
        let x = fc - c0 as f64;
        let l = |k: f64| {
            (0..4).filter(|&j| j as f64 != k).map(|j| (x - j as f64) / (k - j as f64)).product::<f64>()
        };
        (0..4).map(|k| ((c0 + k) as usize, l(k as f64))).collect()
    };
    let mut terms = Vec::new();
    for row in lo..=hi {
        let x = g.center().im + g.axis(row);
        if x.abs() > truncation + 1e-12 {
            continue;
        }
        let weight = if (x.abs() - truncation).abs() < 1e-9 { 0.5 * h } else { h };
        let v: C64 = stencil.iter().map(|&(c, l)| sino.get(conj, row, c) * l).sum();
        terms.push(v * weight);
    }
    Ok(pairwise_sum(&terms))
}

/// Quadrature sizes for the direct real Radon transform.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RealQuadParams {
    pub n_x: usize,
    pub n_r: usize,
    pub n_phi: usize,
    pub cutoff: f64,
}

impl Default for RealQuadParams {
    fn default() -> Self {
        RealQuadParams { n_x: 32, n_r: 24, n_phi: 24, cutoff: 6.0 }
    }
}

impl RealQuadParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_x == 0 || self.n_r == 0 || self.n_phi == 0 {
            return Err(Error::invalid("real quadrature needs n_x, n_r and n_phi ≥ 1"));
        }
        crate::error::ensure_positive("cutoff", self.cutoff)
    }
}

/// Direct 3D quadrature of `f` over `{z : Re⟨z, w̄⟩ = t}` for a unit `w`, parametrised
/// isometrically as `z = (t + ix)·w + τ·η′` with `η′ = (−w̄₂, w̄₁)`.
pub fn real_radon_direct(f: &TestFunction, w: &Point, t: f64, params: &RealQuadParams) -> Result<C64> {
    let eta = [-w[1].conj(), w[0].conj()];
    let line = gauss_legendre(params.n_x)?;
    let disk = PolarRule::disk(1.0, params.n_r, params.n_phi)?;
    let mut total = C64::new(0.0, 0.0);
    for term in &f.terms {
        let proj = hermitian(&term.center, w);
        let tau_c = hermitian(&term.center, &eta);
        let dt = t - proj.re;
        let half = match term.profile.support_radius() {
            Some(rho) => {
                if dt.abs() >= rho {
                    continue;
                }
                (rho * rho - dt * dt).sqrt().min(term.effective_radius(params.cutoff))
            }
            None => term.effective_radius(params.cutoff),
        };
        let xs = line.mapped(proj.im - half, proj.im + half);
        let mut slabs = Vec::with_capacity(xs.len());
        for (x, wx) in xs.points.iter().zip(&xs.weights) {
            let mut rings = Vec::with_capacity(params.n_r);
            for ring in disk.points.chunks(params.n_phi).zip(disk.weights.chunks(params.n_phi)) {
                let mut acc = C64::new(0.0, 0.0);
                for (p, wt) in ring.0.iter().zip(ring.1) {
                    let tau = tau_c + p * half;
                    let a = C64::new(t, *x);
                    let z = [a * w[0] + tau * eta[0], a * w[1] + tau * eta[1]];
                    let dz = [z[0] - term.center[0], z[1] - term.center[1]];
                    acc += monomial_radial_value(&dz, &term.a, &term.b, &term.profile) * *wt;
                }
                rings.push(acc);
            }
            slabs.push(pairwise_sum(&rings) * (half * half) * *wx);
        }
        total += term.amplitude * pairwise_sum(&slabs);
    }
    if !(total.re.is_finite() && total.im.is_finite()) {
        return Err(Error::NonFinite { op: "real_radon_direct", location: format!("t = {t}") });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{QuadParams, SGrid, SphereGrid};
    use crate::transform::forward_sinogram;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn direct_gaussian_slice() {
        let f = TestFunction::unit_gaussian();
        let w = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        for t in [0.0, 0.7, -1.3] {
            let v = real_radon_direct(&f, &w, t, &RealQuadParams::default()).unwrap();
            assert!((v.re - PI.powf(1.5) * (-t * t).exp()).abs() < 1e-8, "{v}");
        }
    }

    #[test]
    fn bridge_on_analytic_sinogram() {
        let sphere = Arc::new(SphereGrid::new(4, 4).unwrap());
        let sgrid = SGrid::new(C64::new(0.0, 0.0), 5.0, 101).unwrap();
        let sino = Sinogram::from_fn(sphere, sgrid, |_, s| C64::new(PI * (-s.norm_sqr()).exp(), 0.0)).unwrap();
        let v = real_radon_from_complex(&sino, 3, 0.0, 5.0).unwrap();
        assert!((v.re - PI.powf(1.5)).abs() < 1e-10);
        let off = real_radon_from_complex(&sino, 3, 0.53, 5.0).unwrap();
        assert!((off.re - PI.powf(1.5) * (-0.53f64 * 0.53).exp()).abs() < 1e-5, "{off}");
        assert!(real_radon_from_complex(&sino, 3, 0.0, 6.0).is_err());
    }

    #[test]
    fn zero_sinogram_gives_zero() {
        let sphere = Arc::new(SphereGrid::new(4, 4).unwrap());
        let sgrid = SGrid::new(C64::new(0.0, 0.0), 2.0, 21).unwrap();
        let sino = crate::numerics::Sinogram::zeros(sphere, sgrid);
        assert_eq!(real_radon_from_complex(&sino, 0, 0.2, 2.0).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn bump_real_radon_vanishes_beyond_support() {
        let f = TestFunction::bump(crate::point::ORIGIN, 0.5).unwrap();
        let sphere = Arc::new(SphereGrid::new(4, 4).unwrap());
        let sgrid = SGrid::new(C64::new(0.0, 0.0), 1.0, 21).unwrap();
        let sino = forward_sinogram(&f, sphere.clone(), sgrid, &QuadParams::default()).unwrap();
        for t in [0.5, 0.6, -0.8] {
            assert_eq!(real_radon_from_complex(&sino, 5, t, 1.0).unwrap(), C64::new(0.0, 0.0));
            let w = sphere.node(5);
            assert_eq!(real_radon_direct(&f, w, t, &RealQuadParams::default()).unwrap(), C64::new(0.0, 0.0));
        }
    }
}
