//! `T_m = T ∗ α_m`, sampled in C² and on hyperplanes.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::json;

use crate::distributions::{DistTerm, Measure, Mollifier, TestDistribution};
use crate::numerics::convolution::{ConvolutionRule, CN_RULE};
use crate::numerics::gauss::gauss_legendre;
use crate::numerics::{convolve_s, s_derivative, QuadParams, SGrid, Sinogram, SphereGrid};
use crate::point::{sub, Point};
use crate::transform::radon::{forward_sinogram, ForwardQuadrature, VolumeGrid, VolumeSpec};
use crate::transform::SmoothFunction;
use crate::{Error, Result, C64};

/// `T ∗ α_m` evaluated pointwise.
#[derive(Clone, Debug)]
pub struct Mollified {
    pub dist: TestDistribution,
    pub alpha: Mollifier,
    rule: ConvolutionRule,
}

impl Mollified {
    pub fn new(dist: TestDistribution, alpha: Mollifier) -> Result<Self> {
        dist.validate()?;
        alpha.check_normalized()?;
        let sphere = SphereGrid::new(CN_RULE.1, CN_RULE.2)?;
        let rule = ConvolutionRule::new(|u| C64::new(alpha.value(u), 0.0), alpha.radius(), CN_RULE.0, &sphere)?;
        Ok(Mollified { dist, alpha, rule })
    }

    /// Point terms give `weight·∂^p∂̄^q α(z − z₀)`; densities give `(∂^p∂̄^q f) ∗ α`.
    pub fn value(&self, z: &Point) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for t in &self.dist.terms {
            acc += match &t.measure {
                Measure::Point { at, weight } => *weight * self.alpha.derivative(&sub(z, at), t.p, t.q)?,
                Measure::Density(f) => {
                    // Surface the error once; the rule closure cannot return it.
                    f.derivative(z, t.p, t.q)?;
                    self.rule.apply(|y| f.derivative(y, t.p, t.q).unwrap_or(C64::new(0.0, 0.0)), z)
                }
            };
        }
        Ok(acc)
    }
}

/// `T_m` on a volume grid, with the support check against `supp T + B̄(0, 1/m)`.
#[derive(Clone, Debug)]
pub struct MollifiedVolume {
    pub volume: VolumeGrid,
    /// Nodes farther than `1/m` from `supp T` carrying a nonzero value.
    pub support_violations: usize,
    /// Whether the support of `T` was known (all densities compactly supported).
    pub support_checked: bool,
}

pub fn mollify(t: &TestDistribution, m: u32, spec: VolumeSpec) -> Result<MollifiedVolume> {
    spec.validate()?;
    let alpha = Mollifier::new(m)?;
    if spec.spacing() > 0.25 * alpha.radius() {
        return Err(Error::invalid(format!(
            "volume spacing {} cannot resolve α_m: need spacing ≤ 1/(4m) = {}",
            spec.spacing(),
            0.25 * alpha.radius()
        )));
    }
    let moll = Mollified::new(t.clone(), alpha)?;
    let mut volume = VolumeGrid::from_fn(spec, |z| moll.value(z))?;
    let r = alpha.radius();
    let mut support_violations = 0;
    let support_checked = t.support_balls().is_some();
    if support_checked {
        for i in spec.active() {
            let z = spec.point(i);
            let d = t.support_distance(&z).unwrap_or(f64::INFINITY);
            if d > r * (1.0 + 1e-12) && volume.values[i] != C64::new(0.0, 0.0) {
                support_violations += 1;
            }
        }
    }
    volume.provenance.insert("distribution".into(), t.describe());
    volume.provenance.insert("mollifier".into(), json!({ "m": m, "constant": alpha.constant() }));
    volume.provenance.insert("support_violations".into(), json!(support_violations));
    Ok(MollifiedVolume { volume, support_violations, support_checked })
}

/// `α̂_m(w, s)`, independent of `w`: `(cπ/m²) ∫_{m²|s|²}^1 e^{−1/(1−x)} dx` for `|s| < 1/m`.
#[derive(Clone, Debug)]
pub struct BumpRadon {
    alpha: Mollifier,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl BumpRadon {
    const PANELS: usize = 8;

    pub fn new(alpha: Mollifier) -> Result<Self> {
        let rule = gauss_legendre(16)?;
        Ok(BumpRadon { alpha, nodes: rule.points, weights: rule.weights })
    }

    pub fn radius(&self) -> f64 {
        self.alpha.radius()
    }

    pub fn value(&self, s: C64) -> f64 {
        let m2 = (self.alpha.m() as f64).powi(2);
        let x0 = m2 * s.norm_sqr();
        if x0 >= 1.0 {
            return 0.0;
        }
        let h = (1.0 - x0) / Self::PANELS as f64;
        let mut total = 0.0;
        for k in 0..Self::PANELS {
            let a = x0 + k as f64 * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                let u = a + 0.5 * h * (x + 1.0);
                if u < 1.0 {
                    total += 0.5 * h * w * (-1.0 / (1.0 - u)).exp();
                }
            }
        }
        self.alpha.constant() * PI / m2 * total
    }
}

/// `R(T_m)` on `sphere × sgrid`.
///
/// Point terms integrate `weight·∂^p∂̄^q α(· − z₀)` over each hyperplane. Density terms use
/// `R(∂^p∂̄^q f) = w^p w̄^q ∂_s^{|p|}∂_s̄^{|q|} f̂` followed by `∗_s α̂_m`.
pub fn mollified_sinogram(
    t: &TestDistribution,
    alpha: Mollifier,
    sphere: Arc<SphereGrid>,
    sgrid: SGrid,
    quad: &QuadParams,
) -> Result<Sinogram> {
    t.validate()?;
    alpha.check_normalized()?;
    let kernel = BumpRadon::new(alpha)?;
    let mut out = Sinogram::zeros(sphere.clone(), sgrid);
    let mut densities: Vec<Sinogram> = Vec::new();
    for term in &t.terms {
        if let Measure::Density(f) = &term.measure {
            densities.push(density_sinogram(term, f, &kernel, sphere.clone(), sgrid, quad)?);
        }
    }
    out.margin = densities.iter().map(|d| d.margin).max().unwrap_or(0);
    for d in &densities {
        for (o, v) in out.values.iter_mut().zip(&d.values) {
            *o += v;
        }
    }
    let points: Vec<&DistTerm> = t.terms.iter().filter(|t| matches!(t.measure, Measure::Point { .. })).collect();
    if !points.is_empty() {
        let q = ForwardQuadrature::new(*quad)?;
        let pts = sgrid.points();
        let r = alpha.radius();
        let rows: Vec<Vec<C64>> = (0..sphere.len())
            .into_par_iter()
            .map(|i| {
                let w = sphere.node(i);
                pts.iter()
                    .map(|&s| {
                        let mut acc = C64::new(0.0, 0.0);
                        for term in &points {
                            let Measure::Point { at, weight } = &term.measure else { unreachable!() };
                            acc += *weight
                                * q.plane_integral(w, s, at, r, |z| {
                                    alpha.derivative(&sub(z, at), term.p, term.q).unwrap_or(C64::new(0.0, 0.0))
                                });
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let n = sgrid.len();
        for (i, row) in rows.iter().enumerate() {
            for (o, v) in out.values[i * n..(i + 1) * n].iter_mut().zip(row) {
                *o += v;
            }
        }
    }
    // Invalid cells hold zero.
    let n = sgrid.len();
    let count = sgrid.count();
    for i in 0..sphere.len() {
        for r in 0..count {
            for c in 0..count {
                if !out.is_valid_cell(r, c) {
                    out.values[i * n + r * count + c] = C64::new(0.0, 0.0);
                }
            }
        }
    }
    out.provenance.insert("source".into(), json!("mollified distribution"));
    out.provenance.insert("distribution".into(), t.describe());
    out.provenance.insert("mollifier".into(), json!({ "m": alpha.m() }));
    out.provenance.insert("quadrature".into(), json!({ "n_r": quad.n_r, "n_phi": quad.n_phi, "cutoff": quad.cutoff }));
    out.check_finite("mollified_sinogram")?;
    Ok(out)
}

fn density_sinogram(
    term: &DistTerm,
    f: &crate::transform::TestFunction,
    kernel: &BumpRadon,
    sphere: Arc<SphereGrid>,
    sgrid: SGrid,
    quad: &QuadParams,
) -> Result<Sinogram> {
    let base = forward_sinogram(f, sphere.clone(), sgrid, quad)?;
    let mut d = if term.order() == 0 {
        base
    } else {
        let mut d = s_derivative(&base, term.p[0] + term.p[1], term.q[0] + term.q[1])?;
        let n = sgrid.len();
        for i in 0..sphere.len() {
            let w = sphere.node(i);
            let factor = monomial(w, term.p, term.q);
            for v in &mut d.values[i * n..(i + 1) * n] {
                *v *= factor;
            }
        }
        d
    };
    d.provenance.insert("monomial".into(), json!({ "p": term.p, "q": term.q }));
    convolve_s(&d, |s| C64::new(kernel.value(s), 0.0), kernel.radius())
}

/// `w^p w̄^q`.
pub fn monomial(w: &Point, p: [u32; 2], q: [u32; 2]) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    for j in 0..2 {
        for _ in 0..p[j] {
            acc *= w[j];
        }
        for _ in 0..q[j] {
            acc *= w[j].conj();
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::PolarRule;
    use crate::point::ORIGIN;
    use crate::transform::TestFunction;

    #[test]
    fn bump_radon_has_unit_mass() {
        for m in [1, 4, 10] {
            let k = BumpRadon::new(Mollifier::new(m).unwrap()).unwrap();
            let rule = PolarRule::disk(k.radius(), 48, 16).unwrap();
            let mass: f64 = rule.points.iter().zip(&rule.weights).map(|(s, w)| k.value(*s) * w).sum();
            assert!((mass - 1.0).abs() < 1e-8, "m={m}: {mass}");
            assert_eq!(k.value(C64::new(k.radius(), 0.0)), 0.0);
        }
    }

    #[test]
    fn bump_radon_matches_plane_integral() {
        let alpha = Mollifier::new(2).unwrap();
        let k = BumpRadon::new(alpha).unwrap();
        let q = ForwardQuadrature::new(QuadParams { n_r: 48, n_phi: 16, cutoff: 1.0 }).unwrap();
        let w = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        for s in [C64::new(0.0, 0.0), C64::new(0.2, -0.1), C64::new(0.0, 0.45)] {
            let direct = q.plane_integral(&w, s, &ORIGIN, alpha.radius(), |z| C64::new(alpha.value(z), 0.0));
            assert!((direct.re - k.value(s)).abs() < 1e-6 * k.value(C64::new(0.0, 0.0)), "{s}");
        }
    }

    #[test]
    fn mollified_delta_is_translated_bump() {
        let z0 = [C64::new(0.3, 0.0), C64::new(0.0, -0.2)];
        let alpha = Mollifier::new(5).unwrap();
        let m = Mollified::new(TestDistribution::delta(z0, C64::new(1.0, 0.0)), alpha).unwrap();
        let z = [C64::new(0.35, 0.05), C64::new(0.0, -0.22)];
        assert_eq!(m.value(&z).unwrap().re, alpha.value(&sub(&z, &z0)));
    }

    #[test]
    fn mollify_support_and_mass() {
        let spec = VolumeSpec { extent: 0.25, count: 41, mask_radius: None };
        let out = mollify(&TestDistribution::delta(ORIGIN, C64::new(1.0, 0.0)), 5, spec).unwrap();
        assert!(out.support_checked);
        assert_eq!(out.support_violations, 0);
        let h = spec.spacing();
        let mass: f64 = out.volume.values.iter().map(|v| v.re).sum::<f64>() * h.powi(4);
        assert!((mass - 1.0).abs() < 1e-6, "{mass}");
        for i in 0..spec.len() {
            if crate::point::norm(&spec.point(i)) > 0.2 {
                assert_eq!(out.volume.values[i], C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn mollify_rejects_coarse_grid() {
        let spec = VolumeSpec { extent: 1.0, count: 9, mask_radius: None };
        assert!(mollify(&TestDistribution::delta(ORIGIN, C64::new(1.0, 0.0)), 5, spec).is_err());
    }

    #[test]
    fn point_term_sinogram_matches_bump_radon() {
        let alpha = Mollifier::new(4).unwrap();
        let k = BumpRadon::new(alpha).unwrap();
        let z0 = [C64::new(0.2, 0.1), C64::new(-0.1, 0.0)];
        let t = TestDistribution::delta(z0, C64::new(2.0, 0.0));
        let sphere = Arc::new(SphereGrid::new(4, 4).unwrap());
        let sgrid = SGrid::new(C64::new(0.0, 0.0), 0.6, 25).unwrap();
        let quad = QuadParams { n_r: 48, n_phi: 16, cutoff: 1.0 };
        let sino = mollified_sinogram(&t, alpha, sphere.clone(), sgrid, &quad).unwrap();
        let peak = k.value(C64::new(0.0, 0.0));
        for i in 0..sphere.len() {
            let c = crate::point::pairing(&z0, sphere.node(i));
            for r in 0..25 {
                for col in 0..25 {
                    let exact = 2.0 * k.value(sgrid.point(r, col) - c);
                    assert!((sino.get(i, r, col).re - exact).abs() < 1e-6 * peak);
                }
            }
        }
    }

    #[test]
    fn density_sinogram_is_forward_of_mollified_function() {
        // Radon of (bump ∗ α) at one hyperplane, against a direct plane integral of the
        // mollified density.
        let alpha = Mollifier::new(4).unwrap();
        let f = TestFunction::bump(ORIGIN, 0.4).unwrap();
        let t = TestDistribution::density(f).unwrap();
        let sphere = Arc::new(SphereGrid::new(4, 4).unwrap());
        let sgrid = SGrid::new(C64::new(0.0, 0.0), 1.0, 81).unwrap();
        let quad = QuadParams { n_r: 32, n_phi: 16, cutoff: 1.0 };
        let sino = mollified_sinogram(&t, alpha, sphere.clone(), sgrid, &quad).unwrap();
        let moll = Mollified::new(t, alpha).unwrap();
        let q = ForwardQuadrature::new(QuadParams { n_r: 16, n_phi: 12, cutoff: 1.0 }).unwrap();
        let (r, c) = (40, 46);
        let s = sgrid.point(r, c);
        let direct = q.plane_integral(sphere.node(5), s, &ORIGIN, 0.65, |z| moll.value(z).unwrap());
        let got = sino.get(5, r, c);
        assert!((got - direct).norm() < 2e-3 * sino.max_abs(), "{got} vs {direct}");
        assert!(moll.value(&[C64::new(0.66, 0.0), C64::new(0.0, 0.0)]).unwrap() == C64::new(0.0, 0.0));
    }
}
