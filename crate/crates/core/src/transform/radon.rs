//! Forward transform, dual transform, inversion and calibration of `c₂`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::json;

use crate::geometry::Hyperplane;
use crate::numerics::profile::monomial_radial_value;
use crate::numerics::{pairwise_sum, s_derivative, PolarRule, QuadParams, SGrid, Sinogram, SphereGrid};
use crate::point::{fmt_point, norm, norm_sqr, pairing, Point};
use crate::transform::{SmoothFunction, Term, TestFunction};
use crate::error::{ensure, ensure_positive};
use crate::{Error, Result, C64};

/// Hyperplane quadrature for the forward transform: a polar rule on the unit disk,
/// rescaled per term to the part of the hyperplane carrying that term.
#[derive(Clone, Debug)]
pub struct ForwardQuadrature {
    pub params: QuadParams,
    unit: PolarRule,
}

impl ForwardQuadrature {
    pub fn new(params: QuadParams) -> Result<Self> {
        params.validate()?;
        Ok(ForwardQuadrature { params, unit: PolarRule::disk(1.0, params.n_r, params.n_phi)? })
    }

    /// Integral of one term over `{⟨z, w⟩ = s}` for a unit `w`.
    fn term(&self, t: &Term, w: &Point, s: C64) -> C64 {
        let d = (s - pairing(&t.center, w)).norm();
        let radius = match t.profile.support_radius() {
            Some(rho) => {
                if d >= rho {
                    return C64::new(0.0, 0.0);
                }
                (rho * rho - d * d).sqrt().min(t.effective_radius(self.params.cutoff))
            }
            None => t.effective_radius(self.params.cutoff),
        };
        // Frame centred at the foot of the term's centre on the hyperplane.
        let eta = [-w[1], w[0]];
        let base_minus_c = [(s - pairing(&t.center, w)) * w[0].conj(), (s - pairing(&t.center, w)) * w[1].conj()];
        let n_phi = self.params.n_phi;
        let mut rings = Vec::with_capacity(self.params.n_r);
        for ring in self.unit.points.chunks(n_phi).zip(self.unit.weights.chunks(n_phi)) {
            let mut acc = C64::new(0.0, 0.0);
            for (p, wt) in ring.0.iter().zip(ring.1) {
                let tt = p * radius;
                let dz = [base_minus_c[0] + tt * eta[0], base_minus_c[1] + tt * eta[1]];
                acc += monomial_radial_value(&dz, &t.a, &t.b, &t.profile) * *wt;
            }
            rings.push(acc);
        }
        t.amplitude * pairwise_sum(&rings) * (radius * radius)
    }

    /// `∫ g dλ` over `{⟨z, w⟩ = s} ∩ B̄(center, radius)` for a unit `w`, where `g`
    /// vanishes outside that ball.
    pub fn plane_integral<G>(&self, w: &Point, s: C64, center: &Point, radius: f64, g: G) -> C64
    where
        G: Fn(&Point) -> C64,
    {
        let d = (s - pairing(center, w)).norm();
        if d >= radius {
            return C64::new(0.0, 0.0);
        }
        let disk = (radius * radius - d * d).sqrt();
        let eta = [-w[1], w[0]];
        let off = s - pairing(center, w);
        let base = [center[0] + off * w[0].conj(), center[1] + off * w[1].conj()];
        let n_phi = self.params.n_phi;
        let mut rings = Vec::with_capacity(self.params.n_r);
        for ring in self.unit.points.chunks(n_phi).zip(self.unit.weights.chunks(n_phi)) {
            let mut acc = C64::new(0.0, 0.0);
            for (p, wt) in ring.0.iter().zip(ring.1) {
                let t = p * disk;
                acc += g(&[base[0] + t * eta[0], base[1] + t * eta[1]]) * *wt;
            }
            rings.push(acc);
        }
        pairwise_sum(&rings) * (disk * disk)
    }

    /// `φ̂(w, s)` for a unit `w`.
    pub fn unit_normal(&self, f: &TestFunction, w: &Point, s: C64) -> C64 {
        f.terms.iter().map(|t| self.term(t, w, s)).sum()
    }
}

/// `φ̂(ξ, s) = |ξ|⁻² ∫_{⟨z,ξ⟩=s} φ dλ` for any nonzero `ξ`.
pub fn forward(f: &TestFunction, h: &Hyperplane, params: &QuadParams) -> Result<C64> {
    let q = ForwardQuadrature::new(*params)?;
    forward_with(&q, f, h)
}

pub fn forward_with(q: &ForwardQuadrature, f: &TestFunction, h: &Hyperplane) -> Result<C64> {
    let r2 = norm_sqr(&h.normal);
    let u = h.normalized();
    let v = q.unit_normal(f, &u.normal, u.offset) / r2;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::NonFinite { op: "forward", location: format!("ξ = {}, s = {}", fmt_point(&h.normal), h.offset) });
    }
    Ok(v)
}

/// `values[i, j] = φ̂(node_i, s_j)`.
///
/// When the s-grid is centred at zero and `n_theta` is a multiple of four, only nodes
/// with `θ₁ < π/2` are integrated: `(w·iᵏ, s)` and `(w, s·i⁻ᵏ)` are the same hyperplane,
/// and `s ↦ s·i⁻ᵏ` permutes the grid.
pub fn forward_sinogram(f: &TestFunction, sphere: Arc<SphereGrid>, sgrid: SGrid, params: &QuadParams) -> Result<Sinogram> {
    let q = ForwardQuadrature::new(*params)?;
    let pts = sgrid.points();
    let nt = sphere.n_theta();
    let symmetric = sgrid.center() == C64::new(0.0, 0.0) && nt.is_multiple_of(4);
    let quarter = nt / 4;
    let computed: Vec<usize> =
        (0..sphere.len()).filter(|&i| !symmetric || sphere.split_index(i).1 < quarter).collect();
    let rows: Vec<Vec<C64>> =
        computed.par_iter().map(|&i| pts.iter().map(|&s| q.unit_normal(f, sphere.node(i), s)).collect()).collect();
    let n = sgrid.len();
    let count = sgrid.count();
    let mut values = vec![C64::new(0.0, 0.0); sphere.len() * n];
    for (&i, row) in computed.iter().zip(&rows) {
        values[i * n..(i + 1) * n].copy_from_slice(row);
        if !symmetric {
            continue;
        }
        let mut prev = row.clone();
        for k in 1..4 {
            // value(w·iᵏ, s) = value(w·iᵏ⁻¹, s·(−i)).
            let j = sphere.phase_shifted(i, k * quarter);
            let mut next = vec![C64::new(0.0, 0.0); n];
            for r in 0..count {
                for c in 0..count {
                    let (r2, c2) = sgrid.rotate_quarter(r, c);
                    next[r * count + c] = prev[r2 * count + c2];
                }
            }
            values[j * n..(j + 1) * n].copy_from_slice(&next);
            prev = next;
        }
    }
    let mut sino = Sinogram::zeros(sphere, sgrid);
    sino.values = values;
    sino.provenance.insert("source".into(), json!("forward quadrature"));
    sino.provenance.insert("function".into(), f.describe());
    sino.provenance.insert("quadrature".into(), json!({ "n_r": params.n_r, "n_phi": params.n_phi, "cutoff": params.cutoff }));
    sino.provenance.insert("phase_fill".into(), json!(symmetric));
    sino.check_finite("forward_sinogram")?;
    Ok(sino)
}

/// `[R*f](z) = ∫_{S³} f(w, ⟨z, w⟩) dσ(w)` for a function on X.
pub fn dual_fn<F>(f: F, z: &Point, sphere: &SphereGrid) -> Result<C64>
where
    F: Fn(&Point, C64) -> C64,
{
    sphere.integrate(|_, w| Ok(f(w, pairing(z, w))))
}

/// `R*` of a sinogram at `z`, with bilinear interpolation in `s`.
pub fn dual(sino: &Sinogram, z: &Point) -> Result<C64> {
    sino.sphere.integrate(|i, w| {
        let s = pairing(z, w);
        sino.interpolate(i, s).ok_or_else(|| Error::OutsideValidRegion { point: fmt_point(z), s: format!("{s}") })
    })
}

/// A regular grid over C² ≅ R⁴ with `count` nodes per real axis on `[−extent, extent]`,
/// optionally restricted to the ball `|z| ≤ mask_radius`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VolumeSpec {
    pub extent: f64,
    pub count: usize,
    pub mask_radius: Option<f64>,
}

impl Default for VolumeSpec {
    fn default() -> Self {
        VolumeSpec { extent: 2.0, count: 9, mask_radius: Some(2.0) }
    }
}

impl VolumeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.extent > 0.0 && self.extent.is_finite()) || self.count < 2 {
            return Err(Error::invalid(format!(
                "volume grid needs a positive extent and at least 2 nodes per axis, got {} and {}",
                self.extent, self.count
            )));
        }
        if let Some(r) = self.mask_radius {
            if !(r > 0.0) {
                return Err(Error::invalid("volume mask radius must be positive"));
            }
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / (self.count - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.count.pow(4)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, idx: usize) -> Point {
        let n = self.count;
        let x = |k: usize| -self.extent + k as f64 * self.spacing();
        let (a, b, c, d) = (idx / (n * n * n), (idx / (n * n)) % n, (idx / n) % n, idx % n);
        [C64::new(x(a), x(b)), C64::new(x(c), x(d))]
    }

    pub fn in_mask(&self, z: &Point) -> bool {
        self.mask_radius.is_none_or(|r| norm(z) <= r + 1e-12)
    }

    /// Indices of grid nodes inside the mask.
    pub fn active(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.in_mask(&self.point(i))).collect()
    }
}

/// Samples on a [`VolumeSpec`]; nodes outside the mask hold zero.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeGrid {
    pub spec: VolumeSpec,
    pub values: Vec<C64>,
    pub provenance: serde_json::Map<String, serde_json::Value>,
}

impl VolumeGrid {
    pub fn from_fn<F>(spec: VolumeSpec, f: F) -> Result<Self>
    where
        F: Fn(&Point) -> Result<C64> + Sync,
    {
        spec.validate()?;
        let active = spec.active();
        let vals: Vec<C64> = active.par_iter().map(|&i| f(&spec.point(i))).collect::<Result<_>>()?;
        let mut values = vec![C64::new(0.0, 0.0); spec.len()];
        for (i, v) in active.iter().zip(vals) {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { op: "volume", location: fmt_point(&spec.point(*i)) });
            }
            values[*i] = v;
        }
        Ok(VolumeGrid { spec, values, provenance: serde_json::Map::new() })
    }

    /// `max |self − f| / max |f|` over the mask.
    pub fn relative_error<F: Fn(&Point) -> C64>(&self, f: F) -> f64 {
        let (mut err, mut scale) = (0.0f64, 0.0f64);
        for i in self.spec.active() {
            let exact = f(&self.spec.point(i));
            err = err.max((self.values[i] - exact).norm());
            scale = scale.max(exact.norm());
        }
        if scale == 0.0 {
            err
        } else {
            err / scale
        }
    }

    /// Node of largest modulus.
    pub fn argmax(&self) -> Point {
        let mut best = (0, -1.0);
        for i in self.spec.active() {
            let v = self.values[i].norm();
            if v > best.1 {
                best = (i, v);
            }
        }
        self.spec.point(best.0)
    }
}

/// `φ(z) = (−1)^{n−1} c₂ R*(∂²φ̂/∂s∂s̄)(z)` on the target grid.
pub fn invert(sino: &Sinogram, spec: VolumeSpec, c2: f64) -> Result<VolumeGrid> {
    let psi = s_derivative(sino, 1, 1)?;
    let mut vol = VolumeGrid::from_fn(spec, |z| Ok(-c2 * dual(&psi, z)?))?;
    vol.provenance = sino.provenance.clone();
    vol.provenance.insert("inversion".into(), json!({ "c2": c2, "filter": "s_derivative(1,1)" }));
    Ok(vol)
}

/// Analytic value of the inversion constant for n = 2.
pub const C2_ANALYTIC: f64 = 1.0 / (2.0 * PI * PI * PI);

/// Resolutions of the calibration pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationParams {
    pub n_eta: usize,
    pub n_theta: usize,
    pub spacing: f64,
    pub quad: QuadParams,
    pub radii: Vec<f64>,
}

impl Default for CalibrationParams {
    fn default() -> Self {
        CalibrationParams {
            n_eta: 8,
            n_theta: 4,
            spacing: 0.025,
            quad: QuadParams { n_r: 24, n_phi: 16, cutoff: 6.0 },
            radii: vec![0.0, 0.5, 1.0],
        }
    }
}

impl CalibrationParams {
    pub fn validate(&self) -> Result<()> {
        SphereGrid::check_sizes(self.n_eta, self.n_theta)?;
        ensure_positive("spacing", self.spacing)?;
        self.quad.validate()?;
        ensure(!self.radii.is_empty(), || "at least one calibration radius is required".into())?;
        for r in &self.radii {
            ensure(*r >= 0.0 && r.is_finite(), || format!("calibration radii must be non-negative, got {r}"))?;
        }
        Ok(())
    }
}

impl CalibrationParams {
    /// Cheapest setting that still yields `ĉ` at `r = 0`.
    pub fn origin_only() -> Self {
        CalibrationParams {
            n_eta: 8,
            n_theta: 4,
            spacing: 0.05,
            quad: QuadParams { n_r: 24, n_phi: 16, cutoff: 6.0 },
            radii: vec![0.0],
        }
    }

    pub fn doubled(&self) -> Self {
        CalibrationParams {
            n_eta: 2 * self.n_eta,
            n_theta: 2 * self.n_theta,
            spacing: 0.5 * self.spacing,
            quad: self.quad.doubled(),
            radii: self.radii.clone(),
        }
    }
}

/// `ĉ` at each radius, with its deviation from `1/(2π³)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub per_radius: Vec<(f64, f64)>,
    /// Value at the first radius.
    pub c_hat: f64,
    pub analytic: f64,
    pub relative_deviation: f64,
    /// Largest relative spread of `ĉ(r)` around `ĉ`.
    pub radius_spread: f64,
}

/// Runs the Gaussian pipeline `φ → φ̂ → ∂_s∂_s̄ → R*` and solves
/// `φ(z) = −ĉ·R*(∂_s∂_s̄ φ̂)(z)` at `z = (r, 0)` for each requested radius.
pub fn calibrate_cn(params: &CalibrationParams) -> Result<Calibration> {
    if params.radii.is_empty() || params.radii.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
        return Err(Error::invalid("calibration radii must be a nonempty list of non-negative numbers"));
    }
    let r_max = params.radii.iter().cloned().fold(0.0, f64::max);
    let h = params.spacing;
    // Two stencil cells plus one interpolation cell beyond the largest |⟨z,w⟩|.
    let sgrid = SGrid::with_spacing(C64::new(0.0, 0.0), r_max + 3.0 * h, h)?;
    let sphere = Arc::new(SphereGrid::new(params.n_eta, params.n_theta)?);
    let phi = TestFunction::unit_gaussian();
    let sino = forward_sinogram(&phi, sphere, sgrid, &params.quad)?;
    let psi = s_derivative(&sino, 1, 1)?;
    let mut per_radius = Vec::with_capacity(params.radii.len());
    for &r in &params.radii {
        let z = [C64::new(r, 0.0), C64::new(0.0, 0.0)];
        let denom = -dual(&psi, &z)?;
        if denom.norm() < 1e-6 {
            return Err(Error::invalid(format!("calibration denominator {denom} is below 1e-6 at r = {r}")));
        }
        per_radius.push((r, (phi.value(&z) / denom).re));
    }
    let c_hat = per_radius[0].1;
    let radius_spread = per_radius.iter().map(|(_, c)| ((c - c_hat) / c_hat).abs()).fold(0.0, f64::max);
    Ok(Calibration {
        per_radius,
        c_hat,
        analytic: C2_ANALYTIC,
        relative_deviation: ((c_hat - C2_ANALYTIC) / C2_ANALYTIC).abs(),
        radius_spread,
    })
}

/// Default resolutions of the inversion pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InversionParams {
    pub n_eta: usize,
    pub n_theta: usize,
    pub s_extent: f64,
    pub s_count: usize,
    pub quad: QuadParams,
    pub volume: VolumeSpec,
}

impl Default for InversionParams {
    fn default() -> Self {
        InversionParams {
            n_eta: 8,
            n_theta: 16,
            s_extent: 2.5,
            s_count: 55,
            quad: QuadParams { n_r: 16, n_phi: 12, cutoff: 6.0 },
            volume: VolumeSpec::default(),
        }
    }
}

impl InversionParams {
    pub fn validate(&self) -> Result<()> {
        SphereGrid::check_sizes(self.n_eta, self.n_theta)?;
        self.sgrid()?;
        self.quad.validate()?;
        self.volume.validate()
    }
}

impl InversionParams {
    /// Same setup with half the s-spacing.
    pub fn refined(&self) -> Self {
        InversionParams { s_count: 2 * self.s_count - 1, ..self.clone() }
    }

    pub fn sphere(&self) -> Result<Arc<SphereGrid>> {
        Ok(Arc::new(SphereGrid::new(self.n_eta, self.n_theta)?))
    }

    pub fn sgrid(&self) -> Result<SGrid> {
        SGrid::new(C64::new(0.0, 0.0), self.s_extent, self.s_count)
    }
}

/// Forward sinogram, filter and backprojection of `f` on the parameters' volume grid.
pub fn round_trip(f: &TestFunction, params: &InversionParams, c2: f64) -> Result<VolumeGrid> {
    let sino = forward_sinogram(f, params.sphere()?, params.sgrid()?, &params.quad)?;
    invert(&sino, params.volume, c2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::random_unit;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gaussian_forward_closed_form() {
        let f = TestFunction::unit_gaussian();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let w = random_unit(&mut rng);
            let s = C64::new(rand::Rng::gen_range(&mut rng, -2.0..2.0), rand::Rng::gen_range(&mut rng, -2.0..2.0));
            let v = forward(&f, &Hyperplane::new(w, s).unwrap(), &QuadParams::default()).unwrap();
            assert!((v - PI * (-s.norm_sqr()).exp()).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_function_and_homogeneity() {
        let h = Hyperplane::new([C64::new(0.6, 0.0), C64::new(0.0, 0.8)], C64::new(0.3, 0.2)).unwrap();
        assert_eq!(forward(&TestFunction::zero(), &h, &QuadParams::default()).unwrap(), C64::new(0.0, 0.0));
        let f = TestFunction::unit_gaussian();
        let h2 = Hyperplane::new([h.normal[0] * 2.0, h.normal[1] * 2.0], h.offset * 2.0).unwrap();
        let a = forward(&f, &h, &QuadParams::default()).unwrap();
        let b = forward(&f, &h2, &QuadParams::default()).unwrap();
        assert!((b - a / 4.0).norm() < 1e-13);
    }

    #[test]
    fn bump_forward_vanishes_off_support() {
        let f = TestFunction::bump(crate::point::ORIGIN, 0.5).unwrap();
        let w = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let q = ForwardQuadrature::new(QuadParams::default()).unwrap();
        assert_eq!(q.unit_normal(&f, &w, C64::new(0.0, 0.5)), C64::new(0.0, 0.0));
        assert!(q.unit_normal(&f, &w, C64::new(0.0, 0.49)).norm() > 0.0);
    }

    #[test]
    fn dual_closed_forms() {
        let sphere = SphereGrid::new(8, 8).unwrap();
        let z = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let v = dual_fn(|_, s| C64::new((-s.norm_sqr()).exp(), 0.0), &z, &sphere).unwrap();
        assert!((v.re - 2.0 * PI * PI * (1.0 - (-1.0f64).exp())).abs() < 1e-8);
        let one = dual_fn(|_, _| C64::new(1.0, 0.0), &z, &sphere).unwrap();
        assert!((one.re - 2.0 * PI * PI).abs() < 1e-10);
    }

    #[test]
    fn dual_of_sinogram_rejects_points_outside() {
        let sphere = Arc::new(SphereGrid::new(4, 4).unwrap());
        let sgrid = SGrid::new(C64::new(0.0, 0.0), 1.0, 9).unwrap();
        let s = Sinogram::from_fn(sphere, sgrid, |_, _| C64::new(1.0, 0.0)).unwrap();
        assert!((dual(&s, &crate::point::ORIGIN).unwrap().re - 2.0 * PI * PI).abs() < 1e-10);
        let far = [C64::new(3.0, 0.0), C64::new(0.0, 0.0)];
        assert!(matches!(dual(&s, &far), Err(Error::OutsideValidRegion { .. })));
    }

    #[test]
    fn phase_fill_matches_direct_quadrature() {
        let f = TestFunction::gaussian_poly([C64::new(0.3, -0.2), C64::new(0.1, 0.4)], 0.9, [1, 0], [0, 1]).unwrap();
        let sphere = Arc::new(SphereGrid::new(4, 8).unwrap());
        let sgrid = SGrid::new(C64::new(0.0, 0.0), 1.5, 9).unwrap();
        let sino = forward_sinogram(&f, sphere.clone(), sgrid, &QuadParams::default()).unwrap();
        let q = ForwardQuadrature::new(QuadParams::default()).unwrap();
        for i in 0..sphere.len() {
            for r in 0..9 {
                for c in 0..9 {
                    let direct = q.unit_normal(&f, sphere.node(i), sgrid.point(r, c));
                    assert!((sino.get(i, r, c) - direct).norm() < 1e-12, "node {i}");
                }
            }
        }
    }

    #[test]
    fn origin_calibration_is_accurate() {
        let c = calibrate_cn(&CalibrationParams { radii: vec![0.0], spacing: 0.1, ..CalibrationParams::origin_only() }).unwrap();
        assert!(c.relative_deviation < 1e-3, "{c:?}");
    }
}
