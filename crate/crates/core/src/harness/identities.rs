//! Checks of the transform identities: closed forms, calibration, inversion, duality,
//! Convolution commuting with the dual transform, and the bound on `R*h`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::distributions::XFunction;
use crate::geometry::{random_unit, Hyperplane};
use crate::harness::{CheckRecord, ExperimentReport};
use crate::numerics::{pairwise_sum, BallRule, PolarRule, Profile, QuadParams, SGrid, SphereGrid, SPHERE_AREA};
use crate::point::{norm, pairing, sub, to_pairs, Point, ORIGIN};
use crate::transform::radon::{
    calibrate_cn, dual_fn, forward, forward_sinogram, round_trip, CalibrationParams, ForwardQuadrature,
    InversionParams, VolumeGrid,
};
use crate::transform::{SmoothFunction, TestFunction};
use crate::error::ensure_positive;
use crate::{Error, Result, C64};

/// Forward transform against its closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForwardCheck {
    pub quad: QuadParams,
    pub n_eta: usize,
    pub n_theta: usize,
    /// Offsets `|s| ≤ s_radius` are compared.
    pub s_radius: f64,
    pub s_count: usize,
    pub tol: f64,
    pub phase_probes: usize,
    pub phase_tol: f64,
    pub seed: u64,
}

impl Default for ForwardCheck {
    fn default() -> Self {
        ForwardCheck {
            quad: QuadParams::default(),
            n_eta: 8,
            n_theta: 8,
            s_radius: 3.0,
            s_count: 31,
            tol: 1e-8,
            phase_probes: 20,
            phase_tol: 1e-10,
            seed: 7,
        }
    }
}

impl ForwardCheck {
    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        SphereGrid::check_sizes(self.n_eta, self.n_theta)?;
        SGrid::new(C64::new(0.0, 0.0), self.s_radius, self.s_count)?;
        ensure_positive("tol", self.tol)?;
        ensure_positive("phase_tol", self.phase_tol)
    }
}

pub fn check_forward(f: &TestFunction, p: &ForwardCheck) -> Result<ExperimentReport> {
    p.validate()?;
    let mut report = ExperimentReport::new("transform");
    let sphere = Arc::new(SphereGrid::new(p.n_eta, p.n_theta)?);
    let sgrid = SGrid::new(C64::new(0.0, 0.0), p.s_radius, p.s_count)?;
    let sino = forward_sinogram(f, sphere.clone(), sgrid, &p.quad)?;
    if f.analytic_radon(sphere.node(0), C64::new(0.0, 0.0)).is_some() {
        let mut err: f64 = 0.0;
        for i in 0..sphere.len() {
            for r in 0..sgrid.count() {
                for c in 0..sgrid.count() {
                    let s = sgrid.point(r, c);
                    if s.norm() <= p.s_radius + 1e-12 {
                        let exact = f.analytic_radon(sphere.node(i), s).expect("pure Gaussian");
                        err = err.max((sino.get(i, r, c) - exact).norm());
                    }
                }
            }
        }
        report.push(CheckRecord::at_most("forward.max_abs_error_vs_closed_form", err, p.tol));
    } else {
        // No closed form: compare with doubled quadrature.
        let fine = forward_sinogram(f, sphere.clone(), sgrid, &p.quad.doubled())?;
        let err = sino.values.iter().zip(&fine.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        report.push(CheckRecord::at_most("forward.max_abs_change_under_doubling", err, p.tol));
    }
    // Condition (c): (we^{iθ}, se^{iθ}) and (w, s) give the same value.
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let q = ForwardQuadrature::new(p.quad)?;
    let scale = sino.max_abs().max(f64::MIN_POSITIVE);
    let mut defect: f64 = 0.0;
    for _ in 0..p.phase_probes {
        let w = random_unit(&mut rng);
        let s = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let th = C64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
        let a = q.unit_normal(f, &w, s);
        let b = q.unit_normal(f, &[w[0] * th, w[1] * th], s * th);
        defect = defect.max((a - b).norm() / scale);
    }
    report.push(CheckRecord::at_most("forward.phase_invariance_relative", defect, p.phase_tol));
    // Degree −2 homogeneity in ξ.
    let h = Hyperplane::new([C64::new(0.6, 0.0), C64::new(0.0, 0.8)], C64::new(0.3, -0.2))?;
    let h2 = Hyperplane::new([h.normal[0] * 2.0, h.normal[1] * 2.0], h.offset * 2.0)?;
    let (a, b) = (forward(f, &h, &p.quad)?, forward(f, &h2, &p.quad)?);
    report.push(CheckRecord::absolute("forward.homogeneity_degree_minus_two", (4.0 * b - a).norm(), 0.0, 1e-12 * scale));
    report.note("function", f.describe());
    report.note(
        "resolution",
        json!({ "sphere": [p.n_eta, p.n_theta], "s_radius": p.s_radius, "s_count": p.s_count,
                "quad": [p.quad.n_r, p.quad.n_phi, p.quad.cutoff] }),
    );
    Ok(report)
}

/// Calibration of `c₂` against `1/(2π³)`, radius invariance and resolution doubling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationCheck {
    pub params: CalibrationParams,
    pub tol: f64,
    /// Compare `ĉ` at the first radius with all resolutions doubled.
    pub doubling: bool,
    pub doubling_tol: f64,
}

impl Default for CalibrationCheck {
    fn default() -> Self {
        CalibrationCheck { params: CalibrationParams::default(), tol: 1e-3, doubling: true, doubling_tol: 1e-4 }
    }
}

impl CalibrationCheck {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        ensure_positive("tol", self.tol)?;
        ensure_positive("doubling_tol", self.doubling_tol)
    }
}

pub fn check_calibration(p: &CalibrationCheck) -> Result<ExperimentReport> {
    p.validate()?;
    let mut report = ExperimentReport::new("calibrate");
    let cal = calibrate_cn(&p.params)?;
    report.push(CheckRecord::relative("calibrate.c_hat_vs_analytic", cal.c_hat, cal.analytic, p.tol));
    for (r, c) in &cal.per_radius {
        report.push(CheckRecord::relative(format!("calibrate.c_hat_at_r={r}"), *c, cal.c_hat, p.tol));
    }
    if p.doubling {
        let base = CalibrationParams { radii: vec![p.params.radii[0]], ..p.params.clone() };
        let fine = calibrate_cn(&base.doubled())?;
        report.push(CheckRecord::relative("calibrate.doubling_change", fine.c_hat, cal.c_hat, p.doubling_tol));
    }
    report.note("c_hat", json!(cal.c_hat));
    report.note("analytic", json!(cal.analytic));
    report.note("per_radius", json!(cal.per_radius));
    report.note(
        "resolution",
        json!({ "sphere": [p.params.n_eta, p.params.n_theta], "spacing": p.params.spacing,
                "quad": [p.params.quad.n_r, p.params.quad.n_phi, p.params.quad.cutoff] }),
    );
    Ok(report)
}

/// Inversion round trip `φ → φ̂ → φ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoundTripCheck {
    pub params: InversionParams,
    pub c2: f64,
    pub tol: f64,
    /// Repeat with half the s-spacing and require a smaller error.
    pub refine: bool,
}

impl Default for RoundTripCheck {
    fn default() -> Self {
        RoundTripCheck {
            params: InversionParams::default(),
            c2: crate::transform::C2_ANALYTIC,
            tol: 0.02,
            refine: true,
        }
    }
}

impl RoundTripCheck {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        ensure_positive("c2", self.c2)?;
        ensure_positive("tol", self.tol)
    }
}

pub fn check_round_trip(f: &TestFunction, p: &RoundTripCheck) -> Result<(ExperimentReport, VolumeGrid)> {
    p.validate()?;
    let mut report = ExperimentReport::new("invert");
    let vol = round_trip(f, &p.params, p.c2)?;
    let err = vol.relative_error(|z| f.value(z));
    report.push(CheckRecord::at_most("invert.max_relative_error", err, p.tol));
    let exact = VolumeGrid::from_fn(p.params.volume, |z| Ok(f.value(z)))?;
    let (peak, peak_exact) = (vol.argmax(), exact.argmax());
    let h = p.params.volume.spacing();
    report.push(CheckRecord::at_most("invert.peak_offset_in_cells", norm(&sub(&peak, &peak_exact)) / h, 1.0));
    report.note("peak", json!(to_pairs(&peak)));
    report.note("relative_error", json!(err));
    if p.refine {
        let fine = round_trip(f, &p.params.refined(), p.c2)?;
        let fine_err = fine.relative_error(|z| f.value(z));
        report.push(CheckRecord::at_most("invert.refined_error_below_base", fine_err, err));
        report.note("refined_relative_error", json!(fine_err));
    }
    report.note("function", f.describe());
    report.note(
        "resolution",
        json!({ "sphere": [p.params.n_eta, p.params.n_theta], "s_extent": p.params.s_extent,
                "s_count": p.params.s_count, "quad": [p.params.quad.n_r, p.params.quad.n_phi, p.params.quad.cutoff],
                "volume": { "extent": p.params.volume.extent, "count": p.params.volume.count,
                            "mask_radius": p.params.volume.mask_radius }, "c2": p.c2 }),
    );
    Ok((report, vol))
}

/// Resolutions shared by the duality and convolution-commutation checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairingParams {
    /// Sphere grid of the dual transform.
    pub n_eta: usize,
    pub n_theta: usize,
    /// Ball rule over the support of `φ`: radial nodes and Hopf grid.
    pub ball_n_r: usize,
    pub ball_n_eta: usize,
    pub ball_n_theta: usize,
    /// Polar rule in `σ` over the support of `φ̂(w, ·)`.
    pub plane_n_r: usize,
    pub plane_n_phi: usize,
    /// Hyperplane quadrature for `φ̂`.
    pub quad: QuadParams,
    pub tol: f64,
}

impl Default for PairingParams {
    fn default() -> Self {
        PairingParams {
            n_eta: 8,
            n_theta: 16,
            ball_n_r: 24,
            ball_n_eta: 6,
            ball_n_theta: 8,
            plane_n_r: 24,
            plane_n_phi: 16,
            quad: QuadParams { n_r: 16, n_phi: 12, cutoff: 6.0 },
            tol: 1e-3,
        }
    }
}

impl PairingParams {
    pub fn validate(&self) -> Result<()> {
        SphereGrid::check_sizes(self.n_eta, self.n_theta)?;
        SphereGrid::check_sizes(self.ball_n_eta, self.ball_n_theta)?;
        if self.ball_n_r == 0 || self.plane_n_r == 0 || self.plane_n_phi == 0 {
            return Err(Error::invalid("ball_n_r, plane_n_r and plane_n_phi must be ≥ 1"));
        }
        self.quad.validate()?;
        ensure_positive("tol", self.tol)
    }

    fn resolution(&self) -> serde_json::Value {
        json!({ "sphere": [self.n_eta, self.n_theta], "ball": [self.ball_n_r, self.ball_n_eta, self.ball_n_theta],
                "plane": [self.plane_n_r, self.plane_n_phi], "quad": [self.quad.n_r, self.quad.n_phi, self.quad.cutoff] })
    }
}

/// `φ̂_t(w, σ_k)·weight_k` per sphere node on polar rules around `⟨c_t, w⟩`, one per term.
struct HatTable {
    rows: Vec<Vec<(C64, C64)>>,
}

impl HatTable {
    fn new(phi: &TestFunction, sphere: &SphereGrid, p: &PairingParams) -> Result<Self> {
        let q = ForwardQuadrature::new(p.quad)?;
        let unit = PolarRule::disk(1.0, p.plane_n_r, p.plane_n_phi)?;
        let terms: Vec<(TestFunction, f64)> = phi
            .terms
            .iter()
            .map(|t| (TestFunction { terms: vec![t.clone()] }, t.profile.support_radius().expect("compact")))
            .collect();
        let rows = (0..sphere.len())
            .into_par_iter()
            .map(|i| {
                let w = sphere.node(i);
                let mut row = Vec::with_capacity(terms.len() * unit.len());
                for (f, rho) in &terms {
                    let c = pairing(&f.terms[0].center, w);
                    for (u, wt) in unit.points.iter().zip(&unit.weights) {
                        let sigma = c + u * *rho;
                        row.push((sigma, q.unit_normal(f, w, sigma) * (wt * rho * rho)));
                    }
                }
                row
            })
            .collect();
        Ok(HatTable { rows })
    }
}

fn require_compact(phi: &TestFunction) -> Result<()> {
    if !phi.is_compactly_supported() {
        return Err(Error::invalid("the test function φ must be compactly supported"));
    }
    Ok(())
}

/// `∫ φ(y) g(y) dy` by ball rules over the supports of the terms of `φ`.
fn integrate_against<G>(phi: &TestFunction, g: G, p: &PairingParams) -> Result<C64>
where
    G: Fn(&Point) -> C64 + Sync,
{
    let ball_sphere = SphereGrid::new(p.ball_n_eta, p.ball_n_theta)?;
    let mut parts = Vec::with_capacity(phi.terms.len());
    for t in &phi.terms {
        let rule = BallRule::new(t.center, t.profile.support_radius().expect("compact"), p.ball_n_r, &ball_sphere)?;
        let vals: Vec<C64> =
            rule.points.par_iter().zip(&rule.weights).map(|(y, w)| t.value(y) * g(y) * *w).collect();
        parts.push(pairwise_sum(&vals));
    }
    Ok(pairwise_sum(&parts))
}

fn relative_difference(a: C64, b: C64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// `∫ R*f·φ dω₄ = ∫∫ f·φ̂ dσ dω₂`.
pub fn check_duality(phi: &TestFunction, f: &XFunction, p: &PairingParams) -> Result<ExperimentReport> {
    p.validate()?;
    require_compact(phi)?;
    let mut report = ExperimentReport::new("duality");
    let sphere = SphereGrid::new(p.n_eta, p.n_theta)?;
    let lhs = integrate_against(phi, |y| dual_fn(|w, s| f.value(w, s), y, &sphere).unwrap_or(C64::new(f64::NAN, 0.0)), p)?;
    let table = HatTable::new(phi, &sphere, p)?;
    let rhs = sphere.integrate(|i, w| {
        let terms: Vec<C64> = table.rows[i].iter().map(|(sigma, hw)| f.value(w, *sigma) * hw).collect();
        Ok(pairwise_sum(&terms))
    })?;
    report.push(CheckRecord::at_most("duality.relative_difference", relative_difference(lhs, rhs), p.tol));
    report.note("lhs", json!([lhs.re, lhs.im]));
    report.note("rhs", json!([rhs.re, rhs.im]));
    report.note("phi", phi.describe());
    report.note("f", f.describe());
    report.note("resolution", p.resolution());
    Ok(report)
}

/// Default probe set: the origin and 26 seeded points with `|z| ≤ radius`.
pub fn default_probes(count: usize, radius: f64, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![ORIGIN];
    while out.len() < count {
        let w = random_unit(&mut rng);
        let r = radius * rng.gen_range(0.0f64..1.0).sqrt();
        out.push([w[0] * r, w[1] * r]);
    }
    out
}

/// `φ ∗ R*ψ = R*(φ̂ ∗_s ψ)` at each probe.
pub fn check_lemma1(phi: &TestFunction, psi: &XFunction, probes: &[Point], p: &PairingParams) -> Result<ExperimentReport> {
    p.validate()?;
    require_compact(phi)?;
    let mut report = ExperimentReport::new("lemma1");
    let sphere = SphereGrid::new(p.n_eta, p.n_theta)?;
    psi.check_phase_compatible(&sphere)?;
    let table = HatTable::new(phi, &sphere, p)?;
    let dual_psi = |y: &Point| dual_fn(|w, s| psi.value(w, s), y, &sphere).unwrap_or(C64::new(f64::NAN, 0.0));
    let mut worst: f64 = 0.0;
    let mut values = Vec::with_capacity(probes.len());
    for (k, z) in probes.iter().enumerate() {
        let lhs = integrate_against(phi, |y| dual_psi(&sub(z, y)), p)?;
        let rhs = sphere.integrate(|i, w| {
            let s = pairing(z, w);
            let terms: Vec<C64> = table.rows[i].iter().map(|(sigma, hw)| psi.value(w, s - sigma) * hw).collect();
            Ok(pairwise_sum(&terms))
        })?;
        let d = relative_difference(lhs, rhs);
        worst = worst.max(d);
        report.push(CheckRecord::at_most(format!("lemma1.probe_{k:02}.relative_difference"), d, p.tol));
        values.push(json!({ "z": to_pairs(z), "lhs": [lhs.re, lhs.im], "rhs": [rhs.re, rhs.im] }));
    }
    report.note("probes", json!(values));
    report.note("max_relative_difference", json!(worst));
    report.note("phi", phi.describe());
    report.note("psi", psi.describe());
    report.note("resolution", p.resolution());
    Ok(report)
}

/// Bound `|R*h(z)| ≤ 2π²·max(1, R²/|z|²)` for `|h| ≤ 1` supported in `|s| ≤ R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualBoundCheck {
    pub n_eta: usize,
    pub n_theta: usize,
    pub tol: f64,
    /// Tolerance for the sharp form `2π²·min(1, R²/|z|²)` and its attainment.
    pub sharp_tol: f64,
}

impl Default for DualBoundCheck {
    fn default() -> Self {
        DualBoundCheck { n_eta: 16384, n_theta: 4, tol: 1e-6, sharp_tol: 1e-3 }
    }
}

impl DualBoundCheck {
    pub fn validate(&self) -> Result<()> {
        SphereGrid::check_sizes(self.n_eta, self.n_theta)?;
        ensure_positive("tol", self.tol)?;
        ensure_positive("sharp_tol", self.sharp_tol)
    }
}

/// Probes `(r, 0)`, `(ir, 0)` and `(0, r)` at `r ∈ {0, R/2, R, 2R, 4R, 8R}`.
pub fn dual_bound_probes(radius: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for k in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let r = k * radius;
        out.push([C64::new(r, 0.0), C64::new(0.0, 0.0)]);
        if r > 0.0 {
            out.push([C64::new(0.0, r), C64::new(0.0, 0.0)]);
            out.push([C64::new(0.0, 0.0), C64::new(r, 0.0)]);
        }
    }
    out
}

pub fn check_dual_bound(h: &XFunction, radius: f64, probes: &[Point], p: &DualBoundCheck) -> Result<ExperimentReport> {
    p.validate()?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid("support radius R must be positive"));
    }
    let mut report = ExperimentReport::new("dual-bound");
    let coarse = SphereGrid::new(8, 8)?;
    let sup = h.sup_on_grid(&coarse, radius * 1.5);
    report.push(CheckRecord::at_most("dual_bound.sup_h", sup, 1.0 + 1e-12));
    let leak = {
        // |h| beyond |s| = R on a ring sample.
        let mut m: f64 = 0.0;
        for w in coarse.nodes() {
            for k in 0..64 {
                for rr in [1.0 + 1e-9, 1.5, 2.0, 4.0] {
                    m = m.max(h.value(w, C64::from_polar(radius * rr, k as f64 * PI / 32.0)).norm());
                }
            }
        }
        m
    };
    report.push(CheckRecord::at_most("dual_bound.h_outside_support", leak, 0.0));
    let sphere = SphereGrid::new(p.n_eta, p.n_theta)?;
    let values: Vec<C64> = probes
        .par_iter()
        .map(|z| dual_fn(|w, s| h.value(w, s), z, &sphere))
        .collect::<Result<_>>()?;
    let mut excess_max = f64::NEG_INFINITY;
    let mut excess_sharp = f64::NEG_INFINITY;
    for (z, v) in probes.iter().zip(&values) {
        let r2 = norm(z).powi(2);
        let ratio = if r2 == 0.0 { f64::INFINITY } else { radius * radius / r2 };
        let max_form = SPHERE_AREA * ratio.max(1.0);
        let min_form = SPHERE_AREA * ratio.min(1.0);
        excess_max = excess_max.max(v.norm() - max_form);
        excess_sharp = excess_sharp.max((v.norm() - min_form) / min_form);
    }
    report.push(CheckRecord::at_most("dual_bound.max_excess_over_bound", excess_max, p.tol));
    report.push(CheckRecord::at_most("dual_bound.max_relative_excess_over_sharp_bound", excess_sharp, p.sharp_tol));
    let is_indicator = h.terms.len() == 1 && {
        let t = &h.terms[0];
        matches!(t.profile, Profile::Indicator { radius: r } if (r - radius).abs() < 1e-15)
            && t.coefficient == crate::distributions::Coefficient::One
            && t.center == ORIGIN
            && t.a == 0
            && t.b == 0
            && t.amplitude == C64::new(1.0, 0.0)
    };
    if is_indicator {
        for r in [0.0, 4.0 * radius] {
            let z = [C64::new(r, 0.0), C64::new(0.0, 0.0)];
            let v = dual_fn(|w, s| h.value(w, s), &z, &sphere)?;
            let exact = if r == 0.0 { SPHERE_AREA } else { SPHERE_AREA * radius * radius / (r * r) };
            report.push(CheckRecord::relative(format!("dual_bound.indicator_attains_at_|z|={r}"), v.re, exact, p.sharp_tol));
        }
    }
    report.note(
        "values",
        json!(probes.iter().zip(&values).map(|(z, v)| json!({ "z": to_pairs(z), "abs": v.norm() })).collect::<Vec<_>>()),
    );
    report.note("h", h.describe());
    report.note("radius", json!(radius));
    report.note("resolution", json!({ "sphere": [p.n_eta, p.n_theta] }));
    Ok(report)
}
