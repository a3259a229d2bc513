//! Support-theorem experiments: the forward inclusion `supp RT ⊂ K̂`, the contrapositive
//! of the converse, and the inclusions `supp RT_m ⊂ K̂_m` of the proof.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::distributions::{
    mollified_sinogram, radon_pair, Coefficient, DensityQuad, DistTerm, Measure, Mollifier, TestDistribution,
    XFunction, XTerm,
};
use crate::geometry::{
    escape_path, find_separating_hyperplane, hat_dilate_contains, project, random_unit, CompactSet, Hyperplane,
};
use crate::harness::{CheckRecord, ExperimentReport};
use crate::numerics::{Profile, QuadParams, SGrid, Sinogram, SphereGrid, SPHERE_AREA};
use crate::point::{norm, pairing, to_pairs, Point};
use crate::transform::radon::forward_sinogram;
use crate::error::{ensure, ensure_positive};
use crate::geometry::raster::MIN_RESOLUTION;
use crate::{Error, Result, C64};

/// Resolutions and thresholds of the support experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SupportParams {
    /// Mollifier scale for point masses and derivatives of densities.
    pub m: u32,
    pub n_eta: usize,
    pub n_theta: usize,
    pub s_extent: f64,
    pub s_count: usize,
    pub quad: QuadParams,
    /// Relative sup-norm below which a sinogram counts as vanishing.
    pub threshold: f64,
    /// Number of test functions on X supported away from `K̂`.
    pub test_functions: usize,
    pub psi_direction_radius: f64,
    pub psi_s_radius: f64,
    pub pairing_quad: DensityQuad,
    /// Raster resolution for projections.
    pub resolution: usize,
    /// Mollifier scales of the proof-chain inclusions.
    pub chain_scales: Vec<u32>,
    pub converse_ratio: f64,
    pub seed: u64,
}

impl Default for SupportParams {
    fn default() -> Self {
        SupportParams {
            m: 10,
            n_eta: 8,
            n_theta: 16,
            s_extent: 2.5,
            s_count: 101,
            quad: QuadParams { n_r: 16, n_phi: 12, cutoff: 6.0 },
            threshold: 1e-8,
            test_functions: 20,
            psi_direction_radius: 0.3,
            psi_s_radius: 0.2,
            pairing_quad: DensityQuad { n_r: 16, n_eta: 4, n_theta: 8, truncation: 8.0 },
            resolution: 64,
            chain_scales: vec![5, 10],
            converse_ratio: 1e-2,
            seed: 3,
        }
    }
}

impl SupportParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.m >= 1, || "mollifier scale m must be ≥ 1".into())?;
        SphereGrid::check_sizes(self.n_eta, self.n_theta)?;
        SGrid::new(C64::new(0.0, 0.0), self.s_extent, self.s_count)?;
        self.quad.validate()?;
        ensure(self.threshold > 0.0 && self.threshold < 1.0, || format!("threshold must lie in (0, 1), got {}", self.threshold))?;
        ensure_positive("psi_direction_radius", self.psi_direction_radius)?;
        ensure_positive("psi_s_radius", self.psi_s_radius)?;
        self.pairing_quad.validate()?;
        ensure(self.resolution >= MIN_RESOLUTION, || format!("raster resolution must be ≥ {MIN_RESOLUTION}, got {}", self.resolution))?;
        ensure(self.chain_scales.iter().all(|m| *m >= 1), || "chain scales must be ≥ 1".into())?;
        ensure_positive("converse_ratio", self.converse_ratio)
    }

    fn grids(&self) -> Result<(Arc<SphereGrid>, SGrid)> {
        Ok((Arc::new(SphereGrid::new(self.n_eta, self.n_theta)?), SGrid::new(C64::new(0.0, 0.0), self.s_extent, self.s_count)?))
    }

    fn resolution(&self) -> serde_json::Value {
        json!({ "m": self.m, "sphere": [self.n_eta, self.n_theta], "s_extent": self.s_extent, "s_count": self.s_count,
                "quad": [self.quad.n_r, self.quad.n_phi, self.quad.cutoff], "raster": self.resolution,
                "seed": self.seed })
    }
}

/// Sinogram of `T`: plain densities directly, point masses and derivatives of densities
/// after mollification at scale `m`.
pub fn distribution_sinogram(
    t: &TestDistribution,
    m: u32,
    sphere: Arc<SphereGrid>,
    sgrid: SGrid,
    quad: &QuadParams,
) -> Result<Sinogram> {
    let (plain, singular): (Vec<&DistTerm>, Vec<&DistTerm>) =
        t.terms.iter().partition(|d| matches!(d.measure, Measure::Density(_)) && d.order() == 0);
    let mut out = Sinogram::zeros(sphere.clone(), sgrid);
    for d in plain {
        let Measure::Density(f) = &d.measure else { unreachable!() };
        let s = forward_sinogram(f, sphere.clone(), sgrid, quad)?;
        for (o, v) in out.values.iter_mut().zip(&s.values) {
            *o += v;
        }
    }
    if !singular.is_empty() {
        let sing = TestDistribution { terms: singular.into_iter().cloned().collect() };
        let s = mollified_sinogram(&sing, Mollifier::new(m)?, sphere.clone(), sgrid, quad)?;
        out.margin = s.margin;
        for (o, v) in out.values.iter_mut().zip(&s.values) {
            *o += v;
        }
        zero_invalid(&mut out);
    }
    out.provenance.insert("distribution".into(), t.describe());
    out.provenance.insert("mollifier_m".into(), json!(m));
    Ok(out)
}

fn zero_invalid(s: &mut Sinogram) {
    let n = s.sgrid.len();
    let count = s.sgrid.count();
    for i in 0..s.node_count() {
        for r in 0..count {
            for c in 0..count {
                if !s.is_valid_cell(r, c) {
                    s.values[i * n + r * count + c] = C64::new(0.0, 0.0);
                }
            }
        }
    }
}

fn has_singular(t: &TestDistribution) -> bool {
    t.terms.iter().any(|d| matches!(d.measure, Measure::Point { .. }) || d.order() > 0)
}

/// Whether sampled points of the covering balls of `supp T` lie in `K`.
fn support_inside(t: &TestDistribution, k: &CompactSet, seed: u64) -> Option<bool> {
    let balls = t.support_balls()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (c, r) in balls {
        if !k.contains(&c) {
            return Some(false);
        }
        for _ in 0..256 {
            let w = random_unit(&mut rng);
            if k.distance(&[c[0] + w[0] * r, c[1] + w[1] * r]) > 1e-12 {
                return Some(false);
            }
        }
    }
    Some(true)
}

/// Largest `|v|` over valid cells where `keep(node, s)`.
fn sup_where<F: Fn(&Point, C64) -> bool>(sino: &Sinogram, keep: F) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..sino.node_count() {
        let w = sino.sphere.node(i);
        for r in 0..sino.sgrid.count() {
            for c in 0..sino.sgrid.count() {
                if sino.is_valid_cell(r, c) {
                    let v = sino.get(i, r, c).norm();
                    if v > m && keep(w, sino.sgrid.point(r, c)) {
                        m = v;
                    }
                }
            }
        }
    }
    m
}

/// Test functions on X vanishing near `K̂`: direction bumps around random `w₀` times
/// `s`-bumps around `⟨s₀w̄₀, w⟩` with `|s₀|` beyond the projections of `K`.
pub fn test_functions_off_hat(k: &CompactSet, margin: f64, p: &SupportParams) -> Result<Vec<XFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed ^ 0x5eed);
    let rho = p.psi_direction_radius;
    let rs = p.psi_s_radius;
    let reach = (k.bound() + margin + rs) / (1.0 - rho * rho).sqrt() + 0.1;
    let mut out = Vec::with_capacity(p.test_functions);
    for _ in 0..p.test_functions {
        let w0 = random_unit(&mut rng);
        let s0 = C64::from_polar(reach, rng.gen_range(0.0..2.0 * PI));
        let center = [s0 * w0[0].conj(), s0 * w0[1].conj()];
        out.push(XFunction::new(vec![XTerm {
            amplitude: C64::new(1.0, 0.0),
            coefficient: Coefficient::DirectionBump { direction: w0, radius: rho },
            center,
            a: 0,
            b: 0,
            profile: Profile::Bump { radius: rs },
        }])?);
    }
    Ok(out)
}

/// `supp T ⊂ K ⇒ T̂` vanishes at distance `≥ margin` from `K̂`, and `⟨RT, ψ⟩ = 0` for
/// `ψ` supported away from `K̂`.
pub fn support_forward(t: &TestDistribution, k: &CompactSet, margin: f64, p: &SupportParams) -> Result<ExperimentReport> {
    p.validate()?;
    t.validate()?;
    k.validate()?;
    let (sphere, sgrid) = p.grids()?;
    let h = sgrid.spacing();
    if has_singular(t) {
        let stencil = if t.has_density_derivatives() { 3.0 } else { 1.0 };
        let need = 1.0 / p.m as f64 + stencil * h;
        if margin < need - 1e-12 {
            return Err(Error::invalid(format!(
                "margin {margin} is smaller than the mollifier radius plus the s-grid allowance ({need})"
            )));
        }
    } else if !(margin > 0.0) {
        return Err(Error::invalid("margin must be positive"));
    }
    let mut report = ExperimentReport::new("support-forward");
    match support_inside(t, k, p.seed) {
        Some(inside) => report.push(CheckRecord::flag("support_forward.support_inside_K", inside, true)),
        None => return Err(Error::invalid("support experiments need compactly supported densities")),
    }
    let sino = distribution_sinogram(t, p.m, sphere.clone(), sgrid, &p.quad)?;
    let sup = sino.max_abs();
    let outside = sup_where(&sino, |w, s| k.projection_distance(w, s) >= margin);
    let rel = if sup == 0.0 { 0.0 } else { outside / sup };
    report.push(CheckRecord::at_most("support_forward.relative_sup_outside_margin", rel, p.threshold));
    let psis = test_functions_off_hat(k, margin, p)?;
    let mut worst: f64 = 0.0;
    let mut all_off = true;
    for psi in &psis {
        all_off &= psi.vanishes_near_hat(k, &sphere, margin).unwrap_or(false);
        worst = worst.max(radon_pair(t, psi, &sphere, &p.pairing_quad)?.norm());
    }
    report.push(CheckRecord::flag("support_forward.test_functions_vanish_near_hat", all_off, true));
    let scale = (sup * SPHERE_AREA * PI * p.psi_s_radius.powi(2)).max(f64::MIN_POSITIVE);
    report.push(CheckRecord::at_most("support_forward.max_relative_pairing", worst / scale, p.threshold));
    report.note("sup_abs", json!(sup));
    report.note("margin", json!(margin));
    report.note("set", serde_json::to_value(k)?);
    report.note("distribution", t.describe());
    report.note("resolution", p.resolution());
    Ok(report)
}

/// Contrapositive of the converse at `witness ∉ K`, plus the proof-chain inclusions
/// `supp RT_m ⊂ K̂_m` for `inside` (a distribution supported in `K`).
pub fn support_converse(
    t: &TestDistribution,
    k: &CompactSet,
    witness: &Point,
    inside: Option<&TestDistribution>,
    p: &SupportParams,
) -> Result<ExperimentReport> {
    p.validate()?;
    t.validate()?;
    k.validate()?;
    let (sphere, sgrid) = p.grids()?;
    let mut report = ExperimentReport::new("support-converse");
    report.note("witness", json!(to_pairs(witness)));
    report.note("set", serde_json::to_value(k)?);
    report.note("resolution", p.resolution());
    let (plane, connected) = match find_separating_hyperplane(k, witness, &sphere, p.resolution) {
        Ok(found) => found,
        Err(Error::NoSeparatingDirection) => {
            report.push(CheckRecord::flag("converse.separating_direction_found", false, true));
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    report.push(CheckRecord::flag("converse.separating_direction_found", true, true));
    report.note("separating_plane", json!({ "w": to_pairs(&plane.normal), "s": [plane.offset.re, plane.offset.im] }));
    report.push(CheckRecord::flag("converse.condition_iii_complement_connected", connected, true));
    if !connected {
        report.mark_hypothesis_violated();
        report.note("hypothesis", json!("condition (iii) fails: the complement of the projection is disconnected"));
        return Ok(report);
    }
    // Broken line from ⟨witness, w₀⟩ to infinity avoiding K_{w₀}.
    let raster = project(k, &plane.normal, p.resolution)?;
    let d0 = k.projection_distance(&plane.normal, plane.offset);
    let delta = (0.5 * d0).min(0.1);
    let path = escape_path(&raster, plane.offset, raster.half_width + 0.5, delta);
    report.push(CheckRecord::flag("converse.escape_path_found", path.is_ok(), true));
    let extent_needed = norm(witness) + 2.0 * sgrid.spacing();
    let sino = distribution_sinogram(t, p.m, sphere.clone(), sgrid, &p.quad)?;
    if sino.valid_extent() < extent_needed {
        return Err(Error::invalid(format!(
            "s-grid valid extent {} does not reach |witness| + 2h = {extent_needed}",
            sino.valid_extent()
        )));
    }
    let sup = sino.max_abs();
    let mut through: f64 = 0.0;
    let mut planes = 0;
    for i in 0..sphere.len() {
        let w = sphere.node(i);
        let s = pairing(witness, w);
        if k.projection_distance(w, s) > 0.0 {
            planes += 1;
            let v = sino.interpolate(i, s).ok_or_else(|| Error::invalid("witness hyperplane outside the s-grid"))?;
            through = through.max(v.norm());
        }
    }
    let ratio = if sup == 0.0 { 0.0 } else { through / sup };
    report.push(CheckRecord::at_least("converse.relative_sup_on_planes_through_witness_missing_K", ratio, p.converse_ratio));
    report.note("planes_missing_K", json!(planes));
    report.note("distribution", t.describe());
    if let Some(inner) = inside {
        for &m in &p.chain_scales {
            let s = mollified_sinogram(inner, Mollifier::new(m)?, sphere.clone(), sgrid, &p.quad)?;
            let sup = s.max_abs();
            let mut violations = 0usize;
            let mut worst: f64 = 0.0;
            for i in 0..sphere.len() {
                let w = sphere.node(i);
                for r in 0..sgrid.count() {
                    for c in 0..sgrid.count() {
                        if !s.is_valid_cell(r, c) {
                            continue;
                        }
                        let hp = Hyperplane::new(*w, sgrid.point(r, c))?;
                        if !hat_dilate_contains(k, m, &hp)? {
                            let v = s.get(i, r, c).norm() / sup.max(f64::MIN_POSITIVE);
                            worst = worst.max(v);
                            if v > p.threshold {
                                violations += 1;
                            }
                        }
                    }
                }
            }
            report.push(CheckRecord::at_most(format!("chain.m={m}.relative_sup_outside_hat_K_m"), worst, p.threshold));
            report.note(&format!("chain_m{m}_violations"), json!(violations));
        }
        report.note("inside_distribution", inner.describe());
    }
    Ok(report)
}
