//! The real Radon transform obtained from the complex sinogram against direct
//! quadrature over real hyperplanes in R⁴.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::json;

use crate::harness::{CheckRecord, ExperimentReport};
use crate::numerics::{QuadParams, SGrid, SphereGrid};
use crate::transform::radon::forward_sinogram;
use crate::transform::real::{real_radon_direct, real_radon_from_complex, RealQuadParams};
use crate::transform::TestFunction;
use crate::{Error, Result, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BridgeParams {
    pub n_eta: usize,
    pub n_theta: usize,
    pub s_extent: f64,
    pub s_count: usize,
    pub quad: QuadParams,
    pub real_quad: RealQuadParams,
    pub probes: usize,
    pub tol: f64,
    /// Relative level below which the sinogram and the real transform count as zero.
    pub vanish_threshold: f64,
}

impl Default for BridgeParams {
    fn default() -> Self {
        BridgeParams {
            n_eta: 4,
            n_theta: 4,
            s_extent: 5.0,
            s_count: 101,
            quad: QuadParams::default(),
            real_quad: RealQuadParams::default(),
            probes: 10,
            tol: 1e-4,
            vanish_threshold: 1e-8,
        }
    }
}

impl BridgeParams {
    pub fn validate(&self) -> Result<()> {
        if self.probes == 0 {
            return Err(Error::invalid("bridge check needs at least one probe"));
        }
        if !(self.tol > 0.0) || !(self.vanish_threshold > 0.0) {
            return Err(Error::invalid("bridge tolerances must be positive"));
        }
        SphereGrid::check_sizes(self.n_eta, self.n_theta)?;
        SGrid::new(C64::new(0.0, 0.0), self.s_extent, self.s_count)?;
        self.quad.validate()?;
        self.real_quad.validate()
    }
}

/// Probe `k` uses sphere node `(7k + 3) mod N` and `t = −2 + 0.4k`.
fn probe(k: usize, nodes: usize) -> (usize, f64) {
    ((7 * k + 3) % nodes, -2.0 + 0.4 * k as f64)
}

pub fn check_real_radon_bridge(f: &TestFunction, p: &BridgeParams) -> Result<ExperimentReport> {
    p.validate()?;
    let sphere = Arc::new(SphereGrid::new(p.n_eta, p.n_theta)?);
    let sgrid = SGrid::new(C64::new(0.0, 0.0), p.s_extent, p.s_count)?;
    let sino = forward_sinogram(f, sphere.clone(), sgrid, &p.quad)?;
    let truncation = sino.valid_extent();
    let mut report = ExperimentReport::new("real-bridge");
    report.note("function", f.describe());
    report.note(
        "resolution",
        json!({
            "sphere": [p.n_eta, p.n_theta], "s_extent": p.s_extent, "s_count": p.s_count,
            "quad": [p.quad.n_r, p.quad.n_phi, p.quad.cutoff],
            "real_quad": [p.real_quad.n_x, p.real_quad.n_r, p.real_quad.n_phi, p.real_quad.cutoff],
        }),
    );

    let pairs: Vec<(usize, f64, C64, C64)> = (0..p.probes)
        .into_par_iter()
        .map(|k| {
            let (node, t) = probe(k, sphere.len());
            let a = real_radon_from_complex(&sino, node, t, truncation)?;
            let b = real_radon_direct(f, sphere.node(node), t, &p.real_quad)?;
            Ok((node, t, a, b))
        })
        .collect::<Result<_>>()?;
    let peak = pairs.iter().map(|x| x.3.norm()).fold(0.0, f64::max);
    for (node, t, a, b) in &pairs {
        let denom = b.norm().max(1e-2 * peak);
        let err = if denom > 0.0 { (a - b).norm() / denom } else { a.norm() };
        report.push(CheckRecord::at_most(format!("node {node}, t = {t:.2}: relative difference"), err, p.tol));
    }

    // Compactness: beyond the largest |s| where the sinogram is non-negligible, the
    // direct real transform is negligible too.
    let sup = sino.max_abs();
    let h = sgrid.spacing();
    let mut r_s = 0.0f64;
    for node in 0..sino.node_count() {
        for row in 0..sgrid.count() {
            for col in 0..sgrid.count() {
                if sino.is_valid_cell(row, col) && sino.get(node, row, col).norm() > p.vanish_threshold * sup {
                    r_s = r_s.max(sgrid.point(row, col).norm());
                }
            }
        }
    }
    report.note("sinogram_support_radius", json!(r_s));
    if sup > 0.0 && r_s + 2.0 * h < truncation {
        let outside: Vec<f64> = (0..p.probes)
            .into_par_iter()
            .flat_map_iter(|k| {
                let node = probe(k, sphere.len()).0;
                [r_s + h, r_s + 2.0 * h, -(r_s + h), -(r_s + 2.0 * h)].into_iter().map(move |t| (node, t))
            })
            .map(|(node, t)| real_radon_direct(f, sphere.node(node), t, &p.real_quad).map(|v| v.norm()))
            .collect::<Result<_>>()?;
        let worst = outside.into_iter().fold(0.0, f64::max);
        let rel = if peak > 0.0 { worst / peak } else { worst };
        report.push(CheckRecord::at_most("real transform beyond the sinogram support (relative)", rel, p.vanish_threshold));
    } else {
        report.note("compactness_check", json!("skipped: sinogram does not vanish inside the valid s-region"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::ORIGIN;

    #[test]
    fn zero_function_passes() {
        let r = check_real_radon_bridge(&TestFunction::zero(), &BridgeParams { probes: 2, ..Default::default() }).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
    }

    #[test]
    fn bump_real_transform_vanishes_outside() {
        let f = TestFunction::bump(ORIGIN, 0.8).unwrap();
        let p = BridgeParams { s_extent: 2.5, s_count: 51, probes: 3, ..Default::default() };
        let r = check_real_radon_bridge(&f, &p).unwrap();
        let last = r.checks.last().unwrap();
        assert!(last.name.starts_with("real transform beyond"));
        assert!(last.pass, "{last:?}");
    }
}
