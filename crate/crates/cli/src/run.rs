//! Execution of parsed experiments and report output.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use cradon_core::harness::{
    check_calibration, check_dual_bound, check_duality, check_forward, check_geometry, check_lemma1,
    check_real_radon_bridge, check_round_trip, default_probes, dual_bound_probes, support_converse,
    support_forward, ExperimentReport, Status,
};
use cradon_core::numerics::{SGrid, Sinogram, SphereGrid};
use cradon_core::transform::container::{write_sinogram, write_volume};
use cradon_core::transform::radon::{forward_sinogram, VolumeGrid};
use cradon_core::{Point, C64};

use crate::config::{Experiment, ProbeSpec};

/// Probe count, radius and seed when a `lemma1` configuration gives none.
pub const LEMMA1_PROBES: (usize, f64, u64) = (27, 2.0, 5);

/// A finished experiment and its optional data dumps.
#[derive(Debug)]
pub struct Outcome {
    pub report: ExperimentReport,
    pub sinogram: Option<Sinogram>,
    pub volume: Option<VolumeGrid>,
}

/// Failure while computing, with the experiment that raised it.
#[derive(Debug)]
pub struct RunError {
    pub experiment: &'static str,
    pub source: cradon_core::Error,
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} experiment failed: {}", self.experiment, self.source)
    }
}

impl std::error::Error for RunError {}

fn probes(spec: &Option<ProbeSpec>, default: impl FnOnce() -> Vec<Point>) -> Vec<Point> {
    match spec {
        Some(ProbeSpec::Random { count, radius, seed }) => default_probes(*count, *radius, *seed),
        Some(ProbeSpec::Points(p)) => p.clone(),
        None => default(),
    }
}

fn sinogram_on(
    f: &cradon_core::transform::TestFunction,
    n_eta: usize,
    n_theta: usize,
    extent: f64,
    count: usize,
    quad: &cradon_core::numerics::QuadParams,
) -> cradon_core::Result<Sinogram> {
    let sphere = Arc::new(SphereGrid::new(n_eta, n_theta)?);
    forward_sinogram(f, sphere, SGrid::new(C64::new(0.0, 0.0), extent, count)?, quad)
}

/// Runs the experiment. The report carries the resolved configuration, its digest and
/// the wall time.
pub fn execute(exp: &Experiment) -> Result<Outcome, RunError> {
    let start = Instant::now();
    let kind = exp.kind();
    let want_sino = exp.output().sinogram;
    let mut sinogram = None;
    let mut volume = None;
    let result: cradon_core::Result<ExperimentReport> = (|| match exp {
        Experiment::Transform(c) => {
            let f = c.function.as_ref().expect("validated");
            if want_sino {
                let p = &c.params;
                sinogram = Some(sinogram_on(f, p.n_eta, p.n_theta, p.s_radius, p.s_count, &p.quad)?);
            }
            check_forward(f, &c.params)
        }
        Experiment::Invert(c) => {
            let f = c.function.as_ref().expect("validated");
            if want_sino {
                let p = &c.params.params;
                sinogram = Some(sinogram_on(f, p.n_eta, p.n_theta, p.s_extent, p.s_count, &p.quad)?);
            }
            let (report, vol) = check_round_trip(f, &c.params)?;
            if exp.output().volume {
                volume = Some(vol);
            }
            Ok(report)
        }
        Experiment::Calibrate(c) => check_calibration(&c.params),
        Experiment::Duality(c) => {
            check_duality(c.function.as_ref().expect("validated"), c.xfunction.as_ref().expect("validated"), &c.params)
        }
        Experiment::Lemma1(c) => {
            let (n, r, seed) = LEMMA1_PROBES;
            let pts = probes(&c.probes, || default_probes(n, r, seed));
            check_lemma1(c.function.as_ref().expect("validated"), c.xfunction.as_ref().expect("validated"), &pts, &c.params)
        }
        Experiment::DualBound(c) => {
            let radius = c.radius.expect("validated");
            let pts = probes(&c.probes, || dual_bound_probes(radius));
            check_dual_bound(c.xfunction.as_ref().expect("validated"), radius, &pts, &c.params)
        }
        Experiment::SupportForward(c) => support_forward(
            c.distribution.as_ref().expect("validated"),
            c.set.as_ref().expect("validated"),
            c.margin.expect("validated"),
            &c.params,
        ),
        Experiment::SupportConverse(c) => support_converse(
            c.distribution.as_ref().expect("validated"),
            c.set.as_ref().expect("validated"),
            c.witness.as_ref().expect("validated"),
            c.inside.as_ref(),
            &c.params,
        ),
        Experiment::RealBridge(c) => {
            let f = c.function.as_ref().expect("validated");
            if want_sino {
                let p = &c.params;
                sinogram = Some(sinogram_on(f, p.n_eta, p.n_theta, p.s_extent, p.s_count, &p.quad)?);
            }
            check_real_radon_bridge(f, &c.params)
        }
        Experiment::Geometry(c) => check_geometry(c.set.as_ref().expect("validated"), &c.params),
    })();
    let mut report = result.map_err(|source| RunError { experiment: kind.name(), source })?;
    report.experiment = kind.name().to_string();
    report.config_digest = exp.digest();
    report.note("config", exp.resolved());
    report.wall_ms = start.elapsed().as_millis() as u64;
    Ok(Outcome { report, sinogram, volume })
}

/// Exit code of a report: 0 pass, 1 fail, 2 hypothesis violated.
pub fn exit_code(report: &ExperimentReport) -> u8 {
    match report.status {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::HypothesisViolated => 2,
    }
}

/// Shortest round-trip decimal, as in the JSON report.
fn number(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
}

/// One CSV row per check.
pub fn report_csv(report: &ExperimentReport) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["experiment", "config_digest", "status", "check", "measured", "reference", "tol", "pass"])?;
    let status = serde_json::to_value(report.status).expect("status serialises");
    let status = status.as_str().unwrap_or_default().to_string();
    for c in &report.checks {
        w.write_record([
            report.experiment.as_str(),
            report.config_digest.as_str(),
            status.as_str(),
            c.name.as_str(),
            &number(c.measured),
            &number(c.reference),
            &number(c.tol),
            if c.pass { "true" } else { "false" },
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields is UTF-8"))
}

/// Paths of the written artifacts.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Written {
    pub report_json: PathBuf,
    pub report_csv: PathBuf,
    pub sinogram: Option<PathBuf>,
    pub volume: Option<PathBuf>,
}

/// Writes `report.json`, `report.csv` and requested dumps into `dir`.
pub fn write_outputs(outcome: &Outcome, dir: &Path) -> std::io::Result<Written> {
    fs::create_dir_all(dir)?;
    let mut written = Written { report_json: dir.join("report.json"), report_csv: dir.join("report.csv"), ..Default::default() };
    let mut text = serde_json::to_string_pretty(&outcome.report)?;
    text.push('\n');
    fs::write(&written.report_json, text)?;
    let csv = report_csv(&outcome.report).map_err(std::io::Error::other)?;
    fs::write(&written.report_csv, csv)?;
    if let Some(s) = &outcome.sinogram {
        let path = dir.join("sinogram.crdn");
        let mut w = BufWriter::new(fs::File::create(&path)?);
        write_sinogram(&mut w, s).map_err(std::io::Error::other)?;
        written.sinogram = Some(path);
    }
    if let Some(v) = &outcome.volume {
        let path = dir.join("volume.crvl");
        let mut w = BufWriter::new(fs::File::create(&path)?);
        write_volume(&mut w, v).map_err(std::io::Error::other)?;
        written.volume = Some(path);
    }
    Ok(written)
}

/// The report without timing, as compact JSON: equal for equal configurations.
pub fn canonical_report(report: &ExperimentReport) -> String {
    serde_json::to_string(&report.without_timing()).expect("reports serialise")
}

/// Summary line for the terminal.
pub fn summary(report: &ExperimentReport) -> String {
    let passed = report.checks.iter().filter(|c| c.pass).count();
    let status = match report.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::HypothesisViolated => "HYPOTHESIS VIOLATED",
    };
    let mut line = format!("{}: {status} ({passed}/{} checks passed, {} ms)", report.experiment, report.checks.len(), report.wall_ms);
    if report.status == Status::HypothesisViolated {
        if let Some(reason) = report.provenance.get("hypothesis") {
            line.push_str(&format!(": {}", reason.as_str().map(str::to_string).unwrap_or_else(|| reason.to_string())));
        }
    }
    line
}

/// Per-check lines for verbose output.
pub fn detail(report: &ExperimentReport) -> Vec<String> {
    report
        .checks
        .iter()
        .map(|c| {
            format!(
                "  [{}] {}: measured {:e}, reference {:e}, tol {:e}",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.measured,
                c.reference,
                c.tol
            )
        })
        .collect()
}

