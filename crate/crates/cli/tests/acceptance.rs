//! The eleven acceptance criteria, one summary line each. Lines go straight to the
//! process stderr so they show up without `--nocapture`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use cradon::run::canonical_report;
use cradon::{execute, exit_code, parse, Outcome};
use cradon_core::harness::{BridgeParams, ExperimentReport};
use cradon_core::numerics::{SGrid, SphereGrid};
use cradon_core::transform::radon::forward_sinogram;
use cradon_core::transform::{real_radon_direct, real_radon_from_complex, TestFunction};
use cradon_core::C64;

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn run_fixture(name: &str) -> (Outcome, Duration) {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    let exp = parse(&text, &[]).unwrap_or_else(|e| panic!("{name}: {e}"));
    let start = Instant::now();
    let out = execute(&exp).unwrap_or_else(|e| panic!("{name}: {e}"));
    (out, start.elapsed())
}

fn check<'a>(r: &'a ExperimentReport, name: &str) -> Option<&'a cradon_core::harness::CheckRecord> {
    r.checks.iter().find(|c| c.name == name)
}

fn failing(r: &ExperimentReport) -> Vec<String> {
    r.checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect()
}

struct Ledger {
    lines: Vec<(bool, String)>,
    first_runs: BTreeMap<String, String>,
}

impl Ledger {
    fn record(&mut self, id: u32, title: &str, pass: bool, detail: String) {
        let line = format!("[{}] {id:>2}. {title}: {detail}", if pass { "PASS" } else { "FAIL" });
        let _ = writeln!(std::io::stderr(), "{line}");
        self.lines.push((pass, line));
    }

    /// Runs the fixtures, keeping canonical reports for the determinism criterion.
    fn run(&mut self, names: &[&str]) -> (Vec<ExperimentReport>, Duration) {
        let mut total = Duration::ZERO;
        let mut reports = Vec::new();
        for name in names {
            let (out, t) = run_fixture(name);
            total += t;
            self.first_runs.insert(name.to_string(), canonical_report(&out.report));
            reports.push(out.report);
        }
        (reports, total)
    }
}

fn budget(t: Duration, limit_s: u64) -> (bool, String) {
    (t.as_secs_f64() < limit_s as f64, format!("{:.1} s of {limit_s} s", t.as_secs_f64()))
}

#[test]
fn acceptance_criteria() {
    let mut l = Ledger { lines: Vec::new(), first_runs: BTreeMap::new() };
    let _ = writeln!(std::io::stderr());

    // 1
    let (r, t) = l.run(&["gaussian_forward"]);
    let err = check(&r[0], "forward.max_abs_error_vs_closed_form").map(|c| c.measured).unwrap_or(f64::INFINITY);
    let (ok_t, bt) = budget(t, 10);
    l.record(1, "forward Gaussian closed form", err <= 1e-8 && r[0].passed() && ok_t, format!("max abs error {err:.2e} over |s| ≤ 3 (≤ 1e-8), {bt}"));

    // 2
    let (r, t) = l.run(&["calibrate"]);
    let c = check(&r[0], "calibrate.c_hat_vs_analytic").map(|c| c.measured).unwrap_or(f64::NAN);
    let dev = (c * 2.0 * PI.powi(3) - 1.0).abs();
    let radii = ["0", "0.5", "1"].iter().all(|x| check(&r[0], &format!("calibrate.c_hat_at_r={x}")).is_some_and(|c| c.pass));
    let (ok_t, bt) = budget(t, 60);
    l.record(2, "constant calibration", dev <= 1e-3 && radii && r[0].passed() && ok_t, format!("c = {c:.7}, relative deviation {dev:.2e}, radii 0/0.5/1 consistent: {radii}, {bt}"));

    // 3
    let (r, t) = l.run(&["gaussian_roundtrip", "shifted_gaussian_roundtrip"]);
    let errs: Vec<String> = r
        .iter()
        .map(|x| {
            let base = check(x, "invert.max_relative_error").map(|c| c.measured).unwrap_or(f64::NAN);
            let fine = check(x, "invert.refined_error_below_base").map(|c| c.measured).unwrap_or(f64::NAN);
            format!("{base:.2e} → {fine:.2e}")
        })
        .collect();
    let ok = r.iter().all(|x| x.passed() && check(x, "invert.refined_error_below_base").is_some());
    let (ok_t, bt) = budget(t, 600);
    l.record(3, "inversion round trip", ok && ok_t, format!("max relative error (base → refined) {} (≤ 2e-2, decreasing), {bt}", errs.join(", ")));

    // 4
    let (r, t) = l.run(&["duality_bump_cutoff", "duality_shifted_gaussian", "duality_weighted_bump"]);
    let worst = r.iter().filter_map(|x| check(x, "duality.relative_difference")).map(|c| c.measured).fold(0.0, f64::max);
    let ok = r.len() == 3 && r.iter().all(|x| x.passed());
    let (ok_t, bt) = budget(t, 120);
    l.record(4, "duality identity", ok && worst <= 1e-3 && ok_t, format!("worst relative difference {worst:.2e} over 3 fixtures (≤ 1e-3), {bt}"));

    // 5
    let (r, t) = l.run(&["lemma1_bump", "lemma1_weighted"]);
    let probes: Vec<usize> = r.iter().map(|x| x.checks.len()).collect();
    let worst = r.iter().flat_map(|x| x.checks.iter()).map(|c| c.measured).fold(0.0, f64::max);
    let ok = probes.iter().all(|&n| n == 27) && r.iter().all(|x| x.passed());
    let (ok_t, bt) = budget(t, 300);
    l.record(5, "convolution commutes with the dual transform", ok && worst <= 1e-3 && ok_t, format!("{probes:?} probes, worst relative difference {worst:.2e} (≤ 1e-3), {bt}"));

    // 6
    let (r, t) = l.run(&["dual_bound_indicator"]);
    let attains = ["0", "4"].iter().all(|x| check(&r[0], &format!("dual_bound.indicator_attains_at_|z|={x}")).is_some_and(|c| c.pass));
    let excess = check(&r[0], "dual_bound.max_excess_over_bound").map(|c| c.measured).unwrap_or(f64::INFINITY);
    let (ok_t, bt) = budget(t, 60);
    l.record(6, "dual bound", r[0].passed() && attains && excess <= 1e-6 && ok_t, format!("max excess {excess:.2e}, indicator attains at |z| ∈ {{0, 4R}}: {attains}, {bt}"));

    // 7
    let (r, t) = l.run(&["support_ball", "support_mollified_delta"]);
    let worst = r
        .iter()
        .map(|x| check(x, "support_forward.relative_sup_outside_margin").map(|c| c.measured).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let ok = r.iter().all(|x| x.passed());
    let (ok_t, bt) = budget(t, 300);
    l.record(7, "support theorem, forward", ok && worst <= 1e-8 && ok_t, format!("relative sinogram outside the margin band {worst:.2e} (≤ 1e-8), failing {:?}, {bt}", r.iter().flat_map(failing).collect::<Vec<_>>()));

    // 8
    let (r, t) = l.run(&["support_converse_ball"]);
    let chain: Vec<f64> = [5, 10]
        .iter()
        .map(|m| check(&r[0], &format!("chain.m={m}.relative_sup_outside_hat_K_m")).map(|c| c.measured).unwrap_or(f64::INFINITY))
        .collect();
    let (ok_t, bt) = budget(t, 300);
    l.record(8, "support theorem, proof chain", r[0].passed() && chain.iter().all(|&x| x <= 1e-8) && ok_t, format!("relative sup outside K̂_m at m = 5, 10: {:.2e}, {:.2e} (≤ 1e-8), {bt}", chain[0], chain[1]));

    // 9
    let start = Instant::now();
    let (r, _) = l.run(&["geometry_disk", "geometry_annulus"]);
    let disk = &r[0];
    let annulus = &r[1];
    let disk_ok = disk.passed()
        && check(disk, "complement connected").is_some_and(|c| c.measured == 1.0)
        && check(disk, "escape path clearance").is_some_and(|c| c.pass && c.reference == 0.1);
    let annulus_ok = annulus.passed()
        && check(annulus, "complement connected").is_some_and(|c| c.measured == 0.0)
        && check(annulus, "escape path found").is_some_and(|c| c.measured == 0.0);
    let (converse, _) = l.run(&["annulus_condition_iii"]);
    let out_dir = tempfile::tempdir().unwrap();
    let cli = Command::new(env!("CARGO_BIN_EXE_cradon"))
        .arg("run")
        .arg(fixture_path("annulus_condition_iii"))
        .arg("--out")
        .arg(out_dir.path())
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&cli.stdout);
    let violated = exit_code(&converse[0]) == 2 && cli.status.code() == Some(2) && stdout.contains("HYPOTHESIS VIOLATED");
    let (ok_t, bt) = budget(start.elapsed(), 60);
    l.record(
        9,
        "condition (iii) machinery",
        disk_ok && annulus_ok && violated && ok_t,
        format!("disk connected and escapable: {disk_ok}, annulus split and trapped: {annulus_ok}, annulus converse exits 2: {violated}, {bt}"),
    );

    // 10
    let start = Instant::now();
    let (r, _) = l.run(&["real_bridge_gaussian"]);
    let p = BridgeParams::default();
    let f = TestFunction::unit_gaussian();
    let sphere = Arc::new(SphereGrid::new(p.n_eta, p.n_theta).unwrap());
    let sino = forward_sinogram(&f, sphere.clone(), SGrid::new(C64::new(0.0, 0.0), p.s_extent, p.s_count).unwrap(), &p.quad).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..p.probes {
        let (node, t) = ((7 * k + 3) % sphere.len(), -2.0 + 0.4 * k as f64);
        let exact = PI.powf(1.5) * (-t * t).exp();
        let a = real_radon_from_complex(&sino, node, t, sino.valid_extent()).unwrap();
        let b = real_radon_direct(&f, sphere.node(node), t, &p.real_quad).unwrap();
        worst = worst.max((a - exact).norm() / exact).max((b - exact).norm() / exact);
    }
    let (ok_t, bt) = budget(start.elapsed(), 120);
    l.record(10, "real Radon bridge", r[0].passed() && worst <= 1e-4 && ok_t, format!("worst relative error of either pipeline vs π^(3/2)e^(-t²) at {} probes {worst:.2e} (≤ 1e-4), {bt}", p.probes));

    // 11
    for entry in cradon::fixtures::list(&cradon::fixtures::default_dir()).unwrap() {
        if !l.first_runs.contains_key(&entry.name) {
            l.run(&[entry.name.as_str()]);
        }
    }
    let mut differing = Vec::new();
    let names: Vec<String> = l.first_runs.keys().cloned().collect();
    for name in &names {
        let (out, _) = run_fixture(name);
        if canonical_report(&out.report) != l.first_runs[name] {
            differing.push(name.clone());
        }
    }
    l.record(11, "determinism", differing.is_empty(), format!("{} fixtures rerun, reports differing: {differing:?}", names.len()));

    let failed: Vec<&String> = l.lines.iter().filter(|(ok, _)| !ok).map(|(_, s)| s).collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("\n"));
}
