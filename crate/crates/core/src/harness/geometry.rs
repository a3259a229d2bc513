//! Checks of the condition-(iii) machinery: complement connectivity against a
//! union-find component count, sampled against exact rasters, and escape paths.

use serde::{Deserialize, Serialize};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::geometry::{
    complement_connected, escape_path, is_linearly_convex, project, project_sampled, random_unit, CompactSet,
    ProjectionRegion,
};
use crate::harness::{CheckRecord, ExperimentReport};
use crate::numerics::SphereGrid;
use crate::error::{ensure, ensure_positive};
use crate::geometry::raster::MIN_RESOLUTION;
use crate::point::{fmt_point, norm, Point};
use crate::{Error, Result, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryParams {
    pub direction: Point,
    pub resolution: usize,
    /// Point cloud size of the sampled raster.
    pub samples: usize,
    pub escape_from: C64,
    pub clearance: f64,
    pub expect_connected: Option<bool>,
    pub expect_escape: Option<bool>,
    /// Random probes outside `K` for the linear-convexity sweep (0 disables it).
    pub convexity_probes: usize,
    pub convexity_radius: f64,
    pub seed: u64,
}

impl Default for GeometryParams {
    fn default() -> Self {
        GeometryParams {
            direction: [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            resolution: 64,
            samples: 20000,
            escape_from: C64::new(0.0, 0.0),
            clearance: 0.1,
            expect_connected: None,
            expect_escape: None,
            convexity_probes: 0,
            convexity_radius: 3.0,
            seed: 11,
        }
    }
}

impl GeometryParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.resolution >= MIN_RESOLUTION, || format!("raster resolution must be ≥ {MIN_RESOLUTION}, got {}", self.resolution))?;
        ensure(self.samples >= 1, || "samples must be ≥ 1".into())?;
        ensure((norm(&self.direction) - 1.0).abs() < 1e-9, || format!("direction must be a unit vector, got norm {}", norm(&self.direction)))?;
        ensure(self.escape_from.re.is_finite() && self.escape_from.im.is_finite(), || "escape_from must be finite".into())?;
        ensure_positive("clearance", self.clearance)?;
        ensure_positive("convexity_radius", self.convexity_radius)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// 4-connected components of the free cells, with one extra node standing for the
/// unbounded frame joined to every free border cell.
pub fn union_find_components(p: &ProjectionRegion) -> usize {
    let n = p.resolution;
    let frame = n * n;
    let mut uf = UnionFind::new(n * n + 1);
    for row in 0..n {
        for col in 0..n {
            if p.get(row, col) {
                continue;
            }
            let i = row * n + col;
            if row == 0 || col == 0 || row == n - 1 || col == n - 1 {
                uf.union(i, frame);
            }
            if row + 1 < n && !p.get(row + 1, col) {
                uf.union(i, i + n);
            }
            if col + 1 < n && !p.get(row, col + 1) {
                uf.union(i, i + 1);
            }
        }
    }
    let mut roots: Vec<usize> = (0..n * n).filter(|&i| !p.bitmap[i]).map(|i| uf.find(i)).collect();
    roots.push(uf.find(frame));
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

pub fn check_geometry(k: &CompactSet, p: &GeometryParams) -> Result<ExperimentReport> {
    p.validate()?;
    k.validate()?;
    if !(p.clearance > 0.0) {
        return Err(Error::invalid(format!("clearance must be positive, got {}", p.clearance)));
    }
    let mut report = ExperimentReport::new("geometry");
    report.note("set", serde_json::to_value(k)?);
    report.note(
        "resolution",
        json!({ "raster": p.resolution, "samples": p.samples, "seed": p.seed,
                "direction": fmt_point(&p.direction) }),
    );

    let exact = project(k, &p.direction, p.resolution)?;
    let components = exact.complement_components()?;
    let oracle = union_find_components(&exact);
    report.push(CheckRecord::absolute("complement components (flood fill vs union-find)", components as f64, oracle as f64, 0.0));
    let connected = complement_connected(&exact)?;
    report.note("complement_components", json!(components));
    if let Some(expected) = p.expect_connected {
        report.push(CheckRecord::flag("complement connected", connected, expected));
    }

    // A sampled cell holds a projected point of K, so the exact raster must hold it too.
    let sampled = project_sampled(k, &p.direction, p.resolution, p.samples, p.seed)?;
    let stray = sampled.bitmap.iter().zip(&exact.bitmap).filter(|(s, e)| **s && !**e).count();
    report.push(CheckRecord::at_most("sampled cells outside the exact raster", stray as f64, 0.0));
    report.note("raster_cells", json!({ "exact": exact.count_true(), "sampled": sampled.count_true() }));

    let radius = exact.half_width * std::f64::consts::SQRT_2 + p.clearance;
    let escaped = match escape_path(&exact, p.escape_from, radius, p.clearance) {
        Ok(path) => {
            let clearance = path.sampled_clearance(&exact, 400);
            report.push(CheckRecord::at_least("escape path clearance", clearance, p.clearance));
            report.push(CheckRecord::at_least("escape path end modulus", path.end().norm(), radius));
            report.note("escape_vertices", json!(path.vertices.len()));
            true
        }
        Err(Error::NoEscapePath { requested, achievable }) => {
            report.note("escape_failure", json!({ "requested": requested, "achievable": achievable }));
            false
        }
        Err(e) => return Err(e),
    };
    if let Some(expected) = p.expect_escape {
        report.push(CheckRecord::flag("escape path found", escaped, expected));
    }

    if p.convexity_probes > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        let mut probes = Vec::with_capacity(p.convexity_probes);
        for attempt in 0..100 * p.convexity_probes {
            if probes.len() == p.convexity_probes {
                break;
            }
            let u = random_unit(&mut rng);
            let r = p.convexity_radius * (0.25 + 0.75 * ((attempt % p.convexity_probes) as f64 + 0.5) / p.convexity_probes as f64);
            let z = [u[0] * r, u[1] * r];
            if k.distance(&z) > 0.0 {
                probes.push(z);
            }
        }
        let directions = SphereGrid::new(8, 16)?;
        let sweep = is_linearly_convex(k, &probes, &directions);
        report.push(CheckRecord::absolute("probes without a missing hyperplane", sweep.failed.len() as f64, 0.0, 0.0));
        report.note("convexity_witnessed", json!(sweep.witnessed));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::ORIGIN;

    #[test]
    fn disk_is_connected_and_escapable() {
        let k = CompactSet::ball(ORIGIN, 1.0).unwrap();
        let p = GeometryParams {
            escape_from: C64::new(1.5, 0.0),
            expect_connected: Some(true),
            expect_escape: Some(true),
            convexity_probes: 8,
            ..Default::default()
        };
        let r = check_geometry(&k, &p).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
    }

    #[test]
    fn annulus_hole_is_trapped() {
        let k = CompactSet::annulus(0.5, 1.0).unwrap();
        let p = GeometryParams { expect_connected: Some(false), expect_escape: Some(false), ..Default::default() };
        let r = check_geometry(&k, &p).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.provenance["complement_components"], 2);
    }

    #[test]
    fn union_find_counts_holes() {
        let mut p = ProjectionRegion::empty(C64::new(0.0, 0.0), 1.0, 16).unwrap();
        for k in 4..=8 {
            for (r, c) in [(4, k), (8, k), (k, 4), (k, 8)] {
                p.bitmap[r * 16 + c] = true;
            }
        }
        assert_eq!(union_find_components(&p), 2);
        assert_eq!(p.complement_components().unwrap(), 2);
    }
}
