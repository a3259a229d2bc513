//! Escape paths in `C ∖ K_w`, separating hyperplanes and linear-convexity evidence.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::geometry::compact::require_outside;
use crate::geometry::raster::{complement_connected, project};
use crate::geometry::{CompactSet, Hyperplane, ProjectionRegion};
use crate::numerics::SphereGrid;
use crate::point::{pairing, Point};
use crate::{Error, Result, C64};

/// Polygonal path with a recorded clearance `delta`.
#[derive(Clone, Debug, PartialEq)]
pub struct BrokenLine {
    pub vertices: Vec<C64>,
    pub delta: f64,
}

impl BrokenLine {
    /// Smallest distance to the set cells of `a` over `samples_per_segment + 1` points of
    /// each segment.
    pub fn sampled_clearance(&self, a: &ProjectionRegion, samples_per_segment: usize) -> f64 {
        let mut best = f64::INFINITY;
        for seg in self.vertices.windows(2) {
            for k in 0..=samples_per_segment {
                let t = k as f64 / samples_per_segment as f64;
                best = best.min(a.distance_to_true(seg[0] + (seg[1] - seg[0]) * t));
            }
        }
        best
    }

    pub fn end(&self) -> C64 {
        *self.vertices.last().expect("at least two vertices")
    }
}

/// Distance field to the set cells, evaluated through a precomputed cell list.
struct Obstacles {
    centers: Vec<C64>,
    half: f64,
}

impl Obstacles {
    fn new(a: &ProjectionRegion) -> Self {
        Obstacles { centers: a.true_centers(), half: 0.5 * a.cell_size() }
    }

    fn distance(&self, s: C64) -> f64 {
        let mut best = f64::INFINITY;
        for c in &self.centers {
            let dx = ((s.re - c.re).abs() - self.half).max(0.0);
            let dy = ((s.im - c.im).abs() - self.half).max(0.0);
            best = best.min(dx.hypot(dy));
        }
        best
    }

    /// Segment clearance strictly above `delta`, by sampling with step `step`: every
    /// point of the segment is within `step/2` of a sample.
    fn segment_clear(&self, a: C64, b: C64, delta: f64, step: f64) -> bool {
        let len = (b - a).norm();
        let n = ((len / step).ceil() as usize).max(1);
        let slack = 0.5 * len / n as f64;
        (0..=n).all(|k| self.distance(a + (b - a) * (k as f64 / n as f64)) > delta + slack)
    }
}

/// Search lattice over the square `±half` with spacing `h`.
struct Lattice {
    half: f64,
    h: f64,
    n: usize,
}

impl Lattice {
    fn point(&self, i: usize) -> C64 {
        C64::new(-self.half + (i % self.n) as f64 * self.h, -self.half + (i / self.n) as f64 * self.h)
    }

    fn nearest(&self, s: C64) -> (isize, isize) {
        (((s.im + self.half) / self.h).round() as isize, ((s.re + self.half) / self.h).round() as isize)
    }
}

fn try_escape(a: &ProjectionRegion, obstacles: &Obstacles, s0: C64, r: f64, delta: f64) -> Option<BrokenLine> {
    let h = a.cell_size();
    let step = (0.25 * h).min(0.25 * delta.max(h / 16.0));
    let exit_radius = r + h;

    // Straight radial escape first.
    let dir = if s0.norm() > 0.0 { s0 / s0.norm() } else { C64::new(1.0, 0.0) };
    let radial_end = dir * exit_radius;
    if obstacles.segment_clear(s0, radial_end, delta, step) {
        return Some(BrokenLine { vertices: vec![s0, radial_end], delta });
    }

    let half = exit_radius + 2.0 * h;
    let n = (2.0 * half / h).ceil() as usize + 1;
    let lat = Lattice { half, h, n };
    let need = delta + 0.5 * h;
    let free: Vec<bool> = (0..n * n).into_par_iter().map(|i| obstacles.distance(lat.point(i)) > need).collect();

    // Entry: nearest free lattice nodes around s0 reachable by a clear segment.
    let (r0, c0) = lat.nearest(s0);
    let mut start = None;
    'search: for ring in 0..4isize {
        for dr in -ring..=ring {
            for dc in -ring..=ring {
                if dr.abs().max(dc.abs()) != ring {
                    continue;
                }
                let (rr, cc) = (r0 + dr, c0 + dc);
                if rr < 0 || cc < 0 || rr >= n as isize || cc >= n as isize {
                    continue;
                }
                let i = rr as usize * n + cc as usize;
                if free[i] && obstacles.segment_clear(s0, lat.point(i), delta, step) {
                    start = Some(i);
                    break 'search;
                }
            }
        }
    }
    let start = start?;

    let mut parent = vec![usize::MAX; n * n];
    parent[start] = start;
    let mut queue = VecDeque::from([start]);
    let mut goal = None;
    while let Some(i) = queue.pop_front() {
        if lat.point(i).norm() > exit_radius {
            goal = Some(i);
            break;
        }
        let (row, col) = (i / n, i % n);
        let nbrs = [
            (row > 0).then(|| i - n),
            (row + 1 < n).then(|| i + n),
            (col > 0).then(|| i - 1),
            (col + 1 < n).then(|| i + 1),
        ];
        for j in nbrs.into_iter().flatten() {
            if free[j] && parent[j] == usize::MAX {
                parent[j] = i;
                queue.push_back(j);
            }
        }
    }
    let goal = goal?;
    let mut chain = vec![goal];
    while *chain.last().unwrap() != start {
        let last = *chain.last().unwrap();
        chain.push(parent[last]);
    }
    chain.reverse();
    let mut pts = vec![s0];
    pts.extend(chain.iter().map(|&i| lat.point(i)));

    // Greedy shortcutting; every kept segment is re-verified.
    let mut vertices = vec![pts[0]];
    let mut i = 0;
    while i + 1 < pts.len() {
        let mut j = pts.len() - 1;
        while j > i + 1 && !obstacles.segment_clear(pts[i], pts[j], delta, step) {
            j -= 1;
        }
        vertices.push(pts[j]);
        i = j;
    }
    vertices.dedup();
    (vertices.len() >= 2).then_some(BrokenLine { vertices, delta })
}

/// Broken line from `s0` to `|s| > r` keeping distance above `delta` from the set cells
/// of `a`. On failure reports the largest clearance for which a path was found.
pub fn escape_path(a: &ProjectionRegion, s0: C64, r: f64, delta: f64) -> Result<BrokenLine> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid(format!("clearance must be positive, got {delta}")));
    }
    if !(r > a.half_width) {
        return Err(Error::invalid(format!("escape radius {r} must exceed the window radius {}", a.half_width)));
    }
    let obstacles = Obstacles::new(a);
    let d0 = obstacles.distance(s0);
    if !(d0 > delta) {
        return Err(Error::invalid(format!("start point is at distance {d0} ≤ {delta} from the set")));
    }
    if let Some(path) = try_escape(a, &obstacles, s0, r, delta) {
        return Ok(path);
    }
    // Bisection on the clearance; a path at clearance `lo` exists whenever lo > 0.
    let (mut lo, mut hi) = (0.0, delta);
    let floor = a.cell_size() / 64.0;
    if try_escape(a, &obstacles, s0, r, floor).is_some() {
        lo = floor;
        for _ in 0..20 {
            let mid = 0.5 * (lo + hi);
            if try_escape(a, &obstacles, s0, r, mid).is_some() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    Err(Error::NoEscapePath { requested: delta, achievable: lo })
}

/// Outcome of a linear-convexity probe sweep.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvexityReport {
    /// Probes for which a missing hyperplane through the probe was found.
    pub witnessed: usize,
    /// Indices of probes without a witness on the direction grid.
    pub failed: Vec<usize>,
    /// Indices of probes inside `K`, with diagnostics.
    pub rejected: Vec<(usize, String)>,
}

/// Evidence for linear convexity: for each probe `z ∉ K`, looks for a grid direction
/// `w` with `⟨z, w⟩ ∉ K_w`. A grid search, not a certificate.
pub fn is_linearly_convex(k: &CompactSet, probes: &[Point], directions: &SphereGrid) -> ConvexityReport {
    let outcomes: Vec<std::result::Result<bool, String>> = probes
        .par_iter()
        .map(|z| {
            require_outside(k, z).map_err(|e| e.to_string())?;
            Ok(directions.nodes().iter().any(|w| k.projection_distance(w, pairing(z, w)) > 0.0))
        })
        .collect();
    let mut report = ConvexityReport::default();
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(true) => report.witnessed += 1,
            Ok(false) => report.failed.push(i),
            Err(msg) => report.rejected.push((i, msg)),
        }
    }
    report
}

/// First grid direction `w₀` (in grid order) whose hyperplane through `z0` misses `K`,
/// together with the connectivity of `C ∖ K_{w₀}` on a raster of `resolution`.
pub fn find_separating_hyperplane(
    k: &CompactSet,
    z0: &Point,
    directions: &SphereGrid,
    resolution: usize,
) -> Result<(Hyperplane, bool)> {
    require_outside(k, z0)?;
    for w in directions.nodes() {
        let s = pairing(z0, w);
        if k.projection_distance(w, s) > 0.0 {
            let connected = complement_connected(&project(k, w, resolution)?)?;
            return Ok((Hyperplane::new(*w, s)?, connected));
        }
    }
    Err(Error::NoSeparatingDirection)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> Point {
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    }

    #[test]
    fn radial_escape_from_disk() {
        let k = CompactSet::ball(crate::point::ORIGIN, 1.0).unwrap();
        let a = project(&k, &e1(), 64).unwrap();
        let path = escape_path(&a, C64::new(1.5, 0.0), 3.0, 0.1).unwrap();
        assert_eq!(path.vertices.len(), 2);
        assert!(path.end().norm() > 3.0);
        assert!(path.sampled_clearance(&a, 400) > 0.1);
    }

    #[test]
    fn escape_from_empty_set() {
        let a = ProjectionRegion::empty(C64::new(0.0, 0.0), 1.0, 16).unwrap();
        let path = escape_path(&a, C64::new(0.0, 0.0), 2.0, 0.1).unwrap();
        assert_eq!(path.vertices.len(), 2);
        assert!(path.end().norm() > 2.0);
    }

    #[test]
    fn detour_around_an_obstacle() {
        // Point set whose projection blocks the radial ray from s0.
        let k = CompactSet::ball([C64::new(1.0, 0.0), C64::new(0.0, 0.0)], 0.3).unwrap();
        let a = project(&k, &e1(), 64).unwrap();
        let path = escape_path(&a, C64::new(0.2, 0.0), a.half_width + 0.5, 0.1).unwrap();
        assert!(path.end().norm() > a.half_width + 0.5);
        // Not the blocked radial ray.
        assert!(path.end().arg().abs() > 0.1 || path.vertices.len() > 2);
        assert!(path.sampled_clearance(&a, 2000) > 0.1);
        for v in path.vertices.windows(2) {
            assert_ne!(v[0], v[1]);
        }
    }

    #[test]
    fn no_escape_from_annulus_hole() {
        let k = CompactSet::annulus(0.5, 1.0).unwrap();
        let a = project(&k, &e1(), 64).unwrap();
        match escape_path(&a, C64::new(0.0, 0.0), 3.0, 0.1) {
            Err(Error::NoEscapePath { requested, achievable }) => {
                assert_eq!(requested, 0.1);
                assert_eq!(achievable, 0.0);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn separating_hyperplanes() {
        let dirs = SphereGrid::new(8, 8).unwrap();
        let ball = CompactSet::ball(crate::point::ORIGIN, 1.0).unwrap();
        let z0 = [C64::new(2.0, 0.0), C64::new(0.0, 0.0)];
        let (h, connected) = find_separating_hyperplane(&ball, &z0, &dirs, 32).unwrap();
        assert!(ball.projection_distance(&h.normal, h.offset) > 0.0);
        assert!(connected);
        assert!(find_separating_hyperplane(&ball, &crate::point::ORIGIN, &dirs, 32).is_err());

        let origin = CompactSet::point(crate::point::ORIGIN).unwrap();
        let (_, c) = find_separating_hyperplane(&origin, &e1(), &dirs, 32).unwrap();
        assert!(c);

        let ann = CompactSet::annulus(0.5, 1.0).unwrap();
        let (h, c) = find_separating_hyperplane(&ann, &crate::point::ORIGIN, &dirs, 64).unwrap();
        assert_eq!(h.offset, C64::new(0.0, 0.0));
        assert!(!c);
    }

    #[test]
    fn convexity_evidence() {
        let dirs = SphereGrid::new(8, 8).unwrap();
        let ball = CompactSet::ball(crate::point::ORIGIN, 1.0).unwrap();
        let probes: Vec<Point> = dirs.nodes().iter().step_by(7).map(|w| [w[0] * 1.5, w[1] * 1.5]).collect();
        let rep = is_linearly_convex(&ball, &probes, &SphereGrid::new(32, 32).unwrap());
        assert_eq!(rep.witnessed, probes.len());
        assert!(rep.failed.is_empty());
        let rep = is_linearly_convex(&ball, &[crate::point::ORIGIN], &dirs);
        assert_eq!(rep.rejected.len(), 1);
    }
}
