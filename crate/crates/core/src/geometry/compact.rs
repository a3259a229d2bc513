//! Compact subsets of C² with exact distance and projection-distance formulas.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use rand::Rng;

use crate::geometry::Hyperplane;
use crate::point::{fmt_point, norm, pairing, sub, Point};
use crate::{Error, Result, C64};

/// A compact set `K ⊂ C²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CompactSet {
    /// Closed Euclidean ball.
    Ball { center: Point, radius: f64 },
    /// Closed polydisc `|z_j − c_j| ≤ r_j`.
    Polydisc { center: Point, radii: [f64; 2] },
    /// Finite point set.
    #[serde(alias = "point")]
    Points(Vec<Point>),
    Union(Vec<CompactSet>),
    /// `{(z₁, 0) : inner ≤ |z₁| ≤ outer}`.
    #[serde(alias = "annulus2d")]
    EmbeddedAnnulus { inner: f64, outer: f64 },
    /// `{z : dist(z, base) ≤ eps}`.
    Dilation { base: Box<CompactSet>, eps: f64 },
}

/// Kind tag of a [`CompactSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetKind {
    Ball,
    Polydisc,
    FinitePointSet,
    UnionOfBalls,
    EmbeddedAnnulus,
    Dilation,
}

fn finite_point(z: &Point) -> bool {
    crate::point::is_finite(z)
}

impl CompactSet {
    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        let k = CompactSet::Ball { center, radius };
        k.validate()?;
        Ok(k)
    }

    pub fn point(at: Point) -> Result<Self> {
        let k = CompactSet::Points(vec![at]);
        k.validate()?;
        Ok(k)
    }

    pub fn annulus(inner: f64, outer: f64) -> Result<Self> {
        let k = CompactSet::EmbeddedAnnulus { inner, outer };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CompactSet::Ball { center, radius } => {
                if !finite_point(center) || !(*radius >= 0.0 && radius.is_finite()) {
                    return Err(Error::invalid(format!("ball needs a finite center and radius ≥ 0, got {radius}")));
                }
            }
            CompactSet::Polydisc { center, radii } => {
                if !finite_point(center) || !radii.iter().all(|r| *r >= 0.0 && r.is_finite()) {
                    return Err(Error::invalid("polydisc needs a finite center and radii ≥ 0"));
                }
            }
            CompactSet::Points(pts) => {
                if pts.is_empty() || !pts.iter().all(finite_point) {
                    return Err(Error::invalid("point set must be nonempty and finite"));
                }
            }
            CompactSet::Union(parts) => {
                if parts.is_empty() {
                    return Err(Error::invalid("union must have at least one member"));
                }
                for p in parts {
                    p.validate()?;
                }
            }
            CompactSet::EmbeddedAnnulus { inner, outer } => {
                if !(*inner >= 0.0 && outer > inner && outer.is_finite()) {
                    return Err(Error::invalid(format!("annulus needs 0 ≤ inner < outer, got {inner}, {outer}")));
                }
            }
            CompactSet::Dilation { base, eps } => {
                if !(*eps > 0.0 && eps.is_finite()) {
                    return Err(Error::invalid(format!("dilation radius must be positive, got {eps}")));
                }
                base.validate()?;
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> SetKind {
        match self {
            CompactSet::Ball { .. } => SetKind::Ball,
            CompactSet::Polydisc { .. } => SetKind::Polydisc,
            CompactSet::Points(_) => SetKind::FinitePointSet,
            CompactSet::Union(_) => SetKind::UnionOfBalls,
            CompactSet::EmbeddedAnnulus { .. } => SetKind::EmbeddedAnnulus,
            CompactSet::Dilation { .. } => SetKind::Dilation,
        }
    }

    /// `R_K` with `K ⊂ B̄(0, R_K)`.
    pub fn bound(&self) -> f64 {
        match self {
            CompactSet::Ball { center, radius } => norm(center) + radius,
            CompactSet::Polydisc { center, radii } => norm(center) + radii[0].hypot(radii[1]),
            CompactSet::Points(pts) => pts.iter().map(norm).fold(0.0, f64::max),
            CompactSet::Union(parts) => parts.iter().map(|p| p.bound()).fold(0.0, f64::max),
            CompactSet::EmbeddedAnnulus { outer, .. } => *outer,
            CompactSet::Dilation { base, eps } => base.bound() + eps,
        }
    }

    /// Euclidean distance from `z` to `K`.
    pub fn distance(&self, z: &Point) -> f64 {
        match self {
            CompactSet::Ball { center, radius } => (norm(&sub(z, center)) - radius).max(0.0),
            CompactSet::Polydisc { center, radii } => {
                let a = ((z[0] - center[0]).norm() - radii[0]).max(0.0);
                let b = ((z[1] - center[1]).norm() - radii[1]).max(0.0);
                a.hypot(b)
            }
            CompactSet::Points(pts) => pts.iter().map(|p| norm(&sub(z, p))).fold(f64::INFINITY, f64::min),
            CompactSet::Union(parts) => parts.iter().map(|p| p.distance(z)).fold(f64::INFINITY, f64::min),
            CompactSet::EmbeddedAnnulus { inner, outer } => {
                let r = z[0].norm();
                let radial = (inner - r).max(r - outer).max(0.0);
                radial.hypot(z[1].norm())
            }
            CompactSet::Dilation { base, eps } => (base.distance(z) - eps).max(0.0),
        }
    }

    pub fn contains(&self, z: &Point) -> bool {
        self.distance(z) <= 0.0
    }

    /// `dist(s, K_w)` where `K_w = {⟨z, w⟩ : z ∈ K}` for a unit `w`.
    pub fn projection_distance(&self, w: &Point, s: C64) -> f64 {
        match self {
            CompactSet::Ball { center, radius } => ((s - pairing(center, w)).norm() - radius).max(0.0),
            CompactSet::Polydisc { center, radii } => {
                let r = radii[0] * w[0].norm() + radii[1] * w[1].norm();
                ((s - pairing(center, w)).norm() - r).max(0.0)
            }
            CompactSet::Points(pts) => pts.iter().map(|p| (s - pairing(p, w)).norm()).fold(f64::INFINITY, f64::min),
            CompactSet::Union(parts) => {
                parts.iter().map(|p| p.projection_distance(w, s)).fold(f64::INFINITY, f64::min)
            }
            CompactSet::EmbeddedAnnulus { inner, outer } => {
                let a = w[0].norm();
                let r = s.norm();
                (inner * a - r).max(r - outer * a).max(0.0)
            }
            CompactSet::Dilation { base, eps } => (base.projection_distance(w, s) - eps).max(0.0),
        }
    }

    /// A point cloud of `K`, biased towards the boundary, for brute-force checks and
    /// the sampled projection raster.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<Point> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(self.sample_one(rng));
        }
        out
    }

    fn sample_one<R: Rng>(&self, rng: &mut R) -> Point {
        match self {
            CompactSet::Ball { center, radius } => {
                let w = random_unit(rng);
                let r = radius * biased_radius(rng, 4);
                [center[0] + w[0] * r, center[1] + w[1] * r]
            }
            CompactSet::Polydisc { center, radii } => {
                let a = C64::from_polar(radii[0] * biased_radius(rng, 2), rng.gen::<f64>() * 2.0 * PI);
                let b = C64::from_polar(radii[1] * biased_radius(rng, 2), rng.gen::<f64>() * 2.0 * PI);
                [center[0] + a, center[1] + b]
            }
            CompactSet::Points(pts) => pts[rng.gen_range(0..pts.len())],
            CompactSet::Union(parts) => parts[rng.gen_range(0..parts.len())].sample_one(rng),
            CompactSet::EmbeddedAnnulus { inner, outer } => {
                let u: f64 = rng.gen();
                // Half of the samples sit on the two boundary circles.
                let r = if u < 0.25 {
                    *inner
                } else if u < 0.5 {
                    *outer
                } else {
                    (inner * inner + rng.gen::<f64>() * (outer * outer - inner * inner)).sqrt()
                };
                [C64::from_polar(r, rng.gen::<f64>() * 2.0 * PI), C64::new(0.0, 0.0)]
            }
            CompactSet::Dilation { base, eps } => {
                let z = base.sample_one(rng);
                let w = random_unit(rng);
                let r = eps * biased_radius(rng, 4);
                [z[0] + w[0] * r, z[1] + w[1] * r]
            }
        }
    }
}

/// Radius in [0, 1]: one sample in four on the boundary, the rest volume-uniform in
/// dimension `dim`.
fn biased_radius<R: Rng>(rng: &mut R, dim: i32) -> f64 {
    if rng.gen::<f64>() < 0.25 {
        1.0
    } else {
        rng.gen::<f64>().powf(1.0 / dim as f64)
    }
}

/// Uniform point on S³.
pub fn random_unit<R: Rng>(rng: &mut R) -> Point {
    loop {
        let v: [f64; 4] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-6 && n2 <= 1.0 {
            let n = n2.sqrt();
            return [C64::new(v[0] / n, v[1] / n), C64::new(v[2] / n, v[3] / n)];
        }
    }
}

/// `K_ε`. Balls stay balls and points become balls; other kinds are wrapped.
pub fn dilate(k: &CompactSet, eps: f64) -> Result<CompactSet> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("dilation radius must be positive, got {eps}")));
    }
    k.validate()?;
    Ok(match k {
        CompactSet::Ball { center, radius } => CompactSet::Ball { center: *center, radius: radius + eps },
        CompactSet::Points(pts) if pts.len() == 1 => CompactSet::Ball { center: pts[0], radius: eps },
        CompactSet::Points(pts) => {
            CompactSet::Union(pts.iter().map(|p| CompactSet::Ball { center: *p, radius: eps }).collect())
        }
        other => CompactSet::Dilation { base: Box::new(other.clone()), eps },
    })
}

fn unit_plane(h: &Hyperplane) -> Hyperplane {
    if h.has_unit_normal() {
        *h
    } else {
        h.normalized()
    }
}

/// Whether the hyperplane meets `K` up to `tol`: `dist(s, K_w) ≤ tol`.
pub fn hat_contains(k: &CompactSet, h: &Hyperplane, tol: f64) -> bool {
    let h = unit_plane(h);
    k.projection_distance(&h.normal, h.offset) <= tol
}

/// Membership in `K̂_m`: `dist(s, K_w) ≤ 1/m`.
pub fn hat_dilate_contains(k: &CompactSet, m: u32, h: &Hyperplane) -> Result<bool> {
    if m < 1 {
        return Err(Error::invalid("hat dilation needs m ≥ 1"));
    }
    Ok(hat_contains(k, h, 1.0 / m as f64))
}

/// Rejects probes inside `K` with a diagnostic.
pub(crate) fn require_outside(k: &CompactSet, z: &Point) -> Result<()> {
    if k.contains(z) {
        return Err(Error::invalid(format!("point {} lies in the compact set", fmt_point(z))));
    }
    Ok(())
}
