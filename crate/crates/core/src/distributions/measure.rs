//! Finite sums `T = Σ ∂^p ∂̄^q μ_pq` of derivatives of point masses and densities.

use serde::{Deserialize, Serialize};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::numerics::{pairwise_sum, BallRule, SphereGrid};
use crate::point::{fmt_point, is_finite, norm, Point};
use crate::transform::{SmoothFunction, TestFunction};
use crate::{Error, Result, C64};

/// The measure `μ_pq` of one term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Measure {
    /// `weight · δ_at`.
    Point {
        at: Point,
        #[serde(default = "crate::point::unit_amplitude")]
        weight: C64,
    },
    /// `f dω₄`.
    Density(TestFunction),
}

/// `∂^p ∂̄^q μ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistTerm {
    #[serde(default)]
    pub p: [u32; 2],
    #[serde(default)]
    pub q: [u32; 2],
    pub measure: Measure,
}

impl DistTerm {
    pub fn order(&self) -> u32 {
        self.p.iter().chain(&self.q).sum()
    }

    /// `(−1)^{|p|+|q|}`.
    pub fn sign(&self) -> f64 {
        if self.order().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestDistribution {
    pub terms: Vec<DistTerm>,
}

impl TestDistribution {
    pub fn new(terms: Vec<DistTerm>) -> Result<Self> {
        let t = TestDistribution { terms };
        t.validate()?;
        Ok(t)
    }

    pub fn zero() -> Self {
        TestDistribution { terms: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        for (k, t) in self.terms.iter().enumerate() {
            if t.order() > 2 {
                return Err(Error::invalid(format!("term {k}: derivative order {} exceeds 2", t.order())));
            }
            match &t.measure {
                Measure::Point { at, weight } => {
                    if !is_finite(at) || !(weight.re.is_finite() && weight.im.is_finite()) {
                        return Err(Error::invalid(format!("term {k}: point mass needs a finite location and weight")));
                    }
                }
                Measure::Density(f) => {
                    for term in &f.terms {
                        term.validate()?;
                    }
                }
            }
        }
        Ok(())
    }

    /// `weight · δ_at`.
    pub fn delta(at: Point, weight: C64) -> Self {
        TestDistribution { terms: vec![DistTerm { p: [0, 0], q: [0, 0], measure: Measure::Point { at, weight } }] }
    }

    /// `∂^p ∂̄^q (weight · δ_at)`.
    pub fn point_derivative(at: Point, weight: C64, p: [u32; 2], q: [u32; 2]) -> Result<Self> {
        TestDistribution::new(vec![DistTerm { p, q, measure: Measure::Point { at, weight } }])
    }

    /// The regular distribution of `f`.
    pub fn density(f: TestFunction) -> Result<Self> {
        TestDistribution::new(vec![DistTerm { p: [0, 0], q: [0, 0], measure: Measure::Density(f) }])
    }

    pub fn plus(mut self, other: TestDistribution) -> Self {
        self.terms.extend(other.terms);
        self
    }

    /// Balls `(center, radius)` covering the support, or `None` if a density is not
    /// compactly supported.
    pub fn support_balls(&self) -> Option<Vec<(Point, f64)>> {
        let mut out = Vec::new();
        for t in &self.terms {
            match &t.measure {
                Measure::Point { at, .. } => out.push((*at, 0.0)),
                Measure::Density(f) => {
                    for term in &f.terms {
                        out.push((term.center, term.profile.support_radius()?));
                    }
                }
            }
        }
        Some(out)
    }

    /// Distance from `z` to the covering balls of the support.
    pub fn support_distance(&self, z: &Point) -> Option<f64> {
        let balls = self.support_balls()?;
        Some(balls.iter().map(|(c, r)| norm(&crate::point::sub(z, c)) - r).fold(f64::INFINITY, f64::min))
    }

    pub fn has_density_derivatives(&self) -> bool {
        self.terms.iter().any(|t| matches!(t.measure, Measure::Density(_)) && t.order() > 0)
    }

    pub fn describe(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|t| {
                    let m = match &t.measure {
                        Measure::Point { at, weight } => {
                            json!({ "point": { "at": crate::point::to_pairs(at), "weight": [weight.re, weight.im] } })
                        }
                        Measure::Density(f) => json!({ "density": f.describe() }),
                    };
                    json!({ "p": t.p, "q": t.q, "measure": m })
                })
                .collect(),
        )
    }
}

/// Ball rule used to integrate densities: `n_r` Gauss radii times a Hopf grid, over the
/// support ball of each density term or the ball of radius `truncation`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityQuad {
    pub n_r: usize,
    pub n_eta: usize,
    pub n_theta: usize,
    pub truncation: f64,
}

impl Default for DensityQuad {
    fn default() -> Self {
        DensityQuad { n_r: 48, n_eta: 8, n_theta: 16, truncation: 8.0 }
    }
}

impl DensityQuad {
    pub fn validate(&self) -> Result<()> {
        if self.n_r == 0 || !(self.truncation > 0.0 && self.truncation.is_finite()) {
            return Err(Error::invalid("density quadrature needs n_r ≥ 1 and a positive truncation radius"));
        }
        SphereGrid::new(self.n_eta, self.n_theta).map(|_| ())
    }
}

/// `⟨T, φ⟩ = Σ (−1)^{|p|+|q|} ∫ ∂^p ∂̄^q φ dμ_pq`.
pub fn apply(t: &TestDistribution, phi: &dyn SmoothFunction, quad: &DensityQuad) -> Result<C64> {
    t.validate()?;
    quad.validate()?;
    let sphere = SphereGrid::new(quad.n_eta, quad.n_theta)?;
    let mut parts = Vec::with_capacity(t.terms.len());
    for term in &t.terms {
        let v = match &term.measure {
            Measure::Point { at, weight } => *weight * phi.derivative(at, term.p, term.q)?,
            Measure::Density(f) => {
                let mut acc = Vec::with_capacity(f.terms.len());
                for ft in &f.terms {
                    let radius = ft.profile.support_radius().unwrap_or(quad.truncation).min(quad.truncation);
                    let rule = BallRule::new(ft.center, radius, quad.n_r, &sphere)?;
                    let vals: Vec<C64> = rule
                        .points
                        .par_iter()
                        .zip(&rule.weights)
                        .map(|(z, w)| Ok(phi.derivative(z, term.p, term.q)? * ft.value(z) * *w))
                        .collect::<Result<_>>()?;
                    acc.push(pairwise_sum(&vals));
                }
                pairwise_sum(&acc)
            }
        };
        if !(v.re.is_finite() && v.im.is_finite()) {
            let at = match &term.measure {
                Measure::Point { at, .. } => fmt_point(at),
                Measure::Density(_) => "density".into(),
            };
            return Err(Error::NonFinite { op: "apply", location: at });
        }
        parts.push(v * term.sign());
    }
    Ok(pairwise_sum(&parts))
}
