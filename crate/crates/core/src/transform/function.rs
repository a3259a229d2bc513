//! Closed-form rapidly decreasing functions on C².

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use serde_json::{json, Value};

use crate::numerics::profile::{monomial_radial_derivative, monomial_radial_value, slots, Profile};
use crate::point::{norm, norm_sqr, pairing, sub, Point, ORIGIN};
use crate::{Error, Result, C64};

/// A function on C² with Wirtinger derivatives up to total order two.
pub trait SmoothFunction: Sync {
    fn value(&self, z: &Point) -> C64;

    /// `∂^p ∂̄^q f(z)`.
    fn derivative(&self, z: &Point, p: [u32; 2], q: [u32; 2]) -> Result<C64>;
}

/// `amplitude · (z − c)^a (z̄ − c̄)^b · G(|z − c|²)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    #[serde(default = "crate::point::unit_amplitude")]
    pub amplitude: C64,
    #[serde(default)]
    pub center: Point,
    #[serde(default)]
    pub a: [u32; 2],
    #[serde(default)]
    pub b: [u32; 2],
    pub profile: Profile,
}

impl Term {
    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        if matches!(self.profile, Profile::Constant) {
            return Err(Error::invalid("a constant profile is not rapidly decreasing"));
        }
        if !crate::point::is_finite(&self.center) || !(self.amplitude.re.is_finite() && self.amplitude.im.is_finite())
        {
            return Err(Error::invalid("test-function term must have finite center and amplitude"));
        }
        if self.a.iter().chain(&self.b).any(|&k| k > 4) {
            return Err(Error::invalid("polynomial exponents above 4 are not supported"));
        }
        Ok(())
    }

    #[inline]
    pub fn value(&self, z: &Point) -> C64 {
        self.amplitude * monomial_radial_value(&sub(z, &self.center), &self.a, &self.b, &self.profile)
    }

    pub fn derivative(&self, z: &Point, p: [u32; 2], q: [u32; 2]) -> Result<C64> {
        if !self.profile.has_derivatives() {
            return Err(Error::DerivativeUnavailable { what: format!("{:?}", self.profile), p, q });
        }
        let sl = slots(&p, &q)?;
        let d = sub(z, &self.center);
        let jet = self.profile.jet(norm_sqr(&d));
        Ok(self.amplitude * monomial_radial_derivative(&d, &self.a, &self.b, jet, &sl))
    }

    /// Radius around `center` carrying the function up to the quadrature cutoff: the
    /// support radius for compact profiles, `cutoff·σ` for Gaussians.
    pub fn effective_radius(&self, cutoff: f64) -> f64 {
        match self.profile {
            Profile::Gaussian { width } => cutoff * width,
            Profile::GaussianCutoff { width, outer, .. } => (cutoff * width).min(outer),
            _ => self.profile.support_radius().unwrap_or(cutoff),
        }
    }

    fn is_pure_gaussian(&self) -> bool {
        matches!(self.profile, Profile::Gaussian { .. }) && self.a == [0, 0] && self.b == [0, 0]
    }
}

/// Finite sum of [`Term`]s.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunction {
    pub terms: Vec<Term>,
}

impl TestFunction {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            t.validate()?;
        }
        Ok(TestFunction { terms })
    }

    pub fn zero() -> Self {
        TestFunction { terms: Vec::new() }
    }

    /// `e^{−|z − c|²/σ²}`.
    pub fn gaussian(center: Point, width: f64) -> Result<Self> {
        TestFunction::new(vec![Term {
            amplitude: C64::new(1.0, 0.0),
            center,
            a: [0, 0],
            b: [0, 0],
            profile: Profile::Gaussian { width },
        }])
    }

    /// `e^{−|z|²}`.
    pub fn unit_gaussian() -> Self {
        TestFunction::gaussian(ORIGIN, 1.0).expect("valid parameters")
    }

    /// `(z − c)^a (z̄ − c̄)^b e^{−|z − c|²/σ²}`.
    pub fn gaussian_poly(center: Point, width: f64, a: [u32; 2], b: [u32; 2]) -> Result<Self> {
        TestFunction::new(vec![Term { amplitude: C64::new(1.0, 0.0), center, a, b, profile: Profile::Gaussian { width } }])
    }

    /// `exp(−1/(1 − |z − c|²/ρ²))` on the open ball of radius `ρ`.
    pub fn bump(center: Point, radius: f64) -> Result<Self> {
        TestFunction::new(vec![Term {
            amplitude: C64::new(1.0, 0.0),
            center,
            a: [0, 0],
            b: [0, 0],
            profile: Profile::Bump { radius },
        }])
    }

    pub fn scaled(mut self, c: C64) -> Self {
        for t in &mut self.terms {
            t.amplitude *= c;
        }
        self
    }

    pub fn plus(mut self, other: TestFunction) -> Self {
        self.terms.extend(other.terms);
        self
    }

    /// Radius `ρ` with `supp φ ⊂ B̄(0, ρ)` when every term is compactly supported.
    pub fn support_radius(&self) -> Option<f64> {
        let mut r: f64 = 0.0;
        for t in &self.terms {
            r = r.max(norm(&t.center) + t.profile.support_radius()?);
        }
        Some(r)
    }

    pub fn is_compactly_supported(&self) -> bool {
        self.support_radius().is_some()
    }

    /// `φ̂(w, s)` in closed form for sums of plain Gaussians and unit `w`.
    pub fn analytic_radon(&self, w: &Point, s: C64) -> Option<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for t in &self.terms {
            if !t.is_pure_gaussian() {
                return None;
            }
            let Profile::Gaussian { width } = t.profile else { unreachable!() };
            let s2 = width * width;
            acc += t.amplitude * PI * s2 * (-(s - pairing(&t.center, w)).norm_sqr() / s2).exp();
        }
        Some(acc)
    }

    pub fn describe(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|t| {
                    json!({
                        "amplitude": [t.amplitude.re, t.amplitude.im],
                        "center": crate::point::to_pairs(&t.center),
                        "a": t.a,
                        "b": t.b,
                        "profile": format!("{:?}", t.profile),
                    })
                })
                .collect(),
        )
    }
}

impl SmoothFunction for TestFunction {
    fn value(&self, z: &Point) -> C64 {
        self.terms.iter().map(|t| t.value(z)).sum()
    }

    fn derivative(&self, z: &Point, p: [u32; 2], q: [u32; 2]) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for t in &self.terms {
            acc += t.derivative(z, p, q)?;
        }
        Ok(acc)
    }
}
