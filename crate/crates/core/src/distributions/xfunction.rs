//! Closed-form functions on X = S³ × C.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::geometry::CompactSet;
use crate::numerics::profile::{monomial_radial_derivative, monomial_radial_value, slots, Profile};
use crate::numerics::SphereGrid;
use crate::point::{hermitian, norm, pairing, to_pairs, Point};
use crate::{Error, Result, C64};

/// Direction-dependent factor of an [`XTerm`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Coefficient {
    #[default]
    One,
    /// `w̄₁`: phase weight −1.
    ConjW1,
    /// `|w₁|²`.
    AbsW1Sq,
    /// `exp(−1/(1 − x/ρ²))` with `x = 1 − |⟨w, d̄⟩|²`, zero for `x ≥ ρ²`; localises `w`
    /// near the circle `{d e^{iθ}}`.
    DirectionBump { direction: Point, radius: f64 },
}

impl Coefficient {
    #[inline]
    pub fn value(&self, w: &Point) -> C64 {
        match *self {
            Coefficient::One => C64::new(1.0, 0.0),
            Coefficient::ConjW1 => w[0].conj(),
            Coefficient::AbsW1Sq => C64::new(w[0].norm_sqr(), 0.0),
            Coefficient::DirectionBump { direction, radius } => {
                let x = (1.0 - hermitian(w, &direction).norm_sqr()).max(0.0);
                C64::new(Profile::Bump { radius }.value(x), 0.0)
            }
        }
    }

    /// `k` with `c(we^{iθ}) = e^{ikθ} c(w)`.
    pub fn phase_weight(&self) -> i64 {
        match self {
            Coefficient::ConjW1 => -1,
            _ => 0,
        }
    }
}

/// `amplitude · c(w) · d^a d̄^b · G(|d|²)` with `d = s − ⟨center, w⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XTerm {
    #[serde(default = "crate::point::unit_amplitude")]
    pub amplitude: C64,
    #[serde(default)]
    pub coefficient: Coefficient,
    #[serde(default)]
    pub center: Point,
    #[serde(default)]
    pub a: u32,
    #[serde(default)]
    pub b: u32,
    pub profile: Profile,
}

impl XTerm {
    /// `G(|s|²)` with unit amplitude.
    pub fn radial(profile: Profile) -> Self {
        XTerm {
            amplitude: C64::new(1.0, 0.0),
            coefficient: Coefficient::One,
            center: crate::point::ORIGIN,
            a: 0,
            b: 0,
            profile,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        if self.a > 4 || self.b > 4 {
            return Err(Error::invalid("s-monomial exponents above 4 are not supported"));
        }
        if !crate::point::is_finite(&self.center) || !(self.amplitude.re.is_finite() && self.amplitude.im.is_finite())
        {
            return Err(Error::invalid("X-term needs a finite center and amplitude"));
        }
        if let Coefficient::DirectionBump { direction, radius } = self.coefficient {
            if (norm(&direction) - 1.0).abs() > 1e-10 || !(radius > 0.0 && radius <= 1.0) {
                return Err(Error::invalid("direction bump needs a unit direction and a radius in (0, 1]"));
            }
        }
        Ok(())
    }

    pub fn is_phase_compatible(&self) -> bool {
        self.coefficient.phase_weight() + self.a as i64 - self.b as i64 == 0
    }

    #[inline]
    pub fn value(&self, w: &Point, s: C64) -> C64 {
        let c = self.coefficient.value(w);
        if c == C64::new(0.0, 0.0) {
            return c;
        }
        let d = s - pairing(&self.center, w);
        self.amplitude * c * monomial_radial_value(&[d], &[self.a], &[self.b], &self.profile)
    }

    /// `∂_s^p ∂_s̄^q` of the term, `p + q ≤ 2`.
    pub fn s_derivative(&self, w: &Point, s: C64, p: u32, q: u32) -> Result<C64> {
        if !self.profile.has_derivatives() {
            return Err(Error::DerivativeUnavailable { what: format!("{:?}", self.profile), p: [p, 0], q: [q, 0] });
        }
        let sl = slots(&[p], &[q])?;
        let c = self.coefficient.value(w);
        if c == C64::new(0.0, 0.0) {
            return Ok(c);
        }
        let d = s - pairing(&self.center, w);
        let jet = self.profile.jet(d.norm_sqr());
        Ok(self.amplitude * c * monomial_radial_derivative(&[d], &[self.a], &[self.b], jet, &sl))
    }

    /// Radius in `s` around `⟨center, w⟩` outside which the term vanishes.
    pub fn s_support(&self) -> Option<f64> {
        self.profile.support_radius()
    }
}

/// Finite sum of [`XTerm`]s.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XFunction {
    pub terms: Vec<XTerm>,
}

impl XFunction {
    pub fn new(terms: Vec<XTerm>) -> Result<Self> {
        for t in &terms {
            t.validate()?;
        }
        Ok(XFunction { terms })
    }

    pub fn zero() -> Self {
        XFunction { terms: Vec::new() }
    }

    pub fn radial(profile: Profile) -> Result<Self> {
        XFunction::new(vec![XTerm::radial(profile)])
    }

    pub fn value(&self, w: &Point, s: C64) -> C64 {
        self.terms.iter().map(|t| t.value(w, s)).sum()
    }

    pub fn s_derivative(&self, w: &Point, s: C64, p: u32, q: u32) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for t in &self.terms {
            acc += t.s_derivative(w, s, p, q)?;
        }
        Ok(acc)
    }

    pub fn is_phase_compatible(&self) -> bool {
        self.terms.iter().all(XTerm::is_phase_compatible)
    }

    /// Largest `|ψ(we^{iθ}, se^{iθ}) − ψ(w, s)|` over matched grid nodes and the given
    /// offsets, relative to the largest `|ψ|` seen.
    pub fn phase_defect(&self, sphere: &SphereGrid, offsets: &[C64]) -> f64 {
        let nt = sphere.n_theta();
        let (mut defect, mut scale) = (0.0f64, 0.0f64);
        for i in 0..sphere.len() {
            let w = sphere.node(i);
            for shift in [1, nt / 4, nt / 2] {
                let j = sphere.phase_shifted(i, shift);
                let rot = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * shift as f64 / nt as f64);
                for &s in offsets {
                    let a = self.value(w, s);
                    let b = self.value(sphere.node(j), s * rot);
                    defect = defect.max((a - b).norm());
                    scale = scale.max(a.norm());
                }
            }
        }
        if scale == 0.0 {
            defect
        } else {
            defect / scale
        }
    }

    /// Rejects functions that are not invariant under `(w, s) ↦ (we^{iθ}, se^{iθ})`,
    /// by the exponent rule and at matched grid nodes.
    pub fn check_phase_compatible(&self, sphere: &SphereGrid) -> Result<()> {
        if !self.is_phase_compatible() {
            return Err(Error::invalid("function on X is not phase compatible: phase weight of some term is nonzero"));
        }
        let offsets: Vec<C64> = (0..5).map(|k| C64::from_polar(0.3 * k as f64, 0.7 * k as f64)).collect();
        let d = self.phase_defect(sphere, &offsets);
        if d > 1e-10 {
            return Err(Error::invalid(format!("function on X is not phase compatible: defect {d:.3e} at matched nodes")));
        }
        Ok(())
    }

    /// `sup |ψ|` over the grid nodes and a polar sample of `s` within `radius`.
    pub fn sup_on_grid(&self, sphere: &SphereGrid, radius: f64) -> f64 {
        let rule = crate::numerics::PolarRule::disk(radius, 32, 32).expect("fixed rule");
        let mut m: f64 = 0.0;
        for w in sphere.nodes() {
            for s in rule.points.iter().chain(std::iter::once(&C64::new(0.0, 0.0))) {
                m = m.max(self.value(w, *s).norm());
            }
        }
        m
    }

    /// Whether at every grid node the `s`-support stays at distance `> margin` from
    /// `K_w`, i.e. `ψ` vanishes on the grid part of the `margin`-neighbourhood of `K̂`.
    pub fn vanishes_near_hat(&self, k: &CompactSet, sphere: &SphereGrid, margin: f64) -> Option<bool> {
        for t in &self.terms {
            let r = t.s_support()?;
            for w in sphere.nodes() {
                if t.coefficient.value(w) == C64::new(0.0, 0.0) {
                    continue;
                }
                if k.projection_distance(w, pairing(&t.center, w)) <= margin + r {
                    return Some(false);
                }
            }
        }
        Some(true)
    }

    pub fn describe(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|t| {
                    json!({
                        "amplitude": [t.amplitude.re, t.amplitude.im],
                        "coefficient": format!("{:?}", t.coefficient),
                        "center": to_pairs(&t.center),
                        "a": t.a,
                        "b": t.b,
                        "profile": format!("{:?}", t.profile),
                    })
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_gaussian_in_s() {
        let psi = XFunction::radial(Profile::Gaussian { width: 1.0 }).unwrap();
        let w = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let s = C64::new(0.4, -0.3);
        let v = (-s.norm_sqr()).exp();
        assert!((psi.s_derivative(&w, s, 1, 0).unwrap() - (-s.conj() * v)).norm() < 1e-15);
        let dd = psi.s_derivative(&w, s, 1, 1).unwrap();
        assert!((dd.re - (s.norm_sqr() - 1.0) * v).abs() < 1e-15);
    }

    #[test]
    fn phase_compatibility() {
        let sphere = SphereGrid::new(4, 8).unwrap();
        let ok = XFunction::new(vec![XTerm {
            amplitude: C64::new(1.0, 0.0),
            coefficient: Coefficient::ConjW1,
            center: [C64::new(0.5, 0.1), C64::new(0.0, -0.3)],
            a: 1,
            b: 0,
            profile: Profile::Gaussian { width: 0.8 },
        }])
        .unwrap();
        ok.check_phase_compatible(&sphere).unwrap();
        let bad = XFunction::new(vec![XTerm { a: 1, ..XTerm::radial(Profile::Gaussian { width: 1.0 }) }]).unwrap();
        assert!(bad.check_phase_compatible(&sphere).is_err());
        assert!(bad.phase_defect(&sphere, &[C64::new(0.5, 0.0)]) > 0.1);
    }

    #[test]
    fn direction_bump_localises() {
        let d = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let c = Coefficient::DirectionBump { direction: d, radius: 0.5 };
        assert!(c.value(&d).re > 0.0);
        assert!(c.value(&[C64::new(0.0, 1.0), C64::new(0.0, 0.0)]).re > 0.0);
        assert_eq!(c.value(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]), C64::new(0.0, 0.0));
    }

    #[test]
    fn indicator_has_no_derivatives() {
        let psi = XFunction::radial(Profile::Indicator { radius: 1.0 }).unwrap();
        let w = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        assert!(psi.s_derivative(&w, C64::new(0.0, 0.0), 1, 0).is_err());
        assert_eq!(psi.value(&w, C64::new(0.5, 0.0)), C64::new(1.0, 0.0));
    }
}
