//! The radial bump `α_m`.

use std::f64::consts::PI;

use crate::numerics::gauss::gauss_legendre;
use crate::numerics::profile::{monomial_radial_derivative, slots, Profile};
use crate::point::{norm_sqr, Point};
use crate::{Error, Result, C64};

/// `∫_{C²} exp(−1/(1 − |z|²)) dω₄` over the unit ball.
pub const UNIT_BUMP_MASS: f64 = 0.382_975_584_998_471_9;

/// Tolerance on `∫ α − 1`.
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// `α_m(z) = c·exp(−1/(1 − m²|z|²))` for `|z| < 1/m`, zero outside.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mollifier {
    m: u32,
    c: f64,
}

impl Mollifier {
    /// Normalised mollifier at scale `m ≥ 1`.
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("mollifier scale m must be ≥ 1"));
        }
        let m4 = (m as f64).powi(4);
        Ok(Mollifier { m, c: m4 / UNIT_BUMP_MASS })
    }

    /// Mollifier with an explicit constant, possibly unnormalised.
    pub fn with_constant(m: u32, c: f64) -> Result<Self> {
        if m == 0 || !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid("mollifier needs m ≥ 1 and a positive constant"));
        }
        Ok(Mollifier { m, c })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn constant(&self) -> f64 {
        self.c
    }

    pub fn radius(&self) -> f64 {
        1.0 / self.m as f64
    }

    pub fn profile(&self) -> Profile {
        Profile::Bump { radius: self.radius() }
    }

    #[inline]
    pub fn value(&self, z: &Point) -> f64 {
        self.c * self.profile().value(norm_sqr(z))
    }

    /// `∂^p ∂̄^q α(z)` for `|p| + |q| ≤ 2`.
    pub fn derivative(&self, z: &Point, p: [u32; 2], q: [u32; 2]) -> Result<C64> {
        let sl = slots(&p, &q)?;
        let jet = self.profile().jet(norm_sqr(z));
        Ok(monomial_radial_derivative(z, &[0, 0], &[0, 0], jet, &sl) * self.c)
    }

    /// `∫ α dω₄` by Gauss–Legendre in `u = m²|z|²`: `(c/m⁴)·π²·∫₀¹ u e^{−1/(1−u)} du`.
    pub fn integral(&self) -> f64 {
        let rule = gauss_legendre(16).expect("fixed rule");
        let panels = 64;
        let mut total = 0.0;
        for k in 0..panels {
            let a = k as f64 / panels as f64;
            let b = (k + 1) as f64 / panels as f64;
            let r = rule.mapped(a, b);
            for (u, w) in r.points.iter().zip(&r.weights) {
                total += w * u * (-1.0 / (1.0 - u)).exp();
            }
        }
        self.c / (self.m as f64).powi(4) * PI * PI * total
    }

    pub fn check_normalized(&self) -> Result<()> {
        let err = (self.integral() - 1.0).abs();
        if err > NORMALIZATION_TOL {
            return Err(Error::invalid(format!("mollifier is not normalised: |∫α − 1| = {err:.3e}")));
        }
        Ok(())
    }
}
