//! Radial profiles `G(u)`, `u = |d|²`, and Wirtinger derivatives of
//! `(d^a d̄^b)·G(|d|²)` up to total order two.
//!
//! Test functions on C², functions on S³ × C and the mollifier are all of this shape,
//! so one derivative routine serves all of them.

use serde::{Deserialize, Serialize};
use crate::{Error, Result, C64};

/// Value and first two derivatives of a profile with respect to `u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const ZERO: Jet = Jet { value: 0.0, d1: 0.0, d2: 0.0 };

    fn product(self, o: Jet) -> Jet {
        Jet {
            value: self.value * o.value,
            d1: self.d1 * o.value + self.value * o.d1,
            d2: self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        }
    }
}

/// A radial profile in `u = |d|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `exp(−u/σ²)`.
    Gaussian { width: f64 },
    /// `exp(−1/(1 − u/ρ²))` for `u < ρ²`, zero outside.
    Bump { radius: f64 },
    /// Smooth step in `u`: one for `|d| ≤ inner`, zero for `|d| ≥ outer`.
    SmoothCutoff { inner: f64, outer: f64 },
    /// Gaussian times smooth cutoff.
    GaussianCutoff { width: f64, inner: f64, outer: f64 },
    /// `1{|d| ≤ radius}`. No derivatives.
    Indicator { radius: f64 },
    /// Identically one.
    Constant,
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Profile::Gaussian { width } => width > 0.0 && width.is_finite(),
            Profile::Bump { radius } | Profile::Indicator { radius } => radius > 0.0 && radius.is_finite(),
            Profile::SmoothCutoff { inner, outer } => inner >= 0.0 && outer > inner && outer.is_finite(),
            Profile::GaussianCutoff { width, inner, outer } => {
                width > 0.0 && width.is_finite() && inner >= 0.0 && outer > inner && outer.is_finite()
            }
            Profile::Constant => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid profile parameters: {self:?}")))
        }
    }

    /// Radius outside of which the profile vanishes, if any.
    pub fn support_radius(&self) -> Option<f64> {
        match *self {
            Profile::Bump { radius } | Profile::Indicator { radius } => Some(radius),
            Profile::SmoothCutoff { outer, .. } | Profile::GaussianCutoff { outer, .. } => Some(outer),
            Profile::Gaussian { .. } | Profile::Constant => None,
        }
    }

    pub fn has_derivatives(&self) -> bool {
        !matches!(self, Profile::Indicator { .. })
    }

    #[inline]
    pub fn value(&self, u: f64) -> f64 {
        match *self {
            Profile::Gaussian { width } => (-u / (width * width)).exp(),
            Profile::Bump { radius } => {
                let x = u / (radius * radius);
                if x < 1.0 {
                    (-1.0 / (1.0 - x)).exp()
                } else {
                    0.0
                }
            }
            Profile::Indicator { radius } => {
                if u <= radius * radius {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Constant => 1.0,
            _ => self.jet(u).value,
        }
    }

    pub fn jet(&self, u: f64) -> Jet {
        match *self {
            Profile::Gaussian { width } => {
                let s2 = width * width;
                let g = (-u / s2).exp();
                Jet { value: g, d1: -g / s2, d2: g / (s2 * s2) }
            }
            Profile::Bump { radius } => {
                let r2 = radius * radius;
                let x = u / r2;
                if x >= 1.0 {
                    return Jet::ZERO;
                }
                let inv = 1.0 / (1.0 - x);
                let g = (-inv).exp();
                let dx = -g * inv * inv;
                let dxx = g * (inv.powi(4) - 2.0 * inv.powi(3));
                Jet { value: g, d1: dx / r2, d2: dxx / (r2 * r2) }
            }
            Profile::SmoothCutoff { inner, outer } => cutoff_jet(u, inner, outer),
            Profile::GaussianCutoff { width, inner, outer } => {
                Profile::Gaussian { width }.jet(u).product(cutoff_jet(u, inner, outer))
            }
            Profile::Indicator { .. } => Jet { value: self.value(u), d1: 0.0, d2: 0.0 },
            Profile::Constant => Jet { value: 1.0, d1: 0.0, d2: 0.0 },
        }
    }
}

/// `f(t) = exp(−1/t)` for `t > 0` with its first two derivatives.
fn flat(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let f = (-1.0 / t).exp();
    let t2 = t * t;
    (f, f / t2, f * (1.0 / (t2 * t2) - 2.0 / (t2 * t)))
}

fn cutoff_jet(u: f64, inner: f64, outer: f64) -> Jet {
    let (a2, b2) = (inner * inner, outer * outer);
    let x = (b2 - u) / (b2 - a2);
    if x >= 1.0 {
        return Jet { value: 1.0, d1: 0.0, d2: 0.0 };
    }
    if x <= 0.0 {
        return Jet::ZERO;
    }
    let (f, f1, f2) = flat(x);
    let (g, g1, g2) = flat(1.0 - x);
    let n = f;
    let d = f + g;
    let n1 = f1;
    let d1 = f1 - g1;
    let n2 = f2;
    let d2 = f2 + g2;
    let s = n / d;
    let num1 = n1 * d - n * d1;
    let s1 = num1 / (d * d);
    let s2 = (n2 * d - n * d2) / (d * d) - 2.0 * d1 * num1 / (d * d * d);
    let dxdu = -1.0 / (b2 - a2);
    Jet { value: s, d1: s1 * dxdu, d2: s2 * dxdu * dxdu }
}

/// A Wirtinger derivative slot: `∂/∂z_j` or `∂/∂z̄_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Holo(usize),
    Anti(usize),
}

/// Expands multi-indices into at most two slots.
pub fn slots(p: &[u32], q: &[u32]) -> Result<Vec<Slot>> {
    let mut out = Vec::new();
    for (j, &k) in p.iter().enumerate() {
        out.extend(std::iter::repeat_n(Slot::Holo(j), k as usize));
    }
    for (j, &k) in q.iter().enumerate() {
        out.extend(std::iter::repeat_n(Slot::Anti(j), k as usize));
    }
    if out.len() > 2 {
        return Err(Error::invalid(format!(
            "derivative order {} exceeds the supported maximum of 2",
            out.len()
        )));
    }
    Ok(out)
}

fn int_pow(x: C64, k: u32) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    for _ in 0..k {
        acc *= x;
    }
    acc
}

/// `Π d_j^{a_j} d̄_j^{b_j}` differentiated along `slots`.
fn monomial_derivative(d: &[C64], a: &[u32], b: &[u32], slots: &[Slot]) -> C64 {
    let mut coef = 1.0;
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    for s in slots {
        match *s {
            Slot::Holo(j) => {
                if a[j] == 0 {
                    return C64::new(0.0, 0.0);
                }
                coef *= a[j] as f64;
                a[j] -= 1;
            }
            Slot::Anti(j) => {
                if b[j] == 0 {
                    return C64::new(0.0, 0.0);
                }
                coef *= b[j] as f64;
                b[j] -= 1;
            }
        }
    }
    let mut acc = C64::new(coef, 0.0);
    for j in 0..d.len() {
        acc *= int_pow(d[j], a[j]) * int_pow(d[j].conj(), b[j]);
    }
    acc
}

fn slot_factor(d: &[C64], s: Slot) -> C64 {
    match s {
        Slot::Holo(j) => d[j].conj(),
        Slot::Anti(j) => d[j],
    }
}

/// `G(|d|²)` differentiated along at most two slots.
fn radial_derivative(d: &[C64], jet: Jet, slots: &[Slot]) -> C64 {
    match slots {
        [] => C64::new(jet.value, 0.0),
        [s] => slot_factor(d, *s) * jet.d1,
        [s, t] => {
            let mut v = slot_factor(d, *s) * slot_factor(d, *t) * jet.d2;
            let paired = matches!((s, t), (Slot::Holo(i), Slot::Anti(j)) | (Slot::Anti(i), Slot::Holo(j)) if i == j);
            if paired {
                v += jet.d1;
            }
            v
        }
        _ => unreachable!("at most two slots"),
    }
}

/// Wirtinger derivative of `(d^a d̄^b)·G(|d|²)` along `slots` (Leibniz over subsets).
pub fn monomial_radial_derivative(d: &[C64], a: &[u32], b: &[u32], jet: Jet, slots: &[Slot]) -> C64 {
    let n = slots.len();
    let mut total = C64::new(0.0, 0.0);
    for mask in 0..(1u32 << n) {
        let mut on_mono = Vec::with_capacity(n);
        let mut on_radial = Vec::with_capacity(n);
        for (i, s) in slots.iter().enumerate() {
            if mask & (1 << i) != 0 {
                on_mono.push(*s);
            } else {
                on_radial.push(*s);
            }
        }
        let m = monomial_derivative(d, a, b, &on_mono);
        if m == C64::new(0.0, 0.0) {
            continue;
        }
        total += m * radial_derivative(d, jet, &on_radial);
    }
    total
}

/// Plain value of `(d^a d̄^b)·G(|d|²)`.
#[inline]
pub fn monomial_radial_value(d: &[C64], a: &[u32], b: &[u32], profile: &Profile) -> C64 {
    let u: f64 = d.iter().map(|c| c.norm_sqr()).sum();
    let g = profile.value(u);
    if g == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let mut acc = C64::new(g, 0.0);
    for j in 0..d.len() {
        if a[j] > 0 {
            acc *= int_pow(d[j], a[j]);
        }
        if b[j] > 0 {
            acc *= int_pow(d[j].conj(), b[j]);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_jet(p: &Profile, u: f64) -> (f64, f64) {
        let h = 1e-4;
        let d1 = (p.value(u + h) - p.value(u - h)) / (2.0 * h);
        let d2 = (p.value(u + h) - 2.0 * p.value(u) + p.value(u - h)) / (h * h);
        (d1, d2)
    }

    #[test]
    fn jets_match_finite_differences() {
        let profiles = [
            Profile::Gaussian { width: 0.7 },
            Profile::Bump { radius: 1.3 },
            Profile::SmoothCutoff { inner: 0.5, outer: 1.5 },
            Profile::GaussianCutoff { width: 1.0, inner: 1.0, outer: 2.0 },
        ];
        for p in &profiles {
            for &u in &[0.1, 0.5, 0.9, 1.2, 1.7, 3.0] {
                let j = p.jet(u);
                let (d1, d2) = fd_jet(p, u);
                assert!((j.value - p.value(u)).abs() < 1e-15);
                assert!((j.d1 - d1).abs() < 1e-6 * (1.0 + d1.abs()), "{p:?} u={u}: {} vs {d1}", j.d1);
                assert!((j.d2 - d2).abs() < 1e-4 * (1.0 + d2.abs()), "{p:?} u={u}: {} vs {d2}", j.d2);
            }
        }
    }

    #[test]
    fn cutoff_limits() {
        let p = Profile::SmoothCutoff { inner: 1.0, outer: 2.0 };
        assert_eq!(p.value(0.5), 1.0);
        assert_eq!(p.value(4.0), 0.0);
        assert_eq!(p.value(5.0), 0.0);
        let mid = p.value(2.5);
        assert!(mid > 0.0 && mid < 1.0);
    }

    #[test]
    fn too_many_slots_rejected() {
        assert!(slots(&[2, 0], &[1, 0]).is_err());
        assert_eq!(slots(&[1, 0], &[0, 1]).unwrap(), vec![Slot::Holo(0), Slot::Anti(1)]);
    }

    /// Wirtinger derivatives against central differences in the real coordinates.
    #[test]
    fn derivatives_match_real_stencils() {
        let d0 = [C64::new(0.3, -0.2), C64::new(-0.1, 0.4)];
        let a = [1, 0];
        let b = [0, 1];
        let profile = Profile::Gaussian { width: 0.9 };
        let f = |d: &[C64; 2]| monomial_radial_value(d, &a, &b, &profile);
        let h = 1e-5;
        let partial = |d: &[C64; 2], j: usize, imag: bool| {
            let mut p = *d;
            let mut m = *d;
            let e = if imag { C64::new(0.0, h) } else { C64::new(h, 0.0) };
            p[j] += e;
            m[j] -= e;
            (f(&p) - f(&m)) / (2.0 * h)
        };
        for j in 0..2 {
            let dz = 0.5 * (partial(&d0, j, false) - C64::i() * partial(&d0, j, true));
            let dzb = 0.5 * (partial(&d0, j, false) + C64::i() * partial(&d0, j, true));
            let u: f64 = d0.iter().map(|c| c.norm_sqr()).sum();
            let jet = profile.jet(u);
            let got = monomial_radial_derivative(&d0, &a, &b, jet, &[Slot::Holo(j)]);
            let gotb = monomial_radial_derivative(&d0, &a, &b, jet, &[Slot::Anti(j)]);
            assert!((got - dz).norm() < 1e-8, "holo {j}: {got} vs {dz}");
            assert!((gotb - dzb).norm() < 1e-8, "anti {j}: {gotb} vs {dzb}");
        }
        // Second order: ∂₁∂̄₁ against the Laplacian-in-z₁ stencil / 4.
        let h2 = 1e-3;
        let mut lap = C64::new(0.0, 0.0);
        for e in [C64::new(h2, 0.0), C64::new(0.0, h2)] {
            let mut p = d0;
            let mut m = d0;
            p[0] += e;
            m[0] -= e;
            lap += (f(&p) - 2.0 * f(&d0) + f(&m)) / (h2 * h2);
        }
        let u: f64 = d0.iter().map(|c| c.norm_sqr()).sum();
        let got = monomial_radial_derivative(&d0, &a, &b, profile.jet(u), &[Slot::Holo(0), Slot::Anti(0)]);
        assert!((got - 0.25 * lap).norm() < 1e-5, "{got} vs {}", 0.25 * lap);
    }
}
