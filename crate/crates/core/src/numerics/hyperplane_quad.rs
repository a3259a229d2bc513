//! Quadrature over a complex hyperplane and over C².

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::geometry::Hyperplane;
use crate::numerics::gauss::gauss_legendre;
use crate::numerics::SphereGrid;
use crate::point::{add, Point};
use crate::{Error, Result, C64};

/// Polar rule parameters for integrals over a copy of C.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadParams {
    pub n_r: usize,
    pub n_phi: usize,
    pub cutoff: f64,
}

impl Default for QuadParams {
    fn default() -> Self {
        QuadParams { n_r: 24, n_phi: 24, cutoff: 6.0 }
    }
}

impl QuadParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_r == 0 || self.n_phi == 0 {
            return Err(Error::invalid("quadrature needs n_r ≥ 1 and n_phi ≥ 1"));
        }
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return Err(Error::invalid(format!("quadrature cutoff must be positive, got {}", self.cutoff)));
        }
        Ok(())
    }

    pub fn doubled(&self) -> QuadParams {
        QuadParams { n_r: 2 * self.n_r, n_phi: 2 * self.n_phi, cutoff: self.cutoff }
    }
}

/// Points and Lebesgue weights on the disk `|t| ≤ radius` in C.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarRule {
    pub points: Vec<C64>,
    pub weights: Vec<f64>,
}

impl PolarRule {
    /// Gauss–Legendre in the radius (with the `r dr` Jacobian), uniform in the angle.
    pub fn disk(radius: f64, n_r: usize, n_phi: usize) -> Result<PolarRule> {
        QuadParams { n_r, n_phi, cutoff: radius }.validate()?;
        let radial = gauss_legendre(n_r)?.mapped(0.0, radius);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut points = Vec::with_capacity(n_r * n_phi);
        let mut weights = Vec::with_capacity(n_r * n_phi);
        for (r, wr) in radial.points.iter().zip(&radial.weights) {
            for k in 0..n_phi {
                points.push(C64::from_polar(*r, k as f64 * dphi));
                weights.push(wr * r * dphi);
            }
        }
        Ok(PolarRule { points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn shifted(&self, center: C64) -> PolarRule {
        PolarRule { points: self.points.iter().map(|p| p + center).collect(), weights: self.weights.clone() }
    }
}

/// Isometric parametrisation `t ↦ base + t·η` of a hyperplane with unit normal ξ, where
/// `η = (−ξ₂, ξ₁)` and `base = s·ξ̄ + t₀·η`.
#[derive(Clone, Copy, Debug)]
pub struct HyperplaneFrame {
    pub base: Point,
    pub eta: Point,
}

impl HyperplaneFrame {
    /// Frame centred at the point of the hyperplane closest to `focus`.
    pub fn new(normal: &Point, offset: C64, focus: &Point) -> HyperplaneFrame {
        let eta = [-normal[1], normal[0]];
        let foot = [offset * normal[0].conj(), offset * normal[1].conj()];
        // In-plane coordinate of the projection of `focus`: Hermitian product with η.
        let t0 = focus[0] * eta[0].conj() + focus[1] * eta[1].conj();
        HyperplaneFrame { base: add(&foot, &[t0 * eta[0], t0 * eta[1]]), eta }
    }

    #[inline]
    pub fn at(&self, t: C64) -> Point {
        [self.base[0] + t * self.eta[0], self.base[1] + t * self.eta[1]]
    }
}

/// Points of `H` on a polar grid of radius `cutoff` around the foot point `s·ξ̄`, with
/// weights of the area element on `H`.
pub fn hyperplane_quadrature(h: &Hyperplane, params: &QuadParams) -> Result<(Vec<Point>, Vec<f64>)> {
    params.validate()?;
    if !h.has_unit_normal() {
        return Err(Error::invalid("hyperplane quadrature needs a unit normal; canonicalize first"));
    }
    let rule = PolarRule::disk(params.cutoff, params.n_r, params.n_phi)?;
    let frame = HyperplaneFrame::new(&h.normal, h.offset, &crate::point::ORIGIN);
    Ok((rule.points.iter().map(|&t| frame.at(t)).collect(), rule.weights))
}

/// Ball rule `center + r·w`: Gauss–Legendre in `r` with the `r³ dr` Jacobian times a
/// sphere grid in `w`. In each complex coordinate this is a polar rule with radii
/// `r cos η`, `r sin η`.
#[derive(Clone, Debug)]
pub struct BallRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl BallRule {
    pub fn new(center: Point, radius: f64, n_r: usize, sphere: &SphereGrid) -> Result<BallRule> {
        QuadParams { n_r, n_phi: 1, cutoff: radius }.validate()?;
        let radial = gauss_legendre(n_r)?.mapped(0.0, radius);
        let mut points = Vec::with_capacity(n_r * sphere.len());
        let mut weights = Vec::with_capacity(n_r * sphere.len());
        for (r, wr) in radial.points.iter().zip(&radial.weights) {
            for (w, ws) in sphere.nodes().iter().zip(sphere.weights()) {
                points.push([center[0] + w[0] * *r, center[1] + w[1] * *r]);
                weights.push(wr * r * r * r * ws);
            }
        }
        Ok(BallRule { points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Product polar rule on the bidisk `|u₁|, |u₂| ≤ radius` around `center` in C².
#[derive(Clone, Debug)]
pub struct BidiskRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl BidiskRule {
    pub fn new(center: Point, radius: f64, n_r: usize, n_phi: usize) -> Result<BidiskRule> {
        let disk = PolarRule::disk(radius, n_r, n_phi)?;
        let mut points = Vec::with_capacity(disk.len() * disk.len());
        let mut weights = Vec::with_capacity(disk.len() * disk.len());
        for (a, wa) in disk.points.iter().zip(&disk.weights) {
            for (b, wb) in disk.points.iter().zip(&disk.weights) {
                points.push([center[0] + a, center[1] + b]);
                weights.push(wa * wb);
            }
        }
        Ok(BidiskRule { points, weights })
    }

    /// Drops nodes outside the closed ball `|u − center| ≤ radius`.
    pub fn restricted_to_ball(mut self, center: Point, radius: f64) -> BidiskRule {
        let keep: Vec<bool> = self
            .points
            .iter()
            .map(|p| crate::point::norm_sqr(&crate::point::sub(p, &center)) <= radius * radius)
            .collect();
        let mut k = keep.iter();
        self.points.retain(|_| *k.next().unwrap());
        let mut k = keep.iter();
        self.weights.retain(|_| *k.next().unwrap());
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
