//! Product quadrature on S³ in Hopf coordinates.
//!
//! `w = (e^{iθ₁} cos η, e^{iθ₂} sin η)` with area element `cos η sin η dη dθ₁ dθ₂`.
//! The η-integral is taken in `u = cos² η`, for which the density is the constant ½,
//! and ruled by Gauss–Legendre on [0, 1]; θ₁, θ₂ use the uniform periodic trapezoid.

use std::f64::consts::PI;

use crate::numerics::gauss::gauss_legendre;
use crate::numerics::sum::pairwise_sum;
use crate::point::Point;
use crate::{Error, Result, C64};

/// Total area of S³.
pub const SPHERE_AREA: f64 = 2.0 * PI * PI;

#[derive(Clone, Debug, PartialEq)]
pub struct SphereGrid {
    n_eta: usize,
    n_theta: usize,
    nodes: Vec<Point>,
    weights: Vec<f64>,
}

impl SphereGrid {
    /// Hopf product grid with `n_eta` Gauss nodes and `n_theta` uniform angles per phase.
    /// Size check of [`SphereGrid::new`] without building the grid.
    pub fn check_sizes(n_eta: usize, n_theta: usize) -> Result<()> {
        if n_eta < 4 || n_theta < 4 {
            return Err(Error::invalid(format!(
                "sphere grid needs n_eta ≥ 4 and n_theta ≥ 4, got ({n_eta}, {n_theta})"
            )));
        }
        Ok(())
    }

    pub fn new(n_eta: usize, n_theta: usize) -> Result<Self> {
        Self::check_sizes(n_eta, n_theta)?;
        let rule = gauss_legendre(n_eta)?.mapped(0.0, 1.0);
        let dtheta = 2.0 * PI / n_theta as f64;
        let phases: Vec<C64> = (0..n_theta).map(|k| C64::from_polar(1.0, k as f64 * dtheta)).collect();
        let mut nodes = Vec::with_capacity(n_eta * n_theta * n_theta);
        let mut weights = Vec::with_capacity(nodes.capacity());
        // u ascends, so η = arccos √u descends; reverse to keep η-major ascending order.
        for i in (0..n_eta).rev() {
            let u = rule.points[i];
            let (c, s) = (u.sqrt(), (1.0 - u).sqrt());
            let w = 0.5 * rule.weights[i] * dtheta * dtheta;
            for p1 in &phases {
                for p2 in &phases {
                    nodes.push([p1 * c, p2 * s]);
                    weights.push(w);
                }
            }
        }
        Ok(SphereGrid { n_eta, n_theta, nodes, weights })
    }

    pub fn n_eta(&self) -> usize {
        self.n_eta
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn node(&self, i: usize) -> &Point {
        &self.nodes[i]
    }

    /// `(i_eta, k₁, k₂)` of a flat node index.
    pub fn split_index(&self, i: usize) -> (usize, usize, usize) {
        let nt = self.n_theta;
        (i / (nt * nt), (i / nt) % nt, i % nt)
    }

    pub fn flat_index(&self, i_eta: usize, k1: usize, k2: usize) -> usize {
        (i_eta * self.n_theta + k1) * self.n_theta + k2
    }

    /// Index of `w·e^{2πi·shift/n_theta}`.
    pub fn phase_shifted(&self, i: usize, shift: usize) -> usize {
        let (e, k1, k2) = self.split_index(i);
        let nt = self.n_theta;
        self.flat_index(e, (k1 + shift) % nt, (k2 + shift) % nt)
    }

    /// Index of the conjugate node `w̄`.
    pub fn conjugate(&self, i: usize) -> usize {
        let (e, k1, k2) = self.split_index(i);
        let nt = self.n_theta;
        self.flat_index(e, (nt - k1) % nt, (nt - k2) % nt)
    }

    /// `Σ weight·f(node)` with a fixed pairwise reduction. Non-finite values are reported
    /// with the offending node.
    pub fn integrate<F>(&self, mut f: F) -> Result<C64>
    where
        F: FnMut(usize, &Point) -> Result<C64>,
    {
        let mut terms = Vec::with_capacity(self.nodes.len());
        for (i, (w, node)) in self.weights.iter().zip(&self.nodes).enumerate() {
            let v = f(i, node)?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite {
                    op: "integrate_sphere",
                    location: format!("node {i} = {}", crate::point::fmt_point(node)),
                });
            }
            terms.push(v * *w);
        }
        Ok(pairwise_sum(&terms))
    }
}

/// `∫_{S³} f dσ` on the given grid.
pub fn integrate_sphere<F>(grid: &SphereGrid, mut f: F) -> Result<C64>
where
    F: FnMut(&Point) -> C64,
{
    grid.integrate(|_, w| Ok(f(w)))
}
