//! The dual transform of functions on X and the pairing `⟨RT, ψ⟩ = ⟨T, R*ψ⟩`.

use crate::distributions::measure::{apply, DensityQuad, TestDistribution};
use crate::distributions::mollify::monomial;
use crate::distributions::XFunction;
use crate::numerics::SphereGrid;
use crate::point::{pairing, Point};
use crate::transform::SmoothFunction;
use crate::{Result, C64};

/// `∂^p ∂̄^q [R*ψ](z) = ∫_{S³} ∂_s^{|p|} ∂_s̄^{|q|} ψ(w, ⟨z, w⟩) w^p w̄^q dσ(w)`.
pub fn dual_of_test(psi: &XFunction, z: &Point, p: [u32; 2], q: [u32; 2], sphere: &SphereGrid) -> Result<C64> {
    let (dp, dq) = (p[0] + p[1], q[0] + q[1]);
    sphere.integrate(|_, w| {
        let v = if dp + dq == 0 { psi.value(w, pairing(z, w)) } else { psi.s_derivative(w, pairing(z, w), dp, dq)? };
        Ok(v * monomial(w, p, q))
    })
}

/// `R*ψ` as a function on C² with analytic derivatives.
#[derive(Clone, Copy, Debug)]
pub struct DualFunction<'a> {
    pub psi: &'a XFunction,
    pub sphere: &'a SphereGrid,
}

impl SmoothFunction for DualFunction<'_> {
    fn value(&self, z: &Point) -> C64 {
        dual_of_test(self.psi, z, [0, 0], [0, 0], self.sphere).unwrap_or(C64::new(f64::NAN, f64::NAN))
    }

    fn derivative(&self, z: &Point, p: [u32; 2], q: [u32; 2]) -> Result<C64> {
        dual_of_test(self.psi, z, p, q, self.sphere)
    }
}

/// `⟨RT, ψ⟩ := ⟨T, R*ψ⟩`.
pub fn radon_pair(t: &TestDistribution, psi: &XFunction, sphere: &SphereGrid, quad: &DensityQuad) -> Result<C64> {
    apply(t, &DualFunction { psi, sphere }, quad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{Profile, SPHERE_AREA};
    use crate::point::ORIGIN;
    use crate::transform::radon::dual_fn;
    use std::f64::consts::PI;

    fn s_only() -> XFunction {
        XFunction::new(vec![crate::distributions::XTerm { a: 1, ..crate::distributions::XTerm::radial(Profile::Constant) }])
            .unwrap()
    }

    #[test]
    fn odd_moments_vanish() {
        let sphere = SphereGrid::new(6, 8).unwrap();
        let psi = s_only();
        let z = [C64::new(0.7, 0.2), C64::new(-0.4, 1.1)];
        assert!(dual_of_test(&psi, &z, [1, 0], [0, 0], &sphere).unwrap().norm() < 1e-13);
        assert!(dual_of_test(&psi, &z, [0, 0], [0, 0], &sphere).unwrap().norm() < 1e-13);
    }

    #[test]
    fn zero_order_is_dual() {
        let sphere = SphereGrid::new(6, 8).unwrap();
        let psi = XFunction::radial(Profile::Gaussian { width: 1.0 }).unwrap();
        let z = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let a = dual_of_test(&psi, &z, [0, 0], [0, 0], &sphere).unwrap();
        let b = dual_fn(|w, s| psi.value(w, s), &z, &sphere).unwrap();
        assert_eq!(a, b);
        let exact = SPHERE_AREA * (1.0 - (-1.0f64).exp());
        assert!((a.re - exact).abs() < 1e-9);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let sphere = SphereGrid::new(6, 8).unwrap();
        let psi = XFunction::radial(Profile::Gaussian { width: 0.9 }).unwrap();
        let z = [C64::new(0.3, -0.1), C64::new(0.2, 0.5)];
        let f = DualFunction { psi: &psi, sphere: &sphere };
        let h = 1e-5;
        // ∂_{z₁} = ½(∂_x − i∂_y) in z₁ = x + iy.
        let dx = (f.value(&[z[0] + h, z[1]]) - f.value(&[z[0] - h, z[1]])) / (2.0 * h);
        let dy = (f.value(&[z[0] + C64::new(0.0, h), z[1]]) - f.value(&[z[0] - C64::new(0.0, h), z[1]])) / (2.0 * h);
        let fd = 0.5 * (dx - C64::new(0.0, 1.0) * dy);
        let an = f.derivative(&z, [1, 0], [0, 0]).unwrap();
        assert!((fd - an).norm() < 1e-8, "{fd} vs {an}");
    }

    #[test]
    fn delta_pairing_is_dual_value() {
        let sphere = SphereGrid::new(6, 8).unwrap();
        let psi = XFunction::radial(Profile::GaussianCutoff { width: 1.0, inner: 2.0, outer: 3.0 }).unwrap();
        let quad = DensityQuad::default();
        let v = radon_pair(&TestDistribution::delta(ORIGIN, C64::new(1.0, 0.0)), &psi, &sphere, &quad).unwrap();
        assert!((v.re - 2.0 * PI * PI).abs() < 1e-12);
    }
}
