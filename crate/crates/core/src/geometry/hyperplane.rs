use crate::point::{fmt_point, norm, pairing, Point};
use crate::{Error, Result, C64};

/// Quantum used to snap canonical coordinates, so that phase-equivalent inputs map to
/// bitwise identical representatives.
const SNAP: f64 = 4_294_967_296.0; // 2^32
const ZERO_TOL: f64 = 1.0 / 8_589_934_592.0; // 2^-33

/// The complex hyperplane `{z : ⟨z, ξ⟩ = s}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hyperplane {
    pub normal: Point,
    pub offset: C64,
}

#[inline]
fn snap(x: f64) -> f64 {
    (x * SNAP).round() / SNAP + 0.0
}

#[inline]
fn snap_c(c: C64) -> C64 {
    C64::new(snap(c.re), snap(c.im))
}

impl Hyperplane {
    pub fn new(normal: Point, offset: C64) -> Result<Self> {
        let finite = normal.iter().chain(std::iter::once(&offset)).all(|c| c.re.is_finite() && c.im.is_finite());
        if !finite {
            return Err(Error::invalid("hyperplane parameters must be finite"));
        }
        if norm(&normal) == 0.0 {
            return Err(Error::invalid(format!("hyperplane normal must be nonzero, got {}", fmt_point(&normal))));
        }
        Ok(Hyperplane { normal, offset })
    }

    /// Same hyperplane with `|ξ| = 1`, phase untouched.
    pub fn normalized(&self) -> Hyperplane {
        let r = norm(&self.normal);
        Hyperplane { normal: [self.normal[0] / r, self.normal[1] / r], offset: self.offset / r }
    }

    /// Canonical representative of the phase class `(ξe^{iθ}, se^{iθ})`: unit normal, and
    /// either a real positive offset, or (for zero offset) a real positive first nonzero
    /// normal coordinate. Coordinates are snapped to multiples of 2⁻³².
    pub fn canonical(&self) -> Hyperplane {
        // Snapped normals are unit only to ~2⁻³², so canonical inputs are kept as-is.
        let snapped = Hyperplane { normal: [snap_c(self.normal[0]), snap_c(self.normal[1])], offset: snap_c(self.offset) };
        if snapped == *self && self.is_canonical() {
            return *self;
        }
        let h = self.normalized();
        let phase = if h.offset.norm() > ZERO_TOL {
            h.offset.conj() / h.offset.norm()
        } else {
            let lead = if h.normal[0].norm() > ZERO_TOL { h.normal[0] } else { h.normal[1] };
            lead.conj() / lead.norm()
        };
        let normal = [snap_c(h.normal[0] * phase), snap_c(h.normal[1] * phase)];
        let offset = if h.offset.norm() > ZERO_TOL {
            C64::new(snap(h.offset.norm()), 0.0)
        } else {
            C64::new(0.0, 0.0)
        };
        Hyperplane { normal, offset }
    }

    /// Whether the normal has unit length (within snapping tolerance) and the phase
    /// convention holds.
    pub fn is_canonical(&self) -> bool {
        if (norm(&self.normal) - 1.0).abs() > 1e-8 {
            return false;
        }
        if self.offset.norm() > ZERO_TOL {
            self.offset.im == 0.0 && self.offset.re > 0.0
        } else {
            let lead = if self.normal[0].norm() > ZERO_TOL { self.normal[0] } else { self.normal[1] };
            lead.im == 0.0 && lead.re > 0.0
        }
    }

    pub fn has_unit_normal(&self) -> bool {
        (norm(&self.normal) - 1.0).abs() <= 1e-8
    }

    pub fn contains(&self, z: &Point, tol: f64) -> bool {
        (pairing(z, &self.normal) - self.offset).norm() <= tol
    }
}
