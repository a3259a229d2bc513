//! Points of C² and the bilinear pairing.

use crate::C64;

/// A point of C², `(z₁, z₂)`.
pub type Point = [C64; 2];

pub const ORIGIN: Point = [C64::new(0.0, 0.0), C64::new(0.0, 0.0)];

/// Serde default for amplitudes and weights.
pub(crate) fn unit_amplitude() -> C64 {
    C64::new(1.0, 0.0)
}

/// `⟨z, w⟩ = z₁w₁ + z₂w₂`, without conjugation.
#[inline]
pub fn pairing(z: &Point, w: &Point) -> C64 {
    z[0] * w[0] + z[1] * w[1]
}

/// Hermitian product `Σ z_j conj(y_j)`.
#[inline]
pub fn hermitian(z: &Point, y: &Point) -> C64 {
    z[0] * y[0].conj() + z[1] * y[1].conj()
}

#[inline]
pub fn norm_sqr(z: &Point) -> f64 {
    z[0].norm_sqr() + z[1].norm_sqr()
}

#[inline]
pub fn norm(z: &Point) -> f64 {
    norm_sqr(z).sqrt()
}

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn scale(a: &Point, c: C64) -> Point {
    [a[0] * c, a[1] * c]
}

#[inline]
pub fn conj(a: &Point) -> Point {
    [a[0].conj(), a[1].conj()]
}

pub fn is_finite(z: &Point) -> bool {
    z.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Builds a point from `[[re, im], [re, im]]` pairs.
pub fn from_pairs(p: [[f64; 2]; 2]) -> Point {
    [C64::new(p[0][0], p[0][1]), C64::new(p[1][0], p[1][1])]
}

pub fn to_pairs(z: &Point) -> [[f64; 2]; 2] {
    [[z[0].re, z[0].im], [z[1].re, z[1].im]]
}

pub(crate) fn fmt_point(z: &Point) -> String {
    format!("({}, {})", z[0], z[1])
}
