//! Convolutions in `s` (per sphere node) and in C².

use rayon::prelude::*;

use crate::distributions::Mollifier;
use crate::numerics::{BallRule, Sinogram, SphereGrid};
use crate::point::{sub, Point};
use crate::{Error, Result, C64};

/// Per-node discrete convolution `(S ∗ K)(s) = Σ K(s′)·S(s − s′)·h²` over offsets with
/// `|s′| ≤ support`. The valid region shrinks by `⌈support/h⌉` cells per edge.
pub fn convolve_s<K>(sino: &Sinogram, kernel: K, support: f64) -> Result<Sinogram>
where
    K: Fn(C64) -> C64,
{
    let extent = sino.sgrid.extent();
    if !(support > 0.0) || support >= extent / 2.0 {
        return Err(Error::invalid(format!(
            "kernel support {support} must be positive and below half the s-grid extent ({extent})"
        )));
    }
    let h = sino.sgrid.spacing();
    let reach = (support / h).ceil() as usize;
    let count = sino.sgrid.count();
    let margin = sino.margin + reach;
    if count < 2 * margin + 1 {
        return Err(Error::invalid("no valid cells remain after the s-convolution"));
    }
    let reach_i = reach as isize;
    let mut taps = Vec::new();
    for dr in -reach_i..=reach_i {
        for dc in -reach_i..=reach_i {
            let off = C64::new(dc as f64 * h, dr as f64 * h);
            if off.norm() <= support {
                let k = kernel(off) * (h * h);
                if k != C64::new(0.0, 0.0) {
                    taps.push((dr, dc, k));
                }
            }
        }
    }
    let n = sino.sgrid.len();
    let mut out = vec![C64::new(0.0, 0.0); sino.values.len()];
    out.par_chunks_mut(n).enumerate().for_each(|(node, dst)| {
        let src = sino.row(node);
        for r in margin..count - margin {
            for c in margin..count - margin {
                let mut acc = C64::new(0.0, 0.0);
                for &(dr, dc, k) in &taps {
                    let rr = (r as isize - dr) as usize;
                    let cc = (c as isize - dc) as usize;
                    acc += k * src[rr * count + cc];
                }
                dst[r * count + c] = acc;
            }
        }
    });
    let mut result =
        Sinogram { sphere: sino.sphere.clone(), sgrid: sino.sgrid, values: out, margin, provenance: sino.provenance.clone() };
    result.provenance.insert("convolve_s".into(), serde_json::json!({ "support": support, "taps": taps.len() }));
    result.check_finite("convolve_s")?;
    Ok(result)
}

/// Nodes and `α`-weighted weights for `(f ∗ α)(z) = Σ f(z − u_k)·ŵ_k`.
#[derive(Clone, Debug)]
pub struct ConvolutionRule {
    pub offsets: Vec<Point>,
    pub weights: Vec<C64>,
}

impl ConvolutionRule {
    /// Rule for a kernel supported in the ball of `radius`; `kernel` may be any function
    /// (the mollifier or one of its derivatives).
    pub fn new<K>(kernel: K, radius: f64, n_r: usize, sphere: &SphereGrid) -> Result<Self>
    where
        K: Fn(&Point) -> C64,
    {
        let rule = BallRule::new(crate::point::ORIGIN, radius, n_r, sphere)?;
        let mut offsets = Vec::with_capacity(rule.len());
        let mut weights = Vec::with_capacity(rule.len());
        for (u, w) in rule.points.iter().zip(&rule.weights) {
            let k = kernel(u);
            if k != C64::new(0.0, 0.0) {
                offsets.push(*u);
                weights.push(k * *w);
            }
        }
        Ok(ConvolutionRule { offsets, weights })
    }

    pub fn apply<F>(&self, f: F, z: &Point) -> C64
    where
        F: Fn(&Point) -> C64,
    {
        let terms: Vec<C64> = self.offsets.iter().zip(&self.weights).map(|(u, w)| f(&sub(z, u)) * w).collect();
        crate::numerics::sum::pairwise_sum(&terms)
    }
}

/// Default `(n_r, n_eta, n_theta)` of the ball rule used by [`convolve_cn`].
pub const CN_RULE: (usize, usize, usize) = (32, 6, 8);

/// `(f ∗ α)` sampled at `points` by a ball rule over `|u| ≤ 1/m`.
pub fn convolve_cn<F>(f: F, alpha: &Mollifier, points: &[Point]) -> Result<Vec<C64>>
where
    F: Fn(&Point) -> C64 + Sync,
{
    alpha.check_normalized()?;
    let sphere = SphereGrid::new(CN_RULE.1, CN_RULE.2)?;
    let rule = ConvolutionRule::new(|u| C64::new(alpha.value(u), 0.0), alpha.radius(), CN_RULE.0, &sphere)?;
    let out: Vec<C64> = points.par_iter().map(|z| rule.apply(&f, z)).collect();
    if let Some(i) = out.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite { op: "convolve_cn", location: format!("sample {i}") });
    }
    Ok(out)
}
