//! Rasters of projections `K_w ⊂ C` and their connectivity.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::CompactSet;
use crate::point::{norm, pairing, Point};
use crate::{Error, Result, C64};

pub const MIN_RESOLUTION: usize = 16;

/// Border cells kept free around the projected set.
const BORDER_CELLS: usize = 2;

/// Boolean raster over the square `center ± half_width` (both axes), `resolution` cells
/// per side. Cell `(row, col)` has its imaginary part varying with `row`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionRegion {
    pub bitmap: Vec<bool>,
    pub center: C64,
    pub half_width: f64,
    pub resolution: usize,
}

impl ProjectionRegion {
    pub fn empty(center: C64, half_width: f64, resolution: usize) -> Result<Self> {
        if resolution < MIN_RESOLUTION {
            return Err(Error::invalid(format!("raster resolution must be ≥ {MIN_RESOLUTION}, got {resolution}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::invalid(format!("raster half-width must be positive, got {half_width}")));
        }
        Ok(ProjectionRegion { bitmap: vec![false; resolution * resolution], center, half_width, resolution })
    }

    /// Raster whose cells are set where `dist(center, set) ≤ half diagonal`.
    pub fn from_distance<F>(center: C64, half_width: f64, resolution: usize, dist: F) -> Result<Self>
    where
        F: Fn(C64) -> f64,
    {
        let mut r = ProjectionRegion::empty(center, half_width, resolution)?;
        let tol = r.half_diagonal();
        for row in 0..resolution {
            for col in 0..resolution {
                r.bitmap[row * resolution + col] = dist(r.cell_center(row, col)) <= tol;
            }
        }
        Ok(r)
    }

    pub fn cell_size(&self) -> f64 {
        2.0 * self.half_width / self.resolution as f64
    }

    pub fn half_diagonal(&self) -> f64 {
        self.cell_size() * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn cell_center(&self, row: usize, col: usize) -> C64 {
        let h = self.cell_size();
        self.center
            + C64::new(-self.half_width + (col as f64 + 0.5) * h, -self.half_width + (row as f64 + 0.5) * h)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bitmap[row * self.resolution + col]
    }

    pub fn count_true(&self) -> usize {
        self.bitmap.iter().filter(|b| **b).count()
    }

    /// Centers of all set cells.
    pub fn true_centers(&self) -> Vec<C64> {
        let mut out = Vec::new();
        for row in 0..self.resolution {
            for col in 0..self.resolution {
                if self.get(row, col) {
                    out.push(self.cell_center(row, col));
                }
            }
        }
        out
    }

    /// Distance from `s` to the union of the closed set cells (infinite if none).
    pub fn distance_to_true(&self, s: C64) -> f64 {
        let half = 0.5 * self.cell_size();
        let mut best = f64::INFINITY;
        for c in self.true_centers() {
            let dx = ((s.re - c.re).abs() - half).max(0.0);
            let dy = ((s.im - c.im).abs() - half).max(0.0);
            best = best.min(dx.hypot(dy));
        }
        best
    }

    fn border_is_free(&self) -> bool {
        let n = self.resolution;
        (0..n).all(|k| !self.get(0, k) && !self.get(n - 1, k) && !self.get(k, 0) && !self.get(k, n - 1))
    }

    /// Number of 4-connected components of the free cells, with the outside of the
    /// window counted as free.
    pub fn complement_components(&self) -> Result<usize> {
        if !self.border_is_free() {
            return Err(Error::invalid(
                "projection raster touches the window border; enlarge the window so a free frame surrounds the set",
            ));
        }
        let n = self.resolution;
        let mut label = vec![usize::MAX; n * n];
        let mut count = 0;
        for start in 0..n * n {
            if self.bitmap[start] || label[start] != usize::MAX {
                continue;
            }
            flood(&self.bitmap, n, start, count, &mut label, false);
            count += 1;
        }
        Ok(count)
    }

    /// Number of 8-connected components of the set cells.
    pub fn set_components(&self) -> usize {
        let n = self.resolution;
        let mut label = vec![usize::MAX; n * n];
        let mut count = 0;
        for start in 0..n * n {
            if !self.bitmap[start] || label[start] != usize::MAX {
                continue;
            }
            flood(&self.bitmap, n, start, count, &mut label, true);
            count += 1;
        }
        count
    }
}

/// Breadth-first labelling of cells equal to `bitmap[start]`; 8-connected if `diagonal`.
fn flood(bitmap: &[bool], n: usize, start: usize, id: usize, label: &mut [usize], diagonal: bool) {
    let target = bitmap[start];
    let mut queue = VecDeque::from([start]);
    label[start] = id;
    while let Some(i) = queue.pop_front() {
        let (r, c) = ((i / n) as isize, (i % n) as isize);
        for dr in -1isize..=1 {
            for dc in -1isize..=1 {
                if (dr == 0 && dc == 0) || (!diagonal && dr != 0 && dc != 0) {
                    continue;
                }
                let (rr, cc) = (r + dr, c + dc);
                if rr < 0 || cc < 0 || rr >= n as isize || cc >= n as isize {
                    continue;
                }
                let j = rr as usize * n + cc as usize;
                if bitmap[j] == target && label[j] == usize::MAX {
                    label[j] = id;
                    queue.push_back(j);
                }
            }
        }
    }
}

fn check_direction(w: &Point, resolution: usize) -> Result<()> {
    if (norm(w) - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!("projection direction must be a unit vector, |w| = {}", norm(w))));
    }
    if resolution < MIN_RESOLUTION {
        return Err(Error::invalid(format!("raster resolution must be ≥ {MIN_RESOLUTION}, got {resolution}")));
    }
    Ok(())
}

/// Window half-width leaving `BORDER_CELLS` free cells around `B̄(0, 1.25·R_K)`.
fn window_half_width(bound: f64, resolution: usize) -> f64 {
    let r = (1.25 * bound).max(0.5);
    r * resolution as f64 / (resolution - 2 * BORDER_CELLS) as f64
}

/// Raster of `K_w` from the exact projection distance.
pub fn project(k: &CompactSet, w: &Point, resolution: usize) -> Result<ProjectionRegion> {
    check_direction(w, resolution)?;
    k.validate()?;
    let hw = window_half_width(k.bound(), resolution);
    ProjectionRegion::from_distance(C64::new(0.0, 0.0), hw, resolution, |s| k.projection_distance(w, s))
}

/// Raster of `K_w` from a boundary-biased point cloud of `K`: a cell is set when a
/// projected sample lies within its half diagonal.
pub fn project_sampled(k: &CompactSet, w: &Point, resolution: usize, samples: usize, seed: u64) -> Result<ProjectionRegion> {
    check_direction(w, resolution)?;
    k.validate()?;
    let hw = window_half_width(k.bound(), resolution);
    let mut r = ProjectionRegion::empty(C64::new(0.0, 0.0), hw, resolution)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = r.cell_size();
    let tol = r.half_diagonal();
    for z in k.sample(samples, &mut rng) {
        let s = pairing(&z, w);
        let col = ((s.re + hw) / h).floor() as isize;
        let row = ((s.im + hw) / h).floor() as isize;
        for rr in row - 1..=row + 1 {
            for cc in col - 1..=col + 1 {
                if rr < 0 || cc < 0 || rr >= resolution as isize || cc >= resolution as isize {
                    continue;
                }
                let (ru, cu) = (rr as usize, cc as usize);
                if (r.cell_center(ru, cu) - s).norm() <= tol {
                    r.bitmap[ru * resolution + cu] = true;
                }
            }
        }
    }
    Ok(r)
}

/// Whether `C ∖ P` is connected: the free cells form one 4-connected component together
/// with the unbounded frame.
pub fn complement_connected(p: &ProjectionRegion) -> Result<bool> {
    Ok(p.complement_components()? == 1)
}
