use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Staggered polar grid on the closed unit disk.
///
/// Ring `i` sits at `r_i = (i + 1/2) h` with `h = 1 / (n_r - 1/2)`, so the
/// last ring is the boundary `r = 1` and no unknown lives at the pole. The
/// angular nodes are `theta_j = 2 pi j / n_theta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct PolarGrid {
    n_r: usize,
    n_theta: usize,
}

#[derive(Deserialize)]
struct RawGrid {
    n_r: usize,
    n_theta: usize,
}

impl TryFrom<RawGrid> for PolarGrid {
    type Error = Error;
    fn try_from(g: RawGrid) -> Result<Self> {
        PolarGrid::new(g.n_r, g.n_theta)
    }
}

/// Upper limit on `n_r * n_theta`.
pub const MAX_NODES: usize = 1 << 28;

impl PolarGrid {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < 3 {
            return Err(Error::Config(format!("n_r must be at least 3, got {n_r}")));
        }
        if n_theta < 4 || !n_theta.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "n_theta must be even and at least 4, got {n_theta}"
            )));
        }
        if n_r.checked_mul(n_theta).is_none_or(|n| n > MAX_NODES) {
            return Err(Error::Config(format!(
                "grid {n_r} x {n_theta} exceeds the limit of {MAX_NODES} nodes"
            )));
        }
        Ok(Self { n_r, n_theta })
    }

    #[inline]
    pub fn n_r(&self) -> usize {
        self.n_r
    }

    #[inline]
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    /// Number of rings carrying unknowns (all but the boundary).
    #[inline]
    pub fn interior_rings(&self) -> usize {
        self.n_r - 1
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_r * self.n_theta
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Radial spacing.
    #[inline]
    pub fn h(&self) -> f64 {
        1.0 / (self.n_r as f64 - 0.5)
    }

    #[inline]
    pub fn d_theta(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    #[inline]
    pub fn radius(&self, i: usize) -> f64 {
        if i + 1 == self.n_r {
            1.0
        } else {
            (i as f64 + 0.5) * self.h()
        }
    }

    /// Radius of the cell face between ring `i` and ring `i + 1`.
    #[inline]
    pub fn face_radius(&self, i: usize) -> f64 {
        (i as f64 + 1.0) * self.h()
    }

    #[inline]
    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.d_theta()
    }

    pub fn radial_nodes(&self) -> Vec<f64> {
        (0..self.n_r).map(|i| self.radius(i)).collect()
    }

    /// Quadrature weight of a node on ring `i`: `r_i h dtheta` in the
    /// interior, zero on the boundary ring.
    #[inline]
    pub fn cell_area(&self, i: usize) -> f64 {
        if i + 1 >= self.n_r {
            0.0
        } else {
            self.radius(i) * self.h() * self.d_theta()
        }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_theta + j
    }

    pub fn check_mode_divides(&self, n: usize) -> Result<()> {
        if n == 0 || !self.n_theta.is_multiple_of(n) {
            return Err(Error::Config(format!(
                "mode {n} must divide n_theta = {} (the angular grid must be invariant under rotation by 2pi/{n})",
                self.n_theta
            )));
        }
        Ok(())
    }

    /// Grid with both dimensions doubled.
    pub fn refined(&self) -> Result<Self> {
        Self::new(2 * self.n_r, 2 * self.n_theta)
    }
}
