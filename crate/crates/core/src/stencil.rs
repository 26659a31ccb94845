//! Coefficients of the discrete energy on the staggered polar grid.
//!
//! The Dirichlet energy is the finite-volume sum
//!
//! ```text
//! E(u) = sum_i sum_j  a_i (u[i+1,j] - u[i,j])^2  +  b_i (u[i,j+1] - u[i,j])^2
//! a_i = rho_i dtheta / h,   b_i = h / (r_i dtheta)
//! ```
//!
//! where `rho_i = (i+1) h` is the face between rings `i` and `i+1`. The face
//! below ring 0 sits at the pole and has zero length, so no flux crosses
//! the centre; only the angular mean of the innermost ring talks to it.
//! Dividing `dE/du` by the node area gives `-2 Laplacian_h u`, the usual
//! 5-point polar Laplacian.

use crate::polar::PolarGrid;

#[derive(Clone, Debug)]
pub(crate) struct Stencil {
    pub grid: PolarGrid,
    /// radial face coefficients, one per interior ring (face to the next ring)
    pub a: Vec<f64>,
    /// angular coefficients per interior ring
    pub b: Vec<f64>,
    /// node areas per interior ring
    pub area: Vec<f64>,
    /// `r_i^alpha * area_i`
    pub weighted_area: Vec<f64>,
}

impl Stencil {
    pub fn new(grid: PolarGrid, alpha: f64) -> Self {
        let m = grid.interior_rings();
        let h = grid.h();
        let dt = grid.d_theta();
        let a = (0..m).map(|i| grid.face_radius(i) * dt / h).collect();
        let b = (0..m).map(|i| h / (grid.radius(i) * dt)).collect();
        let area: Vec<f64> = (0..m).map(|i| grid.cell_area(i)).collect();
        let weighted_area = area
            .iter()
            .enumerate()
            .map(|(i, w)| w * weight(grid.radius(i), alpha))
            .collect();
        Self {
            grid,
            a,
            b,
            area,
            weighted_area,
        }
    }

    pub fn energy(&self, u: &[f64]) -> f64 {
        let nt = self.grid.n_theta();
        let mut total = 0.0;
        for i in 0..self.a.len() {
            let ring = &u[i * nt..(i + 1) * nt];
            let next = &u[(i + 1) * nt..(i + 2) * nt];
            let mut radial = 0.0;
            let mut angular = 0.0;
            for j in 0..nt {
                let dr = next[j] - ring[j];
                let jn = if j + 1 == nt { 0 } else { j + 1 };
                let dt = ring[jn] - ring[j];
                radial += dr * dr;
                angular += dt * dt;
            }
            total += self.a[i] * radial + self.b[i] * angular;
        }
        total
    }

    /// `K u` with `E(u) = u^T K u`; the boundary ring of `out` is zeroed.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let nt = self.grid.n_theta();
        let m = self.a.len();
        out.fill(0.0);
        for i in 0..m {
            let lower_a = if i == 0 { 0.0 } else { self.a[i - 1] };
            for j in 0..nt {
                let c = u[i * nt + j];
                let mut acc = self.a[i] * (c - u[(i + 1) * nt + j]);
                if i > 0 {
                    acc += lower_a * (c - u[(i - 1) * nt + j]);
                }
                let jp = if j + 1 == nt { 0 } else { j + 1 };
                let jm = if j == 0 { nt - 1 } else { j - 1 };
                acc += self.b[i] * (2.0 * c - u[i * nt + jp] - u[i * nt + jm]);
                out[i * nt + j] = acc;
            }
        }
    }

    /// `sum_i r_i^alpha area_i |u|^p |v|^q`.
    pub fn potential(&self, u: &[f64], v: &[f64], p: f64, q: f64) -> f64 {
        let nt = self.grid.n_theta();
        let mut total = 0.0;
        for (i, w) in self.weighted_area.iter().enumerate() {
            let s: f64 = u[i * nt..(i + 1) * nt]
                .iter()
                .zip(&v[i * nt..(i + 1) * nt])
                .map(|(a, b)| pow_abs(*a, p) * pow_abs(*b, q))
                .sum();
            total += w * s;
        }
        total
    }
}

#[inline]
pub(crate) fn weight(r: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else {
        r.powf(alpha)
    }
}

#[inline]
pub(crate) fn pow_abs(x: f64, e: f64) -> f64 {
    if e == 2.0 {
        x * x
    } else {
        x.abs().powf(e)
    }
}

/// `sgn(x) |x|^e`, zero at `x = 0`.
#[inline]
pub(crate) fn signed_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if e == 1.0 {
        x
    } else {
        x.signum() * x.abs().powf(e)
    }
}
