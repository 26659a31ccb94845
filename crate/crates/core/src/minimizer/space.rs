//! The two discrete spaces the descent runs in: n-mode fields on the full
//! polar grid, and radial profiles. Both expose the same quotient, its raw
//! derivative and an H¹ preconditioner (inverse of the discrete Dirichlet
//! form), so the descent itself is written once.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::Result;
use crate::functionals::{breakdown, quotient_derivative, ProblemParams, QuotientBreakdown};
use crate::polar::{PolarGrid, RingFft};
use crate::stencil::{pow_abs, signed_pow, Stencil};

pub(crate) trait DescentSpace {
    fn len(&self) -> usize;

    fn quotient(&self, u: &[f64], v: &[f64], params: &ProblemParams) -> Result<QuotientBreakdown>;

    /// Raw partial derivatives of the quotient.
    fn derivative(
        &self,
        u: &[f64],
        v: &[f64],
        params: &ProblemParams,
        du: &mut [f64],
        dv: &mut [f64],
    ) -> Result<QuotientBreakdown>;

    /// Squared discrete L² norm of the gradient represented by raw derivative `d`.
    fn l2_sq_of_derivative(&self, d: &[f64]) -> f64;

    /// Replace `d` by `K^{-1} d / 2`, restricted to the symmetry class.
    fn precondition(&self, d: &mut [f64]);

    /// Potential integral of the pair.
    fn potential(&self, u: &[f64], v: &[f64], params: &ProblemParams) -> f64;
}

/// n-mode fields on the full polar grid.
pub(crate) struct DiskSpace {
    st: Stencil,
    mode: usize,
    fft: RingFft,
    /// harmonic index and its Thomas factors `(c', 1/denominator)`
    factors: Vec<(usize, Vec<f64>, Vec<f64>)>,
}

fn thomas_factor(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = diag.len();
    let mut cp = vec![0.0; m];
    let mut inv = vec![0.0; m];
    for i in 0..m {
        let denom = if i == 0 { diag[0] } else { diag[i] - off[i - 1] * cp[i - 1] };
        inv[i] = 1.0 / denom;
        cp[i] = if i + 1 < m { off[i] * inv[i] } else { 0.0 };
    }
    (cp, inv)
}

impl DiskSpace {
    pub fn new(grid: PolarGrid, alpha: f64, mode: usize) -> Self {
        let st = Stencil::new(grid, alpha);
        let nt = grid.n_theta();
        let fft = RingFft::new(nt);
        let m = grid.interior_rings();
        let dt = grid.d_theta();
        let off: Vec<f64> = (0..m).map(|i| -st.a[i]).collect();
        let mut factors = Vec::new();
        for k in 0..nt {
            if fft.harmonic(k) % mode as isize != 0 {
                continue;
            }
            let mu = 4.0 * (0.5 * k as f64 * dt).sin().powi(2);
            let diag: Vec<f64> = (0..m)
                .map(|i| st.a[i] + if i > 0 { st.a[i - 1] } else { 0.0 } + st.b[i] * mu)
                .collect();
            let (cp, inv) = thomas_factor(&diag, &off);
            factors.push((k, cp, inv));
        }
        Self { st, mode, fft, factors }
    }
}

impl DescentSpace for DiskSpace {
    fn len(&self) -> usize {
        self.st.grid.len()
    }

    fn quotient(&self, u: &[f64], v: &[f64], params: &ProblemParams) -> Result<QuotientBreakdown> {
        breakdown(&self.st, u, v, params)
    }

    fn derivative(
        &self,
        u: &[f64],
        v: &[f64],
        params: &ProblemParams,
        du: &mut [f64],
        dv: &mut [f64],
    ) -> Result<QuotientBreakdown> {
        quotient_derivative(&self.st, u, v, params, du, dv)
    }

    fn l2_sq_of_derivative(&self, d: &[f64]) -> f64 {
        let nt = self.st.grid.n_theta();
        self.st
            .area
            .iter()
            .enumerate()
            .map(|(i, w)| d[i * nt..(i + 1) * nt].iter().map(|x| x * x).sum::<f64>() / w)
            .sum()
    }

    fn precondition(&self, d: &mut [f64]) {
        let nt = self.st.grid.n_theta();
        let m = self.st.grid.interior_rings();
        let mut spec = vec![Complex64::new(0.0, 0.0); m * nt];
        for i in 0..m {
            self.fft.forward(&d[i * nt..(i + 1) * nt], &mut spec[i * nt..(i + 1) * nt]);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); m * nt];
        let off: Vec<f64> = self.st.a.iter().map(|a| -a).collect();
        let mut dp = vec![Complex64::new(0.0, 0.0); m];
        for (k, cp, inv) in &self.factors {
            let k = *k;
            for i in 0..m {
                let rhs = spec[i * nt + k];
                dp[i] = if i == 0 { rhs * inv[0] } else { (rhs - off[i - 1] * dp[i - 1]) * inv[i] };
            }
            let mut x = dp[m - 1];
            out[(m - 1) * nt + k] = x;
            for i in (0..m - 1).rev() {
                x = dp[i] - cp[i] * x;
                out[i * nt + k] = x;
            }
        }
        for i in 0..m {
            self.fft.inverse(&mut out[i * nt..(i + 1) * nt], &mut d[i * nt..(i + 1) * nt]);
        }
        d[m * nt..].fill(0.0);
        for x in d[..m * nt].iter_mut() {
            *x *= 0.5;
        }
        debug_assert!(self.mode >= 1);
    }

    fn potential(&self, u: &[f64], v: &[f64], params: &ProblemParams) -> f64 {
        self.st.potential(u, v, params.p, params.q)
    }
}

/// Radial profiles: one value per ring, the last one on the boundary.
///
/// The coefficients are those of [`Stencil`] summed over a ring, so a
/// radial field has exactly the same quotient in both spaces.
pub(crate) struct RadialSpace {
    a: Vec<f64>,
    area: Vec<f64>,
    weighted_area: Vec<f64>,
    cp: Vec<f64>,
    inv: Vec<f64>,
    n_r: usize,
}

impl RadialSpace {
    pub fn new(grid: PolarGrid, alpha: f64) -> Self {
        let m = grid.interior_rings();
        let h = grid.h();
        let a: Vec<f64> = (0..m).map(|i| 2.0 * PI * grid.face_radius(i) / h).collect();
        let area: Vec<f64> = (0..m).map(|i| 2.0 * PI * grid.radius(i) * h).collect();
        let weighted_area = (0..m)
            .map(|i| area[i] * crate::stencil::weight(grid.radius(i), alpha))
            .collect();
        let diag: Vec<f64> = (0..m).map(|i| a[i] + if i > 0 { a[i - 1] } else { 0.0 }).collect();
        let off: Vec<f64> = a.iter().map(|x| -x).collect();
        let (cp, inv) = thomas_factor(&diag, &off);
        Self {
            a,
            area,
            weighted_area,
            cp,
            inv,
            n_r: grid.n_r(),
        }
    }

    fn energy(&self, u: &[f64]) -> f64 {
        self.a.iter().enumerate().map(|(i, a)| a * (u[i + 1] - u[i]).powi(2)).sum()
    }
}

impl DescentSpace for RadialSpace {
    fn len(&self) -> usize {
        self.n_r
    }

    fn quotient(&self, u: &[f64], v: &[f64], params: &ProblemParams) -> Result<QuotientBreakdown> {
        let dirichlet_u = self.energy(u);
        let dirichlet_v = self.energy(v);
        let potential = self.potential(u, v, params);
        if !(potential > 0.0) || !potential.is_finite() {
            return Err(crate::error::Error::DegeneratePair(potential));
        }
        Ok(QuotientBreakdown {
            dirichlet_u,
            dirichlet_v,
            potential,
            quotient: (dirichlet_u + dirichlet_v) / potential.powf(2.0 / params.total_power()),
        })
    }

    fn derivative(
        &self,
        u: &[f64],
        v: &[f64],
        params: &ProblemParams,
        du: &mut [f64],
        dv: &mut [f64],
    ) -> Result<QuotientBreakdown> {
        let b = self.quotient(u, v, params)?;
        let s = params.total_power();
        let denom = b.potential.powf(2.0 / s);
        let c_pot = (2.0 / s) * (b.dirichlet_u + b.dirichlet_v) / (b.potential * denom);
        let m = self.a.len();
        for i in 0..m {
            let lower = if i > 0 { self.a[i - 1] } else { 0.0 };
            let ku = self.a[i] * (u[i] - u[i + 1]) + if i > 0 { lower * (u[i] - u[i - 1]) } else { 0.0 };
            let kv = self.a[i] * (v[i] - v[i + 1]) + if i > 0 { lower * (v[i] - v[i - 1]) } else { 0.0 };
            let w = self.weighted_area[i];
            let dpu = w * params.p * signed_pow(u[i], params.p - 1.0) * pow_abs(v[i], params.q);
            let dpv = w * params.q * pow_abs(u[i], params.p) * signed_pow(v[i], params.q - 1.0);
            du[i] = 2.0 * ku / denom - c_pot * dpu;
            dv[i] = 2.0 * kv / denom - c_pot * dpv;
        }
        du[m] = 0.0;
        dv[m] = 0.0;
        Ok(b)
    }

    fn l2_sq_of_derivative(&self, d: &[f64]) -> f64 {
        self.area.iter().zip(d).map(|(w, x)| x * x / w).sum()
    }

    fn precondition(&self, d: &mut [f64]) {
        let m = self.a.len();
        let mut dp = vec![0.0; m];
        for i in 0..m {
            dp[i] = if i == 0 {
                d[0] * self.inv[0]
            } else {
                (d[i] + self.a[i - 1] * dp[i - 1]) * self.inv[i]
            };
        }
        let mut x = dp[m - 1];
        d[m - 1] = 0.5 * x;
        for i in (0..m - 1).rev() {
            x = dp[i] - self.cp[i] * x;
            d[i] = 0.5 * x;
        }
        d[m] = 0.0;
    }

    fn potential(&self, u: &[f64], v: &[f64], params: &ProblemParams) -> f64 {
        self.weighted_area
            .iter()
            .enumerate()
            .map(|(i, w)| w * pow_abs(u[i], params.p) * pow_abs(v[i], params.q))
            .sum()
    }
}
