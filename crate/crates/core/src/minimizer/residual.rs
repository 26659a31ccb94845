//! Residuals in the Hénon system, measured with an operator independent of
//! the one the minimiser is built on: fourth-order differences in `r`
//! (reflected through the pole) and spectral differentiation in `theta`.

use rustfft::num_complex::Complex64;

use super::SolveResult;
use crate::error::{Error, Result};
use crate::functionals::ProblemParams;
use crate::polar::{DiskField, RadialProfile, RingFft};
use crate::stencil::{pow_abs, signed_pow};

/// Laplacian of `u` at every interior node; boundary entries are zero.
pub(crate) fn accurate_laplacian(u: &DiskField) -> Vec<f64> {
    let g = *u.grid();
    let nt = g.n_theta();
    let m = g.interior_rings() as isize;
    let h = g.h();
    let half = nt / 2;
    let at = |i: isize, j: usize| -> f64 {
        if i < 0 {
            u.get((-1 - i) as usize, (j + half) % nt)
        } else {
            u.get(i as usize, j)
        }
    };

    // spectral d^2/dtheta^2 on every ring
    let fft = RingFft::new(nt);
    let mut utt = vec![0.0; g.len()];
    let mut spec = vec![Complex64::new(0.0, 0.0); nt];
    for i in 0..m as usize {
        fft.forward(u.ring(i), &mut spec);
        for (k, c) in spec.iter_mut().enumerate() {
            let s = fft.harmonic(k) as f64;
            *c *= -s * s;
        }
        fft.inverse(&mut spec, &mut utt[i * nt..(i + 1) * nt]);
    }

    let mut out = vec![0.0; g.len()];
    for i in 0..m {
        let r = g.radius(i as usize);
        for j in 0..nt {
            let (d1, d2) = if i + 2 <= m {
                let (a, b, c, d, e) = (at(i - 2, j), at(i - 1, j), at(i, j), at(i + 1, j), at(i + 2, j));
                ((a - 8.0 * b + 8.0 * d - e) / (12.0 * h), (-a + 16.0 * b - 30.0 * c + 16.0 * d - e) / (12.0 * h * h))
            } else {
                let (a, b, c, d, e) = (at(i - 3, j), at(i - 2, j), at(i - 1, j), at(i, j), at(i + 1, j));
                (
                    (-a + 6.0 * b - 18.0 * c + 10.0 * d + 3.0 * e) / (12.0 * h),
                    (-a + 4.0 * b + 6.0 * c - 20.0 * d + 11.0 * e) / (12.0 * h * h),
                )
            };
            out[i as usize * nt + j] = d2 + d1 / r + utt[i as usize * nt + j] / (r * r);
        }
    }
    out
}

/// Residual of `Laplacian u + (2p/(p+q)) c(r) u^(p-1) v^q = 0` and its
/// `v` counterpart, as the sum of the two discrete L² norms over interior
/// rings with `r >= r_min`.
pub fn system_residual(
    u: &DiskField,
    v: &DiskField,
    params: &ProblemParams,
    coefficient: impl Fn(f64) -> f64,
    r_min: f64,
) -> Result<f64> {
    if u.grid() != v.grid() {
        return Err(Error::Config("fields live on different grids".into()));
    }
    let g = *u.grid();
    let nt = g.n_theta();
    let lu = accurate_laplacian(u);
    let lv = accurate_laplacian(v);
    let s = params.total_power();
    let (p, q) = (params.p, params.q);
    let (mut su, mut sv) = (0.0, 0.0);
    for i in 0..g.interior_rings() {
        let r = g.radius(i);
        if r < r_min {
            continue;
        }
        let c = coefficient(r);
        let w = g.cell_area(i);
        for j in 0..nt {
            let k = i * nt + j;
            let (a, b) = (u.values()[k], v.values()[k]);
            let ru = lu[k] + 2.0 * p / s * c * signed_pow(a, p - 1.0) * pow_abs(b, q);
            let rv = lv[k] + 2.0 * q / s * c * pow_abs(a, p) * signed_pow(b, q - 1.0);
            su += w * ru * ru;
            sv += w * rv * rv;
        }
    }
    Ok(su.sqrt() + sv.sqrt())
}

/// Residual of the Hénon system at `(u, v)`.
pub fn pde_residual(u: &DiskField, v: &DiskField, params: &ProblemParams) -> Result<f64> {
    let alpha = params.alpha;
    system_residual(u, v, params, |r| crate::stencil::weight(r, alpha), 0.0)
}

/// Residual of the system satisfied by the unfolded pair
/// `u~(r, theta) = u(r^(1/n), theta/n)`, whose weight is
/// `n^-2 r^((2-2n)/n) r^(alpha/n)`. Rings inside `r_min` are skipped: the
/// unfolded fields are only Hölder continuous at the pole.
pub fn unfolded_residual(ut: &DiskField, vt: &DiskField, params: &ProblemParams, n: usize, r_min: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("unfolding order must be positive".into()));
    }
    let nf = n as f64;
    let expo = (2.0 - 2.0 * nf + params.alpha) / nf;
    system_residual(ut, vt, params, |r| r.powf(expo) / (nf * nf), r_min)
}

/// Factor `c` such that `(c u, c v)` solves the Hénon system when `(u, v)`
/// minimises the quotient at level `S` with unit coupling integral.
///
/// Pairing the Euler-Lagrange equation of the normalised minimiser with
/// `(u, v)` gives `-Laplacian u = S (p/(p+q)) |x|^alpha u^(p-1) v^q`.
/// Scaling by `c` multiplies the right-hand side by `c^(2-p-q)` relative to
/// the new unknowns, and matching `2p/(p+q)` forces `c^(p+q-2) = S/2`.
pub fn reconstruction_scale(level: f64, params: &ProblemParams) -> Result<f64> {
    let e = params.total_power() - 2.0;
    if e.abs() < 1e-12 {
        return Err(Error::Domain("p + q = 2: scaling undefined".into()));
    }
    if !(level > 0.0) {
        return Err(Error::Domain(format!("level must be positive, got {level}")));
    }
    Ok((level / 2.0).powf(1.0 / e))
}

pub fn reconstruct_solution(res: &SolveResult, params: &ProblemParams) -> Result<(DiskField, DiskField)> {
    if !res.converged {
        return Err(Error::Domain("cannot reconstruct a solution from a non-converged minimiser".into()));
    }
    let c = reconstruction_scale(res.level, params)?;
    Ok((res.u.scaled(c), res.v.scaled(c)))
}

/// True iff the profile never increases by more than `1e-10 max|values|`.
pub fn check_monotone_radial(profile: &RadialProfile) -> bool {
    let scale = profile.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    profile
        .values
        .windows(2)
        .all(|w| w[1] - w[0] <= 1e-10 * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::PolarGrid;

    #[test]
    fn laplacian_exact_on_low_degree_fields() {
        let g = PolarGrid::new(16, 16).unwrap();
        // (1 - r^2)(1 + r^2 cos 2t) has Laplacian -4 - 12 r^2 cos 2t
        let f = DiskField::from_fn(g, |r, t| (1.0 - r * r) * (1.0 + r * r * (2.0 * t).cos()));
        let lap = accurate_laplacian(&f);
        for i in 0..g.interior_rings() {
            let r = g.radius(i);
            for j in 0..g.n_theta() {
                let exact = -4.0 - 12.0 * r * r * (2.0 * g.theta(j)).cos();
                let err = lap[i * g.n_theta() + j] - exact;
                assert!(err.abs() < 1e-9, "ring {i}: {err}");
            }
        }
    }

    #[test]
    fn zero_pair_has_zero_residual() {
        let g = PolarGrid::new(8, 8).unwrap();
        let z = DiskField::zeros(g);
        let pp = ProblemParams::new(2.0, 2.0, 2.0).unwrap();
        assert_eq!(pde_residual(&z, &z, &pp).unwrap(), 0.0);
    }

    #[test]
    fn scale_examples() {
        let pp = ProblemParams::new(0.0, 2.0, 2.0).unwrap();
        assert!((reconstruction_scale(2.0, &pp).unwrap() - 1.0).abs() < 1e-15);
        assert!((reconstruction_scale(8.0, &pp).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn monotonicity_examples() {
        let g = PolarGrid::new(40, 8).unwrap();
        let radii = g.radial_nodes();
        let down = RadialProfile {
            values: radii.iter().map(|r| 1.0 - r * r).collect(),
            radii: radii.clone(),
        };
        assert!(check_monotone_radial(&down));
        let bump = RadialProfile {
            values: radii.iter().map(|r| r * (1.0 - r)).collect(),
            radii,
        };
        assert!(!check_monotone_radial(&bump));
    }
}
