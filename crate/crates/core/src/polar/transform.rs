use super::field::{cubic_weights, is_in_mode, project_mode, DiskField, ModeClass};
use super::spectral::{rescale_ring, RingFft};
use crate::error::{Error, Result};

fn require_mode(u: &DiskField, n: usize) -> Result<DiskField> {
    let c = ModeClass::mode(n)?;
    if !is_in_mode(u, c)? {
        return Err(Error::Domain(format!("field is not {n}-mode within tolerance")));
    }
    project_mode(u, c)
}

/// Apply `theta -> theta m / n` to every ring of an n-mode field.
fn rescale_angle(u: &DiskField, n: usize, m: usize) -> DiskField {
    let g = *u.grid();
    let fft = RingFft::new(g.n_theta());
    let mut values = vec![0.0; g.len()];
    for i in 0..g.interior_rings() {
        let nt = g.n_theta();
        rescale_ring(&fft, u.ring(i), n, m, &mut values[i * nt..(i + 1) * nt]);
    }
    DiskField::from_raw(g, values)
}

/// Unfolding `u~(r, theta) = u(r^(1/n), theta/n)` of an n-mode field onto
/// the same grid. The result is 1-mode by construction.
pub fn unfold(u: &DiskField, n: usize) -> Result<DiskField> {
    if n == 0 {
        return Err(Error::Domain("unfolding order must be positive".into()));
    }
    let projected = require_mode(u, n)?;
    if n == 1 {
        return Ok(projected);
    }
    let spun = rescale_angle(&projected, n, 1);
    let g = *u.grid();
    let nt = g.n_theta();
    let h = g.h();
    let last = g.n_r() as isize - 1;
    let mut values = vec![0.0; g.len()];
    for i in 0..g.interior_rings() {
        let s = g.radius(i).powf(1.0 / n as f64);
        let x = s / h - 0.5;
        let base = (x.floor() as isize - 1).clamp(0, last - 3);
        let w = cubic_weights(x - (base + 1) as f64);
        for j in 0..nt {
            values[i * nt + j] = (0..4)
                .map(|k| w[k] * spun.get((base + k as isize) as usize, j))
                .sum();
        }
    }
    Ok(DiskField::from_raw(g, values))
}

/// Mode reduction `u_bar(r, theta) = u(r, m theta / n)`, sending an n-mode
/// field to an m-mode field with the same radial structure.
pub fn mode_reduce(u: &DiskField, n: usize, m: usize) -> Result<DiskField> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("modes must be positive".into()));
    }
    if m > n {
        return Err(Error::Domain(format!("target mode {m} exceeds source mode {n}")));
    }
    let projected = require_mode(u, n)?;
    if m == n {
        return Ok(projected);
    }
    Ok(rescale_angle(&projected, n, m))
}
