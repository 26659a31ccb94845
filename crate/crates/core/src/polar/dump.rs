//! CSV field dumps.
//!
//! Layout: a header line `nr,ntheta,alpha_meta`, then `nr * ntheta` rows
//! `r,theta,value` ordered by ring and then by angle. Numbers are written
//! with 17 significant digits so a dump round-trips bit for bit.
//! `alpha_meta` is the Hénon exponent the field belongs to, or `none`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::field::DiskField;
use super::grid::PolarGrid;
use crate::error::{Error, Result};

/// Largest grid a dump may declare.
const MAX_SAMPLES: usize = 1 << 26;
const COORD_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct FieldDump {
    pub field: DiskField,
    pub alpha: Option<f64>,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn render_field_dump(field: &DiskField, alpha: Option<f64>) -> String {
    let g = field.grid();
    let mut out = String::with_capacity(64 * g.len());
    let meta = alpha.map(num).unwrap_or_else(|| "none".to_string());
    let _ = writeln!(out, "{},{},{}", g.n_r(), g.n_theta(), meta);
    for i in 0..g.n_r() {
        let r = num(g.radius(i));
        for j in 0..g.n_theta() {
            let _ = writeln!(out, "{},{},{}", r, num(g.theta(j)), num(field.get(i, j)));
        }
    }
    out
}

pub fn write_field_dump(path: &Path, field: &DiskField, alpha: Option<f64>) -> Result<()> {
    fs::write(path, render_field_dump(field, alpha))?;
    Ok(())
}

pub fn read_field_dump(path: &Path) -> Result<FieldDump> {
    parse_field_dump(&fs::read_to_string(path)?)
}

fn parse_f64(tok: &str, line: usize, what: &str) -> Result<f64> {
    tok.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid {what} '{}'", tok.trim()),
    })
}

pub fn parse_field_dump(text: &str) -> Result<FieldDump> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let parts: Vec<&str> = header.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Parse {
            line: 1,
            msg: "header must be 'nr,ntheta,alpha_meta'".into(),
        });
    }
    let parse_dim = |s: &str| {
        s.trim().parse::<usize>().map_err(|_| Error::Parse {
            line: 1,
            msg: format!("invalid grid dimension '{}'", s.trim()),
        })
    };
    let n_r = parse_dim(parts[0])?;
    let n_theta = parse_dim(parts[1])?;
    let alpha = match parts[2].trim() {
        "none" => None,
        a => Some(parse_f64(a, 1, "alpha_meta")?),
    };
    if n_r.checked_mul(n_theta).is_none_or(|n| n > MAX_SAMPLES) {
        return Err(Error::Parse {
            line: 1,
            msg: "grid too large".into(),
        });
    }
    let grid = PolarGrid::new(n_r, n_theta).map_err(|e| Error::Parse {
        line: 1,
        msg: e.to_string(),
    })?;

    let mut values = Vec::with_capacity(grid.len());
    for (line, row) in lines.by_ref() {
        if values.len() == grid.len() {
            if row.trim().is_empty() {
                continue;
            }
            return Err(Error::Parse {
                line,
                msg: "more rows than the header declares".into(),
            });
        }
        let k = values.len();
        let (i, j) = (k / n_theta, k % n_theta);
        let mut it = row.split(',');
        let (Some(r), Some(t), Some(v), None) = (it.next(), it.next(), it.next(), it.next()) else {
            return Err(Error::Parse {
                line,
                msg: "expected 'r,theta,value'".into(),
            });
        };
        let r = parse_f64(r, line, "radius")?;
        let t = parse_f64(t, line, "angle")?;
        let v = parse_f64(v, line, "value")?;
        if !((r - grid.radius(i)).abs() <= COORD_TOL && (t - grid.theta(j)).abs() <= COORD_TOL) {
            return Err(Error::Parse {
                line,
                msg: format!("node ({r}, {t}) does not match grid position ({i}, {j})"),
            });
        }
        values.push(v);
    }
    if values.len() != grid.len() {
        return Err(Error::Parse {
            line: values.len() + 2,
            msg: format!("expected {} rows, found {}", grid.len(), values.len()),
        });
    }
    let field = DiskField::new(grid, values).map_err(|e| Error::Parse {
        line: 0,
        msg: e.to_string(),
    })?;
    Ok(FieldDump { field, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_and_row_count() {
        let g = PolarGrid::new(3, 4).unwrap();
        let f = DiskField::from_fn(g, |r, t| r + t);
        let text = render_field_dump(&f, Some(6.0));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "3,4,6.0000000000000000e0");
        assert_eq!(lines.len(), 1 + 12);
        assert!(lines[12].ends_with(",0.0000000000000000e0"));
    }

    #[test]
    fn rejects_malformed_input() {
        let g = PolarGrid::new(3, 4).unwrap();
        let good = render_field_dump(&DiskField::from_fn(g, |r, _| 1.0 - r), None);
        assert!(parse_field_dump(&good).is_ok());
        assert!(parse_field_dump("").is_err());
        assert!(parse_field_dump("3,4").is_err());
        assert!(parse_field_dump("100000,100000,none\n").is_err());
        let truncated: String = good.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(parse_field_dump(&truncated).is_err());
        let extra = format!("{good}0,0,0\n");
        assert!(parse_field_dump(&extra).is_err());
        let nonzero_boundary = good.replacen(
            "1.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0",
            "1.0000000000000000e0,0.0000000000000000e0,1.0",
            1,
        );
        assert!(parse_field_dump(&nonzero_boundary).is_err());
        let shifted = good.replacen(",0.0000000000000000e0,", ",0.5,", 1);
        assert!(parse_field_dump(&shifted).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            seed in proptest::collection::vec(-1e6f64..1e6, 5 * 6),
            alpha in proptest::option::of(0.0f64..100.0),
        ) {
            let g = PolarGrid::new(6, 6).unwrap();
            let mut vals = seed;
            vals.extend(std::iter::repeat_n(0.0, 6));
            let f = DiskField::new(g, vals).unwrap();
            let back = parse_field_dump(&render_field_dump(&f, alpha)).unwrap();
            prop_assert_eq!(back.alpha.map(f64::to_bits), alpha.map(f64::to_bits));
            for (a, b) in back.field.values().iter().zip(f.values()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
