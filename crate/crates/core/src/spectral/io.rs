//! Text dump of a `FrequencyField`.
//!
//! ```text
//! smlab-frequency-field 1
//! n M K
//! re im        one line per lattice point
//! ```
//! Lattice points run in row-major centred order: ξ_1 slowest, τ fastest,
//! each coordinate ascending from -M/2 (or -K/2). Floats use the shortest
//! representation that round-trips.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::field::FrequencyField;
use super::grid::{Freq, GridSpec, MAX_DIM};
use crate::error::{Error, Result};

pub const MAGIC: &str = "smlab-frequency-field 1";

fn lattice_order(grid: &GridSpec) -> impl Iterator<Item = Freq> + '_ {
    let n = grid.n();
    let m = grid.m();
    let k = grid.k();
    (0..grid.len()).map(move |idx| {
        let mut rest = idx / k;
        let tau = (idx % k) as i64 + grid.tau_min();
        let mut xi = [0i64; MAX_DIM];
        for a in (0..n).rev() {
            xi[a] = (rest % m) as i64 + grid.xi_min();
            rest /= m;
        }
        Freq { xi, tau }
    })
}

pub fn write_field<W: Write>(f: &FrequencyField, mut w: W) -> Result<()> {
    let g = f.grid();
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "{} {} {}", g.n(), g.m(), g.k())?;
    for p in lattice_order(g) {
        let v = f.get(&p);
        writeln!(w, "{:e} {:e}", v.re, v.im)?;
    }
    Ok(())
}

pub fn read_field<R: BufRead>(r: R) -> Result<FrequencyField> {
    let mut lines = r.lines();
    let mut next = |what: &str| -> Result<String> {
        lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what}")))?
            .map_err(Error::from)
    };
    if next("header")?.trim() != MAGIC {
        return Err(Error::Parse("bad magic line".into()));
    }
    let dims: Vec<usize> = next("grid line")?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad grid value {t}"))))
        .collect::<Result<_>>()?;
    if dims.len() != 3 {
        return Err(Error::Parse("grid line needs n M K".into()));
    }
    let grid = GridSpec::new(dims[0], dims[1], dims[2])?;
    let mut f = FrequencyField::zeros(grid);
    let order: Vec<Freq> = lattice_order(&grid).collect();
    for p in order {
        let line = next("value line")?;
        let mut it = line.split_whitespace();
        let mut num = || -> Result<f64> {
            let t = it.next().ok_or_else(|| Error::Parse("short value line".into()))?;
            t.parse().map_err(|_| Error::Parse(format!("bad float {t}")))
        };
        let v = Complex64::new(num()?, num()?);
        f.set(&p, v)?;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_exact() {
        let g = GridSpec::new(2, 8, 8).unwrap();
        let f = FrequencyField::from_fn(g, |p| {
            Complex64::new((p.xi[0] as f64 * 0.3 + p.tau as f64).sin() / 3.0, p.xi[1] as f64 / 7.0)
        });
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        let back = read_field(buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn first_line_is_lowest_corner() {
        let g = GridSpec::new(1, 8, 8).unwrap();
        let mut f = FrequencyField::zeros(g);
        f.set(&Freq::new(&[-4], -4), Complex64::new(2.5, 0.0)).unwrap();
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(2).unwrap(), "2.5e0 0e0");
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_field("nope\n".as_bytes()).is_err());
        assert!(read_field(format!("{MAGIC}\n2 8 8\n1 2\n").as_bytes()).is_err());
    }
}
