//! Plain-text matrix file for exchanging a representation.
//!
//! ```text
//! clifford-rep 1
//! rank 3
//! multiplicity 1
//! dimension 4
//! J 1 2
//! 0 -1 0 0
//! ...
//! ```
//!
//! One `J i j` header per pair in lexicographic order, followed by `n`
//! rows of whitespace-separated entries. Integral entries are written as
//! integers, anything else with 17 significant digits.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::{pairs, CliffordRep};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAGIC: &str = "clifford-rep 1";

fn format_entry<T: Real>(x: T) -> String {
    let v = x.to_f64_lossy();
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.16e}")
    }
}

pub fn write_rep_file<T: Real>(rep: &CliffordRep<T>) -> String {
    let mut out = String::new();
    let n = rep.dim();
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "rank {}", rep.rank()).unwrap();
    writeln!(out, "multiplicity {}", rep.multiplicity()).unwrap();
    writeln!(out, "dimension {n}").unwrap();
    for ((i, j), m) in pairs(rep.rank()).zip(rep.matrices()) {
        writeln!(out, "J {i} {j}").unwrap();
        for row in 0..n {
            let line: Vec<String> = (0..n).map(|col| format_entry(m[(row, col)])).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, &'a str)> {
        loop {
            match self.inner.next() {
                Some((k, l)) if !l.trim().is_empty() => return Ok((k + 1, l.trim())),
                Some(_) => continue,
                None => return Err(Error::Parse { position: 0, message: "unexpected end of file".into() }),
            }
        }
    }

    fn keyed(&mut self, key: &str) -> Result<usize> {
        let (line, text) = self.next()?;
        let err = || Error::Parse { position: line, message: format!("expected `{key} <integer>`") };
        let rest = text.strip_prefix(key).ok_or_else(err)?;
        rest.trim().parse().map_err(|_| err())
    }
}

/// Parses [`write_rep_file`] output. Error positions are 1-based line numbers.
pub fn parse_rep_file<T: Real>(input: &str) -> Result<CliffordRep<T>> {
    let mut lines = Lines { inner: input.lines().enumerate() };
    let (line, magic) = lines.next()?;
    if magic != MAGIC {
        return Err(Error::Parse { position: line, message: format!("expected `{MAGIC}`") });
    }
    let rank = lines.keyed("rank")?;
    let multiplicity = lines.keyed("multiplicity")?;
    let n = lines.keyed("dimension")?;
    if !(2..=super::MAX_RANK).contains(&rank) {
        return Err(Error::UnsupportedRank { rank, reason: "supported ranks are 2..=16" });
    }
    let mut matrices = Vec::new();
    for (i, j) in pairs(rank) {
        let (line, header) = lines.next()?;
        if header.split_whitespace().collect::<Vec<_>>() != ["J", &i.to_string(), &j.to_string()] {
            return Err(Error::Parse { position: line, message: format!("expected `J {i} {j}`") });
        }
        let mut m = DMatrix::zeros(n, n);
        for row in 0..n {
            let (line, text) = lines.next()?;
            let entries: Vec<&str> = text.split_whitespace().collect();
            if entries.len() != n {
                return Err(Error::Parse { position: line, message: format!("expected {n} entries") });
            }
            for (col, e) in entries.iter().enumerate() {
                let v: f64 = e
                    .parse()
                    .map_err(|_| Error::Parse { position: line, message: format!("bad entry `{e}`") })?;
                m[(row, col)] = T::lit(v);
            }
        }
        matrices.push(m);
    }
    CliffordRep::from_matrices(rank, multiplicity, matrices)
}
