//! Plain-text problem dump used for regression fixtures.
//!
//! ```text
//! m 2
//! blocks 3 2
//! c 0.0000000000000000e0 1.0000000000000000e0
//! 0 0 0 0 1.0000000000000000e0 0.0000000000000000e0
//! ```
//! Entry lines are `block i row col re im`, with `i = 0` meaning `F₀`.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::{CoefMatrix, SdpBlock, SdpProblem};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

fn io_err(e: std::io::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn write_dump<W: Write>(p: &SdpProblem, mut w: W) -> Result<()> {
    let dims: Vec<String> = p.block_dims().iter().map(|d| d.to_string()).collect();
    writeln!(w, "m {}", p.m()).map_err(io_err)?;
    writeln!(w, "blocks {}", dims.join(" ")).map_err(io_err)?;
    let c: Vec<String> = p.c().iter().map(|v| format!("{v:.16e}")).collect();
    writeln!(w, "c {}", c.join(" ")).map_err(io_err)?;
    for (b, block) in p.blocks().iter().enumerate() {
        let f0 = CoefMatrix::from_dense(block.f0.clone());
        let mats = std::iter::once(&f0).chain(block.f.iter());
        for (i, f) in mats.enumerate() {
            for (r, col, v) in f.entries() {
                writeln!(w, "{b} {i} {r} {col} {:.16e} {:.16e}", v.re, v.im).map_err(io_err)?;
            }
        }
    }
    Ok(())
}

pub fn read_dump<R: BufRead>(r: R) -> Result<SdpProblem> {
    let mut lines = r.lines();
    let mut next = |what: &str| -> Result<String> {
        lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what} line")))?
            .map_err(io_err)
    };
    let header = |line: String, key: &str| -> Result<Vec<String>> {
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(Error::Parse(format!("expected '{key}' line, got '{line}'")));
        }
        Ok(parts.map(str::to_string).collect())
    };
    let num = |s: &str| -> Result<f64> { s.parse().map_err(|_| Error::Parse(format!("bad number '{s}'"))) };
    let idx = |s: &str| -> Result<usize> { s.parse().map_err(|_| Error::Parse(format!("bad index '{s}'"))) };

    let m_line = header(next("m")?, "m")?;
    let m = idx(m_line.first().ok_or_else(|| Error::Parse("m line has no value".into()))?)?;
    let dims: Vec<usize> = header(next("blocks")?, "blocks")?.iter().map(|s| idx(s)).collect::<Result<_>>()?;
    let c: Vec<f64> = header(next("c")?, "c")?.iter().map(|s| num(s)).collect::<Result<_>>()?;
    if c.len() != m {
        return Err(Error::Parse(format!("c has {} entries, m = {m}", c.len())));
    }
    let mut mats: Vec<Vec<CMatrix>> = dims.iter().map(|&n| vec![CMatrix::zeros(n, n); m + 1]).collect();
    for line in lines {
        let line = line.map_err(io_err)?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.is_empty() {
            continue;
        }
        if f.len() != 6 {
            return Err(Error::Parse(format!("entry line needs 6 fields: '{line}'")));
        }
        let (b, i, row, col) = (idx(f[0])?, idx(f[1])?, idx(f[2])?, idx(f[3])?);
        if b >= dims.len() || i > m || row >= dims[b] || col >= dims[b] {
            return Err(Error::Parse(format!("entry out of range: '{line}'")));
        }
        mats[b][i][(row, col)] += Complex64::new(num(f[4])?, num(f[5])?);
    }
    let blocks = mats
        .into_iter()
        .map(|mut v| {
            let f0 = v.remove(0);
            SdpBlock::new(f0, v.into_iter().map(CoefMatrix::from_dense).collect())
        })
        .collect();
    SdpProblem::new(c, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, r};

    #[test]
    fn round_trip() {
        let mut f1 = CMatrix::zeros(2, 2);
        f1[(0, 1)] = c(0.1, 1.0 / 3.0);
        f1[(1, 0)] = c(0.1, -1.0 / 3.0);
        let b0 = SdpBlock::new(CMatrix::from_real_diagonal(&[1.0, 2.0]), vec![CoefMatrix::from_dense(f1), CoefMatrix::identity(2)]);
        let b1 = SdpBlock::new(CMatrix::from_real_diagonal(&[std::f64::consts::PI]), vec![CoefMatrix::zeros(1), CoefMatrix::identity(1)]);
        let p = SdpProblem::new(vec![0.0, 1.0], vec![b0, b1]).unwrap();
        let mut buf = Vec::new();
        write_dump(&p, &mut buf).unwrap();
        let q = read_dump(buf.as_slice()).unwrap();
        assert_eq!(q.c(), p.c());
        assert_eq!(q.block_dims(), vec![2, 1]);
        for (a, b) in p.blocks().iter().zip(q.blocks()) {
            assert_eq!(a.f0, b.f0);
            for (x, y) in a.f.iter().zip(&b.f) {
                assert_eq!(x.to_dense(), y.to_dense());
            }
        }
        assert_eq!(q.blocks()[1].f0[(0, 0)], r(std::f64::consts::PI));
    }

    #[test]
    fn malformed_input() {
        assert!(read_dump("".as_bytes()).is_err());
        assert!(read_dump("m 1\nblocks 1\nc\n".as_bytes()).is_err());
        assert!(read_dump("m 0\nblocks 1\nc\n0 1 0 0 1 0\n".as_bytes()).is_err());
        assert!(read_dump("m 0\nblocks 1\nc\n0 0 0 0 x 0\n".as_bytes()).is_err());
        assert!(read_dump("m 0\nblocks 1\nc\n0 0 0 0 1 0\n".as_bytes()).is_ok());
    }
}
