//! File formats: the polynomial text format (`coeff e1 e2 ... en` per
//! line), float64 matrices with a JSON header line, and moment-oracle
//! serialization in graded monomial order.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::monomial::{Monomial, MonomialTable};
use crate::poly::Polynomial;
use crate::pseudo::{MomentOracle, Provenance};
use crate::{Defaults, Error, Result};

/// One term per line: decimal coefficient then the integer exponents.
pub fn polynomial_to_text(p: &Polynomial) -> String {
    let mut out = String::new();
    for (m, c) in p.terms() {
        out.push_str(&format!("{c}"));
        for e in m.exponents() {
            out.push_str(&format!(" {e}"));
        }
        out.push('\n');
    }
    out
}

pub fn polynomial_from_text(text: &str, n: usize) -> Result<Polynomial> {
    let mut p = Polynomial::zero(n);
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let coeff: f64 = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("line {}: empty", ln + 1)))?
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad coefficient", ln + 1)))?;
        let exps: Vec<u32> = parts
            .map(|s| s.parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("line {}: bad exponent", ln + 1)))?;
        if exps.len() != n {
            return Err(Error::Parse(format!(
                "line {}: expected {n} exponents, got {}",
                ln + 1,
                exps.len()
            )));
        }
        p.add_term(Monomial::new(exps), coeff);
    }
    Ok(p)
}

#[derive(Serialize, Deserialize)]
struct MatrixHeader {
    rows: usize,
    cols: usize,
}

/// Row-major IEEE-754 float64 little-endian payload after a one-line JSON
/// header `{"rows":R,"cols":C}`.
pub fn write_matrix(w: &mut impl Write, m: &DMatrix<f64>) -> Result<()> {
    let header = serde_json::to_string(&MatrixHeader {
        rows: m.nrows(),
        cols: m.ncols(),
    })
    .expect("header serializes");
    w.write_all(header.as_bytes())?;
    w.write_all(b"\n")?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            w.write_all(&m[(i, j)].to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_matrix(r: &mut impl Read) -> Result<DMatrix<f64>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Parse("missing header line".into()))?;
    let header: MatrixHeader = serde_json::from_slice(&bytes[..newline])
        .map_err(|e| Error::Parse(format!("bad header: {e}")))?;
    let payload = &bytes[newline + 1..];
    let want = header.rows * header.cols * 8;
    if payload.len() != want {
        return Err(Error::Parse(format!(
            "payload holds {} bytes, expected {want}",
            payload.len()
        )));
    }
    let mut m = DMatrix::zeros(header.rows, header.cols);
    for i in 0..header.rows {
        for j in 0..header.cols {
            let off = (i * header.cols + j) * 8;
            let mut buf = [0u8; 8];
            buf.copy_from_slice(&payload[off..off + 8]);
            m[(i, j)] = f64::from_le_bytes(buf);
        }
    }
    Ok(m)
}

#[derive(Serialize, Deserialize)]
struct OracleHeader {
    n: usize,
    level: usize,
    provenance: Provenance,
}

/// JSON header `{n, level, provenance}` then the float64 moment array in
/// graded monomial order (ascending degree, then ascending lexicographic on
/// the exponent vector).
pub fn write_oracle(w: &mut impl Write, o: &MomentOracle) -> Result<()> {
    let header = serde_json::to_string(&OracleHeader {
        n: o.n(),
        level: o.level(),
        provenance: o.provenance(),
    })
    .expect("header serializes");
    w.write_all(header.as_bytes())?;
    w.write_all(b"\n")?;
    for &m in o.moments() {
        w.write_all(&m.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_oracle(r: &mut impl Read) -> Result<MomentOracle> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Parse("missing header line".into()))?;
    let header: OracleHeader = serde_json::from_slice(&bytes[..newline])
        .map_err(|e| Error::Parse(format!("bad header: {e}")))?;
    let table = MonomialTable::new(header.n, header.level, Defaults::default().moment_guard)?;
    let payload = &bytes[newline + 1..];
    if payload.len() != table.len() * 8 {
        return Err(Error::Parse(format!(
            "payload holds {} bytes, expected {}",
            payload.len(),
            table.len() * 8
        )));
    }
    let moments: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    MomentOracle::from_parts(table, moments, header.provenance)
}

/// FNV-1a 64-bit content hash, reported in run manifests so re-runs can
/// verify they saw identical inputs.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}
