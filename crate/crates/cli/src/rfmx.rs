//! `RFMX` sidecar: dense complex matrices for `microstate-extract`.
//!
//! Layout, little-endian: magic `RFMX`, `u32` version, `u32` dimension,
//! `u32` projection count, `u32` unitary count, `u32` tolerance count, then
//! each tolerance as `u32` name length, UTF-8 name, `f64` value, then every
//! matrix row-major as `(f64 re, f64 im)` pairs, projections first.

use crate::error::{CliError, CliResult};
use num_complex::Complex64;
use resfin_core::matrix::{CMatrix, MatrixTuple};
use std::collections::BTreeMap;

pub const MAGIC: &[u8; 4] = b"RFMX";
pub const VERSION: u32 = 1;

pub fn encode(tuple: &MatrixTuple) -> Vec<u8> {
    let d = tuple.dimension;
    let mut out = Vec::with_capacity(24 + 16 * d * d * (tuple.projections.len() + tuple.unitaries.len()));
    out.extend_from_slice(MAGIC);
    for n in [VERSION as usize, d, tuple.projections.len(), tuple.unitaries.len(), tuple.tolerances.len()] {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    for (name, value) in &tuple.tolerances {
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&value.to_le_bytes());
    }
    for m in tuple.projections.iter().chain(&tuple.unitaries) {
        for i in 0..d {
            for j in 0..d {
                out.extend_from_slice(&m[(i, j)].re.to_le_bytes());
                out.extend_from_slice(&m[(i, j)].im.to_le_bytes());
            }
        }
    }
    out
}

struct Reader<'a> {
    name: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn err(&self, field: &str, message: impl Into<String>) -> CliError {
        CliError::Parse { file: self.name.into(), line: None, field: format!("{field} @ byte {}", self.pos), message: message.into() }
    }

    fn take(&mut self, n: usize, field: &str) -> CliResult<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| self.err(field, "truncated"))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self, field: &str) -> CliResult<usize> {
        Ok(u32::from_le_bytes(self.take(4, field)?.try_into().expect("4 bytes")) as usize)
    }

    fn f64(&mut self, field: &str) -> CliResult<f64> {
        Ok(f64::from_le_bytes(self.take(8, field)?.try_into().expect("8 bytes")))
    }
}

pub fn decode(name: &str, bytes: &[u8]) -> CliResult<MatrixTuple> {
    let mut r = Reader { name, bytes, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(r.err("magic", "not an RFMX file"));
    }
    let version = r.u32("version")?;
    if version != VERSION as usize {
        return Err(CliError::UnsupportedVersion { file: name.into(), version: version as i64 });
    }
    let d = r.u32("dimension")?;
    let np = r.u32("projections")?;
    let nu = r.u32("unitaries")?;
    let nt = r.u32("tolerances")?;
    let needed = (np + nu).checked_mul(d * d * 16);
    if d == 0 || needed.is_none_or(|n| n > bytes.len()) {
        return Err(r.err("dimension", format!("dimension {d} with {} matrices does not fit the file", np + nu)));
    }
    let mut tolerances = BTreeMap::new();
    for _ in 0..nt {
        let len = r.u32("tolerance name")?;
        let raw = r.take(len, "tolerance name")?.to_vec();
        let key = String::from_utf8(raw).map_err(|_| r.err("tolerance name", "not UTF-8"))?;
        tolerances.insert(key, r.f64("tolerance value")?);
    }
    let mut matrices = Vec::with_capacity(np + nu);
    for k in 0..np + nu {
        let field = format!("matrix {k}");
        let mut m = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = Complex64::new(r.f64(&field)?, r.f64(&field)?);
            }
        }
        matrices.push(m);
    }
    if r.pos != bytes.len() {
        return Err(r.err("trailer", format!("{} unexpected trailing bytes", bytes.len() - r.pos)));
    }
    let unitaries = matrices.split_off(np);
    let mut tuple = MatrixTuple::new(matrices, unitaries)?;
    tuple.tolerances = tolerances;
    Ok(tuple)
}
