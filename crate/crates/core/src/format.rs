//! Serialization of step functions and coefficient arrays.
//!
//! Dense functions: JSON `{d, m, values}` or a binary record of two
//! little-endian `u32` (`d`, `m`) followed by `2^(md)` little-endian `f64`.
//! Sparse functions: JSON `{d, atoms: [{level, index, sign, log2mag}]}`.
//! Isotropic coefficients: JSON `{d, K, levels: [{k, entries: [{parent, pattern, value}]}]}`.
//! Tensor coefficients: JSON `{d, m, entries: [{n, value}]}`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::dyadic::{cell_count, Atom, DyadicCube, DyadicStepFunction, LogCoefficient, SparseStepFunction, DEFAULT_CELL_BUDGET};
use crate::error::{Error, Result};
use crate::haar::{HaarCoefficients, HaarIndex, TensorCoefficients, TensorHaarIndex};

fn format_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Format(msg.into()))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DenseRecord {
    d: usize,
    m: u32,
    values: Vec<f64>,
}

pub fn dense_to_json(f: &DyadicStepFunction) -> Result<String> {
    let rec = DenseRecord { d: f.dim(), m: f.level(), values: f.values().to_vec() };
    Ok(serde_json::to_string(&rec)?)
}

pub fn dense_from_json(s: &str) -> Result<DyadicStepFunction> {
    let rec: DenseRecord = serde_json::from_str(s)?;
    DyadicStepFunction::new(rec.d, rec.m, rec.values)
}

pub fn write_dense_binary<W: Write>(f: &DyadicStepFunction, mut w: W) -> Result<()> {
    w.write_all(&(f.dim() as u32).to_le_bytes())?;
    w.write_all(&f.level().to_le_bytes())?;
    for v in f.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn dense_to_binary(f: &DyadicStepFunction) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 8 * f.values().len());
    write_dense_binary(f, &mut out).expect("writing to a Vec cannot fail");
    out
}

pub fn read_dense_binary<R: Read>(mut r: R) -> Result<DyadicStepFunction> {
    let mut head = [0u8; 8];
    r.read_exact(&mut head).map_err(|_| Error::Format("truncated header".into()))?;
    let d = u32::from_le_bytes(head[..4].try_into().unwrap()) as usize;
    let m = u32::from_le_bytes(head[4..].try_into().unwrap());
    crate::dyadic::check_dim(d)?;
    let n = cell_count(d, m, DEFAULT_CELL_BUDGET)?;
    let mut bytes = Vec::with_capacity(n * 8);
    r.read_to_end(&mut bytes)?;
    if bytes.len() != n * 8 {
        return format_err(format!("expected {} value bytes, found {}", n * 8, bytes.len()));
    }
    let values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    DyadicStepFunction::new(d, m, values)
}

pub fn dense_from_binary(bytes: &[u8]) -> Result<DyadicStepFunction> {
    read_dense_binary(bytes)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomRecord {
    level: u32,
    index: Vec<u64>,
    sign: i8,
    log2mag: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SparseRecord {
    d: usize,
    atoms: Vec<AtomRecord>,
}

pub fn sparse_to_json(f: &SparseStepFunction) -> Result<String> {
    let atoms = f
        .atoms()
        .iter()
        .map(|a| AtomRecord {
            level: a.cube.level(),
            index: a.cube.index().to_vec(),
            sign: a.coeff.sign,
            log2mag: a.coeff.log2mag,
        })
        .collect();
    Ok(serde_json::to_string(&SparseRecord { d: f.dim(), atoms })?)
}

pub fn sparse_from_json(s: &str) -> Result<SparseStepFunction> {
    let rec: SparseRecord = serde_json::from_str(s)?;
    let mut atoms = Vec::with_capacity(rec.atoms.len());
    for a in rec.atoms {
        if !matches!(a.sign, -1..=1) {
            return format_err(format!("sign {} is not -1, 0 or 1", a.sign));
        }
        if a.log2mag.is_nan() {
            return format_err("log2mag is NaN");
        }
        let cube = DyadicCube::new(a.level, a.index)?;
        if cube.dim() != rec.d {
            return format_err("atom dimension differs from d");
        }
        atoms.push(Atom { cube, coeff: LogCoefficient::from_log2(a.sign, a.log2mag) });
    }
    SparseStepFunction::from_atoms(rec.d, atoms)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientEntry {
    parent: Vec<u64>,
    pattern: usize,
    value: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientLevel {
    k: u32,
    entries: Vec<CoefficientEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientRecord {
    d: usize,
    #[serde(rename = "K")]
    max_level: u32,
    levels: Vec<CoefficientLevel>,
}

/// Every stored coefficient is written, zeros included. The scaling
/// coefficient is the single entry of level 0 with an empty parent and pattern 0.
pub fn coefficients_to_json(c: &HaarCoefficients) -> Result<String> {
    let levels = (0..=c.max_level())
        .map(|k| CoefficientLevel {
            k,
            entries: (0..c.level(k).len())
                .map(|i| match c.index_at(k, i) {
                    HaarIndex::Scaling => CoefficientEntry { parent: Vec::new(), pattern: 0, value: c.scaling() },
                    HaarIndex::Wavelet { parent, pattern, .. } => {
                        CoefficientEntry { parent: parent.index().to_vec(), pattern, value: c.level(k)[i] }
                    }
                })
                .collect(),
        })
        .collect();
    Ok(serde_json::to_string(&CoefficientRecord { d: c.dim(), max_level: c.max_level(), levels })?)
}

/// Missing entries read as zero.
pub fn coefficients_from_json(s: &str) -> Result<HaarCoefficients> {
    let rec: CoefficientRecord = serde_json::from_str(s)?;
    let mut c = HaarCoefficients::zeros(rec.d, rec.max_level)?;
    for lv in rec.levels {
        if lv.k > rec.max_level {
            return format_err(format!("level {} exceeds K = {}", lv.k, rec.max_level));
        }
        for e in lv.entries {
            let idx = if lv.k == 0 {
                if !e.parent.is_empty() || e.pattern != 0 {
                    return format_err("level 0 holds only the scaling entry");
                }
                HaarIndex::Scaling
            } else {
                let parent = DyadicCube::new(lv.k - 1, e.parent)?;
                if parent.dim() != rec.d {
                    return format_err("parent dimension differs from d");
                }
                HaarIndex::wavelet(parent, e.pattern)?
            };
            c.set(&idx, e.value)?;
        }
    }
    Ok(c)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorEntry {
    n: Vec<u64>,
    value: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorRecord {
    d: usize,
    m: u32,
    entries: Vec<TensorEntry>,
}

/// Only nonzero coefficients are written.
pub fn tensor_to_json(c: &TensorCoefficients) -> Result<String> {
    let entries = c.nonzero().into_iter().map(|(idx, value)| TensorEntry { n: idx.0, value }).collect();
    Ok(serde_json::to_string(&TensorRecord { d: c.dim(), m: c.level(), entries })?)
}

pub fn tensor_from_json(s: &str) -> Result<TensorCoefficients> {
    let rec: TensorRecord = serde_json::from_str(s)?;
    let entries = rec
        .entries
        .into_iter()
        .map(|e| Ok((TensorHaarIndex::new(e.n)?, e.value)))
        .collect::<Result<Vec<_>>>()?;
    TensorCoefficients::from_entries(rec.d, rec.m, &entries)
}

/// A function read from disk, in whichever representation the file holds.
#[derive(Clone, Debug)]
pub enum LoadedFunction {
    Dense(DyadicStepFunction),
    Sparse(SparseStepFunction),
}

/// Reads a dense binary file, or a JSON file holding a dense or sparse record.
pub fn load_function(bytes: &[u8]) -> Result<LoadedFunction> {
    let first = bytes.iter().find(|b| !b.is_ascii_whitespace());
    if first != Some(&b'{') {
        return dense_from_binary(bytes).map(LoadedFunction::Dense);
    }
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))?;
    let v: serde_json::Value = serde_json::from_str(text)?;
    if v.get("atoms").is_some() {
        sparse_from_json(text).map(LoadedFunction::Sparse)
    } else if v.get("values").is_some() {
        dense_from_json(text).map(LoadedFunction::Dense)
    } else {
        format_err("JSON record has neither 'values' nor 'atoms'")
    }
}
