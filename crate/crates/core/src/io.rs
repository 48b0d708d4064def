//! JSON interchange formats.
//!
//! * design: `{"v": 7, "blocks": [[0,1,3,4], ...]}` (canonical order on write,
//!   any order accepted on read)
//! * witness: `{"O": [...], "Z": [...], "designO": {...}, "designZ": {...}, "delta": [[i,j], ...]}`
//! * group: `{"v": 7, "elements": [[image array], ...]}`
//! * certificate: a group plus `"fixed": [...]`
//!
//! All points are 0-indexed.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blockset::{Block, Design, Permutation, MAX_POINTS};
use crate::decomposition::DecompositionWitness;
use crate::error::DesignError;
use crate::pyramidal::PyramidalCertificate;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at {field}: {message}")]
    Schema { field: String, message: String },
    #[error(transparent)]
    Design(#[from] DesignError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

fn schema(field: impl Into<String>, message: impl Into<String>) -> IoError {
    IoError::Schema {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignJson {
    pub v: usize,
    pub blocks: Vec<Vec<usize>>,
}

impl From<&Design> for DesignJson {
    fn from(d: &Design) -> Self {
        DesignJson {
            v: d.v(),
            blocks: d.blocks().iter().map(Block::to_vec).collect(),
        }
    }
}

fn block_from_points(v: usize, points: &[usize], field: &str) -> Result<Block, IoError> {
    let mut bits = 0u64;
    for (k, &p) in points.iter().enumerate() {
        if p >= v {
            return Err(schema(
                format!("{field}[{k}]"),
                format!("point {p} out of range for v = {v}"),
            ));
        }
        if bits >> p & 1 == 1 {
            return Err(schema(format!("{field}[{k}]"), format!("point {p} repeated")));
        }
        bits |= 1 << p;
    }
    Ok(Block::from_bits(v, bits)?)
}

impl DesignJson {
    pub fn to_design(&self, field: &str) -> Result<Design, IoError> {
        let v = self.v;
        if v == 0 || v > MAX_POINTS {
            return Err(schema(
                format!("{field}v"),
                format!("v = {v} must be in 1..={MAX_POINTS}"),
            ));
        }
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (i, pts) in self.blocks.iter().enumerate() {
            let f = format!("{field}blocks[{i}]");
            if pts.is_empty() {
                return Err(schema(f, "empty block"));
            }
            let b = block_from_points(v, pts, &f)?;
            if let Some(j) = blocks.iter().position(|x| *x == b) {
                return Err(schema(f, format!("duplicate of blocks[{j}]")));
            }
            blocks.push(b);
        }
        Ok(Design::new(v, blocks)?)
    }
}

pub fn design_to_json(d: &Design) -> String {
    serde_json::to_string(&DesignJson::from(d)).expect("serializable")
}

pub fn design_from_json(text: &str) -> Result<Design, IoError> {
    let raw: DesignJson = serde_json::from_str(text)?;
    raw.to_design("")
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_design(path: &Path) -> Result<Design, IoError> {
    design_from_json(&read(path)?)
}

pub fn save_design(d: &Design, path: &Path) -> Result<(), IoError> {
    write(path, &(design_to_json(d) + "\n"))
}

pub fn designs_to_json(ds: &[Design]) -> String {
    let raw: Vec<DesignJson> = ds.iter().map(DesignJson::from).collect();
    serde_json::to_string(&raw).expect("serializable")
}

pub fn designs_from_json(text: &str) -> Result<Vec<Design>, IoError> {
    let raw: Vec<DesignJson> = serde_json::from_str(text)?;
    raw.iter()
        .enumerate()
        .map(|(i, d)| d.to_design(&format!("[{i}].")))
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessJson {
    #[serde(rename = "O")]
    pub o: Vec<usize>,
    #[serde(rename = "Z")]
    pub z: Vec<usize>,
    #[serde(rename = "designO")]
    pub design_o: DesignJson,
    #[serde(rename = "designZ")]
    pub design_z: DesignJson,
    pub delta: Vec<[usize; 2]>,
}

pub fn witness_to_json(w: &DecompositionWitness) -> String {
    let raw = WitnessJson {
        o: w.o.to_vec(),
        z: w.z.to_vec(),
        design_o: DesignJson::from(&w.design_o),
        design_z: DesignJson::from(&w.design_z),
        delta: w.delta.iter().enumerate().map(|(i, &j)| [i, j]).collect(),
    };
    serde_json::to_string(&raw).expect("serializable")
}

/// Parses a witness. `v` is implied by `|O|` as `2|O| - 1`.
pub fn witness_from_json(text: &str) -> Result<DecompositionWitness, IoError> {
    let raw: WitnessJson = serde_json::from_str(text)?;
    let v = (2 * raw.o.len()).saturating_sub(1);
    if v == 0 || v > MAX_POINTS {
        return Err(schema(
            "O",
            format!("|O| = {} gives an unsupported point count", raw.o.len()),
        ));
    }
    let o = block_from_points(v, &raw.o, "O")?;
    let z = block_from_points(v, &raw.z, "Z")?;
    if !z.is_subset(&o) || z.len() + 1 != o.len() {
        return Err(schema("Z", "Z must be O minus one point"));
    }
    let design_o = raw.design_o.to_design("designO.")?;
    let design_z = raw.design_z.to_design("designZ.")?;
    let mut delta = vec![usize::MAX; raw.delta.len()];
    for (k, &[i, j]) in raw.delta.iter().enumerate() {
        if i >= delta.len() || delta[i] != usize::MAX {
            return Err(schema(
                format!("delta[{k}]"),
                format!("source index {i} invalid or repeated"),
            ));
        }
        delta[i] = j;
    }
    Ok(DecompositionWitness {
        o,
        z,
        p_prime: (o.bits() & !z.bits()).trailing_zeros() as usize,
        design_o,
        design_z,
        delta,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupJson {
    pub v: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<Vec<usize>>,
    pub elements: Vec<Vec<usize>>,
}

fn perms_from(v: usize, elements: &[Vec<usize>]) -> Result<Vec<Permutation>, IoError> {
    elements
        .iter()
        .enumerate()
        .map(|(i, e)| {
            if e.len() != v {
                return Err(schema(
                    format!("elements[{i}]"),
                    format!("length {} != v = {v}", e.len()),
                ));
            }
            Permutation::new(e.clone()).map_err(|err| schema(format!("elements[{i}]"), err.to_string()))
        })
        .collect()
}

pub fn group_to_json(v: usize, elements: &[Permutation]) -> String {
    let raw = GroupJson {
        v,
        fixed: None,
        elements: elements.iter().map(Permutation::images).collect(),
    };
    serde_json::to_string(&raw).expect("serializable")
}

pub fn group_from_json(text: &str) -> Result<(usize, Vec<Permutation>), IoError> {
    let raw: GroupJson = serde_json::from_str(text)?;
    let perms = perms_from(raw.v, &raw.elements)?;
    Ok((raw.v, perms))
}

pub fn certificate_to_json(cert: &PyramidalCertificate) -> String {
    let raw = GroupJson {
        v: cert.fixed.v(),
        fixed: Some(cert.fixed.to_vec()),
        elements: cert.elements.iter().map(Permutation::images).collect(),
    };
    serde_json::to_string(&raw).expect("serializable")
}

/// Parses a certificate; the orbit witness map is rebuilt from the elements.
pub fn certificate_from_json(text: &str) -> Result<PyramidalCertificate, IoError> {
    let raw: GroupJson = serde_json::from_str(text)?;
    let fixed = raw.fixed.as_ref().ok_or_else(|| schema("fixed", "missing"))?;
    if raw.v == 0 || raw.v > MAX_POINTS {
        return Err(schema("v", format!("v = {} unsupported", raw.v)));
    }
    let fixed = block_from_points(raw.v, fixed, "fixed")?;
    let perms = perms_from(raw.v, &raw.elements)?;
    Ok(PyramidalCertificate::new(fixed, perms))
}

pub fn load_certificate(path: &Path) -> Result<PyramidalCertificate, IoError> {
    certificate_from_json(&read(path)?)
}

pub fn load_witness(path: &Path) -> Result<DecompositionWitness, IoError> {
    witness_from_json(&read(path)?)
}
