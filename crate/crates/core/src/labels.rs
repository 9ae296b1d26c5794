//! Label → matrix lookup for target unitaries.
//!
//! Pauli strings over `IXYZ` (e.g. `X`, `XZ`, `IYY`) and `H`, `S`, `T` are
//! built in. Anything else comes from a TOML table:
//!
//! ```toml
//! [U0]
//! re = [[0.0, 1.0], [1.0, 0.0]]
//! im = [[0.0, 0.0], [0.0, 0.0]]   # optional
//! ```

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::FRAC_1_SQRT_2;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{is_unitary, kron, pauli, CMatrix};
use crate::model::C64;

#[derive(Clone, Debug, Default)]
pub struct LabelTable {
    custom: HashMap<String, CMatrix>,
}

#[derive(Deserialize)]
struct MatrixEntry {
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

impl LabelTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: impl Into<String>, m: CMatrix) -> Result<()> {
        let label = label.into();
        if !is_unitary(&m, 1e-12) {
            return Err(Error::NotUnitary(label));
        }
        if label.is_empty() || label.contains(|c: char| c == ',' || c.is_whitespace()) {
            return Err(Error::InvalidArgument(format!("bad label `{label}`")));
        }
        self.custom.insert(label, m);
        Ok(())
    }

    pub fn parse_toml(text: &str) -> Result<LabelTable> {
        let entries: BTreeMap<String, MatrixEntry> =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut table = LabelTable::new();
        for (label, e) in entries {
            let d = e.re.len();
            let im = e.im.unwrap_or_else(|| vec![vec![0.0; d]; d]);
            if e.re.iter().chain(im.iter()).any(|row| row.len() != d) || im.len() != d {
                return Err(Error::Config(format!("matrix `{label}` is not square")));
            }
            let m = CMatrix::from_fn(d, d, |r, c| C64::new(e.re[r][c], im[r][c]));
            table.insert(label, m)?;
        }
        Ok(table)
    }

    pub fn resolve(&self, label: &str) -> Result<CMatrix> {
        if let Some(m) = self.custom.get(label) {
            return Ok(m.clone());
        }
        builtin(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }
}

fn builtin(label: &str) -> Option<CMatrix> {
    let r = FRAC_1_SQRT_2;
    let o = C64::new(1.0, 0.0);
    let z = C64::new(0.0, 0.0);
    match label {
        "H" => return Some(CMatrix::from_row_slice(2, 2, &[o * r, o * r, o * r, -o * r])),
        "S" => return Some(CMatrix::from_row_slice(2, 2, &[o, z, z, C64::new(0.0, 1.0)])),
        "T" => return Some(CMatrix::from_row_slice(2, 2, &[o, z, z, C64::new(r, r)])),
        _ => {}
    }
    if label.is_empty() {
        return None;
    }
    let mut acc = CMatrix::identity(1, 1);
    for c in label.chars() {
        acc = kron(&acc, &pauli(c)?);
    }
    Some(acc)
}
