//! JSON matrix files.
//!
//! ```json
//! {
//!   "kind": "smatrix",
//!   "n": 2,
//!   "energy": 1.0000000000000000e0,
//!   "entries": [
//!     [[7.0710678118654757e-1, 0.0000000000000000e0], [7.0710678118654757e-1, 0.0000000000000000e0]],
//!     [[7.0710678118654757e-1, 0.0000000000000000e0], [-7.0710678118654757e-1, 0.0000000000000000e0]]
//!   ]
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs. A `boundary_pair` stores the `n × 2n`
//! concatenation `(A, B)`. Every float is written with 17 significant digits,
//! which reads back bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::boundary::BoundaryCondition;
use crate::error::{check_energy, Error, Result};
use crate::linalg::ComplexMatrix;
use crate::smatrix::ScatteringMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    BoundaryPair,
    Smatrix,
    Unitary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub kind: MatrixKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(kind: MatrixKind, m: &ComplexMatrix, energy: Option<f64>) -> Self {
        let entries = m
            .to_rows()
            .into_iter()
            .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
            .collect();
        Self {
            kind,
            n: m.rows(),
            energy,
            entries,
        }
    }

    pub fn boundary_pair(bc: &BoundaryCondition) -> Self {
        Self::from_matrix(MatrixKind::BoundaryPair, &bc.concatenated(), None)
    }

    pub fn smatrix(s: &ScatteringMatrix) -> Self {
        Self::from_matrix(MatrixKind::Smatrix, s.matrix(), Some(s.energy()))
    }

    pub fn unitary(u: &ComplexMatrix) -> Self {
        Self::from_matrix(MatrixKind::Unitary, u, None)
    }

    fn expected_cols(&self) -> usize {
        match self.kind {
            MatrixKind::BoundaryPair => 2 * self.n,
            MatrixKind::Smatrix | MatrixKind::Unitary => self.n,
        }
    }

    /// Shape, finiteness and energy checks.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Format("n must be positive".into()));
        }
        if self.entries.len() != self.n {
            return Err(Error::Format(format!(
                "expected {} rows, found {}",
                self.n,
                self.entries.len()
            )));
        }
        let cols = self.expected_cols();
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Format(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            if let Some(j) = row
                .iter()
                .position(|[re, im]| !re.is_finite() || !im.is_finite())
            {
                return Err(Error::Format(format!("non-finite entry at ({i}, {j})")));
            }
        }
        match (self.kind, self.energy) {
            (MatrixKind::Smatrix, None) => {
                Err(Error::Format("smatrix file requires an energy".into()))
            }
            (_, Some(e)) if !(e.is_finite() && e > 0.0) => {
                Err(Error::Format(format!("energy must be positive, got {e}")))
            }
            _ => Ok(()),
        }
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        self.validate()?;
        let data = self
            .entries
            .iter()
            .flatten()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(self.n, self.expected_cols(), data)
    }

    fn expect_kind(&self, kind: MatrixKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::Format(format!(
                "expected a {} file, found {}",
                kind_name(kind),
                kind_name(self.kind)
            )))
        }
    }

    pub fn to_boundary_condition(&self) -> Result<BoundaryCondition> {
        self.expect_kind(MatrixKind::BoundaryPair)?;
        let ab = self.matrix()?;
        let n = self.n;
        let split = |offset: usize| {
            let data = (0..n)
                .flat_map(|i| ab.row(i)[offset..offset + n].to_vec())
                .collect();
            ComplexMatrix::new(n, n, data)
        };
        BoundaryCondition::new(split(0)?, split(n)?)
    }

    pub fn to_smatrix(&self) -> Result<ScatteringMatrix> {
        self.expect_kind(MatrixKind::Smatrix)?;
        let m = self.matrix()?;
        let energy = self.energy.expect("validated");
        check_energy(energy)?;
        ScatteringMatrix::new(m, energy)
    }

    pub fn to_json(&self) -> String {
        to_json_string(self).expect("matrix files always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

pub fn kind_name(kind: MatrixKind) -> &'static str {
    match kind {
        MatrixKind::BoundaryPair => "boundary_pair",
        MatrixKind::Smatrix => "smatrix",
        MatrixKind::Unitary => "unitary",
    }
}

/// Shortest form that still carries 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes any value as JSON, floats with 17 significant digits.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Format(e.to_string()))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|x| !x.is_array() && !x.is_object()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.push_str(&"  ".repeat(d));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(num) => {
            if num.is_f64() {
                out.push_str(&format_f64(num.as_f64().expect("f64 number")));
            } else {
                let _ = write!(out, "{num}");
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) if items.iter().all(is_flat) => {
            // Rows of scalars and rows of pairs stay on one line.
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, depth);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, item, depth + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&serde_json::to_string(key).expect("string serializes"));
                out.push_str(": ");
                write_value(out, item, depth + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}
