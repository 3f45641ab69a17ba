//! The JSON document format shared by every command.
//!
//! A matrix is an object with explicit shape and row-major `[re, im]` pairs:
//!
//! ```json
//! { "rows": 2, "cols": 2, "data": [[0, 0], [0, 0], [1, 0], [0, 0]] }
//! ```
//!
//! Input documents carry their matrices under `"matrices"` (name to matrix);
//! any other top-level keys are ignored, so every output document that
//! contains matrices is also a valid input. Floats are written in shortest
//! round-trip form, so `parse(emit(x))` reproduces `x` bit for bit.
//! Non-finite report values are written as the strings `"inf"`, `"-inf"` and
//! `"nan"`.

use std::collections::BTreeMap;

use contractions_core::{Complex64, ComplexMatrix};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawMatrix")]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl TryFrom<RawMatrix> for MatrixDoc {
    type Error = String;

    fn try_from(raw: RawMatrix) -> std::result::Result<Self, String> {
        let expected = raw.rows.checked_mul(raw.cols).ok_or("rows * cols overflows")?;
        if raw.data.len() != expected {
            return Err(format!(
                "matrix declares {}x{} but carries {} entries",
                raw.rows,
                raw.cols,
                raw.data.len()
            ));
        }
        Ok(MatrixDoc {
            rows: raw.rows,
            cols: raw.cols,
            data: raw.data,
        })
    }
}

impl MatrixDoc {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        MatrixDoc {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.data[i * self.cols + j];
            Complex64::new(re, im)
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
pub struct InputDocument {
    #[serde(default)]
    pub matrices: BTreeMap<String, MatrixDoc>,
}

/// Parsed input together with the name it was read from.
#[derive(Debug, Clone, PartialEq)]
pub struct Input {
    pub source_name: String,
    pub document: InputDocument,
}

impl Input {
    pub fn parse(text: &str, source_name: &str) -> Result<Input> {
        Ok(Input {
            source_name: source_name.to_string(),
            document: parse_typed(text, source_name)?,
        })
    }

    /// The matrix called `name`, or the only matrix when there is exactly one.
    pub fn matrix(&self, name: &str) -> Result<ComplexMatrix> {
        let matrices = &self.document.matrices;
        if let Some(m) = matrices.get(name) {
            return Ok(m.to_matrix());
        }
        if matrices.len() == 1 {
            if let Some(m) = matrices.values().next() {
                return Ok(m.to_matrix());
            }
        }
        Err(CliError::MissingMatrix {
            source_name: self.source_name.clone(),
            name: name.to_string(),
            available: matrices.keys().cloned().collect::<Vec<_>>().join(", "),
        })
    }
}

fn parse_error(text: &str, source_name: &str, path: &str, e: serde_json::Error) -> CliError {
    let path = if path == "." || path.is_empty() {
        "$".to_string()
    } else {
        format!("$.{path}")
    };
    CliError::Parse {
        source_name: source_name.to_string(),
        offset: byte_offset(text, e.line(), e.column()),
        path,
        message: strip_position(&e.to_string()),
    }
}

/// serde_json reports 1-based lines and byte columns.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (start + column.saturating_sub(1)).min(text.len())
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

/// Deserialize `text` as `T`, reporting the byte offset and path of the first
/// problem.
pub fn parse_typed<T: DeserializeOwned>(text: &str, source_name: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        parse_error(text, source_name, &path, e.into_inner())
    })?;
    de.end().map_err(|e| parse_error(text, source_name, "", e))?;
    Ok(value)
}

/// Parse any document as a JSON tree, with the same error reporting.
pub fn parse_value(text: &str, source_name: &str) -> Result<Value> {
    parse_typed(text, source_name)
}

/// Pretty-printed document with a trailing newline.
pub fn emit(doc: &Value) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("JSON values always serialize");
    out.push('\n');
    out
}

pub fn matrix(m: &ComplexMatrix) -> Value {
    serde_json::to_value(MatrixDoc::from_matrix(m)).expect("matrices always serialize")
}

pub fn real(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x.is_nan() {
        Value::from("nan")
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

pub fn complex(z: Complex64) -> Value {
    Value::Array(vec![real(z.re), real(z.im)])
}

pub fn reals(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| real(x)).collect())
}

/// `{"A": matrix, ...}` in the given order.
pub fn named_matrices<'a>(items: impl IntoIterator<Item = (&'a str, &'a ComplexMatrix)>) -> Value {
    let mut map = Map::new();
    for (name, m) in items {
        map.insert(name.to_string(), matrix(m));
    }
    Value::Object(map)
}
