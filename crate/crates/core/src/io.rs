//! JSON matrix files: `{"dim": d, "re": [[...]], "im": [[...]]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SkewError};
use crate::matcore::ComplexMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

fn check_part(name: &str, part: &[Vec<f64>], dim: usize) -> Result<()> {
    if part.len() != dim {
        return Err(SkewError::Format(format!(
            "{name}: expected dim rows (dim = {dim}, got {} rows)",
            part.len()
        )));
    }
    for (r, row) in part.iter().enumerate() {
        if row.len() != dim {
            return Err(SkewError::Format(format!(
                "{name}: row {r} has {} entries, expected dim = {dim}",
                row.len()
            )));
        }
        if let Some(c) = row.iter().position(|x| !x.is_finite()) {
            return Err(SkewError::Format(format!("{name}: non-finite value at ({r}, {c})")));
        }
    }
    Ok(())
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let d = m.dim();
        let rows = |f: fn(num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..d).map(|r| (0..d).map(|c| f(m.get(r, c))).collect()).collect()
        };
        Self { dim: d, re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.dim == 0 {
            return Err(SkewError::Format("dim: must be positive".into()));
        }
        check_part("re", &self.re, self.dim)?;
        check_part("im", &self.im, self.dim)?;
        let re: Vec<f64> = self.re.concat();
        let im: Vec<f64> = self.im.concat();
        ComplexMatrix::from_parts(self.dim, &re, &im)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| SkewError::Format(format!("invalid matrix JSON: {e}")))
}

/// Parses one matrix file.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    parse::<MatrixFile>(text)?.to_matrix()
}

/// Parses a Kraus list: a JSON array of matrix files.
pub fn parse_kraus_list(text: &str) -> Result<Vec<ComplexMatrix>> {
    parse::<Vec<MatrixFile>>(text)?.iter().map(MatrixFile::to_matrix).collect()
}

pub fn kraus_list_json(ops: &[ComplexMatrix]) -> String {
    let files: Vec<MatrixFile> = ops.iter().map(MatrixFile::from_matrix).collect();
    serde_json::to_string(&files).expect("plain data serializes")
}
