//! Unitary matrices as `{"re": [[...]], "im": [[...]]}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

#[derive(Serialize, Deserialize)]
struct SplitMatrix {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

pub fn matrix_from_json(text: &str) -> Result<CMatrix> {
    let raw: SplitMatrix = serde_json::from_str(text)?;
    let rows = raw.re.len();
    if rows == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    let cols = raw.re[0].len();
    if raw.im.len() != rows
        || raw.re.iter().any(|r| r.len() != cols)
        || raw.im.iter().any(|r| r.len() != cols)
    {
        return Err(Error::InvalidInput("re and im must be rectangular and of equal shape".into()));
    }
    let m = CMatrix::from_fn(rows, cols, |i, j| Complex64::new(raw.re[i][j], raw.im[i][j]));
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    Ok(m)
}

pub fn matrix_to_json_value(m: &CMatrix) -> serde_json::Value {
    let raw = SplitMatrix {
        re: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect()).collect(),
        im: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect()).collect(),
    };
    serde_json::to_value(raw).expect("matrix serializes")
}

pub fn matrix_to_json(m: &CMatrix) -> String {
    serde_json::to_string_pretty(&matrix_to_json_value(m)).expect("matrix serializes")
}
