//! Pencil JSON, complex-number lists and trajectory CSV.
//!
//! A pencil file looks like
//!
//! ```json
//! {"n": 2, "m0": [[1, 0], [0, 0]], "m1": [[[3, 0], [1, 0]], [[2, 0], [1, 0]]]}
//! ```
//!
//! Every entry is either a real number or an `[re, im]` pair; `n` is
//! optional but must agree with the matrices when present.

use std::fmt;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::ser::{SerializeSeq, Serializer};
use serde_json::{json, Value};

use crate::linalg::{c64, CMatrix, CVector};
use crate::pencil::Pencil;
use crate::solvers::Trajectory;

/// Malformed input, located by JSON line/column or by field path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub location: String,
    pub message: String,
}

impl ParseError {
    fn at(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self { location: location.into(), message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for ParseError {}

fn parse_value(text: &str) -> Result<Value, ParseError> {
    serde_json::from_str(text)
        .map_err(|e| ParseError::at(format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

/// A JSON number or `[re, im]` pair.
pub fn complex_from_value(v: &Value, path: &str) -> Result<Complex64, ParseError> {
    let number = |v: &Value, path: &str| -> Result<f64, ParseError> {
        v.as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| ParseError::at(path, format!("expected a finite number, found {v}")))
    };
    match v {
        Value::Number(_) => Ok(c64(number(v, path)?, 0.0)),
        Value::Array(pair) if pair.len() == 2 => {
            Ok(c64(number(&pair[0], &format!("{path}[0]"))?, number(&pair[1], &format!("{path}[1]"))?))
        }
        _ => Err(ParseError::at(path, format!("expected a number or [re, im] pair, found {v}"))),
    }
}

pub fn matrix_from_value(v: &Value, path: &str) -> Result<CMatrix, ParseError> {
    let rows = v.as_array().ok_or_else(|| ParseError::at(path, "expected an array of rows"))?;
    let n = rows.len();
    let mut m = CMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let rpath = format!("{path}[{i}]");
        let entries = row.as_array().ok_or_else(|| ParseError::at(&rpath, "expected an array of entries"))?;
        if entries.len() != n {
            return Err(ParseError::at(
                &rpath,
                format!("matrix is not square: row has {} entries, expected {n}", entries.len()),
            ));
        }
        for (j, e) in entries.iter().enumerate() {
            m[(i, j)] = complex_from_value(e, &format!("{rpath}[{j}]"))?;
        }
    }
    Ok(m)
}

pub fn parse_pencil(text: &str) -> Result<Pencil, ParseError> {
    let v = parse_value(text)?;
    let obj = v.as_object().ok_or_else(|| ParseError::at("$", "expected a JSON object"))?;
    let get = |k: &str| obj.get(k).ok_or_else(|| ParseError::at(k, "missing field"));
    let m0 = matrix_from_value(get("m0")?, "m0")?;
    let m1 = matrix_from_value(get("m1")?, "m1")?;
    if m0.nrows() != m1.nrows() {
        return Err(ParseError::at(
            "m1",
            format!("size mismatch: m0 is {0}x{0}, m1 is {1}x{1}", m0.nrows(), m1.nrows()),
        ));
    }
    if let Some(nv) = obj.get("n") {
        let n = nv.as_u64().ok_or_else(|| ParseError::at("n", format!("expected a count, found {nv}")))?;
        if n as usize != m0.nrows() {
            return Err(ParseError::at("n", format!("n = {n} but the matrices are {0}x{0}", m0.nrows())));
        }
    }
    Pencil::new(m0, m1).map_err(|e| ParseError::at("$", e.to_string()))
}

/// A vector given as a JSON array of numbers / `[re, im]` pairs.
pub fn parse_vector(text: &str) -> Result<CVector, ParseError> {
    let v = parse_value(text)?;
    let items = v.as_array().ok_or_else(|| ParseError::at("$", "expected an array"))?;
    let entries = items
        .iter()
        .enumerate()
        .map(|(i, e)| complex_from_value(e, &format!("[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CVector::from_vec(entries))
}

/// `[re, im]`, with negative zeros dropped.
pub fn complex_value(z: Complex64) -> Value {
    json!([z.re + 0.0, z.im + 0.0])
}

pub fn complex_list(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().map(|&z| complex_value(z)).collect())
}

pub fn vector_value(v: &CVector) -> Value {
    Value::Array(v.iter().map(|&z| complex_value(z)).collect())
}

pub fn matrix_value(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_value(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn pencil_value(p: &Pencil) -> Value {
    json!({"n": p.n(), "m0": matrix_value(p.m0()), "m1": matrix_value(p.m1())})
}

/// Serializes a complex matrix as rows of `[re, im]` pairs.
pub fn serialize_matrix<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
    let mut rows = s.serialize_seq(Some(m.nrows()))?;
    for i in 0..m.nrows() {
        let row: Vec<[f64; 2]> = (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect();
        rows.serialize_element(&row)?;
    }
    rows.end()
}

/// Finite floats as numbers, everything else as `null`.
pub fn real_value(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn csv_header(n: usize) -> String {
    let mut h = String::from("t");
    for k in 1..=n {
        h.push_str(&format!(",re(u_{k}),im(u_{k})"));
    }
    h
}

/// Writes `t,re(u_1),im(u_1),…` rows with 17 significant digits.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, mut out: W) -> io::Result<()> {
    let n = traj.states.first().map_or(0, |u| u.len());
    writeln!(out, "{}", csv_header(n))?;
    for (t, u) in traj.times.iter().zip(&traj.states) {
        write!(out, "{t:.16e}")?;
        for z in u.iter() {
            write!(out, ",{:.16e},{:.16e}", z.re, z.im)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
