//! Gate matrix files.
//!
//! ```json
//! {"j": "3/2", "matrix": [[[re, im], [re, im], ...], ...]}
//! ```
//!
//! Rows are indexed by `m` descending. Extra top-level fields are ignored, so
//! the output of the optimizer can be read back directly.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Result, SpinError};
use crate::geometry::UnitaryGate;
use crate::halfint::HalfInt;
use crate::linalg::{c, CMatrix};
use crate::operators::SpinOperator;

/// Unitarity tolerance applied to matrices read from files.
pub const FILE_UNITARY_TOL: f64 = 1e-8;

fn malformed(row: usize, col: usize, reason: impl Into<String>) -> SpinError {
    SpinError::MalformedMatrix { row, col, reason: reason.into() }
}

pub fn matrix_to_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|k| json!([m[(r, k)].re, m[(r, k)].im])).collect()))
            .collect(),
    )
}

pub fn gate_to_json(u: &UnitaryGate) -> Value {
    json!({ "j": u.j(), "matrix": matrix_to_json(u.matrix()) })
}

fn entry(v: &Value, row: usize, col: usize) -> Result<f64> {
    v.as_f64().ok_or_else(|| malformed(row, col, format!("expected a number, found {v}")))
}

/// Parses a square complex matrix of side `d`, reporting the first bad entry.
pub fn matrix_from_json(v: &Value, d: usize) -> Result<CMatrix> {
    let rows = v.as_array().ok_or_else(|| malformed(0, 0, "\"matrix\" must be an array of rows"))?;
    if rows.len() != d {
        return Err(malformed(rows.len().min(d), 0, format!("expected {d} rows, found {}", rows.len())));
    }
    let mut m = CMatrix::zeros(d, d);
    for (r, row) in rows.iter().enumerate() {
        let cols = row.as_array().ok_or_else(|| malformed(r, 0, "row must be an array"))?;
        if cols.len() != d {
            return Err(malformed(r, cols.len().min(d), format!("expected {d} entries, found {}", cols.len())));
        }
        for (k, z) in cols.iter().enumerate() {
            let pair = z.as_array().filter(|p| p.len() == 2).ok_or_else(|| malformed(r, k, format!("expected [re, im], found {z}")))?;
            m[(r, k)] = c(entry(&pair[0], r, k)?, entry(&pair[1], r, k)?);
        }
    }
    Ok(m)
}

pub fn gate_from_json(v: &Value) -> Result<UnitaryGate> {
    let obj = v.as_object().ok_or_else(|| SpinError::Domain("gate file must be a JSON object".into()))?;
    let j: HalfInt = serde_json::from_value(obj.get("j").cloned().ok_or_else(|| SpinError::Domain("gate file lacks \"j\"".into()))?)?;
    if j.twice() < 1 {
        return Err(SpinError::InvalidLabel(format!("j = {j} must be positive")));
    }
    let m = matrix_from_json(obj.get("matrix").ok_or_else(|| SpinError::Domain("gate file lacks \"matrix\"".into()))?, j.dim())?;
    UnitaryGate::with_tolerance(SpinOperator::new(j, m)?, FILE_UNITARY_TOL)
}

pub fn parse_gate(text: &str) -> Result<UnitaryGate> {
    gate_from_json(&serde_json::from_str(text)?)
}

pub fn read_gate(path: impl AsRef<Path>) -> Result<UnitaryGate> {
    parse_gate(&fs::read_to_string(path)?)
}

pub fn write_gate(path: impl AsRef<Path>, u: &UnitaryGate) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(&gate_to_json(u))?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::KnownGate;
    use crate::geometry::ep_geometric;
    use crate::haar::haar_unitary;

    #[test]
    fn round_trip_is_exact() {
        for seed in 0..5 {
            let u = haar_unitary(5, seed).unwrap();
            let back = parse_gate(&gate_to_json(&u).to_string()).unwrap();
            assert_eq!(back.matrix(), u.matrix());
            assert_eq!(ep_geometric(&back, 2).unwrap(), ep_geometric(&u, 2).unwrap());
        }
    }

    #[test]
    fn accepts_all_j_spellings_and_extra_fields() {
        let m = matrix_to_json(KnownGate::J32Opt.gate().matrix());
        for j in [json!("3/2"), json!(1.5), json!("1.5")] {
            let v = json!({ "j": j, "ep": 0.95, "matrix": m });
            assert_eq!(gate_from_json(&v).unwrap().j(), HalfInt::from_twice(3));
        }
    }

    #[test]
    fn reports_offending_entry() {
        let text = r#"{"j": 1, "matrix": [[[1,0],[0,0],[0,0]], [[0,0],[1,0],[0,0]], [[0,0],[0,"x"],[1,0]]]}"#;
        match parse_gate(text) {
            Err(SpinError::MalformedMatrix { row: 2, col: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        let short = r#"{"j": 1, "matrix": [[[1,0],[0,0],[0,0]], [[0,0],[1,0]], [[0,0],[0,0],[1,0]]]}"#;
        assert!(matches!(parse_gate(short), Err(SpinError::MalformedMatrix { row: 1, col: 2, .. })));
        let rows = r#"{"j": 1, "matrix": [[[1,0],[0,0],[0,0]]]}"#;
        assert!(matches!(parse_gate(rows), Err(SpinError::MalformedMatrix { row: 1, .. })));
    }

    #[test]
    fn rejects_non_unitary() {
        let text = r#"{"j": "1/2", "matrix": [[[1,0],[0,0]], [[0,0],[1.001,0]]]}"#;
        assert!(matches!(parse_gate(text), Err(SpinError::NotUnitary { .. })));
        let near = r#"{"j": "1/2", "matrix": [[[1,0],[0,0]], [[0,0],[1.000000001,0]]]}"#;
        assert!(parse_gate(near).is_ok());
    }
}
