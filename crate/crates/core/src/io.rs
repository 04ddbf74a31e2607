//! Plain-text matrix formats: CSV (one row per line) and JSON
//! (`{rows, cols, entries}` in row-major order).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Writes one row per line, comma separated. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn matrix_to_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for j in 0..m.rows() {
        for k in 0..m.cols() {
            if k > 0 {
                out.push(',');
            }
            write!(out, "{}", m.get(j, k)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parses CSV matrices. Blank lines and lines starting with `#` are skipped.
pub fn matrix_from_csv(text: &str) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .enumerate()
            .map(|(col, cell)| {
                cell.trim().parse::<f64>().map_err(|e| Error::Parse {
                    location: format!("line {}, column {}", lineno + 1, col + 1),
                    message: format!("{e}: {:?}", cell.trim()),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    location: format!("line {}", lineno + 1),
                    message: format!("expected {} columns, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            location: "input".into(),
            message: "no matrix rows".into(),
        });
    }
    Matrix::from_rows(&rows)
}

pub fn matrix_to_json(m: &Matrix) -> String {
    serde_json::to_string(m).expect("matrix serialization is infallible")
}

pub fn matrix_from_json(text: &str) -> Result<Matrix> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_with_comments_and_whitespace() {
        let m = matrix_from_csv("# generator\n 1, -0.5\n\n0 ,1e-3\n").unwrap();
        assert_eq!(m.get(0, 1), -0.5);
        assert_eq!(m.get(1, 1), 1e-3);
    }

    #[test]
    fn ragged_and_garbage_rows_fail_with_location() {
        match matrix_from_csv("1,2\n3\n") {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "line 2"),
            other => panic!("{other:?}"),
        }
        match matrix_from_csv("1,x\n") {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "line 1, column 2"),
            other => panic!("{other:?}"),
        }
        assert!(matrix_from_csv("nan\n").is_err());
    }

    #[test]
    fn json_shape_is_row_major() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(matrix_to_json(&m), r#"{"rows":2,"cols":2,"entries":[1.0,2.0,3.0,4.0]}"#);
        assert!(matrix_from_json(r#"{"rows":2,"cols":2,"entries":[1.0]}"#).is_err());
    }

    proptest! {
        #[test]
        fn csv_and_json_round_trip_bit_exact(
            rows in 1usize..5,
            cols in 1usize..5,
            seed in proptest::collection::vec(-1e6f64..1e6, 25),
        ) {
            let m = Matrix::from_fn(rows, cols, |j, k| seed[j * 5 + k] / 3.0).unwrap();
            let back = matrix_from_csv(&matrix_to_csv(&m)).unwrap();
            prop_assert_eq!(back.to_row_major(), m.to_row_major());
            let back = matrix_from_json(&matrix_to_json(&m)).unwrap();
            prop_assert_eq!(back.to_row_major(), m.to_row_major());
        }
    }
}
