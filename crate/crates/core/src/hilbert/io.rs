//! Text format for matrices:
//!
//! ```text
//! mat 2 2
//! 0.5,0 0,0
//! 0,0 0.5,0
//! ```
//!
//! A `mat <rows> <cols>` header is followed by `rows·cols` row-major `re,im`
//! pairs separated by any whitespace. A file may hold several matrices; `#`
//! starts a comment.

use num_complex::Complex64;

use super::{ComplexMatrix, HilbertError};

/// Parses a `re,im` token.
pub fn parse_complex(token: &str) -> Option<Complex64> {
    let (re, im) = token.split_once(',')?;
    Some(Complex64::new(
        re.trim().parse().ok()?,
        im.trim().parse().ok()?,
    ))
}

pub fn format_complex(z: Complex64) -> String {
    format!("{},{}", z.re, z.im)
}

pub fn parse_matrices(text: &str) -> Result<Vec<ComplexMatrix>, HilbertError> {
    struct Pending {
        rows: usize,
        cols: usize,
        header_line: usize,
        entries: Vec<Complex64>,
    }
    let err = |line: usize, message: String| HilbertError::Parse { line, message };

    let mut out = Vec::new();
    let mut pending: Option<Pending> = None;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace().peekable();
        if toks.peek() == Some(&"mat") {
            if let Some(p) = &pending {
                return Err(err(
                    line,
                    format!(
                        "matrix started at line {} has {} of {} entries",
                        p.header_line,
                        p.entries.len(),
                        p.rows * p.cols
                    ),
                ));
            }
            toks.next();
            let mut dim = || toks.next().and_then(|t| t.parse::<usize>().ok());
            match (dim(), dim()) {
                (Some(rows), Some(cols)) if rows > 0 && cols > 0 => {
                    pending = Some(Pending {
                        rows,
                        cols,
                        header_line: line,
                        entries: Vec::with_capacity(rows * cols),
                    })
                }
                _ => return Err(err(line, "expected `mat <rows> <cols>`".into())),
            }
        }
        for tok in toks {
            let Some(p) = pending.as_mut() else {
                return Err(err(line, format!("entry `{tok}` before any `mat` header")));
            };
            if p.entries.len() == p.rows * p.cols {
                return Err(err(line, "too many entries for the declared shape".into()));
            }
            let z = parse_complex(tok)
                .ok_or_else(|| err(line, format!("invalid complex entry `{tok}`")))?;
            p.entries.push(z);
        }
        if let Some(p) = &pending {
            if p.entries.len() == p.rows * p.cols {
                let p = pending.take().expect("pending matrix");
                out.push(ComplexMatrix::new(p.rows, p.cols, p.entries)?);
            }
        }
    }
    if let Some(p) = pending {
        return Err(err(
            p.header_line,
            format!(
                "matrix has {} of {} entries",
                p.entries.len(),
                p.rows * p.cols
            ),
        ));
    }
    Ok(out)
}

pub fn format_matrix(m: &ComplexMatrix) -> String {
    let mut out = format!("mat {} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format_complex(m.get(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_several_matrices() {
        let text = "# two projectors\nmat 2 2\n1,0 0,0\n0,0 0,0\nmat 2 2 1,0 0,0 0,0 0,0\n";
        let ms = parse_matrices(text).unwrap();
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0], ms[1]);
        assert_eq!(ms[0].get(0, 0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_matrices("1,0\n").is_err());
        assert!(parse_matrices("mat 2\n").is_err());
        assert!(parse_matrices("mat 1 1\n1;0\n").is_err());
        assert!(parse_matrices("mat 1 2\n1,0\n").is_err());
        assert!(parse_matrices("mat 1 1\n1,0 2,0\n").is_err());
        assert!(parse_matrices("mat 2 1\n1,0\nmat 1 1\n1,0\n").is_err());
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(rows in 1usize..5, cols in 1usize..5,
                                   vals in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 16)) {
            let m = ComplexMatrix::from_fn(rows, cols, |i, j| {
                let (re, im) = vals[i * 4 + j];
                Complex64::new(re, im)
            });
            let back = parse_matrices(&format_matrix(&m)).unwrap();
            prop_assert_eq!(back, vec![m]);
        }
    }
}
