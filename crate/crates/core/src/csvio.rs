//! Minimal numeric CSV: `#` comment lines, one exact header line, then
//! comma-separated rows with LF endings. Floats are written in Rust's
//! shortest round-trip form.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CsvError {
    #[error("unexpected header {found:?}, expected {expected:?}")]
    Schema { expected: String, found: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Parsed table body.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    /// Comment lines preceding the header, without the leading `# `.
    pub comments: Vec<String>,
    /// `(line number, values)` per data row, 1-based line numbers.
    pub rows: Vec<(usize, Vec<f64>)>,
}

pub fn read_table(text: &str, header: &str) -> Result<Table, CsvError> {
    let columns = header.split(',').count();
    let mut table = Table::default();
    let mut header_seen = false;
    for (i, line) in text.split('\n').enumerate() {
        let lineno = i + 1;
        if !header_seen {
            if let Some(c) = line.strip_prefix('#') {
                table
                    .comments
                    .push(c.strip_prefix(' ').unwrap_or(c).to_string());
                continue;
            }
            if line != header {
                return Err(CsvError::Schema {
                    expected: header.to_string(),
                    found: line.to_string(),
                });
            }
            header_seen = true;
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns {
            return Err(CsvError::Parse {
                line: lineno,
                message: format!("expected {columns} fields, found {}", fields.len()),
            });
        }
        let mut values = Vec::with_capacity(columns);
        for f in fields {
            let v: f64 = f.parse().map_err(|_| CsvError::Parse {
                line: lineno,
                message: format!("not a number: {f:?}"),
            })?;
            if !v.is_finite() {
                return Err(CsvError::Parse {
                    line: lineno,
                    message: format!("non-finite value {f:?}"),
                });
            }
            values.push(v);
        }
        table.rows.push((lineno, values));
    }
    if !header_seen {
        return Err(CsvError::Schema {
            expected: header.to_string(),
            found: String::new(),
        });
    }
    Ok(table)
}

/// Builds CSV text from comments, a header and pre-formatted rows.
pub fn write_table<I, R>(comments: &[String], header: &str, rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: AsRef<[String]>,
{
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.as_ref().join(","));
        out.push('\n');
    }
    out
}

/// Shortest string that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        // drop the sign of negative zero
        "0".to_string()
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_header_rows() {
        let text = "# a\n# b\nx,y\n1,2.5\n-3,4e-3\n";
        let t = read_table(text, "x,y").unwrap();
        assert_eq!(t.comments, vec!["a", "b"]);
        assert_eq!(t.rows, vec![(4, vec![1.0, 2.5]), (5, vec![-3.0, 0.004])]);
    }

    #[test]
    fn rejects_wrong_header_and_bad_values() {
        assert!(matches!(
            read_table("x,z\n", "x,y"),
            Err(CsvError::Schema { .. })
        ));
        assert!(matches!(
            read_table("", "x,y"),
            Err(CsvError::Schema { .. })
        ));
        assert_eq!(
            read_table("x,y\n1,2\n1,NaN\n", "x,y").unwrap_err(),
            CsvError::Parse {
                line: 3,
                message: "non-finite value \"NaN\"".into()
            }
        );
        assert!(matches!(
            read_table("x,y\n1\n", "x,y"),
            Err(CsvError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            read_table("x,y\n1,2\r\n", "x,y"),
            Err(CsvError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, f64::MAX, 0.104] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(fmt_f64(-0.0), "0");
    }
}
