//! CSV tables: a header and homogeneous rows, written with LF line endings.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Formats a number with 15 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn flag(b: bool) -> String {
    if b { "pass" } else { "fail" }.to_string()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Base name of the output file, without extension.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// `true` unless a `pass` column holds `fail`.
    pub fn all_pass(&self) -> bool {
        match self.header.iter().position(|h| h == "pass") {
            Some(k) => self.rows.iter().all(|r| r[k] != "fail"),
            None => true,
        }
    }

    pub fn to_bytes(&self) -> CliResult<Vec<u8>> {
        for (i, r) in self.rows.iter().enumerate() {
            if r.len() != self.header.len() {
                return Err(CliError::Ragged {
                    expected: self.header.len(),
                    row: i,
                    got: r.len(),
                });
            }
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| CliError::Io {
            path: "<buffer>".into(),
            source: e.into_error(),
        })
    }
}

/// Writes `table` to `path` as CSV with a header row.
pub fn emit_csv(table: &Table, path: &Path) -> CliResult<()> {
    let bytes = table.to_bytes()?;
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut f = File::create(path).map_err(io)?;
    f.write_all(&bytes).map_err(io)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new("x", &["a", "b"]);
        assert_eq!(t.to_bytes().unwrap(), b"a,b\n");
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let mut t = Table::new("x", &["a", "b"]);
        t.push(vec!["1".into()]);
        assert!(matches!(t.to_bytes(), Err(CliError::Ragged { row: 0, got: 1, .. })));
    }

    #[test]
    fn numbers_carry_fifteen_digits() {
        assert_eq!(num(1.0 / 3.0), "3.33333333333333e-1");
        assert_eq!(num(-2.5), "-2.50000000000000e0");
    }

    #[test]
    fn quoting_follows_rfc_4180() {
        let mut t = Table::new("x", &["label", "v"]);
        t.push(vec!["super_w(n=2,p=1)".into(), "1".into()]);
        assert_eq!(t.to_bytes().unwrap(), b"label,v\n\"super_w(n=2,p=1)\",1\n");
    }
}
