//! Deterministic report emission. One file per report kind, fixed column
//! order, floats printed with 17 significant digits so a parse reproduces
//! every bit. No timestamps, no environment echoes: the same run produces
//! the same bytes.

use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    Int(i64),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(v) => fmt_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Text(s) => json_string(s),
            Cell::Num(v) => {
                if v.is_finite() {
                    fmt_f64(*v)
                } else {
                    // JSON has no non-finite literals
                    json_string(&fmt_f64(*v))
                }
            }
            Cell::Int(v) => v.to_string(),
            Cell::Flag(b) => b.to_string(),
        }
    }
}

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// One report kind: a named table with a fixed column order.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: Vec<&'static str>) -> Self {
        Self {
            name,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "table {}", self.name);
        self.rows.push(row);
    }

    /// AND of the `pass` column; tables without one are informational.
    pub fn all_pass(&self) -> bool {
        match self.columns.iter().position(|c| *c == "pass") {
            None => true,
            Some(i) => self
                .rows
                .iter()
                .all(|r| matches!(r[i], Cell::Flag(true))),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("[\n");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str("  {");
            for (j, (col, cell)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                out.push_str(&json_string(col));
                out.push_str(": ");
                out.push_str(&cell.json());
            }
            out.push('}');
            if i + 1 < self.rows.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("]\n");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Writes every table in every requested format under `dir`; returns the
/// created paths in emission order.
pub fn emit_reports(
    tables: &[Table],
    dir: &Path,
    formats: &[Format],
) -> Result<Vec<PathBuf>, CliError> {
    if tables.is_empty() {
        return Err(CliError::NoReports);
    }
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for table in tables {
        for &fmt in formats {
            let path = dir.join(format!("{}.{}", table.name, fmt.ext()));
            let body = match fmt {
                Format::Csv => table.to_csv(),
                Format::Json => table.to_json(),
            };
            std::fs::write(&path, body)?;
            paths.push(path);
        }
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips_bit_exactly() {
        let probes = [
            0.1,
            1.0 / 3.0,
            2.0f64.sqrt(),
            1e-300,
            -4.9e-324,
            0.0,
            f64::MAX,
            6.02214076e23,
        ];
        for v in probes {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "{v} via {s}");
        }
    }

    #[test]
    fn pass_column_controls_the_verdict() {
        let mut t = Table::new("x", vec!["v", "pass"]);
        t.push(vec![Cell::Num(1.0), Cell::Flag(true)]);
        assert!(t.all_pass());
        t.push(vec![Cell::Num(2.0), Cell::Flag(false)]);
        assert!(!t.all_pass());

        let mut info = Table::new("y", vec!["v"]);
        info.push(vec![Cell::Num(1.0)]);
        assert!(info.all_pass());
    }

    #[test]
    fn emission_is_deterministic_and_refuses_empty_sets() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("probe", vec!["name", "value", "ok"]);
        t.push(vec![
            Cell::Text("a".into()),
            Cell::Num(1.0 / 7.0),
            Cell::Flag(true),
        ]);
        let p1 = emit_reports(&[t.clone()], dir.path(), &[Format::Csv, Format::Json]).unwrap();
        let first: Vec<Vec<u8>> = p1.iter().map(|p| std::fs::read(p).unwrap()).collect();
        let p2 = emit_reports(&[t], dir.path(), &[Format::Csv, Format::Json]).unwrap();
        let second: Vec<Vec<u8>> = p2.iter().map(|p| std::fs::read(p).unwrap()).collect();
        assert_eq!(first, second);

        assert!(matches!(
            emit_reports(&[], dir.path(), &[Format::Csv]),
            Err(CliError::NoReports)
        ));
    }
}
