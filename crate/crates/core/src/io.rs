//! Plain CSV output shared by every exporter.

use std::io::Write;

use crate::error::Result;

/// Unit line written at the top of every table.
pub const UNITS_NOTE: &str =
    "units: hbar = m* = omega = 1; lengths in sigma, times in 1/omega, energies in hbar*omega";

/// An in-memory table written as `#`-commented preamble, header row, data rows.
#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    comments: Vec<String>,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            comments: vec![UNITS_NOTE.to_string()],
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(mut self, line: impl Into<String>) -> Self {
        self.comments.push(line.into());
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row.into_iter().map(format_value).collect());
    }

    /// Row whose first cell is a label.
    pub fn push_labelled(&mut self, label: &str, row: Vec<f64>) {
        debug_assert_eq!(row.len() + 1, self.headers.len());
        let mut cells = vec![label.to_string()];
        cells.extend(row.into_iter().map(format_value));
        self.rows.push(cells);
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    /// Numeric value of `column` in every row.
    pub fn column(&self, column: &str) -> Option<Vec<f64>> {
        let idx = self.headers.iter().position(|h| h == column)?;
        self.rows.iter().map(|r| r[idx].parse().ok()).collect()
    }

    /// Copy restricted to `columns`, in the given order.
    pub fn select(&self, columns: &[&str]) -> Option<CsvTable> {
        let idx: Option<Vec<usize>> = columns
            .iter()
            .map(|c| self.headers.iter().position(|h| h == c))
            .collect();
        let idx = idx?;
        Some(CsvTable {
            comments: self.comments.clone(),
            headers: idx.iter().map(|&i| self.headers[i].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| idx.iter().map(|&i| r[i].clone()).collect())
                .collect(),
        })
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for c in &self.comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "{}", self.headers.join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", row.join(","))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_string_lossy(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Shortest round-trip representation, exponent form for extreme magnitudes.
fn format_value(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let mut t = CsvTable::new(&["a", "b"]).comment("extra");
        t.push(vec![1.0, 0.25]);
        t.push(vec![6e-17, -2.5e20]);
        let s = t.to_string_lossy();
        assert_eq!(
            s,
            format!("# {UNITS_NOTE}\n# extra\na,b\n1.0,0.25\n6e-17,-2.5e20\n")
        );
        assert_eq!(t.column("b"), Some(vec![0.25, -2.5e20]));
        let only_b = t.select(&["b"]).unwrap();
        assert_eq!(only_b.headers(), ["b"]);
        assert_eq!(only_b.rows()[0], ["0.25"]);
        assert!(t.select(&["c"]).is_none());
    }
}
