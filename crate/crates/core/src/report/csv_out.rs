use std::path::Path;

use crate::{Error, Result};

/// A CSV table: fixed header and rows of already formatted fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

pub const ENTROPY_HEADER: [&str; 7] = ["system", "scale", "n", "kind", "cardinality", "exact", "bound_gap"];
pub const EXPANSIVITY_HEADER: [&str; 5] = ["scale", "all_gamma_singleton", "trivial", "generator_pass", "horizon"];
pub const ENTPOINTS_HEADER: [&str; 5] = ["point", "scale", "rate", "exact", "is_entropy_point"];
pub const VALIDATE_HEADER: [&str; 3] = ["axiom", "pass", "counterexample"];
pub const SHADOW_HEADER: [&str; 3] = ["word", "point", "label"];

/// `x` with 12 significant digits, trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).clamp(0, 40) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.') } else { &s };
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// Writes `table` to `path`. An empty table is an error and creates no file.
pub fn emit_csv(table: &Table, path: &Path) -> Result<()> {
    if table.is_empty() {
        return Err(Error::Precondition(format!("refusing to write an empty table to {}", path.display())));
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(&table.header).map_err(|e| csv_err(path, e))?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Io { path: path.display().to_string(), source: std::io::Error::other(format!("{other:?}")) },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(std::f64::consts::LN_2), "0.69314718056");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1.5), "1.5");
        assert_eq!(fmt_num(123456.789), "123456.789");
        assert_eq!(fmt_num(-2.0), "-2");
        assert_eq!(fmt_num(1e-7), "0.0000001");
    }

    #[test]
    fn empty_table_creates_no_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        assert!(emit_csv(&Table::new(&ENTROPY_HEADER), &path).is_err());
        assert!(!path.exists());
    }

    #[test]
    fn io_errors_carry_the_path() {
        let mut t = Table::new(&["a"]);
        t.push(vec!["1".into()]);
        let err = emit_csv(&t, Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
