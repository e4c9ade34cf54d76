//! CSV output with a versioned header comment.
//!
//! Every file starts with one `#` line carrying the schema version and source
//! revision; everything after it is the body. Replays compare bodies only.

use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::solver::BackwardSolution;

pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Source revision recorded at build time, or `unknown`.
pub fn git_revision() -> &'static str {
    env!("BDSDE_GIT_REV")
}

pub fn header_comment(table: &str) -> String {
    format!(
        "# bdsde table={table} schema=v{CSV_SCHEMA_VERSION} version={} rev={}\n",
        env!("CARGO_PKG_VERSION"),
        git_revision()
    )
}

/// Formats a float with the shortest representation that round-trips.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// In-memory CSV table, rendered deterministically.
#[derive(Debug, Clone)]
pub struct Table {
    name: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_header(name: impl Into<String>, header: Vec<String>) -> Self {
        Self {
            name: name.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn extend(&mut self, rows: impl IntoIterator<Item = Vec<String>>) {
        for r in rows {
            self.push(r);
        }
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn body(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner()
            .map_err(|e| Error::io("<csv buffer>", e.into_error()))
    }

    /// Writes header comment and body; returns the body's SHA-256 in hex.
    pub fn write(&self, path: &Path) -> Result<String> {
        let body = self.body()?;
        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(header_comment(&self.name).as_bytes())
            .and_then(|_| file.write_all(&body))
            .map_err(|e| Error::io(path, e))?;
        Ok(digest(&body))
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// SHA-256 of a CSV file with its leading comment lines removed.
pub fn body_digest(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut start = 0;
    while bytes[start..].first() == Some(&b'#') {
        match bytes[start..].iter().position(|&b| b == b'\n') {
            Some(i) => start += i + 1,
            None => start = bytes.len(),
        }
    }
    Ok(digest(&bytes[start..]))
}

/// One row per cell per requested slice: `n, cell bounds, occupancy, y values, z values`.
///
/// For `d = 1` the bounds are `cell_lo, cell_hi`; otherwise one column per axis.
pub fn field_table(solution: &BackwardSolution, slices: &[usize]) -> Table {
    let basis = solution.basis();
    let d = basis.dim();
    let (k, zd) = solution.shape();
    let mut header = vec!["n".to_string()];
    if d == 1 {
        header.extend(["cell_lo".to_string(), "cell_hi".to_string()]);
    } else {
        header.extend((0..d).map(|i| format!("cell_lo_{i}")));
        header.extend((0..d).map(|i| format!("cell_hi_{i}")));
    }
    header.push("occupancy".into());
    header.extend((0..k).map(|c| format!("y_{c}")));
    for j1 in 0..k {
        header.extend((0..zd).map(|j2| format!("z_{j1}_{j2}")));
    }
    let mut table = Table::with_header("field", header);
    for &n in slices {
        let y = &solution.y_fields[n];
        let z = &solution.z_fields[n];
        for j in 0..basis.len() {
            let (lo, hi) = basis.cell_bounds(j);
            let mut row = vec![n.to_string()];
            row.extend(lo.iter().map(|&v| fmt_f64(v)));
            row.extend(hi.iter().map(|&v| fmt_f64(v)));
            row.push(y.occupancy()[j].to_string());
            row.extend(y.value_at_cell(j).iter().map(|&v| fmt_f64(v)));
            row.extend(z.value_at_cell(j).iter().map(|&v| fmt_f64(v)));
            table.push(row);
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn body_digest_ignores_comment() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("demo", &["a", "b"]);
        t.push(vec!["1".into(), fmt_f64(0.1)]);
        let path = dir.path().join("t.csv");
        let d = t.write(&path).unwrap();
        assert_eq!(body_digest(&path).unwrap(), d);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# bdsde table=demo schema=v1"));
        assert!(text.ends_with("a,b\n1,0.1\n"));
    }
}
