//! Deterministic result tables with provenance, CSV/JSON export.

use crate::error::Error;
use crate::Result;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    #[serde(default)]
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Column { name: name.into(), unit: unit.into() }
    }
}

/// A single cell. Floats are exported in shortest-roundtrip form so equal
/// values always serialize to identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Float(f) => Some(*f),
            Value::Text(_) => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    fn csv_cell(&self) -> String {
        match self {
            Value::Int(i) => format!("{i}"),
            Value::Float(f) => format!("{f}"),
            Value::Text(s) => {
                if s.contains(',') || s.contains('"') || s.contains('\n') {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub schema: Vec<Column>,
    pub rows: Vec<Vec<Value>>,
    pub provenance: Provenance,
}

impl ResultTable {
    pub fn new(schema: Vec<Column>, provenance: Provenance) -> Self {
        ResultTable { schema, rows: Vec::new(), provenance }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.schema.len(), "row width vs schema");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|c| c.name == name)
    }

    /// Numeric column as a vector (non-numeric cells skipped).
    pub fn numeric_column(&self, name: &str) -> Vec<f64> {
        match self.column_index(name) {
            None => Vec::new(),
            Some(idx) => self.rows.iter().filter_map(|r| r[idx].as_f64()).collect(),
        }
    }

    /// CSV: '.' decimals, '\n' line ends, header row; bit-stable for a
    /// fixed config hash and seed.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self
            .schema
            .iter()
            .map(|c| {
                if c.unit.is_empty() {
                    c.name.clone()
                } else {
                    format!("{} [{}]", c.name, c.unit)
                }
            })
            .collect();
        out.push_str(&format!("# config_hash={} seed={} version={}\n",
            self.provenance.config_hash, self.provenance.seed, self.provenance.version));
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.csv_cell()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad table JSON: {e}")))
    }
}

/// FNV-1a 64-bit hash, hex encoded: stable configuration fingerprint.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}

/// Least-squares slope and R² of (x, y) points.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_table() -> ResultTable {
        let mut t = ResultTable::new(
            vec![Column::new("n", ""), Column::new("energy", "a.u."), Column::new("note", "")],
            Provenance { config_hash: "abc".into(), seed: 7, version: "0.1.0".into() },
        );
        t.push(vec![Value::Int(4), Value::Float(0.75), Value::Text("ok".into())]);
        t.push(vec![Value::Int(8), Value::Float(-1.25e-3), Value::Text("with, comma".into())]);
        t
    }

    #[test]
    fn csv_shape_and_quoting() {
        let t = sample_table();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("# config_hash=abc seed=7"));
        assert_eq!(lines[1], "n,energy [a.u.],note");
        assert_eq!(lines[2], "4,0.75,ok");
        assert_eq!(lines[3], "8,-0.00125,\"with, comma\"");
        // empty table: header only
        let empty = ResultTable::new(vec![Column::new("x", "")], t.provenance.clone());
        assert_eq!(empty.to_csv().lines().count(), 2);
    }

    #[test]
    fn json_roundtrip_is_lossless() {
        let t = sample_table();
        let back = ResultTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn exports_are_byte_stable() {
        let a = sample_table();
        let b = sample_table();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn fnv_is_stable() {
        assert_eq!(fnv1a_hex(b""), "cbf29ce484222325");
        assert_eq!(fnv1a_hex(b"a"), fnv1a_hex(b"a"));
        assert_ne!(fnv1a_hex(b"a"), fnv1a_hex(b"b"));
    }

    #[test]
    fn linear_fit_recovers_a_line() {
        let pts: Vec<(f64, f64)> = (1..10).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        let (slope, r2) = linear_fit(&pts);
        assert!((slope + 2.0).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }
}
