//! Deterministic dataset emission: CSV with '#' metadata headers, or JSON
//! mirroring the rows plus a metadata object. Numbers are printed with 9
//! significant digits in both formats.

use std::io::Write;

use serde_json::{json, Map, Value as Json};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Str(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => sig9(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Str(s) => s.clone(),
        }
    }

    fn json(&self) -> Json {
        match self {
            // Round-trip through the 9-significant-digit rendering so CSV
            // and JSON carry identical values.
            Cell::Num(x) => {
                let rounded: f64 = sig9(*x).parse().unwrap();
                serde_json::Number::from_f64(rounded)
                    .map(Json::Number)
                    .unwrap_or(Json::Null)
            }
            Cell::Int(n) => json!(n),
            Cell::Str(s) => json!(s),
        }
    }
}

/// 9 significant digits, scientific notation.
pub fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

/// A result dataset: named columns with units and uniform rows.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub units: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>, units: Vec<&'static str>) -> Self {
        assert_eq!(columns.len(), units.len());
        Self {
            columns,
            units,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, command: &str, resolved_config: &str) -> String {
        let hash = {
            let mut h = Sha256::new();
            h.update(resolved_config.as_bytes());
            format!("{:x}", h.finalize())
        };
        match format {
            Format::Csv => {
                let mut out = String::new();
                out.push_str(&format!(
                    "# pnpe {} {command}\n",
                    env!("CARGO_PKG_VERSION")
                ));
                out.push_str(&format!("# config-hash sha256:{hash}\n"));
                out.push_str(&format!("# units: {}\n", self.units.join(",")));
                out.push_str(&format!("# config: {resolved_config}\n"));
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let rows: Vec<Json> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = Map::new();
                        for (name, cell) in self.columns.iter().zip(row) {
                            obj.insert((*name).into(), cell.json());
                        }
                        Json::Object(obj)
                    })
                    .collect();
                let doc = json!({
                    "meta": {
                        "artifact": "pnpe",
                        "version": env!("CARGO_PKG_VERSION"),
                        "command": command,
                        "config_hash": format!("sha256:{hash}"),
                        "config": resolved_config,
                        "units": self.columns.iter().zip(&self.units)
                            .map(|(c, u)| (c.to_string(), json!(u)))
                            .collect::<Map<String, Json>>(),
                    },
                    "rows": rows,
                });
                let mut s = serde_json::to_string_pretty(&doc).unwrap();
                s.push('\n');
                s
            }
        }
    }

    pub fn write(
        &self,
        format: Format,
        command: &str,
        resolved_config: &str,
        out: Option<&std::path::Path>,
    ) -> std::io::Result<()> {
        let rendered = self.render(format, command, resolved_config);
        match out {
            Some(path) => std::fs::write(path, rendered),
            None => std::io::stdout().write_all(rendered.as_bytes()),
        }
    }
}
