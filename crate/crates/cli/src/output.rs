//! Tables, their CSV/JSON rendering and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::CliError;

pub const TOOL: &str = "jwdiscord";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            // 12 significant digits
            Cell::Float(x) => format!("{x:.11e}"),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) => json!(x),
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
    pub seed: u64,
}

impl Header {
    pub fn for_config(cfg: &RunConfig) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            config_sha256: cfg.hash(),
            seed: cfg.seed,
        }
    }
}

pub fn render(table: &Table, header: &Header, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = format!(
                "# {} {}\n# config_sha256 {}\n# seed {}\n",
                header.tool, header.version, header.config_sha256, header.seed
            );
            s.push_str(&table.columns.join(","));
            s.push('\n');
            for row in &table.rows {
                s.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                .collect();
            let doc = json!({ "header": header, "columns": table.columns, "rows": rows });
            let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
            s.push('\n');
            s
        }
    }
}

/// `<output>.meta.json`
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    output.with_file_name(name)
}

pub fn metadata(cfg: &RunConfig, header: &Header, results: Value) -> String {
    let doc = json!({
        "header": header,
        "output": cfg.output.display().to_string(),
        "config": cfg,
        "results": results,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("metadata serializes");
    s.push('\n');
    s
}

fn staged(path: &Path, contents: &str) -> Result<tempfile::NamedTempFile, CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    Ok(tmp)
}

/// Stage every file next to its destination, then rename them into place.
/// Nothing reaches a destination path unless all files were staged.
pub fn write_all_atomic(files: &[(&Path, &str)]) -> Result<(), CliError> {
    let staged = files
        .iter()
        .map(|(p, c)| Ok((*p, staged(p, c)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    for (path, tmp) in staged {
        tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> Header {
        Header {
            tool: TOOL,
            version: VERSION,
            config_sha256: "ab".into(),
            seed: 3,
        }
    }

    #[test]
    fn csv_layout() {
        let t = Table {
            columns: vec!["n", "m", "Q"],
            rows: vec![vec![Cell::Int(1), Cell::Int(2), Cell::Float(0.005073101425517645)]],
        };
        let s = render(&t, &header(), Format::Csv);
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# jwdiscord "));
        assert_eq!(lines[1], "# config_sha256 ab");
        assert_eq!(lines[2], "# seed 3");
        assert_eq!(lines[3], "n,m,Q");
        assert_eq!(lines[4], "1,2,5.07310142552e-3");
    }

    #[test]
    fn floats_round_trip_to_twelve_digits() {
        let x = 0.123_456_789_012_345_68_f64;
        let s = Cell::Float(x).csv();
        let back: f64 = s.parse().unwrap();
        assert!((back - x).abs() / x < 1e-11);
        assert_eq!(Cell::Text("a,b".into()).csv(), "\"a,b\"");
    }

    #[test]
    fn json_layout() {
        let t = Table {
            columns: vec!["b", "cl_max"],
            rows: vec![vec![Cell::Float(0.5), Cell::Text("x".into())]],
        };
        let v: Value = serde_json::from_str(&render(&t, &header(), Format::Json)).unwrap();
        assert_eq!(v["header"]["seed"], 3);
        assert_eq!(v["rows"][0][1], "x");
        assert_eq!(v["rows"][0][0], 0.5);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("out/q.csv")), PathBuf::from("out/q.csv.meta.json"));
    }
}
