//! Rendering of results: CSV tables with a commented header, or JSON
//! documents, each carrying the run metadata.

use std::io::{self, Write};
use std::path::PathBuf;

use cvd_core::table::Table;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }

    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub command: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
}

/// One named result: a table for CSV, scalars for its header, and the full
/// structured value for JSON.
#[derive(Debug, Clone)]
pub struct Output {
    pub name: String,
    pub table: Table,
    pub scalars: Vec<(String, String)>,
    pub data: Value,
}

impl Output {
    pub fn new<T: Serialize>(name: &str, table: Table, data: &T) -> Self {
        Output {
            name: name.to_string(),
            table,
            scalars: Vec::new(),
            data: serde_json::to_value(data).expect("serializable result"),
        }
    }

    pub fn scalar(mut self, key: &str, value: impl ToString) -> Self {
        self.scalars.push((key.to_string(), value.to_string()));
        self
    }
}

pub struct Emitter {
    pub out_dir: Option<PathBuf>,
    pub format: Format,
    pub meta: Meta,
}

/// Numbers and booleans keep their JSON type; anything else stays a string.
fn scalar_value(v: &str) -> Value {
    serde_json::from_str::<Value>(v)
        .ok()
        .filter(|x| x.is_number() || x.is_boolean())
        .unwrap_or_else(|| Value::String(v.to_string()))
}

impl Emitter {
    pub fn render(&self, out: &Output) -> io::Result<Vec<u8>> {
        match self.format {
            Format::Csv => {
                let mut buf = Vec::new();
                writeln!(buf, "# cvd {}", self.meta.version)?;
                writeln!(buf, "# command: {}", self.meta.command)?;
                writeln!(buf, "# config_sha256: {}", self.meta.config_sha256)?;
                writeln!(buf, "# seed: {}", self.meta.seed)?;
                for (k, v) in &out.scalars {
                    writeln!(buf, "# {k}: {v}")?;
                }
                let mut w = csv::Writer::from_writer(&mut buf);
                w.write_record(&out.table.columns)?;
                for row in &out.table.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
                drop(w);
                Ok(buf)
            }
            Format::Json => {
                let scalars: serde_json::Map<String, Value> =
                    out.scalars.iter().map(|(k, v)| (k.clone(), scalar_value(v))).collect();
                let doc = json!({ "meta": self.meta, "name": out.name, "scalars": scalars, "data": out.data });
                let mut buf = serde_json::to_vec_pretty(&doc).map_err(io::Error::other)?;
                buf.push(b'\n');
                Ok(buf)
            }
        }
    }

    /// Writes each output to `<out_dir>/<name>.<ext>`, or to stdout one after
    /// another when no directory is set.
    pub fn emit(&self, outputs: &[Output]) -> io::Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        match &self.out_dir {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                for o in outputs {
                    let path = dir.join(format!("{}.{}", o.name, self.format.extension()));
                    std::fs::write(&path, self.render(o)?)?;
                    written.push(path);
                }
            }
            None => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                for (i, o) in outputs.iter().enumerate() {
                    if i > 0 {
                        writeln!(lock)?;
                    }
                    lock.write_all(&self.render(o)?)?;
                }
            }
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn emitter(format: Format) -> Emitter {
        Emitter {
            out_dir: None,
            format,
            meta: Meta {
                command: "analytic".into(),
                version: "0.1.0".into(),
                config_sha256: "ab".into(),
                seed: 7,
            },
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let mut t = Table::new(["j", "p_j"]);
        t.push(vec!["0".into(), "0.5625".into()]);
        let out = Output::new("t", t, &json!({})).scalar("slope", 2.0);
        let text = String::from_utf8(emitter(Format::Csv).render(&out).unwrap()).unwrap();
        assert_eq!(
            text,
            "# cvd 0.1.0\n# command: analytic\n# config_sha256: ab\n# seed: 7\n# slope: 2\nj,p_j\n0,0.5625\n"
        );
    }

    #[test]
    fn json_carries_meta() {
        let out = Output::new("t", Table::new(["x"]), &json!({"a": 1}));
        let v: Value = serde_json::from_slice(&emitter(Format::Json).render(&out).unwrap()).unwrap();
        assert_eq!(v["meta"]["seed"], 7);
        assert_eq!(v["data"]["a"], 1);
    }
}
