//! JSON and CSV rendering. Both carry the resolved configuration so a file
//! alone is enough to reproduce it.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::{Failure, Format};

pub struct Document {
    pub command: &'static str,
    pub config: Map<String, Value>,
    pub body: Map<String, Value>,
    /// CSV column names and rows.
    pub columns: [&'static str; 3],
    pub rows: Vec<[String; 3]>,
}

impl Document {
    pub fn new(command: &'static str, columns: [&'static str; 3]) -> Self {
        Self {
            command,
            config: Map::new(),
            body: Map::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.config.insert(key.to_string(), value.into());
    }

    fn to_json(&self) -> String {
        let mut top = Map::new();
        top.insert(
            "tool".into(),
            format!("bdlab {}", env!("CARGO_PKG_VERSION")).into(),
        );
        top.insert("command".into(), self.command.into());
        top.insert("config".into(), Value::Object(self.config.clone()));
        for (k, v) in &self.body {
            top.insert(k.clone(), v.clone());
        }
        let mut s =
            serde_json::to_string_pretty(&Value::Object(top)).expect("JSON values serialise");
        s.push('\n');
        s
    }

    fn to_csv(&self) -> String {
        let mut s = format!(
            "# tool: bdlab {}\n# command: {}\n",
            env!("CARGO_PKG_VERSION"),
            self.command
        );
        for (k, v) in &self.config {
            s.push_str(&format!("# config.{k}: {}\n", scalar_text(v)));
        }
        flatten_scalars("", &Value::Object(self.body.clone()), &mut s);
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Summary scalars go to `#` header lines; arrays are left to the rows.
fn flatten_scalars(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_scalars(&key, v, out);
            }
        }
        Value::Array(_) => {}
        other => out.push_str(&format!("# {prefix}: {}\n", scalar_text(other))),
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::io(Path::new("<stdout>"), e))
        }
    }
}

/// Two-column `x count` files for gnuplot, one per histogram.
pub fn write_gnuplot(dir: &Path, name: &str, points: &[(String, u64)]) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    let path = dir.join(format!("{name}.dat"));
    let mut text = format!("# {name}: bin count\n");
    for (x, c) in points {
        text.push_str(&format!("{x} {c}\n"));
    }
    std::fs::write(&path, text).map_err(|e| Failure::io(&path, e))?;
    Ok(path)
}
