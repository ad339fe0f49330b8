//! Output files: commented header block for CSV, `meta` object for JSON.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::ExperimentConfig;

pub const CONVENTIONS: [&str; 5] = [
    "entropies in nats (natural log)",
    "U = exp(-i H t) with hbar = 1",
    "rho = (I + a.sigma)/2, maps act as a' = tau + T a",
    "site 0 is the system and the leftmost tensor factor",
    "CSV: '.' decimal, 17 significant digits",
];

pub fn num(v: f64) -> String {
    if v.is_infinite() && v > 0.0 {
        "inf".into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn header(command: &str, cfg: &ExperimentConfig) -> String {
    let mut out = format!("# qdynmaps {} ({command})\n", qdynmaps::VERSION);
    for c in CONVENTIONS {
        out += &format!("# convention: {c}\n");
    }
    for (k, v) in cfg.echo() {
        out += &format!("# config: {k}={v}\n");
    }
    out
}

pub fn meta(command: &str, cfg: &ExperimentConfig) -> Value {
    let config: Map<String, Value> = cfg.echo().into_iter().map(|(k, v)| (k, Value::String(v))).collect();
    json!({
        "version": qdynmaps::VERSION,
        "command": command,
        "conventions": CONVENTIONS,
        "config": config,
    })
}

/// A file rendered in memory, written only once every output of a command is ready.
pub struct Pending {
    pub name: &'static str,
    pub contents: String,
}

impl Pending {
    pub fn csv(name: &'static str, command: &str, cfg: &ExperimentConfig, columns: &str, rows: &[String]) -> Self {
        let mut contents = header(command, cfg);
        contents += columns;
        contents.push('\n');
        for r in rows {
            contents += r;
            contents.push('\n');
        }
        Self { name, contents }
    }

    pub fn json(name: &'static str, command: &str, cfg: &ExperimentConfig, mut body: Map<String, Value>) -> Self {
        body.insert("meta".into(), meta(command, cfg));
        let mut contents = serde_json::to_string_pretty(&Value::Object(body)).expect("json value serializes");
        contents.push('\n');
        Self { name, contents }
    }
}

pub fn write_all(dir: &Path, files: &[Pending]) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    files
        .iter()
        .map(|f| {
            let path = dir.join(f.name);
            fs::write(&path, &f.contents)?;
            Ok(path)
        })
        .collect()
}
