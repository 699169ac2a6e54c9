use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use evolute::scalar::{format_f64, parse_exact, parse_f64};
use evolute::{Exact, Scalar};
use serde::Serialize;
use serde_json::{json, Value};

use crate::Arith;

impl Arith {
    /// Exact unless `--approx` was given (or the reverse when `exact_default`
    /// is false).
    pub fn is_exact(&self, exact_default: bool) -> bool {
        if self.exact {
            true
        } else if self.approx {
            false
        } else {
            exact_default
        }
    }

    pub fn name(&self, exact_default: bool) -> &'static str {
        if self.is_exact(exact_default) {
            "exact"
        } else {
            "approx"
        }
    }
}

/// Scalars the CLI can parse and print.
pub trait CliScalar: Scalar {
    fn parse(text: &str) -> Result<Self>;
    fn to_json(&self) -> Value;
}

impl CliScalar for f64 {
    fn parse(text: &str) -> Result<Self> {
        Ok(parse_f64(text)?)
    }

    fn to_json(&self) -> Value {
        if self.is_finite() {
            json!(self)
        } else {
            Value::String(format_f64(*self))
        }
    }
}

impl CliScalar for Exact {
    fn parse(text: &str) -> Result<Self> {
        Ok(parse_exact(text)?)
    }

    fn to_json(&self) -> Value {
        Value::String(self.render())
    }
}

/// A writer for `path`, where `-` means standard output.
pub fn create(path: &Path) -> Result<Box<dyn Write>> {
    if path == Path::new("-") {
        Ok(Box::new(io::stdout().lock()))
    } else {
        let file =
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        Ok(Box::new(BufWriter::new(file)))
    }
}

/// Writes `{"config": ..., "result": ...}` if a JSON path was requested.
pub fn write_json(path: &Option<PathBuf>, config: &impl Serialize, result: Value) -> Result<()> {
    let Some(path) = path else {
        return Ok(());
    };
    let doc = json!({ "config": config, "result": result });
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

/// Prints human-readable text unless the JSON report goes to standard
/// output.
pub fn say(json: &Option<PathBuf>, text: &str) {
    if json.as_deref() != Some(Path::new("-")) {
        println!("{text}");
    }
}
