use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use nalgebra::{Dim, Matrix, RawStorage};
use serde_json::Value;

use crate::args::{Format, OutputArgs};
use crate::CliResult;

/// A command's document plus an optional threshold breach to report after writing.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub text: String,
    pub format: Format,
    /// stem of the default file name
    pub stem: String,
    pub breach: Option<String>,
}

/// Rounds to 12 significant digits; `-0` becomes `0`.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Shortest text of the 12-digit value, in exponent form outside `[1e-4, 1e15)`.
pub fn fmt_num(x: f64) -> String {
    let r = round12(x);
    if r != 0.0 && r.is_finite() && !(1e-4..1e15).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        r.to_string()
    }
}

pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

/// Row-major nested array.
pub fn matrix<R: Dim, C: Dim, S: RawStorage<f64, R, C>>(m: &Matrix<f64, R, C, S>) -> Value {
    Value::Array((0..m.nrows()).map(|r| Value::Array((0..m.ncols()).map(|c| num(m[(r, c)])).collect())).collect())
}

pub fn vector(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// CSV with the header taken from the row's field order; numbers use [`fmt_num`].
pub fn csv_text<T: serde::Serialize>(rows: &[T]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (i, row) in rows.iter().enumerate() {
        let Value::Object(fields) = serde_json::to_value(row)? else {
            anyhow::bail!("csv rows must be records");
        };
        if i == 0 {
            w.write_record(fields.keys())?;
        }
        w.write_record(fields.values().map(cell))?;
    }
    Ok(String::from_utf8(w.into_inner().context("flushing csv")?)?)
}

pub fn cell(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.to_string(),
            None => fmt_num(n.as_f64().unwrap_or(f64::NAN)),
        },
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn target(rendered: &Rendered, dest: &OutputArgs, command: &str) -> Option<PathBuf> {
    match (&dest.out, &dest.out_dir) {
        (Some(p), _) if p.as_os_str() == "-" => None,
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => {
            let stem = if rendered.stem.is_empty() { command } else { &rendered.stem };
            Some(dir.join(format!("{stem}.{}", rendered.format.extension())))
        }
        (None, None) => None,
    }
}

pub fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Writes to --out, else a default name under the output directory, else stdout.
pub fn deliver(rendered: &Rendered, dest: &OutputArgs, command: &str) -> CliResult<()> {
    match target(rendered, dest, command) {
        Some(path) => write_file(&path, &rendered.text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(rendered.text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(0.75), "0.75");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(2f64.sqrt()), "1.41421356237");
        assert_eq!(fmt_num(1e-20 / 3.0), "3.33333333333e-21");
        assert_eq!(fmt_num(-2.5e-5), "-2.5e-5");
        assert_eq!(fmt_num(16000.0), "16000");
    }

    #[test]
    fn default_target() {
        let r = Rendered { text: String::new(), format: Format::Csv, stem: "curve-single".into(), breach: None };
        let dest = OutputArgs { format: None, out: None, out_dir: Some("/tmp/x".into()) };
        assert_eq!(target(&r, &dest, "c"), Some(PathBuf::from("/tmp/x/curve-single.csv")));
        let dest = OutputArgs { out: Some("-".into()), ..dest };
        assert_eq!(target(&r, &dest, "c"), None);
    }
}
