use memread_core::optimize::{compare, Comparison, Free, Optimum, Scheme};
use serde::Serialize;
use serde_json::json;

use crate::args::{check_loss, Format, OptimizeArgs};
use crate::output::{csv_text, json_text, num, round12, Rendered};
use crate::CliResult;

pub fn default_frees(scheme: Scheme) -> Vec<Free> {
    match scheme {
        Scheme::Single => vec![Free::KappaSq],
        Scheme::Double => vec![],
        Scheme::Uniform => vec![Free::R],
        Scheme::Selective => vec![Free::KappaSq, Free::Variance],
    }
}

#[derive(Serialize)]
struct Row {
    source: &'static str,
    kappa_sq: f64,
    kappa2_sq: Option<f64>,
    gain: f64,
    #[serde(rename = "squeeze_V")]
    squeeze_v: Option<f64>,
    squeeze_r: Option<f64>,
    nbar: f64,
    fidelity: f64,
    branch: &'static str,
    max_discrepancy: f64,
}

fn row(source: &'static str, o: &Optimum, discrepancy: f64) -> Row {
    Row {
        source,
        kappa_sq: round12(o.kappa_sq),
        kappa2_sq: o.kappa2_sq.map(round12),
        gain: round12(o.amp_gain),
        squeeze_v: o.squeeze_v.map(round12),
        squeeze_r: o.squeeze_r.map(round12),
        nbar: round12(o.nbar),
        fidelity: round12(o.fidelity),
        branch: o.branch.name(),
        max_discrepancy: round12(discrepancy),
    }
}

pub fn render(scheme: Scheme, loss: f64, c: &Comparison, format: Format) -> CliResult<Rendered> {
    let rows = [row("numeric", &c.numeric, c.max_discrepancy), row("closed", &c.closed, c.max_discrepancy)];
    let text = match format {
        Format::Csv => csv_text(&rows)?,
        Format::Json => json_text(&json!({
            "scheme": scheme.name(),
            "loss": num(loss),
            "numeric": rows[0],
            "closed": rows[1],
            "max_discrepancy": num(c.max_discrepancy),
        })),
    };
    Ok(Rendered { text, format, stem: format!("optimize-{}", scheme.name()), breach: None })
}

pub fn cmd_optimize(a: &OptimizeArgs) -> CliResult<Rendered> {
    check_loss(a.loss)?;
    let frees = if a.frees.is_empty() { default_frees(a.scheme) } else { a.frees.clone() };
    let c = compare(a.scheme, a.loss, &frees)?;
    render(a.scheme, a.loss, &c, a.output.format.unwrap_or(Format::Csv))
}
