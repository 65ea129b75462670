use memread_core::optimize::{classical_benchmark, closed_form, Scheme};
use serde::Serialize;

use crate::args::Format;
use crate::output::{csv_text, json_text, round12, Rendered};
use crate::{CliResult, Failure};

/// Loss sweep of one scheme's optimal fidelity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub scheme: Scheme,
    pub a_min: f64,
    pub a_max: f64,
    pub steps: usize,
    pub format: Format,
}

impl SweepConfig {
    pub fn validate(&self) -> CliResult<()> {
        if !matches!(self.scheme, Scheme::Single | Scheme::Double | Scheme::Selective) {
            return Err(Failure::Validation(format!(
                "fidelity-curve supports single, double and single-squeezed, not {}",
                self.scheme
            )));
        }
        if !(0.0 <= self.a_min && self.a_min < self.a_max && self.a_max <= 0.999) {
            return Err(Failure::Validation(format!(
                "need 0 <= a_min < a_max <= 0.999, got [{}, {}]",
                self.a_min, self.a_max
            )));
        }
        if self.steps < 2 {
            return Err(Failure::Validation(format!("steps must be at least 2, got {}", self.steps)));
        }
        Ok(())
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let span = self.a_max - self.a_min;
        let last = (self.steps - 1) as f64;
        (0..self.steps).map(move |k| if k + 1 == self.steps { self.a_max } else { self.a_min + span * k as f64 / last })
    }
}

/// One row of the curve; the header is fixed by the field names.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "A")]
    pub a: f64,
    pub kappa_sq: f64,
    pub gain: f64,
    #[serde(rename = "squeeze_V")]
    pub squeeze_v: Option<f64>,
    pub nbar: f64,
    pub fidelity: f64,
    pub classical_bound: f64,
}

pub const HEADER: &str = "A,kappa_sq,gain,squeeze_V,nbar,fidelity,classical_bound";

pub fn sweep_rows(cfg: &SweepConfig) -> CliResult<Vec<SweepRow>> {
    cfg.validate()?;
    cfg.grid()
        .map(|a| {
            let o = closed_form(cfg.scheme, a)?;
            Ok(SweepRow {
                a: round12(a),
                kappa_sq: round12(o.kappa_sq),
                gain: round12(o.amp_gain),
                squeeze_v: o.squeeze_v.map(round12),
                nbar: round12(o.nbar),
                fidelity: round12(o.fidelity),
                classical_bound: classical_benchmark(),
            })
        })
        .collect()
}

pub fn fidelity_curve(cfg: &SweepConfig) -> CliResult<Rendered> {
    let rows = sweep_rows(cfg)?;
    let text = match cfg.format {
        Format::Csv => csv_text(&rows)?,
        Format::Json => json_text(&serde_json::json!({ "scheme": cfg.scheme.name(), "rows": rows })),
    };
    Ok(Rendered { text, format: cfg.format, stem: format!("fidelity-{}", cfg.scheme.name()), breach: None })
}
