use memread_core::optimize::Scheme;
use memread_core::oracle::{convergence_report, ConvergenceReport, ConvergenceRow, OracleScheme};
use serde::Serialize;
use serde_json::json;

use crate::args::{Format, OracleArgs};
use crate::output::{csv_text, json_text, num, opt_num, Rendered};
use crate::{CliResult, Failure};

/// Final-deviation limit of the single-cell oracle.
pub const SINGLE_CELL_LIMIT: f64 = 1e-3;
/// Limit on the coupling entries of the two-cell sideband pattern.
pub const TWO_CELL_COUPLING_LIMIT: f64 = 5e-3;

pub fn oracle_scheme(scheme: Scheme, omega_t: f64) -> CliResult<OracleScheme> {
    match scheme {
        Scheme::Single => Ok(OracleScheme::SingleCell),
        Scheme::Double if omega_t > 0.0 && omega_t.is_finite() => Ok(OracleScheme::TwoCell { omega_t }),
        Scheme::Double => Err(Failure::Validation(format!("omega-t = {omega_t} must be positive"))),
        other => Err(Failure::Validation(format!("oracle-check supports single and double, not {other}"))),
    }
}

pub fn default_slices(scheme: OracleScheme) -> Vec<usize> {
    match scheme {
        OracleScheme::SingleCell => vec![100, 1_000, 10_000],
        two => vec![two.default_slices()],
    }
}

/// Breach message, if the report exceeds its documented threshold.
pub fn breach(report: &ConvergenceReport) -> Option<String> {
    let last = report.rows.last()?;
    match report.scheme {
        OracleScheme::SingleCell if last.deviation > SINGLE_CELL_LIMIT => Some(format!(
            "single-cell deviation {:.3e} at N = {} exceeds {SINGLE_CELL_LIMIT:e}",
            last.deviation, last.slices
        )),
        OracleScheme::TwoCell { .. } if last.coupling_deviation > TWO_CELL_COUPLING_LIMIT => Some(format!(
            "two-cell coupling deviation {:.3e} at N = {} exceeds {TWO_CELL_COUPLING_LIMIT:e}",
            last.coupling_deviation, last.slices
        )),
        _ => None,
    }
}

#[derive(Serialize)]
struct Row {
    slices: usize,
    deviation: f64,
    coupling_deviation: f64,
    crosstalk: f64,
    leakage_out: f64,
    leakage_in: f64,
    symplectic_deviation: f64,
}

impl From<&ConvergenceRow> for Row {
    fn from(r: &ConvergenceRow) -> Self {
        use crate::output::round12 as q;
        Row {
            slices: r.slices,
            deviation: q(r.deviation),
            coupling_deviation: q(r.coupling_deviation),
            crosstalk: q(r.crosstalk),
            leakage_out: q(r.leakage_out),
            leakage_in: q(r.leakage_in),
            symplectic_deviation: q(r.symplectic_deviation),
        }
    }
}

pub fn render(report: &ConvergenceReport, format: Format) -> CliResult<Rendered> {
    let rows: Vec<Row> = report.rows.iter().map(Row::from).collect();
    let (name, omega_t) = match report.scheme {
        OracleScheme::SingleCell => ("single", None),
        OracleScheme::TwoCell { omega_t } => ("double", Some(omega_t)),
    };
    let text = match format {
        Format::Csv => csv_text(&rows)?,
        Format::Json => json_text(&json!({
            "scheme": name,
            "kappa": num(report.kappa),
            "omega_t": opt_num(omega_t),
            "rows": rows,
            "order": opt_num(report.order),
            "monotone": report.monotone,
            "final_deviation": num(report.final_deviation()),
        })),
    };
    Ok(Rendered { text, format, stem: format!("oracle-{name}"), breach: breach(report) })
}

pub fn cmd_oracle_check(a: &OracleArgs) -> CliResult<Rendered> {
    let scheme = oracle_scheme(a.scheme, a.omega_t)?;
    if !(a.kappa >= 0.0) || !a.kappa.is_finite() {
        return Err(Failure::Validation(format!("kappa = {} must be finite and non-negative", a.kappa)));
    }
    let ns = if a.slices.is_empty() { default_slices(scheme) } else { a.slices.clone() };
    if ns.contains(&0) || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::Validation("--slices must be positive and strictly increasing".into()));
    }
    let report = convergence_report(scheme, a.kappa, &ns)?;
    let order = report.order.map_or("n/a".to_string(), |o| format!("{o:.3}"));
    eprintln!(
        "order {order}, monotone {}, final deviation {:.3e}",
        report.monotone,
        report.final_deviation()
    );
    render(&report, a.output.format.unwrap_or(Format::Csv))
}
