use memread_core::gaussian::{apply_unitary, GaussianState, ModeLabel};
use memread_core::optimize::{closed_form, unit_gain_amplifier, Scheme};
use memread_core::protocols::{
    sideband_readout, single_cell_readout, two_cell_relations, InputSqueezing, SingleCellSpec, TildeSqueezing,
    SIDEBAND_MODES,
};
use nalgebra::{DMatrix, DVector, Matrix2};
use serde_json::{json, Map, Value};

use crate::args::{check_loss, Format, RunArgs};
use crate::output::{cell, csv_text, json_text, matrix, num, opt_num, vector, Rendered};
use crate::{CliResult, Failure};

/// Fully resolved parameters of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunParams {
    pub scheme: Scheme,
    pub kappa: f64,
    pub loss: f64,
    pub mean: [f64; 2],
    pub amp_gain: Option<f64>,
    pub squeezing: InputSqueezing,
}

/// Output, auxiliary and memory modes of a run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub params: RunParams,
    pub output: GaussianState,
    pub aux: GaussianState,
    pub memory: GaussianState,
    pub nbar: f64,
    pub fidelity: f64,
    pub gain: Matrix2<f64>,
}

fn default_kappa(scheme: Scheme, loss: f64) -> f64 {
    closed_form(scheme, loss).map_or((2.0 / (1.0 - loss)).sqrt(), |o| o.kappa_sq.sqrt())
}

pub fn resolve(a: &RunArgs) -> CliResult<RunParams> {
    check_loss(a.loss)?;
    let mean: [f64; 2] = a
        .mean
        .as_slice()
        .try_into()
        .map_err(|_| Failure::Validation(format!("--mean takes two numbers x,p, got {}", a.mean.len())))?;
    if mean.iter().any(|m| !m.is_finite()) {
        return Err(Failure::Validation("--mean must be finite".into()));
    }
    let kappa = a.kappa.unwrap_or_else(|| default_kappa(a.scheme, a.loss));
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Failure::Validation(format!("kappa = {kappa} must be finite and non-negative")));
    }
    let squeeze_flags = [a.uniform_r.is_some(), a.selective_v.is_some(), a.tilde_r.is_some()];
    let squeezing = match a.scheme {
        Scheme::Single | Scheme::Double => {
            if squeeze_flags.iter().any(|f| *f) {
                return Err(Failure::Validation(format!("scheme {} takes no squeezing flags", a.scheme)));
            }
            InputSqueezing::Vacuum
        }
        Scheme::Uniform => {
            if squeeze_flags[1] || squeeze_flags[2] {
                return Err(Failure::Validation("uniform-squeezed takes only --uniform-r".into()));
            }
            InputSqueezing::Uniform { r: a.uniform_r.unwrap_or(3f64.ln() / 4.0) }
        }
        Scheme::Selective => {
            if squeeze_flags[0] {
                return Err(Failure::Validation("single-squeezed takes --selective-v and --tilde-r".into()));
            }
            let v = match a.selective_v {
                Some(v) => v,
                None => closed_form(Scheme::Selective, a.loss)?.squeeze_v.unwrap_or(0.0),
            };
            if !(v > 0.0) {
                return Err(Failure::Validation(
                    "the optimal variance is zero here; pass a positive --selective-v".into(),
                ));
            }
            let tilde = a.tilde_r.map_or(TildeSqueezing::Ideal, TildeSqueezing::Finite);
            InputSqueezing::Selective { v, tilde }
        }
    };
    let amp_gain = match a.gain {
        Some(g) if !(g >= 1.0) => return Err(Failure::Validation(format!("gain {g} must be at least 1"))),
        Some(g) if g == 1.0 => None,
        Some(g) => Some(g),
        None if kappa > 0.0 => Some(unit_gain_amplifier(kappa * kappa, a.loss)).filter(|g| *g > 1.0 + 1e-12),
        None => None,
    };
    if a.scheme == Scheme::Double && (a.loss != 0.0 || amp_gain.is_some()) {
        return Err(Failure::Validation(
            "run --scheme double covers the lossless sideband read-out only; use fidelity-curve for A > 0".into(),
        ));
    }
    Ok(RunParams { scheme: a.scheme, kappa, loss: a.loss, mean, amp_gain, squeezing })
}

fn stored(label: &str, mean: [f64; 2]) -> CliResult<GaussianState> {
    Ok(GaussianState::new(vec![label.into()], DVector::from_vec(mean.to_vec()), DMatrix::identity(2, 2))?)
}

pub fn execute(p: &RunParams) -> CliResult<RunReport> {
    if p.scheme == Scheme::Double {
        let atoms = stored("A+", p.mean)?.product(&GaussianState::vacuum(["A-"]))?;
        let r = sideband_readout(p.kappa, &atoms)?;
        let all: Vec<ModeLabel> = SIDEBAND_MODES.iter().map(|m| ModeLabel::from(*m)).collect();
        let joint = GaussianState::vacuum(all[..8].to_vec()).product(&atoms)?;
        let after = apply_unitary(&joint, &two_cell_relations(p.kappa)?)?;
        let memory = after.mode(&"A+".into())?;
        let gain = r.gain.fixed_view::<2, 2>(0, 0).into_owned();
        return Ok(RunReport {
            params: *p,
            output: r.cosine,
            aux: r.sine,
            memory,
            nbar: r.nbar_cosine,
            fidelity: r.fidelity_cosine,
            gain,
        });
    }
    let spec = SingleCellSpec { kappa: p.kappa, loss: p.loss, squeezing: p.squeezing, amp_gain: p.amp_gain };
    let r = single_cell_readout(&spec, &stored("A", p.mean)?)?;
    Ok(RunReport {
        params: *p,
        output: r.output,
        aux: r.aux,
        memory: r.memory,
        nbar: r.nbar,
        fidelity: r.fidelity,
        gain: r.gain,
    })
}

fn squeezing_json(s: &InputSqueezing) -> Value {
    match *s {
        InputSqueezing::Vacuum => json!({ "kind": "vacuum" }),
        InputSqueezing::Uniform { r } => json!({ "kind": "uniform", "r": num(r) }),
        InputSqueezing::Selective { v, tilde } => json!({
            "kind": "selective",
            "V": num(v),
            "tilde_r": match tilde { TildeSqueezing::Finite(r) => num(r), TildeSqueezing::Ideal => Value::Null },
        }),
    }
}

fn mode_json(st: &GaussianState, with_mean: bool) -> Value {
    let mut m = Map::new();
    if with_mean {
        m.insert("mean".into(), vector(st.mean().as_slice()));
    }
    m.insert("cov".into(), matrix(st.cov()));
    Value::Object(m)
}

pub fn to_json(r: &RunReport) -> Value {
    let p = &r.params;
    json!({
        "scheme": p.scheme.name(),
        "params": {
            "kappa": num(p.kappa),
            "loss": num(p.loss),
            "mean": vector(&p.mean),
            "amp_gain": opt_num(p.amp_gain),
            "squeezing": squeezing_json(&p.squeezing),
        },
        "output": mode_json(&r.output, true),
        "aux": mode_json(&r.aux, true),
        "memory": mode_json(&r.memory, false),
        "nbar": num(r.nbar),
        "fidelity": num(r.fidelity),
        "gain": matrix(&r.gain),
    })
}

#[derive(serde::Serialize)]
struct Field {
    field: String,
    value: String,
}

/// Flattens the JSON document into `field,value` rows with dotted paths.
fn flatten(prefix: &str, v: &Value, rows: &mut Vec<Field>) {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, rows);
            }
        }
        Value::Array(a) => {
            for (i, v) in a.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, rows);
            }
        }
        leaf => rows.push(Field { field: prefix.into(), value: cell(leaf) }),
    }
}

pub fn cmd_run(a: &RunArgs) -> CliResult<Rendered> {
    let report = execute(&resolve(a)?)?;
    let doc = to_json(&report);
    let format = a.output.format.unwrap_or(Format::Json);
    let text = match format {
        Format::Json => json_text(&doc),
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", &doc, &mut rows);
            csv_text(&rows)?
        }
    };
    Ok(Rendered { text, format, stem: format!("run-{}", report.params.scheme.name()), breach: None })
}
