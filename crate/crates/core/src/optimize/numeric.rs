use std::str::FromStr;

use super::search::golden_section;
use super::{check_loss, closed_form, unit_gain_amplifier, Branch, Optimum, Scheme};
use crate::gaussian::GaussianState;
use crate::protocols::{
    single_cell_readout, two_cell_pipeline, InputSqueezing, SingleCellSpec, TildeSqueezing, TwoCellSpec, ATOM,
};
use crate::{Error, Result};

const TOL: f64 = 1e-10;
const LN_V_RANGE: (f64, f64) = (-25.0, 5.0);
const R_RANGE: (f64, f64) = (-3.0, 3.0);

/// Parameters left to the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Free {
    KappaSq,
    /// amplifier gain; always fixed by the unit-gain condition
    Gain,
    Variance,
    R,
}

impl FromStr for Free {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kappa_sq" | "kappa2" | "k2" => Ok(Free::KappaSq),
            "g" | "gain" => Ok(Free::Gain),
            "v" | "variance" => Ok(Free::Variance),
            "r" => Ok(Free::R),
            other => Err(Error::Unsupported(format!("unknown free parameter `{other}`"))),
        }
    }
}

/// One single-cell operating point evaluated through the channel pipeline.
///
/// The amplifier gain is set by the unit-gain condition; couplings that would
/// need `G < 1` are rejected.
pub fn pipeline_point(loss: f64, kappa_sq: f64, squeezing: InputSqueezing) -> Result<Optimum> {
    check_loss(loss)?;
    if !(kappa_sq > 0.0) || !kappa_sq.is_finite() {
        return Err(Error::InvalidParameter { name: "kappa_sq", value: kappa_sq, reason: "must be positive" });
    }
    let g = unit_gain_amplifier(kappa_sq, loss);
    if g < 1.0 - 1e-12 {
        return Err(Error::InvalidParameter { name: "kappa_sq", value: kappa_sq, reason: "exceeds unit gain without amplifier" });
    }
    let amp = g > 1.0 + 1e-12;
    let spec = SingleCellSpec { kappa: kappa_sq.sqrt(), loss, squeezing, amp_gain: amp.then_some(g) };
    let r = single_cell_readout(&spec, &GaussianState::vacuum([ATOM]))?;
    let (squeeze_v, squeeze_r) = match squeezing {
        InputSqueezing::Vacuum => (None, None),
        InputSqueezing::Uniform { r } => (Some(0.5 * (-2.0 * r).exp()), Some(r)),
        InputSqueezing::Selective { v, .. } => (Some(v), None),
    };
    Ok(Optimum {
        kappa_sq,
        kappa2_sq: None,
        amp_gain: if amp { g } else { 1.0 },
        squeeze_v,
        squeeze_r,
        nbar: r.nbar,
        fidelity: r.fidelity,
        branch: if amp { Branch::Amp } else { Branch::NoAmp },
    })
}

fn nbar_or_nan(p: Result<Optimum>) -> f64 {
    p.map(|o| o.nbar).unwrap_or(f64::NAN)
}

fn selective(v: f64) -> InputSqueezing {
    InputSqueezing::Selective { v, tilde: TildeSqueezing::Ideal }
}

fn unsupported(scheme: Scheme, frees: &[Free]) -> Error {
    Error::Unsupported(format!("free parameters {frees:?} for scheme `{scheme}`"))
}

/// Maximizes the pipeline fidelity of `scheme` over the `frees`; fixed
/// parameters take their closed-form optimal values.
pub fn numeric_optimize(scheme: Scheme, loss: f64, frees: &[Free]) -> Result<Optimum> {
    check_loss(loss)?;
    let has = |f: Free| frees.contains(&f);
    if has(Free::Gain) {
        return Err(Error::Unsupported("the amplifier gain is fixed by the unit-gain condition".into()));
    }
    let k2_max = 2.0 / (1.0 - loss);
    let k2_range = (1e-3 * k2_max, k2_max);

    match scheme {
        Scheme::Single => {
            if frees.iter().any(|f| *f != Free::KappaSq) {
                return Err(unsupported(scheme, frees));
            }
            let k2 = if has(Free::KappaSq) {
                let obj = |k2: f64| nbar_or_nan(pipeline_point(loss, k2, InputSqueezing::Vacuum));
                golden_section(obj, k2_range.0, k2_range.1, TOL, "kappa_sq")?.0
            } else {
                closed_form(scheme, loss)?.kappa_sq
            };
            pipeline_point(loss, k2, InputSqueezing::Vacuum)
        }
        Scheme::Uniform => {
            if frees.iter().any(|f| *f != Free::R) {
                return Err(unsupported(scheme, frees));
            }
            let eval = |r: f64| pipeline_point(loss, k2_max, InputSqueezing::Uniform { r });
            let r = if has(Free::R) {
                golden_section(|r| nbar_or_nan(eval(r)), R_RANGE.0, R_RANGE.1, TOL, "r")?.0
            } else {
                3f64.ln() / 4.0
            };
            eval(r)
        }
        Scheme::Selective => {
            if frees.iter().any(|f| !matches!(f, Free::KappaSq | Free::Variance)) {
                return Err(unsupported(scheme, frees));
            }
            let best = closed_form(scheme, loss)?;
            let best_v = |k2: f64| -> Result<f64> {
                if has(Free::Variance) {
                    let obj = |lnv: f64| nbar_or_nan(pipeline_point(loss, k2, selective(lnv.exp())));
                    Ok(golden_section(obj, LN_V_RANGE.0, LN_V_RANGE.1, TOL, "ln_V")?.0.exp())
                } else {
                    // a vanishing variance is reached only as a limit
                    Ok(best.squeeze_v.unwrap_or(0.0).max(LN_V_RANGE.0.exp()))
                }
            };
            let k2 = if has(Free::KappaSq) {
                let obj = |k2: f64| best_v(k2).map(|v| nbar_or_nan(pipeline_point(loss, k2, selective(v)))).unwrap_or(f64::NAN);
                golden_section(obj, k2_range.0, k2_range.1, TOL, "kappa_sq")?.0
            } else {
                best.kappa_sq
            };
            pipeline_point(loss, k2, selective(best_v(k2)?))
        }
        Scheme::Double => {
            if !frees.is_empty() {
                return Err(unsupported(scheme, frees));
            }
            let spec = TwoCellSpec::unit_gain(loss)?;
            let r = two_cell_pipeline(&spec)?;
            Ok(Optimum {
                kappa_sq: spec.kappa1 * spec.kappa1,
                kappa2_sq: Some(spec.kappa2 * spec.kappa2),
                amp_gain: 1.0,
                squeeze_v: None,
                squeeze_r: None,
                nbar: r.nbar,
                fidelity: r.fidelity,
                branch: Branch::NoAmp,
            })
        }
    }
}

/// Numeric and closed-form optima side by side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub numeric: Optimum,
    pub closed: Optimum,
    /// largest absolute difference over all reported parameters and figures of merit
    pub max_discrepancy: f64,
}

pub fn compare(scheme: Scheme, loss: f64, frees: &[Free]) -> Result<Comparison> {
    let numeric = numeric_optimize(scheme, loss, frees)?;
    let closed = closed_form(scheme, loss)?;
    let opt = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) => (a - b).abs(),
        _ => 0.0,
    };
    let max_discrepancy = [
        (numeric.kappa_sq - closed.kappa_sq).abs(),
        opt(numeric.kappa2_sq, closed.kappa2_sq),
        (numeric.amp_gain - closed.amp_gain).abs(),
        opt(numeric.squeeze_v, closed.squeeze_v),
        opt(numeric.squeeze_r, closed.squeeze_r),
        (numeric.nbar - closed.nbar).abs(),
        (numeric.fidelity - closed.fidelity).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(Comparison { numeric, closed, max_discrepancy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_cell_recovers_closed_form() {
        let o = numeric_optimize(Scheme::Single, 0.5, &[Free::KappaSq]).unwrap();
        assert_abs_diff_eq!(o.kappa_sq, 4.0, epsilon = 1e-8);
        assert_abs_diff_eq!(o.nbar, 2.0 / 3.0, epsilon = 1e-12);
        let c = compare(Scheme::Single, 0.85, &[Free::KappaSq]).unwrap();
        assert_eq!(c.numeric.branch, Branch::Amp);
        assert_abs_diff_eq!(c.numeric.nbar, c.closed.nbar, epsilon = 1e-12);
        assert!(c.max_discrepancy < 1e-5, "{c:?}");
    }

    #[test]
    fn uniform_recovers_sqrt3() {
        let o = numeric_optimize(Scheme::Uniform, 0.0, &[Free::R]).unwrap();
        assert_abs_diff_eq!((2.0 * o.squeeze_r.unwrap()).exp(), 3f64.sqrt(), epsilon = 1e-6);
        assert_abs_diff_eq!(o.fidelity, 6.0 / (6.0 + 3f64.sqrt()), epsilon = 1e-12);
    }

    #[test]
    fn fixed_parameters_reproduce_closed_forms() {
        for a in [0.0, 0.2, 0.5, 0.7, 0.9] {
            for s in [Scheme::Single, Scheme::Double] {
                let c = compare(s, a, &[]).unwrap();
                assert_abs_diff_eq!(c.numeric.nbar, c.closed.nbar, epsilon = 1e-10);
            }
        }
        for a in [0.1, 0.5, 0.8, 0.95] {
            let c = compare(Scheme::Selective, a, &[]).unwrap();
            assert_abs_diff_eq!(c.numeric.nbar, c.closed.nbar, epsilon = 1e-10);
        }
    }

    #[test]
    fn gain_is_never_free() {
        assert!(numeric_optimize(Scheme::Single, 0.1, &[Free::Gain]).is_err());
        assert!(numeric_optimize(Scheme::Double, 0.1, &[Free::KappaSq]).is_err());
        assert!(numeric_optimize(Scheme::Single, 0.1, &[Free::R]).is_err());
    }

    #[test]
    fn free_names() {
        assert_eq!("kappa_sq".parse::<Free>().unwrap(), Free::KappaSq);
        assert_eq!("V".parse::<Free>().unwrap(), Free::Variance);
        assert!("q".parse::<Free>().is_err());
    }
}
