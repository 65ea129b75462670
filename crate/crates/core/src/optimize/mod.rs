//! Optimal couplings, gains and squeezing for the lossy read-out schemes.
//!
//! The closed forms live here; [`numeric_optimize`] recovers them from the
//! channel pipelines by direct search.

mod numeric;
pub mod search;

use std::fmt;
use std::str::FromStr;

pub use numeric::{compare, numeric_optimize, pipeline_point, Comparison, Free};

use crate::{Error, Result};

/// Fidelity of the best measure-and-prepare strategy for coherent states.
pub fn classical_benchmark() -> f64 {
    0.5
}

/// Loss at which the selectively squeezed scheme starts to need the amplifier.
pub fn selective_threshold() -> f64 {
    0.5 * (3.0 - (7.0f64 / 3.0).sqrt())
}

/// Loss at which the vacuum single-cell scheme starts to need the amplifier.
pub const SINGLE_CELL_THRESHOLD: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// one cell, vacuum light
    Single,
    /// two oppositely precessing cells
    Double,
    /// one cell, all `x` light quadratures squeezed alike (lossless)
    Uniform,
    /// one cell, flat `x` modes squeezed to `V`, `p~` modes infinitely squeezed
    Selective,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Single => "single",
            Scheme::Double => "double",
            Scheme::Uniform => "uniform-squeezed",
            Scheme::Selective => "single-squeezed",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "single" | "single-cell" => Ok(Scheme::Single),
            "double" | "two-cell" => Ok(Scheme::Double),
            "uniform" | "uniform-squeezed" => Ok(Scheme::Uniform),
            "single-squeezed" | "selective" => Ok(Scheme::Selective),
            other => Err(Error::Unsupported(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    NoAmp,
    Amp,
}

impl Branch {
    pub fn name(&self) -> &'static str {
        match self {
            Branch::NoAmp => "no-amp",
            Branch::Amp => "amp",
        }
    }
}

/// Operating point of a read-out scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    /// `kappa^2`, or `kappa1^2` for the two-cell scheme
    pub kappa_sq: f64,
    pub kappa2_sq: Option<f64>,
    /// amplifier intensity gain, 1 when unused
    pub amp_gain: f64,
    /// physical variance of the squeezed flat `x` modes
    pub squeeze_v: Option<f64>,
    /// squeezing parameter of the uniform scheme
    pub squeeze_r: Option<f64>,
    pub nbar: f64,
    pub fidelity: f64,
    pub branch: Branch,
}

impl Optimum {
    fn from_nbar(kappa_sq: f64, amp_gain: f64, nbar: f64, branch: Branch) -> Self {
        Optimum {
            kappa_sq,
            kappa2_sq: None,
            amp_gain,
            squeeze_v: None,
            squeeze_r: None,
            nbar,
            fidelity: 1.0 / (1.0 + nbar),
            branch,
        }
    }
}

pub(crate) fn check_loss(loss: f64) -> Result<()> {
    if !(0.0..1.0).contains(&loss) {
        return Err(Error::InvalidParameter { name: "A", value: loss, reason: "loss must lie in [0, 1)" });
    }
    Ok(())
}

/// Unit-gain amplifier setting for a given coupling.
pub fn unit_gain_amplifier(kappa_sq: f64, loss: f64) -> f64 {
    2.0 / (kappa_sq * (1.0 - loss))
}

pub fn single_cell_lossy(loss: f64) -> Result<Optimum> {
    check_loss(loss)?;
    let t = 1.0 - loss;
    if loss <= SINGLE_CELL_THRESHOLD {
        Ok(Optimum::from_nbar(2.0 / t, 1.0, 1.0 / (3.0 * t), Branch::NoAmp))
    } else {
        let k2 = 2.0 * (3.0 / t).sqrt();
        Ok(Optimum::from_nbar(k2, unit_gain_amplifier(k2, loss), 2.0 / (3.0 * t).sqrt() - 1.0, Branch::Amp))
    }
}

pub fn two_cell_lossy(loss: f64) -> Result<Optimum> {
    check_loss(loss)?;
    let t = 1.0 - loss;
    let nbar = (t + 0.5 * loss * loss) / (3.0 * t * t * t);
    Ok(Optimum { kappa2_sq: Some(2.0 / t), ..Optimum::from_nbar(2.0 / (t * t * t), 1.0, nbar, Branch::NoAmp) })
}

/// Fidelity of the lossless unit-gain read-out with every light `x` squeezed by `r`.
pub fn uniform_squeeze(r: f64) -> f64 {
    12.0 / (12.0 + 3.0 * (-2.0 * r).exp() + (2.0 * r).exp())
}

/// Best uniform squeezing: `e^{2r} = sqrt 3`.
pub fn uniform_squeeze_optimum() -> Optimum {
    let r = 3f64.ln() / 4.0;
    let f = uniform_squeeze(r);
    Optimum {
        squeeze_r: Some(r),
        squeeze_v: Some(0.5 * (-2.0 * r).exp()),
        ..Optimum::from_nbar(2.0, 1.0, 1.0 / f - 1.0, Branch::NoAmp)
    }
}

pub fn selective_squeeze_lossy(loss: f64) -> Result<Optimum> {
    check_loss(loss)?;
    let a = loss;
    let t = 1.0 - a;
    if a <= selective_threshold() {
        let nbar = a * t + a / (3.0 * t);
        Ok(Optimum { squeeze_v: Some(a / (2.0 * t)), ..Optimum::from_nbar(2.0 / t, 1.0, nbar, Branch::NoAmp) })
    } else {
        let k2 = 2.0 * (3.0 * (2.0 - a) / t).sqrt();
        let nbar = 2.0 * a * ((2.0 - a) / (3.0 * t)).sqrt() - a;
        Ok(Optimum {
            squeeze_v: Some(0.25 * (k2 - 2.0).abs()),
            ..Optimum::from_nbar(k2, unit_gain_amplifier(k2, a), nbar, Branch::Amp)
        })
    }
}

/// Closed-form optimum of `scheme`; the uniform scheme is only known without loss.
pub fn closed_form(scheme: Scheme, loss: f64) -> Result<Optimum> {
    match scheme {
        Scheme::Single => single_cell_lossy(loss),
        Scheme::Double => two_cell_lossy(loss),
        Scheme::Selective => selective_squeeze_lossy(loss),
        Scheme::Uniform if loss == 0.0 => Ok(uniform_squeeze_optimum()),
        Scheme::Uniform => Err(Error::Unsupported("uniform squeezing has no closed form with loss".into())),
    }
}

/// Loss at which the closed-form fidelity of `scheme` drops to the classical benchmark.
pub fn classical_crossing(scheme: Scheme) -> Result<f64> {
    let f = |a: f64| closed_form(scheme, a).map(|o| o.fidelity - classical_benchmark()).unwrap_or(f64::NAN);
    search::bisect(f, 0.0, 0.999, 1e-14, "A")
}
