use super::{single_cell_readout, InputSqueezing, ReadoutResult, SingleCellSpec, TildeSqueezing, ATOM};
use crate::gaussian::GaussianState;
use crate::optimize::search::bisect;
use crate::Result;

/// Added noise (physical variance units, referred back to the input) of the two clones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloningCheck {
    /// light clone in the output port
    pub light: f64,
    /// clone left in the memory
    pub memory: f64,
    pub product: f64,
}

/// Added noise of the output and of the residual memory, each divided by its
/// own transfer gain so that both are comparable to the stored state.
pub fn cloning_check(result: &ReadoutResult) -> CloningCheck {
    let referred = |noise: nalgebra::Matrix2<f64>, gain: nalgebra::Matrix2<f64>| {
        noise.trace() / 4.0 / gain.determinant().abs()
    };
    let light = referred(result.output_noise, result.gain);
    let memory = referred(result.memory_noise, result.memory_gain);
    CloningCheck { light, memory, product: light * memory }
}

/// Lossless read-out at coupling `kappa` with the `p~` modes in the zero-variance limit.
pub fn cloning_limit_readout(kappa: f64) -> Result<ReadoutResult> {
    let spec = SingleCellSpec {
        squeezing: InputSqueezing::Selective { v: 0.5, tilde: TildeSqueezing::Ideal },
        ..SingleCellSpec::lossless(kappa)
    };
    single_cell_readout(&spec, &GaussianState::vacuum([ATOM]))
}

/// Coupling at which both clones carry the same added noise.
pub fn symmetric_cloning_point() -> Result<(f64, CloningCheck)> {
    let gap = |kappa: f64| -> f64 {
        cloning_limit_readout(kappa).map(|r| cloning_check(&r)).map(|c| c.light - c.memory).unwrap_or(f64::NAN)
    };
    let kappa = bisect(gap, 0.1, 2.0, 1e-13, "kappa")?;
    Ok((kappa, cloning_check(&cloning_limit_readout(kappa)?)))
}
