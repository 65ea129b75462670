use nalgebra::{Matrix2, Vector2};

use super::{GaussianState, ModeLabel, CP_TOL};
use crate::{Error, Result};

/// Added noise of a single mode, expressed as thermal photon numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalNoise {
    /// `(cov_xx + cov_pp)/4 - 1/2`
    pub nbar: f64,
    /// `cov_xx/2 - 1/2`
    pub nbar_x: f64,
    /// `cov_pp/2 - 1/2`
    pub nbar_p: f64,
}

impl ThermalNoise {
    pub fn is_symmetric(&self, tol: f64) -> bool {
        (self.nbar_x - self.nbar_p).abs() <= tol
    }
}

/// Thermal photon number equivalent to the noise of `mode`.
///
/// Only meaningful for a unit-gain read-out of a coherent state; the caller
/// is responsible for that.
pub fn added_noise(state: &GaussianState, mode: &ModeLabel) -> Result<ThermalNoise> {
    let m = state.mode(mode)?;
    let c = m.cov();
    let noise = ThermalNoise {
        nbar: 0.25 * (c[(0, 0)] + c[(1, 1)]) - 0.5,
        nbar_x: 0.5 * c[(0, 0)] - 0.5,
        nbar_p: 0.5 * c[(1, 1)] - 0.5,
    };
    if noise.nbar < -CP_TOL {
        return Err(Error::NegativeNoise { nbar: noise.nbar });
    }
    Ok(noise)
}

/// Overlap `<alpha| rho |alpha>` of a single-mode Gaussian (physical covariance `cov/2`)
/// with the coherent state whose mean is `target_mean`.
pub fn coherent_overlap(mean: Vector2<f64>, cov: Matrix2<f64>, target_mean: Vector2<f64>) -> Result<f64> {
    // V1 + V2 with V1 = I/2 for the coherent state and V2 = cov/2
    let sum = (cov + Matrix2::identity()) * 0.5;
    let det = sum.determinant();
    let inv = sum.try_inverse().filter(|_| det > 0.0).ok_or(Error::SingularCovariance)?;
    let d = mean - target_mean;
    Ok((-0.5 * (d.transpose() * inv * d)[(0, 0)]).exp() / det.sqrt())
}

pub fn fidelity_coherent(state: &GaussianState, mode: &ModeLabel, target_mean: [f64; 2]) -> Result<f64> {
    let m = state.mode(mode)?;
    let mean = Vector2::new(m.mean()[0], m.mean()[1]);
    let c = m.cov();
    let cov = Matrix2::new(c[(0, 0)], c[(0, 1)], c[(1, 0)], c[(1, 1)]);
    coherent_overlap(mean, cov, Vector2::new(target_mean[0], target_mean[1]))
}
