//! Read-out pipelines built from the elementary Gaussian operations.
//!
//! Two beams `L` and `M` cross the atomic ensemble `A` once, in orthogonal
//! directions. Each beam carries a flat temporal mode (`L`, `M`) and the odd
//! mode `f3` (`L~`, `M~`); the QND coupling mixes them with the atomic
//! quadratures. A wave plate on `M` and a balanced beam splitter then merge the
//! beams so that one port (`out`) holds the atomic state and the other (`aux`)
//! its phase-conjugated clone.

mod cloning;
mod single_cell;
mod two_cell;

use nalgebra::{Matrix2, Vector2};

pub use cloning::{cloning_check, cloning_limit_readout, symmetric_cloning_point, CloningCheck};
pub use single_cell::{
    recombination, recombine, single_cell_pass, single_cell_readout, InputSqueezing, SingleCellSpec,
    TildeSqueezing, ReadoutResult,
};
pub use two_cell::{
    sideband_readout, two_cell_first_pass, two_cell_pipeline, two_cell_relations, two_cell_second_pass,
    SidebandReadout, TwoCellResult, TwoCellSpec, SIDEBAND_MODES,
};

use crate::{Error, Result};

pub const L: &str = "L";
pub const L_TILDE: &str = "L~";
pub const M: &str = "M";
pub const M_TILDE: &str = "M~";
pub const ATOM: &str = "A";
pub const OUT: &str = "out";
pub const AUX: &str = "aux";

/// Phase-space frame of a unit-gain read-out: `x_out = p_A`, `p_out = -x_A`.
pub fn readout_frame() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

/// Raw experimental parameters of one light–atom interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// coupling constant `a`
    pub a: f64,
    /// photons in the strong polarization component of each beam
    pub photons: f64,
    /// pulse duration `T`
    pub duration: f64,
    /// macroscopic spin `<J_x>`
    pub jx: f64,
    /// Larmor frequency in rad per unit time
    pub omega: f64,
}

impl PhysicalParams {
    pub fn omega_t(&self) -> f64 {
        self.omega * self.duration
    }

    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64, bool); 5] = [
            ("a", self.a, self.a >= 0.0),
            ("N_L", self.photons, self.photons > 0.0),
            ("T", self.duration, self.duration > 0.0),
            ("Jx", self.jx, self.jx > 0.0),
            ("Omega", self.omega, self.omega >= 0.0),
        ];
        for (name, value, ok) in checks {
            if !ok || !value.is_finite() {
                return Err(Error::InvalidParameter { name, value, reason: "must be finite and positive" });
            }
        }
        Ok(())
    }
}

/// Effective coupling `kappa = a sqrt(N_L <J_x> / 2)`.
pub fn kappa_from_physical(p: &PhysicalParams) -> Result<f64> {
    p.validate()?;
    Ok(p.a * (p.photons * p.jx / 2.0).sqrt())
}

pub(crate) fn check_kappa(name: &'static str, kappa: f64) -> Result<()> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter { name, value: kappa, reason: "coupling must be finite and >= 0" });
    }
    Ok(())
}

pub(crate) fn check_loss(loss: f64) -> Result<()> {
    if !(0.0..1.0).contains(&loss) {
        return Err(Error::InvalidParameter { name: "A", value: loss, reason: "loss must lie in [0, 1)" });
    }
    Ok(())
}

pub(crate) fn vec2(v: &nalgebra::DVector<f64>) -> Vector2<f64> {
    Vector2::new(v[0], v[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(a: f64, photons: f64, jx: f64) -> PhysicalParams {
        PhysicalParams { a, photons, duration: 1.0, jx, omega: 300.0 }
    }

    #[test]
    fn kappa_substitution() {
        assert_abs_diff_eq!(kappa_from_physical(&params(1.0, 2.0, 2.0)).unwrap(), 2f64.sqrt());
        let k1 = kappa_from_physical(&params(0.3, 1e6, 5e5)).unwrap();
        let k2 = kappa_from_physical(&params(0.3, 2e6, 5e5)).unwrap();
        assert_abs_diff_eq!(k2 / k1, 2f64.sqrt(), epsilon = 1e-14);
        assert_eq!(kappa_from_physical(&params(0.0, 2.0, 2.0)).unwrap(), 0.0);
        assert!(kappa_from_physical(&params(1.0, -2.0, 2.0)).is_err());
        assert_abs_diff_eq!(params(1.0, 1.0, 1.0).omega_t(), 300.0);
    }
}
