use nalgebra::DMatrix;

use super::{
    check_unique, embed, hermitian_min_eigenvalue, quadrature_indices, symplectic_form, GaussianState,
    ModeLabel, SymplecticTransform, CP_TOL,
};
use crate::{Error, Result};

/// Gaussian completely positive map `cov -> X cov X^T + Y`, `mean -> X mean`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
    targets: Vec<ModeLabel>,
}

impl GaussianChannel {
    /// Checks dimensions, symmetry of `Y` and `Y + i Omega - i X Omega X^T >= 0`.
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>, targets: Vec<ModeLabel>) -> Result<Self> {
        check_unique(&targets)?;
        let dim = 2 * targets.len();
        for m in [&x, &y] {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: m.nrows().max(m.ncols()) });
            }
        }
        let asymmetry = (&y - y.transpose()).amax();
        if asymmetry > 1e-12 * y.amax().max(1.0) {
            return Err(Error::NotSymmetric { asymmetry });
        }
        let ch = GaussianChannel { x, y, targets };
        let min = ch.cp_min_eigenvalue();
        if min < -CP_TOL {
            return Err(Error::NotCompletelyPositive { min_eigenvalue: min });
        }
        Ok(ch)
    }

    pub fn from_unitary(s: &SymplecticTransform) -> Self {
        let dim = s.matrix().nrows();
        GaussianChannel {
            x: s.matrix().clone(),
            y: DMatrix::zeros(dim, dim),
            targets: s.targets().to_vec(),
        }
    }

    pub fn identity(targets: Vec<ModeLabel>) -> Self {
        let dim = 2 * targets.len();
        GaussianChannel { x: DMatrix::identity(dim, dim), y: DMatrix::zeros(dim, dim), targets }
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn targets(&self) -> &[ModeLabel] {
        &self.targets
    }

    /// Smallest eigenvalue of `Y + i Omega - i X Omega X^T`.
    pub fn cp_min_eigenvalue(&self) -> f64 {
        let omega = symplectic_form(self.targets.len());
        let im = &omega - &self.x * &omega * self.x.transpose();
        hermitian_min_eigenvalue(&self.y, &im)
    }

    /// `next ∘ self`, both on the same ordered modes.
    pub fn then(&self, next: &GaussianChannel) -> Result<GaussianChannel> {
        if self.targets != next.targets {
            return Err(Error::Unsupported("composing channels on different mode lists".into()));
        }
        Ok(GaussianChannel {
            x: &next.x * &self.x,
            y: &next.x * &self.y * next.x.transpose() + &next.y,
            targets: self.targets.clone(),
        })
    }

    /// The same channel written on a larger mode list (identity elsewhere).
    pub fn embed(&self, all: &[ModeLabel]) -> Result<GaussianChannel> {
        check_unique(all)?;
        let idx = quadrature_indices(all, &self.targets)?;
        let dim = 2 * all.len();
        Ok(GaussianChannel {
            x: embed(&self.x, &idx, DMatrix::identity(dim, dim)),
            y: embed(&self.y, &idx, DMatrix::zeros(dim, dim)),
            targets: all.to_vec(),
        })
    }
}

pub fn apply_channel(state: &GaussianState, ch: &GaussianChannel) -> Result<GaussianState> {
    let full = ch.embed(state.labels())?;
    Ok(GaussianState::from_parts(
        state.labels().to_vec(),
        &full.x * state.mean(),
        &full.x * state.cov() * full.x.transpose() + &full.y,
    ))
}

/// Beam-splitter loss with vacuum admixture: `x -> sqrt(1-A) x + sqrt(A) x_vac` on every target.
pub fn loss_channel(loss: f64, modes: Vec<ModeLabel>) -> Result<GaussianChannel> {
    if !(0.0..=1.0).contains(&loss) {
        return Err(Error::InvalidParameter { name: "A", value: loss, reason: "loss must lie in [0, 1]" });
    }
    check_unique(&modes)?;
    let dim = 2 * modes.len();
    Ok(GaussianChannel {
        x: DMatrix::from_diagonal_element(dim, dim, (1.0 - loss).sqrt()),
        y: DMatrix::from_diagonal_element(dim, dim, loss),
        targets: modes,
    })
}

/// Phase-insensitive amplifier of intensity gain `G`: `X = sqrt(G) I`, `Y = (G - 1) I`.
pub fn amplifier_channel(gain: f64, modes: Vec<ModeLabel>) -> Result<GaussianChannel> {
    if !(gain >= 1.0) || !gain.is_finite() {
        return Err(Error::InvalidParameter { name: "G", value: gain, reason: "gain must be finite and >= 1" });
    }
    check_unique(&modes)?;
    let dim = 2 * modes.len();
    Ok(GaussianChannel {
        x: DMatrix::from_diagonal_element(dim, dim, gain.sqrt()),
        y: DMatrix::from_diagonal_element(dim, dim, gain - 1.0),
        targets: modes,
    })
}
