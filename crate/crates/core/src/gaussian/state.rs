use nalgebra::{DMatrix, DVector};

use super::{check_unique, hermitian_min_eigenvalue, quadrature_indices, symplectic_form, ModeLabel, CP_TOL};
use crate::{Error, Result};

/// First and second moments of a Gaussian state over labeled modes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    labels: Vec<ModeLabel>,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state and checks symmetry and the uncertainty relation `cov + i Omega >= 0`.
    pub fn new(labels: Vec<ModeLabel>, mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let state = Self::new_limit(labels, mean, cov)?;
        let min = state.uncertainty_min_eigenvalue();
        if min < -CP_TOL {
            return Err(Error::Unphysical { min_eigenvalue: min });
        }
        Ok(state)
    }

    /// Like [`GaussianState::new`] but without the uncertainty check.
    ///
    /// Used for idealized limits such as a quadrature with exactly zero variance,
    /// whose conjugate partner never reaches any observed port.
    pub fn new_limit(labels: Vec<ModeLabel>, mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        check_unique(&labels)?;
        let dim = 2 * labels.len();
        if mean.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: mean.len() });
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: cov.nrows().max(cov.ncols()) });
        }
        let asymmetry = (&cov - cov.transpose()).amax();
        if asymmetry > 1e-12 * cov.amax().max(1.0) {
            return Err(Error::NotSymmetric { asymmetry });
        }
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(GaussianState { labels, mean, cov })
    }

    pub fn vacuum<I, L>(names: I) -> Self
    where
        I: IntoIterator<Item = L>,
        L: Into<ModeLabel>,
    {
        let labels = super::labels(names);
        let dim = 2 * labels.len();
        GaussianState {
            labels,
            mean: DVector::zeros(dim),
            cov: DMatrix::identity(dim, dim),
        }
    }

    /// Single-mode coherent state `|alpha>` with `alpha = re + i im`.
    pub fn coherent(label: impl Into<ModeLabel>, re: f64, im: f64) -> Self {
        let s = std::f64::consts::SQRT_2;
        GaussianState {
            labels: vec![label.into()],
            mean: DVector::from_vec(vec![s * re, s * im]),
            cov: DMatrix::identity(2, 2),
        }
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn n_modes(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &ModeLabel) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    /// Reduced state on the given modes, in the given order.
    pub fn reduce(&self, targets: &[ModeLabel]) -> Result<GaussianState> {
        check_unique(targets)?;
        let idx = quadrature_indices(&self.labels, targets)?;
        let mean = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.mean[i]));
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.cov[(idx[a], idx[b])]);
        Ok(GaussianState { labels: targets.to_vec(), mean, cov })
    }

    pub fn mode(&self, label: &ModeLabel) -> Result<GaussianState> {
        self.reduce(std::slice::from_ref(label))
    }

    /// Uncorrelated joint state `self ⊗ other`.
    pub fn product(&self, other: &GaussianState) -> Result<GaussianState> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        check_unique(&labels)?;
        let (n, m) = (self.mean.len(), other.mean.len());
        let mut mean = DVector::zeros(n + m);
        mean.rows_mut(0, n).copy_from(&self.mean);
        mean.rows_mut(n, m).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(n + m, n + m);
        cov.view_mut((0, 0), (n, n)).copy_from(&self.cov);
        cov.view_mut((n, n), (m, m)).copy_from(&other.cov);
        Ok(GaussianState { labels, mean, cov })
    }

    pub fn relabel(mut self, from: &ModeLabel, to: impl Into<ModeLabel>) -> Result<Self> {
        let k = self.index_of(from)?;
        let to = to.into();
        if self.labels.iter().enumerate().any(|(i, l)| i != k && *l == to) {
            return Err(Error::DuplicateMode(to.to_string()));
        }
        self.labels[k] = to;
        Ok(self)
    }

    /// Smallest eigenvalue of `cov + i Omega`; non-negative for physical states.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        hermitian_min_eigenvalue(&self.cov, &symplectic_form(self.n_modes()))
    }

    pub(crate) fn from_parts(labels: Vec<ModeLabel>, mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        GaussianState { labels, mean, cov }
    }
}
