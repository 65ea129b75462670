//! Phase-space description of multimode Gaussian states.
//!
//! Conventions used throughout the crate:
//!
//! * quadratures are interleaved, `(x1, p1, x2, p2, ...)`, with `[x, p] = i`;
//! * covariance matrices are normalized so that the vacuum has `cov = I`,
//!   i.e. physical variances are `cov / 2`;
//! * a coherent amplitude `alpha` sits at mean `(sqrt(2) Re alpha, sqrt(2) Im alpha)`.

mod channel;
mod measures;
mod state;
mod transform;

use std::fmt;

use nalgebra::DMatrix;

pub use channel::{amplifier_channel, apply_channel, loss_channel, GaussianChannel};
pub use measures::{added_noise, coherent_overlap, fidelity_coherent, ThermalNoise};
pub use state::GaussianState;
pub use transform::{
    apply_unitary, beam_splitter, squeezer, symplectic_deviation, wave_plate, SqueezeAxis,
    SymplecticTransform,
};

/// Symplectic check threshold, scaled by `max(1, |S|_F^2)` to absorb rounding at large coupling.
pub const SYMPLECTIC_TOL: f64 = 1e-12;
/// Lowest admissible eigenvalue in the complete-positivity and uncertainty checks.
pub const CP_TOL: f64 = 1e-10;

/// Symbolic name of one bosonic mode (one `(x, p)` pair).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeLabel(String);

impl ModeLabel {
    pub fn new(name: impl Into<String>) -> Self {
        ModeLabel(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for ModeLabel {
    fn from(s: &str) -> Self {
        ModeLabel(s.to_owned())
    }
}

impl From<String> for ModeLabel {
    fn from(s: String) -> Self {
        ModeLabel(s)
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn labels<I, L>(names: I) -> Vec<ModeLabel>
where
    I: IntoIterator<Item = L>,
    L: Into<ModeLabel>,
{
    names.into_iter().map(Into::into).collect()
}

/// Block-diagonal symplectic form `Omega = diag([[0, 1], [-1, 0]], ...)` on `n_modes` modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Smallest eigenvalue of the Hermitian matrix `re + i im` (`re` symmetric, `im` antisymmetric).
///
/// Uses the real embedding `[[re, -im], [im, re]]`, whose spectrum is that of
/// the Hermitian matrix with every eigenvalue doubled in multiplicity.
pub(crate) fn hermitian_min_eigenvalue(re: &DMatrix<f64>, im: &DMatrix<f64>) -> f64 {
    let n = re.nrows();
    let mut big = DMatrix::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(re);
    big.view_mut((n, n), (n, n)).copy_from(re);
    big.view_mut((0, n), (n, n)).copy_from(&(-im));
    big.view_mut((n, 0), (n, n)).copy_from(im);
    // symmetrize away rounding before the eigen-solve
    let big = (&big + big.transpose()) * 0.5;
    big.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn check_unique(labels: &[ModeLabel]) -> crate::Result<()> {
    for (i, a) in labels.iter().enumerate() {
        if labels[..i].contains(a) {
            return Err(crate::Error::DuplicateMode(a.to_string()));
        }
    }
    Ok(())
}

/// Quadrature indices of `targets` inside `all`, in target order.
pub(crate) fn quadrature_indices(all: &[ModeLabel], targets: &[ModeLabel]) -> crate::Result<Vec<usize>> {
    let mut idx = Vec::with_capacity(2 * targets.len());
    for t in targets {
        let k = all
            .iter()
            .position(|l| l == t)
            .ok_or_else(|| crate::Error::UnknownMode(t.to_string()))?;
        idx.push(2 * k);
        idx.push(2 * k + 1);
    }
    Ok(idx)
}

/// Embed a block acting on quadratures `idx` into a `dim x dim` matrix, filling the rest from `base`.
pub(crate) fn embed(block: &DMatrix<f64>, idx: &[usize], base: DMatrix<f64>) -> DMatrix<f64> {
    let mut full = base;
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            full[(i, j)] = block[(a, b)];
        }
    }
    full
}
