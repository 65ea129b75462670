use nalgebra::DMatrix;

use super::{check_unique, embed, quadrature_indices, symplectic_form, GaussianState, ModeLabel, SYMPLECTIC_TOL};
use crate::{Error, Result};

/// `|S Omega S^T - Omega|_F`.
pub fn symplectic_deviation(s: &DMatrix<f64>) -> f64 {
    let omega = symplectic_form(s.nrows() / 2);
    (s * &omega * s.transpose() - omega).norm()
}

/// Gaussian unitary acting on an ordered set of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
    targets: Vec<ModeLabel>,
}

impl SymplecticTransform {
    pub fn new(matrix: DMatrix<f64>, targets: Vec<ModeLabel>) -> Result<Self> {
        check_unique(&targets)?;
        let dim = 2 * targets.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: matrix.nrows().max(matrix.ncols()) });
        }
        let deviation = symplectic_deviation(&matrix);
        if deviation > SYMPLECTIC_TOL * matrix.norm_squared().max(1.0) {
            return Err(Error::NotSymplectic { deviation });
        }
        Ok(SymplecticTransform { matrix, targets })
    }

    pub fn identity(targets: Vec<ModeLabel>) -> Self {
        let dim = 2 * targets.len();
        SymplecticTransform { matrix: DMatrix::identity(dim, dim), targets }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn targets(&self) -> &[ModeLabel] {
        &self.targets
    }

    pub fn deviation(&self) -> f64 {
        symplectic_deviation(&self.matrix)
    }

    /// `next ∘ self`, both acting on the same ordered modes.
    pub fn then(&self, next: &SymplecticTransform) -> Result<SymplecticTransform> {
        if self.targets != next.targets {
            return Err(Error::Unsupported("composing transforms on different mode lists".into()));
        }
        Ok(SymplecticTransform {
            matrix: &next.matrix * &self.matrix,
            targets: self.targets.clone(),
        })
    }

    /// The same transform written on a larger mode list (identity elsewhere).
    pub fn embed(&self, all: &[ModeLabel]) -> Result<SymplecticTransform> {
        check_unique(all)?;
        let idx = quadrature_indices(all, &self.targets)?;
        let dim = 2 * all.len();
        Ok(SymplecticTransform {
            matrix: embed(&self.matrix, &idx, DMatrix::identity(dim, dim)),
            targets: all.to_vec(),
        })
    }
}

/// `cov -> S cov S^T`, `mean -> S mean` on the targeted modes.
pub fn apply_unitary(state: &GaussianState, s: &SymplecticTransform) -> Result<GaussianState> {
    let full = s.embed(state.labels())?;
    let m = full.matrix();
    Ok(GaussianState::from_parts(
        state.labels().to_vec(),
        m * state.mean(),
        m * state.cov() * m.transpose(),
    ))
}

/// Balanced beam splitter: `i -> (i + j)/sqrt 2`, `j -> (i - j)/sqrt 2` for both quadratures.
///
/// After a [`wave_plate`] on `j`, the first port carries
/// `x = (x_i + p_j)/sqrt 2`, `p = (p_i - x_j)/sqrt 2`.
pub fn beam_splitter(i: impl Into<ModeLabel>, j: impl Into<ModeLabel>) -> Result<SymplecticTransform> {
    let (i, j) = (i.into(), j.into());
    if i == j {
        return Err(Error::SameMode(i.to_string()));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        s, 0.0,  s, 0.0,
        0.0, s, 0.0,  s,
        s, 0.0, -s, 0.0,
        0.0, s, 0.0, -s,
    ]);
    Ok(SymplecticTransform { matrix: m, targets: vec![i, j] })
}

/// Quarter-turn in phase space: `x -> p`, `p -> -x`.
pub fn wave_plate(mode: impl Into<ModeLabel>) -> SymplecticTransform {
    let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
    SymplecticTransform { matrix: m, targets: vec![mode.into()] }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqueezeAxis {
    /// `x -> e^{-r} x`, `p -> e^{r} p`
    X,
    /// `p -> e^{-r} p`, `x -> e^{r} x`
    P,
}

pub fn squeezer(mode: impl Into<ModeLabel>, r: f64, axis: SqueezeAxis) -> Result<SymplecticTransform> {
    if !r.is_finite() {
        return Err(Error::InvalidParameter { name: "r", value: r, reason: "squeezing must be finite" });
    }
    let (sx, sp) = match axis {
        SqueezeAxis::X => ((-r).exp(), r.exp()),
        SqueezeAxis::P => (r.exp(), (-r).exp()),
    };
    let m = DMatrix::from_row_slice(2, 2, &[sx, 0.0, 0.0, sp]);
    Ok(SymplecticTransform { matrix: m, targets: vec![mode.into()] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn displaced(label: &str, x: f64, p: f64) -> GaussianState {
        GaussianState::new(vec![label.into()], DVector::from_vec(vec![x, p]), DMatrix::identity(2, 2)).unwrap()
    }

    #[test]
    fn identity_on_vacuum() {
        let v = GaussianState::vacuum(["L", "M"]);
        let out = apply_unitary(&v, &SymplecticTransform::identity(vec!["M".into()])).unwrap();
        assert_eq!(out, v);
    }

    #[test]
    fn wave_plate_rotates_mean() {
        let out = apply_unitary(&displaced("M", 1.0, 0.0), &wave_plate("M")).unwrap();
        assert_abs_diff_eq!(out.mean()[0], 0.0);
        assert_abs_diff_eq!(out.mean()[1], -1.0);
    }

    #[test]
    fn wave_plate_fourth_power_is_identity() {
        let w = wave_plate("M");
        let w4 = w.then(&w).unwrap().then(&w).unwrap().then(&w).unwrap();
        assert_abs_diff_eq!((w4.matrix() - DMatrix::identity(2, 2)).amax(), 0.0);
        assert!(w.deviation() < 1e-15);
    }

    #[test]
    fn beam_splitter_arms() {
        let st = displaced("L", 1.0, 0.0).product(&displaced("M", 1.0, 0.0)).unwrap();
        let out = apply_unitary(&st, &beam_splitter("L", "M").unwrap()).unwrap();
        assert_abs_diff_eq!(out.mean()[0], 2.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(out.mean()[1], 0.0);
        assert_abs_diff_eq!(out.mean()[2], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.mean()[3], 0.0);
    }

    #[test]
    fn beam_splitter_squared_is_signed_permutation() {
        let bs = beam_splitter("L", "M").unwrap();
        assert!(bs.deviation() < 1e-15);
        let sq = bs.then(&bs).unwrap();
        for v in sq.matrix().iter() {
            assert!(v.abs() < 1e-15 || (v.abs() - 1.0).abs() < 1e-15);
        }
        assert_abs_diff_eq!(sq.matrix().determinant().abs(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn beam_splitter_rejects_same_mode() {
        assert!(matches!(beam_splitter("L", "L"), Err(Error::SameMode(_))));
    }

    #[test]
    fn wave_plate_then_beam_splitter_matches_recombination() {
        // rows of the first port in the basis (x_L, p_L, x_M, p_M)
        let wp = wave_plate("M").embed(&["L".into(), "M".into()]).unwrap();
        let total = wp.then(&beam_splitter("L", "M").unwrap()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = total.matrix();
        assert_abs_diff_eq!(m.row(0).clone_owned(), nalgebra::RowDVector::from_vec(vec![s, 0.0, 0.0, s]));
        assert_abs_diff_eq!(m.row(1).clone_owned(), nalgebra::RowDVector::from_vec(vec![0.0, s, -s, 0.0]));
    }

    #[test]
    fn squeezer_cases() {
        let v = GaussianState::vacuum(["L"]);
        let id = squeezer("L", 0.0, SqueezeAxis::X).unwrap();
        assert_eq!(apply_unitary(&v, &id).unwrap(), v);

        // e^{2r} = sqrt 3
        let r = 3f64.ln() / 4.0;
        let out = apply_unitary(&v, &squeezer("L", r, SqueezeAxis::X).unwrap()).unwrap();
        assert_abs_diff_eq!(out.cov()[(0, 0)], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(out.cov()[(1, 1)], 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(out.cov().determinant(), 1.0, epsilon = 1e-14);

        assert!(squeezer("L", f64::NAN, SqueezeAxis::P).is_err());
    }

    #[test]
    fn rejects_non_symplectic() {
        let m = DMatrix::from_diagonal_element(2, 2, 2.0);
        assert!(matches!(SymplecticTransform::new(m, vec!["A".into()]), Err(Error::NotSymplectic { .. })));
        let m = DMatrix::identity(4, 4);
        assert!(matches!(
            SymplecticTransform::new(m, vec!["A".into()]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn apply_to_missing_mode_fails() {
        let v = GaussianState::vacuum(["L"]);
        assert!(matches!(apply_unitary(&v, &wave_plate("M")), Err(Error::UnknownMode(_))));
    }
}
