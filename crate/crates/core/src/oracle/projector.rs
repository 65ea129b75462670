use std::f64::consts::FRAC_1_SQRT_2;

use super::{dot, SlicedSystem};
use crate::gaussian::ModeLabel;
use crate::protocols::{ATOM, L, L_TILDE, M, M_TILDE, SIDEBAND_MODES};
use crate::temporal::{mode_projector, orthogonalize, profile, ProfileKind};
use crate::{Error, Result};

const ORTHONORMAL_TOL: f64 = 1e-10;

/// Orthonormal phase-space vectors `(x, p)` for each tracked mode.
#[derive(Debug, Clone)]
pub struct Projector {
    labels: Vec<ModeLabel>,
    rows: Vec<Vec<f64>>,
}

impl Projector {
    /// `rows` holds the `x` and `p` vector of every label in turn.
    pub fn new(labels: Vec<ModeLabel>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != 2 * labels.len() {
            return Err(Error::DimensionMismatch { expected: 2 * labels.len(), actual: rows.len() });
        }
        let mut deviation: f64 = 0.0;
        for (i, a) in rows.iter().enumerate() {
            for (j, b) in rows.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                deviation = deviation.max((dot(a, b) - target).abs());
            }
        }
        if deviation > ORTHONORMAL_TOL {
            return Err(Error::NonOrthonormalProjectors { deviation });
        }
        Ok(Projector { labels, rows })
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

/// `(x, p)` vectors of a light mode with slice coefficients `c` on the beam whose slice `k` starts at `x_of(k)`.
fn light_rows(system: &SlicedSystem, c: &[f64], x_of: impl Fn(usize) -> usize) -> [Vec<f64>; 2] {
    let mut x = vec![0.0; system.dim()];
    let mut p = vec![0.0; system.dim()];
    for (k, ck) in c.iter().enumerate() {
        x[x_of(k)] = *ck;
        p[x_of(k) + 1] = *ck;
    }
    [x, p]
}

/// Atomic `(x, p)` vectors for the combination `sum_j w_j A_j`.
fn atom_rows(system: &SlicedSystem, weights: &[f64]) -> [Vec<f64>; 2] {
    let mut x = vec![0.0; system.dim()];
    let mut p = vec![0.0; system.dim()];
    for (j, w) in weights.iter().enumerate() {
        x[system.x_atom(j)] = *w;
        p[system.x_atom(j) + 1] = *w;
    }
    [x, p]
}

/// Flat and odd modes of both beams plus the atom, ordered `(L, L~, M, M~, A)`.
pub fn single_cell_projector(system: &SlicedSystem) -> Result<Projector> {
    let n = system.slices();
    let flat = mode_projector(&profile(ProfileKind::Flat, n)?, n)?;
    let odd = if n >= 2 { mode_projector(&profile(ProfileKind::Odd, n)?, n)? } else { Vec::new() };
    if odd.is_empty() {
        return Err(Error::Unsupported("the odd mode needs at least two slices".into()));
    }
    let mut rows = Vec::with_capacity(10);
    rows.extend(light_rows(system, &flat, |k| system.x_l(k)));
    rows.extend(light_rows(system, &odd, |k| system.x_l(k)));
    rows.extend(light_rows(system, &flat, |k| system.x_m(k)));
    rows.extend(light_rows(system, &odd, |k| system.x_m(k)));
    rows.extend(atom_rows(system, &[1.0]));
    Projector::new(crate::gaussian::labels([L, L_TILDE, M, M_TILDE, ATOM]), rows)
}

/// Cosine, sine and odd-envelope sideband modes of both beams plus the sum
/// and difference atomic modes, in the order of [`SIDEBAND_MODES`].
///
/// The four carriers are not exactly orthogonal at finite `Omega T`; they
/// are Gram–Schmidt orthonormalized in the order `C, S, ~C, ~S`.
pub fn two_cell_projector(system: &SlicedSystem, omega_t: f64) -> Result<Projector> {
    let n = system.slices();
    let cos = profile(ProfileKind::Cosine { omega_t }, n)?;
    let sin = profile(ProfileKind::Sine { omega_t }, n)?;
    let odd = profile(ProfileKind::Odd, n)?;
    let set = [cos.clone(), sin.clone(), odd.modulate(&cos)?, odd.modulate(&sin)?];
    let basis = orthogonalize(&set)?.basis;
    let c: Vec<Vec<f64>> = basis.iter().map(|b| mode_projector(b, n)).collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(20);
    // LC, LS, MC, MS
    rows.extend(light_rows(system, &c[0], |k| system.x_l(k)));
    rows.extend(light_rows(system, &c[1], |k| system.x_l(k)));
    rows.extend(light_rows(system, &c[0], |k| system.x_m(k)));
    rows.extend(light_rows(system, &c[1], |k| system.x_m(k)));
    // L~C, L~S, M~C, M~S
    rows.extend(light_rows(system, &c[2], |k| system.x_l(k)));
    rows.extend(light_rows(system, &c[3], |k| system.x_l(k)));
    rows.extend(light_rows(system, &c[2], |k| system.x_m(k)));
    rows.extend(light_rows(system, &c[3], |k| system.x_m(k)));
    rows.extend(atom_rows(system, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]));
    rows.extend(atom_rows(system, &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]));
    Projector::new(crate::gaussian::labels(SIDEBAND_MODES), rows)
}
