//! Time-sliced brute-force model of the light–atom interaction.
//!
//! Each beam is cut into `N` slices, each a canonical mode with vacuum
//! covariance `I`. Slice `k` meets the atoms at the midpoint `t_k` and
//! couples with `kappa/sqrt(N)`; the two beams act in a symmetric
//! half/full/half splitting, and in the two-cell geometry the Larmor
//! precession is split around every slice in the same way. Nothing about
//! the mode functions `f1`, `f3` or the sideband modes enters the dynamics;
//! they appear only when the slice transform is projected.
//!
//! The full `2(2N+n) x 2(2N+n)` matrix is never formed: only the handful of
//! phase-space vectors spanned by the tracked modes are pushed through the
//! slice updates.

mod projector;

use nalgebra::DMatrix;

pub use projector::{single_cell_projector, two_cell_projector, Projector};

use crate::gaussian::{symplectic_deviation, ModeLabel, SymplecticTransform};
use crate::protocols::{single_cell_pass, two_cell_relations};
use crate::{Error, Result};

/// Largest slice count for which [`SlicedSystem::to_dense`] builds the full matrix.
pub const DENSE_LIMIT: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleScheme {
    SingleCell,
    /// two cells precessing in opposite senses, `omega_t = Omega T`
    TwoCell { omega_t: f64 },
}

impl OracleScheme {
    /// Default slice count: exact-enough for one cell, 100 per unit of `Omega T` for two.
    pub fn default_slices(&self) -> usize {
        match *self {
            OracleScheme::SingleCell => 10_000,
            OracleScheme::TwoCell { omega_t } => (100.0 * omega_t).ceil() as usize,
        }
    }

    fn atoms(&self) -> usize {
        match self {
            OracleScheme::SingleCell => 1,
            OracleScheme::TwoCell { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    /// `v[target] += coef * v[source]`
    Shear { target: usize, source: usize, coef: f64 },
    /// `(x, p) <- (c x + s p, -s x + c p)` on the pair starting at `x`
    Rotate { x: usize, cos: f64, sin: f64 },
}

impl Op {
    fn apply(&self, v: &mut [f64]) {
        match *self {
            Op::Shear { target, source, coef } => v[target] += coef * v[source],
            Op::Rotate { x, cos, sin } => {
                let (a, b) = (v[x], v[x + 1]);
                v[x] = cos * a + sin * b;
                v[x + 1] = -sin * a + cos * b;
            }
        }
    }

    fn apply_transposed(&self, v: &mut [f64]) {
        match *self {
            Op::Shear { target, source, coef } => v[source] += coef * v[target],
            Op::Rotate { x, cos, sin } => {
                let (a, b) = (v[x], v[x + 1]);
                v[x] = cos * a - sin * b;
                v[x + 1] = sin * a + cos * b;
            }
        }
    }
}

/// Slice-discretized read-out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicedSystem {
    scheme: OracleScheme,
    kappa: f64,
    slices: usize,
}

impl SlicedSystem {
    pub fn new(scheme: OracleScheme, kappa: f64, slices: usize) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidParameter { name: "kappa", value: kappa, reason: "coupling must be finite and >= 0" });
        }
        if slices == 0 {
            return Err(Error::InvalidParameter { name: "N", value: 0.0, reason: "need at least one slice" });
        }
        if let OracleScheme::TwoCell { omega_t } = scheme {
            if !(omega_t > 0.0) || !omega_t.is_finite() {
                return Err(Error::InvalidParameter { name: "OmegaT", value: omega_t, reason: "must be positive" });
            }
        }
        Ok(SlicedSystem { scheme, kappa, slices })
    }

    pub fn single_cell(kappa: f64, slices: usize) -> Result<Self> {
        Self::new(OracleScheme::SingleCell, kappa, slices)
    }

    pub fn two_cell(kappa: f64, slices: usize, omega_t: f64) -> Result<Self> {
        Self::new(OracleScheme::TwoCell { omega_t }, kappa, slices)
    }

    pub fn scheme(&self) -> OracleScheme {
        self.scheme
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn slices(&self) -> usize {
        self.slices
    }

    pub fn slice_coupling(&self) -> f64 {
        self.kappa / (self.slices as f64).sqrt()
    }

    /// Phase-space dimension: `2N` slices of each beam plus the atoms.
    pub fn dim(&self) -> usize {
        2 * (2 * self.slices + self.scheme.atoms())
    }

    pub(crate) fn x_l(&self, k: usize) -> usize {
        2 * k
    }

    pub(crate) fn x_m(&self, k: usize) -> usize {
        2 * (self.slices + k)
    }

    pub(crate) fn x_atom(&self, j: usize) -> usize {
        2 * (2 * self.slices + j)
    }

    /// Mode labels in phase-space order: `L0.., M0.., A` (or `A1, A2`).
    pub fn labels(&self) -> Vec<ModeLabel> {
        let n = self.slices;
        let mut out: Vec<ModeLabel> = (0..n).map(|k| format!("L{k}").into()).collect();
        out.extend((0..n).map(|k| ModeLabel::from(format!("M{k}"))));
        match self.scheme {
            OracleScheme::SingleCell => out.push("A".into()),
            OracleScheme::TwoCell { .. } => out.extend(["A1".into(), "A2".into()]),
        }
        out
    }

    fn couple(&self, k: usize, atom: usize, ops: &mut Vec<Op>) {
        let ks = self.slice_coupling();
        let (xl, xm, xa) = (self.x_l(k), self.x_m(k), self.x_atom(atom));
        let half_m = |ops: &mut Vec<Op>| {
            ops.push(Op::Shear { target: xm, source: xa, coef: 0.5 * ks });
            ops.push(Op::Shear { target: xa + 1, source: xm + 1, coef: -0.5 * ks });
        };
        half_m(ops);
        ops.push(Op::Shear { target: xl, source: xa + 1, coef: ks });
        ops.push(Op::Shear { target: xa, source: xl + 1, coef: ks });
        half_m(ops);
    }

    fn larmor(&self, angle: f64, ops: &mut Vec<Op>) {
        // cell 1: dx/dt = Omega p; cell 2 turns the other way
        let (s, c) = angle.sin_cos();
        ops.push(Op::Rotate { x: self.x_atom(0), cos: c, sin: s });
        ops.push(Op::Rotate { x: self.x_atom(1), cos: c, sin: -s });
    }

    fn slice_ops(&self, k: usize, ops: &mut Vec<Op>) {
        ops.clear();
        match self.scheme {
            OracleScheme::SingleCell => self.couple(k, 0, ops),
            OracleScheme::TwoCell { omega_t } => {
                let half = 0.5 * omega_t / self.slices as f64;
                self.larmor(half, ops);
                // the two cells act on disjoint atomic variables and commute
                self.couple(k, 0, ops);
                self.couple(k, 1, ops);
                self.larmor(half, ops);
            }
        }
    }

    /// Return to the frame co-rotating with each ensemble.
    fn final_ops(&self, ops: &mut Vec<Op>) {
        ops.clear();
        if let OracleScheme::TwoCell { omega_t } = self.scheme {
            self.larmor(-omega_t, ops);
        }
    }

    fn check_len(&self, vs: &[Vec<f64>]) -> Result<()> {
        match vs.iter().find(|v| v.len() != self.dim()) {
            Some(v) => Err(Error::DimensionMismatch { expected: self.dim(), actual: v.len() }),
            None => Ok(()),
        }
    }

    /// Replaces every `v` with `S v`.
    pub fn propagate(&self, vs: &mut [Vec<f64>]) -> Result<()> {
        self.check_len(vs)?;
        let mut ops = Vec::with_capacity(32);
        for k in 0..self.slices {
            self.slice_ops(k, &mut ops);
            for op in &ops {
                vs.iter_mut().for_each(|v| op.apply(v));
            }
        }
        self.final_ops(&mut ops);
        for op in &ops {
            vs.iter_mut().for_each(|v| op.apply(v));
        }
        Ok(())
    }

    /// Replaces every `w` with `S^T w`.
    pub fn propagate_transposed(&self, ws: &mut [Vec<f64>]) -> Result<()> {
        self.check_len(ws)?;
        let mut ops = Vec::with_capacity(32);
        self.final_ops(&mut ops);
        for op in ops.iter().rev() {
            ws.iter_mut().for_each(|w| op.apply_transposed(w));
        }
        for k in (0..self.slices).rev() {
            self.slice_ops(k, &mut ops);
            for op in ops.iter().rev() {
                ws.iter_mut().for_each(|w| op.apply_transposed(w));
            }
        }
        Ok(())
    }

    /// The whole sliced transform; only for small `N`.
    pub fn to_dense(&self) -> Result<SymplecticTransform> {
        if self.slices > DENSE_LIMIT {
            return Err(Error::Unsupported(format!("dense transform limited to {DENSE_LIMIT} slices")));
        }
        let d = self.dim();
        let mut cols: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                e
            })
            .collect();
        self.propagate(&mut cols)?;
        let m = DMatrix::from_fn(d, d, |r, c| cols[c][r]);
        SymplecticTransform::new(m, self.labels())
    }

    /// Analytic map the projected oracle should approach.
    pub fn reference(&self) -> Result<SymplecticTransform> {
        match self.scheme {
            OracleScheme::SingleCell => single_cell_pass(self.kappa),
            OracleScheme::TwoCell { .. } => two_cell_relations(self.kappa),
        }
    }

    /// Projector onto the modes of [`Self::reference`].
    pub fn default_projector(&self) -> Result<Projector> {
        match self.scheme {
            OracleScheme::SingleCell => single_cell_projector(self),
            OracleScheme::TwoCell { omega_t } => two_cell_projector(self, omega_t),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sliced transform restricted to a set of tracked modes.
#[derive(Debug, Clone)]
pub struct Projection {
    pub labels: Vec<ModeLabel>,
    /// `C S C^T`
    pub reduced: DMatrix<f64>,
    /// `|(I - C^T C) S C^T|_F`: tracked inputs ending up in untracked outputs
    pub leakage_out: f64,
    /// `|C S (I - C^T C)|_F`: untracked inputs reaching tracked outputs
    pub leakage_in: f64,
    pub symplectic_deviation: f64,
}

impl Projection {
    /// The reduced map as a transform; fails when leakage breaks symplecticity.
    pub fn transform(&self) -> Result<SymplecticTransform> {
        SymplecticTransform::new(self.reduced.clone(), self.labels.clone())
    }
}

fn residual_norm(v: &[f64], basis: &[Vec<f64>], coefs: impl Fn(usize) -> f64) -> f64 {
    let mut r = v.to_vec();
    for (j, b) in basis.iter().enumerate() {
        let c = coefs(j);
        r.iter_mut().zip(b).for_each(|(ri, bi)| *ri -= c * bi);
    }
    dot(&r, &r)
}

pub fn project(system: &SlicedSystem, projector: &Projector) -> Result<Projection> {
    let rows = projector.rows();
    if rows.first().map(Vec::len) != Some(system.dim()) {
        return Err(Error::DimensionMismatch { expected: system.dim(), actual: rows.first().map_or(0, Vec::len) });
    }
    let m = rows.len();

    let mut cols = rows.to_vec();
    system.propagate(&mut cols)?;
    let reduced = DMatrix::from_fn(m, m, |r, c| dot(&rows[r], &cols[c]));
    let leakage_out = (0..m).map(|c| residual_norm(&cols[c], rows, |j| reduced[(j, c)])).sum::<f64>().sqrt();

    let mut back = rows.to_vec();
    system.propagate_transposed(&mut back)?;
    let leakage_in = (0..m).map(|r| residual_norm(&back[r], rows, |j| reduced[(r, j)])).sum::<f64>().sqrt();

    Ok(Projection {
        labels: projector.labels().to_vec(),
        symplectic_deviation: symplectic_deviation(&reduced),
        reduced,
        leakage_out,
        leakage_in,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub slices: usize,
    /// max-abs entry of (projected oracle - analytic map)
    pub deviation: f64,
    /// same, over the entries where the analytic map is nonzero
    pub coupling_deviation: f64,
    /// largest entry where the analytic map is zero
    pub crosstalk: f64,
    pub leakage_out: f64,
    pub leakage_in: f64,
    pub symplectic_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub scheme: OracleScheme,
    pub kappa: f64,
    pub rows: Vec<ConvergenceRow>,
    /// `-d log(deviation) / d log N` from a least-squares fit; `None` when the
    /// deviations are at rounding level or fewer than two are usable
    pub order: Option<f64>,
    /// deviations strictly decrease with `N`
    pub monotone: bool,
}

impl ConvergenceReport {
    pub fn final_deviation(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.deviation)
    }
}

/// Noise floor below which a deviation is treated as exact.
const ROUNDING_FLOOR: f64 = 1e-13;

fn fit_order(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(_, d)| *d > ROUNDING_FLOOR).map(|&(n, d)| (n.ln(), d.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(-sxy / sxx)
}

pub fn convergence_report(scheme: OracleScheme, kappa: f64, ns: &[usize]) -> Result<ConvergenceReport> {
    if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Unsupported("slice counts must be non-empty and strictly increasing".into()));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let system = SlicedSystem::new(scheme, kappa, n)?;
        let p = project(&system, &system.default_projector()?)?;
        let reference = system.reference()?;
        let diff = &p.reduced - reference.matrix();
        let (mut coupling_deviation, mut crosstalk) = (0.0f64, 0.0f64);
        for (d, r) in diff.iter().zip(reference.matrix().iter()) {
            if *r != 0.0 {
                coupling_deviation = coupling_deviation.max(d.abs());
            } else {
                crosstalk = crosstalk.max(d.abs());
            }
        }
        rows.push(ConvergenceRow {
            slices: n,
            deviation: diff.amax(),
            coupling_deviation,
            crosstalk,
            leakage_out: p.leakage_out,
            leakage_in: p.leakage_in,
            symplectic_deviation: p.symplectic_deviation,
        });
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.slices as f64, r.deviation)).collect();
    let monotone = rows.windows(2).all(|w| w[1].deviation < w[0].deviation || w[0].deviation <= ROUNDING_FLOOR);
    Ok(ConvergenceReport { scheme, kappa, order: fit_order(&points), monotone, rows })
}
