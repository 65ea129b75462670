use nalgebra::{DMatrix, Matrix2, Matrix4};

use super::{check_kappa, check_loss, readout_frame, recombination, vec2};
use crate::gaussian::{added_noise, apply_unitary, coherent_overlap, labels, GaussianState, ModeLabel, SymplecticTransform};
use crate::{Error, Result};

/// Sideband modes of the two-cell scheme, in the order used by [`two_cell_relations`].
///
/// `C`/`S` are the cosine and sine modes at the Larmor frequency, `~` marks
/// the odd temporal envelope and `A+`/`A-` the sum and difference of the two
/// atomic spins.
pub const SIDEBAND_MODES: [&str; 10] = ["LC", "LS", "MC", "MS", "L~C", "L~S", "M~C", "M~S", "A+", "A-"];

/// Two oppositely precessing cells crossed by both beams, in the sideband limit.
///
/// Cosine sidebands couple to the sum mode exactly as the single-cell beams
/// couple to the one ensemble; sine sidebands couple to the difference mode
/// with the signs flipped on `x_L^S` and `p_A-`.
pub fn two_cell_relations(kappa: f64) -> Result<SymplecticTransform> {
    check_kappa("kappa", kappa)?;
    let k2 = kappa * kappa;
    let c = k2 / (2.0 * 3f64.sqrt());
    let (lc, ls, mc, ms, tlc, tls, tmc, tms, ap, am) = (0, 2, 4, 6, 8, 10, 12, 14, 16, 18);
    let mut s = DMatrix::identity(20, 20);
    // cosine sector <-> A+
    s[(lc, ap + 1)] = kappa;
    s[(lc, mc + 1)] = -k2 / 2.0;
    s[(lc, tmc + 1)] = -c;
    s[(mc, ap)] = kappa;
    s[(mc, lc + 1)] = k2 / 2.0;
    s[(mc, tlc + 1)] = c;
    s[(tlc, mc + 1)] = c;
    s[(tmc, lc + 1)] = -c;
    s[(ap, lc + 1)] = kappa;
    s[(ap + 1, mc + 1)] = -kappa;
    // sine sector <-> A-
    s[(ls, am)] = -kappa;
    s[(ls, ms + 1)] = -k2 / 2.0;
    s[(ls, tms + 1)] = -c;
    s[(ms, am + 1)] = kappa;
    s[(ms, ls + 1)] = k2 / 2.0;
    s[(ms, tls + 1)] = c;
    s[(tls, ms + 1)] = c;
    s[(tms, ls + 1)] = -c;
    s[(am, ms + 1)] = kappa;
    s[(am + 1, ls + 1)] = kappa;
    SymplecticTransform::new(s, labels(SIDEBAND_MODES))
}

/// Lossless two-cell read-out into the cosine (`C`) and sine (`S`) output modes.
#[derive(Debug, Clone)]
pub struct SidebandReadout {
    pub cosine: GaussianState,
    pub sine: GaussianState,
    pub nbar_cosine: f64,
    pub nbar_sine: f64,
    pub fidelity_cosine: f64,
    pub fidelity_sine: f64,
    /// rows `(x^C, p^C, x^S, p^S)`, columns `(x_A+, p_A+, x_A-, p_A-)`
    pub gain: Matrix4<f64>,
}

/// Frame of the sine output at unit gain: `x^S = -x_A-`, `p^S = -p_A-`.
fn sine_frame() -> Matrix2<f64> {
    -Matrix2::identity()
}

pub fn sideband_readout(kappa: f64, atoms: &GaussianState) -> Result<SidebandReadout> {
    let atom_labels: Vec<ModeLabel> = labels(["A+", "A-"]);
    let atoms = atoms.reduce(&atom_labels)?;
    let all = labels(SIDEBAND_MODES);
    let total = two_cell_relations(kappa)?
        .then(&recombination("LC", "MC")?.embed(&all)?)?
        .then(&recombination("LS", "MS")?.embed(&all)?)?;

    let light = GaussianState::vacuum(all[..8].to_vec());
    let run = |atoms: &GaussianState| -> Result<GaussianState> {
        apply_unitary(&light.product(atoms)?, &total)
    };
    let after = run(&atoms)?;
    let after_vac = run(&GaussianState::vacuum(atom_labels.clone()))?;

    let x = total.matrix();
    let gain = Matrix4::from_fn(|r, c| x[(r, 16 + c)]);
    let cosine = after.mode(&"LC".into())?.relabel(&"LC".into(), "C")?;
    let sine = after.mode(&"LS".into())?.relabel(&"LS".into(), "S")?;
    let nbar_cosine = added_noise(&after_vac, &"LC".into())?.nbar;
    let nbar_sine = added_noise(&after_vac, &"LS".into())?.nbar;

    let am = atoms.mean();
    let plus = vec2(&am.rows(0, 2).into_owned());
    let minus = vec2(&am.rows(2, 2).into_owned());
    let cov2 = |s: &GaussianState| Matrix2::new(s.cov()[(0, 0)], s.cov()[(0, 1)], s.cov()[(1, 0)], s.cov()[(1, 1)]);
    let fidelity_cosine = coherent_overlap(vec2(cosine.mean()), cov2(&cosine), readout_frame() * plus)?;
    let fidelity_sine = coherent_overlap(vec2(sine.mean()), cov2(&sine), sine_frame() * minus)?;

    Ok(SidebandReadout { cosine, sine, nbar_cosine, nbar_sine, fidelity_cosine, fidelity_sine, gain })
}

/// Couplings and wall loss of the lossy two-cell scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoCellSpec {
    pub kappa1: f64,
    pub kappa2: f64,
    pub loss: f64,
}

impl TwoCellSpec {
    /// Couplings giving unit gain and no cosine/difference-mode cross-talk:
    /// `kappa1 = sqrt(2/(1-A)^3)`, `kappa2 = sqrt(2/(1-A))`.
    pub fn unit_gain(loss: f64) -> Result<Self> {
        check_loss(loss)?;
        let t = 1.0 - loss;
        Ok(TwoCellSpec { kappa1: (2.0 / (t * t * t)).sqrt(), kappa2: (2.0 / t).sqrt(), loss })
    }

    pub fn validate(&self) -> Result<()> {
        check_kappa("kappa1", self.kappa1)?;
        check_kappa("kappa2", self.kappa2)?;
        check_loss(self.loss)
    }
}

#[derive(Debug, Clone)]
pub struct TwoCellResult {
    /// covariance of `(x_L^C, p_M^C, p_L^S, p~_L^S, p~_M^C, p_A1, p_A2)` after both cells
    pub gamma: DMatrix<f64>,
    pub nbar: f64,
    pub fidelity: f64,
    /// `Some(kappa2/kappa1)` when it differs from `1 - A`, i.e. the gain is not unity
    pub ratio_mismatch: Option<f64>,
}

/// Coupling matrix of the first cell on the reduced quadrature vector.
pub fn two_cell_first_pass(kappa1: f64) -> DMatrix<f64> {
    let k2 = kappa1 * kappa1;
    let r3 = 3f64.sqrt();
    let k = kappa1 / std::f64::consts::SQRT_2;
    let mut s = DMatrix::identity(7, 7);
    s[(0, 1)] = -k2 / 4.0;
    s[(0, 2)] = k2 / 4.0;
    s[(0, 3)] = k2 / (4.0 * r3);
    s[(0, 4)] = -k2 / (4.0 * r3);
    s[(0, 5)] = k;
    s[(5, 1)] = -k;
    s[(5, 2)] = k;
    s
}

/// Coupling matrix of the second cell on the reduced quadrature vector.
pub fn two_cell_second_pass(kappa2: f64) -> DMatrix<f64> {
    let k2 = kappa2 * kappa2;
    let r3 = 3f64.sqrt();
    let k = kappa2 / std::f64::consts::SQRT_2;
    let mut s = DMatrix::identity(7, 7);
    s[(0, 1)] = -k2 / 4.0;
    s[(0, 2)] = -k2 / 4.0;
    s[(0, 3)] = -k2 / (4.0 * r3);
    s[(0, 4)] = -k2 / (4.0 * r3);
    s[(0, 6)] = k;
    s[(6, 1)] = -k;
    s[(6, 2)] = -k;
    s
}

/// Lossy two-cell read-out on the seven quadratures that matter.
///
/// The reduced vector mixes quadratures of different modes and is not a
/// phase space, so the matrices act by plain congruence. The wall
/// bookkeeping is: one wall after the first cell, then a wall on each side
/// of the second. No loss is applied before the first cell.
pub fn two_cell_pipeline(spec: &TwoCellSpec) -> Result<TwoCellResult> {
    spec.validate()?;
    let a = spec.loss;
    let mut sa = DMatrix::identity(7, 7);
    let mut g = DMatrix::zeros(7, 7);
    for i in 0..5 {
        sa[(i, i)] = (1.0 - a).sqrt();
        g[(i, i)] = a;
    }
    let s1 = two_cell_first_pass(spec.kappa1);
    let s2 = two_cell_second_pass(spec.kappa2);
    let wall = |gamma: &DMatrix<f64>| &sa * gamma * sa.transpose() + &g;

    let gamma_in = DMatrix::<f64>::identity(7, 7);
    let gamma1 = wall(&(&s1 * &gamma_in * s1.transpose()));
    let gamma2 = wall(&(&s2 * wall(&gamma1) * s2.transpose()));

    let nbar = 0.25 * (gamma2[(0, 0)] + gamma2[(1, 1)] + 2.0 * gamma2[(0, 1)]) - 0.5;
    if nbar < -crate::gaussian::CP_TOL {
        return Err(Error::NegativeNoise { nbar });
    }
    let ratio = if spec.kappa1 > 0.0 { spec.kappa2 / spec.kappa1 } else { f64::INFINITY };
    let ratio_mismatch = ((ratio - (1.0 - a)).abs() > 1e-12).then_some(ratio);
    Ok(TwoCellResult { gamma: gamma2, nbar, fidelity: 1.0 / (1.0 + nbar), ratio_mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    const S2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn relations_are_symplectic() {
        for k in 0..30 {
            assert!(two_cell_relations(0.15 * k as f64).unwrap().deviation() < 1e-12);
        }
    }

    #[test]
    fn sideband_unit_gain() {
        let atoms = GaussianState::new(
            labels(["A+", "A-"]),
            DVector::from_vec(vec![0.3, -1.2, 0.7, 2.0]),
            DMatrix::identity(4, 4),
        )
        .unwrap();
        let r = sideband_readout(S2, &atoms).unwrap();
        // x^C = p_A+, p^C = -x_A+, x^S = -x_A-, p^S = -p_A-
        assert_abs_diff_eq!(r.cosine.mean()[0], -1.2, epsilon = 1e-14);
        assert_abs_diff_eq!(r.cosine.mean()[1], -0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(r.sine.mean()[0], -0.7, epsilon = 1e-14);
        assert_abs_diff_eq!(r.sine.mean()[1], -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.nbar_cosine, 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.nbar_sine, 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.fidelity_cosine, 0.75, epsilon = 1e-14);
        assert_abs_diff_eq!(r.fidelity_sine, 0.75, epsilon = 1e-14);
        let expected = Matrix4::new(
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, -1.0, 0.0, //
            0.0, 0.0, 0.0, -1.0,
        );
        assert_abs_diff_eq!((r.gain - expected).amax(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn first_pass_on_vacuum() {
        let s1 = two_cell_first_pass(S2);
        let g1 = &s1 * s1.transpose();
        assert_abs_diff_eq!(g1[(0, 0)], 8.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn lossless_pipeline_is_plain_product() {
        let spec = TwoCellSpec::unit_gain(0.0).unwrap();
        let r = two_cell_pipeline(&spec).unwrap();
        let s = two_cell_second_pass(S2) * two_cell_first_pass(S2);
        assert_abs_diff_eq!((&r.gamma - &s * s.transpose()).amax(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.nbar, 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.fidelity, 0.75, epsilon = 1e-14);
        assert!(r.ratio_mismatch.is_none());
    }

    #[test]
    fn lossy_pipeline_point() {
        let r = two_cell_pipeline(&TwoCellSpec::unit_gain(0.1).unwrap()).unwrap();
        assert_abs_diff_eq!(r.nbar, 0.905 / 2.187, epsilon = 1e-13);
        assert_abs_diff_eq!(r.fidelity, 2.187 / (2.187 + 0.905), epsilon = 1e-13);
    }

    #[test]
    fn ratio_mismatch_is_flagged_not_fatal() {
        let r = two_cell_pipeline(&TwoCellSpec { kappa1: S2, kappa2: S2, loss: 0.1 }).unwrap();
        assert_eq!(r.ratio_mismatch, Some(1.0));
        assert!(two_cell_pipeline(&TwoCellSpec { kappa1: S2, kappa2: S2, loss: 1.0 }).is_err());
    }
}
