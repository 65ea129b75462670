use nalgebra::{DMatrix, DVector, Matrix2};

use super::{check_kappa, check_loss, readout_frame, vec2, ATOM, AUX, L, L_TILDE, M, M_TILDE, OUT};
use crate::gaussian::{
    added_noise, amplifier_channel, apply_channel, apply_unitary, beam_splitter, coherent_overlap, loss_channel,
    squeezer, wave_plate, GaussianChannel, GaussianState, ModeLabel, SqueezeAxis, SymplecticTransform,
    ThermalNoise,
};
use crate::{Error, Result};

fn modes() -> Vec<ModeLabel> {
    crate::gaussian::labels([L, L_TILDE, M, M_TILDE, ATOM])
}

fn light_modes() -> Vec<ModeLabel> {
    crate::gaussian::labels([L, L_TILDE, M, M_TILDE])
}

/// Lossless single passage of both beams through one ensemble.
///
/// Acts on `(L, L~, M, M~, A)`. The `x` rows of the flat modes and of the
/// atom follow the familiar QND input–output relations with the
/// `kappa^2` light–light cross terms mediated by the atom; the `x~` rows
/// carry the matching `±kappa^2/(2 sqrt 3)` terms that make the map
/// symplectic. Their remaining coupling to the quadratic temporal mode is
/// dropped here; it only involves `p` quadratures, which commute among
/// themselves, and never reaches the read-out ports.
pub fn single_cell_pass(kappa: f64) -> Result<SymplecticTransform> {
    check_kappa("kappa", kappa)?;
    let k2 = kappa * kappa;
    let c = k2 / (2.0 * 3f64.sqrt());
    let mut s = DMatrix::identity(10, 10);
    // x_L, x~_L
    s[(0, 9)] = kappa;
    s[(0, 5)] = -k2 / 2.0;
    s[(0, 7)] = -c;
    s[(2, 5)] = c;
    // x_M, x~_M
    s[(4, 8)] = kappa;
    s[(4, 1)] = k2 / 2.0;
    s[(4, 3)] = c;
    s[(6, 1)] = -c;
    // atom
    s[(8, 1)] = kappa;
    s[(9, 5)] = -kappa;
    SymplecticTransform::new(s, modes())
}

/// Wave plate on `m` followed by the balanced beam splitter on `(l, m)`.
pub fn recombination(l: impl Into<ModeLabel>, m: impl Into<ModeLabel>) -> Result<SymplecticTransform> {
    let (l, m) = (l.into(), m.into());
    let pair = vec![l.clone(), m.clone()];
    wave_plate(m.clone()).embed(&pair)?.then(&beam_splitter(l, m)?)
}

/// Interferes beams `L` and `M` and returns the `(out, aux)` ports.
pub fn recombine(state: &GaussianState) -> Result<(GaussianState, GaussianState)> {
    let mixed = apply_unitary(state, &recombination(L, M)?)?;
    let out = mixed.mode(&L.into())?.relabel(&L.into(), OUT)?;
    let aux = mixed.mode(&M.into())?.relabel(&M.into(), AUX)?;
    Ok((out, aux))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TildeSqueezing {
    /// `p~` squeezed with parameter `r`
    Finite(f64),
    /// zero-variance `p~` (idealized limit)
    Ideal,
}

/// State of the light modes entering the cell.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum InputSqueezing {
    #[default]
    Vacuum,
    /// every `x` quadrature squeezed by `r` (and `p` anti-squeezed)
    Uniform { r: f64 },
    /// `x_L`, `x_M` at physical variance `v` (minimum uncertainty), `p~_L`, `p~_M` squeezed
    Selective { v: f64, tilde: TildeSqueezing },
}

impl InputSqueezing {
    fn light_state(&self) -> Result<GaussianState> {
        let vac = GaussianState::vacuum(light_modes());
        match *self {
            InputSqueezing::Vacuum => Ok(vac),
            InputSqueezing::Uniform { r } => light_modes()
                .into_iter()
                .try_fold(vac, |st, m| apply_unitary(&st, &squeezer(m, r, SqueezeAxis::X)?)),
            InputSqueezing::Selective { v, tilde } => {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::InvalidParameter { name: "V", value: v, reason: "variance must be positive" });
                }
                // 2V = e^{-2r}
                let r = -0.5 * (2.0 * v).ln();
                let mut st = apply_unitary(&vac, &squeezer(L, r, SqueezeAxis::X)?)?;
                st = apply_unitary(&st, &squeezer(M, r, SqueezeAxis::X)?)?;
                match tilde {
                    TildeSqueezing::Finite(rt) => {
                        st = apply_unitary(&st, &squeezer(L_TILDE, rt, SqueezeAxis::P)?)?;
                        apply_unitary(&st, &squeezer(M_TILDE, rt, SqueezeAxis::P)?)
                    }
                    TildeSqueezing::Ideal => {
                        // x~ keeps a placeholder variance; it is never observed
                        let mut cov = st.cov().clone();
                        cov[(3, 3)] = 0.0;
                        cov[(7, 7)] = 0.0;
                        GaussianState::new_limit(st.labels().to_vec(), st.mean().clone(), cov)
                    }
                }
            }
        }
    }
}

/// Parameters of a single-cell read-out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleCellSpec {
    pub kappa: f64,
    /// loss per cell wall, applied on entry and on exit of both beams
    pub loss: f64,
    pub squeezing: InputSqueezing,
    /// phase-insensitive amplifier on the output port
    pub amp_gain: Option<f64>,
}

impl SingleCellSpec {
    pub fn lossless(kappa: f64) -> Self {
        SingleCellSpec { kappa, loss: 0.0, squeezing: InputSqueezing::Vacuum, amp_gain: None }
    }

    pub fn validate(&self) -> Result<()> {
        check_kappa("kappa", self.kappa)?;
        check_loss(self.loss)?;
        if let Some(g) = self.amp_gain {
            if !(g >= 1.0) || !g.is_finite() {
                return Err(Error::InvalidParameter { name: "G", value: g, reason: "gain must be finite and >= 1" });
            }
        }
        if let InputSqueezing::Uniform { r } | InputSqueezing::Selective { tilde: TildeSqueezing::Finite(r), .. } =
            self.squeezing
        {
            if !r.is_finite() {
                return Err(Error::InvalidParameter { name: "r", value: r, reason: "squeezing must be finite" });
            }
        }
        Ok(())
    }

    /// Whole read-out as one channel on `(L, L~, M, M~, A)`; `L` becomes the
    /// output port and `M` the auxiliary port.
    pub fn channel(&self) -> Result<GaussianChannel> {
        self.validate()?;
        let all = modes();
        // vacuum passes the entry wall unchanged, squeezed light does not
        let entry = loss_channel(self.loss, light_modes())?.embed(&all)?;
        let pass = GaussianChannel::from_unitary(&single_cell_pass(self.kappa)?);
        let exit = loss_channel(self.loss, light_modes())?.embed(&all)?;
        let mix = GaussianChannel::from_unitary(&recombination(L, M)?.embed(&all)?);
        let mut total = entry.then(&pass)?.then(&exit)?.then(&mix)?;
        if let Some(g) = self.amp_gain {
            total = total.then(&amplifier_channel(g, vec![L.into()])?.embed(&all)?)?;
        }
        Ok(total)
    }
}

/// Everything a read-out produces.
#[derive(Debug, Clone)]
pub struct ReadoutResult {
    pub spec: SingleCellSpec,
    /// atomic state before the read-out
    pub input: GaussianState,
    pub output: GaussianState,
    /// phase-conjugated clone in the unused beam-splitter port
    pub aux: GaussianState,
    /// atomic state left behind
    pub memory: GaussianState,
    /// added thermal photons of the output, for a coherent stored state
    pub nbar: f64,
    pub noise: ThermalNoise,
    /// overlap of the output with the stored coherent state in the read-out frame
    pub fidelity: f64,
    /// d(output mean)/d(atomic mean)
    pub gain: Matrix2<f64>,
    pub aux_gain: Matrix2<f64>,
    pub memory_gain: Matrix2<f64>,
    /// noise covariance added on top of the transferred atomic covariance
    pub output_noise: Matrix2<f64>,
    pub memory_noise: Matrix2<f64>,
    /// the composed channel on `(L, L~, M, M~, A)`
    pub channel: GaussianChannel,
}

fn block(m: &DMatrix<f64>, r: usize, c: usize) -> Matrix2<f64> {
    Matrix2::new(m[(r, c)], m[(r, c + 1)], m[(r + 1, c)], m[(r + 1, c + 1)])
}

/// Full single-cell read-out of the atomic state `atom` (a single mode).
pub fn single_cell_readout(spec: &SingleCellSpec, atom: &GaussianState) -> Result<ReadoutResult> {
    if atom.n_modes() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, actual: atom.n_modes() });
    }
    let channel = spec.channel()?;
    let input = atom.clone().relabel(&atom.labels()[0].clone(), ATOM)?;
    let light = spec.squeezing.light_state()?;
    let joint = light.product(&input)?;
    let after = apply_channel(&joint, &channel)?;

    // noise only: same channel with the atomic covariance switched off
    let mut quiet_cov = joint.cov().clone();
    quiet_cov.view_mut((8, 8), (2, 2)).fill(0.0);
    let quiet = GaussianState::new_limit(joint.labels().to_vec(), DVector::zeros(10), quiet_cov)?;
    let noise_cov = apply_channel(&quiet, &channel)?.cov().clone();

    let x = channel.x();
    let gain = block(x, 0, 8);
    let aux_gain = block(x, 4, 8);
    let memory_gain = block(x, 8, 8);
    let output_noise = block(&noise_cov, 0, 0);
    let memory_noise = block(&noise_cov, 8, 8);

    // n̄ refers to a coherent stored state: transferred vacuum plus added noise
    let coherent_out = GaussianState::new_limit(
        vec![OUT.into()],
        DVector::zeros(2),
        DMatrix::from_column_slice(2, 2, (gain * gain.transpose() + output_noise).as_slice()),
    )?;
    let noise = added_noise(&coherent_out, &OUT.into())?;

    let output = after.mode(&L.into())?.relabel(&L.into(), OUT)?;
    let aux = after.mode(&M.into())?.relabel(&M.into(), AUX)?;
    let memory = after.mode(&ATOM.into())?;

    let target = readout_frame() * vec2(input.mean());
    let out_cov = block(output.cov(), 0, 0);
    let fidelity = coherent_overlap(vec2(output.mean()), out_cov, target)?;

    Ok(ReadoutResult {
        spec: *spec,
        input,
        output,
        aux,
        memory,
        nbar: noise.nbar,
        noise,
        fidelity,
        gain,
        aux_gain,
        memory_gain,
        output_noise,
        memory_noise,
        channel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const S2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn pass_coefficients_at_unit_gain() {
        let s = single_cell_pass(S2).unwrap();
        let m = s.matrix();
        assert_abs_diff_eq!(m[(0, 9)], S2, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 5)], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 7)], -1.0 / 3f64.sqrt(), epsilon = 1e-15);
        for p_row in [1, 3, 5, 7] {
            for c in 0..10 {
                assert_eq!(m[(p_row, c)], if c == p_row { 1.0 } else { 0.0 });
            }
        }
        assert!(s.deviation() < 1e-12);
    }

    #[test]
    fn pass_is_symplectic_for_many_couplings() {
        for k in 0..50 {
            let kappa = 0.1 * k as f64;
            assert!(single_cell_pass(kappa).unwrap().deviation() < 1e-12);
        }
        assert!(single_cell_pass(-1.0).is_err());
    }

    #[test]
    fn recombine_vacuum_readout() {
        let joint = GaussianState::vacuum([L, L_TILDE, M, M_TILDE, ATOM]);
        let st = apply_unitary(&joint, &single_cell_pass(S2).unwrap()).unwrap();
        let (out, aux) = recombine(&st).unwrap();
        assert_abs_diff_eq!(out.mean().amax(), 0.0);
        assert_abs_diff_eq!(out.cov()[(0, 0)], 5.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.cov()[(1, 1)], 5.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.cov()[(0, 1)], 0.0, epsilon = 1e-14);
        assert_eq!(aux.labels()[0].as_str(), AUX);
    }

    #[test]
    fn recombine_maps_atomic_mean() {
        let light = GaussianState::vacuum([L, L_TILDE, M, M_TILDE]);
        let atom = GaussianState::new(vec![ATOM.into()], DVector::from_vec(vec![1.0, 0.0]), DMatrix::identity(2, 2))
            .unwrap();
        let st = apply_unitary(&light.product(&atom).unwrap(), &single_cell_pass(S2).unwrap()).unwrap();
        let (out, aux) = recombine(&st).unwrap();
        assert_abs_diff_eq!(out.mean()[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.mean()[1], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(aux.mean()[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(aux.mean()[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn recombine_needs_both_beams() {
        let st = GaussianState::vacuum([L, ATOM]);
        assert!(matches!(recombine(&st), Err(Error::UnknownMode(_))));
    }

    #[test]
    fn lossless_readout() {
        let r = single_cell_readout(&SingleCellSpec::lossless(S2), &GaussianState::vacuum([ATOM])).unwrap();
        assert_abs_diff_eq!(r.nbar, 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.fidelity, 0.75, epsilon = 1e-14);
        assert_abs_diff_eq!((r.gain - readout_frame()).amax(), 0.0, epsilon = 1e-15);
        // x_A + sqrt2 p_L, p_A - sqrt2 p_M with vacuum light
        assert_abs_diff_eq!((r.memory.cov() - DMatrix::from_diagonal_element(2, 2, 3.0)).amax(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn lossy_unit_gain_readout() {
        let a: f64 = 0.5;
        let spec = SingleCellSpec { kappa: (2.0 / (1.0 - a)).sqrt(), loss: a, ..SingleCellSpec::lossless(0.0) };
        let r = single_cell_readout(&spec, &GaussianState::vacuum([ATOM])).unwrap();
        assert_abs_diff_eq!(r.nbar, 2.0 / 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(r.fidelity, 0.6, epsilon = 1e-13);
    }

    #[test]
    fn spec_validation() {
        let atom = GaussianState::vacuum([ATOM]);
        let bad_loss = SingleCellSpec { loss: 1.0, ..SingleCellSpec::lossless(S2) };
        assert!(single_cell_readout(&bad_loss, &atom).is_err());
        let bad_gain = SingleCellSpec { amp_gain: Some(0.5), ..SingleCellSpec::lossless(S2) };
        assert!(single_cell_readout(&bad_gain, &atom).is_err());
        let two_modes = GaussianState::vacuum(["A1", "A2"]);
        assert!(single_cell_readout(&SingleCellSpec::lossless(S2), &two_modes).is_err());
    }

    #[test]
    fn uniform_squeezing_readout() {
        let r = 3f64.ln() / 4.0;
        let spec = SingleCellSpec { squeezing: InputSqueezing::Uniform { r }, ..SingleCellSpec::lossless(S2) };
        let res = single_cell_readout(&spec, &GaussianState::vacuum([ATOM])).unwrap();
        assert_abs_diff_eq!(res.fidelity, 6.0 / (6.0 + 3f64.sqrt()), epsilon = 1e-14);
    }
}
