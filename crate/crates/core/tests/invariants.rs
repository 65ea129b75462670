use approx::assert_abs_diff_eq;
use memread_core::gaussian::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn rotation(label: &str, theta: f64) -> SymplecticTransform {
    let (s, c) = theta.sin_cos();
    SymplecticTransform::new(DMatrix::from_row_slice(2, 2, &[c, s, -s, c]), vec![label.into()]).unwrap()
}

/// A valid single-mode state: thermal, squeezed and rotated.
fn mixed_state(label: &str, nbar: f64, r: f64, theta: f64, x: f64, p: f64) -> GaussianState {
    let thermal = GaussianState::new(
        vec![label.into()],
        DVector::from_vec(vec![x, p]),
        DMatrix::from_diagonal_element(2, 2, 1.0 + 2.0 * nbar),
    )
    .unwrap();
    let sq = apply_unitary(&thermal, &squeezer(label, r, SqueezeAxis::X).unwrap()).unwrap();
    apply_unitary(&sq, &rotation(label, theta)).unwrap()
}

proptest! {
    #[test]
    fn losses_compose(a1 in 0.0..=1.0f64, a2 in 0.0..=1.0f64, nbar in 0.0..5.0f64, r in -1.5..1.5f64,
                      theta in 0.0..6.3f64, x in -4.0..4.0f64, p in -4.0..4.0f64) {
        let st = mixed_state("m", nbar, r, theta, x, p).product(&GaussianState::vacuum(["spectator"])).unwrap();
        let two = apply_channel(&apply_channel(&st, &loss_channel(a1, vec!["m".into()]).unwrap()).unwrap(),
                                &loss_channel(a2, vec!["m".into()]).unwrap()).unwrap();
        let one = apply_channel(&st, &loss_channel(1.0 - (1.0 - a1) * (1.0 - a2), vec!["m".into()]).unwrap()).unwrap();
        prop_assert!((two.cov() - one.cov()).amax() <= 1e-12);
        prop_assert!((two.mean() - one.mean()).amax() <= 1e-12);
        let spectator = two.reduce(&["spectator".into()]).unwrap();
        prop_assert_eq!(spectator.cov(), &DMatrix::identity(2, 2));
    }

    #[test]
    fn fidelity_is_rotation_invariant(nbar in 0.0..3.0f64, r in -1.0..1.0f64, theta in 0.0..6.3f64,
                                       x in -3.0..3.0f64, p in -3.0..3.0f64, tx in -3.0..3.0f64,
                                       tp in -3.0..3.0f64, phi in 0.0..6.3f64) {
        let st = mixed_state("m", nbar, r, theta, x, p);
        let f = fidelity_coherent(&st, &"m".into(), [tx, tp]).unwrap();
        let rot = rotation("m", phi);
        let st_rot = apply_unitary(&st, &rot).unwrap();
        let t = rot.matrix() * DVector::from_vec(vec![tx, tp]);
        let f_rot = fidelity_coherent(&st_rot, &"m".into(), [t[0], t[1]]).unwrap();
        prop_assert!((f - f_rot).abs() <= 1e-12);
        prop_assert!(f > 0.0 && f <= 1.0 + 1e-12);
    }

    #[test]
    fn elementary_maps_are_symplectic(r in -3.0..3.0f64) {
        let modes: Vec<ModeLabel> = vec!["a".into(), "b".into(), "c".into()];
        for axis in [SqueezeAxis::X, SqueezeAxis::P] {
            let s = squeezer("b", r, axis).unwrap().embed(&modes).unwrap();
            prop_assert!(s.deviation() <= SYMPLECTIC_TOL * s.matrix().norm_squared().max(1.0));
        }
        let chain = beam_splitter("a", "c").unwrap().embed(&modes).unwrap()
            .then(&wave_plate("b").embed(&modes).unwrap()).unwrap()
            .then(&squeezer("a", r, SqueezeAxis::X).unwrap().embed(&modes).unwrap()).unwrap();
        prop_assert!(chain.deviation() <= SYMPLECTIC_TOL * chain.matrix().norm_squared().max(1.0));
    }

    #[test]
    fn loss_and_gain_are_cp(a in 0.0..=1.0f64, g in 1.0..50.0f64) {
        prop_assert!(loss_channel(a, vec!["m".into()]).unwrap().cp_min_eigenvalue() >= -CP_TOL);
        prop_assert!(amplifier_channel(g, vec!["m".into()]).unwrap().cp_min_eigenvalue() >= -CP_TOL);
    }
}

#[test]
fn out_of_range_channels_are_rejected() {
    assert!(loss_channel(-0.1, vec!["m".into()]).is_err());
    assert!(loss_channel(1.1, vec!["m".into()]).is_err());
    assert!(amplifier_channel(0.9, vec!["m".into()]).is_err());
    // amplification without added noise is not CP
    let x = DMatrix::from_diagonal_element(2, 2, 2f64.sqrt());
    let err = GaussianChannel::new(x, DMatrix::zeros(2, 2), vec!["m".into()]).unwrap_err();
    assert!(matches!(err, memread_core::Error::NotCompletelyPositive { .. }));
}

#[test]
fn non_symplectic_matrix_is_rejected() {
    let m = DMatrix::from_diagonal_element(2, 2, 2.0);
    assert!(matches!(
        SymplecticTransform::new(m, vec!["m".into()]),
        Err(memread_core::Error::NotSymplectic { .. })
    ));
}

#[test]
fn beam_splitter_arms() {
    let st = GaussianState::coherent("i", 1.0 / 2f64.sqrt(), 0.0)
        .product(&GaussianState::coherent("j", 1.0 / 2f64.sqrt(), 0.0))
        .unwrap();
    let out = apply_unitary(&st, &beam_splitter("i", "j").unwrap()).unwrap();
    assert_abs_diff_eq!(out.mean()[0], 2.0 / 2f64.sqrt(), epsilon = 1e-15);
    assert_abs_diff_eq!(out.mean()[2], 0.0, epsilon = 1e-15);
    let bs = beam_splitter("i", "j").unwrap();
    let sq = bs.then(&bs).unwrap();
    assert_abs_diff_eq!((sq.matrix() - DMatrix::identity(4, 4)).amax(), 0.0, epsilon = 1e-15);
}
