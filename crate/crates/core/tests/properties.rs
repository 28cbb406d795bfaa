//! Randomized invariants across mode counts and squeezing strengths.

use nalgebra::DMatrix;
use proptest::prelude::*;

use nmode_squeeze::circulant::{series_expm, shift_exponential, symmetric_gram};
use nmode_squeeze::squeeze::{normal_ordered_form, quadrature_variances, SqueezeParams};
use nmode_squeeze::wigner::{wigner_state, PhasePoint};
use nmode_squeeze::cyclic_shift;

fn params(n: usize, lambda: f64) -> SqueezeParams {
    SqueezeParams::new(n, lambda).unwrap()
}

/// Reverses the mode order while keeping mode 0 fixed.
fn reflect(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| m[((n - i) % n, (n - j) % n)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_exponential_matches_series(n in 2usize..=16, s in -3.0f64..3.0) {
        let a = cyclic_shift(n).unwrap().into_matrix();
        let series = series_expm(&(&a * s), 1e-16).unwrap();
        let spectral = shift_exponential(n, s, false).unwrap();
        let scale = series.amax().max(1.0);
        prop_assert!((series - &spectral).amax() / scale < 1e-11);
        prop_assert!((spectral.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_inverse_is_reversed_exponent(n in 2usize..=12, s in -3.0f64..3.0) {
        let forward = shift_exponential(n, s, true).unwrap();
        let back = shift_exponential(n, -s, true).unwrap();
        let scale = forward.amax() * back.amax();
        prop_assert!((forward * back - DMatrix::identity(n, n)).amax() / scale.max(1.0) < 1e-13);
    }

    #[test]
    fn gram_inverse(n in 2usize..=12, lambda in -2.0f64..2.0) {
        let g = symmetric_gram(n, lambda).unwrap();
        let g_inv = symmetric_gram(n, -lambda).unwrap();
        let scale = g.amax() * g_inv.amax();
        prop_assert!((&g * &g_inv - DMatrix::identity(n, n)).amax() / scale < 1e-13);
        prop_assert_eq!(g.transpose(), g);
    }

    #[test]
    fn variance_law(n in 2usize..=12, lambda in -2.0f64..2.0) {
        let v = quadrature_variances(&params(n, lambda)).unwrap();
        let x1 = (-2.0 * lambda).exp() / 4.0;
        prop_assert!((v.var_x1 - x1).abs() / x1 < 1e-10);
        prop_assert!((v.product() - 1.0 / 16.0).abs() < 1e-13);
    }

    #[test]
    fn normal_form_symmetries(n in 2usize..=10, lambda in -2.0f64..2.0) {
        let form = normal_ordered_form(&params(n, lambda)).unwrap();
        let reversed = normal_ordered_form(&params(n, -lambda)).unwrap();
        prop_assert!((&form.f + &reversed.f).amax() < 1e-12);
        prop_assert!((&form.f - form.f.transpose()).amax() < 1e-12);
        prop_assert!((&form.d - form.d.transpose()).amax() < 1e-12);
        prop_assert!((reflect(&form.f) - &form.f).amax() < 1e-12);

        // the two-photon matrix of a normalizable state is a strict contraction
        let eig = form.f.clone().symmetric_eigen();
        prop_assert!(eig.eigenvalues.amax() < 1.0);

        let ff = DMatrix::identity(n, n) - &form.f * form.f.transpose();
        let closure = form.prefactor.powi(2) / ff.determinant().sqrt();
        prop_assert!((closure - 1.0).abs() < 1e-9);
    }

    #[test]
    fn wigner_bounded_and_cyclic(
        n in 2usize..=6,
        lambda in -1.5f64..1.5,
        coords in proptest::collection::vec(-2.0f64..2.0, 12),
    ) {
        let w = wigner_state(&params(n, lambda)).unwrap();
        let point = PhasePoint::new(coords[..n].to_vec(), coords[6..6 + n].to_vec()).unwrap();
        let value = w.eval(&point).unwrap();
        prop_assert!(value > 0.0);
        prop_assert!(value <= w.norm_const * (1.0 + 1e-15));
        let rotated = w.eval(&point.rotated()).unwrap();
        prop_assert!((rotated - value).abs() <= 1e-12 * value.max(f64::MIN_POSITIVE));
    }
}
