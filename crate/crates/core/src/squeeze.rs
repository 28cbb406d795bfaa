//! Closed-form algebra of `V = exp[iλ Σ Q_i A_ij P_j]`: Heisenberg transforms,
//! the normal-ordered form, the squeezed vacuum and its quadrature variances.
//!
//! Conventions: `Λ = exp(-λAᵀ)` transforms positions, `V⁻¹ Q V = Λ Q`, and
//! `exp(λA)` transforms momenta. `G = ΛᵀΛ = exp(-λ(A + Aᵀ))` is the gram matrix.

use nalgebra::DMatrix;

use crate::circulant::{
    check_exponent, check_modes, gram_spectrum, shift_exponential, symmetric_gram,
    DenseRealMatrix,
};
use crate::error::{Error, Result};

/// Mode count and squeezing parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    n: usize,
    lambda: f64,
}

impl SqueezeParams {
    pub fn new(n: usize, lambda: f64) -> Result<Self> {
        check_modes(n)?;
        check_exponent(2.0 * lambda.abs())?;
        Ok(Self { n, lambda })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The same mode count with `λ → -λ`.
    pub fn reversed(&self) -> Self {
        Self {
            n: self.n,
            lambda: -self.lambda,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergTransform {
    /// `Λ = exp(-λAᵀ)`, acting on positions.
    pub q_matrix: DenseRealMatrix,
    /// `exp(λA)`, acting on momenta.
    pub p_matrix: DenseRealMatrix,
}

pub fn heisenberg_transform(params: &SqueezeParams) -> Result<HeisenbergTransform> {
    let (n, lambda) = (params.n, params.lambda);
    Ok(HeisenbergTransform {
        q_matrix: shift_exponential(n, -lambda, true)?,
        p_matrix: shift_exponential(n, lambda, false)?,
    })
}

/// `V = prefactor · exp[½ a†ᵀ F a†] :exp[a†ᵀ E a]: exp[½ aᵀ D a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalOrderedForm {
    pub prefactor: f64,
    pub f: DenseRealMatrix,
    pub e: DenseRealMatrix,
    pub d: DenseRealMatrix,
    /// `N = (I + ΛᵀΛ) / 2`.
    pub n_matrix: DenseRealMatrix,
    pub n_inverse: DenseRealMatrix,
    pub det_n: f64,
    pub log_det_n: f64,
}

/// `ln det N = Σ_k ln((1 + exp(-2λ cos θ_k)) / 2)` from the spectrum.
pub fn log_det_n(params: &SqueezeParams) -> Result<f64> {
    let spectrum = gram_spectrum(params.n, params.lambda)?;
    Ok(spectrum
        .eigenangles()
        .map(|theta| {
            let x = -2.0 * params.lambda * theta.cos();
            // ln((1 + e^x)/2), stable for either sign of x
            x.max(0.0) + (-x.abs()).exp().ln_1p() - std::f64::consts::LN_2
        })
        .sum())
}

pub fn normal_ordered_form(params: &SqueezeParams) -> Result<NormalOrderedForm> {
    let n = params.n;
    let transform = heisenberg_transform(params)?;
    let lambda_m = &transform.q_matrix;
    let gram = symmetric_gram(n, params.lambda)?;
    let identity = DMatrix::<f64>::identity(n, n);

    let n_matrix = (&identity + &gram) * 0.5;
    let n_inverse = n_matrix
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite)?
        .inverse();

    let f = lambda_m * &n_inverse * lambda_m.transpose() - &identity;
    let e = lambda_m * &n_inverse - &identity;
    let d = &n_inverse - &identity;

    let log_det_n = log_det_n(params)?;
    Ok(NormalOrderedForm {
        prefactor: (-0.5 * log_det_n).exp(),
        f,
        e,
        d,
        n_matrix,
        n_inverse,
        det_n: log_det_n.exp(),
        log_det_n,
    })
}

/// The two fields that fix `V|0⟩ = prefactor · exp[½ a†ᵀ F a†]|0⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezedVacuum {
    pub prefactor: f64,
    pub f: DenseRealMatrix,
}

pub fn squeezed_vacuum(params: &SqueezeParams) -> Result<SqueezedVacuum> {
    let form = normal_ordered_form(params)?;
    Ok(SqueezedVacuum {
        prefactor: form.prefactor,
        f: form.f,
    })
}

/// Variances of `X₁ = ΣQ_i/√(2n)` and `X₂ = ΣP_i/√(2n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureVariances {
    pub var_x1: f64,
    pub var_x2: f64,
}

impl QuadratureVariances {
    pub fn product(&self) -> f64 {
        self.var_x1 * self.var_x2
    }
}

/// Entry sums of `G` and of `G⁻¹ = G(-λ)`.
pub fn gram_entry_sum(params: &SqueezeParams) -> Result<(f64, f64)> {
    let g = symmetric_gram(params.n, params.lambda)?;
    let g_inv = symmetric_gram(params.n, -params.lambda)?;
    Ok((g.sum(), g_inv.sum()))
}

pub fn quadrature_variances(params: &SqueezeParams) -> Result<QuadratureVariances> {
    let (sum, inverse_sum) = gram_entry_sum(params)?;
    let scale = 4.0 * params.n as f64;
    Ok(QuadratureVariances {
        var_x1: sum / scale,
        var_x2: inverse_sum / scale,
    })
}

/// Largest power accepted by [`entry_sum_power_identity`].
pub const MAX_IDENTITY_POWER: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntrySumIdentity {
    pub n: usize,
    pub l: u32,
    /// `Σ_ij [(A + Aᵀ)^l]_ij`, by integer matrix powers.
    pub lhs: u64,
    /// `2^l · n`.
    pub rhs: u64,
}

impl EntrySumIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn entry_sum_power_identity(n: usize, l: u32) -> Result<EntrySumIdentity> {
    check_modes(n)?;
    if l > MAX_IDENTITY_POWER {
        return Err(Error::PowerTooLarge {
            l,
            max: MAX_IDENTITY_POWER,
        });
    }
    let mut sym = vec![0u64; n * n];
    for i in 0..n {
        sym[i * n + (i + 1) % n] += 1;
        sym[((i + 1) % n) * n + i] += 1;
    }
    let mut power = vec![0u64; n * n];
    for i in 0..n {
        power[i * n + i] = 1;
    }
    for _ in 0..l {
        let mut next = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = power[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    next[i * n + j] += a * sym[k * n + j];
                }
            }
        }
        power = next;
    }
    Ok(EntrySumIdentity {
        n,
        l,
        lhs: power.iter().sum(),
        rhs: (1u64 << l) * n as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulant::cyclic_shift;
    use approx::assert_abs_diff_eq;

    fn p(n: usize, lambda: f64) -> SqueezeParams {
        SqueezeParams::new(n, lambda).unwrap()
    }

    #[test]
    fn params_validation() {
        assert_eq!(SqueezeParams::new(1, 0.1), Err(Error::DegenerateModeCount(1)));
        assert!(matches!(
            SqueezeParams::new(3, 351.0),
            Err(Error::OverflowGuard { .. })
        ));
        assert_eq!(p(3, 0.2).reversed().lambda(), -0.2);
    }

    #[test]
    fn transforms_at_zero_are_identity() {
        let t = heisenberg_transform(&p(5, 0.0)).unwrap();
        assert!((t.q_matrix - DMatrix::identity(5, 5)).amax() < 1e-15);
        assert!((t.p_matrix - DMatrix::identity(5, 5)).amax() < 1e-15);
    }

    #[test]
    fn two_mode_transforms() {
        let lambda = 0.45_f64;
        let t = heisenberg_transform(&p(2, lambda)).unwrap();
        let (c, s) = (lambda.cosh(), lambda.sinh());
        let q = DMatrix::from_row_slice(2, 2, &[c, -s, -s, c]);
        let pm = DMatrix::from_row_slice(2, 2, &[c, s, s, c]);
        assert!((t.q_matrix - q).amax() < 1e-14);
        assert!((t.p_matrix - pm).amax() < 1e-14);
    }

    #[test]
    fn transform_is_symplectic() {
        for n in 2..9 {
            let t = heisenberg_transform(&p(n, -0.8)).unwrap();
            let prod = t.q_matrix.transpose() * &t.p_matrix;
            assert!((prod - DMatrix::identity(n, n)).amax() < 1e-11);
            assert_abs_diff_eq!(t.q_matrix.determinant(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(t.p_matrix.determinant(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn normal_form_at_zero() {
        let form = normal_ordered_form(&p(4, 0.0)).unwrap();
        assert_eq!(form.prefactor, 1.0);
        assert!(form.f.amax() < 1e-15);
        assert!(form.e.amax() < 1e-15);
        assert!(form.d.amax() < 1e-15);
    }

    #[test]
    fn normal_form_two_modes() {
        for &lambda in &[0.2_f64, -0.9] {
            let form = normal_ordered_form(&p(2, lambda)).unwrap();
            let a = cyclic_shift(2).unwrap().into_matrix();
            let (sech, tanh) = (1.0 / lambda.cosh(), lambda.tanh());
            assert_abs_diff_eq!(form.prefactor, sech, epsilon = 1e-14);
            assert!((&form.f + &a * tanh).amax() < 1e-13);
            assert!((&form.e - DMatrix::identity(2, 2) * (sech - 1.0)).amax() < 1e-13);
            assert!((&form.d - &a * tanh).amax() < 1e-13);
        }
    }

    #[test]
    fn four_mode_n_inverse() {
        let lambda = 0.6_f64;
        let form = normal_ordered_form(&p(4, lambda)).unwrap();
        assert_abs_diff_eq!(form.det_n, lambda.cosh().powi(2), epsilon = 1e-13);
        let t = lambda.tanh() / 2.0;
        let pattern = [1.0, t, 0.0, t];
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(form.n_inverse[(i, j)], pattern[(j + 4 - i) % 4], epsilon = 1e-13);
            }
        }
        assert_abs_diff_eq!(form.n_matrix.determinant(), form.det_n, epsilon = 1e-12);
    }

    #[test]
    fn f_spectrum_is_normalizable() {
        for n in 2..8 {
            let form = normal_ordered_form(&p(n, 1.3)).unwrap();
            assert!((&form.f - form.f.transpose()).amax() < 1e-12);
            assert!((&form.d - form.d.transpose()).amax() < 1e-12);
            let eig = form.f.clone().symmetric_eigen();
            assert!(eig.eigenvalues.iter().all(|x| x.abs() < 1.0));
            assert!(form.n_matrix.clone().cholesky().is_some());
            assert!(form.prefactor > 0.0 && form.prefactor < 1.0);
        }
    }

    #[test]
    fn log_det_survives_large_lambda() {
        let params = p(64, 300.0);
        let ld = log_det_n(&params).unwrap();
        assert!(ld.is_finite() && ld > 0.0);
    }

    #[test]
    fn variances_at_zero() {
        let v = quadrature_variances(&p(6, 0.0)).unwrap();
        assert_abs_diff_eq!(v.var_x1, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(v.var_x2, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn identity_examples() {
        let id = entry_sum_power_identity(7, 0).unwrap();
        assert_eq!((id.lhs, id.rhs), (7, 7));
        // (A + Aᵀ)² for n = 3 is [[2,1,1],[1,2,1],[1,1,2]].
        let id = entry_sum_power_identity(3, 2).unwrap();
        assert_eq!((id.lhs, id.rhs), (12, 12));
        let id = entry_sum_power_identity(5, 7).unwrap();
        assert_eq!((id.lhs, id.rhs), (640, 640));
        assert_eq!(
            entry_sum_power_identity(4, 13),
            Err(Error::PowerTooLarge { l: 13, max: 12 })
        );
        assert_eq!(entry_sum_power_identity(1, 2), Err(Error::DegenerateModeCount(1)));
    }

    #[test]
    fn gram_entry_sum_examples() {
        let (s, si) = gram_entry_sum(&p(5, 0.0)).unwrap();
        assert_abs_diff_eq!(s, 5.0, epsilon = 1e-13);
        assert_abs_diff_eq!(si, 5.0, epsilon = 1e-13);
        let (s, si) = gram_entry_sum(&p(4, 1.0)).unwrap();
        assert_abs_diff_eq!(s, 4.0 * (-2.0f64).exp(), epsilon = 1e-11);
        assert_abs_diff_eq!(si, 4.0 * 2.0f64.exp(), epsilon = 1e-11);
    }
}
