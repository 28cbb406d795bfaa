//! Consistency checks behind `nsqueeze verify`.
//!
//! Residuals of matrix and scalar comparisons are scaled by
//! `max(1, |reference|)`, so the tolerances read as absolute for O(1)
//! quantities and relative for large ones.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circulant::{
    cayley_hamilton_n4, cyclic_shift, series_expm, shift_exponential, symmetric_gram,
    DenseRealMatrix,
};
use crate::error::Result;
use crate::fock;
use crate::squeeze::{
    entry_sum_power_identity, gram_entry_sum, heisenberg_transform, normal_ordered_form,
    quadrature_variances, SqueezeParams, MAX_IDENTITY_POWER,
};
use crate::wigner::{
    closed_form_n2, closed_form_n3, closed_form_n4, normalization, wigner_state, PhasePoint,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            residual,
            tolerance,
            passed: residual.is_finite() && residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub oracle: bool,
    pub cutoff: Option<usize>,
    /// Replaces every oracle tolerance when set.
    pub oracle_tol: Option<f64>,
    pub leakage_threshold: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            oracle: false,
            cutoff: None,
            oracle_tol: None,
            leakage_threshold: fock::DEFAULT_LEAKAGE_THRESHOLD,
        }
    }
}

fn scaled_diff(a: &DenseRealMatrix, reference: &DenseRealMatrix) -> f64 {
    (a - reference).amax() / reference.amax().max(1.0)
}

fn scaled_scalar(a: f64, reference: f64) -> f64 {
    (a - reference).abs() / reference.abs().max(1.0)
}

fn relative(a: f64, reference: f64) -> f64 {
    (a - reference).abs() / reference.abs()
}

/// Circulant matrix with first row `row`.
fn circulant(row: &[f64]) -> DenseRealMatrix {
    let n = row.len();
    DMatrix::from_fn(n, n, |i, j| row[(j + n - i) % n])
}

fn random_points(n: usize, count: usize, seed: u64) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| PhasePoint {
            q: (0..n).map(|_| rng.random_range(-1.5..1.5)).collect(),
            p: (0..n).map(|_| rng.random_range(-1.5..1.5)).collect(),
        })
        .collect()
}

pub fn run_checks(params: &SqueezeParams, options: &VerifyOptions) -> Result<Vec<Check>> {
    let (n, lambda) = (params.n(), params.lambda());
    let identity = DMatrix::<f64>::identity(n, n);
    let shift = cyclic_shift(n)?.into_matrix();
    let mut checks = Vec::new();

    // circulant engine
    let spectral = shift_exponential(n, lambda, false)?;
    let series = series_expm(&(&shift * lambda), 1e-15)?;
    checks.push(Check::new("shift_exponential_vs_series", scaled_diff(&spectral, &series), 1e-11));

    let transform = heisenberg_transform(params)?;
    checks.push(Check::new(
        "det_lambda_matrix",
        (transform.q_matrix.determinant() - 1.0).abs(),
        1e-12,
    ));
    checks.push(Check::new(
        "symplectic_transform",
        scaled_diff(&(transform.q_matrix.transpose() * &transform.p_matrix), &identity),
        1e-11,
    ));

    let gram = symmetric_gram(n, lambda)?;
    let gram_inv = symmetric_gram(n, -lambda)?;
    checks.push(Check::new(
        "gram_times_reversed_gram",
        (&gram * &gram_inv - &identity).amax() / (gram.amax() * gram_inv.amax()).max(1.0),
        1e-11,
    ));
    let row: Vec<f64> = gram.row(0).iter().copied().collect();
    checks.push(Check::new(
        "gram_symmetric_circulant",
        (&gram - gram.transpose()).amax().max((&gram - circulant(&row)).amax()),
        0.0,
    ));

    // squeeze algebra
    let v = quadrature_variances(params)?;
    let ref_x1 = (-2.0 * lambda).exp() / 4.0;
    let ref_x2 = (2.0 * lambda).exp() / 4.0;
    checks.push(Check::new("variance_x1", relative(v.var_x1, ref_x1), 1e-10));
    checks.push(Check::new("variance_x2", relative(v.var_x2, ref_x2), 1e-10));
    checks.push(Check::new("uncertainty_product", (v.product() - 1.0 / 16.0).abs(), 1e-13));

    let (sum, inverse_sum) = gram_entry_sum(params)?;
    checks.push(Check::new(
        "gram_entry_sum",
        scaled_scalar(sum, n as f64 * (-2.0 * lambda).exp()),
        1e-11,
    ));
    checks.push(Check::new(
        "gram_inverse_entry_sum",
        scaled_scalar(inverse_sum, n as f64 * (2.0 * lambda).exp()),
        1e-11,
    ));

    let mut mismatches = 0u32;
    for l in 0..=MAX_IDENTITY_POWER {
        if !entry_sum_power_identity(n, l)?.holds() {
            mismatches += 1;
        }
    }
    checks.push(Check::new("power_entry_sum_identity", mismatches as f64, 0.0));

    let form = normal_ordered_form(params)?;
    checks.push(Check::new("f_symmetric", (&form.f - form.f.transpose()).amax(), 1e-12));
    checks.push(Check::new("d_symmetric", (&form.d - form.d.transpose()).amax(), 1e-12));
    let radius = form
        .f
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs()));
    // strictly below one; the residual is the spectral radius itself
    checks.push(Check::new("f_spectral_radius_below_one", radius, 1.0 - f64::EPSILON));
    let closure = form.prefactor.powi(2)
        / (&identity - &form.f * form.f.transpose()).determinant().sqrt();
    checks.push(Check::new("normalization_closure", (closure - 1.0).abs(), 1e-9));

    // Wigner function
    let w = wigner_state(params)?;
    let origin = w.eval(&PhasePoint::origin(n))?;
    let norm = PI.powi(-(n as i32));
    checks.push(Check::new("wigner_origin", relative(origin, norm), 1e-13));
    if n <= 5 {
        let total = normalization(&w, 8)?;
        checks.push(Check::new("wigner_normalization", (total - 1.0).abs(), 1e-8));
    }

    // closed forms for small n
    let (ch, sh) = (lambda.cosh(), lambda.sinh());
    let (ch2, sh2) = ((2.0 * lambda).cosh(), (2.0 * lambda).sinh());
    let closed_form: Option<fn(&PhasePoint, f64) -> Result<f64>> = match n {
        2 => Some(closed_form_n2),
        3 => Some(closed_form_n3),
        4 => Some(closed_form_n4),
        _ => None,
    };
    if let Some(f) = closed_form {
        let mut worst = 0.0_f64;
        for pt in random_points(n, 100, 0x5eed + n as u64) {
            let generic = w.eval(&pt)?;
            worst = worst.max(relative(f(&pt, lambda)?, generic));
        }
        checks.push(Check::new("wigner_closed_form", worst, 1e-10));
    }
    match n {
        2 => {
            checks.push(Check::new(
                "gram_closed_form",
                scaled_diff(&gram, &circulant(&[ch2, -sh2])),
                1e-12,
            ));
            checks.push(Check::new(
                "gram_inverse_closed_form",
                scaled_diff(&gram_inv, &circulant(&[ch2, sh2])),
                1e-12,
            ));
            let sech = 1.0 / ch;
            let tanh = lambda.tanh();
            checks.push(Check::new("two_mode_prefactor", (form.prefactor - sech).abs(), 1e-12));
            checks.push(Check::new("two_mode_f", (&form.f + &shift * tanh).amax(), 1e-12));
            checks.push(Check::new(
                "two_mode_e",
                (&form.e - &identity * (sech - 1.0)).amax(),
                1e-12,
            ));
            checks.push(Check::new("two_mode_d", (&form.d - &shift * tanh).amax(), 1e-12));
        }
        3 => {
            let u = 2.0 / 3.0 * lambda.exp() + (-2.0 * lambda).exp() / 3.0;
            let v3 = ((-2.0 * lambda).exp() - lambda.exp()) / 3.0;
            checks.push(Check::new(
                "gram_closed_form",
                scaled_diff(&gram, &circulant(&[u, v3, v3])),
                1e-12,
            ));
        }
        4 => {
            checks.push(Check::new(
                "gram_closed_form",
                scaled_diff(&gram, &circulant(&[ch * ch, -sh * ch, sh * sh, -sh * ch])),
                1e-12,
            ));
            let ch4 = cayley_hamilton_n4(lambda)?;
            checks.push(Check::new(
                "cayley_hamilton_vs_spectral",
                scaled_diff(&ch4.lambda_matrix, &transform.q_matrix),
                1e-12,
            ));
            let a5 = circulant(&[ch * ch, -sh2 / 2.0, sh * sh, -sh2 / 2.0]);
            checks.push(Check::new(
                "cayley_hamilton_gram",
                scaled_diff(&(ch4.lambda_matrix.transpose() * &ch4.lambda_matrix), &a5),
                1e-12,
            ));
            checks.push(Check::new(
                "cayley_hamilton_det",
                (ch4.lambda_matrix.determinant() - 1.0).abs(),
                1e-12,
            ));
            checks.push(Check::new("det_n", scaled_scalar(form.det_n, ch * ch), 1e-12));
            checks.push(Check::new("four_mode_prefactor", (form.prefactor - 1.0 / ch).abs(), 1e-12));
            let t = lambda.tanh() / 2.0;
            checks.push(Check::new(
                "four_mode_f",
                (&form.f - circulant(&[0.0, -t, 0.0, -t])).amax(),
                1e-12,
            ));
        }
        _ => {}
    }

    if options.oracle {
        checks.extend(oracle_checks(params, options, &form.f, form.prefactor)?);
    }
    Ok(checks)
}

fn oracle_checks(
    params: &SqueezeParams,
    options: &VerifyOptions,
    f: &DenseRealMatrix,
    prefactor: f64,
) -> Result<Vec<Check>> {
    let (n, lambda) = (params.n(), params.lambda());
    let cutoff = options.cutoff.unwrap_or_else(|| fock::default_cutoff(lambda));
    let (amp_tol, var_tol) = match options.oracle_tol {
        Some(t) => (t, t),
        None if n == 2 => (1e-6, 1e-6),
        None => (1e-4, 1e-3),
    };
    let generator = fock::build_generator(params, cutoff)?;
    let psi = fock::apply_squeeze(&generator)?;
    let pairs = fock::extract_pair_amplitudes(&psi);
    let ratio = pairs.normalized();
    let mut checks = vec![
        Check::new("oracle_leakage", psi.leakage(), options.leakage_threshold),
        Check::new("oracle_vacuum_amplitude", (pairs.vac.re - prefactor).abs().max(pairs.vac.im.abs()), amp_tol),
    ];
    let pair_err = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (ratio[(i, j)] - num_complex::Complex64::new(f[(i, j)], 0.0)).norm())
        .fold(0.0, f64::max);
    checks.push(Check::new("oracle_pairs_vs_f", pair_err, amp_tol));

    if n == 2 {
        let (sech, tanh) = (1.0 / lambda.cosh(), lambda.tanh());
        let basis = psi.basis();
        let mut worst = 0.0_f64;
        for m1 in 0..cutoff {
            for m2 in 0..cutoff {
                let expected = if m1 == m2 && m1 <= cutoff / 2 {
                    sech * (-tanh).powi(m1 as i32)
                } else if m1 == m2 {
                    continue;
                } else {
                    0.0
                };
                let z = psi.amplitudes[basis.index(&[m1, m2])];
                worst = worst.max((z.re - expected).abs().max(z.im.abs()));
            }
        }
        checks.push(Check::new("oracle_schmidt_ladder", worst, amp_tol));
    }

    match fock::oracle_variances(&psi, options.leakage_threshold) {
        Ok(ov) => {
            let ref_x1 = (-2.0 * lambda).exp() / 4.0;
            let ref_x2 = (2.0 * lambda).exp() / 4.0;
            checks.push(Check::new("oracle_variance_x1", (ov.variances.var_x1 - ref_x1).abs(), var_tol));
            checks.push(Check::new("oracle_variance_x2", (ov.variances.var_x2 - ref_x2).abs(), var_tol));
            checks.push(Check::new("oracle_means", ov.mean_x1.abs().max(ov.mean_x2.abs()), 1e-12));
        }
        Err(_) => {
            checks.push(Check::new("oracle_variance_x1", f64::INFINITY, var_tol));
            checks.push(Check::new("oracle_variance_x2", f64::INFINITY, var_tol));
        }
    }
    Ok(checks)
}
