//! Matrix functions of the cyclic shift `A`.
//!
//! `A` is the n×n permutation with ones at `(i, i+1 mod n)`. It is diagonalised
//! by the discrete Fourier basis: with `ω_k = exp(iθ_k)`, `θ_k = 2πk/n`, the
//! vector `v_k[j] = ω_k^j` satisfies `A v_k = ω_k v_k` and `Aᵀ v_k = conj(ω_k) v_k`.
//! Any function of `A` and `Aᵀ` is therefore circulant and is evaluated exactly
//! from its n eigenvalues. A scaling-and-squaring Taylor exponential is kept
//! alongside as an independent cross-check.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type DenseRealMatrix = DMatrix<f64>;

/// Largest exponent magnitude any spectral evaluation may reach.
pub const EXPONENT_GUARD: f64 = 700.0;

/// Bound on the imaginary part left over after real reconstruction, relative
/// to the largest eigenvalue magnitude.
pub const IMAGINARY_RESIDUE_BOUND: f64 = 1e-13;

pub(crate) fn check_exponent(magnitude: f64) -> Result<()> {
    if !magnitude.is_finite() || magnitude > EXPONENT_GUARD {
        return Err(Error::OverflowGuard {
            magnitude,
            bound: EXPONENT_GUARD,
        });
    }
    Ok(())
}

pub(crate) fn check_modes(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::DegenerateModeCount(n));
    }
    Ok(())
}

/// `(cos, sin)` of `2πr/n` computed from the residue folded into `[0, n/2]`,
/// so that residues `r` and `n - r` give bitwise-conjugate phases.
fn unit_phase(r: usize, n: usize) -> (f64, f64) {
    let r = r % n;
    let (folded, sign) = if 2 * r > n { (n - r, -1.0) } else { (r, 1.0) };
    let angle = 2.0 * PI * folded as f64 / n as f64;
    (angle.cos(), sign * angle.sin())
}

/// The cyclic shift matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftMatrix {
    matrix: DenseRealMatrix,
}

impl ShiftMatrix {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn as_matrix(&self) -> &DenseRealMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseRealMatrix {
        self.matrix
    }

    pub fn transpose(&self) -> DenseRealMatrix {
        self.matrix.transpose()
    }
}

pub fn cyclic_shift(n: usize) -> Result<ShiftMatrix> {
    check_modes(n)?;
    let matrix = DMatrix::from_fn(n, n, |i, j| if j == (i + 1) % n { 1.0 } else { 0.0 });
    Ok(ShiftMatrix { matrix })
}

/// Eigenvalues of a circulant matrix function of `A`, indexed like `θ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantSpectrum {
    eigenvalues: Vec<Complex64>,
}

impl CirculantSpectrum {
    /// Applies `map` to every eigenvalue `ω_k` of `A`. A function of `Aᵀ`
    /// enters through `ω_k.conj()`.
    pub fn from_map(n: usize, map: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        check_modes(n)?;
        let eigenvalues = (0..n)
            .map(|k| {
                let (c, s) = unit_phase(k, n);
                map(Complex64::new(c, s))
            })
            .collect::<Vec<_>>();
        if eigenvalues.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { eigenvalues })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenangles(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n();
        (0..n).map(move |k| 2.0 * PI * k as f64 / n as f64)
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn determinant(&self) -> Complex64 {
        self.eigenvalues.iter().product()
    }

    /// Entry `c_m` of the first row; entry `(i, j)` of the matrix is
    /// `c_{(j - i) mod n}`.
    pub fn first_row(&self) -> Result<Vec<f64>> {
        let n = self.n();
        let scale = self
            .eigenvalues
            .iter()
            .map(|z| z.norm())
            .fold(1.0_f64, f64::max);
        let bound = IMAGINARY_RESIDUE_BOUND * scale;
        let mut row = Vec::with_capacity(n);
        for m in 0..n {
            let mut re = 0.0;
            let mut im = 0.0;
            for (k, mu) in self.eigenvalues.iter().enumerate() {
                // phase exp(-i m θ_k)
                let (c, s) = unit_phase(m * k, n);
                re += mu.re * c + mu.im * s;
                im += mu.im * c - mu.re * s;
            }
            let (re, im) = (re / n as f64, im / n as f64);
            if im.abs() > bound {
                return Err(Error::ImaginaryResidue {
                    residue: im.abs(),
                    bound,
                });
            }
            row.push(re);
        }
        Ok(row)
    }

    pub fn to_dense(&self) -> Result<DenseRealMatrix> {
        let n = self.n();
        let row = self.first_row()?;
        Ok(DMatrix::from_fn(n, n, |i, j| row[(j + n - i) % n]))
    }
}

/// `exp(sA)`, or `exp(sAᵀ)` when `transposed` is set.
pub fn shift_exponential(n: usize, s: f64, transposed: bool) -> Result<DenseRealMatrix> {
    check_modes(n)?;
    check_exponent(s.abs())?;
    CirculantSpectrum::from_map(n, |z| {
        let z = if transposed { z.conj() } else { z };
        (z * s).exp()
    })?
    .to_dense()
}

/// Spectrum of `G = exp(-λ(A + Aᵀ))`; eigenvalues `exp(-2λ cos θ_k)`.
pub fn gram_spectrum(n: usize, lambda: f64) -> Result<CirculantSpectrum> {
    check_modes(n)?;
    check_exponent(2.0 * lambda.abs())?;
    CirculantSpectrum::from_map(n, |z| Complex64::new((-2.0 * lambda * z.re).exp(), 0.0))
}

/// `G = exp(-λ(A + Aᵀ))`, symmetric positive definite and circulant.
pub fn symmetric_gram(n: usize, lambda: f64) -> Result<DenseRealMatrix> {
    gram_spectrum(n, lambda)?.to_dense()
}

/// `exp(M)` by scaling and squaring of a truncated Taylor series.
///
/// The series is summed on `M / 2^s` with `‖M / 2^s‖∞ ≤ 1/2` until the next
/// term falls below `tol · 2^-s`, then squared `s` times.
pub fn series_expm(m: &DenseRealMatrix, tol: f64) -> Result<DenseRealMatrix> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::BadTolerance(tol));
    }
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            actual: m.ncols(),
        });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = m.nrows();
    let norm = inf_norm(m);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m / 2f64.powi(squarings);
    let term_tol = tol * 2f64.powi(-squarings) * 1e-3;

    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..200 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if inf_norm(&term) < term_tol {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    if sum.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(sum)
}

fn inf_norm(m: &DenseRealMatrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Polynomial form of `Λ = exp(-λAᵀ)` for four modes, where `A⁴ = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct CayleyHamilton4 {
    /// `c_0 .. c_3` with `Λ = Σ c_j (Aᵀ)^j`.
    pub coefficients: [f64; 4],
    pub lambda_matrix: DenseRealMatrix,
}

pub fn cayley_hamilton_n4(lambda: f64) -> Result<CayleyHamilton4> {
    check_exponent(lambda.abs())?;
    let (ch, sh) = (lambda.cosh(), lambda.sinh());
    let (c, s) = (lambda.cos(), lambda.sin());
    let coefficients = [
        0.5 * (ch + c),
        -0.5 * (sh + s),
        0.5 * (ch - c),
        0.5 * (-sh + s),
    ];
    // (Aᵀ)^j has ones at (i + j mod 4, i).
    let lambda_matrix = DMatrix::from_fn(4, 4, |i, j| coefficients[(i + 4 - j) % 4]);
    Ok(CayleyHamilton4 {
        coefficients,
        lambda_matrix,
    })
}
