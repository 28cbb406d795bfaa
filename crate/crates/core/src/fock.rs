//! Brute-force model of `V` on a truncated multimode Fock space.
//!
//! Nothing here uses the circulant machinery: the generator
//! `K = λ Σ_ij Q_i A_ij P_j` is assembled from truncated ladder operators,
//! exponentiated through a Hermitian eigendecomposition and applied to the
//! vacuum. The resulting amplitudes and variances are compared against the
//! closed-form results in the tests.
//!
//! Basis ordering is little-endian: the index of `|m₁ … mₙ⟩` is
//! `Σ_i m_i d^(i-1)`, so mode 1 varies fastest.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use faer::{Mat, Side};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::squeeze::{QuadratureVariances, SqueezeParams};

/// Largest Fock-space dimension accepted by default.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Default bound on the population of the truncation edge.
pub const DEFAULT_LEAKAGE_THRESHOLD: f64 = 1e-6;

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockBasis {
    n: usize,
    cutoff: usize,
    dim: usize,
}

impl FockBasis {
    pub fn new(n: usize, cutoff: usize) -> Result<Self> {
        Self::with_budget(n, cutoff, DEFAULT_MAX_DIM)
    }

    pub fn with_budget(n: usize, cutoff: usize, max_dim: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::DegenerateModeCount(n));
        }
        if cutoff < 2 {
            return Err(Error::CutoffTooSmall(cutoff));
        }
        let dim = u32::try_from(n)
            .ok()
            .and_then(|e| cutoff.checked_pow(e))
            .unwrap_or(usize::MAX);
        if dim > max_dim {
            return Err(Error::FockBudget {
                dim,
                budget: max_dim,
            });
        }
        Ok(Self { n, cutoff, dim })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index(&self, occupations: &[usize]) -> usize {
        debug_assert_eq!(occupations.len(), self.n);
        occupations
            .iter()
            .rev()
            .fold(0, |acc, &m| acc * self.cutoff + m)
    }

    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        (0..self.n)
            .map(|_| {
                let m = index % self.cutoff;
                index /= self.cutoff;
                m
            })
            .collect()
    }

    /// Index of the state with one photon in each listed mode (repeats add up).
    pub fn excitation(&self, modes: &[usize]) -> usize {
        let mut occ = vec![0; self.n];
        for &m in modes {
            occ[m] += 1;
        }
        self.index(&occ)
    }

    /// Whether some mode sits at the last retained level `d - 1`.
    pub fn on_edge(&self, index: usize) -> bool {
        self.occupations(index)
            .iter()
            .any(|&m| m + 1 == self.cutoff)
    }
}

/// Truncated single-mode operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    pub a: DMatrix<Complex64>,
    pub a_dag: DMatrix<Complex64>,
    /// `(a + a†)/√2`.
    pub q: DMatrix<Complex64>,
    /// `(a - a†)/(√2 i)`.
    pub p: DMatrix<Complex64>,
}

pub fn ladder(cutoff: usize) -> Result<Ladder> {
    if cutoff < 2 {
        return Err(Error::CutoffTooSmall(cutoff));
    }
    let a = DMatrix::from_fn(cutoff, cutoff, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let a_dag = a.adjoint();
    let q = (&a + &a_dag) * Complex64::new(FRAC_1_SQRT_2, 0.0);
    let p = (&a - &a_dag) * Complex64::new(0.0, -FRAC_1_SQRT_2);
    Ok(Ladder { a, a_dag, q, p })
}

/// Nonzero matrix elements `⟨m ± 1| X |m⟩` of `Q` or `P` acting on level `m`.
fn quadrature_action(m: usize, cutoff: usize, momentum: bool) -> [(Option<usize>, Complex64); 2] {
    let lower = (m > 0).then(|| m - 1);
    let raise = (m + 1 < cutoff).then_some(m + 1);
    let down = (m as f64).sqrt() * FRAC_1_SQRT_2;
    let up = ((m + 1) as f64).sqrt() * FRAC_1_SQRT_2;
    if momentum {
        [
            (lower, Complex64::new(0.0, -down)),
            (raise, Complex64::new(0.0, up)),
        ]
    } else {
        [(lower, Complex64::new(down, 0.0)), (raise, Complex64::new(up, 0.0))]
    }
}

/// `K = λ Σ_ij Q_i A_ij P_j` as a dense matrix.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    basis: FockBasis,
    entries: Mat<Complex64>,
}

impl GeneratorMatrix {
    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn entries(&self) -> &Mat<Complex64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    /// `max |K - K†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let dim = self.basis.dim;
        let mut worst = 0.0_f64;
        for j in 0..dim {
            for i in 0..=j {
                let d = (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

pub fn build_generator(params: &SqueezeParams, cutoff: usize) -> Result<GeneratorMatrix> {
    build_generator_in(params, FockBasis::new(params.n(), cutoff)?)
}

pub fn build_generator_in(params: &SqueezeParams, basis: FockBasis) -> Result<GeneratorMatrix> {
    let (n, d, dim) = (basis.n, basis.cutoff, basis.dim);
    let lambda = params.lambda();
    let mut entries = Mat::<Complex64>::zeros(dim, dim);
    // Nonzero entries of the cyclic shift: A_{i, i+1 mod n}.
    let couplings: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let stride = |mode: usize| d.pow(mode as u32);

    for col in 0..dim {
        let occ = basis.occupations(col);
        for &(qi, pj) in &couplings {
            for (mp, cp) in quadrature_action(occ[pj], d, true) {
                let Some(mp) = mp else { continue };
                let mid = col + mp * stride(pj) - occ[pj] * stride(pj);
                // qi != pj, so the occupation of qi is unchanged by P_j
                for (mq, cq) in quadrature_action(occ[qi], d, false) {
                    let Some(mq) = mq else { continue };
                    let row = mid + mq * stride(qi) - occ[qi] * stride(qi);
                    entries[(row, col)] += cq * cp * lambda;
                }
            }
        }
    }
    let generator = GeneratorMatrix { basis, entries };
    let deviation = generator.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian(deviation));
    }
    Ok(generator)
}

/// `exp(iK)` held in eigendecomposed form `U diag(e^{iκ}) U†`.
pub struct Propagator {
    basis: FockBasis,
    vectors: Mat<Complex64>,
    phases: Vec<Complex64>,
}

impl Propagator {
    pub fn new(generator: &GeneratorMatrix) -> Result<Self> {
        let evd = generator
            .entries
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let phases = evd
            .S()
            .column_vector()
            .iter()
            .map(|kappa| Complex64::new(0.0, kappa.re).exp())
            .collect();
        Ok(Self {
            basis: generator.basis,
            vectors: evd.U().to_owned(),
            phases,
        })
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn apply(&self, state: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = self.basis.dim;
        if state.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: state.len(),
            });
        }
        let u = &self.vectors;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); dim];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, s) in state.iter().enumerate() {
                if s.re != 0.0 || s.im != 0.0 {
                    acc += u[(i, k)].conj() * s;
                }
            }
            *c = acc * self.phases[k];
        }
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (k, c) in coeffs.iter().enumerate() {
            for (i, o) in out.iter_mut().enumerate() {
                *o += u[(i, k)] * c;
            }
        }
        Ok(out)
    }

    pub fn apply_to_basis(&self, index: usize) -> Vec<Complex64> {
        let dim = self.basis.dim;
        let u = &self.vectors;
        (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|k| u[(i, k)] * self.phases[k] * u[(index, k)].conj())
                    .sum()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockStateVector {
    basis: FockBasis,
    pub amplitudes: Vec<Complex64>,
}

impl FockStateVector {
    pub fn vacuum(basis: FockBasis) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { basis, amplitudes }
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn amplitude(&self, occupations: &[usize]) -> Complex64 {
        self.amplitudes[self.basis.index(occupations)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Truncation leakage: the norm deficit `1 - ‖Π ψ‖²` of the projection
    /// onto states with every mode strictly below the last retained level.
    /// The truncated `exp(iK)` is exactly unitary, so the total norm cannot
    /// show truncation error; the edge population does.
    pub fn leakage(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.basis.on_edge(*i))
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }
}

/// `exp(iK)|0…0⟩`.
pub fn apply_squeeze(generator: &GeneratorMatrix) -> Result<FockStateVector> {
    let propagator = Propagator::new(generator)?;
    let vacuum = FockStateVector::vacuum(generator.basis);
    let amplitudes = propagator.apply(&vacuum.amplitudes)?;
    Ok(FockStateVector {
        basis: generator.basis,
        amplitudes,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairAmplitudes {
    /// `⟨0…0|ψ⟩`.
    pub vac: Complex64,
    /// `⟨1_i 1_j|ψ⟩` off the diagonal, `√2 ⟨2_i|ψ⟩` on it.
    pub pairs: DMatrix<Complex64>,
}

impl PairAmplitudes {
    /// `pairs / vac`, the oracle's estimate of the two-photon matrix `F`.
    pub fn normalized(&self) -> DMatrix<Complex64> {
        self.pairs.map(|z| z / self.vac)
    }
}

pub fn extract_pair_amplitudes(psi: &FockStateVector) -> PairAmplitudes {
    let basis = psi.basis;
    let n = basis.n;
    let vac = psi.amplitudes[0];
    let pairs = DMatrix::from_fn(n, n, |i, j| {
        let z = psi.amplitudes[basis.excitation(&[i, j])];
        if i == j {
            z * SQRT_2
        } else {
            z
        }
    });
    PairAmplitudes { vac, pairs }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleVariances {
    pub variances: QuadratureVariances,
    pub mean_x1: f64,
    pub mean_x2: f64,
    pub leakage: f64,
}

/// Applies `Σ_i X_i / √(2n)` with `X` either `Q` or `P` on every mode.
fn apply_collective(psi: &FockStateVector, momentum: bool) -> Vec<Complex64> {
    let basis = psi.basis;
    let (n, d) = (basis.n, basis.cutoff);
    let scale = 1.0 / ((2 * n) as f64).sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); basis.dim];
    for (col, amp) in psi.amplitudes.iter().enumerate() {
        if amp.re == 0.0 && amp.im == 0.0 {
            continue;
        }
        let occ = basis.occupations(col);
        for (mode, &m) in occ.iter().enumerate() {
            let stride = d.pow(mode as u32);
            for (target, coef) in quadrature_action(m, d, momentum) {
                let Some(target) = target else { continue };
                let row = col + target * stride - m * stride;
                out[row] += coef * amp * scale;
            }
        }
    }
    out
}

pub fn oracle_variances(psi: &FockStateVector, leakage_threshold: f64) -> Result<OracleVariances> {
    let leakage = psi.leakage();
    if leakage > leakage_threshold {
        return Err(Error::Leakage {
            leakage,
            threshold: leakage_threshold,
        });
    }
    let moments = |momentum: bool| {
        let x_psi = apply_collective(psi, momentum);
        let mean: Complex64 = psi
            .amplitudes
            .iter()
            .zip(&x_psi)
            .map(|(a, b)| a.conj() * b)
            .sum();
        let second: f64 = x_psi.iter().map(|z| z.norm_sqr()).sum();
        (mean.re, second - mean.re * mean.re)
    };
    let (mean_x1, var_x1) = moments(false);
    let (mean_x2, var_x2) = moments(true);
    Ok(OracleVariances {
        variances: QuadratureVariances { var_x1, var_x2 },
        mean_x1,
        mean_x2,
        leakage,
    })
}

/// Smallest even cutoff with `tanh²(|λ|)^(d/2) < 1e-8`, the two-mode
/// Schmidt-ladder truncation policy.
pub fn default_cutoff(lambda: f64) -> usize {
    let t = lambda.abs().tanh();
    if t == 0.0 {
        return 2;
    }
    let mut d = 2;
    while t.powi(d as i32) >= 1e-8 && d < 1 << 16 {
        d += 2;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn ladder_two_levels() {
        let l = ladder(2).unwrap();
        assert_eq!(l.a, DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]));
        assert_eq!(ladder(1).unwrap_err(), Error::CutoffTooSmall(1));
    }

    #[test]
    fn ladder_quadratures() {
        let d = 5;
        let l = ladder(d).unwrap();
        for i in 0..d {
            for j in 0..d {
                let q = l.q[(i, j)];
                assert_eq!(q.im, 0.0);
                assert_eq!(q, l.q[(j, i)]);
                let expected = if j == i + 1 {
                    (j as f64 / 2.0).sqrt()
                } else if i == j + 1 {
                    (i as f64 / 2.0).sqrt()
                } else {
                    0.0
                };
                assert_abs_diff_eq!(q.re, expected, epsilon = 1e-15);
            }
        }
        let comm = &l.q * &l.p - &l.p * &l.q;
        for i in 0..d - 1 {
            for j in 0..d - 1 {
                let expected = if i == j { Complex64::i() } else { c(0.0) };
                assert!((comm[(i, j)] - expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn basis_indexing_is_little_endian() {
        let b = FockBasis::new(3, 4).unwrap();
        assert_eq!(b.dim(), 64);
        assert_eq!(b.index(&[1, 0, 0]), 1);
        assert_eq!(b.index(&[0, 1, 0]), 4);
        assert_eq!(b.index(&[3, 2, 1]), 3 + 2 * 4 + 16);
        for i in 0..b.dim() {
            assert_eq!(b.index(&b.occupations(i)), i);
        }
        assert_eq!(b.excitation(&[1, 1]), b.index(&[0, 2, 0]));
        assert!(b.on_edge(b.index(&[0, 3, 0])));
        assert!(!b.on_edge(b.index(&[2, 2, 2])));
    }

    #[test]
    fn budget_enforced() {
        assert_eq!(
            FockBasis::new(4, 9).unwrap_err(),
            Error::FockBudget { dim: 6561, budget: DEFAULT_MAX_DIM }
        );
        assert!(FockBasis::with_budget(2, 10, 50).is_err());
        assert_eq!(FockBasis::new(1, 4).unwrap_err(), Error::DegenerateModeCount(1));
    }

    #[test]
    fn generator_matches_ladder_products() {
        // Cross-check the matrix-free assembly against explicit Kronecker products.
        let params = SqueezeParams::new(2, 0.7).unwrap();
        let d = 4;
        let k = build_generator(&params, d).unwrap();
        let l = ladder(d).unwrap();
        let id = DMatrix::<Complex64>::identity(d, d);
        // little-endian: mode 1 is the fastest index, i.e. the right Kronecker factor
        let q1p2 = l.p.kronecker(&id) * id.kronecker(&l.q);
        let q2p1 = l.q.kronecker(&id) * id.kronecker(&l.p);
        let expected = (q1p2 + q2p1) * c(0.7);
        for i in 0..d * d {
            for j in 0..d * d {
                assert!((k.get(i, j) - expected[(i, j)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn generator_zero_and_hermitian() {
        let k = build_generator(&SqueezeParams::new(3, 0.0).unwrap(), 3).unwrap();
        assert_eq!(k.hermitian_deviation(), 0.0);
        assert!((0..27).all(|i| (0..27).all(|j| k.get(i, j).norm() == 0.0)));

        let k = build_generator(&SqueezeParams::new(3, 0.8).unwrap(), 4).unwrap();
        assert!(k.hermitian_deviation() < 1e-13);
    }

    #[test]
    fn vacuum_is_fixed_at_zero_lambda() {
        let k = build_generator(&SqueezeParams::new(2, 0.0).unwrap(), 4).unwrap();
        let psi = apply_squeeze(&k).unwrap();
        assert!((psi.amplitudes[0] - c(1.0)).norm() < 1e-14);
        assert!(psi.amplitudes[1..].iter().all(|z| z.norm() < 1e-14));
        let pairs = extract_pair_amplitudes(&psi);
        assert!((pairs.vac - c(1.0)).norm() < 1e-14);
        assert!(pairs.pairs.iter().all(|z| z.norm() < 1e-14));
        let v = oracle_variances(&psi, 1e-12).unwrap();
        assert_abs_diff_eq!(v.variances.var_x1, 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(v.variances.var_x2, 0.25, epsilon = 1e-14);
    }

    #[test]
    fn leakage_threshold_enforced() {
        let k = build_generator(&SqueezeParams::new(2, 1.0).unwrap(), 4).unwrap();
        let psi = apply_squeeze(&k).unwrap();
        assert!(psi.leakage() > 1e-3);
        assert!(matches!(oracle_variances(&psi, 1e-6), Err(Error::Leakage { .. })));
    }

    #[test]
    fn cutoff_policy() {
        assert_eq!(default_cutoff(0.0), 2);
        let d = default_cutoff(0.4);
        assert_eq!(d % 2, 0);
        let t2 = 0.4f64.tanh().powi(2);
        assert!(t2.powi(d as i32 / 2) < 1e-8);
        assert!(t2.powi(d as i32 / 2 - 1) >= 1e-8);
    }

    #[test]
    fn propagator_dimension_check() {
        let k = build_generator(&SqueezeParams::new(2, 0.3).unwrap(), 3).unwrap();
        let prop = Propagator::new(&k).unwrap();
        assert!(prop.apply(&[c(1.0)]).is_err());
    }
}
