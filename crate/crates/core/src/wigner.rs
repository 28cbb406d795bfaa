//! Wigner function of the squeezed vacuum `V|0⟩`.
//!
//! `W(q, p) = π^-n exp[-qᵀ G⁻¹ q - pᵀ G p]` with `G = exp(-λ(A + Aᵀ))`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

use gauss_quad::hermite::GaussHermite;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circulant::{symmetric_gram, DenseRealMatrix};
use crate::error::{Error, Result};
use crate::squeeze::SqueezeParams;

#[derive(Debug, Clone, PartialEq)]
pub struct WignerGaussian {
    n: usize,
    /// `G⁻¹`, weighting positions.
    pub precision_q: DenseRealMatrix,
    /// `G`, weighting momenta.
    pub precision_p: DenseRealMatrix,
    /// `π^-n`.
    pub norm_const: f64,
}

pub fn wigner_state(params: &SqueezeParams) -> Result<WignerGaussian> {
    let n = params.n();
    Ok(WignerGaussian {
        n,
        precision_q: symmetric_gram(n, -params.lambda())?,
        precision_p: symmetric_gram(n, params.lambda())?,
        norm_const: PI.powi(-(n as i32)),
    })
}

/// A phase-space point `(q, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                actual: p.len(),
            });
        }
        Ok(Self { q, p })
    }

    pub fn origin(n: usize) -> Self {
        Self {
            q: vec![0.0; n],
            p: vec![0.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// `α_i = (q_i + i p_i)/√2`.
    pub fn alpha(&self) -> Vec<Complex64> {
        self.q
            .iter()
            .zip(&self.p)
            .map(|(&q, &p)| Complex64::new(q, p) * FRAC_1_SQRT_2)
            .collect()
    }

    pub fn from_alpha(alpha: &[Complex64]) -> Self {
        let s = std::f64::consts::SQRT_2;
        Self {
            q: alpha.iter().map(|a| a.re * s).collect(),
            p: alpha.iter().map(|a| a.im * s).collect(),
        }
    }

    pub fn get(&self, c: Coordinate) -> f64 {
        match c.kind {
            Quadrature::Q => self.q[c.mode],
            Quadrature::P => self.p[c.mode],
        }
    }

    pub fn set(&mut self, c: Coordinate, value: f64) {
        match c.kind {
            Quadrature::Q => self.q[c.mode] = value,
            Quadrature::P => self.p[c.mode] = value,
        }
    }

    /// Cyclic relabelling `(q_i, p_i) → (q_{i+1}, p_{i+1})`.
    pub fn rotated(&self) -> Self {
        let mut q = self.q.clone();
        let mut p = self.p.clone();
        q.rotate_right(1);
        p.rotate_right(1);
        Self { q, p }
    }
}

fn quadratic_form(m: &DenseRealMatrix, x: &[f64]) -> f64 {
    let n = x.len();
    let mut acc = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += m[(i, j)] * x[j];
        }
        acc += x[i] * row;
    }
    acc
}

impl WignerGaussian {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, point: &PhasePoint) -> Result<f64> {
        if point.q.len() != self.n || point.p.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: point.q.len().max(point.p.len()),
            });
        }
        let exponent = quadratic_form(&self.precision_q, &point.q)
            + quadratic_form(&self.precision_p, &point.p);
        Ok(self.norm_const * (-exponent).exp())
    }
}

fn check_closed_form_dim(point: &PhasePoint, n: usize) -> Result<Vec<Complex64>> {
    if point.q.len() != n || point.p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: point.q.len().max(point.p.len()),
        });
    }
    Ok(point.alpha())
}

/// Two-mode squeezed vacuum in `α` variables.
pub fn closed_form_n2(point: &PhasePoint, lambda: f64) -> Result<f64> {
    let a = check_closed_form_dim(point, 2)?;
    let cross = (a[0].conj() * a[1].conj() + a[0] * a[1]).re;
    let local = a[0].norm_sqr() + a[1].norm_sqr();
    let exponent = -2.0 * cross * (2.0 * lambda).sinh() - 2.0 * local * (2.0 * lambda).cosh();
    Ok(PI.powi(-2) * exponent.exp())
}

/// Three-mode form; the complex-conjugate completion covers the whole braced
/// group, i.e. it contributes `2 Re{…}`.
pub fn closed_form_n3(point: &PhasePoint, lambda: f64) -> Result<f64> {
    let a = check_closed_form_dim(point, 3)?;
    let (c1, c2) = (lambda.cosh(), (2.0 * lambda).cosh());
    let (s1, s2) = (lambda.sinh(), (2.0 * lambda).sinh());

    let local: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let squares: Complex64 = a.iter().map(|x| x * x).sum();
    let mut pairs = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        for j in (i + 1)..3 {
            pairs += a[i] * a[j].conj() * (c2 - c1) + a[i] * a[j] * (s1 + s2);
        }
    }
    let braced = -squares * ((s2 - 2.0 * s1) / 3.0) - pairs * (2.0 / 3.0);
    let exponent = -(2.0 / 3.0) * (c2 + 2.0 * c1) * local + 2.0 * braced.re;
    Ok(PI.powi(-3) * exponent.exp())
}

/// Four-mode form with `M = α₁α₃* + α₂α₄*`, `R = α₁α₂ + α₁α₄ + α₂α₃ + α₃α₄`.
pub fn closed_form_n4(point: &PhasePoint, lambda: f64) -> Result<f64> {
    let a = check_closed_form_dim(point, 4)?;
    let m = a[0] * a[2].conj() + a[1] * a[3].conj();
    let r = a[0] * a[1] + a[0] * a[3] + a[1] * a[2] + a[2] * a[3];
    let local: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let t = lambda.tanh();
    let bracket = local + 2.0 * m.re * t * t + 2.0 * r.re * t;
    Ok(PI.powi(-4) * (-2.0 * lambda.cosh().powi(2) * bracket).exp())
}

/// Smallest accepted Gauss–Hermite order per coordinate.
pub const MIN_QUADRATURE_ORDER: usize = 8;

/// Largest tolerated disagreement between orders `m` and `m + 1`.
pub const QUADRATURE_CONSISTENCY: f64 = 1e-6;

/// `∫ W d^{2n}x` by a Gauss–Hermite product rule in whitened coordinates.
///
/// With `precision = L Lᵀ`, the substitution `x = L⁻ᵀ y` turns each quadratic
/// form into `|y|²`. The integrand handed to the rule is `W(x(y)) e^{|y|²} / det L`.
/// `W` factors into a position part and a momentum part, so the `2n`-dimensional
/// product sum is the product of two `n`-dimensional sums.
pub fn normalization(state: &WignerGaussian, quadrature_order: usize) -> Result<f64> {
    if quadrature_order < MIN_QUADRATURE_ORDER {
        return Err(Error::QuadratureOrderTooSmall {
            order: quadrature_order,
            min: MIN_QUADRATURE_ORDER,
        });
    }
    let value = product_rule(state, quadrature_order)?;
    let next = product_rule(state, quadrature_order + 1)?;
    let diff = (value - next).abs();
    if diff > QUADRATURE_CONSISTENCY {
        return Err(Error::QuadratureNotConverged {
            order: quadrature_order,
            next: quadrature_order + 1,
            diff,
        });
    }
    Ok(value)
}

struct Whitening {
    map: DMatrix<f64>,
    jacobian: f64,
}

fn whitening(precision: &DenseRealMatrix) -> Result<Whitening> {
    let chol = precision
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let det_l: f64 = l.diagonal().iter().product();
    let map = l
        .transpose()
        .try_inverse()
        .ok_or(Error::NotPositiveDefinite)?;
    Ok(Whitening {
        map,
        jacobian: 1.0 / det_l,
    })
}

fn product_rule(state: &WignerGaussian, order: usize) -> Result<f64> {
    let n = state.n;
    let rule = GaussHermite::new(NonZeroUsize::new(order).expect("order >= 8"));
    let pairs = rule.as_node_weight_pairs();
    let wq = whitening(&state.precision_q)?;
    let wp = whitening(&state.precision_p)?;

    let half = |w: &Whitening, position: bool| -> Result<f64> {
        let mut total = 0.0;
        let mut idx = vec![0usize; n];
        let mut point = PhasePoint::origin(n);
        loop {
            let y = DVector::from_iterator(n, idx.iter().map(|&k| pairs[k].0));
            let weight: f64 = idx.iter().map(|&k| pairs[k].1).product();
            let x = &w.map * &y;
            let target = if position { &mut point.q } else { &mut point.p };
            target.copy_from_slice(x.as_slice());
            let value = state.eval(&point)? * y.norm_squared().exp() * w.jacobian;
            total += weight * value;

            let mut axis = 0;
            loop {
                if axis == n {
                    return Ok(total);
                }
                idx[axis] += 1;
                if idx[axis] < order {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
        }
    };
    // W(q, p) = π^n W(q, 0) W(0, p)
    Ok(half(&wq, true)? * half(&wp, false)? / state.norm_const)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quadrature {
    Q,
    P,
}

/// One of the `2n` phase-space coordinates, written `q1 … qn`, `p1 … pn`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coordinate {
    pub kind: Quadrature,
    /// Zero-based mode index.
    pub mode: usize,
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.kind {
            Quadrature::Q => 'q',
            Quadrature::P => 'p',
        };
        write!(f, "{c}{}", self.mode + 1)
    }
}

impl FromStr for Coordinate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidGrid(format!("cannot parse coordinate {s:?}"));
        let mut chars = s.chars();
        let kind = match chars.next() {
            Some('q') | Some('Q') => Quadrature::Q,
            Some('p') | Some('P') => Quadrature::P,
            _ => return Err(bad()),
        };
        let index: usize = chars.as_str().parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        Ok(Self {
            kind,
            mode: index - 1,
        })
    }
}

impl Serialize for Coordinate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Inputs of a two-dimensional slice through phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSpec {
    pub axis_a: Coordinate,
    pub axis_b: Coordinate,
    pub range_a: (f64, f64),
    pub range_b: (f64, f64),
    pub steps_a: usize,
    pub steps_b: usize,
    /// Values of the remaining coordinates; unspecified ones are zero.
    pub fixed: Vec<(Coordinate, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRow {
    pub coord_a: f64,
    pub coord_b: f64,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSlice {
    pub axis_a: Coordinate,
    pub axis_b: Coordinate,
    pub range_a: (f64, f64),
    pub range_b: (f64, f64),
    pub steps_a: usize,
    pub steps_b: usize,
    /// All `2n` coordinates other than the two axes, in `q1 … qn, p1 … pn` order.
    pub fixed_values: Vec<(Coordinate, f64)>,
    /// Row-major: `coord_a` outer, `coord_b` inner.
    pub rows: Vec<GridRow>,
}

fn linspace(range: (f64, f64), steps: usize) -> Vec<f64> {
    let (lo, hi) = range;
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

fn validate_range(name: &str, range: (f64, f64), steps: usize) -> Result<()> {
    if steps < 2 {
        return Err(Error::InvalidGrid(format!("{name} needs at least 2 steps, got {steps}")));
    }
    if !(range.0.is_finite() && range.1.is_finite() && range.0 < range.1) {
        return Err(Error::InvalidGrid(format!(
            "{name} range must be finite and increasing, got {:?}",
            range
        )));
    }
    Ok(())
}

pub fn slice_grid(state: &WignerGaussian, spec: &SliceSpec) -> Result<GridSlice> {
    let n = state.n;
    for axis in [spec.axis_a, spec.axis_b] {
        if axis.mode >= n {
            return Err(Error::InvalidGrid(format!("coordinate {axis} out of range for n = {n}")));
        }
    }
    if spec.axis_a == spec.axis_b {
        return Err(Error::InvalidGrid(format!("axes coincide ({})", spec.axis_a)));
    }
    validate_range("axis a", spec.range_a, spec.steps_a)?;
    validate_range("axis b", spec.range_b, spec.steps_b)?;

    let mut base = PhasePoint::origin(n);
    for &(c, v) in &spec.fixed {
        if c.mode >= n {
            return Err(Error::InvalidGrid(format!("coordinate {c} out of range for n = {n}")));
        }
        if c == spec.axis_a || c == spec.axis_b {
            return Err(Error::InvalidGrid(format!("coordinate {c} is both an axis and fixed")));
        }
        if !v.is_finite() {
            return Err(Error::InvalidGrid(format!("fixed value for {c} is not finite")));
        }
        base.set(c, v);
    }

    let a_values = linspace(spec.range_a, spec.steps_a);
    let b_values = linspace(spec.range_b, spec.steps_b);
    let rows = (0..a_values.len() * b_values.len())
        .into_par_iter()
        .map(|idx| {
            let (ia, ib) = (idx / b_values.len(), idx % b_values.len());
            let mut point = base.clone();
            point.set(spec.axis_a, a_values[ia]);
            point.set(spec.axis_b, b_values[ib]);
            state.eval(&point).map(|w| GridRow {
                coord_a: a_values[ia],
                coord_b: b_values[ib],
                w,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let fixed_values = [Quadrature::Q, Quadrature::P]
        .into_iter()
        .flat_map(|kind| (0..n).map(move |mode| Coordinate { kind, mode }))
        .filter(|&c| c != spec.axis_a && c != spec.axis_b)
        .map(|c| (c, base.get(c)))
        .collect();

    Ok(GridSlice {
        axis_a: spec.axis_a,
        axis_b: spec.axis_b,
        range_a: spec.range_a,
        range_b: spec.range_b,
        steps_a: spec.steps_a,
        steps_b: spec.steps_b,
        fixed_values,
        rows,
    })
}

impl GridSlice {
    /// Writes the `coord_a,coord_b,w` table.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "coord_a,coord_b,w")?;
        for row in &self.rows {
            writeln!(out, "{},{},{}", row.coord_a, row.coord_b, row.w)?;
        }
        Ok(())
    }
}
