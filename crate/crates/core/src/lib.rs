//! Numerics for the cyclic n-mode squeezing operator
//! `V = exp[iλ(Q₁P₂ + Q₂P₃ + ⋯ + QₙP₁)]`.
//!
//! * [`circulant`]: the cyclic shift `A` and exact matrix functions of it.
//! * [`squeeze`]: Heisenberg transforms, normal-ordered form, squeezed vacuum,
//!   quadrature variances.
//! * [`wigner`]: the Gaussian Wigner function of `V|0⟩`, closed forms for
//!   two to four modes, grid slices and a quadrature normalization check.
//! * [`fock`]: a brute-force truncated Fock-space model of `V` used as an
//!   independent oracle.
//! * [`cli`]: the `nsqueeze` command-line surface.

pub mod circulant;
pub mod cli;
pub mod error;
pub mod fock;
pub mod squeeze;
pub mod wigner;

pub use circulant::{
    cayley_hamilton_n4, cyclic_shift, series_expm, shift_exponential, symmetric_gram,
    CayleyHamilton4, CirculantSpectrum, DenseRealMatrix, ShiftMatrix,
};
pub use error::{Error, Result};
pub use squeeze::{
    entry_sum_power_identity, gram_entry_sum, heisenberg_transform, normal_ordered_form,
    quadrature_variances, squeezed_vacuum, HeisenbergTransform, NormalOrderedForm,
    QuadratureVariances, SqueezeParams, SqueezedVacuum,
};
