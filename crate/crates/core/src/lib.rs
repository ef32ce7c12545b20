//! Exact Weil indices of quadratic forms and Lie algebras over finite fields, and
//! brute-force verification that invariant functions supported, together with
//! their Fourier transform, on the nilpotent cone are Fourier eigenvectors with
//! eigenvalue `gamma_psi(g)^{-1}`.
//!
//! Everything is exact: field elements are packed codes, character values live in
//! `Q(zeta_p)` with arbitrary-precision rational coefficients, and Weil indices are
//! symbolic fourth roots of unity `s * eps^e`. Floating point only appears in
//! advisory complex approximations printed next to exact values.
//!
//! The fixed additive character is `psi(x) = zeta_p^{tr(x)}` with `tr` the absolute trace.

#![allow(clippy::needless_range_loop, clippy::should_implement_trait, clippy::type_complexity)]

pub mod cli;
pub mod cyclo;
pub mod extension;
pub mod field;
pub mod fourier;
pub mod liealg;
pub mod matrix;
pub mod orbits;
pub mod props;
pub mod qform;
pub mod report;
pub mod table;
pub mod weil;

pub use cyclo::{base_gauss_sum, psi, CycNum};
pub use field::{Field, FieldElement};
pub use matrix::FqMatrix;
pub use qform::GramForm;
pub use weil::{EpsClass, WeilIndex};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/fields.md")]
    pub struct Fields;
    #[doc = include_str!("../../../book/src/gauss-sums.md")]
    pub struct GaussSums;
    #[doc = include_str!("../../../book/src/lie-algebras.md")]
    pub struct LieAlgebras;
    #[doc = include_str!("../../../book/src/orbits.md")]
    pub struct Orbits;
    #[doc = include_str!("../../../book/src/fourier.md")]
    pub struct Fourier;
    #[doc = include_str!("../../../book/src/laws.md")]
    pub struct Laws;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
