//! Noncommutative *-polynomials in `m` indeterminates and their adjoints.
//!
//! [`NCPoly`] keeps a canonical sparse form (lexicographically ordered words,
//! no zero coefficients), so two polynomials are equal exactly when their term
//! maps are equal. The cyclic gradient `D_i` and the free difference quotient
//! `∂_i` are defined on the adjoint-free subalgebra only; asking for either on
//! a polynomial that contains a starred letter is an error.
//!
//! ```
//! use freediff::ncpoly::NCPoly;
//!
//! let x1 = NCPoly::var(2, 1).unwrap();
//! let x2 = NCPoly::var(2, 2).unwrap();
//! let p = &(&(&x1 * &x2) * &x1) * &x2;
//! assert_eq!(p.cyclic_grad(1).unwrap().to_string(), "2*X2*X1*X2");
//! ```

mod calculus;
mod eval;
mod poly;
mod tensor;
mod word;

pub use eval::evaluate;
pub use poly::NCPoly;
pub use tensor::TensorPoly;
pub use word::{Letter, Word};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomials live in different algebras: {left} vs {right} variables")]
    ArityMismatch { left: usize, right: usize },
    #[error("variable index {index} is outside 1..={nvars}")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("derivations are only defined on adjoint-free polynomials, found {letter}")]
    StarredLetter { letter: Letter },
    #[error("cannot evaluate a {nvars}-variable polynomial on a {tuple}-tuple")]
    TupleArity { nvars: usize, tuple: usize },
}
