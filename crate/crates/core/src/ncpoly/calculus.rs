//! Cyclic gradient and free difference quotient.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::poly::accumulate;
use super::{Letter, NCPoly, PolyError, TensorPoly};

impl NCPoly {
    fn derivation_letter(&self, i: usize) -> Result<Letter, PolyError> {
        if i == 0 || i > self.nvars() {
            return Err(PolyError::IndexOutOfRange {
                index: i,
                nvars: self.nvars(),
            });
        }
        if let Some(letter) = self.first_starred() {
            return Err(PolyError::StarredLetter { letter });
        }
        Ok(Letter::x(i))
    }

    /// Cyclic derivative `D_i P = Σ_{P = Q X_i R} R Q`.
    pub fn cyclic_grad(&self, i: usize) -> Result<NCPoly, PolyError> {
        let letter = self.derivation_letter(i)?;
        let mut terms = BTreeMap::new();
        for (word, c) in self.terms() {
            for (q, r) in word.splittings(letter) {
                accumulate(&mut terms, r.concat(&q), *c);
            }
        }
        Ok(NCPoly::from_map_unchecked(self.nvars(), terms))
    }

    /// The full cyclic gradient `(D_1 P, …, D_m P)`.
    pub fn cyclic_gradient(&self) -> Result<Vec<NCPoly>, PolyError> {
        (1..=self.nvars()).map(|i| self.cyclic_grad(i)).collect()
    }

    /// Free difference quotient `∂_i P = Σ_{P = Q X_i R} Q ⊗ R`.
    ///
    /// The coefficient of each source word rides on the left factor.
    pub fn diff_quot(&self, i: usize) -> Result<TensorPoly, PolyError> {
        let letter = self.derivation_letter(i)?;
        let m = self.nvars();
        let mut out = TensorPoly::zero(m);
        for (word, c) in self.terms() {
            for (q, r) in word.splittings(letter) {
                out.push(
                    NCPoly::monomial(m, q, *c)?,
                    NCPoly::monomial(m, r, Complex64::new(1.0, 0.0))?,
                )?;
            }
        }
        Ok(out)
    }
}
