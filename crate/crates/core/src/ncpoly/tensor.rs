use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::poly::accumulate;
use super::{NCPoly, PolyError, Word};

/// A finite sum `Σ_j Q_j ⊗ R_j` in the algebraic tensor square.
///
/// Summands are kept as given; two different lists may represent the same
/// tensor. Compare with [`TensorPoly::expand`] or through a bilinear pairing.
#[derive(Clone, Debug)]
pub struct TensorPoly {
    nvars: usize,
    summands: Vec<(NCPoly, NCPoly)>,
}

impl TensorPoly {
    pub fn zero(nvars: usize) -> Self {
        TensorPoly {
            nvars,
            summands: Vec::new(),
        }
    }

    /// `left ⊗ right`.
    pub fn elementary(left: NCPoly, right: NCPoly) -> Result<Self, PolyError> {
        let mut t = Self::zero(left.nvars());
        t.push(left, right)?;
        Ok(t)
    }

    pub fn push(&mut self, left: NCPoly, right: NCPoly) -> Result<(), PolyError> {
        for side in [&left, &right] {
            if side.nvars() != self.nvars {
                return Err(PolyError::ArityMismatch {
                    left: self.nvars,
                    right: side.nvars(),
                });
            }
        }
        self.summands.push((left, right));
        Ok(())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn summands(&self) -> &[(NCPoly, NCPoly)] {
        &self.summands
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn try_add(&self, other: &TensorPoly) -> Result<TensorPoly, PolyError> {
        let mut out = self.clone();
        for (l, r) in &other.summands {
            out.push(l.clone(), r.clone())?;
        }
        Ok(out)
    }

    /// Product in `A ⊗ A`: `(a ⊗ b)(c ⊗ d) = ac ⊗ bd`.
    pub fn try_mul(&self, other: &TensorPoly) -> Result<TensorPoly, PolyError> {
        let mut out = TensorPoly::zero(self.nvars);
        for (a, b) in &self.summands {
            for (c, d) in &other.summands {
                out.push(a.try_mul(c)?, b.try_mul(d)?)?;
            }
        }
        Ok(out)
    }

    /// `Σ Q_j ⊗ R_j ↦ Σ R_j Q_j`.
    pub fn flip_contract(&self) -> NCPoly {
        let mut terms = BTreeMap::new();
        for (q, r) in &self.summands {
            for (rw, rc) in r.terms() {
                for (qw, qc) in q.terms() {
                    accumulate(&mut terms, rw.concat(qw), *rc * *qc);
                }
            }
        }
        NCPoly::from_map_unchecked(self.nvars, terms)
    }

    /// Canonical coordinates in the basis of word pairs.
    pub fn expand(&self) -> BTreeMap<(Word, Word), Complex64> {
        let mut out: BTreeMap<(Word, Word), Complex64> = BTreeMap::new();
        for (q, r) in &self.summands {
            for (qw, qc) in q.terms() {
                for (rw, rc) in r.terms() {
                    let key = (qw.clone(), rw.clone());
                    let sum = out.get(&key).copied().unwrap_or_default() + *qc * *rc;
                    if sum == Complex64::default() {
                        out.remove(&key);
                    } else {
                        out.insert(key, sum);
                    }
                }
            }
        }
        out
    }

    /// Applies `Q ⊗ R ↦ f(Q)·g(R)` summand by summand.
    pub fn pair<F, G>(&self, mut f: F, mut g: G) -> Complex64
    where
        F: FnMut(&NCPoly) -> Complex64,
        G: FnMut(&NCPoly) -> Complex64,
    {
        self.summands.iter().map(|(q, r)| f(q) * g(r)).sum()
    }
}

impl fmt::Display for TensorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return f.write_str("0");
        }
        for (k, (q, r)) in self.summands.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{} (x) {}", grouped(q), grouped(r))?;
        }
        Ok(())
    }
}

fn grouped(p: &NCPoly) -> String {
    if p.num_terms() > 1 {
        format!("({p})")
    } else {
        p.to_string()
    }
}
