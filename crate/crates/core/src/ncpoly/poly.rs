use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::word::{Letter, Word};
use super::PolyError;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Element of `C<X_1..X_m, X_1*..X_m*>` in canonical sparse form.
#[derive(Clone, Debug, PartialEq)]
pub struct NCPoly {
    nvars: usize,
    terms: BTreeMap<Word, Complex64>,
}

pub(crate) fn accumulate(terms: &mut BTreeMap<Word, Complex64>, word: Word, coeff: Complex64) {
    if coeff == ZERO {
        return;
    }
    match terms.entry(word) {
        Entry::Vacant(e) => {
            e.insert(coeff);
        }
        Entry::Occupied(mut e) => {
            let sum = *e.get() + coeff;
            if sum == ZERO {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

impl NCPoly {
    pub fn zero(nvars: usize) -> Self {
        NCPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, ONE)
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut p = Self::zero(nvars);
        accumulate(&mut p.terms, Word::unit(), c);
        p
    }

    /// `X_index`.
    pub fn var(nvars: usize, index: usize) -> Result<Self, PolyError> {
        Self::monomial(nvars, Word::new(vec![letter_checked(nvars, index, false)?]), ONE)
    }

    /// `X_index*`.
    pub fn var_star(nvars: usize, index: usize) -> Result<Self, PolyError> {
        Self::monomial(nvars, Word::new(vec![letter_checked(nvars, index, true)?]), ONE)
    }

    pub fn monomial(nvars: usize, word: Word, coeff: Complex64) -> Result<Self, PolyError> {
        if word.max_index() > nvars {
            return Err(PolyError::IndexOutOfRange {
                index: word.max_index(),
                nvars,
            });
        }
        let mut p = Self::zero(nvars);
        accumulate(&mut p.terms, word, coeff);
        Ok(p)
    }

    /// Builds a polynomial from `(word, coefficient)` pairs, collecting repeats.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Word, Complex64)>,
    {
        let mut p = Self::zero(nvars);
        for (word, coeff) in terms {
            if word.max_index() > nvars {
                return Err(PolyError::IndexOutOfRange {
                    index: word.max_index(),
                    nvars,
                });
            }
            accumulate(&mut p.terms, word, coeff);
        }
        Ok(p)
    }

    pub(crate) fn from_map_unchecked(nvars: usize, terms: BTreeMap<Word, Complex64>) -> Self {
        debug_assert!(terms.values().all(|c| *c != ZERO));
        NCPoly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&Word, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, word: &Word) -> Complex64 {
        self.terms.get(word).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::degree).max()
    }

    pub fn has_starred(&self) -> bool {
        self.terms.keys().any(Word::has_starred)
    }

    pub(crate) fn first_starred(&self) -> Option<Letter> {
        self.terms
            .keys()
            .flat_map(|w| w.iter().copied())
            .find(|l| l.is_starred())
    }

    fn check_arity(&self, other: &NCPoly) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            Err(PolyError::ArityMismatch {
                left: self.nvars,
                right: other.nvars,
            })
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &NCPoly) -> Result<NCPoly, PolyError> {
        self.check_arity(other)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            accumulate(&mut terms, w.clone(), *c);
        }
        Ok(NCPoly::from_map_unchecked(self.nvars, terms))
    }

    pub fn try_sub(&self, other: &NCPoly) -> Result<NCPoly, PolyError> {
        self.check_arity(other)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            accumulate(&mut terms, w.clone(), -*c);
        }
        Ok(NCPoly::from_map_unchecked(self.nvars, terms))
    }

    /// Noncommutative product `self · other`.
    pub fn try_mul(&self, other: &NCPoly) -> Result<NCPoly, PolyError> {
        self.check_arity(other)?;
        let mut terms = BTreeMap::new();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                accumulate(&mut terms, u.concat(v), *a * *b);
            }
        }
        Ok(NCPoly::from_map_unchecked(self.nvars, terms))
    }

    pub fn scale(&self, z: Complex64) -> NCPoly {
        let mut terms = BTreeMap::new();
        for (w, c) in &self.terms {
            accumulate(&mut terms, w.clone(), z * *c);
        }
        NCPoly::from_map_unchecked(self.nvars, terms)
    }

    pub fn pow(&self, k: u32) -> NCPoly {
        let mut out = NCPoly::one(self.nvars);
        for _ in 0..k {
            out = out.try_mul(self).expect("same algebra");
        }
        out
    }

    /// Formal adjoint: reverse words, toggle stars, conjugate coefficients.
    pub fn adjoint(&self) -> NCPoly {
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| (w.adjoint(), c.conj()))
            .collect();
        NCPoly::from_map_unchecked(self.nvars, terms)
    }

    /// Substitutes `X_i* -> X_i` everywhere.
    pub fn unstarred(&self) -> NCPoly {
        let mut terms = BTreeMap::new();
        for (w, c) in &self.terms {
            accumulate(&mut terms, w.iter().map(|l| l.unstarred()).collect(), *c);
        }
        NCPoly::from_map_unchecked(self.nvars, terms)
    }

    /// `V(X)* = V(X*)`: the adjoint, read back in unstarred letters, is `V`.
    ///
    /// Only adjoint-free polynomials can pass; for those this says the
    /// coefficient of every word is the conjugate of that of its reversal.
    pub fn is_self_adjoint(&self) -> bool {
        !self.has_starred() && self.adjoint().unstarred() == *self
    }
}

fn letter_checked(nvars: usize, index: usize, starred: bool) -> Result<Letter, PolyError> {
    if index == 0 || index > nvars {
        return Err(PolyError::IndexOutOfRange { index, nvars });
    }
    Ok(Letter::new(index, starred))
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::polylang::print_poly(self))
    }
}

// Operator sugar. These panic when the two operands have different variable
// counts; use the `try_*` methods when that can happen.

impl Add for &NCPoly {
    type Output = NCPoly;
    fn add(self, rhs: &NCPoly) -> NCPoly {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: &NCPoly) -> NCPoly {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for &NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: &NCPoly) -> NCPoly {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        self.scale(-ONE)
    }
}

impl Mul<&NCPoly> for Complex64 {
    type Output = NCPoly;
    fn mul(self, rhs: &NCPoly) -> NCPoly {
        rhs.scale(self)
    }
}
