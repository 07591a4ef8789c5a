//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use freediff::ncpoly::{Letter, NCPoly, TensorPoly, Word};
use num_complex::Complex64;
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub type Flat = Vec<usize>;

/// Letter indices of an adjoint-free word.
pub fn flat(w: &Word) -> Flat {
    assert!(!w.has_starred());
    w.letters().iter().map(|l| l.index()).collect()
}

pub fn word(indices: &[usize]) -> Word {
    Word::new(indices.iter().map(|&i| Letter::x(i)).collect())
}

fn add_to<K: Ord>(map: &mut BTreeMap<K, Complex64>, key: K, z: Complex64) {
    let v = map.entry(key).or_default();
    *v += z;
}

fn purge<K: Ord>(mut map: BTreeMap<K, Complex64>) -> BTreeMap<K, Complex64> {
    map.retain(|_, v| *v != Complex64::default());
    map
}

/// `D_i` by scanning every position of every word for `X_i`.
pub fn oracle_cyclic(p: &BTreeMap<Flat, Complex64>, i: usize) -> BTreeMap<Flat, Complex64> {
    let mut out = BTreeMap::new();
    for (w, z) in p {
        for k in 0..w.len() {
            if w[k] == i {
                let mut rq = w[k + 1..].to_vec();
                rq.extend_from_slice(&w[..k]);
                add_to(&mut out, rq, *z);
            }
        }
    }
    purge(out)
}

pub fn oracle_diff_quot(p: &BTreeMap<Flat, Complex64>, i: usize) -> BTreeMap<(Flat, Flat), Complex64> {
    let mut out = BTreeMap::new();
    for (w, z) in p {
        for k in 0..w.len() {
            if w[k] == i {
                add_to(&mut out, (w[..k].to_vec(), w[k + 1..].to_vec()), *z);
            }
        }
    }
    purge(out)
}

pub fn poly_map(p: &NCPoly) -> BTreeMap<Flat, Complex64> {
    p.terms().map(|(w, z)| (flat(w), *z)).collect()
}

pub fn tensor_map(t: &TensorPoly) -> BTreeMap<(Flat, Flat), Complex64> {
    t.expand().into_iter().map(|((q, r), z)| ((flat(&q), flat(&r)), z)).collect()
}

pub fn from_flat(nvars: usize, terms: &[(Flat, Complex64)]) -> NCPoly {
    NCPoly::from_terms(nvars, terms.iter().map(|(w, z)| (word(w), *z))).unwrap()
}

pub fn int_coeff() -> impl Strategy<Value = Complex64> {
    (-4i32..=4, -4i32..=4).prop_map(|(a, b)| c(a as f64, b as f64))
}

fn letter(m: usize, starred: bool) -> BoxedStrategy<Letter> {
    if starred {
        (1..=m, any::<bool>()).prop_map(|(i, s)| Letter::new(i, s)).boxed()
    } else {
        (1..=m).prop_map(Letter::x).boxed()
    }
}

pub fn word_strategy(m: usize, max_deg: usize, starred: bool) -> impl Strategy<Value = Word> {
    prop::collection::vec(letter(m, starred), 0..=max_deg).prop_map(Word::new)
}

/// Polynomial with small Gaussian-integer coefficients, so sums are exact.
pub fn int_poly(m: usize, max_terms: usize, max_deg: usize, starred: bool) -> impl Strategy<Value = NCPoly> {
    prop::collection::vec((word_strategy(m, max_deg, starred), int_coeff()), 0..=max_terms)
        .prop_map(move |terms| NCPoly::from_terms(m, terms).unwrap())
}

fn real_literal() -> impl Strategy<Value = f64> {
    prop_oneof![
        (-1000i64..1000).prop_map(|k| k as f64),
        (-1000i64..1000).prop_map(|k| k as f64 / 8.0),
        -10.0..10.0f64,
        prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL,
    ]
}

pub fn float_coeff() -> impl Strategy<Value = Complex64> {
    prop_oneof![
        real_literal().prop_map(|re| c(re, 0.0)),
        real_literal().prop_map(|im| c(0.0, im)),
        (real_literal(), real_literal()).prop_map(|(re, im)| c(re, im)),
    ]
}

/// Arbitrary finite coefficients, starred letters allowed.
pub fn float_poly() -> impl Strategy<Value = NCPoly> {
    (1usize..=3).prop_flat_map(|m| {
        prop::collection::vec((word_strategy(m, 5, true), float_coeff()), 0..=6)
            .prop_map(move |terms| NCPoly::from_terms(m, terms).unwrap())
    })
}
