mod common;

use common::*;
use freediff::laws::{EmpiricalLaw, LawMeta, Tolerance};
use freediff::matmodel::{brownian_increment, HermMatrix, MatrixTuple, RngStream};
use freediff::ncpoly::{NCPoly, TensorPoly};
use freediff::polylang::parse_poly;
use num_complex::Complex64;
use proptest::prelude::*;

/// Independent GUE samples with unit-variance scaling: approximately a free
/// semicircular family.
fn semicircular(m: usize, n: usize, groups: usize, per_group: usize, seed: u64) -> EmpiricalLaw {
    let replicas = (0..groups as u64)
        .map(|g| {
            let mut rng = RngStream::for_replica(seed, g);
            (0..per_group).map(|_| brownian_increment(m, n, 1.0, &mut rng).unwrap()).collect()
        })
        .collect();
    EmpiricalLaw::from_replicas(replicas, LawMeta::default()).unwrap()
}

fn p(text: &str, m: usize) -> NCPoly {
    parse_poly(text, m).unwrap()
}

fn quadratic2() -> NCPoly {
    p("0.5*X1^2 + 0.5*X2^2", 2)
}

#[test]
fn semicircle_moments() {
    let law = semicircular(2, 96, 8, 6, 1);
    let tol = |e: freediff::laws::Estimate| 3.0 * e.stderr + 0.05;
    for (text, target) in [("X1^2", 1.0), ("X1^4", 2.0), ("X1^6", 5.0), ("X1*X2*X1*X2", 0.0), ("X1^2*X2^2", 1.0)] {
        let e = law.moment(&p(text, 2)).unwrap();
        assert!((e.value.re - target).abs() < tol(e), "{text}: {:?}", e);
    }
}

#[test]
fn base_case_residuals_are_moment_identities() {
    let law = semicircular(2, 24, 4, 3, 2);
    let v = quadratic2();
    let m = |t: &str| law.moment(&p(t, 2)).unwrap().value;
    let one = Complex64::new(1.0, 0.0);
    // P = X1: 1 − m2
    let r1 = law.sd_residual_component(&v, &p("X1", 2), 1).unwrap().value;
    assert!((r1 - (one - m("X1^2"))).norm() < 1e-12);
    // P = X1^3: 2 m2 + m1^2 − m4
    let r3 = law.sd_residual_component(&v, &p("X1^3", 2), 1).unwrap().value;
    let expect = m("X1^2") * 2.0 + m("X1") * m("X1") - m("X1^4");
    assert!((r3 - expect).norm() < 1e-12);
}

#[test]
fn stationary_suite_passes_and_frozen_law_fails() {
    let law = semicircular(2, 96, 8, 6, 3);
    let report = law.sd_residual_suite(&quadratic2(), 4, Tolerance::new(5.0, 0.5 / 96.0 / 96.0 + 0.05)).unwrap();
    assert_eq!(report.entries.len(), 2 * (2 + 4 + 8 + 16));
    assert!(report.all_pass(), "{:?}", report.failures().collect::<Vec<_>>());

    let z = MatrixTuple::new(vec![
        HermMatrix::from_real_diagonal(&[0.3, -0.1, 0.2]),
        HermMatrix::from_real_diagonal(&[0.1, 0.1, -0.4]),
    ])
    .unwrap();
    let frozen = EmpiricalLaw::from_replicas(vec![vec![z.clone()], vec![z]], LawMeta::default()).unwrap();
    let report = frozen.sd_residual_suite(&quadratic2(), 4, Tolerance::new(3.0, 0.05)).unwrap();
    assert!(report.failures().any(|e| e.polynomial == "X1"));
}

#[test]
fn moment_bound_examples() {
    let law = semicircular(2, 96, 8, 4, 4);
    assert!(law.moment_bound_check(2.2, 6).unwrap().all_pass());
    let low = law.moment_bound_check(0.5, 6).unwrap();
    let first = low.failures().next().unwrap();
    assert_eq!(first.polynomial, "X1^2");
}

#[test]
fn tensor_representations_agree() {
    let law = semicircular(2, 16, 3, 2, 5);
    let a = p("X1 + X2", 2);
    let b = p("X1*X2 - 2*X2", 2);
    let one = TensorPoly::elementary(a.clone(), b.clone()).unwrap();
    let mut split = TensorPoly::zero(2);
    split.push(p("X1", 2), b.clone()).unwrap();
    split.push(p("X2", 2), p("X1*X2", 2)).unwrap();
    split.push(p("X2", 2), p("-2*X2", 2)).unwrap();
    assert_eq!(one.expand(), split.expand());
    let x = law.tensor_moment(&one).unwrap().value;
    let y = law.tensor_moment(&split).unwrap().value;
    assert!((x - y).norm() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn state_axioms(
        (a, b) in (int_poly(2, 4, 4, true), int_poly(2, 4, 4, true)),
        z in int_coeff(),
        seed in any::<u64>(),
    ) {
        let law = semicircular(2, 8, 3, 2, seed);
        let mu = |q: &NCPoly| law.moment(q).unwrap().value;
        let scale = 1.0 + mu(&(&a.adjoint() * &a)).norm() + mu(&(&b.adjoint() * &b)).norm();

        prop_assert!((mu(&(&a + &b)) - (mu(&a) + mu(&b))).norm() <= 1e-12 * scale);
        prop_assert!((mu(&a.scale(z)) - z * mu(&a)).norm() <= 1e-12 * scale * (1.0 + z.norm()));
        prop_assert!((mu(&(&a * &b)) - mu(&(&b * &a))).norm() <= 1e-10 * scale);
        prop_assert!(mu(&(&a.adjoint() * &a)).re >= -1e-10);
        let h = &a + &a.adjoint();
        prop_assert!(mu(&h).im.abs() <= 1e-10 * scale);
        prop_assert_eq!(law.moment(&NCPoly::one(2)).unwrap().value, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn sd_forms_are_consistent(p in int_poly(2, 3, 3, false), seed in any::<u64>()) {
        let law = semicircular(2, 6, 3, 2, seed);
        let v = p_quartic();
        let mut total = Complex64::new(0.0, 0.0);
        for i in 1..=2 {
            let dp = p.cyclic_grad(i).unwrap();
            total += law.sd_residual_component(&v, &dp, i).unwrap().value;
        }
        prop_assert_eq!(law.sd_residual_thm2(&v, &p).unwrap().value, total);
    }
}

fn p_quartic() -> NCPoly {
    p("0.5*X1^2 + 0.5*X2^2 + 0.1*X1^4 + 0.3*X1*X2*X1*X2", 2)
}
