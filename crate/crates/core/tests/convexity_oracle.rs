use freediff::convexity::{certify, convexity_gap, ConvexityReport, GapKind, Verdict};
use freediff::matmodel::{random_selfadjoint_tuple, MatrixTuple, RngStream};
use freediff::ncpoly::NCPoly;
use freediff::polylang::parse_poly;
use proptest::prelude::*;

/// `V'(x)` for a one-variable polynomial, read off its coefficients.
fn scalar_derivative(v: &NCPoly, x: f64) -> f64 {
    v.terms()
        .map(|(w, z)| {
            let k = w.degree() as i32;
            if k == 0 {
                0.0
            } else {
                z.re * k as f64 * x.powi(k - 1)
            }
        })
        .sum()
}

/// Dense grid over `[−M, M]²` at spacing `0.01·M`.
fn grid_refutes(v: &NCPoly, c: f64, m_bound: f64) -> bool {
    let pts: Vec<f64> = (0..=200).map(|k| -m_bound + k as f64 * 0.01 * m_bound).collect();
    pts.iter().any(|&x| {
        pts.iter().any(|&y| {
            let h = x - y;
            let lhs = (scalar_derivative(v, x) - scalar_derivative(v, y)) * h;
            let rhs = c * h * h;
            lhs - rhs < -1e-8 * 1f64.max(lhs.abs()).max(rhs.abs())
        })
    })
}

#[test]
fn scalar_certifier_agrees_with_grid() {
    let cases = [
        ("0.5*X1^2", 1.0, 1.0),
        ("0.5*X1^2", 1.0, 10.0),
        ("0.5*X1^2 + 0.1*X1^4", 1.0, 1.0),
        ("0.5*X1^2 + 0.1*X1^4", 1.0, 3.0),
        ("0.5*X1^2 - X1^3", 1.0, 10.0),
        ("0.5*X1^2 - X1^3", 0.0, 0.1),
        ("-0.5*X1^2", 0.0, 1.0),
    ];
    for (text, c, m_bound) in cases {
        let v = parse_poly(text, 1).unwrap();
        let report = certify(&v, c, m_bound, 2000, 1, &mut RngStream::new(17)).unwrap();
        assert_eq!(
            report.verdict == Verdict::Refuted,
            grid_refutes(&v, c, m_bound),
            "{text} at c = {c}, M = {m_bound}"
        );
    }
}

#[test]
fn cubic_scalar_witness() {
    let v = parse_poly("0.5*X1^2 - X1^3", 1).unwrap();
    let gap = convexity_gap(&v, &MatrixTuple::scalars(&[10.0]), &MatrixTuple::scalars(&[9.0]), 1.0).unwrap();
    assert!((gap - (-57.0)).abs() < 1e-9, "gap {gap}");
}

#[test]
fn witness_present_iff_refuted() {
    let mut rng = RngStream::new(3);
    for (text, m) in [("0.5*X1^2 + 0.5*X2^2", 2), ("0.5*X1^2 - X1^3 + 0.5*X2^2", 2)] {
        let v = parse_poly(text, m).unwrap();
        let r = certify(&v, 1.0, 10.0, 200, 3, &mut rng).unwrap();
        assert_eq!(r.witness.is_some(), r.verdict == Verdict::Refuted);
        if let Some(w) = &r.witness {
            assert!(w.recheck(&v, 1.0, GapKind::Operator).unwrap() < 0.0);
            assert_eq!(r.min_gap, w.gap);
        } else {
            assert!(r.min_gap >= -1e-8);
        }
        let back = ConvexityReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back.verdict, r.verdict);
        assert_eq!(back.min_gap, r.min_gap);
    }
}

#[test]
fn certification_is_reproducible() {
    let v = parse_poly("0.5*X1^2 + 0.5*X2^2 + 0.1*X1^4 + 0.1*X2^4", 2).unwrap();
    let a = certify(&v, 1.0, 2.0, 300, 4, &mut RngStream::new(8)).unwrap();
    let b = certify(&v, 1.0, 2.0, 300, 4, &mut RngStream::new(8)).unwrap();
    assert_eq!(a.to_json(), b.to_json());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gap_symmetry_and_diagonal(seed in any::<u64>(), n in 1usize..=6, c in -2.0..2.0f64) {
        let v = parse_poly("0.5*X1^2 + 0.2*X1^4 - 0.3*X1*X2*X1*X2 + X2^2 + 0.1*X2^3", 2).unwrap();
        let mut rng = RngStream::new(seed);
        let x = random_selfadjoint_tuple(2, n, 2.0, &mut rng).unwrap();
        let y = random_selfadjoint_tuple(2, n, 2.0, &mut rng).unwrap();
        let a = convexity_gap(&v, &x, &y, c).unwrap();
        let b = convexity_gap(&v, &y, &x, c).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
        prop_assert_eq!(convexity_gap(&v, &x, &x, c).unwrap(), 0.0);
    }
}
