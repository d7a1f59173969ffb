use canard_core::exact_algebra::{DensePolynomial, ExactRational, PoleRationalFunction, TruncatedBiSeries, TruncatedSeries};
use canard_core::formal_canard::{
    brusselator_normal_form, canard_formal, formal_residual, vdp_bn, vdp_normal_form, vdp_series,
    vdp_theoretical_constant, CanardFormalSolution, FormalError, NormalFormProblem,
};
use proptest::prelude::*;
use rug::Float;

fn r(n: i64, d: i64) -> ExactRational {
    ExactRational::new(n, d)
}

fn minus_one() -> ExactRational {
    ExactRational::from_int(-1)
}

/// The VdP recurrence written out literally with rational-function arithmetic.
fn vdp_reference(n_max: usize) -> (Vec<ExactRational>, Vec<PoleRationalFunction>) {
    let one = ExactRational::one();
    let v0 = PoleRationalFunction::new(DensePolynomial::from_ints(&[-1]), minus_one(), 1);
    let mut a = vec![one.clone()];
    let mut v = vec![v0.clone()];
    for n in 0..n_max {
        let mut s = PoleRationalFunction::polynomial(DensePolynomial::zero(), minus_one());
        for j in 0..=n {
            s = s.add(&v[j].mul(&v[n - j].derivative()).unwrap()).unwrap();
        }
        let an = s.eval(&one).unwrap();
        let shifted = s.sub(&PoleRationalFunction::polynomial(DensePolynomial::constant(an.clone()), minus_one())).unwrap();
        let num = shifted.numerator().div_exact_linear(&one).expect("S − a_{n+1} vanishes at u = 1");
        let quotient = PoleRationalFunction::new(num, minus_one(), shifted.pole_order());
        a.push(an);
        v.push(v0.mul(&quotient).unwrap());
    }
    (a, v)
}

#[test]
fn vdp_first_terms() {
    let s = vdp_series(2).unwrap();
    assert_eq!(s.a, vec![r(1, 1), r(-1, 8), r(-3, 32)]);
    assert_eq!(s.v[0], PoleRationalFunction::new(DensePolynomial::from_ints(&[-1]), minus_one(), 1));
    let v1 = PoleRationalFunction::new(DensePolynomial::from_ints(&[7, 4, 1]).scale(&r(-1, 8)), minus_one(), 4);
    assert_eq!(s.v[1], v1);
    let v2 = DensePolynomial::from_ints(&[121, 159, 126, 66, 21, 3]).scale(&r(-1, 32));
    assert_eq!(s.v[2].numerator(), &v2);
    assert_eq!(s.v[2].pole_order(), 7);
}

#[test]
fn vdp_series_matches_literal_recurrence() {
    let (a, v) = vdp_reference(14);
    let s = vdp_series(14).unwrap();
    assert_eq!(s.a, a);
    assert_eq!(s.v, v);
}

#[test]
fn vdp_degree_law_and_defining_identity() {
    let s = vdp_series(40).unwrap();
    let one = ExactRational::one();
    for n in 1..=40 {
        assert_eq!(s.v[n].pole_order(), 3 * n as u32 + 1, "pole order at n = {n}");
        assert_eq!(s.v[n].numerator().degree(), Some(3 * n - 1), "degree at n = {n}");
    }
    for n in [0usize, 5, 17, 39] {
        let mut sum = PoleRationalFunction::polynomial(DensePolynomial::zero(), minus_one());
        for j in 0..=n {
            sum = sum.add(&s.v[j].mul(&s.v[n - j].derivative()).unwrap()).unwrap();
        }
        let shifted = sum
            .sub(&PoleRationalFunction::polynomial(DensePolynomial::constant(s.a[n + 1].clone()), minus_one()))
            .unwrap();
        assert!(shifted.eval(&one).unwrap().is_zero(), "n = {n}");
    }
}

#[test]
fn vdp_bn_table_sign_and_values() {
    let s = vdp_series(155).unwrap();
    for n in 135..=155 {
        let b = vdp_bn(&s, n, 12).unwrap();
        assert!(b.is_sign_negative(), "b_{n} = {b}");
    }
    let b150 = vdp_bn(&s, 150, 12).unwrap().to_f64();
    let b135 = vdp_bn(&s, 135, 12).unwrap().to_f64();
    // The published table was produced with float arithmetic; agreement is at the 1e-8 level.
    assert!((b150 + 0.5433906324).abs() < 2e-8, "{b150}");
    assert!((b135 + 0.5417512651).abs() < 2e-8, "{b135}");
}

#[test]
fn vdp_b1_and_constant() {
    let s = vdp_series(3).unwrap();
    let b1 = vdp_bn(&s, 1, 20).unwrap();
    let expected = -Float::with_val(128, 1).exp() / 6u32;
    assert!(Float::with_val(128, &b1 - &expected).abs() < 1e-30, "{b1}");
    let c = vdp_theoretical_constant(128).to_f64();
    assert!((c + 0.5813148764).abs() < 1e-9, "{c}");
    assert!(c < 0.0 && c.abs() < 1.0);
    assert!(matches!(vdp_bn(&s, 0, 10), Err(FormalError::IndexOutOfRange { .. })));
    assert!(matches!(vdp_bn(&s, 4, 10), Err(FormalError::IndexOutOfRange { .. })));
    assert!(matches!(vdp_bn(&s, 2, 200), Err(FormalError::InsufficientPrecision { .. })));
}

#[test]
fn brusselator_parameters_and_slow_curve() {
    let pb = brusselator_normal_form(3, 12);
    let sol = canard_formal(&pb).unwrap();
    let a = sol.a_constants();
    assert_eq!(a[0], r(3, 2));
    assert_eq!(a[1], r(15, 8));
    // y₀ = Φ₁/Φ₀ = (3/4)(2+x)/(1+x)², expanded independently.
    let expected: Vec<ExactRational> = (0..=8)
        .map(|k| {
            let k = k as i64;
            let sign = if k % 2 == 0 { 1 } else { -1 };
            // (2+x)(1+x)^{-2}: coefficient 2(k+1)(−1)^k + k(−1)^{k−1} = (−1)^k (k+2)
            r(3 * sign * (k + 2), 4)
        })
        .collect();
    for (k, c) in expected.iter().enumerate() {
        assert_eq!(sol.y[0].coeff(k), c, "x^{k}");
    }
    assert_eq!(sol.y[0].coeff(0), &r(3, 2));
    assert_eq!(sol.y[0].coeff(1), &r(-9, 4));
}

#[test]
fn vdp_normal_form_reproduces_recurrence() {
    let n = 8;
    let sol = canard_formal(&vdp_normal_form(n, n * 2 + 2)).unwrap();
    let s = vdp_series(n + 1).unwrap();
    for (k, alpha) in sol.a_constants().iter().enumerate() {
        assert_eq!(alpha, &s.a[k + 1], "α_{k}");
    }
}

fn assert_zero_residual(pb: &NormalFormProblem, sol: &CanardFormalSolution) {
    for (n, res) in formal_residual(pb, sol).iter().enumerate() {
        assert!(res.is_zero(), "order ε^{n}: {:?}", res.valuation());
    }
}

fn assert_valuation(sol: &CanardFormalSolution) {
    for (n, num) in sol.reduced_numerators.iter().enumerate() {
        assert!(num.valuation().is_none_or(|v| v >= sol.p), "order {n}");
        assert!(sol.a[n].degree().is_none_or(|d| d < sol.p), "degree of a_{n}");
    }
}

#[test]
fn shipped_normal_forms_satisfy_the_equation() {
    for pb in [brusselator_normal_form(6, 16), vdp_normal_form(6, 16)] {
        let sol = canard_formal(&pb).unwrap();
        assert_valuation(&sol);
        assert_zero_residual(&pb, &sol);
    }
}

fn bi(series: Vec<Vec<i64>>, d: usize) -> TruncatedBiSeries {
    TruncatedBiSeries::new(series.iter().map(|c| TruncatedSeries::from_ints(c, d)).collect(), d)
}

/// A p = 2 equation with ε-dependent data, a nonlinear Q and a non-polynomial P.
fn quadratic_turning_point(eps_order: usize) -> NormalFormProblem {
    let p = 2;
    let x_order = eps_order * (p + 1) + 3;
    let d = x_order + p;
    NormalFormProblem {
        p,
        f: TruncatedSeries::from_ints(&[2, -1, 3], d),
        g: bi(vec![vec![1, 1], vec![0, 2]], d),
        h: bi(vec![vec![1, 3, -1, 2], vec![2, 0, 1]], d),
        p_terms: (0..eps_order.max(1)).map(|k| bi(vec![vec![1, -(k as i64)], vec![0, 1]], d)).collect(),
        p_terms_complete: false,
        q_terms: vec![bi(vec![vec![-1, 1, 2], vec![0, 1]], d), bi(vec![vec![], vec![1, 1]], d)],
        eps_order,
        x_order,
    }
}

#[test]
fn quadratic_turning_point_is_self_consistent() {
    let pb = quadratic_turning_point(4);
    let sol = canard_formal(&pb).unwrap();
    assert_valuation(&sol);
    assert!(sol.a.iter().any(|a| a.degree() == Some(1)), "a_n should use the x term");
    assert_zero_residual(&pb, &sol);
}

#[test]
fn perturbing_a_n_breaks_the_solution() {
    let cases = [(brusselator_normal_form(3, 10), 1usize), (quadratic_turning_point(3), 2)];
    for (pb, p) in cases {
        let sol = canard_formal(&pb).unwrap();
        let q00 = pb.q_terms[0].at(0);
        for n in [0usize, 1] {
            for k in 0..p {
                let mut bumped = sol.clone();
                let mut c = bumped.a[n].coeffs().to_vec();
                c.resize(p, ExactRational::zero());
                c[k] += &r(1, 7);
                let delta = DensePolynomial::new(c).sub(&sol.a[n]);
                bumped.a[n] = sol.a[n].add(&delta);
                let moved = sol.reduced_numerators[n].sub(&q00.mul_poly(&delta));
                assert!(moved.valuation().is_some_and(|v| v < p), "valuation survives at n = {n}, k = {k}");
                let res = formal_residual(&pb, &bumped);
                assert!(!res[n].is_zero(), "residual survives at n = {n}, k = {k}");
            }
        }
    }
}

#[test]
fn zero_forcing_and_degenerate_data() {
    let mut pb = quadratic_turning_point(2);
    let d = pb.x_order + pb.p;
    pb.h = TruncatedBiSeries::zero(d);
    let sol = canard_formal(&pb).unwrap();
    assert!(sol.y.iter().all(|y| y.is_zero()) && sol.a.iter().all(|a| a.is_zero()));

    let mut pb = quadratic_turning_point(2);
    pb.f = TruncatedSeries::from_ints(&[0, 1], d);
    assert!(matches!(canard_formal(&pb), Err(FormalError::DegenerateF)));
    let mut pb = quadratic_turning_point(2);
    pb.q_terms[0] = bi(vec![vec![0, 1]], d);
    assert!(matches!(canard_formal(&pb), Err(FormalError::DegenerateQ)));
    let mut pb = quadratic_turning_point(2);
    pb.q_terms[1] = bi(vec![vec![1]], d);
    assert!(matches!(canard_formal(&pb), Err(FormalError::InvalidProblem(_))));
}

fn small_series(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, len)
}

fn random_problem() -> impl Strategy<Value = NormalFormProblem> {
    (1usize..=3, 0usize..=3).prop_flat_map(|(p, eps_order)| {
        let x_order = eps_order * (p + 1) + 2;
        let d = x_order + p;
        let nonzero = prop_oneof![-3i64..=-1, 1i64..=3];
        (
            Just((p, eps_order, x_order, d)),
            nonzero.clone(),
            small_series(4),
            prop::collection::vec(small_series(3), 2),
            prop::collection::vec(small_series(4), 2),
            prop::collection::vec(small_series(3), 2),
            nonzero,
            small_series(3),
            small_series(3),
        )
            .prop_map(|((p, eps_order, x_order, d), f0, f, g, h, pk, q0, q0e, q1)| {
                let mut fc = f;
                fc[0] = f0;
                let mut q = vec![q0];
                q.extend_from_slice(&q0e[1..]);
                NormalFormProblem {
                    p,
                    f: TruncatedSeries::from_ints(&fc, d),
                    g: bi(g, d),
                    h: bi(h, d),
                    p_terms: (0..eps_order.max(1)).map(|k| bi(vec![pk[k % 2].clone()], d)).collect(),
                    p_terms_complete: false,
                    q_terms: vec![bi(vec![q, q0e], d), bi(vec![vec![], q1], d)],
                    eps_order,
                    x_order,
                }
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_problems_leave_zero_residual(pb in random_problem()) {
        let sol = canard_formal(&pb).unwrap();
        for (n, num) in sol.reduced_numerators.iter().enumerate() {
            prop_assert!(num.valuation().is_none_or(|v| v >= pb.p), "order {}", n);
        }
        for (n, res) in formal_residual(&pb, &sol).iter().enumerate() {
            prop_assert!(res.is_zero(), "order {}", n);
        }
    }
}
