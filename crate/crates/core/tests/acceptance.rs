//! Acceptance run: one PASS/FAIL line per criterion, computed from scratch.
//!
//! Criteria that a correct computation cannot meet against the published
//! numbers still print FAIL. For those the test asserts the diagnosed cause
//! instead, so a regression in either direction is caught.

use std::time::Instant;

use canard_core::asymptotics::{
    brusselator_a_series, brusselator_constant_probe, fit_bn, sum_smallest_term, FitModel, DEFAULT_FIT_RANGE,
};
use canard_core::complex_ode::{integrate_along_path, IntegratorConfig, OdeField};
use canard_core::exact_algebra::{DensePolynomial, ExactRational, PoleRationalFunction, TruncatedSeries};
use canard_core::formal_canard::{brusselator_normal_form, canard_formal, vdp_bn, vdp_series, vdp_theoretical_constant};
use canard_core::inner_stokes::{
    brusselator_identity_integral, brusselator_inner_t, brusselator_inner_y0, brusselator_stokes_diff, vdp_inner_y0,
    vdp_inner_y0_ode, vdp_stokes_diff, AiryBranch, BrusselatorBranch,
};
use canard_core::relief::ComplexPath;
use canard_core::shooter::{
    brusselator_stokes_limit, brusselator_stokes_observable, find_brusselator_a, find_vdp_alpha, vdp_stokes_observable,
    ShootConfig,
};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rug::Float;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn r(n: i64, d: i64) -> ExactRational {
    ExactRational::new(n, d)
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn double() -> ShootConfig {
    ShootConfig { precision_digits: Some(16), ..Default::default() }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn line(n: usize, o: &Outcome) {
    println!("criterion {n:>2}: {}  {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
}

const PUBLISHED_BN: [f64; 21] = [
    -0.5417512651,
    -0.5418690317,
    -0.5419854885,
    -0.5421006603,
    -0.5422145711,
    -0.5423272443,
    -0.5424387024,
    -0.5425489682,
    -0.5426580621,
    -0.5427660064,
    -0.5428728208,
    -0.5429785257,
    -0.5430831405,
    -0.5431866841,
    -0.5432891757,
    -0.5433906324,
    -0.5434910728,
    -0.5435905137,
    -0.5436889722,
    -0.5437864645,
    -0.5438830066,
];

/// S_n = Σ_j v_j v'_{n−j}; the recurrence requires S_n(1) = a_{n+1}.
fn identity_holds(v: &[PoleRationalFunction], a_next: &ExactRational, n: usize) -> bool {
    let pole = ExactRational::from_int(-1);
    let mut s = PoleRationalFunction::polynomial(DensePolynomial::zero(), pole);
    for j in 0..=n {
        s = s.add(&v[j].mul(&v[n - j].derivative()).unwrap()).unwrap();
    }
    let (_, rem) = s.numerator().div_rem_linear(&ExactRational::one());
    let lifted = a_next.clone() * DensePolynomial::linear_power(&ExactRational::from_int(-1), s.pole_order()).eval(&ExactRational::one());
    rem == lifted
}

fn criterion_1() -> (Outcome, Vec<ExactRational>) {
    let t = Instant::now();
    let s = vdp_series(155).expect("every (u − 1) division in the recurrence is exact");
    let secs = t.elapsed().as_secs_f64();
    let first = s.a[1] == r(-1, 8) && s.a[2] == r(-3, 32);
    let v1 = PoleRationalFunction::new(DensePolynomial::from_ints(&[7, 4, 1]).scale(&r(-1, 8)), ExactRational::from_int(-1), 4);
    let v2 = DensePolynomial::from_ints(&[121, 159, 126, 66, 21, 3]).scale(&r(-1, 32));
    let displays = s.v[1] == v1 && s.v[2].numerator() == &v2 && s.v[2].pole_order() == 7;
    let law = (1..=155).all(|n| s.v[n].numerator().degree() == Some(3 * n - 1) && s.v[n].pole_order() == 3 * n as u32 + 1);
    let identity = [0usize, 7, 30].iter().all(|&n| identity_holds(&s.v, &s.a[n + 1], n));
    let pass = secs < 300.0 && first && displays && law && identity;
    (
        Outcome {
            pass,
            detail: format!(
                "vdp_series(155) in {secs:.1} s; a_1, a_2 exact: {first}; v_1, v_2 displays: {displays}; degree/pole law n ≤ 155: {law}; remainder identity: {identity}"
            ),
        },
        s.a,
    )
}

fn criterion_2(series_a: &[ExactRational]) -> (Outcome, Vec<(usize, f64)>) {
    let s = canard_core::formal_canard::VdpSeries { a: series_a.to_vec(), v: Vec::new() };
    let pts: Vec<(usize, f64)> = (135..=155).map(|n| (n, vdp_bn(&s, n, 15).unwrap().to_f64())).collect();
    let worst = pts.iter().zip(PUBLISHED_BN).map(|(&(_, b), p)| (b - p).abs()).fold(0.0, f64::max);
    let pass = worst <= 5e-11;
    // Relative deviation published/exact − 1 grows linearly in n: e was truncated to 2.718281828.
    let e_trunc = 2.718281828f64;
    let rel_e = e_trunc / std::f64::consts::E - 1.0;
    let per_n: Vec<f64> = pts.iter().zip(PUBLISHED_BN).map(|(&(n, b), p)| (p / b - 1.0) / n as f64).collect();
    let mean = per_n.iter().sum::<f64>() / per_n.len() as f64;
    let truncated_e_fits = (mean / rel_e - 1.0).abs() < 0.02;
    if !pass {
        assert!(worst < 2e-8 && truncated_e_fits, "b_n deviate from the published table in an unexplained way");
    }
    (
        Outcome {
            pass,
            detail: format!(
                "worst |b_n − published| = {worst:.2e} (need 5e-11); published/exact − 1 = {mean:.4e}·n, truncated e predicts {rel_e:.4e}·n"
            ),
        },
        pts,
    )
}

fn criterion_3(pts: &[(usize, f64)]) -> Outcome {
    let th = vdp_theoretical_constant(128).to_f64();
    let sq = fit_bn(pts, FitModel::InvSqrtN, DEFAULT_FIT_RANGE).unwrap();
    let cb = fit_bn(pts, FitModel::InvCbrtN, DEFAULT_FIT_RANGE).unwrap();
    let pass = cb.c < th && th < sq.c && cb.c < -0.5813148764 && -0.5813148764 < sq.c;
    Outcome { pass, detail: format!("C(1/∛n) = {:.10} < {th:.10} < C(1/√n) = {:.10}", cb.c, sq.c) }
}

fn criterion_4() -> Outcome {
    let rows = [(0.20, 0.9684, 0.00153, 1.07), (0.17, 0.9733, 0.00055, 1.16), (0.14, 0.9800, 0.000120, 1.23), (0.08, 0.9893, 1.40e-7, 1.37)];
    let mut pass = true;
    let mut notes = Vec::new();
    for (eps, re, im, obs) in rows {
        let t = Instant::now();
        let a = find_vdp_alpha(eps, &double()).unwrap();
        let secs = t.elapsed().as_secs_f64();
        let o = vdp_stokes_observable(eps, &a);
        let ok_re = (a.parameter.re - re).abs() <= 5e-4;
        let ok_im = (a.parameter.im / im - 1.0).abs() <= 0.05;
        let ok_obs = (o - obs).abs() <= 0.05;
        let ok = ok_re && ok_im && ok_obs && secs < 60.0;
        pass &= ok;
        notes.push(format!("ε={eps}: {:.6}{:+.3e}i obs {o:.3} {}", a.parameter.re, a.parameter.im, if ok { "ok" } else { "MISS" }));
        if eps == 0.17 && !ok_re {
            // The smallest-term sum sides with shooting: the printed digit is off.
            let sum = sum_smallest_term(&vdp_series(60).unwrap().a, eps).unwrap().value;
            assert!((sum - a.parameter.re).abs() < 2e-4 && ok_im && ok_obs, "ε = 0.17 row fails beyond the real-part misprint");
            notes.push(format!("smallest-term sum at 0.17: {sum:.5}"));
        }
    }
    Outcome { pass, detail: notes.join("; ") }
}

fn criterion_5() -> Outcome {
    let cfg = IntegratorConfig::with_tol(1e-13);
    let worst = [5.0, 7.5, 10.0, 12.5, 15.0]
        .iter()
        .map(|&x| {
            let ode = vdp_inner_y0_ode(x, true, &cfg).unwrap();
            let airy = vdp_inner_y0(c(x, 0.0), AiryBranch::new(2).unwrap()).unwrap();
            (ode - airy).norm()
        })
        .fold(0.0, f64::max);
    let ratios: Vec<f64> = [2.5, 3.0, 3.5].iter().map(|&x| vdp_stokes_diff(x, None).unwrap().ratio).collect();
    let positive = ratios.iter().all(|&q| q > 0.0);
    let trend = ratios.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs());
    let pass = worst < 1e-8 && positive && trend && (ratios[2] - 1.0).abs() <= 0.15;
    Outcome { pass, detail: format!("max |Airy − ODE| on [5,15] = {worst:.1e}; ratio at 2.5, 3, 3.5 = {ratios:.4?}") }
}

fn criterion_6() -> Outcome {
    let nx = 12;
    let sol = canard_formal(&brusselator_normal_form(3, nx)).unwrap();
    let a = sol.a_constants();
    // (3/4)(2+x)/(1+x)² = (3/4)(2+x)·Σ(k+1)(−x)^k
    let two_plus_x = TruncatedSeries::new(vec![r(2, 1), r(1, 1)], nx);
    let inv_sq = TruncatedSeries::new((0..=nx as i64).map(|k| r(if k % 2 == 0 { k + 1 } else { -(k + 1) }, 1)).collect(), nx);
    let y0 = two_plus_x.mul(&inv_sq).scale(&r(3, 4));
    let matches = (0..=nx.min(sol.y[0].order())).all(|k| sol.y[0].coeff(k) == y0.coeff(k));
    let pass = a[0] == r(3, 2) && a[1] == r(15, 8) && matches;
    Outcome { pass, detail: format!("α_0 = {}, α_1 = {}; y_0 matches closed form through x^{}: {matches}", a[0], a[1], sol.y[0].order()) }
}

fn criterion_7() -> Outcome {
    let id = brusselator_identity_integral(8.0);
    let id_err = (id - c(0.0, (2.0 * std::f64::consts::PI).sqrt())).norm();
    let h = 1e-4;
    let b = BrusselatorBranch::Plus;
    let riccati = [c(3.0, 0.0), c(5.0, 1.0), c(-2.0, 3.0), c(8.0, -1.0)]
        .iter()
        .map(|&v| {
            let t = brusselator_inner_t(v, b).unwrap();
            let d = (brusselator_inner_t(v + h, b).unwrap() - brusselator_inner_t(v - h, b).unwrap()) / (2.0 * h);
            (d - (t * t + 2.0 - v * t)).norm()
        })
        .fold(0.0, f64::max);
    let inner = [c(2.0, 0.0), c(3.0, 0.5), c(6.0, 0.0), c(10.0, -1.0)]
        .iter()
        .map(|&x| {
            let y = brusselator_inner_y0(x, b).unwrap();
            let d = (brusselator_inner_y0(x + h, b).unwrap() - brusselator_inner_y0(x - h, b).unwrap()) / (2.0 * h);
            (y * d + (2.0 / x) * (y - 0.5 / x.powi(3)) * (y + 1.0 / x)).norm()
        })
        .fold(0.0, f64::max);
    let xs = [2.5, 2.75, 3.0, 3.25, 3.5];
    let diffs: Vec<_> = xs.iter().map(|&x| brusselator_stokes_diff(x, None).unwrap()).collect();
    let x2: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let ly: Vec<f64> = diffs.iter().zip(&xs).map(|(d, x)| (d.diff.norm() / x.powi(4)).ln()).collect();
    let s = slope(&x2, &ly);
    let ratio = diffs[2].ratio;
    let shape = id_err < 1e-8 && riccati < 1e-7 && inner < 1e-7 && (s + 2.0).abs() <= 0.05;
    let pass = shape && (ratio - 1.0).abs() <= 0.25;
    if !pass {
        // Diagnosed cause: the closed form carries −e^{−3} relative to the stated constant.
        assert!(shape, "Brusselator inner checks fail beyond the constant");
        assert!((ratio / -(-3.0f64).exp() - 1.0).abs() < 0.2, "ratio {ratio} is not the −e⁻³ discrepancy");
    }
    Outcome {
        pass,
        detail: format!(
            "identity err {id_err:.1e}; Riccati residual {riccati:.1e}; inner residual {inner:.1e}; slope {s:.4}; ratio at X = 3 is {ratio:.4} (−e⁻³ = {:.4})",
            -(-3.0f64).exp()
        ),
    }
}

fn criterion_8(a: &[ExactRational]) -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    let grid = [0.05, 0.06, 0.07, 0.08, 0.09, 0.1, 0.11, 0.12];
    let mut inv = Vec::new();
    let mut ld = Vec::new();
    for &eps in &grid {
        let alpha = find_vdp_alpha(eps, &double()).unwrap().parameter.re;
        let sum = sum_smallest_term(a, eps).unwrap().value;
        let d = (sum - alpha).abs();
        let bound = 100.0 * (-4.0 / (3.0 * eps)).exp();
        if [0.05, 0.08, 0.1].contains(&eps) {
            pass &= d <= bound;
            notes.push(format!("ε={eps}: |Δ| = {d:.2e} ≤ {bound:.2e}"));
        }
        inv.push(1.0 / eps);
        ld.push(d.ln());
    }
    let s = slope(&inv, &ld);
    pass &= (-1.47..=-1.20).contains(&s);
    notes.push(format!("slope on [0.05, 0.12] = {s:.4}"));
    Outcome { pass, detail: notes.join("; ") }
}

fn criterion_9() -> Outcome {
    let grid = [0.05, 0.06, 0.07, 0.08, 0.09, 0.1, 0.11, 0.12];
    let mut inv = Vec::new();
    let mut ly = Vec::new();
    let mut obs = Vec::new();
    for &eps in &grid {
        let res = find_brusselator_a(eps, &double()).unwrap();
        let o = brusselator_stokes_observable(eps, &res);
        obs.push(o);
        inv.push(1.0 / eps);
        ly.push((2.0 * res.parameter.im * eps.powi(3)).ln());
    }
    let s = slope(&inv, &ly);
    let bounded = obs.iter().all(|&o| o > 0.0 && o < 1e2);
    let pass = bounded && (s / (-2.0 / 3.0) - 1.0).abs() <= 0.1;
    let last = *obs.first().unwrap();
    Outcome {
        pass,
        detail: format!(
            "observable {:.4}..{:.4} on [0.05, 0.12]; exponent slope {s:.4} (−2/3); at ε = 0.05 the observable is {:.4} of 64e^-3 and {:.4} of 64e^-6",
            obs.iter().cloned().fold(f64::INFINITY, f64::min),
            obs.iter().cloned().fold(0.0, f64::max),
            last / brusselator_stokes_limit(),
            last / (64.0 * (-6.0f64).exp()),
        ),
    }
}

fn criterion_10() -> Outcome {
    let p = brusselator_constant_probe(&brusselator_a_series(30).unwrap()).unwrap();
    let rendered = serde_json::to_string(&p).is_ok();
    let pass = rendered && p.extrapolated.is_finite() && p.candidates.iter().any(|c| c.name == p.nearest);
    Outcome {
        pass,
        detail: format!(
            "extrapolated limit {:.5}; nearest stated constant {} (ratio {:.4}); 108e^-6/pi ratio {:.4}",
            p.extrapolated, p.nearest, p.ratio_to_nearest, p.ratio_to_derived
        ),
    }
}

fn rational() -> impl Strategy<Value = ExactRational> {
    (-60i64..=60, 1i64..=24).prop_map(|(n, d)| r(n, d))
}

fn cplx(b: f64) -> impl Strategy<Value = Complex64> {
    (-b..b, -b..b).prop_map(|(x, y)| c(x, y))
}

/// εy' = k0 + k1 x + k2 y + k3 y² with ε = 1.
fn riccati(k: [Complex64; 4]) -> OdeField {
    let z = c(0.0, 0.0);
    OdeField::user_polynomial(c(1.0, 0.0), vec![vec![k[0], k[2], k[3]], vec![k[1], z, z]])
}

fn criterion_11() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let mut record = |name: &str, cases: u32, r: Result<(), String>| {
        notes.push(format!("{name} ({cases}): {}", if r.is_ok() { "ok" } else { "FAILED" }));
        if let Err(e) = r {
            println!("    {name}: {e}");
            pass = false;
        }
    };

    let cases = 256;
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    let series = (prop::collection::vec(rational(), 9), prop::collection::vec(rational(), 8), rational());
    let res = runner.run(&series, |(num, tail, d0)| {
        prop_assume!(!d0.is_zero());
        let num = TruncatedSeries::new(num, 8);
        let mut dc = vec![d0];
        dc.extend(tail);
        let den = TruncatedSeries::new(dc, 8);
        prop_assert_eq!(num.div(&den).unwrap().mul(&den), num);
        Ok(())
    });
    record("series division", cases, res.map_err(|e| e.to_string()));

    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    let res = runner.run(&(prop::collection::vec(rational(), 0..8), rational(), rational()), |(q, root, x)| {
        let q = DensePolynomial::new(q);
        let p = q.mul(&DensePolynomial::linear_root(&root));
        prop_assert_eq!(p.div_exact_linear(&root).unwrap(), q.clone());
        prop_assert_eq!(p.eval(&x), q.eval(&x) * (x.clone() - root));
        Ok(())
    });
    record("exact linear division", cases, res.map_err(|e| e.to_string()));

    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    let res = runner.run(&(rational(), rational()), |(a, b)| {
        let s = a.clone() * b.clone() + a.clone();
        prop_assert!(s.is_canonical());
        prop_assert_eq!(s.to_string().parse::<ExactRational>().unwrap(), s);
        Ok(())
    });
    record("rational canonical form", cases, res.map_err(|e| e.to_string()));

    let cases = 64;
    let tol = 1e-11;
    let cfg = IntegratorConfig::with_tol(tol);
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    let strat = ([cplx(1.0), cplx(1.0), cplx(1.0), cplx(0.3)], cplx(1.0), cplx(1.0), cplx(1.0), cplx(0.5), 0.05f64..0.95);
    let res = runner.run(&strat, |(k, a, b, mid, y0, t)| {
        prop_assume!((b - mid).norm() > 0.1 && (mid - a).norm() > 0.1);
        let field = riccati(k);
        let path = ComplexPath::new(vec![a, mid, b]).unwrap();
        let whole = integrate_along_path(&field, &path, y0, &cfg);
        prop_assume!(whole.is_ok());
        let whole = whole.unwrap().end_value;
        let split = integrate_along_path(&field, &path.split_segment(0, t), y0, &cfg).unwrap().end_value;
        prop_assert!((whole - split).norm() <= 10.0 * tol * (1.0 + whole.norm()));
        Ok(())
    });
    record("path refinement", cases, res.map_err(|e| e.to_string()));

    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    let strat = ([cplx(1.0), cplx(1.0), cplx(1.0), cplx(0.3)], cplx(1.0), cplx(1.0), cplx(0.5));
    let res = runner.run(&strat, |(k, a, b, y0)| {
        prop_assume!((b - a).norm() > 0.1);
        let field = riccati(k);
        let path = ComplexPath::segment(a, b).unwrap();
        let fwd = integrate_along_path(&field, &path, y0, &cfg);
        prop_assume!(fwd.is_ok());
        let back = integrate_along_path(&field, &path.reversed(), fwd.unwrap().end_value, &cfg).unwrap().end_value;
        prop_assert!((back - y0).norm() <= 10.0 * tol * (1.0 + y0.norm()));
        Ok(())
    });
    record("reversibility", cases, res.map_err(|e| e.to_string()));

    Outcome { pass, detail: format!("{}; full suites in the module test targets", notes.join(", ")) }
}

#[test]
fn acceptance() {
    // b_1 = −e/6 pins the log-domain evaluation before anything else runs.
    let b1 = vdp_bn(&vdp_series(2).unwrap(), 1, 20).unwrap();
    assert!(Float::with_val(128, &b1 + Float::with_val(128, 1).exp() / 6u32).abs() < 1e-30);

    let (o1, a) = criterion_1();
    line(1, &o1);
    let (o2, pts) = criterion_2(&a);
    line(2, &o2);
    let o3 = criterion_3(&pts);
    line(3, &o3);
    let o4 = criterion_4();
    line(4, &o4);
    let o5 = criterion_5();
    line(5, &o5);
    let o6 = criterion_6();
    line(6, &o6);
    let o7 = criterion_7();
    line(7, &o7);
    let o8 = criterion_8(&a);
    line(8, &o8);
    let o9 = criterion_9();
    line(9, &o9);
    let o10 = criterion_10();
    line(10, &o10);
    let o11 = criterion_11();
    line(11, &o11);

    let all = [&o1, &o2, &o3, &o4, &o5, &o6, &o7, &o8, &o9, &o10, &o11];
    println!("summary: {} of 11 criteria pass", all.iter().filter(|o| o.pass).count());
    // Criteria 2, 4 and 7 compare against published numbers with diagnosed
    // misprints; their causes are asserted above. Everything else must hold.
    for (n, o) in all.iter().enumerate() {
        if ![2, 4, 7].contains(&(n + 1)) {
            assert!(o.pass, "criterion {} failed: {}", n + 1, o.detail);
        }
    }
}
