use canard_core::relief::ComplexPath;
use canard_core::shooter::*;
use num_complex::Complex64;

fn double() -> ShootConfig {
    ShootConfig { precision_digits: Some(16), ..Default::default() }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[test]
fn vdp_table_rows() {
    let rows = [(0.20, 0.9684, 0.00153, 1.07), (0.14, 0.9798, 0.000120, 1.23), (0.08, 0.9893, 1.40e-7, 1.37)];
    for (eps, re, im, obs) in rows {
        let r = find_vdp_alpha(eps, &ShootConfig::default()).unwrap();
        assert!((r.parameter.re - re).abs() < 5e-4, "{eps}: {}", r.parameter);
        assert!((r.parameter.im / im - 1.0).abs() < 0.05, "{eps}: {}", r.parameter);
        assert!((vdp_stokes_observable(eps, &r) - obs).abs() < 0.05);
        assert_eq!(r.precision_digits, 16);
    }
}

#[test]
fn vdp_real_part_follows_two_term_series() {
    let eps = [0.05, 0.06, 0.08, 0.1, 0.12, 0.14, 0.17, 0.2];
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for &e in &eps {
        let r = find_vdp_alpha(e, &double()).unwrap();
        let series = 1.0 - e / 8.0 - 3.0 * e * e / 32.0;
        lx.push(e.ln());
        ly.push((r.parameter.re - series).abs().ln());
    }
    assert!(slope(&lx, &ly) >= 2.7, "{}", slope(&lx, &ly));
}

#[test]
fn vdp_east_path_independence() {
    let base = ShootProblem::vdp(0.14).unwrap();
    let mut alt = base.clone();
    alt.path_b = ComplexPath::new(vec![Complex64::new(9.0, 0.0), Complex64::new(5.0, -1.0), Complex64::new(1.0, 0.0)])
        .unwrap();
    alt.certify().unwrap();
    let a = shoot(&base, &double()).unwrap().parameter;
    let b = shoot(&alt, &double()).unwrap().parameter;
    assert!((a - b).norm() < 10.0 * 1e-6 * base.expected_im, "{a} {b}");
}

#[test]
fn vdp_initial_value_insensitivity() {
    let base = ShootProblem::vdp(0.14).unwrap();
    let mut moved = base.clone();
    moved.y_b0 *= 1.1;
    let a = shoot(&base, &double()).unwrap().parameter;
    let b = shoot(&moved, &double()).unwrap().parameter;
    assert!((a - b).norm() < 1e-2 * a.im.abs(), "{a} {b}");
}

#[test]
fn vdp_conjugation_symmetry() {
    let p = ShootProblem::vdp(0.17).unwrap();
    let a = shoot(&p, &double()).unwrap().parameter;
    let b = shoot(&p.conj(), &double()).unwrap().parameter;
    assert!((a.conj() - b).norm() < 1e-12, "{a} {b}");
}

#[test]
fn vdp_imaginary_part_shrinks_with_eps() {
    let ims: Vec<f64> = [0.2, 0.17, 0.14, 0.11, 0.08]
        .iter()
        .map(|&e| find_vdp_alpha(e, &double()).unwrap().parameter.im)
        .collect();
    assert!(ims.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0), "{ims:?}");
    // log ℑα⁺ against 1/ε is steeper than any fixed power law
    let ratios: Vec<f64> = ims.windows(2).map(|w| (w[0] / w[1]).ln()).collect();
    assert!(ratios.windows(2).all(|w| w[1] > w[0]), "{ratios:?}");
}

#[test]
fn vdp_extended_precision_agrees_with_double() {
    let eps = 0.1;
    let lo = find_vdp_alpha(eps, &double()).unwrap();
    let cfg = ShootConfig { precision_digits: Some(30), ..Default::default() };
    let hi = find_vdp_alpha(eps, &cfg).unwrap();
    assert_eq!(hi.precision_digits, 30);
    assert!((lo.parameter.re - hi.parameter.re).abs() < 1e-12);
    assert!((lo.parameter.im / hi.parameter.im - 1.0).abs() < 1e-8, "{} {}", lo.parameter, hi.parameter);
    assert!(hi.parameter_text.1.len() >= 30);
}

#[test]
fn brusselator_real_part_follows_two_term_series() {
    let eps = [0.03, 0.04, 0.05, 0.06, 0.08, 0.1];
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for &e in &eps {
        let r = find_brusselator_a(e, &double()).unwrap();
        let series = 1.0 + 1.5 * e + 15.0 / 8.0 * e * e;
        lx.push(e.ln());
        ly.push((r.parameter.re - series).abs().ln());
    }
    assert!(slope(&lx, &ly) >= 2.7, "{}", slope(&lx, &ly));
}

#[test]
fn brusselator_mirror_gives_conjugate() {
    let p = ShootProblem::brusselator(0.08).unwrap();
    let plus = shoot(&p, &double()).unwrap().parameter;
    let minus = shoot(&p.conj(), &double()).unwrap().parameter;
    assert!(plus.im > 0.0);
    assert!((plus.conj() - minus).norm() < 1e-12, "{plus} {minus}");
}

#[test]
fn brusselator_exponent() {
    let eps = [0.02, 0.025, 0.03, 0.04, 0.05];
    let mut inv = Vec::new();
    let mut ly = Vec::new();
    for &e in &eps {
        let r = find_brusselator_a(e, &double()).unwrap();
        let obs = brusselator_stokes_observable(e, &r);
        assert!(obs > 1e-2 && obs < 1e2, "{e}: {obs}");
        inv.push(1.0 / e);
        ly.push((2.0 * r.parameter.im * e.powi(3)).ln());
    }
    let s = slope(&inv, &ly);
    assert!((s / (-2.0 / 3.0) - 1.0).abs() < 0.1, "{s}");
}
