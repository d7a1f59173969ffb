//! Dormand–Prince 5(4) with PI step control along a polyline.
//!
//! On each segment [A, B] the path is x(s) = A + s(B − A), s ∈ [0, 1], and the
//! integrator advances dy/ds = (B − A)·G(x(s), y). The position s is kept in the
//! working scalar so big-float runs are not limited by double-precision
//! abscissae; step sizes themselves are plain `f64`.

use num_complex::Complex64;
use serde::Serialize;

use super::{Field, OdeError, OdeField};
use crate::relief::ComplexPath;
use crate::scalar::{bits_for_digits, from_c64, norm_f64, to_c64, with_precision_bits, BigReal, Real, C};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// ≤ 16 runs in hardware double, otherwise MPFR.
    pub precision_digits: u32,
    pub max_steps: usize,
    /// Smallest admissible step in path length.
    pub min_step: f64,
    /// Record accepted steps for dense output.
    pub dense: bool,
    /// Pole guard: |y| must stay above `guard · |y0|` for dividing kinds.
    pub guard: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            precision_digits: 16,
            max_steps: 2_000_000,
            min_step: 0.0,
            dense: false,
            guard: 1e-8,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tol(tol: f64) -> Self {
        IntegratorConfig { rel_tol: tol, abs_tol: tol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), OdeError> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(OdeError::InvalidConfig("tolerances must be positive".into()));
        }
        if self.precision_digits < 15 {
            return Err(OdeError::InvalidConfig("precision_digits must be at least 15".into()));
        }
        Ok(())
    }
}

/// One accepted step, enough for cubic Hermite interpolation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DenseKnot {
    /// Arclength from the path start.
    pub s: f64,
    pub x: Complex64,
    pub y: Complex64,
    /// dy/dx at the knot.
    pub dydx: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub end_value: Complex64,
    /// Real and imaginary parts of the end value at full working precision.
    pub end_value_text: (String, String),
    pub dense_samples: Option<Vec<DenseKnot>>,
    pub step_count: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    /// Hermite interpolation at arclength `s`: (x, y, dy/dx).
    pub fn interpolate(&self, s: f64) -> Option<(Complex64, Complex64, Complex64)> {
        let knots = self.dense_samples.as_ref()?;
        let k = knots.windows(2).position(|w| w[0].s <= s && s <= w[1].s)?;
        let (a, b) = (knots[k], knots[k + 1]);
        let h = b.x - a.x;
        if b.s == a.s || h.norm() == 0.0 {
            return Some((a.x, a.y, a.dydx));
        }
        let t = (s - a.s) / (b.s - a.s);
        let x = a.x + h * t;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let y = a.y * h00 + h * a.dydx * h10 + b.y * h01 + h * b.dydx * h11;
        let d00 = 6.0 * t2 - 6.0 * t;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = -6.0 * t2 + 6.0 * t;
        let d11 = 3.0 * t2 - 2.0 * t;
        let dy = (a.y * d00 + b.y * d01) / h + a.dydx * d10 + b.dydx * d11;
        Some((x, y, dy))
    }
}

/// Result in the working scalar type.
#[derive(Clone, Debug)]
pub struct RawTrajectory<T: Real> {
    pub end_value: C<T>,
    pub knots: Vec<DenseKnot>,
    pub step_count: usize,
    pub rejected_steps: usize,
}

struct Tableau<T: Real> {
    c: [T; 7],
    a: [[T; 6]; 7],
    e: [T; 7],
}

impl<T: Real> Tableau<T> {
    fn new() -> Self {
        let r = |n: i64, d: i64| T::from_ratio(n, d);
        let z = || T::zero();
        Tableau {
            c: [z(), r(1, 5), r(3, 10), r(4, 5), r(8, 9), r(1, 1), r(1, 1)],
            a: [
                [z(), z(), z(), z(), z(), z()],
                [r(1, 5), z(), z(), z(), z(), z()],
                [r(3, 40), r(9, 40), z(), z(), z(), z()],
                [r(44, 45), r(-56, 15), r(32, 9), z(), z(), z()],
                [r(19372, 6561), r(-25360, 2187), r(64448, 6561), r(-212, 729), z(), z()],
                [r(9017, 3168), r(-355, 33), r(46732, 5247), r(49, 176), r(-5103, 18656), z()],
                [r(35, 384), z(), r(500, 1113), r(125, 192), r(-2187, 6784), r(11, 84)],
            ],
            // 5th-order minus embedded 4th-order weights
            e: [
                r(71, 57600),
                z(),
                r(-71, 16695),
                r(71, 1920),
                r(-17253, 339200),
                r(22, 525),
                r(-1, 40),
            ],
        }
    }
}

fn scale<T: Real>(z: &C<T>, r: &T) -> C<T> {
    C::new(z.re.clone() * r.clone(), z.im.clone() * r.clone())
}

fn all_finite<T: Real>(z: &C<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Integrates `field` along `path` in the scalar type `T`.
pub fn integrate_raw<T: Real>(
    field: &Field<T>,
    path: &ComplexPath,
    y0: C<T>,
    cfg: &IntegratorConfig,
) -> Result<RawTrajectory<T>, OdeError> {
    cfg.validate()?;
    if !all_finite(&y0) {
        return Err(OdeError::NonFiniteInitial);
    }
    let tab = Tableau::<T>::new();
    let guard = if field.kind.divides_by_state() { cfg.guard * norm_f64(&y0) } else { 0.0 };
    let min_s_default = 10f64.powi(-(T::digits() as i32) + 2);

    let mut y = y0;
    let mut knots = Vec::new();
    let mut steps = 0usize;
    let mut rejected = 0usize;
    let mut s_offset = 0.0f64;
    // step in arclength, carried across segments
    let mut h_len: Option<f64> = None;

    for w in path.vertices().windows(2) {
        let a: C<T> = from_c64(w[0]);
        let d: C<T> = from_c64(w[1] - w[0]);
        let seg_len = (w[1] - w[0]).norm();
        if seg_len == 0.0 {
            continue;
        }
        let rhs = |s: &T, y: &C<T>| -> C<T> {
            let x = a.clone() + scale(&d, s);
            d.clone() * field.eval(&x, y)
        };
        let mut s = T::zero();
        let mut k1 = rhs(&s, &y);
        if !all_finite(&k1) {
            return Err(OdeError::PoleEncountered { at: w[0] });
        }
        let mut h = match h_len {
            Some(hl) => (hl / seg_len).min(1.0),
            None => initial_step(&rhs, &y, &k1, cfg),
        };
        let min_s = if cfg.min_step > 0.0 { cfg.min_step / seg_len } else { min_s_default };
        let mut err_prev = 1e-4f64;
        if cfg.dense {
            knots.push(DenseKnot { s: s_offset, x: w[0], y: to_c64(&y), dydx: to_c64(&k1) / (w[1] - w[0]) });
        }
        let one = T::one();
        loop {
            let remaining = one.clone() - s.clone();
            let remaining_f = remaining.to_f64();
            if remaining_f <= 0.0 {
                break;
            }
            let last = h >= remaining_f;
            let ht: T = if last { remaining.clone() } else { T::from_f64(h) };
            if steps + rejected >= cfg.max_steps {
                return Err(OdeError::MaxStepsExceeded { steps: cfg.max_steps, at: to_c64(&(a.clone() + d.clone() * C::new(s, T::zero()))) });
            }
            let mut k: Vec<C<T>> = Vec::with_capacity(7);
            k.push(k1.clone());
            let mut ok = true;
            let mut y_new = y.clone();
            for i in 1..7 {
                let mut acc = y.clone();
                for (j, kj) in k.iter().enumerate().take(i) {
                    if !tab.a[i][j].is_zero() {
                        acc = acc + scale(kj, &(tab.a[i][j].clone() * ht.clone()));
                    }
                }
                if i == 6 {
                    y_new = acc.clone();
                }
                let si = s.clone() + tab.c[i].clone() * ht.clone();
                let ki = rhs(&si, &acc);
                if !all_finite(&ki) {
                    ok = false;
                    break;
                }
                k.push(ki);
            }
            let err = if ok {
                let mut e = C::new(T::zero(), T::zero());
                for (i, ki) in k.iter().enumerate() {
                    if !tab.e[i].is_zero() {
                        e = e + scale(ki, &tab.e[i]);
                    }
                }
                let e = scale(&e, &ht);
                error_ratio(&e, &y, &y_new, cfg)
            } else {
                f64::INFINITY
            };
            if err <= 1.0 && all_finite(&y_new) {
                steps += 1;
                s = if last { one.clone() } else { s + ht };
                y = y_new;
                k1 = k.pop().unwrap();
                if guard > 0.0 && norm_f64(&y) < guard {
                    return Err(OdeError::PoleEncountered {
                        at: to_c64(&(a.clone() + d.clone() * C::new(s.clone(), T::zero()))),
                    });
                }
                if cfg.dense {
                    let sf = s.to_f64();
                    knots.push(DenseKnot {
                        s: s_offset + sf * seg_len,
                        x: w[0] + (w[1] - w[0]) * sf,
                        y: to_c64(&y),
                        dydx: to_c64(&k1) / (w[1] - w[0]),
                    });
                }
                let fac = if err == 0.0 { 5.0 } else { 0.9 * err.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0) };
                let fac = fac.clamp(0.2, 5.0);
                err_prev = err.max(1e-4);
                if !last {
                    h *= fac;
                }
                if last {
                    break;
                }
            } else {
                rejected += 1;
                let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
                h *= fac;
                if h < min_s {
                    return Err(OdeError::StepUnderflow {
                        at: to_c64(&(a.clone() + d.clone() * C::new(s.clone(), T::zero()))),
                    });
                }
            }
        }
        h_len = Some(h * seg_len);
        s_offset += seg_len;
    }
    Ok(RawTrajectory { end_value: y, knots, step_count: steps, rejected_steps: rejected })
}

/// Error relative to tolerance, measured separately on the real and imaginary
/// parts so that a tiny imaginary part next to an O(1) real part is resolved
/// to relative accuracy.
fn error_ratio<T: Real>(e: &C<T>, y: &C<T>, yn: &C<T>, cfg: &IntegratorConfig) -> f64 {
    let part = |e: &T, a: &T, b: &T| {
        let m = a.to_f64().abs().max(b.to_f64().abs());
        e.to_f64().abs() / (cfg.abs_tol + cfg.rel_tol * m)
    };
    part(&e.re, &y.re, &yn.re).max(part(&e.im, &y.im, &yn.im))
}

fn initial_step<T: Real, F: Fn(&T, &C<T>) -> C<T>>(rhs: &F, y: &C<T>, f0: &C<T>, cfg: &IntegratorConfig) -> f64 {
    let sc = cfg.abs_tol + cfg.rel_tol * norm_f64(y);
    let d0 = norm_f64(y) / sc;
    let d1 = norm_f64(f0) / sc;
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(1.0);
    let y1 = y.clone() + f0.clone() * C::new(T::from_f64(h0), T::zero());
    let f1 = rhs(&T::from_f64(h0), &y1);
    let d2 = norm_f64(&(f1 - f0.clone())) / sc / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    if !h1.is_finite() {
        return 1e-6;
    }
    (100.0 * h0).min(h1).min(1.0)
}

/// Public entry point: double or big-float depending on `precision_digits`.
pub fn integrate_along_path(
    field: &OdeField,
    path: &ComplexPath,
    y0: Complex64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, OdeError> {
    cfg.validate()?;
    if !(y0.re.is_finite() && y0.im.is_finite()) {
        return Err(OdeError::NonFiniteInitial);
    }
    if cfg.precision_digits <= 16 {
        let f = Field::<f64>::from_field(field);
        let raw = integrate_raw(&f, path, C::new(y0.re, y0.im), cfg)?;
        Ok(finish(raw, 17))
    } else {
        let digits = cfg.precision_digits;
        with_precision_bits(bits_for_digits(digits), || {
            let f = Field::<BigReal>::from_field(field);
            let raw = integrate_raw(&f, path, from_c64(y0), cfg)?;
            Ok(finish(raw, digits as usize))
        })
    }
}

fn finish<T: Real>(raw: RawTrajectory<T>, digits: usize) -> Trajectory {
    Trajectory {
        end_value: to_c64(&raw.end_value),
        end_value_text: (raw.end_value.re.to_decimal(digits), raw.end_value.im.to_decimal(digits)),
        dense_samples: if raw.knots.is_empty() { None } else { Some(raw.knots) },
        step_count: raw.step_count,
        rejected_steps: raw.rejected_steps,
    }
}

/// Closed-form check on εy' = −y along [0, 1]: returns (tol, |error|).
pub fn order_convergence_probe(eps: f64, tolerances: &[f64], precision_digits: u32) -> Result<Vec<(f64, f64)>, OdeError> {
    let field = OdeField::linear_test(eps, -1.0);
    let path = ComplexPath::from_real(&[0.0, 1.0]).expect("unit segment");
    let exact = (-1.0 / eps).exp();
    tolerances
        .iter()
        .map(|&tol| {
            let cfg = IntegratorConfig { rel_tol: tol, abs_tol: tol * exact, precision_digits, ..Default::default() };
            let t = integrate_along_path(&field, &path, Complex64::new(1.0, 0.0), &cfg)?;
            Ok((tol, (t.end_value - exact).norm() / exact))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_decay_matches_closed_form() {
        let f = OdeField::linear_test(0.1, -1.0);
        let path = ComplexPath::from_real(&[0.0, 1.0]).unwrap();
        let cfg = IntegratorConfig { abs_tol: 1e-20, ..IntegratorConfig::with_tol(1e-12) };
        let t = integrate_along_path(&f, &path, Complex64::new(1.0, 0.0), &cfg).unwrap();
        let exact = (-10f64).exp();
        assert!((t.end_value.re - exact).abs() < 1e-10 * exact, "{}", t.end_value);
    }

    #[test]
    fn vdp_outer_east_segment() {
        // at the two-term canard value, v0(1) + ε v1(1) = −1/2 − 3ε/32
        let eps = 0.1;
        let alpha = 1.0 - eps / 8.0 - 3.0 * eps * eps / 32.0;
        let f = OdeField::vdp_outer(eps, Complex64::new(alpha, 0.0));
        let path = ComplexPath::from_real(&[9.0, 1.0]).unwrap();
        let y0 = Complex64::new(-0.1, 0.0);
        let t = integrate_along_path(&f, &path, y0, &IntegratorConfig::with_tol(1e-10)).unwrap();
        assert!((t.end_value.re + 0.5 + eps * 3.0 / 32.0).abs() < 0.02, "{}", t.end_value);
        let r = integrate_along_path(&f, &path, y0, &IntegratorConfig::with_tol(1e-11)).unwrap();
        assert!((t.end_value - r.end_value).norm() < 1e-8);
        // at α = 1 the solution through u = 1 is off the slow curve
        let f1 = OdeField::vdp_outer(eps, Complex64::new(1.0, 0.0));
        let t1 = integrate_along_path(&f1, &path, y0, &IntegratorConfig::with_tol(1e-12)).unwrap();
        assert!((t1.end_value.re + 0.4594002707506).abs() < 1e-9, "{}", t1.end_value);
    }

    #[test]
    fn big_float_agrees_with_double() {
        let f = OdeField::vdp_outer(0.2, Complex64::new(0.97, 0.001));
        let path = ComplexPath::from_real(&[9.0, 1.0]).unwrap();
        let y0 = Complex64::new(-0.1, 0.0);
        let lo = integrate_along_path(&f, &path, y0, &IntegratorConfig::with_tol(1e-13)).unwrap();
        let cfg = IntegratorConfig { precision_digits: 30, ..IntegratorConfig::with_tol(1e-16) };
        let hi = integrate_along_path(&f, &path, y0, &cfg).unwrap();
        assert!((lo.end_value - hi.end_value).norm() < 1e-11, "{} {}", lo.end_value, hi.end_value);
        assert!(hi.end_value_text.0.len() > 25);
    }

    #[test]
    fn pole_guard_fires() {
        // v' = (α − u + (1−u²)v)/(εv) with v starting near 0 is driven through zero
        let f = OdeField::vdp_outer(0.1, Complex64::new(1.0, 0.0));
        let path = ComplexPath::from_real(&[0.0, -3.0]).unwrap();
        let r = integrate_along_path(&f, &path, Complex64::new(0.5, 0.0), &IntegratorConfig::with_tol(1e-8));
        assert!(matches!(r, Err(OdeError::PoleEncountered { .. }) | Err(OdeError::StepUnderflow { .. })), "{r:?}");
    }

    #[test]
    fn dense_output_interpolates() {
        let f = OdeField::linear_test(1.0, -1.0);
        let path = ComplexPath::from_real(&[0.0, 2.0]).unwrap();
        let cfg = IntegratorConfig { dense: true, ..IntegratorConfig::with_tol(1e-10) };
        let t = integrate_along_path(&f, &path, Complex64::new(1.0, 0.0), &cfg).unwrap();
        let (x, y, dy) = t.interpolate(1.3).unwrap();
        assert!((x.re - 1.3).abs() < 1e-12);
        assert!((y.re - (-1.3f64).exp()).abs() < 1e-5);
        assert!((dy + y).norm() < 1e-3);
    }

    #[test]
    fn convergence_probe_respects_tolerance() {
        let r = order_convergence_probe(0.1, &[1e-6, 1e-8, 1e-10], 16).unwrap();
        for (tol, err) in &r {
            assert!(*err <= 100.0 * tol, "{tol} {err}");
        }
        let r = order_convergence_probe(0.1, &[1e-10], 30).unwrap();
        assert!(r[0].1 <= 1e-8);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = IntegratorConfig { precision_digits: 10, ..Default::default() };
        assert!(cfg.validate().is_err());
        assert!(IntegratorConfig::with_tol(0.0).validate().is_err());
    }
}
