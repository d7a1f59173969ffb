//! Inner solution of Y₀Y₀′ = −(2/X)(Y₀ − 1/(2X³))(Y₀ + 1/X).
//!
//! With t = 1/X and v = u/t² + t + 2/t, Y₀ = t²u, the equation becomes the
//! Riccati equation dt/dv = t² + 2 − vt, whose solutions are t = −z′/z with
//! z″ + vz′ + 2z = 0. Writing z = v e^{−v²/2}(C + ∫_{i∞}^v e^{w²/2}/w² dw)
//! and integrating by parts gives t = (v² − 1)/v − 1/(v²J) with
//! J = −1/v + e^{−v²/2}(S(v) − i√(π/2) + C), S(v) = ∫₀^v e^{w²/2} dw.
//! C = 0 selects Y₀⁺ and C = i√(2π) selects Y₀⁻.

use num_complex::Complex64;
use serde::Serialize;

use super::quad::integrate_polyline;
use super::{positive, InnerError, StokesDiff};
use crate::complex_ode::{integrate_along_path, IntegratorConfig, OdeField};
use crate::relief::ComplexPath;
use crate::scalar::{bits_for_digits, c_exp, c_ratio, from_c64, norm_f64, to_c64, with_precision_bits, BigReal, Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BrusselatorBranch {
    /// C = 0
    Plus,
    /// C = i√(2π)
    Minus,
}

impl BrusselatorBranch {
    /// Sector of v in which t(v) ~ 2/v holds for this branch.
    fn admits(self, v: Complex64) -> bool {
        use std::f64::consts::FRAC_PI_4;
        let delta = 1e-9;
        let a = v.arg();
        match self {
            BrusselatorBranch::Plus => !(a > -3.0 * FRAC_PI_4 - delta && a < -FRAC_PI_4 + delta),
            BrusselatorBranch::Minus => !(a > FRAC_PI_4 - delta && a < 3.0 * FRAC_PI_4 + delta),
        }
    }

    pub fn conj(self) -> Self {
        match self {
            BrusselatorBranch::Plus => BrusselatorBranch::Minus,
            BrusselatorBranch::Minus => BrusselatorBranch::Plus,
        }
    }
}

/// S(v) = Σ v^{2k+1}/(2^k k! (2k+1)).
fn s_series<T: Real>(v: &C<T>) -> C<T> {
    let v2 = v.clone() * v.clone();
    let mut term = v.clone();
    let mut sum = term.clone();
    let tiny = 10f64.powi(-(T::digits() as i32) - 2);
    let vmag2 = norm_f64(&v2);
    let mut k: i64 = 1;
    loop {
        term = term * v2.clone() * c_ratio::<T>(2 * k - 1, 2 * k * (2 * k + 1));
        sum = sum + term.clone();
        if (k as f64) > vmag2 && norm_f64(&term) <= tiny * norm_f64(&sum) {
            break;
        }
        k += 1;
        if k > 1_000_000 {
            break;
        }
    }
    sum
}

fn j_generic<T: Real>(v: &C<T>, branch: BrusselatorBranch) -> C<T> {
    let half_pi = T::pi() * T::from_ratio(1, 2);
    let c = match branch {
        BrusselatorBranch::Plus => -half_pi.sqrt(),
        BrusselatorBranch::Minus => (T::pi() * T::from_ratio(2, 1)).sqrt() - half_pi.sqrt(),
    };
    let g = c_exp(&(-(v.clone() * v.clone()) * c_ratio::<T>(1, 2)));
    let inner = s_series(v) + C::new(T::zero(), c);
    -(c_ratio::<T>(1, 1) / v.clone()) + g * inner
}

fn t_generic<T: Real>(v: &C<T>, branch: BrusselatorBranch) -> C<T> {
    let one = c_ratio::<T>(1, 1);
    let v2 = v.clone() * v.clone();
    (v2.clone() - one.clone()) / v.clone() - one / (v2 * j_generic(v, branch))
}

/// Bits needed so the series for S(v) and the cancellations in J and t keep
/// full double accuracy.
fn bits_for(v: Complex64) -> u32 {
    let v2 = v * v;
    let lost = ((v.norm_sqr() - v2.re) / (2.0 * std::f64::consts::LN_2)).max(0.0);
    53 + 40 + lost.ceil() as u32
}

/// J(v) = e^{−v²/2}(C + ∫_{i∞}^v e^{w²/2}/w² dw), evaluated from the series.
pub fn brusselator_inner_j(v: Complex64, branch: BrusselatorBranch) -> Complex64 {
    with_precision_bits(bits_for(v), || to_c64(&j_generic::<BigReal>(&from_c64(v), branch)))
}

/// Solution t(v) of dt/dv = t² + 2 − vt with t ~ 2/v in the branch sector.
pub fn brusselator_inner_t(v: Complex64, branch: BrusselatorBranch) -> Result<Complex64, InnerError> {
    if !branch.admits(v) || v.norm() == 0.0 || !v.norm().is_finite() {
        return Err(InnerError::SectorViolation { v });
    }
    Ok(with_precision_bits(bits_for(v), || to_c64(&t_generic::<BigReal>(&from_c64(v), branch))))
}

/// e^{w²/2}(w^{−3} + 3w^{−5} + 15w^{−7} + 105w^{−9}), an antiderivative of
/// e^{w²/2}/w² up to O(w^{−11}) far out.
fn tail_antiderivative(w: Complex64) -> Complex64 {
    let r = 1.0 / (w * w);
    (w * w / 2.0).exp() / (w * w * w) * (1.0 + r * (3.0 + r * (15.0 + r * 105.0)))
}

fn kernel(w: Complex64) -> Complex64 {
    (w * w / 2.0).exp() / (w * w)
}

/// ∫_{−i∞}^{+i∞} e^{w²/2}/w² dw along −iW → 1 → iW plus analytic tails.
pub fn brusselator_identity_integral(w_cut: f64) -> Complex64 {
    let lo = Complex64::new(0.0, -w_cut);
    let hi = Complex64::new(0.0, w_cut);
    let (body, _) = integrate_polyline(kernel, &[lo, Complex64::new(1.0, 0.0), hi], 1e-14);
    tail_antiderivative(lo) + body - tail_antiderivative(hi)
}

/// J(v) by quadrature along the straight ray from ±iW to v, independent of
/// the series evaluation.
pub fn brusselator_inner_j_quadrature(v: Complex64, branch: BrusselatorBranch) -> Complex64 {
    let w_cut = 8.0f64.max(2.0 * v.norm());
    let from = match branch {
        BrusselatorBranch::Plus => Complex64::new(0.0, w_cut),
        BrusselatorBranch::Minus => Complex64::new(0.0, -w_cut),
    };
    let scale = kernel(v).norm().max(1.0);
    let (body, _) = integrate_polyline(kernel, &[from, v], 1e-15 * scale);
    (-v * v / 2.0).exp() * (body - tail_antiderivative(from))
}

/// Damped Newton for t(v) = target with t′ = t² + 2 − vt.
fn newton<T: Real>(target: &C<T>, v0: C<T>, branch: BrusselatorBranch, tol: f64) -> Result<C<T>, InnerError> {
    let fail = || InnerError::NewtonDivergence { x: 1.0 / to_c64(target) };
    let two = c_ratio::<T>(2, 1);
    let mut v = v0;
    let mut t = t_generic(&v, branch);
    let mut res = norm_f64(&(t.clone() - target.clone()));
    for _ in 0..200 {
        let d = t.clone() * t.clone() + two.clone() - v.clone() * t.clone();
        if norm_f64(&d) == 0.0 {
            return Err(fail());
        }
        let step = (t.clone() - target.clone()) / d;
        let mut lambda = 1.0;
        loop {
            let cand = v.clone() - step.clone() * C::new(T::from_f64(lambda), T::zero());
            let tc = t_generic(&cand, branch);
            let rc = norm_f64(&(tc.clone() - target.clone()));
            if rc.is_finite() && (rc <= res || lambda < 1e-3) {
                let moved = lambda * norm_f64(&step);
                v = cand;
                t = tc;
                res = rc;
                if moved <= tol * (1.0 + norm_f64(&v)) {
                    return Ok(v);
                }
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-6 {
                return Err(fail());
            }
        }
    }
    Err(fail())
}

fn y0_generic<T: Real>(x: &C<T>, branch: BrusselatorBranch) -> Result<C<T>, InnerError> {
    let xc = to_c64(x);
    let seed = 2.0 * xc + 1.5 / xc;
    if !branch.admits(seed) {
        return Err(InnerError::SectorViolation { v: seed });
    }
    let t = c_ratio::<T>(1, 1) / x.clone();
    let tol = 10f64.powi(-(T::digits() as i32) + 6);
    let v = newton(&t, from_c64(seed), branch, tol)?;
    let t2 = t.clone() * t.clone();
    Ok(-(t2.clone() * t.clone()) - c_ratio::<T>(2, 1) * t + t2 * v)
}

/// Y₀(X) = −t³ − 2t + t²v with t = 1/X and t(v) = 1/X.
pub fn brusselator_inner_y0(x: Complex64, branch: BrusselatorBranch) -> Result<Complex64, InnerError> {
    if !(x.norm() >= 1.0 && x.norm().is_finite()) {
        return Err(InnerError::NewtonDivergence { x });
    }
    let bits = bits_for(2.0 * x + 1.5 / x) + 16;
    with_precision_bits(bits, || Ok(to_c64(&y0_generic::<BigReal>(&from_c64(x), branch)?)))
}

/// 32√(2π) X⁴ e^{−2X²}
pub fn brusselator_stokes_formula(x: f64) -> f64 {
    32.0 * (2.0 * std::f64::consts::PI).sqrt() * x.powi(4) * (-2.0 * x * x).exp()
}

/// Y₀⁺(X) − Y₀⁻(X) at real X; digits as in the Van der Pol version.
pub fn brusselator_stokes_diff(x: f64, digits: Option<u32>) -> Result<StokesDiff, InnerError> {
    positive(x)?;
    let need = (2.0 * x * x / std::f64::consts::LN_10).ceil() as u32;
    let digits = digits.unwrap_or((20 + need).max(30));
    let xc = Complex64::new(x, 0.0);
    let (diff, magnitude) = if digits <= 16 {
        let p = brusselator_inner_y0(xc, BrusselatorBranch::Plus)?;
        let m = brusselator_inner_y0(xc, BrusselatorBranch::Minus)?;
        (p - m, p.norm())
    } else {
        let bits = bits_for_digits(digits) + bits_for(2.0 * xc) - 53;
        with_precision_bits(bits, || -> Result<_, InnerError> {
            let xb: C<BigReal> = from_c64(xc);
            let p = y0_generic(&xb, BrusselatorBranch::Plus)?;
            let m = y0_generic(&xb, BrusselatorBranch::Minus)?;
            Ok((to_c64(&(p.clone() - m)), norm_f64(&p)))
        })?
    };
    let unit = if digits <= 16 { f64::EPSILON } else { 10f64.powi(-(digits.min(300) as i32)) };
    let resolution = unit * magnitude;
    if diff.norm() < 1e3 * resolution {
        return Err(InnerError::PrecisionLoss { diff: diff.norm(), digits });
    }
    Ok(StokesDiff::new(x, diff, brusselator_stokes_formula(x), magnitude, digits))
}

/// Independent evaluation of Y₀(X) at real X > 0: integrate the inner
/// equation from 20i (seeded by the asymptotic series) down the imaginary
/// axis and round a quarter arc to the real axis, where ℜX² increases and
/// starting errors decay. `upper = true` reaches Y₀⁺.
pub fn brusselator_inner_y0_ode(x: f64, upper: bool, cfg: &IntegratorConfig) -> Result<Complex64, InnerError> {
    positive(x)?;
    let start_r = 20.0f64.max(x);
    let mut pts = vec![Complex64::new(0.0, start_r), Complex64::new(0.0, x)];
    let arc = 32;
    for k in 1..=arc {
        let th = std::f64::consts::FRAC_PI_2 * (1.0 - k as f64 / arc as f64);
        pts.push(Complex64::from_polar(x, th));
    }
    let mut path = ComplexPath::new(pts).map_err(|_| InnerError::BadArgument(x))?;
    if !upper {
        path = path.conj();
    }
    let x0 = path.start();
    let y0 = 0.5 / x0.powi(3) + 0.375 / x0.powi(5) + 0.5625 / x0.powi(7);
    let traj = integrate_along_path(&OdeField::brusselator_inner(), &path, y0, cfg)?;
    Ok(traj.end_value)
}
