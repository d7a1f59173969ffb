//! Inner slow curve Y₀ of Y₀Y₀′ = 2XY₀ + 2 through the Airy quotient
//! X(z) = 2μ j^k Ai′(−μ j^k z)/Ai(−μ j^k z), μ = 4^{−1/3}, Y₀ = X² + z.

use num_complex::Complex64;
use serde::Serialize;

use super::airy::{airy_log_derivative, airy_series, AiryBranch};
use super::{positive, InnerError, StokesDiff};
use crate::complex_ode::{integrate_along_path, IntegratorConfig, OdeField};
use crate::relief::ComplexPath;
use crate::scalar::{bits_for_digits, c_exp, from_c64, norm_f64, to_c64, with_precision_bits, BigReal, Real, C};

/// Inner solution attached to one Airy branch: branch 2 gives Y₀⁺, branch 1 gives Y₀⁻.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InnerSolutionVdp {
    pub branch: AiryBranch,
    pub mu: f64,
}

impl InnerSolutionVdp {
    pub fn new(branch: AiryBranch) -> Self {
        InnerSolutionVdp { branch, mu: 0.25f64.cbrt() }
    }

    pub fn plus() -> Self {
        Self::new(AiryBranch::new(2).expect("valid"))
    }

    pub fn minus() -> Self {
        Self::new(AiryBranch::new(1).expect("valid"))
    }

    pub fn y0(&self, x: Complex64) -> Result<Complex64, InnerError> {
        vdp_inner_y0(x, self.branch)
    }
}

/// Damped Newton for X(z) = target with X′(z) = (X² + z)/2.
fn newton<T: Real>(
    quotient: impl Fn(&C<T>) -> Option<C<T>>,
    target: &C<T>,
    z0: C<T>,
    tol: f64,
) -> Result<C<T>, InnerError> {
    let fail = || InnerError::NewtonDivergence { x: to_c64(target) };
    let zero_y0 = || InnerError::ZeroOfY0 { x: to_c64(target) };
    let half = C::new(T::from_ratio(1, 2), T::zero());
    let mut z = z0;
    let mut xz = quotient(&z).ok_or_else(zero_y0)?;
    let mut res = norm_f64(&(xz.clone() - target.clone()));
    for _ in 0..200 {
        let d = (xz.clone() * xz.clone() + z.clone()) * half.clone();
        if norm_f64(&d) < 1e-300 {
            return Err(zero_y0());
        }
        let step = (xz.clone() - target.clone()) / d;
        let mut lambda = 1.0;
        loop {
            let cand = z.clone() - step.clone() * C::new(T::from_f64(lambda), T::zero());
            if let Some(xc) = quotient(&cand) {
                let rc = norm_f64(&(xc.clone() - target.clone()));
                if rc.is_finite() && (rc <= res || lambda < 1e-3) {
                    let moved = lambda * norm_f64(&step);
                    z = cand;
                    xz = xc;
                    res = rc;
                    if moved <= tol * (1.0 + norm_f64(&z)) {
                        return Ok(z);
                    }
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-6 {
                return Err(fail());
            }
        }
    }
    Err(fail())
}

fn seed(x: Complex64) -> Complex64 {
    -x * x - 1.0 / x
}

/// Y₀ on the given Airy branch in double precision.
pub fn vdp_inner_y0(x: Complex64, branch: AiryBranch) -> Result<Complex64, InnerError> {
    if !(x.norm() >= 1.0 && x.norm().is_finite()) {
        return Err(InnerError::NewtonDivergence { x });
    }
    let mu = 0.25f64.cbrt();
    let r = branch.rotation();
    let quotient = |z: &Complex64| {
        let q = 2.0 * mu * r * airy_log_derivative(-mu * r * z);
        (q.re.is_finite() && q.im.is_finite()).then_some(q)
    };
    let z = newton(quotient, &x, seed(x), 1e-15)?;
    Ok(x * x + z)
}

/// Y₀ on the given branch in `T`, with the Airy quotient from the Maclaurin
/// series at the working precision.
fn y0_generic<T: Real>(x: &C<T>, branch: AiryBranch) -> Result<C<T>, InnerError> {
    let mu = (-(T::from_f64(4.0).ln() * T::from_ratio(1, 3))).exp();
    let mu_c = C::new(mu, T::zero());
    let angle = T::pi() * T::from_ratio(2 * branch.index() as i64, 3);
    let r = c_exp(&C::new(T::zero(), angle));
    let two = C::new(T::from_ratio(2, 1), T::zero());
    let quotient = |z: &C<T>| {
        let w = -(mu_c.clone() * r.clone() * z.clone());
        let (a, ap) = airy_series(&w);
        if norm_f64(&a) == 0.0 {
            return None;
        }
        let q = two.clone() * mu_c.clone() * r.clone() * ap / a;
        (q.re.is_finite() && q.im.is_finite()).then_some(q)
    };
    let tol = 10f64.powi(-(T::digits() as i32) + 4);
    let z = newton(quotient, x, from_c64(seed(to_c64(x))), tol)?;
    Ok(x.clone() * x.clone() + z)
}

/// (4/e) X² e^{−2X³/3}, the imaginary coefficient of the leading Stokes term.
pub fn vdp_stokes_formula(x: f64) -> f64 {
    4.0 / std::f64::consts::E * x * x * (-2.0 * x.powi(3) / 3.0).exp()
}

/// Y₀⁺(X) − Y₀⁻(X) at real X. With `digits = None` the precision is chosen
/// from the expected size of the difference; an explicit setting that
/// cannot resolve it yields `PrecisionLoss`.
pub fn vdp_stokes_diff(x: f64, digits: Option<u32>) -> Result<StokesDiff, InnerError> {
    positive(x)?;
    let need = (2.0 * x.powi(3) / 3.0 / std::f64::consts::LN_10).ceil() as u32;
    let digits = digits.unwrap_or((20 + need).max(30));
    let xc = Complex64::new(x, 0.0);
    let (diff, magnitude) = if digits <= 16 {
        let p = vdp_inner_y0(xc, AiryBranch::new(2).expect("valid"))?;
        let m = vdp_inner_y0(xc, AiryBranch::new(1).expect("valid"))?;
        (p - m, p.norm())
    } else {
        with_precision_bits(bits_for_digits(digits), || -> Result<_, InnerError> {
            let xb: C<BigReal> = from_c64(xc);
            let p = y0_generic(&xb, AiryBranch::new(2).expect("valid"))?;
            let m = y0_generic(&xb, AiryBranch::new(1).expect("valid"))?;
            Ok((to_c64(&(p.clone() - m)), norm_f64(&p)))
        })?
    };
    let unit = if digits <= 16 { f64::EPSILON } else { 10f64.powi(-(digits.min(300) as i32)) };
    let resolution = unit * magnitude;
    if diff.norm() < 1e3 * resolution {
        return Err(InnerError::PrecisionLoss { diff: diff.norm(), digits });
    }
    Ok(StokesDiff::new(x, diff, vdp_stokes_formula(x), magnitude, digits))
}

/// Independent evaluation of Y₀(X) at real X > 0 by integrating the inner
/// equation from 20·e^{±iπ/3}, where the asymptotic series is accurate, down
/// the ray and round an arc to the real axis. Along that route ℜX³ grows, so
/// errors in the starting value decay. `upper = true` reaches Y₀⁺.
pub fn vdp_inner_y0_ode(x: f64, upper: bool, cfg: &IntegratorConfig) -> Result<Complex64, InnerError> {
    positive(x)?;
    let start_r = 20.0f64.max(x);
    let phase = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
    let mut pts = vec![start_r * phase, x * phase];
    let arc = 24;
    for k in 1..=arc {
        let th = std::f64::consts::FRAC_PI_3 * (1.0 - k as f64 / arc as f64);
        pts.push(Complex64::from_polar(x, th));
    }
    let mut path = ComplexPath::new(pts).map_err(|_| InnerError::BadArgument(x))?;
    if !upper {
        path = path.conj();
    }
    let x0 = path.start();
    let y0 = -1.0 / x0 - 0.5 / x0.powi(4) - 1.25 / x0.powi(7);
    let traj = integrate_along_path(&OdeField::vdp_inner(), &path, y0, cfg)?;
    Ok(traj.end_value)
}
