//! Canard values by matching two descending integrations at a col.
//!
//! The mismatch m(α) = y_A(match; α) − y_B(match; α) is driven to zero by a
//! complex secant iteration. Extended-precision runs first converge in double
//! and then refine from that root, so only the last few iterations pay for
//! big-float arithmetic.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::complex_ode::{integrate_raw, Field, FieldKind, IntegratorConfig, OdeError};
use crate::relief::{descent_check, ComplexPath, DescentCertificate, ReliefError, ReliefSpec};
use crate::scalar::{bits_for_digits, from_c64, norm_f64, to_c64, with_precision_bits, BigReal, Real, C};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShootError {
    #[error("secant iteration did not converge after {iterations} iterations (last step {last_step:e})")]
    NoConvergence { iterations: usize, last_step: f64 },
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Relief(#[from] ReliefError),
    #[error("path {which} is not descending (certificate constant {c})")]
    NotDescending { which: &'static str, c: f64 },
    #[error("path {which} ends at {end}, not at the match point {target}")]
    PathMismatch { which: &'static str, end: Complex64, target: Complex64 },
    #[error("eps must lie in (0, {max}], got {eps}")]
    EpsOutOfRange { eps: f64, max: f64 },
    #[error("precision_digits must be at least 15, got {0}")]
    BadPrecision(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShootProblem {
    pub kind: FieldKind,
    pub eps: f64,
    pub path_a: ComplexPath,
    pub y_a0: Complex64,
    pub path_b: ComplexPath,
    pub y_b0: Complex64,
    pub match_point: Complex64,
    pub initial_guess: Complex64,
    /// Order of magnitude of ℑ of the canard value, used to set tolerances.
    pub expected_im: f64,
    pub relief: ReliefSpec,
}

impl ShootProblem {
    /// North path [−1+10i → 0 → 1] with v = i/10, east path [9 → 1] with v = −1/10.
    pub fn vdp(eps: f64) -> Result<Self, ShootError> {
        check_eps(eps, 0.25)?;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        Ok(ShootProblem {
            kind: FieldKind::VdpOuter,
            eps,
            path_a: ComplexPath::new(vec![c(-1.0, 10.0), c(0.0, 0.0), c(1.0, 0.0)])?,
            y_a0: c(0.0, 0.1),
            path_b: ComplexPath::from_real(&[9.0, 1.0])?,
            y_b0: c(-0.1, 0.0),
            match_point: c(1.0, 0.0),
            initial_guess: c(1.0 - eps / 8.0 - 3.0 * eps * eps / 32.0, 0.0),
            expected_im: 0.5 * vdp_stokes_limit() * (-4.0 / (3.0 * eps)).exp() / eps.sqrt(),
            relief: ReliefSpec::vdp(),
        })
    }

    /// East path [1.5 → 0]; the other path leaves the sommet of the lower
    /// half plane (maximum of the relief on |x| = 1.8) through −0.5 to the col 0.
    /// This yields the canard value with positive imaginary part; the mirrored
    /// upper-half path yields its conjugate.
    pub fn brusselator(eps: f64) -> Result<Self, ShootError> {
        check_eps(eps, 0.25)?;
        let relief = ReliefSpec::brusselator();
        let sommet = brusselator_sommet(&relief).conj();
        let start_value = |x: Complex64| {
            let opx = 1.0 + x;
            let phi0 = 0.5 / (opx * opx * opx);
            let phi1 = 0.375 * (2.0 + x) / opx.powi(5);
            phi0 + eps * phi1
        };
        let c = |re: f64| Complex64::new(re, 0.0);
        Ok(ShootProblem {
            kind: FieldKind::BrusselatorOuter,
            eps,
            path_a: ComplexPath::new(vec![sommet, c(-0.5), c(0.0)])?,
            y_a0: start_value(sommet),
            path_b: ComplexPath::from_real(&[1.5, 0.0])?,
            y_b0: start_value(c(1.5)),
            match_point: c(0.0),
            initial_guess: c(1.0 + 1.5 * eps + 15.0 / 8.0 * eps * eps),
            expected_im: 32.0 * (-3.0f64).exp() * (-2.0 / (3.0 * eps)).exp() / eps.powi(3),
            relief,
        })
    }

    /// Same problem with every path, start value and the guess conjugated.
    pub fn conj(&self) -> Self {
        ShootProblem {
            path_a: self.path_a.conj(),
            y_a0: self.y_a0.conj(),
            path_b: self.path_b.conj(),
            y_b0: self.y_b0.conj(),
            match_point: self.match_point.conj(),
            initial_guess: self.initial_guess.conj(),
            ..self.clone()
        }
    }

    /// Descent certificates for both paths; errors if either fails.
    pub fn certify(&self) -> Result<(DescentCertificate, DescentCertificate), ShootError> {
        for (which, p) in [("A", &self.path_a), ("B", &self.path_b)] {
            if (p.end() - self.match_point).norm() > 1e-12 {
                return Err(ShootError::PathMismatch { which, end: p.end(), target: self.match_point });
            }
        }
        let a = descent_check(&self.relief, &self.path_a)?;
        if !a.descending {
            return Err(ShootError::NotDescending { which: "A", c: a.c });
        }
        let b = descent_check(&self.relief, &self.path_b)?;
        if !b.descending {
            return Err(ShootError::NotDescending { which: "B", c: b.c });
        }
        Ok((a, b))
    }
}

fn check_eps(eps: f64, max: f64) -> Result<(), ShootError> {
    if eps > 0.0 && eps <= max {
        Ok(())
    } else {
        Err(ShootError::EpsOutOfRange { eps, max })
    }
}

/// Upper-half-plane sommet of the Brusselator relief on |x| = 1.8.
pub fn brusselator_sommet(relief: &ReliefSpec) -> Complex64 {
    crate::relief::maximize_on_arc(relief, 1.8, std::f64::consts::FRAC_PI_2, std::f64::consts::PI)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShootConfig {
    /// `None` selects 16 digits for eps ≥ 0.08 and 40 below.
    pub precision_digits: Option<u32>,
    /// Secant stopping tolerance on the parameter; `None` uses 1e−6·expected ℑ.
    pub param_tol: Option<f64>,
    pub max_iterations: usize,
    /// Skip the descent certificates (for deliberately bad paths in tests).
    pub skip_certification: bool,
}

impl Default for ShootConfig {
    fn default() -> Self {
        ShootConfig { precision_digits: None, param_tol: None, max_iterations: 40, skip_certification: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShootResult {
    pub parameter: Complex64,
    /// Real and imaginary parts at full working precision.
    pub parameter_text: (String, String),
    pub residual: Complex64,
    pub iterations: usize,
    pub precision_digits: u32,
}

pub fn precision_schedule(eps: f64) -> u32 {
    if eps >= 0.08 {
        16
    } else {
        40
    }
}

/// Stopping and integration tolerances for one precision level.
#[derive(Clone, Debug)]
struct Tolerances {
    /// Secant stopping thresholds on the real and imaginary parts.
    re: f64,
    im: f64,
    integrator: IntegratorConfig,
}

fn tolerances(problem: &ShootProblem, cfg: &ShootConfig, digits: u32) -> Tolerances {
    let rel_tol = if digits <= 16 { 1e-12 } else { 1e-15 };
    let im = cfg.param_tol.unwrap_or(1e-6 * problem.expected_im).max(1e-300);
    Tolerances {
        re: im.max(100.0 * rel_tol),
        im,
        integrator: IntegratorConfig {
            rel_tol,
            abs_tol: (1e-2 * im).min(rel_tol),
            ..IntegratorConfig::default()
        },
    }
}

pub fn shoot(problem: &ShootProblem, cfg: &ShootConfig) -> Result<ShootResult, ShootError> {
    let digits = cfg.precision_digits.unwrap_or_else(|| precision_schedule(problem.eps));
    if digits < 15 {
        return Err(ShootError::BadPrecision(digits));
    }
    if !cfg.skip_certification {
        problem.certify()?;
    }
    let g0 = problem.initial_guess;
    let g1 = g0 + Complex64::new(1e-6 * g0.norm().max(1e-3), 0.0);
    let tol16 = tolerances(problem, cfg, 16);
    let stage1 = secant::<f64>(problem, C::new(g0.re, g0.im), C::new(g1.re, g1.im), &tol16, cfg.max_iterations, 53);
    if digits <= 16 {
        let (alpha, residual, iterations) = stage1?;
        return Ok(ShootResult {
            parameter: alpha,
            parameter_text: (alpha.re.to_decimal(17), alpha.im.to_decimal(17)),
            residual,
            iterations,
            precision_digits: 16,
        });
    }
    // a double-precision stage that stalls above its tolerance still gives a good start
    let (start, it1) = match stage1 {
        Ok((a, _, it)) => (a, it),
        Err(ShootError::NoConvergence { .. }) => (g0, cfg.max_iterations),
        Err(e) => return Err(e),
    };
    let tol = tolerances(problem, cfg, digits);
    let bits = bits_for_digits(digits);
    with_precision_bits(bits, || {
        let a0: C<BigReal> = from_c64(start);
        let step = C::new(BigReal::from_f64(1e3 * tol16.re), BigReal::from_f64(0.0));
        let a1 = a0.clone() + step;
        let (alpha, residual, it2) = secant_raw::<BigReal>(problem, a0, a1, &tol, cfg.max_iterations, bits)?;
        let d = digits as usize;
        Ok(ShootResult {
            parameter: to_c64(&alpha),
            parameter_text: (alpha.re.to_decimal(d), alpha.im.to_decimal(d)),
            residual: to_c64(&residual),
            iterations: it1 + it2,
            precision_digits: digits,
        })
    })
}

fn secant<T: Real>(
    problem: &ShootProblem,
    a0: C<T>,
    a1: C<T>,
    tol: &Tolerances,
    max_iter: usize,
    bits: u32,
) -> Result<(Complex64, Complex64, usize), ShootError> {
    let (a, r, it) = secant_raw(problem, a0, a1, tol, max_iter, bits)?;
    Ok((to_c64(&a), to_c64(&r), it))
}

fn secant_raw<T: Real>(
    problem: &ShootProblem,
    mut a0: C<T>,
    mut a1: C<T>,
    tol: &Tolerances,
    max_iter: usize,
    bits: u32,
) -> Result<(C<T>, C<T>, usize), ShootError> {
    let icfg = tol.integrator.clone();
    let mut m0 = mismatch(problem, &a0, &icfg, bits)?;
    let mut m1 = mismatch(problem, &a1, &icfg, bits)?;
    let mut last_step = f64::INFINITY;
    for it in 1..=max_iter {
        let dm = m1.clone() - m0.clone();
        if norm_f64(&dm) == 0.0 {
            return Ok((a1, m1, it));
        }
        let a2 = a1.clone() - m1.clone() * (a1.clone() - a0.clone()) / dm;
        let step = a2.clone() - a1.clone();
        last_step = norm_f64(&step);
        a0 = a1;
        m0 = m1;
        a1 = a2;
        m1 = mismatch(problem, &a1, &icfg, bits)?;
        if step.re.to_f64().abs() <= tol.re && step.im.to_f64().abs() <= tol.im {
            return Ok((a1, m1, it));
        }
    }
    Err(ShootError::NoConvergence { iterations: max_iter, last_step })
}

/// y_A(match) − y_B(match) at parameter `alpha`, both legs run in parallel.
fn mismatch<T: Real>(problem: &ShootProblem, alpha: &C<T>, icfg: &IntegratorConfig, bits: u32) -> Result<C<T>, ShootError> {
    let leg = |path: &ComplexPath, y0: Complex64| {
        with_precision_bits(bits, || {
            let field = Field::<T>::new(problem.kind, from_c64(Complex64::new(problem.eps, 0.0)), alpha.clone());
            integrate_raw(&field, path, from_c64(y0), icfg).map(|t| t.end_value)
        })
    };
    let (a, b) = rayon::join(|| leg(&problem.path_a, problem.y_a0), || leg(&problem.path_b, problem.y_b0));
    Ok(a? - b?)
}

pub fn find_vdp_alpha(eps: f64, cfg: &ShootConfig) -> Result<ShootResult, ShootError> {
    shoot(&ShootProblem::vdp(eps)?, cfg)
}

pub fn find_brusselator_a(eps: f64, cfg: &ShootConfig) -> Result<ShootResult, ShootError> {
    shoot(&ShootProblem::brusselator(eps)?, cfg)
}

/// 2ℑ(α⁺)·e^{4/(3ε)}·√ε
pub fn vdp_stokes_observable(eps: f64, result: &ShootResult) -> f64 {
    2.0 * result.parameter.im * (4.0 / (3.0 * eps)).exp() * eps.sqrt()
}

/// 2ℑ(a⁺)·e^{2/(3ε)}·ε³
pub fn brusselator_stokes_observable(eps: f64, result: &ShootResult) -> f64 {
    2.0 * result.parameter.im * (2.0 / (3.0 * eps)).exp() * eps.powi(3)
}

/// Limit of the Van der Pol observable as ε → 0: 8√2/(√π e^{4/3}).
pub fn vdp_stokes_limit() -> f64 {
    8.0 * 2f64.sqrt() / (std::f64::consts::PI.sqrt() * (4.0f64 / 3.0).exp())
}

/// Limit predicted for the Brusselator observable: 64e^{−3}.
pub fn brusselator_stokes_limit() -> f64 {
    64.0 * (-3.0f64).exp()
}
