//! Gevrey diagnostics for formal series: least-squares extraction of b_n
//! limits, ratio tests, summation at the smallest term and the constant
//! probe for the Brusselator coefficients.

use rug::{Float, Integer};
use serde::Serialize;
use thiserror::Error;

use crate::exact_algebra::ExactRational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticsError {
    #[error("need at least {needed} points in range, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("regressor is constant on the selected range")]
    RankDeficient,
    #[error("coefficient a_{0} is zero")]
    ZeroCoefficient(usize),
    #[error("|a_n ε^n| has no interior minimum on 0..={0}")]
    NoInteriorMinimum(usize),
    #[error("invalid range {0}..={1}")]
    BadRange(usize, usize),
    #[error("ε must be positive and finite")]
    BadEps,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// value = C + a/√n
    InvSqrtN,
    /// value = C + a/∛n
    InvCbrtN,
}

impl FitModel {
    pub fn regressor(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            FitModel::InvSqrtN => 1.0 / n.sqrt(),
            FitModel::InvCbrtN => 1.0 / n.cbrt(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sqrt" | "inv_sqrt_n" => Some(FitModel::InvSqrtN),
            "cbrt" | "inv_cbrt_n" => Some(FitModel::InvCbrtN),
            _ => None,
        }
    }
}

/// Default fit window: the rows of the published b_n table.
pub const DEFAULT_FIT_RANGE: (usize, usize) = (135, 155);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    #[serde(rename = "C")]
    pub c: f64,
    pub a: f64,
    pub model: FitModel,
    pub range: (usize, usize),
    /// Euclidean norm of the residuals.
    pub residual_norm: f64,
}

/// Ordinary least squares of value = C + a·φ(n) over points with n in range.
pub fn fit_bn(points: &[(usize, f64)], model: FitModel, range: (usize, usize)) -> Result<FitResult, AsymptoticsError> {
    if range.0 < 1 || range.1 <= range.0 {
        return Err(AsymptoticsError::BadRange(range.0, range.1));
    }
    let sel: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, _)| *n >= range.0 && *n <= range.1)
        .map(|&(n, v)| (model.regressor(n), v))
        .collect();
    if sel.len() < 3 {
        return Err(AsymptoticsError::TooFewPoints { needed: 3, got: sel.len() });
    }
    let m = sel.len() as f64;
    let mx = sel.iter().map(|p| p.0).sum::<f64>() / m;
    let my = sel.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = sel.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = sel.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= f64::EPSILON * mx * mx * m {
        return Err(AsymptoticsError::RankDeficient);
    }
    let a = sxy / sxx;
    let c = my - a * mx;
    let residual_norm = sel.iter().map(|p| (p.1 - c - a * p.0).powi(2)).sum::<f64>().sqrt();
    Ok(FitResult { c, a, model, range, residual_norm })
}

/// r_n = |a_{n+1}| / ((n+1)|a_n|), the running estimate of the Gevrey type.
/// Entry k of the result is r_k for k = 0..len−2.
pub fn gevrey_ratio(a: &[ExactRational]) -> Result<Vec<f64>, AsymptoticsError> {
    let mut out = Vec::with_capacity(a.len().saturating_sub(1));
    for n in 0..a.len().saturating_sub(1) {
        if a[n].is_zero() {
            return Err(AsymptoticsError::ZeroCoefficient(n));
        }
        let q = a[n + 1].abs().as_rational().clone() / (a[n].abs().as_rational().clone() * Integer::from(n + 1));
        out.push(ExactRational::from_rational(q).to_f64());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmallestTermSum {
    pub value: f64,
    /// Decimal rendering of the sum at the working precision.
    pub value_text: String,
    pub n_opt: usize,
    /// |a_{n_opt} ε^{n_opt}|
    pub smallest_term: f64,
}

const SUM_BITS: u32 = 256;

/// Σ_{n=0}^{n_opt} a_n εⁿ, where n_opt minimizes |a_n εⁿ| over the nonzero
/// coefficients. The smallest term itself is included.
pub fn sum_smallest_term(a: &[ExactRational], eps: f64) -> Result<SmallestTermSum, AsymptoticsError> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(AsymptoticsError::BadEps);
    }
    let last = a.len().checked_sub(1).ok_or(AsymptoticsError::TooFewPoints { needed: 1, got: 0 })?;
    let e = Float::with_val(SUM_BITS, eps);
    let mut pow = Float::with_val(SUM_BITS, 1);
    let mut terms = Vec::with_capacity(a.len());
    for c in a {
        terms.push(Float::with_val(SUM_BITS, c.as_rational()) * &pow);
        pow *= &e;
    }
    let mut best: Option<(usize, Float)> = None;
    for (n, t) in terms.iter().enumerate() {
        if t.is_zero() {
            continue;
        }
        let m = Float::with_val(SUM_BITS, t.abs_ref());
        if best.as_ref().is_none_or(|(_, b)| m < *b) {
            best = Some((n, m));
        }
    }
    let (n_opt, smallest) = best.ok_or(AsymptoticsError::NoInteriorMinimum(last))?;
    let last_nonzero = terms.iter().rposition(|t| !t.is_zero()).unwrap_or(0);
    let first_nonzero = terms.iter().position(|t| !t.is_zero()).unwrap_or(0);
    if n_opt == last_nonzero || n_opt == first_nonzero {
        return Err(AsymptoticsError::NoInteriorMinimum(last));
    }
    let mut sum = Float::with_val(SUM_BITS, 0);
    for t in &terms[..=n_opt] {
        sum += t;
    }
    Ok(SmallestTermSum {
        value: sum.to_f64(),
        value_text: sum.to_string_radix(10, Some(40)),
        n_opt,
        smallest_term: smallest.to_f64(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantProbe {
    /// (n, c_n) with c_n = a_n / (n² (3/2)ⁿ n!).
    pub c: Vec<(usize, f64)>,
    /// Two-level Richardson extrapolation in 1/n from the last three c_n.
    pub extrapolated: f64,
    /// The two constants stated for the Brusselator coefficients.
    pub candidates: Vec<Candidate>,
    /// Name of the candidate closest to the extrapolated limit (in log scale).
    pub nearest: String,
    /// extrapolated / nearest candidate
    pub ratio_to_nearest: f64,
    /// 108e⁻⁶/π: the value obtained when the inner Stokes constant carries
    /// the factor e⁻³ from v² = 4X² + 6.
    pub derived_candidate: Candidate,
    pub ratio_to_derived: f64,
}

/// Polynomial extrapolation to h = 0 through (h_i, y_i) by Neville's scheme.
pub fn extrapolate_to_zero(h: &[f64], y: &[f64]) -> f64 {
    let mut t = y.to_vec();
    let n = t.len();
    for k in 1..n {
        for i in (k..n).rev() {
            t[i] = (h[i - k] * t[i] - h[i] * t[i - 1]) / (h[i - k] - h[i]);
        }
    }
    t[n - 1]
}

/// Runs the probe on coefficients a_n of εⁿ (a_0 first). Indices with a_n = 0
/// are skipped.
pub fn brusselator_constant_probe(a: &[ExactRational]) -> Result<ConstantProbe, AsymptoticsError> {
    let mut c = Vec::new();
    let mut fact = Integer::from(1);
    for (n, an) in a.iter().enumerate() {
        if n >= 1 {
            fact *= n as u32;
        }
        if n == 0 || an.is_zero() {
            continue;
        }
        // n² (3/2)ⁿ n! = n² 3ⁿ n! / 2ⁿ
        let den = Integer::from(n * n) * Integer::from(Integer::u_pow_u(3, n as u32)) * &fact;
        let scale = rug::Rational::from((Integer::from(1) << n as u32, den));
        c.push((n, ExactRational::from_rational(an.as_rational().clone() * scale).to_f64()));
    }
    if c.len() < 3 {
        return Err(AsymptoticsError::TooFewPoints { needed: 3, got: c.len() });
    }
    let tail = &c[c.len() - 3..];
    let h: Vec<f64> = tail.iter().map(|p| 1.0 / p.0 as f64).collect();
    let y: Vec<f64> = tail.iter().map(|p| p.1).collect();
    let extrapolated = extrapolate_to_zero(&h, &y);
    let e3 = (-3.0f64).exp();
    let pi = std::f64::consts::PI;
    let candidates = vec![
        Candidate { name: "54".into(), value: 54.0 },
        Candidate { name: "108e^-3/pi".into(), value: 108.0 * e3 / pi },
    ];
    let distance = |v: f64| (extrapolated.abs().ln() - v.ln()).abs();
    let best = candidates
        .iter()
        .min_by(|x, y| distance(x.value).total_cmp(&distance(y.value)))
        .expect("two candidates");
    let derived = Candidate { name: "108e^-6/pi".into(), value: 108.0 * e3 * e3 / pi };
    Ok(ConstantProbe {
        nearest: best.name.clone(),
        ratio_to_nearest: extrapolated / best.value,
        ratio_to_derived: extrapolated / derived.value,
        c,
        extrapolated,
        candidates,
        derived_candidate: derived,
    })
}

/// Coefficients a_n of a(ε) = Σ a_n εⁿ for the Brusselator canard value,
/// n = 0..=n_max, from the formal normal-form construction.
pub fn brusselator_a_series(n_max: usize) -> Result<Vec<ExactRational>, crate::formal_canard::FormalError> {
    let eps_order = n_max.saturating_sub(1);
    let x_order = 2 * eps_order + 2;
    let sol = crate::formal_canard::canard_formal(&crate::formal_canard::brusselator_normal_form(eps_order, x_order))?;
    let mut a = vec![ExactRational::one()];
    a.extend(sol.a_constants().into_iter().take(n_max));
    Ok(a)
}
