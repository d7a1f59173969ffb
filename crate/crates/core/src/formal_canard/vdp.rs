//! Van der Pol formal canard: v(u, ε) = Σ v_n(u) εⁿ, α = Σ a_n εⁿ.
//!
//! Every v_j (j ≥ 1) is P_j(u)/(u+1)^{3j+1}, so all products v_j·v_{n−j} share
//! the denominator (u+1)^{3n+2}. The recurrence therefore runs on integer
//! numerators only, and Σ v_j v'_{n−j} = ½ (Σ v_j v_{n−j})'.

use rayon::prelude::*;
use rug::{Float, Integer};
use serde::Serialize;

use super::FormalError;
use crate::exact_algebra::{AlgebraError, DensePolynomial, ExactRational, PoleRationalFunction};

/// Working precision for b_n unless the caller overrides it.
pub const DEFAULT_BN_BITS: u32 = 120;

#[derive(Clone, Debug, Serialize)]
pub struct VdpSeries {
    pub a: Vec<ExactRational>,
    pub v: Vec<PoleRationalFunction>,
}

impl VdpSeries {
    pub fn order(&self) -> usize {
        self.a.len() - 1
    }
}

/// Integer numerator over a positive denominator.
#[derive(Clone)]
struct ScaledPoly {
    num: Vec<Integer>,
    den: Integer,
}

impl ScaledPoly {
    fn normalize(mut self) -> Self {
        let mut g = self.den.clone();
        for c in &self.num {
            if g == 1 {
                break;
            }
            g.gcd_mut(c);
        }
        if g != 1 {
            for c in &mut self.num {
                c.div_exact_mut(&g);
            }
            self.den.div_exact_mut(&g);
        }
        self
    }

    fn to_polynomial(&self) -> DensePolynomial {
        DensePolynomial::from_integer_form(&self.num, &self.den)
    }
}

fn convolve_into(out: &mut [Integer], x: &[Integer], y: &[Integer]) {
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
}

fn eval_at_one(p: &[Integer]) -> Integer {
    p.iter().fold(Integer::new(), |acc, c| acc + c)
}

/// Exact quotient by (u − 1); the remainder must be zero.
fn div_by_u_minus_one(p: &[Integer]) -> Result<Vec<Integer>, AlgebraError> {
    let n = p.len();
    let mut q = vec![Integer::new(); n - 1];
    let mut carry = Integer::new();
    for k in (1..n).rev() {
        carry += &p[k];
        q[k - 1] = carry.clone();
    }
    carry += &p[0];
    if carry != 0 {
        return Err(AlgebraError::NonzeroRemainder { remainder: ExactRational::from(carry) });
    }
    Ok(q)
}

/// Σ_{j=0}^{n} P_j P_{n−j} over a common denominator.
fn symmetric_square_sum(p: &[ScaledPoly], n: usize) -> ScaledPoly {
    let mut den = Integer::from(1);
    for j in 0..=n / 2 {
        den.lcm_mut(&Integer::from(&p[j].den * &p[n - j].den));
    }
    let len = p[0].num.len() + p[n].num.len() - 1;
    let half = |j: usize| -> Vec<Integer> {
        let (x, y) = (&p[j], &p[n - j]);
        let scale = Integer::from(&den / Integer::from(&x.den * &y.den));
        let mut out = vec![Integer::new(); x.num.len() + y.num.len() - 1];
        if scale == 1 {
            convolve_into(&mut out, &x.num, &y.num);
        } else {
            let xs: Vec<Integer> = x.num.iter().map(|c| Integer::from(c * &scale)).collect();
            convolve_into(&mut out, &xs, &y.num);
        }
        out
    };
    let off_diagonal: Vec<Integer> = (0..n.div_ceil(2))
        .into_par_iter()
        .map(half)
        .reduce(
            || vec![Integer::new(); len],
            |mut acc, part| {
                for (a, b) in acc.iter_mut().zip(part) {
                    *a += b;
                }
                acc
            },
        );
    let mut num: Vec<Integer> = vec![Integer::new(); len];
    for (k, c) in off_diagonal.into_iter().enumerate() {
        num[k] = c * 2u32;
    }
    if n % 2 == 0 {
        for (k, c) in half(n / 2).into_iter().enumerate() {
            num[k] += c;
        }
    }
    ScaledPoly { num, den }
}

/// Exact formal series through order `n_max`.
pub fn vdp_series(n_max: usize) -> Result<VdpSeries, FormalError> {
    let minus_one = ExactRational::from_int(-1);
    let mut p: Vec<ScaledPoly> = vec![ScaledPoly { num: vec![Integer::from(-1)], den: Integer::from(1) }];
    let mut a = vec![ExactRational::one()];
    for n in 0..n_max {
        // W_n = A/(u+1)^{3n+2};  S_n = ½W_n' = B/(u+1)^{3n+3}
        let sq = symmetric_square_sum(&p, n);
        let m = 3 * n as u32 + 2;
        let deg = sq.num.len();
        let mut b = vec![Integer::new(); deg];
        for k in 0..deg {
            // A'(u+1) − m A, coefficientwise
            let mut c = Integer::from(&sq.num[k] * m);
            c = -c;
            if k + 1 < deg {
                c += Integer::from(&sq.num[k + 1] * (k as u32 + 1));
            }
            if k >= 1 {
                c += Integer::from(&sq.num[k] * k as u32);
            }
            b[k] = c;
        }
        let b_den = Integer::from(&sq.den * 2u32);

        // a_{n+1} = S_n(1) = B(1) / (2^{3n+3} · den)
        let shift = 3 * n as u32 + 3;
        let b1 = eval_at_one(&b);
        let two_pow = Integer::from(1) << shift;
        a.push(ExactRational::new(b1.clone(), Integer::from(&b_den * &two_pow)));

        // 2^{3n+3}·B(u) − B(1)(u+1)^{3n+3} vanishes at u = 1.
        let mut numer = vec![Integer::new(); shift as usize + 1];
        for (k, c) in b.iter().enumerate() {
            numer[k] = Integer::from(c * &two_pow);
        }
        for (k, slot) in numer.iter_mut().enumerate() {
            let binom = Integer::from(Integer::binomial_u(shift, k as u32));
            *slot -= Integer::from(&b1 * &binom);
        }
        let q = div_by_u_minus_one(&numer).map_err(FormalError::Algebra)?;
        let next = ScaledPoly {
            num: q.into_iter().map(|c| -c).collect(),
            den: Integer::from(&b_den * &two_pow),
        }
        .normalize();
        p.push(next);
    }

    let v = p
        .iter()
        .enumerate()
        .map(|(n, sp)| {
            let order = if n == 0 { 1 } else { 3 * n as u32 + 1 };
            PoleRationalFunction::new(sp.to_polynomial(), minus_one.clone(), order)
        })
        .collect();
    Ok(VdpSeries { a, v })
}

/// Significant decimal digits a big-float of `bits` can carry after the
/// cancellation inherent in ln|a_n| − n·ln(3n/4e).
fn digits_capacity(bits: u32) -> u32 {
    ((bits.saturating_sub(16)) as f64 * std::f64::consts::LOG10_2).floor() as u32
}

/// b_n = a_n (4e/(3n))ⁿ with the default working precision.
pub fn vdp_bn(series: &VdpSeries, n: usize, digits: u32) -> Result<Float, FormalError> {
    vdp_bn_with_precision(series, n, digits, DEFAULT_BN_BITS)
}

pub fn vdp_bn_with_precision(series: &VdpSeries, n: usize, digits: u32, bits: u32) -> Result<Float, FormalError> {
    if n == 0 || n > series.order() {
        return Err(FormalError::IndexOutOfRange { n, max: series.order() });
    }
    if digits > digits_capacity(bits) {
        return Err(FormalError::InsufficientPrecision { digits, bits });
    }
    let a = &series.a[n];
    if a.is_zero() {
        return Ok(Float::new(bits));
    }
    let guard = bits + 64;
    let ln_num = Float::with_val(guard, Integer::from(a.numer().abs_ref())).ln();
    let ln_den = Float::with_val(guard, a.denom()).ln();
    let nf = Float::with_val(guard, n);
    // ln(4e/(3n)) = ln 4 + 1 − ln 3 − ln n
    let ln4 = Float::with_val(guard, 4).ln();
    let ln3 = Float::with_val(guard, 3).ln();
    let lnn = nf.clone().ln();
    let rate = ln4 + 1u32 - ln3 - lnn;
    let log_b = ln_num - ln_den + nf * rate;
    let mut b = Float::with_val(bits, log_b.exp());
    if a.signum() < 0 {
        b = -b;
    }
    Ok(b)
}

/// −4√3/(π e^{4/3}), the limit of b_n.
pub fn vdp_theoretical_constant(bits: u32) -> Float {
    let guard = bits + 32;
    let sqrt3 = Float::with_val(guard, 3).sqrt();
    let pi = Float::with_val(guard, rug::float::Constant::Pi);
    let e43 = Float::with_val(guard, Float::with_val(guard, 4) / 3u32).exp();
    Float::with_val(bits, -(sqrt3 * 4u32) / (pi * e43))
}
