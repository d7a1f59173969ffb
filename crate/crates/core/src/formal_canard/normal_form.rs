//! Formal canard of an equation in normal form
//!
//!   εy' = (xᵖf(x) + εg(x,ε))y + h(x,ε) + εy²P(x,ε,εy) + α(x,ε)Q(x,ε,y)
//!
//! by series division, order by order in ε. At order n the unknowns y_n and
//! a_n (degree ≤ p−1 in x) satisfy
//!
//!   xᵖf·y_n + a_n·Q(x,0,0) = N_n,
//!
//! where N_n only involves lower orders. a_n is the truncation of N_n/Q(x,0,0)
//! below xᵖ, which makes N_n − a_n Q(x,0,0) divisible by xᵖ.

use serde::Serialize;

use super::FormalError;
use crate::exact_algebra::{DensePolynomial, ExactRational, TruncatedBiSeries, TruncatedSeries};

/// Equation data. Every x-series must be known to order `x_order + p`.
///
/// `p_terms[k]` is the coefficient of (εy)^k in P, `q_terms[m]` the
/// coefficient of y^m in Q; both are ε-series of x-series. Q must not depend
/// on y at ε⁰.
#[derive(Clone, Debug)]
pub struct NormalFormProblem {
    pub p: usize,
    pub f: TruncatedSeries,
    pub g: TruncatedBiSeries,
    pub h: TruncatedBiSeries,
    pub p_terms: Vec<TruncatedBiSeries>,
    /// True when `p_terms` is the complete (polynomial) expansion of P.
    pub p_terms_complete: bool,
    pub q_terms: Vec<TruncatedBiSeries>,
    pub eps_order: usize,
    pub x_order: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CanardFormalSolution {
    pub p: usize,
    /// y_n as an x-series of order `x_order − n(p+1)`.
    pub y: Vec<TruncatedSeries>,
    /// a_n(x), degree ≤ p−1.
    pub a: Vec<DensePolynomial>,
    /// N_n − a_n·Q(x,0,0) before the division by xᵖ.
    pub reduced_numerators: Vec<TruncatedSeries>,
}

impl CanardFormalSolution {
    /// Constant terms a_n(0); for p = 1 these are the whole a_n.
    pub fn a_constants(&self) -> Vec<ExactRational> {
        self.a.iter().map(|a| a.coeff(0)).collect()
    }
}

impl NormalFormProblem {
    fn data_order(&self) -> usize {
        self.x_order + self.p
    }

    fn validate(&self) -> Result<(), FormalError> {
        if self.p == 0 {
            return Err(FormalError::InvalidProblem("p must be positive".into()));
        }
        if self.f.coeff(0).is_zero() {
            return Err(FormalError::DegenerateF);
        }
        let q00 = self.q_terms.first().and_then(|q| q.get(0)).map(|s| s.coeff(0).clone());
        if q00.is_none_or(|c| c.is_zero()) {
            return Err(FormalError::DegenerateQ);
        }
        for (m, q) in self.q_terms.iter().enumerate().skip(1) {
            if q.get(0).is_some_and(|s| !s.is_zero()) {
                return Err(FormalError::InvalidProblem(format!(
                    "Q has a y^{m} term at ε⁰; the parameter would enter nonlinearly"
                )));
            }
        }
        let needed = self.eps_order * (self.p + 1);
        if self.x_order < needed {
            return Err(FormalError::InsufficientXOrder { needed, given: self.x_order });
        }
        let d = self.data_order();
        let mut orders = vec![self.f.order()];
        for b in [&self.g, &self.h].into_iter().chain(&self.p_terms).chain(&self.q_terms) {
            orders.push(b.x_order());
        }
        if let Some(&o) = orders.iter().find(|&&o| o < d) {
            return Err(FormalError::InsufficientXOrder { needed: d, given: o });
        }
        if !self.p_terms_complete && self.p_terms.len() < self.eps_order {
            return Err(FormalError::InvalidProblem(format!(
                "P needs (εy)^k terms up to k = {} for ε-order {}",
                self.eps_order.saturating_sub(1),
                self.eps_order
            )));
        }
        Ok(())
    }
}

/// ε-coefficients of y^m, extended as new y_n arrive.
struct PowerTable {
    table: Vec<Vec<TruncatedSeries>>,
}

impl PowerTable {
    fn new(max_power: usize) -> Self {
        PowerTable { table: vec![Vec::new(); max_power + 1] }
    }

    fn push(&mut self, y: &[TruncatedSeries]) {
        let n = y.len() - 1;
        self.table[1].push(y[n].clone());
        for m in 2..self.table.len() {
            let mut acc = y[0].mul(&self.table[m - 1][n]);
            for i in 1..=n {
                acc = acc.add(&y[i].mul(&self.table[m - 1][n - i]));
            }
            self.table[m].push(acc);
        }
    }

    /// [εʳ] y^m
    fn get(&self, m: usize, r: usize, order: usize) -> TruncatedSeries {
        if m == 0 {
            return if r == 0 { TruncatedSeries::one(order) } else { TruncatedSeries::zero(order) };
        }
        self.table[m][r].clone()
    }
}

fn accumulate(acc: &mut Option<TruncatedSeries>, term: TruncatedSeries) {
    *acc = Some(match acc.take() {
        Some(a) => a.add(&term),
        None => term,
    });
}

pub fn canard_formal(problem: &NormalFormProblem) -> Result<CanardFormalSolution, FormalError> {
    problem.validate()?;
    let p = problem.p;
    let d = problem.data_order();
    let q00 = problem.q_terms[0].at(0);
    let f = &problem.f;

    let max_power = (problem.p_terms.len().min(problem.eps_order) + 1).max(problem.q_terms.len().saturating_sub(1)).max(1);
    let mut powers = PowerTable::new(max_power);

    let mut y: Vec<TruncatedSeries> = Vec::new();
    let mut a: Vec<DensePolynomial> = Vec::new();
    let mut reduced = Vec::new();

    for n in 0..=problem.eps_order {
        let mut num: Option<TruncatedSeries> = None;
        accumulate(&mut num, problem.h.at(n).neg());
        if n >= 1 {
            accumulate(&mut num, y[n - 1].derivative());
            for k in 0..n {
                accumulate(&mut num, problem.g.at(k).mul(&y[n - 1 - k]).neg());
            }
            // [εⁿ] εy²P = Σ_{k,j} P_{k,j} [ε^{n−1−k−j}] y^{k+2}
            for (k, pk) in problem.p_terms.iter().enumerate() {
                if k + 1 > n {
                    break;
                }
                for j in 0..=(n - 1 - k) {
                    let coeff = pk.at(j);
                    if coeff.is_zero() {
                        continue;
                    }
                    let yp = powers.get(k + 2, n - 1 - k - j, d);
                    accumulate(&mut num, coeff.mul(&yp).neg());
                }
            }
            // Σ_{k<n} a_k [ε^{n−k}] Q
            for (k, ak) in a.iter().enumerate() {
                let r = n - k;
                let mut qr: Option<TruncatedSeries> = None;
                for (m, qm) in problem.q_terms.iter().enumerate() {
                    for j in 0..=r {
                        let coeff = qm.at(j);
                        if coeff.is_zero() || (m > 0 && j == 0) {
                            continue;
                        }
                        if m == 0 && j != r {
                            continue;
                        }
                        let ym = powers.get(m, r - j, d);
                        accumulate(&mut qr, coeff.mul(&ym));
                    }
                }
                if let Some(qr) = qr {
                    accumulate(&mut num, qr.mul_poly(ak).neg());
                }
            }
        }
        let num = num.expect("h contributes at every order");

        let quotient = num.div(&q00).map_err(FormalError::Algebra)?;
        let an = DensePolynomial::new(quotient.coeffs()[..p.min(quotient.order() + 1)].to_vec());
        let rem = num.sub(&q00.mul_poly(&an));
        let yn = rem.shift_down(p).map_err(FormalError::Algebra)?.div(f).map_err(FormalError::Algebra)?;

        let target = problem.x_order - n * (p + 1);
        let yn = yn.truncate(target.min(yn.order()));
        reduced.push(rem);
        a.push(an);
        y.push(yn);
        powers.push(&y);
    }

    Ok(CanardFormalSolution { p, y, a, reduced_numerators: reduced })
}

/// ε-truncated product of two ε-expansions sharing an x-order.
fn eps_mul(a: &[TruncatedSeries], b: &[TruncatedSeries], n_max: usize, order: usize) -> Vec<TruncatedSeries> {
    (0..=n_max)
        .map(|n| {
            let mut acc = TruncatedSeries::zero(order);
            for i in 0..=n.min(a.len().saturating_sub(1)) {
                if let Some(bj) = b.get(n - i) {
                    acc = acc.add(&a[i].mul(bj));
                }
            }
            acc
        })
        .collect()
}

fn eps_expansion(b: &TruncatedBiSeries, n_max: usize, order: usize) -> Vec<TruncatedSeries> {
    (0..=n_max).map(|n| b.at(n).truncate(order)).collect()
}

/// Substitutes the truncated solution back into the equation and returns
/// [εⁿ](LHS − RHS) for n = 0..=eps_order, each cut to the x-order at which
/// it is fully determined by the retained data, x_order − n(p+1) + p.
/// Every coefficient vanishes for a correct solution.
///
/// The products are formed directly on the ε-expansions, independently of
/// the order-by-order recurrence used by [`canard_formal`].
pub fn formal_residual(problem: &NormalFormProblem, sol: &CanardFormalSolution) -> Vec<TruncatedSeries> {
    let p = problem.p;
    let d = problem.data_order();
    let n_max = problem.eps_order;
    let y: Vec<TruncatedSeries> = sol.y.iter().map(|s| TruncatedSeries::new(s.coeffs().to_vec(), d)).collect();
    let xpf = problem.f.truncate(d).shift_up(p);
    let g = eps_expansion(&problem.g, n_max, d);
    let h = eps_expansion(&problem.h, n_max, d);
    let alpha: Vec<TruncatedSeries> = sol.a.iter().map(|a| TruncatedSeries::from_polynomial(a, d)).collect();

    // ε-shift of an expansion: [εⁿ](εS) = S_{n−1}.
    let shift = |s: &[TruncatedSeries]| -> Vec<TruncatedSeries> {
        let mut out = vec![TruncatedSeries::zero(d)];
        out.extend(s.iter().take(n_max).cloned());
        out
    };

    let mut rhs: Vec<TruncatedSeries> = y.iter().map(|yn| xpf.mul(yn)).collect();
    let gy = shift(&eps_mul(&g, &y, n_max, d));
    let y2 = eps_mul(&y, &y, n_max, d);
    // P(x, ε, εy) = Σ_k p_k (εy)^k
    let ey = shift(&y);
    let mut pe = vec![TruncatedSeries::zero(d); n_max + 1];
    let mut ey_pow: Vec<TruncatedSeries> = (0..=n_max).map(|n| if n == 0 { TruncatedSeries::one(d) } else { TruncatedSeries::zero(d) }).collect();
    for pk in &problem.p_terms {
        let term = eps_mul(&eps_expansion(pk, n_max, d), &ey_pow, n_max, d);
        pe = pe.iter().zip(&term).map(|(a, b)| a.add(b)).collect();
        ey_pow = eps_mul(&ey_pow, &ey, n_max, d);
    }
    let ey2p = shift(&eps_mul(&y2, &pe, n_max, d));
    // Q(x, ε, y) = Σ_m q_m y^m
    let mut qe = vec![TruncatedSeries::zero(d); n_max + 1];
    let mut y_pow: Vec<TruncatedSeries> = (0..=n_max).map(|n| if n == 0 { TruncatedSeries::one(d) } else { TruncatedSeries::zero(d) }).collect();
    for qm in &problem.q_terms {
        let term = eps_mul(&eps_expansion(qm, n_max, d), &y_pow, n_max, d);
        qe = qe.iter().zip(&term).map(|(a, b)| a.add(b)).collect();
        y_pow = eps_mul(&y_pow, &y, n_max, d);
    }
    let aq = eps_mul(&alpha, &qe, n_max, d);
    for n in 0..=n_max {
        rhs[n] = rhs[n].add(&gy[n]).add(&h[n]).add(&ey2p[n]).add(&aq[n]);
    }

    (0..=n_max)
        .map(|n| {
            let lhs = if n == 0 { TruncatedSeries::zero(d) } else { y[n - 1].derivative() };
            let r = lhs.sub(&rhs[n]);
            r.truncate((problem.x_order - n * (p + 1) + p).min(r.order()))
        })
        .collect()
}

fn eps_const(s: TruncatedSeries) -> TruncatedBiSeries {
    TruncatedBiSeries::eps_constant(s)
}

/// Brusselator normal form, x-variable centred on the turning point x = 0:
///
///   εy' = y[4x(1+x) + ε/(1+x)] + 3/(1+x) − 2(1+x)α − εy²·4x(1+x)/(1+εy),
///
/// with z = Φ₀(1+εy), Φ₀ = 1/(2(1+x)³) and α = (a−1)/ε.
pub fn brusselator_normal_form(eps_order: usize, x_order: usize) -> NormalFormProblem {
    let p = 1;
    let d = x_order + p;
    let one = ExactRational::one();
    let g = TruncatedSeries::inverse_binomial(one.clone(), 1, d);
    let h = TruncatedSeries::inverse_binomial(ExactRational::from_int(3), 1, d);
    let p_terms = (0..eps_order.max(1))
        .map(|k| {
            let sign = if k % 2 == 0 { -4 } else { 4 };
            eps_const(TruncatedSeries::from_ints(&[0, sign, sign], d))
        })
        .collect();
    NormalFormProblem {
        p,
        f: TruncatedSeries::from_ints(&[4, 4], d),
        g: eps_const(g),
        h: eps_const(h),
        p_terms,
        p_terms_complete: false,
        q_terms: vec![eps_const(TruncatedSeries::from_ints(&[-2, -2], d))],
        eps_order,
        x_order,
    }
}

/// Van der Pol normal form around u = 1, x = u − 1, v = −(1+εy)/(1+u):
///
///   εy' = y[x(2+x)² + ε/(2+x)] + 1/(2+x) − εy²·x(2+x)²/(1+εy) + α(2+x)²/(1+εy),
///
/// with α = (α_E − 1)/ε, α_E the parameter of εvv' = (1−u²)v + α_E − u.
pub fn vdp_normal_form(eps_order: usize, x_order: usize) -> NormalFormProblem {
    let p = 1;
    let d = x_order + p;
    // 1/(2+x) = Σ (−1)^k x^k / 2^{k+1}
    let inv = TruncatedSeries::new(
        (0..=d)
            .map(|k| {
                let c = ExactRational::new(1, rug::Integer::from(1) << (k as u32 + 1));
                if k % 2 == 1 { -c } else { c }
            })
            .collect(),
        d,
    );
    let two_plus_x_sq = TruncatedSeries::from_ints(&[4, 4, 1], d);
    let p_terms = (0..eps_order.max(1))
        .map(|k| {
            let s = if k % 2 == 0 { -1 } else { 1 };
            eps_const(TruncatedSeries::from_ints(&[0, 4 * s, 4 * s, s], d))
        })
        .collect();
    // Q = (2+x)² Σ (−εy)^m: the y^m coefficient sits at ε^m.
    let q_terms = (0..=eps_order)
        .map(|m| {
            let mut coeffs = vec![TruncatedSeries::zero(d); m + 1];
            coeffs[m] = if m % 2 == 0 { two_plus_x_sq.clone() } else { two_plus_x_sq.neg() };
            TruncatedBiSeries::new(coeffs, d)
        })
        .collect();
    NormalFormProblem {
        p,
        f: two_plus_x_sq.clone(),
        g: eps_const(inv.clone()),
        h: eps_const(inv),
        p_terms,
        p_terms_complete: false,
        q_terms,
        eps_order,
        x_order,
    }
}
