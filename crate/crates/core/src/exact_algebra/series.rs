use serde::{Deserialize, Serialize};

use super::{AlgebraError, DensePolynomial, ExactRational};

/// Power series in x truncated at `x^order` (inclusive); `coeffs.len() == order + 1`.
///
/// Binary operations between series of different orders work at the smaller
/// order: whatever lies beyond it is unknown.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    coeffs: Vec<ExactRational>,
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        TruncatedSeries { coeffs: vec![ExactRational::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = ExactRational::one();
        s
    }

    /// Pads with zeros or drops terms to reach the requested order.
    pub fn new(mut coeffs: Vec<ExactRational>, order: usize) -> Self {
        coeffs.resize(order + 1, ExactRational::zero());
        TruncatedSeries { coeffs }
    }

    pub fn from_ints(coeffs: &[i64], order: usize) -> Self {
        Self::new(coeffs.iter().map(|&c| ExactRational::from_int(c)).collect(), order)
    }

    pub fn from_polynomial(p: &DensePolynomial, order: usize) -> Self {
        Self::new(p.coeffs().to_vec(), order)
    }

    /// 1/(1 + x) style geometric data: `c / (1 + x)^k` expanded to `order`.
    pub fn inverse_binomial(c: ExactRational, k: u32, order: usize) -> Self {
        // (1+x)^{-k} = Σ (-1)^n C(n+k-1, n) x^n
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut binom = ExactRational::one();
        for n in 0..=order {
            if n > 0 {
                binom = binom * ExactRational::new((n as i64) + k as i64 - 1, n as i64);
            }
            let term = &binom * &c;
            coeffs.push(if n % 2 == 1 { -term } else { term });
        }
        TruncatedSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &ExactRational {
        &self.coeffs[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero coefficient, `None` if all vanish.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot raise truncation order");
        TruncatedSeries { coeffs: self.coeffs[..=order].to_vec() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        TruncatedSeries { coeffs: (0..=n).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        TruncatedSeries { coeffs: (0..=n).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect() }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, s: &ExactRational) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut out = vec![ExactRational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// Multiplication by a polynomial, kept at `self`'s order.
    pub fn mul_poly(&self, p: &DensePolynomial) -> Self {
        self.mul(&Self::from_polynomial(p, self.order()))
    }

    /// q with q·den ≡ num (mod x^{N+1}), N the smaller order.
    pub fn div(&self, den: &Self) -> Result<Self, AlgebraError> {
        let d0 = den.coeffs[0].clone();
        if d0.is_zero() {
            return Err(AlgebraError::ZeroConstantTerm);
        }
        let inv = d0.recip()?;
        let n = self.order().min(den.order());
        let mut q: Vec<ExactRational> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.coeffs[k].clone();
            for j in 1..=k {
                if !den.coeffs[j].is_zero() {
                    acc -= &(&den.coeffs[j] * &q[k - j]);
                }
            }
            q.push(acc * &inv);
        }
        Ok(TruncatedSeries { coeffs: q })
    }

    /// d/dx, losing one order.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            // Nothing is known about the derivative; keep a placeholder of order 0.
            return Self::zero(0);
        }
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &ExactRational::from_int(k as i64))
                .collect(),
        }
    }

    /// Divides by x^p; the first p coefficients must vanish.
    pub fn shift_down(&self, p: usize) -> Result<Self, AlgebraError> {
        if let Some(k) = self.coeffs.iter().take(p).position(|c| !c.is_zero()) {
            return Err(AlgebraError::NonzeroLowOrder { index: k });
        }
        if p > self.order() {
            return Err(AlgebraError::OrderExhausted);
        }
        Ok(TruncatedSeries { coeffs: self.coeffs[p..].to_vec() })
    }

    /// Multiplies by x^p, keeping the same order.
    pub fn shift_up(&self, p: usize) -> Self {
        let n = self.order();
        let mut coeffs = vec![ExactRational::zero(); p.min(n + 1)];
        coeffs.extend(self.coeffs.iter().take(n + 1 - coeffs.len()).cloned());
        TruncatedSeries { coeffs }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
    }
}

/// Σ_n ε^n · (series in x). Inner series share the x-order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedBiSeries {
    eps_coefficients: Vec<TruncatedSeries>,
    x_order: usize,
}

impl TruncatedBiSeries {
    pub fn new(eps_coefficients: Vec<TruncatedSeries>, x_order: usize) -> Self {
        let eps_coefficients = eps_coefficients
            .into_iter()
            .map(|s| {
                if s.order() >= x_order {
                    s.truncate(x_order)
                } else {
                    TruncatedSeries::new(s.coeffs, x_order)
                }
            })
            .collect();
        TruncatedBiSeries { eps_coefficients, x_order }
    }

    /// Data with no ε dependence.
    pub fn eps_constant(s: TruncatedSeries) -> Self {
        let n = s.order();
        Self::new(vec![s], n)
    }

    pub fn zero(x_order: usize) -> Self {
        TruncatedBiSeries { eps_coefficients: Vec::new(), x_order }
    }

    pub fn x_order(&self) -> usize {
        self.x_order
    }

    pub fn eps_order(&self) -> Option<usize> {
        self.eps_coefficients.len().checked_sub(1)
    }

    /// Coefficient of ε^n; zero beyond the stored terms.
    pub fn at(&self, n: usize) -> TruncatedSeries {
        self.eps_coefficients.get(n).cloned().unwrap_or_else(|| TruncatedSeries::zero(self.x_order))
    }

    pub fn get(&self, n: usize) -> Option<&TruncatedSeries> {
        self.eps_coefficients.get(n)
    }

    pub fn eps_coefficients(&self) -> &[TruncatedSeries] {
        &self.eps_coefficients
    }
}
