use std::fmt;

use rug::Integer;
use serde::{Deserialize, Serialize};

use super::{AlgebraError, ExactRational};

/// Dense univariate polynomial, lowest degree first.
///
/// Normal form: no trailing zero coefficients, so the zero polynomial is the
/// empty vector.
#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DensePolynomial {
    coeffs: Vec<ExactRational>,
}

impl DensePolynomial {
    pub fn zero() -> Self {
        DensePolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: ExactRational) -> Self {
        Self::new(vec![c])
    }

    pub fn new(coeffs: Vec<ExactRational>) -> Self {
        let mut p = DensePolynomial { coeffs };
        p.trim();
        p
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| ExactRational::from_int(c)).collect())
    }

    /// x - c
    pub fn linear_root(c: &ExactRational) -> Self {
        Self::new(vec![-c, ExactRational::one()])
    }

    /// (x - c)^m
    pub fn linear_power(c: &ExactRational, m: u32) -> Self {
        let mut out = Self::constant(ExactRational::one());
        let lin = Self::linear_root(c);
        for _ in 0..m {
            out = out.mul(&lin);
        }
        out
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<ExactRational> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> ExactRational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&ExactRational> {
        self.coeffs.last()
    }

    pub fn is_normalized(&self) -> bool {
        self.coeffs.last().is_none_or(|c| !c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let out = (0..n)
            .map(|k| match (self.coeffs.get(k), other.coeffs.get(k)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Self::new(out)
    }

    pub fn neg(&self) -> Self {
        DensePolynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![ExactRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &ExactRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &ExactRational::from_int(k as i64))
                .collect(),
        )
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &ExactRational) -> ExactRational {
        let mut acc = ExactRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    /// Quotient of `self` by `(u - root)`; the remainder must vanish.
    pub fn div_exact_linear(&self, root: &ExactRational) -> Result<Self, AlgebraError> {
        let (q, r) = self.div_rem_linear(root);
        if !r.is_zero() {
            return Err(AlgebraError::NonzeroRemainder { remainder: r });
        }
        Ok(q)
    }

    /// Synthetic division: `self = q·(u - root) + r`.
    pub fn div_rem_linear(&self, root: &ExactRational) -> (Self, ExactRational) {
        if self.is_zero() {
            return (Self::zero(), ExactRational::zero());
        }
        let n = self.coeffs.len();
        let mut q = vec![ExactRational::zero(); n - 1];
        let mut carry = ExactRational::zero();
        for k in (0..n).rev() {
            let cur = &self.coeffs[k] + &(&carry * root);
            if k == 0 {
                carry = cur;
            } else {
                q[k - 1] = cur.clone();
                carry = cur;
            }
        }
        (Self::new(q), carry)
    }

    /// Primitive integer form: `self = num / den` with integer coefficients.
    pub fn to_integer_form(&self) -> (Vec<Integer>, Integer) {
        let mut den = Integer::from(1);
        for c in &self.coeffs {
            den.lcm_mut(c.denom());
        }
        let num = self
            .coeffs
            .iter()
            .map(|c| Integer::from(c.numer() * Integer::from(&den / c.denom())))
            .collect();
        (num, den)
    }

    pub fn from_integer_form(num: &[Integer], den: &Integer) -> Self {
        Self::new(num.iter().map(|c| ExactRational::new(c.clone(), den.clone())).collect())
    }
}

impl fmt::Debug for DensePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})u")?,
                _ => write!(f, "({c})u^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> DensePolynomial {
        DensePolynomial::from_ints(c)
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(p(&[1, 1]).mul(&p(&[-1, 1])), p(&[-1, 0, 1]));
    }

    #[test]
    fn additive_inverse_is_zero() {
        let s = p(&[-1, 0, 1]).add(&p(&[1, 0, -1]));
        assert!(s.is_zero());
        assert_eq!(s.degree(), None);
    }

    #[test]
    fn cube_times_linear() {
        let sq = p(&[1, 2, 1]);
        let r = sq.mul(&p(&[-1, 1]));
        assert_eq!(r, p(&[-1, -1, 1, 1]));
        assert_eq!(r.eval(&2.into()), ExactRational::from_int(9));
    }

    #[test]
    fn exact_linear_division() {
        let one = ExactRational::one();
        assert_eq!(p(&[-1, 0, 1]).div_exact_linear(&one).unwrap(), p(&[1, 1]));
        assert_eq!(p(&[-1, 0, 0, 1]).div_exact_linear(&one).unwrap(), p(&[1, 1, 1]));
        match p(&[7, 4, 1]).div_exact_linear(&one) {
            Err(AlgebraError::NonzeroRemainder { remainder }) => {
                assert_eq!(remainder, ExactRational::from_int(12))
            }
            other => panic!("expected remainder error, got {other:?}"),
        }
    }

    #[test]
    fn integer_form_round_trip() {
        let q = DensePolynomial::new(vec![
            ExactRational::new(1, 6),
            ExactRational::new(-3, 4),
            ExactRational::from_int(2),
        ]);
        let (num, den) = q.to_integer_form();
        assert_eq!(den, 12);
        assert_eq!(DensePolynomial::from_integer_form(&num, &den), q);
    }
}
