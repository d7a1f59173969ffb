use serde::{Deserialize, Serialize};

use super::{AlgebraError, DensePolynomial, ExactRational};

/// `numerator(u) / (u - pole)^order`, kept fully reduced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleRationalFunction {
    numerator: DensePolynomial,
    pole: ExactRational,
    order: u32,
}

impl PoleRationalFunction {
    /// Builds and reduces: common factors `(u - pole)` are cancelled.
    pub fn new(numerator: DensePolynomial, pole: ExactRational, order: u32) -> Self {
        let mut f = PoleRationalFunction { numerator, pole, order };
        f.reduce();
        f
    }

    pub fn polynomial(p: DensePolynomial, pole: ExactRational) -> Self {
        PoleRationalFunction { numerator: p, pole, order: 0 }
    }

    fn reduce(&mut self) {
        if self.numerator.is_zero() {
            self.order = 0;
            return;
        }
        while self.order > 0 {
            let (q, r) = self.numerator.div_rem_linear(&self.pole);
            if !r.is_zero() {
                break;
            }
            self.numerator = q;
            self.order -= 1;
        }
    }

    pub fn numerator(&self) -> &DensePolynomial {
        &self.numerator
    }

    pub fn pole(&self) -> &ExactRational {
        &self.pole
    }

    pub fn pole_order(&self) -> u32 {
        self.order
    }

    pub fn is_reduced(&self) -> bool {
        self.order == 0 || !self.numerator.eval(&self.pole).is_zero()
    }

    fn check_pole(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.pole != other.pole {
            return Err(AlgebraError::PoleMismatch {
                left: self.pole.clone(),
                right: other.pole.clone(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_pole(other)?;
        let m = self.order.max(other.order);
        let lift = |f: &Self| f.numerator.mul(&DensePolynomial::linear_power(&f.pole, m - f.order));
        let num = lift(self).add(&lift(other));
        Ok(Self::new(num, self.pole.clone(), m))
    }

    pub fn neg(&self) -> Self {
        PoleRationalFunction {
            numerator: self.numerator.neg(),
            pole: self.pole.clone(),
            order: self.order,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_pole(other)?;
        Ok(Self::new(
            self.numerator.mul(&other.numerator),
            self.pole.clone(),
            self.order + other.order,
        ))
    }

    pub fn scale(&self, s: &ExactRational) -> Self {
        Self::new(self.numerator.scale(s), self.pole.clone(), self.order)
    }

    /// (N/(u-c)^m)' = (N'(u-c) - mN) / (u-c)^{m+1}
    pub fn derivative(&self) -> Self {
        if self.order == 0 {
            return Self::polynomial(self.numerator.derivative(), self.pole.clone());
        }
        let lin = DensePolynomial::linear_root(&self.pole);
        let m = ExactRational::from_int(self.order as i64);
        let num = self.numerator.derivative().mul(&lin).sub(&self.numerator.scale(&m));
        Self::new(num, self.pole.clone(), self.order + 1)
    }

    pub fn eval(&self, u0: &ExactRational) -> Result<ExactRational, AlgebraError> {
        if self.order == 0 {
            return Ok(self.numerator.eval(u0));
        }
        let d = u0 - &self.pole;
        if d.is_zero() {
            return Err(AlgebraError::EvalAtPole(u0.clone()));
        }
        Ok(self.numerator.eval(u0) / d.pow(self.order))
    }

    pub fn eval_f64(&self, u0: f64) -> f64 {
        self.numerator.eval_f64(u0) / (u0 - self.pole.to_f64()).powi(self.order as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minus_one() -> ExactRational {
        ExactRational::from_int(-1)
    }

    fn v0() -> PoleRationalFunction {
        PoleRationalFunction::new(DensePolynomial::from_ints(&[-1]), minus_one(), 1)
    }

    #[test]
    fn derivative_of_v0() {
        let d = v0().derivative();
        assert_eq!(d.numerator(), &DensePolynomial::from_ints(&[1]));
        assert_eq!(d.pole_order(), 2);
    }

    #[test]
    fn eval_of_v0_at_one() {
        assert_eq!(v0().eval(&ExactRational::one()).unwrap(), ExactRational::new(-1, 2));
        assert!(matches!(v0().eval(&minus_one()), Err(AlgebraError::EvalAtPole(_))));
    }

    #[test]
    fn eval_of_v1_at_one() {
        let num = DensePolynomial::from_ints(&[7, 4, 1]).scale(&ExactRational::new(-1, 8));
        let v1 = PoleRationalFunction::new(num, minus_one(), 4);
        assert_eq!(v1.eval(&ExactRational::one()).unwrap(), ExactRational::new(-3, 32));
    }

    #[test]
    fn reduction_cancels_common_factor() {
        // (u+1)^2 / (u+1)^3 = 1/(u+1)
        let f = PoleRationalFunction::new(DensePolynomial::from_ints(&[1, 2, 1]), minus_one(), 3);
        assert_eq!(f.pole_order(), 1);
        assert_eq!(f.numerator(), &DensePolynomial::from_ints(&[1]));
    }

    #[test]
    fn pole_mismatch_is_rejected() {
        let g = PoleRationalFunction::new(DensePolynomial::from_ints(&[1]), ExactRational::one(), 1);
        assert!(matches!(v0().add(&g), Err(AlgebraError::PoleMismatch { .. })));
    }
}
