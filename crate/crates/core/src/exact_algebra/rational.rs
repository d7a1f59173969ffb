use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::AlgebraError;

/// Exact rational number, always in lowest terms with a positive denominator.
///
/// GMP keeps `Rational` canonical after every operation, so the invariant
/// holds by construction; `is_canonical` exists for the property tests.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactRational(Rational);

impl ExactRational {
    pub fn zero() -> Self {
        ExactRational(Rational::new())
    }

    pub fn one() -> Self {
        ExactRational(Rational::from(1))
    }

    pub fn from_int(n: i64) -> Self {
        ExactRational(Rational::from(n))
    }

    /// Builds `num/den`; panics on a zero denominator.
    pub fn new(num: impl Into<Integer>, den: impl Into<Integer>) -> Self {
        let den: Integer = den.into();
        assert!(den != 0, "zero denominator");
        ExactRational(Rational::from((num.into(), den)))
    }

    pub fn checked_new(num: impl Into<Integer>, den: impl Into<Integer>) -> Result<Self, AlgebraError> {
        let den: Integer = den.into();
        if den == 0 {
            return Err(AlgebraError::Parse("zero denominator".into()));
        }
        Ok(ExactRational(Rational::from((num.into(), den))))
    }

    pub fn from_rational(r: Rational) -> Self {
        ExactRational(r)
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }

    pub fn into_rational(self) -> Rational {
        self.0
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0() == Ordering::Equal
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp0() {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn abs(&self) -> Self {
        ExactRational(self.0.clone().abs())
    }

    pub fn recip(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(ExactRational(self.0.clone().recip()))
    }

    pub fn pow(&self, k: u32) -> Self {
        let num = Integer::from(self.numer().pow(k));
        let den = Integer::from(self.denom().pow(k));
        ExactRational(Rational::from((num, den)))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// gcd(|num|, den) = 1 and den > 0.
    pub fn is_canonical(&self) -> bool {
        let g = Integer::from(self.numer().gcd_ref(self.denom()));
        self.denom().cmp0() == Ordering::Greater && (g == 1 || (self.is_zero() && *self.denom() == 1))
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExactRational {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || AlgebraError::Parse(format!("not a rational: {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: Integer = n.trim().parse().map_err(|_| bad())?;
                let d: Integer = d.trim().parse().map_err(|_| bad())?;
                ExactRational::checked_new(n, d)
            }
            None => {
                let n: Integer = s.parse().map_err(|_| bad())?;
                Ok(ExactRational(Rational::from(n)))
            }
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        ExactRational::from_int(n)
    }
}

impl From<i32> for ExactRational {
    fn from(n: i32) -> Self {
        ExactRational::from_int(n as i64)
    }
}

impl From<Integer> for ExactRational {
    fn from(n: Integer) -> Self {
        ExactRational(Rational::from(n))
    }
}

impl From<Rational> for ExactRational {
    fn from(r: Rational) -> Self {
        ExactRational(r)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl<'a> $tr<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational(Rational::from((&self.0).$m(&rhs.0)))
            }
        }
        impl $tr<ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $m(mut self, rhs: ExactRational) -> ExactRational {
                self.0.$am(rhs.0);
                self
            }
        }
        impl<'a> $tr<&'a ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $m(mut self, rhs: &'a ExactRational) -> ExactRational {
                self.0.$am(&rhs.0);
                self
            }
        }
        impl<'a> $atr<&'a ExactRational> for ExactRational {
            fn $am(&mut self, rhs: &'a ExactRational) {
                self.0.$am(&rhs.0);
            }
        }
        impl $atr<ExactRational> for ExactRational {
            fn $am(&mut self, rhs: ExactRational) {
                self.0.$am(rhs.0);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign);
binop!(Sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, MulAssign, mul_assign);

impl<'a> Div<&'a ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: &'a ExactRational) -> ExactRational {
        assert!(!rhs.is_zero(), "division by zero rational");
        ExactRational(Rational::from(&self.0 / &rhs.0))
    }
}

impl Div<ExactRational> for ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: ExactRational) -> ExactRational {
        &self / &rhs
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(Rational::from(-&self.0))
    }
}

impl std::iter::Sum for ExactRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |acc, x| acc + x)
    }
}
