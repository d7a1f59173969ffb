//! Real scalar abstraction so the integrator, shooter and Airy series run on
//! either `f64` or an MPFR float.
//!
//! `BigReal` takes its precision from a thread-local setting, because
//! `num_traits::Zero::zero()` and friends have no precision argument. Run
//! big-float work inside [`with_precision_bits`].

use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_complex::Complex;
use num_traits::{Num, One, Zero};
use rug::Float;

pub type C<T> = Complex<T>;

pub trait Real:
    Clone + fmt::Debug + Num + Neg<Output = Self> + PartialOrd + Send + Sync + 'static
{
    fn from_f64(x: f64) -> Self;
    /// Exact `num/den` at the current precision.
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn atan2(&self, x: &Self) -> Self;
    fn pi() -> Self;
    fn gamma(&self) -> Self;
    fn is_finite(&self) -> bool;
    /// Decimal significand digits carried by this type.
    fn digits() -> u32;
    /// Decimal rendering with `digits` significant figures.
    fn to_decimal(&self, digits: usize) -> String;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn gamma(&self) -> Self {
        Float::with_val(80, *self).gamma().to_f64()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn digits() -> u32 {
        16
    }
    fn to_decimal(&self, digits: usize) -> String {
        format!("{:.*e}", digits.saturating_sub(1), self)
    }
}

thread_local! {
    static PRECISION_BITS: Cell<u32> = const { Cell::new(128) };
}

/// Precision (bits) used for new `BigReal` values on this thread.
pub fn precision_bits() -> u32 {
    PRECISION_BITS.with(|p| p.get())
}

/// Bits needed for `digits` significant decimal digits plus guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 / std::f64::consts::LOG10_2).ceil() as u32 + 16
}

/// Runs `f` with `BigReal` precision set to `bits`, restoring the old value.
pub fn with_precision_bits<R>(bits: u32, f: impl FnOnce() -> R) -> R {
    struct Restore(u32);
    impl Drop for Restore {
        fn drop(&mut self) {
            PRECISION_BITS.with(|p| p.set(self.0));
        }
    }
    let _restore = Restore(PRECISION_BITS.with(|p| p.replace(bits)));
    f()
}

/// MPFR real whose precision follows the thread-local setting.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigReal(pub Float);

impl BigReal {
    pub fn new(f: Float) -> Self {
        BigReal(f)
    }

    pub fn inner(&self) -> &Float {
        &self.0
    }

    fn prec() -> u32 {
        precision_bits()
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, Some(30)))
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

macro_rules! big_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                BigReal(Float::with_val(BigReal::prec(), (&self.0).$m(&rhs.0)))
            }
        }
        impl<'a> $tr<&'a BigReal> for &'a BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &'a BigReal) -> BigReal {
                BigReal(Float::with_val(BigReal::prec(), (&self.0).$m(&rhs.0)))
            }
        }
    };
}

big_binop!(Add, add);
big_binop!(Sub, sub);
big_binop!(Mul, mul);
big_binop!(Div, div);

impl Rem for BigReal {
    type Output = BigReal;
    fn rem(self, rhs: BigReal) -> BigReal {
        BigReal(Float::with_val(BigReal::prec(), &self.0 % &rhs.0))
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl Zero for BigReal {
    fn zero() -> Self {
        BigReal(Float::new(BigReal::prec()))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for BigReal {
    fn one() -> Self {
        BigReal(Float::with_val(BigReal::prec(), 1))
    }
}

impl Num for BigReal {
    type FromStrRadixErr = String;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        let parsed = Float::parse_radix(s, radix as i32).map_err(|e| e.to_string())?;
        Ok(BigReal(Float::with_val(BigReal::prec(), parsed)))
    }
}

impl Real for BigReal {
    fn from_f64(x: f64) -> Self {
        BigReal(Float::with_val(Self::prec(), x))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        let r = rug::Rational::from((num, den));
        BigReal(Float::with_val(Self::prec(), &r))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn sqrt(&self) -> Self {
        BigReal(Float::with_val(Self::prec(), self.0.sqrt_ref()))
    }
    fn exp(&self) -> Self {
        BigReal(Float::with_val(Self::prec(), self.0.exp_ref()))
    }
    fn ln(&self) -> Self {
        BigReal(Float::with_val(Self::prec(), self.0.ln_ref()))
    }
    fn sin(&self) -> Self {
        BigReal(Float::with_val(Self::prec(), self.0.sin_ref()))
    }
    fn cos(&self) -> Self {
        BigReal(Float::with_val(Self::prec(), self.0.cos_ref()))
    }
    fn atan2(&self, x: &Self) -> Self {
        BigReal(Float::with_val(Self::prec(), self.0.atan2_ref(&x.0)))
    }
    fn pi() -> Self {
        BigReal(Float::with_val(Self::prec(), rug::float::Constant::Pi))
    }
    fn gamma(&self) -> Self {
        BigReal(Float::with_val(Self::prec(), self.0.gamma_ref()))
    }
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
    fn digits() -> u32 {
        ((Self::prec().saturating_sub(16)) as f64 * std::f64::consts::LOG10_2) as u32
    }
    fn to_decimal(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits))
    }
    fn abs(&self) -> Self {
        BigReal(Float::with_val(Self::prec(), self.0.abs_ref()))
    }
}

impl PartialEq<f64> for BigReal {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for BigReal {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

/// |z| computed in f64; enough for step control and guards.
pub fn norm_f64<T: Real>(z: &C<T>) -> f64 {
    z.re.to_f64().hypot(z.im.to_f64())
}

pub fn to_c64<T: Real>(z: &C<T>) -> num_complex::Complex64 {
    num_complex::Complex64::new(z.re.to_f64(), z.im.to_f64())
}

pub fn from_c64<T: Real>(z: num_complex::Complex64) -> C<T> {
    C::new(T::from_f64(z.re), T::from_f64(z.im))
}

pub fn c_real<T: Real>(x: T) -> C<T> {
    C::new(x, T::zero())
}

pub fn c_ratio<T: Real>(num: i64, den: i64) -> C<T> {
    C::new(T::from_ratio(num, den), T::zero())
}

pub fn c_sqrt<T: Real>(z: &C<T>) -> C<T> {
    // principal branch
    let r = (z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()).sqrt();
    let two = T::from_f64(2.0);
    let re = ((r.clone() + z.re.clone()) / two.clone()).sqrt();
    let im_mag = ((r - z.re.clone()) / two).sqrt();
    let im = if z.im < T::zero() { -im_mag } else { im_mag };
    C::new(re, im)
}

pub fn c_exp<T: Real>(z: &C<T>) -> C<T> {
    let m = z.re.exp();
    C::new(m.clone() * z.im.cos(), m * z.im.sin())
}

/// Principal cube root.
pub fn c_cbrt<T: Real>(z: &C<T>) -> C<T> {
    let r = (z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()).sqrt();
    if r.is_zero() {
        return C::new(T::zero(), T::zero());
    }
    let arg = z.im.atan2(&z.re);
    let third = T::from_ratio(1, 3);
    let m = (r.ln() * third.clone()).exp();
    let a = arg * third;
    C::new(m.clone() * a.cos(), m * a.sin())
}
