//! Airy function Ai and its derivative for complex argument.
//!
//! Inside |z| ≤ [`SERIES_RADIUS`] the Maclaurin series is summed in MPFR with
//! enough extra bits to absorb the cancellation predicted from ξ = (2/3)z^{3/2};
//! outside, the asymptotic expansion with the standard u_k, v_k coefficients is
//! used for |arg z| ≤ 2π/3 and the connection formula
//! Ai(z) = −j Ai(jz) − j² Ai(j²z) beyond.

use num_complex::Complex64;
use serde::Serialize;

use crate::scalar::{c_ratio, from_c64, norm_f64, to_c64, with_precision_bits, BigReal, Real, C};

/// Radius below which the (precision-boosted) Maclaurin series is used.
pub const SERIES_RADIUS: f64 = 8.0;

/// Ai_k(x) = Ai(j^k x) with j = e^{2iπ/3}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AiryBranch(u8);

impl AiryBranch {
    pub fn new(k: u8) -> Option<Self> {
        (k < 3).then_some(AiryBranch(k))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// j^k
    pub fn rotation(self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * self.0 as f64 / 3.0)
    }

    /// Ai_k and its derivative d/dx Ai(j^k x) = j^k Ai'(j^k x).
    pub fn eval(self, x: Complex64) -> (Complex64, Complex64) {
        let r = self.rotation();
        let (a, ap) = airy(r * x);
        (a, r * ap)
    }
}

/// Ai(0) and −Ai'(0) at the working precision of `T`.
pub fn airy_origin_constants<T: Real>() -> (T, T) {
    let three = T::from_f64(3.0);
    let third = T::from_ratio(1, 3);
    let two_thirds = T::from_ratio(2, 3);
    let c1 = (-(three.ln() * two_thirds.clone())).exp() / two_thirds.gamma();
    let c2 = (-(three.ln() * third.clone())).exp() / third.gamma();
    (c1, c2)
}

/// Maclaurin series for (Ai, Ai') summed until terms drop below the working
/// precision. Accurate wherever the terms do not cancel heavily.
pub fn airy_series<T: Real>(z: &C<T>) -> (C<T>, C<T>) {
    let (c1, c2) = airy_origin_constants::<T>();
    let z3 = z.clone() * z.clone() * z.clone();
    let mut t = c_ratio::<T>(1, 1);
    let mut s = z.clone();
    let mut p = z.clone() * z.clone() * c_ratio::<T>(1, 2);
    let mut q = c_ratio::<T>(1, 1);
    let mut f = t.clone();
    let mut g = s.clone();
    let mut fp = p.clone();
    let mut gp = q.clone();
    let tiny = 10f64.powi(-(T::digits() as i32) - 2);
    let zmag = norm_f64(z);
    let mut k: i64 = 1;
    loop {
        let kk = 3 * k;
        t = t * z3.clone() / c_ratio::<T>((kk - 1) * kk, 1);
        s = s * z3.clone() / c_ratio::<T>(kk * (kk + 1), 1);
        q = q * z3.clone() / c_ratio::<T>(kk * (kk - 2), 1);
        if k >= 2 {
            p = p * z3.clone() / c_ratio::<T>((kk - 1) * (kk - 3), 1);
            fp = fp + p.clone();
        }
        f = f + t.clone();
        g = g + s.clone();
        gp = gp + q.clone();
        let decreasing = (kk as f64) * (kk as f64) > zmag.powi(3);
        if decreasing {
            let small = |term: &C<T>, sum: &C<T>| norm_f64(term) <= tiny * norm_f64(sum);
            if small(&t, &f) && small(&s, &g) && small(&p, &fp) && small(&q, &gp) {
                break;
            }
        }
        k += 1;
        if k > 100_000 {
            break;
        }
    }
    let c1c = C::new(c1, T::zero());
    let c2c = C::new(c2, T::zero());
    (c1c.clone() * f - c2c.clone() * g, c1c * fp - c2c * gp)
}

/// Asymptotic expansion for large |z|, |arg z| ≤ 2π/3, as (Ai, Ai') = e^{−ξ}·(a, a′).
fn airy_asymptotic_scaled(z: Complex64) -> (Complex64, Complex64, Complex64) {
    let xi = 2.0 / 3.0 * z.powf(1.5);
    let mut u = 1.0f64;
    let mut su = Complex64::new(1.0, 0.0);
    let mut sv = Complex64::new(1.0, 0.0);
    let mut xik = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        xik *= -xi;
        let tu = u / xik;
        let mag = tu.norm();
        if mag > last {
            break;
        }
        su += tu;
        sv += v / xik;
        last = mag;
        if mag < 1e-17 {
            break;
        }
    }
    let pre = 1.0 / (2.0 * std::f64::consts::PI.sqrt());
    let q = z.powf(0.25);
    (pre / q * su, -pre * q * sv, -xi)
}

/// (Ai, Ai′) = e^{s}·(a, a′) for |z| > [`SERIES_RADIUS`]; keeps the quotient
/// finite where Ai itself overflows.
fn airy_far_scaled(z: Complex64) -> (Complex64, Complex64, Complex64) {
    if z.arg().abs() <= 2.0 * std::f64::consts::FRAC_PI_3 {
        return airy_asymptotic_scaled(z);
    }
    let j = Complex64::from_polar(1.0, 2.0 * std::f64::consts::FRAC_PI_3);
    let j2 = j * j;
    let (a1, a1p, s1) = airy_asymptotic_scaled(j * z);
    let (a2, a2p, s2) = airy_asymptotic_scaled(j2 * z);
    let (s, w1, w2) = if s1.re >= s2.re {
        (s1, Complex64::new(1.0, 0.0), (s2 - s1).exp())
    } else {
        (s2, (s1 - s2).exp(), Complex64::new(1.0, 0.0))
    };
    (-j * a1 * w1 - j2 * a2 * w2, -j2 * a1p * w1 - j * a2p * w2, s)
}

fn airy_far(z: Complex64) -> (Complex64, Complex64) {
    let (a, ap, s) = airy_far_scaled(z);
    let e = s.exp();
    (a * e, ap * e)
}

/// (Ai(z), Ai'(z)) to about 1e−13 relative accuracy away from zeros.
pub fn airy(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() <= SERIES_RADIUS {
        airy_near(z)
    } else {
        airy_far(z)
    }
}

fn airy_near(z: Complex64) -> (Complex64, Complex64) {
    let xi = 2.0 / 3.0 * z.powf(1.5);
    // largest term ~ e^{|ξ|}, result ~ e^{−ℜξ}
    let lost = ((xi.norm() + xi.re) / std::f64::consts::LN_2).max(0.0);
    let bits = 64 + 16 + lost.ceil() as u32;
    with_precision_bits(bits, || {
        let (a, ap) = airy_series::<BigReal>(&from_c64(z));
        (to_c64(&a), to_c64(&ap))
    })
}

/// Ai′(z)/Ai(z), finite wherever Ai does not vanish even if Ai overflows.
pub fn airy_log_derivative(z: Complex64) -> Complex64 {
    if z.norm() <= SERIES_RADIUS {
        let (a, ap) = airy_near(z);
        ap / a
    } else {
        let (a, ap, _) = airy_far_scaled(z);
        ap / a
    }
}
