use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::scalar::{c_cbrt, c_ratio, from_c64, Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    /// εv dv/du = (1−u²)v + α − u
    VdpOuter,
    /// Y dY/dX = 2XY + 2
    VdpInner,
    /// Y dY/dX = 2XY(1 − ε^{1/3}X/2) + α + 1 − ε^{1/3}X
    VdpInnerEps,
    /// εz z' = 2x/(1+x)²(z−Φ₀) − (a−1)/(1+x)² z − 2εz(z−Φ₀)/(1+x), Φ₀ = 1/(2(1+x)³)
    BrusselatorOuter,
    /// Y dY/dX = −(2/X)(Y − 1/(2X³))(Y + 1/X)
    BrusselatorInner,
    /// εy' = λy with λ = `param`
    LinearTest,
    /// εy' = Σ c_{ij} x^i y^j
    UserPolynomial,
}

impl FieldKind {
    /// Kinds whose quotient form divides by the state.
    pub fn divides_by_state(self) -> bool {
        matches!(
            self,
            FieldKind::VdpOuter
                | FieldKind::VdpInner
                | FieldKind::VdpInnerEps
                | FieldKind::BrusselatorOuter
                | FieldKind::BrusselatorInner
        )
    }

    pub fn uses_eps(self) -> bool {
        !matches!(self, FieldKind::VdpInner | FieldKind::BrusselatorInner)
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "vdp-outer" => FieldKind::VdpOuter,
            "vdp-inner" => FieldKind::VdpInner,
            "vdp-inner-eps" => FieldKind::VdpInnerEps,
            "brusselator-outer" => FieldKind::BrusselatorOuter,
            "brusselator-inner" => FieldKind::BrusselatorInner,
            "linear-test" => FieldKind::LinearTest,
            "user-polynomial" => FieldKind::UserPolynomial,
            _ => return None,
        })
    }
}

/// Right-hand side dy/dx = G(x, y) with double-precision parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OdeField {
    pub kind: FieldKind,
    pub eps: Complex64,
    /// α (Van der Pol), a (Brusselator) or λ (linear test).
    pub param: Complex64,
    /// `poly[i][j]` multiplies x^i y^j (user polynomial only).
    pub poly: Vec<Vec<Complex64>>,
}

impl OdeField {
    pub fn new(kind: FieldKind, eps: Complex64, param: Complex64) -> Self {
        OdeField { kind, eps, param, poly: Vec::new() }
    }

    pub fn vdp_outer(eps: f64, alpha: Complex64) -> Self {
        Self::new(FieldKind::VdpOuter, Complex64::new(eps, 0.0), alpha)
    }

    pub fn vdp_inner() -> Self {
        Self::new(FieldKind::VdpInner, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn brusselator_outer(eps: f64, a: Complex64) -> Self {
        Self::new(FieldKind::BrusselatorOuter, Complex64::new(eps, 0.0), a)
    }

    pub fn brusselator_inner() -> Self {
        Self::new(FieldKind::BrusselatorInner, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn linear_test(eps: f64, lambda: f64) -> Self {
        Self::new(FieldKind::LinearTest, Complex64::new(eps, 0.0), Complex64::new(lambda, 0.0))
    }

    pub fn user_polynomial(eps: Complex64, poly: Vec<Vec<Complex64>>) -> Self {
        OdeField { kind: FieldKind::UserPolynomial, eps, param: Complex64::new(0.0, 0.0), poly }
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        Field::<f64>::from_field(self).eval(&x, &y)
    }
}

/// Field with parameters in the working scalar type.
#[derive(Clone, Debug)]
pub struct Field<T: Real> {
    pub kind: FieldKind,
    pub eps: C<T>,
    pub param: C<T>,
    inv_eps: C<T>,
    eps_cbrt: C<T>,
    poly: Vec<Vec<C<T>>>,
    one: C<T>,
    two: C<T>,
    half: C<T>,
}

impl<T: Real> Field<T> {
    pub fn new(kind: FieldKind, eps: C<T>, param: C<T>) -> Self {
        let one = c_ratio::<T>(1, 1);
        let inv_eps = one / eps.clone();
        let eps_cbrt = c_cbrt(&eps);
        Field {
            kind,
            eps,
            param,
            inv_eps,
            eps_cbrt,
            poly: Vec::new(),
            one: c_ratio(1, 1),
            two: c_ratio(2, 1),
            half: c_ratio(1, 2),
        }
    }

    pub fn from_field(f: &OdeField) -> Self {
        let mut out = Self::new(f.kind, from_c64(f.eps), from_c64(f.param));
        out.poly = f.poly.iter().map(|row| row.iter().map(|&c| from_c64(c)).collect()).collect();
        out
    }

    pub fn eval(&self, x: &C<T>, y: &C<T>) -> C<T> {
        let (one, two) = (self.one.clone(), self.two.clone());
        match self.kind {
            FieldKind::VdpOuter => {
                let rhs = (one - x.clone() * x.clone()) * y.clone() + self.param.clone() - x.clone();
                rhs * self.inv_eps.clone() / y.clone()
            }
            FieldKind::VdpInner => two.clone() * x.clone() + two / y.clone(),
            FieldKind::VdpInnerEps => {
                let e = &self.eps_cbrt;
                let half = self.half.clone();
                let lin = two * x.clone() * y.clone() * (one.clone() - half * e.clone() * x.clone());
                (lin + self.param.clone() + one - e.clone() * x.clone()) / y.clone()
            }
            FieldKind::BrusselatorOuter => {
                let opx = one.clone() + x.clone();
                let opx2 = opx.clone() * opx.clone();
                let phi0 = one.clone() / (two.clone() * opx2.clone() * opx.clone());
                let dz = y.clone() - phi0;
                let t1 = two.clone() * x.clone() / opx2.clone() * dz.clone();
                let t2 = (self.param.clone() - one) / opx2 * y.clone();
                let t3 = two * self.eps.clone() * y.clone() * dz / opx;
                (t1 - t2 - t3) * self.inv_eps.clone() / y.clone()
            }
            FieldKind::BrusselatorInner => {
                let inv_x = one.clone() / x.clone();
                let inv_x3 = inv_x.clone() * inv_x.clone() * inv_x.clone();
                let half = self.half.clone();
                let a = y.clone() - half * inv_x3;
                let b = y.clone() + inv_x.clone();
                -(two * inv_x * a * b) / y.clone()
            }
            FieldKind::LinearTest => self.param.clone() * y.clone() * self.inv_eps.clone(),
            FieldKind::UserPolynomial => {
                let mut acc = c_ratio::<T>(0, 1);
                let mut xp = one.clone();
                for row in &self.poly {
                    let mut inner = c_ratio::<T>(0, 1);
                    for c in row.iter().rev() {
                        inner = inner * y.clone() + c.clone();
                    }
                    acc = acc + inner * xp.clone();
                    xp = xp * x.clone();
                }
                acc * self.inv_eps.clone()
            }
        }
    }
}
