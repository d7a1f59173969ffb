//! Adaptive Gauss–Kronrod (7, 15) quadrature along complex segments.

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One (7, 15) application on [a, b]: (Kronrod estimate, |Kronrod − Gauss|).
fn gk15(f: &impl Fn(Complex64) -> Complex64, a: Complex64, b: Complex64) -> (Complex64, f64) {
    let c = (a + b) * 0.5;
    let h = (b - a) * 0.5;
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let s = f(c + h * XGK[i]) + f(c - h * XGK[i]);
        k += s * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// ∫_a^b f along the straight segment, refined until the Kronrod–Gauss gap on
/// every piece sums below `tol`.
pub fn integrate_segment(f: impl Fn(Complex64) -> Complex64, a: Complex64, b: Complex64, tol: f64) -> (Complex64, f64) {
    let mut pieces = vec![(a, b, gk15(&f, a, b))];
    for _ in 0..2000 {
        let err: f64 = pieces.iter().map(|p| p.2 .1).sum();
        if err <= tol {
            break;
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .expect("non-empty");
        let (pa, pb, _) = pieces.swap_remove(idx);
        let m = (pa + pb) * 0.5;
        pieces.push((pa, m, gk15(&f, pa, m)));
        pieces.push((m, pb, gk15(&f, m, pb)));
    }
    let total = pieces.iter().map(|p| p.2 .0).sum();
    let err = pieces.iter().map(|p| p.2 .1).sum();
    (total, err)
}

/// ∫ along consecutive segments of a polyline.
pub fn integrate_polyline(f: impl Fn(Complex64) -> Complex64, vertices: &[Complex64], tol: f64) -> (Complex64, f64) {
    let n = vertices.len().saturating_sub(1).max(1) as f64;
    vertices.windows(2).fold((Complex64::new(0.0, 0.0), 0.0), |(s, e), w| {
        let (v, ve) = integrate_segment(&f, w[0], w[1], tol / n);
        (s + v, e + ve)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let (v, _) = integrate_segment(|z| z * z, Complex64::new(0.0, 0.0), Complex64::new(1.0, 1.0), 1e-14);
        let want = Complex64::new(1.0, 1.0).powi(3) / 3.0;
        assert!((v - want).norm() < 1e-14);
    }

    #[test]
    fn exponential_on_polyline() {
        let pts = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 2.0), Complex64::new(-1.0, 1.0)];
        let (v, _) = integrate_polyline(|z| z.exp(), &pts, 1e-13);
        let want = pts[2].exp() - 1.0;
        assert!((v - want).norm() < 1e-12);
    }
}
