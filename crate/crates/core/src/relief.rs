//! Relief R(x) = ℜ(e^{−iθ}F(x)) with F' polynomial, descent certificates for
//! integration paths, steepest-descent paths and contour extraction.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReliefError {
    #[error("path has zero length")]
    DegeneratePath,
    #[error("path needs at least two points")]
    TooFewPoints,
    #[error("F' vanishes at the start point {0}")]
    StagnationAtCol(Complex64),
    #[error("F' is identically zero")]
    ZeroDerivative,
    #[error("degenerate bounding box")]
    DegenerateBox,
}

/// F'(x) as complex coefficients (lowest degree first), F(base_point) = 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReliefSpec {
    derivative: Vec<Complex64>,
    antiderivative: Vec<Complex64>,
    pub base_point: Complex64,
    pub theta: f64,
    offset: Complex64,
}

impl ReliefSpec {
    pub fn new(derivative: Vec<Complex64>, base_point: Complex64, theta: f64) -> Result<Self, ReliefError> {
        let mut derivative = derivative;
        while derivative.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            derivative.pop();
        }
        if derivative.is_empty() {
            return Err(ReliefError::ZeroDerivative);
        }
        let mut antiderivative = vec![Complex64::new(0.0, 0.0)];
        antiderivative.extend(derivative.iter().enumerate().map(|(k, c)| c / (k as f64 + 1.0)));
        let offset = horner(&antiderivative, base_point);
        Ok(ReliefSpec { derivative, antiderivative, base_point, theta, offset })
    }

    pub fn from_real(derivative: &[f64], base_point: f64) -> Self {
        let d = derivative.iter().map(|&c| Complex64::new(c, 0.0)).collect();
        Self::new(d, Complex64::new(base_point, 0.0), 0.0).expect("nonzero derivative")
    }

    /// F' = (t−1)(t+1)², based at the col 1.
    pub fn vdp() -> Self {
        Self::from_real(&[-1.0, -1.0, 1.0, 1.0], 1.0)
    }

    /// F' = 2t(1+t), based at the col 0.
    pub fn brusselator() -> Self {
        Self::from_real(&[0.0, 2.0, 2.0], 0.0)
    }

    /// F' = t, the model relief with a simple col at 0.
    pub fn quadratic() -> Self {
        Self::from_real(&[0.0, 1.0], 0.0)
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn derivative_coeffs(&self) -> &[Complex64] {
        &self.derivative
    }

    pub fn derivative(&self, x: Complex64) -> Complex64 {
        horner(&self.derivative, x)
    }

    /// F(x) with F(base_point) = 0.
    pub fn antiderivative(&self, x: Complex64) -> Complex64 {
        horner(&self.antiderivative, x) - self.offset
    }

    fn rotation(&self) -> Complex64 {
        Complex64::from_polar(1.0, -self.theta)
    }

    pub fn value(&self, x: Complex64) -> f64 {
        (self.rotation() * self.antiderivative(x)).re
    }

    /// Zeros of F' (cols), found by Durand–Kerner and polished by Newton.
    pub fn cols(&self) -> Vec<Complex64> {
        polynomial_roots(&self.derivative)
    }
}

fn horner(c: &[Complex64], x: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a)
}

pub fn relief_value(spec: &ReliefSpec, x: Complex64) -> f64 {
    spec.value(x)
}

fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let mut roots: Vec<Complex64> = (0..n).map(|k| Complex64::new(0.4, 0.9).powu(k as u32)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let num = horner(&monic, roots[i]);
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            if den.norm() == 0.0 {
                continue;
            }
            let step = num / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

/// Piecewise-linear path through `vertices`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexPath {
    vertices: Vec<Complex64>,
}

impl ComplexPath {
    /// Drops repeated vertices; errors on an empty or zero-length path.
    pub fn new(vertices: Vec<Complex64>) -> Result<Self, ReliefError> {
        if vertices.len() < 2 {
            return Err(ReliefError::TooFewPoints);
        }
        let mut v: Vec<Complex64> = Vec::with_capacity(vertices.len());
        for p in vertices {
            if v.last().is_none_or(|&q| q != p) {
                v.push(p);
            }
        }
        if v.len() < 2 {
            return Err(ReliefError::DegeneratePath);
        }
        Ok(ComplexPath { vertices: v })
    }

    pub fn segment(a: Complex64, b: Complex64) -> Result<Self, ReliefError> {
        Self::new(vec![a, b])
    }

    pub fn from_real(points: &[f64]) -> Result<Self, ReliefError> {
        Self::new(points.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn start(&self) -> Complex64 {
        self.vertices[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.vertices.last().unwrap()
    }

    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        ComplexPath { vertices: v }
    }

    pub fn conj(&self) -> Self {
        ComplexPath { vertices: self.vertices.iter().map(|z| z.conj()).collect() }
    }

    /// Euclidean distance from `z` to the polyline.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| {
                let d = w[1] - w[0];
                let t = ((z - w[0]) * d.conj()).re / d.norm_sqr();
                (w[0] + d * t.clamp(0.0, 1.0) - z).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Splits segment `k` at parameter `t ∈ (0,1)`.
    pub fn split_segment(&self, k: usize, t: f64) -> Self {
        let mut v = self.vertices.clone();
        let p = v[k] + (v[k + 1] - v[k]) * t;
        v.insert(k + 1, p);
        ComplexPath { vertices: v }
    }

    pub fn then(&self, other: &ComplexPath) -> Result<Self, ReliefError> {
        let mut v = self.vertices.clone();
        v.extend_from_slice(&other.vertices);
        Self::new(v)
    }
}

/// Sampled accessibility constant of a path (Definition of a descending path).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DescentCertificate {
    /// inf over samples of (−dR/ds)/|F'(γ)γ'|
    pub c: f64,
    pub worst_point: Complex64,
    pub descending: bool,
    /// First sample where |F'| fell below the col tolerance, if any.
    pub col_on_path: Option<Complex64>,
}

pub const DEFAULT_SAMPLES_PER_SEGMENT: usize = 64;
pub const COL_TOLERANCE: f64 = 1e-12;

pub fn descent_check(spec: &ReliefSpec, path: &ComplexPath) -> Result<DescentCertificate, ReliefError> {
    descent_check_with(spec, path, DEFAULT_SAMPLES_PER_SEGMENT)
}

/// Samples sit at segment midpoints of a uniform subdivision, so a col at a
/// path endpoint (the usual matching point) is never sampled itself.
pub fn descent_check_with(
    spec: &ReliefSpec,
    path: &ComplexPath,
    samples_per_segment: usize,
) -> Result<DescentCertificate, ReliefError> {
    if path.length() == 0.0 {
        return Err(ReliefError::DegeneratePath);
    }
    let rot = spec.rotation();
    let n = samples_per_segment.max(1);
    let mut c = f64::INFINITY;
    let mut worst = path.start();
    let mut col = None;
    for w in path.vertices.windows(2) {
        let d = w[1] - w[0];
        if d.norm() == 0.0 {
            continue;
        }
        for k in 0..n {
            let s = (k as f64 + 0.5) / n as f64;
            let x = w[0] + d * s;
            let fp = spec.derivative(x);
            if fp.norm() < COL_TOLERANCE {
                col.get_or_insert(x);
                continue;
            }
            let slope = (rot * fp * d).re;
            let ratio = -slope / (fp * d).norm();
            if ratio < c {
                c = ratio;
                worst = x;
            }
        }
    }
    if !c.is_finite() {
        c = 0.0;
    }
    // a col strictly inside the path, which midpoint sampling can step over
    if col.is_none() {
        let end = path.end();
        col = spec.cols().into_iter().find(|&z| {
            let tol = 1e-5 * (1.0 + z.norm());
            (z - end).norm() > tol && (z - path.start()).norm() > tol && path.distance_to(z) < tol
        });
    }
    Ok(DescentCertificate { c, worst_point: worst, descending: c > 0.0 && col.is_none(), col_on_path: col })
}

/// When to stop a steepest-descent trace.
#[derive(Clone, Copy, Debug)]
pub struct DescentStop {
    pub target: Option<Complex64>,
    pub radius: f64,
    pub max_arclength: f64,
    pub step: f64,
}

impl Default for DescentStop {
    fn default() -> Self {
        DescentStop { target: None, radius: 1e-3, max_arclength: 50.0, step: 1e-2 }
    }
}

/// Unit-speed steepest descent dx/ds = −e^{iθ}·conj(F'(x))/|F'(x)|, RK4.
pub fn steepest_descent_path(
    spec: &ReliefSpec,
    start: Complex64,
    stop: DescentStop,
) -> Result<ComplexPath, ReliefError> {
    let rot = Complex64::from_polar(1.0, spec.theta);
    let dir = |x: Complex64| -> Option<Complex64> {
        let fp = spec.derivative(x);
        let m = fp.norm();
        if m < COL_TOLERANCE {
            None
        } else {
            Some(-rot * fp.conj() / m)
        }
    };
    if dir(start).is_none() {
        return Err(ReliefError::StagnationAtCol(start));
    }
    let mut pts = vec![start];
    let mut x = start;
    let mut s = 0.0;
    while s < stop.max_arclength {
        if let Some(t) = stop.target {
            if (x - t).norm() <= stop.radius {
                break;
            }
        }
        let mut h = stop.step.min(stop.max_arclength - s);
        if let Some(t) = stop.target {
            h = h.min(0.5 * (x - t).norm()).max(stop.radius * 0.25);
        }
        let Some(k1) = dir(x) else { return stalled(pts, x, stop) };
        let Some(k2) = dir(x + k1 * (h / 2.0)) else { return stalled(pts, x, stop) };
        let Some(k3) = dir(x + k2 * (h / 2.0)) else { return stalled(pts, x, stop) };
        let Some(k4) = dir(x + k3 * h) else { return stalled(pts, x, stop) };
        let next = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if spec.value(next) >= spec.value(x) {
            // Oscillating around a col: no further descent available.
            return stalled(pts, x, stop);
        }
        x = next;
        s += h;
        pts.push(x);
    }
    ComplexPath::new(pts)
}

fn stalled(pts: Vec<Complex64>, x: Complex64, stop: DescentStop) -> Result<ComplexPath, ReliefError> {
    match stop.target {
        Some(t) if (x - t).norm() <= stop.radius * 4.0 => ComplexPath::new(pts),
        _ => Err(ReliefError::StagnationAtCol(x)),
    }
}

/// Point of maximal relief on the arc |x| = radius, arg x ∈ [phi0, phi1].
pub fn maximize_on_arc(spec: &ReliefSpec, radius: f64, phi0: f64, phi1: f64) -> Complex64 {
    let at = |phi: f64| Complex64::from_polar(radius, phi);
    let n = 2048;
    let mut best = (f64::NEG_INFINITY, phi0);
    for k in 0..=n {
        let phi = phi0 + (phi1 - phi0) * k as f64 / n as f64;
        let r = spec.value(at(phi));
        if r > best.0 {
            best = (r, phi);
        }
    }
    // golden-section polish inside the bracketing cell
    let h = (phi1 - phi0) / n as f64;
    let (mut a, mut b) = ((best.1 - h).max(phi0.min(phi1)), (best.1 + h).min(phi0.max(phi1)));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if spec.value(at(c)) > spec.value(at(d)) {
            b = d;
        } else {
            a = c;
        }
    }
    at(0.5 * (a + b))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl BBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self, ReliefError> {
        if !(re_max > re_min && im_max > im_min) {
            return Err(ReliefError::DegenerateBox);
        }
        Ok(BBox { re_min, re_max, im_min, im_max })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polyline {
    pub level: f64,
    pub points: Vec<Complex64>,
}

/// Marching squares over a `resolution × resolution` cell grid.
pub fn level_curves(
    spec: &ReliefSpec,
    levels: &[f64],
    bbox: BBox,
    resolution: usize,
) -> Result<Vec<Polyline>, ReliefError> {
    let n = resolution.max(2);
    let dx = (bbox.re_max - bbox.re_min) / n as f64;
    let dy = (bbox.im_max - bbox.im_min) / n as f64;
    let pt = |i: usize, j: usize| Complex64::new(bbox.re_min + i as f64 * dx, bbox.im_min + j as f64 * dy);
    let grid: Vec<Vec<f64>> = (0..=n).map(|j| (0..=n).map(|i| spec.value(pt(i, j))).collect()).collect();

    let mut out = Vec::new();
    for &level in levels {
        // Edge keys: (0,i,j) is the horizontal edge from (i,j), (1,i,j) the vertical one.
        let mut points: HashMap<(u8, usize, usize), Complex64> = HashMap::new();
        let mut segments: Vec<((u8, usize, usize), (u8, usize, usize))> = Vec::new();
        let mut edge_point = |key: (u8, usize, usize)| -> (u8, usize, usize) {
            points.entry(key).or_insert_with(|| {
                let (o, i, j) = key;
                let (i2, j2) = if o == 0 { (i + 1, j) } else { (i, j + 1) };
                let (v1, v2) = (grid[j][i], grid[j2][i2]);
                let t = if v2 == v1 { 0.5 } else { ((level - v1) / (v2 - v1)).clamp(0.0, 1.0) };
                pt(i, j) + (pt(i2, j2) - pt(i, j)) * t
            });
            key
        };
        for j in 0..n {
            for i in 0..n {
                let v = [grid[j][i], grid[j][i + 1], grid[j + 1][i + 1], grid[j + 1][i]];
                let mut case = 0u8;
                for (b, &val) in v.iter().enumerate() {
                    if val > level {
                        case |= 1 << b;
                    }
                }
                let bottom = (0u8, i, j);
                let right = (1u8, i + 1, j);
                let top = (0u8, i, j + 1);
                let left = (1u8, i, j);
                let centre_above = v.iter().sum::<f64>() / 4.0 > level;
                let pairs: &[((u8, usize, usize), (u8, usize, usize))] = match case {
                    0 | 15 => &[],
                    1 | 14 => &[(left, bottom)],
                    2 | 13 => &[(bottom, right)],
                    3 | 12 => &[(left, right)],
                    4 | 11 => &[(right, top)],
                    6 | 9 => &[(bottom, top)],
                    7 | 8 => &[(left, top)],
                    5 => {
                        if centre_above {
                            &[(left, top), (bottom, right)]
                        } else {
                            &[(left, bottom), (right, top)]
                        }
                    }
                    10 => {
                        if centre_above {
                            &[(left, bottom), (right, top)]
                        } else {
                            &[(left, top), (bottom, right)]
                        }
                    }
                    _ => unreachable!(),
                };
                for &(a, b) in pairs {
                    segments.push((edge_point(a), edge_point(b)));
                }
            }
        }
        out.extend(stitch(&segments, &points, level));
    }
    Ok(out)
}

type EdgeKey = (u8, usize, usize);

fn stitch(segments: &[(EdgeKey, EdgeKey)], points: &HashMap<EdgeKey, Complex64>, level: f64) -> Vec<Polyline> {
    let mut adj: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        adj.entry(*a).or_default().push(k);
        adj.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    let next_from = |key: EdgeKey, used: &[bool]| -> Option<usize> {
        adj.get(&key).and_then(|v| v.iter().copied().find(|&s| !used[s]))
    };
    // Start from open ends first so open curves come out in one piece.
    let mut starts: Vec<EdgeKey> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(k, _)| *k).collect();
    starts.sort();
    let mut all: Vec<EdgeKey> = adj.keys().copied().collect();
    all.sort();
    starts.extend(all);
    for start in starts {
        while let Some(first) = next_from(start, &used) {
            let mut chain = vec![start];
            let mut cur = start;
            let mut seg = Some(first);
            while let Some(s) = seg {
                used[s] = true;
                let (a, b) = segments[s];
                cur = if a == cur { b } else { a };
                chain.push(cur);
                seg = next_from(cur, &used);
            }
            lines.push(Polyline { level, points: chain.iter().map(|k| points[k]).collect() });
        }
    }
    lines
}

/// Plain SVG: one `<path>` per polyline, y axis pointing up.
pub fn contours_to_svg(lines: &[Polyline], bbox: BBox, width: f64) -> String {
    let scale = width / (bbox.re_max - bbox.re_min);
    let height = (bbox.im_max - bbox.im_min) * scale;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, "<!-- canard {} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    for line in lines {
        let mut d = String::new();
        for (k, p) in line.points.iter().enumerate() {
            let x = (p.re - bbox.re_min) * scale;
            let y = (bbox.im_max - p.im) * scale;
            let _ = write!(d, "{}{:.4},{:.4}", if k == 0 { "M" } else { " L" }, x, y);
        }
        let _ = writeln!(
            s,
            r#"  <path data-level="{}" d="{}" fill="none" stroke="black" stroke-width="1"/>"#,
            line.level, d
        );
    }
    s.push_str("</svg>\n");
    s
}
