//! Scalar root finders: safeguarded Newton on a real bracket, complex Newton,
//! and argument-principle isolation of zeros inside a rectangle.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::gl32;

/// Finds a root of `f` in `[a, b]` given `f(a)·f(b) ≤ 0`. `f` returns the
/// value and derivative; Newton steps leaving the bracket fall back to
/// bisection.
pub fn newton_bisect<F: Fn(f64) -> (f64, f64)>(f: F, mut a: f64, mut b: f64) -> f64 {
    let (fa, _) = f(a);
    let (fb, _) = f(b);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    if fa > 0.0 {
        std::mem::swap(&mut a, &mut b);
    }
    // Invariant: f(a) < 0 < f(b).
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx < 0.0 {
            a = x;
        } else {
            b = x;
        }
        let lo = a.min(b);
        let hi = a.max(b);
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) || hi - lo <= 4.0 * f64::EPSILON * hi.abs() {
            return next;
        }
        x = next;
    }
    x
}

/// Bisection on a sign change of `f`, to full precision.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            return m;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Complex Newton iteration. Returns `None` if the step does not shrink below
/// `1e-14·max(1, |z|)` within `max_iter` steps.
pub fn newton_complex<F: Fn(Complex64) -> (Complex64, Complex64)>(
    f: F,
    z0: Complex64,
    max_iter: usize,
) -> Option<Complex64> {
    let mut z = z0;
    for _ in 0..max_iter {
        let (v, d) = f(z);
        if v.norm() == 0.0 {
            return Some(z);
        }
        if d.norm() == 0.0 || !d.is_finite() {
            return None;
        }
        let step = v / d;
        z -= step;
        if !z.is_finite() {
            return None;
        }
        if step.norm() <= 1e-14 * z.norm().max(1.0) {
            return Some(z);
        }
    }
    None
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let ok = [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite())
            && re_min < re_max
            && im_min < im_max;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "rectangle [{re_min}, {re_max}]x[{im_min}, {im_max}]i is empty or unbounded"
            )));
        }
        Ok(Self { re_min, re_max, im_min, im_max })
    }

    #[must_use]
    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re_min - slack
            && z.re <= self.re_max + slack
            && z.im >= self.im_min - slack
            && z.im <= self.im_max + slack
    }

    /// True when `z` lies on the boundary to within `tol`.
    #[must_use]
    pub fn on_boundary(&self, z: Complex64, tol: f64) -> bool {
        self.contains(z, tol) && !self.contains_strict(z, tol)
    }

    fn contains_strict(&self, z: Complex64, tol: f64) -> bool {
        z.re > self.re_min + tol && z.re < self.re_max - tol && z.im > self.im_min + tol && z.im < self.im_max - tol
    }

    fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    fn split(&self, ratio: f64) -> (Rect, Rect) {
        if self.width() >= self.height() {
            let cut = self.re_min + ratio * self.width();
            (Rect { re_max: cut, ..*self }, Rect { re_min: cut, ..*self })
        } else {
            let cut = self.im_min + ratio * self.height();
            (Rect { im_max: cut, ..*self }, Rect { im_min: cut, ..*self })
        }
    }
}

/// Tuning for [`zeros_in_rect`].
#[derive(Debug, Clone, Copy)]
pub struct ContourOptions {
    /// Estimated distance `|f/f′|` below which a quadrature node is treated as
    /// sitting on a zero.
    pub zero_distance: f64,
    pub max_depth: usize,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self { zero_distance: 1e-9, max_depth: 60 }
    }
}

/// Zeros found inside a rectangle, with the winding number of its boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub zeros: Vec<Complex64>,
    pub winding: usize,
}

// Off-centre cut ratios; the first never puts a horizontal cut on the real
// axis for rectangles symmetric about it.
const SPLIT_RATIOS: [f64; 4] = [0.5371, 0.4629, 0.6113, 0.3887];
const EDGE_MAX_DEPTH: usize = 48;

/// Isolates every zero of the analytic function `f` (returning value and
/// derivative) inside `rect`, counting with multiplicity.
///
/// The boundary integrals `(1/2πi)∮ f′/f` and `(1/2πi)∮ z f′/f` are evaluated
/// with adaptive 32-point Gauss–Legendre per edge segment. Rectangles are
/// subdivided until each holds one zero, whose location is seeded by the
/// first moment and polished by Newton.
pub fn zeros_in_rect<F>(f: &F, rect: Rect, opts: ContourOptions) -> Result<ZeroSet>
where
    F: Fn(Complex64) -> (Complex64, Complex64),
{
    let (m0, _) = moments(f, &rect, &opts)?;
    let winding = round_winding(m0).ok_or(Error::ContourOnZero {
        near: Complex64::new(0.5 * (rect.re_min + rect.re_max), 0.5 * (rect.im_min + rect.im_max)),
        distance: f64::NAN,
    })?;
    let mut zeros = Vec::new();
    isolate(f, rect, winding, 0, &opts, &mut zeros)?;
    zeros.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ZeroSet { zeros, winding })
}

fn round_winding(m0: Complex64) -> Option<usize> {
    let n = m0.re.round();
    if n < 0.0 || (m0.re - n).abs() > 0.05 || m0.im.abs() > 0.05 {
        return None;
    }
    Some(n as usize)
}

fn isolate<F>(f: &F, rect: Rect, count: usize, depth: usize, opts: &ContourOptions, out: &mut Vec<Complex64>) -> Result<()>
where
    F: Fn(Complex64) -> (Complex64, Complex64),
{
    if count == 0 {
        return Ok(());
    }
    let scale = rect.width().max(rect.height());
    if count == 1 || scale < 1e-10 {
        let (m0, m1) = moments(f, &rect, opts)?;
        let seed = m1 / m0.re.round().max(1.0);
        if count > 1 {
            // Unresolvable cluster: report the centroid with multiplicity.
            out.extend(std::iter::repeat_n(seed, count));
            return Ok(());
        }
        if let Some(z) = newton_complex(f, seed, 60) {
            if rect.contains(z, 1e-9 * scale.max(1.0)) {
                out.push(z);
                return Ok(());
            }
        }
    }
    if depth >= opts.max_depth {
        return Err(Error::ContourOnZero {
            near: Complex64::new(rect.re_min, rect.im_min),
            distance: scale,
        });
    }
    let mut last_err = None;
    for ratio in SPLIT_RATIOS {
        let (a, b) = rect.split(ratio);
        let attempt = (|| -> Result<Vec<Complex64>> {
            let na = round_winding(moments(f, &a, opts)?.0).ok_or(Error::ContourOnZero {
                near: a.corners()[0],
                distance: f64::NAN,
            })?;
            let nb = count.checked_sub(na).ok_or(Error::ContourOnZero {
                near: a.corners()[2],
                distance: f64::NAN,
            })?;
            let mut found = Vec::new();
            isolate(f, a, na, depth + 1, opts, &mut found)?;
            isolate(f, b, nb, depth + 1, opts, &mut found)?;
            Ok(found)
        })();
        match attempt {
            Ok(found) => {
                out.extend(found);
                return Ok(());
            }
            Err(e @ Error::ContourOnZero { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one split ratio"))
}

/// `((1/2πi)∮ f′/f dz, (1/2πi)∮ z f′/f dz)` around `rect`, counter-clockwise.
fn moments<F>(f: &F, rect: &Rect, opts: &ContourOptions) -> Result<(Complex64, Complex64)>
where
    F: Fn(Complex64) -> (Complex64, Complex64),
{
    let c = rect.corners();
    let mut i0 = Complex64::new(0.0, 0.0);
    let mut i1 = Complex64::new(0.0, 0.0);
    for e in 0..4 {
        let (a0, a1) = edge(f, c[e], c[(e + 1) % 4], 0, opts)?;
        i0 += a0;
        i1 += a1;
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    Ok((i0 / two_pi_i, i1 / two_pi_i))
}

fn segment<F>(f: &F, a: Complex64, b: Complex64, opts: &ContourOptions) -> Result<(Complex64, Complex64, f64)>
where
    F: Fn(Complex64) -> (Complex64, Complex64),
{
    let rule = gl32();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s0 = Complex64::new(0.0, 0.0);
    let mut s1 = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    for (t, w) in rule.nodes().iter().zip(rule.weights()) {
        let z = mid + half * *t;
        let (v, d) = f(z);
        if d.norm() > 0.0 && (v / d).norm() < opts.zero_distance || v.norm() == 0.0 {
            return Err(Error::ContourOnZero { near: z, distance: (v / d).norm() });
        }
        let g = d / v;
        s0 += g * *w;
        s1 += g * z * *w;
        mass += g.norm() * *w;
    }
    Ok((s0 * half, s1 * half, mass * half.norm()))
}

fn edge<F>(f: &F, a: Complex64, b: Complex64, depth: usize, opts: &ContourOptions) -> Result<(Complex64, Complex64)>
where
    F: Fn(Complex64) -> (Complex64, Complex64),
{
    let (w0, _, mass) = segment(f, a, b, opts)?;
    let m = 0.5 * (a + b);
    let (l0, l1, _) = segment(f, a, m, opts)?;
    let (r0, r1, _) = segment(f, m, b, opts)?;
    let diff = (l0 + r0 - w0).norm();
    if diff <= 1e-11 * mass.max(1.0) {
        return Ok((l0 + r0, l1 + r1));
    }
    if depth >= EDGE_MAX_DEPTH {
        return Err(Error::ContourOnZero { near: m, distance: (b - a).norm() });
    }
    let (p0, p1) = edge(f, a, m, depth + 1, opts)?;
    let (q0, q1) = edge(f, m, b, depth + 1, opts)?;
    Ok((p0 + q0, p1 + q1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(roots: Vec<Complex64>) -> impl Fn(Complex64) -> (Complex64, Complex64) {
        move |z| {
            let mut v = Complex64::new(1.0, 0.0);
            let mut d = Complex64::new(0.0, 0.0);
            for r in &roots {
                d = d * (z - r) + v;
                v *= z - r;
            }
            (v, d)
        }
    }

    #[test]
    fn newton_bisect_finds_cosine_root() {
        let r = newton_bisect(|x| (x.cos(), -x.sin()), 1.0, 2.0);
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn bisect_reaches_full_precision() {
        let r = bisect(|x| x * x - 2.0, 1.0, 2.0);
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn isolates_polynomial_roots() {
        let roots = vec![
            Complex64::new(1.0, 1.0),
            Complex64::new(1.0, -1.0),
            Complex64::new(2.5, 0.0),
            Complex64::new(-3.0, 0.2),
        ];
        let f = poly(roots.clone());
        let rect = Rect::new(0.1, 4.0, -2.0, 2.0).unwrap();
        let set = zeros_in_rect(&f, rect, ContourOptions::default()).unwrap();
        assert_eq!(set.winding, 3);
        assert_eq!(set.zeros.len(), 3);
        for want in &roots[..3] {
            assert!(set.zeros.iter().any(|z| (z - want).norm() < 1e-12));
        }
    }

    #[test]
    fn separates_close_pair() {
        let roots = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0 + 1e-6, 0.0)];
        let f = poly(roots.clone());
        let set = zeros_in_rect(&f, Rect::new(0.5, 2.0, -1.0, 1.0).unwrap(), ContourOptions::default()).unwrap();
        assert_eq!(set.zeros.len(), 2);
        for want in &roots {
            assert!(set.zeros.iter().any(|z| (z - want).norm() < 1e-9));
        }
    }

    #[test]
    fn boundary_zero_is_reported() {
        let f = poly(vec![Complex64::new(1.0, 0.0)]);
        let err = zeros_in_rect(&f, Rect::new(1.0, 2.0, -1.0, 1.0).unwrap(), ContourOptions::default());
        assert!(matches!(err, Err(Error::ContourOnZero { .. })));
    }

    #[test]
    fn empty_rect_rejected() {
        assert!(Rect::new(1.0, 1.0, 0.0, 1.0).is_err());
    }
}
