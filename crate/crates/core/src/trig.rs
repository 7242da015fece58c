//! Scalar trigonometric building blocks.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Below this `|sin s|` the kernel switches to its endpoint expansion.
const KERNEL_SINGULAR: f64 = 1e-6;
/// Below this `|sin x|` the closed-form Dirichlet sums fall back to summation.
const SUM_SINGULAR: f64 = 1e-8;

/// `u_ell(s) = sin(ell s) / (ell sin s)` on `[0, pi]`.
pub fn u_kernel(ell: usize, s: f64) -> Result<f64> {
    if ell == 0 {
        return Err(Error::InvalidParameter("kernel order must be >= 1".into()));
    }
    if !(0.0..=PI).contains(&s) {
        return Err(Error::Domain { value: s, domain: "[0, pi]" });
    }
    Ok(u_kernel_unchecked(ell, s))
}

/// Kernel for any real `s`; removable singularities at multiples of `pi` are filled.
pub(crate) fn u_kernel_unchecked(ell: usize, s: f64) -> f64 {
    if ell == 1 {
        return 1.0;
    }
    let sin_s = s.sin();
    if sin_s.abs() >= KERNEL_SINGULAR {
        return (ell as f64 * s).sin() / (ell as f64 * sin_s);
    }
    // s = p*pi + e: u = (-1)^{p(ell+1)} sinc-ratio(e), and 1 - u ~ (ell^2 - 1) e^2 / 6.
    let p = (s / PI).round();
    let e = s - p * PI;
    let sign = if (p as i64 * (ell as i64 + 1)) % 2 == 0 { 1.0 } else { -1.0 };
    sign * (1.0 - one_minus_sinc_ratio(ell, e))
}

/// `1 - sin(ell e)/(ell sin e)` for small `|ell e|`, by series.
fn one_minus_sinc_ratio(ell: usize, e: f64) -> f64 {
    // sinc(e) - sinc(ell e) = sum_{k>=1} (-1)^{k+1} (ell^{2k} - 1) e^{2k} / (2k+1)!
    let l2 = (ell * ell) as f64;
    let e2 = e * e;
    let mut diff = 0.0;
    let mut e_pow = 1.0;
    let mut l_pow = 1.0;
    let mut fact = 1.0;
    for k in 1..=12 {
        e_pow *= e2;
        l_pow *= l2;
        fact *= ((2 * k) * (2 * k + 1)) as f64;
        let term = (l_pow - 1.0) * e_pow / fact;
        if k % 2 == 1 {
            diff += term;
        } else {
            diff -= term;
        }
        if term.abs() < 1e-18 * diff.abs() {
            break;
        }
    }
    let sinc_e = if e == 0.0 { 1.0 } else { e.sin() / e };
    diff / sinc_e
}

/// `1 - u_ell(s)` for `s` in `[0, pi/2]`, accurate when `u` is close to 1.
pub fn one_minus_u(ell: usize, s: f64) -> f64 {
    if ell == 1 {
        return 0.0;
    }
    if ell as f64 * s.abs() < 0.5 {
        one_minus_sinc_ratio(ell, s)
    } else {
        1.0 - u_kernel_unchecked(ell, s)
    }
}

/// `(cos(a x), sin(a x))` with the rounding error of the product `a x` fed back
/// to first order, so large multiples keep their accuracy near zeros.
pub(crate) fn sin_cos_of_product(a: f64, x: f64) -> (f64, f64) {
    let p = a * x;
    let err = a.mul_add(x, -p);
    let (s, c) = p.sin_cos();
    (s + c * err, c - s * err)
}

/// `1 + u_order(y) cos(freq x)` as a sum of two non-negative terms,
/// `(1 - |u|) + 2|u| cos^2(freq x / 2)` (or `sin^2` when `u < 0`).
pub(crate) fn one_plus_kernel_cos(order: usize, y: f64, freq: f64, x: f64) -> f64 {
    let u = u_kernel_unchecked(order, y);
    // |u_order| is pi-periodic and even; fold y into [0, pi/2].
    let folded = y.rem_euclid(PI);
    let folded = folded.min(PI - folded);
    let one_minus_abs = if order as f64 * folded < 0.5 { one_minus_u(order, folded) } else { 1.0 - u.abs() };
    let (s, c) = sin_cos_of_product(0.5 * freq, x);
    let trig_sq = if u >= 0.0 { c * c } else { s * s };
    one_minus_abs + 2.0 * u.abs() * trig_sq
}

/// `sum_{j=0}^{m-1} cos((2j + p) x)`.
pub fn dirichlet_cos_sum(m: usize, p: i64, x: f64) -> f64 {
    let sin_x = x.sin();
    if sin_x.abs() < SUM_SINGULAR {
        return (0..m).map(|j| ((2 * j as i64 + p) as f64 * x).cos()).sum();
    }
    (m as f64 * x).sin() * ((m as i64 - 1 + p) as f64 * x).cos() / sin_x
}

/// `sum_{j=0}^{m-1} sin((2j + p) x)`.
pub fn dirichlet_sin_sum(m: usize, p: i64, x: f64) -> f64 {
    let sin_x = x.sin();
    if sin_x.abs() < SUM_SINGULAR {
        return (0..m).map(|j| ((2 * j as i64 + p) as f64 * x).sin()).sum();
    }
    (m as f64 * x).sin() * ((m as i64 - 1 + p) as f64 * x).sin() / sin_x
}

/// `V(x) = sum_{j=0}^{n} a_j cos(jx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosinePolynomial {
    coefficients: Vec<f64>,
}

impl CosinePolynomial {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter("a cosine polynomial needs at least one coefficient".into()));
        }
        Ok(Self { coefficients })
    }

    /// The single cosine `cos(k x)`.
    pub fn monomial(k: usize) -> Self {
        let mut coefficients = vec![0.0; k + 1];
        coefficients[k] = 1.0;
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&a| a == 0.0)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.evaluate_with_derivative(x).0
    }

    pub fn evaluate_derivative(&self, x: f64) -> f64 {
        self.evaluate_with_derivative(x).1
    }

    /// `(V(x), V'(x))` by angle addition: one `sin_cos` call per point.
    pub fn evaluate_with_derivative(&self, x: f64) -> (f64, f64) {
        let (s1, c1) = x.sin_cos();
        let (mut c, mut s) = (1.0, 0.0);
        let mut value = 0.0;
        let mut deriv = 0.0;
        for (j, &a) in self.coefficients.iter().enumerate() {
            value += a * c;
            deriv -= j as f64 * a * s;
            let next_c = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = next_c;
        }
        (value, deriv)
    }

    /// Values on an arbitrary set of points, `O(n * points)`.
    pub fn evaluate_many(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.evaluate(x)).collect()
    }
}

/// Fills `cos(jx)` and `sin(jx)` for `j = 0..cos.len()` by angle addition.
pub(crate) fn cos_sin_table(x: f64, cos: &mut [f64], sin: &mut [f64]) {
    let (s1, c1) = x.sin_cos();
    let (mut c, mut s) = (1.0, 0.0);
    for (cj, sj) in cos.iter_mut().zip(sin.iter_mut()) {
        *cj = c;
        *sj = s;
        let next_c = c * c1 - s * s1;
        s = s * c1 + c * s1;
        c = next_c;
    }
}
