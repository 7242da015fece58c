//! Real zeros of a cosine polynomial by dense sign-change scanning.
//!
//! The scan grid is the half-step-shifted uniform grid `x_k = 2 pi (k + 1/2) / M`
//! with `M = samples_per_period * n`, restricted to the requested interval and
//! closed off with the interval endpoints. Grid values come from one length-`M`
//! FFT ([`GridMethod::Fft`]) or from per-point angle-addition sums
//! ([`GridMethod::Direct`]), together with `V'`. Pairs of zeros inside one grid
//! cell are recovered from cells where `|V|` dips toward zero.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trig::CosinePolynomial;

/// Points at which the per-cell Hermite interpolant is inspected.
const HERMITE_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMethod {
    Fft,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Grid points per shortest period `2 pi / n`.
    pub samples_per_period: usize,
    pub refine_tol: f64,
    pub max_bisections: u32,
    pub method: GridMethod,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { samples_per_period: 16, refine_tol: 1e-12, max_bisections: 80, method: GridMethod::Fft }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_period < 4 {
            return Err(Error::InvalidParameter("samples_per_period must be >= 4".into()));
        }
        if self.refine_tol.is_nan() || self.refine_tol <= 0.0 {
            return Err(Error::InvalidParameter("refine_tol must be positive".into()));
        }
        Ok(())
    }

    pub fn with_samples_per_period(mut self, s: usize) -> Self {
        self.samples_per_period = s;
        self
    }

    pub fn with_method(mut self, method: GridMethod) -> Self {
        self.method = method;
        self
    }
}

fn check_interval(interval: (f64, f64)) -> Result<()> {
    let (a, b) = interval;
    if !(a >= 0.0 && a < b && b <= 2.0 * PI + 1e-12) {
        return Err(Error::InvalidParameter(format!("interval ({a}, {b}) must satisfy 0 <= a < b <= 2pi")));
    }
    Ok(())
}

/// Grid evaluator for a fixed degree; reuse it across many polynomials.
pub struct ZeroCounter {
    degree: usize,
    size: usize,
    cfg: GridConfig,
    fft: Option<Arc<dyn Fft<f64>>>,
    shift: Vec<Complex64>,
}

impl std::fmt::Debug for ZeroCounter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ZeroCounter")
            .field("degree", &self.degree)
            .field("size", &self.size)
            .field("cfg", &self.cfg)
            .finish()
    }
}

impl ZeroCounter {
    pub fn new(degree: usize, cfg: GridConfig) -> Result<Self> {
        cfg.validate()?;
        let size = cfg.samples_per_period * degree.max(1);
        let (fft, shift) = match cfg.method {
            GridMethod::Fft => {
                let fft = FftPlanner::new().plan_fft_inverse(size);
                let shift = (0..=degree).map(|j| Complex64::from_polar(1.0, PI * j as f64 / size as f64)).collect();
                (Some(fft), shift)
            }
            GridMethod::Direct => (None, Vec::new()),
        };
        Ok(Self { degree, size, cfg, fft, shift })
    }

    pub fn config(&self) -> &GridConfig {
        &self.cfg
    }

    /// Grid spacing `2 pi / M`.
    pub fn step(&self) -> f64 {
        2.0 * PI / self.size as f64
    }

    fn grid_point(&self, k: usize) -> f64 {
        2.0 * PI * (k as f64 + 0.5) / self.size as f64
    }

    /// `(V, V')` on grid points `range`.
    fn grid_values(&self, poly: &CosinePolynomial, range: std::ops::Range<usize>) -> (Vec<f64>, Vec<f64>) {
        match &self.fft {
            Some(fft) => {
                let zero = Complex64::new(0.0, 0.0);
                let mut val = vec![zero; self.size];
                let mut der = vec![zero; self.size];
                for (j, (&a, &w)) in poly.coefficients().iter().zip(&self.shift).enumerate() {
                    val[j] = w * a;
                    der[j] = w * (j as f64 * a);
                }
                fft.process(&mut val);
                fft.process(&mut der);
                (val[range.clone()].iter().map(|c| c.re).collect(), der[range].iter().map(|c| -c.im).collect())
            }
            None => range.map(|k| poly.evaluate_with_derivative(self.grid_point(k))).unzip(),
        }
    }

    /// Sign-resolved scan of `(a, b)`: points with `V` and `V'`, no zero values.
    fn scan(&self, poly: &CosinePolynomial, interval: (f64, f64)) -> Result<Scan> {
        if poly.degree() != self.degree {
            return Err(Error::InvalidParameter(format!(
                "counter built for degree {}, got {}",
                self.degree,
                poly.degree()
            )));
        }
        check_interval(interval)?;
        if poly.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let (a, b) = interval;
        let h = self.step();
        let first = ((a / h - 0.5).floor().max(-1.0) + 1.0) as usize;
        let mut k_lo = first;
        while k_lo < self.size && self.grid_point(k_lo) <= a {
            k_lo += 1;
        }
        let mut k_hi = k_lo;
        while k_hi < self.size && self.grid_point(k_hi) < b {
            k_hi += 1;
        }
        let (grid_v, grid_d) = self.grid_values(poly, k_lo..k_hi);
        let (va, da) = poly.evaluate_with_derivative(a);
        let (vb, db) = poly.evaluate_with_derivative(b);
        let mut xs = Vec::with_capacity(k_hi - k_lo + 2);
        xs.push(a);
        xs.extend((k_lo..k_hi).map(|k| self.grid_point(k)));
        xs.push(b);
        let mut vs = Vec::with_capacity(xs.len());
        vs.push(va);
        vs.extend(grid_v);
        vs.push(vb);
        let mut ds = Vec::with_capacity(xs.len());
        ds.push(da);
        ds.extend(grid_d);
        ds.push(db);

        let last = xs.len() - 1;
        for i in 0..=last {
            if vs[i] == 0.0 {
                // Step half a grid cell inward; endpoints move into the interval.
                let x = if i == last { xs[i] - 0.5 * h } else { xs[i] + 0.5 * h };
                let x = x.clamp(a, b);
                (vs[i], ds[i]) = poly.evaluate_with_derivative(x);
                xs[i] = x;
            }
        }
        Ok(Scan { xs, vs, ds })
    }

    pub fn count(&self, poly: &CosinePolynomial, interval: (f64, f64)) -> Result<usize> {
        let scan = self.scan(poly, interval)?;
        let crossings = scan.vs.windows(2).filter(|w| (w[0] < 0.0) != (w[1] < 0.0)).count();
        Ok(crossings + 2 * hidden_pairs(poly, &scan, self.cfg.max_bisections).len())
    }

    /// Zero locations, each refined by bisection to `refine_tol`.
    pub fn locate(&self, poly: &CosinePolynomial, interval: (f64, f64)) -> Result<Vec<f64>> {
        let scan = self.scan(poly, interval)?;
        let (xs, vs) = (&scan.xs, &scan.vs);
        let mut out = Vec::new();
        for i in 0..xs.len() - 1 {
            if (vs[i] < 0.0) == (vs[i + 1] < 0.0) {
                continue;
            }
            let (lo, hi) = (xs[i], xs[i + 1]);
            let z = match refine_with_limit(poly, (lo, hi), self.cfg.refine_tol, self.cfg.max_bisections) {
                Ok(z) => z,
                // Grid values this small disagree in sign with direct evaluation.
                Err(_) => 0.5 * (lo + hi),
            };
            out.push(z);
        }
        let tol = self.cfg.refine_tol;
        let iters = self.cfg.max_bisections;
        for (lo, c, hi) in hidden_pairs(poly, &scan, iters) {
            out.push(refine_with_limit(poly, (lo, c), tol, iters).unwrap_or(0.5 * (lo + c)));
            out.push(refine_with_limit(poly, (c, hi), tol, iters).unwrap_or(0.5 * (c + hi)));
        }
        out.sort_by(f64::total_cmp);
        Ok(out)
    }
}

struct Scan {
    xs: Vec<f64>,
    vs: Vec<f64>,
    ds: Vec<f64>,
}

/// Pairs of zeros inside one grid cell, which leave no sign change on the grid.
/// A cell where `|V|` falls then rises and whose cubic Hermite interpolant dips
/// close to zero is searched for the extremum `c` of `V`; if `V(c)` has the
/// opposite sign, `(x_i, c, x_{i+1})` brackets two zeros.
fn hidden_pairs(poly: &CosinePolynomial, scan: &Scan, max_iter: u32) -> Vec<(f64, f64, f64)> {
    let Scan { xs, vs, ds } = scan;
    let mut out = Vec::new();
    for i in 0..vs.len() - 1 {
        let (v0, v1) = (vs[i], vs[i + 1]);
        let sign = v0.signum();
        if v1.signum() != sign || sign * ds[i] >= 0.0 || sign * ds[i + 1] <= 0.0 {
            continue;
        }
        let h = xs[i + 1] - xs[i];
        let (p0, p1) = (sign * v0, sign * v1);
        let (m0, m1) = (sign * ds[i] * h, sign * ds[i + 1] * h);
        let dip = (1..HERMITE_SAMPLES)
            .map(|k| {
                let t = k as f64 / HERMITE_SAMPLES as f64;
                let (t2, t3) = (t * t, t * t * t);
                (2.0 * t3 - 3.0 * t2 + 1.0) * p0
                    + (t3 - 2.0 * t2 + t) * m0
                    + (-2.0 * t3 + 3.0 * t2) * p1
                    + (t3 - t2) * m1
            })
            .fold(f64::INFINITY, f64::min);
        if dip > 0.25 * p0.min(p1) {
            continue;
        }
        let Some(c) = extremum(poly, sign, xs[i], xs[i + 1], max_iter) else {
            continue;
        };
        if poly.evaluate(c) * sign < 0.0 {
            out.push((xs[i], c, xs[i + 1]));
        }
    }
    out
}

/// Minimiser of `sign * V` on `(lo, hi)` by bisection on the derivative.
fn extremum(poly: &CosinePolynomial, sign: f64, mut lo: f64, mut hi: f64, max_iter: u32) -> Option<f64> {
    if sign * poly.evaluate_derivative(lo) >= 0.0 || sign * poly.evaluate_derivative(hi) <= 0.0 {
        return None;
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sign * poly.evaluate_derivative(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Number of sign changes of `poly` on `(a, b)`.
pub fn count_zeros(poly: &CosinePolynomial, interval: (f64, f64), cfg: &GridConfig) -> Result<usize> {
    ZeroCounter::new(poly.degree(), *cfg)?.count(poly, interval)
}

pub fn locate_zeros(poly: &CosinePolynomial, interval: (f64, f64), cfg: &GridConfig) -> Result<Vec<f64>> {
    ZeroCounter::new(poly.degree(), *cfg)?.locate(poly, interval)
}

/// Bisection on a sign-change bracket until its width is at most `tol`.
pub fn refine_zero(poly: &CosinePolynomial, bracket: (f64, f64), tol: f64) -> Result<f64> {
    refine_with_limit(poly, bracket, tol, 200)
}

fn refine_with_limit(poly: &CosinePolynomial, bracket: (f64, f64), tol: f64, max_iter: u32) -> Result<f64> {
    let (mut lo, mut hi) = if bracket.0 <= bracket.1 { bracket } else { (bracket.1, bracket.0) };
    let mut f_lo = poly.evaluate(lo);
    let f_hi = poly.evaluate(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if (f_lo < 0.0) == (f_hi < 0.0) {
        return Err(Error::InvalidBracket { lo, hi });
    }
    for _ in 0..max_iter {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = poly.evaluate(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{sample_coefficients, CoefficientScheme};

    const FULL: (f64, f64) = (0.0, 2.0 * PI);

    #[test]
    fn cosine_monomials() {
        for method in [GridMethod::Fft, GridMethod::Direct] {
            let cfg = GridConfig::default().with_method(method);
            assert_eq!(count_zeros(&CosinePolynomial::monomial(5), FULL, &cfg).unwrap(), 10);
            assert_eq!(count_zeros(&CosinePolynomial::monomial(1), FULL, &cfg).unwrap(), 2);
            assert_eq!(count_zeros(&CosinePolynomial::monomial(50), FULL, &cfg).unwrap(), 100);
        }
    }

    #[test]
    fn constant_polynomials() {
        let c = CosinePolynomial::new(vec![2.0]).unwrap();
        assert_eq!(count_zeros(&c, FULL, &GridConfig::default()).unwrap(), 0);
        let z = CosinePolynomial::new(vec![0.0, 0.0]).unwrap();
        assert!(matches!(count_zeros(&z, FULL, &GridConfig::default()), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn locate_monomial_zeros() {
        let z = locate_zeros(&CosinePolynomial::monomial(3), FULL, &GridConfig::default()).unwrap();
        assert_eq!(z.len(), 6);
        for (k, x) in z.iter().enumerate() {
            assert!((x - (2 * k + 1) as f64 * PI / 6.0).abs() < 1e-11);
        }
    }

    #[test]
    fn refine_examples() {
        let c1 = CosinePolynomial::monomial(1);
        assert!((refine_zero(&c1, (1.0, 2.0), 1e-12).unwrap() - PI / 2.0).abs() < 1e-12);
        let c3 = CosinePolynomial::monomial(3);
        assert!((refine_zero(&c3, (0.4, 0.6), 1e-10).unwrap() - PI / 6.0).abs() < 1e-10);
        assert!(matches!(refine_zero(&c1, (0.1, 0.2), 1e-12), Err(Error::InvalidBracket { .. })));
    }

    #[test]
    fn refined_points_improve_on_bracket() {
        let coeffs = sample_coefficients(&CoefficientScheme::iid(), 60, 17, 0).unwrap();
        let p = CosinePolynomial::new(coeffs).unwrap();
        let counter = ZeroCounter::new(60, GridConfig::default()).unwrap();
        let h = counter.step();
        let zs = counter.locate(&p, FULL).unwrap();
        assert_eq!(zs.len(), counter.count(&p, FULL).unwrap());
        for z in zs {
            let (lo, hi) = (z - h, z + h);
            let v = p.evaluate(z).abs();
            assert!(v < p.evaluate(lo).abs() && v < p.evaluate(hi).abs());
        }
    }

    #[test]
    fn fft_and_direct_grids_agree() {
        for trial in 0..20 {
            let coeffs = sample_coefficients(&CoefficientScheme::palindromic(2), 97, 5, trial).unwrap();
            let p = CosinePolynomial::new(coeffs).unwrap();
            let fft = count_zeros(&p, FULL, &GridConfig::default()).unwrap();
            let direct = count_zeros(&p, FULL, &GridConfig::default().with_method(GridMethod::Direct)).unwrap();
            assert_eq!(fft, direct);
        }
    }

    #[test]
    fn palindromic_unit_blocks_have_deterministic_zeros() {
        let n = 20;
        for trial in 0..100 {
            let coeffs = sample_coefficients(&CoefficientScheme::palindromic(1), n, 99, trial).unwrap();
            let p = CosinePolynomial::new(coeffs).unwrap();
            // a_j (cos jx + cos (n-j)x) = 2 a_j cos(nx/2) cos((n-2j)x/2)
            for k in 0..n {
                let x = (2 * k + 1) as f64 * PI / n as f64;
                assert!(p.evaluate(x).abs() < 1e-12);
            }
            assert!(count_zeros(&p, FULL, &GridConfig::default()).unwrap() >= n);
        }
    }

    #[test]
    fn close_pairs_inside_one_cell() {
        // -cos x - cos d vanishes at pi -+ d, both between the grid points nearest pi.
        for method in [GridMethod::Fft, GridMethod::Direct] {
            let cfg = GridConfig::default().with_method(method);
            for d in [0.05f64, 1e-3, 1e-6] {
                let p = CosinePolynomial::new(vec![-d.cos(), -1.0]).unwrap();
                assert_eq!(count_zeros(&p, FULL, &cfg).unwrap(), 2, "d={d}");
                let z = locate_zeros(&p, FULL, &cfg).unwrap();
                assert_eq!(z.len(), 2);
                assert!((z[0] - (PI - d)).abs() < 1e-9 && (z[1] - (PI + d)).abs() < 1e-9, "{z:?}");
            }
            // A dip that stays positive is not a pair.
            let p = CosinePolynomial::new(vec![1.001, 1.0]).unwrap();
            assert_eq!(count_zeros(&p, FULL, &cfg).unwrap(), 0);
        }
    }

    #[test]
    fn invalid_inputs() {
        let p = CosinePolynomial::monomial(2);
        assert!(count_zeros(&p, (1.0, 0.5), &GridConfig::default()).is_err());
        assert!(count_zeros(&p, (0.0, 7.0), &GridConfig::default()).is_err());
        assert!(count_zeros(&p, FULL, &GridConfig::default().with_samples_per_period(3)).is_err());
        let counter = ZeroCounter::new(3, GridConfig::default()).unwrap();
        assert!(counter.count(&p, FULL).is_err());
    }
}
