//! Kac-Rice zero density for Gaussian cosine sums.
//!
//! For `V(x) = sum_i xi_i phi_i(x)` with i.i.d. `N(0, sigma^2)` weights `xi_i`,
//! the expected number of zeros on `(a, b)` where `A > 0` is
//! `(1/pi) int sqrt(AC - B^2) / A dx`, with `A = sigma^2 sum phi_i^2`,
//! `B = sigma^2 sum phi_i phi_i'` and `C = sigma^2 sum phi_i'^2`.
//!
//! Points where every `phi_i` vanishes are zeros of every realisation. The
//! density stays bounded there and does not see them, so [`expected_zeros`]
//! locates them separately and adds them to the integral.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_panels, uniform_breakpoints, QuadResult, QuadratureConfig};
use crate::schemes::{BlockDecomposition, EffectiveBasis};
use crate::trig::{cos_sin_table, one_minus_u, one_plus_kernel_cos, u_kernel};

/// `A` below `DEGENERATE_REL * (number of cosines) * sigma^2` counts as vanishing.
pub const DEGENERATE_REL: f64 = 1e-12;
/// Relative size of `A` at a local minimum that marks a common zero of the basis.
const COMMON_ZERO_REL: f64 = 1e-9;
const CLOSED_FORM_SINGULAR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KacRiceTriple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl KacRiceTriple {
    pub fn discriminant(&self) -> f64 {
        self.a * self.c - self.b * self.b
    }

    /// `(1/pi) sqrt(max(AC - B^2, 0)) / A`, without a degeneracy check.
    pub fn density(&self) -> f64 {
        self.discriminant().max(0.0).sqrt() / (PI * self.a)
    }
}

/// Values and derivatives of every basis function at `x`.
pub fn basis_values(basis: &EffectiveBasis, x: f64) -> (Vec<f64>, Vec<f64>) {
    let len = basis.max_frequency() + 1;
    let mut cos = vec![0.0; len];
    let mut sin = vec![0.0; len];
    cos_sin_table(x, &mut cos, &mut sin);
    basis
        .functions
        .iter()
        .map(|freqs| freqs.iter().fold((0.0, 0.0), |(v, d), &j| (v + cos[j], d - j as f64 * sin[j])))
        .unzip()
}

pub fn abc_direct(basis: &EffectiveBasis, x: f64) -> KacRiceTriple {
    let len = basis.max_frequency() + 1;
    let mut cos = vec![0.0; len];
    let mut sin = vec![0.0; len];
    cos_sin_table(x, &mut cos, &mut sin);
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for freqs in &basis.functions {
        let mut v = 0.0;
        let mut d = 0.0;
        for &j in freqs {
            v += cos[j];
            d -= j as f64 * sin[j];
        }
        a += v * v;
        b += v * d;
        c += d * d;
    }
    let s2 = basis.sigma * basis.sigma;
    KacRiceTriple { a: s2 * a, b: s2 * b, c: s2 * c }
}

fn cosine_count(basis: &EffectiveBasis) -> usize {
    basis.functions.iter().map(Vec::len).sum()
}

/// Threshold below which `A(x)` is treated as zero.
pub fn degenerate_threshold(basis: &EffectiveBasis) -> f64 {
    DEGENERATE_REL * cosine_count(basis).max(1) as f64 * basis.sigma * basis.sigma
}

pub fn density(basis: &EffectiveBasis, x: f64) -> Result<f64> {
    let t = abc_direct(basis, x);
    if t.a.is_nan() || t.a <= degenerate_threshold(basis) {
        return Err(Error::Degenerate { x, a: t.a });
    }
    Ok(t.density())
}

/// Unit-variance `A(x)` of the palindromic-block scheme in closed form,
/// `m ell (1 + u_m(ell x) cos((m ell + r + 1) x)) (1 + u_ell(x) cos(nx)) + sum_tilde cos^2(jx)`.
pub fn a_closed_form(decomp: &BlockDecomposition, x: f64) -> Result<f64> {
    let ell = decomp.ell as f64;
    let (sin_x, sin_lx) = (x.sin(), (ell * x).sin());
    if !(x > 0.0 && x < PI) {
        return Err(Error::Domain { value: x, domain: "(0, pi)" });
    }
    if sin_x.abs() <= CLOSED_FORM_SINGULAR || sin_lx.abs() <= CLOSED_FORM_SINGULAR {
        return Err(Error::Domain { value: x, domain: "|sin(x)|, |sin(ell x)| > 1e-6" });
    }
    let outer_freq = (decomp.m * decomp.ell) as f64 + decomp.r as f64 + 1.0;
    let pair_factor = one_plus_kernel_cos(decomp.m, ell * x, outer_freq, x);
    let offset_factor = one_plus_kernel_cos(decomp.ell, x, decomp.n as f64, x);
    let tilde: f64 = decomp.tilde_indices.iter().map(|&j| (j as f64 * x).cos().powi(2)).sum();
    Ok((decomp.m * decomp.ell) as f64 * pair_factor * offset_factor + tilde)
}

/// Expected zero count on an interval, split into its two sources.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectedZeros {
    /// Deterministic zeros plus the Kac-Rice integral.
    pub value: f64,
    /// Sign-changing common zeros of all basis functions.
    pub deterministic: usize,
    pub integral: QuadResult,
}

/// `E[N(a, b)]` for the Gaussian sum described by `basis`.
pub fn expected_zeros(basis: &EffectiveBasis, interval: (f64, f64), cfg: &QuadratureConfig) -> Result<ExpectedZeros> {
    cfg.validate()?;
    let (a, b) = interval;
    if !(a >= 0.0 && b <= 2.0 * PI + 1e-12 && a < b) {
        return Err(Error::InvalidParameter(format!("interval ({a}, {b}) not inside (0, 2pi)")));
    }
    if basis.is_empty() {
        return Err(Error::InvalidParameter("empty basis".into()));
    }
    let nmax = basis.max_frequency().max(1) as f64;
    let threshold = degenerate_threshold(basis);
    let integrand = |x: f64| {
        let t = abc_direct(basis, x);
        if t.a > threshold {
            t.density()
        } else {
            0.0
        }
    };
    let bp = uniform_breakpoints(a, b, PI / (8.0 * nmax));
    let integral = integrate_panels(&integrand, &bp, cfg);
    let deterministic = common_zeros(basis, interval).len();
    Ok(ExpectedZeros { value: deterministic as f64 + integral.value, deterministic, integral })
}

/// Sign-changing points of `(a, b)` where every basis function vanishes.
pub fn common_zeros(basis: &EffectiveBasis, interval: (f64, f64)) -> Vec<f64> {
    let (a, b) = interval;
    if basis.functions.iter().any(|f| f.as_slice() == [0]) {
        // A constant function never vanishes.
        return Vec::new();
    }
    let nmax = basis.max_frequency().max(1) as f64;
    let steps = ((b - a) / (PI / (16.0 * nmax))).ceil().max(4.0) as usize;
    let xs: Vec<f64> = (0..=steps).map(|i| a + (b - a) * i as f64 / steps as f64).collect();
    let bs: Vec<f64> = xs.iter().map(|&x| abc_direct(basis, x).b).collect();
    let s2 = basis.sigma * basis.sigma;
    let a_scale = COMMON_ZERO_REL * cosine_count(basis) as f64 * s2;
    let c_scale: f64 = 1e-6 * s2 * basis.functions.iter().flatten().map(|&j| (j * j) as f64).sum::<f64>();
    let edge = 1e-12 * (b - a);

    let mut found: Vec<f64> = Vec::new();
    for i in 0..steps {
        let (x0, x1) = (xs[i], xs[i + 1]);
        let (b0, b1) = (bs[i], bs[i + 1]);
        // A = sum phi^2 has a local minimum where B = A'/2 goes from - to +.
        let candidate = if b0 == 0.0 {
            Some(x0)
        } else if b0 < 0.0 && b1 > 0.0 {
            Some(bisect_b(basis, x0, x1))
        } else {
            None
        };
        let Some(x) = candidate else { continue };
        if x <= a + edge || x >= b - edge {
            continue;
        }
        if found.last().is_some_and(|&p| (x - p).abs() < 1e-9) {
            continue;
        }
        let t = abc_direct(basis, x);
        if t.a > a_scale {
            continue;
        }
        let simple = t.c > c_scale;
        if simple || sign_changes_across(basis, x, (x1 - x0) * 1e-3) {
            found.push(x);
        }
    }
    found
}

fn bisect_b(basis: &EffectiveBasis, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if abc_direct(basis, mid).b < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Whether a fixed generic combination of the basis changes sign across `x`.
fn sign_changes_across(basis: &EffectiveBasis, x: f64, delta: f64) -> bool {
    let weight = |i: usize| 1.0 + (crate::schemes::splitmix64(i as u64) >> 11) as f64 / (1u64 << 53) as f64;
    let combo = |y: f64| {
        let (v, _) = basis_values(basis, y);
        v.iter().enumerate().map(|(i, &p)| weight(i) * p).sum::<f64>()
    };
    combo(x - delta) * combo(x + delta) < 0.0
}

/// `sqrt(1 + 3 (1 - u^2) / (1 + u cos(nx))^2)` with `u = u_ell(x)`.
pub fn asymptotic_integrand(ell: usize, n: usize, x: f64) -> Result<f64> {
    if !(0.0..=PI / 2.0).contains(&x) {
        return Err(Error::Domain { value: x, domain: "[0, pi/2]" });
    }
    if ell == 1 {
        return Ok(1.0);
    }
    let u = u_kernel(ell, x)?;
    let om = one_minus_u(ell, x);
    let half = 0.5 * n as f64 * x;
    // 1 + u cos(nx) = (1 - u) + 2u cos^2(nx/2), exact in exact arithmetic.
    let denom = if u > 0.0 { om + 2.0 * u * half.cos().powi(2) } else { 1.0 + u * (n as f64 * x).cos() };
    if denom <= 0.0 {
        return Err(Error::Singular(x));
    }
    let ratio = om * (1.0 + u) / (denom * denom);
    Ok((1.0 + 3.0 * ratio).sqrt())
}

/// `I_ell(n) = (1/pi) int_0^{pi/2} asymptotic_integrand dx`.
pub fn i_ell(ell: usize, n: usize, cfg: &QuadratureConfig) -> Result<QuadResult> {
    cfg.validate()?;
    if ell == 0 || n < 2 * ell {
        return Err(Error::InvalidParameter(format!("I_ell(n) needs ell >= 1 and n >= 2 ell (ell={ell}, n={n})")));
    }
    if ell == 1 {
        return Ok(QuadResult { value: 0.5, error: 0.0, panels: 0, converged: true });
    }
    let f = |x: f64| asymptotic_integrand(ell, n, x).unwrap_or(0.0);
    let bp = uniform_breakpoints(0.0, PI / 2.0, PI / (8.0 * n as f64));
    Ok(integrate_panels(&f, &bp, cfg).scaled(1.0 / PI))
}
