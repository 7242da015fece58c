//! Composite adaptive Gauss-Legendre quadrature on caller-supplied panels.
//!
//! Each base panel is bisected, worst segment first, until the two-half
//! estimates agree with their parents within the panel's share of the global
//! tolerance. Rules are
//! open, so integrable endpoint singularities are never evaluated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    /// Gauss-Legendre nodes per panel.
    pub panel_order: usize,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-6, abs_tol: 1e-10, max_depth: 30, panel_order: 10, execution: Execution::default() }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter("quadrature tolerances must be positive".into()));
        }
        if self.panel_order < 5 {
            return Err(Error::InvalidParameter("panel_order must be >= 5".into()));
        }
        if self.max_depth < 10 {
            return Err(Error::InvalidParameter("max_depth must be >= 10".into()));
        }
        Ok(())
    }
}

/// Outcome of a quadrature; `converged` is false when some panel hit `max_depth`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
    pub converged: bool,
}

impl QuadResult {
    pub fn scaled(self, factor: f64) -> Self {
        Self { value: self.value * factor, error: self.error * factor.abs(), ..self }
    }
}

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let sum: f64 = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(mid + half * x)).sum();
        sum * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Breakpoints of equal panels no wider than `max_width` covering `[a, b]`.
pub fn uniform_breakpoints(a: f64, b: f64, max_width: f64) -> Vec<f64> {
    let count = (((b - a) / max_width).ceil() as usize).max(1);
    let mut pts: Vec<f64> = (0..count).map(|i| a + (b - a) * i as f64 / count as f64).collect();
    pts.push(b);
    pts
}

/// Integrates `f` over the union of panels `[bp[i], bp[i+1]]`.
pub fn integrate_panels<F>(f: &F, breakpoints: &[f64], cfg: &QuadratureConfig) -> QuadResult
where
    F: Fn(f64) -> f64 + Sync,
{
    let rule = GaussLegendre::new(cfg.panel_order);
    integrate_panels_with_rule(f, breakpoints, cfg, &rule)
}

pub fn integrate_panels_with_rule<F>(
    f: &F,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
    rule: &GaussLegendre,
) -> QuadResult
where
    F: Fn(f64) -> f64 + Sync,
{
    let panels: Vec<(f64, f64)> = breakpoints.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])).collect();
    if panels.is_empty() {
        return QuadResult { value: 0.0, error: 0.0, panels: 0, converged: true };
    }
    let total_width = panels.last().unwrap().1 - panels[0].0;

    let rough: Vec<f64> = par::map_slice(cfg.execution, &panels, |&(a, b)| rule.integrate(f, a, b));
    let rough_total: f64 = rough.iter().sum();
    let tol = cfg.abs_tol.max(cfg.rel_tol * rough_total.abs());
    let rough_mass: f64 = rough.iter().map(|w| w.abs()).sum();

    let items: Vec<(f64, f64, f64)> = panels.iter().zip(&rough).map(|(&(a, b), &w)| (a, b, w)).collect();
    let parts = par::map_slice(cfg.execution, &items, |&(a, b, whole)| {
        // Half the tolerance is shared by width, half by rough magnitude.
        let by_mass = if rough_mass > 0.0 { whole.abs() / rough_mass } else { 0.0 };
        let share = 0.5 * tol * ((b - a) / total_width + by_mass);
        adapt(f, rule, a, b, whole, share, cfg.max_depth)
    });

    let mut out = QuadResult { value: 0.0, error: 0.0, panels: 0, converged: true };
    for p in parts {
        out.value += p.value;
        out.error += p.error;
        out.panels += p.panels;
        out.converged &= p.converged;
    }
    out
}

/// Bisections allowed per base panel.
const MAX_SUBDIVISIONS: usize = 2000;
/// Relative size of rounding noise in a panel sum.
const ROUNDING_FLOOR: f64 = 64.0 * f64::EPSILON;

struct Segment {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    error: f64,
    depth: u32,
}

impl Segment {
    fn new<F: Fn(f64) -> f64>(f: &F, rule: &GaussLegendre, a: f64, b: f64, whole: f64, depth: u32) -> Self {
        let m = 0.5 * (a + b);
        let left = rule.integrate(f, a, m);
        let right = rule.integrate(f, m, b);
        let error = (left + right - whole).abs();
        Self { a, b, left, right, error, depth }
    }

    fn splittable(&self, max_depth: u32) -> bool {
        let m = 0.5 * (self.a + self.b);
        self.depth < max_depth && m > self.a && m < self.b && self.error.is_finite()
    }
}

/// Globally adaptive bisection of one base panel: always splits the segment
/// with the largest error until the total meets `tol`.
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    max_depth: u32,
) -> QuadResult {
    let mut segs = vec![Segment::new(f, rule, a, b, whole, 0)];
    let mut splits = 0;
    loop {
        let value: f64 = segs.iter().map(|s| s.left + s.right).sum();
        let error: f64 = segs.iter().map(|s| s.error).sum();
        let magnitude: f64 = segs.iter().map(|s| s.left.abs() + s.right.abs()).sum();
        let target = tol.max(ROUNDING_FLOOR * magnitude);
        if !error.is_finite() {
            return QuadResult { value, error, panels: segs.len(), converged: false };
        }
        if error <= target {
            return QuadResult { value, error, panels: segs.len(), converged: true };
        }
        let worst = segs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.splittable(max_depth))
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let Some(i) = worst.filter(|_| splits < MAX_SUBDIVISIONS) else {
            return QuadResult { value, error, panels: segs.len(), converged: false };
        };
        let s = segs.swap_remove(i);
        let m = 0.5 * (s.a + s.b);
        segs.push(Segment::new(f, rule, s.a, m, s.left, s.depth + 1));
        segs.push(Segment::new(f, rule, m, s.b, s.right, s.depth + 1));
        splits += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rule_is_exact_for_polynomials() {
        for order in [5, 10, 15, 20] {
            let rule = GaussLegendre::new(order);
            assert!((rule.weights().iter().sum::<f64>() - 2.0).abs() < 1e-14);
            for deg in 0..2 * order {
                let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
                let got = rule.integrate(&|x: f64| x.powi(deg as i32), -1.0, 1.0);
                assert!((got - exact).abs() < 1e-13, "order={order} deg={deg}");
            }
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let cfg = QuadratureConfig { rel_tol: 1e-10, ..Default::default() };
        // int_0^1 x^{-1/2} dx = 2; bisection alone gains only sqrt(2) per level here.
        let bp = [0.0, 1.0];
        let r = integrate_panels(&|x: f64| 1.0 / x.sqrt(), &bp, &cfg);
        assert!((r.value - 2.0).abs() < 1e-5, "{r:?}");
        // int_0^1 ln x dx = -1
        let r = integrate_panels(&|x: f64| x.ln(), &bp, &cfg);
        assert!((r.value + 1.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn oscillatory_panels() {
        let cfg = QuadratureConfig { rel_tol: 1e-12, abs_tol: 1e-14, ..Default::default() };
        let bp = uniform_breakpoints(0.0, PI / 2.0, PI / 800.0);
        let r = integrate_panels(&|x: f64| (100.0 * x).cos().powi(2), &bp, &cfg);
        assert!((r.value - PI / 4.0).abs() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let bp = uniform_breakpoints(0.0, 3.0, 0.01);
        let f = |x: f64| (x * 7.0).sin().abs().sqrt();
        let s = integrate_panels(&f, &bp, &QuadratureConfig::default().with_execution(Execution::Sequential));
        let p = integrate_panels(&f, &bp, &QuadratureConfig::default().with_execution(Execution::Parallel));
        assert_eq!(s.value.to_bits(), p.value.to_bits());
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        assert!(QuadratureConfig { panel_order: 4, ..Default::default() }.validate().is_err());
        assert!(QuadratureConfig { rel_tol: 0.0, ..Default::default() }.validate().is_err());
        assert!(QuadratureConfig { max_depth: 5, ..Default::default() }.validate().is_err());
    }
}
