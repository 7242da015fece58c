//! The limiting constant
//!
//! `K_ell = (1/pi^2) int_0^pi int_0^{pi/2} sqrt(1 + 3 (1 - u_ell(s)^2) / (1 + u_ell(s) cos t)^2) ds dt`.
//!
//! The integrand blows up like `1/s` near the corner `(s, t) = (0, pi)`. For a
//! fixed `s > 0` the `t`-integral is bounded by `pi (1 + sqrt 3)`, so the
//! integration runs over `t` on the inside, with `t`-panels graded toward the
//! peak of `1 / (1 + u cos t)`, and over `s` on the outside, graded toward 0.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::quadrature::{integrate_panels_with_rule, uniform_breakpoints, GaussLegendre, QuadResult, QuadratureConfig};
use crate::trig::{one_minus_u, u_kernel_unchecked};

/// Printed values of `K_ell`, used only as references in comparisons.
pub const TABLE1: [(usize, f64); 9] = [
    (2, 1.0642),
    (3, 1.0408),
    (5, 1.0239),
    (7, 1.0170),
    (8, 1.0148),
    (15, 1.0079),
    (30, 1.0039),
    (100, 1.0011),
    (2019, 1.000046),
];

/// `(1 + sqrt 3) / 2`, the upper bound on `K_ell`.
pub const K_UPPER_BOUND: f64 = 1.366_025_403_784_438_6;

/// Smallest outer panel width near `s = 0`.
const MIN_GRADED_WIDTH: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KEllResult {
    pub ell: usize,
    pub value: f64,
    pub error_estimate: f64,
    pub panels_used: usize,
    pub converged: bool,
}

/// Breakpoints on `[0, pi]` graded geometrically toward the minimum of
/// `1 + u cos t`, which sits at `t = pi` for `u > 0` and `t = 0` for `u < 0`.
fn peak_breakpoints(u: f64, one_minus_abs_u: f64) -> Vec<f64> {
    let mut pts = uniform_breakpoints(0.0, PI, PI / 8.0);
    let width = (2.0 * one_minus_abs_u).sqrt();
    let mut d = 0.125 * width;
    while d < PI / 8.0 {
        pts.push(if u > 0.0 { PI - d } else { d });
        d *= 2.0;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Inner integrand for fixed `u = u_ell(s)` with `om = 1 - u` known accurately.
fn inner_integrand(u: f64, om: f64, t: f64) -> f64 {
    let denom = if u > 0.0 { om + 2.0 * u * (0.5 * t).cos().powi(2) } else { 1.0 + u * t.cos() };
    (1.0 + 3.0 * om * (1.0 + u) / (denom * denom)).sqrt()
}

struct InnerSolver {
    rule: GaussLegendre,
    cfg: QuadratureConfig,
}

impl InnerSolver {
    fn new(outer: &QuadratureConfig) -> Self {
        let cfg = QuadratureConfig {
            rel_tol: 0.1 * outer.rel_tol,
            abs_tol: outer.abs_tol,
            max_depth: outer.max_depth,
            panel_order: outer.panel_order,
            execution: Execution::Sequential,
        };
        Self { rule: GaussLegendre::new(cfg.panel_order), cfg }
    }

    /// `int_0^pi sqrt(1 + 3 (1 - u^2)/(1 + u cos t)^2) dt` at `u = u_ell(s)`.
    fn solve(&self, ell: usize, s: f64) -> f64 {
        let u = u_kernel_unchecked(ell, s);
        let om = one_minus_u(ell, s);
        let one_minus_abs = if u > 0.0 { om } else { 1.0 + u };
        let bp = peak_breakpoints(u, one_minus_abs);
        integrate_panels_with_rule(&|t| inner_integrand(u, om, t), &bp, &self.cfg, &self.rule).value
    }
}

/// Outer `s`-breakpoints: width capped at `pi/(8 ell)` and graded toward 0.
fn outer_breakpoints(ell: usize) -> Vec<f64> {
    let cap = (PI / (8.0 * ell as f64)).min(PI / 16.0);
    let mut pts = uniform_breakpoints(0.0, PI / 2.0, cap);
    let mut d = pts[1];
    while d > MIN_GRADED_WIDTH {
        d *= 0.5;
        pts.push(d);
    }
    pts.sort_by(f64::total_cmp);
    pts
}

pub fn k_ell(ell: usize, cfg: &QuadratureConfig) -> Result<KEllResult> {
    cfg.validate()?;
    if ell == 0 {
        return Err(Error::InvalidParameter("block length must be >= 1".into()));
    }
    if ell == 1 {
        return Ok(KEllResult { ell, value: 0.5, error_estimate: 0.0, panels_used: 0, converged: true });
    }
    let inner = InnerSolver::new(cfg);
    let rule = GaussLegendre::new(cfg.panel_order);
    let bp = outer_breakpoints(ell);
    let outer = integrate_panels_with_rule(&|s| inner.solve(ell, s), &bp, cfg, &rule);
    let scale = 1.0 / (PI * PI);
    // Inner errors accumulate over an s-range of length pi/2.
    let inner_bound = inner.cfg.rel_tol * PI * (1.0 + 3f64.sqrt()) * (PI / 2.0);
    Ok(KEllResult {
        ell,
        value: outer.value * scale,
        error_estimate: (outer.error + inner_bound) * scale,
        panels_used: outer.panels,
        converged: outer.converged,
    })
}

/// `(1/pi) int_0^pi sqrt(1 - u^2) / (1 + u cos t) dt`, which equals 1 for `|u| < 1`.
pub fn inner_identity(u: f64) -> Result<f64> {
    if u.is_nan() || u.abs() >= 1.0 {
        return Err(Error::Domain { value: u, domain: "(-1, 1)" });
    }
    let cfg = QuadratureConfig {
        rel_tol: 1e-13,
        abs_tol: 1e-15,
        max_depth: 40,
        panel_order: 15,
        execution: Execution::Sequential,
    };
    let one_minus_abs = 1.0 - u.abs();
    let root = ((1.0 - u) * (1.0 + u)).sqrt();
    let f = |t: f64| {
        let denom = if u > 0.0 {
            (1.0 - u) + 2.0 * u * (0.5 * t).cos().powi(2)
        } else {
            (1.0 + u) + 2.0 * (-u) * (0.5 * t).sin().powi(2)
        };
        root / denom
    };
    let bp = peak_breakpoints(u, one_minus_abs);
    let r: QuadResult = integrate_panels_with_rule(&f, &bp, &cfg, &GaussLegendre::new(cfg.panel_order));
    Ok(r.value / PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Row {
    pub ell: usize,
    pub computed: f64,
    pub reference: f64,
    pub abs_diff: f64,
    pub error_estimate: f64,
}

/// Recomputes every reference `K_ell` (2019 only when asked).
pub fn table1(rel_tol: f64, include_2019: bool) -> Result<Vec<Table1Row>> {
    let cfg = QuadratureConfig::default().with_rel_tol(rel_tol);
    TABLE1
        .iter()
        .filter(|(ell, _)| include_2019 || *ell != 2019)
        .map(|&(ell, reference)| {
            let r = k_ell(ell, &cfg)?;
            Ok(Table1Row {
                ell,
                computed: r.value,
                reference,
                abs_diff: (r.value - reference).abs(),
                error_estimate: r.error_estimate,
            })
        })
        .collect()
}
