//! Feasibility region and tau-maximization over the cone parameters.
//!
//! A parameter pair `(R, d)` is usable when some annulus `[psi, pi - psi]`
//! makes every pair condition hold (`psi_required`), that annulus fits under
//! the illumination cap (`psi < pi/2 - alpha`), the aperture obeys
//! `alpha <= pi/6`, and the cone parameters themselves are valid. The figure
//! of merit is `tau = 1 / cos(alpha)`, the base of the exponential lower
//! bound. `tau` strictly decreases in `d` at fixed `R`, so maxima sit on the
//! feasibility boundary; the sweep locates them by a grid scan plus
//! golden-section refinement with a feasibility-boundary bisection in `d`.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{cosine_args, ConeParams};
use crate::illum::golden_max;

/// Margin tolerance at the feasibility boundary: the supremum is approached,
/// not attained, so boundary points with margin >= -1e-9 count as feasible.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Which constraint pins `psi_required` (or `domain` when `(R, d)` has no
/// valid cone at all).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    Cond1,
    Cond2,
    Cond3,
    Domain,
}

/// The three lower bounds on `psi` induced by the pair conditions over an
/// annulus `[psi, pi - psi]`; `None` marks a vacuous branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiBounds {
    /// `pi - 2 arcsin(d/2)` when `d < 2` (condition 1 at `theta = pi - psi`).
    pub cond1: Option<f64>,
    /// `2 beta` (condition 2 at `theta = psi`).
    pub cond2: f64,
    /// `pi - 2 arcsin(d/2R) + 2 beta` when `d < 2R` (condition 3 at
    /// `theta = pi - psi`).
    pub cond3: Option<f64>,
}

impl PsiBounds {
    /// The binding lower bound and its tag.
    pub fn required(&self) -> (f64, Binding) {
        let mut best = (self.cond2, Binding::Cond2);
        if let Some(b1) = self.cond1 {
            if b1 > best.0 {
                best = (b1, Binding::Cond1);
            }
        }
        if let Some(b3) = self.cond3 {
            if b3 > best.0 {
                best = (b3, Binding::Cond3);
            }
        }
        best
    }
}

fn psi_bounds_raw(r: f64, d: f64, beta: f64) -> PsiBounds {
    PsiBounds {
        cond1: (d < 2.0).then(|| PI - 2.0 * (d / 2.0).asin()),
        cond2: 2.0 * beta,
        cond3: (d < 2.0 * r).then(|| PI - 2.0 * (d / (2.0 * r)).asin() + 2.0 * beta),
    }
}

/// Per-condition annulus bounds for valid cone parameters.
pub fn psi_bounds(params: &ConeParams) -> PsiBounds {
    psi_bounds_raw(params.base_radius, params.apex_distance, params.beta)
}

/// Smallest annulus half-width making all pair conditions hold, with the
/// constraint achieving it.
pub fn psi_required(params: &ConeParams) -> (f64, Binding) {
    psi_bounds(params).required()
}

/// Feasibility and figure of merit for one `(R, d)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityRecord {
    #[serde(rename = "R")]
    pub r: f64,
    pub d: f64,
    pub alpha: f64,
    pub beta: f64,
    pub psi_required: f64,
    /// `pi/2 - alpha`, the illumination-cap radius.
    pub psi_cap: f64,
    /// `psi_cap - psi_required`; feasible needs `margin >= -1e-9`.
    pub margin: f64,
    /// `1 / cos(alpha)`, reported even when infeasible.
    pub tau: f64,
    pub feasible: bool,
    pub binding: Binding,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
}

/// Evaluates one `(R, d)`. Total: domain failures come back as infeasible
/// records with a caveat rather than errors, so sweeps can scan freely.
pub fn evaluate(r: f64, d: f64) -> FeasibilityRecord {
    let in_domain = r > 0.0 && d > (r - 1.0).abs() && d < r + 1.0;
    let (cos_alpha, cos_beta) = cosine_args(r, d);
    if !in_domain {
        let tau = if cos_alpha.abs() <= 1.0 {
            1.0 / cos_alpha
        } else {
            f64::NAN
        };
        return FeasibilityRecord {
            r,
            d,
            alpha: f64::NAN,
            beta: f64::NAN,
            psi_required: f64::NAN,
            psi_cap: f64::NAN,
            margin: f64::NAN,
            tau,
            feasible: false,
            binding: Binding::Domain,
            caveat: Some("degenerate or empty base circle".to_string()),
        };
    }
    let alpha = cos_alpha.clamp(-1.0, 1.0).acos();
    let beta = cos_beta.clamp(-1.0, 1.0).acos();
    let bounds = psi_bounds_raw(r, d, beta);
    let (psi_req, binding) = bounds.required();
    let psi_cap = FRAC_PI_2 - alpha;
    let margin = psi_cap - psi_req;
    let params_ok = ConeParams::derive(r, d).is_ok();
    let feasible = params_ok && alpha <= PI / 6.0 && margin >= -BOUNDARY_TOL;
    FeasibilityRecord {
        r,
        d,
        alpha,
        beta,
        psi_required: psi_req,
        psi_cap,
        margin,
        tau: 1.0 / cos_alpha,
        feasible,
        binding,
        caveat: (!params_ok).then(|| "cone parameter invariants fail".to_string()),
    }
}

/// Result of a sweep: the best feasible record (if any) and the full
/// row-major grid trace.
#[derive(Clone, Debug, Serialize)]
pub struct TauSweep {
    pub best: Option<FeasibilityRecord>,
    pub trace: Vec<FeasibilityRecord>,
}

fn axis(range: (f64, f64), grid: usize) -> Vec<f64> {
    let (lo, hi) = range;
    if lo == hi {
        return vec![lo];
    }
    assert!(lo < hi && grid >= 2);
    (0..grid)
        .map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64)
        .collect()
}

/// Smallest feasible `d` on a fixed-`R` line, by bisection.
///
/// All feasibility constraints are of the form `d >= threshold(R)` (margin
/// and validity improve as `d` grows toward `R + 1`), so the feasible set on
/// a line is an upper interval and `tau`, strictly decreasing in `d`, is
/// maximal at its lower endpoint.
fn line_best(r: f64, d_range: (f64, f64)) -> Option<FeasibilityRecord> {
    let d_lo = d_range.0.max((r - 1.0).abs() + 1e-12);
    let d_hi = d_range.1.min(r + 1.0 - 1e-12);
    if d_lo >= d_hi {
        return None;
    }
    if evaluate(r, d_lo).feasible {
        return Some(evaluate(r, d_lo));
    }
    if !evaluate(r, d_hi).feasible {
        return None;
    }
    let (mut lo, mut hi) = (d_lo, d_hi);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if evaluate(r, mid).feasible {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(evaluate(r, hi))
}

/// Grid scan of feasible `tau` over a rectangle followed by golden-section
/// refinement around the best cell (in `R`, with the boundary bisection of
/// [`line_best`] resolving `d`). The trace is emitted in row-major grid
/// order whatever the execution order was.
pub fn maximize_tau(
    r_range: (f64, f64),
    d_range: (f64, f64),
    grid: usize,
    refine_iters: usize,
) -> TauSweep {
    let rs = axis(r_range, grid);
    let ds = axis(d_range, grid);
    let trace: Vec<FeasibilityRecord> = (0..rs.len() * ds.len())
        .into_par_iter()
        .map(|k| evaluate(rs[k / ds.len()], ds[k % ds.len()]))
        .collect();

    let mut best: Option<FeasibilityRecord> = None;
    for rec in &trace {
        if rec.feasible && best.as_ref().is_none_or(|b| rec.tau > b.tau) {
            best = Some(rec.clone());
        }
    }

    if let Some(incumbent) = best.clone() {
        let dr = if rs.len() > 1 { rs[1] - rs[0] } else { 0.0 };
        let score = |r: f64| line_best(r, d_range).map_or(f64::NEG_INFINITY, |rec| rec.tau);
        // The best grid cell can sit a few cells off the boundary optimum
        // (its tau is quantized by the d-grid), so rescan the boundary curve
        // itself at half-cell spacing before the golden-section step.
        let mut center = incumbent.r;
        if dr > 0.0 {
            let lo = (incumbent.r - 8.0 * dr).max(r_range.0);
            let hi = (incumbent.r + 8.0 * dr).min(r_range.1);
            let steps = 33;
            let mut top = (f64::NEG_INFINITY, center);
            for k in 0..steps {
                let r = lo + (hi - lo) * k as f64 / (steps - 1) as f64;
                let t = score(r);
                if t > top.0 {
                    top = (t, r);
                }
            }
            center = top.1;
        }
        let lo = (center - dr).max(r_range.0);
        let hi = (center + dr).min(r_range.1);
        let refined_r = if hi > lo {
            golden_max(lo, hi, refine_iters, score).0
        } else {
            center
        };
        if let Some(refined) = line_best(refined_r, d_range) {
            if refined.feasible && refined.tau > incumbent.tau {
                best = Some(refined);
            }
        }
    }
    TauSweep { best, trace }
}

/// Sweep restricted to the one-parameter family `d = 2R` (condition 3
/// vacuous). `tau` decreases in `R` there, so the maximum sits at the
/// smallest feasible radius, located by bisection; at that boundary the
/// aperture constraint `2 beta + alpha = pi/2` binds.
pub fn maximize_tau_d2r(r_range: (f64, f64), grid: usize, refine_iters: usize) -> TauSweep {
    let rs = axis(r_range, grid);
    let trace: Vec<FeasibilityRecord> = rs.par_iter().map(|&r| evaluate(r, 2.0 * r)).collect();
    let mut best: Option<FeasibilityRecord> = None;
    for rec in &trace {
        if rec.feasible && best.as_ref().is_none_or(|b| rec.tau > b.tau) {
            best = Some(rec.clone());
        }
    }
    if let Some(incumbent) = best.clone() {
        let feasible_at = |r: f64| evaluate(r, 2.0 * r).feasible;
        let refined = if !feasible_at(r_range.0) {
            // margin increases in R on this family: bisect the boundary
            let (mut lo, mut hi) = (r_range.0, incumbent.r);
            let mut iters = refine_iters.max(60);
            while hi - lo > 1e-14 && iters > 0 {
                let mid = 0.5 * (lo + hi);
                if feasible_at(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
                iters -= 1;
            }
            evaluate(hi, 2.0 * hi)
        } else {
            evaluate(r_range.0, 2.0 * r_range.0)
        };
        if refined.feasible && refined.tau > incumbent.tau {
            best = Some(refined);
        }
    }
    TauSweep { best, trace }
}

/// CSV trace with the fixed header
/// `R,d,alpha,beta,psi_required,margin,tau,feasible`.
pub fn trace_csv(trace: &[FeasibilityRecord]) -> String {
    let mut out = String::from("R,d,alpha,beta,psi_required,margin,tau,feasible\n");
    for rec in trace {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            rec.r,
            rec.d,
            rec.alpha,
            rec.beta,
            rec.psi_required,
            rec.margin,
            rec.tau,
            rec.feasible
        ));
    }
    out
}
