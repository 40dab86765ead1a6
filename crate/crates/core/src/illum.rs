//! Necessary illumination condition, numerical blocking witnesses, and the
//! counting lower bound.
//!
//! With aperture `alpha <= pi/6`, an apex `x` of a diameter-`d` body
//! containing `Q(x)` can only be illuminated by directions in the cap
//! `C(-x, pi/2 - alpha)`. A direction outside that cap is *blocked*: some
//! base point `b` has `<ell, x - b> > 0`, so moving from `x` along `ell`
//! immediately exceeds distance `d` to `b` and leaves every diameter-`d`
//! body containing the cone. Counting how many negated-apex caps any single
//! direction can lie in turns a cap-multiplicity bound into a lower bound on
//! the illumination number of every constant-width completion of the union.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diameter::{verify_configuration, Configuration, DiameterVerdict};
use crate::direction::{add, dot, scale, sub, Direction};
use crate::error::{Error, Result};
use crate::geometry::{principal_tangent, secondary_tangent, ConeParams, SphericalCap};
use crate::sphere::{
    candidate_pool, in_cap, max_multiplicity, MultiplicityMode, MultiplicityReport,
};

/// The cap of directions that can possibly illuminate an apex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IlluminationCap {
    pub cap: SphericalCap,
}

/// Cap `C(-apex, pi/2 - alpha)` on the unit sphere. Requires
/// `0 < alpha <= pi/6`.
pub fn illumination_cap(apex: &Direction, alpha: f64) -> Result<IlluminationCap> {
    if !(alpha > 0.0 && alpha <= PI / 6.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let cap = SphericalCap::new(apex.negated(), FRAC_PI_2 - alpha, 1.0)?;
    Ok(IlluminationCap { cap })
}

/// Analytic blocking verdict for a direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockVerdict {
    pub blocked: bool,
    /// angle(ell, -apex) - (pi/2 - alpha); positive outside the cap.
    pub margin: f64,
}

/// `ell` cannot illuminate the apex iff it falls outside
/// `C(-apex, pi/2 - alpha)`.
pub fn is_blocked(apex: &Direction, ell: &Direction, params: &ConeParams) -> Result<BlockVerdict> {
    if apex.dim() != ell.dim() {
        return Err(Error::DimensionMismatch(apex.dim(), ell.dim()));
    }
    if !(params.alpha > 0.0 && params.alpha <= PI / 6.0) {
        return Err(Error::AlphaOutOfRange(params.alpha));
    }
    let margin = ell.angle_to(&apex.negated()) - (FRAC_PI_2 - params.alpha);
    Ok(BlockVerdict {
        blocked: margin > 0.0,
        margin,
    })
}

/// A base point certifying that a direction is blocked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockingWitness {
    pub point: Vec<f64>,
    /// The positive maximum of `<ell, apex - b>` over the base circle.
    pub separation: f64,
}

/// Maximum of `<ell, apex - b>` over the base circle, found by uniform
/// angular discretization plus golden-section refinement. The objective is a
/// cosine in the circle parameter, so a resolution-wide bracket around the
/// best sample contains the true maximum.
pub fn witness_search_max(
    apex: &Direction,
    ell: &Direction,
    params: &ConeParams,
    resolution: usize,
) -> Result<(f64, Vec<f64>)> {
    if apex.dim() != ell.dim() {
        return Err(Error::DimensionMismatch(apex.dim(), ell.dim()));
    }
    if resolution < 2 {
        return Err(Error::ResolutionTooSmall {
            min: 2,
            got: resolution,
        });
    }
    let base_point = |u: &[f64]| -> Vec<f64> {
        let axial = scale(apex.coords(), -params.base_radius * params.beta.cos());
        let lateral = scale(u, params.base_radius * params.beta.sin());
        add(&axial, &lateral)
    };
    let objective = |b: &[f64]| dot(ell.coords(), &sub(apex.coords(), b));

    if apex.dim() == 2 {
        // the base "circle" in the plane is two points; evaluate both
        let t1 = principal_tangent(apex);
        let candidates = [base_point(&t1), base_point(&scale(&t1, -1.0))];
        let mut best = (f64::NEG_INFINITY, Vec::new());
        for b in candidates {
            let v = objective(&b);
            if v > best.0 {
                best = (v, b);
            }
        }
        return Ok(best);
    }

    // Search the circle through the plane of the apex and ell; it contains
    // the maximizer because the objective depends on the tangent direction
    // only through its component along ell.
    let tangential = apex.tangential_part(ell.coords());
    let e_t = match Direction::from_vector(tangential) {
        Ok(d) => d.coords().to_vec(),
        Err(_) => principal_tangent(apex), // ell parallel to apex: constant objective
    };
    let e_q = secondary_tangent(apex, &e_t);
    let circle_point = |t: f64| -> Vec<f64> {
        let u = add(&scale(&e_t, t.cos()), &scale(&e_q, t.sin()));
        base_point(&u)
    };
    let g = |t: f64| objective(&circle_point(t));

    let mut best_t = 0.0;
    let mut best_v = f64::NEG_INFINITY;
    for k in 0..resolution {
        let t = 2.0 * PI * k as f64 / resolution as f64;
        let v = g(t);
        if v > best_v {
            best_v = v;
            best_t = t;
        }
    }
    let half = 2.0 * PI / resolution as f64;
    let (t_star, v_star) = golden_max(best_t - half, best_t + half, 80, g);
    let (t_best, v_best) = if v_star > best_v {
        (t_star, v_star)
    } else {
        (best_t, best_v)
    };
    Ok((v_best, circle_point(t_best)))
}

/// Witness for a blocked direction: the best base point iff the maximal
/// separation is positive. Agrees with [`is_blocked`] up to the
/// discretization band of the circle search.
pub fn blocking_witness(
    apex: &Direction,
    ell: &Direction,
    params: &ConeParams,
    resolution: usize,
) -> Result<Option<BlockingWitness>> {
    let (separation, point) = witness_search_max(apex, ell, params, resolution)?;
    Ok((separation > 0.0).then_some(BlockingWitness { point, separation }))
}

/// Golden-section maximization on `[a, b]`, tracking the best evaluation.
pub(crate) fn golden_max(a: f64, b: f64, iters: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = if f1 > f2 { (x1, f1) } else { (x2, f2) };
    for _ in 0..iters {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        let (x, v) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Configuration summary embedded in certificates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub dimension: usize,
    pub size: usize,
    pub psi: f64,
}

/// Verdicts and numeric slack for every checked condition, plus the counting
/// lower bound on the illumination number of every constant-width completion
/// of the cone union.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub params: ConeParams,
    pub config: ConfigSummary,
    pub verdicts: DiameterVerdict,
    pub phi: f64,
    pub epsilon: f64,
    pub multiplicity: MultiplicityReport,
    pub lower_bound: usize,
    pub certified: bool,
    pub caveats: Vec<String>,
}

pub(crate) fn counting_bound(size: usize, multiplicity: usize) -> usize {
    size.div_ceil(multiplicity.max(1))
}

/// Counting certificate: with `phi = pi/2 - alpha + epsilon`, a direction can
/// lie in at most `max_multiplicity` caps `C(-x, phi)`, so at least
/// `ceil(|X| / max_multiplicity)` directions are needed.
///
/// Precondition violations become caveats, not errors, so parameter sweeps
/// can keep going; the bound is flagged non-certified whenever the
/// multiplicity method cannot certify an upper bound.
pub fn counting_lower_bound(
    config: &Configuration,
    epsilon: f64,
    mode: MultiplicityMode,
    seed: u64,
) -> Result<Certificate> {
    let mut caveats = Vec::new();
    let verdicts = verify_configuration(config)?;
    if !verdicts.ok {
        caveats.push(
            "configuration fails the diameter conditions; the bound applies only to unions of \
             diameter d"
                .to_string(),
        );
    }
    let alpha = config.params.alpha;
    if alpha > PI / 6.0 {
        caveats.push("alpha exceeds pi/6, outside the illumination-cap hypothesis".to_string());
    }
    let cap_radius = FRAC_PI_2 - alpha;
    if config.psi > cap_radius {
        caveats.push("psi exceeds pi/2 - alpha; phi = psi + epsilon does not dominate".to_string());
    }
    let phi = cap_radius + epsilon;
    let negated: Vec<Direction> = config.apexes.iter().map(|a| a.negated()).collect();
    let multiplicity = max_multiplicity(&negated, phi, mode, seed)?;
    let lower_bound = counting_bound(config.size(), multiplicity.max_multiplicity);
    let certified = multiplicity.certified_upper;
    if !certified {
        caveats.push(
            "multiplicity is not certified (heuristic or unconfirmed branch-and-bound); the \
             lower bound is an estimate"
                .to_string(),
        );
    }
    Ok(Certificate {
        params: config.params,
        config: ConfigSummary {
            dimension: config.dimension,
            size: config.size(),
            psi: config.psi,
        },
        verdicts,
        phi,
        epsilon,
        multiplicity,
        lower_bound,
        certified,
        caveats,
    })
}

/// Greedy cover of the apexes' illumination caps `C(-x, pi/2 - alpha)`:
/// repeatedly pick the pool candidate covering the most uncovered apexes.
///
/// The pool is the same one the heuristic multiplicity scan uses (same seed),
/// so every pick covers at most `max_multiplicity(phi)` apexes and the cover
/// size always dominates the counting lower bound.
pub fn greedy_apex_cover(
    config: &Configuration,
    _epsilon: f64,
    seed: u64,
) -> Result<Vec<Direction>> {
    let cap_radius = FRAC_PI_2 - config.params.alpha;
    if cap_radius <= 0.0 {
        return Err(Error::AlphaOutOfRange(config.params.alpha));
    }
    let negated: Vec<Direction> = config.apexes.iter().map(|a| a.negated()).collect();
    let pool = candidate_pool(&negated, seed);
    let mut uncovered: Vec<usize> = (0..negated.len()).collect();
    let mut cover = Vec::new();
    while !uncovered.is_empty() {
        let gains: Vec<usize> = pool
            .par_iter()
            .map(|cand| {
                uncovered
                    .iter()
                    .filter(|&&i| in_cap(&negated[i], cap_radius, cand))
                    .count()
            })
            .collect();
        let (best_idx, &best_gain) = gains
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .unwrap();
        debug_assert!(best_gain > 0, "every -x covers x, so progress is guaranteed");
        let pick = pool[best_idx].clone();
        uncovered.retain(|&i| !in_cap(&negated[i], cap_radius, &pick));
        cover.push(pick);
    }
    Ok(cover)
}
