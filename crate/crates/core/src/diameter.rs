//! Sufficient conditions for the union of cones to have diameter `d`, and an
//! independent sampled diameter oracle.
//!
//! For a pair of apexes at spherical distance `theta` the three conditions are
//!
//! 1. `2 sin(theta/2) <= d` (apexes no farther than `d`),
//! 2. `theta >= 2 beta` (base caps disjoint, so no base point is farther than
//!    `d` from the other apex),
//! 3. `2R <= d`, or `theta <= 2 arcsin(d/2R) - 2 beta` (cross-base
//!    separations stay at most `d`).
//!
//! Boundary equalities count as satisfied. The oracle brute-forces pairwise
//! distances over the extreme points of every cone (apex plus base circle),
//! which is where the diameter of a union of convex bodies is attained.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::direction::{distance, Direction};
use crate::error::{Error, Result};
use crate::geometry::{Cone, ConeParams};
use crate::rng;
use crate::sphere::AnnulusCode;

/// Angle below which a pair of apexes is rejected as coincident.
pub const MIN_PAIR_ANGLE: f64 = 1e-12;

/// Which of the three pair conditions failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cond {
    Cond1,
    Cond2,
    Cond3,
}

/// Outcome of the three-condition check for one apex pair.
///
/// `cond3_slack` is `None` when `2R <= d` makes condition 3 vacuous
/// (an infinite margin).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub ok: bool,
    pub theta: f64,
    pub failed_condition: Option<Cond>,
    pub cond1_slack: f64,
    pub cond2_slack: f64,
    pub cond3_slack: Option<f64>,
}

impl PairVerdict {
    /// Condition-3 margin with the vacuous branch mapped to +inf.
    pub fn cond3_margin(&self) -> f64 {
        self.cond3_slack.unwrap_or(f64::INFINITY)
    }
}

/// Checks Lemma-style conditions (1)-(3) for one pair of apexes.
pub fn check_pair(x: &Direction, y: &Direction, params: &ConeParams) -> Result<PairVerdict> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    let theta = x.angle_to(y);
    if theta < MIN_PAIR_ANGLE {
        return Err(Error::CoincidentDirections);
    }
    Ok(verdict_for_angle(theta, params))
}

/// The same check driven by the pair angle alone.
pub fn verdict_for_angle(theta: f64, params: &ConeParams) -> PairVerdict {
    let (r, d) = (params.base_radius, params.apex_distance);
    let cond1_slack = d - 2.0 * (theta / 2.0).sin();
    let cond2_slack = theta - 2.0 * params.beta;
    let cond3_slack = if 2.0 * r <= d {
        None
    } else {
        Some(2.0 * (d / (2.0 * r)).asin() - 2.0 * params.beta - theta)
    };
    let failed_condition = if cond1_slack < 0.0 {
        Some(Cond::Cond1)
    } else if cond2_slack < 0.0 {
        Some(Cond::Cond2)
    } else if cond3_slack.is_some_and(|s| s < 0.0) {
        Some(Cond::Cond3)
    } else {
        None
    };
    PairVerdict {
        ok: failed_condition.is_none(),
        theta,
        failed_condition,
        cond1_slack,
        cond2_slack,
        cond3_slack,
    }
}

/// An apex set with its annulus bounds and shared cone parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub dimension: usize,
    pub psi: f64,
    pub params: ConeParams,
    pub apexes: Vec<Direction>,
}

impl Configuration {
    pub fn new(apexes: Vec<Direction>, psi: f64, params: ConeParams) -> Result<Configuration> {
        let dimension = match apexes.first() {
            Some(a) => a.dim(),
            None => return Err(Error::EmptyConfiguration),
        };
        for a in &apexes {
            if a.dim() != dimension {
                return Err(Error::DimensionMismatch(a.dim(), dimension));
            }
        }
        Ok(Configuration {
            dimension,
            psi,
            params,
            apexes,
        })
    }

    pub fn from_annulus_code(code: &AnnulusCode, params: ConeParams) -> Result<Configuration> {
        Configuration::new(code.points.clone(), code.psi, params)
    }

    pub fn size(&self) -> usize {
        self.apexes.len()
    }

    pub fn cones(&self) -> impl Iterator<Item = Cone> + '_ {
        self.apexes
            .iter()
            .map(move |a| Cone::new(a.clone(), self.params))
    }
}

/// One failing pair inside a configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairFailure {
    pub i: usize,
    pub j: usize,
    pub theta: f64,
    pub condition: Cond,
    pub slack: f64,
}

/// The annulus shortcut: with every pair angle in `[psi, pi - psi]`, the
/// largest apex chord is `2 cos(psi/2)`, so `2 cos(psi/2) <= d` re-derives
/// condition (1) for the whole configuration at once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusImplication {
    pub psi: f64,
    pub max_chord: f64,
    pub d: f64,
    pub holds: bool,
}

/// Aggregated all-pairs verdict for a configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiameterVerdict {
    pub ok: bool,
    pub pairs_checked: usize,
    pub failures: Vec<PairFailure>,
    pub annulus_implication: AnnulusImplication,
    pub notes: Vec<String>,
}

/// Runs [`check_pair`] over all pairs; a single apex is vacuously ok.
pub fn verify_configuration(config: &Configuration) -> Result<DiameterVerdict> {
    let mut failures = Vec::new();
    let mut pairs_checked = 0;
    for i in 0..config.apexes.len() {
        for j in (i + 1)..config.apexes.len() {
            let v = check_pair(&config.apexes[i], &config.apexes[j], &config.params)?;
            pairs_checked += 1;
            if let Some(condition) = v.failed_condition {
                let slack = match condition {
                    Cond::Cond1 => v.cond1_slack,
                    Cond::Cond2 => v.cond2_slack,
                    Cond::Cond3 => v.cond3_margin(),
                };
                failures.push(PairFailure {
                    i,
                    j,
                    theta: v.theta,
                    condition,
                    slack,
                });
            }
        }
    }
    let max_chord = 2.0 * (config.psi / 2.0).cos();
    let d = config.params.apex_distance;
    Ok(DiameterVerdict {
        ok: failures.is_empty(),
        pairs_checked,
        failures,
        annulus_implication: AnnulusImplication {
            psi: config.psi,
            max_chord,
            d,
            holds: max_chord <= d,
        },
        notes: vec![
            "cross-base separations are checked as upper bounds: every point of one base cap \
             must stay within d of the other apex and base"
                .to_string(),
        ],
    })
}

/// Role of a sampled point inside the oracle's point cloud.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Apex,
    Base { index: usize },
}

/// A labeled extreme point: which cone it belongs to and its role there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OraclePoint {
    pub cone: usize,
    pub kind: PointKind,
    pub point: Vec<f64>,
}

/// Brute-force diameter estimate with the achieving pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiameterEstimate {
    pub diameter: f64,
    pub witness: (OraclePoint, OraclePoint),
    pub resolution: usize,
    pub points_sampled: usize,
}

/// Maximum pairwise distance over the extreme points of every cone.
///
/// Sampling only ever underestimates the true diameter, so the estimate never
/// exceeds it; it is exact whenever the achieving pair is sampled (always the
/// case for apex-apex and apex-base witnesses in n = 2 and for apexes in any
/// dimension). Deterministic for a fixed seed, independent of thread count.
pub fn diameter_oracle(config: &Configuration, resolution: usize, seed: u64) -> DiameterEstimate {
    assert!(resolution >= 2, "resolution must be at least 2");
    let mut points = Vec::new();
    for (c, cone) in config.cones().enumerate() {
        points.push(OraclePoint {
            cone: c,
            kind: PointKind::Apex,
            point: cone.apex.coords().to_vec(),
        });
        let cone_seed = rng::derive(seed, c as u64);
        for (b, p) in cone.base_points(resolution, cone_seed).into_iter().enumerate() {
            points.push(OraclePoint {
                cone: c,
                kind: PointKind::Base { index: b },
                point: p,
            });
        }
    }

    // Per-row maxima scan j > i; the final fold runs in index order so ties
    // resolve identically whatever the parallel partitioning was.
    let row_best: Vec<(f64, usize)> = (0..points.len().saturating_sub(1))
        .into_par_iter()
        .map(|i| {
            let mut best = (f64::NEG_INFINITY, i + 1);
            for j in (i + 1)..points.len() {
                let dist = distance(&points[i].point, &points[j].point);
                if dist > best.0 {
                    best = (dist, j);
                }
            }
            best
        })
        .collect();

    let mut best = (f64::NEG_INFINITY, 0usize, 1usize);
    for (i, &(dist, j)) in row_best.iter().enumerate() {
        if dist > best.0 {
            best = (dist, i, j);
        }
    }
    DiameterEstimate {
        diameter: best.0,
        witness: (points[best.1].clone(), points[best.2].clone()),
        resolution,
        points_sampled: points.len(),
    }
}

/// Apex pair at spherical distance `theta` in dimension `n`, in the
/// coordinate plane of the first two axes.
pub fn apex_pair(n: usize, theta: f64) -> (Direction, Direction) {
    assert!(n >= 2 && theta > 0.0 && theta <= PI);
    let x = Direction::basis(n, 0);
    let mut coords = vec![0.0; n];
    coords[0] = theta.cos();
    coords[1] = theta.sin();
    (x, Direction::from_vector(coords).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::solve_optimal_r;

    fn optimal() -> ConeParams {
        ConeParams::optimal()
    }

    #[test]
    fn pair_at_a_comfortable_angle_passes() {
        let params = optimal();
        let (x, y) = apex_pair(3, 1.4);
        let v = check_pair(&x, &y, &params).unwrap();
        assert!(v.ok);
        assert!(v.failed_condition.is_none());
        // frozen from 30-digit evaluation at the solved constants
        assert!((v.cond1_slack - 0.52169431066).abs() < 1e-9);
        assert!((v.cond2_slack - 0.130266257733).abs() < 1e-9);
        assert_eq!(v.cond3_slack, None); // d = 2R
        assert!(v.cond3_margin().is_infinite());
    }

    #[test]
    fn pair_too_close_fails_condition_2() {
        let params = optimal();
        let (x, y) = apex_pair(3, 1.0);
        let v = check_pair(&x, &y, &params).unwrap();
        assert!(!v.ok);
        assert_eq!(v.failed_condition, Some(Cond::Cond2));
        assert!((v.cond2_slack - (-0.269733742267)).abs() < 1e-9);
    }

    #[test]
    fn pair_too_far_fails_condition_1() {
        let params = optimal();
        let (x, y) = apex_pair(3, 3.0);
        let v = check_pair(&x, &y, &params).unwrap();
        assert!(!v.ok);
        assert_eq!(v.failed_condition, Some(Cond::Cond1));
        assert!((2.0 * 1.5f64.sin() - 1.99499).abs() < 1e-5);
        assert!((v.cond1_slack - (-0.184860288073)).abs() < 1e-9);
    }

    #[test]
    fn condition_3_activates_when_d_below_2r() {
        // R = 1, d = 2 cos(pi/14) < 2R: condition 3 is a real constraint
        let params = ConeParams::derive(1.0, 2.0 * (PI / 14.0).cos()).unwrap();
        let (x, y) = apex_pair(3, 1.0);
        let v = check_pair(&x, &y, &params).unwrap();
        let bound = 2.0 * (params.apex_distance / 2.0).asin() - 2.0 * params.beta;
        assert!((v.cond3_slack.unwrap() - (bound - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn coincident_pair_rejected() {
        let params = optimal();
        let x = Direction::basis(3, 0);
        assert!(matches!(
            check_pair(&x, &x.clone(), &params),
            Err(Error::CoincidentDirections)
        ));
    }

    #[test]
    fn single_apex_is_vacuously_ok() {
        let config =
            Configuration::new(vec![Direction::basis(3, 0)], 1.2, optimal()).unwrap();
        let v = verify_configuration(&config).unwrap();
        assert!(v.ok);
        assert_eq!(v.pairs_checked, 0);
    }

    #[test]
    fn annulus_implication_at_the_optimum() {
        let c = solve_optimal_r();
        let (x, y) = apex_pair(3, 1.4);
        let config = Configuration::new(vec![x, y], 2.0 * c.beta0, optimal()).unwrap();
        let v = verify_configuration(&config).unwrap();
        // 2 cos(beta0) = 1.6103013... <= d0 = 1.8101297...
        assert!((v.annulus_implication.max_chord - 1.6103013167780909).abs() < 1e-12);
        assert!(v.annulus_implication.holds);
        assert!(v.ok);
    }

    #[test]
    fn offending_pair_is_reported() {
        let params = optimal();
        let (x, y) = apex_pair(3, 1.0);
        let far = Direction::basis(3, 2);
        let config = Configuration::new(vec![x, y, far], 1.0, params).unwrap();
        let v = verify_configuration(&config).unwrap();
        assert!(!v.ok);
        assert_eq!(v.failures.len(), 1);
        let f = &v.failures[0];
        assert_eq!((f.i, f.j), (0, 1));
        assert_eq!(f.condition, Cond::Cond2);
        assert!(f.slack < 0.0);
    }

    #[test]
    fn oracle_hits_the_cone_diameter_exactly() {
        let params = optimal();
        let config =
            Configuration::new(vec![Direction::basis(3, 0)], 1.3, params).unwrap();
        let est = diameter_oracle(&config, 256, 0);
        assert!((est.diameter - params.apex_distance).abs() <= 1e-9);
        assert!(est.diameter <= params.apex_distance + 1e-9);
    }

    #[test]
    fn oracle_agrees_with_a_passing_pair() {
        let params = optimal();
        let (x, y) = apex_pair(3, 1.4);
        let config = Configuration::new(vec![x, y], 1.3, params).unwrap();
        let est = diameter_oracle(&config, 256, 0);
        assert!(est.diameter <= params.apex_distance + 1e-9);
    }

    #[test]
    fn oracle_exposes_a_condition_2_violation() {
        let params = optimal();
        let (x, y) = apex_pair(3, 1.0);
        let config = Configuration::new(vec![x, y], 1.0, params).unwrap();
        let est = diameter_oracle(&config, 512, 0);
        // analytic witness distance: sqrt(1 + R^2 - 2R cos(pi - theta + beta))
        assert!(est.diameter >= 1.87);
        assert!((est.diameter - 1.87348378325).abs() < 1e-3);
        let kinds = (&est.witness.0.kind, &est.witness.1.kind);
        let apex_base = matches!(kinds, (PointKind::Apex, PointKind::Base { .. }))
            || matches!(kinds, (PointKind::Base { .. }, PointKind::Apex));
        assert!(apex_base);
        assert_ne!(est.witness.0.cone, est.witness.1.cone);
    }

    #[test]
    fn oracle_estimates_grow_with_resolution() {
        let params = optimal();
        for n in [3usize, 4] {
            let (x, y) = apex_pair(n, 1.0);
            let config = Configuration::new(vec![x, y], 1.0, params).unwrap();
            let mut last = 0.0;
            for resolution in [64usize, 128, 256, 512] {
                let est = diameter_oracle(&config, resolution, 42);
                assert!(
                    est.diameter >= last,
                    "estimate shrank at resolution {resolution} in n = {n}"
                );
                last = est.diameter;
            }
        }
    }

    #[test]
    fn oracle_is_deterministic() {
        let params = optimal();
        let (x, y) = apex_pair(4, 1.5);
        let config = Configuration::new(vec![x, y], 1.3, params).unwrap();
        let a = diameter_oracle(&config, 128, 7);
        let b = diameter_oracle(&config, 128, 7);
        assert_eq!(a, b);
    }
}
