//! Cone parametrization and the closed-form constants of the construction.
//!
//! A cone `Q(x)` has its apex `x` on the unit sphere and its base circle on a
//! concentric sphere of radius `R`, at Euclidean distance `d` from the apex.
//! Two derived angles describe the same data: `alpha`, between the cone axis
//! and a generatrix, and `beta`, the spherical radius of the base cap on the
//! `R`-sphere. In the axial triangle (origin, apex, base point) the law of
//! cosines gives
//!
//! ```text
//!   cos(alpha) = (1 - R^2 + d^2) / (2d)
//!   cos(beta)  = (d^2 - R^2 - 1) / (2R)
//! ```
//!
//! which specialize to `cos(alpha) = (3R^2+1)/(4R)` and
//! `cos(beta) = (3R^2-1)/(2R)` when `d = 2R`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::direction::{add, dot, norm, scale, Direction};
use crate::error::{Error, Result};
use crate::rng;
use rand_distr::{Distribution, StandardNormal};

/// Tolerance below which a tangent vector is considered orthogonal to an apex.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Cone shape parameters `(R, d, alpha, beta)`.
///
/// Constructed through [`ConeParams::derive`], which enforces the invariants:
/// nondegenerate base circle `|R-1| < d < R+1`, `0 < beta < pi/2`, and cone
/// diameter `2R sin(beta) <= d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeParams {
    /// Radius of the sphere carrying the base circle.
    #[serde(rename = "R")]
    pub base_radius: f64,
    /// Euclidean distance from the apex to every base-circle point.
    #[serde(rename = "d")]
    pub apex_distance: f64,
    /// Angle between the cone axis and a generatrix (radians).
    pub alpha: f64,
    /// Spherical radius of the base cap on the `R`-sphere (radians).
    pub beta: f64,
}

/// Raw law-of-cosines arguments for `(R, d)`, before any range check.
pub fn cosine_args(r: f64, d: f64) -> (f64, f64) {
    let cos_alpha = (1.0 - r * r + d * d) / (2.0 * d);
    let cos_beta = (d * d - r * r - 1.0) / (2.0 * r);
    (cos_alpha, cos_beta)
}

impl ConeParams {
    /// Derives `alpha` and `beta` from `(R, d)` and validates all invariants.
    pub fn derive(base_radius: f64, apex_distance: f64) -> Result<ConeParams> {
        let (r, d) = (base_radius, apex_distance);
        if r.is_nan() || r <= 0.0 {
            return Err(Error::NonPositiveRadius(r));
        }
        if d.is_nan() || d <= (r - 1.0).abs() || d >= r + 1.0 {
            return Err(Error::DegenerateBase { r, d });
        }
        let (cos_alpha, cos_beta) = cosine_args(r, d);
        // In-domain (R, d) keep both arguments strictly inside [-1, 1]; the
        // clamp only absorbs rounding at the fringe.
        let alpha = cos_alpha.clamp(-1.0, 1.0).acos();
        let beta = cos_beta.clamp(-1.0, 1.0).acos();
        if !(beta > 0.0 && beta < FRAC_PI_2) {
            return Err(Error::BetaOutOfRange(beta));
        }
        let chord = 2.0 * r * beta.sin();
        if chord > d {
            return Err(Error::ConeDiameterExceeded { chord, d });
        }
        Ok(ConeParams {
            base_radius: r,
            apex_distance: d,
            alpha,
            beta,
        })
    }

    /// Parameters at the solved optimum (`d = 2 R0`).
    pub fn optimal() -> ConeParams {
        let c = solve_optimal_r();
        ConeParams {
            base_radius: c.r0,
            apex_distance: c.d0,
            alpha: c.alpha0,
            beta: c.beta0,
        }
    }
}

/// The solved optimum of the construction, together with the gap between the
/// closed-form root and the bisection root (both are computed and compared).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OptimalConstants {
    #[serde(rename = "R0")]
    pub r0: f64,
    pub d0: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub tau: f64,
    /// |closed-form root - bisection root|.
    pub solver_gap: f64,
}

impl OptimalConstants {
    /// Residual of the exact identity `cos^2(beta0) = (15 + sqrt(33)) / 32`.
    pub fn residual_cos2_beta(&self) -> f64 {
        let c = self.beta0.cos();
        c * c - (15.0 + 33f64.sqrt()) / 32.0
    }

    /// Residual of the exact identity `tau^2 = (111 - sqrt(33)) / 96`.
    pub fn residual_tau_squared(&self) -> f64 {
        self.tau * self.tau - (111.0 - 33f64.sqrt()) / 96.0
    }
}

/// Closed-form optimal radius `R0 = sqrt((9 + sqrt(33)) / 2) / 3`.
pub fn optimal_r_closed_form() -> f64 {
    ((9.0 + 33f64.sqrt()) / 2.0).sqrt() / 3.0
}

/// On the `d = 2R` family, `2 beta + alpha - pi/2` as a function of `R`.
///
/// Strictly decreasing on `(1/sqrt(3), 1)`: its unique root is the radius at
/// which the aperture constraint `2 beta + alpha = pi/2` binds, equivalently
/// the feasible root of `sin(2 beta) = cos(alpha)`.
fn aperture_gap(r: f64) -> f64 {
    let cos_alpha = (3.0 * r * r + 1.0) / (4.0 * r);
    let cos_beta = (3.0 * r * r - 1.0) / (2.0 * r);
    2.0 * cos_beta.clamp(-1.0, 1.0).acos() + cos_alpha.clamp(-1.0, 1.0).acos() - FRAC_PI_2
}

/// Bisection root of [`aperture_gap`] on `(1/sqrt(3) + 1e-6, 1 - 1e-9)`.
///
/// The raw equation `sin(2 beta) = cos(alpha)` has a second, spurious root
/// with `2 beta > pi/2` in the same interval; bisecting the monotone
/// `2 beta + alpha - pi/2` isolates the feasible one.
pub fn optimal_r_bisection() -> f64 {
    let mut lo = 1.0 / 3f64.sqrt() + 1e-6;
    let mut hi = 1.0 - 1e-9;
    debug_assert!(aperture_gap(lo) > 0.0 && aperture_gap(hi) < 0.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if aperture_gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves for the optimal radius and derives the remaining constants:
/// `d0 = 2 R0`, the closed-form angles, and `tau = 1 / cos(alpha0)`.
pub fn solve_optimal_r() -> OptimalConstants {
    let r0 = optimal_r_closed_form();
    let solver_gap = (r0 - optimal_r_bisection()).abs();
    let d0 = 2.0 * r0;
    let cos_alpha = (3.0 * r0 * r0 + 1.0) / (4.0 * r0);
    let cos_beta = (3.0 * r0 * r0 - 1.0) / (2.0 * r0);
    OptimalConstants {
        r0,
        d0,
        alpha0: cos_alpha.acos(),
        beta0: cos_beta.acos(),
        tau: 1.0 / cos_alpha,
        solver_gap,
    }
}

/// A closed spherical cap: points of the carrier sphere within angular
/// distance `radius` of `center`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalCap {
    pub center: Direction,
    /// Angular radius in (0, pi).
    pub radius: f64,
    /// Radius of the carrying sphere.
    pub carrier: f64,
}

impl SphericalCap {
    pub fn new(center: Direction, radius: f64, carrier: f64) -> Result<Self> {
        if radius.is_nan() || radius <= 0.0 || radius >= PI {
            return Err(Error::CapRadiusOutOfRange(radius));
        }
        if carrier.is_nan() || carrier <= 0.0 {
            return Err(Error::NonPositiveCarrier(carrier));
        }
        Ok(SphericalCap {
            center,
            radius,
            carrier,
        })
    }
}

/// The cone `Q(x)` with apex `x` and shared shape parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    pub apex: Direction,
    pub params: ConeParams,
}

impl Cone {
    pub fn new(apex: Direction, params: ConeParams) -> Cone {
        Cone { apex, params }
    }

    /// Base-circle point in the direction of a unit tangent at the apex:
    /// `y = R (-cos(beta) x + sin(beta) t)`.
    ///
    /// The result satisfies `|y| = R` and `|y - x| = d` exactly (to rounding).
    pub fn base_circle_point(&self, tangent: &Direction) -> Result<Vec<f64>> {
        if tangent.dim() != self.apex.dim() {
            return Err(Error::DimensionMismatch(tangent.dim(), self.apex.dim()));
        }
        let t_dot = tangent.dot(&self.apex);
        if t_dot.abs() > ORTHOGONALITY_TOL {
            return Err(Error::TangentNotOrthogonal(t_dot.abs()));
        }
        Ok(self.base_point_along(tangent.coords()))
    }

    fn base_point_along(&self, unit_tangent: &[f64]) -> Vec<f64> {
        let p = &self.params;
        let axial = scale(self.apex.coords(), -p.base_radius * p.beta.cos());
        let lateral = scale(unit_tangent, p.base_radius * p.beta.sin());
        add(&axial, &lateral)
    }

    /// Samples `resolution` base-circle points.
    ///
    /// For n = 2 the base "circle" is the two points reachable along the
    /// single tangent line (duplicates collapsed). For n = 3 the tangent
    /// angles follow the base-2 radical-inverse sequence, so the point set
    /// for resolution `k` is a prefix of the set for `2k`. For n > 3 tangent
    /// directions are seeded Gaussian draws with the same prefix property.
    pub fn base_points(&self, resolution: usize, seed: u64) -> Vec<Vec<f64>> {
        let n = self.apex.dim();
        let t1 = principal_tangent(&self.apex);
        if n == 2 {
            let neg_t1 = scale(&t1, -1.0);
            return vec![self.base_point_along(&t1), self.base_point_along(&neg_t1)];
        }
        if n == 3 {
            let t2 = secondary_tangent(&self.apex, &t1);
            return (0..resolution)
                .map(|j| {
                    let angle = 2.0 * PI * radical_inverse_base2(j);
                    let u = add(&scale(&t1, angle.cos()), &scale(&t2, angle.sin()));
                    self.base_point_along(&u)
                })
                .collect();
        }
        let mut rng = rng::seeded(seed);
        (0..resolution)
            .map(|_| {
                let u = random_unit_tangent(&self.apex, &mut rng);
                self.base_point_along(&u)
            })
            .collect()
    }

    /// The apex followed by [`Cone::base_points`]. These are the extreme
    /// points of the cone (convex hull of apex and base disk), which is all
    /// the diameter oracle needs to sample.
    pub fn extreme_points(&self, resolution: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut pts = vec![self.apex.coords().to_vec()];
        pts.extend(self.base_points(resolution, seed));
        pts
    }
}

/// Base-2 radical inverse (van der Corput sequence): 0, 1/2, 1/4, 3/4, ...
pub fn radical_inverse_base2(mut index: usize) -> f64 {
    let mut result = 0.0;
    let mut f = 0.5;
    while index > 0 {
        if index & 1 == 1 {
            result += f;
        }
        f *= 0.5;
        index >>= 1;
    }
    result
}

/// Deterministic unit tangent at `apex`: the coordinate axis least aligned
/// with the apex, projected onto the tangent space.
pub fn principal_tangent(apex: &Direction) -> Vec<f64> {
    let x = apex.coords();
    let i0 = (0..x.len())
        .min_by(|&a, &b| x[a].abs().partial_cmp(&x[b].abs()).unwrap())
        .unwrap();
    let mut e = vec![0.0; x.len()];
    e[i0] = 1.0;
    let t = apex.tangential_part(&e);
    scale(&t, 1.0 / norm(&t))
}

/// A unit tangent orthogonal to both `apex` and `t1` (requires n >= 3).
/// Picks the coordinate axis with the largest residual after projecting out
/// both, which keeps the construction well conditioned.
pub fn secondary_tangent(apex: &Direction, t1: &[f64]) -> Vec<f64> {
    let x = apex.coords();
    assert!(x.len() >= 3);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for i in 0..x.len() {
        let mut e = vec![0.0; x.len()];
        e[i] = 1.0;
        let mut t = apex.tangential_part(&e);
        let along_t1 = dot(&t, t1);
        t = t.iter().zip(t1).map(|(ti, t1i)| ti - along_t1 * t1i).collect();
        let r = norm(&t);
        if best.as_ref().is_none_or(|(br, _)| r > *br) {
            best = Some((r, t));
        }
    }
    let (r, t) = best.unwrap();
    debug_assert!(r > 1e-6);
    scale(&t, 1.0 / r)
}

/// Uniform unit tangent at `apex`: Gaussian vector projected and normalized.
pub fn random_unit_tangent<R: rand::Rng>(apex: &Direction, rng: &mut R) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..apex.dim())
            .map(|_| StandardNormal.sample(rng))
            .collect();
        let t = apex.tangential_part(&g);
        let r = norm(&t);
        if r > 1e-9 {
            return scale(&t, 1.0 / r);
        }
    }
}
