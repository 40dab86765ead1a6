//! Apex sets with two-sided angular constraints and cap-covering
//! multiplicity.
//!
//! An annulus code is a finite set on S^{n-1} whose pairwise spherical
//! distances all lie in `[psi, pi - psi]`. Codes are produced by greedy
//! rejection sampling over seeded uniform draws; the covering multiplicity of
//! a cap family `C(p_i, phi)` is the largest number of caps sharing a common
//! direction, measured exactly for n = 2 (arc-endpoint sweep), by
//! branch-and-bound with a spherical Chebyshev feasibility check for small
//! families, or by a candidate-scan heuristic.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::direction::{add, dot, norm, scale, Direction};
use crate::error::{Error, Result};
use crate::rng;

/// Slack added to cap membership so closed-cap boundary cases survive
/// floating-point rounding.
pub const CAP_BOUNDARY_EPS: f64 = 1e-12;

/// Tolerance for re-checking annulus-code invariants.
pub const ANNULUS_TOL: f64 = 1e-10;

/// Number of seeded uniform directions in the shared candidate pool.
pub const POOL_UNIFORM_CANDIDATES: usize = 10_000;

/// Independent uniform points on S^{n-1} via normalized Gaussian vectors.
pub fn sample_uniform(n: usize, count: usize, seed: u64) -> Result<Vec<Direction>> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    if count == 0 {
        return Err(Error::EmptyCount);
    }
    let mut rng = rng::seeded(seed);
    Ok((0..count).map(|_| gaussian_direction(n, &mut rng)).collect())
}

pub(crate) fn gaussian_direction<R: Rng>(n: usize, rng: &mut R) -> Direction {
    loop {
        let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        if let Ok(d) = Direction::from_vector(g) {
            return d;
        }
    }
}

/// A point set whose pairwise spherical distances lie in `[psi, pi - psi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusCode {
    pub dimension: usize,
    pub psi: f64,
    pub points: Vec<Direction>,
}

impl AnnulusCode {
    /// Upper angular bound `pi - psi`.
    pub fn upper(&self) -> f64 {
        PI - self.psi
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Independent all-pairs re-check of the annulus invariant.
    pub fn check_invariant(&self) -> Result<()> {
        let upper = self.upper();
        for (i, a) in self.points.iter().enumerate() {
            if a.dim() != self.dimension {
                return Err(Error::DimensionMismatch(a.dim(), self.dimension));
            }
            for (j, b) in self.points.iter().enumerate().skip(i + 1) {
                let theta = a.angle_to(b);
                if theta < self.psi - ANNULUS_TOL || theta > upper + ANNULUS_TOL {
                    return Err(Error::AnnulusViolation {
                        i,
                        j,
                        theta,
                        psi: self.psi,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Result of [`generate_annulus_code`]: the code, whether the trial budget
/// ran out before reaching the target, and how many trials were consumed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratedCode {
    pub code: AnnulusCode,
    pub exhausted: bool,
    pub trials_used: usize,
}

/// Greedily accepts candidates whose angle to every accepted point lies in
/// `[psi, pi - psi]` (boundary inclusive). Acceptance order is sample order.
fn greedy_filter<I>(candidates: I, psi: f64, target: usize) -> (Vec<Direction>, usize)
where
    I: Iterator<Item = Direction>,
{
    let upper = PI - psi;
    let mut accepted: Vec<Direction> = Vec::new();
    let mut trials = 0;
    for cand in candidates {
        trials += 1;
        let ok = accepted.iter().all(|p| {
            let theta = cand.angle_to(p);
            theta >= psi && theta <= upper
        });
        if ok {
            accepted.push(cand);
            if accepted.len() == target {
                break;
            }
        }
    }
    (accepted, trials)
}

/// Greedy rejection sampling of an annulus code.
///
/// Stops at `target` points or after `max_trials` uniform draws; running out
/// of trials sets the `exhausted` flag instead of failing.
pub fn generate_annulus_code(
    n: usize,
    psi: f64,
    target: usize,
    max_trials: usize,
    seed: u64,
) -> Result<GeneratedCode> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    if !(psi > 0.0 && psi < PI / 2.0) {
        return Err(Error::PsiOutOfRange(psi));
    }
    if target == 0 {
        return Err(Error::EmptyCount);
    }
    let mut rng = rng::seeded(seed);
    let draws = (0..max_trials).map(|_| gaussian_direction(n, &mut rng));
    let (points, trials_used) = greedy_filter(draws, psi, target);
    let exhausted = points.len() < target;
    Ok(GeneratedCode {
        code: AnnulusCode {
            dimension: n,
            psi,
            points,
        },
        exhausted,
        trials_used,
    })
}

/// Closed-cap membership: angle(ell, p) <= phi, with rounding slack.
pub fn in_cap(p: &Direction, phi: f64, ell: &Direction) -> bool {
    ell.angle_to(p) <= phi + CAP_BOUNDARY_EPS
}

/// Number of caps `C(p, phi)` containing `ell` (boundary inclusive).
pub fn cap_multiplicity(points: &[Direction], phi: f64, ell: &Direction) -> usize {
    points.iter().filter(|p| in_cap(p, phi, ell)).count()
}

/// How a multiplicity figure was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplicityMode {
    ExactN2,
    BranchAndBound,
    Heuristic,
}

/// Maximum cap-covering multiplicity with its attaining direction.
///
/// `max_multiplicity` is always the multiplicity counted at
/// `witness_direction`; `certified_upper` says whether it is also a proven
/// maximum (exact n = 2 sweep, or branch-and-bound whose achieved size meets
/// the pairwise-clique upper bound).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityReport {
    pub phi: f64,
    pub max_multiplicity: usize,
    pub witness_direction: Option<Direction>,
    pub method: MultiplicityMode,
    pub certified_upper: bool,
    /// Size of the largest pairwise-compatible cap family (branch-and-bound
    /// only); an upper bound on the true multiplicity.
    pub clique_bound: Option<usize>,
}

/// Tuning knobs for the branch-and-bound mode.
#[derive(Clone, Copy, Debug)]
pub struct BnbOptions {
    /// Largest family branch-and-bound accepts.
    pub max_points: usize,
    /// Multistart count for the Chebyshev feasibility ascent.
    pub multistarts: usize,
    /// Ascent iterations per start.
    pub ascent_iters: usize,
}

impl Default for BnbOptions {
    fn default() -> Self {
        BnbOptions {
            max_points: 30,
            multistarts: 8,
            ascent_iters: 300,
        }
    }
}

/// Candidate directions shared by the heuristic scan and the greedy cover:
/// all cap centers, all normalized pairwise center sums, and
/// [`POOL_UNIFORM_CANDIDATES`] seeded uniform directions.
pub fn candidate_pool(points: &[Direction], seed: u64) -> Vec<Direction> {
    let Some(first) = points.first() else {
        return Vec::new();
    };
    let n = first.dim();
    let mut pool: Vec<Direction> = points.to_vec();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let s = add(a.coords(), b.coords());
            if norm(&s) > 1e-9 {
                pool.push(Direction::from_vector(s).unwrap());
            }
        }
    }
    let mut rng = rng::seeded(seed);
    pool.extend((0..POOL_UNIFORM_CANDIDATES).map(|_| gaussian_direction(n, &mut rng)));
    pool
}

fn best_of_pool(points: &[Direction], phi: f64, pool: &[Direction]) -> (usize, Option<Direction>) {
    let counts: Vec<usize> = pool
        .par_iter()
        .map(|c| cap_multiplicity(points, phi, c))
        .collect();
    let mut best = (0usize, None);
    for (c, cand) in counts.into_iter().zip(pool) {
        if c > best.0 {
            best = (c, Some(cand.clone()));
        }
    }
    best
}

/// Maximum covering multiplicity of the family `C(p_i, phi)`.
pub fn max_multiplicity(
    points: &[Direction],
    phi: f64,
    mode: MultiplicityMode,
    seed: u64,
) -> Result<MultiplicityReport> {
    max_multiplicity_opts(points, phi, mode, seed, BnbOptions::default())
}

pub fn max_multiplicity_opts(
    points: &[Direction],
    phi: f64,
    mode: MultiplicityMode,
    seed: u64,
    opts: BnbOptions,
) -> Result<MultiplicityReport> {
    match mode {
        MultiplicityMode::ExactN2 => exact_n2(points, phi),
        MultiplicityMode::Heuristic => {
            let (count, witness) = best_of_pool(points, phi, &candidate_pool(points, seed));
            Ok(MultiplicityReport {
                phi,
                max_multiplicity: count,
                witness_direction: witness,
                method: MultiplicityMode::Heuristic,
                certified_upper: false,
                clique_bound: None,
            })
        }
        MultiplicityMode::BranchAndBound => branch_and_bound(points, phi, seed, opts),
    }
}

/// Exact circle sweep: caps are closed arcs, so the maximum overlap is
/// attained at an arc endpoint; evaluating the multiplicity at every endpoint
/// (plus the centers) is exact.
fn exact_n2(points: &[Direction], phi: f64) -> Result<MultiplicityReport> {
    for p in points {
        if p.dim() != 2 {
            return Err(Error::ModeMismatch {
                mode: "exact_n2",
                reason: format!("requires dimension 2, got {}", p.dim()),
            });
        }
    }
    let mut best: (usize, Option<Direction>) = (0, None);
    for p in points {
        let theta = p.coords()[1].atan2(p.coords()[0]);
        for cand_angle in [theta - phi, theta, theta + phi] {
            let cand =
                Direction::from_vector(vec![cand_angle.cos(), cand_angle.sin()]).unwrap();
            let c = cap_multiplicity(points, phi, &cand);
            if c > best.0 {
                best = (c, Some(cand));
            }
        }
    }
    Ok(MultiplicityReport {
        phi,
        max_multiplicity: best.0,
        witness_direction: best.1,
        method: MultiplicityMode::ExactN2,
        certified_upper: true,
        clique_bound: None,
    })
}

/// Exact maximum clique of the pairwise-intersection graph
/// (edge iff center angle <= 2 phi).
fn max_clique(adj: &[Vec<bool>]) -> usize {
    fn extend(adj: &[Vec<bool>], size: usize, cands: &[usize], best: &mut usize) {
        if size > *best {
            *best = size;
        }
        if size + cands.len() <= *best {
            return;
        }
        for (k, &v) in cands.iter().enumerate() {
            if size + cands.len() - k <= *best {
                break;
            }
            let next: Vec<usize> = cands[k + 1..]
                .iter()
                .copied()
                .filter(|&u| adj[v][u])
                .collect();
            extend(adj, size + 1, &next, best);
        }
    }
    let mut best = 0;
    let all: Vec<usize> = (0..adj.len()).collect();
    extend(adj, 0, &all, &mut best);
    best
}

fn branch_and_bound(
    points: &[Direction],
    phi: f64,
    seed: u64,
    opts: BnbOptions,
) -> Result<MultiplicityReport> {
    if points.len() > opts.max_points {
        return Err(Error::ModeMismatch {
            mode: "branch_and_bound",
            reason: format!(
                "family of {} exceeds the limit of {}",
                points.len(),
                opts.max_points
            ),
        });
    }
    if points.is_empty() {
        return Ok(MultiplicityReport {
            phi,
            max_multiplicity: 0,
            witness_direction: None,
            method: MultiplicityMode::BranchAndBound,
            certified_upper: true,
            clique_bound: Some(0),
        });
    }

    let k = points.len();
    let adj: Vec<Vec<bool>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| i != j && points[i].angle_to(&points[j]) <= 2.0 * phi + CAP_BOUNDARY_EPS)
                .collect()
        })
        .collect();
    let clique_bound = max_clique(&adj);

    // Heuristic incumbent: its witness already certifies a feasible family,
    // so branch-and-bound can only improve on it.
    let (mut best_count, mut best_witness) =
        best_of_pool(points, phi, &candidate_pool(points, seed));

    struct Search<'a> {
        points: &'a [Direction],
        adj: &'a [Vec<bool>],
        phi: f64,
        seed: u64,
        opts: BnbOptions,
    }

    impl Search<'_> {
        fn extend(
            &self,
            chosen: &mut Vec<usize>,
            cands: &[usize],
            best_count: &mut usize,
            best_witness: &mut Option<Direction>,
        ) {
            for (idx, &v) in cands.iter().enumerate() {
                if chosen.len() + cands.len() - idx <= *best_count {
                    break;
                }
                chosen.push(v);
                if let Some(w) = self.feasible(chosen) {
                    let count = cap_multiplicity(self.points, self.phi, &w);
                    if count > *best_count {
                        *best_count = count;
                        *best_witness = Some(w);
                    }
                    let next: Vec<usize> = cands[idx + 1..]
                        .iter()
                        .copied()
                        .filter(|&u| self.adj[v][u])
                        .collect();
                    self.extend(chosen, &next, best_count, best_witness);
                }
                chosen.pop();
            }
        }

        /// A direction inside every chosen cap, if the ascent finds one.
        fn feasible(&self, chosen: &[usize]) -> Option<Direction> {
            if chosen.len() == 1 {
                return Some(self.points[chosen[0]].clone());
            }
            let subset: Vec<&Direction> = chosen.iter().map(|&i| &self.points[i]).collect();
            let w = spherical_chebyshev(&subset, self.seed, self.opts)?;
            if subset.iter().all(|p| in_cap(p, self.phi, &w)) {
                Some(w)
            } else {
                None
            }
        }
    }

    let search = Search {
        points,
        adj: &adj,
        phi,
        seed,
        opts,
    };
    let all: Vec<usize> = (0..k).collect();
    search.extend(&mut Vec::new(), &all, &mut best_count, &mut best_witness);

    Ok(MultiplicityReport {
        phi,
        max_multiplicity: best_count,
        witness_direction: best_witness,
        method: MultiplicityMode::BranchAndBound,
        certified_upper: best_count == clique_bound,
        clique_bound: Some(clique_bound),
    })
}

/// Spherical Chebyshev center: maximize `min_i <l, p_i>` over the unit
/// sphere by projected subgradient ascent from the normalized center sum
/// (with seeded multistarts), then polish on the active set.
fn spherical_chebyshev(subset: &[&Direction], seed: u64, opts: BnbOptions) -> Option<Direction> {
    let n = subset[0].dim();
    let mut center_sum = vec![0.0; n];
    for p in subset {
        center_sum = add(&center_sum, p.coords());
    }
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(opts.multistarts);
    if norm(&center_sum) > 1e-9 {
        starts.push(scale(&center_sum, 1.0 / norm(&center_sum)));
    } else {
        starts.push(subset[0].coords().to_vec());
    }
    let mut rng = rng::stream(seed, 0xC4EB);
    while starts.len() < opts.multistarts {
        let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let perturbed = add(&starts[0], &scale(&g, 0.25));
        if norm(&perturbed) > 1e-9 {
            starts.push(scale(&perturbed, 1.0 / norm(&perturbed)));
        }
    }

    let min_dot = |l: &[f64]| -> f64 {
        subset
            .iter()
            .map(|p| dot(l, p.coords()))
            .fold(f64::INFINITY, f64::min)
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in starts {
        let mut l = start;
        let mut step = 0.5;
        for _ in 0..opts.ascent_iters {
            let m = min_dot(&l);
            let mut g = vec![0.0; n];
            let mut active = 0;
            for p in subset {
                if dot(&l, p.coords()) <= m + 1e-7 {
                    g = add(&g, p.coords());
                    active += 1;
                }
            }
            let g = scale(&g, 1.0 / active as f64);
            let moved = add(&l, &scale(&g, step));
            let r = norm(&moved);
            if r < 1e-12 {
                break;
            }
            let moved = scale(&moved, 1.0 / r);
            if min_dot(&moved) >= m {
                l = moved;
            } else {
                step *= 0.5;
            }
            if step < 1e-14 {
                break;
            }
        }
        let l = match polish_on_active_set(subset, &l) {
            Some(p) if min_dot(&p) > min_dot(&l) => p,
            _ => l,
        };
        let v = min_dot(&l);
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, l));
        }
    }
    best.and_then(|(_, l)| Direction::from_vector(l).ok())
}

/// Equalizes the dots over the active set: solve `G lambda = 1` on the Gram
/// matrix of active centers and renormalize `sum lambda_i p_i`, dropping
/// negative weights. Restores machine-precision optima that the subgradient
/// phase only approaches.
fn polish_on_active_set(subset: &[&Direction], l: &[f64]) -> Option<Vec<f64>> {
    let m = subset
        .iter()
        .map(|p| dot(l, p.coords()))
        .fold(f64::INFINITY, f64::min);
    let mut active: Vec<usize> = (0..subset.len())
        .filter(|&i| dot(l, subset[i].coords()) <= m + 1e-5)
        .collect();
    loop {
        if active.is_empty() {
            return None;
        }
        if active.len() == 1 {
            return Some(subset[active[0]].coords().to_vec());
        }
        let k = active.len();
        let gram: Vec<Vec<f64>> = active
            .iter()
            .map(|&i| {
                active
                    .iter()
                    .map(|&j| subset[i].dot(subset[j]))
                    .collect()
            })
            .collect();
        let lambda = solve_linear(gram, vec![1.0; k])?;
        if let Some(worst) = (0..k)
            .filter(|&i| lambda[i] < 0.0)
            .min_by(|&a, &b| lambda[a].partial_cmp(&lambda[b]).unwrap())
        {
            active.remove(worst);
            continue;
        }
        let mut combo = vec![0.0; subset[0].dim()];
        for (w, &i) in lambda.iter().zip(&active) {
            combo = add(&combo, &scale(subset[i].coords(), *w));
        }
        let r = norm(&combo);
        if r < 1e-12 {
            return None;
        }
        return Some(scale(&combo, 1.0 / r));
    }
}

/// Gaussian elimination with partial pivoting for the tiny systems above.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col].abs() < 1e-13 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pivot_row = a[col].clone();
        let pivot_b = b[col];
        for row in (col + 1)..n {
            let f = a[row][col] / pivot_row[col];
            for (entry, pv) in a[row].iter_mut().zip(&pivot_row).skip(col) {
                *entry -= f * pv;
            }
            b[row] -= f * pivot_b;
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in (row + 1)..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Random orthogonal matrix (rows orthonormal) from seeded Gaussian entries,
/// for rotation-equivariance checks.
pub fn random_rotation(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng::stream(seed, 0x20);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    while rows.len() < n {
        let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut v = g;
        // two Gram-Schmidt passes for orthogonality near machine precision
        for _ in 0..2 {
            for row in &rows {
                let c = dot(&v, row);
                v = v.iter().zip(row).map(|(vi, ri)| vi - c * ri).collect();
            }
        }
        let r = norm(&v);
        if r > 1e-6 {
            rows.push(scale(&v, 1.0 / r));
        }
    }
    rows
}

/// Applies a rotation matrix to a direction.
pub fn rotate(q: &[Vec<f64>], dir: &Direction) -> Direction {
    let coords: Vec<f64> = q.iter().map(|row| dot(row, dir.coords())).collect();
    Direction::from_vector(coords).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::solve_optimal_r;

    #[test]
    fn samples_are_unit_and_centered() {
        let pts = sample_uniform(3, 10_000, 1).unwrap();
        let mut mean = vec![0.0; 3];
        for p in &pts {
            assert!((norm(p.coords()) - 1.0).abs() <= 1e-12);
            mean = add(&mean, p.coords());
        }
        mean = scale(&mean, 1.0 / pts.len() as f64);
        assert!(norm(&mean) <= 0.05);
    }

    #[test]
    fn single_sample_is_a_unit_vector() {
        let pts = sample_uniform(2, 1, 7).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((norm(pts[0].coords()) - 1.0).abs() <= 1e-12);
    }

    // Independent 1-D quadrature oracle for the S^2 cap measure ratio:
    // integrate sin(t) dt by Simpson's rule instead of using the closed form.
    fn cap_measure_ratio_s2(phi: f64) -> f64 {
        let simpson = |a: f64, b: f64, m: usize| -> f64 {
            let h = (b - a) / m as f64;
            let mut acc = (a).sin() + (b).sin();
            for i in 1..m {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * (a + i as f64 * h).sin();
            }
            acc * h / 3.0
        };
        simpson(0.0, phi, 2000) / simpson(0.0, PI, 2000)
    }

    #[test]
    fn empirical_cap_fraction_matches_quadrature() {
        let phi = PI / 3.0;
        let expected = cap_measure_ratio_s2(phi);
        assert!((expected - 0.25).abs() < 1e-9);
        let pts = sample_uniform(3, 10_000, 1).unwrap();
        let cos_phi = phi.cos();
        let frac = pts.iter().filter(|p| p.coords()[0] >= cos_phi).count() as f64
            / pts.len() as f64;
        assert!((frac - expected).abs() <= 0.02);
    }

    #[test]
    fn circle_annulus_code_saturates_at_two_points() {
        let c = solve_optimal_r();
        let gen = generate_annulus_code(2, 2.0 * c.beta0, 10, 100_000, 3).unwrap();
        assert_eq!(gen.code.len(), 2);
        assert!(gen.exhausted);
        assert_eq!(gen.trials_used, 100_000);
        gen.code.check_invariant().unwrap();
    }

    #[test]
    fn target_one_needs_no_constraints() {
        let gen = generate_annulus_code(5, 1.0, 1, 10, 9).unwrap();
        assert_eq!(gen.code.len(), 1);
        assert!(!gen.exhausted);
        assert_eq!(gen.trials_used, 1);
    }

    #[test]
    fn psi_domain_is_enforced() {
        assert!(matches!(
            generate_annulus_code(3, 0.0, 5, 100, 0),
            Err(Error::PsiOutOfRange(_))
        ));
        assert!(matches!(
            generate_annulus_code(3, PI / 2.0, 5, 100, 0),
            Err(Error::PsiOutOfRange(_))
        ));
    }

    #[test]
    fn greedy_over_signed_basis_keeps_one_per_axis() {
        // psi = pi/2: orthogonal pairs sit exactly on both bounds and are
        // accepted; antipodal pairs exceed pi - psi and are rejected.
        let candidates = (0..3)
            .flat_map(|i| {
                [
                    Direction::basis(3, i),
                    Direction::basis(3, i).negated(),
                ]
            })
            .collect::<Vec<_>>();
        let (accepted, _) = greedy_filter(candidates.into_iter(), PI / 2.0, 10);
        assert_eq!(accepted.len(), 3);
        assert_eq!(accepted[0], Direction::basis(3, 0));
        assert_eq!(accepted[1], Direction::basis(3, 1));
        assert_eq!(accepted[2], Direction::basis(3, 2));
    }

    #[test]
    fn generated_codes_pass_their_own_invariant() {
        for seed in 0..5 {
            for (n, psi) in [(2, 1.0), (3, 0.9), (4, 0.7)] {
                let gen = generate_annulus_code(n, psi, 40, 20_000, seed).unwrap();
                gen.code.check_invariant().unwrap();
            }
        }
    }

    #[test]
    fn cap_multiplicity_examples() {
        let e1 = Direction::basis(3, 0);
        let e2 = Direction::basis(3, 1);
        let mid = Direction::from_vector(vec![1.0, 1.0, 0.0]).unwrap();
        let pts = vec![e1.clone(), e2.clone()];
        assert_eq!(cap_multiplicity(&pts, PI / 3.0, &mid), 2);
        assert_eq!(cap_multiplicity(&pts, PI / 6.0, &e1), 1);
        assert_eq!(cap_multiplicity(&[], PI / 3.0, &e1), 0);
        assert_eq!(cap_multiplicity(&pts, PI, &e1.negated()), 2);
    }

    #[test]
    fn arc_sweep_finds_the_overlap() {
        // arcs of half-width 20 degrees at 0, 30, 170 degrees: the first two
        // overlap on [10, 20] degrees, the third is disjoint
        let deg = PI / 180.0;
        let pts: Vec<Direction> = [0.0, 30.0, 170.0]
            .iter()
            .map(|&a| Direction::from_vector(vec![(a * deg).cos(), (a * deg).sin()]).unwrap())
            .collect();
        let rep = max_multiplicity(&pts, 20.0 * deg, MultiplicityMode::ExactN2, 0).unwrap();
        assert_eq!(rep.max_multiplicity, 2);
        assert!(rep.certified_upper);
        let w = rep.witness_direction.unwrap();
        assert_eq!(cap_multiplicity(&pts, 20.0 * deg, &w), 2);
    }

    #[test]
    fn full_sphere_cap_counts_everything() {
        let pts = sample_uniform(2, 9, 5).unwrap();
        let rep = max_multiplicity(&pts, PI, MultiplicityMode::ExactN2, 0).unwrap();
        assert_eq!(rep.max_multiplicity, 9);
        let pts3 = sample_uniform(3, 9, 5).unwrap();
        let rep3 = max_multiplicity(&pts3, PI + 0.5, MultiplicityMode::Heuristic, 0).unwrap();
        assert_eq!(rep3.max_multiplicity, 9);
    }

    #[test]
    fn orthogonal_triple_caps_pair_up() {
        // pairwise center angles equal 2 phi exactly: caps meet at the
        // normalized pair midpoints, no direction lies in all three
        let pts: Vec<Direction> = (0..3).map(|i| Direction::basis(3, i)).collect();
        let rep =
            max_multiplicity(&pts, PI / 4.0, MultiplicityMode::BranchAndBound, 0).unwrap();
        assert_eq!(rep.max_multiplicity, 2);
        assert_eq!(rep.clique_bound, Some(3));
        assert!(!rep.certified_upper);
        let w = rep.witness_direction.unwrap();
        assert_eq!(cap_multiplicity(&pts, PI / 4.0, &w), 2);
    }

    #[test]
    fn mode_mismatches_are_rejected() {
        let pts3 = sample_uniform(3, 4, 1).unwrap();
        assert!(matches!(
            max_multiplicity(&pts3, 0.5, MultiplicityMode::ExactN2, 0),
            Err(Error::ModeMismatch { .. })
        ));
        let many = sample_uniform(3, 31, 1).unwrap();
        assert!(matches!(
            max_multiplicity(&many, 0.5, MultiplicityMode::BranchAndBound, 0),
            Err(Error::ModeMismatch { .. })
        ));
    }

    #[test]
    fn method_ordering_heuristic_bnb_clique() {
        for seed in 0..6 {
            let pts = sample_uniform(3, 12, seed).unwrap();
            for phi in [0.4, 0.7, 1.1] {
                let heur =
                    max_multiplicity(&pts, phi, MultiplicityMode::Heuristic, seed).unwrap();
                let bnb =
                    max_multiplicity(&pts, phi, MultiplicityMode::BranchAndBound, seed).unwrap();
                assert!(heur.max_multiplicity <= bnb.max_multiplicity);
                assert!(bnb.max_multiplicity <= bnb.clique_bound.unwrap());
            }
        }
    }

    // Dense-grid brute force over the circle, the independent n = 2 oracle.
    fn brute_force_circle_multiplicity(points: &[Direction], phi: f64) -> usize {
        let mut best = 0;
        let steps = 200_000;
        for k in 0..steps {
            let a = 2.0 * PI * k as f64 / steps as f64;
            let ell = Direction::from_vector(vec![a.cos(), a.sin()]).unwrap();
            best = best.max(cap_multiplicity(points, phi, &ell));
        }
        for p in points {
            let t = p.coords()[1].atan2(p.coords()[0]);
            for a in [t - phi, t + phi] {
                let ell = Direction::from_vector(vec![a.cos(), a.sin()]).unwrap();
                best = best.max(cap_multiplicity(points, phi, &ell));
            }
        }
        best
    }

    #[test]
    fn exact_n2_matches_brute_force_and_dominates_heuristic() {
        for seed in 0..4 {
            let pts = sample_uniform(2, 9, seed).unwrap();
            for phi in [0.3, 0.8, 1.4] {
                let exact =
                    max_multiplicity(&pts, phi, MultiplicityMode::ExactN2, seed).unwrap();
                let heur =
                    max_multiplicity(&pts, phi, MultiplicityMode::Heuristic, seed).unwrap();
                assert_eq!(
                    exact.max_multiplicity,
                    brute_force_circle_multiplicity(&pts, phi)
                );
                assert!(heur.max_multiplicity <= exact.max_multiplicity);
            }
        }
    }

    #[test]
    fn cap_multiplicity_is_rotation_invariant() {
        let pts = sample_uniform(3, 25, 2).unwrap();
        let ell = sample_uniform(3, 1, 99).unwrap().pop().unwrap();
        for seed in 0..5 {
            let q = random_rotation(3, seed);
            let rpts: Vec<Direction> = pts.iter().map(|p| rotate(&q, p)).collect();
            let rell = rotate(&q, &ell);
            for phi in [0.3, 0.9, 1.7] {
                assert_eq!(
                    cap_multiplicity(&pts, phi, &ell),
                    cap_multiplicity(&rpts, phi, &rell)
                );
                // angles themselves move by less than 1e-10 under rotation
                for (p, rp) in pts.iter().zip(&rpts) {
                    assert!((p.angle_to(&ell) - rp.angle_to(&rell)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn rotations_are_orthonormal() {
        for n in [2usize, 3, 4] {
            let q = random_rotation(n, 17);
            for i in 0..n {
                for j in 0..n {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((dot(&q[i], &q[j]) - expect).abs() < 1e-12);
                }
            }
        }
    }
}
