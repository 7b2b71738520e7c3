//! Runnable versions of the algorithmic steps in the removal argument:
//! greedy extraction of disjoint triangles, the high-degree pruning loop, and
//! random-subspace trials auditing the good-triangle claims.
//!
//! Degrees are tracked per role. The subspace claims are only asserted for
//! disjoint systems; use [`crate::constructions::lift_structure`] to check.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constructions::tensor_power_system;
use crate::error::{Error, Result};
use crate::exponents::{ExponentTable, PruneSchedule};
use crate::fpn::{rank, sample_subspace_containing, sample_subspace_with, GroupParams, Point, Seed};
use crate::triangles::{
    count_transform, degree_profile, MatchedTriples, Rational, Role, Triangle, TripleSystem,
};

fn ratio_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Pruning recomputes all degrees from scratch after this many removals.
pub const RECOUNT_INTERVAL: usize = 64;

/// Pairwise point-disjoint triangles taken in lexicographic `(x, y)` order
/// until none remain.
///
/// The output is maximal: deleting its points leaves no triangle. It is not
/// marked cross-free.
pub fn greedy_disjoint(sys: &TripleSystem) -> MatchedTriples {
    let g = *sys.params();
    let mut y_used = vec![false; g.order() as usize];
    let mut z_used = vec![false; g.order() as usize];
    let ys = sys.y().to_vec();
    let mut out = Vec::new();
    for x in sys.x().iter() {
        let hit = ys.iter().find_map(|&y| {
            let z = g.third(x, y);
            (!y_used[y.0 as usize] && !z_used[z.0 as usize] && sys.z().contains(z)).then_some((y, z))
        });
        if let Some((y, z)) = hit {
            y_used[y.0 as usize] = true;
            z_used[z.0 as usize] = true;
            out.push(Triangle { x, y, z });
        }
    }
    MatchedTriples::new(g, out).expect("greedy triangles sum to zero")
}

/// One removal made by [`prune_high_degree`].
#[derive(Debug, Clone, PartialEq)]
pub struct PruneStep {
    pub role: Role,
    pub point: Point,
    pub degree: u64,
    /// `g(δ') δ' N / ε` at the time of removal.
    pub threshold: f64,
    /// Triangle density after the removal.
    pub delta_after: Rational,
}

#[derive(Debug, Clone)]
pub struct PruneTrace {
    pub initial_delta: Rational,
    pub steps: Vec<PruneStep>,
    pub final_system: TripleSystem,
    /// Threshold in force when the loop stopped; `None` if no triangle remains.
    pub final_threshold: Option<f64>,
    pub final_max_degree: u64,
}

impl PruneTrace {
    pub fn removed(&self) -> usize {
        self.steps.len()
    }

    /// Whether at most `ε N / 2` points were removed.
    pub fn within_half_eps(&self, eps: &Rational) -> bool {
        let n = self.final_system.params().order() as u128;
        2 * self.steps.len() as u128 * eps.denom() <= eps.numer() * n
    }
}

fn prune_threshold(schedule: &PruneSchedule, total: u64, order: u64, eps: f64) -> f64 {
    let n = order as f64;
    let delta = total as f64 / (n * n);
    schedule.g(delta) * delta * n / eps
}

/// Repeatedly removes the highest-degree point while its degree is at least
/// `g(δ') δ' N / ε`, where `δ' N²` is the current triangle count.
///
/// Ties go to role `X` before `Y` before `Z`, then to the lowest index.
/// Degrees are updated incrementally and checked against a full recount every
/// [`RECOUNT_INTERVAL`] steps.
pub fn prune_high_degree(
    sys: &TripleSystem,
    eps: &Rational,
    schedule: &PruneSchedule,
) -> Result<PruneTrace> {
    if *eps.numer() == 0 {
        return Err(Error::Domain("eps must be positive".into()));
    }
    let eps_f = ratio_f64(eps);
    let g = *sys.params();
    let order = g.order();
    let n2 = order as u128 * order as u128;
    let stats = degree_profile(sys)?;
    let mut total = stats.total;
    let mut deg = [stats.deg_x, stats.deg_y, stats.deg_z];
    let mut cur = sys.clone();
    let mut steps = Vec::new();

    loop {
        if total == 0 {
            return Ok(PruneTrace {
                initial_delta: stats.delta,
                steps,
                final_system: cur,
                final_threshold: None,
                final_max_degree: 0,
            });
        }
        let threshold = prune_threshold(schedule, total, order, eps_f);
        let mut best: Option<(Role, Point, u64)> = None;
        for role in Role::ALL {
            for u in cur.set(role).iter() {
                let d = deg[role as usize][u.0 as usize];
                if best.is_none_or(|(_, _, b)| d > b) {
                    best = Some((role, u, d));
                }
            }
        }
        let (role, u, d) = best.expect("a triangle implies a nonempty set");
        if (d as f64) < threshold {
            return Ok(PruneTrace {
                initial_delta: stats.delta,
                steps,
                final_system: cur,
                final_threshold: Some(threshold),
                final_max_degree: d,
            });
        }
        remove_point(&mut cur, &mut deg, role, u);
        total -= d;
        steps.push(PruneStep {
            role,
            point: u,
            degree: d,
            threshold,
            delta_after: Rational::new(total as u128, n2),
        });
        if steps.len() % RECOUNT_INTERVAL == 0 {
            let check = degree_profile(&cur)?;
            if check.total != total || [check.deg_x, check.deg_y, check.deg_z] != deg {
                return Err(Error::Invariant(format!(
                    "incremental degrees diverged from recount after {} steps",
                    steps.len()
                )));
            }
        }
    }
}

/// Deletes `u` from `role` and subtracts its triangles from the partner degrees.
fn remove_point(sys: &mut TripleSystem, deg: &mut [Vec<u64>; 3], role: Role, u: Point) {
    let g = *sys.params();
    let (a, b) = match role {
        Role::X => (Role::Y, Role::Z),
        Role::Y => (Role::X, Role::Z),
        Role::Z => (Role::X, Role::Y),
    };
    let partners: Vec<(Point, Point)> = sys
        .set(a)
        .iter()
        .map(|v| (v, g.third(u, v)))
        .filter(|&(_, w)| sys.set(b).contains(w))
        .collect();
    for (v, w) in partners {
        deg[a as usize][v.0 as usize] -= 1;
        deg[b as usize][w.0 as usize] -= 1;
    }
    deg[role as usize][u.0 as usize] = 0;
    sys.set_mut(role).remove(u);
}

/// Aggregates of [`subspace_experiment`]; every mean averages exact per-trial counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceExperimentReport {
    pub d: u32,
    pub trials: u64,
    pub ambient_total: u64,
    pub delta: Rational,
    pub rho: Rational,
    /// `ρ p^d`; the good-triangle claim needs this at most `1/5`.
    pub rho_p_d: f64,
    pub total_restricted: u64,
    pub total_good: u64,
    pub mean_restricted_t: f64,
    /// `T (p^d - 1)(p^{d-1} - 1) / ((p^n - 1)(p^{n-1} - 1))`, exact in mean
    /// when every triangle spans a plane.
    pub expected_restricted_t: f64,
    pub mean_good_t: f64,
    pub good_t_std_error: f64,
    pub max_good_t: u64,
    /// `Σ good / Σ restricted`; zero when nothing survives.
    pub good_fraction_given_survival: f64,
    /// Ratio-estimator standard error of the fraction.
    pub good_fraction_std_error: f64,
    /// `δ / (125 p² ρ²)`.
    pub rhs: f64,
    /// `p^{(1 - c_p) d}`.
    pub capacity: f64,
    /// Trials whose good count exceeded `capacity`.
    pub capacity_violations: u64,
}

fn gaussian_ratio(p: u32, top: u32, bottom: u32) -> f64 {
    let pf = p as f64;
    (pf.powi(top as i32) - 1.0) / (pf.powi(bottom as i32) - 1.0)
}

/// Triangle and good-triangle counts of `sys` restricted to `span`.
fn trial_counts(sys: &TripleSystem, span: &[Point]) -> (u64, u64) {
    let g = sys.params();
    let xs: Vec<Point> = span.iter().copied().filter(|&u| sys.x().contains(u)).collect();
    let ys: Vec<Point> = span.iter().copied().filter(|&u| sys.y().contains(u)).collect();
    let mut tris = Vec::new();
    for &x in &xs {
        for &y in &ys {
            let z = g.third(x, y);
            if sys.z().contains(z) {
                tris.push((x, y, z));
            }
        }
    }
    let once = |mut keys: Vec<Point>| {
        keys.sort_unstable();
        move |k: Point| {
            let lo = keys.partition_point(|&v| v < k);
            keys.get(lo + 1) != Some(&k)
        }
    };
    let x_once = once(tris.iter().map(|t| t.0).collect());
    let y_once = once(tris.iter().map(|t| t.1).collect());
    let z_once = once(tris.iter().map(|t| t.2).collect());
    let good = tris.iter().filter(|t| x_once(t.0) && y_once(t.1) && z_once(t.2)).count();
    (tris.len() as u64, good as u64)
}

/// Per-trial `(restricted, good)` counts; trial `i` draws from stream `i` of
/// the master seed, so results do not depend on `threads`.
pub fn subspace_trial_counts(
    sys: &TripleSystem,
    d: u32,
    trials: u64,
    seed: Seed,
    threads: usize,
) -> Result<Vec<(u64, u64)>> {
    let g = *sys.params();
    if d < 2 || d > g.n() {
        return Err(Error::Dimension(format!("need 2 ≤ d ≤ n = {}, got d = {d}", g.n())));
    }
    let run = |range: std::ops::Range<u64>| -> Result<Vec<(u64, u64)>> {
        range
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                let basis = sample_subspace_with(&g, d, &mut rng)?;
                Ok(trial_counts(sys, &basis.span_points()))
            })
            .collect()
    };
    let threads = threads.max(1) as u64;
    if threads == 1 || trials < 2 {
        return run(0..trials);
    }
    let chunk = trials.div_ceil(threads);
    let parts: Vec<Result<Vec<(u64, u64)>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let lo = (t * chunk).min(trials);
                let hi = ((t + 1) * chunk).min(trials);
                s.spawn(move || run(lo..hi))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("trial worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(trials as usize);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// Samples `trials` uniform `d`-dimensional subspaces `U` and counts the
/// triangles and good triangles of `(X ∩ U, Y ∩ U, Z ∩ U)`.
///
/// A triangle is good if none of its points lies in another restricted
/// triangle.
pub fn subspace_experiment(
    sys: &TripleSystem,
    d: u32,
    trials: u64,
    seed: Seed,
    threads: usize,
) -> Result<SubspaceExperimentReport> {
    if trials == 0 {
        return Err(Error::Precondition("at least one trial is required".into()));
    }
    let g = *sys.params();
    let counts = subspace_trial_counts(sys, d, trials, seed, threads)?;
    let stats = degree_profile(sys)?;
    if let Some(&(r, _)) = counts.iter().find(|&&(r, _)| r > stats.total) {
        return Err(Error::Invariant(format!(
            "restricted count {r} exceeds ambient count {}",
            stats.total
        )));
    }
    let table = ExponentTable::for_prime(g.p())?;
    let pf = g.p() as f64;
    let delta = ratio_f64(&stats.delta);
    let rho = ratio_f64(&stats.rho);
    let capacity = pf.powf((1.0 - table.c_p) * d as f64);

    let t = trials as f64;
    let total_restricted: u64 = counts.iter().map(|c| c.0).sum();
    let total_good: u64 = counts.iter().map(|c| c.1).sum();
    let mean_r = total_restricted as f64 / t;
    let mean_g = total_good as f64 / t;
    let var_g = if trials > 1 {
        counts.iter().map(|c| (c.1 as f64 - mean_g).powi(2)).sum::<f64>() / (t - 1.0)
    } else {
        0.0
    };
    let (fraction, fraction_se) = if total_restricted == 0 {
        (0.0, 0.0)
    } else {
        let f = total_good as f64 / total_restricted as f64;
        let resid: f64 = counts.iter().map(|c| (c.1 as f64 - f * c.0 as f64).powi(2)).sum();
        let se = if trials > 1 {
            (resid / (t * (t - 1.0))).sqrt() / mean_r
        } else {
            0.0
        };
        (f, se)
    };
    let n = g.n();
    let survival = if n >= 2 {
        gaussian_ratio(g.p(), d, n) * gaussian_ratio(g.p(), d - 1, n - 1)
    } else {
        1.0
    };
    Ok(SubspaceExperimentReport {
        d,
        trials,
        ambient_total: stats.total,
        delta: stats.delta,
        rho: stats.rho,
        rho_p_d: rho * pf.powi(d as i32),
        total_restricted,
        total_good,
        mean_restricted_t: mean_r,
        expected_restricted_t: stats.total as f64 * survival,
        mean_good_t: mean_g,
        good_t_std_error: (var_g / t).sqrt(),
        max_good_t: counts.iter().map(|c| c.1).max().unwrap_or(0),
        good_fraction_given_survival: fraction,
        good_fraction_std_error: fraction_se,
        rhs: if rho > 0.0 { delta / (125.0 * pf * pf * rho * rho) } else { 0.0 },
        capacity,
        capacity_violations: counts.iter().filter(|c| c.1 as f64 > capacity).count() as u64,
    })
}

/// Monte Carlo estimate of a membership probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipReport {
    pub trials: u64,
    pub hits: u64,
    pub frequency: f64,
    pub expected: f64,
    /// Binomial standard error at the expected probability.
    pub std_error: f64,
}

impl MembershipReport {
    fn new(trials: u64, hits: u64, expected: f64) -> Self {
        MembershipReport {
            trials,
            hits,
            frequency: hits as f64 / trials as f64,
            expected,
            std_error: (expected * (1.0 - expected) / trials as f64).sqrt(),
        }
    }

    pub fn within_sigmas(&self, k: f64) -> bool {
        (self.frequency - self.expected).abs() <= k * self.std_error
    }
}

fn in_span(params: &GroupParams, basis: &[Point], u: Point) -> bool {
    let mut rows = basis.to_vec();
    rows.push(u);
    rank(params, &rows) == basis.len()
}

/// Frequency of `target ∈ U` over uniform `d`-dimensional `U`; the exact
/// probability for nonzero `target` is `(p^d - 1)/(p^n - 1)`.
pub fn membership_experiment(
    params: &GroupParams,
    d: u32,
    target: Point,
    trials: u64,
    seed: Seed,
) -> Result<MembershipReport> {
    params.check(target)?;
    if target.is_zero() || trials == 0 {
        return Err(Error::Precondition("need a nonzero target and at least one trial".into()));
    }
    let mut hits = 0;
    for i in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let basis = sample_subspace_with(params, d, &mut rng)?;
        hits += in_span(params, basis.basis(), target) as u64;
    }
    Ok(MembershipReport::new(trials, hits, gaussian_ratio(params.p(), d, params.n())))
}

/// Frequency of `target ∈ U` over uniform `d`-dimensional `U` containing the
/// independent pair `fixed`; the exact probability for `target` outside
/// their span is `(p^{d-2} - 1)/(p^{n-2} - 1)`.
pub fn conditional_membership_experiment(
    params: &GroupParams,
    d: u32,
    fixed: (Point, Point),
    target: Point,
    trials: u64,
    seed: Seed,
) -> Result<MembershipReport> {
    for u in [fixed.0, fixed.1, target] {
        params.check(u)?;
    }
    if d < 2 || params.n() < 3 {
        return Err(Error::Dimension("conditional membership needs d ≥ 2 and n ≥ 3".into()));
    }
    if rank(params, &[fixed.0, fixed.1, target]) != 3 || trials == 0 {
        return Err(Error::Precondition(
            "target must lie outside the plane of two independent vectors".into(),
        ));
    }
    let mut hits = 0;
    for i in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let basis = sample_subspace_containing(params, d, &[fixed.0, fixed.1], &mut rng)?;
        hits += in_span(params, basis.basis(), target) as u64;
    }
    let expected = gaussian_ratio(params.p(), d - 2, params.n() - 2);
    Ok(MembershipReport::new(trials, hits, expected))
}

/// The dimension `d = ⌊log(1/(5ρ)) / log p⌋`, so that `1/(5p) < ρ p^d ≤ 1/5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimensionChoice {
    pub d: u32,
    /// The argument expects `d ≥ 3`.
    pub below_three: bool,
}

pub fn choose_dimension(p: u32, rho: f64) -> Result<DimensionChoice> {
    if !(rho > 0.0 && rho <= 0.2) {
        return Err(Error::Domain(format!("need 0 < ρ ≤ 1/5, got {rho}")));
    }
    let pf = p as f64;
    let mut d = ((1.0 / (5.0 * rho)).ln() / pf.ln()).floor().max(0.0) as u32;
    // Guard the floor against rounding at exact powers of p.
    while rho * pf.powi(d as i32 + 1) <= 0.2 {
        d += 1;
    }
    while d > 0 && rho * pf.powi(d as i32) > 0.2 {
        d -= 1;
    }
    Ok(DimensionChoice {
        d,
        below_three: d < 3,
    })
}

/// Triangle counts of the tensor powers `k = 1..=k_max`, checked against
/// `count_1^k`.
pub fn amplification_audit(sys: &TripleSystem, k_max: u32) -> Result<Vec<(u32, u64)>> {
    let mut rows = Vec::new();
    let mut base = None;
    for k in 1..=k_max {
        let count = count_transform(&tensor_power_system(sys, k)?)?;
        let c1: u64 = *base.get_or_insert(count);
        let want = c1.checked_pow(k).ok_or_else(|| {
            Error::capacity(format!("{c1}^{k} overflows 64 bits"), None)
        })?;
        if count != want {
            return Err(Error::Invariant(format!(
                "power {k} has {count} triangles, expected {want}"
            )));
        }
        rows.push((k, count));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::lift_system;
    use crate::exponents::build_prune_schedule;
    use crate::triangles::{count_naive, good_triangles};
    use rand::Rng;

    fn random_system(p: u32, n: u32, density: f64, seed: u64) -> TripleSystem {
        let g = GroupParams::new(p, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pick = || -> Vec<u64> {
            (0..g.order()).filter(|_| rng.gen_bool(density)).collect()
        };
        let (x, y, z) = (pick(), pick(), pick());
        TripleSystem::from_indices(g, &x, &y, &z).unwrap()
    }

    fn deletion(m: &MatchedTriples) -> Vec<(Role, Point)> {
        m.triples()
            .iter()
            .flat_map(|t| [(Role::X, t.x), (Role::Y, t.y), (Role::Z, t.z)])
            .collect()
    }

    #[test]
    fn greedy_trivial_cases() {
        let g = GroupParams::new(2, 2).unwrap();
        let one = TripleSystem::from_indices(g, &[1], &[2], &[3]).unwrap();
        let m = greedy_disjoint(&one);
        assert_eq!(m.len(), 1);
        assert_eq!(m.triples()[0], Triangle { x: Point(1), y: Point(2), z: Point(3) });
        let empty = TripleSystem::from_indices(g, &[], &[0, 1], &[2]).unwrap();
        assert!(greedy_disjoint(&empty).is_empty());
    }

    #[test]
    fn greedy_is_maximal_and_deterministic() {
        for seed in 0..40 {
            let sys = random_system(3, 3, 0.4, seed);
            let m = greedy_disjoint(&sys);
            assert!(!m.is_cross_free());
            assert_eq!(count_naive(&sys.without(&deletion(&m))), 0);
            let mut seen = std::collections::HashSet::new();
            for (role, u) in deletion(&m) {
                assert!(seen.insert((role, u)));
            }
            for _ in 0..10 {
                assert_eq!(greedy_disjoint(&sys), m);
            }
        }
    }

    #[test]
    fn prune_below_threshold_is_noop() {
        let sched = build_prune_schedule(2).unwrap();
        let sys = random_system(2, 5, 0.3, 7);
        let trace = prune_high_degree(&sys, &Rational::new(1, 1_000_000), &sched).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.final_system, sys);
        let err = prune_high_degree(&sys, &Rational::new(0, 1), &sched).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn prune_star_removes_centre_first() {
        // x0 = 0 meets all 512 points of Y with lowest digit 1, and Z = -Y.
        let g = GroupParams::new(2, 10).unwrap();
        let ys: Vec<u64> = (0..1024).filter(|i| i & 1 == 1).collect();
        let sys = TripleSystem::from_indices(g, &[0], &ys, &ys).unwrap();
        assert_eq!(count_naive(&sys), 512);
        let sched = build_prune_schedule(2).unwrap();
        let trace = prune_high_degree(&sys, &Rational::new(1, 4), &sched).unwrap();
        let first = &trace.steps[0];
        assert_eq!((first.role, first.point, first.degree), (Role::X, Point(0), 512));
        // g(δ') T / (ε N) with T = 512, N = 1024, δ' = 1/2048: 11² · 512 · 4 / 1024.
        assert!((first.threshold - 242.0).abs() < 1e-9);
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.final_threshold, None);
    }

    #[test]
    fn prune_trace_invariants() {
        let sched = build_prune_schedule(3).unwrap();
        for seed in 0..12 {
            let sys = random_system(3, 4, 0.5, seed);
            for eps in [Rational::new(1, 2), Rational::new(4, 1), Rational::new(1_000, 1)] {
                let trace = prune_high_degree(&sys, &eps, &sched).unwrap();
                let mut prev = trace.initial_delta;
                for step in &trace.steps {
                    assert!(step.delta_after < prev);
                    assert!(step.degree as f64 >= step.threshold);
                    prev = step.delta_after;
                }
                assert!(trace.removed() <= sys.total_points());
                let fin = degree_profile(&trace.final_system).unwrap();
                assert_eq!(fin.max_degree, trace.final_max_degree);
                if let Some(t) = trace.final_threshold {
                    assert!((fin.max_degree as f64) < t);
                }
                let deleted: Vec<_> = trace.steps.iter().map(|s| (s.role, s.point)).collect();
                assert_eq!(sys.without(&deleted), trace.final_system);
            }
        }
    }

    #[test]
    fn prune_ties_prefer_role_then_index() {
        // Every point of X = Y = Z = F_2^2 has degree 4.
        let g = GroupParams::new(2, 2).unwrap();
        let all = [0, 1, 2, 3];
        let sys = TripleSystem::from_indices(g, &all, &all, &all).unwrap();
        let sched = build_prune_schedule(2).unwrap();
        let trace = prune_high_degree(&sys, &Rational::new(1_000, 1), &sched).unwrap();
        assert_eq!((trace.steps[0].role, trace.steps[0].point), (Role::X, Point(0)));
        assert_eq!(count_naive(&trace.final_system), 0);
    }

    #[test]
    fn prune_checksum_runs_on_long_traces() {
        let sys = TripleSystem::full(GroupParams::new(2, 7).unwrap()).unwrap();
        let sched = build_prune_schedule(2).unwrap();
        let trace = prune_high_degree(&sys, &Rational::new(1_000_000, 1), &sched).unwrap();
        assert!(trace.removed() > RECOUNT_INTERVAL);
        assert_eq!(trace.final_threshold, None);
        assert_eq!(count_naive(&trace.final_system), 0);
    }

    #[test]
    fn subspace_full_dimension_is_exact() {
        let sys = random_system(2, 4, 0.4, 3);
        let good = good_triangles(&sys).unwrap().len() as u64;
        let r = subspace_experiment(&sys, 4, 20, 9, 1).unwrap();
        assert_eq!(r.total_restricted, 20 * count_naive(&sys));
        assert_eq!(r.total_good, 20 * good);
        assert_eq!(r.max_good_t, good);
    }

    #[test]
    fn subspace_errors_and_thread_independence() {
        let sys = random_system(2, 5, 0.3, 5);
        assert!(matches!(subspace_experiment(&sys, 1, 10, 0, 1), Err(Error::Dimension(_))));
        assert!(matches!(subspace_experiment(&sys, 6, 10, 0, 1), Err(Error::Dimension(_))));
        let a = subspace_trial_counts(&sys, 3, 101, 42, 1).unwrap();
        let b = subspace_trial_counts(&sys, 3, 101, 42, 4).unwrap();
        assert_eq!(a, b);
        let total = count_naive(&sys);
        assert!(a.iter().all(|&(r, g)| g <= r && r <= total));
    }

    #[test]
    fn restricted_good_counts_match_dense_path() {
        let sys = random_system(3, 3, 0.5, 11);
        let g = *sys.params();
        for i in 0..30 {
            let mut rng = ChaCha8Rng::seed_from_u64(i);
            let basis = sample_subspace_with(&g, 2, &mut rng).unwrap();
            let restricted = crate::triangles::restrict_to_subspace(&sys, &basis).unwrap();
            let want = (
                count_naive(&restricted),
                good_triangles(&restricted).unwrap().len() as u64,
            );
            assert_eq!(trial_counts(&sys, &basis.span_points()), want);
        }
    }

    #[test]
    fn membership_three_sevenths() {
        let g = GroupParams::new(2, 3).unwrap();
        let r = membership_experiment(&g, 2, Point(5), 20_000, 1).unwrap();
        assert!((r.expected - 3.0 / 7.0).abs() < 1e-15);
        assert!(r.within_sigmas(4.0), "{r:?}");
    }

    #[test]
    fn conditional_membership_matches_formula() {
        let g = GroupParams::new(2, 5).unwrap();
        let r = conditional_membership_experiment(&g, 3, (Point(1), Point(2)), Point(4), 20_000, 2)
            .unwrap();
        assert!((r.expected - 1.0 / 7.0).abs() < 1e-15);
        assert!(r.within_sigmas(4.0), "{r:?}");
        let bad = conditional_membership_experiment(&g, 3, (Point(1), Point(2)), Point(3), 10, 0);
        assert!(matches!(bad, Err(Error::Precondition(_))));
    }

    #[test]
    fn dimension_brackets_rho() {
        for p in [2u32, 3, 5] {
            for rho in [1e-2, 3e-3, 1e-4, 0.2, 0.05] {
                let c = choose_dimension(p, rho).unwrap();
                let v = rho * (p as f64).powi(c.d as i32);
                assert!(v <= 0.2 && v > 0.2 / p as f64, "p={p} rho={rho} d={}", c.d);
                assert_eq!(c.below_three, c.d < 3);
            }
        }
        assert!(choose_dimension(2, 0.3).is_err());
    }

    #[test]
    fn amplification_examples() {
        let g = GroupParams::new(2, 2).unwrap();
        let none = TripleSystem::from_indices(g, &[1], &[1], &[1]).unwrap();
        assert_eq!(amplification_audit(&none, 3).unwrap(), vec![(1, 0), (2, 0), (3, 0)]);
        let one = TripleSystem::from_indices(g, &[1], &[2], &[3]).unwrap();
        assert_eq!(amplification_audit(&one, 3).unwrap(), vec![(1, 1), (2, 1), (3, 1)]);
        let three = TripleSystem::from_indices(g, &[1, 2, 3], &[2], &[0, 1, 3]).unwrap();
        assert_eq!(count_naive(&three), 3);
        let rows = amplification_audit(&three, 3).unwrap();
        assert_eq!(rows[2], (3, 27));
        assert_eq!(count_naive(&tensor_power_system(&three, 3).unwrap()), 27);
    }

    #[test]
    fn lifted_instances_satisfy_good_fraction_claim() {
        // Sparse random sets lifted to F_2^10: pairwise independent, disjoint,
        // one triangle per plane, with ρ p^3 ≤ 1/5.
        let sys = lift_system(&random_system(2, 8, 0.03, 17)).unwrap();
        let report = crate::constructions::lift_structure(&sys).unwrap();
        assert!(report.holds());
        let r = subspace_experiment(&sys, 3, 4_000, 5, 2).unwrap();
        assert!(r.rho_p_d <= 0.2, "{r:?}");
        assert_eq!(r.capacity_violations, 0);
        if r.total_restricted > 0 {
            let floor = 0.4 - 3.0 * r.good_fraction_std_error;
            assert!(r.good_fraction_given_survival >= floor, "{r:?}");
        }
    }
}
