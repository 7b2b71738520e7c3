//! Exact ground truth at tiny scale: minimum deletion numbers, maximum
//! cross-free collections, and the removal-bound audit built on them.
//!
//! Searches are single-threaded and deterministic. Results carry an
//! [`OracleStatus`]; only [`OracleStatus::Exact`] results are optimal.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::exponents::{sumfree_cap, ExponentTable};
use crate::fpn::{GroupParams, Point};
use crate::procedures::greedy_disjoint;
use crate::triangles::{
    count_naive, list_triangles, MatchedTriples, Role, Triangle, TripleSystem,
    DEFAULT_LIST_CAP,
};

/// Largest group order accepted by [`max_matched_exact`].
pub const MAX_MATCHED_ORDER: u64 = 64;

/// Largest number of distinct triangle vertices [`min_deletion_exact`] handles.
pub const MAX_HITTING_VERTICES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleBudget {
    pub max_nodes: u64,
    pub max_seconds: f64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_nodes: 100_000_000,
            max_seconds: 600.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleStatus {
    Exact,
    BudgetExhausted,
}

impl OracleStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleStatus::Exact => "exact",
            OracleStatus::BudgetExhausted => "budget-exhausted",
        }
    }
}

struct Meter {
    budget: OracleBudget,
    start: Instant,
    nodes: u64,
    exhausted: bool,
}

impl Meter {
    fn new(budget: OracleBudget) -> Self {
        Meter {
            budget,
            start: Instant::now(),
            nodes: 0,
            exhausted: false,
        }
    }

    /// Counts a node; false once the budget is spent.
    fn tick(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes
            || (self.nodes.is_multiple_of(4096)
                && self.start.elapsed().as_secs_f64() > self.budget.max_seconds)
        {
            self.exhausted = true;
        }
        !self.exhausted
    }

    fn status(&self) -> OracleStatus {
        if self.exhausted {
            OracleStatus::BudgetExhausted
        } else {
            OracleStatus::Exact
        }
    }
}

/// Fixed-width vertex set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
struct Bits([u64; 4]);

impl Bits {
    fn single(i: usize) -> Self {
        let mut b = Bits::default();
        b.0[i / 64] |= 1 << (i % 64);
        b
    }

    fn has(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    fn or(self, o: Bits) -> Bits {
        Bits(std::array::from_fn(|i| self.0[i] | o.0[i]))
    }

    fn minus(self, o: Bits) -> Bits {
        Bits(std::array::from_fn(|i| self.0[i] & !o.0[i]))
    }

    fn meets(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).any(|(a, b)| a & b != 0)
    }

    fn iter(self) -> impl Iterator<Item = usize> {
        (0..4).flat_map(move |w| {
            let word = self.0[w];
            (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }
}

/// Result of [`min_deletion_exact`].
#[derive(Debug, Clone, PartialEq)]
pub struct MinDeletion {
    pub status: OracleStatus,
    /// Size of the best deletion set found; the minimum when exact.
    pub value: usize,
    /// Proven lower bound; equals `value` when exact.
    pub lower_bound: usize,
    pub deletion: Vec<(Role, Point)>,
    pub triangles: usize,
    pub nodes: u64,
}

/// Disjoint-edge packing size, a lower bound on any hitting set.
fn packing_bound(edges: &[Bits]) -> usize {
    let mut order: Vec<&Bits> = edges.iter().collect();
    order.sort_by_key(|e| e.count());
    let mut used = Bits::default();
    let mut k = 0;
    for e in order {
        if !e.meets(&used) {
            used = used.or(*e);
            k += 1;
        }
    }
    k
}

/// Repeatedly takes the vertex in the most remaining edges.
fn greedy_cover(edges: &[Bits], vertices: usize) -> Vec<usize> {
    let mut left: Vec<Bits> = edges.to_vec();
    let mut chosen = Vec::new();
    while !left.is_empty() {
        let mut deg = vec![0usize; vertices];
        for e in &left {
            for v in e.iter() {
                deg[v] += 1;
            }
        }
        let v = (0..vertices).max_by_key(|&v| (deg[v], std::cmp::Reverse(v))).unwrap();
        chosen.push(v);
        left.retain(|e| !e.has(v));
    }
    chosen
}

struct HittingSearch {
    meter: Meter,
    best: Vec<usize>,
    chosen: Vec<usize>,
}

impl HittingSearch {
    /// `edges` are the uncovered triangles restricted to undecided vertices.
    fn solve(&mut self, edges: Vec<Bits>) {
        if !self.meter.tick() {
            return;
        }
        if edges.is_empty() {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        }
        if self.chosen.len() + packing_bound(&edges) >= self.best.len() {
            return;
        }
        let pivot = *edges.iter().min_by_key(|e| e.count()).unwrap();
        let mut excluded = Bits::default();
        let mut branch: Vec<usize> = pivot.iter().collect();
        branch.sort_by_key(|&v| std::cmp::Reverse(edges.iter().filter(|e| e.has(v)).count()));
        for v in branch {
            let mut next = Vec::with_capacity(edges.len());
            let mut feasible = true;
            for e in edges.iter().filter(|e| !e.has(v)) {
                let shrunk = e.minus(excluded);
                if shrunk.count() == 0 {
                    feasible = false;
                    break;
                }
                next.push(shrunk);
            }
            if feasible {
                next.sort_unstable();
                next.dedup();
                self.chosen.push(v);
                self.solve(next);
                self.chosen.pop();
                if self.meter.exhausted {
                    return;
                }
            }
            excluded = excluded.or(Bits::single(v));
        }
    }
}

/// Minimum number of points to delete from `X`, `Y` and `Z` (per role) so
/// that no triangle remains.
///
/// Branch and bound on the triangle hypergraph: branch on the vertices of a
/// smallest remaining edge, bound by a greedy packing of disjoint edges,
/// start from a greedy cover.
pub fn min_deletion_exact(sys: &TripleSystem, budget: OracleBudget) -> Result<MinDeletion> {
    let triangles = list_triangles(sys, DEFAULT_LIST_CAP)?;
    let mut vertices: Vec<(Role, Point)> = triangles
        .iter()
        .flat_map(|t| [(Role::X, t.x), (Role::Y, t.y), (Role::Z, t.z)])
        .collect();
    vertices.sort_unstable_by_key(|&(r, u)| (r as u8, u));
    vertices.dedup();
    if vertices.len() > MAX_HITTING_VERTICES {
        return Err(Error::capacity(
            format!(
                "{} triangle vertices exceed the exact-search limit {MAX_HITTING_VERTICES}",
                vertices.len()
            ),
            Some(vertices.len() as u128),
        ));
    }
    let id = |r: Role, u: Point| {
        vertices
            .binary_search_by_key(&(r as u8, u), |&(rr, uu)| (rr as u8, uu))
            .unwrap()
    };
    let mut edges: Vec<Bits> = triangles
        .iter()
        .map(|t| {
            Bits::single(id(Role::X, t.x))
                .or(Bits::single(id(Role::Y, t.y)))
                .or(Bits::single(id(Role::Z, t.z)))
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();

    let mut search = HittingSearch {
        meter: Meter::new(budget),
        best: greedy_cover(&edges, vertices.len()),
        chosen: Vec::new(),
    };
    let root_bound = packing_bound(&edges);
    search.solve(edges);
    let status = search.meter.status();
    let value = search.best.len();
    let mut deletion: Vec<(Role, Point)> = search.best.iter().map(|&v| vertices[v]).collect();
    deletion.sort_unstable_by_key(|&(r, u)| (r as u8, u));
    Ok(MinDeletion {
        status,
        value,
        lower_bound: if status == OracleStatus::Exact { value } else { root_bound },
        deletion,
        triangles: triangles.len(),
        nodes: search.meter.nodes,
    })
}

/// Result of [`max_matched_exact`].
#[derive(Debug, Clone, PartialEq)]
pub struct MaxMatched {
    pub status: OracleStatus,
    pub best: MatchedTriples,
    /// `⌊p^{(1 - c_p) n}⌋`, used for pruning when enabled.
    pub cap: u64,
    pub used_cap: bool,
    pub nodes: u64,
}

struct MatchedSearch {
    g: GroupParams,
    meter: Meter,
    /// Point counts forbidden for the next triple's `x`, `y`, `z`.
    fx: Vec<u32>,
    fy: Vec<u32>,
    fz: Vec<u32>,
    cur: Vec<Triangle>,
    best: Vec<Triangle>,
    stop_at: Option<usize>,
}

impl MatchedSearch {
    fn admissible(&self, x: Point, y: Point) -> Option<Triangle> {
        let z = self.g.third(x, y);
        (self.fx[x.0 as usize] == 0 && self.fy[y.0 as usize] == 0 && self.fz[z.0 as usize] == 0)
            .then_some(Triangle { x, y, z })
    }

    /// Adds (`delta = 1`) or removes (`delta = -1`) the constraints of `t`
    /// against itself and every triple in `cur`.
    fn constrain(&mut self, t: Triangle, add: bool) {
        let g = self.g;
        let bump = |v: &mut Vec<u32>, u: Point| {
            let slot = &mut v[u.0 as usize];
            if add {
                *slot += 1;
            } else {
                *slot -= 1;
            }
        };
        bump(&mut self.fx, t.x);
        bump(&mut self.fy, t.y);
        bump(&mut self.fz, t.z);
        for s in &self.cur {
            bump(&mut self.fx, g.third(t.y, s.z));
            bump(&mut self.fx, g.third(s.y, t.z));
            bump(&mut self.fy, g.third(t.x, s.z));
            bump(&mut self.fy, g.third(s.x, t.z));
            bump(&mut self.fz, g.third(t.x, s.y));
            bump(&mut self.fz, g.third(s.x, t.y));
        }
    }

    fn push(&mut self, t: Triangle) {
        self.constrain(t, true);
        self.cur.push(t);
    }

    fn pop(&mut self) {
        let t = self.cur.pop().unwrap();
        self.constrain(t, false);
    }

    fn done(&self) -> bool {
        self.meter.exhausted || self.stop_at.is_some_and(|s| self.best.len() >= s)
    }

    fn record(&mut self) {
        if self.cur.len() > self.best.len() {
            self.best = self.cur.clone();
        }
    }

    /// Extends `cur` with triples whose `x` exceeds `last_x`.
    fn extend(&mut self, last_x: u64) {
        if !self.meter.tick() {
            return;
        }
        self.record();
        if self.done() {
            return;
        }
        let order = self.g.order();
        let free = |v: &Vec<u32>| v.iter().filter(|&&c| c == 0).count();
        let free_x = (last_x + 1..order).filter(|&x| self.fx[x as usize] == 0).count();
        let bound = free_x.min(free(&self.fy)).min(free(&self.fz));
        if self.cur.len() + bound <= self.best.len() {
            return;
        }
        for x in last_x + 1..order {
            if self.fx[x as usize] != 0 {
                continue;
            }
            for y in 0..order {
                if let Some(t) = self.admissible(Point(x), Point(y)) {
                    self.push(t);
                    self.extend(x);
                    self.pop();
                    if self.done() {
                        return;
                    }
                }
            }
        }
    }
}

/// A maximum collection `(x_i, y_i, z_i)` in `F_p^n` with `x_i + y_j + z_k = 0`
/// iff `i = j = k`.
///
/// Translation and `GL_n` symmetry fix the first triple at `(0, 0, 0)` and the
/// second at `x = e_1` with `y ∈ {e_2} ∪ F_p^× e_1`; further triples are added in
/// increasing `x`. With `use_cap` the search stops as soon as it reaches
/// `⌊p^{(1 - c_p) n}⌋`.
pub fn max_matched_exact(p: u32, n: u32, budget: OracleBudget, use_cap: bool) -> Result<MaxMatched> {
    let g = GroupParams::new(p, n)?;
    if g.order() > MAX_MATCHED_ORDER {
        return Err(Error::capacity(
            format!("exact search needs p^n ≤ {MAX_MATCHED_ORDER}, got {}", g.order()),
            Some(g.order() as u128),
        ));
    }
    let cap = sumfree_cap(p, n)?;
    let origin = Triangle {
        x: Point::ZERO,
        y: Point::ZERO,
        z: Point::ZERO,
    };
    let order = g.order() as usize;
    let mut search = MatchedSearch {
        g,
        meter: Meter::new(budget),
        fx: vec![0; order],
        fy: vec![0; order],
        fz: vec![0; order],
        cur: Vec::new(),
        best: vec![origin],
        stop_at: use_cap.then_some(cap as usize),
    };
    if n >= 1 && !search.done() {
        search.push(origin);
        let e1 = Point(1);
        let mut seconds: Vec<Point> = (1..p - 1).map(|c| g.scale(c, e1)).collect();
        if n >= 2 {
            seconds.insert(0, Point(p as u64));
        }
        for y in seconds {
            if let Some(t) = search.admissible(e1, y) {
                search.push(t);
                search.extend(0);
                search.pop();
                if search.done() {
                    break;
                }
            }
        }
    }
    let best = MatchedTriples::new(g, search.best)?.verified();
    if !best.is_cross_free() {
        return Err(Error::Invariant("search produced a collection that is not cross-free".into()));
    }
    Ok(MaxMatched {
        status: search.meter.status(),
        best,
        cap,
        used_cap: use_cap,
        nodes: search.meter.nodes,
    })
}

/// Outcome of checking `T ≥ (mdel / (3N))^{C_p} N²` on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RemovalAudit {
    pub triangles: u64,
    pub order: u64,
    pub min_deletion: Option<usize>,
    pub greedy: usize,
    pub rhs: Option<f64>,
    /// `None` when the audit was skipped.
    pub holds: Option<bool>,
    pub skipped: Option<String>,
}

/// Audits the removal bound at `ε = mdel / N`: an instance that needs `mdel`
/// deletions must have at least `(mdel / (3N))^{C_p} N²` triangles.
pub fn theorem1_audit(sys: &TripleSystem, budget: OracleBudget) -> Result<RemovalAudit> {
    let g = sys.params();
    let big_c = ExponentTable::for_prime(g.p())?.big_c_p;
    let triangles = count_naive(sys);
    let greedy = greedy_disjoint(sys).len();
    let order = g.order();
    let md = min_deletion_exact(sys, budget)?;
    if md.status != OracleStatus::Exact {
        return Ok(RemovalAudit {
            triangles,
            order,
            min_deletion: None,
            greedy,
            rhs: None,
            holds: None,
            skipped: Some(format!("oracle budget exhausted after {} nodes", md.nodes)),
        });
    }
    let n = order as f64;
    let rhs = if md.value == 0 {
        0.0
    } else {
        (md.value as f64 / (3.0 * n)).powf(big_c) * n * n
    };
    Ok(RemovalAudit {
        triangles,
        order,
        min_deletion: Some(md.value),
        greedy,
        rhs: Some(rhs),
        holds: Some(triangles as f64 >= rhs),
        skipped: None,
    })
}

/// `s ≤ mdel ≤ 3s` for the greedy matching size `s`.
pub fn sandwich_holds(greedy: usize, min_deletion: usize) -> bool {
    greedy <= min_deletion && min_deletion <= 3 * greedy
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::product_blowup;
    use crate::triangles::verify_matching;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn exact(sys: &TripleSystem) -> MinDeletion {
        let md = min_deletion_exact(sys, OracleBudget::default()).unwrap();
        assert_eq!(md.status, OracleStatus::Exact);
        md
    }

    /// Smallest deletion size by trying every subset of triangle vertices.
    fn brute_min_deletion(sys: &TripleSystem) -> usize {
        let tris = list_triangles(sys, 1_000).unwrap();
        let mut verts: Vec<(Role, Point)> = tris
            .iter()
            .flat_map(|t| [(Role::X, t.x), (Role::Y, t.y), (Role::Z, t.z)])
            .collect();
        verts.sort_unstable_by_key(|&(r, u)| (r as u8, u));
        verts.dedup();
        assert!(verts.len() <= 20);
        (0u32..1 << verts.len())
            .filter(|mask| {
                let del: Vec<_> = (0..verts.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| verts[i])
                    .collect();
                count_naive(&sys.without(&del)) == 0
            })
            .map(|mask| mask.count_ones() as usize)
            .min()
            .unwrap()
    }

    fn random_system(p: u32, n: u32, density: f64, seed: u64) -> TripleSystem {
        let g = GroupParams::new(p, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pick = || -> Vec<u64> { (0..g.order()).filter(|_| rng.gen_bool(density)).collect() };
        let (x, y, z) = (pick(), pick(), pick());
        TripleSystem::from_indices(g, &x, &y, &z).unwrap()
    }

    #[test]
    fn min_deletion_examples() {
        let g1 = GroupParams::new(2, 1).unwrap();
        let single = TripleSystem::from_indices(g1, &[1], &[1], &[0]).unwrap();
        assert_eq!(exact(&single).value, 1);
        let full = TripleSystem::full(g1).unwrap();
        assert_eq!(count_naive(&full), 4);
        assert_eq!(exact(&full).value, 2);
        let base = MatchedTriples::new(g1, vec![Triangle { x: Point(0), y: Point(0), z: Point(0) }])
            .unwrap()
            .verified();
        let blow = product_blowup(&base, 1).unwrap();
        assert_eq!(exact(blow.system.as_ref().unwrap()).value, 2);
        let empty = TripleSystem::from_indices(g1, &[], &[], &[]).unwrap();
        assert_eq!(exact(&empty).value, 0);
    }

    #[test]
    fn min_deletion_matches_brute_force() {
        let mut checked = 0;
        for seed in 0..200 {
            let sys = random_system(2, 3, 0.45, seed);
            let md = exact(&sys);
            let verts: std::collections::HashSet<_> = list_triangles(&sys, 1_000)
                .unwrap()
                .iter()
                .flat_map(|t| [(Role::X, t.x), (Role::Y, t.y), (Role::Z, t.z)])
                .collect();
            if verts.len() <= 16 {
                assert_eq!(md.value, brute_min_deletion(&sys), "seed {seed}");
                checked += 1;
            }
            assert_eq!(count_naive(&sys.without(&md.deletion)), 0);
            assert!(sandwich_holds(greedy_disjoint(&sys).len(), md.value));
        }
        assert!(checked > 50);
    }

    #[test]
    fn min_deletion_is_deterministic_and_budgeted() {
        let sys = random_system(2, 5, 0.6, 3);
        let a = exact(&sys);
        assert_eq!(a, exact(&sys));
        let tiny = OracleBudget { max_nodes: 3, max_seconds: 10.0 };
        let b = min_deletion_exact(&sys, tiny).unwrap();
        assert_eq!(b.status, OracleStatus::BudgetExhausted);
        assert!(b.lower_bound <= a.value && a.value <= b.value);
        assert_eq!(count_naive(&sys.without(&b.deletion)), 0);
    }

    #[test]
    fn max_matched_small_values() {
        let budget = OracleBudget::default();
        for (n, want) in [(0, 1), (1, 1), (2, 2), (3, 2)] {
            for use_cap in [true, false] {
                let r = max_matched_exact(2, n, budget, use_cap).unwrap();
                assert_eq!(r.status, OracleStatus::Exact);
                assert_eq!(r.best.len(), want, "n = {n}");
                assert!(r.best.is_cross_free() && verify_matching(&r.best));
                assert!(r.best.len() as u64 <= r.cap);
            }
        }
        assert_eq!(max_matched_exact(3, 1, budget, false).unwrap().best.len(), 2);
        assert_eq!(max_matched_exact(3, 2, budget, false).unwrap().best.len(), 4);
        assert!(max_matched_exact(2, 7, budget, true).unwrap_err().is_capacity());
    }

    /// Exhaustive search over all subsets of zero-sum triples, no symmetry.
    fn brute_max_matched(p: u32, n: u32) -> usize {
        let g = GroupParams::new(p, n).unwrap();
        let all: Vec<Triangle> = g
            .points()
            .flat_map(|x| g.points().map(move |y| Triangle { x, y, z: g.third(x, y) }))
            .collect();
        let mut best = 0;
        fn grow(g: &GroupParams, all: &[Triangle], from: usize, cur: &mut Vec<Triangle>, best: &mut usize) {
            *best = (*best).max(cur.len());
            for i in from..all.len() {
                cur.push(all[i]);
                let ok = verify_matching(&MatchedTriples::new(*g, cur.clone()).unwrap());
                if ok {
                    grow(g, all, i + 1, cur, best);
                }
                cur.pop();
            }
        }
        grow(&g, &all, 0, &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn symmetry_reduction_agrees_with_brute_force() {
        for (p, n) in [(2, 1), (2, 2), (3, 1), (2, 3)] {
            let r = max_matched_exact(p, n, OracleBudget::default(), false).unwrap();
            assert_eq!(r.best.len(), brute_max_matched(p, n), "p={p} n={n}");
        }
    }

    #[test]
    fn audit_examples() {
        let g1 = GroupParams::new(2, 1).unwrap();
        let none = TripleSystem::from_indices(g1, &[1], &[1], &[1]).unwrap();
        let a = theorem1_audit(&none, OracleBudget::default()).unwrap();
        assert_eq!((a.min_deletion, a.rhs, a.holds), (Some(0), Some(0.0), Some(true)));
        let full = TripleSystem::full(g1).unwrap();
        let b = theorem1_audit(&full, OracleBudget::default()).unwrap();
        assert_eq!((b.triangles, b.min_deletion), (4, Some(2)));
        let c2 = ExponentTable::for_prime(2).unwrap().big_c_p;
        assert!((b.rhs.unwrap() - (1.0f64 / 3.0).powf(c2) * 4.0).abs() < 1e-15);
        assert!(b.rhs.unwrap() < 2.5e-6 && b.holds == Some(true));
        let tiny = OracleBudget { max_nodes: 0, max_seconds: 1.0 };
        let s = theorem1_audit(&full, tiny).unwrap();
        assert!(s.holds.is_none() && s.skipped.is_some());
    }
}
