//! Triangle counting and the structural predicates built on it.
//!
//! A triangle of a system `(X, Y, Z)` is a triple `(x, y, z) ∈ X × Y × Z`
//! with `x + y + z = 0`. Two exact counting paths are provided: a direct
//! scan over `X × Y` and a modular-transform convolution. They must agree.

use std::collections::HashMap;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::fpn::{enumerate_subspace, GroupParams, Point, PointSet, SubspaceBasis, ThirdTable};
use crate::transform::{Convolver, DEFAULT_BIT_BUDGET};

pub type Rational = Ratio<u128>;

/// Default cap for [`list_triangles`].
pub const DEFAULT_LIST_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    X,
    Y,
    Z,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::X, Role::Y, Role::Z];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::X => "X",
            Role::Y => "Y",
            Role::Z => "Z",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triangle {
    pub x: Point,
    pub y: Point,
    pub z: Point,
}

impl Triangle {
    pub fn new(params: &GroupParams, x: Point, y: Point, z: Point) -> Result<Self> {
        for u in [x, y, z] {
            params.check(u)?;
        }
        if params.add(params.add(x, y), z) != Point::ZERO {
            return Err(Error::Invariant(format!("({x}, {y}, {z}) does not sum to zero")));
        }
        Ok(Triangle { x, y, z })
    }

    pub fn point(&self, role: Role) -> Point {
        match role {
            Role::X => self.x,
            Role::Y => self.y,
            Role::Z => self.z,
        }
    }
}

/// Three point sets in a common group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleSystem {
    params: GroupParams,
    x: PointSet,
    y: PointSet,
    z: PointSet,
}

impl TripleSystem {
    pub fn new(x: PointSet, y: PointSet, z: PointSet) -> Result<Self> {
        let params = *x.params();
        if *y.params() != params || *z.params() != params {
            return Err(Error::InvalidParams(
                "X, Y and Z must live in the same group".into(),
            ));
        }
        Ok(TripleSystem { params, x, y, z })
    }

    pub fn from_indices(
        params: GroupParams,
        x: &[u64],
        y: &[u64],
        z: &[u64],
    ) -> Result<Self> {
        Self::new(
            PointSet::from_indices(params, x.iter().copied())?,
            PointSet::from_indices(params, y.iter().copied())?,
            PointSet::from_indices(params, z.iter().copied())?,
        )
    }

    /// `X = Y = Z = F_p^n`.
    pub fn full(params: GroupParams) -> Result<Self> {
        let all = PointSet::full(params)?;
        Self::new(all.clone(), all.clone(), all)
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn x(&self) -> &PointSet {
        &self.x
    }

    pub fn y(&self) -> &PointSet {
        &self.y
    }

    pub fn z(&self) -> &PointSet {
        &self.z
    }

    pub fn set(&self, role: Role) -> &PointSet {
        match role {
            Role::X => &self.x,
            Role::Y => &self.y,
            Role::Z => &self.z,
        }
    }

    pub fn set_mut(&mut self, role: Role) -> &mut PointSet {
        match role {
            Role::X => &mut self.x,
            Role::Y => &mut self.y,
            Role::Z => &mut self.z,
        }
    }

    /// `|X| + |Y| + |Z|`.
    pub fn total_points(&self) -> usize {
        self.x.len() + self.y.len() + self.z.len()
    }

    /// Copy of the system with the listed role-points deleted.
    pub fn without(&self, deleted: &[(Role, Point)]) -> TripleSystem {
        let mut out = self.clone();
        for &(role, u) in deleted {
            out.set_mut(role).remove(u);
        }
        out
    }
}

/// Aggregate and per-point triangle statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleStats {
    pub total: u64,
    /// `total / N²`.
    pub delta: Rational,
    /// Dense degree arrays indexed by point; zero for non-members.
    pub deg_x: Vec<u64>,
    pub deg_y: Vec<u64>,
    pub deg_z: Vec<u64>,
    pub max_degree: u64,
    /// `max_degree / N`.
    pub rho: Rational,
}

impl TriangleStats {
    pub fn degrees(&self, role: Role) -> &[u64] {
        match role {
            Role::X => &self.deg_x,
            Role::Y => &self.deg_y,
            Role::Z => &self.deg_z,
        }
    }
}

/// An ordered list of triangles `(x_i, y_i, z_i)`.
///
/// `cross_free_verified` records that `x_i + y_j + z_k = 0` holds only for
/// `i = j = k`, as established by [`verify_matching`] or by a construction
/// known to preserve it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchedTriples {
    params: GroupParams,
    triples: Vec<Triangle>,
    cross_free_verified: bool,
}

impl MatchedTriples {
    pub fn new(params: GroupParams, triples: Vec<Triangle>) -> Result<Self> {
        for t in &triples {
            Triangle::new(&params, t.x, t.y, t.z)?;
        }
        Ok(MatchedTriples {
            params,
            triples,
            cross_free_verified: false,
        })
    }

    /// Runs [`verify_matching`] and records the outcome.
    pub fn verified(mut self) -> Self {
        self.cross_free_verified = verify_matching(&self);
        self
    }

    pub(crate) fn assume_verified(mut self, flag: bool) -> Self {
        self.cross_free_verified = flag;
        self
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn triples(&self) -> &[Triangle] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn is_cross_free(&self) -> bool {
        self.cross_free_verified
    }

    /// The system `X = {x_i}`, `Y = {y_i}`, `Z = {z_i}`.
    pub fn system(&self) -> Result<TripleSystem> {
        let coords = |f: fn(&Triangle) -> Point| {
            PointSet::from_points(self.params, self.triples.iter().map(f))
        };
        TripleSystem::new(coords(|t| t.x)?, coords(|t| t.y)?, coords(|t| t.z)?)
    }
}

/// Visits every pair of `X × Y` in lexicographic order with `z = -x-y` and
/// whether `z ∈ Z`.
#[inline]
fn scan_pairs(sys: &TripleSystem, mut visit: impl FnMut(Point, Point, Point, bool)) {
    let g = sys.params;
    let ys = sys.y.to_vec();
    if g.p() == 2 {
        for x in sys.x.iter() {
            for &y in &ys {
                let z = Point(x.0 ^ y.0);
                visit(x, y, z, sys.z.contains(z));
            }
        }
        return;
    }
    let table = ThirdTable::new(g);
    let k = table.blocks();
    let mut y_blocks = Vec::with_capacity(ys.len() * k);
    for &y in &ys {
        table.split_into(y, &mut y_blocks);
    }
    let mut x_blocks = Vec::with_capacity(k);
    for x in sys.x.iter() {
        x_blocks.clear();
        table.split_into(x, &mut x_blocks);
        for (&y, yb) in ys.iter().zip(y_blocks.chunks_exact(k)) {
            let z = table.third(&x_blocks, yb);
            visit(x, y, z, sys.z.contains(z));
        }
    }
}

/// Calls `f` on every triangle in lexicographic `(x, y)` order.
pub(crate) fn for_each_triangle(sys: &TripleSystem, mut f: impl FnMut(Point, Point, Point)) {
    scan_pairs(sys, |x, y, z, hit| {
        if hit {
            f(x, y, z)
        }
    });
}

/// Exact count by scanning `X × Y` and testing `-x-y ∈ Z`.
pub fn count_naive(sys: &TripleSystem) -> u64 {
    let mut total = 0u64;
    scan_pairs(sys, |_, _, _, hit| total += hit as u64);
    total
}

/// Exact count through the transform path, `T = Σ_{z ∈ Z} (1_X * 1_Y)(-z)`.
pub fn count_transform(sys: &TripleSystem) -> Result<u64> {
    count_transform_with(sys, DEFAULT_BIT_BUDGET)
}

/// [`count_transform`] with moduli restricted to below `2^bit_budget`.
pub fn count_transform_with(sys: &TripleSystem, bit_budget: u32) -> Result<u64> {
    if sys.x.is_empty() || sys.y.is_empty() || sys.z.is_empty() {
        return Ok(0);
    }
    let g = sys.params;
    let bound = g.order() as u128 * sys.x.len().min(sys.y.len()) as u128;
    let conv = Convolver::new(g, bound, bit_budget)?;
    let xy = conv.convolve(&conv.spectrum(&sys.x), &conv.spectrum(&sys.y));
    Ok(sys.z.iter().map(|z| xy[g.neg(z).0 as usize]).sum())
}

/// Per-point degrees in every role.
///
/// Small systems are scanned directly; otherwise the three pairwise
/// convolutions give `deg_Z(z) = (1_X * 1_Y)(-z)` and its analogues.
pub fn degree_profile(sys: &TripleSystem) -> Result<TriangleStats> {
    let g = sys.params;
    let order = g.order() as usize;
    let (mut deg_x, mut deg_y, mut deg_z) = (vec![0u64; order], vec![0u64; order], vec![0u64; order]);
    let scan_cost = sys.x.len() as u128 * sys.y.len() as u128;
    let transform_cost = g.order() as u128 * g.n() as u128 * g.p() as u128;
    if scan_cost < transform_cost {
        for_each_triangle(sys, |x, y, z| {
            deg_x[x.0 as usize] += 1;
            deg_y[y.0 as usize] += 1;
            deg_z[z.0 as usize] += 1;
        });
    } else {
        let conv = Convolver::new(g, g.order() as u128, DEFAULT_BIT_BUDGET)?;
        let (sx, sy, sz) = (
            conv.spectrum(&sys.x),
            conv.spectrum(&sys.y),
            conv.spectrum(&sys.z),
        );
        let fill = |set: &PointSet, pair: Vec<u64>, out: &mut Vec<u64>| {
            for u in set.iter() {
                out[u.0 as usize] = pair[g.neg(u).0 as usize];
            }
        };
        fill(&sys.x, conv.convolve(&sy, &sz), &mut deg_x);
        fill(&sys.y, conv.convolve(&sx, &sz), &mut deg_y);
        fill(&sys.z, conv.convolve(&sx, &sy), &mut deg_z);
    }
    let total: u64 = deg_x.iter().sum();
    let max_degree = deg_x
        .iter()
        .chain(&deg_y)
        .chain(&deg_z)
        .copied()
        .max()
        .unwrap_or(0);
    let n = g.order() as u128;
    Ok(TriangleStats {
        total,
        delta: Rational::new(total as u128, n * n),
        deg_x,
        deg_y,
        deg_z,
        max_degree,
        rho: Rational::new(max_degree as u128, n),
    })
}

/// `(X ∩ U, Y ∩ U, Z ∩ U)` in the ambient group.
pub fn restrict_to_subspace(sys: &TripleSystem, basis: &SubspaceBasis) -> Result<TripleSystem> {
    if *basis.params() != sys.params {
        return Err(Error::InvalidParams("subspace lives in a different group".into()));
    }
    let u = enumerate_subspace(basis)?;
    TripleSystem::new(
        sys.x.intersection(&u),
        sys.y.intersection(&u),
        sys.z.intersection(&u),
    )
}

/// Triangles whose three points each lie in no other triangle of the system.
pub fn good_triangles(sys: &TripleSystem) -> Result<Vec<Triangle>> {
    let stats = degree_profile(sys)?;
    Ok(good_triangles_from(sys, &stats))
}

pub(crate) fn good_triangles_from(sys: &TripleSystem, stats: &TriangleStats) -> Vec<Triangle> {
    let g = sys.params;
    let mut out = Vec::new();
    for x in sys.x.iter().filter(|x| stats.deg_x[x.0 as usize] == 1) {
        let hit = sys
            .y
            .iter()
            .map(|y| (y, g.third(x, y)))
            .find(|&(_, z)| sys.z.contains(z));
        if let Some((y, z)) = hit {
            if stats.deg_y[y.0 as usize] == 1 && stats.deg_z[z.0 as usize] == 1 {
                out.push(Triangle { x, y, z });
            }
        }
    }
    out
}

/// True iff `x_i + y_j + z_k = 0` exactly when `i = j = k`.
///
/// Repeated points within one coordinate list always produce a violation.
pub fn verify_matching(m: &MatchedTriples) -> bool {
    let g = m.params;
    if m.triples.iter().any(|t| g.add(g.add(t.x, t.y), t.z) != Point::ZERO) {
        return false;
    }
    let mut z_index: HashMap<Point, Vec<usize>> = HashMap::new();
    for (k, t) in m.triples.iter().enumerate() {
        z_index.entry(t.z).or_default().push(k);
    }
    for (i, ti) in m.triples.iter().enumerate() {
        for (j, tj) in m.triples.iter().enumerate() {
            if let Some(ks) = z_index.get(&g.third(ti.x, tj.y)) {
                if ks.iter().any(|&k| !(i == j && j == k)) {
                    return false;
                }
            }
        }
    }
    true
}

/// All triangles in lexicographic `(x, y)` order, refusing more than `cap`.
pub fn list_triangles(sys: &TripleSystem, cap: u64) -> Result<Vec<Triangle>> {
    let count = count_naive(sys);
    if count > cap {
        return Err(Error::capacity(
            format!("{count} triangles exceed the listing cap {cap}"),
            Some(count as u128),
        ));
    }
    let mut out = Vec::with_capacity(count as usize);
    for_each_triangle(sys, |x, y, z| out.push(Triangle { x, y, z }));
    Ok(out)
}
