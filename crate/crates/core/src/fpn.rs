//! Arithmetic and linear algebra over `F_p^n`.
//!
//! A point is stored as its little-endian base-`p` index: the vector
//! `(d_0, ..., d_{n-1})` has index `d_0 + d_1 p + ... + d_{n-1} p^{n-1}`.
//! Every file format and dense array in the crate is addressed by this index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest supported prime modulus.
pub const MAX_PRIME: u32 = 17;

/// Largest group order for which dense point sets are materialized.
pub const MAX_DENSE_ORDER: u64 = 1 << 26;

pub type Seed = u64;

/// Deterministic trial division.
pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The ambient group `F_p^n` with `N = p^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupParams {
    p: u32,
    n: u32,
    order: u64,
}

/// A point of `F_p^n`, stored as its base-`p` index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Point(pub u64);

impl Point {
    pub const ZERO: Point = Point(0);

    pub fn index(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl GroupParams {
    /// Validates `p` (prime, at most 17) and that `p^n` fits in 62 bits.
    pub fn new(p: u32, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParams(format!("p = {p} is not prime")));
        }
        if p > MAX_PRIME {
            return Err(Error::InvalidParams(format!(
                "p = {p} exceeds the supported maximum {MAX_PRIME}"
            )));
        }
        let mut order: u64 = 1;
        for _ in 0..n {
            order = order
                .checked_mul(p as u64)
                .filter(|&v| v <= 1 << 62)
                .ok_or_else(|| {
                    Error::InvalidParams(format!("{p}^{n} does not fit in 62 bits"))
                })?;
        }
        Ok(GroupParams { p, n, order })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `N = p^n`.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// `p^k` for `k <= n`.
    pub fn power(&self, k: u32) -> u64 {
        (self.p as u64).pow(k)
    }

    pub fn contains(&self, u: Point) -> bool {
        u.0 < self.order
    }

    pub fn point(&self, index: u64) -> Result<Point> {
        let u = Point(index);
        self.check(u)?;
        Ok(u)
    }

    pub(crate) fn check(&self, u: Point) -> Result<()> {
        if self.contains(u) {
            Ok(())
        } else {
            Err(Error::InvalidPoint {
                index: u.0,
                order: self.order,
            })
        }
    }

    pub fn digits(&self, u: Point) -> Vec<u32> {
        let p = self.p as u64;
        let mut v = u.0;
        (0..self.n)
            .map(|_| {
                let d = (v % p) as u32;
                v /= p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> Result<Point> {
        if digits.len() != self.n as usize {
            return Err(Error::Dimension(format!(
                "expected {} digits, got {}",
                self.n,
                digits.len()
            )));
        }
        let p = self.p as u64;
        let mut idx = 0u64;
        for &d in digits.iter().rev() {
            if d >= self.p {
                return Err(Error::InvalidParams(format!("digit {d} not reduced mod {p}")));
            }
            idx = idx * p + d as u64;
        }
        Ok(Point(idx))
    }

    /// Digitwise sum mod `p`. Inputs are assumed valid.
    #[inline]
    pub fn add(&self, u: Point, v: Point) -> Point {
        if self.p == 2 {
            return Point(u.0 ^ v.0);
        }
        let p = self.p as u64;
        let (mut a, mut b) = (u.0, v.0);
        let mut out = 0u64;
        let mut w = 1u64;
        while a | b != 0 {
            let mut s = a % p + b % p;
            if s >= p {
                s -= p;
            }
            out += s * w;
            a /= p;
            b /= p;
            w *= p;
        }
        Point(out)
    }

    #[inline]
    pub fn neg(&self, u: Point) -> Point {
        if self.p == 2 {
            return u;
        }
        let p = self.p as u64;
        let mut a = u.0;
        let mut out = 0u64;
        let mut w = 1u64;
        while a != 0 {
            let d = a % p;
            if d != 0 {
                out += (p - d) * w;
            }
            a /= p;
            w *= p;
        }
        Point(out)
    }

    #[inline]
    pub fn sub(&self, u: Point, v: Point) -> Point {
        self.add(u, self.neg(v))
    }

    /// The unique `z` with `x + y + z = 0`.
    #[inline]
    pub fn third(&self, x: Point, y: Point) -> Point {
        if self.p == 2 {
            return Point(x.0 ^ y.0);
        }
        let p = self.p as u64;
        let (mut a, mut b) = (x.0, y.0);
        let mut out = 0u64;
        let mut w = 1u64;
        while a | b != 0 {
            let (qa, qb) = (a / p, b / p);
            let mut s = (a - qa * p) + (b - qb * p);
            if s >= p {
                s -= p;
            }
            if s != 0 {
                out += (p - s) * w;
            }
            a = qa;
            b = qb;
            w *= p;
        }
        Point(out)
    }

    /// Scalar multiple `c * u`.
    pub fn scale(&self, c: u32, u: Point) -> Point {
        let c = (c % self.p) as u64;
        let p = self.p as u64;
        let mut a = u.0;
        let mut out = 0u64;
        let mut w = 1u64;
        while a != 0 {
            out += (a % p * c % p) * w;
            a /= p;
            w *= p;
        }
        Point(out)
    }

    /// Concatenates digit blocks: `low` occupies the first `self.n` digits.
    pub fn concat(&self, low: Point, high: Point) -> Point {
        Point(low.0 + high.0 * self.order)
    }

    pub fn points(&self) -> impl Iterator<Item = Point> {
        (0..self.order).map(Point)
    }

    /// Parameters of `F_p^{n+extra}`.
    pub fn extend(&self, extra: u32) -> Result<GroupParams> {
        GroupParams::new(self.p, self.n + extra)
    }
}

/// Checked digitwise sum.
pub fn add_points(params: &GroupParams, u: Point, v: Point) -> Result<Point> {
    params.check(u)?;
    params.check(v)?;
    Ok(params.add(u, v))
}

/// Checked additive inverse.
pub fn negate_point(params: &GroupParams, u: Point) -> Result<Point> {
    params.check(u)?;
    Ok(params.neg(u))
}

/// True iff both points are nonzero and neither is a scalar multiple of the other.
pub fn pairwise_independent(params: &GroupParams, u: Point, v: Point) -> bool {
    if u.is_zero() || v.is_zero() || !params.contains(u) || !params.contains(v) {
        return false;
    }
    (1..params.p()).all(|c| params.scale(c, u) != v)
}

/// Scales a nonzero point so its lowest nonzero digit is 1. Two nonzero
/// points are dependent iff their projective representatives coincide.
pub fn projective_rep(params: &GroupParams, u: Point) -> Point {
    let p = params.p() as u64;
    let mut a = u.0;
    while a != 0 {
        let d = (a % p) as u32;
        if d != 0 {
            return params.scale(inv_mod(d, params.p()), u);
        }
        a /= p;
    }
    u
}

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    let (a, p) = (a as u64 % p as u64, p as u64);
    debug_assert!(a != 0);
    let mut result = 1u64;
    let mut base = a;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result as u32
}

/// Reduces rows (as digit vectors) to reduced row echelon form in place and
/// returns the rank. Pivots are searched from digit 0 upward; zero rows sink.
fn row_reduce(rows: &mut [Vec<u32>], p: u32) -> usize {
    let width = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..width {
        if rank == rows.len() {
            break;
        }
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = inv_mod(rows[rank][col], p);
        for v in rows[rank].iter_mut() {
            *v = *v * inv % p;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let f = rows[r][col];
                let pivot_row = rows[rank].clone();
                for (v, &q) in rows[r].iter_mut().zip(&pivot_row) {
                    *v = (*v + p - f * q % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of a list of points viewed as row vectors over `F_p`.
pub fn rank(params: &GroupParams, vectors: &[Point]) -> usize {
    let mut rows: Vec<Vec<u32>> = vectors.iter().map(|&v| params.digits(v)).collect();
    row_reduce(&mut rows, params.p())
}

/// Largest lookup table built by [`ThirdTable`].
const THIRD_TABLE_ENTRIES: u64 = 1 << 20;

/// `-(x + y)` by lookup on blocks of digits, for scans over many pairs.
///
/// Points are split once into little-endian blocks of `width` digits; each
/// pair then costs one table read per block.
#[derive(Debug, Clone)]
pub(crate) struct ThirdTable {
    params: GroupParams,
    block: u64,
    blocks: usize,
    table: Vec<u32>,
}

impl ThirdTable {
    pub(crate) fn new(params: GroupParams) -> Self {
        let p = params.p as u64;
        let mut width = 1u32;
        while width < params.n.max(1) && p.pow(2 * (width + 1)) <= THIRD_TABLE_ENTRIES {
            width += 1;
        }
        let sub = GroupParams::new(params.p, width).expect("block fits");
        let block = sub.order;
        let table = (0..block * block)
            .map(|i| sub.third(Point(i / block), Point(i % block)).0 as u32)
            .collect();
        ThirdTable {
            params,
            block,
            blocks: params.n.div_ceil(width).max(1) as usize,
            table,
        }
    }

    pub(crate) fn blocks(&self) -> usize {
        self.blocks
    }

    /// Appends the blocks of `u` to `out`.
    pub(crate) fn split_into(&self, u: Point, out: &mut Vec<u32>) {
        let mut a = u.0;
        for _ in 0..self.blocks {
            out.push((a % self.block) as u32);
            a /= self.block;
        }
    }

    #[inline]
    pub(crate) fn third(&self, x: &[u32], y: &[u32]) -> Point {
        if self.params.p == 2 {
            let mut out = 0u64;
            let mut w = 1u64;
            for (a, b) in x.iter().zip(y) {
                out += ((a ^ b) as u64) * w;
                w *= self.block;
            }
            return Point(out);
        }
        let mut out = 0u64;
        let mut w = 1u64;
        for (&a, &b) in x.iter().zip(y) {
            out += self.table[(a as u64 * self.block + b as u64) as usize] as u64 * w;
            w *= self.block;
        }
        Point(out)
    }
}

/// A dense subset of `F_p^n` with cached cardinality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    params: GroupParams,
    members: Vec<bool>,
    len: usize,
}

impl PointSet {
    pub fn empty(params: GroupParams) -> Result<Self> {
        if params.order() > MAX_DENSE_ORDER {
            return Err(Error::capacity(
                format!(
                    "dense point set of order {} exceeds {MAX_DENSE_ORDER}",
                    params.order()
                ),
                Some(params.order() as u128),
            ));
        }
        Ok(PointSet {
            params,
            members: vec![false; params.order() as usize],
            len: 0,
        })
    }

    pub fn full(params: GroupParams) -> Result<Self> {
        let mut s = Self::empty(params)?;
        s.members.iter_mut().for_each(|m| *m = true);
        s.len = s.members.len();
        Ok(s)
    }

    pub fn from_points<I: IntoIterator<Item = Point>>(params: GroupParams, points: I) -> Result<Self> {
        let mut s = Self::empty(params)?;
        for u in points {
            s.insert(u)?;
        }
        Ok(s)
    }

    pub fn from_indices<I: IntoIterator<Item = u64>>(params: GroupParams, indices: I) -> Result<Self> {
        Self::from_points(params, indices.into_iter().map(Point))
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, u: Point) -> bool {
        self.members.get(u.0 as usize).copied().unwrap_or(false)
    }

    /// Returns true if the point was newly inserted.
    pub fn insert(&mut self, u: Point) -> Result<bool> {
        self.params.check(u)?;
        let slot = &mut self.members[u.0 as usize];
        if *slot {
            return Ok(false);
        }
        *slot = true;
        self.len += 1;
        Ok(true)
    }

    pub fn remove(&mut self, u: Point) -> bool {
        match self.members.get_mut(u.0 as usize) {
            Some(slot) if *slot => {
                *slot = false;
                self.len -= 1;
                true
            }
            _ => false,
        }
    }

    /// Members in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = Point> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| Point(i as u64))
    }

    pub fn to_vec(&self) -> Vec<Point> {
        self.iter().collect()
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        let members: Vec<bool> = self
            .members
            .iter()
            .zip(&other.members)
            .map(|(&a, &b)| a && b)
            .collect();
        let len = members.iter().filter(|&&m| m).count();
        PointSet {
            params: self.params,
            members,
            len,
        }
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.members.iter().zip(&other.members).all(|(&a, &b)| !(a && b))
    }

    pub(crate) fn indicator(&self) -> &[bool] {
        &self.members
    }
}

/// A basis of a `d`-dimensional subspace `U` of `F_p^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    params: GroupParams,
    basis: Vec<Point>,
}

impl SubspaceBasis {
    /// Validates that the vectors are linearly independent.
    pub fn new(params: GroupParams, basis: Vec<Point>) -> Result<Self> {
        for &b in &basis {
            params.check(b)?;
        }
        if rank(&params, &basis) != basis.len() {
            return Err(Error::InvalidBasis(format!(
                "{} vectors are linearly dependent",
                basis.len()
            )));
        }
        Ok(SubspaceBasis { params, basis })
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Point] {
        &self.basis
    }

    /// All `p^d` linear combinations, unordered.
    pub fn span_points(&self) -> Vec<Point> {
        let params = &self.params;
        let mut span = vec![Point::ZERO];
        for &b in &self.basis {
            let multiples: Vec<Point> = (1..params.p()).map(|c| params.scale(c, b)).collect();
            let mut next = Vec::with_capacity(span.len() * params.p() as usize);
            for &s in &span {
                next.push(s);
                for &m in &multiples {
                    next.push(params.add(s, m));
                }
            }
            span = next;
        }
        span
    }
}

/// Draws a uniformly random `d`-dimensional subspace.
///
/// A uniform `d x n` matrix is redrawn until it has rank `d`; the row space of
/// an accepted matrix is uniform over all `d`-dimensional subspaces since the
/// accepted matrices form a single free orbit of the general linear group.
pub fn sample_subspace(params: &GroupParams, d: u32, seed: Seed) -> Result<SubspaceBasis> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_subspace_with(params, d, &mut rng)
}

pub fn sample_subspace_with<R: Rng + ?Sized>(
    params: &GroupParams,
    d: u32,
    rng: &mut R,
) -> Result<SubspaceBasis> {
    if d > params.n() {
        return Err(Error::Dimension(format!(
            "subspace dimension {d} exceeds ambient dimension {}",
            params.n()
        )));
    }
    loop {
        let rows: Vec<Point> = (0..d).map(|_| Point(rng.gen_range(0..params.order()))).collect();
        if rank(params, &rows) == d as usize {
            return Ok(SubspaceBasis {
                params: *params,
                basis: rows,
            });
        }
    }
}

/// Draws a uniformly random `d`-dimensional subspace containing the
/// independent vectors `fixed`, by completing them with uniform vectors and
/// rejecting dependent completions.
pub fn sample_subspace_containing<R: Rng + ?Sized>(
    params: &GroupParams,
    d: u32,
    fixed: &[Point],
    rng: &mut R,
) -> Result<SubspaceBasis> {
    if d > params.n() || (d as usize) < fixed.len() {
        return Err(Error::Dimension(format!(
            "cannot fit {} fixed vectors in a {d}-dimensional subspace of F_{}^{}",
            fixed.len(),
            params.p(),
            params.n()
        )));
    }
    let base = SubspaceBasis::new(*params, fixed.to_vec())?;
    loop {
        let mut rows = base.basis.clone();
        rows.extend((fixed.len()..d as usize).map(|_| Point(rng.gen_range(0..params.order()))));
        if rank(params, &rows) == d as usize {
            return Ok(SubspaceBasis {
                params: *params,
                basis: rows,
            });
        }
    }
}

/// The subspace spanned by `basis` as a dense set.
pub fn enumerate_subspace(basis: &SubspaceBasis) -> Result<PointSet> {
    if rank(&basis.params, &basis.basis) != basis.dim() {
        return Err(Error::InvalidBasis("basis vectors are dependent".into()));
    }
    PointSet::from_points(basis.params, basis.span_points())
}

/// Identifier of the plane `span{u, v}`: its reduced row echelon basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlaneId(pub Point, pub Point);

pub fn canonical_plane_id(params: &GroupParams, u: Point, v: Point) -> Result<PlaneId> {
    if !pairwise_independent(params, u, v) {
        return Err(Error::InvalidBasis(format!(
            "points {u} and {v} do not span a plane"
        )));
    }
    let mut rows = vec![params.digits(u), params.digits(v)];
    row_reduce(&mut rows, params.p());
    Ok(PlaneId(params.from_digits(&rows[0])?, params.from_digits(&rows[1])?))
}

/// Gaussian binomial `[n choose k]_p`: the number of `k`-dimensional subspaces.
pub fn gaussian_binomial(p: u32, n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let p = p as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= p.pow(n - i) - 1;
        den *= p.pow(i + 1) - 1;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(params: &GroupParams, digits: &[u32]) -> Point {
        params.from_digits(digits).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(GroupParams::new(4, 2).is_err());
        assert!(GroupParams::new(19, 1).is_err());
        assert!(GroupParams::new(1, 1).is_err());
        assert!(GroupParams::new(2, 62).is_ok());
        assert!(GroupParams::new(2, 63).is_err());
        assert_eq!(GroupParams::new(3, 4).unwrap().order(), 81);
        assert_eq!(GroupParams::new(5, 0).unwrap().order(), 1);
    }

    #[test]
    fn add_examples() {
        let g = GroupParams::new(3, 2).unwrap();
        assert_eq!(add_points(&g, pt(&g, &[1, 2]), pt(&g, &[2, 2])).unwrap(), pt(&g, &[0, 1]));
        let u = pt(&g, &[2, 1]);
        assert_eq!(g.add(u, Point::ZERO), u);
        let h = GroupParams::new(2, 3).unwrap();
        assert_eq!(
            add_points(&h, pt(&h, &[1, 0, 1]), pt(&h, &[1, 1, 0])).unwrap(),
            pt(&h, &[0, 1, 1])
        );
        assert!(matches!(
            add_points(&g, Point(9), Point(0)),
            Err(Error::InvalidPoint { index: 9, order: 9 })
        ));
    }

    #[test]
    fn negate_examples() {
        let g = GroupParams::new(3, 2).unwrap();
        assert_eq!(negate_point(&g, pt(&g, &[1, 2])).unwrap(), pt(&g, &[2, 1]));
        assert_eq!(negate_point(&g, Point::ZERO).unwrap(), Point::ZERO);
        let h = GroupParams::new(2, 4).unwrap();
        for u in h.points() {
            assert_eq!(h.neg(u), u);
        }
        assert!(negate_point(&g, Point(100)).is_err());
    }

    #[test]
    fn group_laws_exhaustive() {
        for (p, n) in [(2, 4), (3, 3), (5, 2), (7, 2)] {
            let g = GroupParams::new(p, n).unwrap();
            for u in g.points() {
                assert_eq!(g.add(u, g.neg(u)), Point::ZERO);
                assert_eq!(g.digits(u).len(), n as usize);
                assert_eq!(g.from_digits(&g.digits(u)).unwrap(), u);
                for v in g.points() {
                    assert_eq!(g.add(u, v), g.add(v, u));
                    let w = Point((u.0 * 7 + v.0 * 3) % g.order());
                    assert_eq!(g.add(g.add(u, v), w), g.add(u, g.add(v, w)));
                }
            }
        }
    }

    #[test]
    fn independence_examples() {
        let g = GroupParams::new(2, 2).unwrap();
        assert!(pairwise_independent(&g, pt(&g, &[1, 0]), pt(&g, &[0, 1])));
        let h = GroupParams::new(3, 2).unwrap();
        assert!(!pairwise_independent(&h, pt(&h, &[1, 2]), pt(&h, &[2, 1])));
        for u in h.points() {
            assert!(!pairwise_independent(&h, Point::ZERO, u));
            assert!(!pairwise_independent(&h, u, u));
        }
    }

    #[test]
    fn projective_rep_matches_independence() {
        let g = GroupParams::new(5, 2).unwrap();
        for u in g.points().skip(1) {
            for v in g.points().skip(1) {
                let dependent = projective_rep(&g, u) == projective_rep(&g, v);
                assert_eq!(dependent, !pairwise_independent(&g, u, v));
            }
        }
    }

    #[test]
    fn enumerate_examples() {
        let g = GroupParams::new(2, 2).unwrap();
        let b = SubspaceBasis::new(g, vec![pt(&g, &[1, 0]), pt(&g, &[0, 1])]).unwrap();
        let s = enumerate_subspace(&b).unwrap();
        assert_eq!(s.to_vec(), vec![Point(0), Point(1), Point(2), Point(3)]);

        let empty = SubspaceBasis::new(g, vec![]).unwrap();
        assert_eq!(enumerate_subspace(&empty).unwrap().to_vec(), vec![Point::ZERO]);

        let h = GroupParams::new(3, 2).unwrap();
        let line = SubspaceBasis::new(h, vec![pt(&h, &[1, 0])]).unwrap();
        assert_eq!(
            enumerate_subspace(&line).unwrap().to_vec(),
            vec![pt(&h, &[0, 0]), pt(&h, &[1, 0]), pt(&h, &[2, 0])]
        );

        assert!(matches!(
            SubspaceBasis::new(h, vec![pt(&h, &[1, 2]), pt(&h, &[2, 1])]),
            Err(Error::InvalidBasis(_))
        ));
    }

    #[test]
    fn sample_extremes() {
        let g = GroupParams::new(3, 3).unwrap();
        let zero = sample_subspace(&g, 0, 1).unwrap();
        assert_eq!(enumerate_subspace(&zero).unwrap().to_vec(), vec![Point::ZERO]);
        let whole = sample_subspace(&g, 3, 1).unwrap();
        assert_eq!(enumerate_subspace(&whole).unwrap().len(), 27);
        assert!(matches!(sample_subspace(&g, 4, 1), Err(Error::Dimension(_))));
        assert_eq!(sample_subspace(&g, 2, 99).unwrap(), sample_subspace(&g, 2, 99).unwrap());
    }

    #[test]
    fn sampled_subspaces_are_closed() {
        let g = GroupParams::new(3, 4).unwrap();
        for seed in 0..50 {
            let d = (seed % 5) as u32;
            let b = sample_subspace(&g, d, seed).unwrap();
            let s = enumerate_subspace(&b).unwrap();
            assert_eq!(s.len() as u64, g.power(d));
            for u in s.iter() {
                for v in s.iter() {
                    assert!(s.contains(g.add(u, v)));
                }
            }
        }
    }

    /// All 2-dim subspaces of F_2^3, enumerated from pairs of distinct nonzero vectors.
    fn planes_of_f2_cubed() -> Vec<Vec<Point>> {
        let mut planes: Vec<Vec<Point>> = Vec::new();
        for a in 1..8u64 {
            for b in (a + 1)..8 {
                let mut plane = vec![Point(0), Point(a), Point(b), Point(a ^ b)];
                plane.sort();
                if !planes.contains(&plane) {
                    planes.push(plane);
                }
            }
        }
        planes
    }

    #[test]
    fn plane_membership_oracle_f2_cubed() {
        let planes = planes_of_f2_cubed();
        assert_eq!(planes.len(), 7);
        for v in 1..8u64 {
            let hits = planes.iter().filter(|pl| pl.contains(&Point(v))).count();
            assert_eq!(hits, 3, "nonzero vector lies in 3 of 7 planes");
        }
    }

    #[test]
    fn plane_id_examples() {
        let g = GroupParams::new(3, 3).unwrap();
        let u = pt(&g, &[1, 2, 0]);
        let v = pt(&g, &[0, 1, 1]);
        let id = canonical_plane_id(&g, u, v).unwrap();
        assert_eq!(id, canonical_plane_id(&g, v, u).unwrap());
        assert_eq!(id, canonical_plane_id(&g, u, g.add(u, v)).unwrap());
        assert_eq!(id, canonical_plane_id(&g, g.scale(2, u), g.add(v, g.scale(2, u))).unwrap());
        assert!(canonical_plane_id(&g, u, g.scale(2, u)).is_err());
    }

    #[test]
    fn plane_ids_count_gaussian_binomial() {
        assert_eq!(gaussian_binomial(2, 3, 2), 7);
        for n in 2..=4 {
            let g = GroupParams::new(2, n).unwrap();
            let mut ids = std::collections::HashSet::new();
            for u in g.points() {
                for v in g.points() {
                    if let Ok(id) = canonical_plane_id(&g, u, v) {
                        ids.insert(id);
                    }
                }
            }
            // [n choose 2]_2 = (2^n - 1)(2^{n-1} - 1) / 3
            let expected = ((1u128 << n) - 1) * ((1u128 << (n - 1)) - 1) / 3;
            assert_eq!(ids.len() as u128, expected);
        }
        let g = GroupParams::new(3, 3).unwrap();
        let mut ids = std::collections::HashSet::new();
        for u in g.points() {
            for v in g.points() {
                if let Ok(id) = canonical_plane_id(&g, u, v) {
                    ids.insert(id);
                }
            }
        }
        assert_eq!(ids.len() as u128, gaussian_binomial(3, 3, 2));
    }

    #[test]
    fn point_set_bookkeeping() {
        let g = GroupParams::new(2, 3).unwrap();
        let mut s = PointSet::from_indices(g, [1, 3, 3, 5]).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.remove(Point(3)));
        assert!(!s.remove(Point(3)));
        assert_eq!(s.len(), 2);
        assert!(s.insert(Point(8)).is_err());
        let big = GroupParams::new(2, 40).unwrap();
        assert!(PointSet::empty(big).unwrap_err().is_capacity());
    }

    #[test]
    fn third_table_matches_digit_arithmetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for p in [2u32, 3, 5, 7, 11, 13, 17] {
            for n in 0..=8u32 {
                let Ok(g) = GroupParams::new(p, n) else { continue };
                let table = ThirdTable::new(g);
                for _ in 0..200 {
                    let (x, y) = (Point(rng.gen_range(0..g.order())), Point(rng.gen_range(0..g.order())));
                    assert_eq!(g.third(x, y), g.neg(g.add(x, y)));
                    let (mut xb, mut yb) = (Vec::new(), Vec::new());
                    table.split_into(x, &mut xb);
                    table.split_into(y, &mut yb);
                    assert_eq!(table.third(&xb, &yb), g.third(x, y), "p={p} n={n}");
                }
            }
        }
    }
}
