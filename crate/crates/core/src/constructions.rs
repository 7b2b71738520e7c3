//! Constructive maps: lifting into `F_p^{n+2}`, tensor powers, and the
//! product blow-up `X' = X × F_p^l`, plus the ε-δ family curve they trace.
//!
//! Digit blocks are concatenated lowest-index first; lifting appends its two
//! new digits at the highest positions.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fpn::{canonical_plane_id, projective_rep, GroupParams, Point, PointSet, MAX_DENSE_ORDER};
use crate::triangles::{
    list_triangles, MatchedTriples, Rational, Triangle, TripleSystem, DEFAULT_LIST_CAP,
};

/// Blow-ups are materialized as dense sets only up to this group order (3^10).
pub const MAX_BLOWUP_ORDER: u64 = 59_049;

fn bigger_group(params: &GroupParams, extra: u32) -> Result<GroupParams> {
    params.extend(extra).map_err(|_| {
        Error::capacity(
            format!("F_{}^{} does not fit in 62 bits", params.p(), params.n() + extra),
            None,
        )
    })
}

/// Trailing digit pairs `(1, 0)`, `(-1, 1)`, `(0, -1)` for the three roles.
fn lift_tags(params: &GroupParams) -> Result<(GroupParams, [u64; 3])> {
    let lifted = bigger_group(params, 2)?;
    let n = params.order();
    let p = params.p() as u64;
    let tag = |a: u64, b: u64| a * n + b * n * p;
    Ok((lifted, [tag(1, 0), tag(p - 1, 1), tag(0, p - 1)]))
}

/// `x ↦ (x, 1, 0)`, `y ↦ (y, -1, 1)`, `z ↦ (z, 0, -1)`.
///
/// Sums of one lifted point per role equal the lift of the original sum with
/// trailing digits `(0, 0)`, so triangle structure and cross-freeness carry over.
pub fn lift_plus_two(m: &MatchedTriples) -> Result<MatchedTriples> {
    let (lifted, [tx, ty, tz]) = lift_tags(m.params())?;
    let triples = m
        .triples()
        .iter()
        .map(|t| Triangle::new(&lifted, Point(t.x.0 + tx), Point(t.y.0 + ty), Point(t.z.0 + tz)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MatchedTriples::new(lifted, triples)?.assume_verified(m.is_cross_free()))
}

/// The same lift applied to arbitrary sets.
pub fn lift_system(sys: &TripleSystem) -> Result<TripleSystem> {
    let (lifted, [tx, ty, tz]) = lift_tags(sys.params())?;
    let shift = |set: &PointSet, tag: u64| PointSet::from_points(lifted, set.iter().map(|u| Point(u.0 + tag)));
    TripleSystem::new(shift(sys.x(), tx)?, shift(sys.y(), ty)?, shift(sys.z(), tz)?)
}

/// The structural properties the lift is meant to force.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftReport {
    pub disjoint: bool,
    /// No zero vector and no two vectors of `X ⊎ Y ⊎ Z` on a common line.
    pub pairwise_independent: bool,
    /// Most triangles found in a single 2-dimensional subspace.
    pub max_triangles_per_plane: usize,
    pub triangles: usize,
}

impl LiftReport {
    pub fn holds(&self) -> bool {
        self.disjoint && self.pairwise_independent && self.max_triangles_per_plane <= 1
    }
}

pub fn lift_structure(sys: &TripleSystem) -> Result<LiftReport> {
    let g = sys.params();
    let disjoint = sys.x().is_disjoint(sys.y())
        && sys.x().is_disjoint(sys.z())
        && sys.y().is_disjoint(sys.z());
    let mut reps = std::collections::HashSet::new();
    let mut pairwise_independent = true;
    for u in sys.x().iter().chain(sys.y().iter()).chain(sys.z().iter()) {
        if u.is_zero() || !reps.insert(projective_rep(g, u)) {
            pairwise_independent = false;
            break;
        }
    }
    let triangles = list_triangles(sys, DEFAULT_LIST_CAP)?;
    let mut per_plane: HashMap<_, usize> = HashMap::new();
    let mut degenerate = 0;
    for t in &triangles {
        match canonical_plane_id(g, t.x, t.y) {
            Ok(id) => *per_plane.entry(id).or_default() += 1,
            Err(_) => degenerate += 1,
        }
    }
    let max_triangles_per_plane = per_plane.values().copied().max().unwrap_or(0).max(degenerate);
    Ok(LiftReport {
        disjoint,
        pairwise_independent,
        max_triangles_per_plane,
        triangles: triangles.len(),
    })
}

fn power_group(params: &GroupParams, k: u32) -> Result<GroupParams> {
    if k == 0 {
        return Err(Error::Precondition("tensor power k must be positive".into()));
    }
    let n = params.n().checked_mul(k).ok_or_else(|| Error::capacity("dimension overflow", None))?;
    let out = GroupParams::new(params.p(), n).map_err(|_| {
        Error::capacity(format!("F_{}^{n} does not fit in 62 bits", params.p()), None)
    })?;
    if out.order() > MAX_DENSE_ORDER {
        return Err(Error::capacity(
            format!("tensor power of order {} exceeds {MAX_DENSE_ORDER}", out.order()),
            Some(out.order() as u128),
        ));
    }
    Ok(out)
}

fn power_set(base: &PointSet, out: GroupParams, k: u32) -> Result<PointSet> {
    let block = base.params().order();
    let members = base.to_vec();
    let mut cur: Vec<u64> = vec![0];
    let mut weight = 1u64;
    for _ in 0..k {
        cur = cur
            .iter()
            .flat_map(|&c| members.iter().map(move |u| c + u.0 * weight))
            .collect();
        weight *= block;
    }
    PointSet::from_indices(out, cur)
}

/// `(X^k, Y^k, Z^k)` in `F_p^{nk}` under digit-block concatenation.
pub fn tensor_power_system(sys: &TripleSystem, k: u32) -> Result<TripleSystem> {
    let out = power_group(sys.params(), k)?;
    TripleSystem::new(
        power_set(sys.x(), out, k)?,
        power_set(sys.y(), out, k)?,
        power_set(sys.z(), out, k)?,
    )
}

/// All `m^k` block-concatenated triples; cross-freeness holds blockwise.
pub fn tensor_power_matched(m: &MatchedTriples, k: u32) -> Result<MatchedTriples> {
    if !m.is_cross_free() {
        return Err(Error::Precondition("tensor powering needs a verified collection".into()));
    }
    if k == 0 {
        return Err(Error::Precondition("tensor power k must be positive".into()));
    }
    let base = m.params();
    let out = bigger_group(base, base.n() * (k - 1))?;
    let mut cur = vec![Triangle { x: Point(0), y: Point(0), z: Point(0) }];
    let mut weight = 1u64;
    for _ in 0..k {
        cur = cur
            .iter()
            .flat_map(|c| {
                m.triples().iter().map(move |t| Triangle {
                    x: Point(c.x.0 + t.x.0 * weight),
                    y: Point(c.y.0 + t.y.0 * weight),
                    z: Point(c.z.0 + t.z.0 * weight),
                })
            })
            .collect();
        weight *= base.order();
    }
    Ok(MatchedTriples::new(out, cur)?.assume_verified(true))
}

/// The blow-up of a cross-free collection of size `m` by `F_p^l`.
///
/// It has exactly `m p^{2l}` triangles and deletion number exactly `m p^l`.
#[derive(Debug, Clone)]
pub struct Blowup {
    pub base_n: u32,
    pub m: u64,
    pub l: u32,
    pub params: GroupParams,
    /// Dense sets when the group order is at most [`MAX_BLOWUP_ORDER`].
    pub system: Option<TripleSystem>,
}

impl Blowup {
    pub fn triangle_count(&self) -> u128 {
        self.m as u128 * (self.params.p() as u128).pow(2 * self.l)
    }

    pub fn deletion_number(&self) -> u128 {
        self.m as u128 * (self.params.p() as u128).pow(self.l)
    }

    /// `ε = m p^l / p^{n+l}`.
    pub fn epsilon(&self) -> Rational {
        Rational::new(self.deletion_number(), self.params.order() as u128)
    }

    /// `δ = m p^{2l} / p^{2(n+l)}`.
    pub fn delta(&self) -> Rational {
        let n = self.params.order() as u128;
        Rational::new(self.triangle_count(), n * n)
    }
}

pub fn product_blowup(m: &MatchedTriples, l: u32) -> Result<Blowup> {
    if !m.is_cross_free() {
        return Err(Error::Precondition("blow-up needs a verified collection".into()));
    }
    let base = m.params();
    let params = bigger_group(base, l)?;
    let system = if params.order() <= MAX_BLOWUP_ORDER {
        let tails: Vec<u64> = (0..(params.p() as u64).pow(l)).map(|t| t * base.order()).collect();
        let spread = |pick: fn(&Triangle) -> Point| {
            PointSet::from_indices(
                params,
                m.triples().iter().flat_map(|t| {
                    let head = pick(t).0;
                    tails.iter().map(move |&tail| head + tail)
                }),
            )
        };
        Some(TripleSystem::new(spread(|t| t.x)?, spread(|t| t.y)?, spread(|t| t.z)?)?)
    } else {
        None
    };
    Ok(Blowup {
        base_n: base.n(),
        m: m.len() as u64,
        l,
        params,
        system,
    })
}

/// One member of a constructed family: `ε = m/p^n`, `δ = m/p^{2n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyPoint {
    pub n: u32,
    pub k: u32,
    pub m: u128,
    pub epsilon: Rational,
    pub delta: Rational,
    /// `log δ / log ε`; `None` when `ε = 1`.
    pub exponent: Option<f64>,
}

fn ln_ratio(r: &Rational) -> f64 {
    (*r.numer() as f64).ln() - (*r.denom() as f64).ln()
}

/// `log δ / log ε = 1 + 1/(1 - log_p m / n)` computed from exact rationals.
pub fn family_exponent(epsilon: &Rational, delta: &Rational) -> Option<f64> {
    let le = ln_ratio(epsilon);
    if le == 0.0 {
        return None;
    }
    Some(ln_ratio(delta) / le)
}

fn checked_pow(base: &Rational, k: u32) -> Option<Rational> {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for _ in 0..k {
        num = num.checked_mul(*base.numer())?;
        den = den.checked_mul(*base.denom())?;
    }
    Some(Rational::new(num, den))
}

/// Rows `(nk, m^k, ε^k, δ^k, exponent)` for `k = 1..=k_max` per base.
///
/// Each row's ε and δ are checked to be exact `k`-th powers of the base's, so
/// the exponent is the base exponent on every row. Rows whose denominators
/// overflow 128 bits are omitted.
pub fn family_curve(bases: &[MatchedTriples], k_max: u32) -> Result<Vec<FamilyPoint>> {
    let mut rows = Vec::new();
    for base in bases {
        if !base.is_cross_free() {
            return Err(Error::Precondition("family bases must be verified".into()));
        }
        let g = base.params();
        let m = base.len() as u128;
        let order = g.order() as u128;
        let eps1 = Rational::new(m, order);
        let delta1 = Rational::new(m, order * order);
        let exponent = family_exponent(&eps1, &delta1);
        for k in 1..=k_max {
            let Some(n_k) = g.n().checked_mul(k) else { break };
            let Some(p_nk) = (g.p() as u128).checked_pow(n_k) else { break };
            let Some(p_2nk) = p_nk.checked_mul(p_nk) else { break };
            let Some(m_k) = m.checked_pow(k) else { break };
            let epsilon = Rational::new(m_k, p_nk);
            let delta = Rational::new(m_k, p_2nk);
            if checked_pow(&eps1, k) != Some(epsilon) || checked_pow(&delta1, k) != Some(delta) {
                return Err(Error::Invariant(format!(
                    "row k = {k} is not the k-th power of its base"
                )));
            }
            rows.push(FamilyPoint {
                n: n_k,
                k,
                m: m_k,
                epsilon,
                delta,
                exponent,
            });
        }
    }
    Ok(rows)
}
