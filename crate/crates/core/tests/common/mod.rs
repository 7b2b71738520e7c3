#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use removal_lab::constructions::tensor_power_matched;
use removal_lab::oracle::{max_matched_exact, OracleBudget};
use removal_lab::{GroupParams, MatchedTriples, Point, Triangle, TripleSystem};

/// Each point joins each of X, Y, Z independently with probability `density`.
pub fn random_system(p: u32, n: u32, density: f64, seed: u64) -> TripleSystem {
    let g = GroupParams::new(p, n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pick = || -> Vec<u64> { (0..g.order()).filter(|_| rng.gen_bool(density)).collect() };
    let (x, y, z) = (pick(), pick(), pick());
    TripleSystem::from_indices(g, &x, &y, &z).unwrap()
}

/// `count` random zero-sum triples (not necessarily cross-free).
pub fn random_triples(p: u32, n: u32, count: usize, seed: u64) -> MatchedTriples {
    let g = GroupParams::new(p, n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ts = (0..count)
        .map(|_| {
            let x = Point(rng.gen_range(0..g.order()));
            let y = Point(rng.gen_range(0..g.order()));
            Triangle { x, y, z: g.third(x, y) }
        })
        .collect();
    MatchedTriples::new(g, ts).unwrap()
}

pub fn max_matched(p: u32, n: u32) -> MatchedTriples {
    max_matched_exact(p, n, OracleBudget::default(), true).unwrap().best
}

/// The first `m` triples of a verified collection, re-verified.
pub fn prefix(m: &MatchedTriples, len: usize) -> MatchedTriples {
    let out = MatchedTriples::new(*m.params(), m.triples()[..len].to_vec())
        .unwrap()
        .verified();
    assert!(out.is_cross_free());
    out
}

/// Cross-free collections with every size `1..=12` for `p = 2` and `p = 3`,
/// taken as prefixes of maxima and their tensor powers.
pub fn blowup_bases(p: u32) -> Vec<MatchedTriples> {
    let big = match p {
        2 => {
            let four = max_matched(2, 4);
            let two = max_matched(2, 2);
            tensor_pair(&four, &two)
        }
        3 => tensor_power_matched(&max_matched(3, 2), 2).unwrap(),
        _ => panic!("bases only for p = 2, 3"),
    };
    let mut out = vec![max_matched(p, 0)];
    for n in 1..=2 {
        let m = max_matched(p, n);
        out.extend((1..=m.len()).map(|k| prefix(&m, k)));
    }
    if p == 2 {
        let m = max_matched(2, 4);
        out.extend((1..=m.len()).map(|k| prefix(&m, k)));
    }
    out.extend((1..=12).map(|k| prefix(&big, k)));
    out
}

/// Product of two collections in different dimensions (blocks `a` then `b`).
pub fn tensor_pair(a: &MatchedTriples, b: &MatchedTriples) -> MatchedTriples {
    let (ga, gb) = (a.params(), b.params());
    let g = GroupParams::new(ga.p(), ga.n() + gb.n()).unwrap();
    let ts = a
        .triples()
        .iter()
        .flat_map(|s| {
            b.triples().iter().map(move |t| Triangle {
                x: ga.concat(s.x, t.x),
                y: ga.concat(s.y, t.y),
                z: ga.concat(s.z, t.z),
            })
        })
        .collect();
    MatchedTriples::new(g, ts).unwrap().verified()
}
