//! The rate `c_p` of multicolored sum-free collections, the removal exponent
//! `C_p = 1 + 1/c_p`, and the degree-pruning schedule.
//!
//! `c_p` is defined by `p^{1 - c_p} = inf_{0<x<1} h_p(x)` with
//! `h_p(x) = x^{-(p-1)/3} (1 + x + ... + x^{p-1})`. All logarithms here are
//! base 2; [`log2_ratio`] is the single place where bases are converted.

use crate::error::{Error, Result};
use crate::fpn::{is_prime, MAX_PRIME};

/// Bracket width used by [`ExponentTable::for_prime`].
pub const DEFAULT_TOL: f64 = 1e-12;

const SCAN_POINTS: usize = 1000;
const GRID_POINTS: usize = 10_000;
const SCHEDULE_MAX_LOG2: u32 = 64;

/// `log_base(value)` via base-2 logarithms.
pub fn log2_ratio(value: f64, base: f64) -> f64 {
    value.log2() / base.log2()
}

fn check_prime(p: u32) -> Result<()> {
    if !is_prime(p) || p > MAX_PRIME {
        return Err(Error::InvalidParams(format!(
            "p = {p} is not a supported prime (2..={MAX_PRIME})"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentTable {
    pub p: u32,
    pub c_p: f64,
    /// `C_p = 1 + 1/c_p`.
    pub big_c_p: f64,
    /// Minimizer of `h_p` on `(0, 1)`.
    pub x_star: f64,
    /// `h_p(x_star) = p^{1 - c_p}`.
    pub h_star: f64,
    /// `a = (√33 - 1)/8` for `p = 3`.
    pub a: Option<f64>,
    /// `b = a^{-2/3} + a^{1/3} + a^{4/3}` for `p = 3`.
    pub b: Option<f64>,
}

impl ExponentTable {
    pub fn for_prime(p: u32) -> Result<Self> {
        solve_exponent(p, DEFAULT_TOL)
    }

    fn from_minimum(p: u32, x_star: f64, h_star: f64) -> Self {
        let c_p = 1.0 - log2_ratio(h_star, p as f64);
        ExponentTable {
            p,
            c_p,
            big_c_p: 1.0 + 1.0 / c_p,
            x_star,
            h_star,
            a: None,
            b: None,
        }
    }
}

fn h_unchecked(p: u32, x: f64) -> f64 {
    let sum = (0..p).fold(0.0, |acc, _| acc * x + 1.0);
    x.powf(-((p - 1) as f64) / 3.0) * sum
}

fn log_h(p: u32, x: f64) -> f64 {
    h_unchecked(p, x).ln()
}

/// `d/dx log h_p(x) = -(p-1)/(3x) + S'(x)/S(x)` with `S(x) = Σ_{j<p} x^j`.
fn log_h_slope(p: u32, x: f64) -> f64 {
    let (mut s, mut ds) = (0.0, 0.0);
    for j in 0..p {
        s += x.powi(j as i32);
        if j > 0 {
            ds += j as f64 * x.powi(j as i32 - 1);
        }
    }
    -((p - 1) as f64) / (3.0 * x) + ds / s
}

/// `h_p(x) = x^{-(p-1)/3} Σ_{j=0}^{p-1} x^j` for `0 < x < 1`.
pub fn objective_h(p: u32, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("x = {x} is outside (0, 1)")));
    }
    Ok(h_unchecked(p, x))
}

/// Minimizes `h_p` on `(0, 1)`.
///
/// A sign scan of `(log h_p)'` on a uniform grid must find exactly one sign
/// change; golden-section search on `log h_p` then shrinks that bracket to
/// width `tol`.
pub fn solve_exponent(p: u32, tol: f64) -> Result<ExponentTable> {
    check_prime(p)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let grid: Vec<f64> = (1..SCAN_POINTS).map(|i| i as f64 / SCAN_POINTS as f64).collect();
    let signs: Vec<bool> = grid.iter().map(|&x| log_h_slope(p, x) > 0.0).collect();
    let changes: Vec<usize> = (1..signs.len()).filter(|&i| signs[i] != signs[i - 1]).collect();
    if changes.len() != 1 || signs[0] {
        return Err(Error::NonUnimodal {
            sign_changes: changes.len(),
        });
    }
    let i = changes[0];
    let (lo, hi) = (grid[i - 1], grid[i]);
    let x_star = golden_section(|x| log_h(p, x), lo, hi, tol);
    Ok(ExponentTable::from_minimum(p, x_star, h_unchecked(p, x_star)))
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`;
/// returns the midpoint of the final bracket.
fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut iters = 0;
    while b - a > tol && iters < 200 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        iters += 1;
    }
    0.5 * (a + b)
}

/// Closed forms for `p ∈ {2, 3}`.
///
/// `p = 2`: `x* = 1/2` and `c_2 = 5/3 - log₂3`.
/// `p = 3`: `x* = a = (√33 - 1)/8`, the positive root of `4x² + x - 2`, and
/// `c_3 = 1 - log b / log 3`.
pub fn closed_form(p: u32) -> Result<ExponentTable> {
    match p {
        2 => {
            let c_p = 5.0 / 3.0 - 3f64.log2();
            Ok(ExponentTable {
                p,
                c_p,
                big_c_p: 1.0 + 1.0 / c_p,
                x_star: 0.5,
                h_star: 3.0 * 2f64.powf(-2.0 / 3.0),
                a: None,
                b: None,
            })
        }
        3 => {
            let a = (33f64.sqrt() - 1.0) / 8.0;
            let b = a.powf(-2.0 / 3.0) + a.powf(1.0 / 3.0) + a.powf(4.0 / 3.0);
            let c_p = 1.0 - log2_ratio(b, 3.0);
            Ok(ExponentTable {
                p,
                c_p,
                big_c_p: 1.0 + 1.0 / c_p,
                x_star: a,
                h_star: b,
                a: Some(a),
                b: Some(b),
            })
        }
        _ => Err(Error::Unsupported(format!("no closed form for p = {p}"))),
    }
}

/// `(ε/3)^{C_p}`.
pub fn delta_lower_bound(p: u32, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps = {eps} is outside (0, 1)")));
    }
    let table = ExponentTable::for_prime(p)?;
    Ok((eps / 3.0).powf(table.big_c_p))
}

/// `p^{(1 - c_p) n}`, the largest possible multicolored sum-free collection.
pub fn sumfree_size_bound(p: u32, n: u32) -> Result<f64> {
    let table = ExponentTable::for_prime(p)?;
    Ok((p as f64).powf((1.0 - table.c_p) * n as f64))
}

/// `floor(p^{(1 - c_p) n})` as an integer cap on collection sizes.
pub fn sumfree_cap(p: u32, n: u32) -> Result<u64> {
    Ok(sumfree_size_bound(p, n)?.floor() as u64)
}

/// Pruning threshold function `g(β) = log²(1/β)` on `(0, a_p]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruneSchedule {
    pub p: u32,
    pub c_p: f64,
    /// `a_p = 2^{-a_p_log2}`.
    pub a_p: f64,
    pub a_p_log2: u32,
}

/// Outcome of checking the schedule conditions on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleCheck {
    pub g_increases: bool,
    pub g_beta_decreases: bool,
    pub balance_decreases: bool,
    /// Certified upper bound on `Σ_{i≥1} 1/g(2^{-i} a_p)`.
    pub sum_bound: f64,
}

impl ScheduleCheck {
    pub fn admissible(&self) -> bool {
        self.g_increases && self.g_beta_decreases && self.balance_decreases && self.sum_bound <= 0.25
    }
}

impl PruneSchedule {
    pub fn g(&self, beta: f64) -> f64 {
        prune_g(beta)
    }

    pub fn check(&self) -> ScheduleCheck {
        check_schedule(self.c_p, self.a_p_log2)
    }

    /// Smallest `ε` for which the pruning argument applies at density `δ`:
    /// `(125 p²)^{1/(1+c_p)} δ^{c_p/(1+c_p)} g(δ)`.
    pub fn eps_threshold(&self, delta: f64) -> f64 {
        let c = self.c_p;
        let p2 = (self.p as f64).powi(2);
        (125.0 * p2).powf(1.0 / (1.0 + c)) * delta.powf(c / (1.0 + c)) * prune_g(delta)
    }
}

/// `log2(1/β)^2`.
pub fn prune_g(beta: f64) -> f64 {
    let l = -beta.log2();
    l * l
}

fn check_schedule(c_p: f64, k: u32) -> ScheduleCheck {
    // Log-spaced grid descending from a_p = 2^{-k} over 256 octaves.
    let span = 256.0;
    let log_betas: Vec<f64> = (0..GRID_POINTS)
        .map(|j| -(k as f64) - span * j as f64 / (GRID_POINTS - 1) as f64)
        .collect();
    // With L = log2(1/β): g = L², log2(g β) = 2 log2 L - L,
    // log2(β^c g^{1+c}) = -c L + 2 (1 + c) log2 L.
    let ls: Vec<f64> = log_betas.iter().map(|&lb| -lb).collect();
    let g: Vec<f64> = ls.iter().map(|l| l * l).collect();
    let g_beta: Vec<f64> = ls.iter().map(|&l| 2.0 * l.log2() - l).collect();
    let balance: Vec<f64> = ls
        .iter()
        .map(|&l| -c_p * l + 2.0 * (1.0 + c_p) * l.log2())
        .collect();
    // Walking the grid, β decreases.
    let g_increases = g.windows(2).all(|w| w[1] > w[0]);
    let g_beta_decreases = g_beta.windows(2).all(|w| w[1] < w[0]);
    let balance_decreases = balance.windows(2).all(|w| w[1] < w[0]);
    // Σ_{i=1}^{I} 1/(k+i)² plus the tail Σ_{i>I} 1/(k+i)² ≤ 1/(k+I).
    let terms = GRID_POINTS as u32;
    let partial: f64 = (1..=terms).map(|i| 1.0 / ((k + i) as f64).powi(2)).sum();
    let sum_bound = partial + 1.0 / (k + terms) as f64;
    ScheduleCheck {
        g_increases,
        g_beta_decreases,
        balance_decreases,
        sum_bound,
    }
}

/// Largest `a_p = 2^{-k} ≤ 5/p⁴` for which `g(β) = log²(1/β)` passes every
/// schedule condition.
pub fn build_prune_schedule(p: u32) -> Result<PruneSchedule> {
    let table = ExponentTable::for_prime(p)?;
    let limit = 5.0 / (p as f64).powi(4);
    let first_k = (1..=SCHEDULE_MAX_LOG2)
        .find(|&k| 2f64.powi(-(k as i32)) <= limit)
        .unwrap_or(SCHEDULE_MAX_LOG2);
    for k in first_k..=SCHEDULE_MAX_LOG2 {
        if check_schedule(table.c_p, k).admissible() {
            return Ok(PruneSchedule {
                p,
                c_p: table.c_p,
                a_p: 2f64.powi(-(k as i32)),
                a_p_log2: k,
            });
        }
    }
    Err(Error::Schedule(format!(
        "no power of two down to 2^-{SCHEDULE_MAX_LOG2} satisfies the conditions for p = {p}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRIMES: [u32; 7] = [2, 3, 5, 7, 11, 13, 17];

    #[test]
    fn objective_examples() {
        // Direct evaluation: 2^{1/3} * 3/2 = 3 * 2^{-2/3}.
        let v = objective_h(2, 0.5).unwrap();
        assert!((v - 3.0 * 2f64.powf(-2.0 / 3.0)).abs() < 1e-15);
        assert!((v - 1.889_882).abs() < 1e-6);
        for p in PRIMES {
            assert!((objective_h(p, 1.0 - 1e-12).unwrap() - p as f64).abs() < 1e-9);
        }
        let a = (33f64.sqrt() - 1.0) / 8.0;
        assert!((a - 0.593_070).abs() < 1e-6);
        let b = objective_h(3, a).unwrap();
        assert!((b - 2.755_104_6).abs() < 1e-6, "b = {b}");
        assert!(objective_h(2, 0.0).is_err());
        assert!(objective_h(2, 1.0).is_err());
        assert!(objective_h(2, f64::NAN).is_err());
    }

    #[test]
    fn headline_constants() {
        let t2 = solve_exponent(2, DEFAULT_TOL).unwrap();
        assert!((t2.c_p - (5.0 / 3.0 - 3f64.log2())).abs() < 1e-9);
        assert!((t2.c_p - 0.0817).abs() < 5e-5);
        assert!((t2.big_c_p - 13.239).abs() < 5e-4);
        let t3 = solve_exponent(3, DEFAULT_TOL).unwrap();
        assert!((t3.c_p - 0.0775).abs() < 5e-5);
        assert!((t3.big_c_p - 13.901).abs() < 5e-4);
    }

    #[test]
    fn closed_forms_agree_with_optimizer() {
        for p in [2, 3] {
            let cf = closed_form(p).unwrap();
            let opt = solve_exponent(p, DEFAULT_TOL).unwrap();
            assert!((cf.c_p - opt.c_p).abs() <= 1e-9, "p = {p}");
            assert!((cf.x_star - opt.x_star).abs() < 1e-6);
        }
        let cf2 = closed_form(2).unwrap();
        assert_eq!(cf2.x_star, 0.5);
        // Stationary point of x^{-1/3}(1+x): -1/3 x^{-4/3} + 2/3 x^{-1/3} = 0.
        let x = 0.5f64;
        assert!((-x.powf(-4.0 / 3.0) / 3.0 + 2.0 / 3.0 * x.powf(-1.0 / 3.0)).abs() < 1e-15);
        let cf3 = closed_form(3).unwrap();
        let a = cf3.a.unwrap();
        assert!((4.0 * a * a + a - 2.0).abs() < 1e-12);
        assert!((cf3.b.unwrap() - cf3.h_star).abs() < 1e-15);
        assert!(matches!(closed_form(5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn table_identities_and_minimality() {
        let mut prev = f64::INFINITY;
        for p in PRIMES {
            let t = solve_exponent(p, DEFAULT_TOL).unwrap();
            assert!(t.c_p > 0.0 && t.c_p < 1.0);
            assert!(t.c_p < prev, "c_p must decrease in p");
            prev = t.c_p;
            assert!(((1.0 + 1.0 / t.c_p) - t.big_c_p).abs() <= 1e-10 * t.big_c_p);
            let lhs = (p as f64).powf(1.0 - t.c_p);
            assert!((lhs - t.h_star).abs() <= 1e-10 * t.h_star);
            let band = t.c_p * (p as f64).log2();
            assert!(band > 0.05 && band < 0.5, "c_p log p = {band}");
            for i in 1..GRID_POINTS {
                let x = i as f64 / GRID_POINTS as f64;
                assert!(t.h_star <= objective_h(p, x).unwrap() + 1e-15);
            }
        }
    }

    #[test]
    fn solver_errors() {
        assert!(solve_exponent(4, 1e-9).is_err());
        assert!(solve_exponent(2, 0.0).is_err());
        assert!(solve_exponent(19, 1e-9).is_err());
    }

    #[test]
    fn delta_bound_examples() {
        let c2 = 1.0 + 1.0 / (5.0 / 3.0 - 3f64.log2());
        let near_one = delta_lower_bound(2, 1.0 - 1e-12).unwrap();
        assert!((near_one / (1.0f64 / 3.0).powf(c2) - 1.0).abs() < 1e-9);
        assert!((near_one - 4.8224e-7).abs() < 1e-10);
        let at_03 = delta_lower_bound(2, 0.3).unwrap();
        assert!((at_03 - 10f64.powf(-c2)).abs() < 1e-20);
        assert!((at_03 - 5.8e-14).abs() < 0.1e-14);
        assert!(delta_lower_bound(2, 0.1).unwrap() < at_03);
        assert!(delta_lower_bound(2, 0.0).is_err());
        assert!(delta_lower_bound(2, 1.0).is_err());
    }

    #[test]
    fn sumfree_bound_examples() {
        let b1 = sumfree_size_bound(2, 1).unwrap();
        assert!((b1 - 1.889).abs() < 1e-3);
        let b4 = sumfree_size_bound(2, 4).unwrap();
        assert!((b4 - 12.76).abs() < 1e-2);
        assert_eq!(sumfree_size_bound(2, 0).unwrap(), 1.0);
        let caps: Vec<u64> = (0..=4).map(|n| sumfree_cap(2, n).unwrap()).collect();
        assert_eq!(caps, vec![1, 1, 3, 6, 12]);
    }

    #[test]
    fn schedule_examples() {
        assert_eq!(prune_g(2f64.powi(-10)), 100.0);
        for p in PRIMES {
            let s = build_prune_schedule(p).unwrap();
            assert!(s.a_p > 0.0 && s.a_p <= 5.0 / (p as f64).powi(4));
            let check = s.check();
            assert!(check.admissible(), "p = {p}: {check:?}");
            // The next larger power of two must fail, unless capped by 5/p⁴.
            if 2.0 * s.a_p <= 5.0 / (p as f64).powi(4) {
                assert!(!check_schedule(s.c_p, s.a_p_log2 - 1).admissible());
            }
        }
    }

    #[test]
    fn schedule_sum_condition_alone() {
        // Σ_{i≥1} 1/(k+i)² ≤ 1/4 first holds at k = 4 (π²/6 - 205/144 ≈ 0.2213).
        let c = ExponentTable::for_prime(2).unwrap().c_p;
        assert!(check_schedule(c, 4).sum_bound <= 0.25);
        assert!(check_schedule(c, 3).sum_bound > 0.25);
        // The balance condition β^c g^{1+c} is what forces a_2 far below 2^{-4}.
        let s = build_prune_schedule(2).unwrap();
        assert_eq!(s.a_p_log2, 39);
    }
}
