//! Exact convolution on `F_p^n` by axis-wise length-`p` DFTs modulo primes
//! `q ≡ 1 (mod p)`.
//!
//! The transform of `f` is `f̂(ξ) = Σ_x f(x) ω^{<x, ξ>}` with `ω` a primitive
//! `p`-th root of unity mod `q`, evaluated one digit axis at a time
//! (`O(N n p)` multiplications). For `p = 2` this is the Walsh-Hadamard
//! butterfly with `ω = q - 1`. Results are recovered exactly whenever the true
//! integer values stay below the product of the moduli in the plan.

use crate::error::{Error, Result};
use crate::fpn::{GroupParams, PointSet};

/// Default modulus size. Products of two residues fit in `u128`.
pub const DEFAULT_BIT_BUDGET: u32 = 62;

#[inline]
fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A prime `q ≡ 1 (mod p)` with a primitive `p`-th root of unity `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Modulus {
    pub q: u64,
    pub omega: u64,
}

impl Modulus {
    /// Largest admissible prime strictly below `limit`.
    fn largest_below(p: u32, limit: u64) -> Option<Modulus> {
        let p64 = p as u64;
        if limit < 3 {
            return None;
        }
        let mut k = (limit - 2) / p64;
        while k > 0 {
            let q = k * p64 + 1;
            if q % 2 == 1 && is_prime_u64(q) {
                let omega = (2..q)
                    .map(|g| pow_mod(g, (q - 1) / p64, q))
                    .find(|&w| w != 1)?;
                return Some(Modulus { q, omega });
            }
            k -= 1;
        }
        None
    }
}

/// One or two moduli whose product exceeds every value to be recovered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulusPlan {
    p: u32,
    moduli: Vec<Modulus>,
}

impl ModulusPlan {
    /// Plans moduli below `2^bit_budget` able to recover integers in `[0, bound]`.
    pub fn new(p: u32, bound: u128, bit_budget: u32) -> Result<Self> {
        let budget = bit_budget.clamp(2, DEFAULT_BIT_BUDGET);
        let first = Modulus::largest_below(p, 1u64 << budget).ok_or_else(|| {
            Error::capacity(format!("no prime q ≡ 1 mod {p} below 2^{budget}"), None)
        })?;
        if (first.q as u128) > bound {
            return Ok(ModulusPlan {
                p,
                moduli: vec![first],
            });
        }
        let second = Modulus::largest_below(p, first.q).ok_or_else(|| {
            Error::capacity(format!("no second prime q ≡ 1 mod {p} below 2^{budget}"), None)
        })?;
        if (first.q as u128) * (second.q as u128) > bound {
            return Ok(ModulusPlan {
                p,
                moduli: vec![first, second],
            });
        }
        Err(Error::capacity(
            format!("two moduli below 2^{budget} cannot represent values up to {bound}"),
            Some(bound),
        ))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn moduli(&self) -> &[Modulus] {
        &self.moduli
    }

    /// Chinese remainder reconstruction of one value from its residues.
    fn combine(&self, residues: &[u64]) -> u128 {
        match self.moduli.as_slice() {
            [_] => residues[0] as u128,
            [m1, m2] => {
                let (r1, r2) = (residues[0], residues[1]);
                let inv = pow_mod(m1.q % m2.q, m2.q - 2, m2.q);
                let diff = (r2 % m2.q + m2.q - r1 % m2.q) % m2.q;
                let t = mul_mod(diff, inv, m2.q);
                r1 as u128 + m1.q as u128 * t as u128
            }
            _ => unreachable!("plans hold one or two moduli"),
        }
    }
}

/// Transforms of one function, one vector per modulus.
#[derive(Debug, Clone)]
pub struct Spectrum(Vec<Vec<u64>>);

/// Convolution engine for a fixed group and modulus plan.
#[derive(Debug, Clone)]
pub struct Convolver {
    params: GroupParams,
    plan: ModulusPlan,
}

impl Convolver {
    pub fn new(params: GroupParams, bound: u128, bit_budget: u32) -> Result<Self> {
        Ok(Convolver {
            plan: ModulusPlan::new(params.p(), bound, bit_budget)?,
            params,
        })
    }

    pub fn plan(&self) -> &ModulusPlan {
        &self.plan
    }

    pub fn spectrum(&self, set: &PointSet) -> Spectrum {
        let ind = set.indicator();
        Spectrum(
            self.plan
                .moduli
                .iter()
                .map(|m| {
                    let mut data: Vec<u64> = ind.iter().map(|&b| b as u64).collect();
                    axis_dft(&mut data, &self.params, m.q, m.omega);
                    data
                })
                .collect(),
        )
    }

    /// `(f * g)(s) = Σ_{a + b = s} f(a) g(b)` from the two spectra.
    pub fn convolve(&self, f: &Spectrum, g: &Spectrum) -> Vec<u64> {
        let p = self.params.p() as u64;
        let residues: Vec<Vec<u64>> = self
            .plan
            .moduli
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let mut data: Vec<u64> = f.0[i]
                    .iter()
                    .zip(&g.0[i])
                    .map(|(&a, &b)| mul_mod(a, b, m.q))
                    .collect();
                let inv_root = pow_mod(m.omega, p - 1, m.q);
                axis_dft(&mut data, &self.params, m.q, inv_root);
                let n_inv = pow_mod(pow_mod(p, m.q - 2, m.q), self.params.n() as u64, m.q);
                data.iter_mut().for_each(|v| *v = mul_mod(*v, n_inv, m.q));
                data
            })
            .collect();
        let len = self.params.order() as usize;
        let mut buf = vec![0u64; residues.len()];
        (0..len)
            .map(|s| {
                for (slot, r) in buf.iter_mut().zip(&residues) {
                    *slot = r[s];
                }
                self.plan.combine(&buf) as u64
            })
            .collect()
    }
}

/// In-place length-`p` DFT along every digit axis with root `root` mod `q`.
fn axis_dft(data: &mut [u64], params: &GroupParams, q: u64, root: u64) {
    let p = params.p() as usize;
    let mut pows = vec![1u64; p];
    for k in 1..p {
        pows[k] = mul_mod(pows[k - 1], root, q);
    }
    let mut line = vec![0u64; p];
    let mut stride = 1usize;
    for _ in 0..params.n() {
        let block = stride * p;
        for start in (0..data.len()).step_by(block) {
            for lo in 0..stride {
                let base = start + lo;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + j * stride];
                }
                for k in 0..p {
                    let mut acc = 0u64;
                    for (j, &v) in line.iter().enumerate() {
                        acc += mul_mod(v, pows[(j * k) % p], q);
                        if acc >= q {
                            acc -= q;
                        }
                    }
                    data[base + k * stride] = acc;
                }
            }
        }
        stride = block;
    }
}
