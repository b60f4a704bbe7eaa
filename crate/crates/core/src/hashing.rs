//! Polynomial hashing over a prime field and the universe subsampler built on it.
//!
//! A uniformly random polynomial of degree `d - 1` over `GF(p)` is exactly
//! `d`-wise independent on distinct points of the field. The subsampler keeps
//! an element iff its hash lands below `⌊p_keep · prime⌋`, which realizes any
//! keep-probability to within `1/prime`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::setstream::ElementId;

/// Default ceiling on the independence degree of subsampling hashes.
pub const DEFAULT_MAX_DEGREE: usize = 4096;

const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

const MERSENNE_61: u64 = (1 << 61) - 1;

/// `v mod 2^61 - 1` for `v < 2^122 + 2^61`.
#[inline]
fn mersenne_reduce(v: u128) -> u64 {
    let folded = (v & MERSENNE_61 as u128) as u64 + (v >> 61) as u64;
    let folded = (folded & MERSENNE_61) + (folded >> 61);
    if folded >= MERSENNE_61 {
        folded - MERSENNE_61
    } else {
        folded
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin; the witness set is exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_WITNESSES {
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

/// Smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut candidate = n.max(2);
    while !is_prime(candidate) {
        candidate += 1;
    }
    candidate
}

/// `2λ` rounded up to a power of two, clamped to `[1, max_degree]`.
pub fn independence_degree(lambda: f64, max_degree: usize) -> usize {
    let wanted = (2.0 * lambda).ceil().max(1.0);
    let wanted = if wanted >= max_degree as f64 { max_degree } else { wanted as usize };
    wanted.next_power_of_two().min(max_degree).max(1)
}

/// `h(x) = Σ c_i x^i mod prime`, with `coefficients.len()` = independence degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyHash {
    prime: u64,
    /// Highest-order coefficient first (Horner order).
    coefficients: Vec<u64>,
    seed: u64,
}

impl PolyHash {
    /// Draws a `degree`-wise independent hash over the smallest prime field
    /// holding both the universe and `degree + 1` points.
    pub fn new(degree: usize, universe_size: u64, seed: u64) -> Result<Self> {
        let floor = universe_size.max(degree as u64 + 1);
        Self::over_prime(degree, next_prime(floor), seed)
    }

    /// Same as [`PolyHash::new`] but over a caller-chosen prime.
    pub fn over_prime(degree: usize, prime: u64, seed: u64) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidParameter("hash degree must be at least 1".into()));
        }
        if !is_prime(prime) {
            return Err(Error::InvalidParameter(format!("{prime} is not prime")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coefficients = (0..degree).map(|_| rng.gen_range(0..prime)).collect();
        Ok(PolyHash { prime, coefficients, seed })
    }

    /// A hash with explicit coefficients (highest order first).
    pub fn from_coefficients(prime: u64, coefficients: Vec<u64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter("need at least one coefficient".into()));
        }
        if !is_prime(prime) {
            return Err(Error::InvalidParameter(format!("{prime} is not prime")));
        }
        if let Some(c) = coefficients.iter().find(|&&c| c >= prime) {
            return Err(Error::InvalidParameter(format!("coefficient {c} outside field")));
        }
        Ok(PolyHash { prime, coefficients, seed: 0 })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Evaluates the polynomial at `x mod prime`.
    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        let p = self.prime;
        let x = x % p;
        if p <= u32::MAX as u64 {
            // every intermediate stays below p^2 + p < 2^64
            self.coefficients.iter().fold(0u64, |acc, &c| (acc * x + c) % p)
        } else if p == MERSENNE_61 {
            self.coefficients.iter().fold(0u64, |acc, &c| mersenne_reduce(acc as u128 * x as u128 + c as u128))
        } else {
            self.coefficients.iter().fold(0u64, |acc, &c| {
                ((acc as u128 * x as u128 + c as u128) % p as u128) as u64
            })
        }
    }
    /// Evaluates at every point of `xs`. Same results as [`PolyHash::eval`],
    /// but for primes below `2^32` several points share each Horner step in
    /// Montgomery form, which hides the multiply latency.
    pub fn eval_many(&self, xs: &[u64]) -> Vec<u64> {
        let p = self.prime;
        if p > u32::MAX as u64 || p == 2 {
            return xs.iter().map(|&x| self.eval(x)).collect();
        }
        // p⁻¹ mod 2^32 by Newton iteration; each step doubles the correct bits.
        let mut inv: u32 = 1;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u32.wrapping_sub((p as u32).wrapping_mul(inv)));
        }
        let redc = |t: u64| -> u64 {
            let m = (t as u32).wrapping_mul(inv);
            let r = (t >> 32) as i64 - ((m as u64 * p) >> 32) as i64;
            if r < 0 {
                (r + p as i64) as u64
            } else {
                r as u64
            }
        };
        let mut out = Vec::with_capacity(xs.len());
        for chunk in xs.chunks(LANES) {
            let mut shifted = [0u64; LANES];
            for (s, &x) in shifted.iter_mut().zip(chunk) {
                *s = ((x % p) << 32) % p;
            }
            let mut acc = [0u64; LANES];
            for &c in &self.coefficients {
                for (a, &s) in acc.iter_mut().zip(&shifted) {
                    let v = redc(*a * s) + c;
                    *a = if v >= p { v - p } else { v };
                }
            }
            out.extend_from_slice(&acc[..chunk.len()]);
        }
        out
    }
}

const LANES: usize = 8;

/// Bernoulli(p) subsampling of the universe via threshold comparison.
#[derive(Clone, Debug)]
pub struct Subsampler {
    hash: PolyHash,
    probability: f64,
    threshold: u64,
    universe_size: u64,
}

impl Subsampler {
    pub fn new(hash: PolyHash, universe_size: u64, probability: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&probability) {
            return Err(Error::InvalidParameter(format!(
                "sampling probability {probability} outside [0, 1]"
            )));
        }
        if universe_size > hash.prime() {
            return Err(Error::InvalidParameter(format!(
                "universe {universe_size} does not fit field of size {}",
                hash.prime()
            )));
        }
        let prime = hash.prime();
        let threshold = if probability >= 1.0 {
            prime
        } else {
            ((probability * prime as f64).floor() as u64).min(prime)
        };
        Ok(Subsampler { hash, probability, threshold, universe_size })
    }

    /// Draws a fresh hash of the given degree and wraps it.
    pub fn build(degree: usize, universe_size: u64, probability: f64, seed: u64) -> Result<Self> {
        Self::new(PolyHash::new(degree, universe_size, seed)?, universe_size, probability)
    }

    pub fn hash(&self) -> &PolyHash {
        &self.hash
    }

    pub fn probability(&self) -> f64 {
        self.probability
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn universe_size(&self) -> u64 {
        self.universe_size
    }

    /// `threshold / prime`, the exact inclusion probability.
    pub fn realized_probability(&self) -> f64 {
        self.threshold as f64 / self.hash.prime() as f64
    }

    /// True when every element is kept and no hashing is needed.
    pub fn is_identity(&self) -> bool {
        self.threshold >= self.hash.prime()
    }

    pub fn member(&self, e: ElementId) -> Result<bool> {
        if e >= self.universe_size {
            return Err(Error::Domain(format!(
                "element {e} outside universe of size {}",
                self.universe_size
            )));
        }
        Ok(self.member_unchecked(e))
    }

    #[inline]
    pub(crate) fn member_unchecked(&self, e: ElementId) -> bool {
        if self.is_identity() {
            true
        } else if self.threshold == 0 {
            false
        } else {
            self.hash.eval(e) < self.threshold
        }
    }

    /// Membership of each of `elements`, computed in one batch.
    pub(crate) fn member_many_unchecked(&self, elements: &[ElementId]) -> Vec<bool> {
        if self.is_identity() || self.threshold == 0 {
            return vec![self.is_identity(); elements.len()];
        }
        self.hash.eval_many(elements).into_iter().map(|h| h < self.threshold).collect()
    }

    /// The elements of `elements` that survive subsampling, order preserved.
    pub fn filter(&self, elements: &[ElementId]) -> Result<Vec<ElementId>> {
        let mut kept = Vec::new();
        for &e in elements {
            if self.member(e)? {
                kept.push(e);
            }
        }
        Ok(kept)
    }
}
