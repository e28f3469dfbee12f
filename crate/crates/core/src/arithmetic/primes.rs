//! Prime counting with a cached odd-only bitset sieve of Eratosthenes.

use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};

/// Largest argument accepted by [`prime_count`].
pub const PRIME_MAX: u64 = 100_000_000;

/// Odd-only sieve up to `limit`; bit `i` of the table stands for `2i + 1`.
#[derive(Debug, Clone)]
pub struct PrimeSieve {
    limit: u64,
    bits: Vec<u64>,
    // primes among the odd numbers below word i, plus the prime 2
    word_prefix: Vec<u32>,
}

impl PrimeSieve {
    pub fn new(limit: u64) -> Self {
        let limit = limit.max(2);
        let odd_count = limit.div_ceil(2) as usize + 1;
        let words = odd_count.div_ceil(64);
        let mut bits = vec![u64::MAX; words];
        bits[0] &= !1; // 1 is not prime
        let mut i = 1usize;
        loop {
            let p = 2 * i as u64 + 1;
            if p * p > limit {
                break;
            }
            if bits[i / 64] >> (i % 64) & 1 == 1 {
                let mut j = (p * p / 2) as usize;
                while j < words * 64 {
                    bits[j / 64] &= !(1u64 << (j % 64));
                    j += p as usize;
                }
            }
            i += 1;
        }
        // clear bits beyond the limit
        let last = ((limit - 1) / 2) as usize;
        for j in (last + 1)..words * 64 {
            bits[j / 64] &= !(1u64 << (j % 64));
        }
        let mut word_prefix = Vec::with_capacity(words + 1);
        let mut acc = 1u32;
        for w in &bits {
            word_prefix.push(acc);
            acc += w.count_ones();
        }
        word_prefix.push(acc);
        Self {
            limit,
            bits,
            word_prefix,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit);
        match n {
            0 | 1 => false,
            2 => true,
            _ if n % 2 == 0 => false,
            _ => {
                let i = (n / 2) as usize;
                self.bits[i / 64] >> (i % 64) & 1 == 1
            }
        }
    }

    /// `π(n)` for `n ≤ limit`.
    pub fn count(&self, n: u64) -> u64 {
        assert!(n <= self.limit);
        if n < 2 {
            return 0;
        }
        // odd numbers ≤ n are bits 0..=(n−1)/2
        let i = ((n - 1) / 2) as usize;
        let word = i / 64;
        let mask = if i % 64 == 63 {
            u64::MAX
        } else {
            (1u64 << (i % 64 + 1)) - 1
        };
        self.word_prefix[word] as u64 + (self.bits[word] & mask).count_ones() as u64
    }

    /// Primes in ascending order up to `limit`.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        std::iter::once(2).chain(self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as u64;
                rest &= rest - 1;
                Some(2 * (w as u64 * 64 + b) + 1)
            })
        }))
    }
}

fn cache() -> &'static RwLock<Arc<PrimeSieve>> {
    static CACHE: OnceLock<RwLock<Arc<PrimeSieve>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(Arc::new(PrimeSieve::new(1 << 16))))
}

/// A shared sieve covering at least `limit`, grown geometrically on demand.
pub fn shared_sieve(limit: u64) -> Result<Arc<PrimeSieve>> {
    if limit > PRIME_MAX {
        return Err(Error::Budget {
            op: "prime sieve",
            required: limit,
            budget: PRIME_MAX,
        });
    }
    {
        let current = cache().read().expect("prime cache poisoned");
        if current.limit() >= limit {
            return Ok(current.clone());
        }
    }
    let mut guard = cache().write().expect("prime cache poisoned");
    if guard.limit() < limit {
        let target = (limit.max(guard.limit() * 2)).min(PRIME_MAX);
        *guard = Arc::new(PrimeSieve::new(target));
    }
    Ok(guard.clone())
}

/// `π(⌊x⌋)` for `2 ≤ x ≤ 10⁸`.
pub fn prime_count(x: f64) -> Result<u64> {
    if !(x >= 2.0) || x.is_nan() {
        return Err(Error::domain("prime_count", x, "x >= 2"));
    }
    if x > PRIME_MAX as f64 {
        return Err(Error::Budget {
            op: "prime_count",
            required: x as u64,
            budget: PRIME_MAX,
        });
    }
    let n = x.floor() as u64;
    Ok(shared_sieve(n)?.count(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(prime_count(10.0).unwrap(), 4);
        assert_eq!(prime_count(100.0).unwrap(), 25);
        assert_eq!(prime_count(2.0).unwrap(), 1);
        assert_eq!(prime_count(2.9).unwrap(), 1);
        assert!(prime_count(1.9).is_err());
    }

    #[test]
    fn counts_against_trial_division() {
        let sieve = PrimeSieve::new(5000);
        let mut count = 0;
        for n in 0..=5000u64 {
            let prime = n >= 2 && (2..n).take_while(|k| k * k <= n).all(|k| n % k != 0);
            assert_eq!(sieve.is_prime(n), prime, "n={n}");
            if prime {
                count += 1;
            }
            assert_eq!(sieve.count(n), count, "n={n}");
        }
        assert_eq!(sieve.primes().count() as u64, count);
    }
}
