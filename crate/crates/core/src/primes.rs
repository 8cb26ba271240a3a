//! Segmented sieve of Eratosthenes.

use crate::error::{Error, Result};

/// Default sieve limit: the top of the range covered by window certificates.
pub const DEFAULT_SIEVE_LIMIT: u64 = 50_216;

const SEGMENT_LEN: u64 = 1 << 15;

/// All primes up to `limit`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Number of primes `<= x`.
    pub fn count_at_most(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }

    /// Largest prime `<= x`, if any.
    pub fn largest_at_most(&self, x: u64) -> Option<u64> {
        match self.count_at_most(x) {
            0 => None,
            c => Some(self.primes[c - 1]),
        }
    }

    pub fn contains(&self, x: u64) -> bool {
        self.primes.binary_search(&x).is_ok()
    }

    pub(crate) fn require(&self, needed: u64) -> Result<()> {
        if needed > self.limit {
            return Err(Error::TableTooSmall {
                limit: self.limit,
                needed,
            });
        }
        Ok(())
    }
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let mut composite = vec![false; limit as usize + 1];
    let mut primes = Vec::new();
    for i in 2..=limit as usize {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= limit as usize {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// Returns every prime `<= limit`.
pub fn sieve(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::domain(format!(
            "sieve limit must be at least 2, got {limit}"
        )));
    }
    let base = simple_sieve(limit.isqrt());
    let mut primes = Vec::new();
    let mut mark = vec![false; SEGMENT_LEN as usize];
    let mut lo = 2u64;
    while lo <= limit {
        let hi = (lo + SEGMENT_LEN - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        mark[..len].fill(false);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut m = (p * p).max(lo.div_ceil(p) * p);
            while m <= hi {
                mark[(m - lo) as usize] = true;
                m += p;
            }
        }
        primes.extend(
            mark[..len]
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(off, _)| lo + off as u64),
        );
        lo = hi + 1;
    }
    Ok(PrimeTable { limit, primes })
}

/// Trial-division primality, for validating arguments.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d <= n / d {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}
