//! Prime-window certificates of non-integrality.
//!
//! A prime `p` with `n/(k+3) < p <= n/(k+1)` and
//! `p > max{(k+2)(k+3)/2, 3k+8}` forces `v_p(S(n,i,k)) = -k` for every `i`,
//! so `S(n,i,k)` is not an integer. All window tests are integer
//! cross-multiplications.

use std::io::{self, Write};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::primes::PrimeTable;
use crate::rational::ExactRational;
use crate::symfun::{k_cap, ScaledRow};

/// `max{(k+2)(k+3)/2, 3k+8}`.
pub fn threshold(k: u64) -> u64 {
    ((k + 2) * (k + 3) / 2).max(3 * k + 8)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub n: u64,
    pub k: u64,
    pub p: u64,
    /// `n / (k+3)`, exclusive lower end of the window.
    pub window_lo: ExactRational,
    /// `n / (k+1)`, inclusive upper end of the window.
    pub window_hi: ExactRational,
    pub threshold: u64,
    /// `floor(n/p)`, the number of multiples of `p` up to `n`.
    pub multiples_in_range: u64,
}

impl Certificate {
    /// Re-checks every invariant from scratch.
    pub fn validate(&self) -> Result<()> {
        let (n, k, p) = (self.n, self.k, self.p);
        let fail = |what: &str| {
            Err(Error::SelfCheck(format!(
                "certificate (n={n}, k={k}, p={p}): {what}"
            )))
        };
        if !((k + 3) * p > n && (k + 1) * p <= n) {
            return fail("p outside the window");
        }
        if p <= threshold(k) || self.threshold != threshold(k) {
            return fail("p not above the threshold");
        }
        if self.multiples_in_range != n / p || !(k + 1..=k + 2).contains(&(n / p)) {
            return fail("floor(n/p) not in {k+1, k+2}");
        }
        let lo = ExactRational::new(n, k + 3)?;
        let hi = ExactRational::new(n, k + 1)?;
        let pq = ExactRational::from(p);
        if self.window_lo != lo || self.window_hi != hi || !(lo < pq && pq <= hi) {
            return fail("window bounds inconsistent");
        }
        Ok(())
    }

    /// Tab-separated `n k p threshold floor(n/p)`.
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.n, self.k, self.p, self.threshold, self.multiples_in_range
        )
    }
}

/// The largest prime qualifying for `(n, k)`, if any.
pub fn find_certificate(n: u64, k: u64, table: &PrimeTable) -> Result<Option<Certificate>> {
    if k == 0 || k >= n {
        return Err(Error::domain(format!(
            "certificate needs 1 <= k < n, got n={n} k={k}"
        )));
    }
    table.require(n)?;
    let th = threshold(k);
    // the largest prime <= n/(k+1) qualifies iff any prime in the window does
    let Some(p) = table.largest_at_most(n / (k + 1)) else {
        return Ok(None);
    };
    if (k + 3) * p <= n || p <= th {
        return Ok(None);
    }
    Ok(Some(Certificate {
        n,
        k,
        p,
        window_lo: ExactRational::new(n, k + 3)?,
        window_hi: ExactRational::new(n, k + 1)?,
        threshold: th,
        multiples_in_range: n / p,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertifyEntry {
    Certified(Certificate),
    Gap { n: u64, k: u64 },
}

impl CertifyEntry {
    pub fn to_line(&self) -> String {
        match self {
            CertifyEntry::Certified(c) => c.to_line(),
            CertifyEntry::Gap { n, k } => format!("GAP\t{n}\t{k}"),
        }
    }
}

/// Results of [`certify_range`], ordered by `(n, k)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CertifyOutcome {
    pub n_lo: u64,
    pub n_hi: u64,
    pub entries: Vec<CertifyEntry>,
}

impl CertifyOutcome {
    pub fn certificates(&self) -> impl Iterator<Item = &Certificate> {
        self.entries.iter().filter_map(|e| match e {
            CertifyEntry::Certified(c) => Some(c),
            CertifyEntry::Gap { .. } => None,
        })
    }

    pub fn gaps(&self) -> Vec<(u64, u64)> {
        self.entries
            .iter()
            .filter_map(|e| match e {
                CertifyEntry::Gap { n, k } => Some((*n, *k)),
                CertifyEntry::Certified(_) => None,
            })
            .collect()
    }

    /// One line per entry, LF-terminated.
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        for e in &self.entries {
            writeln!(w, "{}", e.to_line())?;
        }
        w.flush()
    }
}

/// Attempts a certificate for every `n` in `[n_lo, n_hi]` and every
/// `1 <= k <= k_cap(n)`.
pub fn certify_range(n_lo: u64, n_hi: u64, table: &PrimeTable) -> Result<CertifyOutcome> {
    if n_lo < 2 || n_lo > n_hi {
        return Err(Error::domain(format!("bad range [{n_lo}, {n_hi}]")));
    }
    table.require(n_hi)?;
    let per_n: Vec<Vec<CertifyEntry>> = (n_lo..=n_hi)
        .into_par_iter()
        .map(|n| {
            (1..=k_cap(n) as u64)
                .map(|k| {
                    let cert = find_certificate(n, k, table).expect("range checked above");
                    match cert {
                        Some(c) => CertifyEntry::Certified(c),
                        None => CertifyEntry::Gap { n, k },
                    }
                })
                .collect()
        })
        .collect();
    Ok(CertifyOutcome {
        n_lo,
        n_hi,
        entries: per_n.into_iter().flatten().collect(),
    })
}

/// Outcome of checking `v_p(S(n,i,k)) = -k` over a set of `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationCheck {
    pub n: u64,
    pub k: u64,
    pub p: u64,
    pub indices_checked: u64,
    /// `(i, v_p(S(n,i,k)))` for every index where the valuation was not `-k`.
    pub failures: Vec<(u64, i64)>,
}

impl ValuationCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.indices_checked > 0
    }
}

/// Checks `v_p(S(n,i,k)) = -k` for a single index.
pub fn verify_valuation_property(n: u64, i: u64, k: u64, cert: &Certificate) -> Result<bool> {
    if cert.n != n || cert.k != k {
        return Err(Error::domain(format!(
            "certificate is for (n={}, k={}), not (n={n}, k={k})",
            cert.n, cert.k
        )));
    }
    cert.validate()?;
    let s = crate::symfun::exact_s(n, i, k as usize)?;
    Ok(s.p_adic_valuation(cert.p)? == -(k as i64))
}

/// Checks the valuation property for every `i = 1..=n` and every
/// certificate in `certs`, which must all share the same `n`. The row and
/// each `S(n,i,·)` chain are computed once.
pub fn verify_valuation_all_indices(n: u64, certs: &[Certificate]) -> Result<Vec<ValuationCheck>> {
    if certs.is_empty() {
        return Ok(Vec::new());
    }
    for c in certs {
        if c.n != n {
            return Err(Error::domain(format!(
                "certificate for n={} mixed into n={n}",
                c.n
            )));
        }
        c.validate()?;
    }
    let k_max = certs.iter().map(|c| c.k).max().unwrap() as usize;
    let mut order: Vec<usize> = (0..certs.len()).collect();
    order.sort_by_key(|&idx| certs[idx].k);
    // v_p(S) = v_p(n! S) - v_p(n!), and n! S(n,i,k) is an integer
    let scaled = ScaledRow::compute(n, k_max)?;
    let per_index: Vec<Vec<(usize, i64)>> = (1..=n)
        .into_par_iter()
        .map(|i| -> Result<Vec<(usize, i64)>> {
            let mut chain = scaled.chain(i);
            let mut vals = Vec::with_capacity(certs.len());
            for &idx in &order {
                let c = &certs[idx];
                while (chain.k() as u64) < c.k {
                    chain.step()?;
                }
                let v = integer_valuation(chain.value(), c.p) as i64 - legendre(n, c.p) as i64;
                vals.push((idx, v));
            }
            Ok(vals)
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<ValuationCheck> = certs
        .iter()
        .map(|c| ValuationCheck {
            n,
            k: c.k,
            p: c.p,
            indices_checked: 0,
            failures: Vec::new(),
        })
        .collect();
    for (i, vals) in (1..=n).zip(per_index) {
        for (idx, v) in vals {
            let check = &mut out[idx];
            check.indices_checked += 1;
            if v != -(check.k as i64) {
                check.failures.push((i, v));
            }
        }
    }
    Ok(out)
}

/// `v_p(n!)`.
fn legendre(n: u64, p: u64) -> u64 {
    let mut total = 0;
    let mut q = n / p;
    while q > 0 {
        total += q;
        q /= p;
    }
    total
}

fn integer_valuation(x: &BigInt, p: u64) -> u64 {
    debug_assert!(!x.is_zero());
    let p = BigInt::from(p);
    let mut v = 0;
    let mut x = x.clone();
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}
