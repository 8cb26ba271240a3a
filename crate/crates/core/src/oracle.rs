//! Brute-force reference values for small `n`, sharing no code path with
//! the row recursion.

use crate::error::{Error, Result};
use crate::rational::ExactRational;

/// Largest `n` the oracles accept.
pub const ORACLE_BOUND: u64 = 20;

fn check_bound(n: u64) -> Result<()> {
    if n > ORACLE_BOUND {
        return Err(Error::OracleBound {
            n,
            bound: ORACLE_BOUND,
        });
    }
    Ok(())
}

/// `T(n, k)` as the coefficient of `x^(n-k)` in `prod_{j=1..n} (x + 1/j)`.
pub fn t_oracle(n: u64, k: usize) -> Result<ExactRational> {
    check_bound(n)?;
    if n == 0 || k == 0 || k as u64 > n {
        return Err(Error::domain(format!("T(n={n}, k={k}) needs 1 <= k <= n")));
    }
    // coeffs[d] is the coefficient of x^d
    let mut coeffs = vec![ExactRational::one()];
    for j in 1..=n {
        let r = ExactRational::reciprocal_of(j)?;
        let mut next = vec![ExactRational::zero(); coeffs.len() + 1];
        for (d, c) in coeffs.iter().enumerate() {
            next[d + 1] = &next[d + 1] + c;
            next[d] = &next[d] + &(c * &r);
        }
        coeffs = next;
    }
    Ok(coeffs[n as usize - k].clone())
}

/// `S(n, i, k)` by enumerating every `k`-subset of `{1..n} \ {i}`.
///
/// Each term `1/prod` is written over the common denominator
/// `D = n!/i`, so the whole sum is one machine-integer accumulation.
pub fn s_oracle(n: u64, i: u64, k: usize) -> Result<ExactRational> {
    check_bound(n)?;
    if n < 2 || i == 0 || i > n || k == 0 || k as u64 >= n {
        return Err(Error::domain(format!(
            "S(n={n}, i={i}, k={k}) needs n >= 2, 1 <= i <= n and 1 <= k < n"
        )));
    }
    let elems: Vec<u128> = (1..=n).filter(|&j| j != i).map(u128::from).collect();
    let common: u128 = elems.iter().product();
    let mut total: u128 = 0;
    let mut idx: Vec<usize> = (0..k).collect();
    let m = elems.len();
    loop {
        let prod: u128 = idx.iter().map(|&j| elems[j]).product();
        total += common / prod;
        // next combination in lexicographic order
        let mut pos = k;
        while pos > 0 && idx[pos - 1] == m - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        idx[pos - 1] += 1;
        for j in pos..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    ExactRational::new(total, common)
}
