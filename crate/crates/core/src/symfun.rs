//! Exact elementary symmetric functions of reciprocals.
//!
//! `T(n,k)` is the k-th elementary symmetric function of `1, 1/2, ..., 1/n`
//! and `S(n,i,k)` the same with `1/i` removed. Rows of `T` advance in `n`
//! by `T(n,k) = T(n-1,k) + T(n-1,k-1)/n`, and for fixed `(n,i)` the values
//! of `S` follow from `S(n,i,k) = T(n,k) - S(n,i,k-1)/i` starting at
//! `S(n,i,1) = H_n - 1/i`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::precise::{Interval, DEFAULT_PRECISION_BITS};
use crate::rational::ExactRational;

/// Largest `k` that has to be examined for `n`: the largest integer below
/// `min(n, e ln n + e)`.
///
/// `e ln n + e` is evaluated as a rigorous interval and the floor of its
/// upper end is used, so a value sitting within rounding error of an
/// integer includes that integer. Returns 0 for `n < 2`.
pub fn k_cap(n: u64) -> usize {
    if n < 2 {
        return 0;
    }
    let bits = DEFAULT_PRECISION_BITS;
    let one = Interval::from_integer(1, bits);
    let ln_n = Interval::from_integer(n, bits).ln().expect("n >= 2");
    let cutoff = Interval::e(bits).mul(&ln_n.add(&one));
    let by_log = cutoff.floor_upper().to_u64().expect("cutoff fits in u64");
    by_log.min(n - 1) as usize
}

/// Number of `T` columns kept for row `n`: [`k_cap`], or 1 for `n = 1`.
pub fn row_cap(n: u64) -> usize {
    k_cap(n).max(1)
}

/// `T(n, 1..=min(n, cap))` for one `n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TRow {
    n: u64,
    cap: usize,
    values: Vec<ExactRational>,
}

impl TRow {
    /// The row for `n = 1`: `T(1,1) = 1`.
    pub fn first() -> Self {
        TRow {
            n: 1,
            cap: 1,
            values: vec![ExactRational::one()],
        }
    }

    /// Rebuilds a row from persisted values, checking basic invariants.
    pub fn from_values(n: u64, cap: usize, values: Vec<ExactRational>) -> Result<Self> {
        if n == 0 || cap == 0 {
            return Err(Error::domain("row needs n >= 1 and cap >= 1"));
        }
        if values.len() != (n as usize).min(cap) {
            return Err(Error::domain(format!(
                "row n={n} cap={cap} needs {} values, got {}",
                (n as usize).min(cap),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_positive()) {
            return Err(Error::domain(format!(
                "row n={n} has non-positive value {bad}"
            )));
        }
        Ok(TRow { n, cap, values })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Number of stored columns, `min(n, cap)`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `T(n, k)` for `1 <= k <= len()`.
    pub fn get(&self, k: usize) -> Option<&ExactRational> {
        k.checked_sub(1).and_then(|idx| self.values.get(idx))
    }

    pub fn values(&self) -> &[ExactRational] {
        &self.values
    }

    /// `H_n`.
    pub fn harmonic(&self) -> &ExactRational {
        &self.values[0]
    }

    /// Whether the next row can be formed with `cap` columns: every
    /// `T(n, k)` with `k <= min(n, cap)` must be present.
    pub fn can_advance_to(&self, cap: usize) -> bool {
        self.values.len() >= (self.n as usize).min(cap)
    }

    /// Makes room for `cap` columns. A column that was never carried
    /// cannot be filled in from this row alone, so the row is rebuilt from
    /// `n = 1`; the existing columns must come out unchanged.
    pub fn widen(&mut self, cap: usize) -> Result<()> {
        if self.can_advance_to(cap) {
            return Ok(());
        }
        let wide = t_row(self.n, cap)?;
        if wide.values[..self.values.len()] != self.values[..] {
            return Err(Error::SelfCheck(format!(
                "rebuilt row n={} disagrees with the carried one",
                self.n
            )));
        }
        *self = wide;
        Ok(())
    }

    /// The row for `n + 1` with the default column policy [`row_cap`],
    /// widening a copy of this row first if needed.
    pub fn advance(&self) -> TRow {
        let cap = row_cap(self.n + 1);
        if self.can_advance_to(cap) {
            self.advance_with_cap(cap)
        } else {
            let mut wide = self.clone();
            wide.widen(cap).expect("rebuilt row matches");
            wide.advance_with_cap(cap)
        }
    }

    /// The row for `n + 1` holding `min(n + 1, cap)` columns.
    ///
    /// # Panics
    ///
    /// If a needed column is missing (see [`TRow::can_advance_to`]).
    pub fn advance_with_cap(&self, cap: usize) -> TRow {
        let mut out = TRow {
            n: 0,
            cap: 0,
            values: Vec::new(),
        };
        self.advance_into(cap, &mut out);
        out
    }

    /// Writes the next row into `out`, reusing its storage.
    pub fn advance_into(&self, cap: usize, out: &mut TRow) {
        let n = self.n + 1;
        let cap = cap.max(1);
        assert!(
            self.can_advance_to(cap),
            "row n={} has {} columns, {} needed; widen it first",
            self.n,
            self.values.len(),
            (self.n as usize).min(cap)
        );
        let len = (n as usize).min(cap);
        out.n = n;
        out.cap = cap;
        out.values.clear();
        out.values.reserve(len);
        out.values
            .push(self.values[0].add_recip(n).expect("n >= 2"));
        for k in 2..=len {
            // T(n-1, k) is zero when k = n
            let carried = self.values[k - 2].div_small(n).expect("n >= 2");
            let v = match self.values.get(k - 1) {
                Some(prev) => &carried + prev,
                None => carried,
            };
            out.values.push(v);
        }
    }
}

/// `S(n, i, 1)` for every `i = 1..=n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SFirstColumn {
    n: u64,
    values: Vec<ExactRational>,
}

impl SFirstColumn {
    /// `S(1,1,1) = 0`.
    pub fn seed() -> Self {
        SFirstColumn {
            n: 1,
            values: vec![ExactRational::zero()],
        }
    }

    pub fn from_values(n: u64, values: Vec<ExactRational>) -> Result<Self> {
        if values.len() as u64 != n {
            return Err(Error::domain(format!(
                "first column for n={n} needs {n} values, got {}",
                values.len()
            )));
        }
        Ok(SFirstColumn { n, values })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `S(n, i, 1)` for `1 <= i <= n`.
    pub fn get(&self, i: u64) -> Option<&ExactRational> {
        i.checked_sub(1)
            .and_then(|idx| self.values.get(idx as usize))
    }

    pub fn values(&self) -> &[ExactRational] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [ExactRational] {
        &mut self.values
    }

    /// Moves to `n + 1`: `S(n+1,i,1) = S(n,i,1) + 1/(n+1)` for `i <= n`,
    /// and `S(n+1,n+1,1) = T(n,1)`, which the caller passes as `harmonic`.
    pub fn advance(&mut self, harmonic: &ExactRational) {
        let n = self.n + 1;
        for v in &mut self.values {
            *v = v.add_recip(n).expect("n >= 2");
        }
        self.push_last(harmonic.clone());
    }

    /// Completes an advance whose `i <= n` entries were updated externally.
    pub(crate) fn push_last(&mut self, harmonic: ExactRational) {
        self.n += 1;
        self.values.push(harmonic);
    }
}

/// Ascending-`k` accumulator for `S(n, i, k)` at fixed `(n, i)`.
///
/// Holds a single value that is overwritten in place at each step.
#[derive(Debug)]
pub struct SChain<'a> {
    row: &'a TRow,
    i: u64,
    k: usize,
    value: ExactRational,
}

impl<'a> SChain<'a> {
    /// Starts at `k = 1` from `S(n, i, 1)`.
    pub fn new(row: &'a TRow, i: u64, first: ExactRational) -> Self {
        SChain {
            row,
            i,
            k: 1,
            value: first,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn value(&self) -> &ExactRational {
        &self.value
    }

    /// Steps to `k + 1`; fails once the row runs out of columns.
    pub fn step(&mut self) -> Result<&ExactRational> {
        let t = self.row.get(self.k + 1).ok_or_else(|| {
            Error::domain(format!(
                "row n={} has no column k={}",
                self.row.n,
                self.k + 1
            ))
        })?;
        self.value = t - &self.value.div_small(self.i)?;
        self.k += 1;
        Ok(&self.value)
    }
}

/// Row `n` multiplied through by `n!`.
///
/// In this frame every `T(n,k)` and `S(n,i,k)` is an integer, the chain
/// step `S(n,i,k) = T(n,k) - S(n,i,k-1)/i` is an exact division by a
/// machine integer, and integrality is `n! | value`. No gcd is needed.
#[derive(Clone, Debug)]
pub struct ScaledRow {
    n: u64,
    factorial: BigInt,
    t: Vec<BigInt>,
}

impl ScaledRow {
    /// Scales `row`; `factorial` must be `row.n()!`.
    pub fn from_row(row: &TRow, factorial: &BigInt) -> Result<Self> {
        let t = row
            .values()
            .iter()
            .map(|v| {
                let (q, r) = factorial.div_rem(v.denom());
                if !r.is_zero() {
                    return Err(Error::SelfCheck(format!(
                        "denominator of T({}, ·) = {v} does not divide n!",
                        row.n()
                    )));
                }
                Ok(q * v.numer())
            })
            .collect::<Result<_>>()?;
        Ok(ScaledRow {
            n: row.n(),
            factorial: factorial.clone(),
            t,
        })
    }

    /// Row `n` with `min(n, cap)` columns straight from the integer
    /// recursion `n! T(n,k) = n · (n-1)! T(n-1,k) + (n-1)! T(n-1,k-1)`.
    pub fn compute(n: u64, cap: usize) -> Result<Self> {
        if n == 0 || cap == 0 {
            return Err(Error::domain("scaled row needs n >= 1 and cap >= 1"));
        }
        let mut factorial = BigInt::from(1u32);
        let mut t = vec![BigInt::from(1u32)];
        for m in 2..=n {
            let len = (m as usize).min(cap);
            // T(m-1, m) = 0 contributes nothing to the new top column
            let mut next = Vec::with_capacity(len);
            next.push(&t[0] * m + &factorial);
            for k in 2..=len {
                let carried = t.get(k - 1).map(|v| v * m).unwrap_or_default();
                next.push(carried + &t[k - 2]);
            }
            factorial *= m;
            t = next;
        }
        Ok(ScaledRow { n, factorial, t })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factorial(&self) -> &BigInt {
        &self.factorial
    }

    /// `T(n,k) · n!`.
    pub fn t(&self, k: usize) -> Option<&BigInt> {
        k.checked_sub(1).and_then(|idx| self.t.get(idx))
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Whether the scaled value stands for an integer.
    pub fn is_integer(&self, scaled: &BigInt) -> bool {
        (scaled % &self.factorial).is_zero()
    }

    pub fn to_rational(&self, scaled: &BigInt) -> ExactRational {
        ExactRational::new(scaled.clone(), self.factorial.clone()).expect("n! is nonzero")
    }

    /// Starts the chain for index `i < n` at `S(n,i,1) · n! = T(n,1) · n! - n!/i`.
    pub fn chain(&self, i: u64) -> ScaledChain<'_> {
        let value = &self.t[0] - &self.factorial / i;
        ScaledChain {
            row: self,
            i,
            k: 1,
            value,
        }
    }
}

/// [`SChain`] in the `n!`-scaled frame.
#[derive(Debug)]
pub struct ScaledChain<'a> {
    row: &'a ScaledRow,
    i: u64,
    k: usize,
    value: BigInt,
}

impl ScaledChain<'_> {
    pub fn k(&self) -> usize {
        self.k
    }

    /// `S(n,i,k) · n!`.
    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn step(&mut self) -> Result<&BigInt> {
        let t = self.row.t(self.k + 1).ok_or_else(|| {
            Error::domain(format!(
                "row n={} has no column k={}",
                self.row.n,
                self.k + 1
            ))
        })?;
        let (q, r) = self.value.div_rem(&BigInt::from(self.i));
        if !r.is_zero() {
            return Err(Error::SelfCheck(format!(
                "S({}, {}, {})·n! not divisible by i",
                self.row.n, self.i, self.k
            )));
        }
        self.value = t - q;
        self.k += 1;
        Ok(&self.value)
    }
}

fn check_s_args(n: u64, i: u64, k: usize) -> Result<()> {
    if n < 2 || k == 0 || k as u64 >= n || i == 0 || i > n {
        return Err(Error::domain(format!(
            "S(n={n}, i={i}, k={k}) needs n >= 2, 1 <= i <= n and 1 <= k < n"
        )));
    }
    Ok(())
}

/// `S(n, i, k)` from the row for `n` and the first column advanced to `n`.
pub fn s_value(
    n: u64,
    i: u64,
    k: usize,
    row: &TRow,
    first: &SFirstColumn,
) -> Result<ExactRational> {
    check_s_args(n, i, k)?;
    if row.n() != n || first.n() != n {
        return Err(Error::domain(format!(
            "state is for row n={} / column n={}, not n={n}",
            row.n(),
            first.n()
        )));
    }
    let mut chain = SChain::new(row, i, first.get(i).expect("i <= n").clone());
    while chain.k() < k {
        chain.step()?;
    }
    Ok(chain.value)
}

/// Row `n` built from scratch, with at least `cap` columns where possible.
pub fn t_row(n: u64, cap: usize) -> Result<TRow> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    let mut row = TRow::first();
    while row.n() < n {
        row = row.advance_with_cap(cap);
    }
    Ok(row)
}

/// `T(n, k)` from the recursion.
pub fn exact_t(n: u64, k: usize) -> Result<ExactRational> {
    if k == 0 || k as u64 > n {
        return Err(Error::domain(format!("T(n={n}, k={k}) needs 1 <= k <= n")));
    }
    Ok(t_row(n, k)?.get(k).expect("row holds k columns").clone())
}

/// `S(n, i, k)` from the recursion.
pub fn exact_s(n: u64, i: u64, k: usize) -> Result<ExactRational> {
    check_s_args(n, i, k)?;
    if i == n {
        return exact_t(n - 1, k);
    }
    let row = t_row(n, k)?;
    let first = row.harmonic() - &ExactRational::reciprocal_of(i)?;
    let mut chain = SChain::new(&row, i, first);
    while chain.k() < k {
        chain.step()?;
    }
    Ok(chain.value)
}

/// `T(k+1, k)` (`offset = 1`) or `T(k+2, k)` (`offset = 2`) in closed form.
pub fn closed_form_t(k: u64, offset: u32) -> Result<ExactRational> {
    if k == 0 {
        return Err(Error::domain("k must be positive"));
    }
    let kf = factorial(k);
    let k = BigInt::from(k);
    match offset {
        1 => ExactRational::new(&k + 2u32, kf * 2u32),
        2 => ExactRational::new((&k + 3u32) * (&k * 3u32 + 8u32), kf * 24u32),
        _ => Err(Error::domain(format!(
            "offset must be 1 or 2, got {offset}"
        ))),
    }
}

/// `S(k+1, i', k)` (`offset = 1`) or `S(k+2, i', k)` (`offset = 2`) in closed form.
pub fn closed_form_s(k: u64, i_prime: u64, offset: u32) -> Result<ExactRational> {
    if k == 0 {
        return Err(Error::domain("k must be positive"));
    }
    if !(1..=2).contains(&offset) {
        return Err(Error::domain(format!(
            "offset must be 1 or 2, got {offset}"
        )));
    }
    if i_prime == 0 || i_prime > k + offset as u64 {
        return Err(Error::domain(format!(
            "i' = {i_prime} outside 1..={}",
            k + offset as u64
        )));
    }
    let ip = BigInt::from(i_prime);
    match offset {
        1 => ExactRational::new(ip, factorial(k + 1)),
        _ => {
            let tri = BigInt::from((k + 2) * (k + 3) / 2);
            ExactRational::new(&ip * (tri - &ip), factorial(k + 2))
        }
    }
}

pub(crate) fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::from(1u32), |acc, j| acc * j)
}
