//! Rigorous real arithmetic on fixed-point intervals.
//!
//! An [`Interval`] encloses a real number between `lo / 2^bits` and
//! `hi / 2^bits`. Every operation rounds its lower end toward -inf and its
//! upper end toward +inf, so the true value is always inside the result and
//! the interval width is the accumulated error bound. Integers are exact,
//! so sums of intervals are associative and reproducible bit-for-bit.

use std::cmp::{max, min};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::ExactRational;

pub const DEFAULT_PRECISION_BITS: u32 = 96;
pub const MIN_PRECISION_BITS: u32 = 80;
/// Environment variable that overrides the working precision.
pub const PRECISION_ENV: &str = "ESF_PRECISION_BITS";

/// Extra bits carried inside transcendental evaluations before rounding out.
const GUARD_BITS: u32 = 32;

/// Reads [`PRECISION_ENV`], falling back to [`DEFAULT_PRECISION_BITS`].
pub fn precision_from_env() -> Result<u32> {
    match std::env::var(PRECISION_ENV) {
        Err(_) => Ok(DEFAULT_PRECISION_BITS),
        Ok(raw) => {
            let bits: u32 = raw
                .trim()
                .parse()
                .map_err(|_| Error::domain(format!("{PRECISION_ENV}={raw:?} is not an integer")))?;
            if !(MIN_PRECISION_BITS..=4096).contains(&bits) {
                return Err(Error::domain(format!(
                    "{PRECISION_ENV}={bits} outside [{MIN_PRECISION_BITS}, 4096]"
                )));
            }
            Ok(bits)
        }
    }
}

fn pow2(k: u32) -> BigInt {
    BigInt::one() << k as usize
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -(-a).div_floor(b)
}

fn floor_shr(a: &BigInt, k: u32) -> BigInt {
    floor_div(a, &pow2(k))
}

fn ceil_shr(a: &BigInt, k: u32) -> BigInt {
    ceil_div(a, &pow2(k))
}

#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
}

impl Interval {
    fn from_scaled(lo: BigInt, hi: BigInt, bits: u32) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi, bits }
    }

    pub fn from_integer(n: impl Into<BigInt>, bits: u32) -> Self {
        let v = n.into() << bits as usize;
        Self::from_scaled(v.clone(), v, bits)
    }

    pub fn from_rational(q: &ExactRational, bits: u32) -> Self {
        let scaled = q.numer() << bits as usize;
        Self::from_scaled(
            floor_div(&scaled, q.denom()),
            ceil_div(&scaled, q.denom()),
            bits,
        )
    }

    /// `num / den` for machine integers; `den` must be nonzero.
    pub fn ratio(num: i64, den: i64, bits: u32) -> Self {
        let q = ExactRational::new(num, den).expect("nonzero denominator");
        Self::from_rational(&q, bits)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Lower end scaled by `2^bits`.
    pub fn lo_scaled(&self) -> &BigInt {
        &self.lo
    }

    /// Upper end scaled by `2^bits`.
    pub fn hi_scaled(&self) -> &BigInt {
        &self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    /// True when every point of `self` is strictly below every point of `other`.
    pub fn certainly_lt(&self, other: &Self) -> bool {
        self.check_bits(other);
        self.hi < other.lo
    }

    pub fn lower_f64(&self) -> f64 {
        scaled_to_f64(&self.lo, self.bits)
    }

    pub fn upper_f64(&self) -> f64 {
        scaled_to_f64(&self.hi, self.bits)
    }

    pub fn mid_f64(&self) -> f64 {
        scaled_to_f64(&(&self.lo + &self.hi), self.bits + 1)
    }

    /// Half-width: the error bound on the midpoint.
    pub fn radius_f64(&self) -> f64 {
        scaled_to_f64(&(&self.hi - &self.lo), self.bits + 1)
    }

    /// `floor` of the upper end.
    pub fn floor_upper(&self) -> BigInt {
        floor_shr(&self.hi, self.bits)
    }

    /// Re-expresses at a coarser precision, rounding outward.
    pub fn round_to(&self, bits: u32) -> Self {
        if bits >= self.bits {
            let k = (bits - self.bits) as usize;
            return Self::from_scaled(&self.lo << k, &self.hi << k, bits);
        }
        let k = self.bits - bits;
        Self::from_scaled(floor_shr(&self.lo, k), ceil_shr(&self.hi, k), bits)
    }

    fn check_bits(&self, other: &Self) {
        assert_eq!(self.bits, other.bits, "interval precision mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_bits(other);
        Self::from_scaled(&self.lo + &other.lo, &self.hi + &other.hi, self.bits)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_bits(other);
        Self::from_scaled(&self.lo - &other.hi, &self.hi - &other.lo, self.bits)
    }

    pub fn neg(&self) -> Self {
        Self::from_scaled(-&self.hi, -&self.lo, self.bits)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_bits(other);
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().unwrap();
        let hi = products.iter().max().unwrap();
        Self::from_scaled(floor_shr(lo, self.bits), ceil_shr(hi, self.bits), self.bits)
    }

    pub fn mul_int(&self, k: i64) -> Self {
        let (a, b) = (&self.lo * k, &self.hi * k);
        Self::from_scaled(min(a.clone(), b.clone()), max(a, b), self.bits)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_bits(other);
        if other.contains_zero() {
            return Err(Error::IntervalStraddlesZero(other.to_string()));
        }
        let k = self.bits as usize;
        let nums = [&self.lo << k, &self.hi << k];
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for n in &nums {
            for d in [&other.lo, &other.hi] {
                let f = floor_div(n, d);
                let c = ceil_div(n, d);
                lo = Some(lo.map_or(f.clone(), |x| min(x, f)));
                hi = Some(hi.map_or(c.clone(), |x| max(x, c)));
            }
        }
        Ok(Self::from_scaled(lo.unwrap(), hi.unwrap(), self.bits))
    }

    /// Natural logarithm; the interval must be strictly positive.
    pub fn ln(&self) -> Result<Self> {
        if !self.is_positive() {
            return Err(Error::domain(format!("ln of non-positive interval {self}")));
        }
        let w = self.bits + GUARD_BITS;
        let ln2 = ln2_scaled(w);
        let (lo, _) = ln_dyadic_scaled(&self.lo, self.bits, &ln2, w);
        let (_, hi) = ln_dyadic_scaled(&self.hi, self.bits, &ln2, w);
        Ok(Self::from_scaled(
            floor_shr(&lo, GUARD_BITS),
            ceil_shr(&hi, GUARD_BITS),
            self.bits,
        ))
    }

    /// Euler's number.
    pub fn e(bits: u32) -> Self {
        let w = bits + GUARD_BITS;
        let one = pow2(w);
        let mut term_lo = one.clone();
        let mut term_hi = one;
        let mut sum_lo = BigInt::zero();
        let mut sum_hi = BigInt::zero();
        let mut j = 1u32;
        loop {
            sum_lo += &term_lo;
            sum_hi += &term_hi;
            let jb = BigInt::from(j);
            term_lo = floor_div(&term_lo, &jb);
            term_hi = ceil_div(&term_hi, &jb);
            if term_hi <= BigInt::one() {
                // sum_{i >= j} 1/i! <= 2/j!
                sum_hi += &term_hi * 2;
                break;
            }
            j += 1;
        }
        Self::from_scaled(
            floor_shr(&sum_lo, GUARD_BITS),
            ceil_shr(&sum_hi, GUARD_BITS),
            bits,
        )
    }
}

fn scaled_to_f64(x: &BigInt, bits: u32) -> f64 {
    // shift into range first so huge scales do not overflow to inf
    let excess = x.bits().saturating_sub(1000) as u32;
    let trimmed = floor_shr(x, excess);
    trimmed.to_f64().unwrap_or(f64::NAN) * 2f64.powi(excess as i32 - bits as i32)
}

/// Enclosure of `atanh(a/b) * 2^w` for `0 <= a/b <= 1/3`.
fn atanh_scaled(a: &BigInt, b: &BigInt, w: u32) -> (BigInt, BigInt) {
    let one = pow2(w);
    let a2 = a * a;
    let b2 = b * b;
    let mut pw_lo = floor_div(&(&one * a), b);
    let mut pw_hi = ceil_div(&(&one * a), b);
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut d = 1u32;
    while !pw_hi.is_zero() {
        let db = BigInt::from(d);
        sum_lo += floor_div(&pw_lo, &db);
        sum_hi += ceil_div(&pw_hi, &db);
        pw_lo = floor_div(&(&pw_lo * &a2), &b2);
        pw_hi = ceil_div(&(&pw_hi * &a2), &b2);
        d += 2;
        if pw_hi <= BigInt::one() {
            // remaining terms sum to at most t^d / (1 - t^2) <= 2 t^d
            sum_hi += &pw_hi * 2;
            break;
        }
    }
    (sum_lo, sum_hi)
}

/// `ln 2 * 2^w` enclosure, as `2 atanh(1/3)`.
fn ln2_scaled(w: u32) -> (BigInt, BigInt) {
    let (lo, hi) = atanh_scaled(&BigInt::one(), &BigInt::from(3), w);
    (lo * 2, hi * 2)
}

/// Enclosure of `ln(x / 2^frac_bits) * 2^w` for a positive integer `x`.
fn ln_dyadic_scaled(
    x: &BigInt,
    frac_bits: u32,
    ln2: &(BigInt, BigInt),
    w: u32,
) -> (BigInt, BigInt) {
    let m = x.bits() - 1;
    let base = BigInt::one() << m as usize;
    // x = 2^m * z with z in [1, 2); ln z = 2 atanh((z-1)/(z+1))
    let (t_lo, t_hi) = atanh_scaled(&(x - &base), &(x + &base), w);
    let shift = m as i64 - frac_bits as i64;
    let (s_lo, s_hi) = if shift >= 0 {
        (&ln2.0 * shift, &ln2.1 * shift)
    } else {
        (&ln2.1 * shift, &ln2.0 * shift)
    };
    (s_lo + t_lo * 2, s_hi + t_hi * 2)
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.15e} ± {:.3e}", self.mid_f64(), self.radius_f64())
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:e}, {:e}]@{}",
            self.lower_f64(),
            self.upper_f64(),
            self.bits
        )
    }
}
