//! Exact reduced fractions over arbitrary-precision integers.
//!
//! Every public constructor and operation returns a value in canonical form:
//! the denominator is strictly positive, numerator and denominator are
//! coprime, and zero is `0/1`. Additions and multiplications use the
//! Henrici gcd splitting so that only the factors that can actually cancel
//! are fed to gcd.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::primes::is_prime;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactRational {
    num: BigInt,
    den: BigInt,
}

fn small_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `|x| mod m` for a small modulus.
fn mod_small(x: &BigInt, m: u64) -> u64 {
    (x.magnitude() % m)
        .to_u64()
        .expect("remainder is below a u64 modulus")
}

impl ExactRational {
    /// Builds `num/den` in canonical form.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let num = num.into();
        let den = den.into();
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::reduce(num, den))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self::from_parts(n.into(), BigInt::one())
    }

    /// `1/n` for a nonzero machine integer.
    pub fn reciprocal_of(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroReciprocal);
        }
        Ok(Self::from_parts(BigInt::one(), BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Self::from_parts(BigInt::zero(), BigInt::one())
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    fn reduce(num: BigInt, den: BigInt) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num / &g, den / &g)
        };
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        Self::from_parts(num, den)
    }

    /// Wraps parts that are already known to be canonical.
    fn from_parts(num: BigInt, den: BigInt) -> Self {
        debug_assert!(den.is_positive(), "denominator must be positive");
        debug_assert!(
            num.gcd(&den).is_one(),
            "fraction {num}/{den} is not reduced"
        );
        Self { num, den }
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn into_parts(self) -> (BigInt, BigInt) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn recip(&self) -> Result<Self> {
        match self.num.sign() {
            Sign::NoSign => Err(Error::ZeroReciprocal),
            Sign::Plus => Ok(Self::from_parts(self.den.clone(), self.num.clone())),
            Sign::Minus => Ok(Self::from_parts(-&self.den, -&self.num)),
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.recip()?)
    }

    /// `self + 1/n` without a big gcd: only `gcd(den, n)` can cancel.
    pub fn add_recip(&self, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroReciprocal);
        }
        let g = small_gcd(mod_small(&self.den, n), n);
        let den_g = if g == 1 {
            self.den.clone()
        } else {
            &self.den / g
        };
        let n_g = n / g;
        let t = &self.num * n_g + &den_g;
        if t.is_zero() {
            return Ok(Self::zero());
        }
        let g2 = if g == 1 {
            1
        } else {
            small_gcd(mod_small(&t, g), g)
        };
        let num = if g2 == 1 { t } else { t / g2 };
        Ok(Self::from_parts(num, den_g * (n / g2)))
    }

    /// `self / i` for a nonzero machine integer.
    pub fn div_small(&self, i: u64) -> Result<Self> {
        if i == 0 {
            return Err(Error::ZeroReciprocal);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let g = small_gcd(mod_small(&self.num, i), i);
        let num = if g == 1 {
            self.num.clone()
        } else {
            &self.num / g
        };
        Ok(Self::from_parts(num, &self.den * (i / g)))
    }

    /// `v_p(self)`: exponent of `p` in the numerator minus that in the denominator.
    pub fn p_adic_valuation(&self, p: u64) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroValuation);
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(multiplicity(self.num.magnitude(), p) as i64
            - multiplicity(self.den.magnitude(), p) as i64)
    }

    /// Strict parse used when reloading persisted state: `num/den` must
    /// already be canonical.
    pub fn parse_canonical(s: &str) -> Result<Self> {
        let (num, den) = split_fraction(s)?;
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if !den.is_positive() || !num.gcd(&den).is_one() || (num.is_zero() && !den.is_one()) {
            return Err(Error::NotCanonical(s.to_owned()));
        }
        Ok(Self::from_parts(num, den))
    }

    /// Parses a plain decimal such as `1429`, `1.5` or `-0.25` exactly.
    pub fn from_decimal_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseRational(s.to_owned());
        let t = s.trim();
        let (int_part, frac_part) = match t.split_once('.') {
            Some((a, b)) => (a, b),
            None => (t, ""),
        };
        if !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        Self::new(num, den)
    }
}

fn multiplicity(x: &BigUint, p: u64) -> u32 {
    let mut x = x.clone();
    let mut count = 0;
    loop {
        let (q, r) = x.div_rem(&BigUint::from(p));
        if !r.is_zero() {
            return count;
        }
        x = q;
        count += 1;
    }
}

fn split_fraction(s: &str) -> Result<(BigInt, BigInt)> {
    let bad = || Error::ParseRational(s.to_owned());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    if n.starts_with('+') || d.starts_with('+') {
        return Err(bad());
    }
    let num = n.parse::<BigInt>().map_err(|_| bad())?;
    let den = d.parse::<BigInt>().map_err(|_| bad())?;
    Ok((num, den))
}

impl FromStr for ExactRational {
    type Err = Error;

    /// Accepts `num/den` (reduced on the way in) or a bare integer.
    fn from_str(s: &str) -> Result<Self> {
        let (num, den) = split_fraction(s.trim())?;
        Self::new(num, den)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Ord for ExactRational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for ExactRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn add_signed(a: &ExactRational, b: &ExactRational, subtract: bool) -> ExactRational {
    let combine = |x: BigInt, y: BigInt| if subtract { x - y } else { x + y };
    let g = a.den.gcd(&b.den);
    if g.is_one() {
        let num = combine(&a.num * &b.den, &b.num * &a.den);
        if num.is_zero() {
            return ExactRational::zero();
        }
        return ExactRational::from_parts(num, &a.den * &b.den);
    }
    let a_den_g = &a.den / &g;
    let b_den_g = &b.den / &g;
    let t = combine(&a.num * &b_den_g, &b.num * &a_den_g);
    if t.is_zero() {
        return ExactRational::zero();
    }
    let g2 = t.gcd(&g);
    if g2.is_one() {
        ExactRational::from_parts(t, a_den_g * &b.den)
    } else {
        ExactRational::from_parts(t / &g2, a_den_g * (&b.den / &g2))
    }
}

impl Add for &ExactRational {
    type Output = ExactRational;

    fn add(self, rhs: &ExactRational) -> ExactRational {
        add_signed(self, rhs, false)
    }
}

impl Sub for &ExactRational {
    type Output = ExactRational;

    fn sub(self, rhs: &ExactRational) -> ExactRational {
        add_signed(self, rhs, true)
    }
}

impl Mul for &ExactRational {
    type Output = ExactRational;

    fn mul(self, rhs: &ExactRational) -> ExactRational {
        if self.is_zero() || rhs.is_zero() {
            return ExactRational::zero();
        }
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let num = (&self.num / &g1) * (&rhs.num / &g2);
        let den = (&self.den / &g2) * (&rhs.den / &g1);
        ExactRational::from_parts(num, den)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;

    fn neg(self) -> ExactRational {
        ExactRational::from_parts(-&self.num, self.den.clone())
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                (&self).$method(rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl serde::Serialize for ExactRational {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<u64> for ExactRational {
    fn from(n: u64) -> Self {
        Self::from_integer(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d).unwrap()
    }

    fn is_canonical(x: &ExactRational) -> bool {
        x.den.is_positive() && x.num.gcd(&x.den).is_one()
    }

    #[test]
    fn make_reduces() {
        assert_eq!(q(6, 4).to_string(), "3/2");
        assert_eq!(q(0, 7).to_string(), "0/1");
        assert_eq!(q(13, 12).to_string(), "13/12");
        assert_eq!(q(3, -6).to_string(), "-1/2");
        assert!(matches!(
            ExactRational::new(1, 0),
            Err(Error::ZeroDenominator)
        ));
    }

    #[test]
    fn field_ops() {
        assert_eq!(&q(1, 2) + &q(1, 3), q(5, 6));
        assert_eq!(&q(1, 2) * &q(1, 3), q(1, 6));
        assert_eq!(q(5, 6).recip().unwrap(), q(6, 5));
        assert_eq!(q(-5, 6).recip().unwrap(), q(-6, 5));
        assert_eq!(&q(1, 2) - &q(1, 2), ExactRational::zero());
        assert!(matches!(
            ExactRational::zero().recip(),
            Err(Error::ZeroReciprocal)
        ));
    }

    #[test]
    fn integrality() {
        assert!(q(1, 1).is_integer());
        assert!(!q(13, 12).is_integer());
        assert!(ExactRational::zero().is_integer());
    }

    #[test]
    fn valuation() {
        assert_eq!(q(3, 8).p_adic_valuation(2).unwrap(), -3);
        assert_eq!(q(12, 1).p_adic_valuation(2).unwrap(), 2);
        assert_eq!(q(5, 6).p_adic_valuation(7).unwrap(), 0);
        assert!(matches!(
            ExactRational::zero().p_adic_valuation(2),
            Err(Error::ZeroValuation)
        ));
        assert!(matches!(
            q(3, 8).p_adic_valuation(4),
            Err(Error::NotPrime(4))
        ));
    }

    #[test]
    fn fast_paths() {
        assert_eq!(q(1, 2).add_recip(3).unwrap(), q(5, 6));
        assert_eq!(q(5, 6).add_recip(6).unwrap(), q(1, 1));
        assert_eq!(q(-1, 4).add_recip(4).unwrap(), ExactRational::zero());
        assert_eq!(q(3, 4).div_small(6).unwrap(), q(1, 8));
        assert_eq!(q(3, 4).div_small(1).unwrap(), q(3, 4));
    }

    #[test]
    fn parsing() {
        assert_eq!("13/12".parse::<ExactRational>().unwrap(), q(13, 12));
        assert_eq!("6/4".parse::<ExactRational>().unwrap(), q(3, 2));
        assert!(matches!(
            ExactRational::parse_canonical("6/4"),
            Err(Error::NotCanonical(_))
        ));
        assert!(matches!(
            ExactRational::parse_canonical("1/-2"),
            Err(Error::NotCanonical(_))
        ));
        assert!(matches!(
            ExactRational::parse_canonical("0/5"),
            Err(Error::NotCanonical(_))
        ));
        assert!(ExactRational::parse_canonical("x/2").is_err());
        assert_eq!(ExactRational::parse_canonical("-7/3").unwrap(), q(-7, 3));
        assert_eq!(ExactRational::from_decimal_str("1.5").unwrap(), q(3, 2));
        assert_eq!(ExactRational::from_decimal_str("1429").unwrap(), q(1429, 1));
        assert!(ExactRational::from_decimal_str("1.x").is_err());
    }

    fn arb_rational() -> impl Strategy<Value = ExactRational> {
        (-10_000i64..10_000, 1i64..5_000).prop_map(|(n, d)| q(n, d))
    }

    fn arb_nonzero() -> impl Strategy<Value = ExactRational> {
        arb_rational().prop_filter("nonzero", |x| !x.is_zero())
    }

    proptest! {
        #[test]
        fn add_commutes_and_mul_distributes(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            prop_assert_eq!(&a + &b, &b + &a);
            let lhs = &a * &(&b + &c);
            let rhs = &(&a * &b) + &(&a * &c);
            prop_assert!(is_canonical(&lhs));
            prop_assert_eq!(lhs, rhs);
            prop_assert!(is_canonical(&(&a - &b)));
        }

        #[test]
        fn valuation_is_additive(a in arb_nonzero(), b in arb_nonzero(), pi in 0usize..6) {
            let p = [2u64, 3, 5, 7, 11, 13][pi];
            let prod = &a * &b;
            prop_assert_eq!(
                prod.p_adic_valuation(p).unwrap(),
                a.p_adic_valuation(p).unwrap() + b.p_adic_valuation(p).unwrap()
            );
        }

        #[test]
        fn integer_iff_nonnegative_valuations(n in -100_000i64..100_000, d in 1i64..2_000) {
            let x = q(n, d);
            prop_assume!(!x.is_zero());
            let mut all_nonneg = true;
            for p in 2..=(d as u64) {
                if (d as u64).is_multiple_of(p) && is_prime(p) && x.p_adic_valuation(p).unwrap() < 0 {
                    all_nonneg = false;
                }
            }
            prop_assert_eq!(x.is_integer(), all_nonneg);
        }

        #[test]
        fn fast_paths_match_general(a in arb_rational(), m in 1u64..500) {
            prop_assert_eq!(a.add_recip(m).unwrap(), &a + &ExactRational::reciprocal_of(m).unwrap());
            prop_assert_eq!(a.div_small(m).unwrap(), &a * &ExactRational::reciprocal_of(m).unwrap());
        }

        #[test]
        fn display_round_trips(a in arb_rational()) {
            prop_assert_eq!(ExactRational::parse_canonical(&a.to_string()).unwrap(), a);
        }
    }
}
