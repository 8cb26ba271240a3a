//! Exact verification that the elementary symmetric functions of
//! `{1, 1/2, ..., 1/n} \ {1/i}` are never integers, apart from
//! `S(2,2,1) = 1` and `S(4,4,2) = 1`.
//!
//! * [`rational`]: reduced big-integer fractions and `p`-adic valuation.
//! * [`symfun`] and [`oracle`]: the `T`/`S` recursions and brute-force
//!   reference values.
//! * [`primes`], [`certify`] and [`chebyshev`]: prime-window certificates,
//!   `θ(x)` bounds and the large-`n` margin, in rigorous arithmetic
//!   ([`precise`]).
//! * [`scan`] and [`checkpoint`]: the resumable exhaustive scan.

pub mod certify;
pub mod chebyshev;
pub mod checkpoint;
pub mod error;
pub mod oracle;
pub mod precise;
pub mod primes;
pub mod rational;
pub mod scan;
pub mod symfun;

pub use certify::{certify_range, find_certificate, Certificate, CertifyOutcome};
pub use error::{Error, Result};
pub use precise::Interval;
pub use primes::{sieve, PrimeTable};
pub use rational::ExactRational;
pub use scan::{scan, Hit, ScanConfig, ScanReport};
pub use symfun::{exact_s, exact_t, k_cap, SChain, SFirstColumn, ScaledChain, ScaledRow, TRow};
