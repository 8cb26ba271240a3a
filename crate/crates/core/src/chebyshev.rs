//! Chebyshev's `θ(x) = Σ_{p ≤ x} ln p`, its two-sided bound for
//! `x ≥ 1429`, and the large-`n` margin inequality.
//!
//! Everything here is evaluated with [`Interval`] arithmetic, so a reported
//! pass holds for the true real values, not just for rounded ones.

use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::precise::Interval;
use crate::primes::PrimeTable;
use crate::rational::ExactRational;

/// Smallest `x` for which the bound on `θ` is claimed.
pub const THETA_BOUND_START: u64 = 1429;
/// Smallest `n` handled by the analytic margin.
pub const CASE1_START: u64 = 50_217;

/// `x - 0.334 x / ln x`, the lower bound on `θ(x)`.
fn lower_bound(x: &Interval, ln_x: &Interval) -> Result<Interval> {
    let c = Interval::ratio(334, 1000, x.bits());
    Ok(x.sub(&c.mul(x).div(ln_x)?))
}

/// `x + 0.021 x / ln x`, the upper bound on `θ(x)`.
fn upper_bound(x: &Interval, ln_x: &Interval) -> Result<Interval> {
    let c = Interval::ratio(21, 1000, x.bits());
    Ok(x.add(&c.mul(x).div(ln_x)?))
}

fn floor_u64(x: &ExactRational) -> Result<u64> {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    if !x.is_positive() {
        return Err(Error::domain(format!("x must be positive, got {x}")));
    }
    x.numer()
        .div_floor(x.denom())
        .to_u64()
        .ok_or_else(|| Error::domain(format!("x = {x} too large")))
}

/// `θ(x)` as a rigorous enclosure at `bits` fractional bits.
pub fn theta(x: &ExactRational, table: &PrimeTable, bits: u32) -> Result<Interval> {
    let top = floor_u64(x)?;
    table.require(top)?;
    let mut sum = Interval::from_integer(0, bits);
    for &p in &table.primes()[..table.count_at_most(top)] {
        sum = sum.add(&Interval::from_integer(p, bits).ln()?);
    }
    Ok(sum)
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaViolation {
    /// Left end of the constant stretch of `θ` where the check failed.
    pub x: String,
    pub bound: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaBoundsReport {
    pub x_lo: String,
    pub x_hi: String,
    pub precision_bits: u32,
    /// Stretches of constant `θ` examined (one per prime plus the start).
    pub segments_checked: u64,
    /// Smallest certified value of `θ - lower` over the range.
    pub min_lower_gap: f64,
    /// Smallest certified value of `upper - θ` over the range.
    pub min_upper_gap: f64,
    /// Largest enclosure radius seen for `θ`.
    pub max_theta_radius: f64,
    pub violations: Vec<ThetaViolation>,
}

impl ThetaBoundsReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies `x - 0.334x/ln x < θ(x) < x + 0.021x/ln x` for all real `x` in
/// `[x_lo, x_hi]`.
///
/// `θ` is constant on `[a, b)` between consecutive primes while both bounds
/// increase for `x ≥ 1429`, so it suffices to test the upper bound at `a`
/// and the lower bound at `b` (the last stretch is closed at `x_hi`).
pub fn check_theta_bounds(
    x_lo: &ExactRational,
    x_hi: &ExactRational,
    table: &PrimeTable,
    bits: u32,
) -> Result<ThetaBoundsReport> {
    if *x_lo < ExactRational::from(THETA_BOUND_START) {
        return Err(Error::domain(format!(
            "theta bounds apply only for x >= {THETA_BOUND_START}, got x_lo = {x_lo}"
        )));
    }
    if x_hi < x_lo {
        return Err(Error::domain(format!("empty range [{x_lo}, {x_hi}]")));
    }
    let lo_floor = floor_u64(x_lo)?;
    let hi_floor = floor_u64(x_hi)?;
    table.require(hi_floor)?;

    let mut theta_now = theta(x_lo, table, bits)?;
    let start = table.count_at_most(lo_floor);
    let stop = table.count_at_most(hi_floor);

    let mut report = ThetaBoundsReport {
        x_lo: x_lo.to_string(),
        x_hi: x_hi.to_string(),
        precision_bits: bits,
        segments_checked: 0,
        min_lower_gap: f64::INFINITY,
        min_upper_gap: f64::INFINITY,
        max_theta_radius: 0.0,
        violations: Vec::new(),
    };

    let x_hi_iv = Interval::from_rational(x_hi, bits);
    let ln_x_hi = x_hi_iv.ln()?;
    let mut seg_start = Interval::from_rational(x_lo, bits);
    let mut seg_start_ln = seg_start.ln()?;
    let mut seg_label = x_lo.to_string();

    let mut check_segment = |theta_val: &Interval,
                             a: &Interval,
                             ln_a: &Interval,
                             b: &Interval,
                             ln_b: &Interval,
                             label: &str|
     -> Result<()> {
        let up_gap = upper_bound(a, ln_a)?.sub(theta_val);
        let low_gap = theta_val.sub(&lower_bound(b, ln_b)?);
        report.segments_checked += 1;
        report.min_upper_gap = report.min_upper_gap.min(up_gap.lower_f64());
        report.min_lower_gap = report.min_lower_gap.min(low_gap.lower_f64());
        report.max_theta_radius = report.max_theta_radius.max(theta_val.radius_f64());
        if !up_gap.is_positive() {
            report.violations.push(ThetaViolation {
                x: label.to_owned(),
                bound: "upper",
            });
        }
        if !low_gap.is_positive() {
            report.violations.push(ThetaViolation {
                x: label.to_owned(),
                bound: "lower",
            });
        }
        Ok(())
    };

    for &p in &table.primes()[start..stop] {
        let p_iv = Interval::from_integer(p, bits);
        let ln_p = p_iv.ln()?;
        check_segment(
            &theta_now,
            &seg_start,
            &seg_start_ln,
            &p_iv,
            &ln_p,
            &seg_label,
        )?;
        theta_now = theta_now.add(&ln_p);
        seg_start = p_iv;
        seg_start_ln = ln_p;
        seg_label = p.to_string();
    }
    check_segment(
        &theta_now,
        &seg_start,
        &seg_start_ln,
        &x_hi_iv,
        &ln_x_hi,
        &seg_label,
    )?;
    Ok(report)
}

/// The large-`n` inequality chain evaluated at the worst admissible `k`.
#[derive(Debug, Clone)]
pub struct Case1Margin {
    pub n: u64,
    pub precision_bits: u32,
    /// `(n/(c+1)) (2/(c+3) - 0.355/ln(n/(c+3)))` with `c = e ln n + e`.
    pub margin: Interval,
    /// `n/(c+3) - 1429`.
    pub window_floor: Interval,
    /// `n - (c+3)(3c+8)`.
    pub product_gap: Interval,
    /// `n - (c+2)(c+3)^2/2`.
    pub cubic_gap: Interval,
}

impl Case1Margin {
    pub fn margin_positive(&self) -> bool {
        self.margin.is_positive()
    }

    pub fn auxiliaries_hold(&self) -> bool {
        self.product_gap.is_positive() && self.cubic_gap.is_positive()
    }

    pub fn window_floor_holds(&self) -> bool {
        !self.window_floor.lo_scaled().is_negative()
    }

    pub fn holds(&self) -> bool {
        self.margin_positive() && self.auxiliaries_hold() && self.window_floor_holds()
    }
}

pub fn case1_margin(n: u64, bits: u32) -> Result<Case1Margin> {
    if n < CASE1_START {
        return Err(Error::domain(format!(
            "margin needs n >= {CASE1_START}, got {n}"
        )));
    }
    let int = |v: i64| Interval::from_integer(v, bits);
    let n_iv = Interval::from_integer(n, bits);
    let c = Interval::e(bits).mul(&n_iv.ln()?.add(&int(1)));
    let c1 = c.add(&int(1));
    let c2 = c.add(&int(2));
    let c3 = c.add(&int(3));
    let n_over_c3 = n_iv.div(&c3)?;
    let bracket = int(2)
        .div(&c3)?
        .sub(&Interval::ratio(355, 1000, bits).div(&n_over_c3.ln()?)?);
    let margin = n_iv.div(&c1)?.mul(&bracket);
    let product_gap = n_iv.sub(&c3.mul(&c.mul_int(3).add(&int(8))));
    let cubic_gap = n_iv.sub(&c2.mul(&c3).mul(&c3).div(&int(2))?);
    let window_floor = n_over_c3.sub(&int(THETA_BOUND_START as i64));
    Ok(Case1Margin {
        n,
        precision_bits: bits,
        margin,
        window_floor,
        product_gap,
        cubic_gap,
    })
}
