//! Availability-mined emission: per-epoch accrual against license caps,
//! credit-indexed schedules per deed class, completion detection and
//! expected-horizon analytics.
//!
//! Every schedule is a cumulative map Φ from scaled credits (epoch-credits
//! × 255) to minted units. An epoch with availability byte `A` mints
//! `Φ(c + A) − Φ(c)`, so remainders carry forward and a license that
//! reaches its credit span has minted its cap to the base unit. Epochs
//! with `A = 0` move nothing: the emission clock pauses during downtime.

use crate::amount::TokenAmount;
use crate::ledger::{split_shares, Holder, LedgerError, PoolId, SupplyLedger};
use crate::licensing::{License, LicenseClass};
use crate::params;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PoaError {
    /// The license already minted its cap; accrual is a no-op.
    #[error("license schedule already complete")]
    LicenseComplete,
    /// No dAuth-valid node is bound, so no credits can accrue.
    #[error("license has no active node bound")]
    LicenseInactive,
    #[error("average availability {0} outside (0, 1]")]
    BadAvailability(f64),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

/// Sigmoid vesting parameters, in epoch-credits.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmoidParams {
    pub cliff_credits: u32,
    pub midpoint_credits: u32,
    pub steepness: f64,
}

/// Shape of a class emission schedule over its credit span.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleShape {
    Linear,
    Sigmoid(SigmoidParams),
}

impl ScheduleShape {
    /// The configured shape for a deed class: standard and genesis deeds
    /// vest linearly in credits, master deeds follow a cliffed S-curve.
    pub fn for_class(class: LicenseClass) -> Self {
        match class {
            LicenseClass::Nd | LicenseClass::Gnd => ScheduleShape::Linear,
            LicenseClass::Mnd => ScheduleShape::Sigmoid(SigmoidParams {
                cliff_credits: params::MND_CLIFF_CREDITS,
                midpoint_credits: params::MND_MIDPOINT_CREDITS,
                steepness: params::MND_STEEPNESS,
            }),
        }
    }

    /// Cumulative emission Φ after `credits_scaled` of a span of
    /// `credit_span` epoch-credits. Non-decreasing, Φ(0) = 0 and
    /// Φ(span×255) = `allocation` exactly.
    pub fn cumulative(
        &self,
        allocation: TokenAmount,
        credit_span: u32,
        credits_scaled: u64,
    ) -> TokenAmount {
        let span_scaled = credit_span as u64 * params::CREDIT_SCALE as u64;
        if span_scaled == 0 || credits_scaled >= span_scaled {
            return allocation;
        }
        match self {
            ScheduleShape::Linear => allocation
                .mul_div_floor(credits_scaled as u128, span_scaled as u128)
                .unwrap_or(allocation),
            ScheduleShape::Sigmoid(p) => {
                let frac = sigmoid_fraction(p, credit_span, credits_scaled);
                // 53-bit fixed point keeps the scaling exact in integers
                // and monotone in `frac`
                let fp = (frac * (1u64 << 53) as f64).floor() as u128;
                let fp = fp.min(1u128 << 53);
                allocation
                    .mul_div_floor(fp, 1u128 << 53)
                    .unwrap_or(allocation)
            }
        }
    }
}

/// Normalized cumulative sigmoid in [0, 1]: zero through the cliff, then
/// a logistic renormalized to hit exactly 1 at the end of the span.
fn sigmoid_fraction(p: &SigmoidParams, credit_span: u32, credits_scaled: u64) -> f64 {
    let c = credits_scaled as f64 / params::CREDIT_SCALE as f64;
    let cliff = p.cliff_credits as f64;
    let end = credit_span as f64;
    if c <= cliff {
        return 0.0;
    }
    if c >= end {
        return 1.0;
    }
    let logistic = |x: f64| 1.0 / (1.0 + (-(p.steepness) * (x - p.midpoint_credits as f64)).exp());
    let lo = logistic(cliff);
    let hi = logistic(end);
    ((logistic(c) - lo) / (hi - lo)).clamp(0.0, 1.0)
}

/// Accrue one finalized epoch of availability against a license,
/// minting the schedule delta. Genesis-deed output routes to the
/// treasury pools; everything else credits the owner.
///
/// Returns the amount minted this epoch (zero when `a = 0`).
pub fn epoch_accrual(
    license: &mut License,
    a: u8,
    ledger: &mut SupplyLedger,
) -> Result<TokenAmount, PoaError> {
    if license.node.is_none() {
        return Err(PoaError::LicenseInactive);
    }
    if license.is_complete() {
        return Err(PoaError::LicenseComplete);
    }
    let shape = ScheduleShape::for_class(license.class);
    let span = license.credit_span;
    let new_credits = (license.credits_scaled + a as u64).min(license.span_scaled());
    let before = shape.cumulative(license.cap, span, license.credits_scaled);
    let after = shape.cumulative(license.cap, span, new_credits);
    let mint = after.saturating_sub(before);
    if !mint.is_zero() {
        match license.class {
            LicenseClass::Gnd => {
                route_gnd_accrual(ledger, mint)?;
            }
            _ => {
                ledger.mint(&Holder::Account(license.owner.clone()), mint)?;
            }
        }
    }
    license.credits_scaled = new_credits;
    license.minted = license
        .minted
        .checked_add(mint)
        .expect("license minted bounded by cap");
    Ok(mint)
}

/// Route one slice of genesis-deed emission into the treasury pools,
/// largest-remainder exact. Locked pools can still receive.
pub fn route_gnd_accrual(
    ledger: &mut SupplyLedger,
    amount: TokenAmount,
) -> Result<Vec<(PoolId, TokenAmount)>, LedgerError> {
    let shares = split_shares(amount, &params::GND_POOL_SPLIT)?;
    for (pool, part) in &shares {
        ledger.mint(&Holder::Pool(*pool), *part)?;
    }
    Ok(shares)
}

/// Expected days to complete a `credit_span`-credit schedule at average
/// availability `avg` ∈ (0, 1]: `span / avg`.
pub fn expected_horizon(avg_availability: f64, credit_span: u32) -> Result<f64, PoaError> {
    if !(avg_availability > 0.0 && avg_availability <= 1.0) {
        return Err(PoaError::BadAvailability(avg_availability));
    }
    Ok(credit_span as f64 / avg_availability)
}
