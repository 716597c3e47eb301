//! Protocol constants: supply cap, class allocations, payment splits and
//! emission-schedule spans.

use crate::amount::{TokenAmount, UNITS_PER_TOKEN};
use crate::ledger::PoolId;

/// Fixed maximum supply: 161,803,398 tokens.
pub const HARD_CAP: TokenAmount = TokenAmount::from_units(161_803_398 * UNITS_PER_TOKEN);

/// Mintable cap of a single standard node deed: 1,575.19 tokens.
pub const ND_CAP: TokenAmount = TokenAmount::from_units(157_519 * 10u128.pow(16));

/// Epoch-credits a standard deed must accumulate (36 × 30 daily epochs).
pub const ND_SPAN: u32 = 1080;

/// Genesis deed span: 12 × 30 daily epochs.
pub const GND_SPAN: u32 = 360;

/// Master deed span: 30 × 30 daily epochs.
pub const MND_SPAN: u32 = 900;

/// Master-deed vesting cliff, in epoch-credits (month 7).
pub const MND_CLIFF_CREDITS: u32 = 210;

/// Master-deed sigmoid midpoint, in epoch-credits (month 18).
pub const MND_MIDPOINT_CREDITS: u32 = 540;

/// Master-deed sigmoid steepness per epoch-credit. Chosen so that the
/// normalized curve clears 90 % of the allocation by credit 660.
pub const MND_STEEPNESS: f64 = 0.025;

/// Availability byte scale (α): per-epoch availability lives in 0..=255.
pub const CREDIT_SCALE: u32 = 255;

/// Smallest availability byte that still clears the 98 % threshold
/// (250/255 ≈ 0.9804; 249/255 ≈ 0.9765 falls short).
pub const GATE_MIN_BYTE: u8 = 250;

/// Seconds per epoch (24 h).
pub const EPOCH_SECONDS: u64 = 86_400;

/// Heartbeat interval bounds in seconds.
pub const HEARTBEAT_INTERVAL_MIN_S: u32 = 10;
pub const HEARTBEAT_INTERVAL_MAX_S: u32 = 15;

/// Node-deed sale routing, per mille: liquidity pool / burn / opex.
pub const ND_SALE_LP_PM: u32 = 500;
pub const ND_SALE_BURN_PM: u32 = 200;
pub const ND_SALE_OPEX_PM: u32 = 300;

/// Genesis-deed emission routing, per mille of every minted slice.
/// The published pool shares sum to 861‰; the unassigned remainder is
/// parked in the reserve pool.
pub const GND_POOL_SPLIT: [(PoolId, u32); 5] = [
    (PoolId::Lp, 267),
    (PoolId::Marketing, 75),
    (PoolId::Grants, 346),
    (PoolId::Csr, 173),
    (PoolId::Reserve, 139),
];

/// Escrow settlement routing, per mille: operators / burn.
pub const SETTLE_RELEASE_PM: u32 = 850;
pub const SETTLE_BURN_PM: u32 = 150;

/// Genesis-deed share of the hard cap: 28.9 %.
pub fn gnd_allocation() -> TokenAmount {
    HARD_CAP.mul_div_floor(289, 1000).unwrap_or(TokenAmount::ZERO)
}

/// Combined master-deed share of the hard cap: 26.1 %.
pub fn mnd_total_allocation() -> TokenAmount {
    HARD_CAP.mul_div_floor(261, 1000).unwrap_or(TokenAmount::ZERO)
}

/// Standard-deed mining budget: 45 % of the hard cap.
pub fn nd_supply_budget() -> TokenAmount {
    HARD_CAP.mul_div_floor(450, 1000).unwrap_or(TokenAmount::ZERO)
}

/// How many full-cap standard deeds fit inside the 45 % budget.
pub fn max_nd_count() -> u64 {
    (nd_supply_budget().units() / ND_CAP.units()) as u64
}

/// Equal split of the master-deed allocation across `count` licenses,
/// remainder units going to the earliest licenses. Sums exactly to the
/// class allocation.
pub fn mnd_license_allocations(count: u64) -> Vec<TokenAmount> {
    if count == 0 {
        return Vec::new();
    }
    let total = mnd_total_allocation().units();
    let base = total / count as u128;
    let rem = total % count as u128;
    (0..count)
        .map(|i| TokenAmount::from_units(base + u128::from((i as u128) < rem)))
        .collect()
}
