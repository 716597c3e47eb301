//! Exact token arithmetic in integer base units.
//!
//! One token equals 10¹⁸ base units. All balances, splits and emission
//! math operate on `u128` base units; decimal strings are only a
//! human-readable surface and round-trip exactly for up to 18 fractional
//! digits.

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Number of decimal places carried by a token.
pub const DECIMALS: u32 = 18;

/// Base units per whole token.
pub const UNITS_PER_TOKEN: u128 = 1_000_000_000_000_000_000;

/// An unsigned token quantity in base units of 10⁻¹⁸ tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[must_use]
pub struct TokenAmount(u128);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AmountParseError {
    #[error("empty amount string")]
    Empty,
    #[error("invalid character in amount: {0:?}")]
    InvalidChar(char),
    #[error("more than one decimal point")]
    MultiplePoints,
    #[error("more than {DECIMALS} fractional digits")]
    TooManyDecimals,
    #[error("amount overflows the representable range")]
    Overflow,
}

impl TokenAmount {
    pub const ZERO: Self = TokenAmount(0);
    pub const MAX: Self = TokenAmount(u128::MAX);

    pub const fn from_units(units: u128) -> Self {
        TokenAmount(units)
    }

    /// `tokens` whole tokens, exact.
    pub const fn from_whole(tokens: u64) -> Self {
        TokenAmount(tokens as u128 * UNITS_PER_TOKEN)
    }

    pub const fn units(self) -> u128 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn checked_add(self, rhs: Self) -> Option<Self> {
        self.0.checked_add(rhs.0).map(TokenAmount)
    }

    pub fn checked_sub(self, rhs: Self) -> Option<Self> {
        self.0.checked_sub(rhs.0).map(TokenAmount)
    }

    pub fn saturating_sub(self, rhs: Self) -> Self {
        TokenAmount(self.0.saturating_sub(rhs.0))
    }

    pub fn checked_mul(self, rhs: u128) -> Option<Self> {
        self.0.checked_mul(rhs).map(TokenAmount)
    }

    /// `floor(self × num / den)` with a 256-bit intermediate, so the
    /// product may exceed `u128`. Returns `None` when `den == 0` or the
    /// quotient itself overflows.
    pub fn mul_div_floor(self, num: u128, den: u128) -> Option<Self> {
        self.mul_div_rem(num, den).map(|(q, _)| q)
    }

    /// Like [`Self::mul_div_floor`] but also returns the remainder
    /// `(self × num) mod den`.
    pub fn mul_div_rem(self, num: u128, den: u128) -> Option<(Self, u128)> {
        if den == 0 {
            return None;
        }
        if let Some(p) = self.0.checked_mul(num) {
            return Some((TokenAmount(p / den), p % den));
        }
        let (hi, lo) = mul_u128(self.0, num);
        div_256_by_128(hi, lo, den).map(|(q, r)| (TokenAmount(q), r))
    }

    /// Render as a decimal token string, trailing zeros trimmed:
    /// `1575190000000000000000` units → `"1575.19"`.
    pub fn to_decimal_string(self) -> String {
        let whole = self.0 / UNITS_PER_TOKEN;
        let frac = self.0 % UNITS_PER_TOKEN;
        if frac == 0 {
            return whole.to_string();
        }
        let mut frac_str = format!("{frac:018}");
        while frac_str.ends_with('0') {
            frac_str.pop();
        }
        format!("{whole}.{frac_str}")
    }

    /// Parse a decimal token string (`"1575.19"`, `"0.001"`, `"42"`).
    pub fn from_decimal_str(s: &str) -> Result<Self, AmountParseError> {
        if s.is_empty() {
            return Err(AmountParseError::Empty);
        }
        let mut parts = s.splitn(2, '.');
        let whole_part = parts.next().unwrap_or("");
        let frac_part = parts.next().unwrap_or("");
        if frac_part.contains('.') {
            return Err(AmountParseError::MultiplePoints);
        }
        if whole_part.is_empty() && frac_part.is_empty() {
            return Err(AmountParseError::Empty);
        }
        if frac_part.len() as u32 > DECIMALS {
            return Err(AmountParseError::TooManyDecimals);
        }
        let mut units: u128 = 0;
        for c in whole_part.chars() {
            let d = c.to_digit(10).ok_or(AmountParseError::InvalidChar(c))?;
            units = units
                .checked_mul(10)
                .and_then(|u| u.checked_add(d as u128))
                .ok_or(AmountParseError::Overflow)?;
        }
        units = units
            .checked_mul(UNITS_PER_TOKEN)
            .ok_or(AmountParseError::Overflow)?;
        let mut frac_units: u128 = 0;
        for c in frac_part.chars() {
            let d = c.to_digit(10).ok_or(AmountParseError::InvalidChar(c))?;
            frac_units = frac_units * 10 + d as u128;
        }
        frac_units *= 10u128.pow(DECIMALS - frac_part.len() as u32);
        units
            .checked_add(frac_units)
            .map(TokenAmount)
            .ok_or(AmountParseError::Overflow)
    }
}

/// Full 256-bit product of two `u128`s as `(hi, lo)`.
fn mul_u128(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = (1u128 << 64) - 1;
    let (a_hi, a_lo) = (a >> 64, a & MASK);
    let (b_hi, b_lo) = (b >> 64, b & MASK);
    let ll = a_lo * b_lo;
    let lh = a_lo * b_hi;
    let hl = a_hi * b_lo;
    let hh = a_hi * b_hi;
    let mid = (ll >> 64) + (lh & MASK) + (hl & MASK);
    let lo = (mid << 64) | (ll & MASK);
    let hi = hh + (lh >> 64) + (hl >> 64) + (mid >> 64);
    (hi, lo)
}

/// `(hi·2¹²⁸ + lo) divmod den`, `None` if the quotient needs more than
/// 128 bits. Schoolbook bit-by-bit division; call sites are not hot.
fn div_256_by_128(hi: u128, lo: u128, den: u128) -> Option<(u128, u128)> {
    if hi >= den {
        return None; // quotient would exceed u128
    }
    let mut rem: u128 = hi;
    let mut quot: u128 = 0;
    for i in (0..128).rev() {
        let carry = rem >> 127;
        rem = (rem << 1) | ((lo >> i) & 1);
        if carry == 1 || rem >= den {
            rem = rem.wrapping_sub(den);
            quot |= 1 << i;
        }
    }
    Some((quot, rem))
}

impl fmt::Display for TokenAmount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl FromStr for TokenAmount {
    type Err = AmountParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_decimal_str(s)
    }
}

impl Serialize for TokenAmount {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_decimal_string())
    }
}

impl<'de> Deserialize<'de> for TokenAmount {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        TokenAmount::from_decimal_str(&s).map_err(de::Error::custom)
    }
}
