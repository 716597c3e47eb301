//! Exact integer token ledger: mint against a hard cap, burn, transfer,
//! treasury pool balances and per-mille splits.
//!
//! # Invariants
//!
//! 1. `minted_total ≤ hard_cap` after every operation.
//! 2. Conservation: `minted_total = Σ balances + Σ pools + Σ escrows +
//!    burned_total`, always, as exact integer equality.
//! 3. Splits re-sum to their input exactly (largest-remainder rounding).
//! 4. No balance ever goes negative; amounts are unsigned and every debit
//!    is checked.
//!
//! Burned tokens are tracked, not deleted: they stay inside the
//! conservation identity so that "circulating < cap" is a checkable fact
//! rather than a narrative.

use crate::amount::TokenAmount;
use crate::ids::{AccountId, JobId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Treasury pools. `Lp` and `Opex` receive node-deed sale routing; the
/// rest receive genesis-deed emission shares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolId {
    Lp,
    Opex,
    Marketing,
    Grants,
    Csr,
    Reserve,
}

impl PoolId {
    pub const ALL: [PoolId; 6] = [
        PoolId::Lp,
        PoolId::Opex,
        PoolId::Marketing,
        PoolId::Grants,
        PoolId::Csr,
        PoolId::Reserve,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PoolId::Lp => "lp",
            PoolId::Opex => "opex",
            PoolId::Marketing => "marketing",
            PoolId::Grants => "grants",
            PoolId::Csr => "csr",
            PoolId::Reserve => "reserve",
        }
    }
}

impl fmt::Display for PoolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A treasury pool wallet. While `locked`, the balance may only grow;
/// outbound transfers and burns are rejected until the maturity unlock.
#[derive(Debug, Clone, Serialize)]
pub struct PoolWallet {
    pub pool_id: PoolId,
    pub balance: TokenAmount,
    pub locked: bool,
}

/// Anything that can hold tokens.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Holder {
    Account(AccountId),
    Pool(PoolId),
    Escrow(JobId),
}

impl fmt::Display for Holder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Holder::Account(a) => write!(f, "acct:{a}"),
            Holder::Pool(p) => write!(f, "pool:{p}"),
            Holder::Escrow(j) => write!(f, "escrow:{j}"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LedgerError {
    /// Minting past the hard cap signals an emission-schedule bug.
    #[error("mint of {requested} would push supply past the hard cap ({minted} / {cap} minted)")]
    CapExceeded {
        requested: TokenAmount,
        minted: TokenAmount,
        cap: TokenAmount,
    },
    #[error("{holder} holds {have}, cannot move {need}")]
    InsufficientBalance {
        holder: String,
        have: TokenAmount,
        need: TokenAmount,
    },
    #[error("pool {0} is locked; outbound movement rejected")]
    PoolLocked(PoolId),
    #[error("split shares sum to {sum}‰, expected 1000‰")]
    BadShares { sum: u64 },
}

/// Global supply ledger. Single writer per instance; the value is `Send`
/// so independent scenario runs can each own one.
#[derive(Debug, Clone)]
pub struct SupplyLedger {
    hard_cap: TokenAmount,
    minted_total: TokenAmount,
    burned_total: TokenAmount,
    balances: BTreeMap<AccountId, TokenAmount>,
    pools: BTreeMap<PoolId, PoolWallet>,
    escrows: BTreeMap<JobId, TokenAmount>,
}

impl SupplyLedger {
    pub fn new(hard_cap: TokenAmount) -> Self {
        let pools = PoolId::ALL
            .into_iter()
            .map(|id| {
                (
                    id,
                    PoolWallet {
                        pool_id: id,
                        balance: TokenAmount::ZERO,
                        locked: false,
                    },
                )
            })
            .collect();
        SupplyLedger {
            hard_cap,
            minted_total: TokenAmount::ZERO,
            burned_total: TokenAmount::ZERO,
            balances: BTreeMap::new(),
            pools,
            escrows: BTreeMap::new(),
        }
    }

    pub fn hard_cap(&self) -> TokenAmount {
        self.hard_cap
    }

    pub fn minted_total(&self) -> TokenAmount {
        self.minted_total
    }

    pub fn burned_total(&self) -> TokenAmount {
        self.burned_total
    }

    /// Tokens minted and not burned.
    pub fn circulating(&self) -> TokenAmount {
        self.minted_total.saturating_sub(self.burned_total)
    }

    pub fn pool(&self, id: PoolId) -> &PoolWallet {
        &self.pools[&id]
    }

    pub fn set_pool_locked(&mut self, id: PoolId, locked: bool) {
        if let Some(p) = self.pools.get_mut(&id) {
            p.locked = locked;
        }
    }

    pub fn balance_of(&self, holder: &Holder) -> TokenAmount {
        match holder {
            Holder::Account(a) => self.balances.get(a).copied().unwrap_or(TokenAmount::ZERO),
            Holder::Pool(p) => self.pools[p].balance,
            Holder::Escrow(j) => self.escrows.get(j).copied().unwrap_or(TokenAmount::ZERO),
        }
    }

    pub fn accounts(&self) -> impl Iterator<Item = (&AccountId, TokenAmount)> {
        self.balances.iter().map(|(a, b)| (a, *b))
    }

    /// Create `amount` new tokens in `target`. Fails if the hard cap
    /// would be exceeded.
    pub fn mint(&mut self, target: &Holder, amount: TokenAmount) -> Result<(), LedgerError> {
        let new_minted = self
            .minted_total
            .checked_add(amount)
            .filter(|m| *m <= self.hard_cap)
            .ok_or(LedgerError::CapExceeded {
                requested: amount,
                minted: self.minted_total,
                cap: self.hard_cap,
            })?;
        self.credit(target, amount);
        self.minted_total = new_minted;
        Ok(())
    }

    /// Irreversibly remove `amount` from `source`; the units stay in
    /// `burned_total` for conservation.
    pub fn burn(&mut self, source: &Holder, amount: TokenAmount) -> Result<(), LedgerError> {
        self.debit(source, amount)?;
        self.burned_total = self
            .burned_total
            .checked_add(amount)
            .expect("burned_total bounded by minted_total");
        Ok(())
    }

    /// Move `amount` between holders. Supply totals are untouched.
    pub fn transfer(
        &mut self,
        from: &Holder,
        to: &Holder,
        amount: TokenAmount,
    ) -> Result<(), LedgerError> {
        self.debit(from, amount)?;
        self.credit(to, amount);
        Ok(())
    }

    fn credit(&mut self, holder: &Holder, amount: TokenAmount) {
        let slot = match holder {
            Holder::Account(a) => self.balances.entry(a.clone()).or_insert(TokenAmount::ZERO),
            Holder::Pool(p) => {
                &mut self
                    .pools
                    .get_mut(p)
                    .expect("all pools pre-created")
                    .balance
            }
            Holder::Escrow(j) => self.escrows.entry(*j).or_insert(TokenAmount::ZERO),
        };
        *slot = slot.checked_add(amount).expect("balance bounded by cap");
    }

    fn debit(&mut self, holder: &Holder, amount: TokenAmount) -> Result<(), LedgerError> {
        if let Holder::Pool(p) = holder {
            if self.pools[p].locked && !amount.is_zero() {
                return Err(LedgerError::PoolLocked(*p));
            }
        }
        let have = self.balance_of(holder);
        let left = have
            .checked_sub(amount)
            .ok_or_else(|| LedgerError::InsufficientBalance {
                holder: holder.to_string(),
                have,
                need: amount,
            })?;
        match holder {
            Holder::Account(a) => {
                self.balances.insert(a.clone(), left);
            }
            Holder::Pool(p) => {
                self.pools.get_mut(p).expect("all pools pre-created").balance = left;
            }
            Holder::Escrow(j) => {
                self.escrows.insert(*j, left);
            }
        }
        Ok(())
    }

    /// Sum of everything held anywhere (accounts, pools, escrows).
    pub fn holdings_total(&self) -> TokenAmount {
        let mut sum: u128 = 0;
        for b in self.balances.values() {
            sum += b.units();
        }
        for p in self.pools.values() {
            sum += p.balance.units();
        }
        for e in self.escrows.values() {
            sum += e.units();
        }
        TokenAmount::from_units(sum)
    }

    /// The conservation identity: minted = held + burned.
    pub fn conservation_holds(&self) -> bool {
        self.holdings_total()
            .checked_add(self.burned_total)
            .map(|t| t == self.minted_total)
            .unwrap_or(false)
    }
}

/// Split `amount` across per-mille `shares` (which must sum to 1000).
/// Each target receives `floor(amount × share / 1000)`; leftover base
/// units go one apiece to the targets with the largest remainders,
/// declared order breaking ties. The outputs re-sum to `amount` exactly.
pub fn split_shares<T: Clone>(
    amount: TokenAmount,
    shares: &[(T, u32)],
) -> Result<Vec<(T, TokenAmount)>, LedgerError> {
    let sum: u64 = shares.iter().map(|(_, pm)| *pm as u64).sum();
    if sum != 1000 {
        return Err(LedgerError::BadShares { sum });
    }
    let raw = amount.units();
    let mut parts: Vec<u128> = Vec::with_capacity(shares.len());
    let mut remainders: Vec<(usize, u128)> = Vec::with_capacity(shares.len());
    let mut assigned: u128 = 0;
    for (i, (_, pm)) in shares.iter().enumerate() {
        let scaled = raw * *pm as u128;
        parts.push(scaled / 1000);
        remainders.push((i, scaled % 1000));
        assigned += scaled / 1000;
    }
    let mut leftover = raw - assigned;
    // stable sort keeps declared order among equal remainders
    remainders.sort_by_key(|r| std::cmp::Reverse(r.1));
    for (idx, _) in remainders {
        if leftover == 0 {
            break;
        }
        parts[idx] += 1;
        leftover -= 1;
    }
    Ok(shares
        .iter()
        .zip(parts)
        .map(|((t, _), p)| (t.clone(), TokenAmount::from_units(p)))
        .collect())
}
