//! Node-deed lifecycle: KYC gating, standard-deed purchase with payment
//! routing, license ↔ node association and dAuth validation of the
//! ownership chain.
//!
//! The node → license map is injective at all times: a node backs at
//! most one license and a license binds at most one node.

use crate::amount::TokenAmount;
use crate::ids::{AccountId, LicenseId, NodeId};
use crate::ledger::{split_shares, Holder, LedgerError, PoolId, SupplyLedger};
use crate::liveness::EpochId;
use crate::params;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// License classes. Genesis and master deeds are created at genesis from
/// configuration; standard deeds are purchased.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LicenseClass {
    Gnd,
    Mnd,
    Nd,
}

impl LicenseClass {
    pub fn as_str(self) -> &'static str {
        match self {
            LicenseClass::Gnd => "gnd",
            LicenseClass::Mnd => "mnd",
            LicenseClass::Nd => "nd",
        }
    }

    /// Epoch-credit span of the class emission schedule.
    pub fn credit_span(self) -> u32 {
        match self {
            LicenseClass::Gnd => params::GND_SPAN,
            LicenseClass::Mnd => params::MND_SPAN,
            LicenseClass::Nd => params::ND_SPAN,
        }
    }
}

/// A node deed: the right to mint up to `cap` by accumulating
/// availability credits over `credit_span` epoch-credits.
#[derive(Debug, Clone)]
pub struct License {
    pub id: LicenseId,
    pub class: LicenseClass,
    pub owner: AccountId,
    pub node: Option<NodeId>,
    pub cap: TokenAmount,
    pub credit_span: u32,
    /// Accumulated availability credits on the 0..=255-per-epoch scale;
    /// bounded by `credit_span × 255`.
    pub credits_scaled: u64,
    pub minted: TokenAmount,
    last_association_epoch: Option<EpochId>,
}

impl License {
    /// Credits at which the schedule completes.
    pub fn span_scaled(&self) -> u64 {
        self.credit_span as u64 * params::CREDIT_SCALE as u64
    }

    pub fn is_complete(&self) -> bool {
        self.credits_scaled >= self.span_scaled()
    }

    pub fn remaining(&self) -> TokenAmount {
        self.cap.saturating_sub(self.minted)
    }
}

/// Outcome of a successful association.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociationRecord {
    pub license: LicenseId,
    pub node: NodeId,
    pub epoch: EpochId,
    /// Node this license was bound to before, if any.
    pub replaced: Option<NodeId>,
}

/// Breakdown of a routed deed sale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaleRouting {
    pub price: TokenAmount,
    pub lp: TokenAmount,
    pub burned: TokenAmount,
    pub opex: TokenAmount,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LicensingError {
    #[error("account {0} is not KYC-verified")]
    NotKycVerified(AccountId),
    #[error("account {0} is not registered")]
    UnknownAccount(AccountId),
    #[error("license {0} does not exist")]
    UnknownLicense(LicenseId),
    #[error("{caller} does not own license {license}")]
    NotOwner { caller: AccountId, license: LicenseId },
    #[error("node {0} is already bound to another license")]
    NodeAlreadyBound(NodeId),
    #[error("license already re-associated this epoch")]
    ReassociationRateLimited,
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

#[derive(Debug, Clone, Default)]
pub struct AccountRecord {
    pub kyc_verified: bool,
}

/// Registry of accounts, licenses and node bindings.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    accounts: BTreeMap<AccountId, AccountRecord>,
    licenses: BTreeMap<LicenseId, License>,
    node_index: BTreeMap<NodeId, LicenseId>,
    next_license: u64,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_account(&mut self, id: AccountId, kyc_verified: bool) {
        self.accounts.insert(id, AccountRecord { kyc_verified });
    }

    pub fn set_kyc(&mut self, id: &AccountId, verified: bool) -> Result<(), LicensingError> {
        self.accounts
            .get_mut(id)
            .map(|r| r.kyc_verified = verified)
            .ok_or_else(|| LicensingError::UnknownAccount(id.clone()))
    }

    pub fn is_kyc_verified(&self, id: &AccountId) -> bool {
        self.accounts.get(id).map(|r| r.kyc_verified).unwrap_or(false)
    }

    pub fn license(&self, id: LicenseId) -> Result<&License, LicensingError> {
        self.licenses
            .get(&id)
            .ok_or(LicensingError::UnknownLicense(id))
    }

    pub fn license_mut(&mut self, id: LicenseId) -> Result<&mut License, LicensingError> {
        self.licenses
            .get_mut(&id)
            .ok_or(LicensingError::UnknownLicense(id))
    }

    pub fn licenses(&self) -> impl Iterator<Item = &License> {
        self.licenses.values()
    }

    pub fn license_of_node(&self, node: &NodeId) -> Option<&License> {
        self.node_index.get(node).and_then(|id| self.licenses.get(id))
    }

    /// Create a genesis or master deed without payment. Used at scenario
    /// genesis; the foundation and founder deeds are not purchased.
    pub fn create_genesis_license(
        &mut self,
        class: LicenseClass,
        owner: AccountId,
        cap: TokenAmount,
    ) -> Result<LicenseId, LicensingError> {
        if !self.accounts.contains_key(&owner) {
            return Err(LicensingError::UnknownAccount(owner));
        }
        Ok(self.insert_license(class, owner, cap))
    }

    /// Purchase a standard deed. The payment is routed 50/20/30 per cent
    /// to the liquidity pool, the burn sink and the opex pool, exactly.
    pub fn purchase_nd(
        &mut self,
        ledger: &mut SupplyLedger,
        buyer: &AccountId,
        price: TokenAmount,
    ) -> Result<(LicenseId, SaleRouting), LicensingError> {
        if !self.accounts.contains_key(buyer) {
            return Err(LicensingError::UnknownAccount(buyer.clone()));
        }
        if !self.is_kyc_verified(buyer) {
            return Err(LicensingError::NotKycVerified(buyer.clone()));
        }
        let have = ledger.balance_of(&Holder::Account(buyer.clone()));
        if have < price {
            return Err(LedgerError::InsufficientBalance {
                holder: Holder::Account(buyer.clone()).to_string(),
                have,
                need: price,
            }
            .into());
        }
        let parts = split_shares(
            price,
            &[
                ((), params::ND_SALE_LP_PM),
                ((), params::ND_SALE_BURN_PM),
                ((), params::ND_SALE_OPEX_PM),
            ],
        )?;
        let (lp, burned, opex) = (parts[0].1, parts[1].1, parts[2].1);
        let from = Holder::Account(buyer.clone());
        ledger.transfer(&from, &Holder::Pool(PoolId::Lp), lp)?;
        ledger.burn(&from, burned)?;
        ledger.transfer(&from, &Holder::Pool(PoolId::Opex), opex)?;
        let id = self.insert_license(LicenseClass::Nd, buyer.clone(), params::ND_CAP);
        Ok((
            id,
            SaleRouting {
                price,
                lp,
                burned,
                opex,
            },
        ))
    }

    fn insert_license(&mut self, class: LicenseClass, owner: AccountId, cap: TokenAmount) -> LicenseId {
        let id = LicenseId(self.next_license);
        self.next_license += 1;
        self.licenses.insert(
            id,
            License {
                id,
                class,
                owner,
                node: None,
                cap,
                credit_span: class.credit_span(),
                credits_scaled: 0,
                minted: TokenAmount::ZERO,
                last_association_epoch: None,
            },
        );
        id
    }

    /// Bind `node` to `license`. The caller must own the license, the
    /// node must be free, and a license may (re-)associate at most once
    /// per epoch.
    pub fn associate(
        &mut self,
        caller: &AccountId,
        license: LicenseId,
        node: NodeId,
        epoch: EpochId,
    ) -> Result<AssociationRecord, LicensingError> {
        let lic = self
            .licenses
            .get(&license)
            .ok_or(LicensingError::UnknownLicense(license))?;
        if &lic.owner != caller {
            return Err(LicensingError::NotOwner {
                caller: caller.clone(),
                license,
            });
        }
        if let Some(bound) = self.node_index.get(&node) {
            if *bound != license {
                return Err(LicensingError::NodeAlreadyBound(node));
            }
        }
        if lic.last_association_epoch == Some(epoch) {
            return Err(LicensingError::ReassociationRateLimited);
        }
        let lic = self.licenses.get_mut(&license).expect("checked above");
        let replaced = lic.node.take();
        if let Some(prev) = &replaced {
            self.node_index.remove(prev);
        }
        lic.node = Some(node.clone());
        lic.last_association_epoch = Some(epoch);
        self.node_index.insert(node.clone(), license);
        Ok(AssociationRecord {
            license,
            node,
            epoch,
            replaced,
        })
    }

    /// The dAuth predicate: true iff `node` is bound to a license whose
    /// owner is currently KYC-verified. Nodes failing this receive no
    /// jobs and accrue no credits.
    pub fn dauth_validate(&self, node: &NodeId) -> bool {
        self.license_of_node(node)
            .map(|lic| self.is_kyc_verified(&lic.owner))
            .unwrap_or(false)
    }

    /// Minted-so-far and headroom of a license.
    pub fn license_remaining(
        &self,
        id: LicenseId,
    ) -> Result<(TokenAmount, TokenAmount), LicensingError> {
        let lic = self.license(id)?;
        Ok((lic.minted, lic.remaining()))
    }

    pub fn completion_status(&self, id: LicenseId) -> Result<bool, LicensingError> {
        Ok(self.license(id)?.is_complete())
    }
}

/// Price of the next deed given how many were already sold and the
/// configured `(count, price)` tiers. `None` once every tier is sold out.
pub fn tier_price(tiers: &[(u64, TokenAmount)], sold: u64) -> Option<TokenAmount> {
    let mut boundary = 0u64;
    for (count, price) in tiers {
        boundary += count;
        if sold < boundary {
            return Some(*price);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{HARD_CAP, ND_CAP};

    fn setup() -> (Registry, SupplyLedger) {
        let mut reg = Registry::new();
        let mut ledger = SupplyLedger::new(HARD_CAP);
        reg.register_account(AccountId::new("alice"), true);
        reg.register_account(AccountId::new("nokyc"), false);
        ledger
            .mint(
                &Holder::Account(AccountId::new("alice")),
                TokenAmount::from_whole(1000),
            )
            .unwrap();
        (reg, ledger)
    }

    #[test]
    fn purchase_routes_50_20_30() {
        let (mut reg, mut ledger) = setup();
        let buyer = AccountId::new("alice");
        let (id, routing) = reg
            .purchase_nd(&mut ledger, &buyer, TokenAmount::from_whole(100))
            .unwrap();
        assert_eq!(routing.lp, TokenAmount::from_whole(50));
        assert_eq!(routing.burned, TokenAmount::from_whole(20));
        assert_eq!(routing.opex, TokenAmount::from_whole(30));
        assert_eq!(ledger.pool(PoolId::Lp).balance, TokenAmount::from_whole(50));
        assert_eq!(ledger.burned_total(), TokenAmount::from_whole(20));
        assert_eq!(ledger.pool(PoolId::Opex).balance, TokenAmount::from_whole(30));
        assert!(ledger.conservation_holds());

        let lic = reg.license(id).unwrap();
        assert_eq!(lic.cap, ND_CAP);
        assert_eq!(lic.minted, TokenAmount::ZERO);
        assert_eq!(lic.credits_scaled, 0);
        assert_eq!(lic.credit_span, 1080);
        assert!(lic.node.is_none());
    }

    #[test]
    fn purchase_requires_kyc() {
        let (mut reg, mut ledger) = setup();
        let err = reg
            .purchase_nd(&mut ledger, &AccountId::new("nokyc"), TokenAmount::from_whole(1))
            .unwrap_err();
        assert_eq!(err, LicensingError::NotKycVerified(AccountId::new("nokyc")));
    }

    #[test]
    fn purchase_requires_balance() {
        let (mut reg, mut ledger) = setup();
        let err = reg
            .purchase_nd(&mut ledger, &AccountId::new("alice"), TokenAmount::from_whole(2000))
            .unwrap_err();
        assert!(matches!(err, LicensingError::Ledger(_)));
    }

    #[test]
    fn association_is_injective() {
        let (mut reg, mut ledger) = setup();
        let alice = AccountId::new("alice");
        let (l1, _) = reg
            .purchase_nd(&mut ledger, &alice, TokenAmount::from_whole(10))
            .unwrap();
        let (l2, _) = reg
            .purchase_nd(&mut ledger, &alice, TokenAmount::from_whole(10))
            .unwrap();
        let n = NodeId::new("n0");
        reg.associate(&alice, l1, n.clone(), EpochId(0)).unwrap();
        let err = reg.associate(&alice, l2, n.clone(), EpochId(0)).unwrap_err();
        assert_eq!(err, LicensingError::NodeAlreadyBound(n));
    }

    #[test]
    fn reassociation_rate_limited_within_epoch() {
        let (mut reg, mut ledger) = setup();
        let alice = AccountId::new("alice");
        let (lic, _) = reg
            .purchase_nd(&mut ledger, &alice, TokenAmount::from_whole(10))
            .unwrap();
        reg.associate(&alice, lic, NodeId::new("n0"), EpochId(3)).unwrap();
        let err = reg
            .associate(&alice, lic, NodeId::new("n1"), EpochId(3))
            .unwrap_err();
        assert_eq!(err, LicensingError::ReassociationRateLimited);
        // next epoch the license may move, dissolving the old binding
        let rec = reg
            .associate(&alice, lic, NodeId::new("n1"), EpochId(4))
            .unwrap();
        assert_eq!(rec.replaced, Some(NodeId::new("n0")));
        assert!(reg.license_of_node(&NodeId::new("n0")).is_none());
    }

    #[test]
    fn associate_requires_ownership() {
        let (mut reg, mut ledger) = setup();
        let alice = AccountId::new("alice");
        reg.register_account(AccountId::new("bob"), true);
        let (lic, _) = reg
            .purchase_nd(&mut ledger, &alice, TokenAmount::from_whole(10))
            .unwrap();
        let err = reg
            .associate(&AccountId::new("bob"), lic, NodeId::new("n0"), EpochId(0))
            .unwrap_err();
        assert!(matches!(err, LicensingError::NotOwner { .. }));
    }

    #[test]
    fn dauth_chain() {
        let (mut reg, mut ledger) = setup();
        let alice = AccountId::new("alice");
        let n = NodeId::new("n0");
        assert!(!reg.dauth_validate(&n)); // unbound

        let (lic, _) = reg
            .purchase_nd(&mut ledger, &alice, TokenAmount::from_whole(10))
            .unwrap();
        reg.associate(&alice, lic, n.clone(), EpochId(0)).unwrap();
        assert!(reg.dauth_validate(&n)); // ω → ℓ → node chain intact

        reg.set_kyc(&alice, false).unwrap();
        assert!(!reg.dauth_validate(&n)); // revocation breaks the chain
    }

    #[test]
    fn remaining_plus_minted_is_cap() {
        let (mut reg, mut ledger) = setup();
        let (lic, _) = reg
            .purchase_nd(&mut ledger, &AccountId::new("alice"), TokenAmount::from_whole(10))
            .unwrap();
        let (minted, remaining) = reg.license_remaining(lic).unwrap();
        assert_eq!(minted, TokenAmount::ZERO);
        assert_eq!(remaining, ND_CAP);
        assert_eq!(
            reg.license_remaining(LicenseId(999)).unwrap_err(),
            LicensingError::UnknownLicense(LicenseId(999))
        );
        assert_eq!(
            reg.completion_status(LicenseId(999)).unwrap_err(),
            LicensingError::UnknownLicense(LicenseId(999))
        );
        assert_eq!(reg.completion_status(lic), Ok(false));
    }

    #[test]
    fn tier_pricing_walks_tiers_in_order() {
        let tiers = vec![
            (2u64, TokenAmount::from_whole(500)),
            (3u64, TokenAmount::from_whole(750)),
        ];
        assert_eq!(tier_price(&tiers, 0), Some(TokenAmount::from_whole(500)));
        assert_eq!(tier_price(&tiers, 1), Some(TokenAmount::from_whole(500)));
        assert_eq!(tier_price(&tiers, 2), Some(TokenAmount::from_whole(750)));
        assert_eq!(tier_price(&tiers, 4), Some(TokenAmount::from_whole(750)));
        assert_eq!(tier_price(&tiers, 5), None);
    }
}
