//! Group key generation and per-period key evolution.
//!
//! A user key for period t holds one entry per covering node: a short
//! signature vector at leaves, a delegated kernel basis at internal nodes,
//! and a placeholder where the covering set has none. Advancing a period
//! keeps surviving entries verbatim, delegates fresh material for the new
//! nodes from their unique ancestor, and scrubs everything dropped.

use crate::bonsai::{bonsai_verify, BonsaiPublicKey, BonsaiSignature};
use crate::error::{Error, Result};
use crate::mat::{gram_schmidt_norm_f64, IntMatrix};
use crate::params::{Params, TRAPGEN_C};
use crate::timetree::{bin, is_strict_ancestor, nodes_set, NodeId};
use crate::trapdoor::{trap_gen, verify_kernel_basis, DelegationSource, TrapdoorPair};
use crate::zq::ZqMatrix;
use rand::Rng;

/// Attempts to draw a trapdoor whose measured quality clears the ladder.
const TRAPGEN_RETRY_BUDGET: usize = 20;

#[derive(Debug, Clone)]
pub struct GroupPublicKey {
    pub params: Params,
    pub bonsai: BonsaiPublicKey,
    pub b_enc: ZqMatrix,
}

#[derive(Debug, Clone)]
pub struct ManagerSecretKey {
    pub s0: IntMatrix,
}

#[derive(Debug, Clone)]
pub struct TracerSecretKey {
    pub s_enc: IntMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KeyEntry {
    Bot,
    Leaf(BonsaiSignature),
    Basis(IntMatrix),
}

#[derive(Debug, Clone)]
pub struct UserSecretKey {
    pub user: u64,
    pub period: u64,
    /// Aligned with `nodes_set(period)`: entry i corresponds to depth i+1.
    pub entries: Vec<(NodeId, KeyEntry)>,
}

impl GroupPublicKey {
    /// `[A_0 | bit blocks for id | bit blocks for z]`.
    pub fn matrix_for(&self, id_bits: &[u8], z: &NodeId) -> Result<ZqMatrix> {
        let mut bits = id_bits.to_vec();
        match z.bits() {
            Some(zb) => bits.extend_from_slice(zb),
            None => return Err(Error::OutOfRange("placeholder node has no matrix".into())),
        }
        crate::bonsai::concat_matrix(&self.bonsai, &bits)
    }

    pub fn id_bits(&self, user: u64) -> Result<Vec<u8>> {
        if user >= self.params.users() {
            return Err(Error::OutOfRange(format!("user {user} outside the group")));
        }
        bin(user, self.params.ell)
    }
}

impl UserSecretKey {
    pub fn entry_for(&self, node: &NodeId) -> Option<&KeyEntry> {
        self.entries.iter().find(|(n, _)| n == node).map(|(_, e)| e)
    }

    /// The leaf signature for the key's own period, the piece consumed by
    /// signing.
    pub fn leaf_for_period(&self, params: &Params) -> Result<&BonsaiSignature> {
        let leaf = NodeId::Node(bin(self.period, params.d)?);
        match self.entry_for(&leaf) {
            Some(KeyEntry::Leaf(sig)) => Ok(sig),
            _ => Err(Error::MissingLeaf),
        }
    }

    /// Best-effort scrub of all key material.
    pub fn wipe(&mut self) {
        for (_, e) in self.entries.iter_mut() {
            match e {
                KeyEntry::Bot => {}
                KeyEntry::Leaf(sig) => sig.v.wipe(),
                KeyEntry::Basis(b) => b.wipe(),
            }
        }
    }
}

fn trap_gen_within_quality<R: Rng + ?Sized>(
    params: &Params,
    rng: &mut R,
) -> Result<(TrapdoorPair, f64)> {
    let cap = params.s_f64(params.ell) / params.slack_f64();
    let c_bound = TRAPGEN_C * ((params.n as f64) * (params.q.get() as f64).log2()).sqrt();
    for _ in 0..TRAPGEN_RETRY_BUDGET {
        let td = trap_gen(params.n, params.m, params.q, rng)?;
        let gs = gram_schmidt_norm_f64(&td.basis)?;
        if gs > c_bound {
            return Err(Error::ParamViolation(format!(
                "trapdoor quality {gs:.1} exceeds the recorded construction bound {c_bound:.1}"
            )));
        }
        if gs <= cap {
            return Ok((td, gs));
        }
    }
    Err(Error::RetryBudget("trapdoor quality"))
}

/// Budget for redrawing leaf preimages whose norm exceeds beta.
const LEAF_RETRY_BUDGET: usize = 100;

/// Derive the entry for one covering node by delegation from a prepared
/// source (the group trapdoor at generation time, the node's unique
/// ancestor during updates).
fn derive_entry<R: Rng + ?Sized>(
    gpk_params: &Params,
    bonsai: &BonsaiPublicKey,
    source: &DelegationSource,
    id_bits: &[u8],
    node: &NodeId,
    rng: &mut R,
) -> Result<KeyEntry> {
    let Some(zb) = node.bits() else {
        return Ok(KeyEntry::Bot);
    };
    let mut bits = id_bits.to_vec();
    bits.extend_from_slice(zb);
    let a_target = crate::bonsai::concat_matrix(bonsai, &bits)?;
    if zb.len() == gpk_params.d {
        let s_k = gpk_params.s_f64(gpk_params.k);
        for _ in 0..LEAF_RETRY_BUDGET {
            let v =
                source.sample_preimage(&a_target, &bonsai.u, s_k, gpk_params.slack_f64(), rng)?;
            if v.inf_norm() <= gpk_params.beta as u64 {
                return Ok(KeyEntry::Leaf(BonsaiSignature { v }));
            }
        }
        Err(Error::RetryBudget("leaf preimage norm bound"))
    } else {
        let level = gpk_params.ell + zb.len();
        let basis = source.delegate_basis(
            &a_target,
            gpk_params.s_f64(level),
            gpk_params.slack_f64(),
            rng,
        )?;
        Ok(KeyEntry::Basis(basis))
    }
}

/// Group key generation: the signing trapdoor, the per-bit public matrices,
/// the opening trapdoor, and every user's period-0 key.
pub fn key_gen<R: Rng + ?Sized>(
    params: &Params,
    rng: &mut R,
) -> Result<(
    GroupPublicKey,
    ManagerSecretKey,
    TracerSecretKey,
    Vec<UserSecretKey>,
)> {
    let all: Vec<u64> = (0..params.users()).collect();
    key_gen_for_users(params, &all, rng)
}

/// Key generation restricted to a subset of user indices (reports and
/// benchmarks generate a single user's key instead of the whole group).
pub fn key_gen_for_users<R: Rng + ?Sized>(
    params: &Params,
    user_set: &[u64],
    rng: &mut R,
) -> Result<(
    GroupPublicKey,
    ManagerSecretKey,
    TracerSecretKey,
    Vec<UserSecretKey>,
)> {
    let (td_sign, _) = trap_gen_within_quality(params, rng)?;
    let pairs: Vec<[ZqMatrix; 2]> = (0..params.k)
        .map(|_| {
            [
                ZqMatrix::uniform(params.q, params.n, params.m, rng),
                ZqMatrix::uniform(params.q, params.n, params.m, rng),
            ]
        })
        .collect();
    let u = ZqMatrix::uniform(params.q, params.n, 1, rng).column(0);
    let (td_enc, _) = trap_gen_within_quality(params, rng)?;

    let bonsai = BonsaiPublicKey {
        a0: td_sign.matrix.clone(),
        pairs,
        u,
    };
    let gpk = GroupPublicKey {
        params: params.clone(),
        bonsai,
        b_enc: td_enc.matrix.clone(),
    };
    let msk = ManagerSecretKey { s0: td_sign.basis };
    let mosk = TracerSecretKey {
        s_enc: td_enc.basis,
    };

    let root = DelegationSource::new(gpk.bonsai.a0.clone(), msk.s0.clone())?;
    let mut users = Vec::with_capacity(user_set.len());
    for &user in user_set {
        let id_bits = gpk.id_bits(user)?;
        let mut entries = Vec::new();
        for node in nodes_set(0, params.d)? {
            let entry = derive_entry(params, &gpk.bonsai, &root, &id_bits, &node, rng)?;
            entries.push((node, entry));
        }
        let usk = UserSecretKey {
            user,
            period: 0,
            entries,
        };
        verify_user_key(&gpk, &usk)?;
        users.push(usk);
    }
    Ok((gpk, msk, mosk, users))
}

/// Advance a user key one period. Surviving nodes are carried bit for bit;
/// new nodes are delegated from their unique strict ancestor in the old set;
/// everything dropped is overwritten before release.
pub fn key_update<R: Rng + ?Sized>(
    gpk: &GroupPublicKey,
    mut usk: UserSecretKey,
    user: u64,
    rng: &mut R,
) -> Result<UserSecretKey> {
    let params = &gpk.params;
    if usk.user != user {
        return Err(Error::CorruptKey(format!(
            "key belongs to user {}, not {user}",
            usk.user
        )));
    }
    let t_next = usk.period + 1;
    if t_next >= params.periods() {
        return Err(Error::EndOfLifetime(usk.period));
    }
    let id_bits = gpk.id_bits(user)?;
    let next_nodes = nodes_set(t_next, params.d)?;
    let mut next_entries: Vec<(NodeId, KeyEntry)> = Vec::with_capacity(next_nodes.len());
    let mut carried: Vec<usize> = Vec::new();
    // Delegation sources are reused across children of one ancestor (the
    // orthogonalization of a randomized basis is the expensive part).
    let mut sources: Vec<(NodeId, DelegationSource)> = Vec::new();

    for node in next_nodes {
        if node.is_bot() {
            next_entries.push((node, KeyEntry::Bot));
            continue;
        }
        // Case 1: the node survives from the old set.
        if let Some(pos) = usk.entries.iter().position(|(n, _)| n == &node) {
            carried.push(pos);
            next_entries.push((node, usk.entries[pos].1.clone()));
            continue;
        }
        // Case 2: delegate from the unique strict ancestor.
        let parent = usk
            .entries
            .iter()
            .find(|(n, _)| !n.is_bot() && is_strict_ancestor(n, &node).unwrap_or(false))
            .ok_or_else(|| Error::CorruptKey(format!("no ancestor entry for {node}")))?;
        if !sources.iter().any(|(n, _)| n == &parent.0) {
            let KeyEntry::Basis(parent_basis) = &parent.1 else {
                return Err(Error::CorruptKey(format!(
                    "ancestor of {node} is not a basis"
                )));
            };
            let mut parent_bits = id_bits.clone();
            parent_bits.extend_from_slice(parent.0.bits().expect("non-bot"));
            let parent_matrix = crate::bonsai::concat_matrix(&gpk.bonsai, &parent_bits)?;
            sources.push((
                parent.0.clone(),
                DelegationSource::new(parent_matrix, parent_basis.clone())?,
            ));
        }
        let source = &sources
            .iter()
            .find(|(n, _)| n == &parent.0)
            .expect("just inserted")
            .1;
        let entry = derive_entry(params, &gpk.bonsai, source, &id_bits, &node, rng)?;
        next_entries.push((node, entry));
    }

    // Scrub everything that did not survive.
    for (i, (_, e)) in usk.entries.iter_mut().enumerate() {
        if !carried.contains(&i) {
            match e {
                KeyEntry::Bot => {}
                KeyEntry::Leaf(sig) => sig.v.wipe(),
                KeyEntry::Basis(b) => b.wipe(),
            }
        }
    }

    let next = UserSecretKey {
        user,
        period: t_next,
        entries: next_entries,
    };
    verify_user_key(gpk, &next)?;
    Ok(next)
}

/// Exact re-verification of every entry: leaf syndromes and norm bounds,
/// basis kernel membership and full rank, and that the entry set is exactly
/// the covering set of the period.
pub fn verify_user_key(gpk: &GroupPublicKey, usk: &UserSecretKey) -> Result<()> {
    let params = &gpk.params;
    let expected = nodes_set(usk.period, params.d)?;
    if usk.entries.len() != expected.len() {
        return Err(Error::CorruptKey("entry count".into()));
    }
    let id_bits = gpk.id_bits(usk.user)?;
    for ((node, entry), expect_node) in usk.entries.iter().zip(&expected) {
        if node != expect_node {
            return Err(Error::CorruptKey(format!("entry {node} out of place")));
        }
        match (node, entry) {
            (NodeId::Bot, KeyEntry::Bot) => {}
            (NodeId::Node(zb), KeyEntry::Leaf(sig)) if zb.len() == params.d => {
                let mut bits = id_bits.clone();
                bits.extend_from_slice(zb);
                if !bonsai_verify(&gpk.bonsai, &bits, sig, params.beta) {
                    return Err(Error::CorruptKey(format!("leaf {node} fails verification")));
                }
            }
            (NodeId::Node(zb), KeyEntry::Basis(basis)) if zb.len() < params.d => {
                let a = gpk.matrix_for(&id_bits, node)?;
                verify_kernel_basis(&a, basis)?;
            }
            _ => return Err(Error::CorruptKey(format!("entry kind mismatch at {node}"))),
        }
    }
    Ok(())
}

/// Structural forward secrecy on actual key material: no entry of a
/// period-t key covers any earlier leaf.
pub fn assert_no_past_coverage(params: &Params, usk: &UserSecretKey) -> Result<()> {
    for t_past in 0..usk.period {
        let leaf = NodeId::Node(bin(t_past, params.d)?);
        for (node, _) in usk.entries.iter().filter(|(n, _)| !n.is_bot()) {
            if crate::timetree::is_ancestor_or_equal(node, &leaf)? {
                return Err(Error::CorruptKey(format!(
                    "entry {node} covers past period {t_past}"
                )));
            }
        }
    }
    Ok(())
}
