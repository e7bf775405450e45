//! Binary-tree period combinatorics: binary leaf labels, right-sibling
//! computation, the node sets covering a suffix of periods, and ancestor
//! tests.
//!
//! Nodes are bit strings read root-to-leaf; a period `t` lives at leaf
//! `bin(t, d)` for a tree of depth `d` (so `T = 2^d` periods).

use crate::error::{Error, Result};

/// A tree node: a nonempty bit string of length at most the tree depth, or
/// the placeholder `Bot` kept so node sets stay positionally aligned.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeId {
    Bot,
    Node(Vec<u8>),
}

impl NodeId {
    pub fn bits(&self) -> Option<&[u8]> {
        match self {
            NodeId::Bot => None,
            NodeId::Node(b) => Some(b),
        }
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, NodeId::Bot)
    }

    pub fn depth(&self) -> usize {
        self.bits().map_or(0, |b| b.len())
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NodeId::Bot => write!(f, "⊥"),
            NodeId::Node(b) => {
                write!(f, "(")?;
                for x in b {
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Most-significant-bit-first binary representation of `b` with exactly
/// `len` bits.
pub fn bin(b: u64, len: usize) -> Result<Vec<u8>> {
    if len < 64 && b >= 1u64 << len {
        return Err(Error::OutOfRange(format!("{b} does not fit in {len} bits")));
    }
    Ok((0..len).rev().map(|i| ((b >> i) & 1) as u8).collect())
}

/// The right sibling of period `t`'s path at depth `j`, for a tree of depth
/// `d` (`1 <= j <= d + 1`; the `d + 1` entry is the leaf itself).
pub fn sibling(j: usize, t: u64, d: usize) -> Result<NodeId> {
    if j == 0 || j > d + 1 {
        return Err(Error::OutOfRange(format!(
            "sibling depth {j} outside 1..={}",
            d + 1
        )));
    }
    if d >= 64 || t >= (1u64 << d) {
        return Err(Error::OutOfRange(format!(
            "period {t} outside the {d}-bit tree"
        )));
    }
    let path = bin(t, d)?;
    if j == d + 1 {
        return Ok(NodeId::Node(path));
    }
    if path[j - 1] == 1 {
        return Ok(NodeId::Bot);
    }
    let mut bits = path[..j - 1].to_vec();
    bits.push(1);
    Ok(NodeId::Node(bits))
}

/// The covering node set for periods `t ..= T-1`: siblings at every depth,
/// in order, `Bot` placeholders kept (always `d + 1` entries).
pub fn nodes_set(t: u64, d: usize) -> Result<Vec<NodeId>> {
    (1..=d + 1).map(|j| sibling(j, t, d)).collect()
}

/// Prefix test, equality included.
pub fn is_ancestor_or_equal(z: &NodeId, z_prime: &NodeId) -> Result<bool> {
    let (a, b) = match (z.bits(), z_prime.bits()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::OutOfRange("ancestor test on ⊥".into())),
    };
    Ok(a.len() <= b.len() && &b[..a.len()] == a)
}

/// Strict prefix test.
pub fn is_strict_ancestor(z: &NodeId, z_prime: &NodeId) -> Result<bool> {
    Ok(is_ancestor_or_equal(z, z_prime)? && z.depth() < z_prime.depth())
}
