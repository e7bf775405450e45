//! The per-bit matrix-concatenation signature: one base matrix with a
//! trapdoor, a pair of public matrices per message bit, and signing by
//! delegated preimage sampling against the concatenated matrix.

use crate::error::{Error, Result};
use crate::gauss::KleinSampler;
use crate::mat::{IntMatrix, IntVector};
use crate::trapdoor::{ext_basis, sample_d_with_solver};
use crate::zq::{Solver, ZqMatrix, ZqVector};
use rand::Rng;

/// Resampling budget when a preimage exceeds the norm bound.
pub const SIGN_RETRY_BUDGET: usize = 100;

#[derive(Debug, Clone)]
pub struct BonsaiPublicKey {
    pub a0: ZqMatrix,
    /// One (zero-branch, one-branch) matrix pair per bit position, length k.
    pub pairs: Vec<[ZqMatrix; 2]>,
    pub u: ZqVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BonsaiSignature {
    pub v: IntVector,
}

impl BonsaiPublicKey {
    pub fn bit_depth(&self) -> usize {
        self.pairs.len()
    }
}

/// `[A_0 | A_1^{b_1} | ... | A_j^{b_j}]` for a bit string of length j.
pub fn concat_matrix(pk: &BonsaiPublicKey, bits: &[u8]) -> Result<ZqMatrix> {
    if bits.is_empty() {
        return Err(Error::OutOfRange("bit string must be nonempty".into()));
    }
    if bits.len() > pk.pairs.len() {
        return Err(Error::OutOfRange(format!(
            "bit string length {} exceeds tree depth {}",
            bits.len(),
            pk.pairs.len()
        )));
    }
    let mut a = pk.a0.clone();
    for (i, &b) in bits.iter().enumerate() {
        if b > 1 {
            return Err(Error::OutOfRange(format!("non-binary symbol {b}")));
        }
        a = a.hconcat(&pk.pairs[i][b as usize])?;
    }
    Ok(a)
}

/// Sign a bit string with the base trapdoor: extend the kernel basis to the
/// concatenated matrix and sample a preimage of `u`, redrawing the rare
/// samples whose infinity norm exceeds `beta`.
pub fn bonsai_sign<R: Rng + ?Sized>(
    s0: &IntMatrix,
    pk: &BonsaiPublicKey,
    bits: &[u8],
    s: f64,
    slack: f64,
    beta: i64,
    rng: &mut R,
) -> Result<BonsaiSignature> {
    let a_bits = concat_matrix(pk, bits)?;
    let basis = ext_basis(s0, &pk.a0, &a_bits)?;
    sign_with_basis(&basis, &a_bits, &pk.u, s, slack, beta, rng)
}

/// Preimage signing against an arbitrary kernel basis of `a_bits` (used both
/// by [`bonsai_sign`] and by key evolution, where the basis comes from a
/// delegated node rather than the root).
pub fn sign_with_basis<R: Rng + ?Sized>(
    basis: &IntMatrix,
    a_bits: &ZqMatrix,
    u: &ZqVector,
    s: f64,
    slack: f64,
    beta: i64,
    rng: &mut R,
) -> Result<BonsaiSignature> {
    let sampler = KleinSampler::new(basis.clone(), s, slack)?;
    let solver = Solver::new(a_bits);
    for _ in 0..SIGN_RETRY_BUDGET {
        let v = sample_d_with_solver(&sampler, &solver, a_bits, u, rng)?;
        if v.inf_norm() <= beta as u64 {
            return Ok(BonsaiSignature { v });
        }
    }
    Err(Error::RetryBudget("preimage norm bound"))
}

/// Accept iff the syndrome equation holds and the norm bound is met.
pub fn bonsai_verify(pk: &BonsaiPublicKey, bits: &[u8], sig: &BonsaiSignature, beta: i64) -> bool {
    let Ok(a_bits) = concat_matrix(pk, bits) else {
        return false;
    };
    if sig.v.len() != a_bits.cols() {
        return false;
    }
    if sig.v.inf_norm() > beta as u64 {
        return false;
    }
    match a_bits.mul_int_vector(&sig.v) {
        Ok(got) => got == pk.u,
        Err(_) => false,
    }
}
