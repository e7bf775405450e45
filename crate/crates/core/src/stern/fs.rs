//! Fiat-Shamir aggregation of the three-move argument: kappa parallel
//! commitments, a hash-derived challenge string over the canonical context,
//! and per-round responses.

use crate::error::Result;
use crate::hash::challenge_trits;
use crate::stern::protocol::{round_commit, round_respond, round_verify, Commitment, Response};
use crate::stern::statement::{SternStatement, SternWitness};
use rand::Rng;

/// Messages longer than this enter the challenge context as a domain-tagged
/// digest instead of verbatim bytes.
const MESSAGE_INLINE_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NizkProof {
    pub commitments: Vec<Commitment>,
    pub challenges: Vec<u8>,
    pub responses: Vec<Response>,
}

/// The challenge context: tag, statement digest, message, all commitments,
/// both ciphertext halves, and the period as a little-endian word.
fn challenge_context(stmt: &SternStatement, message: &[u8], cmts: &[Commitment]) -> Vec<u8> {
    let mut ctx = Vec::new();
    ctx.extend_from_slice(b"fsgs:fs-context:v1");
    ctx.extend_from_slice(&stmt.m_digest);
    if message.len() <= MESSAGE_INLINE_LIMIT {
        ctx.push(0);
        crate::encode::put_u64(&mut ctx, message.len() as u64);
        ctx.extend_from_slice(message);
    } else {
        ctx.push(1);
        ctx.extend_from_slice(&crate::hash::digest(b"fsgs:long-message:v1", message));
    }
    for c in cmts {
        ctx.extend_from_slice(&c.c1);
        ctx.extend_from_slice(&c.c2);
        ctx.extend_from_slice(&c.c3);
    }
    crate::encode::put_zq_vector(&mut ctx, &stmt.c1);
    crate::encode::put_zq_vector(&mut ctx, &stmt.c2);
    crate::encode::put_u64(&mut ctx, stmt.t);
    ctx
}

pub fn fs_prove<R: Rng + ?Sized>(
    stmt: &SternStatement,
    wit: &SternWitness,
    message: &[u8],
    kappa: usize,
    rng: &mut R,
) -> Result<NizkProof> {
    let mut cmts = Vec::with_capacity(kappa);
    let mut states = Vec::with_capacity(kappa);
    for _ in 0..kappa {
        let (c, st) = round_commit(stmt, wit, rng)?;
        cmts.push(c);
        states.push(st);
    }
    let challenges = challenge_trits(&challenge_context(stmt, message, &cmts), kappa);
    let responses = states
        .iter()
        .zip(&challenges)
        .map(|(st, &ch)| round_respond(stmt, st, ch))
        .collect::<Result<Vec<_>>>()?;
    Ok(NizkProof {
        commitments: cmts,
        challenges,
        responses,
    })
}

pub fn fs_verify(stmt: &SternStatement, proof: &NizkProof, message: &[u8], kappa: usize) -> bool {
    if proof.commitments.len() != kappa
        || proof.challenges.len() != kappa
        || proof.responses.len() != kappa
    {
        return false;
    }
    let expect = challenge_trits(&challenge_context(stmt, message, &proof.commitments), kappa);
    if proof.challenges != expect {
        return false;
    }
    proof
        .commitments
        .iter()
        .zip(&proof.challenges)
        .zip(&proof.responses)
        .all(|((cmt, &ch), rsp)| round_verify(stmt, cmt, ch, rsp))
}

/// Deterministic serialized size of a proof under the wire layout; exposed
/// so reports can cross-check actual files against the formula.
pub fn proof_byte_len(proof: &NizkProof) -> usize {
    crate::wire::nizk_proof_bytes(proof).len()
}
