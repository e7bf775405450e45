//! Scheme orchestration: signing binds a fresh one-time key into the
//! identity encryption, proves possession of a period-valid credential in
//! zero knowledge, and seals ciphertext and proof under the one-time
//! signature; verification and opening undo the layers in order.

use crate::error::{Error, Result};
use crate::hash::{derive_matrix, digest};
use crate::ibe::{ibe_decrypt, ibe_encrypt, ibe_extract, IdCiphertext, IdentityKey, NoiseSample};
use crate::keys::{GroupPublicKey, TracerSecretKey, UserSecretKey};
use crate::ots::{ots_gen, ots_sign, ots_verify, OtsPublicKey, OtsSignature};
use crate::stern::fs::{fs_prove, fs_verify, NizkProof};
use crate::stern::statement::{build_statement, build_witness, SternDims};
use crate::zq::ZqMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::collections::HashMap;
use std::sync::RwLock;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSignature {
    pub ovk: OtsPublicKey,
    pub ct: IdCiphertext,
    pub proof: NizkProof,
    pub sig: OtsSignature,
}

/// The matrix oracle applied to a one-time verification key.
pub fn h0(gpk: &GroupPublicKey, ovk: &OtsPublicKey) -> ZqMatrix {
    derive_matrix(gpk.params.q, gpk.params.n, gpk.params.ell, &ovk.to_bytes())
}

/// The payload sealed by the one-time signature: both ciphertext halves and
/// the whole proof, canonically encoded.
fn ots_payload(ct: &IdCiphertext, proof: &NizkProof) -> Vec<u8> {
    let mut out = Vec::new();
    crate::encode::put_zq_vector(&mut out, &ct.c1);
    crate::encode::put_zq_vector(&mut out, &ct.c2);
    out.extend(crate::wire::nizk_proof_bytes(proof));
    out
}

pub fn sign<R: Rng + ?Sized>(
    gpk: &GroupPublicKey,
    usk: &UserSecretKey,
    user: u64,
    t: u64,
    message: &[u8],
    rng: &mut R,
) -> Result<GroupSignature> {
    let params = &gpk.params;
    if t >= params.periods() {
        return Err(Error::OutOfRange(format!(
            "period {t} outside the lifetime"
        )));
    }
    if usk.user != user {
        return Err(Error::CorruptKey(format!(
            "key belongs to user {}",
            usk.user
        )));
    }
    if usk.period != t {
        return Err(Error::MissingLeaf);
    }
    let leaf = usk.leaf_for_period(params)?;
    let id_bits = gpk.id_bits(user)?;

    let (ovk, mut osk) = ots_gen(rng);
    let g = h0(gpk, &ovk);
    let noise = NoiseSample::sample(params, rng);
    let ct = ibe_encrypt(&gpk.b_enc, &g, &id_bits, &noise)?;

    let dims = SternDims::from_params(params);
    let stmt = build_statement(&dims, &gpk.bonsai, &gpk.b_enc, &g, &ct, t)?;
    let wit = build_witness(&dims, &id_bits, &noise, &leaf.v)?;
    let proof = fs_prove(&stmt, &wit, message, params.kappa, rng)?;

    let sig = ots_sign(&mut osk, &ots_payload(&ct, &proof))?;
    Ok(GroupSignature {
        ovk,
        ct,
        proof,
        sig,
    })
}

pub fn verify(gpk: &GroupPublicKey, t: u64, message: &[u8], sigma: &GroupSignature) -> bool {
    let params = &gpk.params;
    if t >= params.periods() {
        return false;
    }
    if sigma.ct.c1.len() != params.m || sigma.ct.c2.len() != params.ell || sigma.ct.c1.q != params.q
    {
        return false;
    }
    if !ots_verify(
        &sigma.ovk,
        &sigma.sig,
        &ots_payload(&sigma.ct, &sigma.proof),
    ) {
        return false;
    }
    let g = h0(gpk, &sigma.ovk);
    let dims = SternDims::from_params(params);
    let Ok(stmt) = build_statement(&dims, &gpk.bonsai, &gpk.b_enc, &g, &sigma.ct, t) else {
        return false;
    };
    fs_verify(&stmt, &sigma.proof, message, params.kappa)
}

/// Opening context: the tracing key plus a cache of extracted identity keys
/// per one-time key (readers share, insertion is exclusive).
pub struct Opener {
    mosk: TracerSecretKey,
    cache: RwLock<HashMap<Vec<u8>, IdentityKey>>,
}

impl Opener {
    pub fn new(mosk: TracerSecretKey) -> Self {
        Self {
            mosk,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn tracer_key(&self) -> &TracerSecretKey {
        &self.mosk
    }

    /// Verify, then decrypt the signer index. Extraction randomness is
    /// derived from the tracing key and the one-time key, so opening is a
    /// function of its inputs.
    pub fn open(
        &self,
        gpk: &GroupPublicKey,
        t: u64,
        message: &[u8],
        sigma: &GroupSignature,
    ) -> Result<u64> {
        if !verify(gpk, t, message, sigma) {
            return Err(Error::VerifyReject);
        }
        let ovk_bytes = sigma.ovk.to_bytes();
        let key = {
            let cache = self.cache.read().expect("cache lock");
            cache.get(&ovk_bytes).cloned()
        };
        let key = match key {
            Some(k) => k,
            None => {
                let g = h0(gpk, &sigma.ovk);
                let mut seed_input = Vec::new();
                for r in 0..self.mosk.s_enc.rows() {
                    for c in 0..self.mosk.s_enc.cols() {
                        seed_input.extend_from_slice(&self.mosk.s_enc.get(r, c).to_le_bytes());
                    }
                }
                seed_input.extend_from_slice(&ovk_bytes);
                let seed = digest(b"fsgs:open-rng:v1", &seed_input);
                let mut rng = ChaCha20Rng::from_seed(seed);
                let k = ibe_extract(&gpk.b_enc, &self.mosk.s_enc, &g, &gpk.params, &mut rng)?;
                self.cache
                    .write()
                    .expect("cache lock")
                    .insert(ovk_bytes, k.clone());
                k
            }
        };
        let bits = ibe_decrypt(&key, &sigma.ct)
            .map_err(|_| Error::OpenReject("ciphertext outside the decoding margin".into()))?;
        let mut index = 0u64;
        for &b in &bits {
            index = (index << 1) | b as u64;
        }
        if index >= gpk.params.users() {
            return Err(Error::OpenReject(format!(
                "decoded index {index} outside the group"
            )));
        }
        Ok(index)
    }
}

/// One-shot opening without a persistent cache.
pub fn open(
    gpk: &GroupPublicKey,
    mosk: &TracerSecretKey,
    t: u64,
    message: &[u8],
    sigma: &GroupSignature,
) -> Result<u64> {
    Opener::new(mosk.clone()).open(gpk, t, message, sigma)
}
