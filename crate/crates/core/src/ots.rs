//! Hash-based one-time signature over a digest of the payload, with
//! runtime enforcement that a signing key is consumed by its first use.

use crate::error::{Error, Result};
use crate::hash::digest;
use rand::Rng;

const DIGEST_BITS: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OtsPublicKey {
    /// 2 * 256 hash values: (bit index, bit value) order.
    pub table: Vec<[u8; 32]>,
}

#[derive(Debug, Clone)]
pub struct OtsSecretKey {
    preimages: Vec<[u8; 32]>,
    used: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OtsSignature {
    pub reveals: Vec<[u8; 32]>,
}

pub fn ots_gen<R: Rng + ?Sized>(rng: &mut R) -> (OtsPublicKey, OtsSecretKey) {
    let mut preimages = Vec::with_capacity(2 * DIGEST_BITS);
    for _ in 0..2 * DIGEST_BITS {
        let mut s = [0u8; 32];
        rng.fill(&mut s);
        preimages.push(s);
    }
    let table = preimages
        .iter()
        .map(|p| digest(b"fsgs:ots-leaf:v1", p))
        .collect();
    (
        OtsPublicKey { table },
        OtsSecretKey {
            preimages,
            used: false,
        },
    )
}

fn payload_bits(payload: &[u8]) -> [u8; 32] {
    digest(b"fsgs:ots-msg:v1", payload)
}

pub fn ots_sign(osk: &mut OtsSecretKey, payload: &[u8]) -> Result<OtsSignature> {
    if osk.used {
        return Err(Error::KeyReuse);
    }
    osk.used = true;
    let d = payload_bits(payload);
    let mut reveals = Vec::with_capacity(DIGEST_BITS);
    for i in 0..DIGEST_BITS {
        let bit = (d[i / 8] >> (i % 8)) & 1;
        reveals.push(osk.preimages[2 * i + bit as usize]);
    }
    Ok(OtsSignature { reveals })
}

pub fn ots_verify(ovk: &OtsPublicKey, sig: &OtsSignature, payload: &[u8]) -> bool {
    if ovk.table.len() != 2 * DIGEST_BITS || sig.reveals.len() != DIGEST_BITS {
        return false;
    }
    let d = payload_bits(payload);
    for i in 0..DIGEST_BITS {
        let bit = (d[i / 8] >> (i % 8)) & 1;
        if digest(b"fsgs:ots-leaf:v1", &sig.reveals[i]) != ovk.table[2 * i + bit as usize] {
            return false;
        }
    }
    true
}

impl OtsPublicKey {
    /// Canonical bytes; doubles as the identity fed to the matrix oracle.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.table.len() * 32);
        for h in &self.table {
            out.extend_from_slice(h);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 2 * DIGEST_BITS * 32 {
            return Err(Error::Encoding("one-time key length".into()));
        }
        let table = bytes
            .chunks_exact(32)
            .map(|c| <[u8; 32]>::try_from(c).unwrap())
            .collect();
        Ok(Self { table })
    }
}
