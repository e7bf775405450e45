//! Byte-exact serialization for every public object.
//!
//! Every file starts with a header: magic `FSGS`, a version word, an object
//! kind byte, and the digest of the canonical parameter encoding, binding
//! all dimension fields. Mod-q entries are little-endian at the modulus's
//! minimal width; signed entries are 8-byte little-endian; variable fields
//! carry 32-bit length prefixes.

use crate::bonsai::{BonsaiPublicKey, BonsaiSignature};
use crate::encode::{put_u32, put_u64, put_zq_vector, Cursor};
use crate::error::{Error, Result};
use crate::ibe::IdCiphertext;
use crate::keys::{GroupPublicKey, KeyEntry, ManagerSecretKey, TracerSecretKey, UserSecretKey};
use crate::mat::{IntMatrix, IntVector};
use crate::ots::{OtsPublicKey, OtsSignature};
use crate::params::Params;
use crate::scheme::GroupSignature;
use crate::stern::fs::NizkProof;
use crate::stern::protocol::{Commitment, Response};
use crate::stern::statement::{PermutationElement, SternDims};
use crate::timetree::NodeId;
use crate::zq::{Modulus, ZqMatrix, ZqVector};
use num_rational::Ratio;

pub const MAGIC: &[u8; 4] = b"FSGS";
pub const VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectKind {
    Params = 1,
    GroupPublicKey = 2,
    ManagerSecretKey = 3,
    TracerSecretKey = 4,
    UserSecretKey = 5,
    Signature = 6,
}

impl ObjectKind {
    fn from_u8(v: u8) -> Result<Self> {
        Ok(match v {
            1 => Self::Params,
            2 => Self::GroupPublicKey,
            3 => Self::ManagerSecretKey,
            4 => Self::TracerSecretKey,
            5 => Self::UserSecretKey,
            6 => Self::Signature,
            _ => return Err(Error::Encoding(format!("unknown object kind {v}"))),
        })
    }
}

const HEADER_LEN: usize = 4 + 2 + 1 + 32;

// ---------------------------------------------------------------------------
// Params
// ---------------------------------------------------------------------------

pub fn params_body(p: &Params) -> Vec<u8> {
    let mut out = Vec::new();
    put_u64(&mut out, p.n as u64);
    put_u64(&mut out, p.q.get());
    put_u64(&mut out, p.m as u64);
    put_u64(&mut out, p.ell as u64);
    put_u64(&mut out, p.d as u64);
    put_u64(&mut out, p.kappa as u64);
    let s_ell = p.s(p.ell);
    out.extend_from_slice(&s_ell.numer().to_le_bytes());
    out.extend_from_slice(&s_ell.denom().to_le_bytes());
    put_u64(&mut out, p.b_noise as u64);
    out
}

pub fn params_digest(p: &Params) -> [u8; 32] {
    crate::hash::digest(b"fsgs:params:v1", &params_body(p))
}

fn params_from_body(cur: &mut Cursor<'_>) -> Result<Params> {
    let n = cur.u64()? as usize;
    let q = cur.u64()?;
    let m = cur.u64()? as usize;
    let ell = cur.u64()? as usize;
    let d = cur.u64()? as usize;
    let kappa = cur.u64()? as usize;
    let num = i64::from_le_bytes(cur.take(8)?.try_into().unwrap());
    let den = i64::from_le_bytes(cur.take(8)?.try_into().unwrap());
    let b_noise = cur.u64()? as i64;
    if den <= 0 || num <= 0 {
        return Err(Error::Encoding("ladder base must be positive".into()));
    }
    Params::new(n, q, m, ell, d, kappa, Ratio::new(num, den), b_noise)
}

fn header(kind: ObjectKind, p: &Params) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(kind as u8);
    out.extend_from_slice(&params_digest(p));
    out
}

fn check_header(cur: &mut Cursor<'_>, kind: ObjectKind) -> Result<[u8; 32]> {
    let magic = cur.take(4)?;
    if magic != MAGIC {
        return Err(Error::Encoding("bad magic".into()));
    }
    let version = u16::from_le_bytes(cur.take(2)?.try_into().unwrap());
    if version != VERSION {
        return Err(Error::Encoding(format!("unsupported version {version}")));
    }
    let k = ObjectKind::from_u8(cur.take(1)?[0])?;
    if k != kind {
        return Err(Error::Encoding(format!(
            "object kind {k:?}, expected {kind:?}"
        )));
    }
    Ok(cur.take(32)?.try_into().unwrap())
}

pub fn params_bytes(p: &Params) -> Vec<u8> {
    let mut out = header(ObjectKind::Params, p);
    out.extend(params_body(p));
    out
}

pub fn params_from_bytes(bytes: &[u8]) -> Result<Params> {
    let mut cur = Cursor::new(bytes);
    let digest = check_header(&mut cur, ObjectKind::Params)?;
    let p = params_from_body(&mut cur)?;
    cur.expect_end()?;
    if digest != params_digest(&p) {
        return Err(Error::Encoding("params digest mismatch".into()));
    }
    Ok(p)
}

// ---------------------------------------------------------------------------
// Matrices and vectors
// ---------------------------------------------------------------------------

fn put_zq_matrix(out: &mut Vec<u8>, m: &ZqMatrix) {
    for &x in m.data() {
        crate::encode::put_zq_entry(out, m.q, x);
    }
}

fn read_zq_matrix(cur: &mut Cursor<'_>, q: Modulus, rows: usize, cols: usize) -> Result<ZqMatrix> {
    let mut m = ZqMatrix::zero(q, rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, cur.zq_entry(q)?);
        }
    }
    Ok(m)
}

fn put_int_vector(out: &mut Vec<u8>, v: &IntVector) {
    put_u32(out, v.len() as u32);
    for &x in &v.data {
        out.extend_from_slice(&x.to_le_bytes());
    }
}

fn read_int_vector(cur: &mut Cursor<'_>) -> Result<IntVector> {
    let len = cur.u32()? as usize;
    let mut data = Vec::with_capacity(len);
    for _ in 0..len {
        data.push(i64::from_le_bytes(cur.take(8)?.try_into().unwrap()));
    }
    Ok(IntVector::new(data))
}

fn put_int_matrix(out: &mut Vec<u8>, m: &IntMatrix) {
    put_u32(out, m.rows() as u32);
    put_u32(out, m.cols() as u32);
    for &x in m.data() {
        out.extend_from_slice(&x.to_le_bytes());
    }
}

fn read_int_matrix(cur: &mut Cursor<'_>) -> Result<IntMatrix> {
    let rows = cur.u32()? as usize;
    let cols = cur.u32()? as usize;
    let mut m = IntMatrix::zero(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, i64::from_le_bytes(cur.take(8)?.try_into().unwrap()));
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Group public key
// ---------------------------------------------------------------------------

pub fn gpk_bytes(gpk: &GroupPublicKey) -> Vec<u8> {
    let p = &gpk.params;
    let mut out = header(ObjectKind::GroupPublicKey, p);
    out.extend(params_body(p));
    put_zq_matrix(&mut out, &gpk.bonsai.a0);
    for pair in &gpk.bonsai.pairs {
        put_zq_matrix(&mut out, &pair[0]);
        put_zq_matrix(&mut out, &pair[1]);
    }
    put_zq_vector(&mut out, &gpk.bonsai.u);
    put_zq_matrix(&mut out, &gpk.b_enc);
    out
}

pub fn gpk_from_bytes(bytes: &[u8]) -> Result<GroupPublicKey> {
    let mut cur = Cursor::new(bytes);
    let digest = check_header(&mut cur, ObjectKind::GroupPublicKey)?;
    let params = params_from_body(&mut cur)?;
    if digest != params_digest(&params) {
        return Err(Error::Encoding("params digest mismatch".into()));
    }
    let (n, m, q) = (params.n, params.m, params.q);
    let a0 = read_zq_matrix(&mut cur, q, n, m)?;
    let mut pairs = Vec::with_capacity(params.k);
    for _ in 0..params.k {
        let z = read_zq_matrix(&mut cur, q, n, m)?;
        let o = read_zq_matrix(&mut cur, q, n, m)?;
        pairs.push([z, o]);
    }
    let u = cur.zq_vector(q, n)?;
    let b_enc = read_zq_matrix(&mut cur, q, n, m)?;
    cur.expect_end()?;
    Ok(GroupPublicKey {
        params,
        bonsai: BonsaiPublicKey { a0, pairs, u },
        b_enc,
    })
}

// ---------------------------------------------------------------------------
// Secret keys
// ---------------------------------------------------------------------------

pub fn msk_bytes(p: &Params, msk: &ManagerSecretKey) -> Vec<u8> {
    let mut out = header(ObjectKind::ManagerSecretKey, p);
    put_int_matrix(&mut out, &msk.s0);
    out
}

pub fn msk_from_bytes(p: &Params, bytes: &[u8]) -> Result<ManagerSecretKey> {
    let mut cur = Cursor::new(bytes);
    let digest = check_header(&mut cur, ObjectKind::ManagerSecretKey)?;
    if digest != params_digest(p) {
        return Err(Error::Encoding("params digest mismatch".into()));
    }
    let s0 = read_int_matrix(&mut cur)?;
    cur.expect_end()?;
    Ok(ManagerSecretKey { s0 })
}

pub fn mosk_bytes(p: &Params, mosk: &TracerSecretKey) -> Vec<u8> {
    let mut out = header(ObjectKind::TracerSecretKey, p);
    put_int_matrix(&mut out, &mosk.s_enc);
    out
}

pub fn mosk_from_bytes(p: &Params, bytes: &[u8]) -> Result<TracerSecretKey> {
    let mut cur = Cursor::new(bytes);
    let digest = check_header(&mut cur, ObjectKind::TracerSecretKey)?;
    if digest != params_digest(p) {
        return Err(Error::Encoding("params digest mismatch".into()));
    }
    let s_enc = read_int_matrix(&mut cur)?;
    cur.expect_end()?;
    Ok(TracerSecretKey { s_enc })
}

pub fn usk_bytes(p: &Params, usk: &UserSecretKey) -> Vec<u8> {
    let mut out = header(ObjectKind::UserSecretKey, p);
    put_u64(&mut out, usk.user);
    put_u64(&mut out, usk.period);
    put_u32(&mut out, usk.entries.len() as u32);
    for (node, entry) in &usk.entries {
        match node {
            NodeId::Bot => out.push(0),
            NodeId::Node(bits) => {
                out.push(1);
                out.push(bits.len() as u8);
                out.extend_from_slice(bits);
            }
        }
        match entry {
            KeyEntry::Bot => out.push(0),
            KeyEntry::Leaf(sig) => {
                out.push(1);
                put_int_vector(&mut out, &sig.v);
            }
            KeyEntry::Basis(b) => {
                out.push(2);
                put_int_matrix(&mut out, b);
            }
        }
    }
    out
}

pub fn usk_from_bytes(p: &Params, bytes: &[u8]) -> Result<UserSecretKey> {
    let mut cur = Cursor::new(bytes);
    let digest = check_header(&mut cur, ObjectKind::UserSecretKey)?;
    if digest != params_digest(p) {
        return Err(Error::Encoding("params digest mismatch".into()));
    }
    let user = cur.u64()?;
    let period = cur.u64()?;
    let count = cur.u32()? as usize;
    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let node = match cur.take(1)?[0] {
            0 => NodeId::Bot,
            1 => {
                let len = cur.take(1)?[0] as usize;
                let bits = cur.take(len)?.to_vec();
                if bits.iter().any(|&b| b > 1) {
                    return Err(Error::Encoding("node bits must be binary".into()));
                }
                NodeId::Node(bits)
            }
            v => return Err(Error::Encoding(format!("bad node tag {v}"))),
        };
        let entry = match cur.take(1)?[0] {
            0 => KeyEntry::Bot,
            1 => KeyEntry::Leaf(BonsaiSignature {
                v: read_int_vector(&mut cur)?,
            }),
            2 => KeyEntry::Basis(read_int_matrix(&mut cur)?),
            v => return Err(Error::Encoding(format!("bad entry tag {v}"))),
        };
        entries.push((node, entry));
    }
    cur.expect_end()?;
    Ok(UserSecretKey {
        user,
        period,
        entries,
    })
}

// ---------------------------------------------------------------------------
// Proofs and signatures
// ---------------------------------------------------------------------------

fn put_len_zq_vector(out: &mut Vec<u8>, v: &ZqVector) {
    put_u32(out, v.len() as u32);
    put_zq_vector(out, v);
}

fn read_len_zq_vector(cur: &mut Cursor<'_>, q: Modulus, expect: usize) -> Result<ZqVector> {
    let len = cur.u32()? as usize;
    if len != expect {
        return Err(Error::Encoding(format!(
            "vector length {len}, expected {expect}"
        )));
    }
    cur.zq_vector(q, len)
}

fn put_rho(out: &mut Vec<u8>, rho: &[u8; 32]) {
    out.extend_from_slice(rho);
}

fn read_rho(cur: &mut Cursor<'_>) -> Result<[u8; 32]> {
    Ok(cur.take(32)?.try_into().unwrap())
}

fn put_perm(out: &mut Vec<u8>, phi: &PermutationElement) {
    let bytes = phi.to_bytes();
    put_u32(out, bytes.len() as u32);
    out.extend_from_slice(&bytes);
}

fn read_perm(cur: &mut Cursor<'_>, dims: &SternDims) -> Result<PermutationElement> {
    let len = cur.u32()? as usize;
    PermutationElement::from_bytes(dims, cur.take(len)?)
}

pub fn nizk_proof_bytes(proof: &NizkProof) -> Vec<u8> {
    let mut out = Vec::new();
    put_u32(&mut out, proof.commitments.len() as u32);
    for c in &proof.commitments {
        out.extend_from_slice(&c.c1);
        out.extend_from_slice(&c.c2);
        out.extend_from_slice(&c.c3);
    }
    out.extend_from_slice(&proof.challenges);
    for rsp in &proof.responses {
        out.push(rsp.challenge());
        match rsp {
            Response::Ch1 {
                t_w,
                t_r,
                rho2,
                rho3,
            } => {
                put_len_zq_vector(&mut out, t_w);
                put_len_zq_vector(&mut out, t_r);
                put_rho(&mut out, rho2);
                put_rho(&mut out, rho3);
            }
            Response::Ch2 {
                phi,
                w2,
                rho1,
                rho3,
            } => {
                put_perm(&mut out, phi);
                put_len_zq_vector(&mut out, w2);
                put_rho(&mut out, rho1);
                put_rho(&mut out, rho3);
            }
            Response::Ch3 {
                phi,
                w3,
                rho1,
                rho2,
            } => {
                put_perm(&mut out, phi);
                put_len_zq_vector(&mut out, w3);
                put_rho(&mut out, rho1);
                put_rho(&mut out, rho2);
            }
        }
    }
    out
}

pub fn nizk_proof_read(cur: &mut Cursor<'_>, dims: &SternDims, q: Modulus) -> Result<NizkProof> {
    let kappa = cur.u32()? as usize;
    if kappa == 0 || kappa > 4096 {
        return Err(Error::Encoding(format!("round count {kappa}")));
    }
    let l = dims.l();
    let mut commitments = Vec::with_capacity(kappa);
    for _ in 0..kappa {
        let c1 = read_rho(cur)?;
        let c2 = read_rho(cur)?;
        let c3 = read_rho(cur)?;
        commitments.push(Commitment { c1, c2, c3 });
    }
    let challenges = cur.take(kappa)?.to_vec();
    if challenges.iter().any(|&c| !(1..=3).contains(&c)) {
        return Err(Error::Encoding("challenge out of range".into()));
    }
    let mut responses = Vec::with_capacity(kappa);
    for &expected in &challenges {
        let tag = cur.take(1)?[0];
        if tag != expected {
            return Err(Error::Encoding(
                "response tag disagrees with challenge".into(),
            ));
        }
        let rsp = match tag {
            1 => {
                let t_w = read_len_zq_vector(cur, q, l)?;
                let t_r = read_len_zq_vector(cur, q, l)?;
                let rho2 = read_rho(cur)?;
                let rho3 = read_rho(cur)?;
                Response::Ch1 {
                    t_w,
                    t_r,
                    rho2,
                    rho3,
                }
            }
            2 => {
                let phi = read_perm(cur, dims)?;
                let w2 = read_len_zq_vector(cur, q, l)?;
                let rho1 = read_rho(cur)?;
                let rho3 = read_rho(cur)?;
                Response::Ch2 {
                    phi,
                    w2,
                    rho1,
                    rho3,
                }
            }
            3 => {
                let phi = read_perm(cur, dims)?;
                let w3 = read_len_zq_vector(cur, q, l)?;
                let rho1 = read_rho(cur)?;
                let rho2 = read_rho(cur)?;
                Response::Ch3 {
                    phi,
                    w3,
                    rho1,
                    rho2,
                }
            }
            _ => unreachable!(),
        };
        responses.push(rsp);
    }
    Ok(NizkProof {
        commitments,
        challenges,
        responses,
    })
}

pub fn signature_bytes(p: &Params, sigma: &GroupSignature) -> Vec<u8> {
    let mut out = header(ObjectKind::Signature, p);
    let ovk = sigma.ovk.to_bytes();
    put_u32(&mut out, ovk.len() as u32);
    out.extend_from_slice(&ovk);
    put_len_zq_vector(&mut out, &sigma.ct.c1);
    put_len_zq_vector(&mut out, &sigma.ct.c2);
    out.extend(nizk_proof_bytes(&sigma.proof));
    put_u32(&mut out, sigma.sig.reveals.len() as u32);
    for r in &sigma.sig.reveals {
        out.extend_from_slice(r);
    }
    out
}

pub fn signature_from_bytes(p: &Params, bytes: &[u8]) -> Result<GroupSignature> {
    let mut cur = Cursor::new(bytes);
    let digest = check_header(&mut cur, ObjectKind::Signature)?;
    if digest != params_digest(p) {
        return Err(Error::Encoding("params digest mismatch".into()));
    }
    let ovk_len = cur.u32()? as usize;
    let ovk = OtsPublicKey::from_bytes(cur.take(ovk_len)?)?;
    let c1 = read_len_zq_vector(&mut cur, p.q, p.m)?;
    let c2 = read_len_zq_vector(&mut cur, p.q, p.ell)?;
    let dims = SternDims::from_params(p);
    let proof = nizk_proof_read(&mut cur, &dims, p.q)?;
    if proof.commitments.len() != p.kappa {
        return Err(Error::Encoding(
            "round count disagrees with parameters".into(),
        ));
    }
    let nreveal = cur.u32()? as usize;
    let mut reveals = Vec::with_capacity(nreveal);
    for _ in 0..nreveal {
        reveals.push(read_rho(&mut cur)?);
    }
    cur.expect_end()?;
    Ok(GroupSignature {
        ovk,
        ct: IdCiphertext { c1, c2 },
        proof,
        sig: OtsSignature { reveals },
    })
}

/// Deterministic layout length of a serialized signature, computed from the
/// parameter set and the proof's challenge string alone.
pub fn signature_layout_len(p: &Params, challenges: &[u8]) -> usize {
    let dims = SternDims::from_params(p);
    let w = p.q.entry_width();
    let l = dims.l();
    let perm_bytes = {
        let bw = dims.y_block();
        4 + (2 * p.ell + 1) * (4 + 2 * bw) + (4 + 2 * dims.l2()) + (4 + 2 * dims.l3()) + 4 + p.ell
    };
    let rsp = |ch: u8| -> usize {
        match ch {
            1 => 1 + 2 * (4 + l * w) + 64,
            _ => 1 + (4 + perm_bytes) + (4 + l * w) + 64,
        }
    };
    let kappa = challenges.len();
    HEADER_LEN
        + (4 + 512 * 32)                       // one-time verification key
        + (4 + p.m * w) + (4 + p.ell * w)      // ciphertext halves
        + 4 + kappa * 96 + kappa               // commitments and challenges
        + challenges.iter().map(|&c| rsp(c)).sum::<usize>()
        + (4 + 256 * 32) // one-time signature
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_roundtrip() {
        let p = Params::small();
        let bytes = params_bytes(&p);
        let back = params_from_bytes(&bytes).unwrap();
        assert_eq!(p, back);
        // Header corruption is rejected.
        let mut bad = bytes.clone();
        bad[0] ^= 1;
        assert!(params_from_bytes(&bad).is_err());
        // Digest corruption is rejected.
        let mut bad = bytes.clone();
        bad[10] ^= 1;
        assert!(params_from_bytes(&bad).is_err());
    }
}
