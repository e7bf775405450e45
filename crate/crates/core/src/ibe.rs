//! The opening encryption layer: identity-key extraction against the
//! tracer's trapdoor, encryption of the signer index under a derived
//! public matrix, and the rounding decryption.

use crate::error::{Error, Result};
use crate::gauss::KleinSampler;
use crate::mat::{IntMatrix, IntVector};
use crate::params::Params;
use crate::trapdoor::sample_d_with_solver;
use crate::zq::{Solver, ZqMatrix, ZqVector};
use rand::Rng;

/// Resampling budget for the extraction norm cap.
const EXTRACT_RETRY_BUDGET: usize = 100;

/// Small-norm preimage matrix `F` with `B_enc * F = G mod q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityKey {
    pub f: IntMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdCiphertext {
    pub c1: ZqVector,
    pub c2: ZqVector,
}

/// Encryption randomness, all entries bounded by B.
#[derive(Debug, Clone)]
pub struct NoiseSample {
    pub s: IntVector,
    pub e1: IntVector,
    pub e2: IntVector,
}

impl NoiseSample {
    /// Uniform B-bounded noise.
    pub fn sample<R: Rng + ?Sized>(params: &Params, rng: &mut R) -> Self {
        let b = params.b_noise;
        let draw = |len: usize, rng: &mut R| {
            IntVector::new((0..len).map(|_| rng.gen_range(-b..=b)).collect())
        };
        Self {
            s: draw(params.n, rng),
            e1: draw(params.m, rng),
            e2: draw(params.ell, rng),
        }
    }

    pub fn zero(params: &Params) -> Self {
        Self {
            s: IntVector::zero(params.n),
            e1: IntVector::zero(params.m),
            e2: IntVector::zero(params.ell),
        }
    }

    pub fn check_bounds(&self, params: &Params) -> Result<()> {
        let b = params.b_noise as u64;
        if self.s.inf_norm() > b || self.e1.inf_norm() > b || self.e2.inf_norm() > b {
            return Err(Error::OutOfRange("noise exceeds the bound B".into()));
        }
        if self.s.len() != params.n || self.e1.len() != params.m || self.e2.len() != params.ell {
            return Err(Error::DimensionMismatch("noise sample shape".into()));
        }
        Ok(())
    }
}

/// Column-wise preimage extraction: `F` with `B_enc F = G mod q` and each
/// column's infinity norm at most `ceil(s_ell log2 m)` (resampled past the
/// cap).
pub fn ibe_extract<R: Rng + ?Sized>(
    b_enc: &ZqMatrix,
    tracer_basis: &IntMatrix,
    g: &ZqMatrix,
    params: &Params,
    rng: &mut R,
) -> Result<IdentityKey> {
    if g.rows() != b_enc.rows() {
        return Err(Error::DimensionMismatch("derived matrix height".into()));
    }
    let s_ell = params.s_f64(params.ell);
    let sampler = KleinSampler::new(tracer_basis.clone(), s_ell, params.slack_f64())?;
    let solver = Solver::new(b_enc);
    let cap = params.extract_norm_cap() as u64;
    let mut cols = Vec::with_capacity(g.cols());
    for c in 0..g.cols() {
        let target = g.column(c);
        let mut found = None;
        for _ in 0..EXTRACT_RETRY_BUDGET {
            let v = sample_d_with_solver(&sampler, &solver, b_enc, &target, rng)?;
            if v.inf_norm() <= cap {
                found = Some(v);
                break;
            }
        }
        cols.push(found.ok_or(Error::RetryBudget("extraction norm cap"))?);
    }
    let f = IntMatrix::from_columns(&cols)?;
    debug_assert_eq!(&b_enc.mul_int_matrix(&f)?, g);
    Ok(IdentityKey { f })
}

/// `c1 = B_enc^T s + e1`, `c2 = G^T s + e2 + floor(q/2) id`.
pub fn ibe_encrypt(
    b_enc: &ZqMatrix,
    g: &ZqMatrix,
    id_bits: &[u8],
    noise: &NoiseSample,
) -> Result<IdCiphertext> {
    if id_bits.len() != g.cols() {
        return Err(Error::DimensionMismatch("identity length".into()));
    }
    let q = b_enc.q;
    let c1 = b_enc
        .transpose()
        .mul_int_vector(&noise.s)?
        .add(&ZqVector::from_int(q, &noise.e1))?;
    let half = q.get() / 2;
    let gs = g.transpose().mul_int_vector(&noise.s)?;
    let mut c2 = gs.add(&ZqVector::from_int(q, &noise.e2))?;
    for (i, &b) in id_bits.iter().enumerate() {
        if b > 1 {
            return Err(Error::OutOfRange("identity bits must be binary".into()));
        }
        if b == 1 {
            c2.data[i] = (c2.data[i] + half) % q.get();
        }
    }
    Ok(IdCiphertext { c1, c2 })
}

/// Rounding decryption: each coordinate of `c2 - F^T c1` decodes to the
/// nearer of `0` and `floor(q/2)` on the mod-q circle; an exact tie means
/// the ciphertext is malformed (outside the correctness margin) and is
/// reported rather than clamped.
pub fn ibe_decrypt(key: &IdentityKey, ct: &IdCiphertext) -> Result<Vec<u8>> {
    let q = ct.c1.q;
    let ft_c1 = {
        let mut out = Vec::with_capacity(key.f.cols());
        for c in 0..key.f.cols() {
            let mut acc: i128 = 0;
            for r in 0..key.f.rows() {
                acc += key.f.get(r, c) as i128 * ct.c1.data[r] as i128;
            }
            let m = q.get() as i128;
            out.push(((acc % m + m) % m) as u64);
        }
        ZqVector::from_u64(q, out)
    };
    if ft_c1.len() != ct.c2.len() {
        return Err(Error::DimensionMismatch(
            "identity key vs ciphertext".into(),
        ));
    }
    let diff = ct.c2.sub(&ft_c1)?;
    let half = q.get() / 2;
    let mut bits = Vec::with_capacity(diff.len());
    for &w in &diff.data {
        let d0 = w.min(q.get() - w);
        let dist = w.abs_diff(half);
        let d1 = dist.min(q.get() - dist);
        bits.push(match d0.cmp(&d1) {
            std::cmp::Ordering::Less => 0u8,
            std::cmp::Ordering::Greater => 1u8,
            std::cmp::Ordering::Equal => return Err(Error::MalformedCiphertext),
        });
    }
    Ok(bits)
}

/// The measured opening error `||e2 - F^T e1||_inf` for an honest run.
pub fn opening_error(key: &IdentityKey, noise: &NoiseSample) -> Result<u64> {
    let fte = {
        let mut out = Vec::with_capacity(key.f.cols());
        for c in 0..key.f.cols() {
            let mut acc: i128 = 0;
            for r in 0..key.f.rows() {
                acc += key.f.get(r, c) as i128 * noise.e1.data[r] as i128;
            }
            out.push(acc);
        }
        out
    };
    Ok(fte
        .iter()
        .zip(&noise.e2.data)
        .map(|(&a, &b)| (b as i128 - a).unsigned_abs())
        .max()
        .unwrap_or(0) as u64)
}
