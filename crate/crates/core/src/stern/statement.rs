//! Statement and witness construction for the signing relation, the
//! structured ternary witness set, and the permutation family acting on it.
//!
//! The linear statement stacks two block rows: the signature relation
//! (matrix-concatenation syndrome) against the decomposed-and-extended
//! signature blocks, and the encryption relation against the decomposed
//! noise plus the bit/complement-encoded identity. A witness is valid when
//! every extended block has balanced symbol counts, the off-identity blocks
//! vanish, and the tail is the bit/complement encoding of some identity.

use crate::bonsai::BonsaiPublicKey;
use crate::error::{Error, Result};
use crate::ibe::{IdCiphertext, NoiseSample};
use crate::mat::IntVector;
use crate::params::Params;
use crate::stern::gadgets::{balanced_ternary_counts, enc2, ext3, vdec, DecompositionSpec};
use crate::timetree::bin;
use crate::zq::{ZqMatrix, ZqVector};
use rand::seq::SliceRandom;
use rand::Rng;

/// All dimension bookkeeping for one statement shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SternDims {
    pub ell: usize,
    pub d: usize,
    pub m: usize,
    pub n: usize,
    pub beta: i64,
    pub b_noise: i64,
    pub p_beta: usize,
    pub p_b: usize,
}

impl SternDims {
    pub fn new(ell: usize, d: usize, m: usize, n: usize, beta: i64, b_noise: i64) -> Result<Self> {
        let spec_beta = DecompositionSpec::new(beta)?;
        let spec_b = DecompositionSpec::new(b_noise)?;
        Ok(Self {
            ell,
            d,
            m,
            n,
            beta,
            b_noise,
            p_beta: spec_beta.width(),
            p_b: spec_b.width(),
        })
    }

    pub fn from_params(p: &Params) -> Self {
        Self::new(p.ell, p.d, p.m, p.n, p.beta, p.b_noise).expect("params imply valid dims")
    }

    /// Width of one extended signature block.
    pub fn y_block(&self) -> usize {
        3 * self.m * self.p_beta
    }

    pub fn l1(&self) -> usize {
        (2 * self.ell + 1) * self.y_block()
    }

    pub fn l2(&self) -> usize {
        3 * self.d * self.m * self.p_beta
    }

    pub fn nml(&self) -> usize {
        self.n + self.m + self.ell
    }

    pub fn l3(&self) -> usize {
        3 * self.nml() * self.p_b
    }

    pub fn l4(&self) -> usize {
        2 * self.ell
    }

    pub fn l(&self) -> usize {
        self.l1() + self.l2() + self.l3() + self.l4()
    }

    /// Statement row count.
    pub fn rows(&self) -> usize {
        self.n + self.m + self.ell
    }

    pub fn spec_beta(&self) -> DecompositionSpec {
        DecompositionSpec::new(self.beta).expect("checked at construction")
    }

    pub fn spec_b(&self) -> DecompositionSpec {
        DecompositionSpec::new(self.b_noise).expect("checked at construction")
    }

    fn y_offset(&self, block: usize) -> usize {
        block * self.y_block()
    }
}

#[derive(Debug, Clone)]
pub struct SternStatement {
    pub dims: SternDims,
    pub m_mat: ZqMatrix,
    pub u0: ZqVector,
    pub c1: ZqVector,
    pub c2: ZqVector,
    pub t: u64,
    pub m_digest: [u8; 32],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SternWitness {
    pub w: Vec<i8>,
}

/// Build the public statement for signing period `t`.
pub fn build_statement(
    dims: &SternDims,
    pk: &BonsaiPublicKey,
    b_enc: &ZqMatrix,
    g: &ZqMatrix,
    ct: &IdCiphertext,
    t: u64,
) -> Result<SternStatement> {
    let q = pk.a0.q;
    let (ell, d, m, n) = (dims.ell, dims.d, dims.m, dims.n);
    if pk.pairs.len() != ell + d {
        return Err(Error::DimensionMismatch("bit-pair count vs dims".into()));
    }
    if pk.a0.rows() != n || pk.a0.cols() != m || b_enc.rows() != n || b_enc.cols() != m {
        return Err(Error::DimensionMismatch("matrix shapes vs dims".into()));
    }
    if g.rows() != n || g.cols() != ell || ct.c1.len() != m || ct.c2.len() != ell {
        return Err(Error::DimensionMismatch(
            "derived matrix or ciphertext shape".into(),
        ));
    }
    let z = bin(t, d)?;
    let spec_beta = dims.spec_beta();
    let spec_b = dims.spec_b();
    let rows = dims.rows();
    let l = dims.l();
    let mut mm = ZqMatrix::zero(q, rows, l);

    // Top block row (n rows): signature relation columns.
    // Signature blocks: the base block then the (zero, one) pair per
    // identity bit, each against the per-block ladder; padding columns stay
    // zero.
    let mut col_base = 0usize;
    for block in 0..2 * ell + 1 {
        let a_block = if block == 0 {
            &pk.a0
        } else {
            &pk.pairs[(block - 1) / 2][(block - 1) % 2]
        };
        for c in 0..m {
            for (j, &bj) in spec_beta.ladder.iter().enumerate() {
                let col = col_base + c * dims.p_beta + j;
                let bj_mod = q.reduce_i64(bj);
                for r in 0..n {
                    let v = (a_block.get(r, c) as u128 * bj_mod as u128 % q.get() as u128) as u64;
                    mm.set(r, col, v);
                }
            }
        }
        col_base += dims.y_block();
    }
    // Period blocks: one matrix per tree level, branch fixed by bin(t).
    debug_assert_eq!(col_base, dims.l1());
    for (jz, &zb) in z.iter().enumerate() {
        let a_block = &pk.pairs[ell + jz][zb as usize];
        for c in 0..m {
            for (j, &bj) in spec_beta.ladder.iter().enumerate() {
                let col = col_base + (jz * m + c) * dims.p_beta + j;
                let bj_mod = q.reduce_i64(bj);
                for r in 0..n {
                    let v = (a_block.get(r, c) as u128 * bj_mod as u128 % q.get() as u128) as u64;
                    mm.set(r, col, v);
                }
            }
        }
    }

    // Bottom block row (m + ell rows): encryption relation columns against
    // the noise ladder, then the interleaved identity columns.
    let bot = n;
    let col3 = dims.l1() + dims.l2();
    for c in 0..dims.nml() {
        for (j, &bj) in spec_b.ladder.iter().enumerate() {
            let col = col3 + c * dims.p_b + j;
            let bj_mod = q.reduce_i64(bj);
            if c < n {
                // Column of [B_enc^T over G^T].
                for r in 0..m {
                    let v = (b_enc.get(c, r) as u128 * bj_mod as u128 % q.get() as u128) as u64;
                    mm.set(bot + r, col, v);
                }
                for r in 0..ell {
                    let v = (g.get(c, r) as u128 * bj_mod as u128 % q.get() as u128) as u64;
                    mm.set(bot + m + r, col, v);
                }
            } else if c < n + m {
                mm.set(bot + (c - n), col, bj_mod);
            } else {
                mm.set(bot + m + (c - n - m), col, bj_mod);
            }
        }
    }
    let col4 = col3 + dims.l3();
    let half = q.get() / 2;
    for i in 0..ell {
        mm.set(bot + m + i, col4 + 2 * i, half);
    }

    let u0 = pk.u.concat(&ct.c1)?.concat(&ct.c2)?;
    if u0.len() != rows {
        return Err(Error::DimensionMismatch("syndrome stack".into()));
    }
    let m_digest = digest_matrix(&mm);
    Ok(SternStatement {
        dims: dims.clone(),
        m_mat: mm,
        u0,
        c1: ct.c1.clone(),
        c2: ct.c2.clone(),
        t,
        m_digest,
    })
}

fn digest_matrix(m: &ZqMatrix) -> [u8; 32] {
    let mut bytes = Vec::with_capacity(16 + m.data().len() * m.q.entry_width());
    crate::encode::put_u64(&mut bytes, m.rows() as u64);
    crate::encode::put_u64(&mut bytes, m.cols() as u64);
    for &x in m.data() {
        crate::encode::put_zq_entry(&mut bytes, m.q, x);
    }
    crate::hash::digest(b"fsgs:statement:v1", &bytes)
}

/// Assemble the structured witness from the signing tuple.
#[allow(clippy::needless_range_loop)]
pub fn build_witness(
    dims: &SternDims,
    id_bits: &[u8],
    noise: &NoiseSample,
    v: &IntVector,
) -> Result<SternWitness> {
    let (ell, d, m) = (dims.ell, dims.d, dims.m);
    if id_bits.len() != ell || id_bits.iter().any(|&b| b > 1) {
        return Err(Error::OutOfRange("identity bits".into()));
    }
    if v.len() != (ell + d + 1) * m {
        return Err(Error::DimensionMismatch("signature vector length".into()));
    }
    if v.inf_norm() > dims.beta as u64 {
        return Err(Error::OutOfRange("signature vector exceeds beta".into()));
    }
    if noise.s.len() != dims.n || noise.e1.len() != m || noise.e2.len() != ell {
        return Err(Error::DimensionMismatch("noise shape".into()));
    }
    let b = dims.b_noise as u64;
    if noise.s.inf_norm() > b || noise.e1.inf_norm() > b || noise.e2.inf_norm() > b {
        return Err(Error::OutOfRange("noise exceeds B".into()));
    }
    let spec_beta = dims.spec_beta();
    let spec_b = dims.spec_b();

    let mut w: Vec<i8> = Vec::with_capacity(dims.l());
    // Base signature block.
    w.extend(ext3(&vdec(&v.data[..m], &spec_beta)?)?);
    // Identity-selected pairs.
    for i in 0..ell {
        let vi = &v.data[(i + 1) * m..(i + 2) * m];
        let ext = ext3(&vdec(vi, &spec_beta)?)?;
        let zeros = vec![0i8; dims.y_block()];
        if id_bits[i] == 0 {
            w.extend(ext);
            w.extend(zeros);
        } else {
            w.extend(zeros);
            w.extend(ext);
        }
    }
    // Period blocks, decomposed as one run.
    let tail = &v.data[(ell + 1) * m..];
    w.extend(ext3(&vdec(tail, &spec_beta)?)?);
    // Noise run.
    let mut w3 = noise.s.data.clone();
    w3.extend_from_slice(&noise.e1.data);
    w3.extend_from_slice(&noise.e2.data);
    w.extend(ext3(&vdec(&w3, &spec_b)?)?);
    // Identity encoding.
    w.extend(enc2(id_bits).into_iter().map(|b| b as i8));
    debug_assert_eq!(w.len(), dims.l());
    let wit = SternWitness { w };
    debug_assert!(valid_check(dims, &wit.w)?);
    Ok(wit)
}

/// Membership test for the structured witness set. The identity is
/// recovered deterministically from the tail pairs, then every block
/// condition is checked.
pub fn valid_check(dims: &SternDims, w: &[i8]) -> Result<bool> {
    if w.len() != dims.l() {
        return Err(Error::DimensionMismatch(format!(
            "witness length {} vs {}",
            w.len(),
            dims.l()
        )));
    }
    let off4 = dims.l1() + dims.l2() + dims.l3();
    let mut x = Vec::with_capacity(dims.ell);
    for i in 0..dims.ell {
        let a = w[off4 + 2 * i];
        let b = w[off4 + 2 * i + 1];
        if !((a == 0 || a == 1) && b == 1 - a) {
            return Ok(false);
        }
        x.push(a as u8);
    }
    let bw = dims.y_block();
    if !balanced_ternary_counts(&w[..bw]) {
        return Ok(false);
    }
    for i in 0..dims.ell {
        let sel = x[i] as usize;
        let on = &w[dims.y_offset(1 + 2 * i + sel)..dims.y_offset(1 + 2 * i + sel) + bw];
        let off_blk =
            &w[dims.y_offset(1 + 2 * i + (1 - sel))..dims.y_offset(1 + 2 * i + (1 - sel)) + bw];
        if !balanced_ternary_counts(on) {
            return Ok(false);
        }
        if off_blk.iter().any(|&v| v != 0) {
            return Ok(false);
        }
    }
    let z2 = &w[dims.l1()..dims.l1() + dims.l2()];
    if !balanced_ternary_counts(z2) {
        return Ok(false);
    }
    let z3 = &w[dims.l1() + dims.l2()..off4];
    if !balanced_ternary_counts(z3) {
        return Ok(false);
    }
    Ok(true)
}

/// The witness pieces recovered from a structured witness by undoing the
/// decomposition, used by the extractor.
#[derive(Debug, Clone)]
pub struct DecodedWitness {
    pub id_bits: Vec<u8>,
    pub v: IntVector,
    pub s: IntVector,
    pub e1: IntVector,
    pub e2: IntVector,
}

pub fn decode_witness(dims: &SternDims, w: &[i8]) -> Result<DecodedWitness> {
    if !valid_check(dims, w)? {
        return Err(Error::OutOfRange(
            "witness not in the structured set".into(),
        ));
    }
    let spec_beta = dims.spec_beta();
    let spec_b = dims.spec_b();
    let off4 = dims.l1() + dims.l2() + dims.l3();
    let id_bits: Vec<u8> = (0..dims.ell).map(|i| w[off4 + 2 * i] as u8).collect();
    let bw = dims.y_block();
    let mut v = crate::stern::gadgets::reconstruct(&w[..bw], dims.m, &spec_beta)?.data;
    for i in 0..dims.ell {
        let sel = id_bits[i] as usize;
        let blk = &w[dims.y_offset(1 + 2 * i + sel)..dims.y_offset(1 + 2 * i + sel) + bw];
        v.extend(crate::stern::gadgets::reconstruct(blk, dims.m, &spec_beta)?.data);
    }
    let z2 = &w[dims.l1()..dims.l1() + dims.l2()];
    v.extend(crate::stern::gadgets::reconstruct(z2, dims.d * dims.m, &spec_beta)?.data);
    let z3 = &w[dims.l1() + dims.l2()..off4];
    let w3 = crate::stern::gadgets::reconstruct(z3, dims.nml(), &spec_b)?.data;
    let v = IntVector::new(v);
    if v.inf_norm() > dims.beta as u64 {
        return Err(Error::OutOfRange("decoded signature exceeds beta".into()));
    }
    let s = IntVector::new(w3[..dims.n].to_vec());
    let e1 = IntVector::new(w3[dims.n..dims.n + dims.m].to_vec());
    let e2 = IntVector::new(w3[dims.n + dims.m..].to_vec());
    let nb = dims.b_noise as u64;
    if s.inf_norm() > nb || e1.inf_norm() > nb || e2.inf_norm() > nb {
        return Err(Error::OutOfRange("decoded noise exceeds B".into()));
    }
    Ok(DecodedWitness {
        id_bits,
        v,
        s,
        e1,
        e2,
    })
}

/// One element of the permutation family: per-block shuffles plus the
/// identity-bit flip vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationElement {
    pub psis: Vec<Vec<u32>>,
    pub eta2: Vec<u32>,
    pub eta3: Vec<u32>,
    pub e: Vec<u8>,
}

fn sample_perm<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<u32> {
    let mut p: Vec<u32> = (0..len as u32).collect();
    p.shuffle(rng);
    p
}

fn is_perm(p: &[u32], len: usize) -> bool {
    if p.len() != len {
        return false;
    }
    let mut seen = vec![false; len];
    for &i in p {
        let i = i as usize;
        if i >= len || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}

impl PermutationElement {
    pub fn sample<R: Rng + ?Sized>(dims: &SternDims, rng: &mut R) -> Self {
        let bw = dims.y_block();
        Self {
            psis: (0..2 * dims.ell + 1)
                .map(|_| sample_perm(bw, rng))
                .collect(),
            eta2: sample_perm(dims.l2(), rng),
            eta3: sample_perm(dims.l3(), rng),
            e: (0..dims.ell).map(|_| rng.gen_range(0..=1u8)).collect(),
        }
    }

    pub fn identity(dims: &SternDims) -> Self {
        let bw = dims.y_block();
        Self {
            psis: (0..2 * dims.ell + 1)
                .map(|_| (0..bw as u32).collect())
                .collect(),
            eta2: (0..dims.l2() as u32).collect(),
            eta3: (0..dims.l3() as u32).collect(),
            e: vec![0; dims.ell],
        }
    }

    pub fn validate(&self, dims: &SternDims) -> bool {
        let bw = dims.y_block();
        self.psis.len() == 2 * dims.ell + 1
            && self.psis.iter().all(|p| is_perm(p, bw))
            && is_perm(&self.eta2, dims.l2())
            && is_perm(&self.eta3, dims.l3())
            && self.e.len() == dims.ell
            && self.e.iter().all(|&b| b <= 1)
    }

    /// Gather map: `output[j] = input[map[j]]`.
    pub fn index_map(&self, dims: &SternDims) -> Vec<u32> {
        let l = dims.l();
        let bw = dims.y_block();
        let mut map = vec![0u32; l];
        // Base block.
        for (p, &src) in self.psis[0].iter().enumerate() {
            map[p] = src;
        }
        // Paired blocks, swapped by the flip bits.
        for i in 0..dims.ell {
            for b in 0..2usize {
                let src_slot = b ^ (self.e[i] as usize);
                let out_off = dims.y_offset(1 + 2 * i + b);
                let in_off = dims.y_offset(1 + 2 * i + src_slot);
                let psi = &self.psis[1 + 2 * i + src_slot];
                for (p, &src) in psi.iter().enumerate() {
                    map[out_off + p] = (in_off + src as usize) as u32;
                }
            }
        }
        let off2 = dims.l1();
        for (p, &src) in self.eta2.iter().enumerate() {
            map[off2 + p] = (off2 + src as usize) as u32;
        }
        let off3 = off2 + dims.l2();
        for (p, &src) in self.eta3.iter().enumerate() {
            map[off3 + p] = (off3 + src as usize) as u32;
        }
        let off4 = off3 + dims.l3();
        for i in 0..dims.ell {
            let e = self.e[i] as usize;
            map[off4 + 2 * i] = (off4 + 2 * i + e) as u32;
            map[off4 + 2 * i + 1] = (off4 + 2 * i + (1 - e)) as u32;
        }
        debug_assert_eq!(bw * (2 * dims.ell + 1), off2);
        map
    }

    /// Canonical bytes (committed inside the first commitment and carried in
    /// responses).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        crate::encode::put_u32(&mut out, self.psis.len() as u32);
        for p in &self.psis {
            crate::encode::put_u32(&mut out, p.len() as u32);
            for &i in p {
                debug_assert!(i < 1 << 16);
                out.extend_from_slice(&(i as u16).to_le_bytes());
            }
        }
        for p in [&self.eta2, &self.eta3] {
            crate::encode::put_u32(&mut out, p.len() as u32);
            for &i in p {
                out.extend_from_slice(&(i as u16).to_le_bytes());
            }
        }
        crate::encode::put_u32(&mut out, self.e.len() as u32);
        out.extend_from_slice(&self.e);
        out
    }

    pub fn from_bytes(dims: &SternDims, bytes: &[u8]) -> Result<Self> {
        let mut cur = crate::encode::Cursor::new(bytes);
        let npsi = cur.u32()? as usize;
        if npsi != 2 * dims.ell + 1 {
            return Err(Error::Encoding("permutation block count".into()));
        }
        let read_perm = |cur: &mut crate::encode::Cursor<'_>| -> Result<Vec<u32>> {
            let len = cur.u32()? as usize;
            let mut p = Vec::with_capacity(len);
            for _ in 0..len {
                let b = cur.take(2)?;
                p.push(u16::from_le_bytes(b.try_into().unwrap()) as u32);
            }
            Ok(p)
        };
        let mut psis = Vec::with_capacity(npsi);
        for _ in 0..npsi {
            psis.push(read_perm(&mut cur)?);
        }
        let eta2 = read_perm(&mut cur)?;
        let eta3 = read_perm(&mut cur)?;
        let elen = cur.u32()? as usize;
        let e = cur.take(elen)?.to_vec();
        cur.expect_end()?;
        let out = Self {
            psis,
            eta2,
            eta3,
            e,
        };
        if !out.validate(dims) {
            return Err(Error::Encoding("invalid permutation element".into()));
        }
        Ok(out)
    }
}

/// Apply a gather map.
pub fn apply_map<T: Copy>(map: &[u32], input: &[T]) -> Vec<T> {
    map.iter().map(|&i| input[i as usize]).collect()
}

/// Uniform element of the structured witness set (used by the simulator).
pub fn sample_valid<R: Rng + ?Sized>(dims: &SternDims, rng: &mut R) -> Vec<i8> {
    let bw = dims.y_block();
    let balanced = |rng: &mut R, len: usize| {
        let t = len / 3;
        let mut v: Vec<i8> = std::iter::repeat_n(-1i8, t)
            .chain(std::iter::repeat_n(0i8, t))
            .chain(std::iter::repeat_n(1i8, t))
            .collect();
        v.shuffle(rng);
        v
    };
    let x: Vec<u8> = (0..dims.ell).map(|_| rng.gen_range(0..=1u8)).collect();
    let mut w = Vec::with_capacity(dims.l());
    w.extend(balanced(rng, bw));
    for &xi in &x {
        let blk = balanced(rng, bw);
        let zeros = vec![0i8; bw];
        if xi == 0 {
            w.extend(blk);
            w.extend(zeros);
        } else {
            w.extend(zeros);
            w.extend(blk);
        }
    }
    w.extend(balanced(rng, dims.l2()));
    w.extend(balanced(rng, dims.l3()));
    w.extend(enc2(&x).into_iter().map(|b| b as i8));
    w
}

/// `M * w` for a ternary witness, reduced mod q.
pub fn statement_apply(stmt: &SternStatement, w: &[i8]) -> Result<ZqVector> {
    let v = IntVector::new(w.iter().map(|&x| x as i64).collect());
    stmt.m_mat.mul_int_vector(&v)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    // The toy shape: ell=2, d=2, n=4, m=8, beta in [2,3] (p_beta=2), B=1.
    pub(crate) fn toy_dims() -> SternDims {
        SternDims::new(2, 2, 8, 4, 3, 1).unwrap()
    }

    #[test]
    fn toy_dimension_formulas() {
        let dims = toy_dims();
        assert_eq!(dims.p_beta, 2);
        assert_eq!(dims.p_b, 1);
        assert_eq!(dims.l1(), 240);
        assert_eq!(dims.l2(), 96);
        assert_eq!(dims.l3(), 42);
        assert_eq!(dims.l(), 382);
        assert_eq!(dims.rows(), 14);
    }

    pub(crate) struct ToyInstance {
        pub stmt: SternStatement,
        pub wit: SternWitness,
        pub dims: SternDims,
    }

    /// Honest toy instance without any trapdoor machinery: draw the public
    /// matrices uniformly, a bounded signature vector, honest noise, then
    /// define the syndrome as the product.
    pub(crate) fn toy_instance(seed: u64) -> ToyInstance {
        let dims = toy_dims();
        let q = crate::zq::Modulus::new(257).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (ell, d, m, n) = (dims.ell, dims.d, dims.m, dims.n);
        let a0 = ZqMatrix::uniform(q, n, m, &mut rng);
        let pairs: Vec<[ZqMatrix; 2]> = (0..ell + d)
            .map(|_| {
                [
                    ZqMatrix::uniform(q, n, m, &mut rng),
                    ZqMatrix::uniform(q, n, m, &mut rng),
                ]
            })
            .collect();
        let b_enc = ZqMatrix::uniform(q, n, m, &mut rng);
        let g = ZqMatrix::uniform(q, n, ell, &mut rng);
        let t = 2u64;
        let z = bin(t, d).unwrap();
        let id_bits = vec![1u8, 0];
        let v = IntVector::new(
            (0..(ell + d + 1) * m)
                .map(|_| rng.gen_range(-dims.beta..=dims.beta))
                .collect(),
        );
        // Syndrome from the signature relation.
        let mut a_id = a0.clone();
        for (i, &b) in id_bits.iter().enumerate() {
            a_id = a_id.hconcat(&pairs[i][b as usize]).unwrap();
        }
        for (j, &zb) in z.iter().enumerate() {
            a_id = a_id.hconcat(&pairs[ell + j][zb as usize]).unwrap();
        }
        let u = a_id.mul_int_vector(&v).unwrap();
        let pk = BonsaiPublicKey { a0, pairs, u };
        // Honest encryption of the identity.
        let s = IntVector::new((0..n).map(|_| rng.gen_range(-1i64..=1)).collect());
        let e1 = IntVector::new((0..m).map(|_| rng.gen_range(-1i64..=1)).collect());
        let e2 = IntVector::new((0..ell).map(|_| rng.gen_range(-1i64..=1)).collect());
        let noise = NoiseSample { s, e1, e2 };
        let ct = crate::ibe::ibe_encrypt(&b_enc, &g, &id_bits, &noise).unwrap();
        let stmt = build_statement(&dims, &pk, &b_enc, &g, &ct, t).unwrap();
        let wit = build_witness(&dims, &id_bits, &noise, &v).unwrap();
        ToyInstance { stmt, wit, dims }
    }

    #[test]
    fn honest_witness_satisfies_statement() {
        let inst = toy_instance(60);
        assert!(valid_check(&inst.dims, &inst.wit.w).unwrap());
        let got = statement_apply(&inst.stmt, &inst.wit.w).unwrap();
        assert_eq!(got, inst.stmt.u0);
    }

    #[test]
    fn changing_period_changes_only_period_columns() {
        let inst2 = toy_instance(61);
        // Rebuild at a different period against the same public data: the
        // statement differs, and only inside the period column range.
        let dims = inst2.dims.clone();
        let mut rng = ChaCha20Rng::seed_from_u64(61);
        let q = crate::zq::Modulus::new(257).unwrap();
        let (ell, d, m, n) = (dims.ell, dims.d, dims.m, dims.n);
        let a0 = ZqMatrix::uniform(q, n, m, &mut rng);
        let pairs: Vec<[ZqMatrix; 2]> = (0..ell + d)
            .map(|_| {
                [
                    ZqMatrix::uniform(q, n, m, &mut rng),
                    ZqMatrix::uniform(q, n, m, &mut rng),
                ]
            })
            .collect();
        let b_enc = ZqMatrix::uniform(q, n, m, &mut rng);
        let g = ZqMatrix::uniform(q, n, ell, &mut rng);
        let pk = BonsaiPublicKey {
            a0,
            pairs,
            u: ZqVector::zero(q, n),
        };
        let ct = IdCiphertext {
            c1: ZqVector::zero(q, m),
            c2: ZqVector::zero(q, ell),
        };
        let s1 = build_statement(&dims, &pk, &b_enc, &g, &ct, 1).unwrap();
        let s2 = build_statement(&dims, &pk, &b_enc, &g, &ct, 2).unwrap();
        assert_ne!(s1.m_digest, s2.m_digest);
        for r in 0..dims.rows() {
            for c in 0..dims.l() {
                let in_period_cols = c >= dims.l1() && c < dims.l1() + dims.l2();
                if !in_period_cols {
                    assert_eq!(s1.m_mat.get(r, c), s2.m_mat.get(r, c), "r={r} c={c}");
                }
            }
        }
    }

    #[test]
    fn flipped_identity_stays_valid_but_misses_syndrome() {
        let inst = toy_instance(62);
        // Move the on-blocks to the complementary slots and flip the tail:
        // still structurally valid, but the linear statement breaks.
        let dims = &inst.dims;
        let bw = dims.y_block();
        let mut w = inst.wit.w.clone();
        for i in 0..dims.ell {
            let o0 = dims.y_offset(1 + 2 * i);
            let o1 = dims.y_offset(1 + 2 * i + 1);
            for p in 0..bw {
                w.swap(o0 + p, o1 + p);
            }
        }
        let off4 = dims.l1() + dims.l2() + dims.l3();
        for i in 0..dims.ell {
            w.swap(off4 + 2 * i, off4 + 2 * i + 1);
        }
        assert!(valid_check(dims, &w).unwrap());
        let got = statement_apply(&inst.stmt, &w).unwrap();
        assert_ne!(got, inst.stmt.u0);
    }

    #[test]
    fn all_zero_witness_is_invalid() {
        let dims = toy_dims();
        let w = vec![0i8; dims.l()];
        assert!(!valid_check(&dims, &w).unwrap());
        assert!(valid_check(&dims, &w[1..]).is_err());
    }

    #[test]
    fn gamma_identity_fixes_everything() {
        let inst = toy_instance(63);
        let id = PermutationElement::identity(&inst.dims);
        let map = id.index_map(&inst.dims);
        let out = apply_map(&map, &inst.wit.w);
        assert_eq!(out, inst.wit.w);
    }

    #[test]
    fn gamma_preserves_validity_both_ways() {
        let inst = toy_instance(64);
        let mut rng = ChaCha20Rng::seed_from_u64(65);
        for _ in 0..100 {
            let phi = PermutationElement::sample(&inst.dims, &mut rng);
            assert!(phi.validate(&inst.dims));
            let map = phi.index_map(&inst.dims);
            let out = apply_map(&map, &inst.wit.w);
            assert!(valid_check(&inst.dims, &out).unwrap());
        }
        // And random non-witness vectors stay invalid.
        let phi = PermutationElement::sample(&inst.dims, &mut rng);
        let map = phi.index_map(&inst.dims);
        let zeros = vec![0i8; inst.dims.l()];
        assert!(!valid_check(&inst.dims, &apply_map(&map, &zeros)).unwrap());
    }

    #[test]
    fn gamma_is_linear_mod_q() {
        let inst = toy_instance(66);
        let mut rng = ChaCha20Rng::seed_from_u64(67);
        let q = 257u64;
        let l = inst.dims.l();
        for _ in 0..100 {
            let phi = PermutationElement::sample(&inst.dims, &mut rng);
            let map = phi.index_map(&inst.dims);
            let a: Vec<u64> = (0..l).map(|_| rng.gen_range(0..q)).collect();
            let b: Vec<u64> = (0..l).map(|_| rng.gen_range(0..q)).collect();
            let ab: Vec<u64> = a.iter().zip(&b).map(|(&x, &y)| (x + y) % q).collect();
            let ga = apply_map(&map, &a);
            let gb = apply_map(&map, &b);
            let gab = apply_map(&map, &ab);
            let sum: Vec<u64> = ga.iter().zip(&gb).map(|(&x, &y)| (x + y) % q).collect();
            assert_eq!(gab, sum);
        }
    }

    #[test]
    fn enc2_flip_identity_matches_pair_swap() {
        // Pair-swap action on the tail equals encoding the flipped bits.
        let dims = toy_dims();
        let mut rng = ChaCha20Rng::seed_from_u64(68);
        for _ in 0..50 {
            let zbits: Vec<u8> = (0..dims.ell).map(|_| rng.gen_range(0..=1u8)).collect();
            let mut phi = PermutationElement::identity(&dims);
            phi.e = (0..dims.ell).map(|_| rng.gen_range(0..=1u8)).collect();
            let map = phi.index_map(&dims);
            let mut w = vec![0i8; dims.l()];
            let off4 = dims.l1() + dims.l2() + dims.l3();
            for (i, &z) in zbits.iter().enumerate() {
                w[off4 + 2 * i] = z as i8;
                w[off4 + 2 * i + 1] = 1 - z as i8;
            }
            let out = apply_map(&map, &w);
            let flipped: Vec<u8> = zbits.iter().zip(&phi.e).map(|(&z, &e)| z ^ e).collect();
            let expect = enc2(&flipped);
            for (i, &x) in expect.iter().enumerate() {
                assert_eq!(out[off4 + i], x as i8);
            }
        }
    }

    #[test]
    fn sampled_valid_vectors_check_out() {
        let dims = toy_dims();
        let mut rng = ChaCha20Rng::seed_from_u64(69);
        for _ in 0..50 {
            let w = sample_valid(&dims, &mut rng);
            assert!(valid_check(&dims, &w).unwrap());
        }
    }

    #[test]
    fn permutation_bytes_roundtrip() {
        let dims = toy_dims();
        let mut rng = ChaCha20Rng::seed_from_u64(70);
        let phi = PermutationElement::sample(&dims, &mut rng);
        let bytes = phi.to_bytes();
        let back = PermutationElement::from_bytes(&dims, &bytes).unwrap();
        assert_eq!(phi, back);
        // Corrupt one index beyond range: rejected.
        let mut bad = bytes.clone();
        bad[8] = 0xff;
        bad[9] = 0xff;
        assert!(PermutationElement::from_bytes(&dims, &bad).is_err());
    }
}
