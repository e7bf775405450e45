//! Lattice trapdoor primitives: trapdoor generation, preimage sampling,
//! basis extension, and basis randomization.
//!
//! Trapdoor generation uses the gadget construction: `A = [Abar | G - Abar R]`
//! for a random ternary `R`, with the gadget relation converted into an
//! explicit short basis of the kernel lattice. Preimage sampling is the
//! randomized nearest-plane walk over the Gram-Schmidt frame of the basis.
//! Basis extension appends columns and keeps the Gram-Schmidt norm exactly.
//! Basis randomization size-reduces and then stirs the columns with
//! unit-triangular ternary sweeps, a determinant-one transform, so the
//! lattice never changes.

use crate::error::{Error, Result};
use crate::gauss::KleinSampler;
use crate::mat::{gso, size_reduce, size_reduce_with_gso, Gso, IntMatrix, IntVector};
use crate::zq::{Modulus, Solver, ZqMatrix, ZqVector};
use rand::Rng;

/// A matrix over Z_q with a short basis of its kernel lattice.
#[derive(Debug, Clone)]
pub struct TrapdoorPair {
    pub matrix: ZqMatrix,
    pub basis: IntMatrix,
}

/// Fixed 62-bit primes for exact-enough rank certification: full rank modulo
/// any prime certifies full rank over the rationals.
const RANK_PRIMES: [u64; 2] = [(1 << 61) - 1, 4611686018427387847];

/// Gadget ladder length for modulus q.
pub fn gadget_len(q: u64) -> usize {
    (64 - (q - 1).leading_zeros()) as usize
}

/// Short basis of the one-row gadget lattice `{ x : sum 2^i x_i = 0 mod q }`:
/// bidiagonal (2, -1) columns plus the binary digits of q.
fn gadget_block_basis(q: u64) -> IntMatrix {
    let k = gadget_len(q);
    let mut s = IntMatrix::zero(k, k);
    for j in 0..k - 1 {
        s.set(j, j, 2);
        s.set(j + 1, j, -1);
    }
    for i in 0..k {
        s.set(i, k - 1, ((q >> i) & 1) as i64);
    }
    s
}

/// Binary digit decomposition of each column of `m`: `G * bits(m) = m`
/// exactly over the integers.
fn bit_decompose(m: &ZqMatrix) -> IntMatrix {
    let k = gadget_len(m.q.get());
    let mut w = IntMatrix::zero(m.rows() * k, m.cols());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let v = m.get(r, c);
            for t in 0..k {
                w.set(r * k + t, c, ((v >> t) & 1) as i64);
            }
        }
    }
    w
}

/// Trapdoor generation. Requires `m >= 2 n ceil(log2 q)`.
pub fn trap_gen<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    q: Modulus,
    rng: &mut R,
) -> Result<TrapdoorPair> {
    let k = gadget_len(q.get());
    let w = n * k;
    if m < 2 * n * k {
        return Err(Error::ParamViolation(format!(
            "m = {m} below the gadget threshold 2 n ceil(log2 q) = {}",
            2 * n * k
        )));
    }
    let mbar = m - w;

    let abar = ZqMatrix::uniform(q, n, mbar, rng);
    // Ternary mixing matrix.
    let mut r_mix = IntMatrix::zero(mbar, w);
    for i in 0..mbar {
        for j in 0..w {
            r_mix.set(i, j, rng.gen_range(-1i64..=1));
        }
    }

    // Gadget G = I_n tensor (1, 2, ..., 2^{k-1}).
    let mut g = ZqMatrix::zero(q, n, w);
    for i in 0..n {
        for t in 0..k {
            g.set(i, i * k + t, (1u64 << t) % q.get());
        }
    }

    // Second block: (G - Abar R) mod q.
    let ar = abar.mul_int_matrix(&r_mix)?;
    let mut second = ZqMatrix::zero(q, n, w);
    for r in 0..n {
        for c in 0..w {
            let v = (g.get(r, c) + q.get() - ar.get(r, c)) % q.get();
            second.set(r, c, v);
        }
    }
    let a = abar.hconcat(&second)?;

    // Kernel basis: with W = bits(Abar) and S_G the blocked gadget basis,
    //   S = [[ I - R W , R S_G ],
    //        [    -W   ,  S_G  ]]
    // satisfies A S = 0 mod q and det S = q^n.
    let wbits = bit_decompose(&abar);
    let sg_block = gadget_block_basis(q.get());
    let mut sg = IntMatrix::zero(w, w);
    for i in 0..n {
        for r in 0..k {
            for c in 0..k {
                sg.set(i * k + r, i * k + c, sg_block.get(r, c));
            }
        }
    }

    // I - R W  (mbar x mbar) and R S_G (mbar x w).
    let mut top_left = IntMatrix::zero(mbar, mbar);
    for r in 0..mbar {
        for c in 0..mbar {
            let mut acc: i128 = 0;
            for t in 0..w {
                acc += r_mix.get(r, t) as i128 * wbits.get(t, c) as i128;
            }
            let v = if r == c { 1 - acc } else { -acc };
            top_left.set(r, c, v as i64);
        }
    }
    let mut top_right = IntMatrix::zero(mbar, w);
    for r in 0..mbar {
        for c in 0..w {
            let mut acc: i128 = 0;
            for t in 0..w {
                acc += r_mix.get(r, t) as i128 * sg.get(t, c) as i128;
            }
            top_right.set(r, c, acc as i64);
        }
    }
    let mut neg_w = IntMatrix::zero(w, mbar);
    for r in 0..w {
        for c in 0..mbar {
            neg_w.set(r, c, -wbits.get(r, c));
        }
    }
    let mut basis = IntMatrix::block2x2(&top_left, &top_right, &neg_w, &sg)?;
    size_reduce(&mut basis)?;

    let pair = TrapdoorPair { matrix: a, basis };
    verify_kernel_basis(&pair.matrix, &pair.basis)?;
    Ok(pair)
}

/// Exact checks every emitted basis must satisfy: `A B = 0 mod q` and full
/// rank (certified by full rank modulo a large prime).
pub fn verify_kernel_basis(a: &ZqMatrix, basis: &IntMatrix) -> Result<()> {
    if basis.rows() != a.cols() || basis.cols() != basis.rows() {
        return Err(Error::DimensionMismatch("kernel basis shape".into()));
    }
    let prod = a.mul_int_matrix(basis)?;
    if !prod.is_zero() {
        return Err(Error::CorruptKey(
            "basis columns leave the kernel lattice".into(),
        ));
    }
    if !full_rank_mod_primes(basis) {
        return Err(Error::RankDeficient);
    }
    Ok(())
}

fn full_rank_mod_primes(m: &IntMatrix) -> bool {
    RANK_PRIMES.iter().any(|&p| full_rank_mod(m, p))
}

#[allow(clippy::needless_range_loop)]
fn full_rank_mod(m: &IntMatrix, p: u64) -> bool {
    let n = m.rows();
    if m.cols() != n {
        return false;
    }
    let mut a: Vec<Vec<u64>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let v = m.get(r, c) % p as i64;
                    if v < 0 {
                        (v + p as i64) as u64
                    } else {
                        v as u64
                    }
                })
                .collect()
        })
        .collect();
    let mulp = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    let powp = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulp(acc, b);
            }
            b = mulp(b, b);
            e >>= 1;
        }
        acc
    };
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| a[r][col] != 0) else {
            return false;
        };
        a.swap(col, piv);
        let inv = powp(a[col][col], p - 2);
        for c in col..n {
            a[col][c] = mulp(a[col][c], inv);
        }
        for r in col + 1..n {
            if a[r][col] != 0 {
                let f = a[r][col];
                for c in col..n {
                    let sub = mulp(f, a[col][c]);
                    a[r][c] = (a[r][c] + p - sub) % p;
                }
            }
        }
    }
    true
}

/// Extend a kernel basis of `a` to one of `a_prime = [a | appended]`.
/// Only right-appended columns are supported; the Gram-Schmidt norm of the
/// output equals that of the input exactly.
pub fn ext_basis(basis: &IntMatrix, a: &ZqMatrix, a_prime: &ZqMatrix) -> Result<IntMatrix> {
    let m = a.cols();
    let m2 = a_prime.cols();
    if a_prime.rows() != a.rows() || m2 < m {
        return Err(Error::NotAPrefix);
    }
    for r in 0..a.rows() {
        for c in 0..m {
            if a.get(r, c) != a_prime.get(r, c) {
                return Err(Error::NotAPrefix);
            }
        }
    }
    if basis.rows() != m || basis.cols() != m {
        return Err(Error::DimensionMismatch(
            "basis does not match prefix".into(),
        ));
    }
    if m2 == m {
        return Ok(basis.clone());
    }
    let appended = a_prime.column_slice(m, m2)?;
    // Solve A W = -appended (mod q); entries land in [0, q).
    let solver = Solver::new(a);
    let mut neg = ZqMatrix::zero(a.q, appended.rows(), appended.cols());
    for r in 0..appended.rows() {
        for c in 0..appended.cols() {
            let v = appended.get(r, c);
            neg.set(r, c, if v == 0 { 0 } else { a.q.get() - v });
        }
    }
    let w = solver.solve_matrix(&neg)?;
    let ext = m2 - m;
    let s_prime = IntMatrix::block2x2(
        basis,
        &w,
        &IntMatrix::zero(ext, m),
        &IntMatrix::identity(ext),
    )?;
    verify_kernel_basis(a_prime, &s_prime)?;
    Ok(s_prime)
}

/// Preimage sampling: a vector `v` with `A v = u mod q`, drawn from the
/// lattice Gaussian of parameter `s` over the solution coset. The syndrome
/// equation is re-verified exactly before returning.
pub fn sample_d<R: Rng + ?Sized>(
    a: &ZqMatrix,
    basis: &IntMatrix,
    u: &ZqVector,
    s: f64,
    slack: f64,
    rng: &mut R,
) -> Result<IntVector> {
    let sampler = KleinSampler::new(basis.clone(), s, slack)?;
    sample_d_with(&sampler, a, u, rng)
}

/// Preimage sampling against a prepared sampler (callers doing many draws
/// from one basis reuse the Gram-Schmidt precomputation).
pub fn sample_d_with<R: Rng + ?Sized>(
    sampler: &KleinSampler,
    a: &ZqMatrix,
    u: &ZqVector,
    rng: &mut R,
) -> Result<IntVector> {
    let solver = Solver::new(a);
    sample_d_with_solver(sampler, &solver, a, u, rng)
}

pub fn sample_d_with_solver<R: Rng + ?Sized>(
    sampler: &KleinSampler,
    solver: &Solver,
    a: &ZqMatrix,
    u: &ZqVector,
    rng: &mut R,
) -> Result<IntVector> {
    let c = solver.solve(u)?;
    let center: Vec<i64> = c.data.iter().map(|&x| -x).collect();
    let (_, y) = sampler.sample_near(&center, rng)?;
    let v = IntVector::new(c.data.iter().zip(&y.data).map(|(&a, &b)| a + b).collect());
    let check = a.mul_int_vector(&v)?;
    if &check != u {
        return Err(Error::CorruptKey("preimage syndrome check failed".into()));
    }
    Ok(v)
}

/// Basis randomization: size reduction followed by unit-triangular ternary
/// mixing sweeps (descending then ascending), so the transform has
/// determinant one and the lattice is unchanged exactly, with every column
/// norm kept at or below `s * sqrt(m)`.
pub fn rand_basis<R: Rng + ?Sized>(
    basis: &IntMatrix,
    a: &ZqMatrix,
    s: f64,
    slack: f64,
    rng: &mut R,
) -> Result<IntMatrix> {
    let g = gso(basis)?;
    rand_basis_with_gso(basis, &g, a, s, slack, rng)
}

/// Randomization against a precomputed orthogonalization of `basis`.
pub fn rand_basis_with_gso<R: Rng + ?Sized>(
    basis: &IntMatrix,
    g: &Gso,
    a: &ZqMatrix,
    s: f64,
    slack: f64,
    rng: &mut R,
) -> Result<IntMatrix> {
    let gs = g.max_norm();
    if s < gs * slack {
        return Err(Error::QualityTooLow {
            s,
            threshold: gs * slack,
        });
    }
    let m = basis.cols();
    let bound = s * (basis.rows() as f64).sqrt();
    let mut out = basis.clone();
    size_reduce_with_gso(&mut out, g, 1)?;

    // Descending sweep: col_j += c * col_i with i > j.
    for j in (0..m.saturating_sub(1)).rev() {
        mix_column(&mut out, j, j + 1..m, bound, rng);
    }
    // Ascending sweep: col_j += c * col_i with i < j.
    for j in 1..m {
        mix_column(&mut out, j, 0..j, bound, rng);
    }
    verify_kernel_basis(a, &out)?;
    Ok(out)
}

/// Ternary additions attempted per column during mixing.
const MIX_TERMS: usize = 12;

/// Add a few ternary multiples of donor columns to column `j`, keeping its
/// norm under `bound` (attempts that would overshoot are dropped).
fn mix_column<R: Rng + ?Sized>(
    basis: &mut IntMatrix,
    j: usize,
    donors: std::ops::Range<usize>,
    bound: f64,
    rng: &mut R,
) {
    if donors.is_empty() {
        return;
    }
    let rows = basis.rows();
    for _ in 0..MIX_TERMS {
        let i = rng.gen_range(donors.clone());
        let c = if rng.gen_range(0..2) == 0 { 1i64 } else { -1 };
        let cand: Vec<i64> = (0..rows)
            .map(|r| basis.get(r, j) + c * basis.get(r, i))
            .collect();
        let norm = cand
            .iter()
            .map(|&x| (x as f64) * (x as f64))
            .sum::<f64>()
            .sqrt();
        if norm <= bound {
            for (r, &v) in cand.iter().enumerate() {
                basis.set(r, j, v);
            }
        }
    }
}

/// A trapdoor source prepared for repeated delegations: the kernel basis
/// together with its orthogonalization, reused across every extension
/// sampled from it (the extension's own orthogonalization is assembled
/// analytically).
pub struct DelegationSource {
    pub matrix: ZqMatrix,
    pub basis: IntMatrix,
    gso: Gso,
}

impl DelegationSource {
    pub fn new(matrix: ZqMatrix, basis: IntMatrix) -> Result<Self> {
        if basis.rows() != matrix.cols() {
            return Err(Error::DimensionMismatch("source basis vs matrix".into()));
        }
        let g = gso(&basis)?;
        Ok(Self {
            matrix,
            basis,
            gso: g,
        })
    }

    pub fn gs_norm(&self) -> f64 {
        self.gso.max_norm()
    }

    /// Preimage of `u` under `a_prime` (which must extend the source matrix
    /// on the right), sampled through the extension of the source basis.
    pub fn sample_preimage<R: Rng + ?Sized>(
        &self,
        a_prime: &ZqMatrix,
        u: &ZqVector,
        s: f64,
        slack: f64,
        rng: &mut R,
    ) -> Result<IntVector> {
        let ext = ext_basis(&self.basis, &self.matrix, a_prime)?;
        let sampler = KleinSampler::for_extension(ext, &self.gso, s, slack)?;
        let solver = Solver::new(a_prime);
        sample_d_with_solver(&sampler, &solver, a_prime, u, rng)
    }

    /// Fresh randomized kernel basis for an extension of the source matrix.
    pub fn delegate_basis<R: Rng + ?Sized>(
        &self,
        a_prime: &ZqMatrix,
        s: f64,
        slack: f64,
        rng: &mut R,
    ) -> Result<IntMatrix> {
        let ext = ext_basis(&self.basis, &self.matrix, a_prime)?;
        let g = self.gso.extend_for_identity_tail(ext.rows());
        rand_basis_with_gso(&ext, &g, a_prime, s, slack, rng)
    }
}
