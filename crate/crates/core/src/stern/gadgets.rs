//! Decomposition and extension gadgets that turn bounded-norm witnesses
//! into fixed-symbol-count ternary vectors: the halving integer ladder,
//! per-coordinate signed decomposition, the three-symbol balancing
//! extension, and the bit/complement encoding.

use crate::error::{Error, Result};
use crate::mat::{IntMatrix, IntVector};

/// The halving ladder for a bound `B`: `p = floor(log2 B) + 1` entries
/// `B_j = floor((B + 2^{j-1}) / 2^j)` summing to exactly `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionSpec {
    pub bound: i64,
    pub ladder: Vec<i64>,
}

impl DecompositionSpec {
    pub fn new(bound: i64) -> Result<Self> {
        if bound < 1 {
            return Err(Error::ParamViolation(format!(
                "decomposition bound {bound} < 1"
            )));
        }
        let p = (63 - (bound as u64).leading_zeros()) as usize + 1;
        let ladder: Vec<i64> = (1..=p).map(|j| (bound + (1i64 << (j - 1))) >> j).collect();
        debug_assert_eq!(ladder.iter().sum::<i64>(), bound);
        Ok(Self { bound, ladder })
    }

    pub fn width(&self) -> usize {
        self.ladder.len()
    }
}

/// Greedy bit decomposition of `v` in `[0, B]` against the ladder:
/// `sum B_j bit_j = v`.
pub fn idec(v: i64, spec: &DecompositionSpec) -> Result<Vec<u8>> {
    if v < 0 || v > spec.bound {
        return Err(Error::OutOfRange(format!(
            "idec input {v} outside [0, {}]",
            spec.bound
        )));
    }
    let mut rem = v;
    let bits = spec
        .ladder
        .iter()
        .map(|&b| {
            if rem >= b {
                rem -= b;
                1
            } else {
                0
            }
        })
        .collect();
    debug_assert_eq!(rem, 0);
    Ok(bits)
}

/// Per-coordinate signed decomposition of a vector with `|w_i| <= B` into a
/// ternary vector of length `len(w) * p_B`.
pub fn vdec(w: &[i64], spec: &DecompositionSpec) -> Result<Vec<i8>> {
    let mut out = Vec::with_capacity(w.len() * spec.width());
    for &x in w {
        if x.abs() > spec.bound {
            return Err(Error::OutOfRange(format!(
                "vdec entry {x} exceeds bound {}",
                spec.bound
            )));
        }
        let sign = x.signum() as i8;
        for b in idec(x.abs(), spec)? {
            out.push(sign * b as i8);
        }
    }
    Ok(out)
}

/// Extend a ternary vector of length `m` to one of length `3m` with exactly
/// `m` of each symbol, by appending the missing counts in the order
/// (-1)s, 0s, 1s.
pub fn ext3(v: &[i8]) -> Result<Vec<i8>> {
    let m = v.len();
    let mut counts = [0usize; 3]; // -1, 0, 1
    for &x in v {
        match x {
            -1 => counts[0] += 1,
            0 => counts[1] += 1,
            1 => counts[2] += 1,
            _ => return Err(Error::OutOfRange(format!("non-ternary entry {x}"))),
        }
    }
    let mut out = Vec::with_capacity(3 * m);
    out.extend_from_slice(v);
    out.extend(std::iter::repeat_n(-1i8, m - counts[0]));
    out.extend(std::iter::repeat_n(0i8, m - counts[1]));
    out.extend(std::iter::repeat_n(1i8, m - counts[2]));
    Ok(out)
}

/// Does `v` have exactly `m` of each symbol in `{-1, 0, 1}` (with
/// `len(v) = 3m`)?
pub fn balanced_ternary_counts(v: &[i8]) -> bool {
    if !v.len().is_multiple_of(3) {
        return false;
    }
    let m = v.len() / 3;
    let mut counts = [0usize; 3];
    for &x in v {
        match x {
            -1 => counts[0] += 1,
            0 => counts[1] += 1,
            1 => counts[2] += 1,
            _ => return false,
        }
    }
    counts == [m, m, m]
}

/// Interleave each bit with its complement.
pub fn enc2(bits: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 * bits.len());
    for &b in bits {
        out.push(b);
        out.push(1 - b);
    }
    out
}

/// The ladder reconstruction matrix `H` (block diagonal rows of the ladder)
/// and its zero-padded extension `H_hat = [H | 0]` satisfying
/// `H_hat * ext3(vdec(w)) = w`.
pub fn gadget_matrices(m: usize, spec: &DecompositionSpec) -> (IntMatrix, IntMatrix) {
    let p = spec.width();
    let mut h = IntMatrix::zero(m, m * p);
    for r in 0..m {
        for (j, &b) in spec.ladder.iter().enumerate() {
            h.set(r, r * p + j, b);
        }
    }
    let mut h_hat = IntMatrix::zero(m, 3 * m * p);
    for r in 0..m {
        for c in 0..m * p {
            h_hat.set(r, c, h.get(r, c));
        }
    }
    (h, h_hat)
}

/// Reconstruct `w` from its extended decomposition without materializing the
/// gadget matrix.
pub fn reconstruct(ext: &[i8], m: usize, spec: &DecompositionSpec) -> Result<IntVector> {
    let p = spec.width();
    if ext.len() != 3 * m * p {
        return Err(Error::DimensionMismatch("reconstruct input length".into()));
    }
    let mut out = Vec::with_capacity(m);
    for r in 0..m {
        let mut acc: i64 = 0;
        for (j, &b) in spec.ladder.iter().enumerate() {
            acc += b * ext[r * p + j] as i64;
        }
        out.push(acc);
    }
    Ok(IntVector::new(out))
}
