//! Exact arithmetic modulo q: matrices, vectors, and the small amount of
//! mod-q linear algebra the scheme needs (row reduction, particular
//! solutions, free-variable solution sampling).
//!
//! All entries are kept reduced to `[0, q)`. Dot products accumulate in
//! `u128` so no intermediate ever wraps for any desk-scale modulus
//! (`q < 2^31`).

use crate::error::{Error, Result};
use crate::mat::{IntMatrix, IntVector};
use rand::Rng;

/// Modulus of the ambient ring. Odd so that `floor(q/2)` rounding in the
/// identity-escrow decryption has an unambiguous midpoint, prime so mod-q
/// elimination can invert pivots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Modulus {
    q: u64,
}

impl Modulus {
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::ParamViolation(format!("modulus {q} < 2")));
        }
        if q.is_multiple_of(2) {
            return Err(Error::ParamViolation(format!("modulus {q} is even")));
        }
        if q >= 1 << 31 {
            return Err(Error::ParamViolation(format!(
                "modulus {q} exceeds the 2^31 headroom bound"
            )));
        }
        if !is_prime(q) {
            return Err(Error::ParamViolation(format!("modulus {q} is not prime")));
        }
        Ok(Self { q })
    }

    #[inline]
    pub fn get(&self) -> u64 {
        self.q
    }

    /// Reduce a signed integer into `[0, q)`.
    #[inline]
    pub fn reduce_i64(&self, x: i64) -> u64 {
        let q = self.q as i64;
        let r = x % q;
        if r < 0 {
            (r + q) as u64
        } else {
            r as u64
        }
    }

    /// Centered representative in `(-q/2, q/2]`.
    #[inline]
    pub fn center(&self, x: u64) -> i64 {
        debug_assert!(x < self.q);
        if x > self.q / 2 {
            x as i64 - self.q as i64
        } else {
            x as i64
        }
    }

    /// Number of bytes needed for one canonical little-endian entry.
    pub fn entry_width(&self) -> usize {
        let bits = 64 - self.q.leading_zeros() as usize;
        bits.div_ceil(8)
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.q && b < self.q);
        // q < 2^31, so the product fits u64.
        a * b % self.q
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::OutOfRange("inverse of 0 mod q".into()));
        }
        // Fermat, q prime.
        Ok(pow_mod(a, self.q - 2, self.q))
    }
}

fn pow_mod(mut base: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1u64;
    base %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        e >>= 1;
    }
    acc
}

/// Trial division is plenty at desk scale (q < 2^31).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Column vector over Z_q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZqVector {
    pub q: Modulus,
    pub data: Vec<u64>,
}

impl ZqVector {
    pub fn zero(q: Modulus, len: usize) -> Self {
        Self {
            q,
            data: vec![0; len],
        }
    }

    pub fn from_u64(q: Modulus, data: Vec<u64>) -> Self {
        debug_assert!(data.iter().all(|&x| x < q.get()));
        Self { q, data }
    }

    pub fn from_int(q: Modulus, v: &IntVector) -> Self {
        Self {
            q,
            data: v.data.iter().map(|&x| q.reduce_i64(x)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() || self.q != other.q {
            return Err(Error::DimensionMismatch("vector add".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.q.add(a, b))
            .collect();
        Ok(Self { q: self.q, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() || self.q != other.q {
            return Err(Error::DimensionMismatch("vector sub".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.q.sub(a, b))
            .collect();
        Ok(Self { q: self.q, data })
    }

    /// Concatenation (syndromes stack into one longer column).
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::DimensionMismatch("vector concat".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self { q: self.q, data })
    }

    /// Centered lift to a signed integer vector.
    pub fn center(&self) -> IntVector {
        IntVector::new(self.data.iter().map(|&x| self.q.center(x)).collect())
    }
}

/// Row-major matrix over Z_q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZqMatrix {
    pub q: Modulus,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ZqMatrix {
    pub fn zero(q: Modulus, rows: usize, cols: usize) -> Self {
        Self {
            q,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(q: Modulus, n: usize) -> Self {
        let mut m = Self::zero(q, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(q: Modulus, rows_in: &[Vec<u64>]) -> Result<Self> {
        let rows = rows_in.len();
        let cols = rows_in.first().map_or(0, |r| r.len());
        if rows_in.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for r in rows_in {
            for &x in r {
                data.push(x % q.get());
            }
        }
        Ok(Self {
            q,
            rows,
            cols,
            data,
        })
    }

    /// Entries i.i.d. uniform on `[0, q)` from the supplied RNG stream.
    pub fn uniform<R: Rng + ?Sized>(q: Modulus, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols)
            .map(|_| rng.gen_range(0..q.get()))
            .collect();
        Self {
            q,
            rows,
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        debug_assert!(v < self.q.get());
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> ZqVector {
        ZqVector::from_u64(self.q, (0..self.rows).map(|r| self.get(r, c)).collect())
    }

    /// `[self | other]`.
    pub fn hconcat(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.q != other.q {
            return Err(Error::DimensionMismatch("hconcat".into()));
        }
        let mut out = Self::zero(self.q, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            out.data[r * out.cols..r * out.cols + self.cols].copy_from_slice(self.row(r));
            out.data[r * out.cols + self.cols..(r + 1) * out.cols].copy_from_slice(other.row(r));
        }
        Ok(out)
    }

    /// Columns `[lo, hi)` as a new matrix.
    pub fn column_slice(&self, lo: usize, hi: usize) -> Result<Self> {
        if lo > hi || hi > self.cols {
            return Err(Error::DimensionMismatch("column slice".into()));
        }
        let mut out = Self::zero(self.q, self.rows, hi - lo);
        for r in 0..self.rows {
            out.data[r * out.cols..(r + 1) * out.cols]
                .copy_from_slice(&self.data[r * self.cols + lo..r * self.cols + hi]);
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.q, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    /// Exact product with a signed integer vector, reduced mod q.
    pub fn mul_int_vector(&self, v: &IntVector) -> Result<ZqVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "mat {}x{} * vec {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let q = self.q.get();
        let reduced: Vec<u64> = v.data.iter().map(|&x| self.q.reduce_i64(x)).collect();
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let row = self.row(r);
            let mut acc: u128 = 0;
            for (a, b) in row.iter().zip(&reduced) {
                acc += *a as u128 * *b as u128;
            }
            out.push((acc % q as u128) as u64);
        }
        Ok(ZqVector::from_u64(self.q, out))
    }

    pub fn mul_zq_vector(&self, v: &ZqVector) -> Result<ZqVector> {
        if v.len() != self.cols || v.q != self.q {
            return Err(Error::DimensionMismatch("mat * zq vec".into()));
        }
        let q = self.q.get();
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let row = self.row(r);
            let mut acc: u128 = 0;
            for (a, b) in row.iter().zip(&v.data) {
                acc += *a as u128 * *b as u128;
            }
            out.push((acc % q as u128) as u64);
        }
        Ok(ZqVector::from_u64(self.q, out))
    }

    /// Exact product with a signed integer matrix, reduced mod q.
    pub fn mul_int_matrix(&self, m: &IntMatrix) -> Result<ZqMatrix> {
        if m.rows() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "mat {}x{} * mat {}x{}",
                self.rows,
                self.cols,
                m.rows(),
                m.cols()
            )));
        }
        let q = self.q.get();
        let mut out = Self::zero(self.q, self.rows, m.cols());
        // Reduce the integer matrix once up front.
        let mut red = vec![0u64; m.rows() * m.cols()];
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                red[r * m.cols() + c] = self.q.reduce_i64(m.get(r, c));
            }
        }
        for r in 0..self.rows {
            let row = self.row(r);
            for c in 0..m.cols() {
                let mut acc: u128 = 0;
                for k in 0..self.cols {
                    acc += row[k] as u128 * red[k * m.cols() + c] as u128;
                }
                out.set(r, c, (acc % q as u128) as u64);
            }
        }
        Ok(out)
    }

    pub fn mul_zq_matrix(&self, m: &ZqMatrix) -> Result<ZqMatrix> {
        if m.rows != self.cols || m.q != self.q {
            return Err(Error::DimensionMismatch("mat * mat".into()));
        }
        let q = self.q.get();
        let mut out = Self::zero(self.q, self.rows, m.cols);
        for r in 0..self.rows {
            let row = self.row(r);
            for c in 0..m.cols {
                let mut acc: u128 = 0;
                for (k, &rv) in row.iter().enumerate() {
                    acc += rv as u128 * m.get(k, c) as u128;
                }
                out.set(r, c, (acc % q as u128) as u64);
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Scale every entry by `c`.
    pub fn scale(&self, c: u64) -> Self {
        let c = c % self.q.get();
        let data = self.data.iter().map(|&x| self.q.mul(x, c)).collect();
        Self {
            q: self.q,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }
}

/// Row echelon form of `a` together with pivot bookkeeping; shared by rank,
/// particular solutions, and free-variable solution sampling.
pub struct Echelon {
    pub mat: ZqMatrix,
    /// pivot column for each echelon row
    pub pivots: Vec<usize>,
}

#[allow(clippy::needless_range_loop)]
pub fn echelon(a: &ZqMatrix) -> Echelon {
    let q = a.q;
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols() {
        if row == m.rows() {
            break;
        }
        let Some(p) = (row..m.rows()).find(|&r| m.get(r, col) != 0) else {
            continue;
        };
        if p != row {
            for c in 0..m.cols() {
                let tmp = m.get(row, c);
                m.set(row, c, m.get(p, c));
                m.set(p, c, tmp);
            }
        }
        let inv = q.inv(m.get(row, col)).expect("pivot nonzero");
        for c in col..m.cols() {
            m.set(row, c, q.mul(m.get(row, c), inv));
        }
        for r in 0..m.rows() {
            if r != row && m.get(r, col) != 0 {
                let f = m.get(r, col);
                for c in col..m.cols() {
                    let v = q.sub(m.get(r, c), q.mul(f, m.get(row, c)));
                    m.set(r, c, v);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    Echelon { mat: m, pivots }
}

pub fn rank(a: &ZqMatrix) -> usize {
    echelon(a).pivots.len()
}

/// Solver for `A·x = b (mod q)` reusing one reduction of `[A | I]`.
pub struct Solver {
    ech: Echelon,
    rows: usize,
    cols: usize,
}

impl Solver {
    pub fn new(a: &ZqMatrix) -> Self {
        let aug = a.hconcat(&ZqMatrix::identity(a.q, a.rows())).expect("aug");
        Self {
            ech: echelon(&aug),
            rows: a.rows(),
            cols: a.cols(),
        }
    }

    /// Any particular solution with entries in `[0, q)`, as signed integers.
    pub fn solve(&self, b: &ZqVector) -> Result<IntVector> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch("solve rhs".into()));
        }
        let q = self.ech.mat.q;
        let mut x = vec![0i64; self.cols];
        for (erow, &piv) in self.ech.pivots.iter().enumerate() {
            if piv >= self.cols {
                // Echelon row living entirely in the identity part: a left
                // null row of A. Consistency demands the transformed rhs be 0.
                let mut acc: u128 = 0;
                for c in 0..self.rows {
                    acc += self.ech.mat.get(erow, self.cols + c) as u128 * b.data[c] as u128;
                }
                if !acc.is_multiple_of(q.get() as u128) {
                    return Err(Error::RankDeficient);
                }
                continue;
            }
            // Transformed rhs entry for this echelon row.
            let mut acc: u128 = 0;
            for c in 0..self.rows {
                acc += self.ech.mat.get(erow, self.cols + c) as u128 * b.data[c] as u128;
            }
            // Free variables are 0 in the particular solution and pivot
            // columns are reduced, so the transformed rhs entry is the value.
            x[piv] = (acc % q.get() as u128) as i64;
        }
        Ok(IntVector::new(x))
    }

    /// Solve for every column of `bs`, returning integer entries in `[0, q)`.
    pub fn solve_matrix(&self, bs: &ZqMatrix) -> Result<IntMatrix> {
        let mut out = IntMatrix::zero(self.cols, bs.cols());
        for c in 0..bs.cols() {
            let x = self.solve(&bs.column(c))?;
            for r in 0..self.cols {
                out.set(r, c, x.data[r]);
            }
        }
        Ok(out)
    }

    /// Uniformly random solution of `A·x = b`: free variables uniform, pivot
    /// variables determined. Used by the zero-knowledge simulator.
    #[allow(clippy::needless_range_loop)]
    pub fn solve_random<R: Rng + ?Sized>(&self, b: &ZqVector, rng: &mut R) -> Result<ZqVector> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch("solve rhs".into()));
        }
        let q = self.ech.mat.q;
        let mut x = vec![0u64; self.cols];
        let pivot_set: std::collections::HashSet<usize> = self
            .ech
            .pivots
            .iter()
            .copied()
            .filter(|&p| p < self.cols)
            .collect();
        for (c, slot) in x.iter_mut().enumerate() {
            if !pivot_set.contains(&c) {
                *slot = rng.gen_range(0..q.get());
            }
        }
        for (erow, &piv) in self.ech.pivots.iter().enumerate() {
            if piv >= self.cols {
                let mut acc: u128 = 0;
                for c in 0..self.rows {
                    acc += self.ech.mat.get(erow, self.cols + c) as u128 * b.data[c] as u128;
                }
                if !acc.is_multiple_of(q.get() as u128) {
                    return Err(Error::RankDeficient);
                }
                continue;
            }
            let mut acc: u128 = 0;
            for c in 0..self.rows {
                acc += self.ech.mat.get(erow, self.cols + c) as u128 * b.data[c] as u128;
            }
            let rhs = (acc % q.get() as u128) as u64;
            let mut sum: u128 = 0;
            for c in 0..self.cols {
                if c != piv && self.ech.mat.get(erow, c) != 0 {
                    sum += self.ech.mat.get(erow, c) as u128 * x[c] as u128;
                }
            }
            let sum = (sum % q.get() as u128) as u64;
            x[piv] = q.sub(rhs, sum);
        }
        Ok(ZqVector::from_u64(q, x))
    }
}
