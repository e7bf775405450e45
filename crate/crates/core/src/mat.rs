//! Exact integer matrices and vectors, infinity norms, and Gram-Schmidt
//! orthogonalization in both f64 and exact rational arithmetic.
//!
//! The exact path runs the classical integral GSO recurrence on the Gram
//! matrix (subdeterminants `d_i`, scaled coefficients `lambda_ij`), so the
//! squared Gram-Schmidt norms come out as exact rationals `d_i / d_{i-1}`
//! with no intermediate fractions.

use crate::dd::Dd;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub const GS_F64_TOLERANCE: f64 = 1e-9;

/// Threshold below which the public Gram-Schmidt norm is computed exactly.
pub const GS_EXACT_DIM_LIMIT: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntVector {
    pub data: Vec<i64>,
}

impl IntVector {
    pub fn new(data: Vec<i64>) -> Self {
        Self { data }
    }

    pub fn zero(len: usize) -> Self {
        Self { data: vec![0; len] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Max of absolute entries; 0 for the empty or zero vector.
    pub fn inf_norm(&self) -> u64 {
        self.data
            .iter()
            .map(|&x| x.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Self { data }
    }

    pub fn slice(&self, lo: usize, hi: usize) -> Self {
        Self {
            data: self.data[lo..hi].to_vec(),
        }
    }

    /// Overwrite with zeros. Best-effort scrubbing for dropped key material;
    /// not hardened against compiler reordering.
    pub fn wipe(&mut self) {
        for x in self.data.iter_mut() {
            *x = 0;
        }
    }
}

/// Row-major signed integer matrix; columns are basis vectors throughout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows_in: &[Vec<i64>]) -> Result<Self> {
        let rows = rows_in.len();
        let cols = rows_in.first().map_or(0, |r| r.len());
        if rows_in.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for r in rows_in {
            data.extend_from_slice(r);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_columns(cols_in: &[IntVector]) -> Result<Self> {
        let cols = cols_in.len();
        let rows = cols_in.first().map_or(0, |c| c.len());
        if cols_in.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("ragged columns".into()));
        }
        let mut m = Self::zero(rows, cols);
        for (c, col) in cols_in.iter().enumerate() {
            for (r, &x) in col.data.iter().enumerate() {
                m.set(r, c, x);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> IntVector {
        IntVector::new((0..self.rows).map(|r| self.get(r, c)).collect())
    }

    pub fn set_column(&mut self, c: usize, v: &IntVector) {
        debug_assert_eq!(v.len(), self.rows);
        for (r, &x) in v.data.iter().enumerate() {
            self.set(r, c, x);
        }
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    /// Max column Euclidean norm, in f64.
    pub fn max_column_norm(&self) -> f64 {
        (0..self.cols)
            .map(|c| {
                (0..self.rows)
                    .map(|r| {
                        let x = self.get(r, c) as f64;
                        x * x
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    pub fn inf_norm(&self) -> u64 {
        self.data
            .iter()
            .map(|&x| x.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Multiply by an integer vector exactly (i128 accumulation).
    pub fn mul_vector(&self, v: &IntVector) -> Result<IntVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch("int mat * vec".into()));
        }
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut acc: i128 = 0;
            for c in 0..self.cols {
                acc += self.get(r, c) as i128 * v.data[c] as i128;
            }
            out.push(i64::try_from(acc).map_err(|_| {
                Error::OutOfRange("integer overflow in matrix-vector product".into())
            })?);
        }
        Ok(IntVector::new(out))
    }

    /// Blocked 2x2 assembly `[[a, b], [c, d]]`.
    pub fn block2x2(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix, d: &IntMatrix) -> Result<Self> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(Error::DimensionMismatch("block2x2".into()));
        }
        let rows = a.rows + c.rows;
        let cols = a.cols + b.cols;
        let mut m = Self::zero(rows, cols);
        for r in 0..a.rows {
            for col in 0..a.cols {
                m.set(r, col, a.get(r, col));
            }
            for col in 0..b.cols {
                m.set(r, a.cols + col, b.get(r, col));
            }
        }
        for r in 0..c.rows {
            for col in 0..c.cols {
                m.set(a.rows + r, col, c.get(r, col));
            }
            for col in 0..d.cols {
                m.set(a.rows + r, c.cols + col, d.get(r, col));
            }
        }
        Ok(m)
    }

    pub fn wipe(&mut self) {
        for x in self.data.iter_mut() {
            *x = 0;
        }
    }
}

/// Gram-Schmidt data for a set of column vectors in double-double
/// precision: orthogonalized vectors and their squared norms, built by
/// modified Gram-Schmidt one column at a time.
pub struct Gso {
    pub dim: usize,
    pub btilde: Vec<Vec<Dd>>,
    pub norms_sq: Vec<Dd>,
}

impl Gso {
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            btilde: Vec::new(),
            norms_sq: Vec::new(),
        }
    }

    /// Append one more column to the orthogonalization.
    pub fn push(&mut self, col: &IntVector) -> Result<()> {
        if col.len() != self.dim {
            return Err(Error::DimensionMismatch("gso push".into()));
        }
        let mut v: Vec<Dd> = col.data.iter().map(|&x| Dd::from_i64(x)).collect();
        for (b, &nsq) in self.btilde.iter().zip(&self.norms_sq) {
            let mut dot = Dd::ZERO;
            for (a, bb) in v.iter().zip(b) {
                dot = dot + *a * *bb;
            }
            let mu = dot / nsq;
            for (x, y) in v.iter_mut().zip(b) {
                *x = *x - mu * *y;
            }
        }
        let mut nsq = Dd::ZERO;
        for x in &v {
            nsq = nsq + *x * *x;
        }
        if nsq.to_f64() < GS_F64_TOLERANCE {
            return Err(Error::RankDeficient);
        }
        self.btilde.push(v);
        self.norms_sq.push(nsq);
        Ok(())
    }

    /// Extend analytically for a basis of the shape `[[core, W], [0, I]]`
    /// with a full-rank core: the appended columns orthogonalize to exact
    /// unit vectors (the core block spans the whole top space, so the `W`
    /// parts project away completely).
    pub fn extend_for_identity_tail(&self, full_dim: usize) -> Self {
        let core_dim = self.dim;
        debug_assert!(full_dim >= core_dim);
        let mut btilde: Vec<Vec<Dd>> = self
            .btilde
            .iter()
            .map(|b| {
                let mut v = b.clone();
                v.resize(full_dim, Dd::ZERO);
                v
            })
            .collect();
        let mut norms_sq = self.norms_sq.clone();
        for j in core_dim..full_dim {
            let mut e = vec![Dd::ZERO; full_dim];
            e[j] = Dd::ONE;
            btilde.push(e);
            norms_sq.push(Dd::ONE);
        }
        Self {
            dim: full_dim,
            btilde,
            norms_sq,
        }
    }

    pub fn len(&self) -> usize {
        self.btilde.len()
    }

    pub fn is_empty(&self) -> bool {
        self.btilde.is_empty()
    }

    pub fn max_norm(&self) -> f64 {
        self.norms_sq
            .iter()
            .fold(0.0f64, |a, b| a.max(b.to_f64()))
            .sqrt()
    }
}

pub fn gso(m: &IntMatrix) -> Result<Gso> {
    let mut g = Gso::empty(m.rows());
    for c in 0..m.cols() {
        g.push(&m.column(c))?;
    }
    Ok(g)
}

/// Gram-Schmidt norm (max orthogonalized column norm) as f64, computed in
/// double-double precision.
pub fn gram_schmidt_norm_f64(m: &IntMatrix) -> Result<f64> {
    Ok(gso(m)?.max_norm())
}

/// Classical size reduction against a precomputed orthogonalization:
/// subtract rounded projections of earlier columns so every Gram-Schmidt
/// coefficient ends at magnitude 1/2 or less. Unit-triangular column
/// operations, so the lattice, the column flag, and every Gram-Schmidt
/// vector are unchanged exactly. Columns before `start_col` are assumed
/// already reduced and are left alone. Intermediate entries can exceed
/// i64 on skewed bases, so the working copy is i128.
pub fn size_reduce_with_gso(m: &mut IntMatrix, g: &Gso, start_col: usize) -> Result<()> {
    let dim = m.rows();
    if g.len() != m.cols() || g.dim != dim {
        return Err(Error::DimensionMismatch("size reduction gso".into()));
    }
    for i in start_col.max(1)..m.cols() {
        let mut work: Vec<i128> = (0..dim).map(|r| m.get(r, i) as i128).collect();
        for j in (0..i).rev() {
            let bt = &g.btilde[j];
            let mut dot = Dd::ZERO;
            for (w, b) in work.iter().zip(bt) {
                dot = dot + Dd::from_i128(*w) * *b;
            }
            let mu = dot / g.norms_sq[j];
            let (z, _) = mu.round_split();
            if z != 0 {
                for (r, w) in work.iter_mut().enumerate() {
                    let sub = z
                        .checked_mul(m.get(r, j) as i128)
                        .ok_or_else(|| Error::OutOfRange("size reduction overflow".into()))?;
                    *w = w
                        .checked_sub(sub)
                        .ok_or_else(|| Error::OutOfRange("size reduction overflow".into()))?;
                }
            }
        }
        for (r, w) in work.iter().enumerate() {
            m.set(
                r,
                i,
                i64::try_from(*w)
                    .map_err(|_| Error::OutOfRange("size reduction overflow".into()))?,
            );
        }
    }
    Ok(())
}

pub fn size_reduce(m: &mut IntMatrix) -> Result<()> {
    let g = gso(m)?;
    size_reduce_with_gso(m, &g, 1)
}

/// Exact squared Gram-Schmidt norms via the integral GSO recurrence.
/// Errors on rank-deficient input (some subdeterminant hits zero).
#[allow(clippy::needless_range_loop)]
pub fn gram_schmidt_norms_sq_exact(m: &IntMatrix) -> Result<Vec<BigRational>> {
    let n = m.cols();
    // Gram matrix.
    let mut gram = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut acc: i128 = 0;
            for r in 0..m.rows() {
                acc += m.get(r, i) as i128 * m.get(r, j) as i128;
            }
            let v = BigInt::from(acc);
            gram[i][j] = v.clone();
            gram[j][i] = v;
        }
    }
    let mut d: Vec<BigInt> = vec![BigInt::one(); n + 1]; // d[0] = 1, d[i+1] = det of leading i+1 block
    let mut lambda = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut u = gram[i][j].clone();
            for k in 0..j {
                u = (&d[k + 1] * &u - &lambda[i][k] * &lambda[j][k]) / &d[k];
            }
            if j < i {
                lambda[i][j] = u;
            } else {
                if u.is_zero() || u.is_negative() {
                    return Err(Error::RankDeficient);
                }
                d[i + 1] = u;
            }
        }
    }
    Ok((0..n)
        .map(|i| BigRational::new(d[i + 1].clone(), d[i].clone()))
        .collect())
}

/// Exact squared Gram-Schmidt norm (max over columns) as a rational.
pub fn gram_schmidt_norm_sq_exact(m: &IntMatrix) -> Result<BigRational> {
    let norms = gram_schmidt_norms_sq_exact(m)?;
    Ok(norms.into_iter().max().expect("nonempty"))
}

/// Gram-Schmidt norm with the dispatch contract: exact rational arithmetic
/// for dimensions up to [`GS_EXACT_DIM_LIMIT`], f64 otherwise.
pub fn gram_schmidt_norm(m: &IntMatrix) -> Result<f64> {
    if m.cols() <= GS_EXACT_DIM_LIMIT && m.rows() <= GS_EXACT_DIM_LIMIT {
        let sq = gram_schmidt_norm_sq_exact(m)?;
        let num = sq.numer().to_string().parse::<f64>().unwrap_or(f64::MAX);
        let den = sq.denom().to_string().parse::<f64>().unwrap_or(1.0);
        Ok((num / den).sqrt())
    } else {
        gram_schmidt_norm_f64(m)
    }
}
