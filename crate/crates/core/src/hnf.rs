//! Column-style Hermite normal form over the integers, used as the
//! decidable same-lattice oracle: two bases span the same q-ary lattice
//! exactly when the HNFs of their q-augmented generator sets agree.
//!
//! Exactness matters here and speed does not (this runs in tests and
//! reports at small dimensions), so everything is BigInt.

use crate::error::{Error, Result};
use crate::mat::IntMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Canonical column HNF of the lattice generated by the columns of `m`
/// together with `q * I` (q-ary lattices always contain `q Z^n`).
///
/// Output is lower triangular with positive diagonal and each row reduced
/// modulo its diagonal entry.
#[allow(clippy::needless_range_loop)]
pub fn hnf_q_augmented(m: &IntMatrix, q: u64) -> Result<IntMatrixBig> {
    let rows = m.rows();
    let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(m.cols() + rows);
    for c in 0..m.cols() {
        cols.push((0..rows).map(|r| BigInt::from(m.get(r, c))).collect());
    }
    for i in 0..rows {
        let mut e = vec![BigInt::zero(); rows];
        e[i] = BigInt::from(q);
        cols.push(e);
    }
    hnf_columns(rows, cols)
}

/// HNF of an arbitrary full-rank generating set (columns).
#[allow(clippy::needless_range_loop)]
pub fn hnf_columns(rows: usize, mut cols: Vec<Vec<BigInt>>) -> Result<IntMatrixBig> {
    let mut placed: Vec<Vec<BigInt>> = Vec::with_capacity(rows);
    for r in 0..rows {
        // All active columns have zeros above row r. Run a gcd chain on the
        // row-r entries until one column survives with a positive entry.
        loop {
            let mut idx: Option<usize> = None;
            for (i, c) in cols.iter().enumerate() {
                if !c[r].is_zero() {
                    match idx {
                        None => idx = Some(i),
                        Some(j) => {
                            if c[r].abs() < cols[j][r].abs() {
                                idx = Some(i)
                            }
                        }
                    }
                }
            }
            let Some(pivot) = idx else {
                return Err(Error::RankDeficient);
            };
            let mut done = true;
            for i in 0..cols.len() {
                if i != pivot && !cols[i][r].is_zero() {
                    let f = &cols[i][r] / &cols[pivot][r];
                    if !f.is_zero() {
                        for rr in r..rows {
                            let sub = &f * &cols[pivot][rr];
                            cols[i][rr] -= sub;
                        }
                    }
                    if !cols[i][r].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                let mut col = cols.swap_remove(pivot);
                if col[r].is_negative() {
                    for x in col.iter_mut() {
                        *x = -&*x;
                    }
                }
                placed.push(col);
                break;
            }
        }
    }
    // Reduce the left-of-diagonal entries of each row modulo the diagonal,
    // ascending so later reductions never touch already-reduced rows.
    for i in 0..rows {
        let diag = placed[i][i].clone();
        for j in 0..i {
            let e = &placed[j][i];
            let f = e.div_floor(&diag);
            if !f.is_zero() {
                for rr in i..rows {
                    let sub = &f * &placed[i][rr];
                    placed[j][rr] -= sub;
                }
            }
        }
    }
    Ok(IntMatrixBig { rows, cols: placed })
}

/// BigInt matrix stored as columns; only equality and display are needed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrixBig {
    pub rows: usize,
    pub cols: Vec<Vec<BigInt>>,
}

/// The same-lattice oracle for q-ary bases.
pub fn same_lattice(a: &IntMatrix, b: &IntMatrix, q: u64) -> Result<bool> {
    Ok(hnf_q_augmented(a, q)? == hnf_q_augmented(b, q)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_detects_same_lattice_under_unimodular_change() {
        // b = a * U with U unimodular.
        let a = IntMatrix::from_rows(&[vec![2, 1], vec![0, 3]]).unwrap();
        // Columns: c0' = c0 + c1, c1' = c1.
        let b = IntMatrix::from_rows(&[vec![3, 1], vec![3, 3]]).unwrap();
        assert!(same_lattice(&a, &b, 7).unwrap());
    }

    #[test]
    fn hnf_distinguishes_different_lattices() {
        let a = IntMatrix::from_rows(&[vec![1, 0], vec![0, 7]]).unwrap();
        let b = IntMatrix::from_rows(&[vec![7, 0], vec![0, 1]]).unwrap();
        assert!(!same_lattice(&a, &b, 7).unwrap());
    }

    #[test]
    fn hnf_is_lower_triangular_positive_diag() {
        let a = IntMatrix::from_rows(&[vec![4, 6, 1], vec![2, 2, 0], vec![0, 8, 3]]).unwrap();
        let h = hnf_q_augmented(&a, 11).unwrap();
        for (j, col) in h.cols.iter().enumerate() {
            assert!(col[j].is_positive());
            assert!(col.iter().take(j).all(|x| x.is_zero()));
        }
    }
}
