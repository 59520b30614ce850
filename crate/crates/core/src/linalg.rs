//! Exact Gaussian elimination over a coefficient field: rank and nullspace,
//! with deterministic first-nonzero pivoting.

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElement};

fn check_field(field: &Ring) -> Result<()> {
    use crate::ring::RingKind::*;
    match field.kind() {
        Rationals | PrimeField { .. } | GaloisField { .. } => Ok(()),
        _ => Err(Error::UnsupportedRing(format!("{field} is not a supported field"))),
    }
}

/// Reduce in place to row echelon form; returns the pivot columns.
fn echelon(rows: &mut Vec<Vec<RingElement>>) -> Result<Vec<usize>> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let pivot_row = (row..rows.len()).find(|&r| !rows[r][col].is_zero());
        let pivot_row = match pivot_row {
            None => continue,
            Some(r) => r,
        };
        rows.swap(row, pivot_row);
        let inv = rows[row][col].invert()?;
        for c in col..ncols {
            rows[row][c] = rows[row][c].mul(&inv)?;
        }
        for r in 0..rows.len() {
            if r == row || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            for c in col..ncols {
                let delta = factor.mul(&rows[row][c])?;
                rows[r][c] = rows[r][c].sub(&delta)?;
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows.len() {
            break;
        }
    }
    Ok(pivots)
}

pub fn rank(matrix: &[Vec<RingElement>], field: &Ring) -> Result<usize> {
    check_field(field)?;
    let mut rows: Vec<Vec<RingElement>> = matrix.to_vec();
    Ok(echelon(&mut rows)?.len())
}

/// Basis of { v : M v = 0 }, one vector per free column, in column order.
pub fn nullspace(matrix: &[Vec<RingElement>], field: &Ring) -> Result<Vec<Vec<RingElement>>> {
    check_field(field)?;
    let ncols = matrix.first().map(|r| r.len()).unwrap_or(0);
    let mut rows: Vec<Vec<RingElement>> = matrix.to_vec();
    let pivots = echelon(&mut rows)?;
    let mut out = Vec::new();
    for free in 0..ncols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![field.zero(); ncols];
        v[free] = field.one();
        for (r, &pc) in pivots.iter().enumerate() {
            // row r reads v[pc] + sum of row[c] * v[c] = 0
            v[pc] = rows[r][free].neg();
        }
        out.push(v);
    }
    Ok(out)
}

/// M v for a dense matrix and vector over the same field.
pub fn mat_vec(matrix: &[Vec<RingElement>], v: &[RingElement], field: &Ring) -> Result<Vec<RingElement>> {
    let mut out = Vec::with_capacity(matrix.len());
    for row in matrix {
        let mut acc = field.zero();
        for (a, b) in row.iter().zip(v) {
            acc = acc.add(&a.mul(b)?)?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// True when v lies in the span of the given vectors.
pub fn in_span(vectors: &[Vec<RingElement>], v: &[RingElement], field: &Ring) -> Result<bool> {
    let base_rank = rank(vectors, field)?;
    let mut extended: Vec<Vec<RingElement>> = vectors.to_vec();
    extended.push(v.to_vec());
    Ok(rank(&extended, field)? == base_rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> Ring {
        Ring::prime_field(p).unwrap()
    }

    fn m(field: &Ring, data: &[&[i64]]) -> Vec<Vec<RingElement>> {
        data.iter()
            .map(|row| row.iter().map(|&x| field.from_int(x)).collect())
            .collect()
    }

    #[test]
    fn rank_examples() {
        let f5 = fp(5);
        let mat = m(&f5, &[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(rank(&mat, &f5).unwrap(), 2);
        let q = Ring::rationals();
        let mat = m(&q, &[&[1, 0], &[0, 1]]);
        assert_eq!(rank(&mat, &q).unwrap(), 2);
    }

    #[test]
    fn nullspace_vectors_annihilate() {
        for field in [fp(2), fp(3), Ring::rationals(), Ring::galois_field(4).unwrap()] {
            let mat = m(&field, &[&[1, 1, 0, 1], &[0, 1, 1, 0]]);
            let ns = nullspace(&mat, &field).unwrap();
            assert_eq!(ns.len(), 2);
            for v in &ns {
                for x in mat_vec(&mat, v, &field).unwrap() {
                    assert!(x.is_zero());
                }
            }
        }
    }

    #[test]
    fn nullspace_of_full_rank_is_trivial() {
        let f3 = fp(3);
        let mat = m(&f3, &[&[1, 0], &[0, 1], &[1, 1]]);
        assert!(nullspace(&mat, &f3).unwrap().is_empty());
    }
}
