//! Exact Gauss–Jordan elimination: reduced row-echelon form, kernels,
//! ranks, and square solves.

use super::{common_dimension, LinFunc, LinalgError};
use crate::rational::Rat;
use num_traits::{One, Zero};

/// Reduced row-echelon form together with the pivot column indices.
pub(crate) struct Rref {
    pub reduced: Vec<Vec<Rat>>,
    pub pivots: Vec<usize>,
}

pub(crate) fn rref(mut rows: Vec<Vec<Rat>>, cols: usize) -> Rref {
    let mut pivots = Vec::new();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pivot_row) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let scale = rows[rank][col].clone();
        for entry in rows[rank].iter_mut() {
            *entry /= &scale;
        }
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            for c in 0..rows[r].len() {
                let delta = &rows[rank][c] * &factor;
                rows[r][c] -= delta;
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    Rref {
        reduced: rows,
        pivots,
    }
}

/// Kernel basis of the row system, plus the pivot columns of the elimination.
#[derive(Debug, Clone)]
pub struct NullspaceBasis {
    /// One vector per free column, each annihilated exactly by every row.
    pub basis: Vec<Vec<Rat>>,
    /// Pivot column indices; `basis.len() + pivots.len()` equals the dimension.
    pub pivots: Vec<usize>,
}

/// Basis of `{ v : row.v = 0 for all rows }` by exact Gauss–Jordan.
pub fn nullspace_basis(rows: &[LinFunc]) -> Result<NullspaceBasis, LinalgError> {
    let n = common_dimension(rows, None)?;
    let matrix: Vec<Vec<Rat>> = rows.iter().map(|r| r.coeffs().to_vec()).collect();
    let Rref { reduced, pivots } = rref(matrix, n);

    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![Rat::zero(); n];
        v[f] = Rat::one();
        for (row, &p) in reduced.iter().zip(&pivots) {
            v[p] = -&row[f];
        }
        basis.push(v);
    }
    Ok(NullspaceBasis { basis, pivots })
}

/// `true` iff the rows are linearly independent; also returns the exact rank.
pub fn rank_independent(rows: &[LinFunc]) -> Result<(bool, usize), LinalgError> {
    if rows.is_empty() {
        // The empty family is independent.
        return Ok((true, 0));
    }
    let n = common_dimension(rows, None)?;
    let matrix: Vec<Vec<Rat>> = rows.iter().map(|r| r.coeffs().to_vec()).collect();
    let rank = rref(matrix, n).pivots.len();
    Ok((rank == rows.len(), rank))
}

/// Exact solution of a square, invertible system `M x = rhs`.
pub fn solve_square(matrix: &[Vec<Rat>], rhs: &[Rat]) -> Result<Vec<Rat>, LinalgError> {
    let q = matrix.len();
    if rhs.len() != q {
        return Err(LinalgError::DimensionMismatch {
            expected: q,
            got: rhs.len(),
        });
    }
    for row in matrix {
        if row.len() != q {
            return Err(LinalgError::DimensionMismatch {
                expected: q,
                got: row.len(),
            });
        }
    }
    if q == 0 {
        return Ok(Vec::new());
    }
    let augmented: Vec<Vec<Rat>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let Rref { reduced, pivots } = rref(augmented, q);
    if pivots.len() != q {
        return Err(LinalgError::SingularMatrix {
            rank: pivots.len(),
            size: q,
        });
    }
    // With full rank the pivots are exactly columns 0..q and each row reads
    // x_i = last entry.
    Ok(reduced.into_iter().map(|row| row[q].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use crate::rng::SplitMix64;

    fn f(values: &[i64]) -> LinFunc {
        LinFunc::from_integers(values)
    }

    #[test]
    fn coordinate_kernel() {
        let rows = vec![f(&[1, 0, 0]), f(&[0, 1, 0])];
        let ns = nullspace_basis(&rows).unwrap();
        assert_eq!(ns.pivots, vec![0, 1]);
        assert_eq!(ns.basis, vec![vec![rat_int(0), rat_int(0), rat_int(1)]]);
    }

    #[test]
    fn one_equation_kernel() {
        let rows = vec![f(&[1, 1])];
        let ns = nullspace_basis(&rows).unwrap();
        assert_eq!(ns.pivots, vec![0]);
        assert_eq!(ns.basis.len(), 1);
        // (-1, 1) up to scaling.
        assert_eq!(rows[0].apply(&ns.basis[0]), rat_int(0));
        assert!(!ns.basis[0].iter().all(num_traits::Zero::is_zero));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_independent(&[f(&[1, 0]), f(&[0, 1])]).unwrap(), (true, 2));
        assert_eq!(rank_independent(&[f(&[1, 2]), f(&[2, 4])]).unwrap(), (false, 1));
        assert_eq!(rank_independent(&[]).unwrap(), (true, 0));
    }

    #[test]
    fn solve_square_examples() {
        let identity = vec![
            vec![rat_int(1), rat_int(0)],
            vec![rat_int(0), rat_int(1)],
        ];
        let b = vec![rat_int(4), rat_int(-5)];
        assert_eq!(solve_square(&identity, &b).unwrap(), b);

        let scalar = vec![vec![rat_int(2)]];
        assert_eq!(solve_square(&scalar, &[rat_int(1)]).unwrap(), vec![rat(1, 2)]);

        let singular = vec![
            vec![rat_int(1), rat_int(2)],
            vec![rat_int(2), rat_int(4)],
        ];
        assert!(matches!(
            solve_square(&singular, &[rat_int(0), rat_int(0)]),
            Err(LinalgError::SingularMatrix { rank: 1, size: 2 })
        ));
    }

    #[test]
    fn random_solves_have_zero_residual() {
        let mut rng = SplitMix64::new(2024);
        let mut solved = 0;
        while solved < 20 {
            let matrix: Vec<Vec<Rat>> = (0..3)
                .map(|_| (0..3).map(|_| rat(rng.range_i64(-5, 5), rng.range_i64(1, 4))).collect())
                .collect();
            let rhs: Vec<Rat> = (0..3).map(|_| rat(rng.range_i64(-5, 5), 1)).collect();
            match solve_square(&matrix, &rhs) {
                Ok(x) => {
                    for (row, b) in matrix.iter().zip(&rhs) {
                        let lhs: Rat = row.iter().zip(&x).map(|(a, v)| a * v).sum();
                        assert_eq!(lhs, *b, "residual must be exactly zero");
                    }
                    solved += 1;
                }
                Err(LinalgError::SingularMatrix { .. }) => continue,
                Err(other) => panic!("unexpected error {other:?}"),
            }
        }
    }

    #[test]
    fn random_kernels_annihilate_exactly() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..20 {
            let rows: Vec<LinFunc> = (0..2)
                .map(|_| {
                    LinFunc::new((0..5).map(|_| rat(rng.range_i64(-4, 4), 1)).collect())
                })
                .collect();
            let ns = nullspace_basis(&rows).unwrap();
            let (_, rank) = rank_independent(&rows).unwrap();
            assert_eq!(ns.basis.len() + rank, 5);
            for v in &ns.basis {
                for row in &rows {
                    assert_eq!(row.apply(v), rat_int(0));
                }
            }
        }
    }
}
