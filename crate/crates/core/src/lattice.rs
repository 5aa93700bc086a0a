//! Integer row reduction: Hermite normal form of lattice bases and integer
//! kernels of rational matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::scalars::Rational;

/// Reduces `rows` to row echelon form over the integers using unimodular row
/// operations restricted to the first `width` columns. Returns the number of
/// nonzero rows in the echelon part; those rows come first.
fn echelon(rows: &mut [Vec<BigInt>], width: usize) -> usize {
    let mut cur = 0;
    for col in 0..width {
        if cur == rows.len() {
            break;
        }
        loop {
            let pivot = (cur..rows.len())
                .filter(|&r| !rows[r][col].is_zero())
                .min_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
            let Some(p) = pivot else { break };
            rows.swap(cur, p);
            let mut done = true;
            for r in cur + 1..rows.len() {
                if rows[r][col].is_zero() {
                    continue;
                }
                let q = rows[r][col].div_floor(&rows[cur][col]);
                let (head, tail) = rows.split_at_mut(r);
                for (x, y) in tail[0].iter_mut().zip(&head[cur]) {
                    *x -= &q * y;
                }
                if !rows[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !rows[cur][col].is_zero() {
            cur += 1;
        }
    }
    cur
}

/// Hermite normal form of the lattice spanned by `basis`: echelon rows with
/// positive pivots and entries above each pivot reduced into `[0, pivot)`.
/// Zero rows are dropped.
pub fn hermite_rows(basis: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let Some(width) = basis.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut rows = basis.to_vec();
    let rank = echelon(&mut rows, width);
    rows.truncate(rank);
    let mut pivot_cols = Vec::with_capacity(rank);
    for row in rows.iter_mut() {
        let col = row
            .iter()
            .position(|x| !x.is_zero())
            .expect("echelon rows are nonzero");
        if row[col].is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        pivot_cols.push(col);
    }
    for i in 0..rank {
        let col = pivot_cols[i];
        for j in 0..i {
            let q = rows[j][col].div_floor(&rows[i][col]);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = rows.split_at_mut(i);
            for (x, y) in head[j].iter_mut().zip(&tail[0]) {
                *x -= &q * y;
            }
        }
    }
    rows
}

/// Basis (in Hermite form) of `{ z in Z^ncols : rows * z = 0 }`.
pub fn integer_kernel(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<BigInt>> {
    let int_rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            debug_assert_eq!(row.len(), ncols);
            let lcm = row
                .iter()
                .fold(BigInt::from(1), |acc, q| acc.lcm(q.denom()));
            row.iter()
                .map(|q| (q * Rational::from_integer(lcm.clone())).to_integer())
                .collect()
        })
        .collect();
    let r = int_rows.len();
    // [A^T | I]
    let mut work: Vec<Vec<BigInt>> = (0..ncols)
        .map(|j| {
            let mut row: Vec<BigInt> = int_rows.iter().map(|a| a[j].clone()).collect();
            row.extend((0..ncols).map(|k| BigInt::from(u8::from(k == j))));
            row
        })
        .collect();
    let rank = echelon(&mut work, r);
    let kernel: Vec<Vec<BigInt>> = work[rank..].iter().map(|row| row[r..].to_vec()).collect();
    hermite_rows(&kernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat_int;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hermite_of_simple_basis() {
        let h = hermite_rows(&[ints(&[2, 4]), ints(&[1, 3])]);
        assert_eq!(h, vec![ints(&[1, 1]), ints(&[0, 2])]);
    }

    #[test]
    fn kernel_of_single_equation() {
        // x + 2y - z = 0
        let k = integer_kernel(&[vec![rat_int(1), rat_int(2), rat_int(-1)]], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(&v[0] + BigInt::from(2) * &v[1] - &v[2], BigInt::zero());
        }
    }

    #[test]
    fn kernel_is_saturated() {
        // 2x - 4y = 0 has kernel spanned by (2, 1), not (4, 2).
        let k = integer_kernel(&[vec![rat_int(2), rat_int(-4)]], 2);
        assert_eq!(k, vec![ints(&[2, 1])]);
    }

    #[test]
    fn kernel_of_empty_system_is_everything() {
        let k = integer_kernel(&[], 2);
        assert_eq!(k, vec![ints(&[1, 0]), ints(&[0, 1])]);
    }

    #[test]
    fn full_rank_has_trivial_kernel() {
        let k = integer_kernel(&[vec![rat_int(1), rat_int(0)], vec![rat_int(0), rat_int(1)]], 2);
        assert!(k.is_empty());
    }
}
