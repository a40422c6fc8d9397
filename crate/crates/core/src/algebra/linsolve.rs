//! Fraction-free (Bareiss) elimination over `Z[N]`.
//!
//! Rows are first scaled by the lcm of their denominators so the working
//! matrix is polynomial; every elimination step then divides exactly by the
//! previous pivot and entries stay polynomial throughout.

use super::{AlgebraError, Polynomial, RationalFunction};

fn lcm(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let g = a.gcd(b);
    (a * b).div_exact(&g).expect("gcd divides product").primitive_part()
}

/// Clears the denominators of one row (matrix row followed by rhs entry).
fn polynomial_row(row: &[RationalFunction]) -> Vec<Polynomial> {
    let l = row.iter().fold(Polynomial::one(), |acc, x| lcm(&acc, x.denom()));
    row.iter()
        .map(|x| x.numer() * &l.div_exact(x.denom()).expect("lcm is a multiple"))
        .collect()
}

fn check_square(matrix: &[Vec<RationalFunction>]) -> Result<usize, AlgebraError> {
    let n = matrix.len();
    if let Some((i, r)) = matrix.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(AlgebraError::DimensionMismatch(format!(
            "row {i} has {} entries, expected {n}",
            r.len()
        )));
    }
    Ok(n)
}

/// Forward Bareiss pass on an augmented polynomial matrix. Returns the
/// number of row swaps, or `None` when a pivot column is identically zero.
fn bareiss(a: &mut [Vec<Polynomial>], cols: usize) -> Option<usize> {
    let n = a.len();
    let mut prev = Polynomial::one();
    let mut swaps = 0;
    for k in 0..n {
        let p = (k..n).find(|&r| !a[r][k].is_zero())?;
        if p != k {
            a.swap(p, k);
            swaps += 1;
        }
        for i in k + 1..n {
            for j in k + 1..cols {
                let v = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = v.div_exact(&prev).expect("Bareiss step divides exactly");
            }
            a[i][k] = Polynomial::zero();
        }
        prev = a[k][k].clone();
    }
    Some(swaps)
}

/// Solves `matrix * x = rhs` exactly.
pub fn solve_linear_system(
    matrix: &[Vec<RationalFunction>],
    rhs: &[RationalFunction],
) -> Result<Vec<RationalFunction>, AlgebraError> {
    let n = check_square(matrix)?;
    if rhs.len() != n {
        return Err(AlgebraError::DimensionMismatch(format!(
            "rhs has {} entries, matrix has {n} rows",
            rhs.len()
        )));
    }
    let mut aug: Vec<Vec<Polynomial>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut full = row.clone();
            full.push(b.clone());
            polynomial_row(&full)
        })
        .collect();
    bareiss(&mut aug, n + 1).ok_or(AlgebraError::SingularSystem)?;

    let mut x = vec![RationalFunction::zero(); n];
    for i in (0..n).rev() {
        let mut acc = RationalFunction::from_poly(aug[i][n].clone());
        for j in i + 1..n {
            acc = &acc - &(&RationalFunction::from_poly(aug[i][j].clone()) * &x[j]);
        }
        x[i] = acc.checked_div(&RationalFunction::from_poly(aug[i][i].clone()))?;
    }
    Ok(x)
}

/// Exact determinant.
pub fn determinant(matrix: &[Vec<RationalFunction>]) -> Result<RationalFunction, AlgebraError> {
    let n = check_square(matrix)?;
    if n == 0 {
        return Ok(RationalFunction::one());
    }
    let mut scale = RationalFunction::one();
    let mut rows = Vec::with_capacity(n);
    for row in matrix {
        let l = row.iter().fold(Polynomial::one(), |acc, x| lcm(&acc, x.denom()));
        scale = &scale * &RationalFunction::new(Polynomial::one(), l.clone())?;
        rows.push(polynomial_row(row));
    }
    match bareiss(&mut rows, n) {
        None => Ok(RationalFunction::zero()),
        Some(swaps) => {
            let det = RationalFunction::from_poly(rows[n - 1][n - 1].clone());
            let signed = if swaps % 2 == 1 { -det } else { det };
            Ok(&signed * &scale)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> RationalFunction {
        RationalFunction::from_poly(Polynomial::from_i64s(c))
    }

    fn residual_is_zero(m: &[Vec<RationalFunction>], x: &[RationalFunction], b: &[RationalFunction]) -> bool {
        m.iter().zip(b).all(|(row, bi)| {
            let lhs: RationalFunction = row.iter().zip(x).map(|(a, xi)| a * xi).sum();
            (&lhs - bi).is_zero()
        })
    }

    /// Cramer's rule for 2x2 systems; independent of the elimination path.
    fn cramer2(m: &[Vec<RationalFunction>], b: &[RationalFunction]) -> Vec<RationalFunction> {
        let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
        let d0 = &(&b[0] * &m[1][1]) - &(&m[0][1] * &b[1]);
        let d1 = &(&m[0][0] * &b[1]) - &(&b[0] * &m[1][0]);
        vec![d0.checked_div(&det).unwrap(), d1.checked_div(&det).unwrap()]
    }

    #[test]
    fn identity_returns_rhs() {
        let m = vec![vec![p(&[1]), p(&[])], vec![p(&[]), p(&[1])]];
        let b = vec![p(&[3, 1]), RationalFunction::n_pow(-2)];
        assert_eq!(solve_linear_system(&m, &b).unwrap(), b);
    }

    #[test]
    fn scalar_system() {
        let x = solve_linear_system(&[vec![p(&[0, 1])]], &[p(&[0, 0, 1])]).unwrap();
        assert_eq!(x, vec![p(&[0, 1])]);
    }

    #[test]
    fn two_by_two_matches_cramer() {
        // [[1, N], [N, N^2 + 1]] x = [1, 0]; determinant 1
        let m = vec![vec![p(&[1]), p(&[0, 1])], vec![p(&[0, 1]), p(&[1, 0, 1])]];
        let b = vec![p(&[1]), p(&[])];
        let oracle = cramer2(&m, &b);
        assert_eq!(oracle, vec![p(&[1, 0, 1]), p(&[0, -1])]);
        let x = solve_linear_system(&m, &b).unwrap();
        assert_eq!(x, oracle);
        assert!(residual_is_zero(&m, &x, &b));
        assert_eq!(determinant(&m).unwrap(), RationalFunction::one());
    }

    #[test]
    fn rational_entries_and_pivoting() {
        // zero leading entry forces a row swap
        let m = vec![
            vec![p(&[]), RationalFunction::n_pow(-1), p(&[1])],
            vec![p(&[2]), p(&[1, 1]), p(&[])],
            vec![p(&[1]), p(&[]), RationalFunction::n_pow(-2)],
        ];
        let b = vec![p(&[1]), p(&[0, 1]), p(&[2])];
        let x = solve_linear_system(&m, &b).unwrap();
        assert!(residual_is_zero(&m, &x, &b));
    }

    #[test]
    fn singular_and_mismatched() {
        let m = vec![vec![p(&[0, 1]), p(&[0, 0, 1])], vec![p(&[1]), p(&[0, 1])]];
        assert_eq!(
            solve_linear_system(&m, &[p(&[1]), p(&[1])]),
            Err(AlgebraError::SingularSystem)
        );
        assert!(determinant(&m).unwrap().is_zero());
        assert!(matches!(
            solve_linear_system(&m, &[p(&[1])]),
            Err(AlgebraError::DimensionMismatch(_))
        ));
    }
}
