use super::{Coeff, PolyError};

/// Gaussian elimination with partial pivoting (by magnitude, so exact and
/// float backends share one routine). Returns the solution of `m · x = rhs`
/// and `det m`, or `Singular` carrying the determinant (zero, or below
/// `1e-14` relative to the largest entry in float mode).
pub fn solve<C: Coeff>(m: &[Vec<C>], rhs: &[C]) -> Result<(Vec<C>, C), PolyError> {
    let n = m.len();
    if rhs.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(PolyError::DimensionMismatch {
            expected: n,
            found: rhs.len(),
        });
    }
    let scale = m.iter().flatten().map(|v| v.abs_f64()).fold(0.0, f64::max);
    let mut a: Vec<Vec<C>> = m.to_vec();
    let mut b: Vec<C> = rhs.to_vec();
    let mut det = C::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs_f64().total_cmp(&a[j][col].abs_f64()))
            .expect("nonempty range");
        let negligible = a[pivot][col].is_zero()
            || (C::MODE == super::ScalarMode::Float && a[pivot][col].abs_f64() <= 1e-14 * scale);
        if negligible {
            return Err(PolyError::Singular { det: 0.0 });
        }
        if pivot != col {
            a.swap(pivot, col);
            b.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det = det * p.clone();
        for row in col + 1..n {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone() / p.clone();
            for k in col..n {
                let v = a[col][k].clone() * factor.clone();
                a[row][k] = a[row][k].clone() - v;
            }
            let v = b[col].clone() * factor;
            b[row] = b[row].clone() - v;
        }
    }
    let mut x = vec![C::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc = acc - a[row][k].clone() * x[k].clone();
        }
        x[row] = acc / a[row][row].clone();
    }
    Ok((x, det))
}

/// Inverse via column-by-column solves.
pub fn invert<C: Coeff>(m: &[Vec<C>]) -> Result<Vec<Vec<C>>, PolyError> {
    let n = m.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<C> = (0..n)
            .map(|i| if i == j { C::one() } else { C::zero() })
            .collect();
        cols.push(solve(m, &e)?.0);
    }
    Ok((0..n)
        .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
        .collect())
}

/// Determinant (zero for singular matrices).
pub fn determinant<C: Coeff>(m: &[Vec<C>]) -> C {
    let rhs = vec![C::zero(); m.len()];
    match solve(m, &rhs) {
        Ok((_, det)) => det,
        Err(_) => C::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::Rational;

    #[test]
    fn solves_exactly() {
        let q = |n, d| Rational::from_ratio(n, d);
        let m = vec![vec![q(0, 1), q(2, 1)], vec![q(3, 1), q(1, 2)]];
        let (x, det) = solve(&m, &[q(4, 1), q(1, 1)]).unwrap();
        assert_eq!(det, q(-6, 1));
        assert_eq!(x, vec![q(0, 1), q(2, 1)]);
        let inv = invert(&m).unwrap();
        assert_eq!(inv[0][1], q(1, 3));
    }

    #[test]
    fn reports_singular() {
        let m = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(matches!(
            solve(&m, &[1.0, 1.0]),
            Err(PolyError::Singular { .. })
        ));
        assert_eq!(determinant(&m), 0.0);
    }
}
