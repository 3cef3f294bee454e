use super::{Coeff, PolyError, Polynomial, ThetaMatrix};

/// Configuration-space bracket `{F, G} = Σ_{k,l} (∂_k F) θ^{kl} (∂_l G)`.
pub fn poisson_bracket_config<C: Coeff>(
    f: &Polynomial<C>,
    g: &Polynomial<C>,
    theta: &ThetaMatrix<C>,
) -> Result<Polynomial<C>, PolyError> {
    let n = theta.dim();
    for p in [f, g] {
        if p.nvars() != n {
            return Err(PolyError::DimensionMismatch {
                expected: n,
                found: p.nvars(),
            });
        }
    }
    let df = f.gradient();
    let dg = g.gradient();
    let mut out = Polynomial::zero(n);
    for k in 0..n {
        if df[k].is_zero() {
            continue;
        }
        for l in 0..n {
            let t = theta.get(k, l);
            if t.is_zero() || dg[l].is_zero() {
                continue;
            }
            out += &df[k].mul(&dg[l])?.scale(t);
        }
    }
    Ok(out)
}

/// Left-nested bracket `{...{{F, f}, f}..., f}` with `m` copies of `f`.
pub fn nested_bracket<C: Coeff>(
    g: &Polynomial<C>,
    f: &Polynomial<C>,
    m: usize,
    theta: &ThetaMatrix<C>,
) -> Result<Polynomial<C>, PolyError> {
    if g.nvars() != theta.dim() || f.nvars() != theta.dim() {
        let found = if g.nvars() != theta.dim() {
            g.nvars()
        } else {
            f.nvars()
        };
        return Err(PolyError::DimensionMismatch {
            expected: theta.dim(),
            found,
        });
    }
    let mut acc = g.clone();
    for _ in 0..m {
        acc = poisson_bracket_config(&acc, f, theta)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::Rational;

    type P = Polynomial<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn coordinate_bracket_is_theta() {
        let th = ThetaMatrix::planar(q(3, 7));
        let x = P::var(2, 0).unwrap();
        let y = P::var(2, 1).unwrap();
        assert_eq!(
            poisson_bracket_config(&x, &y, &th).unwrap(),
            P::constant(2, q(3, 7))
        );
        assert!(poisson_bracket_config(&x, &x, &th).unwrap().is_zero());
    }

    #[test]
    fn planar_gauge_example() {
        // {By/2, Bxy/2} = -Θ B² y / 4, worked out by hand:
        // ∂_x(By/2) = 0, ∂_y(By/2) = B/2, ∂_x(Bxy/2) = By/2
        // → θ^{21} (B/2)(By/2) = -Θ B² y / 4.
        let (b, big_theta) = (q(3, 1), q(1, 5));
        let th = ThetaMatrix::planar(big_theta.clone());
        let y = P::var(2, 1).unwrap();
        let x = P::var(2, 0).unwrap();
        let f = x.mul(&y).unwrap().scale(&(b.clone() / q(2, 1)));
        let df = f.diff(0).unwrap();
        let expected = y.scale(&(-big_theta * b.clone() * b / q(4, 1)));
        assert_eq!(poisson_bracket_config(&df, &f, &th).unwrap(), expected);
        assert_eq!(nested_bracket(&df, &f, 1, &th).unwrap(), expected);
        assert_eq!(nested_bracket(&df, &f, 0, &th).unwrap(), df);
    }

    #[test]
    fn constant_brackets_vanish() {
        let th = ThetaMatrix::planar(q(1, 1));
        let f = P::var(2, 0).unwrap().scale(&q(2, 1)) + P::var(2, 1).unwrap();
        let df = f.diff(0).unwrap();
        assert!(nested_bracket(&df, &f, 1, &th).unwrap().is_zero());
    }

    #[test]
    fn dimension_mismatch() {
        let th = ThetaMatrix::<Rational>::planar(q(1, 1));
        let a = P::var(3, 0).unwrap();
        let b = P::var(2, 0).unwrap();
        assert!(matches!(
            poisson_bracket_config(&a, &b, &th),
            Err(PolyError::DimensionMismatch { .. })
        ));
        assert!(nested_bracket(&a, &b, 2, &th).is_err());
    }
}
