use crate::polyalg::{poisson_bracket_config, Coeff, Polynomial, ThetaMatrix};

use super::{GaugeError, MAX_ORDER};

/// Sign relating the bracket used inside the recursion to the phase-space θ.
///
/// `Aligned` runs the recursion with the structure's own θ. `Reversed` runs
/// it with −θ; with that choice the resulting shift `(x + K, p + J)`
/// preserves the phase-space brackets and matches the planar closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Aligned,
    Reversed,
}

impl Orientation {
    pub fn sign(self) -> i64 {
        match self {
            Orientation::Aligned => 1,
            Orientation::Reversed => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Aligned => Orientation::Reversed,
            Orientation::Reversed => Orientation::Aligned,
        }
    }
}

/// Truncated series of the generalized gauge transformation.
///
/// `j[m]` holds the θ-order-`m` momentum shift `J^m_i` for `m = 0..=order`;
/// `k[m - 1]` holds the θ-order-`m` position shift `K^i` for `m = 1..=order`,
/// with `K^{(m)} = −θ J^{m−1}` so that `K = −θJ` through the truncation order.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeSeries<C> {
    pub f: Polynomial<C>,
    pub e: C,
    pub theta: ThetaMatrix<C>,
    pub orientation: Orientation,
    pub order: usize,
    pub j: Vec<Vec<Polynomial<C>>>,
    pub k: Vec<Vec<Polynomial<C>>>,
}

/// Series with the recursion bracket equal to `theta`.
pub fn build_series<C: Coeff>(
    f: &Polynomial<C>,
    e: C,
    theta: &ThetaMatrix<C>,
    order: usize,
) -> Result<GaugeSeries<C>, GaugeError> {
    GaugeSeries::build(f, e, theta, order, Orientation::Aligned)
}

impl<C: Coeff> GaugeSeries<C> {
    pub fn build(
        f: &Polynomial<C>,
        e: C,
        theta: &ThetaMatrix<C>,
        order: usize,
        orientation: Orientation,
    ) -> Result<Self, GaugeError> {
        if order > MAX_ORDER {
            return Err(GaugeError::OrderOutOfRange {
                order,
                max: MAX_ORDER,
            });
        }
        let n = theta.dim();
        if f.nvars() != n {
            return Err(crate::polyalg::PolyError::DimensionMismatch {
                expected: n,
                found: f.nvars(),
            }
            .into());
        }
        let bracket_theta = match orientation {
            Orientation::Aligned => theta.clone(),
            Orientation::Reversed => theta.negated(),
        };
        let mut j: Vec<Vec<Polynomial<C>>> = Vec::with_capacity(order + 1);
        j.push(
            (0..n)
                .map(|i| Ok(f.diff(i)?.scale(&e)))
                .collect::<Result<_, GaugeError>>()?,
        );
        for m in 1..=order {
            let factor = e.clone() / C::from_i64(m as i64 + 1);
            let next = j[m - 1]
                .iter()
                .map(|prev| Ok(poisson_bracket_config(prev, f, &bracket_theta)?.scale(&factor)))
                .collect::<Result<Vec<_>, GaugeError>>()?;
            j.push(next);
        }
        let k = (1..=order)
            .map(|m| theta_contract_neg(theta, &j[m - 1]))
            .collect();
        Ok(Self {
            f: f.clone(),
            e,
            theta: theta.clone(),
            orientation,
            order,
            j,
            k,
        })
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    /// θ matrix used inside the bracket recursion.
    pub fn bracket_theta(&self) -> ThetaMatrix<C> {
        match self.orientation {
            Orientation::Aligned => self.theta.clone(),
            Orientation::Reversed => self.theta.negated(),
        }
    }

    /// Momentum shift at θ-order `m` (zero past the truncation).
    pub fn j_order(&self, m: usize) -> Vec<Polynomial<C>> {
        self.j
            .get(m)
            .cloned()
            .unwrap_or_else(|| vec![Polynomial::zero(self.dim()); self.dim()])
    }

    /// Position shift at θ-order `m` (zero at order 0 and past the truncation).
    pub fn k_order(&self, m: usize) -> Vec<Polynomial<C>> {
        if m == 0 || m > self.order {
            return vec![Polynomial::zero(self.dim()); self.dim()];
        }
        self.k[m - 1].clone()
    }

    /// Σ_m J^m.
    pub fn total_j(&self) -> Vec<Polynomial<C>> {
        sum_orders(self.dim(), &self.j)
    }

    /// Σ_m K^{(m)}.
    pub fn total_k(&self) -> Vec<Polynomial<C>> {
        sum_orders(self.dim(), &self.k)
    }
}

fn sum_orders<C: Coeff>(n: usize, orders: &[Vec<Polynomial<C>>]) -> Vec<Polynomial<C>> {
    let mut acc = vec![Polynomial::zero(n); n];
    for terms in orders {
        for (a, t) in acc.iter_mut().zip(terms) {
            *a += t;
        }
    }
    acc
}

/// `v ↦ −θ v`, i.e. `(−θ^{il} v_l)_i`.
fn theta_contract_neg<C: Coeff>(theta: &ThetaMatrix<C>, v: &[Polynomial<C>]) -> Vec<Polynomial<C>> {
    let n = theta.dim();
    (0..n)
        .map(|i| {
            let mut acc = Polynomial::zero(n);
            for (l, vl) in v.iter().enumerate() {
                let t = theta.get(i, l);
                if !t.is_zero() {
                    acc -= &vl.scale(t);
                }
            }
            acc
        })
        .collect()
}

/// Order-`m` residual of `∂_j J_i − ∂_i J_j = {J_i, J_j}`:
/// `R_ij = ∂_j J^m_i − ∂_i J^m_j − Σ_{l<m} {J^{m−1−l}_i, J^l_j}`, brackets
/// taken with the recursion's θ.
pub fn residual_mc<C: Coeff>(
    s: &GaugeSeries<C>,
    m: usize,
) -> Result<Vec<Vec<Polynomial<C>>>, GaugeError> {
    if m > s.order {
        return Err(GaugeError::OrderOutOfRange {
            order: m,
            max: s.order,
        });
    }
    let n = s.dim();
    let bt = s.bracket_theta();
    let mut r = vec![vec![Polynomial::zero(n); n]; n];
    for i in 0..n {
        for jj in 0..n {
            if i == jj {
                continue;
            }
            let mut acc = s.j[m][i].diff(jj)? - s.j[m][jj].diff(i)?;
            for l in 0..m {
                acc -= &poisson_bracket_config(&s.j[m - 1 - l][i], &s.j[l][jj], &bt)?;
            }
            r[i][jj] = acc;
        }
    }
    Ok(r)
}

/// Order-by-order residuals of the position and mixed bracket conditions.
///
/// `position[m-1][i][j]` is the θ-order-`m` part of
/// `{x'^i, x'^j} − θ^{ij} = θ^{il}∂_l K^j − θ^{jl}∂_l K^i + {K^i, K^j}` and
/// `mixed[m-1][i][j]` that of
/// `{x'^i, p'_j} − δ^i_j = θ^{il}∂_l J_j + ∂_j K^i + {K^i, J_j}`, for
/// `m = 1..=order`, all brackets with the phase-space θ.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatResidual<C> {
    pub position: Vec<Vec<Vec<Polynomial<C>>>>,
    pub mixed: Vec<Vec<Vec<Polynomial<C>>>>,
}

impl<C: Coeff> CompatResidual<C> {
    pub fn is_zero(&self) -> bool {
        self.position
            .iter()
            .chain(&self.mixed)
            .flatten()
            .flatten()
            .all(Polynomial::is_zero)
    }

    /// Largest term count among the entries of each order, position and
    /// mixed combined.
    pub fn max_terms_per_order(&self) -> Vec<usize> {
        self.position
            .iter()
            .zip(&self.mixed)
            .map(|(p, q)| {
                p.iter()
                    .chain(q)
                    .flatten()
                    .map(Polynomial::num_terms)
                    .max()
                    .unwrap_or(0)
            })
            .collect()
    }
}

pub fn residual_compat<C: Coeff>(s: &GaugeSeries<C>) -> Result<CompatResidual<C>, GaugeError> {
    let n = s.dim();
    let th = &s.theta;
    let zero = || vec![vec![Polynomial::<C>::zero(n); n]; n];
    let theta_grad = |p: &Polynomial<C>, i: usize| -> Result<Polynomial<C>, GaugeError> {
        let mut acc = Polynomial::zero(n);
        for l in 0..n {
            let t = th.get(i, l);
            if !t.is_zero() {
                acc += &p.diff(l)?.scale(t);
            }
        }
        Ok(acc)
    };
    let mut position = Vec::with_capacity(s.order);
    let mut mixed = Vec::with_capacity(s.order);
    for m in 1..=s.order {
        let k_prev = s.k_order(m - 1);
        let k_now = s.k_order(m);
        let j_prev = s.j_order(m - 1);
        let mut pos = zero();
        let mut mix = zero();
        for i in 0..n {
            for jj in 0..n {
                let mut p = theta_grad(&k_prev[jj], i)? - theta_grad(&k_prev[i], jj)?;
                for r in 1..m {
                    let sr = m - 1 - r;
                    if sr == 0 {
                        continue;
                    }
                    p += &poisson_bracket_config(&s.k_order(r)[i], &s.k_order(sr)[jj], th)?;
                }
                pos[i][jj] = p;

                let mut q = theta_grad(&j_prev[jj], i)? + k_now[i].diff(jj)?;
                for r in 1..m {
                    q += &poisson_bracket_config(&s.k_order(r)[i], &s.j_order(m - 1 - r)[jj], th)?;
                }
                mix[i][jj] = q;
            }
        }
        position.push(pos);
        mixed.push(mix);
    }
    Ok(CompatResidual { position, mixed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::Rational;

    type P = Polynomial<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn bxy_half(b: &Rational) -> P {
        let x = P::var(2, 0).unwrap();
        let y = P::var(2, 1).unwrap();
        x.mul(&y).unwrap().scale(&(b.clone() / q(2, 1)))
    }

    #[test]
    fn linear_gauge_function_stops_at_order_zero() {
        let x = P::var(2, 0).unwrap();
        let y = P::var(2, 1).unwrap();
        let f = x.scale(&q(3, 1)) + y.scale(&q(-2, 1));
        let s = build_series(&f, q(5, 1), &ThetaMatrix::planar(q(1, 7)), 4).unwrap();
        assert_eq!(
            s.j[0],
            vec![P::constant(2, q(15, 1)), P::constant(2, q(-10, 1))]
        );
        assert!(s.j[1..].iter().flatten().all(P::is_zero));
        for m in 0..=4 {
            assert!(residual_mc(&s, m).unwrap().iter().flatten().all(P::is_zero));
        }
        assert!(residual_compat(&s).unwrap().is_zero());
    }

    #[test]
    fn first_order_term_for_bxy() {
        // {By/2, Bxy/2} = −ΘB²y/4 → J¹ = (e/2)·e·that = (e²ΘB²/8)(−y, x)
        let (e, b, th) = (q(3, 2), q(2, 1), q(1, 5));
        let s = build_series(
            &bxy_half(&b),
            e.clone(),
            &ThetaMatrix::planar(th.clone()),
            1,
        )
        .unwrap();
        let c = e.clone() * e * th * b.clone() * b / q(8, 1);
        let x = P::var(2, 0).unwrap();
        let y = P::var(2, 1).unwrap();
        assert_eq!(s.j[1], vec![y.scale(&-c.clone()), x.scale(&c)]);
    }

    #[test]
    fn commutative_limit() {
        let f = bxy_half(&q(1, 1)) + P::var(2, 0).unwrap().pow(3).unwrap();
        let s = build_series(&f, q(2, 1), &ThetaMatrix::zero(2), 3).unwrap();
        assert_eq!(s.j[0][0], f.diff(0).unwrap().scale(&q(2, 1)));
        assert!(s.j[1..].iter().flatten().all(P::is_zero));
        assert!(s.k.iter().flatten().all(P::is_zero));
        assert!(residual_compat(&s).unwrap().is_zero());
    }

    #[test]
    fn residual_mc_for_bxy() {
        for orientation in [Orientation::Aligned, Orientation::Reversed] {
            let s = GaugeSeries::build(
                &bxy_half(&q(3, 1)),
                q(1, 1),
                &ThetaMatrix::planar(q(1, 2)),
                4,
                orientation,
            )
            .unwrap();
            for m in 0..=4 {
                assert!(
                    residual_mc(&s, m).unwrap().iter().flatten().all(P::is_zero),
                    "order {m}"
                );
            }
            assert!(matches!(
                residual_mc(&s, 5),
                Err(GaugeError::OrderOutOfRange { .. })
            ));
        }
    }

    #[test]
    fn compat_residual_selects_reversed_orientation() {
        let th = ThetaMatrix::planar(q(1, 3));
        let f = bxy_half(&q(2, 1));
        let rev = GaugeSeries::build(&f, q(1, 1), &th, 3, Orientation::Reversed).unwrap();
        assert!(residual_compat(&rev).unwrap().is_zero());
        let ali = GaugeSeries::build(&f, q(1, 1), &th, 3, Orientation::Aligned).unwrap();
        let r = residual_compat(&ali).unwrap();
        assert!(!r.is_zero());
        // Order 1 is orientation-independent; the defect starts at order 2.
        assert!(r.position[0]
            .iter()
            .chain(&r.mixed[0])
            .flatten()
            .all(P::is_zero));
    }

    #[test]
    fn position_shift_is_minus_theta_j() {
        let th = ThetaMatrix::planar(q(2, 3));
        let s = build_series(&bxy_half(&q(1, 1)), q(1, 1), &th, 2).unwrap();
        // K^{(1)} = −θ J^0: K^1 = −θ^{12} J^0_2, K^2 = −θ^{21} J^0_1
        assert_eq!(s.k[0][0], s.j[0][1].scale(&q(-2, 3)));
        assert_eq!(s.k[0][1], s.j[0][0].scale(&q(2, 3)));
        assert!(s.k_order(0).iter().all(P::is_zero));
        assert!(s.k_order(3).iter().all(P::is_zero));
    }

    #[test]
    fn rejects_excessive_order() {
        let f = bxy_half(&q(1, 1));
        assert!(matches!(
            build_series(&f, q(1, 1), &ThetaMatrix::planar(q(1, 1)), 11),
            Err(GaugeError::OrderOutOfRange { order: 11, max: 10 })
        ));
    }
}
