//! Field transformation, deformed field strength and Hamiltonian invariance.
//!
//! θ-orders are tracked with one extra polynomial variable λ appended after
//! the coordinates: every object of θ-order `m` carries `λ^m`, and truncation
//! at order `M` drops terms with `λ`-degree above `M`.

use crate::polyalg::{poisson_bracket_config, Coeff, PolyError, Polynomial, ThetaMatrix};

use super::{FieldConfig, GaugeError, GaugeSeries};

/// Polynomial whose last variable is the θ-order marker λ.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedPolynomial<C> {
    pub poly: Polynomial<C>,
}

impl<C: Coeff> GradedPolynomial<C> {
    fn lambda(&self) -> usize {
        self.poly.nvars() - 1
    }

    /// Distinct θ-orders with at least one nonzero term, ascending.
    pub fn orders_present(&self) -> Vec<u32> {
        let lam = self.lambda();
        let mut orders: Vec<u32> = self.poly.terms().map(|(e, _)| e[lam]).collect();
        orders.sort_unstable();
        orders.dedup();
        orders
    }

    /// True when no term has θ-order `≤ order`.
    pub fn vanishes_through(&self, order: u32) -> bool {
        self.orders_present().first().is_none_or(|&m| m > order)
    }

    /// θ-order-`m` part with λ removed.
    pub fn order_part(&self, m: u32) -> Result<Polynomial<C>, PolyError> {
        let lam = self.lambda();
        self.poly
            .homogeneous_part(lam, m)
            .substitute_value(lam, &C::one())?
            .restrict(lam)
    }

    /// Sum of all orders, i.e. λ = 1.
    pub fn at_unit_theta(&self) -> Result<Polynomial<C>, PolyError> {
        let lam = self.lambda();
        self.poly.substitute_value(lam, &C::one())?.restrict(lam)
    }
}

/// Transformed potentials, kept θ-graded over `(x, λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedFields<C> {
    pub a: Vec<GradedPolynomial<C>>,
    pub phi: GradedPolynomial<C>,
    pub e: C,
    pub order: usize,
}

impl<C: Coeff> GradedFields<C> {
    pub fn at_unit_theta(&self) -> Result<FieldConfig<C>, PolyError> {
        let a = self
            .a
            .iter()
            .map(GradedPolynomial::at_unit_theta)
            .collect::<Result<Vec<_>, _>>()?;
        FieldConfig::new(a, self.phi.at_unit_theta()?, self.e.clone())
    }
}

fn lambda_pow<C: Coeff>(nvars: usize, m: usize) -> Result<Polynomial<C>, PolyError> {
    let mut exps = vec![0; nvars];
    exps[nvars - 1] = m as u32;
    Polynomial::monomial(exps, C::one())
}

/// `Σ_m λ^m terms[m][i]` over `n + 1` variables, `terms[m]` at θ-order
/// `m + offset`.
fn graded_sum<C: Coeff>(
    n: usize,
    terms: &[Vec<Polynomial<C>>],
    offset: usize,
) -> Result<Vec<Polynomial<C>>, PolyError> {
    let mut acc = vec![Polynomial::zero(n + 1); n];
    for (m, order_terms) in terms.iter().enumerate() {
        let lam = lambda_pow(n + 1, m + offset)?;
        for (a, t) in acc.iter_mut().zip(order_terms) {
            *a += &t.extend(n + 1)?.mul(&lam)?;
        }
    }
    Ok(acc)
}

/// θ-graded `J` and `K` over `(x, λ)`.
fn graded_shifts<C: Coeff>(
    s: &GaugeSeries<C>,
) -> Result<(Vec<Polynomial<C>>, Vec<Polynomial<C>>), PolyError> {
    let n = s.dim();
    Ok((graded_sum(n, &s.j, 0)?, graded_sum(n, &s.k, 1)?))
}

/// `λ Σ_{k,l} ∂_k F θ^{kl} ∂_l G` for polynomials over `(x, λ)`.
pub fn graded_bracket<C: Coeff>(
    f: &Polynomial<C>,
    g: &Polynomial<C>,
    theta: &ThetaMatrix<C>,
) -> Result<Polynomial<C>, PolyError> {
    let n = theta.dim();
    let mut out = Polynomial::zero(n + 1);
    for k in 0..n {
        let dfk = f.diff(k)?;
        if dfk.is_zero() {
            continue;
        }
        for l in 0..n {
            let t = theta.get(k, l);
            if t.is_zero() {
                continue;
            }
            out += &dfk.mul(&g.diff(l)?)?.scale(t);
        }
    }
    out.mul(&lambda_pow(n + 1, 1)?)
}

/// Solve `A'(x + K(x)) = A(x) + J(x)/e` and `φ'(x + K(x)) = φ(x)` through
/// θ-order `M` by fixed-point sweeps `A' ← A' − (A'∘(x+K) − target)`.
pub fn transform_fields_graded<C: Coeff>(
    fc: &FieldConfig<C>,
    s: &GaugeSeries<C>,
) -> Result<GradedFields<C>, GaugeError> {
    let n = s.dim();
    if fc.dim() != n {
        return Err(PolyError::DimensionMismatch {
            expected: n,
            found: fc.dim(),
        }
        .into());
    }
    if fc.e.is_zero() {
        return Err(GaugeError::ZeroCharge);
    }
    let order = s.order as u32;
    let lam = n;
    let (j, k) = graded_shifts(s)?;
    let mut subs: Vec<Polynomial<C>> = (0..n)
        .map(|i| Ok(Polynomial::var(n + 1, i)? + k[i].truncate_degree(lam, order)))
        .collect::<Result<_, PolyError>>()?;
    subs.push(Polynomial::var(n + 1, lam)?);

    let inv_e = C::one() / fc.e.clone();
    let mut targets = Vec::with_capacity(n + 1);
    for (ai, ji) in fc.a.iter().zip(&j) {
        targets.push(ai.extend(n + 1)? + ji.scale(&inv_e).truncate_degree(lam, order));
    }
    targets.push(fc.phi.extend(n + 1)?);

    let max_sweeps = s.order + 1;
    let mut solved = Vec::with_capacity(n + 1);
    for target in targets {
        let mut current = target.clone();
        let mut settled = false;
        for _ in 0..max_sweeps {
            let err = current.compose_truncated(&subs, lam, order)? - target.clone();
            if err.is_zero() {
                settled = true;
                break;
            }
            current -= &err;
        }
        if !settled {
            let err = current.compose_truncated(&subs, lam, order)? - target;
            if !err.is_zero() {
                return Err(GaugeError::NotConverged {
                    order: s.order,
                    sweeps: max_sweeps,
                });
            }
        }
        solved.push(GradedPolynomial { poly: current });
    }
    let phi = solved.pop().expect("phi present");
    Ok(GradedFields {
        a: solved,
        phi,
        e: fc.e.clone(),
        order: s.order,
    })
}

/// Transformed potentials `(A', φ')`, exact through θ-order `M`.
pub fn transform_fields<C: Coeff>(
    fc: &FieldConfig<C>,
    s: &GaugeSeries<C>,
) -> Result<FieldConfig<C>, GaugeError> {
    Ok(transform_fields_graded(fc, s)?.at_unit_theta()?)
}

/// `F^θ_{ij} = ∂_i A_j − ∂_j A_i + e{A_i, A_j}`.
pub fn field_strength<C: Coeff>(
    fc: &FieldConfig<C>,
    theta: &ThetaMatrix<C>,
) -> Result<Vec<Vec<Polynomial<C>>>, PolyError> {
    let n = fc.dim();
    if theta.dim() != n {
        return Err(PolyError::DimensionMismatch {
            expected: n,
            found: theta.dim(),
        });
    }
    let mut out = vec![vec![Polynomial::zero(n); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let curl = fc.a[j].diff(i)? - fc.a[i].diff(j)?;
            let fij = curl + poisson_bracket_config(&fc.a[i], &fc.a[j], theta)?.scale(&fc.e);
            out[j][i] = -&fij;
            out[i][j] = fij;
        }
    }
    Ok(out)
}

/// Graded counterpart of [`field_strength`] for graded potentials.
pub fn field_strength_graded<C: Coeff>(
    fields: &GradedFields<C>,
    theta: &ThetaMatrix<C>,
) -> Result<Vec<Vec<Polynomial<C>>>, PolyError> {
    let n = fields.a.len();
    let order = fields.order as u32;
    let mut out = vec![vec![Polynomial::zero(n + 1); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let (ai, aj) = (&fields.a[i].poly, &fields.a[j].poly);
            let fij = (aj.diff(i)? - ai.diff(j)? + graded_bracket(ai, aj, theta)?.scale(&fields.e))
                .truncate_degree(n, order);
            out[j][i] = -&fij;
            out[i][j] = fij;
        }
    }
    Ok(out)
}

/// `H'(x + K, p + J) − H(x, p)` over `(x, p, λ)`, truncated above θ-order
/// `M`, where `H'` is built from the graded potentials `fields`.
pub fn hamiltonian_shift_residual<C: Coeff>(
    fc: &FieldConfig<C>,
    fields: &GradedFields<C>,
    s: &GaugeSeries<C>,
) -> Result<GradedPolynomial<C>, GaugeError> {
    let n = s.dim();
    let nv = 2 * n + 1;
    let lam = 2 * n;
    let order = s.order as u32;
    // (x, λ) → (x, p, λ)
    let mut pos_map: Vec<usize> = (0..n).collect();
    pos_map.push(lam);
    let (j, k) = graded_shifts(s)?;
    let lift = |p: &Polynomial<C>| p.embed(nv, &pos_map);

    let mut subs = Vec::with_capacity(n + 1);
    for (i, ki) in k.iter().enumerate() {
        subs.push(Polynomial::var(nv, i)? + lift(ki)?.truncate_degree(lam, order));
    }
    for v in n..nv {
        subs.push(Polynomial::var(nv, v)?);
    }

    let half = C::one() / C::from_i64(2);
    let e = &fc.e;
    let mut shifted = Polynomial::zero(nv);
    for (i, ai) in fields.a.iter().enumerate() {
        let a_at = lift(&ai.poly)?.compose_truncated(&subs, lam, order)?;
        let pi = Polynomial::var(nv, n + i)? + lift(&j[i])? - a_at.scale(e);
        shifted += &pi.mul(&pi)?.truncate_degree(lam, order).scale(&half);
    }
    shifted += &lift(&fields.phi.poly)?
        .compose_truncated(&subs, lam, order)?
        .scale(e);

    let original = fc.hamiltonian()?.extend(nv)?;
    Ok(GradedPolynomial {
        poly: (shifted - original).truncate_degree(lam, order),
    })
}

/// Invariance residual of the Hamiltonian under the series and the
/// transformed potentials; correct constructions leave no term of θ-order
/// `≤ M`.
pub fn invariance_residual<C: Coeff>(
    fc: &FieldConfig<C>,
    s: &GaugeSeries<C>,
) -> Result<GradedPolynomial<C>, GaugeError> {
    let fields = transform_fields_graded(fc, s)?;
    hamiltonian_shift_residual(fc, &fields, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{build_series, Orientation};
    use crate::polyalg::Rational;

    type P = Polynomial<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn bxy_half(b: &Rational) -> P {
        P::var(2, 0)
            .unwrap()
            .mul(&P::var(2, 1).unwrap())
            .unwrap()
            .scale(&(b.clone() / q(2, 1)))
    }

    #[test]
    fn commutative_limit_is_gradient_shift() {
        let f = bxy_half(&q(3, 1)) + P::var(2, 1).unwrap().pow(3).unwrap();
        let fc = FieldConfig::symmetric_gauge(q(2, 1), q(1, 2))
            .with_potential(FieldConfig::isotropic_potential(2, q(1, 1)))
            .unwrap();
        let s = build_series(&f, fc.e.clone(), &ThetaMatrix::zero(2), 3).unwrap();
        let out = transform_fields(&fc, &s).unwrap();
        for i in 0..2 {
            assert_eq!(out.a[i], &fc.a[i] + &f.diff(i).unwrap());
        }
        assert_eq!(out.phi, fc.phi);
        assert!(invariance_residual(&fc, &s).unwrap().poly.is_zero());
    }

    #[test]
    fn strength_of_symmetric_gauge() {
        // e{A1, A2} = eΘ (∂_x A1 ∂_y A2 − ∂_y A1 ∂_x A2) = eΘ(0 − (−B/2)(B/2)) = eΘB²/4
        let (b, e, th) = (q(3, 1), q(2, 1), q(1, 5));
        let fc = FieldConfig::symmetric_gauge(b.clone(), e.clone());
        let f = field_strength(&fc, &ThetaMatrix::planar(th.clone())).unwrap();
        let expected = b.clone() + e * th.clone() * b.clone() * b / q(4, 1);
        assert_eq!(f[0][1], P::constant(2, expected.clone()));
        assert_eq!(f[1][0], P::constant(2, -expected));
        assert!(f[0][0].is_zero());
        let plain = field_strength(&fc, &ThetaMatrix::zero(2)).unwrap();
        assert_eq!(plain[0][1], P::constant(2, q(3, 1)));
        let free =
            field_strength(&FieldConfig::free(2, q(1, 1)), &ThetaMatrix::planar(th)).unwrap();
        assert!(free.iter().flatten().all(P::is_zero));
    }

    #[test]
    fn graded_orders_are_reported() {
        let lam3 = lambda_pow::<Rational>(3, 2).unwrap();
        let g = GradedPolynomial {
            poly: lam3.scale(&q(5, 1)) + P::var(3, 0).unwrap(),
        };
        assert_eq!(g.orders_present(), vec![0, 2]);
        assert!(!g.vanishes_through(0));
        let high = GradedPolynomial {
            poly: lambda_pow::<Rational>(3, 4).unwrap(),
        };
        assert!(high.vanishes_through(3));
        assert!(!high.vanishes_through(4));
        assert_eq!(g.order_part(2).unwrap(), P::constant(2, q(5, 1)));
    }

    #[test]
    fn zero_charge_is_rejected() {
        let fc = FieldConfig::free(2, q(0, 1));
        let s = build_series(
            &bxy_half(&q(1, 1)),
            q(0, 1),
            &ThetaMatrix::planar(q(1, 1)),
            2,
        )
        .unwrap();
        assert!(matches!(
            transform_fields(&fc, &s),
            Err(GaugeError::ZeroCharge)
        ));
    }

    #[test]
    fn wrong_potentials_break_invariance() {
        let fc = FieldConfig::symmetric_gauge(q(1, 1), q(1, 1));
        let s = GaugeSeries::build(
            &bxy_half(&q(1, 1)),
            q(1, 1),
            &ThetaMatrix::planar(q(1, 10)),
            2,
            Orientation::Reversed,
        )
        .unwrap();
        let mut fields = transform_fields_graded(&fc, &s).unwrap();
        assert!(hamiltonian_shift_residual(&fc, &fields, &s)
            .unwrap()
            .vanishes_through(2));
        // Keep only the θ-order-0 potentials: the defect appears at order 1.
        for a in fields.a.iter_mut() {
            a.poly = a.poly.truncate_degree(2, 0);
        }
        let r = hamiltonian_shift_residual(&fc, &fields, &s).unwrap();
        assert_eq!(r.orders_present().first(), Some(&1));
    }
}
