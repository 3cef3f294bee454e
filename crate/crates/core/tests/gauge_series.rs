use ncmech::gauge::{
    field_strength, field_strength_graded, invariance_residual, residual_compat, residual_mc,
    resolve_orientation, transform_fields, transform_fields_graded, FieldConfig, GaugeSeries,
    GradedPolynomial, Orientation,
};
use ncmech::polyalg::{poisson_bracket_config, Coeff, Polynomial, Rational, ThetaMatrix};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

type P = Polynomial<Rational>;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn bxy_half(b: Rational) -> P {
    P::var(2, 0)
        .unwrap()
        .mul(&P::var(2, 1).unwrap())
        .unwrap()
        .scale(&(b / q(2, 1)))
}

/// Every monomial of total degree 2..=3 with a random small coefficient.
fn random_cubic(n: usize, rng: &mut StdRng) -> P {
    let mut terms = Vec::new();
    let mut push = |e: Vec<u32>, rng: &mut StdRng| {
        let c = q(rng.random_range(-3..=3), rng.random_range(1..=3));
        terms.push((e, c));
    };
    for i in 0..n {
        for j in i..n {
            let mut e = vec![0; n];
            e[i] += 1;
            e[j] += 1;
            push(e, rng);
            for k in j..n {
                let mut e3 = vec![0; n];
                e3[i] += 1;
                e3[j] += 1;
                e3[k] += 1;
                push(e3, rng);
            }
        }
    }
    P::from_terms(n, terms).unwrap()
}

fn theta3() -> ThetaMatrix<Rational> {
    ThetaMatrix::new(vec![
        vec![q(0, 1), q(1, 3), q(-1, 2)],
        vec![q(-1, 3), q(0, 1), q(1, 5)],
        vec![q(1, 2), q(-1, 5), q(0, 1)],
    ])
    .unwrap()
}

fn gauge_functions() -> Vec<(P, ThetaMatrix<Rational>)> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let mut cases = vec![(bxy_half(q(1, 1)), ThetaMatrix::planar(q(1, 10)))];
    for _ in 0..3 {
        cases.push((random_cubic(2, &mut rng), ThetaMatrix::planar(q(2, 7))));
    }
    cases.push((random_cubic(3, &mut rng), theta3()));
    cases
}

fn assert_zero_matrix(m: &[Vec<P>]) {
    assert!(m.iter().flatten().all(P::is_zero));
}

#[test]
fn maurer_cartan_residual_vanishes_through_order_four() {
    for (f, th) in gauge_functions() {
        for o in [Orientation::Aligned, Orientation::Reversed] {
            let s = GaugeSeries::build(&f, q(3, 2), &th, 4, o).unwrap();
            for m in 0..=4 {
                assert_zero_matrix(&residual_mc(&s, m).unwrap());
            }
        }
    }
}

#[test]
fn bracket_conditions_hold_for_the_reversed_recursion() {
    for (f, th) in gauge_functions() {
        let s = GaugeSeries::build(&f, q(3, 2), &th, 4, Orientation::Reversed).unwrap();
        assert!(residual_compat(&s).unwrap().is_zero());
    }
}

#[test]
fn aligned_recursion_breaks_the_mixed_condition() {
    let s = GaugeSeries::build(
        &bxy_half(q(1, 1)),
        q(1, 1),
        &ThetaMatrix::planar(q(1, 10)),
        3,
        Orientation::Aligned,
    )
    .unwrap();
    let r = residual_compat(&s).unwrap();
    assert!(!r.is_zero());
    // order 1 carries no bracket of J with K and is orientation independent
    assert!(r.mixed[0].iter().flatten().all(P::is_zero));
}

#[test]
fn linear_gauge_function_has_no_corrections() {
    let f = P::var(2, 0).unwrap().scale(&q(2, 1)) - P::var(2, 1).unwrap().scale(&q(5, 3));
    let s = GaugeSeries::build(
        &f,
        q(1, 1),
        &ThetaMatrix::planar(q(1, 1)),
        5,
        Orientation::Reversed,
    )
    .unwrap();
    assert_eq!(s.j[0][0], P::constant(2, q(2, 1)));
    assert!(s.j[1..].iter().flatten().all(P::is_zero));
    assert!(residual_compat(&s).unwrap().is_zero());
}

#[test]
fn order_m_terms_are_homogeneous_in_theta() {
    let mut rng = StdRng::seed_from_u64(7);
    let f = random_cubic(2, &mut rng);
    let th = ThetaMatrix::planar(q(1, 3));
    let base = GaugeSeries::build(&f, q(1, 1), &th, 4, Orientation::Aligned).unwrap();
    for lambda in [q(2, 1), q(3, 1)] {
        let scaled =
            GaugeSeries::build(&f, q(1, 1), &th.scaled(&lambda), 4, Orientation::Aligned).unwrap();
        let mut factor = q(1, 1);
        for m in 0..=4 {
            for i in 0..2 {
                assert_eq!(scaled.j[m][i], base.j[m][i].scale(&factor));
            }
            factor *= lambda.clone();
        }
    }
}

#[test]
fn first_order_term_of_the_planar_example() {
    // J¹ = (e²ΘB²/8)(−y, x) with the recursion bracket θ^{12} = Θ
    let (e, b, th) = (q(2, 1), q(3, 1), q(1, 7));
    let s = GaugeSeries::build(
        &bxy_half(b.clone()),
        e.clone(),
        &ThetaMatrix::planar(th.clone()),
        1,
        Orientation::Aligned,
    )
    .unwrap();
    let c = e.clone() * e * th * b.clone() * b / q(8, 1);
    assert_eq!(s.j[1][0], P::var(2, 1).unwrap().scale(&-c.clone()));
    assert_eq!(s.j[1][1], P::var(2, 0).unwrap().scale(&c));
}

#[test]
fn hamiltonian_is_invariant_through_the_truncation_order() {
    let mut rng = StdRng::seed_from_u64(11);
    let plain = FieldConfig::symmetric_gauge(q(1, 1), q(1, 1));
    let loaded = FieldConfig::symmetric_gauge(q(2, 3), q(3, 2))
        .with_potential(FieldConfig::isotropic_potential(2, q(1, 2)))
        .unwrap();
    let cases = [
        (plain.clone(), bxy_half(q(1, 1)), 3),
        (loaded, random_cubic(2, &mut rng), 3),
        (plain.clone(), P::zero(2), 2),
    ];
    for (fc, f, order) in cases {
        for o in [Orientation::Aligned, Orientation::Reversed] {
            let s = GaugeSeries::build(&f, fc.e.clone(), &ThetaMatrix::planar(q(1, 10)), order, o)
                .unwrap();
            let r = invariance_residual(&fc, &s).unwrap();
            assert!(r.vanishes_through(order as u32), "{:?}", r.orders_present());
        }
    }
    let s = GaugeSeries::build(
        &bxy_half(q(1, 1)),
        q(1, 1),
        &ThetaMatrix::zero(2),
        3,
        Orientation::Reversed,
    )
    .unwrap();
    assert!(invariance_residual(&plain, &s).unwrap().poly.is_zero());
}

#[test]
fn transformed_fields_satisfy_the_defining_shift() {
    let mut rng = StdRng::seed_from_u64(12);
    let f = random_cubic(2, &mut rng);
    let fc = FieldConfig::symmetric_gauge(q(1, 1), q(2, 1))
        .with_potential(P::var(2, 0).unwrap().pow(2).unwrap())
        .unwrap();
    let s = GaugeSeries::build(
        &f,
        fc.e.clone(),
        &ThetaMatrix::planar(q(1, 4)),
        3,
        Orientation::Reversed,
    )
    .unwrap();
    let out = transform_fields_graded(&fc, &s).unwrap();
    // A'(x + K) − A − J/e in graded form
    let lam_poly = |m: usize| P::monomial(vec![0, 0, m as u32], q(1, 1)).unwrap();
    let mut subs = Vec::new();
    for i in 0..2 {
        let mut xi = P::var(3, i).unwrap();
        for m in 1..=3 {
            xi += &s.k_order(m)[i]
                .extend(3)
                .unwrap()
                .mul(&lam_poly(m))
                .unwrap();
        }
        subs.push(xi);
    }
    subs.push(P::var(3, 2).unwrap());
    let inv_e = q(1, 1) / fc.e.clone();
    for i in 0..2 {
        let mut r =
            out.a[i].poly.compose_truncated(&subs, 2, 3).unwrap() - fc.a[i].extend(3).unwrap();
        for m in 0..=3 {
            r -= &s.j[m][i]
                .scale(&inv_e)
                .extend(3)
                .unwrap()
                .mul(&lam_poly(m))
                .unwrap();
        }
        assert!(GradedPolynomial { poly: r }.vanishes_through(3));
    }
    let phi = out.phi.poly.compose_truncated(&subs, 2, 3).unwrap() - fc.phi.extend(3).unwrap();
    assert!(GradedPolynomial { poly: phi }.vanishes_through(3));
}

#[test]
fn commutative_limit_is_the_ordinary_gauge_transformation() {
    let f = bxy_half(q(5, 1)) + P::var(2, 0).unwrap().pow(3).unwrap();
    let fc = FieldConfig::symmetric_gauge(q(1, 1), q(1, 1));
    let s =
        GaugeSeries::build(&f, q(1, 1), &ThetaMatrix::zero(2), 4, Orientation::Reversed).unwrap();
    let out = transform_fields(&fc, &s).unwrap();
    for i in 0..2 {
        assert_eq!(out.a[i], &fc.a[i] + &f.diff(i).unwrap());
    }
    assert_eq!(out.phi, fc.phi);
    let ident = GaugeSeries::build(
        &P::zero(2),
        q(1, 1),
        &ThetaMatrix::planar(q(1, 1)),
        4,
        Orientation::Reversed,
    )
    .unwrap();
    assert_eq!(transform_fields(&fc, &ident).unwrap(), fc);
}

/// Order-1 part of `A' − A` against `e{A + c ∂f, f}` in the structure bracket.
fn first_order_shift_coefficient(o: Orientation) -> (bool, bool) {
    let mut rng = StdRng::seed_from_u64(21);
    let f = random_cubic(2, &mut rng);
    let e = q(3, 2);
    let x = P::var(2, 0).unwrap();
    let y = P::var(2, 1).unwrap();
    let fc = FieldConfig::new(
        vec![y.mul(&x).unwrap(), x.pow(2).unwrap().scale(&q(-1, 2))],
        x.mul(&y).unwrap() + y.pow(2).unwrap(),
        e.clone(),
    )
    .unwrap();
    let th = ThetaMatrix::planar(q(1, 3));
    let s = GaugeSeries::build(&f, e.clone(), &th, 1, o).unwrap();
    let out = transform_fields_graded(&fc, &s).unwrap();
    let matches = |c: Rational| {
        (0..2).all(|i| {
            let shifted = &fc.a[i] + &f.diff(i).unwrap().scale(&c);
            let expected = poisson_bracket_config(&shifted, &f, &th).unwrap().scale(&e);
            out.a[i].order_part(1).unwrap() == expected
        })
    };
    let half = matches(q(1, 2));
    let three_halves = matches(q(3, 2));
    let phi_expected = poisson_bracket_config(&fc.phi, &f, &th).unwrap().scale(&e);
    assert_eq!(out.phi.order_part(1).unwrap(), phi_expected);
    (half, three_halves)
}

#[test]
fn first_order_potential_shift() {
    assert_eq!(
        first_order_shift_coefficient(Orientation::Reversed),
        (true, false)
    );
    assert_eq!(
        first_order_shift_coefficient(Orientation::Aligned),
        (false, true)
    );
}

#[test]
fn field_strength_of_transformed_fields_is_shifted_original() {
    let mut rng = StdRng::seed_from_u64(31);
    let f = random_cubic(2, &mut rng);
    let fc = FieldConfig::symmetric_gauge(q(1, 1), q(1, 1))
        .with_potential(FieldConfig::isotropic_potential(2, q(1, 1)))
        .unwrap();
    let th = ThetaMatrix::planar(q(1, 5));
    let order = 3u32;
    let s =
        GaugeSeries::build(&f, fc.e.clone(), &th, order as usize, Orientation::Reversed).unwrap();
    let fields = transform_fields_graded(&fc, &s).unwrap();
    let strength_new = field_strength_graded(&fields, &th).unwrap();
    let strength_old = field_strength(&fc, &th).unwrap();
    let lam_poly = |m: usize| P::monomial(vec![0, 0, m as u32], q(1, 1)).unwrap();
    let mut subs = Vec::new();
    for i in 0..2 {
        let mut xi = P::var(3, i).unwrap();
        for m in 1..=order as usize {
            xi += &s.k_order(m)[i]
                .extend(3)
                .unwrap()
                .mul(&lam_poly(m))
                .unwrap();
        }
        subs.push(xi);
    }
    subs.push(P::var(3, 2).unwrap());
    // The constant-field part is graded with λ for each explicit θ in F.
    let old_graded = field_strength_graded(
        &ncmech::gauge::GradedFields {
            a: fc
                .a
                .iter()
                .map(|a| GradedPolynomial {
                    poly: a.extend(3).unwrap(),
                })
                .collect(),
            phi: GradedPolynomial {
                poly: fc.phi.extend(3).unwrap(),
            },
            e: fc.e.clone(),
            order: order as usize,
        },
        &th,
    )
    .unwrap();
    let lhs = strength_new[0][1]
        .compose_truncated(&subs, 2, order)
        .unwrap();
    assert!(GradedPolynomial {
        poly: lhs - old_graded[0][1].clone()
    }
    .vanishes_through(order));
    assert_eq!(
        GradedPolynomial {
            poly: old_graded[0][1].clone()
        }
        .at_unit_theta()
        .unwrap(),
        strength_old[0][1]
    );
}

#[test]
fn orientation_resolution_selects_reversed() {
    for (e, b, t) in [
        (q(1, 1), q(1, 1), q(1, 10)),
        (q(2, 1), q(-1, 3), q(3, 1)),
        (q(-1, 2), q(5, 1), q(-1, 4)),
    ] {
        assert_eq!(
            resolve_orientation(&e, &b, &t).unwrap(),
            Orientation::Reversed
        );
    }
}

#[test]
fn planar_series_sums_to_exponential_coefficients() {
    // J_1 = a_s y, J_2 = b_s x with a_s = (e^w − 1)/θ, b_s = (1 − e^{−w})/θ, w = eθB/2
    let (e, b, t) = (1.0f64, 1.0f64, 0.1f64);
    let s = GaugeSeries::build(
        &bxy_half(q(1, 1)).to_f64(),
        e,
        &ThetaMatrix::planar(t),
        8,
        Orientation::Reversed,
    )
    .unwrap();
    let w = e * t * b / 2.0;
    let a_s = w.exp_m1() / t;
    let b_s = -(-w).exp_m1() / t;
    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    let mut last_err = f64::INFINITY;
    for m in 0..=8 {
        sum_a += s.j[m][0].coeff(&[0, 1]);
        sum_b += s.j[m][1].coeff(&[1, 0]);
        let err = (sum_a - a_s).abs();
        assert!(err <= last_err);
        last_err = err;
    }
    assert!((sum_a - a_s).abs() < 1e-14 && (sum_b - b_s).abs() < 1e-14);
    // the series solution and the square-root closed form differ at O(θ²)
    let g = ncmech::gauge::constant_b_closed_form(e, b, t);
    assert!((a_s - g.a).abs() > 1e-4);
    assert!((a_s - b_s - a_s * b_s * t).abs() < 1e-15);
}

#[test]
fn series_rejects_order_above_cap() {
    assert!(GaugeSeries::build(
        &bxy_half(q(1, 1)),
        q(1, 1),
        &ThetaMatrix::planar(q(1, 1)),
        11,
        Orientation::Reversed
    )
    .is_err());
    let _ = Rational::from_i64(0);
}
