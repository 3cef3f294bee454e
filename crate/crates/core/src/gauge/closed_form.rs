//! Planar constant-field gauge transformation in closed form.
//!
//! For `f = Bxy/2` the shifts are `J = (a y, b x)` and
//! `(x', y') = ((1 − θb) x, (1 + θa) y)` with
//! `a, b = eB/2 ∓ (2 − √(e²B²θ² + 4)) / (2θ)`.

use num_traits::Zero;

use crate::polyalg::{Coeff, Polynomial, Rational, ThetaMatrix};

use super::{GaugeError, GaugeSeries, Orientation};

/// Closed-form coefficients `a`, `b` of the planar constant-field gauge.
///
/// `orientation` records which phase-space θ the pair belongs to: with
/// `Reversed` the structure has `θ^{12} = +θ`, with `Aligned` it has
/// `θ^{12} = −θ`. Only the first makes `(a, b)` solve the bracket conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantBGauge {
    pub e: f64,
    pub b_field: f64,
    pub theta: f64,
    pub a: f64,
    pub b: f64,
    pub orientation: Orientation,
}

/// Closed form, paired with the `Reversed` orientation.
pub fn constant_b_closed_form(e: f64, b_field: f64, theta: f64) -> ConstantBGauge {
    let half = e * b_field / 2.0;
    let (a, b) = if theta == 0.0 {
        (half, half)
    } else {
        // (s − 2)/(2θ) rewritten as e²B²θ/(2(s + 2)) to avoid cancellation
        let s = (e * e * b_field * b_field * theta * theta + 4.0).sqrt();
        let shift = e * e * b_field * b_field * theta / (2.0 * (s + 2.0));
        (half + shift, half - shift)
    };
    ConstantBGauge {
        e,
        b_field,
        theta,
        a,
        b,
        orientation: Orientation::Reversed,
    }
}

impl ConstantBGauge {
    /// The `f = 0` transformation.
    pub fn identity(e: f64, b_field: f64, theta: f64) -> Self {
        Self {
            e,
            b_field,
            theta,
            a: 0.0,
            b: 0.0,
            orientation: Orientation::Reversed,
        }
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    /// `θ^{12}` of the phase-space structure this pair is meant for.
    pub fn structure_theta(&self) -> f64 {
        -(self.orientation.sign() as f64) * self.theta
    }

    pub fn theta_matrix(&self) -> ThetaMatrix<f64> {
        ThetaMatrix::planar(self.structure_theta())
    }

    /// `(x, y, p₁, p₂) ↦ (x + K, p + J)`.
    pub fn apply(&self, z: [f64; 4]) -> [f64; 4] {
        let t = self.structure_theta();
        let [x, y, p1, p2] = z;
        [
            (1.0 - t * self.b) * x,
            (1.0 + t * self.a) * y,
            p1 + self.a * y,
            p2 + self.b * x,
        ]
    }

    /// Transformed symmetric-gauge potential, `A'(x + K) = A + J/e`.
    pub fn transformed_potential(&self, x: f64, y: f64) -> [f64; 2] {
        let t = self.structure_theta();
        let eb = self.e * self.b_field;
        [
            (2.0 * self.a - eb) * y / (2.0 * self.e * (1.0 + t * self.a)),
            (2.0 * self.b + eb) * x / (2.0 * self.e * (1.0 - t * self.b)),
        ]
    }

    /// `Λ = ½(a + b) xy + ½θ (a p₂ y − b p₁ x)`.
    pub fn lambda(&self, z: [f64; 4]) -> f64 {
        let t = self.structure_theta();
        let [x, y, p1, p2] = z;
        0.5 * (self.a + self.b) * x * y + 0.5 * t * (self.a * p2 * y - self.b * p1 * x)
    }

    /// `Λ = ½(a − b) xy + θ a p₂ y − θ b p₁ x`, the form quoted alongside
    /// the transformation in the literature.
    pub fn lambda_quoted(&self, z: [f64; 4]) -> f64 {
        let t = self.structure_theta();
        let [x, y, p1, p2] = z;
        0.5 * (self.a - self.b) * x * y + t * self.a * p2 * y - t * self.b * p1 * x
    }

    fn lambda_rate(&self, z: [f64; 4], dz: [f64; 4], quoted: bool) -> f64 {
        let t = self.structure_theta();
        let [x, y, p1, p2] = z;
        let [dx, dy, dp1, dp2] = dz;
        let (a, b) = (self.a, self.b);
        if quoted {
            0.5 * (a - b) * (dx * y + x * dy) + t * a * (dp2 * y + p2 * dy)
                - t * b * (dp1 * x + p1 * dx)
        } else {
            0.5 * (a + b) * (dx * y + x * dy)
                + 0.5 * t * (a * (dp2 * y + p2 * dy) - b * (dp1 * x + p1 * dx))
        }
    }
}

/// `u + v √r` with rational parts.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSurd {
    pub u: Rational,
    pub v: Rational,
    pub r: Rational,
}

impl QuadraticSurd {
    pub fn rational(u: Rational, r: Rational) -> Self {
        Self {
            u,
            v: Rational::from_i64(0),
            r,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && (self.v.is_zero() || self.r.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.r, o.r);
        Self {
            u: &self.u + &o.u,
            v: &self.v + &o.v,
            r: self.r.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.r, o.r);
        Self {
            u: &self.u - &o.u,
            v: &self.v - &o.v,
            r: self.r.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.r, o.r);
        Self {
            u: &self.u * &o.u + &self.v * &o.v * &self.r,
            v: &self.u * &o.v + &self.v * &o.u,
            r: self.r.clone(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            u: &self.u * c,
            v: &self.v * c,
            r: self.r.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.u.to_f64() + self.v.to_f64() * self.r.to_f64().sqrt()
    }
}

/// Exact `(a, b)` as surds over `√(e²B²θ² + 4)`; `θ` must be nonzero.
pub fn exact_closed_form(
    e: &Rational,
    b_field: &Rational,
    theta: &Rational,
) -> Option<(QuadraticSurd, QuadraticSurd)> {
    if theta.is_zero() {
        return None;
    }
    let ebt = e * b_field * theta;
    let r = &ebt * &ebt + Rational::from_i64(4);
    let half_eb = e * b_field / Rational::from_i64(2);
    let inv = Rational::from_i64(1) / theta;
    let v = &inv / Rational::from_i64(2);
    let a = QuadraticSurd {
        u: &half_eb - &inv,
        v: v.clone(),
        r: r.clone(),
    };
    let b = QuadraticSurd {
        u: &half_eb + &inv,
        v: -v,
        r,
    };
    Some((a, b))
}

/// Residuals `a + b − eB` and `a − b − abθ`, computed exactly.
pub fn exact_closed_form_identities(
    e: &Rational,
    b_field: &Rational,
    theta: &Rational,
) -> Option<[QuadraticSurd; 2]> {
    let (a, b) = exact_closed_form(e, b_field, theta)?;
    let r = a.r.clone();
    let sum = a.add(&b).sub(&QuadraticSurd::rational(e * b_field, r));
    let diff = a.sub(&b).sub(&a.mul(&b).scale(theta));
    Some([sum, diff])
}

/// Pick the orientation whose first-order series term matches the Taylor
/// coefficient `e²B²θ/8` of `a` for `f = Bxy/2` and structure `θ^{12} = θ`.
pub fn resolve_orientation(
    e: &Rational,
    b_field: &Rational,
    theta: &Rational,
) -> Result<Orientation, GaugeError> {
    let f = Polynomial::var(2, 0)?
        .mul(&Polynomial::var(2, 1)?)?
        .scale(&(b_field / Rational::from_i64(2)));
    let th = ThetaMatrix::planar(theta.clone());
    let taylor = e * e * b_field * b_field * theta / Rational::from_i64(8);
    let mut matches = Vec::new();
    for o in [Orientation::Aligned, Orientation::Reversed] {
        let s = GaugeSeries::build(&f, e.clone(), &th, 1, o)?;
        let j1 = &s.j[1][0];
        if j1.num_terms() <= 1 && j1.coeff(&[0, 1]) == taylor {
            matches.push(o);
        }
    }
    match matches.as_slice() {
        [one] => Ok(*one),
        [] => Err(GaugeError::OrientationUndetermined(
            "no orientation matches".into(),
        )),
        _ => Err(GaugeError::OrientationUndetermined(
            "both orientations match; need eBθ ≠ 0".into(),
        )),
    }
}

/// Smooth closed test path `z_k(t) = c_k + A_k sin(ω_k t + φ_k)` sampled at
/// `samples` equally spaced points on `[0, t_end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestCurve {
    pub center: [f64; 4],
    pub amplitude: [f64; 4],
    pub frequency: [f64; 4],
    pub phase: [f64; 4],
    pub t_end: f64,
    pub samples: usize,
}

impl TestCurve {
    /// Circle in position space with momenta rotating at the same rate.
    pub fn circle(radius: f64, samples: usize) -> Self {
        let q = std::f64::consts::FRAC_PI_2;
        Self {
            center: [0.0; 4],
            amplitude: [radius, radius, 0.5 * radius, 0.5 * radius],
            frequency: [1.0; 4],
            phase: [q, 0.0, 0.0, q],
            t_end: 2.0 * std::f64::consts::PI,
            samples,
        }
    }

    /// Off-centre Lissajous path with incommensurate components.
    pub fn lissajous(samples: usize) -> Self {
        Self {
            center: [0.3, -0.2, 0.1, 0.4],
            amplitude: [0.8, 0.5, 0.7, 0.6],
            frequency: [1.0, 2.0, 3.0, 1.5],
            phase: [0.1, 0.7, 1.3, 2.1],
            t_end: 4.0,
            samples,
        }
    }

    pub fn point(&self, t: f64) -> [f64; 4] {
        std::array::from_fn(|k| {
            self.center[k] + self.amplitude[k] * (self.frequency[k] * t + self.phase[k]).sin()
        })
    }

    pub fn velocity(&self, t: f64) -> [f64; 4] {
        std::array::from_fn(|k| {
            self.amplitude[k] * self.frequency[k] * (self.frequency[k] * t + self.phase[k]).cos()
        })
    }

    pub fn times(&self) -> Vec<f64> {
        let last = (self.samples - 1) as f64;
        (0..self.samples)
            .map(|i| self.t_end * i as f64 / last)
            .collect()
    }
}

/// Outcome of [`boundary_term_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryReport {
    /// Larger of `pointwise` and `quadrature`.
    pub residual: f64,
    /// `max_t |δL − dΛ/dt|`.
    pub pointwise: f64,
    /// `max_k |∫₀^{t_k} δL dt − (Λ(t_k) − Λ(0))|`.
    pub quadrature: f64,
    /// Pointwise residual when the quoted `Λ` is used instead.
    pub quoted_lambda_residual: f64,
    pub samples: usize,
}

/// First-order Lagrangian `p·ẋ + ½θ(p₁ṗ₂ − p₂ṗ₁) − H` in the symmetric
/// gauge or its transform.
fn lagrangian(g: &ConstantBGauge, z: [f64; 4], dz: [f64; 4], transformed: bool) -> f64 {
    let t = g.structure_theta();
    let [x, y, p1, p2] = z;
    let [dx, dy, dp1, dp2] = dz;
    let a = if transformed {
        g.transformed_potential(x, y)
    } else {
        [-g.b_field * y / 2.0, g.b_field * x / 2.0]
    };
    let (pi1, pi2) = (p1 - g.e * a[0], p2 - g.e * a[1]);
    p1 * dx + p2 * dy + 0.5 * t * (p1 * dp2 - p2 * dp1) - 0.5 * (pi1 * pi1 + pi2 * pi2)
}

/// `δL(t) = L'(z', ż') − L(z, ż)` along the curve; `ż'` is exact since the
/// map is linear.
fn delta_l(g: &ConstantBGauge, z: [f64; 4], dz: [f64; 4]) -> f64 {
    let t = g.structure_theta();
    let zp = g.apply(z);
    let [dx, dy, dp1, dp2] = dz;
    let dzp = [
        (1.0 - t * g.b) * dx,
        (1.0 + t * g.a) * dy,
        dp1 + g.a * dy,
        dp2 + g.b * dx,
    ];
    lagrangian(g, zp, dzp, true) - lagrangian(g, z, dz, false)
}

const GAUSS_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Check that the Lagrangian change under the closed-form transformation is
/// `dΛ/dt` along `curve`.
pub fn boundary_term_check(
    g: &ConstantBGauge,
    curve: &TestCurve,
) -> Result<BoundaryReport, GaugeError> {
    if curve.samples < 16 {
        return Err(GaugeError::CurveTooCoarse {
            samples: curve.samples,
        });
    }
    if g.e == 0.0 && (g.a != 0.0 || g.b != 0.0) {
        return Err(GaugeError::ZeroCharge);
    }
    let times = curve.times();
    let mut pointwise: f64 = 0.0;
    let mut quoted: f64 = 0.0;
    for &t in &times {
        let (z, dz) = (curve.point(t), curve.velocity(t));
        let dl = delta_l(g, z, dz);
        pointwise = pointwise.max((dl - g.lambda_rate(z, dz, false)).abs());
        quoted = quoted.max((dl - g.lambda_rate(z, dz, true)).abs());
    }
    let lambda0 = g.lambda(curve.point(times[0]));
    let mut integral = 0.0;
    let mut quadrature: f64 = 0.0;
    for w in times.windows(2) {
        let (mid, half) = ((w[0] + w[1]) / 2.0, (w[1] - w[0]) / 2.0);
        for (node, weight) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
            let t = mid + half * node;
            integral += weight * half * delta_l(g, curve.point(t), curve.velocity(t));
        }
        let expected = g.lambda(curve.point(w[1])) - lambda0;
        quadrature = quadrature.max((integral - expected).abs());
    }
    Ok(BoundaryReport {
        residual: pointwise.max(quadrature),
        pointwise,
        quadrature,
        quoted_lambda_residual: quoted,
        samples: curve.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn closed_form_values() {
        let g = constant_b_closed_form(1.0, 2.0, 1.0);
        assert!((g.a - 2f64.sqrt()).abs() < 1e-15);
        assert!((g.b - (2.0 - 2f64.sqrt())).abs() < 1e-15);
        let g0 = constant_b_closed_form(3.0, 2.0, 0.0);
        assert_eq!((g0.a, g0.b), (3.0, 3.0));
        let tiny = constant_b_closed_form(1.0, 1.0, 1e-12);
        assert!((tiny.a - 0.5).abs() < 1e-12);
    }

    #[test]
    fn float_identities() {
        for &(e, b, t) in &[(1.0, 1.0, 0.1), (0.7, -2.3, 0.4), (2.0, 0.5, -1.7)] {
            let g = constant_b_closed_form(e, b, t);
            assert!((g.a + g.b - e * b).abs() < 1e-14);
            assert!((g.a - g.b - g.a * g.b * t).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_identities() {
        let [sum, diff] = exact_closed_form_identities(&q(3, 2), &q(-2, 3), &q(1, 7)).unwrap();
        assert!(sum.is_zero() && diff.is_zero());
        assert!(exact_closed_form_identities(&q(1, 1), &q(1, 1), &q(0, 1)).is_none());
        let (a, _) = exact_closed_form(&q(1, 1), &q(2, 1), &q(1, 1)).unwrap();
        assert!((a.to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn orientation_is_resolved() {
        assert_eq!(
            resolve_orientation(&q(1, 1), &q(1, 1), &q(1, 10)).unwrap(),
            Orientation::Reversed
        );
        assert_eq!(
            resolve_orientation(&q(2, 1), &q(-3, 1), &q(-1, 3)).unwrap(),
            Orientation::Reversed
        );
        assert!(matches!(
            resolve_orientation(&q(1, 1), &q(1, 1), &q(0, 1)),
            Err(GaugeError::OrientationUndetermined(_))
        ));
    }

    #[test]
    fn total_derivative_on_test_curves() {
        let g = constant_b_closed_form(1.0, 1.0, 0.1);
        for curve in [TestCurve::circle(1.0, 1000), TestCurve::lissajous(2000)] {
            let r = boundary_term_check(&g, &curve).unwrap();
            assert!(r.residual < 1e-9, "{r:?}");
            assert!(r.quoted_lambda_residual > 1e-3);
        }
    }

    #[test]
    fn wrong_orientation_is_not_a_total_derivative() {
        let g = constant_b_closed_form(1.0, 1.0, 0.3).with_orientation(Orientation::Aligned);
        let r = boundary_term_check(&g, &TestCurve::lissajous(1000)).unwrap();
        assert!(r.residual > 1e-4);
    }

    #[test]
    fn trivial_cases() {
        let c = TestCurve::circle(0.5, 64);
        let r = boundary_term_check(&constant_b_closed_form(1.0, 2.0, 0.0), &c).unwrap();
        assert!(r.residual < 1e-12);
        let id = ConstantBGauge::identity(1.0, 2.0, 0.4);
        let r = boundary_term_check(&id, &c).unwrap();
        assert!(r.residual < 1e-12 && id.lambda([1.0, 2.0, 3.0, 4.0]) == 0.0);
        assert!(matches!(
            boundary_term_check(&id, &TestCurve::circle(1.0, 8)),
            Err(GaugeError::CurveTooCoarse { samples: 8 })
        ));
    }
}
