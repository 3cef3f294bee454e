//! Phase-space bracket structures over `(x¹..xⁿ, p₁..pₙ)`.
//!
//! Two kinds share one interface: the canonical noncommutative structure
//! `{x^i,x^j} = θ^{ij}, {x^i,p_j} = δ^i_j, {p_i,p_j} = 0`, and the Dirac
//! structure of the alternative coupling, where every entry carries the
//! factor `d = 1 − eθB(x)`.

use thiserror::Error;

use crate::polyalg::{Coeff, PolyError, Polynomial, ThetaMatrix};

/// Threshold below which `|d|` counts as singular.
pub const SINGULAR_D: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("Duval-Horvathy brackets need n = 2, got n = {0}")]
    PlanarOnly(usize),
    #[error(
        "non-constant magnetic field makes the bracket non-polynomial; use pointwise evaluation"
    )]
    NonPolynomial,
    #[error("bracket structure is singular: d = {d:e}")]
    Singular { d: f64 },
    #[error("operation requires a Duval-Horvathy structure")]
    WrongKind,
}

/// Position and canonical momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState<C> {
    pub x: Vec<C>,
    pub p: Vec<C>,
}

impl<C: Coeff> PhaseState<C> {
    pub fn new(x: Vec<C>, p: Vec<C>) -> Result<Self, StructureError> {
        if x.len() != p.len() {
            return Err(PolyError::DimensionMismatch {
                expected: x.len(),
                found: p.len(),
            }
            .into());
        }
        Ok(Self { x, p })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Flattened `(x, p)` vector.
    pub fn to_vec(&self) -> Vec<C> {
        self.x.iter().chain(&self.p).cloned().collect()
    }

    pub fn from_slice(z: &[C]) -> Result<Self, StructureError> {
        if !z.len().is_multiple_of(2) {
            return Err(PolyError::DimensionMismatch {
                expected: z.len() + 1,
                found: z.len(),
            }
            .into());
        }
        let n = z.len() / 2;
        Ok(Self {
            x: z[..n].to_vec(),
            p: z[n..].to_vec(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureKind {
    DeriglazovCanonical,
    DuvalHorvathy,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BracketStructure<C> {
    DeriglazovCanonical {
        theta: ThetaMatrix<C>,
    },
    DuvalHorvathy {
        theta: ThetaMatrix<C>,
        e: C,
        /// Magnetic field over the two position variables.
        b_field: Polynomial<C>,
        theta_scalar: C,
    },
}

impl<C: Coeff> BracketStructure<C> {
    pub fn canonical(theta: ThetaMatrix<C>) -> Self {
        BracketStructure::DeriglazovCanonical { theta }
    }

    pub fn duval_horvathy(
        theta: ThetaMatrix<C>,
        e: C,
        b_field: Polynomial<C>,
        theta_scalar: C,
    ) -> Result<Self, StructureError> {
        if theta.dim() != 2 {
            return Err(StructureError::PlanarOnly(theta.dim()));
        }
        if b_field.nvars() != 2 {
            return Err(PolyError::DimensionMismatch {
                expected: 2,
                found: b_field.nvars(),
            }
            .into());
        }
        Ok(BracketStructure::DuvalHorvathy {
            theta,
            e,
            b_field,
            theta_scalar,
        })
    }

    /// Planar Duval-Horvathy structure with `θ^{12} = θ` and constant `B`.
    pub fn duval_horvathy_constant(e: C, b: C, theta: C) -> Self {
        BracketStructure::DuvalHorvathy {
            theta: ThetaMatrix::planar(theta.clone()),
            e,
            b_field: Polynomial::constant(2, b),
            theta_scalar: theta,
        }
    }

    pub fn kind(&self) -> StructureKind {
        match self {
            BracketStructure::DeriglazovCanonical { .. } => StructureKind::DeriglazovCanonical,
            BracketStructure::DuvalHorvathy { .. } => StructureKind::DuvalHorvathy,
        }
    }

    pub fn theta(&self) -> &ThetaMatrix<C> {
        match self {
            BracketStructure::DeriglazovCanonical { theta }
            | BracketStructure::DuvalHorvathy { theta, .. } => theta,
        }
    }

    pub fn dim(&self) -> usize {
        self.theta().dim()
    }

    pub fn to_f64(&self) -> BracketStructure<f64> {
        match self {
            BracketStructure::DeriglazovCanonical { theta } => {
                BracketStructure::DeriglazovCanonical {
                    theta: theta.to_f64(),
                }
            }
            BracketStructure::DuvalHorvathy {
                theta,
                e,
                b_field,
                theta_scalar,
            } => BracketStructure::DuvalHorvathy {
                theta: theta.to_f64(),
                e: e.to_f64(),
                b_field: b_field.to_f64(),
                theta_scalar: theta_scalar.to_f64(),
            },
        }
    }

    /// `d(x) = 1 − eθB(x)` as a position polynomial; `None` for the
    /// canonical kind.
    pub fn d_factor(&self) -> Option<Polynomial<C>> {
        match self {
            BracketStructure::DeriglazovCanonical { .. } => None,
            BracketStructure::DuvalHorvathy {
                e,
                b_field,
                theta_scalar,
                ..
            } => {
                let coupling = e.clone() * theta_scalar.clone();
                Some(Polynomial::one(2) - b_field.scale(&coupling))
            }
        }
    }

    /// Bracket matrix with the `d` factor pulled out: `Ω = d · base`.
    fn base_matrix(&self) -> Vec<Vec<C>> {
        let n = self.dim();
        let mut omega = vec![vec![C::zero(); 2 * n]; 2 * n];
        let theta = self.theta();
        for i in 0..n {
            for j in 0..n {
                omega[i][j] = theta.get(i, j).clone();
            }
            omega[i][n + i] = C::one();
            omega[n + i][i] = -C::one();
        }
        if let BracketStructure::DuvalHorvathy { e, .. } = self {
            // {p_1, p_2} = eBd; B and d are applied by the callers.
            omega[n][n + 1] = e.clone();
            omega[n + 1][n] = -e.clone();
        }
        omega
    }

    /// Constant bracket matrix `Ω^{ab}` over the 2n phase variables; fails
    /// for a non-constant magnetic field.
    pub fn constant_matrix(&self) -> Result<Vec<Vec<C>>, StructureError> {
        let mut omega = self.base_matrix();
        if let BracketStructure::DuvalHorvathy { b_field, .. } = self {
            if !b_field.is_constant() {
                return Err(StructureError::NonPolynomial);
            }
            let b = b_field.constant_term();
            let d = self.d_factor().expect("dh kind").constant_term();
            omega[2][3] = omega[2][3].clone() * b.clone();
            omega[3][2] = omega[3][2].clone() * b;
            for row in omega.iter_mut() {
                for v in row.iter_mut() {
                    *v = v.clone() * d.clone();
                }
            }
        }
        Ok(omega)
    }

    /// Bracket matrix at a phase point, valid for any field profile.
    pub fn matrix_at(&self, z: &[f64]) -> Result<Vec<Vec<f64>>, StructureError> {
        let n = self.dim();
        if z.len() != 2 * n {
            return Err(PolyError::DimensionMismatch {
                expected: 2 * n,
                found: z.len(),
            }
            .into());
        }
        let mut omega: Vec<Vec<f64>> = self
            .base_matrix()
            .iter()
            .map(|r| r.iter().map(|v| v.to_f64()).collect())
            .collect();
        if let BracketStructure::DuvalHorvathy { b_field, .. } = self {
            let b = b_field.eval_f64(&z[..n])?;
            let d = self.d_factor().expect("dh kind").eval_f64(&z[..n])?;
            if d.abs() < SINGULAR_D {
                return Err(StructureError::Singular { d });
            }
            omega[2][3] *= b;
            omega[3][2] *= b;
            for v in omega.iter_mut().flatten() {
                *v *= d;
            }
        }
        Ok(omega)
    }
}

/// `{F, G} = Σ ∂_a F · Ω^{ab} · ∂_b G` over the phase variables.
pub fn phase_bracket<C: Coeff>(
    f: &Polynomial<C>,
    g: &Polynomial<C>,
    s: &BracketStructure<C>,
) -> Result<Polynomial<C>, StructureError> {
    let nn = 2 * s.dim();
    for p in [f, g] {
        if p.nvars() != nn {
            return Err(PolyError::DimensionMismatch {
                expected: nn,
                found: p.nvars(),
            }
            .into());
        }
    }
    let omega = s.constant_matrix()?;
    let df = f.gradient();
    let dg = g.gradient();
    let mut out = Polynomial::zero(nn);
    for a in 0..nn {
        if df[a].is_zero() {
            continue;
        }
        for b in 0..nn {
            if omega[a][b].is_zero() || dg[b].is_zero() {
                continue;
            }
            out += &df[a].mul(&dg[b])?.scale(&omega[a][b]);
        }
    }
    Ok(out)
}

/// Value of `d = 1 − eθB` at a position; `Singular` when `|d| < 1e-12`.
pub fn singularity_check<C: Coeff>(
    s: &BracketStructure<C>,
    position: &[C],
) -> Result<C, StructureError> {
    let d = s.d_factor().ok_or(StructureError::WrongKind)?;
    let value = d.eval(position)?;
    if value.abs_f64() < SINGULAR_D {
        return Err(StructureError::Singular { d: value.to_f64() });
    }
    Ok(value)
}

/// Phase coordinate polynomial: `x^i` for `i < n`, `p_{i-n}` otherwise.
pub fn phase_var<C: Coeff>(n: usize, index: usize) -> Polynomial<C> {
    Polynomial::var(2 * n, index).expect("phase index in range")
}

/// Lift a position polynomial (n variables) to the 2n phase variables.
pub fn lift_position<C: Coeff>(p: &Polynomial<C>) -> Result<Polynomial<C>, PolyError> {
    p.extend(2 * p.nvars())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn canonical_table() {
        let s = BracketStructure::canonical(ThetaMatrix::planar(q(1, 3)));
        let v = |i| phase_var::<Rational>(2, i);
        let one = Polynomial::one(4);
        assert_eq!(phase_bracket(&v(0), &v(2), &s).unwrap(), one);
        assert!(phase_bracket(&v(2), &v(3), &s).unwrap().is_zero());
        assert_eq!(
            phase_bracket(&v(0), &v(1), &s).unwrap(),
            Polynomial::constant(4, q(1, 3))
        );
        assert_eq!(phase_bracket(&v(2), &v(0), &s).unwrap(), -one);
    }

    #[test]
    fn dh_constant_b_table() {
        let (e, b, th) = (q(2, 1), q(3, 1), q(1, 10));
        let s = BracketStructure::duval_horvathy_constant(e.clone(), b.clone(), th.clone());
        let d = q(1, 1) - e.clone() * th.clone() * b.clone();
        assert_eq!(d, q(2, 5));
        let v = |i| phase_var::<Rational>(2, i);
        let c = |x: Rational| Polynomial::constant(4, x);
        assert_eq!(phase_bracket(&v(0), &v(1), &s).unwrap(), c(th * d.clone()));
        assert_eq!(phase_bracket(&v(0), &v(2), &s).unwrap(), c(d.clone()));
        assert!(phase_bracket(&v(0), &v(3), &s).unwrap().is_zero());
        assert_eq!(phase_bracket(&v(2), &v(3), &s).unwrap(), c(e * b * d));
    }

    #[test]
    fn dh_non_constant_b_is_pointwise_only() {
        let b = Polynomial::var(2, 0).unwrap();
        let s = BracketStructure::duval_horvathy(ThetaMatrix::planar(q(1, 2)), q(1, 1), b, q(1, 2))
            .unwrap();
        let v = |i| phase_var::<Rational>(2, i);
        assert!(matches!(
            phase_bracket(&v(0), &v(1), &s),
            Err(StructureError::NonPolynomial)
        ));
        let omega = s.matrix_at(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        // d = 1 - 0.5 * 1 = 0.5; {p1,p2} = eBd = 0.5
        assert!((omega[0][2] - 0.5).abs() < 1e-15);
        assert!((omega[2][3] - 0.5).abs() < 1e-15);
        assert!(matches!(
            s.matrix_at(&[2.0, 0.0, 0.0, 0.0]),
            Err(StructureError::Singular { .. })
        ));
    }

    #[test]
    fn singularity_values() {
        let forced = BracketStructure::duval_horvathy_constant(q(1, 1), q(1, 1), q(1, 1));
        assert!(matches!(
            singularity_check(&forced, &[q(0, 1), q(0, 1)]),
            Err(StructureError::Singular { .. })
        ));
        let commutative = BracketStructure::duval_horvathy_constant(q(1, 1), q(7, 1), q(0, 1));
        assert_eq!(
            singularity_check(&commutative, &[q(0, 1), q(0, 1)]).unwrap(),
            q(1, 1)
        );
        let half = BracketStructure::duval_horvathy_constant(1.0, 1.0, 0.5);
        assert_eq!(singularity_check(&half, &[0.0, 0.0]).unwrap(), 0.5);
        let canonical = BracketStructure::canonical(ThetaMatrix::planar(q(1, 1)));
        assert!(matches!(
            singularity_check(&canonical, &[q(0, 1), q(0, 1)]),
            Err(StructureError::WrongKind)
        ));
    }

    #[test]
    fn planar_only() {
        let th = ThetaMatrix::<Rational>::zero(3);
        assert!(matches!(
            BracketStructure::duval_horvathy(th, q(1, 1), Polynomial::zero(2), q(0, 1)),
            Err(StructureError::PlanarOnly(3))
        ));
    }
}
