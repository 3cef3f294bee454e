use std::sync::Arc;

use crate::gauge::FieldConfig;
use crate::polyalg::linalg::{invert, solve};
use crate::polyalg::{Coeff, PolyError, Polynomial, ThetaMatrix};
use crate::structure::{lift_position, BracketStructure, StructureError};

use super::{DynamicsError, EomKind, EquationsOfMotion};

fn eval_all(polys: &[Polynomial<f64>], z: &[f64]) -> Result<Vec<f64>, PolyError> {
    polys.iter().map(|p| p.eval_f64(z)).collect()
}

/// `Σ_b Ω^{ab} ∂_b H` for a constant bracket matrix.
fn bracket_flow<C: Coeff>(
    omega: &[Vec<C>],
    h: &Polynomial<C>,
) -> Result<Vec<Polynomial<C>>, PolyError> {
    let grad = h.gradient();
    let mut out = Vec::with_capacity(omega.len());
    for row in omega {
        let mut acc = Polynomial::zero(h.nvars());
        for (w, g) in row.iter().zip(&grad) {
            if !w.is_zero() {
                acc += &g.scale(w);
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// `ż = {z, H}` for an arbitrary phase-space function `H` over `(x, p)`.
///
/// The numeric right-hand side multiplies the pointwise bracket matrix with
/// `∇H`, so it also covers field-dependent structures; the symbolic one is
/// present whenever the bracket matrix is constant.
pub fn hamiltonian_flow<C: Coeff>(
    h: &Polynomial<C>,
    s: &BracketStructure<C>,
) -> Result<EquationsOfMotion<C>, DynamicsError> {
    let n = s.dim();
    if h.nvars() != 2 * n {
        return Err(PolyError::DimensionMismatch {
            expected: 2 * n,
            found: h.nvars(),
        }
        .into());
    }
    let symbolic = match s.constant_matrix() {
        Ok(omega) => Some(bracket_flow(&omega, h)?),
        Err(StructureError::NonPolynomial) => None,
        Err(e) => return Err(e.into()),
    };
    let grad: Vec<Polynomial<f64>> = h.to_f64().gradient();
    let structure = s.clone();
    let rhs = move |z: &[f64]| -> Result<Vec<f64>, DynamicsError> {
        let omega = structure.matrix_at(z)?;
        let g = eval_all(&grad, z)?;
        Ok(omega
            .iter()
            .map(|row| row.iter().zip(&g).map(|(w, d)| w * d).sum())
            .collect())
    };
    let mut eom = EquationsOfMotion::new(EomKind::FirstOrderPhase, n, Arc::new(rhs));
    eom.symbolic_rhs = symbolic;
    Ok(eom)
}

/// `ż = {z, H}` with `H = ½(p − eA)² + eφ`.
pub fn hamiltonian_rhs<C: Coeff>(
    fc: &FieldConfig<C>,
    s: &BracketStructure<C>,
) -> Result<EquationsOfMotion<C>, DynamicsError> {
    if fc.dim() != s.dim() {
        return Err(PolyError::DimensionMismatch {
            expected: s.dim(),
            found: fc.dim(),
        }
        .into());
    }
    let mut eom = hamiltonian_flow(&fc.hamiltonian()?, s)?;
    eom.kinetic_momentum = Some(fc.kinetic_momenta()?);
    Ok(eom)
}

/// `G^i_k(x) = δ^i_k − e θ^{ij} ∂_j A_k` and `w^i(x) = e θ^{ij} ∂_j φ`, so
/// that `ẋ = G π + w`.
fn velocity_map<C: Coeff>(
    fc: &FieldConfig<C>,
    theta: &ThetaMatrix<C>,
) -> Result<(Vec<Vec<Polynomial<C>>>, Vec<Polynomial<C>>), PolyError> {
    let n = fc.dim();
    let mut g = vec![vec![Polynomial::zero(n); n]; n];
    let mut w = vec![Polynomial::zero(n); n];
    for i in 0..n {
        for (k, gik) in g[i].iter_mut().enumerate() {
            let mut acc = if i == k {
                Polynomial::one(n)
            } else {
                Polynomial::zero(n)
            };
            for j in 0..n {
                let t = theta.get(i, j);
                if !t.is_zero() {
                    acc -= &fc.a[k].diff(j)?.scale(&(t.clone() * fc.e.clone()));
                }
            }
            *gik = acc;
        }
        for j in 0..n {
            let t = theta.get(i, j);
            if !t.is_zero() {
                w[i] += &fc.phi.diff(j)?.scale(&(t.clone() * fc.e.clone()));
            }
        }
    }
    Ok((g, w))
}

/// Second-order equations `ẍ(x, ẋ)` for the canonical structure, obtained
/// by solving `ẋ = G π + w` for `π` at each evaluation point.
///
/// When `A` is linear and `φ` at most quadratic, `G` is constant and the
/// exact polynomial form over `(x, ẋ)` is attached as `symbolic_rhs`.
pub fn lorentz_rhs<C: Coeff>(
    fc: &FieldConfig<C>,
    theta: &ThetaMatrix<C>,
) -> Result<EquationsOfMotion<C>, DynamicsError> {
    let n = theta.dim();
    if fc.dim() != n {
        return Err(PolyError::DimensionMismatch {
            expected: n,
            found: fc.dim(),
        }
        .into());
    }
    let s = BracketStructure::canonical(theta.clone());
    let h = fc.hamiltonian()?;
    let zdot = bracket_flow(&s.constant_matrix()?, &h)?;
    // ẍ^i = Σ_a ∂_a ẋ^i(z) ż_a along the phase flow
    let mut accel = Vec::with_capacity(n);
    for xi_dot in &zdot[..n] {
        let mut acc = Polynomial::zero(2 * n);
        for (a, za) in zdot.iter().enumerate() {
            let d = xi_dot.diff(a)?;
            if !d.is_zero() {
                acc += &d.mul(za)?;
            }
        }
        accel.push(acc);
    }
    let (g, w) = velocity_map(fc, theta)?;

    let symbolic = if fc.is_linear_vector_potential() && fc.phi.total_degree() <= 2 {
        Some(symbolic_second_order(fc, &g, &w, &accel)?)
    } else {
        None
    };

    let g_f: Vec<Vec<Polynomial<f64>>> = g
        .iter()
        .map(|r| r.iter().map(Polynomial::to_f64).collect())
        .collect();
    let w_f: Vec<Polynomial<f64>> = w.iter().map(Polynomial::to_f64).collect();
    let a_f: Vec<Polynomial<f64>> = fc.a.iter().map(Polynomial::to_f64).collect();
    let accel_f: Vec<Polynomial<f64>> = accel.iter().map(Polynomial::to_f64).collect();
    let e = fc.e.to_f64();
    let rhs = move |state: &[f64]| -> Result<Vec<f64>, DynamicsError> {
        let (x, v) = state.split_at(n);
        let gm: Vec<Vec<f64>> = g_f
            .iter()
            .map(|r| r.iter().map(|p| p.eval_f64(x)).collect())
            .collect::<Result<_, _>>()?;
        let wv = eval_all(&w_f, x)?;
        let b: Vec<f64> = v.iter().zip(&wv).map(|(vi, wi)| vi - wi).collect();
        let (pi, _) = solve(&gm, &b).map_err(|err| match err {
            PolyError::Singular { det } => DynamicsError::SingularG {
                state: state.to_vec(),
                det,
            },
            other => other.into(),
        })?;
        let mut z = x.to_vec();
        for (pk, ak) in pi.iter().zip(&a_f) {
            z.push(pk + e * ak.eval_f64(x)?);
        }
        let mut out = v.to_vec();
        out.extend(eval_all(&accel_f, &z)?);
        Ok(out)
    };
    let mut eom = EquationsOfMotion::new(EomKind::SecondOrderConfig, n, Arc::new(rhs));
    eom.symbolic_rhs = symbolic;
    eom.kinetic_momentum = Some(fc.kinetic_momenta()?);
    Ok(eom)
}

/// Exact `(ẋ, ẍ)` over `(x, v)` for constant `G`.
fn symbolic_second_order<C: Coeff>(
    fc: &FieldConfig<C>,
    g: &[Vec<Polynomial<C>>],
    w: &[Polynomial<C>],
    accel: &[Polynomial<C>],
) -> Result<Vec<Polynomial<C>>, DynamicsError> {
    let n = fc.dim();
    let gc: Vec<Vec<C>> = g
        .iter()
        .map(|r| r.iter().map(Polynomial::constant_term).collect())
        .collect();
    let ginv = invert(&gc).map_err(|err| match err {
        PolyError::Singular { det } => DynamicsError::SingularG {
            state: Vec::new(),
            det,
        },
        other => other.into(),
    })?;
    let xv = |i: usize| Polynomial::var(2 * n, i);
    let mut subs = Vec::with_capacity(2 * n);
    for i in 0..n {
        subs.push(xv(i)?);
    }
    for (i, row) in ginv.iter().enumerate() {
        // p_i = π_i(x, v) + eA_i(x)
        let mut p = lift_position(&fc.a[i])?.scale(&fc.e);
        for (k, c) in row.iter().enumerate() {
            if !c.is_zero() {
                p += &(xv(n + k)? - lift_position(&w[k])?).scale(c);
            }
        }
        subs.push(p);
    }
    let mut out: Vec<Polynomial<C>> = (n..2 * n).map(xv).collect::<Result<_, _>>()?;
    for a in accel {
        out.push(a.compose(&subs)?);
    }
    Ok(out)
}
