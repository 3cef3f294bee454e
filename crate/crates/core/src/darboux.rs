//! Darboux coordinates `q = x + ½θp`, elimination of momenta and the
//! second-order Lagrangian with its energy.
//!
//! Polynomials over `(q, q̇)` use variables `0..n` for `q` and `n..2n` for
//! `q̇`. θ-graded intermediate results append a marker variable λ.

use std::sync::Arc;

use thiserror::Error;

use crate::dynamics::{DynamicsError, EomKind, EquationsOfMotion};
use crate::gauge::{FieldConfig, GradedPolynomial};
use crate::polyalg::linalg::{invert, solve};
use crate::polyalg::{Coeff, PolyError, Polynomial, ThetaMatrix};
use crate::structure::{lift_position, phase_var, PhaseState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DarbouxError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("exact elimination needs a linear vector potential and an at most quadratic scalar potential")]
    NotQuadratic,
    #[error("velocity-momentum system is singular (det = {det:e})")]
    SingularVelocityMap { det: f64 },
    #[error("kinetic mass matrix is singular (det = {det:e})")]
    SingularMass { det: f64 },
    #[error("perturbative elimination did not settle")]
    NotConverged,
}

impl From<DarbouxError> for DynamicsError {
    fn from(e: DarbouxError) -> Self {
        match e {
            DarbouxError::Poly(p) => DynamicsError::Poly(p),
            DarbouxError::SingularMass { det } | DarbouxError::SingularVelocityMap { det } => {
                DynamicsError::SingularG {
                    state: Vec::new(),
                    det,
                }
            }
            other => DynamicsError::InvalidConfig(other.to_string()),
        }
    }
}

/// `q^i = x^i + ½ θ^{ij} p_j`.
pub fn to_darboux<C: Coeff>(
    state: &PhaseState<C>,
    theta: &ThetaMatrix<C>,
) -> Result<Vec<C>, PolyError> {
    let n = state.dim();
    if theta.dim() != n {
        return Err(PolyError::DimensionMismatch {
            expected: n,
            found: theta.dim(),
        });
    }
    let half = C::one() / C::from_i64(2);
    Ok((0..n)
        .map(|i| {
            let shift = (0..n).fold(C::zero(), |acc, j| {
                acc + theta.get(i, j).clone() * state.p[j].clone()
            });
            state.x[i].clone() + half.clone() * shift
        })
        .collect())
}

/// `q^i` as polynomials over the phase variables `(x, p)`.
pub fn darboux_coordinates<C: Coeff>(theta: &ThetaMatrix<C>) -> Vec<Polynomial<C>> {
    let n = theta.dim();
    let half = C::one() / C::from_i64(2);
    (0..n)
        .map(|i| {
            let mut q = phase_var(n, i);
            for j in 0..n {
                let t = theta.get(i, j);
                if !t.is_zero() {
                    q += &phase_var(n, n + j).scale(&(t.clone() * half.clone()));
                }
            }
            q
        })
        .collect()
}

/// `x^i = q^i − ½ s θ^{ij} p_j` over `nvars` variables, with `p_j` at
/// `p_offset + j` and `s` an optional extra factor variable.
fn position_subs<C: Coeff>(
    theta: &ThetaMatrix<C>,
    nvars: usize,
    p_offset: usize,
    marker: Option<usize>,
) -> Result<Vec<Polynomial<C>>, PolyError> {
    let n = theta.dim();
    let half = C::one() / C::from_i64(2);
    let factor = match marker {
        Some(m) => Polynomial::var(nvars, m)?,
        None => Polynomial::one(nvars),
    };
    (0..n)
        .map(|i| {
            let mut x = Polynomial::var(nvars, i)?;
            for j in 0..n {
                let t = theta.get(i, j);
                if !t.is_zero() {
                    x -= &Polynomial::var(nvars, p_offset + j)?
                        .mul(&factor)?
                        .scale(&(t.clone() * half.clone()));
                }
            }
            Ok(x)
        })
        .collect()
}

/// `H̃(q, p) = H(q − ½θp, p)` over `(q, p)`.
pub fn darboux_hamiltonian<C: Coeff>(
    fc: &FieldConfig<C>,
    theta: &ThetaMatrix<C>,
) -> Result<Polynomial<C>, PolyError> {
    let n = theta.dim();
    let mut subs = position_subs(theta, 2 * n, n, None)?;
    subs.extend((n..2 * n).map(|j| phase_var(n, j)));
    fc.hamiltonian()?.compose(&subs)
}

/// `H(q − ½λθp, p)` over `(q, p, λ)`, truncated above λ-degree `order`.
fn graded_darboux_hamiltonian<C: Coeff>(
    fc: &FieldConfig<C>,
    theta: &ThetaMatrix<C>,
    order: u32,
) -> Result<Polynomial<C>, PolyError> {
    let n = theta.dim();
    let nv = 2 * n + 1;
    let mut subs = position_subs(theta, nv, n, Some(2 * n))?;
    for j in n..nv {
        subs.push(Polynomial::var(nv, j)?);
    }
    fc.hamiltonian()?
        .extend(nv)?
        .compose_truncated(&subs, 2 * n, order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EliminationMode {
    /// Exact linear solve; needs linear `A` and at most quadratic `φ`.
    ExactQuadratic,
    /// Solution through first order in θ.
    PerturbativeFirstOrder,
}

/// Momenta as functions of `(q, q̇)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumSolution<C> {
    pub mode: EliminationMode,
    pub p_of_qv: Vec<Polynomial<C>>,
    /// Perturbative mode: the same over `(q, q̇, λ)`, θ-order in λ.
    pub graded: Option<Vec<Polynomial<C>>>,
}

fn require_quadratic<C: Coeff>(fc: &FieldConfig<C>) -> Result<(), DarbouxError> {
    if fc.is_linear_vector_potential() && fc.phi.total_degree() <= 2 {
        Ok(())
    } else {
        Err(DarbouxError::NotQuadratic)
    }
}

/// Solve `q̇^i = ∂H̃/∂p_i` for the momenta.
pub fn eliminate_momenta<C: Coeff>(
    fc: &FieldConfig<C>,
    theta: &ThetaMatrix<C>,
    mode: EliminationMode,
) -> Result<MomentumSolution<C>, DarbouxError> {
    let n = theta.dim();
    if fc.dim() != n {
        return Err(PolyError::DimensionMismatch {
            expected: n,
            found: fc.dim(),
        }
        .into());
    }
    match mode {
        EliminationMode::ExactQuadratic => {
            require_quadratic(fc)?;
            let ht = darboux_hamiltonian(fc, theta)?;
            // ∂H̃/∂p = M p + N(q), M constant
            let mut m = vec![vec![C::zero(); n]; n];
            let mut rest = Vec::with_capacity(n);
            for (l, row) in m.iter_mut().enumerate() {
                let dl = ht.diff(n + l)?;
                for (k, mk) in row.iter_mut().enumerate() {
                    *mk = dl.diff(n + k)?.constant_term();
                }
                let mut at_zero = dl;
                for k in 0..n {
                    at_zero = at_zero.substitute_value(n + k, &C::zero())?;
                }
                rest.push(at_zero);
            }
            let minv = invert(&m).map_err(|err| match err {
                PolyError::Singular { det } => DarbouxError::SingularVelocityMap { det },
                other => other.into(),
            })?;
            let mut p = Vec::with_capacity(n);
            for row in &minv {
                let mut acc = Polynomial::zero(2 * n);
                for (k, c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        acc += &(Polynomial::var(2 * n, n + k)? - rest[k].clone()).scale(c);
                    }
                }
                p.push(acc);
            }
            Ok(MomentumSolution {
                mode,
                p_of_qv: p,
                graded: None,
            })
        }
        EliminationMode::PerturbativeFirstOrder => {
            let nv = 2 * n + 1;
            let lam = 2 * n;
            let ht = graded_darboux_hamiltonian(fc, theta, 1)?;
            let dp: Vec<Polynomial<C>> =
                (0..n).map(|l| ht.diff(n + l)).collect::<Result<_, _>>()?;
            // start from the commutative solution p = q̇ + eA(q)
            let mut p: Vec<Polynomial<C>> = (0..n)
                .map(|i| Ok(Polynomial::var(nv, n + i)? + fc.a[i].extend(nv)?.scale(&fc.e)))
                .collect::<Result<_, PolyError>>()?;
            let mut settled = false;
            for _ in 0..4 {
                let mut subs: Vec<Polynomial<C>> = (0..n)
                    .map(|i| Polynomial::var(nv, i))
                    .collect::<Result<_, _>>()?;
                subs.extend(p.iter().cloned());
                subs.push(Polynomial::var(nv, lam)?);
                let mut changed = false;
                for (l, pl) in p.iter_mut().enumerate() {
                    let err =
                        Polynomial::var(nv, n + l)? - dp[l].compose_truncated(&subs, lam, 1)?;
                    if !err.is_zero() {
                        changed = true;
                        *pl += &err;
                    }
                }
                if !changed {
                    settled = true;
                    break;
                }
            }
            if !settled {
                return Err(DarbouxError::NotConverged);
            }
            let flat = p
                .iter()
                .map(|pi| pi.substitute_value(lam, &C::one())?.restrict(2 * n))
                .collect::<Result<_, _>>()?;
            Ok(MomentumSolution {
                mode,
                p_of_qv: flat,
                graded: Some(p),
            })
        }
    }
}

/// `∂H̃/∂p_i(q, p(q, q̇)) − q̇^i`, θ-graded over `(q, q̇, λ)`. Exact solutions
/// give zero; first-order ones leave only λ-degree ≥ 2.
pub fn momentum_residual<C: Coeff>(
    fc: &FieldConfig<C>,
    theta: &ThetaMatrix<C>,
    sol: &MomentumSolution<C>,
) -> Result<Vec<GradedPolynomial<C>>, DarbouxError> {
    let n = theta.dim();
    let nv = 2 * n + 1;
    let lam = 2 * n;
    let (ht, p) = match &sol.graded {
        Some(g) => (graded_darboux_hamiltonian(fc, theta, 4)?, g.clone()),
        None => {
            let map: Vec<usize> = (0..2 * n).collect();
            let ht = darboux_hamiltonian(fc, theta)?.embed(nv, &map)?;
            let p = sol
                .p_of_qv
                .iter()
                .map(|pi| pi.embed(nv, &map))
                .collect::<Result<Vec<_>, _>>()?;
            (ht, p)
        }
    };
    let mut subs: Vec<Polynomial<C>> = (0..n)
        .map(|i| Polynomial::var(nv, i))
        .collect::<Result<_, _>>()?;
    subs.extend(p);
    subs.push(Polynomial::var(nv, lam)?);
    (0..n)
        .map(|l| {
            let r = ht.diff(n + l)?.compose(&subs)? - Polynomial::var(nv, n + l)?;
            Ok(GradedPolynomial { poly: r })
        })
        .collect()
}

/// Momenta through first order in the form quoted in the literature:
/// `p_i = q̇_i + eA_i − e∂_jA_i θ^{jk}(q̇_k + eA_k) + eθ^{ij}∂_jφ + eθ^{ij}∂_jA_k q̇_k`.
pub fn quoted_first_order_momenta<C: Coeff>(
    fc: &FieldConfig<C>,
    theta: &ThetaMatrix<C>,
) -> Result<Vec<Polynomial<C>>, PolyError> {
    let n = theta.dim();
    let e = &fc.e;
    let lift = |p: &Polynomial<C>| p.extend(2 * n);
    let v = |k: usize| Polynomial::var(2 * n, n + k);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut p = v(i)? + lift(&fc.a[i])?.scale(e);
        for j in 0..n {
            for k in 0..n {
                let t = theta.get(j, k);
                if !t.is_zero() {
                    let vk_plus = v(k)? + lift(&fc.a[k])?.scale(e);
                    p -= &lift(&fc.a[i].diff(j)?)?
                        .mul(&vk_plus)?
                        .scale(&(e.clone() * t.clone()));
                }
            }
            let t = theta.get(i, j);
            if !t.is_zero() {
                let et = e.clone() * t.clone();
                p += &lift(&fc.phi.diff(j)?)?.scale(&et);
                for k in 0..n {
                    p += &lift(&fc.a[k].diff(j)?)?.mul(&v(k)?)?.scale(&et);
                }
            }
        }
        out.push(p);
    }
    Ok(out)
}

/// First-order Lagrangian as quoted in the literature:
/// `½q̇² + eA·q̇ − eφ − e q̇^i ∂_jA_i θ^{jk}(q̇_k + eA_k) − e²∂_iφ θ^{ij} A_j`.
pub fn quoted_first_order_lagrangian<C: Coeff>(
    fc: &FieldConfig<C>,
    theta: &ThetaMatrix<C>,
) -> Result<Polynomial<C>, PolyError> {
    let n = theta.dim();
    let e = &fc.e;
    let lift = |p: &Polynomial<C>| p.extend(2 * n);
    let v = |k: usize| Polynomial::var(2 * n, n + k);
    let half = C::one() / C::from_i64(2);
    let mut l = lift(&fc.phi)?.scale(&-e.clone());
    for i in 0..n {
        l += &v(i)?.mul(&v(i)?)?.scale(&half);
        l += &lift(&fc.a[i])?.mul(&v(i)?)?.scale(e);
        for j in 0..n {
            for k in 0..n {
                let t = theta.get(j, k);
                if t.is_zero() {
                    continue;
                }
                let vk_plus = v(k)? + lift(&fc.a[k])?.scale(e);
                l -= &v(i)?
                    .mul(&lift(&fc.a[i].diff(j)?)?)?
                    .mul(&vk_plus)?
                    .scale(&(e.clone() * t.clone()));
            }
            let t = theta.get(i, j);
            if !t.is_zero() {
                l -= &lift(&fc.phi.diff(i)?)?
                    .mul(&lift(&fc.a[j])?)?
                    .scale(&(e.clone() * e.clone() * t.clone()));
            }
        }
    }
    Ok(l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    FirstOrder,
}

/// Second-order Lagrangian `L(q, q̇)` and its energy.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianModel<C> {
    pub n: usize,
    pub lagrangian: Polynomial<C>,
    pub energy: Polynomial<C>,
    pub exactness: Exactness,
    /// Coefficient of `q̇_x²` when the planar kinetic term is isotropic,
    /// `L = κ q̇² + …`.
    pub kappa: Option<C>,
}

/// `E = q̇·∂L/∂q̇ − L`.
pub fn energy<C: Coeff>(lagrangian: &Polynomial<C>, n: usize) -> Result<Polynomial<C>, PolyError> {
    let mut e = -lagrangian;
    for i in 0..n {
        e += &Polynomial::var(2 * n, n + i)?.mul(&lagrangian.diff(n + i)?)?;
    }
    Ok(e)
}

/// `L = p·q̇ − H̃(q, p)` with the momenta eliminated.
pub fn build_lagrangian<C: Coeff>(
    fc: &FieldConfig<C>,
    theta: &ThetaMatrix<C>,
    mode: EliminationMode,
) -> Result<LagrangianModel<C>, DarbouxError> {
    let n = theta.dim();
    let sol = eliminate_momenta(fc, theta, mode)?;
    let (lagrangian, exactness) = match &sol.graded {
        None => {
            let ht = darboux_hamiltonian(fc, theta)?;
            let mut subs: Vec<Polynomial<C>> = (0..n)
                .map(|i| Polynomial::var(2 * n, i))
                .collect::<Result<_, _>>()?;
            subs.extend(sol.p_of_qv.iter().cloned());
            let mut l = -ht.compose(&subs)?;
            for (i, p) in sol.p_of_qv.iter().enumerate() {
                l += &p.mul(&Polynomial::var(2 * n, n + i)?)?;
            }
            (l, Exactness::Exact)
        }
        Some(graded) => {
            let nv = 2 * n + 1;
            let lam = 2 * n;
            let ht = graded_darboux_hamiltonian(fc, theta, 1)?;
            let mut subs: Vec<Polynomial<C>> = (0..n)
                .map(|i| Polynomial::var(nv, i))
                .collect::<Result<_, _>>()?;
            subs.extend(graded.iter().cloned());
            subs.push(Polynomial::var(nv, lam)?);
            let mut l = -ht.compose_truncated(&subs, lam, 1)?;
            for (i, p) in graded.iter().enumerate() {
                l += &p.mul(&Polynomial::var(nv, n + i)?)?.truncate_degree(lam, 1);
            }
            (
                l.substitute_value(lam, &C::one())?.restrict(2 * n)?,
                Exactness::FirstOrder,
            )
        }
    };
    let energy = energy(&lagrangian, n)?;
    let kappa = isotropic_kinetic_coefficient(&lagrangian, n);
    Ok(LagrangianModel {
        n,
        lagrangian,
        energy,
        exactness,
        kappa,
    })
}

fn isotropic_kinetic_coefficient<C: Coeff>(l: &Polynomial<C>, n: usize) -> Option<C> {
    if n != 2 {
        return None;
    }
    let c = l.coeff(&[0, 0, 2, 0]);
    let iso = c == l.coeff(&[0, 0, 0, 2]) && l.coeff(&[0, 0, 1, 1]).is_zero() && !c.is_zero();
    let quadratic_in_v_is_constant = l.terms().all(|(e, _)| e[2] + e[3] < 2 || e[0] + e[1] == 0);
    (iso && quadratic_in_v_is_constant).then_some(c)
}

/// Planar κ-form `L = κ[q̇² + R (q_x q̇_y − q_y q̇_x) − U q²]`, read off from
/// a model's coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaForm<C> {
    pub kappa: C,
    pub rotation: C,
    pub potential: C,
    /// True when no other terms are present.
    pub complete: bool,
}

pub fn kappa_form<C: Coeff>(model: &LagrangianModel<C>) -> Option<KappaForm<C>> {
    let kappa = model.kappa.clone()?;
    let l = &model.lagrangian;
    let rotation = l.coeff(&[1, 0, 0, 1]) / kappa.clone();
    let potential = -(l.coeff(&[2, 0, 0, 0]) / kappa.clone());
    let mut rebuilt = Polynomial::zero(4);
    let mono = |e: [u32; 4], c: C| Polynomial::monomial(e.to_vec(), c).expect("degree within cap");
    for (e, c) in [
        ([0, 0, 2, 0], kappa.clone()),
        ([0, 0, 0, 2], kappa.clone()),
        ([1, 0, 0, 1], kappa.clone() * rotation.clone()),
        ([0, 1, 1, 0], -(kappa.clone() * rotation.clone())),
        ([2, 0, 0, 0], -(kappa.clone() * potential.clone())),
        ([0, 2, 0, 0], -(kappa.clone() * potential.clone())),
    ] {
        rebuilt += &mono(e, c);
    }
    let complete = rebuilt == *l;
    Some(KappaForm {
        kappa,
        rotation,
        potential,
        complete,
    })
}

/// `κ = (2 + e²B²θ²/8 + eBθ + eω²θ²/2)⁻¹`.
pub fn kappa_closed_form<C: Coeff>(e: &C, b: &C, omega_sq: &C, theta: &C) -> C {
    let ebt = e.clone() * b.clone() * theta.clone();
    let denom = C::from_i64(2)
        + ebt.clone() * ebt.clone() / C::from_i64(8)
        + ebt
        + e.clone() * omega_sq.clone() * theta.clone() * theta.clone() / C::from_i64(2);
    C::one() / denom
}

/// Euler-Lagrange equations `M(q, q̇) q̈ = ∂L/∂q − (∂²L/∂q̇∂q) q̇` as a
/// second-order system over `(q, q̇)`; symbolic when `M` is constant.
pub fn euler_lagrange_rhs<C: Coeff>(
    model: &LagrangianModel<C>,
) -> Result<EquationsOfMotion<C>, DarbouxError> {
    let n = model.n;
    let l = &model.lagrangian;
    let momenta: Vec<Polynomial<C>> = (0..n).map(|i| l.diff(n + i)).collect::<Result<_, _>>()?;
    let mut mass = vec![vec![Polynomial::zero(2 * n); n]; n];
    let mut force = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..n {
            mass[i][j] = momenta[i].diff(n + j)?;
        }
        let mut f = l.diff(i)?;
        for j in 0..n {
            f -= &momenta[i].diff(j)?.mul(&Polynomial::var(2 * n, n + j)?)?;
        }
        force.push(f);
    }
    let constant_mass = mass.iter().flatten().all(Polynomial::is_constant);
    let symbolic = if constant_mass {
        let mc: Vec<Vec<C>> = mass
            .iter()
            .map(|r| r.iter().map(Polynomial::constant_term).collect())
            .collect();
        let minv = invert(&mc).map_err(|err| match err {
            PolyError::Singular { det } => DarbouxError::SingularMass { det },
            other => other.into(),
        })?;
        let mut out: Vec<Polynomial<C>> = (0..n)
            .map(|i| Polynomial::var(2 * n, n + i))
            .collect::<Result<_, _>>()?;
        for row in &minv {
            let mut acc = Polynomial::zero(2 * n);
            for (k, c) in row.iter().enumerate() {
                acc += &force[k].scale(c);
            }
            out.push(acc);
        }
        Some(out)
    } else {
        None
    };
    let mass_f: Vec<Vec<Polynomial<f64>>> = mass
        .iter()
        .map(|r| r.iter().map(Polynomial::to_f64).collect())
        .collect();
    let force_f: Vec<Polynomial<f64>> = force.iter().map(Polynomial::to_f64).collect();
    let rhs = move |state: &[f64]| -> Result<Vec<f64>, DynamicsError> {
        let m: Vec<Vec<f64>> = mass_f
            .iter()
            .map(|r| r.iter().map(|p| p.eval_f64(state)).collect())
            .collect::<Result<_, _>>()?;
        let f: Vec<f64> = force_f
            .iter()
            .map(|p| p.eval_f64(state))
            .collect::<Result<_, _>>()?;
        let (acc, _) = solve(&m, &f).map_err(|err| match err {
            PolyError::Singular { det } => DynamicsError::SingularG {
                state: state.to_vec(),
                det,
            },
            other => other.into(),
        })?;
        let mut out = state[n..].to_vec();
        out.extend(acc);
        Ok(out)
    };
    let mut eom = EquationsOfMotion::new(EomKind::SecondOrderConfig, n, Arc::new(rhs));
    eom.symbolic_rhs = symbolic;
    Ok(eom)
}

/// Lift the position-only potentials of `fc` to phase variables; used to
/// express `E₀ = ½q̇² + eφ(q)` over `(q, q̇)`.
pub fn commutative_energy<C: Coeff>(fc: &FieldConfig<C>) -> Result<Polynomial<C>, PolyError> {
    let n = fc.dim();
    let half = C::one() / C::from_i64(2);
    let mut e0 = lift_position(&fc.phi)?.scale(&fc.e);
    for i in 0..n {
        let v = Polynomial::var(2 * n, n + i)?;
        e0 += &v.mul(&v)?.scale(&half);
    }
    Ok(e0)
}
