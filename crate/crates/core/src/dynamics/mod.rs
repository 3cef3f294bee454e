//! Equations of motion, fixed-step integration and the worked scenarios.

mod eom;
mod integrate;
mod scenario;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::polyalg::{PolyError, Polynomial};
use crate::structure::StructureError;

pub use eom::{hamiltonian_flow, hamiltonian_rhs, lorentz_rhs};
pub use integrate::{
    fit_frequency, integrate, monitor_drift, IntegratorConfig, Method, Trajectory,
};
pub use scenario::{scenario, Scenario, ScenarioName, ScenarioParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("velocity-momentum matrix is singular at {state:?} (det = {det:e})")]
    SingularG { state: Vec<f64>, det: f64 },
    #[error("non-finite state at step {step}")]
    NonFinite { step: usize },
    #[error("state has {found} components, equations expect {expected}")]
    StateDimension { expected: usize, found: usize },
    #[error("invalid integrator settings: {0}")]
    InvalidConfig(String),
    #[error("unknown monitor `{0}`")]
    UnknownMonitor(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("scenario `{scenario}` needs parameter `{param}`")]
    MissingParameter {
        scenario: &'static str,
        param: &'static str,
    },
    #[error("not enough zero crossings to fit a frequency ({0})")]
    TooFewCrossings(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EomKind {
    /// State `(x, p)`.
    FirstOrderPhase,
    /// State `(x, ẋ)`.
    SecondOrderConfig,
}

pub type RhsFn = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>, DynamicsError> + Send + Sync>;

/// First-order system `ż = rhs(z)` over a `2n`-component state.
#[derive(Clone)]
pub struct EquationsOfMotion<C> {
    pub kind: EomKind,
    pub n: usize,
    rhs: RhsFn,
    /// Exact right-hand side over the state variables, when available.
    pub symbolic_rhs: Option<Vec<Polynomial<C>>>,
    /// `π_i = p_i − eA_i(x)` over `(x, p)`.
    pub kinetic_momentum: Option<Vec<Polynomial<C>>>,
}

impl<C> EquationsOfMotion<C> {
    pub fn new(kind: EomKind, n: usize, rhs: RhsFn) -> Self {
        Self {
            kind,
            n,
            rhs,
            symbolic_rhs: None,
            kinetic_momentum: None,
        }
    }

    pub fn state_dim(&self) -> usize {
        2 * self.n
    }

    pub fn eval(&self, state: &[f64]) -> Result<Vec<f64>, DynamicsError> {
        if state.len() != self.state_dim() {
            return Err(DynamicsError::StateDimension {
                expected: self.state_dim(),
                found: state.len(),
            });
        }
        (self.rhs)(state)
    }

    /// Column labels of the state: `x1..xn` then `p1..pn` or `v1..vn`.
    pub fn state_labels(&self) -> Vec<String> {
        let second = match self.kind {
            EomKind::FirstOrderPhase => "p",
            EomKind::SecondOrderConfig => "v",
        };
        (1..=self.n)
            .map(|i| format!("x{i}"))
            .chain((1..=self.n).map(|i| format!("{second}{i}")))
            .collect()
    }
}

impl<C: fmt::Debug> fmt::Debug for EquationsOfMotion<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EquationsOfMotion")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .field("symbolic_rhs", &self.symbolic_rhs)
            .field("kinetic_momentum", &self.kinetic_momentum)
            .finish_non_exhaustive()
    }
}
