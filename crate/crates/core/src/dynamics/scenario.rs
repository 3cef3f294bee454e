use std::fmt;
use std::str::FromStr;

use crate::gauge::FieldConfig;
use crate::polyalg::{Coeff, Polynomial, ThetaMatrix};
use crate::structure::BracketStructure;

use super::{hamiltonian_rhs, DynamicsError, IntegratorConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioName {
    /// Symmetric-gauge constant field.
    ConstantB,
    /// Isotropic oscillator, no vector potential.
    Harmonic,
    /// `φ = y²/2`, no vector potential.
    Saddle,
    /// Constant field plus isotropic oscillator.
    Combined,
    /// Free motion under the Duval-Horvathy brackets with constant field.
    DhCompare,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 5] = [
        ScenarioName::ConstantB,
        ScenarioName::Harmonic,
        ScenarioName::Saddle,
        ScenarioName::Combined,
        ScenarioName::DhCompare,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::ConstantB => "constant-b",
            ScenarioName::Harmonic => "harmonic",
            ScenarioName::Saddle => "saddle",
            ScenarioName::Combined => "combined",
            ScenarioName::DhCompare => "dh-compare",
        }
    }

    fn default_init(self) -> Vec<f64> {
        match self {
            ScenarioName::ConstantB | ScenarioName::DhCompare => vec![0.5, 0.0, 0.0, 0.5],
            ScenarioName::Harmonic | ScenarioName::Combined => vec![1.0, 0.0, 0.0, 0.5],
            ScenarioName::Saddle => vec![0.0, 1.0, 0.0, 0.0],
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = DynamicsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| DynamicsError::UnknownScenario(s.to_string()))
    }
}

/// Physical and numerical parameters; unset entries fall back to defaults
/// where the scenario allows it (`dt = 1e-3`, `t_end = 10`, a fixed initial
/// state).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams<C> {
    pub e: Option<C>,
    pub b_field: Option<C>,
    pub omega: Option<C>,
    pub theta: Option<C>,
    /// Phase state `(x, p)`.
    pub init: Option<Vec<f64>>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
}

impl<C> Default for ScenarioParams<C> {
    fn default() -> Self {
        Self {
            e: None,
            b_field: None,
            omega: None,
            theta: None,
            init: None,
            dt: None,
            t_end: None,
        }
    }
}

impl<C: Coeff> ScenarioParams<C> {
    pub fn new(e: C, b_field: C, omega: C, theta: C) -> Self {
        Self {
            e: Some(e),
            b_field: Some(b_field),
            omega: Some(omega),
            theta: Some(theta),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<C> {
    pub name: ScenarioName,
    pub fields: FieldConfig<C>,
    pub structure: BracketStructure<C>,
    pub integrator: IntegratorConfig,
    /// Phase state `(x, p)`.
    pub init: Vec<f64>,
}

fn need<C: Clone>(
    v: &Option<C>,
    scenario: ScenarioName,
    param: &'static str,
) -> Result<C, DynamicsError> {
    v.clone().ok_or(DynamicsError::MissingParameter {
        scenario: scenario.as_str(),
        param,
    })
}

/// Populate a named scenario. All are planar with `θ^{12} = θ`; monitors are
/// the Hamiltonian `H` and the velocities `v1`, `v2` as functions of the
/// phase state.
pub fn scenario<C: Coeff>(
    name: ScenarioName,
    params: &ScenarioParams<C>,
) -> Result<Scenario<C>, DynamicsError> {
    let e = need(&params.e, name, "e")?;
    let theta = need(&params.theta, name, "theta")?;
    let th = ThetaMatrix::planar(theta.clone());
    let mut structure = BracketStructure::canonical(th.clone());
    let fields = match name {
        ScenarioName::ConstantB => {
            FieldConfig::symmetric_gauge(need(&params.b_field, name, "b_field")?, e)
        }
        ScenarioName::Harmonic => {
            let w = need(&params.omega, name, "omega")?;
            FieldConfig::free(2, e)
                .with_potential(FieldConfig::isotropic_potential(2, w.clone() * w))?
        }
        ScenarioName::Saddle => {
            let y = Polynomial::var(2, 1)?;
            FieldConfig::free(2, e)
                .with_potential(y.mul(&y)?.scale(&(C::one() / C::from_i64(2))))?
        }
        ScenarioName::Combined => {
            let b = need(&params.b_field, name, "b_field")?;
            let w = need(&params.omega, name, "omega")?;
            FieldConfig::symmetric_gauge(b, e)
                .with_potential(FieldConfig::isotropic_potential(2, w.clone() * w))?
        }
        ScenarioName::DhCompare => {
            let b = need(&params.b_field, name, "b_field")?;
            structure = BracketStructure::duval_horvathy_constant(e.clone(), b, theta);
            FieldConfig::free(2, e)
        }
    };
    let mut integrator =
        IntegratorConfig::new(params.dt.unwrap_or(1e-3), params.t_end.unwrap_or(10.0))
            .with_monitor("H", fields.hamiltonian()?.to_f64());
    if let Some(sym) = hamiltonian_rhs(&fields, &structure)?.symbolic_rhs {
        integrator = integrator
            .with_monitor("v1", sym[0].to_f64())
            .with_monitor("v2", sym[1].to_f64());
    }
    let init = params.init.clone().unwrap_or_else(|| name.default_init());
    if init.len() != 4 {
        return Err(DynamicsError::StateDimension {
            expected: 4,
            found: init.len(),
        });
    }
    Ok(Scenario {
        name,
        fields,
        structure,
        integrator,
        init,
    })
}
