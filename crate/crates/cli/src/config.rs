//! Strict JSON scenario files and their resolution into library values.

use std::path::Path;

use ncmech::dynamics::{scenario, IntegratorConfig, ScenarioName, ScenarioParams};
use ncmech::gauge::{FieldConfig, DEFAULT_ORDER, MAX_ORDER};
use ncmech::polyalg::exchange::{from_records, TermRecord};
use ncmech::polyalg::{Coeff, Polynomial, ScalarMode, ThetaMatrix, ThetaRecord};
use ncmech::structure::BracketStructure;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// One of the named scenarios; excludes `structure` and `fields`.
    pub preset: Option<String>,
    pub mode: Option<ScalarMode>,
    pub params: Option<ParamsBlock>,
    pub structure: Option<StructureBlock>,
    pub fields: Option<FieldsBlock>,
    pub gauge: Option<GaugeBlock>,
    pub integrator: Option<IntegratorBlock>,
    pub outputs: Option<OutputsBlock>,
}

/// Preset parameters as scalar strings.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsBlock {
    pub e: Option<String>,
    pub b_field: Option<String>,
    pub omega: Option<String>,
    pub theta: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureKindName {
    Canonical,
    DuvalHorvathy,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureBlock {
    pub kind: StructureKindName,
    pub theta: ThetaRecord,
    /// Duval-Horvathy only.
    pub b_field: Option<Vec<TermRecord>>,
    /// Duval-Horvathy only; defaults to `θ^{12}`.
    pub theta_scalar: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsBlock {
    /// Needed only when `a` is absent.
    pub dim: Option<usize>,
    pub e: String,
    pub a: Option<Vec<Vec<TermRecord>>>,
    pub phi: Option<Vec<TermRecord>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeBlock {
    pub f: Vec<TermRecord>,
    pub order: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorBlock {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    /// Phase state `(x, p)`.
    pub init: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsBlock {
    /// File name stem for everything written to the output directory.
    pub stem: Option<String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Config consisting of a preset name only.
    pub fn from_preset(name: &str) -> Self {
        Self {
            preset: Some(name.to_string()),
            ..Self::default()
        }
    }
}

/// Command-line settings that override the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub mode: Option<ScalarMode>,
    pub order: Option<usize>,
    pub preset: Option<String>,
}

/// A fully resolved scenario in one scalar backend.
#[derive(Debug, Clone, PartialEq)]
pub struct Setup<C> {
    pub name: String,
    pub fields: FieldConfig<C>,
    pub structure: BracketStructure<C>,
    /// Gauge function; presets with a magnetic field default to `Bxy/2`.
    pub gauge_f: Option<Polynomial<C>>,
    /// Constant planar field, when known.
    pub b_field: Option<C>,
    pub order: usize,
    pub integrator: IntegratorConfig,
    pub init: Option<Vec<f64>>,
}

pub fn resolve_mode(cfg: &ConfigFile, ov: &Overrides) -> ScalarMode {
    ov.mode.or(cfg.mode).unwrap_or(ScalarMode::Exact)
}

fn scalar<C: Coeff>(s: &str, field: &str) -> Result<C, CliError> {
    C::parse_coeff(s).map_err(|e| CliError::Schema(format!("{field}: {e}")))
}

fn poly<C: Coeff>(n: usize, recs: &[TermRecord], field: &str) -> Result<Polynomial<C>, CliError> {
    from_records(n, recs).map_err(|e| CliError::Schema(format!("{field}: {e}")))
}

/// Preset defaults: `e = 1`, `B = 1`, `ω = 1`, `θ = 1/10`.
fn preset_params<C: Coeff>(p: Option<&ParamsBlock>) -> Result<ScenarioParams<C>, CliError> {
    let p = p.cloned().unwrap_or_default();
    let get = |v: &Option<String>, field: &str, default: C| -> Result<C, CliError> {
        v.as_deref().map_or(Ok(default), |s| scalar(s, field))
    };
    Ok(ScenarioParams::new(
        get(&p.e, "params.e", C::from_i64(1))?,
        get(&p.b_field, "params.b_field", C::from_i64(1))?,
        get(&p.omega, "params.omega", C::from_i64(1))?,
        get(&p.theta, "params.theta", C::from_ratio(1, 10))?,
    ))
}

fn apply_integrator(
    mut integrator: IntegratorConfig,
    block: Option<&IntegratorBlock>,
) -> IntegratorConfig {
    if let Some(b) = block {
        if let Some(dt) = b.dt {
            integrator.dt = dt;
        }
        if let Some(t) = b.t_end {
            integrator.t_end = t;
        }
    }
    integrator
}

fn bxy_half<C: Coeff>(b: &C) -> Result<Polynomial<C>, CliError> {
    let xy = Polynomial::var(2, 0)?.mul(&Polynomial::var(2, 1)?)?;
    Ok(xy.scale(&(b.clone() / C::from_i64(2))))
}

pub fn resolve<C: Coeff>(cfg: &ConfigFile, ov: &Overrides) -> Result<Setup<C>, CliError> {
    let preset = ov.preset.as_deref().or(cfg.preset.as_deref());
    let mut setup = match preset {
        Some(name) => resolve_preset(cfg, name)?,
        None => resolve_custom(cfg)?,
    };
    if let Some(g) = &cfg.gauge {
        setup.gauge_f = Some(poly(setup.fields.dim(), &g.f, "gauge.f")?);
    }
    setup.order = ov
        .order
        .or(cfg.gauge.as_ref().and_then(|g| g.order))
        .unwrap_or(DEFAULT_ORDER);
    if setup.order > MAX_ORDER {
        return Err(CliError::Schema(format!(
            "order {} exceeds the maximum of {MAX_ORDER}",
            setup.order
        )));
    }
    if let Some(init) = cfg.integrator.as_ref().and_then(|b| b.init.clone()) {
        setup.init = Some(init);
    }
    if let Some(name) = cfg.outputs.as_ref().and_then(|o| o.stem.clone()) {
        setup.name = name;
    }
    if let Some(init) = &setup.init {
        if init.len() != 2 * setup.fields.dim() {
            return Err(CliError::Schema(format!(
                "integrator.init: expected {} values, found {}",
                2 * setup.fields.dim(),
                init.len()
            )));
        }
    }
    Ok(setup)
}

fn resolve_preset<C: Coeff>(cfg: &ConfigFile, name: &str) -> Result<Setup<C>, CliError> {
    if cfg.structure.is_some() || cfg.fields.is_some() {
        return Err(CliError::Schema(
            "a preset cannot be combined with `structure` or `fields`".into(),
        ));
    }
    let scen_name: ScenarioName = name
        .parse()
        .map_err(|_| CliError::Schema(format!("unknown preset `{name}`")))?;
    let params = preset_params::<C>(cfg.params.as_ref())?;
    let sc = scenario(scen_name, &params)?;
    let b_field = match scen_name {
        ScenarioName::ConstantB | ScenarioName::Combined | ScenarioName::DhCompare => {
            params.b_field.clone()
        }
        _ => None,
    };
    let gauge_f = match &b_field {
        Some(b) if scen_name != ScenarioName::DhCompare => Some(bxy_half(b)?),
        _ => None,
    };
    Ok(Setup {
        name: name.to_string(),
        fields: sc.fields,
        structure: sc.structure,
        gauge_f,
        b_field,
        order: DEFAULT_ORDER,
        integrator: apply_integrator(sc.integrator, cfg.integrator.as_ref()),
        init: Some(sc.init),
    })
}

fn resolve_custom<C: Coeff>(cfg: &ConfigFile) -> Result<Setup<C>, CliError> {
    if cfg.params.is_some() {
        return Err(CliError::Schema("`params` requires a preset".into()));
    }
    let fb = cfg
        .fields
        .as_ref()
        .ok_or_else(|| CliError::Schema("missing `fields` (or a preset)".into()))?;
    let n = match (&fb.a, fb.dim) {
        (Some(a), Some(d)) if a.len() != d => {
            return Err(CliError::Schema(format!(
                "fields.dim is {d} but fields.a has {} components",
                a.len()
            )))
        }
        (Some(a), _) => a.len(),
        (None, Some(d)) => d,
        (None, None) => return Err(CliError::Schema("fields: give `a` or `dim`".into())),
    };
    if n == 0 {
        return Err(CliError::Schema(
            "fields: dimension must be positive".into(),
        ));
    }
    let e: C = scalar(&fb.e, "fields.e")?;
    let a = match &fb.a {
        Some(a) => a
            .iter()
            .enumerate()
            .map(|(i, r)| poly(n, r, &format!("fields.a[{i}]")))
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![Polynomial::zero(n); n],
    };
    let phi = match &fb.phi {
        Some(r) => poly(n, r, "fields.phi")?,
        None => Polynomial::zero(n),
    };
    let fields = FieldConfig::new(a, phi, e.clone())?;
    let (structure, b_field) = match &cfg.structure {
        None => (BracketStructure::canonical(ThetaMatrix::zero(n)), None),
        Some(sb) => {
            let theta = ThetaMatrix::<C>::from_strings(&sb.theta.0)
                .map_err(|e| CliError::Schema(format!("structure.theta: {e}")))?;
            if theta.dim() != n {
                return Err(CliError::Schema(format!(
                    "structure.theta is {0}x{0}, fields have dimension {n}",
                    theta.dim()
                )));
            }
            match sb.kind {
                StructureKindName::Canonical => {
                    if sb.b_field.is_some() || sb.theta_scalar.is_some() {
                        return Err(CliError::Schema(
                            "structure: `b_field` and `theta_scalar` belong to duval-horvathy"
                                .into(),
                        ));
                    }
                    (BracketStructure::canonical(theta), None)
                }
                StructureKindName::DuvalHorvathy => {
                    let recs = sb.b_field.as_ref().ok_or_else(|| {
                        CliError::Schema("structure.b_field is required for duval-horvathy".into())
                    })?;
                    let b = poly::<C>(n, recs, "structure.b_field")?;
                    let ts = match &sb.theta_scalar {
                        Some(s) => scalar(s, "structure.theta_scalar")?,
                        None if n == 2 => theta.get(0, 1).clone(),
                        None => C::from_i64(0),
                    };
                    let constant = b.is_constant().then(|| b.constant_term());
                    let s = BracketStructure::duval_horvathy(theta, e, b, ts)?;
                    (s, constant)
                }
            }
        }
    };
    let integrator =
        IntegratorConfig::new(1e-3, 10.0).with_monitor("H", fields.hamiltonian()?.to_f64());
    Ok(Setup {
        name: "custom".into(),
        fields,
        structure,
        gauge_f: None,
        b_field,
        order: DEFAULT_ORDER,
        integrator: apply_integrator(integrator, cfg.integrator.as_ref()),
        init: None,
    })
}
