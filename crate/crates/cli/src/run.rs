//! Subcommands. Each returns its artifacts in memory together with the
//! verdict of the checks it performs; writing is left to the caller.

use std::fmt;
use std::str::FromStr;

use ncmech::darboux::{
    build_lagrangian, commutative_energy, euler_lagrange_rhs, kappa_form, to_darboux,
    EliminationMode,
};
use ncmech::dynamics::{hamiltonian_rhs, integrate, monitor_drift, IntegratorConfig};
use ncmech::gauge::{
    constant_b_closed_form, field_strength, invariance_residual, residual_compat, residual_mc,
    resolve_orientation, GaugeSeries, Orientation,
};
use ncmech::polyalg::exchange::{from_records, to_records, TermRecord};
use ncmech::polyalg::{Coeff, Polynomial, Rational, ScalarMode, ThetaMatrix};
use ncmech::structure::{BracketStructure, PhaseState, StructureKind};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{resolve, resolve_mode, ConfigFile, Overrides, Setup};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    GaugeVerify,
    SeriesDump,
    DarbouxCompare,
    Strength,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::Simulate,
        Command::GaugeVerify,
        Command::SeriesDump,
        Command::DarbouxCompare,
        Command::Strength,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::GaugeVerify => "gauge-verify",
            Command::SeriesDump => "series-dump",
            Command::DarbouxCompare => "darboux-compare",
            Command::Strength => "strength",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| CliError::Config(format!("unknown subcommand `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    /// False when an enabled check failed.
    pub passed: bool,
}

/// Per-order gauge series in the exchange format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDump {
    pub mode: ScalarMode,
    pub e: String,
    pub theta: Vec<Vec<String>>,
    pub orientation: String,
    pub orders: usize,
    pub f: Vec<TermRecord>,
    /// `j[m][i]`, `m = 0..=orders`.
    pub j: Vec<Vec<Vec<TermRecord>>>,
    /// `k[m-1][i]`, `m = 1..=orders`.
    pub k: Vec<Vec<Vec<TermRecord>>>,
}

impl SeriesDump {
    pub fn j_polys<C: Coeff>(&self) -> Result<Vec<Vec<Polynomial<C>>>, CliError> {
        parse_orders(self.theta.len(), &self.j)
    }

    pub fn k_polys<C: Coeff>(&self) -> Result<Vec<Vec<Polynomial<C>>>, CliError> {
        parse_orders(self.theta.len(), &self.k)
    }
}

fn parse_orders<C: Coeff>(
    n: usize,
    orders: &[Vec<Vec<TermRecord>>],
) -> Result<Vec<Vec<Polynomial<C>>>, CliError> {
    orders
        .iter()
        .map(|row| {
            row.iter()
                .map(|r| from_records(n, r).map_err(CliError::from))
                .collect()
        })
        .collect()
}

/// Pretty JSON with keys in sorted order.
fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let v: Value = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn run(cmd: Command, cfg: &ConfigFile, ov: &Overrides) -> Result<Outcome, CliError> {
    match resolve_mode(cfg, ov) {
        ScalarMode::Exact => run_in::<Rational>(cmd, &resolve(cfg, ov)?),
        ScalarMode::Float => run_in::<f64>(cmd, &resolve(cfg, ov)?),
    }
}

fn run_in<C: Coeff>(cmd: Command, setup: &Setup<C>) -> Result<Outcome, CliError> {
    match cmd {
        Command::Simulate => simulate(setup),
        Command::GaugeVerify => gauge_verify(setup),
        Command::SeriesDump => series_dump(setup),
        Command::DarbouxCompare => darboux_compare(setup),
        Command::Strength => strength(setup),
    }
}

fn single(file_name: String, contents: String, passed: bool) -> Outcome {
    Outcome {
        artifacts: vec![Artifact {
            file_name,
            contents,
        }],
        passed,
    }
}

fn need_init<C>(setup: &Setup<C>) -> Result<&[f64], CliError> {
    setup
        .init
        .as_deref()
        .ok_or_else(|| CliError::Schema("integrator.init is required for this config".into()))
}

fn need_canonical<C: Coeff>(setup: &Setup<C>, cmd: Command) -> Result<ThetaMatrix<C>, CliError> {
    match setup.structure.kind() {
        StructureKind::DeriglazovCanonical => Ok(setup.structure.theta().clone()),
        StructureKind::DuvalHorvathy => Err(CliError::Schema(format!(
            "{cmd} needs the canonical structure"
        ))),
    }
}

fn simulate<C: Coeff>(setup: &Setup<C>) -> Result<Outcome, CliError> {
    let init = need_init(setup)?;
    let eom = hamiltonian_rhs(&setup.fields.to_f64(), &setup.structure.to_f64())?;
    let traj = integrate(&eom, init, &setup.integrator)?;
    Ok(single(format!("{}.csv", setup.name), traj.to_csv(), true))
}

/// Terms that count as nonzero: all of them in exact mode, those above a
/// small threshold in float mode.
fn significant<C: Coeff>(p: &Polynomial<C>, keep: impl Fn(&[u32]) -> bool) -> usize {
    let tol = match C::MODE {
        ScalarMode::Exact => 0.0,
        ScalarMode::Float => 1e-9,
    };
    p.terms()
        .filter(|(e, c)| keep(e) && c.abs_f64() > tol)
        .count()
}

fn max_terms<'a, C: Coeff + 'a>(entries: impl IntoIterator<Item = &'a Polynomial<C>>) -> usize {
    entries
        .into_iter()
        .map(|p| significant(p, |_| true))
        .max()
        .unwrap_or(0)
}

fn to_rational<C: Coeff>(c: &C) -> Result<Rational, CliError> {
    Ok(Rational::parse_coeff(&c.to_exchange_string())?)
}

/// Series for the configured gauge function, orientation resolved when the
/// constant-field example applies.
fn series<C: Coeff>(
    setup: &Setup<C>,
    cmd: Command,
) -> Result<(GaugeSeries<C>, Option<i64>), CliError> {
    let th = need_canonical(setup, cmd)?;
    let f = setup
        .gauge_f
        .as_ref()
        .ok_or_else(|| CliError::Schema("gauge.f is required for this config".into()))?;
    let resolved = match (&setup.b_field, th.dim()) {
        (Some(b), 2) if !th.get(0, 1).is_zero() => Some(resolve_orientation(
            &to_rational(&setup.fields.e)?,
            &to_rational(b)?,
            &to_rational(th.get(0, 1))?,
        )?),
        _ => None,
    };
    let orientation = resolved.unwrap_or(Orientation::Reversed);
    let s = GaugeSeries::build(f, setup.fields.e.clone(), &th, setup.order, orientation)?;
    // sign of θ^{12} the closed-form pair is valid for
    Ok((s, resolved.map(|o| -o.sign())))
}

fn gauge_verify<C: Coeff>(setup: &Setup<C>) -> Result<Outcome, CliError> {
    let (s, resolved) = series(setup, Command::GaugeVerify)?;
    let order = setup.order;
    let mc: Vec<usize> = (0..=order)
        .map(|m| Ok(max_terms(residual_mc(&s, m)?.iter().flatten())))
        .collect::<Result<_, CliError>>()?;
    let compat = residual_compat(&s)?;
    let compat_terms: Vec<usize> = compat
        .position
        .iter()
        .zip(&compat.mixed)
        .map(|(p, q)| max_terms(p.iter().chain(q).flatten()))
        .collect();
    let inv = invariance_residual(&setup.fields, &s)?;
    let lam = inv.poly.nvars() - 1;
    let invariance_ok = significant(&inv.poly, |e| e[lam] as usize <= order) == 0;
    let ab = match (&setup.b_field, s.dim()) {
        (Some(b), 2) => {
            let g = constant_b_closed_form(
                setup.fields.e.to_f64(),
                b.to_f64(),
                s.theta.get(0, 1).to_f64(),
            );
            json!({ "a": g.a, "b": g.b })
        }
        _ => Value::Null,
    };
    let passed = mc.iter().chain(&compat_terms).all(|&t| t == 0) && invariance_ok;
    let report = json!({
        "ab": ab,
        "compat_max_terms": compat_terms,
        "invariance_ok": invariance_ok,
        "mode": C::MODE,
        "orders": order,
        "orientation_resolved": resolved,
        "passed": passed,
        "residual_mc_max_terms": mc,
    });
    Ok(single(
        format!("{}.gauge-verify.json", setup.name),
        to_json(&report)?,
        passed,
    ))
}

fn series_dump<C: Coeff>(setup: &Setup<C>) -> Result<Outcome, CliError> {
    let (s, _) = series(setup, Command::SeriesDump)?;
    let recs = |orders: &[Vec<Polynomial<C>>]| -> Vec<Vec<Vec<TermRecord>>> {
        orders
            .iter()
            .map(|row| row.iter().map(to_records).collect())
            .collect()
    };
    let dump = SeriesDump {
        mode: C::MODE,
        e: s.e.to_exchange_string(),
        theta: s.theta.to_strings(),
        orientation: match s.orientation {
            Orientation::Aligned => "aligned".into(),
            Orientation::Reversed => "reversed".into(),
        },
        orders: s.order,
        f: to_records(&s.f),
        j: recs(&s.j),
        k: recs(&s.k),
    };
    Ok(single(
        format!("{}.series.json", setup.name),
        to_json(&dump)?,
        true,
    ))
}

fn strength<C: Coeff>(setup: &Setup<C>) -> Result<Outcome, CliError> {
    let th = setup.structure.theta();
    let f = field_strength(&setup.fields, th)?;
    let report = json!({
        "e": setup.fields.e.to_exchange_string(),
        "mode": C::MODE,
        "strength": f
            .iter()
            .map(|row| row.iter().map(to_records).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "theta": th.to_strings(),
    });
    Ok(single(
        format!("{}.strength.json", setup.name),
        to_json(&report)?,
        true,
    ))
}

/// Fixed sample states `(q, q̇)` for the energy-ratio check.
fn sample_states(n: usize) -> Vec<Vec<f64>> {
    (1..=8)
        .map(|k| {
            (0..2 * n)
                .map(|i| ((k * (i + 3)) as f64 * 0.7).sin() * 1.5)
                .collect()
        })
        .collect()
}

fn darboux_compare<C: Coeff>(setup: &Setup<C>) -> Result<Outcome, CliError> {
    let init = need_init(setup)?;
    let th = need_canonical(setup, Command::DarbouxCompare)?.to_f64();
    let fc = setup.fields.to_f64();
    let n = fc.dim();
    let mode = if fc.is_linear_vector_potential() && fc.phi.total_degree() <= 2 {
        EliminationMode::ExactQuadratic
    } else {
        EliminationMode::PerturbativeFirstOrder
    };
    let model = build_lagrangian(&fc, &th, mode)?;
    let phase = hamiltonian_rhs(&fc, &BracketStructure::canonical(th.clone()))?;
    let el = euler_lagrange_rhs(&model)?;

    let to_qv = |z: &[f64]| -> Result<Vec<f64>, CliError> {
        let mut s = to_darboux(&PhaseState::from_slice(z)?, &th)?;
        let zd = phase.eval(z)?;
        s.extend(to_darboux(&PhaseState::from_slice(&zd)?, &th)?);
        Ok(s)
    };
    let cfg = IntegratorConfig::new(setup.integrator.dt, setup.integrator.t_end);
    let h = integrate(&phase, init, &cfg)?;
    let l = integrate(
        &el,
        &to_qv(init)?,
        &cfg.clone().with_monitor("E", model.energy.clone()),
    )?;
    let mut deviation = 0.0f64;
    for (z, w) in h.states.iter().zip(&l.states) {
        let q = to_darboux(&PhaseState::from_slice(z)?, &th)?;
        for i in 0..n {
            deviation = deviation.max((q[i] - w[i]).abs());
        }
    }
    let drift = monitor_drift(&l, "E")?;
    let kappa = kappa_form(&model).map(|k| k.kappa);
    let e_ratio = match kappa {
        Some(k) => {
            let e0 = commutative_energy(&fc)?;
            let mut worst = 0.0f64;
            for s in sample_states(n) {
                let ratio = model.energy.eval_f64(&s)? / e0.eval_f64(&s)?;
                worst = worst.max((ratio - 2.0 * k).abs());
            }
            Some(worst)
        }
        None => None,
    };
    let passed = match mode {
        EliminationMode::ExactQuadratic => {
            deviation < 1e-8 && drift < 1e-8 && e_ratio.is_none_or(|r| r < 1e-12)
        }
        EliminationMode::PerturbativeFirstOrder => deviation.is_finite() && drift.is_finite(),
    };
    let report = json!({
        "e_ratio_check": e_ratio,
        "energy_drift": drift,
        "kappa": kappa,
        "max_traj_deviation": deviation,
        "mode": match mode {
            EliminationMode::ExactQuadratic => "exact",
            EliminationMode::PerturbativeFirstOrder => "first-order",
        },
        "passed": passed,
    });
    Ok(single(
        format!("{}.darboux-compare.json", setup.name),
        to_json(&report)?,
        passed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn preset(name: &str) -> ConfigFile {
        ConfigFile::from_preset(name)
    }

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.as_str().parse::<Command>().unwrap(), c);
        }
        assert!("plot".parse::<Command>().is_err());
    }

    #[test]
    fn gauge_verify_constant_b_passes() {
        let out = run(
            Command::GaugeVerify,
            &preset("constant-b"),
            &Overrides::default(),
        )
        .unwrap();
        assert!(out.passed);
        let v: Value = serde_json::from_str(&out.artifacts[0].contents).unwrap();
        assert_eq!(v["orders"], 4);
        assert_eq!(v["orientation_resolved"], 1);
        assert_eq!(v["residual_mc_max_terms"], json!([0, 0, 0, 0, 0]));
        assert!(v["ab"]["a"].as_f64().unwrap() > 0.5);
    }

    #[test]
    fn keys_are_sorted() {
        let out = run(
            Command::DarbouxCompare,
            &preset("combined"),
            &Overrides::default(),
        )
        .unwrap();
        let text = &out.artifacts[0].contents;
        let keys: Vec<usize> = [
            "e_ratio_check",
            "energy_drift",
            "kappa",
            "max_traj_deviation",
            "mode",
        ]
        .iter()
        .map(|k| text.find(&format!("\"{k}\"")).unwrap())
        .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(out.passed);
    }

    #[test]
    fn duval_horvathy_is_rejected_for_gauge_commands() {
        let err = run(
            Command::GaugeVerify,
            &preset("dh-compare"),
            &Overrides::default(),
        );
        assert!(matches!(err, Err(CliError::Schema(_))));
    }

    #[test]
    fn float_mode_strength() {
        let ov = Overrides {
            mode: Some(ScalarMode::Float),
            ..Overrides::default()
        };
        let out = run(Command::Strength, &preset("constant-b"), &ov).unwrap();
        let v: Value = serde_json::from_str(&out.artifacts[0].contents).unwrap();
        assert_eq!(v["mode"], "float");
        // F₁₂ = B + eθB²/4 for the default parameters
        assert_eq!(v["strength"][0][1][0]["coeff"], "1.025");
    }
}
