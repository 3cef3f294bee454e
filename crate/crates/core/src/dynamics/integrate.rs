use std::fmt::Write as _;

use crate::polyalg::Polynomial;

use super::{DynamicsError, EquationsOfMotion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Rk4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub dt: f64,
    pub t_end: f64,
    /// Named polynomials over the state variables, evaluated at every step.
    pub monitors: Vec<(String, Polynomial<f64>)>,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self {
            method: Method::Rk4,
            dt,
            t_end,
            monitors: Vec::new(),
        }
    }

    pub fn with_monitor(mut self, name: impl Into<String>, p: Polynomial<f64>) -> Self {
        self.monitors.push((name.into(), p));
        self
    }

    /// Number of steps; `t_end` is rounded to a whole number of steps.
    pub fn steps(&self) -> Result<usize, DynamicsError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(DynamicsError::InvalidConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(DynamicsError::InvalidConfig(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        Ok(((self.t_end / self.dt).round() as usize).max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub labels: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub monitor_names: Vec<String>,
    /// `monitors[k][step]`, in the order of `monitor_names`.
    pub monitors: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }

    pub fn monitor(&self, name: &str) -> Result<&[f64], DynamicsError> {
        self.monitor_names
            .iter()
            .position(|m| m == name)
            .map(|k| self.monitors[k].as_slice())
            .ok_or_else(|| DynamicsError::UnknownMonitor(name.to_string()))
    }

    /// Component `k` of every state.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[k]).collect()
    }

    /// CSV with a `t,<state labels>,<monitors>` header and 17 significant
    /// digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for name in self.labels.iter().chain(&self.monitor_names) {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (step, t) in self.times.iter().enumerate() {
            let _ = write!(out, "{t:.16e}");
            for v in self.states[step]
                .iter()
                .chain(self.monitors.iter().map(|m| &m[step]))
            {
                let _ = write!(out, ",{v:.16e}");
            }
            out.push('\n');
        }
        out
    }
}

fn axpy(y: &[f64], a: f64, x: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(yi, xi)| yi + a * xi).collect()
}

/// Classical fixed-step RK4 from `init`; the step count is
/// `round(t_end / dt)` and `t_k = k·dt`.
pub fn integrate<C>(
    eom: &EquationsOfMotion<C>,
    init: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory, DynamicsError> {
    let steps = cfg.steps()?;
    let dim = eom.state_dim();
    if init.len() != dim {
        return Err(DynamicsError::StateDimension {
            expected: dim,
            found: init.len(),
        });
    }
    if let Some((name, p)) = cfg.monitors.iter().find(|(_, p)| p.nvars() != dim) {
        return Err(DynamicsError::InvalidConfig(format!(
            "monitor `{name}` has {} variables, state has {dim}",
            p.nvars()
        )));
    }
    if init.iter().any(|v| !v.is_finite()) {
        return Err(DynamicsError::NonFinite { step: 0 });
    }
    let dt = cfg.dt;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut monitors: Vec<Vec<f64>> = vec![Vec::with_capacity(steps + 1); cfg.monitors.len()];
    let record = |state: &[f64], monitors: &mut Vec<Vec<f64>>| -> Result<(), DynamicsError> {
        for (k, (_, p)) in cfg.monitors.iter().enumerate() {
            monitors[k].push(p.eval_f64(state)?);
        }
        Ok(())
    };

    let mut z = init.to_vec();
    times.push(0.0);
    record(&z, &mut monitors)?;
    states.push(z.clone());
    for step in 1..=steps {
        let k1 = eom.eval(&z)?;
        let k2 = eom.eval(&axpy(&z, dt / 2.0, &k1))?;
        let k3 = eom.eval(&axpy(&z, dt / 2.0, &k2))?;
        let k4 = eom.eval(&axpy(&z, dt, &k3))?;
        for (i, zi) in z.iter_mut().enumerate() {
            *zi += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(DynamicsError::NonFinite { step });
        }
        times.push(step as f64 * dt);
        record(&z, &mut monitors)?;
        states.push(z.clone());
    }
    Ok(Trajectory {
        labels: eom.state_labels(),
        times,
        states,
        monitor_names: cfg.monitors.iter().map(|(n, _)| n.clone()).collect(),
        monitors,
    })
}

/// `max_t |m(t) − m(0)|` for the named monitor.
pub fn monitor_drift(traj: &Trajectory, name: &str) -> Result<f64, DynamicsError> {
    let values = traj.monitor(name)?;
    let first = values.first().copied().unwrap_or(0.0);
    Ok(values.iter().map(|v| (v - first).abs()).fold(0.0, f64::max))
}

/// Angular frequency of an oscillating signal from linearly interpolated
/// zero crossings: consecutive crossings are half a period apart.
pub fn fit_frequency(times: &[f64], signal: &[f64]) -> Result<f64, DynamicsError> {
    let mut crossings = Vec::new();
    for k in 1..signal.len().min(times.len()) {
        let (a, b) = (signal[k - 1], signal[k]);
        if a == 0.0 {
            crossings.push(times[k - 1]);
        } else if a * b < 0.0 {
            crossings.push(times[k - 1] + (times[k] - times[k - 1]) * a / (a - b));
        }
    }
    crossings.dedup();
    if crossings.len() < 3 {
        return Err(DynamicsError::TooFewCrossings(crossings.len()));
    }
    let half_periods = (crossings.len() - 1) as f64;
    Ok(std::f64::consts::PI * half_periods / (crossings[crossings.len() - 1] - crossings[0]))
}
