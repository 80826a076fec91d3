use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_finite, check_len, DenseVector};
use crate::models::VectorField;

/// Relative slack allowed on domain faces.
pub(crate) const DOMAIN_TOL: f64 = 1e-9;

/// Sampled solution of `u̇ = F(u, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub system: String,
    pub times: Vec<f64>,
    pub states: Vec<DenseVector>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().map_or(&[], |s| s.as_slice())
    }
}

/// Classic fourth-order Runge–Kutta with reusable stage buffers.
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(n: usize) -> Self {
        Self {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }

    /// Advances `u` from `t` to `t + dt` in place.
    pub fn step(&mut self, f: &(impl VectorField + ?Sized), t: f64, u: &mut [f64], dt: f64) {
        let half = 0.5 * dt;
        f.eval_into(u, t, &mut self.k1);
        for ((x, u), k) in self.tmp.iter_mut().zip(u.iter()).zip(&self.k1) {
            *x = u + half * k;
        }
        f.eval_into(&self.tmp, t + half, &mut self.k2);
        for ((x, u), k) in self.tmp.iter_mut().zip(u.iter()).zip(&self.k2) {
            *x = u + half * k;
        }
        f.eval_into(&self.tmp, t + half, &mut self.k3);
        for ((x, u), k) in self.tmp.iter_mut().zip(u.iter()).zip(&self.k3) {
            *x = u + dt * k;
        }
        f.eval_into(&self.tmp, t + dt, &mut self.k4);
        let sixth = dt / 6.0;
        let stages = self
            .k1
            .iter()
            .zip(&self.k2)
            .zip(self.k3.iter().zip(&self.k4));
        for (u, ((k1, k2), (k3, k4))) in u.iter_mut().zip(stages) {
            *u += sixth * (k1 + 2.0 * (k2 + k3) + k4);
        }
    }
}

/// Number of steps so that `steps · dt ≥ t_end`.
pub(crate) fn step_count(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidIntegration(format!(
            "dt must be finite and > 0, got {dt}"
        )));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidIntegration(format!(
            "t_end must be finite and >= 0, got {t_end}"
        )));
    }
    let ratio = t_end / dt;
    let steps = (ratio - 1e-9 * ratio.max(1.0)).ceil().max(0.0);
    if steps > 1e10 {
        return Err(Error::InvalidIntegration(format!(
            "{steps} steps requested; increase dt or reduce t_end"
        )));
    }
    Ok(steps as usize)
}

pub(crate) fn check_step(f: &(impl VectorField + ?Sized), dt: f64) -> Result<()> {
    if let Some(max_dt) = f.max_stable_dt() {
        if dt > max_dt {
            return Err(Error::StepTooLarge { dt, max_dt });
        }
    }
    Ok(())
}

pub(crate) fn check_initial(f: &(impl VectorField + ?Sized), u0: &[f64], what: &str) -> Result<()> {
    check_len(u0, f.dim())?;
    check_finite(u0, "initial state")?;
    if let Some(axis) = f.domain().violation(u0, 0.0) {
        return Err(Error::InvalidParameter {
            name: what.into(),
            reason: format!(
                "component {axis} = {} lies outside the domain [{}, {}]",
                u0[axis],
                f.domain().lower[axis],
                f.domain().upper[axis]
            ),
        });
    }
    Ok(())
}

pub(crate) fn check_domain(f: &(impl VectorField + ?Sized), u: &[f64], t: f64) -> Result<()> {
    match f.domain().violation(u, DOMAIN_TOL) {
        None => Ok(()),
        Some(component) => Err(Error::DomainEscape {
            time: t,
            component,
            value: u[component],
        }),
    }
}

/// Integrates with every step recorded.
pub fn integrate(
    f: &(impl VectorField + ?Sized),
    u0: &[f64],
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    integrate_with(f, u0, t_end, dt, 1)
}

/// Integrates from `t = 0` with fixed step `dt` until `t ≥ t_end`, keeping
/// every `record_every`-th state plus the final one. Fails on leaving the
/// domain or on a step above the system's explicit stability limit.
pub fn integrate_with(
    f: &(impl VectorField + ?Sized),
    u0: &[f64],
    t_end: f64,
    dt: f64,
    record_every: usize,
) -> Result<Trajectory> {
    let steps = step_count(t_end, dt)?;
    check_step(f, dt)?;
    check_initial(f, u0, "u0")?;
    let stride = record_every.max(1);
    let mut rk = Rk4::new(f.dim());
    let mut u = u0.to_vec();
    let mut times = vec![0.0];
    let mut states = vec![DenseVector::new(u.clone())?];
    for k in 0..steps {
        let t = k as f64 * dt;
        rk.step(f, t, &mut u, dt);
        let t_next = (k + 1) as f64 * dt;
        check_domain(f, &u, t_next)?;
        if (k + 1) % stride == 0 || k + 1 == steps {
            times.push(t_next);
            states.push(DenseVector::new(u.clone())?);
        }
    }
    Ok(Trajectory {
        system: f.name().to_string(),
        times,
        states,
    })
}
