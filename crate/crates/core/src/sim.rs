//! Time-domain simulation and minimum-energy steering.
//!
//! Trajectories come from a fixed-step classical Runge-Kutta (RK4)
//! integrator; the step is adjusted to divide the horizon evenly. Steering
//! builds the finite-horizon controllability Gramian by composite midpoint
//! quadrature over matrix exponentials and solves for the minimum-energy
//! control, returned as a piecewise-constant signal on the quadrature grid.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, symmetric_eigen, Matrix};
use crate::lti::LtiSystem;
use crate::lumping::LumpingScheme;

/// Above this value of `dt * ||A||_inf` the fixed-step integrator is used
/// outside its comfort zone and a warning is logged.
const STIFFNESS_WARN_LEVEL: f64 = 0.5;
/// Gramians with a larger condition number are refused.
const GRAMIAN_CONDITION_LIMIT: f64 = 1e12;

/// States sampled on a uniform time grid; `states[i]` belongs to `times[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

/// Input signal for simulation. Piecewise-constant values are held on the
/// intervals between consecutive breakpoints (`values.len()` must be
/// `times.len() - 1`); the final value is held beyond the last breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub enum ControlSignal {
    Zero,
    Constant(Vec<f64>),
    PiecewiseConstant {
        times: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

impl ControlSignal {
    /// Validates the signal against the input width `r`.
    fn check(&self, r: usize) -> Result<()> {
        match self {
            ControlSignal::Zero => Ok(()),
            ControlSignal::Constant(v) => {
                if v.len() != r {
                    return Err(Error::InvalidControl(format!(
                        "constant value has width {}, the system has {r} inputs",
                        v.len()
                    )));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidControl("non-finite value".into()));
                }
                Ok(())
            }
            ControlSignal::PiecewiseConstant { times, values } => {
                if times.len() < 2 {
                    return Err(Error::InvalidControl(
                        "need at least two breakpoints".into(),
                    ));
                }
                if values.len() + 1 != times.len() {
                    return Err(Error::InvalidControl(format!(
                        "{} breakpoints require {} values, got {}",
                        times.len(),
                        times.len() - 1,
                        values.len()
                    )));
                }
                if times.iter().any(|t| !t.is_finite())
                    || times.windows(2).any(|w| w[1] <= w[0])
                {
                    return Err(Error::InvalidControl(
                        "breakpoints must be finite and strictly increasing".into(),
                    ));
                }
                for v in values {
                    if v.len() != r {
                        return Err(Error::InvalidControl(format!(
                            "value has width {}, the system has {r} inputs",
                            v.len()
                        )));
                    }
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(Error::InvalidControl("non-finite value".into()));
                    }
                }
                Ok(())
            }
        }
    }

    /// Value at time `t`, written into `out`.
    fn value_into(&self, t: f64, out: &mut [f64]) {
        match self {
            ControlSignal::Zero => out.fill(0.0),
            ControlSignal::Constant(v) => out.copy_from_slice(v),
            ControlSignal::PiecewiseConstant { times, values } => {
                let idx = match times.binary_search_by(|probe| probe.partial_cmp(&t).unwrap()) {
                    Ok(i) => i,
                    Err(0) => 0,
                    Err(i) => i - 1,
                };
                out.copy_from_slice(&values[idx.min(values.len() - 1)]);
            }
        }
    }
}

impl Trajectory {
    /// Writes `t,x1,...,xn` rows with 17-significant-digit floats, enough to
    /// reconstruct every f64 exactly.
    pub fn to_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.states.first().map_or(0, Vec::len);
        write!(w, "t")?;
        for i in 1..=n {
            write!(w, ",x{i}")?;
        }
        writeln!(w)?;
        for (t, x) in self.times.iter().zip(&self.states) {
            write!(w, "{t:.16e}")?;
            for xi in x {
                write!(w, ",{xi:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.to_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

/// Integrates x' = A x + B u(t) from `x0` over `[0, t_end]` with RK4.
///
/// The step is rounded to the nearest count that divides `t_end` evenly, so
/// the returned grid is uniform. The input is sampled at the start of each
/// step and held across it, which reproduces piecewise-constant signals
/// exactly whenever their breakpoints fall on the grid. A warning is logged
/// when `dt * ||A||_inf > 0.5`, where the fixed step starts to degrade.
pub fn simulate(
    sys: &LtiSystem,
    x0: &[f64],
    u: &ControlSignal,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    check_state(x0, sys.state_dim())?;
    u.check(sys.input_dim())?;
    let dt = effective_step(t_end, dt)?;
    if dt * sys.a.norm_inf() > STIFFNESS_WARN_LEVEL {
        log::warn!(
            "step too coarse for the dynamics: dt * ||A|| = {:.3} > {}",
            dt * sys.a.norm_inf(),
            STIFFNESS_WARN_LEVEL
        );
    }
    integrate(&sys.a, &sys.b, x0, u, t_end, dt)
}

fn check_state(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            op: "state vector",
            expected: format!("{n} entries"),
            got: format!("{} entries", x.len()),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidControl("non-finite state entry".into()));
    }
    Ok(())
}

fn effective_step(t_end: f64, dt: f64) -> Result<f64> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::NonPositive {
            name: "t_end",
            value: t_end,
        });
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::NonPositive { name: "dt", value: dt });
    }
    let steps = (t_end / dt).round().max(1.0);
    Ok(t_end / steps)
}

fn integrate(
    a: &Matrix,
    b: &Matrix,
    x0: &[f64],
    u: &ControlSignal,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let n = a.rows();
    let r = b.cols();
    let steps = (t_end / dt).round() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut x = x0.to_vec();
    times.push(0.0);
    states.push(x.clone());

    let mut uv = vec![0.0; r];
    let mut bu = vec![0.0; n];
    let mut stage = vec![0.0; n];
    let deriv = |x: &[f64], bu: &[f64]| -> Vec<f64> {
        let mut dx = a.matvec(x);
        for i in 0..n {
            dx[i] += bu[i];
        }
        dx
    };

    for step in 0..steps {
        // The input is held over the step (every ControlSignal is piecewise
        // constant); sampling it at stage times would smear its jumps across
        // the neighbouring step.
        u.value_into(step as f64 * dt, &mut uv);
        for i in 0..n {
            bu[i] = (0..r).map(|j| b[(i, j)] * uv[j]).sum();
        }
        let k1 = deriv(&x, &bu);
        for i in 0..n {
            stage[i] = x[i] + 0.5 * dt * k1[i];
        }
        let k2 = deriv(&stage, &bu);
        for i in 0..n {
            stage[i] = x[i] + 0.5 * dt * k2[i];
        }
        let k3 = deriv(&stage, &bu);
        for i in 0..n {
            stage[i] = x[i] + dt * k3[i];
        }
        let k4 = deriv(&stage, &bu);
        for i in 0..n {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t_next = if step + 1 == steps {
            t_end
        } else {
            (step + 1) as f64 * dt
        };
        times.push(t_next);
        states.push(x.clone());
    }
    Ok(Trajectory { times, states })
}

/// Largest deviation `max_t ||M x(t) - x_hat(t)||_inf` between the projected
/// full trajectory and the reduced system driven by the same input through
/// `a_hat` and `M B`. Both systems are integrated with the same step.
pub fn projection_discrepancy(
    sys: &LtiSystem,
    m: &Matrix,
    a_hat: &Matrix,
    x0: &[f64],
    u: &ControlSignal,
    t_end: f64,
    dt: f64,
) -> Result<f64> {
    if m.cols() != sys.state_dim() {
        return Err(Error::DimensionMismatch {
            op: "lumping matrix",
            expected: format!("{} columns", sys.state_dim()),
            got: format!("{} columns", m.cols()),
        });
    }
    if a_hat.rows() != m.rows() || a_hat.cols() != m.rows() {
        return Err(Error::DimensionMismatch {
            op: "lumped state matrix",
            expected: format!("{0}x{0}", m.rows()),
            got: format!("{}x{}", a_hat.rows(), a_hat.cols()),
        });
    }
    check_state(x0, sys.state_dim())?;
    u.check(sys.input_dim())?;
    let dt = effective_step(t_end, dt)?;

    let full = integrate(&sys.a, &sys.b, x0, u, t_end, dt)?;
    let b_hat = m.matmul(&sys.b);
    let x0_hat = m.matvec(x0);
    let reduced = integrate(a_hat, &b_hat, &x0_hat, u, t_end, dt)?;

    let mut worst = 0.0_f64;
    for (x, x_hat) in full.states.iter().zip(&reduced.states) {
        let mx = m.matvec(x);
        for (a, b) in mx.iter().zip(x_hat) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

/// [`projection_discrepancy`] for a validated scheme. For an exact lumping
/// the deviation stays at integration-roundoff size for any input.
pub fn lumped_trajectory_check(
    sys: &LtiSystem,
    scheme: &LumpingScheme,
    x0: &[f64],
    u: &ControlSignal,
    t_end: f64,
    dt: f64,
) -> Result<f64> {
    projection_discrepancy(sys, &scheme.m, &scheme.a_hat, x0, u, t_end, dt)
}

/// Matrix exponential by scaling and squaring of the Taylor series.
pub fn expm(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let norm = a.norm_inf();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(0.5_f64.powi(squarings as i32));
    let n = a.rows();
    let mut sum = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=40 {
        term = term.matmul(&scaled).scale(1.0 / k as f64);
        sum = sum.add(&term);
        if term.norm_inf() <= f64::EPSILON * sum.norm_inf() {
            break;
        }
    }
    let mut result = sum;
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    Ok(result)
}

/// Minimum-energy control steering `x0` to `x1` over `[0, t1]`.
///
/// The Gramian `W = integral of e^(A(t1-tau)) B B^T e^(A^T(t1-tau))` is
/// accumulated by composite midpoint quadrature on `steps` panels, with the
/// exponential evaluated afresh at each node. The control
/// `u(tau) = B^T e^(A^T(t1-tau)) W^-1 (x1 - e^(A t1) x0)` is sampled at the
/// panel midpoints and returned as a piecewise-constant signal on the grid.
///
/// Fails when the system is not completely controllable (carrying the rank
/// report) or when the Gramian condition number exceeds 1e12.
pub fn steer(
    sys: &LtiSystem,
    x0: &[f64],
    x1: &[f64],
    t1: f64,
    steps: usize,
) -> Result<ControlSignal> {
    let n = sys.state_dim();
    check_state(x0, n)?;
    check_state(x1, n)?;
    if !(t1 > 0.0 && t1.is_finite()) {
        return Err(Error::NonPositive { name: "t1", value: t1 });
    }
    if steps == 0 {
        return Err(Error::NonPositive {
            name: "quadrature steps",
            value: 0.0,
        });
    }
    let report = sys.is_controllable(None)?;
    if !report.verdict {
        return Err(Error::NotControllable(Box::new(report)));
    }

    let h = t1 / steps as f64;
    let mut gramian = Matrix::zeros(n, n);
    let mut inputs = Vec::with_capacity(steps);
    for i in 0..steps {
        let tau = (i as f64 + 0.5) * h;
        let phi = expm(&sys.a.scale(t1 - tau))?.matmul(&sys.b);
        gramian = gramian.add(&phi.matmul(&phi.transpose()).scale(h));
        inputs.push(phi);
    }

    let eig = symmetric_eigen(&gramian)?;
    let lambda_min = eig.values.first().copied().unwrap_or(0.0);
    let lambda_max = eig.values.last().copied().unwrap_or(0.0);
    let condition = if lambda_min > 0.0 {
        lambda_max / lambda_min
    } else {
        f64::INFINITY
    };
    if condition > GRAMIAN_CONDITION_LIMIT {
        return Err(Error::IllConditioned { condition });
    }

    let drift = expm(&sys.a.scale(t1))?.matvec(x0);
    let target: Vec<f64> = x1.iter().zip(&drift).map(|(a, b)| a - b).collect();
    let target = Matrix::new(n, 1, target)?;
    let z = cholesky_solve(&gramian, &target)?;

    let mut times: Vec<f64> = (0..=steps).map(|i| i as f64 * h).collect();
    times[steps] = t1;
    let values = inputs
        .into_iter()
        .map(|phi| phi.transpose().matmul(&z).col(0))
        .collect();
    Ok(ControlSignal::PiecewiseConstant { times, values })
}
