//! Integration of the symmetric state–costate system and saddle-path
//! construction.

use serde::Serialize;

use crate::concept::Concept;
use crate::cournot::solve_cournot;
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::roots::{safeguarded_newton, RootOptions};
use crate::stability::{jacobian, StabilityClass};
use crate::steady_state::{goodwill_return, require_no_spillover, solve_steady_state, SteadyState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathSample {
    pub t: f64,
    pub goodwill: f64,
    pub lambda: f64,
    pub advertising: f64,
    pub output: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimePath {
    pub concept: Concept,
    pub dt: f64,
    pub samples: Vec<PathSample>,
    pub converged: bool,
    /// `|A(T) - A*|` against the nearest steady state, when one exists.
    pub terminal_distance: Option<f64>,
    /// The trajectory left the admissible region and was truncated.
    pub escaped: bool,
}

impl TimePath {
    pub fn last(&self) -> &PathSample {
        self.samples.last().expect("paths hold at least one sample")
    }

    /// Least-squares slope of `ln |A(t) - target|` against `t`, skipping
    /// samples closer than `1e-12` to the target.
    pub fn decay_rate(&self, target: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .samples
            .iter()
            .filter(|s| (s.goodwill - target).abs() > 1e-12)
            .map(|s| (s.t, (s.goodwill - target).abs().ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    }
}

/// Stage output and advertising implied by goodwill `A` and costate
/// `lambda`: `q` solves the stage game, `k` solves
/// `gamma'(k) = lambda Gamma_k(k, (n - 1) k)`.
pub fn recover_controls(spec: &ModelSpec, goodwill: f64, lambda: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0) {
        return Err(Error::Precondition(format!(
            "costate {lambda} must be positive"
        )));
    }
    let q = solve_cournot(spec, goodwill)?.q;
    let gap = |k: f64| {
        let g = spec.ad_cost.eval(k);
        let acc = spec.accumulation_on_ray(k);
        (
            g.d1 - lambda * acc.d_own,
            g.d2 - lambda * acc.ray_curvature(spec.n),
        )
    };
    let k_max = spec.bounds.k_max;
    let (g0, _) = gap(0.0);
    let scale = spec.ad_cost.eval(0.0).d1.abs().max(lambda).max(1.0);
    if g0.abs() <= 1e-14 * scale {
        return Ok((q, 0.0));
    }
    if g0 > 0.0 {
        return Err(Error::Range(format!(
            "costate {lambda} is below gamma'(0) / Gamma_k(0); advertising would be negative"
        )));
    }
    let (g_hi, _) = gap(k_max);
    if g_hi < 0.0 {
        return Err(Error::Range(format!(
            "costate {lambda} calls for advertising beyond k_max = {k_max}"
        )));
    }
    let opts = RootOptions {
        ftol: 1e-14 * scale,
        ..RootOptions::default()
    };
    let k = safeguarded_newton(|k| Ok(gap(k)), 0.0, k_max, g0, g_hi, opts)?.x;
    Ok((q, k))
}

/// `(dA/dt, dlambda/dt)` of the symmetric system:
/// `dA/dt = Gamma(k, (n - 1) k) - delta A` and
/// `dlambda/dt = (rho + delta) lambda - R(A)`, where `R` is the concept's
/// goodwill return. Feedback shares the closed-loop dynamics.
pub fn vector_field(
    spec: &ModelSpec,
    concept: Concept,
    goodwill: f64,
    lambda: f64,
) -> Result<(f64, f64)> {
    if concept == Concept::Cartel {
        return Err(Error::NotSupported(
            "no costate dynamics are derived for the cartel".into(),
        ));
    }
    if concept.requires_no_spillover() {
        require_no_spillover(spec, concept)?;
    }
    let (_, k) = recover_controls(spec, goodwill, lambda)?;
    let da = spec.accumulation_on_ray(k).value - spec.delta * goodwill;
    let dl = (spec.rho + spec.delta) * lambda - goodwill_return(spec, concept, goodwill)?;
    Ok((da, dl))
}

fn rk4_step<F>(f: &mut F, state: (f64, f64), dt: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64, f64) -> Result<(f64, f64)>,
{
    let (a, l) = state;
    let k1 = f(a, l)?;
    let k2 = f(a + 0.5 * dt * k1.0, l + 0.5 * dt * k1.1)?;
    let k3 = f(a + 0.5 * dt * k2.0, l + 0.5 * dt * k2.1)?;
    let k4 = f(a + dt * k3.0, l + dt * k3.1)?;
    Ok((
        a + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        l + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    ))
}

/// Fixed-step RK4 from `(a0, lambda0)`; `direction = -1` integrates
/// backwards in time. Stops early (escaped) when a step cannot be
/// evaluated or leaves the box.
fn integrate(
    spec: &ModelSpec,
    concept: Concept,
    start: (f64, f64),
    horizon: f64,
    dt: f64,
    direction: f64,
) -> Result<(Vec<PathSample>, bool)> {
    let steps = (horizon / dt).round() as usize;
    let sample = |t: f64, (a, l): (f64, f64)| -> Result<PathSample> {
        let (q, k) = recover_controls(spec, a, l)?;
        Ok(PathSample {
            t,
            goodwill: a,
            lambda: l,
            advertising: k,
            output: q,
        })
    };
    let mut samples = vec![sample(0.0, start)?];
    let mut field = |a: f64, l: f64| {
        let (da, dl) = vector_field(spec, concept, a, l)?;
        Ok((direction * da, direction * dl))
    };
    let mut state = start;
    for i in 1..=steps {
        let next = match rk4_step(&mut field, state, dt) {
            Ok(s) => s,
            Err(_) => return Ok((samples, true)),
        };
        if spec.check_goodwill(next.0).is_err() {
            return Ok((samples, true));
        }
        match sample(i as f64 * dt, next) {
            Ok(s) => samples.push(s),
            Err(_) => return Ok((samples, true)),
        }
        state = next;
    }
    Ok((samples, false))
}

fn check_horizon(horizon: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Precondition(format!(
            "step dt = {dt} must be positive"
        )));
    }
    if !(horizon >= dt) {
        return Err(Error::Precondition(format!(
            "horizon T = {horizon} is shorter than dt = {dt}"
        )));
    }
    Ok(())
}

/// Integrates the nonlinear system forward from a user-supplied costate.
///
/// Open-loop costates are forward looking, so most initial costates miss
/// the stable manifold; [`saddle_path`] is the way to obtain convergent
/// trajectories.
pub fn simulate(
    spec: &ModelSpec,
    concept: Concept,
    a0: f64,
    lambda0: f64,
    horizon: f64,
    dt: f64,
) -> Result<TimePath> {
    check_horizon(horizon, dt)?;
    spec.check_goodwill(a0)?;
    let (samples, escaped) = integrate(spec, concept, (a0, lambda0), horizon, dt, 1.0)?;
    let end = samples.last().unwrap().goodwill;
    let target = solve_steady_state(spec, concept).ok().and_then(|ss| {
        ss.states
            .iter()
            .map(|s| s.goodwill)
            .min_by(|x, y| (x - end).abs().total_cmp(&(y - end).abs()))
    });
    let terminal_distance = target.map(|a| (end - a).abs());
    let converged = !escaped
        && matches!((terminal_distance, target), (Some(d), Some(a)) if d <= 1e-4 * (1.0 + a));
    Ok(TimePath {
        concept,
        dt,
        samples,
        converged,
        terminal_distance,
        escaped,
    })
}

/// Traces the stable branch into a saddle-point steady state.
///
/// Starts at `ss - epsilon * v` (with `v` the stable eigenvector, so the
/// start lies below `A*`), integrates the vector field backwards in time
/// for `horizon`, and returns the branch in forward time: the first sample
/// is the far end, the last sits `epsilon` away from the steady state.
pub fn saddle_path(
    spec: &ModelSpec,
    ss: &SteadyState,
    epsilon: f64,
    horizon: f64,
    dt: f64,
) -> Result<TimePath> {
    check_horizon(horizon, dt)?;
    let report = jacobian(spec, ss)?;
    if report.classification != StabilityClass::Saddle {
        return Err(Error::ConceptNotApplicable {
            concept: ss.concept,
            reason: format!(
                "steady state at A = {} is {}, not a saddle",
                ss.goodwill,
                report.classification.as_str()
            ),
        });
    }
    let v = report
        .stable_eigenvector
        .expect("saddles carry a stable eigenvector");
    let seed = (ss.goodwill - epsilon * v[0], ss.lambda_own - epsilon * v[1]);
    let (mut samples, escaped) = integrate(spec, ss.concept, seed, horizon, dt, -1.0)?;
    samples.reverse();
    let span = samples[0].t;
    for s in &mut samples {
        s.t = span - s.t;
    }
    let end = samples.last().unwrap().goodwill;
    let terminal_distance = (end - ss.goodwill).abs();
    Ok(TimePath {
        concept: ss.concept,
        dt,
        samples,
        converged: terminal_distance <= 1e-3 * (1.0 + ss.goodwill),
        terminal_distance: Some(terminal_distance),
        escaped,
    })
}
