//! Linearisation of the symmetric state–costate system at a steady state.

use num_complex::Complex64;
use serde::Serialize;

use crate::concept::Concept;
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::steady_state::{goodwill_return, residual_open_loop, solve_steady_state, SteadyState};

/// Half-width of the band around `det = 0` classified as degenerate.
pub const DEGENERACY_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityClass {
    Saddle,
    Unstable,
    Degenerate,
}

impl StabilityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StabilityClass::Saddle => "saddle",
            StabilityClass::Unstable => "unstable",
            StabilityClass::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub concept: Concept,
    /// Rows `dA/dt`, `dlambda/dt`; columns `d/dA`, `d/dlambda`.
    pub jacobian: [[f64; 2]; 2],
    pub trace: f64,
    pub determinant: f64,
    /// Larger real part first.
    #[serde(serialize_with = "serialize_eigenvalues")]
    pub eigenvalues: [Complex64; 2],
    pub classification: StabilityClass,
    /// Unit eigenvector of the negative eigenvalue, first entry
    /// nonnegative. Present only for saddles.
    pub stable_eigenvector: Option<[f64; 2]>,
}

fn serialize_eigenvalues<S: serde::Serializer>(
    eig: &[Complex64; 2],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(2))?;
    for e in eig {
        seq.serialize_element(&[e.re, e.im])?;
    }
    seq.end()
}

impl StabilityReport {
    /// Trace, determinant, eigenvalues and classification of a 2 x 2 matrix.
    pub fn from_matrix(concept: Concept, m: [[f64; 2]; 2]) -> Self {
        let trace = m[0][0] + m[1][1];
        let determinant = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let disc = trace * trace - 4.0 * determinant;
        let eigenvalues = if disc >= 0.0 {
            let r = disc.sqrt();
            // avoid cancellation in the smaller root
            let s = if trace >= 0.0 { 1.0 } else { -1.0 };
            let big = 0.5 * (trace + s * r);
            let small = if big != 0.0 {
                determinant / big
            } else {
                0.5 * (trace - r)
            };
            let (hi, lo) = if big >= small {
                (big, small)
            } else {
                (small, big)
            };
            [Complex64::new(hi, 0.0), Complex64::new(lo, 0.0)]
        } else {
            let im = 0.5 * (-disc).sqrt();
            [
                Complex64::new(0.5 * trace, im),
                Complex64::new(0.5 * trace, -im),
            ]
        };
        let classification = if determinant < -DEGENERACY_BAND {
            StabilityClass::Saddle
        } else if determinant > DEGENERACY_BAND {
            StabilityClass::Unstable
        } else {
            StabilityClass::Degenerate
        };
        let stable_eigenvector = match classification {
            StabilityClass::Saddle => Some(eigenvector(m, eigenvalues[1].re)),
            _ => None,
        };
        StabilityReport {
            concept,
            jacobian: m,
            trace,
            determinant,
            eigenvalues,
            classification,
            stable_eigenvector,
        }
    }

    pub fn stable_eigenvalue(&self) -> Option<f64> {
        self.stable_eigenvector.map(|_| self.eigenvalues[1].re)
    }
}

fn eigenvector(m: [[f64; 2]; 2], mu: f64) -> [f64; 2] {
    // null vector of (m - mu I) from its better-conditioned row
    let r0 = [m[0][0] - mu, m[0][1]];
    let r1 = [m[1][0], m[1][1] - mu];
    let v = if r0[0].hypot(r0[1]) >= r1[0].hypot(r1[1]) {
        [r0[1], -r0[0]]
    } else {
        [r1[1], -r1[0]]
    };
    let norm = v[0].hypot(v[1]);
    let s = if v[0] < 0.0 { -1.0 } else { 1.0 };
    [s * v[0] / norm, s * v[1] / norm]
}

/// Derivative by central differences, falling back to one-sided ones when
/// a neighbour is infeasible.
pub(crate) fn derivative<F>(mut f: F, x: f64, h: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let up = f(x + h);
    let down = f(x - h);
    match (up, down) {
        (Ok(u), Ok(d)) => Ok((u - d) / (2.0 * h)),
        (Ok(u), Err(_)) => Ok((u - f(x)?) / h),
        (Err(_), Ok(d)) => Ok((f(x)? - d) / h),
        (Err(e), Err(_)) => Err(e),
    }
}

fn fd_step(a: f64) -> f64 {
    1e-5 * a.abs().max(1.0)
}

/// Linearises the symmetric state–costate dynamics at `ss`.
///
/// The `dA/dt` row is analytic: `-delta` and
/// `dGamma/dlambda = (Gamma_k + (n - 1) Gamma_K) Gamma_k^2 /
/// (gamma'' Gamma_k - gamma' [Gamma_kk + (n - 1) Gamma_kK])`.
/// The `dlambda/dt` row is `-d/dA` of the concept's goodwill return
/// (central differences of the composed map) and `rho + delta`.
pub fn jacobian(spec: &ModelSpec, ss: &SteadyState) -> Result<StabilityReport> {
    if ss.concept == Concept::Cartel {
        return Err(Error::NotSupported(
            "no state-costate Jacobian is derived for the cartel".into(),
        ));
    }
    let k = ss.advertising;
    let acc = spec.accumulation_on_ray(k);
    let gam = spec.ad_cost.eval(k);
    let curvature = gam.d2 * acc.d_own - gam.d1 * acc.ray_curvature(spec.n);
    if !(curvature > 0.0) {
        return Err(Error::AssumptionViolation(format!(
            "gamma'' Gamma_k - gamma' [Gamma_kk + (n - 1) Gamma_kK] = {curvature} is not positive at k = {k}"
        )));
    }
    let dgamma_dlambda = acc.ray_slope(spec.n) * acc.d_own * acc.d_own / curvature;
    let a = ss.goodwill;
    let dreturn = derivative(|x| goodwill_return(spec, ss.concept, x), a, fd_step(a))?;
    let m = [
        [-spec.delta, dgamma_dlambda],
        [-dreturn, spec.rho + spec.delta],
    ];
    Ok(StabilityReport::from_matrix(ss.concept, m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Decreasing,
    Increasing,
    Mixed,
}

impl Monotonicity {
    pub fn as_str(self) -> &'static str {
        match self {
            Monotonicity::Decreasing => "decreasing",
            Monotonicity::Increasing => "increasing",
            Monotonicity::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma1Report {
    pub verdict: Monotonicity,
    /// `(A, dPhi/dA)` pairs.
    pub slopes: Vec<(f64, f64)>,
    /// Sample points without a stage equilibrium; excluded from the verdict.
    pub infeasible: Vec<f64>,
    /// Open-loop steady state inside the interval, if any.
    pub steady_state: Option<f64>,
    pub slope_at_steady_state: Option<f64>,
    pub det_at_steady_state: Option<f64>,
    /// `sign(det Omega) == sign(dPhi/dA)` at the steady state.
    pub consistent: Option<bool>,
}

/// Samples the slope of the open-loop residual on `[lo, hi]` and, when an
/// open-loop steady state lies inside, checks that the slope and the
/// Jacobian determinant share a sign there.
///
/// The two are tied by `det Omega = dGamma/dlambda * dPhi/dA` with a
/// positive first factor.
pub fn lemma1_check(
    spec: &ModelSpec,
    interval: (f64, f64),
    samples: usize,
) -> Result<Lemma1Report> {
    let (lo, hi) = interval;
    if !(hi > lo) {
        return Err(Error::Precondition(format!(
            "interval [{lo}, {hi}] has no width"
        )));
    }
    if samples < 3 {
        return Err(Error::Precondition(format!(
            "need at least 3 samples, got {samples}"
        )));
    }
    spec.check_goodwill(lo)?;
    spec.check_goodwill(hi)?;

    let slope = |a: f64| derivative(|x| residual_open_loop(spec, x), a, fd_step(a) * 0.1);
    let mut slopes = Vec::with_capacity(samples);
    let mut infeasible = Vec::new();
    let mut last_err = None;
    for j in 0..samples {
        let a = lo + (hi - lo) * j as f64 / (samples - 1) as f64;
        match slope(a) {
            Ok(s) => slopes.push((a, s)),
            Err(e) => {
                infeasible.push(a);
                last_err = Some(e);
            }
        }
    }
    if slopes.is_empty() {
        return Err(last_err.expect("at least one sample was taken"));
    }
    let verdict = if slopes.iter().all(|&(_, s)| s < 0.0) {
        Monotonicity::Decreasing
    } else if slopes.iter().all(|&(_, s)| s > 0.0) {
        Monotonicity::Increasing
    } else {
        Monotonicity::Mixed
    };

    let mut report = Lemma1Report {
        verdict,
        slopes,
        infeasible,
        steady_state: None,
        slope_at_steady_state: None,
        det_at_steady_state: None,
        consistent: None,
    };
    if let Ok(states) = solve_steady_state(spec, Concept::OpenLoop) {
        if let Some(ss) = states
            .states
            .iter()
            .find(|s| s.goodwill >= lo && s.goodwill <= hi)
        {
            let s = slope(ss.goodwill)?;
            let det = jacobian(spec, ss)?.determinant;
            report.steady_state = Some(ss.goodwill);
            report.slope_at_steady_state = Some(s);
            report.det_at_steady_state = Some(det);
            report.consistent = Some(s.signum() == det.signum());
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn open_loop(spec: &ModelSpec) -> SteadyState {
        solve_steady_state(spec, Concept::OpenLoop)
            .unwrap()
            .primary()
            .clone()
    }

    #[test]
    fn pure_lq_open_loop_is_unstable() {
        let spec = presets::lq_no_spillover();
        let r = jacobian(&spec, &open_loop(&spec)).unwrap();
        assert!((r.jacobian[0][0] + 0.1).abs() < 1e-15);
        assert!((r.jacobian[0][1] - 1.0).abs() < 1e-15);
        assert!((r.jacobian[1][0] + 0.4).abs() < 1e-9);
        assert!((r.jacobian[1][1] - 0.15).abs() < 1e-15);
        assert!((r.trace - 0.05).abs() < 1e-12);
        assert!((r.determinant - 0.385).abs() < 1e-9);
        assert_eq!(r.classification, StabilityClass::Unstable);
        assert!(r.stable_eigenvector.is_none());
    }

    #[test]
    fn affine_open_loop_is_a_saddle() {
        let spec = presets::affine_saddle();
        let r = jacobian(&spec, &open_loop(&spec)).unwrap();
        assert!((r.jacobian[0][1] - 0.025).abs() < 1e-15);
        assert!((r.determinant + 0.005).abs() < 1e-9);
        assert!((r.eigenvalues[0].re - 0.1).abs() < 1e-9);
        assert!((r.eigenvalues[1].re + 0.05).abs() < 1e-9);
        assert_eq!(r.eigenvalues[0].im, 0.0);
        assert_eq!(r.classification, StabilityClass::Saddle);
        let v = r.stable_eigenvector.unwrap();
        let want = [1.0 / 5f64.sqrt(), 2.0 / 5f64.sqrt()];
        assert!((v[0] - want[0]).abs() < 1e-8 && (v[1] - want[1]).abs() < 1e-8);
    }

    #[test]
    fn affine_closed_loop_is_a_saddle() {
        let spec = presets::affine_saddle();
        let ss = solve_steady_state(&spec, Concept::ClosedLoop).unwrap();
        let r = jacobian(&spec, ss.primary()).unwrap();
        assert!((r.jacobian[1][0] + 0.4 * 16.0 / 15.0).abs() < 1e-9);
        assert!((r.determinant + 0.013 / 3.0).abs() < 1e-9);
        assert_eq!(r.classification, StabilityClass::Saddle);
    }

    #[test]
    fn cartel_has_no_jacobian() {
        let spec = presets::affine_saddle();
        let ss = solve_steady_state(&spec, Concept::Cartel).unwrap();
        assert!(matches!(
            jacobian(&spec, ss.primary()),
            Err(Error::NotSupported(_))
        ));
    }

    #[test]
    fn complex_and_degenerate_spectra() {
        let r = StabilityReport::from_matrix(Concept::OpenLoop, [[0.0, 1.0], [-1.0, 0.0]]);
        assert_eq!(r.classification, StabilityClass::Unstable);
        assert!((r.eigenvalues[0].im - 1.0).abs() < 1e-15);
        let r = StabilityReport::from_matrix(Concept::OpenLoop, [[1.0, 0.0], [0.0, 0.0]]);
        assert_eq!(r.classification, StabilityClass::Degenerate);
    }

    #[test]
    fn lemma1_regimes() {
        let p2 = lemma1_check(&presets::affine_saddle(), (0.5, 2.0), 7).unwrap();
        assert_eq!(p2.verdict, Monotonicity::Decreasing);
        assert_eq!(p2.consistent, Some(true));
        assert!(p2.slopes.iter().all(|&(_, s)| (s + 0.2).abs() < 1e-6));

        let p1 = lemma1_check(&presets::lq_no_spillover(), (0.5, 2.0), 7).unwrap();
        assert_eq!(p1.verdict, Monotonicity::Increasing);
        assert_eq!(p1.consistent, Some(true));
        // below A = c the pure linear family has no stage equilibrium
        assert_eq!(p1.infeasible, vec![0.5, 0.75]);
        assert!(p1.slopes.iter().all(|&(_, s)| (s - 0.385).abs() < 1e-6));
    }

    #[test]
    fn lemma1_rejects_empty_interval() {
        assert!(matches!(
            lemma1_check(&presets::affine_saddle(), (1.0, 1.0), 5),
            Err(Error::Precondition(_))
        ));
    }
}
