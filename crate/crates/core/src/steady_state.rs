//! Steady-state residuals for each solution concept and the root search
//! that turns them into [`SteadyState`] records.
//!
//! Every residual is a function of goodwill `A` alone: stage output comes
//! from the Cournot (or cartel) first-order condition at `A` and
//! advertising from inverting `Gamma(k, (n - 1) k) = delta A`.

use std::sync::Arc;

use serde::Serialize;

use crate::assumptions::{validate_assumptions, AssumptionReport};
use crate::concept::Concept;
use crate::cournot::{comparative_statics, smallest_stage_root, solve_cournot, StageSolution};
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::roots::{safeguarded_newton, with_central_derivative, RootOptions};

/// Uniform scan resolution on `(0, A_max]`.
pub const SCAN_POINTS: usize = 256;
/// Largest accepted `|residual|` at a reported root.
pub const RESIDUAL_TOL: f64 = 1e-10;
const ASSUMPTION_GRID: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyState {
    pub concept: Concept,
    pub goodwill: f64,
    pub output: f64,
    pub advertising: f64,
    pub lambda_own: f64,
    /// Costate on a rival's goodwill; only defined for the open loop,
    /// where it is identically zero.
    pub lambda_other: Option<f64>,
    pub residual: f64,
    pub iterations: usize,
    /// Root at `A = 0`.
    pub degenerate: bool,
    pub soc_satisfied: bool,
    #[serde(skip)]
    pub assumptions: Arc<AssumptionReport>,
}

/// All roots of one concept's residual, ascending in goodwill.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyStates {
    pub concept: Concept,
    pub states: Vec<SteadyState>,
}

impl SteadyStates {
    pub fn is_multiple(&self) -> bool {
        self.states.len() > 1
    }

    /// Smallest non-degenerate root, or the degenerate one if it is alone.
    pub fn primary(&self) -> &SteadyState {
        self.states
            .iter()
            .find(|s| !s.degenerate)
            .unwrap_or(&self.states[0])
    }
}

pub(crate) fn require_no_spillover(spec: &ModelSpec, concept: Concept) -> Result<()> {
    if spec.is_spillover_free() {
        Ok(())
    } else {
        Err(Error::ConceptNotApplicable {
            concept,
            reason: "advertising spills over to rivals (Gamma_K != 0)".into(),
        })
    }
}

/// Advertising per firm that keeps goodwill `A` constant:
/// `Gamma(k, (n - 1) k) = delta A`.
pub fn invert_accumulation(spec: &ModelSpec, goodwill: f64) -> Result<f64> {
    if !(goodwill >= 0.0) {
        return Err(Error::Precondition(format!(
            "A = {goodwill} must be nonnegative"
        )));
    }
    let target = spec.delta * goodwill;
    let k_max = spec.bounds.k_max;
    let gap = |k: f64| {
        let g = spec.accumulation_on_ray(k);
        (g.value - target, g.ray_slope(spec.n))
    };
    let (g0, _) = gap(0.0);
    if g0.abs() <= 1e-15 * (1.0 + target) {
        return Ok(0.0);
    }
    if g0 > 0.0 {
        return Err(Error::Range(format!(
            "delta A = {target} is below Gamma(0, 0)"
        )));
    }
    let (g_hi, _) = gap(k_max);
    if g_hi < 0.0 {
        return Err(Error::Range(format!(
            "delta A = {target} exceeds Gamma on [0, k_max = {k_max}]"
        )));
    }
    let opts = RootOptions {
        ftol: 1e-13 * target.max(1e-3),
        ..RootOptions::default()
    };
    let root = safeguarded_newton(|k| Ok(gap(k)), 0.0, k_max, g0, g_hi, opts)?;
    Ok(root.x)
}

/// `gamma'(k) / Gamma_k` on the symmetric ray: the current-value shadow
/// price of goodwill implied by the advertising first-order condition.
fn marginal_advertising_cost(spec: &ModelSpec, k: f64) -> f64 {
    spec.ad_cost.eval(k).d1 / spec.accumulation_on_ray(k).d_own
}

/// Open-loop residual `p_A q - (rho + delta) gamma'(k) / Gamma_k`.
pub fn residual_open_loop(spec: &ModelSpec, goodwill: f64) -> Result<f64> {
    let q = solve_cournot(spec, goodwill)?.q;
    let k = invert_accumulation(spec, goodwill)?;
    let d = spec.demand.symmetric(spec.n, goodwill, q);
    Ok(d.p_a * q - (spec.rho + spec.delta) * marginal_advertising_cost(spec, k))
}

/// Memoryless closed-loop residual
/// `[p_A + (n - 1) p_qj dq_j/dA_i] q - (rho + delta) gamma'(k) / Gamma_k`.
pub fn residual_closed_loop(spec: &ModelSpec, goodwill: f64) -> Result<f64> {
    require_no_spillover(spec, Concept::ClosedLoop)?;
    let q = solve_cournot(spec, goodwill)?.q;
    let k = invert_accumulation(spec, goodwill)?;
    let d = spec.demand.symmetric(spec.n, goodwill, q);
    let cs = comparative_statics(spec, goodwill, q)?;
    let effective = d.p_a + spec.rivals() * d.p_qj * cs.dq_other_da;
    Ok(effective * q - (spec.rho + spec.delta) * marginal_advertising_cost(spec, k))
}

/// Solves the linearised stage conditions for `(dq_i/dA_i, dq_j/dA_i)` by
/// elimination with partial pivoting.
fn stage_response(spec: &ModelSpec, goodwill: f64, q: f64) -> Result<(f64, f64)> {
    let d = spec.demand.symmetric(spec.n, goodwill, q);
    let own = 2.0 * d.p_qi + d.p_qiqi * q - spec.prod_cost.eval(q).d2;
    let psi = -(d.p_a + d.p_aqi * q);
    if spec.n < 2 {
        return Ok((psi / own, 0.0));
    }
    let x = d.p_qj + d.p_qiqj * q;
    let m = spec.rivals();
    let mut rows = [[own, m * x, psi], [x, own + (m - 1.0) * x, 0.0]];
    let mut sign = 1.0;
    if rows[1][0].abs() > rows[0][0].abs() {
        rows.swap(0, 1);
        sign = -1.0;
    }
    let factor = rows[1][0] / rows[0][0];
    let pivot = rows[0];
    for (x, p) in rows[1].iter_mut().zip(pivot) {
        *x -= factor * p;
    }
    let det = sign * rows[0][0] * rows[1][1];
    if !(det > 0.0) {
        return Err(Error::DeterminantSign(det));
    }
    let dq_j = rows[1][2] / rows[1][1];
    let dq_i = (rows[0][2] - rows[0][1] * dq_j) / rows[0][0];
    Ok((dq_i, dq_j))
}

/// Feedback residual built from the Hamilton–Jacobi–Bellman identity.
///
/// With `V_A = gamma'(k) / Gamma_k` from the advertising condition, the
/// derivative of the maximised identity in own goodwill is
///
/// ```text
/// rho V_A = p_A q + FOC * dq_i/dA + (n - 1) p_qj q dq_j/dA
///           - d(V_A)/dk * dk/dA * (Gamma - delta A) - delta V_A
/// ```
///
/// and the residual is the right side minus `rho V_A`. The drift term is
/// evaluated rather than dropped; it vanishes because `k` is chosen on the
/// steady-state locus.
pub fn residual_feedback(spec: &ModelSpec, goodwill: f64) -> Result<f64> {
    require_no_spillover(spec, Concept::Feedback)?;
    let q = solve_cournot(spec, goodwill)?.q;
    let k = invert_accumulation(spec, goodwill)?;
    let d = spec.demand.symmetric(spec.n, goodwill, q);
    let c = spec.prod_cost.eval(q);
    let gam = spec.ad_cost.eval(k);
    let acc = spec.accumulation_on_ray(k);
    let value_slope = gam.d1 / acc.d_own;

    let (dq_own, dq_other) = stage_response(spec, goodwill, q)?;
    let stage_foc = d.p + d.p_qi * q - c.d1;
    let drift = acc.value - spec.delta * goodwill;
    let dslope_dk = (gam.d2 * acc.d_own - gam.d1 * acc.d_own_own) / (acc.d_own * acc.d_own);
    let dk_da = spec.delta / acc.d_own;

    let envelope = d.p_a * q + stage_foc * dq_own + spec.rivals() * d.p_qj * q * dq_other
        - dslope_dk * dk_da * drift
        - spec.delta * value_slope;
    Ok(envelope - spec.rho * value_slope)
}

/// Marginal flow return on own goodwill that drives the costate:
/// `p_A q` for the open loop and
/// `[p_A + (n - 1) p_qj dq_j/dA_i] q` for the closed loop and feedback,
/// with `q` the stage equilibrium at `A`.
pub fn goodwill_return(spec: &ModelSpec, concept: Concept, goodwill: f64) -> Result<f64> {
    let q = solve_cournot(spec, goodwill)?.q;
    let d = spec.demand.symmetric(spec.n, goodwill, q);
    match concept {
        Concept::OpenLoop => Ok(d.p_a * q),
        Concept::ClosedLoop | Concept::Feedback => {
            require_no_spillover(spec, concept)?;
            let cs = comparative_statics(spec, goodwill, q)?;
            Ok((d.p_a + spec.rivals() * d.p_qj * cs.dq_other_da) * q)
        }
        Concept::Cartel => Err(Error::NotSupported(
            "no costate dynamics are derived for the cartel".into(),
        )),
    }
}

/// Joint-profit stage output: root of `p + [p_qi + (n - 1) p_qj] q - c'(q)`.
pub fn solve_cartel_output(spec: &ModelSpec, goodwill: f64) -> Result<StageSolution> {
    spec.check_goodwill(goodwill)?;
    let n = spec.n;
    let m = spec.rivals();
    let foc = move |q: f64| {
        let d = spec.demand.symmetric(n, goodwill, q);
        d.p + (d.p_qi + m * d.p_qj) * q - spec.prod_cost.eval(q).d1
    };
    let h = 1e-6 * (1.0 + spec.bounds.q_max).sqrt();
    let slope = move |q: f64| (foc(q + h) - foc((q - h).max(0.0))) / (q + h - (q - h).max(0.0));
    smallest_stage_root(spec, goodwill, |q| (foc(q), slope(q)), slope)
}

/// Cartel residual `p_A q^c [Gamma_k + (n - 1) Gamma_K] - (rho + delta) gamma'(k)`.
pub fn residual_cartel(spec: &ModelSpec, goodwill: f64) -> Result<f64> {
    let q = solve_cartel_output(spec, goodwill)?.q;
    let k = invert_accumulation(spec, goodwill)?;
    let d = spec.demand.symmetric(spec.n, goodwill, q);
    let acc = spec.accumulation_on_ray(k);
    Ok(d.p_a * q * acc.ray_slope(spec.n) - (spec.rho + spec.delta) * spec.ad_cost.eval(k).d1)
}

pub fn residual(spec: &ModelSpec, concept: Concept, goodwill: f64) -> Result<f64> {
    match concept {
        Concept::OpenLoop => residual_open_loop(spec, goodwill),
        Concept::ClosedLoop => residual_closed_loop(spec, goodwill),
        Concept::Feedback => residual_feedback(spec, goodwill),
        Concept::Cartel => residual_cartel(spec, goodwill),
    }
}

/// Feasible endpoint nearest the boundary between an infeasible and a
/// feasible goodwill level.
fn feasibility_edge<F>(f: &mut F, mut bad: f64, mut good: f64, mut f_good: f64) -> (f64, f64)
where
    F: FnMut(f64) -> Result<f64>,
{
    for _ in 0..80 {
        let mid = 0.5 * (bad + good);
        if mid == bad || mid == good {
            break;
        }
        match f(mid) {
            Ok(v) => {
                good = mid;
                f_good = v;
            }
            Err(_) => bad = mid,
        }
    }
    (good, f_good)
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    a: f64,
    value: f64,
    /// Starts a new feasible segment; no bracket spans the gap before it.
    segment_start: bool,
}

/// Roots of `f` on `[0, a_max]` as `(A, |f|, iterations)`.
fn scan_roots<F>(mut f: F, a_max: f64) -> Vec<(f64, f64, usize)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let grid: Vec<f64> = (0..=SCAN_POINTS)
        .map(|j| a_max * j as f64 / SCAN_POINTS as f64)
        .collect();
    let values: Vec<Result<f64>> = grid.iter().map(|&a| f(a)).collect();

    let mut samples: Vec<Sample> = Vec::new();
    let mut prev_ok = false;
    for (j, (&a, v)) in grid.iter().zip(&values).enumerate() {
        match v {
            Ok(value) => {
                if !prev_ok && j > 0 {
                    let (edge, fe) = feasibility_edge(&mut f, grid[j - 1], a, *value);
                    samples.push(Sample {
                        a: edge,
                        value: fe,
                        segment_start: true,
                    });
                    samples.push(Sample {
                        a,
                        value: *value,
                        segment_start: false,
                    });
                } else {
                    samples.push(Sample {
                        a,
                        value: *value,
                        segment_start: j == 0,
                    });
                }
                prev_ok = true;
            }
            Err(_) => {
                if prev_ok {
                    let last = *samples.last().unwrap();
                    let (edge, fe) = feasibility_edge(&mut f, a, last.a, last.value);
                    if edge > last.a {
                        samples.push(Sample {
                            a: edge,
                            value: fe,
                            segment_start: false,
                        });
                    }
                }
                prev_ok = false;
            }
        }
    }

    let mut roots: Vec<(f64, f64, usize)> = Vec::new();
    for s in &samples {
        if s.value.abs() <= 1e-14 {
            roots.push((s.a, s.value.abs(), 0));
        }
    }
    for w in samples.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi.segment_start || lo.value == 0.0 || hi.value == 0.0 {
            continue;
        }
        if lo.value.signum() == hi.value.signum() {
            continue;
        }
        let h = 1e-7 * (1.0 + lo.a.abs());
        let polished = safeguarded_newton(
            |a| with_central_derivative(&mut f, a, h),
            lo.a,
            hi.a,
            lo.value,
            hi.value,
            RootOptions {
                ftol: 1e-15,
                ..RootOptions::default()
            },
        );
        // A sign change that does not polish to a zero is a jump of the
        // residual, e.g. where the stage equilibrium switches branch.
        match polished {
            Ok(root) if root.fx.abs() <= RESIDUAL_TOL => {
                roots.push((root.x, root.fx.abs(), root.iterations))
            }
            _ => {}
        }
    }
    roots.sort_by(|x, y| x.0.total_cmp(&y.0));
    roots.dedup_by(|x, y| (x.0 - y.0).abs() <= 1e-9 * (1.0 + y.0.abs()));
    roots
}

/// Finds every steady state of `concept` on `[0, A_max]`.
///
/// The residual is scanned at [`SCAN_POINTS`] uniform points; where a stage
/// equilibrium stops existing the feasibility edge is located by bisection
/// so roots next to it are still bracketed. Each sign change is polished by
/// safeguarded Newton to `|residual| <= 1e-10`; sign changes that do not
/// polish to a zero are jumps and are discarded.
pub fn solve_steady_state(spec: &ModelSpec, concept: Concept) -> Result<SteadyStates> {
    if concept.requires_no_spillover() {
        require_no_spillover(spec, concept)?;
    }
    let report = Arc::new(validate_assumptions(spec, ASSUMPTION_GRID)?);
    let roots = scan_roots(|a| residual(spec, concept, a), spec.bounds.a_max);

    let mut states = Vec::with_capacity(roots.len());
    for (a, res, iterations) in roots {
        if res > RESIDUAL_TOL {
            return Err(Error::Range(format!(
                "{concept} residual polished only to {res} at A = {a}"
            )));
        }
        states.push(build_state(
            spec,
            concept,
            a,
            res,
            iterations,
            report.clone(),
        )?);
    }
    if states.is_empty() {
        return Err(Error::NoSteadyState {
            concept,
            a_max: spec.bounds.a_max,
        });
    }
    Ok(SteadyStates { concept, states })
}

fn build_state(
    spec: &ModelSpec,
    concept: Concept,
    goodwill: f64,
    residual: f64,
    iterations: usize,
    assumptions: Arc<AssumptionReport>,
) -> Result<SteadyState> {
    let k = invert_accumulation(spec, goodwill)?;
    let stage = match concept {
        Concept::Cartel => solve_cartel_output(spec, goodwill)?,
        _ => solve_cournot(spec, goodwill)?,
    };
    let q = stage.q;
    let (lambda_own, lambda_other) = match concept {
        Concept::Cartel => {
            let d = spec.demand.symmetric(spec.n, goodwill, q);
            (spec.n as f64 * d.p_a * q / (spec.rho + spec.delta), None)
        }
        Concept::OpenLoop => (marginal_advertising_cost(spec, k), Some(0.0)),
        Concept::ClosedLoop | Concept::Feedback => (marginal_advertising_cost(spec, k), None),
    };
    Ok(SteadyState {
        concept,
        goodwill,
        output: q,
        advertising: k,
        lambda_own,
        lambda_other,
        residual,
        iterations,
        degenerate: goodwill.abs() <= 1e-12,
        soc_satisfied: stage.soc_satisfied,
        assumptions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn accumulation_inversion() {
        let p0 = presets::lq_spillover();
        let a = 1.5 / 1.4625;
        let k = invert_accumulation(&p0, a).unwrap();
        assert!((k - 0.1 / 1.4625).abs() < 1e-15);
        assert_eq!(invert_accumulation(&p0, 0.0).unwrap(), 0.0);
        let p2 = presets::affine_saddle();
        assert!((invert_accumulation(&p2, 1.25).unwrap() - 0.125).abs() < 1e-15);
        assert!(invert_accumulation(&p2, -1.0).is_err());
        // beyond k_max = 20 needs delta A > 20
        assert!(matches!(
            invert_accumulation(&p2, 500.0),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn open_loop_residual_affine() {
        let p2 = presets::affine_saddle();
        for a in [0.0, 0.5, 1.25, 2.0, 3.0] {
            let want = 0.25 - 0.2 * a;
            assert!((residual_open_loop(&p2, a).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn open_loop_residual_pure_lq_is_increasing() {
        let p1 = presets::lq_no_spillover();
        for a in [1.0, 1.5, 2.0] {
            let want = 0.385 * a - 0.4;
            assert!((residual_open_loop(&p1, a).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_loop_residual_affine() {
        let p2 = presets::affine_saddle();
        let m = 1.0 + 0.25 / 3.75;
        let want = |a: f64| 0.4 * m * (1.0 + a) - 0.15 * (1.0 + 4.0 * a);
        assert!((residual_closed_loop(&p2, 1.25).unwrap() - 0.06).abs() < 1e-14);
        for a in [0.0, 1.0, 2.5] {
            assert!((residual_closed_loop(&p2, a).unwrap() - want(a)).abs() < 1e-14);
        }
    }

    #[test]
    fn spillover_blocks_closed_loop_and_feedback() {
        let p0 = presets::lq_spillover();
        for r in [residual_closed_loop(&p0, 2.0), residual_feedback(&p0, 2.0)] {
            assert!(matches!(r, Err(Error::ConceptNotApplicable { .. })));
        }
        assert!(matches!(
            solve_steady_state(&p0, Concept::Feedback),
            Err(Error::ConceptNotApplicable { .. })
        ));
    }

    #[test]
    fn feedback_matches_closed_loop_pointwise() {
        let p2 = presets::affine_saddle();
        for j in 0..=30 {
            let a = 0.1 * j as f64;
            let gap = residual_feedback(&p2, a).unwrap() - residual_closed_loop(&p2, a).unwrap();
            assert!(gap.abs() <= 1e-12, "A = {a}: {gap}");
        }
    }

    #[test]
    fn cartel_output_closed_forms() {
        let p0 = presets::lq_spillover();
        assert!((solve_cartel_output(&p0, 2.0).unwrap().q - 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(solve_cartel_output(&p0, 1.0).unwrap().q, 0.0);
        let p2 = presets::affine_saddle();
        assert!((solve_cartel_output(&p2, 0.6875).unwrap().q - 0.5625).abs() < 1e-14);
    }

    #[test]
    fn cartel_residual_affine() {
        let p2 = presets::affine_saddle();
        for a in [0.0, 0.6875, 2.0] {
            let want = (1.0 + a) / 3.0 - 0.15 * (1.0 + 4.0 * a);
            assert!((residual_cartel(&p2, a).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn open_loop_golden_spillover() {
        let ss = solve_steady_state(&presets::lq_spillover(), Concept::OpenLoop).unwrap();
        assert!(!ss.is_multiple());
        let s = ss.primary();
        assert!((s.goodwill - 1.5 / 1.4625).abs() < 1e-10);
        assert!((s.advertising - 0.1 / 1.4625).abs() < 1e-10);
        assert!((s.output - (1.5 / 1.4625 - 1.0) / 2.5).abs() < 1e-10);
        assert!((s.lambda_own - 0.1 / 1.4625).abs() < 1e-10);
        assert_eq!(s.lambda_other, Some(0.0));
    }

    #[test]
    fn affine_concepts() {
        let p2 = presets::affine_saddle();
        let cl = solve_steady_state(&p2, Concept::ClosedLoop).unwrap();
        let s = cl.primary();
        let a_cl = (0.4 * 16.0 / 15.0 - 0.15) / (0.6 - 0.4 * 16.0 / 15.0);
        assert!((s.goodwill - a_cl).abs() < 1e-10);
        assert!((s.goodwill - 1.596_153_846_153_846).abs() < 1e-10);
        assert!((s.advertising - 0.159_615_384_615_384_6).abs() < 1e-10);
        assert!((s.output - 1.038_461_538_461_538).abs() < 1e-10);
        assert_eq!(s.lambda_other, None);

        let c = solve_steady_state(&p2, Concept::Cartel).unwrap();
        let s = c.primary();
        assert!((s.goodwill - 0.6875).abs() < 1e-10);
        assert!((s.advertising - 0.06875).abs() < 1e-10);
        assert!((s.output - 0.5625).abs() < 1e-10);
        assert!((s.lambda_own - 2.0 * 0.5625 / 0.15).abs() < 1e-9);
    }

    #[test]
    fn zero_profit_economy_has_degenerate_cartel_root() {
        let spec = ModelSpec::new(
            2,
            0.05,
            0.1,
            crate::model::DemandPrimitive::Lq { b: 1.0, d: 0.5 },
            crate::model::CostPrimitive::Linear { slope: 0.0 },
            crate::model::CostPrimitive::quadratic(1.0),
            crate::model::AccumulationPrimitive::LinearSpillover { beta: 0.5 },
        )
        .unwrap();
        let ss = solve_steady_state(&spec, Concept::Cartel).unwrap();
        assert_eq!(ss.states.len(), 1);
        assert!(ss.states[0].degenerate);
        assert_eq!(ss.states[0].goodwill, 0.0);
    }

    #[test]
    fn jumps_are_not_roots() {
        let step = |a: f64| Ok(if a < 1.01 { -1.0 } else { 1.0 });
        assert!(scan_roots(step, 4.0).is_empty());
        let mixed = |a: f64| Ok(if a < 1.01 { a - 0.5 } else { a - 3.0 });
        let roots = scan_roots(mixed, 4.0);
        assert_eq!(roots.len(), 2);
        assert!((roots[0].0 - 0.5).abs() < 1e-12 && (roots[1].0 - 3.0).abs() < 1e-12);
    }
}
