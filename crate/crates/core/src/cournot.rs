//! Instantaneous symmetric Cournot stage and its comparative statics in
//! own goodwill.

use serde::Serialize;

use crate::assumptions::Classification;
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::roots::{safeguarded_newton, RootOptions};

/// Grid used to bracket the stage first-order condition on `[0, q_max]`.
const STAGE_GRID: usize = 64;
const STAGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageSolution {
    pub q: f64,
    /// First-order condition at `q`.
    pub residual: f64,
    /// `2 p_qi + p_qiqi q - c''(q)`.
    pub soc: f64,
    pub soc_satisfied: bool,
}

/// `p + p_qi q - c'(q)` at the symmetric profile, with its derivative along
/// that profile.
pub fn stage_foc(spec: &ModelSpec, goodwill: f64, q: f64) -> (f64, f64) {
    let d = spec.demand.symmetric(spec.n, goodwill, q);
    let c = spec.prod_cost.eval(q);
    let m = spec.rivals();
    let value = d.p + d.p_qi * q - c.d1;
    let slope = (d.p_qi + m * d.p_qj) + d.p_qi + (d.p_qiqi + m * d.p_qiqj) * q - c.d2;
    (value, slope)
}

pub fn stage_soc(spec: &ModelSpec, goodwill: f64, q: f64) -> f64 {
    let d = spec.demand.symmetric(spec.n, goodwill, q);
    2.0 * d.p_qi + d.p_qiqi * q - spec.prod_cost.eval(q).d2
}

/// Smallest root on `[0, q_max]` of a symmetric first-order condition,
/// preferring roots where `soc < 0`.
pub(crate) fn smallest_stage_root<F, S>(
    spec: &ModelSpec,
    goodwill: f64,
    mut foc: F,
    soc: S,
) -> Result<StageSolution>
where
    F: FnMut(f64) -> (f64, f64),
    S: Fn(f64) -> f64,
{
    let q_max = spec.bounds.q_max;
    let mut fallback: Option<StageSolution> = None;
    let mut accept = |q: f64, residual: f64| -> Option<StageSolution> {
        let s = soc(q);
        let sol = StageSolution {
            q,
            residual,
            soc: s,
            soc_satisfied: s < 0.0,
        };
        if sol.soc_satisfied {
            Some(sol)
        } else {
            fallback.get_or_insert(sol);
            None
        }
    };

    let (f0, _) = foc(0.0);
    if !f0.is_finite() {
        return Err(Error::NoEquilibrium {
            goodwill,
            reason: "first-order condition is not finite at q = 0".into(),
        });
    }
    if f0.abs() <= 1e-14 {
        if let Some(sol) = accept(0.0, f0) {
            return Ok(sol);
        }
    }

    let mut lo = 0.0;
    let mut f_lo = f0;
    for j in 1..=STAGE_GRID {
        let hi = q_max * j as f64 / STAGE_GRID as f64;
        let (f_hi, _) = foc(hi);
        if f_lo != 0.0 && f_hi.is_finite() && (f_hi == 0.0 || f_hi.signum() != f_lo.signum()) {
            let root =
                safeguarded_newton(|q| Ok(foc(q)), lo, hi, f_lo, f_hi, RootOptions::default())?;
            if root.fx.abs() > STAGE_TOL {
                return Err(Error::Range(format!(
                    "stage first-order condition polished only to {} at A = {goodwill}",
                    root.fx
                )));
            }
            if let Some(sol) = accept(root.x, root.fx) {
                return Ok(sol);
            }
        }
        lo = hi;
        f_lo = f_hi;
    }
    fallback.ok_or_else(|| Error::NoEquilibrium {
        goodwill,
        reason: if f0 < 0.0 {
            "marginal revenue is below marginal cost at q = 0".into()
        } else {
            format!("first-order condition keeps its sign on [0, {q_max}]")
        },
    })
}

/// Symmetric stage equilibrium output at goodwill `A`.
///
/// Returns the smallest nonnegative root of `p + p_qi q - c'(q)` that
/// satisfies the second-order condition; if none does, the smallest root is
/// returned with `soc_satisfied = false`.
pub fn solve_cournot(spec: &ModelSpec, goodwill: f64) -> Result<StageSolution> {
    spec.check_goodwill(goodwill)?;
    smallest_stage_root(
        spec,
        goodwill,
        |q| stage_foc(spec, goodwill, q),
        |q| stage_soc(spec, goodwill, q),
    )
}

/// Responses of own and rival stage output to a unilateral change of own
/// goodwill.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparativeStatics {
    pub dq_own_da: f64,
    pub dq_other_da: f64,
    /// `-(p_A + p_Aqi q)`
    pub psi: f64,
    pub delta: f64,
    pub classification: Classification,
}

/// Differentiates the firms' first-order conditions with respect to one
/// firm's goodwill at a symmetric stage equilibrium `(A, q)`.
///
/// With `own = 2 p_qi + p_qiqi q - c''` and `x = p_qj + p_qiqj q`, the
/// perturbed firm and each rival satisfy
///
/// ```text
/// own * dq_i + (n - 1) x * dq_j            = psi
/// x * dq_i + (own + (n - 2) x) * dq_j      = 0
/// ```
///
/// so `Delta = own (own + (n - 2) x) - (n - 1) x^2`,
/// `dq_i = (own + (n - 2) x) psi / Delta` and `dq_j = -x psi / Delta`.
pub fn comparative_statics(spec: &ModelSpec, goodwill: f64, q: f64) -> Result<ComparativeStatics> {
    spec.check_goodwill(goodwill)?;
    spec.check_output(q)?;
    let (foc, _) = stage_foc(spec, goodwill, q);
    if foc.abs() > 1e-8 {
        return Err(Error::Precondition(format!(
            "q = {q} does not solve the stage at A = {goodwill} (residual {foc})"
        )));
    }
    let d = spec.demand.symmetric(spec.n, goodwill, q);
    let c2 = spec.prod_cost.eval(q).d2;
    let own = 2.0 * d.p_qi + d.p_qiqi * q - c2;
    let x = d.cross_effect(q);
    let psi = -d.goodwill_effect(q);
    let classification = Classification::from_cross_effect(x);

    if spec.n < 2 {
        let delta = own * own;
        if !(delta > 0.0) {
            return Err(Error::DeterminantSign(delta));
        }
        return Ok(ComparativeStatics {
            dq_own_da: psi / own,
            dq_other_da: 0.0,
            psi,
            delta,
            classification,
        });
    }

    let m = spec.rivals();
    let rival_block = own + (m - 1.0) * x;
    let delta = own * rival_block - m * x * x;
    if !(delta > 0.0) {
        return Err(Error::DeterminantSign(delta));
    }
    Ok(ComparativeStatics {
        dq_own_da: rival_block / delta * psi,
        dq_other_da: -x / delta * psi,
        psi,
        delta,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn lq_stage_closed_form() {
        let spec = presets::lq_spillover();
        let s = solve_cournot(&spec, 2.0).unwrap();
        assert!((s.q - 0.4).abs() < 1e-14);
        assert!(s.residual.abs() <= 1e-10);
        assert!(s.soc_satisfied);
    }

    #[test]
    fn zero_output_when_goodwill_equals_cost() {
        let spec = presets::lq_spillover();
        assert_eq!(solve_cournot(&spec, 1.0).unwrap().q, 0.0);
    }

    #[test]
    fn affine_stage() {
        let spec = presets::affine_saddle();
        let s = solve_cournot(&spec, 1.25).unwrap();
        assert!((s.q - 0.9).abs() < 1e-14);
    }

    #[test]
    fn no_equilibrium_below_cost() {
        let spec = presets::lq_spillover();
        assert!(matches!(
            solve_cournot(&spec, 0.5),
            Err(Error::NoEquilibrium { .. })
        ));
    }

    #[test]
    fn lq_statics_duopoly() {
        let spec = presets::lq_spillover();
        let cs = comparative_statics(&spec, 2.0, 0.4).unwrap();
        assert_eq!(cs.psi, -1.0);
        assert!((cs.delta - 3.75).abs() < 1e-15);
        assert!((cs.dq_other_da + 0.5 / 3.75).abs() < 1e-15);
        assert!((cs.dq_own_da - 2.0 / 3.75).abs() < 1e-15);
        assert!((cs.dq_own_da + cs.dq_other_da - 0.4).abs() < 1e-15);
        assert_eq!(cs.classification, Classification::Substitutes);
    }

    #[test]
    fn no_cross_effect_no_rival_response() {
        let mut spec = presets::lq_no_spillover();
        spec.demand = crate::model::DemandPrimitive::Lq { b: 1.0, d: 0.0 };
        let cs = comparative_statics(&spec, 2.0, 0.5).unwrap();
        assert_eq!(cs.dq_other_da, 0.0);
        assert_eq!(cs.classification, Classification::Indeterminate);
    }

    #[test]
    fn stale_output_is_rejected() {
        let spec = presets::lq_spillover();
        assert!(matches!(
            comparative_statics(&spec, 2.0, 0.5),
            Err(Error::Precondition(_))
        ));
    }
}
