//! Closed forms for linear demand, linear production cost, linear-quadratic
//! advertising cost and linear spillover.
//!
//! These serve as golden values for the numeric solvers. The intercept `a`
//! and the linear advertising term `gamma1` extend the textbook linear
//! example; with both at zero the formulas reduce to it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AccumulationPrimitive, CostPrimitive, DemandPrimitive, ModelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LqParams {
    pub n: usize,
    pub b: f64,
    pub d: f64,
    pub beta: f64,
    /// Quadratic advertising coefficient (`sigma`): cost is
    /// `gamma1 k + alpha / 2 k^2`.
    pub alpha: f64,
    pub delta: f64,
    pub rho: f64,
    pub c: f64,
    pub a: f64,
    pub gamma1: f64,
}

impl LqParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        b: f64,
        d: f64,
        beta: f64,
        alpha: f64,
        delta: f64,
        rho: f64,
        c: f64,
    ) -> Self {
        LqParams {
            n,
            b,
            d,
            beta,
            alpha,
            delta,
            rho,
            c,
            a: 0.0,
            gamma1: 0.0,
        }
    }

    pub fn with_intercept(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    pub fn with_linear_ad_cost(mut self, gamma1: f64) -> Self {
        self.gamma1 = gamma1;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        if !(self.b > 0.0) {
            return bad("B", "must be positive");
        }
        if !(self.d >= 0.0) {
            return bad("D", "must be nonnegative");
        }
        if !(0.0..1.0).contains(&self.beta) {
            return bad("beta", "must lie in [0, 1)");
        }
        if !(self.alpha > 0.0) {
            return bad("alpha", "must be positive");
        }
        if !(self.c >= 0.0 && self.a >= 0.0 && self.gamma1 >= 0.0) {
            return bad("c", "c, a and gamma1 must be nonnegative");
        }
        Ok(())
    }

    /// The equivalent numeric model.
    pub fn to_spec(&self) -> Result<ModelSpec> {
        self.validate()?;
        let demand = if self.a == 0.0 {
            DemandPrimitive::Lq {
                b: self.b,
                d: self.d,
            }
        } else {
            DemandPrimitive::LqAffine {
                a: self.a,
                b: self.b,
                d: self.d,
            }
        };
        ModelSpec::new(
            self.n,
            self.rho,
            self.delta,
            demand,
            CostPrimitive::Linear { slope: self.c },
            CostPrimitive::LinearQuadratic {
                linear: self.gamma1,
                quadratic: self.alpha,
            },
            AccumulationPrimitive::LinearSpillover { beta: self.beta },
        )
    }

    fn rivals(&self) -> f64 {
        self.n as f64 - 1.0
    }

    /// `1 + (n - 1) beta`
    fn ray(&self) -> f64 {
        1.0 + self.rivals() * self.beta
    }

    /// Slope of the symmetric Cournot first-order condition,
    /// `2B + (n - 1) D`.
    fn cournot_slope(&self) -> f64 {
        2.0 * self.b + self.rivals() * self.d
    }

    /// Slope of the cartel first-order condition, `2 [B + (n - 1) D]`.
    fn cartel_slope(&self) -> f64 {
        2.0 * (self.b + self.rivals() * self.d)
    }

    fn margin(&self) -> f64 {
        self.a - self.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LqSteadyState {
    pub goodwill: f64,
    pub advertising: f64,
    pub output: f64,
    /// All three levels are nonnegative.
    pub admissible: bool,
}

impl LqSteadyState {
    fn new(goodwill: f64, advertising: f64, output: f64) -> Self {
        LqSteadyState {
            goodwill,
            advertising,
            output,
            admissible: goodwill >= 0.0 && advertising >= 0.0 && output >= 0.0,
        }
    }
}

fn nonzero(denominator: f64, what: &str) -> Result<f64> {
    if denominator.abs() <= 1e-14 {
        Err(Error::Degenerate(format!("{what} denominator vanishes")))
    } else {
        Ok(denominator)
    }
}

/// Open-loop steady state. For `a = gamma1 = 0`:
/// `A* = [1 + (n-1) beta] c / (1 + (n-1) beta - alpha delta (rho + delta) [2B + (n-1) D])`.
pub fn lq_open_loop(p: &LqParams) -> Result<LqSteadyState> {
    p.validate()?;
    let s = p.ray();
    let slope = p.cournot_slope();
    let r = p.rho + p.delta;
    let den = nonzero(s - p.alpha * p.delta * r * slope, "open-loop")?;
    let a = s * (r * p.gamma1 * slope - p.margin()) / den;
    Ok(LqSteadyState::new(
        a,
        p.delta * a / s,
        (p.margin() + a) / slope,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CartelConvention {
    /// Costate attached to the aggregate accumulation constraint once.
    PerFirm,
    /// Costate term scaled by `n` along with the profits.
    Aggregate,
}

/// Cartel steady state under either Hamiltonian convention.
///
/// Per firm (`a = gamma1 = 0`):
/// `A = s^2 c / (s^2 - 2 alpha delta (rho + delta) (B + (n-1) D))`;
/// aggregate:
/// `A = s^2 n c / (n s^2 - 2 alpha delta (rho + n delta) (B + (n-1) D))`,
/// with `s = 1 + (n-1) beta`.
pub fn lq_cartel(p: &LqParams, convention: CartelConvention) -> Result<LqSteadyState> {
    p.validate()?;
    let s = p.ray();
    let slope = p.cartel_slope();
    let nf = p.n as f64;
    let a = match convention {
        CartelConvention::PerFirm => {
            let r = p.rho + p.delta;
            let den = nonzero(s * s - p.alpha * p.delta * r * slope, "per-firm cartel")?;
            s * (r * p.gamma1 * slope - s * p.margin()) / den
        }
        CartelConvention::Aggregate => {
            let r = p.rho + nf * p.delta;
            let den = nonzero(
                nf * s * s - p.alpha * p.delta * r * slope,
                "aggregate cartel",
            )?;
            s * (r * p.gamma1 * slope - nf * s * p.margin()) / den
        }
    };
    Ok(LqSteadyState::new(
        a,
        p.delta * a / s,
        (p.margin() + a) / slope,
    ))
}

/// `Delta = 4B^2 + 2 (n - 2) B D - (n - 1) D^2`, the determinant of the
/// linearised stage conditions; `4B^2 - D^2` for a duopoly.
pub fn lq_stage_determinant(p: &LqParams) -> f64 {
    let (b, d) = (p.b, p.d);
    4.0 * b * b + 2.0 * (p.n as f64 - 2.0) * b * d - p.rivals() * d * d
}

/// Memoryless closed-loop steady state (no spillover). The goodwill return
/// is scaled by `m = 1 + (n - 1) D^2 / Delta`.
pub fn lq_closed_loop(p: &LqParams) -> Result<LqSteadyState> {
    p.validate()?;
    if p.beta != 0.0 {
        return Err(Error::ConceptNotApplicable {
            concept: crate::Concept::ClosedLoop,
            reason: format!("spillover beta = {} is not zero", p.beta),
        });
    }
    let delta_stage = lq_stage_determinant(p);
    if !(delta_stage > 0.0) {
        return Err(Error::DeterminantSign(delta_stage));
    }
    let m = if p.n >= 2 {
        1.0 + p.rivals() * p.d * p.d / delta_stage
    } else {
        1.0
    };
    let slope = p.cournot_slope();
    let r = p.rho + p.delta;
    let den = nonzero(m - r * p.alpha * p.delta * slope, "closed-loop")?;
    let a = (r * p.gamma1 * slope - m * p.margin()) / den;
    Ok(LqSteadyState::new(a, p.delta * a, (p.margin() + a) / slope))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p0() -> LqParams {
        LqParams::new(2, 1.0, 0.5, 0.5, 1.0, 0.1, 0.05, 1.0)
    }

    fn p2() -> LqParams {
        LqParams::new(2, 1.0, 0.5, 0.0, 40.0, 0.1, 0.05, 1.0)
            .with_intercept(2.0)
            .with_linear_ad_cost(1.0)
    }

    #[test]
    fn open_loop_textbook_case() {
        let s = lq_open_loop(&p0()).unwrap();
        assert!((s.goodwill - 1.5 / 1.4625).abs() < 1e-15);
        assert!((s.advertising - 0.1 / 1.4625).abs() < 1e-15);
        assert!(s.admissible);
    }

    #[test]
    fn zero_cost_economy() {
        let mut p = p0();
        p.c = 0.0;
        let s = lq_open_loop(&p).unwrap();
        assert_eq!((s.goodwill, s.advertising), (0.0, 0.0));
    }

    #[test]
    fn affine_open_loop() {
        let s = lq_open_loop(&p2()).unwrap();
        assert!((s.goodwill - 1.25).abs() < 1e-14);
        assert!((s.advertising - 0.125).abs() < 1e-15);
        assert!((s.output - 0.9).abs() < 1e-15);
    }

    #[test]
    fn cartel_conventions() {
        let s = lq_cartel(&p0(), CartelConvention::PerFirm).unwrap();
        assert!((s.goodwill - 2.25 / 2.205).abs() < 1e-15);
        assert!((s.advertising - 0.15 / 2.205).abs() < 1e-15);
        let s = lq_cartel(&p0(), CartelConvention::Aggregate).unwrap();
        assert!((s.goodwill - 4.5 / 4.425).abs() < 1e-15);
        assert!((s.advertising - 0.3 / 4.425).abs() < 1e-15);
        let s = lq_cartel(&p2(), CartelConvention::PerFirm).unwrap();
        assert!((s.goodwill - 0.6875).abs() < 1e-15);
    }

    #[test]
    fn monopoly_conventions_coincide() {
        let mut p = p0();
        p.n = 1;
        p.beta = 0.0;
        let a = lq_cartel(&p, CartelConvention::PerFirm).unwrap();
        let b = lq_cartel(&p, CartelConvention::Aggregate).unwrap();
        assert!((a.goodwill - b.goodwill).abs() < 1e-15);
    }

    #[test]
    fn closed_loop_forms() {
        let mut p1 = p0();
        p1.beta = 0.0;
        let s = lq_closed_loop(&p1).unwrap();
        assert!((s.goodwill - (0.4 * 16.0 / 15.0) / (0.4 * 16.0 / 15.0 - 0.015)).abs() < 1e-14);
        assert!((s.goodwill - 1.036_437_246_963_562_7).abs() < 1e-12);
        let s = lq_closed_loop(&p2()).unwrap();
        assert!((s.goodwill - 1.596_153_846_153_846).abs() < 1e-12);
        assert!(matches!(
            lq_closed_loop(&p0()),
            Err(Error::ConceptNotApplicable { .. })
        ));
    }

    #[test]
    fn independent_markets_collapse_closed_loop() {
        let mut p = p0();
        p.beta = 0.0;
        p.d = 0.0;
        let open = lq_open_loop(&p).unwrap();
        let closed = lq_closed_loop(&p).unwrap();
        assert_eq!(open.goodwill, closed.goodwill);
    }

    #[test]
    fn vanishing_denominator() {
        // 1 - alpha * 0.1 * 0.15 * 2.5 = 0
        let mut p = p0();
        p.beta = 0.0;
        p.alpha = 1.0 / (0.1 * 0.15 * 2.5);
        assert!(matches!(lq_open_loop(&p), Err(Error::Degenerate(_))));
    }
}
