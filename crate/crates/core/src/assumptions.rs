//! Grid checks of the standing sign and curvature assumptions, and a
//! finite-difference audit of the partials a primitive reports.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Substitutes,
    Complements,
    Indeterminate,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Substitutes => "substitutes",
            Classification::Complements => "complements",
            Classification::Indeterminate => "indeterminate",
        }
    }

    /// Local classification from the sign of `p_qj + p_qiqj q`.
    pub fn from_cross_effect(x: f64) -> Self {
        if x < 0.0 {
            Classification::Substitutes
        } else if x > 0.0 {
            Classification::Complements
        } else {
            Classification::Indeterminate
        }
    }
}

/// Grid location at which a check attained its worst margin.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ProbePoint {
    pub goodwill: f64,
    pub output: f64,
    pub investment: f64,
    pub rivals_investment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionCheck {
    pub id: &'static str,
    pub status: Status,
    pub worst: ProbePoint,
    /// Smallest slack over the grid; negative (or zero for strict
    /// inequalities) when the check fails.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub checks: Vec<AssumptionCheck>,
    pub classification: Classification,
}

impl AssumptionReport {
    pub fn check(&self, id: &str) -> Option<&AssumptionCheck> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn passed(&self, id: &str) -> bool {
        self.check(id)
            .map(|c| c.status == Status::Pass)
            .unwrap_or(false)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AssumptionCheck> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }
}

struct Tracker {
    id: &'static str,
    strict: bool,
    margin: f64,
    worst: ProbePoint,
}

impl Tracker {
    fn new(id: &'static str, strict: bool) -> Self {
        Tracker {
            id,
            strict,
            margin: f64::INFINITY,
            worst: ProbePoint::default(),
        }
    }

    fn observe(&mut self, slack: f64, at: ProbePoint) {
        // NaN slack counts as a violation
        let slack = if slack.is_nan() {
            f64::NEG_INFINITY
        } else {
            slack
        };
        if slack < self.margin {
            self.margin = slack;
            self.worst = at;
        }
    }

    fn finish(self) -> AssumptionCheck {
        let ok = if self.strict {
            self.margin > 0.0
        } else {
            self.margin >= 0.0
        };
        AssumptionCheck {
            id: self.id,
            status: if ok { Status::Pass } else { Status::Fail },
            worst: self.worst,
            margin: self.margin,
        }
    }
}

/// Cell midpoints of `[0, hi]`; the boundary itself is never probed.
fn midpoints(hi: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| hi * (i as f64 + 0.5) / count as f64)
}

/// Evaluates every standing inequality on a `probe_grid`-per-axis grid of
/// the admissible box. Failures are report entries, never errors.
pub fn validate_assumptions(spec: &ModelSpec, probe_grid: usize) -> Result<AssumptionReport> {
    if probe_grid < 3 {
        return Err(Error::Precondition(format!(
            "probe grid needs at least 3 points per axis, got {probe_grid}"
        )));
    }
    let n = spec.n;
    let rivals = spec.rivals();
    let b = spec.bounds;

    let mut own_slope = Tracker::new("demand.own_slope", true);
    let mut cross_slope = Tracker::new("demand.cross_slope", false);
    let mut cross_strict = Tracker::new("demand.cross_slope_strict", true);
    let mut goodwill_slope = Tracker::new("demand.goodwill_slope", true);
    let mut aq = Tracker::new("demand.goodwill_output", true);
    let mut min_cross = f64::INFINITY;
    let mut max_cross = f64::NEG_INFINITY;

    for a in midpoints(b.a_max, probe_grid) {
        for q in midpoints(b.q_max, probe_grid) {
            let d = spec.demand.symmetric(n, a, q);
            let at = ProbePoint {
                goodwill: a,
                output: q,
                ..ProbePoint::default()
            };
            own_slope.observe(-d.p_qi, at);
            if n >= 2 {
                cross_slope.observe(-d.p_qj, at);
                cross_strict.observe(-d.p_qj, at);
                let x = d.cross_effect(q);
                min_cross = min_cross.min(x);
                max_cross = max_cross.max(x);
            }
            goodwill_slope.observe(d.p_a, at);
            aq.observe(d.goodwill_effect(q), at);
        }
    }

    let mut ad_increasing = Tracker::new("ad_cost.increasing", true);
    let mut ad_convex = Tracker::new("ad_cost.strictly_convex", true);
    for k in midpoints(b.k_max, probe_grid) {
        let g = spec.ad_cost.eval(k);
        let at = ProbePoint {
            investment: k,
            ..ProbePoint::default()
        };
        ad_increasing.observe(g.d1, at);
        ad_convex.observe(g.d2, at);
    }

    let mut prod_increasing = Tracker::new("prod_cost.increasing", true);
    let mut prod_convex = Tracker::new("prod_cost.convex", false);
    for q in midpoints(b.q_max, probe_grid) {
        let c = spec.prod_cost.eval(q);
        let at = ProbePoint {
            output: q,
            ..ProbePoint::default()
        };
        prod_increasing.observe(c.d1, at);
        prod_convex.observe(c.d2, at);
    }

    let mut acc_positive = Tracker::new("accumulation.positive", true);
    let mut acc_own = Tracker::new("accumulation.own_increasing", true);
    let mut acc_spill = Tracker::new("accumulation.spillover_nonnegative", false);
    let mut acc_concave = Tracker::new("accumulation.own_concave", false);
    let mut acc_ray = Tracker::new("accumulation.ray_concave", false);
    let mut acc_direct = Tracker::new("accumulation.direct_dominates", true);
    let rivals_max = rivals.max(1.0) * b.k_max;
    for k in midpoints(b.k_max, probe_grid) {
        for big_k in midpoints(rivals_max, probe_grid) {
            let big_k = if n >= 2 { big_k } else { 0.0 };
            let g = spec.accumulation.eval(k, big_k);
            let at = ProbePoint {
                investment: k,
                rivals_investment: big_k,
                ..ProbePoint::default()
            };
            acc_positive.observe(g.value, at);
            acc_own.observe(g.d_own, at);
            acc_spill.observe(g.d_rivals, at);
            acc_concave.observe(-g.d_own_own, at);
            acc_ray.observe(-g.ray_curvature(n), at);
            acc_direct.observe(g.d_own - g.d_rivals, at);
        }
    }

    let classification = if n < 2 {
        Classification::Indeterminate
    } else if max_cross < 0.0 {
        Classification::Substitutes
    } else if min_cross > 0.0 {
        Classification::Complements
    } else {
        Classification::Indeterminate
    };

    let mut checks = vec![own_slope.finish()];
    if n >= 2 {
        checks.push(cross_slope.finish());
        checks.push(cross_strict.finish());
    }
    checks.extend(
        [
            goodwill_slope,
            aq,
            acc_positive,
            acc_own,
            acc_spill,
            acc_concave,
            acc_ray,
            acc_direct,
            ad_increasing,
            ad_convex,
            prod_increasing,
            prod_convex,
        ]
        .into_iter()
        .map(Tracker::finish),
    );

    Ok(AssumptionReport {
        checks,
        classification,
    })
}

/// Symmetric interior point for [`finite_diff_audit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditPoint {
    pub goodwill: f64,
    pub output: f64,
    pub investment: f64,
}

/// Largest discrepancy between a reported partial and its central
/// difference, relative to `max(1, |difference estimate|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditResult {
    pub max_discrepancy: f64,
    /// Name of the partial that attained it.
    pub worst: &'static str,
}

/// Compares every declared partial of the spec's primitives with central
/// differences of step `h` at `point`.
///
/// First partials are differenced from values; second partials from the
/// reported first partials.
pub fn finite_diff_audit(spec: &ModelSpec, point: AuditPoint, h: f64) -> Result<AuditResult> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain(format!("step h = {h} must be positive")));
    }
    let n = spec.n;
    let AuditPoint {
        goodwill: a,
        output: q,
        investment: k,
    } = point;
    let big_k = spec.rivals() * k;
    let b = spec.bounds;
    let inside = |x: f64, hi: f64| x - h >= 0.0 && x + h <= hi;
    for (name, x, hi) in [("A", a, b.a_max), ("q", q, b.q_max), ("k", k, b.k_max)] {
        if !inside(x, hi) {
            return Err(Error::Domain(format!(
                "{name} = {x} is within h = {h} of the box [0, {hi}]"
            )));
        }
    }
    let with_rivals = n >= 2;
    if with_rivals && big_k - h < 0.0 {
        return Err(Error::Domain(format!(
            "rival investment {big_k} is within h = {h} of 0"
        )));
    }

    let mut worst = AuditResult {
        max_discrepancy: 0.0,
        worst: "",
    };
    let mut compare = |name: &'static str, fd: f64, reported: f64| {
        let rel = (fd - reported).abs() / fd.abs().max(1.0);
        let rel = if rel.is_nan() { f64::INFINITY } else { rel };
        if rel > worst.max_discrepancy || worst.worst.is_empty() {
            worst.max_discrepancy = rel;
            worst.worst = name;
        }
    };
    let c2 = |up: f64, down: f64| (up - down) / (2.0 * h);

    let demand = &spec.demand;
    let price = |a: f64, own: f64, rival: f64| demand.price(n, a, own, rival, q);
    let part = |a: f64, own: f64, rival: f64| demand.partials(n, a, own, rival, q);
    let base = part(a, q, q);

    compare("p", price(a, q, q), base.p);
    compare("p_A", c2(price(a + h, q, q), price(a - h, q, q)), base.p_a);
    compare(
        "p_qi",
        c2(price(a, q + h, q), price(a, q - h, q)),
        base.p_qi,
    );
    compare(
        "p_qiqi",
        c2(part(a, q + h, q).p_qi, part(a, q - h, q).p_qi),
        base.p_qiqi,
    );
    compare(
        "p_Aqi",
        c2(part(a + h, q, q).p_qi, part(a - h, q, q).p_qi),
        base.p_aqi,
    );
    if with_rivals {
        compare(
            "p_qj",
            c2(price(a, q, q + h), price(a, q, q - h)),
            base.p_qj,
        );
        compare(
            "p_qiqj",
            c2(part(a, q, q + h).p_qi, part(a, q, q - h).p_qi),
            base.p_qiqj,
        );
        compare(
            "p_qjqj",
            c2(part(a, q, q + h).p_qj, part(a, q, q - h).p_qj),
            base.p_qjqj,
        );
    }

    for (label_1, label_2, cost, x) in [
        ("c'", "c''", &spec.prod_cost, q),
        ("gamma'", "gamma''", &spec.ad_cost, k),
    ] {
        let e = cost.eval(x);
        compare(
            label_1,
            c2(cost.eval(x + h).value, cost.eval(x - h).value),
            e.d1,
        );
        compare(label_2, c2(cost.eval(x + h).d1, cost.eval(x - h).d1), e.d2);
    }

    let acc = &spec.accumulation;
    let g = acc.eval(k, big_k);
    compare(
        "Gamma_k",
        c2(acc.eval(k + h, big_k).value, acc.eval(k - h, big_k).value),
        g.d_own,
    );
    compare(
        "Gamma_kk",
        c2(acc.eval(k + h, big_k).d_own, acc.eval(k - h, big_k).d_own),
        g.d_own_own,
    );
    if with_rivals {
        compare(
            "Gamma_K",
            c2(acc.eval(k, big_k + h).value, acc.eval(k, big_k - h).value),
            g.d_rivals,
        );
        compare(
            "Gamma_kK",
            c2(acc.eval(k, big_k + h).d_own, acc.eval(k, big_k - h).d_own),
            g.d_own_rivals,
        );
    }

    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        AccumulationPrimitive, CostPrimitive, DemandModel, DemandPrimitive, DerivBundle,
    };
    use crate::presets;
    use std::sync::Arc;

    #[test]
    fn lq_with_cross_effect_is_substitutes() {
        let r = validate_assumptions(&presets::lq_no_spillover(), 5).unwrap();
        assert_eq!(r.classification, Classification::Substitutes);
        assert!(r.passed("demand.own_slope"));
        assert!(r.passed("demand.goodwill_output"));
        // linear spillover with beta = 0 leaves Gamma_K = 0, weakly fine
        assert!(r.passed("accumulation.spillover_nonnegative"));
    }

    #[test]
    fn lq_without_cross_effect_is_indeterminate() {
        let spec = ModelSpec::new(
            2,
            0.05,
            0.1,
            DemandPrimitive::Lq { b: 1.0, d: 0.0 },
            CostPrimitive::Linear { slope: 1.0 },
            CostPrimitive::quadratic(1.0),
            AccumulationPrimitive::LinearSpillover { beta: 0.0 },
        )
        .unwrap();
        let r = validate_assumptions(&spec, 4).unwrap();
        assert_eq!(r.classification, Classification::Indeterminate);
        assert!(r.passed("demand.cross_slope"));
        assert!(!r.passed("demand.cross_slope_strict"));
    }

    #[test]
    fn linear_advertising_cost_fails_strict_convexity() {
        let spec = ModelSpec::new(
            2,
            0.05,
            0.1,
            DemandPrimitive::Lq { b: 1.0, d: 0.5 },
            CostPrimitive::Linear { slope: 1.0 },
            CostPrimitive::LinearQuadratic {
                linear: 1.0,
                quadratic: 0.0,
            },
            AccumulationPrimitive::LinearSpillover { beta: 0.0 },
        )
        .unwrap();
        let r = validate_assumptions(&spec, 3).unwrap();
        let check = r.check("ad_cost.strictly_convex").unwrap();
        assert_eq!(check.status, Status::Fail);
        assert_eq!(check.margin, 0.0);
        assert!(r.passed("ad_cost.increasing"));
    }

    #[test]
    fn tiny_grid_is_rejected() {
        assert!(validate_assumptions(&presets::lq_spillover(), 2).is_err());
    }

    #[test]
    fn validation_is_pure() {
        let spec = presets::affine_saddle();
        assert_eq!(
            validate_assumptions(&spec, 6).unwrap(),
            validate_assumptions(&spec, 6).unwrap()
        );
    }

    #[test]
    fn builtin_audit_is_tight() {
        let spec = presets::lq_spillover();
        let pt = AuditPoint {
            goodwill: 2.0,
            output: 0.4,
            investment: 0.3,
        };
        let r = finite_diff_audit(&spec, pt, 1e-5).unwrap();
        assert!(r.max_discrepancy <= 1e-8, "{r:?}");
    }

    #[derive(Debug)]
    struct SkewedGoodwill;

    impl DemandModel for SkewedGoodwill {
        fn price(&self, n: usize, goodwill: f64, own: f64, rival: f64, others: f64) -> f64 {
            DemandPrimitive::Lq { b: 1.0, d: 0.5 }.price(n, goodwill, own, rival, others)
        }
        fn partials(
            &self,
            n: usize,
            goodwill: f64,
            own: f64,
            rival: f64,
            others: f64,
        ) -> DerivBundle {
            let mut b =
                DemandPrimitive::Lq { b: 1.0, d: 0.5 }.partials(n, goodwill, own, rival, others);
            b.p_a += 0.1;
            b
        }
    }

    #[test]
    fn planted_fault_is_detected() {
        let mut spec = presets::lq_spillover();
        spec.demand = DemandPrimitive::Plugin(Arc::new(SkewedGoodwill));
        let pt = AuditPoint {
            goodwill: 2.0,
            output: 0.4,
            investment: 0.3,
        };
        let r = finite_diff_audit(&spec, pt, 1e-5).unwrap();
        assert!((r.max_discrepancy - 0.1).abs() < 1e-6, "{r:?}");
        assert_eq!(r.worst, "p_A");
    }

    #[test]
    fn audit_rejects_bad_steps() {
        let spec = presets::lq_spillover();
        let pt = AuditPoint {
            goodwill: 2.0,
            output: 0.4,
            investment: 0.3,
        };
        assert!(matches!(
            finite_diff_audit(&spec, pt, 0.0),
            Err(Error::Domain(_))
        ));
        let edge = AuditPoint { output: 1e-7, ..pt };
        assert!(matches!(
            finite_diff_audit(&spec, edge, 1e-5),
            Err(Error::Domain(_))
        ));
    }
}
