//! Supplies a user-defined inverse demand through the plugin interface.
//!
//! Demand here is `p = a + A - b q_i - h q_i^2 - d S`, with `S` the rivals'
//! total output. The audit confirms the hand-coded partials before the
//! model is solved.

use std::sync::Arc;

use goodwill_game::assumptions::AuditPoint;
use goodwill_game::model::DemandModel;
use goodwill_game::{
    check_propositions, finite_diff_audit, validate_assumptions, AccumulationPrimitive,
    CostPrimitive, DemandPrimitive, DerivBundle, ModelSpec,
};

#[derive(Debug)]
struct Concave {
    a: f64,
    b: f64,
    h: f64,
    d: f64,
}

impl DemandModel for Concave {
    fn price(&self, n: usize, goodwill: f64, own: f64, rival: f64, others: f64) -> f64 {
        let s = if n >= 2 {
            rival + (n as f64 - 2.0) * others
        } else {
            0.0
        };
        self.a + goodwill - self.b * own - self.h * own * own - self.d * s
    }

    fn partials(&self, n: usize, goodwill: f64, own: f64, rival: f64, others: f64) -> DerivBundle {
        DerivBundle {
            p: self.price(n, goodwill, own, rival, others),
            p_a: 1.0,
            p_qi: -self.b - 2.0 * self.h * own,
            p_qj: if n >= 2 { -self.d } else { 0.0 },
            p_qiqi: -2.0 * self.h,
            p_qiqj: 0.0,
            p_qjqj: 0.0,
            p_aqi: 0.0,
        }
    }
}

fn main() -> goodwill_game::Result<()> {
    let demand = Concave {
        a: 2.0,
        b: 1.0,
        h: 0.2,
        d: 0.5,
    };
    let spec = ModelSpec::new(
        3,
        0.05,
        0.1,
        DemandPrimitive::Plugin(Arc::new(demand)),
        CostPrimitive::Linear { slope: 1.0 },
        CostPrimitive::LinearQuadratic {
            linear: 1.0,
            quadratic: 40.0,
        },
        AccumulationPrimitive::LinearSpillover { beta: 0.0 },
    )?;

    let point = AuditPoint {
        goodwill: 1.0,
        output: 0.7,
        investment: 0.1,
    };
    let audit = finite_diff_audit(&spec, point, 1e-5)?;
    println!(
        "partials audit: max discrepancy {:.2e}",
        audit.max_discrepancy
    );

    let assumptions = validate_assumptions(&spec, 5)?;
    println!(
        "assumptions all pass: {}, outputs are {}",
        assumptions.all_passed(),
        assumptions.classification.as_str()
    );

    let report = check_propositions(&spec);
    print!("{}", goodwill_game::report::comparison_text(&report));
    Ok(())
}
