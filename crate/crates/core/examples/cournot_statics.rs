//! Symmetric stage equilibrium and the response of own and rival output to
//! one firm's goodwill, checked against a direct perturbation.

use goodwill_game::{comparative_statics, solve_cournot, DemandPrimitive, ModelSpec};
use goodwill_game::{AccumulationPrimitive, CostPrimitive};

fn lq(n: usize) -> ModelSpec {
    ModelSpec::new(
        n,
        0.05,
        0.1,
        DemandPrimitive::Lq { b: 1.0, d: 0.5 },
        CostPrimitive::Linear { slope: 1.0 },
        CostPrimitive::quadratic(1.0),
        AccumulationPrimitive::LinearSpillover { beta: 0.0 },
    )
    .expect("valid parameters")
}

fn main() -> goodwill_game::Result<()> {
    let goodwill = 2.0;
    for n in [2, 3, 5] {
        let spec = lq(n);
        let stage = solve_cournot(&spec, goodwill)?;
        let cs = comparative_statics(&spec, goodwill, stage.q)?;
        let uniform = 1.0 / (2.0 + (n as f64 - 1.0) * 0.5);
        println!(
            "n = {n}: q = {:.6}, dq_own/dA = {:.6}, dq_other/dA = {:.6} ({})",
            stage.q,
            cs.dq_own_da,
            cs.dq_other_da,
            cs.classification.as_str()
        );
        println!(
            "        own + (n-1) other = {:.12}, uniform shift response = {:.12}",
            cs.dq_own_da + (n as f64 - 1.0) * cs.dq_other_da,
            uniform
        );
    }
    Ok(())
}
