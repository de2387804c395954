//! Closed-form steady states of the linear family next to the numeric
//! solver's answers.

use goodwill_game::lq::{lq_cartel, lq_closed_loop, lq_open_loop, CartelConvention, LqParams};
use goodwill_game::{solve_steady_state, Concept};

fn main() -> goodwill_game::Result<()> {
    let p0 = LqParams::new(2, 1.0, 0.5, 0.5, 1.0, 0.1, 0.05, 1.0);
    let spec = p0.to_spec()?;

    let open = lq_open_loop(&p0)?;
    let numeric = solve_steady_state(&spec, Concept::OpenLoop)?;
    println!(
        "open loop   formula {:.10}  numeric {:.10}",
        open.goodwill,
        numeric.primary().goodwill
    );

    let per_firm = lq_cartel(&p0, CartelConvention::PerFirm)?;
    let aggregate = lq_cartel(&p0, CartelConvention::Aggregate)?;
    let numeric = solve_steady_state(&spec, Concept::Cartel)?;
    println!(
        "cartel      per firm {:.10}  aggregate {:.10}  numeric {:.10}",
        per_firm.goodwill,
        aggregate.goodwill,
        numeric.primary().goodwill
    );

    let p2 = LqParams::new(2, 1.0, 0.5, 0.0, 40.0, 0.1, 0.05, 1.0)
        .with_intercept(2.0)
        .with_linear_ad_cost(1.0);
    let closed = lq_closed_loop(&p2)?;
    let numeric = solve_steady_state(&p2.to_spec()?, Concept::ClosedLoop)?;
    println!(
        "closed loop formula {:.10}  numeric {:.10}",
        closed.goodwill,
        numeric.primary().goodwill
    );

    println!(
        "closed loop with spillover: {}",
        lq_closed_loop(&p0).unwrap_err()
    );
    Ok(())
}
