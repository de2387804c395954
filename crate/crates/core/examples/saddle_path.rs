//! Traces the stable branch into the open-loop saddle point and measures
//! how fast goodwill converges along it.

use goodwill_game::{presets, saddle_path, solve_steady_state, Concept};

fn main() -> goodwill_game::Result<()> {
    let spec = presets::affine_saddle();
    let ss = solve_steady_state(&spec, Concept::OpenLoop)?
        .primary()
        .clone();
    let path = saddle_path(&spec, &ss, 1e-3, 100.0, 0.01)?;

    for s in path.samples.iter().step_by(1000) {
        println!(
            "t = {:>6.1}  A = {:.6}  lambda = {:.6}  k = {:.6}  q = {:.6}",
            s.t, s.goodwill, s.lambda, s.advertising, s.output
        );
    }
    let end = path.last();
    println!(
        "ends {:.2e} from A* = {} (converged: {})",
        path.terminal_distance.unwrap_or(f64::NAN),
        ss.goodwill,
        path.converged
    );
    if let Some(rate) = path.decay_rate(ss.goodwill) {
        println!(
            "fitted decay exponent {rate:.5} (stable eigenvalue -0.05), final A = {:.8}",
            end.goodwill
        );
    }
    Ok(())
}
