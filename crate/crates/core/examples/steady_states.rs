//! Steady states of all four solution concepts on the saddle-regime preset.

use goodwill_game::{presets, solve_steady_state, Concept};

fn main() {
    let spec = presets::affine_saddle();
    println!("{}\n", spec.digest());
    println!(
        "{:<12} {:>12} {:>12} {:>12} {:>12}",
        "concept", "A", "q", "k", "lambda"
    );
    for concept in Concept::ALL {
        match solve_steady_state(&spec, concept) {
            Ok(states) => {
                for s in &states.states {
                    println!(
                        "{:<12} {:>12.7} {:>12.7} {:>12.7} {:>12.7}",
                        concept.as_str(),
                        s.goodwill,
                        s.output,
                        s.advertising,
                        s.lambda_own
                    );
                }
            }
            Err(e) => println!("{:<12} {e}", concept.as_str()),
        }
    }

    // With spillover only the open-loop and cartel concepts apply.
    let spill = presets::lq_spillover();
    for concept in Concept::ALL {
        let outcome = solve_steady_state(&spill, concept);
        println!(
            "spillover {:<12} {}",
            concept.as_str(),
            outcome.map_or_else(
                |e| e.to_string(),
                |s| format!("A = {:.7}", s.primary().goodwill)
            )
        );
    }
}
