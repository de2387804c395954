//! Compares steady states across concepts and prints the verdicts for the
//! saddle regime and for the pure linear family.

use goodwill_game::report::comparison_text;
use goodwill_game::{check_propositions, presets};

fn main() {
    for spec in [
        presets::affine_saddle(),
        presets::lq_no_spillover(),
        presets::lq_spillover(),
    ] {
        let report = check_propositions(&spec);
        println!("{}", comparison_text(&report));
        println!("----");
    }
}
