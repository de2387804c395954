//! Linearised state-costate dynamics at the open-loop steady state, and the
//! slope of the steady-state residual that governs their classification.

use goodwill_game::{jacobian, lemma1_check, presets, solve_steady_state, Concept};

fn main() -> goodwill_game::Result<()> {
    for (name, spec) in [
        ("affine_saddle", presets::affine_saddle()),
        ("lq_no_spillover", presets::lq_no_spillover()),
    ] {
        let ss = solve_steady_state(&spec, Concept::OpenLoop)?;
        let ss = ss.primary();
        let r = jacobian(&spec, ss)?;
        println!("{name}: A* = {:.7}", ss.goodwill);
        println!("  [{:+.6} {:+.6}]", r.jacobian[0][0], r.jacobian[0][1]);
        println!("  [{:+.6} {:+.6}]", r.jacobian[1][0], r.jacobian[1][1]);
        println!(
            "  trace {:.6}, det {:+.6}, eigenvalues {:.6} / {:.6}, {}",
            r.trace,
            r.determinant,
            r.eigenvalues[0],
            r.eigenvalues[1],
            r.classification.as_str()
        );
        if let Some(v) = r.stable_eigenvector {
            println!("  stable direction ({:.6}, {:.6})", v[0], v[1]);
        }

        let lemma = lemma1_check(&spec, (0.5, 2.0), 7)?;
        println!(
            "  residual on [0.5, 2] is {} (skipped infeasible points {:?}), consistent with det: {:?}\n",
            lemma.verdict.as_str(),
            lemma.infeasible,
            lemma.consistent
        );
    }
    Ok(())
}
