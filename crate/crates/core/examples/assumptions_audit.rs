//! Probes the model primitives for the standing sign and curvature
//! conditions, then audits reported partials against finite differences.

use goodwill_game::assumptions::{AuditPoint, Status};
use goodwill_game::{finite_diff_audit, presets, validate_assumptions};

fn main() -> goodwill_game::Result<()> {
    for (name, spec) in [
        ("lq_spillover", presets::lq_spillover()),
        ("affine_saddle", presets::affine_saddle()),
    ] {
        let report = validate_assumptions(&spec, 5)?;
        println!(
            "{name}: stage outputs are {}",
            report.classification.as_str()
        );
        for check in &report.checks {
            let mark = if check.status == Status::Pass {
                "ok  "
            } else {
                "FAIL"
            };
            let margin = check.margin + 0.0;
            println!("  {mark} {:<36} margin {margin:+.3e}", check.id);
        }

        let point = AuditPoint {
            goodwill: 1.5,
            output: 0.4,
            investment: 0.1,
        };
        let audit = finite_diff_audit(&spec, point, 1e-5)?;
        println!(
            "  largest finite-difference discrepancy {:.2e} ({})\n",
            audit.max_discrepancy, audit.worst
        );
    }
    Ok(())
}
