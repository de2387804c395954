//! Runs a scenario file end to end and sweeps the spillover rate.
//!
//! `cargo run --example scenario_sweep -- path/to/scenario.conf` reads the
//! file; without an argument the bundled saddle-regime scenario is used.

use goodwill_game::report::Format;
use goodwill_game::scenario::{run_scenario, sweep, ScenarioConfig};

fn main() -> goodwill_game::Result<()> {
    let mut config = match std::env::args().nth(1) {
        Some(path) => ScenarioConfig::load(path.as_ref())?,
        None => ScenarioConfig::parse(include_str!("../scenarios/p2.conf"))?,
    };
    config.run.out = std::env::temp_dir().join("goodwill-scenario");
    let out = run_scenario(&config, Format::Csv)?;
    for f in &out.files {
        println!("wrote {}", f.display());
    }
    println!(
        "\n{}",
        std::fs::read_to_string(config.run.out.join("steady_states.csv"))?
    );

    let mut linear = ScenarioConfig::parse(include_str!("../scenarios/p0.conf"))?;
    linear.run.out = config.run.out.clone();
    let table = sweep(&linear, "beta", 0.0, 0.5, 6)?;
    print!("{}", table.to_csv()?);
    Ok(())
}
