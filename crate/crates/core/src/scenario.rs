//! Scenario files, report emission and parameter sweeps.
//!
//! A scenario is a sectioned `key = value` file:
//!
//! ```text
//! # saddle-regime duopoly
//! [model]
//! family = lq        # lq or interaction
//! n = 2
//! a = 2
//! B = 1
//! D = 0.5
//! beta = 0
//! c = 1
//! gamma1 = 1
//! sigma = 40
//! delta = 0.1
//! rho = 0.05
//!
//! [run]
//! concepts = open_loop, closed_loop, feedback, cartel
//! simulate = true
//! T = 100
//! dt = 0.01
//! epsilon = 0.001
//! out = out/p2
//! ```
//!
//! Unknown sections and keys are errors reported with their line number.
//! The interaction family additionally reads `h` (own-output curvature) and
//! `e` (own/rival output interaction); both must stay zero for `lq`.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::compare::{check_propositions, ComparisonReport};
use crate::concept::Concept;
use crate::dynamics::{saddle_path, simulate, TimePath};
use crate::error::{Error, Result};
use crate::model::{AccumulationPrimitive, Bounds, CostPrimitive, DemandPrimitive, ModelSpec};
use crate::presets::{interaction_spec, InteractionDemand};
use crate::report::{self, fmt_g12, Cell, Format, Table};
use crate::stability::StabilityClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Linear demand `a + A - B q_i - D sum q_j`.
    Lq,
    /// Linear demand plus own curvature `-h q_i^2` and the own/rival
    /// interaction `e q_i sum q_j`.
    Interaction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub family: Family,
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub h: f64,
    pub e: f64,
    pub beta: f64,
    pub c: f64,
    pub gamma1: f64,
    pub sigma: f64,
    pub delta: f64,
    pub rho: f64,
    pub a_max: Option<f64>,
    pub q_max: Option<f64>,
    pub k_max: Option<f64>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            family: Family::Lq,
            n: 2,
            a: 0.0,
            b: 1.0,
            d: 0.5,
            h: 0.0,
            e: 0.0,
            beta: 0.0,
            c: 1.0,
            gamma1: 0.0,
            sigma: 1.0,
            delta: 0.1,
            rho: 0.05,
            a_max: None,
            q_max: None,
            k_max: None,
        }
    }
}

impl ModelConfig {
    /// Real-valued parameters that can be set by name; these are also the
    /// valid sweep axes.
    pub const AXES: [&'static str; 14] = [
        "a", "B", "D", "h", "e", "beta", "c", "gamma1", "sigma", "delta", "rho", "a_max", "q_max",
        "k_max",
    ];

    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "a" => &mut self.a,
            "B" | "b" => &mut self.b,
            "D" | "d" => &mut self.d,
            "h" => &mut self.h,
            "e" => &mut self.e,
            "beta" => &mut self.beta,
            "c" => &mut self.c,
            "gamma1" => &mut self.gamma1,
            "sigma" | "alpha" => &mut self.sigma,
            "delta" => &mut self.delta,
            "rho" => &mut self.rho,
            "a_max" => self.a_max.insert(0.0),
            "q_max" => self.q_max.insert(0.0),
            "k_max" => self.k_max.insert(0.0),
            _ => return None,
        })
    }

    /// Sets a real-valued parameter; `None` if `key` names none.
    pub fn set(&mut self, key: &str, value: f64) -> Option<()> {
        *self.slot(key)? = value;
        Some(())
    }

    pub fn to_spec(&self) -> Result<ModelSpec> {
        let spec = match self.family {
            Family::Lq => {
                if self.h != 0.0 || self.e != 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "family",
                        reason: "h and e apply to the interaction family only".into(),
                    });
                }
                let demand = if self.a == 0.0 {
                    DemandPrimitive::Lq {
                        b: self.b,
                        d: self.d,
                    }
                } else {
                    DemandPrimitive::LqAffine {
                        a: self.a,
                        b: self.b,
                        d: self.d,
                    }
                };
                ModelSpec::new(
                    self.n,
                    self.rho,
                    self.delta,
                    demand,
                    CostPrimitive::Linear { slope: self.c },
                    CostPrimitive::LinearQuadratic {
                        linear: self.gamma1,
                        quadratic: self.sigma,
                    },
                    AccumulationPrimitive::LinearSpillover { beta: self.beta },
                )?
            }
            Family::Interaction => {
                if self.beta != 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "beta",
                        reason: "the interaction family has no spillover".into(),
                    });
                }
                let demand = InteractionDemand {
                    a: self.a,
                    b: self.b,
                    h: self.h,
                    d: self.d,
                    e: self.e,
                };
                interaction_spec(
                    self.n,
                    demand,
                    self.c,
                    self.gamma1,
                    self.sigma,
                    self.delta,
                    self.rho,
                )?
            }
        };
        if self.a_max.is_none() && self.q_max.is_none() && self.k_max.is_none() {
            return Ok(spec);
        }
        let d = spec.bounds;
        let bounds = Bounds::new(
            self.a_max.unwrap_or(d.a_max),
            self.q_max.unwrap_or(d.q_max),
            self.k_max.unwrap_or(d.k_max),
        )?;
        Ok(spec.with_bounds(bounds))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub axis: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub concepts: Vec<Concept>,
    pub simulate: bool,
    pub horizon: f64,
    pub dt: f64,
    pub epsilon: f64,
    pub out: PathBuf,
    pub sweep: Option<SweepConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            concepts: Concept::ALL.to_vec(),
            simulate: false,
            horizon: 100.0,
            dt: 0.01,
            epsilon: 1e-3,
            out: PathBuf::from("out"),
            sweep: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioConfig {
    pub model: ModelConfig,
    pub run: RunConfig,
}

#[derive(Default)]
struct PartialSweep {
    axis: Option<String>,
    lo: Option<f64>,
    hi: Option<f64>,
    steps: Option<usize>,
    line: usize,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ScenarioConfig::default();
        let mut section: Option<&str> = None;
        let mut sweep = PartialSweep::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| Error::Parse { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = match name.trim() {
                    "model" => Some("model"),
                    "run" => Some("run"),
                    other => return Err(err(format!("unknown section `[{other}]`"))),
                };
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(format!("expected `key = value`, found `{content}`")))?;
            if value.is_empty() {
                return Err(err(format!("`{key}` has no value")));
            }
            let number = || {
                value
                    .parse::<f64>()
                    .map_err(|_| err(format!("`{key}` expects a number, found `{value}`")))
            };
            let count = || {
                value.parse::<usize>().map_err(|_| {
                    err(format!(
                        "`{key}` expects a nonnegative integer, found `{value}`"
                    ))
                })
            };
            match section {
                None => return Err(err(format!("`{key}` appears before any section"))),
                Some("model") => match key {
                    "family" => {
                        cfg.model.family = match value {
                            "lq" | "lq_affine" => Family::Lq,
                            "interaction" => Family::Interaction,
                            other => return Err(err(format!("unknown family `{other}`"))),
                        }
                    }
                    "n" => cfg.model.n = count()?,
                    _ => {
                        let v = number()?;
                        cfg.model
                            .set(key, v)
                            .ok_or_else(|| err(format!("unknown model key `{key}`")))?;
                    }
                },
                Some(_) => match key {
                    "concepts" => {
                        cfg.run.concepts = value
                            .split(',')
                            .map(|s| s.parse::<Concept>().map_err(err))
                            .collect::<Result<Vec<_>>>()?;
                    }
                    "simulate" => {
                        cfg.run.simulate = match value {
                            "true" => true,
                            "false" => false,
                            _ => {
                                return Err(err(format!(
                                    "`simulate` expects true or false, found `{value}`"
                                )))
                            }
                        }
                    }
                    "T" => cfg.run.horizon = number()?,
                    "dt" => cfg.run.dt = number()?,
                    "epsilon" => cfg.run.epsilon = number()?,
                    "out" => cfg.run.out = PathBuf::from(value),
                    "sweep_axis" => {
                        sweep.axis = Some(value.to_string());
                        sweep.line = line;
                    }
                    "sweep_lo" => sweep.lo = Some(number()?),
                    "sweep_hi" => sweep.hi = Some(number()?),
                    "sweep_steps" => sweep.steps = Some(count()?),
                    _ => return Err(err(format!("unknown run key `{key}`"))),
                },
            }
        }
        if let Some(axis) = sweep.axis {
            match (sweep.lo, sweep.hi, sweep.steps) {
                (Some(lo), Some(hi), Some(steps)) => {
                    cfg.run.sweep = Some(SweepConfig {
                        axis,
                        lo,
                        hi,
                        steps,
                    });
                }
                _ => {
                    return Err(Error::Parse {
                        line: sweep.line,
                        message: "sweep_axis needs sweep_lo, sweep_hi and sweep_steps".into(),
                    })
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Saddle path into a saddle steady state; otherwise a forward run from
/// `epsilon` below it, which shows the drift away.
fn concept_path(
    spec: &ModelSpec,
    report: &ComparisonReport,
    concept: Concept,
    run: &RunConfig,
) -> Option<Result<TimePath>> {
    let solved = report.outcome(concept).primary()?;
    let stability = solved.stability.as_ref()?;
    let ss = &solved.state;
    Some(if stability.classification == StabilityClass::Saddle {
        saddle_path(spec, ss, run.epsilon, run.horizon, run.dt)
    } else {
        simulate(
            spec,
            concept,
            ss.goodwill - run.epsilon,
            ss.lambda_own,
            run.horizon,
            run.dt,
        )
    })
}

/// Files written by [`run_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub report: ComparisonReport,
    pub files: Vec<PathBuf>,
}

/// Solves the scenario and writes `steady_states`, `stability`,
/// `comparison.txt` and, with `simulate = true`, one `path_<concept>` file
/// per concept with costate dynamics.
pub fn run_scenario(config: &ScenarioConfig, format: Format) -> Result<ScenarioOutput> {
    let spec = config.model.to_spec()?;
    let run = &config.run;
    let report = check_propositions(&spec);
    let dir = &run.out;
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let ext = format.extension();
    let mut files = Vec::new();
    let mut emit = |name: String, contents: String| -> Result<()> {
        report::write_file(dir, &name, &contents)?;
        files.push(dir.join(name));
        Ok(())
    };

    emit(
        format!("steady_states.{ext}"),
        report::steady_state_table(&report, &run.concepts).render(format)?,
    )?;
    emit(
        format!("stability.{ext}"),
        report::stability_table(&report, &run.concepts).render(format)?,
    )?;
    emit("comparison.txt".into(), report::comparison_text(&report))?;
    if format == Format::Json {
        emit("comparison.json".into(), comparison_json(&report))?;
    }
    if run.simulate {
        for &c in Concept::ALL.iter().filter(|c| run.concepts.contains(c)) {
            if let Some(path) = concept_path(&spec, &report, c, run) {
                emit(
                    format!("path_{c}.{ext}"),
                    report::path_table(&path?).render(format)?,
                )?;
            }
        }
    }
    Ok(ScenarioOutput { report, files })
}

pub fn comparison_json(report: &ComparisonReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

const SWEEP_COLUMNS: [&str; 23] = [
    "axis",
    "value",
    "open_loop_A",
    "open_loop_q",
    "open_loop_k",
    "open_loop_lambda",
    "open_loop_stability",
    "closed_loop_A",
    "closed_loop_q",
    "closed_loop_k",
    "closed_loop_lambda",
    "closed_loop_stability",
    "feedback_A",
    "feedback_q",
    "feedback_k",
    "feedback_lambda",
    "cartel_A",
    "cartel_q",
    "cartel_k",
    "cartel_lambda",
    "closed_vs_open",
    "feedback_equivalence",
    "cartel_vs_open",
];

fn sweep_row(axis: &str, value: f64, report: &ComparisonReport) -> Vec<Cell> {
    let mut row: Vec<Cell> = vec![axis.into(), value.into()];
    for c in Concept::ALL {
        let primary = report.outcome(c).primary();
        let s = primary.map(|p| &p.state);
        row.extend([
            s.map(|s| s.goodwill).into(),
            s.map(|s| s.output).into(),
            s.map(|s| s.advertising).into(),
            s.map(|s| s.lambda_own).into(),
        ]);
        if matches!(c, Concept::OpenLoop | Concept::ClosedLoop) {
            row.push(
                primary
                    .and_then(|p| p.stability.as_ref())
                    .map_or(Cell::Na, |r| r.classification.as_str().into()),
            );
        }
    }
    row.extend([
        report.closed_vs_open.verdict.as_str().into(),
        report.feedback_equivalence.verdict.as_str().into(),
        report.cartel_vs_open.verdict.as_str().into(),
    ]);
    row
}

/// Re-solves the scenario at `steps` evenly spaced values of `axis` on
/// `[lo, hi]`. Grid points are solved in parallel; rows come back in grid
/// order.
pub fn sweep(config: &ScenarioConfig, axis: &str, lo: f64, hi: f64, steps: usize) -> Result<Table> {
    if !ModelConfig::AXES.contains(&axis) {
        return Err(Error::InvalidAxis(axis.to_string()));
    }
    if steps < 2 {
        return Err(Error::Precondition(format!(
            "a sweep needs at least 2 steps, got {steps}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Precondition(format!(
            "sweep range [{lo}, {hi}] is not finite"
        )));
    }
    let rows: Vec<Vec<Cell>> = (0..steps)
        .into_par_iter()
        .map(|j| {
            let value = lo + (hi - lo) * j as f64 / (steps - 1) as f64;
            let mut model = config.model.clone();
            model.set(axis, value).expect("axis validated above");
            let spec = model.to_spec()?;
            Ok(sweep_row(axis, value, &check_propositions(&spec)))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&SWEEP_COLUMNS);
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

/// Runs [`sweep`] and writes `sweep.<ext>` into the configured directory.
pub fn write_sweep(
    config: &ScenarioConfig,
    sweep_cfg: &SweepConfig,
    format: Format,
) -> Result<PathBuf> {
    let table = sweep(
        config,
        &sweep_cfg.axis,
        sweep_cfg.lo,
        sweep_cfg.hi,
        sweep_cfg.steps,
    )?;
    let dir = &config.run.out;
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let name = format!("sweep.{}", format.extension());
    report::write_file(dir, &name, &table.render(format)?)?;
    Ok(dir.join(name))
}

/// Short one-line-per-concept summary used by the command line.
pub fn summary(report: &ComparisonReport, concepts: &[Concept]) -> String {
    let mut out = String::new();
    for &c in Concept::ALL.iter().filter(|c| concepts.contains(c)) {
        let o = report.outcome(c);
        let line = match o.primary() {
            Some(s) => format!("{c}: A = {}", fmt_g12(s.state.goodwill)),
            None => format!("{c}: {}", o.failure.as_deref().unwrap_or("no steady state")),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const P2: &str = "\
# saddle regime
[model]
family = lq
n = 2
a = 2
B = 1
D = 0.5
beta = 0
c = 1
gamma1 = 1
sigma = 40   # alpha also accepted
delta = 0.1
rho = 0.05

[run]
concepts = open_loop, cartel
";

    #[test]
    fn parses_and_builds() {
        let cfg = ScenarioConfig::parse(P2).unwrap();
        assert_eq!(cfg.run.concepts, vec![Concept::OpenLoop, Concept::Cartel]);
        assert_eq!(cfg.model.sigma, 40.0);
        let spec = cfg.model.to_spec().unwrap();
        assert!(matches!(spec.demand, DemandPrimitive::LqAffine { a, .. } if a == 2.0));
    }

    #[test]
    fn unknown_key_names_its_line() {
        let text = format!("{P2}foo = 1\n");
        let line = text.lines().count();
        assert_eq!(
            ScenarioConfig::parse(&text),
            Err(Error::Parse {
                line,
                message: "unknown run key `foo`".into()
            })
        );
        assert!(matches!(
            ScenarioConfig::parse("[model]\nB = x\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            ScenarioConfig::parse("n = 2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            ScenarioConfig::parse("[other]\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn curvature_belongs_to_interaction_family() {
        let text = "[model]\nfamily = interaction\na = 2\nh = 0.3\ne = 0.25\n";
        let spec = ScenarioConfig::parse(text)
            .unwrap()
            .model
            .to_spec()
            .unwrap();
        // 2 - 1 - 0.3 - 0.5 + 0.25 with the default B and D
        assert!((spec.demand.price(2, 0.0, 1.0, 1.0, 1.0) - 0.45).abs() < 1e-15);
        let lq = ScenarioConfig::parse("[model]\nh = 0.3\n").unwrap();
        assert!(matches!(
            lq.model.to_spec(),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn incomplete_sweep_is_rejected() {
        assert!(matches!(
            ScenarioConfig::parse("[run]\nsweep_axis = beta\nsweep_lo = 0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn sweep_contract() {
        let cfg = ScenarioConfig::parse(P2).unwrap();
        assert!(matches!(
            sweep(&cfg, "nonexistent", 0.0, 1.0, 3),
            Err(Error::InvalidAxis(_))
        ));
        assert!(sweep(&cfg, "beta", 0.0, 0.1, 1).is_err());
        let t = sweep(&cfg, "c", 1.0, 1.1, 2).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0][1], Cell::Num(1.0));
        assert_eq!(t.rows[1][1], Cell::Num(1.1));
    }
}
