//! Deterministic tabular and text output.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{Map, Value};

use crate::compare::{ComparisonReport, PropositionCheck};
use crate::concept::Concept;
use crate::dynamics::TimePath;
use crate::error::{Error, Result};

/// Twelve significant digits, trailing zeros trimmed, in the style of C's
/// `%.12g`. Negative zero prints as `0`.
pub fn fmt_g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    /// Field without meaning for the row.
    Na,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_g12(*x),
            Cell::Text(s) => s.clone(),
            Cell::Na => "na".into(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Na => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Na, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Rows under fixed column names; rendered as CSV or as a JSON array of
/// objects with the same keys.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("cells are valid UTF-8"))
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("plain values serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }
}

pub const STEADY_STATE_COLUMNS: [&str; 14] = [
    "concept",
    "A",
    "q",
    "k",
    "lambda_own",
    "lambda_other",
    "residual",
    "trace",
    "det",
    "eig1_re",
    "eig1_im",
    "eig2_re",
    "eig2_im",
    "classification",
];

/// One row per steady state of each listed concept that was solved.
pub fn steady_state_table(report: &ComparisonReport, concepts: &[Concept]) -> Table {
    let mut t = Table::new(&STEADY_STATE_COLUMNS);
    for &c in Concept::ALL.iter().filter(|c| concepts.contains(c)) {
        for s in &report.outcome(c).solved {
            let st = &s.state;
            let mut row: Vec<Cell> = vec![
                c.as_str().into(),
                st.goodwill.into(),
                st.output.into(),
                st.advertising.into(),
                st.lambda_own.into(),
                st.lambda_other.into(),
                st.residual.into(),
            ];
            match &s.stability {
                Some(r) => {
                    row.extend([
                        r.trace.into(),
                        r.determinant.into(),
                        r.eigenvalues[0].re.into(),
                        r.eigenvalues[0].im.into(),
                        r.eigenvalues[1].re.into(),
                        r.eigenvalues[1].im.into(),
                        r.classification.as_str().into(),
                    ]);
                }
                None => row.extend(std::iter::repeat_n(Cell::Na, 7)),
            }
            t.push(row);
        }
    }
    t
}

/// Full Jacobians and stable directions for the concepts that have one.
pub fn stability_table(report: &ComparisonReport, concepts: &[Concept]) -> Table {
    let mut t = Table::new(&[
        "concept",
        "A",
        "j11",
        "j12",
        "j21",
        "j22",
        "trace",
        "det",
        "classification",
        "stable_eigenvalue",
        "stable_v1",
        "stable_v2",
    ]);
    for &c in Concept::ALL.iter().filter(|c| concepts.contains(c)) {
        for s in &report.outcome(c).solved {
            let Some(r) = &s.stability else { continue };
            let v = r.stable_eigenvector;
            t.push(vec![
                c.as_str().into(),
                s.state.goodwill.into(),
                r.jacobian[0][0].into(),
                r.jacobian[0][1].into(),
                r.jacobian[1][0].into(),
                r.jacobian[1][1].into(),
                r.trace.into(),
                r.determinant.into(),
                r.classification.as_str().into(),
                r.stable_eigenvalue().into(),
                v.map(|v| v[0]).into(),
                v.map(|v| v[1]).into(),
            ]);
        }
    }
    t
}

pub fn path_table(path: &TimePath) -> Table {
    let mut t = Table::new(&["t", "A", "lambda", "k", "q"]);
    for s in &path.samples {
        t.push(vec![
            s.t.into(),
            s.goodwill.into(),
            s.lambda.into(),
            s.advertising.into(),
            s.output.into(),
        ]);
    }
    t
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "na".into(), fmt_g12)
}

fn claim_line(out: &mut String, name: &str, p: &PropositionCheck) {
    let lemma = p.lemma.map_or("na", |m| m.as_str());
    let _ = writeln!(out, "{name}: {}", p.verdict);
    let _ = writeln!(out, "  residual slope between roots: {lemma}");
    let _ = writeln!(out, "  {}", p.justification);
}

/// Plain-text summary of a comparison report.
pub fn comparison_text(report: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "spec: {}", report.digest);
    let _ = writeln!(out);
    for o in &report.outcomes {
        match (o.primary(), &o.failure) {
            (Some(s), _) => {
                let extra = if o.solved.len() > 1 {
                    format!(" ({} steady states)", o.solved.len())
                } else {
                    String::new()
                };
                let stab = s
                    .stability
                    .as_ref()
                    .map_or("na", |r| r.classification.as_str());
                let _ = writeln!(
                    out,
                    "{}: A = {}, q = {}, k = {}, stability = {stab}{extra}",
                    o.concept,
                    fmt_g12(s.state.goodwill),
                    fmt_g12(s.state.output),
                    fmt_g12(s.state.advertising),
                );
            }
            (None, Some(e)) => {
                let _ = writeln!(out, "{}: not solved ({e})", o.concept);
            }
            (None, None) => {
                let _ = writeln!(out, "{}: no steady state", o.concept);
            }
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "classification at closed-loop steady state: {}",
        report.classification.map_or("na", |c| c.as_str())
    );
    let _ = writeln!(
        out,
        "open-loop residual at closed-loop root: {}",
        opt(report.phi_open_at_closed)
    );
    let _ = writeln!(
        out,
        "open-loop residual at cartel root: {}",
        opt(report.phi_open_at_cartel)
    );
    let _ = writeln!(out);
    claim_line(&mut out, "closed loop vs open loop", &report.closed_vs_open);
    let _ = writeln!(
        out,
        "  note: the claimed direction for substitutes (A** > A*) is sometimes stated the other way round;"
    );
    let _ = writeln!(
        out,
        "  this verdict is computed from the residual algebra, not from either statement"
    );
    claim_line(
        &mut out,
        "feedback vs closed loop",
        &report.feedback_equivalence,
    );
    let _ = writeln!(
        out,
        "  residual gap: {}, steady-state gap: {}",
        opt(report.equivalence_gap),
        opt(report.equivalence_root_gap)
    );
    claim_line(&mut out, "cartel vs open loop", &report.cartel_vs_open);
    let _ = writeln!(out);
    let _ = writeln!(out, "self-consistent: {}", report.self_consistent);
    out
}

pub(crate) fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::write(dir.join(name), contents)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.join(name).display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g12_matches_printf() {
        let cases = [
            (1.25, "1.25"),
            (6.0, "6"),
            (0.0, "0"),
            (-0.0, "0"),
            (1.0 / 3.0, "0.333333333333"),
            (1.5961538461538463, "1.59615384615"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (1e-5, "1e-05"),
            (0.0001, "0.0001"),
            (-2.5e-17, "-2.5e-17"),
            (999999999999.9, "1e+12"),
            (0.05, "0.05"),
            (f64::NAN, "nan"),
        ];
        for (x, s) in cases {
            assert_eq!(fmt_g12(x), s, "{x}");
        }
    }

    #[test]
    fn table_renders_both_formats() {
        let mut t = Table::new(&["name", "x", "y"]);
        t.push(vec!["a".into(), 0.1.into(), Cell::Na]);
        assert_eq!(t.to_csv().unwrap(), "name,x,y\na,0.1,na\n");
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v[0]["x"], 0.1);
        assert!(v[0]["y"].is_null());
    }
}
