use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Equilibrium notion under which a steady state is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Concept {
    OpenLoop,
    ClosedLoop,
    Feedback,
    Cartel,
}

impl Concept {
    /// Report order.
    pub const ALL: [Concept; 4] = [
        Concept::OpenLoop,
        Concept::ClosedLoop,
        Concept::Feedback,
        Concept::Cartel,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Concept::OpenLoop => "open_loop",
            Concept::ClosedLoop => "closed_loop",
            Concept::Feedback => "feedback",
            Concept::Cartel => "cartel",
        }
    }

    /// Closed-loop and feedback residuals are only derived without spillover.
    pub fn requires_no_spillover(self) -> bool {
        matches!(self, Concept::ClosedLoop | Concept::Feedback)
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Concept {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "open_loop" => Ok(Concept::OpenLoop),
            "closed_loop" => Ok(Concept::ClosedLoop),
            "feedback" => Ok(Concept::Feedback),
            "cartel" => Ok(Concept::Cartel),
            other => Err(format!("unknown concept `{other}`")),
        }
    }
}
