//! Steady states of a symmetric n-firm advertising differential game with
//! differentiated goods.
//!
//! Firms choose output and advertising; advertising accumulates into
//! goodwill `A`, which shifts each firm's inverse demand. The crate solves
//! the steady states of four solution concepts (open loop, memoryless
//! closed loop, feedback and cartel), classifies their saddle-point
//! stability, traces saddle paths, and checks the orderings the concepts
//! are expected to satisfy.
//!
//! ```
//! use goodwill_game::{presets, solve_steady_state, Concept};
//!
//! let spec = presets::affine_saddle();
//! let ss = solve_steady_state(&spec, Concept::OpenLoop).unwrap();
//! assert!((ss.primary().goodwill - 1.25).abs() < 1e-10);
//! ```

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assumptions;
pub mod compare;
pub mod concept;
pub mod cournot;
pub mod dynamics;
pub mod error;
pub mod lq;
pub mod model;
pub mod presets;
pub mod report;
pub mod roots;
pub mod scenario;
pub mod stability;
pub mod steady_state;

pub use assumptions::{finite_diff_audit, validate_assumptions, AssumptionReport, Classification};
pub use compare::{check_propositions, ComparisonReport, Verdict};
pub use concept::Concept;
pub use cournot::{comparative_statics, solve_cournot, ComparativeStatics};
pub use dynamics::{recover_controls, saddle_path, simulate, vector_field, TimePath};
pub use error::{Error, Result};
pub use model::{
    eval_demand_bundle, AccumulationPrimitive, Bounds, CostPrimitive, DemandPrimitive, DerivBundle,
    ModelSpec,
};
pub use stability::{jacobian, lemma1_check, StabilityReport};
pub use steady_state::{solve_steady_state, SteadyState, SteadyStates};
