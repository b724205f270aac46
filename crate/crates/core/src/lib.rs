//! Flat UML statecharts compiled into GIVEN-WHEN-THEN scenario suites, and
//! scenario suites recovered back into statecharts.
//!
//! The pipeline:
//!
//! * [`model`]: the statechart itself, validation and enabled transitions.
//! * [`guard`]: the natural-language boolean guard DSL and `<placeholders>`.
//! * [`formats`]: SCDL text, an XMI subset and Graphviz DOT.
//! * [`scenario`]: transition-coverage and path scenarios.
//! * [`feature`]: feature text rendering, parsing and statechart recovery.
//! * [`walkthrough`]: interactive sessions and their HTTP service.
//! * [`cli`]: the `statebdd` command line.
//!
//! ```
//! use statebdd::{fixtures, generate_transition_suite, render_feature};
//!
//! let chart = fixtures::seminar();
//! let text = render_feature(&generate_transition_suite(&chart).unwrap());
//! assert!(text.contains("  GIVEN I have the proper rights\n"));
//! ```
//!
//! Runnable examples live in `examples/`: `validate_model`,
//! `generate_feature`, `enumerate_paths`, `render_dot`, `xmi_round_trip`,
//! `recover_from_feature`, `guard_dsl`, `walkthrough_session` and
//! `walkthrough_service`.

pub mod cli;
pub mod error;
pub mod feature;
pub mod fixtures;
pub mod formats;
pub mod guard;
pub mod model;
pub mod scenario;
pub mod walkthrough;

pub use error::{Code, Error, Result};
pub use feature::{parse_feature, recover_statechart, render_feature};
pub use formats::dot::render_dot;
pub use formats::scdl::{parse_scdl, render_scdl};
pub use formats::xmi::{parse_xmi, render_xmi};
pub use guard::{parse_guard, render_guard, Bindings, GuardExpr, Placeholder};
pub use model::{
    enabled_transitions, validate, State, StateId, StateKind, Statechart, Transition, TransitionId,
    ValidationReport,
};
pub use scenario::{
    enumerate_paths, generate_path_suite, generate_transition_suite, Clause, Path, Scenario,
    ScenarioSet,
};
pub use walkthrough::{Session, SessionId};
