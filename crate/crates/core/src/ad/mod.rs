//! Activity diagrams: the textual language, the token-game semantics and
//! trace differencing.

mod ast;
mod diff;
mod parse;
mod semantics;
mod trace;

pub use ast::{
    ActivityDiagram, AssignSource, Assignment, Domain, Edge, Guard, Node, NodeKind, VarDecl,
    VarKind, END, START,
};
pub use diff::{addiff, compare_ad, AdDiffResult};
pub use parse::parse_ad;
pub use semantics::{
    accepts, build_config_nfa, enumerate_traces, input_valuations, replay, AdError, ConfigNfa,
    Configuration, Valuation,
};
pub use trace::{parse_trace, Trace};
