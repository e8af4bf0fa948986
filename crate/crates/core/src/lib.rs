//! Semantic differencing for class diagrams and activity diagrams.
//!
//! A semantic diff of two models is the set of *witnesses*: elements of
//! the first model's semantics that the second model does not admit.
//! For class diagrams the witnesses are finite object models (searched up
//! to a per-class instance bound); for activity diagrams they are action
//! traces together with the input values that produced them.
//!
//! ```
//! use semdiff_core::cd::{cddiff, parse_cd};
//!
//! let old = parse_cd("classdiagram a { class E; class T; association w E -- T; }").unwrap();
//! let new = parse_cd("classdiagram b { class E; class T; association w E -- T [0..1]; }").unwrap();
//! let diff = cddiff(&old, &new, 2, 5);
//! assert_eq!(diff.witnesses[0].links.len(), 2);
//! ```

pub mod ad;
pub mod automata;
pub mod cd;
pub mod render;
pub mod syntax;
mod verdict;

pub use syntax::{Diagnostic, DiagnosticKind, ParseError, Pos};
pub use verdict::{Verdict, VerdictValue};
