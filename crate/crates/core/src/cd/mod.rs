//! Class diagrams: textual syntax, object-model semantics, and bounded
//! semantic differencing.

mod ast;
mod diff;
mod enumerate;
mod instance;
mod object_model;
mod parse;

pub use ast::{Association, ClassDecl, ClassDiagram, Modifier, Multiplicity, UnknownClass};
pub use diff::{cddiff, compare_cd, CdDiffResult};
pub use enumerate::{enumerate_object_models, ObjectModels, Universe};
pub use instance::{is_instance, InstanceCheck, Violation, ViolationKind};
pub use object_model::{parse_om, Link, ObjectModel};
pub use parse::parse_cd;

/// Reflexive-transitive subclasses of `class` in `cd`.
pub fn subtype_set(
    cd: &ClassDiagram,
    class: &str,
) -> Result<std::collections::BTreeSet<String>, UnknownClass> {
    cd.subtype_set(class)
}
