use std::fmt;

use serde::{Deserialize, Serialize};

/// Outcome of comparing two models' semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictValue {
    /// Same semantics.
    Equivalent,
    /// Every instance of the left model is an instance of the right one, not vice versa.
    LeftRefinesRight,
    RightRefinesLeft,
    /// Each side has instances the other lacks.
    Incomparable,
}

impl VerdictValue {
    /// Classifies from the emptiness of the two directed diffs.
    pub fn from_emptiness(left_minus_right_empty: bool, right_minus_left_empty: bool) -> Self {
        match (left_minus_right_empty, right_minus_left_empty) {
            (true, true) => VerdictValue::Equivalent,
            (true, false) => VerdictValue::LeftRefinesRight,
            (false, true) => VerdictValue::RightRefinesLeft,
            (false, false) => VerdictValue::Incomparable,
        }
    }

    /// The verdict with the two models swapped.
    pub fn mirrored(self) -> Self {
        match self {
            VerdictValue::LeftRefinesRight => VerdictValue::RightRefinesLeft,
            VerdictValue::RightRefinesLeft => VerdictValue::LeftRefinesRight,
            v => v,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            VerdictValue::Equivalent => "≡",
            VerdictValue::LeftRefinesRight => "<",
            VerdictValue::RightRefinesLeft => ">",
            VerdictValue::Incomparable => "<>",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VerdictValue::Equivalent => "EQUIVALENT",
            VerdictValue::LeftRefinesRight => "LEFT_REFINES_RIGHT",
            VerdictValue::RightRefinesLeft => "RIGHT_REFINES_LEFT",
            VerdictValue::Incomparable => "INCOMPARABLE",
        }
    }
}

impl fmt::Display for VerdictValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A verdict together with the per-class bound it was established under,
/// if any. Activity-diagram verdicts are exact and carry no bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Verdict {
    pub value: VerdictValue,
    pub bound: Option<usize>,
}

impl Verdict {
    pub fn exact(value: VerdictValue) -> Self {
        Verdict { value, bound: None }
    }

    pub fn bounded_by(value: VerdictValue, k: usize) -> Self {
        Verdict {
            value,
            bound: Some(k),
        }
    }

    pub fn bounded(&self) -> bool {
        self.bound.is_some()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bound {
            Some(k) => write!(f, "{} (bounded k={k})", self.value),
            None => write!(f, "{}", self.value),
        }
    }
}
