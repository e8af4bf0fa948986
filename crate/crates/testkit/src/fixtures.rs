use semdiff_core::ad::{parse_ad, parse_trace, ActivityDiagram, Trace};
use semdiff_core::cd::{parse_cd, parse_om, ClassDiagram, ObjectModel};

pub const CD1_V1: &str = include_str!("../../../fixtures/cd1.v1.cd");
pub const CD1_V2: &str = include_str!("../../../fixtures/cd1.v2.cd");
pub const CD5_V1: &str = include_str!("../../../fixtures/cd5.v1.cd");
pub const CD5_V2: &str = include_str!("../../../fixtures/cd5.v2.cd");
pub const AD_V1: &str = include_str!("../../../fixtures/ad.v1.ad");
pub const AD_V2: &str = include_str!("../../../fixtures/ad.v2.ad");
pub const AD_V3: &str = include_str!("../../../fixtures/ad.v3.ad");
pub const AD_V4: &str = include_str!("../../../fixtures/ad.v4.ad");
pub const THREE_TASKS_OM: &str = include_str!("../../../fixtures/three_tasks.om");
pub const KEY_CARD_LATE_TRACE: &str = include_str!("../../../fixtures/key_card_late.trace");

/// `(file name, contents)` of every class diagram fixture.
pub const CDS: &[(&str, &str)] = &[
    ("cd1.v1.cd", CD1_V1),
    ("cd1.v2.cd", CD1_V2),
    ("cd5.v1.cd", CD5_V1),
    ("cd5.v2.cd", CD5_V2),
];

/// `(file name, contents)` of every activity diagram fixture.
pub const ADS: &[(&str, &str)] = &[
    ("ad.v1.ad", AD_V1),
    ("ad.v2.ad", AD_V2),
    ("ad.v3.ad", AD_V3),
    ("ad.v4.ad", AD_V4),
];

/// Absolute path of a fixture file, for tests that drive the CLI.
pub fn path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn cd(text: &str) -> ClassDiagram {
    parse_cd(text).expect("fixture parses")
}

pub fn ad(text: &str) -> ActivityDiagram {
    parse_ad(text).expect("fixture parses")
}

pub fn om(text: &str) -> ObjectModel {
    parse_om(text).expect("fixture parses")
}

pub fn trace(text: &str) -> Trace {
    parse_trace(text).expect("fixture parses")
}
