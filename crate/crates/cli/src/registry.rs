//! The fixture corpus shipped with the tool.

use crate::fixture::{BuildOptions, FResult, Workspace};

pub const FIXTURES: &[(&str, &str)] = &[
    ("artinian", include_str!("../fixtures/artinian.lk")),
    ("ci_fibre", include_str!("../fixtures/ci_fibre.lk")),
    ("cone", include_str!("../fixtures/cone.lk")),
    ("cusp", include_str!("../fixtures/cusp.lk")),
    ("cusp_f2", include_str!("../fixtures/cusp_f2.lk")),
    ("cusp_tower", include_str!("../fixtures/cusp_tower.lk")),
    ("double_cover", include_str!("../fixtures/double_cover.lk")),
    ("estimates", include_str!("../fixtures/estimates.lk")),
    ("node", include_str!("../fixtures/node.lk")),
    ("node_cover", include_str!("../fixtures/node_cover.lk")),
    ("plane_cover", include_str!("../fixtures/plane_cover.lk")),
    ("quadric", include_str!("../fixtures/quadric.lk")),
    ("threefold", include_str!("../fixtures/threefold.lk")),
    ("wide_fibre", include_str!("../fixtures/wide_fibre.lk")),
];

pub fn get(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// First comment line of a fixture, used as its description.
pub fn description(text: &str) -> &str {
    text.lines()
        .find_map(|l| l.trim().strip_prefix('#'))
        .map(str::trim)
        .unwrap_or("")
}

pub fn load_all(opts: &BuildOptions) -> FResult<Vec<Workspace>> {
    FIXTURES.iter().map(|(n, t)| Workspace::from_text(n, t, opts)).collect()
}
