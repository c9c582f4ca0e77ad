//! Example systems shipped with the checker.

const FILES: &[(&str, &str)] = &[
    ("recursor", include_str!("../../corpus/recursor.sys")),
    ("prefix-sum", include_str!("../../corpus/prefix-sum.sys")),
    ("stl-beta", include_str!("../../corpus/stl-beta.sys")),
    ("mam", include_str!("../../corpus/mam.sys")),
    ("gstate", include_str!("../../corpus/gstate.sys")),
    ("handle", include_str!("../../corpus/handle.sys")),
    ("effect-full", include_str!("../../corpus/effect-full.sys")),
    ("mapDivMinusHard", include_str!("../../corpus/mapDivMinusHard.sys")),
    ("proj", include_str!("../../corpus/proj.sys")),
    ("loop", include_str!("../../corpus/loop.sys")),
];

/// Source text of a bundled system.
pub fn corpus(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn corpus_names() -> Vec<&'static str> {
    FILES.iter().map(|(n, _)| *n).collect()
}
