//! Named built-in experiment presets, embedded from `presets/` at the
//! repository root. Desk-scale presets run in minutes; paper-scale presets
//! reproduce the full published operating points and take hours.

pub const PRESETS: &[(&str, &str)] = &[
    ("fig1-desk", include_str!("../../../presets/fig1-desk.json")),
    (
        "fig1-paper",
        include_str!("../../../presets/fig1-paper.json"),
    ),
    ("fig2-desk", include_str!("../../../presets/fig2-desk.json")),
    (
        "fig2-paper",
        include_str!("../../../presets/fig2-paper.json"),
    ),
    ("fig4-desk", include_str!("../../../presets/fig4-desk.json")),
    (
        "fig4-paper",
        include_str!("../../../presets/fig4-paper.json"),
    ),
    ("fig5-scan", include_str!("../../../presets/fig5-scan.json")),
    ("fig9-desk", include_str!("../../../presets/fig9-desk.json")),
    (
        "fig9-paper",
        include_str!("../../../presets/fig9-paper.json"),
    ),
    (
        "fig10-desk",
        include_str!("../../../presets/fig10-desk.json"),
    ),
    (
        "fig10-paper",
        include_str!("../../../presets/fig10-paper.json"),
    ),
];

pub fn get(name: &str) -> Option<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}
