//! Example documents shipped with the crate.

pub const COMPANY_FIG1: &str = include_str!("../../corpus/company-fig1.arch");
pub const COMPANY_SCRIPT: &str = include_str!("../../corpus/company-script.refine");
pub const COMPANY_FIG2D: &str = include_str!("../../corpus/company-fig2d.arch");
pub const PRODUCTION_LINES: &str = include_str!("../../corpus/production-lines.arch");
pub const COMPANY_LINES: &str = include_str!("../../corpus/company-lines.arch");

pub const FILES: [(&str, &str); 5] = [
    ("company-fig1.arch", COMPANY_FIG1),
    ("company-script.refine", COMPANY_SCRIPT),
    ("company-fig2d.arch", COMPANY_FIG2D),
    ("production-lines.arch", PRODUCTION_LINES),
    ("company-lines.arch", COMPANY_LINES),
];

/// Looks up a corpus document by file name.
pub fn get(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// Loader for `blackbox(...)` and `expand ... from` that serves corpus files.
pub fn loader(path: &str) -> Result<crate::model::System, String> {
    let text = get(path).ok_or_else(|| format!("no corpus file `{path}`"))?;
    super::parse_architecture(text).map_err(|e| e.to_string())
}
