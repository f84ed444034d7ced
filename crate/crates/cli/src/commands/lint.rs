use std::path::Path;

use anyhow::{Context, Result};
use dcv_core::description::{lint, LintKind, LintLevel};

use super::{EXIT_FINDINGS, EXIT_OK};

pub fn cmd_lint(path: &Path, kind: LintKind) -> Result<i32> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let findings = lint(&text, kind);
    for finding in &findings {
        println!("{}", finding.machine_line());
    }
    if findings.iter().any(|f| f.level == LintLevel::Error) {
        Ok(EXIT_FINDINGS)
    } else {
        Ok(EXIT_OK)
    }
}
