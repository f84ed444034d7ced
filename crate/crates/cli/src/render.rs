//! Report rendering with display filters. Filtering only affects what gets
//! printed; the report itself (and the summary counts) always reflect the
//! full validation.

use std::collections::BTreeSet;
use std::fmt::Write;

use dcv_core::validate::{Category, Severity, ValidationReport};

#[derive(Clone, Debug)]
pub struct OutputFilter {
    pub severities: BTreeSet<&'static str>,
    pub categories: BTreeSet<&'static str>,
}

impl Default for OutputFilter {
    fn default() -> Self {
        OutputFilter {
            severities: [Severity::Error.code(), Severity::Warning.code()]
                .into_iter()
                .collect(),
            categories: [
                Category::Valid.code(),
                Category::Warning.code(),
                Category::Skipped.code(),
                Category::UnsatisfiedCondition.code(),
                Category::HasErrors.code(),
            ]
            .into_iter()
            .collect(),
        }
    }
}

impl OutputFilter {
    pub fn shows_severity(&self, severity: Severity) -> bool {
        self.severities.contains(severity.code())
    }

    pub fn shows_category(&self, category: Category) -> bool {
        self.categories.contains(category.code())
    }
}

pub fn render_filtered(report: &ValidationReport, filter: &OutputFilter) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "IOD {} (SOP Class {})",
        report.iod_name, report.sop_class_uid
    );
    if !report.answers_used.is_empty() {
        let answers: Vec<String> = report
            .answers_used
            .iter()
            .map(|(id, v)| format!("{id}={v}"))
            .collect();
        let _ = writeln!(out, "answers: {}", answers.join(", "));
    }
    for result in &report.module_results {
        if !filter.shows_category(result.category) {
            continue;
        }
        let _ = writeln!(
            out,
            "  {} [{}]: {}",
            result.module_name,
            result.ie,
            result.category.code()
        );
        for finding in &result.findings {
            if !filter.shows_severity(finding.severity) {
                continue;
            }
            let location = if finding.path.is_empty() {
                finding.keyword.clone()
            } else {
                format!("{}/{}", finding.path, finding.keyword)
            };
            let _ = writeln!(
                out,
                "    {} {} ({}) {}: {}",
                finding.severity.code(),
                finding.kind.code(),
                finding.tag,
                location,
                finding.message
            );
        }
    }
    let s = report.summary;
    let _ = writeln!(
        out,
        "summary: valid {}, warning {}, skipped {}, unsatisfied condition {}, has errors {}",
        s.valid, s.warning, s.skipped, s.unsatisfied_condition, s.has_errors
    );
    out
}
