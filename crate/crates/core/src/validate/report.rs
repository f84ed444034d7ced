//! Report serialization: the canonical JSON shape shared by the CLI and the
//! HTTP service, plus a human-readable text rendering.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use super::ValidationReport;

#[derive(Serialize)]
struct ReportJson<'a> {
    #[serde(rename = "validationId")]
    validation_id: &'a str,
    #[serde(rename = "sopClassUid")]
    sop_class_uid: &'a str,
    iod: &'a str,
    summary: SummaryJson,
    modules: Vec<ModuleJson<'a>>,
    #[serde(rename = "answersUsed")]
    answers_used: BTreeMap<&'a str, bool>,
}

#[derive(Serialize)]
struct SummaryJson {
    valid: usize,
    warning: usize,
    skipped: usize,
    #[serde(rename = "unsatisfiedCondition")]
    unsatisfied_condition: usize,
    #[serde(rename = "hasErrors")]
    has_errors: usize,
}

#[derive(Serialize)]
struct ModuleJson<'a> {
    name: &'a str,
    ie: &'a str,
    category: &'static str,
    findings: Vec<FindingJson<'a>>,
}

#[derive(Serialize)]
struct FindingJson<'a> {
    tag: String,
    keyword: &'a str,
    severity: &'static str,
    kind: &'static str,
    path: &'a str,
    message: &'a str,
}

fn to_dto<'a>(report: &'a ValidationReport, validation_id: &'a str) -> ReportJson<'a> {
    ReportJson {
        validation_id,
        sop_class_uid: &report.sop_class_uid,
        iod: &report.iod_name,
        summary: SummaryJson {
            valid: report.summary.valid,
            warning: report.summary.warning,
            skipped: report.summary.skipped,
            unsatisfied_condition: report.summary.unsatisfied_condition,
            has_errors: report.summary.has_errors,
        },
        modules: report
            .module_results
            .iter()
            .map(|m| ModuleJson {
                name: &m.module_name,
                ie: &m.ie,
                category: m.category.code(),
                findings: m
                    .findings
                    .iter()
                    .map(|f| FindingJson {
                        tag: f.tag.to_string(),
                        keyword: &f.keyword,
                        severity: f.severity.code(),
                        kind: f.kind.code(),
                        path: &f.path,
                        message: &f.message,
                    })
                    .collect(),
            })
            .collect(),
        answers_used: report.answers_used.iter().collect(),
    }
}

/// Canonical JSON rendering with fixed key order. Identical report inputs
/// produce byte-identical output.
pub fn report_to_json(report: &ValidationReport, validation_id: &str) -> String {
    serde_json::to_string(&to_dto(report, validation_id)).expect("report serialization")
}

pub fn report_to_json_value(report: &ValidationReport, validation_id: &str) -> serde_json::Value {
    serde_json::to_value(to_dto(report, validation_id)).expect("report serialization")
}

/// Plain-text rendering of the full report.
pub fn render_text(report: &ValidationReport) -> String {
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
        let _ = writeln!(
            out,
            "  {} [{}]: {}",
            result.module_name,
            result.ie,
            result.category.code()
        );
        for finding in &result.findings {
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
