//! Line-accurate checking of description documents. Unlike the `parse_*`
//! functions, `lint` never stops at the first problem: it reports every
//! structural and semantic issue with the line it sits on. An empty finding
//! list means the file is accepted.

use roxmltree::Document;

use super::xml::{read_iod, read_module, read_table, Issue, IssueKind, ReadCtx};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LintLevel {
    Error,
    Warning,
}

impl LintLevel {
    pub fn code(self) -> &'static str {
        match self {
            LintLevel::Error => "ERROR",
            LintLevel::Warning => "WARNING",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LintFinding {
    pub level: LintLevel,
    pub line: u32,
    pub message: String,
}

impl LintFinding {
    /// Machine-readable rendering: `LEVEL<TAB>LINE<TAB>MESSAGE`.
    pub fn machine_line(&self) -> String {
        format!("{}\t{}\t{}", self.level.code(), self.line, self.message)
    }
}

/// What the document is expected to contain. `Auto` identifies the content
/// from the root element name.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LintKind {
    Iod,
    Module,
    Auto,
}

fn finding(issue: Issue) -> LintFinding {
    LintFinding {
        level: LintLevel::Error,
        line: issue.line,
        message: issue.kind.message(),
    }
}

pub fn lint(xml: &str, kind: LintKind) -> Vec<LintFinding> {
    let doc = match Document::parse(xml) {
        Ok(doc) => doc,
        Err(err) => {
            let issue = match kind {
                LintKind::Auto => Issue {
                    line: err.pos().row,
                    kind: IssueKind::IdentificationFailure(err.to_string()),
                },
                _ => super::xml::xml_error_issue(&err),
            };
            return vec![finding(issue)];
        }
    };
    let root = doc.root_element();
    let root_name = root.tag_name().name().to_string();
    let mut ctx = ReadCtx::new(&doc);

    match (kind, root_name.as_str()) {
        (LintKind::Iod | LintKind::Auto, "IOD") => {
            read_iod(&mut ctx, root);
        }
        (LintKind::Module | LintKind::Auto, "Module") => {
            read_module(&mut ctx, root);
        }
        (LintKind::Auto, "Table") => {
            read_table(&mut ctx, root);
        }
        (LintKind::Iod, other) => {
            return vec![finding(Issue {
                line: 1,
                kind: IssueKind::WrongRoot {
                    expected: "IOD",
                    found: other.to_string(),
                },
            })];
        }
        (LintKind::Module, other) => {
            return vec![finding(Issue {
                line: 1,
                kind: IssueKind::WrongRoot {
                    expected: "Module",
                    found: other.to_string(),
                },
            })];
        }
        (LintKind::Auto, other) => {
            return vec![finding(Issue {
                line: 1,
                kind: IssueKind::IdentificationFailure(format!(
                    "root element <{other}> is none of <IOD>, <Module>, <Table>"
                )),
            })];
        }
    }

    let mut findings: Vec<LintFinding> = ctx.issues.into_iter().map(finding).collect();
    findings.sort_by_key(|f| f.line);
    findings
}
