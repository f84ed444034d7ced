//! The validation engine: applies module descriptions to a data set and
//! produces the five per-module categories (Valid, Warning, Skipped,
//! Unsatisfied Condition, Has Errors) with itemized element-level findings.
//!
//! The engine is a pure function of its inputs; validating concurrently over
//! a shared [`Registry`] needs no coordination.

mod condition;
mod encoding;
mod report;
mod vm;

pub use condition::{collect_questions, evaluate_condition, ConditionError, ScopeDefaults};
pub use encoding::check_vr_encoding;
pub use report::{render_text, report_to_json, report_to_json_value};
pub use vm::{check_vm, BadVmSpec, VmSpec};

use std::collections::{BTreeMap, BTreeSet};

use crate::dataset::DataSet;
use crate::description::{
    ElementRequirement, ElementType, IodDescription, Registry, RepoError,
};
use crate::tag::Tag;
use crate::vr::Vr;

/// User answers to precondition questions, keyed by precondition id.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Answers(BTreeMap<String, bool>);

impl Answers {
    pub fn new() -> Self {
        Answers::default()
    }

    pub fn set(&mut self, id: impl Into<String>, value: bool) {
        self.0.insert(id.into(), value);
    }

    pub fn get(&self, id: &str) -> Option<bool> {
        self.0.get(id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(String, bool)> for Answers {
    fn from_iter<T: IntoIterator<Item = (String, bool)>>(iter: T) -> Self {
        Answers(iter.into_iter().collect())
    }
}

/// Which modules to validate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Selection {
    All,
    Modules(BTreeSet<String>),
}

impl Selection {
    pub fn from_names<I: IntoIterator<Item = S>, S: Into<String>>(names: I) -> Self {
        Selection::Modules(names.into_iter().map(Into::into).collect())
    }

    pub fn includes(&self, module_name: &str) -> bool {
        match self {
            Selection::All => true,
            Selection::Modules(set) => set.contains(module_name),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn code(self) -> &'static str {
        match self {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum FindingKind {
    MissingType1,
    EmptyType1,
    MissingType2,
    VrMismatch,
    VmViolation,
    ValueNotAllowed,
    EncodingInvalid,
    ConditionViolatedMissing,
    UnexpectedConditional,
    Type3NonConformant,
    ItemCountViolation,
}

impl FindingKind {
    pub fn code(self) -> &'static str {
        match self {
            FindingKind::MissingType1 => "MISSING_TYPE1",
            FindingKind::EmptyType1 => "EMPTY_TYPE1",
            FindingKind::MissingType2 => "MISSING_TYPE2",
            FindingKind::VrMismatch => "VR_MISMATCH",
            FindingKind::VmViolation => "VM_VIOLATION",
            FindingKind::ValueNotAllowed => "VALUE_NOT_ALLOWED",
            FindingKind::EncodingInvalid => "ENCODING_INVALID",
            FindingKind::ConditionViolatedMissing => "CONDITION_VIOLATED_MISSING",
            FindingKind::UnexpectedConditional => "UNEXPECTED_CONDITIONAL",
            FindingKind::Type3NonConformant => "TYPE3_NON_CONFORMANT",
            FindingKind::ItemCountViolation => "ITEM_COUNT_VIOLATION",
        }
    }
}

/// One element-level problem.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Finding {
    pub tag: Tag,
    pub keyword: String,
    pub severity: Severity,
    pub kind: FindingKind,
    /// Element path for nested sequence contexts, e.g. `Seq[0]/Inner[1]`.
    /// Empty for top-level elements.
    pub path: String,
    pub message: String,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Category {
    Valid,
    Warning,
    Skipped,
    UnsatisfiedCondition,
    HasErrors,
}

impl Category {
    pub fn code(self) -> &'static str {
        match self {
            Category::Valid => "VALID",
            Category::Warning => "WARNING",
            Category::Skipped => "SKIPPED",
            Category::UnsatisfiedCondition => "UNSATISFIED_CONDITION",
            Category::HasErrors => "HAS_ERRORS",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModuleResult {
    pub module_name: String,
    pub ie: String,
    pub category: Category,
    pub findings: Vec<Finding>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Summary {
    pub valid: usize,
    pub warning: usize,
    pub skipped: usize,
    pub unsatisfied_condition: usize,
    pub has_errors: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValidationReport {
    pub sop_class_uid: String,
    pub iod_name: String,
    pub module_results: Vec<ModuleResult>,
    pub answers_used: Answers,
    pub summary: Summary,
}

#[derive(Debug, thiserror::Error)]
pub enum ValidateError {
    #[error("registry does not resolve module {0:?}")]
    UnresolvedModule(String),
    #[error(transparent)]
    Condition(#[from] ConditionError),
    #[error(transparent)]
    Repo(#[from] RepoError),
}

/// Sort rank for report ordering: 1, 1C, 2, 2C, 3, 3C.
fn type_rank(req: &ElementRequirement) -> u8 {
    let base = match req.element_type {
        ElementType::Type1 => 0,
        ElementType::Type2 => 2,
        ElementType::Type3 => 4,
    };
    base + u8::from(req.condition.is_some())
}

/// Validates `data` against the IOD under the given module selection and
/// precondition answers.
pub fn validate(
    data: &DataSet,
    iod: &IodDescription,
    registry: &Registry,
    selection: &Selection,
    answers: &Answers,
) -> Result<ValidationReport, ValidateError> {
    let iod_defaults: ScopeDefaults = iod
        .defines
        .iter()
        .map(|d| (d.id.clone(), d.default))
        .collect();

    let mut module_results = Vec::with_capacity(iod.includes.len());
    for include in &iod.includes {
        let mut result = ModuleResult {
            module_name: include.module_name.clone(),
            ie: include.ie.clone(),
            category: Category::Valid,
            findings: Vec::new(),
        };
        if !selection.includes(&include.module_name) {
            result.category = Category::Skipped;
            module_results.push(result);
            continue;
        }
        if let Some(condition) = &include.condition {
            if !evaluate_condition(condition, answers, &iod_defaults)? {
                result.category = Category::UnsatisfiedCondition;
                module_results.push(result);
                continue;
            }
        }
        let module = registry
            .module(&include.module_name)
            .ok_or_else(|| ValidateError::UnresolvedModule(include.module_name.clone()))?;
        let mut defaults = iod_defaults.clone();
        for define in &module.defines {
            defaults.insert(define.id.clone(), define.default);
        }
        let mut ranked: Vec<(u8, Finding)> = Vec::new();
        for req in registry.expand_requirements(module)? {
            check_requirement(data, req, answers, &defaults, "", &mut ranked)?;
        }
        ranked.sort_by_key(|a| (a.0, a.1.tag));
        let findings: Vec<Finding> = ranked.into_iter().map(|(_, f)| f).collect();
        result.category = if findings.iter().any(|f| f.severity == Severity::Error) {
            Category::HasErrors
        } else if findings.iter().any(|f| f.severity == Severity::Warning) {
            Category::Warning
        } else {
            Category::Valid
        };
        result.findings = findings;
        module_results.push(result);
    }

    let mut summary = Summary::default();
    for result in &module_results {
        match result.category {
            Category::Valid => summary.valid += 1,
            Category::Warning => summary.warning += 1,
            Category::Skipped => summary.skipped += 1,
            Category::UnsatisfiedCondition => summary.unsatisfied_condition += 1,
            Category::HasErrors => summary.has_errors += 1,
        }
    }

    // Record the effective answer for every question in scope.
    let mut answers_used = Answers::new();
    for question in collect_questions(iod, registry, selection)? {
        let value = answers.get(&question.id).unwrap_or(question.default);
        answers_used.set(question.id, value);
    }

    let sop_class_uid = data
        .string_value(crate::tag::tags::SOP_CLASS_UID)
        .ok()
        .flatten()
        .unwrap_or_default();

    Ok(ValidationReport {
        sop_class_uid,
        iod_name: iod.name.clone(),
        module_results,
        answers_used,
        summary,
    })
}

/// Applies one element requirement to a data set, returning its findings.
pub fn validate_requirement(
    data: &DataSet,
    req: &ElementRequirement,
    answers: &Answers,
    defaults: &ScopeDefaults,
) -> Result<Vec<Finding>, ConditionError> {
    let mut ranked = Vec::new();
    check_requirement(data, req, answers, defaults, "", &mut ranked)?;
    Ok(ranked.into_iter().map(|(_, f)| f).collect())
}

fn check_requirement(
    data: &DataSet,
    req: &ElementRequirement,
    answers: &Answers,
    defaults: &ScopeDefaults,
    path: &str,
    out: &mut Vec<(u8, Finding)>,
) -> Result<(), ConditionError> {
    let rank = type_rank(req);
    let push = |severity: Severity, kind: FindingKind, message: String, sink: &mut Vec<(u8, Finding)>| {
        sink.push((
            rank,
            Finding {
                tag: req.tag,
                keyword: req.keyword.clone(),
                severity,
                kind,
                path: path.to_string(),
                message,
            },
        ));
    };

    let condition_met = match &req.condition {
        None => true,
        Some(condition) => evaluate_condition(condition, answers, defaults)?,
    };
    let element = data.get(req.tag);

    if !condition_met {
        if element.is_some() {
            push(
                Severity::Error,
                FindingKind::UnexpectedConditional,
                format!(
                    "type {} element is present although its condition is not met",
                    req.type_code()
                ),
                out,
            );
        }
        return Ok(());
    }

    let Some(element) = element else {
        match req.element_type {
            ElementType::Type1 | ElementType::Type2 => {
                if req.condition.is_some() {
                    push(
                        Severity::Error,
                        FindingKind::ConditionViolatedMissing,
                        format!(
                            "condition is met but type {} element is missing",
                            req.type_code()
                        ),
                        out,
                    );
                } else if req.element_type == ElementType::Type1 {
                    push(
                        Severity::Error,
                        FindingKind::MissingType1,
                        "mandatory element is missing".to_string(),
                        out,
                    );
                } else {
                    push(
                        Severity::Error,
                        FindingKind::MissingType2,
                        "mandatory element is missing (an empty value would conform)".to_string(),
                        out,
                    );
                }
            }
            ElementType::Type3 => {}
        }
        return Ok(());
    };

    if element.is_empty() {
        if req.element_type == ElementType::Type1 {
            push(
                Severity::Error,
                FindingKind::EmptyType1,
                "type 1 element must carry a value".to_string(),
                out,
            );
        }
        return Ok(());
    }

    let type3 = req.element_type == ElementType::Type3;
    let mut defects: Vec<(FindingKind, String)> = Vec::new();

    if element.vr() != req.vr {
        defects.push((
            FindingKind::VrMismatch,
            format!(
                "file encodes VR {}, description requires {}",
                element.vr(),
                req.vr
            ),
        ));
    }

    if req.vr == Vr::SQ {
        if let Some(items) = element.items() {
            if let Some(spec) = &req.item_count_spec {
                if let Ok(false) = check_vm(spec, items.len()) {
                    defects.push((
                        FindingKind::ItemCountViolation,
                        format!("item count {} violates items spec {}", items.len(), spec),
                    ));
                }
            }
            if let Some(item_reqs) = &req.item_requirements {
                for (index, item) in items.iter().enumerate() {
                    let item_path = if path.is_empty() {
                        format!("{}[{}]", req.keyword, index)
                    } else {
                        format!("{}/{}[{}]", path, req.keyword, index)
                    };
                    for item_req in item_reqs {
                        check_requirement(&item.data, item_req, answers, defaults, &item_path, out)?;
                    }
                }
            }
        }
    } else if let Some(bytes) = element.value_bytes() {
        let count = element.value_count();
        if let Ok(false) = check_vm(&req.vm, count) {
            defects.push((
                FindingKind::VmViolation,
                format!("value count {} violates VM {}", count, req.vm),
            ));
        }
        if let Some(allowed) = &req.allowed_values {
            for value in element.text_components() {
                if !allowed.contains(&value) {
                    defects.push((
                        FindingKind::ValueNotAllowed,
                        format!(
                            "value {:?} is not in the allowed list [{}]",
                            value,
                            allowed.join(", ")
                        ),
                    ));
                }
            }
        }
        for defect in check_vr_encoding(req.vr, bytes) {
            defects.push((FindingKind::EncodingInvalid, defect));
        }
    }

    for (kind, message) in defects {
        if type3 {
            push(Severity::Warning, FindingKind::Type3NonConformant, message, out);
        } else {
            push(Severity::Error, kind, message, out);
        }
    }
    Ok(())
}
