use std::collections::BTreeSet;

use super::{Answers, Selection, ValidateError};
use crate::description::{Condition, IodDescription, Precondition, Registry};

/// Precondition defaults visible at an evaluation site.
pub type ScopeDefaults = std::collections::BTreeMap<String, bool>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConditionError {
    #[error("condition references precondition {0:?} which is not in scope")]
    UnknownIdref(String),
}

/// Evaluates a condition: `If(x)` takes the user's answer when present and
/// the in-scope default otherwise; `And`/`Or` combine children. Children are
/// always fully evaluated so out-of-scope idrefs surface regardless of
/// short-circuit opportunities.
pub fn evaluate_condition(
    condition: &Condition,
    answers: &Answers,
    defaults: &ScopeDefaults,
) -> Result<bool, ConditionError> {
    match condition {
        Condition::If(id) => match answers.get(id) {
            Some(answer) => Ok(answer),
            None => defaults
                .get(id)
                .copied()
                .ok_or_else(|| ConditionError::UnknownIdref(id.clone())),
        },
        Condition::And(children) => {
            let mut result = true;
            for child in children {
                result &= evaluate_condition(child, answers, defaults)?;
            }
            Ok(result)
        }
        Condition::Or(children) => {
            let mut result = false;
            for child in children {
                result |= evaluate_condition(child, answers, defaults)?;
            }
            Ok(result)
        }
    }
}

/// Gathers, in document order and de-duplicated by id, every precondition
/// reachable from the selected modules: IOD-level defines referenced by the
/// selected includes (or by requirement conditions inside their modules),
/// plus all module-level defines of the selected modules.
pub fn collect_questions(
    iod: &IodDescription,
    registry: &Registry,
    selection: &Selection,
) -> Result<Vec<Precondition>, ValidateError> {
    let mut referenced_iod_ids: BTreeSet<String> = BTreeSet::new();
    for include in &iod.includes {
        if !selection.includes(&include.module_name) {
            continue;
        }
        if let Some(condition) = &include.condition {
            for idref in condition.idrefs() {
                referenced_iod_ids.insert(idref.to_string());
            }
        }
        let module = registry
            .module(&include.module_name)
            .ok_or_else(|| ValidateError::UnresolvedModule(include.module_name.clone()))?;
        for req in registry.expand_requirements(module)? {
            collect_requirement_idrefs(req, &mut referenced_iod_ids);
        }
    }

    let mut out: Vec<Precondition> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for define in &iod.defines {
        if referenced_iod_ids.contains(&define.id) && seen.insert(define.id.clone()) {
            out.push(define.clone());
        }
    }
    for include in &iod.includes {
        if !selection.includes(&include.module_name) {
            continue;
        }
        let module = registry
            .module(&include.module_name)
            .ok_or_else(|| ValidateError::UnresolvedModule(include.module_name.clone()))?;
        for define in &module.defines {
            if seen.insert(define.id.clone()) {
                out.push(define.clone());
            }
        }
    }
    Ok(out)
}

fn collect_requirement_idrefs(
    req: &crate::description::ElementRequirement,
    out: &mut BTreeSet<String>,
) {
    if let Some(condition) = &req.condition {
        for idref in condition.idrefs() {
            out.insert(idref.to_string());
        }
    }
    for item_req in req.item_requirements.iter().flatten() {
        collect_requirement_idrefs(item_req, out);
    }
}
