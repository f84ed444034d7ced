//! The XML reader behind `parse_iod` / `parse_module` / `parse_table` and the
//! linter. Reading never bails early: it collects every issue it finds so the
//! linter can report them all, while the `parse_*` entry points fail on the
//! first structural issue. Semantic issues (unresolved idrefs in IODs,
//! allowed values that break their VR rule) never fail a parse; they only
//! show up as lint findings or registry-load errors.

use roxmltree::{Document, Node};

use super::{
    Condition, ElementRequirement, ElementType, IodDescription, MacroTable, ModuleDescription,
    ModuleInclude, Precondition, RequirementEntry, TableInclude, Usage,
};
use crate::tag::Tag;
use crate::validate::check_vr_encoding;
use crate::vr::Vr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DescriptionError {
    #[error("line {line}: malformed XML: {message}")]
    MalformedXml { line: u32, message: String },
    #[error("line {line}: expected root element <{expected}>, found <{found}>")]
    WrongRoot {
        line: u32,
        expected: &'static str,
        found: String,
    },
    #[error("line {line}: unknown element <{name}>")]
    UnknownElement { line: u32, name: String },
    #[error("line {line}: bad attribute: {message}")]
    BadAttribute { line: u32, message: String },
    #[error("line {line}: unknown usage code {code:?}")]
    UnknownUsageCode { line: u32, code: String },
    #[error("line {line}: duplicate define id {id:?}")]
    DuplicateDefineId { line: u32, id: String },
    #[error("line {line}: tag must be 8 hex digits, got {text:?}")]
    BadTagHex { line: u32, text: String },
    #[error("line {line}: unknown VR {text:?}")]
    UnknownVr { line: u32, text: String },
    #[error("line {line}: element type must be 1, 2 or 3, got {text:?}")]
    BadType { line: u32, text: String },
    #[error("line {line}: bad VM spec {text:?}")]
    BadVmSpec { line: u32, text: String },
    #[error("line {line}: bad condition: {message}")]
    BadCondition { line: u32, message: String },
    #[error("line {line}: bad structure: {message}")]
    BadStructure { line: u32, message: String },
}

/// One problem found while reading a description document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Issue {
    pub line: u32,
    pub kind: IssueKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum IssueKind {
    MalformedXml(String),
    WrongRoot {
        expected: &'static str,
        found: String,
    },
    UnknownElement(String),
    BadAttribute(String),
    UnknownUsageCode(String),
    DuplicateDefineId(String),
    BadTagHex(String),
    UnknownVr(String),
    BadType(String),
    BadVmSpec(String),
    BadCondition(String),
    BadStructure(String),
    // Semantic issues: reported by the linter, never a parse failure.
    UnresolvedIdref(String),
    BadAllowedValue {
        value: String,
        defect: String,
    },
    IdentificationFailure(String),
}

impl IssueKind {
    pub fn is_semantic(&self) -> bool {
        matches!(
            self,
            IssueKind::UnresolvedIdref(_) | IssueKind::BadAllowedValue { .. }
        )
    }

    pub fn message(&self) -> String {
        match self {
            IssueKind::MalformedXml(m) => format!("malformed XML: {m}"),
            IssueKind::WrongRoot { expected, found } => {
                format!("expected root element <{expected}>, found <{found}>")
            }
            IssueKind::UnknownElement(name) => format!("unknown element <{name}>"),
            IssueKind::BadAttribute(m) => format!("bad attribute: {m}"),
            IssueKind::UnknownUsageCode(code) => format!("unknown usage code {code:?}"),
            IssueKind::DuplicateDefineId(id) => format!("duplicate define id {id:?}"),
            IssueKind::BadTagHex(text) => format!("tag must be 8 hex digits, got {text:?}"),
            IssueKind::UnknownVr(text) => format!("unknown VR {text:?}"),
            IssueKind::BadType(text) => format!("element type must be 1, 2 or 3, got {text:?}"),
            IssueKind::BadVmSpec(text) => format!("bad VM spec {text:?}"),
            IssueKind::BadCondition(m) => format!("bad condition: {m}"),
            IssueKind::BadStructure(m) => format!("bad structure: {m}"),
            IssueKind::UnresolvedIdref(id) => {
                format!("condition references undefined precondition {id:?}")
            }
            IssueKind::BadAllowedValue { value, defect } => {
                format!("allowed value {value:?} breaks its VR rule: {defect}")
            }
            IssueKind::IdentificationFailure(m) => {
                format!("cannot identify content as an IOD, Module or Table description: {m}")
            }
        }
    }
}

impl From<Issue> for DescriptionError {
    fn from(issue: Issue) -> Self {
        let line = issue.line;
        match issue.kind {
            IssueKind::MalformedXml(message) => DescriptionError::MalformedXml { line, message },
            IssueKind::WrongRoot { expected, found } => {
                DescriptionError::WrongRoot { line, expected, found }
            }
            IssueKind::UnknownElement(name) => DescriptionError::UnknownElement { line, name },
            IssueKind::BadAttribute(message) => DescriptionError::BadAttribute { line, message },
            IssueKind::UnknownUsageCode(code) => DescriptionError::UnknownUsageCode { line, code },
            IssueKind::DuplicateDefineId(id) => DescriptionError::DuplicateDefineId { line, id },
            IssueKind::BadTagHex(text) => DescriptionError::BadTagHex { line, text },
            IssueKind::UnknownVr(text) => DescriptionError::UnknownVr { line, text },
            IssueKind::BadType(text) => DescriptionError::BadType { line, text },
            IssueKind::BadVmSpec(text) => DescriptionError::BadVmSpec { line, text },
            IssueKind::BadCondition(message) => DescriptionError::BadCondition { line, message },
            kind => DescriptionError::BadStructure {
                line,
                message: kind.message(),
            },
        }
    }
}

pub(crate) struct ReadCtx<'a, 'input> {
    doc: &'a Document<'input>,
    pub issues: Vec<Issue>,
}

impl<'a, 'input> ReadCtx<'a, 'input> {
    pub fn new(doc: &'a Document<'input>) -> Self {
        ReadCtx {
            doc,
            issues: Vec::new(),
        }
    }

    fn line_of(&self, node: Node) -> u32 {
        self.doc.text_pos_at(node.range().start).row
    }

    fn attr_line(&self, node: Node, name: &str) -> u32 {
        node.attributes()
            .find(|a| a.name() == name)
            .map(|a| self.doc.text_pos_at(a.range().start).row)
            .unwrap_or_else(|| self.line_of(node))
    }

    fn push(&mut self, line: u32, kind: IssueKind) {
        self.issues.push(Issue { line, kind });
    }

    fn push_at(&mut self, node: Node, kind: IssueKind) {
        self.push(self.line_of(node), kind);
    }

    /// Required attribute; reports a BadAttribute issue when missing.
    fn required_attr(&mut self, node: Node<'_, 'input>, name: &str) -> Option<String> {
        match node.attribute(name) {
            Some(v) => Some(v.to_string()),
            None => {
                let element = node.tag_name().name().to_string();
                self.push_at(
                    node,
                    IssueKind::BadAttribute(format!("<{element}> is missing {name:?}")),
                );
                None
            }
        }
    }

    /// Flags attributes outside the allowed set.
    fn check_attrs(&mut self, node: Node, allowed: &[&str]) {
        let element = node.tag_name().name().to_string();
        let unknown: Vec<(u32, String)> = node
            .attributes()
            .filter(|a| !allowed.contains(&a.name()))
            .map(|a| {
                (
                    self.doc.text_pos_at(a.range().start).row,
                    a.name().to_string(),
                )
            })
            .collect();
        for (line, name) in unknown {
            self.push(
                line,
                IssueKind::BadAttribute(format!("<{element}> does not take {name:?}")),
            );
        }
    }

    fn bool_attr(&mut self, node: Node, name: &str, value: &str) -> bool {
        match value {
            "true" => true,
            "false" => false,
            other => {
                self.push(
                    self.attr_line(node, name),
                    IssueKind::BadAttribute(format!(
                        "{name}={other:?} is not \"true\" or \"false\""
                    )),
                );
                false
            }
        }
    }

    fn check_no_significant_text(&mut self, node: Node) {
        let stray: Vec<u32> = node
            .children()
            .filter(|c| c.is_text() && !c.text().unwrap_or("").trim().is_empty())
            .map(|c| self.line_of(c))
            .collect();
        for line in stray {
            self.push(
                line,
                IssueKind::BadStructure(format!(
                    "unexpected text inside <{}>",
                    node.tag_name().name()
                )),
            );
        }
    }
}

fn is_condition_element(name: &str) -> bool {
    matches!(name, "If" | "And" | "Or")
}

fn read_condition<'input>(ctx: &mut ReadCtx<'_, 'input>, node: Node<'_, 'input>) -> Option<Condition> {
    match node.tag_name().name() {
        "If" => {
            ctx.check_attrs(node, &["idref"]);
            ctx.check_no_significant_text(node);
            for child in node.children().filter(|c| c.is_element()) {
                ctx.push_at(
                    child,
                    IssueKind::BadCondition("<If> does not take children".to_string()),
                );
            }
            let idref = ctx.required_attr(node, "idref")?;
            Some(Condition::If(idref))
        }
        "And" | "Or" => {
            let name = node.tag_name().name().to_string();
            ctx.check_attrs(node, &[]);
            ctx.check_no_significant_text(node);
            let mut children = Vec::new();
            for child in node.children().filter(|c| c.is_element()) {
                if is_condition_element(child.tag_name().name()) {
                    if let Some(cond) = read_condition(ctx, child) {
                        children.push(cond);
                    }
                } else {
                    ctx.push_at(
                        child,
                        IssueKind::UnknownElement(child.tag_name().name().to_string()),
                    );
                }
            }
            if children.len() < 2 {
                ctx.push_at(
                    node,
                    IssueKind::BadCondition(format!("<{name}> requires at least two children")),
                );
                return children.into_iter().next();
            }
            if name == "And" {
                Some(Condition::And(children))
            } else {
                Some(Condition::Or(children))
            }
        }
        _ => None,
    }
}

/// Reads the optional single condition child of `node`, flagging extra ones.
fn read_condition_child<'input>(
    ctx: &mut ReadCtx<'_, 'input>,
    node: Node<'_, 'input>,
) -> Option<Condition> {
    let mut condition = None;
    for child in node.children().filter(|c| c.is_element()) {
        let name = child.tag_name().name();
        if !is_condition_element(name) {
            continue;
        }
        if condition.is_some() {
            ctx.push_at(
                child,
                IssueKind::BadCondition(
                    "more than one condition root; wrap them in <And> or <Or>".to_string(),
                ),
            );
            continue;
        }
        condition = read_condition(ctx, child);
    }
    condition
}

fn read_define<'input>(
    ctx: &mut ReadCtx<'_, 'input>,
    node: Node<'_, 'input>,
    seen: &mut Vec<String>,
) -> Option<Precondition> {
    ctx.check_attrs(node, &["id", "question", "default", "value"]);
    ctx.check_no_significant_text(node);
    for child in node.children().filter(|c| c.is_element()) {
        ctx.push_at(
            child,
            IssueKind::BadStructure("<define> does not take children".to_string()),
        );
    }
    let id = ctx.required_attr(node, "id")?;
    if seen.contains(&id) {
        ctx.push(
            ctx.attr_line(node, "id"),
            IssueKind::DuplicateDefineId(id.clone()),
        );
        return None;
    }
    seen.push(id.clone());
    let question = ctx.required_attr(node, "question")?;
    // Both spellings of the default answer are accepted.
    let default = match (node.attribute("default"), node.attribute("value")) {
        (Some(v), None) => ctx.bool_attr(node, "default", v),
        (None, Some(v)) => ctx.bool_attr(node, "value", v),
        (Some(_), Some(_)) => {
            ctx.push_at(
                node,
                IssueKind::BadAttribute(
                    "<define> takes either \"default\" or \"value\", not both".to_string(),
                ),
            );
            return None;
        }
        (None, None) => {
            ctx.push_at(
                node,
                IssueKind::BadAttribute(
                    "<define> is missing a default answer (\"default\" or \"value\")".to_string(),
                ),
            );
            return None;
        }
    };
    Some(Precondition {
        id,
        question,
        default,
    })
}

fn read_iod_include<'input>(
    ctx: &mut ReadCtx<'_, 'input>,
    node: Node<'_, 'input>,
) -> Option<ModuleInclude> {
    ctx.check_attrs(node, &["ie", "module", "usage"]);
    ctx.check_no_significant_text(node);
    for child in node.children().filter(|c| c.is_element()) {
        if !is_condition_element(child.tag_name().name()) {
            ctx.push_at(
                child,
                IssueKind::UnknownElement(child.tag_name().name().to_string()),
            );
        }
    }
    let condition = read_condition_child(ctx, node);
    let ie = ctx.required_attr(node, "ie")?;
    let module_name = ctx.required_attr(node, "module")?;
    let usage_code = ctx.required_attr(node, "usage")?;
    let usage = match Usage::from_code(&usage_code) {
        Some(u) => u,
        None => {
            ctx.push(
                ctx.attr_line(node, "usage"),
                IssueKind::UnknownUsageCode(usage_code),
            );
            return None;
        }
    };
    Some(ModuleInclude {
        ie,
        module_name,
        usage,
        condition,
    })
}

fn read_data_element<'input>(
    ctx: &mut ReadCtx<'_, 'input>,
    node: Node<'_, 'input>,
) -> Option<ElementRequirement> {
    ctx.check_attrs(node, &["keyword", "tag", "vr", "vm", "type", "items"]);
    ctx.check_no_significant_text(node);

    let keyword = ctx.required_attr(node, "keyword")?;
    let tag_text = ctx.required_attr(node, "tag")?;
    let tag: Option<Tag> = match tag_text.parse() {
        Ok(t) => Some(t),
        Err(_) => {
            ctx.push(
                ctx.attr_line(node, "tag"),
                IssueKind::BadTagHex(tag_text.clone()),
            );
            None
        }
    };
    let vr_text = ctx.required_attr(node, "vr")?;
    let vr: Option<Vr> = match vr_text.parse() {
        Ok(v) => Some(v),
        Err(_) => {
            ctx.push(
                ctx.attr_line(node, "vr"),
                IssueKind::UnknownVr(vr_text.clone()),
            );
            None
        }
    };
    let type_text = ctx.required_attr(node, "type")?;
    let element_type = match ElementType::from_code(&type_text) {
        Some(t) => Some(t),
        None => {
            ctx.push(
                ctx.attr_line(node, "type"),
                IssueKind::BadType(type_text),
            );
            None
        }
    };
    let vm = ctx.required_attr(node, "vm")?;
    if vm.parse::<crate::validate::VmSpec>().is_err() {
        ctx.push(ctx.attr_line(node, "vm"), IssueKind::BadVmSpec(vm.clone()));
        return None;
    }

    let is_sq = vr == Some(Vr::SQ);
    let item_count_spec = node.attribute("items").map(str::to_string);
    if let Some(spec) = &item_count_spec {
        if !is_sq {
            ctx.push(
                ctx.attr_line(node, "items"),
                IssueKind::BadAttribute("\"items\" requires vr=\"SQ\"".to_string()),
            );
        } else if spec.parse::<crate::validate::VmSpec>().is_err() {
            ctx.push(
                ctx.attr_line(node, "items"),
                IssueKind::BadVmSpec(spec.clone()),
            );
        }
    }

    let condition = read_condition_child(ctx, node);

    let mut allowed_values: Vec<String> = Vec::new();
    let mut item_requirements: Option<Vec<ElementRequirement>> = None;
    for child in node.children().filter(|c| c.is_element()) {
        match child.tag_name().name() {
            "Value" => {
                if is_sq {
                    ctx.push_at(
                        child,
                        IssueKind::BadStructure(
                            "SQ elements take <Item> children, not <Value>".to_string(),
                        ),
                    );
                    continue;
                }
                for grand in child.children().filter(|c| c.is_element()) {
                    ctx.push_at(
                        grand,
                        IssueKind::BadStructure("<Value> holds text only".to_string()),
                    );
                }
                let value = child.text().unwrap_or("").trim().to_string();
                if let Some(vr) = vr {
                    for defect in check_vr_encoding(vr, value.as_bytes()) {
                        ctx.push_at(
                            child,
                            IssueKind::BadAllowedValue {
                                value: value.clone(),
                                defect,
                            },
                        );
                    }
                }
                allowed_values.push(value);
            }
            "Item" => {
                if !is_sq {
                    ctx.push_at(
                        child,
                        IssueKind::BadStructure("<Item> requires vr=\"SQ\"".to_string()),
                    );
                    continue;
                }
                if item_requirements.is_some() {
                    ctx.push_at(
                        child,
                        IssueKind::BadStructure("at most one <Item> block per element".to_string()),
                    );
                    continue;
                }
                ctx.check_attrs(child, &[]);
                ctx.check_no_significant_text(child);
                let mut reqs = Vec::new();
                for grand in child.children().filter(|c| c.is_element()) {
                    match grand.tag_name().name() {
                        "DataElement" => {
                            if let Some(req) = read_data_element(ctx, grand) {
                                reqs.push(req);
                            }
                        }
                        other => {
                            ctx.push_at(grand, IssueKind::UnknownElement(other.to_string()));
                        }
                    }
                }
                item_requirements = Some(reqs);
            }
            name if is_condition_element(name) => {}
            other => {
                ctx.push_at(child, IssueKind::UnknownElement(other.to_string()));
            }
        }
    }

    Some(ElementRequirement {
        keyword,
        tag: tag?,
        vr: vr?,
        vm,
        element_type: element_type?,
        condition,
        allowed_values: if allowed_values.is_empty() {
            None
        } else {
            Some(allowed_values)
        },
        item_requirements,
        item_count_spec,
    })
}

fn read_table_include<'input>(
    ctx: &mut ReadCtx<'_, 'input>,
    node: Node<'_, 'input>,
) -> Option<TableInclude> {
    ctx.check_attrs(node, &["table"]);
    ctx.check_no_significant_text(node);
    for child in node.children().filter(|c| c.is_element()) {
        ctx.push_at(
            child,
            IssueKind::BadStructure("table includes do not take children".to_string()),
        );
    }
    let table_id = ctx.required_attr(node, "table")?;
    Some(TableInclude { table_id })
}

pub(crate) fn read_iod<'input>(ctx: &mut ReadCtx<'_, 'input>, root: Node<'_, 'input>) -> IodDescription {
    ctx.check_attrs(root, &[]);
    ctx.check_no_significant_text(root);
    let mut iod = IodDescription::default();
    let mut seen_ids = Vec::new();
    for child in root.children().filter(|c| c.is_element()) {
        match child.tag_name().name() {
            "define" => {
                if let Some(p) = read_define(ctx, child, &mut seen_ids) {
                    iod.defines.push(p);
                }
            }
            "include" => {
                if let Some(inc) = read_iod_include(ctx, child) {
                    iod.includes.push(inc);
                }
            }
            other => {
                ctx.push_at(child, IssueKind::UnknownElement(other.to_string()));
            }
        }
    }
    // Include conditions resolve against IOD-level defines only.
    let known: Vec<&str> = iod.defines.iter().map(|p| p.id.as_str()).collect();
    let mut unresolved = Vec::new();
    for child in root.children().filter(|c| c.is_element()) {
        collect_unresolved_idrefs(ctx, child, &known, &mut unresolved);
    }
    for (line, id) in unresolved {
        ctx.push(line, IssueKind::UnresolvedIdref(id));
    }
    iod
}

fn collect_unresolved_idrefs(
    ctx: &ReadCtx,
    node: Node,
    known: &[&str],
    out: &mut Vec<(u32, String)>,
) {
    if node.tag_name().name() == "If" {
        if let Some(idref) = node.attribute("idref") {
            if !known.contains(&idref) {
                out.push((ctx.line_of(node), idref.to_string()));
            }
        }
    }
    for child in node.children().filter(|c| c.is_element()) {
        collect_unresolved_idrefs(ctx, child, known, out);
    }
}

pub(crate) fn read_module<'input>(
    ctx: &mut ReadCtx<'_, 'input>,
    root: Node<'_, 'input>,
) -> ModuleDescription {
    ctx.check_attrs(root, &[]);
    ctx.check_no_significant_text(root);
    let mut module = ModuleDescription::default();
    let mut seen_ids = Vec::new();
    for child in root.children().filter(|c| c.is_element()) {
        match child.tag_name().name() {
            "define" => {
                if let Some(p) = read_define(ctx, child, &mut seen_ids) {
                    module.defines.push(p);
                }
            }
            "DataElement" => {
                if let Some(req) = read_data_element(ctx, child) {
                    module.requirements.push(RequirementEntry::Element(req));
                }
            }
            "include" => {
                if let Some(inc) = read_table_include(ctx, child) {
                    module.requirements.push(RequirementEntry::Table(inc));
                }
            }
            other => {
                ctx.push_at(child, IssueKind::UnknownElement(other.to_string()));
            }
        }
    }
    // Idrefs that do not resolve locally are assumed to name IOD-level
    // defines; the registry checks them against each including IOD.
    module
}

pub(crate) fn read_table<'input>(ctx: &mut ReadCtx<'_, 'input>, root: Node<'_, 'input>) -> MacroTable {
    ctx.check_attrs(root, &["id"]);
    ctx.check_no_significant_text(root);
    let mut table = MacroTable::default();
    if let Some(id) = ctx.required_attr(root, "id") {
        table.table_id = id;
    }
    for child in root.children().filter(|c| c.is_element()) {
        match child.tag_name().name() {
            "DataElement" => {
                if let Some(req) = read_data_element(ctx, child) {
                    table.requirements.push(RequirementEntry::Element(req));
                }
            }
            "include" => {
                if let Some(inc) = read_table_include(ctx, child) {
                    table.requirements.push(RequirementEntry::Table(inc));
                }
            }
            other => {
                ctx.push_at(child, IssueKind::UnknownElement(other.to_string()));
            }
        }
    }
    table
}

pub(crate) fn xml_error_issue(err: &roxmltree::Error) -> Issue {
    Issue {
        line: err.pos().row,
        kind: IssueKind::MalformedXml(err.to_string()),
    }
}

fn first_structural(issues: Vec<Issue>) -> Option<Issue> {
    issues.into_iter().find(|i| !i.kind.is_semantic())
}

/// Parses an IOD description document.
pub fn parse_iod(xml: &str) -> Result<IodDescription, DescriptionError> {
    let doc = Document::parse(xml).map_err(|e| DescriptionError::from(xml_error_issue(&e)))?;
    let root = doc.root_element();
    let mut ctx = ReadCtx::new(&doc);
    if root.tag_name().name() != "IOD" {
        return Err(DescriptionError::WrongRoot {
            line: ctx.line_of(root),
            expected: "IOD",
            found: root.tag_name().name().to_string(),
        });
    }
    let iod = read_iod(&mut ctx, root);
    match first_structural(ctx.issues) {
        Some(issue) => Err(issue.into()),
        None => Ok(iod),
    }
}

/// Parses a Module description document.
pub fn parse_module(xml: &str) -> Result<ModuleDescription, DescriptionError> {
    let doc = Document::parse(xml).map_err(|e| DescriptionError::from(xml_error_issue(&e)))?;
    let root = doc.root_element();
    let mut ctx = ReadCtx::new(&doc);
    if root.tag_name().name() != "Module" {
        return Err(DescriptionError::WrongRoot {
            line: ctx.line_of(root),
            expected: "Module",
            found: root.tag_name().name().to_string(),
        });
    }
    let module = read_module(&mut ctx, root);
    match first_structural(ctx.issues) {
        Some(issue) => Err(issue.into()),
        None => Ok(module),
    }
}

/// Parses a macro attribute table document.
pub fn parse_table(xml: &str) -> Result<MacroTable, DescriptionError> {
    let doc = Document::parse(xml).map_err(|e| DescriptionError::from(xml_error_issue(&e)))?;
    let root = doc.root_element();
    let mut ctx = ReadCtx::new(&doc);
    if root.tag_name().name() != "Table" {
        return Err(DescriptionError::WrongRoot {
            line: ctx.line_of(root),
            expected: "Table",
            found: root.tag_name().name().to_string(),
        });
    }
    let table = read_table(&mut ctx, root);
    match first_structural(ctx.issues) {
        Some(issue) => Err(issue.into()),
        None => Ok(table),
    }
}
