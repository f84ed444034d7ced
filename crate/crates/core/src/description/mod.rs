//! Model and tooling for the XML description files that drive validation:
//! Modality IODs, Modules and reusable macro attribute tables.
//!
//! A repository directory (`iods/`, `modules/`, `tables/`, `sopclass-map.txt`)
//! loads into an immutable [`Registry`] with all cross-references checked.
//! Single files can be parsed with [`parse_iod`] / [`parse_module`] or checked
//! with the line-accurate [`lint`].

mod lint;
mod print;
mod registry;
pub(crate) mod xml;

pub use lint::{lint, LintFinding, LintKind, LintLevel};
pub use print::{print_iod, print_module, print_table};
pub use registry::{load_repository, RepoError, RepoLoad, Registry};
pub use xml::{parse_iod, parse_module, parse_table, DescriptionError};

use crate::tag::Tag;
use crate::vr::Vr;

/// A yes/no question with a default answer, referenced from conditions by id.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Precondition {
    pub id: String,
    pub question: String,
    pub default: bool,
}

/// Condition expression over precondition answers.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Condition {
    If(String),
    And(Vec<Condition>),
    Or(Vec<Condition>),
}

impl Condition {
    /// Every idref mentioned anywhere in the expression.
    pub fn idrefs(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_idrefs(&mut out);
        out
    }

    fn collect_idrefs<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Condition::If(id) => out.push(id),
            Condition::And(children) | Condition::Or(children) => {
                for child in children {
                    child.collect_idrefs(out);
                }
            }
        }
    }
}

/// Module usage as written in the IOD file: Mandatory, Conditional or
/// User defined.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Usage {
    Mandatory,
    Conditional,
    UserDefined,
}

impl Usage {
    pub fn code(self) -> &'static str {
        match self {
            Usage::Mandatory => "M",
            Usage::Conditional => "C",
            Usage::UserDefined => "U",
        }
    }

    pub fn from_code(code: &str) -> Option<Usage> {
        match code {
            "M" => Some(Usage::Mandatory),
            "C" => Some(Usage::Conditional),
            "U" => Some(Usage::UserDefined),
            _ => None,
        }
    }
}

/// One `<include ie=.. module=.. usage=..>` entry of an IOD.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModuleInclude {
    pub ie: String,
    pub module_name: String,
    pub usage: Usage,
    pub condition: Option<Condition>,
}

/// Presence requirement class of a data element.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum ElementType {
    Type1,
    Type2,
    Type3,
}

impl ElementType {
    pub fn code(self) -> &'static str {
        match self {
            ElementType::Type1 => "1",
            ElementType::Type2 => "2",
            ElementType::Type3 => "3",
        }
    }

    pub fn from_code(code: &str) -> Option<ElementType> {
        match code {
            "1" => Some(ElementType::Type1),
            "2" => Some(ElementType::Type2),
            "3" => Some(ElementType::Type3),
            _ => None,
        }
    }
}

/// A single data-element rule inside a module or macro table.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ElementRequirement {
    pub keyword: String,
    pub tag: Tag,
    pub vr: Vr,
    pub vm: String,
    pub element_type: ElementType,
    /// Present on conditional (1C/2C/3C) requirements.
    pub condition: Option<Condition>,
    /// Allowed-value list; nonempty when present.
    pub allowed_values: Option<Vec<String>>,
    /// Rules applied to every item when `vr` is SQ.
    pub item_requirements: Option<Vec<ElementRequirement>>,
    /// VM-style bound on the item count when `vr` is SQ.
    pub item_count_spec: Option<String>,
}

impl ElementRequirement {
    /// Type code with the conditional suffix, e.g. "2C".
    pub fn type_code(&self) -> String {
        let mut code = self.element_type.code().to_string();
        if self.condition.is_some() {
            code.push('C');
        }
        code
    }
}

/// `<include table="..."/>` placeholder, resolved by the registry.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TableInclude {
    pub table_id: String,
}

/// One entry of a module or table body, in document order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RequirementEntry {
    Element(ElementRequirement),
    Table(TableInclude),
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ModuleDescription {
    /// The module name; populated from the file stem by the repository loader.
    pub name: String,
    pub defines: Vec<Precondition>,
    pub requirements: Vec<RequirementEntry>,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MacroTable {
    pub table_id: String,
    pub requirements: Vec<RequirementEntry>,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct IodDescription {
    /// The IOD name; populated from the file stem by the repository loader.
    pub name: String,
    pub defines: Vec<Precondition>,
    pub includes: Vec<ModuleInclude>,
}
