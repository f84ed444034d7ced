//! Writes description models back to their XML form. `parse(print(x))`
//! reproduces `x` structurally, which is what the round-trip property tests
//! lean on.

use std::fmt::Write;

use super::{
    Condition, ElementRequirement, IodDescription, MacroTable, ModuleDescription, Precondition,
    RequirementEntry,
};

fn escape(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn write_define(out: &mut String, level: usize, define: &Precondition) {
    indent(out, level);
    let _ = writeln!(
        out,
        "<define id=\"{}\" question=\"{}\" default=\"{}\" />",
        escape(&define.id),
        escape(&define.question),
        define.default
    );
}

fn write_condition(out: &mut String, level: usize, condition: &Condition) {
    indent(out, level);
    match condition {
        Condition::If(idref) => {
            let _ = writeln!(out, "<If idref=\"{}\" />", escape(idref));
        }
        Condition::And(children) => {
            out.push_str("<And>\n");
            for child in children {
                write_condition(out, level + 1, child);
            }
            indent(out, level);
            out.push_str("</And>\n");
        }
        Condition::Or(children) => {
            out.push_str("<Or>\n");
            for child in children {
                write_condition(out, level + 1, child);
            }
            indent(out, level);
            out.push_str("</Or>\n");
        }
    }
}

fn write_requirement(out: &mut String, level: usize, req: &ElementRequirement) {
    indent(out, level);
    let _ = write!(
        out,
        "<DataElement keyword=\"{}\" tag=\"{}\" vr=\"{}\" type=\"{}\" vm=\"{}\"",
        escape(&req.keyword),
        req.tag,
        req.vr,
        req.element_type.code(),
        escape(&req.vm)
    );
    if let Some(items) = &req.item_count_spec {
        let _ = write!(out, " items=\"{}\"", escape(items));
    }
    let self_closing = req.condition.is_none()
        && req.allowed_values.is_none()
        && req.item_requirements.is_none();
    if self_closing {
        out.push_str(" />\n");
        return;
    }
    out.push_str(">\n");
    if let Some(condition) = &req.condition {
        write_condition(out, level + 1, condition);
    }
    if let Some(values) = &req.allowed_values {
        for value in values {
            indent(out, level + 1);
            let _ = writeln!(out, "<Value>{}</Value>", escape(value));
        }
    }
    if let Some(item_reqs) = &req.item_requirements {
        indent(out, level + 1);
        out.push_str("<Item>\n");
        for item_req in item_reqs {
            write_requirement(out, level + 2, item_req);
        }
        indent(out, level + 1);
        out.push_str("</Item>\n");
    }
    indent(out, level);
    out.push_str("</DataElement>\n");
}

fn write_entries(out: &mut String, level: usize, entries: &[RequirementEntry]) {
    for entry in entries {
        match entry {
            RequirementEntry::Element(req) => write_requirement(out, level, req),
            RequirementEntry::Table(inc) => {
                indent(out, level);
                let _ = writeln!(out, "<include table=\"{}\" />", escape(&inc.table_id));
            }
        }
    }
}

pub fn print_module(module: &ModuleDescription) -> String {
    let mut out = String::new();
    out.push_str("<Module>\n");
    for define in &module.defines {
        write_define(&mut out, 1, define);
    }
    write_entries(&mut out, 1, &module.requirements);
    out.push_str("</Module>\n");
    out
}

pub fn print_iod(iod: &IodDescription) -> String {
    let mut out = String::new();
    out.push_str("<IOD>\n");
    for define in &iod.defines {
        write_define(&mut out, 1, define);
    }
    for include in &iod.includes {
        indent(&mut out, 1);
        let _ = write!(
            &mut out,
            "<include ie=\"{}\" module=\"{}\" usage=\"{}\"",
            escape(&include.ie),
            escape(&include.module_name),
            include.usage.code()
        );
        match &include.condition {
            None => out.push_str(" />\n"),
            Some(condition) => {
                out.push_str(">\n");
                write_condition(&mut out, 2, condition);
                indent(&mut out, 1);
                out.push_str("</include>\n");
            }
        }
    }
    out.push_str("</IOD>\n");
    out
}

pub fn print_table(table: &MacroTable) -> String {
    let mut out = String::new();
    let _ = writeln!(&mut out, "<Table id=\"{}\">", escape(&table.table_id));
    write_entries(&mut out, 1, &table.requirements);
    out.push_str("</Table>\n");
    out
}
