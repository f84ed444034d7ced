use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use dcv_core::deident::{deidentify_file, strip_pixel_data, DeidentProfile};
use dcv_core::description::{load_repository, Registry};
use dcv_core::validate::{collect_questions, report_to_json, validate, Answers, Selection};
use dcv_core::DicomFile;

use super::{EXIT_FINDINGS, EXIT_OK};
use crate::render::{render_filtered, OutputFilter};

pub struct ValidateOptions {
    pub repo: std::path::PathBuf,
    pub modules: String,
    pub answers: Option<String>,
    pub interactive: bool,
    pub no_deident: bool,
    pub json: bool,
    pub filter: OutputFilter,
}

/// How precondition answers are gathered.
enum AnswerSource {
    Defaults,
    Scripted(Vec<(String, bool)>),
    Interactive,
}

pub fn cmd_validate(file_path: &Path, opts: &ValidateOptions) -> Result<i32> {
    let bytes = std::fs::read(file_path)
        .with_context(|| format!("cannot read {}", file_path.display()))?;
    let mut file = dcv_core::parse_file(&bytes).context("not a parseable Part-10 file")?;

    if !opts.no_deident {
        let (deidentified, notices) = deidentify_file(&file, &DeidentProfile::standard());
        for notice in notices {
            eprintln!("deident notice: {notice}");
        }
        file = DicomFile {
            meta: deidentified.meta,
            data: strip_pixel_data(&deidentified.data),
        };
    }

    let load = load_repository(&opts.repo)
        .with_context(|| format!("cannot load description repository {}", opts.repo.display()))?;
    for warning in &load.warnings {
        eprintln!("repository warning: {warning}");
    }
    let registry = load.registry;

    let sop_class_uid = file
        .sop_class_uid()
        .context("file carries no SOPClassUID (0008,0016)")?;
    let iod = registry
        .resolve_iod(&sop_class_uid)
        .with_context(|| format!("no IOD description is mapped to SOP class {sop_class_uid}"))?;

    let selection = parse_selection(&opts.modules, &registry, &iod.name)?;
    let source = match (&opts.answers, opts.interactive) {
        (Some(spec), _) => AnswerSource::Scripted(parse_answer_spec(spec)?),
        (None, true) => AnswerSource::Interactive,
        (None, false) => AnswerSource::Defaults,
    };
    let answers = gather_answers(iod, &registry, &selection, source)?;

    let report = validate(&file.data, iod, &registry, &selection, &answers)?;

    if opts.json {
        println!("{}", report_to_json(&report, &crate::new_validation_id()));
    } else {
        print!("{}", render_filtered(&report, &opts.filter));
    }
    std::io::stdout().flush().ok();

    if report.summary.has_errors > 0 {
        Ok(EXIT_FINDINGS)
    } else {
        Ok(EXIT_OK)
    }
}

pub(crate) fn parse_selection(
    spec: &str,
    registry: &Registry,
    iod_name: &str,
) -> Result<Selection> {
    if spec == "all" {
        return Ok(Selection::All);
    }
    let iod = registry.iod(iod_name).context("IOD disappeared")?;
    let known: BTreeSet<&str> = iod.includes.iter().map(|i| i.module_name.as_str()).collect();
    let mut names = Vec::new();
    for name in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if !known.contains(name) {
            bail!("module {name:?} is not part of IOD {iod_name}");
        }
        names.push(name.to_string());
    }
    Ok(Selection::from_names(names))
}

fn parse_answer_spec(spec: &str) -> Result<Vec<(String, bool)>> {
    let mut out = Vec::new();
    for pair in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .with_context(|| format!("answer {pair:?} is not of the form id=true|false"))?;
        let value = parse_bool(value.trim())
            .with_context(|| format!("answer {pair:?} has a non-boolean value"))?;
        out.push((key.trim().to_string(), value));
    }
    Ok(out)
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "y" | "1" => Some(true),
        "false" | "no" | "n" | "0" => Some(false),
        _ => None,
    }
}

fn gather_answers(
    iod: &dcv_core::description::IodDescription,
    registry: &Registry,
    selection: &Selection,
    source: AnswerSource,
) -> Result<Answers> {
    let questions = collect_questions(iod, registry, selection)?;
    match source {
        AnswerSource::Defaults => Ok(Answers::new()),
        AnswerSource::Scripted(pairs) => {
            let known: BTreeSet<&str> = questions.iter().map(|q| q.id.as_str()).collect();
            let mut answers = Answers::new();
            for (key, value) in pairs {
                if !known.contains(key.as_str()) {
                    bail!("answer key {key:?} does not match any precondition in scope");
                }
                answers.set(key, value);
            }
            Ok(answers)
        }
        AnswerSource::Interactive => {
            let stdin = std::io::stdin();
            let mut lines = stdin.lock().lines();
            let mut answers = Answers::new();
            for question in questions {
                let hint = if question.default { "[Y/n]" } else { "[y/N]" };
                print!("{} {hint}: ", question.question);
                std::io::stdout().flush().ok();
                let line = lines.next().transpose()?.unwrap_or_default();
                let value = match line.trim() {
                    "" => question.default,
                    s => parse_bool(s)
                        .with_context(|| format!("{s:?} is not a yes/no answer"))?,
                };
                answers.set(question.id, value);
            }
            Ok(answers)
        }
    }
}
