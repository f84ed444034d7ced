use std::path::{Path, PathBuf};

use dcv_core::description::{
    lint, load_repository, parse_iod, parse_module, print_iod, print_module, print_table,
    Condition, DescriptionError, ElementRequirement, ElementType, IodDescription, LintKind,
    MacroTable, ModuleDescription, Precondition, RequirementEntry, TableInclude, Usage,
};
use dcv_core::{Dictionary, Tag, Vr};
use proptest::prelude::*;

fn repo_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../descriptions")
}

fn cr_iod_text() -> String {
    std::fs::read_to_string(repo_dir().join("iods/CRImage.xml")).unwrap()
}

fn patient_module_text() -> String {
    std::fs::read_to_string(repo_dir().join("modules/Patient.xml")).unwrap()
}

#[test]
fn cr_iod_parses() {
    let iod = parse_iod(&cr_iod_text()).unwrap();
    assert_eq!(iod.defines.len(), 1);
    assert_eq!(iod.defines[0].id, "contrasMediaWasUsed");
    assert!(iod.defines[0].default);
    assert_eq!(
        iod.defines[0].question,
        "Was contrast media used in this Image"
    );
    assert_eq!(iod.includes.len(), 7);
    let names: Vec<&str> = iod.includes.iter().map(|i| i.module_name.as_str()).collect();
    assert_eq!(
        names,
        [
            "Patient",
            "GeneralStudy",
            "PatientStudy",
            "GeneralSeries",
            "GeneralImage",
            "ContrastBolus",
            "SOPCommon"
        ]
    );
    let contrast = &iod.includes[5];
    assert_eq!(contrast.usage, Usage::Mandatory);
    assert_eq!(
        contrast.condition,
        Some(Condition::If("contrasMediaWasUsed".to_string()))
    );
    let patient_study = &iod.includes[2];
    assert_eq!(patient_study.usage, Usage::UserDefined);
    assert_eq!(patient_study.ie, "Study");
}

#[test]
fn empty_iod_parses() {
    let iod = parse_iod("<IOD></IOD>").unwrap();
    assert!(iod.defines.is_empty());
    assert!(iod.includes.is_empty());
}

#[test]
fn unknown_usage_code_reports_the_line() {
    let xml = cr_iod_text().replace("usage=\"U\"", "usage=\"X\"");
    let expected_line = xml
        .lines()
        .position(|l| l.contains("usage=\"X\""))
        .unwrap() as u32
        + 1;
    match parse_iod(&xml).unwrap_err() {
        DescriptionError::UnknownUsageCode { line, code } => {
            assert_eq!(code, "X");
            assert_eq!(line, expected_line);
        }
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn patient_module_parses() {
    let module = parse_module(&patient_module_text()).unwrap();
    let ids: Vec<&str> = module.defines.iter().map(|d| d.id.as_str()).collect();
    assert_eq!(ids, ["PatientIsAnAnimal", "ResponsiblePersonIsPresent"]);
    assert!(module.defines.iter().all(|d| !d.default));

    let sex = module
        .requirements
        .iter()
        .find_map(|entry| match entry {
            RequirementEntry::Element(req) if req.keyword == "PatientSex" => Some(req),
            _ => None,
        })
        .unwrap();
    assert_eq!(sex.tag, Tag::new(0x0010, 0x0040));
    assert_eq!(sex.vr, Vr::CS);
    assert_eq!(sex.element_type, ElementType::Type2);
    assert_eq!(
        sex.allowed_values.as_deref(),
        Some(["M".to_string(), "F".to_string(), "O".to_string()].as_slice())
    );

    assert!(module.requirements.iter().any(|entry| matches!(
        entry,
        RequirementEntry::Table(TableInclude { table_id }) if table_id == "10-18"
    )));

    let role = module
        .requirements
        .iter()
        .find_map(|entry| match entry {
            RequirementEntry::Element(req) if req.keyword == "ResponsiblePersonRole" => Some(req),
            _ => None,
        })
        .unwrap();
    assert_eq!(role.type_code(), "1C");
    assert_eq!(
        role.condition,
        Some(Condition::And(vec![
            Condition::If("PatientIsAnAnimal".to_string()),
            Condition::If("ResponsiblePersonIsPresent".to_string()),
        ]))
    );
}

#[test]
fn module_without_defines_parses() {
    let module = parse_module(
        "<Module>\n  <DataElement keyword=\"StudyDate\" tag=\"00080020\" vr=\"DA\" type=\"3\" vm=\"1\" />\n</Module>",
    )
    .unwrap();
    assert!(module.defines.is_empty());
    assert_eq!(module.requirements.len(), 1);
}

#[test]
fn seven_digit_tag_reports_the_line() {
    let xml = patient_module_text().replace("tag=\"00100010\"", "tag=\"0010001\"");
    let expected_line = xml
        .lines()
        .position(|l| l.contains("tag=\"0010001\""))
        .unwrap() as u32
        + 1;
    match parse_module(&xml).unwrap_err() {
        DescriptionError::BadTagHex { line, text } => {
            assert_eq!(text, "0010001");
            assert_eq!(line, expected_line);
        }
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn lint_accepts_the_shipped_descriptions() {
    for name in [
        "iods/CRImage.xml",
        "modules/Patient.xml",
        "modules/GeneralStudy.xml",
        "modules/PatientStudy.xml",
        "modules/GeneralSeries.xml",
        "modules/GeneralImage.xml",
        "modules/ContrastBolus.xml",
        "modules/SOPCommon.xml",
        "tables/10-18.xml",
    ] {
        let text = std::fs::read_to_string(repo_dir().join(name)).unwrap();
        let findings = lint(&text, LintKind::Auto);
        assert!(findings.is_empty(), "{name}: {findings:?}");
    }
}

#[test]
fn lint_reports_unknown_idref_with_line() {
    let xml = cr_iod_text().replace("idref=\"contrasMediaWasUsed\"", "idref=\"noSuchId\"");
    let expected_line = xml
        .lines()
        .position(|l| l.contains("noSuchId"))
        .unwrap() as u32
        + 1;
    let findings = lint(&xml, LintKind::Auto);
    assert_eq!(findings.len(), 1, "{findings:?}");
    assert!(findings[0].message.contains("noSuchId"));
    assert_eq!(findings[0].line, expected_line);
    // but the file still parses: idref resolution is not a structural failure
    assert!(parse_iod(&xml).is_ok());
}

#[test]
fn lint_empty_document_is_an_identification_failure() {
    let findings = lint("", LintKind::Auto);
    assert_eq!(findings.len(), 1);
    assert!(findings[0].message.contains("cannot identify"), "{findings:?}");
}

#[test]
fn lint_machine_format() {
    let findings = lint("", LintKind::Auto);
    let line = findings[0].machine_line();
    let fields: Vec<&str> = line.splitn(3, '\t').collect();
    assert_eq!(fields.len(), 3);
    assert_eq!(fields[0], "ERROR");
    assert!(fields[1].parse::<u32>().is_ok());
}

#[test]
fn lint_flags_thin_and_or_nodes() {
    let xml = "<IOD>\n  <define id=\"a\" question=\"q\" default=\"true\" />\n  <include ie=\"I\" module=\"M\" usage=\"M\">\n    <And>\n      <If idref=\"a\" />\n    </And>\n  </include>\n</IOD>";
    let findings = lint(xml, LintKind::Iod);
    assert_eq!(findings.len(), 1, "{findings:?}");
    assert!(findings[0].message.contains("at least two children"));
    assert_eq!(findings[0].line, 4);
    assert!(parse_iod(xml).is_err());
}

#[test]
fn lint_flags_unknown_attributes_and_elements() {
    let xml = "<Module>\n  <DataElement keyword=\"K\" tag=\"00080020\" vr=\"DA\" type=\"2\" vm=\"1\" extra=\"x\" />\n</Module>";
    let findings = lint(xml, LintKind::Module);
    assert_eq!(findings.len(), 1);
    assert!(findings[0].message.contains("extra"));

    let xml = "<Module>\n  <Mystery />\n</Module>";
    let findings = lint(xml, LintKind::Module);
    assert_eq!(findings.len(), 1);
    assert!(findings[0].message.contains("Mystery"));
    assert_eq!(findings[0].line, 2);
}

#[test]
fn lint_wrong_kind_is_an_error() {
    let findings = lint("<Module></Module>", LintKind::Iod);
    assert_eq!(findings.len(), 1);
    assert!(findings[0].message.contains("expected root element <IOD>"));
}

#[test]
fn lint_detects_module_scope_violations_only_at_load_time() {
    // A module may reference ids it does not define: they are assumed to be
    // IOD-level defines, so a single-file lint stays clean.
    let module_xml = "<Module>\n  <DataElement keyword=\"StudyDate\" tag=\"00080020\" vr=\"DA\" type=\"2\" vm=\"1\">\n    <If idref=\"someIodLevelId\" />\n  </DataElement>\n</Module>";
    assert!(lint(module_xml, LintKind::Module).is_empty());

    // At repository load the reference must resolve against the including
    // IOD's defines.
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("iods")).unwrap();
    std::fs::create_dir_all(dir.path().join("modules")).unwrap();
    std::fs::write(
        dir.path().join("modules/Study.xml"),
        module_xml,
    )
    .unwrap();
    // Another module defining the id locally does not put it in scope.
    std::fs::write(
        dir.path().join("modules/Other.xml"),
        "<Module>\n  <define id=\"someIodLevelId\" question=\"q\" default=\"false\" />\n</Module>",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("iods/X.xml"),
        "<IOD>\n  <include ie=\"Study\" module=\"Study\" usage=\"M\" />\n  <include ie=\"Study\" module=\"Other\" usage=\"M\" />\n</IOD>",
    )
    .unwrap();
    let err = load_repository(dir.path()).unwrap_err();
    assert!(err.to_string().contains("someIodLevelId"), "{err}");

    // Defining it at IOD level resolves the reference.
    std::fs::write(
        dir.path().join("iods/X.xml"),
        "<IOD>\n  <define id=\"someIodLevelId\" question=\"q\" default=\"true\" />\n  <include ie=\"Study\" module=\"Study\" usage=\"M\" />\n</IOD>",
    )
    .unwrap();
    assert!(load_repository(dir.path()).is_ok());
}

#[test]
fn repository_loads_and_resolves_cr() {
    let load = load_repository(&repo_dir()).unwrap();
    assert!(load.warnings.is_empty(), "{:?}", load.warnings);
    let registry = &load.registry;
    let iod = registry.resolve_iod("1.2.840.10008.5.1.4.1.1.1").unwrap();
    assert_eq!(iod.name, "CRImage");
    assert_eq!(iod.includes.len(), 7);
    assert!(registry.resolve_iod("").is_none());
    assert!(registry.resolve_iod("1.2.3.4").is_none());

    // macro table expansion splices at the include position
    let patient = registry.module("Patient").unwrap();
    let expanded = registry.expand_requirements(patient).unwrap();
    let keywords: Vec<&str> = expanded.iter().map(|r| r.keyword.as_str()).collect();
    let id_pos = keywords.iter().position(|k| *k == "PatientID").unwrap();
    assert_eq!(keywords[id_pos + 1], "IssuerOfPatientID");
    assert_eq!(keywords[id_pos + 2], "IssuerOfPatientIDQualifiersSequence");
    assert_eq!(keywords[id_pos + 3], "PatientBirthDate");
}

#[test]
fn every_shipped_tag_resolves_in_the_dictionary() {
    let load = load_repository(&repo_dir()).unwrap();
    let registry = &load.registry;
    let dict = Dictionary::standard();
    fn walk(reqs: &[&ElementRequirement], dict: &Dictionary) {
        for req in reqs {
            let entry = dict
                .lookup(req.tag)
                .unwrap_or_else(|| panic!("tag {} missing from dictionary", req.tag));
            assert_eq!(entry.keyword, req.keyword, "keyword mismatch for {}", req.tag);
            assert_eq!(entry.vr, req.vr, "VR mismatch for {}", req.tag);
            if let Some(items) = &req.item_requirements {
                let nested: Vec<&ElementRequirement> = items.iter().collect();
                walk(&nested, dict);
            }
        }
    }
    for name in registry.module_names().collect::<Vec<_>>() {
        let module = registry.module(name).unwrap();
        let expanded = registry.expand_requirements(module).unwrap();
        walk(&expanded, dict);
    }
}

#[test]
fn empty_directory_loads_an_empty_registry() {
    let dir = tempfile::tempdir().unwrap();
    let load = load_repository(dir.path()).unwrap();
    assert!(load.registry.iod_names().next().is_none());
    assert!(load.registry.sop_map().is_empty());
}

#[test]
fn deleting_a_module_breaks_the_load() {
    let dir = tempfile::tempdir().unwrap();
    copy_repo(&repo_dir(), dir.path());
    std::fs::remove_file(dir.path().join("modules/GeneralStudy.xml")).unwrap();
    let err = load_repository(dir.path()).unwrap_err();
    assert!(
        err.to_string().contains("GeneralStudy"),
        "unexpected error {err}"
    );
}

#[test]
fn unmapped_iod_files_are_warnings() {
    let dir = tempfile::tempdir().unwrap();
    copy_repo(&repo_dir(), dir.path());
    std::fs::write(dir.path().join("sopclass-map.txt"), "").unwrap();
    let load = load_repository(dir.path()).unwrap();
    assert_eq!(load.warnings.len(), 1);
    assert!(load.warnings[0].contains("CRImage"));
}

#[test]
fn table_cycles_are_detected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("tables")).unwrap();
    std::fs::write(
        dir.path().join("tables/A.xml"),
        "<Table id=\"A\"><include table=\"B\" /></Table>",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("tables/B.xml"),
        "<Table id=\"B\"><include table=\"A\" /></Table>",
    )
    .unwrap();
    let err = load_repository(dir.path()).unwrap_err();
    assert!(err.to_string().contains("cycle"), "{err}");
}

fn copy_repo(from: &Path, to: &Path) {
    for sub in ["iods", "modules", "tables"] {
        let src = from.join(sub);
        if !src.is_dir() {
            continue;
        }
        std::fs::create_dir_all(to.join(sub)).unwrap();
        for entry in std::fs::read_dir(&src).unwrap() {
            let entry = entry.unwrap();
            std::fs::copy(entry.path(), to.join(sub).join(entry.file_name())).unwrap();
        }
    }
    let map = from.join("sopclass-map.txt");
    if map.is_file() {
        std::fs::copy(&map, to.join("sopclass-map.txt")).unwrap();
    }
}

// ---- print/parse structural fidelity ----

fn arb_condition(ids: &'static [&'static str], depth: u32) -> BoxedStrategy<Condition> {
    let leaf = (0..ids.len()).prop_map(|i| Condition::If(ids[i].to_string()));
    if depth == 0 {
        return leaf.boxed();
    }
    let child = arb_condition(ids, depth - 1);
    prop_oneof![
        4 => leaf,
        1 => prop::collection::vec(child.clone(), 2..4).prop_map(Condition::And),
        1 => prop::collection::vec(child, 2..4).prop_map(Condition::Or),
    ]
    .boxed()
}

fn arb_requirement(depth: u32) -> BoxedStrategy<ElementRequirement> {
    let base = (
        "[A-Za-z][A-Za-z0-9]{0,14}",
        (0x0008u16..0x0060).prop_map(|g| g & !1),
        any::<u16>(),
        0..4usize,
        0..3u8,
        prop::option::of(arb_condition(&["p1", "p2"], 1)),
        prop::option::of(prop::collection::vec("[A-Z0-9_]{1,8}", 1..4)),
    );
    base.prop_flat_map(move |(keyword, group, element, vm_idx, ty, condition, allowed)| {
        let vms = ["1", "1-n", "2", "2-2n"];
        let element_type = match ty {
            0 => ElementType::Type1,
            1 => ElementType::Type2,
            _ => ElementType::Type3,
        };
        let items = if depth > 0 {
            prop::option::of((
                prop::collection::vec(arb_requirement(depth - 1), 0..3),
                prop::sample::select(vec!["1", "1-n", "2"]),
            ))
            .boxed()
        } else {
            Just(None).boxed()
        };
        items.prop_map(move |items| {
            let (item_requirements, item_count_spec, vr) = match items {
                Some((reqs, spec)) => (Some(reqs), Some(spec.to_string()), Vr::SQ),
                None => (None, None, Vr::CS),
            };
            ElementRequirement {
                keyword: keyword.clone(),
                tag: Tag::new(group, element),
                vr,
                vm: vms[vm_idx].to_string(),
                element_type,
                condition: condition.clone(),
                allowed_values: if vr == Vr::SQ { None } else { allowed.clone() },
                item_requirements,
                item_count_spec,
            }
        })
    })
    .boxed()
}

fn arb_module() -> impl Strategy<Value = ModuleDescription> {
    (
        prop::collection::vec(
            ("[a-z][A-Za-z0-9]{0,10}", "[ -;=-~]{0,20}", any::<bool>()),
            0..3,
        ),
        prop::collection::vec(
            prop_oneof![
                6 => arb_requirement(2).prop_map(RequirementEntry::Element),
                1 => "[A-Za-z0-9-]{1,8}".prop_map(|table_id| {
                    RequirementEntry::Table(TableInclude { table_id })
                }),
            ],
            0..20,
        ),
    )
        .prop_map(|(defines, requirements)| {
            let mut seen = std::collections::BTreeSet::new();
            let defines = defines
                .into_iter()
                .filter(|(id, _, _)| seen.insert(id.clone()))
                .map(|(id, question, default)| Precondition {
                    id,
                    question,
                    default,
                })
                .collect();
            ModuleDescription {
                name: String::new(),
                defines,
                requirements,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn module_print_parse_fidelity(module in arb_module()) {
        let xml = print_module(&module);
        let reparsed = parse_module(&xml).unwrap_or_else(|e| panic!("{e}\n{xml}"));
        prop_assert_eq!(reparsed, module);
    }
}

#[test]
fn iod_and_table_print_parse_fidelity() {
    let load = load_repository(&repo_dir()).unwrap();
    let registry = load.registry;

    let iod = registry.iod("CRImage").unwrap();
    let mut reparsed: IodDescription = parse_iod(&print_iod(iod)).unwrap();
    reparsed.name = iod.name.clone();
    assert_eq!(&reparsed, iod);

    let table = registry.table("10-18").unwrap();
    let reparsed: MacroTable = dcv_core::description::parse_table(&print_table(table)).unwrap();
    assert_eq!(&reparsed, table);

    let module = registry.module("Patient").unwrap();
    let mut reparsed: ModuleDescription = parse_module(&print_module(module)).unwrap();
    reparsed.name = module.name.clone();
    assert_eq!(&reparsed, module);
}
