use dcv_core::deident::{
    deidentify, deidentify_file, dummy_value, strip_pixel_data, DeidentProfile, Strategy, UidMap,
};
use dcv_core::description::load_repository;
use dcv_core::samples;
use dcv_core::validate::{validate, Answers, Selection};
use dcv_core::{serialize_file, tags, DataElement, DataSet, Tag, Vr};
use std::path::Path;

fn text_of(data: &DataSet, group: u16, element: u16) -> String {
    data.string_value(Tag::new(group, element))
        .unwrap()
        .unwrap()
}

#[test]
fn replacement_goldens() {
    let file = samples::cr_file();
    let out = deidentify(&file.data, &DeidentProfile::standard());
    assert!(out.notices.is_empty(), "{:?}", out.notices);
    assert_eq!(text_of(&out.data, 0x0010, 0x0010), "REMOVEDR");
    assert_eq!(text_of(&out.data, 0x0010, 0x1010), "00");
    assert_eq!(text_of(&out.data, 0x0010, 0x0040), "O");
}

#[test]
fn dummy_value_fills() {
    let mut uids = UidMap::with_seed(7);
    let (bytes, notice) = dummy_value(&Strategy::TextFill, Vr::PN, 8, "Doe^John", &mut uids);
    assert_eq!(bytes, b"REMOVEDR");
    assert!(notice.is_none());
    let (bytes, _) = dummy_value(&Strategy::TextFill, Vr::PN, 7, "Smith^J", &mut uids);
    assert_eq!(bytes, b"REMOVED");
    let (bytes, _) = dummy_value(&Strategy::ZeroDigits, Vr::AS, 2, "26", &mut uids);
    assert_eq!(bytes, b"00");
    let (bytes, notice) = dummy_value(&Strategy::FixedDate, Vr::DA, 8, "37670627", &mut uids);
    assert_eq!(bytes, b"19000101");
    assert!(notice.is_none());
    // a DA slot that cannot hold a date falls back with a notice
    let (bytes, notice) = dummy_value(&Strategy::FixedDate, Vr::DA, 6, "370627", &mut uids);
    assert_eq!(bytes, b"000000");
    assert!(notice.is_some());
}

#[test]
fn length_preservation_and_file_size() {
    let file = samples::cr_file();
    let before = serialize_file(&file.meta, &file.data).unwrap();
    let (out, notices) = deidentify_file(&file, &DeidentProfile::standard());
    assert!(notices.is_empty(), "{notices:?}");
    let after = serialize_file(&out.meta, &out.data).unwrap();
    assert_eq!(before.len(), after.len());

    for (orig, repl) in file.data.iter().zip(out.data.iter()) {
        assert_eq!(orig.tag(), repl.tag());
        assert_eq!(orig.vr(), repl.vr());
        assert_eq!(orig.length(), repl.length(), "length changed for {}", orig.tag());
    }
}

#[test]
fn strip_removes_pixels_and_keeps_frames() {
    let file = samples::cr_file_with_pixel_len(1 << 20);
    let stripped = strip_pixel_data(&file.data);
    assert!(!stripped.contains(tags::PIXEL_DATA));
    assert_eq!(text_of(&stripped, 0x0028, 0x0008), "4");
    assert_eq!(stripped.len(), file.data.len() - 1);

    // idempotent on data without pixels
    let again = strip_pixel_data(&stripped);
    assert_eq!(again, stripped);
}

#[test]
fn uid_remapping_is_coherent() {
    let mut data = samples::cr_file().data;
    // the same UID in two target slots must map to the same replacement
    data.insert(DataElement::new_text(
        Tag::new(0x0020, 0x000D),
        Vr::UI,
        samples::CR_SOP_INSTANCE_UID,
    ));
    let out = deidentify(&data, &DeidentProfile::standard()).data;
    let a = text_of(&out, 0x0020, 0x000D);
    let b = text_of(&out, 0x0008, 0x0018);
    assert_eq!(a, b);
    let series = text_of(&out, 0x0020, 0x000E);
    assert_ne!(a, series);
    assert_ne!(series, samples::CR_SERIES_UID);
    assert_eq!(series.len(), samples::CR_SERIES_UID.len());
    assert!(series.starts_with("9.9."));
    // replacements are valid UI values
    assert!(dcv_core::validate::check_vr_encoding(Vr::UI, series.as_bytes()).is_empty());
}

#[test]
fn deidentify_is_idempotent() {
    let file = samples::cr_file();
    let profile = DeidentProfile::standard();
    let once = deidentify(&file.data, &profile).data;
    let twice = deidentify(&once, &profile).data;
    assert_eq!(once, twice);
}

#[test]
fn meta_sop_instance_uid_follows_the_dataset() {
    let file = samples::cr_file();
    let (out, _) = deidentify_file(&file, &DeidentProfile::standard());
    let meta_uid = out
        .meta
        .elements
        .string_value(tags::MEDIA_STORAGE_SOP_INSTANCE_UID)
        .unwrap()
        .unwrap();
    let data_uid = out
        .data
        .string_value(tags::SOP_INSTANCE_UID)
        .unwrap()
        .unwrap();
    assert_eq!(meta_uid, data_uid);
    assert_ne!(meta_uid, samples::CR_SOP_INSTANCE_UID);
}

#[test]
fn nested_sequence_targets_are_replaced() {
    let mut item = DataSet::new();
    item.insert(DataElement::new_text(
        Tag::new(0x0010, 0x0010),
        Vr::PN,
        "Doe^John",
    ));
    let mut data = DataSet::new();
    data.insert(DataElement::new_sequence(
        Tag::new(0x0008, 0x1120),
        vec![dcv_core::SeqItem::new(item)],
    ));
    let out = deidentify(&data, &DeidentProfile::standard()).data;
    let items = out.get(Tag::new(0x0008, 0x1120)).unwrap().items().unwrap();
    assert_eq!(
        items[0]
            .data
            .string_value(Tag::new(0x0010, 0x0010))
            .unwrap()
            .unwrap(),
        "REMOVEDR"
    );
}

#[test]
fn structural_neutrality_for_validation() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../descriptions");
    let registry = load_repository(&dir).unwrap().registry;
    let iod = registry.iod("CRImage").unwrap();
    let file = samples::cr_file();
    let before = validate(&file.data, iod, &registry, &Selection::All, &Answers::new()).unwrap();
    let out = deidentify(&file.data, &DeidentProfile::standard()).data;
    let after = validate(&out, iod, &registry, &Selection::All, &Answers::new()).unwrap();
    // dummy values stay inside the VR domain and the allowed lists, so the
    // categories and the finding identities are unchanged; only messages may
    // quote the replaced value
    let shape = |report: &dcv_core::validate::ValidationReport| {
        report
            .module_results
            .iter()
            .map(|m| {
                (
                    m.module_name.clone(),
                    m.category,
                    m.findings
                        .iter()
                        .map(|f| (f.tag, f.kind, f.severity, f.path.clone()))
                        .collect::<Vec<_>>(),
                )
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(shape(&before), shape(&after));
}

#[test]
fn scrub_leaves_no_original_substring() {
    let file = samples::cr_file();
    let profile = DeidentProfile::standard();

    let originals: Vec<Vec<u8>> = profile
        .targets()
        .filter_map(|(tag, _)| file.data.get(tag))
        .filter_map(|el| {
            let text = el.string_value().ok()?;
            (!text.is_empty()).then(|| text.into_bytes())
        })
        .collect();
    assert!(originals.len() >= 10, "sample should cover the profile");

    let (out, _) = deidentify_file(&file, &DeidentProfile::standard());
    let bytes = serialize_file(&out.meta, &strip_pixel_data(&out.data)).unwrap();
    for original in &originals {
        for width in 2..=original.len() {
            for needle in original.windows(width) {
                assert!(
                    !bytes.windows(width).any(|w| w == needle),
                    "substring {:?} of original {:?} survived",
                    String::from_utf8_lossy(needle),
                    String::from_utf8_lossy(original)
                );
            }
        }
    }
}

#[test]
fn profile_file_round_trip() {
    let text = "# test profile\n00100010\tTextFill\n00100040\tPickAllowed\tM,F,O\n0020000D\tUidRemap\n";
    let profile = DeidentProfile::from_text(text).unwrap();
    assert_eq!(
        profile.strategy_for(Tag::new(0x0010, 0x0010)),
        Some(&Strategy::TextFill)
    );
    assert_eq!(
        profile.strategy_for(Tag::new(0x0010, 0x0040)),
        Some(&Strategy::PickAllowed(vec![
            "M".into(),
            "F".into(),
            "O".into()
        ]))
    );
    assert!(profile.strategy_for(Tag::new(0x0010, 0x0020)).is_none());

    let err = DeidentProfile::from_text("7FE00010\tTextFill\n").unwrap_err();
    assert!(err.to_string().contains("pixel"), "{err}");

    let err = DeidentProfile::from_text("00100010\tShred\n").unwrap_err();
    assert!(err.to_string().contains("Shred"), "{err}");
}

#[test]
fn absent_targets_are_skipped() {
    let data = DataSet::new();
    let out = deidentify(&data, &DeidentProfile::standard());
    assert!(out.data.is_empty());
    assert!(out.notices.is_empty());
}

mod properties {
    use super::*;
    use dcv_core::validate::check_vr_encoding;
    use proptest::prelude::*;
    use proptest::strategy::Strategy as _;

    // targets of the standard profile with their VRs
    const TARGETS: &[(u16, u16, Vr)] = &[
        (0x0010, 0x0010, Vr::PN),
        (0x0010, 0x0020, Vr::LO),
        (0x0010, 0x0030, Vr::DA),
        (0x0010, 0x1010, Vr::AS),
        (0x0010, 0x0040, Vr::CS),
        (0x0010, 0x1000, Vr::LO),
        (0x0008, 0x0050, Vr::SH),
        (0x0008, 0x0080, Vr::LO),
        (0x0008, 0x0090, Vr::PN),
        (0x0020, 0x000D, Vr::UI),
        (0x0020, 0x000E, Vr::UI),
        (0x0008, 0x0018, Vr::UI),
    ];

    fn arb_dataset() -> impl proptest::strategy::Strategy<Value = DataSet> {
        prop::collection::vec(
            (0..TARGETS.len(), "[ -Z\\^a-z]{0,20}", any::<bool>()),
            0..10,
        )
        .prop_map(|specs| {
            let mut data = DataSet::new();
            for (idx, value, uid_like) in specs {
                let (group, element, vr) = TARGETS[idx];
                let value = if vr == Vr::UI || uid_like {
                    // give UID slots plausible content so remapping engages
                    let digits: String = value
                        .bytes()
                        .map(|b| char::from(b'0' + b % 10))
                        .collect();
                    format!("1.{digits}")
                } else {
                    value
                };
                data.insert(DataElement::new_text(Tag::new(group, element), vr, &value));
            }
            data
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn replacement_preserves_structure_and_lengths(data in arb_dataset()) {
            let profile = DeidentProfile::standard();
            let out = deidentify(&data, &profile).data;
            prop_assert_eq!(out.len(), data.len());
            for (original, replaced) in data.iter().zip(out.iter()) {
                prop_assert_eq!(original.tag(), replaced.tag());
                prop_assert_eq!(original.vr(), replaced.vr());
                prop_assert_eq!(original.length(), replaced.length());
            }
        }

        #[test]
        fn replacement_is_idempotent(data in arb_dataset()) {
            let profile = DeidentProfile::standard();
            let once = deidentify(&data, &profile).data;
            let twice = deidentify(&once, &profile).data;
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn uid_replacements_stay_in_domain(data in arb_dataset()) {
            let profile = DeidentProfile::standard();
            let out = deidentify(&data, &profile).data;
            for element in out.iter() {
                if element.vr() == Vr::UI && !element.is_empty() {
                    let bytes = element.value_bytes().unwrap();
                    prop_assert!(
                        check_vr_encoding(Vr::UI, bytes).is_empty(),
                        "replacement {:?} is not a valid UID",
                        element.string_value().unwrap()
                    );
                }
            }
        }
    }
}
