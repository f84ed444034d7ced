//! Parser robustness: malformed and mutated inputs must either be rejected
//! with an error or be accepted with full byte fidelity. Nothing panics.

use dcv_core::{
    parse_file, serialize_file, DataElement, DataSet, ElementValue, FileMeta, ParseError, SeqItem,
    Sequence, Tag, TransferSyntax, Vr,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn meta() -> FileMeta {
    FileMeta::build(
        TransferSyntax::ExplicitVrLittleEndian,
        "1.2.840.10008.5.1.4.1.1.1",
        "1.2.840.99999.1.1",
    )
}

fn base_file() -> Vec<u8> {
    let mut inner = DataSet::new();
    inner.insert(DataElement::new_text(
        Tag::new(0x0008, 0x1150),
        Vr::UI,
        "1.2.840.10008.5.1.4.1.1.1",
    ));
    inner.insert(DataElement::new_text(
        Tag::new(0x0008, 0x1155),
        Vr::UI,
        "1.2.840.99999.5.21",
    ));
    let mut data = DataSet::new();
    data.insert(DataElement::new_text(
        Tag::new(0x0008, 0x0060),
        Vr::CS,
        "CR",
    ));
    data.insert(DataElement::from_raw(
        Tag::new(0x0008, 0x1110),
        Vr::SQ,
        ElementValue::Sequence(Sequence {
            items: vec![
                SeqItem {
                    data: inner.clone(),
                    undefined_length: false,
                },
                SeqItem {
                    data: inner,
                    undefined_length: true,
                },
            ],
            undefined_length: false,
        }),
    ));
    data.insert(DataElement::new_text(
        Tag::new(0x0010, 0x0010),
        Vr::PN,
        "Doe^John",
    ));
    serialize_file(&meta(), &data).unwrap()
}

/// An item whose declared length crosses its enclosing defined-length
/// sequence window must be rejected, not silently re-windowed.
#[test]
fn item_crossing_its_sequence_window_is_rejected() {
    let mut bytes = serialize_file(&meta(), &DataSet::new()).unwrap();
    // SQ (0008,1110), declared length 16
    bytes.extend_from_slice(&[0x08, 0x00, 0x10, 0x11]);
    bytes.extend_from_slice(b"SQ");
    bytes.extend_from_slice(&[0x00, 0x00]);
    bytes.extend_from_slice(&16u32.to_le_bytes());
    // item header declaring 64 bytes, far past the sequence end
    bytes.extend_from_slice(&[0xFE, 0xFF, 0x00, 0xE0]);
    bytes.extend_from_slice(&64u32.to_le_bytes());
    bytes.extend_from_slice(&[0u8; 8]);
    // trailing element that a buggy parser would swallow into the item
    bytes.extend_from_slice(&[0x10, 0x00, 0x10, 0x00]);
    bytes.extend_from_slice(b"PN");
    bytes.extend_from_slice(&[0x02, 0x00]);
    bytes.extend_from_slice(b"X ");

    assert!(matches!(
        parse_file(&bytes).unwrap_err(),
        ParseError::TruncatedElement { .. }
    ));
}

#[test]
fn element_crossing_its_item_window_is_rejected() {
    let mut bytes = serialize_file(&meta(), &DataSet::new()).unwrap();
    bytes.extend_from_slice(&[0x08, 0x00, 0x10, 0x11]);
    bytes.extend_from_slice(b"SQ");
    bytes.extend_from_slice(&[0x00, 0x00]);
    bytes.extend_from_slice(&18u32.to_le_bytes());
    bytes.extend_from_slice(&[0xFE, 0xFF, 0x00, 0xE0]);
    bytes.extend_from_slice(&10u32.to_le_bytes());
    // element inside the 10-byte item declaring an 8-byte value (needs 16)
    bytes.extend_from_slice(&[0x10, 0x00, 0x10, 0x00]);
    bytes.extend_from_slice(b"PN");
    bytes.extend_from_slice(&[0x08, 0x00]);
    bytes.extend_from_slice(b"Do");
    bytes.extend_from_slice(&[0u8; 32]);

    assert!(matches!(
        parse_file(&bytes).unwrap_err(),
        ParseError::TruncatedElement { .. } | ParseError::Truncated { .. }
    ));
}

#[test]
fn nonzero_reserved_bytes_are_rejected() {
    let mut bytes = serialize_file(&meta(), &DataSet::new()).unwrap();
    bytes.extend_from_slice(&[0xE0, 0x7F, 0x10, 0x00]);
    bytes.extend_from_slice(b"OW");
    bytes.extend_from_slice(&[0x01, 0x00]); // reserved must be zero
    bytes.extend_from_slice(&4u32.to_le_bytes());
    bytes.extend_from_slice(&[0u8; 4]);
    assert!(matches!(
        parse_file(&bytes).unwrap_err(),
        ParseError::ReservedBytesNotZero { .. }
    ));
}

#[test]
fn runaway_nesting_is_rejected_without_overflow() {
    let mut bytes = serialize_file(&meta(), &DataSet::new()).unwrap();
    // 64 unterminated undefined-length sequences, each wrapping an
    // undefined-length item
    for _ in 0..64 {
        bytes.extend_from_slice(&[0x08, 0x00, 0x10, 0x11]);
        bytes.extend_from_slice(b"SQ");
        bytes.extend_from_slice(&[0x00, 0x00]);
        bytes.extend_from_slice(&0xFFFF_FFFFu32.to_le_bytes());
        bytes.extend_from_slice(&[0xFE, 0xFF, 0x00, 0xE0]);
        bytes.extend_from_slice(&0xFFFF_FFFFu32.to_le_bytes());
    }
    assert_eq!(parse_file(&bytes).unwrap_err(), ParseError::NestingTooDeep);
}

#[test]
fn defined_length_un_stays_opaque() {
    let mut bytes = serialize_file(&meta(), &DataSet::new()).unwrap();
    // UN with a defined length whose content happens to look like an item
    bytes.extend_from_slice(&[0x08, 0x00, 0x00, 0x72]);
    bytes.extend_from_slice(b"UN");
    bytes.extend_from_slice(&[0x00, 0x00]);
    bytes.extend_from_slice(&8u32.to_le_bytes());
    bytes.extend_from_slice(&[0xFE, 0xFF, 0x00, 0xE0, 0x00, 0x00, 0x00, 0x00]);

    let file = parse_file(&bytes).unwrap();
    let element = file.data.get(Tag::new(0x0008, 0x7200)).unwrap();
    assert_eq!(element.vr(), Vr::UN);
    assert_eq!(element.value_bytes().unwrap().len(), 8);
    assert_eq!(file.to_bytes().unwrap(), bytes);
}

#[test]
fn undefined_length_un_parses_implicit_items() {
    let mut bytes = serialize_file(&meta(), &DataSet::new()).unwrap();
    bytes.extend_from_slice(&[0x08, 0x00, 0x00, 0x72]);
    bytes.extend_from_slice(b"UN");
    bytes.extend_from_slice(&[0x00, 0x00]);
    bytes.extend_from_slice(&0xFFFF_FFFFu32.to_le_bytes());
    // one defined-length item holding an implicit-coded PatientName
    bytes.extend_from_slice(&[0xFE, 0xFF, 0x00, 0xE0]);
    bytes.extend_from_slice(&16u32.to_le_bytes());
    bytes.extend_from_slice(&[0x10, 0x00, 0x10, 0x00]);
    bytes.extend_from_slice(&8u32.to_le_bytes());
    bytes.extend_from_slice(b"Doe^John");
    bytes.extend_from_slice(&[0xFE, 0xFF, 0xDD, 0xE0]);
    bytes.extend_from_slice(&0u32.to_le_bytes());

    let file = parse_file(&bytes).unwrap();
    let element = file.data.get(Tag::new(0x0008, 0x7200)).unwrap();
    assert_eq!(element.vr(), Vr::UN);
    let items = element.items().unwrap();
    assert_eq!(
        items[0]
            .data
            .string_value(Tag::new(0x0010, 0x0010))
            .unwrap()
            .unwrap(),
        "Doe^John"
    );
    assert_eq!(file.to_bytes().unwrap(), bytes);
}

/// Single-byte mutations anywhere in a valid file either get rejected or
/// parse into something that re-serializes to exactly the mutated bytes.
#[test]
fn mutated_files_never_break_fidelity() {
    let base = base_file();
    let mut rng = StdRng::seed_from_u64(0xF1DE11);
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    for _ in 0..4000 {
        let mut mutated = base.clone();
        let at = rng.gen_range(0..mutated.len());
        mutated[at] ^= 1 << rng.gen_range(0..8);
        match parse_file(&mutated) {
            Err(_) => rejected += 1,
            Ok(file) => {
                accepted += 1;
                let reencoded = serialize_file(&file.meta, &file.data).unwrap_or_else(|e| {
                    panic!("accepted mutation at byte {at} fails to serialize: {e}")
                });
                assert_eq!(
                    reencoded, mutated,
                    "mutation at byte {at} was accepted but does not round-trip"
                );
            }
        }
    }
    // both outcomes actually occur
    assert!(accepted > 100, "accepted {accepted}");
    assert!(rejected > 100, "rejected {rejected}");
}

/// Random garbage and truncations never panic the parser.
#[test]
fn garbage_never_panics() {
    let mut rng = StdRng::seed_from_u64(0xF1DE12);
    let base = base_file();
    for _ in 0..500 {
        let len = rng.gen_range(0..base.len());
        let _ = parse_file(&base[..len]);

        let mut noise = vec![0u8; rng.gen_range(0..400)];
        rng.fill(&mut noise[..]);
        let _ = parse_file(&noise);

        let mut framed = base.clone();
        let cut = rng.gen_range(132..framed.len());
        framed.truncate(cut);
        let _ = parse_file(&framed);
    }
}
