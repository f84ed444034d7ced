//! Synthetic sample objects shared by tests, benchmarks and documentation.
//! The CR sample matches the shipped description repository: it resolves to
//! the CRImage IOD and validates cleanly apart from its deliberately
//! malformed `PatientAge` value.

use crate::dataset::DataSet;
use crate::element::{DataElement, SeqItem};
use crate::file::{DicomFile, FileMeta, TransferSyntax};
use crate::tag::Tag;
use crate::vr::Vr;

pub const CR_SOP_CLASS_UID: &str = "1.2.840.10008.5.1.4.1.1.1";

pub const CR_STUDY_UID: &str = "3.6.77.33.676.63";
pub const CR_SERIES_UID: &str = "3.6.77.33.676.67";
pub const CR_SOP_INSTANCE_UID: &str = "3.6.77.33.676.66";

/// A CR file with a small pixel payload.
pub fn cr_file() -> DicomFile {
    cr_file_with_pixel_len(64)
}

/// A CR file whose pixel data element holds `pixel_len` bytes.
pub fn cr_file_with_pixel_len(pixel_len: usize) -> DicomFile {
    let meta = FileMeta::build(
        TransferSyntax::ExplicitVrLittleEndian,
        CR_SOP_CLASS_UID,
        CR_SOP_INSTANCE_UID,
    );

    let mut data = DataSet::new();
    fn text(data: &mut DataSet, group: u16, element: u16, vr: Vr, value: &str) {
        data.insert(DataElement::new_text(Tag::new(group, element), vr, value));
    }

    text(&mut data, 0x0008, 0x0008, Vr::CS, "ORIGINAL\\PRIMARY");
    text(&mut data, 0x0008, 0x0016, Vr::UI, CR_SOP_CLASS_UID);
    text(&mut data, 0x0008, 0x0018, Vr::UI, CR_SOP_INSTANCE_UID);
    text(&mut data, 0x0008, 0x0020, Vr::DA, "19990909");
    text(&mut data, 0x0008, 0x0030, Vr::TM, "040404");
    text(&mut data, 0x0008, 0x0050, Vr::SH, "3767");
    text(&mut data, 0x0008, 0x0060, Vr::CS, "CR");
    text(&mut data, 0x0008, 0x0080, Vr::LO, "Spital Vest");
    text(&mut data, 0x0008, 0x0090, Vr::PN, "Reis^Hugo");
    text(&mut data, 0x0008, 0x1030, Vr::LO, "Thorax");
    text(&mut data, 0x0008, 0x1050, Vr::PN, "Sousa^Rita");
    text(&mut data, 0x0008, 0x1070, Vr::PN, "Tech^One");

    let mut ref_item = DataSet::new();
    ref_item.insert(DataElement::new_text(
        Tag::new(0x0008, 0x1150),
        Vr::UI,
        CR_SOP_CLASS_UID,
    ));
    ref_item.insert(DataElement::new_text(
        Tag::new(0x0008, 0x1155),
        Vr::UI,
        "1.2.840.99999.5.21",
    ));
    data.insert(DataElement::new_sequence(
        Tag::new(0x0008, 0x1110),
        vec![SeqItem::new(ref_item)],
    ));

    text(&mut data, 0x0010, 0x0010, Vr::PN, "Doe^John");
    text(&mut data, 0x0010, 0x0020, Vr::LO, "77663377");
    text(&mut data, 0x0010, 0x0030, Vr::DA, "37670627");
    text(&mut data, 0x0010, 0x0040, Vr::CS, "M");
    text(&mut data, 0x0010, 0x1000, Vr::LO, "673376");
    text(&mut data, 0x0010, 0x1010, Vr::AS, "26");
    text(&mut data, 0x0010, 0x1040, Vr::LO, "Rua Verde 33");
    text(&mut data, 0x0018, 0x0010, Vr::LO, "");
    text(&mut data, 0x0020, 0x000D, Vr::UI, CR_STUDY_UID);
    text(&mut data, 0x0020, 0x000E, Vr::UI, CR_SERIES_UID);
    text(&mut data, 0x0020, 0x0010, Vr::SH, "S1");
    text(&mut data, 0x0020, 0x0011, Vr::IS, "2");
    text(&mut data, 0x0020, 0x0013, Vr::IS, "1");
    text(&mut data, 0x0020, 0x0020, Vr::CS, "L\\P");

    data.insert(DataElement::new_us(Tag::new(0x0028, 0x0002), 1));
    text(&mut data, 0x0028, 0x0004, Vr::CS, "MONOCHROME2");
    text(&mut data, 0x0028, 0x0008, Vr::IS, "4");
    data.insert(DataElement::new_us(Tag::new(0x0028, 0x0010), 64));
    data.insert(DataElement::new_us(Tag::new(0x0028, 0x0011), 64));
    data.insert(DataElement::new_us(Tag::new(0x0028, 0x0100), 16));
    data.insert(DataElement::new_us(Tag::new(0x0028, 0x0101), 16));
    data.insert(DataElement::new_us(Tag::new(0x0028, 0x0102), 15));
    data.insert(DataElement::new_us(Tag::new(0x0028, 0x0103), 0));
    text(&mut data, 0x0028, 0x0301, Vr::CS, "NO");
    text(&mut data, 0x0028, 0x2110, Vr::CS, "00");

    let pixels: Vec<u8> = (0..pixel_len).map(|i| (i % 251) as u8).collect();
    data.insert(DataElement::new_bytes(
        Tag::new(0x7FE0, 0x0010),
        Vr::OW,
        pixels,
    ));

    DicomFile { meta, data }
}

/// Serialized form of [`cr_file`].
pub fn cr_file_bytes() -> Vec<u8> {
    cr_file().to_bytes().expect("CR sample always serializes")
}
