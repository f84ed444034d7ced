use crate::dataset::DataSet;
use crate::element::DataElement;
use crate::tag::tags;
use crate::vr::Vr;
use crate::write;

pub const IMPLICIT_VR_LE_UID: &str = "1.2.840.10008.1.2";
pub const EXPLICIT_VR_LE_UID: &str = "1.2.840.10008.1.2.1";
pub const EXPLICIT_VR_BE_UID: &str = "1.2.840.10008.1.2.2";

/// The three supported uncompressed transfer syntaxes. Anything else is
/// rejected at parse time.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TransferSyntax {
    ImplicitVrLittleEndian,
    ExplicitVrLittleEndian,
    ExplicitVrBigEndian,
}

impl TransferSyntax {
    pub fn uid(self) -> &'static str {
        match self {
            TransferSyntax::ImplicitVrLittleEndian => IMPLICIT_VR_LE_UID,
            TransferSyntax::ExplicitVrLittleEndian => EXPLICIT_VR_LE_UID,
            TransferSyntax::ExplicitVrBigEndian => EXPLICIT_VR_BE_UID,
        }
    }

    pub fn from_uid(uid: &str) -> Option<TransferSyntax> {
        match uid {
            IMPLICIT_VR_LE_UID => Some(TransferSyntax::ImplicitVrLittleEndian),
            EXPLICIT_VR_LE_UID => Some(TransferSyntax::ExplicitVrLittleEndian),
            EXPLICIT_VR_BE_UID => Some(TransferSyntax::ExplicitVrBigEndian),
            _ => None,
        }
    }

    pub fn explicit_vr(self) -> bool {
        !matches!(self, TransferSyntax::ImplicitVrLittleEndian)
    }

    pub fn big_endian(self) -> bool {
        matches!(self, TransferSyntax::ExplicitVrBigEndian)
    }
}

/// File meta information: the 128-byte preamble plus the group-0002 header
/// elements. The "DICM" magic is implied; the parser checks it and the
/// serializer always emits it. Meta elements are encoded in explicit-VR
/// little-endian regardless of the main data set's transfer syntax.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FileMeta {
    pub preamble: [u8; 128],
    pub elements: DataSet,
}

impl FileMeta {
    pub fn transfer_syntax_uid(&self) -> Option<String> {
        self.elements
            .string_value(tags::TRANSFER_SYNTAX_UID)
            .ok()
            .flatten()
    }

    pub fn transfer_syntax(&self) -> Option<TransferSyntax> {
        self.transfer_syntax_uid()
            .and_then(|uid| TransferSyntax::from_uid(&uid))
    }

    /// Builds a fresh meta group with a correctly computed group length.
    pub fn build(ts: TransferSyntax, sop_class_uid: &str, sop_instance_uid: &str) -> FileMeta {
        let mut rest = DataSet::new();
        rest.insert(DataElement::new_bytes(
            tags::FILE_META_VERSION,
            Vr::OB,
            vec![0x00, 0x01],
        ));
        rest.insert(DataElement::new_text(
            tags::MEDIA_STORAGE_SOP_CLASS_UID,
            Vr::UI,
            sop_class_uid,
        ));
        rest.insert(DataElement::new_text(
            tags::MEDIA_STORAGE_SOP_INSTANCE_UID,
            Vr::UI,
            sop_instance_uid,
        ));
        rest.insert(DataElement::new_text(
            tags::TRANSFER_SYNTAX_UID,
            Vr::UI,
            ts.uid(),
        ));
        rest.insert(DataElement::new_text(
            tags::IMPLEMENTATION_CLASS_UID,
            Vr::UI,
            "1.2.840.99999.2.1",
        ));
        rest.insert(DataElement::new_text(
            tags::IMPLEMENTATION_VERSION_NAME,
            Vr::SH,
            "DCV01",
        ));

        let encoded = write::encode_dataset(&rest, true, false)
            .expect("constructed meta elements always serialize");
        let mut elements = DataSet::new();
        elements.insert(DataElement::new_bytes(
            tags::FILE_META_GROUP_LENGTH,
            Vr::UL,
            (encoded.len() as u32).to_le_bytes().to_vec(),
        ));
        for el in rest.iter() {
            elements.insert(el.clone());
        }
        FileMeta {
            preamble: [0u8; 128],
            elements,
        }
    }
}

/// A parsed Part-10 file: meta header plus main data set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DicomFile {
    pub meta: FileMeta,
    pub data: DataSet,
}

impl DicomFile {
    pub fn to_bytes(&self) -> Result<Vec<u8>, write::WriteError> {
        write::serialize_file(&self.meta, &self.data)
    }

    pub fn sop_class_uid(&self) -> Option<String> {
        self.data
            .string_value(tags::SOP_CLASS_UID)
            .ok()
            .flatten()
            .filter(|s| !s.is_empty())
    }
}
