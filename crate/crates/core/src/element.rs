use crate::tag::Tag;
use crate::vr::Vr;
use crate::DataSet;

/// One item of a sequence. `undefined_length` records how the item was
/// delimited in the stream so re-serialization is byte-identical.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeqItem {
    pub data: DataSet,
    pub undefined_length: bool,
}

impl SeqItem {
    pub fn new(data: DataSet) -> Self {
        SeqItem {
            data,
            undefined_length: false,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Sequence {
    pub items: Vec<SeqItem>,
    pub undefined_length: bool,
}

/// Element payload: either raw value bytes (exactly as stored, including any
/// trailing pad byte) or parsed sequence items.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ElementValue {
    Bytes(Vec<u8>),
    Sequence(Sequence),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("element {tag} has VR {vr}, which does not decode as text")]
pub struct NotTextVr {
    pub tag: Tag,
    pub vr: Vr,
}

/// A single data element in its TLV form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DataElement {
    tag: Tag,
    vr: Vr,
    value: ElementValue,
}

impl DataElement {
    /// Creates a text element, padding the value to even length with the
    /// VR's pad byte (space, or NUL for UI).
    pub fn new_text(tag: Tag, vr: Vr, value: &str) -> Self {
        let mut bytes = value.as_bytes().to_vec();
        if bytes.len() % 2 == 1 {
            bytes.push(vr.pad_byte());
        }
        DataElement {
            tag,
            vr,
            value: ElementValue::Bytes(bytes),
        }
    }

    /// Creates a binary element, zero-padding odd-length values.
    pub fn new_bytes(tag: Tag, vr: Vr, mut bytes: Vec<u8>) -> Self {
        if bytes.len() % 2 == 1 {
            bytes.push(vr.pad_byte());
        }
        DataElement {
            tag,
            vr,
            value: ElementValue::Bytes(bytes),
        }
    }

    /// Creates an unsigned-short element (US), little-endian order.
    pub fn new_us(tag: Tag, value: u16) -> Self {
        DataElement {
            tag,
            vr: Vr::US,
            value: ElementValue::Bytes(value.to_le_bytes().to_vec()),
        }
    }

    pub fn new_sequence(tag: Tag, items: Vec<SeqItem>) -> Self {
        DataElement {
            tag,
            vr: Vr::SQ,
            value: ElementValue::Sequence(Sequence {
                items,
                undefined_length: false,
            }),
        }
    }

    /// Builds an element from parts without touching the bytes. The caller
    /// is responsible for even padding; `serialize_file` rejects odd values.
    pub fn from_raw(tag: Tag, vr: Vr, value: ElementValue) -> Self {
        DataElement { tag, vr, value }
    }

    pub fn tag(&self) -> Tag {
        self.tag
    }

    pub fn vr(&self) -> Vr {
        self.vr
    }

    pub fn value(&self) -> &ElementValue {
        &self.value
    }

    pub fn value_bytes(&self) -> Option<&[u8]> {
        match &self.value {
            ElementValue::Bytes(b) => Some(b),
            ElementValue::Sequence(_) => None,
        }
    }

    pub fn sequence(&self) -> Option<&Sequence> {
        match &self.value {
            ElementValue::Sequence(s) => Some(s),
            ElementValue::Bytes(_) => None,
        }
    }

    pub fn items(&self) -> Option<&[SeqItem]> {
        self.sequence().map(|s| s.items.as_slice())
    }

    /// Stored byte length for non-sequence values.
    pub fn length(&self) -> usize {
        match &self.value {
            ElementValue::Bytes(b) => b.len(),
            ElementValue::Sequence(s) => s.items.len(),
        }
    }

    /// An element is empty when it carries no value bytes (or no items).
    /// Values consisting solely of padding count as empty for text VRs.
    pub fn is_empty(&self) -> bool {
        match &self.value {
            ElementValue::Sequence(s) => s.items.is_empty(),
            ElementValue::Bytes(b) => {
                if b.is_empty() {
                    true
                } else if self.vr.is_text() {
                    b.iter().all(|&c| c == b' ' || c == 0x00)
                } else {
                    false
                }
            }
        }
    }

    /// Decodes the value as text with trailing space/NUL padding removed.
    pub fn string_value(&self) -> Result<String, NotTextVr> {
        match &self.value {
            ElementValue::Bytes(b) if self.vr.is_text() => {
                let text: String = b.iter().map(|&c| c as char).collect();
                Ok(text.trim_end_matches([' ', '\0']).to_string())
            }
            _ => Err(NotTextVr {
                tag: self.tag,
                vr: self.vr,
            }),
        }
    }

    /// Splits a multi-valued text element into its backslash-separated
    /// components, each trimmed of trailing padding. Single-valued text VRs
    /// yield one component. Empty elements yield no components.
    pub fn text_components(&self) -> Vec<String> {
        let Ok(text) = self.string_value() else {
            return Vec::new();
        };
        if self.is_empty() {
            return Vec::new();
        }
        if self.vr.splits_on_backslash() {
            text.split('\\')
                .map(|v| v.trim_end_matches([' ', '\0']).to_string())
                .collect()
        } else {
            vec![text]
        }
    }

    /// Number of values held by the element, per the VR's encoding rule.
    pub fn value_count(&self) -> usize {
        match &self.value {
            ElementValue::Sequence(s) => s.items.len(),
            ElementValue::Bytes(b) => {
                if self.is_empty() {
                    return 0;
                }
                if let Some(width) = self.vr.fixed_width() {
                    return b.len() / width;
                }
                if self.vr.splits_on_backslash() {
                    self.text_components().len()
                } else {
                    1
                }
            }
        }
    }

    pub(crate) fn set_value_bytes(&mut self, bytes: Vec<u8>) {
        self.value = ElementValue::Bytes(bytes);
    }

    pub(crate) fn items_mut(&mut self) -> Option<&mut Vec<SeqItem>> {
        match &mut self.value {
            ElementValue::Sequence(s) => Some(&mut s.items),
            ElementValue::Bytes(_) => None,
        }
    }
}
