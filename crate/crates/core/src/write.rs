//! Serialization back to Part-10 bytes. For any file the parser accepts,
//! the output here is byte-identical to the original input: value bytes are
//! stored verbatim, defined lengths are recomputed from content, and
//! undefined-length sequences and items are re-emitted with delimiters.

use crate::dataset::DataSet;
use crate::element::{DataElement, ElementValue, SeqItem};
use crate::file::FileMeta;
use crate::parse::UNDEFINED_LENGTH;
use crate::tag::{tags, Tag};
use crate::vr::Vr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WriteError {
    #[error("element {tag} has odd unpadded value length {length}")]
    OddUnpaddedValue { tag: Tag, length: usize },
    #[error("element {tag} value length {length} exceeds the 16-bit length field of VR {vr}")]
    ValueTooLong { tag: Tag, vr: Vr, length: usize },
    #[error("file meta does not declare a supported transfer syntax")]
    MissingTransferSyntax,
}

struct Writer {
    out: Vec<u8>,
    big_endian: bool,
}

impl Writer {
    fn put_u16(&mut self, v: u16) {
        let b = if self.big_endian {
            v.to_be_bytes()
        } else {
            v.to_le_bytes()
        };
        self.out.extend_from_slice(&b);
    }

    fn put_u32(&mut self, v: u32) {
        let b = if self.big_endian {
            v.to_be_bytes()
        } else {
            v.to_le_bytes()
        };
        self.out.extend_from_slice(&b);
    }

    fn put_tag(&mut self, tag: Tag) {
        self.put_u16(tag.group);
        self.put_u16(tag.element);
    }
}

/// Encodes a bare data set (no preamble or meta) in the given coding.
pub(crate) fn encode_dataset(
    ds: &DataSet,
    explicit_vr: bool,
    big_endian: bool,
) -> Result<Vec<u8>, WriteError> {
    let mut w = Writer {
        out: Vec::new(),
        big_endian,
    };
    write_dataset(&mut w, ds, explicit_vr)?;
    Ok(w.out)
}

/// Serializes a complete Part-10 file. The meta group is always written in
/// explicit-VR little-endian; the main data set follows the transfer syntax
/// declared in the meta.
pub fn serialize_file(meta: &FileMeta, data: &DataSet) -> Result<Vec<u8>, WriteError> {
    let ts = meta
        .transfer_syntax()
        .ok_or(WriteError::MissingTransferSyntax)?;
    let mut out = Vec::with_capacity(1024);
    out.extend_from_slice(&meta.preamble);
    out.extend_from_slice(b"DICM");
    out.extend_from_slice(&encode_dataset(&meta.elements, true, false)?);
    out.extend_from_slice(&encode_dataset(data, ts.explicit_vr(), ts.big_endian())?);
    Ok(out)
}

fn write_dataset(w: &mut Writer, ds: &DataSet, explicit_vr: bool) -> Result<(), WriteError> {
    for element in ds.iter() {
        write_element(w, element, explicit_vr)?;
    }
    Ok(())
}

fn write_element(w: &mut Writer, el: &DataElement, explicit_vr: bool) -> Result<(), WriteError> {
    match el.value() {
        ElementValue::Bytes(bytes) => {
            if bytes.len() % 2 == 1 {
                return Err(WriteError::OddUnpaddedValue {
                    tag: el.tag(),
                    length: bytes.len(),
                });
            }
            w.put_tag(el.tag());
            if explicit_vr {
                w.out.extend_from_slice(el.vr().as_str().as_bytes());
                if el.vr().uses_long_length_form() {
                    w.put_u16(0);
                    w.put_u32(bytes.len() as u32);
                } else {
                    if bytes.len() > usize::from(u16::MAX) {
                        return Err(WriteError::ValueTooLong {
                            tag: el.tag(),
                            vr: el.vr(),
                            length: bytes.len(),
                        });
                    }
                    w.put_u16(bytes.len() as u16);
                }
            } else {
                w.put_u32(bytes.len() as u32);
            }
            w.out.extend_from_slice(bytes);
        }
        ElementValue::Sequence(seq) => {
            // Items inside UN are always implicit-VR little-endian.
            let (items_explicit, items_be) = if el.vr() == Vr::UN {
                (false, false)
            } else {
                (explicit_vr, w.big_endian)
            };
            let mut inner = Writer {
                out: Vec::new(),
                big_endian: items_be,
            };
            for item in &seq.items {
                write_item(&mut inner, item, items_explicit)?;
            }
            if seq.undefined_length {
                inner.put_tag(tags::SEQUENCE_DELIMITATION);
                inner.put_u32(0);
            }

            w.put_tag(el.tag());
            let length = if seq.undefined_length {
                UNDEFINED_LENGTH
            } else {
                inner.out.len() as u32
            };
            if explicit_vr {
                w.out.extend_from_slice(el.vr().as_str().as_bytes());
                w.put_u16(0);
                w.put_u32(length);
            } else {
                w.put_u32(length);
            }
            w.out.extend_from_slice(&inner.out);
        }
    }
    Ok(())
}

fn write_item(w: &mut Writer, item: &SeqItem, explicit_vr: bool) -> Result<(), WriteError> {
    let mut inner = Writer {
        out: Vec::new(),
        big_endian: w.big_endian,
    };
    write_dataset(&mut inner, &item.data, explicit_vr)?;

    w.put_tag(tags::ITEM);
    if item.undefined_length {
        w.put_u32(UNDEFINED_LENGTH);
        w.out.extend_from_slice(&inner.out);
        w.put_tag(tags::ITEM_DELIMITATION);
        w.put_u32(0);
    } else {
        w.put_u32(inner.out.len() as u32);
        w.out.extend_from_slice(&inner.out);
    }
    Ok(())
}
