//! Part-10 stream parsing. The parser is strict: it rejects duplicate and
//! out-of-order tags, odd declared lengths and unknown VR codes, which is
//! what lets `serialize_file` reproduce accepted input byte for byte.

use crate::dataset::DataSet;
use crate::dict::Dictionary;
use crate::element::{DataElement, ElementValue, SeqItem, Sequence};
use crate::file::{DicomFile, FileMeta, TransferSyntax};
use crate::tag::{tags, Tag};
use crate::vr::Vr;

pub const UNDEFINED_LENGTH: u32 = 0xFFFF_FFFF;
const MAX_NESTING: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("input shorter than 132 bytes or bytes 128..132 are not \"DICM\"")]
    MissingMagic,
    #[error("element {tag} declares length {declared} but only {remaining} bytes remain")]
    TruncatedElement {
        tag: Tag,
        declared: u32,
        remaining: usize,
    },
    #[error("unexpected end of input at offset {offset} while reading {what}")]
    Truncated { offset: usize, what: &'static str },
    #[error("duplicate tag {0} in data set")]
    DuplicateTag(Tag),
    #[error("tag {next} encoded after {prev}; tags must be strictly ascending")]
    OutOfOrderTag { prev: Tag, next: Tag },
    #[error("unsupported transfer syntax {0:?}")]
    UnsupportedTransferSyntax(String),
    #[error("file meta does not carry a transfer syntax UID")]
    MissingTransferSyntax,
    #[error("unknown VR code {code:?} for element {tag}")]
    UnknownVr { tag: Tag, code: String },
    #[error("element {tag} has odd declared length {length}")]
    OddLength { tag: Tag, length: u32 },
    #[error("element {tag} with VR {vr} cannot have undefined length")]
    UndefinedLengthNotSequence { tag: Tag, vr: Vr },
    #[error("expected an item tag at offset {offset}, found {found}")]
    BadItemTag { found: Tag, offset: usize },
    #[error("delimiter {tag} carries non-zero length")]
    BadDelimiterLength { tag: Tag },
    #[error("element {tag} has non-zero reserved bytes in its long-form header")]
    ReservedBytesNotZero { tag: Tag },
    #[error("sequence nesting deeper than {MAX_NESTING} levels")]
    NestingTooDeep,
}

#[derive(Clone, Copy)]
struct Coding {
    explicit_vr: bool,
    big_endian: bool,
}

const META_CODING: Coding = Coding {
    explicit_vr: true,
    big_endian: false,
};

const IMPLICIT_CODING: Coding = Coding {
    explicit_vr: false,
    big_endian: false,
};

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], ParseError> {
        if self.remaining() < n {
            return Err(ParseError::Truncated {
                offset: self.pos,
                what,
            });
        }
        let slice = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn read_u16(&mut self, coding: Coding, what: &'static str) -> Result<u16, ParseError> {
        let b = self.take(2, what)?;
        Ok(if coding.big_endian {
            u16::from_be_bytes([b[0], b[1]])
        } else {
            u16::from_le_bytes([b[0], b[1]])
        })
    }

    fn read_u32(&mut self, coding: Coding, what: &'static str) -> Result<u32, ParseError> {
        let b = self.take(4, what)?;
        Ok(if coding.big_endian {
            u32::from_be_bytes([b[0], b[1], b[2], b[3]])
        } else {
            u32::from_le_bytes([b[0], b[1], b[2], b[3]])
        })
    }

    fn read_tag(&mut self, coding: Coding) -> Result<Tag, ParseError> {
        let group = self.read_u16(coding, "tag group")?;
        let element = self.read_u16(coding, "tag element")?;
        Ok(Tag::new(group, element))
    }

    /// A reader covering exactly the next `len` bytes. The caller adopts
    /// the child's final position afterwards; reads inside the window can
    /// never cross it.
    fn sub_window(&self, len: usize) -> Reader<'a> {
        Reader {
            buf: &self.buf[..self.pos + len],
            pos: self.pos,
        }
    }

    fn peek_group(&self, coding: Coding) -> Option<u16> {
        if self.remaining() < 2 {
            return None;
        }
        let b = [self.buf[self.pos], self.buf[self.pos + 1]];
        Some(if coding.big_endian {
            u16::from_be_bytes(b)
        } else {
            u16::from_le_bytes(b)
        })
    }
}

/// Parses a complete Part-10 file using the embedded dictionary.
pub fn parse_file(bytes: &[u8]) -> Result<DicomFile, ParseError> {
    parse_file_with(bytes, Dictionary::standard())
}

/// Parses a complete Part-10 file, resolving implicit-VR elements against
/// the given dictionary (unknown tags become UN).
pub fn parse_file_with(bytes: &[u8], dict: &Dictionary) -> Result<DicomFile, ParseError> {
    if bytes.len() < 132 || &bytes[128..132] != b"DICM" {
        return Err(ParseError::MissingMagic);
    }
    let mut preamble = [0u8; 128];
    preamble.copy_from_slice(&bytes[..128]);

    let mut reader = Reader { buf: bytes, pos: 132 };
    let mut meta_elements = DataSet::new();
    let mut prev: Option<Tag> = None;
    while reader.remaining() >= 8 && reader.peek_group(META_CODING) == Some(0x0002) {
        let element = read_element(&mut reader, META_CODING, dict, 0)?;
        insert_checked(&mut meta_elements, element, &mut prev)?;
    }

    let meta = FileMeta {
        preamble,
        elements: meta_elements,
    };
    let ts_uid = match meta.elements.get(tags::TRANSFER_SYNTAX_UID) {
        None => return Err(ParseError::MissingTransferSyntax),
        Some(el) => el
            .string_value()
            .map_err(|_| ParseError::MissingTransferSyntax)?,
    };
    let ts = TransferSyntax::from_uid(&ts_uid)
        .ok_or_else(|| ParseError::UnsupportedTransferSyntax(ts_uid.clone()))?;

    let coding = Coding {
        explicit_vr: ts.explicit_vr(),
        big_endian: ts.big_endian(),
    };
    let data = read_dataset_to_end(&mut reader, coding, dict, 0)?;

    Ok(DicomFile { meta, data })
}

fn insert_checked(
    ds: &mut DataSet,
    element: DataElement,
    prev: &mut Option<Tag>,
) -> Result<(), ParseError> {
    let tag = element.tag();
    if let Some(p) = *prev {
        if tag == p {
            return Err(ParseError::DuplicateTag(tag));
        }
        if tag < p {
            return Err(ParseError::OutOfOrderTag { prev: p, next: tag });
        }
    }
    *prev = Some(tag);
    ds.insert(element);
    Ok(())
}

fn read_dataset_to_end(
    reader: &mut Reader<'_>,
    coding: Coding,
    dict: &Dictionary,
    depth: usize,
) -> Result<DataSet, ParseError> {
    let mut ds = DataSet::new();
    let mut prev = None;
    while reader.remaining() > 0 {
        let element = read_element(reader, coding, dict, depth)?;
        insert_checked(&mut ds, element, &mut prev)?;
    }
    Ok(ds)
}

/// Reads elements until the item delimitation item, consuming it.
fn read_dataset_undefined_item(
    reader: &mut Reader<'_>,
    coding: Coding,
    dict: &Dictionary,
    depth: usize,
) -> Result<DataSet, ParseError> {
    let mut ds = DataSet::new();
    let mut prev = None;
    loop {
        let mark = reader.pos;
        let tag = reader.read_tag(coding)?;
        if tag == tags::ITEM_DELIMITATION {
            let len = reader.read_u32(coding, "item delimiter length")?;
            if len != 0 {
                return Err(ParseError::BadDelimiterLength { tag });
            }
            return Ok(ds);
        }
        reader.pos = mark;
        let element = read_element(reader, coding, dict, depth)?;
        insert_checked(&mut ds, element, &mut prev)?;
    }
}

fn read_element(
    reader: &mut Reader<'_>,
    coding: Coding,
    dict: &Dictionary,
    depth: usize,
) -> Result<DataElement, ParseError> {
    if depth > MAX_NESTING {
        return Err(ParseError::NestingTooDeep);
    }
    let tag = reader.read_tag(coding)?;

    let (vr, length) = if coding.explicit_vr {
        let code = reader.take(2, "VR code")?;
        let vr = Vr::from_bytes([code[0], code[1]]).ok_or_else(|| ParseError::UnknownVr {
            tag,
            code: String::from_utf8_lossy(code).into_owned(),
        })?;
        let length = if vr.uses_long_length_form() {
            let reserved = reader.take(2, "reserved length bytes")?;
            if reserved != [0, 0] {
                return Err(ParseError::ReservedBytesNotZero { tag });
            }
            reader.read_u32(coding, "value length")?
        } else {
            u32::from(reader.read_u16(coding, "value length")?)
        };
        (vr, length)
    } else {
        let length = reader.read_u32(coding, "value length")?;
        let vr = if length == UNDEFINED_LENGTH {
            // Undefined length means item structure regardless of dictionary.
            Vr::SQ
        } else {
            dict.lookup(tag).map(|e| e.vr).unwrap_or(Vr::UN)
        };
        (vr, length)
    };

    if length == UNDEFINED_LENGTH {
        let items = match vr {
            Vr::SQ => read_items_undefined(reader, coding, dict, depth + 1)?,
            // UN with undefined length holds implicit-VR little-endian items.
            Vr::UN => read_items_undefined(reader, IMPLICIT_CODING, dict, depth + 1)?,
            other => {
                return Err(ParseError::UndefinedLengthNotSequence { tag, vr: other });
            }
        };
        return Ok(DataElement::from_raw(
            tag,
            vr,
            ElementValue::Sequence(Sequence {
                items,
                undefined_length: true,
            }),
        ));
    }

    if vr == Vr::SQ {
        let len = length as usize;
        if len > reader.remaining() {
            return Err(ParseError::TruncatedElement {
                tag,
                declared: length,
                remaining: reader.remaining(),
            });
        }
        let mut window = reader.sub_window(len);
        let items = read_items_to_end(&mut window, coding, dict, depth + 1)?;
        reader.pos = window.pos;
        return Ok(DataElement::from_raw(
            tag,
            vr,
            ElementValue::Sequence(Sequence {
                items,
                undefined_length: false,
            }),
        ));
    }

    if length % 2 == 1 {
        return Err(ParseError::OddLength { tag, length });
    }
    let len = length as usize;
    if len > reader.remaining() {
        return Err(ParseError::TruncatedElement {
            tag,
            declared: length,
            remaining: reader.remaining(),
        });
    }
    let value = reader.take(len, "value bytes")?.to_vec();
    Ok(DataElement::from_raw(tag, vr, ElementValue::Bytes(value)))
}

fn read_item(
    reader: &mut Reader<'_>,
    coding: Coding,
    dict: &Dictionary,
    item_tag: Tag,
    length: u32,
    depth: usize,
) -> Result<SeqItem, ParseError> {
    if length == UNDEFINED_LENGTH {
        let data = read_dataset_undefined_item(reader, coding, dict, depth)?;
        return Ok(SeqItem {
            data,
            undefined_length: true,
        });
    }
    let len = length as usize;
    if len > reader.remaining() {
        return Err(ParseError::TruncatedElement {
            tag: item_tag,
            declared: length,
            remaining: reader.remaining(),
        });
    }
    let mut window = reader.sub_window(len);
    let data = read_dataset_to_end(&mut window, coding, dict, depth)?;
    reader.pos = window.pos;
    Ok(SeqItem {
        data,
        undefined_length: false,
    })
}

fn read_items_undefined(
    reader: &mut Reader<'_>,
    coding: Coding,
    dict: &Dictionary,
    depth: usize,
) -> Result<Vec<SeqItem>, ParseError> {
    let mut items = Vec::new();
    loop {
        let offset = reader.pos;
        let tag = reader.read_tag(coding)?;
        let length = reader.read_u32(coding, "item length")?;
        if tag == tags::SEQUENCE_DELIMITATION {
            if length != 0 {
                return Err(ParseError::BadDelimiterLength { tag });
            }
            return Ok(items);
        }
        if tag != tags::ITEM {
            return Err(ParseError::BadItemTag { found: tag, offset });
        }
        items.push(read_item(reader, coding, dict, tag, length, depth)?);
    }
}

fn read_items_to_end(
    reader: &mut Reader<'_>,
    coding: Coding,
    dict: &Dictionary,
    depth: usize,
) -> Result<Vec<SeqItem>, ParseError> {
    let mut items = Vec::new();
    while reader.remaining() > 0 {
        let offset = reader.pos;
        let tag = reader.read_tag(coding)?;
        let length = reader.read_u32(coding, "item length")?;
        if tag != tags::ITEM {
            return Err(ParseError::BadItemTag { found: tag, offset });
        }
        items.push(read_item(reader, coding, dict, tag, length, depth)?);
    }
    Ok(items)
}
