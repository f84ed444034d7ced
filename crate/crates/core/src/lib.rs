//! DICOM conformance validation toolkit.
//!
//! The crate is organised around four areas:
//!
//! * [`parse_file`] / [`serialize_file`] and the [`DataSet`] model — lossless
//!   Part-10 reading and writing plus the embedded data [`Dictionary`];
//! * [`description`] — the XML description language for IODs, Modules and
//!   macro attribute tables, with a line-accurate linter and a repository
//!   [`description::Registry`];
//! * [`validate`] — the rule engine producing the five per-module result
//!   categories with itemized findings;
//! * [`deident`] — length- and domain-preserving dummy replacement of
//!   patient data, and pixel-data removal.

mod dataset;
pub mod deident;
pub mod description;
mod dict;
mod dict_table;
mod element;
mod file;
pub mod parse;
pub mod samples;
mod tag;
pub mod validate;
mod vr;
pub mod write;

pub use dataset::DataSet;
pub use dict::{DictEntry, DictError, Dictionary};
pub use element::{DataElement, ElementValue, NotTextVr, SeqItem, Sequence};
pub use file::{
    DicomFile, FileMeta, TransferSyntax, EXPLICIT_VR_BE_UID, EXPLICIT_VR_LE_UID,
    IMPLICIT_VR_LE_UID,
};
pub use parse::{parse_file, parse_file_with, ParseError};
pub use tag::{tags, Tag, TagParseError};
pub use vr::{Vr, VrParseError, ALL_VRS};
pub use write::{serialize_file, WriteError};
