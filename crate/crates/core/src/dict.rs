use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::OnceLock;

use crate::dict_table;
use crate::tag::Tag;
use crate::vr::Vr;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DictEntry {
    pub keyword: String,
    pub vr: Vr,
    pub vm: String,
}

#[derive(Debug, thiserror::Error)]
pub enum DictError {
    #[error("keyword {keyword:?} already maps to tag {existing}")]
    DuplicateKeyword { keyword: String, existing: Tag },
    #[error("failed to read dictionary file: {0}")]
    Io(#[from] std::io::Error),
    #[error("dictionary file line {line}: {message}")]
    BadLine { line: usize, message: String },
}

/// The data dictionary: tag → (keyword, VR, VM). Lookups for private
/// (odd-group) tags always miss. Immutable once built, so a single instance
/// can be shared freely across threads.
#[derive(Clone, Debug, Default)]
pub struct Dictionary {
    by_tag: BTreeMap<Tag, DictEntry>,
    by_keyword: HashMap<String, Tag>,
}

impl Dictionary {
    pub fn empty() -> Self {
        Dictionary::default()
    }

    /// The embedded curated dictionary.
    pub fn builtin() -> Self {
        let mut dict = Dictionary::empty();
        for &(group, element, keyword, vr, vm) in dict_table::ENTRIES {
            let vr: Vr = vr.parse().expect("builtin dictionary entry with bad VR");
            dict.insert(Tag::new(group, element), keyword, vr, vm)
                .expect("builtin dictionary entry collision");
        }
        dict
    }

    /// Shared process-wide instance of the builtin dictionary.
    pub fn standard() -> &'static Dictionary {
        static STANDARD: OnceLock<Dictionary> = OnceLock::new();
        STANDARD.get_or_init(Dictionary::builtin)
    }

    pub fn insert(&mut self, tag: Tag, keyword: &str, vr: Vr, vm: &str) -> Result<(), DictError> {
        if let Some(&existing) = self.by_keyword.get(keyword) {
            if existing != tag {
                return Err(DictError::DuplicateKeyword {
                    keyword: keyword.to_string(),
                    existing,
                });
            }
        }
        if let Some(old) = self.by_tag.insert(
            tag,
            DictEntry {
                keyword: keyword.to_string(),
                vr,
                vm: vm.to_string(),
            },
        ) {
            self.by_keyword.remove(&old.keyword);
        }
        self.by_keyword.insert(keyword.to_string(), tag);
        Ok(())
    }

    /// Parses the external dictionary format: one `TAG<TAB>KEYWORD<TAB>VR<TAB>VM`
    /// entry per line, `#` comments and blank lines ignored. Entries override
    /// any existing entry for the same tag. Returns the number of entries read.
    pub fn extend_from_text(&mut self, text: &str) -> Result<usize, DictError> {
        let mut count = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() != 4 {
                return Err(DictError::BadLine {
                    line,
                    message: format!("expected 4 tab-separated fields, got {}", fields.len()),
                });
            }
            let tag: Tag = fields[0].parse().map_err(|e| DictError::BadLine {
                line,
                message: format!("{e}"),
            })?;
            let vr: Vr = fields[2].parse().map_err(|e| DictError::BadLine {
                line,
                message: format!("{e}"),
            })?;
            self.insert(tag, fields[1], vr, fields[3])
                .map_err(|e| match e {
                    DictError::DuplicateKeyword { keyword, existing } => DictError::BadLine {
                        line,
                        message: format!("keyword {keyword:?} already maps to tag {existing}"),
                    },
                    other => other,
                })?;
            count += 1;
        }
        Ok(count)
    }

    pub fn extend_from_file(&mut self, path: &Path) -> Result<usize, DictError> {
        let text = std::fs::read_to_string(path)?;
        self.extend_from_text(&text)
    }

    /// Exact-match lookup. Private (odd-group) tags return `None`.
    pub fn lookup(&self, tag: Tag) -> Option<&DictEntry> {
        if tag.is_private() {
            return None;
        }
        self.by_tag.get(&tag)
    }

    pub fn tag_for_keyword(&self, keyword: &str) -> Option<Tag> {
        self.by_keyword.get(keyword).copied()
    }

    pub fn len(&self) -> usize {
        self.by_tag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_tag.is_empty()
    }
}
