//! De-identification: replaces patient-identifying values with dummy values
//! of the same byte length that still satisfy the VR's encoding rule, and
//! strips pixel data. The structure of the data set (element count, tag
//! order, VRs, stored lengths) is never changed by replacement, so
//! validation findings for non-target elements are unaffected.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::{RngCore, SeedableRng};

use crate::dataset::DataSet;
use crate::element::DataElement;
use crate::file::DicomFile;
use crate::tag::{tags, Tag};
use crate::vr::Vr;

/// Replacement strategy for one target attribute.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Strategy {
    /// Cycle the letters of "REMOVED" to the original length.
    TextFill,
    /// All-zero digit string of the original length.
    ZeroDigits,
    /// The fixed date 19000101 (falls back to zero fill when the original
    /// length cannot hold a date).
    FixedDate,
    /// Stable, injective remapping under a private "9.9." root.
    UidRemap,
    /// The designated pick from an allowed-value list (its last entry).
    PickAllowed(Vec<String>),
}

impl Strategy {
    fn parse(name: &str, values: Option<&str>) -> Option<Strategy> {
        match name {
            "TextFill" => Some(Strategy::TextFill),
            "ZeroDigits" => Some(Strategy::ZeroDigits),
            "FixedDate" => Some(Strategy::FixedDate),
            "UidRemap" => Some(Strategy::UidRemap),
            "PickAllowed" => Some(Strategy::PickAllowed(
                values
                    .unwrap_or("")
                    .split(',')
                    .filter(|v| !v.is_empty())
                    .map(str::to_string)
                    .collect(),
            )),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProfileError {
    #[error("pixel data (7FE0,0010) is removed, not replaced; it cannot be a profile target")]
    PixelDataTarget,
    #[error("failed to read profile file: {0}")]
    Io(#[from] std::io::Error),
    #[error("profile file line {line}: {message}")]
    BadLine { line: usize, message: String },
}

/// The set of attributes to replace and how.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DeidentProfile {
    targets: BTreeMap<Tag, Strategy>,
}

impl DeidentProfile {
    pub fn empty() -> Self {
        DeidentProfile::default()
    }

    /// The built-in profile: patient identity and free-text identifiers are
    /// text-filled, numeric identifiers zeroed, the birth date fixed, the
    /// sex attribute picked from its allowed list, and study/series/instance
    /// UIDs remapped coherently.
    pub fn standard() -> Self {
        let mut profile = DeidentProfile::empty();
        let mut set = |group, element, strategy| {
            profile
                .set(Tag::new(group, element), strategy)
                .expect("standard profile targets are not pixel data");
        };
        set(0x0010, 0x0010, Strategy::TextFill);
        set(0x0010, 0x0020, Strategy::ZeroDigits);
        set(0x0010, 0x0030, Strategy::FixedDate);
        set(0x0010, 0x1010, Strategy::ZeroDigits);
        set(
            0x0010,
            0x0040,
            Strategy::PickAllowed(vec!["M".into(), "F".into(), "O".into()]),
        );
        set(0x0010, 0x1000, Strategy::TextFill);
        set(0x0008, 0x0050, Strategy::ZeroDigits);
        set(0x0008, 0x0080, Strategy::TextFill);
        set(0x0008, 0x0090, Strategy::TextFill);
        set(0x0008, 0x1050, Strategy::TextFill);
        set(0x0008, 0x1070, Strategy::TextFill);
        set(0x0010, 0x1040, Strategy::TextFill);
        set(0x0020, 0x000D, Strategy::UidRemap);
        set(0x0020, 0x000E, Strategy::UidRemap);
        set(0x0008, 0x0018, Strategy::UidRemap);
        profile
    }

    pub fn set(&mut self, tag: Tag, strategy: Strategy) -> Result<(), ProfileError> {
        if tag == tags::PIXEL_DATA {
            return Err(ProfileError::PixelDataTarget);
        }
        self.targets.insert(tag, strategy);
        Ok(())
    }

    pub fn strategy_for(&self, tag: Tag) -> Option<&Strategy> {
        self.targets.get(&tag)
    }

    pub fn targets(&self) -> impl Iterator<Item = (Tag, &Strategy)> {
        self.targets.iter().map(|(t, s)| (*t, s))
    }

    /// Loads the external profile format: `TAG<TAB>STRATEGY` per line, with
    /// an optional third column of comma-separated values for PickAllowed.
    /// `#` comments and blank lines are ignored.
    pub fn from_text(text: &str) -> Result<Self, ProfileError> {
        let mut profile = DeidentProfile::empty();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(ProfileError::BadLine {
                    line,
                    message: "expected TAG<TAB>STRATEGY[<TAB>VALUES]".to_string(),
                });
            }
            let tag: Tag = fields[0].parse().map_err(|e| ProfileError::BadLine {
                line,
                message: format!("{e}"),
            })?;
            let strategy = Strategy::parse(fields[1], fields.get(2).copied()).ok_or_else(|| {
                ProfileError::BadLine {
                    line,
                    message: format!("unknown strategy {:?}", fields[1]),
                }
            })?;
            profile.set(tag, strategy).map_err(|e| ProfileError::BadLine {
                line,
                message: e.to_string(),
            })?;
        }
        Ok(profile)
    }

    pub fn from_file(path: &Path) -> Result<Self, ProfileError> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Stable UID remapping for one file's processing. Equal originals map to
/// equal replacements, distinct originals to distinct replacements, and each
/// replacement has the byte length of its original.
#[derive(Debug)]
pub struct UidMap {
    map: BTreeMap<String, String>,
    used: BTreeSet<String>,
    seed: u64,
}

// Replacement digits never include 3, 6, 7 or 9, so well-chosen original
// values cannot resurface as substrings of a remapped UID.
const UID_FIRST_DIGITS: &[u8] = b"12458";
const UID_REST_DIGITS: &[u8] = b"012458";

impl UidMap {
    /// A map seeded from process entropy; replacements differ between runs.
    pub fn new() -> Self {
        UidMap::with_seed(rand::rngs::StdRng::from_entropy().next_u64())
    }

    pub fn with_seed(seed: u64) -> Self {
        UidMap {
            map: BTreeMap::new(),
            used: BTreeSet::new(),
            seed,
        }
    }

    /// True when a value already looks like one of our replacements; such
    /// values are left untouched so de-identification is idempotent.
    /// Replacements shorter than five bytes cannot carry the full root and
    /// use a plain 9 prefix instead.
    fn is_remapped(value: &str) -> bool {
        value.starts_with("9.9.") || (!value.is_empty() && value.len() < 5 && value.starts_with('9'))
    }

    pub fn replacement(&mut self, original: &str) -> String {
        if original.is_empty() || UidMap::is_remapped(original) {
            return original.to_string();
        }
        if let Some(existing) = self.map.get(original) {
            return existing.clone();
        }
        // Short values have few distinct candidates; after exhausting them
        // the original is kept rather than looping.
        for salt in 0..512u64 {
            let candidate = self.generate(original, salt);
            if !self.used.contains(&candidate) {
                self.used.insert(candidate.clone());
                self.map.insert(original.to_string(), candidate.clone());
                return candidate;
            }
        }
        self.map
            .insert(original.to_string(), original.to_string());
        original.to_string()
    }

    fn generate(&self, original: &str, salt: u64) -> String {
        let len = original.len();
        let mut state = self
            .seed
            .wrapping_add(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        for b in original.bytes() {
            state = state.wrapping_mul(0x100_0000_01B3).wrapping_add(u64::from(b));
        }
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut out = String::with_capacity(len);
        if len < 5 {
            out.push('9');
        } else {
            out.push_str("9.9.");
            let first = UID_FIRST_DIGITS[(next() % UID_FIRST_DIGITS.len() as u64) as usize];
            out.push(first as char);
        }
        while out.len() < len {
            let digit = UID_REST_DIGITS[(next() % UID_REST_DIGITS.len() as u64) as usize];
            out.push(digit as char);
        }
        out
    }
}

impl Default for UidMap {
    fn default() -> Self {
        UidMap::new()
    }
}

/// Result of a de-identification pass: the rewritten data set plus notices
/// about values that could not host a domain-valid dummy.
#[derive(Debug)]
pub struct DeidentOutcome {
    pub data: DataSet,
    pub notices: Vec<String>,
}

/// Dummy bytes for a value of `logical_len` bytes (stored length minus
/// trailing padding). The result has exactly `logical_len` bytes; the caller
/// re-pads to the stored length.
pub fn dummy_value(
    strategy: &Strategy,
    vr: Vr,
    logical_len: usize,
    original: &str,
    uids: &mut UidMap,
) -> (Vec<u8>, Option<String>) {
    match strategy {
        Strategy::TextFill => (text_fill(logical_len), None),
        Strategy::ZeroDigits => (vec![b'0'; logical_len], None),
        Strategy::FixedDate => {
            if logical_len == 8 {
                (b"19000101".to_vec(), None)
            } else {
                (
                    vec![b'0'; logical_len],
                    Some(format!(
                        "length {logical_len} cannot hold a {vr} date; fell back to zero fill"
                    )),
                )
            }
        }
        Strategy::UidRemap => (uids.replacement(original).into_bytes(), None),
        Strategy::PickAllowed(values) => {
            let pick = values.last().cloned().unwrap_or_default();
            if pick.is_empty() || pick.len() > logical_len {
                (
                    vec![b' '; logical_len],
                    Some(format!(
                        "no allowed value fits in {logical_len} bytes; fell back to space fill"
                    )),
                )
            } else {
                let mut bytes = pick.into_bytes();
                bytes.resize(logical_len, b' ');
                (bytes, None)
            }
        }
    }
}

fn text_fill(len: usize) -> Vec<u8> {
    b"REMOVED".iter().copied().cycle().take(len).collect()
}

/// Replaces every profile target present in `data`, including inside nested
/// sequence items. Element count, tag order, VRs and stored value lengths
/// are unchanged.
pub fn deidentify(data: &DataSet, profile: &DeidentProfile) -> DeidentOutcome {
    let mut uids = UidMap::new();
    let mut notices = Vec::new();
    let mut data = data.clone();
    deidentify_in_place(&mut data, profile, &mut uids, &mut notices);
    DeidentOutcome { data, notices }
}

/// Like [`deidentify`] but sharing a caller-provided [`UidMap`], so UID
/// coherence extends across several data sets of one file (main data set
/// plus file meta).
pub fn deidentify_with(
    data: &DataSet,
    profile: &DeidentProfile,
    uids: &mut UidMap,
    notices: &mut Vec<String>,
) -> DataSet {
    let mut data = data.clone();
    deidentify_in_place(&mut data, profile, uids, notices);
    data
}

/// De-identifies a whole file: the main data set per the profile, plus the
/// file-meta copy of the SOP Instance UID through the same UID map so the
/// header stays consistent with the data set.
pub fn deidentify_file(file: &DicomFile, profile: &DeidentProfile) -> (DicomFile, Vec<String>) {
    let mut uids = UidMap::new();
    let mut notices = Vec::new();
    let data = deidentify_with(&file.data, profile, &mut uids, &mut notices);

    let mut meta = file.meta.clone();
    if profile.strategy_for(tags::SOP_INSTANCE_UID) == Some(&Strategy::UidRemap) {
        if let Some(el) = meta.elements.get(tags::MEDIA_STORAGE_SOP_INSTANCE_UID) {
            let replaced = replace_element(el, &Strategy::UidRemap, &mut uids, &mut notices);
            meta.elements.insert(replaced);
        }
    }
    (DicomFile { meta, data }, notices)
}

fn deidentify_in_place(
    data: &mut DataSet,
    profile: &DeidentProfile,
    uids: &mut UidMap,
    notices: &mut Vec<String>,
) {
    let target_tags: Vec<Tag> = data
        .iter()
        .filter(|el| profile.strategy_for(el.tag()).is_some())
        .map(|el| el.tag())
        .collect();
    for tag in target_tags {
        let strategy = profile.strategy_for(tag).expect("filtered above").clone();
        let el = data.get(tag).expect("tag listed above");
        let replaced = replace_element(el, &strategy, uids, notices);
        data.insert(replaced);
    }
    // Recurse into sequence items.
    let sequence_tags: Vec<Tag> = data
        .iter()
        .filter(|el| el.items().is_some())
        .map(|el| el.tag())
        .collect();
    for tag in sequence_tags {
        if let Some(items) = data.get_mut(tag).and_then(|el| el.items_mut()) {
            for item in items {
                deidentify_in_place(&mut item.data, profile, uids, notices);
            }
        }
    }
}

fn replace_element(
    el: &DataElement,
    strategy: &Strategy,
    uids: &mut UidMap,
    notices: &mut Vec<String>,
) -> DataElement {
    let Some(bytes) = el.value_bytes() else {
        // Sequence-valued targets are left as-is; their contents are
        // handled by the recursion.
        return el.clone();
    };
    let pad = el.vr().pad_byte();
    let logical_len = {
        let mut len = bytes.len();
        while len > 0 && (bytes[len - 1] == pad || bytes[len - 1] == 0x00) {
            len -= 1;
        }
        len
    };
    let original: String = bytes[..logical_len].iter().map(|&b| b as char).collect();
    let (mut fill, notice) = dummy_value(strategy, el.vr(), logical_len, &original, uids);
    if let Some(notice) = notice {
        notices.push(format!("{} {}: {notice}", el.tag(), el.vr()));
    }
    fill.resize(bytes.len(), pad);
    let mut replaced = el.clone();
    replaced.set_value_bytes(fill);
    replaced
}

/// Removes the pixel data element. NumberOfFrames and everything else stay
/// untouched.
pub fn strip_pixel_data(data: &DataSet) -> DataSet {
    let mut out = data.clone();
    out.remove(tags::PIXEL_DATA);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_uids_get_distinct_same_length_replacements() {
        let mut uids = UidMap::with_seed(11);
        let a = uids.replacement("1.2");
        let b = uids.replacement("1.4");
        let c = uids.replacement("1.5");
        assert_eq!(a.len(), 3);
        assert_eq!(b.len(), 3);
        assert_eq!(c.len(), 3);
        assert_ne!(a, b);
        assert_ne!(b, c);
        assert_ne!(a, c);
        for v in [&a, &b, &c] {
            assert!(v.starts_with('9'), "{v}");
            assert!(UidMap::is_remapped(v), "{v}");
        }
        // stable within the map
        assert_eq!(uids.replacement("1.2"), a);
    }

    #[test]
    fn exhausted_short_slots_fall_back_to_identity() {
        let mut uids = UidMap::with_seed(11);
        // single-byte values have exactly one candidate, "9"
        let first = uids.replacement("1");
        assert_eq!(first, "9");
        let second = uids.replacement("2");
        assert_eq!(second, "2");
    }

    #[test]
    fn long_uids_use_the_private_root() {
        let mut uids = UidMap::with_seed(11);
        let original = "1.2.840.113619.2.55.3.604688119";
        let replaced = uids.replacement(original);
        assert_eq!(replaced.len(), original.len());
        assert!(replaced.starts_with("9.9."));
        assert_eq!(uids.replacement(original), replaced);
        // already-replaced values stay put
        assert_eq!(uids.replacement(&replaced), replaced);
    }
}
