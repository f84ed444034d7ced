use std::fmt;
use std::str::FromStr;

/// A DICOM attribute tag: the (group, element) pair of 16-bit numbers.
///
/// Ordering is lexicographic on (group, element), which matches the
/// encoded order required inside a data set. The canonical text form is
/// eight uppercase hex digits, e.g. `00100010` for PatientName.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tag {
    pub group: u16,
    pub element: u16,
}

impl Tag {
    pub const fn new(group: u16, element: u16) -> Self {
        Tag { group, element }
    }

    /// Private tags live in odd-numbered groups.
    pub fn is_private(self) -> bool {
        self.group % 2 == 1
    }

    /// File meta information tags (group 0002).
    pub fn is_file_meta(self) -> bool {
        self.group == 0x0002
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04X}{:04X}", self.group, self.element)
    }
}

impl fmt::Debug for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:04X},{:04X})", self.group, self.element)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("tag must be exactly 8 hex digits, got {0:?}")]
pub struct TagParseError(pub String);

impl FromStr for Tag {
    type Err = TagParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() != 8 || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(TagParseError(s.to_string()));
        }
        let group = u16::from_str_radix(&s[..4], 16).map_err(|_| TagParseError(s.to_string()))?;
        let element = u16::from_str_radix(&s[4..], 16).map_err(|_| TagParseError(s.to_string()))?;
        Ok(Tag { group, element })
    }
}

/// Well-known tags referenced throughout the crate.
pub mod tags {
    use super::Tag;

    pub const FILE_META_GROUP_LENGTH: Tag = Tag::new(0x0002, 0x0000);
    pub const FILE_META_VERSION: Tag = Tag::new(0x0002, 0x0001);
    pub const MEDIA_STORAGE_SOP_CLASS_UID: Tag = Tag::new(0x0002, 0x0002);
    pub const MEDIA_STORAGE_SOP_INSTANCE_UID: Tag = Tag::new(0x0002, 0x0003);
    pub const TRANSFER_SYNTAX_UID: Tag = Tag::new(0x0002, 0x0010);
    pub const IMPLEMENTATION_CLASS_UID: Tag = Tag::new(0x0002, 0x0012);
    pub const IMPLEMENTATION_VERSION_NAME: Tag = Tag::new(0x0002, 0x0013);

    pub const SPECIFIC_CHARACTER_SET: Tag = Tag::new(0x0008, 0x0005);
    pub const SOP_CLASS_UID: Tag = Tag::new(0x0008, 0x0016);
    pub const SOP_INSTANCE_UID: Tag = Tag::new(0x0008, 0x0018);
    pub const STUDY_INSTANCE_UID: Tag = Tag::new(0x0020, 0x000D);
    pub const SERIES_INSTANCE_UID: Tag = Tag::new(0x0020, 0x000E);
    pub const PATIENT_NAME: Tag = Tag::new(0x0010, 0x0010);
    pub const NUMBER_OF_FRAMES: Tag = Tag::new(0x0028, 0x0008);
    pub const PIXEL_DATA: Tag = Tag::new(0x7FE0, 0x0010);

    pub const ITEM: Tag = Tag::new(0xFFFE, 0xE000);
    pub const ITEM_DELIMITATION: Tag = Tag::new(0xFFFE, 0xE00D);
    pub const SEQUENCE_DELIMITATION: Tag = Tag::new(0xFFFE, 0xE0DD);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_rendering_is_eight_uppercase_hex_digits() {
        assert_eq!(Tag::new(0x0010, 0x0010).to_string(), "00100010");
        assert_eq!(Tag::new(0x7FE0, 0x0010).to_string(), "7FE00010");
        assert_eq!(Tag::new(0x0020, 0x000D).to_string(), "0020000D");
    }

    #[test]
    fn parse_accepts_exactly_eight_hex_digits() {
        assert_eq!("00100010".parse::<Tag>().unwrap(), Tag::new(0x0010, 0x0010));
        assert_eq!("0020000d".parse::<Tag>().unwrap(), Tag::new(0x0020, 0x000D));
        assert!("0010001".parse::<Tag>().is_err());
        assert!("001000100".parse::<Tag>().is_err());
        assert!("0010001G".parse::<Tag>().is_err());
    }

    #[test]
    fn ordering_is_lexicographic_on_group_then_element() {
        let a = Tag::new(0x0008, 0xFFFF);
        let b = Tag::new(0x0010, 0x0000);
        let c = Tag::new(0x0010, 0x0001);
        assert!(a < b && b < c);
    }

    #[test]
    fn odd_groups_are_private() {
        assert!(Tag::new(0x0009, 0x0001).is_private());
        assert!(!Tag::new(0x0010, 0x0010).is_private());
    }
}
