use std::fmt;
use std::str::FromStr;

/// Value Representation: the data-type code attached to every data element.
///
/// Only the subset needed by the validator is supported; anything else in an
/// explicit-VR stream is a parse error.
#[allow(clippy::upper_case_acronyms)]
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Vr {
    AE,
    AS,
    CS,
    DA,
    DS,
    DT,
    IS,
    LO,
    LT,
    PN,
    SH,
    SL,
    SQ,
    SS,
    ST,
    TM,
    UI,
    UL,
    US,
    UT,
    OB,
    OW,
    UN,
}

pub const ALL_VRS: [Vr; 23] = [
    Vr::AE,
    Vr::AS,
    Vr::CS,
    Vr::DA,
    Vr::DS,
    Vr::DT,
    Vr::IS,
    Vr::LO,
    Vr::LT,
    Vr::PN,
    Vr::SH,
    Vr::SL,
    Vr::SQ,
    Vr::SS,
    Vr::ST,
    Vr::TM,
    Vr::UI,
    Vr::UL,
    Vr::US,
    Vr::UT,
    Vr::OB,
    Vr::OW,
    Vr::UN,
];

impl Vr {
    pub fn as_str(self) -> &'static str {
        match self {
            Vr::AE => "AE",
            Vr::AS => "AS",
            Vr::CS => "CS",
            Vr::DA => "DA",
            Vr::DS => "DS",
            Vr::DT => "DT",
            Vr::IS => "IS",
            Vr::LO => "LO",
            Vr::LT => "LT",
            Vr::PN => "PN",
            Vr::SH => "SH",
            Vr::SL => "SL",
            Vr::SQ => "SQ",
            Vr::SS => "SS",
            Vr::ST => "ST",
            Vr::TM => "TM",
            Vr::UI => "UI",
            Vr::UL => "UL",
            Vr::US => "US",
            Vr::UT => "UT",
            Vr::OB => "OB",
            Vr::OW => "OW",
            Vr::UN => "UN",
        }
    }

    pub fn from_bytes(bytes: [u8; 2]) -> Option<Vr> {
        ALL_VRS
            .iter()
            .copied()
            .find(|vr| vr.as_str().as_bytes() == bytes)
    }

    /// In explicit-VR encodings these VRs use the 2-byte reserved field
    /// followed by a 32-bit length; everything else uses a 16-bit length.
    pub fn uses_long_length_form(self) -> bool {
        matches!(self, Vr::OB | Vr::OW | Vr::SQ | Vr::UN | Vr::UT)
    }

    /// Per-value byte width for fixed-width binary VRs.
    pub fn fixed_width(self) -> Option<usize> {
        match self {
            Vr::US | Vr::SS => Some(2),
            Vr::UL | Vr::SL => Some(4),
            _ => None,
        }
    }

    /// VRs whose values decode as character data.
    pub fn is_text(self) -> bool {
        matches!(
            self,
            Vr::AE
                | Vr::AS
                | Vr::CS
                | Vr::DA
                | Vr::DS
                | Vr::DT
                | Vr::IS
                | Vr::LO
                | Vr::LT
                | Vr::PN
                | Vr::SH
                | Vr::ST
                | Vr::TM
                | Vr::UI
                | Vr::UT
        )
    }

    /// Text VRs that hold multiple values separated by backslash.
    /// LT, ST and UT are always single-valued; backslash is ordinary text there.
    pub fn splits_on_backslash(self) -> bool {
        self.is_text() && !matches!(self, Vr::LT | Vr::ST | Vr::UT)
    }

    /// The byte used to pad values to even length.
    pub fn pad_byte(self) -> u8 {
        match self {
            Vr::UI => 0x00,
            vr if vr.is_text() => b' ',
            _ => 0x00,
        }
    }
}

impl fmt::Display for Vr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown VR code {0:?}")]
pub struct VrParseError(pub String);

impl FromStr for Vr {
    type Err = VrParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_VRS
            .iter()
            .copied()
            .find(|vr| vr.as_str() == s)
            .ok_or_else(|| VrParseError(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_all_codes() {
        for vr in ALL_VRS {
            assert_eq!(vr.as_str().parse::<Vr>().unwrap(), vr);
            let mut b = [0u8; 2];
            b.copy_from_slice(vr.as_str().as_bytes());
            assert_eq!(Vr::from_bytes(b), Some(vr));
        }
        assert!("XX".parse::<Vr>().is_err());
        assert_eq!(Vr::from_bytes(*b"ZZ"), None);
    }

    #[test]
    fn fixed_widths() {
        assert_eq!(Vr::US.fixed_width(), Some(2));
        assert_eq!(Vr::SS.fixed_width(), Some(2));
        assert_eq!(Vr::UL.fixed_width(), Some(4));
        assert_eq!(Vr::SL.fixed_width(), Some(4));
        assert_eq!(Vr::CS.fixed_width(), None);
    }

    #[test]
    fn padding() {
        assert_eq!(Vr::UI.pad_byte(), 0x00);
        assert_eq!(Vr::PN.pad_byte(), b' ');
        assert_eq!(Vr::OB.pad_byte(), 0x00);
    }
}
