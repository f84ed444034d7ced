//! Structural value checks per VR. Each check returns a list of defect
//! descriptions; an empty list means the value conforms. Multi-valued text
//! values are split on backslash and checked per component.

use crate::vr::Vr;

pub fn check_vr_encoding(vr: Vr, value_bytes: &[u8]) -> Vec<String> {
    let mut defects = Vec::new();
    match vr {
        Vr::US | Vr::SS => {
            if !value_bytes.len().is_multiple_of(2) {
                defects.push(format!(
                    "{vr} value length {} is not divisible by 2",
                    value_bytes.len()
                ));
            }
        }
        Vr::UL | Vr::SL => {
            if !value_bytes.len().is_multiple_of(4) {
                defects.push(format!(
                    "{vr} value length {} is not divisible by 4",
                    value_bytes.len()
                ));
            }
        }
        Vr::OB | Vr::OW | Vr::UN | Vr::SQ => {}
        _ => {
            let text: String = value_bytes.iter().map(|&b| b as char).collect();
            if vr.splits_on_backslash() {
                for component in text.split('\\') {
                    let component = component.trim_matches([' ', '\0']);
                    if component.is_empty() {
                        continue;
                    }
                    if let Some(defect) = check_component(vr, component) {
                        defects.push(defect);
                    }
                }
            } else {
                let trimmed = text.trim_end_matches([' ', '\0']);
                if !trimmed.is_empty() {
                    if let Some(defect) = check_component(vr, trimmed) {
                        defects.push(defect);
                    }
                }
            }
        }
    }
    defects
}

fn check_component(vr: Vr, value: &str) -> Option<String> {
    match vr {
        Vr::AE => max_len(vr, value, 16),
        Vr::AS => check_as(value),
        Vr::CS => check_cs(value),
        Vr::DA => check_da(value),
        Vr::DS => check_ds(value),
        Vr::DT => check_dt(value),
        Vr::IS => check_is(value),
        Vr::LO => max_len(vr, value, 64),
        Vr::LT => max_len(vr, value, 10240),
        Vr::PN => check_pn(value),
        Vr::SH => max_len(vr, value, 16),
        Vr::ST => max_len(vr, value, 1024),
        Vr::TM => check_tm(value),
        Vr::UI => check_ui(value),
        Vr::UT => None,
        _ => None,
    }
}

fn max_len(vr: Vr, value: &str, max: usize) -> Option<String> {
    if value.len() > max {
        Some(format!(
            "{vr} value of {} characters exceeds the {max}-character limit",
            value.len()
        ))
    } else {
        None
    }
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn check_cs(value: &str) -> Option<String> {
    if value.len() > 16 {
        return max_len(Vr::CS, value, 16);
    }
    for c in value.chars() {
        if !(c.is_ascii_uppercase() || c.is_ascii_digit() || c == ' ' || c == '_') {
            return Some(format!(
                "CS value {value:?} contains {c:?}; only uppercase letters, digits, space and underscore are allowed"
            ));
        }
    }
    None
}

fn check_as(value: &str) -> Option<String> {
    let valid = value.len() == 4
        && all_digits(&value[..3])
        && matches!(&value[3..], "D" | "W" | "M" | "Y");
    if valid {
        None
    } else {
        Some(format!(
            "AS value {value:?} is not three digits followed by D, W, M or Y"
        ))
    }
}

fn days_in_month(year: u32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 => {
            let leap = year.is_multiple_of(4) && (!year.is_multiple_of(100) || year.is_multiple_of(400));
            if leap {
                29
            } else {
                28
            }
        }
        _ => 0,
    }
}

fn check_date_digits(value: &str) -> Option<String> {
    let year: u32 = value[..4].parse().unwrap();
    let month: u32 = value[4..6].parse().unwrap();
    let day: u32 = value[6..8].parse().unwrap();
    if month == 0 || month > 12 {
        return Some(format!("date {value:?} has month out of range"));
    }
    if day == 0 || day > days_in_month(year, month) {
        return Some(format!("date {value:?} has day out of range"));
    }
    None
}

fn check_da(value: &str) -> Option<String> {
    if value.len() != 8 || !all_digits(value) {
        return Some(format!("DA value {value:?} is not of the form YYYYMMDD"));
    }
    check_date_digits(value)
}

fn check_time_digits(value: &str) -> Option<String> {
    let hour: u32 = value[..2].parse().unwrap();
    let minute: u32 = value[2..4].parse().unwrap();
    let second: u32 = value[4..6].parse().unwrap();
    if hour > 23 {
        return Some(format!("time {value:?} has hour out of range"));
    }
    if minute > 59 {
        return Some(format!("time {value:?} has minute out of range"));
    }
    if second > 60 {
        return Some(format!("time {value:?} has second out of range"));
    }
    None
}

fn check_tm(value: &str) -> Option<String> {
    let (base, fraction) = match value.split_once('.') {
        None => (value, None),
        Some((b, f)) => (b, Some(f)),
    };
    if base.len() != 6 || !all_digits(base) {
        return Some(format!(
            "TM value {value:?} is not HHMMSS with an optional fractional part"
        ));
    }
    if let Some(f) = fraction {
        if f.is_empty() || f.len() > 6 || !all_digits(f) {
            return Some(format!("TM value {value:?} has a bad fractional part"));
        }
    }
    check_time_digits(base)
}

/// DT is a prefix-valid concatenation YYYY[MM[DD[HH[MM[SS[.F+]]]]]] with an
/// optional timezone offset suffix.
fn check_dt(value: &str) -> Option<String> {
    let bad = || Some(format!("DT value {value:?} is not a valid date-time prefix"));
    let (body, offset) = match value.find(['+', '-']) {
        Some(idx) => (&value[..idx], Some(&value[idx..])),
        None => (value, None),
    };
    if let Some(off) = offset {
        if off.len() != 5 || !all_digits(&off[1..]) {
            return Some(format!("DT value {value:?} has a bad timezone offset"));
        }
        let oh: u32 = off[1..3].parse().unwrap();
        let om: u32 = off[3..5].parse().unwrap();
        if oh > 23 || om > 59 {
            return Some(format!("DT value {value:?} has a timezone offset out of range"));
        }
    }
    let (digits, fraction) = match body.split_once('.') {
        None => (body, None),
        Some((b, f)) => (b, Some(f)),
    };
    if let Some(f) = fraction {
        if digits.len() != 14 || f.is_empty() || f.len() > 6 || !all_digits(f) {
            return bad();
        }
    }
    if !matches!(digits.len(), 4 | 6 | 8 | 10 | 12 | 14) || !all_digits(digits) {
        return bad();
    }
    if digits.len() >= 6 {
        let month: u32 = digits[4..6].parse().unwrap();
        if month == 0 || month > 12 {
            return Some(format!("DT value {value:?} has month out of range"));
        }
        if digits.len() >= 8 {
            let year: u32 = digits[..4].parse().unwrap();
            let day: u32 = digits[6..8].parse().unwrap();
            if day == 0 || day > days_in_month(year, month) {
                return Some(format!("DT value {value:?} has day out of range"));
            }
        }
    }
    if digits.len() >= 10 {
        let hour: u32 = digits[8..10].parse().unwrap();
        if hour > 23 {
            return Some(format!("DT value {value:?} has hour out of range"));
        }
    }
    if digits.len() >= 12 {
        let minute: u32 = digits[10..12].parse().unwrap();
        if minute > 59 {
            return Some(format!("DT value {value:?} has minute out of range"));
        }
    }
    if digits.len() == 14 {
        let second: u32 = digits[12..14].parse().unwrap();
        if second > 60 {
            return Some(format!("DT value {value:?} has second out of range"));
        }
    }
    None
}

fn check_is(value: &str) -> Option<String> {
    let digits = value.strip_prefix(['+', '-']).unwrap_or(value);
    if !all_digits(digits) || digits.len() > 12 {
        Some(format!(
            "IS value {value:?} is not an integer of at most 12 digits"
        ))
    } else {
        None
    }
}

fn check_ds(value: &str) -> Option<String> {
    if value.len() > 16 {
        return max_len(Vr::DS, value, 16);
    }
    let bad = || {
        Some(format!(
            "DS value {value:?} is not a fixed-point or exponential number"
        ))
    };
    let (mantissa, exponent) = match value.find(['e', 'E']) {
        Some(idx) => (&value[..idx], Some(&value[idx + 1..])),
        None => (value, None),
    };
    if let Some(exp) = exponent {
        let exp_digits = exp.strip_prefix(['+', '-']).unwrap_or(exp);
        if !all_digits(exp_digits) {
            return bad();
        }
    }
    let m = mantissa.strip_prefix(['+', '-']).unwrap_or(mantissa);
    let (int_part, frac_part) = match m.split_once('.') {
        None => (m, None),
        Some((i, f)) => (i, Some(f)),
    };
    let int_ok = int_part.is_empty() || all_digits(int_part);
    let frac_ok = match frac_part {
        None => !int_part.is_empty(),
        Some(f) => (f.is_empty() || all_digits(f)) && !(int_part.is_empty() && f.is_empty()),
    };
    if !int_ok || !frac_ok || (int_part.is_empty() && frac_part.is_none_or(|f| f.is_empty())) {
        return bad();
    }
    None
}

fn check_ui(value: &str) -> Option<String> {
    if value.len() > 64 {
        return max_len(Vr::UI, value, 64);
    }
    if !value.bytes().all(|b| b.is_ascii_digit() || b == b'.') {
        return Some(format!("UI value {value:?} contains non [0-9.] characters"));
    }
    if value.starts_with('.') || value.ends_with('.') {
        return Some(format!("UI value {value:?} has a leading or trailing dot"));
    }
    for component in value.split('.') {
        if component.is_empty() {
            return Some(format!("UI value {value:?} has an empty component"));
        }
        if component.len() > 1 && component.starts_with('0') {
            return Some(format!(
                "UI value {value:?} has a component with a leading zero"
            ));
        }
    }
    None
}

fn check_pn(value: &str) -> Option<String> {
    let groups: Vec<&str> = value.split('=').collect();
    if groups.len() > 3 {
        return Some(format!(
            "PN value {value:?} has more than 3 component groups"
        ));
    }
    for group in groups {
        if group.len() > 64 {
            return Some(format!(
                "PN value {value:?} has a component group longer than 64 characters"
            ));
        }
    }
    None
}
