use std::fmt;
use std::str::FromStr;

/// Parsed value-multiplicity spec: `k`, `k-m`, `k-n` or `k-kn`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VmSpec {
    Exact(u32),
    Range(u32, u32),
    AtLeast(u32),
    /// `k-kn`: at least k values, and the count divisible by k.
    MultipleOf(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad VM spec {0:?}")]
pub struct BadVmSpec(pub String);

impl VmSpec {
    pub fn matches(self, count: usize) -> bool {
        let count = count as u32;
        match self {
            VmSpec::Exact(k) => count == k,
            VmSpec::Range(k, m) => k <= count && count <= m,
            VmSpec::AtLeast(k) => count >= k,
            VmSpec::MultipleOf(k) => count >= k && count.is_multiple_of(k),
        }
    }
}

impl FromStr for VmSpec {
    type Err = BadVmSpec;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BadVmSpec(s.to_string());
        let parse_num = |t: &str| -> Result<u32, BadVmSpec> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse().map_err(|_| bad())
        };
        match s.split_once('-') {
            None => {
                let k = parse_num(s)?;
                if k == 0 {
                    return Err(bad());
                }
                Ok(VmSpec::Exact(k))
            }
            Some((lo, hi)) => {
                let k = parse_num(lo)?;
                if hi == "n" {
                    return Ok(VmSpec::AtLeast(k));
                }
                if let Some(mult) = hi.strip_suffix('n') {
                    let j = parse_num(mult)?;
                    if j != k || k == 0 {
                        return Err(bad());
                    }
                    return Ok(VmSpec::MultipleOf(k));
                }
                let m = parse_num(hi)?;
                if m < k {
                    return Err(bad());
                }
                Ok(VmSpec::Range(k, m))
            }
        }
    }
}

impl fmt::Display for VmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VmSpec::Exact(k) => write!(f, "{k}"),
            VmSpec::Range(k, m) => write!(f, "{k}-{m}"),
            VmSpec::AtLeast(k) => write!(f, "{k}-n"),
            VmSpec::MultipleOf(k) => write!(f, "{k}-{k}n"),
        }
    }
}

/// Checks a value count against a VM spec given in its text form.
pub fn check_vm(vm_spec: &str, count: usize) -> Result<bool, BadVmSpec> {
    Ok(vm_spec.parse::<VmSpec>()?.matches(count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_multiplicity() {
        assert!(check_vm("1", 1).unwrap());
        assert!(!check_vm("1", 2).unwrap());
    }

    #[test]
    fn ranges_and_open_bounds() {
        assert!(check_vm("1-2", 2).unwrap());
        assert!(!check_vm("1-2", 3).unwrap());
        assert!(check_vm("1-n", 5).unwrap());
        assert!(!check_vm("1-n", 0).unwrap());
    }

    #[test]
    fn multiples() {
        // direct enumeration: 2-2n accepts 2, 4, 6, ... and nothing else
        for count in 0..12 {
            let expected = count >= 2 && count % 2 == 0;
            assert_eq!(check_vm("2-2n", count).unwrap(), expected, "count {count}");
        }
        assert!(check_vm("2-2n", 6).unwrap());
        assert!(!check_vm("2-2n", 3).unwrap());
    }

    #[test]
    fn bad_specs() {
        for spec in ["", "n", "0", "-1", "2-1", "1-2m", "2-3n", "a-n", "1-"] {
            assert!(check_vm(spec, 1).is_err(), "spec {spec:?}");
        }
    }

    #[test]
    fn display_round_trip() {
        for spec in ["1", "2", "1-2", "1-n", "2-2n"] {
            assert_eq!(spec.parse::<VmSpec>().unwrap().to_string(), spec);
        }
    }
}
