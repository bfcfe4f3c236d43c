use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::GeoError;

/// Administrative depth of a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionLevel {
    Province = 1,
    Regency = 2,
    District = 3,
    Village = 4,
}

impl RegionLevel {
    pub fn depth(self) -> usize {
        self as usize
    }

    fn from_depth(depth: usize) -> Option<Self> {
        match depth {
            1 => Some(Self::Province),
            2 => Some(Self::Regency),
            3 => Some(Self::District),
            4 => Some(Self::Village),
            _ => None,
        }
    }
}

impl fmt::Display for RegionLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Province => "province",
            Self::Regency => "regency",
            Self::District => "district",
            Self::Village => "village",
        })
    }
}

/// A dotted hierarchical region code such as `18.01.03.2001`.
///
/// Codes order segment by segment, comparing numerically first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RegionCode(String);

impl RegionCode {
    pub fn parse(s: &str) -> Result<Self, GeoError> {
        let s = s.trim();
        let segments: Vec<&str> = s.split('.').collect();
        if segments.len() > 4 {
            return Err(GeoError::InvalidCode {
                code: s.to_string(),
                reason: "more than four segments",
            });
        }
        for seg in &segments {
            if seg.is_empty() {
                return Err(GeoError::InvalidCode {
                    code: s.to_string(),
                    reason: "empty segment",
                });
            }
            if !seg.bytes().all(|b| b.is_ascii_digit()) {
                return Err(GeoError::InvalidCode {
                    code: s.to_string(),
                    reason: "segments must be numeric",
                });
            }
            if seg.len() > 18 {
                return Err(GeoError::InvalidCode {
                    code: s.to_string(),
                    reason: "segment too long",
                });
            }
        }
        Ok(RegionCode(s.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn segments(&self) -> impl Iterator<Item = &str> {
        self.0.split('.')
    }

    pub fn level(&self) -> RegionLevel {
        RegionLevel::from_depth(self.segments().count()).expect("validated at parse")
    }

    pub fn parent(&self) -> Option<RegionCode> {
        self.0.rfind('.').map(|i| RegionCode(self.0[..i].to_string()))
    }

    /// Ancestors from the immediate parent up to the province.
    pub fn ancestors(&self) -> impl Iterator<Item = RegionCode> {
        std::iter::successors(self.parent(), RegionCode::parent)
    }

    /// True when `self` equals `other` or lies beneath it.
    pub fn is_within(&self, other: &RegionCode) -> bool {
        self.0 == other.0
            || (self.0.len() > other.0.len()
                && self.0.starts_with(&other.0)
                && self.0.as_bytes()[other.0.len()] == b'.')
    }
}

impl Ord for RegionCode {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.segments();
        let mut b = other.segments();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(x), Some(y)) => {
                    let nx: u64 = x.parse().expect("validated digits");
                    let ny: u64 = y.parse().expect("validated digits");
                    let ord = nx.cmp(&ny).then_with(|| x.cmp(y));
                    if ord != Ordering::Equal {
                        return ord;
                    }
                }
            }
        }
    }
}

impl PartialOrd for RegionCode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromStr for RegionCode {
    type Err = GeoError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for RegionCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for RegionCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RegionCode({})", self.0)
    }
}

impl Serialize for RegionCode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for RegionCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        RegionCode::parse(&s).map_err(serde::de::Error::custom)
    }
}
