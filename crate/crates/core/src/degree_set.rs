//! Out-degree sets `A ⊆ {0,1,2,...}`: finite lists plus an optional
//! cofinite tail, so that `{0,1,2,...}` itself is representable.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// `listed ∪ [tail_from, ∞)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DegreeSet {
    listed: BTreeSet<usize>,
    tail_from: Option<usize>,
}

impl DegreeSet {
    pub fn finite<I: IntoIterator<Item = usize>>(items: I) -> Self {
        DegreeSet {
            listed: items.into_iter().collect(),
            tail_from: None,
        }
        .normalized()
    }

    /// `{0,1,2,...}`.
    pub fn all() -> Self {
        DegreeSet {
            listed: BTreeSet::new(),
            tail_from: Some(0),
        }
    }

    /// `{0}`.
    pub fn leaves() -> Self {
        Self::finite([0])
    }

    /// `listed ∪ [from, ∞)`.
    pub fn with_tail<I: IntoIterator<Item = usize>>(items: I, from: usize) -> Self {
        DegreeSet {
            listed: items.into_iter().collect(),
            tail_from: Some(from),
        }
        .normalized()
    }

    /// All degrees except `excluded`.
    pub fn complement_of<I: IntoIterator<Item = usize>>(excluded: I) -> Self {
        let excluded: BTreeSet<usize> = excluded.into_iter().collect();
        let from = excluded.iter().next_back().map_or(0, |m| m + 1);
        let listed = (0..from).filter(|k| !excluded.contains(k)).collect();
        DegreeSet {
            listed,
            tail_from: Some(from),
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        if let Some(mut from) = self.tail_from {
            self.listed.retain(|&k| k < from);
            while from > 0 && self.listed.contains(&(from - 1)) {
                self.listed.remove(&(from - 1));
                from -= 1;
            }
            self.tail_from = Some(from);
        }
        self
    }

    pub fn contains(&self, k: usize) -> bool {
        self.listed.contains(&k) || self.tail_from.is_some_and(|f| k >= f)
    }

    pub fn is_all(&self) -> bool {
        self.tail_from == Some(0)
    }

    pub fn is_finite(&self) -> bool {
        self.tail_from.is_none()
    }

    /// Start of the cofinite tail, if any.
    pub fn tail_from(&self) -> Option<usize> {
        self.tail_from
    }

    /// Elements below the tail start (or all elements, for a finite set).
    pub fn listed(&self) -> impl Iterator<Item = usize> + '_ {
        self.listed.iter().copied()
    }

    /// Largest listed element, ignoring the tail.
    pub fn max_listed(&self) -> Option<usize> {
        self.listed.iter().next_back().copied()
    }

    pub fn require_zero(&self) -> Result<()> {
        if self.contains(0) {
            Ok(())
        } else {
            Err(Error::SetMissingZero)
        }
    }

    /// True when the set contains every degree in `0..=max`.
    pub fn covers_range(&self, max: usize) -> bool {
        (0..=max).all(|k| self.contains(k))
    }
}

impl fmt::Display for DegreeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_all() {
            return write!(f, "all");
        }
        let mut parts: Vec<String> = self.listed.iter().map(|k| k.to_string()).collect();
        if let Some(from) = self.tail_from {
            parts.push(format!("geq:{from}"));
        }
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for DegreeSet {
    type Err = Error;

    /// Accepts `all`, comma lists such as `0,2`, lists with a tail such as
    /// `0,geq:3`, and complements such as `not:1` (everything except 1).
    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        let bad = || Error::BadSet(s.to_string());
        if text.eq_ignore_ascii_case("all") {
            return Ok(Self::all());
        }
        if let Some(rest) = text.strip_prefix("not:") {
            let excluded = parse_list(rest).ok_or_else(bad)?;
            return Ok(Self::complement_of(excluded));
        }
        let mut listed = Vec::new();
        let mut tail = None;
        for item in text.split(',').map(str::trim) {
            if let Some(k) = item.strip_prefix("geq:") {
                if tail.is_some() {
                    return Err(bad());
                }
                tail = Some(k.parse::<usize>().map_err(|_| bad())?);
            } else {
                listed.push(item.parse::<usize>().map_err(|_| bad())?);
            }
        }
        Ok(match tail {
            Some(from) => Self::with_tail(listed, from),
            None => Self::finite(listed),
        })
    }
}

fn parse_list(text: &str) -> Option<Vec<usize>> {
    text.split(',').map(|t| t.trim().parse().ok()).collect()
}

impl Serialize for DegreeSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DegreeSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for text in ["0", "0,2", "all", "0,geq:3", "0,1"] {
            let set: DegreeSet = text.parse().unwrap();
            assert_eq!(set.to_string(), text);
        }
        let not1: DegreeSet = "not:1".parse().unwrap();
        assert_eq!(not1.to_string(), "0,geq:2");
        assert!(!not1.contains(1));
        assert!(not1.contains(7));
    }

    #[test]
    fn tail_absorbs_adjacent_listed() {
        let set = DegreeSet::with_tail([0, 1, 2], 3);
        assert!(set.is_all());
        assert_eq!(set, DegreeSet::all());
    }

    #[test]
    fn zero_required() {
        assert!(DegreeSet::finite([1, 2]).require_zero().is_err());
        assert!(DegreeSet::all().require_zero().is_ok());
    }

    #[test]
    fn rejects_garbage() {
        assert!("0,x".parse::<DegreeSet>().is_err());
        assert!("geq:1,geq:2".parse::<DegreeSet>().is_err());
    }
}
