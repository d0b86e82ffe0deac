use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Reception condition of one satellite signal at one receiver.
///
/// The derived ordering is the canonical class order used for tie-breaks,
/// confusion-matrix rows and serialized class lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SignalClass {
    #[serde(rename = "NLOS")]
    NlosOnly,
    #[serde(rename = "LOS")]
    LosOnly,
    #[serde(rename = "LOS+NLOS")]
    LosNlos,
}

impl SignalClass {
    pub const ALL: [SignalClass; 3] = [SignalClass::NlosOnly, SignalClass::LosOnly, SignalClass::LosNlos];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(idx: usize) -> Option<Self> {
        Self::ALL.get(idx).copied()
    }

    /// Label string used in every file format.
    pub fn as_str(self) -> &'static str {
        match self {
            SignalClass::NlosOnly => "NLOS",
            SignalClass::LosOnly => "LOS",
            SignalClass::LosNlos => "LOS+NLOS",
        }
    }
}

impl fmt::Display for SignalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown signal class label {0:?}")]
pub struct UnknownClass(pub String);

impl FromStr for SignalClass {
    type Err = UnknownClass;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "NLOS" => Ok(SignalClass::NlosOnly),
            "LOS" => Ok(SignalClass::LosOnly),
            "LOS+NLOS" => Ok(SignalClass::LosNlos),
            other => Err(UnknownClass(other.to_string())),
        }
    }
}

/// Per-class sample counts in canonical class order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassCounts(pub [u64; 3]);

impl ClassCounts {
    pub fn from_labels<I: IntoIterator<Item = SignalClass>>(labels: I) -> Self {
        let mut counts = ClassCounts::default();
        for label in labels {
            counts[label] += 1;
        }
        counts
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn get(&self, class: SignalClass) -> u64 {
        self.0[class.index()]
    }

    /// Majority class; ties go to the earliest class in canonical order.
    pub fn majority(&self) -> SignalClass {
        let mut best = SignalClass::NlosOnly;
        for class in SignalClass::ALL {
            if self[class] > self[best] {
                best = class;
            }
        }
        best
    }

    pub fn is_pure(&self) -> bool {
        self.0.iter().filter(|&&c| c > 0).count() <= 1
    }
}

impl Index<SignalClass> for ClassCounts {
    type Output = u64;

    fn index(&self, class: SignalClass) -> &u64 {
        &self.0[class.index()]
    }
}

impl IndexMut<SignalClass> for ClassCounts {
    fn index_mut(&mut self, class: SignalClass) -> &mut u64 {
        &mut self.0[class.index()]
    }
}
