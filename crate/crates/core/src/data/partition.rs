use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Window;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    /// Desired inference, kept intact.
    White,
    /// Sensitive inference, replaced.
    Black,
    /// Non-sensitive inference, the disguise target.
    Gray,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::White, Category::Black, Category::Gray];

    pub fn index(self) -> usize {
        match self {
            Category::White => 0,
            Category::Black => 1,
            Category::Gray => 2,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Category::White => 'W',
            Category::Black => 'B',
            Category::Gray => 'G',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::White => "white",
            Category::Black => "black",
            Category::Gray => "gray",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// White, black and gray class-id lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InferencePartition {
    pub white: BTreeSet<u32>,
    pub black: BTreeSet<u32>,
    pub gray: BTreeSet<u32>,
}

impl InferencePartition {
    pub fn new(
        white: impl IntoIterator<Item = u32>,
        black: impl IntoIterator<Item = u32>,
        gray: impl IntoIterator<Item = u32>,
    ) -> Result<Self> {
        let p = Self {
            white: white.into_iter().collect(),
            black: black.into_iter().collect(),
            gray: gray.into_iter().collect(),
        };
        p.validate()?;
        Ok(p)
    }

    /// Lists must be pairwise disjoint.
    pub fn validate(&self) -> Result<()> {
        for (a, b, na, nb) in [
            (&self.white, &self.black, "white", "black"),
            (&self.white, &self.gray, "white", "gray"),
            (&self.black, &self.gray, "black", "gray"),
        ] {
            if let Some(c) = a.intersection(b).next() {
                return Err(Error::config(format!(
                    "class {c} appears in both the {na} and {nb} lists"
                )));
            }
        }
        Ok(())
    }

    pub fn category(&self, class: u32) -> Option<Category> {
        if self.white.contains(&class) {
            Some(Category::White)
        } else if self.black.contains(&class) {
            Some(Category::Black)
        } else if self.gray.contains(&class) {
            Some(Category::Gray)
        } else {
            None
        }
    }

    pub fn require_category(&self, class: u32) -> Result<Category> {
        self.category(class)
            .ok_or_else(|| Error::config(format!("class {class} is not in any inference list")))
    }

    pub fn classes(&self, cat: Category) -> &BTreeSet<u32> {
        match cat {
            Category::White => &self.white,
            Category::Black => &self.black,
            Category::Gray => &self.gray,
        }
    }

    /// Every listed class id, ascending.
    pub fn all_classes(&self) -> Vec<u32> {
        let all: BTreeSet<u32> = self
            .white
            .iter()
            .chain(&self.black)
            .chain(&self.gray)
            .copied()
            .collect();
        all.into_iter().collect()
    }

    /// Fails on the first label that is in no list.
    pub fn check_covers(&self, labels: impl IntoIterator<Item = u32>) -> Result<()> {
        for l in labels {
            self.require_category(l)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct PartitionedWindows {
    pub white: Vec<Window>,
    pub black: Vec<Window>,
    pub gray: Vec<Window>,
}

impl PartitionedWindows {
    pub fn get(&self, cat: Category) -> &[Window] {
        match cat {
            Category::White => &self.white,
            Category::Black => &self.black,
            Category::Gray => &self.gray,
        }
    }

    pub fn len(&self) -> usize {
        self.white.len() + self.black.len() + self.gray.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Splits windows into white, black and gray sets, preserving input order
/// within each set.
pub fn partition_windows(
    windows: &[Window],
    partition: &InferencePartition,
) -> Result<PartitionedWindows> {
    let mut out = PartitionedWindows::default();
    for w in windows {
        let dst = match partition.require_category(w.label)? {
            Category::White => &mut out.white,
            Category::Black => &mut out.black,
            Category::Gray => &mut out.gray,
        };
        dst.push(w.clone());
    }
    Ok(out)
}
