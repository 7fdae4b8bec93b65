use std::fmt;

use serde::{Deserialize, Serialize};

/// Photon numbers of the m modes held by one side.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Occupation(Vec<u32>);

impl Occupation {
    pub fn new(counts: Vec<u32>) -> Self {
        Occupation(counts)
    }

    pub fn vacuum(modes: usize) -> Self {
        Occupation(vec![0; modes])
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    /// Copy with `mode` lowered by `k`, or `None` if fewer than `k` quanta are present.
    pub fn lowered(&self, mode: usize, k: u32) -> Option<Occupation> {
        let n = self.0[mode];
        if n < k {
            return None;
        }
        let mut counts = self.0.clone();
        counts[mode] = n - k;
        Some(Occupation(counts))
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ">")
    }
}

/// All occupation tuples of `modes` modes whose entries sum to `total`, in
/// lexicographic order. There are `C(total + modes - 1, total)` of them.
pub fn compositions(total: u32, modes: usize) -> Vec<Occupation> {
    assert!(modes >= 1, "at least one mode is required");
    let mut out = Vec::new();
    let mut current = vec![0u32; modes];
    fill(&mut current, 0, total, &mut out);
    out
}

fn fill(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Occupation>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(Occupation(current.clone()));
        return;
    }
    for n in 0..=remaining {
        current[pos] = n;
        fill(current, pos + 1, remaining - n, out);
    }
}
