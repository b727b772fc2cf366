//! Difference vectors and the usable-block search.

use serde::{Deserialize, Serialize};

/// A maximal all-zero block `η_j` of a difference vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    /// Offset of the block in the bit string (for an empty block, where it sits).
    pub start: usize,
    /// `γ_j = |η_j|`.
    pub len: usize,
    /// Minimum number of faults explaining the ones before the block.
    pub alpha: usize,
    /// Minimum number of faults explaining the ones after the block.
    pub beta: usize,
    /// Like `alpha`, but the one right before the block may come from a fault inside the
    /// block's first round and is not counted.
    pub alpha_outer: usize,
    /// Like `beta`, without the one right after the block.
    pub beta_outer: usize,
}

impl Block {
    pub fn gamma(&self) -> usize {
        self.len
    }

    /// 1-based rounds whose syndrome strings the block certifies: bit `δ_i` compares rounds
    /// `i` and `i + 1`, so a block at offset `p` of length `γ` covers rounds `p+1 ..= p+1+γ`.
    pub fn rounds(&self) -> std::ops::RangeInclusive<usize> {
        self.start + 1..=self.start + 1 + self.len
    }
}

/// `δ_1 … δ_{N-1}`, one bit per pair of consecutive rounds.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceVector {
    pub bits: Vec<u8>,
}

/// `Σ ⌈m/2⌉` over the maximal runs of ones in `bits`: one fault flips at most the two
/// difference bits next to its round.
fn min_faults(bits: &[u8]) -> usize {
    bits.split(|&b| b == 0).map(|run| run.len().div_ceil(2)).sum()
}

impl DifferenceVector {
    pub fn new(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Self { bits }
    }

    pub fn parse(text: &str) -> Option<Self> {
        text.chars()
            .map(|c| match c {
                '0' => Some(0),
                '1' => Some(1),
                _ => None,
            })
            .collect::<Option<Vec<u8>>>()
            .map(Self::new)
    }

    pub fn to_text(&self) -> String {
        self.bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
    }

    pub fn push(&mut self, bit: u8) {
        self.bits.push(bit);
    }

    /// The decomposition `η_1 1 η_2 1 … 1 η_c`; there is always at least one block.
    pub fn blocks(&self) -> Vec<Block> {
        let mut out = Vec::new();
        let mut start = 0;
        for (i, &b) in self.bits.iter().chain(std::iter::once(&1)).enumerate() {
            if b == 1 {
                let len = i - start;
                let end = (start + len).min(self.bits.len());
                out.push(Block {
                    start,
                    len,
                    alpha: min_faults(&self.bits[..start]),
                    beta: min_faults(&self.bits[end..]),
                    alpha_outer: min_faults(&self.bits[..start.saturating_sub(1)]),
                    beta_outer: min_faults(&self.bits[(end + 1).min(self.bits.len())..]),
                });
                start = i + 1;
            }
        }
        out
    }

    /// Non-overlapping `11` substrings, counted greedily from the left.
    pub fn count_double_ones(&self) -> usize {
        let mut count = 0;
        let mut i = 0;
        while i + 1 < self.bits.len() {
            if self.bits[i] == 1 && self.bits[i + 1] == 1 {
                count += 1;
                i += 2;
            } else {
                i += 1;
            }
        }
        count
    }
}

/// Scans the blocks from last to first and returns the first with `α + β + γ ≥ t_in`.
pub fn find_usable_substring(t_in: i64, delta: &DifferenceVector) -> Option<Block> {
    delta.blocks().into_iter().rev().find(|b| (b.alpha + b.beta + b.gamma()) as i64 >= t_in)
}

/// Variant that only credits faults certainly outside the block's rounds, so a fault in the
/// block's boundary round cannot be mistaken for one before or after it.
pub fn find_usable_substring_outer(t_in: i64, delta: &DifferenceVector) -> Option<Block> {
    delta.blocks().into_iter().rev().find(|b| (b.alpha_outer + b.beta_outer + b.gamma()) as i64 >= t_in)
}
