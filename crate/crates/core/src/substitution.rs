//! Two-sided fixed points of substitutions, evaluated by descent through
//! precomputed image lengths.

use crate::sequence::{SequenceError, SymbolId};

/// Indices beyond this are never reached through `i64` positions and
/// moderate shifts.
const INDEX_LIMIT: u128 = 1 << 100;
const TABLE_BUDGET: usize = 1 << 22;
const MAX_LEVELS: usize = 4096;

#[derive(Clone, Debug)]
pub(crate) struct FixedPoint {
    rules: Vec<Vec<SymbolId>>,
    seed: SymbolId,
    left_seed: SymbolId,
    /// `lengths[j][s] = |rules^j(s)|`, saturating.
    lengths: Vec<Vec<u128>>,
}

impl FixedPoint {
    pub(crate) fn new(
        rules: Vec<Vec<SymbolId>>,
        seed: SymbolId,
        left_seed: SymbolId,
    ) -> Result<Self, SequenceError> {
        let size = rules.len();
        for (s, image) in rules.iter().enumerate() {
            if image.is_empty() {
                return Err(SequenceError::EmptyImage(s));
            }
            if let Some(bad) = image.iter().find(|c| c.index() >= size) {
                return Err(SequenceError::SymbolOutOfRange {
                    index: bad.index(),
                    size,
                });
            }
        }
        for s in [seed, left_seed] {
            if s.index() >= size {
                return Err(SequenceError::SymbolOutOfRange {
                    index: s.index(),
                    size,
                });
            }
        }
        let right = &rules[seed.index()];
        if right[0] != seed || right.len() < 2 {
            return Err(SequenceError::NoRightFixedPoint(seed.index()));
        }
        let left = &rules[left_seed.index()];
        if *left.last().unwrap() != left_seed || left.len() < 2 {
            return Err(SequenceError::NoLeftFixedPoint(left_seed.index()));
        }

        let mut lengths = vec![vec![1u128; size]];
        loop {
            let last = lengths.last().unwrap();
            if last[seed.index()] >= INDEX_LIMIT && last[left_seed.index()] >= INDEX_LIMIT {
                break;
            }
            if lengths.len() * size > TABLE_BUDGET || lengths.len() > MAX_LEVELS {
                return Err(SequenceError::SlowSubstitution);
            }
            let next = rules
                .iter()
                .map(|image| {
                    image
                        .iter()
                        .fold(0u128, |acc, c| acc.saturating_add(last[c.index()]))
                })
                .collect();
            lengths.push(next);
        }
        Ok(FixedPoint {
            rules,
            seed,
            left_seed,
            lengths,
        })
    }

    pub(crate) fn rules(&self) -> &[Vec<SymbolId>] {
        &self.rules
    }

    pub(crate) fn seed(&self) -> SymbolId {
        self.seed
    }

    pub(crate) fn left_seed(&self) -> SymbolId {
        self.left_seed
    }

    pub(crate) fn eval(&self, n: i128) -> SymbolId {
        if n >= 0 {
            self.descend(self.seed, n as u128, false)
        } else {
            self.descend(self.left_seed, (-(n + 1)) as u128, true)
        }
    }

    /// Symbol at `index` of `rules^K(start)` for the least `K` whose image is
    /// long enough, counted from the right end when `from_right`.
    fn descend(&self, start: SymbolId, index: u128, from_right: bool) -> SymbolId {
        let Some(mut level) = self
            .lengths
            .iter()
            .position(|row| row[start.index()] > index)
        else {
            // Beyond INDEX_LIMIT: fold back into the covered range.
            let top = self.lengths.last().unwrap()[start.index()];
            return self.descend(start, index % top, from_right);
        };
        let mut sym = start;
        let mut idx = index;
        while level > 0 {
            let below = &self.lengths[level - 1];
            let image = &self.rules[sym.index()];
            let mut pick = |c: &SymbolId| {
                let len = below[c.index()];
                if idx < len {
                    true
                } else {
                    idx -= len;
                    false
                }
            };
            sym = if from_right {
                *image.iter().rev().find(|c| pick(c)).unwrap()
            } else {
                *image.iter().find(|c| pick(c)).unwrap()
            };
            level -= 1;
        }
        sym
    }
}
