//! Periodic skeletons as partial maps from residues to symbols.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::sequence::SymbolId;

/// How a skeleton was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "source")]
pub enum Evidence {
    /// Computed in closed form from the rule; holds on all of `Z`.
    Exact,
    /// Witnessed on the window `[-radius, radius)` only.
    Window { radius: u64 },
    /// Assembled by construction (splice skeletons, shifted skeletons).
    Constructed,
}

/// The `p`-skeleton of a point: residue `r` is in the domain iff the point
/// takes one symbol on the whole class `r + pZ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonMap {
    period: usize,
    assignment: Vec<Option<SymbolId>>,
    evidence: Evidence,
    /// Residues seen fewer than twice in the window; never in the domain.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    insufficient: Vec<usize>,
}

/// `M_p`: the longest run of consecutive integers inside the `p`-skeleton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MpValue {
    Finite(u64),
    Infinite,
}

impl MpValue {
    pub fn finite(self) -> Option<u64> {
        match self {
            MpValue::Finite(m) => Some(m),
            MpValue::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == MpValue::Infinite
    }
}

impl fmt::Display for MpValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MpValue::Finite(m) => write!(f, "{m}"),
            MpValue::Infinite => f.write_str("inf"),
        }
    }
}

impl SkeletonMap {
    /// Builds a skeleton from an explicit assignment. Panics if `assignment`
    /// is empty; callers validate the period beforehand.
    pub fn new(assignment: Vec<Option<SymbolId>>, evidence: Evidence) -> Self {
        assert!(!assignment.is_empty(), "skeleton period must be positive");
        SkeletonMap {
            period: assignment.len(),
            assignment,
            evidence,
            insufficient: Vec::new(),
        }
    }

    pub(crate) fn with_insufficient(mut self, residues: Vec<usize>) -> Self {
        self.insufficient = residues;
        self
    }

    /// Builds a skeleton of period `period` from `(residue, symbol)` pairs.
    pub fn from_pairs(
        period: usize,
        pairs: impl IntoIterator<Item = (usize, SymbolId)>,
        evidence: Evidence,
    ) -> Option<Self> {
        if period == 0 {
            return None;
        }
        let mut assignment = vec![None; period];
        for (r, s) in pairs {
            if r >= period || assignment[r].is_some() {
                return None;
            }
            assignment[r] = Some(s);
        }
        Some(SkeletonMap::new(assignment, evidence))
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn evidence(&self) -> Evidence {
        self.evidence
    }

    pub fn insufficient(&self) -> &[usize] {
        &self.insufficient
    }

    pub fn assignment(&self) -> &[Option<SymbolId>] {
        &self.assignment
    }

    /// The symbol assigned to residue `r` (taken mod the period).
    pub fn get(&self, r: usize) -> Option<SymbolId> {
        self.assignment[r % self.period]
    }

    /// The symbol the skeleton forces at integer position `n`, if any.
    pub fn at(&self, n: i64) -> Option<SymbolId> {
        self.assignment[n.rem_euclid(self.period as i64) as usize]
    }

    pub fn contains(&self, n: i64) -> bool {
        self.at(n).is_some()
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(r, s)| s.map(|_| r))
    }

    pub fn domain_len(&self) -> usize {
        self.assignment.iter().filter(|s| s.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.iter().all(Option::is_none)
    }

    pub fn is_full(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    /// Domain as a bit string, residue 0 first.
    pub fn domain_mask(&self) -> String {
        self.assignment
            .iter()
            .map(|s| if s.is_some() { '1' } else { '0' })
            .collect()
    }

    /// `M_p` of this skeleton: infinite for a full domain, otherwise the
    /// longest cyclic run of residues in the domain.
    pub fn max_block(&self) -> MpValue {
        let p = self.period;
        let Some(gap) = self.assignment.iter().position(Option::is_none) else {
            return MpValue::Infinite;
        };
        let mut best = 0u64;
        let mut run = 0u64;
        // Starting just after a hole, one lap visits every cyclic run whole.
        for i in 1..=p {
            if self.assignment[(gap + i) % p].is_some() {
                run += 1;
                best = best.max(run);
            } else {
                run = 0;
            }
        }
        MpValue::Finite(best)
    }

    /// Start residues of cyclic runs of length at least `len`.
    pub fn run_starts(&self, len: u64) -> Vec<usize> {
        let p = self.period;
        if self.is_full() {
            return (0..p).collect();
        }
        (0..p)
            .filter(|&r| {
                (len as usize) <= p
                    && (0..len as usize).all(|j| self.assignment[(r + j) % p].is_some())
            })
            .collect()
    }

    /// Whether translating the skeleton by `t` leaves domain and values fixed.
    pub fn is_shift_stable(&self, t: i64) -> bool {
        let p = self.period;
        let t = t.rem_euclid(p as i64) as usize;
        (0..p).all(|r| self.assignment[(r + t) % p] == self.assignment[r])
    }

    /// The least `t > 0` under which the skeleton is shift-stable. It always
    /// divides the period; the period is essential iff it equals the period.
    pub fn stabilizer(&self) -> usize {
        let p = self.period;
        (1..=p)
            .filter(|t| p % t == 0)
            .find(|&t| self.is_shift_stable(t as i64))
            .unwrap_or(p)
    }

    /// Restriction to a divisor `k` of the period, defined where the whole
    /// fiber over a residue mod `k` carries one symbol.
    pub fn restrict(&self, k: usize) -> Option<SkeletonMap> {
        if k == 0 || self.period % k != 0 {
            return None;
        }
        let assignment = (0..k)
            .map(|r| {
                let first = self.assignment[r]?;
                (r..self.period)
                    .step_by(k)
                    .all(|i| self.assignment[i] == Some(first))
                    .then_some(first)
            })
            .collect();
        Some(SkeletonMap::new(assignment, self.evidence))
    }

    /// Lifts to a multiple `q` of the period: residue `r mod q` inherits the
    /// value at `r mod p`.
    pub fn lift(&self, q: usize) -> Option<SkeletonMap> {
        if q == 0 || q % self.period != 0 {
            return None;
        }
        let assignment = (0..q).map(|r| self.assignment[r % self.period]).collect();
        Some(SkeletonMap::new(assignment, self.evidence))
    }

    /// The skeleton of `S^t` applied to the point: residue `r` maps to the
    /// value at `r + t`.
    pub fn shifted(&self, t: i64) -> SkeletonMap {
        let p = self.period as i64;
        let assignment = (0..p)
            .map(|r| self.assignment[(r + t).rem_euclid(p) as usize])
            .collect();
        SkeletonMap::new(assignment, Evidence::Constructed)
    }

    /// Same domain and values, ignoring evidence metadata.
    pub fn same_map(&self, other: &SkeletonMap) -> bool {
        self.assignment == other.assignment
    }
}
