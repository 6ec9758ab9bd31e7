//! Finite alphabets, two-sided sequences given by rules, windows and the
//! product metric.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::skeleton::SkeletonMap;
use crate::substitution::FixedPoint;

/// Largest window [`materialize`] produces unless told otherwise.
pub const DEFAULT_WINDOW_CAP: usize = 1 << 22;
/// Largest common period a Toeplitz fill may have.
pub const MAX_FILL_PERIOD: usize = 1 << 24;
const MAX_ALPHABET: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("alphabet has {0} symbols, at most 65536 are supported")]
    AlphabetTooLarge(usize),
    #[error("duplicate symbol label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown symbol label `{0}`")]
    UnknownLabel(String),
    #[error("symbol index {index} out of range for alphabet of size {size}")]
    SymbolOutOfRange { index: usize, size: usize },
    #[error("periodic pattern is empty")]
    EmptyPattern,
    #[error("toeplitz fill has no stages")]
    NoStages,
    #[error("stage {stage}: residue {residue} is not below period {period}")]
    BadStage {
        stage: usize,
        period: usize,
        residue: usize,
    },
    #[error("toeplitz fill common period exceeds {MAX_FILL_PERIOD}")]
    FillPeriodTooLarge,
    #[error("toeplitz fill leaves residue {residue} mod {modulus} uncovered")]
    UncoveredResidue { residue: usize, modulus: usize },
    #[error("substitution needs one image per symbol: got {images}, alphabet has {size}")]
    RuleCountMismatch { images: usize, size: usize },
    #[error("image of symbol {0} is empty")]
    EmptyImage(usize),
    #[error("image of seed {0} must start with it and have length at least 2")]
    NoRightFixedPoint(usize),
    #[error("image of left seed {0} must end with it and have length at least 2")]
    NoLeftFixedPoint(usize),
    #[error("substitution grows too slowly to evaluate far from the origin")]
    SlowSubstitution,
    #[error("rules are over different alphabets")]
    AlphabetMismatch,
    #[error("window [{lo}, {hi}) is empty")]
    EmptyWindow { lo: i64, hi: i64 },
    #[error("window of {len} symbols exceeds the cap of {cap}")]
    WindowTooLarge { len: u64, cap: usize },
}

/// Index of a symbol in an [`Alphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolId(pub u16);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// An ordered list of distinct symbol labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Alphabet {
    labels: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self, SequenceError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(SequenceError::EmptyAlphabet);
        }
        if labels.len() > MAX_ALPHABET {
            return Err(SequenceError::AlphabetTooLarge(labels.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(SequenceError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Alphabet { labels })
    }

    /// The alphabet `{"0", "1", ..., "size-1"}`.
    pub fn numbered(size: usize) -> Result<Self, SequenceError> {
        Alphabet::new((0..size).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, s: SymbolId) -> &str {
        &self.labels[s.index()]
    }

    pub fn id(&self, label: &str) -> Result<SymbolId, SequenceError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| SymbolId(i as u16))
            .ok_or_else(|| SequenceError::UnknownLabel(label.to_owned()))
    }

    pub fn check(&self, s: SymbolId) -> Result<SymbolId, SequenceError> {
        if s.index() < self.len() {
            Ok(s)
        } else {
            Err(SequenceError::SymbolOutOfRange {
                index: s.index(),
                size: self.len(),
            })
        }
    }
}

/// One stage of a Toeplitz fill: positions `n ≡ residue (mod period)` not
/// claimed by an earlier stage receive `symbol`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub period: usize,
    pub residue: usize,
    pub symbol: SymbolId,
}

/// Validated Toeplitz fill. The winning stage of every residue modulo the
/// common period is precomputed.
#[derive(Clone, Debug)]
pub struct ToeplitzFill {
    stages: Vec<Stage>,
    winners: Vec<u32>,
}

impl ToeplitzFill {
    fn new(stages: Vec<Stage>, alphabet: &Alphabet) -> Result<Self, SequenceError> {
        if stages.is_empty() {
            return Err(SequenceError::NoStages);
        }
        let mut common = 1usize;
        for (i, st) in stages.iter().enumerate() {
            alphabet.check(st.symbol)?;
            if st.period == 0 || st.residue >= st.period {
                return Err(SequenceError::BadStage {
                    stage: i,
                    period: st.period,
                    residue: st.residue,
                });
            }
            common = common.lcm(&st.period);
            if common > MAX_FILL_PERIOD {
                return Err(SequenceError::FillPeriodTooLarge);
            }
        }
        let mut winners = vec![u32::MAX; common];
        for (i, st) in stages.iter().enumerate().rev() {
            for r in (st.residue..common).step_by(st.period) {
                winners[r] = i as u32;
            }
        }
        if let Some(r) = winners.iter().position(|&w| w == u32::MAX) {
            return Err(SequenceError::UncoveredResidue {
                residue: r,
                modulus: common,
            });
        }
        Ok(ToeplitzFill { stages, winners })
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// Least common multiple of the stage periods; the fill has this period.
    pub fn common_period(&self) -> usize {
        self.winners.len()
    }

    /// Index of the first stage whose residue class contains `n`.
    pub fn winning_stage(&self, n: i64) -> usize {
        self.winners[n.rem_euclid(self.winners.len() as i64) as usize] as usize
    }

    fn eval(&self, n: i128) -> SymbolId {
        let w = self.winners[n.rem_euclid(self.winners.len() as i128) as usize];
        self.stages[w as usize].symbol
    }
}

/// A substitution with a two-sided fixed point.
#[derive(Clone, Debug)]
pub struct Substitution(FixedPoint);

impl Substitution {
    pub fn rules(&self) -> &[Vec<SymbolId>] {
        self.0.rules()
    }

    /// Symbol at position 0; its image starts with it.
    pub fn seed(&self) -> SymbolId {
        self.0.seed()
    }

    /// Symbol at position -1; its image ends with it.
    pub fn left_seed(&self) -> SymbolId {
        self.0.left_seed()
    }
}

#[derive(Clone, Debug)]
pub enum RuleKind {
    Constant(SymbolId),
    Periodic(Vec<SymbolId>),
    ToeplitzFill(ToeplitzFill),
    Substitution(Substitution),
    /// `eval(n) = base.eval(n + offset)`.
    ShiftOf { base: SequenceRule, offset: i64 },
    /// The first skeleton defined at `n` decides; otherwise the filler does.
    Splice {
        skeletons: Vec<SkeletonMap>,
        filler: SequenceRule,
    },
}

/// A point of `Σ^Z`, given as a total deterministic rule. Cheap to clone.
#[derive(Clone, Debug)]
pub struct SequenceRule {
    alphabet: Arc<Alphabet>,
    kind: Arc<RuleKind>,
}

impl SequenceRule {
    fn from_kind(alphabet: Arc<Alphabet>, kind: RuleKind) -> Self {
        SequenceRule {
            alphabet,
            kind: Arc::new(kind),
        }
    }

    pub fn constant(alphabet: Arc<Alphabet>, symbol: SymbolId) -> Result<Self, SequenceError> {
        alphabet.check(symbol)?;
        Ok(Self::from_kind(alphabet, RuleKind::Constant(symbol)))
    }

    pub fn periodic(alphabet: Arc<Alphabet>, pattern: Vec<SymbolId>) -> Result<Self, SequenceError> {
        if pattern.is_empty() {
            return Err(SequenceError::EmptyPattern);
        }
        for &s in &pattern {
            alphabet.check(s)?;
        }
        Ok(Self::from_kind(alphabet, RuleKind::Periodic(pattern)))
    }

    pub fn toeplitz_fill(alphabet: Arc<Alphabet>, stages: Vec<Stage>) -> Result<Self, SequenceError> {
        let fill = ToeplitzFill::new(stages, &alphabet)?;
        Ok(Self::from_kind(alphabet, RuleKind::ToeplitzFill(fill)))
    }

    /// Two-sided fixed point `... rules^∞(left_seed) . rules^∞(seed) ...`
    /// with `seed` at position 0 and `left_seed` at position -1.
    pub fn substitution(
        alphabet: Arc<Alphabet>,
        rules: Vec<Vec<SymbolId>>,
        seed: SymbolId,
        left_seed: SymbolId,
    ) -> Result<Self, SequenceError> {
        if rules.len() != alphabet.len() {
            return Err(SequenceError::RuleCountMismatch {
                images: rules.len(),
                size: alphabet.len(),
            });
        }
        let fp = FixedPoint::new(rules, seed, left_seed)?;
        Ok(Self::from_kind(alphabet, RuleKind::Substitution(Substitution(fp))))
    }

    /// `S^offset` applied to this point.
    pub fn shift(&self, offset: i64) -> SequenceRule {
        Self::from_kind(
            self.alphabet.clone(),
            RuleKind::ShiftOf {
                base: self.clone(),
                offset,
            },
        )
    }

    pub fn splice(skeletons: Vec<SkeletonMap>, filler: SequenceRule) -> Result<Self, SequenceError> {
        for sk in &skeletons {
            for s in sk.assignment().iter().flatten() {
                filler.alphabet.check(*s)?;
            }
        }
        Ok(Self::from_kind(
            filler.alphabet.clone(),
            RuleKind::Splice { skeletons, filler },
        ))
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn kind(&self) -> &RuleKind {
        &self.kind
    }

    pub fn same_alphabet(&self, other: &SequenceRule) -> bool {
        Arc::ptr_eq(&self.alphabet, &other.alphabet) || self.alphabet == other.alphabet
    }

    pub fn eval(&self, n: i64) -> SymbolId {
        self.eval_wide(n as i128)
    }

    fn eval_wide(&self, n: i128) -> SymbolId {
        let mut rule = self;
        let mut n = n;
        loop {
            match &*rule.kind {
                RuleKind::Constant(s) => return *s,
                RuleKind::Periodic(p) => return p[n.rem_euclid(p.len() as i128) as usize],
                RuleKind::ToeplitzFill(fill) => return fill.eval(n),
                RuleKind::Substitution(sub) => return sub.0.eval(n),
                RuleKind::ShiftOf { base, offset } => {
                    n += *offset as i128;
                    rule = base;
                }
                RuleKind::Splice { skeletons, filler } => {
                    let hit = skeletons.iter().find_map(|sk| {
                        let r = n.rem_euclid(sk.period() as i128) as usize;
                        sk.get(r)
                    });
                    if let Some(s) = hit {
                        return s;
                    }
                    rule = filler;
                }
            }
        }
    }

    /// Labels of `[lo, hi)` concatenated, for display.
    pub fn render(&self, lo: i64, hi: i64) -> String {
        let sep = if self.alphabet.labels().iter().all(|l| l.chars().count() == 1) {
            ""
        } else {
            " "
        };
        (lo..hi)
            .map(|n| self.alphabet.label(self.eval(n)))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

/// A materialized finite piece `[lo, hi)` of a sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    lo: i64,
    values: Vec<SymbolId>,
}

impl Window {
    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64
    }

    pub fn values(&self) -> &[SymbolId] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, n: i64) -> Option<SymbolId> {
        let i = n.checked_sub(self.lo)?;
        usize::try_from(i).ok().and_then(|i| self.values.get(i).copied())
    }

    /// The same values, relabelled to start at `lo`.
    pub fn reindexed(mut self, lo: i64) -> Window {
        self.lo = lo;
        self
    }

    /// The sub-window `[lo, hi)`, if it lies inside this one.
    pub fn slice(&self, lo: i64, hi: i64) -> Option<Window> {
        if lo >= hi || lo < self.lo || hi > self.hi() {
            return None;
        }
        let start = (lo - self.lo) as usize;
        Some(Window {
            lo,
            values: self.values[start..start + (hi - lo) as usize].to_vec(),
        })
    }

    pub fn positions(&self) -> impl Iterator<Item = (i64, SymbolId)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &s)| (self.lo + i as i64, s))
    }
}

pub fn materialize(rule: &SequenceRule, lo: i64, hi: i64) -> Result<Window, SequenceError> {
    materialize_with_cap(rule, lo, hi, DEFAULT_WINDOW_CAP)
}

pub fn materialize_with_cap(
    rule: &SequenceRule,
    lo: i64,
    hi: i64,
    cap: usize,
) -> Result<Window, SequenceError> {
    if lo >= hi {
        return Err(SequenceError::EmptyWindow { lo, hi });
    }
    let len = (hi as i128 - lo as i128) as u64;
    if len > cap as u64 {
        return Err(SequenceError::WindowTooLarge { len, cap });
    }
    Ok(Window {
        lo,
        values: (lo..hi).map(|n| rule.eval(n)).collect(),
    })
}

/// `Σ_{|n| ≤ radius} 2^{-|n|} ρ(x(n), y(n))` with the discrete metric `ρ`.
pub fn product_distance(
    x: &SequenceRule,
    y: &SequenceRule,
    radius: u32,
) -> Result<BigRational, SequenceError> {
    if !x.same_alphabet(y) {
        return Err(SequenceError::AlphabetMismatch);
    }
    let r = radius as i64;
    let mut numer = BigUint::zero();
    for n in -r..=r {
        if x.eval(n) != y.eval(n) {
            numer += BigUint::one() << (radius - n.unsigned_abs() as u32);
        }
    }
    let denom = BigUint::one() << radius;
    Ok(BigRational::new(numer.into(), denom.into()))
}

/// Shifts under which a block of a sequence reappears.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Recurrence {
    pub block_lo: i64,
    pub block_hi: i64,
    pub search_radius: u64,
    /// Every `t` in `[-search_radius, search_radius]` with
    /// `x(n + t) = x(n)` for all `n` in the block.
    pub occurrences: Vec<i64>,
    /// Largest distance between consecutive occurrences; `None` when fewer
    /// than two were found.
    pub max_gap: Option<u64>,
}

pub fn recurrence_gaps(
    x: &SequenceRule,
    block_lo: i64,
    block_hi: i64,
    search_radius: u64,
) -> Result<Recurrence, SequenceError> {
    if block_lo >= block_hi {
        return Err(SequenceError::EmptyWindow {
            lo: block_lo,
            hi: block_hi,
        });
    }
    let r = search_radius as i64;
    let window = materialize(x, block_lo - r, block_hi + r)?;
    let block = &window.values()[r as usize..(r + block_hi - block_lo) as usize];
    let occurrences: Vec<i64> = (-r..=r)
        .filter(|&t| {
            let start = (r + t) as usize;
            &window.values()[start..start + block.len()] == block
        })
        .collect();
    let max_gap = occurrences
        .windows(2)
        .map(|w| (w[1] - w[0]) as u64)
        .max();
    Ok(Recurrence {
        block_lo,
        block_hi,
        search_radius,
        occurrences,
        max_gap,
    })
}
