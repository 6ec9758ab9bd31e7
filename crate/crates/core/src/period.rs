//! Period skeletons, `M_p`, aperiodic positions, essential periods and
//! periodic structures.
//!
//! Skeletons of an arbitrary rule are witnessed on the window
//! `[-radius, radius)`: a residue class is in the domain when every sample of
//! it in the window carries the same symbol. True periodic residues are always
//! found this way; a witnessed residue is only evidence. For constant,
//! periodic and Toeplitz-fill rules [`exact_skeleton`] gives the true
//! skeleton, which the tests use to cross-check the window path.

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::sequence::{materialize, RuleKind, SequenceError, SequenceRule, SymbolId, Window};
use crate::skeleton::{Evidence, MpValue, SkeletonMap};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeriodError {
    #[error("period must be positive")]
    ZeroPeriod,
    #[error("radius {radius} is below twice the period {period}")]
    RadiusTooSmall { radius: u64, period: usize },
    #[error("the {period}-skeleton is empty")]
    EmptySkeleton { period: usize },
    #[error("skeleton of period {period} is not shift-stable under {shift}")]
    PreconditionViolated { period: usize, shift: u64 },
    #[error("no growth of M_p witnessed over the candidate periods")]
    NoGrowthEvidence(Box<GrowthReport>),
    #[error("no offset aligns the {period}-skeleton with the other point")]
    NotFound { period: usize },
    #[error("reduced skeleton at {k} differs from the {period}-skeleton")]
    ReductionMismatch { period: usize, k: usize },
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// A materialized window `[-radius, radius)` of one point, from which
/// skeletons of any period up to `radius / 2` can be read off.
#[derive(Clone, Debug)]
pub struct Witness {
    window: Window,
    radius: u64,
}

impl Witness {
    pub fn new(x: &SequenceRule, radius: u64) -> Result<Self, PeriodError> {
        let r = radius as i64;
        Ok(Witness {
            window: materialize(x, -r, r)?,
            radius,
        })
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn skeleton(&self, p: usize) -> Result<SkeletonMap, PeriodError> {
        if p == 0 {
            return Err(PeriodError::ZeroPeriod);
        }
        if self.radius < 2 * p as u64 {
            return Err(PeriodError::RadiusTooSmall {
                radius: self.radius,
                period: p,
            });
        }
        Ok(skeleton_of_window(&self.window, p, self.radius))
    }
}

#[derive(Clone, Copy)]
enum Samples {
    None,
    One(SymbolId),
    Agree(SymbolId),
    Mixed,
}

pub(crate) fn skeleton_of_window(window: &Window, p: usize, radius: u64) -> SkeletonMap {
    let mut seen = vec![Samples::None; p];
    let mut r = window.lo().rem_euclid(p as i64) as usize;
    for &s in window.values() {
        seen[r] = match seen[r] {
            Samples::None => Samples::One(s),
            Samples::One(t) | Samples::Agree(t) if t == s => Samples::Agree(s),
            _ => Samples::Mixed,
        };
        r += 1;
        if r == p {
            r = 0;
        }
    }
    let insufficient = (0..p)
        .filter(|&r| matches!(seen[r], Samples::None | Samples::One(_)))
        .collect();
    let assignment = seen
        .iter()
        .map(|s| match s {
            Samples::Agree(t) => Some(*t),
            _ => None,
        })
        .collect();
    SkeletonMap::new(assignment, Evidence::Window { radius }).with_insufficient(insufficient)
}

/// Witnessed `p`-skeleton of `x` on `[-radius, radius)`.
pub fn skeleton(x: &SequenceRule, p: usize, radius: u64) -> Result<SkeletonMap, PeriodError> {
    if p == 0 {
        return Err(PeriodError::ZeroPeriod);
    }
    if radius < 2 * p as u64 {
        return Err(PeriodError::RadiusTooSmall { radius, period: p });
    }
    Witness::new(x, radius)?.skeleton(p)
}

/// The true `p`-skeleton, for rules that are eventually periodic by kind
/// (constant, periodic, Toeplitz fill and shifts of those).
pub fn exact_skeleton(x: &SequenceRule, p: usize) -> Option<SkeletonMap> {
    if p == 0 {
        return None;
    }
    match x.kind() {
        RuleKind::Constant(s) => Some(SkeletonMap::new(vec![Some(*s); p], Evidence::Exact)),
        RuleKind::Periodic(pattern) => Some(skeleton_of_pattern(pattern, p)),
        RuleKind::ToeplitzFill(fill) => {
            let pattern: Vec<SymbolId> = (0..fill.common_period() as i64).map(|n| x.eval(n)).collect();
            Some(skeleton_of_pattern(&pattern, p))
        }
        RuleKind::ShiftOf { base, offset } => {
            let sk = exact_skeleton(base, p)?.shifted(*offset);
            Some(SkeletonMap::new(sk.assignment().to_vec(), Evidence::Exact))
        }
        RuleKind::Substitution(_) | RuleKind::Splice { .. } => None,
    }
}

/// For a sequence of period `L`, the class `r + pZ` meets exactly the pattern
/// indices congruent to `r` modulo `gcd(p, L)`.
fn skeleton_of_pattern(pattern: &[SymbolId], p: usize) -> SkeletonMap {
    let g = p.gcd(&pattern.len());
    let by_class: Vec<Option<SymbolId>> = (0..g)
        .map(|c| {
            let first = pattern[c];
            pattern[c..]
                .iter()
                .step_by(g)
                .all(|&s| s == first)
                .then_some(first)
        })
        .collect();
    SkeletonMap::new((0..p).map(|r| by_class[r % g]).collect(), Evidence::Exact)
}

pub fn max_block(sk: &SkeletonMap) -> MpValue {
    sk.max_block()
}

/// Positions of `[-radius, radius)` outside every witnessed `p`-skeleton with
/// `p ≤ period_cap`: aperiodic up to that cap at that radius.
pub fn aperiodic_positions(
    x: &SequenceRule,
    period_cap: usize,
    radius: u64,
) -> Result<Vec<i64>, PeriodError> {
    let witness = Witness::new(x, radius)?;
    aperiodic_in(&witness, period_cap)
}

pub(crate) fn aperiodic_in(witness: &Witness, period_cap: usize) -> Result<Vec<i64>, PeriodError> {
    if period_cap == 0 {
        return Err(PeriodError::ZeroPeriod);
    }
    let skeletons = (1..=period_cap)
        .map(|p| witness.skeleton(p))
        .collect::<Result<Vec<_>, _>>()?;
    let r = witness.radius() as i64;
    Ok((-r..r)
        .filter(|&n| skeletons.iter().all(|sk| !sk.contains(n)))
        .collect())
}

/// Least `k > 0` that fixes the skeleton under translation; divides the period.
pub fn shift_stabilizer(sk: &SkeletonMap) -> Result<usize, PeriodError> {
    if sk.is_empty() {
        return Err(PeriodError::EmptySkeleton { period: sk.period() });
    }
    Ok(sk.stabilizer())
}

pub fn is_essential(sk: &SkeletonMap) -> bool {
    !sk.is_empty() && sk.stabilizer() == sk.period()
}

/// Outcome of reducing a period to the least divisor with the same skeleton.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reduction {
    pub period: usize,
    pub k: usize,
    pub skeleton: SkeletonMap,
    pub max_block: MpValue,
}

pub fn essential_reduce(x: &SequenceRule, p: usize, radius: u64) -> Result<Reduction, PeriodError> {
    let witness = Witness::new(x, radius)?;
    reduce_in(&witness, p)
}

pub(crate) fn reduce_in(witness: &Witness, p: usize) -> Result<Reduction, PeriodError> {
    let sk_p = witness.skeleton(p)?;
    let k = shift_stabilizer(&sk_p)?;
    let sk_k = witness.skeleton(k)?;
    let same_set = sk_k.lift(p).is_some_and(|l| l.same_map(&sk_p));
    if !same_set || sk_k.max_block() != sk_p.max_block() {
        return Err(PeriodError::ReductionMismatch { period: p, k });
    }
    Ok(Reduction {
        period: p,
        k,
        max_block: sk_k.max_block(),
        skeleton: sk_k,
    })
}

/// If the skeleton is stable under `m1` and `m2`, checks that it is stable
/// under `m1 mod m2` as well.
pub fn lemma1_check(sk: &SkeletonMap, m1: u64, m2: u64) -> Result<bool, PeriodError> {
    for m in [m1, m2] {
        if m == 0 || !sk.is_shift_stable(m as i64) {
            return Err(PeriodError::PreconditionViolated {
                period: sk.period(),
                shift: m,
            });
        }
    }
    Ok(sk.is_shift_stable((m1 % m2) as i64))
}

/// One level of a periodic structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureEntry {
    pub period: usize,
    pub max_block: MpValue,
    /// Candidate period this level came from.
    pub raw: usize,
    /// Its essential reduction.
    pub reduced: usize,
    /// Reductions whose running lcm gives `period`.
    pub lcm_chain: Vec<usize>,
}

/// One candidate as processed by [`build_periodic_structure`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthPoint {
    pub candidate: usize,
    pub reduced: Option<usize>,
    pub lcm: Option<usize>,
    pub max_block: Option<MpValue>,
    pub outcome: GrowthOutcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthOutcome {
    Kept,
    EmptySkeleton,
    SamePeriod,
    NoGrowth,
    NotEssential,
    BeyondRadius,
    AfterPeriodic,
}

/// The `M_q` series behind a structure. Growth over a finite range is a
/// heuristic for `limsup M_p = ∞`, never a proof of it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthReport {
    pub radius: u64,
    pub series: Vec<GrowthPoint>,
    /// A full skeleton was reached: the point is periodic.
    pub periodic: bool,
    /// At least two levels with strictly growing finite `M`.
    pub growth_witnessed: bool,
}

/// A divisibility chain of essential periods with strictly growing `M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodicStructure {
    pub entries: Vec<StructureEntry>,
    pub report: GrowthReport,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("structure levels must divide each other and grow strictly in period and M")]
pub struct InvalidStructure;

impl PeriodicStructure {
    /// Structure from known `(period, M)` levels, e.g. for a hand-made chain.
    pub fn from_levels(levels: &[(usize, MpValue)]) -> Result<Self, InvalidStructure> {
        for w in levels.windows(2) {
            let ((p, m), (q, n)) = (w[0], w[1]);
            if p == 0 || q <= p || q % p != 0 || n <= m {
                return Err(InvalidStructure);
            }
        }
        if levels.first().is_some_and(|l| l.0 == 0) {
            return Err(InvalidStructure);
        }
        let entries = levels
            .iter()
            .map(|&(period, max_block)| StructureEntry {
                period,
                max_block,
                raw: period,
                reduced: period,
                lcm_chain: vec![period],
            })
            .collect();
        Ok(PeriodicStructure {
            entries,
            report: GrowthReport {
                radius: 0,
                series: Vec::new(),
                periodic: levels.last().is_some_and(|l| l.1.is_infinite()),
                growth_witnessed: levels.len() >= 2,
            },
        })
    }

    pub fn periods(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.period).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The first `depth` levels.
    pub fn truncated(&self, depth: usize) -> PeriodicStructure {
        let mut out = self.clone();
        out.entries.truncate(depth);
        out
    }
}

/// Reduces each candidate to its essential period, chains running lcms and
/// keeps the levels where `M` strictly grows.
pub fn build_periodic_structure(
    x: &SequenceRule,
    candidates: &[usize],
    radius: u64,
) -> Result<PeriodicStructure, PeriodError> {
    let witness = Witness::new(x, radius)?;
    structure_in(&witness, candidates)
}

pub(crate) fn structure_in(witness: &Witness, candidates: &[usize]) -> Result<PeriodicStructure, PeriodError> {
    let limit = (witness.radius() / 2) as usize;
    let mut series = Vec::new();
    let mut entries: Vec<StructureEntry> = Vec::new();
    let mut chain: Vec<usize> = Vec::new();
    let mut acc = 1usize;
    let mut periodic = false;

    for &p in candidates {
        let mut point = GrowthPoint {
            candidate: p,
            reduced: None,
            lcm: None,
            max_block: None,
            outcome: GrowthOutcome::Kept,
        };
        if periodic {
            point.outcome = GrowthOutcome::AfterPeriodic;
            series.push(point);
            continue;
        }
        if p == 0 || p > limit {
            point.outcome = GrowthOutcome::BeyondRadius;
            series.push(point);
            continue;
        }
        let sk = witness.skeleton(p)?;
        if sk.is_empty() {
            point.outcome = GrowthOutcome::EmptySkeleton;
            series.push(point);
            continue;
        }
        let k = reduce_in(witness, p)?.k;
        point.reduced = Some(k);
        let q = acc.lcm(&k);
        if q > limit {
            point.outcome = GrowthOutcome::BeyondRadius;
            series.push(point);
            continue;
        }
        acc = q;
        chain.push(k);
        point.lcm = Some(q);
        let sk_q = witness.skeleton(q)?;
        let m = sk_q.max_block();
        point.max_block = Some(m);
        if entries.last().is_some_and(|e| e.period == q) {
            point.outcome = GrowthOutcome::SamePeriod;
        } else if !is_essential(&sk_q) {
            point.outcome = GrowthOutcome::NotEssential;
        } else if entries.last().is_some_and(|e| m <= e.max_block) {
            point.outcome = GrowthOutcome::NoGrowth;
        } else {
            entries.push(StructureEntry {
                period: q,
                max_block: m,
                raw: p,
                reduced: k,
                lcm_chain: chain.clone(),
            });
            periodic = m.is_infinite();
        }
        series.push(point);
    }

    let finite = entries.iter().filter(|e| !e.max_block.is_infinite()).count();
    let report = GrowthReport {
        radius: witness.radius(),
        series,
        periodic,
        growth_witnessed: finite >= 2,
    };
    if entries.is_empty() || (!periodic && entries.len() < 2) {
        return Err(PeriodError::NoGrowthEvidence(Box::new(report)));
    }
    Ok(PeriodicStructure { entries, report })
}

/// Offsets `t` (mod `p`) with `y(k) = x(k + t)` wherever `k + t` lies in the
/// witnessed `p`-skeleton of `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Alignment {
    pub period: usize,
    pub offsets: Vec<usize>,
    /// Whether the `p`-skeleton of `x` is essential; then at most one offset
    /// is expected.
    pub essential: bool,
    /// For each offset, whether the witnessed `p`-skeleton of `y` equals the
    /// shifted skeleton of `x` exactly.
    pub skeletons_match: Vec<bool>,
}

impl Alignment {
    pub fn unique(&self) -> Option<usize> {
        match self.offsets.as_slice() {
            [t] => Some(*t),
            _ => None,
        }
    }
}

pub fn skeleton_align(
    x: &SequenceRule,
    y: &SequenceRule,
    p: usize,
    radius: u64,
) -> Result<Alignment, PeriodError> {
    let sk_x = skeleton(x, p, radius)?;
    let y_witness = Witness::new(y, radius)?;
    align_in(&sk_x, &y_witness)
}

pub(crate) fn align_offsets(sk_x: &SkeletonMap, y: &Window) -> Vec<usize> {
    let p = sk_x.period();
    (0..p)
        .filter(|&t| {
            y.positions()
                .all(|(k, s)| sk_x.at(k + t as i64).is_none_or(|v| v == s))
        })
        .collect()
}

pub(crate) fn align_in(sk_x: &SkeletonMap, y: &Witness) -> Result<Alignment, PeriodError> {
    let p = sk_x.period();
    if sk_x.is_empty() {
        return Err(PeriodError::EmptySkeleton { period: p });
    }
    let offsets = align_offsets(sk_x, y.window());
    if offsets.is_empty() {
        return Err(PeriodError::NotFound { period: p });
    }
    let sk_y = y.skeleton(p)?;
    let skeletons_match = offsets
        .iter()
        .map(|&t| sk_x.shifted(t as i64).same_map(&sk_y))
        .collect();
    Ok(Alignment {
        period: p,
        offsets,
        essential: is_essential(sk_x),
        skeletons_match,
    })
}

/// One row of the per-period analysis table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodRow {
    pub period: usize,
    pub domain_size: usize,
    pub domain_mask: String,
    pub assignment: Vec<Option<String>>,
    pub max_block: MpValue,
    pub essential: bool,
    pub reduced: Option<usize>,
}

pub fn period_table(x: &SequenceRule, period_cap: usize, radius: u64) -> Result<Vec<PeriodRow>, PeriodError> {
    let witness = Witness::new(x, radius)?;
    (1..=period_cap)
        .map(|p| {
            let sk = witness.skeleton(p)?;
            let reduced = if sk.is_empty() { None } else { Some(reduce_in(&witness, p)?.k) };
            Ok(PeriodRow {
                period: p,
                domain_size: sk.domain_len(),
                domain_mask: sk.domain_mask(),
                assignment: sk
                    .assignment()
                    .iter()
                    .map(|s| s.map(|s| x.alphabet().label(s).to_owned()))
                    .collect(),
                max_block: sk.max_block(),
                essential: is_essential(&sk),
                reduced,
            })
        })
        .collect()
}
