//! Construction of a Toeplitz sequence `η` in the orbit closure of a point
//! whose periodic structure has unbounded `M`.
//!
//! The chain of periods `q_1 | q_2 | ...` is thinned until
//! `M_{q_{i+1}} ≥ 3 q_i + M_{q_i}`. At each level an anchor block
//! `[m_i, m_i + M_i)` inside the `q_i`-skeleton is located, an aligned copy
//! `s_i ≡ m_i (mod q_i)` of it is placed inside the next anchor block with at
//! least `q_i` symbols of margin on both sides, and the shifts
//! `k_j = m_1 + Σ_{i<j} (s_i - m_i)` are accumulated. `η` takes the value
//! `x(n + k_l)` on `P_l = Per_{q_l}(x) - k_l`; the sets `P_l` agree on
//! overlaps and the guaranteed interval around 0 grows by `2 q_l` per level.

use serde::Serialize;
use thiserror::Error;

use crate::period::{self, aperiodic_in, PeriodError, PeriodicStructure, Witness};
use crate::sequence::{materialize, recurrence_gaps, Recurrence, SequenceError, SequenceRule, Window};
use crate::skeleton::{MpValue, SkeletonMap};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error("no growth chain of length 2 satisfies M_next >= 3 q + M (best margins {margins:?})")]
    InsufficientGrowth { margins: Vec<(usize, i64)> },
    #[error("level {level}: period {next} does not extend {period} with the required margin")]
    BadChain { level: usize, period: usize, next: usize },
    #[error("the {period}-skeleton is full; a periodic level has no anchor")]
    PeriodicLevel { period: usize },
    #[error("no block of length {length} in the {period}-skeleton within radius {radius}")]
    AnchorNotFound { period: usize, length: u64, radius: u64 },
    #[error("offset interval [{lo}, {hi}] holds no residue {residue} mod {period}")]
    EmptyOffsetInterval { lo: i64, hi: i64, residue: i64, period: usize },
    #[error("shift k_{j} - k_{l} is not a multiple of q_{l} = {period}")]
    ShiftDivisibility { l: usize, j: usize, period: usize },
    #[error("levels {levels:?} disagree on eta({position}); witnessed skeletons are spurious at this radius")]
    ConsistencyViolation { position: i64, levels: Vec<usize> },
    #[error("position {position} lies in no P_l of the {levels} levels; guaranteed coverage is [{lo}, {hi}]")]
    CoverageGap { position: i64, levels: usize, lo: i64, hi: i64 },
    #[error("P_{level} is not inside the witnessed {period}-skeleton of eta")]
    InclusionFailed { level: usize, period: usize },
    #[error(transparent)]
    Period(#[from] PeriodError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// A sub-chain of a periodic structure with `M_{i+1} ≥ 3 q_i + M_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthChain {
    levels: Vec<(usize, u64)>,
}

impl GrowthChain {
    /// Checks divisibility and the growth margin between consecutive levels.
    pub fn new(levels: Vec<(usize, u64)>) -> Result<Self, BuildError> {
        if levels.is_empty() || levels[0].0 == 0 {
            return Err(BuildError::InsufficientGrowth { margins: Vec::new() });
        }
        for (i, w) in levels.windows(2).enumerate() {
            let ((q, m), (q2, m2)) = (w[0], w[1]);
            if q2 % q != 0 || q2 <= q || m2 < 3 * q as u64 + m {
                return Err(BuildError::BadChain {
                    level: i + 1,
                    period: q,
                    next: q2,
                });
            }
        }
        Ok(GrowthChain { levels })
    }

    pub fn levels(&self) -> &[(usize, u64)] {
        &self.levels
    }

    pub fn periods(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.0).collect()
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// Greedy thinning: keep the first finite level, then every level whose `M`
/// clears `3 q + M` of the last kept one.
pub fn refine_growth(ps: &PeriodicStructure) -> Result<GrowthChain, BuildError> {
    let finite: Vec<(usize, u64)> = ps
        .entries
        .iter()
        .filter_map(|e| e.max_block.finite().map(|m| (e.period, m)))
        .collect();
    let Some(&first) = finite.first() else {
        return Err(BuildError::InsufficientGrowth { margins: Vec::new() });
    };
    let mut kept = vec![first];
    let mut margins = Vec::new();
    for &(q, m) in &finite[1..] {
        let (lq, lm) = *kept.last().unwrap();
        let margin = m as i64 - (3 * lq as i64 + lm as i64);
        margins.push((q, margin));
        if margin >= 0 {
            kept.push((q, m));
        }
    }
    if kept.len() < 2 {
        return Err(BuildError::InsufficientGrowth { margins });
    }
    GrowthChain::new(kept)
}

/// The anchor `m` nearest 0 (ties to `m ≥ 0`) with `[m, m + length)` inside
/// the skeleton.
pub fn anchor_in(sk: &SkeletonMap, length: MpValue, radius: u64) -> Result<i64, BuildError> {
    let MpValue::Finite(length) = length else {
        return Err(BuildError::PeriodicLevel { period: sk.period() });
    };
    if sk.is_full() {
        return Err(BuildError::PeriodicLevel { period: sk.period() });
    }
    let starts = sk.run_starts(length);
    let q = sk.period() as i64;
    let hit = |m: i64| starts.contains(&(m.rem_euclid(q) as usize));
    let r = radius as i64;
    (0..=r)
        .flat_map(|d| [d, -d])
        .find(|&m| hit(m))
        .ok_or(BuildError::AnchorNotFound {
            period: sk.period(),
            length,
            radius,
        })
}

pub fn find_anchor(x: &SequenceRule, q: usize, length: MpValue, search_radius: u64) -> Result<i64, BuildError> {
    let sk = period::skeleton(x, q, search_radius)?;
    anchor_in(&sk, length, search_radius)
}

/// Placement of the level-`i` block inside the level-`i+1` anchor block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Offset {
    pub s: i64,
    pub d_left: i64,
    pub d_right: i64,
}

/// Least `s ≡ m (mod q)` in `[m_next + q, m_next + M_next - (q + M)]`.
pub fn choose_offset(m: i64, q: usize, len: u64, m_next: i64, len_next: u64) -> Result<Offset, BuildError> {
    let qi = q as i64;
    let lo = m_next + qi;
    let hi = m_next + len_next as i64 - (qi + len as i64);
    let s = lo + (m - lo).rem_euclid(qi);
    if s > hi {
        return Err(BuildError::EmptyOffsetInterval {
            lo,
            hi,
            residue: m.rem_euclid(qi),
            period: q,
        });
    }
    let d_left = s - m_next;
    let d_right = (m_next + len_next as i64) - (s + len as i64);
    debug_assert!(d_left >= qi && d_right >= qi);
    Ok(Offset { s, d_left, d_right })
}

/// Transcript of one construction level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelRecord {
    pub period: usize,
    pub max_block: u64,
    pub anchor: i64,
    /// Offset into the next level; absent on the last level.
    pub offset: Option<Offset>,
    pub shift: i64,
    /// Guaranteed interval `[lo, hi]` inside `P_l`.
    pub coverage: (i64, i64),
    /// Domain of `P_l` as a residue bit string mod `period`.
    pub domain_mask: String,
    /// `P_l` lies inside the witnessed `q_l`-skeleton of `eta`.
    pub included: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub divisibility: bool,
    pub consistency: bool,
    pub coverage: bool,
    pub inclusion: bool,
}

/// Full record of a construction and the resulting `η`.
#[derive(Clone, Debug, Serialize)]
pub struct EtaConstruction {
    pub chain: GrowthChain,
    pub levels: Vec<LevelRecord>,
    /// `P_1, ..., P_L` as skeletons of `η`.
    #[serde(skip)]
    pub pieces: Vec<SkeletonMap>,
    /// Half-open window on which `η` is certified.
    pub certified: (i64, i64),
    pub radius: u64,
    pub verdicts: Verdicts,
    /// `η`: the pieces spliced over `S^{k_L} x`. Outside `certified` the
    /// filler may show through; use [`EtaConstruction::eval_certified`].
    #[serde(skip)]
    pub eta: SequenceRule,
}

impl EtaConstruction {
    pub fn shifts(&self) -> Vec<i64> {
        self.levels.iter().map(|l| l.shift).collect()
    }

    pub fn anchors(&self) -> Vec<i64> {
        self.levels.iter().map(|l| l.anchor).collect()
    }

    pub fn eval_certified(&self, n: i64) -> Result<crate::sequence::SymbolId, BuildError> {
        let (lo, hi) = self.certified;
        if n < lo || n >= hi {
            let last = self.levels.last().unwrap();
            return Err(BuildError::CoverageGap {
                position: n,
                levels: self.levels.len(),
                lo: last.coverage.0,
                hi: last.coverage.1,
            });
        }
        Ok(self.eta.eval(n))
    }

    pub fn certified_window(&self) -> Result<Window, SequenceError> {
        materialize(&self.eta, self.certified.0, self.certified.1)
    }
}

pub fn assemble_eta(x: &SequenceRule, chain: &GrowthChain, search_radius: u64) -> Result<EtaConstruction, BuildError> {
    assemble_eta_covering(x, chain, search_radius, None)
}

/// As [`assemble_eta`], additionally requiring every position of `window`
/// (half-open) to lie in some `P_l`.
pub fn assemble_eta_covering(
    x: &SequenceRule,
    chain: &GrowthChain,
    search_radius: u64,
    window: Option<(i64, i64)>,
) -> Result<EtaConstruction, BuildError> {
    let witness = Witness::new(x, search_radius)?;
    let levels = chain.levels();
    let count = levels.len();

    let skeletons = levels
        .iter()
        .map(|&(q, _)| witness.skeleton(q))
        .collect::<Result<Vec<_>, _>>()?;
    let anchors = levels
        .iter()
        .zip(&skeletons)
        .map(|(&(_, m), sk)| anchor_in(sk, MpValue::Finite(m), search_radius))
        .collect::<Result<Vec<_>, _>>()?;
    let offsets = (0..count.saturating_sub(1))
        .map(|i| choose_offset(anchors[i], levels[i].0, levels[i].1, anchors[i + 1], levels[i + 1].1))
        .collect::<Result<Vec<_>, _>>()?;

    let mut shifts = vec![anchors[0]];
    for i in 1..count {
        shifts.push(shifts[i - 1] + (offsets[i - 1].s - anchors[i - 1]));
    }
    for l in 0..count {
        for j in l + 1..count {
            if (shifts[j] - shifts[l]).rem_euclid(levels[l].0 as i64) != 0 {
                return Err(BuildError::ShiftDivisibility { l: l + 1, j: j + 1, period: levels[l].0 });
            }
        }
    }

    let pieces: Vec<SkeletonMap> = skeletons.iter().zip(&shifts).map(|(sk, &k)| sk.shifted(k)).collect();

    let m1 = levels[0].1 as i64;
    let mut coverage = Vec::with_capacity(count);
    let mut spread = 0i64;
    for l in 0..count {
        let interval = (-spread, m1 - 1 + spread);
        let anchored = (anchors[l] - shifts[l], anchors[l] + levels[l].1 as i64 - 1 - shifts[l]);
        let inside = |(a, b): (i64, i64)| (a..=b).all(|n| pieces[l].contains(n));
        if !inside(interval) || !inside(anchored) {
            let n = (interval.0..=interval.1)
                .chain(anchored.0..=anchored.1)
                .find(|&n| !pieces[l].contains(n))
                .unwrap();
            return Err(BuildError::CoverageGap { position: n, levels: l + 1, lo: interval.0, hi: interval.1 });
        }
        coverage.push(interval);
        spread += levels[l].0 as i64;
    }
    let (lo, hi) = *coverage.last().unwrap();
    let certified = (lo, hi + 1);

    // Pointwise: each piece really carries the values of x it claims. Then
    // mutual agreement over one full top period holds on all of Z.
    for n in certified.0..certified.1 {
        check_position(x, &pieces, &shifts, n)?;
    }
    let top = levels[count - 1].0 as i64;
    for n in 0..top {
        let values: Vec<_> = pieces.iter().filter_map(|p| p.at(n)).collect();
        if values.windows(2).any(|w| w[0] != w[1]) {
            let involved = (0..count).filter(|&l| pieces[l].contains(n)).map(|l| l + 1).collect();
            return Err(BuildError::ConsistencyViolation { position: n, levels: involved });
        }
    }

    if let Some((a, b)) = window {
        if let Some(n) = (a..b).find(|&n| pieces.iter().all(|p| !p.contains(n))) {
            return Err(BuildError::CoverageGap { position: n, levels: count, lo, hi });
        }
        for n in a..b {
            check_position(x, &pieces, &shifts, n)?;
        }
    }

    let eta = SequenceRule::splice(pieces.clone(), x.shift(shifts[count - 1]))?;
    let eta_witness = Witness::new(&eta, search_radius)?;
    let mut records = Vec::with_capacity(count);
    for l in 0..count {
        let sk_eta = eta_witness.skeleton(levels[l].0)?;
        let included = pieces[l].domain().all(|r| sk_eta.get(r) == pieces[l].get(r));
        if !included {
            return Err(BuildError::InclusionFailed { level: l + 1, period: levels[l].0 });
        }
        records.push(LevelRecord {
            period: levels[l].0,
            max_block: levels[l].1,
            anchor: anchors[l],
            offset: offsets.get(l).copied(),
            shift: shifts[l],
            coverage: coverage[l],
            domain_mask: pieces[l].domain_mask(),
            included,
        });
    }

    Ok(EtaConstruction {
        chain: chain.clone(),
        levels: records,
        pieces,
        certified,
        radius: search_radius,
        verdicts: Verdicts {
            divisibility: true,
            consistency: true,
            coverage: true,
            inclusion: true,
        },
        eta,
    })
}

fn check_position(x: &SequenceRule, pieces: &[SkeletonMap], shifts: &[i64], n: i64) -> Result<(), BuildError> {
    let mut seen = None;
    for (l, p) in pieces.iter().enumerate() {
        let Some(v) = p.at(n) else { continue };
        let actual = x.eval(n + shifts[l]);
        if actual != v || seen.is_some_and(|s| s != v) {
            let involved = (0..pieces.len()).filter(|&i| pieces[i].contains(n)).map(|i| i + 1).collect();
            return Err(BuildError::ConsistencyViolation { position: n, levels: involved });
        }
        seen = Some(v);
    }
    Ok(())
}

/// Evidence that `η` is Toeplitz on its certified window, with recurrence
/// evidence for `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ToeplitzReport {
    pub period_cap: usize,
    pub radius: u64,
    /// Aperiodic positions of `η` (up to the cap) inside the certified window.
    pub aperiodic_in_certified: Vec<i64>,
    /// Count of aperiodic positions elsewhere in `[-radius, radius)`.
    pub aperiodic_elsewhere: usize,
    /// Per level: `P_l` inside the witnessed `q_l`-skeleton of `η`.
    pub inclusion: Vec<bool>,
    pub recurrence: Recurrence,
}

impl ToeplitzReport {
    pub fn toeplitz_on_certified(&self) -> bool {
        self.aperiodic_in_certified.is_empty() && self.inclusion.iter().all(|&b| b)
    }
}

pub fn toeplitz_report(x: &SequenceRule, construction: &EtaConstruction, radius: u64) -> Result<ToeplitzReport, BuildError> {
    let cap = *construction.chain.periods().iter().max().unwrap();
    let witness = Witness::new(&construction.eta, radius)?;
    let aperiodic = aperiodic_in(&witness, cap)?;
    let (lo, hi) = construction.certified;
    let (inside, outside): (Vec<i64>, Vec<i64>) = aperiodic.into_iter().partition(|&n| n >= lo && n < hi);
    let inclusion = construction
        .pieces
        .iter()
        .map(|p| {
            let sk = witness.skeleton(p.period())?;
            Ok(p.domain().all(|r| sk.get(r) == p.get(r)))
        })
        .collect::<Result<Vec<_>, BuildError>>()?;
    let block = construction.chain.levels()[0].1.clamp(1, 16) as i64;
    let recurrence = recurrence_gaps(x, 0, block, radius / 2)?;
    Ok(ToeplitzReport {
        period_cap: cap,
        radius,
        aperiodic_in_certified: inside,
        aperiodic_elsewhere: outside.len(),
        inclusion,
        recurrence,
    })
}
