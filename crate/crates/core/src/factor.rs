//! The factor map from the orbit closure of `x` onto the odometer of a
//! periodic structure `p_1 | p_2 | ...`.
//!
//! A point `y` gets the address `(j_1, j_2, ...)` where `j_i` is the unique
//! offset with `y(k) = x(k + j_i)` on the `p_i`-skeleton of `x`. Shifts of `x`
//! land on `from_integer(t)`, and `π ∘ S = g ∘ π`. The orbit closure is only
//! ever sampled; all verdicts concern the sample at the given radius.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::odometer::{Odometer, OdometerElement, OdometerError};
use crate::period::{align_offsets, is_essential, skeleton_of_window, PeriodError, PeriodicStructure, Witness};
use crate::sequence::{materialize, Alphabet, SequenceRule, Window};
use crate::skeleton::SkeletonMap;

/// An address is an odometer element over the structure's periods.
pub type SkeletonAddress = OdometerElement;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorError {
    #[error("the periodic structure has no levels")]
    EmptyStructure,
    #[error("level {level} (period {period}) is not essential")]
    NonEssential { level: usize, period: usize },
    #[error("no offset aligns level {level} (period {period})")]
    NoAddress { level: usize, period: usize },
    #[error("level {level} (period {period}) aligns at several offsets {offsets:?}")]
    Ambiguous {
        level: usize,
        period: usize,
        offsets: Vec<usize>,
    },
    #[error("offsets at levels {} and {} are not coherent", .levels.0, .levels.1)]
    Incoherent { levels: (usize, usize) },
    #[error("sample points must share the alphabet of x")]
    AlphabetMismatch,
    #[error(transparent)]
    Period(#[from] PeriodError),
    #[error(transparent)]
    Odometer(#[from] OdometerError),
}

/// `x`'s level skeletons, read once, plus the target odometer.
#[derive(Clone, Debug)]
pub struct FactorMap {
    radius: u64,
    skeletons: Vec<SkeletonMap>,
    odometer: Odometer,
    alphabet: Arc<Alphabet>,
}

impl FactorMap {
    pub fn new(x: &SequenceRule, ps: &PeriodicStructure, radius: u64) -> Result<Self, FactorError> {
        let witness = Witness::new(x, radius)?;
        Self::from_witness(&witness, &ps.periods(), x.alphabet().clone())
    }

    pub(crate) fn from_witness(
        witness: &Witness,
        periods: &[usize],
        alphabet: Arc<Alphabet>,
    ) -> Result<Self, FactorError> {
        if periods.is_empty() {
            return Err(FactorError::EmptyStructure);
        }
        let odometer = Odometer::from_moduli(periods.iter().map(|&p| p as u64).collect())?;
        let mut skeletons = Vec::with_capacity(periods.len());
        for (i, &p) in periods.iter().enumerate() {
            let sk = witness.skeleton(p)?;
            if !is_essential(&sk) {
                return Err(FactorError::NonEssential { level: i + 1, period: p });
            }
            skeletons.push(sk);
        }
        Ok(FactorMap {
            radius: witness.radius(),
            skeletons,
            odometer,
            alphabet,
        })
    }

    pub fn odometer(&self) -> &Odometer {
        &self.odometer
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    pub fn periods(&self) -> Vec<usize> {
        self.skeletons.iter().map(|s| s.period()).collect()
    }

    fn window_of(&self, y: &SequenceRule) -> Result<Window, FactorError> {
        if !y.same_alphabet_as(&self.alphabet) {
            return Err(FactorError::AlphabetMismatch);
        }
        let r = self.radius as i64;
        Ok(materialize(y, -r, r).map_err(PeriodError::from)?)
    }

    /// All aligning offsets per level, for a window of `y` on `[-radius, radius)`.
    pub fn level_offsets(&self, y: &Window) -> Vec<Vec<usize>> {
        self.skeletons.iter().map(|sk| align_offsets(sk, y)).collect()
    }

    pub fn address(&self, y: &SequenceRule) -> Result<SkeletonAddress, FactorError> {
        self.address_window(&self.window_of(y)?)
    }

    pub fn address_window(&self, y: &Window) -> Result<SkeletonAddress, FactorError> {
        let offsets = self.level_offsets(y);
        self.assemble(&offsets)
    }

    fn assemble(&self, offsets: &[Vec<usize>]) -> Result<SkeletonAddress, FactorError> {
        let mut coords = Vec::with_capacity(offsets.len());
        for (i, (found, sk)) in offsets.iter().zip(&self.skeletons).enumerate() {
            let period = sk.period();
            match found.as_slice() {
                [] => return Err(FactorError::NoAddress { level: i + 1, period }),
                [j] => coords.push(*j as u64),
                many => {
                    return Err(FactorError::Ambiguous {
                        level: i + 1,
                        period,
                        offsets: many.to_vec(),
                    })
                }
            }
        }
        for i in 1..coords.len() {
            let below = self.skeletons[i - 1].period() as u64;
            if coords[i] % below != coords[i - 1] {
                return Err(FactorError::Incoherent { levels: (i, i + 1) });
            }
        }
        Ok(self.odometer.from_coords(&coords)?)
    }
}

impl SequenceRule {
    fn same_alphabet_as(&self, alphabet: &Arc<Alphabet>) -> bool {
        Arc::ptr_eq(self.alphabet(), alphabet) || **self.alphabet() == **alphabet
    }
}

/// Named points standing in for the orbit closure of `x`.
#[derive(Clone, Debug, Default)]
pub struct OrbitSample {
    points: Vec<(String, SequenceRule)>,
}

impl OrbitSample {
    pub fn new() -> Self {
        Self::default()
    }

    /// `S^t x` for `|t| ≤ t_max`, labelled `S^t`.
    pub fn shifts(x: &SequenceRule, t_max: u64) -> Self {
        let t = t_max as i64;
        OrbitSample {
            points: (-t..=t).map(|t| (format!("S^{t}"), x.shift(t))).collect(),
        }
    }

    pub fn push(&mut self, label: impl Into<String>, y: SequenceRule) -> Result<(), FactorError> {
        if let Some((_, first)) = self.points.first() {
            if !y.same_alphabet(first) {
                return Err(FactorError::AlphabetMismatch);
            }
        }
        self.points.push((label.into(), y));
        Ok(())
    }

    pub fn points(&self) -> &[(String, SequenceRule)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftCheck {
    pub t: i64,
    pub expected: OdometerElement,
    pub address: Option<OdometerElement>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemiconjugacyVerdict {
    pub periods: Vec<usize>,
    pub t_max: u64,
    pub radius: u64,
    /// `address(S^t x) ≠ from_integer(t)` or no address.
    pub address_failures: Vec<ShiftCheck>,
    /// `t` with `address(S^{t+1} x) ≠ step(address(S^t x))`.
    pub step_failures: Vec<i64>,
    pub checked: usize,
}

impl SemiconjugacyVerdict {
    pub fn passed(&self) -> bool {
        self.address_failures.is_empty() && self.step_failures.is_empty()
    }
}

/// Checks `address(S^t x) = from_integer(t)` for `|t| ≤ t_max + 1` and
/// `address(S^{t+1} x) = step(address(S^t x))` for `|t| ≤ t_max`.
pub fn verify_semiconjugacy(
    x: &SequenceRule,
    ps: &PeriodicStructure,
    t_max: u64,
    radius: u64,
) -> Result<SemiconjugacyVerdict, FactorError> {
    let witness = Witness::new(x, radius)?;
    let map = FactorMap::from_witness(&witness, &ps.periods(), x.alphabet().clone())?;
    let r = radius as i64;
    let t = t_max as i64;
    // one window of x serves every shift
    let wide = materialize(x, -r - t, r + t + 1).map_err(PeriodError::from)?;
    let od = map.odometer();

    let mut addresses = BTreeMap::new();
    let mut address_failures = Vec::new();
    for s in -t..=t + 1 {
        let view = wide.slice(s - r, s + r).unwrap().reindexed(-r);
        let expected = od.from_integer(s);
        let check = match map.address_window(&view) {
            Ok(a) if a == expected => {
                addresses.insert(s, a);
                continue;
            }
            Ok(a) => {
                addresses.insert(s, a.clone());
                ShiftCheck { t: s, expected, address: Some(a), error: None }
            }
            Err(e) => ShiftCheck {
                t: s,
                expected,
                address: None,
                error: Some(e.to_string()),
            },
        };
        address_failures.push(check);
    }
    let step_failures = (-t..=t)
        .filter(|s| match (addresses.get(s), addresses.get(&(s + 1))) {
            (Some(a), Some(b)) => a.step() != *b,
            _ => true,
        })
        .collect();
    Ok(SemiconjugacyVerdict {
        periods: map.periods(),
        t_max,
        radius,
        address_failures,
        step_failures,
        checked: (2 * t + 2) as usize,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelPartition {
    pub level: usize,
    pub period: usize,
    pub points: usize,
    /// Points with exactly one offset at this level.
    pub assigned: usize,
    /// Sizes of the nonempty classes, keyed by `j`.
    pub classes: BTreeMap<usize, usize>,
    /// `S` moves every assigned point from class `j` to class `j + 1`.
    pub shift_moves_class: bool,
    /// Offsets agree with the previous level modulo its period.
    pub nested: bool,
    pub failures: Vec<String>,
}

impl LevelPartition {
    pub fn passed(&self) -> bool {
        self.assigned == self.points && self.shift_moves_class && self.nested
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    pub radius: u64,
    pub levels: Vec<LevelPartition>,
}

impl PartitionReport {
    pub fn passed(&self) -> bool {
        self.levels.iter().all(|l| l.passed())
    }
}

/// Checks per level that the classes `A^i_j` partition the sample, that `S`
/// maps class `j` into class `j + 1`, and that classes nest across levels.
pub fn verify_lemma5(
    x: &SequenceRule,
    ps: &PeriodicStructure,
    sample: &OrbitSample,
    radius: u64,
) -> Result<PartitionReport, FactorError> {
    let map = FactorMap::new(x, ps, radius)?;
    let periods = map.periods();
    let mut levels: Vec<LevelPartition> = periods
        .iter()
        .enumerate()
        .map(|(i, &p)| LevelPartition {
            level: i + 1,
            period: p,
            points: sample.len(),
            assigned: 0,
            classes: BTreeMap::new(),
            shift_moves_class: true,
            nested: true,
            failures: Vec::new(),
        })
        .collect();

    for (label, y) in sample.points() {
        let here = map.level_offsets(&map.window_of(y)?);
        let next = map.level_offsets(&map.window_of(&y.shift(1))?);
        for (i, level) in levels.iter_mut().enumerate() {
            let p = level.period;
            let [j] = here[i].as_slice() else {
                level
                    .failures
                    .push(format!("{label}: offsets {:?}", here[i]));
                continue;
            };
            level.assigned += 1;
            *level.classes.entry(*j).or_default() += 1;
            if next[i].as_slice() != [(j + 1) % p] {
                level.shift_moves_class = false;
                level
                    .failures
                    .push(format!("{label}: class {j}, shifted point in {:?}", next[i]));
            }
            if i > 0 {
                if let [below] = here[i - 1].as_slice() {
                    if j % periods[i - 1] != *below {
                        level.nested = false;
                        level
                            .failures
                            .push(format!("{label}: class {j} not inside class {below} below"));
                    }
                }
            }
        }
    }
    Ok(PartitionReport { radius, levels })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FiberVerdict {
    /// Several sample points share the address.
    NonSingleton,
    /// Alone in its group with no witnessed aperiodic position.
    ConsistentWithToeplitz,
    /// Alone in its group but with witnessed aperiodic positions.
    Undetermined { aperiodic: Vec<i64> },
}

impl FiberVerdict {
    pub fn describe(&self) -> &'static str {
        match self {
            FiberVerdict::NonSingleton => "non-singleton fiber",
            FiberVerdict::ConsistentWithToeplitz => "consistent with Toeplitz",
            FiberVerdict::Undetermined { .. } => "singleton, aperiodic positions witnessed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberGroup {
    pub address: OdometerElement,
    pub members: Vec<String>,
    /// Members with pairwise different windows. Equal windows count once.
    pub distinct: usize,
    /// Window positions where some member differs from the first one, at
    /// most [`DISAGREEMENT_LIMIT`] of them.
    pub disagreements: Vec<i64>,
    pub disagreement_count: usize,
    pub verdict: FiberVerdict,
}

pub const DISAGREEMENT_LIMIT: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub radius: u64,
    /// Largest period searched for aperiodic positions.
    pub period_cap: usize,
    pub groups: Vec<FiberGroup>,
    pub unaddressed: Vec<(String, String)>,
    pub note: &'static str,
}

impl FiberReport {
    pub fn group_of(&self, label: &str) -> Option<&FiberGroup> {
        self.groups.iter().find(|g| g.members.iter().any(|m| m == label))
    }
}

/// Groups the sample by address. Evidence only: a finite sample says
/// nothing about fibers it does not meet.
pub fn fiber_report(
    x: &SequenceRule,
    ps: &PeriodicStructure,
    sample: &OrbitSample,
    radius: u64,
) -> Result<FiberReport, FactorError> {
    let map = FactorMap::new(x, ps, radius)?;
    let periods = map.periods();
    let period_cap = (*periods.iter().max().unwrap()).min((radius / 2) as usize);

    let mut by_address: BTreeMap<u64, (OdometerElement, Vec<usize>)> = BTreeMap::new();
    let mut windows = Vec::new();
    let mut unaddressed = Vec::new();
    for (i, (label, y)) in sample.points().iter().enumerate() {
        let w = map.window_of(y)?;
        match map.address_window(&w) {
            Ok(a) => by_address.entry(a.top()).or_insert((a, Vec::new())).1.push(i),
            Err(e) => unaddressed.push((label.clone(), e.to_string())),
        }
        windows.push(w);
    }

    let groups = by_address
        .into_values()
        .map(|(address, idx)| {
            let first = &windows[idx[0]];
            let differing: Vec<i64> = first
                .positions()
                .filter(|&(n, s)| idx[1..].iter().any(|&j| windows[j].get(n) != Some(s)))
                .map(|(n, _)| n)
                .collect();
            let mut distinct: Vec<usize> = Vec::new();
            for &i in &idx {
                if !distinct.iter().any(|&j| windows[j].values() == windows[i].values()) {
                    distinct.push(i);
                }
            }
            let verdict = if distinct.len() > 1 {
                FiberVerdict::NonSingleton
            } else {
                let aperiodic = aperiodic_witnessed(first, &periods, period_cap);
                if aperiodic.is_empty() {
                    FiberVerdict::ConsistentWithToeplitz
                } else {
                    FiberVerdict::Undetermined {
                        aperiodic: aperiodic.into_iter().take(DISAGREEMENT_LIMIT).collect(),
                    }
                }
            };
            FiberGroup {
                address,
                members: idx.iter().map(|&i| sample.points()[i].0.clone()).collect(),
                distinct: distinct.len(),
                disagreement_count: differing.len(),
                disagreements: differing.into_iter().take(DISAGREEMENT_LIMIT).collect(),
                verdict,
            }
        })
        .collect();

    Ok(FiberReport {
        radius,
        period_cap,
        groups,
        unaddressed,
        note: "evidence from a finite sample at a finite radius, not a proof",
    })
}

/// Window positions lying in no witnessed `p`-skeleton, `p ≤ cap`. A class
/// counts as periodic once it has two samples in the window, all equal. The
/// structure periods are tried first.
fn aperiodic_witnessed(w: &Window, periods: &[usize], cap: usize) -> Vec<i64> {
    let mut open: Vec<i64> = w.positions().map(|(n, _)| n).collect();
    let first = periods.iter().copied().filter(|&p| p <= cap);
    let rest = (1..=cap).filter(|p| !periods.contains(p));
    for p in first.chain(rest) {
        if open.is_empty() {
            break;
        }
        let sk = skeleton_of_window(w, p, w.len() as u64 / 2);
        open.retain(|&n| !sk.contains(n));
    }
    open
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{assemble_eta, refine_growth};
    use crate::period::build_periodic_structure;
    use crate::sequence::{Stage, SymbolId};
    use crate::skeleton::MpValue;

    fn ab() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(["a", "b"]).unwrap())
    }

    fn abc_fill() -> SequenceRule {
        let abc = Arc::new(Alphabet::new(["a", "b", "c"]).unwrap());
        let st = |period, residue, symbol| Stage { period, residue, symbol: SymbolId(symbol) };
        SequenceRule::toeplitz_fill(abc, vec![st(2, 0, 0), st(4, 1, 1), st(4, 3, 2)]).unwrap()
    }

    fn dyadic_fill(depth: u32) -> SequenceRule {
        let mut stages: Vec<Stage> = (1..=depth)
            .map(|j| Stage {
                period: 1 << j,
                residue: (1 << (j - 1)) - 1,
                symbol: SymbolId((j % 2) as u16),
            })
            .collect();
        stages.push(Stage {
            period: 1 << depth,
            residue: (1 << depth) - 1,
            symbol: SymbolId(((depth + 1) % 2) as u16),
        });
        SequenceRule::toeplitz_fill(ab(), stages).unwrap()
    }

    /// Square of period doubling, `a -> abaa`, `b -> abab`.
    fn period_doubling(left: u16) -> SequenceRule {
        let w = |v: &[u16]| v.iter().map(|&i| SymbolId(i)).collect::<Vec<_>>();
        SequenceRule::substitution(ab(), vec![w(&[0, 1, 0, 0]), w(&[0, 1, 0, 1])], SymbolId(0), SymbolId(left))
            .unwrap()
    }

    fn structure(x: &SequenceRule, cap: usize, radius: u64) -> PeriodicStructure {
        let candidates: Vec<usize> = (1..=cap).collect();
        build_periodic_structure(x, &candidates, radius).unwrap()
    }

    #[test]
    fn shifts_land_on_from_integer() {
        let x = abc_fill();
        let ps = structure(&x, 8, 64);
        assert_eq!(ps.periods(), vec![2, 4]);
        let map = FactorMap::new(&x, &ps, 64).unwrap();
        assert_eq!(map.address(&x).unwrap().coords(), vec![0, 0]);
        for t in -9..=9 {
            assert_eq!(map.address(&x.shift(t)).unwrap(), map.odometer().from_integer(t));
        }
    }

    #[test]
    fn semiconjugacy_examples() {
        let x = abc_fill();
        let ps = structure(&x, 8, 64);
        let v = verify_semiconjugacy(&x, &ps, 8, 64).unwrap();
        assert!(v.passed(), "{v:?}");
        assert_eq!(v.checked, 18);

        // periodic point: rotation of Z_2
        let ab_rule = SequenceRule::periodic(ab(), vec![SymbolId(0), SymbolId(1)]).unwrap();
        let ps = structure(&ab_rule, 4, 32);
        assert_eq!(ps.periods(), vec![2]);
        let map = FactorMap::new(&ab_rule, &ps, 32).unwrap();
        assert_eq!(map.address(&ab_rule).unwrap().coords(), vec![0]);
        assert_eq!(map.address(&ab_rule.shift(1)).unwrap().coords(), vec![1]);
        assert!(verify_semiconjugacy(&ab_rule, &ps, 4, 32).unwrap().passed());
    }

    #[test]
    fn rejects_non_essential_levels() {
        let ab_rule = SequenceRule::periodic(ab(), vec![SymbolId(0), SymbolId(1)]).unwrap();
        let ps = PeriodicStructure::from_levels(&[(4, MpValue::Infinite)]).unwrap();
        assert_eq!(
            FactorMap::new(&ab_rule, &ps, 32).unwrap_err(),
            FactorError::NonEssential { level: 1, period: 4 }
        );
    }

    #[test]
    fn unrelated_point_has_no_address() {
        let x = dyadic_fill(4);
        let ps = structure(&x, 16, 64);
        let map = FactorMap::new(&x, &ps, 64).unwrap();
        // abab... has period 2, so at level 2 two offsets fit
        let alt = SequenceRule::periodic(ab(), vec![SymbolId(0), SymbolId(1)]).unwrap();
        assert_eq!(
            map.address(&alt),
            Err(FactorError::Ambiguous { level: 2, period: 4, offsets: vec![1, 3] })
        );
        let block = SequenceRule::periodic(ab(), vec![SymbolId(0), SymbolId(0), SymbolId(1), SymbolId(1)]).unwrap();
        assert!(matches!(map.address(&block), Err(FactorError::NoAddress { .. })));
        // a constant point aligns two ways at level 1
        let constant = SequenceRule::constant(ab(), SymbolId(1)).unwrap();
        assert!(matches!(map.address(&constant), Err(FactorError::Ambiguous { level: 1, .. })));
    }

    #[test]
    fn partition_on_shift_samples() {
        let x = dyadic_fill(5);
        let ps = structure(&x, 32, 256);
        let sample = OrbitSample::shifts(&x, 6);
        let rep = verify_lemma5(&x, &ps, &sample, 256).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let first = &rep.levels[0];
        assert_eq!(first.period, 2);
        // t = -6..=6: seven even shifts, six odd ones
        assert_eq!(first.classes, BTreeMap::from([(0, 7), (1, 6)]));

        let mut single = OrbitSample::new();
        single.push("x", x.clone()).unwrap();
        let rep = verify_lemma5(&x, &ps, &single, 256).unwrap();
        assert!(rep.passed());
        assert!(rep.levels.iter().all(|l| l.classes == BTreeMap::from([(0, 1)])));
    }

    #[test]
    fn eta_address_is_last_shift() {
        let x = dyadic_fill(7).shift(5);
        let ps = structure(&x, 64, 1024);
        let chain = refine_growth(&ps).unwrap();
        let eta = assemble_eta(&x, &chain, 1024).unwrap();
        let map = FactorMap::new(&x, &ps, 1024).unwrap();
        let a = map.address(&eta.eta).unwrap();
        let k_last = *eta.shifts().last().unwrap();
        assert_eq!(a, map.odometer().from_integer(k_last));
        for (l, level) in eta.levels.iter().enumerate() {
            let q = level.period;
            let coord = ps.periods().iter().position(|&p| p == q).unwrap() + 1;
            assert_eq!(a.coord(coord) as i64, level.shift.rem_euclid(q as i64), "level {l}");
        }
    }

    #[test]
    fn fiber_pair_from_period_doubling() {
        let x = period_doubling(0);
        let y = period_doubling(1);
        let diff: Vec<i64> = (-64..64).filter(|&n| x.eval(n) != y.eval(n)).collect();
        assert_eq!(diff, vec![-1]);
        let ps = structure(&x, 32, 256);
        assert_eq!(ps.periods(), vec![2, 4, 8, 16, 32]);
        let mut sample = OrbitSample::new();
        sample.push("x", x.clone()).unwrap();
        sample.push("y", y).unwrap();
        sample.push("Sx", x.shift(1)).unwrap();
        let rep = fiber_report(&x, &ps, &sample, 256).unwrap();
        let g = rep.group_of("x").unwrap();
        assert_eq!(g.members, vec!["x", "y"]);
        assert_eq!(g.disagreements, vec![-1]);
        assert_eq!(g.verdict, FiberVerdict::NonSingleton);
        assert_eq!(g.address.coords(), vec![0; 5]);
        // S x: -2 and every position needing a period above 32
        match &rep.group_of("Sx").unwrap().verdict {
            FiberVerdict::Undetermined { aperiodic } => {
                assert!(aperiodic.contains(&-2));
                assert!(aperiodic.iter().all(|n| n.rem_euclid(32) == 30));
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn toeplitz_shifts_are_singletons() {
        let x = dyadic_fill(4);
        let ps = structure(&x, 16, 128);
        let rep = fiber_report(&x, &ps, &OrbitSample::shifts(&x, 5), 128).unwrap();
        assert_eq!(rep.groups.len(), 11);
        assert!(rep.unaddressed.is_empty());
        for g in &rep.groups {
            assert_eq!(g.verdict, FiberVerdict::ConsistentWithToeplitz);
            assert_eq!(g.verdict.describe(), "consistent with Toeplitz");
        }
    }

    #[test]
    fn periodic_at_counts_samples() {
        let x = SequenceRule::periodic(ab(), vec![SymbolId(0), SymbolId(1)]).unwrap();
        let w = materialize(&x, -4, 4).unwrap();
        let periodic_at = |w: &Window, n, p| skeleton_of_window(w, p, 4).contains(n);
        assert!(periodic_at(&w, 0, 2));
        assert!(!periodic_at(&w, 0, 3));
        assert!(!periodic_at(&w, 0, 5));
        assert!(periodic_at(&w, 1, 4));
    }
}
