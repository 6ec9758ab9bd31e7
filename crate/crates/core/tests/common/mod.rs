//! Rule generators shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use toeplitz_core::period::exact_skeleton;
use toeplitz_core::skeleton::Evidence;
use toeplitz_core::{Alphabet, SequenceRule, SkeletonMap, Stage, SymbolId};

pub fn alphabet(size: usize) -> Arc<Alphabet> {
    let labels = ["a", "b", "c", "d"];
    Arc::new(Alphabet::new(labels[..size].iter().copied()).unwrap())
}

pub fn sym(i: u16) -> SymbolId {
    SymbolId(i)
}

fn random_symbol(rng: &mut impl Rng, k: usize) -> SymbolId {
    SymbolId(rng.gen_range(0..k) as u16)
}

pub fn random_periodic(rng: &mut impl Rng, k: usize) -> SequenceRule {
    let len = rng.gen_range(1..=12);
    let pattern = (0..len).map(|_| random_symbol(rng, k)).collect();
    SequenceRule::periodic(alphabet(k), pattern).unwrap()
}

/// A fill from random stages, closed by a stage of period 1.
pub fn random_stage_fill(rng: &mut impl Rng, k: usize) -> SequenceRule {
    const PERIODS: [usize; 11] = [2, 3, 4, 5, 6, 8, 9, 12, 16, 24, 32];
    let count = rng.gen_range(1..=5);
    let mut stages: Vec<Stage> = (0..count)
        .map(|_| {
            let period = *PERIODS.choose(rng).unwrap();
            Stage {
                period,
                residue: rng.gen_range(0..period),
                symbol: random_symbol(rng, k),
            }
        })
        .collect();
    stages.push(Stage {
        period: 1,
        residue: 0,
        symbol: random_symbol(rng, k),
    });
    SequenceRule::toeplitz_fill(alphabet(k), stages).unwrap()
}

/// Substitution with every image of length 2 to 4, so that the fixed point
/// grows geometrically.
pub fn random_substitution(rng: &mut impl Rng, k: usize) -> SequenceRule {
    let seed = random_symbol(rng, k);
    let left = random_symbol(rng, k);
    let rules = (0..k)
        .map(|s| {
            let len = rng.gen_range(2..=4);
            let mut image: Vec<SymbolId> = (0..len).map(|_| random_symbol(rng, k)).collect();
            if s == seed.index() {
                image[0] = seed;
            }
            if s == left.index() {
                image[len - 1] = left;
            }
            image
        })
        .collect();
    SequenceRule::substitution(alphabet(k), rules, seed, left).unwrap()
}

fn random_skeleton(rng: &mut impl Rng, k: usize) -> SkeletonMap {
    let period = rng.gen_range(1..=12);
    let assignment = (0..period)
        .map(|_| rng.gen_bool(0.5).then(|| random_symbol(rng, k)))
        .collect();
    SkeletonMap::new(assignment, Evidence::Constructed)
}

fn random_leaf(rng: &mut impl Rng, k: usize) -> SequenceRule {
    match rng.gen_range(0..5) {
        0 => SequenceRule::constant(alphabet(k), random_symbol(rng, k)).unwrap(),
        1 => random_periodic(rng, k),
        2 => random_stage_fill(rng, k),
        3 => random_substitution(rng, k),
        _ => {
            let depth = rng.gen_range(3..=7);
            toeplitz_by_bases(rng, k.max(2), depth).0
        }
    }
}

/// Mixed kinds over an alphabet of 1 to 4 symbols.
pub fn random_rule(rng: &mut impl Rng) -> SequenceRule {
    let k = rng.gen_range(1..=4);
    match rng.gen_range(0..8) {
        0..=4 => random_leaf(rng, k),
        5 => random_leaf(rng, k).shift(rng.gen_range(-1000..=1000)),
        _ => {
            let skeletons = (0..rng.gen_range(1..=2)).map(|_| random_skeleton(rng, k)).collect();
            let filler = random_leaf(rng, k);
            SequenceRule::splice(skeletons, filler).unwrap()
        }
    }
}

/// Toeplitz fill with one hole per level: level `j` splits the previous hole
/// class into `b_j ∈ {2, 3}` classes, fills all but one and keeps that one
/// as the new hole. A final stage closes the last hole. Returns the rule and
/// the level periods `Q_1 < Q_2 < ...`. Symbols are redrawn until every hole
/// class below the last level is nonconstant.
pub fn toeplitz_by_bases(rng: &mut impl Rng, k: usize, depth: usize) -> (SequenceRule, Vec<usize>) {
    assert!(k >= 2);
    loop {
        let mut stages = Vec::new();
        let mut periods = Vec::new();
        let (mut q, mut hole) = (1usize, 0usize);
        for _ in 0..depth {
            let b = rng.gen_range(2..=3);
            let next = q * b;
            let keep = rng.gen_range(0..b);
            for i in 0..b {
                if i != keep {
                    stages.push(Stage {
                        period: next,
                        residue: hole + i * q,
                        symbol: random_symbol(rng, k),
                    });
                }
            }
            hole += keep * q;
            q = next;
            periods.push(q);
        }
        stages.push(Stage {
            period: q,
            residue: hole,
            symbol: random_symbol(rng, k),
        });
        let rule = SequenceRule::toeplitz_fill(alphabet(k), stages).unwrap();
        // every level below the last must leave exactly its hole class open
        let sharp = periods[..depth - 1].iter().all(|&q| {
            let sk = exact_skeleton(&rule, q).unwrap();
            sk.domain_len() == q - 1
        });
        if sharp {
            return (rule, periods);
        }
    }
}

/// Square of period doubling, `a -> abaa`, `b -> abab`, with `a` at 0 and
/// the given left seed at -1.
pub fn period_doubling(left: u16) -> SequenceRule {
    let w = |v: &[u16]| v.iter().map(|&i| SymbolId(i)).collect::<Vec<_>>();
    SequenceRule::substitution(alphabet(2), vec![w(&[0, 1, 0, 0]), w(&[0, 1, 0, 1])], sym(0), sym(left)).unwrap()
}

/// Dyadic fill: stage `j` fills `2^{j-1} - 1 mod 2^j` with alternating
/// symbols; the last stage closes the final hole.
pub fn dyadic_fill(depth: u32) -> SequenceRule {
    let mut stages: Vec<Stage> = (1..=depth)
        .map(|j| Stage {
            period: 1 << j,
            residue: (1 << (j - 1)) - 1,
            symbol: sym((j % 2) as u16),
        })
        .collect();
    stages.push(Stage {
        period: 1 << depth,
        residue: (1 << depth) - 1,
        symbol: sym(((depth + 1) % 2) as u16),
    });
    SequenceRule::toeplitz_fill(alphabet(2), stages).unwrap()
}
