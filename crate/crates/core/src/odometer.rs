//! The odometer over a regular sequence `n_1 | n_2 | ... | n_D`, truncated at
//! depth `D`.
//!
//! An element is a coherent vector `(a_1, ..., a_D)` with `a_i ∈ Z_{n_i}` and
//! `a_i = a_{i+1} mod n_i`. Coherence makes the top coordinate `a_D`
//! sufficient, so that is what is stored; every equality here holds at depth
//! `D`. Levels are 1-based throughout, matching coordinate indices.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OdometerError {
    #[error("moduli list is empty")]
    Empty,
    #[error("modulus {index} is zero")]
    ZeroModulus { index: usize },
    #[error("modulus {index} ({value}) is not a proper multiple of modulus {prev} ({prev_value})")]
    NotRegular {
        prev: usize,
        prev_value: u64,
        index: usize,
        value: u64,
    },
    #[error("elements come from different odometers")]
    ModuliMismatch,
    #[error("level {level} outside 1..={depth}")]
    BadLevel { level: usize, depth: usize },
    #[error("residue {residue} is not below modulus {modulus}")]
    BadResidue { residue: u64, modulus: u64 },
    #[error("vector has {got} coordinates, depth is {depth}")]
    WrongLength { got: usize, depth: usize },
    #[error("coordinates {level} and {next} are not coherent")]
    Incoherent { level: usize, next: usize },
    #[error("cannot parse element `{0}`")]
    Parse(String),
    #[error("enumerating {0} elements exceeds the limit")]
    TooLarge(u64),
}

/// `n_1 | n_2 | ... | n_D`, strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct RegularSequence(Vec<u64>);

impl RegularSequence {
    pub fn new(moduli: Vec<u64>) -> Result<Self, OdometerError> {
        if moduli.is_empty() {
            return Err(OdometerError::Empty);
        }
        for (i, &n) in moduli.iter().enumerate() {
            if n == 0 {
                return Err(OdometerError::ZeroModulus { index: i + 1 });
            }
            if i > 0 {
                let prev = moduli[i - 1];
                if n % prev != 0 || n == prev {
                    return Err(OdometerError::NotRegular {
                        prev: i,
                        prev_value: prev,
                        index: i + 1,
                        value: n,
                    });
                }
            }
        }
        Ok(RegularSequence(moduli))
    }

    pub fn moduli(&self) -> &[u64] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn top(&self) -> u64 {
        *self.0.last().unwrap()
    }

    pub fn truncate(&self, depth: usize) -> Result<Self, OdometerError> {
        if depth == 0 || depth > self.depth() {
            return Err(OdometerError::BadLevel {
                level: depth,
                depth: self.depth(),
            });
        }
        Ok(RegularSequence(self.0[..depth].to_vec()))
    }
}

/// Shared handle on a regular sequence; elements are made through it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Odometer {
    moduli: Arc<RegularSequence>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OdometerElement {
    moduli: Arc<RegularSequence>,
    top: u64,
}

impl Odometer {
    pub fn new(moduli: RegularSequence) -> Self {
        Odometer {
            moduli: Arc::new(moduli),
        }
    }

    pub fn from_moduli(moduli: Vec<u64>) -> Result<Self, OdometerError> {
        Ok(Odometer::new(RegularSequence::new(moduli)?))
    }

    pub fn moduli(&self) -> &RegularSequence {
        &self.moduli
    }

    pub fn depth(&self) -> usize {
        self.moduli.depth()
    }

    fn element(&self, top: u64) -> OdometerElement {
        OdometerElement {
            moduli: self.moduli.clone(),
            top,
        }
    }

    /// `k · e`, i.e. coordinates `k mod n_i`.
    pub fn from_integer(&self, k: i64) -> OdometerElement {
        let n = self.moduli.top() as i128;
        self.element((k as i128).rem_euclid(n) as u64)
    }

    pub fn zero(&self) -> OdometerElement {
        self.from_integer(0)
    }

    /// The generator `e = (1, 1, ...)`.
    pub fn generator(&self) -> OdometerElement {
        self.from_integer(1)
    }

    /// Element from a full coordinate vector, checking range and coherence.
    pub fn from_coords(&self, coords: &[u64]) -> Result<OdometerElement, OdometerError> {
        let m = self.moduli.moduli();
        if coords.len() != m.len() {
            return Err(OdometerError::WrongLength {
                got: coords.len(),
                depth: m.len(),
            });
        }
        for (i, (&a, &n)) in coords.iter().zip(m).enumerate() {
            if a >= n {
                return Err(OdometerError::BadResidue { residue: a, modulus: n });
            }
            if i + 1 < coords.len() && coords[i + 1] % n != a {
                return Err(OdometerError::Incoherent {
                    level: i + 1,
                    next: i + 2,
                });
            }
        }
        Ok(self.element(*coords.last().unwrap()))
    }

    /// Parses `(a_1, ..., a_D)` or a bare integer `k` (meaning `k · e`).
    pub fn parse(&self, text: &str) -> Result<OdometerElement, OdometerError> {
        let t = text.trim();
        if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let coords = inner
                .split(',')
                .map(|c| u64::from_str(c.trim()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| OdometerError::Parse(text.to_owned()))?;
            self.from_coords(&coords)
        } else {
            i64::from_str(t)
                .map(|k| self.from_integer(k))
                .map_err(|_| OdometerError::Parse(text.to_owned()))
        }
    }

    /// Every element at depth `D`, in the order `0, e, 2e, ...`.
    pub fn elements(&self) -> impl Iterator<Item = OdometerElement> + '_ {
        (0..self.moduli.top()).map(|k| self.element(k))
    }

    /// `V_{x_j} = {a : a_j = x_j}` for a 1-based level `j`.
    pub fn cylinder(&self, level: usize, residue: u64) -> Result<Cylinder, OdometerError> {
        let depth = self.depth();
        if level == 0 || level > depth {
            return Err(OdometerError::BadLevel { level, depth });
        }
        let modulus = self.moduli.moduli()[level - 1];
        if residue >= modulus {
            return Err(OdometerError::BadResidue { residue, modulus });
        }
        Ok(Cylinder {
            moduli: self.moduli.clone(),
            level,
            residue,
        })
    }

    /// Checks that `{V_{base + j}}_{j ∈ Z_{n_k}}` is a periodic partition of
    /// length `n_k` by enumerating all `n_D` elements: each class is a full
    /// cylinder (so clopen), `g` maps class `j` onto class `j + 1`, classes
    /// are disjoint and cover. Also checks that `g` is an isometry.
    pub fn verify_partition(&self, level: usize, base: u64) -> Result<PartitionVerdict, OdometerError> {
        const LIMIT: u64 = 1 << 12;
        let top = self.moduli.top();
        if top > LIMIT {
            return Err(OdometerError::TooLarge(top));
        }
        self.cylinder(level, base)?;
        let n_k = self.moduli.moduli()[level - 1];
        let all: Vec<OdometerElement> = self.elements().collect();
        let coords: Vec<Vec<u64>> = all.iter().map(|a| a.coords()).collect();
        // classes[i]: the j with a_k = base + j, for each class the element lies in
        let classes: Vec<Vec<u64>> = coords
            .iter()
            .map(|c| (0..n_k).filter(|&j| c[level - 1] == (base + j) % n_k).collect())
            .collect();

        let mut counterexamples = Vec::new();
        let mut sizes = vec![0u64; n_k as usize];
        let (mut disjoint, mut covering) = (true, true);
        for (a, cl) in all.iter().zip(&classes) {
            match cl.as_slice() {
                [j] => sizes[*j as usize] += 1,
                [] => {
                    covering = false;
                    counterexamples.push(format!("{a} lies in no class"));
                }
                _ => {
                    disjoint = false;
                    counterexamples.push(format!("{a} lies in classes {cl:?}"));
                }
            }
        }

        // A class is a full cylinder when it has all n_D / n_k coherent
        // extensions of its level-k coordinate.
        let expected = top / n_k;
        let clopen = sizes.iter().all(|&s| s == expected);
        if !clopen {
            counterexamples.push(format!("class sizes {sizes:?}, expected {expected}"));
        }

        // g(W_j) ⊆ W_{j+1} plus equal sizes and injectivity give equality.
        let mut cyclic = clopen;
        for (i, a) in all.iter().enumerate() {
            let image = a.step();
            let (Some(&j), Some(&k)) = (classes[i].first(), classes[image.top as usize].first()) else {
                cyclic = false;
                continue;
            };
            if k != (j + 1) % n_k {
                cyclic = false;
                counterexamples.push(format!("g{a} = {image} leaves class {}", (j + 1) % n_k));
            }
        }

        let first_difference = |x: &[u64], y: &[u64]| x.iter().zip(y).position(|(p, q)| p != q);
        let g: Vec<usize> = all.iter().map(|a| a.step().top as usize).collect();
        let mut isometry = true;
        let n = all.len();
        'outer: for a in 0..n {
            let ga = g[a];
            for b in 0..n {
                let gb = g[b];
                if first_difference(&coords[a], &coords[b]) != first_difference(&coords[ga], &coords[gb]) {
                    isometry = false;
                    counterexamples.push(format!("g changes dist({}, {})", all[a], all[b]));
                    break 'outer;
                }
            }
        }

        Ok(PartitionVerdict {
            level,
            length: n_k,
            base,
            elements: top,
            class_size: expected,
            clopen,
            cyclic,
            disjoint,
            covering,
            isometry,
            counterexamples,
        })
    }
}

impl OdometerElement {
    pub fn depth(&self) -> usize {
        self.moduli.depth()
    }

    pub fn moduli(&self) -> &RegularSequence {
        &self.moduli
    }

    /// The residue in `Z_{n_D}` this element reduces to.
    pub fn top(&self) -> u64 {
        self.top
    }

    /// Coordinate `a_level` (1-based).
    pub fn coord(&self, level: usize) -> u64 {
        self.top % self.moduli.moduli()[level - 1]
    }

    pub fn coords(&self) -> Vec<u64> {
        self.moduli.moduli().iter().map(|n| self.top % n).collect()
    }

    fn check(&self, other: &Self) -> Result<(), OdometerError> {
        if Arc::ptr_eq(&self.moduli, &other.moduli) || self.moduli == other.moduli {
            Ok(())
        } else {
            Err(OdometerError::ModuliMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, OdometerError> {
        self.check(other)?;
        let n = self.moduli.top() as u128;
        Ok(OdometerElement {
            moduli: self.moduli.clone(),
            top: ((self.top as u128 + other.top as u128) % n) as u64,
        })
    }

    pub fn neg(&self) -> Self {
        let n = self.moduli.top();
        OdometerElement {
            moduli: self.moduli.clone(),
            top: (n - self.top) % n,
        }
    }

    /// `g(a) = a + e`.
    pub fn step(&self) -> Self {
        self.step_by(1)
    }

    pub fn inverse_step(&self) -> Self {
        self.step_by(-1)
    }

    pub fn step_by(&self, k: i64) -> Self {
        let n = self.moduli.top() as i128;
        OdometerElement {
            moduli: self.moduli.clone(),
            top: ((self.top as i128 + k as i128).rem_euclid(n)) as u64,
        }
    }

    /// `1/m` for the first disagreeing coordinate `m`; 0 if equal at depth `D`.
    pub fn natural_distance(&self, other: &Self) -> Result<Ratio<u64>, OdometerError> {
        self.check(other)?;
        let first = (1..=self.depth()).find(|&i| self.coord(i) != other.coord(i));
        Ok(match first {
            Some(m) => Ratio::new(1, m as u64),
            None => Ratio::from_integer(0),
        })
    }
}

impl fmt::Display for OdometerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for OdometerElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coords().serialize(serializer)
    }
}

/// Membership test for `V_{x_j}`; coordinates below `j` are then forced to
/// `x_j mod n_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cylinder {
    moduli: Arc<RegularSequence>,
    level: usize,
    residue: u64,
}

impl Cylinder {
    pub fn contains(&self, a: &OdometerElement) -> bool {
        *a.moduli == *self.moduli && a.coord(self.level) == self.residue
    }

    /// The coordinates `a_1, ..., a_level` shared by all members.
    pub fn forced(&self) -> Vec<u64> {
        self.moduli.moduli()[..self.level]
            .iter()
            .map(|n| self.residue % n)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionVerdict {
    pub level: usize,
    pub length: u64,
    pub base: u64,
    pub elements: u64,
    pub class_size: u64,
    /// (i) every class is a full cylinder, hence open and closed.
    pub clopen: bool,
    /// (ii) `g` maps class `j` onto class `j + 1`, wrapping around.
    pub cyclic: bool,
    /// (iii) no element lies in two classes.
    pub disjoint: bool,
    /// (iv) every element lies in some class.
    pub covering: bool,
    pub isometry: bool,
    pub counterexamples: Vec<String>,
}

impl PartitionVerdict {
    pub fn passed(&self) -> bool {
        self.clopen && self.cyclic && self.disjoint && self.covering && self.isometry
    }
}
