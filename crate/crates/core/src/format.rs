//! Sequence-definition files.
//!
//! A definition is a TOML document with an `alphabet` array of labels and a
//! `[rule]` table. Symbols are referenced by label everywhere. Rules nest
//! through `base` (for `shift_of`) and `filler` (for `splice`):
//!
//! ```toml
//! alphabet = ["a", "b", "c"]
//!
//! [rule]
//! kind = "toeplitz_fill"
//! stages = [
//!     { period = 2, residue = 0, symbol = "a" },
//!     { period = 4, residue = 1, symbol = "b" },
//!     { period = 4, residue = 3, symbol = "c" },
//! ]
//! ```
//!
//! The full grammar is in `docs/sequence-format.md`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Spanned;

use crate::sequence::{Alphabet, RuleKind, SequenceError, SequenceRule, Stage, SymbolId};
use crate::skeleton::{Evidence, SkeletonMap};

/// Nesting depth accepted for `base`/`filler` chains.
pub const MAX_NESTING: usize = 64;

/// A 1-based line and column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{}{message}", .position.map(|p| format!("{p}: ")).unwrap_or_default())]
pub struct ParseError {
    pub position: Option<Position>,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WriteError {
    #[error("rules nest deeper than {MAX_NESTING}")]
    TooDeep,
    #[error(transparent)]
    Toml(#[from] toml::ser::Error),
}

fn position_of(text: &str, offset: usize) -> Position {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Position { line, column }
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Document {
    alphabet: Vec<String>,
    rule: Spanned<RuleDef>,
}

#[derive(Deserialize, Serialize, Default)]
#[serde(deny_unknown_fields)]
struct RuleDef {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    symbol: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pattern: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stages: Option<Vec<StageDef>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rules: Option<BTreeMap<String, Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    left_seed: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    offset: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    skeletons: Option<Vec<SkeletonDef>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    base: Option<Box<Spanned<RuleDef>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    filler: Option<Box<Spanned<RuleDef>>>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct StageDef {
    period: usize,
    residue: usize,
    symbol: String,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct SkeletonDef {
    period: usize,
    assignment: Vec<ResidueDef>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ResidueDef {
    residue: usize,
    symbol: String,
}

const FIELDS: [&str; 10] = [
    "symbol",
    "pattern",
    "stages",
    "rules",
    "seed",
    "left_seed",
    "offset",
    "skeletons",
    "base",
    "filler",
];

impl RuleDef {
    fn present(&self) -> [bool; 10] {
        [
            self.symbol.is_some(),
            self.pattern.is_some(),
            self.stages.is_some(),
            self.rules.is_some(),
            self.seed.is_some(),
            self.left_seed.is_some(),
            self.offset.is_some(),
            self.skeletons.is_some(),
            self.base.is_some(),
            self.filler.is_some(),
        ]
    }
}

struct Builder<'a> {
    text: &'a str,
    alphabet: Arc<Alphabet>,
}

impl Builder<'_> {
    fn err(&self, span: &std::ops::Range<usize>, message: impl Into<String>) -> ParseError {
        ParseError {
            position: Some(position_of(self.text, span.start)),
            message: message.into(),
        }
    }

    fn build(&self, def: &Spanned<RuleDef>, depth: usize) -> Result<SequenceRule, ParseError> {
        let span = def.span();
        let d = def.get_ref();
        if depth > MAX_NESTING {
            return Err(self.err(&span, format!("rules nest deeper than {MAX_NESTING}")));
        }
        let allowed: &[&str] = match d.kind.as_str() {
            "constant" => &["symbol"],
            "periodic" => &["pattern"],
            "toeplitz_fill" => &["stages"],
            "substitution" => &["rules", "seed", "left_seed"],
            "shift_of" => &["base", "offset"],
            "splice" => &["skeletons", "filler"],
            other => return Err(self.err(&span, format!("unknown rule kind `{other}`"))),
        };
        for (name, present) in FIELDS.iter().zip(d.present()) {
            if present && !allowed.contains(name) {
                return Err(self.err(&span, format!("field `{name}` does not belong to kind `{}`", d.kind)));
            }
            if !present && allowed.contains(name) {
                return Err(self.err(&span, format!("kind `{}` needs field `{name}`", d.kind)));
            }
        }
        let seq = |e: SequenceError| self.err(&span, e.to_string());
        let id = |label: &str| self.alphabet.id(label).map_err(seq);
        let ids = |labels: &[String]| labels.iter().map(|l| id(l)).collect::<Result<Vec<_>, _>>();
        let alphabet = self.alphabet.clone();
        match d.kind.as_str() {
            "constant" => SequenceRule::constant(alphabet, id(d.symbol.as_ref().unwrap())?).map_err(seq),
            "periodic" => SequenceRule::periodic(alphabet, ids(d.pattern.as_ref().unwrap())?).map_err(seq),
            "toeplitz_fill" => {
                let stages = d
                    .stages
                    .as_ref()
                    .unwrap()
                    .iter()
                    .map(|s| {
                        Ok(Stage {
                            period: s.period,
                            residue: s.residue,
                            symbol: id(&s.symbol)?,
                        })
                    })
                    .collect::<Result<Vec<_>, ParseError>>()?;
                SequenceRule::toeplitz_fill(alphabet, stages).map_err(seq)
            }
            "substitution" => {
                let table = d.rules.as_ref().unwrap();
                let mut images = vec![None; self.alphabet.len()];
                for (label, image) in table {
                    images[id(label)?.index()] = Some(ids(image)?);
                }
                let images = images
                    .into_iter()
                    .enumerate()
                    .map(|(i, img)| {
                        img.ok_or_else(|| {
                            self.err(&span, format!("no image for `{}`", self.alphabet.labels()[i]))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let seed = id(d.seed.as_ref().unwrap())?;
                let left = id(d.left_seed.as_ref().unwrap())?;
                SequenceRule::substitution(alphabet, images, seed, left).map_err(seq)
            }
            "shift_of" => {
                let base = self.build(d.base.as_ref().unwrap(), depth + 1)?;
                Ok(base.shift(d.offset.unwrap()))
            }
            "splice" => {
                let skeletons = d
                    .skeletons
                    .as_ref()
                    .unwrap()
                    .iter()
                    .map(|sk| {
                        let pairs = sk
                            .assignment
                            .iter()
                            .map(|r| Ok((r.residue, id(&r.symbol)?)))
                            .collect::<Result<Vec<_>, ParseError>>()?;
                        SkeletonMap::from_pairs(sk.period, pairs, Evidence::Constructed).ok_or_else(|| {
                            self.err(
                                &span,
                                format!("skeleton of period {} is malformed (zero period, residue out of range or repeated)", sk.period),
                            )
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let filler = self.build(d.filler.as_ref().unwrap(), depth + 1)?;
                SequenceRule::splice(skeletons, filler).map_err(seq)
            }
            _ => unreachable!(),
        }
    }
}

/// Parses a definition file into a validated rule.
pub fn parse(text: &str) -> Result<SequenceRule, ParseError> {
    let doc: Document = toml::from_str(text).map_err(|e| ParseError {
        position: e.span().map(|s| position_of(text, s.start)),
        message: e.message().trim_end().to_owned(),
    })?;
    let alphabet = Alphabet::new(doc.alphabet).map_err(|e| ParseError {
        position: Some(Position { line: 1, column: 1 }),
        message: e.to_string(),
    })?;
    Builder {
        text,
        alphabet: Arc::new(alphabet),
    }
    .build(&doc.rule, 0)
}

fn def_of(rule: &SequenceRule, depth: usize) -> Result<RuleDef, WriteError> {
    if depth > MAX_NESTING {
        return Err(WriteError::TooDeep);
    }
    let a = rule.alphabet();
    let label = |s: &SymbolId| a.label(*s).to_owned();
    let nested = |r: &SequenceRule| -> Result<_, WriteError> {
        Ok(Some(Box::new(Spanned::new(0..0, def_of(r, depth + 1)?))))
    };
    Ok(match rule.kind() {
        RuleKind::Constant(s) => RuleDef {
            kind: "constant".into(),
            symbol: Some(label(s)),
            ..RuleDef::default()
        },
        RuleKind::Periodic(p) => RuleDef {
            kind: "periodic".into(),
            pattern: Some(p.iter().map(label).collect()),
            ..RuleDef::default()
        },
        RuleKind::ToeplitzFill(fill) => RuleDef {
            kind: "toeplitz_fill".into(),
            stages: Some(
                fill.stages()
                    .iter()
                    .map(|s| StageDef {
                        period: s.period,
                        residue: s.residue,
                        symbol: label(&s.symbol),
                    })
                    .collect(),
            ),
            ..RuleDef::default()
        },
        RuleKind::Substitution(sub) => RuleDef {
            kind: "substitution".into(),
            rules: Some(
                sub.rules()
                    .iter()
                    .enumerate()
                    .map(|(i, img)| (a.labels()[i].clone(), img.iter().map(label).collect()))
                    .collect(),
            ),
            seed: Some(label(&sub.seed())),
            left_seed: Some(label(&sub.left_seed())),
            ..RuleDef::default()
        },
        RuleKind::ShiftOf { base, offset } => RuleDef {
            kind: "shift_of".into(),
            offset: Some(*offset),
            base: nested(base)?,
            ..RuleDef::default()
        },
        RuleKind::Splice { skeletons, filler } => RuleDef {
            kind: "splice".into(),
            skeletons: Some(
                skeletons
                    .iter()
                    .map(|sk| SkeletonDef {
                        period: sk.period(),
                        assignment: sk
                            .domain()
                            .map(|r| ResidueDef {
                                residue: r,
                                symbol: label(&sk.get(r).unwrap()),
                            })
                            .collect(),
                    })
                    .collect(),
            ),
            filler: nested(filler)?,
            ..RuleDef::default()
        },
    })
}

/// Writes a rule as a definition file that [`parse`] reads back.
pub fn to_string(rule: &SequenceRule) -> Result<String, WriteError> {
    let doc = Document {
        alphabet: rule.alphabet().labels().to_vec(),
        rule: Spanned::new(0..0, def_of(rule, 0)?),
    };
    Ok(toml::to_string(&doc)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::materialize;

    const FILL: &str = r#"
alphabet = ["a", "b", "c"]

[rule]
kind = "toeplitz_fill"
stages = [
    { period = 2, residue = 0, symbol = "a" },
    { period = 4, residue = 1, symbol = "b" },
    { period = 4, residue = 3, symbol = "c" },
]
"#;

    fn render(r: &SequenceRule) -> String {
        r.render(-12, 12)
    }

    #[test]
    fn parses_every_kind() {
        let fill = parse(FILL).unwrap();
        assert_eq!(fill.eval(3), SymbolId(2));

        let constant = parse("alphabet = [\"a\"]\n[rule]\nkind = \"constant\"\nsymbol = \"a\"\n").unwrap();
        assert_eq!(constant.eval(-7), SymbolId(0));

        let shifted = parse(
            r#"
alphabet = ["a", "b"]
[rule]
kind = "shift_of"
offset = 1
[rule.base]
kind = "periodic"
pattern = ["a", "b"]
"#,
        )
        .unwrap();
        assert_eq!(materialize(&shifted, 0, 3).unwrap().values(), &[SymbolId(1), SymbolId(0), SymbolId(1)]);

        let tm = parse(
            r#"
alphabet = ["0", "1"]
[rule]
kind = "substitution"
seed = "0"
left_seed = "1"
rules = { "0" = ["0", "1", "1", "0"], "1" = ["1", "0", "0", "1"] }
"#,
        )
        .unwrap();
        assert_eq!(tm.render(0, 8), "01101001");

        let spliced = parse(
            r#"
alphabet = ["a", "b"]
[rule]
kind = "splice"
skeletons = [{ period = 2, assignment = [{ residue = 0, symbol = "b" }] }]
[rule.filler]
kind = "constant"
symbol = "a"
"#,
        )
        .unwrap();
        assert_eq!(spliced.render(-2, 2), "baba");
    }

    #[test]
    fn round_trip() {
        let fill = parse(FILL).unwrap();
        let sk = SkeletonMap::new(vec![Some(SymbolId(1)), None, None], Evidence::Constructed);
        let rule = SequenceRule::splice(vec![sk], fill.shift(-3)).unwrap();
        let text = to_string(&rule).unwrap();
        let back = parse(&text).unwrap();
        assert_eq!(render(&back), render(&rule));
        assert_eq!(to_string(&back).unwrap(), text);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse("alphabet = [\"a\"]\n[rule]\nkind = \n").unwrap_err();
        assert_eq!(e.position.unwrap().line, 3);

        let e = parse("alphabet = [\"a\"]\n\n[rule]\nkind = \"constant\"\nsymbol = \"z\"\n").unwrap_err();
        assert_eq!(e.position, Some(Position { line: 3, column: 1 }));
        assert!(e.message.contains("unknown symbol"), "{e}");

        let e = parse("alphabet = [\"a\"]\n[rule]\nkind = \"constant\"\n").unwrap_err();
        assert!(e.message.contains("needs field `symbol`"));

        let e = parse("alphabet = [\"a\"]\n[rule]\nkind = \"constant\"\nsymbol = \"a\"\npattern = [\"a\"]\n")
            .unwrap_err();
        assert!(e.message.contains("does not belong"));

        let e = parse("alphabet = [\"a\", \"a\"]\n[rule]\nkind = \"constant\"\nsymbol = \"a\"\n").unwrap_err();
        assert!(e.message.contains("duplicate"), "{e}");

        let e = parse(
            "alphabet = [\"a\", \"b\"]\n[rule]\nkind = \"toeplitz_fill\"\nstages = [{ period = 2, residue = 0, symbol = \"a\" }]\n",
        )
        .unwrap_err();
        assert!(e.message.contains("residue 1"), "{e}");
    }
}
