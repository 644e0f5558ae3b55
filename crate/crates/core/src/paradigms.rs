//! Inflectional paradigms and word-form generation.
//!
//! A paradigm is an ordered list of rules. Each rule removes a number of
//! characters from the end of the lemma and appends a suffix, producing one
//! surface form with a fixed feature bundle. Stem alternations are folded into
//! the rule itself, e.g. `рядък` minus four characters plus `едки` gives
//! `редки`.
//!
//! Definition file syntax:
//!
//! ```text
//! # comment
//! paradigm 83 pos=A
//! form strip=0 suffix=- tag=Amsi- base
//! form strip=4 suffix=едкия tag=Amsd-
//! ```
//!
//! `suffix=-` stands for the empty suffix.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::dictionary::WordEntry;
use crate::tagset::{parse_tag_string, GramFeatures, PosClass};

const BUILTIN_PARADIGMS: &str = include_str!("../data/paradigms.txt");

#[derive(Debug, Error)]
pub enum ParadigmError {
    #[error("cannot read paradigm file: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("paradigm type {0:?} defined more than once")]
    DuplicateType(String),
    #[error("paradigm {type_id:?} is invalid: {}", join(violations))]
    InvalidRule {
        type_id: String,
        violations: Vec<Violation>,
    },
    #[error("unknown paradigm type {0:?}")]
    UnknownType(String),
    #[error("lemma {lemma:?} is too short for paradigm {type_id:?} (rule strips {strip})")]
    LemmaTooShort {
        lemma: String,
        type_id: String,
        strip: usize,
    },
    #[error("empty lemma")]
    EmptyLemma,
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// A broken paradigm invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    BadTypeId(String),
    NoRules,
    NoBaseRule,
    MultipleBaseRules(usize),
    /// The base rule at this index strips or appends something.
    BaseNotIdentity(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadTypeId(id) => write!(f, "bad type id {id:?}"),
            Violation::NoRules => f.write_str("no rules"),
            Violation::NoBaseRule => f.write_str("no base rule"),
            Violation::MultipleBaseRules(n) => write!(f, "{n} base rules"),
            Violation::BaseNotIdentity(i) => {
                write!(
                    f,
                    "base rule #{} must have strip=0 and an empty suffix",
                    i + 1
                )
            }
        }
    }
}

/// Paradigm type ids are digits with an optional trailing lowercase letter:
/// `83`, `187a`.
pub fn is_valid_type_id(id: &str) -> bool {
    let digits = id
        .strip_suffix(|c: char| c.is_ascii_lowercase())
        .unwrap_or(id);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormRule {
    /// Characters (not bytes) removed from the end of the lemma.
    pub strip: usize,
    pub suffix: String,
    pub tag: GramFeatures,
    pub is_base: bool,
}

impl FormRule {
    /// Apply the rule. Returns `None` when the lemma has `strip` characters
    /// or fewer.
    pub fn apply(&self, lemma: &str) -> Option<String> {
        let len = lemma.chars().count();
        if self.strip >= len {
            return None;
        }
        let cut = lemma
            .char_indices()
            .nth(len - self.strip)
            .map_or(lemma.len(), |(i, _)| i);
        let mut surface = String::with_capacity(cut + self.suffix.len());
        surface.push_str(&lemma[..cut]);
        surface.push_str(&self.suffix);
        Some(surface)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Paradigm {
    pub type_id: String,
    pub pos: PosClass,
    pub rules: Vec<FormRule>,
}

impl Paradigm {
    /// Generate every form of `lemma`, one per rule, in rule order.
    pub fn inflect(&self, lemma: &str) -> Result<Vec<WordEntry>, ParadigmError> {
        if lemma.is_empty() {
            return Err(ParadigmError::EmptyLemma);
        }
        self.rules
            .iter()
            .map(|rule| {
                let surface = rule
                    .apply(lemma)
                    .ok_or_else(|| ParadigmError::LemmaTooShort {
                        lemma: lemma.to_owned(),
                        type_id: self.type_id.clone(),
                        strip: rule.strip,
                    })?;
                Ok(WordEntry {
                    surface,
                    lemma: lemma.to_owned(),
                    tag: rule.tag.encode(),
                    paradigm_type: self.type_id.clone(),
                })
            })
            .collect()
    }
}

/// List the invariant violations of a paradigm. Empty means valid.
pub fn validate_paradigm(p: &Paradigm) -> Vec<Violation> {
    let mut out = Vec::new();
    if !is_valid_type_id(&p.type_id) {
        out.push(Violation::BadTypeId(p.type_id.clone()));
    }
    if p.rules.is_empty() {
        out.push(Violation::NoRules);
        return out;
    }
    let bases: Vec<usize> = p
        .rules
        .iter()
        .enumerate()
        .filter(|(_, r)| r.is_base)
        .map(|(i, _)| i)
        .collect();
    match bases.len() {
        0 => out.push(Violation::NoBaseRule),
        1 => {}
        n => out.push(Violation::MultipleBaseRules(n)),
    }
    for &i in &bases {
        let r = &p.rules[i];
        if r.strip != 0 || !r.suffix.is_empty() {
            out.push(Violation::BaseNotIdentity(i));
        }
    }
    out
}

/// Paradigms keyed by type id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParadigmSet {
    paradigms: BTreeMap<String, Paradigm>,
}

impl ParadigmSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// The paradigms bundled with the crate.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_PARADIGMS).expect("bundled paradigm file is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ParadigmError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ParadigmError> {
        let mut set = ParadigmSet::new();
        let mut current: Option<Paradigm> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            match words.next() {
                Some("paradigm") => {
                    if let Some(done) = current.take() {
                        set.insert(done)?;
                    }
                    current = Some(parse_header(words, line_no)?);
                }
                Some("form") => {
                    let Some(p) = current.as_mut() else {
                        return Err(parse_err(line_no, "form line outside a paradigm block"));
                    };
                    p.rules.push(parse_rule(words, line_no)?);
                }
                Some(other) => {
                    return Err(parse_err(line_no, format!("unknown directive {other:?}")))
                }
                None => unreachable!("blank lines are skipped"),
            }
        }
        if let Some(done) = current {
            set.insert(done)?;
        }
        Ok(set)
    }

    /// Add a paradigm after validating it.
    pub fn insert(&mut self, p: Paradigm) -> Result<(), ParadigmError> {
        let violations = validate_paradigm(&p);
        if !violations.is_empty() {
            return Err(ParadigmError::InvalidRule {
                type_id: p.type_id,
                violations,
            });
        }
        if self.paradigms.contains_key(&p.type_id) {
            return Err(ParadigmError::DuplicateType(p.type_id));
        }
        self.paradigms.insert(p.type_id.clone(), p);
        Ok(())
    }

    pub fn get(&self, type_id: &str) -> Option<&Paradigm> {
        self.paradigms.get(type_id)
    }

    pub fn len(&self) -> usize {
        self.paradigms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paradigms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Paradigm> {
        self.paradigms.values()
    }

    pub fn generate(&self, lemma: &str, type_id: &str) -> Result<Vec<WordEntry>, ParadigmError> {
        self.get(type_id)
            .ok_or_else(|| ParadigmError::UnknownType(type_id.to_owned()))?
            .inflect(lemma)
    }
}

/// Generate all word forms of `lemma` under paradigm `type_id`.
pub fn generate_word_forms(
    lemma: &str,
    type_id: &str,
    set: &ParadigmSet,
) -> Result<Vec<WordEntry>, ParadigmError> {
    set.generate(lemma, type_id)
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(before, _)| before)
}

fn parse_err(line: usize, message: impl Into<String>) -> ParadigmError {
    ParadigmError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header<'a>(
    mut words: impl Iterator<Item = &'a str>,
    line: usize,
) -> Result<Paradigm, ParadigmError> {
    let type_id = words
        .next()
        .ok_or_else(|| parse_err(line, "missing paradigm type"))?;
    if !is_valid_type_id(type_id) {
        return Err(parse_err(
            line,
            format!("invalid paradigm type {type_id:?}"),
        ));
    }
    let mut pos = None;
    for w in words {
        match w.split_once('=') {
            Some(("pos", letter)) => {
                let mut cs = letter.chars();
                let p = match (cs.next(), cs.next()) {
                    (Some(c), None) if c != '-' => PosClass::from_letter(c),
                    _ => None,
                };
                pos = Some(p.ok_or_else(|| {
                    parse_err(line, format!("invalid part of speech {letter:?}"))
                })?);
            }
            _ => {
                return Err(parse_err(
                    line,
                    format!("unexpected {w:?} in paradigm header"),
                ))
            }
        }
    }
    Ok(Paradigm {
        type_id: type_id.to_owned(),
        pos: pos.ok_or_else(|| parse_err(line, "missing pos=<letter>"))?,
        rules: Vec::new(),
    })
}

fn parse_rule<'a>(
    words: impl Iterator<Item = &'a str>,
    line: usize,
) -> Result<FormRule, ParadigmError> {
    let mut strip = None;
    let mut suffix = None;
    let mut tag = None;
    let mut is_base = false;

    for w in words {
        match w.split_once('=') {
            Some(("strip", n)) => {
                strip = Some(
                    n.parse::<usize>()
                        .map_err(|_| parse_err(line, format!("invalid strip count {n:?}")))?,
                )
            }
            Some(("suffix", "-")) => suffix = Some(String::new()),
            Some(("suffix", s)) if !s.is_empty() => suffix = Some(s.to_owned()),
            Some(("tag", t)) => {
                tag = Some(parse_tag_string(t).map_err(|e| parse_err(line, e.to_string()))?)
            }
            None if w == "base" => is_base = true,
            _ => return Err(parse_err(line, format!("unexpected {w:?} in form rule"))),
        }
    }
    Ok(FormRule {
        strip: strip.ok_or_else(|| parse_err(line, "missing strip=<n>"))?,
        suffix: suffix.ok_or_else(|| parse_err(line, "missing suffix=<s>"))?,
        tag: tag.ok_or_else(|| parse_err(line, "missing tag=<tag>"))?,
        is_base,
    })
}
