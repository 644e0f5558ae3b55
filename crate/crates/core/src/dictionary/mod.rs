//! Surface-form index.
//!
//! Dictionaries are built with a [`DictionaryBuilder`] and then frozen into an
//! immutable [`Dictionary`] that can be shared between threads. Candidate lists
//! are kept sorted by (lemma, tag value), so two dictionaries with the same
//! entries are equal regardless of insertion order.

mod binary;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use thiserror::Error;

pub use binary::{FormatError, FORMAT_VERSION, MAGIC};

use crate::par::{map_ordered, Execution};
use crate::paradigms::{is_valid_type_id, ParadigmError, ParadigmSet};
use crate::tagset::PackedTag;

#[derive(Debug, Error)]
pub enum DictError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad dictionary file: {0}")]
    Format(#[from] FormatError),
}

/// One generated surface form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WordEntry {
    pub surface: String,
    pub lemma: String,
    pub tag: PackedTag,
    pub paradigm_type: String,
}

/// A lemma together with its paradigm type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lexeme {
    pub lemma: String,
    pub type_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid lexeme ({lemma:?}, {type_id:?})")]
pub struct InvalidLexeme {
    pub lemma: String,
    pub type_id: String,
}

impl Lexeme {
    pub fn new(
        lemma: impl Into<String>,
        type_id: impl Into<String>,
    ) -> Result<Self, InvalidLexeme> {
        let (lemma, type_id) = (lemma.into(), type_id.into());
        if lemma.is_empty() || !is_valid_type_id(&type_id) {
            return Err(InvalidLexeme { lemma, type_id });
        }
        Ok(Lexeme { lemma, type_id })
    }
}

/// A lookup result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Candidate<'a> {
    pub lemma: &'a str,
    pub tag: PackedTag,
    pub paradigm_type: &'a str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub struct Stats {
    pub lemma_count: usize,
    pub form_count: usize,
    pub ambiguous_surface_count: usize,
}

type CandidateKey = (String, PackedTag);

/// Mutable dictionary under construction.
#[derive(Debug, Clone, Default)]
pub struct DictionaryBuilder {
    forms: HashMap<String, BTreeMap<CandidateKey, String>>,
    lemmas: BTreeMap<String, BTreeSet<String>>,
}

impl DictionaryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Generate and insert every form of `lexeme`. Returns the number of
    /// entries that were not already present.
    pub fn add_lexeme(
        &mut self,
        lexeme: &Lexeme,
        paradigms: &ParadigmSet,
    ) -> Result<usize, ParadigmError> {
        let entries = paradigms.generate(&lexeme.lemma, &lexeme.type_id)?;
        Ok(self.insert_generated(lexeme, entries))
    }

    /// Like [`add_lexeme`](Self::add_lexeme) over a batch. Generation may run
    /// in parallel; insertion happens in input order, so the outcome matches
    /// adding the lexemes one by one.
    pub fn add_lexemes(
        &mut self,
        lexemes: &[Lexeme],
        paradigms: &ParadigmSet,
        mode: Execution,
    ) -> Vec<Result<usize, ParadigmError>> {
        let generated = map_ordered(mode, lexemes, |lx| {
            paradigms.generate(&lx.lemma, &lx.type_id)
        });
        lexemes
            .iter()
            .zip(generated)
            .map(|(lx, g)| g.map(|entries| self.insert_generated(lx, entries)))
            .collect()
    }

    fn insert_generated(&mut self, lexeme: &Lexeme, entries: Vec<WordEntry>) -> usize {
        self.lemmas
            .entry(lexeme.lemma.clone())
            .or_default()
            .insert(lexeme.type_id.clone());
        entries
            .into_iter()
            .map(|e| self.insert_entry(e.surface, e.lemma, e.tag, e.paradigm_type))
            .filter(|&added| added)
            .count()
    }

    fn insert_entry(
        &mut self,
        surface: String,
        lemma: String,
        tag: PackedTag,
        paradigm: String,
    ) -> bool {
        let slot = self.forms.entry(surface).or_default();
        match slot.entry((lemma, tag)) {
            std::collections::btree_map::Entry::Occupied(_) => false,
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(paradigm);
                true
            }
        }
    }

    /// Add everything in `other`. Entries already present keep their
    /// paradigm type.
    pub fn merge(&mut self, other: &Dictionary) {
        for (lemma, types) in other.lemmas.iter().zip(&other.lemma_types) {
            let set = self.lemmas.entry(lemma.clone()).or_default();
            set.extend(types.iter().map(|&t| other.types[t as usize].clone()));
        }
        for (surface, cands) in &other.forms {
            for c in cands {
                self.insert_entry(
                    surface.clone(),
                    other.lemmas[c.lemma as usize].clone(),
                    c.tag,
                    other.types[c.paradigm as usize].clone(),
                );
            }
        }
    }

    pub fn freeze(self) -> Dictionary {
        // add_lexeme and merge register every lemma and type they insert,
        // so `self.lemmas` covers everything `forms` refers to
        let lemmas: Vec<String> = self.lemmas.keys().cloned().collect();
        let type_set: BTreeSet<&String> = self.lemmas.values().flatten().collect();
        let types: Vec<String> = type_set.into_iter().cloned().collect();
        let lemma_ids: HashMap<&str, u32> = lemmas
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i as u32))
            .collect();
        let type_ids: HashMap<&str, u32> = types
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i as u32))
            .collect();
        let lemma_id = |l: &str| lemma_ids[l];
        let type_id = |t: &str| type_ids[t];

        let lemma_types = lemmas
            .iter()
            .map(|l| {
                self.lemmas
                    .get(l)
                    .map(|ts| ts.iter().map(|t| type_id(t)).collect())
                    .unwrap_or_default()
            })
            .collect();

        let mut form_count = 0;
        let forms = self
            .forms
            .into_iter()
            .map(|(surface, cands)| {
                form_count += cands.len();
                let list = cands
                    .into_iter()
                    .map(|((lemma, tag), ty)| RawCandidate {
                        lemma: lemma_id(&lemma),
                        tag,
                        paradigm: type_id(&ty),
                    })
                    .collect();
                (surface, list)
            })
            .collect();

        Dictionary {
            lemmas,
            lemma_types,
            types,
            forms,
            form_count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct RawCandidate {
    lemma: u32,
    tag: PackedTag,
    paradigm: u32,
}

/// Frozen, immutable dictionary.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    /// Sorted, unique.
    lemmas: Vec<String>,
    /// Per lemma, sorted indices into `types`.
    lemma_types: Vec<Vec<u32>>,
    /// Sorted, unique paradigm type ids.
    types: Vec<String>,
    /// Candidates sorted by (lemma index, tag).
    forms: HashMap<String, Vec<RawCandidate>>,
    form_count: usize,
}

impl Dictionary {
    pub fn builder() -> DictionaryBuilder {
        DictionaryBuilder::new()
    }

    /// Copy back into a builder.
    pub fn to_builder(&self) -> DictionaryBuilder {
        let mut b = DictionaryBuilder::new();
        b.merge(self);
        b
    }

    /// Union of both dictionaries. For duplicate entries the paradigm type
    /// from `self` is kept.
    pub fn merge(&self, other: &Dictionary) -> Dictionary {
        let mut b = self.to_builder();
        b.merge(other);
        b.freeze()
    }

    pub fn lookup(&self, surface: &str) -> Vec<Candidate<'_>> {
        self.forms
            .get(surface)
            .map(|cands| cands.iter().map(|c| self.resolve(c)).collect())
            .unwrap_or_default()
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.forms.contains_key(surface)
    }

    fn resolve(&self, c: &RawCandidate) -> Candidate<'_> {
        Candidate {
            lemma: &self.lemmas[c.lemma as usize],
            tag: c.tag,
            paradigm_type: &self.types[c.paradigm as usize],
        }
    }

    pub fn stats(&self) -> Stats {
        Stats {
            lemma_count: self.lemma_count(),
            form_count: self.form_count,
            ambiguous_surface_count: self.forms.values().filter(|c| c.len() >= 2).count(),
        }
    }

    pub fn lemma_count(&self) -> usize {
        self.lemma_types.iter().filter(|t| !t.is_empty()).count()
    }

    pub fn form_count(&self) -> usize {
        self.form_count
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty() && self.lemma_count() == 0
    }

    /// Paradigm types recorded for `lemma`, sorted.
    pub fn lemma_types(&self, lemma: &str) -> Vec<&str> {
        match self.lemmas.binary_search_by(|l| l.as_str().cmp(lemma)) {
            Ok(i) => self.lemma_types[i]
                .iter()
                .map(|&t| self.types[t as usize].as_str())
                .collect(),
            Err(_) => Vec::new(),
        }
    }

    /// Surfaces in byte order.
    pub fn surfaces(&self) -> Vec<&str> {
        let mut s: Vec<&str> = self.forms.keys().map(String::as_str).collect();
        s.sort_unstable();
        s
    }

    /// Every (surface, candidate) pair in canonical order.
    pub fn entries(&self) -> Vec<(&str, Candidate<'_>)> {
        self.surfaces()
            .into_iter()
            .flat_map(|s| self.forms[s].iter().map(move |c| (s, self.resolve(c))))
            .collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        binary::encode(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        binary::decode(bytes)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DictError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DictError> {
        let bytes = std::fs::read(path)?;
        Ok(Self::from_bytes(&bytes)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tagset::parse_tag_string;

    fn lx(lemma: &str, ty: &str) -> Lexeme {
        Lexeme::new(lemma, ty).unwrap()
    }

    fn build(lexemes: &[(&str, &str)]) -> Dictionary {
        let set = ParadigmSet::builtin();
        let mut b = DictionaryBuilder::new();
        for (l, t) in lexemes {
            b.add_lexeme(&lx(l, t), &set).unwrap();
        }
        b.freeze()
    }

    fn tags(d: &Dictionary, surface: &str) -> Vec<(String, String)> {
        d.lookup(surface)
            .iter()
            .map(|c| (c.lemma.to_owned(), c.tag.decode().unwrap().to_string()))
            .collect()
    }

    #[test]
    fn lexeme_validation() {
        assert!(Lexeme::new("рядък", "83").is_ok());
        assert!(Lexeme::new("", "83").is_err());
        assert!(Lexeme::new("рядък", "x").is_err());
    }

    #[test]
    fn add_type_83() {
        let d = build(&[("рядък", "83")]);
        assert_eq!(
            d.stats(),
            Stats {
                lemma_count: 1,
                form_count: 10,
                ambiguous_surface_count: 1
            }
        );
        assert_eq!(d.lookup("редки").len(), 2);
        assert_eq!(d.lemma_types("рядък"), vec!["83"]);
    }

    #[test]
    fn adding_twice_is_idempotent() {
        let set = ParadigmSet::builtin();
        let mut b = DictionaryBuilder::new();
        assert_eq!(b.add_lexeme(&lx("рядък", "83"), &set).unwrap(), 10);
        let once = b.clone().freeze();
        assert_eq!(b.add_lexeme(&lx("рядък", "83"), &set).unwrap(), 0);
        assert_eq!(b.freeze(), once);
    }

    #[test]
    fn too_short_lemma_is_rejected() {
        let set = ParadigmSet::builtin();
        let mut b = DictionaryBuilder::new();
        assert!(matches!(
            b.add_lexeme(&lx("ок", "83"), &set),
            Err(ParadigmError::LemmaTooShort { .. })
        ));
        // nothing half-inserted
        assert!(b.freeze().is_empty());
    }

    #[test]
    fn lookup_examples() {
        let d = build(&[("рядък", "83")]);
        assert_eq!(tags(&d, "редките"), vec![("рядък".into(), "A-pd-".into())]);
        let redki = d.lookup("редки");
        assert_eq!(
            tags(&d, "редки"),
            vec![
                ("рядък".into(), "A-pi-".into()),
                ("рядък".into(), "Ams-e".into())
            ]
        );
        assert!(redki[0].tag < redki[1].tag);
        assert!(d.lookup("zzz").is_empty());
    }

    #[test]
    fn candidates_sorted_by_lemma_then_tag() {
        // бързо is both an adjective form and an adverb
        let d = build(&[("бързо", "0"), ("бърз", "76")]);
        let c = d.lookup("бързо");
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].lemma, "бърз");
        assert_eq!(c[1].lemma, "бързо");
        assert_eq!(c[1].paradigm_type, "0");
    }

    #[test]
    fn merge_laws() {
        let a = build(&[("рядък", "83")]);
        let b = build(&[("жена", "41")]);
        let empty = Dictionary::default();
        assert_eq!(a.merge(&empty), a);
        assert_eq!(empty.merge(&a), a);
        assert_eq!(a.merge(&a), a);
        let ab = a.merge(&b);
        assert_eq!(ab, b.merge(&a));
        assert_eq!(ab.form_count(), a.form_count() + b.form_count());
        assert_eq!(ab, build(&[("рядък", "83"), ("жена", "41")]));
    }

    #[test]
    fn first_paradigm_type_wins() {
        let set = ParadigmSet::parse(
            "paradigm 2 pos=D\nform strip=0 suffix=- tag=D base\n\
             paradigm 3 pos=D\nform strip=0 suffix=- tag=D base\n",
        )
        .unwrap();
        let mut b = DictionaryBuilder::new();
        b.add_lexeme(&lx("тук", "2"), &set).unwrap();
        b.add_lexeme(&lx("тук", "3"), &set).unwrap();
        let d = b.freeze();
        assert_eq!(d.lookup("тук")[0].paradigm_type, "2");
        assert_eq!(d.lemma_types("тук"), vec!["2", "3"]);
        assert_eq!(d.form_count(), 1);
    }

    #[test]
    fn empty_stats() {
        assert_eq!(Dictionary::default().stats(), Stats::default());
    }

    #[test]
    fn batch_add_matches_single_adds() {
        let set = ParadigmSet::builtin();
        let lexemes = vec![
            lx("рядък", "83"),
            lx("ок", "83"),
            lx("нов", "76"),
            lx("x", "999"),
        ];
        let mut batch = DictionaryBuilder::new();
        let results = batch.add_lexemes(&lexemes, &set, Execution::default());
        assert!(results[0].is_ok() && results[2].is_ok());
        assert!(results[1].is_err() && results[3].is_err());
        let mut seq = DictionaryBuilder::new();
        let _ = seq.add_lexemes(&lexemes, &set, Execution::Sequential);
        assert_eq!(batch.freeze(), seq.freeze());
    }

    #[test]
    fn entries_cover_form_count() {
        let d = build(&[("рядък", "83"), ("чета", "150")]);
        let entries = d.entries();
        assert_eq!(entries.len(), d.form_count());
        let want = parse_tag_string("V-p--2z").unwrap().encode();
        assert!(entries.iter().any(|(s, c)| *s == "четете" && c.tag == want));
    }
}
