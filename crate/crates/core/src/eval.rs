//! Lemmatization accuracy against a gold corpus.
//!
//! The gold corpus is the token TSV format with the lemma column filled in:
//! `surface<TAB>tag<TAB>lemma`. Predicted and gold lemmas are compared after
//! NFC normalization, without case folding.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::dictionary::Dictionary;
use crate::lemmatizer::{read_token_tsv, Lemmatizer, StreamError, TokenRecord, TsvLine};
use crate::par::{map_ordered, Execution};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("corpus contains no tokens")]
    EmptyCorpus,
    #[error("dictionary is empty")]
    EmptyDictionary,
    #[error("sample size must be at least 1")]
    ZeroSamples,
}

impl From<StreamError> for EvalError {
    fn from(e: StreamError) -> Self {
        match e {
            StreamError::Io(e) => EvalError::Io(e),
            StreamError::Malformed { line, message } => EvalError::Parse { line, message },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldRecord {
    pub surface: String,
    pub tag: String,
    pub gold_lemma: String,
    pub sentence_initial: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalMetrics {
    pub tokens: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub covered: usize,
    pub correct_covered: usize,
    pub accuracy_on_covered: f64,
    pub oov_rate: f64,
}

impl EvalMetrics {
    fn from_counts(tokens: usize, correct: usize, covered: usize, correct_covered: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        EvalMetrics {
            tokens,
            correct,
            accuracy: ratio(correct, tokens),
            covered,
            correct_covered,
            accuracy_on_covered: ratio(correct_covered, covered),
            oov_rate: ratio(tokens - covered, tokens),
        }
    }
}

/// Single-line `key=value` report.
impl fmt::Display for EvalMetrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tokens={} correct={} accuracy={:.4} covered={} accuracy_on_covered={:.4} oov_rate={:.4}",
            self.tokens,
            self.correct,
            self.accuracy,
            self.covered,
            self.accuracy_on_covered,
            self.oov_rate
        )
    }
}

/// Parse a gold corpus. Every token line needs all three columns.
pub fn read_gold<R: BufRead>(input: R) -> Result<Vec<GoldRecord>, EvalError> {
    let mut out = Vec::new();
    for l in read_token_tsv(input)? {
        if let TsvLine::Token {
            line,
            surface,
            tag,
            lemma,
            sentence_initial,
            ..
        } = l
        {
            let gold_lemma = lemma.ok_or_else(|| EvalError::Parse {
                line,
                message: "missing gold lemma column".into(),
            })?;
            out.push(GoldRecord {
                surface,
                tag,
                gold_lemma,
                sentence_initial,
            });
        }
    }
    Ok(out)
}

fn same_lemma(a: &str, b: &str) -> bool {
    a == b || a.nfc().eq(b.nfc())
}

/// Score `records`, using each record's gold tag as the query.
pub fn evaluate_records(
    lemmatizer: &Lemmatizer<'_>,
    records: &[GoldRecord],
    mode: Execution,
) -> Result<EvalMetrics, EvalError> {
    if records.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    let outcomes = map_ordered(mode, records, |r| {
        // tags were validated when the corpus was read
        let query = r.tag.parse().unwrap_or_default();
        let token = TokenRecord {
            surface: r.surface.clone(),
            query_tag: query,
            sentence_initial: r.sentence_initial,
        };
        let res = lemmatizer.lemmatize(&token);
        (!res.oov, same_lemma(&res.lemma, &r.gold_lemma))
    });
    let (mut correct, mut covered, mut correct_covered) = (0, 0, 0);
    for (is_covered, ok) in outcomes {
        correct += ok as usize;
        covered += is_covered as usize;
        correct_covered += (ok && is_covered) as usize;
    }
    Ok(EvalMetrics::from_counts(
        records.len(),
        correct,
        covered,
        correct_covered,
    ))
}

/// Evaluate the default lemmatizer on a gold corpus file.
pub fn evaluate(dict: &Dictionary, corpus: impl AsRef<Path>) -> Result<EvalMetrics, EvalError> {
    let file = std::fs::File::open(corpus)?;
    let records = read_gold(std::io::BufReader::new(file))?;
    evaluate_records(&Lemmatizer::new(dict), &records, Execution::default())
}

/// Sample `n` (surface, tag, lemma) triples from the dictionary, with
/// replacement, and write them as a gold corpus. Output depends only on the
/// dictionary contents, `seed` and `n`.
pub fn make_synthetic_corpus<W: Write>(
    dict: &Dictionary,
    seed: u64,
    n: usize,
    mut out: W,
) -> Result<(), EvalError> {
    if n == 0 {
        return Err(EvalError::ZeroSamples);
    }
    let entries = dict.entries();
    if entries.is_empty() {
        return Err(EvalError::EmptyDictionary);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    writeln!(out, "# synthetic corpus seed={seed} n={n}")?;
    for i in 0..n {
        if i > 0 && i % 10 == 0 {
            writeln!(out)?;
        }
        let (surface, c) = entries[rng.gen_range(0..entries.len())];
        let tag = c.tag.decode().unwrap_or_default();
        writeln!(out, "{surface}\t{tag}\t{}", c.lemma)?;
    }
    out.flush()?;
    Ok(())
}
