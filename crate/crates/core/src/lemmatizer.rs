//! POS-conditioned lemmatization over a frozen dictionary.
//!
//! For each token:
//!
//! 1. Look the surface up as is. If nothing is found and it contains
//!    uppercase letters, try it fully lowercased; if that still fails and the
//!    token starts a sentence with only its first letter capitalised, try it
//!    with just the first letter lowered.
//! 2. Keep the candidates whose tag is compatible with the query tag.
//! 3. Pick the candidate with the highest score (query features it matches
//!    plus features it specifies). Ties go to the smallest (lemma, tag).
//! 4. If no candidate is compatible, retry with the query's part of speech
//!    only, then with all candidates. This relaxation can be switched off.
//! 5. Unknown words are their own lowercased lemma.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::dictionary::{Candidate, Dictionary};
use crate::par::{map_ordered, Execution};
use crate::tagset::{parse_tag_string, GramFeatures, PackedTag};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenRecord {
    pub surface: String,
    pub query_tag: GramFeatures,
    pub sentence_initial: bool,
}

impl TokenRecord {
    pub fn new(surface: impl Into<String>, query_tag: GramFeatures) -> Self {
        TokenRecord {
            surface: surface.into(),
            query_tag,
            sentence_initial: false,
        }
    }

    pub fn sentence_initial(mut self, yes: bool) -> Self {
        self.sentence_initial = yes;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaResult {
    pub lemma: String,
    pub matched_tag: Option<PackedTag>,
    /// Candidates found for the surface at the casing level that hit.
    pub candidate_count: usize,
    pub oov: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmatizerConfig {
    /// Relax the query when no candidate is compatible with it.
    pub fallback: bool,
}

impl Default for LemmatizerConfig {
    fn default() -> Self {
        LemmatizerConfig { fallback: true }
    }
}

pub struct Lemmatizer<'d> {
    dict: &'d Dictionary,
    config: LemmatizerConfig,
}

impl<'d> Lemmatizer<'d> {
    pub fn new(dict: &'d Dictionary) -> Self {
        Self::with_config(dict, LemmatizerConfig::default())
    }

    pub fn with_config(dict: &'d Dictionary, config: LemmatizerConfig) -> Self {
        Lemmatizer { dict, config }
    }

    pub fn lemmatize(&self, token: &TokenRecord) -> LemmaResult {
        let candidates = self.lookup_with_casing(token);
        let oov = || LemmaResult {
            lemma: token.surface.to_lowercase(),
            matched_tag: None,
            candidate_count: candidates.len(),
            oov: true,
        };
        if candidates.is_empty() {
            return oov();
        }
        let decoded: Vec<(Candidate<'_>, GramFeatures)> = candidates
            .iter()
            .map(|c| (*c, c.tag.decode().unwrap_or_default()))
            .collect();

        let query = token.query_tag;
        let mut chosen = best(&query, decoded.iter().filter(|(_, f)| query.subsumes(f)));
        if chosen.is_none() && self.config.fallback {
            let pos_only = GramFeatures::pos_only(query.pos);
            chosen = best(&query, decoded.iter().filter(|(_, f)| pos_only.subsumes(f)))
                .or_else(|| best(&query, decoded.iter()));
        }
        match chosen {
            Some(c) => LemmaResult {
                lemma: c.lemma.to_owned(),
                matched_tag: Some(c.tag),
                candidate_count: candidates.len(),
                oov: false,
            },
            None => oov(),
        }
    }

    fn lookup_with_casing(&self, token: &TokenRecord) -> Vec<Candidate<'d>> {
        let surface = token.surface.as_str();
        let found = self.dict.lookup(surface);
        if !found.is_empty() || !surface.chars().any(char::is_uppercase) {
            return found;
        }
        let found = self.dict.lookup(&surface.to_lowercase());
        if !found.is_empty() || !token.sentence_initial {
            return found;
        }
        let mut chars = surface.chars();
        match chars.next() {
            Some(first)
                if first.is_uppercase() && !chars.as_str().chars().any(char::is_uppercase) =>
            {
                let lowered: String = first.to_lowercase().chain(chars).collect();
                self.dict.lookup(&lowered)
            }
            _ => found,
        }
    }

    /// Lemmatize a batch, preserving order.
    pub fn lemmatize_all(&self, tokens: &[TokenRecord], mode: Execution) -> Vec<LemmaResult> {
        map_ordered(mode, tokens, |t| self.lemmatize(t))
    }
}

/// Highest score wins; the candidate iterator is already in (lemma, tag)
/// order, so keeping the first maximum implements the tie-break.
fn best<'a, 'c: 'a>(
    query: &GramFeatures,
    candidates: impl Iterator<Item = &'a (Candidate<'c>, GramFeatures)>,
) -> Option<Candidate<'c>> {
    let mut top: Option<(usize, Candidate<'c>)> = None;
    for (c, f) in candidates {
        let score = query.matching_count(f) + f.specified_count();
        if top.as_ref().is_none_or(|(s, _)| score > *s) {
            top = Some((score, *c));
        }
    }
    top.map(|(_, c)| c)
}

/// Lemmatize one token with the default configuration.
pub fn lemmatize(dict: &Dictionary, token: &TokenRecord) -> LemmaResult {
    Lemmatizer::new(dict).lemmatize(token)
}

/// Lemmatize a token stream, pairing each token with its result.
pub fn lemmatize_stream(
    dict: &Dictionary,
    tokens: Vec<TokenRecord>,
) -> Vec<(TokenRecord, LemmaResult)> {
    let results = Lemmatizer::new(dict).lemmatize_all(&tokens, Execution::default());
    tokens.into_iter().zip(results).collect()
}

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// One line of a token TSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TsvLine {
    Token {
        line: usize,
        surface: String,
        tag: String,
        query: GramFeatures,
        /// Third column, when present.
        lemma: Option<String>,
        sentence_initial: bool,
    },
    /// Sentence boundary.
    Blank,
    /// `#` line without a tab.
    Comment(String),
}

/// Parse `surface<TAB>tag[<TAB>lemma]` lines. A blank line ends a sentence;
/// the next token is sentence-initial, as is the first token of the input.
pub fn read_token_tsv<R: BufRead>(input: R) -> Result<Vec<TsvLine>, StreamError> {
    let mut out = Vec::new();
    let mut at_start = true;
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        let line = if line_no == 1 {
            line.strip_prefix('\u{feff}').unwrap_or(line)
        } else {
            line
        };
        if line.trim().is_empty() {
            out.push(TsvLine::Blank);
            at_start = true;
            continue;
        }
        if line.starts_with('#') && !line.contains('\t') {
            out.push(TsvLine::Comment(line.to_owned()));
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let malformed = |message: String| StreamError::Malformed {
            line: line_no,
            message,
        };
        if !(2..=3).contains(&cols.len()) {
            return Err(malformed(format!(
                "expected 2 or 3 tab-separated columns, found {}",
                cols.len()
            )));
        }
        if cols[0].is_empty() {
            return Err(malformed("empty surface".into()));
        }
        let query = parse_tag_string(cols[1]).map_err(|e| malformed(e.to_string()))?;
        let lemma = match cols.get(2) {
            Some(&"") => return Err(malformed("empty lemma column".into())),
            Some(l) => Some((*l).to_owned()),
            None => None,
        };
        out.push(TsvLine::Token {
            line: line_no,
            surface: cols[0].to_owned(),
            tag: cols[1].to_owned(),
            query,
            lemma,
            sentence_initial: at_start,
        });
        at_start = false;
    }
    Ok(out)
}

/// Read a token TSV stream, lemmatize it and write it back with two extra
/// columns: the lemma and `O` for out-of-vocabulary tokens (`-` otherwise).
/// Blank and comment lines pass through unchanged.
pub fn annotate_tsv<R: BufRead, W: Write>(
    lemmatizer: &Lemmatizer<'_>,
    input: R,
    mut output: W,
    mode: Execution,
) -> Result<AnnotateSummary, StreamError> {
    let lines = read_token_tsv(input)?;
    let tokens: Vec<TokenRecord> = lines
        .iter()
        .filter_map(|l| match l {
            TsvLine::Token {
                surface,
                query,
                sentence_initial,
                ..
            } => Some(TokenRecord {
                surface: surface.clone(),
                query_tag: *query,
                sentence_initial: *sentence_initial,
            }),
            _ => None,
        })
        .collect();
    let results = lemmatizer.lemmatize_all(&tokens, mode);
    let mut results = results.into_iter();
    let mut summary = AnnotateSummary::default();

    for l in &lines {
        match l {
            TsvLine::Token {
                surface,
                tag,
                lemma,
                ..
            } => {
                let r = results.next().expect("one result per token");
                summary.tokens += 1;
                summary.oov += r.oov as usize;
                write!(output, "{surface}\t{tag}")?;
                if let Some(gold) = lemma {
                    write!(output, "\t{gold}")?;
                }
                writeln!(output, "\t{}\t{}", r.lemma, if r.oov { "O" } else { "-" })?;
            }
            TsvLine::Blank => writeln!(output)?,
            TsvLine::Comment(c) => writeln!(output, "{c}")?,
        }
    }
    output.flush()?;
    Ok(summary)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AnnotateSummary {
    pub tokens: usize,
    pub oov: usize,
}
