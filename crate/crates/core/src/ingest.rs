//! Lexeme ingestion from BG Office data directories and MediaWiki dumps.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use encoding_rs::{Encoding, UTF_8};
use quick_xml::events::Event;
use regex::Regex;
use thiserror::Error;
use walkdir::WalkDir;

use crate::dictionary::{DictError, Dictionary, DictionaryBuilder, Lexeme};
use crate::par::Execution;
use crate::paradigms::{is_valid_type_id, ParadigmError, ParadigmSet};

static BUILTIN_DICTIONARY: &[u8] = include_bytes!("../assets/builtin.bglx");

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: not valid {encoding} text", path.display())]
    Encoding {
        path: PathBuf,
        encoding: &'static str,
    },
    #[error("{}: bzip2: {message}", path.display())]
    Decompress { path: PathBuf, message: String },
    #[error("{}: malformed XML export: {message}", path.display())]
    Xml { path: PathBuf, message: String },
    /// Only raised under a strict policy.
    #[error("{location}: {source}")]
    Rejected {
        location: String,
        source: ParadigmError,
    },
    /// Only raised under a strict policy.
    #[error("{location}: malformed entry {text:?}")]
    Malformed { location: String, text: String },
}

impl IngestError {
    /// True for errors that a lenient scan would have counted and skipped.
    pub fn is_policy_failure(&self) -> bool {
        matches!(
            self,
            IngestError::Rejected { .. } | IngestError::Malformed { .. }
        )
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_owned(),
        source,
    }
}

/// What to do with input the scanner cannot use.
#[derive(Debug, Clone, Copy)]
pub struct ScanPolicy {
    /// Abort on the first unknown paradigm type or malformed entry instead of
    /// counting it.
    pub strict: bool,
    /// Text encoding of BG Office `.dat` files.
    pub encoding: &'static Encoding,
    pub execution: Execution,
}

impl Default for ScanPolicy {
    fn default() -> Self {
        ScanPolicy {
            strict: false,
            encoding: UTF_8,
            execution: Execution::default(),
        }
    }
}

impl ScanPolicy {
    pub fn strict() -> Self {
        ScanPolicy {
            strict: true,
            ..Default::default()
        }
    }
}

/// Outcome of a scan. `entries_scanned == lexemes_added + lines_skipped`
/// always holds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanReport {
    pub files_processed: usize,
    /// `.dat` lines, or (page, marker) pairs plus marker-less pages for dumps.
    pub entries_scanned: usize,
    pub lexemes_added: usize,
    pub lines_skipped: usize,
    pub unknown_types: BTreeMap<String, usize>,
}

impl ScanReport {
    pub fn absorb(&mut self, other: &ScanReport) {
        self.files_processed += other.files_processed;
        self.entries_scanned += other.entries_scanned;
        self.lexemes_added += other.lexemes_added;
        self.lines_skipped += other.lines_skipped;
        for (k, v) in &other.unknown_types {
            *self.unknown_types.entry(k.clone()).or_default() += v;
        }
    }

    fn skip(&mut self) {
        self.entries_scanned += 1;
        self.lines_skipped += 1;
    }

    /// Feed one batch of add results through the policy.
    fn record(
        &mut self,
        lexemes: &[Lexeme],
        locations: &[String],
        results: Vec<Result<usize, ParadigmError>>,
        policy: &ScanPolicy,
    ) -> Result<(), IngestError> {
        for ((lx, loc), res) in lexemes.iter().zip(locations).zip(results) {
            self.entries_scanned += 1;
            match res {
                Ok(_) => self.lexemes_added += 1,
                Err(e) if policy.strict => {
                    return Err(IngestError::Rejected {
                        location: loc.clone(),
                        source: e,
                    })
                }
                Err(e) => {
                    self.lines_skipped += 1;
                    if matches!(e, ParadigmError::UnknownType(_)) {
                        *self.unknown_types.entry(lx.type_id.clone()).or_default() += 1;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Paradigm type encoded in a BG Office file name: `bg83.dat` → `83`,
/// `bg187a.dat` → `187a`.
pub fn bgoffice_type_from_filename(name: &str) -> Option<&str> {
    let id = name.strip_prefix("bg")?.strip_suffix(".dat")?;
    is_valid_type_id(id).then_some(id)
}

/// Scan a BG Office data tree. Every `bg<type>.dat` file below `dir` holds
/// one lemma per line; other files are ignored.
pub fn scan_bgoffice(
    dir: impl AsRef<Path>,
    dict: &mut DictionaryBuilder,
    paradigms: &ParadigmSet,
    policy: &ScanPolicy,
) -> Result<ScanReport, IngestError> {
    let dir = dir.as_ref();
    let mut report = ScanReport::default();

    for entry in WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(dir).to_owned();
            IngestError::Io {
                path,
                source: e.into(),
            }
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let Some(type_id) = entry
            .file_name()
            .to_str()
            .and_then(bgoffice_type_from_filename)
        else {
            continue;
        };
        let path = entry.path();
        let bytes = std::fs::read(path).map_err(io_err(path))?;
        let text = policy
            .encoding
            .decode_without_bom_handling_and_without_replacement(strip_bom(&bytes, policy.encoding))
            .ok_or_else(|| IngestError::Encoding {
                path: path.to_owned(),
                encoding: policy.encoding.name(),
            })?;

        report.files_processed += 1;
        let mut lexemes = Vec::new();
        let mut locations = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let location = format!("{}:{}", path.display(), idx + 1);
            if line.contains(char::is_whitespace) {
                if policy.strict {
                    // earlier lines fail first
                    let results = dict.add_lexemes(&lexemes, paradigms, policy.execution);
                    report.record(&lexemes, &locations, results, policy)?;
                    return Err(IngestError::Malformed {
                        location,
                        text: line.to_owned(),
                    });
                }
                report.skip();
                continue;
            }
            lexemes.push(Lexeme {
                lemma: line.to_owned(),
                type_id: type_id.to_owned(),
            });
            locations.push(location);
        }
        let results = dict.add_lexemes(&lexemes, paradigms, policy.execution);
        report.record(&lexemes, &locations, results, policy)?;
    }
    Ok(report)
}

fn strip_bom<'a>(bytes: &'a [u8], encoding: &'static Encoding) -> &'a [u8] {
    if encoding == UTF_8 {
        bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes)
    } else {
        bytes
    }
}

/// Finds paradigm-type markers in wikitext: template calls such as
/// `{{тип|83}}` whose name is one of a configured list and whose first
/// positional parameter is a type id.
#[derive(Debug, Clone)]
pub struct TemplateMatcher {
    names: Vec<String>,
    pattern: Regex,
}

impl TemplateMatcher {
    pub const DEFAULT_NAMES: &'static [&'static str] = &["тип", "bg-type"];

    /// Template names match like MediaWiki titles: the first letter is
    /// case-insensitive, the rest is exact.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        let alternatives: Vec<String> = names
            .iter()
            .map(|n| n.as_ref().trim())
            .filter(|n| !n.is_empty())
            .map(|n| {
                let mut cs = n.chars();
                let first = cs.next().expect("non-empty");
                let rest = cs.as_str();
                let lower: String = first.to_lowercase().collect();
                let upper: String = first.to_uppercase().collect();
                format!(
                    "(?:{}|{}){}",
                    regex::escape(&lower),
                    regex::escape(&upper),
                    regex::escape(rest)
                )
            })
            .collect();
        let body = if alternatives.is_empty() {
            // matches nothing
            "[^\\s\\S]".to_owned()
        } else {
            alternatives.join("|")
        };
        let pattern = Regex::new(&format!(
            r"\{{\{{\s*(?:{body})\s*\|([^|{{}}]*)(?:\||\}}\}})"
        ))
        .expect("escaped template pattern");
        TemplateMatcher {
            names: names.iter().map(|n| n.as_ref().to_owned()).collect(),
            pattern,
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Distinct type ids in order of first appearance.
    pub fn types_in<'t>(&self, wikitext: &'t str) -> Vec<&'t str> {
        let mut out: Vec<&str> = Vec::new();
        for cap in self.pattern.captures_iter(wikitext) {
            let param = cap.get(1).map_or("", |m| m.as_str()).trim();
            if is_valid_type_id(param) && !out.contains(&param) {
                out.push(param);
            }
        }
        out
    }
}

impl Default for TemplateMatcher {
    fn default() -> Self {
        Self::new(Self::DEFAULT_NAMES)
    }
}

/// A page of a MediaWiki export, reduced to what the scanner needs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DumpPage {
    pub title: String,
    pub namespace: i32,
    pub redirect: bool,
    pub text: String,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Field {
    None,
    Title,
    Ns,
    Text,
}

/// Stream the pages of a MediaWiki XML export, calling `on_page` for each.
pub fn read_dump_pages<R: BufRead>(
    input: R,
    mut on_page: impl FnMut(DumpPage) -> Result<(), IngestError>,
    path: &Path,
) -> Result<(), IngestError> {
    let xml_err = |message: String| IngestError::Xml {
        path: path.to_owned(),
        message,
    };
    let mut reader = quick_xml::Reader::from_reader(input);
    let mut buf = Vec::new();
    let mut depth = 0usize;
    let mut seen_root = false;
    let mut page: Option<DumpPage> = None;
    let mut field = Field::None;
    let mut in_revision = false;
    let mut ns_text = String::new();

    loop {
        let event = reader.read_event_into(&mut buf).map_err(|e| match e {
            quick_xml::Error::Io(io) => IngestError::Io {
                path: path.to_owned(),
                source: std::io::Error::new(io.kind(), io.to_string()),
            },
            other => xml_err(format!("{other} at byte {}", reader.error_position())),
        })?;
        match event {
            Event::Start(e) => {
                depth += 1;
                let name = e.local_name();
                let name = name.as_ref();
                if depth == 1 {
                    if name != b"mediawiki" {
                        return Err(xml_err("root element is not <mediawiki>".into()));
                    }
                    seen_root = true;
                } else if depth == 2 && name == b"page" {
                    page = Some(DumpPage::default());
                } else if let Some(p) = page.as_mut() {
                    match (depth, name) {
                        (3, b"title") => field = Field::Title,
                        (3, b"ns") => {
                            field = Field::Ns;
                            ns_text.clear();
                        }
                        (3, b"redirect") => p.redirect = true,
                        (3, b"revision") => in_revision = true,
                        (4, b"text") if in_revision => field = Field::Text,
                        _ => {}
                    }
                }
            }
            Event::Empty(e) => {
                if depth == 0 {
                    return Err(xml_err("root element is not <mediawiki>".into()));
                }
                if depth == 2 {
                    if let Some(p) = page.as_mut() {
                        if e.local_name().as_ref() == b"redirect" {
                            p.redirect = true;
                        }
                    }
                }
            }
            Event::Text(t) => {
                if field != Field::None {
                    let s = t.unescape().map_err(|e| xml_err(e.to_string()))?;
                    push_field(page.as_mut(), field, &s, &mut ns_text);
                }
            }
            Event::CData(t) => {
                if field != Field::None {
                    let s = String::from_utf8(t.into_inner().into_owned())
                        .map_err(|_| xml_err("CDATA is not UTF-8".into()))?;
                    push_field(page.as_mut(), field, &s, &mut ns_text);
                }
            }
            Event::End(e) => {
                let name = e.local_name();
                let name = name.as_ref();
                match (depth, name) {
                    (2, b"page") => {
                        if let Some(p) = page.take() {
                            on_page(p)?;
                        }
                    }
                    (3, b"ns") => {
                        if let Some(p) = page.as_mut() {
                            p.namespace = ns_text.trim().parse().map_err(|_| {
                                xml_err(format!("invalid namespace {:?}", ns_text.trim()))
                            })?;
                        }
                        field = Field::None;
                    }
                    (3, b"revision") => in_revision = false,
                    (3, _) | (4, b"text") => field = Field::None,
                    _ => {}
                }
                depth -= 1;
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if !seen_root {
        return Err(xml_err("no <mediawiki> root element".into()));
    }
    if depth != 0 {
        return Err(xml_err("unexpected end of file".into()));
    }
    Ok(())
}

fn push_field(page: Option<&mut DumpPage>, field: Field, s: &str, ns_text: &mut String) {
    let Some(p) = page else { return };
    match field {
        Field::Title => p.title.push_str(s),
        Field::Ns => ns_text.push_str(s),
        Field::Text => p.text.push_str(s),
        Field::None => {}
    }
}

const BZIP2_MAGIC: &[u8] = b"BZh";

/// Open a dump, transparently decompressing bzip2. Files named `*.bz2` must
/// be bzip2; other files are sniffed.
fn open_dump(path: &Path) -> Result<(Box<dyn BufRead>, bool), IngestError> {
    let mut file = File::open(path).map_err(io_err(path))?;
    let mut head = [0u8; 3];
    let mut n = 0;
    while n < head.len() {
        match file.read(&mut head[n..]).map_err(io_err(path))? {
            0 => break,
            k => n += k,
        }
    }
    let head = &head[..n];
    let named_bz2 = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("bz2"));
    let is_bz2 = head == BZIP2_MAGIC;
    if named_bz2 && !is_bz2 {
        return Err(IngestError::Decompress {
            path: path.to_owned(),
            message: "invalid stream header".into(),
        });
    }
    let rest = std::io::Cursor::new(head.to_vec()).chain(file);
    if is_bz2 {
        let dec = bzip2::read::MultiBzDecoder::new(rest);
        Ok((Box::new(BufReader::with_capacity(1 << 16, dec)), true))
    } else {
        Ok((Box::new(BufReader::with_capacity(1 << 16, rest)), false))
    }
}

/// Scanner for Wiktionary dumps.
#[derive(Debug, Clone, Default)]
pub struct WiktionaryScanner {
    pub matcher: TemplateMatcher,
}

impl WiktionaryScanner {
    pub fn new(matcher: TemplateMatcher) -> Self {
        WiktionaryScanner { matcher }
    }

    /// Stream `dump` and add one lexeme per (page title, marker type).
    /// Only main-namespace pages that are not redirects are considered.
    pub fn scan(
        &self,
        dump: impl AsRef<Path>,
        dict: &mut DictionaryBuilder,
        paradigms: &ParadigmSet,
        policy: &ScanPolicy,
    ) -> Result<ScanReport, IngestError> {
        let path = dump.as_ref();
        let (input, compressed) = open_dump(path)?;
        let mut report = ScanReport {
            files_processed: 1,
            ..Default::default()
        };
        const BATCH: usize = 4096;
        let mut lexemes = Vec::new();
        let mut locations = Vec::new();

        let flush = |lexemes: &mut Vec<Lexeme>,
                     locations: &mut Vec<String>,
                     dict: &mut DictionaryBuilder,
                     report: &mut ScanReport| {
            let results = dict.add_lexemes(lexemes, paradigms, policy.execution);
            let r = report.record(lexemes, locations, results, policy);
            lexemes.clear();
            locations.clear();
            r
        };

        let result = read_dump_pages(
            input,
            |page| {
                if page.namespace != 0 || page.redirect || is_redirect_text(&page.text) {
                    return Ok(());
                }
                let lemma = page.title.trim();
                let types = self.matcher.types_in(&page.text);
                if types.is_empty() || lemma.is_empty() {
                    report.skip();
                    return Ok(());
                }
                for t in types {
                    lexemes.push(Lexeme {
                        lemma: lemma.to_owned(),
                        type_id: t.to_owned(),
                    });
                    locations.push(format!("{}: page {lemma:?}", path.display()));
                }
                if lexemes.len() >= BATCH {
                    flush(&mut lexemes, &mut locations, dict, &mut report)?;
                }
                Ok(())
            },
            path,
        );
        let result = match result {
            Err(IngestError::Io { source, .. }) if compressed => Err(IngestError::Decompress {
                path: path.to_owned(),
                message: source.to_string(),
            }),
            other => other,
        };
        result?;
        flush(&mut lexemes, &mut locations, dict, &mut report)?;
        Ok(report)
    }
}

fn is_redirect_text(text: &str) -> bool {
    let t = text.trim_start();
    let Some(rest) = t.strip_prefix('#') else {
        return false;
    };
    let word: String = rest
        .chars()
        .take_while(|c| c.is_alphabetic())
        .flat_map(char::to_lowercase)
        .collect();
    word == "redirect" || word == "пренасочване"
}

/// Scan a dump with the default template names.
pub fn scan_wiktionary(
    dump: impl AsRef<Path>,
    dict: &mut DictionaryBuilder,
    paradigms: &ParadigmSet,
    policy: &ScanPolicy,
) -> Result<ScanReport, IngestError> {
    WiktionaryScanner::default().scan(dump, dict, paradigms, policy)
}

/// The sample dictionary bundled with the crate, built from the shipped
/// BG Office and Wiktionary fixtures.
pub fn load_builtin() -> Result<Dictionary, DictError> {
    Ok(Dictionary::from_bytes(BUILTIN_DICTIONARY)?)
}
