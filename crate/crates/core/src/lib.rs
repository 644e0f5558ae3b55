//! Dictionary-based morphology for Bulgarian: paradigm-driven word-form
//! generation, a frozen surface-form index, ingestion of BG Office and
//! Wiktionary data, POS-conditioned lemmatization and accuracy evaluation.
//!
//! Batch operations use rayon when the `parallel` feature (on by default) is
//! enabled and produce the same output as the sequential path.

pub mod dictionary;
pub mod eval;
pub mod ingest;
pub mod lemmatizer;
pub mod par;
pub mod paradigms;
pub mod tagset;

pub use dictionary::{Candidate, Dictionary, DictionaryBuilder, Lexeme, Stats, WordEntry};
pub use eval::{evaluate, make_synthetic_corpus, EvalMetrics};
pub use ingest::{load_builtin, scan_bgoffice, scan_wiktionary, ScanPolicy, ScanReport};
pub use lemmatizer::{lemmatize, lemmatize_stream, LemmaResult, Lemmatizer, TokenRecord};
pub use par::Execution;
pub use paradigms::{generate_word_forms, FormRule, Paradigm, ParadigmSet};
pub use tagset::{GramFeatures, PackedTag};
