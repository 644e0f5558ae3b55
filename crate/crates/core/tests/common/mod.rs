#![allow(dead_code)]

use std::path::PathBuf;

use bgmorph::dictionary::{Dictionary, DictionaryBuilder, Lexeme, WordEntry};
use bgmorph::ingest::{scan_bgoffice, scan_wiktionary, ScanPolicy};
use bgmorph::paradigms::ParadigmSet;
use bgmorph::tagset::{GramFeatures, PackedTag};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn bgoffice_dir() -> PathBuf {
    data_dir().join("bgoffice")
}

pub fn wiktionary_dump() -> PathBuf {
    data_dir().join("wiktionary/bgwiktionary-fixture.xml.bz2")
}

pub fn wiktionary_plain() -> PathBuf {
    data_dir().join("wiktionary/bgwiktionary-fixture.xml")
}

pub fn assets_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets")
}

/// Lexemes of the BG Office fixture, read directly from the files.
pub fn fixture_lexemes() -> Vec<Lexeme> {
    let mut out = Vec::new();
    for (file, ty) in [
        ("bg0.dat", "0"),
        ("nouns/bg1.dat", "1"),
        ("nouns/bg41.dat", "41"),
        ("nouns/bg52.dat", "52"),
        ("adjectives/bg76.dat", "76"),
        ("adjectives/bg83.dat", "83"),
        ("verbs/bg150.dat", "150"),
        ("verbs/bg186.dat", "186"),
    ] {
        let text = std::fs::read_to_string(bgoffice_dir().join("data").join(file)).unwrap();
        for line in text.lines().map(str::trim) {
            if !line.is_empty() && !line.starts_with('#') {
                out.push(Lexeme::new(line, ty).unwrap());
            }
        }
    }
    out
}

/// Lexemes of both shipped fixtures: the BG Office files followed by the
/// pages of the Wiktionary dump that carry a known type.
pub fn all_fixture_lexemes() -> Vec<Lexeme> {
    let mut lx = fixture_lexemes();
    for (l, t) in [
        ("рядък", "83"),
        ("зелен", "76"),
        ("вода", "41"),
        ("влак", "1"),
        ("добре", "0"),
        ("пиша", "150"),
        ("чакам", "186"),
    ] {
        lx.push(Lexeme::new(l, t).unwrap());
    }
    lx
}

/// Dictionary built from both shipped fixtures.
pub fn fixture_dictionary() -> Dictionary {
    let set = ParadigmSet::builtin();
    let mut b = DictionaryBuilder::new();
    scan_bgoffice(bgoffice_dir(), &mut b, &set, &ScanPolicy::default()).unwrap();
    scan_wiktionary(wiktionary_dump(), &mut b, &set, &ScanPolicy::default()).unwrap();
    b.freeze()
}

/// Every generated entry for the lexemes, with (surface, lemma, tag)
/// duplicates removed (first one kept).
pub fn generated_entries(lexemes: &[Lexeme], set: &ParadigmSet) -> Vec<WordEntry> {
    let mut out: Vec<WordEntry> = Vec::new();
    for lx in lexemes {
        if let Ok(forms) = set.generate(&lx.lemma, &lx.type_id) {
            for f in forms {
                if !out
                    .iter()
                    .any(|e| e.surface == f.surface && e.lemma == f.lemma && e.tag == f.tag)
                {
                    out.push(f);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefResult {
    pub lemma: String,
    pub matched_tag: Option<PackedTag>,
    pub candidate_count: usize,
    pub oov: bool,
}

/// Linear-scan reference lemmatizer over a flat entry list.
pub struct ReferenceLemmatizer<'a> {
    pub entries: &'a [WordEntry],
    pub fallback: bool,
}

impl<'a> ReferenceLemmatizer<'a> {
    fn scan(&self, surface: &str) -> Vec<&'a WordEntry> {
        let mut hits: Vec<&WordEntry> = self
            .entries
            .iter()
            .filter(|e| e.surface == surface)
            .collect();
        hits.sort_by(|a, b| (&a.lemma, a.tag.0).cmp(&(&b.lemma, b.tag.0)));
        hits
    }

    fn features(tag: PackedTag) -> [u8; 7] {
        let f = tag.decode().unwrap();
        [
            f.pos as u8,
            f.gender as u8,
            f.number as u8,
            f.article as u8,
            f.extended as u8,
            f.person as u8,
            f.tense as u8,
        ]
    }

    fn compatible(query: &[u8; 7], cand: &[u8; 7]) -> bool {
        (0..7).all(|i| query[i] == 0 || query[i] == cand[i])
    }

    fn score(query: &[u8; 7], cand: &[u8; 7]) -> usize {
        let matched = (0..7)
            .filter(|&i| query[i] != 0 && query[i] == cand[i])
            .count();
        let specified = cand.iter().filter(|&&v| v != 0).count();
        matched + specified
    }

    fn pick(query: &[u8; 7], pool: &[&'a WordEntry]) -> Option<&'a WordEntry> {
        // pool is in (lemma, tag) order; the first maximum wins
        let mut best: Option<(usize, &WordEntry)> = None;
        for e in pool {
            let s = Self::score(query, &Self::features(e.tag));
            if best.is_none_or(|(bs, _)| s > bs) {
                best = Some((s, e));
            }
        }
        best.map(|(_, e)| e)
    }

    pub fn lemmatize(
        &self,
        surface: &str,
        query: GramFeatures,
        sentence_initial: bool,
    ) -> RefResult {
        let mut hits = self.scan(surface);
        if hits.is_empty() && surface.chars().any(|c| c.is_uppercase()) {
            hits = self.scan(&surface.to_lowercase());
            if hits.is_empty() && sentence_initial {
                let mut cs = surface.chars();
                let first = cs.next().unwrap();
                let rest: String = cs.collect();
                if first.is_uppercase() && !rest.chars().any(|c| c.is_uppercase()) {
                    hits = self.scan(&format!("{}{}", first.to_lowercase(), rest));
                }
            }
        }
        let oov = RefResult {
            lemma: surface.to_lowercase(),
            matched_tag: None,
            candidate_count: hits.len(),
            oov: true,
        };
        if hits.is_empty() {
            return oov;
        }
        let q = Self::features(query.encode());
        let filtered: Vec<&WordEntry> = hits
            .iter()
            .copied()
            .filter(|e| Self::compatible(&q, &Self::features(e.tag)))
            .collect();
        let mut chosen = Self::pick(&q, &filtered);
        if chosen.is_none() && self.fallback {
            let pos_only = [q[0], 0, 0, 0, 0, 0, 0];
            let relaxed: Vec<&WordEntry> = hits
                .iter()
                .copied()
                .filter(|e| Self::compatible(&pos_only, &Self::features(e.tag)))
                .collect();
            chosen = Self::pick(&q, &relaxed).or_else(|| Self::pick(&q, &hits));
        }
        match chosen {
            Some(e) => RefResult {
                lemma: e.lemma.clone(),
                matched_tag: Some(e.tag),
                candidate_count: hits.len(),
                oov: false,
            },
            None => oov,
        }
    }
}

/// Synthetic lexemes over the shipped paradigms, with distinct lemmas built
/// from the index in a Cyrillic base-20 numeral.
pub fn synthetic_lexemes(n: usize) -> Vec<Lexeme> {
    const LETTERS: [char; 20] = [
        'б', 'в', 'г', 'д', 'ж', 'з', 'к', 'л', 'м', 'н', 'п', 'р', 'с', 'т', 'ф', 'х', 'ц', 'ч',
        'ш', 'щ',
    ];
    const KINDS: [(&str, &str); 8] = [
        ("0", "о"),
        ("1", "ор"),
        ("41", "ана"),
        ("52", "ело"),
        ("76", "ов"),
        ("83", "ядък"),
        ("150", "ета"),
        ("186", "ам"),
    ];
    (0..n)
        .map(|i| {
            let mut stem = String::from("за");
            let mut k = i;
            loop {
                stem.push(LETTERS[k % LETTERS.len()]);
                stem.push('а');
                k /= LETTERS.len();
                if k == 0 {
                    break;
                }
            }
            let (ty, ending) = KINDS[i % KINDS.len()];
            Lexeme::new(format!("{stem}{ending}"), ty).unwrap()
        })
        .collect()
}
