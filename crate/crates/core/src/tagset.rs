//! Morphosyntactic features, their packed 32-bit form and their positional
//! string form.
//!
//! A positional tag is a short ASCII string. The first character names the
//! part of speech, the remaining characters fill fixed slots in this order:
//!
//! | slot | feature  | letters                                   |
//! |------|----------|-------------------------------------------|
//! | 1    | gender   | `m` `f` `n`                               |
//! | 2    | number   | `s` `p`                                   |
//! | 3    | article  | `i` indefinite, `d` definite, `f` full    |
//! | 4    | extended | `e`                                       |
//! | 5    | person   | `1` `2` `3`                               |
//! | 6    | tense    | `r` present, `a` aorist, `m` imperfect, `z` imperative |
//!
//! `-` fills any slot whose feature is unspecified, including the part of
//! speech slot. Trailing fillers may be omitted when parsing. Formatting always
//! writes the canonical slot count of the class (`A----`, `Nmsi-`, `V-s--1r`,
//! `D`) and only goes past it when a feature beyond the class slots is set.
//!
//! The packed form keeps every feature in its own bit field:
//!
//! ```text
//! bits  0..=4   part of speech
//! bits  5..=6   gender
//! bits  7..=8   number
//! bits  9..=10  article
//! bit   11      extended
//! bits 12..=13  person
//! bits 14..=16  tense
//! bits 17..=31  reserved, always zero
//! ```

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TagError {
    #[error("invalid packed tag {0:#010x}")]
    InvalidTag(u32),
    #[error("malformed tag string {tag:?}: {reason}")]
    MalformedTag { tag: String, reason: String },
}

fn malformed(tag: &str, reason: impl Into<String>) -> TagError {
    TagError::MalformedTag {
        tag: tag.to_owned(),
        reason: reason.into(),
    }
}

macro_rules! feature_enum {
    (
        $(#[$meta:meta])*
        $name:ident { $($variant:ident = $value:literal => $letter:literal),+ $(,)? }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
        #[repr(u8)]
        pub enum $name {
            #[default]
            Unspecified = 0,
            $($variant = $value),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$name::Unspecified, $($name::$variant),+];

            pub fn from_bits(bits: u32) -> Option<Self> {
                match bits {
                    0 => Some($name::Unspecified),
                    $($value => Some($name::$variant),)+
                    _ => None,
                }
            }

            /// Positional letter, `-` when unspecified.
            pub fn letter(self) -> char {
                match self {
                    $name::Unspecified => '-',
                    $($name::$variant => $letter,)+
                }
            }

            pub fn from_letter(c: char) -> Option<Self> {
                match c {
                    '-' => Some($name::Unspecified),
                    $($letter => Some($name::$variant),)+
                    _ => None,
                }
            }

            pub fn is_specified(self) -> bool {
                self != $name::Unspecified
            }
        }
    };
}

feature_enum! {
    /// Part of speech.
    PosClass {
        Noun = 1 => 'N',
        Adjective = 2 => 'A',
        Verb = 3 => 'V',
        Pronoun = 4 => 'P',
        Numeral = 5 => 'M',
        Adverb = 6 => 'D',
        Preposition = 7 => 'R',
        Conjunction = 8 => 'C',
        Particle = 9 => 'T',
        Interjection = 10 => 'I',
    }
}

feature_enum! {
    Gender { Masculine = 1 => 'm', Feminine = 2 => 'f', Neuter = 3 => 'n' }
}

feature_enum! {
    Number { Singular = 1 => 's', Plural = 2 => 'p' }
}

feature_enum! {
    /// Definiteness. `DefiniteFull` is the long masculine article (-ят).
    Article { Indefinite = 1 => 'i', Definite = 2 => 'd', DefiniteFull = 3 => 'f' }
}

feature_enum! {
    Person { First = 1 => '1', Second = 2 => '2', Third = 3 => '3' }
}

feature_enum! {
    Tense { Present = 1 => 'r', Aorist = 2 => 'a', Imperfect = 3 => 'm', Imperative = 4 => 'z' }
}

impl PosClass {
    /// Number of positions (including the class letter) in the canonical
    /// string form of this class.
    pub fn slot_count(self) -> usize {
        match self {
            PosClass::Noun | PosClass::Adjective | PosClass::Pronoun | PosClass::Numeral => 5,
            PosClass::Verb => 7,
            _ => 1,
        }
    }
}

/// A bundle of morphosyntactic features. `Default` is the "no information"
/// bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GramFeatures {
    pub pos: PosClass,
    pub gender: Gender,
    pub number: Number,
    pub article: Article,
    pub extended: bool,
    pub person: Person,
    pub tense: Tense,
}

const POS_SHIFT: u32 = 0;
const GENDER_SHIFT: u32 = 5;
const NUMBER_SHIFT: u32 = 7;
const ARTICLE_SHIFT: u32 = 9;
const EXTENDED_SHIFT: u32 = 11;
const PERSON_SHIFT: u32 = 12;
const TENSE_SHIFT: u32 = 14;

const POS_MASK: u32 = 0x1f;
const TWO_BITS: u32 = 0x3;
const TENSE_MASK: u32 = 0x7;
const RESERVED_MASK: u32 = !((1 << 17) - 1);

const MAX_SLOTS: usize = 7;

impl GramFeatures {
    /// Features with only the part of speech set.
    pub fn pos_only(pos: PosClass) -> Self {
        GramFeatures {
            pos,
            ..Default::default()
        }
    }

    /// Every combination of feature values, in a fixed order.
    pub fn all() -> impl Iterator<Item = GramFeatures> {
        PosClass::ALL.iter().flat_map(|&pos| {
            Gender::ALL.iter().flat_map(move |&gender| {
                Number::ALL.iter().flat_map(move |&number| {
                    Article::ALL.iter().flat_map(move |&article| {
                        [false, true].into_iter().flat_map(move |extended| {
                            Person::ALL.iter().flat_map(move |&person| {
                                Tense::ALL.iter().map(move |&tense| GramFeatures {
                                    pos,
                                    gender,
                                    number,
                                    article,
                                    extended,
                                    person,
                                    tense,
                                })
                            })
                        })
                    })
                })
            })
        })
    }

    pub fn encode(&self) -> PackedTag {
        PackedTag(
            (self.pos as u32) << POS_SHIFT
                | (self.gender as u32) << GENDER_SHIFT
                | (self.number as u32) << NUMBER_SHIFT
                | (self.article as u32) << ARTICLE_SHIFT
                | (self.extended as u32) << EXTENDED_SHIFT
                | (self.person as u32) << PERSON_SHIFT
                | (self.tense as u32) << TENSE_SHIFT,
        )
    }

    /// How many features carry information. Used as the specificity score
    /// during disambiguation.
    pub fn specified_count(&self) -> usize {
        [
            self.pos.is_specified(),
            self.gender.is_specified(),
            self.number.is_specified(),
            self.article.is_specified(),
            self.extended,
            self.person.is_specified(),
            self.tense.is_specified(),
        ]
        .iter()
        .filter(|&&b| b)
        .count()
    }

    /// Number of features specified in `self` that have the same value in
    /// `other`.
    pub fn matching_count(&self, other: &GramFeatures) -> usize {
        [
            self.pos.is_specified() && self.pos == other.pos,
            self.gender.is_specified() && self.gender == other.gender,
            self.number.is_specified() && self.number == other.number,
            self.article.is_specified() && self.article == other.article,
            self.extended && other.extended,
            self.person.is_specified() && self.person == other.person,
            self.tense.is_specified() && self.tense == other.tense,
        ]
        .iter()
        .filter(|&&b| b)
        .count()
    }

    /// True when every feature specified in `self` has the same value in
    /// `candidate`. An unset `extended` flag in the query matches anything.
    pub fn subsumes(&self, candidate: &GramFeatures) -> bool {
        fn slot<T: PartialEq + Copy>(q: T, c: T, unspecified: T) -> bool {
            q == unspecified || q == c
        }
        slot(self.pos, candidate.pos, PosClass::Unspecified)
            && slot(self.gender, candidate.gender, Gender::Unspecified)
            && slot(self.number, candidate.number, Number::Unspecified)
            && slot(self.article, candidate.article, Article::Unspecified)
            && (!self.extended || candidate.extended)
            && slot(self.person, candidate.person, Person::Unspecified)
            && slot(self.tense, candidate.tense, Tense::Unspecified)
    }

    fn slot_letters(&self) -> [char; MAX_SLOTS] {
        [
            self.pos.letter(),
            self.gender.letter(),
            self.number.letter(),
            self.article.letter(),
            if self.extended { 'e' } else { '-' },
            self.person.letter(),
            self.tense.letter(),
        ]
    }
}

/// Encode a feature bundle into its 32-bit form.
pub fn encode_tag(features: &GramFeatures) -> PackedTag {
    features.encode()
}

/// Decode a 32-bit tag, rejecting reserved bits and out-of-range fields.
pub fn decode_tag(packed: PackedTag) -> Result<GramFeatures, TagError> {
    packed.decode()
}

/// Parse a positional tag string such as `Amsf-`.
pub fn parse_tag_string(s: &str) -> Result<GramFeatures, TagError> {
    let mut chars = s.chars();
    let Some(first) = chars.next() else {
        return Err(malformed(s, "empty tag"));
    };
    let pos = PosClass::from_letter(first)
        .ok_or_else(|| malformed(s, format!("unknown part of speech {first:?}")))?;
    let mut f = GramFeatures::pos_only(pos);

    for (slot, c) in chars.enumerate() {
        let bad = || malformed(s, format!("unexpected {c:?} at position {}", slot + 2));
        match slot {
            0 => f.gender = Gender::from_letter(c).ok_or_else(bad)?,
            1 => f.number = Number::from_letter(c).ok_or_else(bad)?,
            2 => f.article = Article::from_letter(c).ok_or_else(bad)?,
            3 => {
                f.extended = match c {
                    'e' => true,
                    '-' => false,
                    _ => return Err(bad()),
                }
            }
            4 => f.person = Person::from_letter(c).ok_or_else(bad)?,
            5 => f.tense = Tense::from_letter(c).ok_or_else(bad)?,
            _ => return Err(malformed(s, format!("longer than {MAX_SLOTS} positions"))),
        }
    }
    Ok(f)
}

/// Render features in canonical positional form.
pub fn format_tag_string(features: &GramFeatures) -> String {
    let letters = features.slot_letters();
    let last_set = letters.iter().rposition(|&c| c != '-').map_or(0, |i| i + 1);
    let len = features.pos.slot_count().max(last_set);
    letters[..len].iter().collect()
}

/// Wildcard match of a query against a candidate tag.
pub fn tags_compatible(query: &GramFeatures, candidate: &GramFeatures) -> bool {
    query.subsumes(candidate)
}

impl fmt::Display for GramFeatures {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_tag_string(self))
    }
}

impl FromStr for GramFeatures {
    type Err = TagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_tag_string(s)
    }
}

/// Features packed into a `u32`. Only values produced by [`GramFeatures::encode`]
/// or accepted by [`PackedTag::decode`] are meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PackedTag(pub u32);

impl PackedTag {
    pub const NONE: PackedTag = PackedTag(0);

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn decode(self) -> Result<GramFeatures, TagError> {
        let v = self.0;
        let err = || TagError::InvalidTag(v);
        if v & RESERVED_MASK != 0 {
            return Err(err());
        }
        Ok(GramFeatures {
            pos: PosClass::from_bits((v >> POS_SHIFT) & POS_MASK).ok_or_else(err)?,
            gender: Gender::from_bits((v >> GENDER_SHIFT) & TWO_BITS).ok_or_else(err)?,
            number: Number::from_bits((v >> NUMBER_SHIFT) & TWO_BITS).ok_or_else(err)?,
            article: Article::from_bits((v >> ARTICLE_SHIFT) & TWO_BITS).ok_or_else(err)?,
            extended: (v >> EXTENDED_SHIFT) & 1 == 1,
            person: Person::from_bits((v >> PERSON_SHIFT) & TWO_BITS).ok_or_else(err)?,
            tense: Tense::from_bits((v >> TENSE_SHIFT) & TENSE_MASK).ok_or_else(err)?,
        })
    }
}

impl From<GramFeatures> for PackedTag {
    fn from(f: GramFeatures) -> Self {
        f.encode()
    }
}

impl TryFrom<PackedTag> for GramFeatures {
    type Error = TagError;

    fn try_from(p: PackedTag) -> Result<Self, Self::Error> {
        p.decode()
    }
}

/// `0x` followed by eight lowercase hex digits.
impl fmt::Display for PackedTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#010x}", self.0)
    }
}

/// Accepts hex with or without a `0x` prefix. Does not validate the fields.
impl FromStr for PackedTag {
    type Err = TagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .strip_prefix("0x")
            .or_else(|| s.strip_prefix("0X"))
            .unwrap_or(s);
        if digits.is_empty() || digits.len() > 8 {
            return Err(malformed(s, "expected up to 8 hex digits"));
        }
        u32::from_str_radix(digits, 16)
            .map(PackedTag)
            .map_err(|_| malformed(s, "not a hex number"))
    }
}
