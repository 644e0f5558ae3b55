//! On-disk dictionary format, version 1.
//!
//! ```text
//! "BGLX" 0x01 '\n'
//! u32 type_count  u32 lemma_count  u32 surface_count  u32 form_count
//! type_count    x str
//! lemma_count   x (str lemma, u32 n, n x u32 type index)
//! surface_count x (str surface, u32 n, n x (u32 lemma index, u32 tag, u32 type index))
//! u32 crc32 of every preceding byte
//! ```
//!
//! Integers are little-endian, strings are a u32 byte length followed by
//! UTF-8. Tables are written in sorted order so equal dictionaries produce
//! identical files.

use std::collections::HashMap;

use thiserror::Error;

use super::{Dictionary, RawCandidate};
use crate::paradigms::is_valid_type_id;

pub const MAGIC: &[u8; 4] = b"BGLX";
pub const FORMAT_VERSION: u8 = 1;
const HEADER_LEN: usize = 6;
const COUNTS_LEN: usize = 16;
const CRC_LEN: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("not a dictionary file (bad magic bytes)")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),
    #[error("file is truncated")]
    Truncated,
    #[error("checksum mismatch (stored {stored:#010x}, computed {computed:#010x})")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("corrupt dictionary: {0}")]
    Corrupt(String),
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_len(out: &mut Vec<u8>, n: usize) {
    put_u32(out, u32::try_from(n).expect("table larger than u32::MAX"));
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    put_len(out, s.len());
    out.extend_from_slice(s.as_bytes());
}

pub(super) fn encode(dict: &Dictionary) -> Vec<u8> {
    let surfaces = dict.surfaces();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(FORMAT_VERSION);
    out.push(b'\n');
    put_len(&mut out, dict.types.len());
    put_len(&mut out, dict.lemmas.len());
    put_len(&mut out, surfaces.len());
    put_len(&mut out, dict.form_count);

    for t in &dict.types {
        put_str(&mut out, t);
    }
    for (lemma, types) in dict.lemmas.iter().zip(&dict.lemma_types) {
        put_str(&mut out, lemma);
        put_len(&mut out, types.len());
        for &t in types {
            put_u32(&mut out, t);
        }
    }
    for s in surfaces {
        let cands = &dict.forms[s];
        put_str(&mut out, s);
        put_len(&mut out, cands.len());
        for c in cands {
            put_u32(&mut out, c.lemma);
            put_u32(&mut out, c.tag.value());
            put_u32(&mut out, c.paradigm);
        }
    }
    let crc = crc32fast::hash(&out);
    put_u32(&mut out, crc);
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        let end = self.pos.checked_add(n).ok_or(FormatError::Truncated)?;
        let s = self.buf.get(self.pos..end).ok_or(FormatError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn len(&mut self) -> Result<usize, FormatError> {
        Ok(self.u32()? as usize)
    }

    fn str(&mut self) -> Result<&'a str, FormatError> {
        let n = self.len()?;
        std::str::from_utf8(self.take(n)?).map_err(|_| corrupt("invalid UTF-8 string"))
    }

    /// Capacity hint that cannot exceed what the remaining bytes could hold.
    fn cap(&self, n: usize, min_item: usize) -> usize {
        n.min((self.buf.len() - self.pos) / min_item)
    }
}

fn corrupt(msg: impl Into<String>) -> FormatError {
    FormatError::Corrupt(msg.into())
}

fn index(i: u32, len: usize, what: &str) -> Result<u32, FormatError> {
    if (i as usize) < len {
        Ok(i)
    } else {
        Err(corrupt(format!("{what} index {i} out of range")))
    }
}

fn strictly_increasing<T: Ord>(items: &[T]) -> bool {
    items.windows(2).all(|w| w[0] < w[1])
}

pub(super) fn decode(bytes: &[u8]) -> Result<Dictionary, FormatError> {
    if bytes.len() < HEADER_LEN {
        return if MAGIC.starts_with(&bytes[..bytes.len().min(4)]) && !bytes.is_empty() {
            Err(FormatError::Truncated)
        } else {
            Err(FormatError::BadMagic)
        };
    }
    if &bytes[..4] != MAGIC || bytes[5] != b'\n' {
        return Err(FormatError::BadMagic);
    }
    if bytes[4] != FORMAT_VERSION {
        return Err(FormatError::UnsupportedVersion(bytes[4]));
    }
    if bytes.len() < HEADER_LEN + COUNTS_LEN + CRC_LEN {
        return Err(FormatError::Truncated);
    }
    let (body, tail) = bytes.split_at(bytes.len() - CRC_LEN);
    let stored = u32::from_le_bytes([tail[0], tail[1], tail[2], tail[3]]);
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(FormatError::ChecksumMismatch { stored, computed });
    }

    let mut r = Reader {
        buf: body,
        pos: HEADER_LEN,
    };
    let type_count = r.len()?;
    let lemma_count = r.len()?;
    let surface_count = r.len()?;
    let form_count = r.len()?;

    let mut types = Vec::with_capacity(r.cap(type_count, 4));
    for _ in 0..type_count {
        let t = r.str()?;
        if !is_valid_type_id(t) {
            return Err(corrupt(format!("invalid paradigm type {t:?}")));
        }
        types.push(t.to_owned());
    }
    if !strictly_increasing(&types) {
        return Err(corrupt("paradigm type table not sorted"));
    }

    let mut lemmas = Vec::with_capacity(r.cap(lemma_count, 8));
    let mut lemma_types = Vec::with_capacity(r.cap(lemma_count, 8));
    for _ in 0..lemma_count {
        let l = r.str()?;
        if l.is_empty() {
            return Err(corrupt("empty lemma"));
        }
        let n = r.len()?;
        let mut ts = Vec::with_capacity(r.cap(n, 4));
        for _ in 0..n {
            ts.push(index(r.u32()?, types.len(), "type")?);
        }
        if !strictly_increasing(&ts) {
            return Err(corrupt(format!("type list of {l:?} not sorted")));
        }
        lemmas.push(l.to_owned());
        lemma_types.push(ts);
    }
    if !strictly_increasing(&lemmas) {
        return Err(corrupt("lemma table not sorted"));
    }

    let mut forms = HashMap::with_capacity(r.cap(surface_count, 8));
    let mut prev: Option<&str> = None;
    let mut seen_forms = 0usize;
    for _ in 0..surface_count {
        let s = r.str()?;
        if s.is_empty() || prev.is_some_and(|p| p >= s) {
            return Err(corrupt("surface table not sorted"));
        }
        prev = Some(s);
        let n = r.len()?;
        if n == 0 {
            return Err(corrupt(format!("surface {s:?} has no candidates")));
        }
        let mut cands = Vec::with_capacity(r.cap(n, 12));
        for _ in 0..n {
            let lemma = index(r.u32()?, lemmas.len(), "lemma")?;
            let tag = crate::tagset::PackedTag(r.u32()?);
            tag.decode().map_err(|e| corrupt(e.to_string()))?;
            let paradigm = index(r.u32()?, types.len(), "type")?;
            cands.push(RawCandidate {
                lemma,
                tag,
                paradigm,
            });
        }
        if !cands
            .windows(2)
            .all(|w| (w[0].lemma, w[0].tag) < (w[1].lemma, w[1].tag))
        {
            return Err(corrupt(format!("candidates of {s:?} not sorted")));
        }
        seen_forms += n;
        forms.insert(s.to_owned(), cands);
    }
    if seen_forms != form_count {
        return Err(corrupt("form count does not match surface table"));
    }
    if r.pos != body.len() {
        return Err(corrupt("trailing bytes after surface table"));
    }

    Ok(Dictionary {
        lemmas,
        lemma_types,
        types,
        forms,
        form_count,
    })
}
