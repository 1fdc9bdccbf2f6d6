//! Versioned binary container for fitted pipelines and trained models.
//!
//! Layout (all integers little-endian, floats 8-byte IEEE-754 LE):
//!
//! ```text
//! magic    8 bytes  "PARTISAN"
//! version  u16
//! count    u32      number of sections
//! section  repeated: tag u8, payload_len u64, payload bytes
//! ```
//!
//! Payload encodings use the primitives below: `u8`, `u32`, `u64`,
//! `f64`, `bool` (one byte, 0/1) and `str` (u64 byte length + UTF-8).
//! The full section-by-section layout is documented in
//! `docs/archive-format.md` at the repository root.

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"PARTISAN";
pub const VERSION: u16 = 1;

/// Section tags. Pipeline archives and model files share the container; a
/// model is simply an archive containing a `Model` section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectionTag {
    Config = 1,
    WordVocab = 2,
    CharVocab = 3,
    NbRatios = 4,
    BiasLexicons = 5,
    CountLexicons = 6,
    Standardizer = 7,
    Model = 8,
}

impl SectionTag {
    pub fn name(self) -> &'static str {
        match self {
            SectionTag::Config => "config",
            SectionTag::WordVocab => "word_vocab",
            SectionTag::CharVocab => "char_vocab",
            SectionTag::NbRatios => "nb_ratios",
            SectionTag::BiasLexicons => "bias_lexicons",
            SectionTag::CountLexicons => "count_lexicons",
            SectionTag::Standardizer => "standardizer",
            SectionTag::Model => "model",
        }
    }

    fn from_u8(tag: u8) -> Option<SectionTag> {
        match tag {
            1 => Some(SectionTag::Config),
            2 => Some(SectionTag::WordVocab),
            3 => Some(SectionTag::CharVocab),
            4 => Some(SectionTag::NbRatios),
            5 => Some(SectionTag::BiasLexicons),
            6 => Some(SectionTag::CountLexicons),
            7 => Some(SectionTag::Standardizer),
            8 => Some(SectionTag::Model),
            _ => None,
        }
    }
}

fn archive_err(section: &str, message: impl Into<String>) -> Error {
    Error::Archive {
        section: section.to_string(),
        message: message.into(),
    }
}

/// Append-only payload encoder.
#[derive(Debug, Default)]
pub struct Encoder {
    buf: Vec<u8>,
}

impl Encoder {
    pub fn new() -> Self {
        Encoder::default()
    }

    pub fn put_u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn put_bool(&mut self, v: bool) {
        self.buf.push(u8::from(v));
    }

    pub fn put_u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn put_u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn put_f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn put_str(&mut self, s: &str) {
        self.put_u64(s.len() as u64);
        self.buf.extend_from_slice(s.as_bytes());
    }

    pub fn put_f64_slice(&mut self, values: &[f64]) {
        self.put_u64(values.len() as u64);
        for v in values {
            self.put_f64(*v);
        }
    }

    pub fn put_u32_slice(&mut self, values: &[u32]) {
        self.put_u64(values.len() as u64);
        for v in values {
            self.put_u32(*v);
        }
    }

    pub fn put_str_slice<S: AsRef<str>>(&mut self, values: &[S]) {
        self.put_u64(values.len() as u64);
        for v in values {
            self.put_str(v.as_ref());
        }
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

/// Cursor over one section's payload; errors carry the section name.
pub struct Decoder<'a> {
    section: &'static str,
    data: &'a [u8],
    pos: usize,
}

impl<'a> Decoder<'a> {
    pub fn new(section: &'static str, data: &'a [u8]) -> Self {
        Decoder {
            section,
            data,
            pos: 0,
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(archive_err(
                self.section,
                format!(
                    "unexpected end of data at offset {} (wanted {n} more bytes)",
                    self.pos
                ),
            ));
        }
        let slice = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn bool(&mut self) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(archive_err(
                self.section,
                format!("invalid bool byte {other}"),
            )),
        }
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn len_prefix(&mut self) -> Result<usize> {
        let v = self.u64()?;
        usize::try_from(v)
            .map_err(|_| archive_err(self.section, format!("length {v} overflows usize")))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn str(&mut self) -> Result<String> {
        let n = self.len_prefix()?;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|e| archive_err(self.section, format!("invalid utf-8 string: {e}")))
    }

    pub fn f64_vec(&mut self) -> Result<Vec<f64>> {
        let n = self.len_prefix()?;
        (0..n).map(|_| self.f64()).collect()
    }

    pub fn u32_vec(&mut self) -> Result<Vec<u32>> {
        let n = self.len_prefix()?;
        (0..n).map(|_| self.u32()).collect()
    }

    pub fn str_vec(&mut self) -> Result<Vec<String>> {
        let n = self.len_prefix()?;
        (0..n).map(|_| self.str()).collect()
    }

    /// Everything was consumed; trailing bytes indicate a layout mismatch.
    pub fn finish(self) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(archive_err(
                self.section,
                format!("{} trailing bytes", self.data.len() - self.pos),
            ));
        }
        Ok(())
    }
}

/// Assemble an archive from tagged section payloads.
#[derive(Debug, Default)]
pub struct ArchiveWriter {
    sections: Vec<(SectionTag, Vec<u8>)>,
}

impl ArchiveWriter {
    pub fn new() -> Self {
        ArchiveWriter::default()
    }

    pub fn add(&mut self, tag: SectionTag, payload: Encoder) {
        self.sections.push((tag, payload.into_bytes()));
    }

    pub fn finish(self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.sections.len() as u32).to_le_bytes());
        for (tag, payload) in self.sections {
            out.push(tag as u8);
            out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
            out.extend_from_slice(&payload);
        }
        out
    }
}

/// Parsed archive: sections in file order.
#[derive(Debug)]
pub struct ArchiveReader<'a> {
    sections: Vec<(SectionTag, &'a [u8])>,
}

impl<'a> ArchiveReader<'a> {
    pub fn parse(bytes: &'a [u8]) -> Result<Self> {
        let mut cur = Decoder::new("header", bytes);
        let magic = cur.take(8)?;
        if magic != MAGIC {
            return Err(archive_err(
                "header",
                "bad magic; not a pipeline/model archive",
            ));
        }
        let version = u16::from_le_bytes(cur.take(2)?.try_into().unwrap());
        if version != VERSION {
            return Err(Error::ArchiveVersion {
                found: version,
                supported: VERSION,
            });
        }
        let count = cur.u32()?;
        let mut sections = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let tag_byte = cur.u8()?;
            let tag = SectionTag::from_u8(tag_byte)
                .ok_or_else(|| archive_err("header", format!("unknown section tag {tag_byte}")))?;
            let len = cur.len_prefix()?;
            let payload = cur
                .take(len)
                .map_err(|_| archive_err(tag.name(), "payload truncated"))?;
            sections.push((tag, payload));
        }
        cur.finish()?;
        Ok(ArchiveReader { sections })
    }

    pub fn find(&self, tag: SectionTag) -> Option<&'a [u8]> {
        self.sections
            .iter()
            .find(|(t, _)| *t == tag)
            .map(|(_, p)| *p)
    }

    pub fn require(&self, tag: SectionTag) -> Result<Decoder<'a>> {
        let payload = self
            .find(tag)
            .ok_or_else(|| archive_err(tag.name(), "section missing from archive"))?;
        Ok(Decoder::new(tag.name(), payload))
    }

    pub fn has(&self, tag: SectionTag) -> bool {
        self.find(tag).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitives_round_trip() {
        let mut enc = Encoder::new();
        enc.put_u8(7);
        enc.put_bool(true);
        enc.put_u32(123_456);
        enc.put_u64(u64::MAX - 1);
        enc.put_f64(-0.125);
        enc.put_str("héllo");
        enc.put_f64_slice(&[1.5, -2.5]);
        enc.put_str_slice(&["a", "bc"]);
        let bytes = enc.into_bytes();

        let mut dec = Decoder::new("test", &bytes);
        assert_eq!(dec.u8().unwrap(), 7);
        assert!(dec.bool().unwrap());
        assert_eq!(dec.u32().unwrap(), 123_456);
        assert_eq!(dec.u64().unwrap(), u64::MAX - 1);
        assert_eq!(dec.f64().unwrap(), -0.125);
        assert_eq!(dec.str().unwrap(), "héllo");
        assert_eq!(dec.f64_vec().unwrap(), vec![1.5, -2.5]);
        assert_eq!(dec.str_vec().unwrap(), vec!["a", "bc"]);
        dec.finish().unwrap();
    }

    #[test]
    fn truncated_payload_errors_with_section() {
        let mut enc = Encoder::new();
        enc.put_str("something long enough");
        let mut w = ArchiveWriter::new();
        w.add(SectionTag::Model, enc);
        let mut bytes = w.finish();
        bytes.truncate(bytes.len() - 4);
        let err = ArchiveReader::parse(&bytes).unwrap_err();
        match err {
            Error::Archive { section, .. } => assert_eq!(section, "model"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_magic_rejected() {
        let bytes = b"NOTANARC\x01\x00\x00\x00\x00\x00".to_vec();
        assert!(matches!(
            ArchiveReader::parse(&bytes).unwrap_err(),
            Error::Archive { .. }
        ));
    }

    #[test]
    fn future_version_rejected_explicitly() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(MAGIC);
        bytes.extend_from_slice(&99u16.to_le_bytes());
        bytes.extend_from_slice(&0u32.to_le_bytes());
        match ArchiveReader::parse(&bytes).unwrap_err() {
            Error::ArchiveVersion { found, supported } => {
                assert_eq!(found, 99);
                assert_eq!(supported, VERSION);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sections_found_by_tag() {
        let mut enc = Encoder::new();
        enc.put_u32(5);
        let mut w = ArchiveWriter::new();
        w.add(SectionTag::Config, enc);
        let bytes = w.finish();
        let reader = ArchiveReader::parse(&bytes).unwrap();
        assert!(reader.has(SectionTag::Config));
        assert!(!reader.has(SectionTag::Model));
        assert!(reader.require(SectionTag::Model).is_err());
        let mut dec = reader.require(SectionTag::Config).unwrap();
        assert_eq!(dec.u32().unwrap(), 5);
    }
}
