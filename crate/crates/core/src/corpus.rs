//! Labeled document collections: loading, serialization and splitting.
//!
//! The canonical on-disk format is JSONL with one object per line and keys
//! `id` (string), `text` (string) and optional `label` (integer 0/1). A
//! three-column TSV (`id<TAB>label<TAB>text`, no header) is accepted as well;
//! an empty label column means unlabeled.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};

/// One article: a unique id, the raw text (title concatenated before the
/// body by the producer, when present) and an optional binary label where
/// `true` marks the hyperpartisan class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: Option<bool>,
}

impl Document {
    pub fn labeled(id: impl Into<String>, text: impl Into<String>, positive: bool) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            label: Some(positive),
        }
    }

    pub fn unlabeled(id: impl Into<String>, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            label: None,
        }
    }

    /// Label as 0/1, when present.
    pub fn label_u8(&self) -> Option<u8> {
        self.label.map(u8::from)
    }
}

/// An ordered, immutable document collection. Label presence is all-or-none:
/// a corpus is either fully labeled or fully unlabeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    name: String,
    documents: Vec<Document>,
}

impl Corpus {
    /// Validate ids (non-empty, unique) and label homogeneity.
    pub fn new(name: impl Into<String>, documents: Vec<Document>) -> Result<Self> {
        let name = name.into();
        let mut seen: HashSet<&str> = HashSet::with_capacity(documents.len());
        for (idx, doc) in documents.iter().enumerate() {
            if doc.id.is_empty() {
                return Err(Error::MalformedRecord {
                    line: idx + 1,
                    message: "empty document id".into(),
                });
            }
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateId {
                    id: doc.id.clone(),
                    line: idx + 1,
                });
            }
        }
        let labeled = documents.iter().filter(|d| d.label.is_some()).count();
        if labeled != 0 && labeled != documents.len() {
            return Err(Error::MixedLabels { name });
        }
        Ok(Corpus { name, documents })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// True when every document carries a label (and the corpus is non-empty).
    pub fn is_labeled(&self) -> bool {
        !self.documents.is_empty() && self.documents.iter().all(|d| d.label.is_some())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Document> {
        self.documents.iter()
    }

    /// Labels as 0/1 in document order; errors when the corpus is unlabeled.
    pub fn labels(&self) -> Result<Vec<u8>> {
        self.documents
            .iter()
            .map(|d| {
                d.label_u8().ok_or_else(|| Error::UnlabeledCorpus {
                    name: self.name.clone(),
                })
            })
            .collect()
    }
}

/// Supported corpus file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    Tsv,
}

impl CorpusFormat {
    /// Guess from the file extension; defaults to JSONL.
    pub fn from_path(path: &Path) -> CorpusFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tsv") | Some("txt") => CorpusFormat::Tsv,
            _ => CorpusFormat::Jsonl,
        }
    }
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    text: String,
    #[serde(default)]
    label: Option<i64>,
}

fn parse_label(raw: Option<i64>, line: usize) -> Result<Option<bool>> {
    match raw {
        None => Ok(None),
        Some(0) => Ok(Some(false)),
        Some(1) => Ok(Some(true)),
        Some(other) => Err(Error::InvalidLabel {
            line,
            value: other.to_string(),
        }),
    }
}

/// Load a corpus from disk. Order is preserved; the corpus name is the file
/// stem. Malformed records and duplicate ids are reported with their line
/// number.
pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Corpus> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("corpus")
        .to_string();

    let mut documents = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (zero_line, raw_line) in content.lines().enumerate() {
        let line = zero_line + 1;
        if raw_line.trim().is_empty() {
            continue;
        }
        let doc = match format {
            CorpusFormat::Jsonl => {
                let rec: RawRecord =
                    serde_json::from_str(raw_line).map_err(|e| Error::MalformedRecord {
                        line,
                        message: e.to_string(),
                    })?;
                Document {
                    id: rec.id,
                    text: rec.text,
                    label: parse_label(rec.label, line)?,
                }
            }
            CorpusFormat::Tsv => {
                let mut parts = raw_line.splitn(3, '\t');
                let id = parts.next().unwrap_or_default();
                let label_field = parts.next().ok_or_else(|| Error::MalformedRecord {
                    line,
                    message: "expected id<TAB>label<TAB>text".into(),
                })?;
                let text = parts.next().ok_or_else(|| Error::MalformedRecord {
                    line,
                    message: "expected id<TAB>label<TAB>text".into(),
                })?;
                let label = if label_field.is_empty() {
                    None
                } else {
                    let value: i64 = label_field.parse().map_err(|_| Error::InvalidLabel {
                        line,
                        value: label_field.to_string(),
                    })?;
                    parse_label(Some(value), line)?
                };
                Document {
                    id: id.to_string(),
                    text: text.to_string(),
                    label,
                }
            }
        };
        if doc.id.is_empty() {
            return Err(Error::MalformedRecord {
                line,
                message: "empty document id".into(),
            });
        }
        if !seen.insert(doc.id.clone()) {
            return Err(Error::DuplicateId { id: doc.id, line });
        }
        documents.push(doc);
    }

    let labeled = documents.iter().filter(|d| d.label.is_some()).count();
    if labeled != 0 && labeled != documents.len() {
        return Err(Error::MixedLabels { name });
    }
    Ok(Corpus { name, documents })
}

/// Write a corpus back to disk in the given format. Loading the result
/// yields a record-equivalent corpus.
pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>, format: CorpusFormat) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    for doc in corpus.iter() {
        match format {
            CorpusFormat::Jsonl => {
                let mut obj = serde_json::Map::new();
                obj.insert("id".into(), serde_json::Value::String(doc.id.clone()));
                obj.insert("text".into(), serde_json::Value::String(doc.text.clone()));
                if let Some(l) = doc.label_u8() {
                    obj.insert("label".into(), serde_json::Value::from(l));
                }
                serde_json::to_writer(&mut out, &serde_json::Value::Object(obj))
                    .expect("in-memory json write cannot fail");
                out.push(b'\n');
            }
            CorpusFormat::Tsv => {
                let label = doc.label_u8().map(|l| l.to_string()).unwrap_or_default();
                writeln!(&mut out, "{}\t{}\t{}", doc.id, label, doc.text)
                    .expect("in-memory write cannot fail");
            }
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Deterministic stratified split of a labeled corpus.
///
/// The first part receives `round(fraction * N)` documents overall and,
/// per class, within one document of `fraction * class_size`. The two parts
/// are disjoint and their union is the input.
pub fn split_corpus(corpus: &Corpus, fraction: f64, seed: u64) -> Result<(Corpus, Corpus)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidFraction(fraction));
    }
    if !corpus.is_labeled() {
        return Err(Error::UnlabeledCorpus {
            name: corpus.name().to_string(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total_target = (fraction * corpus.len() as f64).round() as usize;

    // Shuffle indices within each class, negatives first for determinism.
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (idx, doc) in corpus.iter().enumerate() {
        by_class[doc.label_u8().unwrap() as usize].push(idx);
    }
    for group in &mut by_class {
        group.shuffle(&mut rng);
    }

    // Floor per class, then hand out the remainder by largest fractional part.
    let exact: Vec<f64> = by_class.iter().map(|g| fraction * g.len() as f64).collect();
    let mut take: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut remainder = total_target.saturating_sub(take.iter().sum::<usize>());
    let mut order: Vec<usize> = (0..2).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &class in &order {
        if remainder == 0 {
            break;
        }
        if take[class] < by_class[class].len() {
            take[class] += 1;
            remainder -= 1;
        }
    }

    let mut first_idx: Vec<usize> = Vec::with_capacity(total_target);
    let mut second_idx: Vec<usize> = Vec::new();
    for (class, group) in by_class.iter().enumerate() {
        first_idx.extend(&group[..take[class]]);
        second_idx.extend(&group[take[class]..]);
    }
    // Restore file order inside each part.
    first_idx.sort_unstable();
    second_idx.sort_unstable();

    let pick = |idx: &[usize]| -> Vec<Document> {
        idx.iter().map(|&i| corpus.documents()[i].clone()).collect()
    };
    let first = Corpus {
        name: format!("{}-a", corpus.name()),
        documents: pick(&first_idx),
    };
    let second = Corpus {
        name: format!("{}-b", corpus.name()),
        documents: pick(&second_idx),
    };
    Ok((first, second))
}
