//! Local lexical passage retrieval.
//!
//! Okapi BM25 over a user-supplied corpus with fixed parameters k1 = 1.2,
//! b = 0.75 and idf = ln((N - df + 0.5) / (df + 0.5) + 1). Tokenization is
//! Unicode word segmentation, lowercased, no stemming. Scores accumulate in
//! a fixed order (query tokens as given, postings by document index), so a
//! corpus, query, and k always produce the same ranked list, bit for bit,
//! on every platform.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

pub const BM25_K1: f64 = 1.2;
pub const BM25_B: f64 = 0.75;

const INDEX_MAGIC: &[u8; 5] = b"SBIDX";
const INDEX_VERSION: u32 = 1;

/// One retrievable passage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Passage {
    pub id: String,
    #[serde(default)]
    pub title: String,
    pub body: String,
    #[serde(default)]
    pub source: String,
}

impl Passage {
    /// Text as inlined into prompts: title line (when present) then body.
    pub fn context_text(&self) -> String {
        if self.title.is_empty() {
            self.body.clone()
        } else {
            format!("{}\n{}", self.title, self.body)
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RetrievalError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("duplicate passage id: {0}")]
    DuplicateId(String),
    #[error("passage {0} has an empty body")]
    EmptyBody(String),
    #[error("corpus file {path}: {message}")]
    CorpusIo { path: PathBuf, message: String },
    #[error("index file {path}: {message}")]
    IndexIo { path: PathBuf, message: String },
    #[error("index file {path}: format version {found}, expected {expected}")]
    VersionMismatch {
        path: PathBuf,
        found: u32,
        expected: u32,
    },
}

/// Lowercased Unicode word tokens of `text`.
pub fn tokenize(text: &str) -> Vec<String> {
    text.unicode_words().map(|w| w.to_lowercase()).collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct IndexData {
    passages: Vec<Passage>,
    /// term -> postings as (passage index, term frequency), ascending index
    postings: BTreeMap<String, Vec<(u32, u32)>>,
    doc_lengths: Vec<u32>,
    avg_doc_length: f64,
}

/// Immutable BM25 index over a corpus.
#[derive(Debug)]
pub struct RetrievalIndex {
    data: IndexData,
}

impl RetrievalIndex {
    pub fn doc_count(&self) -> usize {
        self.data.passages.len()
    }

    pub fn avg_doc_length(&self) -> f64 {
        self.data.avg_doc_length
    }

    pub fn doc_length(&self, idx: usize) -> u32 {
        self.data.doc_lengths[idx]
    }

    /// Number of passages containing `term` (after tokenization rules).
    pub fn document_frequency(&self, term: &str) -> usize {
        self.data.postings.get(term).map(Vec::len).unwrap_or(0)
    }

    pub fn passages(&self) -> &[Passage] {
        &self.data.passages
    }
}

/// Builds the index. Ids must be unique and every body non-empty; the
/// indexed text is the title concatenated with the body.
pub fn build_index(corpus: Vec<Passage>) -> Result<RetrievalIndex, RetrievalError> {
    if corpus.is_empty() {
        return Err(RetrievalError::EmptyCorpus);
    }
    let mut seen = BTreeSet::new();
    for passage in &corpus {
        if passage.body.trim().is_empty() {
            return Err(RetrievalError::EmptyBody(passage.id.clone()));
        }
        if !seen.insert(passage.id.clone()) {
            return Err(RetrievalError::DuplicateId(passage.id.clone()));
        }
    }

    let mut postings: BTreeMap<String, Vec<(u32, u32)>> = BTreeMap::new();
    let mut doc_lengths = Vec::with_capacity(corpus.len());
    for (doc, passage) in corpus.iter().enumerate() {
        let tokens = tokenize(&format!("{} {}", passage.title, passage.body));
        doc_lengths.push(tokens.len() as u32);
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for token in tokens {
            *counts.entry(token).or_insert(0) += 1;
        }
        for (term, tf) in counts {
            postings.entry(term).or_default().push((doc as u32, tf));
        }
    }
    let total: u64 = doc_lengths.iter().map(|&l| l as u64).sum();
    let avg_doc_length = total as f64 / corpus.len() as f64;

    Ok(RetrievalIndex {
        data: IndexData {
            passages: corpus,
            postings,
            doc_lengths,
            avg_doc_length,
        },
    })
}

/// Top-k passages for a query, score descending, ties broken by passage id
/// ascending. Unmatched passages never appear; k = 0 or an out-of-corpus
/// query yields an empty list.
pub fn retrieve<'a>(
    index: &'a RetrievalIndex,
    query: &str,
    k: usize,
) -> Vec<(&'a Passage, f64)> {
    if k == 0 {
        return Vec::new();
    }
    let data = &index.data;
    let n = data.passages.len() as f64;
    let mut scores: Vec<f64> = vec![0.0; data.passages.len()];
    let mut matched: Vec<bool> = vec![false; data.passages.len()];

    for token in tokenize(query) {
        let Some(postings) = data.postings.get(&token) else {
            continue;
        };
        let df = postings.len() as f64;
        let idf = ((n - df + 0.5) / (df + 0.5) + 1.0).ln();
        for &(doc, tf) in postings {
            let doc = doc as usize;
            let tf = tf as f64;
            let dl = data.doc_lengths[doc] as f64;
            let norm = tf * (BM25_K1 + 1.0)
                / (tf + BM25_K1 * (1.0 - BM25_B + BM25_B * dl / data.avg_doc_length));
            scores[doc] += idf * norm;
            matched[doc] = true;
        }
    }

    let mut hits: Vec<(usize, f64)> = (0..data.passages.len())
        .filter(|&doc| matched[doc])
        .map(|doc| (doc, scores[doc]))
        .collect();
    hits.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| data.passages[a.0].id.cmp(&data.passages[b.0].id))
    });
    hits.truncate(k);
    hits.into_iter()
        .map(|(doc, score)| (&data.passages[doc], score))
        .collect()
}

/// Loads a corpus from the canonical line-delimited passage format.
pub fn load_corpus(path: &Path) -> Result<Vec<Passage>, RetrievalError> {
    let file = File::open(path).map_err(|e| RetrievalError::CorpusIo {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut passages = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| RetrievalError::CorpusIo {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let passage: Passage =
            serde_json::from_str(&line).map_err(|e| RetrievalError::CorpusIo {
                path: path.to_path_buf(),
                message: format!("line {}: {e}", idx + 1),
            })?;
        passages.push(passage);
    }
    Ok(passages)
}

pub fn write_corpus(path: &Path, passages: &[Passage]) -> Result<(), RetrievalError> {
    let mut file = File::create(path).map_err(|e| RetrievalError::CorpusIo {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    for passage in passages {
        let line = serde_json::to_string(passage).expect("passage serializes");
        writeln!(file, "{line}").map_err(|e| RetrievalError::CorpusIo {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    }
    Ok(())
}

/// Persists the index: magic, format version, then the index payload.
pub fn save_index(index: &RetrievalIndex, path: &Path) -> Result<(), RetrievalError> {
    let io_err = |e: std::io::Error| RetrievalError::IndexIo {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut file = File::create(path).map_err(io_err)?;
    file.write_all(INDEX_MAGIC).map_err(io_err)?;
    file.write_all(&INDEX_VERSION.to_le_bytes()).map_err(io_err)?;
    let payload = serde_json::to_vec(&index.data).map_err(|e| RetrievalError::IndexIo {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    file.write_all(&payload).map_err(io_err)?;
    Ok(())
}

pub fn load_index(path: &Path) -> Result<RetrievalIndex, RetrievalError> {
    let io_err = |e: std::io::Error| RetrievalError::IndexIo {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut file = File::open(path).map_err(io_err)?;
    let mut magic = [0u8; 5];
    file.read_exact(&mut magic).map_err(io_err)?;
    if &magic != INDEX_MAGIC {
        return Err(RetrievalError::IndexIo {
            path: path.to_path_buf(),
            message: "not an index file (bad magic)".into(),
        });
    }
    let mut version = [0u8; 4];
    file.read_exact(&mut version).map_err(io_err)?;
    let version = u32::from_le_bytes(version);
    if version != INDEX_VERSION {
        return Err(RetrievalError::VersionMismatch {
            path: path.to_path_buf(),
            found: version,
            expected: INDEX_VERSION,
        });
    }
    let mut payload = Vec::new();
    file.read_to_end(&mut payload).map_err(io_err)?;
    let data: IndexData =
        serde_json::from_slice(&payload).map_err(|e| RetrievalError::IndexIo {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    Ok(RetrievalIndex { data })
}
