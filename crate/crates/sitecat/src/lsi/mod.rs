//! The latent semantic index: a log-entropy weighted term-document
//! matrix reduced by truncated SVD, queried by cosine similarity.
//!
//! Co-occurring terms share directions in the reduced space, so a query
//! can match documents that use none of its words, as long as the corpus
//! established the relationship. That concept-level matching, rather
//! than literal word overlap, is the reason this retrieval engine is
//! paired with a noisy source of text like spidered web pages.
//!
//! Queries are folded into the reduced space without rebuilding the
//! factorization: the weighted query vector is projected onto the k
//! latent axes (`U_k^T q`). Documents live in the same axes, scaled by
//! their singular values (the columns of `Sigma_k V_k^T`). At full rank
//! this reproduces plain weighted-cosine ranking over the original
//! matrix exactly.

mod io;
pub mod svd;

pub use io::{load_index, save_index};
pub use svd::{svd, Svd};

use std::collections::{BTreeSet, HashMap};

use ndarray::{Array1, Array2};
use thiserror::Error;

use crate::taxonomy::CategoryCode;

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("cannot build an index from an empty document list")]
    EmptyCorpus,

    #[error("vocabulary is empty after min_df={0} pruning")]
    EmptyVocabulary(usize),

    #[error("training document {0:?} has no labels")]
    UnlabeledDoc(String),

    #[error("duplicate document id {0:?}")]
    DuplicateDocId(String),

    #[error("rank must be at least 1")]
    ZeroRank,

    #[error("index io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("index file checksum mismatch (file truncated or corrupted)")]
    ChecksumMismatch,

    #[error("index file format/version mismatch (expected version {expected}, found {found})")]
    FormatVersionMismatch { expected: u32, found: u32 },

    #[error("index file is corrupt: {0}")]
    Corrupt(String),
}

/// Index construction knobs.
#[derive(Debug, Clone)]
pub struct IndexConfig {
    /// Target rank k of the truncated SVD; clamped to the matrix rank.
    pub rank: usize,
    /// Minimum document frequency for a term to enter the vocabulary.
    pub min_df: usize,
    /// Terms dropped during tokenization (empty by default).
    pub stopwords: BTreeSet<String>,
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig {
            rank: 100,
            min_df: 2,
            stopwords: BTreeSet::new(),
        }
    }
}

/// One pre-labeled training document.
#[derive(Debug, Clone)]
pub struct TrainingDoc {
    pub id: String,
    pub text: String,
    pub labels: BTreeSet<CategoryCode>,
}

/// Term ids, document frequencies, and entropy weights for the retained
/// vocabulary. Term ids are dense and ordered by first occurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    ids: HashMap<String, u32>,
    doc_freq: Vec<u32>,
    global_weight: Vec<f64>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id(&self, term: &str) -> Option<u32> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: u32) -> &str {
        &self.terms[id as usize]
    }

    pub fn doc_freq_of(&self, id: u32) -> u32 {
        self.doc_freq[id as usize]
    }

    pub fn global_weight_of(&self, id: u32) -> f64 {
        self.global_weight[id as usize]
    }
}

/// Sparse weighted term-document matrix (columns are documents).
#[derive(Debug, Clone)]
pub struct TermDocMatrix {
    n_terms: usize,
    /// per document: (term id, weighted value), term ids ascending.
    cols: Vec<Vec<(u32, f64)>>,
}

impl TermDocMatrix {
    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn n_docs(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, doc: usize) -> &[(u32, f64)] {
        &self.cols[doc]
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.n_terms, self.cols.len()));
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                a[[i as usize, j]] = v;
            }
        }
        a
    }
}

/// The persisted trained model: vocabulary and weighting statistics,
/// rank-k factors, and per-document ids and label sets.
///
/// Immutable once built; queries ([`fold_in_query`], [`search`]) are
/// read-only and safe to run concurrently.
#[derive(Debug, Clone)]
pub struct LsiIndex {
    pub(crate) vocabulary: Vocabulary,
    pub(crate) rank: usize,
    /// |V| x k left factor (U_k).
    pub(crate) term_factors: Array2<f64>,
    /// k singular values, positive and non-increasing.
    pub(crate) singular_values: Array1<f64>,
    /// n_docs x k document vectors: row j is the j-th column of
    /// Sigma_k V_k^T, the document in reduced space.
    pub(crate) doc_vectors: Array2<f64>,
    pub(crate) doc_ids: Vec<String>,
    pub(crate) doc_labels: Vec<BTreeSet<CategoryCode>>,
}

impl LsiIndex {
    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    /// The rank actually used (the requested rank clamped to the matrix
    /// rank).
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn doc_id(&self, index: usize) -> &str {
        &self.doc_ids[index]
    }

    pub fn doc_labels(&self, index: usize) -> &BTreeSet<CategoryCode> {
        &self.doc_labels[index]
    }

    pub fn all_doc_labels(&self) -> &[BTreeSet<CategoryCode>] {
        &self.doc_labels
    }

    pub fn singular_values(&self) -> &Array1<f64> {
        &self.singular_values
    }

    pub fn term_factors(&self) -> &Array2<f64> {
        &self.term_factors
    }

    pub fn doc_vectors(&self) -> &Array2<f64> {
        &self.doc_vectors
    }
}

/// One ranked match from [`search`].
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub doc_index: usize,
    pub doc_id: String,
    pub similarity: f64,
}

/// Splits text into index terms: lowercase, split on non-alphanumeric,
/// drop pure numbers and single characters, drop stopwords.
pub fn tokenize(text: &str, stopwords: &BTreeSet<String>) -> Vec<String> {
    let lower = text.to_lowercase();
    lower
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2)
        .filter(|t| !t.chars().all(|c| c.is_ascii_digit()))
        .filter(|t| !stopwords.contains(*t))
        .map(str::to_string)
        .collect()
}

fn term_counts(tokens: &[String]) -> HashMap<&str, u32> {
    let mut counts = HashMap::new();
    for t in tokens {
        *counts.entry(t.as_str()).or_insert(0) += 1;
    }
    counts
}

/// Builds the vocabulary (first-occurrence order) and the log-entropy
/// weighted term-document matrix for a tokenized corpus.
fn build_matrix(
    docs_tokens: &[Vec<String>],
    min_df: usize,
) -> Result<(Vocabulary, TermDocMatrix), IndexError> {
    let n_docs = docs_tokens.len();

    // document frequencies, in first-occurrence order
    let mut order: Vec<String> = Vec::new();
    let mut df: HashMap<String, u32> = HashMap::new();
    for tokens in docs_tokens {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for t in tokens {
            if seen.insert(t) {
                let e = df.entry(t.clone()).or_insert(0);
                if *e == 0 {
                    order.push(t.clone());
                }
                *e += 1;
            }
        }
    }

    let mut terms = Vec::new();
    let mut ids = HashMap::new();
    let mut doc_freq = Vec::new();
    for term in order {
        let d = df[&term];
        if d as usize >= min_df {
            ids.insert(term.clone(), terms.len() as u32);
            terms.push(term);
            doc_freq.push(d);
        }
    }
    if terms.is_empty() {
        return Err(IndexError::EmptyVocabulary(min_df));
    }

    // raw term frequencies per document, restricted to the vocabulary
    let mut tf_cols: Vec<Vec<(u32, u32)>> = Vec::with_capacity(n_docs);
    let mut corpus_freq = vec![0u64; terms.len()];
    for tokens in docs_tokens {
        let counts = term_counts(tokens);
        let mut col: Vec<(u32, u32)> = counts
            .iter()
            .filter_map(|(t, c)| ids.get(*t).map(|id| (*id, *c)))
            .collect();
        col.sort_unstable_by_key(|(id, _)| *id);
        for &(id, c) in &col {
            corpus_freq[id as usize] += c as u64;
        }
        tf_cols.push(col);
    }

    // entropy global weight: 1 + sum_j (p_ij ln p_ij) / ln n
    let ln_n = (n_docs as f64).ln();
    let mut global_weight = vec![1.0f64; terms.len()];
    if n_docs > 1 {
        let mut entropy = vec![0.0f64; terms.len()];
        for col in &tf_cols {
            for &(id, c) in col {
                let p = c as f64 / corpus_freq[id as usize] as f64;
                entropy[id as usize] += p * p.ln();
            }
        }
        for (g, e) in global_weight.iter_mut().zip(&entropy) {
            *g = 1.0 + e / ln_n;
        }
    }

    let cols: Vec<Vec<(u32, f64)>> = tf_cols
        .iter()
        .map(|col| {
            col.iter()
                .filter_map(|&(id, c)| {
                    let v = (1.0 + c as f64).ln() * global_weight[id as usize];
                    (v != 0.0).then_some((id, v))
                })
                .collect()
        })
        .collect();

    let n_terms = terms.len();
    Ok((
        Vocabulary {
            terms,
            ids,
            doc_freq,
            global_weight,
        },
        TermDocMatrix { n_terms, cols },
    ))
}

/// Builds the index: tokenizes, weights, factorizes, and attaches labels.
/// The requested rank is clamped to the matrix rank; compare
/// [`LsiIndex::rank`] with the request to detect clamping.
pub fn build_index(docs: &[TrainingDoc], config: &IndexConfig) -> Result<LsiIndex, IndexError> {
    if docs.is_empty() {
        return Err(IndexError::EmptyCorpus);
    }
    if config.rank == 0 {
        return Err(IndexError::ZeroRank);
    }
    let mut seen_ids: BTreeSet<&str> = BTreeSet::new();
    for doc in docs {
        if doc.labels.is_empty() {
            return Err(IndexError::UnlabeledDoc(doc.id.clone()));
        }
        if !seen_ids.insert(&doc.id) {
            return Err(IndexError::DuplicateDocId(doc.id.clone()));
        }
    }

    let docs_tokens: Vec<Vec<String>> = docs
        .iter()
        .map(|d| tokenize(&d.text, &config.stopwords))
        .collect();
    let (vocabulary, matrix) = build_matrix(&docs_tokens, config.min_df)?;

    let dense = matrix.to_dense();
    let factors = svd::svd(&dense);
    let k = config
        .rank
        .min(factors.sigma.len())
        .min(vocabulary.len())
        .min(docs.len());

    let term_factors = factors.u.slice(ndarray::s![.., ..k]).to_owned();
    let singular_values = factors.sigma.slice(ndarray::s![..k]).to_owned();
    let vt_k = factors.vt.slice(ndarray::s![..k, ..]).to_owned();

    // doc vectors: row j = sigma ⊙ (column j of V^T)
    let n_docs = docs.len();
    let mut doc_vectors = Array2::zeros((n_docs, k));
    for j in 0..n_docs {
        for c in 0..k {
            doc_vectors[[j, c]] = singular_values[c] * vt_k[[c, j]];
        }
    }

    Ok(LsiIndex {
        vocabulary,
        rank: k,
        term_factors,
        singular_values,
        doc_vectors,
        doc_ids: docs.iter().map(|d| d.id.clone()).collect(),
        doc_labels: docs.iter().map(|d| d.labels.clone()).collect(),
    })
}

/// Projects query text into the reduced space. Unseen terms are ignored;
/// a query with no known terms yields the zero vector.
pub fn fold_in_query(index: &LsiIndex, text: &str) -> Array1<f64> {
    let tokens = tokenize(text, &BTreeSet::new());
    let counts = term_counts(&tokens);
    let mut weighted = Array1::zeros(index.vocabulary.len());
    for (term, count) in counts {
        if let Some(id) = index.vocabulary.id(term) {
            let g = index.vocabulary.global_weight_of(id);
            weighted[id as usize] = (1.0 + count as f64).ln() * g;
        }
    }
    index.term_factors.t().dot(&weighted)
}

/// Ranks all documents by cosine similarity against a reduced query and
/// returns the top n. A zero-norm query matches nothing. Ties are broken
/// by ascending document index.
pub fn search(index: &LsiIndex, query: &Array1<f64>, n: usize) -> Vec<Neighbor> {
    let q_norm = query.dot(query).sqrt();
    if q_norm == 0.0 || n == 0 {
        return Vec::new();
    }
    let mut scored: Vec<(usize, f64)> = (0..index.n_docs())
        .map(|j| {
            let row = index.doc_vectors.row(j);
            let d_norm = row.dot(&row).sqrt();
            let sim = if d_norm == 0.0 {
                0.0
            } else {
                query.dot(&row) / (q_norm * d_norm)
            };
            (j, sim)
        })
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    scored
        .into_iter()
        .take(n)
        .map(|(j, sim)| Neighbor {
            doc_index: j,
            doc_id: index.doc_ids[j].clone(),
            similarity: sim,
        })
        .collect()
}
