//! Binary index persistence.
//!
//! Layout: magic + version header, vocabulary (length-prefixed UTF-8
//! terms with document frequency and global weight), the factor shapes,
//! singular values and factor matrices as little-endian f64 in row-major
//! order, document ids and label sets, then a SHA-256 checksum of every
//! preceding byte. Loading verifies the checksum before parsing, so a
//! truncated or bit-flipped file is rejected up front.
//!
//! Saving the same index twice produces identical bytes.

use std::collections::BTreeSet;
use std::path::Path;

use ndarray::{Array1, Array2};
use sha2::{Digest, Sha256};

use crate::taxonomy::CategoryCode;

use super::{IndexError, LsiIndex, Vocabulary};

const MAGIC: &[u8; 4] = b"SCIX";
const VERSION: u32 = 1;

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn new() -> Self {
        Writer { buf: Vec::new() }
    }

    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.buf.extend_from_slice(s.as_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], IndexError> {
        if self.pos + n > self.buf.len() {
            return Err(IndexError::Corrupt(format!(
                "unexpected end of data at byte {}",
                self.pos
            )));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, IndexError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, IndexError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, IndexError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn str(&mut self) -> Result<String, IndexError> {
        let len = self.u32()? as usize;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| IndexError::Corrupt("invalid utf-8 string".into()))
    }
}

fn serialize(index: &LsiIndex) -> Vec<u8> {
    let mut w = Writer::new();
    w.buf.extend_from_slice(MAGIC);
    w.u32(VERSION);

    let vocab = &index.vocabulary;
    w.u64(vocab.len() as u64);
    for id in 0..vocab.len() as u32 {
        w.str(vocab.term(id));
        w.u32(vocab.doc_freq_of(id));
        w.f64(vocab.global_weight_of(id));
    }

    w.u32(index.rank as u32);
    w.u64(index.n_docs() as u64);
    for v in index.singular_values.iter() {
        w.f64(*v);
    }
    for v in index.term_factors.iter() {
        w.f64(*v); // row-major: ndarray standard layout
    }
    for v in index.doc_vectors.iter() {
        w.f64(*v);
    }
    for j in 0..index.n_docs() {
        w.str(&index.doc_ids[j]);
        let labels = &index.doc_labels[j];
        w.u32(labels.len() as u32);
        for label in labels {
            w.str(label.as_str());
        }
    }

    let digest = Sha256::digest(&w.buf);
    w.buf.extend_from_slice(&digest);
    w.buf
}

fn deserialize(bytes: &[u8]) -> Result<LsiIndex, IndexError> {
    if bytes.len() < 32 + 8 {
        return Err(IndexError::ChecksumMismatch);
    }
    let (body, checksum) = bytes.split_at(bytes.len() - 32);
    let digest = Sha256::digest(body);
    if digest.as_slice() != checksum {
        return Err(IndexError::ChecksumMismatch);
    }

    let mut r = Reader::new(body);
    let magic = r.take(4)?;
    if magic != MAGIC {
        return Err(IndexError::FormatVersionMismatch {
            expected: VERSION,
            found: 0,
        });
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(IndexError::FormatVersionMismatch {
            expected: VERSION,
            found: version,
        });
    }

    let n_terms = r.u64()? as usize;
    let mut terms = Vec::with_capacity(n_terms);
    let mut doc_freq = Vec::with_capacity(n_terms);
    let mut global_weight = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        terms.push(r.str()?);
        doc_freq.push(r.u32()?);
        global_weight.push(r.f64()?);
    }
    let ids = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i as u32))
        .collect();

    let rank = r.u32()? as usize;
    let n_docs = r.u64()? as usize;

    let mut singular_values = Array1::zeros(rank);
    for k in 0..rank {
        singular_values[k] = r.f64()?;
    }
    let mut term_factors = Array2::zeros((n_terms, rank));
    for i in 0..n_terms {
        for k in 0..rank {
            term_factors[[i, k]] = r.f64()?;
        }
    }
    let mut doc_vectors = Array2::zeros((n_docs, rank));
    for j in 0..n_docs {
        for k in 0..rank {
            doc_vectors[[j, k]] = r.f64()?;
        }
    }

    let mut doc_ids = Vec::with_capacity(n_docs);
    let mut doc_labels = Vec::with_capacity(n_docs);
    for _ in 0..n_docs {
        doc_ids.push(r.str()?);
        let n_labels = r.u32()? as usize;
        let mut labels = BTreeSet::new();
        for _ in 0..n_labels {
            let raw = r.str()?;
            let code = CategoryCode::new(raw)
                .map_err(|e| IndexError::Corrupt(format!("bad label: {e}")))?;
            labels.insert(code);
        }
        doc_labels.push(labels);
    }

    Ok(LsiIndex {
        vocabulary: Vocabulary {
            terms,
            ids,
            doc_freq,
            global_weight,
        },
        rank,
        term_factors,
        singular_values,
        doc_vectors,
        doc_ids,
        doc_labels,
    })
}

/// Writes the index to a file. Identical indexes produce identical bytes.
pub fn save_index(index: &LsiIndex, path: impl AsRef<Path>) -> Result<(), IndexError> {
    std::fs::write(path, serialize(index))?;
    Ok(())
}

/// Reads an index written by [`save_index`], verifying the checksum and
/// format version.
pub fn load_index(path: impl AsRef<Path>) -> Result<LsiIndex, IndexError> {
    let bytes = std::fs::read(path)?;
    deserialize(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lsi::{build_index, IndexConfig, TrainingDoc};

    fn sample_index() -> LsiIndex {
        let docs: Vec<TrainingDoc> = [
            ("a", "steel pipes tubing", "31-33"),
            ("b", "steel beams girders", "31-33"),
            ("c", "software hosting internet", "51"),
        ]
        .iter()
        .map(|(id, text, label)| TrainingDoc {
            id: id.to_string(),
            text: text.to_string(),
            labels: [CategoryCode::new(*label).unwrap()].into_iter().collect(),
        })
        .collect();
        build_index(&docs, &IndexConfig { rank: 10, min_df: 1, ..Default::default() }).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let index = sample_index();
        let bytes = serialize(&index);
        let back = deserialize(&bytes).unwrap();
        assert_eq!(index.vocabulary, back.vocabulary);
        assert_eq!(index.rank, back.rank);
        assert_eq!(index.singular_values, back.singular_values);
        assert_eq!(index.term_factors, back.term_factors);
        assert_eq!(index.doc_vectors, back.doc_vectors);
        assert_eq!(index.doc_ids, back.doc_ids);
        assert_eq!(index.doc_labels, back.doc_labels);
        // and re-serializing gives byte-identical output
        assert_eq!(bytes, serialize(&back));
    }

    #[test]
    fn identical_builds_persist_identically() {
        let a = serialize(&sample_index());
        let b = serialize(&sample_index());
        assert_eq!(a, b);
    }

    #[test]
    fn truncated_file_fails_checksum() {
        let bytes = serialize(&sample_index());
        let cut = &bytes[..bytes.len() - 7];
        assert!(matches!(
            deserialize(cut),
            Err(IndexError::ChecksumMismatch)
        ));
    }

    #[test]
    fn corrupted_byte_fails_checksum() {
        let mut bytes = serialize(&sample_index());
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0xff;
        assert!(matches!(
            deserialize(&bytes),
            Err(IndexError::ChecksumMismatch)
        ));
    }

    #[test]
    fn bumped_version_is_rejected() {
        let mut bytes = serialize(&sample_index());
        // version lives right after the 4-byte magic
        bytes[4] = 9;
        // refresh the checksum so only the version check can fail
        let body_len = bytes.len() - 32;
        let digest = Sha256::digest(&bytes[..body_len]);
        bytes[body_len..].copy_from_slice(&digest);
        assert!(matches!(
            deserialize(&bytes),
            Err(IndexError::FormatVersionMismatch { found: 9, .. })
        ));
    }

    #[test]
    fn save_and_load_via_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.idx");
        let index = sample_index();
        save_index(&index, &path).unwrap();
        let back = load_index(&path).unwrap();
        assert_eq!(index.doc_ids, back.doc_ids);
        assert_eq!(index.term_factors, back.term_factors);
    }
}
