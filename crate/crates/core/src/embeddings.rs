//! Word-vector store in word2vec text format and the combined
//! edit/cosine distance corrector.

use std::collections::HashMap;
use std::path::Path;

use crate::candidate::{CorrectionCandidate, Source};
use crate::editdist::ScaledDistance;
use crate::error::{read_lines, split_lines, Error, Result};
use crate::lexicon::{nfc, Lexicon};

pub const DEFAULT_MAX_EDIT: usize = 3;
pub const DEFAULT_EDIT_WEIGHT: f64 = 0.5;

#[derive(Debug, Clone, Default)]
pub struct EmbeddingStore {
    dim: usize,
    vectors: HashMap<String, Vec<f32>>,
    /// Number of tokens that appeared more than once at load time.
    pub duplicates: usize,
}

impl EmbeddingStore {
    /// Builds a store from in-memory vectors. All vectors must share one
    /// dimension and be non-zero.
    pub fn from_vectors<I>(vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Vec<f32>)>,
    {
        let mut store = EmbeddingStore::default();
        for (token, v) in vectors {
            if store.dim == 0 {
                store.dim = v.len();
            }
            if v.len() != store.dim || v.is_empty() {
                return Err(Error::Domain(format!(
                    "vector for {token:?} has {} values, expected {}",
                    v.len(),
                    store.dim
                )));
            }
            if v.iter().all(|&x| x == 0.0) {
                return Err(Error::Domain(format!("vector for {token:?} is all zeros")));
            }
            if store.vectors.insert(nfc(&token), v).is_some() {
                store.duplicates += 1;
            }
        }
        Ok(store)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_lines(read_lines(path)?, path)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let p = Path::new("<memory>");
        Self::from_lines(split_lines(text.as_bytes(), p)?, p)
    }

    fn from_lines(lines: Vec<(usize, String)>, path: &Path) -> Result<Self> {
        let mut store = EmbeddingStore::default();
        let mut declared: Option<usize> = None;
        let mut first = true;
        for (no, line) in lines {
            let mut fields = line.split_whitespace();
            let Some(token) = fields.next() else { continue };
            let rest: Vec<&str> = fields.collect();
            if first {
                first = false;
                // "<count> <dim>" header, detected by shape
                if rest.len() == 1 && token.parse::<usize>().is_ok() {
                    if let Ok(dim) = rest[0].parse::<usize>() {
                        declared = Some(token.parse().unwrap());
                        store.dim = dim;
                        continue;
                    }
                }
            }
            let v = rest
                .iter()
                .map(|s| s.parse::<f32>())
                .collect::<std::result::Result<Vec<f32>, _>>()
                .map_err(|e| Error::parse(path, no, format!("bad number: {e}")))?;
            if store.dim == 0 {
                store.dim = v.len();
            }
            if v.is_empty() || v.len() != store.dim {
                return Err(Error::parse(
                    path,
                    no,
                    format!("expected {} values for {token:?}, found {}", store.dim, v.len()),
                ));
            }
            if v.iter().all(|&x| x == 0.0) {
                return Err(Error::parse(path, no, format!("zero vector for {token:?}")));
            }
            if store.vectors.insert(nfc(token), v).is_some() {
                store.duplicates += 1;
            }
        }
        if store.duplicates > 0 {
            log::warn!("{}: {} duplicate tokens, last occurrence kept", path.display(), store.duplicates);
        }
        if let Some(n) = declared {
            if n != store.vectors.len() + store.duplicates {
                log::warn!(
                    "{}: header declares {n} vectors, file has {}",
                    path.display(),
                    store.vectors.len() + store.duplicates
                );
            }
        }
        Ok(store)
    }

    /// Writes the store in word2vec text format with a header line,
    /// tokens sorted.
    pub fn to_text(&self) -> String {
        let mut tokens: Vec<&String> = self.vectors.keys().collect();
        tokens.sort();
        let mut out = format!("{} {}\n", tokens.len(), self.dim);
        for t in tokens {
            out.push_str(t);
            for x in &self.vectors[t] {
                out.push(' ');
                out.push_str(&x.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab_size(&self) -> usize {
        self.vectors.len()
    }

    pub fn get(&self, token: &str) -> Option<&[f32]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    pub fn scaled(&self, factor: f32) -> Self {
        EmbeddingStore {
            dim: self.dim,
            vectors: self
                .vectors
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|x| x * factor).collect()))
                .collect(),
            duplicates: self.duplicates,
        }
    }
}

/// `1 − u·v / (‖u‖‖v‖)`, in `[0, 2]`. Accumulates in `f64`.
pub fn cosine_distance(u: &[f32], v: &[f32]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Domain(format!("dimension mismatch: {} vs {}", u.len(), v.len())));
    }
    let (mut dot, mut nu, mut nv) = (0.0f64, 0.0f64, 0.0f64);
    for (&a, &b) in u.iter().zip(v) {
        let (a, b) = (a as f64, b as f64);
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::Domain("cosine distance of a zero vector".into()));
    }
    // sqrt(nu·nv) rather than sqrt(nu)·sqrt(nv): for u = v it is exactly
    // the dot product, so the distance is exactly zero.
    let cos = (dot / (nu * nv).sqrt()).clamp(-1.0, 1.0);
    Ok(1.0 - cos)
}

/// `edit_weight · scaled_LD + (1 − edit_weight) · CD`; the plain mean at
/// the default weight of ½.
pub fn combined_distance(edit: f64, semantic: f64, edit_weight: f64) -> f64 {
    if edit_weight == DEFAULT_EDIT_WEIGHT {
        (edit + semantic) / 2.0
    } else {
        edit_weight * edit + (1.0 - edit_weight) * semantic
    }
}

/// Combined distance between two tokens that both have vectors.
pub fn token_distance(a: &str, b: &str, emb: &EmbeddingStore) -> Option<f64> {
    let (va, vb) = (emb.get(a)?, emb.get(b)?);
    let cd = cosine_distance(va, vb).ok()?;
    Some(combined_distance(ScaledDistance::between(a, b).scaled, cd, DEFAULT_EDIT_WEIGHT))
}

/// Re-ranks the lexicon's bounded edit-distance neighbours of `token` by
/// the combined distance. Tokens without a vector fall back to scaled edit
/// distance over the unfiltered neighbour set.
pub fn vector_distance_correct(
    token: &str,
    lex: &Lexicon,
    emb: &EmbeddingStore,
    max_edit: usize,
    edit_weight: f64,
) -> Vec<CorrectionCandidate> {
    let token = nfc(token);
    let neighbours = lex.fuzzy_search(&token, max_edit);
    let token_vec = emb.get(&token);
    let mut out: Vec<CorrectionCandidate> = neighbours
        .into_iter()
        .filter_map(|(form, raw)| {
            let edit = ScaledDistance::between(&token, &form).scaled;
            match token_vec {
                Some(tv) => {
                    let cd = cosine_distance(tv, emb.get(&form)?).ok()?;
                    Some(CorrectionCandidate {
                        edit_distance: Some(raw),
                        edit_score: edit,
                        semantic_score: Some(cd),
                        combined: combined_distance(edit, cd, edit_weight),
                        source: Source::Vector,
                        char_probs: None,
                        form,
                    })
                }
                None => Some(CorrectionCandidate {
                    edit_distance: Some(raw),
                    edit_score: edit,
                    semantic_score: None,
                    combined: edit,
                    source: Source::VectorEditFallback,
                    char_probs: None,
                    form,
                }),
            }
        })
        .collect();
    out.sort_by(|a, b| a.combined.total_cmp(&b.combined).then_with(|| a.form.cmp(&b.form)));
    out
}
