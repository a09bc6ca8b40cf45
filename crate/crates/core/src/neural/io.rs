//! Binary model file.
//!
//! Layout (all integers little-endian `u32`):
//!
//! ```text
//! magic "SPCLSTM\0" | version | metadata length | metadata (UTF-8 JSON)
//! tensor count | { rows | cols | rows·cols × f32 LE } ...
//! ```
//!
//! Tensors follow the order of [`Params::named`]; metadata carries the
//! vocabulary, dimensions, direction mode and hook presence.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{Direction, ModelConfig, Params, Seq2SeqModel};
use super::vocab::CharVocab;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"SPCLSTM\0";
pub const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Metadata {
    vocab: Vec<String>,
    hidden: usize,
    embed: usize,
    direction: String,
    hook_layers: Option<usize>,
    hook_dim: Option<usize>,
    train_loss: Option<f64>,
}

pub fn to_bytes(model: &Seq2SeqModel) -> Vec<u8> {
    let meta = Metadata {
        vocab: model.vocab.chars().iter().map(|c| c.to_string()).collect(),
        hidden: model.config.hidden,
        embed: model.config.embed,
        direction: match model.config.direction {
            Direction::Uni => "uni".into(),
            Direction::Bi => "bi".into(),
        },
        hook_layers: model.config.hook.map(|h| h.0),
        hook_dim: model.config.hook.map(|h| h.1),
        train_loss: model.train_loss,
    };
    let meta = serde_json::to_vec(&meta).expect("metadata serializes");
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(meta.len() as u32).to_le_bytes());
    out.extend_from_slice(&meta);
    let tensors = model.params.named();
    out.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
    for (_, t) in tensors {
        out.extend_from_slice(&(t.rows as u32).to_le_bytes());
        out.extend_from_slice(&(t.cols as u32).to_le_bytes());
        for &v in &t.data {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Model("truncated file".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

pub fn from_bytes(bytes: &[u8]) -> Result<Seq2SeqModel> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(Error::Model("bad magic bytes".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Model(format!("unsupported format version {version}")));
    }
    let len = r.u32()? as usize;
    let meta: Metadata = serde_json::from_slice(r.take(len)?).map_err(|e| Error::Model(format!("metadata: {e}")))?;
    let mut chars = Vec::with_capacity(meta.vocab.len());
    for s in &meta.vocab {
        let mut it = s.chars();
        match (it.next(), it.next()) {
            (Some(c), None) => chars.push(c),
            _ => return Err(Error::Model(format!("vocabulary entry {s:?} is not one character"))),
        }
    }
    let vocab = CharVocab::from_chars(chars.iter().copied());
    if vocab.chars() != chars.as_slice() {
        return Err(Error::Model("vocabulary is not sorted and unique".into()));
    }
    let direction = match meta.direction.as_str() {
        "uni" => Direction::Uni,
        "bi" => Direction::Bi,
        d => return Err(Error::Model(format!("unknown direction {d:?}"))),
    };
    let hook = match (meta.hook_layers, meta.hook_dim) {
        (Some(l), Some(d)) => Some((l, d)),
        (None, None) => None,
        _ => return Err(Error::Model("incomplete hook metadata".into())),
    };
    let config = ModelConfig {
        hidden: meta.hidden,
        embed: meta.embed,
        direction,
        hook,
    };
    let mut params = Params::zeros(vocab.len(), &config);
    let count = r.u32()? as usize;
    let mut slots = params.tensors_mut();
    if count != slots.len() {
        return Err(Error::Model(format!("expected {} tensors, found {count}", slots.len())));
    }
    for (i, t) in slots.iter_mut().enumerate() {
        let (rows, cols) = (r.u32()? as usize, r.u32()? as usize);
        if (rows, cols) != (t.rows, t.cols) {
            return Err(Error::Model(format!(
                "tensor {i}: shape {rows}×{cols}, expected {}×{}",
                t.rows, t.cols
            )));
        }
        let raw = r.take(rows * cols * 4)?;
        for (dst, chunk) in t.data.iter_mut().zip(raw.chunks_exact(4)) {
            *dst = f32::from_le_bytes(chunk.try_into().unwrap()) as f64;
        }
    }
    if r.pos != bytes.len() {
        return Err(Error::Model("trailing bytes after last tensor".into()));
    }
    Ok(Seq2SeqModel {
        vocab,
        config,
        params,
        train_loss: meta.train_loss,
    })
}

pub fn save(model: &Seq2SeqModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_bytes(model)).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<Seq2SeqModel> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    from_bytes(&bytes)
}
