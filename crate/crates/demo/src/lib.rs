//! Browser bindings: an edit-distance table, diacritic variants, and
//! dictionary correction over a word list pasted into the page.
//!
//! Every export returns a JSON string so the page needs no glue beyond
//! `JSON.parse`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use spellcorr::diacritics::{diacritic_correct, DiacriticTable, MAX_SWAP_LEN};
use spellcorr::editdist::{levenshtein_table, ScaledDistance};
use spellcorr::lexicon::nfc;
use spellcorr::pipeline::edit_correct;
use spellcorr::Lexicon;

#[derive(Serialize)]
struct Table {
    a: Vec<String>,
    b: Vec<String>,
    rows: Vec<Vec<usize>>,
    distance: usize,
    scaled: f64,
}

/// DP table of the Levenshtein distance between `a` and `b`.
#[wasm_bindgen]
pub fn edit_table(a: &str, b: &str) -> String {
    let (a, b) = (nfc(a), nfc(b));
    let rows = levenshtein_table(&a, &b);
    let d = ScaledDistance::between(&a, &b);
    let table = Table {
        a: a.chars().map(String::from).collect(),
        b: b.chars().map(String::from).collect(),
        distance: d.raw,
        scaled: d.scaled,
        rows,
    };
    serde_json::to_string(&table).expect("table serializes")
}

#[derive(Serialize)]
struct VariantList {
    /// Decimal string; counts overflow JavaScript numbers quickly.
    count: String,
    variants: Vec<String>,
    truncated: bool,
}

/// Diacritic variants of `token`, listing at most `limit` of them.
#[wasm_bindgen]
pub fn swap_variants(token: &str, limit: usize) -> String {
    let token = nfc(token);
    let count = DiacriticTable.variant_count(&token);
    let variants: Vec<String> = DiacriticTable.variants(&token).take(limit).collect();
    let list = VariantList {
        count: count.to_string(),
        truncated: count > variants.len() as u128,
        variants,
    };
    serde_json::to_string(&list).expect("variants serialize")
}

#[derive(Serialize)]
struct Suggestion {
    form: String,
    distance: Option<usize>,
    score: f64,
}

#[derive(Serialize)]
struct Suggestions {
    known: bool,
    too_long: bool,
    candidates: Vec<Suggestion>,
}

/// A word list held in the page.
#[wasm_bindgen]
pub struct Dictionary {
    lexicon: Lexicon,
}

#[wasm_bindgen]
impl Dictionary {
    /// One word per line; `#` lines are skipped.
    #[wasm_bindgen(constructor)]
    pub fn new(words: &str) -> Result<Dictionary, JsError> {
        let lexicon = Lexicon::parse(words).map_err(|e| JsError::new(&e.to_string()))?;
        Ok(Dictionary { lexicon })
    }

    pub fn size(&self) -> usize {
        self.lexicon.len()
    }

    /// `method` is `"edit"` or `"diacritic"`.
    pub fn correct(&self, token: &str, method: &str, max_edit: usize, top_k: usize) -> Result<String, JsError> {
        let token = nfc(token);
        let candidates = match method {
            "edit" => edit_correct(&token, &self.lexicon, max_edit),
            "diacritic" => diacritic_correct(&token, &self.lexicon),
            other => return Err(JsError::new(&format!("unknown method {other:?}"))),
        };
        let out = Suggestions {
            known: self.lexicon.contains(&token),
            too_long: method == "diacritic" && token.chars().count() >= MAX_SWAP_LEN,
            candidates: candidates
                .into_iter()
                .take(top_k)
                .map(|c| Suggestion {
                    form: c.form,
                    distance: c.edit_distance,
                    score: c.combined,
                })
                .collect(),
        };
        Ok(serde_json::to_string(&out).expect("suggestions serialize"))
    }
}
