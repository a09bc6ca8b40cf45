//! Diacritical swapping: toggle Polish diacritic marks on each letter,
//! keep the variants the lexicon knows, prefer the closest by edit distance.

use crate::candidate::{CorrectionCandidate, Source};
use crate::editdist::ScaledDistance;
use crate::lexicon::{nfc, Lexicon};

/// Tokens with this many code points or more are not corrected.
pub const MAX_SWAP_LEN: usize = 17;

const PAIRS: &[(char, char)] = &[
    ('a', 'ą'),
    ('c', 'ć'),
    ('e', 'ę'),
    ('l', 'ł'),
    ('n', 'ń'),
    ('o', 'ó'),
    ('s', 'ś'),
    ('z', 'ż'),
    ('z', 'ź'),
    ('A', 'Ą'),
    ('C', 'Ć'),
    ('E', 'Ę'),
    ('L', 'Ł'),
    ('N', 'Ń'),
    ('O', 'Ó'),
    ('S', 'Ś'),
    ('Z', 'Ż'),
    ('Z', 'Ź'),
];

/// Per-character swap options. The character itself always comes first;
/// base letters list their marked forms, marked letters list their base.
#[derive(Debug, Clone, Copy, Default)]
pub struct DiacriticTable;

impl DiacriticTable {
    pub fn options(&self, c: char) -> Vec<char> {
        let mut opts = vec![c];
        for &(base, marked) in PAIRS {
            if c == base {
                opts.push(marked);
            } else if c == marked {
                opts.push(base);
            }
        }
        opts
    }

    pub fn option_count(&self, c: char) -> usize {
        1 + PAIRS.iter().filter(|&&(b, m)| c == b || c == m).count()
    }

    /// Product of option counts, saturating at `u128::MAX`.
    pub fn variant_count(&self, token: &str) -> u128 {
        token
            .chars()
            .fold(1u128, |acc, c| acc.saturating_mul(self.option_count(c) as u128))
    }

    /// Lazily enumerates every variant exactly once. The last position
    /// varies fastest; the token itself is yielded first.
    pub fn variants(&self, token: &str) -> Variants {
        let options: Vec<Vec<char>> = token.chars().map(|c| self.options(c)).collect();
        Variants {
            digits: vec![0; options.len()],
            options,
            done: false,
        }
    }

    /// Removes every diacritic the table knows about.
    pub fn strip(&self, token: &str) -> String {
        token
            .chars()
            .map(|c| PAIRS.iter().find(|&&(_, m)| m == c).map_or(c, |&(b, _)| b))
            .collect()
    }
}

pub fn variant_count(token: &str) -> u128 {
    DiacriticTable.variant_count(token)
}

pub fn enumerate_variants(token: &str) -> Variants {
    DiacriticTable.variants(token)
}

/// Odometer over per-position options.
#[derive(Debug, Clone)]
pub struct Variants {
    options: Vec<Vec<char>>,
    digits: Vec<usize>,
    done: bool,
}

impl Variants {
    fn current(&self) -> String {
        self.digits
            .iter()
            .zip(&self.options)
            .map(|(&d, opts)| opts[d])
            .collect()
    }

    fn advance(&mut self) {
        for pos in (0..self.digits.len()).rev() {
            self.digits[pos] += 1;
            if self.digits[pos] < self.options[pos].len() {
                return;
            }
            self.digits[pos] = 0;
        }
        self.done = true;
    }

    /// Calls `f` for each remaining variant without allocating a new
    /// string per variant.
    pub fn for_each_into(mut self, mut f: impl FnMut(&str)) {
        let mut buf = String::new();
        while !self.done {
            buf.clear();
            buf.extend(self.digits.iter().zip(&self.options).map(|(&d, opts)| opts[d]));
            f(&buf);
            self.advance();
        }
    }
}

impl Iterator for Variants {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        if self.done {
            return None;
        }
        let v = self.current();
        self.advance();
        Some(v)
    }
}

/// Lexicon members among the diacritic variants of `token`, ranked by
/// `(edit distance, form)`. Tokens of [`MAX_SWAP_LEN`] code points or more
/// get no candidates.
pub fn diacritic_correct(token: &str, lex: &Lexicon) -> Vec<CorrectionCandidate> {
    let token = nfc(token);
    if token.chars().count() >= MAX_SWAP_LEN {
        return Vec::new();
    }
    let mut found = Vec::new();
    DiacriticTable.variants(&token).for_each_into(|v| {
        if lex.contains(v) {
            found.push(v.to_string());
        }
    });
    let mut out: Vec<CorrectionCandidate> = found
        .into_iter()
        .map(|form| {
            let d = ScaledDistance::between(&token, &form);
            CorrectionCandidate {
                edit_distance: Some(d.raw),
                edit_score: d.scaled,
                semantic_score: None,
                combined: d.raw as f64,
                source: Source::Diacritic,
                char_probs: None,
                form,
            }
        })
        .collect();
    out.sort_by(|a, b| a.edit_distance.cmp(&b.edit_distance).then_with(|| a.form.cmp(&b.form)));
    out
}
