use std::collections::BTreeSet;

pub const PAD: usize = 0;
pub const SOS: usize = 1;
pub const EOS: usize = 2;
pub const UNK: usize = 3;
pub const RESERVED: usize = 4;

/// Character inventory. Indices 0..4 are PAD, SOS, EOS, UNK; ordinary
/// characters follow in code-point order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharVocab {
    chars: Vec<char>,
}

impl CharVocab {
    pub fn from_chars(chars: impl IntoIterator<Item = char>) -> Self {
        let set: BTreeSet<char> = chars.into_iter().collect();
        CharVocab {
            chars: set.into_iter().collect(),
        }
    }

    pub fn from_texts<'a>(texts: impl IntoIterator<Item = &'a str>) -> Self {
        Self::from_chars(texts.into_iter().flat_map(str::chars))
    }

    pub fn len(&self) -> usize {
        RESERVED + self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn index(&self, c: char) -> usize {
        self.chars.binary_search(&c).map_or(UNK, |i| i + RESERVED)
    }

    /// `None` for reserved indices.
    pub fn char_at(&self, index: usize) -> Option<char> {
        index.checked_sub(RESERVED).and_then(|i| self.chars.get(i).copied())
    }

    pub fn encode(&self, s: &str) -> Vec<usize> {
        s.chars().map(|c| self.index(c)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reserved_and_unknown() {
        let v = CharVocab::from_texts(["kot", "kół"]);
        assert_eq!(v.chars(), &['k', 'o', 't', 'ó', 'ł']);
        assert_eq!(v.len(), 9);
        assert_eq!(v.index('k'), 4);
        assert_eq!(v.index('x'), UNK);
        assert_eq!(v.char_at(4), Some('k'));
        assert_eq!(v.char_at(EOS), None);
        for (i, &c) in v.chars().iter().enumerate() {
            assert_eq!(v.char_at(v.index(c)), Some(c));
            assert_eq!(v.index(c), i + RESERVED);
        }
    }
}
