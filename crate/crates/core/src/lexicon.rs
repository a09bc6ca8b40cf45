//! Reference vocabulary with exact membership and bounded fuzzy search.
//!
//! Entries are NFC-normalized surface forms. Fuzzy search goes through a
//! BK-tree keyed by unit-cost Levenshtein distance, so a query with radius
//! `k` only visits subtrees whose edge label lies within `[d - k, d + k]`.

use std::collections::HashSet;
use std::path::Path;

use unicode_normalization::UnicodeNormalization;

use crate::editdist::{levenshtein_bounded, levenshtein_chars};
use crate::error::{read_lines, split_lines, Error, Result};

pub fn nfc(s: &str) -> String {
    s.nfc().collect()
}

#[derive(Debug)]
struct Node {
    word: usize,
    // (edge distance, child node index), sorted by distance
    children: Vec<(usize, usize)>,
}

#[derive(Debug, Default)]
struct BkTree {
    nodes: Vec<Node>,
}

impl BkTree {
    fn insert(&mut self, word: usize, chars: &[Vec<char>]) {
        if self.nodes.is_empty() {
            self.nodes.push(Node {
                word,
                children: Vec::new(),
            });
            return;
        }
        let mut cur = 0;
        loop {
            let d = levenshtein_chars(&chars[self.nodes[cur].word], &chars[word]);
            debug_assert!(d > 0, "duplicate entry inserted into BK-tree");
            match self.nodes[cur].children.binary_search_by_key(&d, |&(k, _)| k) {
                Ok(pos) => cur = self.nodes[cur].children[pos].1,
                Err(pos) => {
                    let id = self.nodes.len();
                    self.nodes.push(Node {
                        word,
                        children: Vec::new(),
                    });
                    self.nodes[cur].children.insert(pos, (d, id));
                    return;
                }
            }
        }
    }

    fn search(&self, query: &[char], max_dist: usize, chars: &[Vec<char>], out: &mut Vec<(usize, usize)>) {
        if self.nodes.is_empty() {
            return;
        }
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            // Exact distance is needed for pruning; the bound only caps work.
            let d = levenshtein_chars(&chars[node.word], query);
            if d <= max_dist {
                out.push((node.word, d));
            }
            let lo = d.saturating_sub(max_dist);
            let hi = d + max_dist;
            for &(edge, child) in &node.children {
                if edge > hi {
                    break;
                }
                if edge >= lo {
                    stack.push(child);
                }
            }
        }
    }
}

/// Immutable word list. Safe to share between threads once built.
#[derive(Debug, Default)]
pub struct Lexicon {
    words: Vec<String>,
    chars: Vec<Vec<char>>,
    set: HashSet<String>,
    tree: BkTree,
}

impl Lexicon {
    /// Builds a lexicon from arbitrary forms. Forms are NFC-normalized and
    /// deduplicated; empty forms and forms containing whitespace are rejected.
    pub fn from_words<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lex = Lexicon::default();
        for (i, w) in words.into_iter().enumerate() {
            let w = w.as_ref();
            if w.is_empty() || w.chars().any(char::is_whitespace) {
                return Err(Error::Domain(format!(
                    "lexicon entry #{} {w:?} is empty or contains whitespace",
                    i + 1
                )));
            }
            lex.insert(nfc(w));
        }
        Ok(lex)
    }

    /// Parses word-list text: one form per line, `#` comments and blank
    /// lines skipped, LF or CRLF line ends.
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_lines(split_lines(text.as_bytes(), Path::new("<memory>"))?, Path::new("<memory>"))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_lines(read_lines(path)?, path)
    }

    fn from_lines(lines: Vec<(usize, String)>, path: &Path) -> Result<Self> {
        let mut lex = Lexicon::default();
        for (no, line) in lines {
            let form = line.trim();
            if form.is_empty() || form.starts_with('#') {
                continue;
            }
            if form.chars().any(char::is_whitespace) {
                return Err(Error::parse(path, no, format!("entry {form:?} contains whitespace")));
            }
            lex.insert(nfc(form));
        }
        log::debug!("loaded {} lexicon entries from {}", lex.len(), path.display());
        Ok(lex)
    }

    fn insert(&mut self, word: String) {
        if self.set.contains(&word) {
            return;
        }
        let id = self.words.len();
        self.chars.push(word.chars().collect());
        self.set.insert(word.clone());
        self.words.push(word);
        self.tree.insert(id, &self.chars);
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Entries in insertion order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    /// Exact, case-sensitive membership of the NFC form of `token`.
    pub fn contains(&self, token: &str) -> bool {
        if self.set.contains(token) {
            return true;
        }
        // Only renormalize when the fast path misses.
        let normalized = nfc(token);
        normalized != token && self.set.contains(&normalized)
    }

    /// All entries within `max_dist` edits of `token`, sorted by
    /// `(distance, word)`.
    pub fn fuzzy_search(&self, token: &str, max_dist: usize) -> Vec<(String, usize)> {
        let query: Vec<char> = nfc(token).chars().collect();
        let mut hits = Vec::new();
        self.tree.search(&query, max_dist, &self.chars, &mut hits);
        let mut out: Vec<(String, usize)> = hits
            .into_iter()
            .map(|(id, d)| (self.words[id].clone(), d))
            .collect();
        out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        out
    }

    /// Linear scan with the same contract as [`Lexicon::fuzzy_search`].
    /// Slow; kept for cross-checking the tree.
    pub fn scan_search(&self, token: &str, max_dist: usize) -> Vec<(String, usize)> {
        let query: Vec<char> = nfc(token).chars().collect();
        let mut out: Vec<(String, usize)> = self
            .chars
            .iter()
            .enumerate()
            .filter_map(|(id, w)| levenshtein_bounded(w, &query, max_dist).map(|d| (self.words[id].clone(), d)))
            .collect();
        out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn lex(words: &[&str]) -> Lexicon {
        Lexicon::from_words(words).unwrap()
    }

    #[test]
    fn load_dedups_and_skips_comments() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "# header\nkot\r\npies\n\nkot\n").unwrap();
        let l = Lexicon::load(f.path()).unwrap();
        assert_eq!(l.len(), 2);
        assert!(l.contains("kot") && l.contains("pies"));
    }

    #[test]
    fn empty_file() {
        let f = tempfile::NamedTempFile::new().unwrap();
        let l = Lexicon::load(f.path()).unwrap();
        assert!(l.is_empty());
        assert!(!l.contains("kot"));
        assert!(l.fuzzy_search("kot", 3).is_empty());
    }

    #[test]
    fn bad_utf8_names_line() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(b"kot\npies\n\xff\xfe\n").unwrap();
        match Lexicon::load(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(Lexicon::load("/nonexistent/words.txt"), Err(Error::Io { .. })));
    }

    #[test]
    fn membership_is_exact_and_case_sensitive() {
        let l = lex(&["ołówek", "Pułtusk"]);
        assert!(l.contains("ołówek"));
        assert!(!l.contains("olowek"));
        assert!(!l.contains("pułtusk"));
    }

    #[test]
    fn nfc_applied_on_load_and_query() {
        let decomposed = "o\u{301}"; // o + combining acute
        let l = lex(&[decomposed]);
        assert!(l.contains("ó"));
        assert!(l.contains(decomposed));
        assert_eq!(l.fuzzy_search(decomposed, 0), vec![("ó".to_string(), 0)]);
    }

    #[test]
    fn fuzzy_examples() {
        let l = lex(&["kot", "kos", "rak"]);
        assert_eq!(l.fuzzy_search("kot", 0), vec![("kot".into(), 0)]);
        assert_eq!(l.fuzzy_search("kox", 1), vec![("kos".into(), 1), ("kot".into(), 1)]);
        assert_eq!(l.fuzzy_search("kox", 1), l.scan_search("kox", 1));
    }

    fn small_word() -> impl Strategy<Value = String> {
        proptest::collection::vec(proptest::sample::select(vec!['a', 'k', 'o', 't', 'ł', 'ż']), 1..7)
            .prop_map(|v| v.into_iter().collect())
    }

    proptest! {
        #[test]
        fn tree_matches_scan(words in proptest::collection::vec(small_word(), 0..200),
                             q in small_word(), k in 0usize..4) {
            let l = Lexicon::from_words(&words).unwrap();
            prop_assert_eq!(l.fuzzy_search(&q, k), l.scan_search(&q, k));
        }

        #[test]
        fn radius_is_monotone(words in proptest::collection::vec(small_word(), 0..100),
                              q in small_word(), k in 0usize..3) {
            let l = Lexicon::from_words(&words).unwrap();
            let small = l.fuzzy_search(&q, k);
            let big = l.fuzzy_search(&q, k + 1);
            for hit in &small {
                prop_assert!(big.contains(hit));
            }
            prop_assert_eq!(l.contains(&q), l.fuzzy_search(&q, 0) == vec![(q.clone(), 0)]);
        }
    }
}
