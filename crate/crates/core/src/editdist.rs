//! Unit-cost Levenshtein distance over Unicode code points.
//!
//! Insertions, deletions and substitutions each cost one; adjacent
//! transpositions are two substitutions. The scaled variant divides by the
//! longer operand's length so that it lands in `[0, 1]`.

/// Raw and length-scaled edit distance between two strings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledDistance {
    pub raw: usize,
    pub scaled: f64,
}

impl ScaledDistance {
    pub fn between(a: &str, b: &str) -> Self {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        let raw = levenshtein_chars(&a, &b);
        let longest = a.len().max(b.len());
        let scaled = if longest == 0 {
            0.0
        } else {
            raw as f64 / longest as f64
        };
        ScaledDistance { raw, scaled }
    }
}

pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_chars(&a, &b)
}

/// `levenshtein(a, b) / max(|a|, |b|)`, and 0 for two empty strings.
pub fn scaled_levenshtein(a: &str, b: &str) -> f64 {
    ScaledDistance::between(a, b).scaled
}

/// Two-row dynamic program over code-point slices.
pub fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            cur[j + 1] = (cur[j] + 1).min(prev[j + 1] + 1).min(prev[j] + cost);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Levenshtein distance with early exit: returns `None` as soon as every
/// cell of a DP row exceeds `bound`.
pub fn levenshtein_bounded(a: &[char], b: &[char], bound: usize) -> Option<usize> {
    if a.len().abs_diff(b.len()) > bound {
        return None;
    }
    if a.is_empty() || b.is_empty() {
        let d = a.len().max(b.len());
        return (d <= bound).then_some(d);
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        let mut row_min = cur[0];
        for (j, &cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            cur[j + 1] = (cur[j] + 1).min(prev[j + 1] + 1).min(prev[j] + cost);
            row_min = row_min.min(cur[j + 1]);
        }
        if row_min > bound {
            return None;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let d = prev[b.len()];
    (d <= bound).then_some(d)
}

/// Full `(|a|+1) × (|b|+1)` DP table, row-major. Used by the browser demo
/// to draw the table.
pub fn levenshtein_table(a: &str, b: &str) -> Vec<Vec<usize>> {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut table = vec![vec![0; b.len() + 1]; a.len() + 1];
    for (i, row) in table.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        table[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            table[i][j] = (table[i - 1][j] + 1)
                .min(table[i][j - 1] + 1)
                .min(table[i - 1][j - 1] + cost);
        }
    }
    table
}
