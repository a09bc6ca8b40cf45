use std::fmt;

/// Which corrector produced a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    EditDistance,
    Diacritic,
    Vector,
    /// Vector corrector for a token with no embedding: ranked by scaled
    /// edit distance alone.
    VectorEditFallback,
    Lstm1,
    Lstm2,
    LstmHook,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::EditDistance => "edit",
            Source::Diacritic => "diacritic",
            Source::Vector => "vector",
            Source::VectorEditFallback => "vector-edit-fallback",
            Source::Lstm1 => "lstm1",
            Source::Lstm2 => "lstm2",
            Source::LstmHook => "lstm-hook",
        })
    }
}

/// A proposed correction. Lower `combined` ranks higher for every source.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionCandidate {
    pub form: String,
    /// Raw edit distance from the token, when the corrector computed it.
    pub edit_distance: Option<usize>,
    /// Scaled edit distance in `[0, 1]`.
    pub edit_score: f64,
    /// Cosine distance between token and candidate vectors.
    pub semantic_score: Option<f64>,
    pub combined: f64,
    pub source: Source,
    /// Per-character probabilities of the emitted form (neural only).
    pub char_probs: Option<Vec<f64>>,
}
