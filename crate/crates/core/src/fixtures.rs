//! Deterministic synthetic resources: a lexicon of Polish-looking words,
//! an error corpus over it, word vectors and per-token layer stacks.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::corpus::{ErrorCase, ErrorCorpus};
use crate::diacritics::DiacriticTable;
use crate::embeddings::EmbeddingStore;
use crate::error::{Error, Result};
use crate::neural::ExternalLayers;

const ONSETS: &[&str] = &[
    "k", "p", "t", "m", "w", "l", "ł", "r", "s", "ś", "z", "ż", "ź", "n", "ń", "d", "b", "g", "c", "ć", "ch", "sz",
    "cz", "rz", "dz", "j",
];
const VOWELS: &[&str] = &["a", "ą", "e", "ę", "o", "ó", "i", "y", "u"];
const CODAS: &[&str] = &["", "", "", "", "k", "n", "ć", "ł", "s", "ń", "ż"];

/// Neighbouring keys on a QWERTY layout.
pub fn keyboard_neighbours(c: char) -> &'static str {
    match c {
        'q' => "wa",
        'w' => "qes",
        'e' => "wrd",
        'r' => "etf",
        't' => "ryg",
        'y' => "tuh",
        'u' => "yij",
        'i' => "uok",
        'o' => "ipl",
        'p' => "o",
        'a' => "qsz",
        's' => "adwx",
        'd' => "sfe",
        'f' => "dgr",
        'g' => "fht",
        'h' => "gjy",
        'j' => "hku",
        'k' => "jli",
        'l' => "ko",
        'z' => "xa",
        'x' => "zcs",
        'c' => "xvd",
        'v' => "cbf",
        'b' => "vng",
        'n' => "bmh",
        'm' => "nj",
        _ => "",
    }
}

/// `n` distinct words of two to four syllables.
pub fn synthetic_words(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let syllables = rng.random_range(2..=4);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push_str(ONSETS.choose(&mut rng).unwrap());
            w.push_str(VOWELS.choose(&mut rng).unwrap());
        }
        w.push_str(CODAS.choose(&mut rng).unwrap());
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

/// One keyboard-neighbour substitution at a random position, if the word
/// has any ASCII letter.
fn keyboard_typo<R: Rng>(word: &str, rng: &mut R) -> Option<String> {
    let chars: Vec<char> = word.chars().collect();
    let positions: Vec<usize> = (0..chars.len()).filter(|&i| !keyboard_neighbours(chars[i]).is_empty()).collect();
    let &p = positions.choose(rng)?;
    let options: Vec<char> = keyboard_neighbours(chars[p]).chars().collect();
    let mut out = chars;
    out[p] = *options.choose(rng)?;
    Some(out.into_iter().collect())
}

/// A non-word misspelling of `word`: all diacritics removed, or one key
/// replaced by a neighbour.
pub fn misspell<R: Rng>(word: &str, lexicon: &HashSet<&str>, rng: &mut R) -> Option<String> {
    let stripped = DiacriticTable.strip(word);
    let prefer_strip = stripped != word && rng.random_bool(0.5);
    for attempt in 0..8 {
        let candidate = if prefer_strip && attempt == 0 {
            stripped.clone()
        } else {
            keyboard_typo(word, rng)?
        };
        if candidate != word && !lexicon.contains(candidate.as_str()) {
            return Some(candidate);
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixtureConfig {
    pub words: usize,
    pub cases: usize,
    pub dim: usize,
    pub layers: usize,
    pub layer_dim: usize,
    pub seed: u64,
}

impl Default for FixtureConfig {
    fn default() -> Self {
        FixtureConfig {
            words: 400,
            cases: 200,
            dim: 16,
            layers: 3,
            layer_dim: 8,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fixtures {
    pub lexicon: Vec<String>,
    pub corpus: ErrorCorpus,
    pub embeddings: EmbeddingStore,
    pub layers: ExternalLayers,
}

#[derive(Debug, Clone)]
pub struct FixturePaths {
    pub lexicon: PathBuf,
    pub corpus: PathBuf,
    pub embeddings: PathBuf,
    pub layers: PathBuf,
}

impl FixturePaths {
    pub fn in_dir(dir: &Path) -> Self {
        FixturePaths {
            lexicon: dir.join("lexicon.txt"),
            corpus: dir.join("corpus.tsv"),
            embeddings: dir.join("vectors.txt"),
            layers: dir.join("layers.txt"),
        }
    }
}

impl Fixtures {
    /// Error vectors lie close to their correction's vector; layer stacks
    /// are fixed random projections of the correction's vector, one
    /// projection per layer, plus noise.
    pub fn generate(cfg: &FixtureConfig) -> Result<Self> {
        if cfg.words == 0 || cfg.dim == 0 || cfg.layers == 0 || cfg.layer_dim == 0 {
            return Err(Error::Config("fixture sizes must be positive".into()));
        }
        let words = synthetic_words(cfg.words, cfg.seed);
        let known: HashSet<&str> = words.iter().map(String::as_str).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
        let unit = Normal::new(0.0, 1.0).expect("valid normal");

        let mut vectors: Vec<(String, Vec<f32>)> = words
            .iter()
            .map(|w| (w.clone(), (0..cfg.dim).map(|_| unit.sample(&mut rng) as f32).collect()))
            .collect();

        let mut cases = Vec::with_capacity(cfg.cases);
        let mut errors = BTreeSet::new();
        let mut tries = 0;
        while cases.len() < cfg.cases && tries < cfg.cases * 20 {
            tries += 1;
            let i = rng.random_range(0..words.len());
            let Some(err) = misspell(&words[i], &known, &mut rng) else { continue };
            if !errors.insert(err.clone()) {
                continue;
            }
            let noisy = vectors[i].1.iter().map(|&x| x + 0.3 * unit.sample(&mut rng) as f32).collect();
            vectors.push((err.clone(), noisy));
            cases.push(ErrorCase {
                error: err,
                correction: words[i].clone(),
            });
        }
        if cases.len() < cfg.cases {
            return Err(Error::Config(format!(
                "could only generate {} distinct misspellings from {} words",
                cases.len(),
                words.len()
            )));
        }
        let embeddings = EmbeddingStore::from_vectors(vectors.iter().cloned())?;

        let bound = 1.0 / (cfg.dim as f64).sqrt();
        let projections: Vec<Vec<Vec<f64>>> = (0..cfg.layers)
            .map(|_| {
                (0..cfg.layer_dim)
                    .map(|_| (0..cfg.dim).map(|_| rng.random_range(-bound..bound)).collect())
                    .collect()
            })
            .collect();
        let mut layers = ExternalLayers::new(cfg.layers, cfg.layer_dim);
        let by_word: std::collections::HashMap<&str, usize> =
            words.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
        for case in &cases {
            let base = &vectors[by_word[case.correction.as_str()]].1;
            let stack = projections
                .iter()
                .map(|p| {
                    p.iter()
                        .map(|row| {
                            let v: f64 = row.iter().zip(base).map(|(a, &b)| a * b as f64).sum();
                            v + 0.05 * unit.sample(&mut rng)
                        })
                        .collect()
                })
                .collect();
            layers.insert(&case.error, stack)?;
        }

        Ok(Fixtures {
            lexicon: words,
            corpus: ErrorCorpus::new(cases),
            embeddings,
            layers,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<FixturePaths> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let paths = FixturePaths::in_dir(dir);
        let mut lex = self.lexicon.join("\n");
        lex.push('\n');
        for (path, text) in [
            (&paths.lexicon, lex),
            (&paths.corpus, self.corpus.to_tsv()),
            (&paths.embeddings, self.embeddings.to_text()),
            (&paths.layers, self.layers.to_text()),
        ] {
            fs::write(path, text).map_err(|e| Error::io(path, e))?;
        }
        Ok(paths)
    }
}

/// Fifty real Polish misspellings: missing diacritics and single
/// neighbouring-key slips.
pub const TOY_PAIRS: [(&str, &str); 50] = [
    ("olowek", "ołówek"),
    ("zolw", "żółw"),
    ("ksiazka", "książka"),
    ("zrodlo", "źródło"),
    ("slonce", "słońce"),
    ("pszczola", "pszczoła"),
    ("gesi", "gęsi"),
    ("wiezowiec", "wieżowiec"),
    ("lodz", "łódź"),
    ("mloda", "młoda"),
    ("zaba", "żaba"),
    ("swieca", "świeca"),
    ("ciezki", "ciężki"),
    ("rzela", "rzeka"),
    ("jablko", "jabłko"),
    ("krolik", "królik"),
    ("pilka", "piłka"),
    ("dziekuje", "dziękuję"),
    ("prosze", "proszę"),
    ("wlasnie", "właśnie"),
    ("miesiac", "miesiąc"),
    ("ogrod", "ogród"),
    ("szkola", "szkoła"),
    ("samochod", "samochód"),
    ("nirbo", "niebo"),
    ("ksiezyc", "księżyc"),
    ("gwiazfa", "gwiazda"),
    ("kwiatrk", "kwiatek"),
    ("stol", "stół"),
    ("krzeslo", "krzesło"),
    ("okbo", "okno"),
    ("drzwu", "drzwi"),
    ("lozko", "łóżko"),
    ("kon", "koń"),
    ("piez", "pies"),
    ("kpt", "kot"),
    ("mlrko", "mleko"),
    ("chlrb", "chleb"),
    ("maslo", "masło"),
    ("zolty", "żółty"),
    ("czerwiny", "czerwony"),
    ("zirlony", "zielony"),
    ("bialy", "biały"),
    ("czsrny", "czarny"),
    ("jezipro", "jezioro"),
    ("gora", "góra"),
    ("lss", "las"),
    ("morxe", "morze"),
    ("wies", "wieś"),
    ("miastp", "miasto"),
];

pub fn toy_corpus() -> ErrorCorpus {
    ErrorCorpus::new(
        TOY_PAIRS
            .iter()
            .map(|&(e, c)| ErrorCase {
                error: e.into(),
                correction: c.into(),
            })
            .collect(),
    )
}
