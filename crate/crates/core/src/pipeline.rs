//! One corrector interface over all methods, and the evaluation driver.

use std::fmt;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::candidate::{CorrectionCandidate, Source};
use crate::corpus::{ErrorCase, ErrorCorpus, Split};
use crate::diacritics::diacritic_correct;
use crate::editdist::ScaledDistance;
use crate::embeddings::{vector_distance_correct, EmbeddingStore, DEFAULT_EDIT_WEIGHT, DEFAULT_MAX_EDIT};
use crate::error::{Error, Result};
use crate::lexicon::{nfc, Lexicon};
use crate::metrics::{self, EvalReport};
use crate::neural::{io, Direction, ExternalLayers, Seq2SeqModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Edit,
    Diacritic,
    Vector,
    Lstm1,
    Lstm2,
    LstmHook,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Edit,
        Method::Diacritic,
        Method::Vector,
        Method::Lstm1,
        Method::Lstm2,
        Method::LstmHook,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Edit => "edit",
            Method::Diacritic => "diacritic",
            Method::Vector => "vector",
            Method::Lstm1 => "lstm1",
            Method::Lstm2 => "lstm2",
            Method::LstmHook => "lstm-hook",
        }
    }

    pub fn is_neural(self) -> bool {
        matches!(self, Method::Lstm1 | Method::Lstm2 | Method::LstmHook)
    }

    /// The neural method a model with this shape belongs to.
    pub fn for_model(direction: Direction, hook: bool) -> Method {
        match (direction, hook) {
            (_, true) => Method::LstmHook,
            (Direction::Uni, false) => Method::Lstm1,
            (Direction::Bi, false) => Method::Lstm2,
        }
    }

    fn source(self) -> Source {
        match self {
            Method::Edit => Source::EditDistance,
            Method::Diacritic => Source::Diacritic,
            Method::Vector => Source::Vector,
            Method::Lstm1 => Source::Lstm1,
            Method::Lstm2 => Source::Lstm2,
            Method::LstmHook => Source::LstmHook,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method {s:?} (expected one of edit, diacritic, vector, lstm1, lstm2, lstm-hook)")))
    }
}

/// Which method to run and where its resources live.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectorSpec {
    pub method: Method,
    pub lexicon: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub layers: Option<PathBuf>,
    pub max_edit: usize,
    pub edit_weight: f64,
    /// Return lexicon members unchanged instead of correcting them.
    pub skip_known: bool,
}

impl CorrectorSpec {
    pub fn new(method: Method) -> Self {
        CorrectorSpec {
            method,
            lexicon: None,
            embeddings: None,
            model: None,
            layers: None,
            max_edit: DEFAULT_MAX_EDIT,
            edit_weight: DEFAULT_EDIT_WEIGHT,
            skip_known: false,
        }
    }

    /// Checks that every resource the method needs is configured, without
    /// touching the filesystem.
    pub fn validate(&self) -> Result<()> {
        let need = |p: &Option<PathBuf>, what: &str| {
            if p.is_none() {
                Err(Error::Config(format!("method {} needs --{what}", self.method)))
            } else {
                Ok(())
            }
        };
        match self.method {
            Method::Edit | Method::Diacritic => need(&self.lexicon, "lexicon")?,
            Method::Vector => {
                need(&self.lexicon, "lexicon")?;
                need(&self.embeddings, "embeddings")?;
                if self.max_edit == 0 {
                    return Err(Error::Config("--max-edit must be at least 1 for the vector method".into()));
                }
            }
            Method::Lstm1 | Method::Lstm2 => need(&self.model, "model")?,
            Method::LstmHook => {
                need(&self.model, "model")?;
                need(&self.layers, "layers")?;
            }
        }
        if self.skip_known {
            need(&self.lexicon, "lexicon")?;
        }
        if !(0.0..=1.0).contains(&self.edit_weight) {
            return Err(Error::Config(format!("edit weight {} not in [0, 1]", self.edit_weight)));
        }
        Ok(())
    }

    pub fn load(&self) -> Result<Corrector> {
        self.validate()?;
        let lexicon = self.lexicon.as_ref().map(Lexicon::load).transpose()?;
        let engine = match self.method {
            Method::Edit => Engine::Edit,
            Method::Diacritic => Engine::Diacritic,
            Method::Vector => Engine::Vector(EmbeddingStore::load(self.embeddings.as_ref().expect("validated"))?),
            Method::Lstm1 | Method::Lstm2 | Method::LstmHook => {
                let path = self.model.as_ref().expect("validated");
                let model = io::load(path)?;
                let found = Method::for_model(model.config.direction, model.config.hook.is_some());
                if found != self.method {
                    return Err(Error::Config(format!(
                        "{} is a {found} model, not {}",
                        path.display(),
                        self.method
                    )));
                }
                let layers = match (model.config.hook, &self.layers) {
                    (Some((l, dim)), Some(p)) => Some(ExternalLayers::load(p, dim, l)?),
                    _ => None,
                };
                Engine::Neural { model, layers }
            }
        };
        Ok(Corrector {
            method: self.method,
            lexicon,
            engine,
            max_edit: self.max_edit,
            edit_weight: self.edit_weight,
            skip_known: self.skip_known,
        })
    }
}

#[derive(Debug)]
enum Engine {
    Edit,
    Diacritic,
    Vector(EmbeddingStore),
    Neural {
        model: Seq2SeqModel,
        layers: Option<ExternalLayers>,
    },
}

/// A method with its resources loaded. Immutable, so shareable between
/// threads.
#[derive(Debug)]
pub struct Corrector {
    method: Method,
    lexicon: Option<Lexicon>,
    engine: Engine,
    max_edit: usize,
    edit_weight: f64,
    skip_known: bool,
}

/// Lexicon entries within `max_edit` of `token`, closest first.
pub fn edit_correct(token: &str, lex: &Lexicon, max_edit: usize) -> Vec<CorrectionCandidate> {
    let token = nfc(token);
    lex.fuzzy_search(&token, max_edit)
        .into_iter()
        .map(|(form, raw)| CorrectionCandidate {
            edit_score: ScaledDistance::between(&token, &form).scaled,
            form,
            edit_distance: Some(raw),
            semantic_score: None,
            combined: raw as f64,
            source: Source::EditDistance,
            char_probs: None,
        })
        .collect()
}

impl Corrector {
    /// Builds a neural corrector from an in-memory model.
    pub fn neural(model: Seq2SeqModel, layers: Option<ExternalLayers>) -> Self {
        Corrector {
            method: Method::for_model(model.config.direction, model.config.hook.is_some()),
            lexicon: None,
            engine: Engine::Neural { model, layers },
            max_edit: DEFAULT_MAX_EDIT,
            edit_weight: DEFAULT_EDIT_WEIGHT,
            skip_known: false,
        }
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn model(&self) -> Option<&Seq2SeqModel> {
        match &self.engine {
            Engine::Neural { model, .. } => Some(model),
            _ => None,
        }
    }

    fn stack(&self, token: &str) -> Option<&[Vec<f64>]> {
        match &self.engine {
            Engine::Neural { layers: Some(l), .. } => l.get(token).map(Vec::as_slice),
            _ => None,
        }
    }

    /// Ranked candidates, best first. Neural methods return exactly one.
    pub fn correct(&self, token: &str) -> Vec<CorrectionCandidate> {
        let token = nfc(token);
        let lex = self.lexicon.as_ref();
        if self.skip_known && lex.is_some_and(|l| l.contains(&token)) {
            return vec![CorrectionCandidate {
                form: token,
                edit_distance: Some(0),
                edit_score: 0.0,
                semantic_score: None,
                combined: 0.0,
                source: self.method.source(),
                char_probs: None,
            }];
        }
        match &self.engine {
            Engine::Edit => edit_correct(&token, lex.expect("validated"), self.max_edit),
            Engine::Diacritic => diacritic_correct(&token, lex.expect("validated")),
            Engine::Vector(emb) => {
                vector_distance_correct(&token, lex.expect("validated"), emb, self.max_edit, self.edit_weight)
            }
            Engine::Neural { model, .. } => {
                let (form, probs) = model.correct(&token, self.stack(&token));
                let d = ScaledDistance::between(&token, &form);
                let bits = probs.iter().map(|p| -p.max(metrics::PROB_FLOOR).log2()).sum::<f64>() / probs.len() as f64;
                vec![CorrectionCandidate {
                    form,
                    edit_distance: Some(d.raw),
                    edit_score: d.scaled,
                    semantic_score: None,
                    combined: bits,
                    source: self.method.source(),
                    char_probs: Some(probs),
                }]
            }
        }
    }
}

/// One line of the per-case prediction log.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub case_index: usize,
    pub error: String,
    pub gold: String,
    /// Empty when the corrector had no answer.
    pub predicted: String,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub report: EvalReport,
    pub predictions: Vec<Prediction>,
}

impl Evaluation {
    pub fn log_tsv(&self) -> String {
        let mut out = String::from("case_index\terror\tgold\tpredicted\tcorrect\n");
        for p in &self.predictions {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                p.case_index,
                p.error,
                p.gold,
                p.predicted,
                u8::from(p.correct)
            );
        }
        out
    }
}

struct CaseResult {
    prediction: Prediction,
    /// Teacher-forced gold probabilities (neural methods only).
    gold_probs: Option<Vec<f64>>,
    step_losses: Option<Vec<f64>>,
}

fn run_case(corrector: &Corrector, index: usize, case: &ErrorCase) -> CaseResult {
    let predicted = corrector
        .correct(&case.error)
        .into_iter()
        .next()
        .map(|c| c.form)
        .unwrap_or_default();
    let correct = !predicted.is_empty() && nfc(&predicted) == nfc(&case.correction);
    let (gold_probs, step_losses) = match &corrector.engine {
        Engine::Neural { model, .. } => {
            let stack = corrector.stack(&case.error);
            (
                Some(model.score(&case.error, &case.correction, stack)),
                Some(model.step_losses(&case.error, &case.correction, stack)),
            )
        }
        _ => (None, None),
    };
    CaseResult {
        prediction: Prediction {
            case_index: index,
            error: case.error.clone(),
            gold: case.correction.clone(),
            predicted,
            correct,
        },
        gold_probs,
        step_losses,
    }
}

/// Runs the corrector over one split. Cases are spread over `jobs`
/// threads; results are merged in case order, so the output does not
/// depend on `jobs`.
pub fn evaluate(corrector: &Corrector, corpus: &ErrorCorpus, split: Split, jobs: usize) -> Result<Evaluation> {
    let cases = corpus.subset(split);
    if cases.is_empty() {
        return Err(Error::Domain(format!("the {split:?} split is empty").to_lowercase()));
    }
    if let Engine::Neural { layers: Some(l), .. } = &corrector.engine {
        let missing = cases.iter().filter(|(_, c)| l.get(&c.error).is_none()).count();
        if missing > 0 {
            log::warn!("{missing} evaluation tokens have no external layers; using zero stacks");
        }
    }
    let jobs = jobs.max(1).min(cases.len());
    let results: Vec<CaseResult> = if jobs == 1 {
        cases.iter().map(|&(i, c)| run_case(corrector, i, c)).collect()
    } else {
        let chunk = cases.len().div_ceil(jobs);
        std::thread::scope(|s| {
            let handles: Vec<_> = cases
                .chunks(chunk)
                .map(|part| s.spawn(move || part.iter().map(|&(i, c)| run_case(corrector, i, c)).collect::<Vec<_>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("evaluation worker panicked"))
                .collect()
        })
    };

    let hits = results.iter().filter(|r| r.prediction.correct).count();
    let accuracy = hits as f64 / results.len() as f64;
    let (perplexity, test_loss) = if corrector.method.is_neural() {
        let seqs: Vec<Vec<f64>> = results.iter().filter_map(|r| r.gold_probs.clone()).collect();
        let ppl = metrics::perplexity(&seqs)?;
        let (sum, n) = results
            .iter()
            .filter_map(|r| r.step_losses.as_ref())
            .fold((0.0, 0usize), |(s, n), l| (s + l.iter().sum::<f64>(), n + l.len()));
        (Some(ppl.value), Some(sum / n as f64))
    } else {
        (None, None)
    };
    Ok(Evaluation {
        report: EvalReport {
            method: corrector.method.name().to_string(),
            accuracy,
            perplexity,
            test_loss,
            train_loss: corrector.model().and_then(|m| m.train_loss),
            cases: results.len(),
        },
        predictions: results.into_iter().map(|r| r.prediction).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Fractions;

    fn lex_corrector(method: Method, words: &[&str]) -> Corrector {
        Corrector {
            method,
            lexicon: Some(Lexicon::from_words(words.iter().copied()).unwrap()),
            engine: match method {
                Method::Edit => Engine::Edit,
                Method::Diacritic => Engine::Diacritic,
                _ => unreachable!(),
            },
            max_edit: 2,
            edit_weight: 0.5,
            skip_known: false,
        }
    }

    fn corpus(pairs: &[(&str, &str)]) -> ErrorCorpus {
        ErrorCorpus::new(
            pairs
                .iter()
                .map(|&(e, c)| ErrorCase {
                    error: e.into(),
                    correction: c.into(),
                })
                .collect(),
        )
        .split(Fractions::new(0.0, 0.0, 1.0).unwrap(), 0)
        .unwrap()
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("lstm3".parse::<Method>().is_err());
    }

    #[test]
    fn edit_returns_member_first() {
        let c = lex_corrector(Method::Edit, &["kot", "kos", "rak"]);
        let r = c.correct("kot");
        assert_eq!((r[0].form.as_str(), r[0].combined), ("kot", 0.0));
        assert_eq!(r.iter().map(|c| c.form.as_str()).collect::<Vec<_>>(), ["kot", "kos"]);
    }

    #[test]
    fn diacritic_guard_applies() {
        let c = lex_corrector(Method::Diacritic, &["ołówek"]);
        assert!(c.correct("aaaaaaaaaaaaaaaaa").is_empty());
        assert_eq!(c.correct("olowek")[0].form, "ołówek");
    }

    #[test]
    fn missing_resources_are_named() {
        let err = CorrectorSpec::new(Method::Vector).validate().unwrap_err().to_string();
        assert!(err.contains("lexicon"), "{err}");
        let mut spec = CorrectorSpec::new(Method::Vector);
        spec.lexicon = Some("l.txt".into());
        assert!(spec.validate().unwrap_err().to_string().contains("embeddings"));
        assert!(CorrectorSpec::new(Method::LstmHook).validate().is_err());
    }

    #[test]
    fn empty_answers_count_as_wrong_and_log_recounts() {
        let c = lex_corrector(Method::Diacritic, &["ołówek", "kot"]);
        let corpus = corpus(&[("olowek", "ołówek"), ("xyz", "kot"), ("kot", "kot"), ("pies", "pies")]);
        let ev = evaluate(&c, &corpus, Split::Test, 1).unwrap();
        assert_eq!(ev.report.cases, 4);
        assert_eq!(ev.report.accuracy, 0.5);
        assert_eq!(ev.report.perplexity, None);
        let recount = ev.predictions.iter().filter(|p| p.correct).count() as f64 / ev.predictions.len() as f64;
        assert_eq!(recount, ev.report.accuracy);
        assert!(ev.log_tsv().lines().nth(2).unwrap().ends_with("xyz\tkot\t\t0"));
    }

    #[test]
    fn jobs_do_not_change_results() {
        let words: Vec<String> = (0..40).map(|i| format!("słowo{i}")).collect();
        let refs: Vec<&str> = words.iter().map(String::as_str).collect();
        let c = lex_corrector(Method::Edit, &refs);
        let pairs: Vec<(String, String)> = words.iter().map(|w| (w.replace('ł', "l"), w.clone())).collect();
        let pairs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let corpus = corpus(&pairs);
        let one = evaluate(&c, &corpus, Split::Test, 1).unwrap();
        let many = evaluate(&c, &corpus, Split::Test, 7).unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn empty_split_is_an_error() {
        let c = lex_corrector(Method::Edit, &["kot"]);
        let corpus = ErrorCorpus::new(vec![ErrorCase {
            error: "kto".into(),
            correction: "kot".into(),
        }])
        .split(Fractions::new(1.0, 0.0, 0.0).unwrap(), 0)
        .unwrap();
        assert!(evaluate(&c, &corpus, Split::Test, 1).is_err());
    }
}
