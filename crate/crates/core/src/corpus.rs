//! Error/correction pair corpora and seeded train/dev/test splits.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{read_lines, split_lines, Error, Result};
use crate::lexicon::nfc;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ErrorCase {
    pub error: String,
    pub correction: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl std::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            other => Err(Error::Config(format!("unknown split {other:?}"))),
        }
    }
}

/// Split proportions. Must be non-negative and sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fractions {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
}

impl Default for Fractions {
    fn default() -> Self {
        Fractions {
            train: 0.70,
            dev: 0.05,
            test: 0.25,
        }
    }
}

impl Fractions {
    pub fn new(train: f64, dev: f64, test: f64) -> Result<Self> {
        let f = Fractions { train, dev, test };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.dev, self.test];
        if parts.iter().any(|p| !p.is_finite() || *p < 0.0) || ((parts.iter().sum::<f64>()) - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "split fractions {:?} must be non-negative and sum to 1",
                parts
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct ErrorCorpus {
    pub cases: Vec<ErrorCase>,
    assignment: Vec<Split>,
    seed: Option<u64>,
}

impl ErrorCorpus {
    /// Every case starts in the training split until [`ErrorCorpus::split`]
    /// is called.
    pub fn new(cases: Vec<ErrorCase>) -> Self {
        let assignment = vec![Split::Train; cases.len()];
        ErrorCorpus {
            cases,
            assignment,
            seed: None,
        }
    }

    pub fn load(path: impl AsRef<Path>, dedup: bool) -> Result<Self> {
        let path = path.as_ref();
        Self::from_lines(read_lines(path)?, path, dedup)
    }

    pub fn parse(text: &str, dedup: bool) -> Result<Self> {
        let p = Path::new("<memory>");
        Self::from_lines(split_lines(text.as_bytes(), p)?, p, dedup)
    }

    fn from_lines(lines: Vec<(usize, String)>, path: &Path, dedup: bool) -> Result<Self> {
        let mut cases = Vec::new();
        let mut seen = HashSet::new();
        for (no, line) in lines {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 2 {
                return Err(Error::parse(path, no, format!("expected 2 tab-separated columns, found {}", cols.len())));
            }
            let (error, correction) = (nfc(cols[0].trim()), nfc(cols[1].trim()));
            if error.is_empty() || correction.is_empty() {
                return Err(Error::parse(path, no, "empty field"));
            }
            let case = ErrorCase { error, correction };
            if dedup && !seen.insert(case.clone()) {
                continue;
            }
            cases.push(case);
        }
        Ok(ErrorCorpus::new(cases))
    }

    pub fn to_tsv(&self) -> String {
        self.cases
            .iter()
            .map(|c| format!("{}\t{}\n", c.error, c.correction))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Assigns each case to a split. The assignment depends only on the
    /// seed, the case count and each case's index.
    pub fn split(mut self, fractions: Fractions, seed: u64) -> Result<Self> {
        fractions.validate()?;
        let n = self.cases.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let n_train = (n as f64 * fractions.train).round() as usize;
        let n_train_dev = ((n as f64 * (fractions.train + fractions.dev)).round() as usize).clamp(n_train, n);
        for (rank, &idx) in order.iter().enumerate() {
            self.assignment[idx] = if rank < n_train {
                Split::Train
            } else if rank < n_train_dev {
                Split::Dev
            } else {
                Split::Test
            };
        }
        self.seed = Some(seed);
        Ok(self)
    }

    pub fn assignment(&self, index: usize) -> Split {
        self.assignment[index]
    }

    /// `(index, case)` pairs of one split, in corpus order.
    pub fn subset(&self, split: Split) -> Vec<(usize, &ErrorCase)> {
        self.cases
            .iter()
            .enumerate()
            .filter(|(i, _)| self.assignment[*i] == split)
            .collect()
    }

    pub fn sizes(&self) -> (usize, usize, usize) {
        let count = |s| self.assignment.iter().filter(|&&a| a == s).count();
        (count(Split::Train), count(Split::Dev), count(Split::Test))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn numbered(n: usize) -> ErrorCorpus {
        ErrorCorpus::new(
            (0..n)
                .map(|i| ErrorCase {
                    error: format!("e{i}"),
                    correction: format!("c{i}"),
                })
                .collect(),
        )
    }

    #[test]
    fn dedup_keeps_first_occurrence() {
        let text = "kot\tkot\npsy\tpsy\nkot\tkot\n";
        assert_eq!(ErrorCorpus::parse(text, true).unwrap().len(), 2);
        assert_eq!(ErrorCorpus::parse(text, false).unwrap().len(), 3);
    }

    #[test]
    fn crlf_and_lf_agree() {
        let lf = "# c\nolowek\tołówek\n\nzle\tźle\n";
        let crlf = lf.replace('\n', "\r\n");
        let a = ErrorCorpus::parse(lf, false).unwrap();
        let b = ErrorCorpus::parse(&crlf, false).unwrap();
        assert_eq!(a.cases, b.cases);
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn wrong_column_count_names_line() {
        let err = ErrorCorpus::parse("a\tb\na\tb\tc\n", false).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn split_sizes() {
        let c = numbered(100).split(Fractions::default(), 1).unwrap();
        assert_eq!(c.sizes(), (70, 5, 25));
        let c = numbered(100).split(Fractions::new(1.0, 0.0, 0.0).unwrap(), 1).unwrap();
        assert_eq!(c.sizes(), (100, 0, 0));
    }

    #[test]
    fn invalid_fractions() {
        assert!(Fractions::new(0.75, 0.05, 0.25).is_err());
        assert!(Fractions::new(1.2, -0.2, 0.0).is_err());
    }

    #[test]
    fn seeds() {
        let a = numbered(200).split(Fractions::default(), 5).unwrap();
        let b = numbered(200).split(Fractions::default(), 5).unwrap();
        let c = numbered(200).split(Fractions::default(), 6).unwrap();
        let asg = |x: &ErrorCorpus| (0..200).map(|i| x.assignment(i)).collect::<Vec<_>>();
        assert_eq!(asg(&a), asg(&b));
        assert_ne!(asg(&a), asg(&c));
    }

    proptest! {
        #[test]
        fn split_partitions(n in 0usize..300, a in 0.0f64..1.0, b in 0.0f64..1.0, seed in any::<u64>()) {
            let (train, dev) = (a, (1.0 - a) * b);
            let f = Fractions { train, dev, test: 1.0 - train - dev };
            prop_assume!(f.validate().is_ok());
            let c = numbered(n).split(f, seed).unwrap();
            let (tr, dv, te) = c.sizes();
            prop_assert_eq!(tr + dv + te, n);
            let close = |got: usize, frac: f64| (got as f64 - frac * n as f64).abs() <= 1.0;
            prop_assert!(close(tr, f.train) && close(dv, f.dev) && close(te, f.test));
            let mut all: Vec<usize> = [Split::Train, Split::Dev, Split::Test]
                .iter().flat_map(|&s| c.subset(s).into_iter().map(|(i, _)| i)).collect();
            all.sort();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }
    }
}
