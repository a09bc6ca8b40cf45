//! Accuracy, perplexity and loss aggregation, and the method-per-row
//! report table.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lexicon::nfc;

/// Smallest probability admitted by [`perplexity`]; zeros are clamped up
/// to it.
pub const PROB_FLOOR: f64 = 1e-12;

pub fn accuracy<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Domain("accuracy of an empty prediction list".into()));
    }
    let hits = pairs
        .iter()
        .filter(|(p, g)| nfc(p.as_ref()) == nfc(g.as_ref()))
        .count();
    Ok(hits as f64 / pairs.len() as f64)
}

/// `2^(−(1/N) Σ log₂ pᵢ)` for one probability sequence.
pub fn token_perplexity(probs: &[f64]) -> Result<(f64, usize)> {
    if probs.is_empty() {
        return Err(Error::Domain("perplexity of an empty sequence".into()));
    }
    let mut clamped = 0;
    let mut bits = 0.0;
    for &p in probs {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
        }
        let p = if p < PROB_FLOOR {
            clamped += 1;
            PROB_FLOOR
        } else {
            p
        };
        bits -= p.log2();
    }
    Ok(((bits / probs.len() as f64).exp2(), clamped))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perplexity {
    pub value: f64,
    /// Zero probabilities raised to [`PROB_FLOOR`].
    pub clamped: usize,
}

/// Mean of per-token perplexities.
pub fn perplexity(seqs: &[Vec<f64>]) -> Result<Perplexity> {
    if seqs.is_empty() {
        return Err(Error::Domain("perplexity of an empty corpus".into()));
    }
    let mut total = 0.0;
    let mut clamped = 0;
    for s in seqs {
        let (p, c) = token_perplexity(s)?;
        total += p;
        clamped += c;
    }
    if clamped > 0 {
        log::warn!("perplexity: {clamped} zero probabilities clamped to {PROB_FLOOR:e}");
    }
    Ok(Perplexity {
        value: total / seqs.len() as f64,
        clamped,
    })
}

/// Mean negative natural-log probability per character over all sequences.
pub fn cross_entropy(seqs: &[Vec<f64>]) -> f64 {
    let (sum, n) = seqs
        .iter()
        .flatten()
        .fold((0.0, 0usize), |(s, n), &p| (s - p.max(PROB_FLOOR).ln(), n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub method: String,
    pub accuracy: f64,
    pub perplexity: Option<f64>,
    pub test_loss: Option<f64>,
    /// Mean training loss of the final epoch, when the model file carries it.
    pub train_loss: Option<f64>,
    pub cases: usize,
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.prec$}"))
}

pub fn format_table(rows: &[EvalReport]) -> String {
    let header = ["Method", "Accuracy", "Perplexity", "Loss (train)", "Loss (test)", "Cases"];
    let body: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.method.clone(),
                format!("{:.4}", r.accuracy),
                opt(r.perplexity, 2),
                opt(r.train_loss, 4),
                opt(r.test_loss, 4),
                r.cases.to_string(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &header.map(String::from));
    let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    for row in &body {
        line(&mut out, row);
    }
    out
}

pub fn format_tsv(rows: &[EvalReport]) -> String {
    let mut out = String::from("method\taccuracy\tperplexity\tloss_train\tloss_test\tcases\n");
    for r in rows {
        let o = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| x.to_string());
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.method,
            r.accuracy,
            o(r.perplexity),
            o(r.train_loss),
            o(r.test_loss),
            r.cases
        );
    }
    out
}
