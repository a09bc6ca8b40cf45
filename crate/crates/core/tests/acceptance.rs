//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any fails. Tolerances and budgets are the
//! constants below.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spellcorr::corpus::{ErrorCase, ErrorCorpus, Fractions, Split};
use spellcorr::diacritics::{diacritic_correct, enumerate_variants, variant_count, DiacriticTable};
use spellcorr::editdist::{levenshtein, levenshtein_chars};
use spellcorr::embeddings::{token_distance, vector_distance_correct};
use spellcorr::fixtures::{synthetic_words, FixtureConfig, Fixtures, TOY_PAIRS};
use spellcorr::metrics::{cross_entropy, perplexity, token_perplexity};
use spellcorr::neural::{build_model, gradient_check, train, CharVocab, Direction, ModelConfig, Seq2SeqModel, TrainConfig, TrainPair};
use spellcorr::pipeline::{evaluate, CorrectorSpec, Method};
use spellcorr::Lexicon;

const BK_TRIALS: usize = 200;
const BK_MAX_LEXICON: usize = 2000;
const BK_BUDGET: Duration = Duration::from_secs(30);
const LD_MAX_LEN: usize = 6;
const ENUM_TOKENS: usize = 1000;
const ENUM_MAX_COUNT: u128 = 100_000;
const LONG_TOKEN: &str = "Modlin-Zegrze-Pultusk-Różan-Ostrołęka-Łomża-Osowiec";
const LONG_TOKEN_MIN: u128 = 1 << 29;
const RESTORE_WORDS: usize = 500;
const SELF_DISTANCE_TOKENS: usize = 100;
const SCALE: f32 = 7.3;
const GC_SEEDS: u64 = 10;
const GC_HIDDEN: usize = 8;
const GC_TOLERANCE: f64 = 1e-4;
const GC_BUDGET: Duration = Duration::from_secs(120);
const MEM_HIDDEN: usize = 128;
const MEM_EPOCHS: usize = 35;
const MEM_SLACK: f64 = 0.05;
const MEM_BUDGET: Duration = Duration::from_secs(300);
const PPL_TOLERANCE: f64 = 1e-9;
const PPL_SEQUENCES: usize = 100;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("bk-tree matches brute force", bk_tree_oracle),
        ("levenshtein matches recursive oracle", levenshtein_oracle),
        ("diacritic enumeration", diacritic_enumeration),
        ("restoration completeness", restoration_completeness),
        ("combined distance", combined_distance),
        ("gradient check", gradient_checks),
        ("memorization", memorization),
        ("perplexity analytics", perplexity_analytics),
        ("determinism", determinism),
        ("report shape", report_shape),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

// Plain two-row DP over chars, written independently of the library.
fn brute_distance(a: &[char], b: &[char]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, cb) in b.iter().enumerate() {
            cur[j + 1] = (prev[j] + usize::from(ca != cb)).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

fn bk_tree_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let alphabet: Vec<char> = "abkotłóz".chars().collect();
    let word = |rng: &mut ChaCha8Rng| -> String {
        let len = rng.random_range(1..=8);
        (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect()
    };
    let mut hits = 0;
    for trial in 0..BK_TRIALS {
        let size = rng.random_range(1..=BK_MAX_LEXICON);
        let words: Vec<String> = (0..size).map(|_| word(&mut rng)).collect();
        let lex = Lexicon::from_words(words.iter().map(String::as_str)).map_err(|e| e.to_string())?;
        let token = word(&mut rng);
        let max_dist = rng.random_range(0..=3);
        let tc: Vec<char> = token.chars().collect();
        let mut expected: Vec<(String, usize)> = lex
            .words()
            .map(|w| (w.to_string(), brute_distance(&tc, &w.chars().collect::<Vec<_>>())))
            .filter(|&(_, d)| d <= max_dist)
            .collect();
        expected.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        let got = lex.fuzzy_search(&token, max_dist);
        ensure!(got == expected, "trial {trial}: {token:?} within {max_dist} gave {} results, scan {}", got.len(), expected.len());
        hits += got.len();
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < BK_BUDGET, "took {elapsed:?}, budget {BK_BUDGET:?}");
    Ok(format!("{BK_TRIALS} trials, {hits} matches, 0 mismatches"))
}

fn recursive(a: &[u8], b: &[u8], memo: &mut [[u8; LD_MAX_LEN + 1]; LD_MAX_LEN + 1]) -> u8 {
    if a.is_empty() {
        return b.len() as u8;
    }
    if b.is_empty() {
        return a.len() as u8;
    }
    let slot = &mut memo[a.len()][b.len()];
    if *slot != u8::MAX {
        return *slot;
    }
    let d = if a[0] == b[0] {
        recursive(&a[1..], &b[1..], memo)
    } else {
        1 + recursive(&a[1..], b, memo)
            .min(recursive(a, &b[1..], memo))
            .min(recursive(&a[1..], &b[1..], memo))
    };
    memo[a.len()][b.len()] = d;
    d
}

fn levenshtein_oracle() -> Outcome {
    let letters = [b'a', b'b', b'c', b'd'];
    let mut strings: Vec<Vec<u8>> = vec![vec![]];
    let mut frontier: Vec<Vec<u8>> = vec![vec![]];
    for _ in 0..LD_MAX_LEN {
        frontier = frontier
            .iter()
            .flat_map(|s| letters.iter().map(move |&l| [s.as_slice(), &[l]].concat()))
            .collect();
        strings.extend(frontier.iter().cloned());
    }
    let chars: Vec<Vec<char>> = strings.iter().map(|s| s.iter().map(|&b| b as char).collect()).collect();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    let rows = strings.len().div_ceil(workers);
    let results: Vec<Result<u64, String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let (strings, chars) = (&strings, &chars);
                scope.spawn(move || {
                    let mut pairs = 0u64;
                    for i in (w * rows)..((w + 1) * rows).min(strings.len()) {
                        for j in 0..strings.len() {
                            let mut memo = [[u8::MAX; LD_MAX_LEN + 1]; LD_MAX_LEN + 1];
                            let want = recursive(&strings[i], &strings[j], &mut memo) as usize;
                            let got = levenshtein_chars(&chars[i], &chars[j]);
                            if got != want {
                                return Err(format!("{:?} vs {:?}: dp {got}, oracle {want}", chars[i], chars[j]));
                            }
                            pairs += 1;
                        }
                    }
                    Ok(pairs)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut pairs = 0;
    for r in results {
        pairs += r?;
    }
    ensure!(levenshtein("olowek", "ołówek") == 2, "olowek/ołówek");
    ensure!(pairs == (strings.len() * strings.len()) as u64, "only {pairs} pairs compared");
    Ok(format!("{pairs} pairs over {} strings, 0 mismatches", strings.len()))
}

fn option_count(c: char) -> u128 {
    match c {
        'z' | 'Z' => 3,
        _ if "acelnosACELNOSąćęłńóśżźĄĆĘŁŃÓŚŻŹ".contains(c) => 2,
        _ => 1,
    }
}

fn diacritic_enumeration() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let alphabet: Vec<char> = "azZżźŻŹłŁóckxy-ęEń".chars().collect();
    let mut checked = 0;
    let mut largest = 0;
    while checked < ENUM_TOKENS {
        let len = rng.random_range(0..=14);
        let token: String = (0..len).map(|_| *alphabet.choose(&mut rng).unwrap()).collect();
        let product: u128 = token.chars().map(option_count).product();
        if product > ENUM_MAX_COUNT {
            continue;
        }
        ensure!(variant_count(&token) == product, "{token:?}: variant_count {} != product {product}", variant_count(&token));
        let mut seen = HashSet::new();
        for v in enumerate_variants(&token) {
            ensure!(seen.insert(v.clone()), "{token:?}: {v:?} enumerated twice");
        }
        ensure!(seen.len() as u128 == product, "{token:?}: enumerated {} != {product}", seen.len());
        ensure!(seen.contains(&token), "{token:?} missing from its own variants");
        largest = largest.max(product);
        checked += 1;
    }

    let long = variant_count(LONG_TOKEN);
    ensure!(long > LONG_TOKEN_MIN, "long token count {long} not above {LONG_TOKEN_MIN}");

    let word17 = "zażółćgęśląjaźńx";
    let word17 = format!("{word17}a");
    let word16: String = word17.chars().take(16).collect();
    let lex = Lexicon::from_words([word17.as_str(), word16.as_str()]).map_err(|e| e.to_string())?;
    let stripped17 = DiacriticTable.strip(&word17);
    ensure!(diacritic_correct(&stripped17, &lex).is_empty(), "17-char token produced corrections");
    ensure!(diacritic_correct(&word17, &lex).is_empty(), "17-char lexicon member produced corrections");
    ensure!(diacritic_correct(LONG_TOKEN, &lex).is_empty(), "long token produced corrections");
    let r16 = diacritic_correct(&DiacriticTable.strip(&word16), &lex);
    ensure!(r16.first().map(|c| c.form.as_str()) == Some(word16.as_str()), "16-char token not restored");
    Ok(format!("{checked} tokens (largest {largest}), long token {long} variants, guard at 17"))
}

fn write_lexicon(dir: &Path, words: &[String]) -> std::path::PathBuf {
    let path = dir.join("lexicon.txt");
    std::fs::write(&path, words.join("\n") + "\n").unwrap();
    path
}

fn restoration_completeness() -> Outcome {
    let table = DiacriticTable;
    let pool = synthetic_words(4000, 44);
    let known: HashSet<&str> = pool.iter().map(String::as_str).collect();
    // Keep words whose stripped form restores to them alone.
    let mut chosen = Vec::new();
    for w in &pool {
        let stripped = table.strip(w);
        if stripped == *w {
            continue;
        }
        let members = table.variants(&stripped).filter(|v| known.contains(v.as_str())).count();
        if members == 1 {
            chosen.push(w.clone());
        }
        if chosen.len() == RESTORE_WORDS {
            break;
        }
    }
    ensure!(chosen.len() == RESTORE_WORDS, "only {} words with unique restorations", chosen.len());
    let dir = tempfile::tempdir().unwrap();
    let mut spec = CorrectorSpec::new(Method::Diacritic);
    spec.lexicon = Some(write_lexicon(dir.path(), &pool));
    let corrector = spec.load().map_err(|e| e.to_string())?;
    let corpus = ErrorCorpus::new(
        chosen
            .iter()
            .map(|w| ErrorCase {
                error: table.strip(w),
                correction: w.clone(),
            })
            .collect(),
    )
    .split(Fractions::new(0.0, 0.0, 1.0).unwrap(), 0)
    .map_err(|e| e.to_string())?;
    let ev = evaluate(&corrector, &corpus, Split::Test, 1).map_err(|e| e.to_string())?;
    ensure!(ev.report.accuracy == 1.0, "accuracy {} on {} cases", ev.report.accuracy, ev.report.cases);
    Ok(format!("accuracy 1.0 on {} stripped words, lexicon of {}", ev.report.cases, pool.len()))
}

fn combined_distance() -> Outcome {
    let fx = Fixtures::generate(&FixtureConfig::default()).map_err(|e| e.to_string())?;
    let lex = Lexicon::from_words(fx.lexicon.iter().map(String::as_str)).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sample: Vec<&String> = fx.lexicon.choose_multiple(&mut rng, SELF_DISTANCE_TOKENS).collect();
    for w in &sample {
        ensure!(token_distance(w, w, &fx.embeddings) == Some(0.0), "D({w}, {w}) = {:?}", token_distance(w, w, &fx.embeddings));
        let top = &vector_distance_correct(w, &lex, &fx.embeddings, 3, 0.5)[0];
        ensure!(top.form == **w && top.combined == 0.0, "{w} ranked {} at {}", top.form, top.combined);
    }

    let scaled = fx.embeddings.scaled(SCALE);
    let queries: Vec<&str> = fx
        .corpus
        .cases
        .iter()
        .map(|c| c.error.as_str())
        .chain(sample.iter().map(|w| w.as_str()))
        .collect();
    let mut ranked = 0;
    for q in &queries {
        let a: Vec<String> = vector_distance_correct(q, &lex, &fx.embeddings, 3, 0.5).into_iter().map(|c| c.form).collect();
        let b: Vec<String> = vector_distance_correct(q, &lex, &scaled, 3, 0.5).into_iter().map(|c| c.form).collect();
        ensure!(a == b, "{q}: order changed after scaling by {SCALE}");
        ranked += a.len();
    }
    Ok(format!(
        "D(a,a)=0 for {} tokens; {} rankings ({ranked} candidates) unchanged under x{SCALE}",
        sample.len(),
        queries.len()
    ))
}

fn random_word(rng: &mut ChaCha8Rng, alphabet: &[char]) -> String {
    let len = rng.random_range(1..=5);
    (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

fn gradient_checks() -> Outcome {
    let start = Instant::now();
    let alphabet: Vec<char> = "abcłóz".chars().collect();
    let vocab = CharVocab::from_chars(alphabet.iter().copied());
    let mut summary = Vec::new();
    for (label, direction, hook) in [
        ("uni", Direction::Uni, None),
        ("bi", Direction::Bi, None),
        ("bi+hook", Direction::Bi, Some((3, 5))),
    ] {
        let mut worst: f64 = 0.0;
        let mut retries = 0;
        for seed in 0..GC_SEEDS {
            let cfg = ModelConfig {
                hidden: GC_HIDDEN,
                embed: 4,
                direction,
                hook,
            };
            let model = Seq2SeqModel::new(vocab.clone(), cfg, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let error = random_word(&mut rng, &alphabet);
            let correction = random_word(&mut rng, &alphabet);
            let stack: Option<Vec<Vec<f64>>> =
                hook.map(|(l, d)| (0..l).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect());
            let r = gradient_check(&model, &error, &correction, stack.as_deref());
            ensure!(r.checked == model.params.count(), "{label} seed {seed}: checked {} of {}", r.checked, model.params.count());
            if hook.is_some() {
                ensure!(
                    r.per_tensor.iter().any(|(n, _)| n == "hook.layer_weights"),
                    "{label}: layer weights not checked"
                );
            }
            ensure!(r.max_rel_error < GC_TOLERANCE, "{label} seed {seed}: max relative error {:.3e}", r.max_rel_error);
            worst = worst.max(r.max_rel_error);
            retries += r.kink_retries;
        }
        summary.push(format!("{label} {worst:.1e} ({retries} kink retries)"));
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < GC_BUDGET, "took {elapsed:?}, budget {GC_BUDGET:?}");
    Ok(format!("{GC_SEEDS} seeds each, worst: {}", summary.join(", ")))
}

fn memorization() -> Outcome {
    let start = Instant::now();
    let pairs: Vec<(String, String)> = TOY_PAIRS.iter().map(|&(e, c)| (e.into(), c.into())).collect();
    let cfg = TrainConfig {
        epochs: MEM_EPOCHS,
        hidden: MEM_HIDDEN,
        embed: 64,
        batch_size: 8,
        learning_rate: 3e-3,
        seed: 0,
        ..TrainConfig::default()
    };
    let mut model = build_model(&pairs, &cfg, Direction::Uni, None);
    let train_pairs: Vec<TrainPair<'_>> = pairs
        .iter()
        .map(|(e, c)| TrainPair {
            error: e,
            correction: c,
            stack: None,
        })
        .collect();
    let report = train(&mut model, &train_pairs, &cfg).map_err(|e| e.to_string())?;
    ensure!(report.loss_history.len() == MEM_EPOCHS, "{} epochs recorded", report.loss_history.len());
    for (i, w) in report.loss_history.windows(2).enumerate() {
        ensure!(w[1] <= w[0] + MEM_SLACK, "loss rose from {} to {} at epoch {}", w[0], w[1], i + 2);
    }
    let wrong: Vec<String> = pairs
        .iter()
        .filter_map(|(e, c)| {
            let got = model.correct(e, None).0;
            (got != *c).then(|| format!("{e}->{got}"))
        })
        .collect();
    ensure!(wrong.is_empty(), "{} of {} pairs wrong: {}", wrong.len(), pairs.len(), wrong.join(" "));
    let elapsed = start.elapsed();
    ensure!(elapsed < MEM_BUDGET, "took {elapsed:?}, budget {MEM_BUDGET:?}");
    Ok(format!(
        "50/50 pairs, loss {:.3} -> {:.4}",
        report.loss_history[0],
        report.loss_history[MEM_EPOCHS - 1]
    ))
}

fn perplexity_analytics() -> Outcome {
    for n in [1, 3, 10, 57] {
        let p = perplexity(&[vec![0.5; n]]).map_err(|e| e.to_string())?.value;
        ensure!((p - 2.0).abs() <= PPL_TOLERANCE, "uniform 1/2 over {n} chars gave {p}");
        let one = perplexity(&[vec![1.0; n], vec![1.0; n + 2]]).map_err(|e| e.to_string())?.value;
        ensure!(one == 1.0, "all-ones gave {one}");
    }
    let p = token_perplexity(&[0.5, 0.25]).map_err(|e| e.to_string())?.0;
    ensure!((p - 2f64.powf(1.5)).abs() <= PPL_TOLERANCE, "(0.5, 0.25) gave {p}");

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..PPL_SEQUENCES {
        let n = rng.random_range(1..=20);
        let seq: Vec<f64> = (0..n).map(|_| rng.random_range(0.001..=1.0)).collect();
        let ppl = token_perplexity(&seq).map_err(|e| e.to_string())?.0;
        let bits = cross_entropy(std::slice::from_ref(&seq)) / std::f64::consts::LN_2;
        let diff = (ppl - bits.exp2()).abs();
        ensure!(diff <= PPL_TOLERANCE, "perplexity {ppl} vs 2^H {}", bits.exp2());
        worst = worst.max(diff);
    }
    Ok(format!("2.0, 1.0 and 2^1.5 exact to {PPL_TOLERANCE:e}; {PPL_SEQUENCES} sequences agree within {worst:.1e}"))
}

fn spellcorr(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_spellcorr"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("spellcorr {} exited {}: {}", args.join(" "), out.status, String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const SMALL_TRAIN: [&str; 10] = ["--hidden", "16", "--embed", "8", "--epochs", "6", "--batch-size", "8", "--lr", "0.005"];

fn determinism() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for run in ["a", "b"] {
        let dir = root.path().join(run);
        spellcorr(&["gen-fixtures", "--out", p(&dir), "--words", "150", "--cases", "60"])?;
        let model = dir.join("hook.bin");
        let (corpus, layers) = (dir.join("corpus.tsv"), dir.join("layers.txt"));
        let (lexicon, vectors) = (dir.join("lexicon.txt"), dir.join("vectors.txt"));
        let mut args = vec![
            "train",
            "--corpus",
            p(&corpus),
            "--out",
            p(&model),
            "--direction",
            "bi",
            "--layers",
            p(&layers),
            "--seed",
            "11",
        ];
        args.extend(SMALL_TRAIN);
        let train_out = spellcorr(&args)?;
        let eval = |jobs: &str| {
            spellcorr(&[
                "evaluate",
                "--corpus",
                p(&corpus),
                "--method",
                "lstm-hook,vector",
                "--model",
                p(&model),
                "--layers",
                p(&layers),
                "--lexicon",
                p(&lexicon),
                "--embeddings",
                p(&vectors),
                "--format",
                "tsv",
                "--jobs",
                jobs,
            ])
        };
        let report = eval("1")?;
        ensure!(report == eval("3")?, "run {run}: report depends on --jobs");
        let model_bytes = std::fs::read(&model).unwrap();
        let history = std::fs::read(dir.join("hook.bin.loss.tsv")).unwrap();
        runs.push((train_out, model_bytes, history, report));
    }
    let (a, b) = (&runs[0], &runs[1]);
    ensure!(a.0 == b.0, "train output differs");
    ensure!(a.1 == b.1, "model files differ");
    ensure!(a.2 == b.2, "loss histories differ");
    ensure!(a.3 == b.3, "reports differ");
    Ok(format!("model {} bytes, loss history and report identical across runs and job counts", a.1.len()))
}

fn report_shape() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    spellcorr(&["gen-fixtures", "--out", p(d)])?;
    let corpus = d.join("corpus.tsv");
    let layers = d.join("layers.txt");
    let mut weights = Vec::new();
    for (name, extra) in [
        ("uni.bin", vec![]),
        ("bi.bin", vec!["--direction", "bi"]),
        ("hook.bin", vec!["--direction", "bi", "--layers", p(&layers)]),
    ] {
        let out_path = d.join(name);
        let mut args = vec!["train", "--corpus", p(&corpus), "--out", p(&out_path)];
        args.extend(extra);
        args.extend(SMALL_TRAIN);
        let out = String::from_utf8(spellcorr(&args)?).unwrap();
        if let Some(line) = out.lines().find(|l| l.starts_with("layer_weights")) {
            weights = line.split('\t').skip(1).map(|v| v.parse::<f64>().unwrap()).collect();
        }
    }
    ensure!(weights.len() == 3, "hook training echoed {} layer weights", weights.len());

    let report = String::from_utf8(spellcorr(&[
        "evaluate",
        "--corpus",
        p(&corpus),
        "--lexicon",
        p(&d.join("lexicon.txt")),
        "--embeddings",
        p(&d.join("vectors.txt")),
        "--layers",
        p(&layers),
        "--model",
        p(&d.join("uni.bin")),
        "--model",
        p(&d.join("bi.bin")),
        "--model",
        p(&d.join("hook.bin")),
        "--format",
        "tsv",
    ])?)
    .unwrap();
    let mut lines = report.lines();
    ensure!(
        lines.next() == Some("method\taccuracy\tperplexity\tloss_train\tloss_test\tcases"),
        "unexpected header"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split('\t').collect()).collect();
    let methods: Vec<&str> = rows.iter().map(|r| r[0]).collect();
    ensure!(methods == ["edit", "diacritic", "vector", "lstm1", "lstm2", "lstm-hook"], "rows {methods:?}");
    for r in &rows {
        let acc: f64 = r[1].parse().map_err(|_| format!("bad accuracy {:?}", r[1]))?;
        ensure!((0.0..=1.0).contains(&acc), "{}: accuracy {acc}", r[0]);
        let neural = r[0].starts_with("lstm");
        for (col, v) in [("perplexity", r[2]), ("loss_train", r[3]), ("loss_test", r[4])] {
            ensure!((v != "-") == neural, "{}: {col} = {v}", r[0]);
        }
        if neural {
            ensure!(r[2].parse::<f64>().unwrap() >= 1.0, "{}: perplexity below 1", r[0]);
        }
    }
    let w: Vec<String> = weights.iter().map(|v| format!("{v:.4}")).collect();
    Ok(format!("6 rows; layer weights ({})", w.join(", ")))
}
