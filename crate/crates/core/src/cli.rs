//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data or
//! resource error. Standard output carries only results; diagnostics and
//! logs go to standard error.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corpus::{ErrorCorpus, Fractions, Split};
use crate::diacritics::DiacriticTable;
use crate::error::{read_lines, Error, Result};
use crate::fixtures::{toy_corpus, FixtureConfig, FixturePaths, Fixtures};
use crate::metrics::{format_table, format_tsv};
use crate::neural::train::resolve_stacks;
use crate::neural::{build_model, io as model_io, train, Direction, ExternalLayers, TrainConfig, TrainPair};
use crate::pipeline::{evaluate, CorrectorSpec, Method};

#[derive(Debug, Parser)]
#[command(name = "spellcorr", version, about = "Isolated non-word spelling correction")]
struct Cli {
    /// More log output on standard error (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Only log errors.
    #[arg(short, long, global = true)]
    quiet: bool,
    /// `key = value` file of defaults for the subcommand's long flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the best corrections of tokens given as arguments or on stdin.
    Correct(CorrectArgs),
    /// Score one or more methods on a corpus split.
    Evaluate(EvaluateArgs),
    /// Train a character LSTM corrector.
    Train(TrainArgs),
    /// Count and list the diacritic variants of a token.
    SwapVariants(SwapArgs),
    /// Write synthetic lexicon, corpus, vectors and layer files.
    GenFixtures(FixtureArgs),
}

#[derive(Debug, Args)]
struct Resources {
    #[arg(long, value_name = "FILE")]
    lexicon: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    embeddings: Option<PathBuf>,
    /// External per-token layer vectors for hook-initialized models.
    #[arg(long, value_name = "FILE")]
    layers: Option<PathBuf>,
    #[arg(long, default_value_t = crate::embeddings::DEFAULT_MAX_EDIT)]
    max_edit: usize,
    /// Weight of scaled edit distance in the vector method's score.
    #[arg(long, default_value_t = crate::embeddings::DEFAULT_EDIT_WEIGHT)]
    edit_weight: f64,
}

#[derive(Debug, Args)]
struct CorrectArgs {
    #[arg(long, value_parser = parse_method)]
    method: Method,
    #[command(flatten)]
    resources: Resources,
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Candidates printed per token.
    #[arg(long, short = 'k', default_value_t = 5)]
    top_k: usize,
    /// Echo lexicon members unchanged.
    #[arg(long)]
    skip_known: bool,
    /// Tokens to correct; read one per line from stdin when absent.
    tokens: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Tsv,
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,
    /// Drop repeated (error, correction) pairs.
    #[arg(long)]
    dedup: bool,
    /// Train, dev and test shares, comma separated.
    #[arg(long, default_value = "0.70,0.05,0.25", value_parser = parse_fractions)]
    fractions: Fractions,
    #[arg(long, default_value_t = 0)]
    split_seed: u64,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    split: SplitArgs,
    /// Methods to run (repeatable or comma separated), or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    method: Vec<String>,
    /// Model files; each is used by the method matching its shape.
    #[arg(long, value_name = "FILE")]
    model: Vec<PathBuf>,
    #[command(flatten)]
    resources: Resources,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long = "eval-split", default_value = "test", value_parser = parse_split)]
    eval_split: Split,
    /// Write per-case prediction logs as `<dir>/<method>.tsv`.
    #[arg(long, value_name = "DIR")]
    log_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    Uni,
    Bi,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    split: SplitArgs,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Per-epoch loss TSV; defaults to the model path with `.loss.tsv`.
    #[arg(long, value_name = "FILE")]
    loss_history: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DirectionArg::Uni)]
    direction: DirectionArg,
    /// External layer vectors; enables the initialization hook.
    #[arg(long, value_name = "FILE")]
    layers: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    layer_count: usize,
    #[arg(long = "train-split", default_value = "train", value_parser = parse_split)]
    train_split: Split,
    #[arg(long, default_value_t = 35)]
    epochs: usize,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    #[arg(long, default_value_t = 128)]
    hidden: usize,
    #[arg(long, default_value_t = 64)]
    embed: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Global gradient-norm clip; 0 disables.
    #[arg(long, default_value_t = 5.0)]
    clip: f64,
}

#[derive(Debug, Args)]
struct SwapArgs {
    token: String,
    /// List variants only when there are at most this many.
    #[arg(long, default_value_t = 1000)]
    limit: u128,
}

#[derive(Debug, Args)]
struct FixtureArgs {
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Write the fixed 50-pair toy corpus and its lexicon instead.
    #[arg(long)]
    toy: bool,
    #[arg(long, default_value_t = 400)]
    words: usize,
    #[arg(long, default_value_t = 200)]
    cases: usize,
    #[arg(long, default_value_t = 16)]
    dim: usize,
    #[arg(long, default_value_t = 8)]
    layer_dim: usize,
    #[arg(long, default_value_t = 3)]
    layer_count: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_split(s: &str) -> std::result::Result<Split, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_fractions(s: &str) -> std::result::Result<Fractions, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [train, dev, test] => Fractions::new(train, dev, test).map_err(|e| e.to_string()),
        _ => Err("expected three comma-separated fractions".into()),
    }
}

/// Entry point for the binary.
pub fn run() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs one command line against the given output streams and returns the
/// process exit code.
pub fn run_with(argv: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "spellcorr: {e}");
            return exit_code(&e);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    init_logging(cli.verbose, cli.quiet);
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "spellcorr: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 1,
        _ => 2,
    }
}

fn init_logging(verbose: u8, quiet: bool) {
    let level = match (quiet, verbose) {
        (true, _) => log::LevelFilter::Error,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
}

/// Splices `--config` defaults into `argv` right after the subcommand
/// name. Keys given explicitly on the command line are skipped, so flags
/// always win.
fn merge_config(argv: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            path = argv.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let path = PathBuf::from(path);
    let mut extra = Vec::new();
    for (no, line) in read_lines(&path)? {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| Error::Config(format!("{}:{no}: expected `key = value`", path.display())))?;
        if key.is_empty() || key == "config" {
            return Err(Error::Config(format!("{}:{no}: bad key {key:?}", path.display())));
        }
        let flag = format!("--{key}");
        let given = argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        match value {
            "true" => extra.push(flag),
            "false" => {}
            v => {
                extra.push(flag);
                extra.push(v.to_string());
            }
        }
    }
    const COMMANDS: [&str; 5] = ["correct", "evaluate", "train", "swap-variants", "gen-fixtures"];
    let Some(at) = argv.iter().position(|a| COMMANDS.contains(&a.as_str())) else {
        return Ok(argv);
    };
    let mut merged = argv[..=at].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&argv[at + 1..]);
    Ok(merged)
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Correct(a) => cmd_correct(a, out),
        Command::Evaluate(a) => cmd_evaluate(a, out),
        Command::Train(a) => cmd_train(a, out),
        Command::SwapVariants(a) => cmd_swap(a, out),
        Command::GenFixtures(a) => cmd_fixtures(a, out),
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io(Path::new("<stdout>"), e))
}

fn spec_for(method: Method, r: &Resources, model: Option<PathBuf>) -> CorrectorSpec {
    CorrectorSpec {
        method,
        lexicon: r.lexicon.clone(),
        embeddings: r.embeddings.clone(),
        model,
        layers: r.layers.clone(),
        max_edit: r.max_edit,
        edit_weight: r.edit_weight,
        skip_known: false,
    }
}

fn cmd_correct(a: CorrectArgs, out: &mut dyn Write) -> Result<()> {
    let mut spec = spec_for(a.method, &a.resources, a.model);
    spec.skip_known = a.skip_known;
    spec.validate()?;
    let corrector = spec.load()?;
    let tokens = if a.tokens.is_empty() {
        let stdin = io::stdin();
        let mut tokens = Vec::new();
        for line in stdin.lock().lines() {
            let line = line.map_err(|e| Error::io(Path::new("<stdin>"), e))?;
            let t = line.trim();
            if !t.is_empty() {
                tokens.push(t.to_string());
            }
        }
        tokens
    } else {
        a.tokens
    };
    let prefix = tokens.len() > 1;
    let mut text = String::new();
    for token in &tokens {
        let candidates = corrector.correct(token);
        if prefix && candidates.is_empty() {
            text.push_str(&format!("{token}\t-\n"));
        }
        for c in candidates.iter().take(a.top_k) {
            if prefix {
                text.push_str(token);
                text.push('\t');
            }
            text.push_str(&format!("{} {:?}\n", c.form, c.combined));
        }
    }
    write_out(out, &text)
}

fn load_split(a: &SplitArgs) -> Result<ErrorCorpus> {
    ErrorCorpus::load(&a.corpus, a.dedup)?.split(a.fractions, a.split_seed)
}

fn cmd_evaluate(a: EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let mut methods = Vec::new();
    for m in &a.method {
        if m == "all" {
            methods.extend(Method::ALL);
        } else {
            methods.push(m.parse::<Method>()?);
        }
    }
    methods.sort();
    methods.dedup();

    // Match model files to methods by their shape.
    let mut models: BTreeMap<Method, PathBuf> = BTreeMap::new();
    for path in &a.model {
        let model = model_io::load(path)?;
        let kind = Method::for_model(model.config.direction, model.config.hook.is_some());
        if let Some(prev) = models.insert(kind, path.clone()) {
            return Err(Error::Config(format!(
                "two {kind} models given: {} and {}",
                prev.display(),
                path.display()
            )));
        }
    }
    let specs: Vec<CorrectorSpec> = methods
        .iter()
        .map(|&m| spec_for(m, &a.resources, models.get(&m).cloned()))
        .collect();
    for s in &specs {
        s.validate()?;
    }

    let corpus = load_split(&a.split)?;
    let mut rows = Vec::new();
    for spec in &specs {
        let corrector = spec.load()?;
        let ev = evaluate(&corrector, &corpus, a.eval_split, a.jobs)?;
        log::info!("{}: accuracy {:.4} over {} cases", spec.method, ev.report.accuracy, ev.report.cases);
        if let Some(dir) = &a.log_dir {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            let path = dir.join(format!("{}.tsv", spec.method));
            fs::write(&path, ev.log_tsv()).map_err(|e| Error::io(&path, e))?;
        }
        rows.push(ev.report);
    }
    let text = match a.format {
        Format::Table => format_table(&rows),
        Format::Tsv => format_tsv(&rows),
    };
    write_out(out, &text)
}

/// Layer dimension taken from the first data line of a layers file.
fn sniff_layer_dim(path: &Path) -> Result<usize> {
    for (no, line) in read_lines(path)? {
        let fields = line.split_whitespace().count();
        if fields == 0 || line.trim_start().starts_with('#') {
            continue;
        }
        if fields < 3 {
            return Err(Error::parse(path, no, "expected token, layer index and values"));
        }
        return Ok(fields - 2);
    }
    Err(Error::Domain(format!("{} has no layer vectors", path.display())))
}

fn cmd_train(a: TrainArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = TrainConfig {
        epochs: a.epochs,
        learning_rate: a.lr,
        batch_size: a.batch_size,
        seed: a.seed,
        hidden: a.hidden,
        embed: a.embed,
        clip_norm: (a.clip > 0.0).then_some(a.clip),
        ..TrainConfig::default()
    };
    cfg.validate()?;
    if a.layer_count == 0 {
        return Err(Error::Config("--layer-count must be at least 1".into()));
    }
    let corpus = load_split(&a.split)?;
    let pairs: Vec<(String, String)> = corpus
        .subset(a.train_split)
        .into_iter()
        .map(|(_, c)| (c.error.clone(), c.correction.clone()))
        .collect();
    if pairs.is_empty() {
        return Err(Error::Domain("the training split is empty".into()));
    }
    let layers = match &a.layers {
        Some(p) => Some(ExternalLayers::load(p, sniff_layer_dim(p)?, a.layer_count)?),
        None => None,
    };
    let (stacks, missing) = resolve_stacks(&pairs, layers.as_ref());
    if missing > 0 {
        log::warn!("{missing} training tokens have no external layers; using zero stacks");
    }
    let direction = match a.direction {
        DirectionArg::Uni => Direction::Uni,
        DirectionArg::Bi => Direction::Bi,
    };
    let hook = layers.as_ref().map(|l| (l.layers, l.dim));
    let mut model = build_model(&pairs, &cfg, direction, hook);
    let train_pairs: Vec<TrainPair<'_>> = pairs
        .iter()
        .zip(&stacks)
        .map(|((e, c), s)| TrainPair {
            error: e,
            correction: c,
            stack: s.as_deref(),
        })
        .collect();
    let report = train(&mut model, &train_pairs, &cfg)?;
    model_io::save(&model, &a.out)?;

    let history_path = a.loss_history.unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".loss.tsv");
        PathBuf::from(p)
    });
    let mut history = String::from("epoch\tloss\n");
    for (i, l) in report.loss_history.iter().enumerate() {
        history.push_str(&format!("{}\t{l}\n", i + 1));
    }
    fs::write(&history_path, history).map_err(|e| Error::io(&history_path, e))?;

    let mut text = format!(
        "method\t{}\npairs\t{}\nepochs\t{}\nfinal_loss\t{:.6}\n",
        Method::for_model(direction, hook.is_some()),
        pairs.len(),
        cfg.epochs,
        report.loss_history.last().copied().unwrap_or(f64::NAN)
    );
    if let Some(w) = model.layer_weights() {
        text.push_str("layer_weights");
        for v in w {
            text.push_str(&format!("\t{v:.6}"));
        }
        text.push('\n');
    }
    write_out(out, &text)
}

fn cmd_swap(a: SwapArgs, out: &mut dyn Write) -> Result<()> {
    let table = DiacriticTable;
    let count = table.variant_count(&a.token);
    let mut text = format!("{count}\n");
    if count <= a.limit {
        for v in table.variants(&a.token) {
            text.push_str(&v);
            text.push('\n');
        }
    }
    write_out(out, &text)
}

fn cmd_fixtures(a: FixtureArgs, out: &mut dyn Write) -> Result<()> {
    let mut text = String::new();
    if a.toy {
        fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
        let paths = FixturePaths::in_dir(&a.out);
        let corpus = toy_corpus();
        let mut lex: Vec<&str> = corpus.cases.iter().map(|c| c.correction.as_str()).collect();
        lex.sort_unstable();
        lex.dedup();
        let lex = lex.join("\n") + "\n";
        fs::write(&paths.corpus, corpus.to_tsv()).map_err(|e| Error::io(&paths.corpus, e))?;
        fs::write(&paths.lexicon, lex).map_err(|e| Error::io(&paths.lexicon, e))?;
        text.push_str(&format!("lexicon\t{}\ncorpus\t{}\n", paths.lexicon.display(), paths.corpus.display()));
    } else {
        let cfg = FixtureConfig {
            words: a.words,
            cases: a.cases,
            dim: a.dim,
            layers: a.layer_count,
            layer_dim: a.layer_dim,
            seed: a.seed,
        };
        let paths = Fixtures::generate(&cfg)?.write(&a.out)?;
        for (name, p) in [
            ("lexicon", &paths.lexicon),
            ("corpus", &paths.corpus),
            ("embeddings", &paths.embeddings),
            ("layers", &paths.layers),
        ] {
            text.push_str(&format!("{name}\t{}\n", p.display()));
        }
    }
    write_out(out, &text)
}
