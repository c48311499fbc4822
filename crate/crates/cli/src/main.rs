use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use perdt_ud::conll::{read_conllu, read_perdt};
use perdt_ud::diff::diff_treebanks;
use perdt_ud::pos::{parse_ner_sidecar, NerAnnotation};
use perdt_ud::stats::CorpusStats;
use perdt_ud::validate::Validator;
use perdt_ud::{
    write_conllu, Execution, LexiconConfig, ParseDiagnostic, Pipeline, PipelineOptions, RuleTable,
    Treebank,
};

/// Convert PerDT dependency treebanks to Universal Dependencies.
#[derive(Parser, Debug)]
#[command(name = "perdt-ud", version)]
struct Cli {
    /// key: value file with defaults for the long options
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convert PerDT input to CoNLL-U.
    Convert(ConvertArgs),
    /// Check CoNLL-U files against the UD validation rules.
    Validate(ValidateArgs),
    /// Corpus size, vocabulary and label frequencies.
    Stats(StatsArgs),
    /// Compare two CoNLL-U files token by token.
    Diff(DiffArgs),
}

#[derive(Args, Debug)]
struct ConvertArgs {
    /// PerDT files, converted in order as one treebank
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// output CoNLL-U file (stdout if absent)
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// entity tags, one per token, blank line between sentences
    #[arg(long)]
    ner: Option<PathBuf>,
    /// directory holding the four lexicon files
    #[arg(long)]
    lexicon_dir: Option<PathBuf>,
    /// relation mapping table replacing the built-in one
    #[arg(long)]
    rules: Option<PathBuf>,
    #[arg(long)]
    skip_tokenization: bool,
    #[arg(long)]
    skip_systematic_fixes: bool,
    /// write validation issues here (TSV)
    #[arg(long)]
    validation_report: Option<PathBuf>,
    /// write correction counts here (TSV)
    #[arg(long)]
    corrections_report: Option<PathBuf>,
    /// write label and vocabulary statistics of the output here (TSV)
    #[arg(long)]
    stats_report: Option<PathBuf>,
    /// treat warnings and skipped sentences as failures
    #[arg(long)]
    strict: bool,
    /// write the output even if validation finds errors
    #[arg(long)]
    allow_errors: bool,
    /// process sentences on one thread
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    lexicon_dir: Option<PathBuf>,
    /// write the issue list here instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Tsv,
    Text,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// read PerDT instead of CoNLL-U
    #[arg(long)]
    perdt: bool,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct DiffArgs {
    left: PathBuf,
    right: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// A problem with the invocation rather than the data.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

type Config = BTreeMap<String, String>;

const CONFIG_KEYS: [&str; 12] = [
    "ner",
    "lexicon-dir",
    "rules",
    "skip-tokenization",
    "skip-systematic-fixes",
    "validation-report",
    "corrections-report",
    "stats-report",
    "strict",
    "allow-errors",
    "sequential",
    "output",
];

fn read_config(path: &Path) -> Result<Config> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = Config::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once(':') else {
            bail!(UsageError(format!("{}:{}: expected key: value", path.display(), i + 1)));
        };
        let k = k.trim().replace('_', "-");
        if !CONFIG_KEYS.contains(&k.as_str()) {
            bail!(UsageError(format!("{}:{}: unknown key {}", path.display(), i + 1, k)));
        }
        out.insert(k, v.trim().to_owned());
    }
    Ok(out)
}

fn flag(cfg: &Config, key: &str, cli: bool) -> Result<bool> {
    if cli {
        return Ok(true);
    }
    match cfg.get(key).map(String::as_str) {
        None | Some("false") | Some("no") => Ok(false),
        Some("true") | Some("yes") => Ok(true),
        Some(v) => bail!(UsageError(format!("config {}: expected true or false, got {}", key, v))),
    }
}

fn path(cfg: &Config, key: &str, cli: Option<PathBuf>) -> Option<PathBuf> {
    cli.or_else(|| cfg.get(key).map(PathBuf::from))
}

fn print_diagnostic(d: &ParseDiagnostic, file: Option<&Path>) {
    match (file, d.line_no) {
        (Some(f), n) if n > 0 => eprintln!("{}:{}: {}: {}", f.display(), n, d.severity, d.message),
        _ => eprintln!("{}: {}", d.severity, d.message),
    }
}

fn read_text(p: &Path) -> Result<fs::File> {
    fs::File::open(p).with_context(|| format!("cannot read {}", p.display()))
}

fn file_stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Reads and concatenates inputs, printing parse diagnostics. Returns the
/// treebank and the number of diagnostics.
fn read_inputs(inputs: &[PathBuf], perdt: bool) -> Result<(Treebank, usize)> {
    let mut tb: Option<Treebank> = None;
    let mut diagnostics = 0;
    for p in inputs {
        let f = read_text(p)?;
        let (t, diags) = if perdt {
            read_perdt(f, &file_stem(p))
        } else {
            read_conllu(f)
        }
        .with_context(|| format!("cannot read {}", p.display()))?;
        for d in &diags {
            print_diagnostic(d, Some(p));
        }
        diagnostics += diags.len();
        match &mut tb {
            None => tb = Some(t),
            Some(all) => all.sentences.extend(t.sentences),
        }
    }
    Ok((tb.expect("at least one input"), diagnostics))
}

fn writer(output: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match output {
        Some(p) if p != Path::new("-") => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        _ => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn write_report(p: &Path, text: &str) -> Result<()> {
    fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))
}

fn lexicon(dir: Option<&Path>) -> Result<LexiconConfig> {
    match dir {
        Some(d) => LexiconConfig::from_dir(d).with_context(|| format!("lexicon {}", d.display())),
        None => Ok(LexiconConfig::builtin()),
    }
}

fn convert(a: ConvertArgs, cfg: &Config) -> Result<i32> {
    let strict = flag(cfg, "strict", a.strict)?;
    let options = PipelineOptions {
        skip_tokenization: flag(cfg, "skip-tokenization", a.skip_tokenization)?,
        skip_systematic_fixes: flag(cfg, "skip-systematic-fixes", a.skip_systematic_fixes)?,
        execution: if flag(cfg, "sequential", a.sequential)? {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    let lex = lexicon(path(cfg, "lexicon-dir", a.lexicon_dir).as_deref())?;
    let rules = match path(cfg, "rules", a.rules) {
        Some(p) => {
            let text = fs::read_to_string(&p).with_context(|| format!("cannot read {}", p.display()))?;
            RuleTable::parse(&text).with_context(|| format!("rule table {}", p.display()))?
        }
        None => RuleTable::builtin(),
    };
    let ner: Vec<NerAnnotation> = match path(cfg, "ner", a.ner) {
        Some(p) => parse_ner_sidecar(
            &fs::read_to_string(&p).with_context(|| format!("cannot read {}", p.display()))?,
        ),
        None => Vec::new(),
    };

    let (tb, parse_diags) = read_inputs(&a.inputs, true)?;
    if !ner.is_empty() && ner.len() != tb.sentences.len() {
        eprintln!(
            "WARN: NER sidecar has {} sentences, input has {}",
            ner.len(),
            tb.sentences.len()
        );
    }
    let pipeline = Pipeline::new(lex, rules, options);
    let out = pipeline.convert_treebank(&tb, &ner);
    for d in &out.diagnostics {
        print_diagnostic(d, None);
    }
    eprint!("{}", out.counters.report());
    eprint!("{}", out.validation.summary_block());

    if let Some(p) = path(cfg, "validation-report", a.validation_report) {
        write_report(&p, &out.validation.report_tsv())?;
    }
    if let Some(p) = path(cfg, "corrections-report", a.corrections_report) {
        write_report(&p, &out.corrections.to_tsv())?;
    }
    if let Some(p) = path(cfg, "stats-report", a.stats_report) {
        write_report(&p, &CorpusStats::compute(&out.treebank, options.execution).to_tsv())?;
    }

    let gate_failed = out.validation.errors > 0;
    if gate_failed && !flag(cfg, "allow-errors", a.allow_errors)? {
        eprintln!("ERROR: validation failed, no output written");
        return Ok(1);
    }
    let mut w = writer(path(cfg, "output", a.output).as_deref())?;
    write_conllu(&out.treebank, &mut w)?;
    w.flush()?;

    let skipped = out.counters.sentences_skipped > 0 || parse_diags > 0;
    let warned = out.validation.warnings > 0 || !out.diagnostics.is_empty();
    Ok(if gate_failed || (strict && (skipped || warned)) { 1 } else { 0 })
}

fn validate(a: ValidateArgs, cfg: &Config) -> Result<i32> {
    let strict = flag(cfg, "strict", a.strict)?;
    let lex = lexicon(path(cfg, "lexicon-dir", a.lexicon_dir).as_deref())?;
    let (tb, diags) = read_inputs(&a.inputs, false)?;
    let summary = Validator::new(perdt_ud::validate::Registry::builtin(), lex).validate_treebank(&tb);
    match a.report {
        Some(p) => write_report(&p, &summary.report_tsv())?,
        None => print!("{}", summary.report_tsv()),
    }
    eprint!("{}", summary.summary_block());
    let code = summary.exit_code(strict);
    Ok(if strict && diags > 0 { 1 } else { code })
}

fn stats(a: StatsArgs) -> Result<i32> {
    let (tb, _) = read_inputs(&a.inputs, a.perdt)?;
    let exec = if a.sequential { Execution::Sequential } else { Execution::Parallel };
    let s = CorpusStats::compute(&tb, exec);
    let text = match a.format {
        Format::Tsv => s.to_tsv(),
        Format::Text => s.to_text(),
    };
    let mut w = writer(a.output.as_deref())?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(0)
}

fn diff(a: DiffArgs) -> Result<i32> {
    let (left, _) = read_inputs(std::slice::from_ref(&a.left), false)?;
    let (right, _) = read_inputs(std::slice::from_ref(&a.right), false)?;
    let report = diff_treebanks(&left, &right);
    let mut w = writer(a.output.as_deref())?;
    w.write_all(report.to_text().as_bytes())?;
    w.flush()?;
    Ok(0)
}

fn run(cli: Cli) -> Result<i32> {
    let cfg = match &cli.config {
        Some(p) => read_config(p)?,
        None => Config::new(),
    };
    match cli.command {
        Command::Convert(a) => convert(a, &cfg),
        Command::Validate(a) => validate(a, &cfg),
        Command::Stats(a) => stats(a),
        Command::Diff(a) => diff(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {:#}", e);
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
