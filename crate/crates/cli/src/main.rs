//! `bgmorph` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or format error, 3 strict-mode
//! scan failure, 4 malformed tag or input line. Data goes to stdout,
//! diagnostics to stderr.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bgmorph::dictionary::Dictionary;
use bgmorph::eval::{evaluate_records, make_synthetic_corpus, read_gold, EvalError};
use bgmorph::ingest::{
    load_builtin, scan_bgoffice, IngestError, ScanPolicy, ScanReport, TemplateMatcher,
    WiktionaryScanner,
};
use bgmorph::lemmatizer::{annotate_tsv, Lemmatizer, LemmatizerConfig, StreamError};
use bgmorph::paradigms::{ParadigmError, ParadigmSet};
use bgmorph::tagset::{parse_tag_string, GramFeatures, PackedTag};
use bgmorph::Execution;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bgmorph", version, propagate_version = true)]
#[command(about = "Bulgarian word-form generation, dictionary building and lemmatization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a dictionary from BG Office directories and Wiktionary dumps.
    Build(BuildArgs),
    /// Print every form of a lemma: surface, positional tag, packed tag.
    Forms {
        lemma: String,
        #[arg(value_name = "TYPE")]
        type_id: String,
        /// Paradigm definition file (defaults to the bundled paradigms).
        #[arg(long, value_name = "FILE")]
        paradigms: Option<PathBuf>,
    },
    /// Lemmatize a `surface<TAB>tag` token stream.
    Lemmatize {
        #[command(flatten)]
        dict: DictArg,
        /// Input TSV (defaults to stdin).
        #[arg(long, value_name = "FILE")]
        input: Option<PathBuf>,
        /// Output TSV (defaults to stdout).
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
        /// Do not relax the query tag when no candidate matches it.
        #[arg(long)]
        no_fallback: bool,
    },
    /// Convert between positional tags and packed 32-bit tags.
    Tag {
        #[command(subcommand)]
        op: TagOp,
    },
    /// Measure lemmatization accuracy on a gold corpus.
    Eval {
        #[command(flatten)]
        dict: DictArg,
        #[arg(long, value_name = "FILE")]
        corpus: PathBuf,
        /// Also write the metrics as JSON.
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
        #[arg(long)]
        no_fallback: bool,
    },
    /// Print lemma, form and ambiguous-surface counts.
    Stats {
        #[command(flatten)]
        dict: DictArg,
    },
    /// Write a seeded synthetic gold corpus sampled from a dictionary.
    Corpus {
        #[command(flatten)]
        dict: DictArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, short = 'n', default_value_t = 1000)]
        count: usize,
        /// Output file (defaults to stdout).
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DictArg {
    /// Dictionary file (defaults to the bundled sample dictionary).
    #[arg(long = "dict", value_name = "DICT")]
    path: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    /// BG Office data directory; may be repeated.
    #[arg(long, value_name = "DIR")]
    bgoffice: Vec<PathBuf>,
    /// Wiktionary XML dump, bzip2-compressed or plain; may be repeated.
    #[arg(long, value_name = "FILE")]
    wiktionary: Vec<PathBuf>,
    /// Paradigm definition file (defaults to the bundled paradigms).
    #[arg(long, value_name = "FILE")]
    paradigms: Option<PathBuf>,
    #[arg(long, value_name = "DICT")]
    out: PathBuf,
    /// Fail on unknown paradigm types and malformed entries.
    #[arg(long)]
    strict: bool,
    /// Encoding of BG Office .dat files, e.g. windows-1251.
    #[arg(long, default_value = "utf-8")]
    encoding: String,
    /// Wiktionary template carrying the paradigm type; may be repeated.
    #[arg(long = "template", value_name = "NAME")]
    templates: Vec<String>,
}

#[derive(Subcommand)]
enum TagOp {
    /// Positional tag to packed hex.
    Encode { tag: String },
    /// Packed hex to positional tag and feature listing.
    Decode { hex: String },
}

enum Failure {
    Usage(String),
    Io(String),
    Strict(String),
    Malformed(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::Strict(_) => 3,
            Failure::Malformed(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Strict(m) | Failure::Malformed(m) => m,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("bgmorph: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Build(args) => cmd_build(args),
        Command::Forms {
            lemma,
            type_id,
            paradigms,
        } => cmd_forms(&lemma, &type_id, paradigms.as_deref()),
        Command::Lemmatize {
            dict,
            input,
            output,
            no_fallback,
        } => cmd_lemmatize(&dict, input.as_deref(), output.as_deref(), no_fallback),
        Command::Tag { op } => cmd_tag(op),
        Command::Eval {
            dict,
            corpus,
            json,
            no_fallback,
        } => cmd_eval(&dict, &corpus, json.as_deref(), no_fallback),
        Command::Stats { dict } => cmd_stats(&dict),
        Command::Corpus {
            dict,
            seed,
            count,
            out,
        } => cmd_corpus(&dict, seed, count, out.as_deref()),
    }
}

fn load_paradigms(path: Option<&Path>) -> Result<ParadigmSet, Failure> {
    match path {
        None => Ok(ParadigmSet::builtin()),
        Some(p) => ParadigmSet::load(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
    }
}

fn load_dict(arg: &DictArg) -> Result<Dictionary, Failure> {
    match &arg.path {
        None => load_builtin().map_err(|e| Failure::Io(format!("bundled dictionary: {e}"))),
        Some(p) => Dictionary::load(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn ingest_failure(e: IngestError) -> Failure {
    if e.is_policy_failure() {
        Failure::Strict(e.to_string())
    } else {
        Failure::Io(e.to_string())
    }
}

fn print_report(out: &mut impl Write, source: &str, r: &ScanReport) -> io::Result<()> {
    write!(
        out,
        "{source}: files={} scanned={} added={} skipped={}",
        r.files_processed, r.entries_scanned, r.lexemes_added, r.lines_skipped
    )?;
    if !r.unknown_types.is_empty() {
        let unknown: Vec<String> = r
            .unknown_types
            .iter()
            .map(|(t, n)| format!("{t}:{n}"))
            .collect();
        write!(out, " unknown_types={}", unknown.join(","))?;
    }
    writeln!(out)
}

fn cmd_build(args: BuildArgs) -> CliResult {
    if args.bgoffice.is_empty() && args.wiktionary.is_empty() {
        return Err(Failure::Usage(
            "build needs at least one --bgoffice DIR or --wiktionary FILE\n\n\
             Usage: bgmorph build [--bgoffice DIR]... [--wiktionary FILE]... --out DICT"
                .into(),
        ));
    }
    let encoding = encoding_rs::Encoding::for_label(args.encoding.as_bytes())
        .ok_or_else(|| Failure::Usage(format!("unknown encoding {:?}", args.encoding)))?;
    let paradigms = load_paradigms(args.paradigms.as_deref())?;
    let policy = ScanPolicy {
        strict: args.strict,
        encoding,
        execution: Execution::default(),
    };
    let scanner = if args.templates.is_empty() {
        WiktionaryScanner::default()
    } else {
        WiktionaryScanner::new(TemplateMatcher::new(&args.templates))
    };

    let mut out = io::stdout().lock();
    let mut dict = Dictionary::default();
    let mut total = ScanReport::default();
    for dir in &args.bgoffice {
        let mut b = Dictionary::builder();
        let r = scan_bgoffice(dir, &mut b, &paradigms, &policy).map_err(ingest_failure)?;
        print_report(&mut out, &dir.display().to_string(), &r)?;
        total.absorb(&r);
        dict = dict.merge(&b.freeze());
    }
    for dump in &args.wiktionary {
        let mut b = Dictionary::builder();
        let r = scanner
            .scan(dump, &mut b, &paradigms, &policy)
            .map_err(ingest_failure)?;
        print_report(&mut out, &dump.display().to_string(), &r)?;
        total.absorb(&r);
        dict = dict.merge(&b.freeze());
    }
    print_report(&mut out, "total", &total)?;
    dict.save(&args.out)
        .map_err(|e| Failure::Io(format!("{}: {e}", args.out.display())))?;
    print_stats(&mut out, &dict)?;
    Ok(())
}

fn cmd_forms(lemma: &str, type_id: &str, paradigms: Option<&Path>) -> CliResult {
    let set = load_paradigms(paradigms)?;
    let forms = set
        .generate(lemma, type_id)
        .map_err(|e: ParadigmError| Failure::Io(e.to_string()))?;
    let mut out = BufWriter::new(io::stdout().lock());
    for f in forms {
        let features = f.tag.decode().unwrap_or_default();
        writeln!(out, "{}\t{}\t{}", f.surface, features, f.tag)?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_lemmatize(
    dict: &DictArg,
    input: Option<&Path>,
    output: Option<&Path>,
    no_fallback: bool,
) -> CliResult {
    let dict = load_dict(dict)?;
    let lemmatizer = Lemmatizer::with_config(
        &dict,
        LemmatizerConfig {
            fallback: !no_fallback,
        },
    );
    let out = open_output(output)?;
    let result = match input {
        Some(p) => {
            let f = File::open(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            annotate_tsv(&lemmatizer, BufReader::new(f), out, Execution::default())
        }
        None => annotate_tsv(&lemmatizer, io::stdin().lock(), out, Execution::default()),
    };
    match result {
        Ok(summary) => {
            eprintln!("tokens={} oov={}", summary.tokens, summary.oov);
            Ok(())
        }
        Err(StreamError::Io(e)) => Err(Failure::Io(e.to_string())),
        Err(e @ StreamError::Malformed { .. }) => Err(Failure::Malformed(e.to_string())),
    }
}

fn feature_listing(f: &GramFeatures) -> String {
    format!(
        "pos={:?}\ngender={:?}\nnumber={:?}\narticle={:?}\nextended={}\nperson={:?}\ntense={:?}",
        f.pos, f.gender, f.number, f.article, f.extended, f.person, f.tense
    )
}

fn cmd_tag(op: TagOp) -> CliResult {
    match op {
        TagOp::Encode { tag } => {
            let f = parse_tag_string(&tag).map_err(|e| Failure::Malformed(e.to_string()))?;
            println!("{}", f.encode());
        }
        TagOp::Decode { hex } => {
            let packed: PackedTag = hex
                .parse()
                .map_err(|e: bgmorph::tagset::TagError| Failure::Malformed(e.to_string()))?;
            let f = packed
                .decode()
                .map_err(|e| Failure::Malformed(e.to_string()))?;
            println!("{f}");
            println!("{}", feature_listing(&f));
        }
    }
    Ok(())
}

fn cmd_eval(dict: &DictArg, corpus: &Path, json: Option<&Path>, no_fallback: bool) -> CliResult {
    let dict = load_dict(dict)?;
    let file = File::open(corpus).map_err(|e| Failure::Io(format!("{}: {e}", corpus.display())))?;
    let eval_failure = |e: EvalError| match e {
        EvalError::Parse { .. } => Failure::Malformed(format!("{}: {e}", corpus.display())),
        other => Failure::Io(format!("{}: {other}", corpus.display())),
    };
    let records = read_gold(BufReader::new(file)).map_err(eval_failure)?;
    let lemmatizer = Lemmatizer::with_config(
        &dict,
        LemmatizerConfig {
            fallback: !no_fallback,
        },
    );
    let metrics =
        evaluate_records(&lemmatizer, &records, Execution::default()).map_err(eval_failure)?;
    println!("{metrics}");
    if let Some(p) = json {
        let text = serde_json::to_string_pretty(&metrics).expect("metrics serialize");
        std::fs::write(p, text + "\n").map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn print_stats(out: &mut impl Write, dict: &Dictionary) -> io::Result<()> {
    let s = dict.stats();
    writeln!(out, "lemma_count={}", s.lemma_count)?;
    writeln!(out, "form_count={}", s.form_count)?;
    writeln!(out, "ambiguous_surface_count={}", s.ambiguous_surface_count)
}

fn cmd_stats(dict: &DictArg) -> CliResult {
    let dict = load_dict(dict)?;
    print_stats(&mut io::stdout().lock(), &dict)?;
    Ok(())
}

fn cmd_corpus(dict: &DictArg, seed: u64, count: usize, out: Option<&Path>) -> CliResult {
    let dict = load_dict(dict)?;
    if count == 0 {
        return Err(Failure::Usage("--count must be at least 1".into()));
    }
    let w = open_output(out)?;
    make_synthetic_corpus(&dict, seed, count, w).map_err(|e| match e {
        EvalError::EmptyDictionary => Failure::Usage(e.to_string()),
        other => Failure::Io(other.to_string()),
    })
}
