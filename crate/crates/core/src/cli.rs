//! Command-line surface: `twodel <subcommand>`.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis;
use crate::bitseq::{delete2, BitString, DeletionPair};
use crate::construction::{
    enumerate_codebook, read_codebook, select_targets, verify_codewords, write_codebook, CodeSpace,
    CodebookHeader, Construction, ConstraintTargets, TwoDeletionCode, VerifyReport, MAX_ENUM_N,
};
use crate::error::Error;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONSTRAINT: i32 = 2;
pub const EXIT_DECODE: i32 = 3;
pub const EXIT_COUNTEREXAMPLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "twodel", version, about = "Two-deletion-correcting codes")]
pub struct Cli {
    /// Directory holding cached hash-family tables.
    #[arg(long, global = true, env = "TWODEL_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive and print the code parameters.
    Params {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Select targets (largest codebook unless given) and write the codebook.
    Codebook {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Delete two symbols from a word.
    Corrupt {
        #[arg(long)]
        word: BitString,
        /// 1-indexed positions `i1,i2`; drawn from the seed when absent.
        #[arg(long, value_parser = parse_pair)]
        pair: Option<DeletionPair>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Decode a received word against a codebook header.
    Decode {
        /// Codebook file; only its header line is read.
        #[arg(long)]
        codebook: PathBuf,
        #[arg(long)]
        word: BitString,
        /// Use the brute-force decoder instead.
        #[arg(long)]
        oracle: bool,
    },
    /// Check a word against a codebook header.
    Member {
        #[arg(long)]
        codebook: PathBuf,
        #[arg(long)]
        word: BitString,
    },
    /// Exhaustively check two-deletion correction.
    Verify {
        #[command(flatten)]
        code: CodeArgs,
        /// Verify this codebook file instead of deriving one.
        #[arg(long, conflicts_with_all = ["n", "s", "construction", "targets", "all_targets"])]
        codebook: Option<PathBuf>,
        /// Every constrained string, each under its own targets.
        #[arg(long, conflicts_with = "targets")]
        all_targets: bool,
        /// Also require the brute-force decoder to find exactly the codeword.
        #[arg(long)]
        oracle: bool,
    },
    /// Redundancy and rate curves over powers of two.
    Redundancy {
        #[arg(long, default_value_t = 1 << 10)]
        n_min: u64,
        #[arg(long, default_value_t = 1 << 30)]
        n_max: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Sampled constrained-set density against the analytic bound.
    ConstraintProb {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<usize>,
        #[arg(long, default_value = "2")]
        construction: Construction,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Add the enumerated density for n <= 22.
        #[arg(long)]
        exact: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CodeArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Segment length bound; defaults to n.
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long, default_value = "2")]
    pub construction: Construction,
    /// Target tuple as JSON, overriding selection.
    #[arg(long)]
    pub targets: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

fn parse_pair(s: &str) -> Result<DeletionPair, String> {
    let (a, b) = s.split_once(',').ok_or("expected i1,i2")?;
    let a = a.trim().parse().map_err(|_| format!("bad position {a:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad position {b:?}"))?;
    DeletionPair::new(a, b).map_err(|e| e.to_string())
}

/// Failure of a subcommand, carrying its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ConstraintViolation(_) | Error::SegmentTooLong { .. } => EXIT_CONSTRAINT,
            Error::DecodeFailure(_) | Error::Classification(_) | Error::InvariantViolation(_) => EXIT_DECODE,
            Error::NotCorrecting { .. } => EXIT_COUNTEREXAMPLE,
            Error::InvalidArgument(_) | Error::Io(_) => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::from(e).into()
    }
}

type CliResult = std::result::Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: msg.into() }
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json<T: Serialize>(v: &T) -> CliResult {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, v).map_err(|e| usage(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

impl CodeArgs {
    fn space(&self, cache_dir: Option<&Path>) -> std::result::Result<CodeSpace, Failure> {
        let n = self.n.ok_or_else(|| usage("--n is required"))?;
        Ok(CodeSpace::for_length(n, self.s.unwrap_or(n), self.construction, cache_dir)?)
    }

    fn explicit_targets(&self) -> std::result::Result<Option<ConstraintTargets>, Failure> {
        self.targets
            .as_deref()
            .map(|t| serde_json::from_str(t).map_err(|e| usage(format!("bad --targets: {e}"))))
            .transpose()
    }

    /// The code with explicit targets, or the largest codebook's.
    fn code(&self, cache_dir: Option<&Path>) -> std::result::Result<TwoDeletionCode, Failure> {
        let space = self.space(cache_dir)?;
        let targets = match self.explicit_targets()? {
            Some(t) => t,
            None => select_targets(&space)?.targets,
        };
        Ok(space.with_targets(targets)?)
    }
}

fn open_header(path: &Path, cache_dir: Option<&Path>) -> std::result::Result<TwoDeletionCode, Failure> {
    let (header, _) = read_codebook(BufReader::new(File::open(path)?))?;
    Ok(header.open(cache_dir)?)
}

fn report_verify(report: &VerifyReport) -> CliResult {
    print_json(report)?;
    match &report.counterexample {
        None => Ok(()),
        Some(c) => Err(Failure {
            code: EXIT_COUNTEREXAMPLE,
            message: format!("counterexample: x = {}, y = {}: {}", c.x, c.y, c.result),
        }),
    }
}

// every constrained string decoded under its own targets
fn verify_all_targets(space: &CodeSpace, oracle: bool) -> std::result::Result<VerifyReport, Failure> {
    let n = space.params().n;
    if n > MAX_ENUM_N {
        return Err(usage(format!("--all-targets needs n <= {MAX_ENUM_N}")));
    }
    let reports: Vec<VerifyReport> = (0..1u64 << n)
        .into_par_iter()
        .filter_map(|v| {
            let x = BitString::from_value(v, n);
            let t = space.profile(&x).ok()?;
            let code = space.with_targets(t).expect("profiled targets are valid");
            Some(verify_codewords(&code, &[x], oracle).expect("verification runs"))
        })
        .collect();
    let mut total = VerifyReport { codewords: 0, received: 0, counterexample: None };
    for r in reports {
        total.codewords += r.codewords;
        total.received += r.received;
        if total.counterexample.is_none() {
            total.counterexample = r.counterexample;
        }
    }
    Ok(total)
}

pub fn run(cli: Cli) -> CliResult {
    let cache = cli.cache_dir.as_deref();
    match cli.command {
        Command::Params { code, format } => {
            let space = code.space(cache)?;
            match format {
                Format::Json => print_json(space.params())?,
                Format::Text | Format::Csv => {
                    let v = serde_json::to_value(space.params()).map_err(|e| usage(e.to_string()))?;
                    let mut out = io::stdout().lock();
                    for (k, v) in v.as_object().expect("params serialize to an object") {
                        writeln!(out, "{k}\t{v}")?;
                    }
                }
            }
        }
        Command::Codebook { code, output } => {
            let code = code.code(cache)?;
            let words = enumerate_codebook(&code)?;
            let mut out = sink(output.as_deref())?;
            write_codebook(&mut out, &CodebookHeader::new(&code), &words)?;
            out.flush()?;
        }
        Command::Corrupt { word, pair, seed, format } => {
            let n = word.len();
            if n < 2 {
                return Err(usage("word needs at least two symbols"));
            }
            let pair = match pair {
                Some(p) => p,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let i1 = rng.gen_range(1..n);
                    DeletionPair::new(i1, rng.gen_range(i1 + 1..=n)).expect("ordered pair")
                }
            };
            let y = delete2(&word, pair)?;
            match format {
                Format::Json => print_json(&serde_json::json!({ "x": word, "pair": pair, "y": y }))?,
                _ => println!("{y}"),
            }
        }
        Command::Decode { codebook, word, oracle } => {
            let code = open_header(&codebook, cache)?;
            if oracle {
                let x = code.oracle_decode(&word)?;
                print_json(&serde_json::json!({ "recovered": x, "branch": "oracle" }))?;
            } else {
                print_json(&code.decode(&word)?)?;
            }
        }
        Command::Member { codebook, word } => {
            let code = open_header(&codebook, cache)?;
            if let Err(v) = code.check_member(&word) {
                return Err(Error::from(v).into());
            }
            println!("member");
        }
        Command::Verify { code, codebook, all_targets, oracle } => {
            let report = if let Some(path) = codebook {
                let (header, words) = read_codebook(BufReader::new(File::open(path)?))?;
                let code = header.open(cache)?;
                if let Some(x) = words.iter().find(|x| !code.is_member(x)) {
                    return Err(Failure {
                        code: EXIT_CONSTRAINT,
                        message: format!("{x} is listed but is not a codeword"),
                    });
                }
                verify_codewords(&code, &words, oracle)?
            } else if all_targets {
                verify_all_targets(&code.space(cache)?, oracle)?
            } else {
                let code = code.code(cache)?;
                verify_codewords(&code, &enumerate_codebook(&code)?, oracle)?
            };
            report_verify(&report)?;
        }
        Command::Redundancy { n_min, n_max, output } => {
            let rows = analysis::redundancy_curves(n_min, n_max)?;
            let mut out = sink(output.as_deref())?;
            analysis::write_redundancy_csv(&mut out, &rows)?;
            out.flush()?;
        }
        Command::ConstraintProb { n, s, construction, trials, seed, exact, format, output } => {
            let mut rows = Vec::new();
            for &n in &n {
                for &s in &s {
                    let est = analysis::monte_carlo_membership(n, s, construction, trials, seed)?;
                    let bound = analysis::whole_string_bound(n as f64, s as f64);
                    let exact = (exact && n <= MAX_ENUM_N)
                        .then(|| analysis::exact_density(n, s, construction))
                        .transpose()?;
                    rows.push(ProbRow { est, bound, exact });
                }
            }
            let mut out = sink(output.as_deref())?;
            match format {
                Format::Json => {
                    serde_json::to_writer(&mut out, &rows).map_err(|e| usage(e.to_string()))?;
                    writeln!(out)?;
                }
                _ => {
                    writeln!(out, "n,s,construction,trials,hits,density,ci_low,ci_high,bound,exact")?;
                    for r in &rows {
                        let e = &r.est;
                        let exact = r.exact.map(|v| format!("{v:.9}")).unwrap_or_default();
                        writeln!(
                            out,
                            "{},{},{construction},{},{},{:.9},{:.9},{:.9},{:.9},{exact}",
                            e.n, e.s, e.trials, e.hits, e.estimate, e.ci_low, e.ci_high, r.bound
                        )?;
                    }
                }
            }
            out.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ProbRow {
    #[serde(flatten)]
    est: analysis::DensityEstimate,
    bound: f64,
    exact: Option<f64>,
}

/// Parses arguments, runs, and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("twodel: {}", f.message);
            f.code
        }
    }
}
