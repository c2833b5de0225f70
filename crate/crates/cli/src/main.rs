//! `residue-lab`: batch reports over quadratic residues.
//!
//! Exit status: 0 success, 1 bad arguments or unmet hypothesis, 2 a checked
//! inequality or identity failed.

mod verify;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use residue_lab::census::{census_sweep, residual_extremes, CensusReport, ResidualExtreme};
use residue_lab::charsum::{burgess_check, partial_sum_profile};
use residue_lab::expsums::{gauss_sum, Eta};
use residue_lab::nonresidue::{
    bound_synopsis, distribution, log_scale, nonresidue_table, record_for,
};
use residue_lab::report::{Format, FrequencyRow, GaussRow, ProfileRow, ReportWriter, Row};
use residue_lab::{Error, PrimeModulus, PrimeRange};

#[derive(Parser)]
#[command(
    name = "residue-lab",
    version,
    about = "Reports on quadratic residues modulo primes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Output format [default: pretty on a terminal, csv otherwise]
    #[arg(long, global = true, value_enum)]
    format: Option<OutFormat>,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; 0 lets rayon decide
    #[arg(long, global = true, env = "RESIDUE_LAB_WORKERS")]
    workers: Option<usize>,

    /// Seed for randomized spot checks
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
    Pretty,
}

#[derive(Subcommand)]
enum Command {
    /// Exact pattern counts against T(k,p) and the Peralta envelope
    Census {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
    },
    /// Least quadratic nonresidue statistics
    Nonresidue {
        #[command(subcommand)]
        command: NonresidueCommand,
    },
    /// Partial character sums
    Charsum {
        #[command(subcommand)]
        command: CharsumCommand,
    },
    /// Gauss sums against eta_p sqrt(p)
    Gauss {
        #[command(flatten)]
        target: Target,
    },
    /// Exact identities for every prime up to a bound
    Verify {
        #[arg(long, default_value_t = 500)]
        bound: u64,
        #[arg(long, value_enum)]
        only: Option<verify::Identity>,
    },
}

#[derive(Subcommand)]
enum NonresidueCommand {
    /// Least prime with n_p equal to the n-th prime, n = 1..n_max
    Table {
        #[arg(long, default_value_t = 15)]
        n_max: usize,
        #[arg(long, default_value_t = 4_000_000)]
        search_bound: u64,
    },
    /// Frequencies of n_p = p_n over odd primes up to x
    Distribution {
        #[arg(long, default_value_t = 1_000_000)]
        x: u64,
    },
    /// n_p and c_p for one prime
    Record {
        #[arg(long)]
        p: u64,
    },
}

#[derive(Subcommand)]
enum CharsumCommand {
    /// max |f|, Polya-Vinogradov ratio and monotone runs per prime
    Profile {
        #[command(flatten)]
        target: Target,
    },
    /// One explicit Burgess inequality
    Burgess {
        #[arg(long)]
        p: u64,
        /// Start of the interval
        #[arg(long, default_value_t = 0)]
        m: u64,
        /// Length of the interval
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 2)]
        r: u32,
    },
}

#[derive(Args)]
struct Target {
    #[arg(long, conflicts_with = "range")]
    p: Option<u64>,
    /// Inclusive, `lo:hi`
    #[arg(long)]
    range: Option<PrimeRange>,
}

impl Target {
    fn resolve(&self) -> Result<PrimeRange, Failure> {
        match (self.p, &self.range) {
            (Some(p), _) => {
                PrimeModulus::new(p)?;
                Ok(PrimeRange::single(p)?)
            }
            (None, Some(r)) => Ok(*r),
            (None, None) => Err(Failure::Usage("one of --p or --range is required".into())),
        }
    }

    fn moduli(&self) -> Result<Vec<PrimeModulus>, Failure> {
        Ok(self.resolve()?.moduli().collect())
    }
}

enum Failure {
    Usage(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<ExitCode, Failure>;

fn verdict(violations: u64) -> ExitCode {
    if violations == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

struct Output {
    format: Format,
    path: Option<PathBuf>,
}

impl Output {
    fn new(common: &Common) -> Self {
        let format = match common.format {
            Some(OutFormat::Csv) => Format::Csv,
            Some(OutFormat::Json) => Format::Json,
            Some(OutFormat::Pretty) => Format::Pretty,
            None if common.out.is_none() && io::stdout().is_terminal() => Format::Pretty,
            None => Format::Csv,
        };
        Self {
            format,
            path: common.out.clone(),
        }
    }

    fn writer<R: Row>(&self) -> io::Result<ReportWriter<Box<dyn Write>>> {
        let sink: Box<dyn Write> = match &self.path {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        ReportWriter::for_row::<R>(sink, self.format)
    }

    fn emit<R: Row>(&self, rows: &[R]) -> io::Result<()> {
        let mut w = self.writer::<R>()?;
        for r in rows {
            w.write(r)?;
        }
        w.finish().map(drop)
    }
}

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
    if let Some(n) = cli.common.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let out = Output::new(&cli.common);
    match &cli.command {
        Command::Census { target, k_max } => cmd_census(&out, target, *k_max),
        Command::Nonresidue { command } => cmd_nonresidue(&out, command),
        Command::Charsum { command } => cmd_charsum(&out, command),
        Command::Gauss { target } => cmd_gauss(&out, target),
        Command::Verify { bound, only } => verify::run(&out, *bound, *only, cli.common.seed),
    }
}

fn cmd_census(out: &Output, target: &Target, k_max: usize) -> Outcome {
    let sweep = census_sweep(target.resolve()?, k_max)?;
    let mut w = out.writer::<CensusReport>()?;
    let mut extremes: BTreeMap<(usize, u32), ResidualExtreme> = BTreeMap::new();
    let mut violations = Vec::new();
    for r in sweep {
        let r = r?;
        for e in residual_extremes([&r]) {
            extremes
                .entry((e.k, e.decade))
                .and_modify(|acc| {
                    acc.reports += 1;
                    if e.max_abs_residual > acc.max_abs_residual {
                        acc.max_abs_residual = e.max_abs_residual;
                        acc.at_p = e.at_p;
                    }
                })
                .or_insert(e);
        }
        if !r.within_peralta() {
            violations.push(r.clone());
        }
        w.write(&r)?;
    }
    w.finish()?;
    if !extremes.is_empty() {
        eprintln!("max |residual| by pattern length and decade of p:");
        eprintln!(
            "{:>3} {:>6} {:>14} {:>12} {:>10}",
            "k", "decade", "max_abs_resid", "at_p", "rows"
        );
        for e in extremes.values() {
            eprintln!(
                "{:>3} {:>6} {:>14} {:>12} {:>10}",
                e.k,
                format!("1e{}", e.decade),
                residue_lab::report::sig6(e.max_abs_residual),
                e.at_p,
                e.reports
            );
        }
    }
    for v in &violations {
        eprintln!(
            "violation: p={} pattern={} exact={} |N - p/2^k|={} > {}",
            v.p,
            v.pattern,
            v.exact,
            (v.exact as f64 - v.p_over_2k).abs(),
            v.peralta_bound
        );
    }
    Ok(verdict(violations.len() as u64))
}

fn cmd_nonresidue(out: &Output, command: &NonresidueCommand) -> Outcome {
    match command {
        NonresidueCommand::Table {
            n_max,
            search_bound,
        } => {
            if *n_max == 0 {
                return Err(Failure::Usage("--n-max must be at least 1".into()));
            }
            let rows = nonresidue_table(*n_max, *search_bound)?;
            out.emit(&rows)?;
            let missing: Vec<String> = rows
                .iter()
                .filter(|r| r.record.is_none())
                .map(|r| r.n.to_string())
                .collect();
            if !missing.is_empty() {
                eprintln!(
                    "no prime <= {search_bound} attains n = {}",
                    missing.join(", ")
                );
            }
        }
        NonresidueCommand::Distribution { x } => {
            let d = distribution(*x)?;
            out.emit(&d.rows())?;
            eprintln!("odd primes <= {}: {}", d.x, d.primes);
            eprintln!("mean n_p: {}", residue_lab::report::sig6(d.mean()));
            let worst = d
                .rows()
                .iter()
                .take(5)
                .map(|r: &FrequencyRow| (r.frequency - r.expected()).abs())
                .fold(0.0, f64::max);
            eprintln!(
                "max |frequency - 2^-n| for n <= 5: {}",
                residue_lab::report::sig6(worst)
            );
        }
        NonresidueCommand::Record { p } => {
            let m = PrimeModulus::new(*p)?;
            out.emit(&[record_for(&m)])?;
            for b in bound_synopsis(&m) {
                eprintln!(
                    "{}: {} ({})",
                    b.name,
                    residue_lab::report::sig6(b.value),
                    if b.satisfied { "holds" } else { "fails" }
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

const PROFILE_BATCH: usize = 4096;

fn cmd_charsum(out: &Output, command: &CharsumCommand) -> Outcome {
    match command {
        CharsumCommand::Profile { target } => {
            let moduli = target.moduli()?;
            let mut w = out.writer::<ProfileRow>()?;
            let mut failures = 0;
            let mut worst_ratio: Option<(f64, u64)> = None;
            let mut worst_run: Option<(f64, u64)> = None;
            for batch in moduli.chunks(PROFILE_BATCH) {
                let rows: Vec<Result<ProfileRow, Error>> = batch
                    .par_iter()
                    .map(|m| partial_sum_profile(m).map(|pr| ProfileRow::from(&pr)))
                    .collect();
                for row in rows {
                    let row = row?;
                    if !row.pv.satisfied {
                        failures += 1;
                        eprintln!(
                            "violation: p={} max|f|={} > {}",
                            row.pv.p, row.pv.max_abs, row.pv.bound
                        );
                    }
                    if worst_ratio.is_none_or(|(r, _)| row.pv.ratio > r) {
                        worst_ratio = Some((row.pv.ratio, row.pv.p));
                    }
                    // ln ln p is negative below e^e
                    if row.pv.p >= 17 {
                        let h = row.longest_inc_run.max(row.longest_dec_run) as f64
                            / log_scale(row.pv.p);
                        if worst_run.is_none_or(|(r, _)| h > r) {
                            worst_run = Some((h, row.pv.p));
                        }
                    }
                    w.write(&row)?;
                }
            }
            w.finish()?;
            if let Some((r, p)) = worst_ratio {
                eprintln!(
                    "max max|f|/(sqrt(p) ln p): {} at p={p}",
                    residue_lab::report::sig6(r)
                );
            }
            if let Some((h, p)) = worst_run {
                eprintln!(
                    "max run/((ln p)(ln ln p)) for p >= 17: {} at p={p}",
                    residue_lab::report::sig6(h)
                );
            }
            Ok(verdict(failures))
        }
        CharsumCommand::Burgess { p, m, n, r } => {
            let check = burgess_check(*p, *m, *n, *r)?;
            out.emit(std::slice::from_ref(&check))?;
            Ok(verdict(u64::from(!check.satisfied)))
        }
    }
}

fn cmd_gauss(out: &Output, target: &Target) -> Outcome {
    let moduli = target.moduli()?;
    let rows: Vec<Result<GaussRow, Error>> = moduli
        .par_iter()
        .map(|m| {
            gauss_sum(m).map(|sum| GaussRow {
                p: m.p(),
                eta: Eta::of(m),
                sum,
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    out.emit(&rows)?;
    let bad: Vec<&GaussRow> = rows
        .iter()
        .filter(|g| g.error() >= 1e-6 * (g.p as f64).sqrt())
        .collect();
    for g in &bad {
        eprintln!("violation: p={} |G - eta sqrt(p)| = {}", g.p, g.error());
    }
    Ok(verdict(bad.len() as u64))
}
