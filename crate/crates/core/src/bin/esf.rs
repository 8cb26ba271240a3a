use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use esf_core::chebyshev::{case1_margin, check_theta_bounds, theta};
use esf_core::precise::precision_from_env;
use esf_core::primes::{sieve, DEFAULT_SIEVE_LIMIT};
use esf_core::scan::{summary_path, DEFAULT_SCAN_END};
use esf_core::{certify_range, exact_s, exact_t, scan, Error, ExactRational, ScanConfig};

const EXIT_USAGE: u8 = 1;
const EXIT_FINDING: u8 = 2;

#[derive(Parser)]
#[command(name = "esf", version)]
#[command(
    about = "Exact integrality checks for elementary symmetric functions of 1, 1/2, ..., 1/n"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustive exact scan of S(n,i,k) over a range of n
    Scan(ScanArgs),
    /// Print S(N,I,K), or T(N,K) with --t, as num/den
    Value(ValueArgs),
    /// Search prime-window certificates for every (n, k) in a range
    Certify(CertifyArgs),
    /// Check the two-sided bound on theta(x) over [x-lo, x-hi]
    Theta(ThetaArgs),
    /// Evaluate the large-n margin inequality at N
    Margin { n: u64 },
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, default_value_t = 2)]
    n_start: u64,
    #[arg(long, default_value_t = DEFAULT_SCAN_END)]
    n_end: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Checkpoint file, written every --checkpoint-every values of n
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Hit report (CSV); the summary goes next to it as .summary.json
    #[arg(long, default_value = "esf-hits.csv")]
    out: PathBuf,
    #[arg(long, default_value_t = 100)]
    checkpoint_every: u64,
    /// Continue from the --checkpoint file
    #[arg(long)]
    resume: bool,
    /// Cross-check every value against subset enumeration up to this n
    #[arg(long, default_value_t = 12)]
    oracle_crosscheck_max: u64,
}

#[derive(Args)]
struct ValueArgs {
    /// Treat the arguments as N K and print T(N,K)
    #[arg(long)]
    t: bool,
    #[arg(required = true, num_args = 2..=3)]
    args: Vec<u64>,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    n_start: u64,
    #[arg(long)]
    n_end: u64,
    /// Defaults to the larger of 50216 and --n-end
    #[arg(long)]
    sieve_limit: Option<u64>,
    /// Certificate list output (tab-separated; gaps prefixed GAP)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThetaArgs {
    #[arg(long, default_value = "1429")]
    x_lo: String,
    #[arg(long, default_value = "50216")]
    x_hi: String,
}

enum Failure {
    Usage(String),
    Finding(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SelfCheck(_) => Failure::Finding(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn run_scan(a: ScanArgs) -> CmdResult {
    let config = ScanConfig {
        n_start: a.n_start,
        n_end: a.n_end,
        jobs: a.jobs,
        checkpoint_path: a.checkpoint,
        report_path: a.out,
        checkpoint_every: a.checkpoint_every,
        oracle_crosscheck_max: a.oracle_crosscheck_max,
        resume: a.resume,
        halt_after: None,
    };
    let report = scan(&config)?;
    println!(
        "scanned n in [{}, {}]: {} triples, {} integer hit(s), {:.2}s",
        report.n_start,
        report.n_end,
        report.triples_checked,
        report.integer_hits.len(),
        report.elapsed_secs
    );
    for h in &report.integer_hits {
        let tag = if h.is_known() { "known" } else { "UNEXPECTED" };
        println!("  S({}, {}, {}) = {}  [{tag}]", h.n, h.i, h.k, h.value);
    }
    println!(
        "report: {}  summary: {}",
        config.report_path.display(),
        summary_path(&config.report_path).display()
    );
    let unexpected = report.unexpected_hits().len();
    if unexpected > 0 {
        return Err(Failure::Finding(format!(
            "{unexpected} unexpected integer hit(s)"
        )));
    }
    Ok(())
}

fn run_value(a: ValueArgs) -> CmdResult {
    let value = match (a.t, a.args.as_slice()) {
        (true, &[n, k]) => exact_t(n, k as usize)?,
        (false, &[n, i, k]) => exact_s(n, i, k as usize)?,
        (true, _) => return Err(Failure::Usage("value --t takes N K".into())),
        (false, _) => return Err(Failure::Usage("value takes N I K".into())),
    };
    println!("{value}");
    Ok(())
}

fn run_certify(a: CertifyArgs) -> CmdResult {
    let limit = a.sieve_limit.unwrap_or(DEFAULT_SIEVE_LIMIT.max(a.n_end));
    let table = sieve(limit)?;
    let outcome = certify_range(a.n_start, a.n_end, &table)?;
    if let Some(path) = &a.out {
        let file = File::create(path).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
        outcome
            .write_to(BufWriter::new(file))
            .map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
    }
    let gaps = outcome.gaps();
    println!(
        "certified n in [{}, {}]: {} certificate(s), {} gap(s)",
        a.n_start,
        a.n_end,
        outcome.certificates().count(),
        gaps.len()
    );
    for (n, k) in gaps.iter().take(20) {
        println!("  GAP n={n} k={k}");
    }
    if !gaps.is_empty() {
        return Err(Failure::Finding(format!("{} gap(s)", gaps.len())));
    }
    Ok(())
}

fn parse_real(s: &str) -> Result<ExactRational, Failure> {
    ExactRational::from_decimal_str(s)
        .or_else(|_| s.parse())
        .map_err(|e: Error| Failure::Usage(e.to_string()))
}

fn run_theta(a: ThetaArgs) -> CmdResult {
    let bits = precision_from_env()?;
    let x_lo = parse_real(&a.x_lo)?;
    let x_hi = parse_real(&a.x_hi)?;
    let top = x_hi.numer() / x_hi.denom();
    let limit: u64 = top
        .try_into()
        .map_err(|_| Failure::Usage("x-hi too large".into()))?;
    let table = sieve(limit.max(2))?;
    let report = check_theta_bounds(&x_lo, &x_hi, &table, bits)?;
    let at_hi = theta(&x_hi, &table, bits)?;
    println!(
        "theta bounds on [{}, {}] at {} bits: {} ({} stretches, min lower gap {:.6}, min upper gap {:.6}, max radius {:.3e})",
        a.x_lo,
        a.x_hi,
        bits,
        if report.passed() { "pass" } else { "FAIL" },
        report.segments_checked,
        report.min_lower_gap,
        report.min_upper_gap,
        report.max_theta_radius
    );
    println!("theta({}) = {at_hi}", a.x_hi);
    if !report.passed() {
        return Err(Failure::Finding(format!(
            "{} violation(s)",
            report.violations.len()
        )));
    }
    Ok(())
}

fn run_margin(n: u64) -> CmdResult {
    let bits = precision_from_env()?;
    let m = case1_margin(n, bits)?;
    println!("n = {n} at {bits} bits");
    println!(
        "  margin          {}  ({})",
        m.margin,
        verdict(m.margin_positive())
    );
    println!(
        "  n/(c+3) - 1429  {}  ({})",
        m.window_floor,
        verdict(m.window_floor_holds())
    );
    println!(
        "  n - (c+3)(3c+8) {}  ({})",
        m.product_gap,
        verdict(m.product_gap.is_positive())
    );
    println!(
        "  n - (c+2)(c+3)^2/2 {}  ({})",
        m.cubic_gap,
        verdict(m.cubic_gap.is_positive())
    );
    if !m.holds() {
        return Err(Failure::Finding("margin inequality not confirmed".into()));
    }
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "holds"
    } else {
        "FAILS"
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Scan(a) => run_scan(a),
        Command::Value(a) => run_value(a),
        Command::Certify(a) => run_certify(a),
        Command::Theta(a) => run_theta(a),
        Command::Margin { n } => run_margin(n),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Finding(msg)) => {
            eprintln!("alarm: {msg}");
            ExitCode::from(EXIT_FINDING)
        }
    }
}
