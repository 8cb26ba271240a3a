//! Exhaustive exact integrality scan of `S(n,i,k)` over a range of `n`.
//!
//! One coordinator advances `n`. For each `n` the `i < n` indices are cut
//! into `jobs` contiguous strips; each strip owns its slice of the first
//! column and reads the shared `T` rows. `i = n` uses `S(n,n,k) = T(n-1,k)`.
//!
//! The `T` row and first column are carried as reduced fractions. Within
//! one `n` the chains run on `n! · S(n,i,k)`, which is an integer, so a
//! step costs one division by `i` and one subtraction instead of gcds.
//! Sampled triples are reduced and checked against the fractions.
//! Hits are merged in `(n, i, k)` order and flushed before the next `n`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, Sign};
use rayon::prelude::*;
use serde::Serialize;

use crate::checkpoint::{checkpoint_load, checkpoint_save, CheckpointRecord};
use crate::error::{Error, Result};
use crate::oracle::{s_oracle, ORACLE_BOUND};
use crate::rational::ExactRational;
use crate::symfun::{factorial, k_cap, row_cap, SFirstColumn, ScaledRow, TRow};

/// The only integer values of `S(n,i,k)`.
pub const KNOWN_INTEGER_HITS: [(u64, u64, usize); 2] = [(2, 2, 1), (4, 4, 2)];

/// Upper end of the range settled by the exhaustive scan.
pub const DEFAULT_SCAN_END: u64 = 13_542;

pub const CSV_HEADER: &str = "n,i,k,numerator,denominator";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hit {
    pub n: u64,
    pub i: u64,
    pub k: usize,
    pub value: ExactRational,
}

impl Hit {
    pub fn is_known(&self) -> bool {
        KNOWN_INTEGER_HITS.contains(&(self.n, self.i, self.k))
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.n,
            self.i,
            self.k,
            self.value.numer(),
            self.value.denom()
        )
    }
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub n_start: u64,
    pub n_end: u64,
    pub jobs: usize,
    pub checkpoint_path: Option<PathBuf>,
    pub report_path: PathBuf,
    pub checkpoint_every: u64,
    pub oracle_crosscheck_max: u64,
    /// Continue from `checkpoint_path` instead of starting at `n = 1`.
    pub resume: bool,
    /// Stop right after completing this `n`, as if the process died there.
    pub halt_after: Option<u64>,
}

impl ScanConfig {
    pub fn new(n_start: u64, n_end: u64, report_path: impl Into<PathBuf>) -> Self {
        ScanConfig {
            n_start,
            n_end,
            jobs: 1,
            checkpoint_path: None,
            report_path: report_path.into(),
            checkpoint_every: 100,
            oracle_crosscheck_max: 12,
            resume: false,
            halt_after: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_start < 2 || self.n_start > self.n_end {
            return Err(Error::domain(format!(
                "scan range [{}, {}] must satisfy 2 <= n_start <= n_end",
                self.n_start, self.n_end
            )));
        }
        if self.jobs == 0 {
            return Err(Error::domain("jobs must be at least 1"));
        }
        if self.checkpoint_every == 0 {
            return Err(Error::domain("checkpoint_every must be at least 1"));
        }
        if self.oracle_crosscheck_max > ORACLE_BOUND {
            return Err(Error::domain(format!(
                "oracle_crosscheck_max {} exceeds the oracle bound {ORACLE_BOUND}",
                self.oracle_crosscheck_max
            )));
        }
        if self.resume && self.checkpoint_path.is_none() {
            return Err(Error::domain("resume needs a checkpoint path"));
        }
        Ok(())
    }
}

/// Sidecar summary file for a hit report: `hits.csv` -> `hits.summary.json`.
pub fn summary_path(report_path: &Path) -> PathBuf {
    report_path.with_extension("summary.json")
}

/// `Σ_{n} n · min(n-1, k_cap(n))` over `[n_start, n_end]`.
pub fn expected_triples(n_start: u64, n_end: u64) -> u64 {
    (n_start.max(2)..=n_end).map(|n| n * k_cap(n) as u64).sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub n_start: u64,
    pub n_end: u64,
    /// Last `n` completed; below `n_end` only when halted.
    pub n_completed: u64,
    pub triples_checked: u64,
    pub expected_triples: u64,
    pub integer_hits: Vec<Hit>,
    pub identity_checks: u64,
    pub oracle_checks: u64,
    pub resumed_from: Option<u64>,
    pub checkpoints_written: Vec<u64>,
    pub halted: bool,
    pub jobs: usize,
    pub elapsed_secs: f64,
    pub worker_secs: Vec<f64>,
}

impl ScanReport {
    pub fn unexpected_hits(&self) -> Vec<&Hit> {
        self.integer_hits.iter().filter(|h| !h.is_known()).collect()
    }
}

/// Recursion state after a completed `n`.
#[derive(Debug, Clone)]
pub struct ScanState {
    pub n: u64,
    pub row: TRow,
    pub s_col: SFirstColumn,
    factorial: BigInt,
}

impl ScanState {
    pub fn initial() -> Self {
        ScanState {
            n: 1,
            row: TRow::first(),
            s_col: SFirstColumn::seed(),
            factorial: BigInt::from(1u32),
        }
    }

    /// Advances to `n + 1` without examining any `S` value.
    pub fn skip(&mut self) {
        self.s_col.advance(self.row.harmonic());
        self.row = self.row.advance();
        self.n += 1;
        self.factorial *= self.n;
    }
}

#[derive(Default)]
struct StripResult {
    hits: Vec<Hit>,
    triples: u64,
    identity_checks: u64,
    oracle_checks: u64,
    elapsed: Duration,
}

struct StepContext<'a> {
    n: u64,
    max_k: usize,
    row: &'a TRow,
    scaled: &'a ScaledRow,
    oracle_max: u64,
}

/// Deterministic 1-in-1000 sample of triples for the online identity check.
fn sampled(n: u64, i: u64, k: usize) -> bool {
    let h = n
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(i.wrapping_mul(0xC2B2_AE3D_27D4_EB4F))
        .wrapping_add(k as u64);
    (h ^ (h >> 29)).is_multiple_of(1000)
}

impl StepContext<'_> {
    fn check(&self, out: &mut StripResult, i: u64, k: usize, value: &ExactRational) -> Result<()> {
        if value.is_integer() {
            out.hits.push(Hit {
                n: self.n,
                i,
                k,
                value: value.clone(),
            });
        }
        if self.n <= self.oracle_max {
            out.oracle_checks += 1;
            let want = s_oracle(self.n, i, k)?;
            if &want != value {
                return Err(Error::SelfCheck(format!(
                    "S({}, {i}, {k}): recursion {value} != oracle {want}",
                    self.n
                )));
            }
        }
        Ok(())
    }

    fn record(&self, out: &mut StripResult, i: u64, k: usize, value: &ExactRational) -> Result<()> {
        out.triples += 1;
        if !value.is_positive() {
            return Err(Error::SelfCheck(format!(
                "S({}, {i}, {k}) = {value} is not positive",
                self.n
            )));
        }
        self.check(out, i, k, value)
    }

    /// Same as [`Self::record`] for a value in the `n!`-scaled frame; the
    /// reduced fraction is only formed when something needs it.
    fn record_scaled(
        &self,
        out: &mut StripResult,
        i: u64,
        k: usize,
        scaled: &BigInt,
    ) -> Result<()> {
        out.triples += 1;
        if scaled.sign() != Sign::Plus {
            return Err(Error::SelfCheck(format!(
                "S({}, {i}, {k}) is not positive",
                self.n
            )));
        }
        if self.scaled.is_integer(scaled) || self.n <= self.oracle_max {
            self.check(out, i, k, &self.scaled.to_rational(scaled))?;
        }
        Ok(())
    }

    /// `T(n,k) = S(n,i,k) + S(n,i,k-1)/i`, in reduced fractions.
    fn identity(
        &self,
        out: &mut StripResult,
        i: u64,
        k: usize,
        s_k: &ExactRational,
        s_km1: &ExactRational,
    ) -> Result<()> {
        out.identity_checks += 1;
        let rebuilt = s_k + &s_km1.div_small(i)?;
        if Some(&rebuilt) != self.row.get(k) {
            return Err(Error::SelfCheck(format!(
                "identity fails at ({}, {i}, {k})",
                self.n
            )));
        }
        Ok(())
    }

    fn strip(&self, first_i: u64, strip: &mut [ExactRational]) -> Result<StripResult> {
        let started = Instant::now();
        let mut out = StripResult::default();
        for (off, s1) in strip.iter_mut().enumerate() {
            let i = first_i + off as u64;
            *s1 = s1.add_recip(self.n)?;
            let mut chain = self.scaled.chain(i);
            self.record_scaled(&mut out, i, 1, chain.value())?;
            if sampled(self.n, i, 1) {
                // the rational first column and the scaled frame must agree
                out.identity_checks += 1;
                if self.scaled.to_rational(chain.value()) != *s1 {
                    return Err(Error::SelfCheck(format!(
                        "first column disagrees at ({}, {i})",
                        self.n
                    )));
                }
            }
            for k in 2..=self.max_k {
                let prev = sampled(self.n, i, k).then(|| chain.value().clone());
                chain.step()?;
                self.record_scaled(&mut out, i, k, chain.value())?;
                if let Some(prev) = prev {
                    let s_k = self.scaled.to_rational(chain.value());
                    self.identity(&mut out, i, k, &s_k, &self.scaled.to_rational(&prev))?;
                }
            }
        }
        out.elapsed = started.elapsed();
        Ok(out)
    }
}

struct HitSink {
    path: PathBuf,
    out: BufWriter<File>,
}

impl HitSink {
    fn create(path: &Path, prior: &[Hit]) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut sink = HitSink {
            path: path.to_owned(),
            out: BufWriter::new(file),
        };
        sink.write_line(CSV_HEADER)?;
        for h in prior {
            sink.write_line(&h.csv_line())?;
        }
        sink.flush()?;
        Ok(sink)
    }

    fn write_line(&mut self, line: &str) -> Result<()> {
        writeln!(self.out, "{line}").map_err(|e| Error::io(&self.path, e))
    }

    fn flush(&mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))?;
        self.out
            .get_ref()
            .sync_data()
            .map_err(|e| Error::io(&self.path, e))
    }
}

/// Runs the scan described by `config`, writing the hit CSV, the summary
/// JSON next to it, and checkpoints if configured.
pub fn scan(config: &ScanConfig) -> Result<ScanReport> {
    config.validate()?;
    let started = Instant::now();

    let (mut state, mut hits, resumed_from) = if config.resume {
        let path = config.checkpoint_path.as_deref().expect("validated");
        let rec = checkpoint_load(path)?;
        let hits: Vec<Hit> = rec
            .hits
            .into_iter()
            .filter(|h| h.n >= config.n_start && h.n <= config.n_end)
            .collect();
        let n = rec.n;
        (
            ScanState {
                n,
                row: rec.t_row,
                s_col: rec.s_col,
                factorial: factorial(n),
            },
            hits,
            Some(n),
        )
    } else {
        (ScanState::initial(), Vec::new(), None)
    };

    let mut sink = HitSink::create(&config.report_path, &hits)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::domain(format!("cannot start {} workers: {e}", config.jobs)))?;

    let mut triples = match resumed_from {
        Some(c) if c >= config.n_start => expected_triples(config.n_start, c.min(config.n_end)),
        _ => 0,
    };
    let mut identity_checks = 0;
    let mut oracle_checks = 0;
    let mut worker_time = vec![Duration::ZERO; config.jobs];
    let mut checkpoints_written = Vec::new();
    let mut halted = false;
    let mut spare = TRow::first();

    while state.n < config.n_end {
        let n = state.n + 1;
        if n < config.n_start {
            state.skip();
            continue;
        }
        // i = n reads T(n-1, k) up to k_cap(n), which may be a new column
        state.row.widen(row_cap(n))?;
        state.row.advance_into(row_cap(n), &mut spare);
        if spare.harmonic().is_integer() {
            return Err(Error::SelfCheck(format!("H_{n} is an integer")));
        }
        state.factorial *= n;
        let scaled = ScaledRow::from_row(&spare, &state.factorial)?;
        let ctx = StepContext {
            n,
            max_k: k_cap(n),
            row: &spare,
            scaled: &scaled,
            oracle_max: config.oracle_crosscheck_max,
        };

        let below = &mut state.s_col.values_mut()[..(n - 1) as usize];
        let chunk = below.len().div_ceil(config.jobs).max(1);
        let results: Vec<Result<StripResult>> = pool.install(|| {
            below
                .par_chunks_mut(chunk)
                .enumerate()
                .map(|(w, strip)| ctx.strip(1 + (w * chunk) as u64, strip))
                .collect()
        });
        let mut step_hits = Vec::new();
        for (w, r) in results.into_iter().enumerate() {
            let r = r?;
            triples += r.triples;
            identity_checks += r.identity_checks;
            oracle_checks += r.oracle_checks;
            worker_time[w] += r.elapsed;
            step_hits.extend(r.hits);
        }

        // i = n
        let mut tail = StripResult::default();
        for k in 1..=ctx.max_k {
            let value = state.row.get(k).expect("previous row covers k_cap(n)");
            ctx.record(&mut tail, n, k, value)?;
            if k >= 2 && sampled(n, n, k) {
                ctx.identity(&mut tail, n, k, value, state.row.get(k - 1).unwrap())?;
            }
        }
        triples += tail.triples;
        identity_checks += tail.identity_checks;
        oracle_checks += tail.oracle_checks;
        step_hits.extend(tail.hits);

        state.s_col.push_last(state.row.harmonic().clone());
        std::mem::swap(&mut state.row, &mut spare);
        state.n = n;

        if !step_hits.is_empty() {
            for h in &step_hits {
                sink.write_line(&h.csv_line())?;
            }
            sink.flush()?;
            hits.extend(step_hits);
        }

        if let Some(path) = &config.checkpoint_path {
            if n % config.checkpoint_every == 0 || n == config.n_end {
                save_state(path, &state, &hits)?;
                checkpoints_written.push(n);
            }
        }
        if config.halt_after == Some(n) && n < config.n_end {
            halted = true;
            break;
        }
    }

    let expected = expected_triples(config.n_start, state.n.min(config.n_end));
    if state.n >= config.n_start && triples != expected {
        return Err(Error::SelfCheck(format!(
            "checked {triples} triples but the range holds {expected}"
        )));
    }

    let report = ScanReport {
        n_start: config.n_start,
        n_end: config.n_end,
        n_completed: state.n,
        triples_checked: triples,
        expected_triples: expected_triples(config.n_start, config.n_end),
        integer_hits: hits,
        identity_checks,
        oracle_checks,
        resumed_from,
        checkpoints_written,
        halted,
        jobs: config.jobs,
        elapsed_secs: started.elapsed().as_secs_f64(),
        worker_secs: worker_time.iter().map(Duration::as_secs_f64).collect(),
    };
    let summary = summary_path(&config.report_path);
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(&summary, json + "\n").map_err(|e| Error::io(&summary, e))?;
    Ok(report)
}

fn save_state(path: &Path, state: &ScanState, hits: &[Hit]) -> Result<()> {
    let record = CheckpointRecord {
        n: state.n,
        t_row: state.row.clone(),
        s_col: state.s_col.clone(),
        hits: hits.to_vec(),
    };
    checkpoint_save(path, &record)
}
