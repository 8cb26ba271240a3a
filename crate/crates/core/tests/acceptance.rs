//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use esf_core::certify::verify_valuation_all_indices;
use esf_core::chebyshev::{case1_margin, check_theta_bounds};
use esf_core::oracle::{s_oracle, t_oracle};
use esf_core::primes::DEFAULT_SIEVE_LIMIT;
use esf_core::symfun::{closed_form_s, closed_form_t, s_value, t_row};
use esf_core::{
    certify_range, find_certificate, k_cap, scan, sieve, ExactRational, SChain, SFirstColumn,
    ScanConfig, TRow,
};

const ESF: &str = env!("CARGO_BIN_EXE_esf");

/// Working precision for the rigorous checks; never below 96 bits.
const BITS: u32 = 96;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(s: &str) -> ExactRational {
    s.parse().unwrap()
}

fn esf(args: &[&str]) -> (i32, String) {
    let out = Command::new(ESF).args(args).output().expect("run esf");
    let code = out.status.code().unwrap_or(-1);
    (code, String::from_utf8_lossy(&out.stdout).into_owned())
}

const GOLDEN: [(&str, &str); 21] = [
    ("2 1 1", "1/2"),
    ("2 2 1", "1/1"),
    ("3 1 1", "5/6"),
    ("3 1 2", "1/6"),
    ("3 2 1", "4/3"),
    ("3 2 2", "1/3"),
    ("3 3 1", "3/2"),
    ("3 3 2", "1/2"),
    ("4 1 1", "13/12"),
    ("4 1 2", "3/8"),
    ("4 1 3", "1/24"),
    ("4 2 1", "19/12"),
    ("4 2 2", "2/3"),
    ("4 2 3", "1/12"),
    ("4 3 1", "7/4"),
    ("4 3 2", "7/8"),
    ("4 3 3", "1/8"),
    ("4 4 1", "11/6"),
    ("4 4 2", "1/1"),
    ("4 4 3", "1/6"),
    ("--t 3 2", "1/1"),
];

fn golden_tables() -> Outcome {
    for (args, want) in GOLDEN {
        let argv: Vec<&str> = std::iter::once("value").chain(args.split(' ')).collect();
        let (code, out) = esf(&argv);
        ensure(code == 0 && out.trim() == want, || {
            format!(
                "value {args}: exit {code}, got {:?}, want {want}",
                out.trim()
            )
        })?;
    }
    Ok(format!("{} values exact", GOLDEN.len()))
}

fn desk_scale_scan(dir: &Path) -> Outcome {
    let out = dir.join("scan500.csv");
    let (code, stdout) = esf(&[
        "scan",
        "--n-start",
        "2",
        "--n-end",
        "500",
        "--out",
        out.to_str().unwrap(),
    ]);
    ensure(code == 0, || format!("exit {code}: {stdout}"))?;
    let csv = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
    let want = "n,i,k,numerator,denominator\n2,2,1,1,1\n4,4,2,1,1\n";
    ensure(csv == want, || format!("hit report {csv:?}"))?;
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("scan500.summary.json")).unwrap())
            .unwrap();
    let triples = summary["triples_checked"].as_u64().unwrap();
    ensure(
        triples == summary["expected_triples"].as_u64().unwrap(),
        || "triple count mismatch".into(),
    )?;
    Ok(format!("hits (2,2,1), (4,4,2) only; {triples} triples"))
}

fn oracle_equivalence(dir: &Path) -> Outcome {
    let mut checked = 0;
    let mut row = TRow::first();
    let mut col = SFirstColumn::seed();
    while row.n() < 12 {
        col.advance(row.harmonic());
        // every column, not just the k_cap(n) the scan needs
        row = row.advance_with_cap(12);
        let n = row.n();
        for k in 1..n as usize {
            ensure(row.get(k) == Some(&t_oracle(n, k).unwrap()), || {
                format!("T({n},{k})")
            })?;
            for i in 1..=n {
                let got = s_value(n, i, k, &row, &col).unwrap();
                ensure(got == s_oracle(n, i, k).unwrap(), || {
                    format!("S({n},{i},{k})")
                })?;
                checked += 1;
            }
        }
    }
    // the scan kernel runs the same comparison on every triple it visits
    let mut config = ScanConfig::new(2, 12, dir.join("oracle.csv"));
    config.oracle_crosscheck_max = 12;
    let report = scan(&config).map_err(|e| e.to_string())?;
    ensure(report.oracle_checks == report.triples_checked, || {
        "scan skipped oracle checks".into()
    })?;
    Ok(format!(
        "{checked} S triples and all T values, plus {} scan triples, n <= 12",
        report.oracle_checks
    ))
}

fn closed_forms() -> Outcome {
    let mut checked = 0;
    for k in 1..=10u64 {
        for offset in 1..=2u32 {
            let n = k + offset as u64;
            let t = closed_form_t(k, offset).unwrap();
            ensure(t == t_oracle(n, k as usize).unwrap(), || {
                format!("T({n},{k})")
            })?;
            for ip in 1..=n {
                let s = closed_form_s(k, ip, offset).unwrap();
                ensure(s == s_oracle(n, ip, k as usize).unwrap(), || {
                    format!("S({n},{ip},{k})")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} closed-form S values and 20 T values"))
}

fn identity_suite() -> Outcome {
    let mut checked = 0;
    let mut prev = TRow::first();
    for n in 2..=60u64 {
        let row = t_row(n, n as usize).unwrap();
        let cap = k_cap(n);
        for i in 1..=n {
            let mut chain = SChain::new(
                &row,
                i,
                row.harmonic() - &ExactRational::reciprocal_of(i).unwrap(),
            );
            for k in 2..=cap {
                let before = chain.value().clone();
                chain.step().unwrap();
                let rebuilt = chain.value() + &before.div_small(i).unwrap();
                ensure(Some(&rebuilt) == row.get(k), || {
                    format!("identity at ({n},{i},{k})")
                })?;
                checked += 1;
            }
        }
        for k in 1..n as usize {
            ensure(
                s_value_direct(n, n, k, &row) == *prev.get(k).unwrap(),
                || format!("S({n},{n},{k}) != T({},{k})", n - 1),
            )?;
        }
        prev = row;
    }
    Ok(format!(
        "{checked} identity instances, shortcut for all n <= 60"
    ))
}

/// `S(n,i,k)` by the chain alone, without the `i = n` shortcut.
fn s_value_direct(n: u64, i: u64, k: usize, row: &TRow) -> ExactRational {
    let mut chain = SChain::new(
        row,
        i,
        row.harmonic() - &ExactRational::reciprocal_of(i).unwrap(),
    );
    while chain.k() < k {
        chain.step().unwrap();
    }
    assert_eq!(row.n(), n);
    chain.value().clone()
}

fn case2_subranges() -> Outcome {
    let table = sieve(DEFAULT_SIEVE_LIMIT).unwrap();
    let mut certs = 0;
    for (lo, hi) in [(13_543, 14_000), (50_000, 50_216)] {
        let outcome = certify_range(lo, hi, &table).unwrap();
        let gaps = outcome.gaps();
        ensure(gaps.is_empty(), || {
            format!("[{lo}, {hi}]: {} gaps, first {:?}", gaps.len(), gaps[0])
        })?;
        certs += outcome.certificates().count();
    }
    let (code, _) = esf(&["certify", "--n-start", "13543", "--n-end", "14000"]);
    ensure(code == 0, || format!("certify CLI exit {code}"))?;
    Ok(format!("zero gaps, {certs} certificates"))
}

fn valuation_property() -> Outcome {
    let table = sieve(2000).unwrap();
    let mut pairs = Vec::new();
    for n in 2..=2000u64 {
        for k in 1..=k_cap(n) as u64 {
            if let Some(c) = find_certificate(n, k, &table).unwrap() {
                pairs.push(c);
            }
        }
    }
    let total = pairs.len();
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    let sample: Vec<_> = pairs.choose_multiple(&mut rng, 200).cloned().collect();
    ensure(sample.len() == 200, || {
        format!("only {total} certified pairs")
    })?;
    let mut by_n: BTreeMap<u64, Vec<_>> = BTreeMap::new();
    for c in sample {
        by_n.entry(c.n).or_default().push(c);
    }
    let mut indices = 0;
    for (n, certs) in &by_n {
        for check in verify_valuation_all_indices(*n, certs).unwrap() {
            ensure(check.passed() && check.indices_checked == *n, || {
                format!(
                    "(n={n}, k={}, p={}): failures {:?}",
                    check.k, check.p, check.failures
                )
            })?;
            indices += check.indices_checked;
        }
    }
    Ok(format!(
        "200 of {total} certified pairs, {indices} (pair, i) checks"
    ))
}

fn theta_bounds() -> Outcome {
    let table = sieve(DEFAULT_SIEVE_LIMIT).unwrap();
    let r = check_theta_bounds(&q("1429"), &q("50216"), &table, BITS).unwrap();
    ensure(r.passed(), || {
        format!(
            "{} violations, first {:?}",
            r.violations.len(),
            r.violations.first()
        )
    })?;
    Ok(format!(
        "{} stretches at {BITS} bits, min gaps {:.3} / {:.3}",
        r.segments_checked, r.min_lower_gap, r.min_upper_gap
    ))
}

fn case1_margins() -> Outcome {
    let mut parts = Vec::new();
    for n in [50_217u64, 100_000, 1_000_000, 1_000_000_000] {
        let m = case1_margin(n, BITS).unwrap();
        ensure(m.margin_positive() && m.auxiliaries_hold(), || {
            format!(
                "n={n}: margin {}, aux {} / {}",
                m.margin, m.product_gap, m.cubic_gap
            )
        })?;
        parts.push(format!("{n}: {:.4}", m.margin.lower_f64()));
    }
    Ok(format!("margins {}", parts.join(", ")))
}

fn resume_determinism(dir: &Path) -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0010);
    for jobs in [1usize, 4] {
        let full_path = dir.join(format!("full-{jobs}.csv"));
        let mut config = ScanConfig::new(2, 300, &full_path);
        config.jobs = jobs;
        scan(&config).unwrap();
        let reference = std::fs::read(&full_path).unwrap();

        let ckpt = dir.join(format!("resume-{jobs}.ckpt"));
        let out = dir.join(format!("resume-{jobs}.csv"));
        let mut halts: Vec<u64> = (0..3).map(|_| rng.gen_range(3..300)).collect();
        halts.sort_unstable();
        halts.dedup();
        for halt in halts.iter().copied().map(Some).chain([None]) {
            let mut c = ScanConfig::new(2, 300, &out);
            c.jobs = jobs;
            c.checkpoint_path = Some(ckpt.clone());
            c.checkpoint_every = 7;
            c.resume = ckpt.exists();
            c.halt_after = halt;
            let report = scan(&c).unwrap();
            ensure(report.halted == halt.is_some(), || {
                format!("halt at {halt:?} ignored")
            })?;
        }
        let resumed = std::fs::read(&out).unwrap();
        ensure(resumed == reference, || {
            format!("jobs={jobs}, halts {halts:?}: reports differ")
        })?;
    }
    Ok("byte-identical reports for jobs 1 and 4".into())
}

fn k_cap_at_scan_end() -> Outcome {
    let k = k_cap(13_542);
    ensure(k == 28, || format!("k_cap(13542) = {k}"))?;
    Ok("k_cap(13542) = 28".into())
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Criterion> = vec![
        ("golden tables", Box::new(golden_tables)),
        (
            "desk-scale scan to 500",
            Box::new(|| desk_scale_scan(dir.path())),
        ),
        (
            "oracle equivalence",
            Box::new(|| oracle_equivalence(dir.path())),
        ),
        ("closed forms", Box::new(closed_forms)),
        ("identity suite", Box::new(identity_suite)),
        ("certificate sub-ranges", Box::new(case2_subranges)),
        ("valuation property", Box::new(valuation_property)),
        ("theta bounds", Box::new(theta_bounds)),
        ("large-n margin", Box::new(case1_margins)),
        (
            "resume determinism",
            Box::new(|| resume_determinism(dir.path())),
        ),
        ("k_cap", Box::new(k_cap_at_scan_end)),
    ];
    let mut failed = 0;
    for (idx, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".into()));
        let secs = started.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", idx + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.1}s)", idx + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
