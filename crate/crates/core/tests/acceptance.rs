//! Acceptance criteria, one line each:
//! `criterion N <name>: PASS|FAIL|SKIP <details>`.
//!
//! Criterion 5 is a stretch case; set `TORSIONLAB_STRETCH=1` to run it.
//! `TORSIONLAB_CRITERIA=1,4` runs a subset.
//! A failure listed in `KNOWN_FAILURES` is still printed as FAIL but does
//! not make the binary exit nonzero; any other failure does.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use torsionlab::catalog::{get_group, GroupId, GroupSpec};
use torsionlab::cover::{build_perm_rep, build_schreier, PermRep, ProjectiveLine};
use torsionlab::experiment::summary::{median, LIMIT};
use torsionlab::experiment::{compute_record, homology_at, io, run_sweep, CoverRecord, SweepConfig};
use torsionlab::gf::primes_in;
use torsionlab::reduction::{enumerate_level_ideals, reduce_generators, LevelIdeal, ReductionError};
use torsionlab::rs::rs_matrix;
use torsionlab::snf::{elementary_divisors, oracle};
use torsionlab::{Int, SparseMatrix};

/// Relative tolerance on reproduced ratios; the volume constants carry
/// ten significant digits.
const RATIO_REL_TOL: f64 = 1e-9;
/// Allowed relative distance of the upper-half median from `1/(6π)`.
const TREND_REL_TOL: f64 = 0.05;
const ORACLE_CASES: usize = 1000;
const ORACLE_DIM: usize = 6;
const ORACLE_BOUND: i64 = 10;
const FROBENIUS_CASES: usize = 20;

/// Criteria this implementation does not meet, and why.
const KNOWN_FAILURES: &[(u32, &str)] = &[(
    6,
    "H2 has Betti-one covers at p = 229 and the ratios near p = 1500 are still about 20% above 1/(6π)",
)];

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Outcome::{Fail, Pass, Skip};

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn levels(g: &GroupSpec, p: u64, max_f: usize) -> Vec<LevelIdeal> {
    match enumerate_level_ideals(g, p, max_f) {
        Ok(l) => l,
        Err(ReductionError::BadPrime { .. }) => Vec::new(),
        Err(e) => panic!("{}: p = {p}: {e}", g.id),
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

fn relator_soundness() -> Outcome {
    let mut count = 0;
    let mut failures = Vec::new();
    for id in GroupId::ALL {
        let g = get_group(id);
        for p in primes_in(2, 500) {
            for l in levels(&g, p, 2) {
                count += 1;
                let red = match reduce_generators(&g, &l) {
                    Ok(r) => r,
                    Err(e) => {
                        failures.push(e.to_string());
                        continue;
                    }
                };
                let rep = build_perm_rep(&red, &ProjectiveLine::new(l.field.clone()));
                for r in &g.presentation.relators {
                    let w = r.letters();
                    if (0..rep.degree as u32).any(|i| rep.apply_word(i, &w) != i) {
                        failures.push(format!("{id} {} relator {}", l.tag(), r.source));
                    }
                }
            }
        }
    }
    check(
        failures.is_empty() && count > 0,
        format!("{count} levels, {} failures {:?}", failures.len(), failures.iter().take(3).collect::<Vec<_>>()),
    )
}

fn snf_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut bad = None;
    for case in 0..ORACLE_CASES {
        let (r, c) = (rng.gen_range(1..=ORACLE_DIM), rng.gen_range(1..=ORACLE_DIM));
        let m: Vec<Vec<i64>> = (0..r)
            .map(|_| (0..c).map(|_| rng.gen_range(-ORACLE_BOUND..=ORACLE_BOUND)).collect())
            .collect();
        let got = elementary_divisors(&SparseMatrix::from_dense(&m));
        let want = oracle::determinantal_report(&m);
        if (got.rank, got.full_divisors()) != want {
            bad = Some(format!("case {case}: {m:?}"));
            break;
        }
    }
    match bad {
        None => Pass(format!("{ORACLE_CASES} matrices up to {ORACLE_DIM}x{ORACLE_DIM}, entries |x| <= {ORACLE_BOUND}")),
        Some(b) => Fail(b),
    }
}

fn index_one() -> Outcome {
    let mut mismatches = Vec::new();
    let mut h2 = String::new();
    for id in GroupId::ALL {
        let g = get_group(id);
        let rep = PermRep::from_perms(vec![vec![0]; g.presentation.num_generators()]);
        let s = build_schreier(&rep);
        let m: SparseMatrix = rs_matrix(&g.presentation, &s, &rep).unwrap();
        let got = elementary_divisors(&m);
        let want = oracle::determinantal_report(&g.presentation.exponent_matrix());
        if (got.rank, got.full_divisors()) != want {
            mismatches.push(id.to_string());
        }
        if id == GroupId::H2 {
            let d: Vec<String> = got.full_divisors().iter().map(|x| x.to_string()).collect();
            h2 = format!("H2 rank {} divisors {{{}}}", got.rank, d.join(","));
            if got.rank != 3 || d != ["1", "1", "2"] {
                mismatches.push("H2 values".into());
            }
        }
    }
    check(mismatches.is_empty(), format!("{h2}; mismatches {mismatches:?}"))
}

/// A row of H2 values: the first degree-2 level over `p`. The other levels
/// over `p` are Galois conjugates with the same homology.
fn table_row(p: u64, betti: u64, ratio: f64) -> Outcome {
    let g = get_group(GroupId::H2);
    let ls: Vec<LevelIdeal> = levels(&g, p, 2).into_iter().filter(|l| l.f == 2).collect();
    if ls.is_empty() {
        return Fail(format!("no degree-2 level over {p}"));
    }
    let mut details = vec![format!("{} levels over {p}", ls.len())];
    let mut ok = true;
    for l in &ls[..1] {
        let r = compute_record(&g, l).unwrap();
        let err = rel_err(r.ratio_f64(), ratio);
        ok &= r.norm == p * p && r.index == p * p + 1 && r.betti == betti && err <= RATIO_REL_TOL;
        details.push(format!(
            "{} norm {} index {} betti {} ratio {} (rel. err {err:.1e})",
            r.ideal, r.norm, r.index, r.betti, r.ratio
        ));
    }
    check(ok, details.join("; "))
}

fn small_row() -> Outcome {
    table_row(149, 35, 0.002_234_599_734_292_351)
}

fn rank_zero_row() -> Outcome {
    if std::env::var_os("TORSIONLAB_STRETCH").is_none() {
        return Skip("set TORSIONLAB_STRETCH=1 to run p = 383".into());
    }
    table_row(383, 0, 0.053_181_747_356_915_97)
}

fn trend() -> Outcome {
    let mut cfg = SweepConfig::new(vec![GroupId::H2], 201, 1500);
    cfg.jobs = jobs();
    let recs = run_sweep(&cfg).unwrap().records;
    let positive: Vec<String> = recs
        .iter()
        .filter(|r| r.betti > 0)
        .map(|r| format!("p={} {} betti {}", r.p, r.ideal, r.betti))
        .collect();
    let band = |lo: u64, hi: u64| -> Option<f64> {
        let v: Vec<f64> = recs
            .iter()
            .filter(|r| r.betti == 0 && r.p > lo && r.p <= hi)
            .map(CoverRecord::ratio_f64)
            .collect();
        median(&v)
    };
    let (top_half, top_q, bottom_q) = (band(850, 1500), band(1175, 1500), band(200, 525));
    let (Some(half), Some(tq), Some(bq)) = (top_half, top_q, bottom_q) else {
        return Fail("empty p band".into());
    };
    let dev = rel_err(half, LIMIT);
    let monotone = (tq - LIMIT).abs() < (bq - LIMIT).abs();
    check(
        positive.is_empty() && dev <= TREND_REL_TOL && monotone,
        format!(
            "{} records; betti > 0: {} {:?}; upper-half median {half:.6} is {:.1}% from 1/(6π) (limit {:.0}%); \
             quartile medians {bq:.6} -> {tq:.6} (monotone: {monotone})",
            recs.len(),
            positive.len(),
            positive.iter().take(4).collect::<Vec<_>>(),
            100.0 * dev,
            100.0 * TREND_REL_TOL
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: usize| {
        let path = dir.path().join(name);
        let mut c = SweepConfig::new(vec![GroupId::H3, GroupId::H6], 40, 700);
        c.degrees = vec![1, 2];
        c.max_norm = Some(2500);
        c.jobs = jobs;
        c.out = Some(path.clone());
        let n = run_sweep(&c).unwrap().records.len();
        (n, std::fs::read(&path).unwrap(), std::fs::read(io::skipped_path(&path)).unwrap())
    };
    let (n, a, sa) = run("a.csv", 1);
    let (_, b, sb) = run("b.csv", 4);
    check(
        a == b && sa == sb && n > 0,
        format!("{n} records, jobs 1 vs 4, {} bytes, identical: {}", a.len(), a == b && sa == sb),
    )
}

fn frobenius() -> Outcome {
    let mut pool = Vec::new();
    for id in GroupId::ALL {
        let g = get_group(id);
        for p in primes_in(2, 60) {
            pool.extend(levels(&g, p, 2).into_iter().filter(|l| l.f == 2).map(|l| (id, l)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let picked: Vec<&(GroupId, LevelIdeal)> = pool.choose_multiple(&mut rng, FROBENIUS_CASES).collect();
    let mut bad = Vec::new();
    for (id, l) in &picked {
        let g = get_group(*id);
        let a = homology_at::<Int>(&g, &l.field, &l.roots).unwrap().report;
        let b = homology_at::<Int>(&g, &l.field, &l.frobenius_conjugate()).unwrap().report;
        if (a.betti(), &a.divisors) != (b.betti(), &b.divisors) {
            bad.push(format!("{id} {}", l.tag()));
        }
    }
    let mut groups: Vec<String> = picked.iter().map(|(id, _)| id.to_string()).collect();
    groups.sort();
    groups.dedup();
    check(
        bad.is_empty() && picked.len() == FROBENIUS_CASES,
        format!("{} levels from {} groups, mismatches {bad:?}", picked.len(), groups.len()),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 8] = [
        (1, "relator soundness", relator_soundness),
        (2, "snf oracle", snf_oracle),
        (3, "index-1 identity", index_one),
        (4, "H2 p=149 f=2 row", small_row),
        (5, "H2 p=383 f=2 row", rank_zero_row),
        (6, "limit trend", trend),
        (7, "determinism", determinism),
        (8, "frobenius invariance", frobenius),
    ];
    let only: Option<Vec<u32>> = std::env::var("TORSIONLAB_CRITERIA")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut unexpected = 0;
    for (n, name, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Fail(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let line = match outcome {
            Pass(d) => format!("PASS {d}"),
            Skip(d) => format!("SKIP {d}"),
            Fail(d) => match KNOWN_FAILURES.iter().find(|k| k.0 == n) {
                Some((_, why)) => format!("FAIL {d} [known: {why}]"),
                None => {
                    unexpected += 1;
                    format!("FAIL {d}")
                }
            },
        };
        println!("criterion {n} {name}: {line} ({secs:.1}s)");
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
