//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use rsum_core::bench::{filter_growth, run_bench, write_csv, BenchConfig};
use rsum_core::instance::{generate, InstanceRng};
use rsum_core::tables::intersect_sets;
use rsum_core::{
    brute_force_rsum, ceil_log2, gen_planted, Fallback, RsumError, meet_in_the_middle_rsum, run_filter, solve, Family,
    Ordinal, SolverConfig, ThresholdPolicy, TupleTable, TupleTableSet,
};

use common::{brute_candidates, shifted, window_violations, zero_sum_tuple};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

// 1. filtered solver vs exhaustive search
fn oracle_equivalence() -> Outcome {
    const PER_CONFIG: u64 = 500;
    let families = [Family::Uniform, Family::Planted, Family::NoSolution, Family::Adversarial];
    let mut mismatches = Vec::new();
    let mut instances = 0;
    let start = Instant::now();
    for r in [3, 4] {
        for family in &families {
            for seed in 0..PER_CONFIG {
                let n = 5 + (seed % 20) as usize;
                let inst = generate(family, n, 1 << 16, r, seed).unwrap();
                let expected = brute_force_rsum(&inst.values, r, false).unwrap();
                for threshold in [ThresholdPolicy::Primary, ThresholdPolicy::Unlimited] {
                    let config = SolverConfig { threshold, ..SolverConfig::new(r) };
                    let got = solve(&inst.values, &config).unwrap().solutions;
                    if got != expected {
                        mismatches.push(format!("{family} r={r} seed={seed} {threshold:?}"));
                    }
                }
                instances += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        mismatches.is_empty() && secs < 300.0,
        format!(
            "{instances} instances (r in {{3,4}}, 4 families, {PER_CONFIG} each, n 5..=24, bound 2^16), \
             default and unlimited thresholds; {} mismatches; {secs:.1}s (limit 300s) {:?}",
            mismatches.len(),
            &mismatches[..mismatches.len().min(3)]
        ),
    )
}

const ARITIES: [usize; 5] = [2, 3, 4, 5, 8];
const TUPLES: u64 = 100_000;

/// Zero-sum tuple number `i`, with magnitudes up to `2^60 / r`.
fn tuple(i: u64) -> Vec<i64> {
    let r = ARITIES[(i % ARITIES.len() as u64) as usize];
    let mut rng = InstanceRng::new(0x5eed_0000 + i);
    let max_bits = 60 - ceil_log2(r as u64).unwrap();
    let bits = 1 + (rng.next_u64() % u64::from(max_bits)) as u32;
    zero_sum_tuple(&mut rng, r, bits)
}

// 2. unshifted digit sums of zero-sum tuples
fn window_invariant() -> Outcome {
    let violations = (0..TUPLES).filter(|&i| !window_violations(&tuple(i), true).is_empty()).count();
    outcome(
        violations == 0,
        format!("{TUPLES} zero-sum tuples, r in {ARITIES:?}; {violations} violations (strict at j=0)"),
    )
}

// 3. shifted digit sums of zero-sum tuples
fn shifted_window_invariant() -> Outcome {
    let mut checks = 0;
    let mut violations = 0;
    for i in 0..TUPLES {
        let ys = tuple(i);
        let log_r = ceil_log2(ys.len() as u64).unwrap();
        for t in [log_r, 2 * log_r, 7] {
            checks += 1;
            if !window_violations(&shifted(&ys, t), false).is_empty() {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0,
        format!("{checks} shifted tuples (t in {{log r, 2 log r, 7}}); {violations} violations"),
    )
}

/// Instance size and bound for planted run `i` of arity `r`. Most runs are
/// small; every schedule reaches n = 1000.
fn planted_schedule(r: usize, i: usize) -> (usize, u64) {
    let n = match i {
        0..=9 => 1000,
        10..=29 => 300,
        30..=99 => 100,
        _ => 5 + i % 60,
    };
    let bound = match r {
        3 => 1 << 16,
        4 if n <= 100 => 1 << 10,
        4 => 1 << 6,
        _ if n <= 24 => 1 << 8,
        _ => 1 << 5,
    };
    (n, bound)
}

// 4. planted tuple representable in the confluence before verification
fn filter_completeness() -> Outcome {
    const RUNS: usize = 1000;
    let mut misses = Vec::new();
    let mut parts = Vec::new();
    for r in [3, 4, 5] {
        let start = Instant::now();
        for i in 0..RUNS {
            let (n, bound) = planted_schedule(r, i);
            let (inst, planted) = gen_planted(n, bound, r, i as u64).unwrap();
            let filtered = run_filter(&inst.values, &SolverConfig::new(r)).unwrap();
            if !filtered.confluence.theta.admits(&planted, false) {
                misses.push(format!("r={r} n={n} seed={i}"));
            }
        }
        parts.push(format!("r={r} {:.1}s", start.elapsed().as_secs_f64()));
    }
    outcome(
        misses.is_empty(),
        format!(
            "{RUNS} planted runs per r in {{3,4,5}}, n up to 1000; {} misses; {} {:?}",
            misses.len(),
            parts.join(", "),
            &misses[..misses.len().min(3)]
        ),
    )
}

/// Every table over `cols` columns drawn from `columns`, as unordered
/// column multisets.
fn all_tables(r: usize, columns: &[Vec<Ordinal>]) -> Vec<TupleTable> {
    fn rec(r: usize, from: usize, columns: &[Vec<Ordinal>], cur: &mut Vec<Vec<Ordinal>>, out: &mut Vec<TupleTable>) {
        if cur.len() == r {
            out.push(TupleTable::new(cur.clone()).unwrap());
            return;
        }
        for i in from..columns.len() {
            cur.push(columns[i].clone());
            rec(r, i, columns, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(r, 0, columns, &mut Vec::new(), &mut out);
    out
}

fn nonempty_subsets(universe: Ordinal) -> Vec<Vec<Ordinal>> {
    (1u32..1 << universe)
        .map(|mask| (0..universe).filter(|&o| mask & (1 << o) != 0).collect())
        .collect()
}

fn random_set(rng: &mut InstanceRng, r: usize, universe: Ordinal, partitioned: bool) -> TupleTableSet {
    let blocks: Vec<Vec<Ordinal>> = if partitioned {
        let parts = 1 + rng.index(universe as usize);
        let mut blocks = vec![Vec::new(); parts];
        for o in 0..universe {
            blocks[rng.index(parts)].push(o);
        }
        blocks.retain(|b| !b.is_empty());
        blocks
    } else {
        Vec::new()
    };
    let tables = (0..rng.index(4))
        .map(|_| {
            let cols = (0..r)
                .map(|_| {
                    if partitioned {
                        blocks[rng.index(blocks.len())].clone()
                    } else {
                        let mask = 1 + rng.index((1 << universe) - 1) as u32;
                        (0..universe).filter(|&o| mask & (1 << o) != 0).collect()
                    }
                })
                .collect();
            TupleTable::new(cols).unwrap()
        })
        .collect();
    TupleTableSet::new(r, tables).unwrap()
}

fn intersection_agrees(a: &TupleTableSet, b: &TupleTableSet, universe: Ordinal) -> bool {
    let want: BTreeSet<_> = brute_candidates(a, universe)
        .intersection(&brute_candidates(b, universe))
        .cloned()
        .collect();
    brute_candidates(&intersect_sets(a, b), universe) == want
}

// 5. candidate semantics of set intersection
fn intersection_semantics() -> Outcome {
    let mut exhaustive = 0u64;
    let mut sampled = 0u64;
    let mut mismatches = 0u64;

    // exhaustive: every pair of sets with at most `max_tables` tables
    for (r, universe, max_tables) in [(2usize, 3u32, 2usize), (2, 4, 1), (3, 4, 1), (4, 3, 1)] {
        let tables = all_tables(r, &nonempty_subsets(universe));
        let mut sets = vec![TupleTableSet::empty(r)];
        for (i, t) in tables.iter().enumerate() {
            sets.push(TupleTableSet::new(r, vec![t.clone()]).unwrap());
            if max_tables == 2 {
                for u in &tables[i + 1..] {
                    sets.push(TupleTableSet::new(r, vec![t.clone(), u.clone()]).unwrap());
                }
            }
        }
        for a in &sets {
            for b in &sets {
                exhaustive += 1;
                mismatches += u64::from(!intersection_agrees(a, b, universe));
            }
        }
    }

    // sampled: up to 3 tables, r up to 4, ordinals below 8
    let mut rng = InstanceRng::new(5);
    for i in 0..60_000 {
        let r = 2 + i % 3;
        let partitioned = i % 2 == 0;
        let a = random_set(&mut rng, r, 8, partitioned);
        let b = random_set(&mut rng, r, 8, partitioned);
        sampled += 1;
        mismatches += u64::from(!intersection_agrees(&a, &b, 8));
    }
    outcome(
        mismatches == 0,
        format!(
            "{exhaustive} exhaustive pairs (all sets over small universes) + {sampled} sampled pairs \
             (<=3 tables, r<=4, ordinals<8); {mismatches} mismatches"
        ),
    )
}

// 6. exhaustive search vs meet-in-the-middle
fn baseline_agreement() -> Outcome {
    let mut runs = 0;
    let mut mismatches = 0;
    for seed in 0..200u64 {
        for r in [2, 3, 4, 5] {
            let n = 5 + (seed % 16) as usize;
            let bound = if seed % 2 == 0 { 40 } else { 1 << 16 };
            let inst = generate(&Family::Uniform, n, bound, r, seed).unwrap();
            runs += 1;
            if brute_force_rsum(&inst.values, r, false).unwrap()
                != meet_in_the_middle_rsum(&inst.values, r).unwrap()
            {
                mismatches += 1;
            }
        }
    }
    outcome(mismatches == 0, format!("{runs} runs (200 seeds, r in 2..=5, n<=20); {mismatches} mismatches"))
}

// 7. ordinal storage across passes
fn memory_proportionality() -> Outcome {
    let mut failures = Vec::new();
    let mut runs = 0;
    for (r, bound, sizes) in [
        (3usize, 1u64 << 30, &[10usize, 100, 500][..]),
        (3, 1 << 10, &[10, 100, 500]),
        (4, 1 << 12, &[10, 100]),
        (5, 1 << 5, &[10, 100, 500]),
    ] {
        for &n in sizes {
            let inst = generate(&Family::Uniform, n, bound, r, n as u64).unwrap();
            // stop before enumeration unless nothing survived filtering; the
            // capacity error carries the report
            let config = SolverConfig {
                threshold: ThresholdPolicy::Fixed(0),
                fallback: Fallback::None,
                ..SolverConfig::new(r)
            };
            let report = match solve(&inst.values, &config) {
                Ok(report) => report,
                Err(RsumError::Capacity { report, .. }) => *report,
                other => panic!("expected a capacity stop, got {other:?}"),
            };
            let exact: usize = report.pass_stats.iter().map(|p| n * (p.j_max as usize + 1)).sum();
            let cap = 3 * n * (report.pass_stats[0].j_max as usize + 1);
            runs += 1;
            if report.stored_ordinals != exact || report.stored_ordinals > cap {
                failures.push(format!("r={r} n={n}: {} vs {exact} (cap {cap})", report.stored_ordinals));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{runs} instances; stored ordinals == n * sum(j_max+1) <= 3n(j_max+1); {failures:?}"),
    )
}

// 8. filter-phase scaling
fn filter_scaling() -> Outcome {
    let mut cfg = BenchConfig::new(Family::Uniform, vec![10_000, 20_000, 40_000], 3);
    cfg.filter_only = true;
    cfg.reps = 5;
    let rows = run_bench(&cfg).unwrap();
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("filter_scaling.csv");
    let mut csv = Vec::new();
    write_csv(&mut csv, &rows).unwrap();
    fs::write(&path, csv).unwrap();
    let growth = filter_growth(&rows);
    let ok = growth.len() == 2 && growth.iter().all(|&(_, _, ratio)| ratio <= 3.0);
    let ratios: Vec<String> = growth.iter().map(|(a, b, x)| format!("{a}->{b}: {x:.2}")).collect();
    let medians: Vec<String> = rows.iter().map(|r| format!("{:.1}ms", r.median_ms)).collect();
    outcome(
        ok,
        format!(
            "uniform r=3 medians [{}], ratios [{}] (limit 3.0); csv {}",
            medians.join(", "),
            ratios.join(", "),
            path.display()
        ),
    )
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check); 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("digit window on zero-sum tuples", window_invariant),
        ("digit window after shifts", shifted_window_invariant),
        ("filter completeness on planted instances", filter_completeness),
        ("intersection candidate semantics", intersection_semantics),
        ("brute force vs meet-in-the-middle", baseline_agreement),
        ("stored ordinals per pass and position", memory_proportionality),
        ("filter-phase scaling", filter_scaling),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "{verdict} criterion {} ({name}): {} [{:.1}s]",
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
