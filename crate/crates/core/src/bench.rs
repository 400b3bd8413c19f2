//! Timing harness producing `family,n,r,algo,phase,median_ms,variant_count` rows.

use std::io::{self, Write};
use std::time::Instant;

use crate::baselines::{brute_force_rsum, meet_in_the_middle_rsum};
use crate::error::Result;
use crate::instance::{generate, Family};
use crate::solver::{run_passes, solve, SolverConfig};

pub const CSV_HEADER: &str = "family,n,r,algo,phase,median_ms,variant_count";

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub r: usize,
    pub bound: u64,
    pub reps: usize,
    pub seed: u64,
    pub solver: SolverConfig,
    /// Time only the filter passes (skip full solves and baselines).
    pub filter_only: bool,
    /// Largest `n` at which the brute-force baseline is timed.
    pub brute_max_n: usize,
}

impl BenchConfig {
    pub fn new(family: Family, sizes: Vec<usize>, r: usize) -> Self {
        BenchConfig {
            family,
            sizes,
            r,
            bound: 1 << 30,
            reps: 3,
            seed: 1,
            solver: SolverConfig::new(r),
            filter_only: false,
            brute_max_n: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub family: String,
    pub n: usize,
    pub r: usize,
    pub algo: &'static str,
    pub phase: &'static str,
    pub median_ms: f64,
    pub variant_count: Option<u64>,
}

impl BenchRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{:.4},{}",
            self.family,
            self.n,
            self.r,
            self.algo,
            self.phase,
            self.median_ms,
            self.variant_count.map(|v| v.to_string()).unwrap_or_default()
        )
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        (xs[mid - 1] + xs[mid]) / 2.0
    }
}

fn time_reps<T>(reps: usize, mut f: impl FnMut() -> Result<T>) -> Result<(f64, T)> {
    let mut samples = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps.max(1) {
        let t = Instant::now();
        let out = f()?;
        samples.push(t.elapsed().as_secs_f64() * 1e3);
        last = Some(out);
    }
    Ok((median(samples), last.expect("at least one repetition")))
}

/// Runs the benchmark; one instance per size, generated from `seed`.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    let family = cfg.family.to_string();
    for &n in &cfg.sizes {
        let inst = generate(&cfg.family, n, cfg.bound, cfg.r, cfg.seed)?;
        let omega = &inst.values;
        let row = |algo, phase, median_ms, variant_count| BenchRow {
            family: family.clone(),
            n,
            r: cfg.r,
            algo,
            phase,
            median_ms,
            variant_count,
        };

        let (ms, _) = time_reps(cfg.reps, || run_passes(omega, cfg.r, cfg.solver.allow_repeated_ordinals))?;
        rows.push(row("solver", "filter", ms, None));
        if cfg.filter_only {
            continue;
        }

        let (ms, report) = time_reps(cfg.reps, || solve(omega, &cfg.solver))?;
        rows.push(row("solver", "solve", ms, Some(report.variant_count)));

        let (ms, _) = time_reps(cfg.reps, || meet_in_the_middle_rsum(omega, cfg.r))?;
        rows.push(row("mitm", "solve", ms, None));

        if n <= cfg.brute_max_n {
            let (ms, _) = time_reps(cfg.reps, || brute_force_rsum(omega, cfg.r, false))?;
            rows.push(row("brute", "solve", ms, None));
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(mut w: W, rows: &[BenchRow]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", row.to_csv())?;
    }
    Ok(())
}

/// Ratios of consecutive filter-phase medians, in size order.
pub fn filter_growth(rows: &[BenchRow]) -> Vec<(usize, usize, f64)> {
    let filter: Vec<&BenchRow> = rows.iter().filter(|r| r.phase == "filter").collect();
    filter
        .windows(2)
        .map(|w| (w[0].n, w[1].n, w[1].median_ms / w[0].median_ms))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_cover_every_size() {
        let mut cfg = BenchConfig::new(Family::Uniform, vec![20, 40], 3);
        cfg.reps = 1;
        cfg.bound = 1000;
        let rows = run_bench(&cfg).unwrap();
        for n in [20, 40] {
            let algos: Vec<_> = rows.iter().filter(|r| r.n == n).map(|r| (r.algo, r.phase)).collect();
            assert!(algos.contains(&("solver", "filter")));
            assert!(algos.contains(&("solver", "solve")));
            assert!(algos.contains(&("mitm", "solve")));
            assert!(algos.contains(&("brute", "solve")));
        }
        let again = run_bench(&cfg).unwrap();
        let vc = |rows: &[BenchRow]| rows.iter().map(|r| r.variant_count).collect::<Vec<_>>();
        assert_eq!(vc(&rows), vc(&again));
    }

    #[test]
    fn csv_layout() {
        let row = BenchRow {
            family: "uniform".into(),
            n: 10,
            r: 3,
            algo: "mitm",
            phase: "solve",
            median_ms: 1.5,
            variant_count: None,
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, &[row]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\nuniform,10,3,mitm,solve,1.5000,\n"));
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
