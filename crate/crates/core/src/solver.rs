//! End-to-end solver.
//!
//! Three filter passes (shifts `0`, `log_r`, `2*log_r`) produce per-digit
//! candidate tables; these are intersected block-wise into `Γ_s`, the
//! smallest blocks are folded into a confluence `Θ`, and `Θ`'s candidates
//! are checked by direct summation. When `Θ` still represents more
//! candidates than the configured threshold, a baseline algorithm takes
//! over.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{brute_force_rsum, meet_in_the_middle_rsum_with};
use crate::digits::check_bounded;
use crate::error::{Result, RsumError};
use crate::filter::{run_filter_pass, Ordinal, PassConfig, PassOutput};
use crate::tables::{
    count_variants, default_block_width, default_confluence_count, group_gamma, materialize,
    select_and_confluence_by, Confluence, SelectionKey, TupleTableSet,
};

/// Candidate-count threshold above which the filtered candidates are not
/// enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdPolicy {
    /// `n^(3 / 2r)`.
    #[default]
    Primary,
    /// `n^(1/2) / (log2 n)^(1/r)`.
    Secondary,
    Unlimited,
    Fixed(u64),
}

impl ThresholdPolicy {
    /// Threshold for `n` elements and arity `r`; `None` means no limit.
    /// Formula thresholds never drop below 1.
    pub fn value(&self, n: usize, r: usize) -> Option<f64> {
        let nf = n as f64;
        let rf = r as f64;
        match *self {
            ThresholdPolicy::Primary => Some(nf.powf(3.0 / (2.0 * rf)).max(1.0)),
            ThresholdPolicy::Secondary => {
                if n < 2 {
                    return Some(1.0);
                }
                Some((nf.sqrt() / nf.log2().powf(1.0 / rf)).max(1.0))
            }
            ThresholdPolicy::Unlimited => None,
            ThresholdPolicy::Fixed(t) => Some(t as f64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    #[default]
    MeetInTheMiddle,
    BruteForce,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub r: usize,
    /// Let one element fill several slots of a tuple.
    pub allow_repeated_ordinals: bool,
    pub threshold: ThresholdPolicy,
    pub fallback: Fallback,
    pub selection: SelectionKey,
    /// Overrides the number of block intersections folded into `Θ`.
    pub confluence_count: Option<usize>,
    /// Overrides the number of digit positions per block.
    pub block_width: Option<usize>,
}

impl SolverConfig {
    pub fn new(r: usize) -> Self {
        SolverConfig {
            r,
            allow_repeated_ordinals: false,
            threshold: ThresholdPolicy::default(),
            fallback: Fallback::default(),
            selection: SelectionKey::default(),
            confluence_count: None,
            block_width: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassStats {
    pub shift_bits: u32,
    pub j0_strict: bool,
    pub l: u32,
    pub j_max: u32,
    /// Distinct digit values per position.
    pub table_entries: Vec<usize>,
    /// Accepted digit multisets per position.
    pub accepted_tuples: Vec<usize>,
    pub stored_ordinals: usize,
}

impl PassStats {
    fn of(pass: &PassOutput) -> Self {
        PassStats {
            shift_bits: pass.config.shift_bits,
            j0_strict: pass.config.j0_strict,
            l: pass.params.l,
            j_max: pass.params.j_max,
            table_entries: pass.positions.iter().map(|p| p.table.len()).collect(),
            accepted_tuples: pass.positions.iter().map(|p| p.tuples.len()).collect(),
            stored_ordinals: pass.stored_ordinals(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub filter: f64,
    pub intersect: f64,
    pub enumerate: f64,
    pub fallback: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub n: usize,
    pub r: usize,
    /// Polynomial degree of the magnitude bound, when known.
    pub m: Option<u32>,
    pub allow_repeated_ordinals: bool,
    pub pass_stats: Vec<PassStats>,
    pub block_width: usize,
    pub gamma_sizes: Vec<usize>,
    pub gamma_variants: Vec<u64>,
    pub selected_gammas: Vec<usize>,
    pub theta_size: usize,
    pub variant_count: u64,
    pub threshold: Option<f64>,
    pub threshold_exceeded: bool,
    pub fallback: Fallback,
    pub fallback_used: bool,
    pub candidates_checked: usize,
    /// Ordinals held across every ordinal index of every pass.
    pub stored_ordinals: usize,
    pub solutions: Vec<Vec<Ordinal>>,
    pub values: Vec<Vec<i64>>,
    pub timings_ms: Timings,
}

impl SolverReport {
    /// Clears wall-clock fields so reports can be compared.
    pub fn without_timings(mut self) -> Self {
        self.timings_ms = Timings::default();
        self
    }
}

/// Everything the filter stage produces before candidates are enumerated.
#[derive(Debug, Clone)]
pub struct Filtered {
    pub passes: Vec<PassOutput>,
    pub block_width: usize,
    pub gammas: Vec<TupleTableSet>,
    pub confluence: Confluence,
}

/// `true` iff the values at `ordinals` sum to zero.
///
/// Ordinals must be in range and strictly increasing (non-decreasing when
/// repeats are allowed).
pub fn verify_tuple(omega: &[i64], ordinals: &[Ordinal], allow_repeats: bool) -> Result<bool> {
    if let Some(&o) = ordinals.iter().find(|&&o| o as usize >= omega.len()) {
        return Err(RsumError::domain(format!(
            "ordinal {o} out of range for {} elements",
            omega.len()
        )));
    }
    let ordered = ordinals
        .windows(2)
        .all(|w| if allow_repeats { w[0] <= w[1] } else { w[0] < w[1] });
    if !ordered {
        return Err(RsumError::domain(format!("malformed ordinal tuple {ordinals:?}")));
    }
    Ok(ordinals.iter().map(|&o| i128::from(omega[o as usize])).sum::<i128>() == 0)
}

fn validate(omega: &[i64], config: &SolverConfig) -> Result<()> {
    let r = config.r;
    if r < 2 {
        return Err(RsumError::domain(format!("arity must be at least 2, got {r}")));
    }
    if omega.is_empty() || (!config.allow_repeated_ordinals && omega.len() < r) {
        return Err(RsumError::domain(format!(
            "{} elements cannot form a {r}-tuple",
            omega.len()
        )));
    }
    if omega.len() > Ordinal::MAX as usize {
        return Err(RsumError::domain("too many elements for 32-bit ordinals"));
    }
    if config.confluence_count == Some(0) || config.block_width == Some(0) {
        return Err(RsumError::domain("confluence count and block width must be positive"));
    }
    check_bounded(omega, r)
}

/// The three filter passes, run concurrently.
pub fn run_passes(omega: &[i64], r: usize, allow_repeats: bool) -> Result<Vec<PassOutput>> {
    PassConfig::standard(r, allow_repeats)?
        .into_par_iter()
        .map(|cfg| run_filter_pass(omega, r, cfg))
        .collect()
}

/// Runs the filter stage and returns the confluence `Θ` together with every
/// intermediate.
pub fn run_filter(omega: &[i64], config: &SolverConfig) -> Result<Filtered> {
    validate(omega, config)?;
    let passes = run_passes(omega, config.r, config.allow_repeated_ordinals)?;
    intersect_passes(omega.len(), config, passes)
}

fn intersect_passes(n: usize, config: &SolverConfig, passes: Vec<PassOutput>) -> Result<Filtered> {
    let per_pass: Vec<Vec<TupleTableSet>> = passes
        .iter()
        .map(|pass| {
            pass.positions
                .par_iter()
                .map(|p| materialize(&p.tuples, &p.index))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let block_width = config.block_width.unwrap_or_else(|| default_block_width(n, config.r));
    let gammas = group_gamma(&per_pass, block_width)?;
    let count = config.confluence_count.unwrap_or_else(|| default_confluence_count(n));
    let confluence = select_and_confluence_by(&gammas, count, config.selection)?;
    Ok(Filtered { passes, block_width, gammas, confluence })
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Solves rSUM on `omega`: returns every sorted ordinal tuple summing to zero.
pub fn solve(omega: &[i64], config: &SolverConfig) -> Result<SolverReport> {
    validate(omega, config)?;
    let start = Instant::now();
    let n = omega.len();
    let r = config.r;
    let repeats = config.allow_repeated_ordinals;
    let mut timings = Timings::default();

    let t = Instant::now();
    let passes = run_passes(omega, r, repeats)?;
    timings.filter = ms(t);

    let t = Instant::now();
    let filtered = intersect_passes(n, config, passes)?;
    timings.intersect = ms(t);

    let theta = &filtered.confluence.theta;
    let variant_count = count_variants(theta);
    let threshold = config.threshold.value(n, r);
    let threshold_exceeded = threshold.is_some_and(|t| variant_count as f64 > t);

    let mut report = SolverReport {
        n,
        r,
        m: None,
        allow_repeated_ordinals: repeats,
        pass_stats: filtered.passes.iter().map(PassStats::of).collect(),
        block_width: filtered.block_width,
        gamma_sizes: filtered.gammas.iter().map(TupleTableSet::len).collect(),
        gamma_variants: filtered.gammas.iter().map(count_variants).collect(),
        selected_gammas: filtered.confluence.selected.clone(),
        theta_size: theta.len(),
        variant_count,
        threshold,
        threshold_exceeded,
        fallback: config.fallback,
        fallback_used: false,
        candidates_checked: 0,
        stored_ordinals: filtered.passes.iter().map(PassOutput::stored_ordinals).sum(),
        solutions: Vec::new(),
        values: Vec::new(),
        timings_ms: Timings::default(),
    };

    let candidates: Vec<Vec<Ordinal>> = if threshold_exceeded {
        let t = Instant::now();
        let found = match config.fallback {
            Fallback::MeetInTheMiddle => meet_in_the_middle_rsum_with(omega, r, repeats)?,
            Fallback::BruteForce => brute_force_rsum(omega, r, repeats)?,
            Fallback::None => {
                timings.total = ms(start);
                report.timings_ms = timings;
                return Err(RsumError::Capacity {
                    variants: variant_count,
                    threshold: threshold.unwrap_or(f64::INFINITY),
                    report: Box::new(report),
                });
            }
        };
        timings.fallback = ms(t);
        report.fallback_used = true;
        found
    } else {
        let t = Instant::now();
        let c = theta.candidates(repeats).into_iter().collect();
        timings.enumerate = ms(t);
        c
    };

    report.candidates_checked = candidates.len();
    let verified: Vec<bool> = candidates
        .par_iter()
        .map(|c| verify_tuple(omega, c, repeats))
        .collect::<Result<_>>()?;
    report.solutions = candidates
        .into_iter()
        .zip(verified)
        .filter_map(|(c, ok)| ok.then_some(c))
        .collect();
    report.values = report
        .solutions
        .iter()
        .map(|s| s.iter().map(|&o| omega[o as usize]).collect())
        .collect();

    timings.total = ms(start);
    report.timings_ms = timings;
    Ok(report)
}
