//! Per-digit-position candidate construction.
//!
//! For every digit position `j` the input is projected onto its signed
//! base-`2^k` digits. The distinct digits (multiplicity capped at `r`) form a
//! [`DigitTable`]; the full preimage of each digit forms an [`OrdinalIndex`];
//! every size-`r` multiset of table digits whose sum passes the residue
//! window is collected into a [`DigitTupleSet`].

use rayon::prelude::*;
use serde::Serialize;

use crate::digits::{digit_of, shift_right_sign_preserving, DigitParams, SignedDigit};
use crate::error::{Result, RsumError};

/// Ordinal of an element of the input collection.
pub type Ordinal = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DigitEntry {
    pub digit: SignedDigit,
    pub multiplicity: usize,
}

/// Distinct digit values in increasing order, each with multiplicity in `1..=r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitTable {
    entries: Vec<DigitEntry>,
}

impl DigitTable {
    /// Builds a table from explicit `(digit, multiplicity)` pairs.
    pub fn from_entries(entries: &[(i64, usize)], params: &DigitParams) -> Result<Self> {
        let mut out = Vec::with_capacity(entries.len());
        for &(d, m) in entries {
            if m == 0 || m > params.r {
                return Err(RsumError::domain(format!(
                    "multiplicity {m} of digit {d} is outside 1..={}",
                    params.r
                )));
            }
            out.push(DigitEntry { digit: SignedDigit::new(d, params.k)?, multiplicity: m });
        }
        out.sort_by_key(|e| e.digit);
        if out.windows(2).any(|w| w[0].digit == w[1].digit) {
            return Err(RsumError::domain("duplicate digit in table"));
        }
        Ok(DigitTable { entries: out })
    }

    pub fn entries(&self) -> &[DigitEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Raises every multiplicity to `r`, so a single element may fill every
    /// slot of a tuple.
    pub fn saturated(&self, r: usize) -> DigitTable {
        DigitTable {
            entries: self
                .entries
                .iter()
                .map(|e| DigitEntry { digit: e.digit, multiplicity: r })
                .collect(),
        }
    }

    pub fn contains(&self, digit: SignedDigit) -> bool {
        self.entries.binary_search_by_key(&digit, |e| e.digit).is_ok()
    }
}

/// Digit value to the ascending list of every ordinal carrying that digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalIndex {
    groups: Vec<(SignedDigit, Vec<Ordinal>)>,
}

impl OrdinalIndex {
    pub fn get(&self, digit: SignedDigit) -> Option<&[Ordinal]> {
        self.groups
            .binary_search_by_key(&digit, |g| g.0)
            .ok()
            .map(|i| self.groups[i].1.as_slice())
    }

    pub fn groups(&self) -> &[(SignedDigit, Vec<Ordinal>)] {
        &self.groups
    }

    /// Total ordinals stored across all groups.
    pub fn stored_ordinals(&self) -> usize {
        self.groups.iter().map(|g| g.1.len()).sum()
    }
}

/// Accepted digit multisets, each stored as an ascending `r`-list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitTupleSet {
    r: usize,
    strict: bool,
    digits: Vec<SignedDigit>,
}

impl DigitTupleSet {
    pub fn arity(&self) -> usize {
        self.r
    }

    pub fn strict(&self) -> bool {
        self.strict
    }

    pub fn len(&self) -> usize {
        self.digits.len() / self.r
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[SignedDigit]> + '_ {
        self.digits.chunks_exact(self.r)
    }

    pub fn to_vecs(&self) -> Vec<Vec<i64>> {
        self.iter().map(|t| t.iter().map(|d| d.get()).collect()).collect()
    }
}

/// Settings of one filter pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PassConfig {
    /// Magnitude-truncating right shift applied to every element first.
    pub shift_bits: u32,
    /// Exact zero residue at `j = 0` instead of the window test.
    pub j0_strict: bool,
    /// Lift the multiplicity cap so tuples may reuse one element.
    pub allow_repeats: bool,
}

impl PassConfig {
    /// The three passes of the solver: shifts `0`, `log_r`, `2*log_r`, with
    /// the exact test at `j = 0` only on the unshifted pass.
    pub fn standard(r: usize, allow_repeats: bool) -> Result<[PassConfig; 3]> {
        let log_r = DigitParams::new(r, 0)?.log_r;
        Ok([0, log_r, 2 * log_r].map(|shift_bits| PassConfig {
            shift_bits,
            j0_strict: shift_bits == 0,
            allow_repeats,
        }))
    }
}

/// Output of the filter at one digit position.
#[derive(Debug, Clone)]
pub struct PositionOutput {
    pub j: u32,
    pub table: DigitTable,
    pub index: OrdinalIndex,
    pub tuples: DigitTupleSet,
}

/// Output of one full filter pass.
#[derive(Debug, Clone)]
pub struct PassOutput {
    pub config: PassConfig,
    /// Layout computed from the shifted values.
    pub params: DigitParams,
    pub positions: Vec<PositionOutput>,
}

impl PassOutput {
    pub fn stored_ordinals(&self) -> usize {
        self.positions.iter().map(|p| p.index.stored_ordinals()).sum()
    }
}

/// Digit table and full ordinal index of `omega` at position `j`.
pub fn build_digit_table(omega: &[i64], params: &DigitParams, j: u32) -> (DigitTable, OrdinalIndex) {
    let mut keyed: Vec<(i64, Ordinal)> = omega
        .iter()
        .enumerate()
        .map(|(i, &z)| (digit_of(z, params.k, j), i as Ordinal))
        .collect();
    keyed.sort_unstable();

    let mut entries = Vec::new();
    let mut groups: Vec<(SignedDigit, Vec<Ordinal>)> = Vec::new();
    for chunk in keyed.chunk_by(|a, b| a.0 == b.0) {
        let digit = SignedDigit::new(chunk[0].0, params.k).expect("projected digit fits");
        entries.push(DigitEntry { digit, multiplicity: chunk.len().min(params.r) });
        groups.push((digit, chunk.iter().map(|&(_, o)| o).collect()));
    }
    (DigitTable { entries }, OrdinalIndex { groups })
}

/// Every size-`r` multiset over `table` (respecting multiplicities) whose
/// digit sum passes the window test, in lexicographic order.
pub fn enumerate_accepted_tuples(table: &DigitTable, params: &DigitParams, strict: bool) -> DigitTupleSet {
    let r = params.r;
    let radix = params.radix();
    let residues: Vec<i64> = if strict {
        vec![0]
    } else {
        let r = r as i64;
        (0..r).chain(radix - r + 1..radix).collect()
    };

    let mut search = TupleSearch {
        entries: &table.entries,
        r,
        radix,
        residues: &residues,
        budget: table.entries.iter().map(|e| e.multiplicity).collect(),
        prefix: Vec::with_capacity(r),
        last: Vec::new(),
        out: Vec::new(),
    };
    if !table.entries.is_empty() {
        search.descend(0, 0);
    }
    DigitTupleSet { r, strict, digits: search.out }
}

struct TupleSearch<'a> {
    entries: &'a [DigitEntry],
    r: usize,
    radix: i64,
    residues: &'a [i64],
    budget: Vec<usize>,
    prefix: Vec<usize>,
    last: Vec<usize>,
    out: Vec<SignedDigit>,
}

impl TupleSearch<'_> {
    fn descend(&mut self, start: usize, sum: i64) {
        if self.prefix.len() + 1 == self.r {
            self.complete(start, sum);
            return;
        }
        for i in start..self.entries.len() {
            if self.budget[i] == 0 {
                continue;
            }
            self.budget[i] -= 1;
            self.prefix.push(i);
            self.descend(i, sum + self.entries[i].digit.get());
            self.prefix.pop();
            self.budget[i] += 1;
        }
    }

    // The final digit is pinned to at most two values per accepted residue,
    // so it is looked up rather than scanned.
    fn complete(&mut self, start: usize, sum: i64) {
        self.last.clear();
        for &w in self.residues {
            let v = (w - sum).rem_euclid(self.radix);
            for cand in [v, v - self.radix] {
                if cand <= -self.radix {
                    continue;
                }
                if let Ok(i) = self.entries.binary_search_by_key(&cand, |e| e.digit.get()) {
                    if i >= start && self.budget[i] > 0 {
                        self.last.push(i);
                    }
                }
            }
        }
        self.last.sort_unstable();
        self.last.dedup();
        for &i in &self.last {
            self.out.extend(self.prefix.iter().map(|&p| self.entries[p].digit));
            self.out.push(self.entries[i].digit);
        }
    }
}

/// Runs one filter pass over `omega` for arity `r`.
///
/// The layout (`l`, `j_max`) is recomputed from the shifted values.
pub fn run_filter_pass(omega: &[i64], r: usize, config: PassConfig) -> Result<PassOutput> {
    if omega.is_empty() {
        return Err(RsumError::domain("filter pass over an empty collection"));
    }
    let shifted: Vec<i64> = omega
        .iter()
        .map(|&z| shift_right_sign_preserving(z, config.shift_bits))
        .collect();
    let params = DigitParams::for_values(r, &shifted)?;

    let positions = (0..=params.j_max)
        .into_par_iter()
        .map(|j| {
            let (table, index) = build_digit_table(&shifted, &params, j);
            let strict = j == 0 && config.j0_strict;
            let tuples = if config.allow_repeats {
                enumerate_accepted_tuples(&table.saturated(r), &params, strict)
            } else {
                enumerate_accepted_tuples(&table, &params, strict)
            };
            PositionOutput { j, table, index, tuples }
        })
        .collect();

    Ok(PassOutput { config, params, positions })
}
