//! Candidate r-tuples in ordinal space.
//!
//! A [`TupleTable`] holds `r` columns of ordinals and stands for every
//! sorted tuple that picks one ordinal per column (distinct ordinals unless
//! repeats are allowed). Tables coming from different digit positions and
//! passes are intersected column by column under every matching of columns,
//! which keeps the represented candidate set exactly equal to the
//! intersection of the inputs' candidate sets.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, RsumError};
use crate::filter::{DigitTupleSet, OrdinalIndex, Ordinal};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TupleTable {
    columns: Vec<Vec<Ordinal>>,
}

impl TupleTable {
    /// Validates that every column is nonempty and strictly increasing.
    pub fn new(columns: Vec<Vec<Ordinal>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(RsumError::domain("table without columns"));
        }
        for (m, col) in columns.iter().enumerate() {
            if col.is_empty() {
                return Err(RsumError::domain(format!("column {m} is empty")));
            }
            if col.windows(2).any(|w| w[0] >= w[1]) {
                return Err(RsumError::domain(format!("column {m} is not strictly increasing")));
            }
        }
        Ok(TupleTable { columns })
    }

    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<Ordinal>] {
        &self.columns
    }

    /// Product of column lengths, saturating.
    pub fn variants(&self) -> u64 {
        self.columns
            .iter()
            .fold(1u64, |acc, c| acc.saturating_mul(c.len() as u64))
    }

    fn canonical(&self) -> Vec<Vec<Ordinal>> {
        let mut cols = self.columns.clone();
        cols.sort_unstable();
        cols
    }

    /// Whether the sorted tuple `tuple` is one of this table's candidates.
    pub fn admits(&self, tuple: &[Ordinal], allow_repeats: bool) -> bool {
        if tuple.len() != self.arity() {
            return false;
        }
        if !allow_repeats && tuple.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        fn assign(cols: &[Vec<Ordinal>], tuple: &[Ordinal], pos: usize, used: &mut [bool]) -> bool {
            if pos == tuple.len() {
                return true;
            }
            for (m, col) in cols.iter().enumerate() {
                if !used[m] && col.binary_search(&tuple[pos]).is_ok() {
                    used[m] = true;
                    if assign(cols, tuple, pos + 1, used) {
                        return true;
                    }
                    used[m] = false;
                }
            }
            false
        }
        assign(&self.columns, tuple, 0, &mut vec![false; self.arity()])
    }

    fn collect_candidates(&self, allow_repeats: bool, out: &mut BTreeSet<Vec<Ordinal>>) {
        fn rec(
            cols: &[Vec<Ordinal>],
            m: usize,
            allow_repeats: bool,
            cur: &mut Vec<Ordinal>,
            out: &mut BTreeSet<Vec<Ordinal>>,
        ) {
            if m == cols.len() {
                let mut t = cur.clone();
                t.sort_unstable();
                out.insert(t);
                return;
            }
            for &o in &cols[m] {
                if !allow_repeats && cur.contains(&o) {
                    continue;
                }
                cur.push(o);
                rec(cols, m + 1, allow_repeats, cur, out);
                cur.pop();
            }
        }
        rec(&self.columns, 0, allow_repeats, &mut Vec::with_capacity(self.arity()), out);
    }
}

/// A union of tuple tables sharing one arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleTableSet {
    r: usize,
    tables: Vec<TupleTable>,
}

impl TupleTableSet {
    pub fn empty(r: usize) -> Self {
        TupleTableSet { r, tables: Vec::new() }
    }

    /// Collects tables, dropping exact duplicates (first occurrence kept).
    pub fn new(r: usize, tables: Vec<TupleTable>) -> Result<Self> {
        if let Some(t) = tables.iter().find(|t| t.arity() != r) {
            return Err(RsumError::domain(format!(
                "table of arity {} in a set of arity {r}",
                t.arity()
            )));
        }
        Ok(Self::dedup(r, tables))
    }

    fn dedup(r: usize, tables: Vec<TupleTable>) -> Self {
        let mut seen = HashSet::with_capacity(tables.len());
        let tables = tables.into_iter().filter(|t| seen.insert(t.canonical())).collect();
        TupleTableSet { r, tables }
    }

    pub fn arity(&self) -> usize {
        self.r
    }

    pub fn tables(&self) -> &[TupleTable] {
        &self.tables
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    /// Every represented sorted ordinal tuple.
    pub fn candidates(&self, allow_repeats: bool) -> BTreeSet<Vec<Ordinal>> {
        let mut out = BTreeSet::new();
        for t in &self.tables {
            t.collect_candidates(allow_repeats, &mut out);
        }
        out
    }

    pub fn admits(&self, tuple: &[Ordinal], allow_repeats: bool) -> bool {
        self.tables.iter().any(|t| t.admits(tuple, allow_repeats))
    }
}

/// Turns accepted digit multisets into tables: column `m` of a table is the
/// full ordinal group of the multiset's `m`-th digit.
pub fn materialize(tuples: &DigitTupleSet, index: &OrdinalIndex) -> Result<TupleTableSet> {
    let r = tuples.arity();
    let mut tables = Vec::with_capacity(tuples.len());
    for digits in tuples.iter() {
        let columns = digits
            .iter()
            .map(|&d| {
                index.get(d).map(<[Ordinal]>::to_vec).ok_or_else(|| {
                    RsumError::Consistency(format!("digit {d} has no ordinal group"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        tables.push(TupleTable { columns });
    }
    // distinct multisets give distinct column lists, so no dedup is needed
    Ok(TupleTableSet { r, tables })
}

/// Sorted-list intersection; switches to binary search when one side is
/// much shorter.
fn intersect_sorted(a: &[Ordinal], b: &[Ordinal]) -> Vec<Ordinal> {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut out = Vec::new();
    if small.len() * 16 < large.len() {
        let mut rest = large;
        for &x in small {
            match rest.binary_search(&x) {
                Ok(i) => {
                    out.push(x);
                    rest = &rest[i + 1..];
                }
                Err(i) => rest = &rest[i..],
            }
        }
        return out;
    }
    let (mut i, mut j) = (0, 0);
    while i < small.len() && j < large.len() {
        match small[i].cmp(&large[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(small[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn sorted_overlap(a: &[Ordinal], b: &[Ordinal]) -> bool {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if small.len() * 16 < large.len() {
        return small.iter().any(|x| large.binary_search(x).is_ok());
    }
    let (mut i, mut j) = (0, 0);
    while i < small.len() && j < large.len() {
        match small[i].cmp(&large[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Emits `a ∩ π(b)` for every column matching `π` with `π(pivot) = first`
/// that leaves no column empty.
fn matchings(a: &TupleTable, b: &TupleTable, pivot: usize, first: usize, out: &mut Vec<TupleTable>) {
    let r = a.arity();
    let mut assigned = vec![usize::MAX; r];
    assigned[pivot] = first;
    let mut used = vec![false; r];
    used[first] = true;

    fn rec(
        a: &TupleTable,
        b: &TupleTable,
        m: usize,
        assigned: &mut [usize],
        used: &mut [bool],
        out: &mut Vec<TupleTable>,
    ) {
        let r = assigned.len();
        if m == r {
            let columns = (0..r)
                .map(|i| intersect_sorted(&a.columns[i], &b.columns[assigned[i]]))
                .collect();
            out.push(TupleTable { columns });
            return;
        }
        if assigned[m] != usize::MAX {
            rec(a, b, m + 1, assigned, used, out);
            return;
        }
        for c in 0..r {
            if !used[c] && sorted_overlap(&a.columns[m], &b.columns[c]) {
                used[c] = true;
                assigned[m] = c;
                rec(a, b, m + 1, assigned, used, out);
                assigned[m] = usize::MAX;
                used[c] = false;
            }
        }
    }
    rec(a, b, 0, &mut assigned, &mut used, out);
}

/// Columnwise intersections of `a` with every column permutation of `b`,
/// keeping only those with no empty column.
pub fn intersect_tables(a: &TupleTable, b: &TupleTable) -> TupleTableSet {
    let r = a.arity();
    assert_eq!(r, b.arity(), "tables of different arity");
    let mut out = Vec::new();
    for first in 0..r {
        if sorted_overlap(&a.columns[0], &b.columns[first]) {
            matchings(a, b, 0, first, &mut out);
        }
    }
    TupleTableSet::dedup(r, out)
}

/// Pairwise table intersection of two sets, deduplicated.
///
/// An inverted index over `b` restricts each table of `a` to the tables of
/// `b` that share an ordinal with its shortest column.
pub fn intersect_sets(a: &TupleTableSet, b: &TupleTableSet) -> TupleTableSet {
    let r = a.r;
    assert_eq!(r, b.r, "table sets of different arity");
    if a.is_empty() || b.is_empty() {
        return TupleTableSet::empty(r);
    }
    if let (Some(pa), Some(pb)) = (Partitioned::of(a), Partitioned::of(b)) {
        return intersect_partitioned(r, &pa, &pb);
    }
    intersect_sets_by_matching(a, b)
}

fn intersect_sets_by_matching(a: &TupleTableSet, b: &TupleTableSet) -> TupleTableSet {
    let r = a.r;

    let max_ordinal = b
        .tables
        .iter()
        .flat_map(|t| t.columns.iter().filter_map(|c| c.last()))
        .copied()
        .max()
        .unwrap_or(0) as usize;
    let mut inverted: Vec<Vec<(u32, u32)>> = vec![Vec::new(); max_ordinal + 1];
    for (bi, t) in b.tables.iter().enumerate() {
        for (c, col) in t.columns.iter().enumerate() {
            for &o in col {
                inverted[o as usize].push((bi as u32, c as u32));
            }
        }
    }

    let per_table: Vec<Vec<TupleTable>> = a
        .tables
        .par_iter()
        .map(|ta| {
            let pivot = (0..r).min_by_key(|&m| ta.columns[m].len()).unwrap_or(0);
            let mut hits: Vec<(u32, u32)> = ta.columns[pivot]
                .iter()
                .filter(|&&o| (o as usize) <= max_ordinal)
                .flat_map(|&o| inverted[o as usize].iter().copied())
                .collect();
            hits.sort_unstable();
            hits.dedup();
            let mut out = Vec::new();
            for (bi, c) in hits {
                matchings(ta, &b.tables[bi as usize], pivot, c as usize, &mut out);
            }
            out
        })
        .collect();

    TupleTableSet::dedup(r, per_table.into_iter().flatten().collect())
}

/// Intersection of several sets, smallest first.
const NO_CLASS: u32 = u32::MAX;

/// A table set whose columns are blocks of one partition: any two columns
/// are equal or disjoint. Digit-group tables have this shape, and so does
/// every intersection of such sets.
struct Partitioned<'a> {
    class_of: Vec<u32>,
    classes: Vec<&'a [Ordinal]>,
    /// Class ids per table, in column order.
    tables: Vec<Vec<u32>>,
}

impl<'a> Partitioned<'a> {
    fn of(set: &'a TupleTableSet) -> Option<Self> {
        let max = set
            .tables
            .iter()
            .flat_map(|t| t.columns.iter().filter_map(|c| c.last()))
            .copied()
            .max()?;
        let mut class_of = vec![NO_CLASS; max as usize + 1];
        let mut classes: Vec<&[Ordinal]> = Vec::new();
        let mut tables = Vec::with_capacity(set.tables.len());
        for t in &set.tables {
            let mut ids = Vec::with_capacity(t.columns.len());
            for col in &t.columns {
                let id = class_of[col[0] as usize];
                if id == NO_CLASS {
                    let id = classes.len() as u32;
                    for &o in col {
                        if class_of[o as usize] != NO_CLASS {
                            return None;
                        }
                        class_of[o as usize] = id;
                    }
                    classes.push(col);
                    ids.push(id);
                } else if classes[id as usize] == col.as_slice() {
                    ids.push(id);
                } else {
                    return None;
                }
            }
            tables.push(ids);
        }
        Some(Partitioned { class_of, classes, tables })
    }

    fn class(&self, o: Ordinal) -> u32 {
        self.class_of.get(o as usize).copied().unwrap_or(NO_CLASS)
    }
}

/// Blocks of the common refinement inside each class of `a`, tagged with
/// the class of `b` they fall in.
fn refinement_blocks(a: &Partitioned, b: &Partitioned) -> Vec<Vec<(u32, Vec<Ordinal>)>> {
    a.classes
        .iter()
        .map(|class| {
            let mut tagged: Vec<(u32, Ordinal)> = class
                .iter()
                .map(|&o| (b.class(o), o))
                .filter(|&(c, _)| c != NO_CLASS)
                .collect();
            tagged.sort_unstable();
            let mut blocks: Vec<(u32, Vec<Ordinal>)> = Vec::new();
            for (c, o) in tagged {
                match blocks.last_mut() {
                    Some((last, ords)) if *last == c => ords.push(o),
                    _ => blocks.push((c, vec![o])),
                }
            }
            blocks
        })
        .collect()
}

/// Number of block choices when enumerating from the tables of `p`.
fn choice_count(p: &Partitioned, blocks: &[Vec<(u32, Vec<Ordinal>)>]) -> u64 {
    p.tables
        .iter()
        .map(|ids| {
            ids.iter()
                .fold(1u64, |acc, &c| acc.saturating_mul(blocks[c as usize].len() as u64))
        })
        .fold(0u64, u64::saturating_add)
}

/// Intersection of two partition-shaped sets. Each output column is a block
/// of the common refinement; a choice of blocks is kept when its projections
/// onto both partitions are tables of the respective inputs. This yields the
/// same tables as trying every column matching, without the pairwise search.
/// Choices are enumerated from whichever side has fewer of them, and output
/// tables follow that side's column order.
fn intersect_partitioned(r: usize, a: &Partitioned, b: &Partitioned) -> TupleTableSet {
    let blocks_a = refinement_blocks(a, b);
    let blocks_b = refinement_blocks(b, a);
    let (driver, blocks, other) = if choice_count(b, &blocks_b) < choice_count(a, &blocks_a) {
        (b, blocks_b, a)
    } else {
        (a, blocks_a, b)
    };
    let other_tables: HashSet<Vec<u32>> = other
        .tables
        .iter()
        .map(|ids| {
            let mut ids = ids.clone();
            ids.sort_unstable();
            ids
        })
        .collect();

    let tables: Vec<TupleTable> = driver
        .tables
        .par_iter()
        .flat_map_iter(|ids| {
            // repeated classes pick blocks in nondecreasing order so each
            // multiset of blocks comes out once
            let prev_same: Vec<Option<usize>> = (0..r)
                .map(|i| (0..i).rev().find(|&p| ids[p] == ids[i]))
                .collect();
            let mut search = BlockSearch {
                ids,
                blocks: &blocks,
                prev_same: &prev_same,
                other_tables: &other_tables,
                choice: vec![0; r],
                key: vec![0; r],
                sorted: Vec::with_capacity(r),
                out: Vec::new(),
            };
            search.run(0);
            search.out
        })
        .collect();
    TupleTableSet { r, tables }
}

struct BlockSearch<'a> {
    ids: &'a [u32],
    blocks: &'a [Vec<(u32, Vec<Ordinal>)>],
    prev_same: &'a [Option<usize>],
    other_tables: &'a HashSet<Vec<u32>>,
    choice: Vec<usize>,
    key: Vec<u32>,
    sorted: Vec<u32>,
    out: Vec<TupleTable>,
}

impl BlockSearch<'_> {
    fn run(&mut self, i: usize) {
        let r = self.ids.len();
        if i == r {
            self.sorted.clear();
            self.sorted.extend_from_slice(&self.key);
            self.sorted.sort_unstable();
            if self.other_tables.contains(self.sorted.as_slice()) {
                let columns = (0..r)
                    .map(|m| self.blocks[self.ids[m] as usize][self.choice[m]].1.clone())
                    .collect();
                self.out.push(TupleTable { columns });
            }
            return;
        }
        let class = self.ids[i] as usize;
        let start = self.prev_same[i].map_or(0, |p| self.choice[p]);
        for c in start..self.blocks[class].len() {
            self.choice[i] = c;
            self.key[i] = self.blocks[class][c].0;
            self.run(i + 1);
        }
    }
}

pub fn intersect_all<'a, I>(r: usize, sets: I) -> TupleTableSet
where
    I: IntoIterator<Item = &'a TupleTableSet>,
{
    let mut sets: Vec<&TupleTableSet> = sets.into_iter().collect();
    // stable: ties keep their given order
    sets.sort_by_key(|s| s.len());
    let mut iter = sets.into_iter();
    let Some(first) = iter.next() else {
        return TupleTableSet::empty(r);
    };
    let mut acc = first.clone();
    for s in iter {
        if acc.is_empty() {
            break;
        }
        acc = intersect_sets(&acc, s);
    }
    acc
}

/// Block-wise intersections over passes and digit positions.
///
/// `per_pass[i][j]` is the table set of pass `i` at digit `j`. Passes are
/// truncated to their common digit range; block `s` spans digits
/// `s*h .. (s+1)*h` and the trailing partial block is kept.
pub fn group_gamma(per_pass: &[Vec<TupleTableSet>], h: usize) -> Result<Vec<TupleTableSet>> {
    if h == 0 {
        return Err(RsumError::domain("block width must be at least 1"));
    }
    let Some(first) = per_pass.first() else {
        return Ok(Vec::new());
    };
    let r = first.first().map_or(0, |s| s.r);
    let common = per_pass.iter().map(Vec::len).min().unwrap_or(0);
    let blocks = common.div_ceil(h);
    Ok((0..blocks)
        .into_par_iter()
        .map(|s| {
            let js = s * h..((s + 1) * h).min(common);
            intersect_all(r, js.flat_map(|j| per_pass.iter().map(move |pass| &pass[j])))
        })
        .collect())
}

/// Upper bound on the candidates of `set`: sum over tables of the product
/// of column lengths.
pub fn count_variants(set: &TupleTableSet) -> u64 {
    set.tables.iter().fold(0u64, |acc, t| acc.saturating_add(t.variants()))
}

/// How the smallest block intersections are ranked before confluence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionKey {
    /// Fewest tables.
    #[default]
    Tables,
    /// Fewest candidate variants as counted by [`count_variants`].
    Variants,
}

#[derive(Debug, Clone)]
pub struct Confluence {
    /// Block indices in the order they were folded.
    pub selected: Vec<usize>,
    pub theta: TupleTableSet,
}

/// Picks the `count` smallest block intersections (ties to the lower
/// block index) and intersects them in ascending size order.
pub fn select_and_confluence(gammas: &[TupleTableSet], count: usize) -> Result<Confluence> {
    select_and_confluence_by(gammas, count, SelectionKey::Tables)
}

pub fn select_and_confluence_by(
    gammas: &[TupleTableSet],
    count: usize,
    key: SelectionKey,
) -> Result<Confluence> {
    if count == 0 {
        return Err(RsumError::domain("confluence of zero sets"));
    }
    let Some(first) = gammas.first() else {
        return Err(RsumError::domain("no block intersections to select from"));
    };
    let r = first.r;
    let size = |s: &TupleTableSet| match key {
        SelectionKey::Tables => s.len() as u64,
        SelectionKey::Variants => count_variants(s),
    };
    let mut order: Vec<usize> = (0..gammas.len()).collect();
    order.sort_by_key(|&s| (size(&gammas[s]), s));
    order.truncate(count.min(gammas.len()));

    let mut theta = gammas[order[0]].clone();
    for &s in &order[1..] {
        if theta.is_empty() {
            break;
        }
        theta = intersect_sets(&theta, &gammas[s]);
    }
    debug_assert_eq!(theta.r, r);
    Ok(Confluence { selected: order, theta })
}

/// Number of block intersections folded into the confluence:
/// `ceil(log_{ceil(log2 n)} n / 3)`, at least 1.
pub fn default_confluence_count(n: usize) -> usize {
    let base = (n.max(1) as f64).log2().ceil();
    if base < 2.0 {
        return 1;
    }
    let v = ((n as f64).ln() / base.ln() / 3.0).ceil();
    (v as usize).max(1)
}

/// Digit positions per block: `ceil(ceil(log2 log2 n) / (9 r ceil(log2 r)))`,
/// at least 1.
pub fn default_block_width(n: usize, r: usize) -> usize {
    let log_n = (n.max(1) as f64).log2();
    if log_n <= 1.0 {
        return 1;
    }
    let log_log = log_n.log2().ceil();
    let log_r = (r.max(2) as f64).log2().ceil();
    let v = (log_log / (9.0 * r as f64 * log_r)).ceil();
    (v as usize).max(1)
}
