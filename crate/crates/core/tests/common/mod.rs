#![allow(dead_code)]

use std::collections::BTreeSet;

use rsum_core::instance::InstanceRng;
use rsum_core::{
    project_digit, shift_right_sign_preserving, window_accepts, DigitParams, Ordinal, TupleTable,
    TupleTableSet,
};

/// A random `r`-tuple summing to zero with magnitudes at most `2^bits`.
pub fn zero_sum_tuple(rng: &mut InstanceRng, r: usize, bits: u32) -> Vec<i64> {
    let cap = 1i64 << bits;
    // r - 1 free values bounded so the balancing value stays within `cap`
    let each = cap / (r as i64 - 1);
    let mut ys: Vec<i64> = (0..r - 1).map(|_| rng.range_i64(-each, each)).collect();
    ys.push(-ys.iter().sum::<i64>());
    // shuffle so the balancing value is not always last
    for i in (1..r).rev() {
        ys.swap(i, rng.index(i + 1));
    }
    ys
}

/// Digit positions at which the summed digits of `ys` fail the window test.
/// Position 0 uses the strict test when `strict_j0`.
pub fn window_violations(ys: &[i64], strict_j0: bool) -> Vec<u32> {
    let params = DigitParams::for_values(ys.len(), ys).unwrap();
    (0..=params.j_max)
        .filter(|&j| {
            let s: i64 = ys.iter().map(|&y| project_digit(y, &params, j).get()).sum();
            let strict = strict_j0 && j == 0;
            !window_accepts(s, &params, strict)
        })
        .collect()
}

pub fn shifted(ys: &[i64], t: u32) -> Vec<i64> {
    ys.iter().map(|&y| shift_right_sign_preserving(y, t)).collect()
}

/// Candidate tuples of a table set, computed without looking at how the
/// library enumerates them: every sorted tuple of distinct ordinals below
/// `universe` is tested against every column assignment.
pub fn brute_candidates(set: &TupleTableSet, universe: Ordinal) -> BTreeSet<Vec<Ordinal>> {
    let r = set.arity();
    let mut out = BTreeSet::new();
    let mut tuple = Vec::with_capacity(r);
    sorted_tuples(r, 0, universe, &mut tuple, &mut |t| {
        if set.tables().iter().any(|table| fits(table, t)) {
            out.insert(t.to_vec());
        }
    });
    out
}

fn sorted_tuples(r: usize, from: Ordinal, universe: Ordinal, cur: &mut Vec<Ordinal>, f: &mut dyn FnMut(&[Ordinal])) {
    if cur.len() == r {
        f(cur);
        return;
    }
    for o in from..universe {
        cur.push(o);
        sorted_tuples(r, o + 1, universe, cur, f);
        cur.pop();
    }
}

/// Whether some permutation places each tuple element in its own column.
fn fits(table: &TupleTable, tuple: &[Ordinal]) -> bool {
    let r = tuple.len();
    let mut perm: Vec<usize> = (0..r).collect();
    permutations(&mut perm, 0, &mut |p| {
        p.iter()
            .enumerate()
            .all(|(i, &c)| table.columns()[c].contains(&tuple[i]))
    })
}

fn permutations(p: &mut [usize], k: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if k == p.len() {
        return f(p);
    }
    for i in k..p.len() {
        p.swap(k, i);
        if permutations(p, k + 1, f) {
            p.swap(k, i);
            return true;
        }
        p.swap(k, i);
    }
    false
}

/// All sorted `r`-subsets of `0..n` whose values sum to zero.
pub fn zero_sum_subsets(values: &[i64], r: usize) -> BTreeSet<Vec<Ordinal>> {
    let mut out = BTreeSet::new();
    let mut cur = Vec::new();
    sorted_tuples(r, 0, values.len() as Ordinal, &mut cur, &mut |t| {
        if t.iter().map(|&o| i128::from(values[o as usize])).sum::<i128>() == 0 {
            out.insert(t.to_vec());
        }
    });
    out
}
