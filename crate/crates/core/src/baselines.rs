//! Reference rSUM algorithms: exhaustive enumeration and meet-in-the-middle.
//!
//! Both return sorted ordinal tuples in lexicographic order. Sums are taken
//! in `i128`, so any `i64` input is safe.

use std::collections::HashMap;

use crate::error::{Result, RsumError};
use crate::filter::Ordinal;

fn check_size(n: usize, r: usize, allow_repeats: bool) -> Result<()> {
    if r == 0 {
        return Err(RsumError::domain("arity must be positive"));
    }
    if n > Ordinal::MAX as usize {
        return Err(RsumError::domain(format!("{n} elements exceed the ordinal range")));
    }
    if !allow_repeats && n < r {
        return Err(RsumError::domain(format!("{n} elements cannot form a {r}-tuple")));
    }
    if allow_repeats && n == 0 {
        return Err(RsumError::domain("empty collection"));
    }
    Ok(())
}

/// Every sorted `r`-tuple of ordinals whose values sum to zero. Ordinals are
/// distinct unless `allow_repeats`.
pub fn brute_force_rsum(omega: &[i64], r: usize, allow_repeats: bool) -> Result<Vec<Vec<Ordinal>>> {
    check_size(omega.len(), r, allow_repeats)?;
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    brute(omega, r, allow_repeats, 0, 0, &mut cur, &mut out);
    Ok(out)
}

fn brute(
    omega: &[i64],
    r: usize,
    allow_repeats: bool,
    start: usize,
    sum: i128,
    cur: &mut Vec<Ordinal>,
    out: &mut Vec<Vec<Ordinal>>,
) {
    if cur.len() == r {
        if sum == 0 {
            out.push(cur.clone());
        }
        return;
    }
    for i in start..omega.len() {
        cur.push(i as Ordinal);
        let next = if allow_repeats { i } else { i + 1 };
        brute(omega, r, allow_repeats, next, sum + i128::from(omega[i]), cur, out);
        cur.pop();
    }
}

/// Meet-in-the-middle over distinct ordinals.
pub fn meet_in_the_middle_rsum(omega: &[i64], r: usize) -> Result<Vec<Vec<Ordinal>>> {
    meet_in_the_middle_rsum_with(omega, r, false)
}

/// Meet-in-the-middle: each sorted tuple is split into its first `r/2`
/// ordinals and the rest. Left halves are indexed by sum together with their
/// ordinals; a right half joins a left half only when the left half ends
/// before it starts (or at its start, when repeats are allowed), which
/// rules out ordinal collisions and produces each tuple exactly once.
pub fn meet_in_the_middle_rsum_with(
    omega: &[i64],
    r: usize,
    allow_repeats: bool,
) -> Result<Vec<Vec<Ordinal>>> {
    check_size(omega.len(), r, allow_repeats)?;
    if r < 2 {
        return brute_force_rsum(omega, r, allow_repeats);
    }
    let left_len = r / 2;
    let right_len = r - left_len;

    // sum -> left halves, ordered by their last ordinal
    let mut left: HashMap<i128, Vec<Vec<Ordinal>>> = HashMap::new();
    for_each_tuple(omega, left_len, allow_repeats, |t, s| {
        left.entry(s).or_default().push(t.to_vec());
    });
    for halves in left.values_mut() {
        halves.sort_unstable_by(|a, b| a[left_len - 1].cmp(&b[left_len - 1]).then_with(|| a.cmp(b)));
    }

    let mut out = Vec::new();
    for_each_tuple(omega, right_len, allow_repeats, |t, s| {
        let Some(halves) = left.get(&-s) else {
            return;
        };
        let first = t[0];
        let end = halves.partition_point(|h| {
            let last = h[left_len - 1];
            if allow_repeats {
                last <= first
            } else {
                last < first
            }
        });
        for h in &halves[..end] {
            let mut full = Vec::with_capacity(r);
            full.extend_from_slice(h);
            full.extend_from_slice(t);
            out.push(full);
        }
    });
    out.sort_unstable();
    Ok(out)
}

fn for_each_tuple(omega: &[i64], len: usize, allow_repeats: bool, mut f: impl FnMut(&[Ordinal], i128)) {
    fn rec(
        omega: &[i64],
        len: usize,
        allow_repeats: bool,
        start: usize,
        sum: i128,
        cur: &mut Vec<Ordinal>,
        f: &mut dyn FnMut(&[Ordinal], i128),
    ) {
        if cur.len() == len {
            f(cur, sum);
            return;
        }
        for i in start..omega.len() {
            cur.push(i as Ordinal);
            let next = if allow_repeats { i } else { i + 1 };
            rec(omega, len, allow_repeats, next, sum + i128::from(omega[i]), cur, f);
            cur.pop();
        }
    }
    rec(omega, len, allow_repeats, 0, 0, &mut Vec::with_capacity(len), &mut f);
}
