//! Sign-magnitude digit arithmetic.
//!
//! Every integer is viewed as `sign(z) * sum_j z_j * 2^(j*k)` with unsigned
//! digits `z_j < 2^k`; the projection of digit `j` carries the sign of the
//! whole number. Sums of at most `r` such digits stay within `r * 2^k`, so
//! whenever the underlying numbers sum to zero the digit sums differ from a
//! multiple of `2^k` by a carry of magnitude below `r`. The residue window
//! test below is built on that bound.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RsumError};

/// Exclusive magnitude ceiling scale: any accepted value satisfies
/// `|v| * r < 2^62`, so r-fold sums never leave `i64`.
pub const MAGNITUDE_SCALE: u128 = 1 << 62;

/// An input value whose magnitude keeps every r-fold sum inside `i64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoundedInt(i64);

impl BoundedInt {
    pub fn new(value: i64, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(RsumError::domain("arity must be positive"));
        }
        if u128::from(value.unsigned_abs()) * r as u128 >= MAGNITUDE_SCALE {
            return Err(RsumError::domain(format!(
                "|{value}| is not below 2^62/{r}"
            )));
        }
        Ok(BoundedInt(value))
    }

    #[inline]
    pub fn get(self) -> i64 {
        self.0
    }

    /// Largest magnitude accepted for arity `r`.
    pub fn max_magnitude(r: usize) -> u64 {
        let r = r.max(1) as u128;
        ((MAGNITUDE_SCALE - 1) / r) as u64
    }
}

impl From<BoundedInt> for i64 {
    fn from(b: BoundedInt) -> i64 {
        b.0
    }
}

/// Validates a whole collection against the magnitude bound for arity `r`.
pub fn check_bounded(values: &[i64], r: usize) -> Result<()> {
    for (i, &v) in values.iter().enumerate() {
        BoundedInt::new(v, r).map_err(|_| {
            RsumError::domain(format!(
                "element {i} = {v} exceeds the magnitude bound 2^62/{r}"
            ))
        })?;
    }
    Ok(())
}

/// A signed digit `P_j(z)`, strictly inside `(-2^k, 2^k)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignedDigit(i64);

impl SignedDigit {
    pub fn new(value: i64, k: u32) -> Result<Self> {
        if k >= 63 || value.unsigned_abs() >= 1u64 << k {
            return Err(RsumError::domain(format!(
                "digit {value} does not fit in {k} bits"
            )));
        }
        Ok(SignedDigit(value))
    }

    pub const ZERO: SignedDigit = SignedDigit(0);

    #[inline]
    pub fn get(self) -> i64 {
        self.0
    }
}

impl fmt::Debug for SignedDigit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for SignedDigit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Digit layout for one filter pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitParams {
    /// Tuple arity.
    pub r: usize,
    /// `ceil(log2 r)`.
    pub log_r: u32,
    /// Digit width in bits, always `3 * log_r`.
    pub k: u32,
    /// `ceil(log2 zeta)` of the largest magnitude `zeta` (0 when `zeta <= 1`).
    pub l: u32,
    /// Index of the last digit position examined.
    pub j_max: u32,
}

impl DigitParams {
    /// Layout for arity `r` over values whose largest magnitude is `max_magnitude`.
    pub fn new(r: usize, max_magnitude: u64) -> Result<Self> {
        if r < 2 {
            return Err(RsumError::domain(format!("arity must be at least 2, got {r}")));
        }
        let log_r = ceil_log2(r as u64)?;
        let k = 3 * log_r;
        if k > 30 {
            return Err(RsumError::domain(format!("arity {r} gives a {k}-bit digit")));
        }
        let l = if max_magnitude == 0 { 0 } else { ceil_log2(max_magnitude)? };
        let j_max = (l + log_r) / k;
        Ok(DigitParams { r, log_r, k, l, j_max })
    }

    /// Layout derived from the largest magnitude in `values`.
    pub fn for_values(r: usize, values: &[i64]) -> Result<Self> {
        let zeta = values.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        Self::new(r, zeta)
    }

    /// `2^k`.
    #[inline]
    pub fn radix(&self) -> i64 {
        1i64 << self.k
    }

    /// Number of digit positions `0..=j_max`.
    #[inline]
    pub fn positions(&self) -> usize {
        self.j_max as usize + 1
    }
}

/// `ceil(log2 x)` for `x >= 1`.
pub fn ceil_log2(x: u64) -> Result<u32> {
    if x == 0 {
        return Err(RsumError::domain("ceil_log2 of zero"));
    }
    Ok(if x == 1 { 0 } else { 64 - (x - 1).leading_zeros() })
}

/// The signed base-`2^k` digit `j` of `z`: `sign(z) * ((|z| >> j*k) mod 2^k)`.
pub fn project_digit(z: i64, params: &DigitParams, j: u32) -> SignedDigit {
    SignedDigit(digit_of(z, params.k, j))
}

#[inline]
pub(crate) fn digit_of(z: i64, k: u32, j: u32) -> i64 {
    let shift = u64::from(j) * u64::from(k);
    if shift >= 64 {
        return 0;
    }
    let mag = (z.unsigned_abs() >> shift) & ((1u64 << k) - 1);
    z.signum() * mag as i64
}

/// Magnitude-truncating right shift: `sign(z) * floor(|z| / 2^t)`.
///
/// Differs from `z >> t` for negative `z`, which rounds toward negative
/// infinity.
pub fn shift_right_sign_preserving(z: i64, t: u32) -> i64 {
    if t >= 64 {
        return 0;
    }
    z.signum() * (z.unsigned_abs() >> t) as i64
}

/// Residue window test on a digit sum.
///
/// With `w = s mod 2^k` in `[0, 2^k)`, the non-strict test accepts when `w`
/// lies within cyclic distance `r - 1` of zero; the strict test accepts only
/// `w == 0`.
pub fn window_accepts(s: i64, params: &DigitParams, strict: bool) -> bool {
    let radix = params.radix();
    debug_assert!(
        (s.unsigned_abs() as u128) < params.r as u128 * radix as u128,
        "digit sum {s} is outside the range of {} digits",
        params.r
    );
    let w = s.rem_euclid(radix);
    if strict {
        w == 0
    } else {
        let r = params.r as i64;
        w < r || w > radix - r
    }
}
