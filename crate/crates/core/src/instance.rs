//! Instance generation and the `#rsum v1` text format.
//!
//! All generators draw from SplitMix64 seeded directly with the instance
//! seed. An integer in `[lo, hi]` is `lo + (x mod span)` with `span =
//! hi - lo + 1`, where `x` is the next 64-bit output and outputs with
//! `x >= 2^64 - (2^64 mod span)` are discarded. This fully determines every
//! instance, so other implementations can reproduce them bit for bit.
//!
//! File layout:
//!
//! ```text
//! #rsum v1 n=5 bound=100 family=planted seed=7 rng=splitmix64 r=3
//! #planted 0 2 4
//! 17
//! -3
//! ...
//! ```

use std::fmt;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::digits::{ceil_log2, BoundedInt};
use crate::error::{Result, RsumError};
use crate::filter::Ordinal;

pub const RNG_NAME: &str = "splitmix64";
const PLANT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Family {
    Uniform,
    Planted,
    NoSolution,
    Adversarial,
    /// Anything not produced by a generator here.
    Other(String),
}

impl Family {
    pub fn as_str(&self) -> &str {
        match self {
            Family::Uniform => "uniform",
            Family::Planted => "planted",
            Family::NoSolution => "no_solution",
            Family::Adversarial => "adversarial",
            Family::Other(s) => s,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "uniform" => Family::Uniform,
            "planted" => Family::Planted,
            "no_solution" | "no-solution" => Family::NoSolution,
            "adversarial" => Family::Adversarial,
            other => Family::Other(other.to_string()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub values: Vec<i64>,
    /// Declared magnitude bound: every `|value| <= bound`.
    pub bound: u64,
    pub seed: u64,
    pub family: Family,
    /// Arity the instance was generated for, when it matters.
    pub r: Option<usize>,
    /// Degree of the polynomial bounding magnitudes, when known.
    pub m: Option<u32>,
    /// Planted zero-sum ordinals, for the planted family.
    pub planted: Option<Vec<Ordinal>>,
}

impl Instance {
    /// Wraps explicit values; the bound is their largest magnitude.
    pub fn from_values(values: Vec<i64>) -> Self {
        let bound = values.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        Instance {
            values,
            bound,
            seed: 0,
            family: Family::Other("custom".into()),
            r: None,
            m: None,
            planted: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Checks the declared bound and the overflow bound for arity `r`.
    pub fn validate(&self, r: usize) -> Result<()> {
        if let Some(v) = self.values.iter().find(|v| v.unsigned_abs() > self.bound) {
            return Err(RsumError::domain(format!("value {v} exceeds declared bound {}", self.bound)));
        }
        if self.bound > BoundedInt::max_magnitude(r) {
            return Err(RsumError::domain(format!(
                "bound {} is not below 2^62/{r}",
                self.bound
            )));
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(
            w,
            "#rsum v1 n={} bound={} family={} seed={} rng={}",
            self.values.len(),
            self.bound,
            self.family,
            self.seed,
            RNG_NAME
        )?;
        if let Some(r) = self.r {
            write!(w, " r={r}")?;
        }
        if let Some(m) = self.m {
            write!(w, " m={m}")?;
        }
        writeln!(w)?;
        if let Some(p) = &self.planted {
            write!(w, "#planted")?;
            for o in p {
                write!(w, " {o}")?;
            }
            writeln!(w)?;
        }
        for v in &self.values {
            writeln!(w, "{v}")?;
        }
        Ok(())
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut file = io::BufWriter::new(fs::File::create(path)?);
        self.write_to(&mut file)?;
        file.flush()?;
        Ok(())
    }

    /// Parses the text format. Blank lines and `#` comments are skipped;
    /// a file without a header is read as a bare list of integers.
    pub fn read_from<R: BufRead>(reader: R) -> Result<Self> {
        let mut header: Option<Header> = None;
        let mut planted = None;
        let mut values = Vec::new();
        let mut seen_content = false;
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("#rsum") {
                if seen_content || header.is_some() {
                    return Err(parse_err(line_no, "header must come first"));
                }
                header = Some(Header::parse(rest, line_no)?);
                seen_content = true;
                continue;
            }
            seen_content = true;
            if let Some(rest) = line.strip_prefix("#planted") {
                let ords = rest
                    .split_whitespace()
                    .map(|t| t.parse::<Ordinal>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| parse_err(line_no, format!("bad planted ordinal: {e}")))?;
                planted = Some(ords);
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            for token in line.split_whitespace() {
                let v = token
                    .parse::<i64>()
                    .map_err(|e| parse_err(line_no, format!("bad integer {token:?}: {e}")))?;
                values.push(v);
            }
        }

        let mut inst = Instance::from_values(values);
        if let Some(h) = header {
            if let Some(n) = h.n {
                if n != inst.values.len() {
                    return Err(parse_err(0, format!("header declares n={n}, found {}", inst.values.len())));
                }
            }
            if let Some(bound) = h.bound {
                if let Some(v) = inst.values.iter().find(|v| v.unsigned_abs() > bound) {
                    return Err(parse_err(0, format!("value {v} exceeds declared bound {bound}")));
                }
                inst.bound = bound;
            }
            inst.seed = h.seed.unwrap_or(0);
            if let Some(f) = h.family {
                inst.family = f;
            }
            inst.r = h.r;
            inst.m = h.m;
        }
        if let Some(p) = &planted {
            if let Some(&o) = p.iter().find(|&&o| o as usize >= inst.values.len()) {
                return Err(parse_err(0, format!("planted ordinal {o} out of range")));
            }
        }
        inst.planted = planted;
        Ok(inst)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let file = fs::File::open(path)?;
        Self::read_from(io::BufReader::new(file))
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> RsumError {
    RsumError::Parse { line, message: message.into() }
}

#[derive(Default)]
struct Header {
    n: Option<usize>,
    bound: Option<u64>,
    seed: Option<u64>,
    family: Option<Family>,
    r: Option<usize>,
    m: Option<u32>,
}

impl Header {
    fn parse(rest: &str, line_no: usize) -> Result<Self> {
        let mut tokens = rest.split_whitespace();
        match tokens.next() {
            Some("v1") => {}
            other => {
                return Err(parse_err(line_no, format!("unsupported format version {other:?}")));
            }
        }
        let mut h = Header::default();
        for tok in tokens {
            let Some((key, val)) = tok.split_once('=') else {
                return Err(parse_err(line_no, format!("malformed header field {tok:?}")));
            };
            let bad = |e: std::num::ParseIntError| parse_err(line_no, format!("bad {key}: {e}"));
            match key {
                "n" => h.n = Some(val.parse().map_err(bad)?),
                "bound" => h.bound = Some(val.parse().map_err(bad)?),
                "seed" => h.seed = Some(val.parse().map_err(bad)?),
                "r" => h.r = Some(val.parse().map_err(bad)?),
                "m" => h.m = Some(val.parse().map_err(bad)?),
                "family" => h.family = Some(val.parse().expect("infallible")),
                "rng" if val != RNG_NAME => {
                    return Err(parse_err(line_no, format!("unknown generator {val:?}")));
                }
                // unknown keys are ignored for forward compatibility
                _ => {}
            }
        }
        Ok(h)
    }
}

/// Seeded source with the portable range reduction described above.
pub struct InstanceRng(SplitMix64);

impl InstanceRng {
    pub fn new(seed: u64) -> Self {
        InstanceRng(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "empty range {lo}..={hi}");
        let span = (i128::from(hi) - i128::from(lo) + 1) as u128;
        let x = if span == 1 << 64 {
            u128::from(self.next_u64())
        } else {
            let zone = (1u128 << 64) - ((1u128 << 64) % span);
            loop {
                let x = u128::from(self.next_u64());
                if x < zone {
                    break x % span;
                }
            }
        };
        (i128::from(lo) + x as i128) as i64
    }

    /// Uniform index in `[0, n)`.
    pub fn index(&mut self, n: usize) -> usize {
        self.range_i64(0, n as i64 - 1) as usize
    }
}

fn signed_bound(bound: u64) -> Result<i64> {
    i64::try_from(bound).map_err(|_| RsumError::domain(format!("bound {bound} exceeds i64")))
}

fn generated(values: Vec<i64>, bound: u64, seed: u64, family: Family) -> Instance {
    Instance { values, bound, seed, family, r: None, m: None, planted: None }
}

/// `n` values drawn independently from `[-bound, bound]`.
pub fn gen_uniform(n: usize, bound: u64, seed: u64) -> Result<Instance> {
    if n == 0 {
        return Err(RsumError::domain("n must be at least 1"));
    }
    let b = signed_bound(bound)?;
    let mut rng = InstanceRng::new(seed);
    let values = (0..n).map(|_| rng.range_i64(-b, b)).collect();
    Ok(generated(values, bound, seed, Family::Uniform))
}

/// A uniform instance with one zero-sum `r`-tuple planted at random
/// distinct positions; returns the planted ordinals in ascending order.
///
/// The first `r - 1` planted values are uniform; the last is their negated
/// sum, and the draw is repeated while that falls outside the bound.
pub fn gen_planted(n: usize, bound: u64, r: usize, seed: u64) -> Result<(Instance, Vec<Ordinal>)> {
    if r < 2 || n < r {
        return Err(RsumError::domain(format!("cannot plant a {r}-tuple among {n} values")));
    }
    if bound > BoundedInt::max_magnitude(r) {
        return Err(RsumError::domain(format!("bound {bound} is not below 2^62/{r}")));
    }
    let b = bound as i64;
    let mut rng = InstanceRng::new(seed);

    let mut planted_values = None;
    for _ in 0..PLANT_ATTEMPTS {
        let mut vals: Vec<i64> = (0..r - 1).map(|_| rng.range_i64(-b, b)).collect();
        let last = -vals.iter().sum::<i64>();
        if last.unsigned_abs() <= bound {
            vals.push(last);
            planted_values = Some(vals);
            break;
        }
    }
    let planted_values = planted_values.ok_or_else(|| {
        RsumError::Generation(format!("no zero-sum {r}-tuple within bound {bound} after {PLANT_ATTEMPTS} draws"))
    })?;

    // partial Fisher-Yates over positions
    let mut positions: Vec<usize> = (0..n).collect();
    for i in 0..r {
        let j = i + rng.index(n - i);
        positions.swap(i, j);
    }
    let mut values = vec![0i64; n];
    let mut is_planted = vec![false; n];
    for (m, &pos) in positions[..r].iter().enumerate() {
        values[pos] = planted_values[m];
        is_planted[pos] = true;
    }
    for (v, planted) in values.iter_mut().zip(&is_planted) {
        if !planted {
            *v = rng.range_i64(-b, b);
        }
    }

    let mut ords: Vec<Ordinal> = positions[..r].iter().map(|&p| p as Ordinal).collect();
    ords.sort_unstable();
    let mut inst = generated(values, bound, seed, Family::Planted);
    inst.r = Some(r);
    inst.planted = Some(ords.clone());
    Ok((inst, ords))
}

/// Strictly positive values from `[1, bound]`; no tuple of any size sums to zero.
pub fn gen_no_solution(n: usize, bound: u64, seed: u64) -> Result<Instance> {
    if n == 0 || bound == 0 {
        return Err(RsumError::domain("n and bound must be at least 1"));
    }
    let b = signed_bound(bound)?;
    let mut rng = InstanceRng::new(seed);
    let values = (0..n).map(|_| rng.range_i64(1, b)).collect();
    Ok(generated(values, bound, seed, Family::NoSolution))
}

/// Values whose magnitudes are all multiples of `2^k` (`k = 3 ceil(log2 r)`),
/// so the lowest digit is zero everywhere and the first digit position
/// prunes nothing.
pub fn gen_adversarial(n: usize, bound: u64, r: usize, seed: u64) -> Result<Instance> {
    if n == 0 || r < 2 {
        return Err(RsumError::domain("n must be at least 1 and r at least 2"));
    }
    let k = 3 * ceil_log2(r as u64)?;
    let q = signed_bound(bound >> k)?;
    let mut rng = InstanceRng::new(seed);
    let values = (0..n).map(|_| rng.range_i64(-q, q) << k).collect();
    let mut inst = generated(values, bound, seed, Family::Adversarial);
    inst.r = Some(r);
    Ok(inst)
}

/// Dispatches on the family name; `r` is used by the planted and
/// adversarial families.
pub fn generate(family: &Family, n: usize, bound: u64, r: usize, seed: u64) -> Result<Instance> {
    match family {
        Family::Uniform => gen_uniform(n, bound, seed),
        Family::Planted => gen_planted(n, bound, r, seed).map(|(i, _)| i),
        Family::NoSolution => gen_no_solution(n, bound, seed),
        Family::Adversarial => gen_adversarial(n, bound, r, seed),
        Family::Other(name) => Err(RsumError::domain(format!("unknown family {name:?}"))),
    }
}
