//! Block interleaving and periodic puncturing, generic over the payload
//! (bits or LLRs).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Row-in, column-out block interleaver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InterleaverSpec {
    pub rows: usize,
    pub cols: usize,
}

impl InterleaverSpec {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInterleaver(format!("{rows}x{cols} has a zero dimension")));
        }
        Ok(InterleaverSpec { rows, cols })
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check<T>(&self, seq: &[T]) -> Result<()> {
        if seq.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: seq.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for InterleaverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

impl FromStr for InterleaverSpec {
    type Err = Error;

    /// Parses `"RxC"`, e.g. `"16x24"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInterleaver(format!("'{s}' is not of the form RxC"));
        let (r, c) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        InterleaverSpec::new(r.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?)
    }
}

/// Writes `seq` row-wise into a `rows × cols` block and reads it column-wise.
pub fn interleave<T: Copy>(seq: &[T], spec: &InterleaverSpec) -> Result<Vec<T>> {
    spec.check(seq)?;
    let mut out = Vec::with_capacity(seq.len());
    for c in 0..spec.cols {
        for r in 0..spec.rows {
            out.push(seq[r * spec.cols + c]);
        }
    }
    Ok(out)
}

pub fn deinterleave<T: Copy>(seq: &[T], spec: &InterleaverSpec) -> Result<Vec<T>> {
    spec.check(seq)?;
    let mut out = Vec::with_capacity(seq.len());
    for r in 0..spec.rows {
        for c in 0..spec.cols {
            out.push(seq[c * spec.rows + r]);
        }
    }
    Ok(out)
}

/// Periodic keep/delete mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PunctureSpec {
    pattern: Vec<bool>,
}

impl PunctureSpec {
    pub fn new(pattern: Vec<bool>) -> Result<Self> {
        if !pattern.iter().any(|&k| k) {
            return Err(Error::InvalidPattern("pattern keeps no positions".into()));
        }
        Ok(PunctureSpec { pattern })
    }

    /// Keeps everything.
    pub fn none() -> Self {
        PunctureSpec {
            pattern: vec![true],
        }
    }

    pub fn pattern(&self) -> &[bool] {
        &self.pattern
    }

    pub fn period(&self) -> usize {
        self.pattern.len()
    }

    #[inline]
    pub fn keeps(&self, pos: usize) -> bool {
        self.pattern[pos % self.pattern.len()]
    }

    /// Number of positions kept out of the first `len`.
    pub fn kept(&self, len: usize) -> usize {
        let per_period = self.pattern.iter().filter(|&&k| k).count();
        let rem = len % self.period();
        len / self.period() * per_period + self.pattern[..rem].iter().filter(|&&k| k).count()
    }
}

impl fmt::Display for PunctureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &k in &self.pattern {
            f.write_str(if k { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for PunctureSpec {
    type Err = Error;

    /// Parses a 0/1 string such as `"1110"`, or `"none"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("none") {
            return Ok(PunctureSpec::none());
        }
        if s.is_empty() {
            return Err(Error::InvalidPattern("empty pattern".into()));
        }
        let pattern = s
            .chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                other => Err(Error::InvalidPattern(format!("'{s}': unexpected character '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        PunctureSpec::new(pattern)
    }
}

/// Drops the positions where the repeating mask is 0.
pub fn puncture<T: Copy>(seq: &[T], spec: &PunctureSpec) -> Vec<T> {
    seq.iter()
        .enumerate()
        .filter(|&(i, _)| spec.keeps(i))
        .map(|(_, &v)| v)
        .collect()
}

/// Re-inserts `T::default()` (LLR 0, i.e. an erasure) at deleted positions.
pub fn depuncture<T: Copy + Default>(
    seq: &[T],
    spec: &PunctureSpec,
    original_len: usize,
) -> Result<Vec<T>> {
    let expected = spec.kept(original_len);
    if seq.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: seq.len(),
        });
    }
    let mut it = seq.iter();
    Ok((0..original_len)
        .map(|i| {
            if spec.keeps(i) {
                *it.next().expect("count checked above")
            } else {
                T::default()
            }
        })
        .collect())
}
