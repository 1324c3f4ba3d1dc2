//! Document exchange and error-correcting codes for block edit errors.
//!
//! A block edit adversary may insert or delete contiguous runs of bits and
//! move (transpose) whole substrings. This crate provides:
//!
//! * [`edit`]: the edit model, trace sampling and reference distances.
//! * [`prg`]: a small-bias bit generator with per-index evaluation.
//! * [`cfhash`]: hash functions certified collision free on one string.
//! * [`matching`]: greedy non-overlapping block matchings.
//! * [`gf`], [`rs`], [`setrecon`]: binary field arithmetic, Reed-Solomon
//!   syndromes and set reconciliation.
//! * [`levels`]: the multi-level deterministic sketch for arbitrary inputs.
//! * [`partition`] and [`bdistinct`]: locally consistent parsing and the
//!   two-stage sketch for inputs whose length-B windows are all distinct.
//! * [`ecc`]: a systematic binary code built on top of the sketches.
//! * [`oracles`]: a brute-force coloring protocol for tiny parameters.
//!
//! Positions in [`edit`] are 1-based. Everything else uses 0-based offsets.

pub mod bdistinct;
pub mod bits;
pub mod cfhash;
pub mod container;
pub mod ecc;
pub mod edit;
mod error;
pub mod gf;
pub mod levels;
pub mod matching;
pub mod oracles;
pub mod partition;
pub mod prg;
pub mod rs;
pub mod setrecon;

pub use error::{Error, Result};

/// Which document-exchange construction backs a sketch or codeword.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Multi-level hashing; works for any input.
    Levels,
    /// Two-stage parsing protocol; requires a B-distinct input.
    BDistinct,
}

impl Variant {
    pub fn tag(self) -> u8 {
        match self {
            Variant::Levels => 1,
            Variant::BDistinct => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            1 => Ok(Variant::Levels),
            2 => Ok(Variant::BDistinct),
            other => Err(Error::Format(format!("unknown variant tag {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Levels => "levels",
            Variant::BDistinct => "bdist",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "levels" | "LEVELS" => Ok(Variant::Levels),
            "bdist" | "BDIST" | "bdistinct" => Ok(Variant::BDistinct),
            other => Err(Error::Format(format!("unknown variant {other:?}"))),
        }
    }
}

/// ⌈log₂ n⌉, with the convention that the result is at least 1.
pub fn clog2(n: usize) -> usize {
    if n <= 2 {
        1
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}
