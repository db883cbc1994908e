use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::primes;
use crate::hashing::HashFamily;

/// Which of the two codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Construction {
    /// Four hashed marker segmentations.
    One,
    /// Three hashed marker segmentations plus the run-length hash and balance.
    Two,
}

impl Construction {
    pub fn number(self) -> u8 {
        match self {
            Construction::One => 1,
            Construction::Two => 2,
        }
    }
}

impl From<Construction> for u8 {
    fn from(c: Construction) -> u8 {
        c.number()
    }
}

impl TryFrom<u8> for Construction {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Construction::One),
            2 => Ok(Construction::Two),
            _ => Err(Error::arg(format!("construction must be 1 or 2, got {v}"))),
        }
    }
}

impl std::fmt::Display for Construction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl std::str::FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .parse::<u8>()
            .map_err(|_| Error::arg(format!("construction must be 1 or 2, got {s:?}")))?
            .try_into()
    }
}

/// Smallest `s` accepted when deriving parameters.
pub const MIN_S: usize = 9;

/// Numeric parameters of a code. Everything here is determined by
/// `(n, s, construction)` and the hash image size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub s: usize,
    pub construction: Construction,
    /// Image size of the segment hash.
    pub colors: u64,
    pub q1: u64,
    #[serde(rename = "N1")]
    pub n1: u32,
    /// The distance-5 redundancy bound `2 N1 + ceil((N1 - 1) / 3)`.
    pub r1_paper: u32,
    /// Redundancy of the implemented distance-5 code, in `F_q1` symbols.
    pub r1_impl: u32,
    #[serde(rename = "Q")]
    pub big_q: Option<u64>,
    pub q2: Option<u64>,
    #[serde(rename = "N2")]
    pub n2: Option<u32>,
    pub r2_paper: Option<u32>,
    pub r2_impl: Option<u32>,
}

/// Smallest `k >= 1` with `base^k > bound` (or `base^k - 1 > bound` when `minus_one`).
fn min_exponent(base: u64, bound: u64, minus_one: bool) -> u32 {
    let mut k = 1u32;
    let mut pow = base as u128;
    loop {
        let lhs = if minus_one { pow - 1 } else { pow };
        if lhs > bound as u128 {
            return k;
        }
        k += 1;
        pow *= base as u128;
    }
}

impl CodeParams {
    /// Derives parameters for a hash family built at `s`.
    pub fn derive(n: usize, s: usize, construction: Construction, family: &HashFamily) -> Result<Self> {
        if family.s() != s {
            return Err(Error::arg(format!(
                "hash family was built for s = {}, not {s}",
                family.s()
            )));
        }
        Self::derive_with_image(n, s, construction, family.colors() as u64)
    }

    /// Derives parameters from the segment hash image size alone.
    pub fn derive_with_image(n: usize, s: usize, construction: Construction, colors: u64) -> Result<Self> {
        if s < MIN_S {
            return Err(Error::arg(format!("s must be at least {MIN_S}, got {s}")));
        }
        if n < 2 {
            return Err(Error::arg("n must be at least 2"));
        }
        if colors == 0 {
            return Err(Error::arg("hash image is empty"));
        }
        let overflow = || Error::arg("parameters overflow 64-bit arithmetic");
        let q1 = primes::next_odd_prime_above(colors).ok_or_else(overflow)?;
        // q1^(N1 - 1) > n
        let n1 = min_exponent(q1, n as u64, false) + 1;
        let m1 = n1 - 1;
        let mut params = CodeParams {
            n,
            s,
            construction,
            colors,
            q1,
            n1,
            r1_paper: 2 * n1 + (m1 + 2) / 3,
            r1_impl: 4 * m1,
            big_q: None,
            q2: None,
            n2: None,
            r2_paper: None,
            r2_impl: None,
        };
        if construction == Construction::Two {
            let big_q = primes::next_prime_at_least(s as u64 + 2).ok_or_else(overflow)?;
            let q2 = big_q
                .checked_mul(big_q)
                .and_then(primes::next_prime_above)
                .ok_or_else(overflow)?;
            let n2 = min_exponent(q2, n as u64, true);
            params.big_q = Some(big_q);
            params.q2 = Some(q2);
            params.n2 = Some(n2);
            params.r2_paper = Some(1 + n2);
            // root 1 contributes one F_q2 symbol, root alpha contributes N2
            params.r2_impl = Some(1 + n2);
        }
        Ok(params)
    }

    /// Extension degree of the distance-5 syndrome field.
    pub fn m1(&self) -> u32 {
        self.n1 - 1
    }

    /// Number of hashed marker segmentations protected by the distance-5 code.
    pub fn distance5_markers(&self) -> u32 {
        match self.construction {
            Construction::One => 4,
            Construction::Two => 3,
        }
    }

    /// `log2` of the number of target tuples, i.e. the averaging denominator
    /// `7^6 q1^(k r1) q2^r2 (s + 1)` for the implemented codes.
    pub fn log2_target_space(&self) -> f64 {
        let mut bits = 6.0 * 7f64.log2()
            + (self.distance5_markers() * self.r1_impl) as f64 * (self.q1 as f64).log2();
        if let (Some(q2), Some(r2)) = (self.q2, self.r2_impl) {
            bits += r2 as f64 * (q2 as f64).log2() + ((self.s + 1) as f64).log2();
        }
        bits
    }
}
