//! Redundancy formulas and the constraint-probability bounds, with a Monte
//! Carlo estimate of the true constrained-set density.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitseq::BitString;
use crate::construction::{check_constraints, CodeParams, Construction};
use crate::error::{Error, Result};

/// The gap constant `c` in `s = c log2 n`.
pub const GAP_CONSTANT: f64 = 1065.0;

/// Marker lengths entering the whole-string bound: 0000, 1111, 11011, 110011, 1, 0.
pub const BOUND_MARKER_LENGTHS: [u32; 6] = [4, 4, 5, 6, 1, 1];

/// `s = 1065 log2 n`.
pub fn gap_s(log2_n: f64) -> f64 {
    GAP_CONSTANT * log2_n
}

fn log2_n_plus(log2_n: f64, k: f64) -> f64 {
    // log2(n + k) without forming n + k when n is huge
    log2_n + (k * (-log2_n).exp2()).ln_1p() / std::f64::consts::LN_2
}

/// Bound on `log2 q1^r1`: `7/3 log2(n+1) + 28/3 log2(1065 log2 n)`.
pub fn eq2_bound(log2_n: f64) -> f64 {
    7.0 / 3.0 * log2_n_plus(log2_n, 1.0) + 28.0 / 3.0 * gap_s(log2_n).log2()
}

/// Bound on `log2 q2^r2`: `log2(n+2) + log2(2130 log2 n + 2)`.
pub fn eq3_bound(log2_n: f64) -> f64 {
    log2_n_plus(log2_n, 2.0) + (2.0 * GAP_CONSTANT * log2_n + 2.0).log2()
}

/// The distance-5 quantities with unrounded parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundQ1Terms {
    pub log2_q1: f64,
    pub n1: f64,
    pub r1: f64,
    /// `r1 log2 q1`.
    pub bits: f64,
}

/// `q1 = (1065 log2 n)^4`, `q1^(N1-1) = n+1`, `r1 = 2 N1 + (N1 - 1)/3`.
pub fn bound_q1_terms(log2_n: f64) -> BoundQ1Terms {
    let log2_q1 = 4.0 * gap_s(log2_n).log2();
    let n1 = log2_n_plus(log2_n, 1.0) / log2_q1 + 1.0;
    let r1 = 2.0 * n1 + (n1 - 1.0) / 3.0;
    BoundQ1Terms {
        log2_q1,
        n1,
        r1,
        bits: r1 * log2_q1,
    }
}

/// One row of the redundancy comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RedundancyReport {
    pub log2_n: f64,
    pub s: f64,
    /// `6 log2 7`.
    pub bits_counters: f64,
    /// Three distance-5 syndromes at the bound, `3 * eq2_bound`.
    pub bits_q1: f64,
    /// `eq3_bound`.
    pub bits_q2: f64,
    /// `log2(s + 1)`.
    pub bits_balance: f64,
    pub total: f64,
    /// Redundancy of the implemented codes at this `n`, when computable.
    pub implemented: Option<f64>,
    /// `128 log2 n`.
    pub baseline_total: f64,
    pub rate: f64,
    pub baseline_rate: f64,
}

/// Redundancy at `n = 2^log2_n` with `s = 1065 log2 n`, assuming
/// `log2 |C_T2| = n`.
pub fn redundancy_report(log2_n: f64) -> RedundancyReport {
    let s = gap_s(log2_n);
    let bits_counters = 6.0 * 7f64.log2();
    let bits_q1 = 3.0 * eq2_bound(log2_n);
    let bits_q2 = eq3_bound(log2_n);
    let bits_balance = (s + 1.0).log2();
    let total = bits_counters + bits_q1 + bits_q2 + bits_balance;
    let baseline_total = 128.0 * log2_n;
    let n = log2_n.exp2();
    let implemented = (log2_n.fract() == 0.0 && log2_n <= 62.0)
        .then(|| implemented_redundancy(1u64 << log2_n as u32).ok())
        .flatten();
    RedundancyReport {
        log2_n,
        s,
        bits_counters,
        bits_q1,
        bits_q2,
        bits_balance,
        total,
        implemented,
        baseline_total,
        rate: (n - total) / n,
        baseline_rate: (n - baseline_total) / n,
    }
}

/// Redundancy of construction 2 as implemented (nonbinary BCH components,
/// `q2 > Q^2`), taking the segment hash image to be `s^4` with
/// `s = ceil(1065 log2 n)`.
pub fn implemented_redundancy(n: u64) -> Result<f64> {
    if n < 4 {
        return Err(Error::arg("n must be at least 4"));
    }
    let s = gap_s((n as f64).log2()).ceil() as u64;
    let image = s
        .checked_pow(4)
        .ok_or_else(|| Error::arg("hash image s^4 overflows 64 bits"))?;
    let p = CodeParams::derive_with_image(n as usize, s as usize, Construction::Two, image)?;
    Ok(p.log2_target_space())
}

/// Rows for `n = 2^k`, `k` from `log2(n_min)` to `log2(n_max)`.
pub fn redundancy_curves(n_min: u64, n_max: u64) -> Result<Vec<RedundancyReport>> {
    if n_min < 4 || n_max < n_min || !n_min.is_power_of_two() || !n_max.is_power_of_two() {
        return Err(Error::arg("n range must be powers of two with 4 <= n-min <= n-max"));
    }
    Ok((n_min.trailing_zeros()..=n_max.trailing_zeros())
        .map(|k| redundancy_report(k as f64))
        .collect())
}

pub fn write_redundancy_csv(mut out: impl Write, rows: &[RedundancyReport]) -> Result<()> {
    writeln!(
        out,
        "n,redundancy_ours_paperformula,redundancy_ours_implemented,redundancy_bgz,rate_ours,rate_bgz"
    )?;
    for r in rows {
        let n = r.log2_n.exp2();
        let implemented = r.implemented.map(|v| format!("{v:.6}")).unwrap_or_default();
        writeln!(
            out,
            "{n:.0},{:.6},{implemented},{:.6},{:.9},{:.9}",
            r.total, r.baseline_total, r.rate, r.baseline_rate
        )?;
    }
    Ok(())
}

/// Lower bound on the probability that a uniform length-`big_n` string
/// contains a fixed pattern of length `ell`: `1 - exp(-(N/l) 2^(-l-1))`.
pub fn gap_probability_bound(big_n: f64, ell: f64) -> f64 {
    -(-(big_n / ell) * (-ell - 1.0).exp2()).exp_m1()
}

/// Lower bound on the probability that a uniform length-`n` string has
/// every constraint pattern in each of its `2n/s` subwords of length `s/2`,
/// combined over the six patterns by a union bound.
pub fn whole_string_bound(n: f64, s: f64) -> f64 {
    let fail: f64 = BOUND_MARKER_LENGTHS
        .iter()
        .map(|&ell| 1.0 - gap_probability_bound(s / 2.0, ell as f64).powf(2.0 * n / s))
        .sum();
    (1.0 - fail).max(0.0)
}

/// Smallest integer `c` with `c > l 2^(l+2) ln 2`.
pub fn minimal_constant(ell: u32) -> u64 {
    (ell as f64 * ((ell + 2) as f64).exp2() * std::f64::consts::LN_2).floor() as u64 + 1
}

/// A sampled proportion with its 95% Wilson interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub n: usize,
    pub s: usize,
    pub trials: u64,
    pub hits: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `hits` successes in `trials`.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let t = trials as f64;
    let p = hits as f64 / t;
    let z2 = z * z;
    let denom = 1.0 + z2 / t;
    let centre = (p + z2 / (2.0 * t)) / denom;
    let half = z * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Fraction of uniform length-`n` strings in the constrained set. Trial `i`
/// draws from stream `i` of the generator seeded with `seed`, so the result
/// does not depend on the thread count.
pub fn monte_carlo_membership(
    n: usize,
    s: usize,
    construction: Construction,
    trials: u64,
    seed: u64,
) -> Result<DensityEstimate> {
    if trials == 0 {
        return Err(Error::arg("trials must be positive"));
    }
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let x = BitString::new((0..n).map(|_| rng.gen_range(0..2u8)).collect())
                .expect("bits are 0 or 1");
            check_constraints(&x, s, construction).is_ok()
        })
        .count() as u64;
    let (ci_low, ci_high) = wilson_interval(hits, trials, Z95);
    Ok(DensityEstimate {
        n,
        s,
        trials,
        hits,
        estimate: hits as f64 / trials as f64,
        ci_low,
        ci_high,
    })
}

/// Exact constrained-set density by enumeration (`n <= 22`).
pub fn exact_density(n: usize, s: usize, construction: Construction) -> Result<f64> {
    if n > crate::construction::MAX_ENUM_N {
        return Err(Error::arg("exact density needs n <= 22"));
    }
    let count = (0..1u64 << n)
        .into_par_iter()
        .filter(|&v| check_constraints(&BitString::from_value(v, n), s, construction).is_ok())
        .count();
    Ok(count as f64 / (1u64 << n) as f64)
}
