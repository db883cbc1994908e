//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twodel::bitseq::{
    balance_sum, count_occurrences, is_preserved, run_profile, Marker, Preservation,
};
use twodel::hashing::{hash_sequence, RunHash};
use twodel::BitString;

pub fn bs(s: &str) -> BitString {
    s.parse().unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    (0..len).map(|_| rng.gen_range(0..2u8)).collect()
}

/// Every string obtained by deleting at most `t` symbols, by direct removal.
pub fn naive_subsequences(x: &[u8], t: usize) -> BTreeSet<Vec<u8>> {
    let mut all = BTreeSet::new();
    let mut layer = BTreeSet::from([x.to_vec()]);
    all.extend(layer.iter().cloned());
    for _ in 0..t {
        let mut next = BTreeSet::new();
        for v in &layer {
            for i in 0..v.len() {
                let mut w = v.clone();
                w.remove(i);
                next.insert(w);
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// All supersequences of `y` with `t` more symbols, by direct insertion.
pub fn naive_supersequences(y: &[u8], t: usize) -> BTreeSet<Vec<u8>> {
    let mut layer = BTreeSet::from([y.to_vec()]);
    for _ in 0..t {
        let mut next = BTreeSet::new();
        for v in &layer {
            for i in 0..=v.len() {
                for b in 0..2u8 {
                    let mut w = v.clone();
                    w.insert(i, b);
                    next.insert(w);
                }
            }
        }
        layer = next;
    }
    layer
}

pub fn delete_positions(x: &[u8], positions: &[usize]) -> BitString {
    BitString::new(
        x.iter()
            .enumerate()
            .filter(|(i, _)| !positions.contains(i))
            .map(|(_, &b)| b)
            .collect(),
    )
    .unwrap()
}

/// Length of the run containing 0-indexed position `i`.
pub fn run_len_at(x: &[u8], i: usize) -> usize {
    let b = x[i];
    let left = x[..i].iter().rev().take_while(|&&v| v == b).count();
    let right = x[i + 1..].iter().take_while(|&&v| v == b).count();
    left + 1 + right
}

fn changed(p: Preservation) -> bool {
    p != Preservation::Preserved
}

fn creates(p: Preservation) -> bool {
    matches!(p, Preservation::Created | Preservation::Both)
}

pub fn m(s: &str) -> Marker {
    Marker::lit(s)
}

/// Outcome of checking one instance against a claim.
#[derive(Debug, PartialEq, Eq)]
pub enum Check {
    /// The premises do not hold for this instance.
    Skip,
    Holds,
    Fails(String),
}

/// A zero from a length-1 run is deleted, `11011` is created or destroyed
/// and `1111` is created; then `110011` is preserved.
pub fn claim_if11011(x: &[u8], i: usize) -> Check {
    if x[i] != 0 || run_len_at(x, i) != 1 {
        return Check::Skip;
    }
    let xb = BitString::new(x.to_vec()).unwrap();
    let y = delete_positions(x, &[i]);
    let p5 = is_preserved(&xb, &y, &m("11011")).unwrap();
    let p4 = is_preserved(&xb, &y, &m("1111")).unwrap();
    if !changed(p5) || !creates(p4) {
        return Check::Skip;
    }
    match is_preserved(&xb, &y, &m("110011")).unwrap() {
        Preservation::Preserved => Check::Holds,
        p => Check::Fails(format!("x={xb} delete {}: 110011 {p:?}", i + 1)),
    }
}

/// `b` deleted from a run of length >= 4 and from a run of length 1, with
/// both four-symbol counts changed. For `b = 1` the marker `110011` is
/// preserved; for `b = 0` it is preserved whenever `11011` is not.
pub fn claim_2eqs(x: &[u8], long: usize, single: usize) -> Check {
    let b = x[long];
    if x[single] != b || run_len_at(x, long) < 4 || run_len_at(x, single) != 1 {
        return Check::Skip;
    }
    let xb = BitString::new(x.to_vec()).unwrap();
    let y = delete_positions(x, &[long, single]);
    let cnt = |v: &BitString, w: &str| count_occurrences(v, &m(w));
    if cnt(&xb, "1111") == cnt(&y, "1111") || cnt(&xb, "0000") == cnt(&y, "0000") {
        return Check::Skip;
    }
    let p6 = is_preserved(&xb, &y, &m("110011")).unwrap();
    if b == 0 && !changed(is_preserved(&xb, &y, &m("11011")).unwrap()) {
        return Check::Skip;
    }
    match p6 {
        Preservation::Preserved => Check::Holds,
        p => Check::Fails(format!("x={xb} b={b} delete {},{}: 110011 {p:?}", long + 1, single + 1)),
    }
}

/// A zero from a length-1 run is deleted, `110011` is created or destroyed
/// and `1111` is created; then `11011` is preserved and the run-hash
/// sequences differ in exactly one symbol.
pub fn claim_run_hash_single(x: &[u8], i: usize, s: usize) -> Check {
    if x[i] != 0 || run_len_at(x, i) != 1 {
        return Check::Skip;
    }
    let xb = BitString::new(x.to_vec()).unwrap();
    let y = delete_positions(x, &[i]);
    let p6 = is_preserved(&xb, &y, &m("110011")).unwrap();
    let p4 = is_preserved(&xb, &y, &m("1111")).unwrap();
    if !changed(p6) || !creates(p4) {
        return Check::Skip;
    }
    let p5 = is_preserved(&xb, &y, &m("11011")).unwrap();
    if p5 != Preservation::Preserved {
        return Check::Fails(format!("x={xb} delete {}: 11011 {p5:?}", i + 1));
    }
    let rh = RunHash::new(s).unwrap();
    let hx = hash_sequence(&xb, &m("11011"), &rh).unwrap();
    let hy = hash_sequence(&y, &m("11011"), &rh).unwrap();
    match hx.hamming_distance(&hy) {
        1 => Check::Holds,
        d => Check::Fails(format!("x={xb} delete {}: run hashes differ in {d} symbols", i + 1)),
    }
}

/// A zero between a length-1 one-run and a one-run of length >= 3 is
/// deleted; then `tau_1(x)` is the only one-run profile among single-zero
/// supersequences of `y` that match `tau_>=2(x)` and the balance of `x`.
pub fn claim_tau1_recoverable(x: &[u8], i: usize, s: usize) -> Check {
    if x[i] != 0 || i == 0 || i + 1 == x.len() || run_len_at(x, i) != 1 {
        return Check::Skip;
    }
    let (l, r) = (run_len_at(x, i - 1), run_len_at(x, i + 1));
    if !((l == 1 && r >= 3) || (r == 1 && l >= 3)) {
        return Check::Skip;
    }
    let xb = BitString::new(x.to_vec()).unwrap();
    let y = delete_positions(x, &[i]);
    let px = run_profile(&xb);
    let b = balance_sum(&xb, s);
    let mut seen = BTreeSet::new();
    for z in naive_supersequences(y.as_slice(), 1) {
        if z.iter().filter(|&&v| v == 0).count() != x.iter().filter(|&&v| v == 0).count() {
            continue;
        }
        let zb = BitString::new(z).unwrap();
        let pz = run_profile(&zb);
        if pz.tau_ge2 == px.tau_ge2 && balance_sum(&zb, s) == b {
            seen.insert(pz.tau1);
        }
    }
    if seen.len() == 1 && seen.contains(&px.tau1) {
        Check::Holds
    } else {
        Check::Fails(format!("x={xb} delete {}: candidate profiles {seen:?}", i + 1))
    }
}

/// Random string of length `len` with `pattern` planted at a random offset.
/// Returns the string and the offset.
pub fn plant(rng: &mut ChaCha8Rng, len: usize, pattern: &str) -> (Vec<u8>, usize) {
    let p: Vec<u8> = pattern.bytes().map(|c| c - b'0').collect();
    let mut x = random_bits(rng, len);
    let at = rng.gen_range(0..=len - p.len());
    x[at..at + p.len()].copy_from_slice(&p);
    (x, at)
}

/// Counts of a claim check over many instances.
#[derive(Debug, Default)]
pub struct Tally {
    pub holds: u64,
    pub skipped: u64,
    pub failures: Vec<String>,
}

impl Tally {
    pub fn add(&mut self, c: Check) {
        match c {
            Check::Skip => self.skipped += 1,
            Check::Holds => self.holds += 1,
            Check::Fails(m) => self.failures.push(m),
        }
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.holds += other.holds;
        self.skipped += other.skipped;
        self.failures.extend(other.failures);
        self
    }
}

/// Targeted instances: plant patterns that make the premises likely, keep
/// drawing until `want` instances satisfy them.
pub fn targeted_if11011(seed: u64, want: u64) -> Tally {
    let mut r = rng(seed);
    let mut t = Tally::default();
    let patterns = [("11011", 2), ("11101011", 3), ("11010111", 5)];
    while t.holds + (t.failures.len() as u64) < want {
        let (pat, off) = patterns[r.gen_range(0..patterns.len())];
        let len = r.gen_range(pat.len() + 2..=28);
        let (x, at) = plant(&mut r, len, pat);
        t.add(claim_if11011(&x, at + off));
    }
    t
}

pub fn targeted_2eqs(seed: u64, want_each: u64) -> Tally {
    let mut r = rng(seed);
    let mut total = Tally::default();
    for b in [0u8, 1] {
        let mut t = Tally::default();
        while t.holds + (t.failures.len() as u64) < want_each {
            let len = r.gen_range(14..=30);
            let run = r.gen_range(4..=6);
            let mut x = random_bits(&mut r, len);
            let a = r.gen_range(0..=len - run);
            x[a..a + run].fill(b);
            let mut single = r.gen_range(0..len);
            // isolated b, away from the planted run
            for _ in 0..len {
                if single + 1 < a || single > a + run {
                    break;
                }
                single = r.gen_range(0..len);
            }
            if single + 1 >= a && single <= a + run {
                continue;
            }
            x[single] = b;
            if single > 0 {
                x[single - 1] = 1 - b;
            }
            if single + 1 < len {
                x[single + 1] = 1 - b;
            }
            if run_len_at(&x, a) < 4 {
                continue;
            }
            let long = a + r.gen_range(0..run);
            t.add(claim_2eqs(&x, long, single));
        }
        total = total.merge(t);
    }
    total
}

pub fn targeted_run_hash_single(seed: u64, want: u64) -> Tally {
    let mut r = rng(seed);
    let mut t = Tally::default();
    let patterns = [("111010011", 3), ("110010111", 5)];
    while t.holds + (t.failures.len() as u64) < want {
        let (pat, off) = patterns[r.gen_range(0..patterns.len())];
        let len = r.gen_range(pat.len() + 2..=28);
        let (x, at) = plant(&mut r, len, pat);
        t.add(claim_run_hash_single(&x, at + off, len));
    }
    t
}

pub fn targeted_tau1(seed: u64, want: u64) -> Tally {
    let mut r = rng(seed);
    let mut t = Tally::default();
    while t.holds + (t.failures.len() as u64) < want {
        let ell = r.gen_range(3..=6);
        let pat = if r.gen_bool(0.5) {
            format!("0{}0{}0", "1", "1".repeat(ell))
        } else {
            format!("0{}0{}0", "1".repeat(ell), "1")
        };
        let len = r.gen_range(pat.len() + 1..=30);
        let (x, at) = plant(&mut r, len, &pat);
        let zero = at + if pat.as_bytes()[2] == b'0' { 2 } else { ell + 1 };
        t.add(claim_tau1_recoverable(&x, zero, len));
    }
    t
}

/// Every string of length `n` and every applicable deletion.
pub fn exhaustive_single<F>(n: usize, check: F) -> Tally
where
    F: Fn(&[u8], usize) -> Check + Sync,
{
    use rayon::prelude::*;
    (0..1u32 << n)
        .into_par_iter()
        .map(|v| {
            let x: Vec<u8> = (0..n).map(|i| ((v >> (n - 1 - i)) & 1) as u8).collect();
            let mut t = Tally::default();
            for i in 0..n {
                t.add(check(&x, i));
            }
            t
        })
        .reduce(Tally::default, Tally::merge)
}

pub fn exhaustive_2eqs(n: usize) -> Tally {
    use rayon::prelude::*;
    (0..1u32 << n)
        .into_par_iter()
        .map(|v| {
            let x: Vec<u8> = (0..n).map(|i| ((v >> (n - 1 - i)) & 1) as u8).collect();
            let mut t = Tally::default();
            for long in 0..n {
                for single in 0..n {
                    if long != single {
                        t.add(claim_2eqs(&x, long, single));
                    }
                }
            }
            t
        })
        .reduce(Tally::default, Tally::merge)
}
