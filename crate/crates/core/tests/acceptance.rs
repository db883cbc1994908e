//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use common::*;
use twodel::analysis::{
    eq2_bound, eq3_bound, exact_density, gap_probability_bound, minimal_constant,
    monte_carlo_membership, redundancy_report, whole_string_bound,
};
use twodel::construction::{
    constrained_set_size, enumerate_codebook, select_targets, verify_codewords, CodeSpace, Construction,
};
use twodel::gf::{ComponentCode, Field};
use twodel::hashing::{invert_segment, HashFamily};
use twodel::BitString;

// pinned tolerances
const FORMULA_REL_TOL: f64 = 1e-6;
const BOUND_ABS_TOL: f64 = 1e-12;
const RATIO_CEILING: f64 = 0.2;
const CLAIM_INSTANCES: u64 = 10_000;
const HASH_SAMPLED_PAIRS: u64 = 100_000;
const CODE_RANDOM_TRIALS: u64 = 100_000;
const DENSITY_TRIALS: u64 = 200_000;

type Outcome = Result<String, String>;

const BOTH: [Construction; 2] = [Construction::One, Construction::Two];

fn space(n: usize, s: usize, c: Construction) -> CodeSpace {
    CodeSpace::for_length(n, s, c, None).expect("code space")
}

fn exhaustive_correctability() -> Outcome {
    let mut words = 0;
    let mut received = 0;
    let mut own = 0;
    for n in 10..=14 {
        for c in BOTH {
            let sp = space(n, n, c);
            let sel = select_targets(&sp).map_err(|e| e.to_string())?;
            let code = sp.with_targets(sel.targets).unwrap();
            let book = enumerate_codebook(&code).unwrap();
            let r = verify_codewords(&code, &book, false).unwrap();
            if let Some(ce) = r.counterexample {
                return Err(format!("n={n} c={c}: x={} y={}: {}", ce.x, ce.y, ce.result));
            }
            words += r.codewords;
            received += r.received;

            // every constrained string under its own targets
            let fails: Vec<String> = (0..1u64 << n)
                .into_par_iter()
                .filter_map(|v| {
                    let x = BitString::from_value(v, n);
                    let t = sp.profile(&x).ok()?;
                    let code = sp.with_targets(t).unwrap();
                    let r = verify_codewords(&code, &[x], false).unwrap();
                    r.counterexample.map(|ce| format!("n={n} c={c}: x={} y={}: {}", ce.x, ce.y, ce.result))
                })
                .collect();
            if let Some(f) = fails.first() {
                return Err(format!("{} failures under own targets, first {f}", fails.len()));
            }
            own += constrained_set_size(&sp).unwrap();
        }
    }
    Ok(format!(
        "n=10..14, s=n, both constructions: {words} codewords / {received} received words in selected codebooks, \
         {own} constrained strings under their own targets, 0 failures"
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut words = 0;
    for n in 10..=14 {
        for c in BOTH {
            let sp = space(n, n, c);
            let sel = select_targets(&sp).unwrap();
            let code = sp.with_targets(sel.targets).unwrap();
            let book = enumerate_codebook(&code).unwrap();
            let r = verify_codewords(&code, &book, true).unwrap();
            if let Some(ce) = r.counterexample {
                return Err(format!("n={n} c={c}: x={} y={}: {}", ce.x, ce.y, ce.result));
            }
            // independent disjointness check on the two-deletion balls
            let mut seen = BTreeSet::new();
            for x in &book {
                for y in naive_subsequences(x.as_slice(), 2).into_iter().filter(|y| y.len() + 2 == n) {
                    if !seen.insert(y.clone()) {
                        return Err(format!("n={n} c={c}: deletion balls overlap at {y:?}"));
                    }
                }
            }
            words += book.len();
        }
    }
    // own-targets instances, where the oracle must also agree
    let mut own = 0u64;
    for n in 10..=12 {
        for c in BOTH {
            let sp = space(n, n, c);
            let fails: Vec<String> = (0..1u64 << n)
                .into_par_iter()
                .filter_map(|v| {
                    let x = BitString::from_value(v, n);
                    let t = sp.profile(&x).ok()?;
                    let code = sp.with_targets(t).unwrap();
                    let r = verify_codewords(&code, &[x], true).unwrap();
                    r.counterexample.map(|ce| format!("x={} y={}: {}", ce.x, ce.y, ce.result))
                })
                .collect();
            if let Some(f) = fails.first() {
                return Err(format!("n={n} c={c}: {f}"));
            }
            own += constrained_set_size(&sp).unwrap();
        }
    }
    Ok(format!(
        "oracle agrees and finds one candidate on all {words} selected codewords (n=10..14) and {own} own-target strings (n=10..12); balls disjoint"
    ))
}

fn confusable(a: &BTreeSet<Vec<u8>>, b: &BTreeSet<Vec<u8>>) -> bool {
    a.iter().any(|v| b.contains(v))
}

fn all_strings_up_to(s: usize) -> Vec<Vec<u8>> {
    (0..=s)
        .flat_map(|l| (0..1u32 << l).map(move |v| (0..l).map(|i| ((v >> (l - 1 - i)) & 1) as u8).collect()))
        .collect()
}

fn check_inversions(fam: &HashFamily, x: &[u8]) -> Result<u64, String> {
    let xb = BitString::new(x.to_vec()).unwrap();
    let color = fam.color(&xb).unwrap();
    let mut count = 0;
    for t in 1..=2usize.min(x.len()) {
        for y in naive_subsequences(x, t).into_iter().filter(|y| y.len() + t == x.len()) {
            let yb = BitString::new(y).unwrap();
            let got = invert_segment(&yb, t, color, fam).map_err(|e| format!("x={xb}: {e}"))?;
            if got != xb {
                return Err(format!("x={xb} y={yb}: recovered {got}"));
            }
            count += 1;
        }
    }
    Ok(count)
}

fn hash_family_contract() -> Outcome {
    let fam = HashFamily::build(6).unwrap();
    let strings = all_strings_up_to(6);
    let balls: Vec<_> = strings.iter().map(|x| naive_subsequences(x, 2)).collect();
    let mut pairs = 0u64;
    for i in 0..strings.len() {
        for j in i + 1..strings.len() {
            if confusable(&balls[i], &balls[j]) {
                pairs += 1;
                let ci = fam.color(&BitString::new(strings[i].clone()).unwrap());
                let cj = fam.color(&BitString::new(strings[j].clone()).unwrap());
                if ci == cj {
                    return Err(format!("s=6: {:?} and {:?} share a color", strings[i], strings[j]));
                }
            }
        }
    }
    let mut inversions = 0;
    for x in &strings {
        inversions += check_inversions(&fam, x)?;
    }

    let fam10 = Arc::new(HashFamily::build(10).unwrap());
    let results: Vec<Result<(bool, u64), String>> = (0..HASH_SAMPLED_PAIRS)
        .into_par_iter()
        .map(|k| {
            let mut r = rng(0xC0FFEE ^ k);
            let lu = r.gen_range(0..=10);
            let u = random_bits(&mut r, lu);
            // bias towards near neighbours so confusable pairs are common
            let v = if r.gen_bool(0.5) {
                let mut v = u.clone();
                for _ in 0..r.gen_range(1..=2) {
                    if !v.is_empty() {
                        let i = r.gen_range(0..v.len());
                        v.remove(i);
                    }
                }
                for _ in 0..r.gen_range(0..=2) {
                    if v.len() < 10 {
                        let i = r.gen_range(0..=v.len());
                        v.insert(i, r.gen_range(0..2));
                    }
                }
                v
            } else {
                let lv = r.gen_range(0..=10);
                random_bits(&mut r, lv)
            };
            if u == v {
                return Ok((false, 0));
            }
            let conf = confusable(&naive_subsequences(&u, 2), &naive_subsequences(&v, 2));
            let cu = fam10.color(&BitString::new(u.clone()).unwrap());
            if conf && cu == fam10.color(&BitString::new(v.clone()).unwrap()) {
                return Err(format!("s=10: {u:?} and {v:?} share a color"));
            }
            let inv = if k % 10 == 0 { check_inversions(&fam10, &u)? } else { 0 };
            Ok((conf, inv))
        })
        .collect();
    let mut conf10 = 0;
    let mut inv10 = 0;
    for r in results {
        let (c, i) = r?;
        conf10 += c as u64;
        inv10 += i;
    }
    Ok(format!(
        "s=6 exhaustive: {pairs} confusable pairs distinctly colored, {inversions} inversions exact; \
         s=10: {HASH_SAMPLED_PAIRS} sampled pairs ({conf10} confusable) distinctly colored, {inv10} inversions exact"
    ))
}

fn claim_suite() -> Outcome {
    let mut lines = Vec::new();
    let suites: Vec<(&str, Tally, Tally)> = vec![
        (
            "if11011",
            targeted_if11011(11, CLAIM_INSTANCES),
            exhaustive_single(14, claim_if11011),
        ),
        ("2eqs", targeted_2eqs(12, CLAIM_INSTANCES), exhaustive_2eqs(14)),
        (
            "run-hash",
            targeted_run_hash_single(13, CLAIM_INSTANCES),
            exhaustive_single(14, |x, i| claim_run_hash_single(x, i, 14)),
        ),
        (
            "tau1",
            targeted_tau1(14, CLAIM_INSTANCES),
            exhaustive_single(14, |x, i| claim_tau1_recoverable(x, i, 14)),
        ),
    ];
    for (name, targeted, exhaustive) in suites {
        for t in [&targeted, &exhaustive] {
            if let Some(f) = t.failures.first() {
                return Err(format!("{name}: {} failures, first {f}", t.failures.len()));
            }
        }
        if targeted.holds < CLAIM_INSTANCES {
            return Err(format!("{name}: only {} targeted instances", targeted.holds));
        }
        lines.push(format!("{name} {}+{}", targeted.holds, exhaustive.holds));
    }
    Ok(format!("targeted + exhaustive(n=14) instances, all hold: {}", lines.join(", ")))
}

fn corrupt(word: &[u64], code: &ComponentCode, positions: &[usize], r: &mut rand_chacha::ChaCha8Rng) -> Vec<u64> {
    let p = code.field().characteristic();
    let mut w = word.to_vec();
    for &i in positions {
        w[i] = (w[i] + r.gen_range(1..p)) % p;
    }
    w
}

fn expect_fix(code: &ComponentCode, sent: &[u64], got: &[u64], t: usize) -> Result<(), String> {
    let corr = if t == 2 { code.correct_up_to_2(got) } else { code.correct_up_to_1(got) };
    match corr {
        Ok(c) if c.word == sent => Ok(()),
        Ok(c) => Err(format!("sent {sent:?}, received {got:?}, decoded {:?}", c.word)),
        Err(e) => Err(format!("sent {sent:?}, received {got:?}: {e}")),
    }
}

fn component_codes() -> Outcome {
    let f25 = Arc::new(Field::new(5, 2).unwrap());
    let mut patterns = 0u64;
    let mut r = rng(5);
    for len in 1..=8usize {
        let d5 = ComponentCode::distance5(f25.clone(), len).unwrap();
        let d3 = ComponentCode::distance3(f25.clone(), len).unwrap();
        let mut bases = vec![vec![0u64; len]];
        bases.extend((0..8).map(|_| (0..len).map(|_| r.gen_range(0..5)).collect()));
        for base in bases {
            let c5 = d5.with_target(d5.syndromes(&base).unwrap()).unwrap();
            let c3 = d3.with_target(d3.syndromes(&base).unwrap()).unwrap();
            expect_fix(&c5, &base, &base, 2)?;
            expect_fix(&c3, &base, &base, 1)?;
            for i in 0..len {
                for a in 1..5 {
                    let mut w = base.clone();
                    w[i] = (w[i] + a) % 5;
                    expect_fix(&c5, &base, &w, 2)?;
                    expect_fix(&c3, &base, &w, 1)?;
                    patterns += 2;
                    for j in i + 1..len {
                        for b in 1..5 {
                            let mut w2 = w.clone();
                            w2[j] = (w2[j] + b) % 5;
                            expect_fix(&c5, &base, &w2, 2)?;
                            patterns += 1;
                        }
                    }
                }
            }
        }
    }

    // working lengths: the component codes of a real parameter set
    let sp = space(2000, 16, Construction::Two);
    let d5 = sp.distance5().clone();
    let d3 = sp.distance3().unwrap().clone();
    let (q1, q2) = (d5.field().characteristic(), d3.field().characteristic());
    let fails: Vec<String> = (0..CODE_RANDOM_TRIALS)
        .into_par_iter()
        .filter_map(|k| {
            let mut r = rng(0xD5 ^ (k << 8));
            let (code, q, t) = if k % 2 == 0 { (&d5, q1, 2) } else { (&d3, q2, 1) };
            let n = code.length();
            let sent: Vec<u64> = (0..n).map(|_| r.gen_range(0..q)).collect();
            let code = code.with_target(code.syndromes(&sent).unwrap()).unwrap();
            let weight = r.gen_range(0..=t);
            let mut pos = BTreeSet::new();
            while pos.len() < weight {
                pos.insert(r.gen_range(0..n));
            }
            let got = corrupt(&sent, &code, &pos.into_iter().collect::<Vec<_>>(), &mut r);
            expect_fix(&code, &sent, &got, t).err()
        })
        .collect();
    if let Some(f) = fails.first() {
        return Err(format!("{} random failures, first {}", fails.len(), &f[..f.len().min(200)]));
    }
    Ok(format!(
        "F25 lengths 1..8: {patterns} weight<=2 / weight<=1 patterns corrected; \
         {CODE_RANDOM_TRIALS} random trials at length 2000 over F_{q1}^{} and F_{q2}^{}",
        d5.field().degree(),
        d3.field().degree()
    ))
}

// high-precision references (mpmath, 40 digits)
const EQ2_REF: [(f64, f64); 3] = [
    (10.0, 148.203_233_346_921_807),
    (20.0, 180.866_617_437_013_206),
    (30.0, 209.659_597_569_871_146),
];
const EQ3_REF: [(f64, f64); 3] = [
    (10.0, 24.381_516_283_571_275_9),
    (20.0, 35.378_636_292_291_989_5),
    (30.0, 45.963_573_467_476_678_0),
];
const TOTAL_REF: [(f64, f64); 3] = [
    (10.0, 499.214_047_124_646_543),
    (20.0, 609.201_251_676_249_432),
    (30.0, 706.750_069_174_225_188),
];

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn redundancy_formulas() -> Outcome {
    let mut worst = 0f64;
    for ((k, e2), ((_, e3), (_, tot))) in EQ2_REF.iter().zip(EQ3_REF.iter().zip(TOTAL_REF.iter())) {
        for (name, got, want) in [
            ("eq2", eq2_bound(*k), *e2),
            ("eq3", eq3_bound(*k), *e3),
            ("total", redundancy_report(*k).total, *tot),
        ] {
            let e = rel(got, want);
            worst = worst.max(e);
            if e > FORMULA_REL_TOL {
                return Err(format!("{name} at 2^{k}: {got} vs {want} (rel {e:e})"));
            }
        }
    }
    let ratios: Vec<f64> = (10..=30)
        .map(|k| redundancy_report(k as f64))
        .map(|r| r.total / r.baseline_total)
        .collect();
    if !ratios.windows(2).all(|w| w[1] < w[0]) {
        return Err(format!("ratio not decreasing: {ratios:?}"));
    }
    let last = *ratios.last().unwrap();
    if last >= RATIO_CEILING {
        return Err(format!("ratio at 2^30 is {last}"));
    }
    Ok(format!(
        "eq2/eq3/total within {worst:.1e} relative of reference at 2^10, 2^20, 2^30 (tol {FORMULA_REL_TOL:e}); \
         eq2(2^20) = {:.4}; total/(128 log2 n) falls from {:.4} to {last:.4} < {RATIO_CEILING}",
        eq2_bound(20.0),
        ratios[0]
    ))
}

fn constraint_bounds() -> Outcome {
    // independent: smallest integer c with c > 6 * 2^8 * ln 2
    let c = (1u64..).find(|&c| c as f64 > 6.0 * 256.0 * std::f64::consts::LN_2).unwrap();
    if minimal_constant(6) != 1065 || c != 1065 {
        return Err(format!("minimal constant {} (independent {c})", minimal_constant(6)));
    }
    let g = gap_probability_bound(128.0, 4.0);
    let want = 1.0 - (-1f64).exp();
    if (g - want).abs() > BOUND_ABS_TOL {
        return Err(format!("gap bound {g} vs {want}"));
    }
    let mut notes = Vec::new();
    for (n, s) in [(10, 9), (10, 10), (16, 12), (18, 14), (30, 16), (40, 20)] {
        let est = monte_carlo_membership(n, s, Construction::Two, DENSITY_TRIALS, 7).unwrap();
        let bound = whole_string_bound(n as f64, s as f64);
        if est.ci_high < bound {
            return Err(format!("n={n} s={s}: density CI {:?} below bound {bound}", (est.ci_low, est.ci_high)));
        }
        let mut note = format!("({n},{s}) {:.5}>={bound:.1e}", est.estimate);
        if n <= 18 {
            let exact = exact_density(n, s, Construction::Two).unwrap();
            if exact < est.ci_low || exact > est.ci_high {
                return Err(format!(
                    "n={n} s={s}: exact {exact} outside CI [{}, {}]",
                    est.ci_low, est.ci_high
                ));
            }
            note.push_str(&format!(" exact {exact:.5} in CI"));
        }
        notes.push(note);
    }
    Ok(format!(
        "c=1065, 1-e^-1 within {BOUND_ABS_TOL:e}; density vs bound ({DENSITY_TRIALS} trials): {}",
        notes.join("; ")
    ))
}

fn pigeonhole() -> Outcome {
    let mut worst = f64::INFINITY;
    for n in 10..=14 {
        for c in BOTH {
            let sp = space(n, n, c);
            let sel = select_targets(&sp).unwrap();
            let p = sp.params();
            // log2 of 7^6 q1^(k r1) [q2^r2 (s+1)]
            let k = if c == Construction::One { 4.0 } else { 3.0 };
            let mut denom = 6.0 * 7f64.log2() + k * p.r1_impl as f64 * (p.q1 as f64).log2();
            if let (Some(q2), Some(r2)) = (p.q2, p.r2_impl) {
                denom += r2 as f64 * (q2 as f64).log2() + ((p.s + 1) as f64).log2();
            }
            let margin = (sel.size as f64).log2() - ((sel.constrained as f64).log2() - denom);
            if margin < 0.0 {
                return Err(format!("n={n} c={c}: codebook {} below the averaging bound", sel.size));
            }
            worst = worst.min(margin);
        }
    }
    Ok(format!("selected codebook meets the averaging bound at every n=10..14, both constructions (min margin {worst:.1} bits)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("exhaustive correctability", exhaustive_correctability),
        ("oracle equivalence", oracle_equivalence),
        ("hash family contract", hash_family_contract),
        ("claim suite", claim_suite),
        ("component code round trip", component_codes),
        ("redundancy formulas", redundancy_formulas),
        ("constraint bounds", constraint_bounds),
        ("pigeonhole bound", pigeonhole),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS  {} {name} [{secs:.1}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {} {name} [{secs:.1}s]: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
