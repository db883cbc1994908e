//! Finite fields `F_{p^m}` and the syndrome-defined component codes.
//!
//! Elements are encoded as integers `sum c_i p^i` where `c_i` are the
//! coefficients of the polynomial representative. Multiplication goes
//! through log/exp tables, so field sizes are capped at [`MAX_FIELD_SIZE`].

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod primes {
    //! Small-integer number theory helpers.

    pub fn is_prime(n: u64) -> bool {
        primal_check::miller_rabin(n)
    }

    /// Smallest prime `>= n`.
    pub fn next_prime_at_least(n: u64) -> Option<u64> {
        (n.max(2)..).take_while(|&k| k < u64::MAX).find(|&k| is_prime(k))
    }

    /// Smallest prime `> n`.
    pub fn next_prime_above(n: u64) -> Option<u64> {
        next_prime_at_least(n.checked_add(1)?)
    }

    /// Smallest odd prime `> n`.
    pub fn next_odd_prime_above(n: u64) -> Option<u64> {
        next_prime_at_least(n.checked_add(1)?.max(3))
    }

    pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
        let m = m as u128;
        let mut acc: u128 = 1 % m;
        let mut b = base as u128 % m;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * b % m;
            }
            b = b * b % m;
            exp >>= 1;
        }
        base = acc as u64;
        base
    }

    /// Inverse of `a` modulo the prime `p`.
    pub fn mod_inverse(a: u64, p: u64) -> Option<u64> {
        (a % p != 0).then(|| mod_pow(a, p - 2, p))
    }

    /// Distinct prime factors in increasing order.
    pub fn prime_factors(mut n: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                out.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }
}

/// Largest field handled (table memory is 8 bytes per element).
pub const MAX_FIELD_SIZE: u64 = 1 << 22;

/// Field element in the integer encoding.
pub type Elem = u32;

/// `F_{p^m}` with a fixed modulus and primitive element.
pub struct Field {
    p: u32,
    m: u32,
    size: u32,
    modulus: Vec<u32>,
    primitive: Elem,
    exp: Vec<Elem>,
    log: Vec<u32>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .field("primitive", &self.primitive)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for Field {}

// Polynomials over F_p as coefficient vectors, lowest degree first.
fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let m = modulus.len() - 1;
    let p64 = p as u64;
    let mut prod = vec![0u64; 2 * m];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p64;
        }
    }
    // modulus is monic: x^m = -sum_{k<m} modulus[k] x^k
    for d in (m..prod.len()).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        prod[d] = 0;
        for k in 0..m {
            prod[d - m + k] = (prod[d - m + k] + (p64 - c) * modulus[k] as u64) % p64;
        }
    }
    prod.truncate(m);
    prod.into_iter().map(|c| c as u32).collect()
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    // b monic
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let db = b.len() - 1;
    let p64 = p as u64;
    while r.len() > db {
        let c = r.pop().unwrap();
        if c == 0 {
            continue;
        }
        let shift = r.len() - db;
        for k in 0..db {
            r[shift + k] = (r[shift + k] + (p64 - c) * b[k] as u64) % p64;
        }
    }
    r.into_iter().map(|c| c as u32).collect()
}

fn digits(mut v: u64, p: u32, m: usize) -> Vec<u32> {
    (0..m)
        .map(|_| {
            let d = (v % p as u64) as u32;
            v /= p as u64;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u64 {
    d.iter().rev().fold(0u64, |acc, &c| acc * p as u64 + c as u64)
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let m = f.len() - 1;
    for deg in 1..=m / 2 {
        for low in 0..(p as u64).pow(deg as u32) {
            let mut g = digits(low, p, deg);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// Builds `F_{p^m}`. The modulus is the first monic irreducible of degree
    /// `m` when the lower coefficients are read as a base-`p` number with
    /// the constant term least significant; the primitive element is the
    /// smallest encoded element of full order.
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !primes::is_prime(p) {
            return Err(Error::arg(format!("field characteristic {p} is not prime")));
        }
        if m == 0 {
            return Err(Error::arg("extension degree must be at least 1"));
        }
        let size = (p as u128).checked_pow(m).filter(|&q| q <= MAX_FIELD_SIZE as u128);
        let Some(size) = size else {
            return Err(Error::arg(format!(
                "field of size {p}^{m} exceeds the supported maximum {MAX_FIELD_SIZE}"
            )));
        };
        let (p, size) = (p as u32, size as u32);
        let mu = m as usize;
        let modulus = (0..(size as u64))
            .map(|low| {
                let mut f = digits(low, p, mu);
                f.push(1);
                f
            })
            .find(|f| is_irreducible(f, p))
            .expect("irreducible polynomials exist in every degree");

        let mul_slow = |a: Elem, b: Elem| -> Elem {
            undigits(
                &poly_mulmod(&digits(a as u64, p, mu), &digits(b as u64, p, mu), &modulus, p),
                p,
            ) as Elem
        };
        let pow_slow = |a: Elem, mut e: u64| -> Elem {
            let (mut acc, mut b) = (1, a);
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul_slow(acc, b);
                }
                b = mul_slow(b, b);
                e >>= 1;
            }
            acc
        };
        let order = size as u64 - 1;
        let factors = primes::prime_factors(order);
        let primitive = if size == 2 {
            1
        } else {
            (2..size)
                .find(|&g| factors.iter().all(|&r| pow_slow(g, order / r) != 1))
                .expect("multiplicative group is cyclic")
        };

        let mut exp = vec![0; order as usize];
        let mut log = vec![u32::MAX; size as usize];
        let mut cur = 1;
        for (k, slot) in exp.iter_mut().enumerate() {
            *slot = cur;
            log[cur as usize] = k as u32;
            cur = mul_slow(cur, primitive);
        }
        Ok(Field {
            p,
            m,
            size,
            modulus,
            primitive,
            exp,
            log,
        })
    }

    pub fn characteristic(&self) -> u64 {
        self.p as u64
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn size(&self) -> u64 {
        self.size as u64
    }

    /// Monic modulus, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn primitive(&self) -> Elem {
        self.primitive
    }

    /// Order of the multiplicative group.
    pub fn order(&self) -> u64 {
        self.size as u64 - 1
    }

    pub fn contains(&self, a: Elem) -> bool {
        a < self.size
    }

    /// Embeds an element of the prime subfield.
    pub fn base(&self, v: u64) -> Elem {
        (v % self.p as u64) as Elem
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.m == 1 {
            return ((a as u64 + b as u64) % self.p as u64) as Elem;
        }
        let (mut a, mut b, mut out, mut place) = (a, b, 0u32, 1u32);
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place = place.wrapping_mul(self.p);
        }
        out
    }

    pub fn neg(&self, a: Elem) -> Elem {
        if self.m == 1 {
            return (self.p - a % self.p) % self.p;
        }
        let (mut a, mut out, mut place) = (a, 0u32, 1u32);
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place = place.wrapping_mul(self.p);
        }
        out
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let k = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % self.order();
        self.exp[k as usize]
    }

    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            return None;
        }
        let k = (self.order() - self.log[a as usize] as u64) % self.order();
        Some(self.exp[k as usize])
    }

    pub fn div(&self, a: Elem, b: Elem) -> Option<Elem> {
        Some(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let k = (self.log[a as usize] as u128 * e as u128 % self.order() as u128) as usize;
        self.exp[k]
    }

    /// `alpha^k`.
    pub fn alpha_pow(&self, k: u64) -> Elem {
        self.exp[(k % self.order()) as usize]
    }

    /// Discrete log base the primitive element.
    pub fn log(&self, a: Elem) -> Option<u64> {
        (a != 0 && a < self.size).then(|| self.log[a as usize] as u64)
    }

    /// A square root of `a`, if one exists.
    pub fn sqrt(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            return Some(0);
        }
        let k = self.log(a)?;
        if self.p == 2 {
            // squaring is a bijection; order is odd
            let half = (k + if k % 2 == 1 { self.order() } else { 0 }) / 2;
            return Some(self.alpha_pow(half));
        }
        (k % 2 == 0).then(|| self.alpha_pow(k / 2))
    }
}

/// Parameters of a syndrome-defined code, as recorded in parameter files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeShape {
    pub p: u64,
    pub m: u32,
    pub length: usize,
    /// Exponent of the first root `alpha^first_root`.
    pub first_root: u32,
    pub roots: usize,
}

/// One corrected position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolFix {
    pub position: usize,
    pub received: u64,
    pub corrected: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correction {
    pub word: Vec<u64>,
    pub fixes: Vec<SymbolFix>,
}

/// The code `{ c : sum_i c_i alpha^{j i} = target_j, j in roots }` over the
/// prime subfield, with consecutive roots `alpha^b, ..., alpha^{b+r-1}`.
///
/// Symbols are integers below `p`; syndromes live in `F_{p^m}`. Distance is
/// `r + 1`.
#[derive(Debug, Clone)]
pub struct ComponentCode {
    field: Arc<Field>,
    length: usize,
    first_root: u32,
    roots: usize,
    target: Vec<Elem>,
    // powers[j][i] = alpha^{(b+j) i}
    powers: Arc<Vec<Vec<Elem>>>,
}

impl ComponentCode {
    pub fn new(field: Arc<Field>, length: usize, first_root: u32, roots: usize) -> Result<Self> {
        if length as u64 > field.order() {
            return Err(Error::arg(format!(
                "block length {length} exceeds the order {} of alpha",
                field.order()
            )));
        }
        if roots == 0 {
            return Err(Error::arg("a code needs at least one root"));
        }
        let powers = (0..roots)
            .map(|j| {
                let step = field.alpha_pow(first_root as u64 + j as u64);
                let mut cur = 1;
                (0..length)
                    .map(|_| {
                        let v = cur;
                        cur = field.mul(cur, step);
                        v
                    })
                    .collect()
            })
            .collect();
        Ok(ComponentCode {
            target: vec![0; roots],
            field,
            length,
            first_root,
            roots,
            powers: Arc::new(powers),
        })
    }

    /// Distance-5 code with roots `alpha^1 .. alpha^4`.
    pub fn distance5(field: Arc<Field>, length: usize) -> Result<Self> {
        Self::new(field, length, 1, 4)
    }

    /// Distance-3 code with roots `1, alpha`.
    pub fn distance3(field: Arc<Field>, length: usize) -> Result<Self> {
        Self::new(field, length, 0, 2)
    }

    /// Same code with a different syndrome target.
    pub fn with_target(&self, target: Vec<Elem>) -> Result<Self> {
        if target.len() != self.roots || target.iter().any(|&t| !self.field.contains(t)) {
            return Err(Error::arg("syndrome target does not match the code"));
        }
        Ok(ComponentCode {
            target,
            ..self.clone()
        })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn target(&self) -> &[Elem] {
        &self.target
    }

    pub fn designed_distance(&self) -> usize {
        self.roots + 1
    }

    /// Redundancy in prime-field symbols.
    pub fn redundancy(&self) -> usize {
        self.roots * self.field.degree() as usize
    }

    pub fn shape(&self) -> CodeShape {
        CodeShape {
            p: self.field.characteristic(),
            m: self.field.degree(),
            length: self.length,
            first_root: self.first_root,
            roots: self.roots,
        }
    }

    /// Syndromes of `seq`; shorter inputs are zero-padded on the right.
    pub fn syndromes(&self, seq: &[u64]) -> Result<Vec<Elem>> {
        if seq.len() > self.length {
            return Err(Error::arg(format!(
                "sequence of length {} exceeds block length {}",
                seq.len(),
                self.length
            )));
        }
        let p = self.field.characteristic();
        if let Some(&bad) = seq.iter().find(|&&v| v >= p) {
            return Err(Error::arg(format!("symbol {bad} is outside F_{p}")));
        }
        let f = &self.field;
        Ok(self
            .powers
            .iter()
            .map(|row| {
                seq.iter()
                    .zip(row)
                    .filter(|(&v, _)| v != 0)
                    .fold(0, |acc, (&v, &a)| f.add(acc, f.mul(v as Elem, a)))
            })
            .collect())
    }

    pub fn is_codeword(&self, seq: &[u64]) -> bool {
        self.syndromes(seq).map(|s| s == self.target).unwrap_or(false)
    }

    fn deviations(&self, seq: &[u64]) -> Result<Vec<Elem>> {
        let s = self.syndromes(seq)?;
        Ok(s.iter().zip(&self.target).map(|(&a, &t)| self.field.sub(a, t)).collect())
    }

    fn position_of(&self, x: Elem) -> Option<usize> {
        let k = self.field.log(x)?;
        ((k as usize) < self.length).then_some(k as usize)
    }

    // error value from Z = Y * X^b
    fn magnitude(&self, z: Elem, x: Elem) -> Option<u64> {
        let f = &self.field;
        let y = f.div(z, f.pow(x, self.first_root as u64))?;
        (y != 0 && (y as u64) < f.characteristic()).then_some(y as u64)
    }

    fn apply(&self, seq: &[u64], errs: &[(usize, u64)]) -> Result<Correction> {
        let p = self.field.characteristic();
        let mut word = seq.to_vec();
        word.resize(self.length, 0);
        let mut fixes = Vec::with_capacity(errs.len());
        for &(pos, y) in errs {
            let received = word[pos];
            let corrected = (received + p - y) % p;
            word[pos] = corrected;
            fixes.push(SymbolFix {
                position: pos,
                received,
                corrected,
            });
        }
        fixes.sort_by_key(|f| f.position);
        if self.syndromes(&word)? != self.target {
            return Err(Error::decode("correction failed the syndrome post-check"));
        }
        Ok(Correction { word, fixes })
    }

    fn single_error(&self, d: &[Elem]) -> Option<(usize, u64)> {
        let f = &self.field;
        let x = f.div(d[1], d[0])?;
        // remaining deviations must follow the geometric progression
        for j in 2..d.len() {
            if d[j] != f.mul(d[j - 1], x) {
                return None;
            }
        }
        Some((self.position_of(x)?, self.magnitude(d[0], x)?))
    }

    /// Corrects up to one substitution. The result is zero-padded to the block length.
    pub fn correct_up_to_1(&self, seq: &[u64]) -> Result<Correction> {
        if self.roots < 2 {
            return Err(Error::arg("single-error correction needs two roots"));
        }
        let d = self.deviations(seq)?;
        if d.iter().all(|&v| v == 0) {
            return self.apply(seq, &[]);
        }
        let e = self
            .single_error(&d)
            .ok_or_else(|| Error::decode("syndromes are not those of a single error"))?;
        self.apply(seq, &[e])
    }

    /// Corrects up to two substitutions (Peterson-Gorenstein-Zierler).
    pub fn correct_up_to_2(&self, seq: &[u64]) -> Result<Correction> {
        if self.roots < 4 {
            return Err(Error::arg("double-error correction needs four roots"));
        }
        let f = &self.field;
        let d = self.deviations(seq)?;
        if d.iter().all(|&v| v == 0) {
            return self.apply(seq, &[]);
        }
        let det = f.sub(f.mul(d[1], d[1]), f.mul(d[0], d[2]));
        if det == 0 {
            let e = self
                .single_error(&d)
                .ok_or_else(|| Error::decode("no codeword within distance 2"))?;
            return self.apply(seq, &[e]);
        }
        let l1 = f.div(f.sub(f.mul(d[0], d[3]), f.mul(d[1], d[2])), det).unwrap();
        let l2 = f.div(f.sub(f.mul(d[2], d[2]), f.mul(d[1], d[3])), det).unwrap();
        let (x1, x2) = self
            .quadratic_roots(l1, l2)
            .ok_or_else(|| Error::decode("error locator has no two distinct roots"))?;
        let z2 = f
            .div(f.sub(d[1], f.mul(x1, d[0])), f.sub(x2, x1))
            .ok_or_else(|| Error::decode("degenerate error locator"))?;
        let z1 = f.sub(d[0], z2);
        let fail = || Error::decode("error location or value out of range");
        let e1 = (self.position_of(x1).ok_or_else(fail)?, self.magnitude(z1, x1).ok_or_else(fail)?);
        let e2 = (self.position_of(x2).ok_or_else(fail)?, self.magnitude(z2, x2).ok_or_else(fail)?);
        self.apply(seq, &[e1, e2])
    }

    // Distinct nonzero roots of X^2 + l1 X + l2.
    fn quadratic_roots(&self, l1: Elem, l2: Elem) -> Option<(Elem, Elem)> {
        let f = &self.field;
        if l2 == 0 {
            return None;
        }
        if f.characteristic() == 2 {
            let roots: Vec<Elem> = (0..self.length as u64)
                .map(|i| f.alpha_pow(i))
                .filter(|&x| f.add(f.add(f.mul(x, x), f.mul(l1, x)), l2) == 0)
                .collect();
            return match roots[..] {
                [a, b] => Some((a, b)),
                _ => None,
            };
        }
        let disc = f.sub(f.mul(l1, l1), f.mul(f.base(4), l2));
        if disc == 0 {
            return None;
        }
        let r = f.sqrt(disc)?;
        let half = f.inv(f.base(2))?;
        let minus_l1 = f.neg(l1);
        Some((
            f.mul(f.add(minus_l1, r), half),
            f.mul(f.sub(minus_l1, r), half),
        ))
    }
}
