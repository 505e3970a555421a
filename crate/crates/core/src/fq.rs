//! The finite constant field F_q, q = p^e.
//!
//! Elements are encoded as `u32` codes: the base-p digits of a code are the
//! coefficients (lowest first) of a polynomial in the generator `z` reduced
//! modulo the defining polynomial. For `e = 1` the code is simply the residue.

use crate::error::{Error, Result};

/// Largest field size supported by the table-driven arithmetic.
pub const MAX_Q: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteField {
    p: u32,
    e: u32,
    q: u32,
    /// Defining polynomial of F_q over F_p, lowest coefficient first, monic of degree e.
    modulus: Vec<u32>,
    /// Tables for e > 1: `exp[i] = z^i`, `log[exp[i]] = i`.
    exp: Vec<u32>,
    log: Vec<u32>,
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits a prime power into `(p, e)`.
pub fn split_prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 || q > u32::MAX as u64 {
        return None;
    }
    let q = q as u32;
    let mut p = 2u32;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    if !is_prime(p) {
        return None;
    }
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

impl FiniteField {
    pub fn new(p: u32, e: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidConfig(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(Error::InvalidConfig("extension degree must be positive".into()));
        }
        let q = (p as u64).checked_pow(e).filter(|&q| q <= MAX_Q || e == 1);
        let q = match q {
            Some(q) if q <= u32::MAX as u64 => q as u32,
            _ => return Err(Error::InvalidConfig(format!("q = {p}^{e} exceeds the supported size {MAX_Q}"))),
        };
        if e == 1 {
            return Ok(FiniteField { p, e, q, modulus: vec![0, 1], exp: Vec::new(), log: Vec::new() });
        }
        let (modulus, exp) = primitive_modulus(p, e);
        let mut log = vec![0u32; q as usize];
        for (i, &x) in exp.iter().enumerate() {
            log[x as usize] = i as u32;
        }
        Ok(FiniteField { p, e, q, modulus, exp, log })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Defining polynomial of the generator `z`, lowest coefficient first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    /// Code of the generator `z` of F_q over F_p; 1 when e = 1.
    pub fn generator(&self) -> u32 {
        if self.e == 1 {
            1
        } else {
            self.p
        }
    }

    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.e == 1 {
            let s = a as u64 + b as u64;
            return (s % self.p as u64) as u32;
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0u32, 1u32);
        while a > 0 || b > 0 {
            let d = (a % self.p + b % self.p) % self.p;
            out += d * place;
            place = place.wrapping_mul(self.p);
            a /= self.p;
            b /= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.e == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let (mut a, mut out, mut place) = (a, 0u32, 1u32);
        while a > 0 {
            let d = a % self.p;
            out += ((self.p - d) % self.p) * place;
            place = place.wrapping_mul(self.p);
            a /= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.e == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let n = self.q - 1;
        let i = (self.log[a as usize] + self.log[b as usize]) % n;
        self.exp[i as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        if self.e == 1 {
            return Some(self.pow(a, (self.p - 2) as u64));
        }
        let n = self.q - 1;
        let i = (n - self.log[a as usize]) % n;
        Some(self.exp[i as usize])
    }

    pub fn pow(&self, a: u32, mut k: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// Base-p digits of a code (coefficients in `z`, lowest first).
    pub fn digits(&self, a: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.e as usize);
        let mut a = a;
        for _ in 0..self.e {
            out.push(a % self.p);
            a /= self.p;
        }
        out
    }
}

/// Finds the first monic degree-e polynomial over F_p (ordered by its code)
/// for which `z` generates the multiplicative group; returns it with the
/// power table of `z`.
fn primitive_modulus(p: u32, e: u32) -> (Vec<u32>, Vec<u32>) {
    let q = p.pow(e);
    for tail in 0..q {
        let mut modulus: Vec<u32> = (0..e).map(|i| (tail / p.pow(i)) % p).collect();
        modulus.push(1);
        if modulus[0] == 0 {
            continue;
        }
        if let Some(table) = power_table(p, e, &modulus) {
            return (modulus, table);
        }
    }
    unreachable!("a primitive polynomial of every degree exists")
}

fn power_table(p: u32, e: u32, modulus: &[u32]) -> Option<Vec<u32>> {
    let q = p.pow(e);
    let e = e as usize;
    let mut cur = vec![0u32; e];
    cur[0] = 1;
    let mut table = Vec::with_capacity(q as usize - 1);
    let encode = |v: &[u32]| v.iter().rev().fold(0u32, |acc, &d| acc * p + d);
    for step in 0..(q - 1) {
        let code = encode(&cur);
        if step > 0 && code == 1 {
            return None;
        }
        table.push(code);
        // multiply by z
        let top = cur[e - 1];
        for i in (1..e).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        for i in 0..e {
            cur[i] = (cur[i] + (p - (top * modulus[i]) % p)) % p;
        }
    }
    (encode(&cur) == 1).then_some(table)
}
