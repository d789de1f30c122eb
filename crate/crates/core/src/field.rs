//! Exact arithmetic in GF(p^f).
//!
//! Elements are stored by their integer encoding `enc(a) = sum coeffs[i] * p^i`,
//! where `coeffs` are the coordinates of `a` in the polynomial basis
//! `1, x, ..., x^(f-1)` modulo the field's defining polynomial. The prime
//! subfield therefore encodes as `0..p`, and `enc(0) = 0`, `enc(1) = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order accepted by [`FieldSpec::new`].
pub const DEFAULT_MAX_ORDER: u64 = 1 << 20;

/// Fields up to this order get log/antilog tables.
const TABLE_MAX_ORDER: u32 = 1 << 16;

/// A field element, identified by its encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fe(u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn enc(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for Fe {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Three-way quadratic character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadraticClass {
    Zero,
    NonzeroSquare,
    NonSquare,
}

#[derive(Debug)]
struct LogTables {
    log: Vec<u32>,
    exp: Vec<u32>,
}

/// GF(p^f) together with its defining polynomial.
#[derive(Debug)]
pub struct FieldSpec {
    p: u32,
    f: u32,
    q: u32,
    /// Monic defining polynomial, low degree first, length `f + 1`.
    modulus: Vec<u32>,
    primitive: Fe,
    tables: Option<LogTables>,
}

impl FieldSpec {
    pub fn new(p: u64, f: u32) -> Result<Self> {
        Self::with_limit(p, f, DEFAULT_MAX_ORDER)
    }

    pub fn with_limit(p: u64, f: u32, limit: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if f == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = (p as u128).checked_pow(f).filter(|&q| q <= limit as u128);
        let Some(q) = q else {
            return Err(Error::FieldTooLarge { p, f, limit });
        };
        let (p, q) = (p as u32, q as u32);
        let modulus = least_irreducible(p, f);
        let mut spec = FieldSpec { p, f, q, modulus, primitive: Fe::ONE, tables: None };
        spec.primitive = spec.find_primitive();
        if q <= TABLE_MAX_ORDER {
            spec.tables = Some(spec.build_tables());
        }
        Ok(spec)
    }

    /// Builds GF(q) from a prime power `q`.
    pub fn from_order(q: u64) -> Result<Self> {
        let (p, f) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, f)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn f(&self) -> u32 {
        self.f
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn is_odd(&self) -> bool {
        self.p != 2
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Little-endian bytes of the modulus coefficients; stable cache key material.
    pub fn modulus_bytes(&self) -> Vec<u8> {
        self.modulus.iter().flat_map(|c| c.to_le_bytes()).collect()
    }

    /// The least (by encoding) generator of the multiplicative group.
    pub fn primitive(&self) -> Fe {
        self.primitive
    }

    pub fn element(&self, enc: u32) -> Option<Fe> {
        (enc < self.q).then_some(Fe(enc))
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> + Clone {
        (0..self.q).map(Fe)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Fe> + Clone {
        (1..self.q).map(Fe)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn coeffs(&self, a: Fe) -> Vec<u32> {
        let mut x = a.0;
        (0..self.f)
            .map(|_| {
                let d = x % self.p;
                x /= self.p;
                d
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fe> {
        if coeffs.len() != self.f as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::Domain(format!("coefficient vector {coeffs:?} for GF({})", self.q)));
        }
        Ok(Fe(coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)))
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.f == 1 {
            let s = a.0 + b.0;
            return Fe(if s >= self.p { s - self.p } else { s });
        }
        let (mut x, mut y, mut r, mut w) = (a.0, b.0, 0, 1);
        for _ in 0..self.f {
            r += (x % self.p + y % self.p) % self.p * w;
            x /= self.p;
            y /= self.p;
            w *= self.p;
        }
        Fe(r)
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if self.f == 1 {
            return Fe(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        let (mut x, mut r, mut w) = (a.0, 0, 1);
        for _ in 0..self.f {
            r += (self.p - x % self.p) % self.p * w;
            x /= self.p;
            w *= self.p;
        }
        Fe(r)
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        match &self.tables {
            Some(t) => Fe(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => self.poly_mul(a, b),
        }
    }

    pub fn square(&self, a: Fe) -> Fe {
        self.mul(a, a)
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.tables {
            Some(t) => {
                let l = t.log[a.0 as usize];
                Fe(t.exp[if l == 0 { 0 } else { (self.q - 1 - l) as usize }])
            }
            None => self.pow(a, (self.q - 2) as u64),
        })
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.0 == 0 {
            return Fe::ZERO;
        }
        let order = (self.q - 1) as u64;
        if let Some(t) = &self.tables {
            let l = t.log[a.0 as usize] as u64 * (e % order) % order;
            return Fe(t.exp[l as usize]);
        }
        let (mut base, mut e, mut acc) = (a, e % order, Fe::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.poly_mul(acc, base);
            }
            base = self.poly_mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn frobenius(&self, a: Fe) -> Fe {
        self.pow(a, self.p as u64)
    }

    /// Euler's criterion, reported as a three-way classification.
    pub fn is_square(&self, a: Fe) -> Result<QuadraticClass> {
        if !self.is_odd() {
            return Err(Error::EvenCharacteristic);
        }
        if a.is_zero() {
            return Ok(QuadraticClass::Zero);
        }
        if let Some(t) = &self.tables {
            return Ok(if t.log[a.0 as usize] % 2 == 0 {
                QuadraticClass::NonzeroSquare
            } else {
                QuadraticClass::NonSquare
            });
        }
        Ok(if self.pow(a, ((self.q - 1) / 2) as u64) == Fe::ONE {
            QuadraticClass::NonzeroSquare
        } else {
            QuadraticClass::NonSquare
        })
    }

    pub fn is_nonzero_square(&self, a: Fe) -> Result<bool> {
        Ok(self.is_square(a)? == QuadraticClass::NonzeroSquare)
    }

    /// Square root; of the two roots `r`, `-r` the one with smaller encoding.
    pub fn sqrt(&self, a: Fe) -> Result<Fe> {
        let r = match self.is_square(a)? {
            QuadraticClass::Zero => return Ok(Fe::ZERO),
            QuadraticClass::NonSquare => return Err(Error::NotASquare),
            QuadraticClass::NonzeroSquare if self.q % 4 == 3 => {
                self.pow(a, ((self.q as u64) + 1) / 4)
            }
            QuadraticClass::NonzeroSquare => self.tonelli_shanks(a),
        };
        let s = self.neg(r);
        Ok(if s.0 < r.0 { s } else { r })
    }

    fn tonelli_shanks(&self, a: Fe) -> Fe {
        let mut s = 0;
        let mut m = (self.q - 1) as u64;
        while m % 2 == 0 {
            m /= 2;
            s += 1;
        }
        let z = self
            .nonzero()
            .find(|&z| self.is_square(z) == Ok(QuadraticClass::NonSquare))
            .expect("odd field has a non-square");
        let mut c = self.pow(z, m);
        let mut x = self.pow(a, (m + 1) / 2);
        let mut t = self.pow(a, m);
        while t != Fe::ONE {
            // least i with t^(2^i) = 1
            let mut i = 0;
            let mut tt = t;
            while tt != Fe::ONE {
                tt = self.square(tt);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(s - i - 1) {
                b = self.square(b);
            }
            x = self.mul(x, b);
            c = self.square(b);
            t = self.mul(t, c);
            s = i;
        }
        x
    }

    fn poly_mul(&self, a: Fe, b: Fe) -> Fe {
        let p = self.p as u64;
        let f = self.f as usize;
        let da = self.coeffs(a);
        let db = self.coeffs(b);
        let mut prod = vec![0u64; 2 * f - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for k in (f..prod.len()).rev() {
            let lead = prod[k];
            if lead == 0 {
                continue;
            }
            for (i, &m) in self.modulus[..f].iter().enumerate() {
                prod[k - f + i] = (prod[k - f + i] + p - lead * m as u64 % p) % p;
            }
            prod[k] = 0;
        }
        let coeffs: Vec<u32> = prod[..f].iter().map(|&c| c as u32).collect();
        Fe(coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c))
    }

    fn find_primitive(&self) -> Fe {
        if self.q == 2 {
            return Fe::ONE;
        }
        let order = (self.q - 1) as u64;
        let primes = prime_factors(order);
        (1..self.q)
            .map(Fe)
            .find(|&g| {
                primes.iter().all(|&r| self.pow_raw(g, order / r) != Fe::ONE)
            })
            .expect("multiplicative group is cyclic")
    }

    fn pow_raw(&self, a: Fe, mut e: u64) -> Fe {
        let (mut base, mut acc) = (a, Fe::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.poly_mul(acc, base);
            }
            base = self.poly_mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn build_tables(&self) -> LogTables {
        let n = (self.q - 1) as usize;
        let mut log = vec![0u32; self.q as usize];
        let mut exp = vec![0u32; 2 * n];
        let mut x = Fe::ONE;
        for i in 0..n {
            exp[i] = x.0;
            log[x.0 as usize] = i as u32;
            x = self.poly_mul(x, self.primitive);
        }
        for i in n..2 * n {
            exp[i] = exp[i - n];
        }
        LogTables { log, exp }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q = p^f`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut r, mut f) = (q, 0);
    while r % p == 0 {
        r /= p;
        f += 1;
    }
    (r == 1).then_some((p, f))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
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

/// Least monic irreducible of degree `f` over GF(p), ordered by the encoding
/// of its non-leading coefficients.
fn least_irreducible(p: u32, f: u32) -> Vec<u32> {
    let count = (p as u64).pow(f);
    (0..count)
        .map(|code| {
            let mut x = code;
            let mut coeffs: Vec<u32> = (0..f)
                .map(|_| {
                    let d = (x % p as u64) as u32;
                    x /= p as u64;
                    d
                })
                .collect();
            coeffs.push(1);
            coeffs
        })
        .find(|g| modp::is_irreducible(g, p))
        .expect("irreducible polynomials exist in every degree")
}

/// Dense polynomials over GF(p), low degree first, used only to pick the modulus.
mod modp {
    fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    fn inv(a: u64, p: u64) -> u64 {
        let (mut r, mut b, mut e) = (1u64, a % p, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv(m[dm], p);
        while r.len() > dm {
            let k = r.len() - 1;
            let c = r[k] * lead_inv % p;
            for (i, &mi) in m.iter().enumerate() {
                let idx = k - dm + i;
                r[idx] = (r[idx] + p - c * mi % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        rem(&out, m, p)
    }

    fn gcd_degree(a: &[u64], b: &[u64], p: u64) -> usize {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a.len().saturating_sub(1)
    }

    /// `g` is irreducible iff gcd(g, x^(p^i) - x) = 1 for all i <= deg/2.
    pub(super) fn is_irreducible(g: &[u32], p: u32) -> bool {
        let p = p as u64;
        let g: Vec<u64> = g.iter().map(|&c| c as u64).collect();
        let deg = g.len() - 1;
        if deg <= 1 {
            return deg == 1;
        }
        let x = vec![0, 1];
        let mut h = rem(&x, &g, p);
        for _ in 0..deg / 2 {
            // h <- h^p mod g
            let mut acc = vec![1u64];
            let mut base = h.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mulmod(&acc, &base, &g, p);
                }
                base = mulmod(&base, &base, &g, p);
                e >>= 1;
            }
            h = acc;
            let mut diff = h.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = (diff[1] + p - 1) % p;
            trim(&mut diff);
            if diff.is_empty() || gcd_degree(&g, &diff, p) > 0 {
                return false;
            }
        }
        true
    }
}
