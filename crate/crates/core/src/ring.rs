//! Finite commutative unital coefficient rings: `F_p`, `F_{p^k}` and `Z/n`.
//!
//! Elements are canonical integers in `[0, order)`. For `F_{p^k}` the integer
//! packs the coefficient vector in base `p` (constant term lowest), so `x` in
//! `F_4` is `2` and `x + 1` is `3`. Enumeration is ascending, hence `0, 1, ...`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported ring order.
pub const MAX_ORDER: u32 = 1 << 16;
/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 4;
/// Rings up to this order get precomputed addition and multiplication tables.
const TABLE_LIMIT: u32 = 256;
const NO_INVERSE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RingSpec {
    Prime {
        p: u32,
    },
    /// `poly` holds `c_0, ..., c_{k-1}` of the monic `x^k + c_{k-1} x^{k-1} + ... + c_0`.
    Extension {
        p: u32,
        k: u32,
        poly: Vec<u32>,
    },
    IntegersMod {
        n: u32,
    },
}

impl RingSpec {
    /// `F_q` for a prime power `q`, choosing the least irreducible polynomial
    /// (by packed coefficient value) when `q` is not prime.
    pub fn field(q: u32) -> Result<RingSpec> {
        let (p, k) = prime_power(q).ok_or_else(|| Error::InvalidRing(format!("{q} is not a prime power")))?;
        if k == 1 {
            return Ok(RingSpec::Prime { p });
        }
        if k > MAX_DEGREE || q > MAX_ORDER {
            return Err(Error::UnsupportedSize(format!("F_{q}")));
        }
        let count = p.pow(k);
        (0..count)
            .map(|packed| unpack(packed, p, k as usize))
            .find(|c| c[0] != 0 && is_irreducible(p, c))
            .map(|poly| RingSpec::Extension { p, k, poly })
            .ok_or_else(|| Error::InvalidRing(format!("no irreducible polynomial for F_{q}")))
    }

    pub fn order(&self) -> u64 {
        match self {
            RingSpec::Prime { p } => *p as u64,
            RingSpec::Extension { p, k, .. } => (*p as u64).pow(*k),
            RingSpec::IntegersMod { n } => *n as u64,
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Prime { p } => write!(f, "Fp:{p}"),
            RingSpec::Extension { p, k, poly } => {
                let cs: Vec<String> = poly.iter().map(|c| c.to_string()).collect();
                write!(f, "Fpk:{p},{k},{}", cs.join(","))
            }
            RingSpec::IntegersMod { n } => write!(f, "Zn:{n}"),
        }
    }
}

impl FromStr for RingSpec {
    type Err = Error;

    /// Accepts `Fp:<p>`, `Fpk:<p>,<k>,<c0,...>`, `Zn:<n>` and the shorthands
    /// `F<q>` (any prime power) and `Z<n>`.
    fn from_str(s: &str) -> Result<RingSpec> {
        let s = s.trim();
        let num = |t: &str| -> Result<u32> {
            t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad integer {t:?} in ring {s:?}")))
        };
        if let Some(rest) = s.strip_prefix("Fpk:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() < 3 {
                return Err(Error::Parse(format!("ring {s:?}: expected Fpk:<p>,<k>,<c0,...>")));
            }
            let p = num(parts[0])?;
            let k = num(parts[1])?;
            let poly = parts[2..].iter().map(|t| num(t)).collect::<Result<Vec<_>>>()?;
            if poly.len() != k as usize {
                return Err(Error::Parse(format!("ring {s:?}: expected {k} coefficients")));
            }
            return Ok(RingSpec::Extension { p, k, poly });
        }
        if let Some(rest) = s.strip_prefix("Fp:") {
            return Ok(RingSpec::Prime { p: num(rest)? });
        }
        if let Some(rest) = s.strip_prefix("Zn:") {
            return Ok(RingSpec::IntegersMod { n: num(rest)? });
        }
        if let Some(rest) = s.strip_prefix('F') {
            return RingSpec::field(num(rest)?);
        }
        if let Some(rest) = s.strip_prefix('Z') {
            return Ok(RingSpec::IntegersMod { n: num(rest)? });
        }
        Err(Error::Parse(format!("unknown ring descriptor {s:?}")))
    }
}

/// Canonical element of a [`Ring`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElem(u32);

impl RingElem {
    pub const ZERO: RingElem = RingElem(0);
    pub const ONE: RingElem = RingElem(1);

    pub fn value(self) -> u32 {
        self.0
    }

    /// Wraps a value already known to be below the ring order.
    pub(crate) fn from_index(v: u32) -> RingElem {
        RingElem(v)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Debug)]
struct Inner {
    spec: RingSpec,
    /// Characteristic of a field or the modulus of `Z/n`.
    base: u32,
    degree: u32,
    order: u32,
    poly: Vec<u32>,
    add_table: Vec<u16>,
    mul_table: Vec<u16>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

/// An immutable finite ring. Cloning is cheap.
#[derive(Clone, Debug)]
pub struct Ring {
    inner: Arc<Inner>,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.spec == other.inner.spec
    }
}

impl Eq for Ring {}

impl Ring {
    pub fn new(spec: RingSpec) -> Result<Ring> {
        if spec.order() > MAX_ORDER as u64 {
            return Err(Error::UnsupportedSize(format!("ring order {} exceeds {MAX_ORDER}", spec.order())));
        }
        let (base, degree, poly) = match &spec {
            RingSpec::Prime { p } => {
                if !is_prime(*p) {
                    return Err(Error::NonPrimeCharacteristic(*p));
                }
                (*p, 1, Vec::new())
            }
            RingSpec::Extension { p, k, poly } => {
                if !is_prime(*p) {
                    return Err(Error::NonPrimeCharacteristic(*p));
                }
                if *k < 2 || *k > MAX_DEGREE {
                    return Err(Error::UnsupportedSize(format!("extension degree {k}")));
                }
                if poly.len() != *k as usize || poly.iter().any(|&c| c >= *p) {
                    return Err(Error::InvalidRing(format!("bad polynomial coefficients {poly:?}")));
                }
                if !is_irreducible(*p, poly) {
                    return Err(Error::ReduciblePolynomial(poly.clone()));
                }
                (*p, *k, poly.clone())
            }
            RingSpec::IntegersMod { n } => {
                if *n < 2 {
                    return Err(Error::InvalidRing(format!("Z/{n} has fewer than two elements")));
                }
                (*n, 1, Vec::new())
            }
        };
        let order = spec.order() as u32;
        let mut inner = Inner {
            spec,
            base,
            degree,
            order,
            poly,
            add_table: Vec::new(),
            mul_table: Vec::new(),
            neg: Vec::new(),
            inv: Vec::new(),
        };
        inner.neg = (0..order).map(|a| inner.neg_raw(a)).collect();
        if order <= TABLE_LIMIT {
            let n = order as usize;
            let mut add = vec![0u16; n * n];
            let mut mul = vec![0u16; n * n];
            for a in 0..order {
                for b in 0..order {
                    add[a as usize * n + b as usize] = inner.add_raw(a, b) as u16;
                    mul[a as usize * n + b as usize] = inner.mul_raw(a, b) as u16;
                }
            }
            inner.add_table = add;
            inner.mul_table = mul;
        }
        inner.inv = (0..order).map(|a| inner.inv_raw(a)).collect();
        Ok(Ring { inner: Arc::new(inner) })
    }

    /// `F_q` with the default polynomial when `q` is a prime power.
    pub fn field(q: u32) -> Result<Ring> {
        Ring::new(RingSpec::field(q)?)
    }

    pub fn spec(&self) -> &RingSpec {
        &self.inner.spec
    }

    pub fn order(&self) -> u32 {
        self.inner.order
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.base
    }

    /// Extension degree over the prime field (1 for `F_p` and `Z/n`).
    pub fn degree(&self) -> u32 {
        self.inner.degree
    }

    pub fn is_field(&self) -> bool {
        !matches!(self.inner.spec, RingSpec::IntegersMod { .. })
    }

    /// Checked constructor from a canonical representative.
    pub fn elem(&self, value: u32) -> Result<RingElem> {
        if value < self.inner.order {
            Ok(RingElem(value))
        } else {
            Err(Error::ElementOutOfRing { value, order: self.inner.order })
        }
    }

    /// Image of an integer under the unital map `Z -> R`.
    pub fn from_int(&self, v: i64) -> RingElem {
        RingElem(v.rem_euclid(self.inner.base as i64) as u32)
    }

    pub fn zero(&self) -> RingElem {
        RingElem::ZERO
    }

    pub fn one(&self) -> RingElem {
        RingElem::ONE
    }

    pub fn enumerate(&self) -> impl Iterator<Item = RingElem> + Clone {
        (0..self.inner.order).map(RingElem)
    }

    #[inline]
    pub fn add(&self, a: RingElem, b: RingElem) -> RingElem {
        let i = &*self.inner;
        if !i.add_table.is_empty() {
            RingElem(i.add_table[(a.0 * i.order + b.0) as usize] as u32)
        } else {
            RingElem(i.add_raw(a.0, b.0))
        }
    }

    #[inline]
    pub fn neg(&self, a: RingElem) -> RingElem {
        RingElem(self.inner.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: RingElem, b: RingElem) -> RingElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: RingElem, b: RingElem) -> RingElem {
        let i = &*self.inner;
        if !i.mul_table.is_empty() {
            RingElem(i.mul_table[(a.0 * i.order + b.0) as usize] as u32)
        } else {
            RingElem(i.mul_raw(a.0, b.0))
        }
    }

    /// Multiplicative inverse, if `a` is a unit.
    #[inline]
    pub fn inv(&self, a: RingElem) -> Option<RingElem> {
        match self.inner.inv[a.0 as usize] {
            NO_INVERSE => None,
            b => Some(RingElem(b)),
        }
    }

    pub fn is_unit(&self, a: RingElem) -> bool {
        self.inner.inv[a.0 as usize] != NO_INVERSE
    }

    /// Checked inverse; `NotInvertible` for zero and zero divisors.
    pub fn inverse(&self, a: RingElem) -> Result<RingElem> {
        self.check(a)?;
        self.inv(a).ok_or(Error::NotInvertible)
    }

    /// Checked binary operation.
    pub fn arith(&self, op: ArithOp, a: RingElem, b: RingElem) -> Result<RingElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(match op {
            ArithOp::Add => self.add(a, b),
            ArithOp::Sub => self.sub(a, b),
            ArithOp::Mul => self.mul(a, b),
        })
    }

    pub fn pow(&self, a: RingElem, mut e: u64) -> RingElem {
        let mut base = a;
        let mut acc = RingElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `sum_i a_i b_i`.
    #[inline]
    pub fn dot(&self, a: &[RingElem], b: &[RingElem]) -> RingElem {
        let i = &*self.inner;
        if i.degree == 1 {
            let m = i.base as u64;
            let mut acc = 0u64;
            for (x, y) in a.iter().zip(b) {
                acc += x.0 as u64 * y.0 as u64;
                if acc >= 1 << 62 {
                    acc %= m;
                }
            }
            RingElem((acc % m) as u32)
        } else {
            a.iter().zip(b).fold(RingElem::ZERO, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
        }
    }

    /// Base-`p` coordinates of `a` over the prime subring (length = degree).
    pub fn digits(&self, a: RingElem) -> Vec<u32> {
        unpack(a.0, self.inner.base, self.inner.degree as usize)
    }

    pub fn from_digits(&self, digits: &[u32]) -> RingElem {
        RingElem(pack(digits, self.inner.base))
    }

    fn check(&self, a: RingElem) -> Result<()> {
        self.elem(a.0).map(|_| ())
    }
}

impl Inner {
    fn add_raw(&self, a: u32, b: u32) -> u32 {
        if self.degree == 1 {
            return ((a as u64 + b as u64) % self.base as u64) as u32;
        }
        let (p, k) = (self.base, self.degree as usize);
        let (mut x, mut y, mut out, mut place) = (a, b, 0u32, 1u32);
        for _ in 0..k {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        out
    }

    fn neg_raw(&self, a: u32) -> u32 {
        if self.degree == 1 {
            return (self.base - a % self.base) % self.base;
        }
        let digits: Vec<u32> =
            unpack(a, self.base, self.degree as usize).into_iter().map(|d| (self.base - d) % self.base).collect();
        pack(&digits, self.base)
    }

    fn mul_raw(&self, a: u32, b: u32) -> u32 {
        let p = self.base as u64;
        if self.degree == 1 {
            return ((a as u64 * b as u64) % p) as u32;
        }
        let k = self.degree as usize;
        let x = unpack(a, self.base, k);
        let y = unpack(b, self.base, k);
        let mut prod = vec![0u64; 2 * k - 1];
        for i in 0..k {
            for j in 0..k {
                prod[i + j] = (prod[i + j] + x[i] as u64 * y[j] as u64) % p;
            }
        }
        // x^k = -(c_{k-1} x^{k-1} + ... + c_0)
        for d in (k..2 * k - 1).rev() {
            let lead = prod[d];
            if lead == 0 {
                continue;
            }
            prod[d] = 0;
            for (i, &c) in self.poly.iter().enumerate() {
                let t = d - k + i;
                prod[t] = (prod[t] + (p - lead) * c as u64) % p;
            }
        }
        let digits: Vec<u32> = prod[..k].iter().map(|&d| d as u32).collect();
        pack(&digits, self.base)
    }

    fn inv_raw(&self, a: u32) -> u32 {
        if a == 0 {
            return NO_INVERSE;
        }
        match self.spec {
            RingSpec::Prime { .. } | RingSpec::IntegersMod { .. } => {
                mod_inverse(a as i64, self.base as i64).map_or(NO_INVERSE, |v| v as u32)
            }
            RingSpec::Extension { .. } => {
                // a^(q-2) in the multiplicative group of F_q
                let mut e = self.order as u64 - 2;
                let (mut base, mut acc) = (a, 1u32);
                while e > 0 {
                    if e & 1 == 1 {
                        acc = self.mul_fast(acc, base);
                    }
                    base = self.mul_fast(base, base);
                    e >>= 1;
                }
                acc
            }
        }
    }

    fn mul_fast(&self, a: u32, b: u32) -> u32 {
        if self.mul_table.is_empty() {
            self.mul_raw(a, b)
        } else {
            self.mul_table[(a * self.order + b) as usize] as u32
        }
    }
}

fn mod_inverse(a: i64, n: i64) -> Option<i64> {
    let (mut r0, mut r1, mut s0, mut s1) = (n, a.rem_euclid(n), 0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(n))
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `(p, k)` with `q = p^k`, when `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut rest, mut k) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

fn unpack(mut v: u32, p: u32, k: usize) -> Vec<u32> {
    let mut out = vec![0; k];
    for d in out.iter_mut() {
        *d = v % p;
        v /= p;
    }
    out
}

fn pack(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Monic `x^k + c_{k-1} x^{k-1} + ... + c_0` has no monic factor of degree `1..=k/2`.
fn is_irreducible(p: u32, coeffs: &[u32]) -> bool {
    let k = coeffs.len();
    let mut f: Vec<u32> = coeffs.to_vec();
    f.push(1);
    for d in 1..=k / 2 {
        for packed in 0..p.pow(d as u32) {
            let mut g = unpack(packed, p, d);
            g.push(1);
            if poly_rem(&f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Remainder of `f` by monic `g`, coefficient vectors low degree first.
fn poly_rem(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let dg = g.len() - 1;
    let p = p as u64;
    while r.len() > dg {
        let lead = *r.last().unwrap() % p;
        let shift = r.len() - 1 - dg;
        for (i, &c) in g.iter().enumerate() {
            r[shift + i] = (r[shift + i] + (p - lead) * c as u64 % p) % p;
        }
        r.pop();
    }
    r.into_iter().map(|c| c as u32).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: u32) -> RingElem {
        RingElem(v)
    }

    #[test]
    fn construction_examples() {
        let f2 = Ring::new(RingSpec::Prime { p: 2 }).unwrap();
        assert_eq!(f2.order(), 2);
        let f4 = Ring::new(RingSpec::Extension { p: 2, k: 2, poly: vec![1, 1] }).unwrap();
        assert_eq!(f4.order(), 4);
        let z4 = Ring::new(RingSpec::IntegersMod { n: 4 }).unwrap();
        assert_eq!((z4.order(), z4.characteristic(), z4.is_field()), (4, 4, false));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Ring::new(RingSpec::Prime { p: 6 }).unwrap_err(), Error::NonPrimeCharacteristic(6));
        // x^2 + 1 = (x + 1)^2 over F_2
        assert!(matches!(
            Ring::new(RingSpec::Extension { p: 2, k: 2, poly: vec![1, 0] }),
            Err(Error::ReduciblePolynomial(_))
        ));
        assert!(matches!(Ring::new(RingSpec::Prime { p: 65537 }), Err(Error::UnsupportedSize(_))));
        assert!(matches!(Ring::new(RingSpec::IntegersMod { n: 70000 }), Err(Error::UnsupportedSize(_))));
    }

    #[test]
    fn arith_examples() {
        let f2 = Ring::field(2).unwrap();
        assert_eq!(f2.arith(ArithOp::Add, e(1), e(1)).unwrap(), e(0));
        let f4 = Ring::field(4).unwrap();
        assert_eq!(f4.arith(ArithOp::Mul, e(2), e(2)).unwrap(), e(3));
        let z6 = Ring::new(RingSpec::IntegersMod { n: 6 }).unwrap();
        assert_eq!(z6.arith(ArithOp::Mul, e(2), e(3)).unwrap(), e(0));
        assert_eq!(z6.arith(ArithOp::Add, e(7), e(0)), Err(Error::ElementOutOfRing { value: 7, order: 6 }));
    }

    #[test]
    fn inverse_examples() {
        let f5 = Ring::field(5).unwrap();
        assert_eq!(f5.inverse(e(2)).unwrap(), e(3));
        assert_eq!(Ring::field(2).unwrap().inverse(e(1)).unwrap(), e(1));
        let z6 = Ring::new(RingSpec::IntegersMod { n: 6 }).unwrap();
        assert_eq!(z6.inverse(e(2)), Err(Error::NotInvertible));
    }

    #[test]
    fn enumerate_examples() {
        let f3: Vec<u32> = Ring::field(3).unwrap().enumerate().map(RingElem::value).collect();
        assert_eq!(f3, vec![0, 1, 2]);
        let f4: Vec<u32> = Ring::field(4).unwrap().enumerate().map(RingElem::value).collect();
        assert_eq!(f4, vec![0, 1, 2, 3]);
        let f4 = Ring::field(4).unwrap();
        assert_eq!(f4.digits(e(2)), vec![0, 1]);
        assert_eq!(f4.digits(e(3)), vec![1, 1]);
    }

    #[test]
    fn descriptors_round_trip() {
        for s in ["Fp:5", "Fpk:2,2,1,1", "Zn:6", "Fpk:3,2,1,0"] {
            let spec: RingSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert_eq!("F4".parse::<RingSpec>().unwrap(), RingSpec::Extension { p: 2, k: 2, poly: vec![1, 1] });
        assert_eq!("F7".parse::<RingSpec>().unwrap(), RingSpec::Prime { p: 7 });
        assert!("Q:3".parse::<RingSpec>().is_err());
        assert!("F6".parse::<RingSpec>().is_err());
    }

    fn rings() -> Vec<Ring> {
        ["F2", "F3", "F4", "F5", "F8", "F9", "Z4", "Z6", "Z8", "F16", "F27", "F25"]
            .iter()
            .map(|s| Ring::new(s.parse().unwrap()).unwrap())
            .collect()
    }

    #[test]
    fn ring_axioms_exhaustive() {
        for r in rings() {
            let els: Vec<_> = r.enumerate().collect();
            for &a in &els {
                for &b in &els {
                    assert_eq!(r.add(a, b), r.add(b, a));
                    assert_eq!(r.mul(a, b), r.mul(b, a));
                    for &c in &els {
                        assert_eq!(r.add(r.add(a, b), c), r.add(a, r.add(b, c)));
                        assert_eq!(r.mul(r.mul(a, b), c), r.mul(a, r.mul(b, c)));
                        assert_eq!(r.mul(a, r.add(b, c)), r.add(r.mul(a, b), r.mul(a, c)));
                    }
                }
                assert_eq!(r.add(a, r.neg(a)), RingElem::ZERO);
                assert_eq!(r.mul(a, RingElem::ONE), a);
            }
        }
    }

    #[test]
    fn inverse_fails_exactly_on_zero_divisors() {
        for r in rings() {
            for a in r.enumerate() {
                let zero_divisor = a.is_zero() || r.enumerate().any(|b| !b.is_zero() && r.mul(a, b).is_zero());
                match r.inv(a) {
                    Some(b) => {
                        assert!(!zero_divisor);
                        assert_eq!(r.mul(a, b), RingElem::ONE);
                    }
                    None => assert!(zero_divisor),
                }
            }
        }
    }

    #[test]
    fn characteristic_sums_to_zero() {
        for r in rings() {
            let mut acc = RingElem::ZERO;
            for i in 1..=r.characteristic() {
                acc = r.add(acc, RingElem::ONE);
                assert_eq!(acc.is_zero(), i == r.characteristic());
            }
        }
    }

    #[test]
    fn large_field_without_tables() {
        let r = Ring::field(625).unwrap();
        let a = RingElem(377);
        let b = r.inv(a).unwrap();
        assert_eq!(r.mul(a, b), RingElem::ONE);
        let p = Ring::field(65521).unwrap();
        assert_eq!(p.mul(p.inv(RingElem(12345)).unwrap(), RingElem(12345)), RingElem::ONE);
    }
}
