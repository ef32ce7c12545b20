//! Arithmetic in `F_q` for odd prime powers `q = p^k`.
//!
//! Elements are stored as packed base-`p` codes `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`
//! of their coefficient vectors in the power basis `1, t, ..., t^{k-1}`, where `t`
//! is a root of the field's modulus. The code is canonical, so equality of
//! elements is equality of codes, and enumerating codes `0..q` enumerates the
//! field deterministically.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Default cap on the number of elements of a constructed field.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 20;

/// Fields up to this order get precomputed addition and multiplication tables.
const TABLE_LIMIT: u32 = 256;

const MAX_DEGREE: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("characteristic {0} is even; only odd characteristic is supported")]
    EvenCharacteristic(u64),
    #[error("field of order {p}^{k} exceeds the cap of {cap} elements")]
    TooLarge { p: u64, k: u32, cap: u64 },
    #[error("extension degree must be at least 1")]
    InvalidDegree,
    #[error("{0} is not a power of an odd prime")]
    BadOrder(u64),
}

/// An element of some `F_q`, as a canonical packed code in `[0, q)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// The packed base-`p` code.
    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus, low degree first, `k + 1` entries; `None` for prime fields.
    modulus: Option<Vec<u32>>,
    /// `p^i` for `i = 0..k`.
    place: Vec<u32>,
    /// Absolute trace of each power-basis element `t^i`.
    trace_basis: Vec<u32>,
    add_table: Option<Vec<u32>>,
    mul_table: Option<Vec<u32>>,
}

/// The finite field `F_q`, `q = p^k` with `p` odd.
///
/// Cheap to clone; all clones share the same tables.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.k == other.0.k && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q())?;
        if let Some(m) = &self.0.modulus {
            write!(f, " mod {}", format_poly(m))?;
        }
        Ok(())
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn format_poly(coeffs: &[u32]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let term = match (i, c) {
            (0, c) => c.to_string(),
            (1, 1) => "x".to_string(),
            (1, c) => format!("{c}x"),
            (i, 1) => format!("x^{i}"),
            (i, c) => format!("{c}x^{i}"),
        };
        terms.push(term);
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

/// Remainder of `a` modulo the monic polynomial `m` over `F_p`. Both low degree first.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.pop().unwrap() % p as u64;
        if lead == 0 {
            continue;
        }
        let shift = r.len() - dm;
        for (i, &mc) in m[..dm].iter().enumerate() {
            let sub = lead * mc as u64 % p as u64;
            r[shift + i] = (r[shift + i] + p as u64 - sub) % p as u64;
        }
    }
    r.into_iter().map(|c| (c % p as u64) as u32).collect()
}

fn monic_from_code(code: u64, degree: usize, p: u32) -> Vec<u32> {
    let mut c = code;
    let mut poly = Vec::with_capacity(degree + 1);
    for _ in 0..degree {
        poly.push((c % p as u64) as u32);
        c /= p as u64;
    }
    poly.push(1);
    poly
}

/// Irreducibility over `F_p` by trial division against every monic polynomial
/// of degree at most `deg/2`.
pub(crate) fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let divisor = monic_from_code(code, d, p);
            if poly_rem(poly, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// Build `F_{p^k}` with the lexicographically smallest monic irreducible
    /// modulus of degree `k` (coefficient of `x^{k-1}` most significant).
    pub fn new(p: u64, k: u32) -> Result<Field, FieldError> {
        Self::with_cap(p, k, DEFAULT_FIELD_CAP)
    }

    pub fn with_cap(p: u64, k: u32, cap: u64) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NonPrime(p));
        }
        if p == 2 {
            return Err(FieldError::EvenCharacteristic(p));
        }
        if k == 0 {
            return Err(FieldError::InvalidDegree);
        }
        let too_large = FieldError::TooLarge { p, k, cap };
        let q = p.checked_pow(k).ok_or_else(|| too_large.clone())?;
        if q > cap || q > u32::MAX as u64 || k as usize > MAX_DEGREE {
            return Err(too_large);
        }
        let p32 = p as u32;
        let modulus = if k == 1 {
            None
        } else {
            let count = q;
            let m = (0..count)
                .map(|code| monic_from_code(code, k as usize, p32))
                .find(|poly| is_irreducible(poly, p32))
                .expect("an irreducible polynomial exists in every degree");
            Some(m)
        };
        let place = (0..k).map(|i| p32.pow(i)).collect();
        let mut inner = Inner {
            p: p32,
            k,
            q: q as u32,
            modulus,
            place,
            trace_basis: Vec::new(),
            add_table: None,
            mul_table: None,
        };
        inner.trace_basis = (0..k as usize)
            .map(|i| {
                // trace of multiplication by t^i in the basis 1, t, ..., t^{k-1}
                (0..k as usize)
                    .map(|j| {
                        let prod = raw_mul_coeffs(&inner, &unit(k as usize, i), &unit(k as usize, j));
                        prod[j]
                    })
                    .fold(0u32, |acc, c| (acc + c) % p32)
            })
            .collect();
        if k > 1 && inner.q <= TABLE_LIMIT {
            let qq = inner.q as usize;
            let mut add = vec![0u32; qq * qq];
            let mut mul = vec![0u32; qq * qq];
            for a in 0..qq {
                for b in 0..qq {
                    add[a * qq + b] = raw_add(&inner, a as u32, b as u32);
                    mul[a * qq + b] = raw_mul(&inner, a as u32, b as u32);
                }
            }
            inner.add_table = Some(add);
            inner.mul_table = Some(mul);
        }
        Ok(Field(Arc::new(inner)))
    }

    /// Build `F_q` from its order, factoring `q = p^k`.
    pub fn from_order(q: u64) -> Result<Field, FieldError> {
        if q < 3 || q.is_multiple_of(2) {
            return Err(FieldError::BadOrder(q));
        }
        let mut p = 3;
        while !q.is_multiple_of(p) {
            p += 2;
        }
        let mut k = 0;
        let mut r = q;
        while r.is_multiple_of(p) {
            r /= p;
            k += 1;
        }
        if r != 1 {
            return Err(FieldError::BadOrder(q));
        }
        Field::new(p, k)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.0.k
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Monic modulus, lowest degree coefficient first. `None` for prime fields.
    pub fn modulus(&self) -> Option<&[u32]> {
        self.0.modulus.as_deref()
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// The class of `t` (root of the modulus); for a prime field this is `1`.
    pub fn generator(&self) -> FieldElement {
        if self.k() == 1 {
            FieldElement::ONE
        } else {
            FieldElement(self.0.p)
        }
    }

    /// The `F_p`-basis `1, t, ..., t^{k-1}`.
    pub fn prime_basis(&self) -> Vec<FieldElement> {
        self.0.place.iter().map(|&c| FieldElement(c)).collect()
    }

    /// Element with the given code, if it is in range.
    pub fn element(&self, code: u32) -> Option<FieldElement> {
        (code < self.q()).then_some(FieldElement(code))
    }

    /// All `q` elements, in ascending code order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.q()).map(FieldElement)
    }

    /// The image of an integer in the prime subfield.
    pub fn from_i64(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p() as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> FieldElement {
        let p = self.p();
        let mut code = 0u32;
        for (i, &c) in coeffs.iter().enumerate().take(self.k() as usize) {
            code += (c % p) * self.0.place[i];
        }
        FieldElement(code)
    }

    /// Coefficients in the power basis, lowest degree first, length `k`.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        let p = self.p();
        let mut c = a.0;
        (0..self.k())
            .map(|_| {
                let d = c % p;
                c /= p;
                d
            })
            .collect()
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let inner = &*self.0;
        if inner.k == 1 {
            let s = a.0 + b.0;
            FieldElement(if s >= inner.p { s - inner.p } else { s })
        } else if let Some(t) = &inner.add_table {
            FieldElement(t[(a.0 * inner.q + b.0) as usize])
        } else {
            FieldElement(raw_add(inner, a.0, b.0))
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let inner = &*self.0;
        if inner.k == 1 {
            FieldElement(if a.0 == 0 { 0 } else { inner.p - a.0 })
        } else {
            let mut code = 0;
            let mut c = a.0;
            for &pl in &inner.place {
                let d = c % inner.p;
                c /= inner.p;
                code += ((inner.p - d) % inner.p) * pl;
            }
            FieldElement(code)
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let inner = &*self.0;
        if inner.k == 1 {
            FieldElement(((a.0 as u64 * b.0 as u64) % inner.p as u64) as u32)
        } else if let Some(t) = &inner.mul_table {
            FieldElement(t[(a.0 * inner.q + b.0) as usize])
        } else {
            FieldElement(raw_mul(inner, a.0, b.0))
        }
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            None
        } else {
            Some(self.pow(a, self.q() as u64 - 2))
        }
    }

    /// `a^p`.
    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.p() as u64)
    }

    /// Quadratic character: `0` at zero, `+1` on nonzero squares, `-1` otherwise.
    pub fn legendre(&self, a: FieldElement) -> i8 {
        if a.is_zero() {
            return 0;
        }
        if self.pow(a, (self.q() as u64 - 1) / 2) == FieldElement::ONE {
            1
        } else {
            -1
        }
    }

    /// Absolute trace `F_q -> F_p`, as a residue in `[0, p)`.
    #[inline]
    pub fn trace_abs(&self, a: FieldElement) -> u32 {
        let inner = &*self.0;
        if inner.k == 1 {
            return a.0;
        }
        let mut c = a.0;
        let mut acc = 0u32;
        for &tb in &inner.trace_basis {
            let d = c % inner.p;
            c /= inner.p;
            acc = (acc + d * tb) % inner.p;
        }
        acc
    }

    /// Human-readable element: an integer for prime fields, a polynomial in `t` otherwise.
    pub fn format(&self, a: FieldElement) -> String {
        if self.k() == 1 {
            return a.0.to_string();
        }
        let coeffs = self.coeffs(a);
        let mut terms = Vec::new();
        for (i, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            terms.push(match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".into(),
                (1, c) => format!("{c}t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}t^{i}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }

    /// Text of the modulus, e.g. `x^2+2`; `-` for prime fields.
    pub fn modulus_string(&self) -> String {
        self.modulus().map(format_poly).unwrap_or_else(|| "-".into())
    }
}

fn unit(k: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; k];
    v[i] = 1;
    v
}

fn raw_add(inner: &Inner, a: u32, b: u32) -> u32 {
    let (mut x, mut y) = (a, b);
    let mut code = 0;
    for &pl in &inner.place {
        let s = (x % inner.p + y % inner.p) % inner.p;
        x /= inner.p;
        y /= inner.p;
        code += s * pl;
    }
    code
}

fn decode(inner: &Inner, code: u32) -> [u32; MAX_DEGREE] {
    let mut out = [0u32; MAX_DEGREE];
    let mut c = code;
    for slot in out.iter_mut().take(inner.k as usize) {
        *slot = c % inner.p;
        c /= inner.p;
    }
    out
}

fn raw_mul_coeffs(inner: &Inner, a: &[u32], b: &[u32]) -> Vec<u32> {
    let k = inner.k as usize;
    let p = inner.p as u64;
    if k == 1 {
        return vec![((a[0] as u64 * b[0] as u64) % p) as u32];
    }
    let mut prod = vec![0u64; 2 * k - 1];
    for i in 0..k {
        if a[i] == 0 {
            continue;
        }
        for j in 0..k {
            prod[i + j] = (prod[i + j] + a[i] as u64 * b[j] as u64) % p;
        }
    }
    let m = inner.modulus.as_ref().expect("extension field has a modulus");
    // x^k = -(m_0 + ... + m_{k-1} x^{k-1})
    for d in (k..2 * k - 1).rev() {
        let lead = prod[d];
        if lead == 0 {
            continue;
        }
        prod[d] = 0;
        for (i, &mc) in m[..k].iter().enumerate() {
            let idx = d - k + i;
            prod[idx] = (prod[idx] + p - lead * mc as u64 % p) % p;
        }
    }
    prod[..k].iter().map(|&c| c as u32).collect()
}

fn raw_mul(inner: &Inner, a: u32, b: u32) -> u32 {
    let k = inner.k as usize;
    let da = decode(inner, a);
    let db = decode(inner, b);
    let prod = raw_mul_coeffs(inner, &da[..k], &db[..k]);
    prod.iter().zip(&inner.place).map(|(&c, &pl)| c * pl).sum()
}
