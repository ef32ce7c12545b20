//! Exact arithmetic in the cyclotomic field `Q(zeta_p)` and the additive character.
//!
//! A [`CycNum`] stores `p - 1` rational coefficients of `1, z, ..., z^{p-2}` with
//! `z = zeta_p`; the power `z^{p-1}` is always rewritten through
//! `1 + z + ... + z^{p-1} = 0`, so the coefficient vector is canonical.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::field::{Field, FieldElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycError {
    #[error("cannot combine elements of Q(zeta_{left}) and Q(zeta_{right})")]
    MixedConductor { left: u32, right: u32 },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNum {
    p: u32,
    coeffs: Vec<BigRational>,
}

impl CycNum {
    pub fn zero(p: u32) -> CycNum {
        CycNum {
            p,
            coeffs: vec![BigRational::zero(); p as usize - 1],
        }
    }

    pub fn one(p: u32) -> CycNum {
        CycNum::from_integer(p, 1)
    }

    pub fn from_integer(p: u32, n: i64) -> CycNum {
        CycNum::from_rational(p, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(p: u32, r: BigRational) -> CycNum {
        let mut c = CycNum::zero(p);
        c.coeffs[0] = r;
        c
    }

    /// `zeta_p^e`.
    pub fn zeta_pow(p: u32, e: i64) -> CycNum {
        let e = e.rem_euclid(p as i64) as usize;
        let mut counts = vec![0i128; p as usize];
        counts[e] = 1;
        CycNum::from_exponent_counts(p, &counts)
    }

    /// `sum_t counts[t] * zeta_p^t` for `t = 0..p`.
    pub fn from_exponent_counts(p: u32, counts: &[i128]) -> CycNum {
        assert_eq!(counts.len(), p as usize, "need one count per exponent");
        let top = counts[p as usize - 1];
        let coeffs = counts[..p as usize - 1]
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c - top)))
            .collect();
        CycNum { p, coeffs }
    }

    fn from_full(p: u32, mut full: Vec<BigRational>) -> CycNum {
        let top = full.pop().expect("full vector has p entries");
        if !top.is_zero() {
            for c in full.iter_mut() {
                *c -= &top;
            }
        }
        CycNum { p, coeffs: full }
    }

    #[inline]
    pub fn conductor(&self) -> u32 {
        self.p
    }

    /// Canonical coefficients of `1, z, ..., z^{p-2}`.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_one())
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.coeffs[1..].iter().all(Zero::is_zero).then_some(&self.coeffs[0])
    }

    /// All coefficients are integers.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    fn check(&self, other: &CycNum) -> Result<(), CycError> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(CycError::MixedConductor {
                left: self.p,
                right: other.p,
            })
        }
    }

    pub fn try_add(&self, other: &CycNum) -> Result<CycNum, CycError> {
        self.check(other)?;
        Ok(CycNum {
            p: self.p,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_mul(&self, other: &CycNum) -> Result<CycNum, CycError> {
        self.check(other)?;
        let n = self.p as usize;
        let mut full = vec![BigRational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                full[(i + j) % n] += a * b;
            }
        }
        Ok(CycNum::from_full(self.p, full))
    }

    pub fn scale(&self, r: &BigRational) -> CycNum {
        CycNum {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> CycNum {
        self.scale(&BigRational::from_integer(BigInt::from(n)))
    }

    pub fn pow(&self, mut e: u32) -> CycNum {
        let mut base = self.clone();
        let mut acc = CycNum::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// The Galois automorphism `z -> z^j`, `j` prime to `p`.
    pub fn galois(&self, j: u32) -> CycNum {
        assert!(!j.is_multiple_of(self.p), "z -> z^j needs j prime to p");
        let n = self.p as usize;
        let mut full = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            full[(i * j as usize) % n] += c;
        }
        CycNum::from_full(self.p, full)
    }

    /// Complex conjugation `z -> z^{-1}`.
    pub fn conj(&self) -> CycNum {
        self.galois(self.p - 1)
    }

    /// Field norm to `Q`: the product of all Galois conjugates.
    pub fn norm(&self) -> BigRational {
        let mut prod = self.clone();
        for j in 2..self.p {
            prod = &prod * &self.galois(j);
        }
        prod.as_rational()
            .cloned()
            .expect("the norm of an element of Q(zeta_p) is rational")
    }

    /// Multiplicative inverse, via `a^{-1} = (prod of the other conjugates) / N(a)`.
    pub fn inv(&self) -> Option<CycNum> {
        if self.is_zero() {
            return None;
        }
        let mut others = CycNum::one(self.p);
        for j in 2..self.p {
            others = &others * &self.galois(j);
        }
        let n = (&others * self).as_rational().cloned().expect("norm is rational");
        Some(others.scale(&n.recip()))
    }

    /// Complex value under `z -> exp(2 pi i / p)`. Display only.
    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let v = c.to_f64().unwrap_or(f64::NAN);
            let angle = 2.0 * std::f64::consts::PI * i as f64 / self.p as f64;
            re += v * angle.cos();
            im += v * angle.sin();
        }
        (re, im)
    }

    /// Text form `c0 + c1*z + ... + c_{p-2}*z^{p-2}`, zero terms omitted.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            let body = match i {
                0 => mag.to_string(),
                _ => {
                    let z = if i == 1 { "z".to_string() } else { format!("z^{i}") };
                    if mag.is_one() {
                        z
                    } else {
                        format!("{mag}*{z}")
                    }
                }
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (z = zeta_{})", self.render(), self.p)
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add<&CycNum> for &CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        self.try_add(rhs).expect("mixed conductors")
    }
}

impl AddAssign<&CycNum> for CycNum {
    fn add_assign(&mut self, rhs: &CycNum) {
        self.check(rhs).expect("mixed conductors");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Sub<&CycNum> for &CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        self.check(rhs).expect("mixed conductors");
        CycNum {
            p: self.p,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul<&CycNum> for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        self.try_mul(rhs).expect("mixed conductors")
    }
}

/// The additive character `psi(x) = zeta_p^{tr(x)}` on `F_q`.
pub fn psi(field: &Field, x: FieldElement) -> CycNum {
    CycNum::zeta_pow(field.p(), field.trace_abs(x) as i64)
}

/// Unnormalised quadratic Gauss sum `g1 = sum_x psi(x^2)`, so that `g1 = sqrt(q) * eps(psi)`.
pub fn base_gauss_sum(field: &Field) -> CycNum {
    let mut counts = vec![0i128; field.p() as usize];
    for x in field.elements() {
        counts[field.trace_abs(field.mul(x, x)) as usize] += 1;
    }
    CycNum::from_exponent_counts(field.p(), &counts)
}
