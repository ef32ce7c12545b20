//! Symbolic fourth roots of unity `s * eps^e`.
//!
//! `eps = eps(psi)` is the normalised quadratic Gauss sum of `F_q` for the fixed
//! character `psi(x) = zeta_p^{tr(x)}`. Every Weil index over `F_q` has the form
//! `s * eps^e` with `s = +-1`, `e in {0, 1}`; products are renormalised with
//! `eps^2 = (-1/q)`.

use std::fmt;

use serde::Serialize;

use crate::field::Field;

/// Which fourth root of unity `eps(psi)` is for a given field, as a power of `i`.
///
/// For `F_p`, `eps = 1` when `p = 1 mod 4` and `eps = i` when `p = 3 mod 4`
/// (sign of the quadratic Gauss sum); for `F_{p^k}` the lifted sum gives
/// `eps = (-1)^{k-1} eps_p^k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct EpsClass(u8);

impl EpsClass {
    pub fn of(field: &Field) -> EpsClass {
        let k = field.k();
        let base = if field.p() % 4 == 3 { 1 } else { 0 };
        EpsClass(((2 * (k - 1) + k * base) % 4) as u8)
    }

    /// `eps` as `i^n`, `n in 0..4`.
    pub fn power_of_i(self) -> u8 {
        self.0
    }

    /// `eps^2 = (-1/q)`.
    pub fn minus_one(self) -> i8 {
        if self.0.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// Equality is equality of values: over a field where `eps = 1`, `eps == 1`.
#[derive(Clone, Copy, Debug)]
pub struct WeilIndex {
    sign: i8,
    eps_exp: u8,
    class: EpsClass,
}

impl WeilIndex {
    pub fn one(class: EpsClass) -> WeilIndex {
        WeilIndex::from_sign(1, class)
    }

    pub fn from_sign(sign: i8, class: EpsClass) -> WeilIndex {
        assert!(sign == 1 || sign == -1, "sign must be +-1");
        WeilIndex {
            sign,
            eps_exp: 0,
            class,
        }
    }

    pub fn eps(class: EpsClass) -> WeilIndex {
        WeilIndex {
            sign: 1,
            eps_exp: 1,
            class,
        }
    }

    /// `eps^n` for any integer `n`.
    pub fn eps_pow(n: i64, class: EpsClass) -> WeilIndex {
        WeilIndex::eps(class).pow(n)
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn eps_exp(self) -> u8 {
        self.eps_exp
    }

    pub fn class(self) -> EpsClass {
        self.class
    }

    pub fn mul(self, other: WeilIndex) -> WeilIndex {
        assert_eq!(self.class, other.class, "Weil indices over different fields");
        let mut sign = self.sign * other.sign;
        let mut e = self.eps_exp + other.eps_exp;
        if e == 2 {
            sign *= self.class.minus_one();
            e = 0;
        }
        WeilIndex {
            sign,
            eps_exp: e,
            class: self.class,
        }
    }

    /// `(s eps)^{-1} = s eps / eps^2`.
    pub fn inv(self) -> WeilIndex {
        if self.eps_exp == 0 {
            self
        } else {
            WeilIndex {
                sign: self.sign * self.class.minus_one(),
                eps_exp: 1,
                class: self.class,
            }
        }
    }

    pub fn pow(self, n: i64) -> WeilIndex {
        let base = if n < 0 { self.inv() } else { self };
        (0..n.unsigned_abs() % 4).fold(WeilIndex::one(self.class), |acc, _| acc.mul(base))
    }

    /// Scalar multiple by a sign.
    pub fn with_sign(self, s: i8) -> WeilIndex {
        self.mul(WeilIndex::from_sign(s, self.class))
    }

    /// The value as `i^n`, `n in 0..4`; comparable across fields.
    pub fn power_of_i(self) -> u8 {
        let s = if self.sign == 1 { 0 } else { 2 };
        (s + self.eps_exp * self.class.power_of_i()) % 4
    }

    pub fn to_complex(self) -> (f64, f64) {
        match self.power_of_i() {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    }

    pub fn summary(self) -> WeilSummary {
        let (re, im) = self.to_complex();
        WeilSummary {
            sign: self.sign,
            eps_exp: self.eps_exp,
            symbolic: self.to_string(),
            complex: crate::report::format_complex(re, im),
        }
    }
}

impl PartialEq for WeilIndex {
    fn eq(&self, other: &WeilIndex) -> bool {
        self.class == other.class && self.power_of_i() == other.power_of_i()
    }
}

impl Eq for WeilIndex {}

impl std::hash::Hash for WeilIndex {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.class.hash(state);
        self.power_of_i().hash(state);
    }
}

impl fmt::Display for WeilIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.sign, self.eps_exp) {
            (1, 0) => f.write_str("1"),
            (-1, 0) => f.write_str("-1"),
            (1, _) => f.write_str("eps"),
            _ => f.write_str("-eps"),
        }
    }
}

/// JSON form of a Weil index.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct WeilSummary {
    pub sign: i8,
    pub eps_exp: u8,
    pub symbolic: String,
    pub complex: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::base_gauss_sum;

    #[test]
    fn eps_class_matches_exact_gauss_sum() {
        for (p, k) in [
            (3, 1),
            (5, 1),
            (7, 1),
            (11, 1),
            (13, 1),
            (3, 2),
            (5, 2),
            (7, 2),
            (3, 3),
            (3, 4),
        ] {
            let f = Field::new(p, k).unwrap();
            let (re, im) = base_gauss_sum(&f).to_complex();
            let root = (f.q() as f64).sqrt();
            let expected = WeilIndex::eps(EpsClass::of(&f)).to_complex();
            assert!((re / root - expected.0).abs() < 1e-9, "q = {}", f.q());
            assert!((im / root - expected.1).abs() < 1e-9, "q = {}", f.q());
            assert_eq!(EpsClass::of(&f).minus_one(), f.legendre(f.from_i64(-1)));
        }
    }

    #[test]
    fn group_law_normal_form() {
        for q in [5u64, 7] {
            let c = EpsClass::of(&Field::from_order(q).unwrap());
            let eps = WeilIndex::eps(c);
            assert_eq!(eps.mul(eps), WeilIndex::from_sign(c.minus_one(), c));
            assert_eq!(eps.mul(eps.inv()), WeilIndex::one(c));
            for s in [1, -1] {
                for e in 0..2 {
                    let w = WeilIndex::eps_pow(e, c).with_sign(s);
                    assert_eq!(w.pow(4), WeilIndex::one(c));
                    assert_eq!(w.pow(-1), w.inv());
                }
            }
        }
        // q = 7: eps^{-1} = -eps
        let c7 = EpsClass::of(&Field::new(7, 1).unwrap());
        assert_eq!(WeilIndex::eps_pow(-1, c7), WeilIndex::eps(c7).with_sign(-1));
        assert_eq!(WeilIndex::eps_pow(3, c7).to_string(), "-eps");
    }

    #[test]
    fn equality_is_by_value() {
        // over F_5, eps = 1
        let c5 = EpsClass::of(&Field::new(5, 1).unwrap());
        assert_eq!(WeilIndex::eps(c5), WeilIndex::one(c5));
        assert_eq!(WeilIndex::eps(c5).with_sign(-1).power_of_i(), 2);
        let c7 = EpsClass::of(&Field::new(7, 1).unwrap());
        assert_ne!(WeilIndex::eps(c7), WeilIndex::one(c7));
        assert_ne!(WeilIndex::one(c5), WeilIndex::one(c7));
    }
}
