//! An explicit embedding `F_q -> F_{q^r}` between two fields built by [`Field::new`].

use crate::field::{Field, FieldElement};

/// `ext` viewed as a degree-`r` extension of `base`.
#[derive(Clone, Debug)]
pub struct Extension {
    base: Field,
    ext: Field,
    degree: u32,
    /// Image of every base element, indexed by base code.
    image: Vec<FieldElement>,
    /// Inverse of `image`, indexed by ext code; `u32::MAX` outside the subfield.
    preimage: Vec<u32>,
}

impl Extension {
    /// `None` when `ext` does not contain a copy of `base`.
    pub fn new(base: &Field, ext: &Field) -> Option<Extension> {
        if base.p() != ext.p() || !ext.k().is_multiple_of(base.k()) {
            return None;
        }
        let degree = ext.k() / base.k();
        // image of the base generator: the smallest root of the base modulus in ext
        let theta = match base.modulus() {
            None => ext.one(),
            Some(m) => ext.elements().find(|&x| {
                let mut acc = ext.zero();
                for &c in m.iter().rev() {
                    acc = ext.add(ext.mul(acc, x), ext.from_i64(c as i64));
                }
                acc.is_zero()
            })?,
        };
        let image: Vec<FieldElement> = base
            .elements()
            .map(|a| {
                let mut acc = ext.zero();
                for &c in base.coeffs(a).iter().rev() {
                    acc = ext.add(ext.mul(acc, theta), ext.from_i64(c as i64));
                }
                acc
            })
            .collect();
        let mut preimage = vec![u32::MAX; ext.q() as usize];
        for (code, img) in image.iter().enumerate() {
            preimage[img.code() as usize] = code as u32;
        }
        Some(Extension {
            base: base.clone(),
            ext: ext.clone(),
            degree,
            image,
            preimage,
        })
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn ext(&self) -> &Field {
        &self.ext
    }

    /// `r = [F_{q^r} : F_q]`.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn embed(&self, a: FieldElement) -> FieldElement {
        self.image[a.code() as usize]
    }

    /// The base element mapping to `b`, if `b` lies in the subfield.
    pub fn pull_back(&self, b: FieldElement) -> Option<FieldElement> {
        let code = self.preimage[b.code() as usize];
        self.base.element(code)
    }

    /// `b -> b^q`, generator of `Gal(F_{q^r}/F_q)`.
    pub fn frobenius_q(&self, b: FieldElement) -> FieldElement {
        self.ext.pow(b, self.base.q() as u64)
    }

    /// Relative trace `F_{q^r} -> F_q`.
    pub fn relative_trace(&self, b: FieldElement) -> FieldElement {
        let mut acc = self.ext.zero();
        let mut y = b;
        for _ in 0..self.degree {
            acc = self.ext.add(acc, y);
            y = self.frobenius_q(y);
        }
        self.pull_back(acc).expect("relative trace lands in the base field")
    }

    /// An `F_q`-basis `1, t, ..., t^{r-1}` of `F_{q^r}`, `t` the generator of `ext`.
    pub fn basis(&self) -> Vec<FieldElement> {
        let t = self.ext.generator();
        (0..self.degree).map(|i| self.ext.pow(t, i as u64)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embeds_f5_in_f25_and_f25_in_f625() {
        let f5 = Field::new(5, 1).unwrap();
        let f25 = Field::new(5, 2).unwrap();
        let e = Extension::new(&f5, &f25).unwrap();
        assert_eq!(e.degree(), 2);
        for a in f5.elements() {
            assert_eq!(e.pull_back(e.embed(a)), Some(a));
        }
        assert_eq!(e.relative_trace(f25.one()), f5.from_i64(2));

        let f625 = Field::new(5, 4).unwrap();
        let e2 = Extension::new(&f25, &f625).unwrap();
        // the embedding is a ring homomorphism
        for a in f25.elements() {
            for b in f25.elements().step_by(7) {
                assert_eq!(e2.embed(f25.mul(a, b)), f625.mul(e2.embed(a), e2.embed(b)));
                assert_eq!(e2.embed(f25.add(a, b)), f625.add(e2.embed(a), e2.embed(b)));
            }
        }
        // transitivity of traces: tr_{625/5} = tr_{25/5} o tr_{625/25}
        for x in f625.elements().step_by(13) {
            assert_eq!(f625.trace_abs(x), f25.trace_abs(e2.relative_trace(x)));
        }
    }

    #[test]
    fn rejects_non_extensions() {
        let f25 = Field::new(5, 2).unwrap();
        let f125 = Field::new(5, 3).unwrap();
        let f7 = Field::new(7, 1).unwrap();
        assert!(Extension::new(&f25, &f125).is_none());
        assert!(Extension::new(&f7, &f25).is_none());
    }
}
