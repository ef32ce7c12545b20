//! Nondegenerate symmetric bilinear forms over `F_q`, their Gauss sums and Weil indices.
//!
//! Gauss sums are kept unnormalised, `G = sum_X psi(Q(X,X)/2)` in `Z[zeta_p]`, so
//! the Weil index is `G / q^{d/2}` and the closed form reads
//! `G = g1^d * (det(Q/2) / q)` with `g1` the base quadratic Gauss sum.

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::cyclo::{base_gauss_sum, CycNum};
use crate::extension::Extension;
use crate::field::{Field, FieldElement, FieldError};
use crate::matrix::FqMatrix;
use crate::weil::{EpsClass, WeilIndex};

/// Default cap on the number of summands of a brute-force Gauss sum.
pub const DEFAULT_SUM_CAP: u64 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("Gram matrix must be square")]
    NotSquare,
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("Gram matrix is degenerate")]
    Degenerate,
    #[error("{points} summands exceed the cap of {cap}")]
    TooLarge { points: u128, cap: u64 },
    #[error("value is not g1^{dim} times a sign")]
    NotAWeilShape { dim: usize },
    #[error("sigma does not preserve the form")]
    NotOrthogonal,
    #[error("sigma^{0} is not the identity")]
    WrongOrder(u32),
    #[error("scaling by zero")]
    ZeroScalar,
    #[error("forms live over different fields")]
    FieldMismatch,
    #[error("{ext} is not an extension of {base}")]
    NotAnExtension { base: String, ext: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A nondegenerate symmetric bilinear form on `F_q^d`, given by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramForm {
    gram: FqMatrix,
}

impl GramForm {
    pub fn new(gram: FqMatrix) -> Result<GramForm, FormError> {
        if !gram.is_square() || gram.rows() == 0 {
            return Err(FormError::NotSquare);
        }
        if !gram.is_symmetric() {
            return Err(FormError::NotSymmetric);
        }
        if gram.det().is_zero() {
            return Err(FormError::Degenerate);
        }
        Ok(GramForm { gram })
    }

    pub fn from_ints(field: &Field, rows: &[Vec<i64>]) -> Result<GramForm, FormError> {
        GramForm::new(FqMatrix::from_ints(field, rows))
    }

    pub fn hyperbolic_plane(field: &Field) -> GramForm {
        GramForm::from_ints(field, &[vec![0, 1], vec![1, 0]]).expect("hyperbolic plane is nondegenerate")
    }

    pub fn field(&self) -> &Field {
        self.gram.field()
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &FqMatrix {
        &self.gram
    }

    pub fn eval(&self, x: &[FieldElement], y: &[FieldElement]) -> FieldElement {
        let f = self.field();
        let gy = self.gram.mul_vec(y);
        x.iter()
            .zip(&gy)
            .fold(f.zero(), |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
    }

    /// `det(Q/2) = det(gram) * 2^{-d}`.
    pub fn half_det(&self) -> FieldElement {
        let f = self.field();
        let inv2 = f.inv(f.from_i64(2)).expect("odd characteristic");
        f.mul(self.gram.det(), f.pow(inv2, self.dim() as u64))
    }

    /// A uniformly random nondegenerate symmetric form of dimension `d`.
    pub fn random<R: Rng + ?Sized>(field: &Field, d: usize, rng: &mut R) -> GramForm {
        loop {
            let mut m = FqMatrix::zeros(field, d, d);
            for i in 0..d {
                for j in i..d {
                    let e = field.element(rng.gen_range(0..field.q())).unwrap();
                    m[(i, j)] = e;
                    m[(j, i)] = e;
                }
            }
            if let Ok(form) = GramForm::new(m) {
                return form;
            }
        }
    }
}

fn check_cap(field: &Field, d: usize, cap: u64) -> Result<(), FormError> {
    let points = (field.q() as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if points > cap as u128 {
        return Err(FormError::TooLarge { points, cap });
    }
    Ok(())
}

/// Histogram of `tr(Q(X,X)/2)` over all `X in F_q^d`, indexed by the residue in `[0, p)`.
///
/// Enumerates the first `d - 1` coordinates depth-first, carrying the partial quadratic
/// value and the linear terms `sum_{m < depth} g_{jm} x_m` for the remaining coordinates.
/// The last coordinate is absorbed by counting `(value, linear term)` pairs and pairing
/// them with the exhaustive fibre counts of `x -> x(l + a x)`.
pub fn trace_histogram(form: &GramForm, cap: u64) -> Result<Vec<u64>, FormError> {
    let f = form.field().clone();
    let d = form.dim();
    check_cap(&f, d, cap)?;
    let mut hist = vec![0u64; f.p() as usize];
    if d == 0 {
        hist[0] = 1;
        return Ok(hist);
    }
    let q = f.q() as usize;
    let inv2 = f.inv(f.from_i64(2)).unwrap();
    let g = form.gram();
    let half_diag: Vec<FieldElement> = (0..d).map(|i| f.mul(g[(i, i)], inv2)).collect();

    struct Walker<'a> {
        f: &'a Field,
        g: &'a FqMatrix,
        half_diag: &'a [FieldElement],
        d: usize,
        q: usize,
        pairs: Vec<u64>,
        lin: Vec<Vec<FieldElement>>,
    }

    impl Walker<'_> {
        fn walk(&mut self, depth: usize, value: FieldElement) {
            if depth + 1 == self.d {
                let l = self.lin[depth][depth];
                self.pairs[value.code() as usize * self.q + l.code() as usize] += 1;
                return;
            }
            let f = self.f;
            let a = self.half_diag[depth];
            let l = self.lin[depth][depth];
            for x in f.elements() {
                let v = f.add(value, f.mul(x, f.add(l, f.mul(a, x))));
                for j in depth + 1..self.d {
                    let next = f.add(self.lin[depth][j], f.mul(self.g[(j, depth)], x));
                    self.lin[depth + 1][j] = next;
                }
                self.walk(depth + 1, v);
            }
        }
    }

    let run = |first: Option<FieldElement>| -> Vec<u64> {
        let mut w = Walker {
            f: &f,
            g,
            half_diag: &half_diag,
            d,
            q,
            pairs: vec![0; q * q],
            lin: vec![vec![f.zero(); d]; d],
        };
        match first {
            None => w.walk(0, f.zero()),
            Some(x) => {
                let v = f.mul(x, f.mul(half_diag[0], x));
                for j in 1..d {
                    w.lin[1][j] = f.mul(g[(j, 0)], x);
                }
                w.walk(1, v);
            }
        }
        w.pairs
    };

    let pairs: Vec<u64> = if d <= 1 {
        run(None)
    } else {
        f.elements()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|x| run(Some(x)))
            .reduce(
                || vec![0; q * q],
                |mut a, b| {
                    a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    };

    let elems: Vec<FieldElement> = f.elements().collect();
    let a = half_diag[d - 1];
    let mut fibre = vec![0u64; q * q];
    for &l in &elems {
        for &x in &elems {
            let c = f.mul(x, f.add(l, f.mul(a, x)));
            fibre[l.code() as usize * q + c.code() as usize] += 1;
        }
    }
    let mut by_value = vec![0u64; q];
    for &v in &elems {
        for &l in &elems {
            let n = pairs[v.code() as usize * q + l.code() as usize];
            if n == 0 {
                continue;
            }
            for &c in &elems {
                let m = fibre[l.code() as usize * q + c.code() as usize];
                if m != 0 {
                    by_value[f.add(v, c).code() as usize] += n * m;
                }
            }
        }
    }
    for (code, &n) in by_value.iter().enumerate() {
        hist[f.trace_abs(f.element(code as u32).unwrap()) as usize] += n;
    }
    Ok(hist)
}

pub(crate) fn cyc_from_histogram(p: u32, hist: &[u64]) -> CycNum {
    let counts: Vec<i128> = hist.iter().map(|&c| c as i128).collect();
    CycNum::from_exponent_counts(p, &counts)
}

/// Unnormalised Gauss sum `sum_X psi(Q(X,X)/2)` by enumeration, under the default cap.
pub fn gauss_sum_brute(form: &GramForm) -> Result<CycNum, FormError> {
    gauss_sum_brute_capped(form, DEFAULT_SUM_CAP)
}

pub fn gauss_sum_brute_capped(form: &GramForm, cap: u64) -> Result<CycNum, FormError> {
    let hist = trace_histogram(form, cap)?;
    Ok(cyc_from_histogram(form.field().p(), &hist))
}

/// `g1^d * (det(Q/2)/q)`: the value the brute sum must equal.
pub fn gauss_sum_closed(form: &GramForm) -> CycNum {
    let f = form.field();
    let g1 = base_gauss_sum(f);
    let sign = f.legendre(form.half_det()) as i64;
    g1.pow(form.dim() as u32).scale_int(sign)
}

/// `gamma = eps^d * (det(Q/2)/q)`.
pub fn weil_index_closed(form: &GramForm) -> WeilIndex {
    let f = form.field();
    let class = EpsClass::of(f);
    WeilIndex::eps_pow(form.dim() as i64, class).with_sign(f.legendre(form.half_det()))
}

/// Factor a `d`-dimensional Gauss sum as `g1^d * s` and return `s * eps^d`.
pub fn weil_index_of_cyc(g: &CycNum, d: usize, field: &Field) -> Result<WeilIndex, FormError> {
    let shape = FormError::NotAWeilShape { dim: d };
    if g.conductor() != field.p() {
        return Err(shape);
    }
    // g / g1^d = g * conj(g1)^d / q^d
    let g1 = base_gauss_sum(field);
    let q_d = num_rational::BigRational::from_integer(num_bigint::BigInt::from(field.q()).pow(d as u32));
    let quotient = (g * &g1.conj().pow(d as u32)).scale(&q_d.recip());
    let sign = match quotient.as_rational() {
        Some(r) if r == &num_rational::BigRational::from_integer(1.into()) => 1,
        Some(r) if r == &num_rational::BigRational::from_integer((-1).into()) => -1,
        _ => return Err(shape),
    };
    Ok(WeilIndex::eps_pow(d as i64, EpsClass::of(field)).with_sign(sign))
}

/// Weil index from a brute-force sum.
pub fn weil_index_brute(form: &GramForm) -> Result<WeilIndex, FormError> {
    let g = gauss_sum_brute(form)?;
    weil_index_of_cyc(&g, form.dim(), form.field())
}

/// The form `a * Q`.
pub fn scale_form(form: &GramForm, a: FieldElement) -> Result<GramForm, FormError> {
    if a.is_zero() {
        return Err(FormError::ZeroScalar);
    }
    GramForm::new(form.gram().scale(a))
}

/// Orthogonal direct sum (block-diagonal Gram matrix).
pub fn direct_sum_form(a: &GramForm, b: &GramForm) -> Result<GramForm, FormError> {
    if a.field() != b.field() {
        return Err(FormError::FieldMismatch);
    }
    let (da, db) = (a.dim(), b.dim());
    let mut m = FqMatrix::zeros(a.field(), da + db, da + db);
    for i in 0..da {
        for j in 0..da {
            m[(i, j)] = a.gram()[(i, j)];
        }
    }
    for i in 0..db {
        for j in 0..db {
            m[(da + i, da + j)] = b.gram()[(i, j)];
        }
    }
    GramForm::new(m)
}

/// View a form over `F_{q^r}` as an `rd`-dimensional form over `base = F_q`
/// through the relative trace. Basis vector `a * d + m` is `t^a e_m`.
pub fn restrict_scalars_form(form: &GramForm, base: &Field) -> Result<GramForm, FormError> {
    let ext = form.field();
    let e = Extension::new(base, ext).ok_or_else(|| FormError::NotAnExtension {
        base: base.to_string(),
        ext: ext.to_string(),
    })?;
    let basis = e.basis();
    let d = form.dim();
    let r = basis.len();
    let mut m = FqMatrix::zeros(base, r * d, r * d);
    for a in 0..r {
        for b in 0..r {
            let ab = ext.mul(basis[a], basis[b]);
            for i in 0..d {
                for j in 0..d {
                    let v = ext.mul(ab, form.gram()[(i, j)]);
                    m[(a * d + i, b * d + j)] = e.relative_trace(v);
                }
            }
        }
    }
    GramForm::new(m)
}

/// The Galois twist of `(V, Q)` by `sigma in O(V, Q)` with `sigma^r = 1`.
///
/// Realised as the `F_q`-points `{ v in V (x) F_{q^r} : sigma(Fr(v)) = v }`: the fixed
/// space of the `F_p`-linear map `sigma o Fr - 1` on `F_{q^r}^d`, from which a
/// `F_{q^r}`-independent subset of size `d` is an `F_q`-basis.
pub fn galois_twist_form(form: &GramForm, sigma: &FqMatrix, r: u32) -> Result<GramForm, FormError> {
    let base = form.field().clone();
    let d = form.dim();
    if sigma.rows() != d || sigma.cols() != d || *sigma.field() != base {
        return Err(FormError::NotOrthogonal);
    }
    if sigma.transpose().mul(form.gram()).mul(sigma) != *form.gram() {
        return Err(FormError::NotOrthogonal);
    }
    if r == 0 || sigma.pow(r as u64) != FqMatrix::identity(&base, d) {
        return Err(FormError::WrongOrder(r));
    }
    if r == 1 {
        return Ok(form.clone());
    }
    let ext = Field::new(base.p() as u64, base.k() * r)?;
    let e = Extension::new(&base, &ext).expect("degree divides");
    let prime = Field::new(base.p() as u64, 1)?;
    let kr = ext.k() as usize;
    let n = d * kr;
    let sig: Vec<Vec<FieldElement>> = sigma
        .to_rows()
        .iter()
        .map(|row| row.iter().map(|&x| e.embed(x)).collect())
        .collect();

    let apply = |v: &[FieldElement]| -> Vec<FieldElement> {
        let fr: Vec<FieldElement> = v.iter().map(|&x| e.frobenius_q(x)).collect();
        (0..d)
            .map(|i| (0..d).fold(ext.zero(), |acc, j| ext.add(acc, ext.mul(sig[i][j], fr[j]))))
            .collect()
    };
    let digits = |v: &[FieldElement]| -> Vec<u32> { v.iter().flat_map(|&x| ext.coeffs(x)).collect() };

    // columns of (phi - 1) in F_p coordinates
    let mut lin = FqMatrix::zeros(&prime, n, n);
    let prime_basis = ext.prime_basis();
    for col in 0..n {
        let mut v = vec![ext.zero(); d];
        v[col / kr] = prime_basis[col % kr];
        let w = apply(&v);
        let diff: Vec<FieldElement> = w.iter().zip(&v).map(|(&a, &b)| ext.sub(a, b)).collect();
        for (row, c) in digits(&diff).into_iter().enumerate() {
            lin[(row, col)] = prime.from_i64(c as i64);
        }
    }
    let fixed = lin.nullspace();
    let mut chosen: Vec<Vec<FieldElement>> = Vec::new();
    for vec_fp in fixed {
        let v: Vec<FieldElement> = (0..d)
            .map(|i| {
                let c: Vec<u32> = vec_fp[i * kr..(i + 1) * kr].iter().map(|x| x.code()).collect();
                ext.from_coeffs(&c)
            })
            .collect();
        let mut trial = chosen.clone();
        trial.push(v.clone());
        if FqMatrix::from_rows(&ext, trial).rank() == chosen.len() + 1 {
            chosen.push(v);
        }
        if chosen.len() == d {
            break;
        }
    }
    assert_eq!(chosen.len(), d, "descent must produce a full basis");
    let gext: Vec<Vec<FieldElement>> = form
        .gram()
        .to_rows()
        .iter()
        .map(|row| row.iter().map(|&x| e.embed(x)).collect())
        .collect();
    let mut m = FqMatrix::zeros(&base, d, d);
    for a in 0..d {
        for b in 0..d {
            let mut acc = ext.zero();
            for i in 0..d {
                for j in 0..d {
                    let t = ext.mul(chosen[a][i], ext.mul(gext[i][j], chosen[b][j]));
                    acc = ext.add(acc, t);
                }
            }
            m[(a, b)] = e.pull_back(acc).expect("descended form takes values in F_q");
        }
    }
    GramForm::new(m)
}

/// Reflection `x -> x - 2 B(x,v)/B(v,v) v`; `None` if `v` is isotropic.
pub fn reflection(form: &GramForm, v: &[FieldElement]) -> Option<FqMatrix> {
    let f = form.field();
    let norm = form.eval(v, v);
    let inv = f.inv(norm)?;
    let c = f.mul(f.from_i64(2), inv);
    let gv = form.gram().mul_vec(v);
    let d = form.dim();
    let mut s = FqMatrix::identity(f, d);
    for i in 0..d {
        for j in 0..d {
            let t = f.mul(c, f.mul(v[i], gv[j]));
            s[(i, j)] = f.sub(s[(i, j)], t);
        }
    }
    Some(s)
}

/// Multiplicative order of an invertible matrix, if at most `limit`.
pub fn matrix_order(m: &FqMatrix, limit: u32) -> Option<u32> {
    let id = FqMatrix::identity(m.field(), m.rows());
    let mut acc = m.clone();
    for r in 1..=limit {
        if acc == id {
            return Some(r);
        }
        acc = acc.mul(m);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn field(p: u64, k: u32) -> Field {
        Field::new(p, k).unwrap()
    }

    fn int(p: u32, n: i64) -> CycNum {
        CycNum::from_integer(p, n)
    }

    #[test]
    fn hyperbolic_plane_sum_is_q() {
        let f = field(5, 1);
        let h = GramForm::hyperbolic_plane(&f);
        assert_eq!(gauss_sum_brute(&h).unwrap(), int(5, 5));
        assert_eq!(weil_index_closed(&h), WeilIndex::one(EpsClass::of(&f)));
        assert_eq!(weil_index_brute(&h).unwrap(), weil_index_closed(&h));
    }

    #[test]
    fn one_dimensional_sums() {
        let f5 = field(5, 1);
        let q2 = GramForm::from_ints(&f5, &[vec![2]]).unwrap();
        assert_eq!(gauss_sum_brute(&q2).unwrap(), base_gauss_sum(&f5));
        let f7 = field(7, 1);
        let q6 = GramForm::from_ints(&f7, &[vec![6]]).unwrap();
        assert_eq!(gauss_sum_brute(&q6).unwrap(), -&base_gauss_sum(&f7));
    }

    #[test]
    fn closed_form_examples() {
        for q in [5u64, 7, 11, 13] {
            let f = Field::from_order(q).unwrap();
            let c = EpsClass::of(&f);
            let two_id = GramForm::from_ints(&f, &[vec![2, 0], vec![0, 2]]).unwrap();
            assert_eq!(weil_index_closed(&two_id), WeilIndex::from_sign(c.minus_one(), c));
            let g2 = GramForm::from_ints(&f, &[vec![2, -3], vec![-3, 6]]).unwrap();
            let q_over_3 = if q % 3 == 1 { 1 } else { -1 };
            assert_eq!(weil_index_closed(&g2), WeilIndex::from_sign(q_over_3, c), "q = {q}");
            assert_eq!(weil_index_brute(&g2).unwrap(), weil_index_closed(&g2));
        }
    }

    #[test]
    fn weil_index_of_cyc_examples() {
        let f5 = field(5, 1);
        let c5 = EpsClass::of(&f5);
        assert_eq!(weil_index_of_cyc(&int(5, 5), 2, &f5).unwrap(), WeilIndex::one(c5));

        let f7 = field(7, 1);
        let c7 = EpsClass::of(&f7);
        let g = base_gauss_sum(&f7).pow(3).scale_int(-1);
        let w = weil_index_of_cyc(&g, 3, &f7).unwrap();
        // -eps^3 = -(eps^2) eps = eps at q = 7
        assert_eq!(w, WeilIndex::eps(c7));
        assert_eq!(w, WeilIndex::eps_pow(3, c7).with_sign(-1));

        let bad = &int(5, 1) + &CycNum::zeta_pow(5, 1);
        assert_eq!(
            weil_index_of_cyc(&bad, 1, &f5),
            Err(FormError::NotAWeilShape { dim: 1 })
        );
    }

    #[test]
    fn degenerate_and_asymmetric_rejected() {
        let f = field(7, 1);
        assert_eq!(
            GramForm::from_ints(&f, &[vec![1, 1], vec![1, 1]]),
            Err(FormError::Degenerate)
        );
        assert_eq!(
            GramForm::from_ints(&f, &[vec![1, 2], vec![3, 1]]),
            Err(FormError::NotSymmetric)
        );
        let big = GramForm::from_ints(&f, &[vec![1]]).unwrap();
        assert!(matches!(
            gauss_sum_brute_capped(&big, 3),
            Err(FormError::TooLarge { .. })
        ));
    }

    #[test]
    fn scaling_examples() {
        let f5 = field(5, 1);
        let q = GramForm::from_ints(&f5, &[vec![2]]).unwrap();
        let base = weil_index_brute(&q).unwrap();
        let by4 = scale_form(&q, f5.from_i64(4)).unwrap();
        assert_eq!(weil_index_brute(&by4).unwrap(), base);
        let by2 = scale_form(&q, f5.from_i64(2)).unwrap();
        assert_eq!(weil_index_brute(&by2).unwrap(), base.with_sign(-1));
        assert_eq!(scale_form(&q, f5.zero()), Err(FormError::ZeroScalar));

        let f7 = field(7, 1);
        let q7 = GramForm::from_ints(&f7, &[vec![2, 0], vec![0, 2]]).unwrap();
        let s = scale_form(&q7, f7.from_i64(3)).unwrap();
        assert_eq!(weil_index_brute(&s).unwrap(), weil_index_brute(&q7).unwrap());
    }

    #[test]
    fn direct_sum_examples() {
        let f5 = field(5, 1);
        let h = GramForm::hyperbolic_plane(&f5);
        let hh = direct_sum_form(&h, &h).unwrap();
        assert_eq!(weil_index_brute(&hh).unwrap(), WeilIndex::one(EpsClass::of(&f5)));

        let f7 = field(7, 1);
        let two = GramForm::from_ints(&f7, &[vec![2]]).unwrap();
        let s = direct_sum_form(&two, &two).unwrap();
        assert_eq!(
            weil_index_brute(&s).unwrap(),
            WeilIndex::from_sign(-1, EpsClass::of(&f7))
        );

        let a = GramForm::from_ints(&f5, &[vec![2]]).unwrap();
        let b = GramForm::from_ints(&f5, &[vec![-2]]).unwrap();
        let ab = direct_sum_form(&a, &b).unwrap();
        assert_eq!(weil_index_brute(&ab).unwrap(), WeilIndex::one(EpsClass::of(&f5)));

        assert_eq!(direct_sum_form(&a, &two), Err(FormError::FieldMismatch));
    }

    #[test]
    fn restriction_examples() {
        let f5 = field(5, 1);
        let f25 = field(5, 2);
        let q0 = GramForm::from_ints(&f25, &[vec![2]]).unwrap();
        let res = restrict_scalars_form(&q0, &f5).unwrap();
        assert_eq!(res.dim(), 2);
        assert_eq!(gauss_sum_brute(&res).unwrap(), gauss_sum_brute(&q0).unwrap());
        assert_eq!(
            weil_index_brute(&res).unwrap().power_of_i(),
            weil_index_brute(&q0).unwrap().power_of_i()
        );

        let one = GramForm::from_ints(&f5, &[vec![1]]).unwrap();
        assert_eq!(restrict_scalars_form(&one, &f5).unwrap(), one);

        let f7 = field(7, 1);
        let f49 = field(7, 2);
        let h = GramForm::hyperbolic_plane(&f49);
        let hr = restrict_scalars_form(&h, &f7).unwrap();
        assert_eq!(hr.dim(), 4);
        assert_eq!(weil_index_brute(&hr).unwrap(), WeilIndex::one(EpsClass::of(&f7)));

        assert!(matches!(
            restrict_scalars_form(&h, &f5),
            Err(FormError::NotAnExtension { .. })
        ));
    }

    #[test]
    fn twist_examples() {
        let f5 = field(5, 1);
        let h = GramForm::hyperbolic_plane(&f5);
        let id = FqMatrix::identity(&f5, 2);
        assert_eq!(galois_twist_form(&h, &id, 1).unwrap(), h);
        // identity with r = 2 still gives a congruent form
        let t = galois_twist_form(&h, &id, 2).unwrap();
        assert_eq!(weil_index_closed(&t), weil_index_closed(&h));

        let swap = FqMatrix::from_ints(&f5, &[vec![0, 1], vec![1, 0]]);
        let tw = galois_twist_form(&h, &swap, 2).unwrap();
        assert_eq!(
            weil_index_brute(&tw).unwrap(),
            WeilIndex::from_sign(-1, EpsClass::of(&f5))
        );

        let f7 = field(7, 1);
        let q = GramForm::from_ints(&f7, &[vec![2, 0], vec![0, 2]]).unwrap();
        let rot = FqMatrix::from_ints(&f7, &[vec![0, -1], vec![1, 0]]);
        let tw = galois_twist_form(&q, &rot, 4).unwrap();
        assert_eq!(weil_index_brute(&tw).unwrap(), weil_index_brute(&q).unwrap());
        assert_eq!(
            weil_index_brute(&tw).unwrap(),
            WeilIndex::from_sign(-1, EpsClass::of(&f7))
        );

        assert_eq!(galois_twist_form(&q, &rot, 2), Err(FormError::WrongOrder(2)));
        let bad = FqMatrix::from_ints(&f7, &[vec![1, 1], vec![0, 1]]);
        assert_eq!(galois_twist_form(&q, &bad, 7), Err(FormError::NotOrthogonal));
    }

    #[test]
    fn random_closed_form_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, k) in [(5, 1), (7, 1), (3, 2)] {
            let f = field(p, k);
            for d in 1..=4 {
                for _ in 0..5 {
                    let form = GramForm::random(&f, d, &mut rng);
                    let g = gauss_sum_brute(&form).unwrap();
                    assert_eq!(g, gauss_sum_closed(&form));
                    assert_eq!(&g * &g.conj(), int(f.p(), (f.q() as i64).pow(d as u32)));
                }
            }
        }
    }

    #[test]
    fn congruence_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = field(7, 1);
        for d in 1..=3 {
            let form = GramForm::random(&f, d, &mut rng);
            let p = loop {
                let m = GramForm::random(&f, d, &mut rng).gram().clone();
                // any invertible matrix works; random symmetric ones are fine here
                if !m.det().is_zero() {
                    break m;
                }
            };
            let moved = GramForm::new(p.transpose().mul(form.gram()).mul(&p)).unwrap();
            assert_eq!(weil_index_brute(&moved).unwrap(), weil_index_closed(&form));
        }
    }

    #[test]
    fn reflections_are_orthogonal_with_det_minus_one() {
        let f = field(7, 1);
        let form = GramForm::from_ints(&f, &[vec![1, 2, 0], vec![2, 3, 1], vec![0, 1, 5]]).unwrap();
        let v = vec![f.from_i64(1), f.from_i64(0), f.from_i64(0)];
        let s = reflection(&form, &v).unwrap();
        assert_eq!(s.transpose().mul(form.gram()).mul(&s), *form.gram());
        assert_eq!(s.det(), f.from_i64(-1));
        assert_eq!(matrix_order(&s, 10), Some(2));
    }
}
