//! Lie algebras over `F_q`: root data, invariant forms, and matrix models with
//! their adjoint group action.

mod types;

pub use types::{torus_gram, weil_index_type, weil_index_type_by_descent, AlgebraType, RootType, TwistSpec};

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::field::{Field, FieldElement};
use crate::matrix::FqMatrix;
use crate::qform::{FormError, GramForm};

#[derive(Debug, Error)]
pub enum LieError {
    #[error("unsupported algebra type `{0}`")]
    UnsupportedType(String),
    #[error("the invariant form of {tag} is degenerate over F_{q}")]
    DegenerateForm { tag: String, q: u32 },
    #[error("{tag} has no matrix model; only sl, sp and split so are built explicitly")]
    NoMatrixModel { tag: String },
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Which classical family a matrix model belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `sl(n)`, traceless matrices.
    Sl,
    /// `sp(2m)`, `X^t J + J X = 0`.
    Sp,
    /// split `so(n)`, `X^t S + S X = 0`.
    So,
}

/// Extracts coordinates of a matrix in the span of a basis from a few entries.
#[derive(Clone, Debug)]
struct Coordinates {
    positions: Vec<(usize, usize)>,
    inverse: FqMatrix,
}

impl Coordinates {
    fn new(field: &Field, n: usize, basis: &[FqMatrix]) -> Coordinates {
        let dim = basis.len();
        let mut positions = Vec::with_capacity(dim);
        // greedy choice of entries making the evaluation map invertible
        let mut chosen: Vec<Vec<FieldElement>> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if positions.len() == dim {
                    break;
                }
                let row: Vec<FieldElement> = basis.iter().map(|b| b[(i, j)]).collect();
                let mut trial = chosen.clone();
                trial.push(row.clone());
                if FqMatrix::from_rows(field, trial).rank() == chosen.len() + 1 {
                    chosen.push(row);
                    positions.push((i, j));
                }
            }
        }
        assert_eq!(positions.len(), dim, "basis is linearly dependent");
        let inverse = FqMatrix::from_rows(field, chosen)
            .inverse()
            .expect("selected entries are independent");
        Coordinates { positions, inverse }
    }

    fn coords(&self, m: &FqMatrix) -> Vec<FieldElement> {
        let v: Vec<FieldElement> = self.positions.iter().map(|&p| m[p]).collect();
        self.inverse.mul_vec(&v)
    }
}

/// One row of a sparse matrix: `y_row = sum coef * x_col`.
#[derive(Clone, Debug)]
pub struct SparseRow {
    pub row: usize,
    pub entries: Vec<(usize, FieldElement)>,
}

/// `Ad(g)` on coordinate vectors, stored as the rows that differ from the identity.
#[derive(Clone, Debug)]
pub struct SparseAd {
    pub rows: Vec<SparseRow>,
}

impl SparseAd {
    fn from_dense(m: &FqMatrix) -> SparseAd {
        let field = m.field();
        let mut rows = Vec::new();
        for i in 0..m.rows() {
            let r = m.row(i);
            let differs = r
                .iter()
                .enumerate()
                .any(|(j, &x)| x != if i == j { field.one() } else { field.zero() });
            if differs {
                let entries = r
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(j, &x)| (j, x))
                    .collect();
                rows.push(SparseRow { row: i, entries });
            }
        }
        SparseAd { rows }
    }

    /// Applies the map in place to `x`, using `scratch` for the updated entries.
    pub fn apply(&self, field: &Field, x: &mut [FieldElement], scratch: &mut Vec<FieldElement>) {
        scratch.clear();
        for r in &self.rows {
            let mut acc = field.zero();
            for &(j, c) in &r.entries {
                acc = field.add(acc, field.mul(c, x[j]));
            }
            scratch.push(acc);
        }
        for (r, &v) in self.rows.iter().zip(scratch.iter()) {
            x[r.row] = v;
        }
    }
}

/// A classical Lie algebra realised inside `gl(n, F_q)`.
#[derive(Clone, Debug)]
pub struct LieAlgebraModel {
    field: Field,
    ty: AlgebraType,
    family: Family,
    n: usize,
    basis: Vec<FqMatrix>,
    torus: std::ops::Range<usize>,
    gram: FqMatrix,
    form_scale: FieldElement,
    coords: Coordinates,
    /// Root elements `exp(t X)` and their inverses.
    group_generators: Vec<(FqMatrix, FqMatrix)>,
    ad_generators: Vec<FqMatrix>,
    ad_sparse: Vec<SparseAd>,
}

fn unit(field: &Field, n: usize, i: usize, j: usize) -> FqMatrix {
    let mut m = FqMatrix::zeros(field, n, n);
    m[(i, j)] = field.one();
    m
}

fn sl_basis(field: &Field, n: usize) -> (Vec<FqMatrix>, usize) {
    let mut b = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            b.push(unit(field, n, i, j));
        }
    }
    for i in 0..n {
        for j in 0..i {
            b.push(unit(field, n, i, j));
        }
    }
    let torus = b.len();
    for i in 0..n - 1 {
        b.push(unit(field, n, i, i).sub(&unit(field, n, i + 1, i + 1)));
    }
    (b, torus)
}

fn sp_basis(field: &Field, m: usize) -> (Vec<FqMatrix>, usize) {
    let n = 2 * m;
    let e = |i, j| unit(field, n, i, j);
    let mut b = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                b.push(e(i, j).sub(&e(m + j, m + i)));
            }
        }
    }
    for i in 0..m {
        for j in i..m {
            b.push(if i == j {
                e(i, m + i)
            } else {
                e(i, m + j).add(&e(j, m + i))
            });
        }
    }
    for i in 0..m {
        for j in i..m {
            b.push(if i == j {
                e(m + i, i)
            } else {
                e(m + i, j).add(&e(m + j, i))
            });
        }
    }
    let torus = b.len();
    for i in 0..m {
        b.push(e(i, i).sub(&e(m + i, m + i)));
    }
    (b, torus)
}

fn so_basis(field: &Field, n: usize) -> (Vec<FqMatrix>, usize) {
    let m = n / 2;
    let e = |i, j| unit(field, n, i, j);
    let mut b = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                b.push(e(i, j).sub(&e(m + j, m + i)));
            }
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            b.push(e(i, m + j).sub(&e(j, m + i)));
            b.push(e(m + i, j).sub(&e(m + j, i)));
        }
    }
    if n % 2 == 1 {
        let z = 2 * m;
        for i in 0..m {
            b.push(e(i, z).sub(&e(z, m + i)));
            b.push(e(m + i, z).sub(&e(z, i)));
        }
    }
    let torus = b.len();
    for i in 0..m {
        b.push(e(i, i).sub(&e(m + i, m + i)));
    }
    (b, torus)
}

/// `I + X + X^2/2` for `X^3 = 0`.
fn exp_nilpotent(x: &FqMatrix) -> FqMatrix {
    let field = x.field();
    let x2 = x.mul(x);
    assert!(x2.mul(x).is_zero(), "root vector is not 3-step nilpotent");
    let half = field.inv(field.from_i64(2)).expect("odd characteristic");
    FqMatrix::identity(field, x.rows()).add(x).add(&x2.scale(half))
}

impl LieAlgebraModel {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn algebra_type(&self) -> &AlgebraType {
        &self.ty
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn tag(&self) -> String {
        self.ty.tag()
    }

    /// Size of the defining matrices.
    pub fn matrix_size(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[FqMatrix] {
        &self.basis
    }

    /// Indices of the diagonal (Cartan) basis elements.
    pub fn torus_indices(&self) -> std::ops::Range<usize> {
        self.torus.clone()
    }

    /// The invariant form `c tr(XY)` with `c = 2n` for `sl(n)`, `c = 1` otherwise,
    /// times the requested scalar.
    pub fn gram(&self) -> &FqMatrix {
        &self.gram
    }

    pub fn form(&self) -> GramForm {
        GramForm::new(self.gram.clone()).expect("nondegenerate by construction")
    }

    /// The same algebra carrying another symmetric form, e.g. for invariance checks.
    /// [`LieAlgebraModel::form`] panics if the replacement is degenerate.
    pub fn with_gram(&self, gram: FqMatrix) -> LieAlgebraModel {
        assert_eq!((gram.rows(), gram.cols()), (self.dim(), self.dim()), "gram size");
        LieAlgebraModel { gram, ..self.clone() }
    }

    pub fn form_scale(&self) -> FieldElement {
        self.form_scale
    }

    /// Restriction of the form to the torus.
    pub fn torus_form(&self) -> GramForm {
        let r = self.torus.clone();
        let rows = r
            .clone()
            .map(|i| r.clone().map(|j| self.gram[(i, j)]).collect())
            .collect();
        GramForm::new(FqMatrix::from_rows(&self.field, rows)).expect("torus form is nondegenerate")
    }

    pub fn to_matrix(&self, coords: &[FieldElement]) -> FqMatrix {
        let mut m = FqMatrix::zeros(&self.field, self.n, self.n);
        for (b, &c) in self.basis.iter().zip(coords) {
            if !c.is_zero() {
                m = m.add(&b.scale(c));
            }
        }
        m
    }

    pub fn to_coords(&self, m: &FqMatrix) -> Vec<FieldElement> {
        self.coords.coords(m)
    }

    /// `[X, Y] = XY - YX`.
    pub fn bracket_matrix(x: &FqMatrix, y: &FqMatrix) -> FqMatrix {
        x.mul(y).sub(&y.mul(x))
    }

    pub fn bracket(&self, x: &[FieldElement], y: &[FieldElement]) -> Vec<FieldElement> {
        self.to_coords(&Self::bracket_matrix(&self.to_matrix(x), &self.to_matrix(y)))
    }

    pub fn pairing(&self, x: &[FieldElement], y: &[FieldElement]) -> FieldElement {
        let gy = self.gram.mul_vec(y);
        x.iter().zip(&gy).fold(self.field.zero(), |acc, (&a, &b)| {
            self.field.add(acc, self.field.mul(a, b))
        })
    }

    pub fn group_generators(&self) -> impl Iterator<Item = &FqMatrix> {
        self.group_generators.iter().map(|(g, _)| g)
    }

    /// `Ad(g)` in the coordinate basis, one per group generator.
    pub fn ad_generators(&self) -> &[FqMatrix] {
        &self.ad_generators
    }

    pub fn ad_sparse(&self) -> &[SparseAd] {
        &self.ad_sparse
    }

    /// `X^n = 0` for the defining matrix.
    pub fn is_nilpotent_matrix(&self, x: &FqMatrix) -> bool {
        x.pow(self.n as u64).is_zero()
    }

    /// `ad(X)^dim = 0`.
    pub fn is_ad_nilpotent(&self, coords: &[FieldElement]) -> bool {
        let x = self.to_matrix(coords);
        let dim = self.dim();
        let mut cols: Vec<FqMatrix> = self.basis.clone();
        for _ in 0..dim {
            cols = cols.iter().map(|b| Self::bracket_matrix(&x, b)).collect();
            if cols.iter().all(FqMatrix::is_zero) {
                return true;
            }
        }
        cols.iter().all(FqMatrix::is_zero)
    }

    /// Order of the group generated by the root elements.
    pub fn group_order(&self) -> BigUint {
        let q = BigUint::from(self.field.q());
        let pow = |e: usize| num_traits::pow(q.clone(), e);
        let one = BigUint::from(1u32);
        match self.family {
            Family::Sl => {
                let n = self.n;
                let mut o = pow(n * (n - 1) / 2);
                for i in 2..=n {
                    o *= pow(i) - &one;
                }
                o
            }
            Family::Sp => {
                let m = self.n / 2;
                let mut o = pow(m * m);
                for i in 1..=m {
                    o *= pow(2 * i) - &one;
                }
                o
            }
            Family::So if self.n % 2 == 1 => {
                let m = self.n / 2;
                let mut o = pow(m * m);
                for i in 1..=m {
                    o *= pow(2 * i) - &one;
                }
                o / BigUint::from(2u32)
            }
            Family::So => {
                let m = self.n / 2;
                let mut o = pow(m * (m - 1)) * (pow(m) - &one);
                for i in 1..m {
                    o *= pow(2 * i) - &one;
                }
                o / BigUint::from(2u32)
            }
        }
    }

    /// Verifies the structural identities the orbit and Fourier machinery rely on.
    pub fn check_invariance(&self) -> InvarianceReport {
        let f = &self.field;
        let dim = self.dim();
        let unit_vec = |i: usize| {
            let mut v = vec![f.zero(); dim];
            v[i] = f.one();
            v
        };
        let mut closure = true;
        let mut brackets = vec![vec![Vec::new(); dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let m = Self::bracket_matrix(&self.basis[i], &self.basis[j]);
                let c = self.to_coords(&m);
                closure &= self.to_matrix(&c) == m;
                brackets[i][j] = c;
            }
        }
        let mut antisymmetry = true;
        for i in 0..dim {
            for j in 0..dim {
                let s: Vec<_> = brackets[i][j]
                    .iter()
                    .zip(&brackets[j][i])
                    .map(|(&a, &b)| f.add(a, b))
                    .collect();
                antisymmetry &= s.iter().all(|x| x.is_zero());
            }
        }
        let br = |x: &[FieldElement], j: usize| -> Vec<FieldElement> {
            // [x, b_j] from structure constants
            let mut out = vec![f.zero(); dim];
            for (i, &c) in x.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (o, &v) in out.iter_mut().zip(&brackets[i][j]) {
                    *o = f.add(*o, f.mul(c, v));
                }
            }
            out
        };
        let mut jacobi = true;
        for i in 0..dim {
            for j in 0..dim {
                for k in j + 1..dim {
                    // [b_i,[b_j,b_k]] + [b_j,[b_k,b_i]] + [b_k,[b_i,b_j]]
                    let neg = |v: Vec<FieldElement>| v.into_iter().map(|x| f.neg(x)).collect::<Vec<_>>();
                    let t1 = neg(br(&brackets[j][k], i));
                    let t2 = neg(br(&brackets[k][i], j));
                    let t3 = neg(br(&brackets[i][j], k));
                    jacobi &= (0..dim).all(|m| f.add(f.add(t1[m], t2[m]), t3[m]).is_zero());
                }
            }
        }
        let mut bracket_invariance = true;
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let a = self.pairing(&brackets[i][j], &unit_vec(k));
                    let b = self.pairing(&unit_vec(j), &brackets[i][k]);
                    bracket_invariance &= f.add(a, b).is_zero();
                }
            }
        }
        let ad_invariance = self
            .ad_generators
            .iter()
            .all(|a| a.transpose().mul(&self.gram).mul(a) == self.gram);
        let nondegenerate = !self.gram.det().is_zero();
        InvarianceReport {
            algebra: self.tag(),
            q: f.q(),
            dim,
            closure,
            antisymmetry,
            jacobi,
            bracket_invariance,
            ad_invariance,
            nondegenerate,
            pass: closure && antisymmetry && jacobi && bracket_invariance && ad_invariance && nondegenerate,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct InvarianceReport {
    pub algebra: String,
    pub q: u32,
    pub dim: usize,
    pub closure: bool,
    pub antisymmetry: bool,
    pub jacobi: bool,
    pub bracket_invariance: bool,
    pub ad_invariance: bool,
    pub nondegenerate: bool,
    pub pass: bool,
}

/// Builds the matrix model of a split classical type with form `scale * c * tr(XY)`.
pub fn build_algebra(ty: &AlgebraType, field: &Field, scale: FieldElement) -> Result<LieAlgebraModel, LieError> {
    let tag = ty.tag();
    if !ty.is_split() {
        return Err(LieError::NoMatrixModel { tag });
    }
    if scale.is_zero() {
        return Err(LieError::Form(FormError::ZeroScalar));
    }
    let (family, n) = match ty.root {
        RootType::A(r) => (Family::Sl, r + 1),
        RootType::C(r) => (Family::Sp, 2 * r),
        RootType::B(r) => (Family::So, 2 * r + 1),
        RootType::D(r) => (Family::So, 2 * r),
        _ => return Err(LieError::NoMatrixModel { tag }),
    };
    let (basis, torus_start) = match family {
        Family::Sl => sl_basis(field, n),
        Family::Sp => sp_basis(field, n / 2),
        Family::So => so_basis(field, n),
    };
    let dim = basis.len();
    let c = match family {
        Family::Sl => field.mul(scale, field.from_i64(2 * n as i64)),
        _ => scale,
    };
    let mut gram = FqMatrix::zeros(field, dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = field.mul(c, basis[i].mul(&basis[j]).trace());
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    if gram.det().is_zero() {
        return Err(LieError::DegenerateForm { tag, q: field.q() });
    }
    let coords = Coordinates::new(field, n, &basis);
    let mut model = LieAlgebraModel {
        field: field.clone(),
        ty: ty.clone(),
        family,
        n,
        basis,
        torus: torus_start..dim,
        gram,
        form_scale: scale,
        coords,
        group_generators: Vec::new(),
        ad_generators: Vec::new(),
        ad_sparse: Vec::new(),
    };
    let prime_basis = field.prime_basis();
    for r in 0..torus_start {
        for &t in &prime_basis {
            let x = model.basis[r].scale(t);
            let g = exp_nilpotent(&x);
            let g_inv = exp_nilpotent(&x.scale(field.from_i64(-1)));
            debug_assert!(g.mul(&g_inv) == FqMatrix::identity(field, n));
            let cols: Vec<Vec<FieldElement>> = model
                .basis
                .iter()
                .map(|b| model.to_coords(&g.mul(b).mul(&g_inv)))
                .collect();
            let ad = FqMatrix::from_rows(field, cols).transpose();
            model.ad_sparse.push(SparseAd::from_dense(&ad));
            model.ad_generators.push(ad);
            model.group_generators.push((g, g_inv));
        }
    }
    Ok(model)
}
