//! Root data for simple types, diagram twists, and the torus-level Weil index engine.

use std::fmt;
use std::str::FromStr;

use crate::field::Field;
use crate::matrix::FqMatrix;
use crate::qform::{galois_twist_form, weil_index_closed, GramForm};
use crate::weil::WeilIndex;

use super::LieError;

/// A simple root system (absolutely quasi-simple type).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RootType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    E6,
    E7,
    E8,
    F4,
    G2,
}

impl RootType {
    pub fn rank(self) -> usize {
        match self {
            RootType::A(n) | RootType::B(n) | RootType::C(n) | RootType::D(n) => n,
            RootType::E6 => 6,
            RootType::E7 => 7,
            RootType::E8 => 8,
            RootType::F4 => 4,
            RootType::G2 => 2,
        }
    }

    pub fn coxeter(self) -> u32 {
        match self {
            RootType::A(n) => n as u32 + 1,
            RootType::B(n) | RootType::C(n) => 2 * n as u32,
            RootType::D(n) => 2 * n as u32 - 2,
            RootType::G2 => 6,
            RootType::F4 | RootType::E6 => 12,
            RootType::E7 => 18,
            RootType::E8 => 30,
        }
    }

    fn edges(self) -> Vec<(usize, usize)> {
        let chain = |n: usize| (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect::<Vec<_>>();
        match self {
            RootType::A(n) | RootType::B(n) | RootType::C(n) => chain(n),
            RootType::D(2) => vec![],
            RootType::D(n) => {
                let mut e = chain(n - 1);
                e.push((n - 3, n - 1));
                e
            }
            // Bourbaki: 1-3-4-5-..., 2 attached to 4
            RootType::E6 | RootType::E7 | RootType::E8 => {
                let n = self.rank();
                let mut e = vec![(0, 2), (1, 3)];
                e.extend((2..n - 1).map(|i| (i, i + 1)));
                e
            }
            RootType::F4 => chain(4),
            RootType::G2 => chain(2),
        }
    }

    /// Cartan matrix `C_ij = 2 (a_i, a_j) / (a_j, a_j)`, Bourbaki numbering.
    pub fn cartan(self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut c = vec![vec![0i64; n]; n];
        for (i, row) in c.iter_mut().enumerate() {
            row[i] = 2;
        }
        for (i, j) in self.edges() {
            c[i][j] = -1;
            c[j][i] = -1;
        }
        match self {
            RootType::B(n) if n >= 2 => c[n - 2][n - 1] = -2,
            RootType::C(n) if n >= 2 => c[n - 1][n - 2] = -2,
            RootType::F4 => c[1][2] = -2,
            RootType::G2 => c[1][0] = -3,
            _ => {}
        }
        c
    }

    /// Minimal symmetriser: squared root lengths with the short roots normalised to 1.
    pub fn symmetriser(self) -> Vec<i64> {
        let n = self.rank();
        match self {
            RootType::B(n) => (0..n).map(|i| if i + 1 == n { 1 } else { 2 }).collect(),
            RootType::C(n) => (0..n).map(|i| if i + 1 == n { 2 } else { 1 }).collect(),
            RootType::F4 => vec![2, 2, 1, 1],
            RootType::G2 => vec![1, 3],
            _ => vec![1; n],
        }
    }

    /// `C * D`, a symmetric integer matrix.
    pub fn symmetrised_cartan(self) -> Vec<Vec<i64>> {
        let c = self.cartan();
        let d = self.symmetriser();
        c.iter()
            .map(|row| row.iter().zip(&d).map(|(a, b)| a * b).collect())
            .collect()
    }

    /// Simple coroots in the standard lattice `Z^m` of the classical matrix models.
    fn classical_coroots(self) -> Option<Vec<Vec<i64>>> {
        let unit = |m: usize, i: usize| {
            let mut v = vec![0i64; m];
            v[i] = 1;
            v
        };
        let diff = |m: usize, i: usize| {
            let mut v = unit(m, i);
            v[i + 1] = -1;
            v
        };
        Some(match self {
            RootType::A(n) => (0..n).map(|i| diff(n + 1, i)).collect(),
            RootType::B(n) => (0..n)
                .map(|i| {
                    if i + 1 == n {
                        unit(n, i).iter().map(|x| 2 * x).collect()
                    } else {
                        diff(n, i)
                    }
                })
                .collect(),
            RootType::C(n) => (0..n)
                .map(|i| if i + 1 == n { unit(n, i) } else { diff(n, i) })
                .collect(),
            RootType::D(n) => (0..n)
                .map(|i| {
                    if i + 1 == n {
                        let mut v = unit(n, n - 1);
                        v[n - 2] = 1;
                        v
                    } else {
                        diff(n, i)
                    }
                })
                .collect(),
            _ => return None,
        })
    }

    /// Integer Gram matrix of the invariant form on the torus, in the coroot basis.
    ///
    /// Classical types use the matrix-model pairing: `2n tr(XY)` on `sl(n)` and
    /// `tr(XY)` on `sp(2n)`, `so(2n+1)`, `so(2n)` (which is `2 sum a_i b_i` on their
    /// diagonal tori). Exceptional types use the symmetrised Cartan matrix.
    pub fn torus_gram_ints(self) -> Vec<Vec<i64>> {
        match self.classical_coroots() {
            Some(h) => {
                let scale = match self {
                    RootType::A(n) => 2 * (n as i64 + 1),
                    _ => 2,
                };
                h.iter()
                    .map(|a| {
                        h.iter()
                            .map(|b| scale * a.iter().zip(b).map(|(x, y)| x * y).sum::<i64>())
                            .collect()
                    })
                    .collect()
            }
            None => self.symmetrised_cartan(),
        }
    }

    pub fn letter(self) -> String {
        match self {
            RootType::A(n) => format!("A{n}"),
            RootType::B(n) => format!("B{n}"),
            RootType::C(n) => format!("C{n}"),
            RootType::D(n) => format!("D{n}"),
            RootType::E6 => "E6".into(),
            RootType::E7 => "E7".into(),
            RootType::E8 => "E8".into(),
            RootType::F4 => "F4".into(),
            RootType::G2 => "G2".into(),
        }
    }
}

/// A diagram automorphism `theta`, as a permutation of the simple roots.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwistSpec {
    perm: Vec<usize>,
}

impl TwistSpec {
    pub fn trivial(rank: usize) -> TwistSpec {
        TwistSpec {
            perm: (0..rank).collect(),
        }
    }

    pub fn from_perm(perm: Vec<usize>) -> TwistSpec {
        let mut seen = vec![false; perm.len()];
        for &i in &perm {
            assert!(i < perm.len() && !seen[i], "not a permutation");
            seen[i] = true;
        }
        TwistSpec { perm }
    }

    /// The nontrivial diagram automorphism of the given order, if any.
    pub fn standard(root: RootType, order: u32) -> Option<TwistSpec> {
        let n = root.rank();
        let perm = match (root, order) {
            (_, 1) => return Some(TwistSpec::trivial(n)),
            (RootType::A(n), 2) if n >= 2 => (0..n).rev().collect(),
            (RootType::D(n), 2) if n >= 3 => {
                let mut p: Vec<usize> = (0..n).collect();
                p.swap(n - 2, n - 1);
                p
            }
            (RootType::D(4), 3) => vec![2, 1, 3, 0],
            (RootType::E6, 2) => vec![5, 1, 4, 3, 2, 0],
            _ => return None,
        };
        Some(TwistSpec::from_perm(perm))
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn order(&self) -> u32 {
        let mut cur: Vec<usize> = self.perm.clone();
        let mut r = 1;
        while cur.iter().enumerate().any(|(i, &j)| i != j) {
            cur = cur.iter().map(|&j| self.perm[j]).collect();
            r += 1;
        }
        r
    }

    /// Parity of the permutation.
    pub fn sgn(&self) -> i8 {
        let n = self.perm.len();
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.perm[i];
                len += 1;
            }
            transpositions += len - 1;
        }
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Permutation matrix sending basis vector `i` to `perm[i]`.
    pub fn matrix(&self, field: &Field) -> FqMatrix {
        let n = self.perm.len();
        let mut m = FqMatrix::zeros(field, n, n);
        for (i, &j) in self.perm.iter().enumerate() {
            m[(j, i)] = field.one();
        }
        m
    }
}

/// A simple type together with its quasi-split twist, e.g. `2A3`, `3D4`, `E8`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraType {
    pub root: RootType,
    pub twist: TwistSpec,
    /// Size of the defining matrix model, for classical types.
    pub matrix_size: Option<usize>,
}

impl AlgebraType {
    pub fn split(root: RootType) -> AlgebraType {
        let matrix_size = match root {
            RootType::A(n) => Some(n + 1),
            RootType::B(n) => Some(2 * n + 1),
            RootType::C(n) | RootType::D(n) => Some(2 * n),
            _ => None,
        };
        AlgebraType {
            root,
            twist: TwistSpec::trivial(root.rank()),
            matrix_size,
        }
    }

    pub fn twisted(root: RootType, order: u32) -> Option<AlgebraType> {
        let mut t = AlgebraType::split(root);
        t.twist = TwistSpec::standard(root, order)?;
        Some(t)
    }

    pub fn is_split(&self) -> bool {
        self.twist.order() == 1
    }

    pub fn rank(&self) -> usize {
        self.root.rank()
    }

    pub fn coxeter(&self) -> u32 {
        self.root.coxeter()
    }

    /// Canonical tag as accepted on the command line.
    pub fn tag(&self) -> String {
        let order = self.twist.order();
        if order > 1 {
            return format!("{order}{}", self.root.letter().to_lowercase());
        }
        match self.root {
            RootType::A(n) => format!("sl{}", n + 1),
            RootType::B(n) => format!("so{}", 2 * n + 1),
            RootType::C(n) => format!("sp{}", 2 * n),
            RootType::D(n) => format!("so{}", 2 * n),
            r => r.letter().to_lowercase(),
        }
    }

    /// `p > 3(h - 1)`.
    pub fn hypothesis_holds(&self, p: u32) -> bool {
        p > 3 * (self.coxeter() - 1)
    }
}

impl fmt::Display for AlgebraType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl FromStr for AlgebraType {
    type Err = LieError;

    /// Tags: `sl<n>`, `sp<2n>`, `so<n>`, `spin<n>`, `a<n>`..`d<n>`, `g2`, `f4`,
    /// `e6`, `e7`, `e8`, `2a<n>`, `2d<n>`, `2e6`, `3d4`.
    fn from_str(s: &str) -> Result<AlgebraType, LieError> {
        let tag = s.trim().to_ascii_lowercase();
        let bad = || LieError::UnsupportedType(s.to_string());
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let (order, body) = match tag.as_bytes().first() {
            Some(b'2') => (2, &tag[1..]),
            Some(b'3') => (3, &tag[1..]),
            _ => (1, &tag[..]),
        };
        let root = if let Some(n) = body.strip_prefix("sl") {
            let n = num(n)?;
            (n >= 2).then(|| RootType::A(n - 1))
        } else if let Some(n) = body.strip_prefix("spin").or_else(|| body.strip_prefix("so")) {
            let n = num(n)?;
            match n {
                _ if n < 3 => None,
                _ if n % 2 == 1 => Some(RootType::B(n / 2)),
                _ => Some(RootType::D(n / 2)),
            }
        } else if let Some(n) = body.strip_prefix("sp") {
            let n = num(n)?;
            (n >= 2 && n % 2 == 0).then_some(RootType::C(n / 2))
        } else {
            match body {
                "e6" => Some(RootType::E6),
                "e7" => Some(RootType::E7),
                "e8" => Some(RootType::E8),
                "f4" => Some(RootType::F4),
                "g2" => Some(RootType::G2),
                _ => {
                    let (letter, n) = body.split_at(1.min(body.len()));
                    let n = num(n)?;
                    match letter {
                        "a" if n >= 1 => Some(RootType::A(n)),
                        "b" if n >= 1 => Some(RootType::B(n)),
                        "c" if n >= 1 => Some(RootType::C(n)),
                        "d" if n >= 2 => Some(RootType::D(n)),
                        _ => None,
                    }
                }
            }
        }
        .ok_or_else(bad)?;
        AlgebraType::twisted(root, order).ok_or_else(bad)
    }
}

/// The torus Gram matrix over `F_q` and `sgn(theta)`.
pub fn torus_gram(ty: &AlgebraType, field: &Field) -> Result<(GramForm, i8), LieError> {
    let m = FqMatrix::from_ints(field, &ty.root.torus_gram_ints());
    let form = GramForm::new(m).map_err(|_| LieError::DegenerateForm {
        tag: ty.tag(),
        q: field.q(),
    })?;
    Ok((form, ty.twist.sgn()))
}

/// `gamma(g) = gamma(t) * sgn(theta)`.
pub fn weil_index_type(ty: &AlgebraType, field: &Field) -> Result<WeilIndex, LieError> {
    let (form, sgn) = torus_gram(ty, field)?;
    Ok(weil_index_closed(&form).with_sign(sgn))
}

/// Second route for twisted types: Galois-twist the split torus form by the
/// permutation matrix of `theta` and take its closed-form Weil index.
pub fn weil_index_type_by_descent(ty: &AlgebraType, field: &Field) -> Result<WeilIndex, LieError> {
    let (form, _) = torus_gram(ty, field)?;
    let sigma = ty.twist.matrix(field);
    let twisted = galois_twist_form(&form, &sigma, ty.twist.order()).map_err(LieError::Form)?;
    Ok(weil_index_closed(&twisted))
}
