//! Adjoint orbits of `G(F_q)` on a matrix model, by breadth-first search over packed codes.
//!
//! An element with coordinates `x_0, .., x_{d-1}` in the model basis is packed as
//! `sum x_i q^i` with each `x_i` the field code of the coordinate.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::{Field, FieldElement};
use crate::liealg::LieAlgebraModel;
use crate::matrix::FqMatrix;

/// Default bound on `q^dim`.
pub const DEFAULT_STATE_CAP: u64 = 1 << 31;

/// Bumped whenever enumeration order or the cache layout changes.
pub const CACHE_VERSION: u8 = 1;

const MAGIC: &[u8; 4] = b"NFOT";
const UNVISITED: u32 = u32::MAX;
const PAR_FRONTIER: usize = 1 << 12;

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error("{states} states exceed the enumeration cap {cap}")]
    TooLarge { states: u128, cap: u64 },
    #[error("orbit cache I/O: {0}")]
    Io(#[from] io::Error),
    #[error("orbit cache rejected: {0}")]
    BadCache(String),
}

/// Partition of `g(F_q)` into adjoint orbits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitTable {
    tag: String,
    p: u32,
    k: u32,
    dim: usize,
    orbit_of: Vec<u32>,
    reps: Vec<u64>,
    sizes: Vec<u64>,
    nilpotent: Vec<bool>,
    neg_perm: Vec<u32>,
    /// Orbits whose representative is matrix-nilpotent but not ad-nilpotent, or conversely.
    nilpotence_disagreements: Vec<u32>,
}

pub fn encode(field: &Field, coords: &[FieldElement]) -> u64 {
    let q = field.q() as u64;
    coords.iter().rev().fold(0u64, |acc, x| acc * q + x.code() as u64)
}

pub fn decode(field: &Field, mut code: u64, dim: usize) -> Vec<FieldElement> {
    let q = field.q() as u64;
    (0..dim)
        .map(|_| {
            let d = (code % q) as u32;
            code /= q;
            field.element(d).expect("digit below q")
        })
        .collect()
}

fn state_count(field: &Field, dim: usize, cap: u64) -> Result<u64, OrbitError> {
    let states = (field.q() as u128).pow(dim as u32);
    if states > cap as u128 {
        return Err(OrbitError::TooLarge { states, cap });
    }
    Ok(states as u64)
}

/// `X^n = 0` for the defining `n x n` matrix.
pub fn is_nilpotent(model: &LieAlgebraModel, coords: &[FieldElement]) -> bool {
    model.is_nilpotent_matrix(&model.to_matrix(coords))
}

struct Stepper<'a> {
    field: &'a Field,
    gens: Vec<Vec<(usize, Vec<(usize, FieldElement)>)>>,
    place: Vec<u64>,
    dim: usize,
}

impl Stepper<'_> {
    fn new(model: &LieAlgebraModel) -> Stepper<'_> {
        let dim = model.dim();
        let q = model.field().q() as u64;
        let gens = model
            .ad_sparse()
            .iter()
            .map(|s| s.rows.iter().map(|r| (r.row, r.entries.clone())).collect())
            .collect();
        Stepper {
            field: model.field(),
            gens,
            place: (0..dim).map(|i| q.pow(i as u32)).collect(),
            dim,
        }
    }

    fn neighbours(&self, code: u64, out: &mut Vec<u64>) {
        let f = self.field;
        let x = decode(f, code, self.dim);
        for g in &self.gens {
            let mut c = code;
            for (row, entries) in g {
                let mut acc = f.zero();
                for &(j, coef) in entries {
                    acc = f.add(acc, f.mul(coef, x[j]));
                }
                let old = x[*row].code() as u64;
                c = c - old * self.place[*row] + acc.code() as u64 * self.place[*row];
            }
            out.push(c);
        }
    }
}

/// Enumerates orbits under the default cap.
pub fn enumerate_orbits(model: &LieAlgebraModel) -> Result<OrbitTable, OrbitError> {
    enumerate_orbits_capped(model, DEFAULT_STATE_CAP)
}

pub fn enumerate_orbits_capped(model: &LieAlgebraModel, cap: u64) -> Result<OrbitTable, OrbitError> {
    let field = model.field();
    let dim = model.dim();
    let total = state_count(field, dim, cap)?;
    let stepper = Stepper::new(model);
    let mut orbit_of = vec![UNVISITED; total as usize];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    let mut buf = Vec::new();
    for seed in 0..total {
        if orbit_of[seed as usize] != UNVISITED {
            continue;
        }
        let id = reps.len() as u32;
        orbit_of[seed as usize] = id;
        let mut size = 1u64;
        let mut frontier = vec![seed];
        while !frontier.is_empty() {
            let candidates: Vec<u64> = if frontier.len() >= PAR_FRONTIER {
                let seen = &orbit_of;
                frontier
                    .par_chunks(1024)
                    .flat_map_iter(|chunk| {
                        let mut out = Vec::with_capacity(chunk.len() * stepper.gens.len());
                        for &c in chunk {
                            stepper.neighbours(c, &mut out);
                        }
                        out.retain(|&n| seen[n as usize] == UNVISITED);
                        out
                    })
                    .collect()
            } else {
                buf.clear();
                for &c in &frontier {
                    stepper.neighbours(c, &mut buf);
                }
                std::mem::take(&mut buf)
            };
            let mut next = Vec::new();
            for n in candidates {
                let slot = &mut orbit_of[n as usize];
                if *slot == UNVISITED {
                    *slot = id;
                    size += 1;
                    next.push(n);
                }
            }
            frontier = next;
        }
        reps.push(seed);
        sizes.push(size);
    }
    let mut table = OrbitTable {
        tag: model.tag(),
        p: field.p(),
        k: field.k(),
        dim,
        orbit_of,
        reps,
        sizes,
        nilpotent: Vec::new(),
        neg_perm: Vec::new(),
        nilpotence_disagreements: Vec::new(),
    };
    table.classify(model);
    Ok(table)
}

impl OrbitTable {
    fn classify(&mut self, model: &LieAlgebraModel) {
        let f = model.field();
        let results: Vec<(bool, bool)> = self
            .reps
            .par_iter()
            .map(|&r| {
                let x = decode(f, r, self.dim);
                (is_nilpotent(model, &x), model.is_ad_nilpotent(&x))
            })
            .collect();
        self.nilpotent = results.iter().map(|r| r.0).collect();
        self.nilpotence_disagreements = results
            .iter()
            .enumerate()
            .filter(|(_, r)| r.0 != r.1)
            .map(|(i, _)| i as u32)
            .collect();
        self.neg_perm = self
            .reps
            .iter()
            .map(|&r| {
                let neg: Vec<FieldElement> = decode(f, r, self.dim).into_iter().map(|x| f.neg(x)).collect();
                self.orbit_of[encode(f, &neg) as usize]
            })
            .collect();
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn orbit_of(&self, code: u64) -> u32 {
        self.orbit_of[code as usize]
    }

    pub fn orbit_ids(&self) -> &[u32] {
        &self.orbit_of
    }

    pub fn reps(&self) -> &[u64] {
        &self.reps
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn nilpotent(&self) -> &[bool] {
        &self.nilpotent
    }

    pub fn nilpotent_ids(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.nilpotent[i]).collect()
    }

    pub fn nilpotence_disagreements(&self) -> &[u32] {
        &self.nilpotence_disagreements
    }

    /// Orbit of `-X` for `X` in each orbit.
    pub fn negation_perm(&self) -> &[u32] {
        &self.neg_perm
    }

    /// Checks the structural invariants of the partition against the model.
    pub fn check(&self, model: &LieAlgebraModel, seed: u64, samples: usize) -> OrbitChecks {
        let f = model.field();
        let q = f.q() as u64;
        let total: u64 = self.sizes.iter().sum();
        let partition = total == q.pow(self.dim as u32)
            && self.orbit_of.len() as u64 == total
            && self.orbit_of.iter().all(|&o| (o as usize) < self.len());

        let mut first_seen = vec![false; self.len()];
        let mut reps_minimal = true;
        let mut counted = vec![0u64; self.len()];
        for (code, &o) in self.orbit_of.iter().enumerate() {
            let o = o as usize;
            if !first_seen[o] {
                first_seen[o] = true;
                reps_minimal &= self.reps[o] == code as u64;
            }
            counted[o] += 1;
        }
        let sizes_match = counted == self.sizes;

        let order = model.group_order();
        let sizes_divide_group_order = self.sizes.iter().all(|&s| (&order % BigUint::from(s)).is_zero());

        // Steinberg: |N| = q^(dim - rank)
        let rank = model.algebra_type().rank();
        let cone: u64 = self.nilpotent_ids().iter().map(|&i| self.sizes[i]).sum();
        let nilpotent_cone_size = cone == q.pow((self.dim - rank) as u32);

        let neg_involution = self
            .neg_perm
            .iter()
            .enumerate()
            .all(|(i, &j)| self.neg_perm[j as usize] as usize == i)
            && self.neg_perm.first() == Some(&0);

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens: Vec<&FqMatrix> = model.group_generators().collect();
        let mut conjugation_spot_check = true;
        let mut nilpotent_closed = true;
        for _ in 0..samples {
            let code = rng.gen_range(0..total);
            let x = model.to_matrix(&decode(f, code, self.dim));
            let mut g = FqMatrix::identity(f, model.matrix_size());
            for _ in 0..rng.gen_range(1..=6) {
                g = g.mul(gens[rng.gen_range(0..gens.len())]);
            }
            let g_inv = g.inverse().expect("group element");
            let y = g.mul(&x).mul(&g_inv);
            let y_code = encode(f, &model.to_coords(&y));
            let (ox, oy) = (self.orbit_of(code), self.orbit_of(y_code));
            conjugation_spot_check &= ox == oy;
            nilpotent_closed &= model.is_nilpotent_matrix(&y) == self.nilpotent[ox as usize];
        }

        OrbitChecks {
            partition: partition && sizes_match,
            reps_minimal,
            sizes_divide_group_order,
            nilpotent_cone_size,
            neg_involution,
            conjugation_spot_check,
            nilpotent_closed,
            nilpotence_disagreements: self.nilpotence_disagreements.len(),
            pass: partition
                && sizes_match
                && reps_minimal
                && sizes_divide_group_order
                && nilpotent_cone_size
                && neg_involution
                && conjugation_spot_check
                && nilpotent_closed,
        }
    }

    /// Serialises the table in the `NFOT` layout.
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&[CACHE_VERSION])?;
        w.write_all(&self.p.to_le_bytes())?;
        w.write_all(&self.k.to_le_bytes())?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        let tag = self.tag.as_bytes();
        w.write_all(&(tag.len() as u16).to_le_bytes())?;
        w.write_all(tag)?;
        let mut bytes = Vec::with_capacity(self.orbit_of.len() * 4);
        for &o in &self.orbit_of {
            bytes.extend_from_slice(&o.to_le_bytes());
        }
        w.write_all(&bytes)?;
        w.write_all(&(self.len() as u32).to_le_bytes())?;
        for i in 0..self.len() {
            w.write_all(&self.reps[i].to_le_bytes())?;
            w.write_all(&self.sizes[i].to_le_bytes())?;
            w.write_all(&[self.nilpotent[i] as u8])?;
        }
        w.flush()
    }

    /// Reads an `NFOT` table and validates it against `model`.
    pub fn read_from<R: Read>(mut r: R, model: &LieAlgebraModel) -> Result<OrbitTable, OrbitError> {
        let bad = |m: &str| OrbitError::BadCache(m.to_string());
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        let mut cur = Cursor { buf: &buf, pos: 0 };
        if cur.take(4).ok_or_else(|| bad("truncated"))? != MAGIC {
            return Err(bad("magic"));
        }
        if cur.u8().ok_or_else(|| bad("truncated"))? != CACHE_VERSION {
            return Err(bad("version"));
        }
        let f = model.field();
        let p = cur.u32().ok_or_else(|| bad("truncated"))?;
        let k = cur.u32().ok_or_else(|| bad("truncated"))?;
        let dim = cur.u32().ok_or_else(|| bad("truncated"))? as usize;
        if p != f.p() || k != f.k() || dim != model.dim() {
            return Err(bad("field or dimension mismatch"));
        }
        let tag_len = cur.u16().ok_or_else(|| bad("truncated"))? as usize;
        let tag =
            String::from_utf8(cur.take(tag_len).ok_or_else(|| bad("truncated"))?.to_vec()).map_err(|_| bad("tag"))?;
        if tag != model.tag() {
            return Err(bad("type mismatch"));
        }
        let total = state_count(f, dim, u64::MAX)? as usize;
        let raw = cur.take(total * 4).ok_or_else(|| bad("truncated"))?;
        let orbit_of: Vec<u32> = raw
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let n = cur.u32().ok_or_else(|| bad("truncated"))? as usize;
        let mut reps = Vec::with_capacity(n);
        let mut sizes = Vec::with_capacity(n);
        let mut nilpotent = Vec::with_capacity(n);
        for _ in 0..n {
            reps.push(cur.u64().ok_or_else(|| bad("truncated"))?);
            sizes.push(cur.u64().ok_or_else(|| bad("truncated"))?);
            nilpotent.push(cur.u8().ok_or_else(|| bad("truncated"))? != 0);
        }
        if cur.pos != buf.len() {
            return Err(bad("trailing bytes"));
        }
        if orbit_of.iter().any(|&o| o as usize >= n) || reps.iter().any(|&c| c as usize >= total) {
            return Err(bad("orbit ids out of range"));
        }
        let mut table = OrbitTable {
            tag,
            p,
            k,
            dim,
            orbit_of,
            reps,
            sizes,
            nilpotent: Vec::new(),
            neg_perm: Vec::new(),
            nilpotence_disagreements: Vec::new(),
        };
        table.classify(model);
        if table.nilpotent != nilpotent {
            return Err(bad("nilpotent flags disagree with the model"));
        }
        Ok(table)
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let s = self.buf.get(self.pos..self.pos.checked_add(n)?)?;
        self.pos += n;
        Some(s)
    }
    fn u8(&mut self) -> Option<u8> {
        self.take(1).map(|b| b[0])
    }
    fn u16(&mut self) -> Option<u16> {
        self.take(2).map(|b| u16::from_le_bytes(b.try_into().unwrap()))
    }
    fn u32(&mut self) -> Option<u32> {
        self.take(4).map(|b| u32::from_le_bytes(b.try_into().unwrap()))
    }
    fn u64(&mut self) -> Option<u64> {
        self.take(8).map(|b| u64::from_le_bytes(b.try_into().unwrap()))
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct OrbitChecks {
    pub partition: bool,
    pub reps_minimal: bool,
    pub sizes_divide_group_order: bool,
    pub nilpotent_cone_size: bool,
    pub neg_involution: bool,
    pub conjugation_spot_check: bool,
    pub nilpotent_closed: bool,
    pub nilpotence_disagreements: usize,
    pub pass: bool,
}

/// Whether a table came from disk or was freshly enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CacheStatus {
    Hit,
    Miss,
    Disabled,
}

/// Cache file name: keyed by type, field (including its modulus) and format version.
pub fn cache_path(dir: &Path, model: &LieAlgebraModel) -> PathBuf {
    let f = model.field();
    let modulus = match f.modulus() {
        None => "x".to_string(),
        Some(m) => m.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("."),
    };
    dir.join(format!(
        "{}_p{}_k{}_m{}_v{}.nfot",
        model.tag(),
        f.p(),
        f.k(),
        modulus,
        CACHE_VERSION
    ))
}

/// Loads the table from `dir` when a valid cache exists, else enumerates and writes it.
pub fn load_or_enumerate(
    model: &LieAlgebraModel,
    dir: Option<&Path>,
    cap: u64,
) -> Result<(OrbitTable, CacheStatus), OrbitError> {
    let Some(dir) = dir else {
        return Ok((enumerate_orbits_capped(model, cap)?, CacheStatus::Disabled));
    };
    let path = cache_path(dir, model);
    if let Ok(file) = fs::File::open(&path) {
        if let Ok(t) = OrbitTable::read_from(io::BufReader::new(file), model) {
            return Ok((t, CacheStatus::Hit));
        }
    }
    let table = enumerate_orbits_capped(model, cap)?;
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tmp");
    table.write_to(io::BufWriter::new(fs::File::create(&tmp)?))?;
    fs::rename(&tmp, &path)?;
    Ok((table, CacheStatus::Miss))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::build_algebra;

    fn model(tag: &str, q: u64) -> LieAlgebraModel {
        let f = Field::from_order(q).unwrap();
        build_algebra(&tag.parse().unwrap(), &f, f.one()).unwrap()
    }

    #[test]
    fn sl2_f5() {
        let m = model("sl2", 5);
        let t = enumerate_orbits(&m).unwrap();
        assert_eq!(t.sizes().iter().sum::<u64>(), 125);
        assert_eq!(t.orbit_of(0), 0);
        assert_eq!(t.sizes()[0], 1);
        let nil = t.nilpotent_ids();
        assert_eq!(nil.len(), 3);
        assert_eq!(nil.iter().map(|&i| t.sizes()[i]).sum::<u64>(), 25);
        // -1 is a square mod 5: -e ~ e
        for &i in &nil {
            assert_eq!(t.negation_perm()[i] as usize, i);
        }
        let checks = t.check(&m, 1, 200);
        assert!(checks.pass, "{checks:?}");
    }

    #[test]
    fn sl2_f7_regular_nilpotents_swap() {
        let m = model("sl2", 7);
        let t = enumerate_orbits(&m).unwrap();
        assert_eq!(t.sizes().iter().sum::<u64>(), 343);
        let nil = t.nilpotent_ids();
        assert_eq!(nil.len(), 3);
        let (a, b) = (nil[1], nil[2]);
        assert_eq!(t.negation_perm()[a] as usize, b);
        assert_eq!(t.negation_perm()[b] as usize, a);
        assert!(t.check(&m, 2, 200).pass);
    }

    #[test]
    fn regular_nilpotent_split_by_square_class() {
        // e_c = c E_12 lies in the orbit of E_12 iff c is a square
        let m = model("sl2", 7);
        let f = m.field().clone();
        let t = enumerate_orbits(&m).unwrap();
        let e1 = t.orbit_of(encode(&f, &[f.one(), f.zero(), f.zero()]));
        for c in 1..7 {
            let code = encode(&f, &[f.from_i64(c), f.zero(), f.zero()]);
            assert_eq!(t.orbit_of(code) == e1, f.legendre(f.from_i64(c)) == 1, "c = {c}");
        }
    }

    #[test]
    fn nilpotence_examples() {
        let m = model("sl2", 5);
        let f = m.field().clone();
        assert!(is_nilpotent(&m, &[f.zero(), f.zero(), f.zero()]));
        assert!(is_nilpotent(&m, &[f.one(), f.zero(), f.zero()]));
        assert!(!is_nilpotent(&m, &[f.zero(), f.zero(), f.one()]));
    }

    #[test]
    fn other_models_pass_checks() {
        for (tag, q) in [("sl2", 9), ("sl2", 25), ("so3", 5), ("sp4", 3)] {
            let m = model(tag, q);
            let t = enumerate_orbits(&m).unwrap();
            let c = t.check(&m, 3, 300);
            assert!(c.pass, "{tag} over F_{q}: {c:?}");
        }
    }

    #[test]
    fn cap_is_enforced() {
        let m = model("sl2", 5);
        assert!(matches!(
            enumerate_orbits_capped(&m, 100),
            Err(OrbitError::TooLarge { .. })
        ));
    }

    #[test]
    fn cache_round_trip() {
        let m = model("sl2", 7);
        let t = enumerate_orbits(&m).unwrap();
        let mut bytes = Vec::new();
        t.write_to(&mut bytes).unwrap();
        assert_eq!(&bytes[..4], b"NFOT");
        let back = OrbitTable::read_from(&bytes[..], &m).unwrap();
        assert_eq!(back, t);

        let mut corrupt = bytes.clone();
        corrupt[4] = CACHE_VERSION + 1;
        assert!(OrbitTable::read_from(&corrupt[..], &m).is_err());
        assert!(OrbitTable::read_from(&bytes[..bytes.len() - 1], &m).is_err());
        let other = model("sl2", 5);
        assert!(OrbitTable::read_from(&bytes[..], &other).is_err());
    }

    #[test]
    fn cache_dir_hit_and_miss() {
        let dir = tempfile::tempdir().unwrap();
        let m = model("sl2", 5);
        let (a, s1) = load_or_enumerate(&m, Some(dir.path()), DEFAULT_STATE_CAP).unwrap();
        let (b, s2) = load_or_enumerate(&m, Some(dir.path()), DEFAULT_STATE_CAP).unwrap();
        assert_eq!((s1, s2), (CacheStatus::Miss, CacheStatus::Hit));
        assert_eq!(a, b);
        assert!(cache_path(dir.path(), &m).exists());
    }
}
