//! Seeded randomized law suites for Weil indices. Every check compares two
//! brute-force sums (or a brute sum and an exact identity); nothing is approximate.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{Field, FieldElement, FieldError};
use crate::fourier::ft_matrix;
use crate::liealg::{build_algebra, torus_gram, weil_index_type, AlgebraType};
use crate::orbits::enumerate_orbits;
use crate::qform::{
    direct_sum_form, galois_twist_form, gauss_sum_brute, gauss_sum_closed, matrix_order, reflection,
    restrict_scalars_form, scale_form, weil_index_brute, weil_index_closed, FormError, GramForm,
};
use crate::weil::WeilIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Twist,
    Scale,
    Sum,
    Restrict,
    EvenRank,
    Involution,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Twist,
        Suite::Scale,
        Suite::Sum,
        Suite::Restrict,
        Suite::EvenRank,
        Suite::Involution,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Twist => "twist",
            Suite::Scale => "scale",
            Suite::Sum => "sum",
            Suite::Restrict => "restrict",
            Suite::EvenRank => "even-rank",
            Suite::Involution => "involution",
        }
    }
}

impl FromStr for Suite {
    type Err = PropsError;

    fn from_str(s: &str) -> Result<Suite, PropsError> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| PropsError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum PropsError {
    #[error("unknown suite `{0}`; expected one of twist, scale, sum, restrict, even-rank, involution")]
    UnknownSuite(String),
    #[error("suite {suite} needs {need}")]
    Unsupported { suite: &'static str, need: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Form(#[from] FormError),
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Case {
    pub index: usize,
    pub description: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PropsReport {
    pub suite: &'static str,
    pub seed: u64,
    pub q: u32,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    /// Twist suite: how many sampled `sigma` had determinant `+1` and `-1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub det_counts: Option<[usize; 2]>,
    pub details: Vec<Case>,
    pub pass: bool,
}

fn report(suite: Suite, seed: u64, q: u32, details: Vec<Case>, det_counts: Option<[usize; 2]>) -> PropsReport {
    let passed = details.iter().filter(|c| c.pass).count();
    PropsReport {
        suite: suite.name(),
        seed,
        q,
        cases: details.len(),
        passed,
        failed: details.len() - passed,
        det_counts,
        pass: passed == details.len() && !details.is_empty(),
        details,
    }
}

fn nonzero(f: &Field, rng: &mut ChaCha8Rng) -> FieldElement {
    f.element(rng.gen_range(1..f.q())).unwrap()
}

fn random_vector(f: &Field, d: usize, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    (0..d).map(|_| f.element(rng.gen_range(0..f.q())).unwrap()).collect()
}

/// Dimension so that `q^d` stays small for brute sums.
fn small_dim(f: &Field, rng: &mut ChaCha8Rng, max: usize) -> usize {
    let mut top = 1;
    while top < max && (f.q() as u64).pow(top as u32 + 1) <= 1 << 16 {
        top += 1;
    }
    rng.gen_range(1..=top)
}

pub const TWIST_CASES: usize = 24;
pub const SCALE_CASES: usize = 50;
pub const SUM_CASES: usize = 20;
pub const RESTRICT_CASES: usize = 10;
pub const INVOLUTION_CASES: usize = 10;
/// `q^r` bound for the splitting field of a twist.
pub const TWIST_FIELD_CAP: u64 = 1 << 20;

pub fn run_props(suite: Suite, seed: u64, q: u64) -> Result<PropsReport, PropsError> {
    let f = Field::from_order(q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let qq = f.q();
    match suite {
        Suite::Twist => {
            let mut details = Vec::new();
            let mut dets = [0usize; 2];
            let mut limit = 1;
            while (qq as u64).pow(limit + 1) <= TWIST_FIELD_CAP {
                limit += 1;
            }
            while details.len() < TWIST_CASES {
                let d = rng.gen_range(1..=3);
                let form = GramForm::random(&f, d, &mut rng);
                // alternate parity of the number of reflections so both det signs occur
                let reflections = 1 + (details.len() % 2) + 2 * rng.gen_range(0..=1);
                let mut sigma = crate::matrix::FqMatrix::identity(&f, d);
                let mut built = 0;
                while built < reflections {
                    if let Some(s) = reflection(&form, &random_vector(&f, d, &mut rng)) {
                        sigma = sigma.mul(&s);
                        built += 1;
                    }
                }
                let Some(r) = matrix_order(&sigma, limit) else { continue };
                let det_sign: i8 = if sigma.det() == f.one() { 1 } else { -1 };
                let twisted = galois_twist_form(&form, &sigma, r)?;
                let lhs = weil_index_brute(&twisted)?;
                let rhs = weil_index_brute(&form)?.with_sign(det_sign);
                dets[if det_sign == 1 { 0 } else { 1 }] += 1;
                details.push(Case {
                    index: details.len(),
                    description: format!("d={d} order={r} det={det_sign:+} gamma={lhs}"),
                    pass: lhs == rhs,
                });
            }
            Ok(report(suite, seed, qq, details, Some(dets)))
        }
        Suite::Scale => {
            let details = (0..SCALE_CASES)
                .map(|i| {
                    let d = small_dim(&f, &mut rng, 4);
                    let form = GramForm::random(&f, d, &mut rng);
                    let a = nonzero(&f, &mut rng);
                    let lhs = weil_index_brute(&scale_form(&form, a)?)?;
                    let rhs = weil_index_brute(&form)?.mul(scaling_factor(&f, a, d));
                    Ok(Case {
                        index: i,
                        description: format!("d={d} a={}", f.format(a)),
                        pass: lhs == rhs,
                    })
                })
                .collect::<Result<Vec<_>, PropsError>>()?;
            Ok(report(suite, seed, qq, details, None))
        }
        Suite::Sum => {
            let details = (0..SUM_CASES)
                .map(|i| {
                    let d1 = small_dim(&f, &mut rng, 2);
                    let d2 = small_dim(&f, &mut rng, 2);
                    let a = GramForm::random(&f, d1, &mut rng);
                    let b = GramForm::random(&f, d2, &mut rng);
                    let lhs = weil_index_brute(&direct_sum_form(&a, &b)?)?;
                    let rhs = weil_index_brute(&a)?.mul(weil_index_brute(&b)?);
                    Ok(Case {
                        index: i,
                        description: format!("d={d1}+{d2}"),
                        pass: lhs == rhs,
                    })
                })
                .collect::<Result<Vec<_>, PropsError>>()?;
            Ok(report(suite, seed, qq, details, None))
        }
        Suite::Restrict => {
            let ext = Field::new(f.p() as u64, f.k() * 2)?;
            if (ext.q() as u64).pow(2) > 1 << 22 {
                return Err(PropsError::Unsupported {
                    suite: "restrict",
                    need: "q^4 <= 2^22".into(),
                });
            }
            let details = (0..RESTRICT_CASES)
                .map(|i| {
                    let d = rng.gen_range(1..=2);
                    let form = GramForm::random(&ext, d, &mut rng);
                    let big = weil_index_brute(&form)?;
                    let small = weil_index_brute(&restrict_scalars_form(&form, &f)?)?;
                    // different fields: compare the values as powers of i
                    Ok(Case {
                        index: i,
                        description: format!("d={d} over F_{} -> F_{}", ext.q(), qq),
                        pass: big.power_of_i() == small.power_of_i(),
                    })
                })
                .collect::<Result<Vec<_>, PropsError>>()?;
            Ok(report(suite, seed, qq, details, None))
        }
        Suite::EvenRank => {
            let ty: AlgebraType = "sl3".parse().unwrap();
            let (torus, _) = torus_gram(&ty, &f).map_err(|_| PropsError::Unsupported {
                suite: "even-rank",
                need: "p != 3".into(),
            })?;
            let base = weil_index_type(&ty, &f).expect("nondegenerate");
            let base_model = build_algebra(&ty, &f, f.one()).expect("nondegenerate");
            let full = weil_index_closed(&base_model.form());
            let mut details = Vec::new();
            for a in f.elements().filter(|a| !a.is_zero()) {
                let model = build_algebra(&ty, &f, a).expect("nondegenerate");
                let brute_torus = weil_index_brute(&model.torus_form())?;
                let scaled = weil_index_brute(&scale_form(&torus, a)?)?;
                let pass = brute_torus == base && scaled == base && weil_index_closed(&model.form()) == full;
                details.push(Case {
                    index: details.len(),
                    description: format!("a={}", f.format(a)),
                    pass,
                });
            }
            Ok(report(suite, seed, qq, details, None))
        }
        Suite::Involution => {
            let mut details = Vec::new();
            for i in 0..INVOLUTION_CASES {
                let d = small_dim(&f, &mut rng, 4);
                let form = GramForm::random(&f, d, &mut rng);
                let g = gauss_sum_brute(&form)?;
                let norm = &g * &g.conj();
                let q_d = crate::cyclo::CycNum::from_integer(f.p(), (qq as i64).pow(d as u32));
                details.push(Case {
                    index: i,
                    description: format!("|G|^2 = q^{d}, G = closed form"),
                    pass: norm == q_d && g == gauss_sum_closed(&form),
                });
            }
            if (qq as u64).pow(3) <= 1 << 16 {
                let model = build_algebra(&"sl2".parse().unwrap(), &f, f.one()).expect("sl2 form");
                let table = enumerate_orbits(&model).expect("small");
                let m = ft_matrix(&model, &table).expect("small");
                details.push(Case {
                    index: details.len(),
                    description: "sl(2): M^2 = q^3 P_neg".into(),
                    pass: m.involution_defects(table.negation_perm()) == 0,
                });
            }
            Ok(report(suite, seed, qq, details, None))
        }
    }
}

/// `(a/q)^d`, the factor by which scaling a `d`-dimensional form by `a` changes its index.
pub fn scaling_factor(f: &Field, a: FieldElement, d: usize) -> WeilIndex {
    let chi = if d.is_multiple_of(2) { 1 } else { f.legendre(a) };
    WeilIndex::from_sign(chi, crate::weil::EpsClass::of(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_at_small_q() {
        for suite in Suite::ALL {
            for q in [5u64, 7] {
                let r = run_props(suite, 1, q).unwrap();
                assert!(
                    r.pass,
                    "{} at {q}: {:?}",
                    suite.name(),
                    r.details.iter().filter(|c| !c.pass).collect::<Vec<_>>()
                );
            }
        }
    }

    #[test]
    fn twist_exercises_both_signs() {
        for q in [5u64, 7] {
            let r = run_props(Suite::Twist, 1, q).unwrap();
            let [plus, minus] = r.det_counts.unwrap();
            assert!(plus > 0 && minus > 0);
            assert!(r.cases >= 20);
        }
    }

    #[test]
    fn deterministic_for_a_seed() {
        let a = run_props(Suite::Scale, 9, 5).unwrap();
        let b = run_props(Suite::Scale, 9, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.cases, 50);
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!("bogus".parse::<Suite>(), Err(PropsError::UnknownSuite(_))));
        assert_eq!("even-rank".parse::<Suite>().unwrap(), Suite::EvenRank);
    }

    #[test]
    fn scaling_factor_matches_suite_rule() {
        let f = Field::new(5, 1).unwrap();
        assert_eq!(scaling_factor(&f, f.from_i64(2), 1).sign(), -1);
        assert_eq!(scaling_factor(&f, f.from_i64(2), 2).sign(), 1);
    }
}
