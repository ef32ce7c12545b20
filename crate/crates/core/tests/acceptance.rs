//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use clap::Parser;
use nilfourier::cli::{execute, Cli};
use nilfourier::cyclo::{psi, CycNum};
use nilfourier::field::Field;
use nilfourier::fourier::{fc_basis, ft_matrix, run_verify, Caps, FTMatrix, InvariantFunction};
use nilfourier::liealg::{build_algebra, AlgebraType, LieAlgebraModel};
use nilfourier::orbits::{load_or_enumerate, OrbitTable, DEFAULT_STATE_CAP};
use nilfourier::props::{run_props, Suite};
use nilfourier::qform::{gauss_sum_brute_capped, gauss_sum_closed, weil_index_brute, weil_index_of_cyc, GramForm};
use nilfourier::table::run_table;
use nilfourier::weil::{EpsClass, WeilIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Exact comparisons everywhere: the only tolerance is on wall-clock time.
const GAUSS_BUDGET: Duration = Duration::from_secs(30);
const TABLE_BUDGET: Duration = Duration::from_secs(5);
const TORUS_BUDGET: Duration = Duration::from_secs(180);
const SL2_BUDGET: Duration = Duration::from_secs(60);
const SL3_BUDGET: Duration = Duration::from_secs(600);
const INVOLUTION_BUDGET: Duration = Duration::from_secs(60);
const LAWS_BUDGET: Duration = Duration::from_secs(60);
const PROBE_BUDGET: Duration = Duration::from_secs(300);
const DETERMINISM_BUDGET: Duration = Duration::from_secs(300);

const GAUSS_QS: [u64; 5] = [5, 7, 11, 13, 25];
const GAUSS_DIMS: std::ops::RangeInclusive<usize> = 1..=6;
const GAUSS_FORMS: usize = 50;
const TABLE_QS: [u64; 4] = [5, 7, 11, 13];
const SL2_QS: [u64; 5] = [5, 7, 11, 13, 25];
const SL3_EIGENVALUE: i64 = -2401;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// Models, orbit tables, and transforms shared by the theorem criteria.
struct Computed {
    model: LieAlgebraModel,
    table: OrbitTable,
    m: FTMatrix,
    basis: Vec<InvariantFunction>,
    g: CycNum,
}

fn compute(tag: &str, q: u64, cache: &Path) -> Computed {
    let f = Field::from_order(q).unwrap();
    let ty: AlgebraType = tag.parse().unwrap();
    let model = build_algebra(&ty, &f, f.one()).unwrap();
    let (table, _) = load_or_enumerate(&model, Some(cache), DEFAULT_STATE_CAP).unwrap();
    let m = ft_matrix(&model, &table).unwrap();
    let basis = fc_basis(&m, &table);
    let g = gauss_sum_brute_capped(&model.form(), u64::MAX).unwrap();
    Computed {
        model,
        table,
        m,
        basis,
        g,
    }
}

/// `sum_x psi(x^2)` by direct summation.
fn g1(f: &Field) -> CycNum {
    f.elements()
        .fold(CycNum::zero(f.p()), |acc, x| &acc + &psi(f, f.mul(x, x)))
}

/// Fourth root of unity nearest to `re + im i`, as a power of `i`.
fn nearest_power_of_i(complex: &str) -> u8 {
    let split = complex[1..]
        .char_indices()
        .find(|&(i, c)| (c == '+' || c == '-') && !complex[1..][..i].ends_with('e'))
        .map(|(i, _)| i + 1)
        .unwrap();
    let re: f64 = complex[..split].parse().unwrap();
    let im: f64 = complex[split..complex.len() - 1].parse().unwrap();
    match (re.round() as i64, im.round() as i64) {
        (1, 0) => 0,
        (0, 1) => 1,
        (-1, 0) => 2,
        (0, -1) => 3,
        other => panic!("not a fourth root of unity: {other:?}"),
    }
}

/// The table value for a row label at prime `q`, as a power of `i`.
fn table_oracle(label: &str, q: u64) -> u8 {
    // eps = sqrt((-1/q)): 1 for q = 1 mod 4, i for q = 3 mod 4
    let eps = |n: i64| -> i64 {
        if q % 4 == 1 {
            0
        } else {
            n
        }
    };
    let q3 = if q % 3 == 1 { 0 } else { 2 };
    let arg = |s: &str| -> i64 { s.trim_end_matches(')').parse().unwrap() };
    let power = if let Some(n) = label.strip_prefix("sl(") {
        eps(arg(n) - 1)
    } else if let Some(n) = label.strip_prefix("sp(") {
        eps(arg(n) / 2)
    } else if let Some(n) = label.strip_prefix("spin(") {
        eps(arg(n) / 2)
    } else if let Some(n) = label.strip_prefix("su(") {
        let n = arg(n);
        eps(n - 1) + 2 * ((n - 1) / 2)
    } else if let Some(n) = label.strip_prefix("2spin(") {
        eps(arg(n) / 2) + 2
    } else {
        match label {
            "G2" | "E6" | "2E6" => q3,
            "E7" => eps(-1),
            "E8" | "F4" | "3D4" => 0,
            _ => panic!("unknown row {label}"),
        }
    };
    power.rem_euclid(4) as u8
}

fn criterion_gauss() -> Verdict {
    let mut failures = Vec::new();
    let mut forms = 0;
    for q in GAUSS_QS {
        let f = Field::from_order(q).unwrap();
        for d in GAUSS_DIMS {
            let mut rng = ChaCha8Rng::seed_from_u64(q * 100 + d as u64);
            for i in 0..GAUSS_FORMS {
                let form = GramForm::random(&f, d, &mut rng);
                forms += 1;
                if gauss_sum_brute_capped(&form, u64::MAX).unwrap() != gauss_sum_closed(&form) {
                    failures.push(format!("q={q} d={d} #{i}"));
                }
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!("{forms} forms, {} failures {:?}", failures.len(), failures),
    )
}

fn criterion_table() -> Verdict {
    let r = run_table(&TABLE_QS).unwrap();
    let mut wrong = Vec::new();
    let mut degenerate = Vec::new();
    for row in &r.rows {
        let want = table_oracle(&row.label, row.q as u64);
        match &row.computed {
            None => degenerate.push(format!("{}@{}", row.label, row.q)),
            Some(c) => {
                let descent_ok = row.by_descent.as_ref().is_none_or(|d| d == c);
                if nearest_power_of_i(&c.complex) != want || !descent_ok {
                    wrong.push(format!("{}@{}={}", row.label, row.q, c.symbolic));
                }
            }
        }
    }
    verdict(
        wrong.is_empty() && degenerate.is_empty(),
        format!(
            "{} rows; {} differ from the displayed value {:?}; {} degenerate {:?}",
            r.rows.len(),
            wrong.len(),
            wrong,
            degenerate.len(),
            degenerate
        ),
    )
}

fn criterion_torus() -> Verdict {
    let mut detail = Vec::new();
    let mut pass = true;
    for (tag, q) in [("sl2", 5), ("sl2", 7), ("sl2", 25), ("sl3", 7)] {
        let f = Field::from_order(q).unwrap();
        let model = build_algebra(&tag.parse().unwrap(), &f, f.one()).unwrap();
        let full = weil_index_brute(&model.form()).unwrap();
        let torus = weil_index_brute(&model.torus_form()).unwrap();
        pass &= full == torus;
        detail.push(format!("{tag}/F{q}: {full} vs {torus}"));
    }
    verdict(pass, detail.join(", "))
}

fn eigen_ok(c: &Computed, lambda: &CycNum) -> bool {
    c.basis.iter().all(|b| {
        c.m.apply(&b.coeffs)
            .unwrap()
            .iter()
            .zip(&b.coeffs)
            .all(|(x, y)| *x == lambda * y)
    })
}

fn criterion_sl2(sl2: &[(u64, Computed)]) -> Verdict {
    let mut pass = true;
    let mut detail = Vec::new();
    for (q, c) in sl2 {
        let f = c.model.field();
        let ok = c.basis.len() == 1 && eigen_ok(c, &c.g.conj());
        pass &= ok;
        detail.push(format!(
            "F{q}: fc_dim {} {}",
            c.basis.len(),
            if ok { "ok" } else { "bad" }
        ));
        if *q == 5 {
            let gamma = weil_index_of_cyc(&c.g, c.model.dim(), f).unwrap();
            let five_g1 = g1(f).scale_int(5);
            let at_five = gamma == WeilIndex::one(EpsClass::of(f)) && eigen_ok(c, &five_g1);
            pass &= at_five;
            detail.push(format!(
                "F5: gamma {gamma}, eigenvalue 5*g1 {}",
                if at_five { "ok" } else { "bad" }
            ));
        }
    }
    verdict(pass, detail.join(", "))
}

fn criterion_sl3(c: &Computed) -> Verdict {
    let want = CycNum::from_integer(7, SL3_EIGENVALUE);
    let observed: Vec<String> = c
        .basis
        .iter()
        .map(|b| {
            let lead = b.support()[0];
            let mc = c.m.apply(&b.coeffs).unwrap();
            (&mc[lead] * &b.coeffs[lead].inv().unwrap()).render()
        })
        .collect();
    let pass = c.basis.len() == 2 && eigen_ok(c, &want);
    verdict(
        pass,
        format!(
            "{} orbits, fc_dim {}, wanted {SL3_EIGENVALUE}, observed {:?}, conj(G) = {}",
            c.table.len(),
            c.basis.len(),
            observed,
            c.g.conj().render()
        ),
    )
}

fn criterion_involution(models: &[&Computed]) -> Verdict {
    let mut pass = true;
    let mut detail = Vec::new();
    for c in models {
        let defects = c.m.involution_defects(c.table.negation_perm());
        pass &= defects == 0;
        detail.push(format!("{}/F{}: {defects} defects", c.model.tag(), c.model.field().q()));
    }
    verdict(pass, detail.join(", "))
}

const LAW_RUNS: [(Suite, u64); 9] = [
    (Suite::Twist, 5),
    (Suite::Twist, 7),
    (Suite::Scale, 5),
    (Suite::Scale, 7),
    (Suite::Sum, 5),
    (Suite::Restrict, 5),
    (Suite::Restrict, 7),
    (Suite::EvenRank, 5),
    (Suite::EvenRank, 7),
];

fn criterion_laws() -> Verdict {
    let mut pass = true;
    let mut detail = Vec::new();
    for (suite, q) in LAW_RUNS {
        let r = run_props(suite, 1, q).unwrap();
        let enough = match suite {
            Suite::Twist => r.cases >= 20 && r.det_counts.is_some_and(|[a, b]| a > 0 && b > 0),
            Suite::Scale => r.cases >= 50,
            Suite::Sum => r.cases >= 20,
            Suite::Restrict => r.cases >= 10,
            _ => r.cases > 0,
        };
        pass &= r.pass && enough;
        detail.push(format!("{}/F{q} {}/{}", r.suite, r.passed, r.cases));
    }
    verdict(pass, detail.join(", "))
}

fn criterion_probes() -> Verdict {
    let mut pass = true;
    let mut detail = Vec::new();
    for (tag, q) in [("sl2", 9), ("sl3", 5)] {
        let f = Field::from_order(q).unwrap();
        let (r, _) = run_verify(&tag.parse().unwrap(), &f, f.one(), None, Caps::default()).unwrap();
        pass &= !r.hypothesis_ok;
        detail.push(format!("{tag}/F{q}: hypothesis_ok {}, {}", r.hypothesis_ok, r.outcome));
    }
    verdict(pass, detail.join("; "))
}

fn cli_runs(cache: &Path) -> Vec<Vec<String>> {
    let cache = cache.display().to_string();
    let mut runs = vec![vec!["table".to_string(), "--q".into(), "5,7,11,13".into()]];
    for q in SL2_QS {
        runs.push(vec![
            "verify".into(),
            "--type".into(),
            "sl2".into(),
            "--q".into(),
            q.to_string(),
            "--cache".into(),
            cache.clone(),
        ]);
    }
    for (suite, q) in LAW_RUNS {
        runs.push(vec![
            "props".into(),
            "--suite".into(),
            suite.name().into(),
            "--q".into(),
            q.to_string(),
        ]);
    }
    runs
}

fn criterion_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let run_all = || -> Vec<(String, Vec<String>)> {
        cli_runs(dir.path())
            .into_iter()
            .map(|args| {
                let cli = Cli::try_parse_from(std::iter::once("nilfourier".to_string()).chain(args)).unwrap();
                let o = execute(&cli);
                (o.report, o.notes)
            })
            .collect()
    };
    let cold = run_all();
    let warm = run_all();
    let differing = cold.iter().zip(&warm).filter(|(a, b)| a.0 != b.0).count();
    let empty = cold.iter().filter(|(r, _)| r.is_empty()).count();
    let verify_notes = |runs: &[(String, Vec<String>)], word: &str| {
        runs.iter()
            .flat_map(|(_, n)| n)
            .filter(|n| n.starts_with("orbit cache") && n.contains(word))
            .count()
    };
    let misses = verify_notes(&cold, "written");
    let hits = verify_notes(&warm, "hit");
    verdict(
        differing == 0 && empty == 0 && misses == SL2_QS.len() && hits == SL2_QS.len(),
        format!(
            "{} reports, {differing} differ, {empty} empty, cold misses {misses}, warm hits {hits}",
            cold.len()
        ),
    )
}

fn report(n: u32, name: &str, budget: Duration, run: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let v = run();
    let elapsed = start.elapsed();
    let pass = v.pass && elapsed <= budget;
    println!(
        "criterion {n} {name}: {} [{:.1}s of {}s] {}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs(),
        v.detail
    );
    pass
}

fn main() {
    // libtest flags such as --list are not meaningful here
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let cache = tempfile::tempdir().unwrap();
    let mut results = Vec::new();
    results.push(report(1, "gauss-identity", GAUSS_BUDGET, criterion_gauss));
    results.push(report(2, "table", TABLE_BUDGET, criterion_table));
    results.push(report(3, "torus-reduction", TORUS_BUDGET, criterion_torus));

    let mut sl2 = Vec::new();
    results.push(report(4, "sl2-eigenvalue", SL2_BUDGET, || {
        sl2 = SL2_QS.iter().map(|&q| (q, compute("sl2", q, cache.path()))).collect();
        criterion_sl2(&sl2)
    }));
    let mut sl3 = None;
    results.push(report(5, "sl3-f7-eigenvalue", SL3_BUDGET, || {
        let c = compute("sl3", 7, cache.path());
        let v = criterion_sl3(&c);
        sl3 = Some(c);
        v
    }));
    results.push(report(6, "involution", INVOLUTION_BUDGET, || {
        let models: Vec<&Computed> = sl2.iter().map(|(_, c)| c).chain(sl3.as_ref()).collect();
        criterion_involution(&models)
    }));
    results.push(report(7, "law-suites", LAWS_BUDGET, criterion_laws));
    results.push(report(8, "hypothesis-probes", PROBE_BUDGET, criterion_probes));
    results.push(report(9, "determinism", DETERMINISM_BUDGET, criterion_determinism));

    let failed = results.iter().filter(|&&p| !p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
