//! Command-line surface: argument parsing, command dispatch, and report rendering.
//!
//! Exit codes: `0` when every check passes (or only informational probes fail),
//! `1` on a mathematical mismatch, `2` on a usage or configuration error.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::field::Field;
use crate::fourier::{run_verify, Caps, TheoremReport};
use crate::liealg::{build_algebra, torus_gram, weil_index_type, weil_index_type_by_descent, AlgebraType};
use crate::matrix::FqMatrix;
use crate::orbits::{load_or_enumerate, CacheStatus, OrbitChecks};
use crate::props::{run_props, PropsReport, Suite};
use crate::qform::{gauss_sum_brute_capped, gauss_sum_closed, weil_index_of_cyc, GramForm, DEFAULT_SUM_CAP};
use crate::report::CycSummary;
use crate::table::{expected_value, run_table, TableReport};
use crate::weil::WeilSummary;

/// Environment variable naming the orbit cache directory.
pub const CACHE_ENV: &str = "NILFOURIER_CACHE";

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "nilfourier",
    version,
    about = "Exact Weil indices and Fourier eigenvalue checks over finite fields"
)]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    pub output: Output,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Output {
    Json,
    Text,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Brute-force and closed-form Gauss sum of a quadratic form.
    Gauss {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Gram matrix, rows separated by `;`, entries by `,` (e.g. "0,1;1,0").
        #[arg(long)]
        gram: String,
        /// Bound on q^dim for the brute-force sum.
        #[arg(long, default_value_t = DEFAULT_SUM_CAP)]
        cap: u64,
    },
    /// Weil index of a simple type from its torus.
    Weil {
        #[arg(long = "type")]
        ty: String,
        #[arg(long)]
        q: u64,
    },
    /// The table of Weil indices against the closed formulas.
    Table {
        /// Comma-separated field orders.
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
    },
    /// Adjoint orbits of a matrix model.
    Orbits {
        #[arg(long = "type")]
        ty: String,
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        cache: CacheArgs,
        #[arg(long, default_value_t = crate::orbits::DEFAULT_STATE_CAP)]
        state_cap: u64,
    },
    /// Full eigenvalue verification on the nilpotent space.
    Verify {
        #[arg(long = "type")]
        ty: String,
        #[arg(long)]
        q: u64,
        /// Multiplier of the invariant form.
        #[arg(long, default_value_t = 1)]
        scale: i64,
        #[command(flatten)]
        cache: CacheArgs,
        #[arg(long, default_value_t = crate::orbits::DEFAULT_STATE_CAP)]
        state_cap: u64,
        #[arg(long, default_value_t = crate::fourier::DEFAULT_WORK_CAP)]
        work_cap: u64,
    },
    /// Seeded randomized law suites.
    Props {
        /// twist, scale, sum, restrict, even-rank, or involution.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        q: u64,
    },
}

#[derive(clap::Args, Debug, Clone, Default)]
pub struct CacheArgs {
    /// Orbit cache directory; defaults to $NILFOURIER_CACHE, then the system temp dir.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Always enumerate, never read or write the cache.
    #[arg(long)]
    pub no_cache: bool,
}

impl CacheArgs {
    pub fn resolve(&self) -> Option<PathBuf> {
        if self.no_cache {
            return None;
        }
        self.cache
            .clone()
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .or_else(|| Some(std::env::temp_dir().join("nilfourier-cache")))
    }
}

/// Result of one command: the rendered report and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub exit_code: i32,
    /// Diagnostics for stderr (cache status, errors); never part of the report.
    pub notes: Vec<String>,
}

#[derive(Serialize)]
struct GaussReport {
    p: u32,
    k: u32,
    q: u32,
    dim: usize,
    gram: String,
    gauss_sum: CycSummary,
    closed_form: CycSummary,
    weil_index: Option<WeilSummary>,
    #[serde(rename = "match")]
    matches: bool,
}

#[derive(Serialize)]
struct WeilReport {
    algebra: String,
    q: u32,
    rank: usize,
    coxeter: u32,
    hypothesis_ok: bool,
    sgn: i8,
    torus_gram: String,
    weil_index: WeilSummary,
    by_descent: Option<WeilSummary>,
    formula: Option<String>,
    expected: Option<WeilSummary>,
    matches_formula: Option<bool>,
    pass: bool,
}

#[derive(Serialize)]
struct OrbitRecord {
    id: usize,
    rep: u64,
    size: u64,
    nilpotent: bool,
    neg: u32,
}

#[derive(Serialize)]
struct OrbitsReport {
    algebra: String,
    q: u32,
    dim: usize,
    group_order: String,
    n_orbits: usize,
    n_nilpotent_orbits: usize,
    orbits: Vec<OrbitRecord>,
    checks: OrbitChecks,
    pass: bool,
}

fn usage(msg: impl std::fmt::Display) -> Outcome {
    Outcome {
        report: String::new(),
        exit_code: EXIT_USAGE,
        notes: vec![format!("error: {msg}")],
    }
}

fn field(q: u64) -> Result<Field, Outcome> {
    Field::from_order(q).map_err(|e| usage(format!("bad field F_{q}: {e}")))
}

fn algebra(tag: &str) -> Result<AlgebraType, Outcome> {
    tag.parse().map_err(usage)
}

fn render<T: Serialize>(output: Output, value: &T, text: impl FnOnce() -> String) -> String {
    match output {
        Output::Json => serde_json::to_string_pretty(value).expect("reports serialise") + "\n",
        Output::Text => text(),
    }
}

fn code(pass: bool) -> i32 {
    if pass {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}

/// Runs one parsed command.
pub fn execute(cli: &Cli) -> Outcome {
    match run(cli) {
        Ok(o) | Err(o) => o,
    }
}

fn run(cli: &Cli) -> Result<Outcome, Outcome> {
    let out = cli.output;
    let mut notes = Vec::new();
    let (report, exit_code) = match &cli.command {
        Command::Gauss { p, k, gram, cap } => {
            let f = Field::new(*p, *k).map_err(|e| usage(format!("bad field: {e}")))?;
            let m = FqMatrix::parse(&f, gram).map_err(usage)?;
            let form = GramForm::new(m).map_err(usage)?;
            let g = gauss_sum_brute_capped(&form, *cap).map_err(usage)?;
            let closed = gauss_sum_closed(&form);
            let w = weil_index_of_cyc(&g, form.dim(), &f).ok();
            let r = GaussReport {
                p: f.p(),
                k: f.k(),
                q: f.q(),
                dim: form.dim(),
                gram: form.gram().render(),
                gauss_sum: (&g).into(),
                closed_form: (&closed).into(),
                weil_index: w.map(|w| w.summary()),
                matches: g == closed,
            };
            let text = || {
                format!(
                    "F_{} dim {}\nG = {}\nclosed form = {}\ngamma = {}\nmatch = {}\n",
                    r.q,
                    r.dim,
                    r.gauss_sum.cyclotomic,
                    r.closed_form.cyclotomic,
                    r.weil_index.as_ref().map_or("-", |w| w.symbolic.as_str()),
                    r.matches
                )
            };
            (render(out, &r, text), code(r.matches))
        }
        Command::Weil { ty, q } => {
            let f = field(*q)?;
            let ty = algebra(ty)?;
            let (gram, sgn) = torus_gram(&ty, &f).map_err(usage)?;
            let w = weil_index_type(&ty, &f).map_err(usage)?;
            let by_descent = if ty.is_split() {
                None
            } else {
                Some(weil_index_type_by_descent(&ty, &f).map_err(usage)?)
            };
            let expected = expected_value(&ty, &f);
            let matches_formula = expected.as_ref().map(|(_, e)| *e == w);
            let r = WeilReport {
                algebra: ty.tag(),
                q: f.q(),
                rank: ty.rank(),
                coxeter: ty.coxeter(),
                hypothesis_ok: ty.hypothesis_holds(f.p()),
                sgn,
                torus_gram: gram.gram().render(),
                weil_index: w.summary(),
                by_descent: by_descent.map(|d| d.summary()),
                formula: expected.as_ref().map(|(s, _)| s.clone()),
                expected: expected.as_ref().map(|(_, e)| e.summary()),
                matches_formula,
                pass: by_descent.is_none_or(|d| d == w),
            };
            let text = || {
                let mut s = format!(
                    "{} over F_{}: gamma = {} ({})\n",
                    r.algebra, r.q, r.weil_index.symbolic, r.weil_index.complex
                );
                if let (Some(fm), Some(e)) = (&r.formula, &r.expected) {
                    let _ = writeln!(
                        s,
                        "formula {fm} = {}: {}",
                        e.symbolic,
                        if r.matches_formula == Some(true) {
                            "match"
                        } else {
                            "mismatch"
                        }
                    );
                }
                s
            };
            (render(out, &r, text), code(r.pass))
        }
        Command::Table { q } => {
            let r: TableReport = run_table(q).map_err(usage)?;
            let text = || {
                let mut s = String::new();
                for row in &r.rows {
                    let computed = row.computed.as_ref().map_or("degenerate", |c| c.symbolic.as_str());
                    let _ = writeln!(
                        s,
                        "q={:<3} {:<10} {:<10} expected {:<18} = {:<5} {}",
                        row.q, row.label, computed, row.formula, row.expected.symbolic, row.status
                    );
                }
                let _ = writeln!(s, "{} mismatches, {} degenerate", r.mismatches, r.degenerate);
                s
            };
            (render(out, &r, text), code(r.pass))
        }
        Command::Orbits {
            ty,
            q,
            cache,
            state_cap,
        } => {
            let f = field(*q)?;
            let ty = algebra(ty)?;
            let model = build_algebra(&ty, &f, f.one()).map_err(usage)?;
            let dir = cache.resolve();
            let (t, status) = load_or_enumerate(&model, dir.as_deref(), *state_cap).map_err(usage)?;
            notes.push(cache_note(status, dir.as_deref()));
            let checks = t.check(&model, 0x6e66, 1000);
            let r = OrbitsReport {
                algebra: model.tag(),
                q: f.q(),
                dim: model.dim(),
                group_order: model.group_order().to_string(),
                n_orbits: t.len(),
                n_nilpotent_orbits: t.nilpotent_ids().len(),
                orbits: (0..t.len())
                    .map(|i| OrbitRecord {
                        id: i,
                        rep: t.reps()[i],
                        size: t.sizes()[i],
                        nilpotent: t.nilpotent()[i],
                        neg: t.negation_perm()[i],
                    })
                    .collect(),
                pass: checks.pass,
                checks,
            };
            let text = || {
                let mut s = format!(
                    "{} over F_{}: {} orbits, {} nilpotent\n",
                    r.algebra, r.q, r.n_orbits, r.n_nilpotent_orbits
                );
                for o in r.orbits.iter().filter(|o| o.nilpotent) {
                    let _ = writeln!(
                        s,
                        "  nilpotent orbit {} rep {} size {} (-X in {})",
                        o.id, o.rep, o.size, o.neg
                    );
                }
                let _ = writeln!(s, "checks pass = {}", r.pass);
                s
            };
            (render(out, &r, text), code(r.pass))
        }
        Command::Verify {
            ty,
            q,
            scale,
            cache,
            state_cap,
            work_cap,
        } => {
            let f = field(*q)?;
            let ty = algebra(ty)?;
            let dir = cache.resolve();
            let caps = Caps {
                states: *state_cap,
                work: *work_cap,
            };
            let (r, status): (TheoremReport, CacheStatus) =
                run_verify(&ty, &f, f.from_i64(*scale), dir.as_deref(), caps).map_err(usage)?;
            notes.push(cache_note(status, dir.as_deref()));
            let text = || verify_text(&r);
            // failures outside the hypothesis are informational
            (render(out, &r, text), code(r.pass || !r.hypothesis_ok))
        }
        Command::Props { suite, seed, q } => {
            let suite: Suite = suite.parse().map_err(usage)?;
            let r: PropsReport = run_props(suite, *seed, *q).map_err(usage)?;
            let text = || {
                let mut s = format!("{} seed {} q {}: {}/{} pass\n", r.suite, r.seed, r.q, r.passed, r.cases);
                if let Some([plus, minus]) = r.det_counts {
                    let _ = writeln!(s, "det +1: {plus}, det -1: {minus}");
                }
                for c in r.details.iter().filter(|c| !c.pass) {
                    let _ = writeln!(s, "  FAIL #{} {}", c.index, c.description);
                }
                s
            };
            (render(out, &r, text), code(r.pass))
        }
    };
    Ok(Outcome {
        report,
        exit_code,
        notes,
    })
}

fn cache_note(status: CacheStatus, dir: Option<&std::path::Path>) -> String {
    match (status, dir) {
        (CacheStatus::Hit, Some(d)) => format!("orbit cache hit in {}", d.display()),
        (CacheStatus::Miss, Some(d)) => format!("orbit cache written to {}", d.display()),
        _ => "orbit cache disabled".to_string(),
    }
}

fn verify_text(r: &TheoremReport) -> String {
    let mut s = format!(
        "{} over F_{}: dim {}, {} orbits ({} nilpotent), FC dim {}\n",
        r.algebra, r.q, r.dim, r.n_orbits, r.n_nilpotent_orbits, r.fc_dim
    );
    let _ = writeln!(s, "G = {}", r.gauss_sum.cyclotomic);
    let _ = writeln!(s, "gamma = {} ({})", r.gamma.symbolic, r.gamma.complex);
    let _ = writeln!(s, "expected eigenvalue conj(G) = {}", r.expected_eigenvalue.cyclotomic);
    let _ = writeln!(
        s,
        "observed eigenvalue = {}",
        r.eigenvalue.as_ref().map_or("none", |e| e.cyclotomic.as_str())
    );
    let _ = writeln!(s, "hypothesis p > 3(h-1): {}", r.hypothesis_ok);
    let _ = writeln!(s, "outcome: {}", r.outcome);
    s
}

/// Parses `args` (including the program name), runs, prints, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = execute(&cli);
    print!("{}", outcome.report);
    for n in &outcome.notes {
        eprintln!("{n}");
    }
    outcome.exit_code
}
