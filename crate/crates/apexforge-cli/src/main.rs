//! apexforge: parameter schedules, random algebraic hypergraph
//! constructions, certificate verification, censuses and self-tests.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 budget
//! exhausted. Thread count comes from `--threads` or `APEXFORGE_THREADS`;
//! parallelism never changes any output byte.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use apexforge::certificate::{emit_certificate, Certificate};
use apexforge::construct::{
    build_turan, build_zarankiewicz, verify_certificate, Budgets, PatternJson, TuranParams,
    ZarParams,
};
use apexforge::hypergraph::{exponent_fit, Pattern};
use apexforge::regseq::dual_oracle_sweep;
use apexforge::rng::GENERATOR;
use apexforge::schedule::{
    lem12_precondition_check, turan_schedule, zarankiewicz_schedule, LogBase,
};
use apexforge::Error;

#[derive(Parser)]
#[command(
    name = "apexforge",
    version,
    about = "Random algebraic hypergraph constructions with exact verification",
    max_term_width = 100
)]
struct Cli {
    /// Worker threads (default: available parallelism; env APEXFORGE_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a parameter schedule for a pattern.
    Params(ParamsArgs),
    /// Run a construction and write certificate + edge list.
    Construct(ConstructArgs),
    /// Re-verify a certificate from disk.
    Verify(VerifyArgs),
    /// Sweep a construction over primes and fit the edge exponent.
    Census(CensusArgs),
    /// Run the embedded invariant suites at reduced sizes.
    Selftest,
}

#[derive(Args)]
struct ParamsArgs {
    #[command(subcommand)]
    kind: ParamsKind,
}

#[derive(Subcommand)]
enum ParamsKind {
    /// Turán schedule: t, r, l, N, cutting degrees, thresholds.
    Turan(TuranScheduleArgs),
    /// Sided schedule: r = ceil(sqrt(S)) and t(m).
    Zarankiewicz(ZarScheduleArgs),
}

#[derive(Args)]
struct TuranScheduleArgs {
    /// Uniformity of the constructed hypergraph (= pattern parts + 1).
    #[arg(long)]
    d: Option<usize>,
    /// Pattern part sizes s_1,...,s_{d-1}, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    parts: Vec<u64>,
    /// Pattern edges, semicolon separated; vertices within an edge comma
    /// separated, one-based (e.g. "1;2" for two 1-uniform edges).
    #[arg(long, required = true)]
    edges: String,
    #[arg(long, default_value = "2")]
    log_base: String,
}

#[derive(Args)]
struct ZarScheduleArgs {
    /// Number of pattern edges.
    #[arg(long = "S")]
    s_edges: u64,
    /// Degree of the sampled forms.
    #[arg(long)]
    m: u64,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(subcommand)]
    kind: ConstructKind,
}

#[derive(Subcommand)]
enum ConstructKind {
    Turan(TuranConstructArgs),
    Zarankiewicz(ZarConstructArgs),
}

#[derive(Args)]
struct TuranConstructArgs {
    #[arg(long)]
    p: u64,
    /// Ambient projective dimension N (must equal S + r + t).
    #[arg(long = "N")]
    n_proj: usize,
    /// Degree of the f-sequences and of the edge form.
    #[arg(long, default_value_t = 3)]
    m: u32,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    t: usize,
    /// Degrees of the cutting forms m_1,...,m_t, comma separated.
    #[arg(long, value_delimiter = ',')]
    degrees: Vec<u32>,
    /// Pattern file: first line `d s_1 ... s_{d-1}`, then one edge per line
    /// (one-based indices).
    #[arg(long)]
    pattern_file: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "2")]
    log_base: String,
    /// Retry budget per stage.
    #[arg(long, default_value_t = 50)]
    attempts: u32,
    /// Output directory for certificate and edge list.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// File stem; defaults to turan_p<p>_seed<seed>.
    #[arg(long)]
    stem: Option<String>,
}

#[derive(Args)]
struct ZarConstructArgs {
    #[arg(long)]
    p: u64,
    /// Ambient projective dimension of the prefix parts.
    #[arg(long)]
    n: usize,
    /// Prefix part sizes n_1,...,n_{d-1}, comma separated.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<u64>,
    /// Apex part size n_d; defaults to 2 p^S prod(degrees).
    #[arg(long)]
    nd: Option<u64>,
    #[arg(long, default_value_t = 3)]
    m: u32,
    #[arg(long)]
    r: usize,
    /// Degrees of the apex cutting forms, comma separated; default all 2.
    #[arg(long, value_delimiter = ',')]
    degrees: Vec<u32>,
    #[arg(long)]
    pattern_file: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    attempts: u32,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    stem: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Certificate JSON path; the edge file is resolved next to it.
    cert: PathBuf,
}

#[derive(Args)]
struct CensusArgs {
    /// Primes to sweep, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    primes: Vec<u64>,
    #[arg(long = "N")]
    n_proj: usize,
    #[arg(long, default_value_t = 3)]
    m: u32,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    t: usize,
    #[arg(long, value_delimiter = ',')]
    degrees: Vec<u32>,
    #[arg(long)]
    pattern_file: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "2")]
    log_base: String,
    #[arg(long, default_value_t = 50)]
    attempts: u32,
    /// Also write the CSV to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads.or_else(|| {
        std::env::var("APEXFORGE_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    }) {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::BudgetExceeded { .. } => 3,
                Error::VerificationFailed(_) => 1,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Params(args) => cmd_params(args),
        Command::Construct(args) => cmd_construct(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Census(args) => cmd_census(args),
        Command::Selftest => cmd_selftest(),
    }
}

fn parse_inline_pattern(parts: &[u64], edges: &str) -> Result<Pattern, Error> {
    let part_sizes: Vec<usize> = parts.iter().map(|&s| s as usize).collect();
    let mut parsed = Vec::new();
    for chunk in edges.split(';') {
        let vs: Vec<u32> = chunk
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidInput(format!("bad edge vertex {t:?}")))
            })
            .collect::<Result<_, _>>()?;
        if vs.contains(&0) {
            return Err(Error::InvalidInput("edge vertices are one-based".into()));
        }
        parsed.push(vs.iter().map(|&v| v - 1).collect());
    }
    Pattern::new(part_sizes, parsed)
}

fn rational_str(x: &num_bigint::BigInt, y: &num_bigint::BigInt) -> String {
    format!("{x}/{y}")
}

fn cmd_params(args: ParamsArgs) -> Result<ExitCode, Error> {
    match args.kind {
        ParamsKind::Turan(a) => {
            let pattern = parse_inline_pattern(&a.parts, &a.edges)?;
            if let Some(d) = a.d {
                if d != pattern.d() {
                    return Err(Error::InvalidInput(format!(
                        "--d {d} does not match {} pattern parts",
                        pattern.part_sizes().len()
                    )));
                }
            }
            let base = LogBase::parse(&a.log_base)?;
            let sched = turan_schedule(
                &pattern
                    .part_sizes()
                    .iter()
                    .map(|&s| s as u64)
                    .collect::<Vec<_>>(),
                pattern.edge_count() as u64,
                base,
            )?;
            let pre =
                lem12_precondition_check(sched.n_proj, 3, sched.r, sched.t, sched.l, sched.s_max);
            let json = serde_json::json!({
                "kind": "turan",
                "d": sched.d,
                "part_sizes": sched.part_sizes,
                "edge_count": sched.s_edges,
                "beta_cubed": sched.beta_cubed,
                "beta_enclosure": [
                    rational_str(sched.beta_lo.numer(), sched.beta_lo.denom()),
                    rational_str(sched.beta_hi.numer(), sched.beta_hi.denom()),
                ],
                "s_max": sched.s_max,
                "t": sched.t,
                "r": sched.r,
                "l": sched.l,
                "n_proj": sched.n_proj,
                "degrees": sched.degrees,
                "c_const": sched.c_const.to_string(),
                "s_d_threshold": sched.s_d_threshold.to_string(),
                "log_base": sched.log_base.name(),
                "preconditions": {
                    "m": 3,
                    "m_ok": pre.m_ok,
                    "l_ok": pre.l_ok,
                    "psi_ok": pre.psi_ok,
                    "psi_max": rational_str(pre.psi_max.numer(), pre.psi_max.denom()),
                    "all_ok": pre.all_ok(),
                },
            });
            println!("{}", serde_json::to_string_pretty(&json)?);
            Ok(ExitCode::SUCCESS)
        }
        ParamsKind::Zarankiewicz(a) => {
            let sched = zarankiewicz_schedule(a.s_edges, a.m)?;
            let json = serde_json::json!({
                "kind": "zarankiewicz",
                "s_edges": sched.s_edges,
                "r": sched.r,
                "m": sched.m,
                "t": sched.t,
                "bracket_ok": sched.bracket_ok,
                "apex_threshold": sched.apex_threshold.to_string(),
            });
            println!("{}", serde_json::to_string_pretty(&json)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_pattern(path: &PathBuf) -> Result<Pattern, Error> {
    let file = std::fs::File::open(path)?;
    Pattern::read(std::io::BufReader::new(file))
}

fn cmd_construct(args: ConstructArgs) -> Result<ExitCode, Error> {
    match args.kind {
        ConstructKind::Turan(a) => {
            let pattern = load_pattern(&a.pattern_file)?;
            let degrees = if a.degrees.is_empty() {
                // Default: the schedule wiring m_j = D(t - j + 1, l).
                let sched = turan_schedule(
                    &pattern
                        .part_sizes()
                        .iter()
                        .map(|&s| s as u64)
                        .collect::<Vec<_>>(),
                    pattern.edge_count() as u64,
                    LogBase::parse(&a.log_base)?,
                )?;
                if sched.t as usize != a.t {
                    return Err(Error::InvalidInput(format!(
                        "--degrees required: schedule t = {} differs from --t {}",
                        sched.t, a.t
                    )));
                }
                sched.degrees.iter().map(|&m| m as u32).collect()
            } else {
                a.degrees.clone()
            };
            let params = TuranParams {
                p: a.p,
                n_proj: a.n_proj,
                m: a.m,
                r: a.r,
                t: a.t,
                degrees,
                pattern: PatternJson::of(&pattern),
                seed: a.seed,
                log_base: a.log_base.clone(),
                budgets: Budgets {
                    attempts: a.attempts,
                    ..Budgets::default()
                },
                generator: GENERATOR.into(),
            };
            let mut out = build_turan(&params, &pattern)?;
            let stem = a
                .stem
                .unwrap_or_else(|| format!("turan_p{}_seed{}", a.p, a.seed));
            out.certificate.edges_file = format!("{stem}.edges");
            let (cert_path, edge_path) =
                emit_certificate(&out.certificate, &out.edges, a.p, a.n_proj, &a.out, &stem)?;
            let report = verify_certificate(&out.certificate, &a.out)?;
            let summary = serde_json::json!({
                "certificate": cert_path,
                "edges": edge_path,
                "e_g": out.certificate.verification.e_g,
                "realized_k": out.certificate.verification.realized_k,
                "parts": out.certificate.parts,
                "verified": report.all_ok(),
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
            if report.all_ok() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        ConstructKind::Zarankiewicz(a) => {
            let pattern = load_pattern(&a.pattern_file)?;
            let d = pattern.d();
            if a.sizes.len() != d - 1 {
                return Err(Error::InvalidInput(format!(
                    "--sizes needs {} prefix part sizes",
                    d - 1
                )));
            }
            let degrees = if a.degrees.is_empty() {
                vec![2u32; a.r]
            } else {
                a.degrees.clone()
            };
            if degrees.len() != a.r {
                return Err(Error::InvalidInput(format!(
                    "--degrees needs {} entries",
                    a.r
                )));
            }
            let s_edges = pattern.edge_count() as u32;
            let nd = a.nd.unwrap_or_else(|| {
                2 * a.p.pow(s_edges) * degrees.iter().map(|&m| m as u64).product::<u64>()
            });
            let mut sizes = a.sizes.clone();
            sizes.push(nd);
            let params = ZarParams {
                p: a.p,
                n_prefix: a.n,
                n_proj: a.r + s_edges as usize,
                sizes,
                m: a.m,
                r: a.r,
                degrees,
                pattern: PatternJson::of(&pattern),
                seed: a.seed,
                budgets: Budgets {
                    attempts: a.attempts,
                    ..Budgets::default()
                },
                generator: GENERATOR.into(),
            };
            let mut out = build_zarankiewicz(&params, &pattern)?;
            let stem = a
                .stem
                .unwrap_or_else(|| format!("zar_p{}_seed{}", a.p, a.seed));
            out.certificate.edges_file = format!("{stem}.edges");
            let (cert_path, edge_path) = emit_certificate(
                &out.certificate,
                &out.edges,
                a.p,
                params.n_proj,
                &a.out,
                &stem,
            )?;
            let report = verify_certificate(&out.certificate, &a.out)?;
            let summary = serde_json::json!({
                "certificate": cert_path,
                "edges": edge_path,
                "e_g": out.certificate.verification.e_g,
                "realized_k": out.certificate.verification.realized_k,
                "parts": out.certificate.parts,
                "verified": report.all_ok(),
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
            if report.all_ok() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let cert = Certificate::from_reader(std::fs::File::open(&args.cert)?)?;
    let dir = args
        .cert
        .parent()
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| PathBuf::from("."));
    let report = verify_certificate(&cert, &dir)?;
    for (name, ok) in &report.checks {
        println!("{} {}", if *ok { "[PASS]" } else { "[FAIL]" }, name);
    }
    if report.all_ok() {
        println!("verification passed ({} checks)", report.checks.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("verification FAILED");
        Ok(ExitCode::from(1))
    }
}

struct CensusCell {
    n_total: u64,
    e_g: u64,
    realized_k: u64,
    parts: String,
}

fn cmd_census(args: CensusArgs) -> Result<ExitCode, Error> {
    let pattern = load_pattern(&args.pattern_file)?;
    let d = pattern.d();
    let s_edges = pattern.edge_count();
    let target = d as f64 - 1.0 / s_edges as f64;
    let mut rows: Vec<(u64, Option<CensusCell>)> = Vec::new();
    for &p in &args.primes {
        let degrees = if args.degrees.is_empty() {
            vec![2u32; args.t]
        } else {
            args.degrees.clone()
        };
        let params = TuranParams {
            p,
            n_proj: args.n_proj,
            m: args.m,
            r: args.r,
            t: args.t,
            degrees,
            pattern: PatternJson::of(&pattern),
            seed: args.seed,
            log_base: args.log_base.clone(),
            budgets: Budgets {
                attempts: args.attempts,
                ..Budgets::default()
            },
            generator: GENERATOR.into(),
        };
        match build_turan(&params, &pattern) {
            Ok(out) => {
                let n_total: u64 = out.certificate.parts.iter().sum();
                let parts_str = out
                    .certificate
                    .parts
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(";");
                rows.push((
                    p,
                    Some(CensusCell {
                        n_total,
                        e_g: out.certificate.verification.e_g,
                        realized_k: out.certificate.verification.realized_k,
                        parts: parts_str,
                    }),
                ));
            }
            Err(err) => {
                eprintln!("census: p = {p} failed: {err}");
                rows.push((p, None));
            }
        }
    }
    let fit_rows: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|(_, cell)| cell.as_ref().map(|c| (c.n_total as f64, c.e_g as f64)))
        .collect();
    let slope = if fit_rows.len() >= 2 {
        Some(exponent_fit(&fit_rows)?)
    } else {
        None
    };
    let mut csv = String::new();
    csv.push_str("p,N,d,S,n_total,part_sizes,e_G,realized_K,target_exponent,fitted_slope\n");
    let last_success = rows
        .iter()
        .rposition(|(_, cell)| cell.is_some())
        .unwrap_or(usize::MAX);
    for (i, (p, cell)) in rows.iter().enumerate() {
        match cell {
            Some(cell) => {
                let slope_str = if i == last_success {
                    slope.map(|s| format!("{s:.6}")).unwrap_or_default()
                } else {
                    String::new()
                };
                csv.push_str(&format!(
                    "{p},{},{d},{s_edges},{},{},{},{},{target:.6},{slope_str}\n",
                    args.n_proj, cell.n_total, cell.parts, cell.e_g, cell.realized_k,
                ));
            }
            None => {
                csv.push_str(&format!(
                    "{p},{},{d},{s_edges},FAILED,,,,{target:.6},\n",
                    args.n_proj,
                    d = d,
                    s_edges = s_edges,
                    target = target,
                ));
            }
        }
    }
    print!("{csv}");
    if let Some(path) = &args.out {
        std::fs::write(path, csv.as_bytes())?;
    }
    // Per-cell failures are tolerated as long as a slope can still be fitted;
    // a sweep with no failed cells is always a success.
    let any_failed = rows.iter().any(|(_, cell)| cell.is_none());
    if !any_failed || fit_rows.len() >= 2 {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(Error::BudgetExceeded {
            stage: "census".into(),
            detail: format!("only {} of {} cells succeeded", fit_rows.len(), rows.len()),
        })
    }
}

fn cmd_selftest() -> Result<ExitCode, Error> {
    use apexforge::gf::FieldParams;
    use apexforge::hypergraph::{
        max_common_apex, max_common_apex_naive, PartAssignment, PartiteHypergraph,
    };
    use apexforge::rng::SeedStream;
    use apexforge::schedule::{d_function, product_bound_check};

    let fault = std::env::var("APEXFORGE_SELFTEST_FAULT").unwrap_or_default();
    let mut passed = 0usize;
    let mut failed = 0usize;
    let mut check = |name: &str, ok: bool| {
        if ok {
            passed += 1;
        } else {
            failed += 1;
            println!("[FAIL] {name}");
        }
    };

    // Field axioms and Frobenius on every supported order <= 25.
    for (p, e) in [
        (2u64, 1usize),
        (3, 1),
        (5, 1),
        (7, 1),
        (2, 2),
        (3, 2),
        (2, 3),
        (2, 4),
        (5, 1),
        (11, 1),
        (13, 1),
    ] {
        let f = FieldParams::extension(p, e)?;
        let q = f.order();
        let mut ok = true;
        for i in 0..q {
            let a = f.element_from_index(i);
            if f.pow(a, q) != a {
                ok = false;
            }
            if !a.is_zero() {
                let inv = f.inv(a)?;
                if f.mul(a, inv)? != f.one() {
                    ok = false;
                }
            }
        }
        check(&format!("field_axioms_q{q}"), ok);
    }

    // D-function bracket and the product bound.
    let mut ok = true;
    for r in 1..=8u64 {
        for t in 1..=200u64 {
            if !product_bound_check(r, t, LogBase::Two).holds {
                ok = false;
            }
        }
    }
    check("product_bound_r8_t200", ok);
    check("d_examples", d_function(1, 5) == 5 && d_function(2, 3) == 2);

    // Schedule reference values.
    let sched = turan_schedule(&[2], 2, LogBase::Two)?;
    check(
        "turan_schedule_reference",
        sched.t == 4
            && sched.r == 9
            && sched.l == 12
            && sched.n_proj == 15
            && sched.degrees == vec![2, 3, 4, 12],
    );

    // Dual-oracle agreement at reduced size; the fault hook flips one verdict
    // to prove the comparison is live.
    let report = dual_oracle_sweep(60, 3, 3, 3, 5, 424242)?;
    let mut disagreements = report.disagreements.len();
    if fault == "regseq" {
        disagreements += 1;
    }
    check("regularity_dual_oracle_60", disagreements == 0);

    // Pruned apex search vs naive enumeration on random hosts.
    let mut s = SeedStream::new(99, 1);
    let mut ok = true;
    for _ in 0..60 {
        let d = 2 + s.below(2) as usize;
        let sizes: Vec<usize> = (0..d).map(|_| 2 + s.below(4) as usize).collect();
        let mut edges = std::collections::HashSet::new();
        let want = 1 + s.below(10) as usize;
        for _ in 0..want {
            let e: Vec<u32> = sizes.iter().map(|&n| s.below(n as u64) as u32).collect();
            edges.insert(e);
        }
        let g = PartiteHypergraph::new(sizes.clone(), edges.into_iter().collect())?;
        let psizes: Vec<usize> = (0..d - 1)
            .map(|i| 1 + s.below(sizes[i].min(2) as u64) as usize)
            .collect();
        let pat = Pattern::complete(psizes)?;
        let assign = PartAssignment::identity(d);
        let (a, _) = max_common_apex(&g, &pat, &assign)?;
        let (b, _) = max_common_apex_naive(&g, &pat, &assign)?;
        if a != b {
            ok = false;
        }
    }
    check("apex_search_vs_naive_60", ok);

    // A small end-to-end construction plus certificate verification.
    let tmp = tempfile::tempdir()?;
    let pattern = Pattern::complete(vec![2])?;
    let params = TuranParams {
        p: 7,
        n_proj: 4,
        m: 3,
        r: 1,
        t: 1,
        degrees: vec![2],
        pattern: PatternJson::of(&pattern),
        seed: 0,
        log_base: "2".into(),
        budgets: Budgets::default(),
        generator: GENERATOR.into(),
    };
    match build_turan(&params, &pattern) {
        Ok(mut out) => {
            out.certificate.edges_file = "selftest.edges".into();
            emit_certificate(&out.certificate, &out.edges, 7, 4, tmp.path(), "selftest")?;
            let report = verify_certificate(&out.certificate, tmp.path())?;
            check("turan_p7_roundtrip", report.all_ok());
        }
        Err(err) => {
            println!("[INFO] p=7 construction exhausted its budget: {err}");
            check("turan_p7_roundtrip", false);
        }
    }

    println!("selftest: {passed} passed, {failed} failed");
    if failed == 0 {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
