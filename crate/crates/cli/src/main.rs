use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde_json::{json, Value};

use l2chi::expansion::{to_f64, ValuationOptions};
use l2chi::normball::{ball_norm_eval, reconstruct_ball, Gauge, SampleSet};
use l2chi::parse::{parse_input, read_text, InputFile};
use l2chi::pipeline::{
    alexander_norm_2g, betti_untwisted, chi_twisted, luck_error_bound, ChiOptions, ChiReport,
    MuSpec, QuotientSpec,
};
use l2chi::{free_by_cyclic, make_character, CharacterSpec, Elementary, Error, Presentation};
use l2chi::{RankMethod, RankPolicy};

#[derive(Parser)]
#[command(
    name = "l2chi",
    version,
    about = "Twisted L2-Euler characteristics over finite quotients"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit one JSON object per line.
    #[arg(long, global = true)]
    json: bool,
    /// Append a JSON line describing this run to FILE.
    #[arg(long, global = true, value_name = "FILE")]
    log: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Twisted L2-Euler characteristic for one or more characters.
    Chi(ChiArgs),
    /// Untwisted ranks and Betti numbers approximated over a finite quotient.
    Betti(BettiArgs),
    /// Alexander polynomial of a two-generator presentation and its norms.
    Alexander(AlexanderArgs),
    /// Reconstruct and certify a unit ball from sampled seminorm values.
    Normball(NormballArgs),
    /// Quantitative approximation bound n·[(1 − 1/(kd))^{k²} + log d / log k].
    Bound(BoundArgs),
    /// Write the input file of a free-by-cyclic group.
    Fbc(FbcArgs),
}

#[derive(Args, Clone)]
struct CharacterArgs {
    /// Character by generator images, e.g. `a=0,b=0,c=1` or `0,0,1`; repeat for a batch.
    #[arg(long, allow_hyphen_values = true)]
    phi: Vec<String>,
    /// Character by coordinates on the free part of the abelianization; repeat for a batch.
    #[arg(long = "v", allow_hyphen_values = true)]
    v: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Regular,
    Characters,
}

#[derive(Args, Clone)]
struct RankArgs {
    /// Finite quotient: `trivial`, `abelian:7^2,2^1`, `perm:FILE`, or `search:deg=5,budget=10^7`.
    #[arg(long, default_value = "trivial")]
    quotient: String,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exact rational ranks (Bareiss) instead of modular probes.
    #[arg(long)]
    exact: bool,
    /// Number of random primes for modular ranks.
    #[arg(long, default_value_t = 3)]
    probes: usize,
    /// Rank method for the group-ring matrices.
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    /// Skip elimination of unit entries before blowing up.
    #[arg(long)]
    no_shrink: bool,
    /// Largest accepted subgroup order.
    #[arg(long, default_value_t = 1 << 20)]
    max_order: usize,
    /// Report wall-clock seconds (off by default so output is reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct ChiArgs {
    /// Input file.
    #[arg(short, long)]
    input: PathBuf,
    #[command(flatten)]
    character: CharacterArgs,
    /// Expansion parameter: one value, or one per degree (`1,3,2`).
    #[arg(long, default_value = "1")]
    mu: String,
    #[command(flatten)]
    rank: RankArgs,
    /// Also print the nearest integer to −χ and the distance to it.
    #[arg(long)]
    round: bool,
    /// Also report −χ recomputed from the floors of the valuations.
    #[arg(long)]
    floor: bool,
    /// Allow expansion parameters above the certified bound ℓ·n.
    #[arg(long)]
    no_mu_cap: bool,
    /// Skip the check that consecutive boundaries compose to zero in the quotient.
    #[arg(long)]
    skip_validation: bool,
}

#[derive(Args)]
struct BettiArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[command(flatten)]
    rank: RankArgs,
}

#[derive(Args)]
struct AlexanderArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[command(flatten)]
    character: CharacterArgs,
}

#[derive(Args)]
struct NormballArgs {
    /// CSV samples `v1,v2[,v3],value`.
    #[arg(long)]
    csv: PathBuf,
    /// Write an SVG sketch (two-dimensional balls only).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Evaluate the gauge at these vectors, e.g. `2,3`; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    eval: Vec<String>,
}

#[derive(Args)]
struct BoundArgs {
    /// Matrix size.
    #[arg(long)]
    n: usize,
    /// Step index, at least 2.
    #[arg(long)]
    k: u64,
    /// Operator norm bound, greater than 1.
    #[arg(long)]
    d: f64,
}

#[derive(Args)]
struct FbcArgs {
    /// Rank of the free group.
    #[arg(long)]
    rank: usize,
    /// Elementary automorphisms applied left to right, e.g. `eta_2_1 sigma_1_3`.
    #[arg(long)]
    gens: String,
    /// Name recorded in the file.
    #[arg(long, default_value = "fbc")]
    name: String,
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(t) = std::env::var("L2CHI_THREADS") {
        match t.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: L2CHI_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    let result = run(&cli);
    match result {
        Ok(records) => {
            if let Some(path) = &cli.log {
                if let Err(e) = append_log(path, &records) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}

fn append_log(path: &Path, records: &[Value]) -> std::io::Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    let line = json!({
        "argv": std::env::args().collect::<Vec<_>>(),
        "results": records,
    });
    writeln!(f, "{line}")
}

/// Runs the command and returns its JSON records, printing as it goes.
fn run(cli: &Cli) -> l2chi::Result<Vec<Value>> {
    let mut records = Vec::new();
    let mut emit = |record: Value, text: String| {
        if cli.json {
            println!("{record}");
        } else {
            print!("{text}");
        }
        records.push(record);
    };
    match &cli.command {
        Command::Chi(a) => {
            let (p, c) = parse_input(&a.input)?;
            let q = build_quotient(&a.rank.quotient, &p)?;
            let mu: MuSpec = a.mu.parse()?;
            let mut opts = ChiOptions {
                valuation: valuation_options(&a.rank),
                skip_validation: a.skip_validation,
            };
            opts.valuation.cap_mu = !a.no_mu_cap;
            for spec in characters(&a.character)? {
                let start = Instant::now();
                let report = chi_twisted(&p, &c, &spec, &mu, &q, &opts)?;
                if report.zero_character {
                    eprintln!("warning: zero character, χ = 0");
                }
                let secs = a.rank.timing.then(|| start.elapsed().as_secs_f64());
                let (rec, text) = chi_output(&report, a, secs);
                emit(rec, text);
            }
        }
        Command::Betti(a) => {
            let (p, c) = parse_input(&a.input)?;
            let q = build_quotient(&a.rank.quotient, &p)?;
            let start = Instant::now();
            let r = betti_untwisted(&c, &q, &valuation_options(&a.rank))?;
            let rec = json!({
                "quotient": q.label,
                "dims": c.dims,
                "ranks": r.ranks.iter().map(rat).collect::<Vec<_>>(),
                "betti": r.betti.iter().map(rat).collect::<Vec<_>>(),
                "L_order": r.l_orders,
                "seed": a.rank.seed,
                "seconds": a.rank.timing.then(|| start.elapsed().as_secs_f64()),
            });
            let mut text = format!("quotient {}\n", q.label);
            for (i, (rk, l)) in r.ranks.iter().zip(&r.l_orders).enumerate() {
                text += &format!(
                    "rank d{} = {} ({:.5}), |L| = {}\n",
                    i + 1,
                    rk,
                    to_f64(rk),
                    l
                );
            }
            for (i, b) in r.betti.iter().enumerate() {
                text += &format!("b{} = {} ({:.5})\n", i, b, to_f64(b));
            }
            emit(rec, text);
        }
        Command::Alexander(a) => {
            let (p, _) = parse_input(&a.input)?;
            let specs = characters(&a.character)?;
            if specs.is_empty() {
                let poly = l2chi::laurent::alexander_polynomial(&p)?;
                emit(
                    json!({ "polynomial": poly.to_string() }),
                    format!("Δ = {poly}\n"),
                );
            }
            for spec in specs {
                let phi = make_character(&p, &spec)?;
                let images: Vec<i64> = phi.images.iter().map(|x| x * phi.d).collect();
                let r = alexander_norm_2g(&p, &images)?;
                emit(
                    json!({ "polynomial": r.polynomial.to_string(), "phi": images, "norm": r.norm }),
                    format!(
                        "Δ = {}\nphi = {:?}: ‖φ‖_A = {}\n",
                        r.polynomial, images, r.norm
                    ),
                );
            }
        }
        Command::Normball(a) => {
            let text = read_text(&a.csv)?;
            let samples = SampleSet::from_csv(&text)?;
            let ball = reconstruct_ball(&samples)?;
            if let Some(path) = &a.svg {
                std::fs::write(path, ball.to_svg(&samples)?)?;
            }
            let mut evals = Vec::new();
            for e in &a.eval {
                let v = parse_ints(e)?;
                let g = ball_norm_eval(&ball, &v)?;
                evals.push((v, g));
            }
            let (rec, text) = ball_output(&ball, &evals);
            emit(rec, text);
        }
        Command::Bound(a) => {
            let b = luck_error_bound(a.n, a.k, a.d)?;
            emit(
                json!({ "n": a.n, "k": a.k, "d": a.d, "bound": b }),
                format!("{b:.6}\n"),
            );
        }
        Command::Fbc(a) => {
            let gens = a
                .gens
                .split_whitespace()
                .map(Elementary::parse)
                .collect::<l2chi::Result<Vec<_>>>()?;
            let p = free_by_cyclic(a.rank, &gens)?;
            let mut file = InputFile::from_presentation(&a.name, &p).serialize();
            file.insert_str(
                0,
                &format!("# free-by-cyclic group, automorphism {}\n", a.gens),
            );
            match &a.output {
                Some(path) => std::fs::write(path, &file)?,
                None => print!("{file}"),
            }
            records.push(json!({ "name": a.name, "rank": a.rank, "gens": a.gens }));
        }
    }
    Ok(records)
}

fn valuation_options(a: &RankArgs) -> ValuationOptions {
    ValuationOptions {
        shrink: !a.no_shrink,
        method: match a.method {
            MethodArg::Auto => RankMethod::Auto,
            MethodArg::Regular => RankMethod::Regular,
            MethodArg::Characters => RankMethod::Characters,
        },
        policy: RankPolicy {
            probes: a.probes.max(1),
            exact: a.exact,
            seed: a.seed,
        },
        max_order: a.max_order,
        ..ValuationOptions::default()
    }
}

fn build_quotient(spec: &str, p: &Presentation) -> l2chi::Result<l2chi::FiniteQuotient> {
    let q = match spec.strip_prefix("perm:") {
        Some(path) => QuotientSpec::perm_from_text(&read_text(Path::new(path))?),
        None => spec.parse()?,
    };
    q.build(p)
}

fn parse_ints(s: &str) -> l2chi::Result<Vec<i64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Input(format!("bad integer {t:?} in {s:?}")))
        })
        .collect()
}

/// Character specifications in command-line order: all `--phi`, then all `--v`.
fn characters(a: &CharacterArgs) -> l2chi::Result<Vec<CharacterSpec>> {
    let mut out = Vec::new();
    for s in &a.phi {
        // `a=0,b=0,c=1` or plain `0,0,1`
        let vals = if s.contains('=') {
            s.split(',')
                .map(|kv| {
                    let (_, v) = kv
                        .split_once('=')
                        .ok_or_else(|| Error::Input(format!("bad image {kv:?}")))?;
                    v.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::Input(format!("bad image {kv:?}")))
                })
                .collect::<l2chi::Result<Vec<_>>>()?
        } else {
            parse_ints(s)?
        };
        out.push(CharacterSpec::Images(vals));
    }
    for s in &a.v {
        out.push(CharacterSpec::FreeCoords(parse_ints(s)?));
    }
    Ok(out)
}

fn rat(x: &BigRational) -> Value {
    Value::String(x.to_string())
}

fn chi_output(r: &ChiReport, a: &ChiArgs, secs: Option<f64>) -> (Value, String) {
    let degrees: Vec<Value> = r
        .degrees
        .iter()
        .map(|d| {
            json!({
                "n": d.n,
                "v": rat(&d.report.v),
                "N": d.report.n_shift,
                "delta": rat(&d.report.delta),
                "L_order": d.report.l_order,
                "mu": d.report.mu,
                "mu_requested": d.report.mu_requested,
                "certified_mu": d.report.certified_mu,
                "rank_primes": d.report.rank.primes,
                "seconds": a.rank.timing.then_some(d.report.seconds),
            })
        })
        .collect();
    let minus = r.minus_chi();
    let mut rec = json!({
        "degrees": degrees,
        "chi": rat(&r.chi),
        "minus_chi": rat(&minus),
        "minus_chi_approx": to_f64(&minus),
        "d": r.d,
        "quotient": r.quotient,
        "phi": r.phi,
        "seed": a.rank.seed,
        "seconds": secs,
    });
    let mut text = format!("phi = {:?}, quotient {}\n", r.phi, r.quotient);
    for d in &r.degrees {
        text += &format!(
            "  n={} v={} ({:.5}) N={} delta={} ({:.5}) |L|={} mu={}\n",
            d.n,
            d.report.v,
            to_f64(&d.report.v),
            d.report.n_shift,
            d.report.delta,
            to_f64(&d.report.delta),
            d.report.l_order,
            d.report.mu
        );
    }
    text += &format!("chi = {} ({:.5})\n", r.chi, to_f64(&r.chi));
    if a.round {
        let nearest = minus.round();
        let dist = (&minus - &nearest).abs();
        rec["minus_chi_rounded"] = rat(&nearest);
        rec["distance"] = json!(to_f64(&dist));
        text += &format!(
            "-chi ≈ {} (distance {:.5})\n",
            nearest.to_integer(),
            to_f64(&dist)
        );
    }
    if a.floor {
        let f = -r.floored_chi();
        rec["minus_chi_floored"] = rat(&f);
        text += &format!("-chi from floored valuations = {f}\n");
    }
    (rec, text)
}

fn ball_output(
    b: &l2chi::normball::BallCertificate,
    evals: &[(Vec<i64>, Gauge)],
) -> (Value, String) {
    let vec_json = |v: &[BigRational]| v.iter().map(rat).collect::<Vec<_>>();
    let facets: Vec<Value> = b
        .facets
        .iter()
        .map(|f| {
            json!({
                "normal": vec_json(&f.normal),
                "vertices": f.vertices,
                "witness": f.witness,
            })
        })
        .collect();
    let gauge_json = |g: &Gauge| match g {
        Gauge::Finite(x) => rat(x),
        Gauge::Infinite => Value::String("inf".into()),
    };
    let rec = json!({
        "dim": b.dim,
        "hull_dim": b.hull_dim,
        "vertices": b.vertices.iter().map(|v| vec_json(v)).collect::<Vec<_>>(),
        "facets": facets,
        "lineality": b.lineality,
        "certified": b.certified,
        "gaps": b.gaps,
        "eval": evals.iter().map(|(v, g)| json!({"v": v, "value": gauge_json(g)})).collect::<Vec<_>>(),
    });
    let show = |v: &[BigRational]| {
        let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        format!("({})", parts.join(", "))
    };
    let mut text = format!(
        "{} vertices, {} facets, {}\n",
        b.vertices.len(),
        b.facets.len(),
        if b.certified {
            "certified"
        } else {
            "not certified"
        }
    );
    for v in &b.vertices {
        text += &format!("  vertex {}\n", show(v));
    }
    for f in &b.facets {
        text += &format!(
            "  facet {}·x = 1, witness {}\n",
            show(&f.normal),
            f.witness
                .as_ref()
                .map_or("none".to_string(), |w| format!("{w:?}"))
        );
    }
    for l in &b.lineality {
        text += &format!("  lineality {l:?}\n");
    }
    for g in &b.gaps {
        text += &format!("  gap: {g}\n");
    }
    for (v, g) in evals {
        let val = match g {
            Gauge::Finite(x) => format!("{x} ({:.5})", x.to_f64().unwrap_or(f64::NAN)),
            Gauge::Infinite => "inf".into(),
        };
        text += &format!("  ‖{v:?}‖ = {val}\n");
    }
    (rec, text)
}
