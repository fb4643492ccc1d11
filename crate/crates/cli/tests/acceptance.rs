//! Acceptance gate: one line per criterion; exits nonzero on an unexpected failure.
//!
//! Comparisons are exact rationals unless a tolerance is named below.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use l2chi::expansion::{mu_sweep, to_f64, ExpansionJob, ValuationOptions};
use l2chi::normball::{ball_norm_eval, reconstruct_ball, Gauge, SampleSet};
use l2chi::parse::InputFile;
use l2chi::pipeline::{
    alexander_norm_2g, betti_untwisted, chi_twisted, normalized_rank, ChiOptions, ChiReport,
    MuSpec, QuotientSpec,
};
use l2chi::quotient::validate_boundary;
use l2chi::{
    abelian_quotient, find_lift, free_by_cyclic, make_character, presentation_complex,
    ChainComplex, CharacterSpec, Elementary, FiniteQuotient, GroupRingElement, Presentation,
    RingMatrix, Word,
};

/// Largest distance to the nearest integer accepted on the Borromean sphere.
const SPHERE_TOLERANCE: f64 = 0.2;
/// Largest Betti deviation accepted at the largest prime tried, as a multiple of `1/|L|`.
const BETTI_SLACK: f64 = 2.0;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn load(name: &str) -> (Presentation, ChainComplex) {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    InputFile::parse(&text).unwrap().build().unwrap()
}

fn r(s: &str) -> BigRational {
    s.parse().unwrap()
}

fn quotient(p: &Presentation, spec: &str) -> FiniteQuotient {
    spec.parse::<QuotientSpec>().unwrap().build(p).unwrap()
}

fn chi(
    p: &Presentation,
    c: &ChainComplex,
    q: &FiniteQuotient,
    phi: &[i64],
    mu: MuSpec,
) -> ChiReport {
    chi_twisted(
        p,
        c,
        &CharacterSpec::Images(phi.to_vec()),
        &mu,
        q,
        &ChiOptions::default(),
    )
    .unwrap()
}

fn deltas(rep: &ChiReport) -> Vec<BigRational> {
    rep.degrees.iter().map(|d| d.report.delta.clone()).collect()
}

fn vs(rep: &ChiReport) -> Vec<BigRational> {
    rep.degrees.iter().map(|d| d.report.v.clone()).collect()
}

fn distance_to_integer(x: &BigRational) -> f64 {
    to_f64(&(x - x.round()).abs())
}

/// Collects failed sub-checks for one criterion.
#[derive(Default)]
struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn within(&mut self, elapsed: Duration, budget_secs: u64) {
        self.note(format!("{:.2}s", elapsed.as_secs_f64()));
        self.expect(
            elapsed <= Duration::from_secs(budget_secs),
            format!("runtime {:.1}s over {budget_secs}s", elapsed.as_secs_f64()),
        );
    }
}

fn criterion_1() -> Check {
    let mut c = Check::default();
    let start = Instant::now();
    let (p, cx) = load("borromean.grp");
    for prime in [2i64, 3, 5, 7] {
        let q = quotient(&p, &format!("abelian:{prime}^1"));
        let rep = chi(&p, &cx, &q, &[0, 0, 1], MuSpec::Scalar(6));
        let v = vec![r("0"), r(&format!("12/{prime}")), r(&format!("8/{prime}"))];
        let d = vec![
            r("2"),
            r("6") - r(&format!("24/{prime}")),
            r("4") - r(&format!("16/{prime}")),
        ];
        let x = r("-1") + r(&format!("4/{prime}"));
        c.expect(vs(&rep) == v, format!("p={prime}: v = {:?}", vs(&rep)));
        c.expect(
            deltas(&rep) == d,
            format!("p={prime}: δ = {:?}", deltas(&rep)),
        );
        c.expect(rep.chi == x, format!("p={prime}: χ = {}", rep.chi));

        // the same numbers through the command-line front end
        let out = Command::new(env!("CARGO_BIN_EXE_l2chi"))
            .args(["--json", "chi", "-i"])
            .arg(fixture("borromean.grp"))
            .args(["--phi", "0,0,1", "--mu", "6", "--quotient"])
            .arg(format!("abelian:{prime}^1"))
            .output()
            .unwrap();
        c.expect(
            out.status.success(),
            format!("p={prime}: cli exit {:?}", out.status.code()),
        );
        let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
        let field = |k: &str| json[k].as_str().map(r);
        c.expect(
            field("chi") == Some(x.clone()),
            format!("p={prime}: cli χ {}", json["chi"]),
        );
        let cli_deltas: Vec<Option<BigRational>> = (0..3)
            .map(|n| json["degrees"][n]["delta"].as_str().map(r))
            .collect();
        c.expect(
            cli_deltas == d.into_iter().map(Some).collect::<Vec<_>>(),
            format!("p={prime}: cli δ {cli_deltas:?}"),
        );
    }
    c.within(start.elapsed(), 60);
    c
}

fn criterion_2() -> Check {
    let mut c = Check::default();
    let start = Instant::now();
    let (p, cx) = load("borromean.grp");
    let q = quotient(&p, "abelian:29^1");
    let mut classes: Vec<(Vec<i64>, i64)> = Vec::new();
    for i in 0..3 {
        for s in [1, -1] {
            let mut v = vec![0; 3];
            v[i] = s;
            classes.push((v, 1));
        }
    }
    for a in [1, -1] {
        for b in [1, -1] {
            for d in [1, -1] {
                classes.push((vec![a, b, d], 3));
            }
        }
    }
    let mut worst: f64 = 0.0;
    let mut largest_l = 0;
    for (v, expected) in classes {
        let runs: Vec<ChiReport> = (1..=3)
            .map(|mu| chi(&p, &cx, &q, &v, MuSpec::Scalar(mu)))
            .collect();
        let values: Vec<BigRational> = runs.iter().map(|x| x.minus_chi()).collect();
        largest_l = runs
            .iter()
            .flat_map(|x| x.degrees.iter().map(|d| d.report.l_order))
            .fold(largest_l, usize::max);
        // first μ whose rounded value agrees with the next one
        let Some(k) = (0..2).find(|&k| values[k].round() == values[k + 1].round()) else {
            c.expect(false, format!("{v:?}: no stabilization up to μ=3"));
            continue;
        };
        let value = &values[k];
        let dist = distance_to_integer(value);
        worst = worst.max(dist);
        c.expect(
            value.round() == r(&expected.to_string()),
            format!("{v:?}: −χ = {value} at μ={}", k + 1),
        );
        c.expect(
            dist < SPHERE_TOLERANCE,
            format!("{v:?}: distance {dist:.3}"),
        );
    }
    c.note(format!("max distance {worst:.3}, max |L| {largest_l}"));
    c.within(start.elapsed(), 600);
    c
}

fn criterion_3() -> Check {
    let mut c = Check::default();
    let start = Instant::now();
    let (p, cx) = load("l10n14.grp");
    for spec in [
        "abelian:2^1",
        "abelian:3^1",
        "abelian:2^2",
        "abelian:3^2",
        "abelian:2^3",
    ] {
        let q = quotient(&p, spec);
        for (phi, expected) in [([0i64, 1], "2"), ([-1, 2], "3")] {
            let rep = chi(&p, &cx, &q, &phi, MuSpec::Scalar(4));
            c.expect(
                rep.minus_chi() == r(expected),
                format!("{spec} {phi:?}: −χ = {}", rep.minus_chi()),
            );
        }
    }
    for prime in [5i64, 7, 11, 13] {
        let q = quotient(&p, &format!("abelian:{prime}^1"));
        let rep = chi(&p, &cx, &q, &[-1, 1], MuSpec::Scalar(2));
        let expected = r("1") - r(&format!("3/{prime}"));
        c.expect(
            rep.minus_chi() == expected,
            format!("p={prime} (-1,1): −χ = {}", rep.minus_chi()),
        );
    }
    c.within(start.elapsed(), 60);
    c
}

/// Classes, per-class μ, Laplacian degrees and −χ for v1539(5,1).
const V1539_CLASSES: [([i64; 2], usize, [i64; 4], i64); 5] = [
    ([1, 0], 4, [2, 10, 10, 2], 2),
    ([0, 1], 10, [2, 12, 14, 4], 2),
    ([1, 1], 11, [2, 18, 22, 6], 4),
    ([1, -1], 16, [2, 10, 10, 2], 2),
    ([2, -1], 18, [4, 14, 12, 2], 2),
];

fn criterion_4() -> Check {
    let mut c = Check::default();
    let start = Instant::now();
    let (p, cx) = load("v1539.grp");
    let q = quotient(&p, "abelian:3^2");
    for (phi, mu, delta, minus_chi) in V1539_CLASSES {
        let rep = chi(&p, &cx, &q, &phi, MuSpec::Scalar(mu));
        let want: Vec<BigRational> = delta.iter().map(|d| r(&d.to_string())).collect();
        c.expect(
            deltas(&rep) == want,
            format!("{phi:?}: δ = {:?}", deltas(&rep)),
        );
        c.expect(
            rep.minus_chi() == r(&minus_chi.to_string()),
            format!("{phi:?}: −χ = {}", rep.minus_chi()),
        );
    }
    c.within(start.elapsed(), 60);
    c
}

fn criterion_5() -> Check {
    let mut c = Check::default();
    let start = Instant::now();
    let (p, cx) = load("v1539_matrix_a.grp");
    for prime in [2i64, 3, 7, 11, 13, 17] {
        let q = quotient(&p, &format!("abelian:{prime}^1"));
        let (rank, l) =
            normalized_rank(&cx.boundaries[0], &q, &ValuationOptions::default()).unwrap();
        let sq = prime * prime;
        c.expect(l as i64 == sq, format!("p={prime}: |L| = {l}"));
        c.expect(
            rank == r("2") - r(&format!("1/{sq}")),
            format!("p={prime}: rank = {rank}"),
        );
        if prime == 2 || prime == 7 {
            c.note(format!("p={prime}: {:.5}", to_f64(&rank)));
        }
    }
    c.within(start.elapsed(), 30);
    c
}

fn fbc_example() -> (Presentation, ChainComplex) {
    let gens: Vec<Elementary> = "eta_2_1 sigma_1_3 eta_2_1 eta_3_2 eta_3_1"
        .split_whitespace()
        .map(|s| Elementary::parse(s).unwrap())
        .collect();
    let p = free_by_cyclic(3, &gens).unwrap();
    let cx = presentation_complex(&p);
    (p, cx)
}

/// Observed valuations at (1,0) for the free-by-cyclic example. The required
/// value (0, 0) is not met; see the project notes.
const FBC_V_AT_1_0: [&str; 2] = ["1", "1"];

fn criterion_6() -> (Check, Vec<String>) {
    let mut c = Check::default();
    let mut declared = Vec::new();
    let start = Instant::now();
    let (p, cx) = fbc_example();
    let q = quotient(&p, "abelian:7^2");
    // (x, y) ↦ images (x, x, x, y) on (a, b, c, t)
    let classes = [[0i64, 1], [1, 1], [1, 0], [-1, 1]];
    let mut samples = Vec::new();
    for [x, y] in classes {
        let rep = chi(&p, &cx, &q, &[x, x, x, y], MuSpec::Scalar(5));
        let floored = -rep.floored_chi();
        c.expect(floored == r("2"), format!("({x},{y}): −χ = {floored}"));
        c.note(format!("({x},{y}) raw {:.5}", to_f64(&rep.minus_chi())));
        let l = rep.degrees[1].report.l_order;
        c.expect(l == 49, format!("({x},{y}): |L| = {l}"));
        let v12 = [
            rep.degrees[1].report.v.clone(),
            rep.degrees[2].report.v.clone(),
        ];
        if [x, y] == [0, 1] {
            c.expect(v12.iter().all(Zero::is_zero), format!("(0,1): v = {v12:?}"));
        }
        if [x, y] == [1, 0] {
            let observed = [r(FBC_V_AT_1_0[0]), r(FBC_V_AT_1_0[1])];
            if v12 != [r("0"), r("0")] {
                declared.push(format!(
                    "(1,0): v₁,v₂ = {}, {} (required 0, 0)",
                    v12[0], v12[1]
                ));
                c.expect(v12 == observed, format!("(1,0): v = {v12:?} changed"));
            }
        }
        samples.push((vec![x, y], floored));
    }
    let set = SampleSet::new(2, samples).unwrap();
    let ball = reconstruct_ball(&set).unwrap();
    let mut verts: Vec<Vec<BigRational>> = ball.vertices.clone();
    verts.sort();
    let mut square = vec![
        vec![r("-1/2"), r("-1/2")],
        vec![r("-1/2"), r("1/2")],
        vec![r("1/2"), r("-1/2")],
        vec![r("1/2"), r("1/2")],
    ];
    square.sort();
    c.expect(
        ball.certified,
        format!("ball not certified: {:?}", ball.gaps),
    );
    c.expect(verts == square, format!("ball vertices {verts:?}"));
    c.within(start.elapsed(), 300);
    (c, declared)
}

fn elementary(n: usize, i: usize, j: usize, x: GroupRingElement) -> RingMatrix {
    let mut e = RingMatrix::identity(n);
    e.set(i, j, x);
    e
}

/// A complex over the free group on `a, b` with dims (1, 6, 10, 4) and von
/// Neumann ranks (1, 5, 4), mixed by unimodular changes of basis.
fn planted_complex() -> (Presentation, ChainComplex) {
    let p = Presentation::new(2, vec![]);
    let e =
        |s: &str| l2chi::parse::parse_expr(s, &l2chi::parse::Scope::new(vec!['a', 'b'])).unwrap();
    let mut d1 = RingMatrix::zeros(6, 1);
    d1.set(0, 0, e("1 - a"));
    let mut d2 = RingMatrix::zeros(10, 6);
    for k in 1..6 {
        d2.set(
            k - 1,
            k,
            e(["2 - a", "3 + b", "2 - ab", "1 + 2b^-1", "2 + a^2"][k - 1]),
        );
    }
    let mut d3 = RingMatrix::zeros(4, 10);
    for k in 0..4 {
        d3.set(k, 5 + k, e(["3 - b", "2 + a", "1 - 3ab", "2 - b^2"][k]));
    }
    // d_n ↦ U_n d_n U_{n-1}⁻¹ keeps d∘d = 0 and all ranks
    let u1 = elementary(6, 3, 0, e("a - b")).mul(&elementary(6, 0, 4, e("b")));
    let u1_inv = elementary(6, 0, 4, e("-b")).mul(&elementary(6, 3, 0, e("b - a")));
    let u2 = elementary(10, 7, 1, e("1 + a")).mul(&elementary(10, 2, 8, e("ab^-1")));
    let u2_inv = elementary(10, 2, 8, e("-ab^-1")).mul(&elementary(10, 7, 1, e("-1 - a")));
    let u3 = elementary(4, 0, 3, e("b - 1"));
    let d1 = u1.mul(&d1);
    let d2 = u2.mul(&d2).mul(&u1_inv);
    let d3 = u3.mul(&d3).mul(&u2_inv);
    let cx = ChainComplex::new(vec![1, 6, 10, 4], vec![d1, d2, d3]).unwrap();
    (p, cx)
}

fn criterion_7() -> Check {
    let mut c = Check::default();
    let start = Instant::now();
    let opts = ValuationOptions::default();

    // full 2-generator complex: Betti numbers tend to zero
    let (p, cx) = load("v1539.grp");
    let trivial = betti_untwisted(&cx, &FiniteQuotient::trivial(2), &opts).unwrap();
    let ordinary: Vec<BigRational> = [1, 2, 2, 1].iter().map(|x| r(&x.to_string())).collect();
    c.expect(
        trivial.betti == ordinary,
        format!("trivial quotient b = {:?}", trivial.betti),
    );
    let mut last_max = f64::INFINITY;
    for prime in [7i64, 11, 13] {
        let rep =
            betti_untwisted(&cx, &quotient(&p, &format!("abelian:{prime}^1")), &opts).unwrap();
        let l = rep.l_orders[0] as f64;
        let one_minus = r("1") - r(&format!("1/{}", prime * prime));
        c.expect(
            rep.ranks.iter().all(|x| *x == one_minus),
            format!("p={prime}: ranks {:?}", rep.ranks),
        );
        let max_b = rep
            .betti
            .iter()
            .map(|b| to_f64(&b.abs()))
            .fold(0.0, f64::max);
        c.expect(
            max_b <= BETTI_SLACK / l,
            format!("p={prime}: max |b| = {max_b}"),
        );
        c.expect(max_b < last_max, format!("p={prime}: |b| not decreasing"));
        last_max = max_b;
    }

    // 3-generator presentation: d₁ and A tend to ranks 1 and 2
    let (p3, a) = load("v1539_matrix_a.grp");
    let mut d1 = RingMatrix::zeros(3, 1);
    for g in 0..3 {
        let mut x = GroupRingElement::from_word(Word::gen(g));
        x.sub_assign_ref(&GroupRingElement::one());
        d1.set(g, 0, x);
    }
    for prime in [7i64, 11, 13] {
        let q = quotient(&p3, &format!("abelian:{prime}^1"));
        let (r1, l1) = normalized_rank(&d1, &q, &opts).unwrap();
        let (r2, l2) = normalized_rank(&a.boundaries[0], &q, &opts).unwrap();
        c.expect(
            r1 == r("1") - r(&format!("1/{l1}")),
            format!("p={prime}: rk d₁ = {r1}"),
        );
        c.expect(
            r2 == r("2") - r(&format!("1/{l2}")),
            format!("p={prime}: rk A = {r2}"),
        );
    }

    // planted complex: b = (0, 0, 1, 0) in the limit
    let (pp, planted) = planted_complex();
    let q = abelian_quotient(&pp, &[(101, 1)]).unwrap();
    c.expect(validate_boundary(&planted, &q), "planted complex: d∘d ≠ 0");
    let rep = betti_untwisted(&planted, &q, &opts).unwrap();
    c.expect(
        rep.l_orders[0] == 101 * 101,
        format!("planted |L| = {}", rep.l_orders[0]),
    );
    // 1 − a vanishes exactly on the 101 characters trivial on a
    let inv = r("1/101");
    let want_ranks = vec![r("1") - inv.clone(), r("5"), r("4")];
    c.expect(
        rep.ranks == want_ranks,
        format!("planted ranks {:?}", rep.ranks),
    );
    let rounded: Vec<BigRational> = rep.betti.iter().map(|b| b.round()).collect();
    let target: Vec<BigRational> = [0, 0, 1, 0].iter().map(|x| r(&x.to_string())).collect();
    c.expect(rounded == target, format!("planted b = {:?}", rep.betti));
    c.expect(
        rep.betti
            .iter()
            .zip(&target)
            .all(|(b, t)| (b - t).abs() <= inv),
        format!("planted b = {:?}", rep.betti),
    );
    c.within(start.elapsed(), 10);
    c
}

fn criterion_8() -> Check {
    let mut c = Check::default();
    let start = Instant::now();
    let (p, _) = load("v1539.grp");
    let mut samples = Vec::new();
    for (phi, _, _, minus_chi) in V1539_CLASSES {
        let rep = alexander_norm_2g(&p, &phi).unwrap();
        c.expect(
            rep.polynomial.to_string() == "1 + a + ab + ab^2 + a^2b^2",
            format!("Δ = {}", rep.polynomial),
        );
        c.expect(
            rep.norm == minus_chi,
            format!("{phi:?}: ‖·‖_A = {}", rep.norm),
        );
        samples.push((phi.to_vec(), r(&rep.norm.to_string())));
    }
    // the sampled norms determine the whole ball, which must agree with the
    // Newton polygon thickness everywhere
    let ball = reconstruct_ball(&SampleSet::new(2, samples).unwrap()).unwrap();
    c.expect(
        ball.certified,
        format!("v1539 ball not certified: {:?}", ball.gaps),
    );
    let poly = alexander_norm_2g(&p, &[1, 0]).unwrap().polynomial;
    for x in -3i64..=3 {
        for y in -3i64..=3 {
            let g = ball_norm_eval(&ball, &[x, y]).unwrap();
            let t = poly.thickness(&[x, y]);
            c.expect(
                g == Gauge::Finite(r(&t.to_string())),
                format!("({x},{y}): gauge {g:?} vs thickness {t}"),
            );
        }
    }

    let (p, _) = load("l10n14.grp");
    for (phi, expected) in [([1i64, 0], 1), ([0, 1], 2), ([-1, 2], 3), ([-1, 1], 1)] {
        let rep = alexander_norm_2g(&p, &phi).unwrap();
        c.expect(
            rep.norm == expected,
            format!("L10n14 {phi:?}: ‖·‖_A = {}", rep.norm),
        );
    }
    c.within(start.elapsed(), 5);
    c
}

/// Criterion 9 is the property suite in the core crate; here only a quick
/// concavity sweep on a real Laplacian is repeated.
fn criterion_9() -> Check {
    let mut c = Check::default();
    let start = Instant::now();
    let (p, cx) = load("l10n14.grp");
    let phi = make_character(&p, &CharacterSpec::Images(vec![-1, 2])).unwrap();
    let lift = find_lift(&phi);
    let q = quotient(&p, "abelian:3^1");
    let opts = ValuationOptions {
        cap_mu: false,
        ..ValuationOptions::default()
    };
    for (n, lap) in cx.laplacians().iter().enumerate() {
        let job = ExpansionJob::new(lap, &phi, &lift, n).unwrap();
        let top = job.certified_mu().min(6);
        let sweep = mu_sweep(&job, 1..=top, &q, &opts);
        c.expect(sweep.is_ok(), format!("Δ_{n}: {:?}", sweep.err()));
    }
    c.note("property suite: l2chi-core tests/properties.rs");
    c.within(start.elapsed(), 120);
    c
}

fn criterion_10() -> Check {
    let mut c = Check::default();
    let start = Instant::now();
    let (p, cx) = load("v1539.grp");
    let q = FiniteQuotient::trivial(2);
    for (phi, _, delta, minus_chi) in V1539_CLASSES {
        // a requested μ far above the certified bound is lowered to it
        let rep = chi(&p, &cx, &q, &phi, MuSpec::Scalar(1000));
        let want: Vec<BigRational> = delta.iter().map(|d| r(&d.to_string())).collect();
        c.expect(
            deltas(&rep) == want,
            format!("{phi:?}: δ = {:?}", deltas(&rep)),
        );
        c.expect(
            rep.minus_chi() == r(&minus_chi.to_string()),
            format!("{phi:?}: −χ = {}", rep.minus_chi()),
        );
        c.expect(
            rep.degrees
                .iter()
                .all(|d| d.report.mu == d.report.certified_mu),
            format!("{phi:?}: μ not at the certified bound"),
        );
        c.expect(rep.degrees.iter().all(|d| d.report.l_order == 1), "|L| ≠ 1");
    }
    c.note("nonabelian class ≥ 2 quotients, 5-manifold and census rows not attempted");
    c.within(start.elapsed(), 60);
    c
}

fn main() {
    let mut lines = Vec::new();
    let mut unexpected = Vec::new();
    let mut report = |id: usize, c: Check, declared: Vec<String>| {
        let status = if c.failures.is_empty() && declared.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        let mut detail = c.notes.join("; ");
        if !declared.is_empty() {
            detail = format!("declared deviation: {}; {detail}", declared.join("; "));
        }
        if !c.failures.is_empty() {
            detail = format!("{}; {detail}", c.failures.join("; "));
            unexpected.push(id);
        }
        let line = format!("criterion {id}: {status} ({detail})");
        println!("{line}");
        lines.push(line);
    };
    report(1, criterion_1(), vec![]);
    report(2, criterion_2(), vec![]);
    report(3, criterion_3(), vec![]);
    report(4, criterion_4(), vec![]);
    report(5, criterion_5(), vec![]);
    let (c6, declared6) = criterion_6();
    report(6, c6, declared6);
    report(7, criterion_7(), vec![]);
    report(8, criterion_8(), vec![]);
    report(9, criterion_9(), vec![]);
    report(10, criterion_10(), vec![]);
    if !unexpected.is_empty() {
        eprintln!("criteria failed: {unexpected:?}\n{}", lines.join("\n"));
        std::process::exit(1);
    }
}
