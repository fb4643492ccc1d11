//! The end-to-end computation: characters, Laplacians, valuations, and the
//! alternating sum; untwisted ranks; error bounds; the Alexander cross-check.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expansion::{normalized_valuation, ExpansionJob, ValuationOptions, ValuationReport};
use crate::fox::ChainComplex;
use crate::laurent::{alexander_polynomial, phi_on_free_part, LaurentPoly};
use crate::presentation::{find_lift, make_character, Character, CharacterSpec, Presentation};
use crate::quotient::{
    abelian_quotient, parse_cycles, perm_quotient, search_quotient, subgroup_closure,
    validate_boundary, FiniteQuotient, ZLMatrix,
};
use crate::rank::group_matrix_rank;
use crate::ring::RingMatrix;

/// How to obtain a finite quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuotientSpec {
    Trivial,
    /// Prime powers `p^c`.
    Abelian(Vec<(u64, u32)>),
    /// One permutation per generator, in cycle notation.
    Perm(Vec<String>),
    Search {
        degree: usize,
        budget: u64,
    },
}

impl FromStr for QuotientSpec {
    type Err = Error;

    /// Parses `trivial`, `abelian:7^2,2^1`, `search:deg=5,budget=10^7`.
    /// `perm:FILE` is resolved by the caller, which reads the file.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("bad quotient spec {s:?}"));
        if s == "trivial" {
            return Ok(QuotientSpec::Trivial);
        }
        if let Some(rest) = s.strip_prefix("abelian:") {
            let mut v = Vec::new();
            for part in rest.split(',') {
                let (p, c) = part.split_once('^').unwrap_or((part, "1"));
                let p: u64 = p.trim().parse().map_err(|_| bad())?;
                let c: u32 = c.trim().parse().map_err(|_| bad())?;
                v.push((p, c));
            }
            return Ok(QuotientSpec::Abelian(v));
        }
        if let Some(rest) = s.strip_prefix("search:") {
            let mut degree = None;
            let mut budget = 10_000_000u64;
            for kv in rest.split(',') {
                let (k, v) = kv.split_once('=').ok_or_else(bad)?;
                match k.trim() {
                    "deg" => degree = Some(v.trim().parse().map_err(|_| bad())?),
                    "budget" => budget = parse_count(v.trim()).ok_or_else(bad)?,
                    _ => return Err(bad()),
                }
            }
            return Ok(QuotientSpec::Search {
                degree: degree.ok_or_else(bad)?,
                budget,
            });
        }
        Err(bad())
    }
}

/// Parses `12345` or `10^7`.
fn parse_count(s: &str) -> Option<u64> {
    match s.split_once('^') {
        Some((b, e)) => b.parse::<u64>().ok()?.checked_pow(e.parse().ok()?),
        None => s.parse().ok(),
    }
}

impl QuotientSpec {
    /// Reads permutations for `perm:` from text with one permutation per line.
    pub fn perm_from_text(text: &str) -> QuotientSpec {
        QuotientSpec::Perm(
            text.lines()
                .map(|l| l.trim())
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(String::from)
                .collect(),
        )
    }

    pub fn build(&self, p: &Presentation) -> Result<FiniteQuotient> {
        match self {
            QuotientSpec::Trivial => Ok(FiniteQuotient::trivial(p.rank)),
            QuotientSpec::Abelian(v) => abelian_quotient(p, v),
            QuotientSpec::Perm(lines) => {
                let perms = lines
                    .iter()
                    .map(|l| parse_cycles(l, 0))
                    .collect::<Result<Vec<_>>>()?;
                perm_quotient(p, perms)
            }
            QuotientSpec::Search { degree, budget } => {
                let r = search_quotient(p, *degree, *budget);
                r.quotients
                    .into_iter()
                    .next()
                    .ok_or_else(|| Error::Input("search found no nontrivial quotient".into()))
            }
        }
    }
}

/// Expansion parameter for every degree, or one per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MuSpec {
    Scalar(usize),
    PerDegree(Vec<usize>),
}

impl MuSpec {
    pub fn for_degree(&self, n: usize) -> Result<usize> {
        let mu = match self {
            MuSpec::Scalar(m) => *m,
            MuSpec::PerDegree(v) => *v
                .get(n)
                .ok_or_else(|| Error::Input(format!("no expansion parameter for degree {n}")))?,
        };
        if mu == 0 {
            return Err(Error::Input("expansion parameter must be positive".into()));
        }
        Ok(mu)
    }
}

impl FromStr for MuSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let v = s
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Input(format!("bad expansion parameter {s:?}")))?;
        if v.len() == 1 {
            Ok(MuSpec::Scalar(v[0]))
        } else {
            Ok(MuSpec::PerDegree(v))
        }
    }
}

/// Per-degree valuation with its degree index.
#[derive(Clone, Debug)]
pub struct DegreeReport {
    pub n: usize,
    pub report: ValuationReport,
}

#[derive(Clone, Debug)]
pub struct ChiReport {
    pub degrees: Vec<DegreeReport>,
    pub chi: BigRational,
    pub d: i64,
    pub phi: Vec<i64>,
    pub quotient: String,
    pub zero_character: bool,
}

impl ChiReport {
    pub fn minus_chi(&self) -> BigRational {
        -self.chi.clone()
    }

    /// `χ` recomputed from `⌊v_n⌋`: the approximations of the valuations
    /// converge from above, so flooring recovers integral limits once the
    /// error is below one.
    pub fn floored_chi(&self) -> BigRational {
        alternating_sum(
            self.degrees.iter().map(|d| {
                let v = d.report.v.floor();
                let n = BigRational::from_integer(BigInt::from(d.report.n_shift));
                (d.n, (v - n) * BigRational::from_integer(BigInt::from(-2)))
            }),
            self.d,
        )
    }
}

/// `d · (−½ Σ (−1)^n n δ_n)`.
pub fn alternating_sum(deltas: impl Iterator<Item = (usize, BigRational)>, d: i64) -> BigRational {
    let mut sum = BigRational::zero();
    for (n, delta) in deltas {
        let term = delta * BigRational::from_integer(BigInt::from(n));
        if n % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum * BigRational::new(BigInt::from(-d), BigInt::from(2))
}

#[derive(Clone, Debug, Default)]
pub struct ChiOptions {
    pub valuation: ValuationOptions,
    /// Skip the `d∘d = 0` check in the quotient.
    pub skip_validation: bool,
}

/// Twisted L²-Euler characteristic `χ = d · (−½ Σ (−1)^n n δ_n)`.
pub fn chi_twisted(
    p: &Presentation,
    c: &ChainComplex,
    phi: &CharacterSpec,
    mu: &MuSpec,
    q: &FiniteQuotient,
    opts: &ChiOptions,
) -> Result<ChiReport> {
    let phi = make_character(p, phi)?;
    chi_with_character(c, &phi, mu, q, opts)
}

pub fn chi_with_character(
    c: &ChainComplex,
    phi: &Character,
    mu: &MuSpec,
    q: &FiniteQuotient,
    opts: &ChiOptions,
) -> Result<ChiReport> {
    if phi.is_zero() {
        return Ok(ChiReport {
            degrees: vec![],
            chi: BigRational::zero(),
            d: phi.d,
            phi: phi.full_images(),
            quotient: q.label.clone(),
            zero_character: true,
        });
    }
    if !opts.skip_validation && !validate_boundary(c, q) {
        return Err(Error::Input(format!(
            "boundary maps do not compose to zero under {}",
            q.label
        )));
    }
    let x = find_lift(phi);
    let laps = c.laplacians();
    for (n, l) in laps.iter().enumerate() {
        if !l.is_self_adjoint() {
            return Err(Error::Internal(format!(
                "Laplacian {n} is not self-adjoint"
            )));
        }
    }
    let jobs = laps
        .iter()
        .enumerate()
        .map(|(n, l)| Ok((n, ExpansionJob::new(l, phi, &x, n)?, mu.for_degree(n)?)))
        .collect::<Result<Vec<_>>>()?;
    let degrees = jobs
        .par_iter()
        .map(|(n, job, m)| {
            Ok(DegreeReport {
                n: *n,
                report: normalized_valuation(job, *m, q, &opts.valuation)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let chi = alternating_sum(degrees.iter().map(|d| (d.n, d.report.delta.clone())), phi.d);
    Ok(ChiReport {
        degrees,
        chi,
        d: phi.d,
        phi: phi.full_images(),
        quotient: q.label.clone(),
        zero_character: false,
    })
}

/// Normalized rank of a group-ring matrix over a quotient: `rank / |L|`.
pub fn normalized_rank(
    m: &RingMatrix,
    q: &FiniteQuotient,
    opts: &ValuationOptions,
) -> Result<(BigRational, usize)> {
    let mut support: Vec<crate::word::Word> = m
        .entries
        .iter()
        .flat_map(|e| e.terms().map(|(w, _)| w.clone()))
        .collect();
    support.sort();
    support.dedup();
    let table = subgroup_closure(q, &support, opts.max_order)?;
    let b = ZLMatrix::from_ring_matrix(m, &table)?;
    let r = group_matrix_rank(&b, &table, opts.shrink, opts.method, &opts.policy)?;
    let l = table.order();
    Ok((BigRational::new(BigInt::from(r.rank), BigInt::from(l)), l))
}

/// Untwisted ranks and Betti numbers `b_i = n_i − rk d_i − rk d_{i+1}`.
#[derive(Clone, Debug)]
pub struct BettiReport {
    pub ranks: Vec<BigRational>,
    pub betti: Vec<BigRational>,
    pub l_orders: Vec<usize>,
}

/// Ranks of the differentials over the whole quotient group.
///
/// Every boundary is evaluated over the full image of the quotient, so the
/// normalization is the same in every degree.
pub fn betti_untwisted(
    c: &ChainComplex,
    q: &FiniteQuotient,
    opts: &ValuationOptions,
) -> Result<BettiReport> {
    let gens: Vec<crate::word::Word> = (0..q.gen_images.len())
        .map(crate::word::Word::gen)
        .collect();
    let table = subgroup_closure(q, &gens, opts.max_order)?;
    let l = table.order();
    let mut ranks = Vec::new();
    let mut l_orders = Vec::new();
    for d in &c.boundaries {
        let b = ZLMatrix::from_ring_matrix(d, &table)?;
        let r = group_matrix_rank(&b, &table, opts.shrink, opts.method, &opts.policy)?;
        ranks.push(BigRational::new(BigInt::from(r.rank), BigInt::from(l)));
        l_orders.push(l);
    }
    let betti = betti_from_ranks(&c.dims, &ranks);
    Ok(BettiReport {
        ranks,
        betti,
        l_orders,
    })
}

/// `b_i = n_i − r_i − r_{i+1}` where `r_i` is the rank of `d_i` (`r_0 = 0`).
pub fn betti_from_ranks(dims: &[usize], ranks: &[BigRational]) -> Vec<BigRational> {
    (0..dims.len())
        .map(|i| {
            let mut b = BigRational::from_integer(BigInt::from(dims[i]));
            if i >= 1 {
                b -= &ranks[i - 1];
            }
            if i < ranks.len() {
                b -= &ranks[i];
            }
            b
        })
        .collect()
}

/// `n · [(1 − 1/(kd))^{k²} + log d / log k]`.
pub fn luck_error_bound(n: usize, k: u64, d: f64) -> Result<f64> {
    if k < 2 || !d.is_finite() || d <= 1.0 {
        return Err(Error::Input("need k ≥ 2 and d > 1".into()));
    }
    let kf = k as f64;
    let first = (1.0 - 1.0 / (kf * d)).powf(kf * kf);
    Ok(n as f64 * (first + d.ln() / kf.ln()))
}

/// `√(r·c) ·` max entrywise coefficient ℓ¹ norm.
pub fn operator_norm_bound(a: &RingMatrix) -> f64 {
    let m = a
        .entries
        .iter()
        .map(|e| e.l1_norm())
        .max()
        .unwrap_or_default();
    if m.is_zero() {
        return 0.0;
    }
    ((a.rows * a.cols) as f64).sqrt() * m.to_f64().unwrap_or(f64::INFINITY)
}

/// The Alexander polynomial of a two-generator presentation and the
/// thickness of its Newton polytope along `φ`.
#[derive(Clone, Debug)]
pub struct AlexanderReport {
    pub polynomial: LaurentPoly,
    pub norm: i64,
}

pub fn alexander_norm_2g(p: &Presentation, phi: &[i64]) -> Result<AlexanderReport> {
    let poly = alexander_polynomial(p)?;
    let norm = poly.thickness(&phi_on_free_part(p, phi)?);
    Ok(AlexanderReport {
        polynomial: poly,
        norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_specs() {
        assert_eq!(
            "trivial".parse::<QuotientSpec>().unwrap(),
            QuotientSpec::Trivial
        );
        assert_eq!(
            "abelian:7^2,2^1".parse::<QuotientSpec>().unwrap(),
            QuotientSpec::Abelian(vec![(7, 2), (2, 1)])
        );
        assert_eq!(
            "search:deg=5,budget=10^7".parse::<QuotientSpec>().unwrap(),
            QuotientSpec::Search {
                degree: 5,
                budget: 10_000_000
            }
        );
        assert!("abelian:x".parse::<QuotientSpec>().is_err());
    }

    #[test]
    fn error_bound_value() {
        let b = luck_error_bound(1, 10, 2.0).unwrap();
        let expect = 0.95f64.powi(100) + 2f64.ln() / 10f64.ln();
        assert!((b - expect).abs() < 1e-12);
        assert!((b - 0.30695).abs() < 1e-4);
        assert!(luck_error_bound(1, 1, 2.0).is_err());
        assert!(luck_error_bound(1, 3, 1.0).is_err());
    }
}
