//! Matrix expansion and normalized order valuations of Laplacian determinants.

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::presentation::Character;
use crate::quotient::{subgroup_closure, FiniteQuotient, ZLMatrix};
use crate::rank::{group_matrix_rank, RankMethod, RankPolicy, RankResult};
use crate::ring::{GroupRingElement, RingMatrix};
use crate::word::Word;

/// A square matrix prepared for expansion along a character.
#[derive(Clone, Debug)]
pub struct ExpansionJob {
    /// Row-normalized matrix: all entries of order ≥ 0, each row has an entry of order 0.
    pub matrix: RingMatrix,
    pub phi: Character,
    /// A word with `φ(x) = 1`.
    pub lift: Word,
    pub shifts: Vec<i64>,
    /// `N = Σ s_i`.
    pub n_shift: i64,
    /// Largest entry degree after normalization.
    pub ell: i64,
}

impl ExpansionJob {
    /// Normalizes `delta` and records the shifts; `degree` is only used in errors.
    pub fn new(delta: &RingMatrix, phi: &Character, lift: &Word, degree: usize) -> Result<Self> {
        let (matrix, shifts, n_shift) = normalize_rows(delta, phi, lift, degree)?;
        let ell = matrix
            .entries
            .iter()
            .filter_map(|e| e.weight_range(&phi.images))
            .map(|(_, hi)| hi)
            .max()
            .unwrap_or(0);
        Ok(ExpansionJob {
            matrix,
            phi: phi.clone(),
            lift: lift.clone(),
            shifts,
            n_shift,
            ell,
        })
    }

    /// Uses a matrix whose entries already have nonnegative order, unchanged.
    pub fn unnormalized(matrix: RingMatrix, phi: &Character, lift: &Word) -> Result<Self> {
        let mut ell = 0;
        for e in &matrix.entries {
            if let Some((lo, hi)) = e.weight_range(&phi.images) {
                if lo < 0 {
                    return Err(Error::Input("entry of negative order".into()));
                }
                ell = ell.max(hi);
            }
        }
        Ok(ExpansionJob {
            shifts: vec![0; matrix.rows],
            matrix,
            phi: phi.clone(),
            lift: lift.clone(),
            n_shift: 0,
            ell,
        })
    }

    pub fn size(&self) -> usize {
        self.matrix.rows
    }

    /// The expansion parameter `ℓ·n` beyond which `ψ_μ` is known to be stable.
    pub fn certified_mu(&self) -> usize {
        (self.ell.max(1) as usize) * self.size()
    }
}

/// Left-multiplies row `i` by `x^{s_i}` with `s_i = -(min order in row i)`.
pub fn normalize_rows(
    delta: &RingMatrix,
    phi: &Character,
    x: &Word,
    degree: usize,
) -> Result<(RingMatrix, Vec<i64>, i64)> {
    if delta.rows != delta.cols {
        return Err(Error::Shape("Laplacian is not square".into()));
    }
    let mut out = delta.clone();
    let mut shifts = Vec::with_capacity(delta.rows);
    for i in 0..delta.rows {
        let lo = delta
            .row(i)
            .iter()
            .filter_map(|e| e.weight_range(&phi.images))
            .map(|(lo, _)| lo)
            .min()
            .ok_or(Error::SingularRow { degree, row: i })?;
        let s = -lo;
        shifts.push(s);
        if s != 0 {
            let u = x.pow(s);
            for j in 0..delta.cols {
                let e = out.get(i, j).mul_word_left(&u);
                out.set(i, j, e);
            }
        }
    }
    let n = shifts.iter().sum();
    Ok((out, shifts, n))
}

/// The block upper-triangular matrix `Ω_μ` over the kernel of `φ` with
/// block `(i, j)` equal to `x^i A_{j-i} x^{-i}`, together with the list of
/// kernel words in its support.
#[derive(Clone, Debug)]
pub struct Expanded {
    pub matrix: RingMatrix,
    pub support: Vec<Word>,
}

pub fn expand_matrix(job: &ExpansionJob, mu: usize) -> Expanded {
    assert!(mu >= 1, "expansion parameter must be positive");
    let n = job.size();
    let images = &job.phi.images;
    // coefficient blocks A_d for d < mu
    let mut blocks: Vec<RingMatrix> = (0..mu).map(|_| RingMatrix::zeros(n, n)).collect();
    let x_inv = job.lift.inverse();
    let mut x_pows: HashMap<i64, Word> = HashMap::new();
    for i in 0..n {
        for j in 0..n {
            for (w, c) in job.matrix.get(i, j).terms() {
                let d = w.weight(images);
                if d < 0 || d as usize >= mu {
                    continue;
                }
                let xd = x_pows.entry(d).or_insert_with(|| x_inv.pow(d));
                blocks[d as usize]
                    .get_mut(i, j)
                    .add_term(w.concat(xd), c.clone());
            }
        }
    }
    let mut big = RingMatrix::zeros(mu * n, mu * n);
    let mut cache: HashMap<(Word, usize), Word> = HashMap::new();
    let mut conj_pows: Vec<(Word, Word)> = Vec::with_capacity(mu);
    for i in 0..mu {
        conj_pows.push((job.lift.pow(i as i64), x_inv.pow(i as i64)));
    }
    for bi in 0..mu {
        for bj in bi..mu {
            let a = &blocks[bj - bi];
            for i in 0..n {
                for j in 0..n {
                    let e = a.get(i, j);
                    if e.is_zero() {
                        continue;
                    }
                    let conj = if bi == 0 {
                        e.clone()
                    } else {
                        let (l, r) = &conj_pows[bi];
                        GroupRingElement::from_terms(e.terms().map(|(w, c)| {
                            let cw = cache
                                .entry((w.clone(), bi))
                                .or_insert_with(|| {
                                    let mut t = l.clone();
                                    t.append(w);
                                    t.append(r);
                                    t
                                })
                                .clone();
                            (cw, c.clone())
                        }))
                    };
                    big.set(bi * n + i, bj * n + j, conj);
                }
            }
        }
    }
    let mut support: Vec<Word> = big
        .entries
        .iter()
        .flat_map(|e| e.terms().map(|(w, _)| w.clone()))
        .collect();
    support.sort();
    support.dedup();
    Expanded {
        matrix: big,
        support,
    }
}

/// Options for one valuation.
#[derive(Clone, Copy, Debug)]
pub struct ValuationOptions {
    pub shrink: bool,
    pub method: RankMethod,
    pub policy: RankPolicy,
    /// Largest subgroup order accepted.
    pub max_order: usize,
    /// Never expand beyond the certified bound `ℓ·n`; larger requests are
    /// lowered to it, since `ψ` is constant from there on.
    pub cap_mu: bool,
}

impl Default for ValuationOptions {
    fn default() -> Self {
        ValuationOptions {
            shrink: true,
            method: RankMethod::Auto,
            policy: RankPolicy::default(),
            max_order: 1 << 20,
            cap_mu: true,
        }
    }
}

/// One normalized valuation `v = μn − rank/|L|` with `δ = −2(v − N)`.
#[derive(Clone, Debug)]
pub struct ValuationReport {
    pub v: BigRational,
    pub n_shift: i64,
    pub delta: BigRational,
    /// Expansion parameter actually used.
    pub mu: usize,
    pub mu_requested: usize,
    pub l_order: usize,
    pub rank: RankResult,
    pub seconds: f64,
    pub certified_mu: usize,
}

pub fn normalized_valuation(
    job: &ExpansionJob,
    mu: usize,
    q: &FiniteQuotient,
    opts: &ValuationOptions,
) -> Result<ValuationReport> {
    let start = Instant::now();
    let requested = mu;
    let mu = if opts.cap_mu {
        mu.min(job.certified_mu())
    } else {
        mu
    };
    let ex = expand_matrix(job, mu);
    let table = subgroup_closure(q, &ex.support, opts.max_order)?;
    let b = ZLMatrix::from_ring_matrix(&ex.matrix, &table)?;
    let rank = group_matrix_rank(&b, &table, opts.shrink, opts.method, &opts.policy)?;
    let l = table.order();
    let n = job.size();
    let v = BigRational::from_integer(BigInt::from(mu * n))
        - BigRational::new(BigInt::from(rank.rank), BigInt::from(l));
    let delta = (v.clone() - BigRational::from_integer(BigInt::from(job.n_shift)))
        * BigRational::from_integer(BigInt::from(-2));
    Ok(ValuationReport {
        v,
        n_shift: job.n_shift,
        delta,
        mu,
        mu_requested: requested,
        l_order: l,
        rank,
        seconds: start.elapsed().as_secs_f64(),
        certified_mu: job.certified_mu(),
    })
}

/// `ψ_μ` over a range of expansion parameters.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub reports: Vec<ValuationReport>,
    /// First `μ` whose value equals the value at the next `μ` in the range.
    pub stabilized_at: Option<usize>,
    /// First `μ` whose value rounds to the same integer as the next one.
    pub stabilized_rounded_at: Option<usize>,
    /// Whether the range reached the certified bound `ℓ·n`.
    pub reached_certified: bool,
}

/// Runs consecutive expansion parameters and checks that `ψ_μ` is
/// non-decreasing and concave; a violation is an error.
pub fn mu_sweep(
    job: &ExpansionJob,
    mus: std::ops::RangeInclusive<usize>,
    q: &FiniteQuotient,
    opts: &ValuationOptions,
) -> Result<Sweep> {
    let mut reports: Vec<ValuationReport> = Vec::new();
    for mu in mus {
        let r = normalized_valuation(job, mu, q, opts)?;
        reports.push(r);
    }
    let psi: Vec<BigRational> = reports.iter().map(|r| r.v.clone()).collect();
    check_concave(
        &reports.iter().map(|r| r.mu_requested).collect::<Vec<_>>(),
        &psi,
    )?;
    let mut stabilized_at = None;
    let mut stabilized_rounded_at = None;
    for k in 1..psi.len() {
        if stabilized_at.is_none() && psi[k] == psi[k - 1] {
            stabilized_at = Some(reports[k - 1].mu_requested);
        }
        if stabilized_rounded_at.is_none() && psi[k].round() == psi[k - 1].round() {
            stabilized_rounded_at = Some(reports[k - 1].mu_requested);
        }
    }
    let reached = reports
        .last()
        .is_some_and(|r| r.mu_requested >= job.certified_mu());
    Ok(Sweep {
        reports,
        stabilized_at,
        stabilized_rounded_at,
        reached_certified: reached,
    })
}

/// Checks monotonicity and concavity of `ψ` sampled at consecutive `μ`.
pub fn check_concave(mus: &[usize], psi: &[BigRational]) -> Result<()> {
    for k in 1..psi.len() {
        if mus[k] != mus[k - 1] + 1 {
            continue;
        }
        let d1 = &psi[k] - &psi[k - 1];
        if d1 < BigRational::zero() {
            return Err(Error::Concavity {
                mu: mus[k],
                detail: format!("ψ decreased from {} to {}", psi[k - 1], psi[k]),
            });
        }
        if k >= 2 && mus[k - 1] == mus[k - 2] + 1 {
            let d0 = &psi[k - 1] - &psi[k - 2];
            if d1 > d0 {
                return Err(Error::Concavity {
                    mu: mus[k],
                    detail: format!("increment {d1} exceeds previous increment {d0}"),
                });
            }
        }
    }
    Ok(())
}

/// Float view of a rational, for reporting.
pub fn to_f64(x: &BigRational) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{Character, Presentation};
    use crate::quotient::FiniteQuotient;

    fn single_gen_job(entries: Vec<Vec<GroupRingElement>>) -> ExpansionJob {
        let phi = Character {
            images: vec![1],
            d: 1,
        };
        ExpansionJob::unnormalized(RingMatrix::from_rows(entries), &phi, &Word::gen(0)).unwrap()
    }

    fn t(k: i64) -> GroupRingElement {
        GroupRingElement::from_word(Word::gen_pow(0, k))
    }

    #[test]
    fn upper_triangular_oracle() {
        let job = single_gen_job(vec![
            vec![t(1), GroupRingElement::one()],
            vec![GroupRingElement::zero(), t(1)],
        ]);
        let q = FiniteQuotient::trivial(1);
        let opts = ValuationOptions::default();
        let got: Vec<BigRational> = (1..=3)
            .map(|mu| normalized_valuation(&job, mu, &q, &opts).unwrap().v)
            .collect();
        let expect: Vec<BigRational> = [1, 2, 2]
            .iter()
            .map(|&k| BigRational::from_integer(BigInt::from(k)))
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn monomial_one_by_one() {
        let job = single_gen_job(vec![vec![t(1)]]);
        let ex = expand_matrix(&job, 1);
        assert!(ex.matrix.is_zero());
        let r = normalized_valuation(&job, 1, &FiniteQuotient::trivial(1), &Default::default())
            .unwrap();
        assert_eq!(r.v, BigRational::from_integer(BigInt::from(1)));
    }

    #[test]
    fn identity_has_zero_valuation() {
        let p = Presentation::new(2, vec![]);
        let q = crate::quotient::abelian_quotient(&p, &[(3, 1)]).unwrap();
        let phi = Character {
            images: vec![1, 0],
            d: 1,
        };
        let job = ExpansionJob::new(&RingMatrix::identity(3), &phi, &Word::gen(0), 0).unwrap();
        for mu in 1..=3 {
            let r = normalized_valuation(&job, mu, &q, &Default::default()).unwrap();
            assert!(r.v.is_zero() && r.delta.is_zero());
        }
    }
}
