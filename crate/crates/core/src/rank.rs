//! Exact and modular ranks, the unit-pivot shrink, and character-sum ranks
//! for abelian subgroups.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quotient::{zl_mul, zl_sub, SparseIntMatrix, SubgroupTable, ZLElem, ZLMatrix};

/// How a rank was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certainty {
    Certified,
    Probabilistic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankResult {
    pub rank: usize,
    pub certainty: Certainty,
    pub primes: Vec<u64>,
}

/// Rank policy: number of random probe primes, or exact certification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankPolicy {
    pub probes: usize,
    pub exact: bool,
    pub seed: u64,
}

impl Default for RankPolicy {
    fn default() -> Self {
        RankPolicy {
            probes: 3,
            exact: false,
            seed: 0,
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn reduce(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

const DENSE_LIMIT: usize = 500;

/// Rank over `F_p`; dense elimination for small matrices, sparse otherwise.
pub fn rank_mod_p(m: &SparseIntMatrix, p: u64) -> usize {
    assert!((2..(1 << 32)).contains(&p), "prime must fit in 32 bits");
    if m.rows < DENSE_LIMIT && m.cols < DENSE_LIMIT {
        let mut d: Vec<Vec<u64>> = vec![vec![0; m.cols]; m.rows];
        for (i, r) in m.data.iter().enumerate() {
            for &(j, x) in r {
                d[i][j as usize] = reduce(x, p);
            }
        }
        dense_rank_mod(&mut d, p)
    } else {
        let rows = m
            .data
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&(j, x)| (j, reduce(x, p)))
                    .filter(|&(_, x)| x != 0)
                    .collect()
            })
            .collect();
        sparse_rank_mod(rows, m.cols, p)
    }
}

/// Gaussian elimination on a dense matrix with entries already in `[0, p)`.
pub fn dense_rank_mod(a: &mut [Vec<u64>], p: u64) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = inv_mod(a[rank][c], p);
        let prow: Vec<u64> = a[rank][c..].iter().map(|&x| mul_mod(x, inv, p)).collect();
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for (x, &y) in row[c..].iter_mut().zip(&prow) {
                *x = (*x + p - mul_mod(f, y, p)) % p;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Sparse elimination with a Markowitz-style choice: shortest row first, then
/// its sparsest column.
fn sparse_rank_mod(mut rows: Vec<Vec<(u32, u64)>>, cols: usize, p: u64) -> usize {
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); cols];
    let mut heap = BinaryHeap::new();
    for (i, r) in rows.iter().enumerate() {
        for &(j, _) in r {
            col_rows[j as usize].push(i as u32);
        }
        if !r.is_empty() {
            heap.push(Reverse((r.len(), i)));
        }
    }
    let mut active = vec![true; rows.len()];
    let mut rank = 0;
    while let Some(Reverse((len, r))) = heap.pop() {
        if !active[r] || rows[r].len() != len {
            continue;
        }
        if rows[r].is_empty() {
            active[r] = false;
            continue;
        }
        let &(c, pv) = rows[r]
            .iter()
            .min_by_key(|&&(j, _)| col_rows[j as usize].len())
            .unwrap();
        let inv = inv_mod(pv, p);
        let prow = std::mem::take(&mut rows[r]);
        active[r] = false;
        rank += 1;
        let targets = std::mem::take(&mut col_rows[c as usize]);
        for &t in &targets {
            let t = t as usize;
            if !active[t] {
                continue;
            }
            let Ok(pos) = rows[t].binary_search_by_key(&c, |e| e.0) else {
                continue;
            };
            let f = mul_mod(rows[t][pos].1, inv, p);
            let old = std::mem::take(&mut rows[t]);
            let mut merged = Vec::with_capacity(old.len() + prow.len());
            let (mut i, mut k) = (0, 0);
            while i < old.len() || k < prow.len() {
                if k >= prow.len() || (i < old.len() && old[i].0 < prow[k].0) {
                    merged.push(old[i]);
                    i += 1;
                } else if i >= old.len() || prow[k].0 < old[i].0 {
                    let v = (p - mul_mod(f, prow[k].1, p)) % p;
                    if v != 0 {
                        merged.push((prow[k].0, v));
                        col_rows[prow[k].0 as usize].push(t as u32);
                    }
                    k += 1;
                } else {
                    let v = (old[i].1 + p - mul_mod(f, prow[k].1, p)) % p;
                    if v != 0 {
                        merged.push((old[i].0, v));
                    }
                    i += 1;
                    k += 1;
                }
            }
            rows[t] = merged;
            if rows[t].is_empty() {
                active[t] = false;
            } else {
                heap.push(Reverse((rows[t].len(), t)));
            }
        }
    }
    rank
}

/// Draws `k` distinct primes in `[2^30, 2^31)` satisfying `pred`.
pub fn random_primes(k: usize, seed: u64, pred: impl Fn(u64) -> bool) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<u64> = Vec::with_capacity(k);
    while out.len() < k {
        let c = rng.gen_range((1u64 << 30)..(1u64 << 31)) | 1;
        if is_prime(c) && pred(c) && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Rank over the rationals: maximum over random primes, or certified by
/// fraction-free elimination.
pub fn rank_rational(m: &SparseIntMatrix, policy: &RankPolicy) -> RankResult {
    if policy.exact {
        return RankResult {
            rank: bareiss_rank(m),
            certainty: Certainty::Certified,
            primes: vec![],
        };
    }
    let primes = random_primes(policy.probes.max(1), policy.seed, |_| true);
    let rank = primes
        .par_iter()
        .map(|&p| rank_mod_p(m, p))
        .collect::<Vec<_>>()
        .into_iter()
        .max()
        .unwrap_or(0);
    RankResult {
        rank,
        certainty: Certainty::Probabilistic,
        primes,
    }
}

/// Fraction-free Gaussian elimination over the integers.
pub fn bareiss_rank(m: &SparseIntMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = m
        .to_dense()
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect();
    let rows = m.rows;
    let cols = m.cols;
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&a[rank][c] * &a[i][j] - &a[i][c] * &a[rank][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Repeatedly pivots on entries equal to `± g` for a single group element,
/// deleting the pivot row and column. Returns the shrunk matrix and the pivot
/// count; the regular-representation rank drops by exactly `|L|` per pivot.
pub fn unit_shrink(b: &ZLMatrix, t: &SubgroupTable) -> Result<(ZLMatrix, usize)> {
    let mut rows: Vec<Vec<ZLElem>> = (0..b.rows)
        .map(|i| (0..b.cols).map(|j| b.get(i, j).clone()).collect())
        .collect();
    let mut col_alive = vec![true; b.cols];
    let mut pivots = 0;
    loop {
        let col_nnz: Vec<usize> = (0..b.cols)
            .map(|j| {
                if col_alive[j] {
                    rows.iter().filter(|r| !r[j].is_empty()).count()
                } else {
                    0
                }
            })
            .collect();
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, r) in rows.iter().enumerate() {
            let rn = r.iter().filter(|e| !e.is_empty()).count();
            for j in 0..b.cols {
                if !col_alive[j] {
                    continue;
                }
                let e = &r[j];
                if e.len() == 1 && e[0].1.abs() == 1 {
                    let cost = (rn - 1) * (col_nnz[j] - 1);
                    if best.is_none_or(|(_, _, bc)| cost < bc) {
                        best = Some((i, j, cost));
                    }
                }
            }
        }
        let Some((r, c, _)) = best else { break };
        let prow = rows.swap_remove(r);
        let (g, s) = prow[c][0];
        let ginv = t.inv(g);
        for row in rows.iter_mut() {
            if row[c].is_empty() {
                continue;
            }
            // f = row[c] · u^{-1} with u = s·g
            let f: ZLElem = zl_mul(&row[c], &vec![(ginv, s)], t)?;
            for j in 0..b.cols {
                if !col_alive[j] || prow[j].is_empty() {
                    continue;
                }
                let prod = zl_mul(&f, &prow[j], t)?;
                row[j] = zl_sub(&row[j], &prod)?;
            }
            debug_assert!(row[c].is_empty());
        }
        col_alive[c] = false;
        pivots += 1;
    }
    let keep: Vec<usize> = (0..b.cols).filter(|&j| col_alive[j]).collect();
    let mut out = ZLMatrix::zeros(rows.len(), keep.len());
    for (i, r) in rows.into_iter().enumerate() {
        for (jj, &j) in keep.iter().enumerate() {
            out.set(i, jj, r[j].clone());
        }
    }
    Ok((out, pivots))
}

/// Smallest modulus `e` such that every character of the ambient abelian
/// quotient takes values in the `e`-th roots of unity.
fn exponent_of(moduli: &[u64]) -> u64 {
    moduli.iter().fold(1u64, |acc, &m| num_integer::lcm(acc, m))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A primitive `e`-th root of unity modulo a prime `q ≡ 1 (mod e)`.
fn root_of_unity(e: u64, q: u64, seed: u64) -> u64 {
    let fac = prime_factors(e);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ q);
    loop {
        let g = rng.gen_range(2..q - 1);
        let w = pow_mod(g, (q - 1) / e, q);
        if fac.iter().all(|&l| pow_mod(w, e / l, q) != 1) {
            return w;
        }
    }
}

/// Largest ambient character group enumerated by [`rank_by_characters`].
pub const CHARACTER_ENUM_LIMIT: u64 = 1 << 22;

/// Rank of the regular representation of `b` over an abelian `L`, computed as
/// the sum over characters `ψ` of `L` of `rank ψ(b)` in a prime field
/// containing the needed roots of unity. Returns `None` when `L` is not
/// abelian or its ambient character group is too large to enumerate.
pub fn rank_by_characters(
    b: &ZLMatrix,
    t: &SubgroupTable,
    policy: &RankPolicy,
) -> Option<RankResult> {
    let ab = t.abelian.as_ref()?;
    let moduli = &ab.moduli;
    let total: u64 = moduli
        .iter()
        .try_fold(1u64, |acc, &m| acc.checked_mul(m))
        .filter(|&x| x <= CHARACTER_ENUM_LIMIT)?;
    let e = exponent_of(moduli);
    let order = t.order() as u64;
    // restrictions of ambient characters to L, deduplicated by their values
    // on the basis of L
    let basis: Vec<&Vec<u64>> = ab
        .basis
        .iter()
        .zip(&ab.steps)
        .filter(|(_, &s)| s > 1)
        .map(|(b, _)| b)
        .collect();
    let scale: Vec<u64> = moduli.iter().map(|&m| e / m).collect();
    let mut chars: Vec<Vec<u64>> = Vec::new();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut k = vec![0u64; moduli.len()];
    for _ in 0..total {
        let key: Vec<u64> = basis
            .iter()
            .map(|h| {
                h.iter()
                    .zip(&k)
                    .zip(&scale)
                    .map(|((&y, &ki), &sc)| (y * ki % e) * sc % e)
                    .sum::<u64>()
                    % e
            })
            .collect();
        if seen.insert(key) {
            chars.push(k.clone());
            if chars.len() as u64 == order {
                break;
            }
        }
        for (i, ki) in k.iter_mut().enumerate() {
            *ki += 1;
            if *ki < moduli[i] {
                break;
            }
            *ki = 0;
        }
    }
    if chars.len() as u64 != order {
        return None;
    }
    // support elements and their exponent under each character
    let mut support: Vec<u32> = b.entries.iter().flatten().map(|&(g, _)| g).collect();
    support.sort_unstable();
    support.dedup();
    let pos: HashMap<u32, usize> = support.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let coords: Vec<&Vec<u32>> = support.iter().map(|&g| &t.elements[g as usize]).collect();
    let primes = random_primes(policy.probes.max(1), policy.seed, |q| {
        (q - 1) % e == 0 && !order.is_multiple_of(q)
    });
    let rank = primes
        .iter()
        .map(|&q| {
            let w = root_of_unity(e, q, policy.seed);
            let powers: Vec<u64> = {
                let mut v = Vec::with_capacity(e as usize);
                let mut x = 1u64;
                for _ in 0..e {
                    v.push(x);
                    x = mul_mod(x, w, q);
                }
                v
            };
            chars
                .par_iter()
                .map(|k| {
                    let val: Vec<u64> = coords
                        .iter()
                        .map(|y| {
                            let ex = y
                                .iter()
                                .zip(k)
                                .zip(&scale)
                                .map(|((&yi, &ki), &sc)| (yi as u64 * ki % e) * sc % e)
                                .sum::<u64>()
                                % e;
                            powers[ex as usize]
                        })
                        .collect();
                    let mut d: Vec<Vec<u64>> = (0..b.rows)
                        .map(|i| {
                            (0..b.cols)
                                .map(|j| {
                                    b.get(i, j).iter().fold(0u64, |acc, &(g, c)| {
                                        (acc + mul_mod(reduce(c, q), val[pos[&g]], q)) % q
                                    })
                                })
                                .collect()
                        })
                        .collect();
                    dense_rank_mod(&mut d, q)
                })
                .sum::<usize>()
        })
        .max()
        .unwrap_or(0);
    Some(RankResult {
        rank,
        certainty: Certainty::Probabilistic,
        primes,
    })
}

/// Rank of the regular representation of `b` after `unit_shrink`, via
/// characters when possible and the integer matrix otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RankMethod {
    #[default]
    Auto,
    Regular,
    Characters,
}

pub fn group_matrix_rank(
    b: &ZLMatrix,
    t: &SubgroupTable,
    shrink: bool,
    method: RankMethod,
    policy: &RankPolicy,
) -> Result<RankResult> {
    let (m, pivots) = if shrink {
        unit_shrink(b, t)?
    } else {
        (b.clone(), 0)
    };
    let base = pivots * t.order();
    let use_chars = match method {
        RankMethod::Regular => false,
        RankMethod::Characters => true,
        RankMethod::Auto => !policy.exact && t.abelian.is_some(),
    };
    if m.rows == 0 || m.cols == 0 {
        return Ok(RankResult {
            rank: base,
            certainty: Certainty::Certified,
            primes: vec![],
        });
    }
    if use_chars {
        if let Some(r) = rank_by_characters(&m, t, policy) {
            return Ok(RankResult {
                rank: base + r.rank,
                ..r
            });
        }
        if method == RankMethod::Characters {
            return Err(Error::Unsupported(
                "character rank needs an abelian subgroup of enumerable size".into(),
            ));
        }
    }
    let big = crate::quotient::regular_action_matrix(&m, t)?;
    let r = rank_rational(&big, policy);
    Ok(RankResult {
        rank: base + r.rank,
        ..r
    })
}
