//! Finite quotients, subgroup tables and the regular representation.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fox::ChainComplex;
use crate::presentation::{abelianize, Presentation};
use crate::ring::{GroupRingElement, RingMatrix};
use crate::smith::hermite_rows;
use crate::word::Word;

/// An element of a finite quotient: coordinates for abelian quotients, point
/// images for permutation quotients.
pub type QElem = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuotientKind {
    /// `Z/m_0 × … × Z/m_{k-1}`; an empty modulus list is the trivial group.
    Abelian { moduli: Vec<u64> },
    /// Permutations of `{0, …, degree-1}` acting on the right.
    Permutation { degree: usize },
}

/// A homomorphism from a presented group onto a finite group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuotient {
    pub kind: QuotientKind,
    pub gen_images: Vec<QElem>,
    pub label: String,
}

impl fmt::Display for FiniteQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl FiniteQuotient {
    pub fn trivial(rank: usize) -> Self {
        FiniteQuotient {
            kind: QuotientKind::Abelian { moduli: vec![] },
            gen_images: vec![vec![]; rank],
            label: "trivial".into(),
        }
    }

    pub fn is_abelian(&self) -> bool {
        matches!(self.kind, QuotientKind::Abelian { .. })
    }

    pub fn identity(&self) -> QElem {
        match &self.kind {
            QuotientKind::Abelian { moduli } => vec![0; moduli.len()],
            QuotientKind::Permutation { degree } => (0..*degree as u32).collect(),
        }
    }

    pub fn mul(&self, x: &QElem, y: &QElem) -> QElem {
        match &self.kind {
            QuotientKind::Abelian { moduli } => x
                .iter()
                .zip(y)
                .zip(moduli)
                .map(|((&a, &b), &m)| ((a as u64 + b as u64) % m) as u32)
                .collect(),
            QuotientKind::Permutation { .. } => x.iter().map(|&i| y[i as usize]).collect(),
        }
    }

    pub fn inv(&self, x: &QElem) -> QElem {
        match &self.kind {
            QuotientKind::Abelian { moduli } => x
                .iter()
                .zip(moduli)
                .map(|(&a, &m)| ((m - a as u64) % m) as u32)
                .collect(),
            QuotientKind::Permutation { .. } => {
                let mut out = vec![0u32; x.len()];
                for (i, &j) in x.iter().enumerate() {
                    out[j as usize] = i as u32;
                }
                out
            }
        }
    }

    fn pow(&self, x: &QElem, e: i64) -> QElem {
        match &self.kind {
            QuotientKind::Abelian { moduli } => x
                .iter()
                .zip(moduli)
                .map(|(&a, &m)| (a as i128 * e as i128).rem_euclid(m as i128) as u32)
                .collect(),
            QuotientKind::Permutation { .. } => {
                let base = if e < 0 { self.inv(x) } else { x.clone() };
                let mut out = self.identity();
                let mut b = base;
                let mut k = e.unsigned_abs();
                while k > 0 {
                    if k & 1 == 1 {
                        out = self.mul(&out, &b);
                    }
                    b = self.mul(&b, &b);
                    k >>= 1;
                }
                out
            }
        }
    }

    pub fn eval(&self, w: &Word) -> QElem {
        let mut out = self.identity();
        for (g, e) in w.syllables() {
            let x = self.pow(&self.gen_images[g], e);
            out = self.mul(&out, &x);
        }
        out
    }

    fn check_relators(&self, p: &Presentation) -> Result<()> {
        let id = self.identity();
        for (i, r) in p.relators.iter().enumerate() {
            if self.eval(r) != id {
                return Err(Error::InvalidQuotient { relator: i });
            }
        }
        Ok(())
    }

    /// Order of the image group, by closure for permutation quotients.
    pub fn order(&self, limit: usize) -> Result<usize> {
        match &self.kind {
            QuotientKind::Abelian { .. } => {
                let gens: Vec<Word> = (0..self.gen_images.len()).map(Word::gen).collect();
                Ok(subgroup_closure(self, &gens, limit)?.order())
            }
            QuotientKind::Permutation { .. } => {
                Ok(bfs_closure(self, &self.gen_images, limit)?.len())
            }
        }
    }

    /// Image of a group-ring element in the group algebra of the quotient.
    pub fn eval_element(&self, x: &GroupRingElement) -> HashMap<QElem, BigInt> {
        let mut out: HashMap<QElem, BigInt> = HashMap::new();
        for (w, c) in x.terms() {
            *out.entry(self.eval(w)).or_default() += c;
        }
        out.retain(|_, c| !c.is_zero());
        out
    }
}

/// `ab(G) ⊗ Z/p^c` for each listed prime power, as one product quotient.
pub fn abelian_quotient(p: &Presentation, prime_powers: &[(u64, u32)]) -> Result<FiniteQuotient> {
    let ab = abelianize(p);
    let mut moduli = Vec::new();
    let mut cols: Vec<(usize, u64)> = Vec::new();
    for &(q, c) in prime_powers {
        if q < 2 || !is_prime_u64(q) || c == 0 {
            return Err(Error::Input(format!("{q}^{c} is not a prime power")));
        }
        let qc = q
            .checked_pow(c)
            .filter(|&x| x < u32::MAX as u64)
            .ok_or(Error::Overflow("prime power"))?;
        for (k, m) in ab.moduli.iter().enumerate() {
            let md = if m.is_zero() {
                qc
            } else {
                m.gcd(&BigInt::from(qc)).to_u64().unwrap()
            };
            if md > 1 {
                moduli.push(md);
                cols.push((k, md));
            }
        }
    }
    let gen_images = (0..p.rank)
        .map(|j| {
            cols.iter()
                .map(|&(k, md)| {
                    let x: BigInt = ab.gen_images[j][k].mod_floor(&BigInt::from(md));
                    x.to_u32().unwrap()
                })
                .collect()
        })
        .collect();
    let label = if prime_powers.is_empty() {
        "trivial".to_string()
    } else {
        let parts: Vec<String> = prime_powers
            .iter()
            .map(|(q, c)| format!("{q}^{c}"))
            .collect();
        format!("abelian:{}", parts.join(","))
    };
    let q = FiniteQuotient {
        kind: QuotientKind::Abelian { moduli },
        gen_images,
        label,
    };
    q.check_relators(p)?;
    Ok(q)
}

/// Validates user-supplied permutations (0-based point images).
pub fn perm_quotient(p: &Presentation, images: Vec<Vec<u32>>) -> Result<FiniteQuotient> {
    if images.len() != p.rank {
        return Err(Error::Input(format!(
            "{} permutations for {} generators",
            images.len(),
            p.rank
        )));
    }
    let degree = images.iter().map(|x| x.len()).max().unwrap_or(0).max(1);
    let mut gen_images = Vec::new();
    for im in images {
        let mut full: Vec<u32> = im.clone();
        full.extend(im.len() as u32..degree as u32);
        let mut seen = vec![false; degree];
        for &x in &full {
            if x as usize >= degree || seen[x as usize] {
                return Err(Error::Input("image list is not a permutation".into()));
            }
            seen[x as usize] = true;
        }
        gen_images.push(full);
    }
    let q = FiniteQuotient {
        kind: QuotientKind::Permutation { degree },
        gen_images,
        label: format!("perm:S{degree}"),
    };
    q.check_relators(p)?;
    Ok(q)
}

/// Parses one permutation in 1-based cycle notation such as `(1,2)(3,4,5)`;
/// `()` is the identity.
pub fn parse_cycles(s: &str, degree: usize) -> Result<Vec<u32>> {
    let bad = || Error::Input(format!("bad cycle notation {s:?}"));
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let r = rest.strip_prefix('(').ok_or_else(bad)?;
        let end = r.find(')').ok_or_else(bad)?;
        let body = r[..end].trim();
        if !body.is_empty() {
            let pts = body
                .split([',', ' '])
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().ok().filter(|&x| x >= 1).ok_or_else(bad))
                .collect::<Result<Vec<_>>>()?;
            cycles.push(pts);
        }
        rest = r[end + 1..].trim_start();
    }
    let n = cycles
        .iter()
        .flatten()
        .copied()
        .max()
        .unwrap_or(0)
        .max(degree);
    let mut perm: Vec<u32> = (0..n as u32).collect();
    let mut seen = HashSet::new();
    for c in &cycles {
        for (k, &x) in c.iter().enumerate() {
            if !seen.insert(x) {
                return Err(bad());
            }
            perm[x - 1] = (c[(k + 1) % c.len()] - 1) as u32;
        }
    }
    Ok(perm)
}

fn bfs_closure(q: &FiniteQuotient, gens: &[QElem], limit: usize) -> Result<Vec<QElem>> {
    let id = q.identity();
    let mut seen: HashSet<QElem> = HashSet::new();
    seen.insert(id.clone());
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = q.mul(&x, g);
            if seen.insert(y.clone()) {
                if seen.len() > limit {
                    return Err(Error::SizeLimit(format!(
                        "subgroup closure exceeds {limit} elements"
                    )));
                }
                out.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(out)
}

/// Result of [`search_quotient`].
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub quotients: Vec<FiniteQuotient>,
    /// Image orders, parallel to `quotients`.
    pub orders: Vec<usize>,
    pub exhausted_budget: bool,
}

/// Enumerates homomorphisms into `S_n` for `n ≤ max_degree`, keeping one
/// representative per conjugacy class of tuples with nontrivial image.
pub fn search_quotient(p: &Presentation, max_degree: usize, budget: u64) -> SearchResult {
    let mut found: Vec<(usize, usize, Vec<QElem>)> = Vec::new();
    let mut exhausted = false;
    let mut spent: u64 = 0;
    for n in 2..=max_degree {
        let perms = all_perms(n);
        let np = perms.len() as u64;
        let total = np.checked_pow(p.rank as u32).unwrap_or(u64::MAX);
        let allowed = budget.saturating_sub(spent).min(total);
        if allowed < total {
            exhausted = true;
        }
        spent += allowed;
        let q0 = FiniteQuotient {
            kind: QuotientKind::Permutation { degree: n },
            gen_images: vec![],
            label: String::new(),
        };
        let hits: Vec<Vec<QElem>> = (0..allowed)
            .into_par_iter()
            .filter_map(|idx| {
                let mut k = idx;
                let mut tuple = Vec::with_capacity(p.rank);
                for _ in 0..p.rank {
                    tuple.push(perms[(k % np) as usize].clone());
                    k /= np;
                }
                let q = FiniteQuotient {
                    gen_images: tuple,
                    ..q0.clone()
                };
                let id = q.identity();
                if q.gen_images.iter().all(|g| *g == id) {
                    return None;
                }
                if p.relators.iter().any(|r| q.eval(r) != id) {
                    return None;
                }
                Some(canonical_tuple(&q, &perms))
            })
            .collect();
        let mut uniq: Vec<Vec<QElem>> = hits;
        uniq.sort();
        uniq.dedup();
        for t in uniq {
            let q = FiniteQuotient {
                gen_images: t.clone(),
                ..q0.clone()
            };
            let order = bfs_closure(&q, &q.gen_images, usize::MAX).map_or(0, |v| v.len());
            found.push((order, n, t));
        }
        if exhausted {
            break;
        }
    }
    found.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let orders = found.iter().map(|f| f.0).collect();
    let quotients = found
        .into_iter()
        .map(|(ord, n, t)| FiniteQuotient {
            kind: QuotientKind::Permutation { degree: n },
            gen_images: t,
            label: format!("search:S{n},order={ord}"),
        })
        .collect();
    SearchResult {
        quotients,
        orders,
        exhausted_budget: exhausted,
    }
}

fn canonical_tuple(q: &FiniteQuotient, perms: &[QElem]) -> Vec<QElem> {
    perms
        .iter()
        .map(|c| {
            let ci = q.inv(c);
            q.gen_images
                .iter()
                .map(|g| q.mul(&q.mul(&ci, g), c))
                .collect::<Vec<_>>()
        })
        .min()
        .unwrap()
}

fn all_perms(n: usize) -> Vec<QElem> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (0..n as u32).collect();
    permute(&mut cur, 0, &mut out);
    out.sort();
    out
}

fn permute(cur: &mut Vec<u32>, k: usize, out: &mut Vec<QElem>) {
    if k == cur.len() {
        out.push(cur.clone());
        return;
    }
    for i in k..cur.len() {
        cur.swap(k, i);
        permute(cur, k + 1, out);
        cur.swap(k, i);
    }
}

/// Abelian structure of a subgroup `L ≤ Z/m_0 × … × Z/m_{k-1}`: an upper
/// triangular basis with pivots `d_i | m_i`, so every element is uniquely
/// `Σ a_i h_i` with `0 ≤ a_i < m_i / d_i`.
#[derive(Clone, Debug)]
pub struct AbelianSubgroup {
    pub moduli: Vec<u64>,
    pub basis: Vec<Vec<u64>>,
    pub steps: Vec<u64>,
}

/// The subgroup `L` of a finite quotient generated by the images of some
/// words, with a deterministic element order (index 0 is the identity).
#[derive(Clone, Debug)]
pub struct SubgroupTable {
    pub quotient: FiniteQuotient,
    pub elements: Vec<QElem>,
    index: HashMap<QElem, u32>,
    /// Element indices of the stored generators.
    pub gens: Vec<u32>,
    /// For each stored generator, the permutation `h ↦ h·g` of element indices.
    pub right_action: Vec<Vec<u32>>,
    pub abelian: Option<AbelianSubgroup>,
}

impl SubgroupTable {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, x: &QElem) -> Option<u32> {
        self.index.get(x).copied()
    }

    /// Index of the image of `w`, if it lies in `L`.
    pub fn eval(&self, w: &Word) -> Option<u32> {
        self.index_of(&self.quotient.eval(w))
    }

    pub fn mul(&self, i: u32, j: u32) -> u32 {
        let x = self
            .quotient
            .mul(&self.elements[i as usize], &self.elements[j as usize]);
        self.index[&x]
    }

    pub fn inv(&self, i: u32) -> u32 {
        self.index[&self.quotient.inv(&self.elements[i as usize])]
    }

    /// Maps a group-ring element into `ZL`.
    pub fn eval_element(&self, x: &GroupRingElement) -> Result<ZLElem> {
        let mut acc: HashMap<u32, i64> = HashMap::new();
        for (w, c) in x.terms() {
            let i = self
                .eval(w)
                .ok_or_else(|| Error::Internal(format!("support word {w} evaluates outside L")))?;
            let c = c.to_i64().ok_or(Error::Overflow("coefficient"))?;
            let e = acc.entry(i).or_default();
            *e = e.checked_add(c).ok_or(Error::Overflow("coefficient"))?;
        }
        let mut v: ZLElem = acc.into_iter().filter(|&(_, c)| c != 0).collect();
        v.sort_unstable();
        Ok(v)
    }
}

pub fn subgroup_closure(q: &FiniteQuotient, gens: &[Word], limit: usize) -> Result<SubgroupTable> {
    let images: Vec<QElem> = gens.iter().map(|w| q.eval(w)).collect();
    let (mut elements, abelian, gen_elems) = match &q.kind {
        QuotientKind::Abelian { moduli } => {
            let k = moduli.len();
            let mut rows: Vec<Vec<BigInt>> = images
                .iter()
                .map(|x| x.iter().map(|&a| BigInt::from(a)).collect())
                .collect();
            for (i, &m) in moduli.iter().enumerate() {
                let mut r = vec![BigInt::zero(); k];
                r[i] = BigInt::from(m);
                rows.push(r);
            }
            let h = hermite_rows(&rows, k);
            // full rank since m_i e_i are included
            let basis: Vec<Vec<u64>> = h
                .iter()
                .map(|r| {
                    r.iter()
                        .zip(moduli)
                        .map(|(x, &m)| x.mod_floor(&BigInt::from(m)).to_u64().unwrap())
                        .collect()
                })
                .collect();
            let steps: Vec<u64> = (0..k)
                .map(|i| moduli[i] / h[i][i].to_u64().unwrap())
                .collect();
            let total = steps
                .iter()
                .try_fold(1usize, |acc, &s| acc.checked_mul(s as usize))
                .filter(|&t| t <= limit)
                .ok_or_else(|| Error::SizeLimit(format!("subgroup order exceeds {limit}")))?;
            let mut els = Vec::with_capacity(total);
            let mut cur = vec![vec![0u32; k]];
            for i in 0..k {
                let mut next = Vec::with_capacity(cur.len() * steps[i] as usize);
                for x in &cur {
                    let mut y = x.clone();
                    for _ in 0..steps[i] {
                        next.push(y.clone());
                        y = q.mul(&y, &basis[i].iter().map(|&v| v as u32).collect());
                    }
                }
                cur = next;
            }
            els.extend(cur);
            let gen_elems: Vec<QElem> = basis
                .iter()
                .zip(&steps)
                .filter(|(_, &s)| s > 1)
                .map(|(b, _)| b.iter().map(|&v| v as u32).collect())
                .collect();
            (
                els,
                Some(AbelianSubgroup {
                    moduli: moduli.clone(),
                    basis,
                    steps,
                }),
                gen_elems,
            )
        }
        QuotientKind::Permutation { .. } => {
            let mut g = images.clone();
            g.sort();
            g.dedup();
            g.retain(|x| *x != q.identity());
            (bfs_closure(q, &g, limit)?, None, g)
        }
    };
    elements.sort();
    let index: HashMap<QElem, u32> = elements
        .iter()
        .enumerate()
        .map(|(i, x)| (x.clone(), i as u32))
        .collect();
    let gens_idx: Vec<u32> = gen_elems.iter().map(|g| index[g]).collect();
    let right_action = gen_elems
        .iter()
        .map(|g| elements.iter().map(|h| index[&q.mul(h, g)]).collect())
        .collect();
    Ok(SubgroupTable {
        quotient: q.clone(),
        elements,
        index,
        gens: gens_idx,
        right_action,
        abelian,
    })
}

/// An element of `ZL`: sorted `(element index, coefficient)` pairs without zeros.
pub type ZLElem = Vec<(u32, i64)>;

/// A dense matrix over `ZL`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZLMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<ZLElem>,
}

impl ZLMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ZLMatrix {
            rows,
            cols,
            entries: vec![Vec::new(); rows * cols],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &ZLElem {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: ZLElem) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn from_ring_matrix(m: &RingMatrix, t: &SubgroupTable) -> Result<Self> {
        let entries = m
            .entries
            .iter()
            .map(|e| t.eval_element(e))
            .collect::<Result<Vec<_>>>()?;
        Ok(ZLMatrix {
            rows: m.rows,
            cols: m.cols,
            entries,
        })
    }
}

/// Product in `ZL`.
pub fn zl_mul(x: &ZLElem, y: &ZLElem, t: &SubgroupTable) -> Result<ZLElem> {
    let mut acc: HashMap<u32, i64> = HashMap::new();
    for &(g, a) in x {
        for &(h, b) in y {
            let p = a
                .checked_mul(b)
                .ok_or(Error::Overflow("group algebra product"))?;
            let e = acc.entry(t.mul(g, h)).or_default();
            *e = e
                .checked_add(p)
                .ok_or(Error::Overflow("group algebra product"))?;
        }
    }
    let mut v: ZLElem = acc.into_iter().filter(|&(_, c)| c != 0).collect();
    v.sort_unstable();
    Ok(v)
}

/// `x - y` in `ZL`.
pub fn zl_sub(x: &ZLElem, y: &ZLElem) -> Result<ZLElem> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push(x[i]);
            i += 1;
        } else if take_y {
            out.push((
                y[j].0,
                y[j].1.checked_neg().ok_or(Error::Overflow("difference"))?,
            ));
            j += 1;
        } else {
            let c = x[i]
                .1
                .checked_sub(y[j].1)
                .ok_or(Error::Overflow("difference"))?;
            if c != 0 {
                out.push((x[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    Ok(out)
}

/// A sparse integer matrix stored by rows.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseIntMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Each row sorted by column, no zeros.
    pub data: Vec<Vec<(u32, i64)>>,
}

impl SparseIntMatrix {
    pub fn from_dense(d: &[Vec<i64>]) -> Self {
        let rows = d.len();
        let cols = d.first().map_or(0, |r| r.len());
        let data = d
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .map(|(j, &x)| (j as u32, x))
                    .collect()
            })
            .collect();
        SparseIntMatrix { rows, cols, data }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0i64; self.cols]; self.rows];
        for (i, r) in self.data.iter().enumerate() {
            for &(j, x) in r {
                d[i][j as usize] = x;
            }
        }
        d
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![Vec::new(); self.cols];
        for (i, r) in self.data.iter().enumerate() {
            for &(j, x) in r {
                data[j as usize].push((i as u32, x));
            }
        }
        SparseIntMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Text dump as `row col value` lines, 0-based.
    pub fn to_triplets(&self) -> String {
        let mut s = String::new();
        for (i, r) in self.data.iter().enumerate() {
            for &(j, x) in r {
                s.push_str(&format!("{i} {j} {x}\n"));
            }
        }
        s
    }
}

/// Block matrix replacing each entry `Σ c_g g` by `Σ c_g P(g)` with
/// `P(g)[h][h·g] = 1`.
pub fn regular_action_matrix(b: &ZLMatrix, t: &SubgroupTable) -> Result<SparseIntMatrix> {
    let l = t.order();
    let rows = b.rows * l;
    let cols = b.cols * l;
    let mut data: Vec<Vec<(u32, i64)>> = vec![Vec::new(); rows];
    for i in 0..b.rows {
        for h in 0..l {
            let row = &mut data[i * l + h];
            for j in 0..b.cols {
                for &(g, c) in b.get(i, j) {
                    let hg = t.mul(h as u32, g) as usize;
                    row.push(((j * l + hg) as u32, c));
                }
            }
            row.sort_unstable();
        }
    }
    if cols > u32::MAX as usize {
        return Err(Error::SizeLimit("regular representation too large".into()));
    }
    Ok(SparseIntMatrix { rows, cols, data })
}

/// True iff every composite `d_{i+1} d_i` vanishes in the group algebra of `q`.
pub fn validate_boundary(c: &ChainComplex, q: &FiniteQuotient) -> bool {
    let map = |m: &RingMatrix| -> Vec<HashMap<QElem, BigInt>> {
        m.entries.iter().map(|e| q.eval_element(e)).collect()
    };
    for i in 1..c.top_degree() {
        let upper = c.boundary(i + 1);
        let lower = c.boundary(i);
        let a = map(upper);
        let b = map(lower);
        for r in 0..upper.rows {
            for col in 0..lower.cols {
                let mut acc: HashMap<QElem, BigInt> = HashMap::new();
                for k in 0..upper.cols {
                    for (g, x) in &a[r * upper.cols + k] {
                        for (h, y) in &b[k * lower.cols + col] {
                            *acc.entry(q.mul(g, h)).or_default() += x * y;
                        }
                    }
                }
                if acc.values().any(|v| !v.is_zero()) {
                    return false;
                }
            }
        }
    }
    true
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    crate::rank::is_prime(n)
}
