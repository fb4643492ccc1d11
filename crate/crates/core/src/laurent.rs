//! Laurent polynomials over the integers, exact division and bivariate gcd,
//! and Alexander polynomials of two-generator presentations.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fox::fox_derivative;
use crate::presentation::{abelianize, Presentation};
use crate::ring::GroupRingElement;

/// A Laurent polynomial in `nvars` commuting variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<i64>, BigInt>,
    /// Display names, one per variable.
    pub names: Vec<String>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
            names: (1..=nvars).map(|i| format!("t{i}")).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Vec<i64>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn monomial_minus_one(nvars: usize, e: Vec<i64>) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(e, BigInt::one());
        p.add_term(vec![0; nvars], -BigInt::one());
        p
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        out.names = self.names.clone();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// Multiplies by a unit so that every exponent is ≥ 0 and each variable
    /// attains exponent 0, with a positive leading coefficient.
    pub fn normalized(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mins: Vec<i64> = (0..self.nvars)
            .map(|k| self.terms.keys().map(|e| e[k]).min().unwrap())
            .collect();
        let mut out = Self::zero(self.nvars);
        out.names = self.names.clone();
        for (e, c) in &self.terms {
            out.add_term(e.iter().zip(&mins).map(|(a, m)| a - m).collect(), c.clone());
        }
        if out.terms.iter().next_back().unwrap().1.is_negative() {
            for c in out.terms.values_mut() {
                *c = -&*c;
            }
        }
        out
    }

    /// `max − min` of `φ·e` over the support, with `φ` given on the variables.
    pub fn thickness(&self, phi: &[i64]) -> i64 {
        let vals: Vec<i64> = self
            .terms
            .keys()
            .map(|e| e.iter().zip(phi).map(|(a, b)| a * b).sum())
            .collect();
        match (vals.iter().min(), vals.iter().max()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0,
        }
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        self.names = names;
        self
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // graded order: total degree, then lexicographic
        let mut ts: Vec<(&Vec<i64>, &BigInt)> = self.terms.iter().collect();
        ts.sort_by_key(|(e, _)| (e.iter().sum::<i64>(), (*e).clone()));
        for (i, (e, c)) in ts.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let a = c.abs();
            let mono: String = e
                .iter()
                .zip(&self.names)
                .filter(|(&k, _)| k != 0)
                .map(|(&k, n)| {
                    if k == 1 {
                        n.clone()
                    } else {
                        format!("{n}^{k}")
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                f.write_str(&mono)?;
            } else {
                write!(f, "{a}*{mono}")?;
            }
        }
        Ok(())
    }
}

type UPoly = Vec<BigInt>;

fn utrim(mut p: UPoly) -> UPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn umul(a: &UPoly, b: &UPoly) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    utrim(out)
}

fn usub(a: &UPoly, b: &UPoly) -> UPoly {
    let n = a.len().max(b.len());
    utrim(
        (0..n)
            .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
            .collect(),
    )
}

fn ucontent(a: &UPoly) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Exact division in `Z[t]`; `None` if it does not divide.
fn udiv_exact(a: &UPoly, b: &UPoly) -> Option<UPoly> {
    let b = utrim(b.clone());
    if b.is_empty() {
        return None;
    }
    let mut r = utrim(a.clone());
    if r.is_empty() {
        return Some(vec![]);
    }
    if r.len() < b.len() {
        return None;
    }
    let mut q = vec![BigInt::zero(); r.len() - b.len() + 1];
    let lb = b.last().unwrap().clone();
    while !r.is_empty() && r.len() >= b.len() {
        let lr = r.last().unwrap().clone();
        if !lr.is_multiple_of(&lb) {
            return None;
        }
        let c = lr / &lb;
        let s = r.len() - b.len();
        for (i, y) in b.iter().enumerate() {
            r[s + i] -= &c * y;
        }
        q[s] = c;
        r = utrim(r);
    }
    if r.is_empty() {
        Some(utrim(q))
    } else {
        None
    }
}

/// Pseudo-remainder of `a` by `b` in `Z[t]`.
fn uprem(a: &UPoly, b: &UPoly) -> UPoly {
    let mut r = utrim(a.clone());
    let lb = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let lr = r.last().unwrap().clone();
        let s = r.len() - b.len();
        r = r.iter().map(|x| x * &lb).collect();
        for (i, y) in b.iter().enumerate() {
            r[s + i] -= &lr * y;
        }
        r = utrim(r);
    }
    r
}

fn uprimitive(a: &UPoly) -> UPoly {
    let c = ucontent(a);
    if c.is_zero() {
        return vec![];
    }
    let mut p: UPoly = a.iter().map(|x| x / &c).collect();
    if p.last().is_some_and(|x| x.is_negative()) {
        p = p.iter().map(|x| -x).collect();
    }
    p
}

/// Gcd in `Z[t]` with positive leading coefficient.
fn ugcd(a: &UPoly, b: &UPoly) -> UPoly {
    let a = utrim(a.clone());
    let b = utrim(b.clone());
    if a.is_empty() {
        return uprimitive(&b)
            .into_iter()
            .map(|x| x * ucontent(&b))
            .collect::<Vec<_>>();
    }
    if b.is_empty() {
        return uprimitive(&a)
            .into_iter()
            .map(|x| x * ucontent(&a))
            .collect::<Vec<_>>();
    }
    let c = ucontent(&a).gcd(&ucontent(&b));
    let (mut x, mut y) = (uprimitive(&a), uprimitive(&b));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = uprem(&x, &y);
        x = y;
        y = uprimitive(&r);
    }
    x.into_iter().map(|v| v * &c).collect()
}

/// Bivariate polynomial: coefficients in `Z[t1]` of powers of `t2`.
type BPoly = Vec<UPoly>;

fn btrim(mut p: BPoly) -> BPoly {
    while p.last().is_some_and(|c| c.is_empty()) {
        p.pop();
    }
    p
}

fn bcontent(a: &BPoly) -> UPoly {
    a.iter().fold(vec![], |g, c| ugcd(&g, c))
}

fn bdiv_by_u(a: &BPoly, c: &UPoly) -> BPoly {
    a.iter()
        .map(|x| udiv_exact(x, c).expect("content divides every coefficient"))
        .collect()
}

fn bprimitive(a: &BPoly) -> BPoly {
    let c = bcontent(a);
    if c.is_empty() {
        return vec![];
    }
    bdiv_by_u(a, &c)
}

fn bprem(a: &BPoly, b: &BPoly) -> BPoly {
    let mut r = btrim(a.clone());
    let lb = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let lr = r.last().unwrap().clone();
        let s = r.len() - b.len();
        r = r.iter().map(|x| umul(x, &lb)).collect();
        for (i, y) in b.iter().enumerate() {
            r[s + i] = usub(&r[s + i], &umul(&lr, y));
        }
        r = btrim(r);
    }
    r
}

/// Gcd in `Z[t1, t2]`, up to sign.
fn bgcd(a: &BPoly, b: &BPoly) -> BPoly {
    let a = btrim(a.clone());
    let b = btrim(b.clone());
    if a.is_empty() {
        return b;
    }
    if b.is_empty() {
        return a;
    }
    let c = ugcd(&bcontent(&a), &bcontent(&b));
    let (mut x, mut y) = (bprimitive(&a), bprimitive(&b));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = bprem(&x, &y);
        x = y;
        y = bprimitive(&r);
    }
    x.iter().map(|u| umul(u, &c)).collect()
}

/// Exact division in `Z[t1, t2]`.
fn bdiv_exact(a: &BPoly, b: &BPoly) -> Option<BPoly> {
    let b = btrim(b.clone());
    let mut r = btrim(a.clone());
    if b.is_empty() {
        return None;
    }
    if r.is_empty() {
        return Some(vec![]);
    }
    if r.len() < b.len() {
        return None;
    }
    let mut q: BPoly = vec![vec![]; r.len() - b.len() + 1];
    let lb = b.last().unwrap().clone();
    while !r.is_empty() && r.len() >= b.len() {
        let c = udiv_exact(r.last().unwrap(), &lb)?;
        let s = r.len() - b.len();
        for (i, y) in b.iter().enumerate() {
            r[s + i] = usub(&r[s + i], &umul(&c, y));
        }
        q[s] = c;
        r = btrim(r);
    }
    if r.is_empty() {
        Some(btrim(q))
    } else {
        None
    }
}

/// Converts a Laurent polynomial in at most two variables into a polynomial,
/// returning the shift that was applied.
fn to_bpoly(p: &LaurentPoly) -> (BPoly, Vec<i64>) {
    let n = p.nvars;
    let mins: Vec<i64> = (0..n)
        .map(|k| p.terms.keys().map(|e| e[k]).min().unwrap_or(0))
        .collect();
    let mut out: BPoly = vec![];
    for (e, c) in &p.terms {
        let i1 = (e[0] - mins[0]) as usize;
        let i2 = if n == 2 { (e[1] - mins[1]) as usize } else { 0 };
        if out.len() <= i2 {
            out.resize(i2 + 1, vec![]);
        }
        if out[i2].len() <= i1 {
            out[i2].resize(i1 + 1, BigInt::zero());
        }
        out[i2][i1] += c;
    }
    (btrim(out.into_iter().map(utrim).collect()), mins)
}

fn from_bpoly(b: &BPoly, nvars: usize, shift: &[i64]) -> LaurentPoly {
    let mut p = LaurentPoly::zero(nvars);
    for (i2, u) in b.iter().enumerate() {
        for (i1, c) in u.iter().enumerate() {
            let mut e = vec![i1 as i64 + shift[0]];
            if nvars == 2 {
                e.push(i2 as i64 + shift[1]);
            }
            p.add_term(e, c.clone());
        }
    }
    p
}

/// Gcd of Laurent polynomials in one or two variables, up to units.
pub fn laurent_gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    assert!(a.nvars <= 2 && a.nvars == b.nvars);
    let (x, _) = to_bpoly(a);
    let (y, _) = to_bpoly(b);
    let g = bgcd(&x, &y);
    from_bpoly(&g, a.nvars, &vec![0; a.nvars])
        .normalized()
        .with_names(a.names.clone())
}

/// Exact quotient `a / b` up to units, or `None`.
pub fn laurent_div(a: &LaurentPoly, b: &LaurentPoly) -> Option<LaurentPoly> {
    assert!(a.nvars <= 2 && a.nvars == b.nvars);
    let (x, sx) = to_bpoly(a);
    let (y, sy) = to_bpoly(b);
    let q = bdiv_exact(&x, &y)?;
    let shift: Vec<i64> = sx.iter().zip(&sy).map(|(p, q)| p - q).collect();
    Some(from_bpoly(&q, a.nvars, &shift).with_names(a.names.clone()))
}

/// The Alexander polynomial of a presentation with two generators and at
/// least one relator, as a Laurent polynomial on the free part of the
/// abelianization (variables named after the generators when the free part
/// is generated by them directly).
///
/// For each relator `r`, the abelianized Fox derivatives satisfy
/// `D_a (t_a − 1) + D_b (t_b − 1) = 0`; the quotient `D_a · g / (t_b − 1)`
/// (with `g = t − 1` when the free rank is one) is computed exactly, and the
/// result is the gcd over relators.
pub fn alexander_polynomial(p: &Presentation) -> Result<LaurentPoly> {
    if p.rank != 2 || p.relators.is_empty() {
        return Err(Error::Input(
            "Alexander polynomial needs two generators and at least one relator".into(),
        ));
    }
    let ab = abelianize(p);
    let free = ab.free_coords();
    let f = free.len();
    if f == 0 {
        return Err(Error::Input("abelianization has free rank 0".into()));
    }
    let img: Vec<Vec<i64>> = (0..2)
        .map(|j| {
            free.iter()
                .map(|&k| ab.gen_images[j][k].to_i64().unwrap())
                .collect()
        })
        .collect();
    let names: Vec<String> = if f == 2 && img[0] == vec![1, 0] && img[1] == vec![0, 1] {
        p.names.iter().map(|c| c.to_string()).collect()
    } else if f == 1 {
        vec!["t".to_string()]
    } else {
        (1..=f).map(|i| format!("t{i}")).collect()
    };
    let abelianized = |x: &GroupRingElement| -> LaurentPoly {
        let mut out = LaurentPoly::zero(f).with_names(names.clone());
        for (w, c) in x.terms() {
            let e = w.exponent_sums(2);
            let v: Vec<i64> = (0..f)
                .map(|k| e[0] * img[0][k] + e[1] * img[1][k])
                .collect();
            out.add_term(v, c.clone());
        }
        out
    };
    // divide by (t_b − 1) where b is a generator with nonzero image
    let (num_gen, den_gen) = if img[1].iter().any(|&x| x != 0) {
        (0, 1)
    } else {
        (1, 0)
    };
    let den = LaurentPoly::monomial_minus_one(f, img[den_gen].clone()).with_names(names.clone());
    let mut acc: Option<LaurentPoly> = None;
    for r in &p.relators {
        let mut d = abelianized(&fox_derivative(r, num_gen));
        if f == 1 {
            d = d.mul(&LaurentPoly::monomial_minus_one(1, vec![1]));
        }
        let q = laurent_div(&d, &den)
            .ok_or_else(|| Error::Internal("abelianized Fox derivative is not divisible".into()))?;
        acc = Some(match acc {
            None => q.normalized(),
            Some(g) => laurent_gcd(&g, &q),
        });
    }
    let delta = acc.unwrap();
    if delta.is_zero() {
        return Err(Error::Input("Alexander polynomial is zero".into()));
    }
    Ok(delta.normalized())
}

/// Character values on the free coordinates used by [`alexander_polynomial`],
/// from images on the generators.
pub fn phi_on_free_part(p: &Presentation, phi: &[i64]) -> Result<Vec<i64>> {
    let ab = abelianize(p);
    let free = ab.free_coords();
    // phi(gen_j) = Σ_k V[j][k] c_k over free k; solve for c
    let r = p.rank;
    let mut a: Vec<Vec<BigRational>> = (0..r)
        .map(|j| {
            let mut row: Vec<BigRational> = free
                .iter()
                .map(|&k| BigRational::from_integer(ab.gen_images[j][k].clone()))
                .collect();
            row.push(BigRational::from_integer(BigInt::from(phi[j])));
            row
        })
        .collect();
    let f = free.len();
    let mut piv_row = 0;
    let mut pivots = vec![];
    for col in 0..f {
        let Some(pr) = (piv_row..r).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(piv_row, pr);
        let pv = a[piv_row][col].clone();
        for x in a[piv_row].iter_mut() {
            *x = &*x / &pv;
        }
        for i in 0..r {
            if i != piv_row && !a[i][col].is_zero() {
                let fct = a[i][col].clone();
                let src = a[piv_row].clone();
                for (x, y) in a[i].iter_mut().zip(&src) {
                    *x -= &fct * y;
                }
            }
        }
        pivots.push(col);
        piv_row += 1;
    }
    if a[piv_row..].iter().any(|row| !row[f].is_zero()) {
        return Err(Error::InvalidCharacter { relator: 0 });
    }
    let mut c = vec![0i64; f];
    for (i, &col) in pivots.iter().enumerate() {
        let v = &a[i][f];
        if !v.is_integer() {
            return Err(Error::Internal("non-integral character coordinates".into()));
        }
        c[col] = v
            .to_integer()
            .to_i64()
            .ok_or(Error::Overflow("character"))?;
    }
    Ok(c)
}
