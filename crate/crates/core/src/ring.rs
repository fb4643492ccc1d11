//! The integral group ring of a free group.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::word::Word;

/// A finite integer combination of reduced words. No zero coefficients are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GroupRingElement {
    terms: BTreeMap<Word, BigInt>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_word(Word::identity())
    }

    pub fn from_word(w: Word) -> Self {
        Self::monomial(BigInt::one(), w)
    }

    pub fn monomial(c: BigInt, w: Word) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        Self { terms }
    }

    pub fn from_int(c: i64) -> Self {
        Self::monomial(BigInt::from(c), Word::identity())
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, BigInt)>>(it: I) -> Self {
        let mut out = Self::zero();
        for (w, c) in it {
            out.add_term(w, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> BigInt {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    /// If the element is `±w` for a single word, returns the sign and word.
    pub fn as_signed_word(&self) -> Option<(i64, &Word)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (w, c) = self.terms.iter().next().unwrap();
        if c.is_one() {
            Some((1, w))
        } else if (-c).is_one() {
            Some((-1, w))
        } else {
            None
        }
    }

    pub fn add_term(&mut self, w: Word, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c.clone());
        }
    }

    pub fn sub_assign_ref(&mut self, other: &Self) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), -c);
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c * k)).collect(),
        }
    }

    /// Ring product, the bilinear extension of word concatenation.
    pub fn mul_ref(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                out.add_term(w1.concat(w2), c1 * c2);
            }
        }
        out
    }

    /// `self · w` for a single word.
    pub fn mul_word_right(&self, w: &Word) -> Self {
        Self::from_terms(self.terms.iter().map(|(v, c)| (v.concat(w), c.clone())))
    }

    /// `w · self` for a single word.
    pub fn mul_word_left(&self, w: &Word) -> Self {
        Self::from_terms(self.terms.iter().map(|(v, c)| (w.concat(v), c.clone())))
    }

    /// Integer power; negative exponents are allowed only for `±w`.
    pub fn pow(&self, k: i64) -> Option<Self> {
        if k < 0 {
            let (s, w) = self.as_signed_word()?;
            let sign = if s < 0 && k % 2 != 0 { -1 } else { 1 };
            return Some(Self::monomial(BigInt::from(sign), w.pow(k)));
        }
        let mut out = Self::one();
        for _ in 0..k {
            out = out.mul_ref(self);
        }
        Some(out)
    }

    /// Anti-involution `Σ c_w w ↦ Σ c_w w^{-1}`.
    pub fn adjoint(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.inverse(), c.clone()))
                .collect(),
        }
    }

    /// Augmentation: sum of coefficients.
    pub fn augmentation(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Sum of absolute values of coefficients.
    pub fn l1_norm(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Applies `f` to every word, collecting like terms.
    pub fn map_words<F: FnMut(&Word) -> Word>(&self, mut f: F) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| (f(w), c.clone())))
    }

    /// Min and max of the character weight over the support, `None` for zero.
    pub fn weight_range(&self, images: &[i64]) -> Option<(i64, i64)> {
        let mut it = self.terms.keys().map(|w| w.weight(images));
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x))))
    }

    pub fn display_with(&self, names: &[char]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            if w.is_identity() {
                s.push_str(&a.to_string());
            } else {
                if !a.is_one() {
                    s.push_str(&a.to_string());
                    s.push('*');
                }
                s.push_str(&w.display_with(names));
            }
        }
        s
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&[]))
    }
}

impl From<Word> for GroupRingElement {
    fn from(w: Word) -> Self {
        Self::from_word(w)
    }
}

impl Add for &GroupRingElement {
    type Output = GroupRingElement;
    fn add(self, rhs: Self) -> GroupRingElement {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &GroupRingElement {
    type Output = GroupRingElement;
    fn sub(self, rhs: Self) -> GroupRingElement {
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }
}

impl Mul for &GroupRingElement {
    type Output = GroupRingElement;
    fn mul(self, rhs: Self) -> GroupRingElement {
        self.mul_ref(rhs)
    }
}

impl Neg for &GroupRingElement {
    type Output = GroupRingElement;
    fn neg(self) -> GroupRingElement {
        self.scale(&BigInt::from(-1))
    }
}

/// Convenience form of [`GroupRingElement::mul_ref`].
pub fn ring_mul(x: &GroupRingElement, y: &GroupRingElement) -> GroupRingElement {
    x.mul_ref(y)
}

/// Convenience form of [`GroupRingElement::adjoint`].
pub fn adjoint(x: &GroupRingElement) -> GroupRingElement {
    x.adjoint()
}

/// A dense matrix of group-ring elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<GroupRingElement>,
}

impl RingMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![GroupRingElement::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, GroupRingElement::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GroupRingElement>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Self {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &GroupRingElement {
        &self.entries[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut GroupRingElement {
        &mut self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: GroupRingElement) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[GroupRingElement] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let p = a.mul_ref(b);
                        out.get_mut(i, j).add_assign_ref(&p);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).adjoint());
            }
        }
        out
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.rows == self.cols && *self == self.adjoint()
    }

    /// Reorders rows and columns by the same permutation: entry `(i,j)` of the
    /// result is entry `(perm[i], perm[j])` of `self`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(perm[i], perm[j]).clone());
            }
        }
        out
    }
}
