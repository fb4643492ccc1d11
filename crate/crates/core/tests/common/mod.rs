//! Independent oracles shared by integration tests.
//!
//! Commutative Laurent matrices over Z² = ⟨t, s⟩ are handled here with a
//! plain bivariate polynomial type and a cofactor determinant; nothing from
//! the library is used to compute expected values.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use l2chi::{GroupRingElement, Presentation, RingMatrix, Word};

/// `Σ c · t^i s^j` keyed by `(i, j)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bi(pub BTreeMap<(i64, i64), i128>);

impl Bi {
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add_term(&mut self, k: (i64, i64), c: i128) {
        let e = self.0.entry(k).or_insert(0);
        *e += c;
        if *e == 0 {
            self.0.remove(&k);
        }
    }

    pub fn add(&self, o: &Bi) -> Bi {
        let mut r = self.clone();
        for (&k, &c) in &o.0 {
            r.add_term(k, c);
        }
        r
    }

    pub fn neg(&self) -> Bi {
        Bi(self.0.iter().map(|(&k, &c)| (k, -c)).collect())
    }

    pub fn mul(&self, o: &Bi) -> Bi {
        let mut r = Bi::default();
        for (&(a, b), &c) in &self.0 {
            for (&(x, y), &d) in &o.0 {
                r.add_term((a + x, b + y), c * d);
            }
        }
        r
    }

    /// Lowest power of `t`.
    pub fn t_order(&self) -> Option<i64> {
        self.0.keys().map(|k| k.0).min()
    }

    /// Width of the `s`-exponent range of the lowest `t`-coefficient.
    pub fn low_coeff_s_span(&self) -> i64 {
        let Some(o) = self.t_order() else { return 0 };
        let js: Vec<i64> = self.0.keys().filter(|k| k.0 == o).map(|k| k.1).collect();
        js.iter().max().unwrap() - js.iter().min().unwrap()
    }
}

/// Cofactor determinant.
pub fn det(m: &[Vec<Bi>]) -> Bi {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Bi::default();
    for j in 0..n {
        let minor: Vec<Vec<Bi>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = m[0][j].mul(&det(&minor));
        acc = if j % 2 == 0 {
            acc.add(&term)
        } else {
            acc.add(&term.neg())
        };
    }
    acc
}

/// Random matrix with `t`-exponents in `0..=deg` and `s`-exponents in
/// `-s_range..=s_range`, small coefficients, and a nonzero determinant.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, deg: i64, s_range: i64) -> Vec<Vec<Bi>> {
    loop {
        let m: Vec<Vec<Bi>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let mut e = Bi::default();
                        for _ in 0..rng.gen_range(1..=3) {
                            let i = rng.gen_range(0..=deg);
                            let j = rng.gen_range(-s_range..=s_range);
                            let c = rng.gen_range(-2i128..=2);
                            e.add_term((i, j), c);
                        }
                        e
                    })
                    .collect()
            })
            .collect();
        // every row needs a nonzero entry for normalization
        if m.iter().all(|r| r.iter().any(|x| !x.is_zero())) && !det(&m).is_zero() {
            return m;
        }
    }
}

/// `⟨t, s | t s t⁻¹ s⁻¹⟩`.
pub fn z2() -> Presentation {
    Presentation::with_names(vec!['t', 's'], vec![Word::from_letters(&[1, 2, -1, -2])])
}

pub fn to_ring(m: &[Vec<Bi>]) -> RingMatrix {
    let n = m.len();
    let mut r = RingMatrix::zeros(n, n);
    for (i, row) in m.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let mut x = GroupRingElement::zero();
            for (&(a, b), &c) in &e.0 {
                let w = Word::from_syllables(vec![(0, a), (1, b)]);
                x.add_term(w, BigInt::from(c));
            }
            r.set(i, j, x);
        }
    }
    r
}
