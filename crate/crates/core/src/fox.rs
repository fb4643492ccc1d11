//! Fox calculus, chain complexes, Laplacians and free-by-cyclic presentations.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::ring::{GroupRingElement, RingMatrix};
use crate::word::Word;

/// Fox derivative `∂r/∂x_j` in the free-group ring.
pub fn fox_derivative(r: &Word, j: usize) -> GroupRingElement {
    let mut out = GroupRingElement::zero();
    let mut prefix = Word::identity();
    for (g, e) in r.syllables() {
        let step = Word::gen_pow(g, e.signum());
        for _ in 0..e.unsigned_abs() {
            if g == j {
                if e > 0 {
                    out.add_term(prefix.clone(), BigInt::from(1));
                } else {
                    out.add_term(prefix.concat(&step), BigInt::from(-1));
                }
            }
            prefix.append(&step);
        }
    }
    out
}

/// A chain complex of free modules `ZG^{n_k} → … → ZG^{n_0}` acting by right
/// multiplication on row vectors. `boundaries[i-1]` is `d_i` of shape
/// `n_i × n_{i-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    pub dims: Vec<usize>,
    pub boundaries: Vec<RingMatrix>,
}

impl ChainComplex {
    pub fn new(dims: Vec<usize>, boundaries: Vec<RingMatrix>) -> Result<Self> {
        if dims.is_empty() || boundaries.len() + 1 != dims.len() {
            return Err(Error::Shape(format!(
                "{} boundaries for {} modules",
                boundaries.len(),
                dims.len()
            )));
        }
        for (i, d) in boundaries.iter().enumerate() {
            if d.rows != dims[i + 1] || d.cols != dims[i] {
                return Err(Error::Shape(format!(
                    "d_{} is {}×{}, expected {}×{}",
                    i + 1,
                    d.rows,
                    d.cols,
                    dims[i + 1],
                    dims[i]
                )));
            }
        }
        Ok(ChainComplex { dims, boundaries })
    }

    pub fn top_degree(&self) -> usize {
        self.dims.len() - 1
    }

    /// `d_i` for `1 ≤ i ≤ k`.
    pub fn boundary(&self, i: usize) -> &RingMatrix {
        &self.boundaries[i - 1]
    }

    /// Combinatorial Laplacians `Δ_n = d_n d_n^* + d_{n+1}^* d_{n+1}` for
    /// `n = 0..=k`, with `d_0 = d_{k+1} = 0`.
    pub fn laplacians(&self) -> Vec<RingMatrix> {
        (0..self.dims.len())
            .map(|n| {
                let mut lap = RingMatrix::zeros(self.dims[n], self.dims[n]);
                if n >= 1 {
                    let d = self.boundary(n);
                    lap = lap.add(&d.mul(&d.adjoint()));
                }
                if n < self.top_degree() {
                    let d = self.boundary(n + 1);
                    lap = lap.add(&d.adjoint().mul(d));
                }
                lap
            })
            .collect()
    }

    /// Euler characteristic of the module ranks.
    pub fn rank_euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(i, &n)| if i % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }
}

pub fn laplacians(c: &ChainComplex) -> Vec<RingMatrix> {
    c.laplacians()
}

/// The presentation complex `ZG^m → ZG^r → ZG` with `d_1 = (1 − x_j)` and
/// `d_2` the Fox Jacobian.
pub fn presentation_complex(p: &Presentation) -> ChainComplex {
    let r = p.rank;
    let mut d1 = RingMatrix::zeros(r, 1);
    for j in 0..r {
        let mut e = GroupRingElement::one();
        e.add_term(Word::gen(j), BigInt::from(-1));
        d1.set(j, 0, e);
    }
    let m = p.relators.len();
    let mut d2 = RingMatrix::zeros(m, r);
    for (i, rel) in p.relators.iter().enumerate() {
        for j in 0..r {
            d2.set(i, j, fox_derivative(rel, j));
        }
    }
    if m == 0 {
        return ChainComplex::new(vec![1, r], vec![d1]).expect("shapes agree");
    }
    ChainComplex::new(vec![1, r, m], vec![d1, d2]).expect("shapes agree")
}

/// One elementary automorphism of a free group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elementary {
    /// Inverts `x_i`.
    Tau(usize),
    /// Swaps `x_i` and `x_j`.
    Sigma(usize, usize),
    /// `x_i ↦ x_j^{-1} x_i`, `x_j ↦ x_j^{-1}`.
    Eta(usize, usize),
}

impl Elementary {
    /// Parses `tau_1`, `sigma_1_3`, `eta_2_1` (1-based indices).
    pub fn parse(s: &str) -> Result<Elementary> {
        let parts: Vec<&str> = s.trim().split('_').collect();
        let idx = |t: &str| -> Result<usize> {
            let v: usize = t
                .parse()
                .map_err(|_| Error::Input(format!("bad index in {s:?}")))?;
            if v == 0 {
                return Err(Error::Input(format!("indices are 1-based in {s:?}")));
            }
            Ok(v - 1)
        };
        match parts.as_slice() {
            ["tau", i] => Ok(Elementary::Tau(idx(i)?)),
            ["sigma", i, j] => Ok(Elementary::Sigma(idx(i)?, idx(j)?)),
            ["eta", i, j] => Ok(Elementary::Eta(idx(i)?, idx(j)?)),
            _ => Err(Error::Input(format!(
                "unknown elementary automorphism {s:?}"
            ))),
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        let ok = match *self {
            Elementary::Tau(i) => i < n,
            Elementary::Sigma(i, j) | Elementary::Eta(i, j) => i < n && j < n && i != j,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Input(format!("{self:?} out of range for rank {n}")))
        }
    }

    fn images(&self, n: usize) -> Vec<Word> {
        let mut im: Vec<Word> = (0..n).map(Word::gen).collect();
        match *self {
            Elementary::Tau(i) => im[i] = Word::gen_pow(i, -1),
            Elementary::Sigma(i, j) => im.swap(i, j),
            Elementary::Eta(i, j) => {
                im[i] = Word::from_syllables([(j, -1), (i, 1)]);
                im[j] = Word::gen_pow(j, -1);
            }
        }
        im
    }
}

/// An endomorphism of `F_n` given by generator images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeAutomorphism {
    pub rank: usize,
    pub images: Vec<Word>,
}

impl FreeAutomorphism {
    pub fn identity(rank: usize) -> Self {
        FreeAutomorphism {
            rank,
            images: (0..rank).map(Word::gen).collect(),
        }
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Word::identity();
        for (g, e) in w.syllables() {
            out.append(&self.images[g].pow(e));
        }
        out
    }

    /// `self ∘ other`: `x ↦ self(other(x))`.
    pub fn compose(&self, other: &FreeAutomorphism) -> FreeAutomorphism {
        FreeAutomorphism {
            rank: self.rank,
            images: other.images.iter().map(|w| self.apply(w)).collect(),
        }
    }

    /// Composes elementary factors written left to right as `f_1 f_2 … f_k`,
    /// giving `x ↦ f_1(f_2(…f_k(x)))`.
    pub fn from_elementary(n: usize, gens: &[Elementary]) -> Result<Self> {
        let mut phi = FreeAutomorphism::identity(n);
        for g in gens {
            g.check(n)?;
            let f = FreeAutomorphism {
                rank: n,
                images: g.images(n),
            };
            phi = phi.compose(&f);
        }
        Ok(phi)
    }
}

/// Mapping-torus presentation `⟨x_1..x_n, t | t x_i t^{-1} φ(x_i)^{-1}⟩`.
///
/// Generators are named `a, b, c, …` for the `x_i` (skipping `t`) and `t` last.
pub fn free_by_cyclic(n: usize, gens: &[Elementary]) -> Result<Presentation> {
    if n == 0 || n > 25 {
        return Err(Error::Input(format!("rank {n} not supported")));
    }
    let phi = FreeAutomorphism::from_elementary(n, gens)?;
    let t = n;
    let relators = (0..n)
        .map(|i| {
            let mut w = Word::gen(t);
            w.append(&Word::gen(i));
            w.append(&Word::gen_pow(t, -1));
            w.append(&phi.images[i].inverse());
            w
        })
        .collect();
    let mut names: Vec<char> = ('a'..='z').filter(|&c| c != 't').take(n).collect();
    names.push('t');
    Ok(Presentation::with_names(names, relators))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutator_derivative() {
        let r = Word::from_letters(&[1, 2, -1, -2]);
        let d = fox_derivative(&r, 0);
        let mut expect = GroupRingElement::one();
        expect.add_term(Word::from_letters(&[1, 2, -1]), BigInt::from(-1));
        assert_eq!(d, expect);
    }

    #[test]
    fn power_derivative() {
        let d = fox_derivative(&Word::gen_pow(0, 4), 0);
        let expect =
            GroupRingElement::from_terms((0..4).map(|k| (Word::gen_pow(0, k), BigInt::from(1))));
        assert_eq!(d, expect);
    }

    #[test]
    fn single_generator_complex() {
        let c = presentation_complex(&Presentation::new(1, vec![]));
        assert_eq!(c.dims, vec![1, 1]);
        let lap = c.laplacians();
        let mut expect = GroupRingElement::from_int(2);
        expect.add_term(Word::gen(0), BigInt::from(-1));
        expect.add_term(Word::gen_pow(0, -1), BigInt::from(-1));
        assert_eq!(lap[0].get(0, 0), &expect);
    }

    #[test]
    fn fbc_example_images() {
        let gens: Vec<Elementary> = ["eta_2_1", "sigma_1_3", "eta_2_1", "eta_3_2", "eta_3_1"]
            .iter()
            .map(|s| Elementary::parse(s).unwrap())
            .collect();
        let phi = FreeAutomorphism::from_elementary(3, &gens).unwrap();
        assert_eq!(phi.images[0], Word::from_letters(&[3]));
        assert_eq!(phi.images[1], Word::from_letters(&[-2, 1, 3]));
        assert_eq!(phi.images[2], Word::from_letters(&[3, -2, 1, 3, -1]));
    }

    #[test]
    fn elementary_involutions() {
        for g in [
            Elementary::Tau(1),
            Elementary::Sigma(0, 2),
            Elementary::Eta(2, 0),
        ] {
            let phi = FreeAutomorphism::from_elementary(3, &[g, g]).unwrap();
            assert_eq!(phi, FreeAutomorphism::identity(3));
        }
    }
}
