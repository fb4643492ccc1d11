//! Presentations, abelianization, characters and lifts.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ring::GroupRingElement;
use crate::smith::{gcd_combination, smith, IntMat};
use crate::word::{default_name, Word};

/// A finite presentation `⟨x_0, …, x_{r-1} | relators⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub rank: usize,
    pub relators: Vec<Word>,
    /// Display names, one per generator.
    pub names: Vec<char>,
}

impl Presentation {
    pub fn new(rank: usize, relators: Vec<Word>) -> Self {
        let names = (0..rank).map(default_name).collect();
        Self::with_names(names, relators)
    }

    pub fn with_names(names: Vec<char>, relators: Vec<Word>) -> Self {
        let rank = names.len();
        Presentation {
            rank,
            relators,
            names,
        }
    }

    /// The same presentation with every relator cyclically reduced.
    pub fn normalized(&self) -> Presentation {
        Presentation {
            rank: self.rank,
            relators: self
                .relators
                .iter()
                .map(|r| r.cyclically_reduced())
                .collect(),
            names: self.names.clone(),
        }
    }

    /// Relator exponent-sum matrix (relators as rows, generators as columns).
    pub fn relator_matrix(&self) -> IntMat {
        self.relators
            .iter()
            .map(|r| {
                r.exponent_sums(self.rank)
                    .into_iter()
                    .take(self.rank)
                    .map(BigInt::from)
                    .collect()
            })
            .collect()
    }
}

/// Abelianization data from the Smith form `U·R·V = S`.
///
/// The abelianization is `Z^r / rowspace(R)`; a row vector of exponent sums
/// `e` maps to Smith coordinates `e·V`, and coordinate `k` is taken modulo
/// `moduli[k]` (0 for a free coordinate).
#[derive(Clone, Debug)]
pub struct AbelianStructure {
    pub free_rank: usize,
    /// Torsion moduli greater than one, in Smith order.
    pub torsion: Vec<BigInt>,
    /// One modulus per Smith coordinate (length `rank`); 0 marks a free coordinate.
    pub moduli: Vec<BigInt>,
    /// Row `j` is the image of generator `j` in Smith coordinates (that is, `V`).
    pub gen_images: IntMat,
    pub u: IntMat,
    pub v: IntMat,
    pub diag: Vec<BigInt>,
}

impl AbelianStructure {
    /// Indices of the free Smith coordinates.
    pub fn free_coords(&self) -> Vec<usize> {
        (0..self.moduli.len())
            .filter(|&k| self.moduli[k].is_zero())
            .collect()
    }

    /// Smith coordinates of a word (not reduced by the moduli).
    pub fn coords(&self, w: &Word) -> Vec<BigInt> {
        let e = w.exponent_sums(self.gen_images.len());
        let n = self.moduli.len();
        (0..n)
            .map(|k| {
                e.iter()
                    .zip(&self.gen_images)
                    .map(|(&x, row)| BigInt::from(x) * &row[k])
                    .sum()
            })
            .collect()
    }
}

pub fn abelianize(p: &Presentation) -> AbelianStructure {
    let r = p.relator_matrix();
    let m = r.len();
    let n = p.rank;
    let s = smith(&r, m, n);
    let mut moduli = vec![BigInt::zero(); n];
    for (k, d) in s.diag.iter().enumerate() {
        moduli[k] = d.clone();
    }
    let free_rank = moduli.iter().filter(|d| d.is_zero()).count();
    let torsion = moduli
        .iter()
        .filter(|d| *d > &BigInt::one())
        .cloned()
        .collect();
    AbelianStructure {
        free_rank,
        torsion,
        moduli,
        gen_images: s.v.clone(),
        u: s.u,
        v: s.v,
        diag: s.diag,
    }
}

/// An integral character `φ = d · φ₀` stored as its primitive part `φ₀` and `d`.
///
/// The zero character has all images zero and `d = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    pub images: Vec<i64>,
    pub d: i64,
}

/// How a character is specified.
#[derive(Clone, Debug)]
pub enum CharacterSpec {
    /// One image per generator.
    Images(Vec<i64>),
    /// Coordinates on the free Smith coordinates of the abelianization.
    FreeCoords(Vec<i64>),
}

impl Character {
    pub fn is_zero(&self) -> bool {
        self.images.iter().all(|&x| x == 0)
    }

    /// Images of `d · φ₀`.
    pub fn full_images(&self) -> Vec<i64> {
        self.images.iter().map(|x| x * self.d).collect()
    }

    pub fn eval(&self, w: &Word) -> i64 {
        w.weight(&self.images)
    }
}

pub fn make_character(p: &Presentation, spec: &CharacterSpec) -> Result<Character> {
    let images = match spec {
        CharacterSpec::Images(v) => {
            if v.len() != p.rank {
                return Err(Error::Input(format!(
                    "character has {} images for {} generators",
                    v.len(),
                    p.rank
                )));
            }
            v.clone()
        }
        CharacterSpec::FreeCoords(v) => {
            let ab = abelianize(p);
            let free = ab.free_coords();
            if ab.free_rank == 0 {
                return Err(Error::Input("abelianization has free rank 0".into()));
            }
            if v.len() != free.len() {
                return Err(Error::Input(format!(
                    "expected {} free coordinates, got {}",
                    free.len(),
                    v.len()
                )));
            }
            (0..p.rank)
                .map(|j| {
                    let s: BigInt = free
                        .iter()
                        .zip(v)
                        .map(|(&k, &c)| &ab.gen_images[j][k] * BigInt::from(c))
                        .sum();
                    s.to_i64().ok_or(Error::Overflow("character images"))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    for (i, r) in p.relators.iter().enumerate() {
        if r.weight(&images) != 0 {
            return Err(Error::InvalidCharacter { relator: i });
        }
    }
    let (g, _) = gcd_combination(&images);
    if g == 0 {
        return Ok(Character { images, d: 1 });
    }
    Ok(Character {
        images: images.iter().map(|x| x / g).collect(),
        d: g,
    })
}

/// A word `x` with `φ(x) = 1`, for primitive nonzero `φ`.
pub fn find_lift(phi: &Character) -> Word {
    if let Some(j) = phi.images.iter().position(|&x| x == 1) {
        return Word::gen(j);
    }
    if let Some(j) = phi.images.iter().position(|&x| x == -1) {
        return Word::gen_pow(j, -1);
    }
    let (g, c) = gcd_combination(&phi.images);
    assert_eq!(g, 1, "find_lift needs a primitive nonzero character");
    Word::from_syllables(c.iter().enumerate().map(|(j, &e)| (j, e)))
}

/// Min and max character weight over the support; `None` for the zero element.
pub fn phi_range(x: &GroupRingElement, phi: &Character) -> Option<(i64, i64)> {
    x.weight_range(&phi.images)
}
