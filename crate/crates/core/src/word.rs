//! Reduced words in a free group.

use std::fmt;

/// A reduced free-group word stored as syllables `(generator, exponent)`.
///
/// Adjacent syllables always have distinct generators and no exponent is zero.
/// The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    syl: Vec<(u32, i64)>,
}

impl Word {
    pub fn identity() -> Word {
        Word { syl: Vec::new() }
    }

    /// The single-syllable word `x_gen^exp`.
    pub fn gen_pow(gen: usize, exp: i64) -> Word {
        if exp == 0 {
            return Word::identity();
        }
        Word {
            syl: vec![(gen as u32, exp)],
        }
    }

    pub fn gen(gen: usize) -> Word {
        Word::gen_pow(gen, 1)
    }

    /// Builds a word from arbitrary syllables, reducing as it goes.
    pub fn from_syllables<I: IntoIterator<Item = (usize, i64)>>(it: I) -> Word {
        let mut w = Word::identity();
        for (g, e) in it {
            w.push(g as u32, e);
        }
        w
    }

    /// Builds a word from a letter sequence, where `+k` means `x_{k-1}` and
    /// `-k` its inverse.
    pub fn from_letters(letters: &[i32]) -> Word {
        Word::from_syllables(letters.iter().map(|&l| {
            assert!(l != 0, "letter 0 is not a generator");
            ((l.unsigned_abs() - 1) as usize, l.signum() as i64)
        }))
    }

    fn push(&mut self, g: u32, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.syl.last_mut() {
            if last.0 == g {
                last.1 += e;
                if last.1 == 0 {
                    self.syl.pop();
                }
                return;
            }
        }
        self.syl.push((g, e));
    }

    pub fn syllables(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.syl.iter().map(|&(g, e)| (g as usize, e))
    }

    pub fn num_syllables(&self) -> usize {
        self.syl.len()
    }

    pub fn is_identity(&self) -> bool {
        self.syl.is_empty()
    }

    /// Word length in letters.
    pub fn length(&self) -> u64 {
        self.syl.iter().map(|&(_, e)| e.unsigned_abs()).sum()
    }

    /// Largest generator index used plus one (0 for the identity).
    pub fn rank_used(&self) -> usize {
        self.syl
            .iter()
            .map(|&(g, _)| g as usize + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn inverse(&self) -> Word {
        Word {
            syl: self.syl.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    /// Reduced concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        out.append(other);
        out
    }

    /// In-place reduced concatenation.
    pub fn append(&mut self, other: &Word) {
        for &(g, e) in &other.syl {
            self.push(g, e);
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out.append(&base);
        }
        out
    }

    /// The conjugate `u · self · u^{-1}`.
    pub fn conjugate_by(&self, u: &Word) -> Word {
        let mut out = u.clone();
        out.append(self);
        out.append(&u.inverse());
        out
    }

    /// Exponent sum per generator (abelianization), padded to `rank`.
    pub fn exponent_sums(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0i64; rank.max(self.rank_used())];
        for &(g, e) in &self.syl {
            v[g as usize] += e;
        }
        v
    }

    /// Evaluation of an integer character on the word.
    pub fn weight(&self, images: &[i64]) -> i64 {
        self.syl
            .iter()
            .map(|&(g, e)| e * images.get(g as usize).copied().unwrap_or(0))
            .sum()
    }

    /// Cyclic reduction: strips `u ... u^{-1}` wrapping and merges the ends.
    pub fn cyclically_reduced(&self) -> Word {
        let mut s = self.syl.clone();
        loop {
            if s.len() >= 2 {
                let (g0, e0) = s[0];
                let (g1, e1) = s[s.len() - 1];
                if g0 == g1 {
                    let e = e0 + e1;
                    s.pop();
                    if e == 0 {
                        s.remove(0);
                    } else {
                        s[0].1 = e;
                    }
                    continue;
                }
            }
            break;
        }
        Word { syl: s }
    }

    /// Formats the word with letters `a, b, c, ...` and `^` exponents.
    pub fn display_with(&self, names: &[char]) -> String {
        if self.syl.is_empty() {
            return "1".to_string();
        }
        let mut s = String::new();
        for &(g, e) in &self.syl {
            let c = names
                .get(g as usize)
                .copied()
                .unwrap_or_else(|| default_name(g as usize));
            s.push(c);
            if e != 1 {
                s.push('^');
                s.push_str(&e.to_string());
            }
        }
        s
    }
}

pub(crate) fn default_name(g: usize) -> char {
    if g < 26 {
        (b'a' + g as u8) as char
    } else {
        '?'
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&[]))
    }
}

/// Convenience form of [`Word::concat`].
pub fn word_concat(w1: &Word, w2: &Word) -> Word {
    w1.concat(w2)
}
