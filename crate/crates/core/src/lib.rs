//! Twisted L²-Euler characteristics of chain complexes over group rings.
//!
//! Chain complexes are given over the integral group ring of a finitely
//! presented group. The valuation of the Dieudonné determinant of each
//! combinatorial Laplacian is read off from ranks of expanded matrices over
//! finite quotients, and the alternating sum gives the Euler characteristic.

pub mod error;
pub mod expansion;
pub mod fox;
pub mod laurent;
pub mod normball;
pub mod parse;
pub mod pipeline;
pub mod presentation;
pub mod quotient;
pub mod rank;
pub mod ring;
pub mod smith;
pub mod word;

pub use error::{Error, Result};
pub use fox::{fox_derivative, free_by_cyclic, presentation_complex, ChainComplex, Elementary};
pub use presentation::{
    abelianize, find_lift, make_character, phi_range, Character, CharacterSpec, Presentation,
};
pub use quotient::{
    abelian_quotient, perm_quotient, search_quotient, subgroup_closure, FiniteQuotient,
};
pub use rank::{RankMethod, RankPolicy};
pub use ring::{GroupRingElement, RingMatrix};
pub use word::Word;
