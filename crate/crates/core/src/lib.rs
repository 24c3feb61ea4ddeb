//! Exact-arithmetic engine for twisted K-theory computations.
//!
//! The pipeline: a twist datum enters as a finitely presented module over the
//! K-homology ring of CP^infinity (the β-basis ring, [`beta`]), the base change
//! along the completed augmentation collapses it to a pair of integer matrices
//! ([`presentation`]), and Smith normal form reads off the two graded groups
//! ([`twist`]). The cooperations algebra of K-theory ([`kk`], [`coaction`])
//! supplies the structure maps that justify the base change, and the homological
//! layer ([`tor`]) confirms that the answer is the degree-zero Tor and that
//! higher Tor vanishes where it should.
//!
//! Everything is exact: integers and rationals are arbitrary precision, and no
//! floating point appears anywhere in the crate.

pub mod beta;
pub mod binomial;
pub mod coaction;
pub mod expr;
pub mod kk;
pub mod laurent;
pub mod presentation;
pub mod ring;
pub mod selftest;
pub mod series;
pub mod snf;
pub mod tor;
pub mod twist;

pub use laurent::LaurentPoly;
pub use ring::Rational;
