//! Binomial polynomials P_i(w) = w(w-1)···(w-(i-1))/i! and expansion of
//! integer-valued polynomials over them.
//!
//! A polynomial is a Z-combination of the P_i exactly when it takes integer
//! values on all integers, and the coefficients are read off by iterated
//! finite differences at 0: c_i = (Δ^i h)(0). The expansion routine returns
//! the rational coefficients unconditionally; callers decide what integrality
//! means for them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::laurent::LaurentPoly;
use crate::ring::{factorial, Rational};

/// P_i in the variable `w`; P_0 = 1.
pub fn binomial_polynomial(i: u32) -> LaurentPoly {
    let mut p = LaurentPoly::one();
    let w = LaurentPoly::var("w");
    for k in 0..i {
        p = &p * &(&w - &LaurentPoly::from_int(k as i64));
    }
    p.scale(&Rational::new(BigInt::one(), factorial(i as u64)))
}

/// Finite-difference coefficients (c_0, ..., c_d) with h = Σ c_i P_i.
///
/// `h` must be a genuine polynomial (no negative exponents) in at most one
/// variable; the zero polynomial yields an empty vector.
pub fn binomial_expand(h: &LaurentPoly) -> Vec<Rational> {
    assert!(h.vars().len() <= 1, "binomial_expand needs a univariate polynomial");
    assert!(h.is_polynomial(), "binomial_expand needs nonnegative exponents");
    let Some((_, hi)) = h.univar_range() else {
        return Vec::new();
    };
    let d = hi as usize;
    let var = h.vars().first().cloned().unwrap_or_else(|| "w".to_string());
    let mut row: Vec<Rational> = (0..=d)
        .map(|j| {
            let mut assign = BTreeMap::new();
            assign.insert(var.clone(), Rational::from_integer(BigInt::from(j)));
            h.eval(&assign).expect("polynomial evaluation cannot fail")
        })
        .collect();
    let mut coeffs = Vec::with_capacity(d + 1);
    for _ in 0..=d {
        coeffs.push(row[0].clone());
        for j in 0..row.len() - 1 {
            row[j] = &row[j + 1] - &row[j];
        }
        row.pop();
    }
    coeffs
}

/// Σ c_i P_i as a polynomial in `w`; inverse of `binomial_expand`.
pub fn from_binomial_coeffs(coeffs: &[Rational]) -> LaurentPoly {
    let mut acc = LaurentPoly::zero();
    for (i, c) in coeffs.iter().enumerate() {
        acc = &acc + &binomial_polynomial(i as u32).scale(c);
    }
    acc
}
