//! Elements of the K-theory cooperation ring: finite Laurent polynomials
//! f(u, v) over Q subject to the integrality condition that f(t, kt) lands in
//! Z[t, t^{-1}, 1/k] for every nonzero integer k.
//!
//! The ring is spanned over Z[u^{±1}, v^{-1}] by the integral basis
//! p_i(u, v) = v(v - u)(v - 2u)⋯(v - (i-1)u)/i!, with the companion family
//! p'_i(u, v) = (v - u)(v - 2u)⋯(v - iu)/(i+1)! satisfying v·p'_{i-1} = p_i.
//!
//! Membership is decided exactly, one homogeneous component at a time: write
//! the component of degree r as u^r·h(v/u), clear denominators by w^N for the
//! canonical exponent N = max(0, max(1, m) - minexp(h)) where m is the largest
//! prime-power exponent in any coefficient denominator, and test whether the
//! finite-difference expansion of w^N·h(w) in the binomial basis is integral.
//! Decomposition into the p_i instead uses the *smallest* clearing exponent
//! that yields an integral expansion, so that honest basis elements come back
//! undisturbed (the feasible exponents are upward closed, so the minimum is
//! found by a bounded scan).

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::beta::BetaPoly;
use crate::binomial::binomial_expand;
use crate::expr::{parse_expr, ParseError, KK_VARS};
use crate::laurent::LaurentPoly;
use crate::ring::{denominator_divides_power, max_prime_power, rat, Rational};

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum KKError {
    /// The element fails the integrality condition, so it has no
    /// decomposition over the integral basis.
    #[error("element is not integral")]
    NotIntegral,
    /// Expressions may only use the variables u and v.
    #[error("unexpected variable `{0}`")]
    BadVariable(String),
}

/// p_i(u, v) = v(v - u)(v - 2u)⋯(v - (i-1)u)/i!, with p_0 = 1.
pub fn p_poly(i: u32) -> LaurentPoly {
    let u = LaurentPoly::var("u");
    let v = LaurentPoly::var("v");
    let mut out = LaurentPoly::one();
    for a in 0..i {
        out = &out * &(&v - &u.scale(&rat(a as i64, 1)));
    }
    out.scale(&Rational::new(1.into(), crate::ring::factorial(i as u64)))
}

/// p'_i(u, v) = (v - u)(v - 2u)⋯(v - iu)/(i+1)!, with p'_0 = 1.
pub fn pprime_poly(i: u32) -> LaurentPoly {
    let u = LaurentPoly::var("u");
    let v = LaurentPoly::var("v");
    let mut out = LaurentPoly::one();
    for a in 1..=i {
        out = &out * &(&v - &u.scale(&rat(a as i64, 1)));
    }
    out.scale(&Rational::new(1.into(), crate::ring::factorial(i as u64 + 1)))
}

/// The degree-2k image of the standard module generator: v·p'_{k-1}.
pub fn composite_hat(k: u32) -> KKElement {
    assert!(k >= 1, "composite_hat is defined for k ≥ 1");
    KKElement::new(&LaurentPoly::var("v") * &pprime_poly(k - 1)).expect("built from u, v")
}

/// Outcome of the integrality decision, carrying a sampled witness when the
/// element is not integral and one exists within the scan range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Integral,
    NotIntegral { witness: Option<Witness> },
}

/// A concrete failure of integrality: substituting v = k·u produces a
/// coefficient outside Z[1/k] at the recorded t-exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub k: i64,
    pub t_exp: i64,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KKElement {
    poly: LaurentPoly,
}

impl KKElement {
    pub fn new(poly: LaurentPoly) -> Result<Self, KKError> {
        for v in poly.vars() {
            if v != "u" && v != "v" {
                return Err(KKError::BadVariable(v.clone()));
            }
        }
        Ok(KKElement { poly })
    }

    pub fn parse(src: &str) -> Result<Self, ParseError> {
        Ok(KKElement { poly: parse_expr(src, KK_VARS)? })
    }

    pub fn zero() -> Self {
        KKElement { poly: LaurentPoly::zero() }
    }

    pub fn one() -> Self {
        KKElement { poly: LaurentPoly::one() }
    }

    pub fn poly(&self) -> &LaurentPoly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        KKElement { poly: &self.poly + &rhs.poly }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        KKElement { poly: &self.poly - &rhs.poly }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        KKElement { poly: &self.poly * &rhs.poly }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        KKElement { poly: self.poly.scale(c) }
    }

    /// Substitute v = k·u and rename u to t: the sampled Laurent polynomial
    /// f(t, kt).
    pub fn sample(&self, k: i64) -> LaurentPoly {
        assert!(k != 0, "sampling requires a nonzero multiplier");
        let mut assign = BTreeMap::new();
        assign.insert("u".to_string(), LaurentPoly::var("t"));
        assign.insert("v".to_string(), LaurentPoly::var("t").scale(&rat(k, 1)));
        self.poly.substitute(&assign).expect("t is invertible")
    }

    /// Whether f(t, kt) ∈ Z[t, t^{-1}, 1/k] for this particular k.
    pub fn sample_is_admissible(&self, k: i64) -> bool {
        self.sample(k).terms().all(|(_, c)| denominator_divides_power(c.denom(), k))
    }

    /// One homogeneous slope: the component of total degree r, written as a
    /// univariate Laurent polynomial h(w) with f_r(u, v) = u^r·h(v/u).
    fn slopes(&self) -> Vec<(i64, LaurentPoly)> {
        let mut assign = BTreeMap::new();
        assign.insert("u".to_string(), LaurentPoly::one());
        assign.insert("v".to_string(), LaurentPoly::var("w"));
        self.poly
            .homogeneous_components()
            .into_iter()
            .map(|(r, f)| (r, f.substitute(&assign).expect("1 and w are units")))
            .collect()
    }

    /// Exact integrality decision by the canonical clearing exponent.
    pub fn is_integral(&self) -> bool {
        self.slopes().into_iter().all(|(_, h)| {
            let n = canonical_clearing_exponent(&h);
            let cleared = &monomial_w(n) * &h;
            binomial_expand(&cleared).iter().all(|c| c.is_integer())
        })
    }

    /// Integrality decision plus, on failure, a witness found by sampling
    /// k = 2..200, then -2..-200, then ±1. The decision itself never depends
    /// on the scan.
    pub fn membership(&self) -> Membership {
        if self.is_integral() {
            return Membership::Integral;
        }
        let witness = scan_order().find_map(|k| {
            self.sample(k).terms().find_map(|(e, c)| {
                if denominator_divides_power(c.denom(), k) {
                    None
                } else {
                    // Constants sample to a polynomial with no variables at
                    // all, whose lone exponent vector is empty.
                    let t_exp = e.first().copied().unwrap_or(0);
                    Some(Witness { k, t_exp, value: c.clone() })
                }
            })
        });
        Membership::NotIntegral { witness }
    }

    /// Write the element as Σ_i c_i·p_i with each c_i a Laurent monomial
    /// combination in u and v^{-1}, using the smallest clearing exponent per
    /// component. Fails exactly when the element is not integral.
    pub fn decompose(&self) -> Result<BTreeMap<u32, LaurentPoly>, KKError> {
        let mut out: BTreeMap<u32, LaurentPoly> = BTreeMap::new();
        for (r, h) in self.slopes() {
            let lower = h.univar_range().map_or(0, |(lo, _)| (-lo).max(0)) as u32;
            let upper = canonical_clearing_exponent(&h).max(lower);
            let mut done = false;
            for n in lower..=upper {
                let coeffs = binomial_expand(&(&monomial_w(n) * &h));
                if !coeffs.iter().all(|c| c.is_integer()) {
                    continue;
                }
                for (i, c) in coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let mono = LaurentPoly::monomial(
                        c.clone(),
                        &[("u", r + n as i64 - i as i64), ("v", -(n as i64))],
                    );
                    let entry = out.entry(i as u32).or_insert_with(LaurentPoly::zero);
                    *entry = &*entry + &mono;
                }
                done = true;
                break;
            }
            if !done {
                return Err(KKError::NotIntegral);
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Σ_i c_i·p_i, the inverse of `decompose`.
    pub fn recompose(parts: &BTreeMap<u32, LaurentPoly>) -> Self {
        let mut poly = LaurentPoly::zero();
        for (i, c) in parts {
            poly = &poly + &(c * &p_poly(*i));
        }
        KKElement { poly }
    }

    /// Counit: u, v ↦ t.
    pub fn eps(&self) -> LaurentPoly {
        let mut assign = BTreeMap::new();
        assign.insert("u".to_string(), LaurentPoly::var("t"));
        assign.insert("v".to_string(), LaurentPoly::var("t"));
        self.poly.substitute(&assign).expect("t is invertible")
    }

    /// Conjugation: swap u and v.
    pub fn conj(&self) -> Self {
        let mut assign = BTreeMap::new();
        assign.insert("u".to_string(), LaurentPoly::var("v"));
        assign.insert("v".to_string(), LaurentPoly::var("u"));
        KKElement { poly: self.poly.substitute(&assign).expect("u, v are units") }
    }
}

impl std::fmt::Display for KKElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.poly.fmt(f)
    }
}

/// t^m β_i ↦ u^{m-i}·p_i(u, v), extended additively: the standard embedding
/// of the β-basis ring. It is a ring homomorphism because both sides satisfy
/// the same formal group law.
pub fn i_star(x: &BetaPoly) -> KKElement {
    let mut poly = LaurentPoly::zero();
    for ((m, i), c) in x.terms() {
        let mono = LaurentPoly::monomial(Rational::from(c.clone()), &[("u", m - *i as i64)]);
        poly = &poly + &(&mono * &p_poly(*i));
    }
    KKElement { poly }
}

fn monomial_w(n: u32) -> LaurentPoly {
    LaurentPoly::monomial(rat(1, 1), &[("w", n as i64)])
}

/// N = max(0, max(1, m) - minexp(h)) where m is the largest exponent of any
/// prime in any coefficient denominator. Clearing by w^N makes the binomial
/// integrality test both sound and complete.
fn canonical_clearing_exponent(h: &LaurentPoly) -> u32 {
    let Some((minexp, _)) = h.univar_range() else {
        return 0;
    };
    let m = h.terms().map(|(_, c)| max_prime_power(c.denom())).max().unwrap_or(0);
    (i64::from(m.max(1)) - minexp).max(0) as u32
}

fn scan_order() -> impl Iterator<Item = i64> {
    (2..=200).chain((-200..=-2).rev()).chain([1, -1])
}
