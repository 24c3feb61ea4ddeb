//! Sparse multivariate Laurent polynomials with exact rational coefficients.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors, so iteration order,
//! equality, and printing are all canonical. The variable list is sorted by
//! name and trimmed to the variables that actually occur; a constant has an
//! empty variable list. Exponents are signed and checked: overflow in exponent
//! arithmetic is a hard error, never wraparound.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ring::Rational;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum LaurentError {
    /// Raising a non-unit to a negative power during substitution.
    #[error("substitution requires a unit (single nonzero term) for variable `{var}` raised to {exponent}")]
    NonInvertibleSubstitution { var: String, exponent: i64 },
    /// Full evaluation hit a zero base with a negative exponent.
    #[error("evaluation of negative power of zero")]
    ZeroToNegativePower,
    /// Full evaluation was missing an assignment.
    #[error("no value assigned to variable `{0}`")]
    UnassignedVariable(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<i64>, Rational>,
}

fn checked_add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("exponent overflow")
}

fn checked_mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("exponent overflow")
}

/// q^e for a nonzero rational q and any integer e.
fn rational_pow(q: &Rational, e: i64) -> Rational {
    if e == 0 {
        return Rational::one();
    }
    let mag = e.unsigned_abs() as u32;
    let powed = Rational::new(q.numer().pow(mag), q.denom().pow(mag));
    if e < 0 {
        powed.recip()
    } else {
        powed
    }
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { vars: Vec::new(), terms: BTreeMap::new() }
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Vec::new(), q);
        }
        LaurentPoly { vars: Vec::new(), terms }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn var(name: &str) -> Self {
        Self::monomial(Rational::one(), &[(name, 1)])
    }

    /// c · Π nameᵢ^eᵢ. Repeated names have their exponents added.
    pub fn monomial(coeff: Rational, powers: &[(&str, i64)]) -> Self {
        if coeff.is_zero() {
            return Self::zero();
        }
        let mut by_name: BTreeMap<String, i64> = BTreeMap::new();
        for (name, e) in powers {
            let slot = by_name.entry((*name).to_string()).or_insert(0);
            *slot = checked_add(*slot, *e);
        }
        by_name.retain(|_, e| *e != 0);
        let vars: Vec<String> = by_name.keys().cloned().collect();
        let exps: Vec<i64> = by_name.values().copied().collect();
        let mut terms = BTreeMap::new();
        terms.insert(exps, coeff);
        LaurentPoly { vars, terms }
    }

    /// Assemble from an explicit variable context; used by the parser and by
    /// substitution. Zero coefficients are dropped and unused variables
    /// trimmed, so the result is canonical.
    pub fn from_terms(vars: Vec<String>, terms: BTreeMap<Vec<i64>, Rational>) -> Self {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]), "vars must be sorted and unique");
        let mut p = LaurentPoly { vars, terms };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        self.terms.retain(|_, q| !q.is_zero());
        if self.terms.is_empty() {
            self.vars.clear();
            return;
        }
        let n = self.vars.len();
        let used: Vec<bool> = (0..n).map(|i| self.terms.keys().any(|e| e[i] != 0)).collect();
        if used.iter().all(|&u| u) {
            return;
        }
        let keep: Vec<usize> = (0..n).filter(|&i| used[i]).collect();
        self.vars = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let old = std::mem::take(&mut self.terms);
        for (exps, q) in old {
            let slim: Vec<i64> = keep.iter().map(|&i| exps[i]).collect();
            self.terms.insert(slim, q);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Iterate terms as (variable-aligned exponents, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Rational)> {
        self.terms.iter()
    }

    /// Coefficient of the monomial given by name/exponent pairs (unlisted
    /// variables are taken to the zeroth power).
    pub fn coeff(&self, powers: &[(&str, i64)]) -> Rational {
        let mut want: BTreeMap<&str, i64> = BTreeMap::new();
        for (name, e) in powers {
            if *e != 0 {
                want.insert(name, *e);
            }
        }
        for name in want.keys() {
            if !self.vars.iter().any(|v| v == name) {
                return Rational::zero();
            }
        }
        let key: Vec<i64> =
            self.vars.iter().map(|v| want.get(v.as_str()).copied().unwrap_or(0)).collect();
        self.terms.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    /// Re-express over a superset variable context (sorted, containing ours).
    fn embed(&self, vars: &[String]) -> BTreeMap<Vec<i64>, Rational> {
        let pos: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).expect("embed: missing variable"))
            .collect();
        let mut out = BTreeMap::new();
        for (exps, q) in &self.terms {
            let mut e = vec![0i64; vars.len()];
            for (i, &p) in pos.iter().enumerate() {
                e[p] = exps[i];
            }
            out.insert(e, q.clone());
        }
        out
    }

    fn union_vars(a: &LaurentPoly, b: &LaurentPoly) -> Vec<String> {
        let mut vars: Vec<String> = a.vars.iter().chain(b.vars.iter()).cloned().collect();
        vars.sort();
        vars.dedup();
        vars
    }

    pub fn add(&self, rhs: &LaurentPoly) -> LaurentPoly {
        let vars = Self::union_vars(self, rhs);
        let mut terms = self.embed(&vars);
        for (e, q) in rhs.embed(&vars) {
            let slot = terms.entry(e).or_insert_with(Rational::zero);
            *slot += q;
        }
        LaurentPoly::from_terms(vars, terms)
    }

    pub fn sub(&self, rhs: &LaurentPoly) -> LaurentPoly {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, q)| (e.clone(), -q)).collect(),
        }
    }

    pub fn mul(&self, rhs: &LaurentPoly) -> LaurentPoly {
        let vars = Self::union_vars(self, rhs);
        let a = self.embed(&vars);
        let b = rhs.embed(&vars);
        let mut terms: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
        for (ea, qa) in &a {
            for (eb, qb) in &b {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| checked_add(*x, *y)).collect();
                let q = qa * qb;
                let slot = terms.entry(e).or_insert_with(Rational::zero);
                *slot += q;
            }
        }
        LaurentPoly::from_terms(vars, terms)
    }

    pub fn scale(&self, c: &Rational) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, q)| (e.clone(), q * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// A unit of the Laurent ring is a single nonzero term; returns (c, exps)
    /// aligned with our variable list.
    fn as_unit(&self) -> Option<(&Rational, &Vec<i64>)> {
        if self.terms.len() != 1 {
            return None;
        }
        self.terms.iter().next().map(|(e, q)| (q, e))
    }

    /// `self` with each mapped variable replaced by the given polynomial.
    /// Unmapped variables pass through. A variable occurring to a negative
    /// power may only be replaced by a unit.
    pub fn substitute(
        &self,
        map: &BTreeMap<String, LaurentPoly>,
    ) -> Result<LaurentPoly, LaurentError> {
        let mut acc = LaurentPoly::zero();
        for (exps, q) in &self.terms {
            let mut factor = LaurentPoly::from_rational(q.clone());
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = &self.vars[i];
                match map.get(name) {
                    None => {
                        factor = factor.mul(&LaurentPoly::monomial(Rational::one(), &[(name, e)]));
                    }
                    Some(g) => {
                        if e > 0 {
                            factor = factor.mul(&g.pow(e as u32));
                        } else {
                            let (c, alpha) = g.as_unit().ok_or_else(|| {
                                LaurentError::NonInvertibleSubstitution {
                                    var: name.clone(),
                                    exponent: e,
                                }
                            })?;
                            let powers: Vec<(&str, i64)> = g
                                .vars
                                .iter()
                                .zip(alpha)
                                .map(|(v, a)| (v.as_str(), checked_mul(*a, e)))
                                .collect();
                            let unit_pow = LaurentPoly::monomial(rational_pow(c, e), &powers);
                            factor = factor.mul(&unit_pow);
                        }
                    }
                }
            }
            acc = acc.add(&factor);
        }
        Ok(acc)
    }

    /// Evaluate with every variable assigned a rational value.
    pub fn eval(&self, assign: &BTreeMap<String, Rational>) -> Result<Rational, LaurentError> {
        let values: Vec<&Rational> = self
            .vars
            .iter()
            .map(|v| assign.get(v).ok_or_else(|| LaurentError::UnassignedVariable(v.clone())))
            .collect::<Result<_, _>>()?;
        let mut acc = Rational::zero();
        for (exps, q) in &self.terms {
            let mut term = q.clone();
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if values[i].is_zero() {
                    if e < 0 {
                        return Err(LaurentError::ZeroToNegativePower);
                    }
                    term = Rational::zero();
                    break;
                }
                term *= rational_pow(values[i], e);
            }
            acc += term;
        }
        Ok(acc)
    }

    pub fn total_degree_of(exps: &[i64]) -> i64 {
        exps.iter().fold(0i64, |a, &b| checked_add(a, b))
    }

    /// Split by total degree; each piece is canonical on its own variables.
    pub fn homogeneous_components(&self) -> BTreeMap<i64, LaurentPoly> {
        let mut buckets: BTreeMap<i64, BTreeMap<Vec<i64>, Rational>> = BTreeMap::new();
        for (exps, q) in &self.terms {
            let d = Self::total_degree_of(exps);
            buckets.entry(d).or_default().insert(exps.clone(), q.clone());
        }
        buckets
            .into_iter()
            .map(|(d, terms)| (d, LaurentPoly::from_terms(self.vars.clone(), terms)))
            .collect()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous_components().len() <= 1
    }

    /// Exponent range over the single variable of a univariate polynomial.
    /// Panics when called on a polynomial in two or more variables.
    pub fn univar_range(&self) -> Option<(i64, i64)> {
        assert!(self.vars.len() <= 1, "univar_range on multivariate polynomial");
        if self.terms.is_empty() {
            return None;
        }
        if self.vars.is_empty() {
            return Some((0, 0));
        }
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for e in self.terms.keys() {
            lo = lo.min(e[0]);
            hi = hi.max(e[0]);
        }
        Some((lo, hi))
    }

    /// True when no variable occurs to a negative power.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x >= 0))
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.terms.values().all(|q| q.is_integer())
    }

    fn fmt_term(
        f: &mut fmt::Formatter<'_>,
        vars: &[String],
        exps: &[i64],
        q: &Rational,
        first: bool,
    ) -> fmt::Result {
        let neg = q.is_negative();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let mag = q.abs();
        let mut factors: Vec<String> = Vec::new();
        if !mag.is_one() || exps.iter().all(|&e| e == 0) {
            factors.push(mag.to_string());
        }
        for (v, &e) in vars.iter().zip(exps) {
            match e {
                0 => {}
                1 => factors.push(v.clone()),
                _ => factors.push(format!("{v}^{e}")),
            }
        }
        write!(f, "{}", factors.join("*"))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (exps, q)) in self.terms.iter().enumerate() {
            Self::fmt_term(f, &self.vars, exps, q, i == 0)?;
        }
        Ok(())
    }
}

impl std::ops::Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::add(self, rhs)
    }
}

impl std::ops::Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::sub(self, rhs)
    }
}

impl std::ops::Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::mul(self, rhs)
    }
}

impl std::ops::Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly::neg(self)
    }
}
