//! Truncated formal power series: every term with total degree beyond the
//! order is discarded eagerly, and all operations are exact through the order.
//!
//! The coefficient type is generic so the same machinery serves rational
//! series (n-series, substitution targets) and series with coefficients in
//! the β-basis ring (formal group law checks).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ring::Ring;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum SeriesError {
    /// Composition target had a nonzero constant term, which would demand
    /// infinitely many coefficients of the outer series.
    #[error("composition with a series having nonzero constant term (variable `{0}`)")]
    CompositionWithUnit(String),
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(u32, u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncSeries<C: Ring> {
    vars: Vec<String>,
    order: u32,
    terms: BTreeMap<Vec<u32>, C>,
}

fn total(exps: &[u32]) -> u64 {
    exps.iter().map(|&e| e as u64).sum()
}

impl<C: Ring> TruncSeries<C> {
    pub fn zero(vars: &[&str], order: u32) -> Self {
        let mut vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        vars.sort();
        vars.dedup();
        TruncSeries { vars, order, terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[&str], order: u32, c: C) -> Self {
        let mut s = Self::zero(vars, order);
        s.add_term(vec![0; s.vars.len()], c);
        s
    }

    pub fn one(vars: &[&str], order: u32) -> Self {
        Self::constant(vars, order, C::one())
    }

    /// The generator `name`, which must be in the context.
    pub fn var(vars: &[&str], order: u32, name: &str) -> Self {
        let mut s = Self::zero(vars, order);
        let i = s.position(name);
        let mut e = vec![0u32; s.vars.len()];
        e[i] = 1;
        s.add_term(e, C::one());
        s
    }

    fn position(&self, name: &str) -> usize {
        self.vars
            .iter()
            .position(|v| v == name)
            .unwrap_or_else(|| panic!("variable `{name}` not in series context"))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    /// Add a single term in place, respecting the truncation order.
    pub fn add_term(&mut self, exps: Vec<u32>, c: C) {
        assert_eq!(exps.len(), self.vars.len(), "exponent arity mismatch");
        if c.is_zero() || total(&exps) > self.order as u64 {
            return;
        }
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_compatible(&self, rhs: &Self) -> Result<(), SeriesError> {
        if self.order != rhs.order {
            return Err(SeriesError::OrderMismatch(self.order, rhs.order));
        }
        assert_eq!(self.vars, rhs.vars, "series variable contexts differ");
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.check_compatible(rhs).expect("series order mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        TruncSeries {
            vars: self.vars.clone(),
            order: self.order,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.check_compatible(rhs).expect("series order mismatch");
        let mut out = Self { vars: self.vars.clone(), order: self.order, terms: BTreeMap::new() };
        for (ea, ca) in &self.terms {
            let da = total(ea);
            for (eb, cb) in &rhs.terms {
                if da + total(eb) > self.order as u64 {
                    continue;
                }
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self { vars: self.vars.clone(), order: self.order, terms: BTreeMap::new() };
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.mul(c));
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc =
            Self::one(&self.vars.iter().map(|s| s.as_str()).collect::<Vec<_>>(), self.order);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&vec![0; self.vars.len()])
    }

    /// Substitute a series for each of our variables. Every inner series must
    /// share a context and order and have zero constant term; the result is
    /// exact through that order.
    pub fn compose(&self, assign: &BTreeMap<String, Self>) -> Result<Self, SeriesError> {
        let mut inner_template: Option<&Self> = None;
        for v in &self.vars {
            let g = assign.get(v).unwrap_or_else(|| panic!("compose: no series assigned to `{v}`"));
            if !g.constant_term().is_zero() {
                return Err(SeriesError::CompositionWithUnit(v.clone()));
            }
            if g.order != self.order {
                return Err(SeriesError::OrderMismatch(self.order, g.order));
            }
            if let Some(t) = inner_template {
                t.check_compatible(g)?;
            }
            inner_template = Some(g);
        }
        let template = match inner_template {
            Some(t) => t,
            // No variables: self is a constant; promote it to an empty context.
            None => {
                return Ok(Self { vars: Vec::new(), order: self.order, terms: self.terms.clone() })
            }
        };
        let out_vars: Vec<&str> = template.vars.iter().map(|s| s.as_str()).collect();
        let order = template.order;

        // Memoized powers per variable; a zero-constant series to the k-th
        // power has minimum degree k, so exponents beyond the order vanish.
        let mut powers: Vec<Vec<Self>> = Vec::new();
        for v in &self.vars {
            let g = &assign[v];
            let mut ladder = vec![Self::one(&out_vars, order)];
            for k in 1..=(order as usize) {
                ladder.push(ladder[k - 1].mul(g));
            }
            powers.push(ladder);
        }

        let mut acc = Self::zero(&out_vars, order);
        for (exps, c) in &self.terms {
            if total(exps) > order as u64 {
                continue;
            }
            let mut term = Self::constant(&out_vars, order, c.clone());
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                term = term.mul(&powers[i][e as usize]);
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Divide by a series with unit constant term, exactly through the order.
    pub fn div_unit(&self, rhs: &Self) -> Self {
        self.check_compatible(rhs).expect("series order mismatch");
        let c0 = rhs.constant_term();
        assert!(c0 == C::one() || c0 == C::one().neg(), "div_unit needs constant term ±1");
        // Geometric inversion: 1/(c0 + r) = c0^-1 Σ (-c0^-1 r)^k, c0 = ±1.
        let mut rest = rhs.clone();
        let zero_key = vec![0u32; rhs.vars.len()];
        rest.terms.remove(&zero_key);
        let minus_scaled = rest.scale(&c0.neg()); // -c0^{-1} r, using c0^{-1} = c0
        let vars: Vec<&str> = self.vars.iter().map(|s| s.as_str()).collect();
        let mut inv = Self::one(&vars, self.order);
        let mut power = Self::one(&vars, self.order);
        for _ in 1..=self.order {
            power = power.mul(&minus_scaled);
            if power.is_zero() {
                break;
            }
            inv = inv.add(&power);
        }
        inv = inv.scale(&c0);
        self.mul(&inv)
    }

    pub fn map<D: Ring>(&self, f: impl Fn(&C) -> D) -> TruncSeries<D> {
        let mut out =
            TruncSeries::<D> { vars: self.vars.clone(), order: self.order, terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    pub fn from_integer_series(src: &TruncSeries<num_rational::BigRational>) -> TruncSeries<C> {
        src.map(|q| {
            assert!(q.is_integer(), "coefficient {q} is not an integer");
            C::from_bigint(q.numer())
        })
    }
}

/// Ascending-degree rendering with juxtaposed variables: `3s + 3s^2 + s^3`.
impl<C: Ring + fmt::Display> fmt::Display for TruncSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut entries: Vec<(&Vec<u32>, &C)> = self.terms.iter().collect();
        entries.sort_by_key(|(e, _)| (total(e), (*e).clone()));
        let one = C::one();
        let minus_one = one.neg();
        for (i, (exps, c)) in entries.iter().enumerate() {
            let body: String = self
                .vars
                .iter()
                .zip(exps.iter())
                .filter(|(_, &e)| e != 0)
                .map(|(v, &e)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
                .collect::<Vec<_>>()
                .join("");
            let printed = c.to_string();
            let (sign, mag) = if **c == minus_one && !body.is_empty() {
                ("-", String::new())
            } else if **c == one && !body.is_empty() {
                ("+", String::new())
            } else if let Some(stripped) = printed.strip_prefix('-') {
                ("-", stripped.to_string())
            } else {
                ("+", printed)
            };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else if sign == "-" {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{mag}{body}")?;
        }
        Ok(())
    }
}

pub type RationalSeries = TruncSeries<num_rational::BigRational>;
