//! The β-basis ring: integer combinations of t^m β_i with β_0 = 1, where the
//! product is governed by the multiplicative formal group law
//! β(s)β(t) = β(s + t + st) for the generating series β(s) = Σ β_i s^i.
//!
//! The product of basis elements has the closed form
//! β_i β_j = Σ_k k!/((k-j)!(k-i)!(i+j-k)!) β_k over max(i,j) ≤ k ≤ i+j,
//! with top coefficient C(i+j, i). The series extraction of the same
//! constants lives in the tests as an independent oracle and must never be
//! folded into this implementation.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::expr::ParseError;
use crate::ring::factorial;
use crate::series::{RationalSeries, TruncSeries};

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum BetaError {
    /// The injectivity probe is vacuous on zero.
    #[error("zero input")]
    ZeroInput,
    /// A β-index exceeded the ring truncation.
    #[error("β-index {index} exceeds truncation {truncation}")]
    IndexAboveTruncation { index: u32, truncation: u32 },
}

/// Integer combination Σ a_{m,i} t^m β_i, keyed by (t-exponent, β-index).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BetaPoly {
    terms: BTreeMap<(i64, u32), BigInt>,
}

impl BetaPoly {
    pub fn zero() -> Self {
        BetaPoly::default()
    }

    pub fn one() -> Self {
        Self::term(BigInt::one(), 0, 0)
    }

    pub fn from_int(n: i64) -> Self {
        Self::term(BigInt::from(n), 0, 0)
    }

    /// a · t^m β_i
    pub fn term(coeff: BigInt, t_exp: i64, beta_index: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert((t_exp, beta_index), coeff);
        }
        BetaPoly { terms }
    }

    pub fn beta(i: u32) -> Self {
        Self::term(BigInt::one(), 0, i)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, u32), &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, t_exp: i64, beta_index: u32) -> BigInt {
        self.terms.get(&(t_exp, beta_index)).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_assign_term(&mut self, t_exp: i64, beta_index: u32, coeff: &BigInt) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry((t_exp, beta_index)).or_insert_with(BigInt::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&(t_exp, beta_index));
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for ((m, i), c) in &rhs.terms {
            out.add_assign_term(*m, *i, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        BetaPoly { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        BetaPoly { terms: self.terms.iter().map(|(k, a)| (*k, a * c)).collect() }
    }

    /// Product in the full (untruncated) ring.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for ((ma, ia), ca) in &self.terms {
            for ((mb, ib), cb) in &rhs.terms {
                let c = ca * cb;
                let m = ma.checked_add(*mb).expect("t-exponent overflow");
                for (k, s) in beta_product_coeffs(*ia, *ib) {
                    out.add_assign_term(m, k, &(&c * s));
                }
            }
        }
        out
    }

    /// Largest β-index with a nonzero coefficient.
    pub fn max_beta_index(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, i)| i).max()
    }

    /// The common parity of all t-exponents, if there is one. The zero
    /// element has every parity; `None` means mixed parities.
    pub fn t_parity(&self) -> Option<u8> {
        let mut parity = None;
        for (m, _) in self.terms.keys() {
            let p = (m.rem_euclid(2)) as u8;
            match parity {
                None => parity = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        parity.or(Some(0))
    }

    /// Substitute t ↦ 1, leaving an integer combination of the β_i alone.
    pub fn collapse_t(&self) -> BTreeMap<u32, BigInt> {
        let mut out: BTreeMap<u32, BigInt> = BTreeMap::new();
        for ((_, i), c) in &self.terms {
            let slot = out.entry(*i).or_insert_with(BigInt::zero);
            *slot += c;
            if slot.is_zero() {
                out.remove(i);
            }
        }
        out
    }

    /// Text form `3 t^2 b1 - b2 + 5`: integer-coefficient sums of monomials
    /// `c t^m b<i>` with whitespace-separated factors.
    pub fn parse(src: &str) -> Result<Self, ParseError> {
        parse_beta(src)
    }
}

// Qualified path keeps the trait out of scope so `BigInt::one()` and friends
// stay unambiguous throughout this module.
impl crate::ring::Ring for BetaPoly {
    fn zero() -> Self {
        BetaPoly::zero()
    }
    fn one() -> Self {
        BetaPoly::one()
    }
    fn is_zero(&self) -> bool {
        BetaPoly::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        BetaPoly::add(self, rhs)
    }
    fn neg(&self) -> Self {
        BetaPoly::neg(self)
    }
    fn mul(&self, rhs: &Self) -> Self {
        BetaPoly::mul(self, rhs)
    }
    fn from_bigint(n: &BigInt) -> Self {
        BetaPoly::term(n.clone(), 0, 0)
    }
}

impl fmt::Display for BetaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, ((m, i), c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || (*m == 0 && *i == 0) {
                factors.push(mag.to_string());
            }
            match m {
                0 => {}
                1 => factors.push("t".to_string()),
                _ => factors.push(format!("t^{m}")),
            }
            if *i > 0 {
                factors.push(format!("b{i}"));
            }
            write!(f, "{}", factors.join(" "))?;
        }
        Ok(())
    }
}

fn parse_beta(src: &str) -> Result<BetaPoly, ParseError> {
    let bytes = src.as_bytes();
    let mut pos = 0usize;
    let mut out = BetaPoly::zero();
    let err = |pos: usize, msg: &str| ParseError { offset: pos + 1, message: msg.to_string() };
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let digits = |pos: &mut usize| -> Option<BigInt> {
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if *pos == start {
            return None;
        }
        Some(std::str::from_utf8(&bytes[start..*pos]).unwrap().parse().unwrap())
    };
    let signed = |pos: &mut usize| -> Option<BigInt> {
        let start = *pos;
        let neg = *pos < bytes.len() && bytes[*pos] == b'-';
        if neg {
            *pos += 1;
        }
        match digits(pos) {
            Some(n) => Some(if neg { -n } else { n }),
            None => {
                *pos = start;
                None
            }
        }
    };

    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(err(pos, "empty element"));
    }
    let mut first = true;
    while pos < bytes.len() {
        skip_ws(&mut pos);
        if pos == bytes.len() {
            break;
        }
        let sign = match bytes[pos] {
            b'+' if !first => {
                pos += 1;
                BigInt::one()
            }
            b'-' => {
                pos += 1;
                -BigInt::one()
            }
            _ if first => BigInt::one(),
            _ => return Err(err(pos, "expected `+` or `-` between terms")),
        };
        first = false;
        skip_ws(&mut pos);

        let mut coeff: Option<BigInt> = digits(&mut pos);
        let mut t_exp: Option<i64> = None;
        let mut beta_index: Option<u32> = None;
        loop {
            skip_ws(&mut pos);
            if pos < bytes.len() && bytes[pos] == b't' && t_exp.is_none() && beta_index.is_none() {
                pos += 1;
                if pos < bytes.len() && bytes[pos] == b'^' {
                    pos += 1;
                    let at = pos;
                    let n =
                        signed(&mut pos).ok_or_else(|| err(at, "expected integer t-exponent"))?;
                    t_exp =
                        Some(i64::try_from(&n).map_err(|_| err(at, "t-exponent out of range"))?);
                } else {
                    t_exp = Some(1);
                }
            } else if pos < bytes.len() && bytes[pos] == b'b' && beta_index.is_none() {
                pos += 1;
                let at = pos;
                let n = digits(&mut pos).ok_or_else(|| err(at, "expected β-index after `b`"))?;
                beta_index = Some(u32::try_from(&n).map_err(|_| err(at, "β-index out of range"))?);
            } else {
                break;
            }
        }
        if coeff.is_none() && t_exp.is_none() && beta_index.is_none() {
            return Err(err(pos, "expected a term"));
        }
        let c = sign * coeff.take().unwrap_or_else(BigInt::one);
        out.add_assign_term(t_exp.unwrap_or(0), beta_index.unwrap_or(0), &c);
    }
    Ok(out)
}

/// Coefficients (k, c^k_{ij}) of β_i β_j = Σ c^k_{ij} β_k.
///
/// c^k_{ij} = k!/((k-j)!(k-i)!(i+j-k)!), supported on max(i,j) ≤ k ≤ i+j.
pub fn beta_product_coeffs(i: u32, j: u32) -> Vec<(u32, BigInt)> {
    let lo = i.max(j);
    let hi = i + j;
    (lo..=hi)
        .map(|k| {
            let c = factorial(k as u64)
                / (factorial((k - j) as u64)
                    * factorial((k - i) as u64)
                    * factorial((i + j - k) as u64));
            (k, c)
        })
        .collect()
}

/// β_i β_j in the full ring.
pub fn beta_product(i: u32, j: u32) -> BetaPoly {
    let mut out = BetaPoly::zero();
    for (k, c) in beta_product_coeffs(i, j) {
        out.add_assign_term(0, k, &c);
    }
    out
}

/// The n-series [n](s) of the multiplicative formal group law, truncated.
/// [0] = 0, [n] = [n-1] + s + s·[n-1]; negative n inverts the recurrence by
/// dividing by the unit series 1 + s.
pub fn n_series(n: i64, order: u32) -> RationalSeries {
    let s = RationalSeries::var(&["s"], order, "s");
    let one = RationalSeries::one(&["s"], order);
    let mut acc = RationalSeries::zero(&["s"], order);
    if n >= 0 {
        for _ in 0..n {
            // [k+1] = [k] + s + s[k]
            acc = acc.add(&s).add(&s.mul(&acc));
        }
    } else {
        let one_plus_s = one.add(&s);
        for _ in 0..(-n) {
            // [k-1] = ([k] - s)/(1 + s)
            acc = acc.sub(&s).div_unit(&one_plus_s);
        }
    }
    acc
}

/// Generating series β(x) = Σ_{i ≤ order} β_i x^i in the given context.
pub fn beta_series(vars: &[&str], order: u32, var: &str) -> TruncSeries<BetaPoly> {
    let mut out = TruncSeries::<BetaPoly>::zero(vars, order);
    let pos =
        out.vars().iter().position(|v| v == var).expect("beta_series: variable not in context");
    for i in 0..=order {
        let mut exps = vec![0u32; out.vars().len()];
        exps[pos] = i;
        out.add_term(exps, BetaPoly::beta(i));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    Mismatch { exponents: Vec<u32>, lhs: String, rhs: String },
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CheckOutcome::Pass)
    }
}

fn first_mismatch(a: &TruncSeries<BetaPoly>, b: &TruncSeries<BetaPoly>) -> CheckOutcome {
    let mut keys: Vec<Vec<u32>> = a.terms().map(|(e, _)| e.clone()).collect();
    keys.extend(b.terms().map(|(e, _)| e.clone()));
    keys.sort();
    keys.dedup();
    for e in keys {
        let ca = a.coeff(&e);
        let cb = b.coeff(&e);
        if ca != cb {
            return CheckOutcome::Mismatch {
                exponents: e,
                lhs: ca.to_string(),
                rhs: cb.to_string(),
            };
        }
    }
    CheckOutcome::Pass
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FglReport {
    /// β(s)β(t) = β(s + t + st), coefficientwise through the order.
    pub product: CheckOutcome,
    /// β(s)^m = β([m](s)) through the order.
    pub power: CheckOutcome,
    pub order: u32,
    pub power_exponent: u32,
}

impl FglReport {
    pub fn passed(&self) -> bool {
        self.product.passed() && self.power.passed()
    }
}

/// Expand both formal-group-law identities and report the first mismatch, if
/// any, with its exponent vector and both coefficients.
pub fn fgl_identity_check(m: u32, order: u32) -> FglReport {
    assert!(order >= 1, "order must be at least 1");
    // Two-variable product law.
    let lhs = beta_series(&["s", "t"], order, "s").mul(&beta_series(&["s", "t"], order, "t"));
    let s = TruncSeries::<BetaPoly>::var(&["s", "t"], order, "s");
    let t = TruncSeries::<BetaPoly>::var(&["s", "t"], order, "t");
    let f = s.add(&t).add(&s.mul(&t));
    let outer = beta_series(&["r"], order, "r");
    let mut assign = BTreeMap::new();
    assign.insert("r".to_string(), f);
    let rhs = outer.compose(&assign).expect("s + t + st has no constant term");
    let product = first_mismatch(&lhs, &rhs);

    // Power law.
    let lhs_pow = beta_series(&["s"], order, "s").pow(m);
    let m_series: TruncSeries<BetaPoly> =
        TruncSeries::from_integer_series(&n_series(m as i64, order));
    let mut assign = BTreeMap::new();
    assign.insert("r".to_string(), m_series);
    let rhs_pow =
        beta_series(&["r"], order, "r").compose(&assign).expect("[m](s) has no constant term");
    let power = first_mismatch(&lhs_pow, &rhs_pow);

    FglReport { product, power, order, power_exponent: m }
}

/// Structure constants of the truncation by span{β_i : i > D}, which is an
/// ideal because products only raise β-indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncRing {
    d: u32,
    table: Vec<BigInt>,
}

impl TruncRing {
    pub fn new(d: u32) -> Self {
        assert!(d >= 1, "truncation must be at least 1");
        let n = (d + 1) as usize;
        let mut table = vec![BigInt::zero(); n * n * n];
        for i in 0..=d {
            for j in 0..=d {
                for (k, c) in beta_product_coeffs(i, j) {
                    if k <= d {
                        table[((i as usize * n) + j as usize) * n + k as usize] = c;
                    }
                }
            }
        }
        let ring = TruncRing { d, table };
        ring.validate();
        ring
    }

    /// Structure constant perturbation for fault-injection tests: the
    /// self-check suites must notice when a table entry is wrong.
    #[cfg(test)]
    pub(crate) fn perturbed(d: u32, at: (u32, u32, u32), delta: i64) -> Self {
        let mut ring = Self::new(d);
        let n = (d + 1) as usize;
        let idx = ((at.0 as usize * n) + at.1 as usize) * n + at.2 as usize;
        ring.table[idx] += BigInt::from(delta);
        ring
    }

    fn validate(&self) {
        let d = self.d;
        for i in 0..=d {
            for j in 0..=d {
                for k in 0..=d {
                    let c = self.c(i, j, k);
                    // Symmetry and support window.
                    assert_eq!(c, self.c(j, i, k), "structure constants must be symmetric");
                    if k < i.max(j) || k > i + j {
                        assert!(c.is_zero(), "support outside [max(i,j), i+j]");
                    }
                }
                // Top coefficient C(i+j, i) whenever it survives truncation.
                if i + j <= d {
                    assert_eq!(
                        self.c(i, j, i + j),
                        binomial(BigInt::from(i + j), BigInt::from(i)),
                        "top structure constant must be binomial"
                    );
                }
                // The augmentation β_0, β_1 ↦ 1, β_{≥2} ↦ 0 stays
                // multiplicative through the truncation: dropped terms have
                // index > D ≥ 1 and die under it anyway.
                let lhs: BigInt = (0..=1.min(d)).map(|k| self.c(i, j, k)).sum();
                let rhs = BigInt::from(i64::from(i <= 1) * i64::from(j <= 1));
                assert_eq!(lhs, rhs, "augmentation must stay multiplicative");
            }
        }
    }

    pub fn truncation(&self) -> u32 {
        self.d
    }

    pub fn c(&self, i: u32, j: u32, k: u32) -> BigInt {
        let n = (self.d + 1) as usize;
        self.table[((i as usize * n) + j as usize) * n + k as usize].clone()
    }

    fn check_element(&self, x: &BetaPoly) -> Result<(), BetaError> {
        if let Some(i) = x.max_beta_index() {
            if i > self.d {
                return Err(BetaError::IndexAboveTruncation { index: i, truncation: self.d });
            }
        }
        Ok(())
    }

    /// Product in the truncated ring: indices above D are discarded.
    pub fn multiply(&self, x: &BetaPoly, y: &BetaPoly) -> Result<BetaPoly, BetaError> {
        self.check_element(x)?;
        self.check_element(y)?;
        let mut out = BetaPoly::zero();
        for ((ma, ia), ca) in x.terms() {
            for ((mb, ib), cb) in y.terms() {
                let c = ca * cb;
                let m = ma.checked_add(*mb).expect("t-exponent overflow");
                let (ia, ib) = (*ia, *ib);
                for k in ia.max(ib)..=self.d.min(ia + ib) {
                    out.add_assign_term(m, k, &(&c * self.c(ia, ib, k)));
                }
            }
        }
        Ok(out)
    }
}

/// Integer Laurent polynomial in t: the value ring of the completed
/// augmentation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HatScalar {
    terms: BTreeMap<i64, BigInt>,
}

impl HatScalar {
    pub fn zero() -> Self {
        HatScalar::default()
    }

    pub fn term(coeff: BigInt, t_exp: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(t_exp, coeff);
        }
        HatScalar { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Self::term(BigInt::from(n), 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, t_exp: i64) -> BigInt {
        self.terms.get(&t_exp).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            let slot = out.terms.entry(*m).or_insert_with(BigInt::zero);
            *slot += c;
            if slot.is_zero() {
                out.terms.remove(m);
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = HatScalar::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.checked_add(*mb).expect("t-exponent overflow");
                let slot = out.terms.entry(m).or_insert_with(BigInt::zero);
                *slot += ca * cb;
                if slot.is_zero() {
                    out.terms.remove(&m);
                }
            }
        }
        out
    }

    /// Evaluate at t = 1.
    pub fn at_one(&self) -> BigInt {
        self.terms.values().sum()
    }
}

impl fmt::Display for HatScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            match (m, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{mag} t")?,
                (_, true) => write!(f, "t^{m}")?,
                (_, false) => write!(f, "{mag} t^{m}")?,
            }
        }
        Ok(())
    }
}

/// The completed augmentation: t ↦ t, β_0 ↦ 1, β_1 ↦ 1, β_{i≥2} ↦ 0.
pub fn augment_hat(x: &BetaPoly) -> HatScalar {
    let mut out = HatScalar::zero();
    for ((m, i), c) in x.terms() {
        if *i <= 1 {
            out = out.add(&HatScalar::term(c.clone(), *m));
        }
    }
    out
}

/// One leading-coefficient comparison in the injectivity probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeadingCheck {
    pub t_exp: i64,
    pub input_coeff: BigInt,
    pub expected: BigInt,
    pub actual: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectivityReport {
    pub product_nonzero: bool,
    pub top_beta_index: u32,
    /// For each t-exponent carrying the top β-index, the product coefficient
    /// at β_{i + top} must be C(i + top, i) times the input coefficient.
    pub leading_checks: Vec<LeadingCheck>,
    pub holds: bool,
}

/// Multiplication by β_i on the full ring kills nothing: the top β-index of
/// x·β_i is i + j_max with coefficient C(i + j_max, i)·(top coefficient of x),
/// and lower-index terms of x cannot reach it.
pub fn injectivity_witness(i: u32, x: &BetaPoly) -> Result<InjectivityReport, BetaError> {
    if x.is_zero() {
        return Err(BetaError::ZeroInput);
    }
    let top = x.max_beta_index().expect("nonzero element has a top index");
    let product = x.mul(&BetaPoly::beta(i));
    let bin = binomial(BigInt::from(i + top), BigInt::from(i));
    let mut leading_checks = Vec::new();
    let mut holds = true;
    for ((m, j), c) in x.terms() {
        if *j != top {
            continue;
        }
        let expected = &bin * c;
        let actual = product.coeff(*m, i + top);
        if actual != expected {
            holds = false;
        }
        leading_checks.push(LeadingCheck { t_exp: *m, input_coeff: c.clone(), expected, actual });
    }
    Ok(InjectivityReport {
        product_nonzero: !product.is_zero(),
        top_beta_index: top,
        leading_checks,
        holds: holds && !product.is_zero(),
    })
}
