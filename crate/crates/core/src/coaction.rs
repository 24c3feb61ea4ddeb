//! Comultiplication, counit, and the left coaction on the β-basis ring.
//!
//! Tensor powers of the cooperation ring are held in normal form: an
//! `arity`-fold tensor is a Laurent polynomial in the chain variables
//! z_0, …, z_arity, with factor s occupying (z_s, z_{s+1}) and adjacent
//! factors glued along the shared variable. Comultiplication at a slot
//! duplicates its right endpoint; the counit at a slot contracts the slot's
//! two endpoints. Both are plain substitutions, so every axiom check below is
//! an exact polynomial identity.

use std::collections::BTreeMap;

use crate::beta::{beta_product_coeffs, BetaPoly};
use crate::kk::{pprime_poly, KKElement};
use crate::laurent::LaurentPoly;
use crate::ring::Rational;

fn zvar(i: u32) -> String {
    format!("z{i}")
}

/// Element of the `arity`-fold tensor power of the cooperation ring over the
/// coefficient ring, in chain normal form f(z_0, …, z_arity).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorChain {
    arity: u32,
    poly: LaurentPoly,
}

impl TensorChain {
    pub fn from_kk(e: &KKElement) -> Self {
        let mut assign = BTreeMap::new();
        assign.insert("u".to_string(), LaurentPoly::var(&zvar(0)));
        assign.insert("v".to_string(), LaurentPoly::var(&zvar(1)));
        TensorChain {
            arity: 1,
            poly: e.poly().substitute(&assign).expect("chain variables are units"),
        }
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn poly(&self) -> &LaurentPoly {
        &self.poly
    }

    /// Comultiplication applied to factor `slot`: the factor's span
    /// (z_s, z_{s+1}) widens to (z_s, z_{s+2}) and later variables shift up.
    /// On a single factor this is f(z_0, z_1) ↦ f(z_0, z_2).
    pub fn psi(&self, slot: u32) -> Self {
        assert!(slot < self.arity, "slot {slot} out of range for arity {}", self.arity);
        let mut assign = BTreeMap::new();
        for j in (slot + 1)..=self.arity {
            assign.insert(zvar(j), LaurentPoly::var(&zvar(j + 1)));
        }
        TensorChain {
            arity: self.arity + 1,
            poly: self.poly.substitute(&assign).expect("chain variables are units"),
        }
    }

    /// Counit applied to factor `slot`: contract z_{s+1} onto z_s and close
    /// the gap.
    pub fn counit(&self, slot: u32) -> Self {
        assert!(slot < self.arity, "slot {slot} out of range for arity {}", self.arity);
        assert!(self.arity >= 2, "counit would empty the chain");
        let mut assign = BTreeMap::new();
        assign.insert(zvar(slot + 1), LaurentPoly::var(&zvar(slot)));
        for j in (slot + 2)..=self.arity {
            assign.insert(zvar(j), LaurentPoly::var(&zvar(j - 1)));
        }
        TensorChain {
            arity: self.arity - 1,
            poly: self.poly.substitute(&assign).expect("chain variables are units"),
        }
    }
}

/// Homogeneous components, by polynomial degree, of P^0, P^1, …, P^max_j
/// where P = 1 + p'_1 + p'_2 + ⋯ truncated beyond `max_deg`. Powers are
/// built incrementally so a full ladder costs max_j multiplications.
fn p_power_components(max_j: u32, max_deg: u32) -> Vec<BTreeMap<i64, LaurentPoly>> {
    let mut p_total = LaurentPoly::one();
    for a in 1..=max_deg {
        p_total = &p_total + &pprime_poly(a);
    }
    let truncate = |f: &LaurentPoly| -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (d, comp) in f.homogeneous_components() {
            if d <= max_deg as i64 {
                out = &out + &comp;
            }
        }
        out
    };
    let mut out = Vec::with_capacity(max_j as usize + 1);
    let mut power = LaurentPoly::one();
    out.push(power.homogeneous_components());
    for _ in 1..=max_j {
        power = truncate(&(&power * &p_total));
        out.push(power.homogeneous_components());
    }
    out
}

/// Left coaction value Σ_j c_j(u, v) ⊗ β_j in normal form: all coefficient
/// ring content, including any t-powers converted through the right unit
/// t ↦ v, lives in the left tensor factor.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Coaction {
    parts: BTreeMap<u32, LaurentPoly>,
}

impl Coaction {
    pub fn parts(&self) -> &BTreeMap<u32, LaurentPoly> {
        &self.parts
    }

    fn insert(&mut self, j: u32, c: LaurentPoly) {
        if c.is_zero() {
            return;
        }
        let entry = self.parts.entry(j).or_insert_with(LaurentPoly::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.parts.remove(&j);
        }
    }

    /// Product in the comodule algebra: coefficients multiply in the
    /// cooperation ring and the β-factors multiply by the structure
    /// constants.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Coaction::default();
        for (i, a) in &self.parts {
            for (j, b) in &rhs.parts {
                let ab = a * b;
                for (k, c) in beta_product_coeffs(*i, *j) {
                    out.insert(k, ab.scale(&Rational::from(c)));
                }
            }
        }
        out
    }

    /// Apply the counit to the left factor and fold back: Σ ε(c_j)·β_j,
    /// with ε(c_j) ∈ Z[t, t^{-1}] re-expanded over the β-basis. Integrality
    /// of ε on coaction values is asserted, not assumed.
    pub fn counit_left(&self) -> BetaPoly {
        let mut out = BetaPoly::zero();
        for (j, c) in &self.parts {
            let e = KKElement::new(c.clone()).expect("coaction coefficients use u, v").eps();
            for (exps, coeff) in e.terms() {
                assert!(coeff.is_integer(), "counit of a coaction must be integral");
                let m = if exps.is_empty() { 0 } else { exps[0] };
                out.add_assign_term(m, *j, coeff.numer());
            }
        }
        out
    }
}

/// η_L(t^m β_k) = u^{m-k} Σ_{i+j=k} (P^j)_{2i} v^j ⊗ β_j, extended
/// additively, where (P^j)_{2i} is the degree-i component of the j-th power
/// of P = 1 + p'_1 + p'_2 + ⋯.
pub fn eta_l(x: &BetaPoly) -> Coaction {
    let mut out = Coaction::default();
    let max_k = x.max_beta_index().unwrap_or(0);
    let powers = p_power_components(max_k, max_k);
    for ((m, k), coeff) in x.terms() {
        for j in 0..=*k {
            let i = *k - j;
            let Some(comp) = powers[j as usize].get(&(i as i64)) else {
                continue;
            };
            let mono = LaurentPoly::monomial(
                Rational::from(coeff.clone()),
                &[("u", m - *k as i64), ("v", j as i64)],
            );
            out.insert(j, &mono * comp);
        }
    }
    out
}

/// Both sides of coaction coassociativity in chain variables: index j maps
/// to the coefficient of β_j in K_*K ⊗ K_*K ⊗ (β-ring) normal form.
pub fn coaction_coassoc_sides(
    x: &BetaPoly,
) -> (BTreeMap<u32, LaurentPoly>, BTreeMap<u32, LaurentPoly>) {
    let eta = eta_l(x);

    // (ψ ⊗ 1): each coefficient c_j(u, v) becomes c_j(z_0, z_2).
    let mut lhs: BTreeMap<u32, LaurentPoly> = BTreeMap::new();
    for (j, c) in eta.parts() {
        let chain = TensorChain::from_kk(&KKElement::new(c.clone()).unwrap()).psi(0);
        lhs.insert(*j, chain.poly().clone());
    }

    // (1 ⊗ η_L): expand η_L(β_j) = u^{-j} Σ_{a+b=j} (P^b)_{2a} v^b ⊗ β_b on
    // the (z_1, z_2) span against each coefficient c_j(z_0, z_1); the u^{-j}
    // factor is part of η_L(β_j) itself, so no extra shift appears here.
    let mut rhs: BTreeMap<u32, LaurentPoly> = BTreeMap::new();
    let mut chain01 = BTreeMap::new();
    chain01.insert("u".to_string(), LaurentPoly::var("z0"));
    chain01.insert("v".to_string(), LaurentPoly::var("z1"));
    let mut chain12 = BTreeMap::new();
    chain12.insert("u".to_string(), LaurentPoly::var("z1"));
    chain12.insert("v".to_string(), LaurentPoly::var("z2"));
    for (j, c) in eta.parts() {
        let c01 = c.substitute(&chain01).expect("chain variables are units");
        let inner = eta_l(&BetaPoly::beta(*j));
        for (b, coeff) in inner.parts() {
            let coeff12 = coeff.substitute(&chain12).expect("chain variables are units");
            let term = &c01 * &coeff12;
            let entry = rhs.entry(*b).or_insert_with(LaurentPoly::zero);
            *entry = &*entry + &term;
        }
    }
    rhs.retain(|_, c| !c.is_zero());
    (lhs, rhs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCheck {
    pub name: String,
    pub pass: bool,
}

/// Exact verification of the comultiplication/counit/conjugation axioms and
/// the comodule axioms of the left coaction, on the standard generator
/// images through index `k_max`.
pub fn hopf_axiom_suite(k_max: u32) -> Vec<AxiomCheck> {
    let mut checks = Vec::new();
    let mut push = |name: String, pass: bool| checks.push(AxiomCheck { name, pass });

    // Conjugation swaps the two units, and the counit collapses the basis:
    // ε(p_1) = t while every higher p_i contains the factor (v - u).
    let u = KKElement::new(LaurentPoly::var("u")).unwrap();
    let v = KKElement::new(LaurentPoly::var("v")).unwrap();
    push("conj-units".to_string(), u.conj() == v && v.conj() == u);
    push(
        "counit-p1".to_string(),
        KKElement::new(crate::kk::p_poly(1)).unwrap().eps() == LaurentPoly::var("t"),
    );
    for i in 2..=k_max.max(2) {
        push(format!("counit-p{i}"), KKElement::new(crate::kk::p_poly(i)).unwrap().eps().is_zero());
    }

    for k in 1..=k_max {
        let e = crate::kk::i_star(&BetaPoly::term(1.into(), k as i64, k));
        let chain = TensorChain::from_kk(&e);
        let widened = chain.psi(0);
        push(format!("counit-left k={k}"), widened.counit(0) == chain);
        push(format!("counit-right k={k}"), widened.counit(1) == chain);
        push(format!("coassoc k={k}"), widened.psi(0) == widened.psi(1));
        push(format!("conj-involution k={k}"), e.conj().conj() == e);
        push(format!("counit-conj k={k}"), e.conj().eps() == e.eps());

        let x = BetaPoly::term(1.into(), k as i64, k);
        push(format!("coaction-counit k={k}"), eta_l(&x).counit_left() == x);
        let (lhs, rhs) = coaction_coassoc_sides(&x);
        push(format!("coaction-coassoc k={k}"), lhs == rhs);
        push(
            format!("coaction-integral k={k}"),
            eta_l(&x).parts().values().all(|c| KKElement::new(c.clone()).unwrap().is_integral()),
        );
    }

    // Multiplicativity of the coaction on a worked product.
    let b1 = BetaPoly::beta(1);
    push(
        "coaction-multiplicative b1*b1".to_string(),
        eta_l(&b1.mul(&b1)) == eta_l(&b1).mul(&eta_l(&b1)),
    );
    let b2 = BetaPoly::beta(2);
    push(
        "coaction-multiplicative b1*b2".to_string(),
        eta_l(&b1.mul(&b2)) == eta_l(&b1).mul(&eta_l(&b2)),
    );
    // Counit on a mixed element.
    let mixed = BetaPoly::parse("3 t^2 b1 - b2 + 5").unwrap();
    push("coaction-counit mixed".to_string(), eta_l(&mixed).counit_left() == mixed);

    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kk::p_poly;
    use crate::ring::rat;

    #[test]
    fn chain_normal_form() {
        let e = KKElement::new(p_poly(2)).unwrap();
        let chain = TensorChain::from_kk(&e);
        assert_eq!(chain.arity(), 1);
        assert_eq!(chain.poly().to_string(), "1/2*z1^2 - 1/2*z0*z1");
        let widened = chain.psi(0);
        assert_eq!(widened.arity(), 2);
        assert_eq!(widened.poly().to_string(), "1/2*z2^2 - 1/2*z0*z2");
    }

    #[test]
    fn counitality_and_coassociativity() {
        for i in 0..=6u32 {
            let chain = TensorChain::from_kk(&KKElement::new(p_poly(i)).unwrap());
            let widened = chain.psi(0);
            assert_eq!(widened.counit(0), chain, "left counit at p_{i}");
            assert_eq!(widened.counit(1), chain, "right counit at p_{i}");
            assert_eq!(widened.psi(0), widened.psi(1), "coassociativity at p_{i}");
        }
    }

    #[test]
    fn coaction_small_cases() {
        // η_L(t β_1) = v ⊗ β_1.
        let eta = eta_l(&BetaPoly::term(1.into(), 1, 1));
        assert_eq!(eta.parts().len(), 1);
        assert_eq!(eta.parts()[&1], LaurentPoly::var("v"));
        // η_L(t² β_2) = p_2 ⊗ β_1 + v² ⊗ β_2.
        let eta = eta_l(&BetaPoly::term(1.into(), 2, 2));
        assert_eq!(eta.parts().len(), 2);
        assert_eq!(eta.parts()[&1], p_poly(2));
        assert_eq!(eta.parts()[&2], LaurentPoly::monomial(rat(1, 1), &[("v", 2)]));
        // Scalars coact through the left unit.
        let eta = eta_l(&BetaPoly::term(3.into(), 2, 0));
        assert_eq!(eta.parts()[&0], LaurentPoly::monomial(rat(3, 1), &[("u", 2)]));
    }

    #[test]
    fn coaction_counit_recovers_input() {
        for src in ["b1", "t^2 b2", "3 t^2 b1 - b2 + 5", "t^-1 b3 + 2 b4"] {
            let x = BetaPoly::parse(src).unwrap();
            assert_eq!(eta_l(&x).counit_left(), x, "{src}");
        }
    }

    #[test]
    fn coaction_coassociativity_by_expansion() {
        for k in 1..=5u32 {
            let x = BetaPoly::term(1.into(), k as i64, k);
            let (lhs, rhs) = coaction_coassoc_sides(&x);
            assert_eq!(lhs, rhs, "k = {k}");
        }
        let mixed = BetaPoly::parse("t^2 b2 - 3 t b1").unwrap();
        let (lhs, rhs) = coaction_coassoc_sides(&mixed);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn full_suite_passes() {
        let checks = hopf_axiom_suite(6);
        for c in &checks {
            assert!(c.pass, "{}", c.name);
        }
    }
}
