//! The universal-coefficient computation: from a finitely presented
//! Z/2-graded module over the truncated β-basis ring, compute the twisted
//! K-groups as the quotient by the submodule generated by β_1 − 1, β_2, β_3, …
//! — concretely, the cokernel of each parity block of the degree-collapsed
//! relation matrix, in invariant-factor form.

use std::fmt;
use std::str::FromStr;

use serde_json::{Map, Number, Value};
use thiserror::Error;

use crate::presentation::Presentation;
use crate::snf::{lattice_quotient, AbGroup, IntMat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedGroup {
    pub parity0: AbGroup,
    pub parity1: AbGroup,
}

impl GradedGroup {
    pub fn zero() -> Self {
        GradedGroup { parity0: AbGroup::free(0), parity1: AbGroup::free(0) }
    }

    pub fn is_trivial(&self) -> bool {
        self.parity0.is_trivial() && self.parity1.is_trivial()
    }

    pub fn to_json(&self) -> Value {
        let ab = |g: &AbGroup| -> Value {
            let mut m = Map::new();
            m.insert("free_rank".to_string(), Value::Number(Number::from(g.free_rank)));
            m.insert(
                "torsion".to_string(),
                Value::Array(
                    g.torsion
                        .iter()
                        .map(|d| {
                            Value::Number(
                                Number::from_str(&d.to_string())
                                    .expect("integer literal is a valid JSON number"),
                            )
                        })
                        .collect(),
                ),
            );
            Value::Object(m)
        };
        let mut m = Map::new();
        m.insert("parity0".to_string(), ab(&self.parity0));
        m.insert("parity1".to_string(), ab(&self.parity1));
        Value::Object(m)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("serialization cannot fail")
    }
}

impl fmt::Display for GradedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parity 0: {}   parity 1: {}", self.parity0, self.parity1)
    }
}

/// Detected disagreement between independent computation routes; callers
/// treat this as an internal failure, never as a user error.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("internal consistency violation: {context}: quotient route gives {quotient}, Tor_0 route gives {tor0}")]
pub struct ConsistencyError {
    pub context: String,
    pub quotient: String,
    pub tor0: String,
}

/// The two degree-collapsed integer relation matrices (parity 0, parity 1);
/// rows index same-parity generators, columns index same-parity relations.
pub fn base_change(p: &Presentation) -> (IntMat, IntMat) {
    (p.relation_matrix(0), p.relation_matrix(1))
}

pub fn twisted_k(p: &Presentation) -> GradedGroup {
    let (m0, m1) = base_change(p);
    GradedGroup {
        parity0: lattice_quotient(p.generator_indices(0).len(), &m0),
        parity1: lattice_quotient(p.generator_indices(1).len(), &m1),
    }
}

/// The quotient computation cross-checked against Tor_0 from both resolution
/// modes of the homological engine. The routes share nothing beyond the
/// parsed presentation, so agreement is a real consistency signal.
pub fn twisted_k_checked(p: &Presentation) -> Result<GradedGroup, ConsistencyError> {
    let direct = twisted_k(p);
    for mode in [crate::tor::Mode::Free, crate::tor::Mode::Relative] {
        let report = crate::tor::tor(p, 0, mode).map_err(|e| ConsistencyError {
            context: format!("Tor_0 computation ({mode})"),
            quotient: direct.to_json_string(),
            tor0: e.to_string(),
        })?;
        let tor0 = &report.groups[0];
        if tor0 != &direct {
            return Err(ConsistencyError {
                context: format!("twisted_k vs Tor_0 ({mode})"),
                quotient: direct.to_json_string(),
                tor0: tor0.to_json_string(),
            });
        }
    }
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn parse(src: &str) -> Presentation {
        Presentation::from_json_str(src).unwrap()
    }

    fn cyclic(n: i64) -> Presentation {
        parse(&format!(
            r#"{{"truncation": 8, "generators": [{{"name": "x", "parity": 0}}],
                "relations": [[{{"gen": "x", "coeff": "{n} b1"}}]]}}"#
        ))
    }

    #[test]
    fn cyclic_twists() {
        for n in 2..=8i64 {
            let g = twisted_k(&cyclic(n));
            assert_eq!(g.parity0, AbGroup { free_rank: 0, torsion: vec![BigInt::from(n)] });
            assert!(g.parity1.is_trivial());
        }
        // n = 1: β_1 collapses to the unit and kills the generator.
        assert!(twisted_k(&cyclic(1)).is_trivial());
    }

    #[test]
    fn beta_one_minus_one_collapses_to_zero() {
        // (β_1 − 1)·x is exactly the base-change relation: the matrix entry
        // vanishes and the quotient is free.
        let p = parse(
            r#"{"truncation": 4, "generators": [{"name": "x", "parity": 0}],
                "relations": [[{"gen": "x", "coeff": "b1 - 1"}]]}"#,
        );
        let (m0, _) = base_change(&p);
        assert_eq!(m0.get(0, 0), &BigInt::from(0));
        assert_eq!(twisted_k(&p).parity0, AbGroup::free(1));
    }

    #[test]
    fn high_betas_collapse_to_zero() {
        let p = parse(
            r#"{"truncation": 4, "generators": [{"name": "x", "parity": 0}],
                "relations": [[{"gen": "x", "coeff": "b2"}]]}"#,
        );
        let (m0, _) = base_change(&p);
        assert_eq!(m0.get(0, 0), &BigInt::from(0));
        assert_eq!(twisted_k(&p).parity0, AbGroup::free(1));
    }

    #[test]
    fn identity_twist_module_dies() {
        // All β_i act by zero and β_1 ↦ 1 kills the generator.
        let rels: Vec<String> =
            (1..=8).map(|i| format!(r#"[{{"gen": "x", "coeff": "b{i}"}}]"#)).collect();
        let p = parse(&format!(
            r#"{{"truncation": 8, "generators": [{{"name": "x", "parity": 0}}],
                "relations": [{}]}}"#,
            rels.join(", ")
        ));
        assert!(twisted_k(&p).is_trivial());
    }

    #[test]
    fn free_presentations_stay_free() {
        let p = parse(
            r#"{"truncation": 8, "generators": [
                {"name": "a", "parity": 0}, {"name": "b", "parity": 0},
                {"name": "c", "parity": 1}
            ], "relations": []}"#,
        );
        let g = twisted_k(&p);
        assert_eq!(g.parity0, AbGroup::free(2));
        assert_eq!(g.parity1, AbGroup::free(1));
    }

    #[test]
    fn coprime_relations_cancel() {
        let p = parse(
            r#"{"truncation": 8, "generators": [{"name": "x", "parity": 0}],
                "relations": [
                    [{"gen": "x", "coeff": "3 b1"}],
                    [{"gen": "x", "coeff": "5 b1"}]
                ]}"#,
        );
        assert!(twisted_k(&p).is_trivial());
    }

    #[test]
    fn json_bytes_are_pinned() {
        let g = twisted_k(&cyclic(5));
        assert_eq!(
            g.to_json_string(),
            r#"{"parity0":{"free_rank":0,"torsion":[5]},"parity1":{"free_rank":0,"torsion":[]}}"#
        );
        assert_eq!(g.to_string(), "parity 0: Z/5   parity 1: 0");
    }

    #[test]
    fn presentation_moves_leave_the_answer_fixed() {
        let base = parse(
            r#"{"truncation": 4, "generators": [
                {"name": "x", "parity": 0}, {"name": "y", "parity": 0}
            ], "relations": [
                [{"gen": "x", "coeff": "2 b1"}],
                [{"gen": "x", "coeff": "b1"}, {"gen": "y", "coeff": "3 b1"}]
            ]}"#,
        );
        let expected = twisted_k(&base);

        // Permute generators.
        let permuted = parse(
            r#"{"truncation": 4, "generators": [
                {"name": "y", "parity": 0}, {"name": "x", "parity": 0}
            ], "relations": [
                [{"gen": "x", "coeff": "2 b1"}],
                [{"gen": "x", "coeff": "b1"}, {"gen": "y", "coeff": "3 b1"}]
            ]}"#,
        );
        assert_eq!(twisted_k(&permuted), expected);

        // Permute relations and add one relation to another.
        let mixed = parse(
            r#"{"truncation": 4, "generators": [
                {"name": "x", "parity": 0}, {"name": "y", "parity": 0}
            ], "relations": [
                [{"gen": "x", "coeff": "3 b1"}, {"gen": "y", "coeff": "3 b1"}],
                [{"gen": "x", "coeff": "2 b1"}]
            ]}"#,
        );
        assert_eq!(twisted_k(&mixed), expected);

        // Adjoin a generator together with the relation killing it.
        let adjoined = parse(
            r#"{"truncation": 4, "generators": [
                {"name": "x", "parity": 0}, {"name": "y", "parity": 0},
                {"name": "z", "parity": 0}
            ], "relations": [
                [{"gen": "x", "coeff": "2 b1"}],
                [{"gen": "x", "coeff": "b1"}, {"gen": "y", "coeff": "3 b1"}],
                [{"gen": "z", "coeff": "1"}]
            ]}"#,
        );
        assert_eq!(twisted_k(&adjoined), expected);
    }

    #[test]
    fn empty_presentations_are_legal() {
        let p = parse(r#"{"truncation": 2, "generators": [], "relations": []}"#);
        assert!(twisted_k(&p).is_trivial());
    }
}
