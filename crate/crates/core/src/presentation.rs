//! Finitely presented modules over the truncated β-basis ring, read from and
//! written to JSON.
//!
//! A presentation lists Z/2-graded generators and relations; each relation is
//! a list of terms pairing a generator with a β-ring coefficient. Validation
//! enforces: unique generator names, parities in {0, 1}, coefficients that
//! parse and respect the truncation, a constant t-exponent parity within
//! every coefficient, and a constant total parity across every relation.
//!
//! The degree-collapsed integer relation matrix of a given parity keeps the
//! rows of that total parity and the columns (generators) of the same parity;
//! coefficients collapse through the completed augmentation followed by
//! t ↦ 1. Terms landing on generators of the opposite parity fall outside
//! the block and do not contribute to it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beta::{augment_hat, BetaPoly};
use crate::snf::IntMat;

#[derive(Debug, Error)]
pub enum PresentationError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("truncation must be at least 1")]
    TruncationTooSmall,
    #[error("generator {index} has an empty name")]
    EmptyGeneratorName { index: usize },
    #[error("duplicate generator name `{name}`")]
    DuplicateGenerator { name: String },
    #[error("generator `{name}` has parity {parity}, expected 0 or 1")]
    BadParity { name: String, parity: u8 },
    #[error("relation {relation}, term {term}: unknown generator `{name}`")]
    UnknownGenerator { relation: usize, term: usize, name: String },
    #[error("relation {relation}, term {term}: {source}")]
    BadCoefficient {
        relation: usize,
        term: usize,
        #[source]
        source: crate::expr::ParseError,
    },
    #[error("relation {relation}, term {term}: β-index {index} exceeds truncation {truncation}")]
    IndexAboveTruncation { relation: usize, term: usize, index: u32, truncation: u32 },
    #[error("relation {relation}, term {term}: coefficient mixes t-exponent parities")]
    MixedCoefficientParity { relation: usize, term: usize },
    #[error("relation {relation}: terms disagree on total parity")]
    MixedRelationParity { relation: usize },
}

impl From<serde_json::Error> for PresentationError {
    fn from(e: serde_json::Error) -> Self {
        PresentationError::Json { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct RawGenerator {
    name: String,
    parity: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct RawTerm {
    gen: String,
    coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct RawPresentation {
    truncation: u32,
    generators: Vec<RawGenerator>,
    relations: Vec<Vec<RawTerm>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub parity: u8,
}

/// One relation: Σ coeff·generator, stored as (generator index, coefficient).
pub type Relation = Vec<(usize, BetaPoly)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    truncation: u32,
    generators: Vec<Generator>,
    relations: Vec<Relation>,
}

impl Presentation {
    pub fn new(
        truncation: u32,
        generators: Vec<Generator>,
        relations: Vec<Relation>,
    ) -> Result<Self, PresentationError> {
        let p = Presentation { truncation, generators, relations };
        p.validate()?;
        Ok(p)
    }

    pub fn from_json_str(src: &str) -> Result<Self, PresentationError> {
        let raw: RawPresentation = serde_json::from_str(src)?;
        let generators: Vec<Generator> = raw
            .generators
            .iter()
            .map(|g| Generator { name: g.name.clone(), parity: g.parity })
            .collect();
        let mut relations = Vec::with_capacity(raw.relations.len());
        for (ri, raw_rel) in raw.relations.iter().enumerate() {
            let mut rel = Vec::with_capacity(raw_rel.len());
            for (ti, raw_term) in raw_rel.iter().enumerate() {
                let gi =
                    generators.iter().position(|g| g.name == raw_term.gen).ok_or_else(|| {
                        PresentationError::UnknownGenerator {
                            relation: ri + 1,
                            term: ti + 1,
                            name: raw_term.gen.clone(),
                        }
                    })?;
                let coeff = BetaPoly::parse(&raw_term.coeff).map_err(|source| {
                    PresentationError::BadCoefficient { relation: ri + 1, term: ti + 1, source }
                })?;
                rel.push((gi, coeff));
            }
            relations.push(rel);
        }
        Self::new(raw.truncation, generators, relations)
    }

    pub fn to_json_string_pretty(&self) -> String {
        let raw = RawPresentation {
            truncation: self.truncation,
            generators: self
                .generators
                .iter()
                .map(|g| RawGenerator { name: g.name.clone(), parity: g.parity })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|rel| {
                    rel.iter()
                        .map(|(gi, c)| RawTerm {
                            gen: self.generators[*gi].name.clone(),
                            coeff: c.to_string(),
                        })
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("serialization cannot fail")
    }

    /// Same presentation re-validated under a different truncation.
    pub fn with_truncation(&self, truncation: u32) -> Result<Self, PresentationError> {
        Self::new(truncation, self.generators.clone(), self.relations.clone())
    }

    fn validate(&self) -> Result<(), PresentationError> {
        if self.truncation < 1 {
            return Err(PresentationError::TruncationTooSmall);
        }
        for (i, g) in self.generators.iter().enumerate() {
            if g.name.is_empty() {
                return Err(PresentationError::EmptyGeneratorName { index: i + 1 });
            }
            if g.parity > 1 {
                return Err(PresentationError::BadParity {
                    name: g.name.clone(),
                    parity: g.parity,
                });
            }
            if self.generators[..i].iter().any(|h| h.name == g.name) {
                return Err(PresentationError::DuplicateGenerator { name: g.name.clone() });
            }
        }
        for (ri, rel) in self.relations.iter().enumerate() {
            let mut relation_parity: Option<u8> = None;
            for (ti, (gi, c)) in rel.iter().enumerate() {
                assert!(*gi < self.generators.len(), "generator index in range");
                if c.is_zero() {
                    continue;
                }
                if let Some(top) = c.max_beta_index() {
                    if top > self.truncation {
                        return Err(PresentationError::IndexAboveTruncation {
                            relation: ri + 1,
                            term: ti + 1,
                            index: top,
                            truncation: self.truncation,
                        });
                    }
                }
                let sigma = c.t_parity().ok_or(PresentationError::MixedCoefficientParity {
                    relation: ri + 1,
                    term: ti + 1,
                })?;
                let rho = (sigma + self.generators[*gi].parity) % 2;
                match relation_parity {
                    None => relation_parity = Some(rho),
                    Some(r) if r != rho => {
                        return Err(PresentationError::MixedRelationParity { relation: ri + 1 })
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// Total parity of a relation; `None` when every term is zero.
    pub fn relation_parity(&self, index: usize) -> Option<u8> {
        let rel = &self.relations[index];
        for (gi, c) in rel {
            if c.is_zero() {
                continue;
            }
            let sigma = c.t_parity().expect("validated at construction");
            return Some((sigma + self.generators[*gi].parity) % 2);
        }
        None
    }

    /// Indices of the generators of a given parity, in declaration order.
    pub fn generator_indices(&self, parity: u8) -> Vec<usize> {
        self.generators
            .iter()
            .enumerate()
            .filter(|(_, g)| g.parity == parity)
            .map(|(i, _)| i)
            .collect()
    }

    /// Degree-collapsed integer relation matrix for one parity block:
    /// rows are the generators of that parity, columns the relations of that
    /// total parity, entries the coefficients pushed through the completed
    /// augmentation and t ↦ 1.
    pub fn relation_matrix(&self, parity: u8) -> IntMat {
        let gens = self.generator_indices(parity);
        let mut cols = Vec::new();
        for (ri, rel) in self.relations.iter().enumerate() {
            if self.relation_parity(ri) != Some(parity) {
                continue;
            }
            let mut col = vec![num_bigint::BigInt::from(0); gens.len()];
            for (gi, c) in rel {
                let Some(row) = gens.iter().position(|g| g == gi) else {
                    continue;
                };
                col[row] += augment_hat(c).at_one();
            }
            cols.push(col);
        }
        IntMat::from_cols(gens.len(), &cols)
    }
}
