//! Homological engine over the degree-collapsed truncated ring Λ_D with
//! Z-basis β_0, …, β_D (β_0 the unit): chain complexes of finitely generated
//! abelian groups, free and relative resolutions of presented Λ_D-modules,
//! and the derived functors of − ⊗_{Λ_D} Z, where Z carries the module
//! structure β_0, β_1 ↦ 1 and β_{≥2} ↦ 0.
//!
//! Everything is Z-linear underneath: a Λ_D-module presented on g generators
//! is stored through its free cover Z^{g·(D+1)}, with the β_j action given
//! blockwise by the structure-constant table. Kernels, lattice quotients and
//! homology reduce to exact integer linear algebra.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{Map, Number, Value};
use thiserror::Error;

use crate::beta::TruncRing;
use crate::presentation::Presentation;
use crate::snf::{
    col_hnf, hnf_coords, in_col_span, kernel_basis, kernel_with_moduli, lattice_quotient, snf_with,
    AbGroup, IntMat, Track,
};
use crate::twist::{twisted_k, GradedGroup};

/// Caveat attached to every Tor report: the ring is a truncation, so groups
/// in homological degree ≥ 1 are invariants of the truncated algebra.
pub const TRUNCATION_CAVEAT: &str = "higher Tor computed over truncated ring";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Resolve by free modules Λ^k, syzygy kernels computed exactly.
    Free,
    /// Resolve by extended modules U ⊗_Z Λ built from the underlying
    /// abelian group of each successive kernel.
    Relative,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Free => write!(f, "free"),
            Mode::Relative => write!(f, "relative"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorError {
    /// The putative differentials do not compose to zero (modulo the stated
    /// torsion): the offending map is ∂_stage.
    #[error("differentials do not compose to zero at differential {stage}")]
    NotAComplex { stage: usize },
    /// Two independent computation routes disagree; this is an internal
    /// failure, never a statement about the input.
    #[error("internal consistency violation: Tor_0 is {tor0} but the direct quotient is {quotient} ({mode} mode)")]
    Tor0Mismatch { mode: Mode, tor0: String, quotient: String },
}

/// β_j · v for a block vector v ∈ Z^{blocks·(D+1)}: every block holds the
/// Λ_D-coordinates of one free-module component and is multiplied through
/// the structure-constant table.
pub fn beta_act(ring: &TruncRing, blocks: usize, v: &[BigInt], j: u32) -> Vec<BigInt> {
    let dim = (ring.truncation() + 1) as usize;
    assert_eq!(v.len(), blocks * dim, "block vector length mismatch");
    let mut out = vec![BigInt::zero(); v.len()];
    for b in 0..blocks {
        for i in 0..dim {
            let x = &v[b * dim + i];
            if x.is_zero() {
                continue;
            }
            for k in 0..dim {
                let c = ring.c(j, i as u32, k as u32);
                if !c.is_zero() {
                    out[b * dim + k] += c * x;
                }
            }
        }
    }
    out
}

/// Z-generators of the Λ_D-span of the given block vectors: every β_j·v.
pub fn lambda_closure(ring: &TruncRing, blocks: usize, vecs: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let d = ring.truncation();
    vecs.iter().flat_map(|v| (0..=d).map(|j| beta_act(ring, blocks, v, j))).collect()
}

/// Full Z-matrix of the Λ_D-module map Λ^k → Λ^m determined by generator
/// images (block vectors in Z^{m·(D+1)}). Source coordinate (c, j) — the
/// j-th basis element of the c-th summand — is column c·(D+1)+j, matching
/// the block-vector layout on both sides.
pub fn linearize(ring: &TruncRing, target_blocks: usize, images: &[Vec<BigInt>]) -> IntMat {
    let dim = (ring.truncation() + 1) as usize;
    let cols: Vec<Vec<BigInt>> = images
        .iter()
        .flat_map(|g| (0..dim).map(|j| beta_act(ring, target_blocks, g, j as u32)))
        .collect();
    IntMat::from_cols(target_blocks * dim, &cols)
}

/// Z-module generators (a lattice basis) of the kernel of the Λ_D-module map
/// with the given generator images. The kernel of a module map is closed
/// under the β action, so any Z-basis of this lattice generates it over Λ_D.
pub fn lambda_map_kernel(ring: &TruncRing, target_blocks: usize, images: &[Vec<BigInt>]) -> IntMat {
    kernel_basis(&linearize(ring, target_blocks, images))
}

/// Greedy thinning of a kernel basis to Λ_D-module generators: keep a column
/// only when it escapes the Λ-span of the columns kept so far. The kept set
/// still generates (every skipped vector is in its span), which keeps the
/// ranks of the following resolution stage small.
fn thin_lambda_generators(ring: &TruncRing, blocks: usize, ker: &IntMat) -> Vec<Vec<BigInt>> {
    let mut kept: Vec<Vec<BigInt>> = Vec::new();
    let mut span_gens: Vec<Vec<BigInt>> = Vec::new();
    let mut span_hnf: Option<IntMat> = None;
    for c in 0..ker.cols() {
        let v = ker.column(c);
        if let Some(h) = &span_hnf {
            if in_col_span(h, &v) {
                continue;
            }
        }
        for j in 0..=ring.truncation() {
            span_gens.push(beta_act(ring, blocks, &v, j));
        }
        span_hnf = Some(col_hnf(&IntMat::from_cols(v.len(), &span_gens)));
        kept.push(v);
    }
    kept
}

/// Resolution of M = Λ^g / (Λ-span of relation columns) by free modules:
///
///   … → Λ^{r_2} → Λ^{r_1} → Λ^{r_0 = g} → M → 0
///
/// Each differential is recorded by its generator images; stage s+1 is built
/// on thinned Λ-generators of the exact kernel of stage s's differential, so
/// image = kernel holds at every interior stage by construction.
#[derive(Debug, Clone)]
pub struct FreeResolution {
    dim: usize,
    /// ranks[s] = Λ-rank of stage s; ranks[0] = g.
    pub ranks: Vec<usize>,
    /// images[s][c] ∈ Z^{ranks[s]·(D+1)}: image of the c-th generator of
    /// stage s+1. images.len() = ranks.len() − 1.
    pub(crate) images: Vec<Vec<Vec<BigInt>>>,
}

pub fn free_resolution(
    ring: &TruncRing,
    gens: usize,
    relations: &[Vec<BigInt>],
    length: usize,
) -> FreeResolution {
    let dim = (ring.truncation() + 1) as usize;
    for r in relations {
        assert_eq!(r.len(), gens * dim, "relation column length mismatch");
    }
    let mut ranks = vec![gens];
    let mut images: Vec<Vec<Vec<BigInt>>> = Vec::new();
    let mut current: Vec<Vec<BigInt>> = relations.to_vec();
    for s in 0..length {
        ranks.push(current.len());
        images.push(current.clone());
        if s + 1 == length {
            break;
        }
        let a = linearize(ring, ranks[s], &current);
        let ker = lambda_map_kernel(ring, ranks[s], &current);
        if cfg!(debug_assertions) {
            for c in 0..ker.cols() {
                assert!(
                    a.mat_vec(&ker.column(c)).iter().all(|x| x.is_zero()),
                    "kernel basis must be annihilated"
                );
            }
        }
        current = thin_lambda_generators(ring, ranks[s + 1], &ker);
    }
    FreeResolution { dim, ranks, images }
}

/// Resolution of M by extended modules E_s = U(M_s) ⊗_Z Λ_D, where U(M_s)
/// is the underlying abelian group of the s-th kernel in minimal
/// (invariant-factor) form. The counit E_s → M_s is split surjective over Z
/// by construction, and the composite differentials E_{s+1} → E_s land in
/// the recorded torsion lattices.
#[derive(Debug, Clone)]
pub struct RelativeResolution {
    pub(crate) dim: usize,
    pub(crate) stages: Vec<RelStage>,
    /// Z-lift of M into E_0 on free-cover basis vectors (one column per
    /// basis vector of Z^{g·(D+1)}); counit ∘ lift = identity modulo the
    /// relation lattice.
    pub(crate) lift: IntMat,
}

impl RelativeResolution {
    /// The Z-linear section of the stage-0 counit; exposed so callers can
    /// audit the split-surjectivity contract.
    pub fn lift(&self) -> &IntMat {
        &self.lift
    }

    /// Number of resolved stages (resolution length + 1).
    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Invariant-factor orders of U(M_s): 0 marks a free generator, other
    /// entries are ≥ 2.
    pub fn orders(&self, s: usize) -> &[BigInt] {
        &self.stages[s].orders
    }

    /// Generators of M_s as block vectors in the previous stage's Z-space
    /// (for s = 0: in the free cover Z^{g·(D+1)}).
    pub fn generators(&self, s: usize) -> &[Vec<BigInt>] {
        &self.stages[s].gen_vectors
    }
}

#[derive(Debug, Clone)]
pub(crate) struct RelStage {
    /// Invariant-factor orders of U(M_s): 0 marks a free generator, other
    /// entries are ≥ 2. Generators of order 1 are dropped entirely.
    pub(crate) orders: Vec<BigInt>,
    /// Generators of M_s inside the previous stage's Z-space (for s = 0:
    /// inside the free cover Z^{g·(D+1)}).
    pub(crate) gen_vectors: Vec<Vec<BigInt>>,
}

pub fn relative_resolution(
    ring: &TruncRing,
    gens: usize,
    relations: &[Vec<BigInt>],
    length: usize,
) -> RelativeResolution {
    let dim = (ring.truncation() + 1) as usize;
    for r in relations {
        assert_eq!(r.len(), gens * dim, "relation column length mismatch");
    }
    let mut stages: Vec<RelStage> = Vec::new();
    let mut lift = IntMat::zeros(0, 0);

    // State entering each round: the ambient Z-space (with its Λ-block
    // structure), a column-echelon basis of the subgroup P that carries the
    // current kernel module M_s, and the lattice of elements that are zero
    // in M_s. From stage 1 on the zero lattice is diagonal — o_i at each
    // coordinate of the i-th block — recorded positionally in zero_moduli.
    let mut ambient_blocks = gens;
    let mut ambient_z = gens * dim;
    let mut p_basis = IntMat::identity(ambient_z);
    let mut zero_lattice: Vec<Vec<BigInt>> = lambda_closure(ring, gens, relations);
    let mut zero_moduli: Option<Vec<BigInt>> = None;

    for stage in 0..=length {
        // U(M_s) = P / zero_lattice in invariant-factor form.
        let coords: Vec<Vec<BigInt>> = zero_lattice
            .iter()
            .map(|z| hnf_coords(&p_basis, z).expect("zero lattice lies inside the kernel subgroup"))
            .collect();
        let c = IntMat::from_cols(p_basis.cols(), &coords);
        let res = snf_with(&c, Track::U_PAIR);
        let mut orders: Vec<BigInt> = Vec::new();
        let mut gen_vectors: Vec<Vec<BigInt>> = Vec::new();
        let mut kept_rows: Vec<usize> = Vec::new();
        for i in 0..p_basis.cols() {
            let order = if i < res.rank { res.s.get(i, i).clone() } else { BigInt::zero() };
            if order.is_one() {
                continue;
            }
            orders.push(order);
            let mut g = p_basis.mat_vec(&res.u_inv.column(i));
            if let Some(zm) = &zero_moduli {
                // Generators are only defined modulo the zero lattice; the
                // smallest representative keeps later stages' entries small.
                for (x, m) in g.iter_mut().zip(zm) {
                    if !m.is_zero() {
                        *x = x.mod_floor(m);
                    }
                }
            }
            gen_vectors.push(g);
            kept_rows.push(i);
        }

        if stage == 0 {
            // Z-lift of the presented module into E_0: a free-cover vector
            // with transformed coordinates y = u·x lifts to Σ y_i·ŵ_i⊗β_0
            // over the kept generators; dropped rows have order 1, so their
            // generators already lie in the relation lattice.
            lift = IntMat::from_fn(orders.len() * dim, ambient_z, |r, a| {
                if r % dim == 0 {
                    res.u.get(kept_rows[r / dim], a).clone()
                } else {
                    BigInt::zero()
                }
            });
        }

        let k = orders.len();
        stages.push(RelStage { orders, gen_vectors });
        if stage == length {
            break;
        }

        // Next round: M_{s+1} = ker(E_s → M_s). Its carrier subgroup is the
        // preimage of the zero lattice under the counit — the kernel of the
        // counit into the ambient space taken modulo the zero lattice — and
        // the elements that die in it form the torsion lattice of E_s, so
        // o_i·e is a known solution at every coordinate of a torsion block.
        let last = &stages[stage];
        let counit_cols: Vec<Vec<BigInt>> = last
            .gen_vectors
            .iter()
            .flat_map(|g| (0..dim).map(|j| beta_act(ring, ambient_blocks, g, j as u32)))
            .collect();
        let counit = IntMat::from_cols(ambient_z, &counit_cols);
        let next_z = k * dim;
        let sol_moduli: Vec<BigInt> =
            last.orders.iter().flat_map(|o| std::iter::repeat(o.clone()).take(dim)).collect();
        let next_p = match &zero_moduli {
            Some(m) => kernel_with_moduli(&counit, m, &sol_moduli),
            None => {
                // Stage 0's zero lattice is a general Λ-closure; diagonalize
                // it once so the kernel can run against row moduli.
                let zero_mat = IntMat::from_cols(ambient_z, &zero_lattice);
                let zres = snf_with(&zero_mat, Track::U_PAIR);
                let mut row_moduli = vec![BigInt::zero(); ambient_z];
                for (i, d) in zres.diagonal().into_iter().enumerate() {
                    row_moduli[i] = d;
                }
                kernel_with_moduli(&zres.u.mul(&counit), &row_moduli, &sol_moduli)
            }
        };

        let mut next_zero: Vec<Vec<BigInt>> = Vec::new();
        for (i, o) in last.orders.iter().enumerate() {
            if o.is_zero() {
                continue;
            }
            for j in 0..dim {
                let mut v = vec![BigInt::zero(); next_z];
                v[i * dim + j] = o.clone();
                next_zero.push(v);
            }
        }
        if cfg!(debug_assertions) {
            for z in &next_zero {
                assert!(
                    hnf_coords(&next_p, z).is_some(),
                    "torsion lattice must lie inside the kernel subgroup"
                );
            }
        }

        ambient_blocks = k;
        ambient_z = next_z;
        p_basis = next_p;
        zero_lattice = next_zero;
        zero_moduli = Some(sol_moduli);
    }

    RelativeResolution { dim, stages, lift }
}

/// A bounded chain complex of finitely generated abelian groups in presented
/// form: stage s is Z^{ranks[s]} modulo the diagonal torsion lattice with
/// the given generator orders (0 = free generator), and maps[s] is the
/// matrix of ∂_{s+1}: stage s+1 → stage s.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    ranks: Vec<usize>,
    orders: Vec<Vec<BigInt>>,
    maps: Vec<IntMat>,
}

impl ChainComplex {
    pub fn new(ranks: Vec<usize>, orders: Vec<Vec<BigInt>>, maps: Vec<IntMat>) -> Self {
        assert_eq!(orders.len(), ranks.len(), "orders per stage");
        assert_eq!(maps.len() + 1, ranks.len().max(1), "one map between consecutive stages");
        for (s, o) in orders.iter().enumerate() {
            assert_eq!(o.len(), ranks[s], "one order per generator");
            assert!(
                o.iter().all(|x| x.is_zero() || x > &BigInt::one()),
                "orders are 0 (free) or at least 2"
            );
        }
        for (s, m) in maps.iter().enumerate() {
            assert_eq!(m.rows(), ranks[s], "map target rank");
            assert_eq!(m.cols(), ranks[s + 1], "map source rank");
            // The differential must descend to the stated quotients:
            // o_i times column i must land in the target torsion lattice.
            for (i, o) in orders[s + 1].iter().enumerate() {
                if o.is_zero() {
                    continue;
                }
                for (r, target_order) in orders[s].iter().enumerate() {
                    let x = o * m.get(r, i);
                    let ok = if target_order.is_zero() {
                        x.is_zero()
                    } else {
                        (&x % target_order).is_zero()
                    };
                    assert!(ok, "differential does not descend to the torsion quotient");
                }
            }
        }
        ChainComplex { ranks, orders, maps }
    }

    /// A complex of free abelian groups given by its differential matrices
    /// (∂_1, ∂_2, …); stage ranks are read off the shapes.
    pub fn free(maps: Vec<IntMat>) -> Self {
        assert!(!maps.is_empty(), "use ChainComplex::new for an empty complex");
        let mut ranks: Vec<usize> = vec![maps[0].rows()];
        for m in &maps {
            ranks.push(m.cols());
        }
        let orders = ranks.iter().map(|&r| vec![BigInt::zero(); r]).collect();
        ChainComplex::new(ranks, orders, maps)
    }

    pub fn stages(&self) -> usize {
        self.ranks.len()
    }

    fn torsion_mat(&self, s: usize) -> IntMat {
        let cols: Vec<Vec<BigInt>> = self.orders[s]
            .iter()
            .enumerate()
            .filter(|(_, o)| !o.is_zero())
            .map(|(i, o)| {
                let mut v = vec![BigInt::zero(); self.ranks[s]];
                v[i] = o.clone();
                v
            })
            .collect();
        IntMat::from_cols(self.ranks[s], &cols)
    }
}

/// Homology groups H_0, …, H_{top} of the complex. H_s is the quotient of
/// the subgroup of stage s killed by ∂_s (modulo torsion below) by the image
/// of ∂_{s+1} together with stage s's own torsion lattice.
pub fn homology(c: &ChainComplex) -> Result<Vec<AbGroup>, TorError> {
    let n = c.stages();
    let mut out = Vec::with_capacity(n);
    for s in 0..n {
        let rank_s = c.ranks[s];
        let p_basis = if s == 0 {
            IntMat::identity(rank_s)
        } else {
            // Cycles of stage s: kernel of ∂_s into stage s−1 taken modulo
            // the target's torsion orders; o_j·e_j is a cycle for every
            // torsion generator because the complex validation guarantees
            // the differential descends to the quotients.
            kernel_with_moduli(&c.maps[s - 1], &c.orders[s - 1], &c.orders[s])
        };
        let mut sub: Vec<Vec<BigInt>> = Vec::new();
        if s + 1 < n {
            let d_next = &c.maps[s];
            for j in 0..d_next.cols() {
                let coords = hnf_coords(&p_basis, &d_next.column(j))
                    .ok_or(TorError::NotAComplex { stage: s + 1 })?;
                sub.push(coords);
            }
        }
        let tors = c.torsion_mat(s);
        for j in 0..tors.cols() {
            let coords = hnf_coords(&p_basis, &tors.column(j))
                .expect("torsion lattice descends into the cycle subgroup");
            sub.push(coords);
        }
        let p = p_basis.cols();
        out.push(lattice_quotient(p, &IntMat::from_cols(p, &sub)));
    }
    Ok(out)
}

/// Augmentation of a Λ_D block: β_0 and β_1 coordinates survive to Z.
fn augment_block(v: &[BigInt], dim: usize, block: usize) -> BigInt {
    &v[block * dim] + &v[block * dim + 1]
}

/// − ⊗_{Λ_D} Z of a free resolution: each Λ^{r} becomes Z^{r} and every
/// generator image collapses blockwise through the augmentation.
pub fn tensor_free(res: &FreeResolution) -> ChainComplex {
    let dim = res.dim;
    let orders = res.ranks.iter().map(|&r| vec![BigInt::zero(); r]).collect();
    let maps: Vec<IntMat> = res
        .images
        .iter()
        .enumerate()
        .map(|(s, gens)| {
            IntMat::from_fn(res.ranks[s], gens.len(), |r, c| augment_block(&gens[c], dim, r))
        })
        .collect();
    ChainComplex::new(res.ranks.clone(), orders, maps)
}

/// − ⊗_{Λ_D} Z of a relative resolution: E_s = U(M_s) ⊗ Λ collapses to
/// U(M_s) itself (with its torsion orders), and differentials collapse
/// blockwise through the augmentation.
pub fn tensor_relative(res: &RelativeResolution) -> ChainComplex {
    let dim = res.dim;
    let ranks: Vec<usize> = res.stages.iter().map(|st| st.orders.len()).collect();
    let orders: Vec<Vec<BigInt>> = res.stages.iter().map(|st| st.orders.clone()).collect();
    let maps: Vec<IntMat> = (0..res.stages.len().saturating_sub(1))
        .map(|s| {
            let gens = &res.stages[s + 1].gen_vectors;
            IntMat::from_fn(ranks[s], gens.len(), |r, c| augment_block(&gens[c], dim, r))
        })
        .collect();
    ChainComplex::new(ranks, orders, maps)
}

/// One parity block of a presentation over Λ_D: the generator count and the
/// degree-collapsed relation columns (block vectors over the same-parity
/// generators). Terms attached to generators of the other parity are
/// dropped, mirroring the base-change matrix convention.
pub fn parity_block(p: &Presentation, parity: u8) -> (usize, Vec<Vec<BigInt>>) {
    let dim = (p.truncation() + 1) as usize;
    let idx = p.generator_indices(parity);
    let local: BTreeMap<usize, usize> = idx.iter().enumerate().map(|(l, g)| (*g, l)).collect();
    let gens = idx.len();
    let mut cols: Vec<Vec<BigInt>> = Vec::new();
    for (r, rel) in p.relations().iter().enumerate() {
        if p.relation_parity(r) != Some(parity) {
            continue;
        }
        let mut col = vec![BigInt::zero(); gens * dim];
        for (g, coeff) in rel {
            let Some(&l) = local.get(g) else { continue };
            for (i, c) in coeff.collapse_t() {
                col[l * dim + i as usize] += c;
            }
        }
        if col.iter().any(|x| !x.is_zero()) {
            cols.push(col);
        }
    }
    (gens, cols)
}

#[derive(Debug, Clone)]
pub struct TorReport {
    pub truncation: u32,
    pub mode: Mode,
    /// groups[s] = Tor_s for s = 0, …, s_max.
    pub groups: Vec<GradedGroup>,
}

/// Tor_s(M, Z) for s = 0, …, s_max over Λ_D, per parity. The resolution is
/// built one stage past s_max so the top homology is honest, and Tor_0 is
/// cross-checked against the direct quotient computation.
pub fn tor(p: &Presentation, s_max: usize, mode: Mode) -> Result<TorReport, TorError> {
    let ring = TruncRing::new(p.truncation());
    let mut halves: Vec<Vec<AbGroup>> = Vec::new();
    for parity in [0u8, 1u8] {
        let (gens, rels) = parity_block(p, parity);
        let complex = match mode {
            Mode::Free => tensor_free(&free_resolution(&ring, gens, &rels, s_max + 1)),
            Mode::Relative => tensor_relative(&relative_resolution(&ring, gens, &rels, s_max + 1)),
        };
        halves.push(homology(&complex)?);
    }
    let trivial = AbGroup::free(0);
    let groups: Vec<GradedGroup> = (0..=s_max)
        .map(|s| GradedGroup {
            parity0: halves[0].get(s).cloned().unwrap_or_else(|| trivial.clone()),
            parity1: halves[1].get(s).cloned().unwrap_or_else(|| trivial.clone()),
        })
        .collect();
    let direct = twisted_k(p);
    if groups[0] != direct {
        return Err(TorError::Tor0Mismatch {
            mode,
            tor0: groups[0].to_json_string(),
            quotient: direct.to_json_string(),
        });
    }
    Ok(TorReport { truncation: p.truncation(), mode, groups })
}

pub fn report_json(r: &TorReport) -> Value {
    let mut m = Map::new();
    m.insert("caveat".to_string(), Value::String(TRUNCATION_CAVEAT.to_string()));
    m.insert("mode".to_string(), Value::String(r.mode.to_string()));
    let entries: Vec<Value> = r
        .groups
        .iter()
        .enumerate()
        .map(|(s, g)| {
            let mut e = Map::new();
            if let Value::Object(obj) = g.to_json() {
                e.extend(obj);
            }
            e.insert("s".to_string(), Value::Number(Number::from(s)));
            Value::Object(e)
        })
        .collect();
    m.insert("tor".to_string(), Value::Array(entries));
    m.insert(
        "truncation".to_string(),
        Value::Number(Number::from_str(&r.truncation.to_string()).expect("valid number")),
    );
    Value::Object(m)
}

pub fn report_json_string(r: &TorReport) -> String {
    serde_json::to_string(&report_json(r)).expect("serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::BetaPoly;

    fn ring(d: u32) -> TruncRing {
        TruncRing::new(d)
    }

    /// Block vector with the given (block, beta index, value) entries.
    fn bvec(blocks: usize, dim: usize, entries: &[(usize, usize, i64)]) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); blocks * dim];
        for &(b, i, x) in entries {
            v[b * dim + i] += BigInt::from(x);
        }
        v
    }

    fn alternating(dim: usize) -> Vec<BigInt> {
        (0..dim).map(|j| BigInt::from(if j % 2 == 0 { 1 } else { -1 })).collect()
    }

    #[test]
    fn block_action_matches_ring_multiplication() {
        let rg = ring(4);
        let dim = 5;
        // β_2 · (3β_1 − β_3) two ways: blockwise action vs. the structure
        // table acting on an explicit ring element.
        let v = bvec(1, dim, &[(0, 1, 3), (0, 3, -1)]);
        let acted = beta_act(&rg, 1, &v, 2);
        let x = BetaPoly::term(3.into(), 0, 1).sub(&BetaPoly::beta(3));
        let prod = rg.multiply(&BetaPoly::beta(2), &x).unwrap();
        for (k, a) in acted.iter().enumerate() {
            assert_eq!(*a, prod.coeff(0, k as u32), "beta_{k} coefficient");
        }
    }

    #[test]
    fn kernel_of_beta_one_multiplication_is_the_alternating_sum() {
        for d in 1..=6u32 {
            let rg = ring(d);
            let dim = (d + 1) as usize;
            let image = vec![bvec(1, dim, &[(0, 1, 1)])];
            let ker = lambda_map_kernel(&rg, 1, &image);
            let alt = alternating(dim);
            // The alternating sum is annihilated (independent route: ring
            // multiplication), lies in the kernel lattice, and Λ-generates it.
            let mut alt_poly = BetaPoly::zero();
            for (j, c) in alt.iter().enumerate() {
                alt_poly = alt_poly.add(&BetaPoly::term(c.clone(), 0, j as u32));
            }
            assert!(rg.multiply(&BetaPoly::beta(1), &alt_poly).unwrap().is_zero());
            assert!(in_col_span(&col_hnf(&ker), &alt));
            let thinned = thin_lambda_generators(&rg, 1, &ker);
            assert_eq!(thinned.len(), 1, "one module generator at D={d}");
            let closure = lambda_closure(&rg, 1, std::slice::from_ref(&alt));
            assert_eq!(
                col_hnf(&IntMat::from_cols(dim, &closure)),
                col_hnf(&ker),
                "alternating sum generates the kernel at D={d}"
            );
        }
    }

    #[test]
    fn kernel_extremes() {
        let rg = ring(3);
        let dim = 4;
        // Identity map: trivial kernel.
        let ident = vec![bvec(1, dim, &[(0, 0, 1)])];
        assert_eq!(lambda_map_kernel(&rg, 1, &ident).cols(), 0);
        // Zero map on Λ^2: everything is in the kernel — 2·(D+1) Z-generators,
        // thinned back to the 2 unit vectors.
        let zero = vec![vec![BigInt::zero(); 2 * dim], vec![BigInt::zero(); 2 * dim]];
        let ker = lambda_map_kernel(&rg, 2, &zero);
        assert_eq!(ker.cols(), 2 * dim);
        assert_eq!(thin_lambda_generators(&rg, 2, &ker).len(), 2);
    }

    #[test]
    fn free_resolution_of_free_and_cyclic_modules() {
        let rg = ring(4);
        // Free module: resolution stops immediately.
        let res = free_resolution(&rg, 1, &[], 3);
        assert_eq!(res.ranks, vec![1, 0, 0, 0]);
        // Integer multiple of the unit: ·n is injective, one syzygy stage.
        let dim = 5;
        let res = free_resolution(&rg, 1, &[bvec(1, dim, &[(0, 0, 7)])], 3);
        assert_eq!(res.ranks, vec![1, 1, 0, 0]);
    }

    #[test]
    fn free_resolution_first_syzygy_of_beta_one() {
        let d = 4u32;
        let rg = ring(d);
        let dim = (d + 1) as usize;
        let res = free_resolution(&rg, 1, &[bvec(1, dim, &[(0, 1, 1)])], 2);
        assert_eq!(res.ranks[..3], [1, 1, 1]);
        // The stage-2 generator spans the same Λ-module as the alternating sum.
        let syzygy = &res.images[1];
        assert_eq!(syzygy.len(), 1);
        let lhs = col_hnf(&IntMat::from_cols(dim, &lambda_closure(&rg, 1, syzygy)));
        let rhs = col_hnf(&IntMat::from_cols(dim, &lambda_closure(&rg, 1, &[alternating(dim)])));
        assert_eq!(lhs, rhs);
        // Differentials compose to zero after linearization.
        let a1 = linearize(&rg, res.ranks[0], &res.images[0]);
        let a2 = linearize(&rg, res.ranks[1], &res.images[1]);
        assert!(a1.mul(&a2).is_zero());
    }

    #[test]
    fn free_resolution_is_exact_at_interior_stages() {
        let d = 3u32;
        let rg = ring(d);
        let dim = (d + 1) as usize;
        let rels = vec![bvec(1, dim, &[(0, 1, 2)]), bvec(1, dim, &[(0, 2, 1)])];
        let res = free_resolution(&rg, 1, &rels, 3);
        for s in 1..3 {
            if res.ranks[s] == 0 {
                continue;
            }
            let kernel = col_hnf(&lambda_map_kernel(&rg, res.ranks[s - 1], &res.images[s - 1]));
            let image = col_hnf(&IntMat::from_cols(
                res.ranks[s] * dim,
                &lambda_closure(&rg, res.ranks[s], &res.images[s]),
            ));
            assert_eq!(kernel, image, "exactness at stage {s}");
        }
    }

    #[test]
    fn homology_worked_examples() {
        // 0 → Z —2→ Z → 0.
        let c = ChainComplex::free(vec![IntMat::from_rows(&[vec![2]])]);
        let h = homology(&c).unwrap();
        assert_eq!(h[0], AbGroup { free_rank: 0, torsion: vec![2.into()] });
        assert!(h[1].is_trivial());
        // Zero differential: homology is the chain groups themselves.
        let c = ChainComplex::free(vec![IntMat::from_rows(&[vec![0]])]);
        let h = homology(&c).unwrap();
        assert_eq!(h[0], AbGroup::free(1));
        assert_eq!(h[1], AbGroup::free(1));
        // A longer free example: Z ←[1 0] Z² ←[0;1]ᵀ… chain chosen so the
        // middle homology vanishes.
        let d1 = IntMat::from_rows(&[vec![1, 0]]);
        let d2 = IntMat::from_rows(&[vec![0], vec![1]]);
        let h = homology(&ChainComplex::free(vec![d1, d2])).unwrap();
        assert!(h[0].is_trivial());
        assert!(h[1].is_trivial());
        assert!(h[2].is_trivial());
    }

    #[test]
    fn homology_rejects_non_complexes() {
        let d1 = IntMat::from_rows(&[vec![1]]);
        let d2 = IntMat::from_rows(&[vec![1]]);
        let err = homology(&ChainComplex::free(vec![d1, d2])).unwrap_err();
        assert_eq!(err, TorError::NotAComplex { stage: 2 });
    }

    #[test]
    fn homology_with_torsion_stages() {
        // (Z/4) ←·2 Z: H_0 = (Z/4)/(2Z/4) = Z/2, H_1 = ker = 2Z ≅ Z.
        let c = ChainComplex::new(
            vec![1, 1],
            vec![vec![4.into()], vec![BigInt::zero()]],
            vec![IntMat::from_rows(&[vec![2]])],
        );
        let h = homology(&c).unwrap();
        assert_eq!(h[0], AbGroup { free_rank: 0, torsion: vec![2.into()] });
        assert_eq!(h[1], AbGroup::free(1));
    }

    fn presentation(src: &str) -> Presentation {
        Presentation::from_json_str(src).unwrap()
    }

    fn cyclic(n: i64, d: u32) -> Presentation {
        presentation(&format!(
            r#"{{"truncation": {d}, "generators": [{{"name": "x", "parity": 0}}],
                "relations": [[{{"gen": "x", "coeff": "{n} b1"}}]]}}"#
        ))
    }

    #[test]
    fn tor_zero_matches_quotients_in_both_modes() {
        for n in [2i64, 5, 12] {
            for mode in [Mode::Free, Mode::Relative] {
                let report = tor(&cyclic(n, 4), 0, mode).unwrap();
                assert_eq!(
                    report.groups[0].parity0,
                    AbGroup { free_rank: 0, torsion: vec![n.into()] },
                    "n={n} {mode}"
                );
                assert!(report.groups[0].parity1.is_trivial());
            }
        }
    }

    #[test]
    fn tor_vanishes_above_zero_for_free_modules() {
        let p = presentation(
            r#"{"truncation": 3, "generators": [
                {"name": "a", "parity": 0}, {"name": "b", "parity": 1}
            ], "relations": []}"#,
        );
        for mode in [Mode::Free, Mode::Relative] {
            let report = tor(&p, 2, mode).unwrap();
            assert_eq!(report.groups[0].parity0, AbGroup::free(1), "{mode}");
            assert_eq!(report.groups[0].parity1, AbGroup::free(1), "{mode}");
            for s in 1..=2 {
                assert!(report.groups[s].is_trivial(), "Tor_{s} {mode}");
            }
        }
    }

    #[test]
    fn tor_one_of_small_cyclic_module() {
        // At D = 1 the resolution is computable by hand: Λ_1 = Z[e]/(e² = e)
        // with e = β_1, and the syzygies of 5e alternate between (1 − e) and
        // e. Tensoring gives Z ←5 Z ←0 Z, so Tor_1 = 0.
        let report = tor(&cyclic(5, 1), 1, Mode::Free).unwrap();
        assert_eq!(report.groups[0].parity0, AbGroup { free_rank: 0, torsion: vec![5.into()] });
        assert!(report.groups[1].is_trivial());
    }

    #[test]
    fn relative_resolution_of_the_unit_quotient() {
        // M = Λ_D/(β_1, …, β_D) has underlying group Z: E_0 = Λ_D itself.
        let d = 4u32;
        let rg = ring(d);
        let dim = (d + 1) as usize;
        let rels: Vec<Vec<BigInt>> = (1..=d as usize).map(|i| bvec(1, dim, &[(0, i, 1)])).collect();
        let res = relative_resolution(&rg, 1, &rels, 0);
        assert_eq!(res.stages[0].orders, vec![BigInt::zero()]);
        assert_eq!(res.stages[0].gen_vectors.len(), 1);
    }

    #[test]
    fn relative_resolution_is_split_at_stage_zero() {
        let d = 4u32;
        let rg = ring(d);
        let dim = (d + 1) as usize;
        let gens = 2usize;
        let rels = vec![bvec(gens, dim, &[(0, 1, 3)]), bvec(gens, dim, &[(0, 0, 2), (1, 2, 1)])];
        let res = relative_resolution(&rg, gens, &rels, 1);
        // counit ∘ lift = identity modulo the relation lattice.
        let counit_cols: Vec<Vec<BigInt>> = res.stages[0]
            .gen_vectors
            .iter()
            .flat_map(|g| (0..dim).map(|j| beta_act(&rg, gens, g, j as u32)))
            .collect();
        let counit = IntMat::from_cols(gens * dim, &counit_cols);
        let rel_lattice =
            col_hnf(&IntMat::from_cols(gens * dim, &lambda_closure(&rg, gens, &rels)));
        let round_trip = counit.mul(&res.lift);
        for a in 0..gens * dim {
            let mut diff = round_trip.column(a);
            diff[a] -= BigInt::one();
            assert!(
                in_col_span(&rel_lattice, &diff),
                "free-cover basis vector {a} must round-trip"
            );
        }
    }

    #[test]
    fn relative_resolution_three_stages() {
        // M = Λ_4/(5β_1), resolved two kernels deep: every stage is a
        // nonzero extended module and consecutive differentials compose
        // into the torsion lattice.
        let d = 4u32;
        let rg = ring(d);
        let dim = (d + 1) as usize;
        let rels = vec![bvec(1, dim, &[(0, 1, 5)])];
        let res = relative_resolution(&rg, 1, &rels, 2);
        assert_eq!(res.stages.len(), 3);
        for st in &res.stages {
            assert!(!st.orders.is_empty(), "every stage is nonzero");
        }
        let rel_lattice = col_hnf(&IntMat::from_cols(dim, &lambda_closure(&rg, 1, &rels)));
        // Stage-1 generators are kernel elements of E_0 → M: their counit
        // image in the free cover lies in the relation lattice.
        let push_to_cover = |v: &[BigInt], source_gens: &[Vec<BigInt>], blocks_out: usize| {
            // Λ-linear expansion: coordinate (b, j) of v contributes
            // v[(b,j)] · β_j · (image of generator b).
            let mut image = vec![BigInt::zero(); blocks_out * dim];
            for (b, gen_image) in source_gens.iter().enumerate() {
                for j in 0..dim {
                    let coef = &v[b * dim + j];
                    if coef.is_zero() {
                        continue;
                    }
                    let acted = beta_act(&rg, blocks_out, gen_image, j as u32);
                    for (t, a) in acted.iter().enumerate() {
                        image[t] += coef * a;
                    }
                }
            }
            image
        };
        let stage0 = &res.stages[0].gen_vectors;
        for g1 in &res.stages[1].gen_vectors {
            let image = push_to_cover(g1, stage0, 1);
            assert!(in_col_span(&rel_lattice, &image), "∂_1 lands in the relation lattice");
        }
        // ∂_1 ∘ ∂_2: push a stage-2 generator through both differentials.
        for g2 in &res.stages[2].gen_vectors {
            let in_e0 = push_to_cover(g2, &res.stages[1].gen_vectors, stage0.len());
            let image = push_to_cover(&in_e0, stage0, 1);
            assert!(in_col_span(&rel_lattice, &image), "composite differential must vanish in M");
        }
        // The tensored complex is a genuine complex and Tor_0 = Z/5.
        let h = homology(&tensor_relative(&res)).unwrap();
        assert_eq!(h[0], AbGroup { free_rank: 0, torsion: vec![5.into()] });
    }

    #[test]
    fn mixed_parity_presentations_split_into_blocks() {
        let p = presentation(
            r#"{"truncation": 2, "generators": [
                {"name": "x", "parity": 0}, {"name": "y", "parity": 1}
            ], "relations": [
                [{"gen": "x", "coeff": "4 b1"}],
                [{"gen": "y", "coeff": "6 b1"}]
            ]}"#,
        );
        let (g0, r0) = parity_block(&p, 0);
        let (g1, r1) = parity_block(&p, 1);
        assert_eq!((g0, r0.len()), (1, 1));
        assert_eq!((g1, r1.len()), (1, 1));
        for mode in [Mode::Free, Mode::Relative] {
            let report = tor(&p, 0, mode).unwrap();
            assert_eq!(report.groups[0].parity0, AbGroup { free_rank: 0, torsion: vec![4.into()] });
            assert_eq!(report.groups[0].parity1, AbGroup { free_rank: 0, torsion: vec![6.into()] });
        }
    }

    #[test]
    fn report_json_bytes_are_pinned() {
        let report = tor(&cyclic(5, 1), 1, Mode::Free).unwrap();
        assert_eq!(
            report_json_string(&report),
            concat!(
                r#"{"caveat":"higher Tor computed over truncated ring","mode":"free","#,
                r#""tor":[{"parity0":{"free_rank":0,"torsion":[5]},"parity1":{"free_rank":0,"torsion":[]},"s":0},"#,
                r#"{"parity0":{"free_rank":0,"torsion":[]},"parity1":{"free_rank":0,"torsion":[]},"s":1}],"#,
                r#""truncation":1}"#
            )
        );
    }
}
