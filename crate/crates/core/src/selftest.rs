//! Built-in verification suites: every computational route in the crate is
//! re-derived here against an independent oracle (closed forms against
//! series extraction, decision procedures against sampling, normal forms
//! against their defining contracts), plus a reference catalog of module
//! presentations with known answers.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::beta::{beta_product_coeffs, fgl_identity_check, n_series, BetaPoly, TruncRing};
use crate::coaction::hopf_axiom_suite;
use crate::kk::{composite_hat, i_star, p_poly, KKElement, Membership};
use crate::presentation::{Generator, Presentation, Relation};
use crate::ring::{denominator_divides_power, rat, Rational};
use crate::series::TruncSeries;
use crate::snf::{det_bareiss, snf, AbGroup, IntMat};
use crate::tor::{homology, tor, ChainComplex, Mode};
use crate::twist::{twisted_k, GradedGroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Normal,
    Deep,
}

#[derive(Debug, Clone)]
pub struct SelfCheck {
    pub name: &'static str,
    pub pass: bool,
    /// Counterexample or failure description; empty on pass.
    pub detail: String,
}

impl SelfCheck {
    fn pass(name: &'static str) -> Self {
        SelfCheck { name, pass: true, detail: String::new() }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        SelfCheck { name, pass: false, detail }
    }
}

#[derive(Debug, Clone)]
pub struct SelfTestReport {
    pub depth: Depth,
    pub checks: Vec<SelfCheck>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Verify a structure-constant table entry by entry against both the closed
/// form k!/((k−j)!(k−i)!(i+j−k)!) and an independent series extraction: the
/// coefficient of s^i t^j in (s + t + st)^k. A single perturbed entry must
/// surface here with a counterexample.
pub fn structure_table_check(ring: &TruncRing) -> SelfCheck {
    let name = "structure-table";
    let d = ring.truncation();
    let order = 2 * d;
    let vars = ["s", "t"];
    let s = TruncSeries::<Rational>::var(&vars, order, "s");
    let t = TruncSeries::<Rational>::var(&vars, order, "t");
    let base = s.add(&t).add(&s.mul(&t));
    // powers[k] = (s + t + st)^k
    let mut powers = vec![TruncSeries::<Rational>::one(&vars, order)];
    for _ in 1..=d {
        powers.push(powers.last().unwrap().mul(&base));
    }
    for i in 0..=d {
        for j in 0..=d {
            let closed: std::collections::BTreeMap<u32, BigInt> =
                beta_product_coeffs(i, j).into_iter().collect();
            for k in 0..=d {
                let table = ring.c(i, j, k);
                let from_closed = closed.get(&k).cloned().unwrap_or_else(BigInt::zero);
                let from_series = if i <= order && j <= order {
                    let q = powers[k as usize].coeff(&[i, j]);
                    assert!(q.is_integer(), "series coefficients are integers");
                    q.to_integer()
                } else {
                    BigInt::zero()
                };
                if table != from_closed || table != from_series {
                    return SelfCheck::fail(
                        name,
                        format!(
                            "c({i},{j},{k}): table={table}, closed form={from_closed}, series={from_series}"
                        ),
                    );
                }
            }
        }
    }
    SelfCheck::pass(name)
}

fn fgl_check(depth: Depth) -> SelfCheck {
    let name = "fgl-product-power";
    let cases: Vec<(u32, u32)> = match depth {
        Depth::Normal => vec![(2, 6), (3, 6)],
        Depth::Deep => vec![(2, 10), (3, 10), (4, 8), (5, 8), (6, 8)],
    };
    for (m, order) in cases {
        let report = fgl_identity_check(m, order);
        if !report.passed() {
            return SelfCheck::fail(name, format!("m={m} order={order}: {report:?}"));
        }
    }
    SelfCheck::pass(name)
}

/// Generalized binomial coefficient C(n, k) for integer n (possibly
/// negative): the independent closed form for the multiplication-by-n power
/// series (1+s)^n − 1.
fn binom_general(n: i64, k: u32) -> Rational {
    let mut num = Rational::from_integer(BigInt::one());
    for step in 0..k {
        num *= rat(n - i64::from(step), 1);
        num /= rat(i64::from(step) + 1, 1);
    }
    num
}

fn n_series_check(depth: Depth) -> SelfCheck {
    let name = "n-series-oracle";
    let order = match depth {
        Depth::Normal => 8,
        Depth::Deep => 10,
    };
    for n in -8i64..=8 {
        let series = n_series(n, order);
        for k in 1..=order {
            let got = series.coeff(&[k]);
            let want = binom_general(n, k);
            if got != want {
                return SelfCheck::fail(
                    name,
                    format!("[{n}](s) coefficient of s^{k}: got {got}, want {want}"),
                );
            }
        }
        if !series.coeff(&[0]).is_zero() {
            return SelfCheck::fail(name, format!("[{n}](s) has a constant term"));
        }
    }
    SelfCheck::pass(name)
}

fn composite_check(depth: Depth) -> SelfCheck {
    let name = "unit-composite";
    let k_max = match depth {
        Depth::Normal => 8,
        Depth::Deep => 10,
    };
    for k in 1..=k_max {
        if composite_hat(k).poly() != &p_poly(k) {
            return SelfCheck::fail(name, format!("composite_hat({k}) ≠ p_{k}"));
        }
        let x = BetaPoly::term(BigInt::one(), i64::from(k), k);
        match i_star(&x).decompose() {
            Ok(parts) => {
                let ok = parts.len() == 1
                    && parts
                        .get(&k)
                        .is_some_and(|c| c == &crate::laurent::LaurentPoly::from_int(1));
                if !ok {
                    return SelfCheck::fail(
                        name,
                        format!("decompose(i_star(t^{k} β_{k})) is not p_{k}"),
                    );
                }
            }
            Err(e) => return SelfCheck::fail(name, format!("t^{k} β_{k}: {e}")),
        }
    }
    SelfCheck::pass(name)
}

fn hopf_check(depth: Depth) -> SelfCheck {
    let name = "hopf-axioms";
    let k_max = match depth {
        Depth::Normal => 5,
        Depth::Deep => 8,
    };
    let failed: Vec<String> =
        hopf_axiom_suite(k_max).into_iter().filter(|c| !c.pass).map(|c| c.name).collect();
    if failed.is_empty() {
        SelfCheck::pass(name)
    } else {
        SelfCheck::fail(name, failed.join(", "))
    }
}

/// Frozen membership fixtures: the binomial decision procedure must agree
/// with direct sampling at every admissible multiplier, members must
/// round-trip through the integral-basis decomposition, and non-members
/// must carry a verifying witness.
fn membership_check(depth: Depth) -> SelfCheck {
    let name = "integral-membership";
    let k_range = match depth {
        Depth::Normal => 12i64,
        Depth::Deep => 25,
    };
    let members = [
        "1",
        "v",
        "1/2*v^2 - 1/2*u*v",
        "1/6*v^3 - 1/2*u*v^2 + 1/3*u^2*v",
        "u^-2 * (1/2*v^2 - 1/2*u*v)",
        "v^-1",
        "u^3*v^-2",
        "(1/2*v^2 - 1/2*u*v) * (1/2*v^2 - 1/2*u*v)",
        // v^{-1}·p_2: every sample (k-1)/2 lands in Z[1/k].
        "1/2*v - 1/2*u",
    ];
    let non_members = ["1/2*v^2", "1/3*v - 1/3*u", "1/3*v^3", "1/2*u^-1*v^2", "1/5"];
    for src in members {
        let x = match KKElement::parse(src) {
            Ok(x) => x,
            Err(e) => return SelfCheck::fail(name, format!("{src}: {e}")),
        };
        if !matches!(x.membership(), Membership::Integral) {
            return SelfCheck::fail(name, format!("{src} should be integral"));
        }
        for k in (-k_range..=k_range).filter(|k| *k != 0) {
            if !x.sample_is_admissible(k) {
                return SelfCheck::fail(name, format!("{src} fails sampling at k={k}"));
            }
        }
        match x.decompose() {
            Ok(parts) => {
                if KKElement::recompose(&parts) != x {
                    return SelfCheck::fail(name, format!("{src} does not round-trip"));
                }
            }
            Err(e) => return SelfCheck::fail(name, format!("{src}: {e}")),
        }
    }
    for src in non_members {
        let x = match KKElement::parse(src) {
            Ok(x) => x,
            Err(e) => return SelfCheck::fail(name, format!("{src}: {e}")),
        };
        match x.membership() {
            Membership::Integral => {
                return SelfCheck::fail(name, format!("{src} should not be integral"));
            }
            Membership::NotIntegral { witness: Some(w) } => {
                // The witness must verify: the sampled coefficient really
                // does fall outside Z[1/k].
                if denominator_divides_power(w.value.denom(), w.k) {
                    return SelfCheck::fail(
                        name,
                        format!("{src}: witness k={} value={} is admissible", w.k, w.value),
                    );
                }
            }
            Membership::NotIntegral { witness: None } => {
                return SelfCheck::fail(name, format!("{src}: no witness found"));
            }
        }
    }
    SelfCheck::pass(name)
}

fn snf_check(depth: Depth) -> SelfCheck {
    let name = "snf-contract";
    let cases = match depth {
        Depth::Normal => 15,
        Depth::Deep => 40,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f_7e57);
    for case in 0..cases {
        let r = rng.random_range(1..=6);
        let c = rng.random_range(1..=6);
        let a = IntMat::from_fn(r, c, |_, _| BigInt::from(rng.random_range(-40i64..=40)));
        let res = snf(&a);
        let mut problems = String::new();
        if res.u.mul(&a).mul(&res.v) != res.s {
            let _ = write!(problems, "u·a·v ≠ s; ");
        }
        if det_bareiss(&res.u).abs() != BigInt::one() || det_bareiss(&res.v).abs() != BigInt::one()
        {
            let _ = write!(problems, "transform not unimodular; ");
        }
        if res.u.mul(&res.u_inv) != IntMat::identity(r) {
            let _ = write!(problems, "u_inv wrong; ");
        }
        let d = res.diagonal();
        for w in d.windows(2) {
            if (&w[1] % &w[0]) != BigInt::zero() {
                let _ = write!(problems, "divisibility broken; ");
            }
        }
        if !problems.is_empty() {
            return SelfCheck::fail(name, format!("case {case}: {problems}"));
        }
    }
    SelfCheck::pass(name)
}

fn homology_check() -> SelfCheck {
    let name = "homology-worked";
    let c = ChainComplex::free(vec![IntMat::from_rows(&[vec![2]])]);
    match homology(&c) {
        Ok(h) => {
            if h[0] != (AbGroup { free_rank: 0, torsion: vec![2.into()] }) || !h[1].is_trivial() {
                return SelfCheck::fail(name, format!("Z --2--> Z gave {h:?}"));
            }
        }
        Err(e) => return SelfCheck::fail(name, e.to_string()),
    }
    let c = ChainComplex::free(vec![IntMat::from_rows(&[vec![0]])]);
    match homology(&c) {
        Ok(h) => {
            if h[0] != AbGroup::free(1) || h[1] != AbGroup::free(1) {
                return SelfCheck::fail(name, format!("zero differential gave {h:?}"));
            }
        }
        Err(e) => return SelfCheck::fail(name, e.to_string()),
    }
    SelfCheck::pass(name)
}

fn catalog_twist_check() -> SelfCheck {
    let name = "catalog-twist";
    for entry in presentation_catalog() {
        let got = twisted_k(&entry.presentation);
        if got != entry.expected {
            return SelfCheck::fail(
                name,
                format!("{}: got {}, want {}", entry.name, got, entry.expected),
            );
        }
    }
    SelfCheck::pass(name)
}

fn catalog_tor_check(depth: Depth) -> SelfCheck {
    let name = "catalog-tor-modes";
    let s_max = match depth {
        Depth::Normal => 0,
        Depth::Deep => 1,
    };
    for entry in presentation_catalog() {
        let free = match tor(&entry.presentation, s_max, Mode::Free) {
            Ok(r) => r,
            Err(e) => return SelfCheck::fail(name, format!("{} (free): {e}", entry.name)),
        };
        let relative = match tor(&entry.presentation, 0, Mode::Relative) {
            Ok(r) => r,
            Err(e) => return SelfCheck::fail(name, format!("{} (relative): {e}", entry.name)),
        };
        if free.groups[0] != entry.expected || relative.groups[0] != entry.expected {
            return SelfCheck::fail(
                name,
                format!(
                    "{}: Tor_0 free={}, relative={}, want {}",
                    entry.name, free.groups[0], relative.groups[0], entry.expected
                ),
            );
        }
    }
    SelfCheck::pass(name)
}

fn extended_vanishing_check(depth: Depth) -> SelfCheck {
    let name = "extended-vanishing";
    let (samples, s_max, max_trunc) = match depth {
        Depth::Normal => (3usize, 2usize, 4u32),
        Depth::Deep => (6, 3, 6),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xe47e_9ded);
    for case in 0..samples {
        let sample = random_extended_presentation(&mut rng, 2, max_trunc);
        let twist = twisted_k(&sample.presentation);
        let want = GradedGroup {
            parity0: AbGroup::free(sample.free_rank[0]),
            parity1: AbGroup::free(sample.free_rank[1]),
        };
        if twist != want {
            return SelfCheck::fail(name, format!("case {case}: quotient {twist}, want {want}"));
        }
        match tor(&sample.presentation, s_max, Mode::Free) {
            Ok(report) => {
                for s in 1..=s_max {
                    if !report.groups[s].is_trivial() {
                        return SelfCheck::fail(
                            name,
                            format!("case {case}: Tor_{s} = {} ≠ 0", report.groups[s]),
                        );
                    }
                }
            }
            Err(e) => return SelfCheck::fail(name, format!("case {case}: {e}")),
        }
    }
    SelfCheck::pass(name)
}

pub fn run(depth: Depth) -> SelfTestReport {
    let table_trunc = match depth {
        Depth::Normal => 4,
        Depth::Deep => 6,
    };
    let checks = vec![
        structure_table_check(&TruncRing::new(table_trunc)),
        fgl_check(depth),
        n_series_check(depth),
        composite_check(depth),
        hopf_check(depth),
        membership_check(depth),
        snf_check(depth),
        homology_check(),
        catalog_twist_check(),
        catalog_tor_check(depth),
        extended_vanishing_check(depth),
    ];
    SelfTestReport { depth, checks }
}

/// A reference presentation with its expected twisted K-groups.
pub struct CatalogEntry {
    pub name: &'static str,
    pub presentation: Presentation,
    pub expected: GradedGroup,
}

fn entry(name: &'static str, json: &str, parity0: AbGroup, parity1: AbGroup) -> CatalogEntry {
    CatalogEntry {
        name,
        presentation: Presentation::from_json_str(json)
            .unwrap_or_else(|e| panic!("catalog entry {name}: {e}")),
        expected: GradedGroup { parity0, parity1 },
    }
}

fn torsion(factors: &[i64]) -> AbGroup {
    AbGroup { free_rank: 0, torsion: factors.iter().map(|&n| BigInt::from(n)).collect() }
}

/// Catalog of presentations with independently known answers: free modules,
/// cyclic quotients at several truncations, relations that collapse to zero
/// or to units, parity mixtures, and an extended module presented with a
/// redundant relation.
pub fn presentation_catalog() -> Vec<CatalogEntry> {
    vec![
        entry(
            "free-rank-1",
            r#"{"truncation": 2, "generators": [{"name": "x", "parity": 0}], "relations": []}"#,
            AbGroup::free(1),
            AbGroup::free(0),
        ),
        entry(
            "free-mixed",
            r#"{"truncation": 3, "generators": [
                {"name": "a", "parity": 0}, {"name": "b", "parity": 0},
                {"name": "c", "parity": 1}], "relations": []}"#,
            AbGroup::free(2),
            AbGroup::free(1),
        ),
        entry(
            "cyclic-2",
            r#"{"truncation": 4, "generators": [{"name": "x", "parity": 0}],
                "relations": [[{"gen": "x", "coeff": "2 b1"}]]}"#,
            torsion(&[2]),
            AbGroup::free(0),
        ),
        entry(
            "cyclic-5",
            r#"{"truncation": 8, "generators": [{"name": "x", "parity": 0}],
                "relations": [[{"gen": "x", "coeff": "5 b1"}]]}"#,
            torsion(&[5]),
            AbGroup::free(0),
        ),
        entry(
            "cyclic-12",
            r#"{"truncation": 4, "generators": [{"name": "x", "parity": 0}],
                "relations": [[{"gen": "x", "coeff": "12 b1"}]]}"#,
            torsion(&[12]),
            AbGroup::free(0),
        ),
        entry(
            "unit-shift",
            r#"{"truncation": 4, "generators": [{"name": "x", "parity": 0}],
                "relations": [[{"gen": "x", "coeff": "b1 - 1"}]]}"#,
            AbGroup::free(1),
            AbGroup::free(0),
        ),
        entry(
            "beta-2-relation",
            r#"{"truncation": 4, "generators": [{"name": "x", "parity": 0}],
                "relations": [[{"gen": "x", "coeff": "b2"}]]}"#,
            AbGroup::free(1),
            AbGroup::free(0),
        ),
        entry(
            "coprime-pair",
            r#"{"truncation": 4, "generators": [{"name": "x", "parity": 0}],
                "relations": [
                    [{"gen": "x", "coeff": "3 b1"}],
                    [{"gen": "x", "coeff": "5 b1"}]]}"#,
            AbGroup::free(0),
            AbGroup::free(0),
        ),
        entry(
            "full-kill-8",
            r#"{"truncation": 8, "generators": [{"name": "x", "parity": 0}],
                "relations": [
                    [{"gen": "x", "coeff": "b1"}], [{"gen": "x", "coeff": "b2"}],
                    [{"gen": "x", "coeff": "b3"}], [{"gen": "x", "coeff": "b4"}],
                    [{"gen": "x", "coeff": "b5"}], [{"gen": "x", "coeff": "b6"}],
                    [{"gen": "x", "coeff": "b7"}], [{"gen": "x", "coeff": "b8"}]]}"#,
            AbGroup::free(0),
            AbGroup::free(0),
        ),
        entry(
            "mixed-parities",
            r#"{"truncation": 2, "generators": [
                {"name": "x", "parity": 0}, {"name": "y", "parity": 1}],
                "relations": [
                    [{"gen": "x", "coeff": "4 b1"}],
                    [{"gen": "y", "coeff": "6 b1"}]]}"#,
            torsion(&[4]),
            torsion(&[6]),
        ),
        entry(
            "diag-2-3",
            r#"{"truncation": 2, "generators": [
                {"name": "x", "parity": 0}, {"name": "y", "parity": 0}],
                "relations": [
                    [{"gen": "x", "coeff": "2 b1"}],
                    [{"gen": "y", "coeff": "3 b1"}]]}"#,
            torsion(&[6]),
            AbGroup::free(0),
        ),
        entry(
            "torsion-chain",
            r#"{"truncation": 2, "generators": [
                {"name": "x", "parity": 0}, {"name": "y", "parity": 0}],
                "relations": [
                    [{"gen": "x", "coeff": "2 b1"}, {"gen": "y", "coeff": "4 b1"}]]}"#,
            AbGroup { free_rank: 1, torsion: vec![2.into()] },
            AbGroup::free(0),
        ),
        entry(
            "t-shifted",
            r#"{"truncation": 2, "generators": [{"name": "x", "parity": 0}],
                "relations": [[{"gen": "x", "coeff": "t^2 b1 - 3"}]]}"#,
            torsion(&[2]),
            AbGroup::free(0),
        ),
        entry(
            "cross-parity-relation",
            r#"{"truncation": 2, "generators": [
                {"name": "x", "parity": 0}, {"name": "y", "parity": 1}],
                "relations": [
                    [{"gen": "x", "coeff": "2 b1"}, {"gen": "y", "coeff": "t b1"}]]}"#,
            torsion(&[2]),
            AbGroup::free(1),
        ),
        entry(
            "extended-redundant",
            r#"{"truncation": 3, "generators": [
                {"name": "a", "parity": 0}, {"name": "b", "parity": 0},
                {"name": "c", "parity": 0}],
                "relations": [[
                    {"gen": "a", "coeff": "1"},
                    {"gen": "b", "coeff": "1"},
                    {"gen": "c", "coeff": "1"}]]}"#,
            AbGroup::free(2),
            AbGroup::free(0),
        ),
    ]
}

/// Randomized presentation of an extended module U ⊗ Λ_D with U free
/// abelian: per parity, relations are an integer matrix of the form
/// unimodular · (rank-k pivot block) · unimodular over constant
/// coefficients, so the cokernel is free of known rank.
pub struct ExtendedSample {
    pub presentation: Presentation,
    /// Expected free rank per parity of the base-changed quotient.
    pub free_rank: [usize; 2],
}

fn elementary(n: usize, i: usize, j: usize, c: i64) -> IntMat {
    let mut m = IntMat::identity(n);
    m.set(i, j, BigInt::from(c));
    m
}

fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> IntMat {
    let mut m = IntMat::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..(2 * n + 2) {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n);
        if i == j {
            j = (j + 1) % n;
        }
        let c = [-2i64, -1, 1, 2][rng.random_range(0..4)];
        m = m.mul(&elementary(n, i, j, c));
    }
    m
}

pub fn random_extended_presentation<R: Rng>(
    rng: &mut R,
    max_rank: usize,
    max_trunc: u32,
) -> ExtendedSample {
    let truncation = rng.random_range(1..=max_trunc);
    let total_rank = rng.random_range(1..=max_rank);
    let rank0 = rng.random_range(0..=total_rank);
    let ranks = [rank0, total_rank - rank0];

    let mut generators: Vec<Generator> = Vec::new();
    let mut relations: Vec<Relation> = Vec::new();
    for (parity, &rank) in ranks.iter().enumerate() {
        if rank == 0 {
            continue;
        }
        let extra = rng.random_range(0..=2usize);
        let n = rank + extra; // generators in this block
        let k = extra; // pivot rank: cokernel keeps rank `rank`
        let m = if k == 0 { 0 } else { k + rng.random_range(0..=1usize) };
        let offset = generators.len();
        for g in 0..n {
            generators.push(Generator {
                name: format!("{}{}", if parity == 0 { "a" } else { "b" }, offset + g),
                parity: parity as u8,
            });
        }
        if m == 0 {
            continue;
        }
        let mut pivot = IntMat::zeros(n, m);
        for i in 0..k {
            pivot.set(i, i, BigInt::one());
        }
        let a = random_unimodular(rng, n).mul(&pivot).mul(&random_unimodular(rng, m));
        for col in 0..m {
            let rel: Relation = (0..n)
                .filter(|&row| !a.get(row, col).is_zero())
                .map(|row| (offset + row, BetaPoly::term(a.get(row, col).clone(), 0, 0)))
                .collect();
            if !rel.is_empty() {
                relations.push(rel);
            }
        }
    }
    let presentation = Presentation::new(truncation, generators, relations)
        .expect("generated presentation is valid");
    ExtendedSample { presentation, free_rank: ranks }
}
