//! Property-based invariants: algebraic laws that must hold for every input,
//! exercised on randomized values with shrinking. Case counts are tuned per
//! property so the whole file stays inside an ordinary test budget.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use tk_core::beta::{beta_product_coeffs, BetaPoly, TruncRing};
use tk_core::kk::{i_star, KKElement, Membership};
use tk_core::presentation::{Generator, Presentation, Relation};
use tk_core::ring::{denominator_divides_power, rat, Rational};
use tk_core::series::TruncSeries;
use tk_core::snf::{col_hnf, det_bareiss, in_col_span, snf, AbGroup, IntMat};
use tk_core::tor::{beta_act, lambda_closure, relative_resolution, tor, Mode};
use tk_core::twist::twisted_k;
use tk_core::LaurentPoly;

// ---------------------------------------------------------------------------
// Strategies

fn laurent_strategy() -> impl Strategy<Value = LaurentPoly> {
    // 0..4 monomials c·u^a·v^b with small coefficients and window exponents.
    prop::collection::vec((-3i64..=3, -3i64..=3, -6i64..=6, 1i64..=4), 0..4).prop_map(|monos| {
        let mut f = LaurentPoly::zero();
        for (a, b, n, d) in monos {
            f = &f + &LaurentPoly::monomial(rat(n, d), &[("u", a), ("v", b)]);
        }
        f
    })
}

fn beta_poly_strategy(max_index: u32) -> impl Strategy<Value = BetaPoly> {
    prop::collection::vec((-3i64..=3, 0..=max_index, -9i64..=9), 0..4).prop_map(|terms| {
        let mut x = BetaPoly::zero();
        for (m, j, c) in terms {
            x = x.add(&BetaPoly::term(BigInt::from(c), m, j));
        }
        x
    })
}

fn int_mat_strategy() -> impl Strategy<Value = IntMat> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
        prop::collection::vec(-30i64..=30, r * c)
            .prop_map(move |entries| IntMat::from_fn(r, c, |i, j| BigInt::from(entries[i * c + j])))
    })
}

/// A valid presentation: every coefficient is t-parity homogeneous and each
/// relation has a constant parity across its generators.
fn presentation_strategy() -> impl Strategy<Value = Presentation> {
    let coeff = (0u8..=1, prop::collection::vec((-4i64..=4, 0u32..=3, 0i64..=1), 1..3));
    let relation = prop::collection::vec(coeff, 0..3);
    (
        1u32..=3,                             // truncation D
        prop::collection::vec(0u8..=1, 1..4), // generator parities
        prop::collection::vec((relation, 0u8..=1), 0..4),
    )
        .prop_map(|(d, parities, raw_relations)| {
            let generators: Vec<Generator> = parities
                .iter()
                .enumerate()
                .map(|(i, p)| Generator { name: format!("g{i}"), parity: *p })
                .collect();
            let mut relations: Vec<Relation> = Vec::new();
            for (raw, rho) in raw_relations {
                let mut rel: Relation = Vec::new();
                for (i, (gen_pick, terms)) in raw.into_iter().enumerate() {
                    let g = (gen_pick as usize + i) % generators.len();
                    // Coefficient t-parity must equal ρ + π(g) (mod 2).
                    let sigma = (rho + generators[g].parity) % 2;
                    let mut c = BetaPoly::zero();
                    for (n, j, extra) in terms {
                        if n == 0 || j > d {
                            continue;
                        }
                        let m = i64::from(sigma) + 2 * extra;
                        c = c.add(&BetaPoly::term(BigInt::from(n), m, j));
                    }
                    if !c.is_zero() {
                        rel.push((g, c));
                    }
                }
                if !rel.is_empty() {
                    relations.push(rel);
                }
            }
            Presentation::new(d, generators, relations).expect("constructed to be valid")
        })
}

// ---------------------------------------------------------------------------
// Laurent polynomial ring laws and the sampling homomorphism

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laurent_ring_laws(f in laurent_strategy(), g in laurent_strategy(), h in laurent_strategy()) {
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&(&f + &g) + &h, &f + &(&g + &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
    }

    #[test]
    fn sampling_is_a_ring_homomorphism(f in laurent_strategy(), g in laurent_strategy(), k in 1i64..=7) {
        let fe = KKElement::new(f.clone()).unwrap();
        let ge = KKElement::new(g.clone()).unwrap();
        let prod = KKElement::new(&f * &g).unwrap();
        prop_assert_eq!(prod.sample(k), &fe.sample(k) * &ge.sample(k));
        let sum = KKElement::new(&f + &g).unwrap();
        prop_assert_eq!(sum.sample(k), &fe.sample(k) + &ge.sample(k));
    }

    #[test]
    fn conjugation_is_an_involution(f in laurent_strategy()) {
        let e = KKElement::new(f).unwrap();
        prop_assert_eq!(e.conj().conj(), e.clone());
        prop_assert_eq!(e.conj().eps(), e.eps());
    }
}

// ---------------------------------------------------------------------------
// Formal group law structure constants against the series oracle

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_coefficients_match_series_expansion(i in 1u32..=8, j in 1u32..=8) {
        // Independent oracle: c^k_{ij} is the coefficient of s^i t^j in
        // (s + t + st)^k, read off from exact truncated series arithmetic.
        let order = i + j;
        let s = TruncSeries::<Rational>::var(&["s", "t"], order, "s");
        let t = TruncSeries::<Rational>::var(&["s", "t"], order, "t");
        let base = s.add(&t).add(&s.mul(&t));
        for (k, c) in beta_product_coeffs(i, j) {
            let series_c = base.pow(k).coeff(&[i, j]);
            prop_assert_eq!(Rational::from(c), series_c, "c^{}_{{{}{}}}", k, i, j);
        }
        // Symmetry comes free from the law; assert it anyway.
        prop_assert_eq!(beta_product_coeffs(i, j), beta_product_coeffs(j, i));
    }

    #[test]
    fn truncated_product_is_full_product_truncated(
        x in beta_poly_strategy(4),
        y in beta_poly_strategy(4),
        d in 4u32..=8,
    ) {
        let ring = TruncRing::new(d);
        let full = x.mul(&y);
        let mut expected = BetaPoly::zero();
        for ((m, i), c) in full.terms() {
            if *i <= d {
                expected = expected.add(&BetaPoly::term(c.clone(), *m, *i));
            }
        }
        prop_assert_eq!(ring.multiply(&x, &y).unwrap(), expected);
    }
}

// ---------------------------------------------------------------------------
// Membership decision vs sampling oracle, with verified witnesses

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn membership_decision_is_consistent(f in laurent_strategy()) {
        let e = KKElement::new(f).unwrap();
        match e.membership() {
            Membership::Integral => {
                for k in (-15i64..=15).filter(|k| *k != 0) {
                    prop_assert!(e.sample_is_admissible(k), "k = {}", k);
                }
                let parts = e.decompose().expect("members decompose");
                prop_assert_eq!(KKElement::recompose(&parts), e);
            }
            Membership::NotIntegral { witness } => {
                let w = witness.expect("witness for every non-member");
                let coeff = e.sample(w.k).coeff(&[("t", w.t_exp)]);
                prop_assert_eq!(&coeff, &w.value);
                prop_assert!(!denominator_divides_power(coeff.denom(), w.k));
            }
        }
    }

    #[test]
    fn basis_images_decompose_to_a_single_term(m in -3i64..=3, k in 1u32..=6) {
        let parts = i_star(&BetaPoly::term(BigInt::from(1), m, k)).decompose().unwrap();
        prop_assert_eq!(parts.len(), 1);
        let expected = LaurentPoly::monomial(rat(1, 1), &[("u", m - k as i64)]);
        prop_assert_eq!(parts.get(&k), Some(&expected));
    }
}

// ---------------------------------------------------------------------------
// Smith normal form postconditions

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_contract_holds(a in int_mat_strategy()) {
        let res = snf(&a);
        prop_assert_eq!(res.u.mul(&a).mul(&res.v), res.s.clone());
        prop_assert_eq!(det_bareiss(&res.u).abs(), BigInt::from(1));
        prop_assert_eq!(det_bareiss(&res.v).abs(), BigInt::from(1));
        prop_assert_eq!(res.u.mul(&res.u_inv), IntMat::identity(a.rows()));
        prop_assert_eq!(res.v.mul(&res.v_inv), IntMat::identity(a.cols()));
        let d = res.diagonal();
        for i in 0..d.len() {
            prop_assert!(d[i].is_positive());
            if i + 1 < d.len() {
                prop_assert!((&d[i + 1] % &d[i]).is_zero(), "divisibility at {}", i);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Presented-module invariants

fn rename_generators(p: &Presentation, perm: &[usize]) -> Presentation {
    // Move generator i to position perm[i], keeping names attached.
    let gens = p.generators();
    let mut new_gens: Vec<Generator> =
        vec![Generator { name: String::new(), parity: 0 }; gens.len()];
    for (i, g) in gens.iter().enumerate() {
        new_gens[perm[i]] = g.clone();
    }
    let relations = p
        .relations()
        .iter()
        .map(|rel| rel.iter().map(|(g, c)| (perm[*g], c.clone())).collect())
        .collect();
    Presentation::new(p.truncation(), new_gens, relations)
        .expect("permuted presentation stays valid")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn twisted_k_is_presentation_invariant(p in presentation_strategy()) {
        let base = twisted_k(&p);

        // Reversing the generator order is a permutation move.
        let n = p.generators().len();
        let perm: Vec<usize> = (0..n).rev().collect();
        let moved = rename_generators(&p, &perm);
        prop_assert_eq!(twisted_k(&moved).to_json_string(), base.to_json_string());

        // Reversing the relation list never changes the quotient.
        let reversed = Presentation::new(
            p.truncation(),
            p.generators().to_vec(),
            p.relations().iter().rev().cloned().collect(),
        )
        .unwrap();
        prop_assert_eq!(twisted_k(&reversed).to_json_string(), base.to_json_string());

        // Adjoining a generator killed by β_0 adds nothing.
        let mut gens = p.generators().to_vec();
        gens.push(Generator { name: "extra".into(), parity: 0 });
        let mut rels = p.relations().to_vec();
        rels.push(vec![(n, BetaPoly::term(BigInt::from(1), 0, 0))]);
        let padded = Presentation::new(p.truncation(), gens, rels).unwrap();
        prop_assert_eq!(twisted_k(&padded).to_json_string(), base.to_json_string());
    }

    #[test]
    fn cyclic_relations_reduce_by_gcd(n in 1i64..=30, m in 1i64..=30) {
        let p = Presentation::new(
            4,
            vec![Generator { name: "x".into(), parity: 0 }],
            vec![
                vec![(0, BetaPoly::term(BigInt::from(n), 0, 1))],
                vec![(0, BetaPoly::term(BigInt::from(m), 0, 1))],
            ],
        )
        .unwrap();
        let g = twisted_k(&p);
        let gcd = BigInt::from(n).gcd(&BigInt::from(m));
        let expected = if gcd == BigInt::from(1) {
            AbGroup { free_rank: 0, torsion: vec![] }
        } else {
            AbGroup { free_rank: 0, torsion: vec![gcd] }
        };
        prop_assert_eq!(g.parity0, expected);
        prop_assert!(g.parity1.free_rank == 0 && g.parity1.torsion.is_empty());
    }
}

// ---------------------------------------------------------------------------
// Derived functor pipeline: both modes agree at degree zero, complexes are
// honest complexes, and the relative stage-0 counit is split surjective.

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tor_runs_and_agrees_with_the_quotient(p in presentation_strategy()) {
        let base = twisted_k(&p).to_json_string();
        for mode in [Mode::Free, Mode::Relative] {
            // `tor` cross-checks Tor_0 against the direct quotient and
            // errors out on any mismatch, so an Ok here is itself the check.
            let report = tor(&p, 2, mode).expect("tor pipeline stays consistent");
            prop_assert_eq!(report.groups.len(), 3);
            prop_assert_eq!(report.groups[0].to_json_string(), base.clone());
        }
    }

    #[test]
    fn relative_counit_is_split_surjective(p in presentation_strategy()) {
        let ring = TruncRing::new(p.truncation());
        let dim = (p.truncation() + 1) as usize;
        for parity in [0u8, 1] {
            let (blocks, rels) = tk_core::tor::parity_block(&p, parity);
            if blocks == 0 {
                continue;
            }
            let res = relative_resolution(&ring, blocks, &rels, 0);
            let counit_cols: Vec<Vec<BigInt>> = res
                .generators(0)
                .iter()
                .flat_map(|g| (0..dim).map(|j| beta_act(&ring, blocks, g, j as u32)))
                .collect();
            let counit = IntMat::from_cols(blocks * dim, &counit_cols);
            let closure = lambda_closure(&ring, blocks, &rels);
            let rel_lattice = col_hnf(&IntMat::from_cols(blocks * dim, &closure));
            let round_trip = counit.mul(res.lift());
            for a in 0..blocks * dim {
                let mut diff = round_trip.column(a);
                diff[a] -= BigInt::from(1);
                prop_assert!(
                    in_col_span(&rel_lattice, &diff),
                    "basis vector {} fails to round-trip in parity {}", a, parity
                );
            }
        }
    }
}
