//! Randomized checks of the presentation layer: the wedge-square theorem on
//! random data, the residue classifier's homomorphism laws, purity of the
//! coboundary subgroups, and the constructive solvers.

use coinv::abelian::FinAbGroup;
use coinv::group_ring::RingElt;
use coinv::linalg;
use coinv::morphism::{build_transfer, induced_torsion_iso_check};
use coinv::presentation::{
    integral_adjustment, integral_shift, ordered_pair_residue, surjectivity_witness,
    torsion_class_invariant, Presentation,
};
use coinv::sampling::Sampler;
use num_bigint::BigInt;

fn add_vecs(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn scale_vec(a: &[BigInt], k: i64) -> Vec<BigInt> {
    a.iter().map(|x| x * BigInt::from(k)).collect()
}

#[test]
fn torsion_matches_prediction_on_random_data() {
    let mut sampler = Sampler::new(2024);
    for moduli in ["2,2", "2,4", "3,3", "2,2,2", "6"] {
        let group = FinAbGroup::parse(moduli).unwrap();
        let predicted: Vec<BigInt> = group
            .predicted_torsion()
            .into_iter()
            .map(BigInt::from)
            .collect();
        for _ in 0..6 {
            let data = sampler.cocycle_data(&group, 4);
            let pres = Presentation::build(data);
            assert_eq!(
                pres.invariants().torsion_factors,
                predicted,
                "G = {moduli}"
            );
        }
    }
}

/// Torsion classes of known residues: integer combinations of witnesses
/// plus relation noise classify to exactly the chosen coefficients.
#[test]
fn classifier_is_additive_with_known_residues() {
    let group = FinAbGroup::parse("2,2,2").unwrap();
    let pres = Presentation::standard(&group);
    let witnesses = [
        surjectivity_witness(&group, 0, 1).unwrap(),
        surjectivity_witness(&group, 0, 2).unwrap(),
        surjectivity_witness(&group, 1, 2).unwrap(),
    ];
    let mut sampler = Sampler::new(7);
    for _ in 0..15 {
        let coeffs: Vec<i64> = (0..3).map(|_| sampler.range(-3, 3)).collect();
        let mut r = sampler.relation_combo(&pres, 2);
        for (c, w) in coeffs.iter().zip(&witnesses) {
            r = add_vecs(&r, &scale_vec(w, *c));
        }
        let res = torsion_class_invariant(&pres, &r).unwrap();
        for (entry, c) in res.entries.iter().zip(&coeffs) {
            assert_eq!(entry.modulus, 2);
            assert_eq!(entry.residue, c.rem_euclid(2) as u64);
        }
        // Kernel is exactly the relation lattice.
        assert_eq!(
            res.is_zero(),
            pres.in_relation_span(&r).unwrap(),
            "zero residues must coincide with trivial classes"
        );
    }

    // Additivity on random torsion pairs.
    for _ in 0..10 {
        let mk = |s: &mut Sampler| {
            let mut r = s.relation_combo(&pres, 2);
            for w in &witnesses {
                r = add_vecs(&r, &scale_vec(w, s.range(-2, 2)));
            }
            r
        };
        let r1 = mk(&mut sampler);
        let r2 = mk(&mut sampler);
        let lhs = torsion_class_invariant(&pres, &add_vecs(&r1, &r2)).unwrap();
        let rhs = torsion_class_invariant(&pres, &r1)
            .unwrap()
            .add(&torsion_class_invariant(&pres, &r2).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn classifier_antisymmetry_on_random_torsion_classes() {
    let group = FinAbGroup::parse("4,6").unwrap();
    let pres = Presentation::standard(&group);
    let witness = surjectivity_witness(&group, 0, 1).unwrap();
    let mut sampler = Sampler::new(31);
    for _ in 0..10 {
        let r = add_vecs(
            &sampler.relation_combo(&pres, 2),
            &scale_vec(&witness, sampler.range(-3, 3)),
        );
        let (d, r01) = ordered_pair_residue(&pres, &r, 0, 1).unwrap();
        let (_, r10) = ordered_pair_residue(&pres, &r, 1, 0).unwrap();
        assert_eq!((r01 + r10) % d, 0);
    }
}

/// Purity: an integral element assembled from rational maps of the form
/// α(a) = z_a + q_a·N lies in the integer span of the A-side relation rows.
#[test]
fn a_side_purity() {
    let group = FinAbGroup::parse("2,4").unwrap();
    let mut sampler = Sampler::new(12);
    for _ in 0..10 {
        let data = sampler.cocycle_data(&group, 3);
        let pres = Presentation::build(data.clone());
        let n_elt = RingElt::full_sum(&group);
        let alphas: Vec<RingElt> = (0..data.a_len())
            .map(|_| {
                let z = sampler.ring_elt_integral(&group, 3);
                let q = sampler.rational(3, 4);
                z.add(&n_elt.scale(&q))
            })
            .collect();
        let r = pres
            .basis()
            .assemble(|a_idx, b_idx| alphas[a_idx].mul_one_minus(data.b_value(b_idx)))
            .expect("N(e - μ(b)) vanishes, so components are integral");
        // Membership in the span of the A-side rows alone.
        let a_rows: Vec<Vec<BigInt>> = pres
            .a_side_rows()
            .map(|i| pres.relation_rows().row(i).to_vec())
            .collect();
        let a_matrix = linalg::relation_matrix(&a_rows, pres.dim()).unwrap();
        let snf = linalg::smith_normal_form(&a_matrix);
        assert!(snf.in_span_z(&r));
    }
}

/// Transfers respect the two sides separately: A-side rows map into the
/// span of the target's A-side rows, B-side likewise.
#[test]
fn transfer_respects_sides_and_composes() {
    let group = FinAbGroup::parse("2,2").unwrap();
    let mut sampler = Sampler::new(5);
    let side_snf = |pres: &Presentation, rows: std::ops::Range<usize>| {
        let picked: Vec<Vec<BigInt>> = rows.map(|i| pres.relation_rows().row(i).to_vec()).collect();
        linalg::smith_normal_form(&linalg::relation_matrix(&picked, pres.dim()).unwrap())
    };
    for _ in 0..5 {
        let p1 = Presentation::build(sampler.cocycle_data(&group, 3));
        let p2 = Presentation::build(sampler.cocycle_data(&group, 3));
        let p3 = Presentation::build(sampler.cocycle_data(&group, 3));
        let m12 = build_transfer(&p1, &p2).unwrap();
        let m23 = build_transfer(&p2, &p3).unwrap();

        let a_snf = side_snf(&p2, p2.a_side_rows());
        let b_snf = side_snf(&p2, p2.b_side_rows());
        for i in p1.a_side_rows() {
            assert!(a_snf.in_span_z(&m12.apply(p1.relation_rows().row(i))));
        }
        for i in p1.b_side_rows() {
            assert!(b_snf.in_span_z(&m12.apply(p1.relation_rows().row(i))));
        }

        // Composition carries relations of p1 into the relation span of p3.
        let composed = m12.matrix().mul(m23.matrix());
        for i in 0..p1.relation_rows().rows() {
            let image = composed.mul_row_vec(p1.relation_rows().row(i));
            assert!(p3.snf().in_span_z(&image));
        }

        // Induced torsion isomorphisms hold along the way.
        assert!(induced_torsion_iso_check(&m12).is_iso);
        assert!(induced_torsion_iso_check(&m23).is_iso);
    }
}

#[test]
fn roundtrip_fixes_torsion_classes_on_random_pairs() {
    let group = FinAbGroup::parse("2,4").unwrap();
    let mut sampler = Sampler::new(77);
    let std_pres = Presentation::standard(&group);
    let witness = surjectivity_witness(&group, 0, 1).unwrap();
    for _ in 0..5 {
        let other = Presentation::build(sampler.cocycle_data(&group, 4));
        let forward = build_transfer(&std_pres, &other).unwrap();
        let backward = build_transfer(&other, &std_pres).unwrap();
        let back = backward.apply(&forward.apply(&witness));
        assert!(std_pres.classes_equal(&witness, &back).unwrap());
    }
}

/// Construct-then-solve for the integral shift: r_i = x0(e - p_i) + noise.
/// The three-factor group exercises the full recursion depth.
#[test]
fn integral_shift_construct_then_solve() {
    for moduli in ["2,2", "2,3,4"] {
        let group = FinAbGroup::parse(moduli).unwrap();
        let mut sampler = Sampler::new(101);
        for _ in 0..15 {
            let x0 = sampler.ring_elt_rational(&group, 4, 3);
            let rs: Vec<RingElt> = (0..group.rank())
                .map(|i| {
                    x0.mul_one_minus(&group.generator(i))
                        .add(&sampler.ring_elt_integral(&group, 3))
                })
                .collect();
            let x = integral_shift(&group, &rs).unwrap();
            for (i, r) in rs.iter().enumerate() {
                assert!(r.sub(&x.mul_one_minus(&group.generator(i))).is_integral());
            }
        }
    }
}

/// Construct-then-solve for the adjustment, over a family strictly larger
/// than the shift's domain (Q_i and N terms break r_i·P_i integrality).
#[test]
fn integral_adjustment_construct_then_solve() {
    for moduli in ["2,4", "2,3,4"] {
        let group = FinAbGroup::parse(moduli).unwrap();
        let mut sampler = Sampler::new(202);
        for _ in 0..15 {
            let x0 = sampler.ring_elt_rational(&group, 3, 3);
            let rs: Vec<RingElt> = (0..group.rank())
                .map(|i| {
                    let q_term =
                        RingElt::complementary_sum(&group, i).scale(&sampler.rational(2, 3));
                    let n_term = RingElt::full_sum(&group).scale(&sampler.rational(2, 3));
                    x0.mul_one_minus(&group.generator(i))
                        .add(&q_term)
                        .add(&n_term)
                        .add(&sampler.ring_elt_integral(&group, 2))
                })
                .collect();
            let us = integral_adjustment(&group, &rs).unwrap();
            for u in &us {
                assert!(u.is_integral());
            }
            for i in 0..rs.len() {
                for j in 0..rs.len() {
                    let lhs = rs[i].sub(&us[i]).mul_one_minus(&group.generator(j));
                    let rhs = rs[j].sub(&us[j]).mul_one_minus(&group.generator(i));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

/// The classifier agrees between a presentation and its transfer route:
/// mapping a witness into random data and classifying there returns the
/// witness's residues.
#[test]
fn classifier_composes_with_transfers() {
    let group = FinAbGroup::parse("6,6").unwrap();
    let std_pres = Presentation::standard(&group);
    let witness = surjectivity_witness(&group, 0, 1).unwrap();
    let mut sampler = Sampler::new(404);
    let other = Presentation::build(sampler.cocycle_data(&group, 3));
    let map = build_transfer(&std_pres, &other).unwrap();
    let mapped = map.apply(&witness);
    let res = torsion_class_invariant(&other, &mapped).unwrap();
    assert_eq!(res.entries.len(), 1);
    assert_eq!(res.entries[0].modulus, 6);
    assert_eq!(res.entries[0].residue, 1);
}

/// Scaling a witness by its component order lands in the kernel; the class
/// order matches the component modulus.
#[test]
fn witness_orders_across_groups() {
    for (moduli, k, l, d) in [("2,2", 0usize, 1usize, 2u64), ("6,4", 0, 1, 2), ("6,6", 0, 1, 6)] {
        let group = FinAbGroup::parse(moduli).unwrap();
        let pres = Presentation::standard(&group);
        let w = surjectivity_witness(&group, k, l).unwrap();
        assert_eq!(pres.class_order(&w).unwrap(), Some(BigInt::from(d)));
        let killed = scale_vec(&w, d as i64);
        assert!(pres.in_relation_span(&killed).unwrap());
        assert!(torsion_class_invariant(&pres, &killed).unwrap().is_zero());
    }
}

/// Multiples of a witness walk through the whole cyclic component: over
/// Z_6 × Z_6 the class k·w has residue k mod 6 and order 6/gcd(k,6).
#[test]
fn witness_multiples_walk_the_component() {
    let group = FinAbGroup::parse("6,6").unwrap();
    let pres = Presentation::standard(&group);
    let w = surjectivity_witness(&group, 0, 1).unwrap();
    for k in 0..12i64 {
        let kw = scale_vec(&w, k);
        let res = torsion_class_invariant(&pres, &kw).unwrap();
        assert_eq!(res.entries.len(), 1);
        assert_eq!(res.entries[0].modulus, 6);
        assert_eq!(res.entries[0].residue, k.rem_euclid(6) as u64, "k = {k}");
        let expected_order = 6 / num_integer::gcd(k.rem_euclid(6) as u64, 6);
        assert_eq!(
            pres.class_order(&kw).unwrap(),
            Some(BigInt::from(expected_order)),
            "k = {k}"
        );
        assert_eq!(res.is_zero(), pres.in_relation_span(&kw).unwrap());
    }
}

/// The rational solve inside the classifier and the SNF-based membership
/// agree on what a torsion class is.
#[test]
fn torsion_class_detection_routes_agree() {
    let group = FinAbGroup::parse("2,4").unwrap();
    let pres = Presentation::standard(&group);
    let witness = surjectivity_witness(&group, 0, 1).unwrap();
    let mut sampler = Sampler::new(808);
    for _ in 0..10 {
        let torsion = add_vecs(
            &sampler.relation_combo(&pres, 2),
            &scale_vec(&witness, sampler.range(-2, 2)),
        );
        assert!(pres.is_torsion_class(&torsion).unwrap());
        assert!(torsion_class_invariant(&pres, &torsion).is_ok());

        // Adding a basis unit makes it non-torsion in these presentations.
        let mut free = torsion.clone();
        free[pres.basis().index(0, 0, 0)] += BigInt::from(1);
        assert!(!pres.is_torsion_class(&free).unwrap());
        assert!(torsion_class_invariant(&pres, &free).is_err());
    }
}
