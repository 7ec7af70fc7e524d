mod common;

use gaussmoves::corpus::{random_diagram, rng};
use gaussmoves::invariants::{all_patterns, builtin_pattern, count_pattern, w3, ArrowPattern};
use gaussmoves::moves::inverse_site;
use gaussmoves::realizability::{build_map, genus};
use gaussmoves::{
    apply_move, canonical_form, classify, connected_sum, enumerate_insertion_sites, enumerate_removal_sites, mirror,
    parse_gauss_code, reverse_orientation, serialize, writhe, DiagramState, GaussDiagram,
};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn oracle_agrees_on_every_small_pattern() {
    let mut r = rng(17);
    let mut patterns: Vec<ArrowPattern> = (1..=4).flat_map(all_patterns).collect();
    patterns.push(builtin_pattern('w', 5).unwrap());
    for _ in 0..40 {
        let n = r.gen_range(0..=6);
        let d = random_diagram(&mut r, n);
        for p in &patterns {
            assert_eq!(count_pattern(&d, p), common::naive_count(&d, p), "{} / {p}", d.raw_code());
        }
    }
}

#[test]
fn oracle_matching_is_rotation_and_label_blind() {
    let p = common::w3_pattern();
    let q = ArrowPattern::parse("t7 h5 t9 h7 t5 h9").unwrap();
    assert!(common::same_unsigned_diagram(q.word(), p.word()));
    let r = ArrowPattern::parse("t1 t2 t3 h1 h2 h3").unwrap();
    assert!(common::same_unsigned_diagram(ArrowPattern::parse("t1 h2 t3 h1 t2 h3").unwrap().word(), p.word()));
    assert!(!common::same_unsigned_diagram(r.word(), p.word()));
}

#[test]
fn trefoil_and_figure_eight_w3() {
    let t = parse_gauss_code("O1+U2+O3+U1+O2+U3+").unwrap();
    let f = parse_gauss_code("O1+U2+O3-U4-O2+U1+O4-U3-").unwrap();
    assert_eq!(w3(&t), 1);
    assert_eq!(common::naive_count(&t, &common::w3_pattern()), 1);
    assert_eq!(w3(&f), 0);
    assert_eq!(w3(&mirror(&t)), -1);
}

#[test]
fn four_arrow_patterns_have_one_representative_per_class() {
    let ps = all_patterns(4);
    for (k, p) in ps.iter().enumerate() {
        for q in &ps[k + 1..] {
            assert!(!common::same_unsigned_diagram(p.word(), q.word()), "{p} ~ {q}");
        }
    }
}

fn arb_diagram(max: usize) -> impl Strategy<Value = GaussDiagram> {
    (any::<u64>(), 0..=max).prop_map(|(seed, n)| random_diagram(&mut rng(seed), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialize_parse_roundtrip(d in arb_diagram(7)) {
        let back = parse_gauss_code(&serialize(&d)).unwrap();
        prop_assert_eq!(canonical_form(&back), canonical_form(&d));
        prop_assert_eq!(parse_gauss_code(&d.raw_code()).unwrap(), d);
    }

    #[test]
    fn canonical_form_ignores_rotation(d in arb_diagram(7), k in 0usize..20) {
        let start = if d.is_empty() { 0 } else { k % d.word().len() };
        prop_assert_eq!(canonical_form(&d.rotated(start)), canonical_form(&d));
    }

    #[test]
    fn involutions(d in arb_diagram(7)) {
        prop_assert_eq!(canonical_form(&mirror(&mirror(&d))), canonical_form(&d));
        prop_assert_eq!(canonical_form(&reverse_orientation(&reverse_orientation(&d))), canonical_form(&d));
        prop_assert_eq!(writhe(&mirror(&d)), -writhe(&d));
        prop_assert_eq!(genus(&mirror(&d)), genus(&d));
    }

    #[test]
    fn sum_with_empty_is_identity(d in arb_diagram(6), gap in 0usize..20) {
        let g = gap % d.gap_count();
        let s = connected_sum(&d, g, &GaussDiagram::empty(), 0).unwrap();
        prop_assert_eq!(canonical_form(&s), canonical_form(&d));
    }

    #[test]
    fn every_listed_move_undoes(d in arb_diagram(5), pick in any::<prop::sample::Index>()) {
        let state = DiagramState::new(d.clone(), 0);
        let mut sites: Vec<_> = enumerate_removal_sites(&d).into_iter().map(|(s, _)| s).collect();
        sites.extend(enumerate_insertion_sites(&d));
        let site = sites[pick.index(sites.len())];
        let dc = classify(&site, &d).unwrap();
        let after = apply_move(&state, &site).unwrap();
        let undo = inverse_site(&d, &site, after.diagram()).unwrap();
        let back = apply_move(&after, &undo).unwrap();
        prop_assert_eq!(canonical_form(back.diagram()), canonical_form(&d));
        prop_assert_eq!(back.winding(), 0);
        let du = classify(&undo, after.diagram()).unwrap();
        prop_assert_eq!(du.class, dc.class);
        prop_assert_eq!(du.direction, -dc.direction);
    }

    #[test]
    fn euler_characteristic_is_even(d in arb_diagram(7)) {
        if let Ok(m) = build_map(&d) {
            let chi = m.euler_characteristic();
            prop_assert!(chi <= 2 && chi % 2 == 0);
        }
    }
}
