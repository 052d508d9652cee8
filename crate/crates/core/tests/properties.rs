use num_bigint::BigInt;
use proptest::prelude::*;

use tangle_u1::decider::{
    certificate_in_small_square_pair, decide_u1, rational_replacement_unpruned, unknotting_slope, SlopeResult,
};
use tangle_u1::em::{em_crossing_number, em_recognize_knot, em_square_form, em_validate, EMKnotParams, TABLE_EM11};
use tangle_u1::notation::{dot_orbit, dot_square, family_square_form, parse, serialize, ConwayWord, PairSpec};
use tangle_u1::oracle::{evaluate, tree_to_diagram, OracleError, DEFAULT_CAP};
use tangle_u1::slopes::{
    crossing_move, distance, q, solve_horizontal_clasp, solve_vertical_clasp, ExtRational, Mat2,
};
use tangle_u1::tangles::{
    apply, braid_action, mutate, square_normalize, two_bridge_unknot, type_one_fill, word_for_matrix, BraidLetter,
    BraidWord, Knot, PairSite, SquareTangle, Symmetry, TangleExpr,
};

fn ext(max_den: i64) -> impl Strategy<Value = ExtRational> {
    (-40i64..=40, 0..=max_den).prop_filter_map("0/0", |(n, d)| (n != 0 || d != 0).then(|| q(n, d)))
}

fn slot(max_den: i64) -> impl Strategy<Value = ExtRational> {
    (-15i64..=15, 2..=max_den).prop_filter_map("integral", |(n, d)| {
        let x = q(n, d);
        (!x.is_integer()).then_some(x)
    })
}

fn small_slot(max_den: i64) -> impl Strategy<Value = ExtRational> {
    (2..=max_den, any::<prop::sample::Index>()).prop_filter_map("integral", |(d, i)| {
        let n = i.index(2 * d as usize - 1) as i64 - (d - 1);
        let x = q(n, d);
        (!x.is_integer()).then_some(x)
    })
}

fn unimodular() -> impl Strategy<Value = Mat2> {
    prop::collection::vec(prop::sample::select(BraidLetter::ALL.to_vec()), 0..8)
        .prop_flat_map(|w| (Just(BraidWord(w)), any::<bool>()))
        .prop_map(|(w, m)| {
            let a = braid_action(&w);
            if m {
                a.compose(&Mat2::mirror())
            } else {
                a
            }
        })
}

fn braid_word() -> impl Strategy<Value = BraidWord> {
    prop::collection::vec(prop::sample::select(BraidLetter::ALL.to_vec()), 0..6).prop_map(BraidWord)
}

fn tree() -> impl Strategy<Value = TangleExpr> {
    let leaf = prop_oneof![
        ext(6).prop_map(TangleExpr::Leaf),
        (slot(5), slot(5)).prop_map(|(a, b)| TangleExpr::TypeI(a, b)),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (slot(5), inner.clone()).prop_map(|(g, t)| TangleExpr::TypeII(g, Box::new(t))),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| TangleExpr::TypeIII(Box::new(l), Box::new(r))),
            (braid_word(), inner.clone()).prop_map(|(w, t)| TangleExpr::Braid(w, Box::new(t))),
            (prop::sample::select(Symmetry::ALL.to_vec()), inner).prop_map(|(s, t)| TangleExpr::Symmetry(s, Box::new(t))),
        ]
    })
}

fn square(max_den: i64) -> impl Strategy<Value = SquareTangle> {
    (slot(max_den), slot(max_den), slot(max_den), slot(max_den)).prop_map(|(a, b, c, d)| SquareTangle::filled(a, b, c, d))
}

fn small_square(max_den: i64) -> impl Strategy<Value = SquareTangle> {
    (small_slot(max_den), small_slot(max_den), small_slot(max_den), small_slot(max_den))
        .prop_map(|(a, b, c, d)| SquareTangle::filled(a, b, c, d))
}

/// Determinant and Jones coefficients, or None past the cap. Link Jones
/// polynomials depend on orientation and are left out.
fn invariants(k: &Knot) -> Option<(u64, Vec<(i32, i64)>)> {
    let d = match tree_to_diagram(k, DEFAULT_CAP) {
        Ok(d) => d,
        Err(OracleError::CapExceeded { .. }) => return None,
        Err(e) => panic!("{k}: {e}"),
    };
    let det = d.determinant(DEFAULT_CAP).expect("determinant");
    let jones = if d.component_count() == 1 {
        d.jones(DEFAULT_CAP).expect("jones").into_iter().collect()
    } else {
        Vec::new()
    };
    Some((det, jones))
}

fn mirrored_jones(j: &[(i32, i64)]) -> Vec<(i32, i64)> {
    let mut out: Vec<(i32, i64)> = j.iter().map(|&(e, c)| (-e, c)).collect();
    out.sort();
    out
}

fn verdict(k: &Knot) -> bool {
    decide_u1(k).expect("square forms are large algebraic").verdict
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn distance_is_symmetric_and_invariant(a in ext(9), b in ext(9), m in unimodular()) {
        prop_assert_eq!(distance(&a, &b), distance(&b, &a));
        prop_assert_eq!(distance(&a, &a), BigInt::from(0));
        prop_assert_eq!(distance(&m.apply(&a), &m.apply(&b)), distance(&a, &b));
    }

    #[test]
    fn matrix_inverse_undoes_action(x in ext(9), m in unimodular()) {
        prop_assert_eq!(m.inverse().apply(&m.apply(&x)), x);
    }

    #[test]
    fn clasp_witnesses_are_sound(x in ext(60)) {
        if let Some(w) = solve_vertical_clasp(&x) {
            prop_assert_eq!(w.value(), x.clone());
            prop_assert!(w.s >= BigInt::from(1));
        }
        if let Some(w) = solve_horizontal_clasp(&x, None) {
            prop_assert_eq!(w.value(), x.clone());
        }
    }

    #[test]
    fn crossing_move_sends_target_to_infinity(from in ext(12), to in ext(12)) {
        if let Some(mv) = crossing_move(&from, &to) {
            prop_assert!(mv.transform.apply(&to).is_infinite());
            prop_assert_eq!(mv.transform.det(), BigInt::from(1));
            prop_assert_eq!(mv.witness.value(), mv.transform.apply(&from));
        }
    }

    #[test]
    fn fill_closes_to_unknot(a in slot(9), b in slot(9)) {
        match type_one_fill(&a, &b).unwrap() {
            Some(x) => prop_assert!(two_bridge_unknot(&a.add_int(&x), &b)),
            None => {
                for x in -6i64..=6 {
                    prop_assert!(!two_bridge_unknot(&a.add_int(&BigInt::from(x)), &b));
                }
            }
        }
    }

    #[test]
    fn braid_action_is_a_homomorphism(u in braid_word(), v in braid_word(), x in ext(9)) {
        prop_assert_eq!(apply(&u.concat(&v), &x), apply(&v, &apply(&u, &x)));
        let inv = BraidWord(u.0.iter().rev().map(|l| l.inverse()).collect());
        prop_assert_eq!(apply(&u.concat(&inv), &x), x);
    }

    #[test]
    fn words_realize_matrices(m in unimodular(), x in ext(9)) {
        let (w, mirrored) = word_for_matrix(&m);
        let mut y = x.clone();
        if mirrored {
            y = y.neg();
        }
        prop_assert_eq!(apply(&w, &y), m.apply(&x));
    }

    #[test]
    fn serialize_then_parse(t in tree()) {
        let k = Knot::new(t);
        let text = serialize(&k);
        prop_assert_eq!(parse(&text).unwrap(), k);
    }

    #[test]
    fn square_normal_form_is_orbit_invariant(s in square(6), n in -3i64..=3, pick in 0usize..5) {
        let shift = BigInt::from(n);
        let v = s.values().unwrap();
        let moved = match pick {
            0 => mutate(&s, PairSite::First).unwrap(),
            1 => mutate(&s, PairSite::Second).unwrap(),
            2 => s.mirror(),
            3 => SquareTangle::filled(v[0].add_int(&shift), v[1].add_int(&-&shift), v[2].clone(), v[3].clone()),
            _ => SquareTangle::filled(v[2].clone(), v[3].clone(), v[0].clone(), v[1].clone()),
        };
        prop_assert_eq!(square_normalize(&s).unwrap().form, square_normalize(&moved).unwrap().form);
    }

    #[test]
    fn mirror_preserves_verdict(s in square(5)) {
        let k = s.to_knot().unwrap();
        prop_assert_eq!(verdict(&k), verdict(&k.mirror()));
    }

    #[test]
    fn verdict_is_invariant_on_normal_forms(s in square(5)) {
        let n = square_normalize(&s).unwrap();
        prop_assert_eq!(verdict(&s.to_knot().unwrap()), verdict(&n.form.to_knot().unwrap()));
    }

    #[test]
    fn pruned_moves_never_certify(s in small_square(6)) {
        let k = s.to_knot().unwrap();
        if let Some(c) = rational_replacement_unpruned(&k).unwrap() {
            prop_assert!(!certificate_in_small_square_pair(&k, &c), "{} {}", s, c.site);
        }
        if let Some(c) = decide_u1(&k).unwrap().certificate {
            prop_assert!(!certificate_in_small_square_pair(&k, &c));
        }
    }

    #[test]
    fn unknotting_slope_of_rational_leaf(x in ext(9)) {
        prop_assert_eq!(unknotting_slope(&TangleExpr::Leaf(x.clone())), SlopeResult::Rational(x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn twist_and_untwist_preserve_invariants(t in tree(), l in prop::sample::select(BraidLetter::ALL.to_vec())) {
        let k = Knot::new(t.clone());
        let twisted = Knot::new(TangleExpr::Braid(BraidWord(vec![l, l.inverse()]), Box::new(t)));
        if let (Some(a), Some(b)) = (invariants(&k), invariants(&twisted)) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn mirror_inverts_jones(t in tree()) {
        let k = Knot::new(t);
        if let (Some((d1, j1)), Some((d2, j2))) = (invariants(&k), invariants(&k.mirror())) {
            prop_assert_eq!(d1, d2);
            prop_assert_eq!(mirrored_jones(&j1), j2);
        }
    }

    #[test]
    fn two_bridge_unknot_matches_oracle(a in slot(7), b in slot(7)) {
        let k = Knot::new(TangleExpr::TypeI(a.clone(), b.clone()));
        if let Ok(r) = evaluate(&k, DEFAULT_CAP) {
            prop_assert_eq!(r.unknotted(), two_bridge_unknot(&a, &b));
            prop_assert_eq!(BigInt::from(r.determinant), distance(&a, &b.neg()));
        }
    }

    #[test]
    fn dot_orbit_preserves_knot_type(e in prop::array::uniform4(prop_oneof![
        (2i64..=4).prop_map(ExtRational::integer),
        Just(q(5, 2)),
        Just(q(3, 1)),
    ])) {
        let base = dot_square(&e).unwrap().to_knot().unwrap();
        let Some((d0, j0)) = invariants(&base) else { return Ok(()) };
        for (w, sign) in dot_orbit(&e) {
            let k = dot_square(&w).unwrap().to_knot().unwrap();
            if let Some((d, j)) = invariants(&k) {
                prop_assert_eq!(d, d0);
                let expect = if sign == 1 { j0.clone() } else { mirrored_jones(&j0) };
                prop_assert_eq!(j, expect);
            }
        }
    }
}

fn em_params(max_cr: u64) -> Vec<EMKnotParams> {
    let mut out = Vec::new();
    for l in 2..=6 {
        for m in -5..=5 {
            for n in -3..=3 {
                for p in -3..=3 {
                    let k = EMKnotParams::new(l, m, n, p);
                    if em_validate(&k).is_ok() && em_crossing_number(&k).is_ok_and(|c| c <= max_cr) {
                        out.push(k);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn em_recognition_round_trip() {
    let params = em_params(13);
    assert!(params.len() > 20);
    for k in params {
        let s = em_square_form(&k).unwrap();
        let r = em_recognize_knot(&s).unwrap_or_else(|| panic!("{k} not recognized"));
        let back = em_square_form(&r.params).unwrap();
        let (a, b) = (square_normalize(&s).unwrap(), square_normalize(&back).unwrap());
        assert_eq!(a.form, b.form, "{k} vs {}", r.params);
        assert_eq!(a.mirrored != b.mirrored, r.mirrored, "{k}");
        let m = em_recognize_knot(&s.mirror()).unwrap();
        assert_eq!(square_normalize(&em_square_form(&m.params).unwrap()).unwrap().form, a.form);
        if square_normalize(&s.mirror()).unwrap().mirrored != a.mirrored {
            assert_ne!(m.mirrored, r.mirrored, "{k} mirror");
        }
    }
}

#[test]
fn em_squares_are_small_knots_with_unit_replay() {
    for k in em_params(12) {
        let s = em_square_form(&k).unwrap();
        assert!(s.values().unwrap().iter().all(|x| x.abs() < ExtRational::integer(1)), "{k}: {s}");
        let d = decide_u1(&s.to_knot().unwrap()).unwrap();
        assert!(d.verdict, "{k}");
    }
}

#[test]
fn em_table_determinants_and_chirality() {
    let dets = [("8_17", 37), ("9_33", 61), ("10_82", 63), ("10_84", 87), ("10_88", 101), ("10_95", 91)];
    for (name, det) in dets {
        let row = TABLE_EM11.iter().find(|r| r.0 == name).unwrap();
        let k = em_square_form(&row.3).unwrap().to_knot().unwrap();
        assert_eq!(evaluate(&k, DEFAULT_CAP).unwrap().determinant, det, "{name}");
    }
    for row in TABLE_EM11 {
        let from_params = invariants(&em_square_form(&row.3).unwrap().to_knot().unwrap()).unwrap();
        let from_word = invariants(&parse(row.1).unwrap()).unwrap();
        assert_eq!(from_params.0, from_word.0, "{}", row.1);
        let symmetric = from_word.1 == mirrored_jones(&from_word.1);
        if !symmetric {
            let expect = if row.2 == 1 { from_word.1.clone() } else { mirrored_jones(&from_word.1) };
            assert_eq!(from_params.1, expect, "{}", row.1);
        }
    }
}

/// `.a.(b,c)` is settled by Δ(a/(a+1),1/2) = Δ(−1/b,(c+1)/c) = 1.
#[test]
fn dot_pair_family_criterion() {
    let ints: Vec<i64> = (2..=5).flat_map(|v| [v, -v]).collect();
    let mut yes = 0;
    for a in 1..=6i64 {
        for &b in &ints {
            for &c in &ints {
                let pair = PairSpec { a: ExtRational::integer(b), b: ExtRational::integer(c), mirrored: false, dec: 0 };
                let w = ConwayWord::DotPair { a: ExtRational::integer(a), pair, pair_first: false };
                let k = family_square_form(&w).unwrap().knot().unwrap();
                let expect = distance(&q(a, a + 1), &q(1, 2)) == BigInt::from(1)
                    && distance(&q(-1, b), &q(c + 1, c)) == BigInt::from(1);
                let got = verdict(&k);
                assert_eq!(got, expect, ".{a}.({b},{c})");
                yes += got as usize;
            }
        }
    }
    assert!(yes > 0);
}
