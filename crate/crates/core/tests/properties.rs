use num_bigint::BigInt;
use num_rational::Rational64;
use proptest::prelude::*;

use pinwheel_core::context::CollarConvention;
use pinwheel_core::enumerate::level_context;
use pinwheel_core::field::ExactScalar;
use pinwheel_core::lattice::{
    constraint_matrix, hermite_normal_form, satisfies_criterion, smith_normal_form, IntMatrix,
};
use pinwheel_core::motion::{rotation_unit, RigidMotion};
use pinwheel_core::patch::{canonicalize, Patch};
use pinwheel_core::winding::SymbolicLoop;

fn scalar() -> impl Strategy<Value = ExactScalar> {
    (prop::array::uniform4(-20i64..=20), 1i64..30).prop_map(|(n, d)| ExactScalar::from_parts(n, d))
}

fn translation() -> impl Strategy<Value = ExactScalar> {
    (-50i64..=50, -50i64..=50, prop::sample::select(vec![1i64, 2, 5, 10, 25]))
        .prop_map(|(x, y, d)| ExactScalar::from_parts([x, y, 0, 0], d))
}

fn motion() -> impl Strategy<Value = RigidMotion> {
    (-8i64..=8, 0u8..4, translation()).prop_map(|(a, b, t)| RigidMotion::new(a, b, t))
}

fn int_matrix(m: usize, n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-9i64..=9, n), m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn motion_inverse_round_trip(g in motion(), p in scalar()) {
        prop_assert_eq!(g.inverse().apply(&g.apply(&p)), p);
    }

    #[test]
    fn motions_preserve_squared_distance(g in motion(), p in scalar(), q in scalar()) {
        let before = (&p - &q).norm_sqr();
        let after = (&g.apply(&p) - &g.apply(&q)).norm_sqr();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn composition_is_application(g in motion(), h in motion(), p in scalar()) {
        prop_assert_eq!(g.compose(&h).apply(&p), g.apply(&h.apply(&p)));
    }

    #[test]
    fn conj_is_an_involutive_automorphism(x in scalar(), y in scalar()) {
        prop_assert_eq!(x.conj().conj(), x.clone());
        prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
        prop_assert_eq!((&x + &y).conj(), &x.conj() + &y.conj());
    }

    #[test]
    fn conj_fixes_real_subfield(a in -50i64..50, c in -50i64..50, d in 1i64..20) {
        let r = ExactScalar::from_parts([a, 0, c, 0], d);
        prop_assert_eq!(r.conj(), r);
    }

    #[test]
    fn kernel_criterion_equivalence(x in prop::collection::vec(-3i64..=3, 12)) {
        let c = constraint_matrix();
        let big: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        let in_kernel = c.mul_vec(&big).iter().all(|v| *v == BigInt::from(0));
        prop_assert_eq!(in_kernel, satisfies_criterion(&x));
    }
}

#[test]
fn rotation_units_are_distinct() {
    let one = ExactScalar::one();
    for a in -12i64..=12 {
        for b in 0u8..4 {
            if (a, b) != (0, 0) {
                assert_ne!(rotation_unit(a, b), one, "a={a} b={b}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_form_identities(rows in int_matrix(3, 4)) {
        let a = IntMatrix::from_i64(&rows);
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).mul(&s.v).rows, s.d.rows.clone());
        prop_assert!(s.d.is_diagonal());
        prop_assert!(s.divisibility_chain());
        prop_assert!(s.u.is_unimodular() && s.v.is_unimodular());
    }

    #[test]
    fn smith_preserves_determinant(rows in int_matrix(3, 3)) {
        let a = IntMatrix::from_i64(&rows);
        let det = a.det();
        prop_assume!(det != BigInt::from(0));
        let s = smith_normal_form(&a);
        let prod: BigInt = s.diagonal().iter().product();
        prop_assert_eq!(prod, det.magnitude().clone().into());
    }

    #[test]
    fn hermite_form_is_a_lattice_invariant(
        rows in int_matrix(3, 4),
        i in 0usize..3,
        j in 0usize..3,
        k in -4i64..=4,
    ) {
        let mut moved = rows.clone();
        if i != j {
            for c in 0..4 {
                moved[i][c] += k * rows[j][c];
            }
        }
        moved.swap(0, 2);
        let h1 = hermite_normal_form(&IntMatrix::from_i64(&rows));
        let h2 = hermite_normal_form(&IntMatrix::from_i64(&moved));
        prop_assert_eq!(h1.rows, h2.rows);
    }

    #[test]
    fn winding_is_additive(m1 in -5i64..=5, m2 in -5i64..=5) {
        let (p1, p2) = (4 * m1 + 2, 4 * m2 + 2);
        let a = SymbolicLoop::for_power(p1).unwrap();
        let b = SymbolicLoop::for_power(p2).unwrap();
        let ab = a.concat(&b).unwrap();
        prop_assert_eq!(ab.index().unwrap(), a.index().unwrap() + b.index().unwrap());
        prop_assert_eq!(a.reversed().index().unwrap(), -a.index().unwrap());
    }

    #[test]
    fn constant_pieces_do_not_wind(k in -6i64..=6) {
        let c = SymbolicLoop::constant(Rational64::from_integer(k));
        prop_assert_eq!(c.index().unwrap(), 0);
    }

    #[test]
    fn canonical_key_ignores_pose_and_order(
        seed in 0usize..625,
        g in motion(),
        rot in 0usize..20,
    ) {
        let lc = level_context(4).unwrap();
        let ctx = &lc.context;
        let ids = ctx.corona(&[seed], 1, CollarConvention::Closed).unwrap_or_else(|_| vec![seed]);
        let tiles: Vec<_> = ids.iter().map(|&j| ctx.tile(j).clone()).collect();
        let p = Patch::new(tiles.clone());
        let mut shuffled = tiles;
        let n = shuffled.len();
        shuffled.rotate_left(rot % n);
        let q = Patch::new(shuffled).moved(&g);
        prop_assert_eq!(canonicalize(&p).0, canonicalize(&q).0);
    }
}
