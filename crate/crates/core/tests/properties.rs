use formlab_core::arith::{rat, rational_to_f64};
use formlab_core::counting::{naive_values, represented_values, BoxBound, BoxSource};
use formlab_core::families::{lform, qminus, qplus, SquarefreeSequence};
use formlab_core::structure::{cross_ratio, DEFAULT_DENOMINATOR_BOUND};
use formlab_core::{area, automorphisms, is_isomorphic, BinaryForm, Homography, IsoVerdict, RationalMatrix, P1};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn form(max_deg: usize) -> impl Strategy<Value = BinaryForm> {
    (2..=max_deg)
        .prop_flat_map(|d| proptest::collection::vec(-6i64..=6, d + 1))
        .prop_filter_map("repeated root", |c| BinaryForm::from_ints(&c).ok().filter(|f| f.has_nonzero_disc()))
}

fn matrix(r: i64) -> impl Strategy<Value = RationalMatrix> {
    [-r..=r, -r..=r, -r..=r, -r..=r].prop_filter_map("singular", |a| RationalMatrix::from_ints(a[0], a[1], a[2], a[3]).ok())
}

fn point() -> impl Strategy<Value = P1> {
    prop_oneof![
        1 => Just(P1::Infinity),
        9 => (-40i64..=40, 1i64..=9).prop_map(|(n, d)| P1::Finite(BigRational::new(n.into(), d.into()))),
    ]
}

/// Family members with exact roots, small enough for fast structure checks.
fn member() -> impl Strategy<Value = BinaryForm> {
    prop_oneof![
        (2u32..=3).prop_flat_map(|d| (Just(d), 1..=d + 1)).prop_map(|(d, nu)| qplus(d, nu, &SquarefreeSequence::full()).unwrap()),
        (2u32..=3)
            .prop_flat_map(|d| (Just(d), 1..=d + 1))
            .prop_map(|(d, nu)| qminus(d, nu, &SquarefreeSequence::shifted()).unwrap()),
        prop_oneof![Just((5, 5)), Just((5, 7)), Just((6, 7)), Just((6, 11)), Just((7, 7))]
            .prop_map(|(d, p)| lform(d, p).unwrap()),
    ]
}

fn value(f: &BinaryForm, x: i64, y: i64) -> BigRational {
    f.evaluate_big(&BigInt::from(x), &BigInt::from(y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn homogeneity(f in form(7), x in -50i64..=50, y in -50i64..=50, l in -7i64..=7) {
        let lhs = value(&f, l * x, l * y);
        let rhs = value(&f, x, y) * BigRational::from_integer(BigInt::from(l).pow(f.degree() as u32));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn parity(f in form(7), x in -50i64..=50, y in -50i64..=50) {
        let sign = if f.degree() % 2 == 0 { rat(1) } else { rat(-1) };
        prop_assert_eq!(value(&f, -x, -y), sign * value(&f, x, y));
    }

    #[test]
    fn capped_evaluation_agrees(f in form(7), x in -300i64..=300, y in -300i64..=300) {
        let exact = value(&f, x, y);
        if let formlab_core::CappedInteger::Exact(v) = f.evaluate(x, y, u128::MAX).unwrap() {
            prop_assert_eq!(BigRational::from_integer(BigInt::from(v)), exact);
        }
    }

    #[test]
    fn qplus_values_are_nonnegative(d in 2u32..=4, nu in 1u32..=5, x in -30i64..=30, y in -30i64..=30) {
        prop_assume!(nu <= d + 1);
        let f = qplus(d, nu, &SquarefreeSequence::full()).unwrap();
        prop_assert!(!value(&f, x, y).is_negative());
    }

    #[test]
    fn discriminant_transform(f in form(6), g in matrix(3)) {
        let d = f.degree() as i32;
        let lhs = f.compose(&g).discriminant().unwrap();
        let rhs = f.discriminant().unwrap() * g.det().pow(d * (d - 1));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cross_ratio_invariance(
        pts in proptest::collection::vec(point(), 4).prop_filter("distinct", |v| {
            (0..4).all(|i| (i + 1..4).all(|j| v[i] != v[j]))
        }),
        g in matrix(5),
    ) {
        let h = Homography::new(&g);
        let before = cross_ratio(&pts[0], &pts[1], &pts[2], &pts[3]).unwrap();
        let img: Vec<P1> = pts.iter().map(|p| h.apply(p)).collect();
        let after = cross_ratio(&img[0], &img[1], &img[2], &img[3]).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn counting_matches_naive_enumeration(f in form(6), b in 1u64..=20_000, x in 1i64..=30, a in 0u64..=3) {
        let bx = BoxBound { x: x as u64, rigorous: false, source: BoxSource::UserCap, min_max: a };
        let fast = represented_values(&f, b, &bx).unwrap().to_vec();
        let slow: Vec<i128> = naive_values(&f, b, x, a).unwrap().into_iter().collect();
        prop_assert_eq!(fast, slow);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn automorphisms_form_a_conjugation_invariant_group(f in member(), g in matrix(2)) {
        let a = automorphisms(&f).unwrap();
        prop_assert!(a.is_group());
        for m in &a.elements {
            prop_assert_eq!(&f.compose(m), &f);
        }
        let b = automorphisms(&f.compose(&g)).unwrap();
        prop_assert!(b.is_group());
        prop_assert_eq!(a.order(), b.order());
        prop_assert_eq!(a.classification, b.classification);
    }

    #[test]
    fn isomorphism_is_sound_and_symmetric(f1 in member(), f2 in member(), g in matrix(2), twist in any::<bool>()) {
        let f2 = if twist { f1.compose(&g) } else { f2 };
        let v12 = is_isomorphic(&f1, &f2, DEFAULT_DENOMINATOR_BOUND).unwrap();
        let v21 = is_isomorphic(&f2, &f1, DEFAULT_DENOMINATOR_BOUND).unwrap();
        prop_assert_eq!(v12.kind(), v21.kind());
        prop_assert_ne!(v12.kind(), "Unknown");
        if let IsoVerdict::Yes { gamma, verified } = &v12 {
            prop_assert!(*verified);
            prop_assert_eq!(&f2.compose(gamma), &f1);
        }
        if twist {
            prop_assert_eq!(v12.kind(), "Yes");
        }
    }

    #[test]
    fn area_scales_by_inverse_determinant(f in form(6), g in matrix(2)) {
        prop_assume!(f.degree() >= 3);
        let a = area(&f, 1e-10).unwrap().value;
        let b = area(&f.compose(&g), 1e-10).unwrap().value;
        let det = rational_to_f64(g.det()).abs();
        prop_assert!(!g.det().is_zero());
        prop_assert!((b * det - a).abs() <= 1e-6 * a, "A(F) = {a}, A(F o g) = {b}, det = {det}");
    }
}
