use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use hermlab::brauer::BrauerClass;
use hermlab::fields::{sqcl_group, FieldDesc, SquareClass};
use hermlab::hermitian::{normalize_type, u_search, InvolutionDesc, UKind};
use hermlab::lab::{LocalField, PadicRational, QuatAlgebra};
use hermlab::quadform::{qf_is_isotropic, qf_is_isotropic_oracle, QuadForm};
use hermlab::uinv::{bounds_ai, u_exact, witness, Assertions, BoundKind, Derivation};

fn tower() -> (FieldDesc, Vec<SquareClass>) {
    let k = FieldDesc::parse("CDV(CDV(F5))").unwrap();
    let classes = sqcl_group(&k).unwrap();
    (k, classes)
}

fn form(k: &FieldDesc, classes: &[SquareClass], idx: &[usize]) -> QuadForm {
    QuadForm::new(k.clone(), idx.iter().map(|&i| classes[i % classes.len()]).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn isotropy_invariant_under_permutation(idx in prop::collection::vec(0usize..8, 1..7), seed in any::<u64>()) {
        let (k, classes) = tower();
        let q = form(&k, &classes, &idx);
        let mut shuffled = idx.clone();
        let mut rng = StdRng::seed_from_u64(seed);
        rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut rng);
        prop_assert_eq!(qf_is_isotropic(&q).unwrap(), qf_is_isotropic(&form(&k, &classes, &shuffled)).unwrap());
    }

    #[test]
    fn isotropy_invariant_under_scaling(idx in prop::collection::vec(0usize..8, 1..7), c in 0usize..8) {
        let (k, classes) = tower();
        let q = form(&k, &classes, &idx);
        prop_assert_eq!(qf_is_isotropic(&q).unwrap(), qf_is_isotropic(&q.scaled(classes[c])).unwrap());
    }

    #[test]
    fn rank_one_forms_are_anisotropic(c in 0usize..8) {
        let (k, classes) = tower();
        prop_assert!(!qf_is_isotropic(&form(&k, &classes, &[c])).unwrap());
    }

    #[test]
    fn springer_matches_oracle_for_larger_primes(p in prop::sample::select(vec![11u64, 13, 17, 19, 23]), idx in prop::collection::vec(0usize..4, 1..6)) {
        let k = FieldDesc::qp(p).unwrap();
        let classes = sqcl_group(&k).unwrap();
        let q = form(&k, &classes, &idx);
        prop_assert_eq!(qf_is_isotropic(&q).unwrap(), qf_is_isotropic_oracle(&q).unwrap());
    }

    #[test]
    fn w_is_a_valuation(x in prop::array::uniform4(-60i64..60), y in prop::array::uniform4(-60i64..60)) {
        let zero = PadicRational::from_int(0, 5);
        let alg = QuatAlgebra::new(zero.int(2), zero.int(5)).unwrap();
        let (x, y) = (alg.from_ints(x), alg.from_ints(y));
        prop_assume!(!alg.is_zero(&x) && !alg.is_zero(&y));
        let (wx, wy) = (alg.w(&x).unwrap(), alg.w(&y).unwrap());
        prop_assert_eq!(alg.w(&alg.mul(&x, &y)).unwrap(), &wx + &wy);
        let s = alg.add(&x, &y);
        if !alg.is_zero(&s) {
            prop_assert!(alg.w(&s).unwrap() >= wx.clone().min(wy.clone()));
        }
        prop_assert_eq!(alg.w(&alg.conj(&x)).unwrap(), wx);
    }
}

fn exact(field: &str, class: &str, kind: UKind, lambda: Option<&str>) -> Derivation {
    let k = FieldDesc::parse(field).unwrap();
    let b = BrauerClass::parse(&k, class).unwrap();
    let l = lambda.map(|l| k.parse_class(l).unwrap());
    u_exact(&b, kind, l.as_ref(), &Assertions::none()).unwrap()
}

#[test]
fn recursion_matches_exhaustive_search() {
    let cases: [(&str, &str, InvolutionDesc, UKind, Option<&str>); 4] = [
        ("CDV(F5)", "(u,pi)", InvolutionDesc::Symplectic, UKind::Minus, None),
        ("CDV(CDV(F5))", "(u,t)", InvolutionDesc::Symplectic, UKind::Minus, None),
        ("F5", "1", InvolutionDesc::Unitary(SquareClass::ONE), UKind::Zero, Some("u")),
        ("CDV(F5)", "1", InvolutionDesc::Unitary(SquareClass::ONE), UKind::Zero, Some("pi")),
    ];
    for (field, class, inv, kind, lambda) in cases {
        let k = FieldDesc::parse(field).unwrap();
        let inv = match (inv, lambda) {
            (InvolutionDesc::Unitary(_), Some(l)) => InvolutionDesc::unitary(&k, k.parse_class(l).unwrap()).unwrap(),
            (inv, _) => inv,
        };
        let b = BrauerClass::parse(&k, class).unwrap();
        let eps = [1i8, -1].into_iter().find(|&s| normalize_type(&inv, s) == kind).unwrap();
        let searched = u_search(&b, &inv, eps, &k).unwrap();
        let d = exact(field, class, kind, lambda);
        assert_eq!(d.value_u64(), Some(searched as u64), "{field} {class} {kind:?}");
    }
}

#[test]
fn witnesses_have_the_exact_rank_and_recheck() {
    for (field, class, kind, lambda) in [
        ("CDV(F5)", "(u,pi)", UKind::Plus, None),
        ("CDV(F5)", "(u,pi)", UKind::Minus, None),
        ("CDV(CDV(F5))", "(u,pi)", UKind::Plus, None),
        ("CDV(CDV(F5))", "1", UKind::Zero, Some("t")),
    ] {
        let k = FieldDesc::parse(field).unwrap();
        let b = BrauerClass::parse(&k, class).unwrap();
        let l = lambda.map(|l| k.parse_class(l).unwrap());
        let r = witness(&b, kind, l.as_ref(), &Assertions::none()).unwrap();
        let d = exact(field, class, kind, lambda);
        assert_eq!(Some(r.rank as u64), d.value_u64());
        assert_ne!(r.verified_anisotropic, Some(false), "{field} {class} {kind:?}");
    }
}

#[test]
fn exact_values_respect_the_a3_bounds() {
    let f = "CDV(CDV(F5))";
    let first = bounds_ai(3, 2, BoundKind::First).unwrap();
    for class in ["(u,pi)", "(u,t)"] {
        for kind in [UKind::Plus, UKind::Minus] {
            assert!(&exact(f, class, kind, None).value <= first.get(kind).unwrap());
        }
    }
    let second = bounds_ai(3, 2, BoundKind::Second).unwrap();
    for (class, l) in [("(u,pi)", "t"), ("(u,t)", "pi")] {
        assert!(&exact(f, class, UKind::Zero, Some(l)).value <= second.get(UKind::Zero).unwrap());
    }
    assert_eq!(first.get(UKind::Plus), Some(&BigRational::from_integer(BigInt::from(6))));
}

#[test]
fn derivation_json_is_stable() {
    let d = exact("CDV(CDV(F5))", "(u,t)", UKind::Plus, None);
    let once = serde_json::to_string(&d).unwrap();
    let value: serde_json::Value = serde_json::from_str(&once).unwrap();
    let twice: serde_json::Value = serde_json::from_str(&serde_json::to_string(&value).unwrap()).unwrap();
    assert_eq!(twice, value);
    for key in ["rule", "field", "class", "kind", "value", "cite", "children"] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
}
