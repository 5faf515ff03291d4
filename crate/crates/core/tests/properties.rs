mod common;

use common::*;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use troplag_core::lattice::{cross, mixed, smith_normal_form, IntMatrix, IntVector};
use troplag_core::multiplicity::{leaf_momentum, mixed_h_product, propagate, Root};
use troplag_core::topology::{canonical_q, pick_interior};

fn vec3() -> impl Strategy<Value = [i64; 3]> {
    prop::array::uniform3(-20i64..=20).prop_filter("nonzero", |v| *v != [0, 0, 0])
}

fn to_iv(v: [i64; 3]) -> IntVector {
    iv(&v)
}

proptest! {
    #[test]
    fn leaf_momentum_is_orthogonal(d in vec3(), z in vec3()) {
        let r = leaf_momentum(&to_iv(d), &to_iv(z)).unwrap();
        prop_assert!(r.vector.dot(&to_iv(d)).is_zero());
        prop_assert!(r.vector.dot(&to_iv(z)).is_zero());
        prop_assert_eq!(r.n.clone(), r.vector.content());
    }

    #[test]
    fn propagate_is_orthogonal_to_outgoing(a in vec3(), b in vec3(), za in vec3(), zb in vec3()) {
        let (a, b) = (to_iv(a), to_iv(b));
        let out = a.add(&b).neg();
        prop_assume!(!out.is_zero());
        let ra = leaf_momentum(&a, &to_iv(za)).unwrap();
        let rb = leaf_momentum(&b, &to_iv(zb)).unwrap();
        let r = propagate(&ra, &rb, &out).unwrap();
        prop_assert!(r.vector.dot(&out).is_zero());
    }

    #[test]
    fn mixed_is_alternating(u in vec3(), v in vec3(), w in vec3()) {
        let (u, v, w) = (to_iv(u), to_iv(v), to_iv(w));
        prop_assert_eq!(mixed(&u, &v, &w).unwrap(), -mixed(&v, &u, &w).unwrap());
        prop_assert_eq!(mixed(&u, &v, &w).unwrap(), cross(&u, &v).unwrap().dot(&w));
    }

    #[test]
    fn snf_contract(entries in prop::collection::vec(-50i64..=50, 12)) {
        let m = IntMatrix::new(3, 4, entries.into_iter().map(BigInt::from).collect()).unwrap();
        let s = smith_normal_form(&m);
        prop_assert_eq!(s.u.mul(&m).unwrap().mul(&s.v).unwrap(), s.d.clone());
        prop_assert!(s.u.det().unwrap().abs().is_one());
        prop_assert!(s.v.det().unwrap().abs().is_one());
        let d = s.divisors();
        prop_assert!(d.windows(2).all(|w| w[1].is_multiple_of(&w[0])));
    }

    #[test]
    fn canonical_q_is_orbit_invariant(p in 2i64..60, q in 1i64..60) {
        let (pb, qb) = (BigInt::from(p), BigInt::from(q));
        prop_assume!(qb.gcd(&pb).is_one());
        let c = canonical_q(&pb, &qb);
        prop_assert_eq!(canonical_q(&pb, &(-&qb)), c.clone());
        let inv = (1..p).find(|x| (x * q).rem_euclid(p) == 1).unwrap();
        prop_assert_eq!(canonical_q(&pb, &BigInt::from(inv)), c.clone());
        prop_assert!(c >= BigInt::zero() && c < pb);
    }

    #[test]
    fn pick_is_translation_free(a in prop::array::uniform2(-8i64..=8), b in prop::array::uniform2(-8i64..=8)) {
        let c = [-a[0] - b[0], -a[1] - b[1]];
        prop_assume!(a[0] * b[1] - a[1] * b[0] != 0);
        let u = [iv(&a), iv(&b), iv(&c)];
        let swapped = [iv(&b), iv(&a), iv(&c)];
        prop_assert_eq!(pick_interior(&u).unwrap(), pick_interior(&swapped).unwrap());
    }

    #[test]
    fn root_choice_does_not_matter(seed in 0u64..500) {
        let mut r = rng(seed);
        let case = random_case(&mut r, 5);
        let Ok(m) = mixed_h_product(&case.skeleton, &case.z, None) else { return Ok(()) };
        for j in 0..5 {
            let x = mixed_h_product(&case.skeleton, &case.z, Some(Root::Leaf(j))).unwrap();
            prop_assert_eq!(x.abs(), m.abs());
        }
    }
}
