mod common;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use torifan::lattice::{hermite_normal_form, smith_normal_form, IntegerMatrix};
use torifan::polytope::normal_form;
use torifan::verify::data::curated_polytopes;

#[test]
fn seeded_trials() {
    common::run_trials().unwrap();
}

fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntegerMatrix> {
    prop::collection::vec(-6i64..=6, rows * cols)
        .prop_map(move |e| IntegerMatrix::from_i64(rows, cols, &e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_trial(seed in any::<u64>()) {
        prop_assert_eq!(common::trial(seed), Ok(()));
    }

    #[test]
    fn normal_form_is_unimodular_invariant(seed in any::<u64>(), which in 0usize..20) {
        let polys = curated_polytopes().unwrap();
        let p = &polys[which % polys.len()].1;
        let g = common::random_unimodular(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(normal_form(&p.base().transform(&g).unwrap()), normal_form(p.base()));
    }

    #[test]
    fn smith_form_factorizes(a in small_matrix(3, 5)) {
        let s = smith_normal_form(&a);
        prop_assert!(s.u.is_unimodular() && s.v.is_unimodular());
        prop_assert_eq!(&(&s.u * &a) * &s.v, s.d.clone());
        prop_assert!(s.d.is_diagonal());
        let f = s.invariant_factors();
        for w in f.windows(2) {
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
        prop_assert!(f.iter().all(|x| *x >= BigInt::zero()));
    }

    #[test]
    fn hermite_form_factorizes(a in small_matrix(4, 3)) {
        let h = hermite_normal_form(&a);
        prop_assert!(h.u.is_unimodular());
        prop_assert_eq!(&h.u * &a, h.h.clone());
        prop_assert_eq!(h.rank, a.rank());
    }
}
