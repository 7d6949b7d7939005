use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twarrow::category::{pointed_op, simplex_category, Category};
use twarrow::exactla::{random_sparse, Backend, PrimeField, Rationals};
use twarrow::pointed::{iota, MonotoneMap, Permutation, PointedMap};
use twarrow::qcohom::{ext, random_cokernel, representable, ExtBackend, ExtOptions};
use twarrow::sset::FinSimplicialSet;

fn pointed(n: usize, m: usize) -> impl Strategy<Value = PointedMap> {
    prop::collection::vec(0..=m, n).prop_map(move |v| PointedMap::new(n, m, v).unwrap())
}

fn monotone(m: usize, n: usize) -> impl Strategy<Value = MonotoneMap> {
    prop::collection::vec(0..=n, m + 1).prop_map(move |mut v| {
        v.sort_unstable();
        MonotoneMap::new(m, n, v).unwrap()
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=n).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Permutation::new(v).unwrap())
}

proptest! {
    #[test]
    fn pointed_composition_is_associative(
        (f, g, h) in (0..4usize, 0..4usize, 0..4usize, 0..4usize)
            .prop_flat_map(|(a, b, c, d)| (pointed(a, b), pointed(b, c), pointed(c, d)))
    ) {
        let left = h.compose(&g).unwrap().compose(&f).unwrap();
        let right = h.compose(&g.compose(&f).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn pointed_rank_roundtrips(f in (0..5usize, 0..5usize).prop_flat_map(|(n, m)| pointed(n, m))) {
        prop_assert_eq!(PointedMap::from_rank(f.source_size(), f.target_size(), f.rank()), f);
    }

    #[test]
    fn iota_is_contravariant(
        (g, h) in (0..4usize, 0..4usize, 0..4usize).prop_flat_map(|(a, b, c)| (monotone(a, b), monotone(b, c)))
    ) {
        prop_assert_eq!(iota(&h.compose(&g).unwrap()), iota(&g).compose(&iota(&h)).unwrap());
    }

    #[test]
    fn permutations_form_a_group((s, t) in (1..6usize).prop_flat_map(|n| (permutation(n), permutation(n)))) {
        prop_assert!(s.compose(&s.inverse()).is_identity());
        prop_assert_eq!(s.compose(&t).inverse(), t.inverse().compose(&s.inverse()));
    }

    #[test]
    fn rank_plus_nullity(seed in any::<u64>(), rows in 1..12usize, cols in 1..12usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_sparse(&Rationals, rows, cols, 0.4, &mut rng);
        let rank = m.rank_with(Backend::Gaussian);
        prop_assert_eq!(rank + m.kernel_basis().len(), cols);
        prop_assert_eq!(rank, m.transpose().rank_with(Backend::FractionFree));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simplicial_identities(k in 0..3usize, pick in any::<prop::sample::Index>()) {
        for x in [FinSimplicialSet::standard(3), FinSimplicialSet::grid(), FinSimplicialSet::boundary(3).unwrap()] {
            let simplices = x.simplices(k + 2);
            let s = &simplices[pick.index(simplices.len())];
            let n = k + 2;
            for j in 0..=n {
                for i in 0..j {
                    prop_assert_eq!(x.face(&x.face(s, j), i), x.face(&x.face(s, i), j - 1));
                }
                prop_assert_eq!(x.face(&x.degeneracy(s, j), j), s.clone());
                prop_assert_eq!(x.face(&x.degeneracy(s, j), j + 1), s.clone());
            }
        }
    }

    #[test]
    fn random_functors_are_functors(seed in any::<u64>(), gens in 1..4usize, relations in 0..3usize) {
        let field = PrimeField::new(101).unwrap();
        let cat = simplex_category(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_cokernel(&cat, &field, gens, relations, &mut rng).unwrap();
        prop_assert!(f.check_functoriality(&cat).is_ok());
        for x in 0..cat.num_objects() {
            let id = f.map(cat.identity(x));
            prop_assert_eq!(id.rank(), f.dim(x));
        }
    }

    #[test]
    fn representables_are_projective(seed in any::<u64>(), x in 0..3usize) {
        let field = PrimeField::new(101).unwrap();
        let cat = pointed_op(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = random_cokernel(&cat, &field, 2, 1, &mut rng).unwrap();
        let rep = representable(&cat, &field, x).unwrap();
        for backend in [ExtBackend::Cover, ExtBackend::CoverDual] {
            let dims = ext(&cat, &rep, &n, 2, ExtOptions::with_backend(backend)).unwrap();
            prop_assert_eq!(dims, vec![n.dim(x), 0, 0]);
        }
    }
}
