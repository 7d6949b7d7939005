use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::category::{pointed_op, poset_category, simplex_category};
use crate::exactla::{PrimeField, Rationals};
use crate::pointed::PointedMap;
use crate::twisted::certify_tw_com;

fn chain3() -> FinCategory {
    let leq = vec![vec![true, true, true], vec![false, true, true], vec![false, false, true]];
    poset_category(vec!["a".into(), "b".into(), "c".into()], &leq).unwrap()
}

fn all_backends() -> Vec<ExtBackend> {
    vec![
        ExtBackend::Cover,
        ExtBackend::CoverDual,
        ExtBackend::Bar(BarKind::Relative),
        ExtBackend::Bar(BarKind::Absolute),
        ExtBackend::Bar(BarKind::Unnormalized),
    ]
}

#[test]
fn gamma_t_copies_factors() {
    let q = Rationals;
    let cat = pointed_op(2);
    let t = gamma_t(&cat, &q).unwrap();
    let f = PointedMap::new(2, 1, vec![1, 1]).unwrap();
    let m = t.map(crate::category::pointed_op_morphism(&cat, &f));
    assert_eq!((m.rows(), m.cols()), (2, 1));
    assert_eq!(m.to_dense(), vec![vec![q.one()], vec![q.one()]]);
}

#[test]
fn f_operad_dimensions() {
    let q = Rationals;
    let base = TwBase::new(&DiscreteOperad::com(4), 3).unwrap();
    let fp = f_operad(&base.tw, &q).unwrap();
    for x in 0..base.tw.num_objects() {
        assert_eq!(fp.dim(x), base.tw.objects()[x].arity());
    }
    assert_eq!(fp.dim(0), 0);
    let eta = eta_shriek(&simplex_category(3), &q).unwrap();
    assert_eq!(eta.dims(), &[1, 2, 3, 4]);
}

#[test]
fn broken_functor_is_rejected() {
    let q = Rationals;
    let cat = chain3();
    let mut maps: Vec<FinMatrix<Rationals>> = (0..cat.num_morphisms())
        .map(|f| FinMatrix::identity(&q, 1).scale(&q.from_i64(if cat.source(f) == cat.target(f) { 1 } else { 2 })))
        .collect();
    assert!(matches!(LinearFunctor::new(&cat, &q, vec![1; 3], maps.clone()), Err(Error::Functoriality(_))));
    maps = (0..cat.num_morphisms()).map(|_| FinMatrix::identity(&q, 1)).collect();
    assert!(LinearFunctor::new(&cat, &q, vec![1; 3], maps).is_ok());
}

#[test]
fn yoneda_on_a_poset() {
    let q = Rationals;
    let cat = chain3();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = random_cokernel(&cat, &q, 3, 1, &mut rng).unwrap();
    for x in 0..3 {
        let rep = representable(&cat, &q, x).unwrap();
        for backend in all_backends() {
            let dims = ext(&cat, &rep, &n, 3, ExtOptions::with_backend(backend)).unwrap();
            assert_eq!(dims, vec![n.dim(x), 0, 0, 0], "{backend} at {x}");
        }
    }
}

#[test]
fn backends_agree_on_random_poset_modules() {
    let p = PrimeField::new(101).unwrap();
    let cat = chain3();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let m = random_cokernel(&cat, &p, 2, 2, &mut rng).unwrap();
        let n = random_cokernel(&cat, &p, 2, 1, &mut rng).unwrap();
        let reference = ext(&cat, &m, &n, 3, ExtOptions::default()).unwrap();
        assert_eq!(reference[0], naturality_dim(&cat, &m, &n).unwrap());
        for backend in all_backends() {
            assert_eq!(ext(&cat, &m, &n, 3, ExtOptions::with_backend(backend)).unwrap(), reference, "{backend}");
        }
    }
}

#[test]
fn gamma_backends_agree_small() {
    let p = PrimeField::new(101).unwrap();
    let cat = pointed_op(2);
    let t = gamma_t(&cat, &p).unwrap();
    let reference = ext(&cat, &t, &t, 2, ExtOptions::default()).unwrap();
    assert_eq!(reference[0], naturality_dim(&cat, &t, &t).unwrap());
    for backend in all_backends() {
        assert_eq!(ext(&cat, &t, &t, 2, ExtOptions::with_backend(backend)).unwrap(), reference, "{backend}");
    }
}

#[test]
fn resolution_is_exact() {
    let p = PrimeField::new(101).unwrap();
    let cat = pointed_op(2);
    let t = gamma_t(&cat, &p).unwrap();
    let res = Resolution::new(&cat, &t, 3).unwrap();
    res.check_exact(&cat, &t).unwrap();
    assert_eq!(res.length(), 3);
}

#[test]
fn com_constant_vanishes_small() {
    let q = Rationals;
    let base = TwBase::new(&DiscreteOperad::com(4), 3).unwrap();
    let c = constant(&base.table, &q, 1).unwrap();
    for backend in [ExtBackend::Cover, ExtBackend::CoverDual] {
        let table = quillen_cohomology(&base, &c, -2, 3, ExtOptions::with_backend(backend)).unwrap();
        assert!(table.degrees.iter().all(|&(_, d)| d == 0), "{backend}: {:?}", table.degrees);
    }
}

#[test]
fn tw_com_relabels_to_gamma() {
    let p = PrimeField::new(101).unwrap();
    let n = 3;
    let base = TwBase::new(&DiscreteOperad::com(n + 1), n).unwrap();
    let cert = certify_tw_com(n).unwrap();
    let fin = pointed_op(n);
    let t = gamma_t(&fin, &p).unwrap();
    assert_eq!(pull_back_to_tw_com(&base, &cert, &t).unwrap(), f_operad(&base.tw, &p).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let target = random_cokernel(&fin, &p, 2, 2, &mut rng).unwrap();
    let pulled = pull_back_to_tw_com(&base, &cert, &target).unwrap();
    let gamma = ext(&fin, &t, &target, 3, ExtOptions::default()).unwrap();
    let quillen = quillen_cohomology(&base, &pulled, -1, 2, ExtOptions::default()).unwrap();
    let shifted: Vec<usize> = quillen.degrees.iter().map(|&(_, d)| d).collect();
    assert_eq!(shifted, gamma);
}

#[test]
fn les_on_constant_and_eta() {
    let p = PrimeField::new(101).unwrap();
    let cat = simplex_category(3);
    for f in [constant(&cat, &p, 1).unwrap(), eta_shriek(&cat, &p).unwrap()] {
        let report = les_check_ass(&cat, &f, 3).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
    }
}

#[test]
fn les_on_random_functors() {
    let p = PrimeField::new(101).unwrap();
    let cat = simplex_category(3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..3 {
        let f = random_cokernel(&cat, &p, 3, 2, &mut rng).unwrap();
        let report = les_check_ass(&cat, &f, 3).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
    }
}

#[test]
fn cosimplicial_matches_ext_from_constant() {
    let p = PrimeField::new(101).unwrap();
    let n = 3;
    let cat = simplex_category(n);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..3 {
        let f = random_cokernel(&cat, &p, 2, 1, &mut rng).unwrap();
        let c = constant(&cat, &p, 1).unwrap();
        let ext_dims = ext(&cat, &c, &f, n, ExtOptions::default()).unwrap();
        let coch = cosimplicial_cohomology(&cat, &f).unwrap();
        assert_eq!(ext_dims[..n], coch[..n]);
    }
}

#[test]
fn json_roundtrip() {
    let q = Rationals;
    let cat = pointed_op(2);
    let t = gamma_t(&cat, &q).unwrap();
    let back = LinearFunctor::from_json(&cat, &q, &t.to_json()).unwrap();
    assert_eq!(back, t);
}
