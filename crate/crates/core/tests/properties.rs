use std::sync::Arc;

use proptest::prelude::*;

use telescope_core::complexes::{dual_complex, euler_characteristic, homology, homology_euler};
use telescope_core::exact::{rational, Matrix, Rational};
use telescope_core::group::{regular_representation, FiniteGroup, GroupAlgebraMatrix, GroupRingElement};
use telescope_core::laurent::{LaurentMatrix, Weight};
use telescope_core::random::{random_matrix, random_nilpotent, random_pair, random_rational_complex, rng, RandomSpec};
use telescope_core::telescope::{geometric_inverse, plus_contraction};
use telescope_core::Error;

fn groups() -> Vec<Arc<FiniteGroup>> {
    vec![
        Arc::new(FiniteGroup::trivial()),
        Arc::new(FiniteGroup::cyclic(2)),
        Arc::new(FiniteGroup::cyclic(3)),
        Arc::new(FiniteGroup::symmetric3()),
    ]
}

fn group() -> impl Strategy<Value = Arc<FiniteGroup>> {
    (0..4usize).prop_map(|i| groups()[i].clone())
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rational(n, d))
}

fn element(g: Arc<FiniteGroup>) -> impl Strategy<Value = GroupRingElement> {
    prop::collection::vec(small_rational(), g.order())
        .prop_map(move |c| GroupRingElement::new(g.clone(), c).unwrap())
}

fn element_pair() -> impl Strategy<Value = (GroupRingElement, GroupRingElement, GroupRingElement)> {
    group().prop_flat_map(|g| (element(g.clone()), element(g.clone()), element(g)))
}

fn rational_matrix(max: usize) -> impl Strategy<Value = Matrix<Rational>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(small_rational(), r * c).prop_map(move |data| Matrix::new(r, c, data).unwrap())
    })
}

fn as_matrix(e: &GroupRingElement) -> GroupAlgebraMatrix {
    GroupAlgebraMatrix::scalar(e.group().clone(), e.clone())
}

fn spec(seed: u64) -> RandomSpec {
    RandomSpec::over(groups()[(seed % 3) as usize].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn regular_representation_is_a_ring_map((a, b, _) in element_pair()) {
        let ra = regular_representation(&as_matrix(&a));
        let rb = regular_representation(&as_matrix(&b));
        prop_assert_eq!(regular_representation(&as_matrix(&a.times(&b))), ra.mul(&rb).unwrap());
        prop_assert_eq!(regular_representation(&as_matrix(&a.plus(&b))), ra.add(&rb).unwrap());
        let one = GroupRingElement::one(a.group().clone());
        prop_assert_eq!(regular_representation(&as_matrix(&one)), Matrix::identity(a.group().order()));
    }

    #[test]
    fn group_ring_is_associative_with_unit((a, b, c) in element_pair()) {
        prop_assert_eq!(a.times(&b).times(&c), a.times(&b.times(&c)));
        let one = GroupRingElement::one(a.group().clone());
        prop_assert_eq!(a.times(&one), a.clone());
        prop_assert_eq!(one.times(&a), a.clone());
        prop_assert_eq!(a.times(&b).bar(), b.bar().times(&a.bar()));
    }

    #[test]
    fn relabelled_tables_validate(n in 1usize..7, shift in 0usize..7) {
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let mut inv = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let table: Vec<Vec<usize>> = (0..n)
            .map(|a| (0..n).map(|b| perm[(inv[a] + inv[b]) % n]).collect())
            .collect();
        let g = FiniteGroup::from_table(table).unwrap();
        prop_assert_eq!(g.order(), n);
        prop_assert_eq!(g.mul(g.identity(), perm[1 % n]), perm[1 % n]);
    }

    #[test]
    fn broken_tables_are_rejected(n in 2usize..7, row in 0usize..7, col in 0usize..7) {
        let (row, col) = (row % n, col % n);
        let mut table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        table[row][col] = (table[row][col] + 1) % n;
        prop_assert!(FiniteGroup::from_table(table).is_err());
    }

    #[test]
    fn kernel_and_rank_nullity(m in rational_matrix(6)) {
        let k = m.kernel();
        prop_assert!(m.mul(&k).unwrap().is_zero());
        prop_assert_eq!(m.rank() + k.ncols(), m.ncols());
        prop_assert_eq!(k.rank(), k.ncols());
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn laurent_multiplication_is_associative(seed in any::<u64>(), shifts in prop::array::uniform3(-3i64..=3)) {
        let s = RandomSpec { max_num: 2, ..spec(seed) };
        let mut r = rng(seed);
        let mut laurent = |i: usize| {
            let a = LaurentMatrix::monomial(shifts[i], random_matrix(&mut r, &s, 2, 2));
            a.add(&LaurentMatrix::monomial(shifts[i] + 1, random_matrix(&mut r, &s, 2, 2))).unwrap()
        };
        let (a, b, c) = (laurent(0), laurent(1), laurent(2));
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn geometric_inverse_remainder(seed in any::<u64>(), depth in 0usize..6) {
        let s = spec(seed);
        let h = random_matrix(&mut rng(seed), &s, 2, 2);
        let g = geometric_inverse(&h, depth).unwrap();
        let mut power = GroupAlgebraMatrix::identity(h.group().clone(), 2);
        for _ in 0..=depth {
            power = power.mul(&h).unwrap();
        }
        prop_assert_eq!(g.remainder, LaurentMatrix::monomial(depth as i64 + 1, power));
    }

    #[test]
    fn nilpotent_remainder_vanishes(seed in any::<u64>(), n in 1usize..4) {
        let h = random_nilpotent(&mut rng(seed), &spec(seed), n);
        prop_assert!(geometric_inverse(&h, n - 1).unwrap().remainder_is_zero());
    }

    #[test]
    fn homology_matches_euler(seed in any::<u64>()) {
        let c = random_rational_complex(&mut rng(seed), 4, 3);
        let h = homology(&c).unwrap();
        prop_assert_eq!(homology_euler(&h), euler_characteristic(&c));
    }

    #[test]
    fn dual_sign_law(seed in any::<u64>(), n in -4i64..=4) {
        let c = random_pair(&mut rng(seed), &spec(seed)).complex;
        let sign = if n % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(euler_characteristic(&dual_complex(&c, n).unwrap()), sign * euler_characteristic(&c));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn plus_contraction_on_random_pairs(seed in any::<u64>()) {
        let pair = random_pair(&mut rng(seed), &spec(seed));
        let k = Weight::new(rational(1, 1000)).unwrap();
        match plus_contraction(&pair.map, &k, 4) {
            Ok(cert) => prop_assert!(cert.verified),
            Err(Error::WeightAboveThreshold { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
