use nctda::cumulants::{
    convolve, cumulants_to_moments, iid_convolve_rescaled, monotone_moment_partition, moments_of_measure,
    moments_to_cumulants, parse_rational, format_rational, CumulantKind, MeasureMoments, MomentSequence,
};
use nctda::partitions::classify;
use nctda::spectra::SpectralMeasure;
use nctda::Rational;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=7).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

fn moments(k: usize) -> impl Strategy<Value = MomentSequence> {
    proptest::collection::vec(rational(), k).prop_map(|v| MomentSequence::new(v).unwrap())
}

/// Finitely supported measure with rational atoms, as (value, weight) pairs.
fn measure() -> impl Strategy<Value = Vec<(Rational, Rational)>> {
    proptest::collection::vec((-4i64..=4, 1i64..=3, 1u32..=4), 1..=4).prop_map(|atoms| {
        let total: u32 = atoms.iter().map(|a| a.2).sum();
        atoms
            .into_iter()
            .map(|(p, q, w)| {
                (
                    Rational::new(p.into(), q.into()),
                    Rational::new(w.into(), total.into()),
                )
            })
            .collect()
    })
}

fn raw_moments(atoms: &[(Rational, Rational)], k: usize) -> Vec<Rational> {
    (1..=k)
        .map(|n| {
            atoms
                .iter()
                .map(|(x, w)| w * num_traits::pow(x.clone(), n))
                .sum()
        })
        .collect()
}

/// Law of X + Y for independent X ~ a, Y ~ b.
fn product_measure_sum(a: &[(Rational, Rational)], b: &[(Rational, Rational)]) -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    for (x, v) in a {
        for (y, w) in b {
            out.push((x + y, v * w));
        }
    }
    out
}

fn seq(v: Vec<Rational>) -> MomentSequence {
    MomentSequence::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn round_trip_all_kinds(m in moments(10)) {
        for kind in CumulantKind::ALL {
            let c = moments_to_cumulants(&m, kind).unwrap();
            prop_assert_eq!(c.kind(), kind);
            prop_assert_eq!(cumulants_to_moments(&c).unwrap(), m.clone());
        }
    }

    #[test]
    fn low_orders_agree_across_kinds(m in moments(4)) {
        let m1 = m.get(1).clone();
        let var = m.get(2) - &m1 * &m1;
        for kind in CumulantKind::ALL {
            let c = moments_to_cumulants(&m, kind).unwrap();
            prop_assert_eq!(c.get(1), &m1);
            prop_assert_eq!(c.get(2), &var);
        }
    }

    #[test]
    fn convolution_is_commutative_and_associative(a in moments(8), b in moments(8), c in moments(8)) {
        for kind in [CumulantKind::Classical, CumulantKind::Free, CumulantKind::Boolean] {
            let ab = convolve(&a, &b, kind).unwrap();
            prop_assert_eq!(&ab, &convolve(&b, &a, kind).unwrap());
            let left = convolve(&ab, &c, kind).unwrap();
            let right = convolve(&a, &convolve(&b, &c, kind).unwrap(), kind).unwrap();
            prop_assert_eq!(left, right);
        }
    }

    #[test]
    fn classical_convolution_matches_measure_oracle(a in measure(), b in measure()) {
        let k = 8;
        let ma = seq(raw_moments(&a, k));
        let mb = seq(raw_moments(&b, k));
        let expected = seq(raw_moments(&product_measure_sum(&a, &b), k));
        prop_assert_eq!(convolve(&ma, &mb, CumulantKind::Classical).unwrap(), expected);
    }

    #[test]
    fn measure_moments_are_exact(a in measure()) {
        let mu = SpectralMeasure::from_rational_atoms(a.clone()).unwrap();
        match moments_of_measure(&mu, 8).unwrap() {
            MeasureMoments::Exact(m) => prop_assert_eq!(m.values(), &raw_moments(&a, 8)[..]),
            MeasureMoments::Inexact(_) => prop_assert!(false, "rational atoms lost exactness"),
        }
    }

    #[test]
    fn monotone_partition_is_noncrossing(word in proptest::collection::vec(1usize..=4, 1..=12)) {
        let p = monotone_moment_partition(&word).unwrap();
        prop_assert!(classify(&p).is_noncrossing);
        // Every block is monochromatic.
        for b in p.blocks() {
            prop_assert!(b.iter().all(|&x| word[x - 1] == word[b[0] - 1]));
        }
    }

    #[test]
    fn rational_text_round_trip(r in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
}

#[test]
fn classical_cumulants_of_bernoulli_match_generating_function() {
    // log cosh t = t²/2 − t⁴/12 + t⁶/45 − 17 t⁸/2520: κ_2 = 1, κ_4 = −2, κ_6 = 16, κ_8 = −272.
    let m = MomentSequence::from_integers(&[0, 1, 0, 1, 0, 1, 0, 1]).unwrap();
    let c = moments_to_cumulants(&m, CumulantKind::Classical).unwrap();
    let expect: Vec<Rational> = [0, 1, 0, -2, 0, 16, 0, -272]
        .iter()
        .map(|&x: &i64| Rational::from_integer(x.into()))
        .collect();
    assert_eq!(c.values(), &expect[..]);
}

#[test]
fn catalan_moments_have_free_delta_cumulants() {
    let m = MomentSequence::from_integers(&[0, 1, 0, 2, 0, 5, 0, 14, 0, 42]).unwrap();
    let c = moments_to_cumulants(&m, CumulantKind::Free).unwrap();
    for (k, v) in c.values().iter().enumerate() {
        assert_eq!(v.is_zero(), k != 1, "free cumulant {}", k + 1);
    }
}

#[test]
fn rescaled_bernoulli_sums_approach_the_limit_laws() {
    let m = MomentSequence::from_integers(&[0, 1, 0, 1]).unwrap();
    // The fourth moment of the normalized sum is exactly limit − correction/N.
    let n = 100u64;
    let expected = [
        (CumulantKind::Classical, Rational::new(3.into(), 1.into()) - Rational::new(2.into(), BigInt::from(n))),
        (CumulantKind::Free, Rational::new(2.into(), 1.into()) - Rational::new(1.into(), BigInt::from(n))),
        (CumulantKind::Boolean, Rational::new(1.into(), 1.into())),
    ];
    for (kind, m4) in expected {
        let s = iid_convolve_rescaled(&m, n, kind).unwrap();
        assert_eq!(s.get(4), &m4, "{kind:?}");
    }
}

#[test]
fn binary_monotone_convolution_is_rejected() {
    let m = MomentSequence::from_integers(&[0, 1]).unwrap();
    assert!(convolve(&m, &m, CumulantKind::Monotone).is_err());
}
