use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use psl2_surface::certifier::{certify, WitnessData, Verdict};
use psl2_surface::exactq::{nth_power_poly, rat, reduce_mod, QPolynomial};

fn ratio() -> impl Strategy<Value = BigRational> {
    (-200i64..200, 1i64..50).prop_map(|(n, d)| rat(n, d))
}

/// 1 + aT + bT² + aT³ + T⁴ = (1 + uT + T²)(1 + vT + T²).
fn reciprocal_quartic(u: &BigRational, v: &BigRational) -> QPolynomial {
    let one = BigRational::from_integer(1.into());
    let f = QPolynomial::new(vec![one.clone(), u.clone(), one.clone()]);
    let g = QPolynomial::new(vec![one.clone(), v.clone(), one]);
    &f * &g
}

fn in_range() -> impl Strategy<Value = BigRational> {
    (-40i64..=40, 1i64..=20).prop_map(|(n, d)| rat(n * d / 20, d).min(rat(2, 1)).max(rat(-2, 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nth_power_composes(u in in_range(), v in in_range()) {
        let p = reciprocal_quartic(&u, &v);
        let p2 = nth_power_poly(&p, 2).unwrap();
        let p4 = nth_power_poly(&p, 4).unwrap();
        prop_assert_eq!(nth_power_poly(&p2, 2).unwrap(), p4);
        // the square of a factor 1 + uT + T² is 1 + (2 - u²)T + T²
        let two = rat(2, 1);
        let expected = reciprocal_quartic(&(&two - &u * &u), &(&two - &v * &v));
        prop_assert_eq!(p2, expected);
    }

    #[test]
    fn reduction_is_a_ring_homomorphism(x in ratio(), y in ratio(), ell in prop::sample::select(vec![11u64, 13, 19, 1601, 7919])) {
        let l = BigInt::from(ell);
        prop_assume!(x.denom() % &l != BigInt::from(0) && y.denom() % &l != BigInt::from(0));
        let (rx, ry) = (reduce_mod(&x, ell).unwrap(), reduce_mod(&y, ell).unwrap());
        prop_assert_eq!(reduce_mod(&(&x + &y), ell).unwrap(), (rx + ry) % ell);
        prop_assert_eq!(reduce_mod(&(&x * &y), ell).unwrap(), rx * ry % ell);
        let big = BigRational::from_integer(l);
        prop_assert!(reduce_mod(&(&x / &big), ell).is_err() || rx == 0);
    }
}

#[test]
fn adding_witnesses_is_monotone() {
    let all = WitnessData::compute_all(&[3, 5, 7, 11]).unwrap();
    let subsets: Vec<Vec<usize>> = vec![vec![0], vec![1], vec![0, 1], vec![1, 0], vec![2], vec![0, 2, 3]];
    for ell in [17u64, 19, 23, 29, 31, 97, 1009, 1601] {
        for s in &subsets {
            let base: Vec<WitnessData> = s.iter().map(|&i| all[i].clone()).filter(|w| w.p != ell).collect();
            if base.is_empty() {
                continue;
            }
            let before = certify(ell, &base).unwrap().verdict;
            for extra in all.iter().filter(|w| w.p != ell) {
                let mut bigger = base.clone();
                bigger.push(extra.clone());
                let after = certify(ell, &bigger).unwrap().verdict;
                if before == Verdict::Certified {
                    assert_eq!(after, Verdict::Certified, "ℓ={ell} {s:?} + {}", extra.p);
                }
            }
        }
    }
}
