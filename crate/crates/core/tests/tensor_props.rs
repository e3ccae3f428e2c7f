use psl2_surface::matmod;
use psl2_surface::modp::PrimeField;
use psl2_surface::ortho4::in_omega;
use psl2_surface::tensorrep::{
    from_gaussian, gaussian_i, gaussian_mul, group_orders, make_gamma, make_h_generator,
    to_gaussian, u_invariant, Mat2, TensorForm,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ELLS: [u64; 3] = [11, 13, 19];

fn random_sl2(rng: &mut ChaCha8Rng, f: &PrimeField) -> Mat2 {
    loop {
        let m: Mat2 = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(0..f.modulus())));
        let d = matmod::det(f, &m);
        if let Some(inv) = f.inv(d) {
            return [[f.mul(m[0][0], inv), f.mul(m[0][1], inv)], m[1]];
        }
    }
}

#[test]
fn xi_is_a_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for ell in ELLS {
        let t = TensorForm::new(ell).unwrap();
        let f = *t.field();
        for _ in 0..100 {
            let (a1, a2, b1, b2) = (
                random_sl2(&mut rng, &f),
                random_sl2(&mut rng, &f),
                random_sl2(&mut rng, &f),
                random_sl2(&mut rng, &f),
            );
            let lhs = t
                .xi(&matmod::mul(&f, &a1, &a2), &matmod::mul(&f, &b1, &b2))
                .unwrap();
            let rhs = t.xi(&a1, &b1).unwrap().mul(&t.xi(&a2, &b2).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn kernel_of_xi() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let t = TensorForm::new(11).unwrap();
    let f = *t.field();
    let id: Mat2 = matmod::identity();
    let m1 = matmod::neg(&f, &id);
    // exhaustive over the scalar pairs
    for a in [id, m1] {
        for b in [id, m1] {
            assert_eq!(t.xi(&a, &b).unwrap().is_identity(), a == b);
        }
    }
    for _ in 0..500 {
        let a = random_sl2(&mut rng, &f);
        let b = random_sl2(&mut rng, &f);
        let trivial = (a == id && b == id) || (a == m1 && b == m1);
        assert_eq!(t.xi(&a, &b).unwrap().is_identity(), trivial);
    }
}

#[test]
fn image_lies_in_omega() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for ell in ELLS {
        let t = TensorForm::new(ell).unwrap();
        let f = *t.field();
        for _ in 0..200 {
            let m = t.xi(&random_sl2(&mut rng, &f), &random_sl2(&mut rng, &f)).unwrap();
            assert!(in_omega(&m));
        }
        let minus = t.xi(&matmod::scalar(&f, -1), &matmod::identity()).unwrap();
        assert!(in_omega(&minus));
    }
}

#[test]
fn kronecker_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for ell in ELLS {
        let t = TensorForm::new(ell).unwrap();
        let f = *t.field();
        for _ in 0..100 {
            let (a, b) = (random_sl2(&mut rng, &f), random_sl2(&mut rng, &f));
            let m = t.xi(&a, &b).unwrap();
            let pair = t.kronecker_decompose(&m).unwrap();
            assert_eq!(t.xi(pair.a(), pair.b()).unwrap(), m);
            let neg = (matmod::neg(&f, &a), matmod::neg(&f, &b));
            assert!((pair.a(), pair.b()) == (&a, &b) || (pair.a(), pair.b()) == (&neg.0, &neg.1));
            let lead = pair.a().iter().flatten().find(|&&x| x != 0).unwrap();
            assert!(*lead <= (ell - 1) / 2);
        }
    }
}

#[test]
fn non_products_are_rejected() {
    let t = TensorForm::new(13).unwrap();
    // a reflection has determinant -1, so it is not A ⊗ B with A, B ∈ SL₂
    let r = psl2_surface::ortho4::reflection(t.form(), &[1, 0, 0, 1]).unwrap();
    assert!(t.kronecker_decompose(&r).is_err());
}

#[test]
fn u_invariant_matches_kronecker_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for ell in ELLS {
        let t = TensorForm::new(ell).unwrap();
        let f = *t.field();
        for b in 0..ell {
            // A = [[b, -1], [1, 0]] has trace b and determinant 1
            let a: Mat2 = [[b, f.neg(1)], [1, 0]];
            let c = random_sl2(&mut rng, &f);
            let a = matmod::mul(&f, &matmod::mul(&f, &c, &a), &matmod::adjugate2(&f, &c));
            let m = t.xi(&a, &matmod::identity()).unwrap();
            let pair = t.kronecker_decompose(&m).unwrap();
            let tr = matmod::trace(&f, pair.a());
            // P = (1 + bT + T²)² mod ℓ for a p ≡ 1 (mod 4) witness
            let pmod = [1, f.mul(2, b), f.add(f.mul(b, b), 2), f.mul(2, b), 1];
            assert_eq!(u_invariant(&pmod, 5, ell).unwrap(), f.mul(tr, tr));
        }
    }
}

#[test]
fn gaussian_model_is_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for ell in ELLS {
        let f = PrimeField::new(ell).unwrap();
        let gamma = make_gamma(&f);
        assert_eq!(to_gaussian(&f, &gamma).unwrap(), gaussian_i());
        let random_g = |rng: &mut ChaCha8Rng| {
            let h = make_h_generator(&f, &random_sl2(rng, &f)).unwrap();
            if rng.gen_bool(0.5) {
                matmod::mul(&f, &gamma, &h)
            } else {
                h
            }
        };
        for _ in 0..100 {
            let x = random_g(&mut rng);
            let y = random_g(&mut rng);
            let gx = to_gaussian(&f, &x).unwrap();
            let gy = to_gaussian(&f, &y).unwrap();
            assert_eq!(from_gaussian(&f, &gx), x);
            let xy = matmod::mul(&f, &x, &y);
            assert_eq!(to_gaussian(&f, &xy).unwrap(), gaussian_mul(&f, &gx, &gy));
        }
    }
}

#[test]
fn group_orders_at_eleven_and_thirteen() {
    for (ell, h, g, q) in [(11u64, 1320usize, 2640usize, 660usize), (13, 2184, 4368, 1092)] {
        let f = PrimeField::new(ell).unwrap();
        let o = group_orders(&f, 100_000).unwrap();
        assert_eq!((o.h, o.g, o.gamma, o.quotient), (h, g, 4, q));
        let ell = ell as usize;
        assert_eq!(o.quotient, ell * (ell * ell - 1) / 2);
    }
}
