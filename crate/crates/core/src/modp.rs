//! Scalar arithmetic modulo a word-sized prime.
//!
//! Everything here works on canonical residues in `[0, m)` stored as `u64`.
//! Moduli are assumed to fit in 32 bits so products never overflow.

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % small == 0 {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod_u128(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut b = base as u128 % m128;
    let mut acc = 1u128 % m128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// `base^exp mod m`.
pub fn pow_mod(base: u64, exp: u64, m: u64) -> u64 {
    pow_mod_u128(base, exp, m)
}

/// Inverse of `a` modulo the prime `m`, or `None` when `a ≡ 0`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let a = a % m;
    if a == 0 {
        return None;
    }
    // extended Euclid on signed values
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Legendre symbol `(a / p)` for an odd prime `p`, returned as -1, 0 or 1.
pub fn legendre(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Tonelli-Shanks square root modulo an odd prime. Returns the root in
/// `[0, (p-1)/2]`, or `None` for a non-residue.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if legendre(a, p) != 1 {
        return None;
    }
    let root = if p % 4 == 3 {
        pow_mod(a, (p + 1) / 4, p)
    } else {
        let mut q = p - 1;
        let mut s = 0u32;
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let mut z = 2;
        while legendre(z, p) != -1 {
            z += 1;
        }
        let mut m = s;
        let mut c = pow_mod(z, q, p);
        let mut t = pow_mod(a, q, p);
        let mut r = pow_mod(a, (q + 1) / 2, p);
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = t2 * t2 % p;
                i += 1;
            }
            let b = pow_mod(c, 1 << (m - i - 1), p);
            m = i;
            c = b * b % p;
            t = t * c % p;
            r = r * b % p;
        }
        r
    };
    Some(root.min(p - root))
}

/// Arithmetic in the prime field F_ℓ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    ell: u64,
}

impl PrimeField {
    /// Caller guarantees `ell` is an odd prime below 2^32.
    pub const fn new_unchecked(ell: u64) -> Self {
        Self { ell }
    }

    pub fn new(ell: u64) -> Option<Self> {
        (ell > 2 && ell < (1 << 32) && is_prime(ell)).then_some(Self { ell })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.ell
    }

    #[inline]
    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.ell as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.ell {
            s - self.ell
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.ell - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.ell - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.ell
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        inv_mod(a, self.ell)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.ell)
    }

    pub fn is_square(&self, a: u64) -> bool {
        legendre(a, self.ell) >= 0
    }

    pub fn sqrt(&self, a: u64) -> Option<u64> {
        sqrt_mod(a, self.ell)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_matches_trial_division() {
        let trial = |n: u64| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..5000 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
    }

    #[test]
    fn inverse_by_search() {
        for &m in &[11u64, 13, 19, 1601] {
            for a in 1..m {
                let expected = (1..m).find(|x| a * x % m == 1).unwrap();
                assert_eq!(inv_mod(a, m), Some(expected));
            }
            assert_eq!(inv_mod(0, m), None);
        }
    }

    #[test]
    fn tonelli_shanks_against_exhaustive_squares() {
        for &p in &[3u64, 5, 7, 11, 13, 17, 19, 41, 97, 113, 257, 1601] {
            for a in 0..p {
                let has_root = (0..p).any(|x| x * x % p == a);
                match sqrt_mod(a, p) {
                    Some(r) => {
                        assert!(has_root);
                        assert_eq!(r * r % p, a);
                        assert!(r <= (p - 1) / 2);
                    }
                    None => assert!(!has_root, "missed root of {a} mod {p}"),
                }
            }
        }
    }
}
