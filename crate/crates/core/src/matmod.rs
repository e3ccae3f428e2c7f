//! Fixed-size square matrices over a prime field.

use crate::modp::PrimeField;

pub type Mat<const N: usize> = [[u64; N]; N];
pub type Vector<const N: usize> = [u64; N];

pub fn identity<const N: usize>() -> Mat<N> {
    let mut m = [[0; N]; N];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

pub fn scalar<const N: usize>(f: &PrimeField, c: i64) -> Mat<N> {
    let mut m = [[0; N]; N];
    let c = f.reduce_i64(c);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = c;
    }
    m
}

pub fn from_i64<const N: usize>(f: &PrimeField, a: [[i64; N]; N]) -> Mat<N> {
    a.map(|row| row.map(|x| f.reduce_i64(x)))
}

pub fn mul<const N: usize>(f: &PrimeField, a: &Mat<N>, b: &Mat<N>) -> Mat<N> {
    let mut c = [[0; N]; N];
    for i in 0..N {
        for j in 0..N {
            let mut s = 0u64;
            for k in 0..N {
                s += a[i][k] * b[k][j];
            }
            c[i][j] = s % f.modulus();
        }
    }
    c
}

pub fn add<const N: usize>(f: &PrimeField, a: &Mat<N>, b: &Mat<N>) -> Mat<N> {
    let mut c = *a;
    for i in 0..N {
        for j in 0..N {
            c[i][j] = f.add(a[i][j], b[i][j]);
        }
    }
    c
}

pub fn neg<const N: usize>(f: &PrimeField, a: &Mat<N>) -> Mat<N> {
    a.map(|row| row.map(|x| f.neg(x)))
}

pub fn scale<const N: usize>(f: &PrimeField, c: u64, a: &Mat<N>) -> Mat<N> {
    a.map(|row| row.map(|x| f.mul(c, x)))
}

pub fn transpose<const N: usize>(a: &Mat<N>) -> Mat<N> {
    let mut t = *a;
    for i in 0..N {
        for j in 0..N {
            t[i][j] = a[j][i];
        }
    }
    t
}

pub fn apply<const N: usize>(f: &PrimeField, a: &Mat<N>, v: &Vector<N>) -> Vector<N> {
    let mut out = [0; N];
    for i in 0..N {
        out[i] = (0..N).map(|k| a[i][k] * v[k]).sum::<u64>() % f.modulus();
    }
    out
}

pub fn trace<const N: usize>(f: &PrimeField, a: &Mat<N>) -> u64 {
    (0..N).fold(0, |s, i| f.add(s, a[i][i]))
}

/// Determinant by Gaussian elimination.
pub fn det<const N: usize>(f: &PrimeField, a: &Mat<N>) -> u64 {
    let mut m = *a;
    let mut d = 1u64;
    for col in 0..N {
        let Some(piv) = (col..N).find(|&r| m[r][col] != 0) else {
            return 0;
        };
        if piv != col {
            m.swap(piv, col);
            d = f.neg(d);
        }
        d = f.mul(d, m[col][col]);
        let inv = f.inv(m[col][col]).expect("pivot is nonzero");
        for r in col + 1..N {
            if m[r][col] == 0 {
                continue;
            }
            let factor = f.mul(m[r][col], inv);
            for c in col..N {
                m[r][c] = f.sub(m[r][c], f.mul(factor, m[col][c]));
            }
        }
    }
    d
}

/// Inverse of a 2×2 matrix with determinant 1.
pub fn adjugate2(f: &PrimeField, a: &Mat<2>) -> Mat<2> {
    [[a[1][1], f.neg(a[0][1])], [f.neg(a[1][0]), a[0][0]]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_against_cofactor_expansion() {
        let f = PrimeField::new(13).unwrap();
        let a = from_i64(&f, [[2, -1, 0, 5], [3, 3, 1, 0], [0, 4, 7, 1], [1, 1, 1, 1]]);
        // cofactor expansion over the integers, reduced afterwards
        fn det_int(m: &[Vec<i64>]) -> i64 {
            if m.len() == 1 {
                return m[0][0];
            }
            (0..m.len())
                .map(|j| {
                    let minor: Vec<Vec<i64>> = m[1..]
                        .iter()
                        .map(|r| [&r[..j], &r[j + 1..]].concat())
                        .collect();
                    let s = if j % 2 == 0 { 1 } else { -1 };
                    s * m[0][j] * det_int(&minor)
                })
                .sum()
        }
        let rows = vec![
            vec![2, -1, 0, 5],
            vec![3, 3, 1, 0],
            vec![0, 4, 7, 1],
            vec![1, 1, 1, 1],
        ];
        assert_eq!(det(&f, &a), f.reduce_i64(det_int(&rows)));
        let prod = mul(&f, &a, &transpose(&a));
        assert_eq!(det(&f, &prod), f.mul(det(&f, &a), det(&f, &a)));
    }
}
