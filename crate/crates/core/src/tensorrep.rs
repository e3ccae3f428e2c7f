//! SL₂ ⊗ SL₂ acting on F_ℓ² ⊗ F_ℓ², Kronecker factorization, the trace
//! invariant u_p, and the groups H_ℓ ⊂ G_ℓ = ⟨H_ℓ, γ⟩ with their model over
//! Z[i]/ℓ.
//!
//! Basis order is e₁⊗e₁, e₂⊗e₁, e₁⊗e₂, e₂⊗e₂, so `e_i ⊗ e_j` has index
//! `i + 2j` (0-based) and a 4×4 matrix splits into 2×2 blocks indexed by
//! the second factor.

use std::collections::HashSet;

use thiserror::Error;

use crate::matmod::{self, Mat};
use crate::modp::PrimeField;
use crate::ortho4::{GramForm, Mat4, OrthMatrix, OrthoError};

pub type Mat2 = Mat<2>;

/// Largest BFS cap accepted by [`bfs_group_order`].
pub const MAX_BFS_CAP: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error(transparent)]
    Ortho(#[from] OrthoError),
    #[error("matrix does not have determinant 1")]
    NotSl2,
    #[error("matrix is not a Kronecker product of an SL₂ pair")]
    NotDecomposable,
    #[error("reduction of P_{p} mod {ell} does not have the expected shape")]
    FormMismatch { p: u64, ell: u64 },
    #[error("matrix is not in G_ℓ")]
    NotInG,
    #[error("group has more than {0} elements")]
    CapExceeded(usize),
    #[error("ℓ = {0} too large for packed BFS keys")]
    ModulusTooLarge(u64),
}

/// `h(e₁, e₂) = 1`, `h(e₂, e₁) = -1`.
fn symplectic(f: &PrimeField) -> Mat2 {
    matmod::from_i64(f, [[0, 1], [-1, 0]])
}

/// `A ⊗ B` in the basis above: block (j', j) is `B[j'][j]·A`.
pub fn kron(f: &PrimeField, a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = [[0; 4]; 4];
    for (r, row) in m.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate() {
            *x = f.mul(a[r % 2][c % 2], b[r / 2][c / 2]);
        }
    }
    m
}

fn block(m: &Mat4, jr: usize, jc: usize) -> Mat2 {
    [
        [m[2 * jr][2 * jc], m[2 * jr][2 * jc + 1]],
        [m[2 * jr + 1][2 * jc], m[2 * jr + 1][2 * jc + 1]],
    ]
}

fn from_blocks(blocks: [[Mat2; 2]; 2]) -> Mat4 {
    let mut m = [[0; 4]; 4];
    for (r, row) in m.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate() {
            *x = blocks[r / 2][c / 2][r % 2][c % 2];
        }
    }
    m
}

pub fn is_sl2(f: &PrimeField, a: &Mat2) -> bool {
    matmod::det(f, a) == 1
}

/// The form `b = h ⊗ h` on F_ℓ² ⊗ F_ℓ².
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorForm {
    form: GramForm,
}

impl TensorForm {
    pub fn new(ell: u64) -> Result<Self, TensorError> {
        let f = PrimeField::new(ell).ok_or(OrthoError::BadModulus(ell))?;
        let h = symplectic(&f);
        Ok(Self {
            form: GramForm::new(ell, kron(&f, &h, &h))?,
        })
    }

    pub fn form(&self) -> &GramForm {
        &self.form
    }

    pub fn field(&self) -> &PrimeField {
        self.form.field()
    }

    /// `ξ(A, B) = A ⊗ B`.
    pub fn xi(&self, a: &Mat2, b: &Mat2) -> Result<OrthMatrix, TensorError> {
        let f = self.field();
        if !is_sl2(f, a) || !is_sl2(f, b) {
            return Err(TensorError::NotSl2);
        }
        Ok(OrthMatrix::new(self.form, kron(f, a, b))?)
    }

    /// Inverse of [`TensorForm::xi`] up to the common sign.
    pub fn kronecker_decompose(&self, m: &OrthMatrix) -> Result<PairSL2, TensorError> {
        let f = *self.field();
        let mm = m.matrix();
        // block (jr, jc) = B[jr][jc]·A, so det(block) = B[jr][jc]²
        let (jr, jc, d) = (0..4)
            .map(|k| (k / 2, k % 2))
            .map(|(jr, jc)| (jr, jc, matmod::det(&f, &block(mm, jr, jc))))
            .find(|&(_, _, d)| d != 0)
            .ok_or(TensorError::NotDecomposable)?;
        let s = f.sqrt(d).ok_or(TensorError::NotDecomposable)?;
        let sinv = f.inv(s).expect("nonzero");
        let a = matmod::scale(&f, sinv, &block(mm, jr, jc));
        let (pi, pj) = (0..4)
            .map(|k| (k / 2, k % 2))
            .find(|&(i, j)| a[i][j] != 0)
            .expect("A is invertible");
        let ainv = f.inv(a[pi][pj]).expect("nonzero");
        let mut b = [[0; 2]; 2];
        for (x, row) in b.iter_mut().enumerate() {
            for (y, e) in row.iter_mut().enumerate() {
                *e = f.mul(block(mm, x, y)[pi][pj], ainv);
            }
        }
        if !is_sl2(&f, &a) || !is_sl2(&f, &b) || kron(&f, &a, &b) != *mm {
            return Err(TensorError::NotDecomposable);
        }
        Ok(PairSL2::new(f, a, b))
    }
}

/// A pair (A, B) in SL₂ × SL₂ modulo ±(I, I), stored with the first nonzero
/// entry of A in `[1, (ℓ-1)/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PairSL2 {
    a: Mat2,
    b: Mat2,
}

impl PairSL2 {
    fn new(f: PrimeField, a: Mat2, b: Mat2) -> Self {
        let lead = a.iter().flatten().copied().find(|&x| x != 0).unwrap_or(0);
        if lead > (f.modulus() - 1) / 2 {
            Self {
                a: matmod::neg(&f, &a),
                b: matmod::neg(&f, &b),
            }
        } else {
            Self { a, b }
        }
    }

    pub fn a(&self) -> &Mat2 {
        &self.a
    }

    pub fn b(&self) -> &Mat2 {
        &self.b
    }
}

/// `u_p = tr(ϑ(Frob_p))²` read off `P_p mod ℓ` (coefficients low-first).
pub fn u_invariant(pmod: &[u64; 5], p: u64, ell: u64) -> Result<u64, TensorError> {
    let f = PrimeField::new(ell).ok_or(OrthoError::BadModulus(ell))?;
    let mismatch = TensorError::FormMismatch { p, ell };
    if pmod[0] != 1 || pmod[4] != 1 {
        return Err(mismatch);
    }
    if p % 4 == 1 {
        let b = f.mul(pmod[1], f.inv(2).expect("ℓ is odd"));
        let b2 = f.mul(b, b);
        if pmod[3] != pmod[1] || pmod[2] != f.add(b2, 2) {
            return Err(mismatch);
        }
        Ok(b2)
    } else {
        if pmod[1] != 0 || pmod[3] != 0 {
            return Err(mismatch);
        }
        Ok(f.add(pmod[2], 2))
    }
}

pub fn sl2_generators(f: &PrimeField) -> [Mat2; 2] {
    [
        matmod::from_i64(f, [[1, 1], [0, 1]]),
        matmod::from_i64(f, [[0, -1], [1, 0]]),
    ]
}

/// `diag(A, A) = ξ(A, I)`.
pub fn make_h_generator(f: &PrimeField, a: &Mat2) -> Result<Mat4, TensorError> {
    if !is_sl2(f, a) {
        return Err(TensorError::NotSl2);
    }
    Ok(kron(f, a, &matmod::identity()))
}

/// `γ = ξ(I, B₀) = [[0, -I], [I, 0]]` with `B₀ = [[0, -1], [1, 0]]`.
pub fn make_gamma(f: &PrimeField) -> Mat4 {
    kron(f, &matmod::identity(), &matmod::from_i64(f, [[0, -1], [1, 0]]))
}

/// Element `re + i·im` of Z[i]/ℓ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Gaussian {
    pub re: u64,
    pub im: u64,
}

impl Gaussian {
    fn mul(self, o: Self, f: &PrimeField) -> Self {
        Self {
            re: f.sub(f.mul(self.re, o.re), f.mul(self.im, o.im)),
            im: f.add(f.mul(self.re, o.im), f.mul(self.im, o.re)),
        }
    }

    fn add(self, o: Self, f: &PrimeField) -> Self {
        Self {
            re: f.add(self.re, o.re),
            im: f.add(self.im, o.im),
        }
    }
}

pub type GaussianMat = [[Gaussian; 2]; 2];

pub fn gaussian_mul(f: &PrimeField, x: &GaussianMat, y: &GaussianMat) -> GaussianMat {
    let mut out = [[Gaussian::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0].mul(y[0][j], f).add(x[i][1].mul(y[1][j], f), f);
        }
    }
    out
}

/// `i·I`.
pub fn gaussian_i() -> GaussianMat {
    let i = Gaussian { re: 0, im: 1 };
    let z = Gaussian::default();
    [[i, z], [z, i]]
}

/// `P + iQ ↦ [[P, -Q], [Q, P]]`, so i acts as γ.
pub fn from_gaussian(f: &PrimeField, g: &GaussianMat) -> Mat4 {
    let p: Mat2 = g.map(|row| row.map(|z| z.re));
    let q: Mat2 = g.map(|row| row.map(|z| z.im));
    from_blocks([[p, matmod::neg(f, &q)], [q, p]])
}

/// Model of an element of G_ℓ = H_ℓ ∪ γH_ℓ as a matrix over Z[i]/ℓ.
pub fn to_gaussian(f: &PrimeField, m: &Mat4) -> Result<GaussianMat, TensorError> {
    let p = block(m, 0, 0);
    let q = block(m, 1, 0);
    let zero = [[0; 2]; 2];
    if block(m, 1, 1) != p || block(m, 0, 1) != matmod::neg(f, &q) {
        return Err(TensorError::NotInG);
    }
    let in_h = q == zero && is_sl2(f, &p);
    let in_gamma_h = p == zero && is_sl2(f, &q);
    if !in_h && !in_gamma_h {
        return Err(TensorError::NotInG);
    }
    let mut g = [[Gaussian::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            g[i][j] = Gaussian {
                re: p[i][j],
                im: q[i][j],
            };
        }
    }
    Ok(g)
}

fn pack<const N: usize>(m: &Mat<N>) -> [u16; 16] {
    let mut key = [0u16; 16];
    for (k, x) in m.iter().flatten().enumerate() {
        key[k] = *x as u16;
    }
    key
}

/// Order of the group generated by `gens` via breadth-first closure.
pub fn bfs_group_order<const N: usize>(
    f: &PrimeField,
    gens: &[Mat<N>],
    cap: usize,
) -> Result<usize, TensorError> {
    assert!(N * N <= 16);
    if f.modulus() > u16::MAX as u64 {
        return Err(TensorError::ModulusTooLarge(f.modulus()));
    }
    let cap = cap.min(MAX_BFS_CAP);
    let id: Mat<N> = matmod::identity();
    let mut seen: HashSet<[u16; 16]> = HashSet::from([pack(&id)]);
    let mut frontier = vec![id];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for m in &frontier {
            for g in gens {
                let x = matmod::mul(f, m, g);
                if seen.insert(pack(&x)) {
                    if seen.len() > cap {
                        return Err(TensorError::CapExceeded(cap));
                    }
                    next.push(x);
                }
            }
        }
        frontier = next;
    }
    Ok(seen.len())
}

/// Orders of H_ℓ, G_ℓ, ⟨γ⟩ and the quotient G_ℓ/⟨γ⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupOrders {
    pub h: usize,
    pub g: usize,
    pub gamma: usize,
    pub quotient: usize,
}

pub fn group_orders(f: &PrimeField, cap: usize) -> Result<GroupOrders, TensorError> {
    let mut gens: Vec<Mat4> = sl2_generators(f)
        .iter()
        .map(|a| make_h_generator(f, a))
        .collect::<Result<_, _>>()?;
    let h = bfs_group_order(f, &gens, cap)?;
    let gamma_m = make_gamma(f);
    gens.push(gamma_m);
    let g = bfs_group_order(f, &gens, cap)?;
    let gamma = bfs_group_order(f, &[gamma_m], cap)?;
    Ok(GroupOrders {
        h,
        g,
        gamma,
        quotient: g / gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ortho4::{cartan_dieudonne, compose_reflections, in_omega};

    fn fld(ell: u64) -> PrimeField {
        PrimeField::new(ell).unwrap()
    }

    #[test]
    fn tensor_gram_matrix() {
        let t = TensorForm::new(11).unwrap();
        let m1 = 10;
        assert_eq!(
            t.form().gram(),
            &[[0, 0, 0, 1], [0, 0, m1, 0], [0, m1, 0, 0], [1, 0, 0, 0]]
        );
    }

    #[test]
    fn xi_trivial_cases() {
        let t = TensorForm::new(13).unwrap();
        let f = *t.field();
        let id: Mat2 = matmod::identity();
        assert!(t.xi(&id, &id).unwrap().is_identity());
        let m = matmod::neg(&f, &id);
        assert!(t.xi(&m, &m).unwrap().is_identity());
        let bad = matmod::from_i64(&f, [[2, 0], [0, 1]]);
        assert_eq!(t.xi(&bad, &id), Err(TensorError::NotSl2));
    }

    #[test]
    fn gamma_and_h() {
        let f = fld(11);
        let g = make_gamma(&f);
        let id: Mat2 = matmod::identity();
        assert_eq!(
            g,
            from_blocks([[[[0; 2]; 2], matmod::neg(&f, &id)], [id, [[0; 2]; 2]]])
        );
        assert_eq!(matmod::mul(&f, &g, &g), matmod::scalar(&f, -1));
        assert_eq!(make_h_generator(&f, &id).unwrap(), matmod::identity());
        for a in sl2_generators(&f) {
            let h = make_h_generator(&f, &a).unwrap();
            assert_eq!(matmod::mul(&f, &h, &g), matmod::mul(&f, &g, &h));
        }
    }

    #[test]
    fn decompose_known_elements() {
        let t = TensorForm::new(11).unwrap();
        let f = *t.field();
        let id: Mat2 = matmod::identity();
        let pair = t.kronecker_decompose(&OrthMatrix::identity(*t.form())).unwrap();
        assert_eq!((pair.a(), pair.b()), (&id, &id));
        let gamma = OrthMatrix::new(*t.form(), make_gamma(&f)).unwrap();
        let pair = t.kronecker_decompose(&gamma).unwrap();
        assert_eq!(pair.a(), &id);
        assert_eq!(pair.b(), &matmod::from_i64(&f, [[0, -1], [1, 0]]));
    }

    #[test]
    fn unipotent_elements_factor() {
        // (ξ(U, I) - I) has totally isotropic image, the degenerate case
        let t = TensorForm::new(13).unwrap();
        let f = *t.field();
        let [u, s] = sl2_generators(&f);
        for (a, b) in [(u, matmod::identity()), (u, u), (u, s), (s, u)] {
            let m = t.xi(&a, &b).unwrap();
            let vs = cartan_dieudonne(&m);
            assert!(vs.len() <= 5 && vs.len() % 2 == 0);
            assert_eq!(compose_reflections(t.form(), &vs).unwrap(), m);
            assert!(in_omega(&m));
        }
    }

    #[test]
    fn u_invariant_small_cases() {
        // P₃ = 1 - 2/9 T² + T⁴ mod 11: 9⁻¹ = 5, -2·5 = -10 ≡ 1
        assert_eq!(u_invariant(&[1, 0, 1, 0, 1], 3, 11).unwrap(), 3);
        // (1 + T²)²
        assert_eq!(u_invariant(&[1, 0, 2, 0, 1], 5, 11).unwrap(), 0);
        assert!(matches!(
            u_invariant(&[1, 1, 2, 0, 1], 5, 11),
            Err(TensorError::FormMismatch { p: 5, ell: 11 })
        ));
        assert!(u_invariant(&[1, 1, 0, 1, 1], 3, 11).is_err());
    }

    #[test]
    fn gaussian_model_of_generators() {
        let f = fld(11);
        assert_eq!(to_gaussian(&f, &make_gamma(&f)).unwrap(), gaussian_i());
        let [u, _] = sl2_generators(&f);
        let h = make_h_generator(&f, &u).unwrap();
        let g = to_gaussian(&f, &h).unwrap();
        assert!(g.iter().flatten().all(|z| z.im == 0));
        assert_eq!(from_gaussian(&f, &g), h);
        let mut not_g = h;
        not_g[0][2] = 1;
        assert_eq!(to_gaussian(&f, &not_g), Err(TensorError::NotInG));
    }

    #[test]
    fn small_group_orders() {
        let f = fld(5);
        assert_eq!(bfs_group_order(&f, &sl2_generators(&f), 1000).unwrap(), 120);
        let o = group_orders(&f, 10_000).unwrap();
        assert_eq!((o.h, o.g, o.gamma, o.quotient), (120, 240, 4, 60));
        assert_eq!(
            bfs_group_order(&f, &sl2_generators(&f), 50),
            Err(TensorError::CapExceeded(50))
        );
    }
}
