//! The orthogonal group of a 4-dimensional quadratic space over F_ℓ:
//! reflections, Cartan–Dieudonné factorization, spinor norm and Ω.

use std::fmt;

use thiserror::Error;

use crate::matmod::{self, Mat, Vector};
use crate::modp::PrimeField;

/// Smallest ℓ accepted by [`GramForm::new`].
pub const MIN_ELL: u64 = 11;

pub type Mat4 = Mat<4>;
pub type Vec4 = Vector<4>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrthoError {
    #[error("{0} is not a prime ≥ {MIN_ELL}")]
    BadModulus(u64),
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("Gram matrix is degenerate")]
    Degenerate,
    #[error("matrix does not preserve the form")]
    NotOrthogonal,
    #[error("vector is isotropic")]
    Isotropic,
    #[error("matrices belong to different forms")]
    FormMismatch,
}

/// A nondegenerate symmetric bilinear form on F_ℓ⁴.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GramForm {
    field: PrimeField,
    g: Mat4,
}

impl GramForm {
    pub fn new(ell: u64, g: Mat4) -> Result<Self, OrthoError> {
        let field = PrimeField::new(ell)
            .filter(|_| ell >= MIN_ELL)
            .ok_or(OrthoError::BadModulus(ell))?;
        let g = g.map(|row| row.map(|x| x % ell));
        if g != matmod::transpose(&g) {
            return Err(OrthoError::NotSymmetric);
        }
        if matmod::det(&field, &g) == 0 {
            return Err(OrthoError::Degenerate);
        }
        Ok(Self { field, g })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn ell(&self) -> u64 {
        self.field.modulus()
    }

    pub fn gram(&self) -> &Mat4 {
        &self.g
    }

    /// ⟨v, w⟩ = vᵀ G w.
    pub fn pair(&self, v: &Vec4, w: &Vec4) -> u64 {
        let gw = matmod::apply(&self.field, &self.g, w);
        (0..4).map(|i| v[i] * gw[i]).sum::<u64>() % self.ell()
    }

    pub fn norm(&self, v: &Vec4) -> u64 {
        self.pair(v, v)
    }

    pub fn preserves(&self, m: &Mat4) -> bool {
        let f = &self.field;
        matmod::mul(f, &matmod::mul(f, &matmod::transpose(m), &self.g), m) == self.g
    }
}

/// F_ℓ^× / (F_ℓ^×)².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SquareClass {
    Square,
    NonSquare,
}

impl SquareClass {
    /// Class of a nonzero residue.
    pub fn of(f: &PrimeField, x: u64) -> Option<Self> {
        match crate::modp::legendre(x, f.modulus()) {
            0 => None,
            1 => Some(SquareClass::Square),
            _ => Some(SquareClass::NonSquare),
        }
    }

    pub fn mul(self, other: Self) -> Self {
        if self == other {
            SquareClass::Square
        } else {
            SquareClass::NonSquare
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SquareClass::Square => "square",
            SquareClass::NonSquare => "nonsquare",
        })
    }
}

/// An element of O(V) for a fixed form; membership is checked on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OrthMatrix {
    m: Mat4,
    form: GramForm,
}

impl OrthMatrix {
    pub fn new(form: GramForm, m: Mat4) -> Result<Self, OrthoError> {
        let m = m.map(|row| row.map(|x| x % form.ell()));
        if !form.preserves(&m) {
            return Err(OrthoError::NotOrthogonal);
        }
        Ok(Self { m, form })
    }

    pub fn identity(form: GramForm) -> Self {
        Self {
            m: matmod::identity(),
            form,
        }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.m
    }

    pub fn form(&self) -> &GramForm {
        &self.form
    }

    pub fn det(&self) -> u64 {
        matmod::det(self.form.field(), &self.m)
    }

    /// det as ±1.
    pub fn det_sign(&self) -> i8 {
        if self.det() == 1 {
            1
        } else {
            -1
        }
    }

    pub fn is_identity(&self) -> bool {
        self.m == matmod::identity()
    }

    pub fn mul(&self, other: &Self) -> Result<Self, OrthoError> {
        if self.form != other.form {
            return Err(OrthoError::FormMismatch);
        }
        Ok(Self {
            m: matmod::mul(self.form.field(), &self.m, &other.m),
            form: self.form,
        })
    }

    pub fn neg(&self) -> Self {
        Self {
            m: matmod::neg(self.form.field(), &self.m),
            form: self.form,
        }
    }

    pub fn apply(&self, v: &Vec4) -> Vec4 {
        matmod::apply(self.form.field(), &self.m, v)
    }
}

/// `r_v(w) = w - 2⟨v,w⟩/⟨v,v⟩ · v`.
pub fn reflection(form: &GramForm, v: &Vec4) -> Result<OrthMatrix, OrthoError> {
    let f = form.field();
    let q = form.norm(v);
    let qinv = f.inv(q).ok_or(OrthoError::Isotropic)?;
    let c = f.mul(2, qinv);
    // row vector vᵀG
    let vg: Vec4 = std::array::from_fn(|j| (0..4).map(|k| v[k] * form.g[k][j]).sum::<u64>() % form.ell());
    let mut m: Mat4 = matmod::identity();
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = f.sub(m[i][j], f.mul(c, f.mul(v[i], vg[j])));
        }
    }
    Ok(OrthMatrix { m, form: *form })
}

fn combine(f: &PrimeField, basis: &[Vec4], coeffs: &[u64]) -> Vec4 {
    let mut out = [0; 4];
    for (b, &c) in basis.iter().zip(coeffs) {
        for i in 0..4 {
            out[i] = f.add(out[i], f.mul(c, b[i]));
        }
    }
    out
}

/// Nonzero vectors of span(basis) in a fixed order.
fn span_vectors<'a>(f: &'a PrimeField, basis: &'a [Vec4]) -> impl Iterator<Item = Vec4> + 'a {
    let ell = f.modulus();
    let total = ell.pow(basis.len() as u32);
    (1..total).map(move |mut n| {
        let coeffs: Vec<u64> = (0..basis.len())
            .map(|_| {
                let d = n % ell;
                n /= ell;
                d
            })
            .collect();
        combine(f, basis, &coeffs)
    })
}

/// Basis of {w ∈ span(basis) : ⟨x, w⟩ = 0} for anisotropic x in the span.
fn orthogonal_in(form: &GramForm, basis: &[Vec4], x: &Vec4) -> Vec<Vec4> {
    let f = form.field();
    let vals: Vec<u64> = basis.iter().map(|w| form.pair(x, w)).collect();
    let piv = vals.iter().position(|&v| v != 0).expect("x is anisotropic and in the span");
    let inv = f.inv(vals[piv]).expect("nonzero");
    basis
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != piv)
        .map(|(j, w)| {
            let c = f.mul(vals[j], inv);
            std::array::from_fn(|i| f.sub(w[i], f.mul(c, basis[piv][i])))
        })
        .collect()
}

/// Vectors v₁..v_k (k ≤ 5) with `M = r_{v₁} r_{v₂} ⋯ r_{v_k}`.
///
/// Works down a flag of nondegenerate subspaces W on whose complement the
/// running matrix N is already the identity. At each level an anisotropic
/// x ∈ W is either fixed by N or moved along an anisotropic v = Nx - x, in
/// which case r_v N fixes x. If neither happens for any x, one auxiliary
/// reflection changes the determinant on W and the level is retried.
pub fn cartan_dieudonne(m: &OrthMatrix) -> Vec<Vec4> {
    let form = m.form;
    let f = form.field();
    let mut n = *m;
    let mut out = Vec::new();
    let mut basis: Vec<Vec4> = (0..4)
        .map(|i| std::array::from_fn(|j| u64::from(i == j)))
        .collect();
    while !n.is_identity() {
        let mut step = None;
        for x in span_vectors(f, &basis) {
            if form.norm(&x) == 0 {
                continue;
            }
            let nx = n.apply(&x);
            if nx == x {
                step = Some((x, None));
                break;
            }
            let v: Vec4 = std::array::from_fn(|i| f.sub(nx[i], x[i]));
            if form.norm(&v) != 0 {
                step = Some((x, Some(v)));
                break;
            }
        }
        match step {
            Some((x, v)) => {
                if let Some(v) = v {
                    n = reflection(&form, &v).expect("anisotropic").mul(&n).expect("same form");
                    out.push(v);
                }
                basis = orthogonal_in(&form, &basis, &x);
            }
            None => {
                let w = span_vectors(f, &basis)
                    .find(|w| form.norm(w) != 0)
                    .expect("a nondegenerate space has anisotropic vectors");
                n = reflection(&form, &w).expect("anisotropic").mul(&n).expect("same form");
                out.push(w);
            }
        }
        debug_assert!(!basis.is_empty() || n.is_identity());
    }
    out
}

/// Composes reflections in order: `r_{v₁} ⋯ r_{v_k}`.
pub fn compose_reflections(form: &GramForm, vs: &[Vec4]) -> Result<OrthMatrix, OrthoError> {
    vs.iter().try_fold(OrthMatrix::identity(*form), |acc, v| {
        acc.mul(&reflection(form, v)?)
    })
}

/// `det(I + M)` class, when that determinant is nonzero.
pub fn spinor_norm_zassenhaus(m: &OrthMatrix) -> Option<SquareClass> {
    let f = m.form.field();
    let ipm = matmod::add(f, &matmod::identity(), &m.m);
    SquareClass::of(f, matmod::det(f, &ipm))
}

/// Product of the classes of ⟨vᵢ, vᵢ⟩ over a Cartan–Dieudonné factorization.
pub fn spinor_norm_reflections(m: &OrthMatrix) -> SquareClass {
    let f = m.form.field();
    cartan_dieudonne(m)
        .iter()
        .map(|v| SquareClass::of(f, m.form.norm(v)).expect("factors are anisotropic"))
        .fold(SquareClass::Square, SquareClass::mul)
}

pub fn spinor_norm(m: &OrthMatrix) -> SquareClass {
    spinor_norm_zassenhaus(m).unwrap_or_else(|| spinor_norm_reflections(m))
}

/// det M = 1 and spin M = Square.
pub fn in_omega(m: &OrthMatrix) -> bool {
    m.det() == 1 && spinor_norm(m) == SquareClass::Square
}
