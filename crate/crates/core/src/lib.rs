//! L-polynomials of the elliptic surface `t(t-1)(t+1)·y² = x(x+1)(x+t²)`,
//! orthogonal and tensor-product group tools over F_ℓ, and the elimination
//! engine that certifies surjectivity of the associated mod-ℓ projective
//! representation onto PSL₂(F_ℓ).

pub mod certifier;
pub mod exactq;
pub mod ffield;
pub mod lfunc;
pub mod matmod;
pub mod modp;
pub mod ortho4;
pub mod tensorrep;
pub mod weierstrass;
