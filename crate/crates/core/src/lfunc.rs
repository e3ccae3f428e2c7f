//! Point counting on the fibers of `t(t-1)(t+1)·y² = x(x+1)(x+t²)` and exact
//! assembly of the reciprocal quartic `P_p(T) = L(T/p, E_p)`.
//!
//! The trace sums `A_k = Σ_{t ∈ U(F_{p^k})} a_t` are the logarithmic
//! derivative coefficients of the L-series, so `L(T) = exp(Σ A_k T^k / k)`.
//! Degree ≤ 2 data plus the functional equation pins down the quartic; the
//! literal Euler product over closed points is kept as an independent oracle.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactq::{rat_int, QPolynomial};
use crate::ffield::{self, enum_irreducibles, fq_ctx, FieldCtx, FieldError, FqElem, MonicPoly};

/// Largest p accepted by [`Mode::FullDirect`]; counting over F_{p⁴} is O(p⁸).
pub const FULL_DIRECT_MAX_P: u64 = 13;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LFuncError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("t = {0} lies over a bad fiber (t ∈ {{0, 1, -1}})")]
    BadFiber(String),
    #[error("full direct counting is limited to p ≤ {FULL_DIRECT_MAX_P}, got p = {0}")]
    CostGuard(u64),
    #[error("P_{p} = {poly} violates the Weil bound")]
    WeilBound { p: u64, poly: String },
    #[error("P_{p} = {poly} has coefficients outside Z[1/p] with denominator | p²")]
    Denominator { p: u64, poly: String },
    #[error("degree-{degree} trace data for p = {p} gives T^{degree} coefficient {found}, reciprocity requires {expected}")]
    FullDirectMismatch {
        p: u64,
        degree: u32,
        expected: String,
        found: String,
    },
    #[error("P_{p} = {poly} does not have the expected shape: {reason}")]
    ShapeViolation {
        p: u64,
        poly: String,
        reason: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// A₁, A₂ plus reciprocity.
    FunctionalEquation,
    /// Additionally counts over F_{p³}, F_{p⁴} and checks the completion.
    FullDirect,
}

/// `P_p(T) = 1 + aT + bT² + aT³ + T⁴` with exact rational a, b.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LPolynomial {
    p: u64,
    a: BigRational,
    b: BigRational,
}

impl LPolynomial {
    /// Validates that denominators divide p² and that every root lies on
    /// the unit circle.
    pub fn new(p: u64, a: BigRational, b: BigRational) -> Result<Self, LFuncError> {
        let lp = Self { p, a, b };
        let p2 = BigInt::from(p) * BigInt::from(p);
        let divides_p2 = |x: &BigRational| (&p2 % x.denom()).is_zero();
        if !divides_p2(&lp.a) || !divides_p2(&lp.b) {
            return Err(LFuncError::Denominator {
                p,
                poly: lp.to_string(),
            });
        }
        if !lp.roots_on_unit_circle() {
            return Err(LFuncError::WeilBound {
                p,
                poly: lp.to_string(),
            });
        }
        Ok(lp)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Coefficient of T and T³.
    pub fn a(&self) -> &BigRational {
        &self.a
    }

    /// Coefficient of T².
    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn to_qpoly(&self) -> QPolynomial {
        QPolynomial::new(vec![
            BigRational::one(),
            self.a.clone(),
            self.b.clone(),
            self.a.clone(),
            BigRational::one(),
        ])
    }

    /// P factors over R as (1 + uT + T²)(1 + vT + T²) with u + v = a and
    /// uv = b - 2; every root is on |z| = 1 iff u, v are real and in
    /// [-2, 2]. The test is the sign pattern of z² - az + (b - 2).
    fn roots_on_unit_circle(&self) -> bool {
        let two = rat_int(2);
        let four = rat_int(4);
        let c = &self.b - &two;
        let disc = &self.a * &self.a - &four * &c;
        let f = |z: &BigRational| z * z - &self.a * z + &c;
        self.a.abs() <= four
            && self.b.abs() <= rat_int(6)
            && !disc.is_negative()
            && !f(&two).is_negative()
            && !f(&-two.clone()).is_negative()
    }
}

impl fmt::Display for LPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_qpoly())
    }
}

/// The two shapes an L-polynomial can take depending on p mod 4.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    /// p ≡ 1 (mod 4): `P = (1 + bT + T²)²`.
    SquareForm { b: BigRational },
    /// p ≡ 3 (mod 4): `P = 1 + (b² - 2)T² + T⁴` with b ≥ 0.
    BiquadraticForm { b: BigRational },
}

impl Shape {
    pub fn b(&self) -> &BigRational {
        match self {
            Shape::SquareForm { b } | Shape::BiquadraticForm { b } => b,
        }
    }

    /// The square of the PSL₂ trace, `b²`.
    pub fn u(&self) -> BigRational {
        self.b() * self.b()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Shape::SquareForm { .. } => "square",
            Shape::BiquadraticForm { .. } => "biquadratic",
        }
    }
}

/// Per-field precomputation for the character-sum loop.
///
/// With g a generator and Zech logs Z, for x = g^L:
/// `χ(x(x+1)(x+s)) = (-1)^L · w[L] · w[L - log s]` where
/// `w[n] = (-1)^{Z(n)}` (0 when 1 + g^n = 0), using that log s is even.
struct FiberCounter<'a> {
    ctx: &'a FieldCtx,
    /// `(-1)^L · w[L]`
    signed: Vec<i8>,
    w: Vec<i8>,
}

impl<'a> FiberCounter<'a> {
    fn new(ctx: &'a FieldCtx) -> Self {
        let (signed, w) = match ctx.tables() {
            Some(t) => {
                let n = (ctx.q() - 1) as u32;
                let w: Vec<i8> = (0..n)
                    .map(|i| match t.zech(i) {
                        None => 0,
                        Some(z) if z % 2 == 0 => 1,
                        Some(_) => -1,
                    })
                    .collect();
                let signed = w
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| if i % 2 == 0 { v } else { -v })
                    .collect();
                (signed, w)
            }
            None => (Vec::new(), Vec::new()),
        };
        Self { ctx, signed, w }
    }

    fn check_good(&self, t0: FqElem) -> Result<(), LFuncError> {
        let ctx = self.ctx;
        if t0.is_zero() || t0 == ctx.one() || t0 == ctx.neg(ctx.one()) {
            return Err(LFuncError::BadFiber(format!("{:?}", &t0.coeffs()[..ctx.k() as usize])));
        }
        Ok(())
    }

    fn trace(&self, t0: FqElem) -> Result<i64, LFuncError> {
        self.check_good(t0)?;
        let ctx = self.ctx;
        let s = ctx.square(t0);
        let c = ctx.sub(ctx.mul(s, t0), t0);
        let sum = match ctx.tables() {
            Some(t) => {
                let ls = t.log(ctx.index(s) as u32).expect("s is nonzero") as usize;
                let n = self.w.len();
                let head: i64 = dot(&self.signed[ls..], &self.w[..n - ls]);
                let tail: i64 = dot(&self.signed[..ls], &self.w[n - ls..]);
                head + tail
            }
            None => character_sum_direct(ctx, s),
        };
        Ok(-(ffield::quad_char(ctx, c) as i64) * sum)
    }
}

fn dot(a: &[i8], b: &[i8]) -> i64 {
    // chunked so the i32 partials cannot overflow
    a.chunks(1 << 16)
        .zip(b.chunks(1 << 16))
        .map(|(x, y)| {
            x.iter()
                .zip(y)
                .map(|(&u, &v)| (u as i32) * (v as i32))
                .sum::<i32>() as i64
        })
        .sum()
}

/// `Σ_x χ(x(x+1)(x+s))` by direct evaluation and Euler's criterion.
fn character_sum_direct(ctx: &FieldCtx, s: FqElem) -> i64 {
    let one = ctx.one();
    ctx.elements()
        .map(|x| {
            let f = ctx.mul(ctx.mul(x, ctx.add(x, one)), ctx.add(x, s));
            ffield::quad_char_euler(ctx, f) as i64
        })
        .sum()
}

/// Frobenius trace `a = q + 1 - #E_{t0}(F_q)` of the fiber
/// `c·y² = x(x+1)(x+t0²)`, `c = t0³ - t0`, one point at infinity.
pub fn fiber_trace(ctx: &FieldCtx, t0: FqElem) -> Result<i64, LFuncError> {
    FiberCounter::new(ctx).trace(t0)
}

/// Same as [`fiber_trace`] but never uses the lookup tables.
pub fn fiber_trace_direct(ctx: &FieldCtx, t0: FqElem) -> Result<i64, LFuncError> {
    let counter = FiberCounter {
        ctx,
        signed: Vec::new(),
        w: Vec::new(),
    };
    counter.check_good(t0)?;
    let s = ctx.square(t0);
    let c = ctx.sub(ctx.mul(s, t0), t0);
    Ok(-(ffield::quad_char_euler(ctx, c) as i64) * character_sum_direct(ctx, s))
}

/// `A_k = Σ_{t ∈ F_{p^k} \ {0, ±1}} a_t`.
pub fn trace_sum(p: u64, k: u32) -> Result<i64, LFuncError> {
    let ctx = fq_ctx(p, k)?;
    Ok(trace_sum_in(&ctx))
}

fn trace_sum_in(ctx: &FieldCtx) -> i64 {
    let counter = FiberCounter::new(ctx);
    let minus_one = ctx.index(ctx.neg(ctx.one()));
    (2..ctx.q())
        .into_par_iter()
        .filter(|&i| i != minus_one)
        .map(|i| {
            counter
                .trace(ctx.elem_from_index(i))
                .expect("bad fibers are filtered out")
        })
        .sum()
}

/// Coefficients `c₀..c_D` of `exp(Σ_{k≤D} A_k T^k / k)`.
pub fn exp_of_traces(traces: &[i64]) -> Vec<BigRational> {
    let mut c = vec![BigRational::one()];
    for n in 1..=traces.len() {
        let mut acc = BigRational::zero();
        for k in 1..=n {
            acc += rat_int(traces[k - 1]) * &c[n - k];
        }
        c.push(acc / rat_int(n as i64));
    }
    c
}

/// Inverse of [`exp_of_traces`]: recovers A₁..A_D from a series with
/// constant term 1 via `n·c_n = Σ_{k=1}^{n} A_k c_{n-k}`.
pub fn traces_of_series(series: &[BigInt]) -> Vec<BigInt> {
    let mut a: Vec<BigInt> = Vec::new();
    for n in 1..series.len() {
        let mut v = BigInt::from(n) * &series[n];
        for k in 1..n {
            v -= &a[k - 1] * &series[n - k];
        }
        a.push(v);
    }
    a
}

/// The Euler product `Π_x (1 - a_x T^{deg x} + p^{deg x} T^{2 deg x})^{-1}`
/// over closed points of degree ≤ D of the affine line minus {0, 1, -1},
/// expanded through `T^D`.
pub fn euler_product_truncated(p: u64, max_degree: u32) -> Result<Vec<BigInt>, LFuncError> {
    let d_max = max_degree as usize;
    let mut series = vec![BigInt::zero(); d_max + 1];
    series[0] = BigInt::one();
    let excluded = [
        MonicPoly::linear(p, 0),
        MonicPoly::linear(p, 1),
        MonicPoly::linear(p, p - 1),
    ];
    for d in 1..=max_degree {
        let points: Vec<MonicPoly> = enum_irreducibles(p, d)?
            .into_iter()
            .filter(|f| !excluded.contains(f))
            .collect();
        let traces: Vec<i64> = points
            .par_iter()
            .map(|pi| {
                let ctx = FieldCtx::with_modulus(pi.clone())?;
                fiber_trace(&ctx, ctx.t())
            })
            .collect::<Result<_, _>>()?;
        let du = d as usize;
        for a_x in traces {
            // inverse of 1 + f₁T^d + f₂T^{2d}
            let f1 = BigInt::from(-a_x);
            let f2 = BigInt::from(p).pow(d);
            let mut inv = vec![BigInt::zero(); d_max + 1];
            inv[0] = BigInt::one();
            for n in 1..=d_max {
                let mut v = BigInt::zero();
                if n >= du {
                    v -= &f1 * &inv[n - du];
                }
                if n >= 2 * du {
                    v -= &f2 * &inv[n - 2 * du];
                }
                inv[n] = v;
            }
            series = (0..=d_max)
                .map(|n| (0..=n).map(|i| &series[i] * &inv[n - i]).sum())
                .collect();
        }
    }
    Ok(series)
}

/// Exact `P_p(T)` from point counts.
pub fn lpolynomial(p: u64, mode: Mode) -> Result<LPolynomial, LFuncError> {
    if mode == Mode::FullDirect && p > FULL_DIRECT_MAX_P {
        return Err(LFuncError::CostGuard(p));
    }
    let (c1, c2) = (fq_ctx(p, 1)?, fq_ctx(p, 2)?);
    let (a1, a2) = rayon::join(|| trace_sum_in(&c1), || trace_sum_in(&c2));
    let mut traces = vec![a1, a2];
    if mode == Mode::FullDirect {
        traces.push(trace_sum(p, 3)?);
        traces.push(trace_sum(p, 4)?);
    }
    let c = exp_of_traces(&traces);
    let pr = rat_int(p as i64);
    let scaled: Vec<BigRational> = c
        .iter()
        .enumerate()
        .map(|(n, cn)| cn / pr.pow(n as i32))
        .collect();
    let lp = LPolynomial::new(p, scaled[1].clone(), scaled[2].clone())?;
    if mode == Mode::FullDirect {
        let expected = [lp.a.clone(), BigRational::one()];
        for (degree, (found, want)) in [3u32, 4].into_iter().zip(scaled[3..].iter().zip(&expected)) {
            if found != want {
                return Err(LFuncError::FullDirectMismatch {
                    p,
                    degree,
                    expected: want.to_string(),
                    found: found.to_string(),
                });
            }
        }
    }
    Ok(lp)
}

/// Matches `P` against the square / biquadratic shape for its residue class
/// of p mod 4.
pub fn shape_classify(lp: &LPolynomial) -> Result<Shape, LFuncError> {
    let p = lp.p;
    let violation = |reason: &str| LFuncError::ShapeViolation {
        p,
        poly: lp.to_string(),
        reason: reason.to_string(),
    };
    let pr = rat_int(p as i64);
    let shape = if p % 4 == 1 {
        let b = &lp.a / rat_int(2);
        if lp.b != &b * &b + rat_int(2) {
            return Err(violation("T² coefficient is not b² + 2 for b = a/2"));
        }
        Shape::SquareForm { b }
    } else {
        if !lp.a.is_zero() {
            return Err(violation("odd coefficients do not vanish"));
        }
        let r = &lp.b + rat_int(2);
        if r.is_negative() {
            return Err(violation("b + 2 is negative"));
        }
        let (n, d) = (r.numer().sqrt(), r.denom().sqrt());
        if &(&n * &n) != r.numer() || &(&d * &d) != r.denom() {
            return Err(violation("b + 2 is not the square of a rational"));
        }
        Shape::BiquadraticForm {
            b: BigRational::new(n, d),
        }
    };
    if !(shape.b() * &pr).is_integer() {
        return Err(violation("b·p is not an integer"));
    }
    Ok(shape)
}
