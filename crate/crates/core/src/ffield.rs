//! Arithmetic in F_{p^k} for odd p and k ≤ 4, quadratic characters, and
//! enumeration of monic irreducible polynomials over F_p (the closed points
//! of the affine line).
//!
//! Elements are stored as coefficient vectors modulo a fixed monic
//! irreducible of degree k. Every element also has a dense integer index
//! `Σ cᵢ pⁱ`, which is what the lookup tables are keyed by.

use std::fmt;

use thiserror::Error;

use crate::modp;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 4;

/// Field sizes up to this bound get exp/log/Zech/character tables.
pub const TABLE_LIMIT: u64 = 1 << 20;

const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("extension degree {0} is outside 1..=4")]
    DegreeOutOfRange(u32),
    #[error("p = {0} is too large for word-sized field arithmetic")]
    TooLarge(u64),
    #[error("modulus {0} is not a monic irreducible polynomial of the right degree")]
    BadModulus(MonicPoly),
}

/// A monic polynomial over F_p, coefficients lowest degree first (the last
/// entry is the leading 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonicPoly {
    p: u64,
    coeffs: Vec<u32>,
}

impl MonicPoly {
    pub fn new(p: u64, coeffs: Vec<u32>) -> Option<Self> {
        (coeffs.last() == Some(&1) && coeffs.iter().all(|&c| (c as u64) < p))
            .then_some(Self { p, coeffs })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    /// Coefficients lowest degree first, leading 1 included.
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// Monic linear polynomial `t - c`.
    pub fn linear(p: u64, c: u64) -> Self {
        let c = c % p;
        Self {
            p,
            coeffs: vec![((p - c) % p) as u32, 1],
        }
    }

    /// The monic polynomial of degree `d` whose lower coefficients are the
    /// base-p digits of `n` (constant term least significant). Iterating
    /// `n` upward walks the coefficient tuples in lexicographic order.
    fn from_ordinal(p: u64, d: u32, mut n: u64) -> Self {
        let mut coeffs = Vec::with_capacity(d as usize + 1);
        for _ in 0..d {
            coeffs.push((n % p) as u32);
            n /= p;
        }
        coeffs.push(1);
        Self { p, coeffs }
    }

    fn eval(&self, x: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| (acc * x + c as u64) % self.p)
    }

    fn has_root(&self) -> bool {
        (0..self.p).any(|x| self.eval(x) == 0)
    }

    /// Whether `divisor` (monic) divides `self`.
    fn divisible_by(&self, divisor: &MonicPoly) -> bool {
        let p = self.p;
        let mut rem: Vec<u64> = self.coeffs.iter().map(|&c| c as u64).collect();
        let dd = divisor.coeffs.len() - 1;
        for top in (dd..rem.len()).rev() {
            let lead = rem[top];
            if lead == 0 {
                continue;
            }
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                let idx = top - dd + j;
                rem[idx] = (rem[idx] + p * p - lead * dc as u64 % p) % p;
            }
        }
        rem[..dd].iter().all(|&c| c == 0)
    }

    /// Trial division by every monic polynomial of degree ≤ deg/2, after a
    /// quick root scan.
    pub fn is_irreducible(&self) -> bool {
        let deg = self.degree();
        if deg == 0 {
            return false;
        }
        if deg == 1 {
            return true;
        }
        if self.has_root() {
            return false;
        }
        for d in 2..=deg / 2 {
            for n in 0..self.p.pow(d) {
                if self.divisible_by(&MonicPoly::from_ordinal(self.p, d, n)) {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, c) => write!(f, "{c}t")?,
                (i, 1) => write!(f, "t^{i}")?,
                (i, c) => write!(f, "{c}t^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Monic irreducibles of degree `d` over F_p in lexicographic order of the
/// coefficient tuple (leading coefficient dropped, constant term last).
pub fn enum_irreducibles(p: u64, d: u32) -> Result<Vec<MonicPoly>, FieldError> {
    check_characteristic(p)?;
    if d == 0 || d > MAX_DEGREE {
        return Err(FieldError::DegreeOutOfRange(d));
    }
    if d == 1 {
        return Ok((0..p).map(|n| MonicPoly::from_ordinal(p, 1, n)).collect());
    }
    let quadratics: Vec<MonicPoly> = if d == 4 {
        (0..p * p)
            .map(|n| MonicPoly::from_ordinal(p, 2, n))
            .filter(|g| !g.has_root())
            .collect()
    } else {
        Vec::new()
    };
    Ok((0..p.pow(d))
        .map(|n| MonicPoly::from_ordinal(p, d, n))
        .filter(|f| !f.has_root() && quadratics.iter().all(|g| !f.divisible_by(g)))
        .collect())
}

fn check_characteristic(p: u64) -> Result<(), FieldError> {
    if p == 2 {
        return Err(FieldError::EvenCharacteristic);
    }
    if !modp::is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if p >= 1 << 31 {
        return Err(FieldError::TooLarge(p));
    }
    Ok(())
}

/// An element of F_{p^k}: k coefficients in `[0, p)` of a residue modulo the
/// context modulus. Unused high slots are zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FqElem {
    coeffs: [u32; MAX_DEGREE as usize],
}

impl FqElem {
    pub fn coeffs(&self) -> &[u32; MAX_DEGREE as usize] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// Discrete-log machinery for a field small enough to tabulate.
#[derive(Clone, Debug)]
pub struct FieldTables {
    /// `exp[n]` is the index of g^n, for n in [0, q-1).
    exp: Vec<u32>,
    /// `log[i]` is the discrete log of the element with index i (unused at 0).
    log: Vec<u32>,
    /// `zech[n] = log(1 + g^n)`, or `NO_LOG` when 1 + g^n = 0.
    zech: Vec<u32>,
    chi: Vec<i8>,
}

impl FieldTables {
    pub fn exp(&self, n: u32) -> u32 {
        self.exp[n as usize]
    }

    pub fn log(&self, index: u32) -> Option<u32> {
        match self.log[index as usize] {
            NO_LOG => None,
            l => Some(l),
        }
    }

    /// Zech logarithm `log(1 + g^n)`; `None` exactly when g^n = -1.
    pub fn zech(&self, n: u32) -> Option<u32> {
        match self.zech[n as usize] {
            NO_LOG => None,
            z => Some(z),
        }
    }

    pub fn chi(&self, index: u32) -> i8 {
        self.chi[index as usize]
    }
}

/// Arithmetic context for F_{p^k}. Immutable once built.
#[derive(Clone, Debug)]
pub struct FieldCtx {
    p: u64,
    k: u32,
    q: u64,
    modulus: MonicPoly,
    tables: Option<FieldTables>,
}

/// Context for F_{p^k} with the lexicographically smallest monic irreducible
/// of degree k as modulus.
pub fn fq_ctx(p: u64, k: u32) -> Result<FieldCtx, FieldError> {
    check_characteristic(p)?;
    if k == 0 || k > MAX_DEGREE {
        return Err(FieldError::DegreeOutOfRange(k));
    }
    let modulus = (0..p.pow(k))
        .map(|n| MonicPoly::from_ordinal(p, k, n))
        .find(MonicPoly::is_irreducible)
        .expect("irreducibles exist in every degree");
    FieldCtx::build(p, modulus)
}

impl FieldCtx {
    /// Context with an explicit modulus; used to model the residue field of
    /// a closed point.
    pub fn with_modulus(modulus: MonicPoly) -> Result<Self, FieldError> {
        check_characteristic(modulus.p)?;
        let k = modulus.degree();
        if k == 0 || k > MAX_DEGREE {
            return Err(FieldError::DegreeOutOfRange(k));
        }
        if !modulus.is_irreducible() {
            return Err(FieldError::BadModulus(modulus));
        }
        Self::build(modulus.p, modulus)
    }

    fn build(p: u64, modulus: MonicPoly) -> Result<Self, FieldError> {
        let k = modulus.degree();
        let q = p.pow(k);
        if q >= 1 << 62 {
            return Err(FieldError::TooLarge(p));
        }
        let mut ctx = Self {
            p,
            k,
            q,
            modulus,
            tables: None,
        };
        if q <= TABLE_LIMIT {
            ctx.tables = Some(ctx.build_tables());
        }
        Ok(ctx)
    }

    fn build_tables(&self) -> FieldTables {
        let order = self.q - 1;
        let prime_factors = distinct_prime_factors(order);
        let g = (1..self.q)
            .map(|i| self.elem_from_index(i))
            .find(|&g| {
                prime_factors
                    .iter()
                    .all(|&r| self.pow(g, order / r) != self.one())
            })
            .expect("multiplicative group is cyclic");
        let n = order as usize;
        let mut exp = Vec::with_capacity(n);
        let mut log = vec![NO_LOG; self.q as usize];
        let mut acc = self.one();
        for i in 0..n {
            let idx = self.index(acc) as u32;
            exp.push(idx);
            log[idx as usize] = i as u32;
            acc = self.mul(acc, g);
        }
        let one = self.one();
        let zech = exp
            .iter()
            .map(|&idx| {
                let s = self.add(self.elem_from_index(idx as u64), one);
                log[self.index(s) as usize]
            })
            .collect();
        // g generates, so it is a non-square and χ(g^n) = (-1)^n
        let chi = log
            .iter()
            .map(|&l| match l {
                NO_LOG => 0,
                l if l % 2 == 0 => 1,
                _ => -1,
            })
            .collect();
        FieldTables {
            exp,
            log,
            zech,
            chi,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Field size p^k.
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &MonicPoly {
        &self.modulus
    }

    pub fn tables(&self) -> Option<&FieldTables> {
        self.tables.as_ref()
    }

    pub fn zero(&self) -> FqElem {
        FqElem::default()
    }

    pub fn one(&self) -> FqElem {
        self.from_int(1)
    }

    pub fn from_int(&self, v: i64) -> FqElem {
        let mut e = FqElem::default();
        e.coeffs[0] = v.rem_euclid(self.p as i64) as u32;
        e
    }

    /// The class of the polynomial variable `t` modulo the context modulus.
    pub fn t(&self) -> FqElem {
        if self.k == 1 {
            // t ≡ -m₀ modulo t + m₀
            self.from_int(-(self.modulus.coeffs[0] as i64))
        } else {
            let mut e = FqElem::default();
            e.coeffs[1] = 1;
            e
        }
    }

    /// Element from low-first coefficients; entries beyond k must be zero.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Option<FqElem> {
        if coeffs.len() > MAX_DEGREE as usize
            || coeffs.iter().skip(self.k as usize).any(|&c| c % self.p != 0)
        {
            return None;
        }
        let mut e = FqElem::default();
        for (slot, &c) in e.coeffs.iter_mut().zip(coeffs) {
            *slot = (c % self.p) as u32;
        }
        Some(e)
    }

    pub fn elem_from_index(&self, mut index: u64) -> FqElem {
        debug_assert!(index < self.q);
        let mut e = FqElem::default();
        for i in 0..self.k as usize {
            e.coeffs[i] = (index % self.p) as u32;
            index /= self.p;
        }
        e
    }

    pub fn index(&self, e: FqElem) -> u64 {
        e.coeffs[..self.k as usize]
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * self.p + c as u64)
    }

    /// All q elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        (0..self.q).map(move |i| self.elem_from_index(i))
    }

    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        let mut r = FqElem::default();
        for i in 0..self.k as usize {
            r.coeffs[i] = ((a.coeffs[i] as u64 + b.coeffs[i] as u64) % self.p) as u32;
        }
        r
    }

    pub fn neg(&self, a: FqElem) -> FqElem {
        let mut r = FqElem::default();
        for i in 0..self.k as usize {
            r.coeffs[i] = ((self.p - a.coeffs[i] as u64) % self.p) as u32;
        }
        r
    }

    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        let k = self.k as usize;
        let p = self.p;
        let mut prod = [0u64; 2 * MAX_DEGREE as usize - 1];
        for i in 0..k {
            if a.coeffs[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] = (prod[i + j] + a.coeffs[i] as u64 * b.coeffs[j] as u64) % p;
            }
        }
        let m = &self.modulus.coeffs;
        for top in (k..2 * k - 1).rev() {
            let lead = prod[top];
            if lead == 0 {
                continue;
            }
            prod[top] = 0;
            for j in 0..k {
                let idx = top - k + j;
                prod[idx] = (prod[idx] + p * p - lead * m[j] as u64 % p) % p;
            }
        }
        let mut r = FqElem::default();
        for i in 0..k {
            r.coeffs[i] = prod[i] as u32;
        }
        r
    }

    pub fn square(&self, a: FqElem) -> FqElem {
        self.mul(a, a)
    }

    pub fn pow(&self, a: FqElem, mut e: u64) -> FqElem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FqElem) -> Option<FqElem> {
        (!a.is_zero()).then(|| self.pow(a, self.q - 2))
    }

    /// The Frobenius automorphism a ↦ a^p.
    pub fn frobenius(&self, a: FqElem) -> FqElem {
        self.pow(a, self.p)
    }

    pub fn is_in_prime_field(&self, a: FqElem) -> bool {
        a.coeffs[1..].iter().all(|&c| c == 0)
    }
}

/// Quadratic character of F_q extended by χ(0) = 0.
pub fn quad_char(ctx: &FieldCtx, v: FqElem) -> i8 {
    if let Some(t) = ctx.tables() {
        return t.chi(ctx.index(v) as u32);
    }
    quad_char_euler(ctx, v)
}

/// Euler's criterion v^((q-1)/2), without tables.
pub fn quad_char_euler(ctx: &FieldCtx, v: FqElem) -> i8 {
    if v.is_zero() {
        return 0;
    }
    if ctx.pow(v, (ctx.q - 1) / 2) == ctx.one() {
        1
    } else {
        -1
    }
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
