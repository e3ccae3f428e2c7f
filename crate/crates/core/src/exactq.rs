//! Exact rational arithmetic: dense polynomials over Q, Newton power sums,
//! the n-th power polynomial P^(n), and reduction of rationals modulo a prime.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
pub use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::modp;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("expected a quartic with constant term 1, got degree {0:?}")]
    NotNormalizedQuartic(Option<usize>),
    #[error("denominator of {value} is divisible by {ell}")]
    DenominatorDivisible { value: String, ell: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error("division by the zero polynomial")]
    DivisionByZero,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Canonical `"num/den"` form used in every serialized artifact.
pub fn ratio_string(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Inverse of [`ratio_string`]; a bare integer is accepted too.
pub fn parse_ratio(s: &str) -> Result<BigRational, ExactError> {
    let err = || ExactError::Parse(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(n, d))
}

/// Dense polynomial over Q, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPolynomial {
    coeffs: Vec<BigRational>,
}

impl QPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// The variable itself.
    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    /// `x - a`.
    pub fn linear_root(a: BigRational) -> Self {
        Self::new(vec![-a, BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of x^i (zero past the degree).
    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.leading().recip())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat_int(i as i64))
                .collect(),
        )
    }

    /// Euclidean division: `self = q·d + r` with deg r < deg d.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self), ExactError> {
        let dd = d.degree().ok_or(ExactError::DivisionByZero)?;
        let lead_inv = d.leading().recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = &rem[top] * &lead_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    let idx = top - dd + j;
                    rem[idx] = &rem[idx] - &c * dc;
                }
                quot[top - dd] = c;
            }
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Exact quotient; errors if the division leaves a remainder.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d).ok()?;
        r.is_zero().then_some(q)
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).expect("b is nonzero").1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `f(x + a)`.
    pub fn shift(&self, a: &BigRational) -> Self {
        let step = Self::new(vec![a.clone(), BigRational::one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| &(&acc * &step) + &Self::constant(c.clone()))
    }

    /// `x^n · f(1/x)`; requires n ≥ deg f.
    pub fn reversed(&self, n: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(n + 1, BigRational::zero());
        c.reverse();
        Self::new(c)
    }

    /// Multiplicity of `x - a` as a factor.
    pub fn root_multiplicity(&self, a: &BigRational) -> u32 {
        if self.is_zero() {
            return u32::MAX;
        }
        let lin = Self::linear_root(a.clone());
        let mut f = self.clone();
        let mut m = 0;
        while let Some(q) = f.div_exact(&lin) {
            f = q;
            m += 1;
        }
        m
    }

    /// Discriminant via the Sylvester resultant of f and f'.
    pub fn discriminant(&self) -> BigRational {
        let n = match self.degree() {
            None | Some(0) => return BigRational::zero(),
            Some(n) => n,
        };
        let res = resultant(self, &self.derivative());
        let sign = if (n * (n - 1) / 2) % 2 == 0 {
            BigRational::one()
        } else {
            -BigRational::one()
        };
        sign * res / self.leading()
    }

    /// Yun's square-free decomposition: pairs (gᵢ, i) of monic, square-free,
    /// pairwise coprime factors with `self = lc · Π gᵢ^i`. Trivial factors
    /// are omitted.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_exact(&a0).expect("gcd divides");
        let mut c = df.div_exact(&a0).expect("gcd divides");
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            b = b.div_exact(&a).expect("gcd divides");
            c = d.div_exact(&a).expect("gcd divides");
            d = &c - &b.derivative();
            if a.degree().unwrap_or(0) > 0 {
                out.push((a, i));
            }
            i += 1;
        }
        out
    }

    /// Human-readable form in the named variable, ascending or descending.
    pub fn display_with(&self, var: &str, descending: bool) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms: Vec<(usize, &BigRational)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        if descending {
            terms.reverse();
        }
        let mut s = String::new();
        for (n, (i, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if n == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                i => format!("{var}^{i}"),
            };
            if i == 0 {
                s.push_str(&mag.to_string());
            } else if mag.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{mag} {mono}"));
            }
        }
        s
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("T", false))
    }
}

impl Add for &QPolynomial {
    type Output = QPolynomial;
    fn add(self, rhs: &QPolynomial) -> QPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        QPolynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &QPolynomial {
    type Output = QPolynomial;
    fn sub(self, rhs: &QPolynomial) -> QPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        QPolynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &QPolynomial {
    type Output = QPolynomial;
    fn neg(self) -> QPolynomial {
        QPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &QPolynomial {
    type Output = QPolynomial;
    fn mul(self, rhs: &QPolynomial) -> QPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return QPolynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPolynomial::new(out)
    }
}

fn resultant(f: &QPolynomial, g: &QPolynomial) -> BigRational {
    let (m, n) = match (f.degree(), g.degree()) {
        (Some(m), Some(n)) => (m, n),
        _ => return BigRational::zero(),
    };
    let size = m + n;
    if size == 0 {
        return BigRational::one();
    }
    let mut rows = vec![vec![BigRational::zero(); size]; size];
    // rows hold coefficients highest degree first
    for r in 0..n {
        for (j, c) in f.coeffs.iter().rev().enumerate() {
            rows[r][r + j] = c.clone();
        }
    }
    for r in 0..m {
        for (j, c) in g.coeffs.iter().rev().enumerate() {
            rows[n + r][r + j] = c.clone();
        }
    }
    determinant(rows)
}

/// Determinant by fraction-exact Gaussian elimination.
pub fn determinant(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let pv = a[col][col].clone();
        det *= &pv;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pv;
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    det
}

fn check_normalized_quartic(p: &QPolynomial) -> Result<(), ExactError> {
    if p.degree() != Some(4) || !p.coeff(0).is_one() {
        return Err(ExactError::NotNormalizedQuartic(p.degree()));
    }
    Ok(())
}

/// Power sums s₁..s_N of the inverse roots αᵢ of `P = Π(1 - αᵢT)`.
pub fn power_sums(p: &QPolynomial, count: usize) -> Result<Vec<BigRational>, ExactError> {
    check_normalized_quartic(p)?;
    // P(T) = Σ (-1)^k e_k T^k
    let e: Vec<BigRational> = (0..=4)
        .map(|k| if k % 2 == 0 { p.coeff(k) } else { -p.coeff(k) })
        .collect();
    let mut s: Vec<BigRational> = Vec::with_capacity(count);
    for m in 1..=count {
        // Newton: s_m = Σ_{i=1}^{m-1} (-1)^{i-1} e_i s_{m-i} + (-1)^{m-1} m e_m
        let mut acc = BigRational::zero();
        for i in 1..m.min(5) {
            let term = &e[i] * &s[m - i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        if m <= 4 {
            let term = &e[m] * rat_int(m as i64);
            if m % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        s.push(acc);
    }
    Ok(s)
}

/// `P^(n)(T) = Π(1 - αᵢⁿ T)`, rebuilt from power sums with Newton's
/// identities.
pub fn nth_power_poly(p: &QPolynomial, n: usize) -> Result<QPolynomial, ExactError> {
    assert!(n >= 1, "n must be positive");
    let s = power_sums(p, 4 * n)?;
    let sums: Vec<&BigRational> = (1..=4).map(|m| &s[m * n - 1]).collect();
    // k e_k = Σ_{i=1}^k (-1)^{i-1} e_{k-i} s_i
    let mut e = vec![BigRational::one()];
    for k in 1..=4 {
        let mut acc = BigRational::zero();
        for i in 1..=k {
            let term = &e[k - i] * sums[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e.push(acc / rat_int(k as i64));
    }
    Ok(QPolynomial::new(
        e.into_iter()
            .enumerate()
            .map(|(k, ek)| if k % 2 == 0 { ek } else { -ek })
            .collect(),
    ))
}

/// Horner evaluation.
pub fn eval_exact(p: &QPolynomial, x: &BigRational) -> BigRational {
    p.eval(x)
}

/// Image of `x` in F_ℓ.
pub fn reduce_mod(x: &BigRational, ell: u64) -> Result<u64, ExactError> {
    if !modp::is_prime(ell) {
        return Err(ExactError::NotPrime(ell));
    }
    let m = BigInt::from(ell);
    let num = x.numer().mod_floor(&m).to_u64().expect("reduced below ell");
    let den = x.denom().mod_floor(&m).to_u64().expect("reduced below ell");
    let inv = modp::inv_mod(den, ell).ok_or_else(|| ExactError::DenominatorDivisible {
        value: ratio_string(x),
        ell,
    })?;
    Ok(((num as u128 * inv as u128) % ell as u128) as u64)
}

/// Coefficient-wise reduction of a polynomial.
pub fn reduce_poly_mod(p: &QPolynomial, ell: u64) -> Result<Vec<u64>, ExactError> {
    p.coeffs().iter().map(|c| reduce_mod(c, ell)).collect()
}
