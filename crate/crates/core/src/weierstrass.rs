//! Rational functions in t, Weierstrass invariants of the generic fiber and
//! Kodaira types at places of the t-line.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::exactq::{rat_int, QPolynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeierstrassError {
    #[error("division by the zero function")]
    DivisionByZero,
    #[error("discriminant vanishes identically")]
    Singular,
    #[error("denominator factor {0} is not supported (only t, t - 1, t + 1)")]
    UnsupportedPlace(String),
    #[error("valuations v(c4) = {v_c4}, v(Δ) = {v_delta} come from a non-minimal model")]
    NonMinimal { v_delta: u32, v_c4: u32 },
    #[error("no Kodaira type has v(c4) = {v_c4}, v(Δ) = {v_delta}")]
    Inconsistent { v_delta: u32, v_c4: u32 },
}

/// A point of P¹ over Q. Finite places are restricted to integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Finite(i64),
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(a) => write!(f, "{a}"),
            Place::Infinity => f.write_str("∞"),
        }
    }
}

/// `num / den` in lowest terms with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: QPolynomial,
    den: QPolynomial,
}

impl RationalFunction {
    pub fn new(num: QPolynomial, den: QPolynomial) -> Result<Self, WeierstrassError> {
        if den.is_zero() {
            return Err(WeierstrassError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den);
        let num = num.div_exact(&g).expect("gcd divides");
        let den = den.div_exact(&g).expect("gcd divides");
        let lc = den.leading();
        let inv = lc.recip();
        Ok(Self {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn from_poly(p: QPolynomial) -> Self {
        Self {
            num: p,
            den: QPolynomial::one(),
        }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_poly(QPolynomial::from_ints(coeffs))
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(QPolynomial::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(QPolynomial::zero())
    }

    pub fn t() -> Self {
        Self::from_poly(QPolynomial::x())
    }

    pub fn num(&self) -> &QPolynomial {
        &self.num
    }

    pub fn den(&self) -> &QPolynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn recip(&self) -> Result<Self, WeierstrassError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, WeierstrassError> {
        Ok(self * &rhs.recip()?)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i32) -> Result<Self, WeierstrassError> {
        let pos = Self {
            num: self.num.pow(e.unsigned_abs()),
            den: self.den.pow(e.unsigned_abs()),
        };
        if e < 0 {
            pos.recip()
        } else {
            Ok(pos)
        }
    }

    /// Order of vanishing at a place; `None` for the zero function.
    pub fn valuation(&self, place: Place) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(match place {
            Place::Finite(a) => {
                let a = rat_int(a);
                self.num.root_multiplicity(&a) as i64 - self.den.root_multiplicity(&a) as i64
            }
            Place::Infinity => deg(&self.den) - deg(&self.num),
        })
    }

    /// `f(1/s)`.
    pub fn invert_variable(&self) -> Self {
        let (dn, dd) = (deg(&self.num), deg(&self.den));
        let n = dn.max(dd) as usize;
        // numerator and denominator both multiplied by s^n
        Self::new(self.num.reversed(n), self.den.reversed(n))
            .expect("reversal of a nonzero polynomial is nonzero")
    }
}

fn deg(p: &QPolynomial) -> i64 {
    p.degree().map_or(0, |d| d as i64)
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalFunction::new(num, &self.den * &rhs.den).expect("denominators are nonzero")
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("denominators are nonzero")
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num.display_with("t", true))
        } else {
            write!(
                f,
                "({}) / ({})",
                self.num.display_with("t", true),
                self.den.display_with("t", true)
            )
        }
    }
}

/// Splits off powers of t - a for a ∈ {0, 1, -1}; returns the exponents and
/// the cofactor.
fn split_known_places(p: &QPolynomial) -> (Vec<(i64, u32)>, QPolynomial) {
    let mut rest = p.clone();
    let mut out = Vec::new();
    for a in [0i64, 1, -1] {
        let lin = QPolynomial::linear_root(rat_int(a));
        let mut m = 0;
        while let Some(q) = rest.div_exact(&lin) {
            rest = q;
            m += 1;
        }
        if m > 0 {
            out.push((a, m));
        }
    }
    (out, rest)
}

/// Pole orders of f at t ∈ {0, 1, -1} and ∞.
pub fn pole_orders(f: &RationalFunction) -> Result<BTreeMap<Place, u32>, WeierstrassError> {
    let (known, rest) = split_known_places(&f.den);
    if rest.degree().unwrap_or(0) > 0 {
        return Err(WeierstrassError::UnsupportedPlace(
            rest.display_with("t", true),
        ));
    }
    let mut out: BTreeMap<Place, u32> = known
        .into_iter()
        .map(|(a, m)| (Place::Finite(a), m))
        .collect();
    let at_inf = deg(&f.num) - deg(&f.den);
    if !f.is_zero() && at_inf > 0 {
        out.insert(Place::Infinity, at_inf as u32);
    }
    Ok(out)
}

/// Least common multiple of the pole orders (1 for a polynomial constant).
pub fn pole_order_lcm(orders: &BTreeMap<Place, u32>) -> u32 {
    orders.values().fold(1, |acc, &m| acc.lcm(&m))
}

/// Factored display using the places {0, 1, -1}: constant, then the
/// remaining square-free factors, then the linear factors, with negative
/// exponents for the denominator.
pub fn factored_string(f: &RationalFunction) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let mut parts: Vec<String> = Vec::new();
    let content = f.num.leading() / f.den.leading();
    let mut linear: Vec<(i64, i64)> = Vec::new();
    let mut other: Vec<(QPolynomial, i64)> = Vec::new();
    for (poly, sign) in [(&f.num, 1i64), (&f.den, -1)] {
        let (known, rest) = split_known_places(poly);
        linear.extend(known.into_iter().map(|(a, m)| (a, sign * m as i64)));
        other.extend(
            rest.squarefree_decomposition()
                .into_iter()
                .map(|(g, m)| (g, sign * m as i64)),
        );
    }
    if !content.is_one() || (linear.is_empty() && other.is_empty()) {
        parts.push(content.to_string());
    }
    let power = |base: String, m: i64| {
        if m == 1 {
            base
        } else {
            format!("{base}^{m}")
        }
    };
    for (g, m) in other {
        parts.push(power(format!("({})", g.display_with("t", true)), m));
    }
    for (a, m) in linear {
        let base = match a {
            0 => "t".to_string(),
            a if a > 0 => format!("(t - {a})"),
            a => format!("(t + {})", -a),
        };
        parts.push(power(base, m));
    }
    parts.join(" ")
}

/// Long Weierstrass model `y² + a1 xy + a3 y = x³ + a2 x² + a4 x + a6` over Q(t).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassModel {
    pub a1: RationalFunction,
    pub a2: RationalFunction,
    pub a3: RationalFunction,
    pub a4: RationalFunction,
    pub a6: RationalFunction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub c4: RationalFunction,
    pub c6: RationalFunction,
    pub delta: RationalFunction,
    pub j: RationalFunction,
}

impl WeierstrassModel {
    /// `y² = x³ + a2 x² + a4 x`.
    pub fn two_torsion(a2: RationalFunction, a4: RationalFunction) -> Self {
        Self {
            a1: RationalFunction::zero(),
            a2,
            a3: RationalFunction::zero(),
            a4,
            a6: RationalFunction::zero(),
        }
    }

    /// `c·y² = x³ + a2 x² + a4 x` rewritten as `Y² = X³ + c a2 X² + c² a4 X`
    /// via X = cx, Y = c²y.
    pub fn cleared_twist(c: &RationalFunction, a2: &RationalFunction, a4: &RationalFunction) -> Self {
        Self::two_torsion(c * a2, &(c * c) * a4)
    }

    /// `y² = x(x+1)(x+t²)`.
    pub fn legendre_fiber() -> Self {
        Self::two_torsion(
            RationalFunction::from_ints(&[1, 0, 1]),
            RationalFunction::from_ints(&[0, 0, 1]),
        )
    }

    /// `t(t-1)(t+1)·y² = x(x+1)(x+t²)` with the twist cleared.
    pub fn surface() -> Self {
        let c = RationalFunction::from_ints(&[0, -1, 0, 1]);
        let base = Self::legendre_fiber();
        Self::cleared_twist(&c, &base.a2, &base.a4)
    }

    /// `y² = x³ + (t⁵ - t)x² + (t⁸ - 2t⁶ + t⁴)x`.
    pub fn polynomial_model() -> Self {
        Self::two_torsion(
            RationalFunction::from_ints(&[0, -1, 0, 0, 0, 1]),
            RationalFunction::from_ints(&[0, 0, 0, 0, 1, 0, -2, 0, 1]),
        )
    }

    /// Standard Tate quantities c4, c6, Δ and j = c4³/Δ.
    pub fn invariants(&self) -> Result<Invariants, WeierstrassError> {
        let k = |n: i64| RationalFunction::constant(rat_int(n));
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let b2 = &(a1 * a1) + &(&k(4) * a2);
        let b4 = &(&k(2) * a4) + &(a1 * a3);
        let b6 = &(a3 * a3) + &(&k(4) * a6);
        let b8 = &(&(&(&(&(a1 * a1) * a6) + &(&(&k(4) * a2) * a6)) - &(&(a1 * a3) * a4))
            + &(&(a3 * a3) * a2))
            - &(a4 * a4);
        let c4 = &(&b2 * &b2) - &(&k(24) * &b4);
        let c6 = &(&(-&(&(&b2 * &b2) * &b2)) + &(&(&k(36) * &b2) * &b4)) - &(&k(216) * &b6);
        let delta = &(&(&(-&(&(&b2 * &b2) * &b8)) - &(&(&k(8) * &b4) * &(&b4 * &b4)))
            - &(&k(27) * &(&b6 * &b6)))
            + &(&(&k(9) * &b2) * &(&b4 * &b6));
        if delta.is_zero() {
            return Err(WeierstrassError::Singular);
        }
        let j = (&(&c4 * &c4) * &c4).div(&delta)?;
        Ok(Invariants { c4, c6, delta, j })
    }

    /// Zeros of Δ at the supported places plus ∞ whenever the model is not
    /// already good there.
    pub fn bad_places(&self) -> Result<Vec<Place>, WeierstrassError> {
        let inv = self.invariants()?;
        let mut places = Vec::new();
        let (known, rest) = split_known_places(inv.delta.num());
        if rest.degree().unwrap_or(0) > 0 {
            return Err(WeierstrassError::UnsupportedPlace(
                rest.display_with("t", true),
            ));
        }
        places.extend(known.into_iter().map(|(a, _)| Place::Finite(a)));
        if local_data(&inv, Place::Infinity)?.kodaira != KodairaType::I(0) {
            places.push(Place::Infinity);
        }
        places.sort();
        Ok(places)
    }
}

/// Local reduction data at one place of a minimal model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalData {
    pub place: Place,
    /// Exponent k of the scaling u = π^k taking the given model to a minimal one.
    pub scaling: i64,
    pub v_c4: Option<u32>,
    pub v_c6: Option<u32>,
    pub v_delta: u32,
    pub kodaira: KodairaType,
}

/// Valuations at `place` after rescaling to a minimal integral model.
/// In residue characteristic 0 integrality of c4 and c6 is enough, so the
/// scaling exponent is `floor(min(v(c4)/4, v(c6)/6, v(Δ)/12))`.
pub fn local_data(inv: &Invariants, place: Place) -> Result<LocalData, WeierstrassError> {
    let v4 = inv.c4.valuation(place);
    let v6 = inv.c6.valuation(place);
    let vd = inv.delta.valuation(place).ok_or(WeierstrassError::Singular)?;
    let mut k = vd.div_euclid(12);
    if let Some(v) = v4 {
        k = k.min(v.div_euclid(4));
    }
    if let Some(v) = v6 {
        k = k.min(v.div_euclid(6));
    }
    let v_c4 = v4.map(|v| (v - 4 * k) as u32);
    let v_c6 = v6.map(|v| (v - 6 * k) as u32);
    let v_delta = (vd - 12 * k) as u32;
    let kodaira = kodaira_type(v_delta, v_c4.unwrap_or(u32::MAX))?;
    Ok(LocalData {
        place,
        scaling: k,
        v_c4,
        v_c6,
        v_delta,
        kodaira,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KodairaType {
    /// I_n; I_0 is good reduction.
    I(u32),
    II,
    III,
    IV,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl fmt::Display for KodairaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KodairaType::I(n) => write!(f, "I{n}"),
            KodairaType::II => f.write_str("II"),
            KodairaType::III => f.write_str("III"),
            KodairaType::IV => f.write_str("IV"),
            KodairaType::IStar(n) => write!(f, "I{n}*"),
            KodairaType::IVStar => f.write_str("IV*"),
            KodairaType::IIIStar => f.write_str("III*"),
            KodairaType::IIStar => f.write_str("II*"),
        }
    }
}

/// Characteristic-0 Kodaira table. Pass `u32::MAX` for v(c4) when c4 = 0.
pub fn kodaira_type(v_delta: u32, v_c4: u32) -> Result<KodairaType, WeierstrassError> {
    use KodairaType::*;
    if v_c4 >= 4 && v_delta >= 12 {
        return Err(WeierstrassError::NonMinimal { v_delta, v_c4 });
    }
    let t = match (v_delta, v_c4) {
        (0, _) => I(0),
        (n, 0) => I(n),
        (2, _) => II,
        (3, 1) => III,
        (4, c) if c >= 2 => IV,
        (6, c) if c >= 2 => IStar(0),
        (n, 2) if n >= 7 => IStar(n - 6),
        (8, c) if c >= 3 => IVStar,
        (9, 3) => IIIStar,
        (10, c) if c >= 4 => IIStar,
        _ => return Err(WeierstrassError::Inconsistent { v_delta, v_c4 }),
    };
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> QPolynomial {
        QPolynomial::from_ints(c)
    }

    fn lin(a: i64) -> QPolynomial {
        QPolynomial::linear_root(rat_int(a))
    }

    #[test]
    fn canonical_form() {
        let f = RationalFunction::new(poly(&[0, 2]), poly(&[0, 0, 4])).unwrap();
        assert_eq!(f.num(), &QPolynomial::constant(BigRational::new(1.into(), 2.into())));
        assert_eq!(f.den(), &poly(&[0, 1]));
        assert_eq!(
            RationalFunction::new(poly(&[1]), QPolynomial::zero()),
            Err(WeierstrassError::DivisionByZero)
        );
    }

    #[test]
    fn discriminant_and_j_of_polynomial_model() {
        let inv = WeierstrassModel::polynomial_model().invariants().unwrap();
        let t = lin(0);
        let expected_delta =
            &(&t.pow(10) * &lin(1).pow(8)) * &lin(-1).pow(8);
        assert_eq!(
            inv.delta,
            RationalFunction::from_poly(expected_delta.scale(&rat_int(16)))
        );
        let q = poly(&[1, 0, -1, 0, 1]).pow(3).scale(&rat_int(256));
        let den = &(&t.pow(4) * &lin(1).pow(2)) * &lin(-1).pow(2);
        assert_eq!(inv.j, RationalFunction::new(q, den).unwrap());
        assert_eq!(
            factored_string(&inv.delta),
            "16 t^10 (t - 1)^8 (t + 1)^8"
        );
        assert_eq!(
            factored_string(&inv.j),
            "256 (t^4 - t^2 + 1)^3 t^-4 (t - 1)^-2 (t + 1)^-2"
        );
    }

    #[test]
    fn tate_identity() {
        for m in [
            WeierstrassModel::polynomial_model(),
            WeierstrassModel::legendre_fiber(),
            WeierstrassModel {
                a1: RationalFunction::from_ints(&[1, 1]),
                a2: RationalFunction::from_ints(&[0, -1]),
                a3: RationalFunction::from_ints(&[2]),
                a4: RationalFunction::from_ints(&[0, 0, 3]),
                a6: RationalFunction::from_ints(&[-5, 1]),
            },
        ] {
            let inv = m.invariants().unwrap();
            let lhs = &(&(&inv.c4 * &inv.c4) * &inv.c4) - &(&inv.c6 * &inv.c6);
            let rhs = &RationalFunction::constant(rat_int(1728)) * &inv.delta;
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn models_share_j() {
        let a = WeierstrassModel::surface();
        assert_eq!(a, WeierstrassModel::polynomial_model());
        let j1 = a.invariants().unwrap().j;
        let j2 = WeierstrassModel::legendre_fiber().invariants().unwrap().j;
        assert_eq!(j1, j2);
    }

    #[test]
    fn pole_orders_of_j() {
        let j = WeierstrassModel::polynomial_model().invariants().unwrap().j;
        let orders = pole_orders(&j).unwrap();
        let expected: BTreeMap<Place, u32> = [
            (Place::Finite(-1), 2),
            (Place::Finite(0), 4),
            (Place::Finite(1), 2),
            (Place::Infinity, 4),
        ]
        .into_iter()
        .collect();
        assert_eq!(orders, expected);
        assert_eq!(pole_order_lcm(&orders), 4);
        assert!(pole_orders(&RationalFunction::from_ints(&[7])).unwrap().is_empty());
        let inv_cube = RationalFunction::new(poly(&[1]), lin(0).pow(3)).unwrap();
        assert_eq!(
            pole_orders(&inv_cube).unwrap(),
            [(Place::Finite(0), 3)].into_iter().collect()
        );
        let bad = RationalFunction::new(poly(&[1]), poly(&[1, 0, 1])).unwrap();
        assert!(matches!(
            pole_orders(&bad),
            Err(WeierstrassError::UnsupportedPlace(_))
        ));
    }

    #[test]
    fn kodaira_types_at_bad_places() {
        let inv = WeierstrassModel::polynomial_model().invariants().unwrap();
        let ty = |p| local_data(&inv, p).unwrap().kodaira;
        assert_eq!(ty(Place::Finite(0)), KodairaType::IStar(4));
        assert_eq!(ty(Place::Infinity), KodairaType::IStar(4));
        assert_eq!(ty(Place::Finite(1)), KodairaType::IStar(2));
        assert_eq!(ty(Place::Finite(-1)), KodairaType::IStar(2));
        assert_eq!(ty(Place::Finite(2)), KodairaType::I(0));
        let at_inf = local_data(&inv, Place::Infinity).unwrap();
        assert_eq!((at_inf.scaling, at_inf.v_delta, at_inf.v_c4), (-3, 10, Some(2)));
        assert_eq!(
            WeierstrassModel::polynomial_model().bad_places().unwrap(),
            vec![
                Place::Finite(-1),
                Place::Finite(0),
                Place::Finite(1),
                Place::Infinity
            ]
        );
        assert_eq!(KodairaType::IStar(4).to_string(), "I4*");
    }

    #[test]
    fn untwisted_fiber_is_multiplicative() {
        let inv = WeierstrassModel::legendre_fiber().invariants().unwrap();
        // the quadratic twist by t(t-1)(t+1) swaps I_n and I_n* at those places
        assert_eq!(local_data(&inv, Place::Finite(0)).unwrap().kodaira, KodairaType::I(4));
        assert_eq!(local_data(&inv, Place::Finite(1)).unwrap().kodaira, KodairaType::I(2));
    }

    #[test]
    fn kodaira_table() {
        use KodairaType::*;
        let cases = [
            ((0, 0), I(0)),
            ((0, 5), I(0)),
            ((3, 0), I(3)),
            ((2, 1), II),
            ((3, 1), III),
            ((4, 2), IV),
            ((6, 2), IStar(0)),
            ((10, 2), IStar(4)),
            ((8, 2), IStar(2)),
            ((8, 3), IVStar),
            ((9, 3), IIIStar),
            ((10, 4), IIStar),
        ];
        for ((vd, vc), ty) in cases {
            assert_eq!(kodaira_type(vd, vc).unwrap(), ty, "vΔ={vd} vc4={vc}");
        }
        assert!(matches!(kodaira_type(12, 4), Err(WeierstrassError::NonMinimal { .. })));
        assert!(matches!(kodaira_type(5, 1), Err(WeierstrassError::Inconsistent { .. })));
    }

    #[test]
    fn inversion_of_variable() {
        let f = RationalFunction::new(poly(&[1, 2]), poly(&[0, 0, 1])).unwrap();
        // (1 + 2/s) / (1/s²) = s² + 2s
        assert_eq!(f.invert_variable(), RationalFunction::from_ints(&[0, 2, 1]));
        assert_eq!(f.valuation(Place::Infinity), Some(1));
        assert_eq!(f.invert_variable().valuation(Place::Finite(0)), Some(1));
    }
}
