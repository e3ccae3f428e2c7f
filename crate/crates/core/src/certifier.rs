//! Elimination of the maximal subgroups of PSL₂(F_ℓ) using the L-polynomials
//! of a few witness primes, with self-contained, re-checkable certificates.
//!
//! Three branches are checked for each ℓ:
//!
//! * Borel: some witness p has `P_p^{(4)}(ε p^{4e}) ≢ 0 (mod ℓ)` for all
//!   ε = ±1, e ∈ {0, 1}.
//! * Cartan normalizer: some witness has `P_p^{(4)} mod ℓ ∉ {(1-T)⁴, (1+T)⁴}`;
//!   the split case is contained in a Borel.
//! * Exceptional (A₄, S₄, A₅): some witness has `u_p mod ℓ ∉ {0, 1, 2, 4}` and
//!   `u_p² - 3u_p + 1 ≢ 0`.

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactq::{
    eval_exact, nth_power_poly, parse_ratio, rat_int, ratio_string, reduce_mod, reduce_poly_mod,
    ExactError, QPolynomial,
};
use crate::lfunc::{lpolynomial, shape_classify, LFuncError, LPolynomial, Mode, Shape};
use crate::modp::{is_prime, PrimeField};
use crate::tensorrep::{u_invariant, TensorError};

/// The smallest ℓ handled.
pub const MIN_ELL: u64 = 11;

pub const DEFAULT_WITNESSES: [u64; 2] = [3, 5];

/// Statement attached to every certificate.
pub const DEPENDENCY_NOTE: &str = "Certified means the Borel, Cartan-normalizer and exceptional \
     conditions hold for this ell; surjectivity onto PSL2(F_ell) follows from these conditions \
     together with the classification of maximal subgroups and the accompanying lemmas.";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertError {
    #[error("ℓ = {0} is out of range (need a prime ≥ {MIN_ELL})")]
    OutOfRange(u64),
    #[error("witness set is empty")]
    NoWitnesses,
    #[error("witness {0} is not an odd prime")]
    BadWitness(u64),
    #[error("witness {0} equals ℓ")]
    WitnessIsEll(u64),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    LFunc(#[from] LFuncError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("u_{p} from the exact shape disagrees with the reduction mod {ell}")]
    UMismatch { p: u64, ell: u64 },
}

/// Everything a witness prime contributes, computed once over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessData {
    pub p: u64,
    pub lpoly: LPolynomial,
    pub shape: Shape,
    pub p4: QPolynomial,
    pub u: BigRational,
    /// `P_p^{(4)}(ε p^{4e})` in the order (1,0), (-1,0), (1,1), (-1,1).
    pub borel_values: Vec<(i8, u8, BigRational)>,
    pub discriminant: BigRational,
}

impl WitnessData {
    pub fn compute(p: u64) -> Result<Self, CertError> {
        if p == 2 || !is_prime(p) {
            return Err(CertError::BadWitness(p));
        }
        Self::from_lpolynomial(lpolynomial(p, Mode::FunctionalEquation)?)
    }

    pub fn from_lpolynomial(lpoly: LPolynomial) -> Result<Self, CertError> {
        let p = lpoly.p();
        let shape = shape_classify(&lpoly)?;
        let qp = lpoly.to_qpoly();
        let p4 = nth_power_poly(&qp, 4)?;
        let p4th = rat_int(p as i64).pow(4);
        let borel_values = borel_points()
            .into_iter()
            .map(|(eps, e)| {
                let x = rat_int(eps as i64) * if e == 0 { BigRational::one() } else { p4th.clone() };
                (eps, e, eval_exact(&p4, &x))
            })
            .collect();
        Ok(Self {
            p,
            u: shape.u(),
            discriminant: qp.discriminant(),
            lpoly,
            shape,
            p4,
            borel_values,
        })
    }

    pub fn compute_all(ps: &[u64]) -> Result<Vec<Self>, CertError> {
        ps.par_iter().map(|&p| Self::compute(p)).collect()
    }
}

fn borel_points() -> [(i8, u8); 4] {
    [(1, 0), (-1, 0), (1, 1), (-1, 1)]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Certified,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSummary {
    pub p: String,
    pub a: String,
    pub b: String,
    pub u: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalEntry {
    pub eps: String,
    pub e: String,
    pub value: String,
    pub residue: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BorelCheck {
    pub p: String,
    pub values: Vec<EvalEntry>,
    pub eliminates: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BorelRecord {
    pub eliminated_by: Option<String>,
    /// `[eps, e, residue]` for the eliminating witness.
    pub residues: Vec<[String; 3]>,
    pub checks: Vec<BorelCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanCheck {
    pub p: String,
    /// Coefficients of `P_p^{(4)} mod ℓ`, constant term first.
    pub p4_mod_ell: Vec<String>,
    pub eliminates: bool,
    /// `P_p mod ℓ` is neither `(1 + T²)²` nor `(1 - T²)²`.
    pub outside_normalizer_coset: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separability {
    pub p: String,
    pub discriminant: String,
    pub residue: String,
    pub separable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanRecord {
    pub eliminated_by: Option<String>,
    /// `[eps, residue of P_p^{(4)}(eps)]` for the eliminating witness.
    pub residues: Vec<[String; 2]>,
    pub split_case_in_borel: bool,
    pub checks: Vec<CartanCheck>,
    /// Discriminants of `P_p` for the witnesses with p ≡ 3 (mod 4).
    pub separability: Vec<Separability>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalCheck {
    pub p: String,
    pub u: String,
    pub u_mod_ell: String,
    /// `u² - 3u + 1 mod ℓ`.
    pub quadratic: String,
    pub eliminates: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalRecord {
    pub eliminated_by: Option<String>,
    /// `[p, u_p mod ℓ]` for every witness.
    pub witness_u: Vec<[String; 2]>,
    pub checks: Vec<ExceptionalCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub ell: String,
    pub verdict: Verdict,
    pub witnesses: Vec<WitnessSummary>,
    pub borel: BorelRecord,
    pub cartan: CartanRecord,
    pub exceptional: ExceptionalRecord,
    pub note: String,
}

impl Certificate {
    pub fn ell(&self) -> u64 {
        self.ell.parse().expect("ell is a decimal integer")
    }

    /// Branches that were not eliminated.
    pub fn failed_branches(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.borel.eliminated_by.is_none() {
            out.push("borel");
        }
        if self.cartan.eliminated_by.is_none() {
            out.push("cartan");
        }
        if self.exceptional.eliminated_by.is_none() {
            out.push("exceptional");
        }
        out
    }
}

fn check_inputs(ell: u64, witnesses: &[WitnessData]) -> Result<(), CertError> {
    if ell < MIN_ELL || !is_prime(ell) {
        return Err(CertError::OutOfRange(ell));
    }
    if witnesses.is_empty() {
        return Err(CertError::NoWitnesses);
    }
    if let Some(w) = witnesses.iter().find(|w| w.p == ell) {
        return Err(CertError::WitnessIsEll(w.p));
    }
    Ok(())
}

pub fn eliminate_borel(ell: u64, witnesses: &[WitnessData]) -> Result<BorelRecord, CertError> {
    check_inputs(ell, witnesses)?;
    let mut checks = Vec::new();
    for w in witnesses {
        let values = w
            .borel_values
            .iter()
            .map(|(eps, e, v)| {
                Ok(EvalEntry {
                    eps: eps.to_string(),
                    e: e.to_string(),
                    value: ratio_string(v),
                    residue: reduce_mod(v, ell)?.to_string(),
                })
            })
            .collect::<Result<Vec<_>, CertError>>()?;
        let eliminates = values.iter().all(|v| v.residue != "0");
        checks.push(BorelCheck {
            p: w.p.to_string(),
            values,
            eliminates,
        });
    }
    let winner = checks.iter().find(|c| c.eliminates);
    Ok(BorelRecord {
        eliminated_by: winner.map(|c| c.p.clone()),
        residues: winner
            .map(|c| {
                c.values
                    .iter()
                    .map(|v| [v.eps.clone(), v.e.clone(), v.residue.clone()])
                    .collect()
            })
            .unwrap_or_default(),
        checks,
    })
}

/// `(1 + sT)⁴ mod ℓ` coefficients.
fn fourth_power_linear(f: &PrimeField, s: i64) -> Vec<u64> {
    [1i64, 4, 6, 4, 1]
        .iter()
        .enumerate()
        .map(|(k, &c)| f.reduce_i64(c * s.pow(k as u32)))
        .collect()
}

pub fn eliminate_cartan(
    ell: u64,
    witnesses: &[WitnessData],
    borel: &BorelRecord,
) -> Result<CartanRecord, CertError> {
    check_inputs(ell, witnesses)?;
    let f = PrimeField::new(ell).ok_or(CertError::OutOfRange(ell))?;
    let excluded = [fourth_power_linear(&f, -1), fourth_power_linear(&f, 1)];
    let coset = [
        vec![1, 0, 2, 0, 1],
        vec![1, 0, f.reduce_i64(-2), 0, 1],
    ];
    let mut checks = Vec::new();
    let mut separability = Vec::new();
    for w in witnesses {
        let p4 = padded(reduce_poly_mod(&w.p4, ell)?, 5);
        let pm = padded(reduce_poly_mod(&w.lpoly.to_qpoly(), ell)?, 5);
        checks.push(CartanCheck {
            p: w.p.to_string(),
            p4_mod_ell: p4.iter().map(u64::to_string).collect(),
            eliminates: !excluded.contains(&p4),
            outside_normalizer_coset: !coset.contains(&pm),
        });
        if w.p % 4 == 3 {
            let r = reduce_mod(&w.discriminant, ell)?;
            separability.push(Separability {
                p: w.p.to_string(),
                discriminant: ratio_string(&w.discriminant),
                residue: r.to_string(),
                separable: r != 0,
            });
        }
    }
    let winner = checks.iter().find(|c| c.eliminates);
    let residues = match winner {
        Some(c) => {
            let w = witnesses.iter().find(|w| w.p.to_string() == c.p).expect("present");
            w.borel_values
                .iter()
                .filter(|(_, e, _)| *e == 0)
                .map(|(eps, _, v)| Ok([eps.to_string(), reduce_mod(v, ell)?.to_string()]))
                .collect::<Result<_, CertError>>()?
        }
        None => Vec::new(),
    };
    Ok(CartanRecord {
        eliminated_by: winner.map(|c| c.p.clone()),
        residues,
        split_case_in_borel: borel.eliminated_by.is_some(),
        checks,
        separability,
    })
}

fn padded(mut v: Vec<u64>, n: usize) -> Vec<u64> {
    v.resize(n, 0);
    v
}

pub fn eliminate_exceptional(
    ell: u64,
    witnesses: &[WitnessData],
) -> Result<ExceptionalRecord, CertError> {
    check_inputs(ell, witnesses)?;
    let f = PrimeField::new(ell).ok_or(CertError::OutOfRange(ell))?;
    let mut checks = Vec::new();
    for w in witnesses {
        let u = reduce_mod(&w.u, ell)?;
        // cross-check against the shape of P_p mod ℓ
        let pm = padded(reduce_poly_mod(&w.lpoly.to_qpoly(), ell)?, 5);
        let pm: [u64; 5] = pm.try_into().expect("length 5");
        if u_invariant(&pm, w.p, ell)? != u {
            return Err(CertError::UMismatch { p: w.p, ell });
        }
        let quad = f.add(f.sub(f.mul(u, u), f.mul(3, u)), 1);
        checks.push(ExceptionalCheck {
            p: w.p.to_string(),
            u: ratio_string(&w.u),
            u_mod_ell: u.to_string(),
            quadratic: quad.to_string(),
            eliminates: ![0, 1, 2, 4].contains(&u) && quad != 0,
        });
    }
    Ok(ExceptionalRecord {
        eliminated_by: checks.iter().find(|c| c.eliminates).map(|c| c.p.clone()),
        witness_u: checks
            .iter()
            .map(|c| [c.p.clone(), c.u_mod_ell.clone()])
            .collect(),
        checks,
    })
}

pub fn certify(ell: u64, witnesses: &[WitnessData]) -> Result<Certificate, CertError> {
    check_inputs(ell, witnesses)?;
    let borel = eliminate_borel(ell, witnesses)?;
    let cartan = eliminate_cartan(ell, witnesses, &borel)?;
    let exceptional = eliminate_exceptional(ell, witnesses)?;
    let verdict = if borel.eliminated_by.is_some()
        && cartan.eliminated_by.is_some()
        && exceptional.eliminated_by.is_some()
    {
        Verdict::Certified
    } else {
        Verdict::Inconclusive
    };
    Ok(Certificate {
        ell: ell.to_string(),
        verdict,
        witnesses: witnesses
            .iter()
            .map(|w| WitnessSummary {
                p: w.p.to_string(),
                a: ratio_string(w.lpoly.a()),
                b: ratio_string(w.lpoly.b()),
                u: ratio_string(&w.u),
            })
            .collect(),
        borel,
        cartan,
        exceptional,
        note: DEPENDENCY_NOTE.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeEntry {
    pub ell: u64,
    pub outcome: Result<Certificate, CertError>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RangeSummary {
    pub primes: usize,
    pub certified: usize,
    pub inconclusive: Vec<u64>,
    pub errors: Vec<u64>,
    /// ℓ whose branch was eliminated by a witness other than the first.
    pub borel_fallback: Vec<u64>,
    pub cartan_fallback: Vec<u64>,
    pub exceptional_fallback: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeReport {
    pub entries: Vec<RangeEntry>,
    pub summary: RangeSummary,
}

/// Certificates for every prime in `[lo, hi]`, in increasing order.
pub fn certify_range(lo: u64, hi: u64, witnesses: &[WitnessData]) -> Result<RangeReport, CertError> {
    if lo < MIN_ELL || hi < lo {
        return Err(CertError::OutOfRange(lo));
    }
    if witnesses.is_empty() {
        return Err(CertError::NoWitnesses);
    }
    let primes: Vec<u64> = (lo..=hi).filter(|&n| is_prime(n)).collect();
    let entries: Vec<RangeEntry> = primes
        .par_iter()
        .map(|&ell| RangeEntry {
            ell,
            outcome: certify(ell, witnesses),
        })
        .collect();
    let first = witnesses[0].p.to_string();
    let mut summary = RangeSummary {
        primes: entries.len(),
        ..Default::default()
    };
    for entry in &entries {
        match &entry.outcome {
            Err(_) => summary.errors.push(entry.ell),
            Ok(c) => {
                if c.verdict == Verdict::Certified {
                    summary.certified += 1;
                } else {
                    summary.inconclusive.push(entry.ell);
                }
                let fell_back = |by: &Option<String>| by.as_ref().is_some_and(|p| *p != first);
                if fell_back(&c.borel.eliminated_by) {
                    summary.borel_fallback.push(entry.ell);
                }
                if fell_back(&c.cartan.eliminated_by) {
                    summary.cartan_fallback.push(entry.ell);
                }
                if fell_back(&c.exceptional.eliminated_by) {
                    summary.exceptional_fallback.push(entry.ell);
                }
            }
        }
    }
    Ok(RangeReport { entries, summary })
}

/// Re-derives every residue and flag in a certificate from the stored
/// rationals, and recomputes the evaluations from the stored `a`, `b`.
pub fn verify_certificate(cert: &Certificate) -> Result<(), String> {
    let ell: u64 = cert.ell.parse().map_err(|_| "ell is not an integer".to_string())?;
    if ell < MIN_ELL || !is_prime(ell) {
        return Err(format!("ell = {ell} out of range"));
    }
    let f = PrimeField::new(ell).ok_or("bad ell")?;
    let rat = |s: &str| parse_ratio(s).map_err(|e| format!("{s}: {e}"));
    let red = |x: &BigRational| reduce_mod(x, ell).map_err(|e| e.to_string());
    let mut p4s = Vec::new();
    for w in &cert.witnesses {
        let p: u64 = w.p.parse().map_err(|_| "bad witness")?;
        let a = rat(&w.a)?;
        let b = rat(&w.b)?;
        let qp = QPolynomial::new(vec![BigRational::one(), a.clone(), b.clone(), a.clone(), BigRational::one()]);
        // u from the coefficients alone
        let u = if p % 4 == 1 {
            let h = &a / rat_int(2);
            &h * &h
        } else {
            &b + rat_int(2)
        };
        if u != rat(&w.u)? {
            return Err(format!("u_{p} does not match a, b"));
        }
        p4s.push((w.p.clone(), p, qp.clone(), nth_power_poly(&qp, 4).map_err(|e| e.to_string())?));
    }
    let lookup = |p: &str| p4s.iter().find(|x| x.0 == p).ok_or(format!("unknown witness {p}"));

    for c in &cert.borel.checks {
        let (_, p, _, p4) = lookup(&c.p)?;
        let pp4 = rat_int(*p as i64).pow(4);
        let mut all_nonzero = true;
        for v in &c.values {
            let eps: i64 = v.eps.parse().map_err(|_| "bad eps")?;
            let e: u32 = v.e.parse().map_err(|_| "bad e")?;
            let x = rat_int(eps) * if e == 0 { BigRational::one() } else { pp4.clone() };
            let value = eval_exact(p4, &x);
            if value != rat(&v.value)? {
                return Err(format!("P_{p}^(4)({x}) mismatch"));
            }
            let r = red(&value)?;
            if r.to_string() != v.residue {
                return Err(format!("residue of P_{p}^(4)({x}) mismatch"));
            }
            all_nonzero &= r != 0;
        }
        if c.values.len() != 4 || all_nonzero != c.eliminates {
            return Err(format!("borel flag for p = {p} is wrong"));
        }
    }
    let first_borel = cert.borel.checks.iter().find(|c| c.eliminates).map(|c| c.p.clone());
    if first_borel != cert.borel.eliminated_by {
        return Err("borel eliminated_by is inconsistent".into());
    }

    let lin4 = |s: i64| fourth_power_linear(&f, s);
    for c in &cert.cartan.checks {
        let (_, p, qp, p4) = lookup(&c.p)?;
        let coeffs = padded(reduce_poly_mod(p4, ell).map_err(|e| e.to_string())?, 5);
        if coeffs.iter().map(u64::to_string).collect::<Vec<_>>() != c.p4_mod_ell {
            return Err(format!("P_{p}^(4) mod ell mismatch"));
        }
        if (coeffs != lin4(1) && coeffs != lin4(-1)) != c.eliminates {
            return Err(format!("cartan flag for p = {p} is wrong"));
        }
        let pm = padded(reduce_poly_mod(qp, ell).map_err(|e| e.to_string())?, 5);
        let in_coset = pm == [1, 0, 2, 0, 1] || pm == vec![1, 0, f.reduce_i64(-2), 0, 1];
        if in_coset == c.outside_normalizer_coset {
            return Err(format!("coset flag for p = {p} is wrong"));
        }
    }
    for s in &cert.cartan.separability {
        let (_, p, qp, _) = lookup(&s.p)?;
        let d = qp.discriminant();
        if ratio_string(&d) != s.discriminant || red(&d)?.to_string() != s.residue {
            return Err(format!("discriminant of P_{p} mismatch"));
        }
        if s.separable != (s.residue != "0") {
            return Err("separability flag is wrong".into());
        }
    }
    let first_cartan = cert.cartan.checks.iter().find(|c| c.eliminates).map(|c| c.p.clone());
    if first_cartan != cert.cartan.eliminated_by {
        return Err("cartan eliminated_by is inconsistent".into());
    }
    if cert.cartan.split_case_in_borel != cert.borel.eliminated_by.is_some() {
        return Err("split-case flag is wrong".into());
    }

    for c in &cert.exceptional.checks {
        let u = red(&rat(&c.u)?)?;
        let quad = f.add(f.sub(f.mul(u, u), f.mul(3, u)), 1);
        if u.to_string() != c.u_mod_ell || quad.to_string() != c.quadratic {
            return Err(format!("u residue for p = {} mismatch", c.p));
        }
        if (![0, 1, 2, 4].contains(&u) && quad != 0) != c.eliminates {
            return Err(format!("exceptional flag for p = {} is wrong", c.p));
        }
        let w = cert.witnesses.iter().find(|w| w.p == c.p).ok_or("unknown witness")?;
        if w.u != c.u {
            return Err(format!("u_{} differs from the witness summary", c.p));
        }
    }
    let first_exc = cert.exceptional.checks.iter().find(|c| c.eliminates).map(|c| c.p.clone());
    if first_exc != cert.exceptional.eliminated_by {
        return Err("exceptional eliminated_by is inconsistent".into());
    }

    let all = cert.borel.eliminated_by.is_some()
        && cert.cartan.eliminated_by.is_some()
        && cert.exceptional.eliminated_by.is_some();
    let expected = if all { Verdict::Certified } else { Verdict::Inconclusive };
    if cert.verdict != expected {
        return Err("verdict does not follow from the records".into());
    }
    if cert.witnesses.iter().any(|w| w.p == cert.ell) {
        return Err("a witness equals ell".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::rat;

    fn data() -> Vec<WitnessData> {
        WitnessData::compute_all(&DEFAULT_WITNESSES).unwrap()
    }

    #[test]
    fn witness_values_match_factored_forms() {
        let w = data();
        let pw = |b: i64, e: u32| rat_int(b).pow(e as i32);
        let v3: Vec<BigRational> = w[0].borel_values.iter().map(|x| x.2.clone()).collect();
        assert_eq!(v3[0], pw(2, 12) * pw(5, 2) / pw(3, 8));
        assert_eq!(v3[1], pw(2, 4) / pw(3, 8));
        assert_eq!(v3[2], pw(2, 12) * pw(3, 2) * pw(5, 2) * pw(7, 2));
        assert_eq!(v3[3], pw(2, 4) * pw(1601, 2));
        let v5: Vec<BigRational> = w[1].borel_values.iter().map(|x| x.2.clone()).collect();
        assert_eq!(v5[0], pw(2, 14) * pw(3, 2) / pw(5, 8));
        assert_eq!(v5[1], pw(2, 4) * pw(23, 4) / pw(5, 8));
        assert_eq!(v5[2], pw(2, 14) * pw(3, 2) * pw(5, 2) * pw(7, 2) * pw(29, 2));
        assert_eq!(v5[3], pw(2, 4) * pw(97, 2) * pw(1009, 2));
        assert_eq!(w[0].u, rat(16, 9));
        assert_eq!(w[1].u, rat(4, 25));
        assert_eq!(w[0].discriminant, pw(2, 16) * pw(5, 2) / pw(3, 8));
    }

    #[test]
    fn borel_examples() {
        let w = data();
        let r = eliminate_borel(11, &w[..1]).unwrap();
        assert_eq!(r.eliminated_by.as_deref(), Some("3"));
        assert_eq!(r.residues.len(), 4);
        assert!(eliminate_borel(23, &w[1..]).unwrap().eliminated_by.is_none());
        assert_eq!(eliminate_borel(23, &w).unwrap().eliminated_by.as_deref(), Some("3"));
        let r = eliminate_borel(1601, &w).unwrap();
        assert!(!r.checks[0].eliminates);
        assert_eq!(r.eliminated_by.as_deref(), Some("5"));
    }

    #[test]
    fn cartan_examples() {
        let w = data();
        let b = eliminate_borel(11, &w).unwrap();
        let c = eliminate_cartan(11, &w[..1], &b).unwrap();
        assert_eq!(c.eliminated_by.as_deref(), Some("3"));
        assert!(c.split_case_in_borel);
        assert_eq!(c.separability[0].discriminant, "1638400/6561");
        assert!(c.separability[0].separable);
        assert!(c.checks[0].outside_normalizer_coset);
        assert_eq!(c.residues, vec![["1".to_string(), "9".to_string()], ["-1".to_string(), "1".to_string()]]);
    }

    #[test]
    fn synthetic_witness_congruent_to_fourth_power() {
        // P = (1 + T²)²: inverse roots ±i, so every fourth power is 1
        let lp = LPolynomial::new(5, rat_int(0), rat_int(2)).unwrap();
        let w = WitnessData::from_lpolynomial(lp).unwrap();
        assert_eq!(w.p4, QPolynomial::from_ints(&[1, -4, 6, -4, 1]));
        let b = eliminate_borel(13, std::slice::from_ref(&w)).unwrap();
        let c = eliminate_cartan(13, std::slice::from_ref(&w), &b).unwrap();
        assert!(c.eliminated_by.is_none());
        assert!(!c.checks[0].outside_normalizer_coset);
    }

    #[test]
    fn exceptional_examples() {
        let w = data();
        let r = eliminate_exceptional(11, &w[..1]).unwrap();
        assert_eq!(r.witness_u[0], ["3".to_string(), "3".to_string()]);
        assert_eq!(r.eliminated_by.as_deref(), Some("3"));
        let r = eliminate_exceptional(13, &w[..1]).unwrap();
        assert_eq!(r.checks[0].u_mod_ell, "9");
        assert_eq!(r.eliminated_by.as_deref(), Some("3"));
        let r = eliminate_exceptional(19, &w).unwrap();
        assert!(!r.checks[0].eliminates);
        assert_eq!(r.checks[0].quadratic, "0");
        assert_eq!(r.eliminated_by.as_deref(), Some("5"));
    }

    #[test]
    fn certify_examples() {
        let w = data();
        let c = certify(11, &w).unwrap();
        assert_eq!(c.verdict, Verdict::Certified);
        verify_certificate(&c).unwrap();
        let c = certify(19, &w).unwrap();
        assert_eq!(c.verdict, Verdict::Certified);
        assert_eq!(c.exceptional.eliminated_by.as_deref(), Some("5"));
        assert_eq!(certify(7, &w), Err(CertError::OutOfRange(7)));
        assert_eq!(certify(15, &w), Err(CertError::OutOfRange(15)));
        let w13 = WitnessData::compute_all(&[3, 13]).unwrap();
        assert_eq!(certify(13, &w13), Err(CertError::WitnessIsEll(13)));
        assert_eq!(certify(11, &[]), Err(CertError::NoWitnesses));
        assert_eq!(WitnessData::compute(9), Err(CertError::BadWitness(9)));
    }

    #[test]
    fn small_range_with_one_witness() {
        let w = WitnessData::compute_all(&[3]).unwrap();
        let r = certify_range(11, 13, &w).unwrap();
        assert_eq!(r.summary.certified, 2);
        assert_eq!(r.entries.iter().map(|e| e.ell).collect::<Vec<_>>(), vec![11, 13]);
    }

    #[test]
    fn tampered_certificates_are_rejected() {
        let w = data();
        let c = certify(23, &w).unwrap();
        let mut bad = c.clone();
        bad.borel.checks[0].values[2].residue = "1".into();
        assert!(verify_certificate(&bad).is_err());
        let mut bad = c.clone();
        bad.witnesses[1].a = "-3/5".into();
        assert!(verify_certificate(&bad).is_err());
        let mut bad = c.clone();
        bad.verdict = Verdict::Inconclusive;
        assert!(verify_certificate(&bad).is_err());
        let mut bad = c;
        bad.exceptional.eliminated_by = Some("5".into());
        assert!(verify_certificate(&bad).is_err());
    }
}
