//! Command implementations behind `psl2cert`.
//!
//! Every command returns the bytes destined for stdout plus an exit code, so
//! the binary stays a thin shell and the output can be tested in-process.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::IteratorRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use psl2_surface::certifier::{
    certify, certify_range, verify_certificate, CertError, Certificate, RangeSummary, Verdict,
    WitnessData, MIN_ELL,
};
use psl2_surface::exactq::{parse_ratio, ratio_string};
use psl2_surface::lfunc::{lpolynomial, shape_classify, LFuncError, LPolynomial, Mode};
use psl2_surface::matmod;
use psl2_surface::modp::{is_prime, PrimeField};
use psl2_surface::tensorrep::{
    from_gaussian, gaussian_i, gaussian_mul, group_orders, make_gamma, make_h_generator,
    to_gaussian, TensorError, MAX_BFS_CAP,
};
use psl2_surface::weierstrass::{
    factored_string, local_data, pole_order_lcm, pole_orders, WeierstrassError, WeierstrassModel,
};

pub const CACHE_VERSION: u32 = 1;

/// Largest ℓ accepted by `group-check`.
pub const GROUP_CHECK_MAX_ELL: u64 = 13;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_SHAPE: i32 = 2;
pub const EXIT_WEIL: i32 = 3;
pub const EXIT_OUT_OF_RANGE: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    OutOfRange(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("cache {path}: {reason}")]
    Cache { path: PathBuf, reason: String },
    #[error(transparent)]
    LFunc(#[from] LFuncError),
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Weierstrass(#[from] WeierstrassError),
}

fn lfunc_exit_code(e: &LFuncError) -> i32 {
    match e {
        LFuncError::ShapeViolation { .. } => EXIT_SHAPE,
        LFuncError::WeilBound { .. } => EXIT_WEIL,
        _ => EXIT_FAILURE,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::OutOfRange(_) | CliError::Cert(CertError::OutOfRange(_)) => EXIT_OUT_OF_RANGE,
            CliError::LFunc(e) | CliError::Cert(CertError::LFunc(e)) => lfunc_exit_code(e),
            _ => EXIT_FAILURE,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// What a command prints and how the process should exit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: EXIT_OK }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn json_err(path: &Path) -> impl FnOnce(serde_json::Error) -> CliError + '_ {
    move |source| CliError::Json {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes through a sibling temp file so a crash never leaves half a file.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(CliError::Input(format!("p = {p} is not an odd prime")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// cache

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
enum CacheMode {
    #[serde(rename = "FE")]
    Fe,
    #[serde(rename = "Full")]
    Full,
}

impl From<Mode> for CacheMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::FunctionalEquation => CacheMode::Fe,
            Mode::FullDirect => CacheMode::Full,
        }
    }
}

impl From<CacheMode> for Mode {
    fn from(m: CacheMode) -> Self {
        match m {
            CacheMode::Fe => Mode::FunctionalEquation,
            CacheMode::Full => Mode::FullDirect,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    a: String,
    b: String,
    mode: CacheMode,
    version: u32,
}

#[derive(Serialize, Deserialize)]
struct CacheDoc {
    version: u32,
    entries: BTreeMap<u64, CacheEntry>,
}

/// On-disk store of computed `P_p`, keyed by p.
#[derive(Clone, Debug)]
pub struct CacheFile {
    path: PathBuf,
    entries: BTreeMap<u64, (LPolynomial, Mode)>,
}

impl CacheFile {
    /// Loads `path` (a missing file is an empty cache), re-validates every
    /// entry and recomputes one entry picked by `rng`.
    pub fn load<R: Rng>(path: &Path, rng: &mut R) -> Result<Self> {
        let cache = Self::load_unchecked(path)?;
        if let Some(&p) = cache.entries.keys().choose(rng) {
            cache.spot_check(p)?;
        }
        Ok(cache)
    }

    /// Parses and re-validates without recomputing anything.
    pub fn load_unchecked(path: &Path) -> Result<Self> {
        let bad = |reason: String| CliError::Cache {
            path: path.to_path_buf(),
            reason,
        };
        let mut entries = BTreeMap::new();
        if !path.exists() {
            return Ok(Self {
                path: path.to_path_buf(),
                entries,
            });
        }
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let doc: CacheDoc = serde_json::from_str(&text).map_err(json_err(path))?;
        if doc.version != CACHE_VERSION {
            return Err(bad(format!("unsupported version {}", doc.version)));
        }
        for (p, e) in doc.entries {
            if p == 2 || !is_prime(p) {
                return Err(bad(format!("key {p} is not an odd prime")));
            }
            if e.version != CACHE_VERSION {
                return Err(bad(format!("entry {p}: unsupported version {}", e.version)));
            }
            let a = parse_ratio(&e.a).map_err(|err| bad(format!("entry {p}: {err}")))?;
            let b = parse_ratio(&e.b).map_err(|err| bad(format!("entry {p}: {err}")))?;
            // Weil-bound failures keep their own exit code
            let lp = LPolynomial::new(p, a, b)?;
            entries.insert(p, (lp, e.mode.into()));
        }
        Ok(Self {
            path: path.to_path_buf(),
            entries,
        })
    }

    /// Recomputes entry `p` and requires an exact match.
    pub fn spot_check(&self, p: u64) -> Result<()> {
        let Some((stored, mode)) = self.entries.get(&p) else {
            return Ok(());
        };
        let fresh = lpolynomial(p, *mode)?;
        if &fresh != stored {
            return Err(CliError::Cache {
                path: self.path.clone(),
                reason: format!("entry {p} is stale: stored {stored}, recomputed {fresh}"),
            });
        }
        Ok(())
    }

    /// A FullDirect entry also answers FunctionalEquation lookups.
    pub fn get(&self, p: u64, mode: Mode) -> Option<&LPolynomial> {
        match self.entries.get(&p) {
            Some((lp, stored)) if *stored == mode || *stored == Mode::FullDirect => Some(lp),
            _ => None,
        }
    }

    pub fn insert(&mut self, lp: LPolynomial, mode: Mode) {
        let keep_full = matches!(self.entries.get(&lp.p()), Some((_, Mode::FullDirect)));
        let mode = if keep_full { Mode::FullDirect } else { mode };
        self.entries.insert(lp.p(), (lp, mode));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn save(&self) -> Result<()> {
        let entries = self
            .entries
            .iter()
            .map(|(p, (lp, mode))| {
                let e = CacheEntry {
                    a: ratio_string(lp.a()),
                    b: ratio_string(lp.b()),
                    mode: (*mode).into(),
                    version: CACHE_VERSION,
                };
                (*p, e)
            })
            .collect();
        let doc = CacheDoc {
            version: CACHE_VERSION,
            entries,
        };
        let mut text = serde_json::to_string_pretty(&doc).map_err(json_err(&self.path))?;
        text.push('\n');
        write_atomic(&self.path, &text)
    }
}

// ---------------------------------------------------------------------------
// lpoly / scan

pub fn cmd_lpoly(p: u64, mode: Mode, cache: Option<&Path>) -> Result<Output> {
    check_odd_prime(p)?;
    let lp = match cache {
        Some(path) => {
            let mut store = CacheFile::load(path, &mut rand::thread_rng())?;
            match store.get(p, mode) {
                Some(lp) => lp.clone(),
                None => {
                    let lp = lpolynomial(p, mode)?;
                    store.insert(lp.clone(), mode);
                    store.save()?;
                    lp
                }
            }
        }
        None => lpolynomial(p, mode)?,
    };
    let shape = shape_classify(&lp)?;
    Ok(Output::ok(format!(
        "P_{p} = {lp}; shape: {} b={}\n",
        shape.name(),
        shape.b()
    )))
}

pub const SCAN_HEADER: &str = "p,p_mod_4,a,b,shape_b,bp_integer";

/// CSV of `P_p` and its shape for every odd prime `p ≤ pmax`.
pub fn cmd_scan(pmax: u64) -> Result<Output> {
    let primes: Vec<u64> = (3..=pmax).filter(|&p| is_prime(p)).collect();
    let rows: Vec<String> = primes
        .par_iter()
        .map(|&p| -> Result<String> {
            let lp = lpolynomial(p, Mode::FunctionalEquation)?;
            let shape = shape_classify(&lp)?;
            let bp = shape.b() * BigRational::from_integer(BigInt::from(p));
            Ok(format!(
                "{p},{},{},{},{},{}",
                p % 4,
                ratio_string(lp.a()),
                ratio_string(lp.b()),
                ratio_string(shape.b()),
                bp.is_integer()
            ))
        })
        .collect::<Result<_>>()?;
    let mut out = String::from(SCAN_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    Ok(Output::ok(out))
}

// ---------------------------------------------------------------------------
// certify / verify

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EllTarget {
    Single(u64),
    Range(u64, u64),
}

impl std::str::FromStr for EllTarget {
    type Err = String;

    /// `N` or `A:B`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("{t:?} is not an integer"));
        match s.split_once(':') {
            Some((a, b)) => Ok(EllTarget::Range(num(a)?, num(b)?)),
            None => Ok(EllTarget::Single(num(s)?)),
        }
    }
}

#[derive(Serialize)]
struct RangeError {
    ell: String,
    error: String,
}

#[derive(Serialize)]
struct RangeDoc<'a> {
    summary: &'a RangeSummary,
    certificates: Vec<&'a Certificate>,
    errors: Vec<RangeError>,
}

#[derive(Deserialize)]
struct RangeDocIn {
    certificates: Vec<Certificate>,
}

fn render_certificate(cert: &Certificate, first: &str) -> String {
    let verdict = match cert.verdict {
        Verdict::Certified => "Certified",
        Verdict::Inconclusive => "Inconclusive",
    };
    let mut s = format!("ell = {}: {verdict}\n", cert.ell);
    let branches = [
        ("borel", &cert.borel.eliminated_by),
        ("cartan", &cert.cartan.eliminated_by),
        ("exceptional", &cert.exceptional.eliminated_by),
    ];
    for (name, by) in branches {
        match by {
            Some(p) if p == first => writeln!(s, "  {name}: eliminated by p = {p}"),
            Some(p) => writeln!(s, "  {name}: eliminated by p = {p} (needs second witness)"),
            None => writeln!(s, "  {name}: not eliminated"),
        }
        .expect("writing to a String");
    }
    s
}

fn list(xs: &[u64]) -> String {
    if xs.is_empty() {
        "none".into()
    } else {
        xs.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(json_err(path))?;
    text.push('\n');
    write_atomic(path, &text)
}

pub fn cmd_certify(target: EllTarget, witnesses: &[u64], json: Option<&Path>) -> Result<Output> {
    if witnesses.is_empty() {
        return Err(CertError::NoWitnesses.into());
    }
    // cheap range checks first so a bad ℓ does not pay for witness setup
    match target {
        EllTarget::Single(ell) if ell < MIN_ELL || !is_prime(ell) => {
            return Err(CertError::OutOfRange(ell).into())
        }
        EllTarget::Range(lo, hi) if lo < MIN_ELL || hi < lo => {
            return Err(CertError::OutOfRange(lo).into())
        }
        _ => {}
    }
    let data = WitnessData::compute_all(witnesses)?;
    let first = witnesses[0].to_string();
    match target {
        EllTarget::Single(ell) => {
            let cert = certify(ell, &data)?;
            if let Some(path) = json {
                write_json(path, &cert)?;
            }
            let code = if cert.verdict == Verdict::Certified { EXIT_OK } else { EXIT_FAILURE };
            Ok(Output {
                stdout: render_certificate(&cert, &first),
                code,
            })
        }
        EllTarget::Range(lo, hi) => {
            let report = certify_range(lo, hi, &data)?;
            let s = &report.summary;
            if let Some(path) = json {
                let mut certificates = Vec::new();
                let mut errors = Vec::new();
                for e in &report.entries {
                    match &e.outcome {
                        Ok(c) => certificates.push(c),
                        Err(err) => errors.push(RangeError {
                            ell: e.ell.to_string(),
                            error: err.to_string(),
                        }),
                    }
                }
                write_json(
                    path,
                    &RangeDoc {
                        summary: s,
                        certificates,
                        errors,
                    },
                )?;
            }
            let mut out = format!("range {lo}:{hi}\n");
            writeln!(out, "primes: {}", s.primes).expect("writing to a String");
            writeln!(out, "certified: {}", s.certified).expect("writing to a String");
            writeln!(out, "inconclusive: {}", list(&s.inconclusive)).expect("writing to a String");
            writeln!(out, "errors: {}", list(&s.errors)).expect("writing to a String");
            writeln!(out, "borel fallback: {}", list(&s.borel_fallback)).expect("writing to a String");
            writeln!(out, "cartan fallback: {}", list(&s.cartan_fallback)).expect("writing to a String");
            writeln!(out, "exceptional fallback: {}", list(&s.exceptional_fallback))
                .expect("writing to a String");
            let all_good = s.certified == s.primes;
            Ok(Output {
                stdout: out,
                code: if all_good { EXIT_OK } else { EXIT_FAILURE },
            })
        }
    }
}

/// Re-checks a certificate file written by `certify --json`.
pub fn cmd_verify(path: &Path) -> Result<Output> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let certs = match serde_json::from_str::<Certificate>(&text) {
        Ok(c) => vec![c],
        Err(_) => serde_json::from_str::<RangeDocIn>(&text).map_err(json_err(path))?.certificates,
    };
    let mut out = String::new();
    let mut failed = 0usize;
    for cert in &certs {
        match verify_certificate(cert) {
            Ok(()) if cert.verdict == Verdict::Certified => writeln!(out, "ell = {}: verified", cert.ell),
            Ok(()) => {
                failed += 1;
                writeln!(out, "ell = {}: consistent but inconclusive", cert.ell)
            }
            Err(e) => {
                failed += 1;
                writeln!(out, "ell = {}: REJECTED: {e}", cert.ell)
            }
        }
        .expect("writing to a String");
    }
    writeln!(out, "{} of {} certificates verified", certs.len() - failed, certs.len())
        .expect("writing to a String");
    Ok(Output {
        stdout: out,
        code: if failed == 0 { EXIT_OK } else { EXIT_FAILURE },
    })
}

// ---------------------------------------------------------------------------
// invariants

pub fn cmd_invariants() -> Result<Output> {
    let model = WeierstrassModel::polynomial_model();
    let inv = model.invariants()?;
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("model: y^2 = x^3 + ({}) x^2 + ({}) x", model.a2, model.a4));
    line(format!("c4 = {}", factored_string(&inv.c4)));
    line(format!("c6 = {}", factored_string(&inv.c6)));
    line(format!("Delta = {}", factored_string(&inv.delta)));
    line(format!("j = {}", factored_string(&inv.j)));
    let orders = pole_orders(&inv.j)?;
    let shown: Vec<String> = orders.iter().map(|(pl, n)| format!("{pl}: {n}")).collect();
    line(format!("pole orders of j: {}", shown.join(", ")));
    line(format!("lcm of pole orders: {}", pole_order_lcm(&orders)));
    line("place  v(c4)  v(c6)  v(Delta)  type".into());
    let show = |v: Option<u32>| v.map_or("inf".to_string(), |v| v.to_string());
    for place in model.bad_places()? {
        let ld = local_data(&inv, place)?;
        line(format!(
            "{:<6} {:<6} {:<6} {:<9} {}",
            place.to_string(),
            show(ld.v_c4),
            show(ld.v_c6),
            ld.v_delta,
            ld.kodaira
        ));
    }
    Ok(Output::ok(out))
}

// ---------------------------------------------------------------------------
// group-check

fn sl2_elements(f: &PrimeField) -> Vec<matmod::Mat<2>> {
    let l = f.modulus();
    let mut out = Vec::new();
    for a in 0..l {
        for b in 0..l {
            for c in 0..l {
                for d in 0..l {
                    let m = [[a, b], [c, d]];
                    if matmod::det(f, &m) == 1 {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// Group identities for G_ℓ = H_ℓ ∪ γH_ℓ, checked exhaustively.
pub fn cmd_group_check(ell: u64) -> Result<Output> {
    if ell == 2 || !is_prime(ell) || ell > GROUP_CHECK_MAX_ELL {
        return Err(CliError::OutOfRange(format!(
            "group-check needs an odd prime ℓ ≤ {GROUP_CHECK_MAX_ELL}, got {ell}"
        )));
    }
    let f = PrimeField::new(ell).ok_or_else(|| CliError::Input(format!("bad modulus {ell}")))?;
    let mut out = format!("ell = {ell}\n");
    let mut failures = 0usize;
    let mut check = |out: &mut String, ok: bool, text: String| {
        if !ok {
            failures += 1;
        }
        writeln!(out, "{} {text}", if ok { "ok  " } else { "FAIL" }).expect("writing to a String");
    };

    let gamma = make_gamma(&f);
    let minus_i = matmod::scalar(&f, -1);
    check(&mut out, matmod::mul(&f, &gamma, &gamma) == minus_i, "gamma^2 = -I".into());

    let sl2 = (ell * (ell * ell - 1)) as usize;
    let o = group_orders(&f, MAX_BFS_CAP)?;
    check(&mut out, o.h == sl2, format!("|H| = {} (|SL2(F_{ell})| = {sl2})", o.h));
    check(&mut out, o.g == 2 * sl2, format!("|G| = {} (expected {})", o.g, 2 * sl2));
    check(&mut out, o.gamma == 4, format!("|<gamma>| = {}", o.gamma));
    check(
        &mut out,
        o.quotient == sl2 / 2,
        format!("|G/<gamma>| = {} (|PSL2(F_{ell})| = {})", o.quotient, sl2 / 2),
    );

    let gauss_gamma = to_gaussian(&f, &gamma)?;
    check(&mut out, gauss_gamma == gaussian_i(), "gamma -> i*I in the Gaussian model".into());

    let elements: Vec<_> = sl2_elements(&f)
        .iter()
        .map(|a| make_h_generator(&f, a))
        .collect::<std::result::Result<Vec<_>, _>>()?
        .into_iter()
        .flat_map(|h| [h, matmod::mul(&f, &gamma, &h)])
        .collect();
    let mut roundtrip_ok = 0usize;
    let mut images = Vec::with_capacity(elements.len());
    for m in &elements {
        let g = to_gaussian(&f, m)?;
        if from_gaussian(&f, &g) == *m {
            roundtrip_ok += 1;
        }
        images.push(g);
    }
    check(
        &mut out,
        roundtrip_ok == elements.len(),
        format!("Gaussian roundtrip on all {} elements of G ({roundtrip_ok} ok)", elements.len()),
    );
    let n = elements.len();
    let mut mult_ok = 0usize;
    for k in 0..n {
        let j = (k * 7 + 1) % n;
        let prod = to_gaussian(&f, &matmod::mul(&f, &elements[k], &elements[j]))?;
        if prod == gaussian_mul(&f, &images[k], &images[j]) {
            mult_ok += 1;
        }
    }
    check(
        &mut out,
        mult_ok == n,
        format!("Gaussian multiplicativity on {n} products ({mult_ok} ok)"),
    );
    Ok(Output {
        stdout: out,
        code: if failures == 0 { EXIT_OK } else { EXIT_FAILURE },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ell_target_parsing() {
        assert_eq!("19".parse(), Ok(EllTarget::Single(19)));
        assert_eq!("11:100".parse(), Ok(EllTarget::Range(11, 100)));
        assert!("11:x".parse::<EllTarget>().is_err());
    }

    #[test]
    fn exit_codes() {
        let shape = LFuncError::ShapeViolation {
            p: 3,
            poly: String::new(),
            reason: String::new(),
        };
        assert_eq!(CliError::LFunc(shape.clone()).exit_code(), EXIT_SHAPE);
        assert_eq!(CliError::Cert(CertError::LFunc(shape)).exit_code(), EXIT_SHAPE);
        let weil = LFuncError::WeilBound {
            p: 3,
            poly: String::new(),
        };
        assert_eq!(CliError::LFunc(weil).exit_code(), EXIT_WEIL);
        assert_eq!(CliError::Cert(CertError::OutOfRange(7)).exit_code(), EXIT_OUT_OF_RANGE);
        assert_eq!(CliError::Input("x".into()).exit_code(), EXIT_FAILURE);
    }

    #[test]
    fn sl2_count() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(sl2_elements(&f).len(), 120);
    }
}
