//! Constructors for the explicit families of forms (cyclotomic, binomial,
//! `Q⁺`, `Q⁻`, `L_{d,p}`), the squarefree sequence `μ_n`, regularity
//! tuples, degree cutoffs and exhaustive checks of the lower bound
//! `max{|x|,|y|} ≤ κ |F(x,y)|^{1/(d−d₀)}`.

use crate::arith::{
    ceil_kappa_root, is_prime, is_squarefree, parse_rational, rat, ratio, rational_dth_root, rational_to_f64,
    rational_to_string,
};
use crate::forms::{BinaryForm, CappedInteger, FormError, DEFAULT_CAP};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FamilyError {
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("sequence not admissible: {0}")]
    BadSequence(String),
    #[error("p = {p} is not a prime in [{d}, {twice})", twice = 2 * d)]
    BadPrime { d: u64, p: u64 },
    #[error("A = {a} does not exceed kappa = {kappa}")]
    AtooSmall { a: u64, kappa: f64 },
    #[error("binomial catalog rejected: {0}")]
    BadCatalog(String),
    #[error("cannot parse family spec `{0}`")]
    Parse(String),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Which squarefree sequence feeds a `Q±` family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeqVariant {
    /// `μ_n = q_n`, the n-th squarefree integer.
    FullSquarefree,
    /// `μ_n = q_{n+1}`, so `μ_1 = 2`.
    Shifted,
    Custom,
}

/// Increasing squarefree integers `μ_1 < μ_2 < …` with `μ_n ≤ λ n`.
///
/// The two standard variants are unbounded and produce any prefix on
/// demand; a custom sequence is finite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquarefreeSequence {
    pub variant: SeqVariant,
    pub lambda: BigRational,
    custom: Vec<u64>,
}

/// `λ = sup_n q_n / n`, attained at `n = 230` (`q_230 = 381`).
pub fn lambda_full() -> BigRational {
    ratio(381, 230)
}

fn squarefree_upto_count(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut k = 1u64;
    while out.len() < n {
        if is_squarefree(k) {
            out.push(k);
        }
        k += 1;
    }
    out
}

impl SquarefreeSequence {
    pub fn full() -> Self {
        SquarefreeSequence { variant: SeqVariant::FullSquarefree, lambda: lambda_full(), custom: Vec::new() }
    }

    pub fn shifted() -> Self {
        SquarefreeSequence { variant: SeqVariant::Shifted, lambda: rat(2), custom: Vec::new() }
    }

    pub fn custom(values: Vec<u64>, lambda: BigRational) -> Result<Self, FamilyError> {
        let s = SquarefreeSequence { variant: SeqVariant::Custom, lambda, custom: values };
        s.prefix(s.custom.len())?;
        Ok(s)
    }

    /// `μ_1, …, μ_n`, validated against the sequence invariants.
    pub fn prefix(&self, n: usize) -> Result<Vec<u64>, FamilyError> {
        let v = match self.variant {
            SeqVariant::FullSquarefree => squarefree_upto_count(n),
            SeqVariant::Shifted => squarefree_upto_count(n + 1)[1..].to_vec(),
            SeqVariant::Custom => {
                if n > self.custom.len() {
                    return Err(FamilyError::IndexOutOfRange(format!(
                        "custom sequence has {} terms, {n} requested",
                        self.custom.len()
                    )));
                }
                self.custom[..n].to_vec()
            }
        };
        for (i, &m) in v.iter().enumerate() {
            if !is_squarefree(m) {
                return Err(FamilyError::BadSequence(format!("{m} is not squarefree")));
            }
            if i > 0 && v[i - 1] >= m {
                return Err(FamilyError::BadSequence("sequence is not increasing".into()));
            }
            if rat(m as i64) > &self.lambda * rat(i as i64 + 1) {
                return Err(FamilyError::BadSequence(format!("mu_{} = {m} exceeds lambda * n", i + 1)));
            }
        }
        Ok(v)
    }
}

/// First `n` squarefree integers, with `λ` the largest ratio `q_k / k`.
pub fn squarefree_prefix(n: usize) -> SquarefreeSequence {
    let v = squarefree_upto_count(n.max(1));
    let lambda = v
        .iter()
        .enumerate()
        .map(|(i, &q)| ratio(q as i64, i as i64 + 1))
        .max()
        .unwrap();
    SquarefreeSequence { variant: SeqVariant::Custom, lambda, custom: v }
}

impl SquarefreeSequence {
    pub fn values(&self) -> &[u64] {
        &self.custom
    }
}

/// A binomial entry `aX^d + bY^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinomialEntry {
    pub a: u64,
    pub b: u64,
    pub d: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyId {
    Cyclotomic,
    Binomial(Vec<BinomialEntry>),
    QPlus(SquarefreeSequence),
    QMinus(SquarefreeSequence),
    Lfamily,
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyId::Cyclotomic => write!(f, "cyclo"),
            FamilyId::Binomial(c) => write!(f, "binom[{} entries]", c.len()),
            FamilyId::QPlus(s) => write!(f, "qplus(lambda={})", rational_to_string(&s.lambda)),
            FamilyId::QMinus(s) => write!(f, "qminus(lambda={})", rational_to_string(&s.lambda)),
            FamilyId::Lfamily => write!(f, "L"),
        }
    }
}

impl FamilyId {
    pub fn qplus() -> Self {
        FamilyId::QPlus(SquarefreeSequence::full())
    }

    pub fn qminus() -> Self {
        FamilyId::QMinus(SquarefreeSequence::shifted())
    }

    pub fn binomial(catalog: Vec<BinomialEntry>) -> Result<Self, FamilyError> {
        validate_catalog(&catalog)?;
        Ok(FamilyId::Binomial(catalog))
    }

    /// Smallest form degree that occurs in the family.
    pub fn min_degree(&self) -> u32 {
        match self {
            FamilyId::Cyclotomic | FamilyId::QPlus(_) | FamilyId::QMinus(_) => 4,
            FamilyId::Lfamily => 5,
            FamilyId::Binomial(c) => c.iter().map(|e| e.d).min().unwrap_or(4),
        }
    }

    /// Largest degree of a finite family, `None` when infinite.
    pub fn max_degree(&self) -> Option<u32> {
        match self {
            FamilyId::Binomial(c) => Some(c.iter().map(|e| e.d).max().unwrap_or(0)),
            FamilyId::QPlus(s) | FamilyId::QMinus(s) if s.variant == SeqVariant::Custom => {
                let n = s.values().len() as u32;
                let shift = u32::from(matches!(self, FamilyId::QMinus(_)));
                Some((n.saturating_sub(1 + shift)) * 2 + 2 * shift)
            }
            _ => None,
        }
    }
}

/// The constant `κ` of a regularity tuple.
#[derive(Debug, Clone, PartialEq)]
pub enum Kappa {
    Rational(BigRational),
    /// An irrational constant with its closed form for display.
    Real { value: f64, expr: String },
}

impl Kappa {
    pub fn as_f64(&self) -> f64 {
        match self {
            Kappa::Rational(q) => rational_to_f64(q),
            Kappa::Real { value, .. } => *value,
        }
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kappa::Rational(q) => write!(f, "{}", rational_to_string(q)),
            Kappa::Real { value, expr } => write!(f, "{expr} ({value:.6})"),
        }
    }
}

/// `(A, A₁, d₀, d₁, κ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityTuple {
    pub a: u64,
    pub a1: u64,
    pub d0: u32,
    pub d1: u32,
    pub kappa: Kappa,
}

impl RegularityTuple {
    pub fn new(a: u64, a1: u64, d0: u32, d1: u32, kappa: Kappa) -> Result<Self, FamilyError> {
        let k = kappa.as_f64();
        if a < 1 || a1 < 1 || d1 < d0 || !(k > 0.0 && k < a as f64) {
            return Err(FamilyError::BadSequence(format!("inadmissible tuple ({a},{a1},{d0},{d1},{kappa})")));
        }
        Ok(RegularityTuple { a, a1, d0, d1, kappa })
    }

    /// Half-width `⌈κ B^{1/(d−d₀)}⌉` of the box that holds every point
    /// with `0 < |F| ≤ B` and `max ≥ A`, for a member of degree `d`.
    /// Exact for rational `κ`; one unit of slack for irrational `κ`.
    pub fn box_radius(&self, degree: u32, b: u64) -> u64 {
        let e = degree - self.d0;
        match &self.kappa {
            Kappa::Rational(q) => ceil_kappa_root(q, b.max(1), e),
            Kappa::Real { value, .. } => {
                let x = value * (b.max(1) as f64).powf(1.0 / e as f64);
                (x * (1.0 + 1e-12)).ceil() as u64 + 1
            }
        }
    }

    /// Does condition (v) apply to members of this degree?
    pub fn applies_to(&self, degree: u32) -> bool {
        degree >= self.d1.max(self.d0 + 1)
    }
}

/// `2eλ` for the `Q⁻` family.
pub fn qminus_kappa(lambda: &BigRational) -> f64 {
    2.0 * std::f64::consts::E * rational_to_f64(lambda)
}

pub fn regularity(fam: &FamilyId) -> RegularityTuple {
    match fam {
        FamilyId::QPlus(_) => RegularityTuple::new(2, 1, 0, 4, Kappa::Rational(rat(1))).unwrap(),
        FamilyId::QMinus(s) => {
            let k = qminus_kappa(&s.lambda);
            let a = k.floor() as u64 + 1;
            let expr = format!("2e*{}", rational_to_string(&s.lambda));
            RegularityTuple::new(a, 1, 2, 2, Kappa::Real { value: k, expr }).unwrap()
        }
        FamilyId::Lfamily => RegularityTuple::new(10, 1, 1, 5, Kappa::Rational(rat(9))).unwrap(),
        FamilyId::Binomial(c) => {
            let mut a1 = 1u64;
            let mut degrees: Vec<u32> = c.iter().map(|e| e.d).collect();
            degrees.sort_unstable();
            degrees.dedup();
            for d in degrees {
                let n = c.iter().filter(|e| e.d == d).count() as u64;
                while (d as u64).checked_pow(a1 as u32).is_some_and(|p| p < n) {
                    a1 += 1;
                }
            }
            RegularityTuple::new(2, a1, 0, 4, Kappa::Rational(rat(1))).unwrap()
        }
        FamilyId::Cyclotomic => RegularityTuple::new(
            2,
            2,
            0,
            4,
            Kappa::Real { value: 2.0 / 3f64.sqrt(), expr: "2/sqrt(3)".into() },
        )
        .unwrap(),
    }
}

/// Largest degree that can carry a value `0 < |m| ≤ B` at a point with
/// `max{|x|,|y|} ≥ A`: `d₀ + ⌊log B / log(A/κ)⌋`.
pub fn degree_cutoff(fam: &FamilyId, b: u64, a: u64) -> Result<u32, FamilyError> {
    let t = regularity(fam);
    let k = t.kappa.as_f64();
    if (a as f64) <= k {
        return Err(FamilyError::AtooSmall { a, kappa: k });
    }
    if b <= 1 {
        return Ok(t.d0);
    }
    let r = (b as f64).ln() / ((a as f64) / k).ln();
    Ok(t.d0 + (r + 1e-9).floor() as u32)
}

fn mobius(n: u64) -> i32 {
    let f = crate::arith::factor_u64(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Ascending integer coefficients of the cyclotomic polynomial `φ_n`,
/// from `φ_n = ∏_{k | n} (t^k − 1)^{μ(n/k)}`.
pub fn cyclotomic_poly(n: u64) -> Vec<BigInt> {
    let divs: Vec<u64> = (1..=n).filter(|k| n % k == 0).collect();
    let mut p = vec![BigInt::one()];
    let mut dens = Vec::new();
    for &k in &divs {
        match mobius(n / k) {
            1 => {
                // multiply by t^k − 1
                let k = k as usize;
                let mut q = vec![BigInt::zero(); p.len() + k];
                for (i, c) in p.iter().enumerate() {
                    q[i] -= c;
                    q[i + k] += c;
                }
                p = q;
            }
            -1 => dens.push(k as usize),
            _ => {}
        }
    }
    for k in dens {
        // exact division by t^k − 1, from the top down
        let m = p.len() - k;
        let mut q = vec![BigInt::zero(); m];
        let mut rem = p;
        for i in (0..m).rev() {
            let c = rem[i + k].clone();
            rem[i] += &c;
            q[i] = c;
        }
        debug_assert!(rem[..k].iter().all(Zero::is_zero));
        p = q;
    }
    // normalize the sign so the leading coefficient is +1
    if p.last().is_some_and(|c| c.is_negative()) {
        p.iter_mut().for_each(|c| *c = -c.clone());
    }
    p
}

/// `Φ_n(X, Y) = Y^{φ(n)} φ_n(X/Y)`.
pub fn cyclotomic_form(n: u64) -> Result<BinaryForm, FamilyError> {
    if n == 0 {
        return Err(FamilyError::IndexOutOfRange("n must be positive".into()));
    }
    let asc = cyclotomic_poly(n);
    let coeffs = asc.into_iter().rev().map(BigRational::from_integer).collect();
    Ok(BinaryForm::new(coeffs)?)
}

fn quad_factor(mu: i64) -> BinaryForm {
    BinaryForm::from_ints(&[1, 0, mu]).unwrap()
}

/// `Q⁺_{d,ν} = ∏_{1≤n≤d+1, n≠ν} (X² + μ_n Y²)`, of degree `2d`.
pub fn qplus(d: u32, nu: u32, seq: &SquarefreeSequence) -> Result<BinaryForm, FamilyError> {
    q_family(d, nu, seq, 1)
}

/// `Q⁻_{d,ν} = ∏_{1≤n≤d+1, n≠ν} (X² − μ_n Y²)`, of degree `2d`.
pub fn qminus(d: u32, nu: u32, seq: &SquarefreeSequence) -> Result<BinaryForm, FamilyError> {
    q_family(d, nu, seq, -1)
}

fn q_family(d: u32, nu: u32, seq: &SquarefreeSequence, sign: i64) -> Result<BinaryForm, FamilyError> {
    if d < 2 || nu < 1 || nu > d + 1 {
        return Err(FamilyError::IndexOutOfRange(format!("need d >= 2 and 1 <= nu <= d+1, got d={d}, nu={nu}")));
    }
    let mu = seq.prefix(d as usize + 1)?;
    if sign < 0 && mu[0] < 2 {
        return Err(FamilyError::BadSequence("X^2 - Y^2 is split; the minus family needs mu_1 >= 2".into()));
    }
    let fs = (1..=d + 1)
        .filter(|&n| n != nu)
        .map(|n| quad_factor(sign * mu[n as usize - 1] as i64))
        .collect();
    Ok(BinaryForm::product(fs)?)
}

/// `L_{d,p} = (X − pY) ∏_{0≤n≤d−2} (X − nY)`.
pub fn lform(d: u32, p: u64) -> Result<BinaryForm, FamilyError> {
    if d < 5 {
        return Err(FamilyError::IndexOutOfRange(format!("L needs d >= 5, got {d}")));
    }
    if !is_prime(p) || p < d as u64 || p >= 2 * d as u64 {
        return Err(FamilyError::BadPrime { d: d as u64, p });
    }
    let mut fs = vec![BinaryForm::from_ints(&[1, -(p as i64)]).unwrap()];
    fs.extend((0..=d as i64 - 2).map(|n| BinaryForm::from_ints(&[1, -n]).unwrap()));
    Ok(BinaryForm::product(fs)?)
}

/// `aX^d + bY^d`.
pub fn binomial_form(e: &BinomialEntry) -> Result<BinaryForm, FamilyError> {
    let mut c = vec![BigRational::zero(); e.d as usize + 1];
    c[0] = BigRational::from_integer(e.a.into());
    c[e.d as usize] = BigRational::from_integer(e.b.into());
    Ok(BinaryForm::new(c)?)
}

fn is_dth_power(q: &BigRational, d: u32) -> bool {
    rational_dth_root(q, d).is_some()
}

/// Check the standing hypotheses on a binomial catalog: even `d ≥ 4`,
/// positive coefficients, and pairwise non-isomorphic entries.
pub fn validate_catalog(c: &[BinomialEntry]) -> Result<(), FamilyError> {
    for e in c {
        if e.d < 4 || e.d % 2 == 1 || e.a == 0 || e.b == 0 {
            return Err(FamilyError::BadCatalog(format!("entry {e:?}: need even d >= 4 and a, b >= 1")));
        }
    }
    for (i, e) in c.iter().enumerate() {
        for f in &c[i + 1..] {
            if e.d != f.d {
                continue;
            }
            if (e.a, e.b) == (f.a, f.b) {
                return Err(FamilyError::BadCatalog(format!("duplicate entry {e:?}")));
            }
            let q = |x: u64, y: u64| ratio(x as i64, y as i64);
            let same = is_dth_power(&q(e.a, f.a), e.d) && is_dth_power(&q(e.b, f.b), e.d);
            let swapped = is_dth_power(&q(e.a, f.b), e.d) && is_dth_power(&q(e.b, f.a), e.d);
            if same || swapped {
                return Err(FamilyError::BadCatalog(format!("{e:?} and {f:?} give isomorphic forms")));
            }
        }
    }
    Ok(())
}

/// Cyclotomic indices of the family members of degree `d`.
pub fn cyclotomic_indices(d: u32) -> Vec<u64> {
    if d < 4 {
        return Vec::new();
    }
    // φ(n) ≥ sqrt(n/2), so n ≤ 2d².
    let bound = 2 * (d as u64) * (d as u64) + 2;
    let mut phi: Vec<u64> = (0..=bound).collect();
    for p in 2..=bound as usize {
        if phi[p] == p as u64 {
            for k in (p..=bound as usize).step_by(p) {
                phi[k] -= phi[k] / p as u64;
            }
        }
    }
    (1..=bound).filter(|&n| n % 4 != 2 && phi[n as usize] == d as u64).collect()
}

/// Primes `p` with `d ≤ p < 2d`.
pub fn l_primes(d: u32) -> Vec<u64> {
    (d as u64..2 * d as u64).filter(|&p| is_prime(p)).collect()
}

/// All members of exact degree `d`, in canonical order.
pub fn members(fam: &FamilyId, d: u32) -> Result<Vec<BinaryForm>, FamilyError> {
    match fam {
        FamilyId::Cyclotomic => cyclotomic_indices(d).into_iter().map(cyclotomic_form).collect(),
        FamilyId::Binomial(c) => {
            let mut es: Vec<&BinomialEntry> = c.iter().filter(|e| e.d == d).collect();
            es.sort_by_key(|e| (e.a, e.b));
            es.into_iter().map(binomial_form).collect()
        }
        FamilyId::QPlus(s) | FamilyId::QMinus(s) => {
            if d < 4 || d % 2 == 1 {
                return Ok(Vec::new());
            }
            if s.variant == SeqVariant::Custom && s.values().len() < (d / 2 + 1) as usize {
                return Ok(Vec::new());
            }
            let plus = matches!(fam, FamilyId::QPlus(_));
            (1..=d / 2 + 1)
                .map(|nu| if plus { qplus(d / 2, nu, s) } else { qminus(d / 2, nu, s) })
                .collect()
        }
        FamilyId::Lfamily => {
            if d < 5 {
                return Ok(Vec::new());
            }
            l_primes(d).into_iter().map(|p| lform(d, p)).collect()
        }
    }
}

/// Outcome of an exhaustive check of condition (v).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionVReport {
    pub family: String,
    pub dmax: u32,
    pub box_size: i64,
    pub forms_checked: usize,
    pub points_checked: u64,
    pub pass: bool,
    /// Smallest value of `log(κ^{d−d₀}|F|) − log(max^{d−d₀})` seen.
    pub min_log_margin: f64,
    pub counterexample: Option<ConditionVWitness>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionVWitness {
    pub form: String,
    pub x: i64,
    pub y: i64,
    pub value: String,
}

/// Lower rational bound for `e`, used to certify irrational-`κ` checks.
fn e_lower() -> BigRational {
    BigRational::new(BigInt::from(271_828_182_845i64), BigInt::from(100_000_000_000i64))
}

/// How a single point compares with `max^e ≤ κ^e |F|` (strict when asked).
struct PointCheck {
    ok: bool,
    margin: f64,
}

fn check_point(value: CappedInteger, m: i64, e: u32, kappa: &Kappa, kappa_lo: &Option<BigRational>, strict: bool) -> PointCheck {
    let abs_f = match value {
        CappedInteger::Exact(v) => v.unsigned_abs(),
        CappedInteger::OverCap { .. } => {
            return PointCheck { ok: true, margin: f64::INFINITY };
        }
    };
    let k = kappa.as_f64();
    let margin = (abs_f as f64).ln() + e as f64 * (k.ln() - (m as f64).ln());
    let rational = match kappa {
        Kappa::Rational(q) => Some(q.clone()),
        Kappa::Real { .. } => None,
    };
    if let Some(q) = rational.or_else(|| kappa_lo.clone()) {
        // exact: max^e · den^e  vs  num^e · |F|
        let lhs = BigInt::from(m).pow(e) * q.denom().pow(e);
        let rhs = q.numer().pow(e) * BigInt::from(abs_f);
        let ok = if strict { lhs < rhs } else { lhs <= rhs };
        if ok || rational_is_exact(kappa) {
            return PointCheck { ok, margin };
        }
    }
    // irrational κ and the rational lower bound was not enough
    PointCheck { ok: if strict { margin > 1e-9 } else { margin >= -1e-9 }, margin }
}

fn rational_is_exact(k: &Kappa) -> bool {
    matches!(k, Kappa::Rational(_))
}

/// Check condition (v) for one form on `[−box, box]²`, points with
/// `F ≠ 0` and `max ≥ A`.
pub fn check_condition_v_form(f: &BinaryForm, t: &RegularityTuple, box_size: i64, strict: bool) -> (u64, f64, Option<(i64, i64, i128)>) {
    let d = f.degree() as u32;
    let e = d - t.d0;
    let kappa_lo = match &t.kappa {
        Kappa::Real { expr, value } if expr.starts_with("2e*") => {
            let lam = parse_rational(&expr[3..]).unwrap_or_else(|| rat(2));
            let lo = rat(2) * e_lower() * lam;
            debug_assert!(rational_to_f64(&lo) <= *value);
            Some(lo)
        }
        _ => None,
    };
    let a = t.a as i64;
    let rows: Vec<(u64, f64, Option<(i64, i64, i128)>)> = (0..=box_size)
        .into_par_iter()
        .map(|y| {
            let mut n = 0u64;
            let mut margin = f64::INFINITY;
            let xs = if y == 0 { 0..=box_size } else { -box_size..=box_size };
            for x in xs {
                let m = x.abs().max(y);
                if m < a {
                    continue;
                }
                let v = f.evaluate(x, y, DEFAULT_CAP).expect("family members are integral");
                if v == CappedInteger::Exact(0) {
                    continue;
                }
                n += 1;
                let pc = check_point(v, m, e, &t.kappa, &kappa_lo, strict);
                margin = margin.min(pc.margin);
                if !pc.ok {
                    return (n, margin, Some((x, y, v.exact().unwrap_or(i128::MAX))));
                }
            }
            (n, margin, None)
        })
        .collect();
    let pts = rows.iter().map(|r| r.0).sum();
    let margin = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let bad = rows.into_iter().find_map(|r| r.2);
    (pts, margin, bad)
}

/// Exhaustive check of condition (v) over all members of degree at most
/// `dmax`. For `Q⁻` the inequality is checked strictly, as stated for
/// that family.
pub fn check_condition_v(fam: &FamilyId, dmax: u32, box_size: i64) -> Result<ConditionVReport, FamilyError> {
    let t = regularity(fam);
    let strict = matches!(fam, FamilyId::QMinus(_));
    let mut report = ConditionVReport {
        family: fam.to_string(),
        dmax,
        box_size,
        forms_checked: 0,
        points_checked: 0,
        pass: true,
        min_log_margin: f64::INFINITY,
        counterexample: None,
    };
    for d in fam.min_degree()..=dmax {
        if !t.applies_to(d) {
            continue;
        }
        for f in members(fam, d)? {
            let (pts, margin, bad) = check_condition_v_form(&f, &t, box_size, strict);
            report.forms_checked += 1;
            report.points_checked += pts;
            report.min_log_margin = report.min_log_margin.min(margin);
            if let Some((x, y, v)) = bad {
                report.pass = false;
                report.counterexample = Some(ConditionVWitness { form: f.to_string(), x, y, value: v.to_string() });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// Parse a member spec such as `qplus:d=2,nu=3`, `qminus:d=2,nu=3`,
/// `L:d=5,p=7`, `cyclo:n=12` or `binom:a=1,b=2,d=4`.
pub fn parse_member(spec: &str) -> Result<BinaryForm, FamilyError> {
    let err = || FamilyError::Parse(spec.to_string());
    let (kind, rest) = spec.split_once(':').ok_or_else(err)?;
    let mut kv = std::collections::HashMap::new();
    for part in rest.split(',') {
        let (k, v) = part.split_once('=').ok_or_else(err)?;
        let v: u64 = v.trim().parse().map_err(|_| err())?;
        kv.insert(k.trim().to_string(), v);
    }
    let get = |k: &str| kv.get(k).copied().ok_or_else(err);
    let small = |v: u64| u32::try_from(v).map_err(|_| err());
    match kind.trim() {
        "qplus" => qplus(small(get("d")?)?, small(get("nu")?)?, &SquarefreeSequence::full()),
        "qminus" => qminus(small(get("d")?)?, small(get("nu")?)?, &SquarefreeSequence::shifted()),
        "L" | "l" => lform(small(get("d")?)?, get("p")?),
        "cyclo" => cyclotomic_form(get("n")?),
        "binom" => binomial_form(&BinomialEntry { a: get("a")?, b: get("b")?, d: small(get("d")?)? }),
        _ => Err(err()),
    }
}

/// Canonical name of a small positive integer exponent, for reports.
pub fn describe_tuple(t: &RegularityTuple) -> String {
    format!("({},{},{},{},{})", t.a, t.a1, t.d0, t.d1, t.kappa)
}

/// `|F|` at `(x, y)` as `f64`-friendly log, for diagnostics.
pub fn log_abs_value(f: &BinaryForm, x: i64, y: i64) -> f64 {
    let v = f.evaluate_big(&BigInt::from(x), &BigInt::from(y));
    let n = v.numer().to_f64().unwrap_or(f64::INFINITY).abs();
    n.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{euler_phi, primes_below};

    #[test]
    fn squarefree_sequence_values() {
        let s = squarefree_prefix(11);
        assert_eq!(s.values(), &[1, 2, 3, 5, 6, 7, 10, 11, 13, 14, 15]);
        assert_eq!(s.values()[6], 10);
        let big = squarefree_prefix(1000);
        assert_eq!(big.values()[229], 381);
        assert_eq!(big.lambda, ratio(381, 230));
        assert_eq!(squarefree_prefix(1).values(), &[1]);
    }

    #[test]
    fn shifted_sequence_respects_lambda_two() {
        let s = SquarefreeSequence::shifted();
        let v = s.prefix(500).unwrap();
        assert_eq!(&v[..4], &[2, 3, 5, 6]);
        assert!(SquarefreeSequence::custom(vec![1, 4], rat(3)).is_err());
        assert!(SquarefreeSequence::custom(vec![1, 5], rat(2)).is_err());
    }

    #[test]
    fn cyclotomic_examples() {
        assert_eq!(cyclotomic_form(4).unwrap(), BinaryForm::from_ints(&[1, 0, 1]).unwrap());
        assert_eq!(cyclotomic_form(3).unwrap(), BinaryForm::from_ints(&[1, 1, 1]).unwrap());
        assert_eq!(cyclotomic_form(12).unwrap(), BinaryForm::from_ints(&[1, 0, -1, 0, 1]).unwrap());
        for p in primes_below(100) {
            let f = cyclotomic_form(p).unwrap();
            assert_eq!(f.evaluate(1, 1, DEFAULT_CAP).unwrap(), CappedInteger::Exact(p as i128));
        }
        for n in 1..60 {
            let f = cyclotomic_form(n).unwrap();
            assert_eq!(f.degree() as u64, euler_phi(n));
            assert!(f.in_bin());
        }
    }

    #[test]
    fn q_family_examples() {
        let s = SquarefreeSequence::full();
        assert_eq!(qplus(2, 3, &s).unwrap(), BinaryForm::from_ints(&[1, 0, 3, 0, 2]).unwrap());
        assert_eq!(qplus(2, 2, &s).unwrap().evaluate(1, 1, DEFAULT_CAP).unwrap(), CappedInteger::Exact(8));
        let m = qminus(2, 3, &SquarefreeSequence::shifted()).unwrap();
        assert_eq!(m, BinaryForm::from_ints(&[1, 0, -5, 0, 6]).unwrap());
        assert!(matches!(qminus(2, 1, &s), Err(FamilyError::BadSequence(_))));
        assert!(matches!(qplus(2, 4, &s), Err(FamilyError::IndexOutOfRange(_))));
    }

    #[test]
    fn l_family_examples() {
        let l = lform(5, 5).unwrap();
        assert_eq!(l.evaluate(4, 1, DEFAULT_CAP).unwrap(), CappedInteger::Exact(-24));
        assert_eq!(l.evaluate(1, 0, DEFAULT_CAP).unwrap(), CappedInteger::Exact(1));
        assert!(matches!(lform(5, 11), Err(FamilyError::BadPrime { .. })));
        assert!(matches!(lform(5, 9), Err(FamilyError::BadPrime { .. })));
        let names: Vec<_> = members(&FamilyId::Lfamily, 5).unwrap();
        assert_eq!(names, vec![lform(5, 5).unwrap(), lform(5, 7).unwrap()]);
    }

    #[test]
    fn member_counts() {
        assert_eq!(members(&FamilyId::qplus(), 4).unwrap().len(), 3);
        assert!(members(&FamilyId::qplus(), 5).unwrap().is_empty());
        assert_eq!(members(&FamilyId::Cyclotomic, 4).unwrap().len(), 3); // n = 5, 8, 12
        for d in 3..=40u32 {
            for fam in [FamilyId::qplus(), FamilyId::qminus(), FamilyId::Lfamily, FamilyId::Cyclotomic] {
                let ms = members(&fam, d).unwrap();
                let a1 = regularity(&fam).a1 as u32;
                assert!(ms.len() as u64 <= (d as u64).pow(a1), "{fam} degree {d}");
                for (i, f) in ms.iter().enumerate() {
                    assert!(f.in_bin());
                    assert!(ms[i + 1..].iter().all(|g| g != f));
                }
            }
        }
    }

    #[test]
    fn tuples_and_cutoffs() {
        assert_eq!(regularity(&FamilyId::qminus()).a, 11);
        assert_eq!(degree_cutoff(&FamilyId::Lfamily, 10, 10).unwrap(), 22);
        assert_eq!(degree_cutoff(&FamilyId::qplus(), 1_000_000, 2).unwrap(), 19);
        assert_eq!(degree_cutoff(&FamilyId::qplus(), 1, 2).unwrap(), 0);
        assert!(degree_cutoff(&FamilyId::Lfamily, 10, 9).is_err());
        let t = regularity(&FamilyId::Lfamily);
        assert_eq!(t.box_radius(5, 10), 17);
    }

    #[test]
    fn catalog_validation() {
        let e = |a, b, d| BinomialEntry { a, b, d };
        assert!(validate_catalog(&[e(1, 1, 4), e(1, 2, 4)]).is_ok());
        assert!(validate_catalog(&[e(1, 2, 4), e(2, 1, 4)]).is_err());
        assert!(validate_catalog(&[e(1, 1, 4), e(16, 81, 4)]).is_err());
        assert!(validate_catalog(&[e(1, 1, 3)]).is_err());
    }

    #[test]
    fn condition_v_small_boxes() {
        assert!(check_condition_v(&FamilyId::Lfamily, 6, 40).unwrap().pass);
        assert!(check_condition_v(&FamilyId::qplus(), 8, 30).unwrap().pass);
        assert!(check_condition_v(&FamilyId::qminus(), 6, 40).unwrap().pass);
    }

    #[test]
    fn binomial_counterexamples_fail_the_lower_bound() {
        // X^d − (d^d − d) Y^d takes the value d at (d, 1).
        for d in [4u32, 6] {
            let dd = (d as i64).pow(d) - d as i64;
            let mut c = vec![0i64; d as usize + 1];
            c[0] = 1;
            c[d as usize] = -dd;
            let f = BinaryForm::from_ints(&c).unwrap();
            let t = RegularityTuple::new(2, 1, 0, 4, Kappa::Rational(rat(1))).unwrap();
            let (_, _, bad) = check_condition_v_form(&f, &t, d as i64 + 1, false);
            assert!(bad.is_some());
        }
        let d = 5u32;
        let mut c = vec![0i64; 6];
        c[0] = 1;
        c[5] = 5i64.pow(5) - 5;
        let f = BinaryForm::from_ints(&c).unwrap();
        let t = RegularityTuple::new(2, 1, 0, 4, Kappa::Rational(rat(1))).unwrap();
        assert!(check_condition_v_form(&f, &t, d as i64 + 1, false).2.is_some());
    }

    #[test]
    fn parse_specs() {
        assert_eq!(parse_member("qplus:d=2,nu=3").unwrap(), BinaryForm::from_ints(&[1, 0, 3, 0, 2]).unwrap());
        assert_eq!(parse_member("L:d=5,p=7").unwrap(), lform(5, 7).unwrap());
        assert_eq!(parse_member("cyclo:n=12").unwrap(), cyclotomic_form(12).unwrap());
        assert_eq!(parse_member("binom:a=1,b=2,d=4").unwrap(), BinaryForm::from_ints(&[1, 0, 0, 0, 2]).unwrap());
        assert!(parse_member("nope:d=1").is_err());
    }
}
