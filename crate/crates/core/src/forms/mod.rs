//! Binary forms `F(X,Y) = Σ c_i X^{d-i} Y^i` with exact rational
//! coefficients: construction, capped evaluation, discriminant,
//! composition with rational matrices, and root extraction.

mod matrix;
mod roots;

pub use matrix::RationalMatrix;
pub use roots::{root_proximity_constants, ExactRoot, ProjPoint, RootSet};

use crate::arith::{denominator_lcm, parse_rational, rational_to_f64, rational_to_string};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Default evaluation cap, `2^126`.
pub const DEFAULT_CAP: u128 = 1u128 << 126;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error("coefficient list is empty or identically zero")]
    EmptyOrZero,
    #[error("form does not have integer coefficients")]
    NonIntegralForm,
    #[error("degree {0} is too small for this operation")]
    DegreeTooSmall(usize),
    #[error("form has a repeated projective root")]
    RepeatedRoot,
    #[error("polynomial root solver did not converge")]
    NumericFailure,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("cannot parse form: {0}")]
    Parse(String),
}

/// Result of evaluating a form under a magnitude cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CappedInteger {
    Exact(i128),
    /// `|F(x,y)|` exceeds the cap; the flag records the sign.
    OverCap { positive: bool },
}

impl CappedInteger {
    pub fn exact(self) -> Option<i128> {
        match self {
            CappedInteger::Exact(v) => Some(v),
            CappedInteger::OverCap { .. } => None,
        }
    }
}

#[derive(Clone)]
pub struct BinaryForm {
    coeffs: Vec<BigRational>,
    integral: bool,
    nonzero_disc: bool,
    small: Option<Vec<i128>>,
    factors: Option<Vec<BinaryForm>>,
}

impl PartialEq for BinaryForm {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}
impl Eq for BinaryForm {}

impl fmt::Debug for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryForm({self})")
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = match (d - i, i) {
                (0, 0) => String::new(),
                (a, 0) => pow_str("X", a),
                (0, b) => pow_str("Y", b),
                (a, b) => format!("{}{}", pow_str("X", a), pow_str("Y", b)),
            };
            let neg = c.is_negative();
            let mag = c.abs();
            let coef = if mag.is_one() && !mono.is_empty() {
                String::new()
            } else if mag.denom().is_one() {
                mag.numer().to_string()
            } else {
                format!("({})", rational_to_string(&mag))
            };
            let sep = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            write!(f, "{sep}{coef}{mono}")?;
            first = false;
        }
        Ok(())
    }
}

fn pow_str(v: &str, e: usize) -> String {
    if e == 1 {
        v.to_string()
    } else {
        format!("{v}^{e}")
    }
}

impl BinaryForm {
    /// Build a form from `c_0..c_d`.
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self, FormError> {
        if coeffs.iter().all(|c| c.is_zero()) {
            return Err(FormError::EmptyOrZero);
        }
        if coeffs.len() < 2 {
            return Err(FormError::DegreeTooSmall(0));
        }
        let integral = coeffs.iter().all(|c| c.is_integer());
        let small = if integral {
            coeffs.iter().map(|c| c.numer().to_i128()).collect()
        } else {
            None
        };
        let nonzero_disc = disc_nonzero(&coeffs);
        Ok(BinaryForm { coeffs, integral, nonzero_disc, small, factors: None })
    }

    pub fn from_ints(coeffs: &[i64]) -> Result<Self, FormError> {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    /// Product of the given forms, remembering the factorisation.
    pub fn product(factors: Vec<BinaryForm>) -> Result<Self, FormError> {
        let mut acc: Vec<BigRational> = vec![BigRational::one()];
        for f in &factors {
            acc = hmul(&acc, &f.coeffs);
        }
        let mut out = Self::new(acc)?;
        out.factors = Some(factors);
        Ok(out)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_integral(&self) -> bool {
        self.integral
    }

    pub fn has_nonzero_disc(&self) -> bool {
        self.nonzero_disc
    }

    /// Membership in `Bin(d, ℤ)`.
    pub fn in_bin(&self) -> bool {
        self.integral && self.nonzero_disc
    }

    /// Known factorisation (product equals `self` exactly), if any.
    pub fn factors(&self) -> Option<&[BinaryForm]> {
        self.factors.as_deref()
    }

    /// Integer coefficients, when integral.
    pub fn int_coeffs(&self) -> Option<Vec<BigInt>> {
        self.integral.then(|| self.coeffs.iter().map(|c| c.numer().clone()).collect())
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational_to_f64).collect()
    }

    /// `F(1, 0) = c_0`.
    pub fn leading(&self) -> &BigRational {
        &self.coeffs[0]
    }

    pub fn scale(&self, c: &BigRational) -> Result<Self, FormError> {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &BinaryForm) -> Result<Self, FormError> {
        let mut fs = self.factors.clone().unwrap_or_else(|| vec![self.without_factors()]);
        fs.extend(other.factors.clone().unwrap_or_else(|| vec![other.without_factors()]));
        Self::product(fs)
    }

    fn without_factors(&self) -> Self {
        let mut s = self.clone();
        s.factors = None;
        s
    }

    /// Exact value at rational or integer points.
    pub fn evaluate_big(&self, x: &BigInt, y: &BigInt) -> BigRational {
        let mut acc = BigRational::zero();
        let mut ypow = BigInt::one();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                ypow *= y;
            }
            acc = acc * BigRational::from_integer(x.clone()) + c * BigRational::from_integer(ypow.clone());
        }
        acc
    }

    /// Exact value at a rational point `(x, y)`.
    pub fn evaluate_rational(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        let mut ypow = BigRational::one();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                ypow *= y;
            }
            acc = acc * x + c * &ypow;
        }
        acc
    }

    pub fn evaluate_f64(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        let mut ypow = 1.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                ypow *= y;
            }
            acc = acc * x + rational_to_f64(c) * ypow;
        }
        acc
    }

    /// Value `F(x, y)` with saturation at `cap` (at most `i128::MAX`).
    pub fn evaluate(&self, x: i64, y: i64, cap: u128) -> Result<CappedInteger, FormError> {
        if !self.integral {
            return Err(FormError::NonIntegralForm);
        }
        let cap = cap.min(i128::MAX as u128);
        if let Some(fs) = &self.factors {
            if fs.iter().all(|f| f.small.is_some()) {
                return Ok(eval_factored(fs, x, y, cap));
            }
        }
        if let Some(c) = &self.small {
            if let Some(v) = horner_i128(c, x as i128, y as i128) {
                return Ok(saturate(v, cap));
            }
        }
        let v = self.evaluate_big(&BigInt::from(x), &BigInt::from(y));
        Ok(saturate_big(v.numer(), cap))
    }

    /// Discriminant of the form; zero iff a projective root is repeated.
    pub fn discriminant(&self) -> Result<BigRational, FormError> {
        let d = self.degree();
        if d < 2 {
            return Err(FormError::DegreeTooSmall(d));
        }
        let sheared = shear_nonzero_lead(&self.coeffs);
        let l = denominator_lcm(&sheared);
        let ints: Vec<BigInt> = sheared.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
        let disc = integer_discriminant(&ints);
        Ok(BigRational::new(disc, l.pow(2 * d as u32 - 2)))
    }

    /// `(F∘γ)(X,Y) = F(a₁X + a₂Y, a₃X + a₄Y)`.
    pub fn compose(&self, g: &RationalMatrix) -> BinaryForm {
        let coeffs = compose_coeffs(&self.coeffs, g);
        let mut out = BinaryForm::new(coeffs).expect("composition with an invertible matrix is nonzero");
        if let Some(fs) = &self.factors {
            out.factors = Some(fs.iter().map(|f| f.compose(g)).collect());
        }
        out
    }

    /// Coefficients of `f(t) = F(t, 1)` in descending powers of `t`
    /// (length `d + 1`, leading entries may vanish).
    pub fn dehomogenize(&self) -> Vec<BigRational> {
        self.coeffs.clone()
    }

    /// Whether `F` vanishes at some point of `ℙ¹(ℝ)`.
    pub fn has_real_projective_root(&self) -> Result<bool, FormError> {
        Ok(self.roots(1e-12)?.points.iter().any(|p| p.is_real(1e-9)))
    }

    /// The projective roots with exact tags where available.
    pub fn roots(&self, tol: f64) -> Result<RootSet, FormError> {
        roots::roots(self, tol)
    }

    /// Same form with its coefficient order reversed: `F(Y, X)`.
    pub fn swap_xy(&self) -> BinaryForm {
        self.compose(&RationalMatrix::from_ints(0, 1, 1, 0).unwrap())
    }
}

impl Serialize for BinaryForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            coeffs: Vec<String>,
        }
        Repr { coeffs: self.coeffs.iter().map(rational_to_string).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BinaryForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            coeffs: Vec<serde_json_value::Coeff>,
        }
        let r = Repr::deserialize(d)?;
        let cs: Option<Vec<BigRational>> = r.coeffs.iter().map(|c| parse_rational(&c.0)).collect();
        let cs = cs.ok_or_else(|| serde::de::Error::custom("bad rational coefficient"))?;
        BinaryForm::new(cs).map_err(serde::de::Error::custom)
    }
}

mod serde_json_value {
    use serde::{Deserialize, Deserializer};

    /// Coefficient given either as a string or as a bare integer.
    pub struct Coeff(pub String);

    impl<'de> Deserialize<'de> for Coeff {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            #[derive(Deserialize)]
            #[serde(untagged)]
            enum Raw {
                S(String),
                I(i64),
            }
            Ok(Coeff(match Raw::deserialize(d)? {
                Raw::S(s) => s,
                Raw::I(i) => i.to_string(),
            }))
        }
    }
}

/// `make_form` as a free function.
pub fn make_form(coeffs: Vec<BigRational>) -> Result<BinaryForm, FormError> {
    BinaryForm::new(coeffs)
}

/// Product of homogeneous coefficient vectors.
pub(crate) fn hmul<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Clone + Zero + for<'x> std::ops::AddAssign<&'x T>,
    for<'x> &'x T: std::ops::Mul<&'x T, Output = T>,
{
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += &(x * y);
        }
    }
    out
}

fn compose_coeffs(coeffs: &[BigRational], g: &RationalMatrix) -> Vec<BigRational> {
    let d = coeffs.len() - 1;
    // Work over the integers: F = Fi / L and γ = Γ / D.
    let l = denominator_lcm(coeffs);
    let den = denominator_lcm(g.entries());
    let scale = |q: &BigRational, s: &BigInt| (q * BigRational::from_integer(s.clone())).to_integer();
    let fi: Vec<BigInt> = coeffs.iter().map(|c| scale(c, &l)).collect();
    let [a1, a2, a3, a4] = g.entries().clone().map(|e| scale(&e, &den));
    let l1 = [a1, a2];
    let l2 = [a3, a4];
    let mut p1 = vec![vec![BigInt::one()]];
    let mut p2 = vec![vec![BigInt::one()]];
    for k in 0..d {
        p1.push(hmul(&p1[k], &l1));
        p2.push(hmul(&p2[k], &l2));
    }
    let mut acc = vec![BigInt::zero(); d + 1];
    for (i, c) in fi.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = hmul(&p1[d - i], &p2[i]);
        for (k, t) in term.iter().enumerate() {
            acc[k] += c * t;
        }
    }
    let denom = l * den.pow(d as u32);
    acc.into_iter().map(|c| BigRational::new(c, denom.clone())).collect()
}

/// Apply a unimodular shear `(X, Y) ↦ (X, kX + Y)` so that `c_0 ≠ 0`.
pub(crate) fn shear_nonzero_lead(coeffs: &[BigRational]) -> Vec<BigRational> {
    if !coeffs[0].is_zero() {
        return coeffs.to_vec();
    }
    let d = coeffs.len() - 1;
    for k in 1..=(d as i64 + 1) {
        let g = RationalMatrix::from_ints(1, 0, k, 1).unwrap();
        let c = compose_coeffs(coeffs, &g);
        if !c[0].is_zero() {
            return c;
        }
    }
    unreachable!("a nonzero form of degree d has at most d roots")
}

fn horner_i128(c: &[i128], x: i128, y: i128) -> Option<i128> {
    let mut acc = c[0];
    let mut ypow: i128 = 1;
    for &ci in &c[1..] {
        ypow = ypow.checked_mul(y)?;
        acc = acc.checked_mul(x)?.checked_add(ci.checked_mul(ypow)?)?;
    }
    Some(acc)
}

fn saturate(v: i128, cap: u128) -> CappedInteger {
    if v.unsigned_abs() > cap {
        CappedInteger::OverCap { positive: v > 0 }
    } else {
        CappedInteger::Exact(v)
    }
}

fn saturate_big(v: &BigInt, cap: u128) -> CappedInteger {
    match v.to_i128() {
        Some(x) => saturate(x, cap),
        None => CappedInteger::OverCap { positive: v.is_positive() },
    }
}

fn eval_factored(fs: &[BinaryForm], x: i64, y: i64, cap: u128) -> CappedInteger {
    let mut vals = Vec::with_capacity(fs.len());
    for f in fs {
        let c = f.small.as_ref().unwrap();
        match horner_i128(c, x as i128, y as i128) {
            Some(0) => return CappedInteger::Exact(0),
            Some(v) => vals.push(Some(v)),
            None => vals.push(None),
        }
    }
    if vals.iter().any(|v| v.is_none()) {
        let mut sign = true;
        for (f, v) in fs.iter().zip(&vals) {
            let pos = match v {
                Some(v) => *v > 0,
                None => f.evaluate_big(&BigInt::from(x), &BigInt::from(y)).is_positive(),
            };
            sign ^= !pos;
        }
        return CappedInteger::OverCap { positive: sign };
    }
    let mut acc: i128 = 1;
    let mut over = false;
    let mut sign = true;
    for v in vals.into_iter().flatten() {
        sign ^= v < 0;
        if !over {
            match acc.checked_mul(v) {
                Some(p) if p.unsigned_abs() <= cap => acc = p,
                _ => over = true,
            }
        }
    }
    if over {
        CappedInteger::OverCap { positive: sign }
    } else {
        CappedInteger::Exact(acc)
    }
}

/// Sylvester matrix of `f` and `f'` for `f` given in descending powers.
fn sylvester_ff(f: &[BigInt]) -> Vec<Vec<BigInt>> {
    let d = f.len() - 1;
    let fp: Vec<BigInt> = f[..d].iter().enumerate().map(|(i, c)| c * BigInt::from(d - i)).collect();
    let n = 2 * d - 1;
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for r in 0..d - 1 {
        for (j, c) in f.iter().enumerate() {
            m[r][r + j] = c.clone();
        }
    }
    for r in 0..d {
        for (j, c) in fp.iter().enumerate() {
            m[d - 1 + r][r + j] = c.clone();
        }
    }
    m
}

/// Fraction-free Bareiss determinant.
pub(crate) fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Discriminant of an integer polynomial with nonzero leading coefficient.
fn integer_discriminant(f: &[BigInt]) -> BigInt {
    let d = f.len() - 1;
    if d == 1 {
        return BigInt::one();
    }
    let res = bareiss_det(sylvester_ff(f));
    let (q, r) = res.div_rem(&f[0]);
    debug_assert!(r.is_zero());
    if (d * (d - 1) / 2) % 2 == 1 {
        -q
    } else {
        q
    }
}

const DISC_PRIMES: [u64; 3] = [2_305_843_009_213_693_951, 4_611_686_018_427_387_847, 1_152_921_504_606_846_883];

fn mod_p(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().unwrap()
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    r
}

fn det_mod(mut m: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = m.len();
    let mut det = 1u64;
    for k in 0..n {
        let Some(r) = (k..n).find(|&r| m[r][k] != 0) else {
            return 0;
        };
        if r != k {
            m.swap(r, k);
            det = (p - det) % p;
        }
        det = ((det as u128 * m[k][k] as u128) % p as u128) as u64;
        let inv = inv_mod(m[k][k], p);
        for i in k + 1..n {
            if m[i][k] == 0 {
                continue;
            }
            let f = ((m[i][k] as u128 * inv as u128) % p as u128) as u64;
            for j in k..n {
                let sub = ((f as u128 * m[k][j] as u128) % p as u128) as u64;
                m[i][j] = (m[i][j] + p - sub) % p;
            }
        }
    }
    det
}

/// Decide `disc ≠ 0`, first modulo large primes, then exactly.
fn disc_nonzero(coeffs: &[BigRational]) -> bool {
    let d = coeffs.len() - 1;
    if d < 2 {
        return true;
    }
    let sheared = shear_nonzero_lead(coeffs);
    let l = denominator_lcm(&sheared);
    let ints: Vec<BigInt> = sheared.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
    let syl = sylvester_ff(&ints);
    for &p in &DISC_PRIMES {
        if mod_p(&ints[0], p) == 0 {
            continue;
        }
        let mm: Vec<Vec<u64>> = syl.iter().map(|row| row.iter().map(|x| mod_p(x, p)).collect()).collect();
        if det_mod(mm, p) != 0 {
            return true;
        }
    }
    !integer_discriminant(&ints).is_zero()
}
