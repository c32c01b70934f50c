//! Projective roots of binary forms: numeric (Aberth–Ehrlich) with exact
//! recognition of rational and quadratic-surd roots.

use super::{BinaryForm, FormError};
use crate::arith::{best_rational, denominator_lcm, rational_to_f64, squarefree_decompose};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A point of `ℙ¹(ℂ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjPoint {
    Finite(Complex64),
    Infinity,
}

impl ProjPoint {
    pub fn is_real(&self, tol: f64) -> bool {
        match self {
            ProjPoint::Infinity => true,
            ProjPoint::Finite(z) => z.im.abs() <= tol * (1.0 + z.norm()),
        }
    }

    pub fn finite(&self) -> Option<Complex64> {
        match self {
            ProjPoint::Finite(z) => Some(*z),
            ProjPoint::Infinity => None,
        }
    }
}

/// Exact description of a root, when one is known.
///
/// `QuadraticSurd { r, s, m }` is `r + s√m` with `m` squarefree and
/// different from 1; a negative `m` stands for `r + s·i√|m|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExactRoot {
    Rational(BigRational),
    QuadraticSurd { r: BigRational, s: BigRational, m: BigInt },
    Infinity,
    NumericOnly,
}

impl ExactRoot {
    pub fn is_exact(&self) -> bool {
        !matches!(self, ExactRoot::NumericOnly)
    }

    /// Rational point of `ℙ¹(ℚ)` as projective coordinates.
    pub fn as_projective_rational(&self) -> Option<(BigRational, BigRational)> {
        match self {
            ExactRoot::Rational(q) => Some((q.clone(), BigRational::one())),
            ExactRoot::Infinity => Some((BigRational::one(), BigRational::zero())),
            _ => None,
        }
    }

    pub fn to_point(&self) -> Option<ProjPoint> {
        Some(match self {
            ExactRoot::Rational(q) => ProjPoint::Finite(Complex64::new(rational_to_f64(q), 0.0)),
            ExactRoot::Infinity => ProjPoint::Infinity,
            ExactRoot::QuadraticSurd { r, s, m } => {
                let r = rational_to_f64(r);
                let s = rational_to_f64(s);
                let m = m.to_f64()?;
                if m > 0.0 {
                    ProjPoint::Finite(Complex64::new(r + s * m.sqrt(), 0.0))
                } else {
                    ProjPoint::Finite(Complex64::new(r, s * (-m).sqrt()))
                }
            }
            ExactRoot::NumericOnly => return None,
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct RootSet {
    pub points: Vec<ProjPoint>,
    pub exact_tags: Vec<ExactRoot>,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn all_exact(&self) -> bool {
        self.exact_tags.iter().all(ExactRoot::is_exact)
    }

    /// All roots in `ℙ¹(ℚ)`?
    pub fn all_rational(&self) -> bool {
        self.exact_tags.iter().all(|t| matches!(t, ExactRoot::Rational(_) | ExactRoot::Infinity))
    }

    pub fn finite(&self) -> Vec<Complex64> {
        self.points.iter().filter_map(ProjPoint::finite).collect()
    }

    fn is_real_at(&self, i: usize) -> bool {
        match &self.exact_tags[i] {
            ExactRoot::Rational(_) | ExactRoot::Infinity => true,
            ExactRoot::QuadraticSurd { m, .. } => m.is_positive(),
            ExactRoot::NumericOnly => self.points[i].is_real(1e-9),
        }
    }

    /// Real finite roots, sorted.
    pub fn real_finite(&self) -> Vec<f64> {
        let mut v: Vec<f64> = (0..self.len())
            .filter(|&i| self.is_real_at(i))
            .filter_map(|i| self.points[i].finite().map(|z| z.re))
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    /// Finite roots that are not real.
    pub fn nonreal_finite(&self) -> Vec<Complex64> {
        (0..self.len())
            .filter(|&i| !self.is_real_at(i))
            .filter_map(|i| self.points[i].finite())
            .collect()
    }

    pub fn has_real(&self) -> bool {
        (0..self.len()).any(|i| self.is_real_at(i))
    }

    fn push(&mut self, tag: ExactRoot, point: ProjPoint) {
        self.points.push(point);
        self.exact_tags.push(tag);
    }
}

pub(super) fn roots(f: &BinaryForm, tol: f64) -> Result<RootSet, FormError> {
    if !f.has_nonzero_disc() {
        return Err(FormError::RepeatedRoot);
    }
    let mut out = RootSet::default();
    match f.factors() {
        Some(fs) => {
            for g in fs {
                piece_roots(g.coeffs(), tol, &mut out)?;
            }
        }
        None => piece_roots(f.coeffs(), tol, &mut out)?,
    }
    debug_assert_eq!(out.len(), f.degree());
    Ok(out)
}

fn piece_roots(c: &[BigRational], tol: f64, out: &mut RootSet) -> Result<(), FormError> {
    let d = c.len() - 1;
    if d == 0 {
        return Ok(());
    }
    if c[0].is_zero() {
        out.push(ExactRoot::Infinity, ProjPoint::Infinity);
        return piece_roots(&c[1..], tol, out);
    }
    match d {
        1 => {
            let q = -(&c[1] / &c[0]);
            let p = ProjPoint::Finite(Complex64::new(rational_to_f64(&q), 0.0));
            out.push(ExactRoot::Rational(q), p);
            Ok(())
        }
        2 => {
            for t in quadratic_roots(&c[0], &c[1], &c[2]) {
                let p = t.to_point().ok_or(FormError::NumericFailure)?;
                out.push(t, p);
            }
            Ok(())
        }
        _ => generic_roots(c, tol, out),
    }
}

/// Exact roots of `aT² + bT + c` with `a ≠ 0` and nonzero discriminant.
pub(crate) fn quadratic_roots(a: &BigRational, b: &BigRational, c: &BigRational) -> Vec<ExactRoot> {
    let disc = b * b - BigRational::from_integer(4.into()) * a * c;
    let two_a = a * BigRational::from_integer(2.into());
    let r = -(b / &two_a);
    let (sf, k) = squarefree_decompose(&(disc.numer() * disc.denom()));
    let coef = BigRational::new(k, disc.denom().clone()) / &two_a;
    if sf.is_one() {
        vec![ExactRoot::Rational(&r + &coef), ExactRoot::Rational(&r - &coef)]
    } else {
        vec![
            ExactRoot::QuadraticSurd { r: r.clone(), s: coef.clone(), m: sf.clone() },
            ExactRoot::QuadraticSurd { r, s: -coef, m: sf },
        ]
    }
}

fn primitive_integer(c: &[BigRational]) -> Vec<BigInt> {
    let l = denominator_lcm(c);
    let ints: Vec<BigInt> = c.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter().map(|x| x / &g).collect()
}

fn poly_eval_rational(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Division with remainder of descending-power polynomials.
fn poly_divrem(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    if num.len() <= dn {
        return (vec![BigRational::zero()], rem);
    }
    let qlen = num.len() - dn;
    let mut q = vec![BigRational::zero(); qlen];
    for i in 0..qlen {
        let coef = &rem[i] / &den[0];
        if !coef.is_zero() {
            for (j, dc) in den.iter().enumerate() {
                rem[i + j] -= &coef * dc;
            }
        }
        q[i] = coef;
    }
    (q, rem[qlen..].to_vec())
}

fn generic_roots(c: &[BigRational], tol: f64, out: &mut RootSet) -> Result<(), FormError> {
    let ints = primitive_integer(c);
    let fc: Vec<f64> = ints.iter().map(|x| x.to_f64().unwrap_or(f64::INFINITY)).collect();
    let numeric = if fc.iter().all(|x| x.is_finite()) {
        aberth(&fc, tol).ok_or(FormError::NumericFailure)?
    } else {
        return Err(FormError::NumericFailure);
    };
    let mut poly: Vec<BigRational> = ints.iter().cloned().map(BigRational::from_integer).collect();
    let mut pool = numeric;
    let max_den = |p: &[BigRational]| -> u64 {
        let l = primitive_integer(p)[0].abs();
        l.to_u64().unwrap_or(u64::MAX).clamp(1, 1_000_000_000_000)
    };

    // Rational roots.
    let mut i = 0;
    while i < pool.len() {
        let z = pool[i];
        if z.im.abs() <= 1e-6 * (1.0 + z.norm()) {
            if let Some(q) = best_rational(z.re, max_den(&poly)) {
                // the rounding must land on this root, not on a neighbour
                let near = (rational_to_f64(&q) - z.re).abs() <= 1e-6 * (1.0 + z.norm());
                if near && poly_eval_rational(&poly, &q).is_zero() {
                    let lin = vec![BigRational::one(), -q.clone()];
                    poly = poly_divrem(&poly, &lin).0;
                    pool.swap_remove(i);
                    let p = ProjPoint::Finite(Complex64::new(rational_to_f64(&q), 0.0));
                    out.push(ExactRoot::Rational(q), p);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Quadratic factors: conjugate pairs first, then real pairs.
    let mut found = true;
    while found && pool.len() >= 2 {
        found = false;
        'search: for a in 0..pool.len() {
            for b in a + 1..pool.len() {
                let (za, zb) = (pool[a], pool[b]);
                let conj = za.im.abs() > 1e-9 && (za - zb.conj()).norm() <= 1e-6 * (1.0 + za.norm());
                let both_real = za.im.abs() <= 1e-6 * (1.0 + za.norm()) && zb.im.abs() <= 1e-6 * (1.0 + zb.norm());
                if !conj && !both_real {
                    continue;
                }
                let md = max_den(&poly);
                let (sum, prod) = ((za + zb).re, (za * zb).re);
                let (Some(s), Some(p)) = (best_rational(sum, md), best_rational(prod, md)) else {
                    continue;
                };
                let close = |q: &BigRational, x: f64| (rational_to_f64(q) - x).abs() <= 1e-6 * (1.0 + x.abs());
                if !close(&s, sum) || !close(&p, prod) {
                    continue;
                }
                let quad = vec![BigRational::one(), -s, p];
                let (q, r) = poly_divrem(&poly, &quad);
                if r.iter().all(Zero::is_zero) {
                    poly = q;
                    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
                    pool.swap_remove(hi);
                    pool.swap_remove(lo);
                    for t in quadratic_roots(&quad[0], &quad[1], &quad[2]) {
                        let pt = t.to_point().ok_or(FormError::NumericFailure)?;
                        out.push(t, pt);
                    }
                    found = true;
                    break 'search;
                }
            }
        }
    }

    for z in pool {
        out.push(ExactRoot::NumericOnly, ProjPoint::Finite(z));
    }
    Ok(())
}

fn horner_c(p: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(p[0], 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for &c in &p[1..] {
        dv = dv * z + v;
        v = v * z + c;
    }
    (v, dv)
}

/// Simultaneous root iteration of Aberth–Ehrlich type for a real
/// polynomial in descending powers with nonzero leading coefficient.
pub(crate) fn aberth(p: &[f64], tol: f64) -> Option<Vec<Complex64>> {
    let n = p.len() - 1;
    let lead = p[0];
    let q: Vec<f64> = p.iter().map(|c| c / lead).collect();
    // Fujiwara bound on root moduli.
    let bound = (1..=n)
        .map(|i| (q[i].abs()).powf(1.0 / i as f64))
        .fold(0.0f64, f64::max)
        * 2.0;
    let r0 = bound.max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r0 * 0.5, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    let eps = tol.max(1e-15);
    let mut converged = false;
    for _ in 0..2000 {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let (v, dv) = horner_c(&q, z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[k] -= w;
                max_step = max_step.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < eps {
            converged = true;
            break;
        }
    }
    if !converged {
        // accept when the final residual is tiny relative to the scale
        let ok = z.iter().all(|&zk| {
            let (v, dv) = horner_c(&q, zk);
            (v / dv).norm() <= 1e-7 * (1.0 + zk.norm())
        });
        if !ok {
            return None;
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = horner_c(&q, *zk);
            if dv.norm() == 0.0 {
                break;
            }
            let step = v / dv;
            if step.is_finite() {
                *zk -= step;
            }
        }
        if zk.im.abs() <= 1e-13 * (1.0 + zk.norm()) {
            zk.im = 0.0;
        }
    }
    Some(z)
}

/// Constants `(c₁, c₂)` of the root-proximity lemma for `f = F(t, 1)`.
///
/// `c₂ = (2/δ)^{n−1}` with `δ` the minimal gap between finite roots
/// (shrunk by `1e-9`), divided by `|lead(f)|` when that is below 1 so the
/// bound `min_j |t − ξ_j| ≤ c₂ |f(t)|` holds for every complex `t`.
/// `c₁` is 1 when all finite roots are real, `|lead| ∏ |Im ξ|` when none
/// is (a lower bound for `inf_ℝ |f|`), and `min |Im ξ| / c₂` otherwise.
pub fn root_proximity_constants(f: &BinaryForm) -> Result<(f64, f64), FormError> {
    let d = f.degree();
    if d < 2 {
        return Err(FormError::DegreeTooSmall(d));
    }
    let rs = f.roots(1e-14)?;
    let finite = rs.finite();
    let n = finite.len();
    let c = f.coeffs();
    let lead = if c[0].is_zero() { &c[1] } else { &c[0] };
    let lead = rational_to_f64(lead).abs();
    let mut delta = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            delta = delta.min((finite[i] - finite[j]).norm());
        }
    }
    let c2 = if n <= 1 {
        1.0
    } else {
        (2.0 / (delta * (1.0 - 1e-9))).powi(n as i32 - 1)
    } * (1.0 / lead).max(1.0);
    let nonreal = rs.nonreal_finite();
    let c1 = if nonreal.is_empty() {
        1.0
    } else if nonreal.len() == n {
        lead * nonreal.iter().map(|z| z.im.abs()).product::<f64>() * (1.0 - 1e-9)
    } else {
        nonreal.iter().map(|z| z.im.abs()).fold(f64::INFINITY, f64::min) / c2
    };
    Ok((c1, c2))
}
