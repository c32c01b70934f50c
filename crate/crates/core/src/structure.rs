//! Homographies of `ℙ¹(ℚ)`, cross-ratios, `p`-adic valuations, and the
//! decisions `Aut(F, ℚ)` and `F₁ ≅ F₂` over `ℚ`.
//!
//! Forms whose roots are rational or quadratic surds are handled exactly: a
//! rational `γ` sends a root in `ℚ(√m)` to a root in the same field, so each
//! root assignment is a set of rational linear equations on the entries of
//! `γ`. The assignments are searched exhaustively. Other forms go through a
//! numeric path (rational reconstruction, then exact verification) that can
//! only answer `Yes` or `Unknown`.

use crate::areas::AutClass;
use crate::arith::{self, best_rational, factor_u64, is_prime, parse_rational, rat, rational_dth_root, rational_to_string};
use crate::forms::{BinaryForm, ExactRoot, FormError, ProjPoint, RationalMatrix};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Default denominator bound of the numeric reconstruction path.
pub const DEFAULT_DENOMINATOR_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructError {
    #[error("points are not pairwise distinct")]
    NotDistinct,
    #[error("form has a root outside P1(Q)")]
    NonRationalRoots,
    #[error("degree {0} is too small")]
    DegreeTooSmall(usize),
    #[error("valuation of zero")]
    ZeroInput,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("triple is degenerate")]
    DegenerateTriple,
    #[error(transparent)]
    Form(#[from] FormError),
}

/// A point of `ℙ¹(ℚ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum P1 {
    Finite(BigRational),
    Infinity,
}

impl P1 {
    pub fn int(n: i64) -> P1 {
        P1::Finite(rat(n))
    }

    /// Projective coordinates `(x : 1)` or `(1 : 0)`.
    pub fn coords(&self) -> (BigRational, BigRational) {
        match self {
            P1::Finite(q) => (q.clone(), BigRational::one()),
            P1::Infinity => (BigRational::one(), BigRational::zero()),
        }
    }

    pub fn from_coords(x: &BigRational, y: &BigRational) -> Option<P1> {
        if y.is_zero() {
            (!x.is_zero()).then_some(P1::Infinity)
        } else {
            Some(P1::Finite(x / y))
        }
    }
}

impl fmt::Display for P1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            P1::Finite(q) => write!(f, "{}", rational_to_string(q)),
            P1::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for P1 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for P1 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "inf" {
            return Ok(P1::Infinity);
        }
        parse_rational(&s).map(P1::Finite).ok_or_else(|| serde::de::Error::custom(format!("bad point {s:?}")))
    }
}

fn det2(a: &(BigRational, BigRational), b: &(BigRational, BigRational)) -> BigRational {
    &a.0 * &b.1 - &a.1 * &b.0
}

/// `[x₁,x₂,x₃,x₄] = (x₃−x₁)(x₄−x₂) / ((x₃−x₂)(x₄−x₁))`, computed on
/// projective coordinates so that `∞` needs no special case. Distinct
/// points never give `0`, `1` or `∞`.
pub fn cross_ratio(x1: &P1, x2: &P1, x3: &P1, x4: &P1) -> Result<BigRational, StructError> {
    let p = [x1, x2, x3, x4].map(P1::coords);
    for i in 0..4 {
        for j in i + 1..4 {
            if det2(&p[i], &p[j]).is_zero() {
                return Err(StructError::NotDistinct);
            }
        }
    }
    Ok(det2(&p[2], &p[0]) * det2(&p[3], &p[1]) / (det2(&p[2], &p[1]) * det2(&p[3], &p[0])))
}

/// A `PGL(2, ℚ)` class, stored with first nonzero entry `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Homography {
    matrix: RationalMatrix,
}

impl Homography {
    pub fn new(m: &RationalMatrix) -> Self {
        Homography { matrix: m.canonical() }
    }

    pub fn identity() -> Self {
        Homography { matrix: RationalMatrix::identity() }
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }

    pub fn apply(&self, p: &P1) -> P1 {
        let (x, y) = self.matrix.act(&p.coords());
        P1::from_coords(&x, &y).expect("invertible matrix")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Homography) -> Homography {
        Homography::new(&self.matrix.mul(&other.matrix))
    }

    pub fn inverse(&self) -> Homography {
        Homography::new(&self.matrix.inverse())
    }
}

/// Matrix sending `∞ ↦ a`, `0 ↦ b`, `1 ↦ c`.
fn frame(t: &[P1; 3]) -> Result<RationalMatrix, StructError> {
    let [a, b, c] = t.each_ref().map(P1::coords);
    let dd = det2(&a, &b);
    if dd.is_zero() {
        return Err(StructError::DegenerateTriple);
    }
    let l = det2(&c, &b) / &dd;
    let m = det2(&a, &c) / &dd;
    if l.is_zero() || m.is_zero() {
        return Err(StructError::DegenerateTriple);
    }
    RationalMatrix::new(&l * &a.0, &m * &b.0, &l * &a.1, &m * &b.1).map_err(|_| StructError::DegenerateTriple)
}

/// The unique homography with `src[i] ↦ dst[i]`.
pub fn homography_from_triple(src: &[P1; 3], dst: &[P1; 3]) -> Result<Homography, StructError> {
    Ok(Homography::new(&frame(dst)?.mul(&frame(src)?.inverse())))
}

fn c_coords(p: &ProjPoint) -> (Complex64, Complex64) {
    match p {
        ProjPoint::Finite(z) => (*z, Complex64::new(1.0, 0.0)),
        ProjPoint::Infinity => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
    }
}

fn c_frame(t: &[ProjPoint; 3]) -> Option<[Complex64; 4]> {
    let [a, b, c] = t.each_ref().map(c_coords);
    let det = |u: &(Complex64, Complex64), v: &(Complex64, Complex64)| u.0 * v.1 - u.1 * v.0;
    let dd = det(&a, &b);
    if dd.norm() < 1e-300 {
        return None;
    }
    let l = det(&c, &b) / dd;
    let m = det(&a, &c) / dd;
    Some([l * a.0, m * b.0, l * a.1, m * b.1])
}

/// Floating-point version of [`homography_from_triple`] for roots without
/// exact tags; the result is an unnormalized complex matrix.
pub fn homography_from_triple_numeric(src: &[ProjPoint; 3], dst: &[ProjPoint; 3]) -> Option<[Complex64; 4]> {
    let s = c_frame(src)?;
    let t = c_frame(dst)?;
    let det = s[0] * s[3] - s[1] * s[2];
    if det.norm() < 1e-300 {
        return None;
    }
    let inv = [s[3] / det, -s[1] / det, -s[2] / det, s[0] / det];
    Some([
        t[0] * inv[0] + t[1] * inv[2],
        t[0] * inv[1] + t[1] * inv[3],
        t[2] * inv[0] + t[3] * inv[2],
        t[2] * inv[1] + t[3] * inv[3],
    ])
}

/// `v_p(t)` for `t ≠ 0` and prime `p`.
pub fn vp(t: &BigRational, p: u64) -> Result<i64, StructError> {
    if !is_prime(p) {
        return Err(StructError::NotPrime(p));
    }
    arith::vp(t, p).ok_or(StructError::ZeroInput)
}

/// Roots of `F` as points of `ℙ¹(ℚ)`.
pub fn rational_roots(f: &BinaryForm) -> Result<Vec<P1>, StructError> {
    let rs = f.roots(1e-12)?;
    rs.exact_tags
        .iter()
        .map(|t| match t {
            ExactRoot::Rational(q) => Ok(P1::Finite(q.clone())),
            ExactRoot::Infinity => Ok(P1::Infinity),
            _ => Err(StructError::NonRationalRoots),
        })
        .collect()
}

/// Cross-ratios of all ordered 4-tuples of distinct points. Each 4-subset
/// contributes the six values `λ, 1/λ, 1−λ, 1/(1−λ), λ/(λ−1), (λ−1)/λ`,
/// which are exactly the values over its 24 orderings.
pub fn bir_of_points(pts: &[P1]) -> Result<BTreeSet<BigRational>, StructError> {
    let mut out = BTreeSet::new();
    let n = pts.len();
    let one = BigRational::one();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let x = cross_ratio(&pts[i], &pts[j], &pts[k], &pts[l])?;
                    let y = &one - &x;
                    out.insert(one.clone() / &x);
                    out.insert(one.clone() / &y);
                    out.insert(-(&x / &y));
                    out.insert(-(&y / &x));
                    out.insert(y);
                    out.insert(x);
                }
            }
        }
    }
    Ok(out)
}

pub fn bir_set(f: &BinaryForm) -> Result<BTreeSet<BigRational>, StructError> {
    if f.degree() < 4 {
        return Err(StructError::DegreeTooSmall(f.degree()));
    }
    bir_of_points(&rational_roots(f)?)
}

pub fn valuation_set(bir: &BTreeSet<BigRational>, p: u64) -> BTreeSet<i64> {
    bir.iter().filter_map(|t| arith::vp(t, p)).collect()
}

/// `v ↦ #{y ∈ Bir : v_p(y) = v}`. Equal Bir sets give equal multisets, so
/// a mismatch at any prime certifies non-isomorphism.
pub fn valuation_multiset(bir: &BTreeSet<BigRational>, p: u64) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for v in bir.iter().filter_map(|t| arith::vp(t, p)) {
        *out.entry(v).or_insert(0) += 1;
    }
    out
}

/// First prime at which the valuation multisets of two Bir sets differ.
fn separating_prime(b1: &BTreeSet<BigRational>, b2: &BTreeSet<BigRational>) -> Option<u64> {
    let mut primes = BTreeSet::new();
    for t in b1.iter().chain(b2) {
        for n in [t.numer(), t.denom()] {
            if let Some(n) = n.abs().to_u64() {
                if n > 1 {
                    primes.extend(factor_u64(n).into_iter().map(|(p, _)| p));
                }
            }
        }
    }
    primes.into_iter().find(|&p| valuation_multiset(b1, p) != valuation_multiset(b2, p))
}

// ---------------------------------------------------------------------
// Exact root arithmetic

#[derive(Debug, Clone, PartialEq)]
enum Pt {
    Rat((BigRational, BigRational)),
    /// `x₀ + x₁√m` with `m` squarefree, `m ≠ 1`.
    Quad { x0: BigRational, x1: BigRational, m: BigInt },
}

impl Pt {
    fn conjugate_of(&self, o: &Pt) -> bool {
        match (self, o) {
            (Pt::Quad { x0, x1, m }, Pt::Quad { x0: y0, x1: y1, m: n }) => m == n && x0 == y0 && *x1 == -y1,
            _ => false,
        }
    }
}

fn exact_points(tags: &[ExactRoot]) -> Option<Vec<Pt>> {
    tags.iter()
        .map(|t| match t {
            ExactRoot::QuadraticSurd { r, s, m } => Some(Pt::Quad { x0: r.clone(), x1: s.clone(), m: m.clone() }),
            ExactRoot::NumericOnly => None,
            t => t.as_projective_rational().map(Pt::Rat),
        })
        .collect()
}

type Row = [BigRational; 4];

/// Linear conditions on `(a₁,a₂,a₃,a₄)` for `γ` to send `src` to `dst`.
fn eq_rows(src: &Pt, dst: &Pt) -> Option<Vec<Row>> {
    match (src, dst) {
        (Pt::Rat((r0, r1)), Pt::Rat((s0, s1))) => Some(vec![[s1 * r0, s1 * r1, -(s0 * r0), -(s0 * r1)]]),
        (Pt::Quad { x0, x1, m }, Pt::Quad { x0: y0, x1: y1, m: n }) if m == n => {
            // (a₁ξ + a₂) − η(a₃ξ + a₄) = 0 split into rational and √m parts.
            let mq = BigRational::from_integer(m.clone());
            let z = BigRational::zero();
            Some(vec![
                [x0.clone(), BigRational::one(), -(x0 * y0 + mq * x1 * y1), -y0.clone()],
                [x1.clone(), z, -(x0 * y1 + x1 * y0), -y1.clone()],
            ])
        }
        _ => None,
    }
}

/// Basis of the rational null space of a system in four unknowns.
fn nullspace(rows: &[Row]) -> Vec<Row> {
    let mut m: Vec<Row> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..4 {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = BigRational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..4 {
                    let t = &f * &m[r][k];
                    m[i][k] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    (0..4)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v: Row = std::array::from_fn(|_| BigRational::zero());
            v[free] = BigRational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[i][free].clone();
            }
            v
        })
        .collect()
}

/// Root order for the search: by numeric magnitude, dropping the conjugate
/// of a quadratic root already listed.
fn search_order(pts: &[Pt], points: &[ProjPoint]) -> Vec<usize> {
    let mag = |p: &ProjPoint| p.finite().map_or(f64::INFINITY, |z| z.norm());
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| mag(&points[a]).total_cmp(&mag(&points[b])).then(a.cmp(&b)));
    let mut out: Vec<usize> = Vec::new();
    for i in idx {
        if !out.iter().any(|&j| pts[j].conjugate_of(&pts[i])) {
            out.push(i);
        }
    }
    out
}

struct Search<'a> {
    src: &'a [Pt],
    dst: &'a [Pt],
    order: Vec<usize>,
    out: Vec<RationalMatrix>,
}

impl Search<'_> {
    fn run(&mut self, depth: usize, rows: &[Row], used: &mut Vec<bool>) {
        let Some(&i) = self.order.get(depth) else { return };
        for j in 0..self.dst.len() {
            if used[j] {
                continue;
            }
            let Some(new) = eq_rows(&self.src[i], &self.dst[j]) else { continue };
            let mut all = rows.to_vec();
            all.extend(new);
            let ns = nullspace(&all);
            match ns.len() {
                0 => {}
                1 => {
                    let [a1, a2, a3, a4] = ns.into_iter().next().unwrap();
                    if let Ok(g) = RationalMatrix::new(a1, a2, a3, a4) {
                        let g = g.canonical();
                        if !self.out.contains(&g) {
                            self.out.push(g);
                        }
                    }
                }
                _ => {
                    used[j] = true;
                    self.run(depth + 1, &all, used);
                    used[j] = false;
                }
            }
        }
    }
}

/// Every `PGL(2,ℚ)` class sending the roots of `F₁` into the roots of `F₂`
/// that is pinned down by the root assignment.
fn exact_candidates(src: &[Pt], src_points: &[ProjPoint], dst: &[Pt]) -> Vec<RationalMatrix> {
    let mut s = Search { src, dst, order: search_order(src, src_points), out: Vec::new() };
    let mut used = vec![false; dst.len()];
    s.run(0, &[], &mut used);
    s.out
}

fn numeric_candidate(m: [Complex64; 4], den_bound: u64) -> Option<RationalMatrix> {
    let big = m.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm()))?;
    if big.norm() == 0.0 || !big.norm().is_finite() {
        return None;
    }
    let mut q = Vec::with_capacity(4);
    for z in m {
        let w = z / big;
        if w.im.abs() > 1e-7 {
            return None;
        }
        let r = best_rational(w.re, den_bound)?;
        if (arith::rational_to_f64(&r) - w.re).abs() > 1e-8 {
            return None;
        }
        q.push(r);
    }
    let [a1, a2, a3, a4]: [BigRational; 4] = q.try_into().ok()?;
    RationalMatrix::new(a1, a2, a3, a4).ok()
}

/// Numeric path: the three smallest roots of `F₁` are sent to every
/// ordered triple of roots of `F₂`.
fn numeric_candidates(src: &[ProjPoint], dst: &[ProjPoint], den_bound: u64) -> Vec<RationalMatrix> {
    let mag = |p: &ProjPoint| p.finite().map_or(f64::INFINITY, |z| z.norm());
    let mut idx: Vec<usize> = (0..src.len()).collect();
    idx.sort_by(|&a, &b| mag(&src[a]).total_cmp(&mag(&src[b])).then(a.cmp(&b)));
    let s = [src[idx[0]], src[idx[1]], src[idx[2]]];
    let n = dst.len();
    let triples: Vec<[usize; 3]> = (0..n)
        .flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| [i, j, k])))
        .filter(|[i, j, k]| i != j && j != k && i != k)
        .collect();
    let found: Vec<Option<RationalMatrix>> = triples
        .par_iter()
        .map(|t| homography_from_triple_numeric(&s, &t.map(|i| dst[i])).and_then(|m| numeric_candidate(m, den_bound)))
        .collect();
    let mut out: Vec<RationalMatrix> = Vec::new();
    for g in found.into_iter().flatten() {
        let g = g.canonical();
        if !out.contains(&g) {
            out.push(g);
        }
    }
    out
}

/// All `λγ` with `F₂∘(λγ) = F₁` exactly. Since `F₂∘(λγ) = λ^d (F₂∘γ)`,
/// this needs `F₂∘γ = c·F₁` and `λ^d = 1/c` over `ℚ`.
pub fn scalar_lifts(f1: &BinaryForm, f2: &BinaryForm, g: &RationalMatrix) -> Vec<RationalMatrix> {
    if f1.degree() != f2.degree() {
        return Vec::new();
    }
    let h = f2.compose(g);
    let k = f1.coeffs().iter().position(|c| !c.is_zero()).expect("nonzero form");
    let c = &h.coeffs()[k] / &f1.coeffs()[k];
    if c.is_zero() || h.coeffs().iter().zip(f1.coeffs()).any(|(a, b)| *a != &c * b) {
        return Vec::new();
    }
    let d = f1.degree() as u32;
    match rational_dth_root(&(BigRational::one() / c), d) {
        None => Vec::new(),
        Some(l) if d % 2 == 0 => vec![g.scale(&l), g.scale(&-l)],
        Some(l) => vec![g.scale(&l)],
    }
}

// ---------------------------------------------------------------------
// Automorphisms

/// `Aut(F, ℚ)` as explicit `GL(2, ℚ)` matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutGroup {
    pub elements: Vec<RationalMatrix>,
    pub classification: AutClass,
    /// `false` when some root had no exact tag and the numeric path was used.
    pub complete: bool,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &RationalMatrix) -> bool {
        self.elements.contains(g)
    }

    /// Identity, closure under products and inverses, exactly.
    pub fn is_group(&self) -> bool {
        self.contains(&RationalMatrix::identity())
            && self.elements.iter().all(|g| self.contains(&g.inverse()))
            && self.elements.iter().all(|g| self.elements.iter().all(|h| self.contains(&g.mul(h))))
    }
}

fn classify(els: &[RationalMatrix]) -> AutClass {
    let id = RationalMatrix::identity();
    match els.len() {
        1 => AutClass::Trivial,
        2 if els.contains(&id.neg()) => AutClass::PlusMinus,
        4 if els.iter().all(|g| g.mul(g) == id) => AutClass::Klein,
        n => AutClass::Other(n),
    }
}

pub fn automorphisms(f: &BinaryForm) -> Result<AutGroup, StructError> {
    if f.degree() < 3 {
        return Err(StructError::DegreeTooSmall(f.degree()));
    }
    let rs = f.roots(1e-12)?;
    let (pgl, complete) = match exact_points(&rs.exact_tags) {
        Some(pts) => (exact_candidates(&pts, &rs.points, &pts), true),
        None => (numeric_candidates(&rs.points, &rs.points, DEFAULT_DENOMINATOR_BOUND), false),
    };
    let mut elements: Vec<RationalMatrix> = Vec::new();
    for g in &pgl {
        for h in scalar_lifts(f, f, g) {
            if !elements.contains(&h) {
                elements.push(h);
            }
        }
    }
    elements.sort_by_key(|g| g.to_strings());
    let classification = classify(&elements);
    Ok(AutGroup { elements, classification, complete })
}

// ---------------------------------------------------------------------
// Isomorphism

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum NoCertificate {
    DegreeMismatch { d1: usize, d2: usize },
    CrossRatioInvariant { p: Option<u64>, details: String },
    ExhaustedCandidatesExact { details: String },
    BinomialCriterion { details: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum IsoVerdict {
    /// `F₁ = F₂∘γ`, checked coefficient by coefficient.
    Yes { gamma: RationalMatrix, verified: bool },
    No { certificate: NoCertificate },
    Unknown { reason: String },
}

impl IsoVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            IsoVerdict::Yes { .. } => "Yes",
            IsoVerdict::No { .. } => "No",
            IsoVerdict::Unknown { .. } => "Unknown",
        }
    }

    pub fn gamma(&self) -> Option<&RationalMatrix> {
        match self {
            IsoVerdict::Yes { gamma, .. } => Some(gamma),
            _ => None,
        }
    }
}

fn binomial_parts(f: &BinaryForm) -> Option<(BigRational, BigRational)> {
    let c = f.coeffs();
    let d = c.len() - 1;
    (c[1..d].iter().all(Zero::is_zero) && !c[0].is_zero() && !c[d].is_zero()).then(|| (c[0].clone(), c[d].clone()))
}

/// Rational roots counted, then the radicand of each quadratic root.
fn field_signature(pts: &[Pt]) -> (usize, Vec<BigInt>) {
    let mut ms: Vec<BigInt> = pts
        .iter()
        .filter_map(|p| match p {
            Pt::Quad { m, .. } => Some(m.clone()),
            Pt::Rat(_) => None,
        })
        .collect();
    ms.sort();
    (pts.len() - ms.len(), ms)
}

fn yes(f1: &BinaryForm, f2: &BinaryForm, g: &RationalMatrix) -> Option<IsoVerdict> {
    scalar_lifts(f1, f2, g).into_iter().next().map(|gamma| {
        let verified = f2.compose(&gamma) == *f1;
        IsoVerdict::Yes { gamma, verified }
    })
}

/// For `aX^d + bY^d` and `a′X^d + b′Y^d` with `d ≥ 3` every isomorphism is
/// diagonal or antidiagonal, so `F₁ ≅ F₂` iff `a/a′, b/b′` or `a/b′, b/a′`
/// are both `d`-th powers in `ℚ`.
fn binomial_verdict(d: usize, (a, b): &(BigRational, BigRational), (a2, b2): &(BigRational, BigRational)) -> IsoVerdict {
    let d32 = d as u32;
    let z = BigRational::zero;
    let diag = rational_dth_root(&(a / a2), d32).zip(rational_dth_root(&(b / b2), d32));
    if let Some((u, v)) = diag {
        return IsoVerdict::Yes { gamma: RationalMatrix::new(u, z(), z(), v).unwrap(), verified: true };
    }
    // F₂∘(0 u; v 0) = a′u^d Y^d + b′v^d X^d.
    let anti = rational_dth_root(&(b / a2), d32).zip(rational_dth_root(&(a / b2), d32));
    if let Some((u, v)) = anti {
        return IsoVerdict::Yes { gamma: RationalMatrix::new(z(), u, v, z()).unwrap(), verified: true };
    }
    IsoVerdict::No {
        certificate: NoCertificate::BinomialCriterion {
            details: format!(
                "neither ({}, {}) nor ({}, {}) are both {d}-th powers",
                rational_to_string(&(a / a2)),
                rational_to_string(&(b / b2)),
                rational_to_string(&(b / a2)),
                rational_to_string(&(a / b2))
            ),
        },
    }
}

/// Decide whether `F₁ = F₂∘γ` for some `γ ∈ GL(2, ℚ)`.
pub fn is_isomorphic(f1: &BinaryForm, f2: &BinaryForm, den_bound: u64) -> Result<IsoVerdict, StructError> {
    let (d1, d2) = (f1.degree(), f2.degree());
    if d1 != d2 {
        return Ok(IsoVerdict::No { certificate: NoCertificate::DegreeMismatch { d1, d2 } });
    }
    let r1 = f1.roots(1e-12)?;
    let r2 = f2.roots(1e-12)?;
    if d1 >= 3 {
        if let (Some(p1), Some(p2)) = (binomial_parts(f1), binomial_parts(f2)) {
            let v = binomial_verdict(d1, &p1, &p2);
            if let IsoVerdict::Yes { gamma, .. } = &v {
                debug_assert!(f2.compose(gamma) == *f1);
            }
            return Ok(v);
        }
    }
    if let (Some(e1), Some(e2)) = (exact_points(&r1.exact_tags), exact_points(&r2.exact_tags)) {
        let (s1, s2) = (field_signature(&e1), field_signature(&e2));
        if s1 != s2 {
            let details = format!("root fields differ: {} rational + radicands {:?} vs {} rational + radicands {:?}", s1.0, s1.1, s2.0, s2.1);
            return Ok(IsoVerdict::No { certificate: NoCertificate::ExhaustedCandidatesExact { details } });
        }
        if d1 >= 4 && r1.all_rational() {
            let b1 = bir_set(f1)?;
            let b2 = bir_set(f2)?;
            if b1 != b2 {
                let p = separating_prime(&b1, &b2);
                let details = match p {
                    Some(p) => format!(
                        "valuation multisets at p = {p}: {:?} vs {:?}",
                        valuation_multiset(&b1, p),
                        valuation_multiset(&b2, p)
                    ),
                    None => format!("Bir sets differ ({} vs {} elements)", b1.len(), b2.len()),
                };
                return Ok(IsoVerdict::No { certificate: NoCertificate::CrossRatioInvariant { p, details } });
            }
        }
        let cands = exact_candidates(&e1, &r1.points, &e2);
        let n = cands.len();
        for g in &cands {
            if let Some(v) = yes(f1, f2, g) {
                return Ok(v);
            }
        }
        let details = format!("{n} root-compatible homographies, none lifts to an equality of forms");
        return Ok(IsoVerdict::No { certificate: NoCertificate::ExhaustedCandidatesExact { details } });
    }
    for g in numeric_candidates(&r1.points, &r2.points, den_bound) {
        if let Some(v) = yes(f1, f2, &g) {
            return Ok(v);
        }
    }
    Ok(IsoVerdict::Unknown { reason: format!("numeric reconstruction with denominator bound {den_bound} found no verified candidate") })
}
