//! Enumeration of represented values `F(x, y)` with `|F(x, y)| ≤ B`.
//!
//! Rows `y = const` are scanned independently. For each row the set of
//! `x` with `|F(x, y)| ≤ B` is confined to short windows around `ξ y` for
//! the roots `ξ` of `F(t, 1)`, so only those windows are evaluated. The
//! naive double loop is kept as an oracle.

use crate::families::{self, regularity, FamilyError, FamilyId, RegularityTuple, SeqVariant};
use crate::forms::{BinaryForm, CappedInteger, FormError};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CountError {
    #[error("B = {0} exceeds the evaluation cap")]
    CapExceeded(u64),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoxSource {
    ConditionV,
    DefiniteMinimum,
    UserCap,
}

/// Square `[−x, x]²` that is searched for one form. Points with
/// `max{|x|,|y|} < min_max` are skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxBound {
    pub x: u64,
    pub rigorous: bool,
    pub source: BoxSource,
    pub min_max: u64,
}

/// Distinct integers `m` with `|m| ≤ B`.
///
/// Up to `B ≤ 2³¹` membership is a bitmap over `[−B, B]` whose pages are
/// allocated on first touch; above that an ordered set is used.
#[derive(Debug, Clone)]
pub struct ValueSet {
    b: u64,
    store: Store,
    len: usize,
}

#[derive(Debug, Clone)]
enum Store {
    Bitmap(HashMap<u64, Box<[u64]>>),
    Set(BTreeSet<i128>),
}

const PAGE_BITS: u64 = 1 << 16;
const BITMAP_LIMIT: u64 = 1 << 31;

impl ValueSet {
    pub fn new(b: u64) -> Self {
        let store = if b <= BITMAP_LIMIT { Store::Bitmap(HashMap::new()) } else { Store::Set(BTreeSet::new()) };
        ValueSet { b, store, len: 0 }
    }

    pub fn bound(&self) -> u64 {
        self.b
    }

    /// Insert `m`; values outside `[−B, B]` are ignored. Returns whether
    /// `m` was new.
    pub fn insert(&mut self, m: i128) -> bool {
        if m.unsigned_abs() > self.b as u128 {
            return false;
        }
        let fresh = match &mut self.store {
            Store::Set(s) => s.insert(m),
            Store::Bitmap(pages) => {
                let idx = (m + self.b as i128) as u64;
                let page = pages.entry(idx / PAGE_BITS).or_insert_with(|| vec![0u64; (PAGE_BITS / 64) as usize].into());
                let off = idx % PAGE_BITS;
                let (w, bit) = ((off / 64) as usize, 1u64 << (off % 64));
                let fresh = page[w] & bit == 0;
                page[w] |= bit;
                fresh
            }
        };
        self.len += fresh as usize;
        fresh
    }

    pub fn contains(&self, m: i128) -> bool {
        if m.unsigned_abs() > self.b as u128 {
            return false;
        }
        match &self.store {
            Store::Set(s) => s.contains(&m),
            Store::Bitmap(pages) => {
                let idx = (m + self.b as i128) as u64;
                pages
                    .get(&(idx / PAGE_BITS))
                    .is_some_and(|p| p[((idx % PAGE_BITS) / 64) as usize] >> (idx % 64) & 1 == 1)
            }
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Values in increasing order.
    pub fn to_vec(&self) -> Vec<i128> {
        match &self.store {
            Store::Set(s) => s.iter().copied().collect(),
            Store::Bitmap(pages) => {
                let mut keys: Vec<_> = pages.keys().copied().collect();
                keys.sort_unstable();
                let mut out = Vec::with_capacity(self.len);
                for k in keys {
                    for (w, &word) in pages[&k].iter().enumerate() {
                        let mut bits = word;
                        while bits != 0 {
                            let t = bits.trailing_zeros() as u64;
                            out.push((k * PAGE_BITS + w as u64 * 64 + t) as i128 - self.b as i128);
                            bits &= bits - 1;
                        }
                    }
                }
                out
            }
        }
    }

    pub fn extend<I: IntoIterator<Item = i128>>(&mut self, it: I) {
        for m in it {
            self.insert(m);
        }
    }

    pub fn intersection_len(&self, other: &ValueSet) -> usize {
        let (small, big) = if self.len <= other.len { (self, other) } else { (other, self) };
        small.to_vec().into_iter().filter(|&m| big.contains(m)).count()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountReport {
    pub count: u64,
    #[serde(rename = "B")]
    pub b: u64,
    pub boxes: Vec<BoxBound>,
    pub rigorous: bool,
    pub elapsed_ms: f64,
    pub zero_included: bool,
    pub notes: Vec<String>,
}

impl CountReport {
    fn new(count: u64, b: u64, boxes: Vec<BoxBound>, zero: bool, t0: Instant) -> Self {
        let rigorous = boxes.iter().all(|x| x.rigorous);
        CountReport { count, b, boxes, rigorous, elapsed_ms: t0.elapsed().as_secs_f64() * 1e3, zero_included: zero, notes: Vec::new() }
    }
}

/// Options shared by the counting entry points.
#[derive(Debug, Clone)]
pub struct CountOptions {
    /// Regularity certificate to use for the search box.
    pub regularity: Option<RegularityTuple>,
    /// Half-width used when no certificate is available.
    pub user_cap: u64,
    /// Degree limit for the small-point scan of `count_r`.
    pub small_point_degree_cap: u32,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { regularity: None, user_cap: 1000, small_point_degree_cap: 200 }
    }
}

fn check_integral(f: &BinaryForm) -> Result<(), CountError> {
    if f.is_integral() {
        Ok(())
    } else {
        Err(FormError::NonIntegralForm.into())
    }
}

/// Certified lower bound for `min |F|` on the boundary of the unit square
/// `max{|x|,|y|} = 1`, or `None` if `F` may vanish there.
pub fn definite_minimum(f: &BinaryForm) -> Option<f64> {
    let c = f.coeffs_f64();
    let g = f.swap_xy().coeffs_f64();
    // |F(t, ±1)| = |f(±t)| and |F(±1, t)| = |g(±t)| up to sign, t ∈ [−1, 1]
    let lo = |p: &[f64]| -> Option<f64> {
        let d = p.len() - 1;
        // descending coefficients; on [−1, 1] bound |p''| by Σ k(k−1)|a_k|
        let m2: f64 = p.iter().enumerate().map(|(i, a)| ((d - i) * (d - i).saturating_sub(1)) as f64 * a.abs()).sum();
        let ev = |t: f64| {
            let (mut v, mut dv) = (0.0f64, 0.0f64);
            for a in p {
                dv = dv * t + v;
                v = v * t + a;
            }
            (v, dv)
        };
        let scale: f64 = p.iter().map(|a| a.abs()).sum::<f64>().max(1.0);
        let mut stack = vec![(-1.0f64, 1.0f64, 0u32)];
        let mut upper = f64::INFINITY;
        let mut best = f64::INFINITY;
        while let Some((a, b, depth)) = stack.pop() {
            let m = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            let (v, dv) = ev(m);
            upper = upper.min(v.abs());
            // Taylor bound around the midpoint, with rounding slack
            let low = v.abs() - dv.abs() * h - 0.5 * m2 * h * h - 1e-13 * scale;
            if low > 0.0 && low >= (1.0 - 1e-6) * upper {
                best = best.min(low);
            } else if depth > 60 {
                if low > 0.0 {
                    best = best.min(low);
                } else {
                    return None;
                }
            } else {
                stack.push((a, m, depth + 1));
                stack.push((m, b, depth + 1));
            }
        }
        Some(best)
    };
    Some(lo(&c)?.min(lo(&g)?))
}

/// Search box for `|F(x, y)| ≤ B`.
///
/// With a regularity tuple whose condition (v) covers `deg F` the box is
/// `max(⌈κ B^{1/(d−d₀)}⌉, A − 1)`. Without one, a form with no real
/// projective root gets `⌈(B/c_F)^{1/d}⌉` from a certified minimum
/// `c_F` of `|F|` on the unit square boundary. Anything else falls back
/// to `user_cap` and is not rigorous.
pub fn search_box(f: &BinaryForm, b: u64, reg: Option<&RegularityTuple>, user_cap: u64) -> BoxBound {
    let d = f.degree() as u32;
    if let Some(t) = reg {
        if t.applies_to(d) {
            let x = t.box_radius(d, b).max(t.a - 1);
            return BoxBound { x, rigorous: true, source: BoxSource::ConditionV, min_max: 0 };
        }
    }
    if !f.has_real_projective_root().unwrap_or(true) {
        if let Some(c) = definite_minimum(f) {
            let x = ((b.max(1) as f64 / c).powf(1.0 / d as f64) * (1.0 + 1e-9)).ceil() as u64;
            return BoxBound { x, rigorous: true, source: BoxSource::DefiniteMinimum, min_max: 0 };
        }
    }
    BoxBound { x: user_cap, rigorous: false, source: BoxSource::UserCap, min_max: 0 }
}

/// Root data of `F(t, 1)` used to restrict each row to short windows.
#[derive(Debug, Clone)]
struct RowPlanner {
    lead: f64,
    real: Vec<f64>,
    /// `|Im ξ|` of the non-real roots, slightly shrunk.
    imag: Vec<f64>,
    /// Real parts of all roots.
    centers: Vec<f64>,
    /// Minimal gap between real roots, slightly shrunk.
    delta: f64,
    degree: usize,
}

impl RowPlanner {
    fn new(f: &BinaryForm) -> Option<Self> {
        if f.leading().is_zero() || !f.has_nonzero_disc() {
            return None;
        }
        let rs = f.roots(1e-14).ok()?;
        let real = rs.real_finite();
        let nonreal = rs.nonreal_finite();
        let imag = nonreal.iter().map(|z| (z.im.abs() * (1.0 - 1e-7) - 1e-12).max(0.0)).collect();
        let mut centers: Vec<f64> = real.iter().copied().chain(nonreal.iter().map(|z| z.re)).collect();
        centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let delta = real.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let delta = if delta.is_finite() { delta * (1.0 - 1e-7) - 1e-12 } else { delta };
        let lead = crate::arith::rational_to_f64(f.leading()).abs();
        Some(RowPlanner { lead, real, imag, centers, delta, degree: f.degree() })
    }

    /// Integer intervals of `x` (sorted, disjoint) that may hold
    /// `|F(x, y)| ≤ b` for this `y ≠ 0`.
    fn ranges(&self, y: i64, b: u64) -> Vec<(i64, i64)> {
        let ay = (y as f64).abs();
        let bf = b.max(1) as f64;
        // every x with |F| ≤ b is within r0 of some Re(ξ) y
        let r0 = (bf / self.lead).powf(1.0 / self.degree as f64);
        let mut width: Vec<(f64, f64)> = self.centers.iter().map(|c| (c * y as f64, r0)).collect();
        // sharper windows around the real roots once the row is far out
        let r = self.real.len();
        let h = if r >= 2 { self.delta * ay / 2.0 } else { ay };
        let log_cx: f64 = self.imag.iter().map(|im| (im * ay).ln()).sum();
        let log_outside = self.lead.ln() + r as f64 * h.ln() + log_cx;
        if h > 0.0 && log_outside > bf.ln() + 1e-9 {
            if r == 0 {
                return Vec::new();
            }
            let log_w = bf.ln() - self.lead.ln() - (r as f64 - 1.0) * h.ln() - log_cx;
            let w = log_w.exp().min(h);
            width = self.real.iter().map(|c| (c * y as f64, w)).collect();
        }
        let mut iv: Vec<(i64, i64)> = width
            .into_iter()
            .map(|(c, w)| {
                let slack = 1e-6 * (1.0 + c.abs()) + 1e-9 * w;
                ((c - w - slack).floor() as i64, (c + w + slack).ceil() as i64)
            })
            .collect();
        iv.sort_unstable();
        let mut out: Vec<(i64, i64)> = Vec::with_capacity(iv.len());
        for (a, b) in iv {
            match out.last_mut() {
                Some(last) if a <= last.1 + 1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        out
    }
}

/// Prepared scan for one form: the oriented form (transposed if its
/// leading coefficient vanishes) and its row planner.
struct Scan<'a> {
    form: std::borrow::Cow<'a, BinaryForm>,
    planner: Option<RowPlanner>,
}

impl<'a> Scan<'a> {
    fn new(f: &'a BinaryForm) -> Self {
        if f.leading().is_zero() && !f.coeffs().last().unwrap().is_zero() {
            let g = f.swap_xy();
            let planner = RowPlanner::new(&g);
            return Scan { form: std::borrow::Cow::Owned(g), planner };
        }
        Scan { form: std::borrow::Cow::Borrowed(f), planner: RowPlanner::new(f) }
    }

    /// Values `|F| ≤ b` on one row of the half-plane `y > 0` or
    /// `y = 0, x ≥ 0`, restricted to `|x| ≤ xmax`, `max{|x|,|y|} ≥ min_max`.
    fn row(&self, y: i64, b: u64, xmax: i64, min_max: u64, out: &mut Vec<i128>) {
        let f = &*self.form;
        let sym = if f.degree() % 2 == 0 { 1 } else { -1 };
        let mut visit = |x: i64| {
            if (x.unsigned_abs().max(y.unsigned_abs())) < min_max {
                return;
            }
            if let Ok(CappedInteger::Exact(v)) = f.evaluate(x, y, b as u128) {
                out.push(v);
                out.push(sym * v);
            }
        };
        if y == 0 {
            (0..=xmax).for_each(&mut visit);
            return;
        }
        match &self.planner {
            Some(p) => {
                for (a, c) in p.ranges(y, b) {
                    for x in a.max(-xmax)..=c.min(xmax) {
                        visit(x);
                    }
                }
            }
            None => (-xmax..=xmax).for_each(&mut visit),
        }
    }
}

fn scan_values(f: &BinaryForm, b: u64, bx: &BoxBound) -> Vec<Vec<i128>> {
    let scan = Scan::new(f);
    let xmax = bx.x.min(i64::MAX as u64 / 4) as i64;
    (0..=xmax)
        .into_par_iter()
        .map(|y| {
            let mut out = Vec::new();
            scan.row(y, b, xmax, bx.min_max, &mut out);
            out
        })
        .collect()
}

/// All `m = F(x, y)` with `|m| ≤ B` over the box.
pub fn represented_values(f: &BinaryForm, b: u64, bx: &BoxBound) -> Result<ValueSet, CountError> {
    check_integral(f)?;
    if b as u128 > i128::MAX as u128 {
        return Err(CountError::CapExceeded(b));
    }
    let mut vs = ValueSet::new(b);
    for row in scan_values(f, b, bx) {
        vs.extend(row);
    }
    Ok(vs)
}

/// Plain double loop over `[−X, X]²`, used as an oracle.
pub fn naive_values(f: &BinaryForm, b: u64, x: i64, min_max: u64) -> Result<BTreeSet<i128>, CountError> {
    check_integral(f)?;
    let mut out = BTreeSet::new();
    for yy in -x..=x {
        for xx in -x..=x {
            if xx.unsigned_abs().max(yy.unsigned_abs()) < min_max {
                continue;
            }
            let v = f.evaluate_big(&BigInt::from(xx), &BigInt::from(yy));
            if v.numer().abs() <= BigInt::from(b) {
                out.insert(v.numer().to_i128().unwrap());
            }
        }
    }
    Ok(out)
}

/// `𝒩(F, F; B)`, including `m = 0`.
pub fn count_nn(f: &BinaryForm, b: u64, opts: &CountOptions) -> Result<CountReport, CountError> {
    let t0 = Instant::now();
    let bx = search_box(f, b, opts.regularity.as_ref(), opts.user_cap);
    let vs = represented_values(f, b, &bx)?;
    Ok(CountReport::new(vs.len() as u64, b, vec![bx], vs.contains_zero(), t0))
}

/// `𝒩(F₁, F₂; N)`: size of `F₁(ℤ²) ∩ F₂(ℤ²) ∩ [−N, N]`.
pub fn count_common(f1: &BinaryForm, f2: &BinaryForm, n: u64, opts: &CountOptions) -> Result<CountReport, CountError> {
    Ok(common_values(f1, f2, n, opts)?.0)
}

/// As [`count_common`], also returning the common values in order.
pub fn common_values(f1: &BinaryForm, f2: &BinaryForm, n: u64, opts: &CountOptions) -> Result<(CountReport, Vec<i128>), CountError> {
    let t0 = Instant::now();
    let b1 = search_box(f1, n, opts.regularity.as_ref(), opts.user_cap);
    let b2 = search_box(f2, n, opts.regularity.as_ref(), opts.user_cap);
    let v1 = represented_values(f1, n, &b1)?;
    let v2 = represented_values(f2, n, &b2)?;
    let common: Vec<i128> = v1.to_vec().into_iter().filter(|&m| v2.contains(m)).collect();
    let zero = common.contains(&0);
    Ok((CountReport::new(common.len() as u64, n, vec![b1, b2], zero, t0), common))
}

/// `ℳ(F₁, F₂; B)`: 4-tuples in `[−B, B]⁴` with `F₁(x₁,x₂) = F₂(x₃,x₄)`;
/// with `star`, only tuples where the common value is nonzero.
pub fn count_m(f1: &BinaryForm, f2: &BinaryForm, b: u64, star: bool) -> Result<CountReport, CountError> {
    check_integral(f1)?;
    check_integral(f2)?;
    if f1.degree() != f2.degree() {
        return Err(CountError::Invalid("count_m needs forms of equal degree".into()));
    }
    let t0 = Instant::now();
    let bi = b as i64;
    let hist = |f: &BinaryForm| -> HashMap<BigInt, u64> {
        let rows: Vec<Vec<BigInt>> = (-bi..=bi)
            .into_par_iter()
            .map(|y| {
                (-bi..=bi)
                    .map(|x| match f.evaluate(x, y, i128::MAX as u128) {
                        Ok(CappedInteger::Exact(v)) => BigInt::from(v),
                        _ => f.evaluate_big(&BigInt::from(x), &BigInt::from(y)).numer().clone(),
                    })
                    .collect()
            })
            .collect();
        let mut h = HashMap::new();
        for v in rows.into_iter().flatten() {
            *h.entry(v).or_insert(0u64) += 1;
        }
        h
    };
    let (h1, h2) = (hist(f1), hist(f2));
    let mut count = 0u64;
    for (v, c1) in &h1 {
        if star && v.is_zero() {
            continue;
        }
        if let Some(c2) = h2.get(v) {
            count += c1 * c2;
        }
    }
    let bx = BoxBound { x: b, rigorous: true, source: BoxSource::UserCap, min_max: 0 };
    let zero = !star;
    Ok(CountReport::new(count, b, vec![bx], zero, t0))
}

/// Lower bound on `|F(x, y)|` valid for every member of degree `≥ deg`
/// at one small point, or the values such members take there.
#[derive(Debug, Clone, PartialEq)]
enum Tail {
    /// `|F(x, y)| ≥ floor` for all members of degree `≥ deg`, unless the
    /// value is 0 (zero is accounted for separately).
    Floor(BigInt),
    /// Members of degree `≥ deg` take exactly these values (each one
    /// infinitely often).
    Values(Vec<i128>),
    Unknown,
}

fn big_pow(x: i64, e: u32) -> BigInt {
    BigInt::from(x).pow(e)
}

fn small_point_tail(fam: &FamilyId, x: i64, y: i64, deg: u32) -> Tail {
    if x == 0 && y == 0 {
        return Tail::Values(vec![0]);
    }
    match fam {
        FamilyId::QPlus(s) | FamilyId::QMinus(s) if s.variant != SeqVariant::Custom => {
            let sign: i64 = if matches!(fam, FamilyId::QPlus(_)) { 1 } else { -1 };
            if y == 0 {
                return if x.abs() == 1 { Tail::Values(vec![1]) } else { Tail::Floor(big_pow(x.abs(), deg)) };
            }
            // Q_{k,ν} drops one of the k+1 factors, so |Q| ≥ (product)/(largest factor)
            let k = deg.div_ceil(2).max(2);
            let mu = match s.prefix(k as usize + 1) {
                Ok(m) => m,
                Err(_) => return Tail::Unknown,
            };
            let fac: Vec<BigInt> = mu
                .iter()
                .map(|&m| (BigInt::from(x * x) + BigInt::from(sign) * BigInt::from(m) * BigInt::from(y * y)).abs())
                .collect();
            let big = fac.iter().max().unwrap().clone();
            let prod: BigInt = fac.iter().product();
            if big.is_zero() {
                return Tail::Unknown;
            }
            Tail::Floor(prod / big)
        }
        FamilyId::Lfamily => {
            if y == 0 {
                return match x {
                    1 => Tail::Values(vec![1]),
                    -1 => Tail::Values(vec![1, -1]),
                    _ => Tail::Floor(big_pow(x.abs(), deg)),
                };
            }
            if x % y == 0 && x / y >= 0 {
                let n = x / y;
                if (n as u32) + 2 <= deg {
                    return Tail::Values(vec![0]);
                }
                return Tail::Unknown;
            }
            let d = deg.max(5);
            let prod: BigInt = (0..=d as i64 - 2).map(|n| BigInt::from(x - n * y).abs()).product();
            Tail::Floor(prod)
        }
        _ => Tail::Unknown,
    }
}

/// Whether members of degree `≥ d` vanish at some integer point other
/// than the origin (a rational projective root).
fn family_has_zero(fam: &FamilyId, d: u32) -> Result<bool, CountError> {
    Ok(match fam {
        FamilyId::Lfamily => true,
        FamilyId::QPlus(_) | FamilyId::QMinus(_) | FamilyId::Cyclotomic => false,
        FamilyId::Binomial(c) => {
            let mut z = false;
            for e in c.iter().filter(|e| e.d >= d) {
                let f = families::binomial_form(e)?;
                z |= f.roots(1e-12)?.exact_tags.iter().any(|t| t.as_projective_rational().is_some());
            }
            z
        }
    })
}

/// `R_{≥d}(𝓕, B, A)`: integers `m`, `|m| ≤ B`, with `m = F(x, y)` for a
/// member `F` of degree `≥ d` and `max{|x|,|y|} ≥ A`.
///
/// Points with `max ≥ max(A, A_𝓕)` are bounded by condition (v) and only
/// degrees up to [`families::degree_cutoff`] can contribute. Points below
/// `A_𝓕` are scanned degree by degree until every one of them has a tail
/// certificate; the report notes `SmallPointUnbounded` if that does not
/// happen within the configured degree cap.
pub fn count_r(fam: &FamilyId, d: u32, b: u64, a: u64, opts: &CountOptions) -> Result<CountReport, CountError> {
    let t0 = Instant::now();
    let t = regularity(fam);
    let a_eff = a.max(t.a);
    let d_lo = d.max(fam.min_degree());
    let mut d_hi = families::degree_cutoff(fam, b, a_eff)?;
    if let Some(m) = fam.max_degree() {
        d_hi = d_hi.min(m);
    }
    let mut vs = ValueSet::new(b);
    let mut boxes = Vec::new();
    let mut notes = Vec::new();
    let mut zero = a == 0 || family_has_zero(fam, d_lo)?;

    for deg in d_lo..=d_hi {
        for f in families::members(fam, deg)? {
            let mut bx = search_box(&f, b, Some(&t), opts.user_cap);
            bx.min_max = a_eff;
            for row in scan_values(&f, b, &bx) {
                vs.extend(row);
            }
            boxes.push(bx);
        }
    }

    if a < t.a {
        let r = (t.a - 1) as i64;
        let pts: Vec<(i64, i64)> = (-r..=r)
            .flat_map(|y| (-r..=r).map(move |x| (x, y)))
            .filter(|&(x, y)| x.unsigned_abs().max(y.unsigned_abs()) >= a)
            .collect();
        let finite_top = fam.max_degree();
        let cap = finite_top.unwrap_or(opts.small_point_degree_cap.max(d_lo));
        let mut resolved = false;
        let mut deg = d_lo;
        while deg <= cap {
            for f in families::members(fam, deg)? {
                for &(x, y) in &pts {
                    if let Ok(CappedInteger::Exact(v)) = f.evaluate(x, y, b as u128) {
                        vs.insert(v);
                    }
                }
            }
            deg += 1;
            if finite_top.is_some() {
                continue;
            }
            let tails: Vec<Tail> = pts.iter().map(|&(x, y)| small_point_tail(fam, x, y, deg)).collect();
            let bb = BigInt::from(b);
            let done = tails.iter().all(|tl| match tl {
                Tail::Floor(fl) => fl > &bb,
                Tail::Values(_) => true,
                Tail::Unknown => false,
            });
            if done {
                for tl in tails {
                    if let Tail::Values(vals) = tl {
                        vs.extend(vals);
                    }
                }
                resolved = true;
                break;
            }
        }
        let rigorous = resolved || finite_top.is_some();
        if !rigorous {
            notes.push(format!("SmallPointUnbounded: small points not certified up to degree {cap}"));
        }
        boxes.push(BoxBound { x: r as u64, rigorous, source: BoxSource::ConditionV, min_max: a });
    }
    if zero {
        vs.insert(0);
    }
    zero = vs.contains_zero();
    let mut rep = CountReport::new(vs.len() as u64, b, boxes, zero, t0);
    rep.notes = notes;
    Ok(rep)
}

/// Integer pairs with `0 < |F(x, y)| ≤ A` and `A^{1/d} Δ ≤ |y| ≤ y_cap`.
/// Always reported as a lower bound: the scan stops at `y_cap`.
pub fn count_large_y(f: &BinaryForm, a: u64, delta: f64, y_cap: u64) -> Result<CountReport, CountError> {
    check_integral(f)?;
    if !f.has_nonzero_disc() {
        return Err(FormError::RepeatedRoot.into());
    }
    let t0 = Instant::now();
    let d = f.degree() as f64;
    let y_min = ((a.max(1) as f64).powf(1.0 / d) * delta).ceil().max(1.0) as u64;
    let bx = BoxBound { x: y_cap, rigorous: false, source: BoxSource::UserCap, min_max: 0 };
    if y_min > y_cap {
        return Ok(CountReport::new(0, a, vec![bx], false, t0));
    }
    let planner = RowPlanner::new(f);
    let fallback_x = {
        let rs = f.roots(1e-12)?;
        let m = rs.finite().iter().map(|z| z.norm()).fold(0.0, f64::max);
        ((m + 2.0) * y_cap as f64) as i64
    };
    let per_row: Vec<u64> = (y_min..=y_cap)
        .into_par_iter()
        .map(|y| {
            let y = y as i64;
            let ranges = match &planner {
                Some(p) => p.ranges(y, a),
                None => vec![(-fallback_x, fallback_x)],
            };
            let mut n = 0;
            for (lo, hi) in ranges {
                for x in lo..=hi {
                    if let Ok(CappedInteger::Exact(v)) = f.evaluate(x, y, a as u128) {
                        n += (v != 0) as u64;
                    }
                }
            }
            n
        })
        .collect();
    // (x, y) and (−x, −y) give the same |F|
    let count = 2 * per_row.iter().sum::<u64>();
    Ok(CountReport::new(count, a, vec![bx], false, t0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    #[serde(rename = "B")]
    pub b: u64,
    pub count: u64,
    pub ratio: f64,
}

/// `(B, count, count / B^e)` for each `B`.
pub fn fit_report<C>(bs: &[u64], exponent: f64, mut counter: C) -> Result<Vec<FitRow>, CountError>
where
    C: FnMut(u64) -> Result<CountReport, CountError>,
{
    if bs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CountError::Invalid("B values must be increasing".into()));
    }
    bs.iter()
        .map(|&b| {
            let r = counter(b)?;
            let ratio = if exponent == 0.0 { r.count as f64 } else { r.count as f64 / (b as f64).powf(exponent) };
            Ok(FitRow { b, count: r.count, ratio })
        })
        .collect()
}

pub fn fit_csv(rows: &[FitRow]) -> String {
    let mut s = String::from("B,count,ratio\n");
    for r in rows {
        s.push_str(&format!("{},{},{}\n", r.b, r.count, r.ratio));
    }
    s
}

/// The count with `m = 0` left out.
pub fn count_without_zero(r: &CountReport) -> u64 {
    r.count - r.zero_included as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{lform, qplus, SquarefreeSequence};

    fn q23() -> BinaryForm {
        qplus(2, 3, &SquarefreeSequence::full()).unwrap()
    }

    #[test]
    fn value_set_bitmap_and_set_agree() {
        let mut a = ValueSet::new(1000);
        let mut b = ValueSet::new(1 << 40);
        for m in [-1000i128, -3, 0, 0, 7, 999, 1000] {
            a.insert(m);
            b.insert(m);
        }
        assert!(!a.insert(1001));
        assert_eq!(a.to_vec(), vec![-1000, -3, 0, 7, 999, 1000]);
        assert_eq!(a.to_vec(), b.to_vec());
        assert_eq!(a.len(), 6);
    }

    #[test]
    fn qplus_values_up_to_100() {
        let f = q23();
        let bx = search_box(&f, 100, None, 0);
        assert_eq!(bx.x, 4);
        assert!(bx.rigorous);
        let vs = represented_values(&f, 100, &bx).unwrap();
        assert_eq!(vs.to_vec(), vec![0, 1, 2, 6, 16, 30, 32, 45, 81, 96]);
        assert_eq!(count_nn(&f, 0, &CountOptions::default()).unwrap().count, 1);
    }

    #[test]
    fn l55_box_and_values() {
        let f = lform(5, 5).unwrap();
        let t = regularity(&FamilyId::Lfamily);
        let bx = search_box(&f, 10, Some(&t), 0);
        assert_eq!(bx.x, 17);
        let vs = represented_values(&f, 10, &bx).unwrap();
        assert_eq!(vs.to_vec(), vec![-1, 0, 1]);
        let r = count_r(&FamilyId::Lfamily, 5, 10, 0, &CountOptions::default()).unwrap();
        assert_eq!(r.count, 3);
        assert!(r.rigorous);
    }

    #[test]
    fn cubic_common_values() {
        let f1 = BinaryForm::from_ints(&[1, 0, 0, 1]).unwrap();
        let f2 = BinaryForm::from_ints(&[1, 0, 0, 2]).unwrap();
        let opts = CountOptions { user_cap: 4, ..Default::default() };
        let r = count_common(&f1, &f2, 2, &opts).unwrap();
        assert_eq!(r.count, 5);
        assert!(!r.rigorous);
        assert_eq!(search_box(&f1, 10, None, 7).source, BoxSource::UserCap);
    }

    #[test]
    fn pythagorean_common_value() {
        let f1 = q23();
        let f2 = qplus(2, 1, &SquarefreeSequence::full()).unwrap();
        let (_, vals) = common_values(&f1, &f2, 1462, &CountOptions::default()).unwrap();
        assert!(vals.contains(&1462));
    }

    #[test]
    fn m_counts() {
        let f = BinaryForm::from_ints(&[1, 0, 0, 2]).unwrap();
        assert_eq!(count_m(&f, &f, 0, false).unwrap().count, 1);
        assert_eq!(count_m(&f, &f, 0, true).unwrap().count, 0);
        // brute force over the 81 pairs of points
        let pts: Vec<(i64, i64)> = (-1..=1).flat_map(|y| (-1..=1).map(move |x| (x, y))).collect();
        let val = |p: &(i64, i64)| p.0.pow(3) + 2 * p.1.pow(3);
        let brute = pts.iter().flat_map(|p| pts.iter().map(move |q| (p, q))).filter(|(p, q)| val(p) == val(q)).count();
        assert_eq!(count_m(&f, &f, 1, false).unwrap().count, brute as u64);
    }

    #[test]
    fn row_windows_keep_points_far_from_the_real_root() {
        // (−4, 21) sits near Re of the complex roots, not near the real one
        let f = BinaryForm::from_ints(&[3, 0, 0, -1]).unwrap();
        let bx = BoxBound { x: 21, rigorous: false, source: BoxSource::UserCap, min_max: 2 };
        let fast = represented_values(&f, 9562, &bx).unwrap().to_vec();
        let slow: Vec<i128> = naive_values(&f, 9562, 21, 2).unwrap().into_iter().collect();
        assert_eq!(fast, slow);
        assert!(fast.contains(&-9453));
    }

    #[test]
    fn large_y_empty_for_definite_forms() {
        let f = BinaryForm::from_ints(&[1, 0, 1]).unwrap();
        assert_eq!(count_large_y(&f, 100, 1.01, 1000).unwrap().count, 0);
        let g = BinaryForm::from_ints(&[1, 0, 0, 2]).unwrap();
        let a = count_large_y(&g, 1000, 10.0, 10_000).unwrap().count;
        let b = count_large_y(&g, 1000, 10.0, 100_000).unwrap().count;
        assert!(a <= b);
        assert_eq!(count_large_y(&g, 1000, 1e9, 100).unwrap().count, 0);
    }

    #[test]
    fn fit_rows() {
        let f = q23();
        let rows = fit_report(&[10, 100], 0.0, |b| count_nn(&f, b, &CountOptions::default())).unwrap();
        assert_eq!(rows[1].ratio, 10.0);
        assert!(fit_csv(&rows).starts_with("B,count,ratio\n"));
    }
}
