//! Adaptive Gauss–Kronrod (7/15) quadrature for integrands of the shape
//! `h(u) = Σ_ν C_ν ∏_{j ∈ S_ν} |u − ξ_j|^{−α}` over the real line.
//!
//! Each real root gets a window where `u = r ± s^m`, `m = 1/(1 − α)`,
//! which cancels the `|u − r|^{−α}` singularity. Tails `|u| ≥ R` are
//! mapped by `u = ±1/s`. All panels then share one global error budget.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("tolerance {tol:e} not met after {panels} panels (estimate {err:e}, value {value})")]
    ToleranceNotMet { tol: f64, err: f64, value: f64, panels: usize },
    #[error("exponent {0} is not in (0, 1)")]
    BadExponent(f64),
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Kronrod rule on `[a, b]`: `(value, |K − G|)`.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// `h(u) = Σ_ν exp(log_c_ν) ∏_{j ∈ S_ν} |u − ξ_j|^{−α}`.
#[derive(Debug, Clone)]
pub struct PowerSum {
    pub roots: Vec<Complex64>,
    pub alpha: f64,
    /// `(membership mask over roots, log C_ν)`.
    pub terms: Vec<(Vec<bool>, f64)>,
}

/// Where a panel lives and how its parameter maps back to `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Map {
    Plain,
    /// `u = r + sign · s^m` around real root `i`.
    Root { i: usize, r: f64, sign: f64, m: f64 },
    /// `u = sign / s`.
    Tail { sign: f64 },
}

impl PowerSum {
    fn log_term(&self, mask: &[bool], u: f64, skip: Option<usize>) -> f64 {
        let mut l = 0.0;
        for (j, z) in self.roots.iter().enumerate() {
            if mask[j] && Some(j) != skip {
                l += (Complex64::new(u, 0.0) - z).norm().ln();
            }
        }
        l
    }

    fn eval(&self, map: Map, s: f64) -> f64 {
        let a = self.alpha;
        match map {
            Map::Plain => self.terms.iter().map(|(m, lc)| (lc - a * self.log_term(m, s, None)).exp()).sum(),
            Map::Root { i, r, sign, m } => {
                // h(u) du with |u − r| = s^m written exactly
                let t = s.powf(m);
                let u = r + sign * t;
                let jac_log = m.ln() + (m - 1.0) * s.ln();
                self.terms
                    .iter()
                    .map(|(mask, lc)| {
                        let rest = self.log_term(mask, u, Some(i));
                        if mask[i] {
                            // s^{m−1} s^{−mα} = 1
                            (lc + m.ln() - a * rest).exp()
                        } else if s == 0.0 {
                            0.0
                        } else {
                            (lc + jac_log - a * rest).exp()
                        }
                    })
                    .sum()
            }
            Map::Tail { sign } => {
                // u = sign/s: ∏|u − ξ|^{−α} du = s^{kα − 2} ∏|1 − sign·ξ s|^{−α} ds
                self.terms
                    .iter()
                    .map(|(mask, lc)| {
                        let mut l = 0.0;
                        let mut k = 0usize;
                        for (j, z) in self.roots.iter().enumerate() {
                            if mask[j] {
                                k += 1;
                                l += (Complex64::new(1.0, 0.0) - z * (sign * s)).norm().ln();
                            }
                        }
                        let p = k as f64 * a - 2.0;
                        let sp = if p.abs() < 1e-12 { 1.0 } else { s.powf(p) };
                        sp * (lc - a * l).exp()
                    })
                    .sum()
            }
        }
    }

    /// Real roots (as `(index, value)`), sorted by value.
    fn real_roots(&self) -> Vec<(usize, f64)> {
        let mut v: Vec<(usize, f64)> = self
            .roots
            .iter()
            .enumerate()
            .filter(|(_, z)| z.im == 0.0)
            .map(|(i, z)| (i, z.re))
            .collect();
        v.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        v
    }

    /// Radius beyond which the tail map is used.
    fn tail_radius(&self) -> f64 {
        let m = self.roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
        (2.0 * m).max(2.0)
    }
}

/// Integral over one labelled interval, with diagnostics per panel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Piece {
    #[serde(with = "endpoint")]
    pub a: f64,
    #[serde(with = "endpoint")]
    pub b: f64,
    pub value: f64,
    pub error: f64,
}

/// Interval endpoints may be infinite; JSON has no infinity, so these
/// are written as the strings `"inf"` and `"-inf"`.
mod endpoint {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        match *x {
            f64::INFINITY => Repr::Text("inf".into()),
            f64::NEG_INFINITY => Repr::Text("-inf".into()),
            v => Repr::Num(v),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) if t == "-inf" => Ok(f64::NEG_INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("bad endpoint {t:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub pieces: Vec<Piece>,
    pub panels: usize,
}

#[derive(Debug, Clone)]
struct Panel {
    piece: usize,
    map: Map,
    s0: f64,
    s1: f64,
    value: f64,
    err: f64,
}

struct ByErr(Panel);

impl PartialEq for ByErr {
    fn eq(&self, o: &Self) -> bool {
        self.0.err == o.0.err
    }
}
impl Eq for ByErr {}
impl PartialOrd for ByErr {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for ByErr {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.err.total_cmp(&o.0.err)
    }
}

/// Initial panels covering `[a, b]` (either end may be infinite).
fn plan(h: &PowerSum, a: f64, b: f64) -> Vec<(Map, f64, f64)> {
    let m = 1.0 / (1.0 - h.alpha);
    let reals = h.real_roots();
    let r_tail = h.tail_radius().max(if a.is_finite() { a.abs() + 1.0 } else { 0.0 }).max(if b.is_finite() { b.abs() + 1.0 } else { 0.0 });
    let lo = if a.is_finite() { a } else { -r_tail };
    let hi = if b.is_finite() { b } else { r_tail };
    let mut out = Vec::new();
    if !a.is_finite() {
        out.push((Map::Tail { sign: -1.0 }, 0.0, 1.0 / r_tail));
    }
    // windows around real roots lying in [lo, hi]
    let mut cuts: Vec<(f64, f64, Option<(usize, f64)>)> = Vec::new();
    for (k, &(i, r)) in reals.iter().enumerate() {
        if r < lo - 1e-15 || r > hi + 1e-15 {
            continue;
        }
        let mut gap = f64::INFINITY;
        if k > 0 {
            gap = gap.min(r - reals[k - 1].1);
        }
        if k + 1 < reals.len() {
            gap = gap.min(reals[k + 1].1 - r);
        }
        let w = (gap / 2.0).min(0.5);
        cuts.push(((r - w).max(lo), (r + w).min(hi), Some((i, r))));
    }
    let mut x = lo;
    for (c0, c1, root) in cuts {
        if c0 > x {
            out.push((Map::Plain, x, c0));
        }
        let (i, r) = root.unwrap();
        if r > c0 {
            out.push((Map::Root { i, r, sign: -1.0, m }, 0.0, (r - c0).powf(1.0 / m)));
        }
        if c1 > r {
            out.push((Map::Root { i, r, sign: 1.0, m }, 0.0, (c1 - r).powf(1.0 / m)));
        }
        x = c1.max(x);
    }
    if hi > x {
        out.push((Map::Plain, x, hi));
    }
    if !b.is_finite() {
        out.push((Map::Tail { sign: 1.0 }, 0.0, 1.0 / r_tail));
    }
    out
}

/// `∫` of `h` over each of the given intervals with one shared absolute
/// tolerance. Panels are refined by largest error first.
pub fn integrate_pieces(h: &PowerSum, intervals: &[(f64, f64)], tol: f64, max_panels: usize) -> Result<QuadratureResult, QuadError> {
    if !(h.alpha > 0.0 && h.alpha < 1.0) {
        return Err(QuadError::BadExponent(h.alpha));
    }
    let mut heap = BinaryHeap::new();
    let mut piece_bounds = Vec::new();
    for (p, &(a, b)) in intervals.iter().enumerate() {
        piece_bounds.push((a, b));
        for (map, s0, s1) in plan(h, a, b) {
            if s1 <= s0 {
                continue;
            }
            let (value, err) = gk15(&|s| h.eval(map, s), s0, s1);
            heap.push(ByErr(Panel { piece: p, map, s0, s1, value, err }));
        }
    }
    let total_err = |heap: &BinaryHeap<ByErr>| heap.iter().map(|p| p.0.err).sum::<f64>();
    let mut err = total_err(&heap);
    let mut steps = 0usize;
    while err > tol && heap.len() < max_panels {
        let ByErr(p) = heap.pop().unwrap();
        let mid = 0.5 * (p.s0 + p.s1);
        if mid <= p.s0 || mid >= p.s1 {
            heap.push(ByErr(Panel { err: 0.0, ..p }));
            continue;
        }
        err -= p.err;
        for (s0, s1) in [(p.s0, mid), (mid, p.s1)] {
            let (value, e) = gk15(&|s| h.eval(p.map, s), s0, s1);
            err += e;
            heap.push(ByErr(Panel { piece: p.piece, map: p.map, s0, s1, value, err: e }));
        }
        steps += 1;
        // the running sum drifts; recompute it now and then
        if steps % 64 == 0 {
            err = total_err(&heap);
        }
    }
    let mut panels: Vec<Panel> = heap.into_iter().map(|b| b.0).collect();
    // fixed order makes the sum independent of refinement history
    panels.sort_by(|x, y| (x.piece, map_key(&x.map), x.s0.to_bits()).cmp(&(y.piece, map_key(&y.map), y.s0.to_bits())));
    let n = panels.len();
    let mut pieces: Vec<Piece> = piece_bounds.iter().map(|&(a, b)| Piece { a, b, value: 0.0, error: 0.0 }).collect();
    for p in &panels {
        pieces[p.piece].value += p.value;
        pieces[p.piece].error += p.err;
    }
    let value: f64 = pieces.iter().map(|p| p.value).sum();
    let err: f64 = pieces.iter().map(|p| p.error).sum();
    if err > tol {
        return Err(QuadError::ToleranceNotMet { tol, err, value, panels: n });
    }
    Ok(QuadratureResult { value, abs_error_estimate: err, pieces, panels: n })
}

fn map_key(m: &Map) -> (u8, u64, u64) {
    match *m {
        Map::Tail { sign } => (if sign < 0.0 { 0 } else { 4 }, 0, 0),
        Map::Plain => (2, 0, 0),
        Map::Root { r, sign, .. } => (if sign < 0.0 { 1 } else { 3 }, r.to_bits(), 0),
    }
}
