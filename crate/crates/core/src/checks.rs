//! Executable checks of the analytic lemmas used by the counting and area
//! estimates. Each check returns a [`CheckOutcome`]; a failing outcome
//! always carries a witness with the inputs and both sides.
//!
//! Inequalities whose margin can drop under double-precision noise are
//! compared in 256-bit floating point (about 77 digits).

use crate::arith::primes_below;
use crate::counting::{common_values, CountOptions};
use crate::families::{cyclotomic_form, lform, qminus, qplus, SquarefreeSequence};
use crate::forms::{root_proximity_constants, BinaryForm};
use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Default seed of the randomized sweeps.
pub const DEFAULT_SEED: u64 = 0xF0EB;

const PREC: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub parameters: BTreeMap<String, String>,
    pub observed: f64,
    pub bound: f64,
    pub pass: bool,
    pub witness: Option<String>,
}

impl CheckOutcome {
    fn new(name: &str, params: &[(&str, String)]) -> Self {
        CheckOutcome {
            name: name.to_string(),
            parameters: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            observed: 0.0,
            bound: 0.0,
            pass: true,
            witness: None,
        }
    }

    /// Record a failure; only the first witness is kept.
    fn fail(&mut self, w: String) {
        self.pass = false;
        self.witness.get_or_insert(w);
    }
}

/// High-precision helpers around a constants cache.
struct Hp {
    cc: Consts,
}

impl Hp {
    fn new() -> Self {
        Hp { cc: Consts::new().expect("constants cache") }
    }

    fn int(&mut self, n: &BigInt) -> BigFloat {
        BigFloat::parse(&n.to_string(), Radix::Dec, PREC, RM, &mut self.cc)
    }

    fn ln_int(&mut self, n: &BigInt) -> BigFloat {
        let x = self.int(n);
        self.ln(&x)
    }

    fn ln(&mut self, x: &BigFloat) -> BigFloat {
        x.ln(PREC, RM, &mut self.cc)
    }

    fn exp(&mut self, x: &BigFloat) -> BigFloat {
        x.exp(PREC, RM, &mut self.cc)
    }

    fn e(&mut self) -> BigFloat {
        self.cc.e(PREC, RM)
    }

    fn pi(&mut self) -> BigFloat {
        self.cc.pi(PREC, RM)
    }

    fn to_f64(&mut self, x: &BigFloat) -> f64 {
        x.format(Radix::Dec, RM, &mut self.cc).ok().and_then(|s| s.parse().ok()).unwrap_or(f64::NAN)
    }
}

fn u(n: u64) -> BigFloat {
    BigFloat::from_u64(n, PREC)
}

fn add(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.add(b, PREC, RM)
}

fn sub(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.sub(b, PREC, RM)
}

fn mul(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.mul(b, PREC, RM)
}

fn div(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.div(b, PREC, RM)
}

/// `a ≥ b` up to `1e-60`: equality cases such as `max(n, d−n) = d/2`
/// meet in two different rounding paths.
fn ge_rounding(a: &BigFloat, b: &BigFloat) -> bool {
    let slack = BigFloat::from_f64(1e-60, PREC);
    le(&sub(b, &slack), a)
}

fn lt(a: &BigFloat, b: &BigFloat) -> bool {
    matches!(a.cmp(b), Some(c) if c < 0)
}

fn le(a: &BigFloat, b: &BigFloat) -> bool {
    matches!(a.cmp(b), Some(c) if c <= 0)
}

/// `N^N e^{−N} √(2πN) < N! < N^N e^{−N} √(2πN) e^{1/(12N)}` for
/// `1 ≤ N ≤ nmax`, compared in logarithms of the exact factorials.
/// `observed` is the smallest of the two log-margins.
pub fn stirling_check(nmax: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("stirling", &[("nmax", nmax.to_string())]);
    let mut hp = Hp::new();
    let two_pi = mul(&u(2), &hp.pi());
    let mut fact = BigInt::one();
    let mut worst = f64::INFINITY;
    for n in 1..=nmax {
        fact *= n;
        let nf = u(n);
        let ln_fact = hp.ln_int(&fact);
        let ln_n = hp.ln(&nf);
        let half = div(&hp.ln(&mul(&two_pi, &nf)), &u(2));
        let lower = add(&sub(&mul(&nf, &ln_n), &nf), &half);
        let upper = add(&lower, &div(&u(1), &u(12 * n)));
        let m1 = sub(&ln_fact, &lower);
        let m2 = sub(&upper, &ln_fact);
        worst = worst.min(hp.to_f64(&m1)).min(hp.to_f64(&m2));
        if !(lt(&lower, &ln_fact) && lt(&ln_fact, &upper)) {
            let (l, f, u) = (hp.to_f64(&lower), hp.to_f64(&ln_fact), hp.to_f64(&upper));
            out.fail(format!("N = {n}: ln lower = {l}, ln N! = {f}, ln upper = {u}"));
        }
    }
    out.observed = worst;
    out
}

/// Tail `Σ_{n≥m} n^{−δ}` by Euler–Maclaurin with three Bernoulli terms.
fn em_tail(delta: f64, m: f64) -> f64 {
    let d = delta;
    let f = m.powf(-d);
    m.powf(1.0 - d) / (d - 1.0) + f / 2.0 + d * f / (12.0 * m) - d * (d + 1.0) * (d + 2.0) * f / (720.0 * m.powi(3))
        + d * (d + 1.0) * (d + 2.0) * (d + 3.0) * (d + 4.0) * f / (30240.0 * m.powi(5))
}

fn partial(delta: f64, from: u64, to: u64) -> f64 {
    // Smallest terms first.
    (from..to).rev().map(|n| (n as f64).powf(-delta)).sum()
}

/// `ζ(δ)` from 63 explicit terms and the Euler–Maclaurin tail at 64.
pub fn zeta(delta: f64) -> f64 {
    partial(delta, 1, 64) + em_tail(delta, 64.0)
}

/// `Σ_{n≥B} n^{−δ} ≤ ζ(δ) B^{1−δ}`. The left side is `terms` explicit
/// terms plus an Euler–Maclaurin tail, the right side uses the same `ζ`.
/// The two sides agree exactly for `B = 1`, so a relative slack of
/// `1e-12` absorbs rounding only.
pub fn zeta_tail_check(delta: f64, b: u64, terms: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new(
        "zeta-tail",
        &[("delta", delta.to_string()), ("B", b.to_string()), ("terms", terms.to_string())],
    );
    let terms = terms.max(64);
    let lhs = if b == 1 {
        zeta(delta)
    } else {
        partial(delta, b, b + terms) + em_tail(delta, (b + terms) as f64)
    };
    let rhs = zeta(delta) * (b as f64).powf(1.0 - delta);
    out.observed = lhs;
    out.bound = rhs;
    if !(delta > 1.0) || lhs > rhs * (1.0 + 1e-12) {
        out.fail(format!("delta = {delta}, B = {b}: tail = {lhs}, bound = {rhs}"));
    }
    out
}

/// Reduced fractions `p/q` with `|ξ − p/q| ≤ κ/q^s` for some
/// representation with `Q₁ ≤ q ≤ Q₂`.
pub fn hooley_fractions(xi: f64, kappa: f64, s: f64, q1: u64, q2: u64) -> BTreeSet<(i64, u64)> {
    let mut out = BTreeSet::new();
    for q in q1..=q2 {
        let qf = q as f64;
        let r = kappa / qf.powf(s);
        let lo = ((xi - r) * qf).ceil() as i64;
        let hi = ((xi + r) * qf).floor() as i64;
        for p in lo - 1..=hi + 1 {
            if (xi - p as f64 / qf).abs() <= r {
                let g = p.unsigned_abs().gcd(&q);
                out.insert((p / g as i64, q / g));
            }
        }
    }
    out
}

pub fn hooley_bound(kappa: f64, s: f64, q1: u64, q2: u64) -> f64 {
    let lead = 2f64.powf(s + 1.0) * kappa / ((2f64.powf(s - 2.0) - 1.0) * (q1 as f64).powf(s - 2.0));
    lead + ((q2 as f64 / q1 as f64).ln() / 2f64.ln()).ceil()
}

/// The counting lemma on one instance. Fractions are counted reduced and
/// distinct; `observed` is the count.
pub fn hooley_count_check(xi: f64, kappa: f64, s: f64, q1: u64, q2: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new(
        "hooley",
        &[
            ("xi", xi.to_string()),
            ("kappa", kappa.to_string()),
            ("s", s.to_string()),
            ("Q1", q1.to_string()),
            ("Q2", q2.to_string()),
        ],
    );
    let fr = hooley_fractions(xi, kappa, s, q1, q2);
    out.observed = fr.len() as f64;
    out.bound = hooley_bound(kappa, s, q1, q2);
    if !(s > 2.0 && kappa > 0.0 && q2 > q1 && q1 >= 1) {
        out.fail("parameters outside s > 2, kappa > 0, Q2 > Q1 >= 1".into());
    } else if out.observed > out.bound {
        out.fail(format!("count {} > bound {} with fractions {:?}", out.observed, out.bound, fr));
    }
    out
}

/// `count` seeded random instances (`ξ ∈ [−3, 3]`, `κ ∈ (0, 2]`,
/// `s ∈ [2.1, 5]`, `Q₂ ≤ 512`) after the `√2` example. `observed` is the
/// largest `count / bound`.
pub fn hooley_sweep(count: usize, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("hooley", &[("instances", count.to_string()), ("seed", format!("{seed:#x}"))]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inst = vec![(2f64.sqrt(), 1.0, 3.0, 1u64, 8u64)];
    while inst.len() < count {
        let q2 = rng.random_range(2..=512u64);
        let q1 = rng.random_range(1..q2);
        inst.push((rng.random_range(-3.0..3.0), rng.random_range(1e-3..=2.0), rng.random_range(2.1..=5.0), q1, q2));
    }
    let mut worst = 0f64;
    for (xi, k, s, q1, q2) in inst {
        let r = hooley_count_check(xi, k, s, q1, q2);
        worst = worst.max(r.observed / r.bound);
        if !r.pass {
            out.fail(format!("{:?}: {}", r.parameters, r.witness.unwrap_or_default()));
        }
    }
    out.observed = worst;
    out.bound = 1.0;
    out
}

/// For `1 ≤ m < d ≤ dmax` and `1 ≤ n ≤ d`:
/// `(d/m − 1)^{d−m} ≥ e^{−m/e}`, `n!(d−n)!/n^d ≥ e^{−(1+1/e)d}`, and
/// `(n!(d−n)!)^{1/d} ≥ e^{−1−1/e}·max(n, d−n) ≥ d/(2e^{1+1/e}) ≥ d/(2e²)`.
/// All sides are compared as logarithms; `observed` is the least margin.
pub fn minoration_check(dmax: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("minoration", &[("dmax", dmax.to_string())]);
    let mut hp = Hp::new();
    let inv_e = div(&u(1), &hp.e());
    let c = add(&u(1), &inv_e);
    let ln2 = hp.ln(&u(2));
    let ln_n: Vec<BigFloat> = (0..=dmax).map(|n| if n == 0 { u(0) } else { hp.ln(&u(n)) }).collect();
    let mut ln_fact = vec![u(0)];
    let mut fact = BigInt::one();
    for n in 1..=dmax {
        fact *= n;
        let v = hp.ln_int(&fact);
        ln_fact.push(v);
    }
    let mut worst = f64::INFINITY;
    let mut margin = |hp: &mut Hp, out: &mut CheckOutcome, lhs: &BigFloat, rhs: &BigFloat, what: String| {
        let m = sub(lhs, rhs);
        worst = worst.min(hp.to_f64(&m));
        if !ge_rounding(lhs, rhs) {
            let (l, r) = (hp.to_f64(lhs), hp.to_f64(rhs));
            out.fail(format!("{what}: ln lhs = {l}, ln rhs = {r}"));
        }
    };
    for d in 2..=dmax {
        let df = u(d);
        for m in 1..d {
            // (d − m)·ln((d − m)/m) ≥ −m/e
            let lhs = mul(&u(d - m), &sub(&ln_n[(d - m) as usize], &ln_n[m as usize]));
            let rhs = mul(&u(m), &inv_e).neg();
            margin(&mut hp, &mut out, &lhs, &rhs, format!("(d/m - 1)^(d-m), d = {d}, m = {m}"));
        }
        let two_e2 = add(&ln2, &u(2));
        let ln_d = &ln_n[d as usize];
        for n in 1..=d {
            let lf = add(&ln_fact[n as usize], &ln_fact[(d - n) as usize]);
            let lhs = sub(&lf, &mul(&df, &ln_n[n as usize]));
            let rhs = mul(&c, &df).neg();
            margin(&mut hp, &mut out, &lhs, &rhs, format!("n!(d-n)!/n^d, d = {d}, n = {n}"));
            let root = div(&lf, &df);
            let mx = n.max(d - n) as usize;
            let a = sub(&ln_n[mx], &c);
            margin(&mut hp, &mut out, &root, &a, format!("(n!(d-n)!)^(1/d) vs max, d = {d}, n = {n}"));
            let b = sub(&sub(ln_d, &ln2), &c);
            margin(&mut hp, &mut out, &a, &b, format!("max vs d/(2e^(1+1/e)), d = {d}, n = {n}"));
            let e2 = sub(ln_d, &two_e2);
            margin(&mut hp, &mut out, &b, &e2, format!("d/(2e^(1+1/e)) vs d/(2e^2), d = {d}"));
        }
    }
    out.observed = worst;
    out
}

/// `1·3·5···(2d−3)` exactly.
pub fn odd_double_factorial(d: u64) -> BigInt {
    (1..d).fold(BigInt::one(), |acc, k| acc * (2 * k - 1))
}

/// `(1·3···(2d−3))^{1/d} / (2d/e)` within `[0.9, 1.1]` for `d ≥ 50`,
/// moving toward 1 along the sorted list, and the Stirling sandwich
/// `(2d/e)^d √2/((2d−1)e^{1/12d}) ≤ 1·3···(2d−3) ≤ (2d/e)^d √2 e^{1/24d}/(2d−1)`.
/// `observed` is the ratio at the largest `d`.
pub fn factorielles_check(dlist: &[u64]) -> CheckOutcome {
    let mut ds: Vec<u64> = dlist.to_vec();
    ds.sort_unstable();
    ds.dedup();
    let mut out = CheckOutcome::new("factorielles", &[("d", format!("{ds:?}"))]);
    let mut hp = Hp::new();
    let ln2 = hp.ln(&u(2));
    let mut prev: Option<f64> = None;
    for &d in &ds {
        if d < 3 {
            out.fail(format!("d = {d} is below 3"));
            continue;
        }
        let df = u(d);
        let lp = hp.ln_int(&odd_double_factorial(d));
        // d·ln(2d/e) + ln√2 − ln(2d − 1)
        let core = sub(&add(&mul(&df, &sub(&hp.ln(&u(2 * d)), &u(1))), &div(&ln2, &u(2))), &hp.ln(&u(2 * d - 1)));
        let lower = sub(&core, &div(&u(1), &u(12 * d)));
        let upper = add(&core, &div(&u(1), &u(24 * d)));
        if !(le(&lower, &lp) && le(&lp, &upper)) {
            let (l, p, u) = (hp.to_f64(&lower), hp.to_f64(&lp), hp.to_f64(&upper));
            out.fail(format!("sandwich at d = {d}: {l} <= {p} <= {u}"));
        }
        let ln_ratio = sub(&div(&lp, &df), &sub(&hp.ln(&u(2 * d)), &u(1)));
        let r = hp.exp(&ln_ratio);
        let ratio = hp.to_f64(&r);
        if d >= 50 && !(0.9..=1.1).contains(&ratio) {
            out.fail(format!("ratio {ratio} at d = {d} outside [0.9, 1.1]"));
        }
        if let Some(p) = prev {
            if (ratio - 1.0).abs() >= (p - 1.0).abs() {
                out.fail(format!("ratio {ratio} at d = {d} no closer to 1 than {p}"));
            }
        }
        prev = Some(ratio);
        out.observed = ratio;
    }
    out.bound = 1.0;
    out
}

type Poly3 = BTreeMap<[u32; 3], BigInt>;

fn poly_mul(a: &Poly3, b: &Poly3) -> Poly3 {
    let mut out = Poly3::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
            *out.entry(e).or_insert_with(BigInt::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn poly_add(a: &Poly3, b: &Poly3, sign: i32) -> Poly3 {
    let mut out = a.clone();
    for (e, c) in b {
        *out.entry(*e).or_insert_with(BigInt::zero) += c * sign;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `F(v_i, Y)` as a polynomial in `(U, X, Y)` with `v` the index of the
/// first variable.
fn form_in(f: &BinaryForm, var: usize) -> Poly3 {
    let d = f.degree() as u32;
    let mut out = Poly3::new();
    for (i, c) in f.coeffs().iter().enumerate() {
        if !c.is_zero() {
            let mut e = [0, 0, i as u32];
            e[var] = d - i as u32;
            out.insert(e, c.to_integer());
        }
    }
    out
}

fn poly(terms: &[(i64, [u32; 3])]) -> Poly3 {
    terms.iter().map(|&(c, e)| (e, BigInt::from(c))).collect()
}

/// Primitive Pythagorean triples `(y, u, x)` with `y² + u² = x²`, `y` odd,
/// ordered by hypotenuse then odd leg.
pub fn pythagorean_triples(count: usize) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    let mut limit = 16u64;
    while out.len() < count {
        out.clear();
        for m in 2u64.. {
            if m * m + 1 > limit {
                break;
            }
            for n in 1..m {
                if (m - n) % 2 == 1 && m.gcd(&n) == 1 && m * m + n * n <= limit {
                    out.push((m * m - n * n, 2 * m * n, m * m + n * n));
                }
            }
        }
        out.sort_by_key(|&(y, _, x)| (x, y));
        limit *= 2;
    }
    out.truncate(count);
    out
}

/// `Q⁺_{2,3}(X,Y) − Q⁺_{2,1}(U,Y) = (−U²+X²−Y²)(U²+X²+4Y²)` by full
/// expansion, then each triple's common value `m = Q⁺_{2,3}(x,y) =
/// Q⁺_{2,1}(u,y)` is looked up in the common values up to the largest `m`.
pub fn jb_identity_check(triple_count: usize) -> CheckOutcome {
    let mut out = CheckOutcome::new("jb-identity", &[("triples", triple_count.to_string())]);
    let seq = SquarefreeSequence::full();
    let (f23, f21) = match (qplus(2, 3, &seq), qplus(2, 1, &seq)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => {
            out.fail("could not build the two forms".into());
            return out;
        }
    };
    // Variables are ordered (U, X, Y).
    let lhs = poly_add(&form_in(&f23, 1), &form_in(&f21, 0), -1);
    let rhs = poly_mul(&poly(&[(-1, [2, 0, 0]), (1, [0, 2, 0]), (-1, [0, 0, 2])]), &poly(&[(1, [2, 0, 0]), (1, [0, 2, 0]), (4, [0, 0, 2])]));
    if lhs != rhs {
        out.fail(format!("expansion mismatch: {lhs:?} vs {rhs:?}"));
        return out;
    }
    let triples = pythagorean_triples(triple_count);
    let mut ms = Vec::new();
    for &(y, u, x) in &triples {
        let a = f23.evaluate_big(&BigInt::from(x), &BigInt::from(y));
        let b = f21.evaluate_big(&BigInt::from(u), &BigInt::from(y));
        if a != b {
            out.fail(format!("(y,u,x) = ({y},{u},{x}): {a} != {b}"));
            return out;
        }
        ms.push(a.to_integer().to_u64().unwrap_or(u64::MAX));
    }
    let n = ms.iter().copied().max().unwrap_or(0);
    match common_values(&f23, &f21, n, &CountOptions::default()) {
        Ok((_, vals)) => {
            let vals: BTreeSet<i128> = vals.into_iter().collect();
            let found = ms.iter().filter(|&&m| vals.contains(&(m as i128))).count();
            out.observed = found as f64;
            out.bound = ms.len() as f64;
            if found != ms.len() {
                let missing: Vec<u64> = ms.iter().copied().filter(|&m| !vals.contains(&(m as i128))).collect();
                out.fail(format!("common values missing from count_common at N = {n}: {missing:?}"));
            }
        }
        Err(e) => out.fail(format!("count_common failed: {e}")),
    }
    out.parameters.insert("N".into(), n.to_string());
    out
}

/// The forms used by the root-proximity sweep.
pub fn proximity_forms() -> Vec<(String, BinaryForm)> {
    let seq = SquarefreeSequence::full();
    let sh = SquarefreeSequence::shifted();
    vec![
        ("L_{5,5}".into(), lform(5, 5).unwrap()),
        ("Q+_{2,3}".into(), qplus(2, 3, &seq).unwrap()),
        ("Q-_{2,1}".into(), qminus(2, 1, &sh).unwrap()),
        ("X^3-2Y^3".into(), BinaryForm::from_ints(&[1, 0, 0, -2]).unwrap()),
        ("Phi_7".into(), cyclotomic_form(7).unwrap()),
    ]
}

/// `min_j |t − ξ_j| ≤ c₂|f(t)|` on `samples` seeded points per form, half
/// uniform on `[−10, 10]` and half within `10⁻³` of a real root.
/// `observed` is the largest `min_j|t − ξ_j| / (c₂|f(t)|)`.
pub fn root_proximity_check(samples: usize, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("root-proximity", &[("samples", samples.to_string()), ("seed", format!("{seed:#x}"))]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0f64;
    for (name, f) in proximity_forms() {
        let (Ok((_, c2)), Ok(rs)) = (root_proximity_constants(&f), f.roots(1e-14)) else {
            out.fail(format!("{name}: roots failed"));
            continue;
        };
        let finite = rs.finite();
        let real = rs.real_finite();
        for i in 0..samples {
            let t = if i % 2 == 1 && !real.is_empty() {
                real[rng.random_range(0..real.len())] + rng.random_range(-1e-3..1e-3)
            } else {
                rng.random_range(-10.0..10.0)
            };
            let dist = finite.iter().map(|z| (z - t).norm()).fold(f64::INFINITY, f64::min);
            let v = f.evaluate_f64(t, 1.0).abs();
            let r = dist / (c2 * v);
            if r.is_finite() {
                worst = worst.max(r);
            }
            if dist > c2 * v {
                out.fail(format!("{name}, t = {t}: min |t - xi| = {dist} > c2 |f(t)| = {}", c2 * v));
            }
        }
    }
    out.observed = worst;
    out.bound = 1.0;
    out
}

/// `Φ_p(1, 1) = p` for every prime `p < pmax`.
pub fn cyclotomic_value_check(pmax: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("cyclotomic-values", &[("pmax", pmax.to_string())]);
    let ps = primes_below(pmax);
    for &p in &ps {
        match cyclotomic_form(p).map(|f| f.evaluate_big(&BigInt::one(), &BigInt::one())) {
            Ok(v) if v == BigInt::from(p).into() => {}
            other => out.fail(format!("Phi_{p}(1,1) = {other:?}")),
        }
    }
    out.observed = ps.len() as f64;
    out.bound = ps.len() as f64;
    out
}

pub const CHECK_NAMES: [&str; 8] =
    ["stirling", "zeta-tail", "hooley", "minoration", "factorielles", "jb-identity", "root-proximity", "cyclotomic-values"];

/// The standard parameter set of a named check; `zeta-tail` expands to
/// three parameter sets.
pub fn run_check(name: &str, seed: u64) -> Option<Vec<CheckOutcome>> {
    Some(match name {
        "stirling" => vec![stirling_check(1000)],
        "zeta-tail" => vec![zeta_tail_check(2.0, 2, 1000), zeta_tail_check(2.0, 1, 1000), zeta_tail_check(1.5, 100, 1000)],
        "hooley" => vec![hooley_sweep(100, seed)],
        "minoration" => vec![minoration_check(200)],
        "factorielles" => vec![factorielles_check(&[50, 200])],
        "jb-identity" => vec![jb_identity_check(50)],
        "root-proximity" => vec![root_proximity_check(1000, seed)],
        "cyclotomic-values" => vec![cyclotomic_value_check(100)],
        _ => return None,
    })
}

/// Every check, run in parallel, reported in [`CHECK_NAMES`] order.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    CHECK_NAMES.par_iter().map(|n| run_check(n, seed).unwrap()).collect::<Vec<_>>().into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stirling_small() {
        let r = stirling_check(30);
        assert!(r.pass, "{r:?}");
        // At N = 1 the two margins are 1 − ln√(2π) and 1/12 minus that.
        assert!(r.observed > 0.0 && r.observed < 0.01);
    }

    #[test]
    fn zeta_tails() {
        assert!((zeta(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        let r = zeta_tail_check(2.0, 2, 100);
        assert!(r.pass);
        assert!((r.observed - 0.644934).abs() < 1e-6 && (r.bound - 0.822467).abs() < 1e-6);
        let r = zeta_tail_check(2.0, 1, 100);
        assert!(r.pass && r.observed == r.bound);
        assert!(zeta_tail_check(1.5, 100, 1000).pass);
    }

    #[test]
    fn hooley_sqrt2() {
        let r = hooley_count_check(2f64.sqrt(), 1.0, 3.0, 1, 8);
        assert_eq!(r.observed, 3.0);
        assert_eq!(r.bound, 19.0);
        let fr = hooley_fractions(2f64.sqrt(), 1.0, 3.0, 1, 8);
        assert_eq!(fr, BTreeSet::from([(1, 1), (2, 1), (3, 2)]));
        assert_eq!(hooley_count_check(2f64.sqrt(), 1e-9, 3.0, 1, 8).observed, 0.0);
        assert!(hooley_sweep(20, DEFAULT_SEED).pass);
    }

    #[test]
    fn minoration_small() {
        let r = minoration_check(12);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn factorielles() {
        assert_eq!(odd_double_factorial(5), BigInt::from(1 * 3 * 5 * 7));
        let r = factorielles_check(&[50, 200]);
        assert!(r.pass, "{r:?}");
        assert!(r.observed > 0.95 && r.observed < 1.0);
    }

    #[test]
    fn triples() {
        let t = pythagorean_triples(3);
        assert_eq!(t, vec![(3, 4, 5), (5, 12, 13), (15, 8, 17)]);
    }

    #[test]
    fn jb_small() {
        let r = jb_identity_check(5);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.observed, 5.0);
    }

    #[test]
    fn proximity() {
        let r = root_proximity_check(100, DEFAULT_SEED);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn cyclotomic_values() {
        assert!(cyclotomic_value_check(100).pass);
    }
}
