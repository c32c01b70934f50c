//! Small exact-arithmetic helpers shared by the other modules: rational
//! parsing, primality, squarefree parts, integer and rational roots, and
//! rational reconstruction of floating-point values.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Parse `"p"`, `"-p"` or `"p/q"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Render a rational as `"p"` or `"p/q"`.
pub fn rational_to_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Best-effort conversion of a rational to `f64`, robust for huge parts.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = (nb - db - 60).max(0) as usize;
    let shift_d = (db - nb - 60).max(0) as usize;
    let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (q.denom() >> shift_d).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi(shift as i32 - shift_d as i32)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primes_below(n: u64) -> Vec<u64> {
    (2..n).filter(|&k| is_prime(k)).collect()
}

/// Prime factorisation of a small positive integer by trial division.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    n > 0 && factor_u64(n).iter().all(|&(_, e)| e == 1)
}

pub fn euler_phi(n: u64) -> u64 {
    factor_u64(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Squarefree kernel of a nonzero integer: `n = s * k^2` with `s`
/// squarefree and carrying the sign of `n`. Returns `(s, k)`.
///
/// Trial division only goes up to a bound; a large unfactored cofactor is
/// kept in `s` unless it is a perfect square. That is enough for the
/// discriminants that occur here, which are small.
pub fn squarefree_decompose(n: &BigInt) -> (BigInt, BigInt) {
    assert!(!n.is_zero());
    let sign = n.sign();
    let mut m = n.abs();
    let mut s = BigInt::one();
    let mut k = BigInt::one();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(1u64 << 20);
    while &p * &p <= m && p < limit {
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e > 0 {
            k *= p.pow(e / 2);
            if e % 2 == 1 {
                s *= &p;
            }
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if !m.is_one() {
        let r = m.sqrt();
        if &r * &r == m {
            k *= r;
        } else {
            s *= m;
        }
    }
    if sign == Sign::Minus {
        s = -s;
    }
    (s, k)
}

/// Exact integer `d`-th root of a nonnegative integer, if it exists.
pub fn exact_nth_root(n: &BigInt, d: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(d);
    if r.pow(d) == *n {
        Some(r)
    } else {
        None
    }
}

/// `λ` with `λ^d = c` over ℚ. For even `d` the positive root is returned;
/// for odd `d` the unique real root.
pub fn rational_dth_root(c: &BigRational, d: u32) -> Option<BigRational> {
    if c.is_zero() || d == 0 {
        return None;
    }
    if d == 1 {
        return Some(c.clone());
    }
    let neg = c.is_negative();
    if neg && d % 2 == 0 {
        return None;
    }
    let n = exact_nth_root(&c.numer().abs(), d)?;
    let m = exact_nth_root(&c.denom().abs(), d)?;
    let r = BigRational::new(n, m);
    Some(if neg { -r } else { r })
}

/// Continued-fraction convergent of `x` with the largest denominator not
/// exceeding `max_den`.
pub fn best_rational(x: f64, max_den: u64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e30 {
            break;
        }
        let ai = a as i128;
        let p2 = ai.checked_mul(p1)?.checked_add(p0)?;
        let q2 = ai.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den as i128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    Some(BigRational::new(BigInt::from(p1), BigInt::from(q1)))
}

/// p-adic valuation of a nonzero rational.
pub fn vp(t: &BigRational, p: u64) -> Option<i64> {
    if t.is_zero() || p < 2 {
        return None;
    }
    let p = BigInt::from(p);
    let count = |n: &BigInt| {
        let mut n = n.abs();
        let mut e = 0i64;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        e
    };
    Some(count(t.numer()) - count(t.denom()))
}

/// Least common multiple of the denominators of a slice of rationals.
pub fn denominator_lcm(qs: &[BigRational]) -> BigInt {
    qs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Nonnegative integer `⌈x⌉` for a finite nonnegative float.
pub fn ceil_u64(x: f64) -> u64 {
    if x <= 0.0 {
        0
    } else if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x.ceil() as u64
    }
}

/// Smallest integer `X ≥ 0` with `X^e ≥ c^e · b`, decided exactly.
pub fn ceil_kappa_root(c: &BigRational, b: u64, e: u32) -> u64 {
    // X^e * den^e >= num^e * b
    let num = c.numer().pow(e) * BigInt::from(b);
    let den = c.denom().pow(e);
    let target = num.div_ceil(&den);
    let mut x = target.nth_root(e);
    while x.pow(e) * &den < c.numer().pow(e) * BigInt::from(b) {
        x += 1u32;
    }
    while x > BigInt::zero() && (&x - 1u32).pow(e) * &den >= c.numer().pow(e) * BigInt::from(b) {
        x -= 1u32;
    }
    x.to_u64().unwrap_or(u64::MAX)
}
