//! The exponents `η_d`, `κ_d`, `θ_d`, `η′` and the inequalities relating
//! them. Values are `f64`; the branches that are rational (`κ_3`, `κ_d`
//! for `d ≥ 9`, `η_d` and `θ_d` for `d ≥ 21`) are also available exactly.

use crate::arith::{rat, ratio, rational_to_f64};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("degree {0} is below 3")]
pub struct DegreeTooSmall(pub u32);

fn need(d: u32) -> Result<(), DegreeTooSmall> {
    if d < 3 {
        Err(DegreeTooSmall(d))
    } else {
        Ok(())
    }
}

pub fn eta(d: u32) -> Result<f64, DegreeTooSmall> {
    need(d)?;
    let df = d as f64;
    Ok(match d {
        3 => 2.0 / 9.0 + 73.0 / (108.0 * 3f64.sqrt()),
        4..=20 => 1.0 / (2.0 * df) + 9.0 / (4.0 * df * df.sqrt()),
        _ => 1.0 / df,
    })
}

pub fn kappa(d: u32) -> Result<f64, DegreeTooSmall> {
    need(d)?;
    let df = d as f64;
    Ok(match d {
        3 => 12.0 / 19.0,
        4..=8 => 3.0 / ((df - 2.0) * df.sqrt() + 3.0),
        _ => 1.0 / (df - 1.0),
    })
}

/// `θ_d = dη_d / (dη_d + d − 2)`.
pub fn theta(d: u32) -> Result<f64, DegreeTooSmall> {
    let de = d as f64 * eta(d)?;
    Ok(de / (de + d as f64 - 2.0))
}

pub fn eta_exact(d: u32) -> Option<BigRational> {
    (d >= 21).then(|| ratio(1, d as i64))
}

pub fn kappa_exact(d: u32) -> Option<BigRational> {
    match d {
        3 => Some(ratio(12, 19)),
        9.. => Some(ratio(1, d as i64 - 1)),
        _ => None,
    }
}

/// `θ_d` as an exact rational when `η_d` is rational.
pub fn theta_exact(d: u32) -> Option<BigRational> {
    let e = eta_exact(d)?;
    let de = rat(d as i64) * e;
    Some(&de / (&de + rat(d as i64 - 2)))
}

/// `η′` is `η_d` when `F₁F₂` has no zero in `ℙ¹(ℝ)`, and `θ_d` otherwise.
pub fn eta_prime(d: u32, pair_has_real_projective_zero: bool) -> Result<f64, DegreeTooSmall> {
    if pair_has_real_projective_zero {
        theta(d)
    } else {
        eta(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentRow {
    pub d: u32,
    pub eta: f64,
    pub kappa: f64,
    pub theta: f64,
}

pub fn table(dmax: u32) -> Vec<ExponentRow> {
    (3..=dmax)
        .map(|d| ExponentRow { d, eta: eta(d).unwrap(), kappa: kappa(d).unwrap(), theta: theta(d).unwrap() })
        .collect()
}

/// Thousandths of `x` cut toward zero, the convention of the printed
/// three-decimal table (`κ_4 = 0.42857…` is listed as `0.428`).
pub fn truncated_thousandths(x: f64) -> i64 {
    (x * 1000.0 + 1e-9).floor() as i64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InequalityFailure {
    pub chain: String,
    pub d: u32,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InequalityReport {
    pub dmax: u32,
    pub checks: usize,
    pub failures: Vec<InequalityFailure>,
}

impl InequalityReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Check the four chains for `3 ≤ d ≤ dmax`:
/// `1/d ≤ η_d ≤ θ_d < 2/d`; `κ_d < θ_d` up to 20 and `κ_d = θ_d` after;
/// `θ_{2d}` against `1/(d+1)`; `θ_d` against `2/(d+1)`.
pub fn verify_inequalities(dmax: u32) -> InequalityReport {
    let mut r = InequalityReport { dmax, checks: 0, failures: Vec::new() };
    let check = |r: &mut InequalityReport, chain: &'static str, d: u32, ok: bool, detail: String| {
        r.checks += 1;
        if !ok {
            r.failures.push(InequalityFailure { chain: chain.to_string(), d, detail });
        }
    };
    for d in 3..=dmax {
        let (e, k, t) = (eta(d).unwrap(), kappa(d).unwrap(), theta(d).unwrap());
        let df = d as f64;
        let ok = 1.0 / df <= e + 1e-15 && e <= t && eta_prime(d, false).unwrap() <= eta_prime(d, true).unwrap() && t < 2.0 / df;
        check(&mut r, "eta-theta", d, ok, format!("eta={e}, theta={t}"));
        if d <= 20 {
            check(&mut r, "kappa-theta", d, k < t, format!("kappa={k}, theta={t}"));
        } else {
            let (ke, te) = (kappa_exact(d).unwrap(), theta_exact(d).unwrap());
            let ok = ke == te && te == ratio(1, d as i64 - 1) && (rational_to_f64(&te) - t).abs() < 1e-15;
            check(&mut r, "kappa-theta", d, ok, format!("kappa={ke}, theta={te}"));
        }
        if 2 * d <= dmax {
            let t2 = theta(2 * d).unwrap();
            let b = 1.0 / (df + 1.0);
            let ok = if d <= 3 { t2 > b } else { t2 < b };
            check(&mut r, "theta2d", d, ok, format!("theta_{}={t2}, 1/(d+1)={b}", 2 * d));
        }
        if d >= 4 {
            let b = 2.0 / (df + 1.0);
            let ok = if d <= 5 { t > b } else { t < b };
            check(&mut r, "theta-2/(d+1)", d, ok, format!("theta={t}, 2/(d+1)={b}"));
        }
    }
    r
}
