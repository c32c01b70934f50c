//! Areas `A_F` of the regions `{(x, y) ∈ ℝ² : |F(x, y)| ≤ 1}`.
//!
//! With `x = uv, y = v` the area becomes `∫_ℝ |F(u, 1)|^{−2/d} du`, which
//! is what [`crate::quadrature`] integrates. Also here: the family sums
//! `Σ_ν A_{Q±_{d,ν}}`, the pieces of `A_{L_{d,p}}`, and the weight `W`.

use crate::arith::{rat, ratio, rational_to_f64};
use crate::families::{lform, qminus, qplus, FamilyError, SquarefreeSequence};
use crate::forms::{shear_nonzero_lead, BinaryForm, ExactRoot, FormError};
use crate::quadrature::{integrate_pieces, PowerSum, QuadError, QuadratureResult};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AreaError {
    #[error("areas need degree at least 3, got {0}")]
    DegreeTooSmall(usize),
    #[error("W is only defined here for the trivial, ±Id and Klein groups (order {0})")]
    UnsupportedGroup(usize),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Shape of `Aut(F, ℚ)` as far as the weight `W` is concerned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutClass {
    Trivial,
    PlusMinus,
    Klein,
    Other(usize),
}

/// `W({Id}) = 1`, `W({±Id}) = 1/2`, `W(Klein) = 1/4`.
pub fn w_coeff(class: AutClass) -> Result<BigRational, AreaError> {
    match class {
        AutClass::Trivial => Ok(rat(1)),
        AutClass::PlusMinus => Ok(ratio(1, 2)),
        AutClass::Klein => Ok(ratio(1, 4)),
        AutClass::Other(n) => Err(AreaError::UnsupportedGroup(n)),
    }
}

/// `1e-8` up to degree 10, `1e-6` above.
pub fn default_tol(d: usize) -> f64 {
    if d <= 10 {
        1e-8
    } else {
        1e-6
    }
}

const MAX_PANELS: usize = 1_000_000;

fn exact_to_complex(t: &ExactRoot, numeric: Complex64) -> Complex64 {
    match t {
        ExactRoot::Rational(q) => Complex64::new(rational_to_f64(q), 0.0),
        ExactRoot::QuadraticSurd { r, s, m } => {
            let (r, s) = (rational_to_f64(r), rational_to_f64(s));
            let root = (num_traits::ToPrimitive::to_f64(&m.abs()).unwrap()).sqrt();
            if m.is_positive() {
                Complex64::new(r + s * root, 0.0)
            } else {
                // keep the sign of the imaginary part the solver reported
                Complex64::new(r, (s * root).abs() * numeric.im.signum())
            }
        }
        _ => {
            if numeric.im.abs() <= 1e-12 * (1.0 + numeric.norm()) {
                Complex64::new(numeric.re, 0.0)
            } else {
                numeric
            }
        }
    }
}

/// Integrand data `|F(u, 1)|^{−2/d}` for a form with `F(1, 0) ≠ 0`.
fn power_sum(f: &BinaryForm) -> Result<PowerSum, AreaError> {
    let d = f.degree();
    let rs = f.roots(1e-15)?;
    let roots: Vec<Complex64> = rs
        .exact_tags
        .iter()
        .zip(&rs.points)
        .map(|(t, p)| exact_to_complex(t, p.finite().expect("leading coefficient is nonzero")))
        .collect();
    let alpha = 2.0 / d as f64;
    let lc = -alpha * rational_to_f64(f.leading()).abs().ln();
    Ok(PowerSum { roots, alpha, terms: vec![(vec![true; d], lc)] })
}

fn prepared(f: &BinaryForm) -> Result<BinaryForm, AreaError> {
    let d = f.degree();
    if d < 3 {
        return Err(AreaError::DegreeTooSmall(d));
    }
    if !f.has_nonzero_disc() {
        return Err(FormError::RepeatedRoot.into());
    }
    if f.leading().is_zero() {
        // a unimodular shear moves the root at infinity; the area is unchanged
        return Ok(BinaryForm::new(shear_nonzero_lead(f.coeffs()))?);
    }
    Ok(f.clone())
}

/// `A_F` to absolute tolerance `tol`. Pieces are the stretches between
/// consecutive real roots of `F(u, 1)`.
pub fn area(f: &BinaryForm, tol: f64) -> Result<QuadratureResult, AreaError> {
    let g = prepared(f)?;
    let h = power_sum(&g)?;
    let mut reals: Vec<f64> = h.roots.iter().filter(|z| z.im == 0.0).map(|z| z.re).collect();
    reals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut cuts = vec![f64::NEG_INFINITY];
    cuts.extend(reals);
    cuts.push(f64::INFINITY);
    let intervals: Vec<(f64, f64)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
    Ok(integrate_pieces(&h, &intervals, tol, MAX_PANELS)?)
}

/// `Σ_ν A_{Q_{d,ν}}` computed two ways.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefReport {
    pub d: u32,
    /// The single integral `∫ Σ_n |u² ± μ_n|^{1/d} / |G_d(u)|^{1/d} du`.
    pub combined: f64,
    pub combined_error: f64,
    /// Sum of the individual areas.
    pub per_nu: f64,
    pub per_nu_error: f64,
    pub agree: bool,
}

fn coef(d: u32, tol: f64, plus: bool) -> Result<CoefReport, AreaError> {
    let seq = if plus { SquarefreeSequence::full() } else { SquarefreeSequence::shifted() };
    let mu = seq.prefix(d as usize + 1)?;
    let mut roots = Vec::new();
    for &m in &mu {
        let r = (m as f64).sqrt();
        if plus {
            roots.push(Complex64::new(0.0, r));
            roots.push(Complex64::new(0.0, -r));
        } else {
            roots.push(Complex64::new(r, 0.0));
            roots.push(Complex64::new(-r, 0.0));
        }
    }
    let n = roots.len();
    let terms = (0..=d as usize)
        .map(|nu| ((0..n).map(|j| j / 2 != nu).collect(), 0.0))
        .collect();
    let h = PowerSum { roots, alpha: 1.0 / d as f64, terms };
    let combined = integrate_pieces(&h, &[(f64::NEG_INFINITY, f64::INFINITY)], tol, MAX_PANELS)?;
    let mut per = 0.0;
    let mut per_err = 0.0;
    let share = tol / (d + 1) as f64;
    for nu in 1..=d + 1 {
        let f = if plus { qplus(d, nu, &seq)? } else { qminus(d, nu, &seq)? };
        let r = area(&f, share)?;
        per += r.value;
        per_err += r.abs_error_estimate;
    }
    let agree = (combined.value - per).abs() <= 10.0 * tol;
    Ok(CoefReport {
        d,
        combined: combined.value,
        combined_error: combined.abs_error_estimate,
        per_nu: per,
        per_nu_error: per_err,
        agree,
    })
}

/// `Σ_{ν=1}^{d+1} A_{Q⁺_{d,ν}}` with `μ_n = q_n`.
pub fn coef_qplus(d: u32, tol: f64) -> Result<CoefReport, AreaError> {
    coef(d, tol, true)
}

/// `Σ_{ν=1}^{d+1} A_{Q⁻_{d,ν}}` with `μ_n = q_{n+1}`.
pub fn coef_qminus(d: u32, tol: f64) -> Result<CoefReport, AreaError> {
    coef(d, tol, false)
}

/// Lower and upper bounds `π√d/√λ` and `π√e(√d + 1)`.
pub fn coef_bounds(d: u32, lambda: &BigRational) -> (f64, f64) {
    let pi = std::f64::consts::PI;
    let df = d as f64;
    (pi * df.sqrt() / rational_to_f64(lambda).sqrt(), pi * std::f64::consts::E.sqrt() * (df.sqrt() + 1.0))
}

/// `A_{L_{d,p}}`.
pub fn area_l(d: u32, p: u64, tol: f64) -> Result<QuadratureResult, AreaError> {
    let f = lform(d, p)?;
    area(&f, tol)
}

/// The `d + 3` integrals over `(−∞, −½]`, the windows `[n − ½, n + ½]`
/// for `0 ≤ n ≤ d − 2`, the middle stretch `[d − 3/2, p − ½]`, the window
/// around `p` and `[p + ½, ∞)`.
pub fn area_l_pieces(d: u32, p: u64, tol: f64) -> Result<Vec<(String, f64)>, AreaError> {
    let f = lform(d, p)?;
    let h = power_sum(&f)?;
    let mut labels = vec!["tail-".to_string()];
    let mut iv = vec![(f64::NEG_INFINITY, -0.5)];
    for n in 0..=d as i64 - 2 {
        labels.push(format!("window {n}"));
        iv.push((n as f64 - 0.5, n as f64 + 0.5));
    }
    let pf = p as f64;
    labels.push("middle".into());
    iv.push((d as f64 - 1.5, pf - 0.5));
    labels.push(format!("window {p}"));
    iv.push((pf - 0.5, pf + 0.5));
    labels.push("tail+".into());
    iv.push((pf + 0.5, f64::INFINITY));
    let r = integrate_pieces(&h, &iv, tol, MAX_PANELS)?;
    Ok(labels.into_iter().zip(r.pieces.into_iter().map(|x| x.value)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::RationalMatrix;

    fn agm(mut a: f64, mut b: f64) -> f64 {
        for _ in 0..40 {
            let (x, y) = ((a + b) / 2.0, (a * b).sqrt());
            a = x;
            b = y;
        }
        a
    }

    #[test]
    fn quartic_fermat_area() {
        // Γ(1/4)² = (2π)^{3/2} / AGM(1, √2)
        let pi = std::f64::consts::PI;
        let g2 = (2.0 * pi).powf(1.5) / agm(1.0, 2f64.sqrt());
        let want = g2 / (2.0 * pi.sqrt());
        let f = BinaryForm::from_ints(&[1, 0, 0, 0, 1]).unwrap();
        let r = area(&f, 1e-10).unwrap();
        assert!((r.value - want).abs() < 1e-8, "{} vs {want}", r.value);
        assert!((want - 3.7081).abs() < 1e-4);
    }

    #[test]
    fn qplus23_elliptic() {
        let k = std::f64::consts::PI / (2.0 * agm(1.0, 0.5f64.sqrt()));
        let f = BinaryForm::from_ints(&[1, 0, 3, 0, 2]).unwrap();
        let r = area(&f, 1e-10).unwrap();
        assert!((r.value - 2f64.sqrt() * k).abs() < 1e-8);
    }

    #[test]
    fn scaling_and_composition() {
        let f = BinaryForm::from_ints(&[1, -1, -2, 5]).unwrap();
        let a = area(&f, 1e-9).unwrap().value;
        let g = f.compose(&RationalMatrix::from_ints(2, 0, 0, 1).unwrap());
        assert!((area(&g, 1e-9).unwrap().value - a / 2.0).abs() < 1e-7);
        let h = f.scale(&rat(10)).unwrap();
        assert!((area(&h, 1e-9).unwrap().value - a * 10f64.powf(-2.0 / 3.0)).abs() < 1e-7);
        let s = f.compose(&RationalMatrix::from_ints(1, 1, 0, 1).unwrap());
        assert!((area(&s, 1e-9).unwrap().value - a).abs() < 1e-7);
    }

    #[test]
    fn root_at_infinity() {
        let f = BinaryForm::from_ints(&[0, 1, -1, 0]).unwrap(); // XY(X − Y)
        let g = BinaryForm::from_ints(&[1, -1, 0, 0]).unwrap(); // X²(X − Y)
        assert!(area(&g, 1e-8).is_err());
        let a = area(&f, 1e-8).unwrap().value;
        assert!(a > 0.0 && a.is_finite());
        assert!(matches!(area(&BinaryForm::from_ints(&[1, 0, 1]).unwrap(), 1e-8), Err(AreaError::DegreeTooSmall(2))));
    }

    #[test]
    fn weights() {
        assert_eq!(w_coeff(AutClass::Klein).unwrap(), ratio(1, 4));
        assert!(w_coeff(AutClass::Other(6)).is_err());
    }

    #[test]
    fn coef_two_ways_agree() {
        let r = coef_qplus(2, 1e-8).unwrap();
        assert!(r.agree, "{r:?}");
        let r = coef_qminus(2, 1e-8).unwrap();
        assert!(r.agree, "{r:?}");
    }

    #[test]
    fn l_pieces_sum_to_area() {
        let pieces = area_l_pieces(7, 7, 1e-9).unwrap();
        assert_eq!(pieces.len(), 10);
        let s: f64 = pieces.iter().map(|p| p.1).sum();
        let a = area_l(7, 7, 1e-9).unwrap().value;
        assert!((s - a).abs() < 1e-7);
    }
}
