//! Modified Bessel function of the first kind, evaluated in log space.
//!
//! Three regimes cover real orders `ν > -1` and all `x >= 0`:
//!
//! * `ν >= 20`: Debye's uniform asymptotic expansion with sixteen correction
//!   polynomials `U_k(p)`, generated once from their recurrence.
//! * `ν < 20`, `x <= 40`: the ascending power series.
//! * `ν < 20`, `x > 40`: Hankel's large-argument expansion. The neglected
//!   recessive part is `O(e^{-2x})` relative.
//!
//! The kernel returns `ln(e^{-x} I_ν(x))` so that callers can cancel the
//! exponential growth against `e^{-(y+w)}` analytically.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{domain, Result};

const DEBYE_MIN_ORDER: f64 = 20.0;
const SERIES_MAX_X: f64 = 40.0;
const DEBYE_TERMS: usize = 16;

/// `ln I_ν(x)`.
pub fn bessel_i_log_scaled(order: f64, x: f64) -> Result<f64> {
    check(order, x)?;
    Ok(ln_bessel_i_exp_scaled(order, x) + x)
}

/// `ln(e^{-x} I_ν(x))`, finite for arguments up to `1e300`.
pub fn bessel_i_log_exp_scaled(order: f64, x: f64) -> Result<f64> {
    check(order, x)?;
    Ok(ln_bessel_i_exp_scaled(order, x))
}

fn check(order: f64, x: f64) -> Result<()> {
    if !(order >= 0.0) || !order.is_finite() {
        return Err(domain("order", order, "Bessel order must be finite and >= 0"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain("x", x, "Bessel argument must be finite and >= 0"));
    }
    Ok(())
}

/// Unchecked kernel; accepts orders in `(-1, ∞)`.
pub(crate) fn ln_bessel_i_exp_scaled(order: f64, x: f64) -> f64 {
    debug_assert!(order > -1.0 && x >= 0.0);
    if x == 0.0 {
        return if order == 0.0 {
            0.0
        } else if order > 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    if order >= DEBYE_MIN_ORDER {
        debye(order, x)
    } else if x <= SERIES_MAX_X {
        power_series(order, x)
    } else {
        hankel(order, x)
    }
}

fn power_series(order: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let ln_first = order * (0.5 * x).ln() - libm::lgamma(order + 1.0);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (order + k));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    ln_first + sum.ln() - x
}

fn hankel(order: f64, x: f64) -> f64 {
    let mu = 4.0 * order * order;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut k = 0.0;
    loop {
        k += 1.0;
        let odd = 2.0 * k - 1.0;
        let next = -term * (mu - odd * odd) / (8.0 * k * x);
        if next == 0.0 || next.abs() < 1e-17 * sum.abs() {
            sum += next;
            break;
        }
        // asymptotic series: stop at the smallest term
        if next.abs() > term.abs() && k > 2.0 * order + 1.0 {
            break;
        }
        sum += next;
        term = next;
    }
    sum.ln() - 0.5 * (2.0 * PI * x).ln()
}

fn debye(order: f64, x: f64) -> f64 {
    let s = order.hypot(x);
    let p = order / s;
    let lead = order * order / (s + x) + order * (x / (order + s)).ln() - 0.5 * (2.0 * PI * s).ln();

    let polys = debye_polynomials();
    let mut corr = 0.0;
    let mut scale = 1.0;
    for u in polys.iter().skip(1) {
        scale /= order;
        let term = eval_poly(u, p) * scale;
        corr += term;
        if term.abs() < 1e-17 {
            break;
        }
    }
    lead + corr.ln_1p()
}

fn eval_poly(coeffs: &[f64], p: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * p + c)
}

/// `U_0 .. U_16`, from `U_{k+1} = ½p²(1-p²)U_k' + ⅛∫_0^p (1-5t²)U_k dt`.
fn debye_polynomials() -> &'static [Vec<f64>] {
    static POLYS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    POLYS.get_or_init(|| {
        let mut polys = vec![vec![1.0]];
        for _ in 0..DEBYE_TERMS {
            let u = polys.last().unwrap();
            let mut next = vec![0.0; u.len() + 3];
            // ½ p² (1 - p²) U'
            for i in 1..u.len() {
                let d = i as f64 * u[i];
                next[i + 1] += 0.5 * d;
                next[i + 3] -= 0.5 * d;
            }
            // ⅛ ∫ (1 - 5t²) U
            for (i, &c) in u.iter().enumerate() {
                next[i + 1] += 0.125 * c / (i as f64 + 1.0);
                next[i + 3] -= 0.625 * c / (i as f64 + 3.0);
            }
            polys.push(next);
        }
        polys
    })
}
