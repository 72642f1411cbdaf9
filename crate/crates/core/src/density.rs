//! Transition density of `S_T` given `S_0`.
//!
//! In `w = k S_T^{2-α}` the density is `(y/w)^{q/2} e^{-y-w} I_q(2√(yw))`
//! with `q = 1/(2-α)`; the density in `S_T` follows from `dw/dS_T`. Every
//! factor is combined in log space. The result is not renormalised: the
//! missing mass is the probability of absorption at zero.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::model::{chi_args, CevSpec, ChiSquareArgs, DriverSpec, MarketSpec};
use crate::specfun::bessel_log_kernel;

const UNDERFLOW_LOG: f64 = -700.0;

/// A density value at a terminal price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityPoint {
    pub s_t: f64,
    pub value: f64,
}

/// Density of `S_T` per unit of currency.
pub fn transition_density(s_t: f64, market: &MarketSpec, cev: &CevSpec, driver: &DriverSpec) -> Result<f64> {
    if !(s_t > 0.0) || !s_t.is_finite() {
        return Err(domain("s_T", s_t, "terminal price must be finite and > 0"));
    }
    let args = chi_args(market, cev, driver)?;
    Ok(density_in_s(s_t, &args, cev.alpha))
}

/// [`transition_density`] over a list of terminal prices, sharing one set
/// of χ² arguments.
pub fn density_curve(
    prices: &[f64],
    market: &MarketSpec,
    cev: &CevSpec,
    driver: &DriverSpec,
) -> Result<Vec<DensityPoint>> {
    let args = chi_args(market, cev, driver)?;
    prices
        .iter()
        .map(|&s_t| {
            if !(s_t > 0.0) || !s_t.is_finite() {
                return Err(domain("s_T", s_t, "terminal price must be finite and > 0"));
            }
            Ok(DensityPoint {
                s_t,
                value: density_in_s(s_t, &args, cev.alpha),
            })
        })
        .collect()
}

/// `ln p_w(w)`; `w >= 0`.
pub fn ln_density_in_w(w: f64, args: &ChiSquareArgs) -> f64 {
    let q = 0.5 * args.dof_minus;
    let y = args.y;
    if w == 0.0 {
        // (y/w)^{q/2} I_q(2√(yw)) → y^q / Γ(q+1)
        return q * y.ln() - y - libm::lgamma(q + 1.0);
    }
    let gap = y.sqrt() - w.sqrt();
    0.5 * q * (y.ln() - w.ln()) - gap * gap + bessel_log_kernel(q, 2.0 * (y * w).sqrt())
}

/// Density in `w`, underflowing to zero below `e^{-700}`.
pub fn density_in_w(w: f64, args: &ChiSquareArgs) -> f64 {
    clamp_exp(ln_density_in_w(w, args))
}

pub(crate) fn density_in_s(s_t: f64, args: &ChiSquareArgs, alpha: f64) -> f64 {
    let p = 2.0 - alpha;
    let w = args.w_of(s_t, alpha);
    // dw/dS = (2-α) k S^{1-α}
    let ln_jac = p.ln() + args.k.ln() + (1.0 - alpha) * s_t.ln();
    clamp_exp(ln_density_in_w(w, args) + ln_jac)
}

fn clamp_exp(v: f64) -> f64 {
    if v < UNDERFLOW_LOG {
        0.0
    } else {
        v.exp()
    }
}
