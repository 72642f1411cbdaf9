//! Independent checks of the closed forms: direct integration of the
//! discounted payoff against the transition density, finite differences of
//! the price, and Euler simulation of the classical diffusion.

mod fd;
mod mc;
pub mod quadrature;

pub use fd::{fd_cross_check, fd_greek, FdCrossCheck, FdSteps, Greek};
pub use mc::{mc_price_classical, McEstimate, McSettings};

use serde::Serialize;

use crate::density::ln_density_in_w;
use crate::error::{domain, Result};
use crate::model::{chi_args, CevSpec, ChiSquareArgs, DriverSpec, MarketSpec};
use quadrature::integrate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Probability mass the integration range must cover.
    pub tail_quantile: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            max_subdivisions: 2000,
            tail_quantile: 1.0 - 1e-12,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1e-3) {
            return Err(domain("rel_tol", self.rel_tol, "rel_tol must lie in (0, 1e-3)"));
        }
        if !(self.tail_quantile > 0.99 && self.tail_quantile < 1.0) {
            return Err(domain(
                "tail_quantile",
                self.tail_quantile,
                "tail_quantile must lie in (0.99, 1)",
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(domain("max_subdivisions", 0.0, "need at least one subdivision"));
        }
        Ok(())
    }
}

/// Breakpoints in `w` from `lo` to a cut-off beyond which the density,
/// weighted by `1 + S_T`, has dropped below `(1 - tail_quantile) · 1e-6`
/// of its peak. `stretch` multiplies the distance to the cut-off.
fn w_breakpoints(args: &ChiSquareArgs, alpha: f64, lo: f64, tail_quantile: f64, stretch: f64) -> Vec<f64> {
    let centre = args.y + 0.5;
    let sd = (2.0 * args.y + 1.0).sqrt();
    let ln_weighted = |w: f64| ln_density_in_w(w, args) + (1.0 + args.s_of(w, alpha)).ln();
    let start = lo.max(centre);
    let peak = ln_weighted(start);
    let drop = ((1.0 - tail_quantile) * 1e-6).ln();
    let mut hi = start + 8.0 * sd;
    while ln_weighted(hi) - peak > drop {
        hi += 2.0 * sd;
    }
    hi = start + stretch * (hi - start);
    let mut pts = vec![lo];
    for j in -12..=12 {
        let p = centre + j as f64 * sd;
        if p > lo && p < hi {
            pts.push(p);
        }
    }
    pts.push(hi);
    pts
}

/// `e^{-rT} ∫_E^∞ (S_T - E) P(S_T) dS_T`, integrated in `w = k S_T^{2-α}`.
pub fn quadrature_price(
    market: &MarketSpec,
    cev: &CevSpec,
    driver: &DriverSpec,
    settings: &QuadratureSettings,
) -> Result<f64> {
    quadrature_price_stretched(market, cev, driver, settings, 1.0)
}

/// [`quadrature_price`] with the upper cut-off pushed `stretch` times further out.
pub fn quadrature_price_stretched(
    market: &MarketSpec,
    cev: &CevSpec,
    driver: &DriverSpec,
    settings: &QuadratureSettings,
    stretch: f64,
) -> Result<f64> {
    settings.validate()?;
    let args = chi_args(market, cev, driver)?;
    let alpha = cev.alpha;
    let pts = w_breakpoints(&args, alpha, args.z, settings.tail_quantile, stretch);
    let strike = market.strike;
    let r = integrate(
        |w| (args.s_of(w, alpha) - strike) * ln_density_in_w(w, &args).exp(),
        &pts,
        settings.rel_tol,
        0.0,
        settings.max_subdivisions,
    )?;
    Ok((-market.rate * market.maturity).exp() * r.value)
}

/// Surviving probability mass and discounted mean of `S_T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityDiagnostics {
    pub mass: f64,
    pub discounted_mean: f64,
}

pub fn density_diagnostics(market: &MarketSpec, cev: &CevSpec, driver: &DriverSpec) -> Result<DensityDiagnostics> {
    let settings = QuadratureSettings::default();
    let args = chi_args(market, cev, driver)?;
    let alpha = cev.alpha;
    let pts = w_breakpoints(&args, alpha, 0.0, settings.tail_quantile, 1.0);
    let mass = integrate(
        |w| ln_density_in_w(w, &args).exp(),
        &pts,
        settings.rel_tol,
        0.0,
        settings.max_subdivisions,
    )?;
    let mean = integrate(
        |w| args.s_of(w, alpha) * ln_density_in_w(w, &args).exp(),
        &pts,
        settings.rel_tol,
        0.0,
        settings.max_subdivisions,
    )?;
    Ok(DensityDiagnostics {
        mass: mass.value,
        discounted_mean: (-market.rate * market.maturity).exp() * mean.value,
    })
}
