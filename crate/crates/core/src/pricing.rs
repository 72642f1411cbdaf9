//! Closed-form European call prices and their Black-Scholes-family limits.
//!
//! With `ν₁ = 2 + 2/(2-α)`, `ν₂ = 2/(2-α)` and `K = E e^{-rT}`,
//!
//! ```text
//! C = S₀ Q(2z; ν₁, 2y) - K [1 - Q(2y; ν₂, 2z)]
//! ```
//!
//! Both tail probabilities are evaluated directly on the side where they
//! are small, so neither deep in- nor out-of-the-money prices go through a
//! `1 - p` subtraction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{chi_args, CevSpec, ChiSquareArgs, DriverSpec, MarketSpec, ALPHA_GUARD};
use crate::specfun::{clt_sf, ncx2_cdf_flagged, ncx2_sf_flagged, normal_cdf, NcChiSqParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PricingMethod {
    ClosedForm,
    BsLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriceDiagnostics {
    /// χ² arguments; absent when the Black-Scholes limit was used.
    pub args: Option<ChiSquareArgs>,
    /// Set when `α` was beyond the guard and the limit formula was used.
    pub guard_triggered: bool,
    /// Set when a tail probability fell back to the normal approximation.
    pub degraded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CallQuote {
    pub price: f64,
    pub method: PricingMethod,
    pub diagnostics: PriceDiagnostics,
}

/// The two tail probabilities entering the price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Tails {
    /// `Q(2z; ν₁, 2y)`.
    pub upper_plus: f64,
    /// `1 - Q(2y; ν₂, 2z)`.
    pub lower_minus: f64,
    pub degraded: bool,
}

pub(crate) fn tails(args: &ChiSquareArgs) -> Result<Tails> {
    let q1 = ncx2_sf_flagged(2.0 * args.z, NcChiSqParams::new(args.dof_plus, 2.0 * args.y)?)?;
    let p2 = ncx2_cdf_flagged(2.0 * args.y, NcChiSqParams::new(args.dof_minus, 2.0 * args.z)?)?;
    Ok(Tails {
        upper_plus: q1.value,
        lower_minus: p2.value,
        degraded: q1.degraded || p2.degraded,
    })
}

/// European call under the given driver.
///
/// Elasticities above [`ALPHA_GUARD`] are priced with [`bs_limit_price`] and
/// flagged in the diagnostics.
pub fn call_price(market: &MarketSpec, cev: &CevSpec, driver: &DriverSpec) -> Result<CallQuote> {
    market.validate()?;
    cev.validate()?;
    driver.validate()?;
    if cev.alpha > ALPHA_GUARD {
        let mut quote = bs_limit_price(market, cev.sigma, driver)?;
        quote.diagnostics.guard_triggered = true;
        return Ok(quote);
    }
    let args = chi_args(market, cev, driver)?;
    price_from_args(market, &args)
}

/// Prices from precomputed χ² arguments. Lets callers perturb `(k, y, z)`.
pub fn price_from_args(market: &MarketSpec, args: &ChiSquareArgs) -> Result<CallQuote> {
    let t = tails(args)?;
    let price = market.spot * t.upper_plus - market.discounted_strike() * t.lower_minus;
    Ok(CallQuote {
        price: price.max(0.0),
        method: PricingMethod::ClosedForm,
        diagnostics: PriceDiagnostics {
            args: Some(*args),
            guard_triggered: false,
            degraded: t.degraded,
        },
    })
}

/// Matching put `K Q(2y; ν₂, 2z) - S₀ [1 - Q(2z; ν₁, 2y)]`, from the
/// complementary tails. Accurate where the call is deep in the money.
pub(crate) fn put_from_args(market: &MarketSpec, args: &ChiSquareArgs) -> Result<f64> {
    let q2 = ncx2_sf_flagged(2.0 * args.y, NcChiSqParams::new(args.dof_minus, 2.0 * args.z)?)?;
    let p1 = ncx2_cdf_flagged(2.0 * args.z, NcChiSqParams::new(args.dof_plus, 2.0 * args.y)?)?;
    Ok((market.discounted_strike() * q2.value - market.spot * p1.value).max(0.0))
}

/// `d₁, d₂` of the Black-Scholes-family limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BsLimitArgs {
    pub d1: f64,
    pub d2: f64,
}

/// `d₁, d₂` for effective variance `σ²(βT + γT^{2H})`.
pub fn bs_limit_args(market: &MarketSpec, sigma: f64, driver: &DriverSpec) -> Result<BsLimitArgs> {
    let var = sigma * sigma * driver.effective_time(market.maturity);
    if !(var > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    let sd = var.sqrt();
    let d1 = ((market.spot / market.strike).ln() + market.rate * market.maturity + 0.5 * var) / sd;
    Ok(BsLimitArgs { d1, d2: d1 - sd })
}

/// Black-Scholes, fractional Black-Scholes or mixed-fractional
/// Black-Scholes price, depending on the driver.
pub fn bs_limit_price(market: &MarketSpec, sigma: f64, driver: &DriverSpec) -> Result<CallQuote> {
    market.validate()?;
    driver.validate()?;
    let d = bs_limit_args(market, sigma, driver)?;
    let price = market.spot * normal_cdf(d.d1) - market.discounted_strike() * normal_cdf(d.d2);
    Ok(CallQuote {
        price: price.max(0.0),
        method: PricingMethod::BsLimit,
        diagnostics: PriceDiagnostics {
            args: None,
            guard_triggered: false,
            degraded: false,
        },
    })
}

/// Normal approximation `Q(m; ν, λ) ≈ Q_N((m - ν - λ)/√(2(ν + 2λ)))`.
pub fn q_normal_approx(m: f64, nu: f64, lambda: f64) -> f64 {
    clt_sf(m, nu, lambda)
}
