//! Analytic sensitivities of the call price.
//!
//! The price depends on `(S₀, σ, T, r)` only through `y`, `z` and the
//! discounted strike, and the two density terms produced by `∂/∂z` cancel
//! exactly (`S₀ f(2z; ν₁, 2y) = K f(2y; ν₁, 2z)`). Every first-order Greek is
//! therefore built from the same (negative) bracket
//!
//! ```text
//! B = S f(2z; ν₁+2, 2y) - K f(2y; ν₂, 2z)
//! ```
//!
//! times the sensitivity of `2y` to the bumped parameter, plus the explicit
//! dependence of `K` on `T` and `r`.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::model::{
    chi_args, feller_coeffs, phi_partials, variance_scale_phi, CevSpec, ChiSquareArgs, DriverSpec, FellerCoeffs,
    MarketSpec, ALPHA_GUARD,
};
use crate::pricing::tails;
use crate::specfun::{bessel_log_kernel, ln_ncx2_pdf};

fn ncx2_density(x: f64, nu: f64, lambda: f64) -> f64 {
    ln_ncx2_pdf(x, nu, lambda).exp()
}

/// `ln(-B)`. With `S = (y/k)^q e^{-rT}` and `E = (z/k)^q` both density terms
/// share one prefactor, and `I_{q+1}(x) - I_{q-1}(x) = -(2q/x) I_q(x)` gives
///
/// ```text
/// B = -(q/2) e^{-rT} k^{-q} y^{q/2-1} z^{q/2} e^{-(y+z)} I_q(2√(yz)),
/// ```
///
/// which is negative and free of cancellation.
fn ln_neg_bracket(market: &MarketSpec, args: &ChiSquareArgs) -> f64 {
    let q = 0.5 * args.dof_minus;
    let (y, z) = (args.y, args.z);
    let x = 2.0 * (y * z).sqrt();
    let gap = y.sqrt() - z.sqrt();
    (0.5 * q).ln() - market.rate * market.maturity - q * args.k.ln()
        + (0.5 * q - 1.0) * y.ln()
        + 0.5 * q * z.ln()
        + bessel_log_kernel(q, x)
        - gap * gap
}

/// Quantities shared by all Greeks at one contract.
struct Setup {
    market: MarketSpec,
    cev: CevSpec,
    driver: DriverSpec,
    fc: FellerCoeffs,
    args: ChiSquareArgs,
    /// `Q(2z; ν₁, 2y)`.
    upper_plus: f64,
    /// `1 - Q(2y; ν₂, 2z)`.
    lower_minus: f64,
    bracket: f64,
}

impl Setup {
    fn new(market: &MarketSpec, cev: &CevSpec, driver: &DriverSpec) -> Result<Self> {
        if cev.alpha > ALPHA_GUARD {
            return Err(domain(
                "alpha",
                cev.alpha,
                "analytic Greeks need alpha below the Black-Scholes guard",
            ));
        }
        let args = chi_args(market, cev, driver)?;
        let t = tails(&args)?;
        let bracket = -ln_neg_bracket(market, &args).exp();
        Ok(Self {
            market: *market,
            cev: *cev,
            driver: *driver,
            fc: feller_coeffs(cev, market.rate),
            args,
            upper_plus: t.upper_plus,
            lower_minus: t.lower_minus,
            bracket,
        })
    }

    fn k_disc(&self) -> f64 {
        self.market.discounted_strike()
    }

    fn delta(&self) -> f64 {
        let p = self.cev.power();
        self.upper_plus + 2.0 * self.args.y * p * self.bracket / self.market.spot
    }

    fn gamma(&self) -> f64 {
        let ChiSquareArgs {
            y,
            z,
            dof_plus,
            dof_minus,
            ..
        } = self.args;
        let (s, a) = (self.market.spot, self.cev.alpha);
        let p = 2.0 - a;
        let lead = 2.0 * y * p * p;
        let f_plus2 = ncx2_density(2.0 * z, dof_plus + 2.0, 2.0 * y);
        let f_plus4 = ncx2_density(2.0 * z, dof_plus + 4.0, 2.0 * y);
        let f_minus = ncx2_density(2.0 * y, dof_minus, 2.0 * z);
        let f_minus2 = ncx2_density(2.0 * y, dof_minus + 2.0, 2.0 * z);
        lead / s * (((3.0 - a) / p - y) * f_plus2 + y * f_plus4)
            + lead / (s * s) * self.k_disc() * (y * f_minus - z * f_minus2)
    }

    fn vega(&self) -> f64 {
        -4.0 * self.args.y * self.bracket / self.cev.local_vol(self.market.spot)
    }

    /// `∂C/∂T` with `∂ ln y/∂T` supplied by the caller.
    fn theta_with(&self, dlny_dt: f64) -> f64 {
        2.0 * self.args.y * dlny_dt * self.bracket + self.market.rate * self.k_disc() * self.lower_minus
    }

    /// `∂C/∂r` with `∂ ln y/∂r` supplied by the caller.
    fn rho_with(&self, dlny_dr: f64) -> f64 {
        2.0 * self.args.y * dlny_dr * self.bracket + self.market.maturity * self.k_disc() * self.lower_minus
    }

    /// Closed-form `∂ ln y/∂T` per driver.
    fn printed_dlny_dt(&self) -> f64 {
        let t = self.market.maturity;
        let b = self.fc.b;
        let phi = self.args.phi;
        match self.driver {
            DriverSpec::Classical => {
                // -r(2-α)/(e^{r(2-α)T} - 1), → -1/T as r → 0
                let bt = b * t;
                if bt == 0.0 {
                    -1.0 / t
                } else {
                    -b / bt.exp_m1()
                }
            }
            DriverSpec::Fractional { hurst } => {
                let p = self.cev.power();
                let s2 = self.cev.sigma * self.cev.sigma;
                -hurst * t.powf(2.0 * hurst - 1.0) * s2 * p * p / phi
            }
            DriverSpec::Mixed { beta, gamma, hurst } => {
                let p = self.cev.power();
                let s2 = self.cev.sigma * self.cev.sigma;
                -s2 * p * p / phi * (gamma * hurst * t.powf(2.0 * hurst - 1.0) + 0.5 * beta)
            }
        }
    }

    /// Closed-form `∂ ln y/∂r` per driver; `None` where it is singular at `r = 0`.
    fn printed_dlny_dr(&self) -> Option<f64> {
        let t = self.market.maturity;
        let r = self.market.rate;
        let p = self.cev.power();
        let s2 = self.cev.sigma * self.cev.sigma;
        let phi = self.args.phi;
        match self.driver {
            DriverSpec::Classical => {
                // 1/r - (2-α)T/(e^{r(2-α)T} - 1) = (2-α)T [1/x - 1/(e^x - 1)], x = r(2-α)T
                let x = r * p * t;
                let g = if x.abs() < 1e-4 {
                    0.5 - x / 12.0
                } else {
                    1.0 / x - 1.0 / x.exp_m1()
                };
                Some(p * t * g)
            }
            DriverSpec::Fractional { hurst } => {
                if r == 0.0 {
                    return None;
                }
                let t2h = t.powf(2.0 * hurst);
                Some(2.0 * hurst / r - hurst * p * p * s2 * t2h / (r * phi))
            }
            DriverSpec::Mixed { beta, gamma, hurst } => {
                if r == 0.0 {
                    return None;
                }
                let t2h = t.powf(2.0 * hurst);
                let frac_phi = variance_scale_phi(&self.fc, &DriverSpec::Fractional { hurst }, t).ok()?;
                let bt = r * p * t;
                let frac = gamma * (2.0 * hurst * frac_phi - hurst * p * p * s2 * t2h);
                let brownian = beta * p * s2 / (2.0 * r) * (bt.exp_m1() - bt);
                Some((frac + brownian) / (phi * r))
            }
        }
    }

    /// `(∂ ln y/∂T, ∂ ln y/∂r)` from the term-wise derivatives of `φ`.
    fn exact_dlny(&self) -> Result<(f64, f64)> {
        let (d_t, d_b) = phi_partials(&self.fc, &self.driver, self.market.maturity)?;
        let phi = self.args.phi;
        let p = self.cev.power();
        let t = self.market.maturity;
        // ln y = -ln φ + (2-α) ln S₀ + bT, b = r(2-α)
        Ok((self.fc.b - d_t / phi, p * (t - d_b / phi)))
    }
}

/// `∂C/∂S₀`.
pub fn delta(market: &MarketSpec, cev: &CevSpec, driver: &DriverSpec) -> Result<f64> {
    Ok(Setup::new(market, cev, driver)?.delta())
}

/// `∂²C/∂S₀²`.
pub fn gamma(market: &MarketSpec, cev: &CevSpec, driver: &DriverSpec) -> Result<f64> {
    Ok(Setup::new(market, cev, driver)?.gamma())
}

/// `∂C/∂ς` for the local volatility `ς = σ S₀^{(α-2)/2}` at fixed `S₀`.
pub fn vega(market: &MarketSpec, cev: &CevSpec, driver: &DriverSpec) -> Result<f64> {
    Ok(Setup::new(market, cev, driver)?.vega())
}

/// `∂C/∂T` from the closed-form time sensitivity of `y`.
pub fn theta(market: &MarketSpec, cev: &CevSpec, driver: &DriverSpec) -> Result<f64> {
    let s = Setup::new(market, cev, driver)?;
    Ok(s.theta_with(s.printed_dlny_dt()))
}

/// `∂C/∂r` from the closed-form rate sensitivity of `y`.
///
/// At `r = 0` the fractional and mixed closed forms are `0/0`; there the
/// value comes from [`rho_exact`].
pub fn rho(market: &MarketSpec, cev: &CevSpec, driver: &DriverSpec) -> Result<f64> {
    let s = Setup::new(market, cev, driver)?;
    match s.printed_dlny_dr() {
        Some(d) => Ok(s.rho_with(d)),
        None => Ok(s.rho_with(s.exact_dlny()?.1)),
    }
}

/// `∂C/∂T` with `∂φ/∂T` from term-wise differentiation of the Kummer series.
pub fn theta_exact(market: &MarketSpec, cev: &CevSpec, driver: &DriverSpec) -> Result<f64> {
    let s = Setup::new(market, cev, driver)?;
    Ok(s.theta_with(s.exact_dlny()?.0))
}

/// `∂C/∂r` with `∂φ/∂r` from term-wise differentiation of the Kummer series.
pub fn rho_exact(market: &MarketSpec, cev: &CevSpec, driver: &DriverSpec) -> Result<f64> {
    let s = Setup::new(market, cev, driver)?;
    Ok(s.rho_with(s.exact_dlny()?.1))
}

/// All Greeks at one contract.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreekReport {
    pub delta: f64,
    pub gamma: f64,
    pub vega: f64,
    pub theta: f64,
    pub rho: f64,
    pub theta_exact: f64,
    pub rho_exact: f64,
    pub model: DriverSpec,
}

pub fn greek_report(market: &MarketSpec, cev: &CevSpec, driver: &DriverSpec) -> Result<GreekReport> {
    let s = Setup::new(market, cev, driver)?;
    let (dt_exact, dr_exact) = s.exact_dlny()?;
    let rho = match s.printed_dlny_dr() {
        Some(d) => s.rho_with(d),
        None => s.rho_with(dr_exact),
    };
    Ok(GreekReport {
        delta: s.delta(),
        gamma: s.gamma(),
        vega: s.vega(),
        theta: s.theta_with(s.printed_dlny_dt()),
        rho,
        theta_exact: s.theta_with(dt_exact),
        rho_exact: s.rho_with(dr_exact),
        model: *driver,
    })
}
