use serde::Serialize;

use crate::error::{domain, Result};
use crate::model::{chi_args, CevSpec, DriverSpec, MarketSpec};
use crate::pricing::{call_price, price_from_args, put_from_args};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Greek {
    Delta,
    Gamma,
    Vega,
    Theta,
    Rho,
}

impl Greek {
    pub const ALL: [Greek; 5] = [Greek::Delta, Greek::Gamma, Greek::Vega, Greek::Theta, Greek::Rho];

    pub fn name(&self) -> &'static str {
        match self {
            Greek::Delta => "delta",
            Greek::Gamma => "gamma",
            Greek::Vega => "vega",
            Greek::Theta => "theta",
            Greek::Rho => "rho",
        }
    }
}

/// Absolute bump sizes per Greek.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdSteps {
    pub delta: f64,
    pub gamma: f64,
    pub vega: f64,
    pub theta: f64,
    pub rho: f64,
}

impl FdSteps {
    /// `10⁻³ S₀`, `10⁻² S₀`, `10⁻⁴`, `10⁻⁴`, `10⁻⁵`.
    pub fn standard(market: &MarketSpec) -> Self {
        Self {
            delta: 1e-3 * market.spot,
            gamma: 1e-2 * market.spot,
            vega: 1e-4,
            theta: 1e-4,
            rho: 1e-5,
        }
    }

    /// Steps scaled to the contract: each bump moves the log of the price by
    /// roughly `resolution`, judged from the terminal standard deviation
    /// `sd = ς √(βT + γT^{2H})` and the standardised moneyness
    /// `d = ln(S₀/E)/sd`. Far from the money the price is steep in every
    /// parameter and fixed steps lose all accuracy.
    pub fn scaled(market: &MarketSpec, cev: &CevSpec, driver: &DriverSpec, resolution: f64) -> Self {
        let local = cev.local_vol(market.spot);
        let t = market.maturity;
        let sd = local * driver.effective_time(t).sqrt();
        let d = ((market.spot / market.strike).ln() / sd).abs();
        let eps = resolution;
        Self {
            delta: eps * market.spot * sd / (1.0 + d),
            gamma: eps * market.spot * sd / (1.0 + d),
            vega: eps * local / (1.0 + d * d),
            theta: 2.0 * eps * t / (1.0 + d * d),
            rho: eps * sd / (t * (1.0 + d)),
        }
    }

    pub fn get(&self, which: Greek) -> f64 {
        match which {
            Greek::Delta => self.delta,
            Greek::Gamma => self.gamma,
            Greek::Vega => self.vega,
            Greek::Theta => self.theta,
            Greek::Rho => self.rho,
        }
    }
}

/// Which option is differenced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Call,
    Put,
}

fn value(side: Side, market: &MarketSpec, cev: &CevSpec, driver: &DriverSpec) -> Result<f64> {
    match side {
        Side::Call => Ok(call_price(market, cev, driver)?.price),
        Side::Put => {
            let args = chi_args(market, cev, driver)?;
            put_from_args(market, &args)
        }
    }
}

/// Contract bumped by `± step` in the parameter behind `which`.
fn bumped(which: Greek, market: &MarketSpec, cev: &CevSpec, step: f64) -> Result<[(MarketSpec, CevSpec); 2]> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(domain("step", step, "finite-difference step must be finite and > 0"));
    }
    let pair = |f: &dyn Fn(f64) -> (MarketSpec, CevSpec)| [f(-step), f(step)];
    let out = match which {
        Greek::Delta | Greek::Gamma => pair(&|h| {
            (
                MarketSpec {
                    spot: market.spot + h,
                    ..*market
                },
                *cev,
            )
        }),
        Greek::Vega => {
            let local = cev.local_vol(market.spot);
            pair(&|h| {
                let sigma = cev.sigma_for_local_vol(local + h, market.spot);
                (*market, CevSpec { sigma, ..*cev })
            })
        }
        Greek::Theta => pair(&|h| {
            (
                MarketSpec {
                    maturity: market.maturity + h,
                    ..*market
                },
                *cev,
            )
        }),
        Greek::Rho => pair(&|h| {
            (
                MarketSpec {
                    rate: market.rate + h,
                    ..*market
                },
                *cev,
            )
        }),
    };
    for (m, c) in &out {
        m.validate()
            .map_err(|_| domain("step", step, "bump leaves the market domain"))?;
        c.validate()
            .map_err(|_| domain("step", step, "bump leaves the volatility domain"))?;
    }
    Ok(out)
}

fn central_difference(
    side: Side,
    which: Greek,
    market: &MarketSpec,
    cev: &CevSpec,
    driver: &DriverSpec,
    step: f64,
) -> Result<f64> {
    let [(m_lo, c_lo), (m_hi, c_hi)] = bumped(which, market, cev, step)?;
    let lo = value(side, &m_lo, &c_lo, driver)?;
    let hi = value(side, &m_hi, &c_hi, driver)?;
    if which == Greek::Gamma {
        let mid = value(side, market, cev, driver)?;
        Ok((hi - 2.0 * mid + lo) / (step * step))
    } else {
        Ok((hi - lo) / (2.0 * step))
    }
}

/// Second-order central difference of the call price. Vega bumps the local
/// volatility `σ S₀^{(α-2)/2}` at fixed spot.
pub fn fd_greek(which: Greek, market: &MarketSpec, cev: &CevSpec, driver: &DriverSpec, step: f64) -> Result<f64> {
    central_difference(Side::Call, which, market, cev, driver, step)
}

/// Finite-difference Greeks for comparison with the analytic ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdCrossCheck {
    pub delta: f64,
    pub gamma: f64,
    pub vega: f64,
    pub theta: f64,
    pub rho: f64,
    pub steps: FdSteps,
}

impl FdCrossCheck {
    pub fn get(&self, which: Greek) -> f64 {
        match which {
            Greek::Delta => self.delta,
            Greek::Gamma => self.gamma,
            Greek::Vega => self.vega,
            Greek::Theta => self.theta,
            Greek::Rho => self.rho,
        }
    }
}

/// Finite-difference Greeks taken on whichever of call and put is smaller,
/// so that in-the-money calls do not lose their time value to rounding in
/// the intrinsic part. Put sensitivities are mapped back through parity.
///
/// Each Greek combines central differences at `h` and `h/2` by Richardson
/// extrapolation, `(4 D(h/2) - D(h)) / 3`.
pub fn fd_cross_check(
    market: &MarketSpec,
    cev: &CevSpec,
    driver: &DriverSpec,
    steps: &FdSteps,
) -> Result<FdCrossCheck> {
    let args = chi_args(market, cev, driver)?;
    let call = price_from_args(market, &args)?.price;
    let put = put_from_args(market, &args)?;
    let side = if put < call { Side::Put } else { Side::Call };
    let k_disc = market.discounted_strike();
    let mut out = [0.0; 5];
    for (slot, which) in out.iter_mut().zip(Greek::ALL) {
        let h = steps.get(which);
        let coarse = central_difference(side, which, market, cev, driver, h)?;
        let fine = central_difference(side, which, market, cev, driver, 0.5 * h)?;
        let d = (4.0 * fine - coarse) / 3.0;
        *slot = match (side, which) {
            (Side::Put, Greek::Delta) => d + 1.0,
            (Side::Put, Greek::Theta) => d + market.rate * k_disc,
            (Side::Put, Greek::Rho) => d + market.maturity * k_disc,
            _ => d,
        };
    }
    Ok(FdCrossCheck {
        delta: out[0],
        gamma: out[1],
        vega: out[2],
        theta: out[3],
        rho: out[4],
        steps: *steps,
    })
}
