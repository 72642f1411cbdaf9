//! Contract and diffusion parameters, the Feller coefficients of the
//! transformed process `x = S^{2-α}`, and the variance scale `φ(T)` that
//! turns them into the arguments of the non-central χ² laws.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::specfun::{kummer_m, whittaker_m, WhittakerArgs};

/// Elasticities above this are priced through the Black-Scholes limit.
pub const ALPHA_GUARD: f64 = 2.0 - 1e-6;

/// `|r(2-α)T|` beyond this is rejected by the variance scale.
pub const MAX_ABS_GROWTH: f64 = 50.0;

const OVERFLOW_LIMIT: f64 = 1e300;

/// Spot, strike, continuously compounded rate and maturity in years.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarketSpec {
    pub spot: f64,
    pub strike: f64,
    pub rate: f64,
    pub maturity: f64,
}

impl MarketSpec {
    pub fn new(spot: f64, strike: f64, rate: f64, maturity: f64) -> Result<Self> {
        let m = Self {
            spot,
            strike,
            rate,
            maturity,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.spot > 0.0) || !self.spot.is_finite() {
            return Err(domain("spot", self.spot, "spot must be finite and > 0"));
        }
        if !(self.strike > 0.0) || !self.strike.is_finite() {
            return Err(domain("strike", self.strike, "strike must be finite and > 0"));
        }
        if !self.rate.is_finite() {
            return Err(domain("rate", self.rate, "rate must be finite"));
        }
        if !(self.maturity > 0.0) || !self.maturity.is_finite() {
            return Err(domain("maturity", self.maturity, "maturity must be finite and > 0"));
        }
        Ok(())
    }

    /// `E e^{-rT}`.
    pub fn discounted_strike(&self) -> f64 {
        self.strike * (-self.rate * self.maturity).exp()
    }
}

/// Volatility scale `σ` and elasticity `α` of `dS = rS dt + σ S^{α/2} dB`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CevSpec {
    pub sigma: f64,
    pub alpha: f64,
}

impl CevSpec {
    pub fn new(sigma: f64, alpha: f64) -> Result<Self> {
        let c = Self { sigma, alpha };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(domain("sigma", self.sigma, "sigma must be finite and > 0"));
        }
        if !(0.0..2.0).contains(&self.alpha) {
            return Err(domain("alpha", self.alpha, "alpha must lie in [0, 2)"));
        }
        Ok(())
    }

    /// `2 - α`, the exponent of the variable change.
    pub fn power(&self) -> f64 {
        2.0 - self.alpha
    }

    /// Local volatility `σ S^{(α-2)/2}`, the quantity vega is taken against.
    pub fn local_vol(&self, spot: f64) -> f64 {
        self.sigma * spot.powf(-0.5 * self.power())
    }

    /// The `σ` that produces local volatility `local` at `spot`.
    pub fn sigma_for_local_vol(&self, local: f64, spot: f64) -> f64 {
        local * spot.powf(0.5 * self.power())
    }
}

/// Noise driving the diffusion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DriverSpec {
    Classical,
    Fractional {
        hurst: f64,
    },
    /// `β B_t + γ B^H_t`.
    Mixed {
        beta: f64,
        gamma: f64,
        hurst: f64,
    },
}

impl DriverSpec {
    pub fn fractional(hurst: f64) -> Result<Self> {
        let d = Self::Fractional { hurst };
        d.validate()?;
        Ok(d)
    }

    pub fn mixed(beta: f64, gamma: f64, hurst: f64) -> Result<Self> {
        let d = Self::Mixed { beta, gamma, hurst };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let check_hurst = |h: f64| {
            if (0.5..1.0).contains(&h) {
                Ok(())
            } else {
                Err(domain("hurst", h, "Hurst exponent must lie in [1/2, 1)"))
            }
        };
        match *self {
            Self::Classical => Ok(()),
            Self::Fractional { hurst } => check_hurst(hurst),
            Self::Mixed { beta, gamma, hurst } => {
                check_hurst(hurst)?;
                if !(beta >= 0.0) || !beta.is_finite() {
                    return Err(domain("beta", beta, "beta must be finite and >= 0"));
                }
                if !(gamma >= 0.0) || !gamma.is_finite() {
                    return Err(domain("gamma", gamma, "gamma must be finite and >= 0"));
                }
                if !(beta + gamma > 0.0) {
                    return Err(domain("beta + gamma", beta + gamma, "weights must not both vanish"));
                }
                Ok(())
            }
        }
    }

    /// `(β, γ, H)`: the weights on the Brownian and fractional parts.
    /// At `H = 1/2` the fractional part is itself Brownian and is folded
    /// into `β`, so that such drivers evaluate exactly like the classical one.
    pub fn weights(&self) -> (f64, f64, f64) {
        let (beta, gamma, hurst) = match *self {
            Self::Classical => (1.0, 0.0, 0.5),
            Self::Fractional { hurst } => (0.0, 1.0, hurst),
            Self::Mixed { beta, gamma, hurst } => (beta, gamma, hurst),
        };
        if hurst == 0.5 {
            (beta + gamma, 0.0, 0.5)
        } else {
            (beta, gamma, hurst)
        }
    }

    pub fn hurst(&self) -> Option<f64> {
        match *self {
            Self::Classical => None,
            Self::Fractional { hurst } | Self::Mixed { hurst, .. } => Some(hurst),
        }
    }

    /// Short model tag used in reports: `cev`, `fcev` or `mfcev`.
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Classical => "cev",
            Self::Fractional { .. } => "fcev",
            Self::Mixed { .. } => "mfcev",
        }
    }

    /// Effective variance clock `βT + γT^{2H}`.
    pub fn effective_time(&self, t: f64) -> f64 {
        let (beta, gamma, h) = self.weights();
        let mut v = 0.0;
        if beta != 0.0 {
            v += beta * t;
        }
        if gamma != 0.0 {
            v += gamma * t.powf(2.0 * h);
        }
        v
    }

    /// Variance-rate weight `g(t) = β + 2γH t^{2H-1}`.
    pub fn clock_rate(&self, t: f64) -> f64 {
        let (beta, gamma, h) = self.weights();
        let mut g = 0.0;
        if beta != 0.0 {
            g += beta;
        }
        if gamma != 0.0 {
            g += 2.0 * gamma * h * t.powf(2.0 * h - 1.0);
        }
        g
    }
}

/// Drift and diffusion coefficients of the Feller equation in `x = S^{2-α}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FellerCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl FellerCoeffs {
    /// Order of the Bessel function in the density, `1 - c/a`.
    pub fn bessel_order(&self) -> f64 {
        1.0 - self.c / self.a
    }
}

/// Arguments of the non-central χ² laws in the price formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareArgs {
    /// `1/φ`, per unit of `x = S^{2-α}`.
    pub k: f64,
    pub y: f64,
    pub z: f64,
    /// `2 + 2/(2-α)`.
    pub dof_plus: f64,
    /// `2/(2-α)`.
    pub dof_minus: f64,
    pub phi: f64,
}

impl ChiSquareArgs {
    /// Rebuild `(y, z)` from a given `k`, keeping everything else.
    pub fn with_k(&self, k: f64) -> Self {
        let scale = k / self.k;
        Self {
            k,
            y: self.y * scale,
            z: self.z * scale,
            phi: 1.0 / k,
            ..*self
        }
    }

    /// `w = k S_T^{2-α}` for a terminal price.
    pub fn w_of(&self, s_t: f64, alpha: f64) -> f64 {
        self.k * s_t.powf(2.0 - alpha)
    }

    /// Inverse of [`ChiSquareArgs::w_of`].
    pub fn s_of(&self, w: f64, alpha: f64) -> f64 {
        (w / self.k).powf(1.0 / (2.0 - alpha))
    }
}

pub fn feller_coeffs(cev: &CevSpec, rate: f64) -> FellerCoeffs {
    let p = cev.power();
    let s2 = cev.sigma * cev.sigma;
    FellerCoeffs {
        a: 0.5 * p * p * s2,
        b: rate * p,
        c: 0.5 * p * (1.0 - cev.alpha) * s2,
    }
}

/// `S^{2-α}`.
pub fn x_transform(s: f64, alpha: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain("S", s, "price must be finite and > 0"));
    }
    Ok(s.powf(2.0 - alpha))
}

/// `(e^x - 1)/x`, continuous at zero.
fn exprel(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.exp_m1() / x
    }
}

fn check_growth(fc: &FellerCoeffs, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain("maturity", t, "maturity must be finite and > 0"));
    }
    let bt = fc.b * t;
    if !(bt.abs() <= MAX_ABS_GROWTH) {
        return Err(domain("r(2-alpha)T", bt, "|r(2-alpha)T| must not exceed 50"));
    }
    Ok(bt)
}

/// Brownian part `a ∫_0^T e^{b(T-s)} ds = aT (e^{bT}-1)/(bT)`.
fn brownian_scale(fc: &FellerCoeffs, t: f64, bt: f64) -> f64 {
    fc.a * t * exprel(bt)
}

/// Fractional part `a ∫_0^T 2H s^{2H-1} e^{b(T-s)} ds`, reduced to
/// `a/(2H+1) T^{2H} [2H+1 + bT M(1, 2H+2; bT)]`.
fn fractional_scale(fc: &FellerCoeffs, h: f64, t: f64, bt: f64) -> Result<f64> {
    let m = kummer_m(1.0, 2.0 * h + 2.0, bt)?;
    Ok(fc.a / (2.0 * h + 1.0) * t.powf(2.0 * h) * (2.0 * h + 1.0 + bt * m))
}

/// Variance scale `φ(T)` of the driver; `k = 1/φ`.
pub fn variance_scale_phi(fc: &FellerCoeffs, driver: &DriverSpec, t: f64) -> Result<f64> {
    let bt = check_growth(fc, t)?;
    let (beta, gamma, h) = driver.weights();
    let mut phi = 0.0;
    if beta != 0.0 {
        phi += beta * brownian_scale(fc, t, bt);
    }
    if gamma != 0.0 {
        phi += gamma * fractional_scale(fc, h, t, bt)?;
    }
    Ok(phi)
}

/// The fractional part written with the Whittaker function,
/// `a/(2H+1) T^{2H} [2H+1 + e^{bT/2} (bT)^{-H} M_{H,H+½}(bT)]`.
///
/// Only defined for `b > 0`; kept as an independent check of the reduced form.
pub fn variance_scale_phi_whittaker(fc: &FellerCoeffs, driver: &DriverSpec, t: f64) -> Result<f64> {
    let bt = check_growth(fc, t)?;
    if !(bt > 0.0) {
        return Err(domain(
            "r(2-alpha)T",
            bt,
            "the Whittaker form needs a positive growth rate",
        ));
    }
    let (beta, gamma, h) = driver.weights();
    let mut phi = 0.0;
    if beta != 0.0 {
        phi += beta * fc.a / fc.b * bt.exp_m1();
    }
    if gamma != 0.0 {
        let wm = whittaker_m(WhittakerArgs::new(h, h + 0.5, bt)?)?;
        let bracket = 2.0 * h + 1.0 + (0.5 * bt - h * bt.ln()).exp() * wm;
        phi += gamma * fc.a / (2.0 * h + 1.0) * t.powf(2.0 * h) * bracket;
    }
    Ok(phi)
}

/// `∂φ/∂T = a g(T) + b φ`, from differentiating the defining integral.
pub fn phi_time_derivative(fc: &FellerCoeffs, driver: &DriverSpec, t: f64) -> Result<f64> {
    let phi = variance_scale_phi(fc, driver, t)?;
    Ok(fc.a * driver.clock_rate(t) + fc.b * phi)
}

/// Partial derivatives `(∂φ/∂T, ∂φ/∂b)` obtained by differentiating the
/// reduced closed forms term by term, with `M'(1,c;u) = M(2,c+1;u)/c`.
pub fn phi_partials(fc: &FellerCoeffs, driver: &DriverSpec, t: f64) -> Result<(f64, f64)> {
    let bt = check_growth(fc, t)?;
    let (beta, gamma, h) = driver.weights();
    let (a, b) = (fc.a, fc.b);
    let (mut d_t, mut d_b) = (0.0, 0.0);
    if beta != 0.0 {
        // a (e^{bT} - 1)/b
        let e = bt.exp();
        d_t += beta * a * e;
        let db = if bt.abs() < 1e-5 {
            // a T² (1/2 + bT/3 + (bT)²/8)
            a * t * t * (0.5 + bt / 3.0 + bt * bt / 8.0)
        } else {
            a * (t * e / b - bt.exp_m1() / (b * b))
        };
        d_b += beta * db;
    }
    if gamma != 0.0 {
        let c = 2.0 * h + 2.0;
        let m = kummer_m(1.0, c, bt)?;
        let dm = kummer_m(2.0, c + 1.0, bt)? / c;
        let pre = a / (2.0 * h + 1.0);
        let t2h = t.powf(2.0 * h);
        let bracket = 2.0 * h + 1.0 + bt * m;
        // d/dT [bT M(bT)] = b M + b²T M'
        d_t += gamma * pre * (2.0 * h * t.powf(2.0 * h - 1.0) * bracket + t2h * (b * m + b * bt * dm));
        // d/db [bT M(bT)] = T M + T·bT M'
        d_b += gamma * pre * t2h * (t * m + t * bt * dm);
    }
    Ok((d_t, d_b))
}

/// `(k, y, z)` and the degrees of freedom for the given contract and driver.
pub fn chi_args(market: &MarketSpec, cev: &CevSpec, driver: &DriverSpec) -> Result<ChiSquareArgs> {
    market.validate()?;
    cev.validate()?;
    driver.validate()?;
    if cev.alpha > ALPHA_GUARD {
        return Err(domain(
            "alpha",
            cev.alpha,
            "alpha too close to 2 for the chi-square form; use the Black-Scholes limit",
        ));
    }
    let fc = feller_coeffs(cev, market.rate);
    let phi = variance_scale_phi(&fc, driver, market.maturity)?;
    if !(phi > 0.0) {
        return Err(Error::Overflow {
            name: "k",
            value: 1.0 / phi,
        });
    }
    let p = cev.power();
    let ln_k = -phi.ln();
    let ln_y = ln_k + p * market.spot.ln() + fc.b * market.maturity;
    let ln_z = ln_k + p * market.strike.ln();
    let (k, y, z) = (ln_k.exp(), ln_y.exp(), ln_z.exp());
    for (name, v) in [("k", k), ("y", y), ("z", z)] {
        if !(v <= OVERFLOW_LIMIT) {
            return Err(Error::Overflow { name, value: v });
        }
    }
    Ok(ChiSquareArgs {
        k,
        y,
        z,
        dof_plus: 2.0 + 2.0 / p,
        dof_minus: 2.0 / p,
        phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feller_coefficients_by_substitution() {
        let fc = feller_coeffs(&CevSpec::new(0.2, 1.0).unwrap(), 0.05);
        assert!((fc.a - 0.02).abs() < 1e-17 && (fc.b - 0.05).abs() < 1e-17 && fc.c == 0.0);
        let fc = feller_coeffs(&CevSpec::new(0.2, 0.0).unwrap(), 0.05);
        assert!((fc.a - 0.08).abs() < 1e-16 && (fc.b - 0.1).abs() < 1e-16 && (fc.c - 0.04).abs() < 1e-16);
        let fc = feller_coeffs(&CevSpec::new(0.2, 1.5).unwrap(), 0.05);
        assert!((fc.a - 0.005).abs() < 1e-17 && (fc.b - 0.025).abs() < 1e-17);
        assert!((fc.c + 0.005).abs() < 1e-17);
    }

    #[test]
    fn zero_rate_limits() {
        let fc = FellerCoeffs {
            a: 0.02,
            b: 0.0,
            c: 0.0,
        };
        let frac = variance_scale_phi(&fc, &DriverSpec::Fractional { hurst: 0.7 }, 2.0).unwrap();
        assert!((frac - 0.02 * 2f64.powf(1.4)).abs() < 1e-16);
        let cl = variance_scale_phi(&fc, &DriverSpec::Classical, 2.0).unwrap();
        assert!((cl - 0.04).abs() < 1e-17);
    }

    #[test]
    fn exact_partials_match_integral_form() {
        let fc = feller_coeffs(&CevSpec::new(0.3, 1.2).unwrap(), 0.07);
        for d in [
            DriverSpec::Classical,
            DriverSpec::Fractional { hurst: 0.8 },
            DriverSpec::Mixed {
                beta: 0.6,
                gamma: 1.3,
                hurst: 0.65,
            },
        ] {
            let (dt, _) = phi_partials(&fc, &d, 1.3).unwrap();
            let integral = phi_time_derivative(&fc, &d, 1.3).unwrap();
            assert!((dt - integral).abs() < 1e-13 * integral, "{d:?}");
        }
    }

    #[test]
    fn guard_and_validation() {
        let m = MarketSpec::new(100.0, 100.0, 0.05, 0.5).unwrap();
        let c = CevSpec {
            sigma: 0.2,
            alpha: 1.999_999_5,
        };
        assert!(chi_args(&m, &c, &DriverSpec::Classical).is_err());
        assert!(CevSpec::new(0.2, 2.0).is_err());
        assert!(CevSpec::new(0.0, 1.0).is_err());
        assert!(DriverSpec::fractional(1.0).is_err());
        assert!(DriverSpec::mixed(0.0, 0.0, 0.7).is_err());
        assert!(MarketSpec::new(100.0, 100.0, 0.05, 0.0).is_err());
        assert!(x_transform(0.0, 1.0).is_err());
    }
}
