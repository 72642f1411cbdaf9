//! Kummer's confluent hypergeometric function and the Whittaker M function.

use crate::error::{domain, Error, Result};

const MAX_TERMS: usize = 1_000_000;
const MAX_ABS_Z: f64 = 1e4;

/// Kummer's function `M(a, b; z) = Σ (a)_n z^n / ((b)_n n!)`.
///
/// Negative arguments go through Kummer's transformation
/// `M(a,b;z) = e^z M(b-a, b; -z)` so the summed series never alternates
/// for the positive-parameter cases used by the variance scale.
pub fn kummer_m(a: f64, b: f64, z: f64) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() {
        return Err(domain(
            "a, b",
            if a.is_finite() { b } else { a },
            "parameters must be finite",
        ));
    }
    if b <= 0.0 && b == b.round() {
        return Err(domain("b", b, "b must not be a non-positive integer"));
    }
    if !(z.abs() <= MAX_ABS_Z) {
        return Err(domain("z", z, "|z| must not exceed 1e4"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let value = if z < 0.0 {
        z.exp() * kummer_series(b - a, b, -z)?
    } else {
        kummer_series(a, b, z)?
    };
    if !value.is_finite() {
        return Err(Error::Overflow {
            name: "kummer_m",
            value,
        });
    }
    Ok(value)
}

/// Neumaier-compensated partial sums of the defining series.
fn kummer_series(a: f64, b: f64, z: f64) -> Result<f64> {
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut comp = 0.0_f64;
    let mut small_run = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) / (b + nf) * z / (nf + 1.0);
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if term == 0.0 {
            return Ok(sum + comp);
        }
        if term.abs() <= 1e-17 * (sum + comp).abs() {
            small_run += 1;
            // (a+n) can pass close to zero; wait for the tail to settle
            if small_run >= 2 && nf > z {
                return Ok(sum + comp);
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NonConvergence {
        routine: "kummer_m",
        iterations: MAX_TERMS,
    })
}

/// Arguments of the Whittaker function `M_{κ,υ}(l)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhittakerArgs {
    pub kappa: f64,
    pub upsilon: f64,
    pub l: f64,
}

impl WhittakerArgs {
    pub fn new(kappa: f64, upsilon: f64, l: f64) -> Result<Self> {
        if !kappa.is_finite() || !upsilon.is_finite() {
            return Err(domain("kappa, upsilon", kappa, "must be finite"));
        }
        if !(l >= 0.0) || !l.is_finite() {
            return Err(domain("l", l, "Whittaker argument must be finite and >= 0"));
        }
        let b = 1.0 + 2.0 * upsilon;
        if b <= 0.0 && b == b.round() {
            return Err(domain("upsilon", upsilon, "1 + 2υ must not be a non-positive integer"));
        }
        Ok(Self { kappa, upsilon, l })
    }
}

/// `M_{κ,υ}(l) = l^{υ+½} e^{-l/2} M(υ-κ+½, 1+2υ; l)`.
pub fn whittaker_m(args: WhittakerArgs) -> Result<f64> {
    let WhittakerArgs { kappa, upsilon, l } = args;
    if l == 0.0 {
        if upsilon + 0.5 > 0.0 {
            return Ok(0.0);
        }
        return Err(domain("l", l, "M_{κ,υ}(0) is unbounded for υ <= -1/2"));
    }
    let m = kummer_m(upsilon - kappa + 0.5, 1.0 + 2.0 * upsilon, l)?;
    Ok(((upsilon + 0.5) * l.ln() - 0.5 * l).exp() * m)
}
