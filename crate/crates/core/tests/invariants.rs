//! Shape properties of the price and the density checked on fixed grids.

use fcev::model::{chi_args, CevSpec, DriverSpec, MarketSpec};
use fcev::pricing::call_price;
use fcev::specfun::reg_gamma_upper;
use fcev::verify::{
    density_diagnostics, mc_price_classical, quadrature_price, quadrature_price_stretched, McSettings,
    QuadratureSettings,
};

const MATURITIES: [f64; 4] = [0.25, 0.5, 1.5, 2.0];

fn drivers() -> [DriverSpec; 3] {
    [
        DriverSpec::Classical,
        DriverSpec::Fractional { hurst: 0.7 },
        DriverSpec::Mixed {
            beta: 1.0,
            gamma: 1.0,
            hurst: 0.8,
        },
    ]
}

fn price(spot: f64, t: f64, sigma: f64, alpha: f64, d: &DriverSpec) -> f64 {
    let m = MarketSpec::new(spot, 100.0, 0.05, t).unwrap();
    call_price(&m, &CevSpec::new(sigma, alpha).unwrap(), d).unwrap().price
}

#[test]
fn price_increases_with_elasticity() {
    // Below α ≈ 1 at S₀ = E the time value of low-σ contracts falls under
    // the resolution of the price itself, so steps there may only tie.
    let alphas: Vec<f64> = (0..50).map(|i| 0.5 + 1.49 * i as f64 / 49.0).collect();
    for d in drivers() {
        for &t in &MATURITIES {
            for &sigma in &[0.15, 0.2, 0.3] {
                let p: Vec<f64> = alphas.iter().map(|&a| price(100.0, t, sigma, a, &d)).collect();
                for (i, w) in p.windows(2).enumerate() {
                    if alphas[i] >= 1.0 {
                        assert!(w[1] > w[0], "{d:?} T={t} σ={sigma} α={}", alphas[i]);
                    } else {
                        assert!(w[1] >= w[0] * (1.0 - 1e-12), "{d:?} T={t} σ={sigma} α={}", alphas[i]);
                    }
                }
            }
        }
    }
}

/// Strictly increasing once the time value is resolvable, otherwise tied to rounding.
fn rising(p: &[f64], floor: &[f64]) -> bool {
    p.windows(2).zip(floor.windows(2)).all(|(w, f)| {
        if w[0] - f[0] > 1e-9 * w[0] {
            w[1] > w[0]
        } else {
            w[1] - f[1] >= w[0] - f[0] - 1e-12 * w[0]
        }
    })
}

#[test]
fn price_increases_with_volatility_and_maturity() {
    let floor = 100.0 - 100.0 * (-0.05f64).exp();
    for d in drivers() {
        for &alpha in &[0.5, 1.0, 1.5, 1.9] {
            let by_sigma: Vec<f64> = (1..=12)
                .map(|i| price(100.0, 1.0, 0.05 * i as f64, alpha, &d))
                .collect();
            assert!(rising(&by_sigma, &[floor; 12]), "{d:?} α={alpha}: {by_sigma:?}");
            // the discounted strike falls with T, so even the bare floor rises
            let by_t: Vec<f64> = (1..=12).map(|i| price(100.0, 0.2 * i as f64, 0.2, alpha, &d)).collect();
            assert!(by_t.windows(2).all(|w| w[1] > w[0]), "{d:?} α={alpha}: {by_t:?}");
        }
    }
}

#[test]
fn hurst_ordering_flips_at_one_year() {
    for &t in &MATURITIES {
        for &sigma in &[0.15, 0.3] {
            for &alpha in &[1.0, 1.3, 1.6, 1.9] {
                let p: Vec<f64> = [0.5, 0.7, 0.9]
                    .iter()
                    .map(|&hurst| price(100.0, t, sigma, alpha, &DriverSpec::Fractional { hurst }))
                    .collect();
                if t < 1.0 {
                    assert!(p[0] > p[1] && p[1] > p[2], "T={t} σ={sigma} α={alpha}: {p:?}");
                } else {
                    assert!(p[0] < p[1] && p[1] < p[2], "T={t} σ={sigma} α={alpha}: {p:?}");
                }
            }
        }
    }
}

#[test]
fn mixed_price_dominates_its_parts() {
    for &t in &[0.5, 1.5] {
        for &hurst in &[0.5, 0.7, 0.9] {
            for i in 0..20 {
                let alpha = 1.0 + 0.99 * i as f64 / 19.0;
                let mixed = price(
                    100.0,
                    t,
                    0.2,
                    alpha,
                    &DriverSpec::Mixed {
                        beta: 1.0,
                        gamma: 1.0,
                        hurst,
                    },
                );
                let frac = price(100.0, t, 0.2, alpha, &DriverSpec::Fractional { hurst });
                let classical = price(100.0, t, 0.2, alpha, &DriverSpec::Classical);
                assert!(mixed >= frac.max(classical), "T={t} H={hurst} α={alpha}");
            }
        }
    }
}

#[test]
fn absorbed_mass_grows_with_maturity() {
    for d in drivers() {
        for &alpha in &[0.5, 1.0, 1.5] {
            let c = CevSpec::new(1.0, alpha).unwrap();
            let mut deficit = 0.0;
            for &t in &[0.25, 0.5, 1.0, 2.0, 4.0] {
                let m = MarketSpec::new(10.0, 10.0, 0.05, t).unwrap();
                let diag = density_diagnostics(&m, &c, &d).unwrap();
                assert!(diag.mass > 0.0 && diag.mass <= 1.0 + 1e-9);
                // the absorbed mass is a gamma tail, free of the cancellation in 1 - mass
                let args = chi_args(&m, &c, &d).unwrap();
                let next = reg_gamma_upper(args.dof_minus / 2.0, args.y).unwrap();
                assert!((1.0 - diag.mass - next).abs() < 1e-9, "{d:?} α={alpha} T={t}");
                assert!(next > deficit, "{d:?} α={alpha} T={t}: {next} after {deficit}");
                deficit = next;
            }
        }
    }
}

#[test]
fn quadrature_ignores_a_wider_range() {
    let settings = QuadratureSettings::default();
    for d in drivers() {
        for &alpha in &[0.5, 1.0, 1.5, 1.9] {
            for &t in &[0.25, 2.0] {
                let m = MarketSpec::new(100.0, 100.0, 0.05, t).unwrap();
                let c = CevSpec::new(0.3, alpha).unwrap();
                let base = quadrature_price(&m, &c, &d, &settings).unwrap();
                let wide = quadrature_price_stretched(&m, &c, &d, &settings, 2.0).unwrap();
                assert!(((wide - base) / base).abs() <= 1e-9, "{d:?} α={alpha} T={t}");
            }
        }
    }
}

#[test]
fn simulation_is_reproducible_across_thread_counts() {
    let m = MarketSpec::new(100.0, 100.0, 0.05, 0.5).unwrap();
    let c = CevSpec::new(0.2, 1.5).unwrap();
    let s = McSettings {
        paths: 5000,
        steps_per_year: 200,
        seed: 99,
    };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mc_price_classical(&m, &c, &s).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, mc_price_classical(&m, &c, &s).unwrap());
    let other = mc_price_classical(&m, &c, &McSettings { seed: 100, ..s }).unwrap();
    assert_ne!(one.price, other.price);
}
