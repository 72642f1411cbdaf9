mod config;
mod format;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use fcev::acceptance::{run_check, CheckOptions};
use fcev::greeks::greek_report;
use fcev::model::{CevSpec, DriverSpec, MarketSpec};
use fcev::pricing::call_price;
use fcev::verify::{fd_cross_check, FdSteps};

use config::{invalid, CliError, RunConfig, Settings};
use format::{g12, opt};

#[derive(Parser)]
#[command(
    name = "fcev",
    version,
    about = "European calls under classical, fractional and mixed-fractional CEV"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price one call and print it as a CSV row.
    Price(ContractArgs),
    /// Analytic Greeks with finite-difference counterparts.
    Greeks(ContractArgs),
    /// Price a one-parameter grid, optionally for several overlaid series.
    Sweep(SweepArgs),
    /// Run the acceptance suite.
    Check(CheckArgs),
    /// Time the closed forms across elasticities (informational).
    Bench(ContractArgs),
}

#[derive(Args, Clone, Default)]
struct ContractArgs {
    /// cev, fcev or mfcev
    #[arg(long)]
    model: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    s0: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    strike: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    rate: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    hurst: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    maturity: Option<String>,
    /// Flat `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[command(flatten)]
    contract: ContractArgs,
    /// alpha, hurst, sigma, maturity, spot or rate
    #[arg(long)]
    param: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    from: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    to: Option<String>,
    /// Number of grid points, endpoints included.
    #[arg(long)]
    steps: Option<String>,
    /// Extra series as `key=value,...` over the base settings; repeatable.
    #[arg(long)]
    overlay: Vec<String>,
}

#[derive(Args, Clone)]
struct CheckArgs {
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
    /// Run only these checks, e.g. `--only 1,5`.
    #[arg(long, value_delimiter = ',')]
    only: Vec<u8>,
    /// Scale k inside the limit checks (exercises the suite).
    #[arg(long, hide = true, default_value_t = 1.0)]
    perturb_k: f64,
}

impl ContractArgs {
    fn flag_settings(&self) -> Settings {
        let mut s = Settings::default();
        let pairs = [
            ("model", &self.model),
            ("s0", &self.s0),
            ("strike", &self.strike),
            ("rate", &self.rate),
            ("sigma", &self.sigma),
            ("alpha", &self.alpha),
            ("hurst", &self.hurst),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("maturity", &self.maturity),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                s.set(k, v).expect("known key");
            }
        }
        if let Some(p) = &self.out {
            s.set("out", &p.to_string_lossy()).expect("known key");
        }
        s
    }

    fn settings(&self) -> Result<Settings, CliError> {
        let file = match &self.config {
            Some(p) => Settings::load(p)?,
            None => Settings::default(),
        };
        Ok(file.merged(self.flag_settings()))
    }
}

const PRICE_HEADER: &str = "model,s0,strike,rate,sigma,alpha,hurst,beta,gamma,maturity";

fn contract_columns(c: &RunConfig) -> String {
    let (beta, gamma) = c.mix();
    [
        c.model.name().to_string(),
        g12(c.market.spot),
        g12(c.market.strike),
        g12(c.market.rate),
        g12(c.cev.sigma),
        g12(c.cev.alpha),
        opt(c.hurst()),
        opt(beta),
        opt(gamma),
        g12(c.market.maturity),
    ]
    .join(",")
}

fn numerical(e: fcev::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

fn price_row(c: &RunConfig) -> Result<String, CliError> {
    let q = call_price(&c.market, &c.cev, &c.driver).map_err(numerical)?;
    Ok(format!(
        "{},{},{}",
        contract_columns(c),
        g12(q.price),
        q.diagnostics.guard_triggered
    ))
}

/// Collects output lines and writes them, LF-terminated, to `out` or stdout.
fn emit(lines: &[String], out: Option<&str>) -> Result<(), CliError> {
    let mut text = lines.join("\n");
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| invalid(format!("out: cannot write {path}: {e}"))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| invalid(format!("stdout: {e}"))),
    }
}

fn cmd_price(args: &ContractArgs) -> Result<(), CliError> {
    let s = args.settings()?;
    let c = RunConfig::from_settings(&s)?;
    let lines = vec![format!("{PRICE_HEADER},price,guard_triggered"), price_row(&c)?];
    emit(&lines, s.text("out"))
}

fn cmd_greeks(args: &ContractArgs) -> Result<(), CliError> {
    let s = args.settings()?;
    let c = RunConfig::from_settings(&s)?;
    let price = call_price(&c.market, &c.cev, &c.driver).map_err(numerical)?.price;
    let g = greek_report(&c.market, &c.cev, &c.driver).map_err(numerical)?;
    let steps = FdSteps::scaled(&c.market, &c.cev, &c.driver, 2e-2);
    let fd = fd_cross_check(&c.market, &c.cev, &c.driver, &steps).map_err(numerical)?;
    let values = [
        price,
        g.delta,
        g.gamma,
        g.vega,
        g.theta,
        g.rho,
        g.theta_exact,
        g.rho_exact,
        fd.delta,
        fd.gamma,
        fd.vega,
        fd.theta,
        fd.rho,
    ];
    let row: Vec<String> = values.iter().map(|v| g12(*v)).collect();
    let lines = vec![
        format!(
            "{PRICE_HEADER},price,delta,spot_gamma,vega,theta,rho,theta_exact,rho_exact,\
             fd_delta,fd_spot_gamma,fd_vega,fd_theta,fd_rho"
        ),
        format!("{},{}", contract_columns(&c), row.join(",")),
    ];
    emit(&lines, s.text("out"))
}

fn sweep_key(param: &str) -> Result<&'static str, CliError> {
    Ok(match param {
        "alpha" => "alpha",
        "hurst" => "hurst",
        "sigma" => "sigma",
        "maturity" => "maturity",
        "spot" => "s0",
        "rate" => "rate",
        other => {
            return Err(invalid(format!(
                "param: `{other}` is not one of alpha, hurst, sigma, maturity, spot, rate"
            )))
        }
    })
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let mut flags = args.contract.flag_settings();
    for (k, v) in [
        ("param", &args.param),
        ("from", &args.from),
        ("to", &args.to),
        ("steps", &args.steps),
    ] {
        if let Some(v) = v {
            flags.set(k, v).expect("known key");
        }
    }
    for o in &args.overlay {
        flags.set("overlay", o).expect("known key");
    }
    let file = match &args.contract.config {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    };
    let s = file.merged(flags);

    let key = sweep_key(s.text("param").ok_or_else(|| invalid("param is required"))?)?;
    let from = s.required("from")?;
    let to = s.required("to")?;
    let steps = s.text("steps").ok_or_else(|| invalid("steps is required"))?;
    let steps: usize = steps
        .parse()
        .ok()
        .filter(|n| *n >= 2)
        .ok_or_else(|| invalid(format!("steps: `{steps}` must be an integer >= 2")))?;
    if from >= to {
        return Err(invalid(format!("from ({}) must be below to ({})", g12(from), g12(to))));
    }
    let grid: Vec<f64> = (0..steps)
        .map(|i| {
            if i + 1 == steps {
                to
            } else {
                from + (to - from) * i as f64 / (steps - 1) as f64
            }
        })
        .collect();

    let mut series = vec![s.clone()];
    for o in &s.overlays {
        series.push(s.with_overlay(o)?);
    }

    // validate the whole grid before pricing anything
    let mut points = Vec::with_capacity(series.len() * grid.len());
    for base in &series {
        for &x in &grid {
            let mut p = base.clone();
            p.set(key, &format!("{x:?}")).expect("known key");
            let c = RunConfig::from_settings(&p)
                .map_err(|e| invalid(format!("sweep point {key}={}: {}", g12(x), e.message())))?;
            if key == "hurst" && c.model == config::Model::Cev {
                return Err(invalid("param: a hurst sweep needs model fcev or mfcev"));
            }
            points.push((x, c));
        }
    }

    let mut lines = vec![format!("{PRICE_HEADER},price,guard_triggered")];
    for (x, c) in &points {
        let row =
            price_row(c).map_err(|e| CliError::Numerical(format!("sweep point {key}={}: {}", g12(*x), e.message())))?;
        lines.push(row);
    }
    emit(&lines, s.text("out"))
}

/// Prints a line, tolerating a closed pipe on the reading side.
fn say(line: &str) {
    let _ = writeln!(std::io::stdout(), "{line}");
}

fn cmd_check(args: &CheckArgs) -> Result<ExitCode, CliError> {
    if !(args.perturb_k > 0.0 && args.perturb_k.is_finite()) {
        return Err(invalid("perturb-k must be finite and > 0"));
    }
    let ids: Vec<u8> = if args.only.is_empty() {
        (1..=10).collect()
    } else {
        args.only.clone()
    };
    if let Some(bad) = ids.iter().find(|id| !(1..=10).contains(*id)) {
        return Err(invalid(format!("only: no check {bad}; checks are numbered 1 to 10")));
    }
    let opts = CheckOptions {
        k_scale: args.perturb_k,
        ..CheckOptions::default()
    };
    let mut outcomes = Vec::new();
    for id in ids {
        let o = run_check(id, &opts);
        if !args.json {
            say(&o.summary_line());
        }
        outcomes.push(o);
    }
    let passed = outcomes.iter().all(|o| o.passed);
    if args.json {
        let report = serde_json::json!({ "passed": passed, "checks": outcomes });
        say(&serde_json::to_string_pretty(&report).expect("serializable report"));
    } else {
        let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
        if failed.is_empty() {
            say(&format!("all {} checks passed", outcomes.len()));
        } else {
            say(&format!("failed: {}", failed.join(", ")));
        }
    }
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_bench(args: &ContractArgs) -> Result<(), CliError> {
    let s = args.settings()?;
    let number = |k: &str, default: f64| s.number(k).map(|v| v.unwrap_or(default));
    let market = MarketSpec {
        spot: number("s0", 100.0)?,
        strike: number("strike", 100.0)?,
        rate: number("rate", 0.05)?,
        maturity: number("maturity", 0.5)?,
    };
    market.validate().map_err(|e| invalid(e.to_string()))?;
    let sigma = number("sigma", 0.2)?;
    let hurst = number("hurst", 0.7)?;
    let drivers = [
        ("cev", DriverSpec::Classical),
        ("fcev", DriverSpec::Fractional { hurst }),
        (
            "mfcev",
            DriverSpec::Mixed {
                beta: 1.0,
                gamma: 1.0,
                hurst,
            },
        ),
    ];
    for (_, d) in &drivers {
        d.validate().map_err(|e| invalid(e.to_string()))?;
    }
    let mut lines = vec!["model,alpha,seconds_per_price,price".to_string()];
    for &alpha in &[0.5, 1.0, 1.25, 1.5, 1.75, 1.9, 1.95, 1.99, 1.999] {
        let cev = CevSpec::new(sigma, alpha).map_err(|e| invalid(e.to_string()))?;
        for (name, d) in &drivers {
            let reps = 200;
            let start = Instant::now();
            let mut price = 0.0;
            for _ in 0..reps {
                price = call_price(&market, &cev, d).map_err(numerical)?.price;
            }
            let per = start.elapsed().as_secs_f64() / reps as f64;
            lines.push(format!("{name},{},{},{}", g12(alpha), g12(per), g12(price)));
        }
    }
    emit(&lines, s.text("out"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Price(a) => cmd_price(a).map(|_| ExitCode::SUCCESS),
        Command::Greeks(a) => cmd_greeks(a).map(|_| ExitCode::SUCCESS),
        Command::Sweep(a) => cmd_sweep(a).map(|_| ExitCode::SUCCESS),
        Command::Check(a) => cmd_check(a),
        Command::Bench(a) => cmd_bench(a).map(|_| ExitCode::SUCCESS),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fcev: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
