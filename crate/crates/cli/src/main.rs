//! Command-line front-end for density-lab.
//!
//! Exit codes: 0 pass or member, 1 substantive negative (deviation above
//! tolerance, non-member, infeasible, bound violated), 2 usage error.

mod output;

use std::io::Read;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use density_lab::dioph::{discrepancy_decay, empirical_discrepancy, ThetaSource, ThetaValue, DEFAULT_PRECISION_BITS};
use density_lab::experiment::{run_dens0, run_profile, ExperimentConfig, OutputFormat, DEFAULT_SEED};
use density_lab::montecarlo::{basic_proba_sweep, verify_cor_proba, BasicProbaParams, CorProbaParams};
use density_lab::rational::{self, Rational};
use density_lab::regions::{
    in_d12, in_d13, in_d24, in_u, case_sigma, polyhedron_contains, polyhedron_verdict, scan_discrepancy, solve_sigma,
    triplet_query, Profile, RegionVerdict, Slab,
};
use density_lab::rng::resolve_seed;
use density_lab::sets::Interval;

use output::{emit, scan_csv};

#[derive(Parser)]
#[command(name = "density-lab", version, about = "Densities of sets and sumsets of natural numbers")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for randomized constructions and trials (overrides DENSITY_LAB_SEED and config files).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Schedule ratio override.
    #[arg(long, global = true)]
    ratio: Option<String>,
    /// Schedule depth override.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Rotation: golden, sqrt2m1 or cf:a1,a2,...
    #[arg(long, global = true)]
    theta: Option<ThetaSource>,
    /// Largest explicit window, in bits.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Allowed deviation from the predicted profile.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true, value_parser = ["json", "csv"])]
    format: Option<String>,
}

impl Common {
    fn format(&self, default: OutputFormat) -> OutputFormat {
        self.format.as_deref().map_or(default, |f| f.parse().expect("validated by clap"))
    }

    fn seed(&self) -> Result<u64> {
        Ok(resolve_seed(self.seed)?.unwrap_or(DEFAULT_SEED))
    }

    fn theta(&self) -> Result<ThetaValue> {
        Ok(ThetaValue::new(self.theta.clone().unwrap_or(ThetaSource::Golden), DEFAULT_PRECISION_BITS)?)
    }

    /// Applies the command-line overrides to a parsed config.
    fn apply(&self, mut config: ExperimentConfig) -> Result<ExperimentConfig> {
        if let Some(r) = &self.ratio {
            config.set_parameter("ratio", r)?;
        }
        if let Some(d) = self.depth {
            config.set_parameter("depth", &d.to_string())?;
        }
        if self.seed.is_some() {
            config.seed = self.seed;
        }
        if let Some(t) = &self.theta {
            config.theta = t.clone();
        }
        if let Some(b) = self.budget {
            config.budget = b;
        }
        if let Some(t) = self.tolerance {
            config.tolerance = t;
        }
        if self.format.is_some() {
            config.format = self.format(config.format);
        }
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a construction and estimate its density profile.
    Profile {
        /// Config file, `-` for stdin, or inline key=value tokens.
        #[arg(required = true)]
        config: Vec<String>,
    },
    /// Membership query: d12, d13, d24, u, poly, dens_A_vs_2A, profile_A_vs_dens2A.
    Region {
        name: String,
        #[arg(required = true)]
        point: Vec<String>,
    },
    /// Parameters σ realizing a profile (a, b, c, d), with the literal case formulas alongside.
    Solve {
        #[arg(num_args = 4, required = true)]
        profile: Vec<String>,
    },
    /// Empirical discrepancy of a Bohr set against the Erdős–Turán bound.
    Discrepancy {
        #[arg(long, default_value = "0")]
        arc_lo: String,
        #[arg(long, default_value = "3/10")]
        arc_hi: String,
        /// Window sizes `n` of `⟦1, n⟧`; two or more also fit the decay exponent.
        #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000,1000000")]
        n: Vec<u64>,
        /// Truncation `m` of the bound (default `√n`), single window only.
        #[arg(long)]
        m: Option<u64>,
    },
    /// Seeded trials of the probabilistic coverage bounds.
    Montecarlo {
        #[command(subcommand)]
        test: Trial,
    },
    /// Grid audit of the literal σ formulas over the polyhedron.
    Scan {
        #[arg(long, default_value_t = 20)]
        resolution: u32,
        /// `all` or `d<1`.
        #[arg(long, default_value = "all")]
        slab: Slab,
    },
}

#[derive(Subcommand)]
enum Trial {
    /// Missing sums with many representations, for Bernoulli subsets of two intervals.
    Basic {
        #[arg(long)]
        i_len: u64,
        #[arg(long)]
        j_len: u64,
        /// One or more representation thresholds.
        #[arg(short, long, value_delimiter = ',', required = true)]
        r: Vec<u64>,
        #[arg(short, long)]
        p: f64,
        #[arg(short, long)]
        q: f64,
        #[arg(long, default_value_t = 2000)]
        trials: u64,
    },
    /// Prefix coverage of `A + B` and `A + A`.
    Cor {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(short, long)]
        p: f64,
        #[arg(short, long)]
        q: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
    },
    /// Exceptional sets of a thinned construction; negative when the final density exceeds `max_density`.
    Dens0 {
        #[arg(required = true)]
        config: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.05")]
        epsilons: Vec<f64>,
        #[arg(long, default_value_t = 0.02)]
        max_density: f64,
    },
}

/// Outcome of a command that ran to completion.
enum Verdict {
    Pass,
    Negative,
}

impl Verdict {
    fn of(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Negative
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_config(parts: &[String]) -> Result<ExperimentConfig> {
    let text = match parts {
        [one] if one == "-" => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        }
        [one] if Path::new(one).is_file() => std::fs::read_to_string(one).with_context(|| format!("reading {one}"))?,
        tokens => tokens.join(" "),
    };
    Ok(ExperimentConfig::parse(&text)?)
}

fn rationals(raw: &[String]) -> Result<Vec<Rational>> {
    raw.iter().map(|s| rational::parse(s).with_context(|| format!("coordinate {s:?}"))).collect()
}

fn arity<const N: usize>(name: &str, v: Vec<Rational>) -> Result<[Rational; N]> {
    let got = v.len();
    v.try_into().map_err(|_| anyhow::anyhow!("region {name} takes {N} coordinates, got {got}"))
}

fn region(name: &str, raw: &[String]) -> Result<(RegionVerdict, Value)> {
    let point = rationals(raw)?;
    let shown: Vec<String> = point.iter().map(rational::format).collect();
    let mut extra = Value::Null;
    let verdict = match name {
        "d12" | "d13" | "d24" | "u" => {
            let [x, y] = arity::<2>(name, point)?;
            match name {
                "d12" => in_d12(&x, &y)?,
                "d13" => in_d13(&x, &y)?,
                "d24" => in_d24(&x, &y)?,
                _ => in_u(&x, &y)?,
            }
        }
        "poly" => {
            let p = Profile::from_array(arity::<4>(name, point)?)?;
            let (verdict, sigma) = polyhedron_verdict(&p);
            extra = json!({ "realized_by_g": sigma.is_some(), "sigma": sigma });
            verdict
        }
        other => triplet_query(other.parse()?, &arity::<3>(name, point)?)?,
    };
    let mut out = json!({ "region": name, "point": shown, "member": verdict.member, "certificate": verdict.certificate });
    if !extra.is_null() {
        out["solve"] = extra;
    }
    Ok((verdict, out))
}

fn solve(raw: &[String]) -> Result<(bool, Value)> {
    let p = Profile::from_array(arity::<4>("solve", rationals(raw)?)?)?;
    let inside = polyhedron_contains(&p);
    let sigma = solve_sigma(&p);
    let literal = if inside { Some(case_sigma(&p)?) } else { None };
    let out = json!({
        "profile": p,
        "in_polyhedron": inside,
        "feasible": sigma.is_some(),
        "sigma": sigma,
        "case_formulas": literal,
    });
    Ok((sigma.is_some(), out))
}

fn run(cli: &Cli) -> Result<Verdict> {
    let common = &cli.common;
    match &cli.command {
        Command::Profile { config } => {
            let config = common.apply(load_config(config)?)?;
            let record = run_profile(&config)?;
            println!("{}", record.render());
            Ok(Verdict::of(record.within_tolerance))
        }
        Command::Region { name, point } => {
            let (verdict, out) = region(name, point)?;
            emit(&out, common.format(OutputFormat::Json));
            Ok(Verdict::of(verdict.member))
        }
        Command::Solve { profile } => {
            let (feasible, out) = solve(profile)?;
            emit(&out, common.format(OutputFormat::Json));
            Ok(Verdict::of(feasible))
        }
        Command::Discrepancy { arc_lo, arc_hi, n, m } => {
            let theta = common.theta()?;
            let (lo, hi) = (rational::parse(arc_lo)?, rational::parse(arc_hi)?);
            let (ok, out) = match n.as_slice() {
                [] => bail!("no window sizes"),
                [one] => {
                    let r = empirical_discrepancy(&theta, &lo, &hi, Interval::closed(1, *one)?, *m)?;
                    (r.within_bound, serde_json::to_value(r)?)
                }
                many => {
                    if m.is_some() {
                        bail!("--m applies to a single window");
                    }
                    let r = discrepancy_decay(&theta, &lo, &hi, many)?;
                    (r.reports.iter().all(|x| x.within_bound), serde_json::to_value(r)?)
                }
            };
            emit(&out, common.format(OutputFormat::Json));
            Ok(Verdict::of(ok))
        }
        Command::Montecarlo { test } => montecarlo(common, test),
        Command::Scan { resolution, slab } => {
            let report = scan_discrepancy(*resolution, *slab)?;
            match common.format(OutputFormat::Csv) {
                OutputFormat::Csv => print!("{}", scan_csv(&report)),
                OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report)?),
            }
            Ok(Verdict::Pass)
        }
    }
}

fn montecarlo(common: &Common, test: &Trial) -> Result<Verdict> {
    let format = common.format(OutputFormat::Json);
    match test {
        Trial::Basic { i_len, j_len, r, p, q, trials } => {
            let base = BasicProbaParams { i_len: *i_len, j_len: *j_len, r: r[0], p: *p, q: *q, trials: *trials, seed: common.seed()? };
            let stats = basic_proba_sweep(&base, r)?;
            let rows: Vec<Value> = r.iter().zip(&stats).map(|(r, s)| json!({ "r": r, "stats": s })).collect();
            emit(&json!({ "params": base, "sweep": rows }), format);
            Ok(Verdict::of(stats.iter().all(|s| s.within_bound)))
        }
        Trial::Cor { m, n, p, q, epsilon, trials } => {
            let params = CorProbaParams { m: *m, n: *n, p: *p, q: *q, epsilon: *epsilon, trials: *trials, seed: common.seed()? };
            let stats = verify_cor_proba(&params)?;
            emit(&json!({ "params": params, "stats": stats }), format);
            Ok(Verdict::of(stats.within_bound))
        }
        Trial::Dens0 { config, epsilons, max_density } => {
            let config = common.apply(load_config(config)?)?;
            let report = run_dens0(&config, epsilons)?;
            let pass = report.final_density <= *max_density;
            emit(&serde_json::to_value(&report)?, format);
            Ok(Verdict::of(pass))
        }
    }
}
