use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use mblo::compiler::{compile, factorize_loss, schedule_channel, schedule_to_unitary, MacronodeSchedule};
use mblo::io::{matrix_from_json, matrix_to_json_value};
use mblo::linalg::phase_aligned_distance;
use mblo::resources::{curve_csv, gamma_eff, sweep_curve, ResourcePlan, DEFAULT_DELTA_T};
use mblo::sampler::{lossless_distribution, FockConfig, LossySampler};
use mblo::Error;
use serde_json::json;

const AFTER_HELP: &str = "\
Exit codes:
  0  success
  2  invalid input (unreadable file, malformed JSON, non-unitary matrix, bad flag)
  3  infeasible plan (wall clock not longer than a single experiment)
  4  desk-scale cap exceeded (more than 5 photons or 16 modes when sampling)";

#[derive(Parser)]
#[command(name = "mblo", version, about = "Measurement-based linear optics: compile, evaluate, plan and sample")]
#[command(after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a unitary into a macronode schedule.
    #[command(after_help = AFTER_HELP)]
    Compile {
        /// Unitary as {"re": [[...]], "im": [[...]]}.
        unitary: PathBuf,
        /// Number of bulk macronode columns (defaults to the number of modes).
        #[arg(long)]
        depth: Option<usize>,
        /// Write the schedule here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the Gaussian channel a schedule implements at finite squeezing.
    #[command(after_help = AFTER_HELP)]
    Channel {
        schedule: PathBuf,
        /// Resource squeezing parameter r.
        #[arg(long)]
        squeezing_r: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Squeezing needed to finish an n-photon experiment within a wall clock.
    #[command(after_help = AFTER_HELP)]
    Plan {
        #[arg(long)]
        photons: usize,
        /// Seconds, or a duration such as "1day", "90min", "1us".
        #[arg(long, value_parser = parse_seconds)]
        wall_clock: f64,
        /// Macronode clock period in seconds.
        #[arg(long, default_value_t = DEFAULT_DELTA_T)]
        delta_t: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Squeezing curves for 1 minute, 1 day and 1 year as CSV.
    #[command(after_help = AFTER_HELP)]
    Curve {
        /// Photon range "a..b" with 2 <= a < b <= 40.
        #[arg(long, value_parser = parse_range)]
        n_range: (usize, usize),
        #[arg(long, default_value_t = DEFAULT_DELTA_T)]
        delta_t: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat lossy boson sampling until success and compare with the exact distribution.
    #[command(after_help = AFTER_HELP)]
    Sample {
        unitary: PathBuf,
        /// Photons injected into the first modes.
        #[arg(long)]
        photons: usize,
        #[arg(long)]
        squeezing_r: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long, env = "MBLO_SEED", default_value_t = 0)]
        seed: u64,
        /// Number of bulk macronode columns (defaults to the number of modes).
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Input(String),
    Infeasible(String),
    Cap(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InfeasibleWallClock { .. } => Failure::Infeasible(e.to_string()),
            Error::ScaleCap { .. } => Failure::Cap(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn parse_seconds(s: &str) -> Result<f64, String> {
    if let Ok(v) = s.trim().parse::<f64>() {
        return Ok(v);
    }
    humantime::parse_duration(s)
        .map(|d: Duration| d.as_secs_f64())
        .map_err(|e| format!("expected seconds or a duration like \"1day\": {e}"))
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or("expected a..b")?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad lower bound {a:?}"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad upper bound {b:?}"))?;
    if !(2 <= a && a < b && b <= 40) {
        return Err(format!("need 2 <= a < b <= 40, got {a}..{b}"));
    }
    Ok((a, b))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> CmdResult {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(value: &serde_json::Value, out: Option<&Path>) -> CmdResult {
    let mut text = serde_json::to_string_pretty(value).expect("json value serializes");
    text.push('\n');
    emit(&text, out)
}

fn check_positive(name: &str, v: f64) -> CmdResult {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Failure::Input(format!("{name} must be positive, got {v}")))
    }
}

fn cmd_compile(unitary: &Path, depth: Option<usize>, out: Option<&Path>) -> CmdResult {
    let u = matrix_from_json(&read(unitary)?)?;
    let k = depth.unwrap_or(u.nrows());
    let schedule = compile(&u, k)?;
    let (residual, _) = phase_aligned_distance(&schedule_to_unitary(&schedule), &u);
    let mut text = schedule.to_json()?;
    text.push('\n');
    emit(&text, out)?;
    eprintln!("round-trip residual: {residual:.3e}");
    Ok(())
}

fn cmd_channel(schedule: &Path, r: f64, out: Option<&Path>) -> CmdResult {
    let schedule = MacronodeSchedule::from_json(&read(schedule)?)?;
    let channel = schedule_channel(&schedule, r)?;
    let factor = factorize_loss(&channel)?;
    let (unitary_deviation, _) = phase_aligned_distance(&factor.unitary, &schedule_to_unitary(&schedule));
    emit_json(
        &json!({
            "m": schedule.m(),
            "k": schedule.k(),
            "r": r,
            "gamma_eff": factor.efficiency,
            "gamma_eff_closed_form": gamma_eff(r, schedule.k())?,
            "factorization_deviation": factor.deviation,
            "unitary_deviation": unitary_deviation,
            "unitary": matrix_to_json_value(&factor.unitary),
        }),
        out,
    )
}

fn cmd_plan(n: usize, wall_clock: f64, delta_t: f64, out: Option<&Path>) -> CmdResult {
    check_positive("delta-t", delta_t)?;
    if n < 2 {
        return Err(Failure::Input(format!("need at least 2 photons, got {n}")));
    }
    let plan = ResourcePlan::for_wall_clock(n, wall_clock, delta_t)?;
    emit_json(&serde_json::to_value(plan).expect("plan serializes"), out)?;
    eprintln!("{:<22}{}", "photons", plan.n);
    eprintln!("{:<22}{}", "modes", plan.m);
    eprintln!("{:<22}{}", "depth", plan.k);
    eprintln!("{:<22}{:.3e} s", "wall clock", plan.wall_clock);
    eprintln!("{:<22}{:.3e} s", "experiment time", plan.tau);
    eprintln!("{:<22}{:.4e}", "expected trials", plan.trials);
    eprintln!("{:<22}{:.6}", "squeezing r", plan.r);
    eprintln!("{:<22}{:.2} dB", "squeezing", plan.squeezing_db);
    eprintln!("{:<22}{:.6}", "gamma", plan.gamma);
    eprintln!("{:<22}{:.6}", "gamma_eff", plan.gamma_eff);
    eprintln!("{:<22}{:.4e}", "energy per mode", plan.energy_scale);
    eprintln!("{:<22}{}", "within bound", plan.within_bound);
    Ok(())
}

fn cmd_curve(range: (usize, usize), delta_t: f64, out: Option<&Path>) -> CmdResult {
    check_positive("delta-t", delta_t)?;
    let rows = sweep_curve(range.0, range.1, delta_t)?;
    emit(&curve_csv(&rows), out)
}

struct SampleArgs<'a> {
    unitary: &'a Path,
    photons: usize,
    r: f64,
    trials: u64,
    seed: u64,
    depth: Option<usize>,
}

fn cmd_sample(args: SampleArgs, out: Option<&Path>) -> CmdResult {
    let u = matrix_from_json(&read(args.unitary)?)?;
    let m = u.nrows();
    let k = args.depth.unwrap_or(m);
    let input = FockConfig::first_modes(args.photons, m)?;
    let efficiency = gamma_eff(args.r, k)?;
    // the sampler enforces the photon and mode caps before compiling
    let sampler = LossySampler::new(&u, &input, efficiency)?;
    let schedule = compile(&u, k)?;
    let (compile_residual, _) = phase_aligned_distance(&schedule_to_unitary(&schedule), &u);

    let summary = sampler.run(args.trials, args.seed);
    let exact = lossless_distribution(&u, &input)?;
    let empirical = summary.postselected();
    let tv = (summary.successes > 0).then(|| empirical.tv_distance(&exact));
    let expected_rate = efficiency.powi(args.photons as i32);
    emit_json(
        &json!({
            "m": m,
            "n": args.photons,
            "k": k,
            "r": args.r,
            "seed": args.seed,
            "gamma_eff": efficiency,
            "compile_residual": compile_residual,
            "ledger": {
                "trials": summary.trials,
                "successes": summary.successes,
                "failures": summary.failures(),
                "detected_histogram": summary.detected_histogram,
            },
            "success_rate": summary.success_rate(),
            "expected_success_rate": expected_rate,
            "success_rate_sigma": (expected_rate * (1.0 - expected_rate) / args.trials.max(1) as f64).sqrt(),
            "postselected": empirical.to_json_value(),
            "tv_distance": tv,
        }),
        out,
    )
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Compile { unitary, depth, out } => cmd_compile(&unitary, depth, out.as_deref()),
        Command::Channel { schedule, squeezing_r, out } => cmd_channel(&schedule, squeezing_r, out.as_deref()),
        Command::Plan { photons, wall_clock, delta_t, out } => cmd_plan(photons, wall_clock, delta_t, out.as_deref()),
        Command::Curve { n_range, delta_t, out } => cmd_curve(n_range, delta_t, out.as_deref()),
        Command::Sample { unitary, photons, squeezing_r, trials, seed, depth, out } => cmd_sample(
            SampleArgs { unitary: &unitary, photons, r: squeezing_r, trials, seed, depth },
            out.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Infeasible(msg)) => {
            eprintln!("infeasible: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("cap exceeded: {msg}");
            ExitCode::from(4)
        }
    }
}
