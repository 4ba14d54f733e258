//! Command-line grammar and config-file expansion.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use phasestep::analysis::DEFAULT_SWEEP_STEPS;
use phasestep::{Axis, SchemeId};

#[derive(Debug, Parser)]
#[command(
    name = "phasestep",
    version,
    about = "Stability analysis of time-stepping schemes for the scalar Allen-Cahn ODE"
)]
pub struct Cli {
    /// Flat `key=value` file; every flag has a key of the same name and
    /// flags given on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one trajectory and write it to a file.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Critical step sizes h*(u0, eps).
    #[command(args_override_self = true)]
    Threshold(ThresholdArgs),
    /// Initial value whose first step lands exactly on an equilibrium.
    #[command(args_override_self = true)]
    Adversarial(AdversarialArgs),
    /// Observed convergence order against the exact solution.
    #[command(args_override_self = true)]
    Order(OrderArgs),
    /// Classify every cell of a (u0, h) grid.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Re-run the numerical experiments for first- or second-order schemes.
    #[command(args_override_self = true)]
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestId {
    Test1,
    Test2,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: SchemeId,
    #[arg(long, allow_hyphen_values = true)]
    pub u0: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long)]
    pub h: f64,
    #[arg(long, default_value_t = DEFAULT_SWEEP_STEPS)]
    pub steps: usize,
    #[arg(long, default_value = "trajectory.csv")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub force: Force,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Scheme name, comma-separated list, or `all`.
    #[arg(long, value_parser = parse_schemes, default_value = "all")]
    pub scheme: SchemeList,
    #[arg(long, allow_hyphen_values = true)]
    pub u0: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AdversarialArgs {
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: SchemeId,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long)]
    pub h: f64,
    /// Equilibrium the first step should land on.
    #[arg(long, allow_hyphen_values = true, default_value_t = -1.0)]
    pub target: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub force: Force,
}

#[derive(Debug, Args)]
pub struct OrderArgs {
    #[arg(long, value_parser = parse_schemes, default_value = "all")]
    pub scheme: SchemeList,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
    pub u0: f64,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    /// Final time.
    #[arg(long = "T", default_value_t = 0.25)]
    pub t_end: f64,
    /// Coarsest step; defaults to the largest T/2^k not above h*.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_schemes)]
    pub scheme: SchemeList,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long = "u0-range", value_parser = parse_axis, allow_hyphen_values = true, value_name = "MIN:MAX:N[:log]")]
    pub u0_range: Axis,
    #[arg(long = "h-range", value_parser = parse_axis, value_name = "MIN:MAX:N[:log]")]
    pub h_range: Axis,
    /// Step budget per cell.
    #[arg(long, default_value_t = DEFAULT_SWEEP_STEPS)]
    pub steps: usize,
    /// Output file; with several schemes the scheme name is appended to the stem.
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub force: Force,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub test: TestId,
    /// Parent directory; results go to `<out>/<test>/` as per-case CSVs and `manifest.json`.
    #[arg(long, default_value = "reproduce_out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SWEEP_STEPS)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct Force {
    /// Step beyond the solvability bound, picking the real root nearest u_prev.
    #[arg(
        long = "force-unsafe",
        num_args = 0..=1,
        require_equals = true,
        default_value_t = false,
        default_missing_value = "true",
        value_name = "BOOL"
    )]
    pub force_unsafe: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeList(pub Vec<SchemeId>);

fn parse_scheme(s: &str) -> Result<SchemeId, String> {
    s.parse().map_err(|e: phasestep::Error| e.to_string())
}

fn parse_schemes(s: &str) -> Result<SchemeList, String> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(SchemeList(SchemeId::ALL.to_vec()));
    }
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let id = parse_scheme(part)?;
        if !out.contains(&id) {
            out.push(id);
        }
    }
    if out.is_empty() {
        return Err("no scheme given".into());
    }
    Ok(SchemeList(out))
}

/// `MIN:MAX:N[:log|:linear]`.
pub fn parse_axis(s: &str) -> Result<Axis, String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(format!("expected MIN:MAX:N[:log], got {s:?}"));
    }
    let num = |x: &str| x.parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    let (min, max) = (num(parts[0])?, num(parts[1])?);
    let count = parts[2].parse::<usize>().map_err(|e| format!("{:?}: {e}", parts[2]))?;
    let axis = match parts.get(3).copied() {
        None | Some("lin") | Some("linear") => Axis::linear(min, max, count),
        Some("log") => Axis::log(min, max, count),
        Some(other) => return Err(format!("unknown spacing {other:?} (use log or linear)")),
    };
    axis.validate().map_err(|e| e.to_string())?;
    Ok(axis)
}

/// Replaces `--config FILE` by the file's settings, placed right after the
/// subcommand so that later command-line flags override them.
pub fn expand_config(mut argv: Vec<String>) -> anyhow::Result<Vec<String>> {
    let Some((pos, len, path)) = argv.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            argv.get(i + 1).map(|p| (i, 2, p.clone()))
        } else {
            a.strip_prefix("--config=").map(|p| (i, 1, p.to_string()))
        }
    }) else {
        return Ok(argv);
    };
    argv.drain(pos..pos + len);
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config file {path}"))?;
    let entries = parse_config(&text).with_context(|| format!("in config file {path}"))?;

    let Some(sub_at) = argv.iter().skip(1).position(|a| !a.starts_with('-')).map(|i| i + 1) else {
        return Ok(argv);
    };
    let root = Cli::command();
    let Some(sub) = root.find_subcommand(&argv[sub_at]) else {
        return Ok(argv);
    };
    let accepted = |c: &clap::Command, key: &str| c.get_arguments().any(|a| a.get_long() == Some(key));
    let mut injected = Vec::new();
    for (key, value) in entries {
        if accepted(sub, &key) {
            injected.push(format!("--{key}={value}"));
        } else if root.get_subcommands().any(|c| accepted(c, &key)) {
            log::debug!("config key {key} does not apply to {}", sub.get_name());
        } else {
            bail!("unknown config key {key:?} in {path}");
        }
    }
    argv.splice(sub_at + 1..sub_at + 1, injected);
    Ok(argv)
}

fn parse_config(text: &str) -> anyhow::Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("line {}: expected key=value, got {line:?}", n + 1);
        };
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        let value = v.trim().trim_matches('"').to_string();
        if key.is_empty() {
            bail!("line {}: empty key", n + 1);
        }
        out.push((key, value));
    }
    Ok(out)
}
