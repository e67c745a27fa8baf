//! Command-line front end.
//!
//! Every flag `--name value` may also appear as a `name = value` line in a
//! `--config` file. Flags win over the file, the file wins over built-in
//! defaults.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};
use rayon::prelude::*;

use crate::engine::{run, EnsembleResult, RunOutput};
use crate::model::{NetworkConfig, NextHopRule, Position, Protocol, SinkMode};
use crate::report::{emit_summary, emit_trace, summary_csv, sweep, SummaryRecord, SweepDim};

/// Raw flag values. Typed parsing happens later so that every bad value
/// gets its own diagnostic.
#[derive(Parser, Debug)]
#[command(name = "wsn-lifesim", about = "Sensor network lifetime simulator")]
struct RawArgs {
    /// leach, eleach, propose1 or propose2; comma list for several
    #[arg(long, value_name = "P[,P..]")]
    protocol: Option<String>,
    /// Node count [100]
    #[arg(long, value_name = "N", allow_hyphen_values = true)]
    nodes: Option<String>,
    /// Field size in meters [200x200]
    #[arg(long, value_name = "WxH")]
    area: Option<String>,
    /// static or mobile
    #[arg(long, value_name = "MODE")]
    sink: Option<String>,
    /// Initial sink position [W/2,1.5H]
    #[arg(long, value_name = "X,Y", allow_hyphen_values = true)]
    sink_pos: Option<String>,
    /// Meters of orbit per round [10]
    #[arg(long, value_name = "M", allow_hyphen_values = true)]
    sink_speed: Option<String>,
    /// Round limit [10000]
    #[arg(long, value_name = "R", allow_hyphen_values = true)]
    rounds: Option<String>,
    /// Single seed [1]
    #[arg(long, value_name = "S", allow_hyphen_values = true)]
    seed: Option<String>,
    /// Seed ensemble
    #[arg(long, value_name = "S1,S2,..")]
    seeds: Option<String>,
    /// Baseline head probability [0.05]
    #[arg(long, value_name = "PROB", allow_hyphen_values = true)]
    p: Option<String>,
    /// Layer width fraction [0.15]
    #[arg(long, value_name = "F", allow_hyphen_values = true)]
    layer_fraction: Option<String>,
    /// Initial energy per node in joules [0.5]
    #[arg(long, value_name = "J", allow_hyphen_values = true)]
    energy: Option<String>,
    /// Amplifier energy per bit per m^gamma
    #[arg(long, value_name = "J", allow_hyphen_values = true)]
    e_amp: Option<String>,
    /// Path-loss exponent at or beyond --d-threshold
    #[arg(long, value_name = "G", allow_hyphen_values = true)]
    gamma_far: Option<String>,
    /// Distance where --gamma-far starts
    #[arg(long, value_name = "M", allow_hyphen_values = true)]
    d_threshold: Option<String>,
    /// Mobile sink orbit radius
    #[arg(long, value_name = "M", allow_hyphen_values = true)]
    orbit_radius: Option<String>,
    /// Arc between sink position announcements [10]
    #[arg(long, value_name = "M", allow_hyphen_values = true)]
    boundary_spacing: Option<String>,
    /// Announcement size in bits [200]
    #[arg(long, value_name = "K", allow_hyphen_values = true)]
    beacon_bits: Option<String>,
    /// score or energy-first
    #[arg(long, value_name = "RULE")]
    next_hop: Option<String>,
    /// nodes, area, sink-speed or protocol, e.g. nodes=100,200,300
    #[arg(long, value_name = "DIM=V1,V2,..")]
    sweep: Option<String>,
    /// Output directory [$WSN_LIFESIM_OUT]
    #[arg(long, value_name = "DIR")]
    out: Option<String>,
    /// File of `name = value` lines using the flag names
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

impl RawArgs {
    fn given(self) -> BTreeMap<String, String> {
        let pairs = [
            ("protocol", self.protocol),
            ("nodes", self.nodes),
            ("area", self.area),
            ("sink", self.sink),
            ("sink-pos", self.sink_pos),
            ("sink-speed", self.sink_speed),
            ("rounds", self.rounds),
            ("seed", self.seed),
            ("seeds", self.seeds),
            ("p", self.p),
            ("layer-fraction", self.layer_fraction),
            ("energy", self.energy),
            ("e-amp", self.e_amp),
            ("gamma-far", self.gamma_far),
            ("d-threshold", self.d_threshold),
            ("orbit-radius", self.orbit_radius),
            ("boundary-spacing", self.boundary_spacing),
            ("beacon-bits", self.beacon_bits),
            ("next-hop", self.next_hop),
            ("sweep", self.sweep),
            ("out", self.out),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect()
    }
}

/// Keys accepted in a config file: every flag except `config` and `help`.
fn file_keys() -> Vec<String> {
    RawArgs::command()
        .get_arguments()
        .filter_map(|a| a.get_long())
        .filter(|l| !matches!(*l, "config" | "help"))
        .map(str::to_string)
        .collect()
}

pub fn usage() -> String {
    RawArgs::command().render_help().to_string()
}

/// A fully resolved invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct CliOptions {
    /// Base config; `protocol` is the first requested protocol.
    pub config: NetworkConfig,
    pub protocols: Vec<Protocol>,
    pub seeds: Vec<u64>,
    pub sweep: Option<SweepDim>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Help(String),
    Run(Box<CliOptions>),
}

/// Parses arguments (without the program name). On failure returns one
/// diagnostic line per problem.
pub fn parse_args<I, S>(args: I, env_out: Option<OsString>) -> Result<Command, Vec<String>>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let argv =
        std::iter::once(OsString::from("wsn-lifesim")).chain(args.into_iter().map(Into::into));
    let raw = match RawArgs::try_parse_from(argv) {
        Ok(raw) => raw,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return Ok(Command::Help(e.render().to_string()))
        }
        Err(e) => {
            let text = e.render().to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            return Err(vec![line.trim_start_matches("error: ").to_string()]);
        }
    };

    let mut errors = Vec::new();
    let mut values = BTreeMap::new();
    if let Some(path) = &raw.config {
        match read_config_file(path) {
            Ok(file) => values = file,
            Err(mut e) => errors.append(&mut e),
        }
    }
    values.extend(raw.given());

    let opts = build_options(&values, env_out, &mut errors);
    if errors.is_empty() {
        Ok(Command::Run(Box::new(opts)))
    } else {
        Err(errors)
    }
}

/// Reads `key = value` lines. Blank lines and `#` comments are skipped.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| vec![format!("{}: {e}", path.display())])?;
    let keys = file_keys();
    let mut out = BTreeMap::new();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = format!("{}:{}", path.display(), i + 1);
        let Some((k, v)) = line.split_once('=') else {
            errors.push(format!("{at}: expected `key = value`"));
            continue;
        };
        let k = k.trim().trim_start_matches("--");
        if !keys.iter().any(|key| key == k) {
            errors.push(format!("{at}: unknown key `{k}`"));
            continue;
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

fn build_options(
    values: &BTreeMap<String, String>,
    env_out: Option<OsString>,
    errors: &mut Vec<String>,
) -> CliOptions {
    let mut cfg = NetworkConfig::default();
    let get = |key: &str| values.get(key).map(String::as_str);

    // Area first: it moves the default sink.
    if let Some(v) = get("area") {
        match parse_area(v) {
            Ok((w, h)) => cfg = cfg.with_area(w, h),
            Err(e) => errors.push(format!("--area: {e}")),
        }
    }

    let mut protocols = vec![cfg.protocol];
    if let Some(v) = get("protocol") {
        match parse_list::<Protocol>(v) {
            Ok(list) => protocols = list,
            Err(e) => errors.push(format!("--protocol: {e}")),
        }
    }
    cfg.protocol = protocols[0];

    macro_rules! set {
        ($key:literal, $field:literal, $ty:ty, $apply:expr) => {
            if let Some(v) = get($key) {
                match v.trim().parse::<$ty>() {
                    Ok(x) => $apply(&mut cfg, x),
                    Err(_) => {
                        errors.push(format!("--{}: invalid value `{}` for {}", $key, v, $field))
                    }
                }
            }
        };
    }
    set!("nodes", "node_count", usize, |c: &mut NetworkConfig, x| c
        .node_count =
        x);
    set!("sink", "sink_mode", SinkMode, |c: &mut NetworkConfig, x| {
        c.sink_mode = x
    });
    set!(
        "sink-speed",
        "sink_speed",
        f64,
        |c: &mut NetworkConfig, x| c.sink_speed = x
    );
    set!("rounds", "rounds_max", u32, |c: &mut NetworkConfig, x| c
        .rounds_max =
        x);
    set!("p", "ch_probability", f64, |c: &mut NetworkConfig, x| c
        .ch_probability =
        x);
    set!(
        "layer-fraction",
        "layer_fraction",
        f64,
        |c: &mut NetworkConfig, x| c.layer_fraction = x
    );
    set!(
        "energy",
        "initial_energy",
        f64,
        |c: &mut NetworkConfig, x| c.initial_energy = x
    );
    set!("e-amp", "e_amp", f64, |c: &mut NetworkConfig, x| c
        .radio
        .e_amp =
        x);
    set!("gamma-far", "gamma_far", f64, |c: &mut NetworkConfig, x| {
        c.radio.gamma_far = x
    });
    set!(
        "d-threshold",
        "d_threshold",
        f64,
        |c: &mut NetworkConfig, x| c.radio.d_threshold = x
    );
    set!(
        "orbit-radius",
        "orbit_radius",
        f64,
        |c: &mut NetworkConfig, x| c.orbit_radius = Some(x)
    );
    set!(
        "boundary-spacing",
        "boundary_spacing",
        f64,
        |c: &mut NetworkConfig, x| c.boundary_spacing = x
    );
    set!(
        "beacon-bits",
        "beacon_bits",
        u32,
        |c: &mut NetworkConfig, x| c.beacon_bits = x
    );
    set!(
        "next-hop",
        "next_hop_rule",
        NextHopRule,
        |c: &mut NetworkConfig, x| c.next_hop_rule = x
    );

    if let Some(v) = get("sink-pos") {
        match parse_pair(v, ',') {
            Ok((x, y)) => cfg.sink_initial = Position { x, y },
            Err(e) => errors.push(format!("--sink-pos: {e}")),
        }
    }

    let mut seeds = vec![cfg.rng_seed];
    match (get("seed"), get("seeds")) {
        (Some(_), Some(_)) => errors.push("--seed and --seeds are mutually exclusive".into()),
        (Some(v), None) => match v.trim().parse::<u64>() {
            Ok(s) => seeds = vec![s],
            Err(_) => errors.push(format!("--seed: invalid value `{v}` for rng_seed")),
        },
        (None, Some(v)) => match parse_list::<u64>(v) {
            Ok(list) => {
                let mut sorted = list.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != list.len() {
                    errors.push("--seeds: seeds must be distinct".into());
                }
                seeds = list;
            }
            Err(e) => errors.push(format!("--seeds: {e}")),
        },
        (None, None) => {}
    }
    cfg.rng_seed = seeds[0];

    let sweep = get("sweep").and_then(|v| match parse_sweep(v) {
        Ok(d) => Some(d),
        Err(e) => {
            errors.push(format!("--sweep: {e}"));
            None
        }
    });

    let out_dir = get("out")
        .map(PathBuf::from)
        .or_else(|| env_out.filter(|s| !s.is_empty()).map(PathBuf::from));

    if let Err(e) = cfg.validate() {
        errors.push(e.to_string());
    }

    CliOptions {
        config: cfg,
        protocols,
        seeds,
        sweep,
        out_dir,
    }
}

fn parse_list<T: FromStr>(v: &str) -> Result<Vec<T>, String> {
    let items: Vec<&str> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err("empty list".into());
    }
    items
        .into_iter()
        .map(|s| s.parse::<T>().map_err(|_| format!("invalid entry `{s}`")))
        .collect()
}

fn parse_pair(v: &str, sep: char) -> Result<(f64, f64), String> {
    let (a, b) = v
        .split_once(sep)
        .ok_or_else(|| format!("expected two numbers separated by `{sep}`, got `{v}`"))?;
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("invalid number `{}`", s.trim()))
    };
    Ok((num(a)?, num(b)?))
}

/// `WxH`, or a single number for a square field.
pub fn parse_area(v: &str) -> Result<(f64, f64), String> {
    if v.contains(['x', 'X']) {
        parse_pair(&v.replace('X', "x"), 'x')
    } else {
        let s = v
            .trim()
            .parse::<f64>()
            .map_err(|_| format!("invalid area `{v}`"))?;
        Ok((s, s))
    }
}

pub fn parse_sweep(v: &str) -> Result<SweepDim, String> {
    let (dim, list) = v.split_once('=').ok_or("expected DIM=V1,V2,..")?;
    let list = list.trim();
    Ok(match dim.trim() {
        "nodes" => SweepDim::Nodes(parse_list(list)?),
        "sink-speed" | "sink_speed" => SweepDim::SinkSpeed(parse_list(list)?),
        "protocol" => SweepDim::Protocol(parse_list(list)?),
        "area" => SweepDim::Area(
            list.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(parse_area)
                .collect::<Result<_, _>>()?,
        ),
        other => {
            return Err(format!(
                "unknown dimension `{other}` (expected nodes, area, sink-speed or protocol)"
            ))
        }
    })
}

/// Runs the requested experiments, returning the summary records.
///
/// Without `--sweep` every (protocol, seed) run also yields a trace, which is
/// written to the output directory when one is set.
pub fn execute(opts: &CliOptions) -> crate::Result<Vec<SummaryRecord>> {
    if let Some(dim) = &opts.sweep {
        let records = sweep(&opts.config, dim, &opts.protocols, &opts.seeds)?;
        if let Some(dir) = &opts.out_dir {
            emit_summary(&records, &dir.join("summary.csv"))?;
        }
        return Ok(records);
    }
    let mut records = Vec::new();
    for &protocol in &opts.protocols {
        let cfg = NetworkConfig {
            protocol,
            ..opts.config.clone()
        };
        let runs: Vec<(u64, RunOutput)> = opts
            .seeds
            .par_iter()
            .map(|&seed| {
                run(&NetworkConfig {
                    rng_seed: seed,
                    ..cfg.clone()
                })
                .map(|out| (seed, out))
            })
            .collect::<crate::Result<_>>()?;
        if let Some(dir) = &opts.out_dir {
            for (seed, out) in &runs {
                emit_trace(
                    &out.metrics,
                    &dir.join(format!("trace_{protocol}_seed{seed}.csv")),
                )?;
            }
        }
        let summaries = runs.into_iter().map(|(s, out)| (s, out.summary)).collect();
        records.push(SummaryRecord::new(
            &cfg,
            EnsembleResult::from_summaries(summaries),
        ));
    }
    if let Some(dir) = &opts.out_dir {
        emit_summary(&records, &dir.join("summary.csv"))?;
    }
    Ok(records)
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn main_with<I, S>(
    args: I,
    env_out: Option<OsString>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let opts = match parse_args(args, env_out) {
        Ok(Command::Help(text)) => {
            let _ = stdout.write_all(text.as_bytes());
            return 0;
        }
        Ok(Command::Run(opts)) => opts,
        Err(errors) => {
            for e in errors {
                let _ = writeln!(stderr, "error: {e}");
            }
            let _ = writeln!(stderr, "run with --help for usage");
            return 2;
        }
    };
    match execute(&opts) {
        Ok(records) => {
            let _ = stdout.write_all(summary_csv(&records).as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}
