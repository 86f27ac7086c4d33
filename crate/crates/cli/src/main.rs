//! `macwalk`: kernels, simulation, verification suites and tiling export.
//!
//! Exit codes: 0 success, 1 verification or absorption failure, 2 usage or
//! parse error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use macwalk::dynamics::{par_replicates, simulate, simulate_cont, RngSeed, Trajectory, DEFAULT_MAX_STEPS};
use macwalk::kernels::{
    jack_successors, successors, upsilon, upsilon_hl, upsilon_jack, upsilon_row, upsilon_schur, JackConfig,
};
use macwalk::tilings::{from_plane_partition, render, to_plane_partition, volume, PlanePartition};
use macwalk::verify::{self, CheckSpec, SuiteReport};
use macwalk::{Mode, ParticleConfig, QTParams, Scalar};

const DEFAULT_CHECKS: &str = include_str!("../checks.toml");

#[derive(Parser)]
#[command(
    name = "macwalk",
    version,
    about = "Macdonald noncolliding random walks with an absorbing wall"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print one transition row as JSON.
    Kernel(KernelArgs),
    /// Run the walk from a configuration until absorption.
    Simulate(SimulateArgs),
    /// Run a verification suite.
    Check(CheckArgs),
    /// Convert a trajectory into a plane partition, or back.
    Tiling(TilingArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Variant {
    General,
    Schur,
    Hl,
    Jack,
}

#[derive(Args)]
struct KernelArgs {
    /// Number of particles; must match `--x0` when given.
    #[arg(long)]
    m: Option<usize>,
    /// Start configuration, comma separated (Jack offsets may be negative).
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    t: Option<String>,
    /// Arithmetic mode; defaults to exact when every parameter is rational.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value = "general")]
    variant: Variant,
    /// Jack parameter α.
    #[arg(long)]
    alpha: Option<String>,
    /// Jack parameter b.
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    x0: String,
    #[arg(long, default_value = "0.3")]
    q: String,
    #[arg(long, default_value = "0.5")]
    t: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent runs; more than one writes a JSON array.
    #[arg(long, default_value_t = 1)]
    replicates: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: u64,
    /// Simulate the continuous-time block-jump process instead.
    #[arg(long)]
    continuous: bool,
    #[arg(long, default_value_t = 100.0)]
    t_max: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// One of normalization, branching, duality, specializations, boltzmann,
    /// jack-limit, hl-generator, link-convergence, all.
    suite: String,
    /// Ranges file replacing the built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    max_x: Option<usize>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Harness self-test: checks a deliberately broken kernel.
    #[arg(long, hide = true)]
    corrupt_kernel: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Ascii,
    Svg,
}

#[derive(Args)]
struct TilingArgs {
    /// Trajectory JSON, or plane-partition JSON with `--from-tiling`; `-` reads stdin.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Print only the volume.
    #[arg(long)]
    volume: bool,
    /// Read a plane partition and print its trajectory.
    #[arg(long)]
    from_tiling: bool,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Exit code and message.
struct Failure {
    code: u8,
    message: String,
}

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure {
        code: 2,
        message: msg.to_string(),
    }
}

fn failed(msg: impl std::fmt::Display) -> Failure {
    Failure {
        code: 1,
        message: msg.to_string(),
    }
}

type CliResult = Result<(), Failure>;

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match output {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {}", path.display(), e))),
        None => io::stdout().write_all(text.as_bytes()).map_err(failed),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(usage)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {}", path.display(), e)))
}

fn parse_list(text: &str) -> Result<Vec<i64>, Failure> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|_| usage(format!("bad coordinate {:?} in {:?}", p, text)))
        })
        .collect()
}

fn parse_config(text: &str, m: Option<usize>) -> Result<ParticleConfig, Failure> {
    let coords = parse_list(text)?;
    if let Some(m) = m {
        if m != coords.len() {
            return Err(usage(format!(
                "--m {} but --x0 has {} particles",
                m,
                coords.len()
            )));
        }
    }
    ParticleConfig::from_signed(&coords).map_err(usage)
}

fn parse_scalar(name: &str, text: &str) -> Result<Scalar, Failure> {
    text.parse::<Scalar>()
        .map_err(|e| usage(format!("--{}: {}", name, e)))
}

fn in_mode(s: Scalar, mode: Option<ModeArg>, name: &str) -> Result<Scalar, Failure> {
    match (mode, &s) {
        (Some(ModeArg::Exact), Scalar::Float(_)) => Err(usage(format!(
            "--{} = {} is not rational; exact mode needs p/q",
            name, s
        ))),
        (Some(ModeArg::Float), _) => Ok(s.to_float()),
        _ => Ok(s),
    }
}

/// Exact unless a value is already a float or float mode was requested.
fn align(values: Vec<Scalar>) -> Vec<Scalar> {
    if values.iter().any(|v| v.mode() == Mode::Float) {
        values.into_iter().map(|v| v.to_float()).collect()
    } else {
        values
    }
}

fn params(q: Scalar, t: Scalar) -> Result<QTParams, Failure> {
    let v = align(vec![q, t]);
    QTParams::new(v[0].clone(), v[1].clone()).map_err(usage)
}

fn required<'a>(value: &'a Option<String>, name: &str) -> Result<&'a str, Failure> {
    value
        .as_deref()
        .ok_or_else(|| usage(format!("--{} is required", name)))
}

fn sum_row(values: &[Scalar]) -> Scalar {
    let zero = match values.first().map(Scalar::mode) {
        Some(Mode::Float) => Scalar::Float(0.0),
        _ => Scalar::int(0),
    };
    values
        .iter()
        .fold(zero, |acc, v| acc.try_add(v).expect("one mode per row"))
}

fn cmd_kernel(a: KernelArgs) -> CliResult {
    let mut header = serde_json::Map::new();
    let entries: Vec<(Vec<i64>, Scalar)> = match a.variant {
        Variant::Jack => {
            let offsets = parse_list(&a.x0)?;
            if let Some(m) = a.m {
                if m != offsets.len() {
                    return Err(usage(format!("--m {} but --x0 has {} entries", m, offsets.len())));
                }
            }
            let alpha = in_mode(
                parse_scalar("alpha", required(&a.alpha, "alpha")?)?,
                a.mode,
                "alpha",
            )?;
            let b = in_mode(parse_scalar("b", required(&a.b, "b")?)?, a.mode, "b")?;
            let v = align(vec![alpha, b]);
            let x = JackConfig::new(offsets, v[0].clone()).map_err(usage)?;
            header.insert("alpha".into(), serde_json::to_value(&v[0]).expect("scalar"));
            header.insert("b".into(), serde_json::to_value(&v[1]).expect("scalar"));
            jack_successors(&x)
                .into_iter()
                .map(|y| Ok((y.offsets().to_vec(), upsilon_jack(&x, &y, &v[1]).map_err(usage)?)))
                .collect::<Result<_, Failure>>()?
        }
        variant => {
            let x = parse_config(&a.x0, a.m)?;
            match variant {
                Variant::Schur => {
                    let q = in_mode(parse_scalar("q", required(&a.q, "q")?)?, a.mode, "q")?;
                    header.insert("q".into(), serde_json::to_value(&q).expect("scalar"));
                    successors(&x)
                        .into_iter()
                        .map(|y| Ok((y.signed(), upsilon_schur(&x, &y, &q).map_err(usage)?)))
                        .collect::<Result<_, Failure>>()?
                }
                Variant::Hl => {
                    let t = in_mode(parse_scalar("t", required(&a.t, "t")?)?, a.mode, "t")?;
                    header.insert("t".into(), serde_json::to_value(&t).expect("scalar"));
                    successors(&x)
                        .into_iter()
                        .map(|y| Ok((y.signed(), upsilon_hl(&x, &y, &t).map_err(usage)?)))
                        .collect::<Result<_, Failure>>()?
                }
                _ => {
                    let q = in_mode(parse_scalar("q", required(&a.q, "q")?)?, a.mode, "q")?;
                    let t = in_mode(parse_scalar("t", required(&a.t, "t")?)?, a.mode, "t")?;
                    let p = params(q, t)?;
                    header.insert("q".into(), serde_json::to_value(p.q()).expect("scalar"));
                    header.insert("t".into(), serde_json::to_value(p.t()).expect("scalar"));
                    upsilon_row(&x, &p)
                        .into_iter()
                        .map(|(y, v)| (y.signed(), v))
                        .collect()
                }
            }
        }
    };
    let values: Vec<Scalar> = entries.iter().map(|(_, v)| v.clone()).collect();
    let total = sum_row(&values);
    let variant = match a.variant {
        Variant::General => "general",
        Variant::Schur => "schur",
        Variant::Hl => "hl",
        Variant::Jack => "jack",
    };
    let mut out = serde_json::Map::new();
    out.insert("variant".into(), json!(variant));
    out.insert("x0".into(), json!(parse_list(&a.x0)?));
    out.extend(header);
    out.insert(
        "row".into(),
        Value::Array(entries.iter().map(|(y, v)| json!({ "y": y, "p": v })).collect()),
    );
    out.insert("sum".into(), serde_json::to_value(&total).expect("scalar"));
    emit(
        &a.output,
        &serde_json::to_string_pretty(&Value::Object(out)).expect("json"),
    )
}

fn cmd_simulate(a: SimulateArgs) -> CliResult {
    let x0 = parse_config(&a.x0, a.m)?;
    if a.replicates == 0 {
        return Err(usage("--replicates must be at least 1"));
    }
    let seed = RngSeed(a.seed);
    if a.continuous {
        if !(a.t_max.is_finite() && a.t_max > 0.0) {
            return Err(usage("--t-max must be positive"));
        }
        let runs = par_replicates(seed, a.replicates, |_, rng| simulate_cont(&x0, rng, a.t_max));
        let runs = runs.into_iter().collect::<Result<Vec<_>, _>>().map_err(usage)?;
        let all_absorbed = runs.iter().all(|r| r.absorbed);
        let text = if runs.len() == 1 {
            serde_json::to_string_pretty(&runs[0])
        } else {
            serde_json::to_string_pretty(&runs)
        }
        .expect("json");
        emit(&a.output, &text)?;
        return if all_absorbed {
            Ok(())
        } else {
            Err(failed(format!("not absorbed by time {}", a.t_max)))
        };
    }
    let p = params(parse_scalar("q", &a.q)?, parse_scalar("t", &a.t)?)?;
    if a.max_steps == 0 {
        return Err(usage("--max-steps must be at least 1"));
    }
    let runs = par_replicates(seed, a.replicates, |_, rng| simulate(&x0, &p, rng, a.max_steps));
    let runs = runs.into_iter().collect::<Result<Vec<_>, _>>().map_err(usage)?;
    let all_terminal = runs.iter().all(|r| r.terminal);
    let text = if runs.len() == 1 {
        runs[0].to_json()
    } else {
        format!(
            "[{}]",
            runs.iter().map(Trajectory::to_json).collect::<Vec<_>>().join(",")
        )
    };
    emit(&a.output, &text)?;
    if all_terminal {
        Ok(())
    } else {
        Err(failed(format!("not absorbed within {} steps", a.max_steps)))
    }
}

#[derive(Deserialize)]
struct ChecksFile {
    version: u32,
    #[serde(flatten)]
    spec: CheckSpec,
}

fn load_spec(path: &Option<PathBuf>) -> Result<CheckSpec, Failure> {
    let text = match path {
        Some(p) => read_input(p)?,
        None => DEFAULT_CHECKS.to_string(),
    };
    let file: ChecksFile = toml::from_str(&text).map_err(|e| usage(format!("checks file: {}", e)))?;
    if file.version != 1 {
        return Err(usage(format!(
            "checks file version {} is not supported",
            file.version
        )));
    }
    Ok(file.spec)
}

fn apply_overrides(spec: &mut CheckSpec, a: &CheckArgs) -> Result<(), Failure> {
    if let Some(m) = a.m {
        spec.normalization.max_m = m;
        spec.specializations.max_m = m;
        spec.boltzmann.max_m = m;
        spec.jack_limit.max_m = m;
        spec.jack_limit.exact_max_m = m;
        spec.hl_generator.rate_max_m = m;
        spec.link_convergence.max_m = m;
        spec.link_convergence.convergence_max_m = m;
    }
    if let Some(x) = a.max_x {
        spec.normalization.max_x = x;
        spec.specializations.max_x = x;
        spec.boltzmann.max_x = x;
        spec.hl_generator.rate_max_x = x;
        spec.link_convergence.max_x = x;
        spec.link_convergence.convergence_max_x = x;
    }
    match (&a.q, &a.t) {
        (None, None) => {}
        (Some(q), Some(t)) => {
            let p = params(parse_scalar("q", q)?, parse_scalar("t", t)?)?;
            if p.mode() != Mode::Exact {
                return Err(usage("identity checks need rational --q and --t"));
            }
            spec.normalization.params = vec![p.clone()];
            spec.branching.params = p.clone();
            spec.duality.params = p.clone();
            spec.boltzmann.params = p.clone();
            spec.link_convergence.params = p;
        }
        _ => return Err(usage("--q and --t must be given together")),
    }
    if let Some(seed) = a.seed {
        spec.boltzmann.seed = seed;
    }
    if let Some(count) = a.count {
        spec.boltzmann.count = count;
    }
    Ok(())
}

fn cmd_check(a: CheckArgs) -> CliResult {
    if a.suite != "all" && !verify::SUITES.contains(&a.suite.as_str()) {
        return Err(usage(format!(
            "unknown suite {:?}; expected one of {} or all",
            a.suite,
            verify::SUITES.join(", ")
        )));
    }
    let mut spec = load_spec(&a.config)?;
    apply_overrides(&mut spec, &a)?;
    let kernel: verify::Kernel = if a.corrupt_kernel {
        verify::corrupted_upsilon
    } else {
        upsilon
    };
    let reports: Vec<SuiteReport> = verify::run(&a.suite, &spec, kernel).map_err(usage)?;
    let passed = reports.iter().all(|r| r.passed);
    let doc = json!({ "suite": a.suite, "passed": passed, "reports": reports });
    emit(&a.output, &serde_json::to_string_pretty(&doc).expect("json"))?;
    match reports.iter().find(|r| !r.passed) {
        None => Ok(()),
        Some(r) => Err(failed(format!(
            "{} failed; counterexample: {}",
            r.suite,
            r.counterexample.as_deref().unwrap_or("none recorded")
        ))),
    }
}

#[derive(Serialize)]
struct VolumeOut {
    volume: usize,
}

fn cmd_tiling(a: TilingArgs) -> CliResult {
    let text = read_input(&a.input)?;
    if a.from_tiling {
        let pp: PlanePartition =
            serde_json::from_str(&text).map_err(|e| usage(format!("invalid plane partition: {}", e)))?;
        let p = params(
            parse_scalar("q", required(&a.q, "q")?)?,
            parse_scalar("t", required(&a.t, "t")?)?,
        )?;
        let traj = from_plane_partition(&pp, &p).map_err(usage)?;
        return emit(&a.output, &traj.to_json());
    }
    let traj = Trajectory::from_json(&text).map_err(|e| usage(format!("invalid trajectory: {}", e)))?;
    let pp = to_plane_partition(&traj).map_err(|e| usage(format!("invalid trajectory: {}", e)))?;
    if a.volume {
        let out = VolumeOut { volume: volume(&pp) };
        return emit(&a.output, &serde_json::to_string(&out).expect("json"));
    }
    let body = match a.format {
        Format::Json => serde_json::to_string_pretty(&pp).expect("json"),
        Format::Ascii => render::ascii(&pp),
        Format::Svg => render::svg(&pp),
    };
    emit(&a.output, &body)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("MACWALK_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("MACWALK_THREADS = {:?} is not a positive integer", value)))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(usage)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Kernel(a) => cmd_kernel(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Check(a) => cmd_check(a),
        Command::Tiling(a) => cmd_tiling(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("macwalk: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
