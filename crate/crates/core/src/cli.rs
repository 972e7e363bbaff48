//! The `fid` command-line front end.
//!
//! Output is deterministic: floats are printed with 17 significant digits,
//! lines end in `\n`, and every artifact starts with a provenance header
//! (`#` comments for CSV, a `meta` object for JSON).

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::closed_form::{
    fid_closed_finite, fid_closed_finite_normalized, fid_infinite, second_moment, thermal_amplitude,
    thermal_fid_infinite, ClosedFormVariant, SecondMoment, MAX_RAW_SPINS,
};
use crate::error::{FidError, Result};
use crate::exec::Execution;
use crate::experiment::{
    fit_fid, ingest_records, map_time, synthetic_records, PulseCycleSpec, SearchInterval, SyntheticSpec,
};
use crate::fermion::{fid_free_fermion, mode_set, thermal_fid_free_fermion};
use crate::model::{beta_from_physical, ChainSpec, FidSeries, ThermalSpec, TimeGrid};
use crate::oracle::{OracleEngine, MAX_DENSE_SPINS};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest chain for which `moments` reports the dense commutator moment.
const MOMENTS_ORACLE_SPINS: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "fid", version, about = "Free induction decay of dipolar spin chains under multi-pulse MQ NMR")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct ChainArgs {
    /// Number of spins N
    #[arg(long)]
    pub n_spins: i64,
    /// Nearest-neighbour coupling D, rad/s
    #[arg(long)]
    pub coupling: f64,
}

#[derive(Debug, Args, Clone)]
pub struct GridArgs {
    /// Last sample time, seconds (grid starts at 0)
    #[arg(long)]
    pub t_max: f64,
    /// Number of samples
    #[arg(long, default_value_t = 256)]
    pub points: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub output: OutputFormat,
    /// Output path (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct ThermalArgs {
    /// Inverse temperature parameter hbar*omega0/(k T)
    #[arg(long)]
    pub beta: Option<f64>,
    /// Larmor frequency, MHz (used with --temperature)
    #[arg(long)]
    pub larmor_mhz: Option<f64>,
    /// Temperature, K (used with --larmor-mhz)
    #[arg(long)]
    pub temperature: Option<f64>,
}

#[derive(Debug, Subcommand, Clone)]
pub enum Command {
    /// Closed-form FIDs: J0(2Dt) and the finite-N Bessel forms
    Analytic {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact finite-N FID from the fermionic mode sum
    Fermion {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Brute-force dense evolution (N <= 12)
    Oracle {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Low-temperature FID from an equilibrium initial state
    Thermal {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        thermal: ThermalArgs,
        /// Add the dense-oracle column (N <= 12)
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// All engines side by side, normalized (N <= 12)
    Compare {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Second moment of the line shape
    Moments {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Fit D to multi-pulse intensity data (CSV: tau_us,cycles,intensity)
    Fit {
        /// Data file; omit with --synthetic
        data: Option<PathBuf>,
        /// Cycle duration in units of tau
        #[arg(long, default_value_t = 12.0)]
        cycle_multiplier: f64,
        #[arg(long, default_value_t = 8)]
        pulses_per_cycle: u32,
        /// Lower bound of the D search, rad/s
        #[arg(long, default_value_t = 1e3)]
        d_min: f64,
        /// Upper bound of the D search, rad/s
        #[arg(long, default_value_t = 1e5)]
        d_max: f64,
        /// Fit generated J0 data instead of a file
        #[arg(long)]
        synthetic: bool,
        /// Seed of the synthetic-noise generator
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Synthetic noise standard deviation relative to the amplitude
        #[arg(long, default_value_t = 0.02)]
        noise: f64,
        /// Coupling used to generate synthetic data, rad/s
        #[arg(long, default_value_t = 15.5e3)]
        true_d: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Analytic,
    Fermion,
    Oracle,
    Thermal,
    Compare,
    Moments,
    Fit,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Analytic => "analytic",
            CommandKind::Fermion => "fermion",
            CommandKind::Oracle => "oracle",
            CommandKind::Thermal => "thermal",
            CommandKind::Compare => "compare",
            CommandKind::Moments => "moments",
            CommandKind::Fit => "fit",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FitSource {
    File(PathBuf),
    Synthetic(SyntheticSpec),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitConfig {
    pub source: FitSource,
    pub search: SearchInterval,
}

/// A parsed and validated invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub chain: Option<ChainSpec>,
    pub grid: Option<TimeGrid>,
    pub thermal: Option<ThermalSpec>,
    pub cycle_spec: Option<PulseCycleSpec>,
    pub fit: Option<FitConfig>,
    pub with_oracle: bool,
    pub output: OutputFormat,
    pub out: Option<PathBuf>,
}

fn chain_from(args: &ChainArgs) -> Result<ChainSpec> {
    if args.n_spins < 1 {
        return Err(FidError::validation("n_spins", format!("must be at least 1, got {}", args.n_spins)));
    }
    ChainSpec::new(args.n_spins as usize, args.coupling)
}

fn grid_from(args: &GridArgs) -> Result<TimeGrid> {
    if args.points < 1 {
        return Err(FidError::validation("points", format!("must be at least 1, got {}", args.points)));
    }
    TimeGrid::from_t_max(args.t_max, args.points as usize)
}

fn thermal_from(args: &ThermalArgs) -> Result<ThermalSpec> {
    match (args.beta, args.larmor_mhz, args.temperature) {
        (Some(b), None, None) => ThermalSpec::new(b),
        (None, Some(f), Some(t)) => beta_from_physical(2.0 * std::f64::consts::PI * f * 1e6, t),
        _ => Err(FidError::validation(
            "beta",
            "give either --beta or both --larmor-mhz and --temperature",
        )),
    }
}

fn dense_guard(chain: &ChainSpec) -> Result<()> {
    if chain.n_spins() > MAX_DENSE_SPINS {
        return Err(FidError::ComputeGuard(format!(
            "the dense oracle is limited to N <= {MAX_DENSE_SPINS} (got N = {}); \
             use `fid fermion` for longer chains",
            chain.n_spins()
        )));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_command(command: &Command) -> Result<Self> {
        let base = |kind, out: &OutputArgs| RunConfig {
            command: kind,
            chain: None,
            grid: None,
            thermal: None,
            cycle_spec: None,
            fit: None,
            with_oracle: false,
            output: out.output,
            out: out.out.clone(),
        };
        let cfg = match command {
            Command::Analytic { chain, grid, out } => RunConfig {
                chain: Some(chain_from(chain)?),
                grid: Some(grid_from(grid)?),
                ..base(CommandKind::Analytic, out)
            },
            Command::Fermion { chain, grid, out } => RunConfig {
                chain: Some(chain_from(chain)?),
                grid: Some(grid_from(grid)?),
                ..base(CommandKind::Fermion, out)
            },
            Command::Oracle { chain, grid, out } => {
                let c = chain_from(chain)?;
                let g = grid_from(grid)?;
                dense_guard(&c)?;
                RunConfig { chain: Some(c), grid: Some(g), with_oracle: true, ..base(CommandKind::Oracle, out) }
            }
            Command::Thermal { chain, grid, thermal, oracle, out } => {
                let c = chain_from(chain)?;
                let g = grid_from(grid)?;
                let th = thermal_from(thermal)?;
                if *oracle {
                    dense_guard(&c)?;
                }
                RunConfig {
                    chain: Some(c),
                    grid: Some(g),
                    thermal: Some(th),
                    with_oracle: *oracle,
                    ..base(CommandKind::Thermal, out)
                }
            }
            Command::Compare { chain, grid, out } => {
                let c = chain_from(chain)?;
                let g = grid_from(grid)?;
                dense_guard(&c)?;
                RunConfig { chain: Some(c), grid: Some(g), with_oracle: true, ..base(CommandKind::Compare, out) }
            }
            Command::Moments { chain, out } => {
                let c = chain_from(chain)?;
                RunConfig {
                    chain: Some(c),
                    with_oracle: c.n_spins() <= MOMENTS_ORACLE_SPINS,
                    ..base(CommandKind::Moments, out)
                }
            }
            Command::Fit {
                data,
                cycle_multiplier,
                pulses_per_cycle,
                d_min,
                d_max,
                synthetic,
                seed,
                noise,
                true_d,
                out,
            } => {
                let cycle = PulseCycleSpec::new(*pulses_per_cycle, *cycle_multiplier)?;
                let search = SearchInterval::new(*d_min, *d_max)?;
                let source = match (data, synthetic) {
                    (Some(path), false) => FitSource::File(path.clone()),
                    (None, true) => {
                        if !(true_d.is_finite() && *true_d > 0.0) {
                            return Err(FidError::validation("true_d", "must be positive"));
                        }
                        if !(noise.is_finite() && *noise >= 0.0) {
                            return Err(FidError::validation("noise", "must be non-negative"));
                        }
                        FitSource::Synthetic(SyntheticSpec {
                            d: *true_d,
                            noise_sigma: *noise,
                            seed: *seed,
                            ..Default::default()
                        })
                    }
                    (Some(_), true) => {
                        return Err(FidError::validation("data", "a data file cannot be combined with --synthetic"))
                    }
                    (None, false) => return Err(FidError::validation("data", "a data file or --synthetic is required")),
                };
                RunConfig {
                    cycle_spec: Some(cycle),
                    fit: Some(FitConfig { source, search }),
                    ..base(CommandKind::Fit, out)
                }
            }
        };
        Ok(cfg)
    }

    fn chain(&self) -> ChainSpec {
        self.chain.expect("command requires a chain")
    }

    fn grid(&self) -> TimeGrid {
        self.grid.expect("command requires a grid")
    }

    /// `key=value` pairs echoed into the provenance header.
    fn echo(&self) -> Vec<(String, String)> {
        let mut kv = Vec::new();
        if let Some(c) = &self.chain {
            kv.push(("n_spins".into(), c.n_spins().to_string()));
            kv.push(("coupling".into(), fmt_f64(c.coupling())));
        }
        if let Some(g) = &self.grid {
            kv.push(("t_start".into(), fmt_f64(g.start())));
            kv.push(("t_step".into(), fmt_f64(g.step())));
            kv.push(("points".into(), g.count().to_string()));
        }
        if let Some(t) = &self.thermal {
            kv.push(("beta".into(), fmt_f64(t.beta())));
        }
        if let Some(c) = &self.cycle_spec {
            kv.push(("pulses_per_cycle".into(), c.pulses_per_cycle.to_string()));
            kv.push(("cycle_multiplier".into(), fmt_f64(c.cycle_duration_in_tau)));
        }
        if let Some(f) = &self.fit {
            match &f.source {
                FitSource::File(p) => kv.push(("data".into(), p.display().to_string())),
                FitSource::Synthetic(s) => {
                    kv.push(("synthetic_d".into(), fmt_f64(s.d)));
                    kv.push(("synthetic_noise".into(), fmt_f64(s.noise_sigma)));
                    kv.push(("seed".into(), s.seed.to_string()));
                }
            }
            kv.push(("d_min".into(), fmt_f64(f.search.lo)));
            kv.push(("d_max".into(), fmt_f64(f.search.hi)));
        }
        kv
    }
}

/// 17 significant digits, `.` decimal separator.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // avoid "-0" variations
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

/// A computed result before serialization.
#[derive(Clone, Debug, PartialEq)]
pub enum Artifact {
    Table { columns: Vec<String>, rows: Vec<Vec<f64>>, summary: Vec<(String, Value)> },
    Record { fields: Vec<(String, Value)> },
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn table(columns: &[&str], series: &[&[f64]], times: &[f64]) -> Artifact {
    let rows = (0..times.len())
        .map(|i| std::iter::once(times[i]).chain(series.iter().map(|s| s[i])).collect())
        .collect();
    Artifact::Table { columns: columns.iter().map(|s| s.to_string()).collect(), rows, summary: Vec::new() }
}

fn with_summary(mut a: Artifact, items: Vec<(&str, Value)>) -> Artifact {
    if let Artifact::Table { summary, .. } = &mut a {
        summary.extend(items.into_iter().map(|(k, v)| (k.to_string(), v)));
    }
    a
}

fn normalized(s: &FidSeries) -> Result<FidSeries> {
    s.normalized()
}

/// Runs the configured computation.
pub fn dispatch(config: &RunConfig) -> Result<Artifact> {
    match config.command {
        CommandKind::Analytic => {
            let chain = config.chain();
            let grid = config.grid();
            let j0 = fid_infinite(&chain, &grid)?;
            let finite_n_norm = fid_closed_finite_normalized(&chain, &grid)?;
            if chain.n_spins() <= MAX_RAW_SPINS {
                let bessel_series = fid_closed_finite(&chain, &grid, ClosedFormVariant::BesselSeries)?;
                let finite_n = fid_closed_finite(&chain, &grid, ClosedFormVariant::FiniteN)?;
                let a = table(
                    &["t", "j0", "finite_n_normalized", "bessel_series", "finite_n"],
                    &[j0.values(), finite_n_norm.values(), bessel_series.values(), finite_n.values()],
                    j0.times(),
                );
                Ok(with_summary(a, vec![("raw_amplitude_at_zero", num(finite_n.amplitude_at_zero()))]))
            } else {
                Ok(table(&["t", "j0", "finite_n_normalized"], &[j0.values(), finite_n_norm.values()], j0.times()))
            }
        }
        CommandKind::Fermion => {
            let raw = fid_free_fermion(&config.chain(), &config.grid())?;
            let norm = normalized(&raw)?;
            let a = table(&["t", "raw", "normalized"], &[raw.values(), norm.values()], raw.times());
            Ok(with_summary(a, vec![("amplitude_at_zero", num(raw.amplitude_at_zero()))]))
        }
        CommandKind::Oracle => {
            let chain = config.chain();
            dense_guard(&chain)?;
            let raw = OracleEngine::new(&chain)?.fid(&config.grid(), Execution::default())?;
            let norm = normalized(&raw)?;
            let a = table(&["t", "raw", "normalized"], &[raw.values(), norm.values()], raw.times());
            Ok(with_summary(a, vec![("amplitude_at_zero", num(raw.amplitude_at_zero()))]))
        }
        CommandKind::Thermal => {
            let chain = config.chain();
            let grid = config.grid();
            let thermal = config.thermal.ok_or_else(|| FidError::validation("beta", "required for thermal"))?;
            let fermion = thermal_fid_free_fermion(&chain, &thermal, &grid)?;
            let law = thermal_fid_infinite(&chain, &thermal, &grid)?;
            let summary = vec![
                ("beta", num(thermal.beta())),
                ("amplitude_at_zero", num(thermal_amplitude(&chain, &thermal))),
            ];
            if config.with_oracle {
                dense_guard(&chain)?;
                let oracle = OracleEngine::new(&chain)?.thermal_fid(&thermal, &grid, Execution::default())?;
                let a = table(
                    &["t", "fermion", "j0_law", "oracle"],
                    &[fermion.values(), law.values(), oracle.values()],
                    fermion.times(),
                );
                let dev = oracle.max_abs_diff(&fermion)?;
                let mut s = summary;
                s.push(("max_abs_oracle_minus_fermion", num(dev)));
                Ok(with_summary(a, s))
            } else {
                let a = table(&["t", "fermion", "j0_law"], &[fermion.values(), law.values()], fermion.times());
                Ok(with_summary(a, summary))
            }
        }
        CommandKind::Compare => {
            let chain = config.chain();
            let grid = config.grid();
            dense_guard(&chain)?;
            let oracle = normalized(&OracleEngine::new(&chain)?.fid(&grid, Execution::default())?)?;
            let fermion = normalized(&fid_free_fermion(&chain, &grid)?)?;
            let finite_n = fid_closed_finite_normalized(&chain, &grid)?;
            let j0 = fid_infinite(&chain, &grid)?;
            let a = table(
                &["t", "oracle", "fermion", "closed_finite_n", "j0"],
                &[oracle.values(), fermion.values(), finite_n.values(), j0.values()],
                oracle.times(),
            );
            Ok(with_summary(
                a,
                vec![
                    ("max_abs_oracle_minus_fermion", num(oracle.max_abs_diff(&fermion)?)),
                    ("max_abs_oracle_minus_closed_finite_n", num(oracle.max_abs_diff(&finite_n)?)),
                    ("max_abs_oracle_minus_j0", num(oracle.max_abs_diff(&j0)?)),
                ],
            ))
        }
        CommandKind::Moments => {
            let chain = config.chain();
            let SecondMoment { thermodynamic_limit, finite_n } = second_moment(&chain);
            let mut fields = vec![
                ("m2_thermodynamic_limit".to_string(), num(thermodynamic_limit)),
                ("m2_finite_n".to_string(), num(finite_n)),
                ("m2_finite_n_note".to_string(), json!(SecondMoment::FINITE_N_LABEL)),
                ("m2_mode_sum".to_string(), num(mode_set(&chain).second_moment())),
            ];
            if config.with_oracle {
                let m = OracleEngine::new(&chain)?.commutator_second_moment()?;
                fields.push(("m2_oracle_commutator".to_string(), num(m)));
            }
            Ok(Artifact::Record { fields })
        }
        CommandKind::Fit => {
            let fit_cfg = config.fit.as_ref().ok_or_else(|| FidError::validation("data", "missing fit source"))?;
            let cycle = config.cycle_spec.unwrap_or_default();
            let records = match &fit_cfg.source {
                FitSource::File(path) => ingest_records(File::open(path)?)?,
                FitSource::Synthetic(spec) => synthetic_records(spec, &cycle)?,
            };
            let points = map_time(&records, &cycle);
            let fit = fit_fid(&points, fit_cfg.search)?;
            Ok(Artifact::Record {
                fields: vec![
                    ("d_per_s".into(), num(fit.d_estimate)),
                    ("amplitude".into(), num(fit.amplitude)),
                    ("rms_residual".into(), num(fit.rms_residual)),
                    ("n_points".into(), json!(fit.n_points)),
                    ("search_lo".into(), num(fit.d_search_interval.0)),
                    ("search_hi".into(), num(fit.d_search_interval.1)),
                    ("unbracketed".into(), json!(fit.unbracketed)),
                    ("cycle_multiplier".into(), num(cycle.cycle_duration_in_tau)),
                ],
            })
        }
    }
}

fn render_value_csv(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => fmt_f64(x),
            _ => n.to_string(),
        },
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        Value::Null => "nan".into(),
        other => other.to_string(),
    }
}

/// Serializes an artifact with its provenance header.
pub fn render(config: &RunConfig, artifact: &Artifact) -> String {
    let echo = config.echo();
    match config.output {
        OutputFormat::Csv => {
            let mut s = String::new();
            let _ = writeln!(s, "# command: {}", config.command.name());
            let cfg: Vec<String> = echo.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(s, "# config: {}", cfg.join(" "));
            let _ = writeln!(s, "# version: spinchain-fid {VERSION}");
            match artifact {
                Artifact::Table { columns, rows, summary } => {
                    let _ = writeln!(s, "{}", columns.join(","));
                    for row in rows {
                        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
                        let _ = writeln!(s, "{}", cells.join(","));
                    }
                    for (k, v) in summary {
                        let _ = writeln!(s, "# summary: {k}={}", render_value_csv(v));
                    }
                }
                Artifact::Record { fields } => {
                    let _ = writeln!(s, "key,value");
                    for (k, v) in fields {
                        let _ = writeln!(s, "{k},{}", render_value_csv(v));
                    }
                }
            }
            s
        }
        OutputFormat::Json => {
            let config_obj: Map<String, Value> =
                echo.into_iter().map(|(k, v)| (k, Value::String(v))).collect();
            let mut root = Map::new();
            root.insert(
                "meta".into(),
                json!({
                    "command": config.command.name(),
                    "config": config_obj,
                    "version": format!("spinchain-fid {VERSION}"),
                }),
            );
            match artifact {
                Artifact::Table { columns, rows, summary } => {
                    root.insert("columns".into(), json!(columns));
                    let rows: Vec<Value> =
                        rows.iter().map(|r| Value::Array(r.iter().map(|&x| num(x)).collect())).collect();
                    root.insert("rows".into(), Value::Array(rows));
                    let summary: Map<String, Value> = summary.iter().cloned().collect();
                    root.insert("summary".into(), Value::Object(summary));
                }
                Artifact::Record { fields } => {
                    for (k, v) in fields {
                        root.insert(k.clone(), v.clone());
                    }
                }
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("json values serialize");
            s.push('\n');
            s
        }
    }
}

/// Process exit status for an error.
pub fn exit_code(e: &FidError) -> i32 {
    match e {
        FidError::Validation { .. } | FidError::Parse { .. } => 2,
        FidError::ComputeGuard(_) | FidError::DimensionMismatch { .. } | FidError::NotHermitian(_) => 3,
        FidError::Io(_) => 4,
    }
}

/// Machine-readable error record written to stderr.
pub fn error_record(e: &FidError) -> String {
    let field = match e {
        FidError::Validation { field, .. } => Value::String(field.to_string()),
        _ => Value::Null,
    };
    let line = match e {
        FidError::Parse { line, .. } => json!(line),
        _ => Value::Null,
    };
    let v = json!({
        "error": { "kind": e.kind(), "field": field, "line": line, "message": e.to_string() },
        "exit_code": exit_code(e),
    });
    v.to_string()
}

fn execute(cli: &Cli) -> Result<()> {
    let config = RunConfig::from_command(&cli.command)?;
    let artifact = dispatch(&config)?;
    let text = render(&config, &artifact);
    match &config.out {
        Some(path) => {
            let mut f = File::create(path)?;
            f.write_all(text.as_bytes())?;
            f.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}

/// Entry point shared by the binary; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_record(&e));
            exit_code(&e)
        }
    }
}
