//! Command-line front end.

mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Value, json};

pub use config::{
    EngineChoice, GridConfig, LadderConfig, OutputConfig, ParamsConfig, RunConfig, ThresholdConfig, parse_grid,
    parse_ladder, parse_reals,
};

use crate::checks::{self, DominanceName, DominanceOptions, ExponentRegime, Property, VanishingOptions, Verdict};
use crate::error::{MorreyError, Result};
use crate::grid::{self, Bump, Family, FamilyDescriptor, GridFunction, GridSpec};
use crate::modular::{self, MorreyParams};
use crate::operators::{self, OperatorSpec};
use crate::oracle::{OracleRequest, oracle_eval};

/// Environment variable holding the worker count.
pub const THREADS_ENV: &str = "MORREY_THREADS";

#[derive(Parser, Debug)]
#[command(name = "morrey", version, about = "Morrey norms, operators and inequality checks on grids")]
struct Cli {
    /// Worker threads; overrides MORREY_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct RunArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the resolved configuration to this file.
    #[arg(long)]
    save_config: Option<PathBuf>,
    /// Grid as "dim,L,cells" (domain [-L, L]^dim).
    #[arg(long)]
    grid: Option<String>,
    /// Radius ladder as "rmin,ratio,count".
    #[arg(long)]
    ladder: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    engine: Option<EngineChoice>,
    #[arg(long)]
    vanishing_threshold: Option<f64>,
    #[arg(long)]
    non_vanishing_threshold: Option<f64>,
    /// Main output file; JSON reports go to standard output when absent.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    /// Secondary CSV output.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    Ball,
    Gaussian,
    SmoothBump,
    PowerLaw,
    BumpTrain,
}

#[derive(Args, Debug, Clone)]
struct FamilyArgs {
    #[arg(long, value_enum, default_value = "ball")]
    family: FamilyKind,
    /// Center coordinates, comma separated; missing axes are 0.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    center: String,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 1.0)]
    width: f64,
    #[arg(long, default_value_t = 1.0)]
    height: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Bump-train spacing along the first axis.
    #[arg(long, default_value_t = 3.0)]
    spacing: f64,
    /// Bump-train length.
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 1.0)]
    dilation: f64,
    /// Full family descriptor as JSON; replaces the other family flags.
    #[arg(long)]
    family_json: Option<String>,
}

impl FamilyArgs {
    fn descriptor(&self) -> Result<FamilyDescriptor> {
        if let Some(text) = &self.family_json {
            return serde_json::from_str(text).map_err(|e| MorreyError::Config(format!("family json: {e}")));
        }
        let center = parse_reals(&self.center)?;
        let variant = match self.family {
            FamilyKind::Ball => Family::BallIndicator { center, radius: self.radius, height: self.height },
            FamilyKind::Gaussian => Family::Gaussian { center, width: self.width, height: self.height },
            FamilyKind::SmoothBump => Family::SmoothBump { center, radius: self.radius, height: self.height },
            FamilyKind::PowerLaw => Family::PowerLaw { gamma: self.gamma },
            FamilyKind::BumpTrain => {
                let first = center.first().copied().unwrap_or(0.0);
                let bumps = (0..self.count)
                    .map(|k| {
                        let mut c = center.clone();
                        if c.is_empty() {
                            c.push(0.0);
                        }
                        c[0] = first + self.spacing * k as f64;
                        Bump { center: c, radius: self.radius, height: self.height }
                    })
                    .collect();
                Family::BumpTrain { bumps }
            }
        };
        Ok(FamilyDescriptor::new(variant).with_dilation(self.dilation))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RegimeArg {
    Spanne,
    Adams,
}

impl From<RegimeArg> for ExponentRegime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Spanne => ExponentRegime::Spanne,
            RegimeArg::Adams => ExponentRegime::Adams,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample an analytic family on a grid and write a .mry file.
    Synth {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Apply an operator given as JSON, e.g. '{"kind":"maximal"}'.
    Apply {
        #[command(flatten)]
        run: RunArgs,
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(long)]
        op: String,
        /// Evaluate with the brute-force oracle instead of the fast path.
        #[arg(long)]
        oracle: bool,
        /// Oracle refinement factor.
        #[arg(long, default_value_t = 1)]
        refinement: usize,
    },
    /// Write the modular profile sup_x r^{-lambda} int_B |f|^p over the ladder as CSV.
    Profile {
        #[command(flatten)]
        run: RunArgs,
        #[arg(short = 'i', long)]
        input: PathBuf,
    },
    /// Write the V* sequence as CSV.
    Vstar {
        #[command(flatten)]
        run: RunArgs,
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long, default_value_t = 1.0)]
        ball_radius: f64,
    },
    /// Report the Morrey norm as JSON.
    Norm {
        #[command(flatten)]
        run: RunArgs,
        #[arg(short = 'i', long)]
        input: PathBuf,
    },
    /// Run a check suite and emit a JSON report.
    Check {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Merge JSON reports; passes when every input passes.
    ReportMerge {
        #[arg(short = 'i', long = "input", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum Suite {
    /// Pointwise operator comparisons.
    Dominance {
        #[command(flatten)]
        run: RunArgs,
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(long, value_parser = ["sharp-vs-max", "hardy-vs-max", "hardyalpha-chain", "calhardy-vs-riesz", "hedberg"])]
        name: String,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        /// Replaces the default constant of the first comparison.
        #[arg(long)]
        constant: Option<f64>,
    },
    /// Norm of dilates against the predicted power of t.
    Scaling {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value = "0.5,2")]
        t: String,
    },
    /// Riesz potential norm ratio under dilation, Spanne exponents.
    Spanne {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value = "0.5,1,2")]
        t: String,
    },
    /// Riesz potential norm ratio under dilation, Adams exponents.
    Adams {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value = "0.5,1,2")]
        t: String,
    },
    /// Modular bound for maximal and Hardy-type operators at two resolutions.
    ModularLemmaA {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        family: FamilyArgs,
        /// Operator JSON; defaults to the maximal function.
        #[arg(long)]
        op: Option<String>,
    },
    /// Modular bound for the Riesz potential at two resolutions.
    ModularLemmaB {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        family: FamilyArgs,
        /// Operator JSON; defaults to the Riesz potential of order --alpha.
        #[arg(long)]
        op: Option<String>,
    },
    /// Classify V0, V-infinity and V*.
    Vanishing {
        #[command(flatten)]
        run: RunArgs,
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long, default_value_t = 1.0)]
        ball_radius: f64,
        /// Expected verdicts, e.g. "vanishing" or "v0=vanishing,vstar=non-vanishing".
        #[arg(long)]
        expect: Option<String>,
    },
    /// Whether an operator preserves the vanishing properties of its input.
    Preservation {
        #[command(flatten)]
        run: RunArgs,
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(long)]
        op: String,
        /// Exponent regime for potential-type operators when q and mu are not given.
        #[arg(long, value_enum)]
        regime: Option<RegimeArg>,
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long, default_value_t = 1.0)]
        ball_radius: f64,
    },
}

/// Runs the command line `argv` (program name first) and returns the exit code: 0 on
/// success, 1 when a check fails, 2 on usage, configuration or input errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = match worker_count(cli.threads) {
        Ok(n) => n,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return 2;
        }
    };
    match pool.install(|| execute(cli.command)) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Flag first, then the environment; 0 lets the pool pick.
fn worker_count(flag: Option<usize>) -> Result<usize> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(THREADS_ENV) {
        Ok(s) if !s.trim().is_empty() => s
            .trim()
            .parse()
            .map_err(|_| MorreyError::Config(format!("{THREADS_ENV} must be a non-negative integer, got '{s}'"))),
        _ => Ok(0),
    }
}

fn resolve(args: &RunArgs) -> Result<RunConfig> {
    let mut c = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(g) = &args.grid {
        c.grid = parse_grid(g)?;
    }
    if let Some(l) = &args.ladder {
        c.ladder = Some(parse_ladder(l)?);
    }
    let p = &mut c.params;
    p.p = args.p.unwrap_or(p.p);
    p.lambda = args.lambda.unwrap_or(p.lambda);
    p.q = args.q.or(p.q);
    p.mu = args.mu.or(p.mu);
    p.alpha = args.alpha.or(p.alpha);
    p.beta = args.beta.or(p.beta);
    c.seed = args.seed.unwrap_or(c.seed);
    c.engine = args.engine.unwrap_or(c.engine);
    c.thresholds.vanishing = args.vanishing_threshold.unwrap_or(c.thresholds.vanishing);
    c.thresholds.non_vanishing = args.non_vanishing_threshold.unwrap_or(c.thresholds.non_vanishing);
    if args.output.is_some() {
        c.output.path = args.output.clone();
    }
    if args.csv.is_some() {
        c.output.csv = args.csv.clone();
    }
    if let Some(path) = &args.save_config {
        std::fs::write(path, c.to_toml()?)?;
    }
    Ok(c)
}

/// Reads `-i` and records its grid in the configuration.
fn load_input(cfg: &mut RunConfig, path: &Path) -> Result<GridFunction> {
    let f = grid::read_grid(path)?;
    let s = f.spec();
    cfg.grid = GridConfig { dim: s.dim(), half_width: s.half_width(), cells: s.cells_per_axis() };
    Ok(f)
}

fn require_output(cfg: &RunConfig, what: &str) -> Result<PathBuf> {
    cfg.output.path.clone().ok_or_else(|| MorreyError::Config(format!("{what} needs -o <path>")))
}

fn parse_op(text: &str) -> Result<OperatorSpec> {
    serde_json::from_str(text).map_err(|e| MorreyError::Config(format!("operator json: {e}")))
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    suite: &'a str,
    config: &'a RunConfig,
    inputs: Value,
    paper_ref: &'a str,
    tolerances: Value,
    pass: bool,
    report: T,
}

fn emit<T: Serialize>(
    cfg: &RunConfig,
    suite: &str,
    inputs: Value,
    paper_ref: &str,
    tolerances: Value,
    pass: bool,
    report: T,
) -> Result<bool> {
    let env = Envelope { suite, config: cfg, inputs, paper_ref, tolerances, pass, report };
    write_json(cfg.output.path.as_deref(), &env)?;
    Ok(pass)
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Synth { run, family } => {
            let cfg = resolve(&run)?;
            let out = require_output(&cfg, "synth")?;
            let fd = family.descriptor()?;
            let f = grid::synthesize(cfg.grid_spec()?, &fd)?;
            grid::write_grid(&f, &out)?;
            if let Some(csv) = &cfg.output.csv {
                grid::write_csv(&f, csv)?;
            }
            Ok(true)
        }
        Command::Apply { run, input, op, oracle, refinement } => {
            let mut cfg = resolve(&run)?;
            cfg.oracle = oracle;
            let out = require_output(&cfg, "apply")?;
            let f = load_input(&mut cfg, &input)?;
            let op = parse_op(&op)?;
            let ladder = cfg.ladder_for(f.spec())?;
            let tf = if cfg.oracle {
                oracle_eval(&f, &OracleRequest::operator(op).with_ladder(ladder).refined(refinement, None))?
            } else {
                if refinement != 1 {
                    return Err(MorreyError::Config("--refinement requires --oracle".into()));
                }
                operators::apply(&f, &op, &ladder, &cfg.engine())?
            };
            grid::write_grid(&tf, &out)?;
            if let Some(csv) = &cfg.output.csv {
                grid::write_csv(&tf, csv)?;
            }
            Ok(true)
        }
        Command::Profile { run, input } => {
            let mut cfg = resolve(&run)?;
            let out = require_output(&cfg, "profile")?;
            let f = load_input(&mut cfg, &input)?;
            let mp = cfg.morrey_params()?;
            let profile = modular::modular_profile_with(&f, &mp, &cfg.ladder_for(f.spec())?, &cfg.engine())?;
            profile.write_csv(out)?;
            Ok(true)
        }
        Command::Vstar { run, input, n_max, ball_radius } => {
            let mut cfg = resolve(&run)?;
            let out = require_output(&cfg, "vstar")?;
            let f = load_input(&mut cfg, &input)?;
            let n_max = n_max.unwrap_or_else(|| checks::default_n_max(f.spec().half_width(), ball_radius));
            let seq = modular::vstar_sequence(&f, cfg.params.p, n_max, ball_radius)?;
            seq.write_csv(out)?;
            Ok(true)
        }
        Command::Norm { run, input } => {
            let mut cfg = resolve(&run)?;
            let f = load_input(&mut cfg, &input)?;
            let mp = cfg.morrey_params()?;
            let norm = modular::morrey_norm_with(&f, &mp, &cfg.ladder_for(f.spec())?, &cfg.engine())?;
            emit(
                &cfg,
                "norm",
                json!({ "input": input }),
                "Morrey norm: sup over balls of (r^{-lambda} int_B |f|^p)^{1/p}",
                json!({}),
                true,
                json!({ "norm": norm }),
            )
        }
        Command::Check { suite } => check(suite),
        Command::ReportMerge { inputs, output } => {
            let mut reports = Vec::new();
            let mut pass = true;
            for path in &inputs {
                let text = std::fs::read_to_string(path)?;
                let v: Value =
                    serde_json::from_str(&text).map_err(|e| MorreyError::Config(format!("{}: {e}", path.display())))?;
                let ok = v
                    .get("pass")
                    .and_then(Value::as_bool)
                    .ok_or_else(|| MorreyError::Config(format!("{}: report has no boolean 'pass'", path.display())))?;
                pass &= ok;
                reports.push(v);
            }
            let merged = json!({ "suite": "report-merge", "inputs": inputs, "pass": pass, "reports": reports });
            write_json(output.as_deref(), &merged)?;
            Ok(pass)
        }
    }
}

fn check(suite: Suite) -> Result<bool> {
    match suite {
        Suite::Dominance { run, input, name, delta, constant } => {
            let mut cfg = resolve(&run)?;
            let f = load_input(&mut cfg, &input)?;
            let ladder = cfg.ladder_for(f.spec())?;
            let engine = cfg.engine();
            let inputs = json!({ "input": input, "name": name, "delta": delta, "constant": constant });
            if name == "hedberg" {
                let alpha = cfg.params.alpha.unwrap_or(0.1);
                let mp = match cfg.morrey_params()? {
                    mp if mp.q.is_some() => mp,
                    _ => ExponentRegime::Adams.params(f.spec().dim(), alpha, cfg.params.p, cfg.params.lambda)?,
                };
                let r = checks::hedberg_report(&f, alpha, &mp, &ladder, &engine, "input")?;
                let pass = r.c_emp.is_some_and(f64::is_finite);
                return emit(
                    &cfg,
                    "dominance/hedberg",
                    inputs,
                    "Hedberg: |I^alpha f| <= C (M f)^{p/q} ||f||_{p,lambda}^{1-p/q}",
                    json!({}),
                    pass,
                    r,
                );
            }
            let dn = DominanceName::parse(&name).ok_or_else(|| MorreyError::Config(format!("unknown name {name}")))?;
            let opts = DominanceOptions { alpha: cfg.params.alpha.unwrap_or(0.5), delta, constant };
            let reports = checks::dominance_suite(dn, &f, &ladder, &engine, &opts)?;
            let pass = checks::suite_passes(&reports);
            emit(
                &cfg,
                &format!("dominance/{}", dn.as_str()),
                inputs,
                dn.statement(),
                json!({ "rounding": checks::ROUNDING_TOL, "delta": delta }),
                pass,
                reports,
            )
        }
        Suite::Scaling { run, family, t } => {
            let cfg = resolve(&run)?;
            let spec = cfg.grid_spec()?;
            let fd = family.descriptor()?;
            let mp = cfg.morrey_params()?;
            let ladder = cfg.ladder_for(&spec)?;
            let reports = parse_reals(&t)?
                .into_iter()
                .map(|t| checks::check_scaling(&spec, &fd, t, &mp, &ladder, &cfg.engine()))
                .collect::<Result<Vec<_>>>()?;
            let pass = reports.iter().all(|r| r.pass);
            emit(
                &cfg,
                "scaling",
                json!({ "family": fd, "t": t }),
                "||f(t .)||_{p,lambda} = t^{(lambda - n)/p} ||f||_{p,lambda}",
                json!({ "relative_deviation": checks::SCALING_TOL }),
                pass,
                reports,
            )
        }
        Suite::Spanne { run, family, t } => exponent_ratio(run, family, t, ExponentRegime::Spanne),
        Suite::Adams { run, family, t } => exponent_ratio(run, family, t, ExponentRegime::Adams),
        Suite::ModularLemmaA { run, family, op } => {
            let cfg = resolve(&run)?;
            let op = match op {
                Some(text) => parse_op(&text)?,
                None => OperatorSpec::Maximal,
            };
            if op.order() != 0.0 {
                return Err(MorreyError::Config("modular-lemma-a takes an operator of order 0".into()));
            }
            let mp = MorreyParams::new(cfg.params.p, cfg.params.lambda);
            modular_lemma(
                cfg,
                family,
                op,
                mp,
                "r^{-lambda} int_B |Tf|^p bounded by the ball modular of f integrated over dilates",
                "modular-lemma-a",
            )
        }
        Suite::ModularLemmaB { run, family, op } => {
            let cfg = resolve(&run)?;
            let alpha = cfg.params.alpha.unwrap_or(0.2);
            let op = match op {
                Some(text) => parse_op(&text)?,
                None => OperatorSpec::riesz(alpha),
            };
            let alpha = op.order();
            if alpha <= 0.0 {
                return Err(MorreyError::Config("modular-lemma-b takes a potential-type operator".into()));
            }
            let mp = match cfg.morrey_params()? {
                mp if mp.q.is_some() => {
                    ExponentRegime::Spanne.check(cfg.grid.dim, alpha, &mp)?;
                    mp
                }
                _ => ExponentRegime::Spanne.params(cfg.grid.dim, alpha, cfg.params.p, cfg.params.lambda)?,
            };
            modular_lemma(
                cfg,
                family,
                op,
                mp,
                "r^{-mu} int_B |I^alpha f|^q bounded by the (p, lambda) ball modular of f integrated over dilates",
                "modular-lemma-b",
            )
        }
        Suite::Vanishing { run, input, n_max, ball_radius, expect } => {
            let mut cfg = resolve(&run)?;
            let f = load_input(&mut cfg, &input)?;
            let mp = cfg.morrey_params()?;
            let opts = VanishingOptions { n_max, ball_radius, thresholds: cfg.thresholds() };
            let r = checks::classify_vanishing(&f, &mp, &cfg.ladder_for(f.spec())?, &opts, &cfg.engine())?;
            if let Some(csv) = &cfg.output.csv {
                r.profile.write_csv(csv)?;
            }
            let expected = match &expect {
                Some(e) => parse_expect(e)?,
                None => Vec::new(),
            };
            let pass = expected.iter().all(|(p, v)| r.diagnosis.get(*p).verdict == *v);
            emit(
                &cfg,
                "vanishing",
                json!({ "input": input, "n_max": n_max, "ball_radius": ball_radius, "expect": expect }),
                "V0: modular -> 0 as r -> 0; V-infinity: as r -> infinity; V*: far-field ball masses -> 0",
                json!({ "vanishing": opts.thresholds.vanishing, "non_vanishing": opts.thresholds.non_vanishing }),
                pass,
                r,
            )
        }
        Suite::Preservation { run, input, op, regime, n_max, ball_radius } => {
            let mut cfg = resolve(&run)?;
            let f = load_input(&mut cfg, &input)?;
            let op = parse_op(&op)?;
            let given = cfg.morrey_params()?;
            let inp = MorreyParams::new(given.p, given.lambda);
            let n = f.spec().dim();
            let out = match (given.output(), regime) {
                (Some(out), _) => out,
                (None, Some(r)) => {
                    ExponentRegime::from(r).params(n, op.order(), inp.p, inp.lambda)?.output().expect("set")
                }
                (None, None) if op.order() > 0.0 => {
                    let spanne = ExponentRegime::Spanne.params(n, op.order(), inp.p, inp.lambda);
                    spanne
                        .or_else(|_| ExponentRegime::Adams.params(n, op.order(), inp.p, inp.lambda))?
                        .output()
                        .expect("set")
                }
                (None, None) => inp,
            };
            let opts = VanishingOptions { n_max, ball_radius, thresholds: cfg.thresholds() };
            let r = checks::preservation_report(&f, &op, &inp, &out, &cfg.ladder_for(f.spec())?, &opts, &cfg.engine())?;
            let pass = r.pass;
            emit(
                &cfg,
                "preservation",
                json!({ "input": input, "op": op, "n_max": n_max, "ball_radius": ball_radius }),
                "bounded operators on Morrey spaces map vanishing subspaces V0, V-infinity, V* into themselves",
                json!({ "vanishing": opts.thresholds.vanishing, "non_vanishing": opts.thresholds.non_vanishing }),
                pass,
                r,
            )
        }
    }
}

fn exponent_ratio(run: RunArgs, family: FamilyArgs, t: String, regime: ExponentRegime) -> Result<bool> {
    let cfg = resolve(&run)?;
    let spec = cfg.grid_spec()?;
    let fd = family.descriptor()?;
    let alpha = cfg.params.alpha.unwrap_or(match regime {
        ExponentRegime::Spanne => 0.2,
        ExponentRegime::Adams => 0.1,
    });
    let mp = match cfg.morrey_params()? {
        mp if mp.q.is_some() => mp,
        _ => regime.params(spec.dim(), alpha, cfg.params.p, cfg.params.lambda)?,
    };
    let r = checks::exponent_ratio_report(&spec, &fd, &parse_reals(&t)?, alpha, regime, &mp, &cfg.engine())?;
    let (suite, statement) = match regime {
        ExponentRegime::Spanne => {
            ("spanne", "I^alpha bounded from L^{p,lambda} to L^{q,mu}, 1/q = 1/p - alpha/n, lambda/p = mu/q")
        }
        ExponentRegime::Adams => {
            ("adams", "I^alpha bounded from L^{p,lambda} to L^{q,lambda}, 1/q = 1/p - alpha/(n - lambda)")
        }
    };
    let pass = r.pass;
    emit(
        &cfg,
        suite,
        json!({ "family": fd, "t": t, "alpha": alpha }),
        statement,
        json!({ "ratio_spread": checks::RATIO_SPREAD_TOL }),
        pass,
        r,
    )
}

fn modular_lemma(
    cfg: RunConfig,
    family: FamilyArgs,
    op: OperatorSpec,
    mp: MorreyParams,
    statement: &str,
    suite: &str,
) -> Result<bool> {
    let fd = family.descriptor()?;
    let fine = cfg.grid_spec()?;
    let coarse = GridSpec::new(fine.dim(), fine.half_width(), fine.cells_per_axis() / 2)?;
    let engine = cfg.engine();
    let mut reports = Vec::new();
    for spec in [coarse, fine] {
        let ladder = cfg.ladder_for(&spec)?;
        let f = grid::synthesize(spec, &fd)?;
        let tf = operators::apply(&f, &op, &ladder, &engine)?;
        reports.push(checks::modular_bound_report(&f, &tf, &mp, &ladder, &op.label(), &engine)?);
    }
    let fine_report = reports.pop().expect("two runs");
    let coarse_report = reports.pop().expect("two runs");
    if let Some(csv) = &cfg.output.csv {
        fine_report.write_ratio_csv(csv)?;
    }
    let s = checks::bound_stability(coarse_report, fine_report);
    let pass = s.pass;
    emit(
        &cfg,
        suite,
        json!({ "family": fd, "op": op }),
        statement,
        json!({ "stability_factor": checks::STABILITY_FACTOR }),
        pass,
        s,
    )
}

/// `"vanishing"` for all three properties, or `"v0=...,vinf=...,vstar=..."`.
fn parse_expect(s: &str) -> Result<Vec<(Property, Verdict)>> {
    let verdict = |v: &str| -> Result<Verdict> {
        match v.trim() {
            "vanishing" => Ok(Verdict::Vanishing),
            "non-vanishing" => Ok(Verdict::NonVanishing),
            "inconclusive" => Ok(Verdict::Inconclusive),
            other => Err(MorreyError::Config(format!("unknown verdict '{other}'"))),
        }
    };
    if !s.contains('=') {
        let v = verdict(s)?;
        return Ok(vec![(Property::V0, v), (Property::VInf, v), (Property::VStar, v)]);
    }
    s.split(',')
        .map(|item| {
            let (k, v) =
                item.split_once('=').ok_or_else(|| MorreyError::Config(format!("bad expectation '{item}'")))?;
            let p = match k.trim() {
                "v0" => Property::V0,
                "vinf" => Property::VInf,
                "vstar" => Property::VStar,
                other => return Err(MorreyError::Config(format!("unknown property '{other}'"))),
            };
            Ok((p, verdict(v)?))
        })
        .collect()
}
