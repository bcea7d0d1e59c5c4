//! Command-line front end. Every subcommand parses its flags, calls the
//! library, and writes text, CSV, grid or report files.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure (including a
//! failed verification check), 3 I/O. Errors go to stderr as
//! `ERROR[<code>]: <message>`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::grid::io::{load_grid, save_grid};
use crate::grid::{invert_spectral, normal_spectral, phantom, DcRule, Geometry, GridError, GridFunction, PhantomKind};
use crate::multiplier::{
    cone_coords, estimate_log_constant_22, log_constant_22, p_cone_limit, p_eval, p_from_norms, p_minkowski,
    MultiplierError, MultiplierMethod, Signature, SplitVector,
};
use crate::transform::io::{load_rays, save_rays};
use crate::transform::{adjoint_Lt, build_sigma_grid, forward_L, normal_quadrature, AngularResolution, TransformError};
use crate::verify::{self, Config, Scale, VerifyError};

#[derive(Debug, Parser)]
#[command(name = "lightray", version, about = "Light ray transform over null lines of a split-signature metric")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Print machine-readable JSON with full precision.
    #[arg(long, global = true)]
    pub json: bool,
    /// JSON object of flag values; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate and tabulate the multiplier p(ξ).
    #[command(subcommand)]
    P(PCommand),
    /// Write a phantom grid.
    Phantom(PhantomArgs),
    /// Forward transform or adjoint.
    #[command(subcommand)]
    Transform(TransformCommand),
    /// Apply the normal operator L'L.
    Normal(NormalArgs),
    /// Apply p(D)^{-1}.
    Invert(InvertArgs),
    /// Run verification checks and write a JSON-lines report.
    Verify(VerifyArgs),
    /// Tabulate the Minkowski multiplier.
    Minkowski(MinkowskiArgs),
}

#[derive(Debug, Subcommand)]
pub enum PCommand {
    /// p at one frequency.
    Eval {
        #[arg(long)]
        sig: Signature,
        /// Comma-separated ξ = (ξ', ξ'').
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        #[arg(long, default_value = "auto")]
        method: MultiplierMethod,
    },
    /// CSV of p against κ at |ξ''| = 1.
    Table {
        #[arg(long)]
        sig: Signature,
        /// lo:hi:steps
        #[arg(long)]
        kappa_grid: String,
        /// Space the κ values logarithmically.
        #[arg(long)]
        log: bool,
        #[arg(long, default_value = "auto")]
        method: MultiplierMethod,
        #[arg(long)]
        out: PathBuf,
    },
    /// Behavior of p next to the light cone.
    Cone {
        #[arg(long)]
        sig: Signature,
    },
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    #[arg(long, default_value = "gaussian")]
    pub kind: PhantomKind,
    #[arg(long)]
    pub sig: Signature,
    /// Points per axis, one value or one per axis.
    #[arg(long)]
    pub shape: String,
    /// Grid step, one value or one per axis.
    #[arg(long)]
    pub spacing: String,
    #[arg(long)]
    pub width: f64,
    /// Center, comma-separated (default: origin).
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum TransformCommand {
    /// Lf on a grid of null directions and hyperplane nodes.
    Forward {
        #[arg(long = "in")]
        input: PathBuf,
        /// Angular resolution, one value or `prime,dprime`.
        #[arg(long)]
        angles: String,
        /// Hyperplane window as `halfwidth,step`.
        #[arg(long)]
        plane: String,
        /// Ray quadrature step (default: half the smallest grid step).
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// L'φ on a centered grid.
    Adjoint {
        #[arg(long = "in")]
        input: PathBuf,
        /// `shape:spacing`, each one value or one per axis.
        #[arg(long)]
        geometry: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Route {
    Quadrature,
    Spectral,
}

#[derive(Debug, Args)]
pub struct NormalArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "spectral")]
    pub route: Route,
    /// Angular resolution for the quadrature route.
    #[arg(long, default_value = "32")]
    pub angles: String,
    /// Ray step for the quadrature route (default: half the smallest grid step).
    #[arg(long)]
    pub step: Option<f64>,
    /// Zero-padding factor for the spectral route.
    #[arg(long, default_value_t = 4)]
    pub pad: usize,
    #[arg(long, default_value = "auto")]
    pub method: MultiplierMethod,
    #[arg(long, default_value = "nearest")]
    pub dc: DcRule,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "auto")]
    pub method: MultiplierMethod,
    #[arg(long, default_value = "zero")]
    pub dc: DcRule,
    /// Zero-padding factor.
    #[arg(long, default_value_t = 1)]
    pub pad: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated check ids (default: all).
    #[arg(long)]
    pub only: Option<String>,
    #[arg(long, default_value_t = verify::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "full")]
    pub scale: Scale,
    /// JSON-lines report (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV summary.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MinkowskiArgs {
    #[arg(long)]
    pub d: usize,
    /// `tau_lo:tau_hi:n,xi_lo:xi_hi:m`; ξ points along the first axis.
    #[arg(long, allow_hyphen_values = true)]
    pub tau_xi_grid: String,
    #[arg(long)]
    pub out: PathBuf,
}

/// An error with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: msg.into(),
        }
    }

    fn io(e: std::io::Error, path: &Path) -> Self {
        Self {
            code: 3,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<MultiplierError> for CliError {
    fn from(e: MultiplierError) -> Self {
        let code = match e {
            MultiplierError::ConeDivergence { .. }
            | MultiplierError::NoConvergence(_)
            | MultiplierError::SpecFun(_)
            | MultiplierError::MinkowskiSingular { .. } => 2,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        match e {
            GridError::Multiplier(m) => m.into(),
            GridError::Io(_) | GridError::Format(_) => Self {
                code: 3,
                message: e.to_string(),
            },
            GridError::Geometry(_) => Self::usage(e.to_string()),
        }
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Grid(g) => g.into(),
            _ => Self::usage(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::UnknownCheck(_) => Self::usage(e.to_string()),
            VerifyError::Multiplier(m) => m.into(),
            VerifyError::Grid(g) => g.into(),
            VerifyError::Transform(t) => t.into(),
            VerifyError::Io(_) => Self {
                code: 3,
                message: e.to_string(),
            },
            _ => Self {
                code: 2,
                message: e.to_string(),
            },
        }
    }
}

/// `%.12g`-style formatting.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if e < -5 || e >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, x);
        let (m, ex) = s.split_once('e').expect("exponent present");
        let m = trim_zeros(m);
        return format!("{m}e{ex}");
    }
    let decimals = (digits as i32 - 1 - e).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::usage(format!("not a number: {t:?}"))))
        .collect()
}

fn broadcast<T: Clone>(v: Vec<T>, n: usize, what: &str) -> Result<Vec<T>, CliError> {
    match v.len() {
        1 => Ok(vec![v[0].clone(); n]),
        k if k == n => Ok(v),
        k => Err(CliError::usage(format!("{what}: expected 1 or {n} values, got {k}"))),
    }
}

fn parse_shape(s: &str, n: usize) -> Result<Vec<usize>, CliError> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::usage(format!("not a count: {t:?}"))))
        .collect::<Result<_, _>>()?;
    broadcast(v, n, "shape")
}

fn parse_range(s: &str) -> Result<(f64, f64, usize), CliError> {
    let p: Vec<&str> = s.split(':').collect();
    if p.len() != 3 {
        return Err(CliError::usage(format!("expected lo:hi:steps, got {s:?}")));
    }
    let lo = p[0].parse::<f64>().map_err(|_| CliError::usage(format!("bad bound {:?}", p[0])))?;
    let hi = p[1].parse::<f64>().map_err(|_| CliError::usage(format!("bad bound {:?}", p[1])))?;
    let n = p[2].parse::<usize>().map_err(|_| CliError::usage(format!("bad count {:?}", p[2])))?;
    if n == 0 || !(lo.is_finite() && hi.is_finite()) {
        return Err(CliError::usage(format!("empty or non-finite range {s:?}")));
    }
    Ok((lo, hi, n))
}

fn range_points(lo: f64, hi: f64, n: usize, log: bool) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
            if log {
                (lo.ln() + t * (hi.ln() - lo.ln())).exp()
            } else {
                lo + t * (hi - lo)
            }
        })
        .collect()
}

fn parse_resolution(s: &str) -> Result<AngularResolution, CliError> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::usage(format!("not a count: {t:?}"))))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [a] => Ok(AngularResolution::uniform(*a)),
        [a, b] => Ok(AngularResolution { prime: *a, dprime: *b }),
        _ => Err(CliError::usage("angles: expected one or two counts")),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(e, path))
}

fn default_step(f: &GridFunction) -> f64 {
    0.5 * f.geom.spacing.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Appends flags from the JSON object in `--config` that are not already
/// on the command line.
fn merge_config(mut args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.to_string_lossy().starts_with("--config=")) else {
        return Ok(args);
    };
    let path = match args[pos].to_string_lossy().strip_prefix("--config=") {
        Some(p) => PathBuf::from(p),
        None => PathBuf::from(
            args.get(pos + 1)
                .ok_or_else(|| CliError::usage("--config needs a path"))?,
        ),
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(e, &path))?;
    let obj: serde_json::Map<String, serde_json::Value> =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
    let present = |flag: &str| {
        args.iter().any(|a| {
            let a = a.to_string_lossy();
            a == flag || a.starts_with(&format!("{flag}="))
        })
    };
    let mut extra = Vec::new();
    for (k, v) in obj {
        let flag = format!("--{}", k.replace('_', "-"));
        if present(&flag) {
            continue;
        }
        match v {
            serde_json::Value::Bool(true) => extra.push(OsString::from(flag)),
            serde_json::Value::Bool(false) | serde_json::Value::Null => {}
            serde_json::Value::String(s) => {
                extra.push(OsString::from(flag));
                extra.push(OsString::from(s));
            }
            serde_json::Value::Array(items) => {
                let joined = items.iter().map(|i| i.to_string().trim_matches('"').to_string()).collect::<Vec<_>>();
                extra.push(OsString::from(flag));
                extra.push(OsString::from(joined.join(",")));
            }
            other => {
                extra.push(OsString::from(flag));
                extra.push(OsString::from(other.to_string()));
            }
        }
    }
    args.extend(extra);
    Ok(args)
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let result = merge_config(args).and_then(|args| match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(cli),
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                Ok(())
            } else {
                Err(CliError::usage(e.to_string().trim_end().to_string()))
            }
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ERROR[{}]: {}", e.code, e.message);
            e.code
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(CliError::usage("--threads must be positive"));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    let json = cli.json;
    match cli.command {
        Command::P(p) => run_p(p, json),
        Command::Phantom(a) => run_phantom(a),
        Command::Transform(t) => run_transform(t),
        Command::Normal(a) => run_normal(a),
        Command::Invert(a) => run_invert(a),
        Command::Verify(a) => run_verify(a, json),
        Command::Minkowski(a) => run_minkowski(a),
    }
}

fn run_p(cmd: PCommand, json: bool) -> Result<(), CliError> {
    match cmd {
        PCommand::Eval { sig, xi, method } => {
            let v = parse_list(&xi)?;
            let split = SplitVector::from_flat(sig, &v).map_err(|e| CliError::usage(e.to_string()))?;
            let p = p_eval(sig, &split, method)?;
            if json {
                println!("{}", json!({ "sig": [sig.n_prime(), sig.n_dprime()], "xi": v, "p": p }));
            } else {
                println!("{}", fmt_sig(p, 12));
            }
            Ok(())
        }
        PCommand::Table {
            sig,
            kappa_grid,
            log,
            method,
            out,
        } => {
            let (lo, hi, n) = parse_range(&kappa_grid)?;
            if lo < 0.0 || (log && lo <= 0.0) {
                return Err(CliError::usage("kappa values must be positive"));
            }
            let mut w = create(&out)?;
            let io = |e| CliError::io(e, &out);
            writeln!(w, "kappa,z,p,|xi|p").map_err(io)?;
            for k in range_points(lo, hi, n, log) {
                let xi = SplitVector::new(vec![k], vec![1.0]);
                let c = cone_coords(&xi)?;
                let (p, scaled) = match p_from_norms(sig, k, 1.0, method) {
                    Ok(p) => (p, p * (1.0 + k * k).sqrt()),
                    Err(MultiplierError::ConeDivergence { .. }) => (f64::INFINITY, f64::INFINITY),
                    Err(e) => return Err(e.into()),
                };
                writeln!(w, "{k:e},{:e},{p:e},{scaled:e}", c.z).map_err(io)?;
            }
            w.flush().map_err(|e| CliError::io(e, &out))
        }
        PCommand::Cone { sig } => {
            let eps = [1e-2, 1e-4, 1e-6, 1e-8];
            if sig.dim() == 4 {
                let e = estimate_log_constant_22(1e-10)?;
                if json {
                    println!("{}", json!({ "sig": [2, 2], "estimate": e, "exact": log_constant_22() }));
                } else {
                    println!("log blow-up |xi''| p ~ A log(1/|kappa - 1|), A = 8 pi = {}", fmt_sig(log_constant_22(), 12));
                    println!("estimate at |kappa - 1| = 1e-10: {} (below {}, above {})", fmt_sig(e.value, 12), fmt_sig(e.below, 12), fmt_sig(e.above, 12));
                    for d in eps {
                        let p = p_from_norms(sig, 1.0 - d, 1.0, MultiplierMethod::Auto)?;
                        println!("kappa = 1 - {d:e}: p = {}", fmt_sig(p, 12));
                    }
                }
            } else {
                let lim = p_cone_limit(sig, 1.0)?;
                let rows: Vec<(f64, f64, f64)> = eps
                    .iter()
                    .map(|&d| {
                        Ok((
                            d,
                            p_from_norms(sig, 1.0 - d, 1.0, MultiplierMethod::Auto)?,
                            p_from_norms(sig, 1.0 + d, 1.0, MultiplierMethod::Auto)?,
                        ))
                    })
                    .collect::<Result<_, MultiplierError>>()?;
                if json {
                    println!("{}", json!({ "sig": [sig.n_prime(), sig.n_dprime()], "cone_limit": lim, "rows": rows }));
                } else {
                    println!("cone value C B(1/2,(n-4)/2)/|xi''| = {}", fmt_sig(lim, 12));
                    for (d, a, b) in rows {
                        println!("kappa = 1 -+ {d:e}: {} {}", fmt_sig(a, 12), fmt_sig(b, 12));
                    }
                }
            }
            Ok(())
        }
    }
}

fn run_phantom(a: PhantomArgs) -> Result<(), CliError> {
    let n = a.sig.dim();
    let shape = parse_shape(&a.shape, n)?;
    let spacing = broadcast(parse_list(&a.spacing)?, n, "spacing")?;
    let center = match &a.center {
        Some(c) => broadcast(parse_list(c)?, n, "center")?,
        None => vec![0.0; n],
    };
    let geom = Geometry::centered(shape, spacing)?;
    let f = phantom(a.kind, a.sig, &geom, &center, a.width)?;
    save_grid(&f, &a.out)?;
    Ok(())
}

fn run_transform(cmd: TransformCommand) -> Result<(), CliError> {
    match cmd {
        TransformCommand::Forward {
            input,
            angles,
            plane,
            step,
            out,
        } => {
            let res = parse_resolution(&angles)?;
            let pl = parse_list(&plane)?;
            let [half, pstep] = pl[..] else {
                return Err(CliError::usage("plane: expected halfwidth,step"));
            };
            let f = load_grid(&input)?;
            let sigma = build_sigma_grid(f.sig, res, half, pstep)?;
            let data = forward_L(&f, &sigma, step.unwrap_or_else(|| default_step(&f)))?;
            save_rays(&data, &out)?;
            Ok(())
        }
        TransformCommand::Adjoint { input, geometry, out } => {
            let data = load_rays(&input)?;
            let n = data.sigma.sig.dim();
            let (s, h) = geometry
                .split_once(':')
                .ok_or_else(|| CliError::usage("geometry: expected shape:spacing"))?;
            let geom = Geometry::centered(parse_shape(s, n)?, broadcast(parse_list(h)?, n, "spacing")?)?;
            let res = adjoint_Lt(&data, &geom)?;
            if res.out_of_window > 0 {
                eprintln!("note: {} evaluations fell outside the hyperplane window", res.out_of_window);
            }
            save_grid(&res.grid, &out)?;
            Ok(())
        }
    }
}

fn run_normal(a: NormalArgs) -> Result<(), CliError> {
    let f = load_grid(&a.input)?;
    let out = match a.route {
        Route::Quadrature => {
            let res = parse_resolution(&a.angles)?;
            let sigma = build_sigma_grid(f.sig, res, 1.0, 1.0)?;
            normal_quadrature(&f, &sigma, a.step.unwrap_or_else(|| default_step(&f)))?
        }
        Route::Spectral => normal_spectral(&f, a.pad, a.method, a.dc)?,
    };
    save_grid(&out, &a.out)?;
    Ok(())
}

fn run_invert(a: InvertArgs) -> Result<(), CliError> {
    let f = load_grid(&a.input)?;
    let rec = invert_spectral(&f, a.pad, a.method, a.dc)?;
    save_grid(&rec, &a.out)?;
    Ok(())
}

fn run_verify(a: VerifyArgs, json: bool) -> Result<(), CliError> {
    let ids: Vec<String> = match &a.only {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => verify::CHECK_IDS.iter().map(|s| s.to_string()).collect(),
    };
    for id in &ids {
        if !verify::CHECK_IDS.contains(&id.as_str()) {
            return Err(CliError::usage(format!("unknown check id {id:?}")));
        }
    }
    let cfg = Config {
        seed: a.seed,
        scale: a.scale,
    };
    let mut reports = Vec::new();
    for id in &ids {
        let r = verify::run_check(id, &cfg)?;
        if a.out.is_some() && !json {
            println!(
                "{} {} metric={} tolerance={}",
                if r.passed { "PASS" } else { "FAIL" },
                r.id,
                fmt_sig(r.metric, 12),
                fmt_sig(r.tolerance, 12)
            );
        }
        reports.push(r);
    }
    match &a.out {
        Some(path) => {
            let mut w = create(path)?;
            verify::write_jsonl(&reports, &mut w)?;
            w.flush().map_err(|e| CliError::io(e, path))?;
        }
        None => verify::write_jsonl(&reports, std::io::stdout().lock())?,
    }
    if let Some(path) = &a.csv {
        let mut w = create(path)?;
        verify::write_csv(&reports, &mut w)?;
        w.flush().map_err(|e| CliError::io(e, path))?;
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.id.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError {
            code: 2,
            message: format!("checks failed: {}", failed.join(", ")),
        })
    }
}

fn run_minkowski(a: MinkowskiArgs) -> Result<(), CliError> {
    let (t, x) = a
        .tau_xi_grid
        .split_once(',')
        .ok_or_else(|| CliError::usage("tau-xi-grid: expected tau_lo:tau_hi:n,xi_lo:xi_hi:m"))?;
    let (t0, t1, nt) = parse_range(t)?;
    let (x0, x1, nx) = parse_range(x)?;
    if a.d < 2 {
        return Err(CliError::usage("d must be at least 2"));
    }
    let mut w = create(&a.out)?;
    let io = |e| CliError::io(e, &a.out);
    writeln!(w, "tau,xi,p").map_err(io)?;
    for tau in range_points(t0, t1, nt, false) {
        for r in range_points(x0, x1, nx, false) {
            let mut xi = vec![0.0; a.d];
            xi[0] = r;
            let p = match p_minkowski(a.d, tau, &xi) {
                Ok(p) => p,
                // undefined or divergent points are tabulated as inf
                Err(_) => f64::INFINITY,
            };
            writeln!(w, "{tau:e},{r:e},{p:e}").map_err(io)?;
        }
    }
    w.flush().map_err(|e| CliError::io(e, &a.out))
}
