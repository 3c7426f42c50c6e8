//! Argument parsing into a canonical, replayable run plan.
//!
//! Every invocation normalizes to a [`RunPlan`] whose [`RunPlan::to_argv`]
//! output parses back to an equal plan. The canonical argv is embedded in
//! each JSON report so a run can be reproduced from its own output.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Arg, ArgAction, ArgMatches};
use curvkit::scan::{Sampler, ScanConfig};
use curvkit::{KernelSpec, Triple};

use crate::error::CliError;

/// Weight grid for region scans, parsed from `start:end:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        curvkit::scan::grid(self.start, self.end, self.step)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.step)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:end:step, got '{s}'"));
        }
        let num = |which: &str, text: &str| -> Result<f64, String> {
            let v: f64 = text
                .parse()
                .map_err(|_| format!("{which} '{text}' is not a number"))?;
            if !v.is_finite() {
                return Err(format!("{which} must be finite"));
            }
            Ok(v)
        };
        let start = num("start", parts[0])?;
        let end = num("end", parts[1])?;
        let step = num("step", parts[2])?;
        if step <= 0.0 {
            return Err("step must be positive".into());
        }
        if end < start {
            return Err("end must not precede start".into());
        }
        if (end - start) / step > 100_000.0 {
            return Err("grid would exceed 100000 points".into());
        }
        Ok(GridSpec { start, end, step })
    }
}

/// Synthetic measure descriptor: `segment:COUNT`, `cantor4:LEVEL`, or
/// `lip:COUNT:SLOPE:SEED`.
#[derive(Debug, Clone, PartialEq)]
pub enum GenSpec {
    Segment { count: usize },
    Cantor4 { level: u32 },
    Lip { count: usize, slope: f64, seed: u64 },
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenSpec::Segment { count } => write!(f, "segment:{count}"),
            GenSpec::Cantor4 { level } => write!(f, "cantor4:{level}"),
            GenSpec::Lip { count, slope, seed } => write!(f, "lip:{count}:{slope}:{seed}"),
        }
    }
}

impl FromStr for GenSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["segment", count] => {
                let count = count
                    .parse()
                    .map_err(|_| format!("atom count '{count}' is not an integer"))?;
                Ok(GenSpec::Segment { count })
            }
            ["cantor4", level] => {
                let level = level
                    .parse()
                    .map_err(|_| format!("level '{level}' is not an integer"))?;
                Ok(GenSpec::Cantor4 { level })
            }
            ["lip", count, slope, seed] => {
                let count = count
                    .parse()
                    .map_err(|_| format!("atom count '{count}' is not an integer"))?;
                let slope: f64 = slope
                    .parse()
                    .map_err(|_| format!("slope '{slope}' is not a number"))?;
                if !slope.is_finite() {
                    return Err("slope must be finite".into());
                }
                let seed = seed
                    .parse()
                    .map_err(|_| format!("seed '{seed}' is not an integer"))?;
                Ok(GenSpec::Lip { count, slope, seed })
            }
            _ => Err(format!(
                "expected segment:COUNT, cantor4:LEVEL, or lip:COUNT:SLOPE:SEED, got '{s}'"
            )),
        }
    }
}

/// Where a measure comes from: a generator descriptor or a CSV file.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSource {
    Generator(GenSpec),
    File(PathBuf),
}

impl MeasureSource {
    fn parse(s: &str) -> Result<Self, String> {
        if s.starts_with("segment:") || s.starts_with("cantor4:") || s.starts_with("lip:") {
            Ok(MeasureSource::Generator(s.parse()?))
        } else {
            Ok(MeasureSource::File(PathBuf::from(s)))
        }
    }
}

impl fmt::Display for MeasureSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureSource::Generator(g) => g.fmt(f),
            MeasureSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// One fully validated subcommand with all inputs resolved.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Perm {
        kernel: KernelSpec,
        triple: Triple,
    },
    Curvature {
        triple: Triple,
    },
    Region {
        lo: u32,
        hi: u32,
        grid: Option<GridSpec>,
        scan: ScanConfig,
    },
    Scan {
        kernel: KernelSpec,
        scan: ScanConfig,
        /// Comparability and angle constraints `(alpha0, tau)`; switches the
        /// scan from signed extrema to the constrained ratio infimum.
        constrained: Option<(f64, f64)>,
    },
    MeasureGen {
        gen: GenSpec,
    },
    OpNorm {
        measure: MeasureSource,
        eps: f64,
        t: Option<f64>,
    },
    MvCheck {
        measure: MeasureSource,
        kernel: KernelSpec,
        eps: f64,
    },
    Beta {
        measure: MeasureSource,
        eps: f64,
        j_min: i32,
        j_max: i32,
        eta1: f64,
        seed: u64,
    },
    Packing {
        measure: MeasureSource,
        eps: f64,
        j_min: i32,
        j_max: i32,
        eta1: f64,
        seed: u64,
    },
    RatioSearch {
        lo: u32,
        hi: u32,
        scan: ScanConfig,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Perm { .. } => "perm",
            Command::Curvature { .. } => "curvature",
            Command::Region { .. } => "region",
            Command::Scan { .. } => "scan",
            Command::MeasureGen { .. } => "measure-gen",
            Command::OpNorm { .. } => "op-norm",
            Command::MvCheck { .. } => "mv-check",
            Command::Beta { .. } => "beta",
            Command::Packing { .. } => "packing",
            Command::RatioSearch { .. } => "ratio-search",
        }
    }
}

/// A parsed invocation: the subcommand plus execution-wide options.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    pub command: Command,
    pub threads: Option<usize>,
    pub no_timestamp: bool,
    pub out: Option<PathBuf>,
}

/// Result of argument parsing: either a plan to execute or help text.
pub enum ParseOutcome {
    Plan(RunPlan),
    Help(String),
}

fn format_triple(t: &Triple) -> String {
    let [a, b, c] = t.points();
    format!("{},{},{},{},{},{}", a.re, a.im, b.re, b.im, c.re, c.im)
}

fn push_scan(argv: &mut Vec<String>, scan: &ScanConfig) {
    argv.push("--sampler".into());
    argv.push(scan.sampler.to_string());
    argv.push("--samples".into());
    argv.push(scan.samples.to_string());
    argv.push("--seed".into());
    argv.push(scan.seed.to_string());
    argv.push("--refine-steps".into());
    argv.push(scan.refine_steps.to_string());
    if !scan.normalize {
        argv.push("--no-normalize".into());
    }
}

impl RunPlan {
    /// Canonical argv with every flag explicit. Feeding the result back
    /// through [`parse_args`] yields an equal plan.
    pub fn to_argv(&self) -> Vec<String> {
        let mut v: Vec<String> = vec![self.command.name().into()];
        let flag = |argv: &mut Vec<String>, name: &str, value: String| {
            argv.push(name.into());
            argv.push(value);
        };
        match &self.command {
            Command::Perm { kernel, triple } => {
                flag(&mut v, "--kernel", kernel.to_string());
                flag(&mut v, "--triple", format_triple(triple));
            }
            Command::Curvature { triple } => {
                flag(&mut v, "--triple", format_triple(triple));
            }
            Command::Region { lo, hi, grid, scan } => {
                flag(&mut v, "--n", lo.to_string());
                flag(&mut v, "--N", hi.to_string());
                if let Some(g) = grid {
                    flag(&mut v, "--grid", g.to_string());
                }
                push_scan(&mut v, scan);
            }
            Command::Scan {
                kernel,
                scan,
                constrained,
            } => {
                flag(&mut v, "--kernel", kernel.to_string());
                if let Some((alpha0, tau)) = constrained {
                    flag(&mut v, "--alpha0", alpha0.to_string());
                    flag(&mut v, "--tau", tau.to_string());
                }
                push_scan(&mut v, scan);
            }
            Command::MeasureGen { gen } => {
                flag(&mut v, "--gen", gen.to_string());
            }
            Command::OpNorm { measure, eps, t } => {
                flag(&mut v, "--measure", measure.to_string());
                flag(&mut v, "--eps", eps.to_string());
                if let Some(t) = t {
                    flag(&mut v, "--t", t.to_string());
                }
            }
            Command::MvCheck {
                measure,
                kernel,
                eps,
            } => {
                flag(&mut v, "--measure", measure.to_string());
                flag(&mut v, "--kernel", kernel.to_string());
                flag(&mut v, "--eps", eps.to_string());
            }
            Command::Beta {
                measure,
                eps,
                j_min,
                j_max,
                eta1,
                seed,
            }
            | Command::Packing {
                measure,
                eps,
                j_min,
                j_max,
                eta1,
                seed,
            } => {
                flag(&mut v, "--measure", measure.to_string());
                flag(&mut v, "--eps", eps.to_string());
                flag(&mut v, "--jmin", j_min.to_string());
                flag(&mut v, "--jmax", j_max.to_string());
                flag(&mut v, "--eta1", eta1.to_string());
                flag(&mut v, "--seed", seed.to_string());
            }
            Command::RatioSearch { lo, hi, scan } => {
                flag(&mut v, "--n", lo.to_string());
                flag(&mut v, "--N", hi.to_string());
                push_scan(&mut v, scan);
            }
        }
        if let Some(n) = self.threads {
            v.push("--threads".into());
            v.push(n.to_string());
        }
        if self.no_timestamp {
            v.push("--no-timestamp".into());
        }
        if let Some(p) = &self.out {
            v.push("--out".into());
            v.push(p.display().to_string());
        }
        v
    }
}

fn value_arg(name: &'static str) -> Arg {
    Arg::new(name).long(name).action(ArgAction::Set)
}

fn signed_arg(name: &'static str) -> Arg {
    value_arg(name).allow_hyphen_values(true)
}

fn scan_args(cmd: clap::Command) -> clap::Command {
    cmd.arg(value_arg("sampler"))
        .arg(value_arg("samples"))
        .arg(value_arg("seed"))
        .arg(value_arg("refine-steps"))
        .arg(
            Arg::new("no-normalize")
                .long("no-normalize")
                .action(ArgAction::SetTrue),
        )
}

fn tree() -> clap::Command {
    clap::Command::new("curvkit")
        .about("curvature permutation toolkit")
        .subcommand_required(true)
        .disable_help_subcommand(true)
        .arg(
            Arg::new("threads")
                .long("threads")
                .global(true)
                .action(ArgAction::Set)
                .help("cap the rayon worker pool"),
        )
        .arg(
            Arg::new("no-timestamp")
                .long("no-timestamp")
                .global(true)
                .action(ArgAction::SetTrue)
                .help("omit the timestamp field for byte-stable output"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .global(true)
                .action(ArgAction::Set)
                .help("write the report to a file instead of stdout"),
        )
        .subcommand(
            clap::Command::new("perm")
                .about("evaluate a permutation sum on one triangle")
                .arg(value_arg("kernel"))
                .arg(signed_arg("triple")),
        )
        .subcommand(
            clap::Command::new("curvature")
                .about("Menger curvature and circumradius of one triangle")
                .arg(signed_arg("triple")),
        )
        .subcommand(scan_args(
            clap::Command::new("region")
                .about("sign regions of the two-order kernel family in the weight t")
                .arg(value_arg("n"))
                .arg(value_arg("N"))
                .arg(signed_arg("grid")),
        ))
        .subcommand(scan_args(
            clap::Command::new("scan")
                .about("randomized extremum scan of a permutation functional")
                .arg(value_arg("kernel"))
                .arg(value_arg("alpha0"))
                .arg(value_arg("tau")),
        ))
        .subcommand(
            clap::Command::new("measure-gen")
                .about("emit a synthetic atomic measure as CSV")
                .arg(value_arg("gen")),
        )
        .subcommand(
            clap::Command::new("op-norm")
                .about("truncated transform norms, optionally chained through a combination kernel")
                .arg(value_arg("measure"))
                .arg(value_arg("eps"))
                .arg(signed_arg("t")),
        )
        .subcommand(
            clap::Command::new("mv-check")
                .about("symmetrization identity residual on an atomic measure")
                .arg(value_arg("measure"))
                .arg(value_arg("kernel"))
                .arg(value_arg("eps")),
        )
        .subcommand(
            clap::Command::new("beta")
                .about("dyadic lattice with flatness numbers per cube")
                .arg(value_arg("measure"))
                .arg(value_arg("eps"))
                .arg(signed_arg("jmin"))
                .arg(signed_arg("jmax"))
                .arg(value_arg("eta1"))
                .arg(value_arg("seed")),
        )
        .subcommand(
            clap::Command::new("packing")
                .about("mass packing of non-flat cubes below each top generation cube")
                .arg(value_arg("measure"))
                .arg(value_arg("eps"))
                .arg(signed_arg("jmin"))
                .arg(signed_arg("jmax"))
                .arg(value_arg("eta1"))
                .arg(value_arg("seed")),
        )
        .subcommand(scan_args(
            clap::Command::new("ratio-search")
                .about("randomized supremum of the two-order permutation ratio")
                .arg(value_arg("n"))
                .arg(value_arg("N")),
        ))
}

fn help_text(argv: &[String]) -> Option<String> {
    let wants = argv.is_empty()
        || argv[0] == "help"
        || argv.iter().any(|a| a == "-h" || a == "--help");
    if !wants {
        return None;
    }
    let topic = if argv.first().map(String::as_str) == Some("help") {
        argv.get(1)
    } else {
        argv.first()
    };
    let mut root = tree();
    let text = match topic.and_then(|t| root.find_subcommand(t).cloned()) {
        Some(mut sub) => sub.render_long_help().to_string(),
        None => root.render_long_help().to_string(),
    };
    Some(text)
}

fn map_clap_error(e: clap::Error) -> CliError {
    let context_string = |kind: ContextKind| {
        e.context().find_map(|(k, v)| {
            if k == kind {
                if let ContextValue::String(s) = v {
                    return Some(s.clone());
                }
            }
            None
        })
    };
    match e.kind() {
        ErrorKind::InvalidSubcommand => CliError::UnknownSubcommand {
            name: context_string(ContextKind::InvalidSubcommand).unwrap_or_default(),
        },
        _ => {
            let flag = context_string(ContextKind::InvalidArg).unwrap_or_else(|| "<args>".into());
            let message = e
                .to_string()
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ")
                .to_string();
            CliError::BadFlag { flag, message }
        }
    }
}

fn req<'a>(m: &'a ArgMatches, name: &str) -> Result<&'a str, CliError> {
    m.get_one::<String>(name)
        .map(String::as_str)
        .ok_or(CliError::MissingRequired {
            flag: format!("--{name}"),
        })
}

fn opt<'a>(m: &'a ArgMatches, name: &str) -> Option<&'a str> {
    m.get_one::<String>(name).map(String::as_str)
}

fn parse_kernel(s: &str) -> Result<KernelSpec, CliError> {
    s.parse()
        .map_err(|e: curvkit::KernelError| CliError::bad_flag("--kernel", e.to_string()))
}

fn parse_triple(s: &str) -> Result<Triple, CliError> {
    let fields: Vec<&str> = s.split(',').collect();
    if fields.len() != 6 {
        return Err(CliError::bad_flag(
            "--triple",
            format!("expected 6 comma separated coordinates, got {}", fields.len()),
        ));
    }
    let mut coords = [0.0_f64; 6];
    for (slot, field) in coords.iter_mut().zip(&fields) {
        *slot = field.trim().parse().map_err(|_| {
            CliError::bad_flag("--triple", format!("'{field}' is not a number"))
        })?;
    }
    Triple::from_coords(coords).map_err(|e| CliError::bad_flag("--triple", e.to_string()))
}

fn parse_f64(flag: &str, s: &str) -> Result<f64, CliError> {
    let v: f64 = s
        .parse()
        .map_err(|_| CliError::bad_flag(flag, format!("'{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::bad_flag(flag, "must be finite"));
    }
    Ok(v)
}

fn parse_int<T: FromStr>(flag: &str, s: &str) -> Result<T, CliError> {
    s.parse()
        .map_err(|_| CliError::bad_flag(flag, format!("'{s}' is not a valid integer")))
}

fn parse_order(flag: &str, s: &str) -> Result<u32, CliError> {
    let v: u32 = parse_int(flag, s)?;
    if v == 0 {
        return Err(CliError::bad_flag(flag, "order must be at least 1"));
    }
    Ok(v)
}

fn parse_eps(m: &ArgMatches) -> Result<f64, CliError> {
    let eps = parse_f64("--eps", req(m, "eps")?)?;
    if eps <= 0.0 {
        return Err(CliError::bad_flag("--eps", "must be positive"));
    }
    Ok(eps)
}

fn parse_measure(m: &ArgMatches) -> Result<MeasureSource, CliError> {
    MeasureSource::parse(req(m, "measure")?).map_err(|e| CliError::bad_flag("--measure", e))
}

fn parse_scan(m: &ArgMatches, sampler: Sampler, samples: u64, refine: u32) -> Result<ScanConfig, CliError> {
    let sampler = match opt(m, "sampler") {
        Some(s) => s
            .parse()
            .map_err(|e: String| CliError::bad_flag("--sampler", e))?,
        None => sampler,
    };
    let samples = match opt(m, "samples") {
        Some(s) => parse_int("--samples", s)?,
        None => samples,
    };
    if samples == 0 {
        return Err(CliError::bad_flag("--samples", "must be at least 1"));
    }
    let seed = match opt(m, "seed") {
        Some(s) => parse_int("--seed", s)?,
        None => 0,
    };
    let refine_steps = match opt(m, "refine-steps") {
        Some(s) => parse_int("--refine-steps", s)?,
        None => refine,
    };
    Ok(ScanConfig {
        sampler,
        samples,
        seed,
        refine_steps,
        normalize: !m.get_flag("no-normalize"),
    })
}

fn parse_lattice_window(m: &ArgMatches) -> Result<(i32, i32, f64, u64), CliError> {
    let j_min: i32 = match opt(m, "jmin") {
        Some(s) => parse_int("--jmin", s)?,
        None => 1,
    };
    let j_max: i32 = match opt(m, "jmax") {
        Some(s) => parse_int("--jmax", s)?,
        None => 6,
    };
    if j_min.abs() > 40 || j_max.abs() > 40 {
        return Err(CliError::bad_flag("--jmax", "generations must lie in [-40, 40]"));
    }
    if j_min > j_max {
        return Err(CliError::bad_flag("--jmax", "must not precede --jmin"));
    }
    let eta1 = match opt(m, "eta1") {
        Some(s) => parse_f64("--eta1", s)?,
        None => 6.0,
    };
    if eta1 <= 4.0 {
        return Err(CliError::bad_flag("--eta1", "window dilation must exceed 4"));
    }
    let seed = match opt(m, "seed") {
        Some(s) => parse_int("--seed", s)?,
        None => 0,
    };
    Ok((j_min, j_max, eta1, seed))
}

/// Parse raw process arguments (without the binary name) into a run plan
/// or help text. All range validation happens here, before any work runs.
pub fn parse_args(argv: &[String]) -> Result<ParseOutcome, CliError> {
    if let Some(text) = help_text(argv) {
        return Ok(ParseOutcome::Help(text));
    }
    let matches = tree()
        .try_get_matches_from(std::iter::once("curvkit".to_string()).chain(argv.iter().cloned()))
        .map_err(map_clap_error)?;
    let (name, m) = matches
        .subcommand()
        .expect("subcommand presence is enforced by clap");

    let command = match name {
        "perm" => Command::Perm {
            kernel: parse_kernel(req(m, "kernel")?)?,
            triple: parse_triple(req(m, "triple")?)?,
        },
        "curvature" => Command::Curvature {
            triple: parse_triple(req(m, "triple")?)?,
        },
        "region" => {
            let lo = parse_order("--n", req(m, "n")?)?;
            let hi = parse_order("--N", req(m, "N")?)?;
            if hi <= lo {
                return Err(CliError::bad_flag("--N", "must exceed --n"));
            }
            let grid = match opt(m, "grid") {
                Some(s) => Some(
                    s.parse::<GridSpec>()
                        .map_err(|e| CliError::bad_flag("--grid", e))?,
                ),
                None => None,
            };
            Command::Region {
                lo,
                hi,
                grid,
                scan: parse_scan(m, Sampler::GammaFamily, 20_000, 25)?,
            }
        }
        "scan" => {
            let kernel = parse_kernel(req(m, "kernel")?)?;
            let constrained = match (opt(m, "alpha0"), opt(m, "tau")) {
                (None, None) => None,
                (Some(_), None) => {
                    return Err(CliError::MissingRequired {
                        flag: "--tau".into(),
                    })
                }
                (None, Some(_)) => {
                    return Err(CliError::MissingRequired {
                        flag: "--alpha0".into(),
                    })
                }
                (Some(a), Some(t)) => {
                    let alpha0 = parse_f64("--alpha0", a)?;
                    if alpha0 <= 0.0 || alpha0 >= std::f64::consts::FRAC_PI_2 {
                        return Err(CliError::bad_flag(
                            "--alpha0",
                            "must lie strictly between 0 and pi/2",
                        ));
                    }
                    let tau = parse_f64("--tau", t)?;
                    if tau < 1.0 {
                        return Err(CliError::bad_flag("--tau", "must be at least 1"));
                    }
                    if !kernel.is_real() {
                        return Err(CliError::bad_flag(
                            "--kernel",
                            "constrained scans need a real kernel",
                        ));
                    }
                    Some((alpha0, tau))
                }
            };
            Command::Scan {
                kernel,
                scan: parse_scan(m, Sampler::UniformBox, 10_000, 0)?,
                constrained,
            }
        }
        "measure-gen" => Command::MeasureGen {
            gen: req(m, "gen")?
                .parse()
                .map_err(|e: String| CliError::bad_flag("--gen", e))?,
        },
        "op-norm" => {
            let t = match opt(m, "t") {
                Some(s) => {
                    let t = parse_f64("--t", s)?;
                    if t.abs() <= std::f64::consts::SQRT_2 {
                        return Err(CliError::bad_flag(
                            "--t",
                            "combination weight magnitude must exceed sqrt(2)",
                        ));
                    }
                    Some(t)
                }
                None => None,
            };
            Command::OpNorm {
                measure: parse_measure(m)?,
                eps: parse_eps(m)?,
                t,
            }
        }
        "mv-check" => Command::MvCheck {
            measure: parse_measure(m)?,
            kernel: parse_kernel(req(m, "kernel")?)?,
            eps: parse_eps(m)?,
        },
        "beta" | "packing" => {
            let measure = parse_measure(m)?;
            let eps = parse_eps(m)?;
            let (j_min, j_max, eta1, seed) = parse_lattice_window(m)?;
            if name == "beta" {
                Command::Beta {
                    measure,
                    eps,
                    j_min,
                    j_max,
                    eta1,
                    seed,
                }
            } else {
                Command::Packing {
                    measure,
                    eps,
                    j_min,
                    j_max,
                    eta1,
                    seed,
                }
            }
        }
        "ratio-search" => {
            let lo = parse_order("--n", req(m, "n")?)?;
            let hi = parse_order("--N", req(m, "N")?)?;
            if hi < lo {
                return Err(CliError::bad_flag("--N", "must be at least --n"));
            }
            Command::RatioSearch {
                lo,
                hi,
                scan: parse_scan(m, Sampler::GammaFamily, 20_000, 0)?,
            }
        }
        other => {
            return Err(CliError::UnknownSubcommand {
                name: other.to_string(),
            })
        }
    };

    let threads = match opt(m, "threads") {
        Some(s) => {
            let n: usize = parse_int("--threads", s)?;
            if n == 0 {
                return Err(CliError::bad_flag("--threads", "must be at least 1"));
            }
            Some(n)
        }
        None => None,
    };

    Ok(ParseOutcome::Plan(RunPlan {
        command,
        threads,
        no_timestamp: m.get_flag("no-timestamp"),
        out: opt(m, "out").map(PathBuf::from),
    }))
}
