//! Experiment configuration: `key = value` lines from a file, overridden by
//! `key=value` arguments. Keys are `section.name`; a bare `name` resolves
//! against the sections the subcommand reads.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use singular_ma::solver::{InnerSolver, SolveConfig};
use singular_ma::{Domain, Error as CoreError, RhsSpec};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    VerifyBarriers,
    Solve,
    FitExponent,
    Compare,
    Bootstrap,
    MixcProbe,
    ReproduceAll,
}

impl Command {
    /// Output file prefix.
    pub fn prefix(self) -> &'static str {
        match self {
            Self::VerifyBarriers => "verify_barriers",
            Self::Solve => "solve",
            Self::FitExponent => "fit_exponent",
            Self::Compare => "compare",
            Self::Bootstrap => "bootstrap",
            Self::MixcProbe => "mixc_probe",
            Self::ReproduceAll => "reproduce_all",
        }
    }

    /// Sections searched, in order, for bare keys.
    fn sections(self) -> &'static [&'static str] {
        match self {
            Self::VerifyBarriers => &["barrier"],
            Self::Solve => &["solver", "domain", "rhs"],
            Self::FitExponent => &["fit", "solver", "domain", "rhs"],
            Self::Compare => &["compare", "solver", "domain", "rhs"],
            Self::Bootstrap => &["bootstrap"],
            Self::MixcProbe => &["rhs", "domain", "fit", "solver"],
            Self::ReproduceAll => &[],
        }
    }

    /// Defaults that differ from the global ones.
    fn defaults(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Self::MixcProbe => &[("domain.gamma", "0.5"), ("rhs.kind", "affine_sphere")],
            _ => &[],
        }
    }
}

/// Every accepted key with its default.
const KEYS: &[(&str, &str)] = &[
    ("seed", "20240601"),
    ("output", ""),
    ("criteria", "all"),
    ("domain.kind", "parabola_cap"),
    ("domain.n", "2"),
    ("domain.t", "1"),
    ("domain.gamma", "0"),
    ("domain.radius", "1"),
    ("rhs.kind", "power"),
    ("rhs.p", "1"),
    ("rhs.q", "0"),
    ("rhs.k", "1"),
    ("solver.h", "0.015625"),
    ("solver.stencil_width", "2"),
    ("solver.eps0", "auto"),
    ("solver.eps_ratio", "0.5"),
    ("solver.eps_floor", "1e-8"),
    ("solver.stage_tolerance", "1e-3"),
    ("solver.damping", "auto"),
    ("solver.tolerance", "1e-10"),
    ("solver.max_iter", "200000"),
    ("solver.inner", "policy"),
    ("solver.inner_steps", "1"),
    ("solver.support_floor", "1e-8"),
    ("solver.dump", "false"),
    ("fit.target", "solution"),
    ("fit.window_min", "auto"),
    ("fit.window_max", "0.1"),
    ("fit.points", "40"),
    ("fit.tolerance", "0.07"),
    ("barrier.n", "2"),
    ("barrier.p", "1"),
    ("barrier.alpha", "none"),
    ("barrier.t", "none"),
    ("barrier.k", "none"),
    ("barrier.gamma", "0.5"),
    ("barrier.samples", "10000"),
    ("barrier.fd_samples", "1000"),
    ("barrier.margin", "1e-3"),
    ("bootstrap.n", "3"),
    ("bootstrap.q", "1"),
    ("bootstrap.steps", "10"),
    ("bootstrap.target", "none"),
    ("compare.lower", "sub_valpha"),
    ("compare.upper", "super_w"),
    ("compare.samples", "10000"),
];

fn known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

/// Raw `key -> value` pairs with fully qualified keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    /// Parses `key = value` lines. `#` starts a comment.
    pub fn parse(text: &str, command: Command) -> CliResult<Self> {
        let mut raw = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            raw.set(line, command)
                .map_err(|e| CliError::config(format!("line {}", lineno + 1), e.to_string()))?;
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path, command: Command) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, command)
    }

    /// Applies one `key=value` (or `--key=value`) assignment.
    pub fn set(&mut self, assignment: &str, command: Command) -> CliResult<()> {
        let body = assignment.trim().trim_start_matches("--");
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| CliError::config(body, "expected key=value"))?;
        let key = resolve(key.trim(), command)?;
        self.values.insert(key, value.trim().to_string());
        Ok(())
    }

    fn get(&self, key: &str, command: Command) -> &str {
        if let Some(v) = self.values.get(key) {
            return v;
        }
        if let Some((_, v)) = command.defaults().iter().find(|(k, _)| *k == key) {
            return v;
        }
        KEYS.iter().find(|(k, _)| *k == key).map(|(_, v)| *v).expect("known key")
    }
}

/// Maps a possibly bare key to its qualified form.
fn resolve(key: &str, command: Command) -> CliResult<String> {
    let key = key.replace('\u{3b1}', "alpha");
    if known(&key) {
        return Ok(key);
    }
    if key.contains('.') {
        return Err(CliError::config(key, "unknown key"));
    }
    for section in command.sections() {
        let q = format!("{section}.{key}");
        if known(&q) {
            return Ok(q);
        }
    }
    let suffix = format!(".{key}");
    let mut hits = KEYS.iter().filter(|(k, _)| k.ends_with(&suffix));
    match (hits.next(), hits.next()) {
        (Some((k, _)), None) => Ok(k.to_string()),
        (Some(_), Some(_)) => Err(CliError::config(key, "ambiguous key, qualify it with a section")),
        _ => Err(CliError::config(key, "unknown key")),
    }
}

/// Parses a number, accepting `a/b` fractions.
fn number(key: &str, v: &str) -> CliResult<f64> {
    let parsed = match v.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>().ok().zip(b.trim().parse::<f64>().ok()).map(|(a, b)| a / b),
        None => v.parse::<f64>().ok(),
    };
    match parsed {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(CliError::config(key, format!("`{v}` is not a finite number"))),
    }
}

fn parse<T: FromStr>(key: &str, v: &str) -> CliResult<T>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| CliError::config(key, format!("`{v}`: {e}")))
}

fn optional(key: &str, v: &str) -> CliResult<Option<f64>> {
    match v {
        "none" | "auto" | "" => Ok(None),
        _ => number(key, v).map(Some),
    }
}

fn require(key: &str, ok: bool, reason: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::config(key, reason))
    }
}

/// Renames core parameter errors to the config field that caused them.
fn field_error(section: &str, e: CoreError) -> CliError {
    match e {
        CoreError::InvalidParameter { name, reason, .. } => {
            let name = if name == "max_iterations" { "max_iter" } else { name };
            CliError::config(format!("{section}.{name}"), reason)
        }
        other => CliError::config(section, other.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainChoice {
    ParabolaCap,
    SphereCap,
    Ball,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainConfig {
    pub kind: DomainChoice,
    pub n: usize,
    pub t: f64,
    pub gamma: f64,
    pub radius: f64,
}

impl DomainConfig {
    pub fn build(&self) -> CliResult<Domain> {
        let d = match self.kind {
            DomainChoice::ParabolaCap => Domain::parabola_cap(self.n, self.t, self.gamma),
            DomainChoice::SphereCap => Domain::sphere_cap(self.n),
            DomainChoice::Ball => Domain::ball(self.n, self.radius),
        };
        d.map_err(|e| field_error("domain", e))
    }

    pub fn label(&self) -> String {
        match self.kind {
            DomainChoice::ParabolaCap => format!("parabola_cap(n={},t={},gamma={})", self.n, self.t, self.gamma),
            DomainChoice::SphereCap => format!("sphere_cap(n={})", self.n),
            DomainChoice::Ball => format!("ball(n={},r={})", self.n, self.radius),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitTarget {
    Solution,
    SubValpha,
    SuperW,
    SuperWk,
    P1Cylinder,
    Ujl,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub target: FitTarget,
    /// `None` means `4h` for solutions and `1e-3` for barriers.
    pub window_min: Option<f64>,
    pub window_max: f64,
    pub points: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierConfig {
    pub n: usize,
    pub p: f64,
    pub alpha: Option<f64>,
    pub t: Option<f64>,
    pub k: Option<f64>,
    pub gamma: f64,
    pub samples: usize,
    pub fd_samples: usize,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapConfig {
    pub n: usize,
    pub q: f64,
    pub steps: usize,
    pub target: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    SubValpha,
    SuperW,
    Solution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub lower: Profile,
    pub upper: Profile,
    pub samples: usize,
}

/// Validated configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    /// Output directory override; empty means the environment default.
    pub output: String,
    pub criteria: Vec<u8>,
    pub domain: DomainConfig,
    pub rhs: RhsSpec,
    pub solver: SolveConfig,
    pub dump: bool,
    pub fit: FitConfig,
    pub barrier: BarrierConfig,
    pub bootstrap: BootstrapConfig,
    pub compare: CompareConfig,
}

impl ExperimentConfig {
    /// Reads `file` if given, then applies `overrides` in order.
    pub fn load(command: Command, file: Option<&Path>, overrides: &[String]) -> CliResult<Self> {
        let mut raw = match file {
            Some(path) => RawConfig::from_file(path, command)?,
            None => RawConfig::default(),
        };
        for o in overrides {
            raw.set(o, command)?;
        }
        Self::from_raw(command, &raw)
    }

    pub fn from_raw(command: Command, raw: &RawConfig) -> CliResult<Self> {
        let get = |k: &str| raw.get(k, command);
        let num = |k: &str| number(k, get(k));

        let criteria = match get("criteria") {
            "all" => crate::acceptance::ALL.to_vec(),
            list => list
                .split(',')
                .map(|s| {
                    let id: u8 = parse("criteria", s.trim())?;
                    require("criteria", (1..=11).contains(&id), "criteria are numbered 1 to 11")?;
                    Ok(id)
                })
                .collect::<CliResult<Vec<u8>>>()?,
        };

        let domain = DomainConfig {
            kind: match get("domain.kind") {
                "parabola_cap" => DomainChoice::ParabolaCap,
                "sphere_cap" => DomainChoice::SphereCap,
                "ball" => DomainChoice::Ball,
                other => return Err(CliError::config("domain.kind", format!("unknown domain `{other}`"))),
            },
            n: parse("domain.n", get("domain.n"))?,
            t: num("domain.t")?,
            gamma: num("domain.gamma")?,
            radius: num("domain.radius")?,
        };
        domain.build()?;

        let rhs = match get("rhs.kind") {
            "power" => RhsSpec::power(num("rhs.p")?),
            "degenerate" => RhsSpec::degenerate(num("rhs.q")?),
            "affine_sphere" => RhsSpec::affine_sphere(num("rhs.k")?),
            other => return Err(CliError::config("rhs.kind", format!("unknown right-hand side `{other}`"))),
        }
        .map_err(|e| field_error("rhs", e))?;

        let steps: usize = parse("solver.inner_steps", get("solver.inner_steps"))?;
        let solver = SolveConfig {
            h: num("solver.h")?,
            stencil_width: parse("solver.stencil_width", get("solver.stencil_width"))?,
            eps0: optional("solver.eps0", get("solver.eps0"))?,
            eps_ratio: num("solver.eps_ratio")?,
            eps_floor: num("solver.eps_floor")?,
            stage_tolerance: num("solver.stage_tolerance")?,
            damping: optional("solver.damping", get("solver.damping"))?,
            tolerance: num("solver.tolerance")?,
            max_iterations: parse("solver.max_iter", get("solver.max_iter"))?,
            inner: match get("solver.inner") {
                "policy" => InnerSolver::Policy { steps },
                "gauss_seidel" => InnerSolver::GaussSeidel { sweeps: steps },
                other => return Err(CliError::config("solver.inner", format!("unknown inner solver `{other}`"))),
            },
            support_floor: num("solver.support_floor")?,
            ..SolveConfig::default()
        };
        solver.validate().map_err(|e| field_error("solver", e))?;
        let dump: bool = parse("solver.dump", get("solver.dump"))?;

        let fit = FitConfig {
            target: match get("fit.target") {
                "solution" => FitTarget::Solution,
                "sub_valpha" => FitTarget::SubValpha,
                "super_w" => FitTarget::SuperW,
                "super_wk" => FitTarget::SuperWk,
                "p1_cylinder" => FitTarget::P1Cylinder,
                "ujl" => FitTarget::Ujl,
                other => return Err(CliError::config("fit.target", format!("unknown target `{other}`"))),
            },
            window_min: optional("fit.window_min", get("fit.window_min"))?,
            window_max: num("fit.window_max")?,
            points: parse("fit.points", get("fit.points"))?,
            tolerance: num("fit.tolerance")?,
        };
        if let Some(lo) = fit.window_min {
            require("fit.window_min", lo > 0.0 && lo < fit.window_max, "must lie in (0, fit.window_max)")?;
        }
        require("fit.window_max", fit.window_max > 0.0, "must be positive")?;
        require("fit.points", fit.points >= 3, "must be at least 3")?;
        require("fit.tolerance", fit.tolerance >= 0.0, "must be nonnegative")?;

        let barrier = BarrierConfig {
            n: parse("barrier.n", get("barrier.n"))?,
            p: num("barrier.p")?,
            alpha: optional("barrier.alpha", get("barrier.alpha"))?,
            t: optional("barrier.t", get("barrier.t"))?,
            k: optional("barrier.k", get("barrier.k"))?,
            gamma: num("barrier.gamma")?,
            samples: parse("barrier.samples", get("barrier.samples"))?,
            fd_samples: parse("barrier.fd_samples", get("barrier.fd_samples"))?,
            margin: num("barrier.margin")?,
        };
        require("barrier.n", barrier.n >= 2, "must be at least 2")?;
        require("barrier.p", barrier.p > 0.0, "must be positive")?;
        if let Some(a) = barrier.alpha {
            require("barrier.alpha", a > 0.0 && a < 1.0, "must lie in (0, 1)")?;
        }
        if let Some(t) = barrier.t {
            require("barrier.t", t > 0.0, "must be positive")?;
        }
        if let Some(k) = barrier.k {
            require("barrier.k", k > 0.0, "must be positive")?;
        }
        require("barrier.gamma", barrier.gamma > 0.0 && barrier.gamma < 1.0, "must lie in (0, 1)")?;
        require("barrier.samples", barrier.samples > 0, "must be positive")?;
        require("barrier.fd_samples", barrier.fd_samples > 0, "must be positive")?;
        require("barrier.margin", barrier.margin >= 0.0, "must be nonnegative")?;

        let bootstrap = BootstrapConfig {
            n: parse("bootstrap.n", get("bootstrap.n"))?,
            q: num("bootstrap.q")?,
            steps: parse("bootstrap.steps", get("bootstrap.steps"))?,
            target: optional("bootstrap.target", get("bootstrap.target"))?,
        };
        require("bootstrap.n", bootstrap.n >= 3, "must be at least 3")?;
        let nb = bootstrap.n as f64;
        require("bootstrap.q", bootstrap.q > 0.0 && bootstrap.q <= nb - 2.0, "must lie in (0, n - 2]")?;
        require("bootstrap.steps", bootstrap.steps > 0, "must be positive")?;
        if let Some(b) = bootstrap.target {
            require("bootstrap.target", b > 0.0 && b < 2.0 / (nb - bootstrap.q), "must lie in (0, 2/(n - q))")?;
        }

        let profile = |key: &str| -> CliResult<Profile> {
            match get(key) {
                "sub_valpha" => Ok(Profile::SubValpha),
                "super_w" => Ok(Profile::SuperW),
                "solution" => Ok(Profile::Solution),
                other => Err(CliError::config(key, format!("unknown profile `{other}`"))),
            }
        };
        let compare = CompareConfig {
            lower: profile("compare.lower")?,
            upper: profile("compare.upper")?,
            samples: parse("compare.samples", get("compare.samples"))?,
        };
        require("compare.samples", compare.samples > 0, "must be positive")?;

        let needs_grid = match command {
            Command::Solve | Command::MixcProbe => true,
            Command::FitExponent => fit.target == FitTarget::Solution,
            Command::Compare => compare.lower == Profile::Solution || compare.upper == Profile::Solution,
            _ => false,
        };
        if needs_grid {
            require("domain.n", domain.n == 2, "the grid solver is planar, use n = 2")?;
        }
        let power = matches!(rhs, RhsSpec::PowerSingular { .. });
        if command == Command::Compare {
            require("rhs.kind", power, "the comparison profiles need a power right-hand side")?;
        }
        if command == Command::FitExponent {
            match fit.target {
                FitTarget::SubValpha | FitTarget::SuperW => {
                    require("rhs.kind", power, "this target needs a power right-hand side")?
                }
                FitTarget::SuperWk => require(
                    "rhs.kind",
                    matches!(rhs, RhsSpec::AffineSphere { .. }),
                    "this target needs affine_sphere",
                )?,
                _ => {}
            }
        }
        if command == Command::MixcProbe {
            require("rhs.kind", matches!(rhs, RhsSpec::AffineSphere { .. }), "the rate probe needs affine_sphere")?;
            require("domain.kind", domain.kind == DomainChoice::ParabolaCap, "the rate probe needs parabola_cap")?;
        }

        Ok(Self {
            command,
            seed: parse("seed", get("seed"))?,
            output: get("output").to_string(),
            criteria,
            domain,
            rhs,
            solver,
            dump,
            fit,
            barrier,
            bootstrap,
            compare,
        })
    }
}
