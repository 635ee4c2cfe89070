//! Flag/config-file merging and validation into a [`RunConfig`].

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use bellbench_core::criteria::{ConfigLabel, DEFAULT_G_TOL};
use bellbench_core::experiments::{AspectRates, DEFAULT_N_POINTS};
use bellbench_core::hv::HvModel;
use bellbench_core::{ChshConfig, Complex64, Direction, TwoQubitState};
use clap::Parser;
use thiserror::Error;

pub const COMMANDS: [&str; 8] = [
    "chsh", "gisin", "hv-sim", "optimize", "figure1", "figure2", "figure3", "classify",
];

const COMMANDS_HELP: &str = "\
Commands:
  chsh      CHSH value of a state for one configuration, with the four G(a,b) verdicts
  classify  Three-way verdict (QM / CHSH-consistent / G-consistent) for state + configuration
  gisin     G(a,b) for one direction pair and max |G| over all pairs
  hv-sim    Monte Carlo local hidden-variables run (CSV per direction pair)
  optimize  Maximize |<B>| and |G(a,b)| over measurement directions
  figure1   CHSH value vs alpha^2 for configurations A, B, C (CSV)
  figure2   G(a,b) and G(a,b') vs alpha^2 for configurations A, B, C (CSV)
  figure3   Photon-pair G(phi) with polarizer efficiencies (CSV)

Angles are radians; fractions of pi are accepted: pi/4, 3pi/4, -pi/8, 2*pi/3.
Config files hold one key=value pair per line (keys are the flag names with
underscores, e.g. n_points=101); `#` starts a comment; flags override file values.
Environment: BELLBENCH_OUT sets the default output directory for CSV files.
Exit codes: 0 success, 1 invalid input, 2 internal assertion failure.";

/// Raw command line. Values stay strings until validation, which reports all
/// problems together.
#[derive(Parser, Debug, Default)]
#[command(
    name = "bellbench",
    version,
    about = "Two-qubit correlations, CHSH and G(a,b) criteria, hidden-variables Monte Carlo",
    after_help = COMMANDS_HELP
)]
pub struct RawArgs {
    /// One of: chsh, classify, gisin, hv-sim, optimize, figure1, figure2, figure3
    pub command: Option<String>,
    /// key=value configuration file
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// State (alpha|+-> - beta|-+>) with real alpha = sqrt(alpha2), beta = sqrt(1 - alpha2)
    #[arg(long, allow_hyphen_values = true)]
    pub alpha2: Option<String>,
    /// Real part of alpha (amplitude form; pairs with --alpha-im, --beta-re, --beta-im)
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_re: Option<String>,
    /// Imaginary part of alpha
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_im: Option<String>,
    /// Real part of beta
    #[arg(long, allow_hyphen_values = true)]
    pub beta_re: Option<String>,
    /// Imaginary part of beta
    #[arg(long, allow_hyphen_values = true)]
    pub beta_im: Option<String>,

    /// Configuration A: (pi/3, pi/8, pi/4, pi/6)
    #[arg(long)]
    pub config_a: bool,
    /// Configuration B: (pi/4, pi/2, 3pi/4, 0)
    #[arg(long)]
    pub config_b: bool,
    /// Configuration C: (pi/6, 3pi/4, pi, 0)
    #[arg(long)]
    pub config_c: bool,
    /// Configurations for figure1/figure2, e.g. A,B,C
    #[arg(long)]
    pub configs: Option<String>,
    /// Planar angle of a: a = (sin theta, 0, cos theta)
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Planar angle of b
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    /// Planar angle of a'
    #[arg(long, allow_hyphen_values = true)]
    pub theta_prime: Option<String>,
    /// Planar angle of b'
    #[arg(long, allow_hyphen_values = true)]
    pub phi_prime: Option<String>,
    /// Direction a as x,y,z (normalized)
    #[arg(long, allow_hyphen_values = true)]
    pub dir_a: Option<String>,
    /// Direction a' as x,y,z (normalized)
    #[arg(long, allow_hyphen_values = true)]
    pub dir_a_prime: Option<String>,
    /// Direction b as x,y,z (normalized)
    #[arg(long, allow_hyphen_values = true)]
    pub dir_b: Option<String>,
    /// Direction b' as x,y,z (normalized)
    #[arg(long, allow_hyphen_values = true)]
    pub dir_b_prime: Option<String>,

    /// Monte Carlo samples for hv-sim (default 1000000)
    #[arg(long, allow_hyphen_values = true)]
    pub n_samples: Option<String>,
    /// Monte Carlo seed (default 0)
    #[arg(long, allow_hyphen_values = true)]
    pub seed: Option<String>,
    /// Hidden-variables model: factorized or delta
    #[arg(long)]
    pub model: Option<String>,
    /// Output CSV path
    #[arg(long)]
    pub out: Option<String>,
    /// Tolerance for "G = 0" and CHSH verdicts
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<String>,
    /// Points per figure scan (default 101)
    #[arg(long, allow_hyphen_values = true)]
    pub n_points: Option<String>,
    /// Restrict optimize to planar directions
    #[arg(long)]
    pub planar: bool,

    /// figure3: first polarizer transmission of the parallel channel (default 0.971)
    #[arg(long, allow_hyphen_values = true)]
    pub eff1_plus: Option<String>,
    /// figure3: first polarizer leakage of the orthogonal channel (default 0.029)
    #[arg(long, allow_hyphen_values = true)]
    pub eff1_minus: Option<String>,
    /// figure3: second polarizer transmission (default 0.968)
    #[arg(long, allow_hyphen_values = true)]
    pub eff2_plus: Option<String>,
    /// figure3: second polarizer leakage (default 0.028)
    #[arg(long, allow_hyphen_values = true)]
    pub eff2_minus: Option<String>,
    /// figure3: collection-angle factor (default 0.984)
    #[arg(long, allow_hyphen_values = true)]
    pub angular_factor: Option<String>,
    /// Ideal polarizers for figure3 (coefficient 1)
    #[arg(long)]
    pub ideal: bool,
}

const KEYS: [&str; 31] = [
    "command",
    "alpha2",
    "alpha_re",
    "alpha_im",
    "beta_re",
    "beta_im",
    "config_a",
    "config_b",
    "config_c",
    "configs",
    "theta",
    "phi",
    "theta_prime",
    "phi_prime",
    "dir_a",
    "dir_a_prime",
    "dir_b",
    "dir_b_prime",
    "n_samples",
    "seed",
    "model",
    "out",
    "tol",
    "n_points",
    "planar",
    "eff1_plus",
    "eff1_minus",
    "eff2_plus",
    "eff2_minus",
    "angular_factor",
    "ideal",
];

impl RawArgs {
    fn into_map(self) -> BTreeMap<&'static str, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k, v);
            }
        };
        put("command", self.command);
        put("alpha2", self.alpha2);
        put("alpha_re", self.alpha_re);
        put("alpha_im", self.alpha_im);
        put("beta_re", self.beta_re);
        put("beta_im", self.beta_im);
        put("configs", self.configs);
        put("theta", self.theta);
        put("phi", self.phi);
        put("theta_prime", self.theta_prime);
        put("phi_prime", self.phi_prime);
        put("dir_a", self.dir_a);
        put("dir_a_prime", self.dir_a_prime);
        put("dir_b", self.dir_b);
        put("dir_b_prime", self.dir_b_prime);
        put("n_samples", self.n_samples);
        put("seed", self.seed);
        put("model", self.model);
        put("out", self.out);
        put("tol", self.tol);
        put("n_points", self.n_points);
        put("eff1_plus", self.eff1_plus);
        put("eff1_minus", self.eff1_minus);
        put("eff2_plus", self.eff2_plus);
        put("eff2_minus", self.eff2_minus);
        put("angular_factor", self.angular_factor);
        for (k, set) in [
            ("config_a", self.config_a),
            ("config_b", self.config_b),
            ("config_c", self.config_c),
            ("planar", self.planar),
            ("ideal", self.ideal),
        ] {
            if set {
                put(k, Some("true".into()));
            }
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Chsh,
    Gisin,
    HvSim,
    Optimize,
    Figure1,
    Figure2,
    Figure3,
    Classify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Chsh => "chsh",
            Command::Gisin => "gisin",
            Command::HvSim => "hv-sim",
            Command::Optimize => "optimize",
            Command::Figure1 => "figure1",
            Command::Figure2 => "figure2",
            Command::Figure3 => "figure3",
            Command::Classify => "classify",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "chsh" => Command::Chsh,
            "gisin" => Command::Gisin,
            "hv-sim" => Command::HvSim,
            "optimize" => Command::Optimize,
            "figure1" => Command::Figure1,
            "figure2" => Command::Figure2,
            "figure3" => Command::Figure3,
            "classify" => Command::Classify,
            _ => return None,
        })
    }

    /// Figure-like commands always produce a CSV file.
    pub fn writes_csv_by_default(self) -> bool {
        matches!(
            self,
            Command::Figure1 | Command::Figure2 | Command::Figure3 | Command::HvSim
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    AlphaSquared(f64),
    Amplitudes { alpha: Complex64, beta: Complex64 },
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::AlphaSquared(x) => write!(f, "alpha^2={x}"),
            StateSpec::Amplitudes { alpha, beta } => write!(f, "alpha={alpha}, beta={beta}"),
        }
    }
}

/// Where the CHSH configuration came from.
#[derive(Clone, Debug, PartialEq)]
pub enum ConfigSource {
    Named(ConfigLabel),
    Angles,
    Vectors,
}

/// Fully validated run description.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub state: Option<(StateSpec, TwoQubitState)>,
    pub chsh: Option<(ConfigSource, ChshConfig)>,
    /// A direction pair given without a full configuration (`gisin`).
    pub pair: Option<(Direction, Direction)>,
    pub figure_configs: Vec<ConfigLabel>,
    pub n_samples: u64,
    pub seed: u64,
    pub model: HvModel,
    pub model_name: String,
    pub out: Option<PathBuf>,
    pub tol: f64,
    pub n_points: usize,
    pub planar: bool,
    pub rates: AspectRates,
}

pub const DEFAULT_N_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Clap(#[from] clap::Error),
    #[error("invalid arguments:\n{}", .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<String>),
}

/// Parses a flat `key=value` file. `#` starts a comment; blank lines are skipped.
pub fn load_config_file(path: &Path) -> Result<BTreeMap<String, String>, Vec<String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| vec![format!("--config: cannot read {}: {e}", path.display())])?;
    let mut map = BTreeMap::new();
    let mut errors = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            errors.push(format!(
                "--config {}:{}: expected key=value, got `{line}`",
                path.display(),
                lineno + 1
            ));
            continue;
        };
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            errors.push(format!(
                "--config {}:{}: unknown key `{key}`",
                path.display(),
                lineno + 1
            ));
            continue;
        }
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            errors.push(format!(
                "--config {}:{}: duplicate key `{key}`",
                path.display(),
                lineno + 1
            ));
        }
    }
    if errors.is_empty() {
        Ok(map)
    } else {
        Err(errors)
    }
}

/// Parses radians, allowing multiples and fractions of pi (`3pi/4`, `-pi/8`, `2*pi/3`).
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    if t.is_empty() {
        return Err("empty angle".into());
    }
    if !t.contains("pi") {
        return parse_finite(&t);
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (t.as_str(), None),
    };
    let Some(coef) = num.strip_suffix("pi") else {
        return Err(format!("malformed angle `{s}`"));
    };
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => parse_finite(c).map_err(|_| format!("malformed angle `{s}`"))?,
    };
    let den = match den {
        None => 1.0,
        Some(d) => {
            let d = parse_finite(d).map_err(|_| format!("malformed angle `{s}`"))?;
            if d == 0.0 {
                return Err(format!("zero denominator in `{s}`"));
            }
            d
        }
    };
    Ok(coef * std::f64::consts::PI / den)
}

fn parse_finite(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("expected a finite number, got `{s}`")),
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(format!("expected true or false, got `{s}`")),
    }
}

fn parse_vector(s: &str) -> Result<Direction, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got `{s}`"));
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| parse_finite(p))
        .collect::<Result<_, _>>()?;
    Direction::normalized(v[0], v[1], v[2]).map_err(|e| e.to_string())
}

fn flag(key: &str) -> String {
    format!("--{}", key.replace('_', "-"))
}

/// Collects per-key conversions and their errors.
struct Validator {
    values: BTreeMap<String, String>,
    errors: Vec<String>,
}

impl Validator {
    fn get<V>(&mut self, key: &str, parse: impl Fn(&str) -> Result<V, String>) -> Option<V> {
        let raw = self.values.get(key)?.clone();
        match parse(&raw) {
            Ok(v) => Some(v),
            Err(e) => {
                self.errors.push(format!("{}: {e}", flag(key)));
                None
            }
        }
    }

    fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn flag_set(&mut self, key: &str) -> bool {
        self.get(key, parse_bool).unwrap_or(false)
    }

    fn error(&mut self, msg: String) {
        self.errors.push(msg);
    }
}

/// Parses argv (including the program name), merges an optional config file and validates.
pub fn parse_run_config<I, S>(
    argv: I,
    env_out_dir: Option<PathBuf>,
) -> Result<RunConfig, ConfigError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let raw = RawArgs::try_parse_from(argv)?;
    let file = raw.config.clone();
    let flags = raw.into_map();

    let mut values: BTreeMap<String, String> = BTreeMap::new();
    if let Some(path) = file {
        values = load_config_file(&path).map_err(ConfigError::Invalid)?;
    }
    for (k, v) in flags {
        values.insert(k.to_string(), v);
    }
    validate(values, env_out_dir)
}

fn validate(
    values: BTreeMap<String, String>,
    env_out_dir: Option<PathBuf>,
) -> Result<RunConfig, ConfigError> {
    let mut v = Validator {
        values,
        errors: Vec::new(),
    };

    let command = match v.values.get("command").cloned() {
        None => {
            v.error(format!("missing command (one of: {})", COMMANDS.join(", ")));
            None
        }
        Some(c) => match Command::parse(c.trim()) {
            Some(cmd) => Some(cmd),
            None => {
                v.error(format!(
                    "unknown command `{c}` (expected one of: {})",
                    COMMANDS.join(", ")
                ));
                None
            }
        },
    };

    let state = parse_state(&mut v);
    let chsh = parse_chsh_config(&mut v);
    let pair = parse_pair(&mut v, chsh.is_some());

    let figure_configs = v
        .get("configs", |s| {
            s.split(',')
                .map(|c| c.parse::<ConfigLabel>().map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()
        })
        .unwrap_or_else(|| ConfigLabel::ALL.to_vec());

    let n_samples = v
        .get("n_samples", |s| match s.trim().parse::<u64>() {
            Ok(0) => Err("must be at least 1".into()),
            Ok(n) => Ok(n),
            Err(_) => Err(format!("expected a positive integer, got `{s}`")),
        })
        .unwrap_or(DEFAULT_N_SAMPLES);
    let seed = v
        .get("seed", |s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| format!("expected a 64-bit unsigned integer, got `{s}`"))
        })
        .unwrap_or(DEFAULT_SEED);
    let model_name = v
        .get("model", |s| match s.trim() {
            "factorized" | "delta" => Ok(s.trim().to_string()),
            _ => Err(format!("expected factorized or delta, got `{s}`")),
        })
        .unwrap_or_else(|| "factorized".into());
    let model = if model_name == "delta" {
        HvModel::delta_correlated()
    } else {
        HvModel::factorized()
    };
    let tol = v
        .get("tol", |s| match parse_finite(s) {
            Ok(t) if t > 0.0 => Ok(t),
            Ok(_) => Err("must be positive".into()),
            Err(e) => Err(e),
        })
        .unwrap_or(DEFAULT_G_TOL);
    let n_points = v
        .get("n_points", |s| match s.trim().parse::<usize>() {
            Ok(n) if n >= 2 => Ok(n),
            _ => Err(format!("expected an integer >= 2, got `{s}`")),
        })
        .unwrap_or(DEFAULT_N_POINTS);
    let planar = v.flag_set("planar");
    let rates = parse_rates(&mut v);

    let explicit_out = v.get("out", |s| {
        if s.trim().is_empty() {
            Err("empty path".into())
        } else {
            Ok(PathBuf::from(s.trim()))
        }
    });

    if let Some(cmd) = command {
        let needs_state = !matches!(cmd, Command::Figure1 | Command::Figure2 | Command::Figure3);
        if needs_state
            && state.is_none()
            && !v.has("alpha2")
            && !v.has("alpha_re")
            && !v.has("beta_re")
        {
            v.error(format!(
                "{}: a state is required (--alpha2, or --alpha-re/--alpha-im/--beta-re/--beta-im)",
                cmd.name()
            ));
        }
        let needs_config = matches!(cmd, Command::Chsh | Command::Classify | Command::HvSim);
        if needs_config && chsh.is_none() && !v.errors.iter().any(|e| e.contains("configuration")) {
            v.error(format!(
                "{}: a CHSH configuration is required (--config-a/-b/-c, four angles, or four --dir-* vectors)",
                cmd.name()
            ));
        }
        if cmd == Command::Gisin
            && pair.is_none()
            && chsh.is_none()
            && !v
                .errors
                .iter()
                .any(|e| e.contains("--theta") || e.contains("--dir-a"))
        {
            v.error(
                "gisin: a direction pair is required (--theta/--phi or --dir-a/--dir-b)".into(),
            );
        }
    }

    if !v.errors.is_empty() {
        return Err(ConfigError::Invalid(v.errors));
    }
    let command = command.expect("validated above");
    let out = explicit_out.or_else(|| {
        command.writes_csv_by_default().then(|| {
            let file = format!("{}.csv", command.name().replace('-', "_"));
            env_out_dir.unwrap_or_else(|| PathBuf::from(".")).join(file)
        })
    });
    Ok(RunConfig {
        command,
        state,
        chsh,
        pair,
        figure_configs,
        n_samples,
        seed,
        model,
        model_name,
        out,
        tol,
        n_points,
        planar,
        rates,
    })
}

fn parse_state(v: &mut Validator) -> Option<(StateSpec, TwoQubitState)> {
    let amp_keys = ["alpha_re", "alpha_im", "beta_re", "beta_im"];
    let any_amp = amp_keys.iter().any(|k| v.has(k));
    if v.has("alpha2") && any_amp {
        v.error("--alpha2 conflicts with --alpha-re/--alpha-im/--beta-re/--beta-im".into());
        return None;
    }
    if v.has("alpha2") {
        let a2 = v.get("alpha2", |s| match parse_finite(s) {
            Ok(x) if (0.0..=1.0).contains(&x) => Ok(x),
            Ok(x) => Err(format!("must lie in [0, 1], got {x}")),
            Err(e) => Err(e),
        })?;
        let state = TwoQubitState::from_alpha_squared(a2).expect("alpha2 validated");
        return Some((StateSpec::AlphaSquared(a2), state));
    }
    if !any_amp {
        return None;
    }
    let parts: Vec<Option<f64>> = amp_keys
        .iter()
        .map(|k| {
            if v.has(k) {
                v.get(k, parse_finite)
            } else {
                Some(0.0)
            }
        })
        .collect();
    let [Some(ar), Some(ai), Some(br), Some(bi)] = parts[..] else {
        return None;
    };
    let alpha = Complex64::new(ar, ai);
    let beta = Complex64::new(br, bi);
    match TwoQubitState::alpha_beta(alpha, beta) {
        Ok(s) => Some((StateSpec::Amplitudes { alpha, beta }, s)),
        Err(e) => {
            v.error(format!("--alpha-re/--alpha-im/--beta-re/--beta-im: {e}"));
            None
        }
    }
}

fn parse_chsh_config(v: &mut Validator) -> Option<(ConfigSource, ChshConfig)> {
    let named: Vec<ConfigLabel> = [
        ("config_a", ConfigLabel::A),
        ("config_b", ConfigLabel::B),
        ("config_c", ConfigLabel::C),
    ]
    .into_iter()
    .filter(|(k, _)| v.flag_set(k))
    .map(|(_, l)| l)
    .collect();

    let angle_keys = ["theta", "phi", "theta_prime", "phi_prime"];
    let dir_keys = ["dir_a", "dir_a_prime", "dir_b", "dir_b_prime"];
    let full_angles = angle_keys.iter().all(|k| v.has(k));
    let full_dirs = dir_keys.iter().all(|k| v.has(k));
    let primes_given = v.has("theta_prime") || v.has("phi_prime");
    let dir_primes_given = v.has("dir_a_prime") || v.has("dir_b_prime");

    let sources = named.len() + usize::from(full_angles) + usize::from(full_dirs);
    if sources > 1 {
        v.error("conflicting configuration sources: give exactly one of --config-a/-b/-c, four angles, or four --dir-* vectors".into());
        return None;
    }
    if let Some(&label) = named.first() {
        return Some((ConfigSource::Named(label), ChshConfig::named(label)));
    }
    if primes_given && !full_angles {
        let missing: Vec<String> = angle_keys
            .iter()
            .filter(|k| !v.has(k))
            .map(|k| flag(k))
            .collect();
        v.error(format!(
            "incomplete angle configuration: missing {}",
            missing.join(", ")
        ));
        return None;
    }
    if dir_primes_given && !full_dirs {
        let missing: Vec<String> = dir_keys
            .iter()
            .filter(|k| !v.has(k))
            .map(|k| flag(k))
            .collect();
        v.error(format!(
            "incomplete vector configuration: missing {}",
            missing.join(", ")
        ));
        return None;
    }
    if full_angles {
        let a: Vec<Option<f64>> = angle_keys.iter().map(|k| v.get(k, parse_angle)).collect();
        let [Some(t), Some(p), Some(tp), Some(pp)] = a[..] else {
            return None;
        };
        return Some((ConfigSource::Angles, ChshConfig::planar(t, p, tp, pp)));
    }
    if full_dirs {
        let d: Vec<Option<Direction>> = dir_keys.iter().map(|k| v.get(k, parse_vector)).collect();
        let [Some(a), Some(ap), Some(b), Some(bp)] = d[..] else {
            return None;
        };
        return Some((ConfigSource::Vectors, ChshConfig::new(a, ap, b, bp)));
    }
    None
}

fn parse_pair(v: &mut Validator, have_config: bool) -> Option<(Direction, Direction)> {
    if have_config {
        return None;
    }
    if v.has("theta") || v.has("phi") {
        if !(v.has("theta") && v.has("phi")) {
            v.error("--theta and --phi must be given together".into());
            return None;
        }
        let t = v.get("theta", parse_angle)?;
        let p = v.get("phi", parse_angle)?;
        return Some((Direction::planar(t), Direction::planar(p)));
    }
    if v.has("dir_a") || v.has("dir_b") {
        if !(v.has("dir_a") && v.has("dir_b")) {
            v.error("--dir-a and --dir-b must be given together".into());
            return None;
        }
        let a = v.get("dir_a", parse_vector)?;
        let b = v.get("dir_b", parse_vector)?;
        return Some((a, b));
    }
    None
}

fn parse_rates(v: &mut Validator) -> AspectRates {
    let mut rates = if v.flag_set("ideal") {
        AspectRates::ideal()
    } else {
        AspectRates::aspect()
    };
    let unit = |s: &str| match parse_finite(s) {
        Ok(x) if (0.0..=1.0).contains(&x) => Ok(x),
        Ok(x) => Err(format!("must lie in [0, 1], got {x}")),
        Err(e) => Err(e),
    };
    let slots: [(&str, &mut f64); 5] = [
        ("eff1_plus", &mut rates.eff1_plus),
        ("eff1_minus", &mut rates.eff1_minus),
        ("eff2_plus", &mut rates.eff2_plus),
        ("eff2_minus", &mut rates.eff2_minus),
        ("angular_factor", &mut rates.angular_factor),
    ];
    for (key, slot) in slots {
        if let Some(x) = v.get(key, unit) {
            *slot = x;
        }
    }
    rates
}
