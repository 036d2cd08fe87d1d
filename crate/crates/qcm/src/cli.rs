//! Argument parsing, the optional `key = value` config file, and resolution
//! of both into a [`RunConfig`].

use std::collections::BTreeMap;
use std::fmt::Display;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcm_core::protocols::CouplingScheme;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "qcm",
    version,
    about = "Multiqubit-cavity machine: W states, anti-cloning, conditional decay"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cross-check closed forms against the numerical oracles.
    Check(RawOptions),
    /// One-step W-state generation table.
    Wstate(RawOptions),
    /// Anti-cloning fidelities versus qubit number.
    Anticlone(RawOptions),
    /// Decohered fidelity and no-click probability versus qubit number.
    Decoherence(RawOptions),
    /// Sweep of the coupling ratio at fixed M, with located optima.
    Scan(RawOptions),
}

impl Command {
    pub fn split(self) -> (CommandKind, RawOptions) {
        match self {
            Command::Check(o) => (CommandKind::Check, o),
            Command::Wstate(o) => (CommandKind::Wstate, o),
            Command::Anticlone(o) => (CommandKind::Anticlone, o),
            Command::Decoherence(o) => (CommandKind::Decoherence, o),
            Command::Scan(o) => (CommandKind::Scan, o),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Check,
    Wstate,
    Anticlone,
    Decoherence,
    Scan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    #[value(name = "identical")]
    Identical,
    #[value(name = "w_plus")]
    WPlus,
    #[value(name = "w_minus")]
    WMinus,
    #[value(name = "w_prime")]
    WPrime,
}

impl From<SchemeArg> for CouplingScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Identical => CouplingScheme::Identical,
            SchemeArg::WPlus => CouplingScheme::WPlus,
            SchemeArg::WMinus => CouplingScheme::WMinus,
            SchemeArg::WPrime => CouplingScheme::WPrime,
        }
    }
}

/// Inclusive qubit-count range written `A:B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MRange(pub RangeInclusive<usize>);

impl FromStr for MRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("expected A:B, got `{s}`"))?;
        let a: usize = a
            .trim()
            .parse()
            .map_err(|e| format!("bad range start `{a}`: {e}"))?;
        let b: usize = b
            .trim()
            .parse()
            .map_err(|e| format!("bad range end `{b}`: {e}"))?;
        if a > b {
            return Err(format!("empty range {a}:{b}"));
        }
        Ok(MRange(a..=b))
    }
}

/// Linear grid of coupling ratios written `START:STOP:COUNT`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl RGrid {
    pub fn points(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => {
                let step = (self.stop - self.start) / (n - 1) as f64;
                (0..n).map(|i| self.start + step * i as f64).collect()
            }
        }
    }
}

impl FromStr for RGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [start, stop, count] = parts[..] else {
            return Err(format!("expected START:STOP:COUNT, got `{s}`"));
        };
        let start: f64 = start
            .parse()
            .map_err(|e| format!("bad grid start `{start}`: {e}"))?;
        let stop: f64 = stop
            .parse()
            .map_err(|e| format!("bad grid stop `{stop}`: {e}"))?;
        let count: usize = count
            .parse()
            .map_err(|e| format!("bad grid count `{count}`: {e}"))?;
        if !(start.is_finite() && stop.is_finite() && start > 0.0 && stop >= start) {
            return Err(format!("grid needs 0 < START <= STOP, got {start}:{stop}"));
        }
        Ok(RGrid { start, stop, count })
    }
}

/// Options as typed on the command line; everything optional so a config
/// file can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct RawOptions {
    /// Number of qubits.
    #[arg(long, conflicts_with = "m_range")]
    pub m: Option<usize>,
    /// Inclusive range of qubit numbers, `A:B`.
    #[arg(long, value_name = "A:B")]
    pub m_range: Option<MRange>,
    #[arg(long)]
    pub scheme: Option<SchemeArg>,
    /// Explicit coupling ratio r = γ1/γ (custom scheme).
    #[arg(long, conflicts_with = "scheme")]
    pub r: Option<f64>,
    /// Qubit dipole decay rate Γ, units of γ.
    #[arg(long)]
    pub gamma_decay: Option<f64>,
    /// Cavity decay rate κ, units of γ.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Phase of the input qubit.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Odd trapping order.
    #[arg(long)]
    pub m_odd: Option<u32>,
    #[arg(long)]
    pub format: Option<Format>,
    /// Output file (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Randomized instances per check suite.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Coupling-ratio grid for `scan`, `START:STOP:COUNT`.
    #[arg(long, value_name = "START:STOP:COUNT")]
    pub r_grid: Option<RGrid>,
    /// Optional `key = value` file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Flip the sign of one qubit-qubit entry of the closed-form propagator.
    #[arg(long, hide = true)]
    pub inject_sign_flip: bool,
}

/// Parses `key = value` lines. `#` starts a comment; keys may use `-` or `_`.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!(
                "config line {}: expected `key = value`",
                lineno + 1
            ))
        })?;
        out.insert(k.trim().replace('_', "-"), v.trim().to_owned());
    }
    Ok(out)
}

const FILE_KEYS: &[&str] = &[
    "m",
    "m-range",
    "scheme",
    "r",
    "gamma-decay",
    "kappa",
    "alpha",
    "m-odd",
    "format",
    "out",
    "trials",
    "seed",
    "r-grid",
];

fn fill<T>(slot: &mut Option<T>, file: &BTreeMap<String, String>, key: &str) -> Result<(), CliError>
where
    T: FromStr,
    T::Err: Display,
{
    if slot.is_none() {
        if let Some(v) = file.get(key) {
            let parsed = v
                .parse()
                .map_err(|e| CliError::Config(format!("config key `{key}`: {e}")))?;
            *slot = Some(parsed);
        }
    }
    Ok(())
}

fn fill_enum<T: ValueEnum>(
    slot: &mut Option<T>,
    file: &BTreeMap<String, String>,
    key: &str,
) -> Result<(), CliError> {
    if slot.is_none() {
        if let Some(v) = file.get(key) {
            let parsed = T::from_str(v, false)
                .map_err(|e| CliError::Config(format!("config key `{key}`: {e}")))?;
            *slot = Some(parsed);
        }
    }
    Ok(())
}

impl RawOptions {
    /// Fills every option not given on the command line from `file`.
    pub fn merge_file(mut self, file: &BTreeMap<String, String>) -> Result<Self, CliError> {
        if let Some(bad) = file.keys().find(|k| !FILE_KEYS.contains(&k.as_str())) {
            return Err(CliError::Config(format!("unknown config key `{bad}`")));
        }
        // a range or an explicit ratio on the command line shadows the file's
        // alternative spelling
        let cli_has_m = self.m.is_some() || self.m_range.is_some();
        let cli_has_scheme = self.scheme.is_some() || self.r.is_some();
        if !cli_has_m {
            fill(&mut self.m, file, "m")?;
            fill(&mut self.m_range, file, "m-range")?;
        }
        if !cli_has_scheme {
            fill_enum(&mut self.scheme, file, "scheme")?;
            fill(&mut self.r, file, "r")?;
        }
        fill(&mut self.gamma_decay, file, "gamma-decay")?;
        fill(&mut self.kappa, file, "kappa")?;
        fill(&mut self.alpha, file, "alpha")?;
        fill(&mut self.m_odd, file, "m-odd")?;
        fill_enum(&mut self.format, file, "format")?;
        fill(&mut self.out, file, "out")?;
        fill(&mut self.trials, file, "trials")?;
        fill(&mut self.seed, file, "seed")?;
        fill(&mut self.r_grid, file, "r-grid")?;
        Ok(self)
    }
}

/// Fully resolved run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub ms: Option<RangeInclusive<usize>>,
    pub scheme: Option<CouplingScheme>,
    pub gamma_decay: Option<f64>,
    pub kappa: Option<f64>,
    pub alpha: f64,
    pub m_odd: u32,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub trials: usize,
    pub seed: u64,
    pub r_grid: Option<RGrid>,
    pub inject_sign_flip: bool,
}

impl RunConfig {
    pub fn resolve(command: CommandKind, raw: RawOptions) -> Result<Self, CliError> {
        let raw = match &raw.config {
            Some(path) => {
                let file = load_config(path)?;
                raw.merge_file(&file)?
            }
            None => raw,
        };
        if raw.m.is_some() && raw.m_range.is_some() {
            return Err(CliError::Config(
                "give either m or m-range, not both".into(),
            ));
        }
        if raw.scheme.is_some() && raw.r.is_some() {
            return Err(CliError::Config("give either scheme or r, not both".into()));
        }
        let ms = match (raw.m, raw.m_range) {
            (Some(m), _) => Some(m..=m),
            (None, Some(MRange(range))) => Some(range),
            (None, None) => None,
        };
        let scheme = match (raw.scheme, raw.r) {
            (Some(s), _) => Some(s.into()),
            (None, Some(r)) => Some(CouplingScheme::Custom(r)),
            (None, None) => None,
        };
        let m_odd = raw.m_odd.unwrap_or(1);
        if m_odd % 2 == 0 {
            return Err(CliError::Config(format!(
                "m-odd must be odd and positive, got {m_odd}"
            )));
        }
        Ok(Self {
            command,
            ms,
            scheme,
            gamma_decay: raw.gamma_decay,
            kappa: raw.kappa,
            alpha: raw.alpha.unwrap_or(0.0),
            m_odd,
            format: raw.format.unwrap_or_default(),
            out: raw.out,
            trials: raw.trials.unwrap_or(200),
            seed: raw.seed.unwrap_or(42),
            r_grid: raw.r_grid,
            inject_sign_flip: raw.inject_sign_flip,
        })
    }
}

fn load_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_file(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> (CommandKind, RawOptions) {
        let mut full = vec!["qcm"];
        full.extend_from_slice(args);
        Cli::try_parse_from(full).unwrap().command.split()
    }

    #[test]
    fn ranges_and_grids() {
        assert_eq!("2:20".parse::<MRange>().unwrap(), MRange(2..=20));
        assert!("5:2".parse::<MRange>().is_err());
        assert!("5".parse::<MRange>().is_err());
        let g: RGrid = "0.5:2.5:5".parse().unwrap();
        assert_eq!(g.points(), vec![0.5, 1.0, 1.5, 2.0, 2.5]);
        let empty: RGrid = "1:2:0".parse().unwrap();
        assert!(empty.points().is_empty());
        assert!("0:2:3".parse::<RGrid>().is_err());
        assert!("1:2".parse::<RGrid>().is_err());
    }

    #[test]
    fn defaults() {
        let (kind, raw) = parse(&["check"]);
        let cfg = RunConfig::resolve(kind, raw).unwrap();
        assert_eq!(cfg.trials, 200);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.m_odd, 1);
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.ms, None);
    }

    #[test]
    fn scheme_names_use_underscores() {
        let (_, raw) = parse(&["wstate", "--m", "4", "--scheme", "w_plus"]);
        assert_eq!(raw.scheme, Some(SchemeArg::WPlus));
        assert!(Cli::try_parse_from(["qcm", "wstate", "--scheme", "w-plus"]).is_err());
        assert!(Cli::try_parse_from(["qcm", "wstate", "--scheme", "w_plus", "--r", "2"]).is_err());
    }

    #[test]
    fn config_file_fills_missing_flags_only() {
        let file = parse_config_file(
            "# comment\nm_range = 2:5\nscheme = w_prime\nkappa = 0.5  # trailing\nseed=7\n",
        )
        .unwrap();
        let (kind, raw) = parse(&["decoherence", "--kappa", "0.1"]);
        let cfg = RunConfig::resolve(kind, raw.merge_file(&file).unwrap()).unwrap();
        assert_eq!(cfg.ms, Some(2..=5));
        assert_eq!(cfg.scheme, Some(CouplingScheme::WPrime));
        assert_eq!(cfg.kappa, Some(0.1));
        assert_eq!(cfg.seed, 7);

        // --m on the command line shadows m-range from the file
        let (kind, raw) = parse(&["decoherence", "--m", "3", "--r", "1.5"]);
        let cfg = RunConfig::resolve(kind, raw.merge_file(&file).unwrap()).unwrap();
        assert_eq!(cfg.ms, Some(3..=3));
        assert_eq!(cfg.scheme, Some(CouplingScheme::Custom(1.5)));
    }

    #[test]
    fn config_file_errors() {
        assert!(matches!(
            parse_config_file("novalue"),
            Err(CliError::Config(_))
        ));
        let file = parse_config_file("colour = blue").unwrap();
        assert!(matches!(
            RawOptions::default().merge_file(&file),
            Err(CliError::Config(_))
        ));
        let file = parse_config_file("format = xml").unwrap();
        assert!(matches!(
            RawOptions::default().merge_file(&file),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn even_trapping_order_rejected() {
        let (kind, raw) = parse(&["wstate", "--m-odd", "2"]);
        assert!(matches!(
            RunConfig::resolve(kind, raw),
            Err(CliError::Config(_))
        ));
    }
}
