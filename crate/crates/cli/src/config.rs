use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use tomolab::gates;
use tomolab::oracle::{MeasurementMode, NoiseConfig};
use tomolab::{PureState, UnitaryMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Apst,
    Aupt,
    Nmr2q,
    Stdqpt,
    /// stdqpt and nmr2q on the same hidden channel.
    Compare,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Protocol::Apst => "apst",
            Protocol::Aupt => "aupt",
            Protocol::Nmr2q => "nmr2q",
            Protocol::Stdqpt => "stdqpt",
            Protocol::Compare => "compare",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Shots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FidelityMethod {
    /// Haar Monte Carlo, 1000 samples x 100 repetitions.
    Mc,
    /// Closed-form average gate fidelity.
    Exact,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub protocol: Protocol,
    /// Library gate (h1, h2, t1, t2, cnot12, identity), `random`, or a JSON
    /// file holding a unitary or, for apst, a state.
    #[arg(long, default_value = "random")]
    pub hidden: String,
    /// Hilbert-space dimension; inferred from gates and files.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Defaults to `shots` when --shots is given.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub shots: Option<u64>,
    /// Comma-separated key=value list, e.g. `depol=0.01,rot=0.02,spam=0`.
    #[arg(long, default_value = "")]
    pub noise: String,
    #[arg(long, env = "TOMOLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    /// Output directory for result.json and summary.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Average gate fidelity estimator for process protocols; apst always
    /// reports the exact state fidelity.
    #[arg(long, value_enum, default_value_t = FidelityMethod::Mc)]
    pub fidelity: FidelityMethod,
}

#[derive(Debug, Clone)]
pub enum HiddenSpec {
    Gate(String),
    Random,
    Unitary { label: String, unitary: UnitaryMatrix },
    State { label: String, state: PureState },
}

impl HiddenSpec {
    pub fn label(&self) -> &str {
        match self {
            HiddenSpec::Gate(name) => name,
            HiddenSpec::Random => "random",
            HiddenSpec::Unitary { label, .. } | HiddenSpec::State { label, .. } => label,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub protocol: Protocol,
    pub hidden: HiddenSpec,
    pub dim: usize,
    pub noise: NoiseConfig,
    pub mode: MeasurementMode,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub reps: usize,
    pub fidelity: FidelityMethod,
}

impl ExperimentConfig {
    pub fn from_args(args: &RunArgs) -> Result<Self> {
        let noise: NoiseConfig = args.noise.parse().context("--noise")?;
        let mode = match (args.mode, args.shots) {
            (Some(ModeArg::Exact), Some(_)) => bail!("--shots conflicts with --mode exact"),
            (Some(ModeArg::Exact), None) | (None, None) => MeasurementMode::Exact,
            (Some(ModeArg::Shots), None) => bail!("--mode shots requires --shots"),
            (_, Some(0)) => bail!("--shots must be positive"),
            (_, Some(n)) => MeasurementMode::Shots(n),
        };
        if args.reps == 0 {
            bail!("--reps must be at least 1");
        }
        let hidden = parse_hidden(&args.hidden)?;
        let inferred = match &hidden {
            HiddenSpec::Gate(_) => Some(4),
            HiddenSpec::Random => None,
            HiddenSpec::Unitary { unitary, .. } => Some(unitary.dim()),
            HiddenSpec::State { state, .. } => Some(state.dim()),
        };
        let dim = match (inferred, args.dim) {
            (Some(d), Some(given)) if d != given => {
                bail!("--dim {given} does not match the hidden object's dimension {d}")
            }
            (Some(d), _) => d,
            (None, Some(given)) => given,
            (None, None) => 4,
        };
        let config = Self {
            protocol: args.protocol,
            hidden,
            dim,
            noise,
            mode,
            seed: args.seed,
            out: args.out.clone(),
            reps: args.reps,
            fidelity: args.fidelity,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            bail!("dimension must be at least 2, got {}", self.dim);
        }
        match self.protocol {
            Protocol::Nmr2q | Protocol::Compare if self.dim != 4 => {
                bail!("{} requires dim = 4, got {}", self.protocol, self.dim)
            }
            Protocol::Stdqpt if !self.dim.is_power_of_two() || self.dim > 8 => {
                bail!("stdqpt requires dim 2, 4 or 8, got {}", self.dim)
            }
            _ => {}
        }
        if matches!(self.hidden, HiddenSpec::State { .. }) && self.protocol != Protocol::Apst {
            bail!("a hidden state is only valid for apst");
        }
        Ok(())
    }

    /// Seed of repetition `index`.
    pub fn rep_seed(&self, index: usize) -> u64 {
        self.seed.wrapping_add(index as u64)
    }

    pub fn shots(&self) -> Option<u64> {
        self.mode.shots()
    }

    pub fn mode_name(&self) -> &'static str {
        if self.mode.is_exact() {
            "exact"
        } else {
            "shots"
        }
    }
}

fn parse_hidden(s: &str) -> Result<HiddenSpec> {
    if s.eq_ignore_ascii_case("random") {
        return Ok(HiddenSpec::Random);
    }
    let path = Path::new(s);
    if path.extension().is_some_and(|e| e == "json") || path.is_file() {
        return load_hidden(path);
    }
    let name = s.to_ascii_lowercase();
    gates::by_name::<f64>(&name).with_context(|| {
        format!("--hidden '{s}' is neither a library gate ({}, identity), `random`, nor a JSON file", gates::LIBRARY_GATES.join(", "))
    })?;
    Ok(HiddenSpec::Gate(name))
}

fn load_hidden(path: &Path) -> Result<HiddenSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let label = path.file_stem().map_or_else(|| "file".into(), |s| s.to_string_lossy().into_owned());
    let value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if value.get("amplitudes").is_some() {
        let state: PureState = serde_json::from_value(value).with_context(|| format!("state in {}", path.display()))?;
        return Ok(HiddenSpec::State { label, state });
    }
    let unitary: UnitaryMatrix =
        serde_json::from_value(value).with_context(|| format!("unitary in {}", path.display()))?;
    Ok(HiddenSpec::Unitary { label, unitary })
}
