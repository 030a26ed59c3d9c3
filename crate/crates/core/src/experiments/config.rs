//! Campaign configuration: a flat `key = value` text format whose
//! keys match the config struct fields one to one.

use std::fmt;
use std::path::PathBuf;

use crate::error::Error;
use crate::kernel::KernelSpec;
use crate::Result;

/// The Monte Carlo campaigns the runner knows how to execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CampaignKind {
    /// Long-range connectivity and chemical distance between (0,0)
    /// and (x,0), with the structure events alongside.
    Connection,
    /// Crossing probabilities of 2λ x λ rectangles (and λ x λ
    /// squares) for the field and its coarsening.
    CrossingScaling,
    /// Tail of `sup |f_eps - f|` over the unit box as epsilon varies.
    Concentration,
    /// Level-set length moments on the unit square.
    KacRiceMoments,
    /// Summed component diameters in an R x R box, checked against
    /// the boundary-length chain bound.
    SbMoments,
    /// Per-component diameter vs boundary length certificates.
    LemmaSweep,
}

impl CampaignKind {
    pub const ALL: [CampaignKind; 6] = [
        CampaignKind::Connection,
        CampaignKind::CrossingScaling,
        CampaignKind::Concentration,
        CampaignKind::KacRiceMoments,
        CampaignKind::SbMoments,
        CampaignKind::LemmaSweep,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CampaignKind::Connection => "connection",
            CampaignKind::CrossingScaling => "crossing-scaling",
            CampaignKind::Concentration => "concentration",
            CampaignKind::KacRiceMoments => "kac-rice-moments",
            CampaignKind::SbMoments => "sb-moments",
            CampaignKind::LemmaSweep => "lemma-sweep",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|k| k.as_str()).collect();
                Error::Config(format!(
                    "unknown campaign {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

impl fmt::Display for CampaignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Resolved campaign parameters.
///
/// `lambda_values` doubles as the box-size list for the moment and
/// certificate campaigns; `c1` is the threshold constant in the
/// distance event, exposed because the underlying constant is not
/// explicit; `s_values` are the tail thresholds the concentration
/// campaign reports. `max_grid_nodes` is the memory budget: a trial
/// whose grid would exceed it is recorded as aborted instead of run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub campaign: CampaignKind,
    pub kernel: KernelSpec,
    pub level: f64,
    pub delta: f64,
    pub x_values: Vec<f64>,
    pub lambda_values: Vec<f64>,
    pub epsilon_values: Vec<f64>,
    pub k_max: u32,
    pub n_trials: u64,
    pub master_seed: u64,
    pub pitch: f64,
    pub output_path: Option<PathBuf>,
    pub c1: f64,
    pub s_values: Vec<f64>,
    pub max_grid_nodes: usize,
    pub diameter_cap: usize,
}

impl ExperimentConfig {
    /// Defaults for every field except the campaign.
    pub fn new(campaign: CampaignKind) -> Self {
        ExperimentConfig {
            campaign,
            kernel: KernelSpec::bargmann_fock(),
            level: 1.0,
            delta: 0.5,
            x_values: vec![10.0, 20.0, 40.0],
            lambda_values: vec![4.0, 8.0, 16.0],
            epsilon_values: vec![0.4, 0.3, 0.2],
            k_max: 2,
            n_trials: 100,
            master_seed: 1,
            pitch: 0.05,
            output_path: None,
            c1: 3.0,
            s_values: vec![0.5],
            max_grid_nodes: 8_000_000,
            diameter_cap: 20_000,
        }
    }

    /// Parses the flat `key = value` format. Unknown keys are errors;
    /// omitted keys keep their defaults. Lists are comma-separated.
    pub fn parse(text: &str) -> Result<Self> {
        let mut campaign = None;
        let mut pending: Vec<(String, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value, got {line:?}", lineno + 1))
            })?;
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            if key == "campaign" {
                campaign = Some(CampaignKind::parse(&value)?);
            } else {
                pending.push((key, value));
            }
        }
        let campaign = campaign.ok_or_else(|| Error::Config("missing key: campaign".into()))?;
        let mut cfg = ExperimentConfig::new(campaign);
        for (key, value) in pending {
            cfg.set(&key, &value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "kernel" => {
                if value != "bargmann-fock" {
                    return Err(Error::Config(format!(
                        "kernel {value:?} is not available in config files; \
                         only bargmann-fock is"
                    )));
                }
                self.kernel = KernelSpec::bargmann_fock();
            }
            "level" => self.level = parse_num(key, value)?,
            "delta" => self.delta = parse_num(key, value)?,
            "x_values" => self.x_values = parse_list(key, value)?,
            "lambda_values" => self.lambda_values = parse_list(key, value)?,
            "epsilon_values" => self.epsilon_values = parse_list(key, value)?,
            "k_max" => self.k_max = parse_int(key, value)? as u32,
            "n_trials" => self.n_trials = parse_int(key, value)?,
            "master_seed" => self.master_seed = parse_int(key, value)?,
            "pitch" => self.pitch = parse_num(key, value)?,
            "output_path" => self.output_path = Some(PathBuf::from(value)),
            "c1" => self.c1 = parse_num(key, value)?,
            "s_values" => self.s_values = parse_list(key, value)?,
            "max_grid_nodes" => self.max_grid_nodes = parse_int(key, value)? as usize,
            "diameter_cap" => self.diameter_cap = parse_int(key, value)? as usize,
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        if !(self.pitch.is_finite() && self.pitch > 0.0) {
            return Err(Error::Config(format!("pitch must be positive, got {}", self.pitch)));
        }
        if !self.level.is_finite() || !self.delta.is_finite() {
            return Err(Error::Config("level and delta must be finite".into()));
        }
        if self.k_max + 1 > self.kernel.regularity_m {
            return Err(Error::Config(format!(
                "k_max {} exceeds the kernel regularity budget (m - 1 = {})",
                self.k_max,
                self.kernel.regularity_m - 1
            )));
        }
        if self.n_trials == 0 {
            return Err(Error::Config("n_trials must be positive".into()));
        }
        for list in [&self.x_values, &self.lambda_values, &self.epsilon_values, &self.s_values] {
            if list.is_empty() {
                return Err(Error::Config("value lists must be non-empty".into()));
            }
            if list.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                return Err(Error::Config("list values must be positive and finite".into()));
            }
        }
        for &eps in &self.epsilon_values {
            let k = (eps / self.pitch).round();
            if k < 1.0 || (eps - k * self.pitch).abs() > 1e-6 * eps {
                return Err(Error::Config(format!(
                    "epsilon {eps} is not an integer multiple of the pitch {}",
                    self.pitch
                )));
            }
        }
        if self.max_grid_nodes == 0 || self.diameter_cap == 0 {
            return Err(Error::Config("budgets must be positive".into()));
        }
        Ok(())
    }

    /// The file the campaign writes, falling back to `<campaign>.csv`.
    pub fn resolved_output(&self) -> PathBuf {
        self.output_path
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", self.campaign)))
    }

    /// Renders the resolved config back in the flat format, one key
    /// per line in a fixed order; used for the report sidecar.
    pub fn render(&self) -> String {
        let list = |v: &[f64]| {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        };
        let mut out = String::new();
        out.push_str(&format!("campaign = {}\n", self.campaign));
        out.push_str("kernel = bargmann-fock\n");
        out.push_str(&format!("level = {}\n", self.level));
        out.push_str(&format!("delta = {}\n", self.delta));
        out.push_str(&format!("x_values = {}\n", list(&self.x_values)));
        out.push_str(&format!("lambda_values = {}\n", list(&self.lambda_values)));
        out.push_str(&format!("epsilon_values = {}\n", list(&self.epsilon_values)));
        out.push_str(&format!("k_max = {}\n", self.k_max));
        out.push_str(&format!("n_trials = {}\n", self.n_trials));
        out.push_str(&format!("master_seed = {}\n", self.master_seed));
        out.push_str(&format!("pitch = {}\n", self.pitch));
        out.push_str(&format!(
            "output_path = {}\n",
            self.resolved_output().display()
        ));
        out.push_str(&format!("c1 = {}\n", self.c1));
        out.push_str(&format!("s_values = {}\n", list(&self.s_values)));
        out.push_str(&format!("max_grid_nodes = {}\n", self.max_grid_nodes));
        out.push_str(&format!("diameter_cap = {}\n", self.diameter_cap));
        out
    }
}

fn parse_num(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("key {key}: expected a number, got {value:?}")))
}

fn parse_int(key: &str, value: &str) -> Result<u64> {
    value
        .parse::<u64>()
        .map_err(|_| Error::Config(format!("key {key}: expected an integer, got {value:?}")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|part| parse_num(key, part.trim())).collect()
}
