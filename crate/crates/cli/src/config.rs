//! Resolved run configuration: CLI flags override the optional TOML config
//! file, which overrides the built-in defaults. The resolved form is written
//! as `run_config` into every output directory, and a run is reproducible
//! from that file alone.

use std::path::Path;

use chatgraph::evaluate::FoldPlan;
use chatgraph::learn::{Gamma, SvmParams};
use chatgraph::netextract::ExtractionConfig;
use chatgraph::synth::SynthConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub svg: Option<bool>,
    pub log: Option<String>,
    pub targets: Option<String>,
    pub features: Option<String>,
    pub synth: Option<bool>,
    pub context: Option<usize>,
    pub window: Option<usize>,
    pub c: Option<f64>,
    pub gamma: Option<String>,
    pub runs: Option<usize>,
    pub train_fraction: Option<f64>,
    pub repeats: Option<usize>,
    pub users: Option<usize>,
    pub messages: Option<usize>,
    pub channels: Option<usize>,
    pub abuse_rate: Option<f64>,
    pub pile_on: Option<f64>,
    pub mention_rate: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, chatgraph::Error> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text)
            .map_err(|e| chatgraph::Error::InvalidParameter(format!("config file: {e}")))
    }
}

/// Every knob of a run, fully resolved. Input paths and the synth switch
/// are recorded too, so a run is reproducible from this file alone (toml
/// skips the path fields when they played no part).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub jobs: usize,
    pub svg: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub targets: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub features: Option<String>,
    pub synth: bool,
    pub context: usize,
    pub window: usize,
    pub c: f64,
    pub gamma: String,
    pub runs: usize,
    pub train_fraction: f64,
    pub repeats: usize,
    pub users: usize,
    pub messages: usize,
    pub channels: usize,
    pub abuse_rate: f64,
    pub pile_on: f64,
    pub mention_rate: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let extraction = ExtractionConfig::default();
        let svm = SvmParams::default();
        let plan = FoldPlan::default();
        let synth = SynthConfig::default();
        RunConfig {
            seed: 7,
            jobs: 0,
            svg: false,
            log: None,
            targets: None,
            features: None,
            synth: false,
            context: extraction.context_half_width,
            window: extraction.window_size,
            c: svm.c,
            gamma: "auto".to_string(),
            runs: plan.n_runs,
            train_fraction: plan.train_fraction,
            repeats: 5,
            users: synth.n_users,
            messages: synth.n_messages,
            channels: synth.n_channels,
            abuse_rate: synth.abuse_rate,
            pile_on: synth.pile_on_intensity,
            mention_rate: synth.mention_rate,
        }
    }
}

impl RunConfig {
    pub fn extraction(&self) -> ExtractionConfig {
        ExtractionConfig {
            context_half_width: self.context,
            window_size: self.window,
        }
    }

    pub fn svm_params(&self) -> Result<SvmParams, chatgraph::Error> {
        Ok(SvmParams {
            c: self.c,
            gamma: parse_gamma(&self.gamma)?,
            seed: self.seed,
        })
    }

    pub fn fold_plan(&self) -> FoldPlan {
        FoldPlan {
            n_runs: self.runs,
            train_fraction: self.train_fraction,
            seed: self.seed,
        }
    }

    pub fn synth_config(&self) -> SynthConfig {
        SynthConfig {
            n_users: self.users,
            n_messages: self.messages,
            n_channels: self.channels,
            abuse_rate: self.abuse_rate,
            pile_on_intensity: self.pile_on,
            mention_rate: self.mention_rate,
            seed: self.seed,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }
}

pub fn parse_gamma(text: &str) -> Result<Gamma, chatgraph::Error> {
    if text.eq_ignore_ascii_case("auto") {
        Ok(Gamma::Auto)
    } else {
        text.parse::<f64>().map(Gamma::Fixed).map_err(|_| {
            chatgraph::Error::InvalidParameter(format!(
                "gamma must be 'auto' or a number, got '{text}'"
            ))
        })
    }
}

/// flag > file > default
pub fn pick<T: Clone>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
