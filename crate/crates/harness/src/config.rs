//! Experiment configuration, read from TOML.
//!
//! ```toml
//! seed = 7
//! methods = ["le", "gf", "hope", "sdne", "pa", "cn", "aa", "jc"]
//! dimensions = [16, 32, 64, 128]
//!
//! [corpus]
//! manifest = "corpus/manifest.toml"   # or an inline [corpus.plan]
//!
//! [params.sdne]
//! epochs = 100
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gembench_core::embeddings::{Decoder, EmbeddingMethod, MethodParams};
use gembench_core::evaluation::{MapMode, DEFAULT_BASELINE_TRIALS, DEFAULT_K};
use gembench_core::generators::DomainPlan;
use gembench_core::heuristics::HeuristicKind;
use gembench_core::split::DEFAULT_HIDE_FRACTION;
use serde::{Deserialize, Serialize};

use crate::error::{read_to_string, HarnessError, Result};

/// A predictor the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MethodId {
    Embedding(EmbeddingMethod),
    Heuristic(HeuristicKind),
}

impl MethodId {
    pub fn name(self) -> &'static str {
        match self {
            MethodId::Embedding(m) => m.name(),
            MethodId::Heuristic(h) => h.name(),
        }
    }

    /// The four embeddings and the four neighborhood heuristics.
    pub fn defaults() -> Vec<MethodId> {
        let mut out: Vec<MethodId> = EmbeddingMethod::ALL.into_iter().map(MethodId::Embedding).collect();
        out.extend(
            HeuristicKind::ALL
                .into_iter()
                .filter(|&h| h != HeuristicKind::Random)
                .map(MethodId::Heuristic),
        );
        out
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        if let Ok(m) = s.parse::<EmbeddingMethod>() {
            return Ok(MethodId::Embedding(m));
        }
        if let Ok(h) = s.parse::<HeuristicKind>() {
            return Ok(MethodId::Heuristic(h));
        }
        Err(HarnessError::Config(format!(
            "unknown method `{s}` (expected one of le, gf, hope, sdne, pa, cn, aa, jc, random)"
        )))
    }
}

impl TryFrom<String> for MethodId {
    type Error = HarnessError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MethodId> for String {
    fn from(m: MethodId) -> String {
        m.name().to_string()
    }
}

/// Where the graphs come from: a manifest written by `generate`/`ingest`, or
/// a synthetic plan generated in memory.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSource {
    pub manifest: Option<PathBuf>,
    pub plan: Option<DomainPlan>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub corpus: CorpusSource,
    pub methods: Vec<MethodId>,
    pub dimensions: Vec<usize>,
    pub size_bins: Vec<usize>,
    pub degree_bins: Vec<f64>,
    /// Average-degree window for graphs in the size panels.
    pub size_panel_degree_range: [f64; 2],
    pub hide_fraction: f64,
    pub preserve_connectivity: bool,
    pub trials: usize,
    /// `k` of P@k.
    pub k: usize,
    pub map_mode: MapMode,
    /// Shuffles behind the Monte Carlo MAP baseline.
    pub baseline_trials: usize,
    pub output_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub params: MethodParams,
    /// Per-method decoder overrides, keyed by method name.
    pub decoders: BTreeMap<String, Decoder>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            corpus: CorpusSource::default(),
            methods: MethodId::defaults(),
            dimensions: vec![16, 32, 64, 128],
            size_bins: vec![256, 512, 1024],
            degree_bins: vec![3.0, 4.0, 5.0],
            size_panel_degree_range: [3.0, 5.0],
            hide_fraction: DEFAULT_HIDE_FRACTION,
            preserve_connectivity: true,
            trials: 1,
            k: DEFAULT_K,
            map_mode: MapMode::AllNodes,
            baseline_trials: DEFAULT_BASELINE_TRIALS,
            output_dir: None,
            workers: None,
            params: MethodParams::default(),
            decoders: BTreeMap::new(),
        }
    }
}

impl ExperimentConfig {
    /// Parses a config file; a relative manifest path is resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_to_string(path)?;
        let mut config: ExperimentConfig = toml::from_str(&text).map_err(|e| HarnessError::toml(path, e))?;
        if let Some(m) = &config.corpus.manifest {
            if m.is_relative() {
                let base = path.parent().unwrap_or(Path::new(""));
                config.corpus.manifest = Some(base.join(m));
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        match (&self.corpus.manifest, &self.corpus.plan) {
            (Some(_), Some(_)) => return bad("corpus takes either a manifest or a plan, not both".into()),
            (None, None) => return bad("corpus needs a manifest or a plan".into()),
            _ => {}
        }
        if self.methods.is_empty() {
            return bad("at least one method is required".into());
        }
        if self.dimensions.is_empty() {
            return bad("at least one dimension is required".into());
        }
        if let Some(d) = self.dimensions.iter().find(|d| !d.is_power_of_two()) {
            return bad(format!("dimension {d} is not a power of two"));
        }
        if self.trials == 0 || self.baseline_trials == 0 {
            return bad("trials and baseline_trials must be at least 1".into());
        }
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.hide_fraction) {
            return bad(format!("hide_fraction {} must lie in [0, 1)", self.hide_fraction));
        }
        if self.size_bins.is_empty() || self.degree_bins.is_empty() {
            return bad("size_bins and degree_bins must not be empty".into());
        }
        let [lo, hi] = self.size_panel_degree_range;
        if lo > hi {
            return bad(format!("size_panel_degree_range [{lo}, {hi}] is reversed"));
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        for (name, decoder) in &self.decoders {
            let method: EmbeddingMethod = name
                .parse()
                .map_err(|_| HarnessError::Config(format!("decoder override for unknown embedding `{name}`")))?;
            if *decoder == Decoder::Reconstruction && method != EmbeddingMethod::Sdne {
                return bad(format!("{name} has no reconstruction decoder"));
            }
        }
        self.params.validate()?;
        Ok(())
    }

    pub fn decoder_for(&self, method: EmbeddingMethod) -> Decoder {
        self.decoders
            .get(method.name())
            .copied()
            .unwrap_or_else(|| method.default_decoder())
    }
}
