//! Run configuration: one canonical JSON format with flag overrides.
//!
//! A run is described by a [`RunConfig`]. Values come from an optional JSON
//! file (`--config run.json`) and from individual flags; flags win field by
//! field. The resolved config is embedded in every output artifact so that
//! runs are self-describing, and [`RunConfig::canonical`] is idempotent:
//! parsing an embedded copy and canonicalizing again reproduces it exactly.
//!
//! Motifs resolve with the precedence explicit `--motif` flags, then a
//! `--collection` JSON file (`[{"motif": "(LL)", "alpha": 1.0}, ...]`), then
//! a `--motif-file` plain list (one shape text per line, `#` comments).
//! Referenced files must exist at parse time.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::motif::MotifCollection;
use crate::numeric::round_sig;
use crate::shape::Shape;
use crate::source::SourceModel;

use super::CliError;

/// Output serialization picked by `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    #[default]
    Json,
}

/// Complete description of a run; every field optional so that partial
/// configs merge with flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    /// Motif shape texts; resolution fills these in from files when empty.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub motifs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    /// Path of a collection JSON file the motifs were loaded from.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collection: Option<String>,
    /// Path of a plain motif list the motifs were loaded from.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub motif_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Poisson population rate z, replacing the fixed n.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poisson: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_height: Option<u32>,
    /// Cap on the number of cousins listed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl RunConfig {
    /// Loads a config file, rejecting unknown keys and checking that every
    /// referenced file exists.
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        config.check_referenced_files()?;
        Ok(config)
    }

    pub(super) fn check_referenced_files(&self) -> Result<(), CliError> {
        for path in [&self.collection, &self.motif_file].into_iter().flatten() {
            if !Path::new(path).exists() {
                return Err(CliError::Config(format!(
                    "referenced file not found: {path}"
                )));
            }
        }
        Ok(())
    }

    /// Field-by-field merge with `self` (the flag values) winning.
    pub fn merged_over(mut self, file: RunConfig) -> RunConfig {
        fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
            flag.or(file)
        }
        self.probs = pick(self.probs, file.probs);
        if self.motifs.is_empty() {
            self.motifs = file.motifs;
        }
        self.weights = pick(self.weights, file.weights);
        self.collection = pick(self.collection, file.collection);
        self.motif_file = pick(self.motif_file, file.motif_file);
        self.n = pick(self.n, file.n);
        self.poisson = pick(self.poisson, file.poisson);
        self.replicates = pick(self.replicates, file.replicates);
        self.seed = pick(self.seed, file.seed);
        self.tau = pick(self.tau, file.tau);
        self.m = pick(self.m, file.m);
        self.max_height = pick(self.max_height, file.max_height);
        self.count = pick(self.count, file.count);
        self.n_max = pick(self.n_max, file.n_max);
        self.k_max = pick(self.k_max, file.k_max);
        self.series_tol = pick(self.series_tol, file.series_tol);
        self.format = pick(self.format, file.format);
        self.out = pick(self.out, file.out);
        self
    }

    /// Canonical copy for embedding in outputs: probabilities at 10
    /// significant digits, other reals at 12. Idempotent.
    pub fn canonical(&self) -> RunConfig {
        let mut c = self.clone();
        if let Some(probs) = &mut c.probs {
            for p in probs {
                *p = round_sig(*p, 10);
            }
        }
        if let Some(weights) = &mut c.weights {
            for w in weights {
                *w = round_sig(*w, 12);
            }
        }
        if let Some(z) = &mut c.poisson {
            *z = round_sig(*z, 12);
        }
        if let Some(tol) = &mut c.series_tol {
            *tol = round_sig(*tol, 12);
        }
        c
    }

    /// Builds the source model from `probs`.
    pub fn source(&self) -> Result<SourceModel, CliError> {
        let probs = self
            .probs
            .clone()
            .ok_or_else(|| CliError::Config("missing --probs".into()))?;
        SourceModel::new(probs).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Resolves motif texts and weights, reading files as needed, and
    /// writes the result back into `motifs`/`weights` so the embedded
    /// config lists what actually ran.
    pub fn resolve_motifs(&mut self) -> Result<(), CliError> {
        if self.motifs.is_empty() {
            if let Some(path) = self.collection.clone() {
                let (motifs, weights) = load_collection_file(Path::new(&path))?;
                self.motifs = motifs;
                if self.weights.is_none() {
                    self.weights = Some(weights);
                }
            } else if let Some(path) = self.motif_file.clone() {
                self.motifs = load_motif_file(Path::new(&path))?;
            }
        }
        if self.motifs.is_empty() {
            return Err(CliError::Config(
                "no motifs given; use --motif, --collection, or --motif-file".into(),
            ));
        }
        let weights = match self.weights.take() {
            Some(w) if w.len() != self.motifs.len() => {
                return Err(CliError::Config(format!(
                    "{} weights for {} motifs",
                    w.len(),
                    self.motifs.len()
                )));
            }
            Some(w) => w,
            None => vec![1.0; self.motifs.len()],
        };
        self.weights = Some(weights);
        Ok(())
    }

    /// Decodes the resolved motifs against the source arity.
    pub fn collection(&self, source: &SourceModel) -> Result<MotifCollection, CliError> {
        let weights = self
            .weights
            .clone()
            .unwrap_or_else(|| vec![1.0; self.motifs.len()]);
        let mut entries = Vec::with_capacity(self.motifs.len());
        for (text, weight) in self.motifs.iter().zip(weights) {
            let shape = Shape::decode(text, source.m())
                .map_err(|e| CliError::Config(format!("motif {text:?}: {e}")))?;
            entries.push((shape, weight));
        }
        MotifCollection::new(entries).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CollectionEntry {
    motif: String,
    #[serde(default = "default_alpha")]
    alpha: f64,
}

fn default_alpha() -> f64 {
    1.0
}

fn load_collection_file(path: &Path) -> Result<(Vec<String>, Vec<f64>), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read collection {}: {e}", path.display())))?;
    let entries: Vec<CollectionEntry> = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("collection {}: {e}", path.display())))?;
    Ok(entries.into_iter().map(|e| (e.motif, e.alpha)).unzip())
}

fn load_motif_file(path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read motif file {}: {e}", path.display())))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|line| !line.is_empty() && !line.starts_with('#'))
        .map(str::to_owned)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_serialization_is_idempotent() {
        let config = RunConfig {
            probs: Some(vec![1.0 / 3.0, 2.0 / 3.0]),
            motifs: vec!["(LL)".into()],
            poisson: Some(1234.567890123456789),
            ..RunConfig::default()
        };
        let once = config.canonical();
        let json = serde_json::to_string(&once).unwrap();
        let reparsed: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(reparsed.canonical(), once);
        assert_eq!(serde_json::to_string(&reparsed.canonical()).unwrap(), json);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<RunConfig>("{\"probbs\": [0.5, 0.5]}").unwrap_err();
        assert!(err.to_string().contains("probbs"));
    }

    #[test]
    fn skipped_fields_keep_the_canonical_form_small() {
        let json = serde_json::to_string(&RunConfig::default()).unwrap();
        assert_eq!(json, "{}");
    }

    #[test]
    fn flags_win_over_file_values() {
        let flags = RunConfig {
            seed: Some(7),
            motifs: vec!["(LL)".into()],
            ..RunConfig::default()
        };
        let file = RunConfig {
            seed: Some(1),
            n: Some(100),
            motifs: vec!["((LL)L)".into()],
            ..RunConfig::default()
        };
        let merged = flags.merged_over(file);
        assert_eq!(merged.seed, Some(7));
        assert_eq!(merged.n, Some(100));
        assert_eq!(merged.motifs, vec!["(LL)".to_string()]);
    }

    #[test]
    fn motif_resolution_defaults_weights_to_one() {
        let mut config = RunConfig {
            motifs: vec!["(LL)".into(), "((LL)L)".into()],
            ..RunConfig::default()
        };
        config.resolve_motifs().unwrap();
        assert_eq!(config.weights, Some(vec![1.0, 1.0]));
    }

    #[test]
    fn weight_length_mismatch_is_a_config_error() {
        let mut config = RunConfig {
            motifs: vec!["(LL)".into()],
            weights: Some(vec![1.0, 2.0]),
            ..RunConfig::default()
        };
        let err = config.resolve_motifs().unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn collection_file_supplies_weights() {
        let dir = std::env::temp_dir().join("trie-motifs-config-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("pair.json");
        fs::write(
            &path,
            "[{\"motif\": \"(LL)\"}, {\"motif\": \"((LL)L)\", \"alpha\": -2.0}]",
        )
        .unwrap();
        let mut config = RunConfig {
            collection: Some(path.to_string_lossy().into_owned()),
            ..RunConfig::default()
        };
        config.resolve_motifs().unwrap();
        assert_eq!(
            config.motifs,
            vec!["(LL)".to_string(), "((LL)L)".to_string()]
        );
        assert_eq!(config.weights, Some(vec![1.0, -2.0]));
    }

    #[test]
    fn motif_file_skips_comments_and_blanks() {
        let dir = std::env::temp_dir().join("trie-motifs-config-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("motifs.txt");
        fs::write(&path, "# cherry first\n(LL)\n\n  ((LL)L)\n").unwrap();
        let motifs = load_motif_file(&path).unwrap();
        assert_eq!(motifs, vec!["(LL)".to_string(), "((LL)L)".to_string()]);
    }

    #[test]
    fn missing_referenced_file_fails_at_parse_time() {
        let dir = std::env::temp_dir().join("trie-motifs-config-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("dangling.json");
        fs::write(&path, "{\"collection\": \"/nonexistent/x.json\"}").unwrap();
        let err = RunConfig::load(&path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("not found"));
    }
}
