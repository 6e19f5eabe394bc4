//! Run configuration: a flat TOML file, overridable from the command line,
//! with the external solver path also taken from `GI_BACKEND_PATH`.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ilp::{
    ExternalBackend, HighsBackend, ReferenceBackend, SolverBackend, BACKEND_PATH_ENV,
};
use crate::merge::MergeStrategy;
use crate::reduction::{PartitionMethod, PartitionMode, ReductionConfig, ReductionMethod};

/// Default per-call solver time limit in seconds.
pub const DEFAULT_TIME_LIMIT: f64 = 900.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    #[default]
    Dp,
    Ilp,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Highs,
    Reference,
    External,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub solver: SolverKind,
    /// Absolute quota over the original colors (start colors included).
    /// Used only without reduction.
    pub t: Option<usize>,
    /// Quota as a fraction of all colors; ignored when `t` is set.
    pub t_frac: Option<f64>,
    /// Color reduction; `None` (written `"none"`) solves the instance as is.
    #[serde(with = "optional_method")]
    pub reduction: Option<ReductionMethod>,
    pub k: usize,
    pub r: f64,
    pub seed: u64,
    pub partition: PartitionMethod,
    #[serde(rename = "W")]
    pub parts: usize,
    pub mode: PartitionMode,
    pub merge: MergeStrategy,
    /// Seconds per solver call.
    pub time_limit: f64,
    pub threads: usize,
    pub backend: BackendKind,
    pub backend_path: Option<PathBuf>,
    /// Compute LP lower and Steiner upper bounds for the merged walk's
    /// color count.
    pub bounds: bool,
    pub color_cap: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            solver: SolverKind::Dp,
            t: None,
            t_frac: None,
            reduction: Some(ReductionMethod::Greedy),
            k: 10,
            r: 1.5,
            seed: 0,
            partition: PartitionMethod::Ordered,
            parts: 1,
            mode: PartitionMode::After,
            merge: MergeStrategy::Exact,
            time_limit: DEFAULT_TIME_LIMIT,
            threads: 1,
            backend: BackendKind::Highs,
            backend_path: None,
            bounds: false,
            color_cap: crate::dp::DEFAULT_COLOR_CAP,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Fills `backend_path` from `GI_BACKEND_PATH` when unset.
    pub fn apply_env(&mut self) {
        if self.backend_path.is_none() {
            if let Some(p) = std::env::var_os(BACKEND_PATH_ENV).filter(|p| !p.is_empty()) {
                self.backend_path = Some(p.into());
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.parts == 0 {
            return bad("W must be at least 1");
        }
        if self.reduction.is_none() && self.parts != 1 {
            return bad("partitioning into W > 1 parts requires a reduction method");
        }
        if self.reduction.is_some() && self.k == 0 {
            return bad("k must be positive");
        }
        if let Some(f) = self.t_frac {
            if !(0.0..=1.0).contains(&f) {
                return bad("t_frac must lie in [0, 1]");
            }
        }
        if self.r.is_nan() || self.r < 1.0 {
            return bad("r must be at least 1");
        }
        if self.time_limit.is_nan() || self.time_limit <= 0.0 {
            return bad("time_limit must be positive");
        }
        if self.threads == 0 {
            return bad("threads must be at least 1");
        }
        if self.backend == BackendKind::External && self.backend_path.is_none() {
            return bad("external backend needs backend_path or GI_BACKEND_PATH");
        }
        Ok(())
    }

    pub fn time_limit(&self) -> Duration {
        Duration::from_secs_f64(self.time_limit)
    }

    /// Quota over the original colors for unreduced runs; `fallback` when
    /// neither `t` nor `t_frac` is set.
    pub fn quota(&self, num_colors: usize, fallback: usize) -> usize {
        match (self.t, self.t_frac) {
            (Some(t), _) => t,
            (None, Some(f)) => (f * num_colors as f64).round() as usize,
            (None, None) => fallback,
        }
    }

    pub fn reduction_config(&self) -> Option<ReductionConfig> {
        self.reduction.map(|method| ReductionConfig {
            method,
            k: self.k,
            parts: self.parts,
            partition: self.partition,
            mode: self.mode,
            outlier_ratio: self.r,
            seed: self.seed,
        })
    }

    pub fn backend(&self) -> Result<Box<dyn SolverBackend>> {
        Ok(match self.backend {
            BackendKind::Highs => Box::new(HighsBackend),
            BackendKind::Reference => Box::new(ReferenceBackend),
            BackendKind::External => {
                let path = self.backend_path.clone().ok_or_else(|| {
                    Error::BackendUnavailable(format!("set backend_path or {BACKEND_PATH_ENV}"))
                })?;
                Box::new(ExternalBackend::new(path, ExternalBackend::default_args()))
            }
        })
    }

    /// SHA-256 over the canonical JSON form.
    pub fn hash(&self) -> String {
        hex_digest(
            serde_json::to_string(self)
                .expect("config serializes")
                .as_bytes(),
        )
    }
}

mod optional_method {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::reduction::ReductionMethod;

    #[derive(Serialize, Deserialize)]
    #[serde(rename_all = "lowercase")]
    enum Choice {
        None,
        #[serde(untagged)]
        Method(ReductionMethod),
    }

    pub fn serialize<S: Serializer>(m: &Option<ReductionMethod>, s: S) -> Result<S::Ok, S::Error> {
        match m {
            None => Choice::None,
            Some(m) => Choice::Method(*m),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Option<ReductionMethod>, D::Error> {
        Ok(match Choice::deserialize(d)? {
            Choice::None => None,
            Choice::Method(m) => Some(m),
        })
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_defaults() {
        let cfg = RunConfig::from_toml("solver = \"ilp\"\nW = 3\nmerge = \"greedy\"\n").unwrap();
        assert_eq!(cfg.solver, SolverKind::Ilp);
        assert_eq!(cfg.parts, 3);
        assert_eq!(cfg.merge, MergeStrategy::Greedy);
        assert_eq!(cfg.time_limit, DEFAULT_TIME_LIMIT);
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        assert!(RunConfig::from_toml("wat = 1").is_err());
        let none = RunConfig::from_toml("reduction = \"none\"").unwrap();
        assert_eq!(none.reduction, None);
        assert_eq!(RunConfig::from_toml(&none.to_toml()).unwrap(), none);
        let rand = RunConfig::from_toml("reduction = \"rand\"").unwrap();
        assert_eq!(rand.reduction, Some(ReductionMethod::Rand));
    }

    #[test]
    fn validation() {
        let ok = RunConfig::default();
        ok.validate().unwrap();
        let bad = RunConfig {
            reduction: None,
            parts: 2,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
        let ext = RunConfig {
            backend: BackendKind::External,
            ..RunConfig::default()
        };
        assert!(ext.validate().is_err());
    }

    #[test]
    fn quota_forms() {
        let mut cfg = RunConfig::default();
        assert_eq!(cfg.quota(40, 7), 7);
        cfg.t_frac = Some(0.25);
        assert_eq!(cfg.quota(40, 7), 10);
        cfg.t = Some(3);
        assert_eq!(cfg.quota(40, 7), 3);
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let b = RunConfig {
            seed: 1,
            ..RunConfig::default()
        };
        assert_eq!(a.hash(), RunConfig::default().hash());
        assert_ne!(a.hash(), b.hash());
    }
}
