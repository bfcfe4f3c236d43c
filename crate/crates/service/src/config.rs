use std::fs::File;
use std::io::BufReader;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use chrono::Duration;
use flockwatch_core::geo::{GeoError, Registry};
use flockwatch_core::knowledge::{load_rules, RuleError, RuleSet};
use flockwatch_core::reports::{parse_iso_duration, AlertPolicy, ReportStore, StoreError};
use serde::{Deserialize, Serialize};

/// Service configuration, read from a JSON file.
///
/// Relative paths are resolved against the directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApiConfig {
    #[serde(default = "default_bind")]
    pub bind: SocketAddr,
    pub rules_path: PathBuf,
    pub region_attributes_path: PathBuf,
    /// GeoJSON FeatureCollection joined to the attribute table by `code`.
    #[serde(default)]
    pub region_geometry_path: Option<PathBuf>,
    /// Created with a header line if missing; its directory must exist.
    pub report_log_path: PathBuf,
    #[serde(default = "default_window")]
    pub warning_window: String,
    #[serde(default)]
    pub alert: AlertPolicy,
    /// Origins allowed by CORS; `"*"` allows any.
    #[serde(default)]
    pub cors_origins: Vec<String>,
}

fn default_bind() -> SocketAddr {
    SocketAddr::from(([127, 0, 0, 1], 8080))
}

fn default_window() -> String {
    "P7D".to_string()
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("`{field}` points to {path}, which does not exist")]
    MissingPath { field: &'static str, path: PathBuf },
    #[error("port must be non-zero")]
    InvalidPort,
    #[error("warning_window: {0}")]
    Window(StoreError),
    #[error("alert: {0}")]
    Policy(StoreError),
    #[error("rules {path}: {source}")]
    Rules { path: PathBuf, source: RuleError },
    #[error("regions: {0}")]
    Regions(#[from] GeoError),
    #[error("report log {path}: {source}")]
    Store { path: PathBuf, source: StoreError },
}

/// Inputs named by a config, loaded and checked.
pub(crate) struct Loaded {
    pub rules: RuleSet,
    pub registry: Registry,
    pub store: ReportStore,
    pub window: Duration,
}

impl ApiConfig {
    /// Reads `path` and resolves relative paths against its directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config: ApiConfig =
            serde_json::from_reader(BufReader::new(file)).map_err(|source| ConfigError::Parse {
                path: path.to_path_buf(),
                source,
            })?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve_against(base);
        Ok(config)
    }

    fn resolve_against(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.rules_path);
        fix(&mut self.region_attributes_path);
        if let Some(p) = self.region_geometry_path.as_mut() {
            fix(p);
        }
        fix(&mut self.report_log_path);
    }

    /// Checks the port, paths, window and alert policy without loading data.
    pub fn validate(&self) -> Result<Duration, ConfigError> {
        if self.bind.port() == 0 {
            return Err(ConfigError::InvalidPort);
        }
        let mut required = vec![
            ("rules_path", self.rules_path.as_path()),
            ("region_attributes_path", self.region_attributes_path.as_path()),
        ];
        if let Some(p) = &self.region_geometry_path {
            required.push(("region_geometry_path", p.as_path()));
        }
        let log_dir = match self.report_log_path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        required.push(("report_log_path", log_dir));
        for (field, path) in required {
            if !path.exists() {
                return Err(ConfigError::MissingPath {
                    field,
                    path: path.to_path_buf(),
                });
            }
        }
        let window = parse_iso_duration(&self.warning_window).map_err(ConfigError::Window)?;
        if window <= Duration::zero() {
            return Err(ConfigError::Window(StoreError::InvalidWindow));
        }
        self.alert.validate().map_err(ConfigError::Policy)?;
        Ok(window)
    }

    pub(crate) fn load(&self) -> Result<Loaded, ConfigError> {
        let window = self.validate()?;
        let rules_file = File::open(&self.rules_path).map_err(|e| ConfigError::Rules {
            path: self.rules_path.clone(),
            source: RuleError::Io(e),
        })?;
        let rules = load_rules(BufReader::new(rules_file)).map_err(|source| ConfigError::Rules {
            path: self.rules_path.clone(),
            source,
        })?;
        let attrs = File::open(&self.region_attributes_path).map_err(GeoError::from)?;
        let (registry, _) = match &self.region_geometry_path {
            Some(geo) => Registry::import(attrs, File::open(geo).map_err(GeoError::from)?)?,
            None => Registry::import_attributes(attrs)?,
        };
        let store = ReportStore::open(&self.report_log_path).map_err(|source| ConfigError::Store {
            path: self.report_log_path.clone(),
            source,
        })?;
        Ok(Loaded {
            rules,
            registry,
            store,
            window,
        })
    }
}
