use std::sync::Arc;

use chrono::{DateTime, Duration, Utc};
use flockwatch_core::geo::{Registry, SharedRegistry};
use flockwatch_core::knowledge::RuleSet;
use flockwatch_core::reports::{AlertPolicy, ReportStore};

use crate::config::{ApiConfig, ConfigError};

/// Source of report timestamps.
pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// A clock stuck at one instant, for tests and replays.
#[derive(Debug, Clone, Copy)]
pub struct FixedClock(pub DateTime<Utc>);

impl Clock for FixedClock {
    fn now(&self) -> DateTime<Utc> {
        self.0
    }
}

/// Everything a request handler may touch.
pub struct AppState {
    pub rules: Arc<RuleSet>,
    pub registry: SharedRegistry,
    pub store: ReportStore,
    pub policy: AlertPolicy,
    /// Window used by `/api/warnings` when the request names none.
    pub default_window: Duration,
    pub clock: Box<dyn Clock>,
}

impl AppState {
    pub fn new(rules: RuleSet, registry: Registry, store: ReportStore) -> Self {
        AppState {
            rules: Arc::new(rules),
            registry: SharedRegistry::new(registry),
            store,
            policy: AlertPolicy::default(),
            default_window: Duration::days(7),
            clock: Box::new(SystemClock),
        }
    }

    pub fn with_clock(mut self, clock: impl Clock + 'static) -> Self {
        self.clock = Box::new(clock);
        self
    }

    pub fn with_policy(mut self, policy: AlertPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_window(mut self, window: Duration) -> Self {
        self.default_window = window;
        self
    }

    /// Loads rules, regions and the report log named by `config`.
    pub fn from_config(config: &ApiConfig) -> Result<Self, ConfigError> {
        let loaded = config.load()?;
        Ok(AppState::new(loaded.rules, loaded.registry, loaded.store)
            .with_policy(config.alert.clone())
            .with_window(loaded.window))
    }
}
