//! `flockwatch`: offline diagnosis, reference replay, rule and region checks,
//! and the HTTP service.
//!
//! Exit codes: 0 success, 1 runtime failure or reference mismatch, 2 bad
//! input, 3 domain error (total conflict).

mod render;

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use flockwatch_core::geo::{GeoError, RegionCode, Registry};
use flockwatch_core::knowledge::{
    default_rules, diagnose, load_rules, validate_rules, walkthrough, DiagnoseError, RuleSet, Severity,
};
use flockwatch_service::{ApiConfig, AppState};

use render::Style;

#[derive(Parser)]
#[command(
    name = "flockwatch",
    version,
    about = "Poultry disease early warning from symptom evidence"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Diagnose a symptom selection offline.
    Diagnose {
        /// Rule file; the bundled avian rules when omitted.
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Comma-separated symptom ids.
        #[arg(long, value_delimiter = ',', required = true)]
        symptoms: Vec<String>,
        /// Region code to echo with the result (syntax checked only).
        #[arg(long)]
        region: Option<String>,
        /// Print the diagnosis as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Replay the five-symptom reference consultation against the published tables.
    PaperExample {
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Run the HTTP/JSON service.
    Serve {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the port from the config file.
        #[arg(long)]
        port: Option<u16>,
    },
    /// Import a region attribute table and optional GeoJSON and report the result.
    ImportGeo {
        #[arg(long)]
        attrs: PathBuf,
        #[arg(long)]
        geo: Option<PathBuf>,
    },
    /// Rule file utilities.
    Rules {
        #[command(subcommand)]
        action: RulesAction,
    },
}

#[derive(Subcommand)]
enum RulesAction {
    /// Load a rule file and lint it.
    Validate { path: PathBuf },
}

/// A failed command: message for stderr and the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<DiagnoseError> for Failure {
    fn from(e: DiagnoseError) -> Self {
        let code = match e {
            DiagnoseError::TotalConflict { .. } => 3,
            DiagnoseError::Evidence(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let style = Style::detect();
    let result = match cli.command {
        Command::Diagnose {
            rules,
            symptoms,
            region,
            json,
        } => run_diagnose(rules.as_deref(), &symptoms, region.as_deref(), json, style),
        Command::PaperExample { rules, json } => run_paper_example(rules.as_deref(), json, style),
        Command::Serve { config, port } => run_serve(&config, port),
        Command::ImportGeo { attrs, geo } => run_import(&attrs, geo.as_deref()),
        Command::Rules {
            action: RulesAction::Validate { path },
        } => run_validate(&path),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_rules(path: Option<&Path>) -> Result<RuleSet, Failure> {
    let Some(path) = path else {
        return Ok(default_rules());
    };
    let file = File::open(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    load_rules(BufReader::new(file)).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::runtime(e.to_string()))
}

fn run_diagnose(
    rules: Option<&Path>,
    symptoms: &[String],
    region: Option<&str>,
    json: bool,
    style: Style,
) -> Result<u8, Failure> {
    let rules = read_rules(rules)?;
    let region = region
        .map(RegionCode::parse)
        .transpose()
        .map_err(|e| Failure::input(e.to_string()))?;
    let ids: Vec<&str> = symptoms
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .collect();
    let d = diagnose(&rules, &ids)?;
    if json {
        println!("{}", to_json(&d)?);
    } else {
        print!("{}", render::diagnosis(&d, region.as_ref(), style));
    }
    Ok(0)
}

fn run_paper_example(rules: Option<&Path>, json: bool, style: Style) -> Result<u8, Failure> {
    let rules = read_rules(rules)?;
    let steps = walkthrough::replay(&rules)?;
    let passed = steps.iter().all(|s| s.passed());
    if json {
        println!("{}", to_json(&steps)?);
    } else {
        print!("{}", render::walkthrough(&steps, style));
    }
    Ok(if passed { 0 } else { 1 })
}

fn run_import(attrs: &Path, geo: Option<&Path>) -> Result<u8, Failure> {
    let open = |p: &Path| File::open(p).map_err(|e| Failure::input(format!("{}: {e}", p.display())));
    let bad = |e: GeoError| Failure::input(e.to_string());
    let attrs_file = open(attrs)?;
    let (registry, summary) = match geo {
        Some(g) => Registry::import(BufReader::new(attrs_file), BufReader::new(open(g)?)).map_err(bad)?,
        None => Registry::import_attributes(BufReader::new(attrs_file)).map_err(bad)?,
    };
    println!("{} regions imported", summary.imported);
    if geo.is_some() {
        println!("{} with geometry", summary.with_geometry);
    }
    for code in &summary.orphan_features {
        eprintln!("warning: feature `{code}` has no attribute row and was skipped");
    }
    if let Some(extent) = registry.extent() {
        println!(
            "extent: {:.4},{:.4} .. {:.4},{:.4}",
            extent.min_lon, extent.min_lat, extent.max_lon, extent.max_lat
        );
    }
    Ok(0)
}

fn run_validate(path: &Path) -> Result<u8, Failure> {
    let rules = read_rules(Some(path))?;
    for f in validate_rules(&rules) {
        let tag = match f.severity {
            Severity::Info => "info",
            Severity::Warning => "warning",
        };
        println!("{tag}: {}: {}", f.subject, f.message);
    }
    println!("ok");
    Ok(0)
}

fn run_serve(config: &Path, port: Option<u16>) -> Result<u8, Failure> {
    let mut config = ApiConfig::from_file(config).map_err(|e| Failure::input(e.to_string()))?;
    if let Some(port) = port {
        config.bind.set_port(port);
    }
    let state = AppState::from_config(&config).map_err(|e| Failure::input(e.to_string()))?;
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info,tower_http=info")),
        )
        .with_writer(std::io::stderr)
        .init();

    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::runtime(e.to_string()))?;
    runtime.block_on(async {
        let listener = flockwatch_service::bind(config.bind)
            .await
            .map_err(|e| Failure::runtime(format!("cannot bind {}: {e}", config.bind)))?;
        let addr = listener
            .local_addr()
            .map_err(|e| Failure::runtime(e.to_string()))?;
        println!("listening on http://{addr}");
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        flockwatch_service::serve(Arc::new(state), listener, &config.cors_origins, shutdown)
            .await
            .map_err(|e| Failure::runtime(e.to_string()))
    })?;
    Ok(0)
}
