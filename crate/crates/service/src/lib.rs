//! HTTP/JSON front end for consultations, regions and warning levels.
//!
//! Every handler reads immutable snapshots (rules, registry, report log), so
//! requests run in parallel; only report appends go through the store's
//! single writer.

mod config;
mod error;
mod routes;
mod state;

pub use config::{ApiConfig, ConfigError};
pub use error::ApiError;
pub use routes::{router, router_with_cors, ConsultationRequest, ConsultationResponse, SymptomView};
pub use state::{AppState, Clock, FixedClock, SystemClock};

use std::net::SocketAddr;
use std::sync::Arc;

use tokio::net::TcpListener;

/// Serves on an already bound listener until `shutdown` resolves.
pub async fn serve<F>(
    state: Arc<AppState>,
    listener: TcpListener,
    cors_origins: &[String],
    shutdown: F,
) -> std::io::Result<()>
where
    F: std::future::Future<Output = ()> + Send + 'static,
{
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router_with_cors(state, cors_origins))
        .with_graceful_shutdown(shutdown)
        .await
}

/// Binds `addr`; separated from [`serve`] so callers can report the port.
pub async fn bind(addr: SocketAddr) -> std::io::Result<TcpListener> {
    TcpListener::bind(addr).await
}
