use std::io;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};

use facetforge_core::Workspace;
use thiserror::Error;
use tokio::net::TcpListener;

use crate::api::{router, AppState};

pub const DEFAULT_PORT: u16 = 8080;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("port {0} is already in use")]
    PortInUse(u16),
    #[error("store {path} is unavailable: {reason}")]
    StorageUnavailable { path: PathBuf, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub port: u16,
    pub data: Option<PathBuf>,
}

/// Loads the store at `path`, or an empty workspace when the file does not
/// exist yet but its directory does.
pub fn load_store(path: &Path) -> Result<Workspace, ServeError> {
    let unavailable = |reason: String| ServeError::StorageUnavailable { path: path.to_owned(), reason };
    if path.exists() {
        return Workspace::open(path).map_err(|e| unavailable(e.to_string()));
    }
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(unavailable(format!("directory {} does not exist", dir.display())))
        }
        _ => Ok(Workspace::new()),
    }
}

pub async fn bind(port: u16) -> Result<TcpListener, ServeError> {
    TcpListener::bind(SocketAddr::from((Ipv4Addr::UNSPECIFIED, port))).await.map_err(|e| match e.kind() {
        io::ErrorKind::AddrInUse => ServeError::PortInUse(port),
        _ => ServeError::Io(e),
    })
}

pub async fn serve(config: ServeConfig) -> Result<(), ServeError> {
    let workspace = match &config.data {
        Some(p) => load_store(p)?,
        None => Workspace::new(),
    };
    let listener = bind(config.port).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    let app = router(AppState::new(workspace, config.data));
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
