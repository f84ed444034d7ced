use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{Context, Result};
use dcv_core::description::load_repository;

use crate::server::{build_router, ServerOptions};

pub struct ServeConfig {
    pub port: u16,
    pub repo: std::path::PathBuf,
    pub session_ttl_secs: u64,
    pub max_upload: usize,
    pub server_deident: bool,
}

pub fn cmd_serve(config: &ServeConfig) -> Result<i32> {
    let load = load_repository(&config.repo).with_context(|| {
        format!(
            "cannot load description repository {}",
            config.repo.display()
        )
    })?;
    for warning in &load.warnings {
        eprintln!("repository warning: {warning}");
    }
    let registry = Arc::new(load.registry);

    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .context("cannot start async runtime")?;
    runtime.block_on(async {
        let router = build_router(
            registry,
            ServerOptions {
                session_ttl: Duration::from_secs(config.session_ttl_secs),
                max_upload: config.max_upload,
                server_deident: config.server_deident,
            },
        );
        let addr = SocketAddr::from(([127, 0, 0, 1], config.port));
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("cannot bind {addr}"))?;
        let local = listener.local_addr().context("listener address")?;
        println!("listening on {local}");
        axum::serve(listener, router)
            .with_graceful_shutdown(async {
                tokio::signal::ctrl_c().await.ok();
            })
            .await
            .context("server terminated")?;
        Ok(0)
    })
}
