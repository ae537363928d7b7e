use std::path::PathBuf;
use std::sync::Arc;

use clap::Parser;
use seiguard_core::DirStorage;
use seiguard_server::{router, Baseline, Mode, SeiGuard, ServerConfig, Spaces, UserDb};
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(version, about = "Honey-encryption login service or its bcrypt baseline")]
struct Args {
    /// TOML config file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `listen` from the config.
    #[arg(long)]
    listen: Option<std::net::SocketAddr>,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt().with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into())).init();
    let args = Args::parse();
    let mut cfg = ServerConfig::load(&args.config)?;
    if let Some(l) = args.listen {
        cfg.listen = l;
    }
    if let Some(dir) = cfg.db_path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let app = match cfg.mode {
        Mode::Seiguard => {
            let storage = Arc::new(DirStorage::new(&cfg.data_dir)?);
            let cfgs = cfg.space_configs()?;
            let spaces = tokio::task::spawn_blocking(move || Spaces::open_or_build(&cfgs, storage)).await??;
            let svc = SeiGuard::new(spaces, UserDb::open(&cfg.db_path)?)?;
            router(Arc::new(svc), cfg.timing_header)
        }
        Mode::Baseline => router(Arc::new(Baseline::open(&cfg.db_path, cfg.bcrypt_cost)?), cfg.timing_header),
    };
    let listener = tokio::net::TcpListener::bind(cfg.listen).await?;
    tracing::info!(addr = %listener.local_addr()?, mode = ?cfg.mode, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
