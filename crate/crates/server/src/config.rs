//! Server config (TOML). Relative paths resolve against the config file.
//!
//! ```toml
//! mode = "seiguard"          # or "baseline"
//! listen = "127.0.0.1:8080"
//! db_path = "seiguard.db"
//! data_dir = "maps"
//! timing_header = true
//! bcrypt_cost = 4            # baseline only
//!
//! [spaces]
//! phone = "spaces/phone.cfg"
//! id_number = "spaces/id.cfg"
//! email = "spaces/email.cfg"
//! firstname = "spaces/firstname.cfg"
//! lastname = "spaces/lastname.cfg"
//!
//! [email]                    # optional overrides of the email space config
//! seed_unit = 10
//! seed_block = 10
//! bootstrap = 10000
//! ```

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use seiguard_core::SpaceConfig;

use crate::error::{Result, ServiceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Seiguard,
    Baseline,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SpacePaths {
    pub phone: PathBuf,
    pub id_number: PathBuf,
    pub email: PathBuf,
    pub firstname: PathBuf,
    pub lastname: PathBuf,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
pub struct EmailOverrides {
    pub seed_unit: Option<u64>,
    pub seed_block: Option<u64>,
    pub bootstrap: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerConfig {
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_listen")]
    pub listen: SocketAddr,
    pub db_path: PathBuf,
    #[serde(default = "default_data_dir")]
    pub data_dir: PathBuf,
    #[serde(default)]
    pub timing_header: bool,
    #[serde(default = "default_cost")]
    pub bcrypt_cost: u32,
    pub spaces: Option<SpacePaths>,
    #[serde(default)]
    pub email: EmailOverrides,
}

fn default_listen() -> SocketAddr {
    "127.0.0.1:8080".parse().unwrap()
}

fn default_data_dir() -> PathBuf {
    PathBuf::from("maps")
}

fn default_cost() -> u32 {
    4
}

/// The five field spaces.
#[derive(Debug, Clone)]
pub struct SpaceConfigs {
    pub phone: SpaceConfig,
    pub id_number: SpaceConfig,
    pub email: SpaceConfig,
    pub firstname: SpaceConfig,
    pub lastname: SpaceConfig,
}

impl SpaceConfigs {
    pub fn load(paths: &SpacePaths) -> Result<Self> {
        let load = |p: &Path| SpaceConfig::load(p).map_err(ServiceError::from);
        Ok(SpaceConfigs {
            phone: load(&paths.phone)?,
            id_number: load(&paths.id_number)?,
            email: load(&paths.email)?,
            firstname: load(&paths.firstname)?,
            lastname: load(&paths.lastname)?,
        })
    }

    pub fn apply(&mut self, o: EmailOverrides) {
        for (k, v) in [("seed_unit", o.seed_unit), ("seed_block", o.seed_block), ("bootstrap", o.bootstrap)] {
            if let Some(v) = v {
                self.email.set(k, v.to_string());
            }
        }
    }
}

impl ServerConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: ServerConfig = toml::from_str(text).map_err(|e| ServiceError::Config(e.to_string()))?;
        let abs = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
        };
        abs(&mut cfg.db_path);
        abs(&mut cfg.data_dir);
        if let Some(s) = cfg.spaces.as_mut() {
            for p in [&mut s.phone, &mut s.id_number, &mut s.email, &mut s.firstname, &mut s.lastname] {
                abs(p);
            }
        }
        if !(4..=31).contains(&cfg.bcrypt_cost) {
            return Err(ServiceError::Config(format!("bcrypt_cost {} outside 4..=31", cfg.bcrypt_cost)));
        }
        if cfg.mode == Mode::Seiguard && cfg.spaces.is_none() {
            return Err(ServiceError::Config("seiguard mode needs a [spaces] table".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ServiceError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn space_configs(&self) -> Result<SpaceConfigs> {
        let paths = self.spaces.as_ref().ok_or_else(|| ServiceError::Config("no [spaces] table".into()))?;
        let mut cfgs = SpaceConfigs::load(paths)?;
        cfgs.apply(self.email);
        Ok(cfgs)
    }
}
