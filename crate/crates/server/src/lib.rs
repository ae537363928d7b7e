//! HTTP service that stores personal fields under honey encryption and
//! never checks passwords, alongside a conventional bcrypt baseline.
//!
//! Both expose `POST /register`, `POST /login` and `GET /healthz`; see
//! [`http::router`].

pub mod baseline;
pub mod config;
pub mod db;
pub mod error;
pub mod http;
pub mod service;
pub mod timing;

pub use baseline::Baseline;
pub use config::{Mode, ServerConfig, SpaceConfigs};
pub use db::{UserDb, UserRecord};
pub use error::{ServiceError, LOGIN_FAILED, USERNAME_EXISTS};
pub use http::{router, BackgroundServer, PATH_HEADER, TIMING_HEADER};
pub use service::{LoginRequest, LoginResponse, RegisterRequest, SeiGuard, Spaces};
pub use timing::{parse_timing_header, Timings};
