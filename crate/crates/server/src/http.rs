use std::net::SocketAddr;
use std::sync::Arc;
use std::thread::JoinHandle;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;
use tokio::sync::oneshot;

use crate::baseline::Baseline;
use crate::error::{ServiceError, LOGIN_FAILED};
use crate::service::{LoginRequest, LoginResponse, RegisterRequest, SeiGuard};
use crate::timing::Timings;

/// Step names of the login just served, joined by `>`.
pub const PATH_HEADER: &str = "x-seiguard-path";
/// Per-step seconds, see [`Timings`]'s `Display`.
pub const TIMING_HEADER: &str = "x-seiguard-timing";

/// Backend behind the shared endpoints.
pub trait Backend: Send + Sync + 'static {
    fn register(&self, req: &RegisterRequest) -> Result<Timings, ServiceError>;
    fn login(&self, username: &str, password: &str) -> Result<(LoginResponse, Timings), ServiceError>;
    /// Extra fields on a failed-login body.
    fn failure_marker(&self) -> serde_json::Value {
        json!({ "error": LOGIN_FAILED })
    }
}

impl Backend for SeiGuard {
    fn register(&self, req: &RegisterRequest) -> Result<Timings, ServiceError> {
        SeiGuard::register(self, req)
    }

    fn login(&self, username: &str, password: &str) -> Result<(LoginResponse, Timings), ServiceError> {
        SeiGuard::login(self, username, password)
    }
}

impl Backend for Baseline {
    fn register(&self, req: &RegisterRequest) -> Result<Timings, ServiceError> {
        Baseline::register(self, req)
    }

    fn login(&self, username: &str, password: &str) -> Result<(LoginResponse, Timings), ServiceError> {
        Baseline::login(self, username, password)
    }

    fn failure_marker(&self) -> serde_json::Value {
        json!({ "error": LOGIN_FAILED, "authenticated": false })
    }
}

struct AppState<B> {
    backend: Arc<B>,
    timing_header: bool,
}

impl<B> Clone for AppState<B> {
    fn clone(&self) -> Self {
        AppState { backend: self.backend.clone(), timing_header: self.timing_header }
    }
}

fn error_response<B: Backend>(backend: &B, e: ServiceError) -> Response {
    match e {
        ServiceError::UsernameTaken => (StatusCode::CONFLICT, Json(json!({ "error": e.to_string() }))).into_response(),
        ServiceError::BadCredentials => (StatusCode::UNAUTHORIZED, Json(backend.failure_marker())).into_response(),
        ServiceError::Invalid(m) => (StatusCode::UNPROCESSABLE_ENTITY, Json(json!({ "error": m }))).into_response(),
        other => {
            tracing::error!(error = %other, "request failed");
            (StatusCode::INTERNAL_SERVER_ERROR, Json(json!({ "error": "internal error" }))).into_response()
        }
    }
}

fn bad_json(r: JsonRejection) -> Response {
    (StatusCode::UNPROCESSABLE_ENTITY, Json(json!({ "error": r.body_text() }))).into_response()
}

fn with_headers(mut resp: Response, t: &Timings, path: bool, timing: bool) -> Response {
    let h = resp.headers_mut();
    if path {
        h.insert(PATH_HEADER, HeaderValue::from_str(&t.path()).unwrap());
    }
    if timing {
        h.insert(TIMING_HEADER, HeaderValue::from_str(&t.to_string()).unwrap());
    }
    resp
}

async fn register<B: Backend>(State(st): State<AppState<B>>, body: Result<Json<RegisterRequest>, JsonRejection>) -> Response {
    let Json(req) = match body {
        Ok(b) => b,
        Err(r) => return bad_json(r),
    };
    let backend = st.backend.clone();
    match tokio::task::spawn_blocking(move || backend.register(&req)).await {
        Ok(Ok(t)) => with_headers(Json(json!({ "ok": true })).into_response(), &t, false, st.timing_header),
        Ok(Err(e)) => error_response(st.backend.as_ref(), e),
        Err(_) => error_response(st.backend.as_ref(), ServiceError::Join),
    }
}

async fn login<B: Backend>(State(st): State<AppState<B>>, body: Result<Json<LoginRequest>, JsonRejection>) -> Response {
    let Json(req) = match body {
        Ok(b) => b,
        Err(r) => return bad_json(r),
    };
    let backend = st.backend.clone();
    match tokio::task::spawn_blocking(move || backend.login(&req.username, &req.password)).await {
        Ok(Ok((resp, t))) => with_headers(Json(resp).into_response(), &t, true, st.timing_header),
        Ok(Err(e)) => error_response(st.backend.as_ref(), e),
        Err(_) => error_response(st.backend.as_ref(), ServiceError::Join),
    }
}

async fn healthz() -> &'static str {
    "ok"
}

/// `POST /register`, `POST /login`, `GET /healthz`.
pub fn router<B: Backend>(backend: Arc<B>, timing_header: bool) -> Router {
    Router::new()
        .route("/register", post(register::<B>))
        .route("/login", post(login::<B>))
        .route("/healthz", get(healthz))
        .with_state(AppState { backend, timing_header })
}

/// A server running on its own runtime thread; stops when dropped.
#[derive(Debug)]
pub struct BackgroundServer {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

impl BackgroundServer {
    /// Binds `127.0.0.1` on an ephemeral port.
    pub fn spawn(app: Router) -> std::io::Result<Self> {
        Self::spawn_on("127.0.0.1:0".parse().unwrap(), app)
    }

    pub fn spawn_on(addr: SocketAddr, app: Router) -> std::io::Result<Self> {
        let listener = std::net::TcpListener::bind(addr)?;
        listener.set_nonblocking(true)?;
        let addr = listener.local_addr()?;
        let (tx, rx) = oneshot::channel();
        let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
        let thread = std::thread::spawn(move || {
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(listener).expect("listener");
                axum::serve(listener, app)
                    .with_graceful_shutdown(async {
                        let _ = rx.await;
                    })
                    .await
                    .expect("server");
            })
        });
        Ok(BackgroundServer { addr, shutdown: Some(tx), thread: Some(thread) })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }
}

impl Drop for BackgroundServer {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}
