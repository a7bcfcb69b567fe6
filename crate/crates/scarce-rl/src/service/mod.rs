//! HTTP evaluation service with per-session budgets.
//!
//! | method | path                     | body                          |
//! |--------|--------------------------|-------------------------------|
//! | POST   | `/sessions`              | `{"env": id, "seed"?: u64}`   |
//! | POST   | `/sessions/{token}/step` | `{"action": [itn, irs]}`      |
//! | POST   | `/sessions/{token}/reset`|                               |
//! | GET    | `/sessions/{token}`      |                               |
//!
//! Each session owns a [`BudgetedEnv`], so the budget, horizon and forfeit
//! rules are exactly those of the in-process environment. Steps on one
//! session are serialized; different sessions run in parallel.

mod config;
pub mod wire;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use scarce_rl_core::rng::mix;
use scarce_rl_core::{BudgetedEnv, Error, SyntheticEnv};
use tokio::sync::{oneshot, Mutex as AsyncMutex};

pub use config::{ServiceConfig, StepContention};
use wire::{codes, CreateRequest, CreateResponse, ErrorBody, ResetResponse, SessionInfo, StepRequest, StepResponse};

struct Session {
    env_id: String,
    env: BudgetedEnv<SyntheticEnv>,
}

struct Entry {
    session: Arc<AsyncMutex<Session>>,
    last_used: Instant,
}

struct Shared {
    config: ServiceConfig,
    sessions: Mutex<HashMap<String, Entry>>,
}

impl Shared {
    /// Finds a live session and marks it used. Expired sessions are dropped
    /// here as well as by the background sweep.
    fn lookup(&self, token: &str) -> Result<Arc<AsyncMutex<Session>>, ApiError> {
        let mut sessions = self.sessions.lock().expect("session map poisoned");
        let now = Instant::now();
        match sessions.get_mut(token) {
            Some(e) if now.duration_since(e.last_used) < self.config.idle_timeout => {
                e.last_used = now;
                Ok(e.session.clone())
            }
            Some(_) => {
                sessions.remove(token);
                Err(ApiError::UnknownSession)
            }
            None => Err(ApiError::UnknownSession),
        }
    }

    fn sweep(&self) -> usize {
        let mut sessions = self.sessions.lock().expect("session map poisoned");
        let before = sessions.len();
        let timeout = self.config.idle_timeout;
        sessions.retain(|_, e| e.last_used.elapsed() < timeout);
        before - sessions.len()
    }

    fn live_sessions(&self) -> usize {
        self.sessions.lock().expect("session map poisoned").len()
    }
}

#[derive(Debug)]
enum ApiError {
    UnknownEnv,
    UnknownSession,
    BudgetExhausted,
    EpisodeDone,
    InvalidAction(String),
    BadRequest(String),
    SessionBusy,
    Internal(String),
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExhausted => ApiError::BudgetExhausted,
            Error::EpisodeDone => ApiError::EpisodeDone,
            Error::InvalidArgument(m) => ApiError::InvalidAction(m),
            other => ApiError::Internal(other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, code, detail) = match self {
            ApiError::UnknownEnv => (StatusCode::NOT_FOUND, codes::UNKNOWN_ENV, None),
            ApiError::UnknownSession => (StatusCode::NOT_FOUND, codes::UNKNOWN_SESSION, None),
            ApiError::BudgetExhausted => (StatusCode::TOO_MANY_REQUESTS, codes::BUDGET_EXHAUSTED, None),
            ApiError::EpisodeDone => (StatusCode::CONFLICT, codes::EPISODE_DONE, None),
            ApiError::InvalidAction(m) => (StatusCode::BAD_REQUEST, codes::INVALID_ACTION, Some(m)),
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, codes::BAD_REQUEST, Some(m)),
            ApiError::SessionBusy => {
                let body = ErrorBody { error: codes::SESSION_BUSY.into(), detail: None };
                return (StatusCode::SERVICE_UNAVAILABLE, [(header::RETRY_AFTER, "1")], Json(body))
                    .into_response();
            }
            ApiError::Internal(m) => {
                log::error!("internal error: {m}");
                (StatusCode::INTERNAL_SERVER_ERROR, codes::INTERNAL, Some(m))
            }
        };
        (status, Json(ErrorBody { error: code.into(), detail })).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn new_token() -> String {
    format!("{:032x}", rand::random::<u128>())
}

async fn create_session(State(shared): State<Arc<Shared>>, body: Bytes) -> ApiResult<CreateResponse> {
    let req: CreateRequest =
        serde_json::from_slice(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let mut config = shared.config.envs.get(&req.env).ok_or(ApiError::UnknownEnv)?.clone();
    if let Some(seed) = req.seed {
        config.set_seed(mix(config.seed(), seed));
    }
    let env = BudgetedEnv::with_default_budget(SyntheticEnv::new(config));
    let remaining = env.budget().into();
    let token = new_token();
    let session = Session { env_id: req.env.clone(), env };
    shared.sessions.lock().expect("session map poisoned").insert(
        token.clone(),
        Entry { session: Arc::new(AsyncMutex::new(session)), last_used: Instant::now() },
    );
    log::info!("session created on {}", req.env);
    Ok(Json(CreateResponse { token, env: req.env, remaining }))
}

async fn step(
    State(shared): State<Arc<Shared>>,
    Path(token): Path<String>,
    body: Bytes,
) -> ApiResult<StepResponse> {
    let slot = shared.lookup(&token)?;
    let req: StepRequest =
        serde_json::from_slice(&body).map_err(|e| ApiError::InvalidAction(e.to_string()))?;
    let mut session = match shared.config.contention {
        StepContention::Queue => slot.lock().await,
        StepContention::Reject => slot.try_lock().map_err(|_| ApiError::SessionBusy)?,
    };
    let year = session.env.year();
    let out = session.env.step(req.action)?;
    Ok(Json(StepResponse {
        reward: out.reward,
        year,
        done: out.done(),
        remaining: out.remaining.into(),
    }))
}

async fn reset(State(shared): State<Arc<Shared>>, Path(token): Path<String>) -> ApiResult<ResetResponse> {
    let slot = shared.lookup(&token)?;
    let mut session = slot.lock().await;
    session.env.reset()?;
    Ok(Json(ResetResponse { year: session.env.year(), remaining: session.env.budget().into() }))
}

async fn info(State(shared): State<Arc<Shared>>, Path(token): Path<String>) -> ApiResult<SessionInfo> {
    let slot = shared.lookup(&token)?;
    let session = slot.lock().await;
    Ok(Json(SessionInfo {
        token,
        env: session.env_id.clone(),
        year: session.env.year(),
        done: session.env.is_done(),
        remaining: session.env.budget().into(),
    }))
}

/// The service's routes, plus the shared state for sweeping.
fn build(config: ServiceConfig) -> (Router, Arc<Shared>) {
    let shared = Arc::new(Shared { config, sessions: Mutex::new(HashMap::new()) });
    let router = Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{token}", get(info))
        .route("/sessions/{token}/step", post(step))
        .route("/sessions/{token}/reset", post(reset))
        .with_state(shared.clone());
    (router, shared)
}

pub fn router(config: ServiceConfig) -> Router {
    build(config).0
}

fn sweep_period(idle: Duration) -> Duration {
    (idle / 4).clamp(Duration::from_millis(10), Duration::from_secs(60))
}

/// Serves on `listener` until `shutdown` resolves, expiring idle sessions
/// in the background.
pub async fn serve(
    listener: tokio::net::TcpListener,
    config: ServiceConfig,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let period = sweep_period(config.idle_timeout);
    let (router, shared) = build(config);
    let sweeper = {
        let shared = shared.clone();
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(period);
            loop {
                tick.tick().await;
                let dropped = shared.sweep();
                if dropped > 0 {
                    log::info!("expired {dropped} idle sessions, {} live", shared.live_sessions());
                }
            }
        })
    };
    let result = axum::serve(listener, router).with_graceful_shutdown(shutdown).await;
    sweeper.abort();
    result
}

/// A service running on its own thread and runtime, stopped on drop.
pub struct ServiceHandle {
    addr: SocketAddr,
    stop: Option<oneshot::Sender<()>>,
    thread: Option<std::thread::JoinHandle<std::io::Result<()>>>,
}

impl ServiceHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn shutdown(mut self) -> std::io::Result<()> {
        self.stop_and_join()
    }

    fn stop_and_join(&mut self) -> std::io::Result<()> {
        if let Some(stop) = self.stop.take() {
            let _ = stop.send(());
        }
        match self.thread.take() {
            Some(t) => t.join().unwrap_or_else(|_| Err(std::io::Error::other("service thread panicked"))),
            None => Ok(()),
        }
    }
}

impl Drop for ServiceHandle {
    fn drop(&mut self) {
        let _ = self.stop_and_join();
    }
}

/// Binds `addr` (use port 0 for an ephemeral port) and serves in the
/// background.
pub fn spawn(config: ServiceConfig, addr: &str) -> std::io::Result<ServiceHandle> {
    let listener = std::net::TcpListener::bind(addr)?;
    listener.set_nonblocking(true)?;
    let addr = listener.local_addr()?;
    let (stop, stopped) = oneshot::channel::<()>();
    let thread = std::thread::Builder::new()
        .name("scarce-rl-service".into())
        .spawn(move || {
            let runtime = tokio::runtime::Builder::new_multi_thread()
                .worker_threads(4)
                .enable_all()
                .build()?;
            runtime.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(listener)?;
                serve(listener, config, async {
                    let _ = stopped.await;
                })
                .await
            })
        })?;
    Ok(ServiceHandle { addr, stop: Some(stop), thread: Some(thread) })
}
