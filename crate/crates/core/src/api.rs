//! Stateless HTTP/JSON facade.
//!
//! | Method | Path                    | Body                  | Response           |
//! |--------|-------------------------|-----------------------|--------------------|
//! | GET    | `/healthz`              |                       | `ok`               |
//! | POST   | `/api/v1/allocation`    | `DesignSpec`          | `AllocationPlan`   |
//! | POST   | `/api/v1/sample-size`   | [`SampleSizeRequest`] | `SampleSizeResult` |
//! | POST   | `/api/v1/events`        | [`EventsRequest`]     | `SurvivalDesign`   |
//! | POST   | `/api/v1/curve`         | [`CurveRequest`]      | `EfficiencyCurve`  |
//! | POST   | `/api/v1/simulate`      | [`SimulateRequest`]   | `SimulationReport` |
//!
//! Errors are returned as [`ApiError`] with status 400 (validation), 422
//! (domain) or 500 (internal).

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tower_http::cors::{Any, CorsLayer};

use crate::error::Error;
use crate::model::{DesignSpec, ErrorRates};
use crate::oracle::{self, Truth};
use crate::survival::{self, SurvivalMethod};
use crate::{allocation, report, sample_size};

/// Environment variable names read by [`ApiConfig::from_env`].
pub const ENV_HOST: &str = "HOST";
pub const ENV_PORT: &str = "PORT";
pub const ENV_CORS_ORIGIN: &str = "CORS_ORIGIN";
pub const ENV_MAX_REPS: &str = "SIMULATE_MAX_REPS";

pub const DEFAULT_MAX_REPS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ApiConfig {
    pub host: String,
    pub port: u16,
    /// Allowed browser origin; `*` allows any, `None` disables CORS headers.
    pub cors_origin: Option<String>,
    pub max_reps: u64,
}

impl Default for ApiConfig {
    fn default() -> Self {
        ApiConfig {
            host: "127.0.0.1".into(),
            port: 8080,
            cors_origin: None,
            max_reps: DEFAULT_MAX_REPS,
        }
    }
}

impl ApiConfig {
    pub fn from_env() -> Result<Self, String> {
        let mut config = ApiConfig::default();
        if let Ok(host) = std::env::var(ENV_HOST) {
            config.host = host;
        }
        if let Ok(port) = std::env::var(ENV_PORT) {
            config.port = port
                .parse()
                .map_err(|_| format!("{ENV_PORT}: invalid port {port}"))?;
        }
        if let Ok(origin) = std::env::var(ENV_CORS_ORIGIN) {
            config.cors_origin = Some(origin);
        }
        if let Ok(reps) = std::env::var(ENV_MAX_REPS) {
            config.max_reps = reps
                .parse()
                .map_err(|_| format!("{ENV_MAX_REPS}: invalid count {reps}"))?;
        }
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApiErrorCode {
    Validation,
    Domain,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: ApiErrorCode,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_path: Option<String>,
}

impl ApiError {
    fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        ApiError {
            code: ApiErrorCode::Validation,
            message: message.into(),
            field_path: Some(field.into()),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        ApiError {
            code: ApiErrorCode::Internal,
            message: message.into(),
            field_path: None,
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::Validation { field, message } => ApiError::validation(field, message),
            Error::Domain(message) => ApiError {
                code: ApiErrorCode::Domain,
                message,
                field_path: None,
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self.code {
            ApiErrorCode::Validation => StatusCode::BAD_REQUEST,
            ApiErrorCode::Domain => StatusCode::UNPROCESSABLE_ENTITY,
            ApiErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(self)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

/// Deserializes a request body, reporting the path of the offending field.
fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    let mut de = serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." {
            "body".to_string()
        } else {
            path
        };
        ApiError::validation(path, e.into_inner().to_string())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSizeRequest {
    pub spec: DesignSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventsRequest {
    pub delta0: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_power")]
    pub power: f64,
    #[serde(default)]
    pub method: SurvivalMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

fn default_alpha() -> f64 {
    ErrorRates::default().alpha
}

fn default_power() -> f64 {
    ErrorRates::default().power
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveRequest {
    pub spec: DesignSpec,
    #[serde(default = "default_r_min")]
    pub r_min: f64,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_r_min() -> f64 {
    0.2
}

fn default_r_max() -> f64 {
    4.0
}

fn default_points() -> usize {
    200
}

/// Arm sizes default to the design's sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateRequest {
    pub spec: DesignSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_control: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_treatment: Option<u64>,
    pub truth: Truth,
    pub reps: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

struct AppState {
    max_reps: u64,
}

pub fn router(config: &ApiConfig) -> Router {
    let state = Arc::new(AppState {
        max_reps: config.max_reps,
    });
    let router = Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/api/v1/allocation", post(allocation_handler))
        .route("/api/v1/sample-size", post(sample_size_handler))
        .route("/api/v1/events", post(events_handler))
        .route("/api/v1/curve", post(curve_handler))
        .route("/api/v1/simulate", post(simulate_handler))
        .with_state(state);
    match config.cors_origin.as_deref() {
        None => router,
        Some("*") => router.layer(
            CorsLayer::new()
                .allow_origin(Any)
                .allow_headers(Any)
                .allow_methods(Any),
        ),
        Some(origin) => match HeaderValue::from_str(origin) {
            Ok(origin) => router.layer(
                CorsLayer::new()
                    .allow_origin(origin)
                    .allow_headers(Any)
                    .allow_methods(Any),
            ),
            Err(_) => router,
        },
    }
}

/// Binds `config.host:config.port` and serves until the process exits.
pub async fn serve(config: ApiConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((config.host.as_str(), config.port)).await?;
    axum::serve(listener, router(&config)).await
}

async fn allocation_handler(body: Bytes) -> ApiResult<allocation::AllocationPlan> {
    let spec: DesignSpec = parse(&body)?;
    Ok(Json(allocation::allocate(&spec)?))
}

async fn sample_size_handler(body: Bytes) -> ApiResult<sample_size::SampleSizeResult> {
    let req: SampleSizeRequest = parse(&body)?;
    Ok(Json(sample_size::sample_size_ni(&req.spec, req.h)?))
}

async fn events_handler(body: Bytes) -> ApiResult<survival::SurvivalDesign> {
    let req: EventsRequest = parse(&body)?;
    let rates = ErrorRates::new(req.alpha, req.power).map_err(|e| match e {
        Error::Validation { field, message } => {
            ApiError::validation(field.trim_start_matches("rates."), message)
        }
        other => other.into(),
    })?;
    Ok(Json(survival::design_events(
        req.delta0, &rates, req.method, req.p,
    )?))
}

async fn curve_handler(body: Bytes) -> ApiResult<report::EfficiencyCurve> {
    let req: CurveRequest = parse(&body)?;
    Ok(Json(report::efficiency_curve(
        &req.spec, req.r_min, req.r_max, req.points,
    )?))
}

async fn simulate_handler(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> ApiResult<oracle::SimulationReport> {
    let req: SimulateRequest = parse(&body)?;
    let seed = req
        .seed
        .ok_or_else(|| ApiError::validation("seed", "an explicit seed is required"))?;
    if req.reps > state.max_reps {
        return Err(ApiError::validation(
            "reps",
            format!("at most {} replications per request", state.max_reps),
        ));
    }
    let (n_control, n_treatment) = match (req.n_control, req.n_treatment) {
        (Some(c), Some(t)) => (c, t),
        (None, None) => {
            let n = sample_size::sample_size_ni(&req.spec, None)?;
            (n.n_control, n.n_treatment)
        }
        (Some(_), None) => {
            return Err(ApiError::validation(
                "n_treatment",
                "give both arm sizes or neither",
            ))
        }
        (None, Some(_)) => {
            return Err(ApiError::validation(
                "n_control",
                "give both arm sizes or neither",
            ))
        }
    };
    let report = tokio::task::spawn_blocking(move || {
        oracle::simulate_rejection_rate(
            &req.spec,
            n_control,
            n_treatment,
            req.truth,
            req.reps,
            seed,
        )
    })
    .await
    .map_err(|e| ApiError::internal(format!("simulation task failed: {e}")))??;
    Ok(Json(report))
}
