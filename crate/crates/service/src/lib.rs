//! HTTP facade over the sourcing engine.
//!
//! Every handler validates its input, makes one library call and serializes
//! the result. Coordinates in request and response bodies are `{lat, lon}`
//! objects; the GeoJSON under `map` uses `[lon, lat]` arrays.

use std::collections::HashMap;
use std::future::Future;
use std::sync::{Arc, OnceLock};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use foodmiles_core::{
    producers_for, recommend, source_ingredients, ticket_candidates, ticket_to_geojson, CoreError, Engine, GeoPoint,
    Metric, Miles, MissingPolicy, ProducerHit, QueryOptions, Recipe, RecommendOptions, Recommendation,
    SourcingTicket,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

pub const DEFAULT_PRODUCER_LIMIT: usize = 50;
pub const DEFAULT_K: usize = 10;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    BadRequest,
    NotFound,
    NoSupplier,
    NoEligibleRecipe,
    Internal,
}

/// Body of every non-2xx response.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::BadRequest, message)
    }

    pub fn status(&self) -> StatusCode {
        match self.code {
            ErrorCode::BadRequest => StatusCode::BAD_REQUEST,
            ErrorCode::NotFound | ErrorCode::NoSupplier | ErrorCode::NoEligibleRecipe => StatusCode::NOT_FOUND,
            ErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::InvalidCoordinate { .. }
            | CoreError::InvalidDistance(_)
            | CoreError::UnknownMetric(_)
            | CoreError::EmptyRecipe
            | CoreError::InvalidK => ErrorCode::BadRequest,
            CoreError::NoEligibleRecipe => ErrorCode::NoEligibleRecipe,
            CoreError::EmptyIndex | CoreError::NoCandidateInIndex | CoreError::NoProducerInRadius { .. } => {
                ErrorCode::NoSupplier
            }
            _ => ErrorCode::Internal,
        };
        Self::new(code, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::bad_request(e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::bad_request(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(self)).into_response()
    }
}

/// Producers and recipes served by the API, indexed once at startup.
pub struct Dataset {
    pub engine: Engine,
    pub recipes: Vec<Recipe>,
    by_id: HashMap<String, usize>,
}

impl Dataset {
    pub fn new(engine: Engine, recipes: Vec<Recipe>) -> Self {
        let by_id = recipes.iter().enumerate().map(|(i, r)| (r.id.clone(), i)).collect();
        Self { engine, recipes, by_id }
    }

    pub fn recipe(&self, id: &str) -> Option<&Recipe> {
        self.by_id.get(id).map(|&i| &self.recipes[i])
    }
}

#[derive(Clone, Debug, Default)]
pub struct ServiceConfig {
    pub metric: Metric,
    /// Allowed browser origin; `*` allows any.
    pub cors_origin: Option<String>,
}

/// Shared handler state. The dataset slot is filled once loading finishes;
/// until then every endpoint answers 503.
#[derive(Clone)]
pub struct AppState {
    data: Arc<OnceLock<Arc<Dataset>>>,
    config: Arc<ServiceConfig>,
}

impl AppState {
    pub fn loading(config: ServiceConfig) -> Self {
        Self { data: Arc::new(OnceLock::new()), config: Arc::new(config) }
    }

    pub fn ready(config: ServiceConfig, data: Dataset) -> Self {
        let state = Self::loading(config);
        state.set_loaded(data);
        state
    }

    /// Publishes the dataset. Later calls are ignored.
    pub fn set_loaded(&self, data: Dataset) {
        let _ = self.data.set(Arc::new(data));
    }

    fn dataset(&self) -> Result<Arc<Dataset>, ApiError> {
        self.data
            .get()
            .cloned()
            .ok_or_else(|| ApiError::new(ErrorCode::Internal, "datasets are still loading"))
    }
}

pub fn router(state: AppState) -> Router {
    let mut app = Router::new()
        .route("/health", get(health))
        .route("/ticket", post(ticket))
        .route("/recommend", get(recommend_handler))
        .route("/producers", get(producers))
        .fallback(|| async { ApiError::new(ErrorCode::NotFound, "no such endpoint") });
    if let Some(origin) = &state.config.cors_origin {
        let allow = if origin == "*" {
            AllowOrigin::any()
        } else {
            match HeaderValue::from_str(origin) {
                Ok(v) => AllowOrigin::exact(v),
                Err(_) => AllowOrigin::list([]),
            }
        };
        app = app.layer(CorsLayer::new().allow_origin(allow).allow_methods(Any).allow_headers(Any));
    }
    app.with_state(state)
}

pub async fn serve<F>(listener: tokio::net::TcpListener, state: AppState, shutdown: F) -> std::io::Result<()>
where
    F: Future<Output = ()> + Send + 'static,
{
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}

fn loading_response(e: ApiError) -> Response {
    (StatusCode::SERVICE_UNAVAILABLE, Json(e)).into_response()
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Health {
    pub status: String,
    pub producers: usize,
    pub recipes: usize,
}

async fn health(State(state): State<AppState>) -> Response {
    match state.dataset() {
        Ok(d) => Json(Health {
            status: "ok".into(),
            producers: d.engine.catalog().len(),
            recipes: d.recipes.len(),
        })
        .into_response(),
        Err(e) => loading_response(e),
    }
}

fn point(lat: f64, lon: f64) -> Result<GeoPoint, ApiError> {
    GeoPoint::new(lat, lon).map_err(|e| ApiError::bad_request(e.to_string()))
}

fn radius(value: Option<f64>) -> Result<Option<Miles>, ApiError> {
    value
        .map(|r| Miles::new(r).map_err(|_| ApiError::bad_request("max_radius_miles must be a non-negative number")))
        .transpose()
}

fn parse_param<T: std::str::FromStr>(name: &str, value: Option<&str>) -> Result<Option<T>, ApiError> {
    value
        .filter(|v| !v.trim().is_empty())
        .map(|v| v.trim().parse::<T>().map_err(|_| ApiError::bad_request(format!("invalid {name}: {v:?}"))))
        .transpose()
}

fn required<T: std::str::FromStr>(name: &str, value: Option<&str>) -> Result<T, ApiError> {
    parse_param(name, value)?.ok_or_else(|| ApiError::bad_request(format!("missing {name}")))
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TicketRequest {
    pub lat: f64,
    pub lon: f64,
    #[serde(default)]
    pub recipe_id: Option<String>,
    #[serde(default)]
    pub ingredients: Option<Vec<String>>,
    #[serde(default)]
    pub metric: Option<Metric>,
    #[serde(default)]
    pub max_radius_miles: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TicketResponse {
    pub ticket: SourcingTicket,
    pub map: Value,
}

/// Sources a ticket for a request against a loaded dataset.
pub fn ticket_for(data: &Dataset, config: &ServiceConfig, req: &TicketRequest) -> Result<TicketResponse, ApiError> {
    let site = point(req.lat, req.lon)?;
    let opts = QueryOptions::new(req.metric.unwrap_or(config.metric), radius(req.max_radius_miles)?);
    let ticket = match (&req.recipe_id, &req.ingredients) {
        (Some(_), Some(_)) => return Err(ApiError::bad_request("give recipe_id or ingredients, not both")),
        (Some(id), None) => {
            let recipe = data
                .recipe(id)
                .ok_or_else(|| ApiError::new(ErrorCode::NotFound, format!("unknown recipe id {id:?}")))?;
            source_ingredients(&data.engine, site, Some(&recipe.id), &recipe.ingredients, opts)?
        }
        (None, Some(ingredients)) => source_ingredients(&data.engine, site, None, ingredients, opts)?,
        (None, None) => return Err(ApiError::bad_request("recipe_id or ingredients is required")),
    };
    let map = ticket_to_geojson(&ticket, &ticket_candidates(&data.engine, &ticket), &data.engine);
    Ok(TicketResponse { ticket, map })
}

async fn ticket(State(state): State<AppState>, body: Result<Json<TicketRequest>, JsonRejection>) -> Response {
    let data = match state.dataset() {
        Ok(d) => d,
        Err(e) => return loading_response(e),
    };
    let result = body.map_err(ApiError::from).and_then(|Json(req)| ticket_for(&data, &state.config, &req));
    match result {
        Ok(r) => Json(r).into_response(),
        Err(e) => e.into_response(),
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RecommendQuery {
    pub lat: Option<String>,
    pub lon: Option<String>,
    pub k: Option<String>,
    pub policy: Option<String>,
    pub max_radius_miles: Option<String>,
    pub metric: Option<String>,
}

pub fn recommendations_for(
    data: &Dataset,
    config: &ServiceConfig,
    q: &RecommendQuery,
) -> Result<Vec<Recommendation>, ApiError> {
    let site = point(required("lat", q.lat.as_deref())?, required("lon", q.lon.as_deref())?)?;
    let k: usize = parse_param("k", q.k.as_deref())?.unwrap_or(DEFAULT_K);
    if k == 0 {
        return Err(ApiError::bad_request("k must be at least 1"));
    }
    let policy: MissingPolicy = parse_param("policy", q.policy.as_deref())?.unwrap_or_default();
    let metric: Metric = parse_param("metric", q.metric.as_deref())?.unwrap_or(config.metric);
    let max_radius = radius(parse_param("max_radius_miles", q.max_radius_miles.as_deref())?)?;
    let opts = RecommendOptions { k, policy, query: QueryOptions::new(metric, max_radius), memoize: true };
    Ok(recommend(&data.engine, site, &data.recipes, &opts)?.recommendations)
}

async fn recommend_handler(State(state): State<AppState>, query: Result<Query<RecommendQuery>, QueryRejection>) -> Response {
    let data = match state.dataset() {
        Ok(d) => d,
        Err(e) => return loading_response(e),
    };
    let Query(q) = match query {
        Ok(q) => q,
        Err(e) => return ApiError::from(e).into_response(),
    };
    let config = state.config.clone();
    let result = tokio::task::spawn_blocking(move || recommendations_for(&data, &config, &q))
        .await
        .unwrap_or_else(|e| Err(ApiError::new(ErrorCode::Internal, e.to_string())));
    match result {
        Ok(r) => Json(r).into_response(),
        Err(e) => e.into_response(),
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ProducersQuery {
    pub ingredient: Option<String>,
    pub lat: Option<String>,
    pub lon: Option<String>,
    pub limit: Option<String>,
    pub metric: Option<String>,
}

pub fn producers_near(data: &Dataset, config: &ServiceConfig, q: &ProducersQuery) -> Result<Vec<ProducerHit>, ApiError> {
    let ingredient = q.ingredient.as_deref().map(str::trim).unwrap_or_default();
    if ingredient.is_empty() {
        return Err(ApiError::bad_request("missing ingredient"));
    }
    let site = point(required("lat", q.lat.as_deref())?, required("lon", q.lon.as_deref())?)?;
    let limit: usize = parse_param("limit", q.limit.as_deref())?.unwrap_or(DEFAULT_PRODUCER_LIMIT);
    if limit == 0 {
        return Err(ApiError::bad_request("limit must be at least 1"));
    }
    let metric: Metric = parse_param("metric", q.metric.as_deref())?.unwrap_or(config.metric);
    Ok(producers_for(&data.engine, ingredient, site, metric, limit))
}

async fn producers(State(state): State<AppState>, query: Result<Query<ProducersQuery>, QueryRejection>) -> Response {
    let data = match state.dataset() {
        Ok(d) => d,
        Err(e) => return loading_response(e),
    };
    let result = query.map_err(ApiError::from).and_then(|Query(q)| producers_near(&data, &state.config, &q));
    match result {
        Ok(r) => Json(r).into_response(),
        Err(e) => e.into_response(),
    }
}
