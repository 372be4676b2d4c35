//! Stateless HTTP/JSON front end over a shared read-only dataset.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use reopen_core::analysis::{EnsembleSummary, PerturbMode};
use reopen_core::data::{EconParams, EconomySummary};
use reopen_core::epi::{Beta0, EpiParams};
use reopen_core::scenario::{PolicyLambda, ScenarioId, ScenarioSpec};
use reopen_core::{Dataset, Error, ErrorKind};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::commands::{self, SensitivityRequest, SimulationResult};
use crate::config::apply_param_overrides;

/// Shared state: the dataset and the server's base parameters, never mutated.
#[derive(Debug, Clone)]
pub struct AppState {
    pub dataset: Arc<Dataset>,
    pub params: Arc<EconParams>,
}

impl AppState {
    pub fn new(dataset: Dataset, params: EconParams) -> Self {
        AppState {
            dataset: Arc::new(dataset),
            params: Arc::new(params),
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/scenarios", get(scenarios))
        .route("/scenarios/report", get(report))
        .route("/calibration", get(calibration))
        .route("/simulate", post(simulate))
        .route("/sensitivity", post(sensitivity))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e.kind() {
            ErrorKind::Config | ErrorKind::Data => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorKind::Numerical => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError {
            status,
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({ "error": self.message, "status": self.status.as_u16() });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = std::result::Result<Json<T>, ApiError>;

/// Parses a JSON body; syntax errors, wrong types and unknown fields are all 400.
fn parse_body<T: DeserializeOwned>(body: &Bytes) -> std::result::Result<T, ApiError> {
    let body: &[u8] = if body.iter().all(u8::is_ascii_whitespace) {
        b"{}"
    } else {
        body
    };
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed body: {e}")))
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> reopen_core::Result<T> + Send + 'static,
) -> std::result::Result<T, ApiError> {
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r.map_err(ApiError::from),
        Err(e) => Err(ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            message: format!("simulation task failed: {e}"),
        }),
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScenarioInfo {
    pub id: ScenarioId,
    pub description: String,
    pub schools_open: bool,
    pub consumption_open: bool,
    pub open: Vec<String>,
    pub lambda: PolicyLambda,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScenarioList {
    pub scenarios: Vec<ScenarioInfo>,
}

async fn scenarios(State(s): State<AppState>) -> ApiResult<ScenarioList> {
    let d = &s.dataset;
    let scenarios = ScenarioId::NAMED
        .iter()
        .map(|&id| {
            let sc = d.scenario(id)?;
            Ok(ScenarioInfo {
                id,
                description: id.description().to_string(),
                schools_open: id.schools_open(),
                consumption_open: id.consumption_open(),
                open: sc
                    .open_codes(d.codes())
                    .into_iter()
                    .map(String::from)
                    .collect(),
                lambda: sc.lambda,
            })
        })
        .collect::<reopen_core::Result<Vec<_>>>()?;
    Ok(Json(ScenarioList { scenarios }))
}

/// One bar group per named scenario: transmission by activity, R0 and value added.
async fn report(State(s): State<AppState>) -> std::result::Result<Json<Value>, ApiError> {
    let r = blocking(move || commands::report(&s.dataset, &s.params)).await?;
    let mut value = serde_json::to_value(&r).map_err(|e| Error::Numerical(e.to_string()))?;
    if let Some(rows) = value.get_mut("rows").and_then(Value::as_array_mut) {
        for row in rows.iter_mut().filter_map(Value::as_object_mut) {
            row.remove("value_added");
        }
    }
    Ok(Json(value))
}

#[derive(Debug, Serialize)]
pub struct CalibrationSummary {
    pub economy: EconomySummary,
    pub params: EconParams,
    pub epi_params: EpiParams,
    pub beta0: Beta0,
    pub onsite_share: f64,
    pub remote_share: f64,
    pub essential_share: f64,
    pub critical_inputs: usize,
    pub warnings: Vec<String>,
}

async fn calibration(State(s): State<AppState>) -> ApiResult<CalibrationSummary> {
    let d = &s.dataset;
    let w = d.employment_weights();
    Ok(Json(CalibrationSummary {
        economy: d.economy.summary(),
        params: (*s.params).clone(),
        epi_params: d.epi_params.clone(),
        beta0: d.epi.beta0,
        onsite_share: d.calibration.onsite_share(w),
        remote_share: d.calibration.remote_share(w),
        essential_share: d.calibration.essential_share(w),
        critical_inputs: d.criticality.critical.iter().map(Vec::len).sum(),
        warnings: d.warnings.clone(),
    }))
}

/// Body of `POST /simulate`: a named scenario, optional policy overrides and parameter overrides.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateRequest {
    pub scenario: Option<String>,
    pub open: Option<Vec<String>>,
    pub schools: Option<bool>,
    pub consumption: Option<bool>,
    pub delta_h: Option<f64>,
    pub delta_s: Option<f64>,
    pub delta_w: BTreeMap<String, f64>,
    pub delta_c: BTreeMap<String, f64>,
    pub params: Map<String, Value>,
    pub horizon: Option<usize>,
    /// Include per-industry output in the series.
    pub industries: bool,
}

impl SimulateRequest {
    fn spec(&self) -> ScenarioSpec {
        ScenarioSpec {
            scenario: self.scenario.clone(),
            open: self.open.clone(),
            schools: self.schools,
            consumption: self.consumption,
            delta_h: self.delta_h,
            delta_s: self.delta_s,
            delta_w: self.delta_w.clone(),
            delta_c: self.delta_c.clone(),
        }
    }
}

/// Aggregate daily series; value added and output also relative to day 0.
#[derive(Debug, Serialize, Deserialize)]
pub struct SeriesBody {
    pub t: Vec<usize>,
    pub output: Vec<f64>,
    pub labor: Vec<f64>,
    pub profits: Vec<f64>,
    pub consumption: Vec<f64>,
    pub value_added: Vec<f64>,
    pub output_rel: Vec<f64>,
    pub value_added_rel: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SimulateResponse {
    pub scenario: String,
    pub open: Vec<String>,
    pub horizon: usize,
    pub codes: Vec<String>,
    pub beta: reopen_core::epi::BetaBreakdown,
    pub r0: reopen_core::epi::R0Estimate,
    pub va_change: commands::VaChange,
    pub series: SeriesBody,
}

fn simulate_response(r: SimulationResult, industries: bool) -> SimulateResponse {
    use reopen_core::engine::SimSeries;
    let s = r.series;
    SimulateResponse {
        scenario: r.scenario,
        open: r.open,
        horizon: r.horizon,
        codes: s.codes.clone(),
        beta: r.beta,
        r0: r.r0,
        va_change: r.va_change,
        series: SeriesBody {
            output_rel: SimSeries::relative(&s.output),
            value_added_rel: SimSeries::relative(&s.value_added),
            t: s.t,
            output: s.output,
            labor: s.labor,
            profits: s.profits,
            consumption: s.consumption,
            value_added: s.value_added,
            x: industries.then_some(s.x),
        },
    }
}

async fn simulate(State(s): State<AppState>, body: Bytes) -> ApiResult<SimulateResponse> {
    let req: SimulateRequest = parse_body(&body)?;
    let out = blocking(move || {
        let d = &s.dataset;
        let params = apply_param_overrides(&s.params, &req.params)?;
        let scenario = req.spec().resolve(&d.calibration, d.codes())?;
        let horizon = req.horizon.unwrap_or(params.t_end_pandemic);
        let r = commands::simulate(d, &params, &scenario, horizon)?;
        Ok(simulate_response(r, req.industries))
    })
    .await?;
    Ok(Json(out))
}

/// Body of `POST /sensitivity`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensitivityBody {
    pub sigma: f64,
    pub n_runs: usize,
    pub seed: u64,
    pub mode: PerturbMode,
    pub scenario: Option<String>,
    pub horizon: Option<usize>,
    pub params: Map<String, Value>,
}

impl Default for SensitivityBody {
    fn default() -> Self {
        SensitivityBody {
            sigma: 0.2,
            n_runs: 100,
            seed: 42,
            mode: PerturbMode::Both,
            scenario: None,
            horizon: None,
            params: Map::new(),
        }
    }
}

async fn sensitivity(State(s): State<AppState>, body: Bytes) -> ApiResult<EnsembleSummary> {
    let req: SensitivityBody = parse_body(&body)?;
    let out = blocking(move || {
        let d = &s.dataset;
        let params = apply_param_overrides(&s.params, &req.params)?;
        let scenario = commands::ensemble_spec(&ScenarioSpec {
            scenario: req.scenario.clone(),
            ..Default::default()
        })
        .resolve(&d.calibration, d.codes())?;
        let sreq = SensitivityRequest {
            sigma: req.sigma,
            n_runs: req.n_runs,
            seed: req.seed,
            mode: req.mode,
            horizon: req.horizon.unwrap_or(params.t_end_pandemic),
        };
        commands::sensitivity(d, &params, &scenario, &sreq)
    })
    .await?;
    Ok(Json(out))
}
