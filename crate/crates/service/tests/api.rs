use std::sync::OnceLock;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use reopen_core::Dataset;
use reopen_service::api::{router, AppState};
use serde_json::{json, Value};
use tower::ServiceExt;

fn state() -> AppState {
    static STATE: OnceLock<AppState> = OnceLock::new();
    STATE
        .get_or_init(|| {
            let d = Dataset::bundled().unwrap();
            let params = d.params.clone();
            AppState::new(d, params)
        })
        .clone()
}

async fn call(method: &str, uri: &str, body: Option<&str>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = router(state()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, value)
}

async fn post(uri: &str, body: Value) -> (StatusCode, Value) {
    call("POST", uri, Some(&body.to_string())).await
}

#[tokio::test]
async fn scenarios_lists_the_six_policies() {
    let (status, v) = call("GET", "/scenarios", None).await;
    assert_eq!(status, StatusCode::OK);
    let ids: Vec<&str> = v["scenarios"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["id"].as_str().unwrap())
        .collect();
    assert_eq!(ids.len(), 6);
    assert!(ids.contains(&"AllExceptConsumerFacingSchools"));
    let open = &v["scenarios"][5];
    assert_eq!(open["id"], "Open");
    assert_eq!(open["open"].as_array().unwrap().len(), 55);
    assert_eq!(open["lambda"]["delta_s"], 1.0);
}

#[tokio::test]
async fn calibration_summarizes_the_dataset() {
    let (status, v) = call("GET", "/calibration", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["economy"]["n_industries"], 55);
    assert!((v["onsite_share"].as_f64().unwrap() - 0.37).abs() < 0.015);
    assert!((v["beta0"]["work"].as_f64().unwrap() - 0.29).abs() < 0.005);
    assert_eq!(v["params"]["tau"], 10.0);
}

#[tokio::test]
async fn simulate_lockdown_returns_horizon_plus_one_days() {
    let (status, v) = post("/simulate", json!({"scenario": "lockdown", "horizon": 120})).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["horizon"], 120);
    assert_eq!(v["series"]["t"].as_array().unwrap().len(), 121);
    assert_eq!(v["series"]["value_added_rel"][0], 1.0);
    assert!((v["r0"]["r0"].as_f64().unwrap() - 0.62).abs() < 1e-12);
    assert_eq!(v["va_change"]["window_mean_pp"], 0.0);
    assert!(v["series"].get("x").is_none());
}

#[tokio::test]
async fn simulate_defaults_to_full_pandemic() {
    let (status, v) = post("/simulate", json!({})).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["series"]["t"].as_array().unwrap().len(), 243);
}

#[tokio::test]
async fn custom_policy_and_parameter_overrides() {
    let body = json!({
        "scenario": "lockdown",
        "open": ["N", "G47"],
        "params": {"prod_fn": "linear"},
        "horizon": 95,
        "industries": true
    });
    let (status, v) = post("/simulate", body).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["scenario"], "Custom");
    assert_eq!(v["open"], json!(["G47", "N"]));
    assert!(v["va_change"]["window_mean_pp"].as_f64().unwrap() > 0.0);
    assert_eq!(v["series"]["x"].as_array().unwrap().len(), 96);
    assert_eq!(v["series"]["x"][0].as_array().unwrap().len(), 55);
}

#[tokio::test]
async fn delta_out_of_range_is_unprocessable() {
    let (status, v) = post("/simulate", json!({"delta_w": {"K64": 2.0}})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
    assert!(
        v["error"].as_str().unwrap().contains("K64") || v["error"].as_str().unwrap().contains("2")
    );
}

#[tokio::test]
async fn invalid_requests() {
    let cases = [
        ("{\"scenario\": ", StatusCode::BAD_REQUEST),
        ("[1, 2]", StatusCode::BAD_REQUEST),
        ("{\"horizon\": \"long\"}", StatusCode::BAD_REQUEST),
        ("{\"bogus\": 1}", StatusCode::BAD_REQUEST),
        (
            "{\"scenario\": \"nowhere\"}",
            StatusCode::UNPROCESSABLE_ENTITY,
        ),
        ("{\"open\": [\"ZZ9\"]}", StatusCode::UNPROCESSABLE_ENTITY),
        ("{\"params\": {\"b\": 7}}", StatusCode::UNPROCESSABLE_ENTITY),
        (
            "{\"params\": {\"nonsense\": 1}}",
            StatusCode::UNPROCESSABLE_ENTITY,
        ),
        ("{\"horizon\": 0}", StatusCode::UNPROCESSABLE_ENTITY),
    ];
    for (body, want) in cases {
        let (status, v) = call("POST", "/simulate", Some(body)).await;
        assert_eq!(status, want, "{body} -> {v}");
        assert!(v["error"].is_string());
    }
}

#[tokio::test]
async fn numerical_failure_is_500() {
    // A zero inventory adjustment time makes every order infinite.
    let body = json!({"params": {"tau": 1e-320}, "horizon": 5});
    let (status, v) = post("/simulate", body).await;
    assert_eq!(status, StatusCode::INTERNAL_SERVER_ERROR, "{v}");
    assert!(v["error"].as_str().unwrap().contains("numerical"));
}

#[tokio::test]
async fn sensitivity_bands_are_nested_and_deterministic() {
    let body = json!({"sigma": 0.1, "n_runs": 8, "seed": 3, "horizon": 40});
    let (status, a) = post("/sensitivity", body.clone()).await;
    assert_eq!(status, StatusCode::OK, "{a}");
    let (_, b) = post("/sensitivity", body).await;
    assert_eq!(a, b);
    let q = |k: &str, t: usize| a[k][t].as_f64().unwrap();
    for t in 0..=40 {
        assert!(q("q025", t) <= q("q25", t) && q("q25", t) <= q("median", t));
        assert!(q("median", t) <= q("q75", t) && q("q75", t) <= q("q975", t));
    }
    let (status, _) = post("/sensitivity", json!({"sigma": 3.0})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = post("/sensitivity", json!({"n_runs": 0})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn scenario_report_has_plot_fields() {
    let (status, v) = call("GET", "/scenarios/report", None).await;
    assert_eq!(status, StatusCode::OK);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for r in rows {
        for k in [
            "scenario",
            "beta",
            "r0",
            "va_change_pp",
            "month_end_change_pp",
        ] {
            assert!(r.get(k).is_some(), "{k}");
        }
        assert!(r.get("value_added").is_none());
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_requests_match_serial() {
    let bodies: Vec<Value> = ["lockdown", "open", "manuf-construction", "lockdown"]
        .iter()
        .map(|s| json!({"scenario": s, "horizon": 70}))
        .collect();
    let mut serial = Vec::new();
    for b in &bodies {
        serial.push(post("/simulate", b.clone()).await);
    }
    let handles: Vec<_> = bodies
        .iter()
        .cloned()
        .map(|b| tokio::spawn(async move { post("/simulate", b).await }))
        .collect();
    for (h, want) in handles.into_iter().zip(&serial) {
        assert_eq!(&h.await.unwrap(), want);
    }
    assert_eq!(serial[0], serial[3]);
}
