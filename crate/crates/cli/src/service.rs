//! Stateless JSON-over-HTTP front end. Every request builds its own engine,
//! so concurrent requests share nothing.

use axum::body::Bytes;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::api::{self, ApiError, Limits, MoveDoc, PositionDoc, TrianglePositionDoc};
use crate::spec::SpecDocument;

#[derive(Debug, Deserialize)]
pub struct WindowRequest {
    pub spec: SpecDocument,
    pub x0: i64,
    pub x1: i64,
    pub rows: u32,
}

#[derive(Debug, Deserialize)]
pub struct PositionRequest {
    pub spec: SpecDocument,
    pub position: PositionDoc,
}

#[derive(Debug, Deserialize)]
pub struct ApplyRequest {
    pub spec: SpecDocument,
    pub position: PositionDoc,
    #[serde(rename = "move")]
    pub mv: MoveDoc,
}

#[derive(Debug, Deserialize)]
pub struct TriangleRequest {
    pub spec: SpecDocument,
    pub position: TrianglePositionDoc,
}

#[derive(Debug, Serialize)]
struct Health {
    status: &'static str,
    version: &'static str,
}

struct Failure(ApiError);

impl IntoResponse for Failure {
    fn into_response(self) -> Response {
        let status =
            StatusCode::from_u16(self.0.http_status()).unwrap_or(StatusCode::UNPROCESSABLE_ENTITY);
        (status, Json(self.0)).into_response()
    }
}

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, Failure> {
    serde_json::from_slice(body)
        .map_err(|e| Failure(ApiError::malformed("malformed-request", e.to_string())))
}

/// Runs a request off the async workers; solver calls can be slow.
async fn respond<T, F>(body: Bytes, op: F) -> Response
where
    T: DeserializeOwned + Send + 'static,
    F: FnOnce(T) -> Result<Response, ApiError> + Send + 'static,
{
    let request = match parse::<T>(&body) {
        Ok(r) => r,
        Err(f) => return f.into_response(),
    };
    match tokio::task::spawn_blocking(move || op(request)).await {
        Ok(Ok(resp)) => resp,
        Ok(Err(e)) => Failure(e).into_response(),
        Err(_) => (StatusCode::INTERNAL_SERVER_ERROR, "worker failed").into_response(),
    }
}

fn ok<T: Serialize>(value: T) -> Response {
    Json(value).into_response()
}

pub fn router(limits: Limits) -> Router {
    Router::new()
        .route(
            "/api/health",
            get(|| async {
                Json(Health {
                    status: "ok",
                    version: env!("CARGO_PKG_VERSION"),
                })
            }),
        )
        .route(
            "/api/ca/window",
            post(move |body: Bytes| {
                respond(body, move |r: WindowRequest| {
                    api::ca_window(&r.spec, r.x0, r.x1, r.rows, limits).map(ok)
                })
            }),
        )
        .route(
            "/api/game/moves",
            post(|body: Bytes| {
                respond(body, |r: PositionRequest| {
                    api::game_moves(&r.spec, r.position).map(ok)
                })
            }),
        )
        .route(
            "/api/game/apply",
            post(|body: Bytes| {
                respond(body, |r: ApplyRequest| {
                    api::game_apply(&r.spec, r.position, r.mv).map(ok)
                })
            }),
        )
        .route(
            "/api/game/outcome",
            post(move |body: Bytes| {
                respond(body, move |r: PositionRequest| {
                    api::game_outcome(&r.spec, r.position, limits).map(ok)
                })
            }),
        )
        .route(
            "/api/game/predicate",
            post(move |body: Bytes| {
                respond(body, move |r: PositionRequest| {
                    api::game_predicate(&r.spec, r.position, limits).map(ok)
                })
            }),
        )
        .route(
            "/api/triangle/outcome",
            post(move |body: Bytes| {
                respond(body, move |r: TriangleRequest| {
                    api::triangle_outcome(&r.spec, r.position, limits).map(ok)
                })
            }),
        )
}

pub async fn serve(port: u16, limits: Limits) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(limits)).await
}
