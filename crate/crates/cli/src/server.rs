//! Axum front end over [`SessionStore::handle`].

use std::sync::Arc;

use axum::extract::State;
use axum::http::{Method, StatusCode, Uri};
use axum::{Json, Router};
use liftforge_core::session::SessionStore;
use serde_json::Value;
use tokio::net::TcpListener;

async fn dispatch(State(store): State<Arc<SessionStore>>, method: Method, uri: Uri, body: String) -> (StatusCode, Json<Value>) {
    let r = store.handle(method.as_str(), uri.path(), &body);
    (StatusCode::from_u16(r.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR), Json(r.body))
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new().fallback(dispatch).with_state(store)
}

pub async fn serve(listener: TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router(Arc::new(SessionStore::new()))).await
}
