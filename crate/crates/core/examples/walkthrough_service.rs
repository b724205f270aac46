//! Start the HTTP service on a free port and drive one session over TCP.
//!
//! For a long-running server use `statebdd serve fixtures/seminar.scdl`.

use std::sync::Arc;

use statebdd::fixtures;
use statebdd::walkthrough::service::{router, AppState, DEFAULT_MODEL_ID};
use statebdd::walkthrough::store::SessionStore;
use tokio::io::{AsyncReadExt, AsyncWriteExt};
use tokio::net::{TcpListener, TcpStream};

async fn request(addr: std::net::SocketAddr, method: &str, path: &str, body: &str) -> String {
    let mut stream = TcpStream::connect(addr).await.unwrap();
    let head = format!(
        "{method} {path} HTTP/1.1\r\nHost: {addr}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        body.len()
    );
    stream.write_all(head.as_bytes()).await.unwrap();
    stream.write_all(body.as_bytes()).await.unwrap();
    let mut reply = String::new();
    stream.read_to_string(&mut reply).await.unwrap();
    let (status, rest) = reply.split_once("\r\n").unwrap();
    let body = rest.split_once("\r\n\r\n").map(|(_, b)| b).unwrap_or("");
    println!(
        "{method} {path}\n  {status}\n  {}",
        body.replace('\n', "\n  ")
    );
    body.to_string()
}

#[tokio::main]
async fn main() -> statebdd::Result<()> {
    let state = Arc::new(AppState::new(SessionStore::new()));
    state.add_model(DEFAULT_MODEL_ID, fixtures::seminar())?;
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, router(state)).await.unwrap() });

    let created = request(addr, "POST", "/api/models/default/sessions", "").await;
    let view: serde_json::Value = serde_json::from_str(&created).unwrap();
    let id = view["sessionId"].as_str().unwrap().to_string();

    let fire = format!("/api/sessions/{id}/fire");
    request(addr, "POST", &fire, r#"{"transitionId":"t1"}"#).await;
    // t4 leaves Scheduled, not Proposed: 409 E_NOT_ENABLED
    request(addr, "POST", &fire, r#"{"transitionId":"t4"}"#).await;
    request(addr, "GET", &format!("/api/sessions/{id}/trace"), "").await;
    request(
        addr,
        "GET",
        "/api/models/default/dot?highlight=proposed",
        "",
    )
    .await;
    Ok(())
}
