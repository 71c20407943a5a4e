//! Local HTTP-JSON service over the engine, solver and fixtures.
//!
//! By default the process holds a single game session. With `multi` set,
//! requests pick a session with `?session=<id>`; `POST /api/new` without
//! one opens a fresh session and returns its id.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::Mutex;

use crate::board::{Cell, Move, Position};
use crate::fixtures;
use crate::format::parse_board;
use crate::hex::{Direction, HexCoord};
use crate::solver::{solve_cancellable, Outcome, SolveConfig, SolveError};

/// Node budget for solver hints.
pub const HINT_NODES: u64 = 10_000_000;
pub const HINT_SECONDS: u64 = 60;

const DEFAULT_SESSION: &str = "default";

#[derive(Debug, Clone)]
struct Session {
    initial: Position,
    current: Position,
    history: Vec<Move>,
}

impl Session {
    fn new(p: Position) -> Session {
        Session { initial: p.clone(), current: p, history: Vec::new() }
    }

    fn replay(&self) -> Position {
        let mut p = self.initial.clone();
        for m in &self.history {
            p = p.apply_move(m).expect("history holds legal moves");
        }
        p
    }
}

struct Shared {
    multi: bool,
    initial: Position,
    sessions: std::sync::Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
    /// Raised to stop every running solve.
    cancel: std::sync::Mutex<Vec<Arc<AtomicBool>>>,
}

#[derive(Clone)]
pub struct AppState(Arc<Shared>);

impl AppState {
    pub fn new(initial: Position, multi: bool) -> AppState {
        let sessions =
            HashMap::from([(DEFAULT_SESSION.to_string(), Arc::new(Mutex::new(Session::new(initial.clone()))))]);
        AppState(Arc::new(Shared {
            multi,
            initial,
            sessions: std::sync::Mutex::new(sessions),
            next_id: AtomicU64::new(1),
            cancel: std::sync::Mutex::new(Vec::new()),
        }))
    }

    fn session_id(&self, q: &SessionQuery) -> String {
        match (&q.session, self.0.multi) {
            (Some(id), true) => id.clone(),
            _ => DEFAULT_SESSION.to_string(),
        }
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.0
            .sessions
            .lock()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("no session `{id}`")))
    }
}

#[derive(Debug, Deserialize, Default)]
pub struct SessionQuery {
    session: Option<String>,
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CellJson {
    pub q: i32,
    pub r: i32,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub owner: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<u32>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq, Clone)]
pub struct MoveJson {
    pub from: HexCoord,
    pub dir: u8,
    pub count: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dest: Option<HexCoord>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub struct StateJson {
    pub session_id: String,
    pub cells: Vec<CellJson>,
    pub to_move: String,
    pub history: Vec<MoveJson>,
    /// The player to move has no legal move.
    pub game_over: bool,
}

fn move_json(p: &Position, m: &Move) -> MoveJson {
    MoveJson { from: m.from, dir: m.dir, count: m.count, dest: p.destination(m).ok() }
}

fn state_json(id: &str, s: &Session) -> StateJson {
    let cells = s
        .current
        .cells()
        .iter()
        .map(|(c, v)| {
            let (kind, owner, count) = match *v {
                Cell::Blocked => ("blocked", None, None),
                Cell::Empty => ("empty", None, None),
                Cell::Stack { owner, count } => ("stack", Some(owner.letter().to_string()), Some(count)),
            };
            CellJson { q: c.q, r: c.r, kind: kind.into(), owner, count }
        })
        .collect();
    let mut p = s.initial.clone();
    let mut history = Vec::new();
    for m in &s.history {
        history.push(move_json(&p, m));
        p = p.apply_move(m).expect("history holds legal moves");
    }
    StateJson {
        session_id: id.to_string(),
        cells,
        to_move: s.current.to_move().letter().to_string(),
        history,
        game_over: s.current.is_loss(),
    }
}

async fn get_state(State(app): State<AppState>, Query(q): Query<SessionQuery>) -> Result<Json<StateJson>, ApiError> {
    let id = app.session_id(&q);
    let s = app.session(&id)?;
    let s = s.lock().await;
    Ok(Json(state_json(&id, &s)))
}

async fn get_moves(
    State(app): State<AppState>,
    Query(q): Query<SessionQuery>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let s = app.session(&app.session_id(&q))?;
    let s = s.lock().await;
    let moves: Vec<MoveJson> = s.current.legal_moves().iter().map(|m| move_json(&s.current, m)).collect();
    Ok(Json(json!({ "moves": moves })))
}

#[derive(Debug, Deserialize)]
pub struct MoveRequest {
    from: HexCoord,
    dir: u8,
    count: u32,
}

async fn post_move(
    State(app): State<AppState>,
    Query(q): Query<SessionQuery>,
    Json(req): Json<MoveRequest>,
) -> Result<Json<StateJson>, ApiError> {
    let id = app.session_id(&q);
    let s = app.session(&id)?;
    let mut s = s.lock().await;
    let conflict = |msg: String| ApiError(StatusCode::CONFLICT, msg);
    let dir = Direction::from_index(req.dir).ok_or_else(|| conflict(format!("direction {} out of range", req.dir)))?;
    let m = Move::new(req.from, dir, req.count);
    let next = s.current.apply_move(&m).map_err(|e| conflict(e.to_string()))?;
    s.current = next;
    s.history.push(m);
    Ok(Json(state_json(&id, &s)))
}

async fn post_undo(State(app): State<AppState>, Query(q): Query<SessionQuery>) -> Result<Json<StateJson>, ApiError> {
    let id = app.session_id(&q);
    let s = app.session(&id)?;
    let mut s = s.lock().await;
    if s.history.pop().is_none() {
        return Err(ApiError(StatusCode::CONFLICT, "nothing to undo".into()));
    }
    s.current = s.replay();
    Ok(Json(state_json(&id, &s)))
}

#[derive(Debug, Deserialize)]
pub struct NewRequest {
    board: Option<String>,
}

async fn post_new(
    State(app): State<AppState>,
    Query(q): Query<SessionQuery>,
    Json(req): Json<NewRequest>,
) -> Result<Json<StateJson>, ApiError> {
    let p = match req.board {
        Some(text) => parse_board(&text).map_err(|e| ApiError(StatusCode::BAD_REQUEST, e.to_string()))?,
        None => app.0.initial.clone(),
    };
    let id = match (&q.session, app.0.multi) {
        (None, true) => format!("s{}", app.0.next_id.fetch_add(1, Ordering::Relaxed)),
        _ => app.session_id(&q),
    };
    let session = Session::new(p);
    let json = state_json(&id, &session);
    let slot = app
        .0
        .sessions
        .lock()
        .expect("session map lock")
        .entry(id)
        .or_insert_with(|| Arc::new(Mutex::new(session.clone())))
        .clone();
    *slot.lock().await = session;
    Ok(Json(json))
}

#[derive(Debug, Deserialize, Default)]
pub struct SolveRequest {
    nodes: Option<u64>,
    seconds: Option<u64>,
}

/// Raises the flag when dropped, so an abandoned request stops its search.
struct CancelOnDrop(Arc<AtomicBool>);

impl Drop for CancelOnDrop {
    fn drop(&mut self) {
        self.0.store(true, Ordering::Relaxed);
    }
}

async fn post_solve(
    State(app): State<AppState>,
    Query(q): Query<SessionQuery>,
    body: Option<Json<SolveRequest>>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    // Snapshot, then search without holding the session.
    let p = {
        let s = app.session(&app.session_id(&q))?;
        let s = s.lock().await;
        s.current.clone()
    };
    let config = SolveConfig::with_limits(
        req.nodes.unwrap_or(HINT_NODES),
        Duration::from_secs(req.seconds.unwrap_or(HINT_SECONDS)),
    );
    let flag = Arc::new(AtomicBool::new(false));
    app.0.cancel.lock().expect("cancel list lock").push(flag.clone());
    let guard = CancelOnDrop(flag.clone());
    let p2 = p.clone();
    let result = tokio::task::spawn_blocking(move || solve_cancellable(&p2, &config, Some(&flag)))
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    drop(guard);
    app.0.cancel.lock().expect("cancel list lock").retain(|f| !f.load(Ordering::Relaxed));
    Ok(Json(match result {
        Ok(r) => json!({
            "outcome": if r.outcome == Outcome::Win { "win" } else { "loss" },
            "bestMove": r.best_move.map(|m| move_json(&p, &m)),
            "nodes": r.nodes_visited,
            "elapsedMs": r.elapsed.as_millis() as u64,
        }),
        Err(SolveError::ResourceLimit { nodes, elapsed }) => json!({
            "outcome": "unknown",
            "reason": "budget exceeded",
            "nodes": nodes,
            "elapsedMs": elapsed.as_millis() as u64,
        }),
        Err(SolveError::Cancelled { nodes }) => json!({ "outcome": "unknown", "reason": "cancelled", "nodes": nodes }),
        Err(e) => return Err(ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())),
    }))
}

async fn post_cancel(State(app): State<AppState>) -> Json<serde_json::Value> {
    let mut flags = app.0.cancel.lock().expect("cancel list lock");
    let n = flags.len();
    for f in flags.drain(..) {
        f.store(true, Ordering::Relaxed);
    }
    Json(json!({ "cancelled": n }))
}

async fn get_gadgets() -> Json<Vec<&'static str>> {
    Json(fixtures::names().collect())
}

async fn get_gadget(Path(name): Path<String>) -> Result<String, ApiError> {
    fixtures::fixture_text(&name)
        .map(str::to_string)
        .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("no fixture `{name}`")))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/state", get(get_state))
        .route("/api/moves", get(get_moves))
        .route("/api/move", post(post_move))
        .route("/api/undo", post(post_undo))
        .route("/api/new", post(post_new))
        .route("/api/solve", post(post_solve))
        .route("/api/solve/cancel", post(post_cancel))
        .route("/api/gadgets", get(get_gadgets))
        .route("/api/gadgets/{name}", get(get_gadget))
        .with_state(state)
}

/// Serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, initial: Position, multi: bool) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(initial, multi)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
