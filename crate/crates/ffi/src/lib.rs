//! C ABI over the battlesheep crate.
//!
//! Positions are opaque heap handles created by `bs_position_parse`,
//! `bs_position_apply` or `bs_compile` and released with
//! `bs_position_free`. Every fallible call returns a [`BsStatus`]; on failure
//! `bs_last_error` describes the problem until the next call on the same
//! thread. Strings returned to the caller are freed with `bs_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Duration;

use battlesheep::reducer::compile;
use battlesheep::{
    parse_board, serialize_board, solve_with, Direction, HexCoord, Move, Outcome, Player, Position, SolveConfig,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    IllegalMove = 4,
    OutOfRange = 5,
    Budget = 6,
    Compile = 7,
    Panic = 8,
}

/// Opaque board handle.
pub struct BsPosition {
    position: Position,
    moves: Vec<Move>,
}

impl BsPosition {
    fn boxed(position: Position) -> *mut BsPosition {
        let moves = position.legal_moves();
        Box::into_raw(Box::new(BsPosition { position, moves }))
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BsMove {
    pub q: i32,
    pub r: i32,
    /// 0..=5, counter-clockwise from +q.
    pub dir: u8,
    pub count: u32,
}

impl From<Move> for BsMove {
    fn from(m: Move) -> Self {
        BsMove { q: m.from.q, r: m.from.r, dir: m.dir, count: m.count }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BsSolveResult {
    /// 1 if the player to move wins, 0 if they lose.
    pub win: u8,
    /// Meaningful only when `win` is 1.
    pub best_move: BsMove,
    pub nodes: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: BsStatus, msg: impl ToString) -> BsStatus {
    let text = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
    status
}

fn guard(f: impl FnOnce() -> BsStatus) -> BsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::default());
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(BsStatus::Panic, "internal panic"))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, BsStatus> {
    if s.is_null() {
        return Err(fail(BsStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|e| fail(BsStatus::InvalidUtf8, e))
}

/// Message for the last failed call on this thread; empty after success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn bs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a board file.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_position_parse(text: *const c_char, out: *mut *mut BsPosition) -> BsStatus {
    guard(|| {
        if out.is_null() {
            return fail(BsStatus::NullPointer, "null out");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_board(text) {
            Ok(p) => {
                *out = BsPosition::boxed(p);
                BsStatus::Ok
            }
            Err(e) => fail(BsStatus::Parse, e),
        }
    })
}

/// Compiles a circuit description to a board.
///
/// # Safety
/// `circuit` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_compile(circuit: *const c_char, out: *mut *mut BsPosition) -> BsStatus {
    guard(|| {
        if out.is_null() {
            return fail(BsStatus::NullPointer, "null out");
        }
        let text = match read_str(circuit) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match compile(text) {
            Ok(p) => {
                *out = BsPosition::boxed(p);
                BsStatus::Ok
            }
            Err(e) => fail(BsStatus::Compile, e),
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bs_position_free(p: *mut BsPosition) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// 0 when Blue is to move, 1 for Red, -1 on null.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bs_position_to_move(p: *const BsPosition) -> i32 {
    match p.as_ref() {
        Some(h) if h.position.to_move() == Player::Blue => 0,
        Some(_) => 1,
        None => -1,
    }
}

/// Number of legal moves for the player to move.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bs_position_move_count(p: *const BsPosition, out: *mut usize) -> BsStatus {
    guard(|| match (p.as_ref(), out.is_null()) {
        (Some(h), false) => {
            *out = h.moves.len();
            BsStatus::Ok
        }
        _ => fail(BsStatus::NullPointer, "null argument"),
    })
}

/// The `index`th legal move, in the engine's stable order.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bs_position_move(p: *const BsPosition, index: usize, out: *mut BsMove) -> BsStatus {
    guard(|| {
        let (Some(h), false) = (p.as_ref(), out.is_null()) else {
            return fail(BsStatus::NullPointer, "null argument");
        };
        match h.moves.get(index) {
            Some(&m) => {
                *out = m.into();
                BsStatus::Ok
            }
            None => fail(BsStatus::OutOfRange, format!("move {index} of {}", h.moves.len())),
        }
    })
}

/// Plays `m` and returns the successor as a new handle; `p` is unchanged.
///
/// # Safety
/// `p` must be a live handle, `m` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bs_position_apply(
    p: *const BsPosition,
    m: *const BsMove,
    out: *mut *mut BsPosition,
) -> BsStatus {
    guard(|| {
        let (Some(h), Some(m), false) = (p.as_ref(), m.as_ref(), out.is_null()) else {
            return fail(BsStatus::NullPointer, "null argument");
        };
        let Some(dir) = Direction::from_index(m.dir) else {
            return fail(BsStatus::IllegalMove, format!("direction {}", m.dir));
        };
        match h.position.apply_move(&Move::new(HexCoord::new(m.q, m.r), dir, m.count)) {
            Ok(next) => {
                *out = BsPosition::boxed(next);
                BsStatus::Ok
            }
            Err(e) => fail(BsStatus::IllegalMove, e),
        }
    })
}

/// Board file text; free with `bs_string_free`.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bs_position_serialize(p: *const BsPosition, out: *mut *mut c_char) -> BsStatus {
    guard(|| {
        let (Some(h), false) = (p.as_ref(), out.is_null()) else {
            return fail(BsStatus::NullPointer, "null argument");
        };
        // Board text never contains NUL.
        *out = CString::new(serialize_board(&h.position)).expect("no NUL").into_raw();
        BsStatus::Ok
    })
}

/// # Safety
/// `s` must be null or come from `bs_position_serialize`.
#[no_mangle]
pub unsafe extern "C" fn bs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Decides the position. Zero limits select the defaults.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bs_solve(
    p: *const BsPosition,
    max_nodes: u64,
    max_seconds: u64,
    out: *mut BsSolveResult,
) -> BsStatus {
    guard(|| {
        let (Some(h), false) = (p.as_ref(), out.is_null()) else {
            return fail(BsStatus::NullPointer, "null argument");
        };
        let mut config = SolveConfig::default();
        if max_nodes > 0 {
            config.max_nodes = max_nodes;
        }
        if max_seconds > 0 {
            config.max_time = Duration::from_secs(max_seconds);
        }
        match solve_with(&h.position, &config) {
            Ok(r) => {
                *out = BsSolveResult {
                    win: u8::from(r.outcome == Outcome::Win),
                    best_move: r.best_move.map(BsMove::from).unwrap_or_default(),
                    nodes: r.nodes_visited,
                };
                BsStatus::Ok
            }
            // The only other error is cancellation, which this API never requests.
            Err(e) => fail(BsStatus::Budget, e),
        }
    })
}
