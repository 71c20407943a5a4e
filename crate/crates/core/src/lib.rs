//! Battle Sheep: rules engine, exact solver, gadget catalog with an
//! exhaustive verifier, and a compiler from monotone constraint-logic
//! circuits to Battle Sheep boards.

pub mod board;
pub mod fixtures;
pub mod format;
pub mod gadgets;
pub mod hex;
pub mod reducer;
pub mod service;
pub mod solver;

pub use board::{Cell, Move, Owner, Player, Position, RulesError};
pub use format::{parse_board, serialize_board, BoardFormatError};
pub use hex::{Direction, HexCoord};
pub use solver::{
    perft, solve, solve_cancellable, solve_reference, solve_with, Outcome, SolveConfig, SolveError, SolveReport,
};
