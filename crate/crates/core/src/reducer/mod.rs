//! Compiler from monotone constraint-logic circuits to Battle Sheep boards.
//!
//! A circuit is parsed, its nodes are placed as gadgets, edges are routed
//! as wires with turns, and Red receives a makeup strip sized so that move
//! parity leaves the goal move decisive. Blue moves first on the result and
//! wins iff Blue wins the circuit game moving first.

mod circuit;
mod layout;

use thiserror::Error;

use crate::board::Position;
use crate::gadgets::{GadgetKind, Pose};
use crate::hex::HexCoord;

pub use circuit::{parse_circuit, Circuit, CircuitError, Edge, Node, NodeKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    /// Node id, wire id (`src->dst#part`) or `makeup`.
    pub id: String,
    pub kind: GadgetKind,
    pub pose: Pose,
}

/// Instance counts: `a` turns, `b` ors, `c` ands, `d` choices, `e` fanouts,
/// and the makeup size `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LayoutStats {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub e: u32,
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub placements: Vec<Placement>,
    pub board: Position,
    pub stats: LayoutStats,
}

impl Layout {
    pub fn count(&self, pred: impl Fn(GadgetKind) -> bool) -> usize {
        self.placements.iter().filter(|p| pred(p.kind)).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("cannot route edge {edge}")]
    Routing { edge: String },
    #[error("{placed} overlaps {existing} at {at}")]
    Overlap { at: HexCoord, placed: String, existing: String },
    #[error("open cells {a} and {b} of different components touch")]
    Contact { a: HexCoord, b: HexCoord },
    #[error("{tokens} tokens on {spaces} open cells")]
    TooManyTokens { tokens: u64, spaces: u64 },
    #[error("gadget error: {0}")]
    Gadget(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error(transparent)]
    Parse(#[from] CircuitError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

/// Red filler moves that balance Blue's gadget moves: one per turn plus each
/// logic gadget's Blue budget.
pub fn makeup_size(c: &Circuit, a: u32) -> u32 {
    makeup_size_from_counts(
        a,
        c.count(NodeKind::Or) as u32,
        c.count(NodeKind::And) as u32,
        c.count(NodeKind::Choice) as u32,
        c.count(NodeKind::Fanout) as u32,
    )
}

/// [`makeup_size`] on raw instance counts.
pub fn makeup_size_from_counts(a: u32, b: u32, c: u32, d: u32, e: u32) -> u32 {
    a * GadgetKind::Turn30L.blue_budget()
        + b * GadgetKind::Or.blue_budget()
        + c * GadgetKind::And.blue_budget()
        + d * GadgetKind::Choice.blue_budget()
        + e * GadgetKind::Fanout.blue_budget()
}

pub fn layout(c: &Circuit) -> Result<Layout, LayoutError> {
    layout::layout(c)
}

pub fn compile_layout(text: &str) -> Result<Layout, CompileError> {
    Ok(layout(&parse_circuit(text)?)?)
}

pub fn compile(text: &str) -> Result<Position, CompileError> {
    Ok(compile_layout(text)?.board)
}
