use std::collections::{BTreeMap, BTreeSet};

use crate::board::{Cell, Owner, Player, Position};
use crate::hex::HexCoord;

use super::{template, GadgetError, GadgetKind, Pose};

/// Cells between a port and its driver, and between a port and a sink's wall.
pub const STUB_LEN: i32 = 2;

/// A closed test board around one gadget.
///
/// Each In port is fed by a stub wire of [`STUB_LEN`] cells ending at the
/// remains of an upstream port stack (a single token). An active input leaves
/// the stub empty. An inactive input has the upstream excess token already
/// slid down the stub, parked wherever it stopped. Each Out port drains into a
/// stub of [`STUB_LEN`] empty cells capped by a blocked cell. Red gets a
/// separate makeup strip sized to the gadget's Blue budget.
#[derive(Debug, Clone)]
pub struct Harness {
    pub kind: GadgetKind,
    pub pattern: Vec<bool>,
    /// Gadget, drivers and sinks, without the makeup strip.
    pub core: BTreeMap<HexCoord, Cell>,
    pub makeup: BTreeMap<HexCoord, Cell>,
    pub gadget_cells: BTreeSet<HexCoord>,
    /// Per Out port: the port cell followed by its sink stub.
    pub sinks: Vec<(&'static str, Vec<HexCoord>)>,
}

impl Harness {
    /// Full closed board, Blue to move.
    pub fn position(&self) -> Position {
        let cells = self.core.iter().chain(&self.makeup).map(|(&c, &v)| (c, v));
        Position::from_cells(cells, Player::Blue).expect("harness cells are valid")
    }

    /// The gadget with its drivers and sinks only.
    pub fn core_position(&self, to_move: Player) -> Position {
        Position::new(self.core.clone(), to_move).expect("harness cells are valid")
    }

    /// Bitmask of sinks whose cells are all empty in `p`.
    pub fn active_outputs(&self, p: &Position) -> u32 {
        self.sinks
            .iter()
            .enumerate()
            .filter(|(_, (_, cells))| cells.iter().all(|&c| p.cell(c).is_empty()))
            .fold(0, |m, (i, _)| m | 1 << i)
    }
}

pub fn harness(kind: GadgetKind, pattern: &[bool]) -> Result<Harness, GadgetError> {
    let g = template(kind)?;
    let inputs: Vec<_> = g.inputs().cloned().collect();
    if inputs.len() != pattern.len() {
        return Err(GadgetError::ArityMismatch { kind, expected: inputs.len(), got: pattern.len() });
    }
    let mut core = g.footprint.clone();
    let gadget_cells = core.keys().copied().collect();
    let mut add = |at: HexCoord, cell: Cell| {
        let prev = core.insert(at, cell);
        assert!(prev.is_none(), "harness stub for {kind} collides with the gadget at {at}");
    };
    let mut drivers = Vec::new();
    for (p, &active) in inputs.iter().zip(pattern) {
        let d = p.outward.offset();
        for i in 1..=STUB_LEN {
            add(p.at + d * i, Cell::Empty);
        }
        let base = p.at + d * (STUB_LEN + 1);
        add(base, Cell::stack(Owner::Neutral, 1));
        if !active {
            drivers.push((base, -p.outward));
        }
    }
    let mut sinks = Vec::new();
    for p in g.outputs() {
        let d = p.outward.offset();
        let mut cells = vec![p.at];
        for i in 1..=STUB_LEN {
            add(p.at + d * i, Cell::Empty);
            cells.push(p.at + d * i);
        }
        add(p.at + d * (STUB_LEN + 1), Cell::Blocked);
        sinks.push((p.name, cells));
    }
    // Park each inactive driver's excess token where its slide would stop.
    for (base, dir) in drivers {
        let probe = Position::new(core.clone(), Player::Blue).expect("valid");
        let stop = probe
            .slide_destination(base, dir)
            .expect("driver base is a stack")
            .expect("inactive driver always has room to slide");
        core.insert(stop, Cell::stack(Owner::Blue, 1));
    }

    let makeup = if g.blue_budget > 0 && !matches!(kind, GadgetKind::Makeup(_)) {
        let strip = template(GadgetKind::Makeup(g.blue_budget))?;
        let max_q = core.keys().map(|c| c.q).max().unwrap_or(0);
        let min_r = core.keys().map(|c| c.r).min().unwrap_or(0);
        strip.instantiate(Pose::new(HexCoord::new(max_q + 3, min_r - 3), 0, false)).cells
    } else {
        BTreeMap::new()
    };
    Ok(Harness { kind, pattern: pattern.to_vec(), core, makeup, gadget_cells, sinks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture;

    #[test]
    fn or_with_one_plugged_input() {
        let h = harness(GadgetKind::Or, &[true, false]).unwrap();
        let g = template(GadgetKind::Or).unwrap();
        let in1 = g.port("In 1").unwrap();
        let in2 = g.port("In 2").unwrap();
        assert!(h.core[&in1.at].is_empty());
        assert!(h.core[&in1.at.neighbor(in1.outward)].is_empty());
        assert_eq!(h.core[&in2.at], Cell::stack(Owner::Blue, 1));
        assert_eq!(h.position().to_move(), Player::Blue);
        // Makeup(1) for Red, away from everything else.
        assert_eq!(h.makeup.values().filter(|c| matches!(c, Cell::Stack { owner: Owner::Red, count: 2 })).count(), 1);
    }

    #[test]
    fn goal_harness_embeds_the_goal_board() {
        let h = harness(GadgetKind::Goal, &[true]).unwrap();
        let fig = fixture("fig5");
        for (c, v) in fig.cells() {
            assert_eq!(h.core[c], *v);
        }
    }

    #[test]
    fn variable_harness_has_an_out_sink() {
        let h = harness(GadgetKind::Variable, &[]).unwrap();
        let fig = fixture("fig6");
        for (c, v) in fig.cells() {
            assert_eq!(h.core[c], *v);
        }
        assert_eq!(h.sinks.len(), 1);
        assert_eq!(h.sinks[0].1.len(), 3);
        assert_eq!(h.active_outputs(&h.core_position(Player::Blue)), 1);
    }

    #[test]
    fn arity_is_checked() {
        assert_eq!(
            harness(GadgetKind::And, &[true]).unwrap_err(),
            GadgetError::ArityMismatch { kind: GadgetKind::And, expected: 2, got: 1 }
        );
    }

    #[test]
    fn inactive_wire_input_parks_at_the_far_end() {
        let h = harness(GadgetKind::WireStraight(3), &[false]).unwrap();
        let p = h.core_position(Player::Blue);
        assert_eq!(h.active_outputs(&p), 0);
        let last = *h.sinks[0].1.last().unwrap();
        assert_eq!(p.cell(last), Cell::stack(Owner::Blue, 1));
    }
}
