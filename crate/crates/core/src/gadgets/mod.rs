//! Gadget catalog: placeable board fragments with labelled ports, plus the
//! machinery to pose them on the grid and to check their logic exhaustively.

mod catalog;
mod harness;
mod verify;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::board::Cell;
use crate::hex::{Direction, HexCoord};

pub use catalog::template;
pub use harness::{harness, Harness};
pub use verify::{
    corrupted_makeup, makeup_max_red_moves, verify_gadget, verify_makeup, verify_makeup_board, GadgetBehavior,
    VerifyError, VERIFIED_KINDS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GadgetKind {
    WireStraight(u32),
    Turn30L,
    Turn30R,
    Turn60L,
    Turn60R,
    Goal,
    Variable,
    Or,
    And,
    Choice,
    Fanout,
    Makeup(u32),
}

impl GadgetKind {
    pub fn name(&self) -> String {
        match self {
            GadgetKind::WireStraight(n) => format!("WireStraight({n})"),
            GadgetKind::Makeup(k) => format!("Makeup({k})"),
            other => format!("{other:?}"),
        }
    }

    pub fn is_turn(&self) -> bool {
        matches!(self, GadgetKind::Turn30L | GadgetKind::Turn30R | GadgetKind::Turn60L | GadgetKind::Turn60R)
    }

    /// Blue moves the gadget is expected to absorb when its logic is satisfied.
    pub fn blue_budget(&self) -> u32 {
        match self {
            GadgetKind::WireStraight(_) | GadgetKind::Makeup(_) => 0,
            GadgetKind::Turn30L | GadgetKind::Turn30R | GadgetKind::Turn60L | GadgetKind::Turn60R => 1,
            GadgetKind::Goal | GadgetKind::Variable | GadgetKind::Or => 1,
            // The drawn And gadget carries five excess Blue tokens (3-stack plus
            // three 2-stacks), and all five can always be moved.
            GadgetKind::And => 5,
            GadgetKind::Choice => 4,
            GadgetKind::Fanout => 5,
        }
    }

    pub fn red_budget(&self) -> u32 {
        match self {
            GadgetKind::Variable => 1,
            GadgetKind::Makeup(k) => *k,
            _ => 0,
        }
    }
}

impl fmt::Display for GadgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    In,
    Out,
}

/// A labelled Empty cell through which a gadget exchanges signals. The
/// wire attached to the port leaves along `outward`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Port {
    pub name: &'static str,
    pub at: HexCoord,
    pub polarity: Polarity,
    pub outward: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadget {
    pub kind: GadgetKind,
    pub footprint: BTreeMap<HexCoord, Cell>,
    pub ports: Vec<Port>,
    pub blue_budget: u32,
    pub red_budget: u32,
}

impl Gadget {
    pub fn inputs(&self) -> impl Iterator<Item = &Port> {
        self.ports.iter().filter(|p| p.polarity == Polarity::In)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &Port> {
        self.ports.iter().filter(|p| p.polarity == Polarity::Out)
    }

    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }

    /// Excess tokens of the given owner inside the footprint.
    pub fn excess(&self, owner: crate::board::Owner) -> u32 {
        self.footprint
            .values()
            .map(|c| match *c {
                Cell::Stack { owner: o, count } if o == owner => count - 1,
                _ => 0,
            })
            .sum()
    }

    /// The gadget moved into place by `pose`.
    pub fn instantiate(&self, pose: Pose) -> Placed {
        Placed {
            cells: self.footprint.iter().map(|(&c, &v)| (pose.apply(c), v)).collect(),
            ports: self
                .ports
                .iter()
                .map(|p| Port { at: pose.apply(p.at), outward: pose.apply_dir(p.outward), ..p.clone() })
                .collect(),
        }
    }
}

/// A gadget instance in global coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placed {
    pub cells: BTreeMap<HexCoord, Cell>,
    pub ports: Vec<Port>,
}

impl Placed {
    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }
}

/// Mirror (optional), then rotation by `rotation` sixths of a turn, then
/// translation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Pose {
    pub translation: HexCoord,
    pub rotation: u8,
    pub mirrored: bool,
}

impl Pose {
    pub const IDENTITY: Pose = Pose { translation: HexCoord::ORIGIN, rotation: 0, mirrored: false };

    pub fn new(translation: HexCoord, rotation: u8, mirrored: bool) -> Pose {
        Pose { translation, rotation: rotation % 6, mirrored }
    }

    pub fn apply(&self, c: HexCoord) -> HexCoord {
        let c = if self.mirrored { c.mirror() } else { c };
        c.rotate(self.rotation) + self.translation
    }

    pub fn apply_dir(&self, d: Direction) -> Direction {
        let d = if self.mirrored { d.mirror() } else { d };
        d.rotate(self.rotation)
    }

    /// `self` applied after `inner`.
    pub fn compose(&self, inner: &Pose) -> Pose {
        // R^a M^x (R^b M^y v + t) + s = R^(a ± b) M^(x^y) v + R^a M^x t + s
        let b = if self.mirrored { (6 - inner.rotation) % 6 } else { inner.rotation };
        Pose {
            translation: self.apply(inner.translation),
            rotation: (self.rotation + b) % 6,
            mirrored: self.mirrored != inner.mirrored,
        }
    }

    pub fn inverse(&self) -> Pose {
        let rotation = if self.mirrored { self.rotation } else { (6 - self.rotation) % 6 };
        let linear = Pose { translation: HexCoord::ORIGIN, rotation, mirrored: self.mirrored };
        Pose { translation: -linear.apply(self.translation), ..linear }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("invalid gadget parameter: {0}")]
    InvalidParameter(String),
    #[error("{kind} has {expected} input ports, pattern has {got}")]
    ArityMismatch { kind: GadgetKind, expected: usize, got: usize },
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_pose() -> impl Strategy<Value = Pose> {
        (-50i32..50, -50i32..50, 0u8..6, any::<bool>())
            .prop_map(|(q, r, rot, m)| Pose::new(HexCoord::new(q, r), rot, m))
    }

    #[test]
    fn identity_pose_leaves_footprint_unchanged() {
        let g = template(GadgetKind::And).unwrap();
        let placed = g.instantiate(Pose::IDENTITY);
        assert_eq!(placed.cells, g.footprint);
        assert_eq!(placed.ports, g.ports);
    }

    #[test]
    fn half_turn_twice_is_identity() {
        let half = Pose::new(HexCoord::ORIGIN, 3, false);
        assert_eq!(half.compose(&half), Pose::IDENTITY);
    }

    proptest! {
        #[test]
        fn inverse_pose_round_trips(pose in arb_pose(), q in -20i32..20, r in -20i32..20) {
            let c = HexCoord::new(q, r);
            prop_assert_eq!(pose.inverse().apply(pose.apply(c)), c);
            prop_assert_eq!(pose.compose(&pose.inverse()), Pose::IDENTITY);
        }

        #[test]
        fn compose_matches_sequential_application(a in arb_pose(), b in arb_pose(), q in -20i32..20, r in -20i32..20) {
            let c = HexCoord::new(q, r);
            prop_assert_eq!(a.compose(&b).apply(c), a.apply(b.apply(c)));
            for d in Direction::ALL {
                prop_assert_eq!(a.compose(&b).apply_dir(d), a.apply_dir(b.apply_dir(d)));
            }
        }

        #[test]
        fn instantiate_preserves_cells_and_inverts(pose in arb_pose(), which in 0usize..6) {
            let kinds = [GadgetKind::Goal, GadgetKind::Variable, GadgetKind::Or, GadgetKind::Choice, GadgetKind::Fanout, GadgetKind::Turn60L];
            let g = template(kinds[which]).unwrap();
            let placed = g.instantiate(pose);
            let mut before: Vec<_> = g.footprint.values().map(|c| format!("{c:?}")).collect();
            let mut after: Vec<_> = placed.cells.values().map(|c| format!("{c:?}")).collect();
            before.sort();
            after.sort();
            prop_assert_eq!(before, after);
            let back: BTreeMap<_, _> = placed.cells.iter().map(|(&c, &v)| (pose.inverse().apply(c), v)).collect();
            prop_assert_eq!(back, g.footprint.clone());
        }
    }
}
