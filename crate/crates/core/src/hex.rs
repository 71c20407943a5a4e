//! Axial hex-grid geometry.
//!
//! Cells are addressed by axial `(q, r)` coordinates. The six unit
//! directions are indexed in counter-clockwise order starting from `(+1, 0)`;
//! the index is part of the wire format used by the CLI and the HTTP service.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct HexCoord {
    pub q: i32,
    pub r: i32,
}

impl HexCoord {
    pub const ORIGIN: HexCoord = HexCoord { q: 0, r: 0 };

    pub const fn new(q: i32, r: i32) -> Self {
        HexCoord { q, r }
    }

    pub fn neighbor(self, dir: Direction) -> HexCoord {
        self + dir.offset()
    }

    /// Rotates about the origin by `steps` sixths of a turn, in increasing
    /// direction-index order.
    pub fn rotate(self, steps: u8) -> HexCoord {
        let mut c = self;
        for _ in 0..steps % 6 {
            c = HexCoord::new(c.q + c.r, -c.q);
        }
        c
    }

    /// Reflects across the `r`-axis: direction `i` maps to direction `(4 - i) mod 6`.
    pub fn mirror(self) -> HexCoord {
        HexCoord::new(-self.q, self.q + self.r)
    }

    /// Hex distance to `other`.
    pub fn distance(self, other: HexCoord) -> i32 {
        let d = self - other;
        (d.q.abs() + d.r.abs() + (d.q + d.r).abs()) / 2
    }
}

impl Add for HexCoord {
    type Output = HexCoord;
    fn add(self, o: HexCoord) -> HexCoord {
        HexCoord::new(self.q + o.q, self.r + o.r)
    }
}

impl Sub for HexCoord {
    type Output = HexCoord;
    fn sub(self, o: HexCoord) -> HexCoord {
        HexCoord::new(self.q - o.q, self.r - o.r)
    }
}

impl Neg for HexCoord {
    type Output = HexCoord;
    fn neg(self) -> HexCoord {
        HexCoord::new(-self.q, -self.r)
    }
}

impl Mul<i32> for HexCoord {
    type Output = HexCoord;
    fn mul(self, k: i32) -> HexCoord {
        HexCoord::new(self.q * k, self.r * k)
    }
}

impl fmt::Display for HexCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.q, self.r)
    }
}

/// One of the six unit steps on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Direction(u8);

const OFFSETS: [HexCoord; 6] = [
    HexCoord::new(1, 0),
    HexCoord::new(1, -1),
    HexCoord::new(0, -1),
    HexCoord::new(-1, 0),
    HexCoord::new(-1, 1),
    HexCoord::new(0, 1),
];

impl Direction {
    pub const ALL: [Direction; 6] =
        [Direction(0), Direction(1), Direction(2), Direction(3), Direction(4), Direction(5)];

    pub fn from_index(i: u8) -> Option<Direction> {
        (i < 6).then_some(Direction(i))
    }

    pub fn from_offset(c: HexCoord) -> Option<Direction> {
        OFFSETS.iter().position(|&o| o == c).map(|i| Direction(i as u8))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn offset(self) -> HexCoord {
        OFFSETS[self.0 as usize]
    }

    pub fn opposite(self) -> Direction {
        Direction((self.0 + 3) % 6)
    }

    pub fn rotate(self, steps: u8) -> Direction {
        Direction((self.0 + steps % 6) % 6)
    }

    pub fn mirror(self) -> Direction {
        Direction((10 - self.0) % 6)
    }
}

impl Neg for Direction {
    type Output = Direction;
    fn neg(self) -> Direction {
        self.opposite()
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn neighbor_is_componentwise_sum() {
        assert_eq!(HexCoord::new(0, 0).neighbor(Direction::ALL[0]), HexCoord::new(1, 0));
        let d = Direction::from_offset(HexCoord::new(-1, 1)).unwrap();
        assert_eq!(HexCoord::new(2, -1).neighbor(d), HexCoord::new(1, 0));
    }

    #[test]
    fn direction_index_mapping_is_fixed() {
        let expected = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];
        for (d, (q, r)) in Direction::ALL.iter().zip(expected) {
            assert_eq!(d.offset(), HexCoord::new(q, r));
        }
    }

    #[test]
    fn directions_closed_under_negation() {
        for d in Direction::ALL {
            assert_eq!(d.offset() + d.opposite().offset(), HexCoord::ORIGIN);
            assert_eq!(-(-d), d);
        }
    }

    #[test]
    fn rotation_and_mirror_agree_with_direction_indices() {
        for d in Direction::ALL {
            for s in 0..6 {
                assert_eq!(d.offset().rotate(s), d.rotate(s).offset());
            }
            assert_eq!(d.offset().mirror(), d.mirror().offset());
        }
    }

    proptest! {
        #[test]
        fn neighbor_then_opposite_returns(q in -1000i32..1000, r in -1000i32..1000, i in 0u8..6) {
            let c = HexCoord::new(q, r);
            let d = Direction::from_index(i).unwrap();
            prop_assert_eq!(c.neighbor(d).neighbor(-d), c);
        }

        #[test]
        fn six_rotations_are_identity(q in -1000i32..1000, r in -1000i32..1000) {
            let c = HexCoord::new(q, r);
            prop_assert_eq!(c.rotate(6), c);
            prop_assert_eq!(c.rotate(3), -c);
            prop_assert_eq!(c.mirror().mirror(), c);
            prop_assert_eq!(c.distance(HexCoord::ORIGIN), c.rotate(1).distance(HexCoord::ORIGIN));
        }
    }
}
