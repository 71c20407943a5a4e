//! Positions, moves and the Battle Sheep rules.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hex::{Direction, HexCoord};

/// A player that can be on move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    Blue,
    Red,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Blue => Player::Red,
            Player::Red => Player::Blue,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Player::Blue => 'B',
            Player::Red => 'R',
        }
    }
}

/// Owner of a stack. Neutral stacks hold exactly one token and never move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Owner {
    Blue,
    Red,
    Neutral,
}

impl Owner {
    pub fn letter(self) -> char {
        match self {
            Owner::Blue => 'B',
            Owner::Red => 'R',
            Owner::Neutral => 'N',
        }
    }

    pub fn is(self, p: Player) -> bool {
        matches!((self, p), (Owner::Blue, Player::Blue) | (Owner::Red, Player::Red))
    }
}

impl From<Player> for Owner {
    fn from(p: Player) -> Owner {
        match p {
            Player::Blue => Owner::Blue,
            Player::Red => Owner::Red,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Blocked,
    Empty,
    Stack { owner: Owner, count: u32 },
}

impl Cell {
    pub fn stack(owner: Owner, count: u32) -> Cell {
        Cell::Stack { owner, count }
    }

    pub fn is_empty(self) -> bool {
        matches!(self, Cell::Empty)
    }

    /// Tokens above the bottom one, i.e. the movable part of a stack.
    pub fn excess(self) -> u32 {
        match self {
            Cell::Stack { count, .. } => count - 1,
            _ => 0,
        }
    }

    fn check(self, at: HexCoord) -> Result<(), RulesError> {
        match self {
            Cell::Stack { count: 0, .. } => Err(RulesError::EmptyStack(at)),
            Cell::Stack { owner: Owner::Neutral, count } if count > 1 => Err(RulesError::NeutralOverfull(at)),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RulesError {
    #[error("no stack at {0}")]
    NoStackAtSource(HexCoord),
    #[error("illegal move {0}")]
    IllegalMove(Move),
    #[error("stack at {0} has zero tokens")]
    EmptyStack(HexCoord),
    #[error("neutral stack at {0} holds more than one token")]
    NeutralOverfull(HexCoord),
    #[error("position has no cells")]
    NoCells,
}

/// Split `count` tokens off the stack at `from` and slide them along `dir`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Move {
    pub from: HexCoord,
    pub dir: u8,
    pub count: u32,
}

impl Move {
    pub fn new(from: HexCoord, dir: Direction, count: u32) -> Move {
        Move { from, dir: dir.index(), count }
    }

    pub fn direction(&self) -> Direction {
        Direction::from_index(self.dir).expect("direction index out of range")
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.from.q, self.from.r, self.dir, self.count)
    }
}

/// A board together with the player to move. Coordinates missing from the
/// map are off-board and behave exactly like blocked cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Position {
    cells: BTreeMap<HexCoord, Cell>,
    to_move: Player,
}

impl Position {
    pub fn new(cells: BTreeMap<HexCoord, Cell>, to_move: Player) -> Result<Position, RulesError> {
        if cells.is_empty() {
            return Err(RulesError::NoCells);
        }
        for (&at, &cell) in &cells {
            cell.check(at)?;
        }
        Ok(Position { cells, to_move })
    }

    pub fn from_cells<I>(cells: I, to_move: Player) -> Result<Position, RulesError>
    where
        I: IntoIterator<Item = (HexCoord, Cell)>,
    {
        Position::new(cells.into_iter().collect(), to_move)
    }

    pub fn cells(&self) -> &BTreeMap<HexCoord, Cell> {
        &self.cells
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn with_to_move(&self, p: Player) -> Position {
        Position { cells: self.cells.clone(), to_move: p }
    }

    pub fn cell(&self, at: HexCoord) -> Cell {
        self.cells.get(&at).copied().unwrap_or(Cell::Blocked)
    }

    pub fn empty_count(&self) -> usize {
        self.cells.values().filter(|c| c.is_empty()).count()
    }

    pub fn stack_count(&self) -> usize {
        self.cells.values().filter(|c| matches!(c, Cell::Stack { .. })).count()
    }

    pub fn tokens(&self, owner: Owner) -> u64 {
        self.cells
            .values()
            .map(|c| match *c {
                Cell::Stack { owner: o, count } if o == owner => count as u64,
                _ => 0,
            })
            .sum()
    }

    /// Farthest empty cell reachable from `from` along `dir`, or `None` if the
    /// adjacent cell is not empty.
    pub fn slide_destination(&self, from: HexCoord, dir: Direction) -> Result<Option<HexCoord>, RulesError> {
        if !matches!(self.cell(from), Cell::Stack { .. }) {
            return Err(RulesError::NoStackAtSource(from));
        }
        Ok(self.ray_end(from, dir))
    }

    fn ray_end(&self, from: HexCoord, dir: Direction) -> Option<HexCoord> {
        let mut at = from.neighbor(dir);
        if !self.cell(at).is_empty() {
            return None;
        }
        loop {
            let next = at.neighbor(dir);
            if !self.cell(next).is_empty() {
                return Some(at);
            }
            at = next;
        }
    }

    /// All legal moves for the player to move, sorted by
    /// `(from.q, from.r, direction index, count)`.
    pub fn legal_moves(&self) -> Vec<Move> {
        let mut moves = Vec::new();
        for (&from, &cell) in &self.cells {
            let Cell::Stack { owner, count } = cell else { continue };
            if count < 2 || !owner.is(self.to_move) {
                continue;
            }
            for dir in Direction::ALL {
                if self.ray_end(from, dir).is_some() {
                    moves.extend((1..count).map(|n| Move::new(from, dir, n)));
                }
            }
        }
        moves
    }

    pub fn has_move(&self) -> bool {
        self.cells.iter().any(|(&from, &cell)| match cell {
            Cell::Stack { owner, count } if count >= 2 && owner.is(self.to_move) => {
                Direction::ALL.iter().any(|&d| self.cell(from.neighbor(d)).is_empty())
            }
            _ => false,
        })
    }

    /// Normal play: the player to move loses when they have no move.
    pub fn is_loss(&self) -> bool {
        !self.has_move()
    }

    /// Destination of a legal move, or an error if the move is not legal here.
    pub fn destination(&self, m: &Move) -> Result<HexCoord, RulesError> {
        let dir = Direction::from_index(m.dir).ok_or(RulesError::IllegalMove(*m))?;
        match self.cell(m.from) {
            Cell::Stack { owner, count } if owner.is(self.to_move) && m.count >= 1 && m.count < count => {
                self.ray_end(m.from, dir).ok_or(RulesError::IllegalMove(*m))
            }
            _ => Err(RulesError::IllegalMove(*m)),
        }
    }

    pub fn apply_move(&self, m: &Move) -> Result<Position, RulesError> {
        let dest = self.destination(m)?;
        let mut cells = self.cells.clone();
        if let Some(Cell::Stack { count, .. }) = cells.get_mut(&m.from) {
            *count -= m.count;
        }
        cells.insert(dest, Cell::stack(self.to_move.into(), m.count));
        Ok(Position { cells, to_move: self.to_move.other() })
    }

    /// Byte encoding that is injective over positions and independent of
    /// how the position was built.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut key = Vec::with_capacity(1 + self.cells.len() * 10);
        key.push(self.to_move.letter() as u8);
        for (at, cell) in &self.cells {
            key.extend_from_slice(&at.q.to_le_bytes());
            key.extend_from_slice(&at.r.to_le_bytes());
            match *cell {
                Cell::Blocked => key.push(0),
                Cell::Empty => key.push(1),
                Cell::Stack { owner, count } => {
                    key.push(match owner {
                        Owner::Blue => 2,
                        Owner::Red => 3,
                        Owner::Neutral => 4,
                    });
                    push_varint(&mut key, count);
                }
            }
        }
        key
    }

    /// Image of the position under `f`, which must be injective on coordinates.
    pub fn map_coords(&self, f: impl Fn(HexCoord) -> HexCoord) -> Position {
        Position { cells: self.cells.iter().map(|(&c, &v)| (f(c), v)).collect(), to_move: self.to_move }
    }
}

fn push_varint(out: &mut Vec<u8>, mut v: u32) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(cells: &[(i32, Cell)], to_move: Player) -> Position {
        Position::from_cells(cells.iter().map(|&(q, c)| (HexCoord::new(q, 0), c)), to_move).unwrap()
    }

    #[test]
    fn slide_runs_to_the_far_end() {
        let p = line(
            &[(0, Cell::stack(Owner::Blue, 3)), (1, Cell::Empty), (2, Cell::Empty), (3, Cell::Empty)],
            Player::Blue,
        );
        let east = Direction::ALL[0];
        assert_eq!(p.slide_destination(HexCoord::new(0, 0), east).unwrap(), Some(HexCoord::new(3, 0)));
        assert_eq!(p.slide_destination(HexCoord::new(0, 0), east.opposite()).unwrap(), None);
        assert_eq!(
            p.slide_destination(HexCoord::new(1, 0), east),
            Err(RulesError::NoStackAtSource(HexCoord::new(1, 0)))
        );
    }

    #[test]
    fn enclosed_stack_has_no_destination() {
        let c = HexCoord::new(0, 0);
        let mut cells = vec![(c, Cell::stack(Owner::Red, 4))];
        cells.extend(Direction::ALL.iter().map(|&d| (c.neighbor(d), Cell::Blocked)));
        let p = Position::from_cells(cells, Player::Red).unwrap();
        for d in Direction::ALL {
            assert_eq!(p.slide_destination(c, d).unwrap(), None);
        }
        assert!(p.is_loss());
    }

    #[test]
    fn singles_only_is_a_loss() {
        let p =
            line(&[(0, Cell::stack(Owner::Blue, 1)), (1, Cell::Empty), (2, Cell::stack(Owner::Red, 1))], Player::Blue);
        assert!(p.legal_moves().is_empty());
        assert!(p.is_loss());
    }

    #[test]
    fn apply_rejects_illegal_moves() {
        let p = line(&[(0, Cell::stack(Owner::Blue, 2)), (1, Cell::Empty)], Player::Blue);
        let east = Direction::ALL[0];
        assert!(p.apply_move(&Move::new(HexCoord::new(0, 0), east, 1)).is_ok());
        for bad in [
            Move::new(HexCoord::new(0, 0), east, 2),
            Move::new(HexCoord::new(0, 0), east, 0),
            Move::new(HexCoord::new(0, 0), east.opposite(), 1),
            Move::new(HexCoord::new(1, 0), east, 1),
        ] {
            assert_eq!(p.apply_move(&bad), Err(RulesError::IllegalMove(bad)));
        }
        let red = p.with_to_move(Player::Red);
        assert!(red.apply_move(&Move::new(HexCoord::new(0, 0), east, 1)).is_err());
    }

    #[test]
    fn invariants_are_enforced_on_construction() {
        let at = HexCoord::ORIGIN;
        assert_eq!(
            Position::from_cells([(at, Cell::stack(Owner::Neutral, 2))], Player::Blue),
            Err(RulesError::NeutralOverfull(at))
        );
        assert_eq!(
            Position::from_cells([(at, Cell::stack(Owner::Blue, 0))], Player::Blue),
            Err(RulesError::EmptyStack(at))
        );
        assert_eq!(Position::from_cells([], Player::Blue), Err(RulesError::NoCells));
    }

    #[test]
    fn canonical_key_separates_side_to_move_and_counts() {
        let a = line(&[(0, Cell::stack(Owner::Blue, 2)), (1, Cell::Empty)], Player::Blue);
        let b = line(&[(0, Cell::stack(Owner::Blue, 2)), (1, Cell::Empty)], Player::Blue);
        assert_eq!(a.canonical_key(), b.canonical_key());
        assert_ne!(a.canonical_key(), a.with_to_move(Player::Red).canonical_key());
        let c = line(&[(0, Cell::stack(Owner::Blue, 3)), (1, Cell::Empty)], Player::Blue);
        assert_ne!(a.canonical_key(), c.canonical_key());
    }
}
