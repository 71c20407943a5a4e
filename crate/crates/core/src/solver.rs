//! Exact win/loss solver.
//!
//! [`solve`] runs a memoized depth-first search over a compact, index-based
//! copy of the board. Only cells whose contents can still change (empty
//! cells and stacks with excess tokens) are tracked; blocked cells, single
//! tokens and off-board coordinates are all just walls to the search.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::board::{Cell, Move, Owner, Player, Position};
use crate::hex::{Direction, HexCoord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Win,
    Loss,
}

impl Outcome {
    pub fn flip(self) -> Outcome {
        match self {
            Outcome::Win => Outcome::Loss,
            Outcome::Loss => Outcome::Win,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub best_move: Option<Move>,
    pub nodes_visited: u64,
    pub table_entries: u64,
    pub max_depth: u32,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveConfig {
    pub max_nodes: u64,
    pub max_time: Duration,
    /// Disables the memo table; only useful for measuring its effect.
    pub memoize: bool,
}

impl SolveConfig {
    pub const DEFAULT_NODES: u64 = 100_000_000;
    pub const DEFAULT_SECONDS: u64 = 600;

    pub fn with_limits(max_nodes: u64, max_time: Duration) -> SolveConfig {
        SolveConfig { max_nodes, max_time, memoize: true }
    }
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig::with_limits(Self::DEFAULT_NODES, Duration::from_secs(Self::DEFAULT_SECONDS))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("search budget exceeded after {nodes} nodes in {elapsed:?}")]
    ResourceLimit { nodes: u64, elapsed: Duration },
    #[error("search cancelled after {nodes} nodes")]
    Cancelled { nodes: u64 },
    #[error("reference solver refuses positions with {empty} empty cells (limit {limit})")]
    OracleTooLarge { empty: usize, limit: usize },
}

const RED_BIT: u16 = 0x8000;
const COUNT_MASK: u16 = 0x7fff;

/// Index-based board used by the search. Cell values: `0` is empty,
/// otherwise the token count with [`RED_BIT`] set for Red stacks.
#[derive(Debug, Clone)]
pub(crate) struct Arena {
    coords: Vec<HexCoord>,
    /// `links[i][d]` is the tracked neighbour of cell `i` in direction `d`.
    links: Vec<[Option<u32>; 6]>,
    state: Vec<u16>,
    wide: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct ArenaMove {
    from: u32,
    dir: u8,
    to: u32,
    count: u16,
}

impl Arena {
    pub(crate) fn new(p: &Position) -> Arena {
        let mut coords = Vec::new();
        let mut state = Vec::new();
        for (&at, &cell) in p.cells() {
            let v = match cell {
                Cell::Empty => 0,
                Cell::Stack { owner: Owner::Blue, count } if count >= 2 => encode(Player::Blue, count),
                Cell::Stack { owner: Owner::Red, count } if count >= 2 => encode(Player::Red, count),
                _ => continue,
            };
            coords.push(at);
            state.push(v);
        }
        let index: FxHashMap<HexCoord, u32> = coords.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect();
        let links = coords
            .iter()
            .map(|&c| {
                let mut l = [None; 6];
                for d in Direction::ALL {
                    l[d.index() as usize] = index.get(&c.neighbor(d)).copied();
                }
                l
            })
            .collect();
        let wide = state.iter().any(|&v| v & COUNT_MASK > 127);
        Arena { coords, links, state, wide }
    }

    fn slide(&self, from: u32, dir: u8) -> Option<u32> {
        let mut at = self.links[from as usize][dir as usize]?;
        if self.state[at as usize] != 0 {
            return None;
        }
        while let Some(next) = self.links[at as usize][dir as usize] {
            if self.state[next as usize] != 0 {
                break;
            }
            at = next;
        }
        Some(at)
    }

    /// Moves for `player` in the same order as [`Position::legal_moves`].
    pub(crate) fn moves(&self, player: Player, out: &mut Vec<ArenaMove>) {
        out.clear();
        let red = player == Player::Red;
        for (i, &v) in self.state.iter().enumerate() {
            let count = v & COUNT_MASK;
            if count < 2 || (v & RED_BIT != 0) != red {
                continue;
            }
            for dir in 0..6u8 {
                if let Some(to) = self.slide(i as u32, dir) {
                    out.extend((1..count).map(|n| ArenaMove { from: i as u32, dir, to, count: n }));
                }
            }
        }
    }

    fn has_move(&self, player: Player) -> bool {
        let red = player == Player::Red;
        self.state.iter().enumerate().any(|(i, &v)| {
            v & COUNT_MASK >= 2
                && (v & RED_BIT != 0) == red
                && self.links[i].iter().any(|l| matches!(l, Some(n) if self.state[*n as usize] == 0))
        })
    }

    fn apply(&mut self, m: ArenaMove) {
        let owner = self.state[m.from as usize] & RED_BIT;
        self.state[m.from as usize] -= m.count;
        self.state[m.to as usize] = owner | m.count;
    }

    fn undo(&mut self, m: ArenaMove) {
        self.state[m.to as usize] = 0;
        self.state[m.from as usize] += m.count;
    }

    fn to_move(&self, m: ArenaMove) -> Move {
        Move::new(self.coords[m.from as usize], Direction::ALL[m.dir as usize], m.count as u32)
    }

    fn key(&self, player: Player) -> Box<[u8]> {
        let mut key = Vec::with_capacity(1 + self.state.len() * if self.wide { 2 } else { 1 });
        key.push(player as u8);
        if self.wide {
            for &v in &self.state {
                key.extend_from_slice(&v.to_le_bytes());
            }
        } else {
            key.extend(self.state.iter().map(|&v| ((v & COUNT_MASK) as u8) | if v & RED_BIT != 0 { 0x80 } else { 0 }));
        }
        key.into_boxed_slice()
    }
}

fn encode(p: Player, count: u32) -> u16 {
    let c = u16::try_from(count).ok().filter(|&c| c <= COUNT_MASK).expect("stack too tall for the solver");
    match p {
        Player::Blue => c,
        Player::Red => c | RED_BIT,
    }
}

struct Search<'a> {
    arena: Arena,
    table: FxHashMap<Box<[u8]>, bool>,
    config: SolveConfig,
    start: Instant,
    cancel: Option<&'a AtomicBool>,
    nodes: u64,
    max_depth: u32,
    move_bufs: Vec<Vec<ArenaMove>>,
}

impl Search<'_> {
    fn budget_check(&self) -> Result<(), SolveError> {
        if self.nodes > self.config.max_nodes
            || (self.nodes & 0xfff == 0 && self.start.elapsed() > self.config.max_time)
        {
            return Err(SolveError::ResourceLimit { nodes: self.nodes, elapsed: self.start.elapsed() });
        }
        if self.nodes & 0xfff == 0 && self.cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
            return Err(SolveError::Cancelled { nodes: self.nodes });
        }
        Ok(())
    }

    /// True when the player to move wins.
    fn wins(&mut self, player: Player, depth: u32) -> Result<bool, SolveError> {
        self.nodes += 1;
        self.max_depth = self.max_depth.max(depth);
        self.budget_check()?;
        if !self.arena.has_move(player) {
            return Ok(false);
        }
        let key = self.config.memoize.then(|| self.arena.key(player));
        if let Some(k) = &key {
            if let Some(&w) = self.table.get(k) {
                return Ok(w);
            }
        }
        let mut moves = self.move_bufs.pop().unwrap_or_default();
        self.arena.moves(player, &mut moves);
        let mut result = Ok(false);
        for &m in &moves {
            self.arena.apply(m);
            let child = self.wins(player.other(), depth + 1);
            self.arena.undo(m);
            match child {
                Ok(false) => {
                    result = Ok(true);
                    break;
                }
                Ok(true) => {}
                Err(e) => {
                    result = Err(e);
                    break;
                }
            }
        }
        self.move_bufs.push(moves);
        if let (Some(k), Ok(w)) = (key, &result) {
            self.table.insert(k, *w);
        }
        result
    }
}

/// Solves `p` with the default budget.
pub fn solve(p: &Position) -> Result<SolveReport, SolveError> {
    solve_with(p, &SolveConfig::default())
}

pub fn solve_with(p: &Position, config: &SolveConfig) -> Result<SolveReport, SolveError> {
    solve_cancellable(p, config, None)
}

/// [`solve_with`] that also stops, with [`SolveError::Cancelled`], once
/// `cancel` is raised.
pub fn solve_cancellable(
    p: &Position,
    config: &SolveConfig,
    cancel: Option<&AtomicBool>,
) -> Result<SolveReport, SolveError> {
    let mut search = Search {
        cancel,
        arena: Arena::new(p),
        table: FxHashMap::default(),
        config: *config,
        start: Instant::now(),
        nodes: 1,
        max_depth: 0,
        move_bufs: Vec::new(),
    };
    let player = p.to_move();
    let mut moves = Vec::new();
    search.arena.moves(player, &mut moves);
    let mut best = None;
    for &m in &moves {
        search.arena.apply(m);
        let child = search.wins(player.other(), 1);
        search.arena.undo(m);
        if !child? {
            best = Some(search.arena.to_move(m));
            break;
        }
    }
    Ok(SolveReport {
        outcome: if best.is_some() { Outcome::Win } else { Outcome::Loss },
        best_move: best,
        nodes_visited: search.nodes,
        table_entries: search.table.len() as u64,
        max_depth: search.max_depth,
        elapsed: search.start.elapsed(),
    })
}

pub const REFERENCE_EMPTY_LIMIT: usize = 12;

/// Unmemoized, unpruned recursion over the public rules API. Test oracle.
pub fn solve_reference(p: &Position) -> Result<Outcome, SolveError> {
    let empty = p.empty_count();
    if empty > REFERENCE_EMPTY_LIMIT {
        return Err(SolveError::OracleTooLarge { empty, limit: REFERENCE_EMPTY_LIMIT });
    }
    fn value(p: &Position) -> Outcome {
        let children: Vec<Outcome> =
            p.legal_moves().iter().map(|m| value(&p.apply_move(m).expect("generated move is legal"))).collect();
        if children.contains(&Outcome::Loss) {
            Outcome::Win
        } else {
            Outcome::Loss
        }
    }
    Ok(value(p))
}

/// Number of move sequences of exactly `depth` plies.
pub fn perft(p: &Position, depth: u32) -> u64 {
    if depth == 0 {
        return 1;
    }
    p.legal_moves().iter().map(|m| perft(&p.apply_move(m).expect("generated move is legal"), depth - 1)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::Owner;

    fn p(cells: &[((i32, i32), Cell)], to_move: Player) -> Position {
        Position::from_cells(cells.iter().map(|&((q, r), c)| (HexCoord::new(q, r), c)), to_move).unwrap()
    }

    #[test]
    fn singles_board_is_lost() {
        let b = p(&[((0, 0), Cell::stack(Owner::Blue, 1)), ((1, 0), Cell::Empty)], Player::Blue);
        let r = solve(&b).unwrap();
        assert_eq!(r.outcome, Outcome::Loss);
        assert_eq!(r.best_move, None);
        assert_eq!(solve_reference(&b), Ok(Outcome::Loss));
    }

    #[test]
    fn three_cell_line_is_won_by_blue() {
        let b = p(&[((0, 0), Cell::stack(Owner::Blue, 2)), ((1, 0), Cell::Empty), ((2, 0), Cell::Empty)], Player::Blue);
        let r = solve(&b).unwrap();
        assert_eq!(r.outcome, Outcome::Win);
        assert_eq!(r.best_move, Some(Move::new(HexCoord::new(0, 0), Direction::ALL[0], 1)));
        assert_eq!(solve_reference(&b), Ok(Outcome::Win));
    }

    #[test]
    fn red_without_stacks_loses() {
        let b = p(&[((0, 0), Cell::stack(Owner::Blue, 2)), ((0, 1), Cell::Empty)], Player::Red);
        assert_eq!(solve_reference(&b), Ok(Outcome::Loss));
        assert_eq!(solve(&b).unwrap().outcome, Outcome::Loss);
    }

    #[test]
    fn perft_depth_zero_is_one() {
        let b = p(&[((0, 0), Cell::Empty)], Player::Red);
        assert_eq!(perft(&b, 0), 1);
        assert_eq!(perft(&b, 3), 0);
    }

    #[test]
    fn node_budget_is_reported_distinctly() {
        let mut cells = vec![((0, 0), Cell::stack(Owner::Blue, 6)), ((3, 0), Cell::stack(Owner::Red, 6))];
        cells.extend((0..4).flat_map(|q| (1..4).map(move |r| ((q, r), Cell::Empty))));
        let b = p(&cells, Player::Blue);
        let cfg = SolveConfig::with_limits(10, Duration::from_secs(60));
        assert!(matches!(solve_with(&b, &cfg), Err(SolveError::ResourceLimit { .. })));
    }

    #[test]
    fn raised_cancel_flag_stops_the_search() {
        let mut cells = vec![((0, 0), Cell::stack(Owner::Blue, 8)), ((4, 0), Cell::stack(Owner::Red, 8))];
        cells.extend((0..5).flat_map(|q| (1..5).map(move |r| ((q, r), Cell::Empty))));
        let b = p(&cells, Player::Blue);
        let flag = AtomicBool::new(true);
        let got = solve_cancellable(&b, &SolveConfig::default(), Some(&flag));
        assert!(matches!(got, Err(SolveError::Cancelled { .. })), "{got:?}");
    }

    #[test]
    fn oracle_refuses_large_boards() {
        let cells: Vec<_> = (0..13).map(|q| ((q, 0), Cell::Empty)).collect();
        let b = p(&cells, Player::Blue);
        assert_eq!(solve_reference(&b), Err(SolveError::OracleTooLarge { empty: 13, limit: 12 }));
    }

    #[test]
    fn arena_moves_match_position_moves() {
        let b = p(
            &[
                ((0, 0), Cell::stack(Owner::Blue, 3)),
                ((1, 0), Cell::Empty),
                ((2, 0), Cell::Empty),
                ((0, 1), Cell::Empty),
                ((-1, 1), Cell::stack(Owner::Neutral, 1)),
                ((1, -1), Cell::stack(Owner::Red, 2)),
                ((1, -2), Cell::Empty),
            ],
            Player::Blue,
        );
        let arena = Arena::new(&b);
        for player in [Player::Blue, Player::Red] {
            let mut ms = Vec::new();
            arena.moves(player, &mut ms);
            let got: Vec<Move> = ms.iter().map(|&m| arena.to_move(m)).collect();
            assert_eq!(got, b.with_to_move(player).legal_moves());
        }
    }
}
