//! Placement and routing.
//!
//! Nodes sit in horizontal bands, one per longest-path depth from the
//! Variables, with signals flowing up the board. Edges are routed one at a
//! time by a shortest-path search over `(cell, heading)` states in which a
//! step either extends the current straight run or inserts a Turn gadget.
//! Every open cell the router adds must not touch any open cell already on
//! the board except at the two ports being joined, so gadgets and wires can
//! only interact through their ports.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use crate::board::{Cell, Owner, Player, Position};
use crate::gadgets::{template, GadgetKind, Placed, Port, Pose};
use crate::hex::{Direction, HexCoord};

use super::circuit::{Circuit, Edge, NodeKind};
use super::{makeup_size, Layout, LayoutError, LayoutStats, Placement};

/// Screen rows between consecutive bands.
const BAND_PITCH: i32 = 12;
/// Minimum `q` distance between node anchors in one band.
const COLUMN_PITCH: i32 = 16;
/// Free margin around the placed nodes that the router may use.
const ROUTE_MARGIN: i32 = 24;
/// Cost of a turn relative to one straight cell. Turns add a Blue move and
/// a Red makeup move, so the router avoids them hard.
const TURN_COST: u32 = 40;

struct Canvas {
    cells: BTreeMap<HexCoord, Cell>,
    /// Placements owning each open cell.
    owners: HashMap<HexCoord, Vec<usize>>,
    placements: Vec<Placement>,
}

impl Canvas {
    fn new() -> Canvas {
        Canvas { cells: BTreeMap::new(), owners: HashMap::new(), placements: Vec::new() }
    }

    fn is_open(&self, c: HexCoord) -> bool {
        matches!(self.cells.get(&c), Some(v) if *v != Cell::Blocked)
    }

    fn place(&mut self, id: String, kind: GadgetKind, pose: Pose) -> Result<Placed, LayoutError> {
        let placed = template(kind).map_err(|e| LayoutError::Gadget(e.to_string()))?.instantiate(pose);
        let index = self.placements.len();
        let port_cells: Vec<HexCoord> = placed.ports.iter().map(|p| p.at).collect();
        for (&c, &v) in &placed.cells {
            match (self.cells.get(&c), v) {
                (None, _) => {
                    self.cells.insert(c, v);
                }
                (Some(Cell::Blocked), Cell::Blocked) => {}
                (Some(Cell::Empty), Cell::Empty) if port_cells.contains(&c) => {}
                _ => {
                    let other = self.owners.get(&c).and_then(|o| o.first()).map(|&i| self.placements[i].id.clone());
                    return Err(LayoutError::Overlap {
                        at: c,
                        placed: id,
                        existing: other.unwrap_or_else(|| "blocked ring".into()),
                    });
                }
            }
            if v != Cell::Blocked {
                self.owners.entry(c).or_default().push(index);
            }
        }
        self.placements.push(Placement { id, kind, pose });
        Ok(placed)
    }

    /// Open cells adjacent across different placements, which would let
    /// tokens leak between components.
    fn check_isolation(&self) -> Result<(), LayoutError> {
        for (&c, mine) in &self.owners {
            for d in Direction::ALL {
                let n = c.neighbor(d);
                if let Some(theirs) = self.owners.get(&n) {
                    if !mine.iter().any(|i| theirs.contains(i)) {
                        let (a, b) = if c < n { (c, n) } else { (n, c) };
                        return Err(LayoutError::Contact { a, b });
                    }
                }
            }
        }
        Ok(())
    }

    fn bounds(&self) -> (HexCoord, HexCoord) {
        let qs = self.cells.keys().map(|c| c.q);
        let rs = self.cells.keys().map(|c| c.r);
        let lo = HexCoord::new(qs.clone().min().unwrap_or(0), rs.clone().min().unwrap_or(0));
        let hi = HexCoord::new(qs.max().unwrap_or(0), rs.max().unwrap_or(0));
        (lo, hi)
    }
}

/// One piece of a routed wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Piece {
    /// Straight run from `from` to `to` inclusive, heading `dir`.
    Run { from: HexCoord, to: HexCoord, dir: Direction },
    /// Turn whose stack sits at `at`, entered heading `dir_in`.
    Turn { at: HexCoord, dir_in: Direction, dir_out: Direction },
}

fn turn_kind(dir_in: Direction, dir_out: Direction) -> GadgetKind {
    match (dir_out.index() + 6 - dir_in.index()) % 6 {
        1 => GadgetKind::Turn30L,
        2 => GadgetKind::Turn60L,
        4 => GadgetKind::Turn60R,
        5 => GadgetKind::Turn30R,
        _ => unreachable!("turns change heading by one or two sixths"),
    }
}

/// Pose that carries a template's upward axis onto `heading`.
fn heading_pose(at: HexCoord, heading: Direction) -> Pose {
    Pose::new(at, (heading.index() + 4) % 6, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct State {
    cell: HexCoord,
    heading: u8,
}

#[derive(Debug, Clone, Copy)]
enum Step {
    Straight,
    Turn {
        at: HexCoord,
    },
    /// Final hop into the destination port.
    Arrive,
}

struct Router<'a> {
    canvas: &'a Canvas,
    src: HexCoord,
    dst: HexCoord,
    arrive: Direction,
    lo: HexCoord,
    hi: HexCoord,
}

impl Router<'_> {
    fn in_bounds(&self, c: HexCoord) -> bool {
        (self.lo.q..=self.hi.q).contains(&c.q) && (self.lo.r..=self.hi.r).contains(&c.r)
    }

    /// Can a fresh open cell go at `c`, given the open cells it may touch.
    fn free(&self, c: HexCoord, allowed: &[HexCoord]) -> bool {
        self.in_bounds(c)
            && !self.canvas.cells.contains_key(&c)
            && Direction::ALL.iter().all(|&d| {
                let n = c.neighbor(d);
                !self.canvas.is_open(n) || allowed.contains(&n)
            })
    }

    /// A fresh run cell at `c` heading `h` may touch the destination only if
    /// it is the last cell before it.
    fn run_cell_ok(&self, c: HexCoord, prev: HexCoord, h: Direction) -> bool {
        let ends_here = c.neighbor(h) == self.dst && h == self.arrive;
        if ends_here {
            self.free(c, &[prev, self.dst])
        } else {
            self.free(c, &[prev])
        }
    }

    fn route(&self, start: Direction) -> Option<Vec<Piece>> {
        let s0 = State { cell: self.src, heading: start.index() };
        let mut dist: HashMap<State, u32> = HashMap::from([(s0, 0)]);
        let mut back: HashMap<State, (State, Step)> = HashMap::new();
        let mut heap = BinaryHeap::from([Reverse((0u32, s0))]);
        let mut done = None;
        while let Some(Reverse((cost, s))) = heap.pop() {
            if dist.get(&s).is_some_and(|&d| d < cost) {
                continue;
            }
            if s.cell == self.dst {
                done = Some(s);
                break;
            }
            let h = Direction::ALL[s.heading as usize];
            let next = s.cell.neighbor(h);
            let mut push = |to: State, add: u32, step: Step| {
                let c = cost + add;
                if dist.get(&to).is_none_or(|&d| c < d) {
                    dist.insert(to, c);
                    back.insert(to, (s, step));
                    heap.push(Reverse((c, to)));
                }
            };
            if next == self.dst {
                if h == self.arrive {
                    push(State { cell: next, heading: h.index() }, 0, Step::Arrive);
                }
                continue;
            }
            if self.run_cell_ok(next, s.cell, h) {
                push(State { cell: next, heading: h.index() }, 1, Step::Straight);
            }
            // Turn stack at `next`, leaving through `out`.
            if self.canvas.cells.contains_key(&next) || !self.in_bounds(next) {
                continue;
            }
            for delta in [1u8, 2, 4, 5] {
                let h2 = h.rotate(delta);
                let out = next.neighbor(h2);
                let ring_ok = Direction::ALL
                    .iter()
                    .map(|&d| next.neighbor(d))
                    .all(|n| n == s.cell || n == out || (!self.canvas.is_open(n) && self.in_bounds(n)));
                if !ring_ok {
                    continue;
                }
                let to = State { cell: out, heading: h2.index() };
                if out == self.dst {
                    if h2 == self.arrive {
                        push(to, TURN_COST, Step::Turn { at: next });
                    }
                } else if !self.canvas.cells.contains_key(&out) && {
                    let ends_here = out.neighbor(h2) == self.dst && h2 == self.arrive;
                    let allowed: &[HexCoord] = if ends_here { &[next, s.cell, self.dst] } else { &[next, s.cell] };
                    self.free(out, allowed)
                } {
                    push(to, TURN_COST + 2, Step::Turn { at: next });
                }
            }
        }
        let mut s = done?;
        let mut steps = Vec::new();
        while let Some(&(prev, step)) = back.get(&s) {
            steps.push((prev, step, s));
            s = prev;
        }
        steps.reverse();

        let mut pieces = Vec::new();
        let mut run_start = self.src;
        for (prev, step, to) in steps {
            let h = Direction::ALL[prev.heading as usize];
            match step {
                Step::Straight => {}
                Step::Arrive => pieces.push(Piece::Run { from: run_start, to: to.cell, dir: h }),
                Step::Turn { at } => {
                    if prev.cell != run_start {
                        pieces.push(Piece::Run { from: run_start, to: prev.cell, dir: h });
                    }
                    pieces.push(Piece::Turn { at, dir_in: h, dir_out: Direction::ALL[to.heading as usize] });
                    run_start = to.cell;
                }
            }
        }
        Some(pieces)
    }
}

fn layers(c: &Circuit) -> Vec<usize> {
    let mut depth = vec![0usize; c.nodes.len()];
    for n in c.topo_order() {
        for e in c.edges.iter().filter(|e| e.from == n) {
            depth[e.to] = depth[e.to].max(depth[n] + 1);
        }
    }
    depth
}

fn template_port(kind: NodeKind, name: &str) -> Port {
    template(kind.gadget()).expect("node templates exist").port(name).expect("named port exists").clone()
}

pub(super) fn layout(c: &Circuit) -> Result<Layout, LayoutError> {
    let depth = layers(c);
    let max_depth = depth.iter().copied().max().unwrap_or(0);
    let mut anchor: Vec<Option<HexCoord>> = vec![None; c.nodes.len()];
    let mut placed: Vec<Option<Placed>> = vec![None; c.nodes.len()];

    // Anchors, band by band. A node aims to sit so its inputs line up with
    // the ports feeding them; collisions push it right.
    for band in 0..=max_depth {
        let mut members: Vec<(i32, usize)> = Vec::new();
        for n in (0..c.nodes.len()).filter(|&n| depth[n] == band) {
            let kind = c.nodes[n].kind;
            let feeds: Vec<i32> = c
                .edges
                .iter()
                .filter(|e| e.to == n)
                .map(|e| {
                    let src = anchor[e.from].expect("sources sit in lower bands");
                    let out = template_port(c.nodes[e.from].kind, c.nodes[e.from].kind.out_port(e.from_port));
                    let inp = template_port(kind, kind.in_port(e.to_port));
                    src.q + out.at.q - inp.at.q
                })
                .collect();
            let want = if feeds.is_empty() { 0 } else { feeds.iter().sum::<i32>().div_euclid(feeds.len() as i32) };
            members.push((want, n));
        }
        members.sort();
        let mut next_free = i32::MIN;
        for (i, (want, n)) in members.into_iter().enumerate() {
            let q = if band == 0 { i as i32 * COLUMN_PITCH } else { want.max(next_free) };
            next_free = q + COLUMN_PITCH;
            // Screen height is `r + q / 2`; keep each band level.
            let r = -BAND_PITCH * band as i32 - q.div_euclid(2);
            anchor[n] = Some(HexCoord::new(q, r));
        }
    }

    let mut canvas = Canvas::new();
    for n in c.topo_order() {
        let node = &c.nodes[n];
        let pose = Pose::new(anchor[n].expect("anchored"), 0, false);
        placed[n] = Some(canvas.place(node.id.clone(), node.kind.gadget(), pose)?);
    }

    let (lo, hi) = canvas.bounds();
    let lo = lo - HexCoord::new(ROUTE_MARGIN, ROUTE_MARGIN);
    let hi = hi + HexCoord::new(ROUTE_MARGIN, ROUTE_MARGIN);
    let mut turns = 0u32;
    let mut edges: Vec<&Edge> = c.edges.iter().collect();
    edges.sort_by_key(|e| (depth[e.to], e.to, e.to_port));
    for e in edges {
        let from = &c.nodes[e.from];
        let to = &c.nodes[e.to];
        let name = format!("{}->{}", c.output_name(e.from, e.from_port), to.id);
        let out = placed[e.from].as_ref().and_then(|p| p.port(from.kind.out_port(e.from_port))).expect("port").clone();
        let inp = placed[e.to].as_ref().and_then(|p| p.port(to.kind.in_port(e.to_port))).expect("port").clone();
        let router = Router { canvas: &canvas, src: out.at, dst: inp.at, arrive: -inp.outward, lo, hi };
        let pieces = router.route(out.outward).ok_or_else(|| LayoutError::Routing { edge: name.clone() })?;
        let mut part = 0;
        for piece in pieces {
            part += 1;
            let id = format!("{name}#{part}");
            match piece {
                Piece::Run { from, to, dir } => {
                    let len = from.distance(to) as u32 + 1;
                    canvas.place(id, GadgetKind::WireStraight(len), heading_pose(from, dir))?;
                }
                Piece::Turn { at, dir_in, dir_out } => {
                    canvas.place(id, turn_kind(dir_in, dir_out), heading_pose(at, dir_in))?;
                    turns += 1;
                }
            }
        }
    }

    let stats = LayoutStats {
        a: turns,
        b: c.count(NodeKind::Or) as u32,
        c: c.count(NodeKind::And) as u32,
        d: c.count(NodeKind::Choice) as u32,
        e: c.count(NodeKind::Fanout) as u32,
        k: makeup_size(c, turns),
    };
    if stats.k > 0 {
        let (lo, hi) = canvas.bounds();
        canvas.place(
            "makeup".into(),
            GadgetKind::Makeup(stats.k),
            Pose::new(HexCoord::new(hi.q + 4, lo.r), 0, false),
        )?;
    }
    canvas.check_isolation()?;

    let board = Position::new(canvas.cells, Player::Blue).map_err(|e| LayoutError::Gadget(e.to_string()))?;
    let tokens: u64 = [Owner::Blue, Owner::Red, Owner::Neutral].iter().map(|&o| board.tokens(o)).sum();
    let spaces = board.cells().values().filter(|v| **v != Cell::Blocked).count() as u64;
    if tokens > spaces {
        return Err(LayoutError::TooManyTokens { tokens, spaces });
    }
    Ok(Layout { placements: canvas.placements, board, stats })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn turn_kinds_follow_heading_change() {
        let up = Direction::ALL[2];
        assert_eq!(turn_kind(up, Direction::ALL[1]), GadgetKind::Turn30R);
        assert_eq!(turn_kind(up, Direction::ALL[0]), GadgetKind::Turn60R);
        assert_eq!(turn_kind(up, Direction::ALL[3]), GadgetKind::Turn30L);
        assert_eq!(turn_kind(up, Direction::ALL[4]), GadgetKind::Turn60L);
    }

    #[test]
    fn heading_pose_aims_templates() {
        for h in Direction::ALL {
            let pose = heading_pose(HexCoord::ORIGIN, h);
            assert_eq!(pose.apply_dir(Direction::ALL[2]), h);
            for kind in [GadgetKind::Turn30L, GadgetKind::Turn30R, GadgetKind::Turn60L, GadgetKind::Turn60R] {
                let placed = template(kind).unwrap().instantiate(pose);
                let out = placed.port("Out").unwrap();
                assert_eq!(placed.port("In").unwrap().at, -h.offset());
                assert_eq!(turn_kind(h, out.outward), kind);
                assert_eq!(out.at, out.outward.offset());
            }
        }
    }
}
