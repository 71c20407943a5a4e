//! Seeded random boards shared by the integration tests.
#![allow(dead_code)]

use battlesheep::{Cell, HexCoord, Owner, Player, Position};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

/// Cells within distance 2 of the origin.
pub fn hexagon() -> Vec<HexCoord> {
    let mut v = Vec::new();
    for q in -2i32..=2 {
        for r in -2i32..=2 {
            if (q + r).abs() <= 2 {
                v.push(HexCoord::new(q, r));
            }
        }
    }
    v
}

fn random_cell(rng: &mut StdRng, max_count: u32) -> Cell {
    match rng.gen_range(0..10) {
        0..=3 => Cell::Empty,
        4 => Cell::Blocked,
        5..=6 => Cell::stack(Owner::Blue, rng.gen_range(1..=max_count)),
        7..=8 => Cell::stack(Owner::Red, rng.gen_range(1..=max_count)),
        _ => Cell::stack(Owner::Neutral, 1),
    }
}

/// A board of 1 to `max_cells` cells drawn from the radius-2 hexagon.
pub fn random_position(seed: u64, max_cells: usize) -> Position {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut spots = hexagon();
    spots.shuffle(&mut rng);
    let n = rng.gen_range(1..=max_cells.min(spots.len()));
    let cells = spots[..n].iter().map(|&c| (c, random_cell(&mut rng, 5))).collect();
    let to_move = if rng.gen_bool(0.5) { Player::Blue } else { Player::Red };
    Position::new(cells, to_move).expect("generated cells are valid")
}

/// A random board where the search has at most `max_empty` empty cells.
pub fn random_small_position(seed: u64, max_cells: usize, max_empty: usize) -> Position {
    let mut s = seed;
    loop {
        let p = random_position(s, max_cells);
        if p.empty_count() <= max_empty {
            return p;
        }
        s = s.wrapping_add(0x9e37_79b9_7f4a_7c15);
    }
}
