//! Exhaustive checks of gadget logic and move budgets.
//!
//! Logic gadgets are explored Blue-only: Red has no stacks inside them, so
//! Red's turns in the real construction are spent elsewhere and do not
//! interact. Every maximal Blue line through the harness is enumerated and
//! summarised by `(moves made, outputs left clear)`. An output counts as
//! activated only on a line where Blue spends exactly the gadget's budget;
//! shorter lines forfeit moves, which the makeup accounting punishes.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::board::{Cell, Owner, Player, Position};
use crate::hex::HexCoord;

use super::harness::Harness;
use super::{harness, template, GadgetError, GadgetKind};

/// Kinds with a truth table, in report order.
pub const VERIFIED_KINDS: [GadgetKind; 11] = [
    GadgetKind::WireStraight(3),
    GadgetKind::Turn30L,
    GadgetKind::Turn30R,
    GadgetKind::Turn60L,
    GadgetKind::Turn60R,
    GadgetKind::Or,
    GadgetKind::And,
    GadgetKind::Choice,
    GadgetKind::Fanout,
    GadgetKind::Variable,
    GadgetKind::Goal,
];

const STATE_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error("search budget exceeded while verifying {0}")]
    SearchBudgetExceeded(GadgetKind),
    #[error("{0} is checked by verify_makeup")]
    NotApplicable(GadgetKind),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetBehavior {
    pub kind: GadgetKind,
    /// Per In port, `true` for an active input. For the Variable gadget the
    /// single entry instead says whether Blue moves first.
    pub input_pattern: Vec<bool>,
    /// Per Out port: clear on some line of exactly the budgeted length.
    pub output_activatable: Vec<bool>,
    /// All Out ports clear together on one budgeted line.
    pub all_outputs_activatable: bool,
    /// Longest Blue line inside the gadget.
    pub blue_moves_used: u32,
    pub expected: Vec<bool>,
    pub verified: bool,
}

impl GadgetBehavior {
    pub fn pattern_label(&self) -> String {
        if self.kind == GadgetKind::Variable {
            return if self.input_pattern[0] { "Blue first".into() } else { "Red first".into() };
        }
        if self.input_pattern.is_empty() {
            return "-".into();
        }
        self.input_pattern.iter().map(|&b| if b { 'T' } else { 'F' }).collect()
    }
}

fn patterns(arity: usize) -> Vec<Vec<bool>> {
    (0..1u32 << arity).rev().map(|m| (0..arity).map(|i| m >> (arity - 1 - i) & 1 == 1).collect()).collect()
}

/// Truth table the gadget must realise: per output, is it activatable.
fn expected_outputs(kind: GadgetKind, pattern: &[bool]) -> Vec<bool> {
    match kind {
        GadgetKind::Or => vec![pattern[0] || pattern[1]],
        GadgetKind::And => vec![pattern[0] && pattern[1]],
        GadgetKind::Choice | GadgetKind::Fanout => vec![pattern[0]; 2],
        GadgetKind::Goal => vec![],
        // Variable: Blue first keeps the output; Red first kills it.
        GadgetKind::Variable => vec![pattern[0]],
        _ => vec![pattern[0]],
    }
}

/// Outcome set of all maximal Blue-only lines: `(moves, clear-output mask)`.
struct LineExplorer<'a> {
    harness: &'a Harness,
    memo: HashMap<Vec<u8>, BTreeSet<(u32, u32)>>,
}

impl LineExplorer<'_> {
    fn ends(&mut self, p: &Position) -> Result<BTreeSet<(u32, u32)>, ()> {
        let key = p.canonical_key();
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        if self.memo.len() > STATE_LIMIT {
            return Err(());
        }
        let moves = p.legal_moves();
        let mut out = BTreeSet::new();
        if moves.is_empty() {
            out.insert((0, self.harness.active_outputs(p)));
        }
        for m in &moves {
            let next = p.apply_move(m).expect("legal").with_to_move(Player::Blue);
            for (n, mask) in self.ends(&next)? {
                out.insert((n + 1, mask));
            }
        }
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

/// Two-player contest inside the gadget. Each side moves in turn and passes
/// when stuck; play stops when neither side can move. Blue wins the contest
/// when every output ends clear and Blue spent exactly `budget` moves.
fn contest(h: &Harness, p: &Position, blue_moves: u32, budget: u32, memo: &mut HashMap<(Vec<u8>, u32), bool>) -> bool {
    let key = (p.canonical_key(), blue_moves);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let moves = p.legal_moves();
    let value = if moves.is_empty() {
        let other = p.with_to_move(p.to_move().other());
        if other.is_loss() {
            let all = (1u32 << h.sinks.len()) - 1;
            h.active_outputs(p) == all && blue_moves == budget
        } else {
            contest(h, &other, blue_moves, budget, memo)
        }
    } else {
        let blue = p.to_move() == Player::Blue;
        let bump = u32::from(blue);
        let mut results =
            moves.iter().map(|m| contest(h, &p.apply_move(m).expect("legal"), blue_moves + bump, budget, memo));
        if blue {
            results.any(|w| w)
        } else {
            results.all(|w| w)
        }
    };
    memo.insert(key, value);
    value
}

/// Checks every input pattern of `kind` against its truth table and budget.
pub fn verify_gadget(kind: GadgetKind) -> Result<Vec<GadgetBehavior>, VerifyError> {
    if matches!(kind, GadgetKind::Makeup(_)) {
        return Err(VerifyError::NotApplicable(kind));
    }
    let g = template(kind)?;
    let budget = g.blue_budget;

    if kind == GadgetKind::Variable {
        let h = harness(kind, &[])?;
        return Ok([true, false]
            .into_iter()
            .map(|blue_first| {
                let first = if blue_first { Player::Blue } else { Player::Red };
                let won = contest(&h, &h.core_position(first), 0, budget, &mut HashMap::new());
                let expected = expected_outputs(kind, &[blue_first]);
                GadgetBehavior {
                    kind,
                    input_pattern: vec![blue_first],
                    output_activatable: vec![won],
                    all_outputs_activatable: won,
                    blue_moves_used: budget,
                    verified: expected == [won],
                    expected,
                }
            })
            .collect());
    }

    let arity = g.inputs().count();
    let mut out = Vec::new();
    for pattern in patterns(arity) {
        let h = harness(kind, &pattern)?;
        let mut explorer = LineExplorer { harness: &h, memo: HashMap::new() };
        let ends =
            explorer.ends(&h.core_position(Player::Blue)).map_err(|_| VerifyError::SearchBudgetExceeded(kind))?;
        let max_moves = ends.iter().map(|&(n, _)| n).max().unwrap_or(0);
        let expected = expected_outputs(kind, &pattern);

        if kind == GadgetKind::Goal {
            // The goal's only question: does Blue get its final move.
            let can_move = max_moves > 0;
            let verified = can_move == pattern[0] && max_moves <= budget;
            out.push(GadgetBehavior {
                kind,
                input_pattern: pattern,
                output_activatable: vec![],
                all_outputs_activatable: can_move,
                blue_moves_used: max_moves,
                expected: vec![],
                verified,
            });
            continue;
        }

        let exact: Vec<u32> = ends.iter().filter(|&&(n, _)| n == budget).map(|&(_, m)| m).collect();
        let n_out = h.sinks.len();
        let full = (1u32 << n_out) - 1;
        let output_activatable: Vec<bool> = (0..n_out).map(|i| exact.iter().any(|m| m >> i & 1 == 1)).collect();
        let all_outputs_activatable = exact.iter().any(|&m| m & full == full);
        let tight = max_moves == budget && !exact.is_empty();
        let logic_ok = output_activatable == expected
            && match kind {
                GadgetKind::Choice => !all_outputs_activatable,
                GadgetKind::Fanout => all_outputs_activatable == pattern[0],
                _ => true,
            };
        out.push(GadgetBehavior {
            kind,
            input_pattern: pattern,
            output_activatable,
            all_outputs_activatable,
            blue_moves_used: max_moves,
            expected,
            verified: tight && logic_ok,
        });
    }
    Ok(out)
}

/// Longest sequence of Red moves available on `p`, Red moving alone.
pub fn makeup_max_red_moves(p: &Position) -> u32 {
    fn go(p: &Position, memo: &mut HashMap<Vec<u8>, u32>) -> u32 {
        let key = p.canonical_key();
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let best = p
            .legal_moves()
            .iter()
            .map(|m| 1 + go(&p.apply_move(m).expect("legal").with_to_move(Player::Red), memo))
            .max()
            .unwrap_or(0);
        memo.insert(key, best);
        best
    }
    go(&p.with_to_move(Player::Red), &mut HashMap::new())
}

/// Moves Red makes by peeling one token at a time off the tallest stack.
fn peel_one(p: &Position) -> u32 {
    let mut p = p.with_to_move(Player::Red);
    let mut n = 0;
    loop {
        let tallest = p
            .cells()
            .iter()
            .filter_map(|(&c, &v)| match v {
                Cell::Stack { owner: Owner::Red, count } if count >= 2 => Some((count, c)),
                _ => None,
            })
            .max_by_key(|&(count, c)| (count, std::cmp::Reverse(c)));
        let Some((_, from)) = tallest else { return n };
        let Some(m) = p.legal_moves().into_iter().find(|m| m.from == from && m.count == 1) else { return n };
        p = p.apply_move(&m).expect("legal").with_to_move(Player::Red);
        n += 1;
    }
}

/// True iff the board gives Red at most `k` moves and peeling reaches `k`.
pub fn verify_makeup_board(p: &Position, k: u32) -> bool {
    makeup_max_red_moves(p) == k && peel_one(p) == k
}

/// Checks the isolated `Makeup(k)` template. Exhaustive; intended for small `k`.
pub fn verify_makeup(k: u32) -> bool {
    match template(GadgetKind::Makeup(k)) {
        Ok(g) => verify_makeup_board(&Position::new(g.footprint, Player::Red).expect("valid"), k),
        Err(_) => false,
    }
}

/// `Makeup(k)` (at least size 2) with its second line cell blocked.
pub fn corrupted_makeup(k: u32) -> Position {
    let g = template(GadgetKind::Makeup(k.max(2))).expect("k >= 2");
    let mut cells = g.footprint;
    cells.insert(HexCoord::new(2, 0), Cell::Blocked);
    Position::new(cells, Player::Red).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patterns_enumerate_all_true_first() {
        assert_eq!(patterns(2), vec![vec![true, true], vec![true, false], vec![false, true], vec![false, false]]);
        assert_eq!(patterns(0), vec![Vec::<bool>::new()]);
    }

    #[test]
    fn makeup_small_sizes() {
        assert!(verify_makeup(1));
        assert!(verify_makeup(3));
        assert!(!verify_makeup(0));
        let bad = corrupted_makeup(3);
        assert!(makeup_max_red_moves(&bad) < 3);
        assert!(!verify_makeup_board(&bad, 3));
    }

    #[test]
    fn makeup_is_not_a_logic_gadget() {
        assert_eq!(verify_gadget(GadgetKind::Makeup(2)), Err(VerifyError::NotApplicable(GadgetKind::Makeup(2))));
    }
}
