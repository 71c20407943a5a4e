//! Line-based board file format.
//!
//! ```text
//! # comment
//! turn B
//! cell 0 0 B 2
//! cell 0 1 .
//! cell 1 0 X
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::board::{Cell, Owner, Player, Position};
use crate::hex::HexCoord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoardFormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: duplicate coordinate {at}")]
    DuplicateCoordinate { line: usize, at: HexCoord },
    #[error("line {line}: neutral stack at {at} must hold exactly one token")]
    NeutralOverfull { line: usize, at: HexCoord },
    #[error("missing `turn` line")]
    MissingTurn,
    #[error("board has no cells")]
    NoCells,
}

fn syntax(line: usize, msg: impl Into<String>) -> BoardFormatError {
    BoardFormatError::Syntax { line, msg: msg.into() }
}

pub fn parse_board(text: &str) -> Result<Position, BoardFormatError> {
    let mut turn = None;
    let mut cells = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let words: Vec<&str> = trimmed.split_whitespace().collect();
        match words[0] {
            "turn" => {
                if turn.is_some() {
                    return Err(syntax(line, "more than one `turn` line"));
                }
                turn = Some(match words[1..] {
                    ["B"] => Player::Blue,
                    ["R"] => Player::Red,
                    _ => return Err(syntax(line, "expected `turn B` or `turn R`")),
                });
            }
            "cell" => {
                if words.len() < 4 {
                    return Err(syntax(line, "expected `cell <q> <r> <content>`"));
                }
                let q = parse_int(words[1], line)?;
                let r = parse_int(words[2], line)?;
                let at = HexCoord::new(q, r);
                let cell = match words[3..] {
                    ["X"] => Cell::Blocked,
                    ["."] => Cell::Empty,
                    [owner, count] => {
                        let owner = match owner {
                            "B" => Owner::Blue,
                            "R" => Owner::Red,
                            "N" => Owner::Neutral,
                            other => return Err(syntax(line, format!("unknown owner `{other}`"))),
                        };
                        let count: u32 = count
                            .parse()
                            .ok()
                            .filter(|&n| n > 0 && count.bytes().all(|b| b.is_ascii_digit()))
                            .ok_or_else(|| syntax(line, format!("bad token count `{count}`")))?;
                        if owner == Owner::Neutral && count != 1 {
                            return Err(BoardFormatError::NeutralOverfull { line, at });
                        }
                        Cell::stack(owner, count)
                    }
                    _ => return Err(syntax(line, "bad cell content")),
                };
                if cells.insert(at, cell).is_some() {
                    return Err(BoardFormatError::DuplicateCoordinate { line, at });
                }
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }
    let turn = turn.ok_or(BoardFormatError::MissingTurn)?;
    if cells.is_empty() {
        return Err(BoardFormatError::NoCells);
    }
    Ok(Position::new(cells, turn).expect("cells validated while parsing"))
}

fn parse_int(s: &str, line: usize) -> Result<i32, BoardFormatError> {
    s.parse().map_err(|_| syntax(line, format!("bad coordinate `{s}`")))
}

pub fn serialize_board(p: &Position) -> String {
    let mut out = String::new();
    writeln!(out, "turn {}", p.to_move().letter()).unwrap();
    for (at, cell) in p.cells() {
        match *cell {
            Cell::Blocked => writeln!(out, "cell {} {} X", at.q, at.r),
            Cell::Empty => writeln!(out, "cell {} {} .", at.q, at.r),
            Cell::Stack { owner, count } => writeln!(out, "cell {} {} {} {}", at.q, at.r, owner.letter(), count),
        }
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let p = parse_board("turn B\ncell 0 0 B 2\ncell 0 1 .").unwrap();
        assert_eq!(p.to_move(), Player::Blue);
        assert_eq!(p.cells().len(), 2);
        assert_eq!(p.cell(HexCoord::new(0, 0)), Cell::stack(Owner::Blue, 2));
        assert_eq!(p.cell(HexCoord::new(0, 1)), Cell::Empty);
    }

    #[test]
    fn serializer_sorts_cells_and_leads_with_turn() {
        let p = parse_board("# c\n\ncell 1 0 X\ncell 0 5 R 3\nturn R\ncell 0 -2 N 1\n").unwrap();
        assert_eq!(serialize_board(&p), "turn R\ncell 0 -2 N 1\ncell 0 5 R 3\ncell 1 0 X\n");
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(
            parse_board("turn B\ncell 0 0 N 2"),
            Err(BoardFormatError::NeutralOverfull { line: 2, at: HexCoord::new(0, 0) })
        );
        assert_eq!(
            parse_board("turn B\ncell 0 0 .\n# x\ncell 0 0 X"),
            Err(BoardFormatError::DuplicateCoordinate { line: 4, at: HexCoord::new(0, 0) })
        );
        assert!(matches!(parse_board("turn B\ncell 0 0 B 0"), Err(BoardFormatError::Syntax { line: 2, .. })));
        assert!(matches!(parse_board("turn B\ncell 0 0 B -1"), Err(BoardFormatError::Syntax { line: 2, .. })));
        assert!(matches!(parse_board("turn B\ncell a 0 ."), Err(BoardFormatError::Syntax { line: 2, .. })));
        assert!(matches!(parse_board("turn Q\ncell 0 0 ."), Err(BoardFormatError::Syntax { line: 1, .. })));
        assert!(matches!(parse_board("turn B\nturn R\ncell 0 0 ."), Err(BoardFormatError::Syntax { line: 2, .. })));
        assert!(matches!(parse_board("turn B\nstack 0 0 ."), Err(BoardFormatError::Syntax { line: 2, .. })));
        assert_eq!(parse_board("cell 0 0 ."), Err(BoardFormatError::MissingTurn));
        assert_eq!(parse_board("turn B\n"), Err(BoardFormatError::NoCells));
    }
}
