//! Hand-transcribed figure boards, embedded at compile time.

use crate::board::Position;
use crate::format::parse_board;

macro_rules! fixture_table {
    ($($name:literal),* $(,)?) => {
        /// `(name, board file text)` for every shipped fixture.
        pub const FIXTURES: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../fixtures/", $name, ".board"))),)*
        ];
    };
}

fixture_table!(
    "fig2", "fig3a", "fig3b", "fig3c", "fig4a", "fig4b", "fig5", "fig6", "fig7a", "fig7b", "fig8", "fig9", "fig10",
    "fig11",
);

pub fn fixture_text(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Parsed fixture. Panics if `name` is unknown; the table is static.
pub fn fixture(name: &str) -> Position {
    let text = fixture_text(name).unwrap_or_else(|| panic!("no fixture named {name}"));
    parse_board(text).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub fn names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(n, _)| *n)
}
