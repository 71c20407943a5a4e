use std::collections::BTreeMap;

use crate::board::{Cell, Owner};
use crate::fixtures::fixture;
use crate::hex::{Direction, HexCoord};

use super::{Gadget, GadgetError, GadgetKind, Polarity, Port, Pose};

const UP: Direction = Direction::ALL[2];

fn port(name: &'static str, q: i32, r: i32, polarity: Polarity, outward: u8) -> Port {
    Port { name, at: HexCoord::new(q, r), polarity, outward: Direction::ALL[outward as usize] }
}

fn from_fixture(kind: GadgetKind, name: &str, ports: Vec<Port>) -> Gadget {
    Gadget {
        kind,
        footprint: fixture(name).cells().clone(),
        ports,
        blue_budget: kind.blue_budget(),
        red_budget: kind.red_budget(),
    }
}

fn mirrored(g: Gadget, kind: GadgetKind) -> Gadget {
    let placed = g.instantiate(Pose::new(HexCoord::ORIGIN, 0, true));
    Gadget { kind, footprint: placed.cells, ports: placed.ports, ..g }
}

/// Blocked cells around `cells`, skipping anything in `keep_open`.
fn sheath(cells: &[HexCoord], keep_open: &[HexCoord]) -> BTreeMap<HexCoord, Cell> {
    let mut out = BTreeMap::new();
    for &c in cells {
        for d in Direction::ALL {
            let n = c.neighbor(d);
            if !cells.contains(&n) && !keep_open.contains(&n) {
                out.insert(n, Cell::Blocked);
            }
        }
    }
    out
}

/// Template for `kind` in its drawn orientation.
pub fn template(kind: GadgetKind) -> Result<Gadget, GadgetError> {
    use Polarity::{In, Out};
    Ok(match kind {
        GadgetKind::WireStraight(0) => {
            return Err(GadgetError::InvalidParameter("WireStraight length must be at least 1".into()))
        }
        GadgetKind::WireStraight(len) => {
            let len = len as i32;
            let run: Vec<HexCoord> = (0..len).map(|i| HexCoord::ORIGIN.neighbor(UP) * i).collect();
            // Only interior cells are sheathed; the neighbourhood of an end cell
            // belongs to the gadget the wire plugs into.
            let inner = if run.len() > 2 { &run[1..run.len() - 1] } else { &[][..] };
            let mut footprint = sheath(inner, &run);
            for &c in &run {
                footprint.insert(c, Cell::Empty);
            }
            Gadget {
                kind,
                footprint,
                ports: vec![port("In", 0, 0, In, 5), port("Out", 0, -(len - 1), Out, 2)],
                blue_budget: 0,
                red_budget: 0,
            }
        }
        GadgetKind::Turn30R => from_fixture(kind, "fig4a", vec![port("In", 0, 1, In, 5), port("Out", 1, -1, Out, 1)]),
        GadgetKind::Turn60R => from_fixture(kind, "fig4b", vec![port("In", 0, 1, In, 5), port("Out", 1, 0, Out, 0)]),
        GadgetKind::Turn30L => mirrored(template(GadgetKind::Turn30R)?, kind),
        GadgetKind::Turn60L => mirrored(template(GadgetKind::Turn60R)?, kind),
        GadgetKind::Goal => from_fixture(kind, "fig5", vec![port("In", 0, 1, In, 5)]),
        GadgetKind::Variable => from_fixture(kind, "fig6", vec![port("Out", 1, -2, Out, 2)]),
        GadgetKind::Or => from_fixture(
            kind,
            "fig8",
            vec![port("In 1", -1, 1, In, 4), port("In 2", 1, 0, In, 0), port("Out", 0, -1, Out, 2)],
        ),
        GadgetKind::And => from_fixture(
            kind,
            "fig9",
            vec![port("In 1", -3, 3, In, 4), port("In 2", 3, 0, In, 0), port("Out", 0, -4, Out, 2)],
        ),
        GadgetKind::Choice => from_fixture(
            kind,
            "fig10",
            vec![port("In", 0, 1, In, 5), port("Out 1", -3, 1, Out, 3), port("Out 2", 3, -2, Out, 1)],
        ),
        GadgetKind::Fanout => from_fixture(
            kind,
            "fig11",
            vec![port("In", 0, 4, In, 5), port("Out 1", -3, 0, Out, 3), port("Out 2", 3, -3, Out, 1)],
        ),
        GadgetKind::Makeup(0) => return Err(GadgetError::InvalidParameter("Makeup size must be at least 1".into())),
        GadgetKind::Makeup(k) => {
            let east = Direction::ALL[0];
            let line: Vec<HexCoord> = (0..=k as i32).map(|i| HexCoord::ORIGIN.neighbor(east) * i).collect();
            let mut footprint = sheath(&line, &[]);
            footprint.insert(line[0], Cell::stack(Owner::Red, k + 1));
            for &c in &line[1..] {
                footprint.insert(c, Cell::Empty);
            }
            Gadget { kind, footprint, ports: Vec::new(), blue_budget: 0, red_budget: k }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stacks(g: &Gadget) -> Vec<(Owner, u32)> {
        let mut v: Vec<_> = g
            .footprint
            .values()
            .filter_map(|c| match *c {
                Cell::Stack { owner, count } => Some((owner, count)),
                _ => None,
            })
            .collect();
        v.sort();
        v
    }

    #[test]
    fn goal_template() {
        let g = template(GadgetKind::Goal).unwrap();
        assert_eq!(g.footprint.len(), 7);
        assert_eq!(
            stacks(&g),
            [
                (Owner::Blue, 2),
                (Owner::Neutral, 1),
                (Owner::Neutral, 1),
                (Owner::Neutral, 1),
                (Owner::Neutral, 1),
                (Owner::Neutral, 1)
            ]
        );
        let inp = g.port("In").unwrap();
        assert_eq!(g.footprint[&inp.at], Cell::Empty);
        assert_eq!(g.footprint.values().filter(|c| c.is_empty()).count(), 1);
    }

    #[test]
    fn and_template() {
        let g = template(GadgetKind::And).unwrap();
        assert_eq!(stacks(&g), [(Owner::Blue, 2), (Owner::Blue, 2), (Owner::Blue, 2), (Owner::Blue, 3)]);
        let three = g.footprint.iter().find(|(_, c)| **c == Cell::stack(Owner::Blue, 3)).map(|(k, _)| *k).unwrap();
        // The 2-stack above the centre sits on the output column.
        assert_eq!(g.footprint[&(three + Direction::ALL[2].offset() * 3)], Cell::stack(Owner::Blue, 2));
        let names: Vec<_> = g.ports.iter().map(|p| p.name).collect();
        assert_eq!(names, ["In 1", "In 2", "Out"]);
    }

    #[test]
    fn makeup_template() {
        let g = template(GadgetKind::Makeup(3)).unwrap();
        let open: Vec<_> = g.footprint.iter().filter(|(_, c)| **c != Cell::Blocked).collect();
        assert_eq!(open.len(), 4);
        assert_eq!(*open[0].1, Cell::stack(Owner::Red, 4));
        assert!(open[1..].iter().all(|(_, c)| c.is_empty()));
        for (c, _) in &open {
            for d in Direction::ALL {
                let n = c.neighbor(d);
                assert!(g.footprint.contains_key(&n), "{n} not ringed");
            }
        }
        assert!(template(GadgetKind::Makeup(0)).is_err());
        assert!(template(GadgetKind::WireStraight(0)).is_err());
    }

    #[test]
    fn ports_are_empty_and_face_outward() {
        for kind in super::super::VERIFIED_KINDS.iter().copied().chain([GadgetKind::WireStraight(4)]) {
            let g = template(kind).unwrap();
            for p in &g.ports {
                assert_eq!(g.footprint.get(&p.at), Some(&Cell::Empty), "{kind} {}", p.name);
                let beyond = p.at.neighbor(p.outward);
                assert!(!g.footprint.contains_key(&beyond), "{kind} {} continues into its own footprint", p.name);
            }
        }
    }

    #[test]
    fn excess_tokens_match_budgets() {
        for kind in
            super::super::VERIFIED_KINDS.iter().copied().chain([GadgetKind::Makeup(4), GadgetKind::WireStraight(3)])
        {
            let g = template(kind).unwrap();
            assert_eq!(g.excess(Owner::Blue) + g.excess(Owner::Red), g.blue_budget + g.red_budget, "{kind}");
        }
    }

    #[test]
    fn mirrored_turns_keep_their_input() {
        for (r, l) in [(GadgetKind::Turn30R, GadgetKind::Turn30L), (GadgetKind::Turn60R, GadgetKind::Turn60L)] {
            let (r, l) = (template(r).unwrap(), template(l).unwrap());
            assert_eq!(r.port("In"), l.port("In"));
            assert_eq!(l.port("Out").unwrap().outward, r.port("Out").unwrap().outward.mirror());
        }
    }
}
