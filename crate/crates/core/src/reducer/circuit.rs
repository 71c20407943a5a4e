//! Circuit description language.
//!
//! ```text
//! var x
//! var y
//! and a x y
//! goal g a
//! ```
//!
//! Sources name a node (`x`) or, for Choice and Fanout, one of its two
//! outputs (`ch.1`, `ch.2`). Lines may appear in any order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::gadgets::GadgetKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Variable,
    Or,
    And,
    Choice,
    Fanout,
    Goal,
}

impl NodeKind {
    pub fn inputs(self) -> usize {
        match self {
            NodeKind::Variable => 0,
            NodeKind::Or | NodeKind::And => 2,
            NodeKind::Choice | NodeKind::Fanout | NodeKind::Goal => 1,
        }
    }

    pub fn outputs(self) -> usize {
        match self {
            NodeKind::Goal => 0,
            NodeKind::Choice | NodeKind::Fanout => 2,
            _ => 1,
        }
    }

    pub fn gadget(self) -> GadgetKind {
        match self {
            NodeKind::Variable => GadgetKind::Variable,
            NodeKind::Or => GadgetKind::Or,
            NodeKind::And => GadgetKind::And,
            NodeKind::Choice => GadgetKind::Choice,
            NodeKind::Fanout => GadgetKind::Fanout,
            NodeKind::Goal => GadgetKind::Goal,
        }
    }

    /// Gadget port name of input `i`.
    pub fn in_port(self, i: usize) -> &'static str {
        match (self.inputs(), i) {
            (1, 0) => "In",
            (2, 0) => "In 1",
            (2, 1) => "In 2",
            _ => panic!("{self:?} has no input {i}"),
        }
    }

    /// Gadget port name of output `i`.
    pub fn out_port(self, i: usize) -> &'static str {
        match (self.outputs(), i) {
            (1, 0) => "Out",
            (2, 0) => "Out 1",
            (2, 1) => "Out 2",
            _ => panic!("{self:?} has no output {i}"),
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            NodeKind::Variable => "var",
            NodeKind::Or => "or",
            NodeKind::And => "and",
            NodeKind::Choice => "choice",
            NodeKind::Fanout => "fanout",
            NodeKind::Goal => "goal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
}

/// `from` node's output `from_port` feeds `to` node's input `to_port`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub from_port: usize,
    pub to: usize,
    pub to_port: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: node `{id}` defined twice")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: unknown node `{id}`")]
    UnknownNode { line: usize, id: String },
    #[error("line {line}: `{src}` does not name an output of a {kind} node")]
    Arity { line: usize, src: String, kind: String },
    #[error("port {0} used twice")]
    PortReused(String),
    #[error("port {0} is not connected")]
    DanglingPort(String),
    #[error("circuit needs exactly one goal, found {0}")]
    GoalCount(usize),
    #[error("cycle through node `{0}`")]
    Cycle(String),
    #[error("circuit is not connected")]
    Disconnected,
}

impl Circuit {
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    pub fn goal(&self) -> usize {
        self.nodes.iter().position(|n| n.kind == NodeKind::Goal).expect("validated circuit has a goal")
    }

    pub fn output_name(&self, node: usize, port: usize) -> String {
        let n = &self.nodes[node];
        if n.kind.outputs() == 2 {
            format!("{}.{}", n.id, port + 1)
        } else {
            n.id.clone()
        }
    }

    /// Nodes in dependency order; ties broken by declaration order.
    pub fn topo_order(&self) -> Vec<usize> {
        let mut indeg = vec![0usize; self.nodes.len()];
        for e in &self.edges {
            indeg[e.to] += 1;
        }
        let mut ready: BTreeSet<usize> = (0..self.nodes.len()).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::new();
        while let Some(&n) = ready.iter().next() {
            ready.remove(&n);
            order.push(n);
            for e in self.edges.iter().filter(|e| e.from == n) {
                indeg[e.to] -= 1;
                if indeg[e.to] == 0 {
                    ready.insert(e.to);
                }
            }
        }
        order
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.nodes.iter().enumerate() {
            write!(f, "{} {}", n.kind.keyword(), n.id)?;
            let mut ins: Vec<&Edge> = self.edges.iter().filter(|e| e.to == i).collect();
            ins.sort_by_key(|e| e.to_port);
            for e in ins {
                write!(f, " {}", self.output_name(e.from, e.from_port))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn valid_id(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let mut nodes = Vec::new();
    let mut sources: Vec<(usize, usize, Vec<String>)> = Vec::new();
    let mut ids: BTreeMap<String, usize> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let words: Vec<&str> = body.split_whitespace().collect();
        let kind = match words[0] {
            "var" => NodeKind::Variable,
            "or" => NodeKind::Or,
            "and" => NodeKind::And,
            "choice" => NodeKind::Choice,
            "fanout" => NodeKind::Fanout,
            "goal" => NodeKind::Goal,
            other => return Err(CircuitError::Syntax { line, msg: format!("unknown node kind `{other}`") }),
        };
        if words.len() != 2 + kind.inputs() {
            return Err(CircuitError::Syntax {
                line,
                msg: format!("`{}` takes an id and {} source(s)", words[0], kind.inputs()),
            });
        }
        let id = words[1];
        if !valid_id(id) {
            return Err(CircuitError::Syntax { line, msg: format!("bad id `{id}`") });
        }
        if ids.insert(id.to_string(), nodes.len()).is_some() {
            return Err(CircuitError::DuplicateId { line, id: id.to_string() });
        }
        sources.push((line, nodes.len(), words[2..].iter().map(|s| s.to_string()).collect()));
        nodes.push(Node { id: id.to_string(), kind });
    }

    let mut edges = Vec::new();
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (line, to, srcs) in sources {
        for (to_port, src) in srcs.iter().enumerate() {
            let (name, suffix) = match src.split_once('.') {
                Some((n, s)) => (n, Some(s)),
                None => (src.as_str(), None),
            };
            let &from = ids.get(name).ok_or_else(|| CircuitError::UnknownNode { line, id: name.to_string() })?;
            let kind = nodes[from].kind;
            let from_port = match (kind.outputs(), suffix) {
                (1, None) => 0,
                (2, Some("1")) => 0,
                (2, Some("2")) => 1,
                _ => {
                    return Err(CircuitError::Arity { line, src: src.clone(), kind: format!("{kind:?}") });
                }
            };
            if !used.insert((from, from_port)) {
                let n: &Node = &nodes[from];
                let port =
                    if kind.outputs() == 2 { format!("{}.{}", n.id, from_port + 1) } else { format!("{}.out", n.id) };
                return Err(CircuitError::PortReused(port));
            }
            edges.push(Edge { from, from_port, to, to_port });
        }
    }
    let circuit = Circuit { nodes, edges };

    let goals = circuit.count(NodeKind::Goal);
    if goals != 1 {
        return Err(CircuitError::GoalCount(goals));
    }
    for (i, n) in circuit.nodes.iter().enumerate() {
        for p in 0..n.kind.outputs() {
            if !used.contains(&(i, p)) {
                let port = if n.kind.outputs() == 2 { format!("{}.{}", n.id, p + 1) } else { format!("{}.out", n.id) };
                return Err(CircuitError::DanglingPort(port));
            }
        }
    }
    let order = circuit.topo_order();
    if order.len() != circuit.nodes.len() {
        let stuck = (0..circuit.nodes.len()).find(|i| !order.contains(i)).expect("some node is on a cycle");
        return Err(CircuitError::Cycle(circuit.nodes[stuck].id.clone()));
    }
    // Weak connectivity.
    let mut seen = vec![false; circuit.nodes.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(n) = stack.pop() {
        for e in &circuit.edges {
            for (a, b) in [(e.from, e.to), (e.to, e.from)] {
                if a == n && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(CircuitError::Disconnected);
    }
    Ok(circuit)
}
