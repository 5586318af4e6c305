//! Time-stamped causal graphs over macroscopic and microscopic facts, with
//! rules restricting arrows that do not point forward in time.
//!
//! An edge is *forward* when its effect is strictly later than its cause;
//! every other edge, including one between equal times, is *backward*.
//!
//! * R1: a backward edge must end at a micro node.
//! * R2: a micro node hit by a backward edge has no other edges at all.
//! * R3: a micro node has at most one edge into a macro node. This reads
//!   "no two disjoint pathways to macro effects" conservatively and can be
//!   disabled.
//!
//! Under R1 and R2 every backward edge ends in a sink with in-degree one,
//! so no cycle can pass through it, and forward edges alone cannot close a
//! cycle.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::GadgetError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactKind {
    Micro,
    Macro,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub id: String,
    pub kind: FactKind,
    pub time: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub cause: String,
    pub effect: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CausalGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    R1,
    R2,
    R3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    /// Offending node, or the cause of the offending edge.
    pub node: String,
    /// Effect of the offending edge, when the violation concerns one edge.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effect: Option<String>,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateOptions {
    pub single_macro_effect: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            single_macro_effect: true,
        }
    }
}

/// Index form: edges as `(cause, effect)` node positions.
struct Indexed<'g> {
    nodes: &'g [Node],
    edges: Vec<(usize, usize)>,
}

impl CausalGraph {
    fn index(&self) -> Result<Indexed<'_>, GadgetError> {
        let mut ids: HashMap<&str, usize> = HashMap::with_capacity(self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            if ids.insert(n.id.as_str(), i).is_some() {
                return Err(GadgetError::MalformedGraph(format!("duplicate node id {:?}", n.id)));
            }
        }
        let find = |id: &str| {
            ids.get(id)
                .copied()
                .ok_or_else(|| GadgetError::MalformedGraph(format!("edge endpoint {id:?} is not a node")))
        };
        let edges = self
            .edges
            .iter()
            .map(|e| Ok((find(&e.cause)?, find(&e.effect)?)))
            .collect::<Result<_, GadgetError>>()?;
        Ok(Indexed {
            nodes: &self.nodes,
            edges,
        })
    }
}

/// All rule violations, ordered by rule and then by position in the input.
pub fn validate(graph: &CausalGraph, opts: ValidateOptions) -> Result<Vec<Violation>, GadgetError> {
    let g = graph.index()?;
    let n = g.nodes.len();
    let backward = |&(c, e): &(usize, usize)| g.nodes[e].time <= g.nodes[c].time;
    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    let mut macro_out = vec![0usize; n];
    for &(c, e) in &g.edges {
        outdeg[c] += 1;
        indeg[e] += 1;
        if g.nodes[e].kind == FactKind::Macro {
            macro_out[c] += 1;
        }
    }
    let mut out = Vec::new();
    for edge in g.edges.iter().filter(|e| backward(e)) {
        let (c, e) = *edge;
        if g.nodes[e].kind == FactKind::Macro {
            out.push(Violation {
                rule: Rule::R1,
                node: g.nodes[c].id.clone(),
                effect: Some(g.nodes[e].id.clone()),
                message: format!(
                    "edge from time {} to time {} ends at a macro node",
                    g.nodes[c].time, g.nodes[e].time
                ),
            });
        }
    }
    let mut hit = vec![false; n];
    for edge in g.edges.iter().filter(|e| backward(e)) {
        hit[edge.1] = true;
    }
    for v in 0..n {
        if hit[v] && g.nodes[v].kind == FactKind::Micro && (indeg[v] > 1 || outdeg[v] > 0) {
            out.push(Violation {
                rule: Rule::R2,
                node: g.nodes[v].id.clone(),
                effect: None,
                message: format!(
                    "micro node reached by a backward edge has {} other incoming and {} outgoing edges",
                    indeg[v] - 1,
                    outdeg[v]
                ),
            });
        }
    }
    if opts.single_macro_effect {
        for (node, &count) in g.nodes.iter().zip(&macro_out) {
            if node.kind == FactKind::Micro && count > 1 {
                out.push(Violation {
                    rule: Rule::R3,
                    node: node.id.clone(),
                    effect: None,
                    message: format!("micro node causes {count} macro nodes directly"),
                });
            }
        }
    }
    Ok(out)
}

/// Whether the graph has no directed cycle (Kahn's algorithm).
pub fn is_acyclic(graph: &CausalGraph) -> Result<bool, GadgetError> {
    let g = graph.index()?;
    let n = g.nodes.len();
    let mut indeg = vec![0usize; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(c, e) in &g.edges {
        indeg[e] += 1;
        succ[c].push(e);
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(v) = queue.pop_front() {
        removed += 1;
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    Ok(removed == n)
}
