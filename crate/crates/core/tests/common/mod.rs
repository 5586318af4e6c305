use freebit_core::gadgets::causal::{CausalGraph, Edge, FactKind, Node};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random graph whose edges are mostly forward in time, with some backward
/// and equal-time edges mixed in.
pub fn random_graph(rng: &mut ChaCha8Rng) -> CausalGraph {
    let n = rng.random_range(1..=8);
    let nodes: Vec<Node> = (0..n)
        .map(|i| Node {
            id: format!("n{i}"),
            kind: if rng.random_bool(0.5) { FactKind::Micro } else { FactKind::Macro },
            time: rng.random_range(0..5),
        })
        .collect();
    let m = rng.random_range(0..=n + 3);
    let edges = (0..m)
        .map(|_| {
            let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
            let (c, e) = if rng.random_bool(0.75) && nodes[a].time > nodes[b].time { (b, a) } else { (a, b) };
            Edge {
                cause: nodes[c].id.clone(),
                effect: nodes[e].id.clone(),
            }
        })
        .collect();
    CausalGraph { nodes, edges }
}
