use fixedbitset::FixedBitSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::check_sizes;
use crate::systems::FiniteSystem;
use crate::uniform::{Entourage, Relation};
use crate::Result;

/// Points `p` with a `D`-chain of length at least one from `p` back to `p`.
///
/// The step graph has an edge `p → q` whenever `(f(p), q) ∈ D`; a point is
/// chain recurrent when its strongly connected component has a cycle.
pub fn chain_recurrent_points(sys: &FiniteSystem, d: &Entourage) -> Result<FixedBitSet> {
    check_sizes(sys, d)?;
    let n = sys.size();
    let edges = (0..n).flat_map(|p| d.row(sys.apply(p)).ones().map(move |q| (p as u32, q as u32)));
    let mut graph = DiGraph::<(), ()>::with_capacity(n, 0);
    for _ in 0..n {
        graph.add_node(());
    }
    graph.extend_with_edges(edges);
    let mut recurrent = FixedBitSet::with_capacity(n);
    for scc in tarjan_scc(&graph) {
        let p = scc[0].index();
        if scc.len() > 1 || d.contains(sys.apply(p), p) {
            recurrent.extend(scc.iter().map(|v| v.index()));
        }
    }
    Ok(recurrent)
}

/// `R(G)` for `G = f × f` with `D`-chains taken coordinatewise.
///
/// A closed chain of length `a` through `p` and one of length `b` through
/// `q` both repeat to length `ab`, so `(p, q)` is chain recurrent under
/// `G` exactly when `p` and `q` are chain recurrent under `f`.
pub fn chain_recurrent_pairs(sys: &FiniteSystem, d: &Entourage) -> Result<Relation> {
    let cr = chain_recurrent_points(sys, d)?;
    let mut rows = vec![FixedBitSet::with_capacity(sys.size()); sys.size()];
    for p in cr.ones() {
        rows[p] = cr.clone();
    }
    Relation::from_rows(sys.carrier().clone(), rows)
}
