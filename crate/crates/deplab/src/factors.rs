//! Structural factors of dependency arcs.
//!
//! Each function takes a graph that must be a valid tree (see
//! [`DependencyGraph::validate`]) and a dependent in `1..=n`, which
//! identifies the arc since every dependent has exactly one head.

use crate::treebank::DependencyGraph;

/// All four arc factors in one bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcFactors {
    pub dependency_length: usize,
    pub root_distance: usize,
    pub sibling_count: usize,
    pub degree: usize,
}

/// Linear distance `|head - dependent|`; arcs from the artificial root
/// count from position 0, so every length is at least 1.
pub fn dependency_length(graph: &DependencyGraph, dep: usize) -> usize {
    graph.head_of(dep).abs_diff(dep)
}

/// Number of arcs on the path from `dep` up to the artificial root; a
/// direct child of the root is at distance 1.
///
/// Panics if the head chain does not reach the root (invalid tree).
pub fn root_distance(graph: &DependencyGraph, dep: usize) -> usize {
    let mut hops = 0;
    let mut v = dep;
    while v != 0 {
        v = graph.head_of(v);
        hops += 1;
        assert!(hops <= graph.n(), "head chain does not reach the root");
    }
    hops
}

/// Number of other dependents sharing this arc's head.
pub fn sibling_count(graph: &DependencyGraph, dep: usize) -> usize {
    let head = graph.head_of(dep);
    (1..=graph.n())
        .filter(|&d| d != dep && graph.head_of(d) == head)
        .count()
}

/// Non-projectivity degree of the arc `head -> dep`: the number of words
/// strictly between the two endpoints that are not descendants of the
/// head and whose own head lies outside the open interval between the
/// endpoints. Projective arcs have degree 0.
pub fn arc_degree(graph: &DependencyGraph, dep: usize) -> usize {
    let head = graph.head_of(dep);
    let (lo, hi) = if head < dep { (head, dep) } else { (dep, head) };
    let in_span = |v: usize| lo < v && v < hi;
    let descendants = descendants_of(graph, head);
    (lo + 1..hi)
        .filter(|&w| !descendants[w] && !in_span(graph.head_of(w)))
        .count()
}

/// True when every arc has degree 0, i.e. no two arcs cross.
pub fn is_projective(graph: &DependencyGraph) -> bool {
    (1..=graph.n()).all(|d| arc_degree(graph, d) == 0)
}

pub fn arc_factors(graph: &DependencyGraph, dep: usize) -> ArcFactors {
    ArcFactors {
        dependency_length: dependency_length(graph, dep),
        root_distance: root_distance(graph, dep),
        sibling_count: sibling_count(graph, dep),
        degree: arc_degree(graph, dep),
    }
}

/// Membership mask over `0..=n`: which nodes sit in the subtree of `v`
/// (including `v` itself).
fn descendants_of(graph: &DependencyGraph, v: usize) -> Vec<bool> {
    let children = graph.child_table();
    let mut mask = vec![false; graph.n() + 1];
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        if mask[u] {
            continue;
        }
        mask[u] = true;
        stack.extend(children.get(u).into_iter().flatten().copied());
    }
    mask
}
