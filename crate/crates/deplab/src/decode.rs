//! Maximum spanning arborescence over a dense arc-score matrix.
//!
//! The decoder implements the classic contraction algorithm: pick the
//! best incoming arc for every vertex; if the picks are acyclic they
//! form the optimal arborescence, otherwise contract a cycle into a
//! single vertex with adjusted arc scores, solve recursively, and expand
//! the cycle by dropping the member arc displaced by the entering arc.
//!
//! Scores are any ordered additive scalar (`i64`, `f64`, ...); arcs can
//! be forbidden outright, which is how the single-root mode restricts
//! the artificial root to one child. Ties prefer the smaller head index
//! at each selection point, so decoding is fully deterministic.

use std::collections::HashMap;
use std::ops::{Add, Sub};

use num_traits::Zero;

/// Scalar usable as an arc score.
pub trait ArcScore:
    Copy + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Zero + std::fmt::Debug
{
}

impl<T> ArcScore for T where
    T: Copy + PartialOrd + Add<Output = T> + Sub<Output = T> + Zero + std::fmt::Debug
{
}

/// Dense `(n + 1) x (n + 1)` score matrix. Row is the head, column the
/// dependent; index 0 is the artificial root. The diagonal and column 0
/// are never read by the decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcMatrix<S> {
    n: usize,
    cells: Vec<S>,
}

impl<S: ArcScore> ArcMatrix<S> {
    pub fn new(n: usize) -> Self {
        ArcMatrix {
            n,
            cells: vec![S::zero(); (n + 1) * (n + 1)],
        }
    }

    /// Number of words (vertices excluding the root).
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, head: usize, dep: usize) -> usize {
        head * (self.n + 1) + dep
    }

    #[inline]
    pub fn get(&self, head: usize, dep: usize) -> S {
        self.cells[self.idx(head, dep)]
    }

    #[inline]
    pub fn set(&mut self, head: usize, dep: usize, score: S) {
        let i = self.idx(head, dep);
        self.cells[i] = score;
    }
}

/// Total score of a head assignment under `matrix`.
pub fn tree_score<S: ArcScore>(matrix: &ArcMatrix<S>, heads: &[usize]) -> S {
    let mut total = S::zero();
    for (d, &h) in heads.iter().enumerate().skip(1) {
        total = total + matrix.get(h, d);
    }
    total
}

/// Highest-scoring arborescence rooted at 0, with no limit on how many
/// dependents the root may take. Returns the head of each word in a
/// vector indexed `0..=n` (slot 0 is 0).
pub fn max_arborescence<S: ArcScore>(matrix: &ArcMatrix<S>) -> Vec<usize> {
    decode(matrix, None)
}

/// Highest-scoring arborescence in which the root has exactly one
/// dependent: the best constrained tree over all candidate root children.
/// Ties prefer the smaller root child.
pub fn max_arborescence_single_root<S: ArcScore>(matrix: &ArcMatrix<S>) -> Vec<usize> {
    let n = matrix.n();
    if n == 0 {
        return vec![0];
    }
    let mut best: Option<(S, Vec<usize>)> = None;
    for root_child in 1..=n {
        let heads = decode(matrix, Some(root_child));
        let score = tree_score(matrix, &heads);
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, heads));
        }
    }
    best.expect("n >= 1 yields at least one candidate").1
}

fn decode<S: ArcScore>(matrix: &ArcMatrix<S>, root_child: Option<usize>) -> Vec<usize> {
    let n = matrix.n();
    if n == 0 {
        return vec![0];
    }
    let mut state = Decoder {
        n,
        scores: matrix.clone(),
        allowed: vec![true; (n + 1) * (n + 1)],
    };
    for v in 0..=n {
        state.forbid(v, v);
        state.forbid(v, 0);
    }
    if let Some(r) = root_child {
        for d in 1..=n {
            if d != r {
                state.forbid(0, d);
            }
        }
    }
    let mut active = vec![true; n + 1];
    let parents = state.solve(&mut active);
    let mut heads = vec![0usize; n + 1];
    for d in 1..=n {
        heads[d] = parents[d].expect("an allowed arborescence always exists");
    }
    heads
}

struct Decoder<S> {
    n: usize,
    scores: ArcMatrix<S>,
    allowed: Vec<bool>,
}

impl<S: ArcScore> Decoder<S> {
    fn is_allowed(&self, head: usize, dep: usize) -> bool {
        self.allowed[head * (self.n + 1) + dep]
    }

    fn forbid(&mut self, head: usize, dep: usize) {
        self.allowed[head * (self.n + 1) + dep] = false;
    }

    fn permit(&mut self, head: usize, dep: usize) {
        self.allowed[head * (self.n + 1) + dep] = true;
    }

    /// Best allowed parent for every active non-root vertex; ties keep
    /// the smallest head index.
    fn best_parents(&self, active: &[bool]) -> Vec<Option<usize>> {
        let mut parents = vec![None; self.n + 1];
        for d in 1..=self.n {
            if !active[d] {
                continue;
            }
            let mut best: Option<(S, usize)> = None;
            for (h, &h_active) in active.iter().enumerate() {
                if h == d || !h_active || !self.is_allowed(h, d) {
                    continue;
                }
                let s = self.scores.get(h, d);
                if best.as_ref().is_none_or(|(b, _)| s > *b) {
                    best = Some((s, h));
                }
            }
            parents[d] = best.map(|(_, h)| h);
        }
        parents
    }

    fn solve(&mut self, active: &mut Vec<bool>) -> Vec<Option<usize>> {
        let parents = self.best_parents(active);
        let Some(cycle) = find_cycle(&parents, active) else {
            return parents;
        };

        // Contract the cycle into its first member.
        let rep = cycle[0];
        let mut in_cycle = vec![false; self.n + 1];
        for &m in &cycle {
            in_cycle[m] = true;
        }
        // Original score of each member's in-cycle arc, taken before any
        // matrix cell is rewritten.
        let cycle_arc: HashMap<usize, S> = cycle
            .iter()
            .map(|&m| (m, self.scores.get(parents[m].expect("cycle arc"), m)))
            .collect();
        let cycle_total = cycle
            .iter()
            .fold(S::zero(), |acc, m| acc + cycle_arc[m]);
        let mut members_asc = cycle.clone();
        members_asc.sort_unstable();

        // For every outside vertex, the best member arc in each direction.
        struct Link<S> {
            vertex: usize,
            incoming: Option<(S, usize)>, // vertex -> cycle
            outgoing: Option<(S, usize)>, // cycle -> vertex
        }
        let mut links: Vec<Link<S>> = Vec::new();
        for v in 0..=self.n {
            if !active[v] || in_cycle[v] {
                continue;
            }
            let mut incoming: Option<(S, usize)> = None;
            for &m in &members_asc {
                if !self.is_allowed(v, m) {
                    continue;
                }
                let s = cycle_total + self.scores.get(v, m) - cycle_arc[&m];
                if incoming.as_ref().is_none_or(|(b, _)| s > *b) {
                    incoming = Some((s, m));
                }
            }
            let mut outgoing: Option<(S, usize)> = None;
            if v != 0 {
                for &m in &members_asc {
                    if !self.is_allowed(m, v) {
                        continue;
                    }
                    let s = self.scores.get(m, v);
                    if outgoing.as_ref().is_none_or(|(b, _)| s > *b) {
                        outgoing = Some((s, m));
                    }
                }
            }
            links.push(Link { vertex: v, incoming, outgoing });
        }

        let mut entering: HashMap<usize, usize> = HashMap::new();
        let mut leaving: HashMap<usize, usize> = HashMap::new();
        for link in &links {
            let v = link.vertex;
            match link.incoming {
                Some((s, m)) => {
                    self.scores.set(v, rep, s);
                    self.permit(v, rep);
                    entering.insert(v, m);
                }
                None => self.forbid(v, rep),
            }
            if v != 0 {
                match link.outgoing {
                    Some((s, m)) => {
                        self.scores.set(rep, v, s);
                        self.permit(rep, v);
                        leaving.insert(v, m);
                    }
                    None => self.forbid(rep, v),
                }
            }
        }

        for &m in &cycle {
            if m != rep {
                active[m] = false;
            }
        }
        let mut sub = self.solve(active);

        // Expand: re-route arcs that touched the representative, then give
        // every cycle member its parent - the entering arc displaces one
        // member's in-cycle arc, the rest keep theirs.
        let entry_tail = sub[rep].expect("contracted vertex has a parent");
        let entered = entering[&entry_tail];
        for v in 0..=self.n {
            if v != rep && sub[v] == Some(rep) {
                sub[v] = Some(leaving[&v]);
            }
        }
        for &m in &cycle {
            sub[m] = if m == entered { Some(entry_tail) } else { parents[m] };
            active[m] = true;
        }
        sub
    }
}

/// Finds one cycle in the parent assignment, if any, walking vertices in
/// ascending order so the result is deterministic.
fn find_cycle(parents: &[Option<usize>], active: &[bool]) -> Option<Vec<usize>> {
    let n = parents.len() - 1;
    // 0 = unvisited, 1 = on current walk, 2 = cleared.
    let mut color = vec![0u8; n + 1];
    color[0] = 2;
    for start in 1..=n {
        if !active[start] || color[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut v = start;
        loop {
            match color[v] {
                1 => {
                    let pos = path.iter().position(|&p| p == v).expect("on path");
                    return Some(path[pos..].to_vec());
                }
                2 => break,
                _ => {
                    color[v] = 1;
                    path.push(v);
                    match parents[v] {
                        Some(p) => v = p,
                        None => break,
                    }
                }
            }
        }
        for p in path {
            color[p] = 2;
        }
    }
    None
}
