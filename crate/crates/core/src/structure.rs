//! Accessibility structure of a chain: irreducibility, period, the
//! mutual-support graph and BFS spanning trees over it.

use std::collections::VecDeque;

use thiserror::Error;

use crate::matrix::{SquareMatrix, TransitionMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("chain is not irreducible")]
    Reducible,
    #[error("mutual-support graph is disconnected: state {} unreachable from root {}", .unreached + 1, .root + 1)]
    Disconnected { root: usize, unreached: usize },
    #[error("root state {} out of range for {n} states", .root + 1)]
    RootOutOfRange { root: usize, n: usize },
}

/// Off-diagonal support of a transition matrix.
///
/// Adjacency lists are sorted ascending, which fixes every traversal order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportGraph {
    n: usize,
    out: Vec<Vec<usize>>,
    mutual: Vec<Vec<usize>>,
}

impl SupportGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Successors `j != i` with `p[i][j] > 0`.
    pub fn successors(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    /// States `j` with both `p[i][j] > 0` and `p[j][i] > 0`.
    pub fn mutual_neighbors(&self, i: usize) -> &[usize] {
        &self.mutual[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.out[i].binary_search(&j).is_ok()
    }

    pub fn is_mutual(&self, i: usize, j: usize) -> bool {
        self.mutual[i].binary_search(&j).is_ok()
    }

    /// At least one of the two directed edges between `i` and `j` exists.
    pub fn is_linked(&self, i: usize, j: usize) -> bool {
        self.has_edge(i, j) || self.has_edge(j, i)
    }

    pub fn directed_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(i, succ)| succ.iter().map(move |&j| (i, j)))
    }

    /// Unordered mutual pairs as `(i, j)` with `i < j`, in lexicographic order.
    pub fn mutual_edges(&self) -> Vec<(usize, usize)> {
        self.mutual
            .iter()
            .enumerate()
            .flat_map(|(i, nbrs)| nbrs.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
            .collect()
    }
}

pub fn build_support(p: &TransitionMatrix) -> SupportGraph {
    let n = p.n();
    let mut out = vec![Vec::new(); n];
    let mut mutual = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i == j || !p.is_positive(i, j) {
                continue;
            }
            out[i].push(j);
            if p.is_positive(j, i) {
                mutual[i].push(j);
            }
        }
    }
    SupportGraph { n, out, mutual }
}

fn reach<F, I>(n: usize, start: usize, next: F) -> Vec<bool>
where
    F: Fn(usize) -> I,
    I: IntoIterator<Item = usize>,
{
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for v in next(u) {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// Strong connectivity via forward and backward reachability from state 1.
pub fn is_irreducible(p: &TransitionMatrix) -> bool {
    let g = build_support(p);
    let n = g.n;
    let mut rev = vec![Vec::new(); n];
    for (i, j) in g.directed_edges() {
        rev[j].push(i);
    }
    reach(n, 0, |u| g.out[u].iter().copied())
        .into_iter()
        .all(|x| x)
        && reach(n, 0, |u| rev[u].iter().copied())
            .into_iter()
            .all(|x| x)
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Period of an irreducible chain; 1 means aperiodic.
///
/// BFS levels from state 1; the period is the gcd of `level(u) + 1 - level(v)`
/// over all edges `u -> v`, self-loops included.
pub fn period(p: &TransitionMatrix) -> Result<usize, StructureError> {
    if !is_irreducible(p) {
        return Err(StructureError::Reducible);
    }
    let n = p.n();
    let mut level = vec![usize::MAX; n];
    let mut queue = VecDeque::from([0]);
    level[0] = 0;
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if p.is_positive(u, v) && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0;
    for u in 0..n {
        for v in 0..n {
            if p.is_positive(u, v) {
                g = gcd(g, (level[u] + 1).abs_diff(level[v]));
            }
        }
    }
    // Only a 1x1 chain without a positive self-loop could leave g at 0, and
    // row-stochasticity rules that out.
    Ok(g.max(1))
}

/// BFS tree over the mutual-support graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    root: usize,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    order: Vec<usize>,
}

impl SpanningTree {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// States in discovery order, root first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Tree edges `(parent, child)` in discovery order of the child.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.order
            .iter()
            .filter_map(|&v| self.parent[v].map(|s| (s, v)))
            .collect()
    }

    /// Tree path from `from` to `to`, both endpoints included.
    pub fn path(&self, from: usize, to: usize) -> Vec<usize> {
        let (mut a, mut b) = (from, to);
        let mut head = vec![a];
        let mut tail = vec![b];
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("non-root has a parent");
            head.push(a);
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("non-root has a parent");
            tail.push(b);
        }
        while a != b {
            a = self.parent[a].expect("non-root has a parent");
            b = self.parent[b].expect("non-root has a parent");
            head.push(a);
            tail.push(b);
        }
        // head and tail both end at the common ancestor
        tail.pop();
        head.extend(tail.into_iter().rev());
        head
    }
}

/// BFS over mutual edges from `root`, smallest state index first.
pub fn spanning_tree(g: &SupportGraph, root: usize) -> Result<SpanningTree, StructureError> {
    let n = g.n;
    if root >= n {
        return Err(StructureError::RootOutOfRange { root, n });
    }
    let mut parent = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([root]);
    depth[root] = 0;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in &g.mutual[u] {
            if depth[v] == usize::MAX {
                depth[v] = depth[u] + 1;
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    if let Some(unreached) = depth.iter().position(|&d| d == usize::MAX) {
        return Err(StructureError::Disconnected { root, unreached });
    }
    Ok(SpanningTree {
        root,
        parent,
        depth,
        order,
    })
}
