//! Causal graph over primary variables `Y_1..Y_p` with interventions from
//! secondary variables `X_1..X_q`, plus the derived ancestral relation graph.
//!
//! Node indices are 0-based throughout the in-memory API; serialized forms
//! (JSON, DOT) are 1-based.

use std::collections::BTreeSet;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Immutable causal graph: directed edges among `p` primary variables and
/// intervention edges from `q` secondary variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalGraph {
    p: usize,
    q: usize,
    edges: BTreeSet<(usize, usize)>,
    interventions: BTreeSet<(usize, usize)>,
}

impl CausalGraph {
    /// Builds a graph, validating index ranges and acyclicity of the primary
    /// edges. Construction of an invalid graph is an error, not a latent state.
    pub fn new(
        p: usize,
        q: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        interventions: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        let interventions: BTreeSet<(usize, usize)> = interventions.into_iter().collect();
        for &(i, j) in &edges {
            check_index(i, p)?;
            check_index(j, p)?;
        }
        for &(l, j) in &interventions {
            check_index(l, q)?;
            check_index(j, p)?;
        }
        if let Some(cycle) = find_cycle(&edges, p) {
            return Err(Error::CycleDetected { cycle });
        }
        Ok(Self {
            p,
            q,
            edges,
            interventions,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn interventions(&self) -> &BTreeSet<(usize, usize)> {
        &self.interventions
    }

    /// Intervention targets of `X_l`.
    pub fn targets(&self, l: usize) -> BTreeSet<usize> {
        self.interventions
            .iter()
            .filter(|&&(a, _)| a == l)
            .map(|&(_, j)| j)
            .collect()
    }

    /// Intervention set of `Y_j`: secondary indices with an edge into `j`.
    pub fn intr(&self, j: usize) -> Result<BTreeSet<usize>> {
        check_index(j, self.p)?;
        Ok(self
            .interventions
            .iter()
            .filter(|&&(_, b)| b == j)
            .map(|&(l, _)| l)
            .collect())
    }

    pub fn parents(&self, j: usize) -> Result<BTreeSet<usize>> {
        check_index(j, self.p)?;
        Ok(self
            .edges
            .iter()
            .filter(|&&(_, b)| b == j)
            .map(|&(a, _)| a)
            .collect())
    }

    pub fn children(&self, k: usize) -> Result<BTreeSet<usize>> {
        check_index(k, self.p)?;
        Ok(self
            .edges
            .iter()
            .filter(|&&(a, _)| a == k)
            .map(|&(_, b)| b)
            .collect())
    }

    /// All nodes with a directed path into `j`; `j` itself is excluded.
    pub fn ancestors(&self, j: usize) -> Result<BTreeSet<usize>> {
        check_index(j, self.p)?;
        let mut seen = BTreeSet::new();
        let mut stack: Vec<usize> = self.parents(j)?.into_iter().collect();
        while let Some(k) = stack.pop() {
            if seen.insert(k) {
                stack.extend(self.parents(k)?);
            }
        }
        Ok(seen)
    }

    /// All nodes reachable from `k` by a directed path; `k` itself is excluded.
    pub fn descendants(&self, k: usize) -> Result<BTreeSet<usize>> {
        check_index(k, self.p)?;
        let mut seen = BTreeSet::new();
        let mut stack: Vec<usize> = self.children(k)?.into_iter().collect();
        while let Some(j) = stack.pop() {
            if seen.insert(j) {
                stack.extend(self.children(j)?);
            }
        }
        Ok(seen)
    }

    /// Mediator set of `(k, j)`: nodes on some directed path from `k` to `j`,
    /// excluding the endpoints.
    pub fn mediators(&self, k: usize, j: usize) -> Result<BTreeSet<usize>> {
        check_index(k, self.p)?;
        check_index(j, self.p)?;
        let below_k = self.descendants(k)?;
        let above_j = self.ancestors(j)?;
        Ok(below_k
            .intersection(&above_j)
            .copied()
            .filter(|&i| i != k && i != j)
            .collect())
    }

    /// Length of the longest directed path from `j` to a leaf; 0 for leaves.
    pub fn height(&self, j: usize) -> Result<usize> {
        check_index(j, self.p)?;
        let mut memo = vec![None; self.p];
        Ok(self.height_memo(j, &mut memo))
    }

    fn height_memo(&self, j: usize, memo: &mut Vec<Option<usize>>) -> usize {
        if let Some(h) = memo[j] {
            return h;
        }
        let h = self
            .edges
            .iter()
            .filter(|&&(a, _)| a == j)
            .map(|&(_, b)| 1 + self.height_memo(b, memo))
            .max()
            .unwrap_or(0);
        memo[j] = Some(h);
        h
    }

    /// Length of the longest directed path from `k` to `j`, or `None` when no
    /// path exists. A DAG has no self-paths, so `(k, k)` is `None`.
    pub fn longest_path_len(&self, k: usize, j: usize) -> Result<Option<usize>> {
        check_index(k, self.p)?;
        check_index(j, self.p)?;
        if k == j {
            return Ok(None);
        }
        // Longest path from each node to j over the DAG, memoized.
        fn go(
            g: &CausalGraph,
            from: usize,
            to: usize,
            memo: &mut Vec<Option<Option<usize>>>,
        ) -> Option<usize> {
            if let Some(v) = memo[from] {
                return v;
            }
            let mut best: Option<usize> = None;
            for &(a, b) in g.edges.iter().filter(|&&(a, _)| a == from) {
                debug_assert_eq!(a, from);
                let via = if b == to {
                    Some(1)
                } else {
                    go(g, b, to, memo).map(|l| l + 1)
                };
                if let Some(l) = via {
                    best = Some(best.map_or(l, |cur| cur.max(l)));
                }
            }
            memo[from] = Some(best);
            best
        }
        let mut memo = vec![None; self.p];
        Ok(go(self, k, j, &mut memo))
    }

    /// Nodes with no outgoing edge among the primary variables.
    pub fn leaves(&self) -> BTreeSet<usize> {
        let has_out: BTreeSet<usize> = self.edges.iter().map(|&(a, _)| a).collect();
        (0..self.p).filter(|j| !has_out.contains(j)).collect()
    }

    /// Valid IVs of `Y_j`: secondary variables intervening on `j` and nothing
    /// else.
    pub fn valid_ivs(&self, j: usize) -> Result<BTreeSet<usize>> {
        check_index(j, self.p)?;
        let mut out = BTreeSet::new();
        for &(l, b) in &self.interventions {
            if b == j {
                let others = self
                    .interventions
                    .iter()
                    .any(|&(a, c)| a == l && c != j);
                if !others {
                    out.insert(l);
                }
            }
        }
        Ok(out)
    }

    /// Candidate IVs of `Y_j`: secondary variables intervening on `j` whose
    /// every other target is a descendant of `j`.
    pub fn candidate_ivs(&self, j: usize) -> Result<BTreeSet<usize>> {
        check_index(j, self.p)?;
        let desc = self.descendants(j)?;
        let mut out = BTreeSet::new();
        for &(l, b) in &self.interventions {
            if b == j {
                let ok = self
                    .interventions
                    .iter()
                    .filter(|&&(a, c)| a == l && c != j)
                    .all(|&(_, c)| desc.contains(&c));
                if ok {
                    out.insert(l);
                }
            }
        }
        Ok(out)
    }

    /// Derives the ancestral relation graph: transitive ancestral closure,
    /// instrument reachability, and candidate IV sets.
    pub fn to_arg(&self) -> Result<AncestralGraph> {
        let mut ancestral = BTreeSet::new();
        let mut reach = BTreeSet::new();
        for j in 0..self.p {
            let mut sources = self.ancestors(j)?;
            for &k in &sources {
                ancestral.insert((k, j));
            }
            sources.insert(j);
            for k in sources {
                for l in self.intr(k)? {
                    reach.insert((l, j));
                }
            }
        }
        let mut candidate_ivs = Vec::with_capacity(self.p);
        for j in 0..self.p {
            candidate_ivs.push(self.candidate_ivs(j)?);
        }
        AncestralGraph::new(self.p, self.q, ancestral, reach, candidate_ivs)
    }
}

/// Ancestral relation graph: transitively closed ancestral edges, instrument
/// reachability edges, and per-node candidate IV sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AncestralGraph {
    p: usize,
    q: usize,
    ancestral_edges: BTreeSet<(usize, usize)>,
    reach_edges: BTreeSet<(usize, usize)>,
    candidate_ivs: Vec<BTreeSet<usize>>,
}

impl AncestralGraph {
    pub fn new(
        p: usize,
        q: usize,
        ancestral_edges: BTreeSet<(usize, usize)>,
        reach_edges: BTreeSet<(usize, usize)>,
        candidate_ivs: Vec<BTreeSet<usize>>,
    ) -> Result<Self> {
        for &(k, j) in &ancestral_edges {
            check_index(k, p)?;
            check_index(j, p)?;
        }
        for &(l, j) in &reach_edges {
            check_index(l, q)?;
            check_index(j, p)?;
        }
        if candidate_ivs.len() != p {
            return Err(Error::ShapeMismatch {
                context: format!("candidate_ivs has {} entries for p = {p}", candidate_ivs.len()),
            });
        }
        // Transitive closedness and acyclicity.
        for &(k, j) in &ancestral_edges {
            if ancestral_edges.contains(&(j, k)) || k == j {
                return Err(Error::CycleDetected { cycle: vec![k, j] });
            }
            for &(a, b) in &ancestral_edges {
                if a == j && !ancestral_edges.contains(&(k, b)) {
                    return Err(Error::ShapeMismatch {
                        context: format!(
                            "ancestral edges not transitively closed: ({k},{j}),({j},{b}) without ({k},{b})"
                        ),
                    });
                }
            }
        }
        for (k, ivs) in candidate_ivs.iter().enumerate() {
            for &l in ivs {
                check_index(l, q)?;
                if !reach_edges.contains(&(l, k)) {
                    return Err(Error::ShapeMismatch {
                        context: format!("candidate IV {l} of node {k} lacks a reach edge"),
                    });
                }
            }
        }
        Ok(Self {
            p,
            q,
            ancestral_edges,
            reach_edges,
            candidate_ivs,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn ancestral_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.ancestral_edges
    }

    pub fn reach_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.reach_edges
    }

    pub fn candidate_ivs(&self, k: usize) -> Result<&BTreeSet<usize>> {
        check_index(k, self.p)?;
        Ok(&self.candidate_ivs[k])
    }

    pub fn all_candidate_ivs(&self) -> &[BTreeSet<usize>] {
        &self.candidate_ivs
    }

    /// Nodes with at least one outgoing ancestral edge.
    pub fn sources(&self) -> BTreeSet<usize> {
        self.ancestral_edges.iter().map(|&(k, _)| k).collect()
    }

    /// Mediators of `(k, j)` read off the closure:
    /// `{i : (k,i) and (i,j) are both ancestral}`.
    pub fn mediators(&self, k: usize, j: usize) -> BTreeSet<usize> {
        (0..self.p)
            .filter(|&i| {
                self.ancestral_edges.contains(&(k, i)) && self.ancestral_edges.contains(&(i, j))
            })
            .collect()
    }
}

fn check_index(index: usize, limit: usize) -> Result<()> {
    if index >= limit {
        return Err(Error::IndexOutOfRange { index, limit });
    }
    Ok(())
}

/// Returns a directed cycle among `edges` if one exists (DFS coloring).
pub(crate) fn find_cycle(edges: &BTreeSet<(usize, usize)>, p: usize) -> Option<Vec<usize>> {
    let mut adj = vec![Vec::new(); p];
    for &(a, b) in edges {
        adj[a].push(b);
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut color = vec![0u8; p];
    let mut stack_path: Vec<usize> = Vec::new();

    fn dfs(
        v: usize,
        adj: &[Vec<usize>],
        color: &mut [u8],
        path: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        color[v] = 1;
        path.push(v);
        for &w in &adj[v] {
            if color[w] == 1 {
                let start = path.iter().position(|&x| x == w).unwrap();
                let mut cycle = path[start..].to_vec();
                cycle.push(w);
                return Some(cycle);
            }
            if color[w] == 0 {
                if let Some(c) = dfs(w, adj, color, path) {
                    return Some(c);
                }
            }
        }
        color[v] = 2;
        path.pop();
        None
    }

    for v in 0..p {
        if color[v] == 0 {
            if let Some(c) = dfs(v, &adj, &mut color, &mut stack_path) {
                return Some(c);
            }
        }
    }
    None
}

// JSON boundary: 1-based indices, schema
// {"p":int,"q":int,"edges":[[k,j],...],"interventions":[[l,j],...]}

#[derive(Serialize, Deserialize)]
struct CausalGraphRepr {
    p: usize,
    q: usize,
    edges: Vec<[usize; 2]>,
    interventions: Vec<[usize; 2]>,
}

impl Serialize for CausalGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CausalGraphRepr {
            p: self.p,
            q: self.q,
            edges: self.edges.iter().map(|&(a, b)| [a + 1, b + 1]).collect(),
            interventions: self
                .interventions
                .iter()
                .map(|&(a, b)| [a + 1, b + 1])
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CausalGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = CausalGraphRepr::deserialize(deserializer)?;
        let to_internal = |pairs: Vec<[usize; 2]>| -> std::result::Result<Vec<(usize, usize)>, D::Error> {
            pairs
                .into_iter()
                .map(|[a, b]| {
                    if a == 0 || b == 0 {
                        Err(D::Error::custom("indices are 1-based; found 0"))
                    } else {
                        Ok((a - 1, b - 1))
                    }
                })
                .collect()
        };
        CausalGraph::new(
            repr.p,
            repr.q,
            to_internal(repr.edges)?,
            to_internal(repr.interventions)?,
        )
        .map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct AncestralGraphRepr {
    p: usize,
    q: usize,
    ancestral_edges: Vec<[usize; 2]>,
    reach_edges: Vec<[usize; 2]>,
    candidate_ivs: Vec<Vec<usize>>,
}

impl Serialize for AncestralGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        AncestralGraphRepr {
            p: self.p,
            q: self.q,
            ancestral_edges: self
                .ancestral_edges
                .iter()
                .map(|&(a, b)| [a + 1, b + 1])
                .collect(),
            reach_edges: self
                .reach_edges
                .iter()
                .map(|&(a, b)| [a + 1, b + 1])
                .collect(),
            candidate_ivs: self
                .candidate_ivs
                .iter()
                .map(|s| s.iter().map(|&l| l + 1).collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AncestralGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = AncestralGraphRepr::deserialize(deserializer)?;
        let to_internal = |pairs: Vec<[usize; 2]>| -> std::result::Result<BTreeSet<(usize, usize)>, D::Error> {
            pairs
                .into_iter()
                .map(|[a, b]| {
                    if a == 0 || b == 0 {
                        Err(D::Error::custom("indices are 1-based; found 0"))
                    } else {
                        Ok((a - 1, b - 1))
                    }
                })
                .collect()
        };
        let candidate_ivs = repr
            .candidate_ivs
            .into_iter()
            .map(|s| {
                s.into_iter()
                    .map(|l| {
                        if l == 0 {
                            Err(D::Error::custom("indices are 1-based; found 0"))
                        } else {
                            Ok(l - 1)
                        }
                    })
                    .collect()
            })
            .collect::<std::result::Result<Vec<BTreeSet<usize>>, D::Error>>()?;
        AncestralGraph::new(
            repr.p,
            repr.q,
            to_internal(repr.ancestral_edges)?,
            to_internal(repr.reach_edges)?,
            candidate_ivs,
        )
        .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The worked example graph: Y1 -> Y2 -> Y3 with X1 -> Y1, X2 -> Y2,
    /// X3 -> Y3, X4 -> {Y2, Y3}. All 0-based here.
    pub(crate) fn example_graph() -> CausalGraph {
        CausalGraph::new(
            3,
            4,
            [(0, 1), (1, 2)],
            [(0, 0), (1, 1), (2, 2), (3, 1), (3, 2)],
        )
        .unwrap()
    }

    fn set(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    #[test]
    fn parents_basics() {
        let g = example_graph();
        assert_eq!(g.parents(2).unwrap(), set(&[1]));
        let empty = CausalGraph::new(3, 0, [], []).unwrap();
        assert_eq!(empty.parents(1).unwrap(), set(&[]));
        let chain = CausalGraph::new(3, 0, [(0, 1), (1, 2)], []).unwrap();
        assert_eq!(chain.parents(1).unwrap(), set(&[0]));
        assert!(g.parents(3).is_err());
    }

    #[test]
    fn ancestors_basics() {
        let chain = CausalGraph::new(3, 0, [(0, 1), (1, 2)], []).unwrap();
        assert_eq!(chain.ancestors(2).unwrap(), set(&[0, 1]));
        let g = example_graph();
        assert_eq!(g.ancestors(1).unwrap(), set(&[0]));
        assert_eq!(g.ancestors(0).unwrap(), set(&[]));
    }

    #[test]
    fn mediators_basics() {
        let g = example_graph();
        assert_eq!(g.mediators(0, 2).unwrap(), set(&[1]));
        let pair = CausalGraph::new(2, 0, [(0, 1)], []).unwrap();
        assert_eq!(pair.mediators(0, 1).unwrap(), set(&[]));
        // diamond 1->2->4, 1->3->4: every path from 1 to 4 passes 2 or 3
        let diamond = CausalGraph::new(4, 0, [(0, 1), (0, 2), (1, 3), (2, 3)], []).unwrap();
        assert_eq!(diamond.mediators(0, 3).unwrap(), set(&[1, 2]));
    }

    #[test]
    fn height_basics() {
        let g = example_graph();
        assert_eq!(g.height(0).unwrap(), 2);
        assert_eq!(g.height(2).unwrap(), 0);
        let diamond = CausalGraph::new(4, 0, [(0, 1), (0, 2), (1, 3), (2, 3)], []).unwrap();
        assert_eq!(diamond.height(0).unwrap(), 2);
    }

    #[test]
    fn longest_path_basics() {
        let g = example_graph();
        assert_eq!(g.longest_path_len(0, 2).unwrap(), Some(2));
        assert_eq!(g.longest_path_len(0, 0).unwrap(), None);
        assert_eq!(g.longest_path_len(2, 0).unwrap(), None);
        let diamond = CausalGraph::new(4, 0, [(0, 1), (0, 2), (1, 3), (2, 3)], []).unwrap();
        assert_eq!(diamond.longest_path_len(0, 3).unwrap(), Some(2));
    }

    #[test]
    fn leaves_basics() {
        let g = example_graph();
        assert_eq!(g.leaves(), set(&[2]));
        let edgeless = CausalGraph::new(3, 0, [], []).unwrap();
        assert_eq!(edgeless.leaves(), set(&[0, 1, 2]));
        let chain = CausalGraph::new(3, 0, [(0, 1), (1, 2)], []).unwrap();
        assert_eq!(chain.leaves(), set(&[2]));
    }

    #[test]
    fn valid_ivs_basics() {
        let g = example_graph();
        assert_eq!(g.valid_ivs(1).unwrap(), set(&[1]));
        // X1 hits both Y1 and Y2: excluded for Y1
        let shared = CausalGraph::new(2, 1, [], [(0, 0), (0, 1)]).unwrap();
        assert_eq!(shared.valid_ivs(0).unwrap(), set(&[]));
        assert_eq!(g.valid_ivs(0).unwrap(), set(&[0]));
        let none = CausalGraph::new(1, 1, [], []).unwrap();
        assert_eq!(none.valid_ivs(0).unwrap(), set(&[]));
    }

    #[test]
    fn candidate_ivs_basics() {
        let g = example_graph();
        assert_eq!(g.candidate_ivs(1).unwrap(), set(&[1, 3]));
        // X4 hits Y2, a non-descendant of Y3
        assert_eq!(g.candidate_ivs(2).unwrap(), set(&[2]));
        for j in 0..3 {
            assert!(g.valid_ivs(j).unwrap().is_subset(&g.candidate_ivs(j).unwrap()));
        }
    }

    #[test]
    fn to_arg_example() {
        let g = example_graph();
        let arg = g.to_arg().unwrap();
        let eplus: BTreeSet<(usize, usize)> = [(0, 1), (0, 2), (1, 2)].into_iter().collect();
        assert_eq!(*arg.ancestral_edges(), eplus);
        let iplus: BTreeSet<(usize, usize)> = [
            (0, 0),
            (0, 1),
            (0, 2),
            (1, 1),
            (1, 2),
            (2, 2),
            (3, 1),
            (3, 2),
        ]
        .into_iter()
        .collect();
        assert_eq!(*arg.reach_edges(), iplus);
        assert_eq!(*arg.candidate_ivs(0).unwrap(), set(&[0]));
        assert_eq!(*arg.candidate_ivs(1).unwrap(), set(&[1, 3]));
        assert_eq!(*arg.candidate_ivs(2).unwrap(), set(&[2]));
    }

    #[test]
    fn to_arg_edge_cases() {
        let edgeless = CausalGraph::new(3, 2, [], [(0, 0), (1, 2)]).unwrap();
        let arg = edgeless.to_arg().unwrap();
        assert!(arg.ancestral_edges().is_empty());
        assert_eq!(*arg.reach_edges(), *edgeless.interventions());

        let chain =
            CausalGraph::new(3, 3, [(0, 1), (1, 2)], [(0, 0), (1, 1), (2, 2)]).unwrap();
        assert_eq!(chain.to_arg().unwrap().ancestral_edges().len(), 3);
    }

    #[test]
    fn cycle_rejected() {
        let err = CausalGraph::new(2, 0, [(0, 1), (1, 0)], []).unwrap_err();
        assert!(matches!(err, Error::CycleDetected { .. }));
    }

    #[test]
    fn height_dominates_children() {
        let g = example_graph();
        for &(k, j) in g.edges() {
            assert!(g.height(k).unwrap() > g.height(j).unwrap());
        }
    }

    #[test]
    fn non_mediator_partition() {
        // ancestors of j split into mediators of (k,j), non-mediators, and k
        let g = example_graph();
        let arg = g.to_arg().unwrap();
        for &(k, j) in arg.ancestral_edges() {
            let an = g.ancestors(j).unwrap();
            let me = g.mediators(k, j).unwrap();
            let nm: BTreeSet<usize> = an
                .iter()
                .copied()
                .filter(|i| !me.contains(i) && *i != k)
                .collect();
            let mut union = nm.clone();
            union.extend(me.iter().copied());
            union.insert(k);
            assert_eq!(union, an);
        }
    }

    #[test]
    fn json_round_trip() {
        let g = example_graph();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"edges\":[[1,2],[2,3]]"));
        let back: CausalGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);

        let arg = g.to_arg().unwrap();
        let s = serde_json::to_string(&arg).unwrap();
        let back: AncestralGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, arg);
    }
}
