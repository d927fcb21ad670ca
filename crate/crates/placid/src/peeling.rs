//! Recovery of the ancestral relation graph and candidate IV sets by
//! iterative leaf identification: the secondary rows with the fewest
//! detected dependencies point at current leaves, which are peeled off in
//! ascending height order.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dcor::DcorMatrices;
use crate::error::{Error, Result};
use crate::graph::{find_cycle, AncestralGraph};

/// Output of the peeling pass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeelingResult {
    /// Estimated ancestral relation graph.
    pub arg: AncestralGraph,
    /// Nodes removed at each peel round, in ascending height order. The
    /// rounds partition `0..p`.
    pub levels: Vec<BTreeSet<usize>>,
    /// IV indices selected for each node while it was a leaf.
    pub leaf_ivs: BTreeMap<usize, BTreeSet<usize>>,
    /// Degeneracy notes (stalls, argmax ties).
    pub warnings: Vec<String>,
}

/// Runs the leaf-peeling estimator on precomputed dependence matrices.
pub fn estimate_arg(dc: &DcorMatrices) -> Result<PeelingResult> {
    let q = dc.q();
    let p = dc.p();
    if p == 0 || q == 0 {
        return Err(Error::ShapeMismatch {
            context: format!("need q >= 1 and p >= 1, got q = {q}, p = {p}"),
        });
    }
    if dc.c.iter().any(|row| row.len() != p) || dc.rejections.len() != q
        || dc.rejections.iter().any(|row| row.len() != p)
    {
        return Err(Error::ShapeMismatch {
            context: "C and R matrices must both be q x p".into(),
        });
    }

    let mut warnings = Vec::new();
    let reach_initial: BTreeSet<(usize, usize)> = (0..q)
        .flat_map(|i| (0..p).filter_map(move |j| (dc.rejections[i][j] != 0).then_some((i, j))))
        .collect();

    let mut remaining_y: BTreeSet<usize> = (0..p).collect();
    let mut remaining_x: BTreeSet<usize> = (0..q).collect();
    let mut raw_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut levels: Vec<BTreeSet<usize>> = Vec::new();
    let mut leaf_ivs: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();

    while !remaining_y.is_empty() {
        // Support of each remaining secondary row over remaining primaries.
        let support = |l: usize| {
            remaining_y
                .iter()
                .filter(|&&j| dc.rejections[l][j] != 0)
                .count()
        };
        let min_support = remaining_x
            .iter()
            .map(|&l| support(l))
            .filter(|&s| s > 0)
            .min();
        let Some(min_support) = min_support else {
            // No remaining row detects anything: the printed loop would spin
            // forever. Peel everything left as one final level, IV-less.
            warnings.push(format!(
                "stall: {} node(s) remain with no detected dependence; peeled without IVs",
                remaining_y.len()
            ));
            for &j in &remaining_y {
                leaf_ivs.insert(j, BTreeSet::new());
            }
            levels.push(remaining_y.clone());
            remaining_y.clear();
            break;
        };

        let mut round_leaves: BTreeSet<usize> = BTreeSet::new();
        let mut round_ivs: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for &l in remaining_x.iter().filter(|&&l| support(l) == min_support) {
            // Leaf = remaining primary most correlated with row l; ties go to
            // the smallest index.
            let mut best_j = None;
            let mut best_c = f64::NEG_INFINITY;
            let mut tied = false;
            for &j in &remaining_y {
                let c = dc.c[l][j];
                if c > best_c {
                    best_c = c;
                    best_j = Some(j);
                    tied = false;
                } else if c == best_c {
                    tied = true;
                }
            }
            let k = best_j.expect("remaining_y nonempty");
            if tied {
                warnings.push(format!(
                    "argmax tie in row {l}: chose smallest node index {k}"
                ));
            }
            round_leaves.insert(k);
            round_ivs.entry(k).or_default().insert(l);
        }

        // Ancestral edges from this round's leaves to already-removed nodes,
        // judged on the full rejection matrix. The rows in iv(k) agree in
        // population, so any aggregation is consistent; a strict majority
        // vote tolerates a minority of missed rejections per edge, where
        // unanimity would drop a true edge on a single missed cell.
        let removed: Vec<usize> = (0..p).filter(|j| !remaining_y.contains(j)).collect();
        for (&k, ivs) in &round_ivs {
            for &j in &removed {
                let yes = ivs.iter().filter(|&&l| dc.rejections[l][j] != 0).count();
                if 2 * yes > ivs.len() {
                    raw_edges.insert((k, j));
                }
            }
        }

        for &k in &round_leaves {
            remaining_y.remove(&k);
        }
        for ivs in round_ivs.values() {
            for &l in ivs {
                remaining_x.remove(&l);
            }
        }
        leaf_ivs.extend(round_ivs);
        levels.push(round_leaves);
    }

    let ancestral = transitive_closure(&raw_edges, p)?;
    // Reach edges propagate through the estimated closure.
    let mut reach = reach_initial.clone();
    for &(l, k) in &reach_initial {
        for &(a, j) in &ancestral {
            if a == k {
                reach.insert((l, j));
            }
        }
    }
    let candidate_ivs = candidate_sets_from_arg(&ancestral, &reach, p, q);

    for (&k, ivs) in &leaf_ivs {
        if ivs.is_empty() && !warnings.iter().any(|w| w.starts_with("stall")) {
            warnings.push(format!("node {k} peeled with an empty IV set"));
        }
    }

    let arg = AncestralGraph::new(p, q, ancestral, reach, candidate_ivs)?;
    Ok(PeelingResult {
        arg,
        levels,
        leaf_ivs,
        warnings,
    })
}

/// Smallest transitively closed superset of `edges`. A cycle among the
/// accumulated edges makes any ancestral ordering meaningless and is
/// reported as a structured error.
pub fn transitive_closure(
    edges: &BTreeSet<(usize, usize)>,
    p: usize,
) -> Result<BTreeSet<(usize, usize)>> {
    if let Some(cycle) = find_cycle(edges, p) {
        return Err(Error::AmbiguousAncestralOrder { cycle });
    }
    let mut reach = vec![vec![false; p]; p];
    for &(a, b) in edges {
        reach[a][b] = true;
    }
    for k in 0..p {
        for i in 0..p {
            if reach[i][k] {
                for j in 0..p {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for i in 0..p {
        for j in 0..p {
            if reach[i][j] {
                if reach[j][i] {
                    return Err(Error::AmbiguousAncestralOrder { cycle: vec![i, j] });
                }
                out.insert((i, j));
            }
        }
    }
    Ok(out)
}

/// Candidate IV sets from an estimated ARG: `l` is a candidate for `k` when
/// it reaches `k` and every other node it reaches is an (estimated)
/// descendant of `k`.
pub fn candidate_sets_from_arg(
    ancestral: &BTreeSet<(usize, usize)>,
    reach: &BTreeSet<(usize, usize)>,
    p: usize,
    q: usize,
) -> Vec<BTreeSet<usize>> {
    let mut out = vec![BTreeSet::new(); p];
    for k in 0..p {
        for l in 0..q {
            if !reach.contains(&(l, k)) {
                continue;
            }
            let ok = (0..p)
                .filter(|&j| j != k && reach.contains(&(l, j)))
                .all(|j| ancestral.contains(&(k, j)));
            if ok {
                out[k].insert(l);
            }
        }
    }
    out
}
