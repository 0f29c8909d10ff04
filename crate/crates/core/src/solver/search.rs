//! Level-synchronous pruned search.
//!
//! Level `k` holds the surviving `(k-1)`-edge prefixes from the source. Each
//! prefix carries the set of targets it may still improve. Before a level is
//! expanded, the candidate sets `T_k(t)` are formed from the cheapest
//! `(k-1)`-edge costs computed on the previous level. A prefix stays viable
//! for `t` only while its last node lies in `T_k(t)` and its own cost is
//! below the incumbent for `t`. By monotonicity, dropping `t` from a prefix
//! discards no path that could beat the incumbent. The search stops once no
//! prefix is viable for any target, or when the edge cap is reached.
//!
//! Prefixes of a level are expanded in parallel against a snapshot of the
//! incumbents taken at the start of the level. The results are then merged
//! sequentially in frontier order, so the outcome does not depend on the
//! number of worker threads.

use std::time::Instant;

use rayon::prelude::*;

use super::candidates::{compute_candidate_set, CandidateSets};
use super::{prefer, PrunedBranch, SearchStats, SearchTrace};
use crate::cost::PathCost;
use crate::graph::{MatrixGraph, NodeId, Path};
use crate::matrix::EdgeMatrix;
use crate::nodeset::NodeSet;
use crate::Result;

/// Frontiers smaller than this are expanded on the calling thread.
const PARALLEL_FRONTIER: usize = 8;

struct Prefix {
    nodes: Vec<NodeId>,
    composed: EdgeMatrix,
    cost: f64,
    viable: NodeSet,
}

struct Extension {
    node: NodeId,
    composed: EdgeMatrix,
    cost: f64,
    /// The extended path ends at a target it is viable for.
    candidate: bool,
    /// Targets the extended path may still lead to, if it is kept as a prefix.
    child: Option<NodeSet>,
}

struct Expanded {
    extensions: Vec<Extension>,
    dropped: Vec<NodeId>,
    active: bool,
    explored: u64,
}

struct Best {
    cost: f64,
    nodes: Vec<NodeId>,
    composed: EdgeMatrix,
}

pub(crate) struct Outcome {
    pub best: Vec<Option<Path>>,
    pub certified: bool,
    pub levels: usize,
    pub stats: SearchStats,
    pub trace: Option<SearchTrace>,
}

fn improve(slot: &mut Option<Best>, cost: f64, nodes: &[NodeId], composed: &EdgeMatrix) {
    let better = slot.as_ref().is_none_or(|b| prefer(cost, nodes, b.cost, &b.nodes));
    if better {
        *slot = Some(Best {
            cost,
            nodes: nodes.to_vec(),
            composed: composed.clone(),
        });
    }
}

fn incumbents(best: &[Option<Best>]) -> Vec<f64> {
    best.iter()
        .map(|b| b.as_ref().map_or(f64::INFINITY, |b| b.cost))
        .collect()
}

/// Splits `viable` into targets whose incumbent `cost` still undercuts and
/// targets that are dropped.
fn filter_by_cost(viable: &NodeSet, cost: f64, inc: &[f64]) -> (NodeSet, Vec<NodeId>) {
    let mut kept = viable.clone();
    let mut dropped = Vec::new();
    for t in viable.iter() {
        if cost >= inc[t] {
            kept.remove(t);
            dropped.push(t);
        }
    }
    (kept, dropped)
}

fn expand(
    graph: &MatrixGraph,
    cost: &dyn PathCost,
    prefix: &Prefix,
    sets: &[NodeSet],
    inc: &[f64],
    last_level: bool,
) -> Result<Expanded> {
    let n = graph.len();
    let last = *prefix.nodes.last().expect("prefix is never empty");
    let mut viable = NodeSet::new(n);
    let mut dropped = Vec::new();
    for t in prefix.viable.iter() {
        if sets[t].contains(last) && prefix.cost < inc[t] {
            viable.insert(t);
        } else {
            dropped.push(t);
        }
    }
    let mut out = Expanded {
        extensions: Vec::new(),
        dropped,
        active: !viable.is_empty(),
        explored: 0,
    };
    if !out.active {
        return Ok(out);
    }
    for u in 0..n {
        if prefix.nodes.contains(&u) {
            continue;
        }
        out.explored += 1;
        let candidate = viable.contains(u);
        let child = if last_level {
            None
        } else {
            let mut rest = viable.clone();
            rest.remove(u);
            (!rest.is_empty()).then_some(rest)
        };
        if !candidate && child.is_none() {
            continue;
        }
        let composed = cost.compose(&prefix.composed, graph.edge(last, u))?;
        let value = cost.evaluate(&composed)?;
        out.extensions.push(Extension {
            node: u,
            composed,
            cost: value,
            candidate,
            child,
        });
    }
    Ok(out)
}

fn extended(nodes: &[NodeId], u: NodeId) -> Vec<NodeId> {
    let mut v = Vec::with_capacity(nodes.len() + 1);
    v.extend_from_slice(nodes);
    v.push(u);
    v
}

/// Best paths from `source` to every node in `targets` using at most
/// `k_cap` edges (unbounded when `None`). Interior nodes range over the whole
/// graph.
pub(crate) fn run(
    graph: &MatrixGraph,
    source: NodeId,
    targets: &NodeSet,
    cost: &dyn PathCost,
    k_cap: Option<usize>,
    trace: bool,
) -> Result<Outcome> {
    let start = Instant::now();
    let n = graph.len();
    let k_limit = n.saturating_sub(1);
    let k_eff = k_cap.map_or(k_limit, |k| k.min(k_limit));
    let mut stats = SearchStats::default();
    let mut best: Vec<Option<Best>> = (0..n).map(|_| None).collect();
    let mut exact = vec![f64::INFINITY; n];
    let mut record = trace.then(|| SearchTrace {
        candidates: CandidateSets {
            best_by_length: vec![Vec::new()],
            per_position: vec![Vec::new(), Vec::new()],
        },
        pruned: Vec::new(),
    });

    // level 1: direct edges
    let mut frontier = Vec::new();
    for p in (0..n).filter(|&p| p != source) {
        stats.edges_explored += 1;
        stats.paths_evaluated += 1;
        let composed = graph.edge(source, p).clone();
        let value = cost.evaluate(&composed)?;
        exact[p] = value;
        if targets.contains(p) {
            improve(&mut best[p], value, &[source, p], &composed);
        }
        if k_eff >= 2 {
            let mut viable = targets.clone();
            viable.remove(source);
            viable.remove(p);
            if !viable.is_empty() {
                frontier.push(Prefix {
                    nodes: vec![source, p],
                    composed,
                    cost: value,
                    viable,
                });
            }
        }
    }
    let inc = incumbents(&best);
    for prefix in &mut frontier {
        let (kept, dropped) = filter_by_cost(&prefix.viable, prefix.cost, &inc);
        stats.pruned_count += dropped.len() as u64;
        if let Some(rec) = record.as_mut() {
            rec.pruned.extend(dropped.into_iter().map(|t| PrunedBranch {
                prefix: prefix.nodes.clone(),
                target: t,
            }));
        }
        prefix.viable = kept;
    }
    frontier.retain(|p| !p.viable.is_empty());
    if let Some(rec) = record.as_mut() {
        rec.candidates.best_by_length.push(exact.clone());
    }

    let mut certified = k_eff == k_limit;
    let mut levels = 1;
    for k in 2..=k_eff {
        let inc = incumbents(&best);
        let sets: Vec<NodeSet> = (0..n)
            .map(|t| {
                if t != source && targets.contains(t) {
                    compute_candidate_set(&exact, inc[t], source, t)
                } else {
                    NodeSet::new(n)
                }
            })
            .collect();
        let last_level = k == k_eff;
        let step = |p: &Prefix| expand(graph, cost, p, &sets, &inc, last_level);
        let expanded: Vec<Expanded> = if frontier.len() >= PARALLEL_FRONTIER {
            frontier.par_iter().map(step).collect::<Result<_>>()?
        } else {
            frontier.iter().map(step).collect::<Result<_>>()?
        };
        if let Some(rec) = record.as_mut() {
            rec.candidates.per_position.push(sets);
        }
        for (prefix, e) in frontier.iter().zip(&expanded) {
            stats.pruned_count += e.dropped.len() as u64;
            if let Some(rec) = record.as_mut() {
                rec.pruned.extend(e.dropped.iter().map(|&t| PrunedBranch {
                    prefix: prefix.nodes.clone(),
                    target: t,
                }));
            }
        }
        if !expanded.iter().any(|e| e.active) {
            certified = true;
            break;
        }
        levels = k;

        let mut next_exact = vec![f64::INFINITY; n];
        for (prefix, e) in frontier.iter().zip(&expanded) {
            stats.edges_explored += e.explored;
            stats.paths_evaluated += e.extensions.len() as u64;
            for ext in &e.extensions {
                next_exact[ext.node] = next_exact[ext.node].min(ext.cost);
                if ext.candidate {
                    let nodes = extended(&prefix.nodes, ext.node);
                    improve(&mut best[ext.node], ext.cost, &nodes, &ext.composed);
                }
            }
        }
        if let Some(rec) = record.as_mut() {
            rec.candidates.best_by_length.push(next_exact.clone());
        }
        if last_level {
            break;
        }

        let inc = incumbents(&best);
        let mut next = Vec::new();
        for (prefix, e) in frontier.into_iter().zip(expanded) {
            for ext in e.extensions {
                let Some(viable) = ext.child else { continue };
                let nodes = extended(&prefix.nodes, ext.node);
                let (kept, dropped) = filter_by_cost(&viable, ext.cost, &inc);
                stats.pruned_count += dropped.len() as u64;
                if let Some(rec) = record.as_mut() {
                    rec.pruned.extend(dropped.into_iter().map(|t| PrunedBranch {
                        prefix: nodes.clone(),
                        target: t,
                    }));
                }
                if !kept.is_empty() {
                    next.push(Prefix {
                        nodes,
                        composed: ext.composed,
                        cost: ext.cost,
                        viable: kept,
                    });
                }
            }
        }
        frontier = next;
        exact = next_exact;
    }

    stats.wall_time = start.elapsed().as_secs_f64();
    let best = best
        .into_iter()
        .map(|b| {
            b.map(|b| Path {
                nodes: b.nodes,
                composed: b.composed,
                cost: b.cost,
            })
        })
        .collect();
    Ok(Outcome {
        best,
        certified,
        levels,
        stats,
        trace: record,
    })
}
