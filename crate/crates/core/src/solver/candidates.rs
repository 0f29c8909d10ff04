use crate::graph::NodeId;
use crate::nodeset::NodeSet;

/// Nodes admissible at the last interior position of a `k`-edge path to
/// `target`: every `p` other than source and target whose cheapest
/// `(k-1)`-edge path from the source costs strictly less than the current
/// incumbent for `target`.
///
/// `exact_prev[p]` is that `(k-1)`-edge cost (`f64::INFINITY` when no such
/// path survived the search).
pub fn compute_candidate_set(exact_prev: &[f64], incumbent: f64, source: NodeId, target: NodeId) -> NodeSet {
    let mut set = NodeSet::new(exact_prev.len());
    for (p, &c) in exact_prev.iter().enumerate() {
        if p != source && p != target && c < incumbent {
            set.insert(p);
        }
    }
    set
}

/// Per-position candidate sets `T_k(t)` together with the per-length best
/// costs they were formed from.
#[derive(Clone, Debug, Default)]
pub struct CandidateSets {
    /// `best_by_length[j][p]`: cheapest evaluated `j`-edge path to `p`
    /// (index 0 unused).
    pub best_by_length: Vec<Vec<f64>>,
    /// `per_position[k][t]` = `T_k(t)`; empty for `k < 2` and non-targets.
    pub per_position: Vec<Vec<NodeSet>>,
}

impl CandidateSets {
    pub fn get(&self, k: usize, target: NodeId) -> Option<&NodeSet> {
        self.per_position.get(k).and_then(|sets| sets.get(target))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_comparison_and_exclusions() {
        let inf = f64::INFINITY;
        // nodes: 0 = source, 1, 2, 3 = target
        let exact = [0.0, 2.0, 3.0, 1.0];
        let t = compute_candidate_set(&exact, 3.0, 0, 3);
        assert_eq!(t.iter().collect::<Vec<_>>(), vec![1]);
        let none = compute_candidate_set(&[inf, 0.5, 0.7, 0.1], 0.0, 0, 3);
        assert!(none.is_empty());
    }
}
