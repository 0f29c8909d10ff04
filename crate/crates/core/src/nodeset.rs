use std::fmt;

/// Fixed-capacity bit set over node indices.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct NodeSet {
    words: Vec<u64>,
}

impl NodeSet {
    pub fn new(capacity: usize) -> Self {
        NodeSet {
            words: vec![0; capacity.div_ceil(64)],
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut set = NodeSet::new(capacity);
        for i in 0..capacity {
            set.insert(i);
        }
        set
    }

    pub fn from_nodes(capacity: usize, nodes: impl IntoIterator<Item = usize>) -> Self {
        let mut set = NodeSet::new(capacity);
        for node in nodes {
            set.insert(node);
        }
        set
    }

    #[inline]
    pub fn insert(&mut self, node: usize) {
        self.words[node / 64] |= 1 << (node % 64);
    }

    #[inline]
    pub fn remove(&mut self, node: usize) {
        self.words[node / 64] &= !(1 << (node % 64));
    }

    #[inline]
    pub fn contains(&self, node: usize) -> bool {
        self.words.get(node / 64).is_some_and(|w| w & (1 << (node % 64)) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn intersect_with(&mut self, other: &NodeSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// Ascending iteration.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_remove_iterate() {
        let mut s = NodeSet::new(130);
        for i in [0, 5, 63, 64, 129] {
            s.insert(i);
        }
        s.remove(5);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(s.len(), 4);
        assert!(s.contains(129) && !s.contains(5) && !s.contains(1000));

        let other = NodeSet::from_nodes(130, [63, 129, 7]);
        s.intersect_with(&other);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![63, 129]);
        assert!(NodeSet::new(10).is_empty());
    }
}
