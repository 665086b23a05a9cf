use super::{Key, ShapeStats};
use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    /// Splits on the bit at its depth: `left` holds the 0-keys, `right` the 1-keys.
    Internal {
        left: Option<NodeId>,
        right: Option<NodeId>,
    },
    External {
        key: usize,
    },
}

/// Binary trie over a fixed key set. Immutable once built.
#[derive(Debug, Clone)]
pub struct Trie {
    nodes: Vec<Node>,
    root: Option<NodeId>,
    n: usize,
    stats: ShapeStats,
}

impl Trie {
    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn key_count(&self) -> usize {
        self.n
    }

    /// Counts accumulated while building; [`shape_stats`] recomputes them.
    pub fn build_stats(&self) -> ShapeStats {
        self.stats
    }

    /// Follows the bits of `key` from the root and returns the key index
    /// stored at the external node reached, if any.
    pub fn locate(&self, key: &Key) -> Option<usize> {
        let mut cur = self.root?;
        let mut depth = 0;
        loop {
            match self.nodes[cur] {
                Node::External { key } => return Some(key),
                Node::Internal { left, right } => {
                    cur = if key.bit(depth)? { right? } else { left? };
                    depth += 1;
                }
            }
        }
    }
}

struct Builder<'a> {
    keys: &'a [Key],
    nodes: Vec<Node>,
    stats: ShapeStats,
}

impl Builder<'_> {
    fn build(&mut self, idx: &mut [usize], depth: usize) -> Result<NodeId> {
        let d = depth as u64;
        if idx.len() == 1 {
            self.stats.kpl += d;
            self.stats.height = self.stats.height.max(d);
            self.nodes.push(Node::External { key: idx[0] });
            return Ok(self.nodes.len() - 1);
        }
        if let Some(pos) = idx.iter().position(|&i| self.keys[i].len() <= depth) {
            let other = if pos == 0 { idx[1] } else { idx[0] };
            return Err(Error::KeyExhausted {
                first: idx[pos].min(other),
                second: idx[pos].max(other),
                depth,
            });
        }
        self.stats.size += 1;
        self.stats.npl += d;
        let id = self.nodes.len();
        self.nodes.push(Node::Internal {
            left: None,
            right: None,
        });

        // stable partition: 0-bits first
        let keys = self.keys;
        idx.sort_by_key(|&i| keys[i].bit(depth) == Some(true));
        let split = idx.partition_point(|&i| keys[i].bit(depth) == Some(false));
        let (zeros, ones) = idx.split_at_mut(split);
        let left = if zeros.is_empty() {
            None
        } else {
            Some(self.build(zeros, depth + 1)?)
        };
        let right = if ones.is_empty() {
            None
        } else {
            Some(self.build(ones, depth + 1)?)
        };
        self.nodes[id] = Node::Internal { left, right };
        Ok(id)
    }
}

/// Builds the trie of `keys`: a set of one key is a leaf, larger sets get an
/// internal node that routes each key by its next bit.
///
/// Fails with [`Error::KeyExhausted`] when two keys cannot be told apart
/// within their stored prefixes.
pub fn build_trie(keys: &[Key]) -> Result<Trie> {
    let mut builder = Builder {
        keys,
        nodes: Vec::with_capacity(2 * keys.len()),
        stats: ShapeStats::empty(keys.len() as u64),
    };
    let root = if keys.is_empty() {
        None
    } else {
        let mut idx: Vec<usize> = (0..keys.len()).collect();
        Some(builder.build(&mut idx, 0)?)
    };
    Ok(Trie {
        nodes: builder.nodes,
        root,
        n: keys.len(),
        stats: builder.stats,
    })
}

/// Size, path lengths and height of `trie` by a full traversal; depths are
/// counted in edges from the root.
pub fn shape_stats(trie: &Trie) -> ShapeStats {
    let mut stats = ShapeStats::empty(trie.n as u64);
    let mut stack: Vec<(NodeId, u64)> = trie.root.map(|r| (r, 0)).into_iter().collect();
    while let Some((id, depth)) = stack.pop() {
        match trie.nodes[id] {
            Node::External { .. } => {
                stats.kpl += depth;
                stats.height = stats.height.max(depth);
            }
            Node::Internal { left, right } => {
                stats.size += 1;
                stats.npl += depth;
                stack.extend(left.into_iter().chain(right).map(|c| (c, depth + 1)));
            }
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trie::sample_keys;
    use proptest::prelude::*;

    use crate::trie::SEVEN_KEYS;

    fn keys(bits: &[&str]) -> Vec<Key> {
        bits.iter().map(|b| Key::parse(b).unwrap()).collect()
    }

    #[test]
    fn seven_key_example() {
        let trie = build_trie(&keys(&SEVEN_KEYS)).unwrap();
        let s = shape_stats(&trie);
        assert_eq!((s.size, s.kpl, s.npl), (8, 27, 18));
        assert_eq!(s.height, 6);
        assert_eq!(s, trie.build_stats());
    }

    #[test]
    fn seven_key_example_with_shared_sixth_bit() {
        // 11001010 instead of 11001110: the last two keys agree on six bits
        // and need one more internal node at depth 6.
        let mut bits = SEVEN_KEYS;
        bits[6] = "11001010";
        let s = shape_stats(&build_trie(&keys(&bits)).unwrap());
        assert_eq!((s.size, s.kpl, s.npl), (9, 29, 24));
    }

    #[test]
    fn empty_and_single() {
        let t = build_trie(&[]).unwrap();
        assert_eq!(shape_stats(&t), ShapeStats::empty(0));
        assert!(t.root().is_none());

        let t = build_trie(&keys(&["0"])).unwrap();
        assert_eq!(shape_stats(&t), ShapeStats::empty(1));
        assert_eq!(t.nodes(), &[Node::External { key: 0 }]);
    }

    #[test]
    fn three_keys_by_hand() {
        let t = build_trie(&keys(&["00", "01", "1"])).unwrap();
        let s = shape_stats(&t);
        assert_eq!((s.size, s.kpl, s.npl), (2, 5, 1));
    }

    #[test]
    fn unary_chain_for_long_common_prefix() {
        // two keys sharing 4 bits: internal path of 5 nodes, both at depth 5
        let t = build_trie(&keys(&["00010", "00011"])).unwrap();
        let s = shape_stats(&t);
        assert_eq!((s.size, s.kpl, s.npl), (5, 10, 10));
        assert_eq!(s.kpl, 2 * s.size);
    }

    #[test]
    fn exhausted_keys_are_reported() {
        let err = build_trie(&keys(&["0101", "11", "0101"])).unwrap_err();
        assert!(matches!(
            err,
            Error::KeyExhausted {
                first: 0,
                second: 2,
                depth: 4
            }
        ));
        // a key that is a strict prefix of another is also exhausted
        assert!(build_trie(&keys(&["01", "011"])).is_err());
    }

    #[test]
    fn every_key_is_reachable() {
        let ks = sample_keys(200, 0.3, 11, 64).unwrap();
        let t = build_trie(&ks).unwrap();
        for (i, k) in ks.iter().enumerate() {
            assert_eq!(t.locate(k), Some(i));
        }
        let externals = t
            .nodes()
            .iter()
            .filter(|n| matches!(n, Node::External { .. }))
            .count();
        assert_eq!(externals, 200);
        assert!(matches!(t.node(t.root().unwrap()), Node::Internal { .. }));
    }

    fn distinct_keys() -> impl Strategy<Value = Vec<String>> {
        prop::collection::btree_set("[01]{12}", 1..24).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #[test]
        fn traversal_matches_incremental_counts(bits in distinct_keys()) {
            let ks: Vec<Key> = bits.iter().map(|b| Key::parse(b).unwrap()).collect();
            let t = build_trie(&ks).unwrap();
            let s = shape_stats(&t);
            prop_assert_eq!(s, t.build_stats());
            s.check_invariants().unwrap();
        }

        #[test]
        fn adding_a_key_never_shrinks(bits in distinct_keys(), extra in "[01]{12}") {
            prop_assume!(!bits.contains(&extra));
            let mut ks: Vec<Key> = bits.iter().map(|b| Key::parse(b).unwrap()).collect();
            let before = shape_stats(&build_trie(&ks).unwrap());
            ks.push(Key::parse(&extra).unwrap());
            let after = shape_stats(&build_trie(&ks).unwrap());
            prop_assert!(after.size >= before.size);
            prop_assert!(after.kpl >= before.kpl);
            prop_assert!(after.npl >= before.npl);
        }
    }
}
