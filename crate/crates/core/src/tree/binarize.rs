use super::ColoredTree;

/// A binary tree whose dummy nodes stand in for the extra children of
/// high-degree nodes.
///
/// Node ids are assigned so that every parent has a smaller id than its
/// children; iterating ids in reverse is a valid bottom-up order.
/// A node `v` with children `u_1..u_k`, `k >= 3`, keeps `u_1` and hangs the
/// rest below a chain of `k - 2` dummies: `v -> (u_1, d_1)`,
/// `d_l -> (u_{l+1}, d_{l+1})` and the last dummy takes `u_{k-1}, u_k`.
/// Dummies have size 0 and color 0 in every count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinTree {
    pub(crate) left: Vec<Option<usize>>,
    pub(crate) right: Vec<Option<usize>>,
    pub(crate) parent: Vec<Option<usize>>,
    pub(crate) dummy: Vec<bool>,
    pub(crate) color: Vec<u8>,
    pub(crate) origin: Vec<usize>,
}

impl BinTree {
    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn left(&self, v: usize) -> Option<usize> {
        self.left[v]
    }

    pub fn right(&self, v: usize) -> Option<usize> {
        self.right[v]
    }

    pub fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.left[v].into_iter().chain(self.right[v])
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn is_dummy(&self, v: usize) -> bool {
        self.dummy[v]
    }

    /// Color of `v`; always 0 for dummies.
    pub fn color(&self, v: usize) -> u8 {
        self.color[v]
    }

    /// Size contribution of `v`: 1 for real nodes, 0 for dummies.
    pub fn weight(&self, v: usize) -> usize {
        usize::from(!self.dummy[v])
    }

    /// Original node that `v` was created for.
    pub fn origin(&self, v: usize) -> usize {
        self.origin[v]
    }

    pub fn real_count(&self) -> usize {
        self.dummy.iter().filter(|&&d| !d).count()
    }

    pub fn dummy_count(&self) -> usize {
        self.len() - self.real_count()
    }

    /// Colors swapped on real nodes; dummies stay 0.
    pub(crate) fn complemented(&self) -> BinTree {
        let mut out = self.clone();
        for v in 0..out.len() {
            if !out.dummy[v] {
                out.color[v] ^= 1;
            }
        }
        out
    }

    /// Real-node counts of every subtree.
    pub fn subtree_weights(&self) -> Vec<usize> {
        let mut w: Vec<usize> = (0..self.len()).map(|v| self.weight(v)).collect();
        for v in (1..self.len()).rev() {
            let p = self.parent[v].expect("non-root node has a parent");
            w[p] += w[v];
        }
        w
    }

    /// Collapses every dummy into its owner, recovering the original tree.
    pub fn contract(&self) -> ColoredTree {
        let n = self.real_count();
        let mut parent = vec![None; n];
        let mut color = vec![0u8; n];
        for v in 0..self.len() {
            if self.dummy[v] {
                continue;
            }
            let o = self.origin[v];
            color[o] = self.color[v];
            parent[o] = self.parent[v].map(|p| self.origin[p]);
        }
        ColoredTree::new(parent, color).expect("contraction of a binarized tree is a tree")
    }
}

/// Binarizes `t` by dummy chains (see [`BinTree`]).
pub fn binarize(t: &ColoredTree) -> BinTree {
    let cap = 2 * t.len();
    let mut bt = BinTree {
        left: Vec::with_capacity(cap),
        right: Vec::with_capacity(cap),
        parent: Vec::with_capacity(cap),
        dummy: Vec::with_capacity(cap),
        color: Vec::with_capacity(cap),
        origin: Vec::with_capacity(cap),
    };
    let alloc = |bt: &mut BinTree, slot: Option<(usize, bool)>, dummy: bool, color: u8, origin: usize| {
        let id = bt.left.len();
        bt.left.push(None);
        bt.right.push(None);
        bt.parent.push(slot.map(|(p, _)| p));
        bt.dummy.push(dummy);
        bt.color.push(color);
        bt.origin.push(origin);
        match slot {
            Some((p, false)) => bt.left[p] = Some(id),
            Some((p, true)) => bt.right[p] = Some(id),
            None => {}
        }
        id
    };
    // Breadth-first so that ids increase downwards; the slot is (parent, is_right).
    let mut queue = std::collections::VecDeque::new();
    queue.push_back((t.root(), None));
    while let Some((v, slot)) = queue.pop_front() {
        let id = alloc(&mut bt, slot, false, t.color(v), v);
        let kids = t.children(v);
        let k = kids.len();
        if k <= 2 {
            for (side, &u) in kids.iter().enumerate() {
                queue.push_back((u, Some((id, side == 1))));
            }
            continue;
        }
        queue.push_back((kids[0], Some((id, false))));
        let mut hook = id;
        for &u in &kids[1..k - 1] {
            let d = alloc(&mut bt, Some((hook, true)), true, 0, v);
            queue.push_back((u, Some((d, false))));
            hook = d;
        }
        queue.push_back((kids[k - 1], Some((hook, true))));
    }
    bt
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn star(k: usize) -> ColoredTree {
        let mut parent = vec![None];
        parent.extend((0..k).map(|_| Some(0)));
        ColoredTree::new(parent, vec![0; k + 1]).unwrap()
    }

    fn check_shape(bt: &BinTree) {
        for v in 0..bt.len() {
            for u in bt.children(v) {
                assert!(u > v);
                assert_eq!(bt.parent(u), Some(v));
            }
            if bt.is_dummy(v) {
                assert_eq!(bt.color(v), 0);
                assert!(bt.left(v).is_some() && bt.right(v).is_some());
            }
        }
    }

    #[test]
    fn binary_input_is_identity() {
        let t = ColoredTree::new(vec![None, Some(0), Some(0), Some(1)], vec![1, 0, 1, 1]).unwrap();
        let bt = binarize(&t);
        assert_eq!(bt.len(), 4);
        assert_eq!(bt.dummy_count(), 0);
        assert_eq!(bt.contract(), t);
    }

    #[test]
    fn star_gets_chain() {
        for k in 3..8 {
            let bt = binarize(&star(k));
            check_shape(&bt);
            assert_eq!(bt.dummy_count(), k - 2);
            assert_eq!(bt.contract(), star(k));
            assert_eq!(bt.subtree_weights()[0], k + 1);
        }
    }

    #[test]
    fn random_roundtrip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n: usize = rng.gen_range(1..=200);
            let spread = rng.gen_range(1..=n);
            let parent = (0..n)
                .map(|v| if v == 0 { None } else { Some(rng.gen_range(v.saturating_sub(spread)..v)) })
                .collect();
            let color = (0..n).map(|_| rng.gen_range(0..2)).collect();
            let t = ColoredTree::new(parent, color).unwrap();
            let bt = binarize(&t);
            check_shape(&bt);
            assert!(bt.len() < 2 * n);
            assert_eq!(bt.real_count(), n);
            assert_eq!(bt.contract(), t);
        }
    }
}
