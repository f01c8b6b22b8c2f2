//! Disjoint sets with path compression and union by rank, tracking each
//! component's eldest vertex (the one with the smallest filtration position).

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    eldest: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
            eldest: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Eldest vertex of x's component.
    pub fn eldest(&mut self, x: usize) -> usize {
        let root = self.find(x);
        self.eldest[root]
    }

    /// Merge the components of a and b. Returns `None` if already connected,
    /// otherwise the new root. The merged component's eldest is the smaller
    /// of the two eldests.
    pub fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return None;
        }
        let eldest = self.eldest[ra].min(self.eldest[rb]);
        let root = if self.rank[ra] < self.rank[rb] {
            self.parent[ra] = rb;
            rb
        } else if self.rank[ra] > self.rank[rb] {
            self.parent[rb] = ra;
            ra
        } else {
            self.parent[rb] = ra;
            self.rank[ra] += 1;
            ra
        };
        self.eldest[root] = eldest;
        Some(root)
    }

    pub fn roots(&mut self) -> Vec<usize> {
        let n = self.parent.len();
        let mut roots: Vec<usize> = (0..n).map(|x| self.find(x)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots
    }
}
