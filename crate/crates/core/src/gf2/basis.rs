use super::BitVec;

/// Incrementally maintained XOR basis.
///
/// Each stored vector has a distinct pivot (its lowest set bit) and is zero at
/// the pivots of every vector inserted before it, so reducing a target against
/// the basis in insertion order clears pivots one at a time and never
/// reintroduces an earlier one. Insertion and membership cost `O(rank * words)`.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    dim: usize,
    vectors: Vec<(usize, BitVec)>,
}

impl EchelonBasis {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            vectors: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_full(&self) -> bool {
        self.vectors.len() == self.dim
    }

    /// Residual of `v` after reduction; zero iff `v` is in the span.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.dim, "vector length must equal basis dimension");
        let mut r = v.clone();
        for (pivot, b) in &self.vectors {
            if r.get(*pivot) {
                r.xor_assign(b);
            }
        }
        r
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` if it is independent of the current basis. Returns whether the
    /// rank increased.
    pub fn insert(&mut self, v: BitVec) -> bool {
        let r = self.reduce(&v);
        match r.first_one() {
            Some(pivot) => {
                self.vectors.push((pivot, r));
                true
            }
            None => false,
        }
    }
}
