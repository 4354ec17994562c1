use std::fmt;

use super::BitVec;
use crate::error::{Error, Result};

/// Dense GF(2) matrix stored as packed rows.
///
/// Matrices whose meaningful vectors are columns (encoding matrices, query
/// matrices) are still stored row-major; [`BitMatrix::column`] and
/// [`BitMatrix::from_columns`] convert between the two views.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            data: (0..n).map(|i| BitVec::unit(n, i)).collect(),
        }
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, data: Vec<BitVec>) -> Self {
        assert!(
            data.iter().all(|r| r.len() == cols),
            "every row must have {cols} columns"
        );
        Self {
            rows: data.len(),
            cols,
            data,
        }
    }

    /// Builds a `rows x columns.len()` matrix whose columns are `columns`.
    pub fn from_columns(rows: usize, columns: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column {j} has wrong length");
            for i in c.iter_ones() {
                m.data[i].set(j, true);
            }
        }
        m
    }

    /// Parses rows written as `0`/`1` strings, e.g. `["110", "011"]`.
    pub fn parse_rows(rows: &[&str]) -> Result<Self> {
        let data = rows.iter().map(|r| BitVec::parse_bits(r)).collect::<Result<Vec<_>>>()?;
        let cols = data.first().map_or(0, BitVec::len);
        if data.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse("ragged rows".into()));
        }
        Ok(Self::from_rows(cols, data))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &BitVec {
        &self.data[i]
    }

    pub fn row_slice(&self) -> &[BitVec] {
        &self.data
    }

    pub fn into_rows(self) -> Vec<BitVec> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i].set(j, value);
    }

    pub fn column(&self, j: usize) -> BitVec {
        assert!(j < self.cols, "column {j} out of range");
        BitVec::from_fn(self.rows, |i| self.data[i].get(j))
    }

    pub fn columns(&self) -> Vec<BitVec> {
        self.transpose().into_rows()
    }

    pub fn set_column(&mut self, j: usize, column: &BitVec) {
        assert_eq!(column.len(), self.rows, "column length mismatch");
        for (i, row) in self.data.iter_mut().enumerate() {
            row.set(j, column.get(i));
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for (i, row) in self.data.iter().enumerate() {
            for j in row.iter_ones() {
                t.data[j].set(i, true);
            }
        }
        t
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows, other.rows, "row count mismatch in hstack");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.concat(b)).collect();
        Self::from_rows(self.cols + other.cols, data)
    }

    /// Matrix-vector product `self * x`, i.e. the XOR of the columns selected by `x`.
    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols, "vector length must equal column count");
        BitVec::from_fn(self.rows, |i| self.data[i].dot(x))
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc = BitVec::zeros(other.cols);
                for k in row.iter_ones() {
                    acc.xor_assign(&other.data[k]);
                }
                acc
            })
            .collect();
        Self::from_rows(other.cols, data)
    }

    /// GF(2) rank. Works on a copy.
    pub fn rank(&self) -> usize {
        let mut rows = self.data.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            if let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) {
                rows.swap(rank, p);
                let (head, tail) = rows.split_at_mut(rank + 1);
                let pivot = &head[rank];
                for r in tail.iter_mut().filter(|r| r.get(col)) {
                    r.xor_assign(pivot);
                }
                rank += 1;
                if rank == rows.len() {
                    break;
                }
            }
        }
        rank
    }

    /// Reduced row echelon form together with the pivot column of each
    /// non-zero row.
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut rows = self.data.clone();
        let pivots = eliminate(&mut rows, self.cols, None);
        (Self::from_rows(self.cols, rows), pivots)
    }

    /// Canonical particular solution of `self * x = rhs`: pivot variables take
    /// the reduced right-hand side, every free variable is zero.
    pub fn solve(&self, rhs: &BitVec) -> Result<BitVec> {
        assert_eq!(rhs.len(), self.rows, "rhs length must equal row count");
        let mut rows = self.data.clone();
        let mut b = rhs.clone();
        let pivots = eliminate(&mut rows, self.cols, Some(&mut b));
        if (pivots.len()..self.rows).any(|r| b.get(r)) {
            return Err(Error::NoSolution);
        }
        let mut x = BitVec::zeros(self.cols);
        for (r, &c) in pivots.iter().enumerate() {
            if b.get(r) {
                x.set(c, true);
            }
        }
        Ok(x)
    }

    /// Inverse over GF(2), or [`Error::Singular`].
    pub fn try_invert(&self) -> Result<BitMatrix> {
        assert_eq!(self.rows, self.cols, "only square matrices can be inverted");
        let n = self.rows;
        let mut rows: Vec<BitVec> = self
            .data
            .iter()
            .enumerate()
            .map(|(i, r)| r.concat(&BitVec::unit(n, i)))
            .collect();
        let pivots = eliminate(&mut rows, n, None);
        if pivots.len() < n {
            return Err(Error::Singular);
        }
        Ok(Self::from_rows(n, rows.iter().map(|r| r.slice(n, n)).collect()))
    }
}

/// Gauss-Jordan elimination over the first `cols` columns of `rows`,
/// carrying `rhs` along. Returns the pivot columns in row order.
fn eliminate(rows: &mut [BitVec], cols: usize, mut rhs: Option<&mut BitVec>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows.len() {
            break;
        }
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        if let Some(b) = rhs.as_deref_mut() {
            let (bp, br) = (b.get(p), b.get(rank));
            b.set(rank, bp);
            b.set(p, br);
        }
        let pivot = rows[rank].clone();
        let pivot_rhs = rhs.as_deref().map(|b| b.get(rank));
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&pivot);
                if let (Some(b), Some(true)) = (rhs.as_deref_mut(), pivot_rhs) {
                    b.flip(r);
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    pivots
}

/// Whether `target` lies in the column span of `vectors`.
pub fn in_span(vectors: &BitMatrix, target: &BitVec) -> bool {
    assert_eq!(target.len(), vectors.rows(), "target length must equal row count");
    let mut basis = super::EchelonBasis::new(vectors.rows());
    for c in vectors.columns() {
        basis.insert(c);
    }
    basis.contains(target)
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{random_matrix, RngState};
    use proptest::prelude::*;

    fn m(rows: &[&str]) -> BitMatrix {
        BitMatrix::parse_rows(rows).unwrap()
    }

    /// Rank by enumerating every subset of rows: the rank is the largest
    /// subset size with no non-empty sub-subset XORing to zero, i.e. log2 of
    /// the number of distinct subset sums.
    fn brute_rank(mat: &BitMatrix) -> usize {
        let n = mat.rows();
        let mut sums = std::collections::HashSet::new();
        for mask in 0u32..(1 << n) {
            let mut acc = BitVec::zeros(mat.cols());
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    acc.xor_assign(mat.row(i));
                }
            }
            sums.insert(acc);
        }
        sums.len().trailing_zeros() as usize
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        assert_eq!(m(&["110", "101", "011"]).rank(), 2);
        assert_eq!(BitMatrix::zeros(4, 4).rank(), 0);
        assert_eq!(BitMatrix::zeros(0, 5).rank(), 0);
        assert_eq!(BitMatrix::zeros(5, 0).rank(), 0);
    }

    #[test]
    fn rref_examples() {
        let (r, p) = BitMatrix::identity(4).rref();
        assert_eq!(r, BitMatrix::identity(4));
        assert_eq!(p, vec![0, 1, 2, 3]);
        let (r, p) = m(&["01", "01"]).rref();
        assert_eq!(r, m(&["01", "00"]));
        assert_eq!(p, vec![1]);
    }

    #[test]
    fn solve_examples() {
        let e1 = BitVec::unit(3, 0);
        assert_eq!(BitMatrix::identity(3).solve(&e1).unwrap(), e1);
        let x = m(&["11"]).solve(&BitVec::parse_bits("1").unwrap()).unwrap();
        assert_eq!(x.to_string(), "10");
        let err = m(&["11", "11"]).solve(&BitVec::parse_bits("10").unwrap());
        assert!(matches!(err, Err(Error::NoSolution)));
    }

    #[test]
    fn in_span_examples() {
        let cols = BitMatrix::from_columns(
            2,
            &[BitVec::parse_bits("11").unwrap(), BitVec::parse_bits("01").unwrap()],
        );
        let e1 = BitVec::parse_bits("10").unwrap();
        assert!(in_span(&cols, &e1));
        let single = BitMatrix::from_columns(2, &[BitVec::parse_bits("11").unwrap()]);
        assert!(!in_span(&single, &e1));
        assert!(in_span(&BitMatrix::zeros(2, 0), &BitVec::zeros(2)));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(BitMatrix::identity(5).try_invert().unwrap(), BitMatrix::identity(5));
        let u = m(&["11", "01"]);
        assert_eq!(u.try_invert().unwrap(), u);
        assert!(matches!(m(&["11", "11"]).try_invert(), Err(Error::Singular)));
    }

    #[test]
    fn pseudo_inverse_form_breaks_on_full_row_rank() {
        // [1 1] has full row rank but V V^T = [0].
        let v = m(&["11"]);
        let gram = v.mul(&v.transpose());
        assert!(matches!(gram.try_invert(), Err(Error::Singular)));
        assert!(v.solve(&BitVec::unit(1, 0)).is_ok());
    }

    #[test]
    fn pseudo_inverse_agrees_when_gram_is_invertible() {
        let mut rng = RngState::new(77);
        let mut checked = 0;
        for _ in 0..200 {
            let v = random_matrix(&mut rng, 6, 10);
            let Ok(gram_inv) = v.mul(&v.transpose()).try_invert() else {
                continue;
            };
            let pinv = v.transpose().mul(&gram_inv);
            for r in 0..6 {
                let y = pinv.mul_vec(&BitVec::unit(6, r));
                assert_eq!(v.mul_vec(&y), BitVec::unit(6, r));
            }
            checked += 1;
        }
        assert!(checked > 10);
    }

    #[test]
    fn exhaustive_small_systems() {
        // Every 3x4 matrix (4096) against every rhs in F_2^3.
        for mask in 0u32..(1 << 12) {
            let mat = BitMatrix::from_rows(
                4,
                (0..3)
                    .map(|i| BitVec::from_fn(4, |j| mask >> (4 * i + j) & 1 == 1))
                    .collect(),
            );
            let reachable: std::collections::HashSet<BitVec> = (0u32..16)
                .map(|x| mat.mul_vec(&BitVec::from_fn(4, |j| x >> j & 1 == 1)))
                .collect();
            for b in 0u32..8 {
                let rhs = BitVec::from_fn(3, |i| b >> i & 1 == 1);
                match mat.solve(&rhs) {
                    Ok(x) => assert_eq!(mat.mul_vec(&x), rhs),
                    Err(_) => assert!(!reachable.contains(&rhs)),
                }
                assert_eq!(in_span(&mat, &rhs), reachable.contains(&rhs));
            }
        }
    }

    #[test]
    fn rank_matches_brute_force_up_to_six() {
        let mut rng = RngState::new(11);
        for rows in 0..=6 {
            for cols in 0..=6 {
                for _ in 0..20 {
                    let mat = random_matrix(&mut rng, rows, cols);
                    assert_eq!(mat.rank(), brute_rank(&mat), "{mat:?}");
                }
            }
        }
    }

    #[test]
    fn in_span_matches_enumeration_up_to_sixteen_columns() {
        let mut rng = RngState::new(12);
        for k in [0usize, 1, 5, 12, 16] {
            for _ in 0..5 {
                let mat = random_matrix(&mut rng, 10, k);
                let cols = mat.columns();
                let mut span = std::collections::HashSet::new();
                for mask in 0u32..(1 << k) {
                    let mut acc = BitVec::zeros(10);
                    for (j, c) in cols.iter().enumerate() {
                        if mask >> j & 1 == 1 {
                            acc.xor_assign(c);
                        }
                    }
                    span.insert(acc);
                }
                for t in 0u32..(1 << 10) {
                    let target = BitVec::from_fn(10, |i| t >> i & 1 == 1);
                    assert_eq!(in_span(&mat, &target), span.contains(&target));
                }
            }
        }
    }

    #[test]
    fn full_row_rank_systems_always_solve() {
        let mut rng = RngState::new(13);
        let mut instances = 0;
        while instances < 1000 {
            let mat = random_matrix(&mut rng, 8, 12);
            if mat.rank() < 8 {
                continue;
            }
            let b = crate::gf2::random_bitvec(&mut rng, 8).unwrap();
            let x = mat.solve(&b).unwrap();
            assert_eq!(mat.mul_vec(&x), b);
            instances += 1;
        }
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(seed in any::<u64>(), rows in 0usize..12, cols in 0usize..12) {
            let mat = random_matrix(&mut RngState::new(seed), rows, cols);
            let (r1, p1) = mat.rref();
            let (r2, p2) = r1.rref();
            prop_assert_eq!(&r1, &r2);
            prop_assert_eq!(&p1, &p2);
            prop_assert_eq!(p1.len(), mat.rank());
            prop_assert!(mat.rank() <= rows.min(cols));
        }

        #[test]
        fn inverse_multiplies_to_identity(seed in any::<u64>(), n in 1usize..20) {
            let mat = random_matrix(&mut RngState::new(seed), n, n);
            match mat.try_invert() {
                Ok(inv) => {
                    prop_assert_eq!(mat.mul(&inv), BitMatrix::identity(n));
                    prop_assert_eq!(inv.mul(&mat), BitMatrix::identity(n));
                }
                Err(_) => prop_assert!(mat.rank() < n),
            }
        }

        #[test]
        fn transpose_round_trips(seed in any::<u64>(), rows in 0usize..9, cols in 0usize..9) {
            let mat = random_matrix(&mut RngState::new(seed), rows, cols);
            prop_assert_eq!(mat.transpose().transpose(), mat.clone());
            prop_assert_eq!(BitMatrix::from_columns(rows, &mat.columns()), mat);
        }
    }
}
