use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rustc_hash::FxHashSet;

use super::ring::{Field, DEFAULT_PRIME};

/// Triplet-form matrix with integer coefficients; duplicate positions are summed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(u32, u32, i64)>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = SparseMatrix::new(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.push(i, j, v);
                }
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SparseMatrix::new(n, n);
        for i in 0..n {
            m.push(i, i, 1);
        }
        m
    }

    pub fn push(&mut self, row: usize, col: usize, v: i64) {
        debug_assert!(row < self.rows && col < self.cols);
        self.entries.push((row as u32, col as u32, v));
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0i64; self.cols]; self.rows];
        for &(i, j, v) in &self.entries {
            d[i as usize][j as usize] += v;
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.to_sparse_sums().is_empty()
    }

    fn to_sparse_sums(&self) -> Vec<(u32, u32, i64)> {
        let mut e = self.entries.clone();
        e.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut out: Vec<(u32, u32, i64)> = Vec::with_capacity(e.len());
        for (i, j, v) in e {
            match out.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => out.push((i, j, v)),
            }
        }
        out.retain(|t| t.2 != 0);
        out
    }

    /// Product self · other with exact integer arithmetic.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut by_row: Vec<Vec<(u32, i64)>> = vec![Vec::new(); other.rows];
        for &(i, j, v) in &other.entries {
            by_row[i as usize].push((j, v));
        }
        let mut out = SparseMatrix::new(self.rows, other.cols);
        for &(i, k, v) in &self.entries {
            for &(j, w) in &by_row[k as usize] {
                out.entries.push((i, j, v * w));
            }
        }
        out.entries = out.to_sparse_sums();
        out
    }

    /// Rank over the given field.
    pub fn rank(&self, field: Field) -> usize {
        scalar_rank(self, field)
    }
}

/// Exact rank of an integer matrix, over Q or F_p.
///
/// The bipartite row/column graph of the nonzero pattern is split into connected
/// components; each block is eliminated densely on its own.
pub fn scalar_rank(mat: &SparseMatrix, field: Field) -> usize {
    let mut entries = mat.to_sparse_sums();
    if let Field::Prime(p) = field {
        entries.retain(|t| t.2.rem_euclid(p as i64) != 0);
    }
    if entries.is_empty() {
        return 0;
    }
    let (rows, cols) = (mat.rows, mat.cols);
    let (peeled, entries) = peel_singletons(rows, cols, entries);
    if entries.is_empty() {
        return peeled;
    }
    let mut uf = UnionFind::new(rows + cols);
    for &(i, j, _) in &entries {
        uf.union(i as usize, rows + j as usize);
    }
    let mut block_of = vec![usize::MAX; rows + cols];
    let mut local = vec![0usize; rows + cols];
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut root_block = vec![usize::MAX; rows + cols];
    for &(i, j, _) in &entries {
        for node in [i as usize, rows + j as usize] {
            if block_of[node] != usize::MAX {
                continue;
            }
            let root = uf.find(node);
            if root_block[root] == usize::MAX {
                root_block[root] = blocks.len();
                blocks.push((0, 0));
            }
            let b = root_block[root];
            block_of[node] = b;
            let counter = if node < rows { &mut blocks[b].0 } else { &mut blocks[b].1 };
            local[node] = *counter;
            *counter += 1;
        }
    }
    let mut grouped: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new(); blocks.len()];
    for &(i, j, v) in &entries {
        grouped[block_of[i as usize]].push((local[i as usize], local[rows + j as usize], v));
    }
    blocks
        .iter()
        .zip(grouped)
        .map(|(&(r, c), es)| block_rank(r, c, &es, field))
        .sum::<usize>()
        + peeled
}

/// Rank over F_p by sparse elimination, pivoting on a column with the fewest
/// live entries and, within it, on the shortest row.
pub fn sparse_rank_mod_p(rows: usize, cols: usize, entries: &[(u32, u32, i64)], p: u64) -> usize {
    let mut row_vecs: Vec<Vec<(u32, u64)>> = vec![Vec::new(); rows];
    for &(i, j, v) in entries {
        let v = v.rem_euclid(p as i64) as u64;
        if v != 0 {
            row_vecs[i as usize].push((j, v));
        }
    }
    for r in &mut row_vecs {
        r.sort_unstable_by_key(|e| e.0);
        r.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 = (a.1 + b.1) % p;
                true
            } else {
                false
            }
        });
        r.retain(|e| e.1 != 0);
    }
    let mut col_rows: Vec<FxHashSet<u32>> = vec![FxHashSet::default(); cols];
    for (i, r) in row_vecs.iter().enumerate() {
        for &(j, _) in r {
            col_rows[j as usize].insert(i as u32);
        }
    }
    let mut heap: BinaryHeap<Reverse<(usize, u32)>> =
        (0..cols).filter(|&j| !col_rows[j].is_empty()).map(|j| Reverse((col_rows[j].len(), j as u32))).collect();
    let mut rank = 0;
    let mut scratch = Vec::new();
    while let Some(Reverse((count, j))) = heap.pop() {
        let j = j as usize;
        if col_rows[j].len() != count || count == 0 {
            continue;
        }
        let pivot_row = *col_rows[j].iter().min_by_key(|&&i| (row_vecs[i as usize].len(), i)).unwrap();
        let pivot = std::mem::take(&mut row_vecs[pivot_row as usize]);
        for &(c, _) in &pivot {
            col_rows[c as usize].remove(&pivot_row);
        }
        let pv = pivot[pivot.binary_search_by_key(&(j as u32), |e| e.0).unwrap()].1;
        let inv = mod_inverse(pv, p);
        let targets: Vec<u32> = col_rows[j].iter().copied().collect();
        for t in targets {
            let row = std::mem::take(&mut row_vecs[t as usize]);
            let tv = row[row.binary_search_by_key(&(j as u32), |e| e.0).unwrap()].1;
            let f = p - mul_mod(tv, inv, p);
            // row + f · pivot, merged
            scratch.clear();
            let (mut a, mut b) = (0, 0);
            while a < row.len() || b < pivot.len() {
                let ca = row.get(a).map_or(u32::MAX, |e| e.0);
                let cb = pivot.get(b).map_or(u32::MAX, |e| e.0);
                if ca < cb {
                    scratch.push(row[a]);
                    a += 1;
                } else if cb < ca {
                    let c = cb as usize;
                    col_rows[c].insert(t);
                    scratch.push((cb, mul_mod(f, pivot[b].1, p)));
                    heap.push(Reverse((col_rows[c].len(), cb)));
                    b += 1;
                } else {
                    let v = (row[a].1 + mul_mod(f, pivot[b].1, p)) % p;
                    if v == 0 {
                        col_rows[ca as usize].remove(&t);
                        heap.push(Reverse((col_rows[ca as usize].len(), ca)));
                    } else {
                        scratch.push((ca, v));
                    }
                    a += 1;
                    b += 1;
                }
            }
            row_vecs[t as usize] = scratch.clone();
        }
        debug_assert!(col_rows[j].is_empty());
        rank += 1;
        for &(c, _) in &pivot {
            if c as usize != j && !col_rows[c as usize].is_empty() {
                heap.push(Reverse((col_rows[c as usize].len(), c)));
            }
        }
    }
    rank
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

/// Repeatedly deletes a row or column holding a single nonzero entry together
/// with the column or row of that entry; each deletion lowers the rank by one.
/// Returns the number of deletions and the surviving entries.
fn peel_singletons(rows: usize, cols: usize, entries: Vec<(u32, u32, i64)>) -> (usize, Vec<(u32, u32, i64)>) {
    let mut row_entries = vec![Vec::new(); rows];
    let mut col_entries = vec![Vec::new(); cols];
    for (k, &(i, j, _)) in entries.iter().enumerate() {
        row_entries[i as usize].push(k);
        col_entries[j as usize].push(k);
    }
    let mut row_count: Vec<usize> = row_entries.iter().map(|v| v.len()).collect();
    let mut col_count: Vec<usize> = col_entries.iter().map(|v| v.len()).collect();
    let mut row_alive = vec![true; rows];
    let mut col_alive = vec![true; cols];
    // nodes 0..rows are rows, rows.. are columns
    let mut queue: Vec<usize> = (0..rows)
        .filter(|&i| row_count[i] == 1)
        .chain((0..cols).filter(|&j| col_count[j] == 1).map(|j| rows + j))
        .collect();
    let mut peeled = 0;
    while let Some(node) = queue.pop() {
        let (i, j) = if node < rows {
            if !row_alive[node] || row_count[node] != 1 {
                continue;
            }
            let k = row_entries[node].iter().copied().find(|&k| col_alive[entries[k].1 as usize]).expect("counted entry");
            (node, entries[k].1 as usize)
        } else {
            let j = node - rows;
            if !col_alive[j] || col_count[j] != 1 {
                continue;
            }
            let k = col_entries[j].iter().copied().find(|&k| row_alive[entries[k].0 as usize]).expect("counted entry");
            (entries[k].0 as usize, j)
        };
        peeled += 1;
        row_alive[i] = false;
        col_alive[j] = false;
        for &k in &row_entries[i] {
            let c = entries[k].1 as usize;
            if col_alive[c] {
                col_count[c] -= 1;
                if col_count[c] == 1 {
                    queue.push(rows + c);
                }
            }
        }
        for &k in &col_entries[j] {
            let r = entries[k].0 as usize;
            if row_alive[r] {
                row_count[r] -= 1;
                if row_count[r] == 1 {
                    queue.push(r);
                }
            }
        }
    }
    let rest = entries.into_iter().filter(|&(i, j, _)| row_alive[i as usize] && col_alive[j as usize]).collect();
    (peeled, rest)
}

/// Blocks with more cells than this are eliminated sparsely over F_p.
const DENSE_CELL_LIMIT: usize = 1 << 16;

fn block_rank(rows: usize, cols: usize, entries: &[(usize, usize, i64)], field: Field) -> usize {
    if entries.len() == 1 || rows == 1 || cols == 1 {
        return 1;
    }
    match field {
        Field::Prime(p) if rows * cols > DENSE_CELL_LIMIT => {
            let triplets: Vec<(u32, u32, i64)> = entries.iter().map(|&(i, j, v)| (i as u32, j as u32, v)).collect();
            sparse_rank_mod_p(rows, cols, &triplets, p)
        }
        Field::Prime(p) => {
            let mut d = vec![vec![0u64; cols]; rows];
            for &(i, j, v) in entries {
                d[i][j] = v.rem_euclid(p as i64) as u64;
            }
            rank_mod_p(d, p)
        }
        Field::Rationals => {
            let mut d = vec![vec![BigInt::zero(); cols]; rows];
            for &(i, j, v) in entries {
                d[i][j] = BigInt::from(v);
            }
            rank_bareiss(d)
        }
    }
}

/// Gaussian elimination over F_p on a dense matrix.
pub fn rank_mod_p(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = mod_inverse(m[rank][c], p);
        let pivot: Vec<(usize, u64)> =
            (c..cols).filter(|&j| m[rank][j] != 0).map(|j| (j, m[rank][j] * inv % p)).collect();
        for i in rank + 1..rows {
            let f = m[i][c];
            if f == 0 {
                continue;
            }
            let row = &mut m[i];
            for &(j, pv) in &pivot {
                row[j] = (row[j] + (p - f) * pv) % p;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    t.rem_euclid(p as i128) as u64
}

/// Fraction-free (Bareiss) elimination over Z, giving the rank over Q.
pub fn rank_bareiss(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&m[rank][c] * &m[i][j] - &m[i][c] * &m[rank][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Rank over Q and over F_p; a disagreement means p divides a minor.
pub fn cross_check_rank(mat: &SparseMatrix, p: Option<u64>) -> (usize, usize) {
    let p = p.unwrap_or(DEFAULT_PRIME);
    (scalar_rank(mat, Field::Rationals), scalar_rank(mat, Field::Prime(p)))
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: Field = Field::Prime(DEFAULT_PRIME);

    #[test]
    fn identity_and_zero() {
        assert_eq!(scalar_rank(&SparseMatrix::identity(3), Field::Rationals), 3);
        assert_eq!(scalar_rank(&SparseMatrix::identity(3), P), 3);
        assert_eq!(scalar_rank(&SparseMatrix::new(4, 5), Field::Rationals), 0);
    }

    #[test]
    fn cancelling_duplicates() {
        let mut m = SparseMatrix::new(2, 2);
        m.push(0, 0, 1);
        m.push(0, 0, -1);
        m.push(1, 1, 2);
        assert_eq!(scalar_rank(&m, Field::Rationals), 1);
    }

    #[test]
    fn rank_drop_mod_p_is_visible() {
        let m = SparseMatrix::from_dense(&[vec![1, 1], vec![1, 1 + 7]]);
        assert_eq!(cross_check_rank(&m, Some(7)), (2, 1));
    }

    #[test]
    fn dependent_rows_in_one_block() {
        let m = SparseMatrix::from_dense(&[
            vec![1, 2, 0, 0],
            vec![2, 4, 0, 0],
            vec![0, 0, 3, 0],
            vec![0, 1, 0, 0],
        ]);
        assert_eq!(scalar_rank(&m, Field::Rationals), 3);
        assert_eq!(scalar_rank(&m, P), 3);
    }

    fn dense_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
            proptest::collection::vec(
                proptest::collection::vec(prop_oneof![4 => Just(0i64), 1 => -3i64..4], c),
                r,
            )
        })
    }

    proptest! {
        #[test]
        fn rational_and_modular_agree_on_small_entries(d in dense_strategy()) {
            let m = SparseMatrix::from_dense(&d);
            let (q, p) = cross_check_rank(&m, None);
            prop_assert_eq!(q, p);
            let unblocked = rank_mod_p(
                d.iter().map(|r| r.iter().map(|&v| v.rem_euclid(DEFAULT_PRIME as i64) as u64).collect()).collect(),
                DEFAULT_PRIME,
            );
            prop_assert_eq!(p, unblocked);
        }

        #[test]
        fn rank_of_transpose(d in dense_strategy()) {
            let m = SparseMatrix::from_dense(&d);
            let t = SparseMatrix {
                rows: m.cols,
                cols: m.rows,
                entries: m.entries.iter().map(|&(i, j, v)| (j, i, v)).collect(),
            };
            prop_assert_eq!(scalar_rank(&m, Field::Rationals), scalar_rank(&t, Field::Rationals));
        }
    }
}
