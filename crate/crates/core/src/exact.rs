//! Exact integer and rational linear algebra: big-integer powers of the
//! adjacency matrix, rational Gaussian elimination, and the minimal
//! polynomial of the adjacency matrix.
//!
//! Walk counts grow like `lambda_1 ^ l`, so everything that feeds a
//! partition or a certificate is computed in `BigInt`/`BigRational` and only
//! converted to floating point at the boundary.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::graph::Graph;
use crate::par;
use crate::{Error, Result};

/// Dense square big-integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub n: usize,
    pub data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![BigInt::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = BigInt::one();
        }
        IntMatrix { n, data }
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.n).map(|i| self.data[i * self.n + i].clone()).collect()
    }
}

/// Left-multiplies `m` by the adjacency of `g` using neighbor lists, i.e.
/// returns `A * m`. Row-parallel.
pub fn adjacency_mul(g: &Graph, m: &IntMatrix) -> IntMatrix {
    let n = g.n();
    assert_eq!(n, m.n);
    let nbrs = g.neighbor_lists();
    let rows = par::map_indexed(n, |i| {
        let mut row = vec![BigInt::zero(); n];
        for &k in &nbrs[i] {
            let src = &m.data[k * n..(k + 1) * n];
            for (dst, s) in row.iter_mut().zip(src) {
                *dst += s;
            }
        }
        row
    });
    IntMatrix {
        n,
        data: rows.into_iter().flatten().collect(),
    }
}

/// Streams `(l, diag(A^l))` for `l = 0, 1, 2, ...` until the callback
/// returns `false` or `max_ell` is reached (inclusive).
pub fn stream_diag_powers<F>(g: &Graph, max_ell: usize, mut visit: F)
where
    F: FnMut(usize, &[BigInt]) -> bool,
{
    let mut power = IntMatrix::identity(g.n());
    for ell in 0..=max_ell {
        if ell > 0 {
            power = adjacency_mul(g, &power);
        }
        let diag = power.diagonal();
        if !visit(ell, &diag) {
            return;
        }
    }
}

/// Exact `diag(A^l)` for every `l = 0..=max_ell`.
pub fn diag_powers(g: &Graph, max_ell: usize) -> Vec<Vec<BigInt>> {
    let mut out = Vec::with_capacity(max_ell + 1);
    stream_diag_powers(g, max_ell, |_, diag| {
        out.push(diag.to_vec());
        true
    });
    out
}

/// Exact `diag(A^l)[node]` for `l = 0..=max_ell` for a single node, via the
/// split `e_i' A^(a+b) e_i = (A^a e_i) . (A^b e_i)`; much cheaper than full
/// matrix powers when only a few rows are needed.
pub fn diag_powers_of_node(g: &Graph, node: usize, max_ell: usize) -> Vec<BigInt> {
    let n = g.n();
    let half = max_ell / 2 + 1;
    let mut krylov: Vec<Vec<BigInt>> = Vec::with_capacity(half + 1);
    let mut v = vec![BigInt::zero(); n];
    v[node] = BigInt::one();
    krylov.push(v);
    for _ in 0..half {
        let prev = krylov.last().unwrap();
        let mut next = vec![BigInt::zero(); n];
        for (i, entry) in next.iter_mut().enumerate() {
            for k in g.neighbors(i) {
                *entry += &prev[k];
            }
        }
        krylov.push(next);
    }
    (0..=max_ell)
        .map(|l| {
            let a = l / 2;
            let b = l - a;
            dot(&krylov[a], &krylov[b])
        })
        .collect()
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn big_to_f64(b: &BigInt) -> f64 {
    b.to_f64().unwrap_or(f64::INFINITY)
}

pub fn ratio_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::INFINITY)
}

/// Outcome of exact Gaussian elimination on `M x = b`.
#[derive(Clone, Debug)]
pub enum LinearSolve {
    Inconsistent,
    Solution {
        particular: Vec<BigRational>,
        nullspace: Vec<Vec<BigRational>>,
    },
}

/// Solves `M x = b` exactly over the rationals (Gauss-Jordan with exact
/// pivots). Returns a particular solution plus a nullspace basis, or
/// `Inconsistent`.
pub fn gauss_solve(m: &[Vec<BigRational>], b: &[BigRational]) -> LinearSolve {
    let rows = m.len();
    assert_eq!(rows, b.len());
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut aug: Vec<Vec<BigRational>> = m
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), cols);
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivot_col_of_row = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !aug[i][c].is_zero()) else {
            continue;
        };
        aug.swap(r, p);
        let inv = aug[r][c].clone();
        for e in aug[r].iter_mut() {
            *e = &*e / &inv;
        }
        for i in 0..rows {
            if i != r && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in 0..=cols {
                    let delta = &f * &aug[r][j];
                    aug[i][j] = &aug[i][j] - delta;
                }
            }
        }
        pivot_col_of_row.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    for row in aug.iter().skip(r) {
        if !row[cols].is_zero() {
            return LinearSolve::Inconsistent;
        }
    }
    let mut particular = vec![BigRational::zero(); cols];
    for (row, &c) in pivot_col_of_row.iter().enumerate() {
        particular[c] = aug[row][cols].clone();
    }
    let pivot_set: std::collections::HashSet<usize> = pivot_col_of_row.iter().copied().collect();
    let mut nullspace = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (row, &c) in pivot_col_of_row.iter().enumerate() {
            v[c] = -aug[row][free].clone();
        }
        nullspace.push(v);
    }
    LinearSolve::Solution {
        particular,
        nullspace,
    }
}

/// Convenience: exact consistency of `M x = e` for big-integer rows.
pub fn system_is_consistent(rows: &[Vec<BigInt>]) -> bool {
    let m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|v| BigRational::from(v.clone())).collect())
        .collect();
    let b = vec![BigRational::one(); rows.len()];
    !matches!(gauss_solve(&m, &b), LinearSolve::Inconsistent)
}

/// Monic minimal polynomial of the adjacency matrix: returns
/// `q = [q_0, ..., q_{m-1}]` such that `A^m = q_0 I + q_1 A + ... +
/// q_{m-1} A^{m-1}` exactly.
///
/// Degree and coefficients come from vector Krylov sequences (deterministic
/// seeds) and the candidate is then certified against the full matrix
/// identity with exact arithmetic, so the result is not probabilistic.
pub fn minimal_polynomial(g: &Graph) -> Result<Vec<BigRational>> {
    let n = g.n();
    if n == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    let mut seeds: Vec<Vec<BigInt>> = Vec::new();
    for attempt in 0..6u64 {
        seeds.push(pseudo_random_vector(n, 0x9e3779b9 + attempt));
        if let Some(q) = krylov_min_poly(g, &seeds) {
            if certify_annihilates(g, &q) {
                return Ok(q);
            }
        }
    }
    Err(Error::Precondition(
        "minimal polynomial search failed to certify".into(),
    ))
}

fn pseudo_random_vector(n: usize, seed: u64) -> Vec<BigInt> {
    // xorshift; small positive entries keep the Krylov elimination cheap
    let mut s = seed | 1;
    (0..n)
        .map(|_| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            BigInt::from((s % 31) + 1)
        })
        .collect()
}

/// First linear dependence among stacked Krylov vectors of all seeds.
fn krylov_min_poly(g: &Graph, seeds: &[Vec<BigInt>]) -> Option<Vec<BigRational>> {
    let n = g.n();
    let stacked = seeds.len() * n;
    // columns of the growing system: stacked A^k v_s vectors
    let mut basis: Vec<Vec<BigRational>> = Vec::new(); // echelon rows over stacked dim + coeff space
    let mut current: Vec<Vec<BigInt>> = seeds.to_vec();
    for k in 0..=n {
        let mut vec_k: Vec<BigRational> = Vec::with_capacity(stacked + n + 1);
        for v in &current {
            vec_k.extend(v.iter().map(|x| BigRational::from(x.clone())));
        }
        // coefficient bookkeeping: unit vector in position k
        let mut coeff = vec![BigRational::zero(); n + 1];
        coeff[k] = BigRational::one();
        vec_k.extend(coeff);

        // reduce against the basis
        for row in &basis {
            let lead = leading_index(row, stacked);
            if let Some(li) = lead {
                if !vec_k[li].is_zero() {
                    let f = &vec_k[li] / &row[li];
                    for j in 0..vec_k.len() {
                        let delta = &f * &row[j];
                        vec_k[j] = &vec_k[j] - delta;
                    }
                }
            }
        }
        if vec_k[..stacked].iter().all(|x| x.is_zero()) {
            // dependence found: A^k v = sum_{j<k} c_j A^j v
            let scale = vec_k[stacked + k].clone();
            if scale.is_zero() {
                return None;
            }
            let coeffs: Vec<BigRational> = (0..k)
                .map(|j| -(&vec_k[stacked + j] / &scale))
                .collect();
            return Some(coeffs);
        }
        basis.push(vec_k);
        current = current
            .iter()
            .map(|v| {
                let mut next = vec![BigInt::zero(); n];
                for (i, entry) in next.iter_mut().enumerate() {
                    for nb in g.neighbors(i) {
                        *entry += &v[nb];
                    }
                }
                next
            })
            .collect();
    }
    None
}

fn leading_index(row: &[BigRational], limit: usize) -> Option<usize> {
    row[..limit].iter().position(|x| !x.is_zero())
}

/// Exact check that `A^m - sum q_j A^j = 0`.
fn certify_annihilates(g: &Graph, q: &[BigRational]) -> bool {
    let n = g.n();
    let m = q.len();
    let mut power = IntMatrix::identity(n);
    // accumulate sum q_j A^j as rationals on the fly
    let mut acc = vec![BigRational::zero(); n * n];
    for coeff in q.iter().take(m) {
        if !coeff.is_zero() {
            for (a, p) in acc.iter_mut().zip(&power.data) {
                *a += coeff * BigRational::from(p.clone());
            }
        }
        power = adjacency_mul(g, &power);
    }
    // power now holds A^m
    power
        .data
        .iter()
        .zip(&acc)
        .all(|(p, a)| &BigRational::from(p.clone()) == a)
}

/// Reduction coefficients `p_{k, j}` with `A^k = sum_j p_{k,j} A^j` for
/// `k = m ..= k_max`, from the minimal-polynomial linear recurrence.
pub fn reduction_coefficients(
    min_poly: &[BigRational],
    k_max: usize,
) -> Vec<Vec<BigRational>> {
    let m = min_poly.len();
    assert!(k_max >= m);
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(k_max - m + 1);
    rows.push(min_poly.to_vec());
    for _ in (m + 1)..=k_max {
        let prev = rows.last().unwrap();
        let top = prev[m - 1].clone();
        let mut next = vec![BigRational::zero(); m];
        next[0] = &top * &min_poly[0];
        for j in 1..m {
            next[j] = &prev[j - 1] + &top * &min_poly[j];
        }
        rows.push(next);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph;

    fn brute_force_closed_walks(g: &Graph, start: usize, len: usize) -> u64 {
        fn rec(g: &Graph, start: usize, here: usize, left: usize) -> u64 {
            if left == 0 {
                return u64::from(here == start);
            }
            g.neighbors(here).map(|nb| rec(g, start, nb, left - 1)).sum()
        }
        rec(g, start, start, len)
    }

    #[test]
    fn diag_powers_match_brute_force() {
        for g in [
            graph::path_graph(3).unwrap(),
            graph::cycle_graph(5).unwrap(),
            graph::kks_graph(2, 3).unwrap(),
            graph::spider(3, 2).unwrap(),
        ] {
            let diags = diag_powers(&g, 6);
            for (l, diag) in diags.iter().enumerate() {
                for i in 0..g.n() {
                    assert_eq!(
                        diag[i],
                        BigInt::from(brute_force_closed_walks(&g, i, l)),
                        "graph {} node {i} length {l}",
                        g.provenance()
                    );
                }
            }
        }
    }

    #[test]
    fn per_node_diag_matches_full() {
        let g = graph::kks_graph(3, 4).unwrap();
        let full = diag_powers(&g, 9);
        for node in [0, 5, 10] {
            let per = diag_powers_of_node(&g, node, 9);
            for l in 0..=9 {
                assert_eq!(per[l], full[l][node]);
            }
        }
    }

    #[test]
    fn gauss_solve_classifies() {
        let q = |v: i64| BigRational::from(BigInt::from(v));
        // [1; 2] x = [1; 1] inconsistent
        let m = vec![vec![q(1)], vec![q(2)]];
        assert!(matches!(
            gauss_solve(&m, &[q(1), q(1)]),
            LinearSolve::Inconsistent
        ));
        // consistent with nullspace
        let m = vec![vec![q(1), q(1)], vec![q(2), q(2)]];
        match gauss_solve(&m, &[q(1), q(2)]) {
            LinearSolve::Solution {
                particular,
                nullspace,
            } => {
                assert_eq!(particular, vec![q(1), q(0)]);
                assert_eq!(nullspace.len(), 1);
            }
            LinearSolve::Inconsistent => panic!("expected a solution"),
        }
    }

    #[test]
    fn minimal_polynomial_small_graphs() {
        // K_3: A^2 = 2I + A  (eigenvalues 2, -1)
        let q = minimal_polynomial(&graph::complete_graph(3).unwrap()).unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q[0], BigRational::from(BigInt::from(2)));
        assert_eq!(q[1], BigRational::one());
        // P_3: A^3 = 2A  (eigenvalues 0, +-sqrt(2))
        let q = minimal_polynomial(&graph::path_graph(3).unwrap()).unwrap();
        assert_eq!(q.len(), 3);
        assert_eq!(q[0], BigRational::zero());
        assert_eq!(q[1], BigRational::from(BigInt::from(2)));
        assert_eq!(q[2], BigRational::zero());
    }

    #[test]
    fn reduction_coefficients_reproduce_powers() {
        let g = graph::kks_graph(2, 3).unwrap();
        let q = minimal_polynomial(&g).unwrap();
        let m = q.len();
        let k_max = m + 6;
        let p = reduction_coefficients(&q, k_max);
        let diags = diag_powers(&g, k_max);
        for (row, k) in p.iter().zip(m..=k_max) {
            for i in 0..g.n() {
                let super_pos: BigRational = row
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * BigRational::from(diags[j][i].clone()))
                    .sum();
                assert_eq!(super_pos, BigRational::from(diags[k][i].clone()));
            }
        }
    }
}
