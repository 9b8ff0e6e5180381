//! Closed-form machinery for the matched-clique family `kks(c, m)`: the
//! six-eigenvalue spectrum with its explicit orthonormal eigenbasis, the
//! per-class score functions for the matrix exponential, their h/g piece
//! decomposition, and the entropic-parameter locator for the `m = c + 1`
//! sub-family.
//!
//! Everything here is an independent evaluation path from the generic
//! spectral module: scores come from six exponential terms, not from a
//! numeric eigensolver, which is what makes the cross-checks meaningful.

use serde::Serialize;

use crate::entropy::{self, EntropicValue};
use crate::graph;
use crate::{Error, Result};

/// Closed-form spectrum of `kks(c, m)`.
///
/// `lambda = [l1..l6]` with multiplicities `(1, m-1, c-1, (m-1)(c-1), 1,
/// c-1)`; `gamma = sqrt(4m + 1)`. The list is descending whenever
/// `c < m < c^2 - c`.
#[derive(Clone, Debug, Serialize)]
pub struct KksClosedForm {
    pub c: usize,
    pub m: usize,
    pub lambda: [f64; 6],
    pub multiplicities: [usize; 6],
    pub gamma: f64,
}

impl KksClosedForm {
    pub fn new(c: usize, m: usize) -> Result<Self> {
        if c < 2 || m < 1 {
            return Err(Error::InvalidParameter(
                "kks closed form requires c >= 2 and m >= 1".into(),
            ));
        }
        let cf = c as f64;
        let mf = m as f64;
        let root_a = ((cf - 1.0) * (cf - 1.0) + 4.0 * mf).sqrt();
        let root_b = (1.0 + 4.0 * mf).sqrt();
        let lambda = [
            0.5 * ((cf - 1.0) + root_a),
            cf - 1.0,
            0.5 * (-1.0 + root_b),
            -1.0,
            0.5 * ((cf - 1.0) - root_a),
            0.5 * (-1.0 - root_b),
        ];
        let multiplicities = [1, m - 1, c - 1, (m - 1) * (c - 1), 1, c - 1];
        Ok(KksClosedForm {
            c,
            m,
            lambda,
            multiplicities,
            gamma: root_b,
        })
    }

    pub fn n(&self) -> usize {
        self.c * (self.m + 1)
    }

    /// `(lambda, multiplicity)` pairs sorted descending, zero
    /// multiplicities dropped (they occur for m = 1).
    pub fn eigenvalue_multiset_sorted(&self) -> Vec<(f64, usize)> {
        let mut pairs: Vec<(f64, usize)> = self
            .lambda
            .iter()
            .copied()
            .zip(self.multiplicities.iter().copied())
            .filter(|&(_, mult)| mult > 0)
            .collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        pairs
    }

    /// Clique-node score `exp(beta A)_{jj}`: six exponential terms.
    pub fn clique_score(&self, beta: f64) -> f64 {
        let [l1, l2, l3, l4, l5, l6] = self.lambda;
        let c = self.c as f64;
        let m = self.m as f64;
        (beta * l1).exp() / (c * (l5 * l5 + m))
            + (beta * l5).exp() / (c * (l1 * l1 + m))
            + (1.0 - 1.0 / c)
                * ((beta * l3).exp() / ((l3 + 1.0) * (l3 + 1.0) + m)
                    + (beta * l6).exp() / ((l6 + 1.0) * (l6 + 1.0) + m))
            + (beta * l2).exp() * (1.0 / c) * (1.0 - 1.0 / m)
            + (beta * l4).exp() * (1.0 - 1.0 / c) * (1.0 - 1.0 / m)
    }

    /// Independent-set-node score `exp(beta A)_{jj}`.
    pub fn independent_score(&self, beta: f64) -> f64 {
        let [l1, _l2, l3, _l4, l5, l6] = self.lambda;
        let c = self.c as f64;
        let m = self.m as f64;
        (beta * l1).exp() * l5 * l5 / (c * (l5 * l5 + m))
            + (beta * l5).exp() * l1 * l1 / (c * (l1 * l1 + m))
            + (1.0 - 1.0 / c)
                * ((beta * l3).exp() * (l3 + 1.0) * (l3 + 1.0)
                    / ((l3 + 1.0) * (l3 + 1.0) + m)
                    + (beta * l6).exp() * (l6 + 1.0) * (l6 + 1.0)
                        / ((l6 + 1.0) * (l6 + 1.0) + m))
    }

    /// Mean diagonal entry (trace over n) from the two class scores.
    pub fn mean_score(&self, beta: f64) -> f64 {
        let m = self.m as f64;
        (self.independent_score(beta) + m * self.clique_score(beta)) / (m + 1.0)
    }

    /// `clique_score - independent_score`, evaluated as
    /// `sum_k w_k expm1(beta lambda_k)` with `sum_k w_k = 0`. Subtracting
    /// the scores directly loses all signal below `beta ~ 1e-8` (both are
    /// 1 + O(beta^2) and the true difference is O(beta^2)); the expm1 form
    /// keeps the sign correct down to the bracket floor.
    pub fn score_difference(&self, beta: f64) -> f64 {
        let [l1, _l2, l3, _l4, l5, l6] = self.lambda;
        let c = self.c as f64;
        let m = self.m as f64;
        let weights = [
            (1.0 - l5 * l5) / (c * (l5 * l5 + m)),
            (1.0 / c) * (1.0 - 1.0 / m),
            (1.0 - 1.0 / c) * (1.0 - (l3 + 1.0) * (l3 + 1.0))
                / ((l3 + 1.0) * (l3 + 1.0) + m),
            (1.0 - 1.0 / c) * (1.0 - 1.0 / m),
            (1.0 - l1 * l1) / (c * (l1 * l1 + m)),
            (1.0 - 1.0 / c) * (1.0 - (l6 + 1.0) * (l6 + 1.0))
                / ((l6 + 1.0) * (l6 + 1.0) + m),
        ];
        self.lambda
            .iter()
            .zip(weights)
            .map(|(&l, w)| w * (beta * l).exp_m1())
            .sum()
    }

    /// The four-piece split of the class scores.
    ///
    /// The shared lambda_3/lambda_6 normalization term is kept inside both
    /// `h2` and `g2`, so the pieces sum exactly: `h1 + h2` is the clique
    /// score and `g1 + g2` the independent-set score, while each piece
    /// comparison (`h1 > g1`, `h2 > g2`) is unchanged by the shared term.
    pub fn pieces(&self, beta: f64) -> Pieces {
        let [l1, l2, l3, l4, l5, l6] = self.lambda;
        let c = self.c as f64;
        let m = self.m as f64;
        let e = std::f64::consts::E;
        let shared = (1.0 - 1.0 / c)
            * ((beta * l3).exp() / ((l3 + 1.0) * (l3 + 1.0) + m)
                + (beta * l6).exp() / ((l6 + 1.0) * (l6 + 1.0) + m));
        let h1 = (1.0 / c)
            * ((beta * l1).exp() / (l5 * l5 + m) + (beta * l5).exp() / (l1 * l1 + m))
            + ((beta * l2).exp() - (beta * l4).exp() - (e - 2.0)) * (1.0 / c) * (1.0 - 1.0 / m);
        let h2 = ((beta * l4).exp() + (e - 2.0) / c) * (1.0 - 1.0 / m) + shared;
        let g1 = (1.0 / c)
            * ((beta * l1).exp() * l5 * l5 / (l5 * l5 + m)
                + (beta * l5).exp() * l1 * l1 / (l1 * l1 + m));
        let g2 = (1.0 - 1.0 / c)
            * ((beta * l3).exp() * (l3 + 1.0) * (l3 + 1.0) / ((l3 + 1.0) * (l3 + 1.0) + m)
                + (beta * l6).exp() * (l6 + 1.0) * (l6 + 1.0)
                    / ((l6 + 1.0) * (l6 + 1.0) + m));
        Pieces { h1, h2, g1, g2 }
    }
}

/// The h/g decomposition of the two class scores.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Pieces {
    pub h1: f64,
    pub h2: f64,
    pub g1: f64,
    pub g2: f64,
}

/// `(independent-set score, clique score)` of `kks(c, m)` at `beta`.
pub fn kks_scores(beta: f64, c: usize, m: usize) -> Result<(f64, f64)> {
    let cf = KksClosedForm::new(c, m)?;
    Ok((cf.independent_score(beta), cf.clique_score(beta)))
}

/// Orthonormal nullspace basis of the all-ones vector: the `c x (c-1)`
/// matrix `N_c` whose columns are the lower rows of the Householder
/// reflector sending `e` to `sqrt(c) e_0`. Returned row-major.
pub fn householder_nullspace_basis(c: usize) -> Vec<f64> {
    assert!(c >= 2, "basis needs c >= 2");
    let cf = c as f64;
    let scale = 1.0 / (cf - cf.sqrt());
    let mut n = vec![0.0f64; c * (c - 1)];
    for j in 1..c {
        // column j-1 holds n_j = e_j + scale * (sqrt(c) e_0 - e)
        for i in 0..c {
            let u = if i == 0 { cf.sqrt() - 1.0 } else { -1.0 };
            n[i * (c - 1) + (j - 1)] = scale * u + if i == j { 1.0 } else { 0.0 };
        }
    }
    n
}

/// Explicit orthonormal eigenbasis of `kks(c, m)` assembled from the
/// closed-form blocks, with residuals measured against the constructed
/// adjacency matrix.
#[derive(Clone, Debug)]
pub struct KksEigenbasis {
    pub n: usize,
    /// eigenvalue attached to each column
    pub eigenvalues: Vec<f64>,
    /// row-major n x n; column k is the unit eigenvector for
    /// `eigenvalues[k]`
    pub vectors: Vec<f64>,
    pub eigen_residual: f64,
    pub orthonormality_residual: f64,
}

/// Assembles the four eigenvector blocks and verifies `AV = V Lambda` and
/// `V'V = I` to `1e-10` against the explicitly constructed graph.
pub fn kks_eigenbasis(c: usize, m: usize) -> Result<KksEigenbasis> {
    let cf_struct = KksClosedForm::new(c, m)?;
    let [l1, l2, l3, l4, l5, l6] = cf_struct.lambda;
    let n = c * (m + 1);
    let cf = c as f64;
    let mf = m as f64;
    let n_c = householder_nullspace_basis(c);
    let n_m = if m >= 2 {
        householder_nullspace_basis(m)
    } else {
        Vec::new()
    };
    let n_c_at = |i: usize, j: usize| n_c[i * (c - 1) + j];
    let n_m_at = |i: usize, j: usize| n_m[i * (m - 1) + j];

    let mut vectors = vec![0.0f64; n * n];
    let mut eigenvalues = Vec::with_capacity(n);
    let mut col = 0usize;
    let mut push_column = |eigenvalue: f64, entries: &dyn Fn(usize) -> f64| {
        for row in 0..n {
            vectors[row * n + col] = entries(row);
        }
        eigenvalues.push(eigenvalue);
        col += 1;
    };

    // top/bottom pair lambda_1, lambda_5: constant blocks
    for lambda in [l1, l5] {
        let shift = lambda - (cf - 1.0); // lambda - lambda_2, never zero
        let norm = (shift * shift / (cf * (shift * shift + mf))).sqrt();
        push_column(lambda, &|row| {
            if row < c {
                norm
            } else {
                norm / shift
            }
        });
    }
    // lambda_3, lambda_6: Householder columns replicated across blocks
    for lambda in [l3, l6] {
        let norm = ((lambda + 1.0) * (lambda + 1.0)
            / ((lambda + 1.0) * (lambda + 1.0) + mf))
            .sqrt();
        for j in 0..(c - 1) {
            push_column(lambda, &|row| {
                if row < c {
                    norm * n_c_at(row, j)
                } else {
                    let i = (row - c) % c;
                    norm * n_c_at(i, j) / (lambda + 1.0)
                }
            });
        }
    }
    // lambda_2: zero top, N_m (x) e_c bottom
    let inv_sqrt_c = (1.0 / cf).sqrt();
    for j in 0..m.saturating_sub(1) {
        push_column(l2, &|row| {
            if row < c {
                0.0
            } else {
                let b = (row - c) / c;
                inv_sqrt_c * n_m_at(b, j)
            }
        });
    }
    // lambda_4: zero top, N_m (x) N_c bottom
    for jm in 0..m.saturating_sub(1) {
        for jc in 0..(c - 1) {
            push_column(l4, &|row| {
                if row < c {
                    0.0
                } else {
                    let b = (row - c) / c;
                    let i = (row - c) % c;
                    n_m_at(b, jm) * n_c_at(i, jc)
                }
            });
        }
    }
    assert_eq!(col, n, "eigenvector count must be c(m+1)");

    let g = graph::kks_graph(c, m)?;
    let a = g.adjacency_f64();
    let mut eigen_residual = 0.0f64;
    for k in 0..n {
        for i in 0..n {
            let mut av = 0.0;
            for j in 0..n {
                av += a[i * n + j] * vectors[j * n + k];
            }
            eigen_residual = eigen_residual.max((av - eigenvalues[k] * vectors[i * n + k]).abs());
        }
    }
    let mut orthonormality_residual = 0.0f64;
    for p in 0..n {
        for q in p..n {
            let mut s = 0.0;
            for i in 0..n {
                s += vectors[i * n + p] * vectors[i * n + q];
            }
            let target = if p == q { 1.0 } else { 0.0 };
            orthonormality_residual = orthonormality_residual.max((s - target).abs());
        }
    }
    if eigen_residual > 1e-10 {
        return Err(Error::ResidualCheck {
            what: "kks eigenbasis AV - V Lambda",
            residual: eigen_residual,
            tolerance: 1e-10,
        });
    }
    if orthonormality_residual > 1e-10 {
        return Err(Error::ResidualCheck {
            what: "kks eigenbasis V'V - I",
            residual: orthonormality_residual,
            tolerance: 1e-10,
        });
    }
    Ok(KksEigenbasis {
        n,
        eigenvalues,
        vectors,
        eigen_residual,
        orthonormality_residual,
    })
}

/// Smallest `c >= 3` (up to `max_c`) at which the clique score exceeds the
/// independent-set score at the bracket endpoint `beta = 1/(c-2)` for
/// `m = c + 1`. This is the empirical threshold from which
/// [`find_entropic_beta_kks`] has a valid bracket.
pub fn discover_c_min(max_c: usize) -> Result<usize> {
    for c in 3..=max_c {
        let cf = KksClosedForm::new(c, c + 1)?;
        let beta = 1.0 / (c as f64 - 2.0);
        if cf.score_difference(beta) > 0.0 {
            return Ok(c);
        }
    }
    Err(Error::Precondition(format!(
        "no c <= {max_c} has a positive clique-minus-independent margin at 1/(c-2)"
    )))
}

/// Locates the entropic value of `kks(c, c+1)` inside `(0, 1/(c-2))` by
/// bisection on the closed-form score difference; the score difference at
/// the returned beta is below `1e-14`.
pub fn find_entropic_beta_kks(c: usize) -> Result<EntropicValue> {
    if c < 3 {
        return Err(Error::InvalidParameter(
            "the bracket (0, 1/(c-2)] needs c >= 3".into(),
        ));
    }
    let cf = KksClosedForm::new(c, c + 1)?;
    let delta = |beta: f64| cf.score_difference(beta);
    let lo = 1e-9;
    let hi = 1.0 / (c as f64 - 2.0);
    let (f_lo, f_hi) = (delta(lo), delta(hi));
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { f_lo, f_hi });
    }
    let root = entropy::bisect(delta, lo, hi, |_, d| d.abs() < 1e-14)
        .expect("sign change checked above");
    let gap = delta(root).abs() / cf.mean_score(root);
    Ok(EntropicValue {
        beta: root,
        bracket: (lo, hi),
        gap,
        function: "exp".to_string(),
    })
}

/// Both sides and margins of the two hyperbolic inequalities behind the
/// `h2 > g2` comparison at `beta = 1/(c-2)`, `m = c + 1`,
/// `xi = beta * gamma / 2`:
///
/// - cosh piece: `(1 - beta/2) + (2/gamma)(1 + beta/2)(e-2)/c  >
///   cosh(xi)(1 - 1/m)`
/// - sinh piece: `(1 - 2/gamma)(1 + beta/2)(e-2)/c  >
///   (1/gamma) sinh(xi)(1 + 1/m)`
///
/// Margins are reported, not asserted: they are positive only for large c.
#[derive(Clone, Debug, Serialize)]
pub struct HyperbolicReport {
    pub c: usize,
    pub m: usize,
    pub beta: f64,
    pub gamma: f64,
    pub xi: f64,
    pub cosh_lhs: f64,
    pub cosh_rhs: f64,
    pub cosh_margin: f64,
    pub sinh_lhs: f64,
    pub sinh_rhs: f64,
    pub sinh_margin: f64,
}

pub fn hyperbolic_check(beta: f64, c: usize, m: usize) -> Result<HyperbolicReport> {
    if c < 3 {
        return Err(Error::InvalidParameter("hyperbolic check needs c >= 3".into()));
    }
    if m != c + 1 {
        return Err(Error::Precondition("hyperbolic check assumes m = c + 1".into()));
    }
    let expected = 1.0 / (c as f64 - 2.0);
    if (beta - expected).abs() > 1e-12 * expected {
        return Err(Error::Precondition(format!(
            "hyperbolic check assumes beta = 1/(c-2) = {expected}"
        )));
    }
    let cf = c as f64;
    let mf = m as f64;
    let e = std::f64::consts::E;
    let gamma = (4.0 * mf + 1.0).sqrt();
    let xi = 0.5 * beta * gamma;
    let cosh_lhs = (1.0 - beta / 2.0) + (2.0 / gamma) * (1.0 + beta / 2.0) * ((e - 2.0) / cf);
    let cosh_rhs = xi.cosh() * (1.0 - 1.0 / mf);
    let sinh_lhs = (1.0 - 2.0 / gamma) * (1.0 + beta / 2.0) * ((e - 2.0) / cf);
    let sinh_rhs = (1.0 / gamma) * xi.sinh() * (1.0 + 1.0 / mf);
    Ok(HyperbolicReport {
        c,
        m,
        beta,
        gamma,
        xi,
        cosh_lhs,
        cosh_rhs,
        cosh_margin: cosh_lhs - cosh_rhs,
        sinh_lhs,
        sinh_rhs,
        sinh_margin: sinh_lhs - sinh_rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{self, PpscFunction};

    #[test]
    fn householder_basis_properties() {
        for c in [2usize, 3, 4, 7] {
            let n = householder_nullspace_basis(c);
            let at = |i: usize, j: usize| n[i * (c - 1) + j];
            // N'N = I
            for a in 0..(c - 1) {
                for b in 0..(c - 1) {
                    let dot: f64 = (0..c).map(|i| at(i, a) * at(i, b)).sum();
                    let target = if a == b { 1.0 } else { 0.0 };
                    assert!((dot - target).abs() < 1e-12, "c={c} ({a},{b})");
                }
            }
            // N N' = I - (1/c) e e'
            for i in 0..c {
                for j in 0..c {
                    let dot: f64 = (0..c - 1).map(|k| at(i, k) * at(j, k)).sum();
                    let target = if i == j { 1.0 - 1.0 / c as f64 } else { -1.0 / c as f64 };
                    assert!((dot - target).abs() < 1e-12, "c={c} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn scores_match_spectral_path() {
        let g = graph::kks_graph(4, 5).unwrap();
        for beta in [0.1, 0.5, 1.0] {
            let d = spectral::f_diag(&g, &PpscFunction::Exp, beta).unwrap();
            let (is_score, cn_score) = kks_scores(beta, 4, 5).unwrap();
            assert!((d[0] - is_score).abs() < 1e-10 * is_score);
            assert!((d[4] - cn_score).abs() < 1e-10 * cn_score);
        }
    }

    #[test]
    fn scores_approach_one_at_zero() {
        let (is_score, cn_score) = kks_scores(1e-9, 4, 5).unwrap();
        assert!((is_score - 1.0).abs() < 1e-7);
        assert!((cn_score - 1.0).abs() < 1e-7);
    }

    #[test]
    fn small_beta_favors_high_degree_class() {
        // independent-set nodes have degree m > c
        let (is_score, cn_score) = kks_scores(0.01, 4, 5).unwrap();
        assert!(is_score > cn_score);
    }

    #[test]
    fn pieces_sum_exactly() {
        for c in 3usize..=60 {
            let m = c + 1;
            let cf = KksClosedForm::new(c, m).unwrap();
            let endpoint = 1.0 / (c as f64 - 2.0);
            for beta in [0.13 * endpoint, 0.5 * endpoint, endpoint] {
                let p = cf.pieces(beta);
                let cn = cf.clique_score(beta);
                let is = cf.independent_score(beta);
                assert!(((p.h1 + p.h2) - cn).abs() < 1e-12 * cn, "c={c} beta={beta}");
                assert!(((p.g1 + p.g2) - is).abs() < 1e-12 * is, "c={c} beta={beta}");
            }
        }
    }

    #[test]
    fn pieces_inequalities_at_c50() {
        let cf = KksClosedForm::new(50, 51).unwrap();
        let p = cf.pieces(1.0 / 48.0);
        assert!(p.h1 > p.g1);
        assert!(p.h2 > p.g2);
    }

    #[test]
    fn piece_inequality_thresholds() {
        // h1 > g1 already holds at the first c with a positive overall
        // margin; h2 > g2 is an asymptotic statement that first holds at
        // c = 22 and stays true afterwards
        let first_h2 = (3..200)
            .find(|&c| {
                let cf = KksClosedForm::new(c, c + 1).unwrap();
                let p = cf.pieces(1.0 / (c as f64 - 2.0));
                p.h2 > p.g2
            })
            .unwrap();
        assert_eq!(first_h2, 22);
        for c in (22..200).step_by(13) {
            let cf = KksClosedForm::new(c, c + 1).unwrap();
            let p = cf.pieces(1.0 / (c as f64 - 2.0));
            assert!(p.h1 > p.g1 && p.h2 > p.g2, "c={c}");
        }
    }

    #[test]
    fn gamma_substitution_identities() {
        for (c, m) in [(10usize, 11usize), (4, 5), (30, 31)] {
            let cf = KksClosedForm::new(c, m).unwrap();
            let [_, _, l3, _, _, l6] = cf.lambda;
            let g = cf.gamma;
            let mf = m as f64;
            let lhs3 = (l3 + 1.0) * (l3 + 1.0) / ((l3 + 1.0) * (l3 + 1.0) + mf);
            assert!((lhs3 - 0.5 * (1.0 + 1.0 / g)).abs() < 1e-12);
            let lhs6 = (l6 + 1.0) * (l6 + 1.0) / ((l6 + 1.0) * (l6 + 1.0) + mf);
            assert!((lhs6 - 0.5 * (1.0 - 1.0 / g)).abs() < 1e-12);
            let inv3 = 1.0 / ((l3 + 1.0) * (l3 + 1.0) + mf);
            assert!((inv3 - 0.5 / mf * (1.0 - 1.0 / g)).abs() < 1e-12);
            let inv6 = 1.0 / ((l6 + 1.0) * (l6 + 1.0) + mf);
            assert!((inv6 - 0.5 / mf * (1.0 + 1.0 / g)).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda5_squared_below_two_for_m_c_plus_1() {
        for c in 3..=60 {
            let cf = KksClosedForm::new(c, c + 1).unwrap();
            assert!(cf.lambda[4] * cf.lambda[4] < 2.0, "c={c}");
        }
    }

    #[test]
    fn no_overflow_at_bracket_endpoint() {
        // exp(beta lambda_1) at beta = 1/(c-2) stays near e
        for c in [3usize, 10, 100, 1000] {
            let cf = KksClosedForm::new(c, c + 1).unwrap();
            let v = (cf.lambda[0] / (c as f64 - 2.0)).exp();
            assert!(v.is_finite() && v < 60.0, "c={c} gives {v}");
        }
    }

    #[test]
    fn c_min_is_four() {
        assert_eq!(discover_c_min(64).unwrap(), 4);
    }

    #[test]
    fn frozen_beta_sequence() {
        // frozen from the closed-form bisection; cross-validated against
        // the constructed graphs in the acceptance suite
        let expected = [
            (4, 0.499_001_412_933_305_9),
            (5, 0.229_280_701_846_316_57),
            (6, 0.136_747_834_476_367_31),
            (7, 0.091_630_911_250_671_46),
            (8, 0.065_903_640_002_721_65),
            (9, 0.049_758_261_616_765_48),
        ];
        let mut last = f64::INFINITY;
        for (c, want) in expected {
            let found = find_entropic_beta_kks(c).unwrap();
            assert!(
                (found.beta - want).abs() < 1e-12,
                "c={c}: got {}, want {want}",
                found.beta
            );
            assert!(found.beta > 0.0 && found.beta < 1.0 / (c as f64 - 2.0));
            assert!(found.beta < last);
            last = found.beta;
        }
    }

    #[test]
    fn below_threshold_reports_signs() {
        match find_entropic_beta_kks(3) {
            Err(Error::NoSignChange { f_lo, f_hi }) => {
                assert!(f_lo < 0.0 && f_hi < 0.0);
            }
            other => panic!("expected NoSignChange, got {other:?}"),
        }
    }

    #[test]
    fn eigenbasis_residuals() {
        for (c, m) in [(4usize, 5usize), (2, 3), (3, 4), (4, 10)] {
            let basis = kks_eigenbasis(c, m).unwrap();
            assert!(basis.eigen_residual < 1e-10, "(c,m)=({c},{m})");
            assert!(basis.orthonormality_residual < 1e-10, "(c,m)=({c},{m})");
            assert_eq!(basis.n, c * (m + 1));
        }
    }

    #[test]
    fn eigenbasis_multiplicities_2_3() {
        let basis = kks_eigenbasis(2, 3).unwrap();
        let cf = KksClosedForm::new(2, 3).unwrap();
        assert_eq!(cf.multiplicities, [1, 2, 1, 2, 1, 1]);
        for (lambda, mult) in cf.lambda.iter().zip(cf.multiplicities) {
            let count = basis
                .eigenvalues
                .iter()
                .filter(|&&e| (e - lambda).abs() < 1e-12)
                .count();
            assert_eq!(count, mult);
        }
    }

    #[test]
    fn eigenvectors_for_l2_l4_have_zero_top() {
        let basis = kks_eigenbasis(3, 4).unwrap();
        let cf = KksClosedForm::new(3, 4).unwrap();
        let n = basis.n;
        for k in 0..n {
            let l = basis.eigenvalues[k];
            if (l - cf.lambda[1]).abs() < 1e-12 || (l - cf.lambda[3]).abs() < 1e-12 {
                for row in 0..3 {
                    assert_eq!(basis.vectors[row * n + k], 0.0);
                }
            }
        }
    }

    #[test]
    fn hyperbolic_margins() {
        let r = hyperbolic_check(1.0 / 98.0, 100, 101).unwrap();
        assert!(r.cosh_margin > 0.0);
        assert!(r.sinh_margin > 0.0);
        assert!((r.xi - 101.25f64.sqrt() / 98.0).abs() < 1e-15);

        // small c: margins merely reported
        let r = hyperbolic_check(1.0 / 3.0, 5, 6).unwrap();
        assert!(r.cosh_margin < 0.0 && r.sinh_margin < 0.0);

        assert!(hyperbolic_check(0.3, 5, 6).is_err());
        assert!(hyperbolic_check(1.0 / 3.0, 5, 7).is_err());
    }

    #[test]
    fn closed_form_matches_jacobi_per_instance() {
        let cf = KksClosedForm::new(4, 10).unwrap();
        let g = graph::kks_graph(4, 10).unwrap();
        let s = spectral::eigendecompose(&g).unwrap();
        let clusters = s.cluster_eigenvalues();
        let expected = cf.eigenvalue_multiset_sorted();
        assert_eq!(clusters.len(), expected.len());
        for ((got_l, got_m), (want_l, want_m)) in clusters.iter().zip(&expected) {
            assert!((got_l - want_l).abs() < 1e-9);
            assert_eq!(got_m, want_m);
        }
    }
}
