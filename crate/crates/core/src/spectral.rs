//! Dense symmetric eigendecomposition and matrix-function diagonals.
//!
//! The solver is cyclic-by-row Jacobi: provably convergent for symmetric
//! input and accurate enough at desk scale (n <= ~500) that the residual
//! targets `|V'V - I| < 1e-10` and `|AV - V L| < 1e-8 * max(1, |A|)` hold
//! with a wide margin. Matrix functions are evaluated spectrally,
//! `f(beta A) = sum_k f(beta lambda_k) v_k v_k'`, which is all the analysis
//! here needs.

use serde::Serialize;

use crate::graph::Graph;
use crate::par;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 64;
const OFF_DIAG_TOL: f64 = 1e-15;

/// Eigendecomposition of a symmetric matrix: eigenvalues descending, with
/// column `k` of `vectors` the unit eigenvector for `eigenvalues[k]`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    n: usize,
    eigenvalues: Vec<f64>,
    vectors: Vec<f64>, // row-major n*n
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Largest eigenvalue (the spectral radius for adjacency matrices).
    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(0.0f64, |acc, &l| acc.max(l.abs()))
    }

    /// Component `V[i, k]` of eigenvector `k`.
    #[inline]
    pub fn component(&self, i: usize, k: usize) -> f64 {
        self.vectors[i * self.n + k]
    }

    /// `max |(V'V - I)_{ij}|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in a..n {
                let mut s = 0.0;
                for i in 0..n {
                    s += self.component(i, a) * self.component(i, b);
                }
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// `max |(AV - V L)_{ik}|` against a row-major symmetric matrix.
    pub fn eigen_residual(&self, a: &[f64]) -> f64 {
        let n = self.n;
        assert_eq!(a.len(), n * n);
        let mut worst = 0.0f64;
        for i in 0..n {
            for k in 0..n {
                let mut av = 0.0;
                for j in 0..n {
                    av += a[i * n + j] * self.component(j, k);
                }
                let vl = self.component(i, k) * self.eigenvalues[k];
                worst = worst.max((av - vl).abs());
            }
        }
        worst
    }

    /// Number of distinct eigenvalues under the clustering tolerance
    /// `1e-8 * max(1, |lambda|_max)`.
    pub fn distinct_eigenvalue_count(&self) -> usize {
        self.cluster_eigenvalues().len()
    }

    /// Groups the (descending) eigenvalues into clusters of coinciding
    /// values; returns `(representative value, multiplicity)` pairs.
    pub fn cluster_eigenvalues(&self) -> Vec<(f64, usize)> {
        let tol = 1e-8 * self.max_abs_eigenvalue().max(1.0);
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &l in &self.eigenvalues {
            match out.last_mut() {
                Some((rep, count)) if (*rep - l).abs() <= tol => *count += 1,
                _ => out.push((l, 1)),
            }
        }
        out
    }
}

/// Jacobi eigendecomposition of the adjacency matrix of `g`.
pub fn eigendecompose(g: &Graph) -> Result<Spectrum> {
    eigendecompose_matrix(&g.adjacency_f64(), g.n())
}

/// Jacobi eigendecomposition of an arbitrary symmetric matrix (row-major).
pub fn eigendecompose_matrix(matrix: &[f64], n: usize) -> Result<Spectrum> {
    assert_eq!(matrix.len(), n * n);
    let mut a = matrix.to_vec();
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let norm: f64 = matrix.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || n == 1 {
        let eigenvalues = vec![0.0; n];
        let mut s = Spectrum {
            n,
            eigenvalues,
            vectors: v,
        };
        if n == 1 {
            s.eigenvalues[0] = matrix[0];
        }
        return Ok(s);
    }

    let mut converged = false;
    let mut last_off = f64::INFINITY;
    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        last_off = (2.0 * off).sqrt();
        if last_off <= OFF_DIAG_TOL * norm {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // rows/columns p and q of A
                for i in 0..n {
                    if i != p && i != q {
                        let aip = a[i * n + p];
                        let aiq = a[i * n + q];
                        a[i * n + p] = c * aip - s * aiq;
                        a[p * n + i] = a[i * n + p];
                        a[i * n + q] = s * aip + c * aiq;
                        a[q * n + i] = a[i * n + q];
                    }
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;

                // accumulate eigenvectors
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            residual: last_off,
        });
    }

    // sort descending, carrying columns along
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].partial_cmp(&a[i * n + i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[k * n + k]).collect();
    let mut vectors = vec![0.0f64; n * n];
    for (new_k, &old_k) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + new_k] = v[i * n + old_k];
        }
    }
    Ok(Spectrum {
        n,
        eigenvalues,
        vectors,
    })
}

/// A positive power-series coefficient function: the three kinds the
/// analysis exercises.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PpscFunction {
    /// `exp(x) = sum x^k / k!`
    Exp,
    /// `1 / (1 - alpha x) = sum (alpha x)^k`, `alpha > 0`
    Resolvent { alpha: f64 },
    /// `sum_{k <= K} c_k x^k` with every stored coefficient strictly
    /// positive
    TruncatedSeries { coefficients: Vec<f64> },
}

impl PpscFunction {
    pub fn exp() -> Self {
        PpscFunction::Exp
    }

    pub fn resolvent(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter(
                "resolvent alpha must be positive".into(),
            ));
        }
        Ok(PpscFunction::Resolvent { alpha })
    }

    pub fn truncated_series(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter(
                "truncated series needs at least one coefficient".into(),
            ));
        }
        if let Some(bad) = coefficients.iter().position(|&c| !(c > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "power-series coefficient c_{bad} = {} is not positive",
                coefficients[bad]
            )));
        }
        Ok(PpscFunction::TruncatedSeries { coefficients })
    }

    /// Scalar evaluation `f(x)`; the resolvent radius must have been
    /// checked beforehand.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PpscFunction::Exp => x.exp(),
            PpscFunction::Resolvent { alpha } => 1.0 / (1.0 - alpha * x),
            PpscFunction::TruncatedSeries { coefficients } => {
                let mut acc = 0.0;
                for &c in coefficients.iter().rev() {
                    acc = acc * x + c;
                }
                acc
            }
        }
    }

    /// Checks that `f` is defined on the spectrum of `beta * A`.
    pub fn check_radius(&self, beta: f64, max_abs_eigenvalue: f64) -> Result<()> {
        if let PpscFunction::Resolvent { alpha } = self {
            let value = alpha * beta * max_abs_eigenvalue;
            if value >= 1.0 {
                return Err(Error::ResolventRadius { value });
            }
        }
        Ok(())
    }

    pub fn descriptor(&self) -> String {
        match self {
            PpscFunction::Exp => "exp".to_string(),
            PpscFunction::Resolvent { alpha } => format!("resolvent({alpha})"),
            PpscFunction::TruncatedSeries { coefficients } => {
                format!("series(K={})", coefficients.len() - 1)
            }
        }
    }
}

/// `diag(f(beta A))` for the adjacency matrix of `g`.
pub fn f_diag(g: &Graph, f: &PpscFunction, beta: f64) -> Result<Vec<f64>> {
    let spectrum = eigendecompose(g)?;
    f_diag_from_spectrum(&spectrum, f, beta)
}

/// `diag(f(beta A))` from a precomputed spectrum:
/// `diag_i = sum_k f(beta lambda_k) V[i,k]^2`.
pub fn f_diag_from_spectrum(s: &Spectrum, f: &PpscFunction, beta: f64) -> Result<Vec<f64>> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter("beta must be positive".into()));
    }
    f.check_radius(beta, s.max_abs_eigenvalue())?;
    let weights: Vec<f64> = s.eigenvalues().iter().map(|&l| f.eval(beta * l)).collect();
    Ok(par::map_indexed(s.n(), |i| {
        let mut acc = 0.0;
        for (k, w) in weights.iter().enumerate() {
            let v = s.component(i, k);
            acc += w * v * v;
        }
        acc
    }))
}

/// Relative constant-diagonal gap `(max - min) / mean`; zero iff constant.
pub fn constant_diagonal_gap(v: &[f64]) -> f64 {
    assert!(!v.is_empty(), "gap of an empty vector");
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (max - min) / mean
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph;

    #[test]
    fn complete_graph_spectrum() {
        let s = eigendecompose(&graph::complete_graph(3).unwrap()).unwrap();
        let got = s.eigenvalues();
        assert!((got[0] - 2.0).abs() < 1e-12);
        assert!((got[1] + 1.0).abs() < 1e-12);
        assert!((got[2] + 1.0).abs() < 1e-12);
        assert_eq!(s.distinct_eigenvalue_count(), 2);

        let s = eigendecompose(&graph::complete_graph(2).unwrap()).unwrap();
        assert!((s.eigenvalues()[0] - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues()[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn residuals_are_tiny() {
        let g = graph::kks_graph(4, 5).unwrap();
        let s = eigendecompose(&g).unwrap();
        assert!(s.orthonormality_residual() < 1e-10);
        assert!(s.eigen_residual(&g.adjacency_f64()) < 1e-8);
        assert_eq!(s.distinct_eigenvalue_count(), 6);
    }

    #[test]
    fn k2_exp_diag_is_cosh() {
        let g = graph::complete_graph(2).unwrap();
        for beta in [0.25, 1.0, 2.5] {
            let d = f_diag(&g, &PpscFunction::Exp, beta).unwrap();
            assert!((d[0] - beta.cosh()).abs() < 1e-13);
            assert!((d[1] - beta.cosh()).abs() < 1e-13);
        }
    }

    #[test]
    fn walk_regular_graph_has_constant_diag() {
        let c5 = graph::cycle_graph(5).unwrap();
        for f in [
            PpscFunction::Exp,
            PpscFunction::resolvent(0.2).unwrap(),
            PpscFunction::truncated_series(vec![1.0, 0.5, 0.25, 0.125]).unwrap(),
        ] {
            let d = f_diag(&c5, &f, 0.9).unwrap();
            assert!(constant_diagonal_gap(&d) < 1e-12, "{}", f.descriptor());
        }
        let c6 = graph::cycle_graph(6).unwrap();
        let d = f_diag(&c6, &PpscFunction::Exp, 1.0).unwrap();
        assert!(constant_diagonal_gap(&d) < 1e-12);
    }

    #[test]
    fn p3_exp_diag_matches_series_oracle() {
        // truncated-series oracle: sum_{k <= 40} A^k / k! via direct matrix
        // powers, independent of the spectral path
        let g = graph::path_graph(3).unwrap();
        let n = 3;
        let a = g.adjacency_f64();
        let mut power = vec![0.0; n * n];
        for i in 0..n {
            power[i * n + i] = 1.0;
        }
        let mut oracle = vec![0.0; n];
        let mut factorial = 1.0f64;
        for k in 0..=40u32 {
            if k > 0 {
                factorial *= f64::from(k);
                let mut next = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        let mut s = 0.0;
                        for l in 0..n {
                            s += power[i * n + l] * a[l * n + j];
                        }
                        next[i * n + j] = s;
                    }
                }
                power = next;
            }
            for i in 0..n {
                oracle[i] += power[i * n + i] / factorial;
            }
        }
        let d = f_diag(&g, &PpscFunction::Exp, 1.0).unwrap();
        for i in 0..n {
            assert!((d[i] - oracle[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn truncated_series_matches_horner_matrix_oracle() {
        let g = graph::kks_graph(2, 3).unwrap();
        let coeffs: Vec<f64> = (0..=12).map(|k| 0.7f64.powi(k) / (k as f64 + 1.0)).collect();
        let f = PpscFunction::truncated_series(coeffs.clone()).unwrap();
        let beta = 0.31;
        let d = f_diag(&g, &f, beta).unwrap();

        let n = g.n();
        let a: Vec<f64> = g.adjacency_f64().iter().map(|x| x * beta).collect();
        let mut power = vec![0.0; n * n];
        for i in 0..n {
            power[i * n + i] = 1.0;
        }
        let mut oracle = vec![0.0; n];
        for (k, &c) in coeffs.iter().enumerate() {
            if k > 0 {
                let mut next = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        let mut s = 0.0;
                        for l in 0..n {
                            s += power[i * n + l] * a[l * n + j];
                        }
                        next[i * n + j] = s;
                    }
                }
                power = next;
            }
            for i in 0..n {
                oracle[i] += c * power[i * n + i];
            }
        }
        for i in 0..n {
            assert!((d[i] - oracle[i]).abs() < 1e-10 * oracle[i].abs().max(1.0));
        }
    }

    #[test]
    fn trace_identity() {
        let g = graph::kks_graph(3, 4).unwrap();
        let s = eigendecompose(&g).unwrap();
        for beta in [0.2, 0.9, 1.7] {
            let d = f_diag_from_spectrum(&s, &PpscFunction::Exp, beta).unwrap();
            let lhs: f64 = d.iter().sum();
            let rhs: f64 = s.eigenvalues().iter().map(|&l| (beta * l).exp()).sum();
            assert!((lhs - rhs).abs() < 1e-9 * rhs.abs());
        }
    }

    #[test]
    fn resolvent_radius_enforced() {
        let g = graph::complete_graph(4).unwrap(); // lambda_max = 3
        let f = PpscFunction::resolvent(0.5).unwrap();
        assert!(f_diag(&g, &f, 0.5).is_ok()); // 0.5*0.5*3 = 0.75 < 1
        assert!(matches!(
            f_diag(&g, &f, 1.0),
            Err(Error::ResolventRadius { .. })
        ));
        assert!(PpscFunction::resolvent(-0.1).is_err());
        assert!(PpscFunction::truncated_series(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn gap_basics() {
        assert_eq!(constant_diagonal_gap(&[3.0, 3.0, 3.0]), 0.0);
        assert!((constant_diagonal_gap(&[1.0, 3.0]) - 1.0).abs() < 1e-15);
    }
}
