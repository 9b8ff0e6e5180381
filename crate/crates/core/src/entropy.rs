//! Walk entropy, the search for entropic parameter values, and verification
//! of the Cartesian and tensor product constructions.
//!
//! A connected, non-walk-regular graph is *entropic with respect to beta*
//! when `f(beta A)` has constant diagonal for some PPSC `f`; the walk
//! entropy then attains its maximum `log n`. The scanner locates such beta
//! for a fixed `f` by tracking the score difference between walk-classes
//! over a grid and refining each sign change by bisection.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::graph::{self, Graph};
use crate::spectral::{self, constant_diagonal_gap, PpscFunction, Spectrum};
use crate::walks;
use crate::{exact, par};
use crate::{Error, Result};

/// Number of bisection steps before giving up on a bracket.
const BISECTION_CAP: usize = 200;

/// A parameter value at which the centrality diagonal is constant.
#[derive(Clone, Debug, Serialize)]
pub struct EntropicValue {
    pub beta: f64,
    pub bracket: (f64, f64),
    /// Constant-diagonal relative gap achieved at `beta`.
    pub gap: f64,
    /// Descriptor of the PPSC function that witnessed the value.
    pub function: String,
}

/// Walk entropy `-sum p_j log p_j` with `p_j = f_diag_j / trace`.
/// Natural logarithm; the value lies in `[0, log n]`.
pub fn walk_entropy(g: &Graph, f: &PpscFunction, beta: f64) -> Result<f64> {
    let diag = spectral::f_diag(g, f, beta)?;
    Ok(entropy_of_diag(&diag))
}

pub fn entropy_of_diag(diag: &[f64]) -> f64 {
    let trace: f64 = diag.iter().sum();
    -diag
        .iter()
        .map(|&d| {
            let p = d / trace;
            if p > 0.0 {
                p * p.ln()
            } else {
                0.0
            }
        })
        .sum::<f64>()
}

/// Squared eigenvector rows for a set of nodes; lets per-node scores be
/// re-evaluated in O(n) per beta during scans.
struct ScoreTable {
    weights_sq: Vec<Vec<f64>>, // per node: V[i,k]^2 over k
}

impl ScoreTable {
    fn new(s: &Spectrum, nodes: &[usize]) -> Self {
        let weights_sq = nodes
            .iter()
            .map(|&i| (0..s.n()).map(|k| s.component(i, k).powi(2)).collect())
            .collect();
        ScoreTable { weights_sq }
    }

    fn scores(&self, s: &Spectrum, f: &PpscFunction, beta: f64) -> Vec<f64> {
        let fvals: Vec<f64> = s.eigenvalues().iter().map(|&l| f.eval(beta * l)).collect();
        self.weights_sq
            .iter()
            .map(|w| w.iter().zip(&fvals).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Scans `(0, beta_max]` for entropic values of `f` on `g`.
///
/// For two walk-classes the scanner brackets sign changes of the score
/// difference and bisects; with more classes a value is only reported when
/// every pairwise difference changes sign in a common bracket and the
/// refined point drives the maximum pairwise gap below `tol`; such
/// candidates still need certificate-level confirmation.
pub fn scan_entropic_values(
    g: &Graph,
    f: &PpscFunction,
    beta_max: f64,
    grid_step: f64,
    tol: f64,
) -> Result<Vec<EntropicValue>> {
    if !(beta_max > 0.0) || !(grid_step > 0.0) || grid_step >= beta_max {
        return Err(Error::InvalidParameter(
            "need 0 < grid_step < beta_max".into(),
        ));
    }
    let partition = walks::walk_classes(g)?;
    if partition.class_count() == 1 {
        return Err(Error::WalkRegularInput);
    }
    if !graph::is_connected(g) {
        return Err(Error::Precondition("scan requires a connected graph".into()));
    }
    let spectrum = spectral::eigendecompose(g)?;
    f.check_radius(beta_max, spectrum.max_abs_eigenvalue())?;
    let table = ScoreTable::new(&spectrum, &partition.representatives);

    let steps = (beta_max / grid_step).round() as usize;
    let betas: Vec<f64> = (1..=steps)
        .map(|i| (i as f64) * grid_step)
        .filter(|&b| b <= beta_max + 1e-12 * beta_max)
        .collect();
    let grid: Vec<Vec<f64>> = {
        let table = &table;
        let spectrum = &spectrum;
        par::map_items(&betas, |&beta| table.scores(spectrum, f, beta))
    };

    let nc = partition.class_count();
    let pair_delta = |scores: &[f64], a: usize, b: usize| scores[a] - scores[b];
    let mut found: Vec<EntropicValue> = Vec::new();
    for w in 0..betas.len().saturating_sub(1) {
        let (lo, hi) = (betas[w], betas[w + 1]);
        let (slo, shi) = (&grid[w], &grid[w + 1]);
        let mut all_change = true;
        for a in 0..nc {
            for b in (a + 1)..nc {
                if pair_delta(slo, a, b) * pair_delta(shi, a, b) > 0.0 {
                    all_change = false;
                }
            }
        }
        if !all_change {
            continue;
        }
        // refine on the first pair; others are re-checked at the root
        let delta = |beta: f64| {
            let s = table.scores(&spectrum, f, beta);
            pair_delta(&s, 0, 1)
        };
        let scale = |beta: f64| {
            spectrum
                .eigenvalues()
                .iter()
                .map(|&l| f.eval(beta * l))
                .sum::<f64>()
                / spectrum.n() as f64
        };
        let Some(root) = bisect(delta, lo, hi, |b, d| d.abs() <= 1e-13 * scale(b)) else {
            continue;
        };
        let diag = spectral::f_diag_from_spectrum(&spectrum, f, root)?;
        let gap = constant_diagonal_gap(&diag);
        let accept = if nc == 2 { true } else { gap < tol };
        // a root sitting exactly on a grid point is bracketed twice
        let duplicate = found
            .last()
            .is_some_and(|prev: &EntropicValue| (prev.beta - root).abs() <= 1e-12 * root);
        if accept && !duplicate {
            found.push(EntropicValue {
                beta: root,
                bracket: (lo, hi),
                gap,
                function: f.descriptor(),
            });
        }
    }
    Ok(found)
}

/// Bisection on a bracket with a caller-supplied acceptance test; `None`
/// when the endpoints do not straddle a sign change.
pub(crate) fn bisect<F, G>(f: F, mut lo: f64, mut hi: f64, accept: G) -> Option<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64, f64) -> bool,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..BISECTION_CAP {
        mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if accept(mid, fmid) || mid <= lo || mid >= hi {
            return Some(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Some(mid)
}

/// Report from [`verify_cartesian_entropic`].
#[derive(Clone, Debug, Serialize)]
pub struct CartesianReport {
    pub product_nodes: usize,
    pub connected: bool,
    pub non_walk_regular: bool,
    /// `gap(exp(beta0 * A_{G box H}))`
    pub gap: f64,
    /// max relative deviation of `diag_G (x) diag_H` from the product diagonal
    pub kronecker_residual: f64,
    pub passed: bool,
}

/// Verifies that `G box H` is entropic with respect to `beta0` given that
/// `exp(beta0 A_G)` and `exp(beta0 A_H)` are constant diagonal.
pub fn verify_cartesian_entropic(
    g: &Graph,
    h: &Graph,
    beta0: f64,
    tol: f64,
) -> Result<CartesianReport> {
    if !(beta0 > 0.0) {
        return Err(Error::InvalidParameter("beta0 must be positive".into()));
    }
    if !graph::is_connected(g) {
        return Err(Error::Precondition("first factor is not connected".into()));
    }
    if !graph::is_connected(h) {
        return Err(Error::Precondition("second factor is not connected".into()));
    }
    let diag_g = spectral::f_diag(g, &PpscFunction::Exp, beta0)?;
    let gap_g = constant_diagonal_gap(&diag_g);
    if gap_g >= tol {
        return Err(Error::Precondition(format!(
            "exp(beta0 A) of the first factor is not constant diagonal (gap {gap_g:.3e})"
        )));
    }
    let diag_h = spectral::f_diag(h, &PpscFunction::Exp, beta0)?;
    let gap_h = constant_diagonal_gap(&diag_h);
    if gap_h >= tol {
        return Err(Error::Precondition(format!(
            "exp(beta0 A) of the second factor is not constant diagonal (gap {gap_h:.3e})"
        )));
    }
    let g_regular = walks::is_walk_regular(g)?;
    let h_regular = walks::is_walk_regular(h)?;
    if g_regular && h_regular {
        return Err(Error::Precondition(
            "both factors are walk-regular; the product cannot be entropic".into(),
        ));
    }

    let product = graph::cartesian_product(g, h);
    let connected = graph::is_connected(&product);
    let non_walk_regular = !walks::is_walk_regular(&product)?;
    let diag_p = spectral::f_diag(&product, &PpscFunction::Exp, beta0)?;
    let gap = constant_diagonal_gap(&diag_p);
    let mean: f64 = diag_p.iter().sum::<f64>() / diag_p.len() as f64;
    let mut kron = 0.0f64;
    for i in 0..g.n() {
        for j in 0..h.n() {
            let expected = diag_g[i] * diag_h[j];
            kron = kron.max((diag_p[i * h.n() + j] - expected).abs() / mean);
        }
    }
    let passed = connected && non_walk_regular && gap < tol && kron < 1e-9;
    Ok(CartesianReport {
        product_nodes: product.n(),
        connected,
        non_walk_regular,
        gap,
        kronecker_residual: kron,
        passed,
    })
}

/// Smallest truncation order `K` with exponential tail
/// `sum_{k > K} (beta0 lambda_max)^k / k! < 1e-14`.
pub fn tensor_truncation_order(g: &Graph, beta0: f64) -> Result<usize> {
    let s = spectral::eigendecompose(g)?;
    let z = beta0 * s.lambda_max();
    for k in 1..400 {
        if exp_tail(z, k) < 1e-14 {
            return Ok(k);
        }
    }
    Err(Error::InvalidParameter(
        "tail bound not reachable below K = 400".into(),
    ))
}

/// Upper bound on `sum_{k > big_k} z^k / k!` via geometric comparison.
pub fn exp_tail(z: f64, big_k: usize) -> f64 {
    let mut term = 1.0f64; // z^(K+1) / (K+1)!
    for k in 1..=(big_k + 1) {
        term *= z / k as f64;
    }
    let ratio = z / (big_k + 2) as f64;
    if ratio < 1.0 {
        term / (1.0 - ratio)
    } else {
        f64::INFINITY
    }
}

/// Builds the truncated PPSC series that makes `G (x) H` constant diagonal:
/// `c_0 = 1`, `c_1 = beta0`, `c_k = (beta0^k / k!) / C_H(k)` for
/// `2 <= k <= K`, where `C_H(k)` is the constant diagonal of `A_H^k`.
///
/// `H` must be walk-regular, connected, and contain a triangle (which makes
/// `C_H(k) > 0` for every `k >= 2`); `G` must be entropic at `beta0` under
/// the exponential; `K` must satisfy the `1e-14` tail rule.
pub fn build_tensor_function(
    g: &Graph,
    beta0: f64,
    h: &Graph,
    big_k: usize,
) -> Result<PpscFunction> {
    check_tensor_preconditions(g, beta0, h, big_k)?;
    let c_h = exact::diag_powers(h, big_k)
        .into_iter()
        .map(|diag| diag[0].to_f64().unwrap_or(f64::INFINITY))
        .collect::<Vec<f64>>();
    let mut coeffs = Vec::with_capacity(big_k + 1);
    coeffs.push(1.0);
    if big_k >= 1 {
        coeffs.push(beta0);
    }
    let mut h_k = beta0; // beta0^k / k!
    for k in 2..=big_k {
        h_k *= beta0 / k as f64;
        coeffs.push(h_k / c_h[k]);
    }
    PpscFunction::truncated_series(coeffs)
}

fn check_tensor_preconditions(g: &Graph, beta0: f64, h: &Graph, big_k: usize) -> Result<()> {
    if !(beta0 > 0.0) {
        return Err(Error::InvalidParameter("beta0 must be positive".into()));
    }
    if !graph::is_connected(g) {
        return Err(Error::Precondition("first factor is not connected".into()));
    }
    if walks::is_walk_regular(g)? {
        return Err(Error::Precondition(
            "first factor is walk-regular, not entropic".into(),
        ));
    }
    let diag_g = spectral::f_diag(g, &PpscFunction::Exp, beta0)?;
    let gap_g = constant_diagonal_gap(&diag_g);
    if gap_g >= 1e-9 {
        return Err(Error::Precondition(format!(
            "first factor is not entropic at beta0 (exp-diag gap {gap_g:.3e})"
        )));
    }
    if !graph::is_connected(h) {
        return Err(Error::Precondition("second factor is not connected".into()));
    }
    if !walks::is_walk_regular(h)? {
        return Err(Error::Precondition(
            "second factor is not walk-regular".into(),
        ));
    }
    if !graph::has_triangle(h) {
        return Err(Error::Precondition(
            "second factor contains no triangle, so C_H(k) may vanish".into(),
        ));
    }
    let s = spectral::eigendecompose(g)?;
    let tail = exp_tail(beta0 * s.lambda_max(), big_k);
    if tail >= 1e-14 {
        return Err(Error::Precondition(format!(
            "truncation order K = {big_k} leaves exponential tail {tail:.3e} >= 1e-14"
        )));
    }
    Ok(())
}

/// Report from [`verify_tensor_entropic`].
#[derive(Clone, Debug, Serialize)]
pub struct TensorReport {
    pub product_nodes: usize,
    pub truncation_order: usize,
    pub tail_bound: f64,
    pub connected: bool,
    pub non_walk_regular: bool,
    /// gap of the truncated-series diagonal, evaluated separably
    pub gap: f64,
    /// gap threshold actually enforced: `tol` plus the tail allowance
    pub gap_allowance: f64,
    /// max relative difference between separable and direct evaluation
    /// (only for products with at most 60 nodes)
    pub direct_residual: Option<f64>,
    pub passed: bool,
}

/// Verifies that the constructed PPSC series makes `G (x) H` constant
/// diagonal: evaluates the series separably via
/// `sum_k c_k diag(A_G^k)_i C_H(k)` and, for products of at most 60 nodes,
/// directly through exact matrix powers of the product.
pub fn verify_tensor_entropic(
    g: &Graph,
    beta0: f64,
    h: &Graph,
    big_k: usize,
    tol: f64,
) -> Result<TensorReport> {
    let f = build_tensor_function(g, beta0, h, big_k)?;
    let PpscFunction::TruncatedSeries { coefficients } = &f else {
        unreachable!("build_tensor_function returns a truncated series");
    };
    let diag_g = exact::diag_powers(g, big_k);
    let c_h: Vec<f64> = exact::diag_powers(h, big_k)
        .into_iter()
        .map(|diag| exact::big_to_f64(&diag[0]))
        .collect();

    // separable evaluation: entry (i, j) depends only on i
    let sep: Vec<f64> = par::map_indexed(g.n(), |i| {
        coefficients
            .iter()
            .enumerate()
            .map(|(k, &c)| c * exact::big_to_f64(&diag_g[k][i]) * c_h[k])
            .sum()
    });
    let gap = constant_diagonal_gap(&sep);
    let mean = sep.iter().sum::<f64>() / sep.len() as f64;

    let product = graph::tensor_product(g, h);
    let connected = graph::is_connected(&product);
    let non_walk_regular = !walks::is_walk_regular(&product)?;

    let direct_residual = if product.n() <= 60 {
        let diag_p = exact::diag_powers(&product, big_k);
        let mut worst = 0.0f64;
        for i in 0..g.n() {
            for j in 0..h.n() {
                let direct: f64 = coefficients
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| c * exact::big_to_f64(&diag_p[k][i * h.n() + j]))
                    .sum();
                worst = worst.max((direct - sep[i]).abs() / mean);
            }
        }
        Some(worst)
    } else {
        None
    };

    let s = spectral::eigendecompose(g)?;
    let tail = exp_tail(beta0 * s.lambda_max(), big_k);
    let gap_allowance = tol + 3.0 * tail / mean;
    let passed = connected
        && non_walk_regular
        && gap < gap_allowance
        && direct_residual.map_or(true, |r| r < 1e-9);
    Ok(TensorReport {
        product_nodes: product.n(),
        truncation_order: big_k,
        tail_bound: tail,
        connected,
        non_walk_regular,
        gap,
        gap_allowance,
        direct_residual,
        passed,
    })
}
