//! Collision certificates: LP feasibility of `W_J x = e` with strict
//! positivity, the explicit PPSC coefficient sequence a positive solution
//! induces, and the SAFF/Farkas machinery that refutes nonnegative
//! solvability.
//!
//! A positive solution over the lp-mode columns certifies that some PPSC
//! function scores all selected walk-classes identically; an exactly
//! inconsistent system over all classes certifies the opposite. Everything
//! the floating LP reports is re-validated against the exact big-integer
//! walk counts before a certificate is issued.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::graph::{self, Graph};
use crate::simplex::{self, LpOutcome};
use crate::walks::{self, WalkMode};
use crate::{exact, par};
use crate::{Error, Result};

/// Default strict-positivity threshold on the LP margin.
pub const DEFAULT_POSITIVITY_TOL: f64 = 1e-9;
/// Default feasibility tolerance on the scaled LP residual.
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-9;
/// Relative spread allowed when the certificate is recomputed against the
/// exact integer walk counts.
pub const EXACT_SPREAD_TOL: f64 = 1e-8;
/// Variable upper bound after column max-normalization.
pub const COLUMN_BOX_BOUND: f64 = 1e3;
/// Default cap on the number of collapsed rows the SAFF search accepts.
pub const SAFF_SIZE_CAP: usize = 14;
/// At most this many copies of a collapsed row enter a SAFF side.
pub const SAFF_MULTIPLICITY_CAP: usize = 3;

/// Positive LP solution certifying a collision across walk-classes.
#[derive(Clone, Debug, Serialize)]
pub struct CollisionCertificate {
    /// Walk-matrix column indices (power exponents) the solution uses.
    pub column_ells: Vec<usize>,
    /// Solution in column-scaled space; the unscaled coefficient of
    /// `diag(A^l)` is `x[k] / scaling[k]`.
    pub x: Vec<f64>,
    /// `t* = min_l x_l` after column normalization.
    pub margin: f64,
    /// `max |W_scaled x - e|`.
    pub residual: f64,
    /// Per-column positive divisors used for normalization.
    pub scaling: Vec<f64>,
    /// Walk-class ids covered by the certificate.
    pub classes: Vec<usize>,
    /// Relative spread of the exact big-integer recomputation.
    pub exact_spread: f64,
}

/// Farkas vector refuting any nonnegative solution of `M x = e`.
#[derive(Clone, Debug, Serialize)]
pub struct FarkasRefutation {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub delta: f64,
    pub y: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    InfeasibleNotEntropic,
    InfeasibleSubset,
    Inconclusive,
}

/// Full outcome of a certification run.
#[derive(Clone, Debug, Serialize)]
pub struct CertifyReport {
    pub verdict: Verdict,
    pub mode: WalkMode,
    pub classes: Vec<usize>,
    pub classes_total: usize,
    pub class_sizes: Vec<usize>,
    /// Exact rational consistency of `W_J x = e` (any sign of x).
    pub system_consistent: bool,
    /// Whether the LP found any `x` in `[0, U]^C` with `W_J x = e`.
    pub lp_feasible: bool,
    pub margin: Option<f64>,
    pub certificate: Option<CollisionCertificate>,
    pub note: Option<String>,
}

/// Options for [`certify_collision_with`].
#[derive(Clone, Copy, Debug)]
pub struct CertifyOptions {
    pub positivity_tol: f64,
    pub feasibility_tol: f64,
    /// Variable upper bound in scaled space; keeps the margin LP bounded
    /// when a walk-matrix column is identically zero.
    pub box_bound: f64,
    pub force_full: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            positivity_tol: DEFAULT_POSITIVITY_TOL,
            feasibility_tol: DEFAULT_FEASIBILITY_TOL,
            box_bound: COLUMN_BOX_BOUND,
            force_full: false,
        }
    }
}

/// Certifies a collision at the given walk-classes (`None` = all classes)
/// with default tolerances.
pub fn certify_collision(
    g: &Graph,
    classes: Option<&[usize]>,
    mode: WalkMode,
) -> Result<CertifyReport> {
    certify_collision_with(g, classes, mode, CertifyOptions::default())
}

pub fn certify_collision_with(
    g: &Graph,
    classes: Option<&[usize]>,
    mode: WalkMode,
    opts: CertifyOptions,
) -> Result<CertifyReport> {
    if !graph::is_connected(g) {
        return Err(Error::Precondition(
            "collision certificates require a connected graph".into(),
        ));
    }
    let partition = walks::walk_classes(g)?;
    let nc = partition.class_count();
    let selected: Vec<usize> = match classes {
        None => (0..nc).collect(),
        Some(ids) => {
            let mut ids: Vec<usize> = ids.to_vec();
            ids.sort_unstable();
            ids.dedup();
            if ids.is_empty() {
                return Err(Error::InvalidParameter("empty class selection".into()));
            }
            if let Some(&bad) = ids.iter().find(|&&c| c >= nc) {
                return Err(Error::InvalidParameter(format!(
                    "class id {bad} out of range; the graph has {nc} walk-classes"
                )));
            }
            ids
        }
    };
    let all_classes = selected.len() == nc;

    let wm = walks::walk_matrix_with_override(g, mode, opts.force_full)?;
    let rows_int: Vec<Vec<BigInt>> = selected
        .iter()
        .map(|&c| wm.row(partition.representatives[c]))
        .collect();
    let system_consistent = exact::system_is_consistent(&rows_int);

    let n_cols = wm.ells.len();
    let mut scaling = vec![1.0f64; n_cols];
    for (k, s) in scaling.iter_mut().enumerate() {
        let col_max = rows_int
            .iter()
            .map(|r| r[k].clone())
            .max()
            .unwrap_or_else(BigInt::zero);
        if !col_max.is_zero() {
            *s = exact::big_to_f64(&col_max);
        }
    }
    let scaled: Vec<Vec<f64>> = rows_int
        .iter()
        .map(|r| {
            r.iter()
                .zip(&scaling)
                .map(|(v, s)| exact::big_to_f64(v) / s)
                .collect()
        })
        .collect();

    let base = CertifyReport {
        verdict: Verdict::Inconclusive,
        mode,
        classes: selected.clone(),
        classes_total: nc,
        class_sizes: partition.sizes(),
        system_consistent,
        lp_feasible: false,
        margin: None,
        certificate: None,
        note: None,
    };

    match simplex::max_margin_lp(&scaled, opts.box_bound)? {
        LpOutcome::Infeasible { phase1_objective } => {
            let verdict = if !system_consistent && all_classes {
                Verdict::InfeasibleNotEntropic
            } else {
                Verdict::InfeasibleSubset
            };
            let note = if system_consistent {
                Some(format!(
                    "system is consistent but admits no nonnegative solution \
                     (phase-1 objective {phase1_objective:.3e})"
                ))
            } else {
                Some("system is exactly inconsistent".to_string())
            };
            Ok(CertifyReport {
                verdict,
                note,
                ..base
            })
        }
        LpOutcome::Optimal {
            t_star,
            x,
            residual,
        } => {
            if t_star > opts.positivity_tol {
                if residual > opts.feasibility_tol {
                    return Ok(CertifyReport {
                        verdict: Verdict::Inconclusive,
                        lp_feasible: true,
                        margin: Some(t_star),
                        note: Some(format!(
                            "scaled residual {residual:.3e} exceeds the feasibility tolerance"
                        )),
                        ..base
                    });
                }
                let spread = exact_recombination_spread(&rows_int, &x, &scaling);
                if spread < EXACT_SPREAD_TOL {
                    let certificate = CollisionCertificate {
                        column_ells: wm.ells.clone(),
                        x,
                        margin: t_star,
                        residual,
                        scaling,
                        classes: selected,
                        exact_spread: spread,
                    };
                    Ok(CertifyReport {
                        verdict: Verdict::Certified,
                        lp_feasible: true,
                        margin: Some(t_star),
                        certificate: Some(certificate),
                        ..base
                    })
                } else {
                    Ok(CertifyReport {
                        verdict: Verdict::Inconclusive,
                        lp_feasible: true,
                        margin: Some(t_star),
                        note: Some(format!(
                            "exact recomputation spread {spread:.3e} exceeds {EXACT_SPREAD_TOL:.0e}"
                        )),
                        ..base
                    })
                }
            } else {
                let note = if t_star > 0.0 {
                    format!(
                        "degenerate margin {t_star:.3e} within (0, {:.0e}]",
                        opts.positivity_tol
                    )
                } else {
                    "zero margin: nonnegative solutions exist but none strictly positive \
                     within the box"
                        .to_string()
                };
                Ok(CertifyReport {
                    verdict: Verdict::Inconclusive,
                    lp_feasible: true,
                    margin: Some(t_star),
                    note: Some(note),
                    ..base
                })
            }
        }
    }
}

/// Relative spread of `sum_l (x_l / scale_l) diag(A^l)[i]` over the
/// selected representatives, with the walk counts kept exact.
fn exact_recombination_spread(rows: &[Vec<BigInt>], x: &[f64], scaling: &[f64]) -> f64 {
    let values: Vec<f64> = rows
        .iter()
        .map(|r| {
            r.iter()
                .zip(x.iter().zip(scaling))
                .map(|(v, (xk, s))| exact::big_to_f64(v) * (xk / s))
                .sum()
        })
        .collect();
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (max - min) / mean
}

/// Builds the strictly positive power-series coefficient prefix
/// `c_0 ..= c_K` induced by a positive lp-mode solution: the tail terms are
/// `c_k = min_j 2^{-k} |p_{k,j}|^{-1}` (with `2^{-k}` when `p_{k,j} = 0`),
/// the head terms absorb the tail through the minimal-polynomial reduction
/// `c_j = x_j - sum_k p_{k,j} c_k`, and the whole tail block is halved
/// until every head coefficient is positive.
///
/// The resulting prefix reproduces `sum_j x_j diag(A^j)` exactly (up to
/// rounding), so its diagonal is constant to the same precision as the
/// certificate it came from.
pub fn construct_ppsc_coefficients(
    g: &Graph,
    certificate: &CollisionCertificate,
    big_k: usize,
) -> Result<Vec<f64>> {
    let min_poly = exact::minimal_polynomial(g)?;
    let m = min_poly.len();
    if big_k < m {
        return Err(Error::InvalidParameter(format!(
            "truncation order K = {big_k} is below the minimal-polynomial degree {m}"
        )));
    }
    let expected_ells: Vec<usize> = std::iter::once(0).chain(2..m).collect();
    if certificate.column_ells != expected_ells {
        return Err(Error::Precondition(format!(
            "certificate columns {:?} are not the lp-mode set {:?}",
            certificate.column_ells, expected_ells
        )));
    }

    // positive solution over powers 0..m-1; the power-1 column is
    // identically zero, so any positive value works there
    let mut x_by_power = vec![1.0f64; m];
    for (k, &ell) in certificate.column_ells.iter().enumerate() {
        x_by_power[ell] = certificate.x[k] / certificate.scaling[k];
    }

    let reductions = exact::reduction_coefficients(&min_poly, big_k);
    let p: Vec<Vec<f64>> = reductions
        .iter()
        .map(|row| row.iter().map(exact::ratio_to_f64).collect())
        .collect();

    let mut tail: Vec<f64> = (m..=big_k)
        .map(|k| {
            let two_pow = 0.5f64.powi(k as i32);
            p[k - m]
                .iter()
                .map(|&pkj| {
                    if pkj == 0.0 {
                        two_pow
                    } else {
                        two_pow / pkj.abs()
                    }
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    if tail.iter().any(|&c| !(c > 0.0) || !c.is_finite()) {
        return Err(Error::Precondition(
            "a tail coefficient left the positive f64 range; lower K".into(),
        ));
    }

    for _halving in 0..=200 {
        let head: Vec<f64> = (0..m)
            .map(|j| {
                let correction: f64 = tail
                    .iter()
                    .enumerate()
                    .map(|(idx, &ck)| p[idx][j] * ck)
                    .sum();
                x_by_power[j] - correction
            })
            .collect();
        if head.iter().all(|&c| c > 0.0) {
            let mut coeffs = head;
            coeffs.extend_from_slice(&tail);
            debug_assert!(coeffs.iter().all(|&c| c > 0.0));
            return Ok(coeffs);
        }
        for c in tail.iter_mut() {
            *c *= 0.5;
        }
    }
    Err(Error::Precondition(
        "tail downscaling failed to reach positive head coefficients in 200 halvings".into(),
    ))
}

/// `diag(sum_k coeffs[k] A^k)` with the matrix powers taken exactly.
pub fn truncated_series_diag_exact(g: &Graph, coeffs: &[f64]) -> Vec<f64> {
    let max_ell = coeffs.len().saturating_sub(1);
    par::map_indexed(g.n(), |node| {
        let diag = exact::diag_powers_of_node(g, node, max_ell);
        coeffs
            .iter()
            .zip(&diag)
            .map(|(&c, d)| c * exact::big_to_f64(d))
            .sum()
    })
}

/// Outcome of the set-average flip-flop search.
#[derive(Clone, Debug, Serialize)]
pub enum SaffOutcome {
    /// No violating pair within the search bounds.
    Satisfied {
        distinct_rows: usize,
        multiplicity_cap: usize,
        pairs_checked: u64,
    },
    /// Multisets `(row index, copies)` with `avg(T, j) > avg(S, j)` for
    /// every column `j`.
    Counterexample {
        s: Vec<(usize, usize)>,
        t: Vec<(usize, usize)>,
    },
}

/// Searches for a violation of the set-average flip-flop property: a pair
/// of disjoint nonempty row multisets `(S, T)` such that the T-average
/// strictly exceeds the S-average in every column.
///
/// Identical rows are collapsed first; each collapsed row contributes up to
/// `min(count, 3)` copies, all on one side. Comparisons are exact
/// (cross-multiplied big integers). The search is exponential in the number
/// of distinct rows, hence the size cap.
pub fn saff_check(rows: &[Vec<BigInt>], size_cap: usize) -> Result<SaffOutcome> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let n_cols = rows[0].len();
    if rows.iter().any(|r| r.len() != n_cols) {
        return Err(Error::InvalidParameter("ragged matrix".into()));
    }
    if rows.iter().flatten().any(|v| v.is_negative()) {
        return Err(Error::InvalidParameter(
            "the flip-flop property is defined for nonnegative matrices".into(),
        ));
    }

    // collapse identical rows, remembering a representative index and count
    let mut reps: Vec<(usize, usize)> = Vec::new(); // (first index, count)
    let mut seen: std::collections::HashMap<&[BigInt], usize> = std::collections::HashMap::new();
    for (i, row) in rows.iter().enumerate() {
        match seen.get(row.as_slice()) {
            Some(&slot) => reps[slot].1 += 1,
            None => {
                seen.insert(row.as_slice(), reps.len());
                reps.push((i, 1));
            }
        }
    }
    let k = reps.len();
    if k > size_cap {
        return Err(Error::SizeCap {
            op: "saff_check",
            size: k,
            cap: size_cap,
        });
    }
    let caps: Vec<usize> = reps
        .iter()
        .map(|&(_, count)| count.min(SAFF_MULTIPLICITY_CAP))
        .collect();

    // options per collapsed row: unused | in S with 1..=cap | in T with 1..=cap
    let options: Vec<usize> = caps.iter().map(|&c| 1 + 2 * c).collect();
    let total: u64 = options.iter().map(|&o| o as u64).product();
    // the row cap alone does not bound the multiset enumeration
    const MAX_ASSIGNMENTS: u64 = 20_000_000;
    if total > MAX_ASSIGNMENTS {
        return Err(Error::SizeCap {
            op: "saff_check assignment enumeration",
            size: total as usize,
            cap: MAX_ASSIGNMENTS as usize,
        });
    }

    let first_opts = options[0];
    let chunk_results = par::map_indexed(first_opts, |first_choice| {
        let mut assignment = vec![0usize; k];
        assignment[0] = first_choice;
        search_assignments(rows, &reps, &caps, &options, &mut assignment, 1, n_cols)
    });
    if let Some(found) = chunk_results.into_iter().flatten().next() {
        return Ok(SaffOutcome::Counterexample {
            s: found.0,
            t: found.1,
        });
    }
    Ok(SaffOutcome::Satisfied {
        distinct_rows: k,
        multiplicity_cap: SAFF_MULTIPLICITY_CAP,
        pairs_checked: total,
    })
}

type Multiset = Vec<(usize, usize)>;

fn search_assignments(
    rows: &[Vec<BigInt>],
    reps: &[(usize, usize)],
    caps: &[usize],
    options: &[usize],
    assignment: &mut Vec<usize>,
    depth: usize,
    n_cols: usize,
) -> Option<(Multiset, Multiset)> {
    if depth == reps.len() {
        return evaluate_assignment(rows, reps, caps, assignment, n_cols);
    }
    for choice in 0..options[depth] {
        assignment[depth] = choice;
        if let Some(hit) =
            search_assignments(rows, reps, caps, options, assignment, depth + 1, n_cols)
        {
            return Some(hit);
        }
    }
    None
}

/// Decodes an assignment (0 = unused, 1..=cap = S copies, cap+1..=2cap = T
/// copies) and tests the strict all-columns violation exactly.
fn evaluate_assignment(
    rows: &[Vec<BigInt>],
    reps: &[(usize, usize)],
    caps: &[usize],
    assignment: &[usize],
    n_cols: usize,
) -> Option<(Multiset, Multiset)> {
    let mut s: Multiset = Vec::new();
    let mut t: Multiset = Vec::new();
    let mut s_size = 0u64;
    let mut t_size = 0u64;
    for (idx, &choice) in assignment.iter().enumerate() {
        let cap = caps[idx];
        if choice == 0 {
            continue;
        } else if choice <= cap {
            s.push((reps[idx].0, choice));
            s_size += choice as u64;
        } else {
            let copies = choice - cap;
            t.push((reps[idx].0, copies));
            t_size += copies as u64;
        }
    }
    if s.is_empty() || t.is_empty() {
        return None;
    }
    for j in 0..n_cols {
        let sum_s: BigInt = s
            .iter()
            .map(|&(row, copies)| &rows[row][j] * BigInt::from(copies))
            .sum();
        let sum_t: BigInt = t
            .iter()
            .map(|&(row, copies)| &rows[row][j] * BigInt::from(copies))
            .sum();
        // need avg_T > avg_S strictly in every column
        if sum_t * BigInt::from(s_size) <= sum_s * BigInt::from(t_size) {
            return None;
        }
    }
    Some((s, t))
}

/// Expands a collapsed-row counterexample into an explicit matrix plus
/// plain index sets, ready for [`farkas_refutation`].
pub fn expand_counterexample(
    rows: &[Vec<BigInt>],
    s: &[(usize, usize)],
    t: &[(usize, usize)],
) -> (Vec<Vec<BigInt>>, Vec<usize>, Vec<usize>) {
    let mut matrix = Vec::new();
    let mut s_idx = Vec::new();
    let mut t_idx = Vec::new();
    for &(row, copies) in s {
        for _ in 0..copies {
            s_idx.push(matrix.len());
            matrix.push(rows[row].clone());
        }
    }
    for &(row, copies) in t {
        for _ in 0..copies {
            t_idx.push(matrix.len());
            matrix.push(rows[row].clone());
        }
    }
    (matrix, s_idx, t_idx)
}

/// Builds the Farkas refutation vector for disjoint row sets with
/// `avg(M(T, j)) < avg(M(S, j))` strictly in every column:
/// `delta = min_j (avg(S,j) - avg(T,j)) / avg(T,j)` and
/// `y = (1/|S|) 1_S - ((1+delta)/|T|) 1_T`, which satisfies `y'M >= 0`
/// componentwise and `y'e = -delta < 0`.
pub fn farkas_refutation(
    rows: &[Vec<BigInt>],
    s: &[usize],
    t: &[usize],
) -> Result<FarkasRefutation> {
    if s.is_empty() || t.is_empty() {
        return Err(Error::Precondition("S and T must be nonempty".into()));
    }
    if s.iter().any(|i| t.contains(i)) {
        return Err(Error::Precondition("S and T must be disjoint".into()));
    }
    let n_rows = rows.len();
    if s.iter().chain(t).any(|&i| i >= n_rows) {
        return Err(Error::InvalidParameter("row index out of range".into()));
    }
    let n_cols = rows[0].len();
    let avg = |set: &[usize], j: usize| -> BigRational {
        let sum: BigInt = set.iter().map(|&i| rows[i][j].clone()).sum();
        BigRational::new(sum, BigInt::from(set.len()))
    };
    let mut delta: Option<BigRational> = None;
    for j in 0..n_cols {
        let avg_s = avg(s, j);
        let avg_t = avg(t, j);
        if avg_t <= BigRational::zero() {
            return Err(Error::Precondition(format!(
                "column {j}: the T-average must be positive"
            )));
        }
        if avg_t >= avg_s {
            return Err(Error::Precondition(format!(
                "column {j}: avg(T) must be strictly below avg(S)"
            )));
        }
        let candidate = (&avg_s - &avg_t) / &avg_t;
        delta = Some(match delta {
            None => candidate,
            Some(d) => d.min(candidate),
        });
    }
    let delta = delta.expect("at least one column");

    // assemble y and verify y'M >= 0 exactly
    let one = BigRational::from(BigInt::from(1));
    let y_s = &one / BigRational::from(BigInt::from(s.len()));
    let y_t = -(&one + &delta) / BigRational::from(BigInt::from(t.len()));
    let mut y_exact = vec![BigRational::zero(); n_rows];
    for &i in s {
        y_exact[i] = y_s.clone();
    }
    for &i in t {
        y_exact[i] = y_t.clone();
    }
    for j in 0..n_cols {
        let dot: BigRational = (0..n_rows)
            .map(|i| &y_exact[i] * BigRational::from(rows[i][j].clone()))
            .sum();
        if dot < BigRational::zero() {
            return Err(Error::ResidualCheck {
                what: "farkas y'M component",
                residual: exact::ratio_to_f64(&dot),
                tolerance: 0.0,
            });
        }
    }
    Ok(FarkasRefutation {
        s: s.to_vec(),
        t: t.to_vec(),
        delta: exact::ratio_to_f64(&delta),
        y: y_exact.iter().map(exact::ratio_to_f64).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big_rows(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn p3_reduced_is_not_entropic() {
        let g = graph::path_graph(3).unwrap();
        let report = certify_collision(&g, None, WalkMode::Reduced).unwrap();
        assert_eq!(report.verdict, Verdict::InfeasibleNotEntropic);
        assert!(!report.system_consistent);
        assert!(!report.lp_feasible);
    }

    #[test]
    fn p3_single_class_is_certified() {
        let g = graph::path_graph(3).unwrap();
        // class 0 holds the two endpoints: the one-row system x = 1
        let report = certify_collision(&g, Some(&[0]), WalkMode::Reduced).unwrap();
        assert_eq!(report.verdict, Verdict::Certified);
        let cert = report.certificate.unwrap();
        assert!((cert.margin - 1.0).abs() < 1e-9);
    }

    #[test]
    fn p3_lp_mode_zero_margin_is_inconclusive() {
        let g = graph::path_graph(3).unwrap();
        let report = certify_collision(&g, None, WalkMode::Lp).unwrap();
        assert_eq!(report.verdict, Verdict::Inconclusive);
        assert!(report.system_consistent);
        assert!(report.lp_feasible);
        assert!(report.margin.unwrap().abs() < 1e-9);
    }

    #[test]
    fn walk_regular_lp_mode_is_certified() {
        let g = graph::cycle_graph(4).unwrap();
        let report = certify_collision(&g, None, WalkMode::Lp).unwrap();
        assert_eq!(report.verdict, Verdict::Certified);
    }

    #[test]
    fn spider_torus_is_certified() {
        let g = graph::spider_torus(4, 2, 5, 3).unwrap();
        let report = certify_collision(&g, None, WalkMode::Lp).unwrap();
        assert_eq!(report.verdict, Verdict::Certified, "{:?}", report.note);
        let cert = report.certificate.unwrap();
        assert!(cert.margin > 1e-9);
        assert!(cert.exact_spread < EXACT_SPREAD_TOL);
        assert_eq!(cert.classes, vec![0, 1, 2]);
    }

    #[test]
    fn invalid_class_selection_errors() {
        let g = graph::path_graph(3).unwrap();
        assert!(certify_collision(&g, Some(&[7]), WalkMode::Reduced).is_err());
        assert!(certify_collision(&g, Some(&[]), WalkMode::Reduced).is_err());
    }

    #[test]
    fn coefficients_for_walk_regular_graph() {
        let g = graph::cycle_graph(4).unwrap();
        let report = certify_collision(&g, None, WalkMode::Lp).unwrap();
        let cert = report.certificate.unwrap();
        for big_k in [5usize, 9] {
            let coeffs = construct_ppsc_coefficients(&g, &cert, big_k).unwrap();
            assert_eq!(coeffs.len(), big_k + 1);
            assert!(coeffs.iter().all(|&c| c > 0.0));
            let diag = truncated_series_diag_exact(&g, &coeffs);
            let gap = crate::spectral::constant_diagonal_gap(&diag);
            assert!(gap < 1e-12, "K={big_k} gap={gap}");
        }
    }

    #[test]
    fn coefficients_for_kks45_certificate() {
        let g = graph::kks_graph(4, 5).unwrap();
        let report = certify_collision(&g, None, WalkMode::Lp).unwrap();
        assert_eq!(report.verdict, Verdict::Certified);
        let cert = report.certificate.unwrap();
        let coeffs = construct_ppsc_coefficients(&g, &cert, 6 + 24).unwrap();
        assert!(coeffs.iter().all(|&c| c > 0.0));
        let diag = truncated_series_diag_exact(&g, &coeffs);
        assert!(crate::spectral::constant_diagonal_gap(&diag) < 1e-10);
    }

    #[test]
    fn coefficient_truncation_must_cover_min_poly() {
        let g = graph::cycle_graph(4).unwrap();
        let cert = certify_collision(&g, None, WalkMode::Lp)
            .unwrap()
            .certificate
            .unwrap();
        assert!(construct_ppsc_coefficients(&g, &cert, 1).is_err());
    }

    #[test]
    fn saff_two_row_counterexample() {
        let rows = big_rows(&[&[1], &[2]]);
        match saff_check(&rows, SAFF_SIZE_CAP).unwrap() {
            SaffOutcome::Counterexample { s, t } => {
                assert_eq!(s, vec![(0, 1)]);
                assert_eq!(t, vec![(1, 1)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn saff_equal_rows_satisfied() {
        let rows = big_rows(&[&[3, 7], &[3, 7], &[3, 7]]);
        assert!(matches!(
            saff_check(&rows, SAFF_SIZE_CAP).unwrap(),
            SaffOutcome::Satisfied { distinct_rows: 1, .. }
        ));
    }

    #[test]
    fn saff_flip_flop_matrix_satisfied() {
        // columns pull in opposite directions, so no pair violates
        let rows = big_rows(&[&[1, 4], &[4, 1]]);
        assert!(matches!(
            saff_check(&rows, SAFF_SIZE_CAP).unwrap(),
            SaffOutcome::Satisfied { .. }
        ));
    }

    #[test]
    fn saff_size_cap_enforced() {
        let rows: Vec<Vec<BigInt>> = (0..6).map(|i| vec![BigInt::from(i)]).collect();
        assert!(matches!(
            saff_check(&rows, 3),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn farkas_hand_examples() {
        // M = [[1], [2]], S = {1}, T = {0}: delta = 1, y = (-2, 1)
        let rows = big_rows(&[&[1], &[2]]);
        let r = farkas_refutation(&rows, &[1], &[0]).unwrap();
        assert!((r.delta - 1.0).abs() < 1e-15);
        assert!((r.y[0] + 2.0).abs() < 1e-15);
        assert!((r.y[1] - 1.0).abs() < 1e-15);

        // M = [[1,1],[3,2]], S = {1}, T = {0}: delta = 1, y'M = (1, 0)
        let rows = big_rows(&[&[1, 1], &[3, 2]]);
        let r = farkas_refutation(&rows, &[1], &[0]).unwrap();
        assert!((r.delta - 1.0).abs() < 1e-15);
        let dot0 = r.y[0] * 1.0 + r.y[1] * 3.0;
        let dot1 = r.y[0] * 1.0 + r.y[1] * 2.0;
        assert!((dot0 - 1.0).abs() < 1e-12 && dot1.abs() < 1e-12);
        let y_e: f64 = r.y.iter().sum();
        assert!((y_e + r.delta).abs() < 1e-12);
    }

    #[test]
    fn farkas_requires_strictness() {
        let rows = big_rows(&[&[2, 5], &[2, 5]]);
        assert!(farkas_refutation(&rows, &[0], &[1]).is_err());
        let rows = big_rows(&[&[1], &[2]]);
        assert!(farkas_refutation(&rows, &[0], &[1]).is_err()); // wrong orientation
        assert!(farkas_refutation(&rows, &[0], &[0]).is_err()); // overlap
    }

    #[test]
    fn saff_counterexample_yields_valid_refutation() {
        let g = graph::path_graph(3).unwrap();
        let wm = walks::walk_matrix(&g, WalkMode::Reduced).unwrap();
        let rows = wm.rows();
        let SaffOutcome::Counterexample { s, t } = saff_check(&rows, SAFF_SIZE_CAP).unwrap()
        else {
            panic!("P_3 walk matrix must violate the flip-flop property")
        };
        // the violating pair has the larger averages in T; the refutation
        // construction wants them in S
        let (matrix, s_idx, t_idx) = expand_counterexample(&rows, &s, &t);
        let r = farkas_refutation(&matrix, &t_idx, &s_idx).unwrap();
        assert!(r.delta > 0.0);
        // and the corresponding certification must agree: infeasible
        let report = certify_collision(&g, None, WalkMode::Reduced).unwrap();
        assert!(!report.lp_feasible);
    }

    #[test]
    fn spider_torus_walk_matrix_satisfies_saff() {
        let g = graph::spider_torus(4, 2, 5, 3).unwrap();
        let wm = walks::walk_matrix(&g, WalkMode::Lp).unwrap();
        let p = walks::walk_classes(&g).unwrap();
        let (rows, _) = walks::collapsed_rows(&wm, &p);
        // the positive certificate exists, so the property must hold
        assert!(matches!(
            saff_check(&rows, SAFF_SIZE_CAP).unwrap(),
            SaffOutcome::Satisfied { .. }
        ));
    }
}
