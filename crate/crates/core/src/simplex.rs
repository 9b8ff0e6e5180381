//! Two-phase dense simplex with Bland's rule, specialized to the margin
//! maximization problem behind the collision certificates:
//!
//! ```text
//! max t   s.t.   W x = e,   x >= t * 1,   0 <= x <= U,   t >= 0
//! ```
//!
//! `W` arrives column-normalized, so all coefficients are O(1) except the
//! box bound `U`. Bland's rule keeps the iteration cycle-free; the caller
//! re-validates any reported optimum against exact integer data, so the
//! solver itself only needs to be honest about feasibility within its
//! tolerances.

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const PHASE1_FEAS_TOL: f64 = 1e-8;
const MAX_PIVOTS: usize = 20_000;

use crate::{Error, Result};

/// Result of the margin LP.
#[derive(Clone, Debug)]
pub enum LpOutcome {
    /// No `x` with `W x = e`, `0 <= x <= U` exists (within tolerance).
    Infeasible { phase1_objective: f64 },
    /// Best margin `t_star = max min_l x_l` and an attaining solution.
    Optimal {
        t_star: f64,
        x: Vec<f64>,
        residual: f64,
    },
}

/// Solves `max t` subject to `rows * x = 1`, `x >= t`, `0 <= x <= upper`.
pub fn max_margin_lp(rows: &[Vec<f64>], upper: f64) -> Result<LpOutcome> {
    let r = rows.len();
    if r == 0 {
        return Err(Error::InvalidParameter("empty constraint system".into()));
    }
    let c = rows[0].len();
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::InvalidParameter("ragged constraint rows".into()));
    }
    if c == 0 {
        // sum over no columns can never equal one
        return Ok(LpOutcome::Infeasible {
            phase1_objective: r as f64,
        });
    }

    // variables: x (c) | t (1) | surplus s (c) | slack u (c) | artificials (r)
    let n_struct = 3 * c + 1;
    let n_total = n_struct + r;
    let m = r + 2 * c;
    let t_var = c;

    let mut tab = vec![vec![0.0f64; n_total + 1]; m];
    let mut basis = vec![0usize; m];

    for (i, row) in rows.iter().enumerate() {
        for (l, &w) in row.iter().enumerate() {
            tab[i][l] = w;
        }
        tab[i][n_struct + i] = 1.0; // artificial
        tab[i][n_total] = 1.0;
        basis[i] = n_struct + i;
    }
    for l in 0..c {
        // -x_l + t + s_l = 0
        let i = r + l;
        tab[i][l] = -1.0;
        tab[i][t_var] = 1.0;
        tab[i][t_var + 1 + l] = 1.0;
        tab[i][n_total] = 0.0;
        basis[i] = t_var + 1 + l;
    }
    for l in 0..c {
        // x_l + u_l = U
        let i = r + c + l;
        tab[i][l] = 1.0;
        tab[i][t_var + 1 + c + l] = 1.0;
        tab[i][n_total] = upper;
        basis[i] = t_var + 1 + c + l;
    }

    // phase 1: maximize -(sum of artificials)
    let mut cost = vec![0.0f64; n_total];
    for j in n_struct..n_total {
        cost[j] = -1.0;
    }
    run_simplex(&mut tab, &mut basis, &cost, n_total)?;
    let phase1_objective = -objective_value(&tab, &basis, &cost, n_total);
    if phase1_objective > PHASE1_FEAS_TOL {
        return Ok(LpOutcome::Infeasible { phase1_objective });
    }
    // drive artificials out of the basis where possible
    for i in 0..m {
        if basis[i] >= n_struct {
            if let Some(j) = (0..n_struct).find(|&j| tab[i][j].abs() > PIVOT_TOL) {
                pivot(&mut tab, &mut basis, i, j);
            }
            // a row with no structural coefficient is redundant and stays
            // parked at zero; it can never be chosen as a pivot row again
        }
    }

    // phase 2: maximize t, artificials barred from entering
    let mut cost = vec![0.0f64; n_total];
    cost[t_var] = 1.0;
    run_simplex_limited(&mut tab, &mut basis, &cost, n_struct, n_total)?;

    let mut x = vec![0.0f64; c];
    let mut t_star = 0.0;
    for i in 0..m {
        if basis[i] < c {
            x[basis[i]] = tab[i][n_total];
        } else if basis[i] == t_var {
            t_star = tab[i][n_total];
        }
    }
    let mut residual = 0.0f64;
    for row in rows {
        let lhs: f64 = row.iter().zip(&x).map(|(w, xv)| w * xv).sum();
        residual = residual.max((lhs - 1.0).abs());
    }
    Ok(LpOutcome::Optimal {
        t_star,
        x,
        residual,
    })
}

fn objective_value(tab: &[Vec<f64>], basis: &[usize], cost: &[f64], n_total: usize) -> f64 {
    basis
        .iter()
        .enumerate()
        .map(|(i, &b)| cost[b] * tab[i][n_total])
        .sum()
}

fn run_simplex(
    tab: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    n_total: usize,
) -> Result<()> {
    run_simplex_limited(tab, basis, cost, n_total, n_total)
}

/// Simplex iterations with entering variables restricted to `0..n_enter`.
fn run_simplex_limited(
    tab: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    n_enter: usize,
    n_total: usize,
) -> Result<()> {
    let m = tab.len();
    for _ in 0..MAX_PIVOTS {
        // reduced costs z_j - c_j; Bland: smallest improving index enters
        let mut entering = None;
        for j in 0..n_enter {
            if basis.contains(&j) {
                continue;
            }
            let z_j: f64 = (0..m).map(|i| cost[basis[i]] * tab[i][j]).sum();
            if z_j - cost[j] < -COST_TOL {
                entering = Some(j);
                break;
            }
        }
        let Some(j) = entering else {
            return Ok(());
        };
        // ratio test, ties broken by smallest basic variable index
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if tab[i][j] > PIVOT_TOL {
                let ratio = tab[i][n_total] / tab[i][j];
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-12
                            || ((ratio - lr).abs() <= 1e-12 && basis[i] < basis[li])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((i, _)) = leave else {
            return Err(Error::Precondition(
                "LP unbounded despite box constraints".into(),
            ));
        };
        pivot(tab, basis, i, j);
    }
    Err(Error::Precondition("simplex pivot cap exceeded".into()))
}

fn pivot(tab: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let m = tab.len();
    let width = tab[row].len();
    let p = tab[row][col];
    for v in tab[row].iter_mut() {
        *v /= p;
    }
    for i in 0..m {
        if i != row {
            let f = tab[i][col];
            if f != 0.0 {
                for jj in 0..width {
                    let delta = f * tab[row][jj];
                    tab[i][jj] -= delta;
                }
            }
        }
    }
    basis[row] = col;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(rows: &[&[f64]]) -> LpOutcome {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        max_margin_lp(&rows, 1e3).unwrap()
    }

    #[test]
    fn single_variable() {
        match solve(&[&[1.0]]) {
            LpOutcome::Optimal { t_star, x, .. } => {
                assert!((t_star - 1.0).abs() < 1e-9);
                assert!((x[0] - 1.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn symmetric_two_by_two() {
        // x1 + 2x2 = 1, 2x1 + x2 = 1 -> x = (1/3, 1/3), margin 1/3
        match solve(&[&[1.0, 2.0], &[2.0, 1.0]]) {
            LpOutcome::Optimal { t_star, x, .. } => {
                assert!((t_star - 1.0 / 3.0).abs() < 1e-9);
                assert!((x[0] - 1.0 / 3.0).abs() < 1e-9);
                assert!((x[1] - 1.0 / 3.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_margin_detected() {
        // x0 + x2 = 1, x0 + 2x2 = 1 forces x2 = 0
        match solve(&[&[1.0, 1.0], &[1.0, 2.0]]) {
            LpOutcome::Optimal { t_star, x, residual } => {
                assert!(t_star.abs() < 1e-9, "t* = {t_star}");
                assert!((x[0] - 1.0).abs() < 1e-9);
                assert!(x[1].abs() < 1e-9);
                assert!(residual < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inconsistent_rows_infeasible() {
        match solve(&[&[0.5], &[1.0]]) {
            LpOutcome::Infeasible { phase1_objective } => {
                assert!(phase1_objective > 1e-3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_column_hits_box() {
        // second variable is unconstrained by the equalities; the margin is
        // capped by the first
        match solve(&[&[1.0, 0.0]]) {
            LpOutcome::Optimal { t_star, x, .. } => {
                assert!((t_star - 1.0).abs() < 1e-9);
                assert!((x[0] - 1.0).abs() < 1e-9);
                assert!(x[1] >= t_star - 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_column_set_is_infeasible() {
        let rows: Vec<Vec<f64>> = vec![vec![]];
        assert!(matches!(
            max_margin_lp(&rows, 1e3).unwrap(),
            LpOutcome::Infeasible { .. }
        ));
    }

    #[test]
    fn negative_only_solutions_are_lp_infeasible() {
        // x1 + 2x2 = 1, 2x1 + 3x2 = 1 has the unique solution (-1, 1)
        match solve(&[&[1.0, 2.0], &[2.0, 3.0]]) {
            LpOutcome::Infeasible { .. } => {}
            other => panic!("{other:?}"),
        }
    }
}
