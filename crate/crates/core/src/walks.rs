//! Exact walk-count machinery: the walk matrix, the minimal-polynomial
//! degree, and the walk-class partition.
//!
//! Two nodes are in the same walk-class iff `diag(A^l)` agrees at them for
//! every `l`; by Cayley-Hamilton it suffices to compare `l = 0 .. m-1`
//! where `m` is the degree of the minimal polynomial, and since `diag(A^0)`
//! and `diag(A^1)` never distinguish nodes the informative columns are
//! `l = 2 .. m-1`. All comparisons are exact big-integer equality: the
//! counts grow like `lambda_1^l` and floating-point comparison would
//! mis-partition.

use num_bigint::BigInt;
use serde::Serialize;

use crate::graph::Graph;
use crate::{exact, spectral};
use crate::{Error, Result};

/// Column index sets for the walk matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkMode {
    /// `l = 2 ..= m-1`; the default everywhere.
    Reduced,
    /// `l = 2 ..= n-1`, the full textbook walk matrix.
    Full,
    /// `{0} ∪ 2 ..= m-1`; the system the collision certificates solve.
    /// The `l = 1` column is identically zero and is dropped.
    Lp,
}

/// Cost guard for full mode: `n - 2` big-integer matrix powers get slow and
/// enormous beyond this.
pub const FULL_MODE_SIZE_CAP: usize = 200;

/// Exact walk matrix: `columns[k] = diag(A^ells[k])`.
#[derive(Clone, Debug)]
pub struct WalkMatrix {
    pub mode: WalkMode,
    pub min_poly_degree: usize,
    pub ells: Vec<usize>,
    pub columns: Vec<Vec<BigInt>>,
    n: usize,
}

impl WalkMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Row `i` across all columns.
    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.columns.iter().map(|c| c[i].clone()).collect()
    }

    /// All rows, node order.
    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.n).map(|i| self.row(i)).collect()
    }
}

/// Partition of the nodes into walk-classes, ordered by first occurrence.
#[derive(Clone, Debug, Serialize)]
pub struct WalkClassPartition {
    /// node -> class id
    pub class_of: Vec<usize>,
    /// class id -> member nodes (ascending)
    pub classes: Vec<Vec<usize>>,
    /// class id -> smallest member node
    pub representatives: Vec<usize>,
}

impl WalkClassPartition {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.len()).collect()
    }
}

/// Degree of the minimal polynomial as the number of distinct eigenvalues
/// of the symmetric adjacency matrix (floating clustering; the default).
pub fn minimal_poly_degree(g: &Graph) -> Result<usize> {
    Ok(spectral::eigendecompose(g)?.distinct_eigenvalue_count())
}

/// Exact minimal-polynomial degree: the smallest `m` such that
/// `{vec(A^0), ..., vec(A^m)}` is linearly dependent over the rationals.
pub fn minimal_poly_degree_exact(g: &Graph) -> Result<usize> {
    Ok(exact::minimal_polynomial(g)?.len())
}

fn ells_for_mode(mode: WalkMode, m: usize, n: usize) -> Vec<usize> {
    match mode {
        WalkMode::Reduced => (2..m).collect(),
        WalkMode::Full => (2..n).collect(),
        WalkMode::Lp => std::iter::once(0).chain(2..m).collect(),
    }
}

/// Exact walk matrix of `g` in the given mode.
pub fn walk_matrix(g: &Graph, mode: WalkMode) -> Result<WalkMatrix> {
    walk_matrix_with_override(g, mode, false)
}

/// As [`walk_matrix`], with `force` lifting the full-mode size cap.
pub fn walk_matrix_with_override(g: &Graph, mode: WalkMode, force: bool) -> Result<WalkMatrix> {
    if mode == WalkMode::Full && g.n() > FULL_MODE_SIZE_CAP && !force {
        return Err(Error::SizeCap {
            op: "walk_matrix(full)",
            size: g.n(),
            cap: FULL_MODE_SIZE_CAP,
        });
    }
    let m = minimal_poly_degree(g)?;
    let ells = ells_for_mode(mode, m, g.n());
    let max_ell = ells.iter().copied().max().unwrap_or(0);
    let mut by_ell: Vec<Option<Vec<BigInt>>> = vec![None; max_ell + 1];
    exact::stream_diag_powers(g, max_ell, |ell, diag| {
        if ells.contains(&ell) {
            by_ell[ell] = Some(diag.to_vec());
        }
        true
    });
    let columns = ells
        .iter()
        .map(|&l| by_ell[l].take().expect("column computed"))
        .collect();
    Ok(WalkMatrix {
        mode,
        min_poly_degree: m,
        ells,
        columns,
        n: g.n(),
    })
}

/// Walk-class partition from exact equality of reduced walk-matrix rows.
pub fn walk_classes(g: &Graph) -> Result<WalkClassPartition> {
    let wm = walk_matrix(g, WalkMode::Reduced)?;
    Ok(partition_rows(&wm))
}

/// Partitions the rows of an already computed walk matrix.
pub fn partition_rows(wm: &WalkMatrix) -> WalkClassPartition {
    let n = wm.n();
    let mut keys: std::collections::HashMap<Vec<BigInt>, usize> = std::collections::HashMap::new();
    let mut class_of = vec![0usize; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let key = wm.row(i);
        let next_id = classes.len();
        let id = *keys.entry(key).or_insert(next_id);
        if id == classes.len() {
            classes.push(Vec::new());
        }
        class_of[i] = id;
        classes[id].push(i);
    }
    let representatives = classes.iter().map(|c| c[0]).collect();
    WalkClassPartition {
        class_of,
        classes,
        representatives,
    }
}

/// True iff the graph has exactly one walk-class. Streams the diagonal
/// powers and stops at the first non-constant column.
pub fn is_walk_regular(g: &Graph) -> Result<bool> {
    let m = minimal_poly_degree(g)?;
    let mut regular = true;
    exact::stream_diag_powers(g, m.saturating_sub(1), |ell, diag| {
        if ell >= 2 && diag.iter().any(|v| v != &diag[0]) {
            regular = false;
            return false;
        }
        true
    });
    Ok(regular)
}

/// Collapses walk-matrix rows to one representative row per class,
/// returning `(rows, class sizes)` in class order.
pub fn collapsed_rows(
    wm: &WalkMatrix,
    partition: &WalkClassPartition,
) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let rows = partition
        .representatives
        .iter()
        .map(|&r| wm.row(r))
        .collect();
    (rows, partition.sizes())
}

/// Exact rational kernel used by tests and the certificate pipeline to
/// cross-check that reduced columns determine the partition: appending the
/// columns `l = m .. n-1` must never split a class.
pub fn partition_is_stable_under_full(g: &Graph) -> Result<bool> {
    let reduced = walk_classes(g)?;
    let full = walk_matrix_with_override(g, WalkMode::Full, true)?;
    let fine = partition_rows(&full);
    Ok(reduced.class_of == fine.class_of)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph;

    #[test]
    fn minimal_poly_degrees() {
        assert_eq!(
            minimal_poly_degree(&graph::complete_graph(3).unwrap()).unwrap(),
            2
        );
        assert_eq!(
            minimal_poly_degree(&graph::path_graph(3).unwrap()).unwrap(),
            3
        );
        assert_eq!(
            minimal_poly_degree(&graph::kks_graph(4, 5).unwrap()).unwrap(),
            6
        );
    }

    #[test]
    fn exact_degree_agrees_with_float() {
        for g in [
            graph::complete_graph(4).unwrap(),
            graph::path_graph(4).unwrap(),
            graph::cycle_graph(6).unwrap(),
            graph::kks_graph(2, 3).unwrap(),
            graph::spider(3, 2).unwrap(),
        ] {
            assert_eq!(
                minimal_poly_degree(&g).unwrap(),
                minimal_poly_degree_exact(&g).unwrap(),
                "{}",
                g.provenance()
            );
        }
    }

    #[test]
    fn walk_matrix_modes() {
        let p3 = graph::path_graph(3).unwrap();
        let wm = walk_matrix(&p3, WalkMode::Reduced).unwrap();
        assert_eq!(wm.ells, vec![2]);
        assert_eq!(
            wm.columns[0],
            vec![BigInt::from(1), BigInt::from(2), BigInt::from(1)]
        );

        let k3 = graph::complete_graph(3).unwrap();
        let wm = walk_matrix(&k3, WalkMode::Reduced).unwrap();
        assert!(wm.ells.is_empty());
        let wm = walk_matrix(&k3, WalkMode::Lp).unwrap();
        assert_eq!(wm.ells, vec![0]);
        assert_eq!(wm.columns[0], vec![BigInt::from(1); 3]);

        let g = graph::kks_graph(4, 5).unwrap();
        let wm = walk_matrix(&g, WalkMode::Reduced).unwrap();
        assert_eq!(wm.ells, vec![2, 3, 4, 5]);
        for i in 0..4 {
            assert_eq!(wm.columns[0][i], BigInt::from(5));
        }
        for i in 4..24 {
            assert_eq!(wm.columns[0][i], BigInt::from(4));
        }
    }

    #[test]
    fn full_mode_size_cap() {
        let g = graph::kks_graph(4, 5).unwrap();
        assert!(walk_matrix(&g, WalkMode::Full).is_ok());
        // the cap triggers only past 200 nodes
        let big = graph::cartesian_product(
            &graph::kks_graph(4, 5).unwrap(),
            &graph::cycle_graph(9).unwrap(),
        );
        assert_eq!(big.n(), 216);
        assert!(matches!(
            walk_matrix(&big, WalkMode::Full),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn classes_of_fixtures() {
        let g = graph::kks_graph(4, 5).unwrap();
        let p = walk_classes(&g).unwrap();
        assert_eq!(p.class_count(), 2);
        assert_eq!(p.sizes(), vec![4, 20]);
        assert!(!is_walk_regular(&g).unwrap());

        for k in [3usize, 5, 8] {
            let c = graph::cycle_graph(k).unwrap();
            assert_eq!(walk_classes(&c).unwrap().class_count(), 1);
            assert!(is_walk_regular(&c).unwrap());
        }
        assert!(is_walk_regular(&graph::complete_graph(4).unwrap()).unwrap());
    }

    #[test]
    fn spider_torus_has_three_classes() {
        let st = graph::spider_torus(4, 2, 5, 3).unwrap();
        let p = walk_classes(&st).unwrap();
        assert_eq!(p.class_count(), 3);
        assert_eq!(p.sizes(), vec![15, 60, 60]);
    }

    #[test]
    fn product_with_cycle_stays_non_walk_regular() {
        let g = graph::kks_graph(4, 5).unwrap();
        let prod = graph::cartesian_product(&g, &graph::cycle_graph(5).unwrap());
        assert!(!is_walk_regular(&prod).unwrap());
    }

    #[test]
    fn refinement_stabilizes_at_reduced_columns() {
        for g in [
            graph::path_graph(4).unwrap(),
            graph::kks_graph(2, 3).unwrap(),
            graph::spider(3, 2).unwrap(),
            graph::cycle_graph(6).unwrap(),
            graph::kks_graph(4, 5).unwrap(),
            graph::spider_cycle(4, 2, 3).unwrap(),
        ] {
            assert!(
                partition_is_stable_under_full(&g).unwrap(),
                "{}",
                g.provenance()
            );
        }
    }

    #[test]
    fn same_class_means_same_f_diag() {
        use crate::spectral::{f_diag, PpscFunction};
        let g = graph::spider_torus(4, 2, 5, 3).unwrap();
        let p = walk_classes(&g).unwrap();
        for f in [PpscFunction::Exp, PpscFunction::resolvent(0.05).unwrap()] {
            for beta in [0.3, 1.1] {
                let d = f_diag(&g, &f, beta).unwrap();
                for class in &p.classes {
                    let rep = d[class[0]];
                    for &i in class {
                        assert!(
                            (d[i] - rep).abs() <= 1e-9 * rep.abs(),
                            "class member deviates"
                        );
                    }
                }
            }
        }
    }
}
