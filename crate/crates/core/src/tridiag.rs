//! Tridiagonal systems: Thomas elimination and the M-matrix check used to
//! certify the sweep matrices.

use crate::error::{Error, Result};

/// Pivots smaller than this in magnitude are treated as singular.
pub const PIVOT_FLOOR: f64 = 1e-300;
/// Relative tolerance for the sign and dominance checks, scaled by row max.
pub const DOMINANCE_TOL: f64 = 1e-12;

/// Row `i` reads `lower[i]·x[i-1] + diag[i]·x[i] + upper[i]·x[i+1] = rhs[i]`.
/// `lower[0]` and `upper[n-1]` are unused and kept at zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TridiagonalSystem {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Rows that are identity rows carrying boundary data.
    pub dirichlet_rows: Vec<usize>,
}

impl TridiagonalSystem {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
            rhs: vec![0.0; n],
            dirichlet_rows: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Turns `row` into `x[row] = value`.
    pub fn set_dirichlet(&mut self, row: usize, value: f64) {
        self.lower[row] = 0.0;
        self.upper[row] = 0.0;
        self.diag[row] = 1.0;
        self.rhs[row] = value;
        if !self.dirichlet_rows.contains(&row) {
            self.dirichlet_rows.push(row);
            self.dirichlet_rows.sort_unstable();
        }
    }

    pub fn check_shape(&self) -> Result<()> {
        let n = self.diag.len();
        if n == 0 || self.lower.len() != n || self.upper.len() != n || self.rhs.len() != n {
            return Err(Error::Dimension(format!(
                "tridiagonal arrays have lengths lower {}, diag {}, upper {}, rhs {}",
                self.lower.len(),
                n,
                self.upper.len(),
                self.rhs.len()
            )));
        }
        if let Some(&r) = self.dirichlet_rows.iter().find(|&&r| r >= n) {
            return Err(Error::Dimension(format!(
                "dirichlet row {r} out of range {n}"
            )));
        }
        Ok(())
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// `‖A‖_∞`.
    pub fn norm_inf(&self) -> f64 {
        (0..self.len())
            .map(|i| self.lower[i].abs() + self.diag[i].abs() + self.upper[i].abs())
            .fold(0.0, f64::max)
    }
}

/// Thomas elimination of a fixed matrix, reusable across right-hand sides.
#[derive(Debug, Clone, PartialEq)]
pub struct ThomasFactorization {
    lower: Vec<f64>,
    upper_scaled: Vec<f64>,
    inv_pivot: Vec<f64>,
}

impl ThomasFactorization {
    pub fn new(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        if n == 0 || lower.len() != n || upper.len() != n {
            return Err(Error::Dimension(format!(
                "tridiagonal arrays have lengths lower {}, diag {n}, upper {}",
                lower.len(),
                upper.len()
            )));
        }
        let mut upper_scaled = vec![0.0; n];
        let mut inv_pivot = vec![0.0; n];
        let mut prev = 0.0;
        for i in 0..n {
            let pivot = if i == 0 {
                diag[0]
            } else {
                diag[i] - lower[i] * prev
            };
            if !(pivot.abs() >= PIVOT_FLOOR) {
                return Err(Error::SingularSystem { row: i, pivot });
            }
            let inv = 1.0 / pivot;
            inv_pivot[i] = inv;
            prev = if i + 1 < n { upper[i] * inv } else { 0.0 };
            upper_scaled[i] = prev;
        }
        Ok(Self {
            lower: lower.to_vec(),
            upper_scaled,
            inv_pivot,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Solves in place: `x` holds the right-hand side on entry.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(x.len(), n);
        x[0] *= self.inv_pivot[0];
        for i in 1..n {
            x[i] = (x[i] - self.lower[i] * x[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.upper_scaled[i] * x[i + 1];
        }
    }
}

pub fn thomas_solve(sys: &TridiagonalSystem) -> Result<Vec<f64>> {
    sys.check_shape()?;
    let f = ThomasFactorization::new(&sys.lower, &sys.diag, &sys.upper)?;
    let mut x = sys.rhs.clone();
    f.solve_in_place(&mut x);
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MMatrixViolation {
    NonPositiveDiagonal,
    PositiveOffDiagonal,
    NotDiagonallyDominant,
    NoStrictlyDominantRow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MMatrixReport {
    pub is_m_matrix_after_reduction: bool,
    /// Rows (original numbering) that break a sign or dominance condition.
    pub offending_rows: Vec<usize>,
    pub first_violation: Option<(usize, MMatrixViolation)>,
    /// Whether the first unknown row was folded into its neighbour.
    pub folded_leading_row: bool,
}

/// Checks the M-matrix conditions after removing Dirichlet rows.
///
/// Dirichlet rows and their couplings move to the right-hand side. If the row
/// after a leading Dirichlet row couples to it with a positive coefficient,
/// that row is eliminated into the next one before checking. The remaining
/// rows need a positive diagonal, nonpositive off-diagonals, weak diagonal
/// dominance everywhere and strict dominance somewhere.
pub fn check_m_matrix(sys: &TridiagonalSystem) -> MMatrixReport {
    let n = sys.len();
    let is_dir = |i: usize| sys.dirichlet_rows.contains(&i);
    let mut diag = sys.diag.clone();
    let mut keep: Vec<bool> = (0..n).map(|i| !is_dir(i)).collect();

    let mut folded = false;
    let lead = (0..n).find(|&i| keep[i]);
    if let Some(r1) = lead {
        let r2 = r1 + 1;
        if r1 > 0 && sys.lower[r1] > 0.0 && r2 < n && keep[r2] && sys.diag[r1] > 0.0 {
            diag[r2] -= sys.lower[r2] * sys.upper[r1] / sys.diag[r1];
            keep[r1] = false;
            folded = true;
        }
    }

    let mut offending = Vec::new();
    let mut first = None;
    let mut any_strict = false;
    let mut any_row = false;
    for i in 0..n {
        if !keep[i] {
            continue;
        }
        any_row = true;
        let lo = if i > 0 && keep[i - 1] {
            sys.lower[i]
        } else {
            0.0
        };
        let up = if i + 1 < n && keep[i + 1] {
            sys.upper[i]
        } else {
            0.0
        };
        let d = diag[i];
        let tol = DOMINANCE_TOL * d.abs().max(lo.abs()).max(up.abs());
        let violation = if !(d > tol) {
            Some(MMatrixViolation::NonPositiveDiagonal)
        } else if lo > tol || up > tol {
            Some(MMatrixViolation::PositiveOffDiagonal)
        } else if d < lo.abs() + up.abs() - tol {
            Some(MMatrixViolation::NotDiagonallyDominant)
        } else {
            None
        };
        match violation {
            Some(v) => {
                offending.push(i);
                if first.is_none() {
                    first = Some((i, v));
                }
            }
            None => {
                if d > lo.abs() + up.abs() + tol {
                    any_strict = true;
                }
            }
        }
    }
    if any_row && first.is_none() && !any_strict {
        first = Some((0, MMatrixViolation::NoStrictlyDominantRow));
    }
    MMatrixReport {
        is_m_matrix_after_reduction: first.is_none(),
        offending_rows: offending,
        first_violation: first,
        folded_leading_row: folded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> TridiagonalSystem {
        TridiagonalSystem {
            lower: lower.to_vec(),
            diag: diag.to_vec(),
            upper: upper.to_vec(),
            rhs: rhs.to_vec(),
            dirichlet_rows: Vec::new(),
        }
    }

    #[test]
    fn identity_returns_rhs() {
        let s = sys(&[0.0; 4], &[1.0; 4], &[0.0; 4], &[3.0, -1.0, 2.5, 7.0]);
        assert_eq!(thomas_solve(&s).unwrap(), vec![3.0, -1.0, 2.5, 7.0]);
        assert!(check_m_matrix(&s).is_m_matrix_after_reduction);
    }

    #[test]
    fn symmetric_two_by_two() {
        let s = sys(&[0.0, 1.0], &[2.0, 2.0], &[1.0, 0.0], &[3.0, 3.0]);
        let x = thomas_solve(&s).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_pivot_is_reported() {
        let s = sys(&[0.0, 1.0], &[1.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]);
        assert!(matches!(
            thomas_solve(&s),
            Err(Error::SingularSystem { row: 1, .. })
        ));
        let z = sys(&[0.0], &[0.0], &[0.0], &[1.0]);
        assert!(matches!(
            thomas_solve(&z),
            Err(Error::SingularSystem { row: 0, .. })
        ));
    }

    #[test]
    fn shape_errors() {
        let s = sys(&[0.0], &[1.0, 1.0], &[0.0, 0.0], &[1.0, 1.0]);
        assert!(matches!(thomas_solve(&s), Err(Error::Dimension(_))));
    }

    #[test]
    fn positive_off_diagonal_fails() {
        let s = sys(&[0.0, 0.0], &[1.0, 1.0], &[0.5, 0.0], &[0.0, 0.0]);
        let rep = check_m_matrix(&s);
        assert!(!rep.is_m_matrix_after_reduction);
        assert_eq!(rep.offending_rows, vec![0]);
        assert_eq!(
            rep.first_violation,
            Some((0, MMatrixViolation::PositiveOffDiagonal))
        );
    }

    #[test]
    fn dirichlet_coupling_is_removed() {
        // row 1 couples positively to the boundary row; after reduction it is fine
        let mut s = sys(
            &[0.0, 0.3, -1.0, -1.0],
            &[1.0, 3.0, 3.0, 1.0],
            &[0.0, -1.0, -1.0, 0.0],
            &[0.0; 4],
        );
        s.set_dirichlet(0, 1.0);
        s.set_dirichlet(3, 2.0);
        let rep = check_m_matrix(&s);
        assert!(rep.is_m_matrix_after_reduction, "{rep:?}");
        assert!(rep.folded_leading_row);
    }

    #[test]
    fn weak_dominance_without_strict_row_fails() {
        let s = sys(
            &[0.0, -1.0, -1.0],
            &[1.0, 2.0, 1.0],
            &[-1.0, -1.0, 0.0],
            &[0.0; 3],
        );
        let rep = check_m_matrix(&s);
        assert_eq!(
            rep.first_violation,
            Some((0, MMatrixViolation::NoStrictlyDominantRow))
        );
    }

    #[test]
    fn factorization_reuse_matches_single_solve() {
        let s = sys(
            &[0.0, -1.0, -0.5, -2.0],
            &[4.0, 3.0, 5.0, 6.0],
            &[-1.0, -1.0, -1.0, 0.0],
            &[1.0, 2.0, 3.0, 4.0],
        );
        let f = ThomasFactorization::new(&s.lower, &s.diag, &s.upper).unwrap();
        let mut x = s.rhs.clone();
        f.solve_in_place(&mut x);
        assert_eq!(x, thomas_solve(&s).unwrap());
        let r = s.mul_vec(&x);
        for (a, b) in r.iter().zip(&s.rhs) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
