//! Direct solution of the assembled tridiagonal systems.
//!
//! The production path is the Thomas algorithm without pivoting; under the
//! monotonicity hypotheses the matrix is an M-matrix and elimination is
//! unconditionally stable, and a near-zero-pivot guard catches misuse
//! outside them. A dense Gaussian elimination with partial pivoting is
//! provided as the independent reference route for verification.

use crate::error::{Error, Result};
use crate::mesh::ShishkinMesh;
use crate::scheme::{SchemeKind, TridiagonalSystem};

/// Pivot magnitudes below this raise [`Error::SingularSystem`].
const PIVOT_GUARD: f64 = 1e-300;

/// Nodal solution values with provenance.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    values: Vec<f64>,
    mesh: ShishkinMesh,
    epsilon: f64,
    scheme: SchemeKind,
}

impl DiscreteSolution {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn mesh(&self) -> &ShishkinMesh {
        &self.mesh
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn scheme(&self) -> SchemeKind {
        self.scheme
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Thomas forward elimination / back substitution on the full system
/// (identity boundary rows included), so `U_0` and `U_n` come out exactly
/// equal to the boundary values.
pub fn solve(system: &TridiagonalSystem) -> Result<DiscreteSolution> {
    let n = system.n();
    let sub = system.sub();
    let diag = system.diag();
    let sup = system.sup();
    let rhs = system.rhs();

    let mut c = vec![0.0; n + 1];
    let mut d = vec![0.0; n + 1];
    let mut den = diag[0];
    if den.abs() < PIVOT_GUARD {
        return Err(Error::SingularSystem { row: 0, pivot: den });
    }
    c[0] = sup[0] / den;
    d[0] = rhs[0] / den;
    for i in 1..=n {
        den = diag[i] - sub[i] * c[i - 1];
        if den.abs() < PIVOT_GUARD {
            return Err(Error::SingularSystem { row: i, pivot: den });
        }
        if i < n {
            c[i] = sup[i] / den;
        }
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / den;
    }
    let mut values = vec![0.0; n + 1];
    values[n] = d[n];
    for i in (0..n).rev() {
        values[i] = d[i] - c[i] * values[i + 1];
    }

    let solution = DiscreteSolution {
        values,
        mesh: system.mesh().clone(),
        epsilon: system.epsilon(),
        scheme: system.scheme(),
    };
    debug_assert!(
        residual(system, &solution)
            <= 1e-11 * (row_scale(system) * solution.max_abs()).max(f64::MIN_POSITIVE),
        "solve residual exceeds tolerance"
    );
    Ok(solution)
}

/// Largest interior-row coefficient sum `max_i (|p_l| + |p_c| + |p_r|)`.
pub fn row_scale(system: &TridiagonalSystem) -> f64 {
    let n = system.n();
    (1..n)
        .map(|i| {
            let r = system.row(i);
            r.p_l.abs() + r.p_c.abs() + r.p_r.abs()
        })
        .fold(0.0, f64::max)
}

/// Maximum interior-row residual
/// `max_i |p_l U_{i-1} + p_c U_i + p_r U_{i+1} - rhs_i|`.
pub fn residual(system: &TridiagonalSystem, solution: &DiscreteSolution) -> f64 {
    let n = system.n();
    assert_eq!(
        solution.values().len(),
        n + 1,
        "solution length must match the system"
    );
    let u = solution.values();
    let mut worst: f64 = 0.0;
    for i in 1..n {
        let r = system.row(i);
        let res = r.p_l * u[i - 1] + r.p_c * u[i] + r.p_r * u[i + 1] - r.rhs;
        worst = worst.max(res.abs());
    }
    worst
}

/// Dense Gaussian elimination with partial pivoting on the full
/// `(n+1) x (n+1)` matrix. The reference route used by the verification
/// suite; O(n^3), intended for small systems.
pub fn dense_solve(system: &TridiagonalSystem) -> Result<Vec<f64>> {
    let n = system.n() + 1;
    let mut a = vec![vec![0.0f64; n]; n];
    let mut b = system.rhs().to_vec();
    for i in 0..n {
        a[i][i] = system.diag()[i];
        if i > 0 {
            a[i][i - 1] = system.sub()[i];
        }
        if i + 1 < n {
            a[i][i + 1] = system.sup()[i];
        }
    }
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < PIVOT_GUARD {
            return Err(Error::SingularSystem {
                row: col,
                pivot: a[piv][col],
            });
        }
        if piv != col {
            a.swap(piv, col);
            b.swap(piv, col);
        }
        let (pivot_rows, rest) = a.split_at_mut(col + 1);
        let pivot_row = &pivot_rows[col];
        let pivot_b = b[col];
        for (off, row) in rest.iter_mut().enumerate() {
            let factor = row[col] / pivot_row[col];
            if factor != 0.0 {
                for (x, pv) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= factor * pv;
                }
                b[col + 1 + off] -= factor * pivot_b;
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for c in i + 1..n {
            s -= a[i][c] * x[c];
        }
        x[i] = s / a[i][i];
    }
    Ok(x)
}
