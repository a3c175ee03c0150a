//! Discrete operators on the layer-adapted mesh.
//!
//! The hybrid scheme applies the classical central difference operator on
//! the interiors of the two fine layer pieces, where the mesh resolves the
//! layers and central differencing is second order, and the sign-aware
//! midpoint upwind operator on the coarse middle piece and at both
//! transition points, where central differencing would lose either
//! monotonicity or an order of accuracy. Each interior row has the form
//!
//! ```text
//!     p_l U_{i-1} + p_c U_i + p_r U_{i+1} = rhs_i,
//! ```
//!
//! with identity rows carrying the boundary values. Half-node values are
//! arithmetic means of nodal values, `v_{i+1/2} = (v_i + v_{i+1}) / 2`.

use crate::error::{Error, Result};
use crate::mesh::ShishkinMesh;
use crate::problem::{Epsilon, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilKind {
    Central,
    MidpointForward,
    MidpointBackward,
    UpwindForward,
    UpwindBackward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Hybrid,
    Upwind,
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SchemeKind::Hybrid => write!(f, "hybrid"),
            SchemeKind::Upwind => write!(f, "upwind"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StencilRow {
    pub p_l: f64,
    pub p_c: f64,
    pub p_r: f64,
    pub rhs: f64,
    pub kind: StencilKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Upwinding {
    Forward,
    Backward,
}

/// Stencil selection for interior node `i` of the hybrid scheme: central on
/// the fine-piece interiors, midpoint upwind on `[n/4, 3n/4]` with the
/// direction chosen by the sign of `a_i`. A vanishing `a_i` takes the
/// backward branch, keeping assembly deterministic.
pub fn classify(i: usize, n: usize, a_i: f64) -> Result<StencilKind> {
    if i == 0 || i >= n {
        return Err(Error::IndexOutOfRange { index: i, max: n - 1 });
    }
    if i < n / 4 || i > 3 * n / 4 {
        Ok(StencilKind::Central)
    } else if a_i > 0.0 {
        Ok(StencilKind::MidpointForward)
    } else {
        Ok(StencilKind::MidpointBackward)
    }
}

/// Central-difference row:
/// `p_l = eps/(h_i hh_i) - a_i/(2 hh_i)`, `p_r = eps/(h_{i+1} hh_i) + a_i/(2 hh_i)`,
/// `p_c = -p_l - p_r - b_i`, `rhs = f_i`, with `hh_i = (h_i + h_{i+1})/2`.
pub fn central_row(
    i: usize,
    mesh: &ShishkinMesh,
    problem: &ProblemSpec,
    epsilon: Epsilon,
) -> StencilRow {
    let eps = epsilon.get();
    let h_i = mesh.width(i);
    let h_i1 = mesh.width(i + 1);
    let hh = 0.5 * (h_i + h_i1);
    let x = mesh.node(i);
    let a_i = problem.a(x);
    let p_l = eps / (h_i * hh) - a_i / (2.0 * hh);
    let p_r = eps / (h_i1 * hh) + a_i / (2.0 * hh);
    let p_c = -p_l - p_r - problem.b(x);
    StencilRow {
        p_l,
        p_c,
        p_r,
        rhs: problem.f(x),
        kind: StencilKind::Central,
    }
}

/// Midpoint-upwind row. Forward (`a_i > 0`):
/// `p_l = eps/(h_i hh_i)`,
/// `p_r = eps/(h_{i+1} hh_i) + a_{i+1/2}/h_{i+1} - b_{i+1}/2`,
/// `p_c = -p_l - p_r - b_{i+1/2}`, `rhs = f_{i+1/2}`; mirrored for backward.
pub fn midpoint_row(
    i: usize,
    mesh: &ShishkinMesh,
    problem: &ProblemSpec,
    epsilon: Epsilon,
    direction: Upwinding,
) -> StencilRow {
    let eps = epsilon.get();
    let h_i = mesh.width(i);
    let h_i1 = mesh.width(i + 1);
    let hh = 0.5 * (h_i + h_i1);
    let x = mesh.node(i);
    match direction {
        Upwinding::Forward => {
            let xp = mesh.node(i + 1);
            let a_half = 0.5 * (problem.a(x) + problem.a(xp));
            let p_l = eps / (h_i * hh);
            let p_r = eps / (h_i1 * hh) + a_half / h_i1 - problem.b(xp) / 2.0;
            let p_c = -p_l - p_r - 0.5 * (problem.b(x) + problem.b(xp));
            StencilRow {
                p_l,
                p_c,
                p_r,
                rhs: 0.5 * (problem.f(x) + problem.f(xp)),
                kind: StencilKind::MidpointForward,
            }
        }
        Upwinding::Backward => {
            let xm = mesh.node(i - 1);
            let a_half = 0.5 * (problem.a(xm) + problem.a(x));
            let p_l = eps / (h_i * hh) - a_half / h_i - problem.b(xm) / 2.0;
            let p_r = eps / (h_i1 * hh);
            let p_c = -p_l - p_r - 0.5 * (problem.b(xm) + problem.b(x));
            StencilRow {
                p_l,
                p_c,
                p_r,
                rhs: 0.5 * (problem.f(xm) + problem.f(x)),
                kind: StencilKind::MidpointBackward,
            }
        }
    }
}

/// First-order upwind row on the same mesh; the baseline scheme for
/// comparisons. `D+` when `a_i > 0`, `D-` otherwise.
fn upwind_row(
    i: usize,
    mesh: &ShishkinMesh,
    problem: &ProblemSpec,
    epsilon: Epsilon,
) -> StencilRow {
    let eps = epsilon.get();
    let h_i = mesh.width(i);
    let h_i1 = mesh.width(i + 1);
    let hh = 0.5 * (h_i + h_i1);
    let x = mesh.node(i);
    let a_i = problem.a(x);
    let (p_l, p_r, kind) = if a_i > 0.0 {
        (
            eps / (h_i * hh),
            eps / (h_i1 * hh) + a_i / h_i1,
            StencilKind::UpwindForward,
        )
    } else {
        (
            eps / (h_i * hh) - a_i / h_i,
            eps / (h_i1 * hh),
            StencilKind::UpwindBackward,
        )
    };
    let p_c = -p_l - p_r - problem.b(x);
    StencilRow {
        p_l,
        p_c,
        p_r,
        rhs: problem.f(x),
        kind,
    }
}

/// Assembled tridiagonal operator: interior rows 1..n-1 plus identity
/// boundary rows carrying the boundary values.
#[derive(Debug, Clone)]
pub struct TridiagonalSystem {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
    rhs: Vec<f64>,
    kinds: Vec<StencilKind>,
    bc: (f64, f64),
    mesh: ShishkinMesh,
    epsilon: f64,
    scheme: SchemeKind,
}

impl TridiagonalSystem {
    /// Number of mesh intervals (the system has `n + 1` unknowns).
    pub fn n(&self) -> usize {
        self.mesh.n()
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

    pub fn bc(&self) -> (f64, f64) {
        self.bc
    }

    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Interior row `1 <= i <= n-1` as a stencil record.
    pub fn row(&self, i: usize) -> StencilRow {
        StencilRow {
            p_l: self.sub[i],
            p_c: self.diag[i],
            p_r: self.sup[i],
            rhs: self.rhs[i],
            kind: self.kinds[i - 1],
        }
    }

    /// Builds a system from raw diagonals. Row 0 and row `n` must be the
    /// boundary rows. Intended for tests and verification harnesses that
    /// need synthetic operators; assembled systems come from [`assemble`].
    pub fn from_raw(
        sub: Vec<f64>,
        diag: Vec<f64>,
        sup: Vec<f64>,
        rhs: Vec<f64>,
        mesh: ShishkinMesh,
        epsilon: f64,
        scheme: SchemeKind,
    ) -> Result<Self> {
        let n = mesh.n();
        for (name, v) in [("sub", &sub), ("diag", &diag), ("sup", &sup), ("rhs", &rhs)] {
            if v.len() != n + 1 {
                return Err(Error::DimensionMismatch(format!(
                    "{name} length {} != n + 1 = {}",
                    v.len(),
                    n + 1
                )));
            }
        }
        let bc = (rhs[0], rhs[n]);
        Ok(TridiagonalSystem {
            sub,
            diag,
            sup,
            rhs,
            kinds: vec![StencilKind::Central; n - 1],
            bc,
            mesh,
            epsilon,
            scheme,
        })
    }

    /// Replaces the interior loads (used by the verification suites to
    /// probe operator-level inequalities with synthetic data).
    pub fn with_interior_rhs(mut self, g: &[f64], bc: (f64, f64)) -> Result<Self> {
        let n = self.n();
        if g.len() != n - 1 {
            return Err(Error::DimensionMismatch(format!(
                "interior rhs length {} != {}",
                g.len(),
                n - 1
            )));
        }
        self.rhs[1..n].copy_from_slice(g);
        self.rhs[0] = bc.0;
        self.rhs[n] = bc.1;
        self.bc = bc;
        Ok(self)
    }

    /// Applies the full operator to a mesh function: returns
    /// `p_l v_{i-1} + p_c v_i + p_r v_{i+1}` per interior row.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if v.len() != n + 1 {
            return Err(Error::DimensionMismatch(format!(
                "mesh function length {} != {}",
                v.len(),
                n + 1
            )));
        }
        Ok((1..n)
            .map(|i| self.sub[i] * v[i - 1] + self.diag[i] * v[i] + self.sup[i] * v[i + 1])
            .collect())
    }
}

fn assemble_with(
    problem: &ProblemSpec,
    mesh: &ShishkinMesh,
    epsilon: Epsilon,
    scheme: SchemeKind,
) -> TridiagonalSystem {
    let n = mesh.n();
    let (bc_l, bc_r) = problem.bc();
    let mut sub = vec![0.0; n + 1];
    let mut diag = vec![0.0; n + 1];
    let mut sup = vec![0.0; n + 1];
    let mut rhs = vec![0.0; n + 1];
    let mut kinds = Vec::with_capacity(n - 1);

    diag[0] = 1.0;
    rhs[0] = bc_l;
    diag[n] = 1.0;
    rhs[n] = bc_r;

    for i in 1..n {
        let row = match scheme {
            SchemeKind::Hybrid => {
                let kind = classify(i, n, problem.a(mesh.node(i)))
                    .expect("interior index is in range");
                match kind {
                    StencilKind::Central => central_row(i, mesh, problem, epsilon),
                    StencilKind::MidpointForward => {
                        midpoint_row(i, mesh, problem, epsilon, Upwinding::Forward)
                    }
                    StencilKind::MidpointBackward => {
                        midpoint_row(i, mesh, problem, epsilon, Upwinding::Backward)
                    }
                    _ => unreachable!(),
                }
            }
            SchemeKind::Upwind => upwind_row(i, mesh, problem, epsilon),
        };
        sub[i] = row.p_l;
        diag[i] = row.p_c;
        sup[i] = row.p_r;
        rhs[i] = row.rhs;
        kinds.push(row.kind);
    }

    TridiagonalSystem {
        sub,
        diag,
        sup,
        rhs,
        kinds,
        bc: (bc_l, bc_r),
        mesh: mesh.clone(),
        epsilon: epsilon.get(),
        scheme,
    }
}

/// Assembles the hybrid operator. Deterministic: identical inputs produce a
/// bit-identical system.
pub fn assemble(
    problem: &ProblemSpec,
    mesh: &ShishkinMesh,
    epsilon: Epsilon,
) -> TridiagonalSystem {
    assemble_with(problem, mesh, epsilon, SchemeKind::Hybrid)
}

/// Assembles the first-order upwind baseline on the same mesh.
pub fn assemble_upwind(
    problem: &ProblemSpec,
    mesh: &ShishkinMesh,
    epsilon: Epsilon,
) -> TridiagonalSystem {
    assemble_with(problem, mesh, epsilon, SchemeKind::Upwind)
}

/// Diagnostics for the monotonicity hypotheses: the central condition
/// `h ||a|| / (2 eps) < 1` (equivalently `2 tau0 ||a|| < n / ln n`) and the
/// midpoint condition `2 ||b|| / n <= alpha`. Sup-norms are sampled at the
/// mesh nodes. Assembly never refuses to proceed on failure; these are
/// attached to results so a harness can chart where the hypotheses bind.
#[derive(Debug, Clone, Copy)]
pub struct AssumptionReport {
    /// `h ||a|| / (2 eps)`; condition 1 requires this `< 1`.
    pub central_ratio: f64,
    /// `2 tau0_eff ||a||` (the equivalent form's left side).
    pub central_lhs: f64,
    /// `n / ln n` (the equivalent form's right side).
    pub central_rhs: f64,
    pub condition_central: bool,
    /// `2 ||b|| / n`; condition 2 requires this `<= alpha`.
    pub midpoint_lhs: f64,
    pub alpha: f64,
    pub condition_midpoint: bool,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.condition_central && self.condition_midpoint
    }
}

pub fn check_assumptions(
    problem: &ProblemSpec,
    mesh: &ShishkinMesh,
    epsilon: Epsilon,
) -> AssumptionReport {
    let eps = epsilon.get();
    let n = mesh.n();
    let norm_a = mesh
        .nodes()
        .iter()
        .map(|&x| problem.a(x).abs())
        .fold(0.0, f64::max);
    let norm_b = mesh
        .nodes()
        .iter()
        .map(|&x| problem.b(x).abs())
        .fold(0.0, f64::max);
    let h = mesh.fine_width();
    let central_ratio = h * norm_a / (2.0 * eps);
    let tau0_eff = mesh.tau0_effective(eps);
    let central_lhs = 2.0 * tau0_eff * norm_a;
    let central_rhs = n as f64 / (n as f64).ln();
    let midpoint_lhs = 2.0 * norm_b / n as f64;
    AssumptionReport {
        central_ratio,
        central_lhs,
        central_rhs,
        condition_central: central_ratio < 1.0,
        midpoint_lhs,
        alpha: problem.alpha(),
        condition_midpoint: midpoint_lhs <= problem.alpha(),
    }
}

/// Left barrier profile `Phi^L_i = prod_{j<=i} (1 + gamma h_j / eps)^{-1}`,
/// `Phi^L_0 = 1`, for `i = 0..=n`.
pub fn barrier_left(mesh: &ShishkinMesh, gamma: f64, epsilon: f64) -> Vec<f64> {
    let n = mesh.n();
    let mut phi = vec![1.0; n + 1];
    for j in 1..=n {
        phi[j] = phi[j - 1] / (1.0 + gamma * mesh.width(j) / epsilon);
    }
    phi
}

/// Right barrier profile `Phi^R_i = prod_{j>i} (1 + gamma h_j / eps)^{-1}`,
/// `Phi^R_n = 1`, for `i = 0..=n`.
pub fn barrier_right(mesh: &ShishkinMesh, gamma: f64, epsilon: f64) -> Vec<f64> {
    let n = mesh.n();
    let mut phi = vec![1.0; n + 1];
    for j in (0..n).rev() {
        phi[j] = phi[j + 1] / (1.0 + gamma * mesh.width(j + 1) / epsilon);
    }
    phi
}
