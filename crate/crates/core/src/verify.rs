//! Operator-level verification suites: M-matrix sign pattern, discrete
//! minimum principle, uniform stability, barrier inequalities, and
//! agreement between the tridiagonal and dense solution routes.
//!
//! Each check sweeps a grid of (epsilon, n) cells and reports the worst
//! margin found together with the offending cell, so a failing inequality
//! can be located precisely. Cells whose monotonicity hypotheses fail are
//! flagged and skipped by the hypothesis-conditional checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::mesh::{build_mesh, MeshConfig};
use crate::problem::{Epsilon, ProblemSpec};
use crate::scheme::{
    assemble, barrier_left, barrier_right, check_assumptions, TridiagonalSystem,
};
use crate::solver::{dense_solve, solve};

/// Tolerances for the behavioral checks, relative to the indicated scales.
pub const MIN_PRINCIPLE_TOL: f64 = 1e-12;
pub const STABILITY_TOL: f64 = 1e-10;
pub const BARRIER_TOL: f64 = 1e-12;
pub const ORACLE_TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub epsilons: Vec<f64>,
    pub ns: Vec<usize>,
    pub tau0: f64,
    /// Random right-hand sides drawn per cell for the behavioral checks.
    pub rhs_draws: usize,
    pub seed: u64,
    /// Barrier decay rate as a fraction of alpha (gamma = fraction * alpha).
    pub gamma_fraction: f64,
}

impl VerifyConfig {
    pub fn new(epsilons: Vec<f64>, ns: Vec<usize>, tau0: f64) -> Self {
        VerifyConfig {
            epsilons,
            ns,
            tau0,
            rhs_draws: 100,
            seed: 0x5eed,
            gamma_fraction: 0.25,
        }
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst margin observed; positive margins are violations and fail the
    /// check once they exceed its tolerance.
    pub worst: f64,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    /// Cells where the monotonicity hypotheses fail, with the failing
    /// condition; informational unless strict mode is requested.
    pub assumption_flags: Vec<String>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Cell {
    epsilon: f64,
    n: usize,
    system: TridiagonalSystem,
    assumptions_pass: bool,
}

fn cells(problem: &ProblemSpec, cfg: &VerifyConfig) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    for &epsilon in &cfg.epsilons {
        for &n in &cfg.ns {
            let eps = Epsilon::new(epsilon)?;
            let mesh = build_mesh(MeshConfig::new(n, eps, problem.domain()).with_tau0(cfg.tau0))?;
            let report = check_assumptions(problem, &mesh, eps);
            out.push(Cell {
                epsilon,
                n,
                system: assemble(problem, &mesh, eps),
                assumptions_pass: report.passed(),
            });
        }
    }
    Ok(out)
}

/// Sign conditions `p_l > 0`, `p_r > 0`, `p_l + p_c + p_r < 0` on every
/// interior row, on cells whose hypotheses hold. The reported margin is the
/// most negative of `(min(p_l, p_r), -(row sum))`, normalized by row scale;
/// positive margins are violations.
fn check_m_matrix(cells: &[Cell]) -> CheckResult {
    let mut worst = f64::NEG_INFINITY;
    let mut detail = String::from("all rows satisfy the sign pattern");
    let mut passed = true;
    for cell in cells.iter().filter(|c| c.assumptions_pass) {
        let n = cell.n;
        for i in 1..n {
            let r = cell.system.row(i);
            let scale = r.p_l.abs() + r.p_c.abs() + r.p_r.abs();
            // violation size: how far the worst sign condition is from holding
            let v = [-r.p_l, -r.p_r, r.p_l + r.p_c + r.p_r]
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max)
                / scale;
            if v > worst {
                worst = v;
                if v >= 0.0 {
                    passed = false;
                    detail = format!(
                        "row {i} of (eps={:.1e}, n={n}) violates the sign pattern: \
                         p_l={:.6e}, p_c={:.6e}, p_r={:.6e}",
                        cell.epsilon, r.p_l, r.p_c, r.p_r
                    );
                }
            }
        }
    }
    CheckResult {
        name: "m-matrix-signs",
        passed,
        worst,
        detail,
    }
}

/// Behavioral minimum principle: nonpositive interior loads and nonnegative
/// boundary values must produce `U >= -tol * ||U||`.
fn check_minimum_principle(cells: &[Cell], cfg: &VerifyConfig) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0f64;
    let mut detail = String::from("no negative undershoot beyond tolerance");
    let mut passed = true;
    for cell in cells.iter().filter(|c| c.assumptions_pass) {
        let n = cell.n;
        for _ in 0..cfg.rhs_draws {
            let g: Vec<f64> = (1..n).map(|_| -rng.random_range(0.0..1.0)).collect();
            let bc = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
            let sys = cell.system.clone().with_interior_rhs(&g, bc).unwrap();
            let sol = match solve(&sys) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let scale = sol.max_abs().max(f64::MIN_POSITIVE);
            let min = sol.values().iter().fold(f64::INFINITY, |m, &v| m.min(v));
            let undershoot = -min / scale;
            if undershoot > worst {
                worst = undershoot;
                if undershoot > MIN_PRINCIPLE_TOL {
                    passed = false;
                    detail = format!(
                        "(eps={:.1e}, n={n}): min U = {:.3e} with ||U|| = {:.3e}",
                        cell.epsilon, min, scale
                    );
                }
            }
        }
    }
    CheckResult {
        name: "minimum-principle",
        passed,
        worst,
        detail,
    }
}

/// Uniform stability: with zero boundary values,
/// `||U|| <= max|rhs| / beta` up to tolerance.
fn check_stability(problem: &ProblemSpec, cells: &[Cell], cfg: &VerifyConfig) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e3779b97f4a7c15);
    let mut worst = f64::NEG_INFINITY;
    let mut detail = String::from("all solutions within the 1/beta bound");
    let mut passed = true;
    for cell in cells.iter().filter(|c| c.assumptions_pass) {
        let n = cell.n;
        for _ in 0..cfg.rhs_draws {
            let g: Vec<f64> = (1..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let sys = cell.system.clone().with_interior_rhs(&g, (0.0, 0.0)).unwrap();
            let sol = match solve(&sys) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let maxg = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let bound = maxg / problem.beta();
            let scale = bound.max(sol.max_abs());
            let excess = (sol.max_abs() - bound) / scale;
            if excess > worst {
                worst = excess;
                if excess > STABILITY_TOL {
                    passed = false;
                    detail = format!(
                        "(eps={:.1e}, n={n}): ||U|| = {:.6e} exceeds bound {:.6e}",
                        cell.epsilon,
                        sol.max_abs(),
                        bound
                    );
                }
            }
        }
    }
    CheckResult {
        name: "stability-bound",
        passed,
        worst,
        detail,
    }
}

/// Barrier inequalities: the assembled operator applied to the left barrier
/// profile must be nonpositive on rows 1..=n/2, and to the right profile on
/// rows n/2..=n-1, up to tolerance relative to row scale.
fn check_barrier(problem: &ProblemSpec, cells: &[Cell], cfg: &VerifyConfig) -> CheckResult {
    let gamma = cfg.gamma_fraction * problem.alpha();
    let mut worst = f64::NEG_INFINITY;
    let mut detail = String::from("barrier residuals nonpositive");
    let mut passed = true;
    for cell in cells.iter() {
        let n = cell.n;
        let mesh = cell.system.mesh();
        let left = barrier_left(mesh, gamma, cell.epsilon);
        let right = barrier_right(mesh, gamma, cell.epsilon);
        let lv = cell.system.apply(&left).unwrap();
        let rv = cell.system.apply(&right).unwrap();
        for i in 1..n {
            let r = cell.system.row(i);
            let scale = r.p_l.abs() + r.p_c.abs() + r.p_r.abs();
            let mut push = |value: f64, side: &str| {
                let v = value / scale;
                if v > worst {
                    worst = v;
                    if v > BARRIER_TOL {
                        passed = false;
                        detail = format!(
                            "(eps={:.1e}, n={n}) {side} barrier row {i}: residual {:.3e} of row scale",
                            cell.epsilon, v
                        );
                    }
                }
            };
            if i <= n / 2 {
                push(lv[i - 1], "left");
            }
            if i >= n / 2 {
                push(rv[i - 1], "right");
            }
        }
    }
    CheckResult {
        name: "barrier-inequality",
        passed,
        worst,
        detail,
    }
}

/// Agreement between the Thomas route and the dense partial-pivoting route
/// on every cell with n <= 64.
fn check_oracle_agreement(cells: &[Cell]) -> CheckResult {
    let mut worst = 0.0f64;
    let mut detail = String::from("tridiagonal and dense routes agree");
    let mut passed = true;
    for cell in cells.iter().filter(|c| c.n <= 64) {
        let t = match solve(&cell.system) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let d = match dense_solve(&cell.system) {
            Ok(d) => d,
            Err(_) => continue,
        };
        let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let diff = t
            .values()
            .iter()
            .zip(&d)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            / scale;
        if diff > worst {
            worst = diff;
            if diff > ORACLE_TOL {
                passed = false;
                detail = format!(
                    "(eps={:.1e}, n={}): relative difference {:.3e}",
                    cell.epsilon, cell.n, diff
                );
            }
        }
    }
    CheckResult {
        name: "solver-oracle-agreement",
        passed,
        worst,
        detail,
    }
}

/// Runs every suite over the configured grid.
pub fn run_verify(problem: &ProblemSpec, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let cells = cells(problem, cfg)?;
    let mut flags = Vec::new();
    for cell in &cells {
        if !cell.assumptions_pass {
            let eps = Epsilon::new(cell.epsilon)?;
            let report = check_assumptions(problem, cell.system.mesh(), eps);
            let mut which = Vec::new();
            if !report.condition_central {
                which.push(format!(
                    "condition 1: h||a||/(2 eps) = {:.4e} >= 1 (2 tau0 ||a|| = {:.4} vs n/ln n = {:.4})",
                    report.central_ratio, report.central_lhs, report.central_rhs
                ));
            }
            if !report.condition_midpoint {
                which.push(format!(
                    "condition 2: 2||b||/n = {:.4e} > alpha = {:.4e}",
                    report.midpoint_lhs, report.alpha
                ));
            }
            flags.push(format!(
                "(eps={:.1e}, n={}) hypotheses fail: {}",
                cell.epsilon,
                cell.n,
                which.join("; ")
            ));
        }
    }
    let checks = vec![
        check_m_matrix(&cells),
        check_minimum_principle(&cells, cfg),
        check_stability(problem, &cells, cfg),
        check_barrier(problem, &cells, cfg),
        check_oracle_agreement(&cells),
    ];
    Ok(VerifyReport {
        checks,
        assumption_flags: flags,
    })
}
