//! Error measurement and convergence diagnostics: maximum pointwise errors
//! against exact solutions, the nested double-mesh estimator, observed
//! orders, and full (epsilon, n) convergence reports.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::mesh::{build_mesh, build_mesh_with_tau, MeshConfig};
use crate::problem::{Epsilon, ProblemSpec};
use crate::scheme::{assemble, assemble_upwind, check_assumptions, AssumptionReport, SchemeKind};
use crate::solver::{solve, DiscreteSolution};

/// How the per-cell error is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMode {
    /// Against the problem's exact solution at the mesh nodes.
    Exact,
    /// Against the solution on the nested mesh with doubled intervals.
    DoubleMesh,
}

impl std::fmt::Display for ErrorMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ErrorMode::Exact => write!(f, "exact"),
            ErrorMode::DoubleMesh => write!(f, "double-mesh"),
        }
    }
}

/// One (epsilon, n) cell of a convergence study.
#[derive(Debug, Clone)]
pub struct ErrorGridEntry {
    pub epsilon: f64,
    pub n: usize,
    pub error: f64,
    /// `log2(E_n / E_2n)`; present only when the `2n` entry exists.
    pub order: Option<f64>,
    pub tau0: f64,
    pub scheme: SchemeKind,
    pub assumptions: AssumptionReport,
}

/// Full convergence study over a grid of epsilons and mesh sizes.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub problem: String,
    pub scheme: SchemeKind,
    pub tau0: f64,
    pub mode: ErrorMode,
    /// Entries ordered by (epsilon index, n index) of the requested grids.
    pub entries: Vec<ErrorGridEntry>,
    /// Per-n maximum of the error over all epsilons.
    pub uniform_rows: BTreeMap<usize, f64>,
    pub epsilons: Vec<f64>,
    pub ns: Vec<usize>,
}

impl ConvergenceReport {
    pub fn entry(&self, epsilon: f64, n: usize) -> Option<&ErrorGridEntry> {
        self.entries
            .iter()
            .find(|e| e.epsilon == epsilon && e.n == n)
    }
}

/// Builds the mesh, assembles the requested scheme and solves, in one step.
pub fn solve_problem(
    problem: &ProblemSpec,
    epsilon: f64,
    n: usize,
    tau0: f64,
    scheme: SchemeKind,
) -> Result<DiscreteSolution> {
    let eps = Epsilon::new(epsilon)?;
    let mesh = build_mesh(MeshConfig::new(n, eps, problem.domain()).with_tau0(tau0))?;
    let system = match scheme {
        SchemeKind::Hybrid => assemble(problem, &mesh, eps),
        SchemeKind::Upwind => assemble_upwind(problem, &mesh, eps),
    };
    solve(&system)
}

/// Solves on the coarse mesh and on the nested fine mesh with `2n`
/// intervals; the fine mesh reuses the coarse transition parameter so that
/// every coarse node is a fine node.
pub fn solve_double_mesh(
    problem: &ProblemSpec,
    epsilon: f64,
    n: usize,
    tau0: f64,
    scheme: SchemeKind,
) -> Result<(DiscreteSolution, DiscreteSolution)> {
    let eps = Epsilon::new(epsilon)?;
    let coarse_mesh = build_mesh(MeshConfig::new(n, eps, problem.domain()).with_tau0(tau0))?;
    let fine_mesh = build_mesh_with_tau(
        MeshConfig::new(2 * n, eps, problem.domain()).with_tau0(tau0),
        coarse_mesh.tau(),
    )?;
    let (coarse_sys, fine_sys) = match scheme {
        SchemeKind::Hybrid => (
            assemble(problem, &coarse_mesh, eps),
            assemble(problem, &fine_mesh, eps),
        ),
        SchemeKind::Upwind => (
            assemble_upwind(problem, &coarse_mesh, eps),
            assemble_upwind(problem, &fine_mesh, eps),
        ),
    };
    Ok((solve(&coarse_sys)?, solve(&fine_sys)?))
}

/// Maximum pointwise error over all mesh nodes, `max_i |u(x_i) - U_i|`.
pub fn max_pointwise_error(
    solution: &DiscreteSolution,
    exact: &dyn Fn(f64, f64) -> f64,
) -> f64 {
    let mesh = solution.mesh();
    let eps = solution.epsilon();
    (0..=mesh.n())
        .map(|i| (exact(mesh.node(i), eps) - solution.value(i)).abs())
        .fold(0.0, f64::max)
}

/// Double-mesh error `max_i |U^n_i - U^{2n}_{2i}|` over the coarse nodes.
/// The meshes must be nested: the fine mesh has `2n` intervals and the same
/// transition parameter.
pub fn double_mesh_error(coarse: &DiscreteSolution, fine: &DiscreteSolution) -> Result<f64> {
    let n = coarse.mesh().n();
    if fine.mesh().n() != 2 * n {
        return Err(Error::DimensionMismatch(format!(
            "fine mesh has {} intervals, expected {}",
            fine.mesh().n(),
            2 * n
        )));
    }
    for i in 0..=n {
        let delta = (coarse.mesh().node(i) - fine.mesh().node(2 * i)).abs();
        if delta > 1e-12 {
            return Err(Error::NonNestedMeshes { index: i, delta });
        }
    }
    Ok((0..=n)
        .map(|i| (coarse.value(i) - fine.value(2 * i)).abs())
        .fold(0.0, f64::max))
}

/// Observed order of convergence `log2(e_n / e_2n)`.
pub fn observed_order(e_n: f64, e_2n: f64) -> Result<f64> {
    if e_n.is_nan() || e_2n.is_nan() || e_n <= 0.0 || e_2n <= 0.0 {
        return Err(Error::NonPositiveError(e_n, e_2n));
    }
    Ok((e_n / e_2n).log2())
}

fn check_ns(ns: &[usize]) -> Result<()> {
    if ns.is_empty() {
        return Err(Error::InvalidGrid("empty n list".into()));
    }
    for &n in ns {
        if !n.is_multiple_of(4) || n < 8 {
            return Err(Error::InvalidGrid(format!(
                "n = {n} must be >= 8 and divisible by 4"
            )));
        }
    }
    for w in ns.windows(2) {
        if w[1] != 2 * w[0] {
            return Err(Error::InvalidGrid(format!(
                "n values must double: {} does not follow {}",
                w[1], w[0]
            )));
        }
    }
    Ok(())
}

/// Runs the full study: for each (epsilon, n) build, assemble, solve and
/// measure; orders are filled from consecutive n, and `uniform_rows` holds
/// the per-n maxima over epsilon. All-or-nothing: the first failing cell
/// aborts the report.
pub fn run_convergence(
    problem: &ProblemSpec,
    scheme: SchemeKind,
    epsilons: &[f64],
    ns: &[usize],
    tau0: f64,
    mode: Option<ErrorMode>,
) -> Result<ConvergenceReport> {
    check_ns(ns)?;
    if epsilons.is_empty() {
        return Err(Error::InvalidGrid("empty epsilon list".into()));
    }
    let mode = match mode {
        Some(m) => m,
        None => {
            if problem.has_exact() {
                ErrorMode::Exact
            } else {
                ErrorMode::DoubleMesh
            }
        }
    };
    if mode == ErrorMode::Exact && !problem.has_exact() {
        return Err(Error::MissingExactSolution(problem.name().to_string()));
    }

    let mut entries = Vec::with_capacity(epsilons.len() * ns.len());
    let mut uniform: BTreeMap<usize, f64> = BTreeMap::new();
    for &epsilon in epsilons {
        let mut errors = Vec::with_capacity(ns.len());
        for &n in ns {
            let cell = |e: Error| e.at_cell(epsilon, n);
            let eps = Epsilon::new(epsilon).map_err(cell)?;
            let mesh = build_mesh(MeshConfig::new(n, eps, problem.domain()).with_tau0(tau0))
                .map_err(cell)?;
            let assumptions = check_assumptions(problem, &mesh, eps);
            let error = match mode {
                ErrorMode::Exact => {
                    let solution = solve_problem(problem, epsilon, n, tau0, scheme).map_err(cell)?;
                    let exact = problem
                        .exact_fn()
                        .ok_or_else(|| Error::MissingExactSolution(problem.name().into()))?;
                    max_pointwise_error(&solution, exact.as_ref())
                }
                ErrorMode::DoubleMesh => {
                    let (coarse, fine) =
                        solve_double_mesh(problem, epsilon, n, tau0, scheme).map_err(cell)?;
                    double_mesh_error(&coarse, &fine).map_err(cell)?
                }
            };
            errors.push(error);
            let u = uniform.entry(n).or_insert(0.0);
            *u = u.max(error);
            entries.push(ErrorGridEntry {
                epsilon,
                n,
                error,
                order: None,
                tau0,
                scheme,
                assumptions,
            });
        }
        // Fill orders from consecutive doublings.
        let base = entries.len() - ns.len();
        for k in 0..ns.len() - 1 {
            if errors[k] > 0.0 && errors[k + 1] > 0.0 {
                entries[base + k].order = Some(observed_order(errors[k], errors[k + 1])?);
            }
        }
    }

    Ok(ConvergenceReport {
        problem: problem.name().to_string(),
        scheme,
        tau0,
        mode,
        entries,
        uniform_rows: uniform,
        epsilons: epsilons.to_vec(),
        ns: ns.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::DEFAULT_TAU0;
    use crate::problem::{example1, example2};
    use proptest::prelude::*;

    #[test]
    fn observed_order_examples() {
        assert_eq!(observed_order(4.0, 1.0).unwrap(), 2.0);
        let o = observed_order(2.6900e-2, 1.1508e-2).unwrap();
        assert!((o - 1.2249).abs() < 5e-4, "order {o}");
        let o = observed_order(8.0701e-2, 3.4525e-2).unwrap();
        assert!((o - 1.2250).abs() < 5e-4, "order {o}");
        assert!(observed_order(0.0, 1.0).is_err());
        assert!(observed_order(1.0, -1.0).is_err());
    }

    #[test]
    fn max_error_zero_for_exact_nodal_values() {
        let p = example1();
        let sol = solve_problem(&p, 1e-2, 16, DEFAULT_TAU0, SchemeKind::Hybrid).unwrap();
        // Error against the solution itself is zero.
        let vals = sol.values().to_vec();
        let mesh = sol.mesh().clone();
        let fake_exact = move |x: f64, _eps: f64| {
            let i = (0..=mesh.n())
                .min_by(|&a, &b| {
                    (mesh.node(a) - x)
                        .abs()
                        .partial_cmp(&(mesh.node(b) - x).abs())
                        .unwrap()
                })
                .unwrap();
            vals[i]
        };
        assert_eq!(max_pointwise_error(&sol, &fake_exact), 0.0);
    }

    #[test]
    fn reference_spot_errors() {
        let p = example1();
        let exact = p.exact_fn().unwrap();
        let sol = solve_problem(&p, 1e-8, 64, DEFAULT_TAU0, SchemeKind::Hybrid).unwrap();
        let e = max_pointwise_error(&sol, exact.as_ref());
        assert!(((e - 4.3120e-3) / 4.3120e-3).abs() < 2e-4, "error {e:e}");

        let p2 = example2();
        let exact2 = p2.exact_fn().unwrap();
        let sol = solve_problem(&p2, 1e-9, 16, DEFAULT_TAU0, SchemeKind::Hybrid).unwrap();
        let e = max_pointwise_error(&sol, exact2.as_ref());
        assert!(((e - 8.0701e-2) / 8.0701e-2).abs() < 2e-4, "error {e:e}");

        let sol = solve_problem(&p2, 2f64.powi(-16), 16, DEFAULT_TAU0, SchemeKind::Hybrid).unwrap();
        let e = max_pointwise_error(&sol, exact2.as_ref());
        assert!(((e - 8.0697e-2) / 8.0697e-2).abs() < 2e-4, "error {e:e}");
    }

    #[test]
    fn double_mesh_identical_solutions_give_zero() {
        use crate::scheme::TridiagonalSystem;
        let p = example1();
        let n = 16;
        let (coarse, fine) = solve_double_mesh(&p, 1e-4, n, DEFAULT_TAU0, SchemeKind::Hybrid)
            .unwrap();
        // Build a coarse solution carrying exactly the fine restriction:
        // decoupled rows p_c = -1, rhs = -U^{2n}_{2i} solve to those values.
        let mut diag = vec![-1.0; n + 1];
        diag[0] = 1.0;
        diag[n] = 1.0;
        let mut rhs: Vec<f64> = (0..=n).map(|i| -fine.value(2 * i)).collect();
        rhs[0] = fine.value(0);
        rhs[n] = fine.value(2 * n);
        let sys = TridiagonalSystem::from_raw(
            vec![0.0; n + 1],
            diag,
            vec![0.0; n + 1],
            rhs,
            coarse.mesh().clone(),
            coarse.epsilon(),
            SchemeKind::Hybrid,
        )
        .unwrap();
        let injected = crate::solver::solve(&sys).unwrap();
        assert_eq!(double_mesh_error(&injected, &fine).unwrap(), 0.0);
        // The real estimator yields a positive, small value.
        let dm = double_mesh_error(&coarse, &fine).unwrap();
        assert!(dm > 0.0 && dm < 1.0);
    }

    #[test]
    fn double_mesh_rejects_non_nested() {
        let p = example1();
        // Fine mesh built with its own tau(2n) instead of the coarse tau.
        let c = solve_problem(&p, 1e-4, 64, DEFAULT_TAU0, SchemeKind::Hybrid).unwrap();
        let f = solve_problem(&p, 1e-4, 128, DEFAULT_TAU0, SchemeKind::Hybrid).unwrap();
        match double_mesh_error(&c, &f) {
            Err(Error::NonNestedMeshes { .. }) => {}
            other => panic!("expected non-nested error, got {other:?}"),
        }
    }

    #[test]
    fn report_shape_and_uniform_rows() {
        let p = example1();
        let eps: Vec<f64> = (0..=9).map(|k| 10f64.powi(-k)).collect();
        let ns = [16usize, 32, 64];
        let r = run_convergence(&p, SchemeKind::Hybrid, &eps, &ns, DEFAULT_TAU0, None).unwrap();
        assert_eq!(r.entries.len(), 30);
        assert_eq!(r.mode, ErrorMode::Exact);
        for (k, e) in r.entries.iter().enumerate() {
            let want_order = k % 3 != 2;
            assert_eq!(e.order.is_some(), want_order, "entry {k}");
        }
        for &n in &ns {
            let want = r
                .entries
                .iter()
                .filter(|e| e.n == n)
                .map(|e| e.error)
                .fold(0.0, f64::max);
            assert_eq!(r.uniform_rows[&n], want);
        }
    }

    #[test]
    fn report_single_cell_has_no_order() {
        let p = example2();
        let r = run_convergence(&p, SchemeKind::Hybrid, &[1e-3], &[16], DEFAULT_TAU0, None)
            .unwrap();
        assert_eq!(r.entries.len(), 1);
        assert!(r.entries[0].order.is_none());
    }

    #[test]
    fn report_rejects_bad_grids() {
        let p = example1();
        let e = [1e-3];
        assert!(run_convergence(&p, SchemeKind::Hybrid, &e, &[], DEFAULT_TAU0, None).is_err());
        assert!(run_convergence(&p, SchemeKind::Hybrid, &e, &[10], DEFAULT_TAU0, None).is_err());
        assert!(
            run_convergence(&p, SchemeKind::Hybrid, &e, &[16, 48], DEFAULT_TAU0, None).is_err()
        );
        assert!(run_convergence(&p, SchemeKind::Hybrid, &[], &[16], DEFAULT_TAU0, None).is_err());
    }

    #[test]
    fn double_mesh_tracks_exact_error() {
        // Double-mesh and exact-solution errors agree within a factor 3.
        let p = example1();
        let exact = p.exact_fn().unwrap();
        for eps in [1e-4, 1e-8] {
            for n in [64usize, 128, 256] {
                let (coarse, fine) =
                    solve_double_mesh(&p, eps, n, DEFAULT_TAU0, SchemeKind::Hybrid).unwrap();
                let dm = double_mesh_error(&coarse, &fine).unwrap();
                let ex = max_pointwise_error(&coarse, exact.as_ref());
                let ratio = dm / ex;
                assert!(
                    (1.0 / 3.0..=3.0).contains(&ratio),
                    "eps={eps} n={n}: ratio {ratio}"
                );
            }
        }
    }

    #[test]
    fn errors_stabilize_as_epsilon_shrinks() {
        // For fixed n the error stabilizes for eps <= 1e-5.
        for p in [example1(), example2()] {
            let eps: Vec<f64> = (5..=9).map(|k| 10f64.powi(-k)).collect();
            let ns = [16usize, 32, 64, 128, 256, 512, 1024];
            let r = run_convergence(&p, SchemeKind::Hybrid, &eps, &ns, DEFAULT_TAU0, None)
                .unwrap();
            for w in 0..eps.len() - 1 {
                for &n in &ns {
                    let a = r.entry(eps[w], n).unwrap().error;
                    let b = r.entry(eps[w + 1], n).unwrap().error;
                    assert!(
                        ((a - b) / a).abs() <= 0.05,
                        "{} eps={} n={n}",
                        p.name(),
                        eps[w]
                    );
                }
            }
        }
    }

    #[test]
    fn errors_decay_monotonically_in_n() {
        for p in [example1(), example2()] {
            let eps: Vec<f64> = (0..=9).map(|k| 10f64.powi(-k)).collect();
            let ns = [16usize, 32, 64, 128, 256, 512, 1024];
            let r = run_convergence(&p, SchemeKind::Hybrid, &eps, &ns, DEFAULT_TAU0, None)
                .unwrap();
            for &e in &eps {
                for w in ns.windows(2) {
                    let a = r.entry(e, w[0]).unwrap().error;
                    let b = r.entry(e, w[1]).unwrap().error;
                    assert!(b < a, "{} eps={e}: E({}) = {b} !< E({}) = {a}", p.name(), w[1], w[0]);
                }
            }
        }
    }

    #[test]
    fn hybrid_beats_upwind_in_the_layer_regime() {
        let p = example1();
        let ns = [64usize, 128, 256, 512, 1024];
        let h = run_convergence(&p, SchemeKind::Hybrid, &[1e-9], &ns, DEFAULT_TAU0, None)
            .unwrap();
        let u = run_convergence(&p, SchemeKind::Upwind, &[1e-9], &ns, DEFAULT_TAU0, None)
            .unwrap();
        for &n in &ns {
            let eh = h.entry(1e-9, n).unwrap().error;
            let eu = u.entry(1e-9, n).unwrap().error;
            assert!(eh < eu, "n={n}: hybrid {eh} upwind {eu}");
        }
    }

    #[test]
    fn order_regimes() {
        // Moderate eps: first order. Small eps: beyond order 1.55 at the
        // finest doubling.
        let p = example1();
        let ns = [512usize, 1024];
        let r = run_convergence(&p, SchemeKind::Hybrid, &[1.0], &ns, DEFAULT_TAU0, None).unwrap();
        let o = r.entry(1.0, 512).unwrap().order.unwrap();
        assert!((o - 1.0).abs() <= 0.05, "order {o}");
        for eps in [1e-4, 1e-6, 1e-8] {
            let r =
                run_convergence(&p, SchemeKind::Hybrid, &[eps], &ns, DEFAULT_TAU0, None).unwrap();
            let o = r.entry(eps, 512).unwrap().order.unwrap();
            assert!(o >= 1.55, "eps={eps}: order {o}");
        }
    }

    proptest! {
        #[test]
        fn observed_order_is_log2_of_ratio(e in 1e-10f64..1.0, k in 1.01f64..16.0) {
            let o = observed_order(k * e, e).unwrap();
            prop_assert!((o - k.log2()).abs() < 1e-9);
        }
    }
}
