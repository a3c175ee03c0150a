//! Continuous problem definitions: the admissible class of turning-point
//! convection-reaction-diffusion problems
//!
//! ```text
//!     eps u''(x) + a(x) u'(x) - b(x) u(x) = f(x),   x in (x_l, x_r),
//!     u(x_l) = A,  u(x_r) = B,
//! ```
//!
//! where `a` vanishes once inside the domain with a' < 0 there (diverging
//! flow, twin boundary layers) and `b >= beta > 0`. Includes the two built-in
//! benchmark problems with closed-form solutions.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Scalar coefficient function of `x`.
pub type Coeff = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Exact solution as a function of `(x, epsilon)`.
pub type ExactFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Number of uniform samples used when defaulting `beta` to the sampled
/// minimum of `b`.
const DEFAULT_BETA_SAMPLES: usize = 101;

/// Perturbation parameter, constrained to (0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Epsilon(f64);

impl Epsilon {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value <= 1.0 {
            Ok(Epsilon(value))
        } else {
            Err(Error::InvalidEpsilon(value))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Epsilon {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Epsilon::new(value)
    }
}

/// A two-point boundary value problem instance. Immutable after
/// construction; coefficient callables must be pure, so values may be shared
/// freely across threads.
#[derive(Clone)]
pub struct ProblemSpec {
    name: String,
    domain: (f64, f64),
    a: Coeff,
    b: Coeff,
    f: Coeff,
    bc: (f64, f64),
    alpha: f64,
    beta: f64,
    exact: Option<ExactFn>,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("bc", &self.bc)
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl ProblemSpec {
    /// Builds a problem with `alpha` defaulted to min(|a(x_l)|, |a(x_r)|)
    /// and `beta` to the sampled minimum of `b` over the closed domain.
    pub fn new(
        name: impl Into<String>,
        domain: (f64, f64),
        a: Coeff,
        b: Coeff,
        f: Coeff,
        bc: (f64, f64),
    ) -> Self {
        assert!(
            domain.0 < domain.1,
            "domain must satisfy x_l < x_r, got {domain:?}"
        );
        let alpha = a(domain.0).abs().min(a(domain.1).abs());
        let m = DEFAULT_BETA_SAMPLES - 1;
        let beta = (0..=m)
            .map(|k| {
                let x = ((m - k) as f64 * domain.0 + k as f64 * domain.1) / m as f64;
                b(x)
            })
            .fold(f64::INFINITY, f64::min);
        ProblemSpec {
            name: name.into(),
            domain,
            a,
            b,
            f,
            bc,
            alpha,
            beta,
            exact: None,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_exact(mut self, exact: ExactFn) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn length(&self) -> f64 {
        self.domain.1 - self.domain.0
    }

    pub fn bc(&self) -> (f64, f64) {
        self.bc
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn a(&self, x: f64) -> f64 {
        (self.a)(x)
    }

    pub fn b(&self, x: f64) -> f64 {
        (self.b)(x)
    }

    pub fn f(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Evaluates the exact solution, if one is attached.
    pub fn exact(&self, x: f64, epsilon: f64) -> Option<f64> {
        self.exact.as_ref().map(|u| u(x, epsilon))
    }

    pub fn exact_fn(&self) -> Option<ExactFn> {
        self.exact.clone()
    }
}

/// A single admissibility violation found by [`validate`]. Violations are
/// data, not failures.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Offending sample location, when the condition is pointwise.
    pub x: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// `b(x) >= beta > 0` fails at a sample.
    ReactionBound,
    /// `a` does not change sign exactly once from + to - in the open domain.
    SignPattern,
    /// `|a| >= alpha > 0` fails at a domain endpoint.
    EndpointMagnitude,
}

/// Samples the domain uniformly at `samples >= 3` points and checks the
/// admissibility conditions: the reaction lower bound, the single (+ -> -)
/// sign change of `a`, and the endpoint magnitudes of `a`.
pub fn validate(problem: &ProblemSpec, samples: usize) -> Vec<Violation> {
    assert!(samples >= 3, "validate requires samples >= 3");
    let (xl, xr) = problem.domain();
    let m = samples - 1;
    let xs: Vec<f64> = (0..=m)
        .map(|k| ((m - k) as f64 * xl + k as f64 * xr) / m as f64)
        .collect();

    let mut violations = Vec::new();

    // Reaction bound: b >= beta at every sample and beta must be positive.
    for &x in &xs {
        let bx = problem.b(x);
        let beta = problem.beta();
        if beta.is_nan() || beta <= 0.0 || bx.is_nan() || bx < beta {
            violations.push(Violation {
                kind: ViolationKind::ReactionBound,
                x: Some(x),
                detail: format!(
                    "reaction bound: b({x}) = {bx} does not satisfy b >= beta = {} > 0",
                    problem.beta()
                ),
            });
        }
    }

    // Sign pattern of a: compress the sampled signs (dropping zeros) and
    // require exactly [+, -].
    let mut compressed: Vec<i8> = Vec::new();
    for &x in &xs {
        let s = match problem.a(x) {
            v if v > 0.0 => 1i8,
            v if v < 0.0 => -1i8,
            _ => 0i8,
        };
        if s != 0 && compressed.last() != Some(&s) {
            compressed.push(s);
        }
    }
    if compressed != [1, -1] {
        violations.push(Violation {
            kind: ViolationKind::SignPattern,
            x: None,
            detail: format!(
                "sign pattern: expected exactly one sign change (+ -> -), observed sequence {compressed:?}"
            ),
        });
    }

    // Endpoint magnitudes.
    for x in [xl, xr] {
        let ax = problem.a(x).abs();
        let alpha = problem.alpha();
        if alpha.is_nan() || alpha <= 0.0 || ax.is_nan() || ax < alpha {
            violations.push(Violation {
                kind: ViolationKind::EndpointMagnitude,
                x: Some(x),
                detail: format!(
                    "endpoint magnitude: |a({x})| = {ax} does not satisfy |a| >= alpha = {} > 0",
                    problem.alpha()
                ),
            });
        }
    }

    violations
}

/// Homogeneous benchmark: eps u'' - 2(2x-1) u' - 4u = 0 on (0,1), u(0)=u(1)=1,
/// exact solution u(x) = exp(-2x(1-x)/eps).
pub fn example1() -> ProblemSpec {
    ProblemSpec::new(
        "example1",
        (0.0, 1.0),
        Arc::new(|x| -2.0 * (2.0 * x - 1.0)),
        Arc::new(|_| 4.0),
        Arc::new(|_| 0.0),
        (1.0, 1.0),
    )
    .with_alpha(2.0)
    .with_beta(4.0)
    .with_exact(Arc::new(|x, eps| (-2.0 * x * (1.0 - x) / eps).exp()))
}

/// Nonhomogeneous benchmark: eps u'' - 2(2x-1) u' - 4u = 4(4x-1) on (0,1),
/// u(0)=u(1)=1, exact solution
/// u(x) = -2x + 2 E + E erf((2x-1)/sqrt(2 eps)) / erf(1/sqrt(2 eps))
/// with E = exp(-2x(1-x)/eps).
pub fn example2() -> ProblemSpec {
    ProblemSpec::new(
        "example2",
        (0.0, 1.0),
        Arc::new(|x| -2.0 * (2.0 * x - 1.0)),
        Arc::new(|_| 4.0),
        Arc::new(|x| 4.0 * (4.0 * x - 1.0)),
        (1.0, 1.0),
    )
    .with_alpha(2.0)
    .with_beta(4.0)
    .with_exact(Arc::new(|x, eps| {
        let e = (-2.0 * x * (1.0 - x) / eps).exp();
        let s = (2.0 * eps).sqrt();
        -2.0 * x + 2.0 * e + e * erf((2.0 * x - 1.0) / s) / erf(1.0 / s)
    }))
}

/// Error function, exactly odd, saturating to sign(z) for |z| > 6 (the tail
/// there is below 1e-17, under one ulp of 1).
pub fn erf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    let az = z.abs();
    let mag = if az > 6.0 { 1.0 } else { libm::erf(az) };
    mag.copysign(z)
}
