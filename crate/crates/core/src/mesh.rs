//! Piecewise-uniform layer-adapted (Shishkin) meshes.
//!
//! The mesh splits `[x_l, x_r]` into four pieces: two fine layer pieces
//! `[x_l, x_l + tau]` and `[x_r - tau, x_r]` with `n/4` intervals each, and
//! a coarse middle piece with `n/2` intervals. The transition parameter is
//!
//! ```text
//!     tau = min( min(1/4, (x_r - x_l)/4),  tau0 * epsilon * ln n ).
//! ```
//!
//! The cap reproduces the reference computations on both unit-length and
//! length-2 domains while keeping 2*tau <= (x_r - x_l)/2; at the cap the
//! mesh degenerates gracefully to uniform spacing. Breakpoints are assigned
//! analytically and piece interiors are filled by convex combination, so no
//! rounding drift accumulates.

use crate::error::{Error, Result};
use crate::problem::Epsilon;

/// Default transition-parameter multiplier. Reproduces the reference
/// convergence tables for the built-in benchmark problems.
pub const DEFAULT_TAU0: f64 = 0.8;

#[derive(Debug, Clone, Copy)]
pub struct MeshConfig {
    /// Number of mesh intervals; must be divisible by 4 and at least 8.
    pub n: usize,
    /// Transition-parameter multiplier, > 0.
    pub tau0: f64,
    pub epsilon: Epsilon,
    pub domain: (f64, f64),
}

impl MeshConfig {
    pub fn new(n: usize, epsilon: Epsilon, domain: (f64, f64)) -> Self {
        MeshConfig {
            n,
            tau0: DEFAULT_TAU0,
            epsilon,
            domain,
        }
    }

    pub fn with_tau0(mut self, tau0: f64) -> Self {
        self.tau0 = tau0;
        self
    }

    fn check(&self) -> Result<()> {
        if self.n < 8 {
            return Err(Error::InvalidMesh(format!("n = {} must be >= 8", self.n)));
        }
        if !self.n.is_multiple_of(4) {
            return Err(Error::InvalidMesh(format!(
                "n = {} must be divisible by 4",
                self.n
            )));
        }
        if self.tau0 <= 0.0 || !self.tau0.is_finite() {
            return Err(Error::InvalidMesh(format!(
                "tau0 = {} must be positive",
                self.tau0
            )));
        }
        if self.domain.0 >= self.domain.1
            || !self.domain.0.is_finite()
            || !self.domain.1.is_finite()
        {
            return Err(Error::InvalidMesh(format!(
                "domain {:?} must satisfy x_l < x_r",
                self.domain
            )));
        }
        Ok(())
    }
}

/// The four-piece piecewise-uniform mesh. Immutable.
#[derive(Debug, Clone)]
pub struct ShishkinMesh {
    nodes: Vec<f64>,
    widths: Vec<f64>,
    tau: f64,
    n: usize,
}

impl ShishkinMesh {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Node coordinate `x_i`, `0 <= i <= n`.
    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// Interval widths `h_1 ..= h_n` (index 0 holds `h_1 = x_1 - x_0`).
    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    /// Width `h_i = x_i - x_{i-1}`, 1-based, `1 <= i <= n`.
    pub fn width(&self, i: usize) -> f64 {
        self.widths[i - 1]
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.n])
    }

    pub fn length(&self) -> f64 {
        self.nodes[self.n] - self.nodes[0]
    }

    /// Width of the layer-piece intervals, `h = 4 tau / n`.
    pub fn fine_width(&self) -> f64 {
        self.widths[0]
    }

    /// Width of the middle-piece intervals, `H = 2 (L - 2 tau) / n`.
    pub fn coarse_width(&self) -> f64 {
        self.widths[self.n / 2]
    }

    /// Effective multiplier `tau / (epsilon ln n)`; equals the configured
    /// `tau0` when the cap is inactive.
    pub fn tau0_effective(&self, epsilon: f64) -> f64 {
        self.tau / (epsilon * (self.n as f64).ln())
    }
}

/// Transition-parameter cap for a domain of length `len`.
pub fn tau_cap(len: f64) -> f64 {
    f64::min(0.25, len / 4.0)
}

/// Builds the mesh with `tau = min(cap, tau0 * epsilon * ln n)`.
pub fn build_mesh(config: MeshConfig) -> Result<ShishkinMesh> {
    config.check()?;
    let len = config.domain.1 - config.domain.0;
    let tau = f64::min(
        tau_cap(len),
        config.tau0 * config.epsilon.get() * (config.n as f64).ln(),
    );
    build_with_tau(config, tau)
}

/// Builds the mesh with an explicitly prescribed transition parameter.
/// Used for nested double-mesh refinement, where the fine mesh must reuse
/// the coarse mesh's `tau`.
pub fn build_mesh_with_tau(config: MeshConfig, tau: f64) -> Result<ShishkinMesh> {
    config.check()?;
    let len = config.domain.1 - config.domain.0;
    if tau.is_nan() || tau <= 0.0 || tau > tau_cap(len) {
        return Err(Error::InvalidMesh(format!(
            "tau = {tau:e} must lie in (0, {:e}]",
            tau_cap(len)
        )));
    }
    build_with_tau(config, tau)
}

fn build_with_tau(config: MeshConfig, tau: f64) -> Result<ShishkinMesh> {
    let n = config.n;
    let (xl, xr) = config.domain;
    let mut nodes = vec![0.0; n + 1];

    fill_piece(&mut nodes[0..=n / 4], xl, xl + tau);
    fill_piece(&mut nodes[n / 4..=3 * n / 4], xl + tau, xr - tau);
    fill_piece(&mut nodes[3 * n / 4..=n], xr - tau, xr);

    for i in 0..n {
        if nodes[i].is_nan() || nodes[i] >= nodes[i + 1] {
            return Err(Error::InvalidMesh(format!(
                "nodes not strictly increasing at index {i} (tau = {tau:e})"
            )));
        }
    }
    let widths = (0..n).map(|i| nodes[i + 1] - nodes[i]).collect();
    Ok(ShishkinMesh {
        nodes,
        widths,
        tau,
        n,
    })
}

/// Fills `piece` with the uniform subdivision of `[p, q]`, assigning the
/// endpoints exactly and interior nodes as convex combinations.
fn fill_piece(piece: &mut [f64], p: f64, q: f64) {
    let m = piece.len() - 1;
    piece[0] = p;
    piece[m] = q;
    for (k, node) in piece.iter_mut().enumerate().take(m).skip(1) {
        *node = ((m - k) as f64 * p + k as f64 * q) / m as f64;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mesh(n: usize, eps: f64, tau0: f64, domain: (f64, f64)) -> ShishkinMesh {
        build_mesh(MeshConfig::new(n, Epsilon::new(eps).unwrap(), domain).with_tau0(tau0)).unwrap()
    }

    #[test]
    fn cap_case_length_two_domain() {
        // Cap active: tau = 1/4, h = 1/16, H = 3/16, exactly.
        let m = mesh(16, 1.0, 1.0, (-1.0, 1.0));
        assert_eq!(m.tau(), 0.25);
        assert_eq!(m.fine_width(), 1.0 / 16.0);
        assert_eq!(m.coarse_width(), 3.0 / 16.0);
        assert_eq!(m.node(0), -1.0);
        assert_eq!(m.node(4), -0.75);
        assert_eq!(m.node(12), 0.75);
        assert_eq!(m.node(16), 1.0);
    }

    #[test]
    fn fine_case_reference_values() {
        // Frozen from a 40-digit evaluation of the formulas.
        let m = mesh(64, 1e-4, 2.5, (0.0, 1.0));
        let rel = |got: f64, want: f64| ((got - want) / want).abs();
        assert!(rel(m.tau(), 1.039720770839918e-3) < 1e-14);
        assert!(rel(m.fine_width(), 6.498254817749487e-5) < 1e-14);
        assert!(rel(m.coarse_width(), 3.1185017451822505e-2) < 1e-14);
    }

    #[test]
    fn breakpoints_assigned_exactly() {
        let m = mesh(64, 1e-6, 0.8, (0.0, 1.0));
        assert_eq!(m.node(16), 0.0 + m.tau());
        assert_eq!(m.node(48), 1.0 - m.tau());
        assert_eq!(m.node(0), 0.0);
        assert_eq!(m.node(64), 1.0);
    }

    #[test]
    fn h_plus_big_h_identity_on_length_two_domain() {
        // H + h = 4/n on a length-2 domain, any regime.
        for eps in [1.0, 1e-2, 1e-6] {
            for n in [16usize, 64, 256] {
                let m = mesh(n, eps, 0.8, (-1.0, 1.0));
                let got = m.fine_width() + m.coarse_width();
                let want = 4.0 / n as f64;
                assert!(((got - want) / want).abs() < 1e-14, "eps={eps} n={n}");
            }
        }
    }

    #[test]
    fn fine_width_below_uniform_when_cap_inactive() {
        // h = 4 tau0 eps ln(n) / n < 1/n for small eps (unit domain).
        let m = mesh(64, 1e-6, 0.8, (0.0, 1.0));
        assert!(m.fine_width() < 1.0 / 64.0);
        assert!(m.coarse_width() > m.fine_width());
    }

    #[test]
    fn rejects_bad_configs() {
        let eps = Epsilon::new(1e-3).unwrap();
        assert!(build_mesh(MeshConfig::new(10, eps, (0.0, 1.0))).is_err());
        assert!(build_mesh(MeshConfig::new(4, eps, (0.0, 1.0))).is_err());
        assert!(build_mesh(MeshConfig::new(16, eps, (0.0, 1.0)).with_tau0(0.0)).is_err());
        assert!(build_mesh(MeshConfig::new(16, eps, (0.0, 1.0)).with_tau0(-1.0)).is_err());
        assert!(build_mesh(MeshConfig::new(16, eps, (1.0, 0.0))).is_err());
        assert!(Epsilon::new(0.0).is_err());
    }

    #[test]
    fn explicit_tau_must_be_in_range() {
        let eps = Epsilon::new(1e-3).unwrap();
        let cfg = MeshConfig::new(16, eps, (0.0, 1.0));
        assert!(build_mesh_with_tau(cfg, 0.0).is_err());
        assert!(build_mesh_with_tau(cfg, 0.3).is_err());
        assert!(build_mesh_with_tau(cfg, 0.2).is_ok());
    }

    proptest! {
        #[test]
        fn mesh_invariants(
            k in 2usize..=128,
            u in 0.0f64..9.0,
            tau0 in 0.2f64..4.0,
            xl in -2.0f64..2.0,
            len in 0.5f64..3.0,
        ) {
            let n = 4 * k;
            let eps = 10f64.powf(-u);
            let m = mesh(n, eps, tau0, (xl, xl + len));

            // telescoping
            let sum: f64 = m.widths().iter().sum();
            prop_assert!(((sum - len) / len).abs() < 1e-12);

            // symmetry about the midpoint
            let ends = 2.0 * xl + len;
            for i in 0..=n {
                prop_assert!((m.node(i) + m.node(n - i) - ends).abs() <= 1e-14 * ends.abs().max(1.0));
            }

            // piecewise-constant widths
            let h = m.fine_width();
            let big_h = m.coarse_width();
            for i in 1..=n {
                let want = if i <= n / 4 || i > 3 * n / 4 { h } else { big_h };
                prop_assert!((m.width(i) - want).abs() <= 1e-13 * len);
            }

            // transition parameter bounds and ordering of widths
            prop_assert!(m.tau() > 0.0 && m.tau() <= tau_cap(len) * (1.0 + 1e-15));
            prop_assert!(h <= big_h * (1.0 + 1e-12));

            // breakpoints
            prop_assert_eq!(m.node(n / 4), xl + m.tau());
            prop_assert_eq!(m.node(3 * n / 4), (xl + len) - m.tau());
        }
    }
}
