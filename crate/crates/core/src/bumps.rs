//! Littlewood–Paley bumps.
//!
//! Everything is built from one smooth step `s` and the ramp `H(u) = s(2u - 1)`,
//! which vanishes for `u ≤ 1/2` and equals one for `u ≥ 1`. Differences of
//! dyadic copies of `H` give bumps whose dyadic sums telescope:
//!
//! * `ψ̂(ξ) = H(|ξ|) - H(|ξ|/2)`, supported in `1/2 ≤ |ξ| ≤ 2`;
//! * `θ̂(η) = ψ̂(η/2) + ψ̂(η) + ψ̂(2η)`, supported in `1/4 ≤ |η| ≤ 4` and equal to
//!   one on `supp ψ̂`;
//! * `Φ̂(ξ) = H(|ξ|) - H(|ξ|/2)` with `|ξ|` the Euclidean norm on `ℝⁿ`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::grid::GridSpec;

fn e(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// `C^∞` step: `0` for `t ≤ 0`, `1` for `t ≥ 1`, `s(t) + s(1 - t) = 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = e(t);
        a / (a + e(1.0 - t))
    }
}

/// `H(u) = s(2u - 1)`.
#[inline]
pub fn ramp(u: f64) -> f64 {
    smooth_step(2.0 * u - 1.0)
}

/// The one-dimensional bump `ψ̂`.
pub fn psi_hat(xi: f64) -> f64 {
    let a = xi.abs();
    ramp(a) - ramp(0.5 * a)
}

/// The enlarged bump `θ̂(η) = ψ̂(η/2) + ψ̂(η) + ψ̂(2η)`.
pub fn theta_hat(eta: f64) -> f64 {
    psi_hat(0.5 * eta) + psi_hat(eta) + psi_hat(2.0 * eta)
}

/// The radial bump `Φ̂` on `ℝⁿ`, `n = xi.len()`.
pub fn phi_hat(xi: &[f64]) -> f64 {
    radial_bump(euclid(xi))
}

/// `Φ̂` as a function of the radius.
pub fn radial_bump(radius: f64) -> f64 {
    ramp(radius) - ramp(0.5 * radius)
}

/// `F(ξ) = Σ_{a=-m}^{m} Φ̂(2ᵃξ)`; equal to one on `2^{-m} ≤ |ξ| ≤ 2^m`.
pub fn telescope_f(xi: &[f64], m: i32) -> f64 {
    let r = euclid(xi);
    (-m..=m).map(|a| radial_bump(2f64.powi(a) * r)).sum()
}

pub(crate) fn euclid(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Which one-dimensional bump a Littlewood–Paley piece uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpBump {
    Psi,
    Theta,
}

impl LpBump {
    pub fn eval(self, xi: f64) -> f64 {
        match self {
            LpBump::Psi => psi_hat(xi),
            LpBump::Theta => theta_hat(xi),
        }
    }
}

/// The bump triple attached to a grid, together with the dyadic indices the grid
/// resolves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpFamily {
    pub dim: usize,
    pub j_min: i32,
    pub j_max: i32,
}

impl BumpFamily {
    pub fn for_grid(spec: &GridSpec) -> Self {
        let (j_min, j_max) = spec.dyadic_range();
        Self {
            dim: spec.dim(),
            j_min,
            j_max,
        }
    }

    pub fn contains(&self, j: i32) -> bool {
        (self.j_min..=self.j_max).contains(&j)
    }

    pub fn check(&self, j: i32) -> Result<()> {
        if self.contains(j) {
            Ok(())
        } else {
            Err(domain(format!(
                "dyadic index {j} outside the grid's range [{}, {}]",
                self.j_min, self.j_max
            )))
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = i32> + Clone {
        self.j_min..=self.j_max
    }

    /// `Σ_{j ∈ range} ψ̂(2^{-j}ξ)`.
    pub fn partition_sum(&self, xi: f64) -> f64 {
        self.indices().map(|j| psi_hat(2f64.powi(-j) * xi)).sum()
    }

    /// `Σ_{k ∈ range} Φ̂(2^{-k}ξ)`.
    pub fn radial_partition_sum(&self, xi: &[f64]) -> f64 {
        let r = euclid(xi);
        self.indices().map(|k| radial_bump(2f64.powi(-k) * r)).sum()
    }
}

/// Residuals of the bump identities sampled on a grid, as reported by `bump-check`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BumpCheck {
    pub grid: GridSpec,
    pub family: BumpFamily,
    /// `max |Σ_j ψ̂(2^{-j}ξ) - 1|` over grid frequencies in the covered range.
    pub partition_residual: f64,
    /// The same for the radial bump over grid frequency vectors.
    pub radial_partition_residual: f64,
    /// `max |θ̂ - 1|` over grid frequencies in `supp ψ̂`.
    pub theta_plateau_residual: f64,
    /// `max |θ̂|` over grid frequencies outside `1/4 ≤ |ξ| ≤ 4`.
    pub theta_leak: f64,
    /// `max |θ̂ψ̂ - ψ̂|`.
    pub reproducing_residual: f64,
    /// `min, max` of `Σ_j ψ̂(2^{-j}ξ)²` on the covered range.
    pub square_sum_bounds: (f64, f64),
    /// Largest number of simultaneously nonzero dyadic terms.
    pub max_overlap: usize,
}

impl BumpCheck {
    /// Every residual within `tol` and the square sums inside `[1/2, 1]`.
    pub fn passes(&self, tol: f64) -> bool {
        self.partition_residual <= tol
            && self.radial_partition_residual <= tol
            && self.theta_plateau_residual <= tol
            && self.theta_leak == 0.0
            && self.reproducing_residual <= tol
            && self.square_sum_bounds.0 >= 0.5 - tol
            && self.square_sum_bounds.1 <= 1.0 + tol
            && self.max_overlap <= 2
    }
}

/// Evaluates every bump invariant on the frequency nodes of `spec`.
pub fn check_bumps(spec: &GridSpec) -> BumpCheck {
    let family = BumpFamily::for_grid(spec);
    let lo = 2f64.powi(family.j_min);
    let hi = 2f64.powi(family.j_max);
    let axis: Vec<f64> = (0..spec.samples()).map(|i| spec.freq(i)).collect();

    let mut partition_residual: f64 = 0.0;
    let mut theta_plateau_residual: f64 = 0.0;
    let mut theta_leak: f64 = 0.0;
    let mut reproducing_residual: f64 = 0.0;
    let mut sq = (f64::INFINITY, f64::NEG_INFINITY);
    let mut max_overlap = 0;
    for &xi in &axis {
        let a = xi.abs();
        if a >= lo && a <= hi {
            partition_residual = partition_residual.max((family.partition_sum(xi) - 1.0).abs());
            let terms: Vec<f64> = family.indices().map(|j| psi_hat(2f64.powi(-j) * xi)).collect();
            let s2: f64 = terms.iter().map(|t| t * t).sum();
            sq = (sq.0.min(s2), sq.1.max(s2));
            max_overlap = max_overlap.max(terms.iter().filter(|&&t| t != 0.0).count());
        }
        let th = theta_hat(xi);
        let ps = psi_hat(xi);
        if ps != 0.0 || (0.5..=2.0).contains(&a) {
            theta_plateau_residual = theta_plateau_residual.max((th - 1.0).abs());
        }
        if !(0.25..=4.0).contains(&a) {
            theta_leak = theta_leak.max(th.abs());
        }
        reproducing_residual = reproducing_residual.max((th * ps - ps).abs());
    }

    let mut radial_partition_residual: f64 = 0.0;
    let mut buf = vec![0.0; spec.dim()];
    for flat in 0..spec.len() {
        spec.frequency(flat, &mut buf);
        let r = euclid(&buf);
        if r >= lo && r <= hi {
            radial_partition_residual =
                radial_partition_residual.max((family.radial_partition_sum(&buf) - 1.0).abs());
        }
    }

    BumpCheck {
        grid: *spec,
        family,
        partition_residual,
        radial_partition_residual,
        theta_plateau_residual,
        theta_leak,
        reproducing_residual,
        square_sum_bounds: sq,
        max_overlap,
    }
}
