//! The sharpness multiplier `σ(ξ, η) = φ(|η|) e^{-ξ²/2} |η|^{iξ} (log|η|)^{-α}` on
//! `ℝ × ℝⁿ⁻¹`, its witness function and the closed form of `F_ξ^{-1}(σ f̂)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::json;

use super::{ExperimentResult, Sample, Verdict};
use crate::bumps::{euclid, smooth_step};
use crate::conditions::IndexBox;
use crate::error::{domain, Result};
use crate::grid::{inverse_transform, GridSpec, Spectrum};
use crate::symbol::Symbol;

/// `φ(t)`: zero on `(-∞, 8]`, one on `[9, ∞)`.
pub fn cutoff(t: f64) -> f64 {
    smooth_step(t - 8.0)
}

/// Surface measure of the unit sphere in `ℝᵈ⁺¹`, `2π^{(d+1)/2}/Γ((d+1)/2)`.
pub fn sphere_measure(d: usize) -> f64 {
    let m = d + 1;
    2.0 * PI.powf(m as f64 / 2.0) / gamma_half(m)
}

/// `Γ(m/2)` for a positive integer `m`.
fn gamma_half(m: usize) -> f64 {
    let (mut g, mut k) = if m.is_multiple_of(2) { (1.0, 2) } else { (PI.sqrt(), 1) };
    while k < m {
        g *= k as f64 / 2.0;
        k += 2;
    }
    g
}

#[derive(Clone, Debug, PartialEq)]
pub struct Example51 {
    pub alpha: f64,
    pub beta: f64,
    pub dim: usize,
}

impl Example51 {
    pub fn new(alpha: f64, beta: f64, dim: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(domain(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !(beta > 0.5 && beta.is_finite()) {
            return Err(domain(format!("beta must exceed 1/2, got {beta}")));
        }
        if dim < 2 {
            return Err(domain("the example lives on R x R^(n-1) with n >= 2"));
        }
        Ok(Self { alpha, beta, dim })
    }

    /// `σ(ξ, η)`; zero for `|η| ≤ 8`.
    pub fn sigma(&self, xi: f64, eta: &[f64]) -> Complex64 {
        self.sigma_radial(xi, euclid(eta))
    }

    pub fn sigma_radial(&self, xi: f64, rho: f64) -> Complex64 {
        if rho <= 8.0 {
            return Complex64::new(0.0, 0.0);
        }
        let l = rho.ln();
        Complex64::from_polar(cutoff(rho) * (-0.5 * xi * xi).exp() * l.powf(-self.alpha), xi * l)
    }

    /// `f̂(ξ, η) = e^{-ξ²/2} φ(|η|) |η|^{(1-n)/2} (log|η|)^{-1/2} (log log|η|)^{-β}`.
    pub fn witness_hat(&self, xi: f64, eta: &[f64]) -> f64 {
        self.witness_hat_radial(xi, euclid(eta))
    }

    pub fn witness_hat_radial(&self, xi: f64, rho: f64) -> f64 {
        if rho <= 8.0 {
            return 0.0;
        }
        let l = rho.ln();
        (-0.5 * xi * xi).exp()
            * cutoff(rho)
            * rho.powf((1.0 - self.dim as f64) / 2.0)
            * l.powf(-0.5)
            * l.ln().powf(-self.beta)
    }

    /// `√π e^{-(2πx + log ρ)²/4} φ²(ρ) ρ^{(1-n)/2} (log ρ)^{-α-1/2} (log log ρ)^{-β}`, `ρ = |η|`.
    pub fn closed_form(&self, x: f64, rho: f64) -> f64 {
        if rho <= 8.0 {
            return 0.0;
        }
        let l = rho.ln();
        let phase = 2.0 * PI * x + l;
        let c = cutoff(rho);
        PI.sqrt()
            * (-0.25 * phase * phase).exp()
            * c
            * c
            * rho.powf((1.0 - self.dim as f64) / 2.0)
            * l.powf(-self.alpha - 0.5)
            * l.ln().powf(-self.beta)
    }

    /// Integrand of the squared `L²(ℝⁿ⁻¹)` norm of the closed form at `x`, in the
    /// log-radius `u = log|η|`, without the sphere measure. The powers of `|η|`
    /// cancel against the radial Jacobian, so nothing overflows at large `u`.
    pub fn shell_density(&self, x: f64, u: f64) -> f64 {
        if u <= 8f64.ln() {
            return 0.0;
        }
        let c = if u < 9f64.ln() { cutoff(u.exp()) } else { 1.0 };
        let phase = 2.0 * PI * x + u;
        PI * (-0.5 * phase * phase).exp() * c.powi(4) * u.powf(-2.0 * self.alpha - 1.0) * u.ln().powf(-2.0 * self.beta)
    }

    /// Constant `c` of the lower bound
    /// `closed_form ≥ c e^{2πx(n-1)/2} (-x)^{-α-1/2} (log(-x))^{-β}` on
    /// `{x < -2, e^{-2πx-1} < |η| < e^{-2πx}}`.
    pub fn lower_bound_constant(&self) -> f64 {
        PI.sqrt()
            * (-0.25f64).exp()
            * (2.0 * PI).powf(-self.alpha - 0.5)
            * (1.0 + (2.0 * PI).ln() / 2f64.ln()).powf(-self.beta)
    }

    pub fn lower_bound(&self, x: f64) -> f64 {
        self.lower_bound_constant()
            * (PI * x * (self.dim as f64 - 1.0)).exp()
            * (-x).powf(-self.alpha - 0.5)
            * (-x).ln().powf(-self.beta)
    }
}

impl Symbol for Example51 {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, xi: &[f64]) -> Complex64 {
        self.sigma(xi[0], &xi[1..])
    }
    fn name(&self) -> String {
        format!("example51:alpha={}", self.alpha)
    }
    /// `k ∈ [-2, 2]` in the first variable; `ℓ ∈ [1, 12]` elsewhere (pieces with
    /// `ℓ ≤ 2` vanish).
    fn index_hint(&self) -> IndexBox {
        let mut lo = vec![1; self.dim];
        let mut hi = vec![12; self.dim];
        lo[0] = -2;
        hi[0] = 2;
        IndexBox { lo, hi }
    }
}

/// Compares the numeric partial inverse transform `F_ξ^{-1}(σ f̂)(·, η)` with the
/// closed form on each shell `|η| = ρ`.
///
/// `xi_grid` is one-dimensional; its frequency lattice carries `ξ` and its spatial
/// lattice carries `x`. Points count as interior when `|x| < L/4` and the closed form
/// is at least `1e-6` of its maximum on the shell.
pub fn keystone_check(ex: &Example51, xi_grid: GridSpec, shells: &[f64], tol: f64) -> Result<ExperimentResult> {
    if xi_grid.dim() != 1 {
        return Err(domain("the keystone check runs on a one-dimensional xi grid"));
    }
    let mut samples = Vec::new();
    let mut worst: f64 = 0.0;
    for &rho in shells {
        let spectrum = Spectrum::from_fn(xi_grid, |xi| {
            ex.sigma_radial(xi[0], rho) * ex.witness_hat_radial(xi[0], rho)
        });
        let numeric = inverse_transform(&spectrum);
        let exact: Vec<f64> = (0..xi_grid.samples()).map(|i| ex.closed_form(xi_grid.coord(i), rho)).collect();
        let peak = exact.iter().copied().fold(0.0, f64::max);
        let mut err: f64 = 0.0;
        for (i, (num, cf)) in numeric.values().iter().zip(&exact).enumerate() {
            let x = xi_grid.coord(i);
            if x.abs() < xi_grid.extent() / 4.0 && *cf >= 1e-6 * peak && *cf > 0.0 {
                err = err.max((num - Complex64::new(*cf, 0.0)).norm() / cf);
            }
        }
        worst = worst.max(err);
        samples.push(Sample::new([("rho", rho)], err));
    }
    let params = BTreeMap::from([
        ("alpha".to_string(), json!(ex.alpha)),
        ("beta".to_string(), json!(ex.beta)),
        ("dim".to_string(), json!(ex.dim)),
        ("grid".to_string(), json!(xi_grid.to_string())),
        ("shells".to_string(), json!(shells)),
        ("tol".to_string(), json!(tol)),
    ]);
    Ok(ExperimentResult {
        name: "keystone".into(),
        params,
        samples,
        ratios: vec![worst],
        verdict: Verdict::pass_if(
            worst <= tol,
            format!("max relative error on interior points <= {tol:e} (observed {worst:.3e})"),
        ),
    })
}
