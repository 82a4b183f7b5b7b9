//! Truncated mixed norms `‖·‖_{L^p(|x| ≤ R; L²(ℝⁿ⁻¹))}` of the closed-form
//! `F_ξ^{-1}(σ f̂)` and of the witness itself, with rate-based verdicts.
//!
//! The inner `L²` norm uses the radial reduction in the log-radius `u = log|η|`;
//! the outer integral is composite Gauss–Legendre on dyadic segments.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::json;

use super::example51::{cutoff, sphere_measure, Example51};
use super::{ExperimentResult, Sample, Status, Verdict};
use crate::error::{domain, Result};
use crate::quad::GaussLegendre;

const ORDER: usize = 64;
/// Half-width of the `u` window around the Gaussian peak at `u = -2πx`.
const PEAK_HALF_WIDTH: f64 = 12.0;
/// Largest tolerated deviation of measured from predicted increment ratios.
pub const RATE_TOL: f64 = 0.15;
/// Largest relative change over the last doubling for a Cauchy ladder.
pub const CAUCHY_TOL: f64 = 0.01;

/// `‖F_ξ^{-1}(σ f̂)(x, ·)‖_{L²(ℝⁿ⁻¹)}`.
pub fn inner_norm(ex: &Example51, q: &GaussLegendre, x: f64) -> f64 {
    let (l8, l9) = (8f64.ln(), 9f64.ln());
    let t = -2.0 * PI * x;
    let lo = l8.max(t - PEAK_HALF_WIDTH);
    let hi = t + PEAK_HALF_WIDTH;
    if hi <= lo {
        return 0.0;
    }
    let mut breaks = vec![lo];
    if lo < l9 && l9 < hi {
        breaks.push(l9);
    }
    breaks.push(hi);
    let s = q.integrate_pieces(&breaks, |u| ex.shell_density(x, u));
    (sphere_measure(ex.dim - 2) * s).sqrt()
}

/// Segment edges `0, ±1/2, ±1, ±2, ±4, …` up to the largest radius, plus every radius.
fn x_edges(radii: &[f64]) -> Vec<f64> {
    let top = radii.iter().copied().fold(0.0, f64::max);
    let mut pos = vec![0.5, 1.0];
    let mut e = 2.0;
    while e < top {
        pos.push(e);
        e *= 2.0;
    }
    pos.extend_from_slice(radii);
    pos.retain(|v| *v <= top);
    pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pos.dedup();
    pos
}

/// `∫_{-R}^{R} g(x)^p dx` for every radius, where `g` is radial-reduced.
fn truncated_powers(radii: &[f64], p: f64, g: impl Fn(f64) -> f64 + Sync) -> Vec<f64> {
    let q = GaussLegendre::new(ORDER);
    let edges = x_edges(radii);
    let mut lows = vec![0.0];
    lows.extend_from_slice(&edges[..edges.len() - 1]);
    // the shell at |x| ∈ [a, b) contributes both signs
    let shells: Vec<f64> = lows
        .par_iter()
        .zip(edges.par_iter())
        .map(|(&a, &b)| q.integrate(a, b, |x| g(x).powf(p)) + q.integrate(-b, -a, |x| g(x).powf(p)))
        .collect();
    radii
        .iter()
        .map(|&r| {
            edges
                .iter()
                .zip(&shells)
                .filter(|(b, _)| **b <= r)
                .map(|(_, s)| s)
                .sum()
        })
        .collect()
}

fn check_ladder(radii: &[f64], min_first: f64) -> Result<()> {
    if radii.len() < 3 {
        return Err(domain("the radius ladder needs at least three radii"));
    }
    if radii[0] < min_first || radii.windows(2).any(|w| !(w[1] > w[0])) || radii.iter().any(|r| !r.is_finite()) {
        return Err(domain(format!(
            "radii must be finite, strictly increasing and start at >= {min_first}"
        )));
    }
    Ok(())
}

/// Rates `D_{i+1}/D_i` of the increments over the predicted `E_{i+1}/E_i`.
fn rate_ratios(powers: &[f64], predicted: &[f64]) -> Vec<f64> {
    let d: Vec<f64> = powers.windows(2).map(|w| w[1] - w[0]).collect();
    d.windows(2)
        .zip(predicted.windows(2))
        .map(|(m, e)| (m[1] / m[0]) / (e[1] / e[0]))
        .collect()
}

fn rate_verdict(diverges: bool, ratios: &[f64], norms: &[f64]) -> Verdict {
    let tracks = ratios.iter().all(|r| (r - 1.0).abs() <= RATE_TOL);
    let n = norms.len();
    let last_change = norms[n - 1] / norms[n - 2] - 1.0;
    if diverges && tracks {
        Verdict::new(
            Status::Diverges,
            format!("predicted integral diverges and every increment ratio is within {RATE_TOL} of the prediction"),
        )
    } else if last_change.abs() <= CAUCHY_TOL {
        Verdict::new(
            Status::Converges,
            format!("last step changes the norm by {last_change:.3e} <= {CAUCHY_TOL}"),
        )
    } else {
        Verdict::new(
            Status::Inconclusive,
            format!("neither rate tracking (divergent prediction: {diverges}) nor a Cauchy ladder (last change {last_change:.3e})"),
        )
    }
}

/// `∫_a^b t^{-e} (log t)^{-f} dt`.
fn log_power_integral(q: &GaussLegendre, a: f64, b: f64, e: f64, f: f64) -> f64 {
    q.integrate(a, b, |t| t.powf(-e) * t.ln().powf(-f))
}

/// Truncated mixed norm of `F_ξ^{-1}(σ f̂)` along a radius ladder.
///
/// The prediction compares increments with
/// `∫_{R_i}^{R_{i+1}} t^{-(α+1/2)p} (log t)^{-βp} dt`.
pub fn sharpness_scan(alpha: f64, p: f64, beta: f64, radii: &[f64], dim: usize) -> Result<ExperimentResult> {
    if !(p > 1.0 && p < 2.0) {
        return Err(domain(format!("the scan covers 1 < p < 2, got p = {p}")));
    }
    check_ladder(radii, 4.0)?;
    let ex = Example51::new(alpha, beta, dim)?;
    let q = GaussLegendre::new(ORDER);
    let powers = truncated_powers(radii, p, |x| inner_norm(&ex, &q, x));
    let norms: Vec<f64> = powers.iter().map(|s| s.powf(1.0 / p)).collect();
    let (e, f) = ((alpha + 0.5) * p, beta * p);
    let predicted: Vec<f64> = radii.windows(2).map(|w| log_power_integral(&q, w[0], w[1], e, f)).collect();
    let diverges = e < 1.0 - 1e-12 || ((e - 1.0).abs() <= 1e-12 && f <= 1.0);
    let ratios = rate_ratios(&powers, &predicted);
    let verdict = rate_verdict(diverges, &ratios, &norms);
    let samples = radii.iter().zip(&norms).map(|(r, n)| Sample::new([("R", *r)], *n)).collect();
    let params = BTreeMap::from([
        ("alpha".to_string(), json!(alpha)),
        ("p".to_string(), json!(p)),
        ("beta".to_string(), json!(beta)),
        ("dim".to_string(), json!(dim)),
        ("radii".to_string(), json!(radii)),
        ("predicted_exponent".to_string(), json!(e)),
        ("predicted_divergent".to_string(), json!(diverges)),
        ("beta_at_most_1_over_p".to_string(), json!(beta <= 1.0 / p)),
    ]);
    Ok(ExperimentResult {
        name: "sharpness".into(),
        params,
        samples,
        ratios,
        verdict,
    })
}

/// Mixed norm of the witness `f` truncated to `|η| ≤ exp(exp(V))`, along a ladder of
/// `V` values.
///
/// In `x` the witness is `√(2π) e^{-2π²x²}`; in `η` the squared `L²` norm reduces
/// to `ω ∫ φ²(exp eᵛ) v^{-2β} dv`, compared against `∫ v^{-2β} dv`.
pub fn witness_membership(beta: f64, p: f64, dim: usize, loglog_radii: &[f64]) -> Result<ExperimentResult> {
    if !(p > 1.0 && p.is_finite()) || !(beta > 0.0) || dim < 2 {
        return Err(domain("membership needs p > 1, beta > 0 and n >= 2"));
    }
    check_ladder(loglog_radii, 1.0)?;
    let q = GaussLegendre::new(ORDER);
    let v8 = 8f64.ln().ln();
    let v9 = 9f64.ln().ln();
    let density = |v: f64| {
        let c = if v < v9 { cutoff(v.exp().exp()) } else { 1.0 };
        c * c * v.powf(-2.0 * beta)
    };
    let x_norm = (2.0 * PI).sqrt() * (2.0 * PI * p).powf(-1.0 / (2.0 * p));
    let omega = sphere_measure(dim - 2);
    let mut edges = vec![v8, v9];
    let mut e = 1.0;
    let top = *loglog_radii.last().unwrap();
    while e < top {
        edges.push(e);
        e *= 2.0;
    }
    edges.extend_from_slice(loglog_radii);
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup();
    let partial: Vec<f64> = loglog_radii
        .iter()
        .map(|&v| {
            let breaks: Vec<f64> = edges.iter().copied().filter(|b| *b <= v).collect();
            q.integrate_pieces(&breaks, density)
        })
        .collect();
    let norms: Vec<f64> = partial.iter().map(|s| x_norm * (omega * s).sqrt()).collect();
    let predicted: Vec<f64> = loglog_radii
        .windows(2)
        .map(|w| q.integrate(w[0], w[1], |v| v.powf(-2.0 * beta)))
        .collect();
    let ratios = rate_ratios(&partial, &predicted);
    let diverges = 2.0 * beta <= 1.0;
    let tracks = ratios.iter().all(|r| (r - 1.0).abs() <= RATE_TOL);
    let verdict = match (diverges, tracks) {
        (false, true) => Verdict::new(
            Status::Converges,
            "predicted tail is finite and the increments follow it",
        ),
        _ => rate_verdict(diverges, &ratios, &norms),
    };
    let samples = loglog_radii.iter().zip(&norms).map(|(v, n)| Sample::new([("loglogR", *v)], *n)).collect();
    let params = BTreeMap::from([
        ("beta".to_string(), json!(beta)),
        ("p".to_string(), json!(p)),
        ("dim".to_string(), json!(dim)),
        ("loglog_radii".to_string(), json!(loglog_radii)),
    ]);
    Ok(ExperimentResult {
        name: "membership".into(),
        params,
        samples,
        ratios,
        verdict,
    })
}

/// Powers-of-two ladder `2^lo, …, 2^hi`.
pub fn dyadic_ladder(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 2f64.powi(k)).collect()
}
