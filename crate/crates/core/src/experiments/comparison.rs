//! Product-Sobolev versus isotropic smoothness: `K(σ, γ) ≲ sup_j ‖(I-Δ)^{Σγ/2}[σ(2ʲ·)Φ̂]‖_r`,
//! and the failure of the reverse bound on the sharpness multiplier.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::json;

use super::example51::Example51;
use super::{fit_slope, ExperimentResult, Sample, Verdict};
use crate::conditions::{exponent_json, hormander_norm, mixed_smoothness_at, product_sobolev_k, ConditionOptions, IndexBox, WindowGrid};
use crate::error::{domain, Result};
use crate::operators::SmoothnessSpec;
use crate::symbol::Symbol;

/// Largest tolerated spread of fitted constants across refinements.
pub const STABILITY_FACTOR: f64 = 2.0;

fn check_smoothness(smooth: &SmoothnessSpec) -> Result<()> {
    if !(smooth.r > 1.0 && smooth.r.is_finite()) {
        return Err(domain(format!("the comparison needs 1 < r < inf, got {}", smooth.r)));
    }
    if smooth.above_threshold().iter().any(|ok| !ok) {
        return Err(domain(format!(
            "every gamma must exceed 1/r = {}, got {:?}",
            1.0 / smooth.r,
            smooth.gamma
        )));
    }
    Ok(())
}

/// `K` and the isotropic constant at one window resolution, the latter over the
/// `K` clamp widened by `n` on each side.
/// `(K, isotropic, [(window samples, K, isotropic)])`.
type Sides = (f64, f64, Vec<(usize, f64, f64)>);

fn both_sides(sigma: &dyn Symbol, smooth: &SmoothnessSpec, opts: &ConditionOptions) -> Result<Sides> {
    let k = product_sobolev_k(sigma, smooth, opts)?;
    let n = sigma.dim() as i32;
    let hull = k.clamp.hull_1d();
    let wide = IndexBox::new(vec![hull.lo[0] - n], vec![hull.hi[0] + n])?;
    let h_opts = ConditionOptions {
        index_box: Some(wide),
        ..opts.clone()
    };
    let h = hormander_norm(sigma, smooth.total(), smooth.r, &h_opts)?;
    let refined = k
        .refinement
        .iter()
        .zip(&h.refinement)
        .map(|(a, b)| (a.samples, a.value, b.value))
        .collect();
    Ok((k.value, h.value, refined))
}

fn side_ratio(k: f64, h: f64) -> f64 {
    if h > 0.0 {
        k / h
    } else if k > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Ratio `K(σ, γ) / sup_j ‖(I-Δ)^{Σγ/2}[σ(2ʲ·)Φ̂]‖_r`, at the main window and every
/// refinement in `opts`.
pub fn check_comparison(sigma: &dyn Symbol, smooth: &SmoothnessSpec, opts: &ConditionOptions) -> Result<ExperimentResult> {
    check_smoothness(smooth)?;
    let (k, h, refined) = both_sides(sigma, smooth, opts)?;
    let mut samples = vec![Sample::new([("window", opts.window.samples as f64)], side_ratio(k, h))];
    samples.extend(refined.iter().map(|(m, a, b)| Sample::new([("window", *m as f64)], side_ratio(*a, *b))));
    let ratios: Vec<f64> = samples.iter().map(|s| s.value).collect();
    let contradiction = h == 0.0 && k > 0.0;
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(l, u), v| (l.min(*v), u.max(*v)));
    let stable = hi == 0.0 || hi <= STABILITY_FACTOR * lo;
    let params = BTreeMap::from([
        ("symbol".to_string(), json!(sigma.name())),
        ("gamma".to_string(), json!(smooth.gamma)),
        ("r".to_string(), exponent_json(smooth.r)),
        ("K".to_string(), json!(k)),
        ("hormander".to_string(), json!(h)),
        ("window".to_string(), json!(opts.window)),
    ]);
    let verdict = if contradiction {
        Verdict::pass_if(false, "isotropic side vanishes while K > 0")
    } else {
        Verdict::pass_if(
            ratios.iter().all(|r| r.is_finite()) && stable,
            format!("ratio finite and stable within factor {STABILITY_FACTOR} across window refinements"),
        )
    };
    Ok(ExperimentResult {
        name: "comparison".into(),
        params,
        samples,
        ratios,
        verdict,
    })
}

/// Fits one constant `C = max_σ K/H` per window resolution over a symbol test set.
///
/// Passes when every ratio is finite, each symbol's ratio moves by at most a factor 2
/// across resolutions, and so does the fitted constant.
pub fn comparison_suite(
    symbols: &[Arc<dyn Symbol>],
    smooth: &SmoothnessSpec,
    windows: &[usize],
    index_box: Option<IndexBox>,
) -> Result<ExperimentResult> {
    check_smoothness(smooth)?;
    if windows.is_empty() || symbols.is_empty() {
        return Err(domain("the comparison suite needs symbols and window resolutions"));
    }
    let mut samples = Vec::new();
    let mut per_symbol: Vec<Vec<f64>> = Vec::new();
    for (i, sigma) in symbols.iter().enumerate() {
        let mut row = Vec::new();
        for &m in windows {
            let opts = ConditionOptions {
                window: WindowGrid::with_samples(m),
                index_box: index_box.clone(),
                refinement: Vec::new(),
            };
            let (k, h, _) = both_sides(sigma.as_ref(), smooth, &opts)?;
            let ratio = side_ratio(k, h);
            samples.push(Sample::new([("symbol", i as f64), ("window", m as f64)], ratio));
            row.push(ratio);
        }
        per_symbol.push(row);
    }
    let fitted: Vec<f64> = (0..windows.len())
        .map(|w| per_symbol.iter().map(|row| row[w]).fold(0.0, f64::max))
        .collect();
    let spread = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(0.0, f64::max);
        hi == 0.0 || hi <= STABILITY_FACTOR * lo
    };
    let finite = per_symbol.iter().flatten().all(|r| r.is_finite());
    let ok = finite && spread(&fitted) && per_symbol.iter().all(|row| spread(row));
    let names: Vec<String> = symbols.iter().map(|s| s.name()).collect();
    let params = BTreeMap::from([
        ("symbols".to_string(), json!(names)),
        ("gamma".to_string(), json!(smooth.gamma)),
        ("r".to_string(), exponent_json(smooth.r)),
        ("windows".to_string(), json!(windows)),
        ("fitted_constants".to_string(), json!(fitted)),
    ]);
    Ok(ExperimentResult {
        name: "comparison_suite".into(),
        params,
        samples,
        ratios: fitted,
        verdict: Verdict::pass_if(
            ok,
            format!("one fitted constant bounds every ratio, stable within factor {STABILITY_FACTOR} across resolutions"),
        ),
    })
}

/// One-sidedness on the sharpness multiplier (`n = 2`).
///
/// With `ξ`-smoothness `α` the `(0, ℓ)` piece norms stay bounded in `ℓ`; with
/// excess smoothness `γ₁ > α` they grow like `ℓ^{γ₁-α}`. Passes when the excess
/// series' log-log slope is within 20% of `γ₁ - α` and the bounded series' slope
/// is at most a fifth of it.
pub fn one_sidedness(alpha: f64, gamma1: f64, s: f64, r: f64, ells: &[i32], window: WindowGrid) -> Result<ExperimentResult> {
    if !(gamma1 > alpha) {
        return Err(domain(format!("excess smoothness needs gamma1 > alpha, got {gamma1} <= {alpha}")));
    }
    if ells.len() < 2 || ells.iter().any(|l| *l < 3) {
        return Err(domain("need at least two scales l >= 3"));
    }
    let sigma = Example51::new(alpha, 0.75, 2)?;
    let indices: Vec<Vec<i32>> = ells.iter().map(|l| vec![0, *l]).collect();
    let bounded: Vec<f64> = mixed_smoothness_at(&sigma, alpha, s, r, window, &indices)?.iter().map(|v| v.value).collect();
    let excess: Vec<f64> = mixed_smoothness_at(&sigma, gamma1, s, r, window, &indices)?.iter().map(|v| v.value).collect();
    let lx: Vec<f64> = ells.iter().map(|l| (*l as f64).ln()).collect();
    let ln = |v: &[f64]| v.iter().map(|x| x.ln()).collect::<Vec<f64>>();
    let target = gamma1 - alpha;
    let grow = fit_slope(&lx, &ln(&excess));
    let flat = fit_slope(&lx, &ln(&bounded));
    let ok = (grow - target).abs() <= 0.2 * target && flat <= 0.2 * target;
    let mut samples: Vec<Sample> = ells
        .iter()
        .zip(&bounded)
        .map(|(l, v)| Sample::new([("l", *l as f64), ("excess", 0.0)], *v))
        .collect();
    samples.extend(ells.iter().zip(&excess).map(|(l, v)| Sample::new([("l", *l as f64), ("excess", 1.0)], *v)));
    let spread = bounded.iter().copied().fold(0.0, f64::max) / bounded.iter().copied().fold(f64::INFINITY, f64::min);
    let params = BTreeMap::from([
        ("alpha".to_string(), json!(alpha)),
        ("gamma1".to_string(), json!(gamma1)),
        ("s".to_string(), json!(s)),
        ("r".to_string(), exponent_json(r)),
        ("l".to_string(), json!(ells)),
        ("window".to_string(), json!(window)),
        ("excess_slope".to_string(), json!(grow)),
        ("bounded_slope".to_string(), json!(flat)),
        ("bounded_max_over_min".to_string(), json!(spread)),
    ]);
    Ok(ExperimentResult {
        name: "one_sidedness".into(),
        params,
        samples,
        ratios: vec![grow, flat],
        verdict: Verdict::pass_if(
            ok,
            format!("excess slope within 20% of {target:.3} and bounded slope <= {:.3}", 0.2 * target),
        ),
    })
}
