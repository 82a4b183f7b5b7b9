//! The two one-dimensional dilation inequalities
//! `‖f(2ᵏ·)ψ̂‖_r ≲ ‖(I-∂²)^{γ/2} f‖_r` and
//! `‖(-∂²)^{γ/2}[f(2ᵏ·)ψ̂]‖_r ≲ (1 + 2^{k(γ-1/r)}) ‖(I-∂²)^{γ/2} f‖_r`.
//!
//! `f(2ᵏ·)` is the same sample array on the grid of extent `L·2^{-k}`, so every
//! dilation is exact.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::json;

use super::{fit_slope, ExperimentResult, Sample, Verdict};
use crate::bumps::psi_hat;
use crate::conditions::exponent_json;
use crate::error::{domain, Result};
use crate::grid::{check_exponent, lebesgue_norm, Field};
use crate::operators::{fractional_bessel, fractional_laplacian, BesselMode};

/// Largest tolerated last/first ratio for "no growth".
pub const FLAT_TOL: f64 = 1.1;

fn check_inputs(f: &Field, gamma: f64, r: f64, ks: &[i32]) -> Result<()> {
    check_exponent(r)?;
    if f.spec().dim() != 1 {
        return Err(domain("the dilation lemmas are one-dimensional"));
    }
    if !(gamma > 0.0) || !(gamma * r > 1.0) {
        return Err(domain(format!("need gamma > 0 and gamma*r > 1, got gamma={gamma}, r={r}")));
    }
    if ks.is_empty() {
        return Err(domain("empty k range"));
    }
    Ok(())
}

/// `f(2ᵏ·)` on its dilated grid; that grid must contain `[-4, 4)` at spacing `≤ 1/8`.
fn dilated(f: &Field, k: i32) -> Result<Field> {
    let g = f.dilate(k);
    let spec = g.spec();
    if spec.extent() < 8.0 || spec.spacing() > 0.125 {
        return Err(domain(format!(
            "grid {} cannot resolve the bump after dilation by 2^{k} (extent {}, spacing {})",
            f.spec(),
            spec.extent(),
            spec.spacing()
        )));
    }
    Ok(g)
}

fn times_psi(g: &Field) -> Field {
    let spec = *g.spec();
    let values = g
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v * psi_hat(spec.coord(i)))
        .collect();
    Field::new(spec, values).expect("finite")
}

fn sobolev_norm(f: &Field, gamma: f64, r: f64) -> Result<f64> {
    lebesgue_norm(&fractional_bessel(f, &BesselMode::Axis(0), gamma)?, r)
}

fn base_params(f: &Field, gamma: f64, r: f64, ks: &[i32]) -> BTreeMap<String, serde_json::Value> {
    BTreeMap::from([
        ("grid".to_string(), json!(f.spec().to_string())),
        ("gamma".to_string(), json!(gamma)),
        ("r".to_string(), exponent_json(r)),
        ("k".to_string(), json!(ks)),
    ])
}

/// Ratios `‖f(2ᵏ·)ψ̂‖_r / ‖(I-∂²)^{γ/2} f‖_r`; passes when the last ratio is at most
/// `1.1` times the first.
pub fn check_1d_identity(f: &Field, gamma: f64, r: f64, ks: &[i32]) -> Result<ExperimentResult> {
    check_inputs(f, gamma, r, ks)?;
    let denom = sobolev_norm(f, gamma, r)?;
    let mut ratios = Vec::with_capacity(ks.len());
    for &k in ks {
        let num = lebesgue_norm(&times_psi(&dilated(f, k)?), r)?;
        ratios.push(if denom > 0.0 { num / denom } else { 0.0 });
    }
    let (first, last) = (ratios[0], *ratios.last().unwrap());
    let finite = ratios.iter().all(|v| v.is_finite());
    let flat = if first > 0.0 { last / first <= FLAT_TOL } else { ratios.iter().all(|v| *v == 0.0) };
    let fitted = ratios.iter().copied().fold(0.0, f64::max);
    let mut params = base_params(f, gamma, r, ks);
    params.insert("fitted_constant".into(), json!(fitted));
    Ok(ExperimentResult {
        name: "identity".into(),
        params,
        samples: ks.iter().zip(&ratios).map(|(k, v)| Sample::new([("k", *k as f64)], *v)).collect(),
        ratios,
        verdict: Verdict::pass_if(
            finite && flat,
            format!("all ratios finite and last/first <= {FLAT_TOL}"),
        ),
    })
}

/// Normalized ratios `‖(-∂²)^{γ/2}[f(2ᵏ·)ψ̂]‖_r / ((1 + 2^{k(γ-1/r)}) ‖(I-∂²)^{γ/2} f‖_r)`
/// together with the raw quotient `‖(-∂²)^{γ/2}[f(2ᵏ·)]‖_r / ‖(I-∂²)^{γ/2} f‖_r`.
///
/// Passes when the normalized ratios grow at most at a tenth of the rate
/// `γ - 1/r` and the fitted log₂-slope of the raw quotient is within 10% of it.
pub fn check_1d_laplacian(f: &Field, gamma: f64, r: f64, ks: &[i32]) -> Result<ExperimentResult> {
    check_inputs(f, gamma, r, ks)?;
    let rate = gamma - 1.0 / r;
    let denom = sobolev_norm(f, gamma, r)?;
    let mut normalized = Vec::with_capacity(ks.len());
    let mut raw = Vec::with_capacity(ks.len());
    for &k in ks {
        let g = dilated(f, k)?;
        let piece = lebesgue_norm(&fractional_laplacian(&times_psi(&g), 0, gamma)?, r)?;
        let whole = lebesgue_norm(&fractional_laplacian(&g, 0, gamma)?, r)?;
        let scale = 1.0 + 2f64.powf(k as f64 * rate);
        if denom > 0.0 {
            normalized.push(piece / (scale * denom));
            raw.push(whole / denom);
        } else {
            normalized.push(0.0);
            raw.push(0.0);
        }
    }
    // pieces that underflow to zero carry no growth and are left out of the fits
    let log2_fit = |v: &[f64], empty: f64| {
        let (x, y): (Vec<f64>, Vec<f64>) = ks
            .iter()
            .zip(v)
            .filter(|(_, v)| **v > 0.0)
            .map(|(k, v)| (*k as f64, v.log2()))
            .unzip();
        if x.len() < 2 {
            empty
        } else {
            fit_slope(&x, &y)
        }
    };
    let norm_slope = log2_fit(&normalized, 0.0);
    let raw_slope = log2_fit(&raw, rate);
    let bounded = normalized.iter().all(|v| v.is_finite()) && norm_slope <= 0.1 * rate;
    let raw_ok = (raw_slope - rate).abs() <= 0.1 * rate.abs();
    let mut params = base_params(f, gamma, r, ks);
    params.insert("derived_exponent".into(), json!(rate));
    params.insert("raw_exponent".into(), json!(raw_slope));
    params.insert("normalized_slope".into(), json!(norm_slope));
    let mut samples: Vec<Sample> = ks
        .iter()
        .zip(&normalized)
        .map(|(k, v)| Sample::new([("k", *k as f64), ("raw", 0.0)], *v))
        .collect();
    samples.extend(ks.iter().zip(&raw).map(|(k, v)| Sample::new([("k", *k as f64), ("raw", 1.0)], *v)));
    Ok(ExperimentResult {
        name: "laplacian".into(),
        params,
        samples,
        ratios: normalized,
        verdict: Verdict::pass_if(
            bounded && raw_ok,
            format!("normalized log2-slope <= 0.1*(gamma-1/r) and raw log2-slope within 10% of {rate:.4}"),
        ),
    })
}

/// `e^{-π x²/w²}` on a one-dimensional grid.
pub fn gaussian_1d(spec: crate::grid::GridSpec, width: f64) -> Field {
    Field::from_fn(spec, |x| Complex64::new((-std::f64::consts::PI * x[0] * x[0] / (width * width)).exp(), 0.0))
}
