//! Pointwise domination `|Δ_J T_σ f| ≤ C K [M^{(1)}⋯M^{(n)}(|Δ_J^θ f|^ρ)]^{1/ρ}`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::json;

use super::{ExperimentResult, Sample, Verdict};
use crate::bumps::LpBump;
use crate::conditions::{exponent_json, product_sobolev_k, ConditionOptions};
use crate::error::{domain, Error, Result};
use crate::grid::Field;
use crate::operators::{apply_multiplier, littlewood_paley_product, strong_maximal, SmoothnessSpec};
use crate::symbol::{sample, Symbol};

/// Points where the right-hand side is below this fraction of its maximum are skipped.
pub const RHS_FLOOR: f64 = 1e-14;

/// `min(r, 1.99, (1/min γ + 2)/2)`.
pub fn default_rho(smooth: &SmoothnessSpec) -> f64 {
    smooth.r.min(1.99).min(0.5 * (1.0 / smooth.min_gamma() + 2.0))
}

/// Checks `1 ≤ ρ ≤ r`, `ρ < 2` and `ργ_ℓ > 1` for every `ℓ`.
pub fn check_rho(rho: f64, smooth: &SmoothnessSpec) -> Result<()> {
    if !(rho >= 1.0) {
        return Err(domain(format!("rho = {rho} violates 1 <= rho")));
    }
    if rho > smooth.r {
        return Err(domain(format!("rho = {rho} violates rho <= r = {}", smooth.r)));
    }
    if rho >= 2.0 {
        return Err(domain(format!("rho = {rho} violates rho < 2")));
    }
    if let Some((l, g)) = smooth.gamma.iter().enumerate().find(|(_, g)| rho * **g <= 1.0) {
        return Err(domain(format!(
            "infeasible rho = {rho}: constraint ργ_ℓ > 1 fails for l = {} (gamma = {g}); no rho < 2 works unless every gamma exceeds 1/2",
            l + 1
        )));
    }
    Ok(())
}

/// Largest pointwise ratio `|Δ_J T_σ f| / (K·[M(|Δ_J^θ f|^ρ)]^{1/ρ})` for a known `K`.
pub fn domination_ratio(sigma: &dyn Symbol, f: &Field, j: &[i32], rho: f64, k: f64) -> Result<f64> {
    let spec = *f.spec();
    if sigma.dim() != spec.dim() || j.len() != spec.dim() {
        return Err(domain("symbol, field and dyadic index must share the dimension"));
    }
    let symbol = sample(sigma, spec);
    if symbol.values().iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite {
            context: format!("symbol {} on the grid {spec}", sigma.name()),
        });
    }
    let lhs = littlewood_paley_product(&apply_multiplier(&symbol, f)?, j, LpBump::Psi)?;
    let theta = littlewood_paley_product(f, j, LpBump::Theta)?;
    let powered = Field::new(
        spec,
        theta.values().iter().map(|v| Complex64::new(v.norm().powf(rho), 0.0)).collect(),
    )?;
    let maximal = strong_maximal(&powered);
    let rhs: Vec<f64> = maximal.values().iter().map(|v| v.re.powf(1.0 / rho)).collect();
    let top = rhs.iter().copied().fold(0.0, f64::max);
    let floor = RHS_FLOOR * top;
    let mut best: f64 = 0.0;
    for (l, r) in lhs.values().iter().zip(&rhs) {
        if *r > 0.0 && *r >= floor {
            best = best.max(l.norm() / (k * r));
        }
    }
    Ok(best)
}

/// Evaluates `K` with `opts`, then the domination ratio.
pub fn check_domination(
    sigma: &dyn Symbol,
    f: &Field,
    j: &[i32],
    smooth: &SmoothnessSpec,
    rho: Option<f64>,
    opts: &ConditionOptions,
) -> Result<ExperimentResult> {
    let rho = rho.unwrap_or_else(|| default_rho(smooth));
    check_rho(rho, smooth)?;
    let k = product_sobolev_k(sigma, smooth, opts)?.value;
    if !(k > 0.0) {
        return Err(domain(format!("K = {k} vanishes for {}", sigma.name())));
    }
    let ratio = domination_ratio(sigma, f, j, rho, k)?;
    let params = BTreeMap::from([
        ("symbol".to_string(), json!(sigma.name())),
        ("grid".to_string(), json!(f.spec().to_string())),
        ("J".to_string(), json!(j)),
        ("gamma".to_string(), json!(smooth.gamma)),
        ("r".to_string(), exponent_json(smooth.r)),
        ("rho".to_string(), json!(rho)),
        ("K".to_string(), json!(k)),
    ]);
    let mut point = BTreeMap::new();
    for (axis, jj) in j.iter().enumerate() {
        point.insert(format!("j{}", axis + 1), *jj as f64);
    }
    Ok(ExperimentResult {
        name: "lemma21".into(),
        params,
        samples: vec![Sample { point, value: ratio }],
        ratios: vec![ratio],
        verdict: Verdict::pass_if(ratio.is_finite(), "max pointwise ratio LHS/(K*RHS) is finite"),
    })
}
