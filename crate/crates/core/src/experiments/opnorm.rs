//! Lower bounds `‖T_σ f‖_p / ‖f‖_p` on operator norms.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::json;

use super::example51::Example51;
use super::{ExperimentResult, Sample, Verdict};
use crate::error::{domain, Error, Result};
use crate::grid::{check_exponent, inverse_transform, lebesgue_norm, Field, GridSpec, Spectrum};
use crate::operators::apply_multiplier;
use crate::symbol::{sample, Symbol};

fn check_p(p: f64) -> Result<()> {
    check_exponent(p)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(domain(format!("p must lie in (1, inf), got {p}")));
    }
    Ok(())
}

/// `‖T_σ f‖_{L^p} / ‖f‖_{L^p}` on the grid of `f`.
pub fn opnorm_ratio(sigma: &dyn Symbol, f: &Field, p: f64) -> Result<f64> {
    check_p(p)?;
    let denom = lebesgue_norm(f, p)?;
    if denom == 0.0 {
        return Err(domain("the test function vanishes"));
    }
    let symbol = sample(sigma, *f.spec());
    if symbol.values().iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite {
            context: format!("symbol {} on the grid {}", sigma.name(), f.spec()),
        });
    }
    Ok(lebesgue_norm(&apply_multiplier(&symbol, f)?, p)? / denom)
}

/// Maximizes [`opnorm_ratio`] over a family of test functions.
pub fn opnorm_scan(sigma: &dyn Symbol, family: &[Field], p: f64) -> Result<ExperimentResult> {
    if family.is_empty() {
        return Err(domain("empty test family"));
    }
    let ratios = family.iter().map(|f| opnorm_ratio(sigma, f, p)).collect::<Result<Vec<f64>>>()?;
    let best = ratios.iter().copied().fold(0.0, f64::max);
    let params = BTreeMap::from([
        ("symbol".to_string(), json!(sigma.name())),
        ("p".to_string(), json!(p)),
        ("family_size".to_string(), json!(family.len())),
        ("lower_bound".to_string(), json!(best)),
    ]);
    Ok(ExperimentResult {
        name: "opnorm".into(),
        params,
        samples: ratios.iter().enumerate().map(|(i, r)| Sample::new([("member", i as f64)], *r)).collect(),
        ratios,
        verdict: Verdict::pass_if(best.is_finite(), "lower bound is finite"),
    })
}

/// Wave packets `e^{2πi ξ₀·x} e^{-π|x|²/w²}` centred at the given frequencies.
pub fn wave_packets(spec: GridSpec, centres: &[Vec<f64>], width: f64) -> Vec<Field> {
    centres
        .iter()
        .map(|c| {
            Field::from_fn(spec, |x| {
                let phase: f64 = x.iter().zip(c).map(|(a, b)| a * b).sum();
                let r2: f64 = x.iter().map(|a| a * a).sum();
                Complex64::from_polar((-std::f64::consts::PI * r2 / (width * width)).exp(), 2.0 * std::f64::consts::PI * phase)
            })
        })
        .collect()
}

/// The operator-norm ratio of the sharpness multiplier on its own witness, whose
/// spectrum is truncated to each grid's frequency box. Passes when the ratio
/// increases strictly along the ladder.
pub fn example51_opnorm_ladder(alpha: f64, beta: f64, p: f64, grids: &[GridSpec]) -> Result<ExperimentResult> {
    check_p(p)?;
    if grids.len() < 2 || grids.iter().any(|g| g.dim() != 2) {
        return Err(domain("the ladder needs at least two planar grids"));
    }
    let ex = Example51::new(alpha, beta, 2)?;
    let mut ratios = Vec::with_capacity(grids.len());
    for spec in grids {
        let witness = inverse_transform(&Spectrum::from_fn(*spec, |xi| Complex64::new(ex.witness_hat(xi[0], &xi[1..]), 0.0)));
        ratios.push(opnorm_ratio(&ex, &witness, p)?);
    }
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    let params = BTreeMap::from([
        ("alpha".to_string(), json!(alpha)),
        ("beta".to_string(), json!(beta)),
        ("p".to_string(), json!(p)),
        ("grids".to_string(), json!(grids.iter().map(|g| g.to_string()).collect::<Vec<_>>())),
    ]);
    Ok(ExperimentResult {
        name: "opnorm_ladder".into(),
        params,
        samples: grids.iter().zip(&ratios).map(|(g, r)| Sample::new([("nyquist", g.nyquist())], *r)).collect(),
        ratios,
        verdict: Verdict::pass_if(increasing, "ratio increases strictly along the frequency-box ladder"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{FnSymbol, Identity};

    #[test]
    fn identity_has_ratio_one() {
        let spec = GridSpec::new(2, 32, 8.0).unwrap();
        for f in wave_packets(spec, &[vec![0.0, 0.0], vec![1.0, -0.5]], 1.0) {
            let r = opnorm_ratio(&Identity { dim: 2 }, &f, 1.5).unwrap();
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_function_is_rejected() {
        let spec = GridSpec::new(1, 32, 8.0).unwrap();
        assert!(opnorm_ratio(&Identity { dim: 1 }, &Field::zeros(spec), 2.0).is_err());
        let f = wave_packets(spec, &[vec![0.0]], 1.0).remove(0);
        assert!(opnorm_ratio(&Identity { dim: 1 }, &f, 1.0).is_err());
    }

    #[test]
    fn spike_family_reaches_sup_at_p2() {
        let sigma = FnSymbol::new(1, "bump", |xi: &[f64]| Complex64::new(1.0 + 2.0 * (-(xi[0] - 1.5).powi(2)).exp(), 0.0));
        let spec = GridSpec::new(1, 1024, 128.0).unwrap();
        let centres: Vec<Vec<f64>> = (-16..=16).map(|k| vec![k as f64 * 0.25]).collect();
        let res = opnorm_scan(&sigma, &wave_packets(spec, &centres, 24.0), 2.0).unwrap();
        let best = res.params["lower_bound"].as_f64().unwrap();
        assert!((best - 3.0).abs() <= 0.01 * 3.0, "{best}");
    }
}
