//! Smoothness condition functionals of multiplier theorems.
//!
//! The Sobolev-type functionals localise `σ` to one dyadic piece at a time, sample
//! the piece on a dedicated window grid over `[-4, 4)ⁿ` (the support of `θ̂` plus
//! margin), apply the relevant Bessel potential spectrally and take the `L^r`
//! norm. The reported value is the maximum over the scanned index box.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bumps::{psi_hat, radial_bump};
use crate::error::{domain, Error, Result};
use crate::grid::{check_exponent, lebesgue_norm, Field, GridSpec};
use crate::operators::{bessel_blocks, SmoothnessSpec};
use crate::symbol::Symbol;

/// A box `[lo_1, hi_1] × ⋯ × [lo_d, hi_d]` of dyadic multi-indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexBox {
    pub lo: Vec<i32>,
    pub hi: Vec<i32>,
}

impl IndexBox {
    pub fn new(lo: Vec<i32>, hi: Vec<i32>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(domain("index box bounds must have equal, nonzero length"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(domain(format!("empty index box {lo:?}..{hi:?}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(dim: usize, lo: i32, hi: i32) -> Self {
        Self {
            lo: vec![lo; dim],
            hi: vec![hi; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, index: &[i32]) -> bool {
        index.len() == self.dim() && index.iter().zip(self.lo.iter().zip(&self.hi)).all(|(i, (l, h))| l <= i && i <= h)
    }

    /// Every multi-index in the box, last axis fastest.
    pub fn indices(&self) -> Vec<Vec<i32>> {
        let mut out: Vec<Vec<i32>> = vec![vec![]];
        for (l, h) in self.lo.iter().zip(&self.hi) {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (*l..=*h).map(move |j| {
                        let mut q = p.clone();
                        q.push(j);
                        q
                    })
                })
                .collect();
        }
        out
    }

    /// Collapses to the scalar range `[min lo, max hi]`.
    pub fn hull_1d(&self) -> Self {
        Self {
            lo: vec![*self.lo.iter().min().unwrap()],
            hi: vec![*self.hi.iter().max().unwrap()],
        }
    }
}

/// The localized-piece grid: `samples` points per axis over `[-half_width, half_width)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowGrid {
    pub half_width: f64,
    pub samples: usize,
}

impl Default for WindowGrid {
    fn default() -> Self {
        Self {
            half_width: 4.0,
            samples: 256,
        }
    }
}

impl WindowGrid {
    pub fn with_samples(samples: usize) -> Self {
        Self {
            samples,
            ..Self::default()
        }
    }

    pub fn spec(&self, dim: usize) -> Result<GridSpec> {
        GridSpec::new(dim, self.samples, 2.0 * self.half_width)
    }
}

/// Scan settings shared by the Sobolev-type functionals.
#[derive(Clone, Debug, Default)]
pub struct ConditionOptions {
    pub window: WindowGrid,
    /// Indices to scan; `None` uses the symbol's hint.
    pub index_box: Option<IndexBox>,
    /// Extra window resolutions whose sup is recorded in the report.
    pub refinement: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexValue {
    pub index: Vec<i32>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementPoint {
    pub samples: usize,
    pub value: f64,
}

/// Evaluated functional with its per-index breakdown.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub functional: String,
    pub params: BTreeMap<String, Value>,
    pub value: f64,
    pub per_index: Vec<IndexValue>,
    pub clamp: IndexBox,
    pub refinement: Vec<RefinementPoint>,
}

impl ConditionReport {
    fn assemble(functional: &str, params: BTreeMap<String, Value>, per_index: Vec<IndexValue>, clamp: IndexBox) -> Self {
        let value = per_index.iter().map(|iv| iv.value).fold(0.0, f64::max);
        Self {
            functional: functional.into(),
            params,
            value,
            per_index,
            clamp,
            refinement: Vec::new(),
        }
    }

    pub fn value_at(&self, index: &[i32]) -> Option<f64> {
        self.per_index.iter().find(|iv| iv.index == index).map(|iv| iv.value)
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    /// One row per scanned index: `functional,index,value`, the index joined by `;`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["functional", "index", "value"])?;
        for iv in &self.per_index {
            let idx: Vec<String> = iv.index.iter().map(|i| i.to_string()).collect();
            w.write_record([self.functional.clone(), idx.join(";"), format!("{:.17e}", iv.value)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shared engine: for every index, sample `piece(ξ, index)` on the window, apply
/// the block Bessel potential and take the `L^r` norm.
fn scan_pieces<P>(
    window: &GridSpec,
    indices: &[Vec<i32>],
    blocks: &[(Vec<usize>, f64)],
    r: f64,
    piece: P,
) -> Result<Vec<IndexValue>>
where
    P: Fn(&[f64], &[i32]) -> Complex64 + Sync,
{
    indices
        .par_iter()
        .map(|index| {
            let field = Field::from_fn(*window, |xi| piece(xi, index));
            if field.values().iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                return Err(Error::NonFinite {
                    context: format!("symbol samples on the window at index {index:?}"),
                });
            }
            let smoothed = bessel_blocks(&field, blocks)?;
            Ok(IndexValue {
                index: index.clone(),
                value: lebesgue_norm(&smoothed, r)?,
            })
        })
        .collect()
}

#[inline]
fn dyadic(j: i32) -> f64 {
    2f64.powi(j)
}

fn with_refinement<F>(mut report: ConditionReport, opts: &ConditionOptions, run: F) -> Result<ConditionReport>
where
    F: Fn(&GridSpec) -> Result<Vec<IndexValue>>,
{
    for &samples in &opts.refinement {
        let window = WindowGrid {
            samples,
            ..opts.window
        };
        let spec = window.spec(report.clamp_dim_for_window())?;
        let value = run(&spec)?.iter().map(|iv| iv.value).fold(0.0, f64::max);
        report.refinement.push(RefinementPoint { samples, value });
    }
    Ok(report)
}

impl ConditionReport {
    fn clamp_dim_for_window(&self) -> usize {
        self.params
            .get("dim")
            .and_then(|v| v.as_u64())
            .map(|d| d as usize)
            .unwrap_or(self.clamp.dim())
    }
}

/// `sup_J ‖Π_ℓ (I - ∂_ℓ²)^{γ_ℓ/2} [σ(2^J ξ) Π_ℓ ψ̂(ξ_ℓ)]‖_{L^r}`.
pub fn product_sobolev_k(sigma: &dyn Symbol, smooth: &SmoothnessSpec, opts: &ConditionOptions) -> Result<ConditionReport> {
    let dim = sigma.dim();
    if smooth.dim() != dim {
        return Err(domain(format!(
            "smoothness has {} entries for a {dim}-dimensional symbol",
            smooth.dim()
        )));
    }
    let clamp = opts.index_box.clone().unwrap_or_else(|| sigma.index_hint());
    if clamp.dim() != dim {
        return Err(domain("index box dimension differs from the symbol's"));
    }
    let indices = clamp.indices();
    let blocks: Vec<(Vec<usize>, f64)> = smooth.gamma.iter().enumerate().map(|(l, g)| (vec![l], *g)).collect();
    let run = |window: &GridSpec| {
        scan_pieces(window, &indices, &blocks, smooth.r, |xi, index| {
            let bump: f64 = xi.iter().map(|x| psi_hat(*x)).product();
            if bump == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let scaled: Vec<f64> = xi.iter().zip(index).map(|(x, j)| x * dyadic(*j)).collect();
            sigma.eval(&scaled) * bump
        })
    };
    let per_index = run(&opts.window.spec(dim)?)?;
    let params = BTreeMap::from([
        ("symbol".to_string(), json!(sigma.name())),
        ("dim".to_string(), json!(dim)),
        ("r".to_string(), exponent_json(smooth.r)),
        ("gamma".to_string(), json!(smooth.gamma)),
        ("gamma_above_1_over_r".to_string(), json!(smooth.above_threshold())),
        ("window".to_string(), json!(opts.window)),
    ]);
    let report = ConditionReport::assemble("product_sobolev_K", params, per_index, clamp);
    with_refinement(report, opts, run)
}

/// `sup_j ‖(I - Δ)^{s/2} [σ(2ʲ ξ) Φ̂(ξ)]‖_{L^r}`.
pub fn hormander_norm(sigma: &dyn Symbol, s: f64, r: f64, opts: &ConditionOptions) -> Result<ConditionReport> {
    check_exponent(r)?;
    if !s.is_finite() || s < 0.0 {
        return Err(domain(format!("smoothness must be nonnegative, got {s}")));
    }
    let dim = sigma.dim();
    let clamp = opts
        .index_box
        .clone()
        .map(|b| if b.dim() == 1 { b } else { b.hull_1d() })
        .unwrap_or_else(|| sigma.index_hint().hull_1d());
    let indices = clamp.indices();
    let blocks = vec![((0..dim).collect::<Vec<_>>(), s)];
    let run = |window: &GridSpec| {
        scan_pieces(window, &indices, &blocks, r, |xi, index| {
            let bump = radial_bump(xi.iter().map(|x| x * x).sum::<f64>().sqrt());
            if bump == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let scale = dyadic(index[0]);
            let scaled: Vec<f64> = xi.iter().map(|x| x * scale).collect();
            sigma.eval(&scaled) * bump
        })
    };
    let per_index = run(&opts.window.spec(dim)?)?;
    let params = BTreeMap::from([
        ("symbol".to_string(), json!(sigma.name())),
        ("dim".to_string(), json!(dim)),
        ("r".to_string(), exponent_json(r)),
        ("s".to_string(), json!(s)),
        ("window".to_string(), json!(opts.window)),
    ]);
    let report = ConditionReport::assemble("hormander", params, per_index, clamp);
    with_refinement(report, opts, run)
}

/// `sup_{k,ℓ} ‖(I - ∂_ξ²)^{α/2}(I - Δ_η)^{s/2} [ψ̂(ξ) Φ̂(η) σ(2ᵏξ, 2^ℓη)]‖_{L^r}`
/// for `(ξ, η) ∈ ℝ × ℝⁿ⁻¹`.
pub fn mixed_smoothness_norm(
    sigma: &dyn Symbol,
    alpha: f64,
    s: f64,
    r: f64,
    opts: &ConditionOptions,
) -> Result<ConditionReport> {
    check_exponent(r)?;
    let dim = sigma.dim();
    if dim < 2 {
        return Err(domain("mixed smoothness needs dimension >= 2"));
    }
    if !(alpha >= 0.0 && s >= 0.0) {
        return Err(domain("smoothness orders must be nonnegative"));
    }
    let clamp = match &opts.index_box {
        Some(b) if b.dim() == 2 => b.clone(),
        Some(_) => return Err(domain("mixed smoothness scans a two-index (k, l) box")),
        None => {
            let h = sigma.index_hint();
            IndexBox::new(vec![h.lo[0], h.lo[1]], vec![h.hi[0], h.hi[1]])?
        }
    };
    let indices = clamp.indices();
    let run = |window: &GridSpec| mixed_pieces(sigma, alpha, s, r, window, &indices);
    let per_index = run(&opts.window.spec(dim)?)?;
    let params = BTreeMap::from([
        ("symbol".to_string(), json!(sigma.name())),
        ("dim".to_string(), json!(dim)),
        ("r".to_string(), exponent_json(r)),
        ("alpha".to_string(), json!(alpha)),
        ("s".to_string(), json!(s)),
        ("window".to_string(), json!(opts.window)),
    ]);
    let report = ConditionReport::assemble("mixed_smoothness", params, per_index, clamp);
    with_refinement(report, opts, run)
}

fn mixed_pieces(
    sigma: &dyn Symbol,
    alpha: f64,
    s: f64,
    r: f64,
    window: &GridSpec,
    indices: &[Vec<i32>],
) -> Result<Vec<IndexValue>> {
    let dim = sigma.dim();
    let blocks = vec![(vec![0], alpha), ((1..dim).collect::<Vec<_>>(), s)];
    scan_pieces(window, indices, &blocks, r, |xi, index| {
        let eta = &xi[1..];
        let bump = psi_hat(xi[0]) * radial_bump(eta.iter().map(|x| x * x).sum::<f64>().sqrt());
        if bump == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let (kx, ke) = (dyadic(index[0]), dyadic(index[1]));
        let mut scaled = Vec::with_capacity(dim);
        scaled.push(xi[0] * kx);
        scaled.extend(eta.iter().map(|e| e * ke));
        sigma.eval(&scaled) * bump
    })
}

/// The mixed-smoothness piece norms at an arbitrary list of `(k, ℓ)` indices.
pub fn mixed_smoothness_at(
    sigma: &dyn Symbol,
    alpha: f64,
    s: f64,
    r: f64,
    window: WindowGrid,
    indices: &[Vec<i32>],
) -> Result<Vec<IndexValue>> {
    check_exponent(r)?;
    let dim = sigma.dim();
    if dim < 2 {
        return Err(domain("mixed smoothness needs dimension >= 2"));
    }
    if indices.iter().any(|i| i.len() != 2) {
        return Err(domain("mixed smoothness indices are (k, l) pairs"));
    }
    mixed_pieces(sigma, alpha, s, r, &window.spec(dim)?, indices)
}

/// Analytic mixed partial `∂_S σ(ξ)` for the axes listed in the slice.
pub type MixedPartial<'a> = &'a (dyn Fn(&[f64], &[usize]) -> Complex64 + Sync);

/// Nodes and weight of the midpoint rule on `I_j = (-2^{j+1}, -2^j] ∪ [2^j, 2^{j+1})`
/// with `m` nodes per half.
fn dyadic_nodes(j: i32, m: usize) -> (Vec<f64>, f64) {
    let len = dyadic(j);
    let step = len / m as f64;
    let mut nodes: Vec<f64> = (0..m).map(|i| -(len + (i as f64 + 0.5) * step)).rev().collect();
    nodes.extend((0..m).map(|i| len + (i as f64 + 0.5) * step));
    (nodes, step)
}

/// `∂_S σ` by nested central differences with steps `delta[s]`.
fn finite_difference(sigma: &dyn Symbol, xi: &[f64], axes: &[usize], delta: &[f64]) -> Complex64 {
    let mut point = xi.to_vec();
    let mut acc = Complex64::new(0.0, 0.0);
    for corner in 0..(1u32 << axes.len()) {
        let mut sign = 1.0;
        for (bit, &a) in axes.iter().enumerate() {
            if corner & (1 << bit) != 0 {
                point[a] = xi[a] - delta[a];
                sign = -sign;
            } else {
                point[a] = xi[a] + delta[a];
            }
        }
        acc += sigma.eval(&point) * sign;
    }
    let denom: f64 = axes.iter().map(|&a| 2.0 * delta[a]).product();
    acc / denom
}

/// The classical Marcinkiewicz constant: for every nonempty axis subset `S` and
/// dyadic rectangle, the sup over the remaining variables of `∫_{I_S} |∂_S σ|`.
///
/// Integrals use `resolution` midpoint nodes per half-interval; the sup over the
/// complementary variables is taken over the same nodes. Without `gradient`,
/// partials are central differences at half the node spacing.
pub fn classical_marcinkiewicz_a(
    sigma: &dyn Symbol,
    gradient: Option<MixedPartial<'_>>,
    index_box: &IndexBox,
    resolution: usize,
) -> Result<ConditionReport> {
    let dim = sigma.dim();
    if index_box.dim() != dim {
        return Err(domain("index box dimension differs from the symbol's"));
    }
    if resolution < 64 {
        return Err(domain(format!("quadrature resolution must be >= 64, got {resolution}")));
    }
    let indices = index_box.indices();
    let per_index: Result<Vec<IndexValue>> = indices
        .par_iter()
        .map(|index| {
            let axes_nodes: Vec<(Vec<f64>, f64)> = index.iter().map(|&j| dyadic_nodes(j, resolution)).collect();
            let delta: Vec<f64> = axes_nodes.iter().map(|(_, w)| 0.5 * w).collect();
            let counts: Vec<usize> = axes_nodes.iter().map(|(n, _)| n.len()).collect();
            let total: usize = counts.iter().product();
            let mut best: f64 = 0.0;
            let mut xi = vec![0.0; dim];
            for mask in 1u32..(1 << dim) {
                let subset: Vec<usize> = (0..dim).filter(|a| mask & (1 << a) != 0).collect();
                let weight: f64 = subset.iter().map(|&a| axes_nodes[a].1).product();
                // integral per complementary configuration, keyed by the flat index
                // with the subset axes zeroed
                let mut sums: BTreeMap<usize, f64> = BTreeMap::new();
                for flat in 0..total {
                    let mut rem = flat;
                    let mut key = 0usize;
                    for a in (0..dim).rev() {
                        let i = rem % counts[a];
                        rem /= counts[a];
                        xi[a] = axes_nodes[a].0[i];
                        if mask & (1 << a) == 0 {
                            key = key * counts[a] + i;
                        }
                    }
                    let d = match gradient {
                        Some(g) => g(&xi, &subset),
                        None => finite_difference(sigma, &xi, &subset, &delta),
                    };
                    if !(d.re.is_finite() && d.im.is_finite()) {
                        return Err(Error::NonFinite {
                            context: format!("derivative samples at index {index:?}"),
                        });
                    }
                    *sums.entry(key).or_insert(0.0) += d.norm() * weight;
                }
                best = sums.values().copied().fold(best, f64::max);
            }
            Ok(IndexValue {
                index: index.clone(),
                value: best,
            })
        })
        .collect();
    let params = BTreeMap::from([
        ("symbol".to_string(), json!(sigma.name())),
        ("dim".to_string(), json!(dim)),
        ("resolution".to_string(), json!(resolution)),
        ("derivatives".to_string(), json!(if gradient.is_some() { "analytic" } else { "central-difference" })),
    ]);
    Ok(ConditionReport::assemble(
        "classical_marcinkiewicz_A",
        params,
        per_index?,
        index_box.clone(),
    ))
}

/// Whether `p` lies in the open range `|1/p - 1/2| < min_ℓ γ_ℓ`.
///
/// The comparison carries a `1e-12` guard so that boundary cases such as
/// `p = 5/4, γ_min = 0.3` are classified as on the boundary despite rounding.
pub fn admissible_p(smooth: &SmoothnessSpec, p: f64) -> Result<bool> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(domain(format!("p must lie in (1, inf), got {p}")));
    }
    let lhs = (1.0 / p - 0.5).abs();
    Ok(lhs < smooth.min_gamma() - 1e-12)
}

pub(crate) fn exponent_json(r: f64) -> Value {
    if r.is_infinite() {
        json!("inf")
    } else {
        json!(r)
    }
}

/// Scans that need all (k, ℓ) for a 2-D symbol, for tests and experiments.
pub fn box_2d(k: (i32, i32), l: (i32, i32)) -> IndexBox {
    IndexBox {
        lo: vec![k.0, l.0],
        hi: vec![k.1, l.1],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{Dilated, FnSymbol, Identity, Mikhlin};
    use std::sync::Arc;

    #[test]
    fn index_box_iteration() {
        let b = IndexBox::new(vec![0, -1], vec![1, 0]).unwrap();
        assert_eq!(b.indices(), vec![vec![0, -1], vec![0, 0], vec![1, -1], vec![1, 0]]);
        assert!(b.contains(&[1, -1]));
        assert!(!b.contains(&[2, 0]));
        assert!(IndexBox::new(vec![1], vec![0]).is_err());
    }

    #[test]
    fn admissible_examples() {
        let s = SmoothnessSpec::new(2.0, vec![0.3, 0.5]).unwrap();
        assert!(admissible_p(&s, 2.0).unwrap());
        assert!(!admissible_p(&s, 1.25).unwrap());
        assert!(admissible_p(&s, 1.3).unwrap());
        assert!(!admissible_p(&s, 5.0).unwrap());
        assert!(admissible_p(&s, 1.0).is_err());
        assert!(admissible_p(&s, f64::INFINITY).is_err());
    }

    #[test]
    fn constant_symbol_has_zero_a() {
        let s = FnSymbol::new(2, "const", |_| Complex64::new(2.0, -1.0));
        let rep = classical_marcinkiewicz_a(&s, None, &IndexBox::cube(2, -1, 1), 64).unwrap();
        assert!(rep.value < 1e-9, "{}", rep.value);
    }

    #[test]
    fn analytic_and_fd_partials_agree() {
        let s = FnSymbol::new(2, "prod", |x| Complex64::new((x[0]).sin() * (x[1] * 0.5).cos(), 0.0));
        let grad = |x: &[f64], axes: &[usize]| -> Complex64 {
            let d0 = if axes.contains(&0) { x[0].cos() } else { x[0].sin() };
            let d1 = if axes.contains(&1) { -0.5 * (x[1] * 0.5).sin() } else { (x[1] * 0.5).cos() };
            Complex64::new(d0 * d1, 0.0)
        };
        let b = IndexBox::cube(2, -1, 1);
        let fd = classical_marcinkiewicz_a(&s, None, &b, 64).unwrap();
        let an = classical_marcinkiewicz_a(&s, Some(&grad), &b, 64).unwrap();
        assert!((fd.value - an.value).abs() < 1e-3 * an.value);
        assert_eq!(an.params["derivatives"], json!("analytic"));
    }

    #[test]
    fn low_resolution_rejected() {
        let s = Identity { dim: 1 };
        assert!(classical_marcinkiewicz_a(&s, None, &IndexBox::cube(1, 0, 0), 32).is_err());
    }

    #[test]
    fn non_finite_symbol_is_reported() {
        let s = FnSymbol::new(1, "nan", |x| Complex64::new(if x[0] > 1.0 { f64::NAN } else { 1.0 }, 0.0));
        let smooth = SmoothnessSpec::new(2.0, vec![0.6]).unwrap();
        let opts = ConditionOptions {
            window: WindowGrid::with_samples(64),
            index_box: Some(IndexBox::cube(1, 0, 0)),
            ..Default::default()
        };
        assert!(matches!(product_sobolev_k(&s, &smooth, &opts), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn identity_k_is_constant_across_indices() {
        let s = Identity { dim: 2 };
        let smooth = SmoothnessSpec::new(2.0, vec![0.6, 0.6]).unwrap();
        let opts = ConditionOptions {
            window: WindowGrid::with_samples(128),
            index_box: Some(IndexBox::cube(2, -1, 1)),
            refinement: vec![256],
        };
        let rep = product_sobolev_k(&s, &smooth, &opts).unwrap();
        assert_eq!(rep.per_index.len(), 9);
        for iv in &rep.per_index {
            assert_eq!(iv.value, rep.value);
        }
        assert_eq!(rep.refinement.len(), 1);
        assert!((rep.refinement[0].value - rep.value).abs() < 1e-3 * rep.value, "{} vs {}", rep.refinement[0].value, rep.value);
    }

    #[test]
    fn k_monotone_in_gamma_at_r2() {
        let s = Mikhlin::new(2, 1.0);
        let opts = ConditionOptions {
            window: WindowGrid::with_samples(64),
            index_box: Some(IndexBox::cube(2, 0, 1)),
            ..Default::default()
        };
        let mut prev = 0.0;
        for g in [0.2, 0.5, 0.8, 1.1] {
            let smooth = SmoothnessSpec::new(2.0, vec![g, 0.7]).unwrap();
            let v = product_sobolev_k(&s, &smooth, &opts).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn dilation_shifts_per_index_values() {
        let base: Arc<dyn Symbol> = Arc::new(Mikhlin::new(2, 2.0));
        let dil = Dilated {
            inner: base.clone(),
            shift: vec![1, -1],
        };
        let opts = ConditionOptions {
            window: WindowGrid::with_samples(64),
            index_box: Some(IndexBox::cube(2, -1, 1)),
            ..Default::default()
        };
        let smooth = SmoothnessSpec::new(2.0, vec![0.6, 0.9]).unwrap();
        let a = product_sobolev_k(base.as_ref(), &smooth, &opts).unwrap();
        let b = product_sobolev_k(&dil, &smooth, &opts).unwrap();
        for iv in &b.per_index {
            let shifted = [iv.index[0] + 1, iv.index[1] - 1];
            if let Some(v) = a.value_at(&shifted) {
                assert_eq!(v, iv.value);
            }
        }
    }

    #[test]
    fn report_serializes() {
        let s = Identity { dim: 1 };
        let smooth = SmoothnessSpec::new(f64::INFINITY, vec![0.6]).unwrap();
        let opts = ConditionOptions {
            window: WindowGrid::with_samples(64),
            index_box: Some(IndexBox::cube(1, 0, 1)),
            ..Default::default()
        };
        let rep = product_sobolev_k(&s, &smooth, &opts).unwrap();
        let mut buf = Vec::new();
        rep.write_json(&mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        for key in ["functional", "params", "value", "per_index", "clamp", "refinement"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["params"]["r"], json!("inf"));
        let mut csv_buf = Vec::new();
        rep.write_csv(&mut csv_buf).unwrap();
        let text = String::from_utf8(csv_buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("functional,index,value\n"));
    }
}
