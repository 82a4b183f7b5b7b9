//! Spectral operators on [`Field`]s.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bumps::{BumpFamily, LpBump};
use crate::error::{domain, Result};
use crate::grid::{check_exponent, ensure_same, forward_transform, inverse_transform, Field, GridSpec, Spectrum};

/// Integrability exponent `r` and per-axis smoothness `γ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessSpec {
    pub r: f64,
    pub gamma: Vec<f64>,
}

impl SmoothnessSpec {
    pub fn new(r: f64, gamma: Vec<f64>) -> Result<Self> {
        check_exponent(r)?;
        if gamma.is_empty() {
            return Err(domain("smoothness vector is empty"));
        }
        if let Some(g) = gamma.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(domain(format!("smoothness entries must be positive, got {g}")));
        }
        Ok(Self { r, gamma })
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn min_gamma(&self) -> f64 {
        self.gamma.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn total(&self) -> f64 {
        self.gamma.iter().sum()
    }

    /// Per axis, whether `γ_ℓ > 1/r`.
    pub fn above_threshold(&self) -> Vec<bool> {
        self.gamma.iter().map(|g| *g > 1.0 / self.r).collect()
    }
}

/// Multiplies the spectrum of `f` by `symbol(ξ)` and transforms back.
pub fn apply_symbol_fn(f: &Field, symbol: impl Fn(&[f64]) -> Complex64) -> Field {
    let spectrum = forward_transform(f);
    let spec = *spectrum.spec();
    let mut buf = vec![0.0; spec.dim()];
    let values = spectrum
        .values()
        .iter()
        .enumerate()
        .map(|(flat, v)| {
            spec.frequency(flat, &mut buf);
            v * symbol(&buf)
        })
        .collect();
    inverse_transform(&Spectrum::new(spec, values).expect("layout preserved"))
}

fn apply_real_symbol(f: &Field, symbol: impl Fn(&[f64]) -> f64) -> Field {
    apply_symbol_fn(f, |xi| Complex64::new(symbol(xi), 0.0))
}

/// `T_σ f = (σ·f̂)^∨`.
pub fn apply_multiplier(sigma: &Spectrum, f: &Field) -> Result<Field> {
    ensure_same(sigma.spec(), f.spec())?;
    Ok(inverse_transform(&sigma.mul(&forward_transform(f))?))
}

fn check_axis(spec: &GridSpec, axis: usize) -> Result<()> {
    if axis < spec.dim() {
        Ok(())
    } else {
        Err(domain(format!("axis {axis} out of range for dimension {}", spec.dim())))
    }
}

/// `Δ_j^{ℓ}`: the one-axis multiplier `bump(ξ_ℓ/2ʲ)`.
pub fn littlewood_paley(f: &Field, axis: usize, j: i32, bump: LpBump) -> Result<Field> {
    check_axis(f.spec(), axis)?;
    BumpFamily::for_grid(f.spec()).check(j)?;
    let scale = 2f64.powi(-j);
    Ok(apply_real_symbol(f, |xi| bump.eval(xi[axis] * scale)))
}

/// `Δ_{j_1}^{1}⋯Δ_{j_n}^{n}` in one transform pair.
pub fn littlewood_paley_product(f: &Field, js: &[i32], bump: LpBump) -> Result<Field> {
    let family = BumpFamily::for_grid(f.spec());
    if js.len() != f.spec().dim() {
        return Err(domain("one dyadic index per axis required"));
    }
    for &j in js {
        family.check(j)?;
    }
    let scales: Vec<f64> = js.iter().map(|&j| 2f64.powi(-j)).collect();
    Ok(apply_real_symbol(f, |xi| {
        xi.iter().zip(&scales).map(|(x, s)| bump.eval(x * s)).product()
    }))
}

/// Which frequency variables a Bessel potential acts on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BesselMode {
    /// `(I - ∂_ℓ²)`
    Axis(usize),
    /// `(I - Δ_η)` over a group of axes
    Block(Vec<usize>),
    /// `(I - Δ)` over all axes
    Isotropic,
}

/// Symbol `Π_b (1 + 4π²|ξ_{S_b}|²)^{γ_b/2}` of a product of block Bessel potentials.
pub fn bessel_symbol(blocks: &[(Vec<usize>, f64)], xi: &[f64]) -> f64 {
    blocks
        .iter()
        .map(|(axes, g)| {
            let r2: f64 = axes.iter().map(|&a| xi[a] * xi[a]).sum();
            (1.0 + 4.0 * PI * PI * r2).powf(0.5 * g)
        })
        .product()
}

/// Applies `Π_b (I - Δ_{S_b})^{γ_b/2}` in one transform pair.
pub fn bessel_blocks(f: &Field, blocks: &[(Vec<usize>, f64)]) -> Result<Field> {
    for (axes, _) in blocks {
        for &a in axes {
            check_axis(f.spec(), a)?;
        }
    }
    Ok(apply_real_symbol(f, |xi| bessel_symbol(blocks, xi)))
}

/// `(I - Δ_S)^{γ/2}`; negative `γ` smooths.
pub fn fractional_bessel(f: &Field, mode: &BesselMode, gamma: f64) -> Result<Field> {
    let axes = match mode {
        BesselMode::Axis(a) => vec![*a],
        BesselMode::Block(axes) => axes.clone(),
        BesselMode::Isotropic => (0..f.spec().dim()).collect(),
    };
    bessel_blocks(f, &[(axes, gamma)])
}

/// `(-∂_ℓ²)^{γ/2}`, symbol `(2π|ξ_ℓ|)^γ`.
pub fn fractional_laplacian(f: &Field, axis: usize, gamma: f64) -> Result<Field> {
    check_axis(f.spec(), axis)?;
    if !(gamma > 0.0) {
        return Err(domain(format!("fractional Laplacian order must be positive, got {gamma}")));
    }
    Ok(apply_real_symbol(f, |xi| (2.0 * PI * xi[axis].abs()).powf(gamma)))
}

/// One-dimensional Hardy–Littlewood maximal function along `axis`.
///
/// At every node, the largest average of `|f|` over the centred periodic windows
/// of `2k + 1` cells, `k = 0, …, N/2`.
pub fn directional_maximal(f: &Field, axis: usize) -> Result<Field> {
    let spec = *f.spec();
    check_axis(&spec, axis)?;
    let n = spec.samples();
    let stride = spec.stride(axis);
    let abs: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); abs.len()];
    let mut line = vec![0.0; n];
    for outer in (0..abs.len()).step_by(stride * n) {
        for inner in 0..stride {
            let base = outer + inner;
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = abs[base + i * stride];
            }
            for i in 0..n {
                let mut sum = line[i];
                let mut best = sum;
                // windows of odd length up to N; wider ones would revisit samples
                for k in 1..=(n - 1) / 2 {
                    sum += line[(i + n - k) % n] + line[(i + k) % n];
                    best = best.max(sum / (2 * k + 1) as f64);
                }
                out[base + i * stride] = Complex64::new(best, 0.0);
            }
        }
    }
    Ok(Field::new(spec, out).expect("finite"))
}

/// `M^{(1)}⋯M^{(n)} g`, innermost axis applied first.
pub fn strong_maximal(f: &Field) -> Field {
    (0..f.spec().dim())
        .rev()
        .fold(f.clone(), |acc, axis| directional_maximal(&acc, axis).expect("axis in range"))
}

/// `(Σ_{J} |Δ_J f|²)^{1/2}` over every multi-index of the grid's dyadic range.
pub fn square_function(f: &Field, bump: LpBump) -> Field {
    let spec = *f.spec();
    let family = BumpFamily::for_grid(&spec);
    let spectrum = forward_transform(f);
    let mut acc = vec![0.0; spec.len()];
    let mut buf = vec![0.0; spec.dim()];
    for js in multi_indices(spec.dim(), family.j_min, family.j_max) {
        let scales: Vec<f64> = js.iter().map(|&j| 2f64.powi(-j)).collect();
        let values = spectrum
            .values()
            .iter()
            .enumerate()
            .map(|(flat, v)| {
                spec.frequency(flat, &mut buf);
                let m: f64 = buf.iter().zip(&scales).map(|(x, s)| bump.eval(x * s)).product();
                v * m
            })
            .collect();
        let piece = inverse_transform(&Spectrum::new(spec, values).expect("layout preserved"));
        for (a, v) in acc.iter_mut().zip(piece.values()) {
            *a += v.norm_sqr();
        }
    }
    Field::new(spec, acc.into_iter().map(|a| Complex64::new(a.sqrt(), 0.0)).collect()).expect("finite")
}

/// All multi-indices in `[lo, hi]^dim`, last axis fastest.
pub(crate) fn multi_indices(dim: usize, lo: i32, hi: i32) -> Vec<Vec<i32>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (lo..=hi).map(move |j| {
                    let mut p = prefix.clone();
                    p.push(j);
                    p
                })
            })
            .collect();
    }
    out
}
