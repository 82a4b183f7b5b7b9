//! Periodic boxes approximating `ℝⁿ`, centred transforms and quadrature.
//!
//! A [`GridSpec`] samples the box `[-L/2, L/2)ⁿ` with `N` points per axis at
//! `x_i = (i - N/2)·h`, `h = L/N`. The dual lattice is `ξ_k = (k - N/2)/L`. Both
//! sides use the same centred, row-major layout, so index `N/2` on every axis is
//! the origin.
//!
//! The transforms are Riemann sums of the continuous Fourier integral
//! `f̂(ξ) = ∫ f(x) e^{-2πi x·ξ} dx`: the forward map is `hⁿ·DFT`, the inverse is
//! `L⁻ⁿ·IDFT`.

use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Discretization of a periodic box `[-L/2, L/2)ⁿ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    samples: usize,
    extent: f64,
}

impl GridSpec {
    /// Validated constructor; `samples` must be a power of two `≥ 4`.
    pub fn new(dim: usize, samples: usize, extent: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        if samples < 4 || !samples.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "samples per axis must be a power of two >= 4, got {samples}"
            )));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "extent must be a positive finite real, got {extent}"
            )));
        }
        if samples.checked_pow(dim as u32).is_none() {
            return Err(Error::InvalidGrid("grid too large".into()));
        }
        Ok(Self { dim, samples, extent })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    /// Total number of grid points, `Nⁿ`.
    pub fn len(&self) -> usize {
        self.samples.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spatial spacing `h = L/N`.
    pub fn spacing(&self) -> f64 {
        self.extent / self.samples as f64
    }

    /// Frequency step `1/L`.
    pub fn freq_step(&self) -> f64 {
        1.0 / self.extent
    }

    /// `N/(2L)`; the largest representable frequency magnitude.
    pub fn nyquist(&self) -> f64 {
        self.samples as f64 / (2.0 * self.extent)
    }

    /// Volume element `hⁿ` of the spatial Riemann sum.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Volume element `L⁻ⁿ` of the frequency Riemann sum.
    pub fn freq_cell_volume(&self) -> f64 {
        self.freq_step().powi(self.dim as i32)
    }

    /// Row-major stride of `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.samples.pow((self.dim - 1 - axis) as u32)
    }

    /// Signed lattice offset `i - N/2` of a per-axis index.
    #[inline]
    pub fn offset(&self, i: usize) -> i64 {
        i as i64 - (self.samples / 2) as i64
    }

    /// Spatial coordinate of per-axis index `i`.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        self.offset(i) as f64 * self.spacing()
    }

    /// Frequency of per-axis index `i`.
    #[inline]
    pub fn freq(&self, i: usize) -> f64 {
        self.offset(i) as f64 / self.extent
    }

    /// Per-axis index of flat position `flat` along `axis`.
    #[inline]
    pub fn axis_index(&self, flat: usize, axis: usize) -> usize {
        (flat / self.stride(axis)) % self.samples
    }

    /// Writes the spatial coordinates of `flat` into `out`.
    pub fn point(&self, flat: usize, out: &mut [f64]) {
        self.fill(flat, out, |i| self.coord(i));
    }

    /// Writes the frequency coordinates of `flat` into `out`.
    pub fn frequency(&self, flat: usize, out: &mut [f64]) {
        self.fill(flat, out, |i| self.freq(i));
    }

    fn fill(&self, mut flat: usize, out: &mut [f64], map: impl Fn(usize) -> f64) {
        debug_assert_eq!(out.len(), self.dim);
        for slot in out.iter_mut().rev() {
            *slot = map(flat % self.samples);
            flat /= self.samples;
        }
    }

    /// The grid carrying `x ↦ f(2ᵏx)` with the same sample array: extent `L·2⁻ᵏ`.
    ///
    /// Frequencies on the dilated grid are `2ᵏ` times those of `self`, so dyadic
    /// dilations become pure reindexing.
    pub fn dilate(&self, k: i32) -> Self {
        Self {
            extent: self.extent * 2f64.powi(-k),
            ..*self
        }
    }

    /// Dyadic indices `j` whose annulus `2ʲ·[1/2, 2]` lies inside the resolved band.
    ///
    /// `j_max` is the largest `j` with `2^{j+1} ≤ N/(2L)` and `j_min` the smallest
    /// with `2^{j-1} ≥ 1/L`.
    pub fn dyadic_range(&self) -> (i32, i32) {
        let j_max = self.nyquist().log2().floor() as i32 - 1;
        let j_min = self.freq_step().log2().ceil() as i32 + 1;
        (j_min, j_max)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, N={}, L={})", self.dim, self.samples, self.extent)
    }
}

pub(crate) fn ensure_same(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch {
            left: a.to_string(),
            right: b.to_string(),
        })
    }
}

macro_rules! sampled {
    ($name:ident, $locate:ident) => {
        impl $name {
            /// Wraps `values`, which must have `Nⁿ` finite entries.
            pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
                if values.len() != spec.len() {
                    return Err(Error::InvalidGrid(format!(
                        "expected {} samples, got {}",
                        spec.len(),
                        values.len()
                    )));
                }
                if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                    return Err(Error::NonFinite {
                        context: stringify!($name).into(),
                    });
                }
                Ok(Self { spec, values })
            }

            /// Samples `func` at every node.
            pub fn from_fn(spec: GridSpec, func: impl Fn(&[f64]) -> Complex64) -> Self {
                let mut buf = vec![0.0; spec.dim()];
                let values = (0..spec.len())
                    .map(|flat| {
                        spec.$locate(flat, &mut buf);
                        func(&buf)
                    })
                    .collect();
                Self { spec, values }
            }

            pub fn zeros(spec: GridSpec) -> Self {
                Self {
                    spec,
                    values: vec![Complex64::new(0.0, 0.0); spec.len()],
                }
            }

            pub fn spec(&self) -> &GridSpec {
                &self.spec
            }

            pub fn values(&self) -> &[Complex64] {
                &self.values
            }

            pub fn into_values(self) -> Vec<Complex64> {
                self.values
            }

            pub fn scale(&self, c: Complex64) -> Self {
                Self {
                    spec: self.spec,
                    values: self.values.iter().map(|v| v * c).collect(),
                }
            }

            /// Largest modulus over the samples.
            pub fn max_abs(&self) -> f64 {
                self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }

            /// Largest pointwise modulus of `self - other`.
            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                self.values
                    .iter()
                    .zip(&other.values)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
            }
        }
    };
}

/// Complex samples of a function on the spatial grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    spec: GridSpec,
    values: Vec<Complex64>,
}

/// Complex samples on the frequency lattice, same layout as [`Field`].
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    spec: GridSpec,
    values: Vec<Complex64>,
}

sampled!(Field, point);
sampled!(Spectrum, frequency);

impl Field {
    /// The same samples read as `x ↦ f(2ᵏx)` on [`GridSpec::dilate`].
    pub fn dilate(&self, k: i32) -> Self {
        Self {
            spec: self.spec.dilate(k),
            values: self.values.clone(),
        }
    }

    /// Pointwise modulus as a real-valued field.
    pub fn abs(&self) -> Self {
        Self {
            spec: self.spec,
            values: self
                .values
                .iter()
                .map(|v| Complex64::new(v.norm(), 0.0))
                .collect(),
        }
    }
}

impl Spectrum {
    /// Pointwise product `self ⊙ other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        ensure_same(&self.spec, &other.spec)?;
        Ok(Self {
            spec: self.spec,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// `(L⁻ⁿ Σ |F|²)^{1/2}`, the frequency-side Riemann sum of the `L²` norm.
    pub fn l2_norm(&self) -> f64 {
        weighted_norm(self.values.iter().map(|v| v.norm()), self.spec.freq_cell_volume(), 2.0)
    }
}

/// Transforms every axis of `values` in place; `values` is row-major `Nⁿ`.
fn transform_axes(spec: &GridSpec, values: &mut [Complex64], direction: FftDirection) {
    let n = spec.samples();
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft(n, direction);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let half = n / 2;
    for axis in 0..spec.dim() {
        let stride = spec.stride(axis);
        let block = stride * n;
        for outer in (0..values.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                // centred index i holds lattice offset i - N/2; the DFT wants it at
                // (i - N/2) mod N, which is a rotation by N/2 in both directions
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = values[base + ((i + half) % n) * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    values[base + ((i + half) % n) * stride] = *v;
                }
            }
        }
    }
}

/// Riemann-sum Fourier transform `f̂(ξ_k) ≈ hⁿ Σ f(x) e^{-2πi x·ξ_k}`.
pub fn forward_transform(f: &Field) -> Spectrum {
    let spec = f.spec;
    let mut values = f.values.clone();
    transform_axes(&spec, &mut values, FftDirection::Forward);
    let w = spec.cell_volume();
    values.iter_mut().for_each(|v| *v *= w);
    Spectrum { spec, values }
}

/// Inverse of [`forward_transform`]: `f(x) ≈ L⁻ⁿ Σ F(ξ_k) e^{2πi x·ξ_k}`.
pub fn inverse_transform(spectrum: &Spectrum) -> Field {
    let spec = spectrum.spec;
    let mut values = spectrum.values.clone();
    transform_axes(&spec, &mut values, FftDirection::Inverse);
    let w = spec.freq_cell_volume();
    values.iter_mut().for_each(|v| *v *= w);
    Field { spec, values }
}

pub(crate) fn check_exponent(r: f64) -> Result<()> {
    if r.is_nan() || r < 1.0 {
        Err(domain(format!("Lebesgue exponent must be >= 1, got {r}")))
    } else {
        Ok(())
    }
}

/// `(w Σ aᵣ^r)^{1/r}` for finite `r`, `max a` for `r = ∞`.
pub(crate) fn weighted_norm(moduli: impl Iterator<Item = f64> + Clone, weight: f64, r: f64) -> f64 {
    let top = moduli.clone().fold(0.0, f64::max);
    if r.is_infinite() || top == 0.0 {
        return top;
    }
    let sum: f64 = moduli.map(|a| (a / top).powf(r)).sum();
    top * (weight * sum).powf(1.0 / r)
}

/// `‖f‖_{L^r}` as the Riemann sum `(hⁿ Σ |f|^r)^{1/r}`; `r = f64::INFINITY` gives the max.
pub fn lebesgue_norm(f: &Field, r: f64) -> Result<f64> {
    check_exponent(r)?;
    Ok(weighted_norm(
        f.values.iter().map(|v| v.norm()),
        f.spec.cell_volume(),
        r,
    ))
}

/// `‖f‖_{L^p(ℝ; L²(ℝⁿ⁻¹))}`: `L²` over axes `2..n`, then `L^p` over the first axis.
pub fn mixed_norm(f: &Field, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let spec = f.spec;
    if spec.dim() < 2 {
        return Err(domain("mixed norm needs dimension >= 2"));
    }
    let h = spec.spacing();
    let slab = spec.stride(0);
    let inner_weight = h.powi(spec.dim() as i32 - 1);
    let inner: Vec<f64> = f
        .values
        .chunks(slab)
        .map(|row| weighted_norm(row.iter().map(|v| v.norm()), inner_weight, 2.0))
        .collect();
    Ok(weighted_norm(inner.iter().copied(), h, p))
}

/// Writes `spectrum` in the sampled-multiplier text format.
///
/// The header is `n,N,L`; each following line is `re,im` in centred row-major
/// frequency order. Reals are printed with 17 significant digits so that
/// [`read_multiplier`] reproduces them bit for bit.
pub fn write_multiplier<W: Write>(spectrum: &Spectrum, mut out: W) -> Result<()> {
    let spec = spectrum.spec;
    writeln!(out, "{},{},{:.16e}", spec.dim(), spec.samples(), spec.extent())?;
    for v in &spectrum.values {
        writeln!(out, "{:.16e},{:.16e}", v.re, v.im)?;
    }
    out.flush()?;
    Ok(())
}

/// Parses the format produced by [`write_multiplier`].
pub fn read_multiplier<R: BufRead>(input: R) -> Result<Spectrum> {
    let mut lines = input.lines().enumerate();
    let parse_err = |line: usize, message: String| Error::Parse { line: line + 1, message };
    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(0, "missing header".into()))?;
    let header = header?;
    let parts: Vec<&str> = header.trim().split(',').collect();
    if parts.len() != 3 {
        return Err(parse_err(ln, format!("header must be `n,N,L`, got `{header}`")));
    }
    let dim: usize = parts[0]
        .trim()
        .parse()
        .map_err(|e| parse_err(ln, format!("dimension: {e}")))?;
    let samples: usize = parts[1]
        .trim()
        .parse()
        .map_err(|e| parse_err(ln, format!("samples: {e}")))?;
    let extent: f64 = parts[2]
        .trim()
        .parse()
        .map_err(|e| parse_err(ln, format!("extent: {e}")))?;
    let spec = GridSpec::new(dim, samples, extent)?;
    let mut values = Vec::with_capacity(spec.len());
    for (ln, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (re, im) = line
            .trim()
            .split_once(',')
            .ok_or_else(|| parse_err(ln, format!("expected `re,im`, got `{line}`")))?;
        let re: f64 = re.trim().parse().map_err(|e| parse_err(ln, format!("re: {e}")))?;
        let im: f64 = im.trim().parse().map_err(|e| parse_err(ln, format!("im: {e}")))?;
        values.push(Complex64::new(re, im));
    }
    Spectrum::new(spec, values)
}
