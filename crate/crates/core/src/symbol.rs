//! Multiplier symbols `σ : ℝⁿ → ℂ`.
//!
//! Closed-form symbols evaluate anywhere; a [`SampledSymbol`] only answers on its
//! own frequency lattice and returns NaN elsewhere, so dyadic dilations stay pure
//! reindexing and never interpolate.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::bumps::{euclid, ramp};
use crate::conditions::IndexBox;
use crate::error::{domain, Error, Result};
use crate::experiments::example51::Example51;
use crate::grid::{GridSpec, Spectrum};

/// A bounded function on `ℝⁿ` used as a Fourier multiplier.
pub trait Symbol: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, xi: &[f64]) -> Complex64;

    fn name(&self) -> String;

    /// Dyadic index box worth scanning in the condition functionals.
    fn index_hint(&self) -> IndexBox {
        IndexBox::cube(self.dim(), -2, 2)
    }

    /// Samples the symbol on the frequency lattice of `spec`.
    fn sample(&self, spec: GridSpec) -> Spectrum
    where
        Self: Sized,
    {
        Spectrum::from_fn(spec, |xi| self.eval(xi))
    }
}

impl fmt::Debug for dyn Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({})", self.name())
    }
}

/// Samples any (possibly unsized) symbol on the frequency lattice of `spec`.
pub fn sample(symbol: &dyn Symbol, spec: GridSpec) -> Spectrum {
    Spectrum::from_fn(spec, |xi| symbol.eval(xi))
}

/// `σ ≡ 1`.
#[derive(Clone, Debug)]
pub struct Identity {
    pub dim: usize,
}

impl Symbol for Identity {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, _xi: &[f64]) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }
    fn name(&self) -> String {
        "identity".into()
    }
}

/// `σ(ξ) = e^{-2πi ξ·h}`, translation by `h`.
#[derive(Clone, Debug)]
pub struct Shift {
    pub h: Vec<f64>,
}

impl Symbol for Shift {
    fn dim(&self) -> usize {
        self.h.len()
    }
    fn eval(&self, xi: &[f64]) -> Complex64 {
        let phase: f64 = xi.iter().zip(&self.h).map(|(a, b)| a * b).sum();
        Complex64::from_polar(1.0, -2.0 * PI * phase)
    }
    fn name(&self) -> String {
        format!("shift:h={:?}", self.h)
    }
}

/// Indicator of `lo ≤ |ξ| < hi`.
#[derive(Clone, Debug)]
pub struct AnnulusIndicator {
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Symbol for AnnulusIndicator {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, xi: &[f64]) -> Complex64 {
        let r = euclid(xi);
        Complex64::new(if r >= self.lo && r < self.hi { 1.0 } else { 0.0 }, 0.0)
    }
    fn name(&self) -> String {
        format!("annulus:lo={},hi={}", self.lo, self.hi)
    }
}

/// `σ(ξ) = |ξ|^{ib}·H(|ξ|/c)`: homogeneous of degree zero away from a small ball.
#[derive(Clone, Debug)]
pub struct Mikhlin {
    pub dim: usize,
    pub b: f64,
    pub cut: f64,
}

impl Mikhlin {
    pub fn new(dim: usize, b: f64) -> Self {
        Self {
            dim,
            b,
            cut: 2f64.powi(-8),
        }
    }
}

impl Symbol for Mikhlin {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, xi: &[f64]) -> Complex64 {
        let r = euclid(xi);
        if r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(ramp(r / self.cut), self.b * r.ln())
    }
    fn name(&self) -> String {
        format!("mikhlin:b={}", self.b)
    }
}

/// A symbol known only on a frequency lattice.
#[derive(Clone, Debug)]
pub struct SampledSymbol {
    spectrum: Spectrum,
}

impl SampledSymbol {
    pub fn new(spectrum: Spectrum) -> Self {
        Self { spectrum }
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    fn lattice_index(&self, xi: &[f64]) -> Option<usize> {
        let spec = self.spectrum.spec();
        let half = (spec.samples() / 2) as f64;
        let mut flat = 0usize;
        for &x in xi {
            let k = x * spec.extent() + half;
            let kr = k.round();
            if (k - kr).abs() > 1e-9 * kr.abs().max(1.0) || kr < 0.0 || kr >= spec.samples() as f64 {
                return None;
            }
            flat = flat * spec.samples() + kr as usize;
        }
        Some(flat)
    }
}

impl Symbol for SampledSymbol {
    fn dim(&self) -> usize {
        self.spectrum.spec().dim()
    }
    fn eval(&self, xi: &[f64]) -> Complex64 {
        match self.lattice_index(xi) {
            Some(flat) => self.spectrum.values()[flat],
            None => Complex64::new(f64::NAN, f64::NAN),
        }
    }
    fn name(&self) -> String {
        format!("sampled{}", self.spectrum.spec())
    }
    fn index_hint(&self) -> IndexBox {
        let (lo, hi) = self.spectrum.spec().dyadic_range();
        IndexBox::cube(self.dim(), lo, hi)
    }
}

/// `ξ ↦ σ(2^{m_1}ξ_1, …, 2^{m_n}ξ_n)`.
#[derive(Clone)]
pub struct Dilated {
    pub inner: Arc<dyn Symbol>,
    pub shift: Vec<i32>,
}

impl Symbol for Dilated {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, xi: &[f64]) -> Complex64 {
        let scaled: Vec<f64> = xi
            .iter()
            .zip(&self.shift)
            .map(|(x, &m)| x * 2f64.powi(m))
            .collect();
        self.inner.eval(&scaled)
    }
    fn name(&self) -> String {
        format!("dilated({},{:?})", self.inner.name(), self.shift)
    }
    fn index_hint(&self) -> IndexBox {
        let b = self.inner.index_hint();
        IndexBox::new(
            b.lo.iter().zip(&self.shift).map(|(l, m)| l - m).collect(),
            b.hi.iter().zip(&self.shift).map(|(h, m)| h - m).collect(),
        )
        .expect("shifted box stays ordered")
    }
}

/// Adapts a closure.
pub struct FnSymbol<F> {
    pub dim: usize,
    pub label: String,
    pub func: F,
}

impl<F> FnSymbol<F>
where
    F: Fn(&[f64]) -> Complex64 + Send + Sync,
{
    pub fn new(dim: usize, label: impl Into<String>, func: F) -> Self {
        Self {
            dim,
            label: label.into(),
            func,
        }
    }
}

impl<F> Symbol for FnSymbol<F>
where
    F: Fn(&[f64]) -> Complex64 + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, xi: &[f64]) -> Complex64 {
        (self.func)(xi)
    }
    fn name(&self) -> String {
        self.label.clone()
    }
}

/// Splits `name:k=v,k=v` into the name and its parameters.
pub fn parse_params(text: &str) -> Result<(String, BTreeMap<String, f64>)> {
    let (name, rest) = match text.split_once(':') {
        Some((n, r)) => (n, r),
        None => (text, ""),
    };
    let mut params = BTreeMap::new();
    for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| domain(format!("expected key=value in `{text}`, got `{item}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| domain(format!("`{k}` in `{text}` is not a number: `{v}`")))?;
        params.insert(k.trim().to_string(), v);
    }
    Ok((name.trim().to_string(), params))
}

/// Symbol names understood by [`named`].
pub const NAMED_SYMBOLS: &[&str] = &["identity", "shift", "annulus", "mikhlin", "example51"];

/// Builds a named symbol of dimension `dim` from `name[:k=v,...]`.
pub fn named(text: &str, dim: usize) -> Result<Arc<dyn Symbol>> {
    let (name, params) = parse_params(text)?;
    let get = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);
    let known: &[&str] = match name.as_str() {
        "identity" => &[],
        "shift" => &["h", "axis"],
        "annulus" | "annulus-indicator" => &["lo", "hi"],
        "mikhlin" => &["b", "cut"],
        "example51" => &["alpha", "beta"],
        other => {
            return Err(domain(format!(
                "unknown symbol `{other}`; expected one of {NAMED_SYMBOLS:?}"
            )))
        }
    };
    if let Some(bad) = params.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(domain(format!("symbol `{name}` has no parameter `{bad}`")));
    }
    let symbol: Arc<dyn Symbol> = match name.as_str() {
        "identity" => Arc::new(Identity { dim }),
        "shift" => {
            let axis = get("axis", 0.0) as usize;
            if axis >= dim {
                return Err(domain(format!("shift axis {axis} out of range")));
            }
            let mut h = vec![0.0; dim];
            h[axis] = get("h", 1.0);
            Arc::new(Shift { h })
        }
        "annulus" | "annulus-indicator" => {
            let (lo, hi) = (get("lo", 1.0), get("hi", 2.0));
            if !(lo >= 0.0 && hi > lo) {
                return Err(domain(format!("annulus needs 0 <= lo < hi, got lo={lo}, hi={hi}")));
            }
            Arc::new(AnnulusIndicator { dim, lo, hi })
        }
        "mikhlin" => {
            let mut m = Mikhlin::new(dim, get("b", 1.0));
            m.cut = get("cut", m.cut);
            if !(m.cut > 0.0) {
                return Err(domain("mikhlin cut must be positive"));
            }
            Arc::new(m)
        }
        "example51" => {
            if dim < 2 {
                return Err(Error::Domain("example51 needs dimension >= 2".into()));
            }
            Arc::new(Example51::new(get("alpha", 0.3), get("beta", 0.75), dim)?)
        }
        _ => unreachable!(),
    };
    Ok(symbol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_named_symbols() {
        let s = named("example51:alpha=0.3", 2).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(named("mikhlin:b=2", 3).is_ok());
        assert!(named("shift:h=0.25,axis=1", 2).is_ok());
        assert!(named("nope", 2).is_err());
        assert!(named("mikhlin:q=1", 2).is_err());
        assert!(named("mikhlin:b=x", 2).is_err());
        assert!(named("example51:alpha=1.5", 2).is_err());
        assert!(named("shift:axis=2", 2).is_err());
    }

    #[test]
    fn sampled_symbol_answers_on_lattice_only() {
        let g = GridSpec::new(2, 8, 2.0).unwrap();
        let s = Mikhlin::new(2, 1.0);
        let sampled = SampledSymbol::new(s.sample(g));
        let p = [0.5, -1.0];
        assert_eq!(sampled.eval(&p), s.eval(&p));
        assert!(sampled.eval(&[0.3, 0.0]).re.is_nan());
        assert!(sampled.eval(&[2.0, 0.0]).re.is_nan());
        assert!(!sampled.eval(&[-2.0, 0.0]).re.is_nan());
    }

    #[test]
    fn dilation_is_exact() {
        let s: Arc<dyn Symbol> = Arc::new(Mikhlin::new(2, 1.5));
        let d = Dilated {
            inner: s.clone(),
            shift: vec![2, -1],
        };
        let xi = [0.37, 1.3];
        assert_eq!(d.eval(&xi), s.eval(&[0.37 * 4.0, 0.65]));
    }

    #[test]
    fn shift_has_unit_modulus() {
        let s = Shift { h: vec![0.5, 0.25] };
        assert!((s.eval(&[1.0, 2.0]) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((s.eval(&[0.3, -0.7]).norm() - 1.0).abs() < 1e-15);
    }
}
