//! Discretization of the real line and discrete Fourier analysis.
//!
//! Samples live on `x_j = x0 + j dx`, `j = 0..n`. The dual grid is centred:
//! index `m` carries `xi = (m - n/2) dxi` with `dxi = 2pi / (n dx)`. The
//! forward transform is the trapezoidal rule for `int exp(-i x xi) f(x) dx`,
//! phase-corrected for `x0`, so spectrum samples approximate the continuous
//! `f^(xi)` and Plancherel reads `||f^||^2 = 2pi ||f||^2` exactly.

use crate::error::{AliasingWarning, LabError, Result};
use crate::quadrature::{pairwise_sum, pairwise_sum_complex};
use crate::C64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

/// Uniform sampling of a finite window of the line.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct UniformGrid {
    n: usize,
    dx: f64,
    x0: f64,
}

impl UniformGrid {
    pub fn new(n: usize, dx: f64, x0: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(LabError::Domain(format!("grid size {n} must be a power of two >= 8")));
        }
        if !(dx > 0.0) || !dx.is_finite() || !x0.is_finite() {
            return Err(LabError::Domain(format!("invalid spacing dx={dx} or origin x0={x0}")));
        }
        Ok(UniformGrid { n, dx, x0 })
    }

    /// `n` points on `[-half_width, half_width)`; the sample at index `n/2` is 0.
    pub fn symmetric(n: usize, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(LabError::Domain(format!("half width {half_width} must be positive")));
        }
        Self::new(n, 2.0 * half_width / n as f64, -half_width)
    }

    /// 1024 points on `[-20, 20)`.
    pub fn standard() -> Self {
        Self::symmetric(1024, 20.0).expect("standard grid is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn length(&self) -> f64 {
        self.n as f64 * self.dx
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.x(j))
    }

    pub fn frequency_grid(&self) -> FrequencyGrid {
        FrequencyGrid { n: self.n, dxi: 2.0 * PI / (self.n as f64 * self.dx) }
    }

    /// Same spacing, `factor` times as many points, centred on the same window.
    pub fn padded(&self, factor: usize) -> Result<Self> {
        let n = self.n * factor;
        let extra = (n - self.n) / 2;
        Self::new(n, self.dx, self.x0 - extra as f64 * self.dx)
    }
}

/// Centred dual grid of a [`UniformGrid`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FrequencyGrid {
    n: usize,
    dxi: f64,
}

impl FrequencyGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dxi(&self) -> f64 {
        self.dxi
    }

    /// `pi / dx`.
    pub fn nyquist(&self) -> f64 {
        0.5 * self.n as f64 * self.dxi
    }

    pub fn xi(&self, m: usize) -> f64 {
        (m as f64 - (self.n / 2) as f64) * self.dxi
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |m| self.xi(m))
    }
}

fn check_values(values: &[C64], n: usize) -> Result<()> {
    if values.len() != n {
        return Err(LabError::Structural(format!(
            "{} samples supplied for a grid of {n} points",
            values.len()
        )));
    }
    if let Some(j) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(LabError::Domain(format!("non-finite sample at index {j}")));
    }
    Ok(())
}

/// Complex samples of a function of `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: UniformGrid,
    values: Vec<C64>,
}

impl WaveFunction {
    pub fn new(grid: UniformGrid, values: Vec<C64>) -> Result<Self> {
        check_values(&values, grid.n)?;
        Ok(WaveFunction { grid, values })
    }

    pub fn from_fn(grid: UniformGrid, f: impl FnMut(f64) -> C64) -> Result<Self> {
        Self::new(grid, grid.points().map(f).collect())
    }

    pub fn from_real_fn(grid: UniformGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(grid, |x| C64::new(f(x), 0.0))
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        WaveFunction { grid, values: vec![C64::new(0.0, 0.0); grid.n] }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn scaled(&self, c: C64) -> Self {
        WaveFunction { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    /// Pointwise `a*self + b*other`.
    pub fn combine(&self, a: C64, other: &WaveFunction, b: C64) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(u, v)| a * u + b * v).collect();
        Ok(WaveFunction { grid: self.grid, values })
    }

    pub fn map(&self, f: impl Fn(f64, C64) -> C64) -> Self {
        let values = self.values.iter().enumerate().map(|(j, v)| f(self.grid.x(j), *v)).collect();
        WaveFunction { grid: self.grid, values }
    }

    pub fn l2_norm(&self) -> f64 {
        lp_norm(self, 2.0).expect("p = 2 is admissible")
    }

    /// Copy with unit L2 norm.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.l2_norm();
        if !(norm > 0.0) {
            return Err(LabError::Domain("cannot normalize the zero function".into()));
        }
        Ok(self.scaled(C64::new(1.0 / norm, 0.0)))
    }

    /// Relative L2 distance `||self - other|| / ||other||`.
    pub fn relative_distance(&self, other: &WaveFunction) -> Result<f64> {
        let diff = self.combine(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))?;
        Ok(diff.l2_norm() / other.l2_norm())
    }

    /// Same samples read on a zero-extended grid `factor` times wider.
    pub fn zero_padded(&self, factor: usize) -> Result<Self> {
        let grid = self.grid.padded(factor)?;
        let offset = (grid.n - self.grid.n) / 2;
        let mut values = vec![C64::new(0.0, 0.0); grid.n];
        values[offset..offset + self.grid.n].copy_from_slice(&self.values);
        Ok(WaveFunction { grid, values })
    }

    /// Trigonometric interpolant through the samples, evaluated at `x`.
    pub fn evaluate(&self, x: f64) -> C64 {
        let spec = forward_transform(self);
        spec.synthesize_at(C64::new(x, 0.0))
    }

    /// `dx sum_j exp(-i x_j xi) f_j` at an arbitrary real frequency: the
    /// rectangle-rule transform without interpolation.
    pub fn transform_at(&self, xi: f64) -> C64 {
        let step = C64::from_polar(1.0, -xi * self.grid.dx);
        let mut phase = C64::from_polar(1.0, -xi * self.grid.x0);
        let mut acc = C64::new(0.0, 0.0);
        for (j, v) in self.values.iter().enumerate() {
            if j % 64 == 0 {
                phase = C64::from_polar(1.0, -xi * self.grid.x(j));
            }
            acc += phase * v;
            phase *= step;
        }
        acc * self.grid.dx
    }
}

/// Samples of a function of frequency on the dual grid of `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: UniformGrid,
    values: Vec<C64>,
}

impl Spectrum {
    pub fn new(grid: UniformGrid, values: Vec<C64>) -> Result<Self> {
        check_values(&values, grid.n)?;
        Ok(Spectrum { grid, values })
    }

    pub fn from_fn(grid: UniformGrid, f: impl FnMut(f64) -> C64) -> Result<Self> {
        let freq = grid.frequency_grid();
        Self::new(grid, freq.points().map(f).collect())
    }

    /// Spatial grid this spectrum is dual to.
    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn frequency_grid(&self) -> FrequencyGrid {
        self.grid.frequency_grid()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64, C64) -> C64) -> Self {
        let freq = self.frequency_grid();
        let values = self.values.iter().enumerate().map(|(m, v)| f(freq.xi(m), *v)).collect();
        Spectrum { grid: self.grid, values }
    }

    /// Keeps samples with `keep(xi)`, zeroes the rest.
    pub fn restricted(&self, keep: impl Fn(f64) -> bool) -> Self {
        self.map(|xi, v| if keep(xi) { v } else { C64::new(0.0, 0.0) })
    }

    pub fn l2_norm(&self) -> f64 {
        spectrum_lp_norm(self, 2.0).expect("p = 2 is admissible")
    }

    /// `(1/2pi) sum_m dxi exp(i z xi_m) g_m`: the inversion integral evaluated
    /// at an arbitrary complex point. An entire function of `z`.
    pub fn synthesize_at(&self, z: C64) -> C64 {
        let freq = self.frequency_grid();
        let step = (C64::i() * z * freq.dxi()).exp();
        let mut phase = (C64::i() * z * freq.xi(0)).exp();
        let mut acc = C64::new(0.0, 0.0);
        for (m, v) in self.values.iter().enumerate() {
            if m % 64 == 0 {
                phase = (C64::i() * z * freq.xi(m)).exp();
            }
            acc += phase * v;
            phase *= step;
        }
        acc * freq.dxi() / (2.0 * PI)
    }

    /// Relative L2 mass of the samples with `|xi| > cutoff`.
    pub fn tail_fraction(&self, cutoff: f64) -> f64 {
        let freq = self.frequency_grid();
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let tail: f64 = self
            .values
            .iter()
            .enumerate()
            .filter(|(m, _)| freq.xi(*m).abs() > cutoff)
            .map(|(_, v)| v.norm_sqr())
            .sum();
        (tail / total).sqrt()
    }

    /// Smallest symmetric-free interval `[lo, hi]` containing every sample of
    /// modulus at least `rel * max|g|`.
    pub fn effective_support(&self, rel: f64) -> Option<(f64, f64)> {
        let freq = self.frequency_grid();
        let max = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return None;
        }
        let keep: Vec<usize> = (0..self.values.len()).filter(|m| self.values[*m].norm() >= rel * max).collect();
        let lo = freq.xi(*keep.first()?);
        let hi = freq.xi(*keep.last()?);
        Some((lo - freq.dxi(), hi + freq.dxi()))
    }
}

pub(crate) fn same_grid(a: &UniformGrid, b: &UniformGrid) -> Result<()> {
    if a != b {
        return Err(LabError::Structural(format!("grid mismatch: {a:?} vs {b:?}")));
    }
    Ok(())
}

type FftPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn fft_pair(n: usize) -> FftPair {
    static CACHE: OnceLock<Mutex<HashMap<usize, FftPair>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// `f^(xi_m) ~ int exp(-i x xi_m) f(x) dx` on the centred dual grid.
pub fn forward_transform(f: &WaveFunction) -> Spectrum {
    let grid = f.grid;
    let n = grid.n;
    let (fwd, _) = fft_pair(n);
    let mut buf = f.values.clone();
    fwd.process(&mut buf);
    let freq = grid.frequency_grid();
    let values = (0..n)
        .map(|m| {
            let xi = freq.xi(m);
            buf[(m + n / 2) % n] * C64::from_polar(grid.dx, -grid.x0 * xi)
        })
        .collect();
    Spectrum { grid, values }
}

/// `f(x_j) ~ (1/2pi) int exp(i x_j xi) g(xi) dxi`; exact inverse of
/// [`forward_transform`].
pub fn inverse_transform(g: &Spectrum) -> WaveFunction {
    let grid = g.grid;
    let n = grid.n;
    let (_, inv) = fft_pair(n);
    let freq = grid.frequency_grid();
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for (m, v) in g.values.iter().enumerate() {
        buf[(m + n / 2) % n] = v * C64::from_polar(1.0, grid.x0 * freq.xi(m));
    }
    inv.process(&mut buf);
    let scale = 1.0 / (n as f64 * grid.dx);
    WaveFunction { grid, values: buf.into_iter().map(|v| v * scale).collect() }
}

/// `(int |f|^p dx)^(1/p)` by the rectangle (= periodic trapezoid) rule.
pub fn lp_norm(f: &WaveFunction, p: f64) -> Result<f64> {
    weighted_lp(&f.values, f.grid.dx, p)
}

/// `(int |g|^p dxi)^(1/p)` on the dual grid.
pub fn spectrum_lp_norm(g: &Spectrum, p: f64) -> Result<f64> {
    weighted_lp(&g.values, g.frequency_grid().dxi(), p)
}

pub(crate) fn weighted_lp(values: &[C64], h: f64, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(LabError::Domain(format!("exponent p = {p} must lie in [1, inf)")));
    }
    let terms: Vec<f64> = values.iter().map(|v| v.norm().powf(p)).collect();
    Ok((h * pairwise_sum(&terms)).powf(1.0 / p))
}

/// `int conj(f) g dx`.
pub fn inner_product(f: &WaveFunction, g: &WaveFunction) -> Result<C64> {
    same_grid(&f.grid, &g.grid)?;
    let terms: Vec<C64> = f.values.iter().zip(&g.values).map(|(a, b)| a.conj() * b).collect();
    Ok(pairwise_sum_complex(&terms) * f.grid.dx)
}

/// `int conj(f) g dxi` on the dual grid.
pub fn spectrum_inner_product(f: &Spectrum, g: &Spectrum) -> Result<C64> {
    same_grid(&f.grid, &g.grid)?;
    let terms: Vec<C64> = f.values.iter().zip(&g.values).map(|(a, b)| a.conj() * b).collect();
    Ok(pairwise_sum_complex(&terms) * f.frequency_grid().dxi())
}

/// Warns when more than `threshold` of the spectral L2 mass sits beyond
/// `fraction * nyquist`.
pub fn band_limit_check(f: &WaveFunction, fraction: f64, threshold: f64) -> Option<AliasingWarning> {
    let spec = forward_transform(f);
    let cutoff = fraction * spec.frequency_grid().nyquist();
    let tail = spec.tail_fraction(cutoff);
    (tail > threshold).then_some(AliasingWarning { cutoff, tail_fraction: tail, threshold })
}

/// Local Lagrange interpolation of uniformly spaced samples
/// `values[k] ~ g(origin + k step)` with a stencil of `order + 1` points.
/// Returns 0 outside the sampled range.
pub fn local_interpolate(values: &[C64], origin: f64, step: f64, x: f64, order: usize) -> C64 {
    let n = values.len();
    let s = (x - origin) / step;
    if !(s >= 0.0) || s > (n - 1) as f64 {
        return C64::new(0.0, 0.0);
    }
    let width = order + 1;
    let nearest = s.round();
    if (s - nearest).abs() < 1e-13 {
        return values[nearest as usize];
    }
    let half = width / 2;
    let mut start = (s.floor() as isize + 1 - half as isize).max(0) as usize;
    if start + width > n {
        start = n.saturating_sub(width);
    }
    let stop = (start + width).min(n);
    // Barycentric weights for equispaced nodes: (-1)^k binom(w-1, k).
    let mut num = C64::new(0.0, 0.0);
    let mut den = 0.0;
    let m = stop - start - 1;
    let mut binom = 1.0;
    for k in 0..=m {
        if k > 0 {
            binom *= (m - k + 1) as f64 / k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let w = sign * binom / (s - (start + k) as f64);
        num += values[start + k] * w;
        den += w;
    }
    num / den
}

/// The continuous-variable transform of a sampled function tabulated on a
/// grid `factor` times finer than its dual grid, read off by local
/// polynomial interpolation. Zero outside the Nyquist band.
#[derive(Debug, Clone)]
pub struct FineSpectrum {
    origin: f64,
    step: f64,
    values: Vec<C64>,
    order: usize,
}

impl FineSpectrum {
    pub const DEFAULT_UPSAMPLING: usize = 8;
    pub const DEFAULT_ORDER: usize = 8;

    pub fn from_wave(f: &WaveFunction) -> Self {
        let padded = f.zero_padded(Self::DEFAULT_UPSAMPLING).expect("padding a valid grid");
        let spec = forward_transform(&padded);
        let freq = spec.frequency_grid();
        FineSpectrum { origin: freq.xi(0), step: freq.dxi(), values: spec.values, order: Self::DEFAULT_ORDER }
    }

    pub fn from_spectrum(g: &Spectrum) -> Self {
        Self::from_wave(&inverse_transform(g))
    }

    pub fn eval(&self, xi: f64) -> C64 {
        local_interpolate(&self.values, self.origin, self.step, xi, self.order)
    }
}

/// Kind tag written into CSV headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleDomain {
    Space,
    Frequency,
}

fn csv_text(domain: SampleDomain, grid: &UniformGrid, coords: impl Iterator<Item = f64>, values: &[C64]) -> String {
    let kind = match domain {
        SampleDomain::Space => "space",
        SampleDomain::Frequency => "frequency",
    };
    let mut out = String::new();
    let _ = writeln!(out, "# {kind} n={} dx={} x0={}", grid.n, grid.dx, grid.x0);
    for (c, v) in coords.zip(values) {
        let _ = writeln!(out, "{c},{},{}", v.re, v.im);
    }
    out
}

fn parse_csv(text: &str, expect: &str) -> Result<(UniformGrid, Vec<C64>)> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| LabError::Structural("empty csv".into()))?;
    let mut fields = header.trim_start_matches('#').split_whitespace();
    let kind = fields.next().unwrap_or_default();
    if kind != expect {
        return Err(LabError::Structural(format!("expected {expect} samples, found {kind:?}")));
    }
    let mut n = None;
    let mut dx = None;
    let mut x0 = None;
    for f in fields {
        let (k, v) = f.split_once('=').ok_or_else(|| LabError::Structural(format!("bad header field {f}")))?;
        let bad = |_| LabError::Structural(format!("bad header value {f}"));
        match k {
            "n" => n = Some(v.parse::<usize>().map_err(|_| LabError::Structural(format!("bad n {v}")))?),
            "dx" => dx = Some(v.parse::<f64>().map_err(bad)?),
            "x0" => x0 = Some(v.parse::<f64>().map_err(bad)?),
            _ => {}
        }
    }
    let missing = || LabError::Structural("header must carry n, dx and x0".into());
    let grid = UniformGrid::new(n.ok_or_else(missing)?, dx.ok_or_else(missing)?, x0.ok_or_else(missing)?)?;
    let mut values = Vec::with_capacity(grid.n);
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(LabError::Structural(format!("expected 3 columns in {line:?}")));
        }
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| LabError::Structural(format!("bad number {s}")));
        values.push(C64::new(parse(cols[1])?, parse(cols[2])?));
    }
    Ok((grid, values))
}

impl WaveFunction {
    /// Three-column CSV `x,re,im` under a one-line grid header.
    pub fn to_csv(&self) -> String {
        csv_text(SampleDomain::Space, &self.grid, self.grid.points(), &self.values)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let (grid, values) = parse_csv(text, "space")?;
        Self::new(grid, values)
    }
}

impl Spectrum {
    /// Three-column CSV `xi,re,im`; the header records the spatial grid.
    pub fn to_csv(&self) -> String {
        let freq = self.frequency_grid();
        csv_text(SampleDomain::Frequency, &self.grid, freq.points().collect::<Vec<_>>().into_iter(), &self.values)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let (grid, values) = parse_csv(text, "frequency")?;
        Self::new(grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gaussian(grid: UniformGrid) -> WaveFunction {
        WaveFunction::from_real_fn(grid, |x| (-x * x).exp()).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(UniformGrid::new(4, 1.0, 0.0).is_err());
        assert!(UniformGrid::new(100, 1.0, 0.0).is_err());
        assert!(UniformGrid::new(64, 0.0, 0.0).is_err());
        let g = UniformGrid::standard();
        assert_eq!(g.x(512), 0.0);
        assert!((g.frequency_grid().nyquist() - PI / g.dx()).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch_is_structural() {
        let g = UniformGrid::standard();
        let err = WaveFunction::new(g, vec![C64::new(0.0, 0.0); 10]).unwrap_err();
        assert!(matches!(err, LabError::Structural(_)));
        let mut vals = vec![C64::new(0.0, 0.0); g.n()];
        vals[3] = C64::new(f64::NAN, 0.0);
        assert!(WaveFunction::new(g, vals).is_err());
    }

    #[test]
    fn point_mass_has_flat_transform() {
        let g = UniformGrid::standard();
        let mut vals = vec![C64::new(0.0, 0.0); g.n()];
        vals[g.n() / 2] = C64::new(1.0 / g.dx(), 0.0);
        let spec = forward_transform(&WaveFunction::new(g, vals).unwrap());
        for v in spec.values() {
            assert!((v - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        let g = UniformGrid::standard();
        let spec = forward_transform(&gaussian(g));
        let freq = spec.frequency_grid();
        let err = spec
            .values()
            .iter()
            .enumerate()
            .map(|(m, v)| (v - C64::new(PI.sqrt() * (-freq.xi(m).powi(2) / 4.0).exp(), 0.0)).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-10, "max error {err}");
    }

    #[test]
    fn modulation_shifts_spectrum() {
        let g = UniformGrid::standard();
        let f = WaveFunction::from_fn(g, |x| C64::from_polar((-x * x).exp(), 2.0 * x)).unwrap();
        let spec = forward_transform(&f);
        let freq = spec.frequency_grid();
        for (m, v) in spec.values().iter().enumerate() {
            let expect = PI.sqrt() * (-(freq.xi(m) - 2.0).powi(2) / 4.0).exp();
            assert!((v - C64::new(expect, 0.0)).norm() <= 1e-10);
        }
    }

    #[test]
    fn inverse_of_gaussian_spectrum() {
        let g = UniformGrid::standard();
        let spec = Spectrum::from_fn(g, |xi| C64::new(PI.sqrt() * (-xi * xi / 4.0).exp(), 0.0)).unwrap();
        let f = inverse_transform(&spec);
        for (j, v) in f.values().iter().enumerate() {
            assert!((v - C64::new((-g.x(j).powi(2)).exp(), 0.0)).norm() < 1e-10);
        }
        let zero = inverse_transform(&Spectrum::new(g, vec![C64::new(0.0, 0.0); g.n()]).unwrap());
        assert!(zero.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn off_centre_grid_keeps_continuous_phase() {
        let g = UniformGrid::new(1024, 0.04, -17.3).unwrap();
        let f = WaveFunction::from_real_fn(g, |x| (-(x - 1.5).powi(2)).exp()).unwrap();
        let spec = forward_transform(&f);
        let freq = spec.frequency_grid();
        for (m, v) in spec.values().iter().enumerate() {
            let xi = freq.xi(m);
            let expect = C64::from_polar(PI.sqrt() * (-xi * xi / 4.0).exp(), -1.5 * xi);
            assert!((v - expect).norm() < 1e-10);
        }
    }

    #[test]
    fn lp_norms_of_reference_functions() {
        let g = UniformGrid::new(1024, 1.0 / 64.0, -8.0).unwrap();
        let boxf = WaveFunction::from_real_fn(g, |x| if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 }).unwrap();
        assert!((lp_norm(&boxf, 2.0).unwrap() - 1.0).abs() < 1e-12);
        let gs = gaussian(UniformGrid::standard());
        assert!((lp_norm(&gs, 2.0).unwrap() - (PI / 2.0).powf(0.25)).abs() < 1e-12);
        assert!((lp_norm(&gs, 6.0).unwrap() - (PI / 6.0).powf(1.0 / 12.0)).abs() < 1e-12);
        assert!(matches!(lp_norm(&gs, 0.5), Err(LabError::Domain(_))));
    }

    #[test]
    fn inner_product_parity_and_plancherel() {
        let g = UniformGrid::standard();
        let f = gaussian(g);
        let h = WaveFunction::from_real_fn(g, |x| x * (-x * x).exp()).unwrap();
        assert!(inner_product(&f, &h).unwrap().norm() < 1e-14);
        let k = WaveFunction::from_fn(g, |x| C64::from_polar((-(x - 0.3).powi(2) / 2.0).exp(), 0.7 * x)).unwrap();
        let lhs = spectrum_inner_product(&forward_transform(&f), &forward_transform(&k)).unwrap();
        let rhs = inner_product(&f, &k).unwrap() * 2.0 * PI;
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
        // closed form of <e^{-x^2}, e^{-(x-0.3)^2/2 + 0.7ix}>
        let a: f64 = 1.5;
        let b = C64::new(0.3, 0.7);
        let closed = (PI / a).sqrt() * (b * b / (4.0 * a) - 0.045).exp();
        assert!((rhs / (2.0 * PI) - closed).norm() < 1e-10);
    }

    #[test]
    fn local_interpolation_is_exact_on_polynomials() {
        let vals: Vec<C64> = (0..20).map(|k| C64::new((k as f64 * 0.1).powi(3) - 2.0, k as f64)).collect();
        let v = local_interpolate(&vals, 0.0, 0.1, 0.737, 6);
        assert!((v - C64::new(0.737f64.powi(3) - 2.0, 7.37)).norm() < 1e-12);
        assert_eq!(local_interpolate(&vals, 0.0, 0.1, -0.5, 6), C64::new(0.0, 0.0));
    }

    #[test]
    fn fine_spectrum_matches_continuous_transform() {
        let f = gaussian(UniformGrid::standard());
        let fine = FineSpectrum::from_wave(&f);
        for xi in [-7.31, -0.05, 0.0, 1.234, 5.5] {
            let expect = PI.sqrt() * (-xi * xi / 4.0f64).exp();
            assert!((fine.eval(xi) - C64::new(expect, 0.0)).norm() < 1e-11, "xi={xi}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let f = WaveFunction::from_fn(UniformGrid::new(16, 0.25, -2.0).unwrap(), |x| C64::new(x, -x * x)).unwrap();
        let text = f.to_csv();
        assert!(text.starts_with("# space n=16 dx=0.25 x0=-2\n"));
        assert_eq!(WaveFunction::from_csv(&text).unwrap(), f);
        let spec = forward_transform(&f);
        assert_eq!(Spectrum::from_csv(&spec.to_csv()).unwrap(), spec);
        assert!(Spectrum::from_csv(&text).is_err());
    }

    fn random_band_limited(seed: u64) -> WaveFunction {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = UniformGrid::standard();
        let cut = g.frequency_grid().nyquist() / 6.0;
        let spec = Spectrum::from_fn(g, |xi| {
            let v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if xi.abs() <= cut { v } else { C64::new(0.0, 0.0) }
        })
        .unwrap();
        inverse_transform(&spec)
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(seed in any::<u64>()) {
            let f = random_band_limited(seed);
            let back = inverse_transform(&forward_transform(&f));
            prop_assert!(back.relative_distance(&f).unwrap() <= 1e-12);
        }

        #[test]
        fn plancherel_constant_is_two_pi(seed in any::<u64>()) {
            let f = random_band_limited(seed);
            let lhs = forward_transform(&f).l2_norm().powi(2);
            let rhs = 2.0 * PI * f.l2_norm().powi(2);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs);
        }

        #[test]
        fn lp_norm_is_absolutely_homogeneous(seed in any::<u64>(), re in -3.0..3.0f64, im in -3.0..3.0f64, p in 1.0..8.0f64) {
            let f = random_band_limited(seed);
            let c = C64::new(re, im);
            let lhs = lp_norm(&f.scaled(c), p).unwrap();
            let rhs = c.norm() * lp_norm(&f, p).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
        }

        #[test]
        fn polarization_matches_inner_product(s1 in any::<u64>(), s2 in any::<u64>()) {
            let f = random_band_limited(s1);
            let g = random_band_limited(s2);
            let one = C64::new(1.0, 0.0);
            let i = C64::i();
            let q = |a: C64| f.combine(one, &g, a).unwrap().l2_norm().powi(2);
            let polar = (q(one) - q(-one) - i * q(i) + i * q(-i)) / 4.0;
            let direct = inner_product(&f, &g).unwrap();
            prop_assert!((polar - direct).norm() <= 1e-10 * (f.l2_norm() * g.l2_norm()));
        }
    }
}
