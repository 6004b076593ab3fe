//! Frequency-separated bilinear estimates
//! `||u1 u2||_{L^3_{t,x}} <= C N^(-1/6) ||h1||_2 ||h2||_2` for `h1^` supported
//! in `|xi| <= s` and `h2^` in `|eta| >= N s`.
//!
//! The Hausdorff-Young side changes variables to `gamma = xi + eta`,
//! `tau = xi^2 + eta^2`, whose Jacobian is `2 |xi - eta|`. Writing
//! `u1 u2 = (2 pi)^-2 int exp(i x gamma + i t tau) G dgamma dtau`, the
//! two-dimensional Hausdorff-Young inequality at the exponent pair
//! `(3/2, 3)` gives
//!
//! ```text
//! ||u1 u2||_3 <= (2 pi)^(-4/3) ||G||_{3/2},
//! ||G||_{3/2}^{3/2} = int int |h1^(xi) h2^(eta)|^{3/2} (2 |xi - eta|)^{-1/2} dxi deta.
//! ```

use crate::error::{LabError, Result};
use crate::lattice::{forward_transform, same_grid, Spectrum, UniformGrid, WaveFunction};
use crate::propagator::{evolve_range, spacetime_lp, TimeQuadrature};
use crate::quadrature::pairwise_sum;
use crate::C64;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Samples below this fraction of the peak count as outside a support.
const SUPPORT_FLOOR: f64 = 1e-10;

/// Which frequencies a band occupies, always symmetric in the sign of `xi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BandSpec {
    /// `|xi| <= s`.
    Low { s: f64 },
    /// `N s <= |xi| <= 2 N s`.
    High { s: f64, n: f64 },
    /// `lo <= |xi| <= hi`.
    Annulus { lo: f64, hi: f64 },
}

impl BandSpec {
    /// `(lo, hi)` bounds on `|xi|`.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            BandSpec::Low { s } => (0.0, s),
            BandSpec::High { s, n } => (n * s, 2.0 * n * s),
            BandSpec::Annulus { lo, hi } => (lo, hi),
        }
    }

    pub fn contains(&self, xi: f64) -> bool {
        let (lo, hi) = self.bounds();
        xi.abs() >= lo && xi.abs() <= hi
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            BandSpec::Low { s } => s > 0.0,
            BandSpec::High { s, n } => s > 0.0 && n > 1.0,
            BandSpec::Annulus { lo, hi } => lo >= 0.0 && hi > lo,
        };
        let (lo, hi) = self.bounds();
        if !ok || !lo.is_finite() || !hi.is_finite() {
            return Err(LabError::Domain(format!("invalid band {self:?}")));
        }
        Ok(())
    }
}

/// Shape of `h^` inside its band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Flat,
    /// Independent complex amplitudes per frequency sample.
    Random,
    /// A Gaussian bump centred in each half of the band.
    GaussianBump,
}

impl std::str::FromStr for Profile {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(Profile::Flat),
            "random" => Ok(Profile::Random),
            "gaussian-bump" | "gaussian_bump" => Ok(Profile::GaussianBump),
            other => Err(LabError::Usage(format!("unknown profile `{other}`"))),
        }
    }
}

/// Unit-norm function whose transform is supported exactly on the band's
/// frequency samples.
pub fn make_band_limited(grid: UniformGrid, spec: BandSpec, profile: Profile, seed: u64) -> Result<WaveFunction> {
    spec.validate()?;
    let (lo, hi) = spec.bounds();
    let nyquist = grid.frequency_grid().nyquist();
    if hi > nyquist {
        return Err(LabError::Domain(format!("band edge {hi} exceeds the Nyquist frequency {nyquist}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mid, width) = (0.5 * (lo + hi), hi - lo);
    let spec_values = Spectrum::from_fn(grid, |xi| {
        if !spec.contains(xi) {
            return C64::new(0.0, 0.0);
        }
        match profile {
            Profile::Flat => C64::new(1.0, 0.0),
            Profile::Random => C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            Profile::GaussianBump => {
                let centre = if lo == 0.0 { 0.0 } else { mid };
                let z = (xi.abs() - centre) / (0.25 * width);
                C64::new((-z * z).exp(), 0.0)
            }
        }
    })?;
    if spec_values.values().iter().all(|v| *v == C64::new(0.0, 0.0)) {
        return Err(LabError::Domain(format!("band {spec:?} contains no frequency sample of the grid")));
    }
    crate::lattice::inverse_transform(&spec_values).normalized()
}

/// `||exp(it Laplacian) h1 exp(it Laplacian) h2||_{L^3_{t,x}}`.
pub fn bilinear_l3(h1: &WaveFunction, h2: &WaveFunction, tq: &TimeQuadrature) -> Result<f64> {
    same_grid(h1.grid(), h2.grid())?;
    let u1 = evolve_range(h1, tq).value;
    let u2 = evolve_range(h2, tq).value;
    spacetime_lp(&u1.zip_with(&u2, |a, b| a * b)?, 3.0)
}

/// `(2 pi)^(-4/3) ||G||_{3/2}`, the Hausdorff-Young upper bound for
/// [`bilinear_l3`].
pub fn hausdorff_young_density(h1: &WaveFunction, h2: &WaveFunction) -> Result<f64> {
    same_grid(h1.grid(), h2.grid())?;
    let (a, b) = (forward_transform(h1), forward_transform(h2));
    let freq = a.frequency_grid();
    let mask = |s: &Spectrum| -> Vec<bool> {
        let peak = s.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        s.values().iter().map(|v| v.norm() > SUPPORT_FLOOR * peak).collect()
    };
    let (ma, mb) = (mask(&a), mask(&b));
    if ma.iter().zip(&mb).any(|(x, y)| *x && *y) {
        return Err(LabError::Precondition("frequency supports overlap, the Jacobian 2|xi - eta| vanishes".into()));
    }
    let support = |s: &Spectrum, m: &[bool]| -> Vec<(f64, f64)> {
        (0..m.len()).filter(|k| m[*k]).map(|k| (freq.xi(k), s.values()[k].norm().powf(1.5))).collect()
    };
    let (sa, sb) = (support(&a, &ma), support(&b, &mb));
    let rows: Vec<f64> = sa
        .par_iter()
        .map(|(xi, wa)| {
            let terms: Vec<f64> = sb.iter().map(|(eta, wb)| wa * wb / (2.0 * (xi - eta).abs()).sqrt()).collect();
            pairwise_sum(&terms)
        })
        .collect();
    let dxi = freq.dxi();
    let g_norm = (pairwise_sum(&rows) * dxi * dxi).powf(2.0 / 3.0);
    Ok((2.0 * PI).powf(-4.0 / 3.0) * g_norm)
}

/// Resolution of a separation sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Smallest admissible spatial window.
    pub window_length: f64,
    /// Grids are refined until `nyquist >= nyquist_factor * 2 N s`.
    pub nyquist_factor: f64,
    pub time_nodes: usize,
    /// Compactification scale is `time_scale / (N s^2)`.
    pub time_scale: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { window_length: 200.0, nyquist_factor: 2.0, time_nodes: 257, time_scale: 0.5 }
    }
}

/// One separation factor of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: f64,
    pub value: f64,
    /// Hausdorff-Young bound; absent when the supports touch.
    pub bound: Option<f64>,
    /// Whether the row enters the slope fit (`N > 1`).
    pub fitted: bool,
    /// Least-squares slope over the fitted rows up to this one.
    pub slope_so_far: Option<f64>,
    pub grid_n: usize,
    pub grid_dx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub s: f64,
    pub profile: Profile,
    pub seed: u64,
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    /// Slope of `log value` against `log N` over rows with `N > 1`.
    pub slope: f64,
    pub intercept: f64,
}

impl SweepReport {
    /// Every row with a bound satisfies `value <= bound (1 + rel)`.
    pub fn bound_holds(&self, rel: f64) -> bool {
        self.rows.iter().all(|r| r.bound.is_none_or(|b| r.value <= b * (1.0 + rel)))
    }

    /// CSV `N,value,bound,slope_so_far`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,value,bound,slope_so_far\n");
        for r in &self.rows {
            let bound = r.bound.map(|b| format!("{b:.12e}")).unwrap_or_default();
            let slope = r.slope_so_far.map(|b| format!("{b:.6}")).unwrap_or_default();
            let _ = writeln!(out, "{},{:.12e},{bound},{slope}", r.n, r.value);
        }
        out
    }

    /// Whitespace-separated `log N  log value` pairs for plotting.
    pub fn loglog_data(&self) -> String {
        let mut out = String::from("# log(N) log(value)\n");
        for r in self.rows.iter().filter(|r| r.fitted) {
            let _ = writeln!(out, "{:.9} {:.9}", r.n.ln(), r.value.ln());
        }
        out
    }
}

/// Least-squares line through `(x, y)`: `(slope, intercept)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(LabError::Domain("a line fit needs at least two points".into()));
    }
    let design = DMatrix::from_fn(x.len(), 2, |i, j| if j == 0 { x[i] } else { 1.0 });
    let rhs = DVector::from_column_slice(y);
    let sol = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| LabError::Domain(format!("line fit failed: {e}")))?;
    Ok((sol[0], sol[1]))
}

/// Grid with window at least `window_length` and Nyquist at least `nyquist`.
pub fn sweep_grid(window_length: f64, nyquist: f64) -> Result<UniformGrid> {
    let dx = PI / nyquist;
    let n = ((window_length / dx).ceil() as usize).next_power_of_two().max(8);
    UniformGrid::symmetric(n, 0.5 * n as f64 * dx)
}

/// Measures `||u1 u2||_3` for a low band `|xi| <= s` against high bands
/// `N s <= |xi| <= 2 N s` and fits the decay exponent in `N`.
pub fn separation_sweep(s: f64, ns: &[f64], profile: Profile, seed: u64, config: &SweepConfig) -> Result<SweepReport> {
    if !(s > 0.0) || ns.is_empty() {
        return Err(LabError::Domain("a sweep needs s > 0 and at least one N".into()));
    }
    if ns.iter().any(|n| !(*n >= 1.0)) {
        return Err(LabError::Domain("separation factors must satisfy N >= 1".into()));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for (k, &n) in ns.iter().enumerate() {
        let top = 2.0 * n * s;
        let grid = sweep_grid(config.window_length, config.nyquist_factor * top)?;
        let low = make_band_limited(grid, BandSpec::Low { s }, profile, seed.wrapping_add(2 * k as u64))?;
        let high_spec = if n > 1.0 { BandSpec::High { s, n } } else { BandSpec::Annulus { lo: s, hi: 2.0 * s } };
        let high = make_band_limited(grid, high_spec, profile, seed.wrapping_add(2 * k as u64 + 1))?;
        let tq = TimeQuadrature::compactified(config.time_nodes, config.time_scale / (n * s * s))?;
        let value = bilinear_l3(&low, &high, &tq)?;
        let bound = match hausdorff_young_density(&low, &high) {
            Ok(b) => Some(b),
            Err(LabError::Precondition(_)) => None,
            Err(e) => return Err(e),
        };
        rows.push(SweepRow { n, value, bound, fitted: n > 1.0, slope_so_far: None, grid_n: grid.n(), grid_dx: grid.dx() });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for row in rows.iter_mut() {
        if row.fitted {
            xs.push(row.n.ln());
            ys.push(row.value.ln());
            if xs.len() >= 2 {
                row.slope_so_far = Some(fit_line(&xs, &ys)?.0);
            }
        }
    }
    let (slope, intercept) = fit_line(&xs, &ys)
        .map_err(|_| LabError::Precondition("the slope fit needs at least two separation factors N > 1".into()))?;
    Ok(SweepReport { s, profile, seed, config: *config, rows, slope, intercept })
}
