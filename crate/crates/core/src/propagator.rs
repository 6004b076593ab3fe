//! Free Schrödinger flow `u(t) = exp(it Laplacian) f`, realised as the
//! frequency multiplier `exp(i t xi^2)`, and space-time Lebesgue norms.
//!
//! A single [`evolve`] call applies the multiplier on the periodic grid. A
//! [`SpaceTimeField`] has to cover all of `R_t`, and on the torus the flow
//! stops dispersing once the solution reaches the window edge. Rows with
//! `|t|` beyond [`far_field_time`] therefore use the Fresnel form
//!
//! ```text
//! u(x, t) = (-4 pi i t)^(-1/2) exp(-i x^2 / 4t) g^(-x / 2t),   g(y) = exp(-i y^2 / 4t) f(y)
//! ```
//!
//! sampled at `x = -2 t xi_m`, so the row grid dilates with `t` exactly as the
//! solution does.

use crate::error::{Checked, LabError, Result};
use crate::lattice::{
    band_limit_check, forward_transform, inverse_transform, lp_norm, weighted_lp, FineSpectrum, Spectrum,
    UniformGrid, WaveFunction,
};
use crate::quadrature::gauss_legendre;
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Relative spectral mass tolerated beyond `0.9 * nyquist` before [`evolve`]
/// reports an aliasing warning.
pub const EVOLVE_TAIL_THRESHOLD: f64 = 1e-8;
const EVOLVE_BAND_FRACTION: f64 = 0.9;

/// Scale of the default compactification `t = tan(theta) / 4`.
pub const DEFAULT_TIME_SCALE: f64 = 0.25;
pub const DEFAULT_TIME_NODES: usize = 257;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum TimeScheme {
    /// `t = scale * tan(theta)` with Gauss-Legendre nodes in `theta`.
    Compactified { scale: f64 },
    /// Gauss-Legendre nodes on `[-half_span, half_span]`.
    Truncated { half_span: f64 },
    /// Caller-supplied nodes and weights.
    Explicit,
}

/// Nodes and positive weights for integrals over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scheme: TimeScheme,
}

impl TimeQuadrature {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::validated(nodes, weights, TimeScheme::Explicit)
    }

    fn validated(nodes: Vec<f64>, weights: Vec<f64>, scheme: TimeScheme) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(LabError::Structural("time nodes and weights must be non-empty and equal in length".into()));
        }
        if nodes.windows(2).any(|p| !(p[0] < p[1])) || nodes.iter().any(|t| !t.is_finite()) {
            return Err(LabError::Domain("time nodes must be finite and strictly increasing".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(LabError::Domain("time weights must be positive and finite".into()));
        }
        Ok(TimeQuadrature { nodes, weights, scheme })
    }

    /// Covers all of `R`: `t = scale tan(theta)`, `theta` in `(-pi/2, pi/2)`,
    /// Jacobian `scale sec^2(theta)` folded into the weights.
    pub fn compactified(points: usize, scale: f64) -> Result<Self> {
        if points == 0 || !(scale > 0.0) {
            return Err(LabError::Domain(format!("compactified rule needs points > 0 and scale > 0, got {points}, {scale}")));
        }
        let (x, w) = gauss_legendre(points);
        let half = 0.5 * PI;
        let mut nodes = Vec::with_capacity(points);
        let mut weights = Vec::with_capacity(points);
        for (xi, wi) in x.iter().zip(&w) {
            let theta = half * xi;
            let sec = 1.0 / theta.cos();
            nodes.push(scale * theta.tan());
            weights.push(half * wi * scale * sec * sec);
        }
        Self::validated(nodes, weights, TimeScheme::Compactified { scale })
    }

    pub fn truncated(points: usize, half_span: f64) -> Result<Self> {
        if points == 0 || !(half_span > 0.0) {
            return Err(LabError::Domain("truncated rule needs points > 0 and a positive span".into()));
        }
        let (x, w) = gauss_legendre(points);
        let nodes = x.iter().map(|x| half_span * x).collect();
        let weights = w.iter().map(|w| half_span * w).collect();
        Self::validated(nodes, weights, TimeScheme::Truncated { half_span })
    }

    /// One node at `t` with unit weight: reduces space-time norms to a slice.
    pub fn single(t: f64) -> Self {
        TimeQuadrature { nodes: vec![t], weights: vec![1.0], scheme: TimeScheme::Explicit }
    }

    /// 257 compactified nodes, `t = tan(theta) / 4`.
    pub fn standard() -> Self {
        Self::compactified(DEFAULT_TIME_NODES, DEFAULT_TIME_SCALE).expect("default rule is valid")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scheme(&self) -> TimeScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Applies `exp(i t xi^2)` on the periodic grid.
pub fn evolve(f: &WaveFunction, t: f64) -> Checked<WaveFunction> {
    let warnings = band_limit_check(f, EVOLVE_BAND_FRACTION, EVOLVE_TAIL_THRESHOLD).into_iter().collect();
    Checked { value: evolve_unchecked(f, t), warnings }
}

pub(crate) fn evolve_unchecked(f: &WaveFunction, t: f64) -> WaveFunction {
    if t == 0.0 {
        return f.clone();
    }
    let spec = forward_transform(f).map(|xi, v| v * C64::from_polar(1.0, t * xi * xi));
    inverse_transform(&spec)
}

/// Time beyond which rows of a [`SpaceTimeField`] switch to the Fresnel
/// representation: `L / (4 xi_max)`. At that time frequencies up to half the
/// Nyquist band have crossed half the window, and the Fresnel chirp over the
/// central half of the window is still resolved.
pub fn far_field_time(grid: &UniformGrid) -> f64 {
    grid.length() / (4.0 * grid.frequency_grid().nyquist())
}

/// How the samples of one time slice are laid out in space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RowFrame {
    /// Samples at the base grid points.
    Direct,
    /// Samples at `x_m = -2 t xi_m` on the dilated Fresnel grid.
    Fresnel { t: f64 },
}

fn fresnel_prefactor(t: f64) -> C64 {
    C64::new(0.0, -4.0 * PI * t).sqrt().inv()
}

fn fresnel_forward(f: &WaveFunction, t: f64) -> Vec<C64> {
    let chirped = f.map(|y, v| v * C64::from_polar(1.0, -y * y / (4.0 * t)));
    let spec = forward_transform(&chirped);
    let c = fresnel_prefactor(t);
    spec.map(|xi, v| c * v * C64::from_polar(1.0, -t * xi * xi)).into_values()
}

/// `exp(-it Laplacian)` applied to Fresnel-frame samples, returned on the base grid.
fn fresnel_backward(grid: &UniformGrid, values: &[C64], t: f64) -> WaveFunction {
    let spec = Spectrum::new(*grid, values.to_vec())
        .expect("row has grid length")
        .map(|xi, v| v * C64::from_polar(1.0, t * xi * xi));
    let back = inverse_transform(&spec);
    let c = fresnel_prefactor(t).conj() * (4.0 * PI * t.abs());
    back.map(|y, v| c * v * C64::from_polar(1.0, y * y / (4.0 * t)))
}

/// Samples of `exp(it Laplacian) f` over a space grid times quadrature nodes.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    grid: UniformGrid,
    times: TimeQuadrature,
    frames: Vec<RowFrame>,
    rows: Vec<Vec<C64>>,
}

impl SpaceTimeField {
    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn times(&self) -> &TimeQuadrature {
        &self.times
    }

    pub fn rows(&self) -> &[Vec<C64>] {
        &self.rows
    }

    pub fn frame(&self, k: usize) -> RowFrame {
        self.frames[k]
    }

    /// Spatial quadrature weight of row `k`.
    pub fn row_spacing(&self, k: usize) -> f64 {
        match self.frames[k] {
            RowFrame::Direct => self.grid.dx(),
            RowFrame::Fresnel { t } => 2.0 * t.abs() * self.grid.frequency_grid().dxi(),
        }
    }

    /// Position of sample `j` in row `k`.
    pub fn position(&self, k: usize, j: usize) -> f64 {
        match self.frames[k] {
            RowFrame::Direct => self.grid.x(j),
            RowFrame::Fresnel { t } => -2.0 * t * self.grid.frequency_grid().xi(j),
        }
    }

    /// Row `k` as a function on the base grid (`exp(it Laplacian) f` at `t_k`).
    pub fn row_on_grid(&self, k: usize) -> WaveFunction {
        match self.frames[k] {
            RowFrame::Direct => WaveFunction::new(self.grid, self.rows[k].clone()).expect("row matches grid"),
            RowFrame::Fresnel { t } => {
                let back = fresnel_backward(&self.grid, &self.rows[k], t);
                evolve_unchecked(&back, t)
            }
        }
    }

    /// Pointwise combination of fields sharing grid and quadrature.
    pub fn zip_with(&self, other: &SpaceTimeField, f: impl Fn(C64, C64) -> C64 + Sync) -> Result<SpaceTimeField> {
        self.check_compatible(other)?;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(u, v)| f(*u, *v)).collect())
            .collect();
        Ok(SpaceTimeField { grid: self.grid, times: self.times.clone(), frames: self.frames.clone(), rows })
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> SpaceTimeField {
        let rows = self.rows.iter().map(|r| r.iter().map(|v| f(*v)).collect()).collect();
        SpaceTimeField { grid: self.grid, times: self.times.clone(), frames: self.frames.clone(), rows }
    }

    pub fn check_compatible(&self, other: &SpaceTimeField) -> Result<()> {
        if self.grid != other.grid || self.times != other.times {
            return Err(LabError::Structural("space-time fields live on different grids".into()));
        }
        Ok(())
    }

    /// `int int conj(self) other dx dt`.
    pub fn pairing(&self, other: &SpaceTimeField) -> Result<C64> {
        self.check_compatible(other)?;
        let per_row: Vec<C64> = (0..self.rows.len())
            .map(|k| {
                let s: C64 = self.rows[k].iter().zip(&other.rows[k]).map(|(a, b)| a.conj() * b).sum();
                s * self.row_spacing(k) * self.times.weights[k]
            })
            .collect();
        Ok(crate::quadrature::pairwise_sum_complex(&per_row))
    }

    /// `int exp(-i t_k Laplacian) row_k dt`, the adjoint of [`evolve_range`].
    pub fn backpropagate(&self) -> WaveFunction {
        let parts: Vec<WaveFunction> = (0..self.rows.len())
            .into_par_iter()
            .map(|k| {
                let w = C64::new(self.times.weights[k], 0.0);
                let back = match self.frames[k] {
                    RowFrame::Direct => {
                        let row = WaveFunction::new(self.grid, self.rows[k].clone()).expect("row matches grid");
                        evolve_unchecked(&row, -self.times.nodes[k])
                    }
                    RowFrame::Fresnel { t } => fresnel_backward(&self.grid, &self.rows[k], t),
                };
                back.scaled(w)
            })
            .collect();
        let n = self.grid.n();
        let values = (0..n)
            .map(|j| {
                let column: Vec<C64> = parts.iter().map(|p| p.values()[j]).collect();
                crate::quadrature::pairwise_sum_complex(&column)
            })
            .collect();
        WaveFunction::new(self.grid, values).expect("finite sum of finite rows")
    }

    /// Gridded CSV `t,x,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,re,im\n");
        for (k, row) in self.rows.iter().enumerate() {
            let t = self.times.nodes[k];
            for (j, v) in row.iter().enumerate() {
                let _ = writeln!(out, "{t},{},{},{}", self.position(k, j), v.re, v.im);
            }
        }
        out
    }
}

/// Evolves `f` to every node of `tq`.
pub fn evolve_range(f: &WaveFunction, tq: &TimeQuadrature) -> Checked<SpaceTimeField> {
    let warnings = band_limit_check(f, EVOLVE_BAND_FRACTION, EVOLVE_TAIL_THRESHOLD).into_iter().collect();
    Checked { value: evolve_range_unchecked(f, tq), warnings }
}

pub(crate) fn evolve_range_unchecked(f: &WaveFunction, tq: &TimeQuadrature) -> SpaceTimeField {
    let grid = *f.grid();
    let switch = far_field_time(&grid);
    let spec = forward_transform(f);
    let (frames, rows): (Vec<RowFrame>, Vec<Vec<C64>>) = tq
        .nodes
        .par_iter()
        .map(|&t| {
            if t == 0.0 {
                (RowFrame::Direct, f.values().to_vec())
            } else if t.abs() <= switch {
                let evolved = spec.map(|xi, v| v * C64::from_polar(1.0, t * xi * xi));
                (RowFrame::Direct, inverse_transform(&evolved).into_values())
            } else {
                (RowFrame::Fresnel { t }, fresnel_forward(f, t))
            }
        })
        .unzip();
    SpaceTimeField { grid, times: tq.clone(), frames, rows }
}

/// `(sum_k w_k int |u(x, t_k)|^p dx)^(1/p)`.
pub fn spacetime_lp(u: &SpaceTimeField, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(LabError::Domain(format!("exponent p = {p} must lie in [1, inf)")));
    }
    let per_row: Vec<f64> = (0..u.rows.len())
        .map(|k| u.times.weights[k] * weighted_lp(&u.rows[k], u.row_spacing(k), p).map(|v| v.powf(p)).unwrap_or(0.0))
        .collect();
    Ok(crate::quadrature::pairwise_sum(&per_row).powf(1.0 / p))
}

/// `||exp(it Laplacian) f||_{L^6_{t,x}} / ||f||_2` under the default time rule.
pub fn strichartz_ratio(f: &WaveFunction) -> Result<f64> {
    strichartz_ratio_with(f, &TimeQuadrature::standard())
}

pub fn strichartz_ratio_with(f: &WaveFunction, tq: &TimeQuadrature) -> Result<f64> {
    let norm = f.l2_norm();
    if !(norm > 0.0) {
        return Err(LabError::Domain("Strichartz ratio of the zero function".into()));
    }
    let field = evolve_range_unchecked(f, tq);
    Ok(spacetime_lp(&field, 6.0)? / norm)
}

/// One-record summary of a ratio evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub ratio: f64,
    pub l6_norm: f64,
    pub l2_norm: f64,
    pub time_rule: TimeScheme,
    pub time_nodes: usize,
    pub grid_n: usize,
    pub grid_dx: f64,
    pub grid_x0: f64,
    pub far_field_time: f64,
    /// `|ratio - ratio on a rule with about half the nodes|`.
    pub quadrature_error_estimate: f64,
    pub warnings: Vec<String>,
}

pub fn strichartz_report(f: &WaveFunction, tq: &TimeQuadrature) -> Result<RatioReport> {
    let l2 = f.l2_norm();
    let checked = evolve_range(f, tq);
    let l6 = spacetime_lp(&checked.value, 6.0)?;
    if !(l2 > 0.0) {
        return Err(LabError::Domain("Strichartz ratio of the zero function".into()));
    }
    let coarse_nodes = (tq.len() / 2) | 1;
    let coarse = match tq.scheme() {
        TimeScheme::Compactified { scale } => Some(TimeQuadrature::compactified(coarse_nodes, scale)?),
        TimeScheme::Truncated { half_span } => Some(TimeQuadrature::truncated(coarse_nodes, half_span)?),
        TimeScheme::Explicit => None,
    };
    let ratio = l6 / l2;
    let estimate = match coarse {
        Some(c) => (strichartz_ratio_with(f, &c)? - ratio).abs(),
        None => f64::NAN,
    };
    let grid = f.grid();
    Ok(RatioReport {
        ratio,
        l6_norm: l6,
        l2_norm: l2,
        time_rule: tq.scheme(),
        time_nodes: tq.len(),
        grid_n: grid.n(),
        grid_dx: grid.dx(),
        grid_x0: grid.x0(),
        far_field_time: far_field_time(grid),
        quadrature_error_estimate: estimate,
        warnings: checked.warnings.iter().map(|w| w.to_string()).collect(),
    })
}

/// `f^vee(x) = (1/2pi) int exp(i x xi) f(xi) dxi`, treating the samples of `f`
/// as a function of frequency; evaluated on the same grid.
pub fn inverse_fourier_profile(f: &WaveFunction) -> WaveFunction {
    let fine = FineSpectrum::from_wave(f);
    f.map(|x, _| fine.eval(-x) / (2.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierSymmetry {
    /// `||exp(it Laplacian) f||_6`.
    pub norm_f: f64,
    /// `||exp(it Laplacian) f^vee||_6`.
    pub norm_finv: f64,
    /// `norm_f / norm_finv`.
    pub constant: f64,
}

/// Strichartz norms of `f` and of its inverse Fourier transform.
pub fn fourier_symmetry_check(f: &WaveFunction) -> Result<FourierSymmetry> {
    fourier_symmetry_check_with(f, &TimeQuadrature::standard())
}

pub fn fourier_symmetry_check_with(f: &WaveFunction, tq: &TimeQuadrature) -> Result<FourierSymmetry> {
    if !(f.l2_norm() > 0.0) {
        return Err(LabError::Domain("Fourier symmetry of the zero function".into()));
    }
    let finv = inverse_fourier_profile(f);
    let norm_f = spacetime_lp(&evolve_range_unchecked(f, tq), 6.0)?;
    let norm_finv = spacetime_lp(&evolve_range_unchecked(&finv, tq), 6.0)?;
    Ok(FourierSymmetry { norm_f, norm_finv, constant: norm_f / norm_finv })
}

/// `lp_norm` of the slice at `t`, convenience for single-time checks.
pub fn slice_lp(f: &WaveFunction, t: f64, p: f64) -> Result<f64> {
    lp_norm(&evolve_unchecked(f, t), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::inner_product;

    fn gaussian() -> WaveFunction {
        WaveFunction::from_real_fn(UniformGrid::standard(), |x| (-x * x).exp()).unwrap()
    }

    /// `(1 - 4it)^(-1/2) exp(-x^2 / (1 - 4it))`, the flow of `exp(-x^2)` under
    /// the multiplier `exp(i t xi^2)` (complete the square in the Fourier
    /// integral).
    fn gaussian_flow(x: f64, t: f64) -> C64 {
        let d = C64::new(1.0, -4.0 * t);
        d.sqrt().inv() * (-x * x / d).exp()
    }

    #[test]
    fn zero_time_is_identity() {
        let f = gaussian();
        assert_eq!(evolve(&f, 0.0).value, f);
    }

    #[test]
    fn gaussian_flow_matches_closed_form() {
        let f = gaussian();
        let u = evolve(&f, 0.5);
        assert!(u.is_clean());
        let err = u.value.values().iter().enumerate().map(|(j, v)| (v - gaussian_flow(f.grid().x(j), 0.5)).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-9, "max error {err}");
    }

    #[test]
    fn group_law_and_unitarity() {
        let f = WaveFunction::from_fn(UniformGrid::standard(), |x| C64::from_polar((-x * x).exp() * (1.0 + x), 0.3 * x)).unwrap();
        let a = evolve_unchecked(&evolve_unchecked(&f, 0.2), 0.35);
        let b = evolve_unchecked(&f, 0.55);
        assert!(a.relative_distance(&b).unwrap() < 1e-12);
        for t in [-3.0, 0.01, 0.7, 40.0] {
            let drift = (evolve_unchecked(&f, t).l2_norm() - f.l2_norm()).abs() / f.l2_norm();
            assert!(drift <= 1e-12);
        }
    }

    #[test]
    fn fresnel_rows_match_closed_form() {
        let f = gaussian();
        let tq = TimeQuadrature::new(vec![-7.5, -0.9, 0.05, 0.4, 3.0, 250.0], vec![1.0; 6]).unwrap();
        let field = evolve_range(&f, &tq).value;
        for k in 0..tq.len() {
            let t = tq.nodes()[k];
            for j in (0..f.grid().n()).step_by(37) {
                let x = field.position(k, j);
                let err = (field.rows()[k][j] - gaussian_flow(x, t)).norm();
                assert!(err < 1e-10, "t={t} x={x} err={err}");
            }
        }
        assert!(matches!(field.frame(0), RowFrame::Fresnel { .. }));
        assert!(matches!(field.frame(2), RowFrame::Direct));
    }

    #[test]
    fn fresnel_row_returns_to_grid() {
        let f = gaussian();
        let tq = TimeQuadrature::new(vec![0.3], vec![1.0]).unwrap();
        let field = evolve_range_unchecked(&f, &tq);
        assert!(matches!(field.frame(0), RowFrame::Fresnel { .. }));
        let direct = evolve_unchecked(&f, 0.3);
        assert!(field.row_on_grid(0).relative_distance(&direct).unwrap() < 1e-10);
    }

    #[test]
    fn backpropagation_is_adjoint_of_evolution() {
        let grid = UniformGrid::standard();
        let f = WaveFunction::from_fn(grid, |x| C64::from_polar((-x * x).exp() * (1.0 + 0.4 * x * x), 0.5 * x)).unwrap();
        let g = WaveFunction::from_fn(grid, |x| C64::new((-(x - 0.5).powi(2)).exp(), x * (-x * x).exp())).unwrap();
        let tq = TimeQuadrature::compactified(33, 0.25).unwrap();
        let uf = evolve_range_unchecked(&f, &tq);
        let ug = evolve_range_unchecked(&g, &tq);
        let lhs = ug.pairing(&uf).unwrap();
        let rhs = inner_product(&g, &uf.backpropagate()).unwrap();
        assert!((lhs - rhs).norm() < 1e-12 * lhs.norm());
    }

    #[test]
    fn single_node_reproduces_input_and_slice_norm() {
        let f = gaussian();
        let field = evolve_range(&f, &TimeQuadrature::single(0.0)).value;
        assert_eq!(field.rows()[0], f.values());
        let l6 = spacetime_lp(&field, 6.0).unwrap();
        assert!((l6 - lp_norm(&f, 6.0).unwrap()).abs() < 1e-14);
        let tq = TimeQuadrature::single(0.07);
        assert!((spacetime_lp(&evolve_range(&f, &tq).value, 4.0).unwrap() - slice_lp(&f, 0.07, 4.0).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn rows_are_unitary() {
        let f = gaussian();
        let tq = TimeQuadrature::standard();
        let field = evolve_range(&f, &tq).value;
        let l2 = f.l2_norm();
        for k in 0..tq.len() {
            let row = weighted_lp(&field.rows()[k], field.row_spacing(k), 2.0).unwrap();
            assert!((row - l2).abs() <= 1e-12 * l2, "row {k}: {row}");
        }
    }

    #[test]
    fn gaussian_l6_norm_matches_closed_form() {
        let field = evolve_range(&gaussian(), &TimeQuadrature::standard()).value;
        let sixth = spacetime_lp(&field, 6.0).unwrap().powi(6);
        let exact = PI.powf(1.5) / (4.0 * 6f64.sqrt());
        assert!((sixth - exact).abs() / exact < 1e-4, "{sixth} vs {exact}");
    }

    #[test]
    fn time_translation_invariance() {
        let f = gaussian();
        let a = strichartz_ratio(&f).unwrap();
        let b = strichartz_ratio(&evolve_unchecked(&f, 0.3)).unwrap();
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn sharp_ratio_and_scale_invariance() {
        let grid = UniformGrid::standard();
        let target = 12f64.powf(-1.0 / 12.0);
        let r1 = strichartz_ratio(&gaussian()).unwrap();
        assert!((r1 - target).abs() < 1e-3);
        let r4 = strichartz_ratio(&WaveFunction::from_real_fn(grid, |x| (-4.0 * x * x).exp()).unwrap()).unwrap();
        assert!((r1 - r4).abs() < 1e-4, "{r1} vs {r4}");
    }

    #[test]
    fn indicator_is_not_extremal() {
        let f = WaveFunction::from_real_fn(UniformGrid::standard(), |x| if x.abs() <= 1.0 { 1.0 } else { 0.0 }).unwrap();
        let r = strichartz_ratio(&f).unwrap();
        assert!(r < 12f64.powf(-1.0 / 12.0) - 0.01, "ratio {r}");
    }

    #[test]
    fn zero_input_is_rejected() {
        let z = WaveFunction::zeros(UniformGrid::standard());
        assert!(matches!(strichartz_ratio(&z), Err(LabError::Domain(_))));
        assert!(fourier_symmetry_check(&z).is_err());
        assert!(spacetime_lp(&evolve_range(&gaussian(), &TimeQuadrature::single(0.0)).value, 0.5).is_err());
    }

    #[test]
    fn rough_input_raises_aliasing_warning() {
        let grid = UniformGrid::standard();
        let spiky = WaveFunction::from_real_fn(grid, |x| if x.abs() < 0.02 { 1.0 } else { 0.0 }).unwrap();
        assert!(!evolve(&spiky, 0.1).is_clean());
        assert!(evolve(&gaussian(), 0.1).is_clean());
    }

    #[test]
    fn quadrature_validation() {
        assert!(TimeQuadrature::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(TimeQuadrature::new(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
        assert!(TimeQuadrature::compactified(0, 0.25).is_err());
        let tq = TimeQuadrature::standard();
        assert_eq!(tq.len(), 257);
        assert!(tq.nodes().windows(2).all(|p| p[0] < p[1]));
    }
}
