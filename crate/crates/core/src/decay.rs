//! Gaussian decay of the Fourier transform: the slope `mu` of
//! `-log |f^(xi)|` against `xi^2`, the bootstrap quantities built from the
//! bands `|xi| < s`, `s <= |xi| < s^2`, `|xi| >= s^2` with `mu = s^-4`, the
//! weighted tail norm
//!
//! ```text
//! H(eps) = ( int_{|xi| >= s^2} |exp(F(xi)) f^(xi)|^2 dxi )^(1/2),   F = F_{s^-4, eps},
//! ```
//!
//! the polynomial `G(x) = (omega/2) x - C (x^2 + x^3 + x^4 + x^5)` that
//! traps `H`, and a check that the inversion integral continues `f` to an
//! analytic function off the real axis.
//!
//! Band integrals use composite Gauss-Legendre rules in frequency with the
//! transform evaluated exactly at each node, so hard cutoffs at `s` and
//! `s^2` are resolved without the `O(dxi)` error of a grid sum.

use crate::bilinear::fit_line;
use crate::error::{LabError, Result};
use crate::lattice::{forward_transform, Spectrum, WaveFunction};
use crate::multilinear::{
    constraint_integral, m_weighted_factors, weight, ConstraintRule, WeightParams, WeightedFactor,
};
use crate::quadrature::{pairwise_sum, CompositeRule};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

const PANEL_WIDTH: f64 = 2.0;
const PANEL_POINTS: usize = 16;
/// Samples of `|f^|` below this fraction of the peak are roundoff; the
/// weight `exp(2F)` would otherwise amplify them without bound as `eps -> 0`.
pub const RESOLVED_REL: f64 = 1e-13;

/// Largest `|xi|` at which `|f^|` is still resolved above roundoff.
pub fn resolved_frequency(f: &WaveFunction) -> f64 {
    let nyquist = f.grid().frequency_grid().nyquist();
    match forward_transform(f).effective_support(RESOLVED_REL) {
        Some((lo, hi)) => lo.abs().max(hi.abs()).min(nyquist),
        None => 0.0,
    }
}

/// `f^` split by `|xi| < s`, `s <= |xi| < s^2` and `|xi| >= s^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandDecomposition {
    pub s: f64,
    pub f_ll: Spectrum,
    pub f_sim: Spectrum,
    pub f_gt: Spectrum,
}

impl BandDecomposition {
    pub fn reassemble(&self) -> Spectrum {
        let values = self
            .f_ll
            .values()
            .iter()
            .zip(self.f_sim.values())
            .zip(self.f_gt.values())
            .map(|((a, b), c)| a + b + c)
            .collect();
        Spectrum::new(*self.f_ll.grid(), values).expect("pieces share a grid")
    }
}

fn check_threshold(f: &WaveFunction, s: f64) -> Result<()> {
    let nyquist = f.grid().frequency_grid().nyquist();
    if !(s > 1.0) || !s.is_finite() {
        return Err(LabError::Domain(format!("band threshold must exceed 1, got s = {s}")));
    }
    if s * s >= nyquist {
        return Err(LabError::Domain(format!("s^2 = {} is not below the Nyquist frequency {nyquist}", s * s)));
    }
    Ok(())
}

pub fn band_decompose(f: &WaveFunction, s: f64) -> Result<BandDecomposition> {
    check_threshold(f, s)?;
    let spec = forward_transform(f);
    let s2 = s * s;
    Ok(BandDecomposition {
        s,
        f_ll: spec.restricted(|xi| xi.abs() < s),
        f_sim: spec.restricted(|xi| xi.abs() >= s && xi.abs() < s2),
        f_gt: spec.restricted(|xi| xi.abs() >= s2),
    })
}

/// `|f^|^2` tabulated at Gauss-Legendre nodes covering `lo <= |xi| <= hi`.
#[derive(Debug, Clone)]
pub struct BandSamples {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    power: Vec<f64>,
}

impl BandSamples {
    pub fn new(f: &WaveFunction, lo: f64, hi: f64) -> Result<Self> {
        let panels = (((hi - lo) / PANEL_WIDTH).ceil() as usize).max(1);
        let rule = CompositeRule::new(lo, hi, &[], panels, PANEL_POINTS)?;
        let mut nodes = Vec::with_capacity(2 * rule.len());
        let mut weights = Vec::with_capacity(2 * rule.len());
        for sign in [-1.0, 1.0] {
            nodes.extend(rule.nodes.iter().map(|x| sign * x));
            weights.extend(&rule.weights);
        }
        let power = nodes.iter().map(|xi| f.transform_at(*xi).norm_sqr()).collect();
        Ok(BandSamples { nodes, weights, power })
    }

    /// `( int_band exp(2 F(xi)) |f^|^2 dxi )^(1/2)`.
    pub fn weighted_norm(&self, w: WeightParams) -> f64 {
        let terms: Vec<f64> = (0..self.nodes.len())
            .map(|k| self.weights[k] * (2.0 * weight(self.nodes[k], w)).exp() * self.power[k])
            .collect();
        pairwise_sum(&terms).sqrt()
    }
}

fn tail_samples(f: &WaveFunction, s: f64) -> Result<BandSamples> {
    check_threshold(f, s)?;
    let hi = resolved_frequency(f);
    if hi <= s * s {
        return Ok(BandSamples { nodes: Vec::new(), weights: Vec::new(), power: Vec::new() });
    }
    BandSamples::new(f, s * s, hi)
}

/// `H(eps)` with `mu = s^-4`, integrated up to [`resolved_frequency`].
pub fn tail_norm_h(f: &WaveFunction, s: f64, eps: f64) -> Result<f64> {
    let w = WeightParams::new(s.powi(-4), eps)?;
    Ok(tail_samples(f, s)?.weighted_norm(w))
}

/// `H` on a grid of `eps` values, sharing one tabulation of `|f^|^2`.
pub fn tail_norm_curve(f: &WaveFunction, s: f64, eps: &[f64]) -> Result<Vec<f64>> {
    let samples = tail_samples(f, s)?;
    eps.iter().map(|e| Ok(samples.weighted_norm(WeightParams::new(s.powi(-4), *e)?))).collect()
}

/// Where the slope of `-log |f^|` is measured: the frequencies at which
/// `|f^|` lies between `rel_lo` and `rel_hi` times its peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub rel_hi: f64,
    pub rel_lo: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        FitWindow { rel_hi: 1e-2, rel_lo: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuFit {
    /// Fitted `mu` in `|f^| ~ exp(-mu xi^2)`.
    pub mu_hat: f64,
    /// `mu_hat / 2`, admissible when [`MuFit::certified`] holds.
    pub certified_mu: f64,
    /// RMS misfit of `-log |f^|` on the window.
    pub residual: f64,
    /// Window edges in `|xi|`.
    pub xi_lo: f64,
    pub xi_hi: f64,
    pub samples: usize,
}

impl MuFit {
    pub fn certified(&self) -> bool {
        self.mu_hat > 0.0 && self.residual <= 1e-2
    }
}

/// Least-squares slope of `-log |f^(xi)|` against `xi^2` over both tails.
pub fn mu_slope_fit(f: &WaveFunction, window: FitWindow) -> Result<MuFit> {
    if !(window.rel_hi < 1.0 && window.rel_lo > 0.0 && window.rel_lo < window.rel_hi) {
        return Err(LabError::Domain(format!("invalid fit window {window:?}")));
    }
    let spec = forward_transform(f);
    let freq = spec.frequency_grid();
    let mags: Vec<f64> = spec.values().iter().map(|v| v.norm()).collect();
    let peak = mags.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(LabError::Domain("decay fit of the zero function".into()));
    }
    let centre = freq.n() / 2;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let (mut xi_lo, mut xi_hi) = (f64::INFINITY, 0.0_f64);
    for dir in [-1isize, 1] {
        let mut m = centre as isize;
        while m >= 0 && (m as usize) < mags.len() && mags[m as usize] > window.rel_hi * peak {
            m += dir;
        }
        let mut tail = Vec::new();
        while m >= 0 && (m as usize) < mags.len() && mags[m as usize] >= window.rel_lo * peak {
            tail.push(m as usize);
            m += dir;
        }
        if tail.len() < 2 {
            return Err(LabError::Domain("fit window holds fewer than two samples on one side".into()));
        }
        let beyond: Vec<usize> = (0..mags.len())
            .filter(|k| {
                let d = *k as isize - centre as isize;
                d.signum() == dir && d.abs() < (tail[tail.len() - 1] as isize - centre as isize).abs()
            })
            .collect();
        let dip = beyond.iter().any(|k| mags[*k] < window.rel_lo * peak);
        if dip {
            return Err(LabError::Domain("the transform vanishes inside the fit window".into()));
        }
        for m in tail {
            let xi = freq.xi(m);
            xi_lo = xi_lo.min(xi.abs());
            xi_hi = xi_hi.max(xi.abs());
            xs.push(xi * xi);
            ys.push(-mags[m].ln());
        }
    }
    let (slope, intercept) = fit_line(&xs, &ys)?;
    let misfit: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).collect();
    let residual = (pairwise_sum(&misfit) / xs.len() as f64).sqrt();
    Ok(MuFit { mu_hat: slope, certified_mu: 0.5 * slope, residual, xi_lo, xi_hi, samples: xs.len() })
}

/// The smallness factors of the bootstrap at threshold `s`, `mu = s^-4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Smallness {
    pub s: f64,
    pub mu: f64,
    /// `||f_sim||_2` in space, i.e. `(2 pi)^(-1/2)` times the band norm of `f^`.
    pub f_sim_norm: f64,
    /// `s^(-1/6) exp(mu s^2 - mu s^4) + ||f_sim||_2`.
    pub bracket: f64,
    /// `exp(2 mu s^4) * bracket`.
    pub o1: f64,
    /// `exp(4 mu s^4) * bracket`.
    pub o2: f64,
}

/// `o1` and `o2` for `f / ||f||_2`.
pub fn bootstrap_smallness(f: &WaveFunction, s: f64) -> Result<Smallness> {
    check_threshold(f, s)?;
    let norm = f.l2_norm();
    if !(norm > 0.0) {
        return Err(LabError::Domain("bootstrap quantities of the zero function".into()));
    }
    let mu = s.powi(-4);
    let f_sim_norm = band_decompose(f, s)?.f_sim.l2_norm() / (2.0 * PI).sqrt() / norm;
    let bracket = s.powf(-1.0 / 6.0) * (mu * s * s - mu * s.powi(4)).exp() + f_sim_norm;
    Ok(Smallness {
        s,
        mu,
        f_sim_norm,
        bracket,
        o1: (2.0 * mu * s.powi(4)).exp() * bracket,
        o2: (4.0 * mu * s.powi(4)).exp() * bracket,
    })
}

/// `G(x) = (omega/2) x - C (x^2 + x^3 + x^4 + x^5)`.
pub fn g_polynomial(omega: f64, c: f64, x: f64) -> f64 {
    0.5 * omega * x - c * x * x * (1.0 + x * (1.0 + x * (1.0 + x)))
}

fn g_second(c: f64, x: f64) -> f64 {
    -c * (2.0 + x * (6.0 + x * (12.0 + 20.0 * x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GScan {
    pub omega: f64,
    pub c: f64,
    /// `sup_{x > 0} G`.
    pub m: f64,
    pub argmax: f64,
    /// The two solutions of `G = M/2` around the maximizer.
    pub x0: f64,
    pub x1: f64,
    /// `G'' < 0` at every sampled point of `(0, x1]`.
    pub concave: bool,
}

fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let rising = g(lo) < 0.0;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Maximum of `G` by golden-section search and the two crossings of `M/2`
/// by bisection.
pub fn g_polynomial_scan(omega: f64, c: f64) -> Result<GScan> {
    if !(omega > 0.0 && c > 0.0) || !omega.is_finite() || !c.is_finite() {
        return Err(LabError::Domain(format!("G needs omega > 0 and C > 0, got {omega}, {c}")));
    }
    let g = |x: f64| g_polynomial(omega, c, x);
    let mut right = 1.0;
    while g(right) > 0.0 {
        right *= 2.0;
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, right);
    let mut p = b - inv_phi * (b - a);
    let mut q = a + inv_phi * (b - a);
    let (mut gp, mut gq) = (g(p), g(q));
    while b - a > 1e-15 * b.max(1e-300) {
        if gp < gq {
            a = p;
            p = q;
            gp = gq;
            q = a + inv_phi * (b - a);
            gq = g(q);
        } else {
            b = q;
            q = p;
            gq = gp;
            p = b - inv_phi * (b - a);
            gp = g(p);
        }
        if b - a < 1e-300 {
            break;
        }
    }
    let argmax = 0.5 * (a + b);
    let m = g(argmax);
    let half = 0.5 * m;
    let x0 = bisect(|x| g(x) - half, 0.0, argmax);
    let x1 = bisect(|x| g(x) - half, argmax, right);
    let concave = (1..=1000).all(|k| g_second(c, x1 * k as f64 / 1000.0) < 0.0);
    Ok(GScan { omega, c, m, argmax, x0, x1, concave })
}

/// Value of the inversion integral at a complex point with its
/// Cauchy-Riemann defect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub z: C64,
    pub value: C64,
    /// `|d f / d conj(z)| / (|d f / d z| + |f(z)|)` on a circular stencil.
    pub cr_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub fit: MuFit,
    /// `mu_hat * xi_hi / 2`.
    pub max_imaginary_part: f64,
    pub points: Vec<ProbePoint>,
    pub max_cr_residual: f64,
}

const STENCIL_RADIUS: f64 = 1e-2;
const STENCIL_POINTS: usize = 8;

/// `f(z) = (1/2 pi) int exp(i z xi) f^(xi) dxi` at the points `zs`, over the
/// frequencies up to [`resolved_frequency`].
/// Requires a certified decay fit and `|Im z| <= mu_hat xi_hi / 2`, so that
/// `exp(-mu_hat xi^2 + |Im z| |xi|)` has turned over by the end of the window.
pub fn analytic_extension_probe(f: &WaveFunction, zs: &[C64], window: FitWindow) -> Result<ProbeReport> {
    let fit = mu_slope_fit(f, window)?;
    if !fit.certified() {
        return Err(LabError::Domain(format!("decay fit not certified (mu_hat {}, residual {})", fit.mu_hat, fit.residual)));
    }
    let limit = 0.5 * fit.mu_hat * fit.xi_hi;
    if let Some(z) = zs.iter().find(|z| z.im.abs() > limit) {
        return Err(LabError::Domain(format!("probe point {z} has |Im z| above {limit}")));
    }
    let cutoff = resolved_frequency(f);
    let spec = forward_transform(f).restricted(|xi| xi.abs() <= cutoff);
    let points: Vec<ProbePoint> = zs
        .iter()
        .map(|&z| {
            let value = spec.synthesize_at(z);
            let mut dz = C64::new(0.0, 0.0);
            let mut dzbar = C64::new(0.0, 0.0);
            for k in 0..STENCIL_POINTS {
                let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / STENCIL_POINTS as f64);
                let v = spec.synthesize_at(z + e * STENCIL_RADIUS);
                dz += v * e.conj();
                dzbar += v * e;
            }
            let scale = STENCIL_RADIUS * STENCIL_POINTS as f64;
            let (dz, dzbar) = (dz / scale, dzbar / scale);
            ProbePoint { z, value, cr_residual: dzbar.norm() / (dz.norm() + value.norm()) }
        })
        .collect();
    let max_cr_residual = points.iter().map(|p| p.cr_residual).fold(0.0, f64::max);
    Ok(ProbeReport { fit, max_imaginary_part: limit, points, max_cr_residual })
}

/// Both ends of the first step of the bootstrap for an Euler-Lagrange
/// solution with eigenvalue `omega`: with `g^ = exp(2F) f^ 1_{|xi| >= s^2}`,
/// `omega <g, f> = (omega / 2 pi) H^2 = Q(g, f, ..., f) <= M_F(h_>, h, ..., h)`,
/// where `h = exp(F) f^` and `h_> = h 1_{|xi| >= s^2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub s: f64,
    pub eps: f64,
    pub omega: f64,
    /// `(omega / 2 pi) H(eps)^2`.
    pub lhs: f64,
    /// `Q(g, f, ..., f)` on the constraint set.
    pub q_value: C64,
    /// `M_F(h_>, h, ..., h)`.
    pub m_f: f64,
}

impl ChainCheck {
    /// `lhs <= M_F` and `|Q| <= M_F`, both up to `rel`.
    pub fn holds(&self, rel: f64) -> bool {
        self.lhs <= self.m_f * (1.0 + rel) && self.q_value.norm() <= self.m_f * (1.0 + rel)
    }
}

pub fn inequality_chain(f: &WaveFunction, s: f64, eps: f64, omega: f64, rule: &ConstraintRule) -> Result<ChainCheck> {
    check_threshold(f, s)?;
    let w = WeightParams::new(s.powi(-4), eps)?;
    let h = tail_norm_h(f, s, eps)?;
    let lhs = omega * h * h / (2.0 * PI);
    let spec = forward_transform(f);
    let fine = crate::lattice::FineSpectrum::from_spectrum(&spec);
    let (lo, hi) = spec
        .effective_support(rule.support_rel)
        .ok_or_else(|| LabError::Domain("inequality chain for the zero function".into()))?;
    let s2 = s * s;
    let cuts = [-s2, s2];
    let rules = [
        CompositeRule::new(lo, hi, &cuts, 1, rule.outer_points)?,
        CompositeRule::new(lo, hi, &[], 1, rule.outer_points)?,
        CompositeRule::new(lo, hi, &[], 1, rule.outer_points)?,
    ];
    let q_value = constraint_integral(
        rule,
        &rules,
        |x| {
            if x[0].abs() < s2 {
                return C64::new(0.0, 0.0);
            }
            (fine.eval(x[0]) * fine.eval(x[1]) * fine.eval(x[2]) * (2.0 * weight(x[0], w)).exp()).conj()
        },
        |y| fine.eval(y[0]) * fine.eval(y[1]) * fine.eval(y[2]),
    );
    let weighted = |band: Option<f64>| {
        let fine = fine.clone();
        WeightedFactor {
            modulus: Box::new(move |xi: f64| {
                if band.is_some_and(|b| xi.abs() < b) {
                    0.0
                } else {
                    weight(xi, w).exp() * fine.eval(xi).norm()
                }
            }),
            support: (lo, hi),
            breakpoints: if band.is_some() { cuts.to_vec() } else { Vec::new() },
        }
    };
    let factors = [weighted(Some(s2)), weighted(None), weighted(None), weighted(None), weighted(None), weighted(None)];
    let m_f = m_weighted_factors(&factors, w, rule)?;
    Ok(ChainCheck { s, eps, omega, lhs, q_value, m_f })
}

/// Everything the bootstrap needs at one threshold `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub s: f64,
    pub mu: f64,
    pub eps_grid: Vec<f64>,
    pub h_values: Vec<f64>,
    /// `H` at `eps = 0`, the monotone limit of the curve.
    pub h_limit: f64,
    pub smallness: Smallness,
    pub g_scan: GScan,
}

impl BootstrapReport {
    /// CSV `eps,H`.
    pub fn h_curve_csv(&self) -> String {
        let mut out = String::from("eps,H\n");
        for (e, h) in self.eps_grid.iter().zip(&self.h_values) {
            let _ = writeln!(out, "{e:e},{h:.15e}");
        }
        out
    }

    pub fn h_nonincreasing(&self) -> bool {
        self.h_values.windows(2).all(|p| p[1] <= p[0])
    }
}

pub fn bootstrap_report(f: &WaveFunction, s: f64, eps_grid: &[f64], omega: f64, c: f64) -> Result<BootstrapReport> {
    let f = f.normalized()?;
    let h_values = tail_norm_curve(&f, s, eps_grid)?;
    let h_limit = tail_norm_h(&f, s, 0.0)?;
    Ok(BootstrapReport {
        s,
        mu: s.powi(-4),
        eps_grid: eps_grid.to_vec(),
        h_values,
        h_limit,
        smallness: bootstrap_smallness(&f, s)?,
        g_scan: g_polynomial_scan(omega, c)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::UniformGrid;

    fn gaussian() -> WaveFunction {
        WaveFunction::from_real_fn(UniformGrid::standard(), |x| (-x * x).exp()).unwrap()
    }

    /// `int_a^b exp(-c xi^2)` by a fine composite rule on the closed form.
    fn gaussian_integral(c: f64, a: f64, b: f64) -> f64 {
        CompositeRule::new(a, b, &[], 400, 20).unwrap().integrate(|x| (-c * x * x).exp())
    }

    #[test]
    fn decomposition_reassembles_exactly() {
        let g = gaussian();
        let d = band_decompose(&g, 2.0).unwrap();
        assert_eq!(d.reassemble(), forward_transform(&g));
        let mass = |s: &Spectrum| s.values().iter().map(|v| v.norm_sqr()).sum::<f64>();
        assert!(mass(&d.f_gt) / mass(&forward_transform(&g)) < 1e-3);
        let e = band_decompose(&g, 8.5).unwrap();
        assert!(e.f_gt.l2_norm() < 1e-12 * e.f_ll.l2_norm());
        assert!(band_decompose(&g, 1.0).is_err());
        assert!(band_decompose(&g, 9.0).is_err());
    }

    #[test]
    fn tail_norm_matches_closed_form() {
        let g = gaussian();
        let exact = (2.0 * PI * gaussian_integral(0.5 - 0.125, 4.0, 40.0)).sqrt();
        let h = tail_norm_h(&g, 2.0, 0.0).unwrap();
        assert!((h - exact).abs() / exact < 1e-6, "{h} vs {exact}");
        let plain = (2.0 * PI * gaussian_integral(0.5, 4.0, 40.0)).sqrt();
        assert!((tail_norm_h(&g, 2.0, 1e6).unwrap() - plain).abs() / plain < 1e-6);
    }

    #[test]
    fn tail_norm_monotone_and_continuous() {
        let g = gaussian();
        let eps: Vec<f64> = (0..10).map(|k| 10f64.powi(k - 5)).collect();
        let curve = tail_norm_curve(&g, 2.0, &eps).unwrap();
        assert!(curve.windows(2).all(|p| p[1] <= p[0]));
        let h0 = tail_norm_h(&g, 2.0, 0.0).unwrap();
        assert!((tail_norm_h(&g, 2.0, 1e-9).unwrap() - h0).abs() < 1e-6 * h0);
        let h1 = tail_norm_h(&g, 2.0, 1.0).unwrap();
        let near: Vec<f64> = [1e-2, 1e-4, 1e-6].iter().map(|d| (tail_norm_h(&g, 2.0, 1.0 + d).unwrap() - h1).abs()).collect();
        assert!(near[0] > near[1] && near[1] > near[2]);
    }

    #[test]
    fn mu_fit_on_gaussians() {
        let fit = mu_slope_fit(&gaussian(), FitWindow::default()).unwrap();
        assert!((fit.mu_hat - 0.25).abs() < 1e-3 && fit.certified());
        assert!((fit.certified_mu - 0.125).abs() < 1e-3);
        let wide = WaveFunction::from_real_fn(UniformGrid::standard(), |x| (-x * x / 2.0).exp()).unwrap();
        assert!((mu_slope_fit(&wide, FitWindow::default()).unwrap().mu_hat - 0.5).abs() < 1e-3);
        let fine = WaveFunction::from_real_fn(UniformGrid::symmetric(2048, 20.0).unwrap(), |x| (-x * x).exp()).unwrap();
        let refined = mu_slope_fit(&fine, FitWindow::default()).unwrap();
        assert!((refined.mu_hat - fit.mu_hat).abs() < 1e-4);
    }

    #[test]
    fn smallness_examples() {
        let g = gaussian();
        let o1: Vec<f64> = [2.0, 2.5, 3.0].iter().map(|s| bootstrap_smallness(&g, *s).unwrap().o1).collect();
        assert!(o1[0] > o1[1] && o1[1] > o1[2]);
        let sm = bootstrap_smallness(&g, 2.0).unwrap();
        assert!((sm.o1 / sm.bracket - std::f64::consts::E.powi(2)).abs() < 1e-12);
        assert!(sm.o2 > sm.o1);
        let grid = UniformGrid::standard();
        let narrow = crate::bilinear::make_band_limited(grid, crate::bilinear::BandSpec::Low { s: 1.5 }, crate::bilinear::Profile::Flat, 0).unwrap();
        let s: f64 = 2.0;
        let mu: f64 = s.powi(-4);
        let expected = std::f64::consts::E.powi(2) * s.powf(-1.0 / 6.0) * (mu * s * s - 1.0).exp();
        let got = bootstrap_smallness(&narrow, s).unwrap();
        assert!(got.f_sim_norm < 1e-10 && (got.o1 - expected).abs() < 1e-9);
    }

    #[test]
    fn g_scan_examples() {
        let a = g_polynomial_scan(2.0, 1.0).unwrap();
        assert!((g_polynomial(2.0, 1.0, a.x0) - a.m / 2.0).abs() < 1e-10);
        assert!((g_polynomial(2.0, 1.0, a.x1) - a.m / 2.0).abs() < 1e-10);
        assert!(a.x0 > 0.0 && a.x0 < a.argmax && a.argmax < a.x1 && a.concave);
        let b = g_polynomial_scan(6.0, 3.0).unwrap();
        assert!((b.m - 3.0 * a.m).abs() < 1e-12 * b.m);
        assert!((b.x0 - a.x0).abs() < 1e-10 && (b.x1 - a.x1).abs() < 1e-10);
        assert!(g_polynomial_scan(0.0, 1.0).is_err());
    }

    #[test]
    fn chain_holds_for_gaussian() {
        let g = gaussian().normalized().unwrap();
        let omega = crate::extremizer::omega_of(&g).unwrap();
        let chain = inequality_chain(&g, 1.5, 1.0, omega, &ConstraintRule::default()).unwrap();
        assert!(chain.lhs > 0.0 && chain.holds(1e-3), "{chain:?}");
    }

    #[test]
    fn gaussian_continues_analytically() {
        let g = gaussian();
        let zs: Vec<C64> = (0..20).map(|k| C64::new(-1.0 + 0.1 * k as f64, 0.05 * k as f64 - 0.4)).chain([C64::i()]).collect();
        let report = analytic_extension_probe(&g, &zs, FitWindow::default()).unwrap();
        let at_i = report.points.last().unwrap().value;
        assert!((at_i - C64::new(std::f64::consts::E, 0.0)).norm() < 1e-8, "{at_i}");
        assert!(report.max_cr_residual <= 1e-6, "{}", report.max_cr_residual);
        let on_grid = analytic_extension_probe(&g, &[C64::new(g.grid().x(600), 0.0)], FitWindow::default()).unwrap();
        assert!((on_grid.points[0].value - g.values()[600]).norm() < 1e-12);
        assert!(analytic_extension_probe(&g, &[C64::new(0.0, 5.0)], FitWindow::default()).is_err());
    }
}
