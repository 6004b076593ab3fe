//! The sextic form
//!
//! ```text
//! Q(f1, ..., f6) = int conj(f1^ f2^ f3^)(xi1, xi2, xi3) f4^ f5^ f6^(xi4, xi5, xi6)
//!                  delta(a(xi)) delta(b(xi)) dxi
//! ```
//!
//! computed two ways: in space-time as `KAPPA int int conj(u1 u2 u3) u4 u5 u6`
//! with `u_i = exp(it Laplacian) f_i`, and directly on the constraint set.
//! For fixed `(xi1, xi2, xi3)` with sum `s` and square sum `q`, the triples
//! `(xi4, xi5, xi6)` with the same sum and square sum form a circle of radius
//! `sqrt(q - s^2/3)` around `(s/3)(1, 1, 1)`, and the two delta functions
//! collapse to `(1 / 2 sqrt 3) d theta` along it. The angle parametrization
//! has no Jacobian singularity, so a periodic trapezoid rule in `theta` is
//! spectrally accurate.
//!
//! The weighted form `M_F` replaces the factors by their moduli and inserts
//! `exp(F(eta1) - sum_{k>=2} F(eta_k))`.

use crate::error::{Checked, LabError, Result};
use crate::lattice::{band_limit_check, same_grid, FineSpectrum, Spectrum, WaveFunction};
use crate::propagator::{evolve_range, SpaceTimeField, TimeQuadrature};
use crate::quadrature::{pairwise_sum_complex, CompositeRule};
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `(2 pi)^4`: converts the space-time integral into the delta-constrained
/// frequency integral. Two factors of `2 pi` come from
/// `int int exp(i x alpha + i t beta) dx dt = (2 pi)^2 delta(alpha) delta(beta)`
/// against the `(2 pi)^-6` of six inverse transforms.
pub const KAPPA: f64 = 16.0 * PI * PI * PI * PI;

/// Spectral band, as a fraction of Nyquist, within which sextic products
/// stay alias-free.
pub const SEXTIC_BAND_FRACTION: f64 = 1.0 / 6.0;
pub const SEXTIC_TAIL_THRESHOLD: f64 = 1e-8;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Parameters of `F(xi) = mu xi^2 / (1 + eps xi^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub mu: f64,
    pub eps: f64,
}

impl WeightParams {
    pub fn new(mu: f64, eps: f64) -> Result<Self> {
        if !(mu >= 0.0) || !(eps >= 0.0) || !mu.is_finite() || !eps.is_finite() {
            return Err(LabError::Domain(format!("weight needs mu >= 0 and eps >= 0, got mu={mu}, eps={eps}")));
        }
        Ok(WeightParams { mu, eps })
    }

    pub fn unweighted() -> Self {
        WeightParams { mu: 0.0, eps: 0.0 }
    }
}

pub fn weight(xi: f64, w: WeightParams) -> f64 {
    let x2 = xi * xi;
    if w.eps > 0.0 && x2.is_infinite() {
        return w.mu / w.eps;
    }
    w.mu * x2 / (1.0 + w.eps * x2)
}

/// `eta1 + eta2 + eta3 - eta4 - eta5 - eta6`.
pub fn constraint_a(eta: &[f64; 6]) -> f64 {
    eta[0] + eta[1] + eta[2] - eta[3] - eta[4] - eta[5]
}

/// `eta1^2 + eta2^2 + eta3^2 - eta4^2 - eta5^2 - eta6^2`.
pub fn constraint_b(eta: &[f64; 6]) -> f64 {
    eta[0] * eta[0] + eta[1] * eta[1] + eta[2] * eta[2] - eta[3] * eta[3] - eta[4] * eta[4] - eta[5] * eta[5]
}

/// Point of the constraint circle over `(x1, x2, x3)` at angle `theta`, or
/// `None` when the circle is empty.
pub fn circle_point(x: [f64; 3], theta: f64) -> Option<[f64; 3]> {
    let (centre, r) = circle_of(x)?;
    let (u1, u2) = circle_axes();
    let (sin, cos) = theta.sin_cos();
    Some([0, 1, 2].map(|k| centre + r * (cos * u1[k] + sin * u2[k])))
}

fn circle_of(x: [f64; 3]) -> Option<(f64, f64)> {
    let s = x[0] + x[1] + x[2];
    let q = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    let r2 = q - s * s / 3.0;
    if r2 < -1e-12 * q.max(1.0) {
        return None;
    }
    Some((s / 3.0, r2.max(0.0).sqrt()))
}

fn circle_axes() -> ([f64; 3], [f64; 3]) {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let b = 1.0 / 6.0_f64.sqrt();
    ([a, -a, 0.0], [b, b, -2.0 * b])
}

/// Resolution of the constraint-set quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintRule {
    /// Gauss-Legendre nodes per outer dimension (per panel when
    /// breakpoints split the box).
    pub outer_points: usize,
    /// Fewest trapezoid nodes on a circle.
    pub angular_min: usize,
    /// Trapezoid nodes per unit arc length.
    pub angular_density: f64,
    /// Outer boxes cover the samples with modulus above this fraction of the
    /// peak.
    pub support_rel: f64,
}

impl Default for ConstraintRule {
    fn default() -> Self {
        ConstraintRule { outer_points: 40, angular_min: 16, angular_density: 1.5, support_rel: 1e-8 }
    }
}

impl ConstraintRule {
    fn angular_nodes(&self, r: f64) -> usize {
        if r == 0.0 {
            return 1;
        }
        let by_arc = (self.angular_density * 2.0 * PI * r).ceil() as usize;
        by_arc.max(self.angular_min)
    }

    fn validate(&self) -> Result<()> {
        if self.outer_points == 0 || self.angular_min == 0 || !(self.angular_density > 0.0) || !(self.support_rel > 0.0) {
            return Err(LabError::Domain(format!("invalid constraint rule {self:?}")));
        }
        Ok(())
    }
}

/// Integrates `outer(eta1, eta2, eta3) * inner(eta4, eta5, eta6)` against
/// `delta(a) delta(b)`. Each outer dimension carries its own composite rule.
/// Outer points where `outer` vanishes are skipped.
pub fn constraint_integral(
    rule: &ConstraintRule,
    outer_rules: &[CompositeRule; 3],
    outer: impl Fn([f64; 3]) -> C64 + Sync,
    inner: impl Fn([f64; 3]) -> C64 + Sync,
) -> C64 {
    let (u1, u2) = circle_axes();
    let [r1, r2, r3] = outer_rules;
    let n12 = r1.len() * r2.len();
    let contributions: Vec<C64> = (0..n12)
        .into_par_iter()
        .flat_map_iter(|ij| {
            let (i, j) = (ij / r2.len(), ij % r2.len());
            let x1 = r1.nodes[i];
            let x2 = r2.nodes[j];
            let w12 = r1.weights[i] * r2.weights[j];
            let outer = &outer;
            let inner = &inner;
            (0..r3.len()).map(move |k| {
                let x3 = r3.nodes[k];
                let o = outer([x1, x2, x3]);
                if o == C64::new(0.0, 0.0) {
                    return C64::new(0.0, 0.0);
                }
                let Some((centre, r)) = circle_of([x1, x2, x3]) else {
                    return C64::new(0.0, 0.0);
                };
                let m = rule.angular_nodes(r);
                let mut acc = C64::new(0.0, 0.0);
                for p in 0..m {
                    let (sin, cos) = (2.0 * PI * p as f64 / m as f64).sin_cos();
                    let eta = [0, 1, 2].map(|c| centre + r * (cos * u1[c] + sin * u2[c]));
                    acc += inner(eta);
                }
                o * acc * (w12 * r3.weights[k] * 2.0 * PI / (m as f64 * 2.0 * SQRT3))
            })
        })
        .collect();
    pairwise_sum_complex(&contributions)
}

/// `max(eta1^2 - sum_{k>=2} eta_k^2)` over every point the rule samples
/// inside the box. Nonpositive up to rounding whenever `b(eta) = 0`.
pub fn support_margin(rule: &ConstraintRule, outer_rules: &[CompositeRule; 3]) -> f64 {
    let (u1, u2) = circle_axes();
    let [r1, r2, r3] = outer_rules;
    let mut worst = f64::NEG_INFINITY;
    for &x1 in &r1.nodes {
        for &x2 in &r2.nodes {
            for &x3 in &r3.nodes {
                let Some((centre, r)) = circle_of([x1, x2, x3]) else { continue };
                let m = rule.angular_nodes(r);
                for p in 0..m {
                    let (sin, cos) = (2.0 * PI * p as f64 / m as f64).sin_cos();
                    let tail: f64 = (0..3).map(|c| (centre + r * (cos * u1[c] + sin * u2[c])).powi(2)).sum();
                    worst = worst.max(x1 * x1 - (x2 * x2 + x3 * x3 + tail));
                }
            }
        }
    }
    worst
}

/// Metadata of a constraint-set evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureReport {
    pub value: C64,
    pub kappa: f64,
    pub rule: ConstraintRule,
    /// Outer box per dimension.
    pub boxes: [(f64, f64); 3],
    pub outer_nodes: usize,
}

fn outer_box(spec: &Spectrum, rel: f64) -> Option<(f64, f64)> {
    let nyq = spec.frequency_grid().nyquist();
    spec.effective_support(rel).map(|(lo, hi)| (lo.max(-nyq), hi.min(nyq)))
}

fn composite(bounds: (f64, f64), breakpoints: &[f64], points: usize) -> Result<CompositeRule> {
    CompositeRule::new(bounds.0, bounds.1, breakpoints, 1, points)
}

/// `Q` on the constraint set, with off-grid transforms read from an upsampled
/// spectrum.
pub fn q_quadrature(fs: [&WaveFunction; 6]) -> Result<QuadratureReport> {
    q_quadrature_with(fs, &ConstraintRule::default())
}

pub fn q_quadrature_with(fs: [&WaveFunction; 6], rule: &ConstraintRule) -> Result<QuadratureReport> {
    rule.validate()?;
    for f in &fs[1..] {
        same_grid(fs[0].grid(), f.grid())?;
    }
    let spectra = fs.map(crate::lattice::forward_transform);
    let mut boxes = [(0.0, 0.0); 3];
    for (k, b) in boxes.iter_mut().enumerate() {
        match outer_box(&spectra[k], rule.support_rel) {
            Some(found) => *b = found,
            None => {
                return Ok(QuadratureReport { value: C64::new(0.0, 0.0), kappa: KAPPA, rule: *rule, boxes, outer_nodes: 0 })
            }
        }
    }
    if spectra[3..].iter().any(|s| s.values().iter().all(|v| *v == C64::new(0.0, 0.0))) {
        return Ok(QuadratureReport { value: C64::new(0.0, 0.0), kappa: KAPPA, rule: *rule, boxes, outer_nodes: 0 });
    }
    let fine: Vec<FineSpectrum> = fs.iter().map(|f| FineSpectrum::from_wave(f)).collect();
    let rules = [
        composite(boxes[0], &[], rule.outer_points)?,
        composite(boxes[1], &[], rule.outer_points)?,
        composite(boxes[2], &[], rule.outer_points)?,
    ];
    let outer_nodes = rules.iter().map(|r| r.len()).product();
    let value = constraint_integral(
        rule,
        &rules,
        |x| (fine[0].eval(x[0]) * fine[1].eval(x[1]) * fine[2].eval(x[2])).conj(),
        |y| fine[3].eval(y[0]) * fine[4].eval(y[1]) * fine[5].eval(y[2]),
    );
    Ok(QuadratureReport { value, kappa: KAPPA, rule: *rule, boxes, outer_nodes })
}

/// `int int conj(u1 u2 u3) u4 u5 u6 dx dt` without the factor `KAPPA`.
pub fn spacetime_sextic(fs: [&WaveFunction; 6], tq: &TimeQuadrature) -> Result<Checked<C64>> {
    for f in &fs[1..] {
        same_grid(fs[0].grid(), f.grid())?;
    }
    let mut warnings = Vec::new();
    let mut fields: Vec<SpaceTimeField> = Vec::with_capacity(6);
    for f in fs {
        warnings.extend(band_limit_check(f, SEXTIC_BAND_FRACTION, SEXTIC_TAIL_THRESHOLD));
        fields.push(evolve_range(f, tq).value);
    }
    let left = fields[0].zip_with(&fields[1], |a, b| a * b)?.zip_with(&fields[2], |a, b| a * b)?;
    let right = fields[3].zip_with(&fields[4], |a, b| a * b)?.zip_with(&fields[5], |a, b| a * b)?;
    Ok(Checked { value: left.pairing(&right)?, warnings })
}

/// `KAPPA int int conj(u1 u2 u3) u4 u5 u6 dx dt` over the default time rule.
pub fn q_spacetime(fs: [&WaveFunction; 6]) -> Result<Checked<C64>> {
    q_spacetime_with(fs, &TimeQuadrature::standard())
}

pub fn q_spacetime_with(fs: [&WaveFunction; 6], tq: &TimeQuadrature) -> Result<Checked<C64>> {
    Ok(spacetime_sextic(fs, tq)?.map(|v| v * KAPPA))
}

/// Ratio `q_quadrature / spacetime_sextic` measured on several sextuples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaCalibration {
    pub ratios: Vec<C64>,
    pub mean: f64,
    /// `max_i |ratio_i - mean| / mean`.
    pub spread: f64,
    /// `|mean - KAPPA| / KAPPA`.
    pub deviation_from_analytic: f64,
}

pub fn calibrate_kappa(
    inputs: &[[&WaveFunction; 6]],
    tq: &TimeQuadrature,
    rule: &ConstraintRule,
) -> Result<KappaCalibration> {
    if inputs.is_empty() {
        return Err(LabError::Domain("kappa calibration needs at least one sextuple".into()));
    }
    let mut ratios = Vec::with_capacity(inputs.len());
    for fs in inputs {
        let st = spacetime_sextic(*fs, tq)?.value;
        if st.norm() == 0.0 {
            return Err(LabError::Domain("calibration sextuple has vanishing form".into()));
        }
        ratios.push(q_quadrature_with(*fs, rule)?.value / st);
    }
    let mean = ratios.iter().map(|r| r.re).sum::<f64>() / ratios.len() as f64;
    let spread = ratios.iter().map(|r| (r - mean).norm() / mean.abs()).fold(0.0, f64::max);
    Ok(KappaCalibration { ratios, mean, spread, deviation_from_analytic: (mean - KAPPA).abs() / KAPPA })
}

/// A real factor of the weighted form, given as a function of frequency
/// together with the interval of `eta` where it may be nonzero and any
/// jump locations the outer rule should respect.
pub struct WeightedFactor<'a> {
    pub modulus: Box<dyn Fn(f64) -> f64 + Sync + 'a>,
    pub support: (f64, f64),
    pub breakpoints: Vec<f64>,
}

impl<'a> WeightedFactor<'a> {
    /// `|h|` for `h` sampled on a frequency grid.
    pub fn from_spectrum(h: &Spectrum, rel: f64) -> Option<WeightedFactor<'a>> {
        let support = outer_box(h, rel)?;
        let fine = FineSpectrum::from_spectrum(h);
        Some(WeightedFactor { modulus: Box::new(move |xi| fine.eval(xi).norm()), support, breakpoints: Vec::new() })
    }

    /// `|h| 1_{lo <= |xi| < hi}` for the smooth spectrum `h`.
    pub fn banded(h: &Spectrum, rel: f64, lo: f64, hi: f64) -> Option<WeightedFactor<'a>> {
        let (a, b) = outer_box(h, rel)?;
        let (a, b) = (a.max(-hi), b.min(hi));
        if !(b > a) || (a > -lo && b < lo) {
            return None;
        }
        let fine = FineSpectrum::from_spectrum(h);
        let breakpoints = [-hi, -lo, lo, hi].into_iter().filter(|v| v.is_finite()).collect();
        Some(WeightedFactor {
            modulus: Box::new(move |xi| if xi.abs() >= lo && xi.abs() < hi { fine.eval(xi).norm() } else { 0.0 }),
            support: (a, b),
            breakpoints,
        })
    }
}

/// `M_F(h1, ..., h6)` for factors given as spectra.
pub fn m_weighted(hs: [&Spectrum; 6], w: WeightParams) -> Result<f64> {
    m_weighted_with(hs, w, &ConstraintRule::default())
}

pub fn m_weighted_with(hs: [&Spectrum; 6], w: WeightParams, rule: &ConstraintRule) -> Result<f64> {
    for h in &hs[1..] {
        same_grid(hs[0].grid(), h.grid())?;
    }
    let mut factors = Vec::with_capacity(6);
    for h in hs {
        match WeightedFactor::from_spectrum(h, rule.support_rel) {
            Some(f) => factors.push(f),
            None => return Ok(0.0),
        }
    }
    let factors: [WeightedFactor; 6] = factors.try_into().map_err(|_| LabError::Structural("six factors".into()))?;
    m_weighted_factors(&factors, w, rule)
}

/// `M_F` for arbitrary nonnegative factors.
pub fn m_weighted_factors(factors: &[WeightedFactor; 6], w: WeightParams, rule: &ConstraintRule) -> Result<f64> {
    rule.validate()?;
    WeightParams::new(w.mu, w.eps)?;
    let rules = [
        composite(factors[0].support, &factors[0].breakpoints, rule.outer_points)?,
        composite(factors[1].support, &factors[1].breakpoints, rule.outer_points)?,
        composite(factors[2].support, &factors[2].breakpoints, rule.outer_points)?,
    ];
    let f = |k: usize, xi: f64| (factors[k].modulus)(xi);
    let value = constraint_integral(
        rule,
        &rules,
        |x| {
            let e = weight(x[0], w) - weight(x[1], w) - weight(x[2], w);
            C64::new(e.exp() * f(0, x[0]) * f(1, x[1]) * f(2, x[2]), 0.0)
        },
        |y| {
            let e = -(weight(y[0], w) + weight(y[1], w) + weight(y[2], w));
            C64::new(e.exp() * f(3, y[0]) * f(4, y[1]) * f(5, y[2]), 0.0)
        },
    );
    Ok(value.re)
}

/// `max(F(eta1) - sum_{k>=2} F(eta_k))` over the sampled constraint points.
pub fn weight_exponent_margin(rule: &ConstraintRule, outer_rules: &[CompositeRule; 3], w: WeightParams) -> f64 {
    let (u1, u2) = circle_axes();
    let [r1, r2, r3] = outer_rules;
    let mut worst = f64::NEG_INFINITY;
    for &x1 in &r1.nodes {
        for &x2 in &r2.nodes {
            for &x3 in &r3.nodes {
                let Some((centre, r)) = circle_of([x1, x2, x3]) else { continue };
                let m = rule.angular_nodes(r);
                for p in 0..m {
                    let (sin, cos) = (2.0 * PI * p as f64 / m as f64).sin_cos();
                    let tail: f64 = (0..3).map(|c| weight(centre + r * (cos * u1[c] + sin * u2[c]), w)).sum();
                    worst = worst.max(weight(x1, w) - weight(x2, w) - weight(x3, w) - tail);
                }
            }
        }
    }
    worst
}

/// Sum of three modulated Gaussian bumps with seeded random centres in
/// `[-1.5, 1.5]`, widths in `[0.7, 1.4]`, modulations in `[-2, 2]` and
/// complex amplitudes; unit `L^2` norm.
pub fn random_packet(grid: crate::lattice::UniformGrid, seed: u64) -> Result<WaveFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<(f64, f64, f64, C64)> = (0..3)
        .map(|_| {
            let centre = rng.gen_range(-1.5..1.5);
            let width = rng.gen_range(0.7..1.4);
            let modulation = rng.gen_range(-2.0..2.0);
            let amp = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (centre, width, modulation, amp)
        })
        .collect();
    WaveFunction::from_fn(grid, |x| {
        bumps
            .iter()
            .map(|(c, s, b, a)| a * C64::from_polar((-((x - c) / s).powi(2)).exp(), b * x))
            .sum()
    })?
    .normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{forward_transform, UniformGrid};
    use approx::assert_relative_eq;

    fn gaussian() -> WaveFunction {
        WaveFunction::from_real_fn(UniformGrid::standard(), |x| (-x * x).exp()).unwrap()
    }

    #[test]
    fn weight_examples() {
        let w = WeightParams::new(0.5, 0.25).unwrap();
        assert_relative_eq!(weight(2.0, w), 1.0, epsilon = 1e-15);
        assert_eq!(weight(3.0, WeightParams::new(2.0, 0.0).unwrap()), 18.0);
        let sat = WeightParams::new(1.0, 1.0).unwrap();
        assert!((weight(1e8, sat) - 1.0).abs() < 1e-12);
        assert!(weight(f64::INFINITY, sat) == 1.0);
        assert!(WeightParams::new(-1.0, 0.0).is_err());
        let mut last = 0.0;
        for k in 0..100 {
            let v = weight(k as f64 * 0.3, sat);
            assert!(v >= last && v <= 1.0);
            last = v;
        }
    }

    #[test]
    fn circle_points_satisfy_constraints() {
        for (x, th) in [([1.0, -2.0, 0.5], 0.3), ([3.0, 3.0, 3.0], 1.0), ([0.0, 0.0, 7.0], 4.0)] {
            let y = circle_point(x, th).unwrap();
            let eta = [x[0], x[1], x[2], y[0], y[1], y[2]];
            assert!(constraint_a(&eta).abs() < 1e-12);
            assert!(constraint_b(&eta).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_forms_agree_with_closed_form() {
        let g = gaussian();
        let closed = KAPPA * PI.powf(1.5) / (4.0 * 6.0_f64.sqrt());
        let st = q_spacetime([&g; 6]).unwrap();
        assert!(st.is_clean());
        assert!((st.value.re - closed).abs() / closed < 1e-4, "{} vs {closed}", st.value);
        assert!(st.value.im.abs() < 1e-10 * closed);
        let q = q_quadrature([&g; 6]).unwrap();
        assert!((q.value.re - closed).abs() / closed < 1e-6, "{} vs {closed}", q.value);
    }

    #[test]
    fn zero_factor_gives_zero() {
        let g = gaussian();
        let z = WaveFunction::zeros(*g.grid());
        for slot in 0..6 {
            let mut fs = [&g; 6];
            fs[slot] = &z;
            assert_eq!(q_spacetime(fs).unwrap().value, C64::new(0.0, 0.0));
            assert_eq!(q_quadrature(fs).unwrap().value, C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn support_margin_nonpositive() {
        let rules = [CompositeRule::new(-6.0, 6.0, &[], 1, 10).unwrap(), CompositeRule::new(-3.0, 5.0, &[], 1, 9).unwrap(), CompositeRule::new(-4.0, 4.0, &[], 1, 8).unwrap()];
        let rule = ConstraintRule { angular_density: 1.0, ..ConstraintRule::default() };
        assert!(support_margin(&rule, &rules) <= 1e-12);
        let w = WeightParams::new(0.3, 0.7).unwrap();
        assert!(weight_exponent_margin(&rule, &rules, w) <= 1e-12);
    }

    #[test]
    fn weighted_form_limits() {
        let g = forward_transform(&gaussian());
        let rule = ConstraintRule { outer_points: 24, ..ConstraintRule::default() };
        let m0 = m_weighted_with([&g; 6], WeightParams::unweighted(), &rule).unwrap();
        let plain = q_quadrature_with([&gaussian(); 6], &rule).unwrap().value.re;
        assert_relative_eq!(m0, plain, max_relative = 1e-12);
        let mut previous = None;
        for eps in [0.0, 1.0, 1e6] {
            let m = m_weighted_with([&g; 6], WeightParams::new(0.01, eps).unwrap(), &rule).unwrap();
            assert!(m > 0.0 && m <= m0 * (1.0 + 1e-12));
            previous = Some(m);
        }
        assert!((previous.unwrap() - m0).abs() / m0 < 1e-6);
    }
}
