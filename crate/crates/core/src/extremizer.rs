//! The Euler-Lagrange map `Lambda`, defined by
//! `<g, Lambda f> = Q(g, f, f, f, f, f)` for every `g`, and the normalized
//! Picard iteration `f <- gauge_fix(Lambda f / ||Lambda f||)` whose fixed
//! points solve `omega f = Lambda f`.
//!
//! In space-time, `Lambda f = KAPPA int exp(-it Laplacian)(|u|^4 u)(t) dt`
//! with `u = exp(it Laplacian) f`, i.e. [`SpaceTimeField::backpropagate`]
//! applied to the quintic field.

use crate::error::{Checked, LabError, Result};
use crate::lattice::{forward_transform, inner_product, inverse_transform, WaveFunction};
use crate::multilinear::KAPPA;
use crate::propagator::{evolve_range, spacetime_lp, SpaceTimeField, TimeQuadrature};
use crate::C64;
use std::fmt::Write as _;

/// Second moment `int x^2 |f|^2` of the normalized `exp(-x^2)`.
pub const GAUGE_SECOND_MOMENT: f64 = 0.25;

fn nonzero(f: &WaveFunction, what: &str) -> Result<f64> {
    let norm = f.l2_norm();
    if !(norm > 0.0) {
        return Err(LabError::Domain(format!("{what} of the zero function")));
    }
    Ok(norm)
}

fn quintic(field: &SpaceTimeField) -> WaveFunction {
    field.map(|u| u * u.norm_sqr() * u.norm_sqr()).backpropagate().scaled(C64::new(KAPPA, 0.0))
}

/// `Lambda f` over the default time rule.
pub fn lambda_apply(f: &WaveFunction) -> Result<Checked<WaveFunction>> {
    lambda_apply_with(f, &TimeQuadrature::standard())
}

pub fn lambda_apply_with(f: &WaveFunction, tq: &TimeQuadrature) -> Result<Checked<WaveFunction>> {
    nonzero(f, "Euler-Lagrange map")?;
    Ok(evolve_range(f, tq).map(|field| quintic(&field)))
}

/// `Q(f, ..., f) / ||f||^2 = KAPPA ||u||_6^6 / ||f||^2`.
pub fn omega_of(f: &WaveFunction) -> Result<f64> {
    omega_of_with(f, &TimeQuadrature::standard())
}

pub fn omega_of_with(f: &WaveFunction, tq: &TimeQuadrature) -> Result<f64> {
    let norm = nonzero(f, "omega")?;
    let l6 = spacetime_lp(&evolve_range(f, tq).value, 6.0)?;
    Ok(KAPPA * l6.powi(6) / (norm * norm))
}

/// `omega = Re <g, Lambda g> / ||g||^2` and the relative eigen-residual
/// `||Lambda g - omega g|| / (omega ||g||)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EigenCheck {
    pub omega: f64,
    pub residual: f64,
}

pub fn eigen_residual(g: &WaveFunction, tq: &TimeQuadrature) -> Result<EigenCheck> {
    let norm = nonzero(g, "eigen-residual")?;
    let lg = lambda_apply_with(g, tq)?.value;
    let omega = inner_product(g, &lg)?.re / (norm * norm);
    let diff = lg.combine(C64::new(1.0, 0.0), g, C64::new(-omega, 0.0))?;
    Ok(EigenCheck { omega, residual: diff.l2_norm() / (omega * norm) })
}

fn moment(f: &WaveFunction, k: i32) -> f64 {
    let terms: Vec<f64> = f.grid().points().zip(f.values()).map(|(x, v)| x.powi(k) * v.norm_sqr()).collect();
    crate::quadrature::pairwise_sum(&terms) * f.grid().dx()
}

/// `sqrt(lambda) f(lambda x)` by trigonometric interpolation; zero where
/// `lambda x` leaves the window.
fn dilate(f: &WaveFunction, lambda: f64) -> WaveFunction {
    let spec = forward_transform(f);
    let grid = *f.grid();
    let (lo, hi) = (grid.x0(), grid.x0() + grid.length());
    let scale = lambda.sqrt();
    f.map(|x, _| {
        let y = lambda * x;
        if y < lo || y >= hi {
            C64::new(0.0, 0.0)
        } else {
            spec.synthesize_at(C64::new(y, 0.0)) * scale
        }
    })
}

/// Quotients out translation, modulation, parabolic scaling, phase and
/// normalization: the result has `|f|^2` and `|f^|^2` centred at zero,
/// second moment [`GAUGE_SECOND_MOMENT`], real positive `f^(0)` and unit
/// norm.
pub fn gauge_fix(f: &WaveFunction) -> Result<WaveFunction> {
    let norm = nonzero(f, "gauge fixing")?;
    let f = f.scaled(C64::new(1.0 / norm, 0.0));

    let centre = moment(&f, 1);
    let f = inverse_transform(&forward_transform(&f).map(|xi, v| v * C64::from_polar(1.0, xi * centre)));

    let spec = forward_transform(&f);
    let freq = spec.frequency_grid();
    let weights: Vec<f64> = spec.values().iter().map(|v| v.norm_sqr()).collect();
    let total = crate::quadrature::pairwise_sum(&weights);
    let first: Vec<f64> = weights.iter().enumerate().map(|(m, w)| freq.xi(m) * w).collect();
    let xi_bar = crate::quadrature::pairwise_sum(&first) / total;
    let f = f.map(|x, v| v * C64::from_polar(1.0, -xi_bar * x));

    let m2 = moment(&f, 2) / moment(&f, 0);
    let lambda = (m2 / GAUGE_SECOND_MOMENT).sqrt();
    let f = if (lambda - 1.0).abs() > 1e-15 { dilate(&f, lambda) } else { f };

    let spec = forward_transform(&f);
    let zero = spec.values()[spec.grid().n() / 2];
    let peak = spec.values().iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or_default();
    let anchor = if zero.norm() > 1e-12 * peak.norm() { zero } else { peak };
    let phase = if anchor.norm() > 0.0 { anchor.conj() / anchor.norm() } else { C64::new(1.0, 0.0) };
    f.scaled(phase).normalized()
}

/// One Picard iterate with the diagnostics evaluated on it.
#[derive(Debug, Clone)]
pub struct IterationState {
    pub f: WaveFunction,
    pub omega_estimate: f64,
    pub ratio: f64,
    pub step_index: usize,
    /// `||f_k - f_{k-1}||_2`; at step 0 the distance between the normalized
    /// input and its gauge-fixed form.
    pub delta: f64,
}

#[derive(Debug, Clone)]
pub struct PicardRun {
    pub states: Vec<IterationState>,
    pub converged: bool,
    pub tol: f64,
    pub max_steps: usize,
    pub warnings: Vec<crate::AliasingWarning>,
}

impl PicardRun {
    pub fn last(&self) -> &IterationState {
        self.states.last().expect("a run records at least the initial state")
    }

    /// Steps at which the ratio decreased, with the size of the drop.
    pub fn ratio_decreases(&self) -> Vec<(usize, f64)> {
        self.states
            .windows(2)
            .filter(|w| w[1].ratio < w[0].ratio)
            .map(|w| (w[1].step_index, w[0].ratio - w[1].ratio))
            .collect()
    }

    /// CSV `step,delta,ratio,omega`.
    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from("step,delta,ratio,omega\n");
        for s in &self.states {
            let _ = writeln!(out, "{},{:e},{:.15},{:.12}", s.step_index, s.delta, s.ratio, s.omega_estimate);
        }
        out
    }
}

/// Repeats `f <- gauge_fix(Lambda f / ||Lambda f||)` until the change drops
/// to `tol` or `max_steps` maps have been applied.
pub fn picard_iterate(f0: &WaveFunction, tol: f64, max_steps: usize) -> Result<PicardRun> {
    picard_iterate_with(f0, tol, max_steps, &TimeQuadrature::standard())
}

pub fn picard_iterate_with(f0: &WaveFunction, tol: f64, max_steps: usize, tq: &TimeQuadrature) -> Result<PicardRun> {
    if !(tol > 0.0) {
        return Err(LabError::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let start = f0.normalized()?;
    let mut f = gauge_fix(&start)?;
    let mut delta = f.relative_distance(&start)?;
    let mut states = Vec::new();
    let mut warnings = Vec::new();
    let mut step = 0;
    loop {
        let checked = evolve_range(&f, tq);
        for w in checked.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
        let field = checked.value;
        let l6 = spacetime_lp(&field, 6.0)?;
        let norm = f.l2_norm();
        states.push(IterationState {
            f: f.clone(),
            omega_estimate: KAPPA * l6.powi(6) / (norm * norm),
            ratio: l6 / norm,
            step_index: step,
            delta,
        });
        if step > 0 && delta <= tol {
            return Ok(PicardRun { states, converged: true, tol, max_steps, warnings });
        }
        if step == max_steps {
            return Ok(PicardRun { states, converged: false, tol, max_steps, warnings });
        }
        let next = gauge_fix(&quintic(&field))?;
        delta = next.combine(C64::new(1.0, 0.0), &f, C64::new(-1.0, 0.0))?.l2_norm();
        f = next;
        step += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::UniformGrid;
    use crate::multilinear::q_spacetime;
    use crate::propagator::strichartz_ratio;
    use rand::{Rng, SeedableRng};

    fn gaussian() -> WaveFunction {
        WaveFunction::from_real_fn(UniformGrid::standard(), |x| (-x * x).exp()).unwrap().normalized().unwrap()
    }

    #[test]
    fn gaussian_is_gauge_fixed_point() {
        let g = gaussian();
        let fixed = gauge_fix(&g).unwrap();
        assert!(fixed.relative_distance(&g).unwrap() < 1e-12);
    }

    #[test]
    fn gauge_fix_removes_translation_and_modulation() {
        let grid = UniformGrid::standard();
        let f = WaveFunction::from_fn(grid, |x| C64::from_polar((-(x - 2.0).powi(2)).exp(), 3.0 * x)).unwrap();
        let fixed = gauge_fix(&f).unwrap();
        assert!(fixed.relative_distance(&gaussian()).unwrap() < 1e-8);
        let again = gauge_fix(&fixed).unwrap();
        assert!(again.relative_distance(&fixed).unwrap() < 1e-10);
    }

    #[test]
    fn gauge_fix_undoes_parabolic_scaling_and_keeps_ratio() {
        let grid = UniformGrid::standard();
        let f = WaveFunction::from_fn(grid, |x| C64::new(-0.7, 0.2) * (-(2.0 * x + 0.5).powi(2)).exp() * (1.0 + 0.1 * x)).unwrap();
        let fixed = gauge_fix(&f).unwrap();
        assert!((moment(&fixed, 2) - GAUGE_SECOND_MOMENT).abs() < 1e-10);
        assert!(moment(&fixed, 1).abs() < 1e-10);
        let a = strichartz_ratio(&f).unwrap();
        let b = strichartz_ratio(&fixed).unwrap();
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        let again = gauge_fix(&fixed).unwrap();
        assert!(again.relative_distance(&fixed).unwrap() < 1e-10);
    }

    #[test]
    fn lambda_is_adjoint_to_q() {
        let grid = UniformGrid::standard();
        let f = WaveFunction::from_real_fn(grid, |x| (-x * x).exp() * (1.0 + 0.3 * x)).unwrap();
        let lf = lambda_apply(&f).unwrap().value;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let (c, b) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let g = WaveFunction::from_fn(grid, |x| C64::from_polar((-(x - c).powi(2)).exp(), b * x)).unwrap();
            let lhs = inner_product(&g, &lf).unwrap();
            let rhs = q_spacetime([&g, &f, &f, &f, &f, &f]).unwrap().value;
            assert!((lhs - rhs).norm() / rhs.norm() < 1e-3);
        }
    }

    #[test]
    fn lambda_quintic_homogeneity() {
        let g = gaussian();
        let c = C64::new(0.6, -1.1);
        let a = lambda_apply(&g.scaled(c)).unwrap().value;
        let b = lambda_apply(&g).unwrap().value.scaled(c * c.norm_sqr() * c.norm_sqr());
        assert!(a.relative_distance(&b).unwrap() < 1e-12);
    }

    #[test]
    fn gaussian_eigen_relation() {
        let check = eigen_residual(&gauge_fix(&gaussian()).unwrap(), &TimeQuadrature::standard()).unwrap();
        let expected = KAPPA / (2.0 * 3.0_f64.sqrt());
        assert!((check.omega - expected).abs() < 0.5, "omega {}", check.omega);
        assert!(check.residual < 1e-3, "residual {}", check.residual);
    }

    #[test]
    fn omega_symmetries() {
        let g = gaussian();
        let w = omega_of(&g).unwrap();
        let modulated = g.map(|x, v| v * C64::from_polar(1.0, 0.7 * x));
        assert!((omega_of(&modulated).unwrap() - w).abs() / w < 1e-6);
        let c = C64::new(0.0, 1.5);
        assert!((omega_of(&g.scaled(c)).unwrap() - c.norm().powi(4) * w).abs() / w < 1e-12);
        assert!(omega_of(&WaveFunction::zeros(*g.grid())).is_err());
    }

    #[test]
    fn picard_from_gaussian_stops_immediately() {
        let run = picard_iterate(&gaussian(), 1e-8, 10).unwrap();
        assert!(run.converged);
        assert!(run.last().step_index <= 2);
        assert!((run.last().ratio - 12f64.powf(-1.0 / 12.0)).abs() < 1e-4);
        assert!(run.trajectory_csv().starts_with("step,delta,ratio,omega\n"));
    }
}
