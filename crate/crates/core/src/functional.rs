//! The multiplicative functional equation
//! `f(x) f(y) f(z) = f(a) f(b) f(c)` on triples with equal sums and equal
//! sums of squares, its exact golden-ratio power-sum certificate, and the
//! quadratic log-fit that certifies a sampled profile as a Gaussian.

use crate::error::{LabError, Result};
use crate::lattice::{local_interpolate, WaveFunction};
use crate::C64;
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Points `(x, y, z)` and `(a, b, c)` with equal sums and equal sums of squares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSextuple {
    pub left: [f64; 3],
    pub right: [f64; 3],
}

impl ConstraintSextuple {
    /// Validates both constraints to `1e-12` relative to the data scale.
    pub fn new(left: [f64; 3], right: [f64; 3]) -> Result<Self> {
        let cs = ConstraintSextuple { left, right };
        let scale = left.iter().chain(&right).map(|v| v * v).sum::<f64>().max(1.0);
        if cs.sum_gap().abs() > 1e-12 * scale.sqrt() || cs.square_gap().abs() > 1e-12 * scale {
            return Err(LabError::Structural(format!("{left:?} and {right:?} violate the sum constraints")));
        }
        Ok(cs)
    }

    pub fn sum_gap(&self) -> f64 {
        self.left.iter().sum::<f64>() - self.right.iter().sum::<f64>()
    }

    pub fn square_gap(&self) -> f64 {
        self.left.iter().map(|v| v * v).sum::<f64>() - self.right.iter().map(|v| v * v).sum::<f64>()
    }
}

/// The triple at angle `theta` on the circle of all `(a, b, c)` sharing the
/// sum and square sum of `(x, y, z)`: `m + r (cos theta u1 + sin theta u2)`
/// with `m = (s/3)(1, 1, 1)`, `u1 = (1, -1, 0)/sqrt 2`, `u2 = (1, 1, -2)/sqrt 6`.
pub fn constraint_circle(x: f64, y: f64, z: f64, theta: f64) -> Result<ConstraintSextuple> {
    let s = x + y + z;
    let q = x * x + y * y + z * z;
    let r2 = q - s * s / 3.0;
    if r2 < -1e-12 {
        return Err(LabError::Structural(format!("negative circle radius^2 {r2} contradicts Cauchy-Schwarz")));
    }
    let r = r2.max(0.0).sqrt();
    let m = s / 3.0;
    let (sin, cos) = theta.sin_cos();
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let b = 1.0 / 6f64.sqrt();
    let right = [m + r * (cos * a + sin * b), m + r * (-cos * a + sin * b), m - 2.0 * r * sin * b];
    Ok(ConstraintSextuple { left: [x, y, z], right })
}

/// `|f(x)f(y)f(z) - f(a)f(b)f(c)| / (|f(x)f(y)f(z)| + |f(a)f(b)f(c)| + 1e-300)`.
pub fn product_residual(f: impl Fn(f64) -> C64, cs: &ConstraintSextuple) -> f64 {
    let lhs = cs.left.iter().map(|v| f(*v)).product::<C64>();
    let rhs = cs.right.iter().map(|v| f(*v)).product::<C64>();
    (lhs - rhs).norm() / (lhs.norm() + rhs.norm() + 1e-300)
}

/// Order of the local barycentric interpolation used for off-grid values.
pub const INTERPOLATION_ORDER: usize = 6;

/// Off-grid evaluation of a sampled function, zero outside the window.
pub fn grid_evaluator(f: &WaveFunction) -> impl Fn(f64) -> C64 + Sync + '_ {
    let grid = *f.grid();
    move |x| local_interpolate(f.values(), grid.x0(), grid.dx(), x, INTERPOLATION_ORDER)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualStatistic {
    pub sup: f64,
    pub rms: f64,
    pub samples: usize,
    pub seed: u64,
    /// `(x, y, z)` drawn uniformly from `[lo, hi]^3`.
    pub sampler_box: (f64, f64),
}

/// Seeded sup and RMS of [`product_residual`] over random sextuples.
pub fn residual_statistic(
    f: impl Fn(f64) -> C64 + Sync,
    n_samples: usize,
    seed: u64,
    sampler_box: (f64, f64),
) -> Result<ResidualStatistic> {
    let (lo, hi) = sampler_box;
    if n_samples == 0 || !(hi > lo) {
        return Err(LabError::Domain("residual statistic needs samples and a nonempty box".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<[f64; 4]> = (0..n_samples)
        .map(|_| [rng.gen_range(lo..hi), rng.gen_range(lo..hi), rng.gen_range(lo..hi), rng.gen_range(0.0..2.0 * PI)])
        .collect();
    let residuals: Vec<f64> = draws
        .par_iter()
        .map(|d| constraint_circle(d[0], d[1], d[2], d[3]).map(|cs| product_residual(&f, &cs)))
        .collect::<Result<_>>()?;
    let sup = residuals.iter().copied().fold(0.0, f64::max);
    let squares: Vec<f64> = residuals.iter().map(|r| r * r).collect();
    let rms = (crate::quadrature::pairwise_sum(&squares) / n_samples as f64).sqrt();
    Ok(ResidualStatistic { sup, rms, samples: n_samples, seed, sampler_box })
}

/// `p_k = 2 + (-1)^k - L_k` with its lower bound on `-p_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSumRow {
    pub k: u32,
    /// `phi^k + psi^k`.
    pub lucas: BigInt,
    pub p: BigInt,
    /// `(3/2)^k - 3` for even `k`, `(3/2)^k - 2` for odd `k`.
    pub bound: BigRational,
    pub bound_holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSumTable {
    pub rows: Vec<PowerSumRow>,
    pub all_nonzero: bool,
    pub all_bounds_hold: bool,
}

impl PowerSumTable {
    /// Plain-text table `k lucas p_k bound holds`.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# k L_k p_k bound(-p_k >= ...) holds\n");
        for r in &self.rows {
            let _ = writeln!(out, "{} {} {} {} {}", r.k, r.lucas, r.p, r.bound, r.bound_holds);
        }
        out
    }
}

/// Exact `p_k` for `3 <= k <= kmax` via `L_k = L_{k-1} + L_{k-2}`,
/// `L_1 = 1`, `L_2 = 3`, and the rational bound check on `-p_k`.
pub fn golden_power_sums(kmax: u32) -> Result<PowerSumTable> {
    if kmax < 3 {
        return Err(LabError::Domain(format!("kmax must be at least 3, got {kmax}")));
    }
    let mut prev = BigInt::from(1);
    let mut cur = BigInt::from(3);
    let three_halves = BigRational::new(BigInt::from(3), BigInt::from(2));
    let mut power = three_halves.clone() * three_halves.clone();
    let mut rows = Vec::with_capacity(kmax as usize - 2);
    for k in 3..=kmax {
        let next = &cur + &prev;
        prev = std::mem::replace(&mut cur, next);
        power *= three_halves.clone();
        let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let p = BigInt::from(2) + sign - &cur;
        let offset = if k % 2 == 0 { 3 } else { 2 };
        let bound = power.clone() - BigRational::from_integer(BigInt::from(offset));
        let minus_p = BigRational::from_integer(-p.clone());
        let bound_holds = minus_p >= bound && bound.is_positive();
        rows.push(PowerSumRow { k, lucas: cur.clone(), p, bound, bound_holds });
    }
    let all_nonzero = rows.iter().all(|r| !r.p.is_zero());
    let all_bounds_hold = rows.iter().all(|r| r.bound_holds);
    Ok(PowerSumTable { rows, all_nonzero, all_bounds_hold })
}

/// `log f ~ A x^2 + B x + C` on the window where `|f| >= floor max|f|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFit {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    /// RMS of the complex log-domain misfit over the window.
    pub residual: f64,
    /// Fraction of `||f||_2^2` carried by the window.
    pub support_mass: f64,
    pub window_samples: usize,
    /// Some adjacent samples differ in phase by more than `pi/2`.
    pub unwrap_ambiguous: bool,
}

impl QuadraticFit {
    /// Residual at most `1e-3`, `Re(A) < 0`, and an unambiguous phase.
    pub fn gaussian_certified(&self) -> bool {
        self.residual <= 1e-3 && self.a.re < 0.0 && !self.unwrap_ambiguous
    }
}

/// Least-squares complex quadratic through the unwrapped logarithm of `f`
/// on the contiguous window around the peak of `|f|`.
pub fn quadratic_log_fit(f: &WaveFunction, floor_ratio: f64) -> Result<QuadraticFit> {
    if !(floor_ratio > 0.0 && floor_ratio < 1.0) {
        return Err(LabError::Domain(format!("floor ratio must lie in (0, 1), got {floor_ratio}")));
    }
    let values = f.values();
    let (peak_idx, peak) = values
        .iter()
        .enumerate()
        .map(|(i, v)| (i, v.norm()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| LabError::Domain("empty function".into()))?;
    if peak == 0.0 {
        return Err(LabError::Domain("quadratic fit of the zero function".into()));
    }
    let floor = floor_ratio * peak;
    let mut lo = peak_idx;
    while lo > 0 && values[lo - 1].norm() >= floor {
        lo -= 1;
    }
    let mut hi = peak_idx;
    while hi + 1 < values.len() && values[hi + 1].norm() >= floor {
        hi += 1;
    }
    let count = hi - lo + 1;
    if count < 32 {
        return Err(LabError::Domain(format!("fit window holds {count} samples, need at least 32")));
    }
    let mut phase = vec![0.0; values.len()];
    phase[peak_idx] = values[peak_idx].arg();
    let mut ambiguous = false;
    let mut step = |from: usize, to: usize, phase: &mut Vec<f64>| {
        let jump = (values[to] / values[from]).arg();
        if jump.abs() > 0.5 * PI {
            ambiguous = true;
        }
        phase[to] = phase[from] + jump;
    };
    for i in (lo..peak_idx).rev() {
        step(i + 1, i, &mut phase);
    }
    for i in peak_idx + 1..=hi {
        step(i - 1, i, &mut phase);
    }

    let grid = f.grid();
    let xs: Vec<f64> = (lo..=hi).map(|i| grid.x(i)).collect();
    let scale = xs.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
    let design = DMatrix::from_fn(count, 3, |r, c| (xs[r] / scale).powi(2 - c as i32));
    let svd = design.clone().svd(true, true);
    let solve = |rhs: Vec<f64>| -> Result<DVector<f64>> {
        svd.solve(&DVector::from_vec(rhs), 1e-14).map_err(|e| LabError::Domain(format!("fit failed: {e}")))
    };
    let re = solve((lo..=hi).map(|i| values[i].norm().ln()).collect())?;
    let im = solve((lo..=hi).map(|i| phase[i]).collect())?;
    let coef = |k: usize| C64::new(re[k], im[k]);
    let fitted_re = &design * &re;
    let fitted_im = &design * &im;
    let misfit: Vec<f64> = (0..count)
        .map(|r| {
            let i = lo + r;
            (values[i].norm().ln() - fitted_re[r]).powi(2) + (phase[i] - fitted_im[r]).powi(2)
        })
        .collect();
    let residual = (crate::quadrature::pairwise_sum(&misfit) / count as f64).sqrt();
    let total: f64 = values.iter().map(|v| v.norm_sqr()).sum();
    let window: f64 = values[lo..=hi].iter().map(|v| v.norm_sqr()).sum();
    Ok(QuadraticFit {
        a: coef(0) / (scale * scale),
        b: coef(1) / scale,
        c: coef(2),
        residual,
        support_mass: window / total,
        window_samples: count,
        unwrap_ambiguous: ambiguous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::UniformGrid;

    #[test]
    fn circle_examples() {
        for th in [0.0, 1.0, 4.0] {
            let cs = constraint_circle(1.0, 1.0, 1.0, th).unwrap();
            assert!(cs.right.iter().all(|v| (v - 1.0).abs() < 1e-15));
        }
        let hit = (0..3600)
            .map(|k| constraint_circle(1.0, -1.0, 1.0, k as f64 * 2.0 * PI / 3600.0).unwrap())
            .any(|cs| cs.right.iter().zip(&cs.left).all(|(a, b)| (a - b).abs() < 1e-2));
        assert!(hit);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let psi = (1.0 - 5f64.sqrt()) / 2.0;
        let golden = ConstraintSextuple::new([1.0, -1.0, 1.0], [phi, psi, 0.0]).unwrap();
        assert!(golden.sum_gap().abs() < 1e-15 && golden.square_gap().abs() < 1e-15);
        assert!(ConstraintSextuple::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.5]).is_err());
    }

    #[test]
    fn circle_invariants_hold_for_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100_000 {
            let (x, y, z, t) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.0..7.0));
            let cs = constraint_circle(x, y, z, t).unwrap();
            assert!(cs.sum_gap().abs() < 1e-12 && cs.square_gap().abs() < 1e-12);
        }
    }

    #[test]
    fn product_residual_examples() {
        let quad = |x: f64| C64::new(-x * x + 2.0 * x + 1.0, 0.0).exp();
        let sech = |x: f64| C64::new(1.0 / x.cosh(), 0.0);
        let one = |_: f64| C64::new(1.0, 0.0);
        assert!(residual_statistic(quad, 10_000, 1, (-3.0, 3.0)).unwrap().sup <= 1e-12);
        assert!(residual_statistic(sech, 10_000, 1, (-3.0, 3.0)).unwrap().sup >= 0.05);
        assert_eq!(residual_statistic(one, 100, 1, (-3.0, 3.0)).unwrap().sup, 0.0);
        let a = residual_statistic(sech, 500, 42, (-2.0, 2.0)).unwrap();
        let b = residual_statistic(sech, 500, 42, (-2.0, 2.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn power_sums_small_k() {
        let t = golden_power_sums(5).unwrap();
        let p: Vec<i64> = t.rows.iter().map(|r| r.p.to_string().parse().unwrap()).collect();
        assert_eq!(p, vec![-3, -4, -10]);
        assert_eq!(t.rows[1].bound, BigRational::new(BigInt::from(33), BigInt::from(16)));
        assert_eq!(t.rows[2].bound, BigRational::new(BigInt::from(179), BigInt::from(32)));
        assert!(t.all_nonzero && t.all_bounds_hold);
        assert!(golden_power_sums(2).is_err());
    }

    #[test]
    fn log_fit_recovers_models() {
        let grid = UniformGrid::standard();
        let g = WaveFunction::from_real_fn(grid, |x| (-x * x).exp()).unwrap();
        let fit = quadratic_log_fit(&g, 1e-6).unwrap();
        assert!((fit.a + 1.0).norm() < 1e-10 && fit.b.norm() < 1e-10 && fit.c.norm() < 1e-10);
        assert!(fit.residual < 1e-10 && fit.gaussian_certified());

        let (a, b, c) = (C64::new(-1.0, 0.5), C64::new(2.0, -1.0), C64::new(3.0, 0.0));
        let h = WaveFunction::from_fn(grid, |x| (a * x * x + b * x + c).exp()).unwrap();
        let fit = quadratic_log_fit(&h, 1e-6).unwrap();
        assert!((fit.a - a).norm() < 1e-8 && (fit.b - b).norm() < 1e-8);
        assert!((fit.c - c).norm() < 1e-8, "{:?}", fit.c);

        let sech = WaveFunction::from_real_fn(grid, |x| 1.0 / x.cosh()).unwrap();
        let fit = quadratic_log_fit(&sech, 1e-6).unwrap();
        assert!(fit.residual >= 1e-2 && !fit.gaussian_certified());
    }

    #[test]
    fn log_fit_translation_equivariance() {
        let grid = UniformGrid::standard();
        let a = -0.7;
        let shift = 1.3;
        let base = quadratic_log_fit(&WaveFunction::from_real_fn(grid, |x| (a * x * x).exp()).unwrap(), 1e-6).unwrap();
        let moved = quadratic_log_fit(&WaveFunction::from_real_fn(grid, |x| (a * (x - shift).powi(2)).exp()).unwrap(), 1e-6).unwrap();
        assert!((moved.a - base.a).norm() < 1e-9);
        assert!((moved.b - (base.b - 2.0 * base.a * shift)).norm() < 1e-8);
    }

    #[test]
    fn narrow_window_rejected() {
        let grid = UniformGrid::standard();
        let spike = WaveFunction::from_real_fn(grid, |x| (-400.0 * x * x).exp()).unwrap();
        assert!(quadratic_log_fit(&spike, 0.5).is_err());
    }
}
