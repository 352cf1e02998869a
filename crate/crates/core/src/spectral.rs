//! Characteristic functions, low/high-pass filters, the normalized L1
//! distance, and the cut-off bound.
//!
//! The characteristic function is `F(k) = ∫_0^1 e^{ikx} f(x) dx` and the
//! low-pass filter keeps `|k| ≤ K`:
//!
//! ```text
//! f<(x) = 1/(2π) ∫_{-K}^{K} e^{-ikx} F(k) dk = 1/π ∫_0^K Re[e^{-ikx} F(k)] dk
//! ```
//!
//! using `F(-k) = conj F(k)`. Both the `k` and the `x` integrals are
//! composite Simpson. On a uniform grid the two integrals can be swapped,
//! which turns the filter into a Toeplitz kernel
//! `c(x - y) = 1/π ∫_0^K cos(k (x - y)) dk` sampled at the grid offsets;
//! [`lowpass`] uses that form, [`lowpass_from_characteristic`] the direct one.
//! Filtered functions are neither renormalized nor clipped.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{integrate_2d, GridFunction1D, GridFunction2D, MomentGap, MultiMomentGap};
use crate::quadrature::{self, QuadratureSpec};

/// Minimum number of `k` nodes on `[0, K]`.
pub const MIN_K_POINTS: usize = 2001;

/// `max(2001, ceil(200 K))`, rounded up to odd, so the kernel `e^{-ikx}`
/// is resolved for every `x ≤ 1`.
pub fn default_k_points(cutoff: f64) -> usize {
    let wanted = (200.0 * cutoff).ceil();
    let n = if wanted.is_finite() && wanted > MIN_K_POINTS as f64 {
        wanted as usize
    } else {
        MIN_K_POINTS
    };
    n | 1
}

fn check_cutoff(cutoff: f64) -> Result<()> {
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cut-off {cutoff} must be positive and finite"
        )));
    }
    Ok(())
}

/// `F(k)` sampled at `num_k` uniform nodes on `[0, k_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicSamples {
    k_max: f64,
    values: Vec<Complex64>,
}

impl CharacteristicSamples {
    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn nodes(&self) -> Vec<f64> {
        QuadratureSpec::new(self.values.len())
            .expect("validated at construction")
            .nodes(0.0, self.k_max)
    }

    /// `F` at node `j`, or its conjugate mirror for negative `j`.
    pub fn at(&self, j: isize) -> Complex64 {
        let z = self.values[j.unsigned_abs()];
        if j < 0 {
            z.conj()
        } else {
            z
        }
    }
}

/// `F(k) = ∫_0^1 e^{ikx} f(x) dx`.
pub fn char_fn(f: &GridFunction1D, k: f64) -> Result<Complex64> {
    f.require_normalized()?;
    Ok(transform(f.values(), k))
}

fn transform(values: &[f64], k: f64) -> Complex64 {
    let last = (values.len() - 1) as f64;
    let (re, im): (Vec<f64>, Vec<f64>) = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let (s, c) = (k * (i as f64 / last)).sin_cos();
            (v * c, v * s)
        })
        .unzip();
    let re = quadrature::integrate(&re, 0.0, 1.0).expect("grid validated");
    let im = quadrature::integrate(&im, 0.0, 1.0).expect("grid validated");
    Complex64::new(re, im)
}

/// `F` on `num_k` uniform nodes of `[0, k_max]`.
pub fn char_samples(f: &GridFunction1D, k_max: f64, num_k: usize) -> Result<CharacteristicSamples> {
    f.require_normalized()?;
    check_cutoff(k_max)?;
    let nodes = QuadratureSpec::new(num_k)?.nodes(0.0, k_max);
    let values = nodes
        .par_iter()
        .map(|&k| transform(f.values(), k))
        .collect();
    Ok(CharacteristicSamples { k_max, values })
}

/// Characteristic function of the empirical measure, `(1/N) Σ e^{ik x_i}`.
pub fn char_samples_from_points(
    points: &[f64],
    k_max: f64,
    num_k: usize,
) -> Result<CharacteristicSamples> {
    if points.is_empty() {
        return Err(Error::EmptyData);
    }
    check_cutoff(k_max)?;
    let nodes = QuadratureSpec::new(num_k)?.nodes(0.0, k_max);
    let count = points.len() as f64;
    let values = nodes
        .par_iter()
        .map(|&k| {
            let (re, im) = points.iter().fold((0.0, 0.0), |(re, im), &x| {
                let (s, c) = (k * x).sin_cos();
                (re + c, im + s)
            });
            Complex64::new(re / count, im / count)
        })
        .collect();
    Ok(CharacteristicSamples { k_max, values })
}

/// Inverts characteristic samples over `[-k_max, k_max]` on a uniform grid
/// of `num_points` nodes on `[0, 1]`.
pub fn lowpass_from_characteristic(
    samples: &CharacteristicSamples,
    num_points: usize,
) -> Result<GridFunction1D> {
    quadrature::check_points(num_points)?;
    let k_nodes = samples.nodes();
    let weights = QuadratureSpec::new(k_nodes.len())?.weights(0.0, samples.k_max);
    let x_nodes = QuadratureSpec::new(num_points)?.nodes(0.0, 1.0);
    let values = x_nodes
        .par_iter()
        .map(|&x| {
            let sum: f64 = k_nodes
                .iter()
                .zip(&weights)
                .zip(&samples.values)
                .map(|((&k, w), z)| {
                    let (s, c) = (k * x).sin_cos();
                    w * (c * z.re + s * z.im)
                })
                .sum();
            sum / PI
        })
        .collect();
    Ok(GridFunction1D::signed(values))
}

/// Low-pass filter on a uniform grid of `num_points` nodes over `[0, 1]`,
/// stored as the sampled kernel `c_d = 1/π ∫_0^K cos(k d h) dk`.
#[derive(Debug, Clone)]
pub struct FilterKernel {
    cutoff: f64,
    num_k: usize,
    kernel: Vec<f64>,
    weights: Vec<f64>,
}

impl FilterKernel {
    pub fn new(num_points: usize, cutoff: f64, num_k: usize) -> Result<Self> {
        quadrature::check_points(num_points)?;
        check_cutoff(cutoff)?;
        let k_spec = QuadratureSpec::new(num_k)?;
        let k_nodes = k_spec.nodes(0.0, cutoff);
        let k_weights = k_spec.weights(0.0, cutoff);
        let last = (num_points - 1) as f64;
        let kernel = (0..num_points)
            .into_par_iter()
            .map(|d| {
                let offset = d as f64 / last;
                let sum: f64 = k_nodes
                    .iter()
                    .zip(&k_weights)
                    .map(|(k, w)| w * (k * offset).cos())
                    .sum();
                sum / PI
            })
            .collect();
        Ok(Self {
            cutoff,
            num_k,
            kernel,
            weights: QuadratureSpec::new(num_points)?.weights(0.0, 1.0),
        })
    }

    /// Kernel with the default `k` resolution for `cutoff`.
    pub fn with_default_resolution(num_points: usize, cutoff: f64) -> Result<Self> {
        Self::new(num_points, cutoff, default_k_points(cutoff))
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn num_k(&self) -> usize {
        self.num_k
    }

    pub fn num_points(&self) -> usize {
        self.kernel.len()
    }

    /// Filters raw samples (signed or unnormalized values are fine).
    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.kernel.len() {
            return Err(Error::GridMismatch {
                left: self.kernel.len(),
                right: values.len(),
            });
        }
        let weighted: Vec<f64> = values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .collect();
        let n = values.len();
        Ok((0..n)
            .into_par_iter()
            .map(|i| {
                weighted
                    .iter()
                    .enumerate()
                    .map(|(j, v)| self.kernel[i.abs_diff(j)] * v)
                    .sum()
            })
            .collect())
    }
}

/// Low-pass filters raw grid samples; no normalization requirement.
pub fn filter_samples(values: &[f64], cutoff: f64, num_k: usize) -> Result<Vec<f64>> {
    FilterKernel::new(values.len(), cutoff, num_k)?.apply(values)
}

/// `P_K f` with the default `k` resolution.
pub fn lowpass(f: &GridFunction1D, cutoff: f64) -> Result<GridFunction1D> {
    lowpass_with(f, cutoff, default_k_points(cutoff))
}

pub fn lowpass_with(f: &GridFunction1D, cutoff: f64, num_k: usize) -> Result<GridFunction1D> {
    f.require_normalized()?;
    Ok(GridFunction1D::signed(filter_samples(
        f.values(),
        cutoff,
        num_k,
    )?))
}

/// `Q_K f = f - P_K f`.
pub fn highpass(f: &GridFunction1D, cutoff: f64) -> Result<GridFunction1D> {
    highpass_with(f, cutoff, default_k_points(cutoff))
}

pub fn highpass_with(f: &GridFunction1D, cutoff: f64, num_k: usize) -> Result<GridFunction1D> {
    let low = lowpass_with(f, cutoff, num_k)?;
    Ok(GridFunction1D::signed(
        f.values()
            .iter()
            .zip(low.values())
            .map(|(a, b)| a - b)
            .collect(),
    ))
}

/// Normalized L1 distance `∫_0^1 |f - g| dx` (the domain has unit length).
pub fn distance(f: &GridFunction1D, g: &GridFunction1D) -> Result<f64> {
    if f.num_points() != g.num_points() {
        return Err(Error::GridMismatch {
            left: f.num_points(),
            right: g.num_points(),
        });
    }
    let diff: Vec<f64> = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| (a - b).abs())
        .collect();
    quadrature::integrate(&diff, 0.0, 1.0)
}

/// Normalized L1 distance over the unit square.
pub fn distance_2d(f: &GridFunction2D, g: &GridFunction2D) -> Result<f64> {
    if f.points_per_axis() != g.points_per_axis() {
        return Err(Error::GridMismatch {
            left: f.points_per_axis(),
            right: g.points_per_axis(),
        });
    }
    let diff: Vec<f64> = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| (a - b).abs())
        .collect();
    Ok(integrate_2d(f.points_per_axis(), &diff))
}

/// `1/π · { M_0 K + M_1 K²/2! + … + M_{n-1} K^n/n! + R_n K^{n+1}/(n+1)! }`.
pub fn bound_value(gap: &MomentGap, cutoff: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for (j, m) in gap.gaps().iter().enumerate() {
        term *= cutoff / (j + 1) as f64;
        sum += m * term;
    }
    term *= cutoff / (gap.order() + 1) as f64;
    sum += gap.remainder() * term;
    sum / PI
}

/// Multivariate bound with per-axis cut-offs `K_i`:
/// `π^{-d} Σ_α C_α/(α+𝟙)! Π K_i^{α_i+1}` with `C_α = M_α` or `R_α`.
pub fn multi_bound_value(gap: &MultiMomentGap, cutoffs: &[f64]) -> Result<f64> {
    if cutoffs.len() != gap.dim() {
        return Err(Error::InvalidArgument(format!(
            "expected {} cut-offs, got {}",
            gap.dim(),
            cutoffs.len()
        )));
    }
    let sum: f64 = gap
        .gaps()
        .iter()
        .chain(gap.remainders())
        .map(|(alpha, c)| {
            let powers: f64 = alpha
                .0
                .iter()
                .zip(cutoffs)
                .map(|(&a, k)| k.powi(a as i32 + 1))
                .product();
            c * powers / alpha.shifted_factorial()
        })
        .sum();
    Ok(sum / PI.powi(gap.dim() as i32))
}

/// Box filter in two dimensions, applied as 1-D filters along each axis.
pub fn lowpass2d(f: &GridFunction2D, cutoffs: (f64, f64)) -> Result<GridFunction2D> {
    let num_k = (default_k_points(cutoffs.0), default_k_points(cutoffs.1));
    lowpass2d_with(f, cutoffs, num_k)
}

pub fn lowpass2d_with(
    f: &GridFunction2D,
    cutoffs: (f64, f64),
    num_k: (usize, usize),
) -> Result<GridFunction2D> {
    f.require_normalized()?;
    let n = f.points_per_axis();
    let first = FilterKernel::new(n, cutoffs.0, num_k.0)?;
    let second = FilterKernel::new(n, cutoffs.1, num_k.1)?;
    let mut values = f.values().to_vec();
    // Along x2 (contiguous rows), then along x1 (columns).
    for row in values.chunks_exact_mut(n) {
        let filtered = second.apply(row)?;
        row.copy_from_slice(&filtered);
    }
    for j in 0..n {
        let column: Vec<f64> = (0..n).map(|i| values[i * n + j]).collect();
        for (i, v) in first.apply(&column)?.into_iter().enumerate() {
            values[i * n + j] = v;
        }
    }
    Ok(GridFunction2D::signed(n, values))
}
