//! Independent brute-force oracles. Nothing here calls into the crate's
//! quadrature or spectral code.

#![allow(dead_code)]

use std::f64::consts::PI;

pub const REFINED: usize = 16001;

/// Plain composite Simpson with explicit weights.
pub fn simpson(values: &[f64], lower: f64, upper: f64) -> f64 {
    let n = values.len();
    assert!(n % 2 == 1 && n >= 3);
    let h = (upper - lower) / (n - 1) as f64;
    let mut acc = 0.0;
    for (i, v) in values.iter().enumerate() {
        let w = if i == 0 || i == n - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * v;
    }
    acc * h / 3.0
}

pub fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// An analytic density on [0, 1], normalized on the refined grid.
#[derive(Clone)]
pub struct Analytic {
    pub name: String,
    shape: std::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    mass: f64,
}

impl Analytic {
    pub fn new(name: &str, shape: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let samples: Vec<f64> = grid(REFINED).iter().map(|&x| shape(x)).collect();
        let mass = simpson(&samples, 0.0, 1.0);
        Self {
            name: name.to_string(),
            shape: std::sync::Arc::new(shape),
            mass,
        }
    }

    pub fn normal(mu: f64, sigma: f64) -> Self {
        Self::new(&format!("normal({mu},{sigma})"), move |x| {
            (-(x - mu).powi(2) / (2.0 * sigma * sigma)).exp()
        })
    }

    pub fn uniform() -> Self {
        Self::new("uniform", |_| 1.0)
    }

    pub fn linear() -> Self {
        Self::new("2x", |x| 2.0 * x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.shape)(x) / self.mass
    }

    pub fn sample(&self, n: usize) -> Vec<f64> {
        grid(n).iter().map(|&x| self.eval(x)).collect()
    }

    pub fn moment(&self, k: i32) -> f64 {
        let v: Vec<f64> = grid(REFINED)
            .iter()
            .map(|&x| x.powi(k) * self.eval(x))
            .collect();
        simpson(&v, 0.0, 1.0)
    }
}

/// Refined-grid moments of gridded samples via linear interpolation.
pub fn refined_moment_of_samples(values: &[f64], k: i32) -> f64 {
    let n = values.len();
    let v: Vec<f64> = grid(REFINED)
        .iter()
        .map(|&x| x.powi(k) * interpolate(values, x))
        .collect();
    let _ = n;
    simpson(&v, 0.0, 1.0)
}

pub fn interpolate(values: &[f64], x: f64) -> f64 {
    let last = values.len() - 1;
    let pos = x * last as f64;
    let i = (pos.floor() as usize).min(last - 1);
    let t = pos - i as f64;
    values[i] * (1.0 - t) + values[i + 1] * t
}

/// Low-pass filter with the k-integral done in closed form:
/// `f<(x) = ∫_0^1 f(y) sin(K(x-y)) / (π (x-y)) dy`, y on `y_points` nodes.
pub fn dirichlet_filter(f: impl Fn(f64) -> f64, cutoff: f64, x: f64, y_points: usize) -> f64 {
    let v: Vec<f64> = grid(y_points)
        .iter()
        .map(|&y| {
            let d = x - y;
            let kernel = if d.abs() < 1e-12 {
                cutoff / PI
            } else {
                (cutoff * d).sin() / (PI * d)
            };
            f(y) * kernel
        })
        .collect();
    simpson(&v, 0.0, 1.0)
}

/// Alternating Taylor series of erf, summed to convergence.
pub fn erf_taylor(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = x;
    let mut fact = 1.0;
    for n in 0..200 {
        if n > 0 {
            fact *= n as f64;
            power *= -x * x;
        }
        let term = power / (fact * (2 * n + 1) as f64);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    2.0 / PI.sqrt() * sum
}
