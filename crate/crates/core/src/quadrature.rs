//! Composite Simpson quadrature on uniform grids.
//!
//! Every integral in the crate goes through this module. Samples are
//! integrand values at `points` equally spaced nodes that include both
//! endpoints, so `points` must be odd and at least 3.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Quadrature rule and resolution for one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    points: usize,
}

impl QuadratureSpec {
    pub fn new(points: usize) -> Result<Self> {
        check_points(points)?;
        Ok(Self { points })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Node positions on `[lower, upper]`.
    pub fn nodes(&self, lower: f64, upper: f64) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| lower + (upper - lower) * (i as f64 / last))
            .collect()
    }

    /// Simpson weights `h/3 · [1, 4, 2, 4, …, 2, 4, 1]` on `[lower, upper]`.
    pub fn weights(&self, lower: f64, upper: f64) -> Vec<f64> {
        let h = (upper - lower) / (self.points - 1) as f64;
        let third = h / 3.0;
        (0..self.points)
            .map(|i| {
                if i == 0 || i == self.points - 1 {
                    third
                } else if i % 2 == 1 {
                    4.0 * third
                } else {
                    2.0 * third
                }
            })
            .collect()
    }
}

pub(crate) fn check_points(points: usize) -> Result<()> {
    if points < 3 || points.is_multiple_of(2) {
        return Err(Error::BadGrid { len: points });
    }
    Ok(())
}

/// Composite Simpson estimate of `∫_lower^upper s(x) dx` from uniform samples.
pub fn integrate(samples: &[f64], lower: f64, upper: f64) -> Result<f64> {
    check_points(samples.len())?;
    check_interval(lower, upper)?;
    Ok(simpson_sum(
        samples.iter().copied(),
        samples.len(),
        lower,
        upper,
    ))
}

/// Complex counterpart of [`integrate`]; real and imaginary parts are
/// integrated independently.
pub fn integrate_complex(samples: &[Complex64], lower: f64, upper: f64) -> Result<Complex64> {
    check_points(samples.len())?;
    check_interval(lower, upper)?;
    let re = simpson_sum(samples.iter().map(|z| z.re), samples.len(), lower, upper);
    let im = simpson_sum(samples.iter().map(|z| z.im), samples.len(), lower, upper);
    Ok(Complex64::new(re, im))
}

fn check_interval(lower: f64, upper: f64) -> Result<()> {
    if !(lower.is_finite() && upper.is_finite() && lower < upper) {
        return Err(Error::InvalidArgument(format!(
            "integration interval [{lower}, {upper}] is empty or not finite"
        )));
    }
    Ok(())
}

// Endpoints, odd nodes and even interior nodes are summed separately and
// combined once, which keeps the rounding independent of the weight pattern.
fn simpson_sum(samples: impl Iterator<Item = f64>, len: usize, lower: f64, upper: f64) -> f64 {
    let mut ends = 0.0;
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, s) in samples.enumerate() {
        if i == 0 || i == len - 1 {
            ends += s;
        } else if i % 2 == 1 {
            odd += s;
        } else {
            even += s;
        }
    }
    let h = (upper - lower) / (len - 1) as f64;
    h / 3.0 * (ends + 4.0 * odd + 2.0 * even)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        QuadratureSpec::new(n)
            .unwrap()
            .nodes(0.0, 1.0)
            .into_iter()
            .map(f)
            .collect()
    }

    #[test]
    fn exact_for_low_degree_polynomials() {
        assert!((integrate(&sample(101, |x| x), 0.0, 1.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((integrate(&sample(101, |x| x.powi(3)), 0.0, 1.0).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn full_periods_vanish() {
        let v = integrate(&sample(1001, |x| (10.0 * PI * x).cos()), 0.0, 1.0).unwrap();
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn rejects_even_or_short_grids() {
        assert_eq!(
            integrate(&[1.0, 2.0], 0.0, 1.0),
            Err(Error::BadGrid { len: 2 })
        );
        assert_eq!(
            integrate(&[1.0; 4], 0.0, 1.0),
            Err(Error::BadGrid { len: 4 })
        );
        assert!(QuadratureSpec::new(1).is_err());
        assert!(integrate(&[1.0; 3], 1.0, 1.0).is_err());
    }

    #[test]
    fn complex_examples() {
        let spec = QuadratureSpec::new(1001).unwrap();
        let nodes = spec.nodes(0.0, 1.0);
        let constant: Vec<_> = nodes.iter().map(|_| Complex64::new(1.0, 0.0)).collect();
        let one = integrate_complex(&constant, 0.0, 1.0).unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-14);

        let period: Vec<_> = nodes
            .iter()
            .map(|&x| Complex64::from_polar(1.0, 2.0 * PI * x))
            .collect();
        assert!(integrate_complex(&period, 0.0, 1.0).unwrap().norm() < 1e-10);

        let unit: Vec<_> = nodes
            .iter()
            .map(|&x| Complex64::from_polar(1.0, x))
            .collect();
        let expected = Complex64::new(1f64.sin(), 1.0 - 1f64.cos());
        assert!((integrate_complex(&unit, 0.0, 1.0).unwrap() - expected).norm() < 1e-10);
    }

    #[test]
    fn fourth_order_convergence() {
        let exact = 1f64.exp() - 1.0;
        let coarse = (integrate(&sample(11, f64::exp), 0.0, 1.0).unwrap() - exact).abs();
        let fine = (integrate(&sample(21, f64::exp), 0.0, 1.0).unwrap() - exact).abs();
        let ratio = coarse / fine;
        assert!((15.0..17.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn weights_match_integrate() {
        let spec = QuadratureSpec::new(7).unwrap();
        let w = spec.weights(0.0, 2.0);
        let s = [0.3, 1.0, -2.0, 4.0, 0.5, 0.25, 9.0];
        let direct: f64 = w.iter().zip(&s).map(|(a, b)| a * b).sum();
        assert!((direct - integrate(&s, 0.0, 2.0).unwrap()).abs() < 1e-13);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn linearity(
                u in prop::collection::vec(-10.0f64..10.0, 51),
                v in prop::collection::vec(-10.0f64..10.0, 51),
                a in -5.0f64..5.0,
                b in -5.0f64..5.0,
            ) {
                let combo: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
                let lhs = integrate(&combo, 0.0, 1.0).unwrap();
                let rhs = a * integrate(&u, 0.0, 1.0).unwrap() + b * integrate(&v, 0.0, 1.0).unwrap();
                prop_assert!((lhs - rhs).abs() < 1e-12);
            }
        }
    }
}
