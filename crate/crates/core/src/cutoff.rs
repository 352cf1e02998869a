//! The cut-off polynomial and its unique positive root.
//!
//! ```text
//! p(K) = 1/π { M_0 K + M_1 K²/2! + … + M_{n-1} K^n/n! + R_n K^{n+1}/(n+1)! } - ε
//! ```
//!
//! All non-constant coefficients are non-negative and the constant is
//! `-ε < 0`, so the coefficient sequence has exactly one sign change and
//! `p` is strictly increasing on `K > 0` whenever any coefficient is
//! positive. The root is found by bracket doubling followed by bisection.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{factorial, Cutoff, MomentGap, MultiMomentGap};

/// Residual accepted at the root, relative to `ε`.
pub const ROOT_TOLERANCE: f64 = 1e-12;

/// `p(K) = Σ_j c_j K^j - ε` for `j = 1 … degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffPolynomial {
    // coefficients[j] multiplies K^{j+1}
    coefficients: Vec<f64>,
    epsilon: f64,
}

impl CutoffPolynomial {
    pub fn new(coefficients: Vec<f64>, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if let Some(c) = coefficients.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "coefficient {c} must be finite and non-negative"
            )));
        }
        Ok(Self {
            coefficients,
            epsilon,
        })
    }

    /// Coefficients of `K^1 … K^degree`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0.0)
    }

    /// `Σ c_j K^j` without the constant term.
    pub fn bound(&self, k: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| (acc + c) * k)
    }

    /// `p(K)`.
    pub fn evaluate(&self, k: f64) -> f64 {
        self.bound(k) - self.epsilon
    }

    /// Sign changes in `(-ε, c_1, …, c_degree)`, zeros skipped.
    pub fn sign_changes(&self) -> usize {
        let signs = std::iter::once(-self.epsilon)
            .chain(self.coefficients.iter().copied())
            .filter(|c| *c != 0.0)
            .map(f64::is_sign_positive);
        let mut changes = 0;
        let mut prev = None;
        for s in signs {
            if prev.is_some_and(|p| p != s) {
                changes += 1;
            }
            prev = Some(s);
        }
        changes
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::BadTolerance { epsilon });
    }
    Ok(())
}

/// Polynomial of degree `n + 1` from the moment gaps and tolerance.
pub fn build_polynomial(gap: &MomentGap, epsilon: f64) -> Result<CutoffPolynomial> {
    check_epsilon(epsilon)?;
    let coefficients = gap
        .gaps()
        .iter()
        .chain(std::iter::once(&gap.remainder()))
        .enumerate()
        .map(|(j, m)| m / factorial(j + 1) / PI)
        .collect();
    CutoffPolynomial::new(coefficients, epsilon)
}

/// Common cut-off `κ` for all axes in `d` dimensions:
/// `(κ^d / π^d) Σ_{j=0}^{n} a_j κ^j = ε`, with `a_j = Σ_{|α|=j} M_α/(α+𝟙)!`
/// for `j < n` and `a_n = Σ_{|α|=n} R_α/(α+𝟙)!`. The result is an ordinary
/// [`CutoffPolynomial`] of degree `n + d` whose first `d - 1` coefficients vanish.
pub fn build_common_cutoff_equation(
    gap: &MultiMomentGap,
    epsilon: f64,
    dim: usize,
) -> Result<CutoffPolynomial> {
    check_epsilon(epsilon)?;
    if dim == 0 || dim != gap.dim() {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} does not match gap dimension {}",
            gap.dim()
        )));
    }
    let n = gap.order();
    let mut grouped = vec![0.0; n + 1];
    for (alpha, m) in gap.gaps().iter().chain(gap.remainders()) {
        grouped[alpha.total()] += m / alpha.shifted_factorial();
    }
    let scale = PI.powi(dim as i32);
    let mut coefficients = vec![0.0; dim - 1];
    coefficients.extend(grouped.into_iter().map(|a| a / scale));
    CutoffPolynomial::new(coefficients, epsilon)
}

/// The unique positive root, or [`Cutoff::Unbounded`] when every
/// coefficient is zero.
pub fn solve_unique_root(poly: &CutoffPolynomial) -> Cutoff {
    if poly.is_degenerate() {
        return Cutoff::Unbounded;
    }
    let tol = ROOT_TOLERANCE * poly.epsilon;
    let mut lo = 0.0;
    let mut hi = 1.0;
    while poly.evaluate(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let mut best = hi;
    let mut best_residual = poly.evaluate(hi).abs();
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let p = poly.evaluate(mid);
        if p.abs() < best_residual {
            best = mid;
            best_residual = p.abs();
        }
        if p.abs() <= tol {
            break;
        }
        if p < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Cutoff::Finite(best)
}

/// Convenience: solves the common-cut-off equation and returns `κ`.
pub fn common_cutoff(gap: &MultiMomentGap, epsilon: f64) -> Result<Cutoff> {
    Ok(solve_unique_root(&build_common_cutoff_equation(
        gap,
        epsilon,
        gap.dim(),
    )?))
}
