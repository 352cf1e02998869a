//! Moments of gridded densities and datasets, moment gaps, and bounds on
//! the first unknown moment.
//!
//! With `n` known moments `⟨x^0⟩ … ⟨x^{n-1}⟩`, the cut-off bound needs an
//! upper bound on `⟨x^n⟩` for each density. Four estimators are offered:
//!
//! * **Hölder**: `⟨x^n⟩ ≤ ⟨x^{n-1}⟩`, needs nothing beyond the moments.
//! * **Bounded**: for `f ∈ L^∞`, Cauchy–Schwarz gives
//!   `⟨x^n⟩ ≤ sqrt(‖f‖_∞ ⟨x^{2m}⟩ / (2(n-m)+1))`.
//! * **Absolutely continuous**: `‖f‖_∞ ≤ |f(a)| + ‖f'‖_{L¹}` feeds the
//!   bounded estimator.
//! * **Integration by parts**: from `f(1)`, `f'(1)` and `‖f''‖_∞`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{
    integrate_2d, unit_nodes, GridFunction1D, GridFunction2D, MomentGap, MomentSet, MultiIndex,
    MultiMomentGap, MultiMomentSet, StrategyTag,
};
use crate::quadrature;

/// Which power of `m` the bounded estimator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MomentChoice {
    /// Smallest bound over every feasible `m`.
    #[default]
    Auto,
    Fixed(usize),
}

/// Estimator for the unknown moment `⟨x^n⟩` of one density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RemainderStrategy {
    Holder,
    Bounded {
        sup_norm: f64,
        m: MomentChoice,
    },
    AbsContinuous {
        anchor_value: f64,
        derivative_l1: f64,
    },
    Ibp {
        f_at_1: f64,
        fprime_at_1: f64,
        sup_f2: f64,
    },
}

impl RemainderStrategy {
    pub fn tag(&self) -> StrategyTag {
        match self {
            RemainderStrategy::Holder => StrategyTag::Holder,
            RemainderStrategy::Bounded { .. } => StrategyTag::Bounded,
            RemainderStrategy::AbsContinuous { .. } => StrategyTag::AbsContinuous,
            RemainderStrategy::Ibp { .. } => StrategyTag::Ibp,
        }
    }

    /// Upper bound on `⟨x^n⟩` where `n = moments.order()`.
    pub fn bound(&self, moments: &MomentSet) -> Result<f64> {
        let n = moments.order();
        match *self {
            RemainderStrategy::Holder => Ok(moments.highest()),
            RemainderStrategy::Bounded { sup_norm, m } => match m {
                MomentChoice::Auto => remainder_bounded_auto(moments, sup_norm, n),
                MomentChoice::Fixed(m) => remainder_bounded(moments, sup_norm, n, m),
            },
            RemainderStrategy::AbsContinuous {
                anchor_value,
                derivative_l1,
            } => {
                let sup = sup_norm_abs_continuous(anchor_value, derivative_l1)?;
                remainder_bounded_auto(moments, sup, n)
            }
            RemainderStrategy::Ibp {
                f_at_1,
                fprime_at_1,
                sup_f2,
            } => remainder_ibp(f_at_1, fprime_at_1, sup_f2, n),
        }
    }

    /// Builds the strategy of kind `tag` with a-priori data read off a grid:
    /// the grid maximum, the total variation, and one-sided differences at
    /// `x = 1`. The grid values stand in for information a user would
    /// otherwise supply.
    pub fn estimate_from_grid(tag: StrategyTag, f: &GridFunction1D) -> Result<Self> {
        let v = f.values();
        let h = f.step();
        let last = v.len() - 1;
        Ok(match tag {
            StrategyTag::Holder => RemainderStrategy::Holder,
            StrategyTag::Bounded => RemainderStrategy::Bounded {
                sup_norm: v.iter().copied().fold(1.0, f64::max),
                m: MomentChoice::Auto,
            },
            StrategyTag::AbsContinuous => RemainderStrategy::AbsContinuous {
                anchor_value: v[last / 2],
                derivative_l1: total_variation(v),
            },
            StrategyTag::Ibp => {
                let fprime = if v.len() >= 3 {
                    (3.0 * v[last] - 4.0 * v[last - 1] + v[last - 2]) / (2.0 * h)
                } else {
                    (v[last] - v[last - 1]) / h
                };
                let sup_f2 = v
                    .windows(3)
                    .map(|w| ((w[0] - 2.0 * w[1] + w[2]) / (h * h)).abs())
                    .fold(0.0, f64::max);
                RemainderStrategy::Ibp {
                    f_at_1: v[last],
                    fprime_at_1: fprime,
                    sup_f2,
                }
            }
            StrategyTag::User => {
                return Err(Error::InvalidArgument(
                    "user-supplied gaps have no grid estimator".into(),
                ))
            }
        })
    }
}

/// `Σ |f_{i+1} - f_i|`, the exact `‖f'‖_{L¹}` of the piecewise-linear interpolant.
pub fn total_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Moments `⟨x^k⟩ = ∫ x^k f(x) dx` for `k = 0 … n-1`.
pub fn compute_moments(f: &GridFunction1D, n: usize) -> Result<MomentSet> {
    f.require_normalized()?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut weighted = f.values().to_vec();
    let nodes: Vec<f64> = f.nodes().collect();
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        if k > 0 {
            // x^k f built by repeated multiplication; x ≤ 1 keeps it monotone in k.
            weighted.iter_mut().zip(&nodes).for_each(|(w, x)| *w *= x);
        }
        values.push(quadrature::integrate(&weighted, 0.0, 1.0)?);
    }
    MomentSet::new(values)
}

/// Sample moments `(1/N) Σ x_i^k` for `k = 0 … n-1`.
pub fn empirical_moments(samples: &[f64], n: usize) -> Result<MomentSet> {
    check_samples(samples)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let count = samples.len() as f64;
    let mut sums = vec![0.0; n];
    for &x in samples {
        let mut p = 1.0;
        for s in sums.iter_mut() {
            *s += p;
            p *= x;
        }
    }
    let mut values: Vec<f64> = sums.into_iter().map(|s| s / count).collect();
    values[0] = 1.0;
    MomentSet::new(values)
}

/// Standard errors `sqrt(Var(x^k) / N)` of the sample moments.
pub fn empirical_standard_errors(samples: &[f64], n: usize) -> Result<Vec<f64>> {
    let means = empirical_moments(samples, n)?;
    let count = samples.len() as f64;
    Ok(means
        .values()
        .iter()
        .enumerate()
        .map(|(k, mean)| {
            let var = samples
                .iter()
                .map(|x| (x.powi(k as i32) - mean).powi(2))
                .sum::<f64>()
                / count;
            (var / count).sqrt()
        })
        .collect())
}

fn check_samples(samples: &[f64]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::EmptyData);
    }
    if let Some((index, &value)) = samples
        .iter()
        .enumerate()
        .find(|(_, x)| !(0.0..=1.0).contains(*x))
    {
        return Err(Error::OutOfDomain { index, value });
    }
    Ok(())
}

/// Gaps `|⟨x^k⟩_f - ⟨x^k⟩_g|` and remainder from one strategy applied to both densities.
pub fn moment_gap(
    mf: &MomentSet,
    mg: &MomentSet,
    strategy: &RemainderStrategy,
) -> Result<MomentGap> {
    moment_gap_with(mf, mg, strategy, strategy)
}

/// As [`moment_gap`], with separate a-priori information for each density.
/// Both strategies must be of the same kind.
pub fn moment_gap_with(
    mf: &MomentSet,
    mg: &MomentSet,
    strategy_f: &RemainderStrategy,
    strategy_g: &RemainderStrategy,
) -> Result<MomentGap> {
    if mf.order() != mg.order() {
        return Err(Error::OrderMismatch {
            left: mf.order(),
            right: mg.order(),
        });
    }
    if strategy_f.tag() != strategy_g.tag() {
        return Err(Error::InvalidArgument(format!(
            "remainder strategies differ: {} vs {}",
            strategy_f.tag(),
            strategy_g.tag()
        )));
    }
    let gaps = mf
        .values()
        .iter()
        .zip(mg.values())
        .map(|(a, b)| (a - b).abs())
        .collect();
    let remainder = strategy_f.bound(mf)? + strategy_g.bound(mg)?;
    MomentGap::new(gaps, remainder, strategy_f.tag())
}

/// Adds `z · sqrt(se_f² + se_g²)` to every gap.
pub fn inflate_gaps(gap: &MomentGap, se_f: &[f64], se_g: &[f64], z: f64) -> Result<MomentGap> {
    if se_f.len() != gap.order() || se_g.len() != gap.order() {
        return Err(Error::OrderMismatch {
            left: gap.order(),
            right: se_f.len().min(se_g.len()),
        });
    }
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "inflation factor {z} must be non-negative"
        )));
    }
    let gaps = gap
        .gaps()
        .iter()
        .zip(se_f.iter().zip(se_g))
        .map(|(m, (a, b))| m + z * a.hypot(*b))
        .collect();
    MomentGap::new(gaps, gap.remainder(), gap.strategy())
}

/// Bound on `⟨x^n⟩` for a density with sup norm at most `sup_norm`:
/// `sqrt(sup_norm · ⟨x^{2m}⟩ / (2(n-m)+1))`.
///
/// For even `n` and `m = n/2` the unknown moment appears on both sides and
/// the bound collapses to `sup_norm / (n+1)`, which needs no moment at all.
pub fn remainder_bounded(moments: &MomentSet, sup_norm: f64, n: usize, m: usize) -> Result<f64> {
    if !(sup_norm.is_finite() && sup_norm >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "sup norm {sup_norm} of a unit-mass density on [0, 1] must be at least 1"
        )));
    }
    if m >= n {
        return Err(Error::InvalidArgument(format!(
            "need m < n, got m = {m}, n = {n}"
        )));
    }
    if n.is_multiple_of(2) && 2 * m == n {
        return Ok(sup_norm / (n + 1) as f64);
    }
    let moment = if m == 0 {
        1.0
    } else {
        moments.get(2 * m).ok_or(Error::InsufficientMoments {
            needed: 2 * m,
            available: moments.order(),
        })?
    };
    Ok((sup_norm * moment / (2 * (n - m) + 1) as f64).sqrt())
}

/// [`remainder_bounded`] minimized over every `m` whose moment is available.
pub fn remainder_bounded_auto(moments: &MomentSet, sup_norm: f64, n: usize) -> Result<f64> {
    let mut best = remainder_bounded(moments, sup_norm, n, 0)?;
    for m in 1..n {
        match remainder_bounded(moments, sup_norm, n, m) {
            Ok(b) => best = best.min(b),
            Err(Error::InsufficientMoments { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}

/// `‖f‖_∞ ≤ |f(a)| + ‖f'‖_{L¹}` for an absolutely continuous density.
pub fn sup_norm_abs_continuous(anchor_value: f64, derivative_l1: f64) -> Result<f64> {
    if !(anchor_value.is_finite() && anchor_value >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "anchor value {anchor_value} must be ≥ 0"
        )));
    }
    if !(derivative_l1.is_finite() && derivative_l1 >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "derivative L1 norm {derivative_l1} must be ≥ 0"
        )));
    }
    Ok(anchor_value + derivative_l1)
}

/// `f(1)/(n+1) - f'(1)/((n+1)(n+2)) + ‖f''‖_∞/((n+1)(n+2)(n+3))`.
pub fn remainder_ibp(f_at_1: f64, fprime_at_1: f64, sup_f2: f64, n: usize) -> Result<f64> {
    if !(sup_f2.is_finite() && sup_f2 >= 0.0) || !f_at_1.is_finite() || !fprime_at_1.is_finite() {
        return Err(Error::InvalidArgument(
            "boundary data must be finite with ‖f''‖ ≥ 0".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let a = (n + 1) as f64;
    let b = a * (n + 2) as f64;
    let c = b * (n + 3) as f64;
    let value = f_at_1 / a - fprime_at_1 / b + sup_f2 / c;
    if value < 0.0 {
        return Err(Error::NegativeBound { value });
    }
    Ok(value)
}

/// Mixed moments `⟨x_1^{α_1} x_2^{α_2}⟩` for all `|α| ≤ n - 1`.
pub fn multi_moments(f: &GridFunction2D, n: usize) -> Result<MultiMomentSet> {
    f.require_normalized()?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let size = f.points_per_axis();
    let nodes: Vec<f64> = unit_nodes(size).collect();
    let mut entries = BTreeMap::new();
    for alpha in MultiIndex::up_to(2, n - 1) {
        let (p, q) = (alpha.0[0] as i32, alpha.0[1] as i32);
        let weighted: Vec<f64> = f
            .values()
            .iter()
            .enumerate()
            .map(|(idx, v)| v * nodes[idx / size].powi(p) * nodes[idx % size].powi(q))
            .collect();
        entries.insert(alpha, integrate_2d(size, &weighted));
    }
    MultiMomentSet::new(n, 2, entries)
}

/// Gaps `M_α` for `|α| ≤ n - 1` and remainders `R_α` for `|α| = n`.
///
/// Each density independently takes its smallest available bound
/// `⟨x^β⟩` over the single-component reductions `β` of `α`.
pub fn multi_moment_gap(mf: &MultiMomentSet, mg: &MultiMomentSet) -> Result<MultiMomentGap> {
    if mf.order() != mg.order() {
        return Err(Error::OrderMismatch {
            left: mf.order(),
            right: mg.order(),
        });
    }
    if mf.dim() != mg.dim() {
        return Err(Error::InvalidArgument(format!(
            "dimensions differ: {} vs {}",
            mf.dim(),
            mg.dim()
        )));
    }
    let gaps = mf
        .entries()
        .iter()
        .map(|(alpha, a)| (alpha.clone(), (a - mg.get(alpha).unwrap_or(0.0)).abs()))
        .collect();
    let smallest = |set: &MultiMomentSet, alpha: &MultiIndex| {
        alpha
            .reductions()
            .filter_map(|beta| set.get(&beta))
            .fold(f64::INFINITY, f64::min)
    };
    let remainders = MultiIndex::with_total(mf.dim(), mf.order())
        .into_iter()
        .map(|alpha| {
            let r = smallest(mf, &alpha) + smallest(mg, &alpha);
            (alpha, r)
        })
        .collect();
    Ok(MultiMomentGap {
        order: mf.order(),
        dim: mf.dim(),
        gaps,
        remainders,
    })
}
