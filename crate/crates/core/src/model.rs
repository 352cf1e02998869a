//! Gridded densities, moment containers and the comparison report.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureSpec};

/// Tolerance on the mass of a density flagged as normalized.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Masses at or below this are treated as an all-zero input.
const ZERO_MASS: f64 = 1e-12;

/// A function on `[0, 1]` sampled at `num_points` uniform nodes (odd, ≥ 3).
///
/// Densities built with [`GridFunction1D::new`] are non-negative. Filtered
/// functions produced by the spectral module may dip slightly below zero
/// and are never flagged as normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction1D {
    values: Vec<f64>,
    normalized: bool,
}

impl GridFunction1D {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        quadrature::check_points(values.len())?;
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidSample { index, value });
        }
        Ok(Self {
            values,
            normalized: false,
        })
    }

    /// Samples `f` at the grid nodes.
    pub fn from_fn(num_points: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        quadrature::check_points(num_points)?;
        Self::new(unit_nodes(num_points).map(f).collect())
    }

    /// The uniform density on `[0, 1]`.
    pub fn uniform(num_points: usize) -> Result<Self> {
        Self::from_fn(num_points, |_| 1.0)?.normalize()
    }

    /// Values that may be signed, e.g. the output of a filter.
    pub(crate) fn signed(values: Vec<f64>) -> Self {
        debug_assert!(values.len() >= 3 && values.len() % 2 == 1);
        Self {
            values,
            normalized: false,
        }
    }

    pub fn num_points(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn step(&self) -> f64 {
        1.0 / (self.values.len() - 1) as f64
    }

    /// Grid node positions `i / (N - 1)`.
    pub fn nodes(&self) -> impl Iterator<Item = f64> {
        unit_nodes(self.values.len())
    }

    pub fn mass(&self) -> f64 {
        quadrature::integrate(&self.values, 0.0, 1.0).expect("grid validated at construction")
    }

    /// Rescales to unit mass.
    pub fn normalize(&self) -> Result<Self> {
        let mass = self.mass();
        if mass.is_nan() || mass <= ZERO_MASS {
            return Err(Error::ZeroMass { mass });
        }
        let values = self.values.iter().map(|v| v / mass).collect();
        Ok(Self {
            values,
            normalized: true,
        })
    }

    /// Linear interpolation between neighbouring nodes; exact at nodes.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::DomainError { x });
        }
        let last = self.values.len() - 1;
        let pos = x * last as f64;
        let nearest = pos.round();
        // Node positions i/(N-1) do not always scale back to exact integers.
        if (pos - nearest).abs() <= 4.0 * f64::EPSILON * last as f64 {
            return Ok(self.values[nearest as usize]);
        }
        let i = pos.floor() as usize;
        let t = pos - i as f64;
        Ok(self.values[i] * (1.0 - t) + self.values[i + 1] * t)
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::NotNormalized)
        }
    }
}

pub(crate) fn unit_nodes(num_points: usize) -> impl Iterator<Item = f64> {
    let last = (num_points - 1) as f64;
    (0..num_points).map(move |i| i as f64 / last)
}

/// A function on `[0, 1]²` sampled on a uniform `n × n` grid, row-major with
/// the first coordinate as the row index: `values[i * n + j] = f(x1_i, x2_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction2D {
    points_per_axis: usize,
    values: Vec<f64>,
    normalized: bool,
}

impl GridFunction2D {
    pub fn new(points_per_axis: usize, values: Vec<f64>) -> Result<Self> {
        quadrature::check_points(points_per_axis)?;
        if values.len() != points_per_axis * points_per_axis {
            return Err(Error::GridMismatch {
                left: points_per_axis * points_per_axis,
                right: values.len(),
            });
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidSample { index, value });
        }
        Ok(Self {
            points_per_axis,
            values,
            normalized: false,
        })
    }

    pub fn from_fn(points_per_axis: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        quadrature::check_points(points_per_axis)?;
        let nodes: Vec<f64> = unit_nodes(points_per_axis).collect();
        let values = nodes
            .iter()
            .flat_map(|&x1| nodes.iter().map(move |&x2| (x1, x2)))
            .map(|(x1, x2)| f(x1, x2))
            .collect();
        Self::new(points_per_axis, values)
    }

    /// Tensor product `f(x1) · g(x2)` of two 1-D grids of equal size.
    pub fn product(f: &GridFunction1D, g: &GridFunction1D) -> Result<Self> {
        if f.num_points() != g.num_points() {
            return Err(Error::GridMismatch {
                left: f.num_points(),
                right: g.num_points(),
            });
        }
        let values = f
            .values()
            .iter()
            .flat_map(|a| g.values().iter().map(move |b| a * b))
            .collect();
        let mut out = Self::new(f.num_points(), values)?;
        if f.is_normalized() && g.is_normalized() {
            out.normalized = (out.mass() - 1.0).abs() <= MASS_TOLERANCE;
        }
        Ok(out)
    }

    pub(crate) fn signed(points_per_axis: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), points_per_axis * points_per_axis);
        Self {
            points_per_axis,
            values,
            normalized: false,
        }
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.points_per_axis + j]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> {
        unit_nodes(self.points_per_axis)
    }

    pub fn mass(&self) -> f64 {
        integrate_2d(self.points_per_axis, &self.values)
    }

    pub fn normalize(&self) -> Result<Self> {
        let mass = self.mass();
        if mass.is_nan() || mass <= ZERO_MASS {
            return Err(Error::ZeroMass { mass });
        }
        Ok(Self {
            points_per_axis: self.points_per_axis,
            values: self.values.iter().map(|v| v / mass).collect(),
            normalized: true,
        })
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::NotNormalized)
        }
    }
}

/// Tensor-product Simpson over `[0, 1]²` for row-major samples.
pub(crate) fn integrate_2d(n: usize, values: &[f64]) -> f64 {
    let w = QuadratureSpec::new(n)
        .expect("grid validated at construction")
        .weights(0.0, 1.0);
    values
        .chunks_exact(n)
        .zip(&w)
        .map(|(row, wi)| wi * row.iter().zip(&w).map(|(v, wj)| v * wj).sum::<f64>())
        .sum()
}

/// Moments `⟨x^0⟩, …, ⟨x^{n-1}⟩` of one density on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    values: Vec<f64>,
}

impl MomentSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument(
                "a moment set needs at least one moment".into(),
            ));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("moment {v} is not finite")));
        }
        Ok(Self { values })
    }

    /// Number of known moments `n`.
    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        self.values.get(k).copied()
    }

    /// `⟨x^{n-1}⟩`, the highest known moment.
    pub fn highest(&self) -> f64 {
        *self.values.last().expect("non-empty by construction")
    }

    /// Moments of a density on `[0, 1]` never increase with the order.
    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0]) && self.values.iter().all(|&v| v >= 0.0)
    }
}

/// Exponent tuple `α = (α_1, …, α_d)` of a mixed moment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α|`.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// `(α + 𝟙)! = Π (α_i + 1)!`.
    pub fn shifted_factorial(&self) -> f64 {
        self.0.iter().map(|&a| factorial(a + 1)).product()
    }

    /// Indices obtained by lowering one non-zero component by one.
    pub fn reductions(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .map(|(i, _)| {
                let mut lowered = self.0.clone();
                lowered[i] -= 1;
                MultiIndex(lowered)
            })
    }

    /// All indices in `dim` dimensions with `|α| = total`.
    pub fn with_total(dim: usize, total: usize) -> Vec<MultiIndex> {
        fn fill(dim: usize, remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == dim {
                prefix.push(remaining);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for head in (0..=remaining).rev() {
                prefix.push(head);
                fill(dim, remaining - head, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if dim > 0 {
            fill(dim, total, &mut Vec::with_capacity(dim), &mut out);
        }
        out
    }

    /// All indices with `|α| ≤ max_total`.
    pub fn up_to(dim: usize, max_total: usize) -> Vec<MultiIndex> {
        (0..=max_total)
            .flat_map(|t| Self::with_total(dim, t))
            .collect()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Mixed moments `⟨x^α⟩` for every `|α| ≤ n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiMomentSet {
    order: usize,
    dim: usize,
    entries: BTreeMap<MultiIndex, f64>,
}

impl MultiMomentSet {
    /// `entries` must contain exactly the indices of [`MultiIndex::up_to`]`(dim, order - 1)`.
    pub fn new(order: usize, dim: usize, entries: BTreeMap<MultiIndex, f64>) -> Result<Self> {
        if order == 0 || dim == 0 {
            return Err(Error::InvalidArgument(
                "order and dimension must be positive".into(),
            ));
        }
        let expected = MultiIndex::up_to(dim, order - 1);
        if expected.len() != entries.len() || expected.iter().any(|a| !entries.contains_key(a)) {
            return Err(Error::InvalidArgument(format!(
                "expected the {} multi-indices with |α| ≤ {}",
                expected.len(),
                order - 1
            )));
        }
        Ok(Self {
            order,
            dim,
            entries,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, alpha: &MultiIndex) -> Option<f64> {
        self.entries.get(alpha).copied()
    }

    pub fn entries(&self) -> &BTreeMap<MultiIndex, f64> {
        &self.entries
    }
}

/// Which estimator produced the remainder bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyTag {
    Holder,
    Bounded,
    #[serde(rename = "abscont")]
    AbsContinuous,
    Ibp,
    /// Gaps and remainder supplied directly by the user.
    User,
}

impl fmt::Display for StrategyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StrategyTag::Holder => "holder",
            StrategyTag::Bounded => "bounded",
            StrategyTag::AbsContinuous => "abscont",
            StrategyTag::Ibp => "ibp",
            StrategyTag::User => "user",
        };
        f.write_str(s)
    }
}

/// Largest admissible moment gap. Moments of densities on `[0, 1]` lie in
/// `[0, 1]`; the extra room covers user-supplied slack.
pub const MAX_GAP: f64 = 2.0;

/// Bounds `M_0 … M_{n-1}` on the moment differences and the remainder
/// bound `R_n` on `⟨x^n⟩_f + ⟨x^n⟩_g`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentGap {
    gaps: Vec<f64>,
    remainder: f64,
    strategy: StrategyTag,
}

impl MomentGap {
    pub fn new(gaps: Vec<f64>, remainder: f64, strategy: StrategyTag) -> Result<Self> {
        if gaps.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one moment gap is required".into(),
            ));
        }
        if let Some(g) = gaps
            .iter()
            .find(|g| !g.is_finite() || **g < 0.0 || **g > MAX_GAP)
        {
            return Err(Error::InvalidArgument(format!(
                "moment gap {g} outside [0, {MAX_GAP}]"
            )));
        }
        if !remainder.is_finite() || remainder < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "remainder {remainder} must be finite and non-negative"
            )));
        }
        Ok(Self {
            gaps,
            remainder,
            strategy,
        })
    }

    pub fn order(&self) -> usize {
        self.gaps.len()
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn remainder(&self) -> f64 {
        self.remainder
    }

    pub fn strategy(&self) -> StrategyTag {
        self.strategy
    }
}

/// Gaps `M_α` for `|α| ≤ n - 1` and remainders `R_α` for `|α| = n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiMomentGap {
    pub(crate) order: usize,
    pub(crate) dim: usize,
    pub(crate) gaps: BTreeMap<MultiIndex, f64>,
    pub(crate) remainders: BTreeMap<MultiIndex, f64>,
}

impl MultiMomentGap {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gaps(&self) -> &BTreeMap<MultiIndex, f64> {
        &self.gaps
    }

    pub fn remainders(&self) -> &BTreeMap<MultiIndex, f64> {
        &self.remainders
    }
}

/// Affine map `x ↦ (x - a) / (b - a)` from a support `[a, b]` to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub a: f64,
    pub b: f64,
}

impl AffineMap {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidArgument(format!(
                "degenerate domain [{a}, {b}]"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn identity() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn apply(&self, x: f64) -> f64 {
        (x - self.a) / (self.b - self.a)
    }

    pub fn invert(&self, u: f64) -> f64 {
        self.a + u * (self.b - self.a)
    }
}

/// Cut-off inverse length scale. `Unbounded` means the bound polynomial
/// is identically `-ε`: the moment data certify similarity at every scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    Finite(f64),
    Unbounded,
}

impl Cutoff {
    pub fn value(&self) -> Option<f64> {
        match self {
            Cutoff::Finite(k) => Some(*k),
            Cutoff::Unbounded => None,
        }
    }
}

impl Serialize for Cutoff {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cutoff::Finite(k) => serializer.serialize_f64(*k),
            Cutoff::Unbounded => serializer.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Cutoff {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct CutoffVisitor;

        impl Visitor<'_> for CutoffVisitor {
            type Value = Cutoff;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or the string \"unbounded\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Cutoff, E> {
                Ok(Cutoff::Finite(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Cutoff, E> {
                Ok(Cutoff::Finite(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Cutoff, E> {
                Ok(Cutoff::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Cutoff, E> {
                if v == "unbounded" {
                    Ok(Cutoff::Unbounded)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        deserializer.deserialize_any(CutoffVisitor)
    }
}

/// End-to-end result of one comparison.
///
/// Field names are the JSON keys of the emitted report. Distances are
/// absent when no densities were filtered (cut-off only runs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub n: usize,
    pub epsilon: f64,
    pub gaps: Vec<f64>,
    pub remainder: f64,
    pub strategy: StrategyTag,
    pub cutoff: Cutoff,
    pub distance_original: Option<f64>,
    pub distance_smoothed: Option<f64>,
    #[serde(rename = "bound_at_K")]
    pub bound_at_k: f64,
    pub domain_map: Option<AffineMap>,
    pub metadata: BTreeMap<String, serde_json::Value>,
}
