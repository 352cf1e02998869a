//! Run configuration, density generators and a-priori information.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use momcut::generators::{
    scale_separated_pdf, truncated_normal, SpectrumSpec, TruncatedNormalSpec,
};
use momcut::moments::{MomentChoice, RemainderStrategy};
use momcut::{GridFunction1D, GridFunction2D, StrategyTag};
use serde_json::{json, Value};

use crate::error::{CliError, Result};

pub const DEFAULT_N: usize = 3;
pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_GRID: usize = 1001;
pub const DEFAULT_GRID_2D: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    ComparePdf,
    CompareData,
    CompareMixed,
    CutoffOnly,
    GenSpectrum,
    Compare2d,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::ComparePdf => "compare-pdf",
            Subcommand::CompareData => "compare-data",
            Subcommand::CompareMixed => "compare-mixed",
            Subcommand::CutoffOnly => "cutoff-only",
            Subcommand::GenSpectrum => "gen-spectrum",
            Subcommand::Compare2d => "compare-2d",
        }
    }
}

/// Shape of the random spectra used by `spectrum` generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    pub modes: usize,
    pub zero_band: Option<(usize, usize)>,
    pub margin: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            modes: 64,
            zero_band: Some((17, 48)),
            margin: 0.05,
        }
    }
}

impl SpectrumOptions {
    pub fn spec(&self, seed: u64) -> SpectrumSpec {
        SpectrumSpec {
            seed,
            num_modes: self.modes,
            zero_band: self.zero_band,
            margin: self.margin,
        }
    }
}

/// A value given once for both densities, or as `f,g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerDensity {
    pub f: f64,
    pub g: f64,
}

impl FromStr for PerDensity {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let parts = parse_reals(s)?;
        match parts[..] {
            [v] => Ok(Self { f: v, g: v }),
            [f, g] => Ok(Self { f, g }),
            _ => Err(CliError::Config(format!(
                "expected `v` or `vf,vg`, got {s:?}"
            ))),
        }
    }
}

/// A-priori information for the bounded, abscont and ibp strategies.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Priors {
    pub sup_norm: Option<PerDensity>,
    pub bounded_m: Option<usize>,
    pub anchor: Option<PerDensity>,
    pub deriv_l1: Option<PerDensity>,
    pub f_at_1: Option<PerDensity>,
    pub fprime_at_1: Option<PerDensity>,
    pub sup_f2: Option<PerDensity>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    F,
    G,
}

impl Priors {
    /// Strategy for one density. Missing values are read off `grid` when
    /// one is available and are an error otherwise.
    pub(crate) fn strategy(
        &self,
        tag: StrategyTag,
        side: Side,
        grid: Option<&GridFunction1D>,
    ) -> Result<RemainderStrategy> {
        let pick = |v: Option<PerDensity>| {
            v.map(|p| match side {
                Side::F => p.f,
                Side::G => p.g,
            })
        };
        let estimated = match grid {
            Some(f) => Some(RemainderStrategy::estimate_from_grid(tag, f)?),
            None => None,
        };
        let missing = |flag| CliError::MissingPrior {
            flag,
            strategy: strategy_name(tag),
        };
        Ok(match (tag, estimated) {
            (StrategyTag::Holder, _) => RemainderStrategy::Holder,
            (StrategyTag::Bounded, est) => {
                let sup_norm = match (pick(self.sup_norm), est) {
                    (Some(v), _) => v,
                    (None, Some(RemainderStrategy::Bounded { sup_norm, .. })) => sup_norm,
                    _ => return Err(missing("--sup-norm")),
                };
                let m = self
                    .bounded_m
                    .map_or(MomentChoice::Auto, MomentChoice::Fixed);
                RemainderStrategy::Bounded { sup_norm, m }
            }
            (StrategyTag::AbsContinuous, est) => {
                let (a, l) = match est {
                    Some(RemainderStrategy::AbsContinuous {
                        anchor_value,
                        derivative_l1,
                    }) => (Some(anchor_value), Some(derivative_l1)),
                    _ => (None, None),
                };
                RemainderStrategy::AbsContinuous {
                    anchor_value: pick(self.anchor).or(a).ok_or_else(|| missing("--anchor"))?,
                    derivative_l1: pick(self.deriv_l1)
                        .or(l)
                        .ok_or_else(|| missing("--deriv-l1"))?,
                }
            }
            (StrategyTag::Ibp, est) => {
                let (a, b, c) = match est {
                    Some(RemainderStrategy::Ibp {
                        f_at_1,
                        fprime_at_1,
                        sup_f2,
                    }) => (Some(f_at_1), Some(fprime_at_1), Some(sup_f2)),
                    _ => (None, None, None),
                };
                RemainderStrategy::Ibp {
                    f_at_1: pick(self.f_at_1).or(a).ok_or_else(|| missing("--f-at-1"))?,
                    fprime_at_1: pick(self.fprime_at_1)
                        .or(b)
                        .ok_or_else(|| missing("--fprime-at-1"))?,
                    sup_f2: pick(self.sup_f2).or(c).ok_or_else(|| missing("--sup-f2"))?,
                }
            }
            (StrategyTag::User, _) => {
                return Err(CliError::Config(
                    "the user strategy is implied by cutoff-only".into(),
                ))
            }
        })
    }
}

fn strategy_name(tag: StrategyTag) -> &'static str {
    match tag {
        StrategyTag::Holder => "holder",
        StrategyTag::Bounded => "bounded",
        StrategyTag::AbsContinuous => "abscont",
        StrategyTag::Ibp => "ibp",
        StrategyTag::User => "user",
    }
}

pub fn parse_strategy(s: &str) -> Result<StrategyTag> {
    match s {
        "holder" => Ok(StrategyTag::Holder),
        "bounded" => Ok(StrategyTag::Bounded),
        "abscont" => Ok(StrategyTag::AbsContinuous),
        "ibp" => Ok(StrategyTag::Ibp),
        _ => Err(CliError::Config(format!(
            "unknown strategy {s:?}; expected holder, bounded, abscont or ibp"
        ))),
    }
}

fn parse_reals(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Config(format!("{p:?} is not a finite number")))
        })
        .collect()
}

/// `a,b` as a pair of reals.
pub fn parse_pair(s: &str) -> Result<(f64, f64)> {
    match parse_reals(s)?[..] {
        [a, b] => Ok((a, b)),
        _ => Err(CliError::Config(format!("expected `a,b`, got {s:?}"))),
    }
}

/// `lo,hi` as a pair of mode indices.
pub fn parse_band(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(',').collect();
    let index = |p: &str| {
        p.trim()
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("{p:?} is not a mode index")))
    };
    match parts[..] {
        [lo, hi] => Ok((index(lo)?, index(hi)?)),
        _ => Err(CliError::Config(format!("expected `lo,hi`, got {s:?}"))),
    }
}

/// A one-dimensional analytic density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// Truncated normal `normal:mu,sigma`.
    Normal {
        mu: f64,
        sigma: f64,
    },
    Uniform,
    /// `f(x) = 2x`.
    Linear,
    /// Scale-separated random spectrum; `spectrum` alone takes `--seed`.
    Spectrum {
        seed: Option<u64>,
    },
}

impl FromStr for Generator {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let args = args.trim();
        match (kind.trim(), args.is_empty()) {
            ("uniform", true) => Ok(Generator::Uniform),
            ("linear", true) => Ok(Generator::Linear),
            ("normal", false) => {
                let (mu, sigma) = parse_pair(args)?;
                TruncatedNormalSpec::new(mu, sigma)?;
                Ok(Generator::Normal { mu, sigma })
            }
            ("spectrum", true) => Ok(Generator::Spectrum { seed: None }),
            ("spectrum", false) => args
                .parse::<u64>()
                .map(|seed| Generator::Spectrum { seed: Some(seed) })
                .map_err(|_| CliError::Config(format!("{args:?} is not a seed"))),
            _ => Err(CliError::Config(format!(
                "unknown generator {s:?}; expected normal:MU,SIGMA, uniform, linear or spectrum[:SEED]"
            ))),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Normal { mu, sigma } => write!(f, "normal:{mu},{sigma}"),
            Generator::Uniform => f.write_str("uniform"),
            Generator::Linear => f.write_str("linear"),
            Generator::Spectrum { seed: Some(s) } => write!(f, "spectrum:{s}"),
            Generator::Spectrum { seed: None } => f.write_str("spectrum"),
        }
    }
}

impl Generator {
    pub fn sample(&self, config: &RunConfig, num_points: usize) -> Result<GridFunction1D> {
        Ok(match *self {
            Generator::Normal { mu, sigma } => {
                truncated_normal(TruncatedNormalSpec::new(mu, sigma)?, num_points)?
            }
            Generator::Uniform => GridFunction1D::uniform(num_points)?,
            Generator::Linear => GridFunction1D::from_fn(num_points, |x| 2.0 * x)?.normalize()?,
            Generator::Spectrum { seed } => {
                let spec = config.spectrum.spec(seed.unwrap_or(config.seed));
                scale_separated_pdf(&spec, num_points)?
            }
        })
    }

    pub fn describe(&self, config: &RunConfig) -> Value {
        match *self {
            Generator::Normal { mu, sigma } => json!({"kind": "normal", "mu": mu, "sigma": sigma}),
            Generator::Uniform => json!({"kind": "uniform"}),
            Generator::Linear => json!({"kind": "linear"}),
            Generator::Spectrum { seed } => {
                let s = config.spectrum;
                json!({
                    "kind": "spectrum",
                    "seed": seed.unwrap_or(config.seed),
                    "modes": s.modes,
                    "zero_band": s.zero_band.map(|(lo, hi)| vec![lo, hi]),
                    "margin": s.margin,
                })
            }
        }
    }
}

/// Product density `a*b` on the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductGenerator(pub Generator, pub Generator);

impl FromStr for ProductGenerator {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once('*').ok_or_else(|| {
            CliError::Config(format!("expected `A*B` for a product density, got {s:?}"))
        })?;
        Ok(Self(a.parse()?, b.parse()?))
    }
}

impl ProductGenerator {
    pub fn sample(&self, config: &RunConfig, num_points: usize) -> Result<GridFunction2D> {
        let a = self.0.sample(config, num_points)?;
        let b = self.1.sample(config, num_points)?;
        Ok(GridFunction2D::product(&a, &b)?.normalize()?)
    }

    pub fn describe(&self, config: &RunConfig) -> Value {
        json!({"x1": self.0.describe(config), "x2": self.1.describe(config)})
    }
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    /// Number of known moments, `⟨x^0⟩ … ⟨x^{n-1}⟩`.
    pub n: usize,
    pub epsilon: f64,
    /// Grid points per axis; `None` picks the subcommand default.
    pub grid: Option<usize>,
    /// Nodes on `[0, K]`; `None` uses `max(2001, ceil(200 K))`.
    pub kgrid: Option<usize>,
    pub strategy: StrategyTag,
    pub priors: Priors,
    pub domain: Option<(f64, f64)>,
    pub seed: u64,
    pub spectrum: SpectrumOptions,
    pub inflate_se: Option<f64>,
    pub out_report: Option<PathBuf>,
    pub out_curves: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(subcommand: Subcommand) -> Self {
        Self {
            subcommand,
            n: DEFAULT_N,
            epsilon: DEFAULT_EPSILON,
            grid: None,
            kgrid: None,
            strategy: StrategyTag::Holder,
            priors: Priors::default(),
            domain: None,
            seed: 1,
            spectrum: SpectrumOptions::default(),
            inflate_se: None,
            out_report: None,
            out_curves: None,
        }
    }

    pub fn grid_points(&self) -> usize {
        self.grid.unwrap_or(match self.subcommand {
            Subcommand::Compare2d => DEFAULT_GRID_2D,
            _ => DEFAULT_GRID,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(CliError::Config("--n must be at least 1".into()));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(CliError::Config(format!(
                "--epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        let odd = |flag: &str, v: usize| {
            if v < 3 || v.is_multiple_of(2) {
                Err(CliError::Config(format!(
                    "{flag} must be odd and at least 3, got {v}"
                )))
            } else {
                Ok(())
            }
        };
        odd("--grid", self.grid_points())?;
        if let Some(k) = self.kgrid {
            odd("--kgrid", k)?;
        }
        if let Some((a, b)) = self.domain {
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(CliError::Config(format!("--domain {a},{b} is empty")));
            }
        }
        if let Some(z) = self.inflate_se {
            if !(z.is_finite() && z >= 0.0) {
                return Err(CliError::Config(format!(
                    "--inflate-se must be non-negative, got {z}"
                )));
            }
        }
        self.spectrum.spec(self.seed).validate()?;
        Ok(())
    }
}
