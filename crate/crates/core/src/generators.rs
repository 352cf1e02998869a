//! Test densities: truncated normals and scale-separated random spectra.
//!
//! # Random spectra
//!
//! [`scale_separated_pdf`] is reproducible across implementations. The
//! stream is ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`), seeded with
//! `seed_from_u64(seed)`. Each standard normal consumes two 64-bit words
//! `w1, w2`, mapped to `u = (w >> 11) · 2^-53`, and uses the cosine branch
//! of Box–Muller: `z = sqrt(-2 ln(1 - u1)) · cos(2π u2)`. The `J` normals are
//! stably sorted by decreasing magnitude onto modes `1 … J`, the zero band
//! is cleared, and the density is
//! `normalize(Σ_j a_j sin(2π j x) + s)` with `s = max(0, -min) + margin`.

use std::f64::consts::{FRAC_2_SQRT_PI, PI};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::model::GridFunction1D;
use crate::quadrature;

/// `erf(x) = 2/√π ∫_0^x e^{-t²} dt`, absolute error below 1e-15 or so.
///
/// Uses the positive-term series `erf(x) = 2/√π e^{-x²} Σ 2^n x^{2n+1}/(2n+1)!!`
/// for `|x| < 3` and the continued fraction for `erfc` beyond.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return -erf(-x);
    }
    if x < 3.0 {
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        while term > sum * 1e-17 {
            n += 1.0;
            term *= 2.0 * x2 / (2.0 * n + 1.0);
            sum += term;
        }
        FRAC_2_SQRT_PI * (-x2).exp() * sum
    } else {
        1.0 - erfc_continued_fraction(x)
    }
}

// Lentz evaluation of erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …)))).
fn erfc_continued_fraction(x: f64) -> f64 {
    if x > 27.0 {
        return 0.0;
    }
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for i in 1..500 {
        let a = i as f64 / 2.0;
        d = x + a * d;
        d = if d.abs() < tiny { tiny } else { d };
        c = x + a / c;
        c = if c.abs() < tiny { tiny } else { c };
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (f * PI.sqrt())
}

/// Normal density restricted to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedNormalSpec {
    mu: f64,
    sigma: f64,
}

impl TruncatedNormalSpec {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::BadSigma { sigma });
        }
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidArgument(format!(
                "mean {mu} must lie in [0, 1]"
            )));
        }
        Ok(Self { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `N_f = σ √(π/2) [erf((1-μ)/(√2σ)) - erf(-μ/(√2σ))]`.
    pub fn normalization(&self) -> f64 {
        let s = std::f64::consts::SQRT_2 * self.sigma;
        self.sigma * (PI / 2.0).sqrt() * (erf((1.0 - self.mu) / s) - erf(-self.mu / s))
    }
}

/// Samples `exp(-(x-μ)²/(2σ²))` and normalizes by quadrature.
pub fn truncated_normal(spec: TruncatedNormalSpec, num_points: usize) -> Result<GridFunction1D> {
    quadrature::check_points(num_points)?;
    let last = num_points - 1;
    let denom = 2.0 * last as f64;
    let shift = 0.5 - spec.mu;
    let two_var = 2.0 * spec.sigma * spec.sigma;
    // x - 1/2 is formed from exact integers so the grid is mirror-symmetric about 1/2.
    let values = (0..num_points)
        .map(|i| {
            let centered = (2.0 * i as f64 - last as f64) / denom;
            let d = centered + shift;
            (-d * d / two_var).exp()
        })
        .collect();
    GridFunction1D::new(values)?.normalize()
}

/// Random spectrum with a band of zeroed modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSpec {
    pub seed: u64,
    pub num_modes: usize,
    /// Inclusive mode range `[lo, hi]` set to zero; `None` keeps every mode.
    pub zero_band: Option<(usize, usize)>,
    pub margin: f64,
}

impl SpectrumSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_modes == 0 {
            return Err(Error::InvalidArgument(
                "at least one mode is required".into(),
            ));
        }
        if let Some((lo, hi)) = self.zero_band {
            if lo < 1 || lo > hi || hi > self.num_modes {
                return Err(Error::BadBand {
                    lo,
                    hi,
                    modes: self.num_modes,
                });
            }
        }
        if !(self.margin.is_finite() && self.margin > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "margin {} must be positive",
                self.margin
            )));
        }
        Ok(())
    }
}

/// Standard normal stream over ChaCha8 (see the module docs).
pub struct NormalStream {
    rng: ChaCha8Rng,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (2.0 * PI * u2).cos()
    }
}

/// Sine amplitudes `a_1 … a_J` after sorting and band zeroing.
pub fn spectrum_amplitudes(spec: &SpectrumSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut stream = NormalStream::new(spec.seed);
    let mut amps: Vec<f64> = (0..spec.num_modes).map(|_| stream.next_normal()).collect();
    amps.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    if let Some((lo, hi)) = spec.zero_band {
        amps[lo - 1..hi].iter_mut().for_each(|a| *a = 0.0);
    }
    Ok(amps)
}

/// Scale-separated density from a seeded random sine spectrum.
pub fn scale_separated_pdf(spec: &SpectrumSpec, num_points: usize) -> Result<GridFunction1D> {
    quadrature::check_points(num_points)?;
    let amps = spectrum_amplitudes(spec)?;
    let last = (num_points - 1) as f64;
    let raw: Vec<f64> = (0..num_points)
        .map(|i| {
            let x = i as f64 / last;
            amps.iter()
                .enumerate()
                .filter(|(_, a)| **a != 0.0)
                .map(|(j, a)| a * (2.0 * PI * (j + 1) as f64 * x).sin())
                .sum()
        })
        .collect();
    let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = (-min).max(0.0) + spec.margin;
    GridFunction1D::new(raw.into_iter().map(|v| v + shift).collect())?.normalize()
}
