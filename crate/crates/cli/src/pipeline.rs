//! End-to-end comparisons: moments, gaps, cut-off, filtering, distances.

use std::collections::BTreeMap;
use std::path::Path;

use momcut::cutoff::{build_common_cutoff_equation, build_polynomial, solve_unique_root};
use momcut::moments::{
    compute_moments, empirical_moments, empirical_standard_errors, inflate_gaps, moment_gap_with,
    multi_moment_gap, multi_moments,
};
use momcut::spectral::{
    bound_value, char_samples_from_points, default_k_points, distance, distance_2d, lowpass2d_with,
    lowpass_from_characteristic, lowpass_with, multi_bound_value,
};
use momcut::{
    AffineMap, ComparisonReport, Cutoff, GridFunction1D, GridFunction2D, MomentGap, MultiIndex,
    StrategyTag,
};
use serde_json::{json, Value};

use crate::config::{Generator, ProductGenerator, RunConfig, Side};
use crate::dataset::{fingerprint, load_dataset, rescale_to_unit};
use crate::error::{CliError, Result};

/// Sampled curves of one 1-D comparison, one entry per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct Curves {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub f_smoothed: Vec<f64>,
    pub g_smoothed: Vec<f64>,
}

/// Row-major samples of one 2-D comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Curves2d {
    pub points_per_axis: usize,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub f_smoothed: Vec<f64>,
    pub g_smoothed: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub report: ComparisonReport,
    pub curves: Curves,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison2d {
    pub report: ComparisonReport,
    pub curves: Curves2d,
}

type Metadata = BTreeMap<String, Value>;

fn k_points(config: &RunConfig, cutoff: f64) -> usize {
    config.kgrid.unwrap_or_else(|| default_k_points(cutoff))
}

fn base_metadata(config: &RunConfig) -> Metadata {
    let mut meta = Metadata::new();
    meta.insert("subcommand".into(), json!(config.subcommand.name()));
    meta.insert("grid".into(), json!(config.grid_points()));
    meta
}

fn report(
    config: &RunConfig,
    gap: &MomentGap,
    cutoff: Cutoff,
    distances: Option<(f64, f64)>,
    domain_map: Option<AffineMap>,
    metadata: Metadata,
) -> ComparisonReport {
    ComparisonReport {
        n: gap.order(),
        epsilon: config.epsilon,
        gaps: gap.gaps().to_vec(),
        remainder: gap.remainder(),
        strategy: gap.strategy(),
        cutoff,
        distance_original: distances.map(|d| d.0),
        distance_smoothed: distances.map(|d| d.1),
        bound_at_k: cutoff.value().map_or(0.0, |k| bound_value(gap, k)),
        domain_map,
        metadata,
    }
}

fn solve(gap: &MomentGap, epsilon: f64) -> Result<Cutoff> {
    Ok(solve_unique_root(&build_polynomial(gap, epsilon)?))
}

/// Compares two gridded densities on the same grid.
pub fn compare(f: &GridFunction1D, g: &GridFunction1D, config: &RunConfig) -> Result<Comparison> {
    config.validate()?;
    if f.num_points() != g.num_points() {
        return Err(momcut::Error::GridMismatch {
            left: f.num_points(),
            right: g.num_points(),
        }
        .into());
    }
    let mf = compute_moments(f, config.n)?;
    let mg = compute_moments(g, config.n)?;
    let sf = config.priors.strategy(config.strategy, Side::F, Some(f))?;
    let sg = config.priors.strategy(config.strategy, Side::G, Some(g))?;
    let gap = moment_gap_with(&mf, &mg, &sf, &sg)?;
    let cutoff = solve(&gap, config.epsilon)?;
    let original = distance(f, g)?;

    let mut meta = base_metadata(config);
    meta.insert("moments_f".into(), json!(mf.values()));
    meta.insert("moments_g".into(), json!(mg.values()));
    let (f_lo, g_lo, smoothed) = match cutoff {
        Cutoff::Finite(k) => {
            let num_k = k_points(config, k);
            meta.insert("kgrid".into(), json!(num_k));
            let f_lo = lowpass_with(f, k, num_k)?;
            let g_lo = lowpass_with(g, k, num_k)?;
            let d = distance(&f_lo, &g_lo)?;
            (f_lo.into_values(), g_lo.into_values(), d)
        }
        Cutoff::Unbounded => (f.values().to_vec(), g.values().to_vec(), original),
    };
    Ok(Comparison {
        report: report(config, &gap, cutoff, Some((original, smoothed)), None, meta),
        curves: Curves {
            x: f.nodes().collect(),
            f: f.values().to_vec(),
            g: g.values().to_vec(),
            f_smoothed: f_lo,
            g_smoothed: g_lo,
        },
    })
}

/// `compare-pdf`: two analytic generators.
pub fn compare_pdf(f: &Generator, g: &Generator, config: &RunConfig) -> Result<Comparison> {
    config.validate()?;
    let points = config.grid_points();
    let mut out = compare(
        &f.sample(config, points)?,
        &g.sample(config, points)?,
        config,
    )?;
    out.report.metadata.insert("f".into(), f.describe(config));
    out.report.metadata.insert("g".into(), g.describe(config));
    Ok(out)
}

/// Histogram with `ceil(sqrt(count))` equal bins on `[0, 1]`, as bin masses.
fn histogram(points: &[f64], bins: usize) -> Vec<f64> {
    let mut counts = vec![0usize; bins];
    for &x in points {
        let b = ((x * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let total = points.len() as f64;
    counts.into_iter().map(|c| c as f64 / total).collect()
}

fn histogram_bins(counts: &[usize]) -> usize {
    let smallest = counts.iter().copied().min().unwrap_or(1) as f64;
    (smallest.sqrt().ceil() as usize).max(1)
}

/// Histogram density evaluated at the grid nodes.
fn histogram_density(masses: &[f64], num_points: usize) -> Vec<f64> {
    let bins = masses.len();
    let last = (num_points - 1) as f64;
    (0..num_points)
        .map(|i| {
            let b = ((i as f64 / last * bins as f64) as usize).min(bins - 1);
            masses[b] * bins as f64
        })
        .collect()
}

/// Low-pass filtered empirical measure of points in `[0, 1]`.
fn empirical_lowpass(
    points: &[f64],
    cutoff: f64,
    num_k: usize,
    num_points: usize,
) -> Result<GridFunction1D> {
    let cs = char_samples_from_points(points, cutoff, num_k)?;
    Ok(lowpass_from_characteristic(&cs, num_points)?)
}

/// Compares two samples already mapped into `[0, 1]`.
///
/// Moments are the sample moments. The smoothed densities filter the
/// empirical measures directly; the original distance is the L1 distance
/// between histograms with `ceil(sqrt(N))` shared bins.
pub fn compare_samples(
    data_f: &[f64],
    data_g: &[f64],
    domain_map: AffineMap,
    config: &RunConfig,
) -> Result<Comparison> {
    config.validate()?;
    let mf = empirical_moments(data_f, config.n)?;
    let mg = empirical_moments(data_g, config.n)?;
    let sf = config.priors.strategy(config.strategy, Side::F, None)?;
    let sg = config.priors.strategy(config.strategy, Side::G, None)?;
    let mut gap = moment_gap_with(&mf, &mg, &sf, &sg)?;
    let mut meta = base_metadata(config);
    if let Some(z) = config.inflate_se {
        let se_f = empirical_standard_errors(data_f, config.n)?;
        let se_g = empirical_standard_errors(data_g, config.n)?;
        gap = inflate_gaps(&gap, &se_f, &se_g, z)?;
        meta.insert("inflate_se".into(), json!(z));
        meta.insert("standard_errors_f".into(), json!(se_f));
        meta.insert("standard_errors_g".into(), json!(se_g));
    }
    let cutoff = solve(&gap, config.epsilon)?;

    let points = config.grid_points();
    let bins = histogram_bins(&[data_f.len(), data_g.len()]);
    let (hf, hg) = (histogram(data_f, bins), histogram(data_g, bins));
    let original: f64 = hf.iter().zip(&hg).map(|(a, b)| (a - b).abs()).sum();
    let (f, g) = (
        histogram_density(&hf, points),
        histogram_density(&hg, points),
    );

    meta.insert("histogram_bins".into(), json!(bins));
    meta.insert("moments_f".into(), json!(mf.values()));
    meta.insert("moments_g".into(), json!(mg.values()));
    let (f_lo, g_lo, smoothed) = match cutoff {
        Cutoff::Finite(k) => {
            let num_k = k_points(config, k);
            meta.insert("kgrid".into(), json!(num_k));
            let f_lo = empirical_lowpass(data_f, k, num_k, points)?;
            let g_lo = empirical_lowpass(data_g, k, num_k, points)?;
            let d = distance(&f_lo, &g_lo)?;
            (f_lo.into_values(), g_lo.into_values(), d)
        }
        Cutoff::Unbounded => (f.clone(), g.clone(), original),
    };
    Ok(Comparison {
        report: report(
            config,
            &gap,
            cutoff,
            Some((original, smoothed)),
            Some(domain_map),
            meta,
        ),
        curves: Curves {
            x: momcut::quadrature::QuadratureSpec::new(points)?.nodes(0.0, 1.0),
            f,
            g,
            f_smoothed: f_lo,
            g_smoothed: g_lo,
        },
    })
}

fn dataset_metadata(path: &Path, count: usize) -> Result<Value> {
    Ok(json!({
        "path": path.display().to_string(),
        "sha256": fingerprint(path)?,
        "count": count,
    }))
}

/// `compare-data`: two CSV samples mapped jointly onto `[0, 1]`.
pub fn compare_data(path_f: &Path, path_g: &Path, config: &RunConfig) -> Result<Comparison> {
    let raw_f = load_dataset(path_f)?;
    let raw_g = load_dataset(path_g)?;
    let (data_f, data_g, map) = rescale_to_unit(&raw_f, &raw_g, config.domain)?;
    let mut out = compare_samples(&data_f, &data_g, map, config)?;
    let meta = &mut out.report.metadata;
    meta.insert("f".into(), dataset_metadata(path_f, raw_f.len())?);
    meta.insert("g".into(), dataset_metadata(path_g, raw_g.len())?);
    Ok(out)
}

/// Maps one sample onto the support of a generator, `[0, 1]`.
fn map_onto_unit(data: &[f64], domain: Option<(f64, f64)>) -> Result<(Vec<f64>, AffineMap)> {
    let (lo, hi) = domain.unwrap_or((0.0, 1.0));
    let map = AffineMap::new(lo, hi)?;
    if let Some(&value) = data.iter().find(|v| !(lo..=hi).contains(*v)) {
        return Err(CliError::DomainViolation { value, lo, hi });
    }
    Ok((
        data.iter().map(|&x| map.apply(x).clamp(0.0, 1.0)).collect(),
        map,
    ))
}

/// `compare-mixed`: a CSV sample against an analytic generator. The sample
/// must lie in `[0, 1]` unless `--domain` maps it there.
pub fn compare_mixed(path_f: &Path, g: &Generator, config: &RunConfig) -> Result<Comparison> {
    config.validate()?;
    let raw = load_dataset(path_f)?;
    let (data, map) = map_onto_unit(&raw, config.domain)?;
    let points = config.grid_points();
    let gf = g.sample(config, points)?;

    let mf = empirical_moments(&data, config.n)?;
    let mg = compute_moments(&gf, config.n)?;
    let sf = config.priors.strategy(config.strategy, Side::F, None)?;
    let sg = config
        .priors
        .strategy(config.strategy, Side::G, Some(&gf))?;
    let mut gap = moment_gap_with(&mf, &mg, &sf, &sg)?;
    let mut meta = base_metadata(config);
    if let Some(z) = config.inflate_se {
        let se_f = empirical_standard_errors(&data, config.n)?;
        gap = inflate_gaps(&gap, &se_f, &vec![0.0; config.n], z)?;
        meta.insert("inflate_se".into(), json!(z));
        meta.insert("standard_errors_f".into(), json!(se_f));
    }
    let cutoff = solve(&gap, config.epsilon)?;

    let bins = histogram_bins(&[data.len()]);
    let f = histogram_density(&histogram(&data, bins), points);
    let diff: Vec<f64> = f
        .iter()
        .zip(gf.values())
        .map(|(a, b)| (a - b).abs())
        .collect();
    let original = momcut::quadrature::integrate(&diff, 0.0, 1.0)?;

    meta.insert("histogram_bins".into(), json!(bins));
    meta.insert("moments_f".into(), json!(mf.values()));
    meta.insert("moments_g".into(), json!(mg.values()));
    meta.insert("f".into(), dataset_metadata(path_f, raw.len())?);
    meta.insert("g".into(), g.describe(config));
    let (f_lo, g_lo, smoothed) = match cutoff {
        Cutoff::Finite(k) => {
            let num_k = k_points(config, k);
            meta.insert("kgrid".into(), json!(num_k));
            let f_lo = empirical_lowpass(&data, k, num_k, points)?;
            let g_lo = lowpass_with(&gf, k, num_k)?;
            let d = distance(&f_lo, &g_lo)?;
            (f_lo.into_values(), g_lo.into_values(), d)
        }
        Cutoff::Unbounded => (f.clone(), gf.values().to_vec(), original),
    };
    Ok(Comparison {
        report: report(
            config,
            &gap,
            cutoff,
            Some((original, smoothed)),
            Some(map),
            meta,
        ),
        curves: Curves {
            x: gf.nodes().collect(),
            f,
            g: gf.values().to_vec(),
            f_smoothed: f_lo,
            g_smoothed: g_lo,
        },
    })
}

/// Gap file: one real per line, `M_0 … M_{n-1}` then `R_n`.
pub fn parse_gap_file(text: &str) -> Result<MomentGap> {
    let mut values = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let v = line
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| CliError::Parse {
                line: index + 1,
                content: line.to_string(),
            })?;
        values.push(v);
    }
    let Some(remainder) = values.pop() else {
        return Err(CliError::EmptyData);
    };
    if values.is_empty() {
        return Err(CliError::Config(
            "gap file needs at least one gap line followed by the remainder".into(),
        ));
    }
    Ok(MomentGap::new(values, remainder, StrategyTag::User)?)
}

/// `cutoff-only`: `K` from user-supplied gaps, with no filtering.
pub fn cutoff_only(gap: &MomentGap, config: &RunConfig) -> Result<ComparisonReport> {
    config.validate()?;
    let cutoff = solve(gap, config.epsilon)?;
    let mut meta = Metadata::new();
    meta.insert("subcommand".into(), json!(config.subcommand.name()));
    Ok(report(config, gap, cutoff, None, None, meta))
}

/// `cutoff-only` reading the gap file at `path`.
pub fn cutoff_only_file(path: &Path, config: &RunConfig) -> Result<ComparisonReport> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut out = cutoff_only(&parse_gap_file(&text)?, config)?;
    out.metadata.insert(
        "gap_file".into(),
        json!({"path": path.display().to_string(), "sha256": fingerprint(path)?}),
    );
    Ok(out)
}

/// `gen-spectrum`: one scale-separated density from `--seed`.
pub fn gen_spectrum(config: &RunConfig) -> Result<GridFunction1D> {
    config.validate()?;
    Generator::Spectrum { seed: None }.sample(config, config.grid_points())
}

/// `compare-2d`: product densities on the unit square with a common
/// cut-off `κ` on both axes.
///
/// The report lists `M_α` in graded order (`|α|` ascending, then `α_1`
/// descending) and records the largest `R_α` as `remainder`; the full
/// index sets are in the metadata.
pub fn compare_2d(
    f: &ProductGenerator,
    g: &ProductGenerator,
    config: &RunConfig,
) -> Result<Comparison2d> {
    config.validate()?;
    if config.strategy != StrategyTag::Holder {
        return Err(CliError::Config(
            "compare-2d supports only the holder strategy".into(),
        ));
    }
    let points = config.grid_points();
    let (fd, gd) = (f.sample(config, points)?, g.sample(config, points)?);
    compare_grids_2d(&fd, &gd, config).map(|mut out| {
        out.report.metadata.insert("f".into(), f.describe(config));
        out.report.metadata.insert("g".into(), g.describe(config));
        out
    })
}

/// Compares two gridded densities on the unit square.
pub fn compare_grids_2d(
    f: &GridFunction2D,
    g: &GridFunction2D,
    config: &RunConfig,
) -> Result<Comparison2d> {
    config.validate()?;
    let gap = multi_moment_gap(&multi_moments(f, config.n)?, &multi_moments(g, config.n)?)?;
    let cutoff = solve_unique_root(&build_common_cutoff_equation(&gap, config.epsilon, 2)?);
    let original = distance_2d(f, g)?;

    let order = MultiIndex::up_to(2, config.n - 1);
    let gaps: Vec<f64> = order.iter().map(|a| gap.gaps()[a]).collect();
    let remainder = gap.remainders().values().copied().fold(0.0, f64::max);
    let label = |m: &BTreeMap<MultiIndex, f64>| -> Value {
        m.iter()
            .map(|(a, v)| (a.to_string(), json!(v)))
            .collect::<serde_json::Map<_, _>>()
            .into()
    };
    let mut meta = base_metadata(config);
    meta.insert("dimension".into(), json!(2));
    meta.insert(
        "gap_indices".into(),
        json!(order.iter().map(|a| a.to_string()).collect::<Vec<_>>()),
    );
    meta.insert("gaps_by_index".into(), label(gap.gaps()));
    meta.insert("remainders_by_index".into(), label(gap.remainders()));

    let (f_lo, g_lo, smoothed, bound) = match cutoff {
        Cutoff::Finite(k) => {
            let num_k = k_points(config, k);
            meta.insert("kgrid".into(), json!(num_k));
            let f_lo = lowpass2d_with(f, (k, k), (num_k, num_k))?;
            let g_lo = lowpass2d_with(g, (k, k), (num_k, num_k))?;
            let d = distance_2d(&f_lo, &g_lo)?;
            let bound = multi_bound_value(&gap, &[k, k])?;
            (f_lo.values().to_vec(), g_lo.values().to_vec(), d, bound)
        }
        Cutoff::Unbounded => (f.values().to_vec(), g.values().to_vec(), original, 0.0),
    };
    let report = ComparisonReport {
        n: config.n,
        epsilon: config.epsilon,
        gaps,
        remainder,
        strategy: StrategyTag::Holder,
        cutoff,
        distance_original: Some(original),
        distance_smoothed: Some(smoothed),
        bound_at_k: bound,
        domain_map: None,
        metadata: meta,
    };
    Ok(Comparison2d {
        report,
        curves: Curves2d {
            points_per_axis: f.points_per_axis(),
            f: f.values().to_vec(),
            g: g.values().to_vec(),
            f_smoothed: f_lo,
            g_smoothed: g_lo,
        },
    })
}
